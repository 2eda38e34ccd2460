//! Critical supply voltages and the states at which they occur.

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::magnetics::mmf_dphi2;
use crate::params::{Actuator, ReluctanceModel};

/// Critical points of the basic law, plus the saturated counterparts when the
/// saturation law is active. Lift-off values are `None` when the stop lies at or
/// beyond the spring rest position (no force balance exists there).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalPoints {
    /// Voltage at which an equilibrium enters the domain through `z = 0`.
    pub u0: f64,
    pub phi0: f64,
    /// Tangential (saddle-node) bifurcation.
    pub ub: f64,
    pub zb: f64,
    pub phib: f64,
    /// Lift-off from the lower stop.
    pub u_min: Option<f64>,
    pub phi_min: Option<f64>,
    /// Lift-off from the upper stop.
    pub u_max: Option<f64>,
    pub phi_max: Option<f64>,
    pub saturated: Option<SaturatedCriticalPoints>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaturatedCriticalPoints {
    pub u0: f64,
    pub ub: f64,
    pub zb: f64,
    pub phib: f64,
    pub u_min: Option<f64>,
    pub u_max: Option<f64>,
}

impl CriticalPoints {
    /// Lift-off voltage from the upper stop for the active law.
    pub fn active_u_max(&self) -> Option<f64> {
        match &self.saturated {
            Some(s) => s.u_max,
            None => self.u_max,
        }
    }

    pub fn active_u_min(&self) -> Option<f64> {
        match &self.saturated {
            Some(s) => s.u_min,
            None => self.u_min,
        }
    }

    pub fn active_zb(&self) -> f64 {
        self.saturated.map_or(self.zb, |s| s.zb)
    }
}

/// Evaluates every critical point of `actuator`.
///
/// Basic-law quantities come from their closed forms. The saturated fold has no
/// compact closed form and is obtained by Newton's method on
/// `{f_v = 0, f_phi = 0, det(df/dx) = 0}` in `(z, phi, u)`, started from the basic
/// fold. Requires `phi_sat > phi0` under saturation.
pub fn critical_points(actuator: &Actuator) -> Result<CriticalPoints> {
    let p = &actuator.params;
    let n = p.turns();

    let phi0 = (2.0 * p.ks * p.zs / p.kr).sqrt();
    let u0 = p.r * p.r0 / n * phi0;
    let gap0 = p.r0 + p.kr * p.zs;
    let ub = 2.0 * p.r * (6.0 * p.ks * gap0.powi(3)).sqrt() / (9.0 * n * p.kr);
    let zb = 2.0 / 3.0 * p.zs - p.r0 / (3.0 * p.kr);
    let phib = (6.0 * p.ks * gap0).sqrt() / (3.0 * p.kr);

    let stop_flux = |z: f64| (z.is_finite() && z < p.zs).then(|| (2.0 * p.ks * (p.zs - z) / p.kr).sqrt());
    let phi_min = stop_flux(p.z_min);
    let phi_max = stop_flux(p.z_max);
    let u_min = phi_min.map(|f| p.r * (p.r0 + p.kr * p.z_min) / n * f);
    let u_max = phi_max.map(|f| p.r * (p.r0 + p.kr * p.z_max) / n * f);

    let saturated = match actuator.model {
        ReluctanceModel::Basic => None,
        ReluctanceModel::Saturation { phi_sat } => {
            if phi_sat <= phi0 {
                return Err(Error::ModelInconsistency(format!(
                    "saturation flux {phi_sat} Wb must exceed phi0 = {phi0} Wb"
                )));
            }
            let stop_voltage = |f: f64, z: f64| p.r * f / n * (p.r0 / (1.0 - f / phi_sat) + p.kr * z);
            let (zb_s, phib_s, ub_s) = saturated_fold(actuator, (zb, phib, ub))?;
            Some(SaturatedCriticalPoints {
                u0: u0 / (1.0 - phi0 / phi_sat),
                ub: ub_s,
                zb: zb_s,
                phib: phib_s,
                u_min: phi_min.map(|f| stop_voltage(f, p.z_min)),
                u_max: phi_max.map(|f| stop_voltage(f, p.z_max)),
            })
        }
    };

    Ok(CriticalPoints {
        u0,
        phi0,
        ub,
        zb,
        phib,
        u_min,
        phi_min,
        u_max,
        phi_max,
        saturated,
    })
}

/// Damped Newton on the fold system in scaled unknowns `(z/zs, phi/phib, u/ub)`.
fn saturated_fold(a: &Actuator, basic: (f64, f64, f64)) -> Result<(f64, f64, f64)> {
    let p = &a.params;
    let n = p.turns();
    let (zb, phib, ub) = basic;
    let (sz, sphi, su) = (p.zs, phib, ub);
    let mmf_scale = n * ub / p.r;
    let det_scale = p.ks * (p.r0 + p.kr * p.zs);

    let residual = |x: &Vector3<f64>| -> Option<Vector3<f64>> {
        let (z, phi, u) = (x[0] * sz, x[1] * sphi, x[2] * su);
        let mmf = a.mmf(z.max(0.0), phi).ok()? + phi * p.kr * z.min(0.0);
        let dmmf = a.mmf_dphi(z.max(0.0), phi).ok()? + p.kr * z.min(0.0);
        Some(Vector3::new(
            (-0.5 * p.kr * phi * phi - p.ks * (z - p.zs)) / (p.ks * p.zs),
            (n * u / p.r - mmf) / mmf_scale,
            (p.ks * dmmf - p.kr * p.kr * phi * phi) / det_scale,
        ))
    };
    let jac = |x: &Vector3<f64>| -> Option<Matrix3<f64>> {
        let (z, phi) = (x[0] * sz, x[1] * sphi);
        let dmmf = a.mmf_dphi(z.max(0.0), phi).ok()? + p.kr * z.min(0.0);
        let d2 = mmf_dphi2(a.model, p, phi);
        Some(Matrix3::new(
            -1.0 / p.zs * sz,
            -p.kr * phi / (p.ks * p.zs) * sphi,
            0.0,
            -phi * p.kr / mmf_scale * sz,
            -dmmf / mmf_scale * sphi,
            n / p.r / mmf_scale * su,
            p.ks * p.kr / det_scale * sz,
            (p.ks * d2 - 2.0 * p.kr * p.kr * phi) / det_scale * sphi,
            0.0,
        ))
    };

    let fail = || Error::NoConvergence("saturated tangential bifurcation".into());
    let mut x = Vector3::new(zb / sz, 1.0, 1.0);
    let mut r = residual(&x).ok_or_else(fail)?;
    for _ in 0..100 {
        if r.amax() < 1e-15 {
            break;
        }
        let j = jac(&x).ok_or_else(fail)?;
        let dx = j.lu().solve(&(-r)).ok_or_else(fail)?;
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let trial = x + dx * lambda;
            if let Some(rt) = residual(&trial) {
                if rt.norm() < r.norm() {
                    x = trial;
                    r = rt;
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !accepted || dx.amax() * lambda < 1e-15 {
            break;
        }
    }
    if r.amax() > 1e-12 {
        return Err(fail());
    }
    Ok((x[0] * sz, x[1] * sphi, x[2] * su))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::ActuatorParams;
    use approx::assert_relative_eq;

    #[test]
    fn basic_closed_forms_with_table_one() {
        let cp = critical_points(&Actuator::basic(ActuatorParams::table_one()).unwrap()).unwrap();
        assert_relative_eq!(cp.phi0, 9.0829e-6, max_relative = 1e-4);
        assert_relative_eq!(cp.u0, 5.6768, max_relative = 1e-4);
        assert_relative_eq!(cp.zb, 9.75e-3, max_relative = 1e-12);
        assert_relative_eq!(cp.phib, 5.3736e-6, max_relative = 1e-4);
        assert_relative_eq!(cp.ub, 47.02, max_relative = 1e-4);
        // z_min = 0 collapses the lower lift-off onto u0
        assert_relative_eq!(cp.u_min.unwrap(), cp.u0, max_relative = 1e-15);
        assert_relative_eq!(cp.phi_min.unwrap(), cp.phi0, max_relative = 1e-15);
        assert!(cp.u_max.is_none());
        assert!(cp.saturated.is_none());
    }

    #[test]
    fn upper_stop_lift_off() {
        let p = ActuatorParams::table_one().with_stroke(0.0, 0.005);
        let cp = critical_points(&Actuator::basic(p).unwrap()).unwrap();
        assert_relative_eq!(cp.phi_max.unwrap(), 7.416e-6, max_relative = 1e-4);
        assert_relative_eq!(cp.u_max.unwrap(), 35.536, max_relative = 1e-4);
        let cs = critical_points(&Actuator::saturated(p).unwrap()).unwrap();
        let s = cs.saturated.unwrap();
        assert_relative_eq!(s.u_max.unwrap(), 38.27, max_relative = 1e-4);
        assert_relative_eq!(s.u0, 10.400, max_relative = 1e-4);
        assert_relative_eq!(s.u_min.unwrap(), s.u0, max_relative = 1e-14);
    }

    #[test]
    fn saturated_fold_satisfies_its_system() {
        let a = Actuator::saturated(ActuatorParams::table_one()).unwrap();
        let s = critical_points(&a).unwrap().saturated.unwrap();
        let p = a.params;
        let fv = -0.5 * p.kr * s.phib * s.phib - p.ks * (s.zb - p.zs);
        assert!(fv.abs() < 1e-12);
        let mmf = a.mmf(s.zb, s.phib).unwrap();
        assert_relative_eq!(mmf, p.turns() * s.ub / p.r, max_relative = 1e-12);
        let det = p.ks * a.mmf_dphi(s.zb, s.phib).unwrap() - p.kr * p.kr * s.phib * s.phib;
        assert!(det.abs() / (p.ks * 3.15e8) < 1e-12);
    }

    #[test]
    fn weak_saturation_flux_is_inconsistent() {
        let p = ActuatorParams::table_one().with_phi_sat(Some(8e-6));
        let err = critical_points(&Actuator::saturated(p).unwrap()).unwrap_err();
        assert!(matches!(err, Error::ModelInconsistency(_)));
    }
}
