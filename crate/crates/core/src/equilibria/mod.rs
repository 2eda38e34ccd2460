//! Equilibria of the free-motion dynamics and of the hybrid automaton, their
//! stability, and the closed-form critical voltages.

mod continuous;
mod critical;
mod hybrid;
mod jacobian;

pub use continuous::continuous_equilibria;
pub use critical::{critical_points, CriticalPoints, SaturatedCriticalPoints};
pub use hybrid::hybrid_equilibria;
pub use jacobian::{classify_stability, eigenvalues, jacobian};

use crate::error::Result;
use crate::hybrid::{Mode, State};
use crate::params::{Actuator, ReluctanceModel};
use crate::roots::safeguarded_newton;

/// Lyapunov indirect-method verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stability {
    Stable,
    Unstable,
    Marginal,
}

impl Stability {
    pub fn as_str(self) -> &'static str {
        match self {
            Stability::Stable => "stable",
            Stability::Unstable => "unstable",
            Stability::Marginal => "marginal",
        }
    }
}

impl std::fmt::Display for Stability {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A fixed point with zero velocity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Equilibrium {
    pub mode: Mode,
    pub z: f64,
    pub phi: f64,
    pub u: f64,
    pub stability: Stability,
    /// Position in the list returned by the solver (ordered by mode, then flux).
    /// Voltage sweeps replace it with a continuation branch id.
    pub branch: usize,
}

impl Equilibrium {
    pub fn state(&self) -> State {
        State::new(self.z, 0.0, self.phi)
    }
}

impl Actuator {
    /// Gap on the `f_v = 0` parabola for a given flux, `zs - kR phi^2 / (2 ks)`.
    pub fn force_balance_gap(&self, phi: f64) -> f64 {
        let p = &self.params;
        p.zs - p.kr * phi * phi / (2.0 * p.ks)
    }

    /// Flux on the `f_v = 0` parabola at gap `z`, `sqrt(2 ks (zs - z) / kR)`.
    /// `None` above the spring rest position.
    pub fn force_balance_flux(&self, z: f64) -> Option<f64> {
        let p = &self.params;
        (z <= p.zs).then(|| (2.0 * p.ks * (p.zs - z) / p.kr).sqrt())
    }

    /// Residual of the mode-`q` vector field at `(z, 0, phi)`, each component
    /// divided by a characteristic magnitude so that values are dimensionless.
    pub fn scaled_residual(&self, q: Mode, z: f64, phi: f64, u: f64) -> Result<f64> {
        let p = &self.params;
        let x = State::new(z, 0.0, phi);
        let n = p.turns();
        let flux_scale = (u.abs() / n).max(p.r / (n * n) * self.mmf(z, phi)?.abs()).max(f64::MIN_POSITIVE);
        let rphi = self.f_phi(&x, u)?.abs() / flux_scale;
        Ok(match q {
            Mode::Motion => (self.f_v(&x).abs() * p.m / (p.ks * p.zs)).max(rphi),
            Mode::MaxGap | Mode::MinGap => rphi,
        })
    }
}

/// Flux at which `f_phi = 0` for fixed gap `z` and voltage `u`, i.e. the
/// solution of `phi R(z, phi) = N u / R` carrying the sign of `u`.
pub fn steady_flux(actuator: &Actuator, z: f64, u: f64) -> Result<f64> {
    let p = &actuator.params;
    // domain check on z
    actuator.reluctance(z, 0.0)?;
    let target = p.turns() * u.abs() / p.r;
    let phi = match actuator.model {
        ReluctanceModel::Basic => target / (p.r0 + p.kr * z),
        ReluctanceModel::Saturation { .. } => {
            if target == 0.0 {
                0.0
            } else {
                let hi = actuator.model.flux_limit();
                let g = |phi: f64| {
                    (
                        actuator.mmf(z, phi).unwrap_or(f64::INFINITY) - target,
                        actuator.mmf_dphi(z, phi).unwrap_or(f64::INFINITY),
                    )
                };
                // the basic-law flux is an upper bound, the saturated reluctance being larger
                let basic = target / (p.r0 + p.kr * z);
                let upper = if basic < hi { basic } else { hi };
                safeguarded_newton(g, 0.0, upper, 1e-16 * upper)
            }
        }
    };
    Ok(phi.copysign(u))
}

/// Jacobian-based classification of a free-motion equilibrium.
pub(crate) fn classify_motion(actuator: &Actuator, z: f64, phi: f64, u: f64) -> Result<Stability> {
    classify_stability(&jacobian(actuator, &State::new(z, 0.0, phi), u)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::ActuatorParams;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn basic() -> Actuator {
        Actuator::basic(ActuatorParams::table_one()).unwrap()
    }
    fn sat() -> Actuator {
        Actuator::saturated(ActuatorParams::table_one()).unwrap()
    }

    #[test]
    fn steady_flux_values() {
        assert_eq!(steady_flux(&basic(), 0.0, 0.0).unwrap(), 0.0);
        assert_eq!(steady_flux(&sat(), 0.0, 0.0).unwrap(), 0.0);
        assert_relative_eq!(steady_flux(&basic(), 0.0, 5.0).unwrap(), 8e-6, max_relative = 1e-14);
        let s = steady_flux(&sat(), 0.0, 5.0).unwrap();
        assert!(s < 8e-6 && s > 0.0);
        assert!(steady_flux(&basic(), -1e-3, 5.0).is_err());
    }

    #[test]
    fn steady_flux_matches_quadratic_oracle() {
        // phi R0 s/(s - phi) + kR z phi = M  <=>  -kR z phi^2 + (R0 s + kR z s + M) phi - M s = 0
        let a = sat();
        let p = a.params;
        let s = p.phi_sat.unwrap();
        for &(z, u) in &[(0.0, 5.0), (0.0, 45.0), (0.004, 12.0), (0.02, 300.0), (0.01, 1e5)] {
            let m = p.turns() * u / p.r;
            let oracle = if z == 0.0 {
                m * s / (p.r0 * s + m)
            } else {
                let qa = -p.kr * z;
                let qb = p.r0 * s + p.kr * z * s + m;
                let qc = -m * s;
                // root in (0, s): the smaller positive one
                (-qb + (qb * qb - 4.0 * qa * qc).sqrt()) / (2.0 * qa)
            };
            let phi = steady_flux(&a, z, u).unwrap();
            assert_relative_eq!(phi, oracle, max_relative = 1e-12);
            assert!(phi.abs() < s);
            // near saturation one ulp of flux moves the mmf a long way
            let slack = 4.0 * f64::EPSILON * phi * a.mmf_dphi(z, phi).unwrap();
            assert!((a.mmf(z, phi).unwrap() - m).abs() <= 1e-12 * m + slack);
        }
    }

    #[test]
    fn force_balance_helpers_are_inverse() {
        let a = basic();
        let phi = a.force_balance_flux(0.004).unwrap();
        assert_relative_eq!(a.force_balance_gap(phi), 0.004, max_relative = 1e-14);
        assert!(a.force_balance_flux(0.02).is_none());
    }

    proptest! {
        #[test]
        fn steady_flux_is_odd_and_bounded(z in 0.0..0.03f64, u in -500.0..500.0f64) {
            for a in [basic(), sat()] {
                let phi = steady_flux(&a, z, u).unwrap();
                prop_assert_eq!(phi, -steady_flux(&a, z, -u).unwrap());
                prop_assert!(phi.abs() < a.model.flux_limit());
                if u != 0.0 {
                    prop_assert!(phi.signum() == u.signum());
                    prop_assert!(a.scaled_residual(Mode::MaxGap, z, phi, u).unwrap() < 1e-12);
                }
            }
        }
    }
}
