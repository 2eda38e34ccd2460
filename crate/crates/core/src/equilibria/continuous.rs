//! Intersections of the curves `f_v = 0` and `f_phi = 0` in the `(z, phi)` plane.
//!
//! Substituting the force balance `z = zs - kR phi^2 / (2 ks)` into `f_phi = 0`
//! leaves one scalar equation in the flux,
//!
//! `g(phi) = phi R(z(phi), phi) - N u / R = 0`.
//!
//! For the basic law this is the depressed cubic
//! `kR^2/(2 ks) phi^3 - (R0 + kR zs) phi + N u / R = 0`, solved through the
//! eigenvalues of its companion matrix. For the saturation law the roots are
//! bracketed between consecutive critical points of `g` and polished with a
//! safeguarded Newton iteration.

use nalgebra::Matrix3;

use super::{classify_motion, Equilibrium};
use crate::error::Result;
use crate::hybrid::Mode;
use crate::magnetics::{mmf_dphi2, mmf_extended};
use crate::params::{Actuator, ReluctanceModel};
use crate::roots::safeguarded_newton;

const SCAN_CELLS: usize = 2048;

/// All roots `(z, phi)` with `z >= 0` (up to rounding) and `|phi|` inside the
/// flux interval, sorted by flux.
pub(crate) fn free_motion_roots(a: &Actuator, u: f64) -> Vec<(f64, f64)> {
    let phis = match a.model {
        ReluctanceModel::Basic => cubic_roots(a, u),
        ReluctanceModel::Saturation { .. } => saturated_roots(a, u),
    };
    phis.into_iter().map(|phi| (a.force_balance_gap(phi), phi)).collect()
}

fn cubic_roots(a: &Actuator, u: f64) -> Vec<f64> {
    let p = &a.params;
    // scale the flux by the fold flux so the cubic becomes s^3 - 3 s + c = 0
    let lead = p.kr * p.kr / (2.0 * p.ks);
    let fold_flux = (2.0 * p.ks * (p.r0 + p.kr * p.zs) / (3.0 * p.kr * p.kr)).sqrt();
    let c = p.turns() * u / p.r / (lead * fold_flux.powi(3));

    let companion = Matrix3::new(0.0, 0.0, -c, 1.0, 0.0, 3.0, 0.0, 1.0, 0.0);
    let Ok(ev) = super::eigenvalues(&companion) else {
        return Vec::new();
    };
    let poly = |s: f64| s * s * s - 3.0 * s + c;
    let mut roots: Vec<f64> = ev
        .iter()
        .filter(|l| l.im.abs() < 1e-9 * l.norm().max(1.0))
        .map(|l| {
            let mut s = l.re;
            for _ in 0..4 {
                let d = 3.0 * s * s - 3.0;
                if d == 0.0 {
                    break;
                }
                let next = s - poly(s) / d;
                if poly(next).abs() < poly(s).abs() {
                    s = next;
                } else {
                    break;
                }
            }
            s * fold_flux
        })
        .collect();
    roots.sort_by(f64::total_cmp);
    let domain = a.force_balance_flux(0.0).unwrap_or(0.0) * (1.0 + 1e-9);
    roots.retain(|phi| phi.abs() <= domain);
    roots
}

fn saturated_roots(a: &Actuator, u: f64) -> Vec<f64> {
    let p = &a.params;
    let model = a.model;
    let target = p.turns() * u / p.r;
    let edge = a
        .force_balance_flux(0.0)
        .map(|f| f * (1.0 + 1e-9))
        .unwrap_or(0.0)
        .min(model.flux_limit());
    if edge <= 0.0 {
        return Vec::new();
    }

    let g = |phi: f64| {
        mmf_extended(model, p, a.force_balance_gap(phi), phi).unwrap_or(f64::INFINITY * phi.signum())
            - target
    };
    let dg = |phi: f64| {
        let core = match model {
            ReluctanceModel::Saturation { phi_sat } => {
                let d = 1.0 - phi.abs() / phi_sat;
                p.r0 / (d * d)
            }
            ReluctanceModel::Basic => p.r0,
        };
        core + p.kr * p.zs - 1.5 * p.kr * p.kr * phi * phi / p.ks
    };
    let d2g = |phi: f64| mmf_dphi2(model, p, phi) - 3.0 * p.kr * p.kr * phi / p.ks;

    // critical points of g split the interval into monotone pieces
    let step = 2.0 * edge / SCAN_CELLS as f64;
    let mut knots = vec![-edge];
    let mut prev = (-edge, dg(-edge));
    for k in 1..=SCAN_CELLS {
        let phi = if k == SCAN_CELLS { edge } else { -edge + k as f64 * step };
        let d = dg(phi);
        if d == 0.0 {
            knots.push(phi);
        } else if prev.1 != 0.0 && d.signum() != prev.1.signum() {
            let c = safeguarded_newton(|x| (dg(x), d2g(x)), prev.0, phi, 1e-15 * edge);
            knots.push(c);
        }
        prev = (phi, d);
    }
    knots.push(edge);

    let gtol = 1e-12 * (target.abs() + p.r0 * edge);
    let mut roots = Vec::new();
    for w in knots.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if hi <= lo {
            continue;
        }
        let (glo, ghi) = (g(lo), g(hi));
        if glo == 0.0 {
            roots.push(lo);
        } else if glo.signum() != ghi.signum() && ghi != 0.0 {
            roots.push(safeguarded_newton(|x| (g(x), dg(x)), lo, hi, 1e-16 * edge));
        }
    }
    // tangential contact at a critical point
    for &c in &knots[1..knots.len() - 1] {
        if g(c).abs() <= gtol {
            roots.push(c);
        }
    }
    if g(edge) == 0.0 {
        roots.push(edge);
    }
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|x, y| (*x - *y).abs() <= 1e-12 * edge);
    roots
}

/// Free-motion equilibria at voltage `u` with gap in `[z_lo, z_hi]`.
///
/// `z_hi = f64::INFINITY` means no upper stop. Each equilibrium is classified from
/// the eigenvalues of its Jacobian. An empty list is a valid answer.
pub fn continuous_equilibria(a: &Actuator, u: f64, z_lo: f64, z_hi: f64) -> Result<Vec<Equilibrium>> {
    let tol = 1e-12 * a.params.zs;
    let mut out = Vec::new();
    for (z, phi) in free_motion_roots(a, u) {
        if z < z_lo - tol || z > z_hi + tol {
            continue;
        }
        let z = z.clamp(z_lo, z_hi).max(0.0);
        out.push(Equilibrium {
            mode: Mode::Motion,
            z,
            phi,
            u,
            stability: classify_motion(a, z, phi, u)?,
            branch: out.len(),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibria::Stability;
    use crate::params::ActuatorParams;
    use approx::assert_relative_eq;

    fn basic() -> Actuator {
        Actuator::basic(ActuatorParams::table_one()).unwrap()
    }
    fn sat() -> Actuator {
        Actuator::saturated(ActuatorParams::table_one()).unwrap()
    }

    // closed forms evaluated independently of the solver
    const PHI0: f64 = 9.082951062292475e-06;
    const U0: f64 = 5.676844413932797;
    const UB: f64 = 47.01853025669773;

    #[test]
    fn zero_voltage_has_only_the_spring_rest() {
        for a in [basic(), sat()] {
            let eq = continuous_equilibria(&a, 0.0, 0.0, f64::INFINITY).unwrap();
            assert_eq!(eq.len(), 1);
            assert_eq!(eq[0].phi, 0.0);
            assert_relative_eq!(eq[0].z, 0.015, max_relative = 1e-14);
            assert_eq!(eq[0].stability, Stability::Stable);
        }
    }

    #[test]
    fn equilibrium_enters_domain_at_u0() {
        let eq = continuous_equilibria(&basic(), U0, 0.0, f64::INFINITY).unwrap();
        assert_eq!(eq.len(), 2);
        let entering = eq.iter().find(|e| e.stability == Stability::Unstable).unwrap();
        assert_relative_eq!(entering.phi, PHI0, max_relative = 1e-10);
        assert!(entering.z.abs() < 1e-12);
    }

    #[test]
    fn no_equilibria_beyond_the_fold() {
        assert!(continuous_equilibria(&basic(), 50.0, 0.0, f64::INFINITY).unwrap().is_empty());
        assert!(continuous_equilibria(&basic(), -50.0, 0.0, f64::INFINITY).unwrap().is_empty());
        assert_eq!(continuous_equilibria(&basic(), UB * (1.0 - 1e-7), 0.0, f64::INFINITY).unwrap().len(), 2);
        assert!(continuous_equilibria(&sat(), 48.3, 0.0, f64::INFINITY).unwrap().is_empty());
        assert_eq!(continuous_equilibria(&sat(), 48.28, 0.0, f64::INFINITY).unwrap().len(), 2);
    }

    #[test]
    fn residuals_are_small() {
        for a in [basic(), sat()] {
            for k in -60..=60 {
                let u = k as f64 * 0.8;
                for e in continuous_equilibria(&a, u, 0.0, f64::INFINITY).unwrap() {
                    let r = a.scaled_residual(Mode::Motion, e.z, e.phi, u).unwrap();
                    assert!(r < 1e-9, "u={u} residual {r}");
                }
            }
        }
    }

    #[test]
    fn cubic_roots_agree_with_scan_for_basic_law() {
        // run the bracketing scan on the basic law as a second route
        let a = basic();
        for k in 0..40 {
            let u = -60.0 + 3.0 * k as f64 + 0.37;
            let c = cubic_roots(&a, u);
            let s = saturated_roots(&a, u);
            assert_eq!(c.len(), s.len(), "u = {u}");
            for (x, y) in c.iter().zip(&s) {
                assert_relative_eq!(x, y, max_relative = 1e-9, epsilon = 1e-18);
            }
        }
    }

    #[test]
    fn stable_branch_lives_between_fold_and_spring_rest() {
        let a = basic();
        let zb = 2.0 / 3.0 * 0.015 - 1.5e7 / (3.0 * 2e10);
        for k in 0..200 {
            let u = -UB + 2.0 * UB * k as f64 / 199.0;
            for e in continuous_equilibria(&a, u, 0.0, f64::INFINITY).unwrap() {
                if e.stability == Stability::Stable {
                    assert!(e.z >= zb - 1e-12 && e.z <= 0.015 + 1e-15, "z = {}", e.z);
                }
            }
        }
    }

    #[test]
    fn upper_limit_filters() {
        let eq = continuous_equilibria(&basic(), 20.0, 0.0, 0.005).unwrap();
        assert_eq!(eq.len(), 1);
        assert!(eq[0].z < 0.005);
        assert_eq!(eq[0].stability, Stability::Unstable);
    }
}
