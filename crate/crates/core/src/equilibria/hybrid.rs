use super::continuous::free_motion_roots;
use super::{classify_motion, steady_flux, Equilibrium, Stability};
use crate::error::Result;
use crate::hybrid::{Mode, State};
use crate::params::Actuator;

/// Net-force margin (relative to the spring preload `ks zs`) treated as an exact
/// force balance at a stop.
const LIFT_OFF_TOL: f64 = 1e-12;

/// Equilibria of the hybrid automaton at voltage `u`.
///
/// A stop is an equilibrium when the steady flux there produces a net force that
/// keeps the armature pressed against it (the state is outside the jump set of
/// the resting mode). It is stable when that holds strictly, since the flux
/// dynamics at a stop are always contracting, and marginal at the lift-off
/// threshold itself. Free-motion equilibria must lie strictly between the stops.
pub fn hybrid_equilibria(a: &Actuator, u: f64) -> Result<Vec<Equilibrium>> {
    let p = &a.params;
    let mut out = Vec::new();

    let mut stop = |mode: Mode, z: f64, pressing_sign: f64| -> Result<()> {
        let phi = steady_flux(a, z, u)?;
        let x = State::new(z, 0.0, phi);
        let fv = a.f_v(&x) * p.m / (p.ks * p.zs) * pressing_sign;
        if fv < -LIFT_OFF_TOL {
            return Ok(());
        }
        let contracting = -a.mmf_dphi(z, phi)? < 0.0;
        let stability = if fv <= LIFT_OFF_TOL {
            Stability::Marginal
        } else if contracting {
            Stability::Stable
        } else {
            Stability::Unstable
        };
        out.push(Equilibrium {
            mode,
            z,
            phi,
            u,
            stability,
            branch: 0,
        });
        Ok(())
    };

    // the upper stop holds while the net force pushes towards larger gaps
    if p.z_max.is_finite() {
        stop(Mode::MaxGap, p.z_max, 1.0)?;
    }
    stop(Mode::MinGap, p.z_min, -1.0)?;

    let tol = 1e-12 * p.zs;
    for (z, phi) in free_motion_roots(a, u) {
        if z > p.z_min + tol && z < p.z_max - tol {
            out.push(Equilibrium {
                mode: Mode::Motion,
                z,
                phi,
                u,
                stability: classify_motion(a, z, phi, u)?,
                branch: 0,
            });
        }
    }

    out.sort_by(|x, y| x.mode.cmp(&y.mode).then(x.phi.total_cmp(&y.phi)));
    for (k, e) in out.iter_mut().enumerate() {
        e.branch = k;
    }
    Ok(out)
}
