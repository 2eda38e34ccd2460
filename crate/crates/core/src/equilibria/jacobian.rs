use nalgebra::{Complex, Matrix3, Schur};

use super::Stability;
use crate::error::{Error, Result};
use crate::hybrid::State;
use crate::params::Actuator;

/// Analytic Jacobian of the free-motion field `(f_z, f_v, f_phi)` with respect
/// to `(z, v, phi)`.
pub fn jacobian(actuator: &Actuator, x: &State, u: f64) -> Result<Matrix3<f64>> {
    let _ = u; // f_phi is affine in u, so u drops out of the derivatives
    let p = &actuator.params;
    let n = p.turns();
    let g = p.r / (n * n);
    let dmmf = actuator.mmf_dphi(x.z, x.phi)?;
    Ok(Matrix3::new(
        0.0,
        1.0,
        0.0,
        -p.ks / p.m,
        -p.c / p.m,
        -p.kr * x.phi / p.m,
        -g * p.kr * x.phi,
        0.0,
        -g * dmmf,
    ))
}

pub fn eigenvalues(j: &Matrix3<f64>) -> Result<[Complex<f64>; 3]> {
    if j.iter().any(|v| !v.is_finite()) {
        return Err(Error::EigenSolver("non-finite matrix entry".into()));
    }
    let schur = Schur::try_new(*j, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::EigenSolver("Schur iteration did not converge".into()))?;
    let ev = schur.complex_eigenvalues();
    Ok([ev[0], ev[1], ev[2]])
}

/// Stable iff every eigenvalue has real part below `-eps`, unstable if any is
/// above `+eps`, marginal otherwise; `eps = 1e-9 max(1, spectral radius)`.
pub fn classify_stability(j: &Matrix3<f64>) -> Result<Stability> {
    let ev = eigenvalues(j)?;
    let radius = ev.iter().map(|l| l.norm()).fold(0.0, f64::max);
    let eps = 1e-9 * radius.max(1.0);
    Ok(if ev.iter().all(|l| l.re < -eps) {
        Stability::Stable
    } else if ev.iter().any(|l| l.re > eps) {
        Stability::Unstable
    } else {
        Stability::Marginal
    })
}
