//! Reluctance laws, reluctance force and the flux/current relation.
//!
//! All functions are pure. Flux arguments must lie in the open interval
//! `(-phi_sat, phi_sat)` when the saturation law is active; positions must be
//! non-negative.

use crate::error::{Error, Result};
use crate::params::{Actuator, ActuatorParams, ReluctanceModel};

fn check_domain(model: ReluctanceModel, z: f64, phi: f64) -> Result<()> {
    if !(z >= 0.0) {
        return Err(Error::Domain(format!("negative or undefined gap z = {z}")));
    }
    if !(phi.abs() < model.flux_limit()) {
        return Err(Error::Domain(format!(
            "|phi| = {} outside the open saturation interval",
            phi.abs()
        )));
    }
    Ok(())
}

/// Core part of the reluctance, `R0` or `R0 / (1 - |phi|/phi_sat)`.
#[inline]
fn core_reluctance(model: ReluctanceModel, p: &ActuatorParams, phi: f64) -> f64 {
    match model {
        ReluctanceModel::Basic => p.r0,
        ReluctanceModel::Saturation { phi_sat } => p.r0 / (1.0 - phi.abs() / phi_sat),
    }
}

/// Magnetic circuit reluctance at gap `z` and flux `phi` (1/H).
pub fn reluctance(model: ReluctanceModel, p: &ActuatorParams, z: f64, phi: f64) -> Result<f64> {
    check_domain(model, z, phi)?;
    Ok(core_reluctance(model, p, phi) + p.kr * z)
}

/// Partial derivative of the reluctance with respect to the gap. Both laws share
/// the same gap term, so this is `kR` everywhere in the domain.
pub fn reluctance_dz(model: ReluctanceModel, p: &ActuatorParams, z: f64, phi: f64) -> Result<f64> {
    check_domain(model, z, phi)?;
    Ok(p.kr)
}

/// Reluctance force `-kR phi^2 / 2` (N). Attractive for either flux sign.
#[inline]
pub fn force(p: &ActuatorParams, phi: f64) -> f64 {
    -0.5 * p.kr * phi * phi
}

/// Coil current from Hopkinson's law, `i = phi R(z, phi) / N`.
pub fn current_from_flux(
    model: ReluctanceModel,
    p: &ActuatorParams,
    z: f64,
    phi: f64,
) -> Result<f64> {
    Ok(phi * reluctance(model, p, z, phi)? / p.turns())
}

/// Derivative of the magnetomotive force `phi R(z, phi)` with respect to `phi`.
///
/// For the saturation law `d/dphi [phi R0 / (1 - |phi|/phi_sat)]` collapses to
/// `R0 / (1 - |phi|/phi_sat)^2`, which is even and continuous through zero.
pub fn mmf_dphi(model: ReluctanceModel, p: &ActuatorParams, z: f64, phi: f64) -> Result<f64> {
    check_domain(model, z, phi)?;
    let core = match model {
        ReluctanceModel::Basic => p.r0,
        ReluctanceModel::Saturation { phi_sat } => {
            let d = 1.0 - phi.abs() / phi_sat;
            p.r0 / (d * d)
        }
    };
    Ok(core + p.kr * z)
}

/// `phi R(z, phi)` with the gap term extended linearly to `z < 0`. The
/// integrator uses it so trial steps may overshoot the lower stop before the
/// crossing is localized. `None` outside the flux interval.
pub(crate) fn mmf_extended(model: ReluctanceModel, p: &ActuatorParams, z: f64, phi: f64) -> Option<f64> {
    if phi.abs() < model.flux_limit() && z.is_finite() {
        Some(phi * (core_reluctance(model, p, phi) + p.kr * z))
    } else {
        None
    }
}

/// Second derivative of `phi R(z, phi)` in `phi`. Odd in `phi`; zero for the basic law.
pub(crate) fn mmf_dphi2(model: ReluctanceModel, p: &ActuatorParams, phi: f64) -> f64 {
    match model {
        ReluctanceModel::Basic => 0.0,
        ReluctanceModel::Saturation { phi_sat } => {
            let d = 1.0 - phi.abs() / phi_sat;
            2.0 * p.r0 * phi.signum() / (phi_sat * d * d * d)
        }
    }
}

impl Actuator {
    pub fn reluctance(&self, z: f64, phi: f64) -> Result<f64> {
        reluctance(self.model, &self.params, z, phi)
    }

    pub fn force(&self, phi: f64) -> f64 {
        force(&self.params, phi)
    }

    pub fn current_from_flux(&self, z: f64, phi: f64) -> Result<f64> {
        current_from_flux(self.model, &self.params, z, phi)
    }

    /// Magnetomotive force `phi R(z, phi)` (A).
    pub fn mmf(&self, z: f64, phi: f64) -> Result<f64> {
        Ok(phi * self.reluctance(z, phi)?)
    }

    pub fn mmf_dphi(&self, z: f64, phi: f64) -> Result<f64> {
        mmf_dphi(self.model, &self.params, z, phi)
    }
}
