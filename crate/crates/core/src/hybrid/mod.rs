//! Three-mode hybrid automaton of a switching actuator.
//!
//! Mode 1 rests against the upper stop (`z = z_max`), mode 2 is free motion and
//! mode 3 rests against the lower stop (`z = z_min`). In the resting modes only
//! the flux evolves. Impacts are perfectly inelastic: the velocity is reset to
//! zero and position and flux are left untouched.

mod integrator;
mod simulate;
mod voltage;

pub use simulate::{simulate, Event, EventKind, Sample, SimOptions, Trajectory};
pub use voltage::VoltageProfile;

use crate::error::{Error, Result};
use crate::params::Actuator;

/// Discrete mode of the automaton.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    MaxGap = 1,
    Motion = 2,
    MinGap = 3,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::MaxGap, Mode::Motion, Mode::MinGap];

    /// Numeric label `q` in {1, 2, 3}.
    pub fn index(self) -> u8 {
        self as u8
    }

    pub fn from_index(q: u8) -> Option<Mode> {
        match q {
            1 => Some(Mode::MaxGap),
            2 => Some(Mode::Motion),
            3 => Some(Mode::MinGap),
            _ => None,
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.index())
    }
}

/// Continuous state: gap (m), velocity (m/s), flux (Wb).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct State {
    pub z: f64,
    pub v: f64,
    pub phi: f64,
}

impl State {
    pub const fn new(z: f64, v: f64, phi: f64) -> Self {
        Self { z, v, phi }
    }

    pub(crate) fn to_array(self) -> [f64; 3] {
        [self.z, self.v, self.phi]
    }

    pub(crate) fn from_array(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }
}

/// Time derivative of the state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateRate {
    pub dz: f64,
    pub dv: f64,
    pub dphi: f64,
}

impl Actuator {
    /// Velocity rate `f_v`: reluctance force, spring and damper over mass.
    pub fn f_v(&self, x: &State) -> f64 {
        let p = &self.params;
        (self.force(x.phi) - p.ks * (x.z - p.zs) - p.c * x.v) / p.m
    }

    /// Flux rate `f_phi = u/N - R phi R(z, phi) / N^2`.
    pub fn f_phi(&self, x: &State, u: f64) -> Result<f64> {
        let n = self.params.turns();
        Ok(u / n - self.params.r / (n * n) * self.mmf(x.z, x.phi)?)
    }

    /// Free-motion vector field, evaluated without checking the mode's flow set.
    pub(crate) fn free_flow(&self, x: &State, u: f64) -> Result<StateRate> {
        Ok(StateRate {
            dz: x.v,
            dv: self.f_v(x),
            dphi: self.f_phi(x, u)?,
        })
    }

    pub(crate) fn mode_flow_unchecked(&self, q: Mode, x: &State, u: f64) -> Result<StateRate> {
        match q {
            Mode::Motion => self.free_flow(x, u),
            Mode::MaxGap | Mode::MinGap => Ok(StateRate {
                dz: 0.0,
                dv: 0.0,
                dphi: self.f_phi(x, u)?,
            }),
        }
    }
}

/// Vector field of mode `q`. Fails if `x` is outside the mode's flow set.
pub fn flow(actuator: &Actuator, q: Mode, x: &State, u: f64) -> Result<StateRate> {
    if !in_flow_set(actuator, q, x) {
        return Err(Error::Domain(format!(
            "state {x:?} is outside the flow set of mode {q}"
        )));
    }
    actuator.mode_flow_unchecked(q, x, u)
}

/// Membership of `x` in the flow set of mode `q`.
pub fn in_flow_set(actuator: &Actuator, q: Mode, x: &State) -> bool {
    let p = &actuator.params;
    if !(x.phi.abs() < actuator.model.flux_limit()) || !x.v.is_finite() {
        return false;
    }
    match q {
        Mode::MaxGap => x.z == p.z_max && x.v == 0.0,
        Mode::Motion => x.z >= p.z_min && x.z <= p.z_max,
        Mode::MinGap => x.z == p.z_min && x.v == 0.0,
    }
}

/// Jump map: the post-jump state and mode when `x` lies in the jump set of `q`.
///
/// Leaving a stop happens when the net force points away from it; reaching a
/// stop with the velocity pointing into it (or zero) is an inelastic impact.
pub fn jump(actuator: &Actuator, q: Mode, x: &State) -> Option<(State, Mode)> {
    let p = &actuator.params;
    match q {
        Mode::MaxGap if actuator.f_v(x) < 0.0 => Some((*x, Mode::Motion)),
        Mode::MinGap if actuator.f_v(x) > 0.0 => Some((*x, Mode::Motion)),
        Mode::Motion if x.z == p.z_max && x.v >= 0.0 => {
            Some((State::new(x.z, 0.0, x.phi), Mode::MaxGap))
        }
        Mode::Motion if x.z == p.z_min && x.v <= 0.0 => {
            Some((State::new(x.z, 0.0, x.phi), Mode::MinGap))
        }
        _ => None,
    }
}
