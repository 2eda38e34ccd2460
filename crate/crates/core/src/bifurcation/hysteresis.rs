//! Hysteretic switching between the two stops.

use super::{classify_case, StrokeCase};
use crate::equilibria::{critical_points, hybrid_equilibria, Stability};
use crate::error::{Error, Result};
use crate::hybrid::{simulate, EventKind, Mode, SimOptions, State, Trajectory, VoltageProfile};
use crate::params::Actuator;
use crate::roots::bisect_predicate;

const QUASISTATIC_POINTS: usize = 401;
/// Sweep range beyond the closing voltage, as a factor.
const OVERSHOOT: f64 = 1.25;
/// Voltage resolution of the samples recorded by the dynamic loop (V).
const DYNAMIC_SAMPLE_DU: f64 = 0.02;

/// Position against voltage on the way up and on the way down.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct HysteresisLoop {
    pub up: Vec<(f64, f64)>,
    pub down: Vec<(f64, f64)>,
    /// Voltage at which the armature leaves the upper stop and closes.
    pub closing_voltage: Option<f64>,
    /// Voltage at which the armature leaves the lower stop and opens.
    pub opening_voltage: Option<f64>,
}

fn rests_at(a: &Actuator, u: f64, mode: Mode) -> Result<bool> {
    Ok(hybrid_equilibria(a, u)?
        .iter()
        .any(|e| e.mode == mode && e.stability != Stability::Unstable))
}

/// Largest voltage in `[good, bad]` where `pred` holds, by bisection.
fn threshold<F>(pred: F, good: f64, bad: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<bool>,
{
    let err = std::cell::Cell::new(None);
    let wrapped = |u: f64| {
        pred(u).unwrap_or_else(|e| {
            err.set(Some(e));
            false
        })
    };
    let (g, b) = bisect_predicate(wrapped, good, bad, 1e-13 * good.abs().max(bad.abs()));
    match err.take() {
        Some(e) => Err(e),
        None => Ok(0.5 * (g + b)),
    }
}

/// Quasi-static loop obtained by following the resting equilibria.
///
/// Starting de-energized at the upper stop, the armature stays there until that
/// equilibrium disappears and then falls to the lower stop; on the way down it
/// stays closed until the lower-stop equilibrium disappears. Requires the stroke
/// to be in the bistable configuration (`z_max` below the fold gap).
pub fn hysteresis_quasistatic(a: &Actuator) -> Result<HysteresisLoop> {
    if classify_case(a)? != StrokeCase::Case3 {
        return Err(Error::Precondition(
            "hysteresis loop requires z_min < z_max < zb".into(),
        ));
    }
    let p = &a.params;
    let open = |u: f64| rests_at(a, u, Mode::MaxGap);
    let closed = |u: f64| rests_at(a, u, Mode::MinGap);

    let mut hi = 1.0;
    while open(hi)? {
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::NoConvergence("upper stop never releases".into()));
        }
    }
    let closing = threshold(open, 0.0, hi)?;
    if !closed(closing)? {
        return Err(Error::ModelInconsistency(
            "lower stop is not an equilibrium at the closing voltage".into(),
        ));
    }
    let opening = threshold(closed, closing, 0.0)?;

    let top = OVERSHOOT * closing;
    let grid: Vec<f64> = (0..QUASISTATIC_POINTS)
        .map(|k| top * k as f64 / (QUASISTATIC_POINTS - 1) as f64)
        .collect();

    let mut up = Vec::with_capacity(grid.len() + 2);
    let mut is_open = true;
    for &u in &grid {
        if is_open && u >= closing {
            up.push((closing, p.z_max));
            up.push((closing, p.z_min));
            is_open = false;
        }
        if is_open && !open(u)? {
            is_open = false;
        }
        up.push((u, if is_open { p.z_max } else { p.z_min }));
    }

    let mut down = Vec::with_capacity(grid.len() + 2);
    let mut is_closed = true;
    for &u in grid.iter().rev() {
        if is_closed && u <= opening {
            down.push((opening, p.z_min));
            down.push((opening, p.z_max));
            is_closed = false;
        }
        if is_closed && !closed(u)? {
            is_closed = false;
        }
        down.push((u, if is_closed { p.z_min } else { p.z_max }));
    }

    Ok(HysteresisLoop {
        up,
        down,
        closing_voltage: Some(closing),
        opening_voltage: Some(opening),
    })
}

/// Time-domain loop with a triangular voltage ramp up to 1.25 times the
/// lift-off voltage of the upper stop and back to zero.
///
/// The ramp must be slow compared with the electrical and mechanical time
/// constants for the result to approach the quasi-static loop.
pub fn hysteresis_dynamic(a: &Actuator, ramp_rate: f64) -> Result<HysteresisLoop> {
    let u_max = critical_points(a)?
        .active_u_max()
        .ok_or_else(|| Error::Precondition("upper stop must lie below the spring rest position".into()))?;
    hysteresis_dynamic_to(a, ramp_rate, OVERSHOOT * u_max)
}

/// Time-domain loop ramping from 0 V to `u_peak` and back at `ramp_rate` (V/s),
/// starting de-energized at the upper stop. Switching voltages are read from the
/// impact on the lower stop (closing) and the lift-off from it (opening).
pub fn hysteresis_dynamic_to(a: &Actuator, ramp_rate: f64, u_peak: f64) -> Result<HysteresisLoop> {
    if !(ramp_rate.is_finite() && ramp_rate > 0.0) {
        return Err(Error::Precondition("ramp rate must be positive".into()));
    }
    if !(u_peak.is_finite() && u_peak > 0.0) {
        return Err(Error::Precondition("peak voltage must be positive".into()));
    }
    let p = &a.params;
    if !p.z_max.is_finite() {
        return Err(Error::Precondition("dynamic loop needs a finite upper stop".into()));
    }
    let opts = SimOptions {
        output_dt: DYNAMIC_SAMPLE_DU / ramp_rate,
        ..SimOptions::default()
    };
    let duration = u_peak / ramp_rate;

    let rise = VoltageProfile::Ramp {
        u_start: 0.0,
        rate: ramp_rate,
        u_end: Some(u_peak),
    };
    let up = simulate(a, Mode::MaxGap, State::new(p.z_max, 0.0, 0.0), &rise, duration, &opts)?;
    let end = *up.last().expect("trajectory has at least one sample");

    let fall = VoltageProfile::Ramp {
        u_start: u_peak,
        rate: -ramp_rate,
        u_end: Some(0.0),
    };
    let down = simulate(a, end.mode, end.state, &fall, duration, &opts)?;

    let first = |t: &Trajectory, kind| t.events.iter().find(|e| e.kind == kind).map(|e| e.u);
    Ok(HysteresisLoop {
        up: up.samples.iter().map(|s| (s.u, s.state.z)).collect(),
        down: down.samples.iter().map(|s| (s.u, s.state.z)).collect(),
        closing_voltage: first(&up, EventKind::ImpactMin),
        opening_voltage: first(&down, EventKind::LiftOffMin),
    })
}

/// Dynamic loops at `ramp_rate` and half of it.
#[derive(Debug, Clone, PartialEq)]
pub struct RampRefinement {
    pub coarse: HysteresisLoop,
    pub fine: HysteresisLoop,
    /// Largest relative change of a switching voltage between the two rates.
    pub shift: f64,
}

impl RampRefinement {
    /// Switching voltages moved by at most 1 % when the rate was halved.
    pub fn is_quasistatic(&self) -> bool {
        self.shift <= 0.01
    }
}

pub fn ramp_refinement(a: &Actuator, ramp_rate: f64) -> Result<RampRefinement> {
    let coarse = hysteresis_dynamic(a, ramp_rate)?;
    let fine = hysteresis_dynamic(a, 0.5 * ramp_rate)?;
    let rel = |x: Option<f64>, y: Option<f64>| match (x, y) {
        (Some(x), Some(y)) => ((x - y) / y).abs(),
        (None, None) => 0.0,
        _ => f64::INFINITY,
    };
    let shift = rel(coarse.closing_voltage, fine.closing_voltage)
        .max(rel(coarse.opening_voltage, fine.opening_voltage));
    Ok(RampRefinement { coarse, fine, shift })
}
