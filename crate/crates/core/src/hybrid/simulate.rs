//! Event-driven execution of the hybrid automaton.

use super::integrator::{dopri_step, step_factor, Tolerances, Vec3};
use super::{Mode, State, VoltageProfile};
use crate::error::{Error, Result};
use crate::magnetics::mmf_extended;
use crate::params::Actuator;

/// Jumps allowed at a single instant before the run is declared chattering.
const MAX_JUMPS_PER_INSTANT: usize = 10;
const MAX_BISECTIONS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimOptions {
    pub rtol: f64,
    /// Absolute tolerance applied to each state component.
    pub atol: f64,
    /// Width of the time bracket around a localized guard crossing (s).
    pub event_tol: f64,
    /// Sampling period of the recorded trajectory (s).
    pub output_dt: f64,
    pub h_init: f64,
    pub max_steps: usize,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-8,
            atol: 1e-12,
            event_tol: 1e-10,
            output_dt: 1e-4,
            h_init: 1e-6,
            max_steps: 50_000_000,
        }
    }
}

impl SimOptions {
    fn validate(&self) -> Result<()> {
        let ok = |x: f64| x.is_finite() && x > 0.0;
        if ok(self.rtol) && ok(self.atol) && ok(self.event_tol) && ok(self.output_dt) && ok(self.h_init)
        {
            Ok(())
        } else {
            Err(Error::Precondition(
                "tolerances, output_dt and h_init must be positive".into(),
            ))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EventKind {
    ImpactMin,
    ImpactMax,
    LiftOffMin,
    LiftOffMax,
}

impl EventKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::ImpactMin => "impact_min",
            EventKind::ImpactMax => "impact_max",
            EventKind::LiftOffMin => "liftoff_min",
            EventKind::LiftOffMax => "liftoff_max",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event {
    pub t: f64,
    pub kind: EventKind,
    pub before: State,
    pub after: State,
    /// Supply voltage at the event time.
    pub u: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub mode: Mode,
    pub state: State,
    /// Coil current (A).
    pub current: f64,
    /// Reluctance force (N).
    pub force: f64,
    /// Supply voltage (V).
    pub u: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub events: Vec<Event>,
}

impl Trajectory {
    pub fn last(&self) -> Option<&Sample> {
        self.samples.last()
    }

    pub fn count(&self, kind: EventKind) -> usize {
        self.events.iter().filter(|e| e.kind == kind).count()
    }
}

struct Runner<'a> {
    actuator: &'a Actuator,
    profile: &'a VoltageProfile,
    opts: SimOptions,
    tol: Tolerances,
}

impl Runner<'_> {
    fn rhs(&self, q: Mode) -> impl Fn(f64, &Vec3) -> Result<Vec3> + '_ {
        move |t, y| {
            let a = self.actuator;
            let n = a.params.turns();
            let mmf = mmf_extended(a.model, &a.params, y[0], y[2])
                .ok_or_else(|| Error::Domain("flux outside the saturation interval".into()))?;
            let dphi = self.profile.at(t) / n - a.params.r / (n * n) * mmf;
            Ok(match q {
                Mode::Motion => [y[1], a.f_v(&State::from_array(*y)), dphi],
                Mode::MaxGap | Mode::MinGap => [0.0, 0.0, dphi],
            })
        }
    }

    fn step(&self, q: Mode, t: f64, x: &State, h: f64) -> Result<(State, f64)> {
        let (y, err) = dopri_step(&self.rhs(q), t, &x.to_array(), h, self.tol)?;
        Ok((State::from_array(y), err))
    }

    /// Whether the state reached after a flow step lies past a guard of mode `q`.
    fn guard_hit(&self, q: Mode, x: &State) -> bool {
        let p = &self.actuator.params;
        match q {
            Mode::Motion => {
                x.z < p.z_min || x.z > p.z_max || (x.z == p.z_min && x.v < 0.0) || (x.z == p.z_max && x.v > 0.0)
            }
            Mode::MaxGap => self.actuator.f_v(x) < 0.0,
            Mode::MinGap => self.actuator.f_v(x) > 0.0,
        }
    }

    /// Bisection on the step length for the first time the guard is hit.
    fn localize(&self, q: Mode, t: f64, x: &State, h: f64) -> Result<(f64, State)> {
        let (mut lo, mut hi) = (0.0, h);
        let mut x_hi = self.step(q, t, x, h)?.0;
        for _ in 0..MAX_BISECTIONS {
            if hi - lo <= self.opts.event_tol {
                return Ok((t + hi, x_hi));
            }
            let mid = 0.5 * (lo + hi);
            let x_mid = self.step(q, t, x, mid)?.0;
            if self.guard_hit(q, &x_mid) {
                hi = mid;
                x_hi = x_mid;
            } else {
                lo = mid;
            }
        }
        Err(Error::EventLocalization { t: t + hi })
    }

    /// Applies jump maps until the state is outside every jump set.
    ///
    /// Entering free motion at a stop with zero velocity counts as an impact
    /// only when the net force does not pull the armature away from the stop;
    /// otherwise a lift-off would be undone at the same instant.
    fn settle(&self, mut q: Mode, mut x: State, t: f64, events: &mut Vec<Event>) -> Result<(Mode, State)> {
        let a = self.actuator;
        let p = &a.params;
        let u = self.profile.at(t);
        for _ in 0..=MAX_JUMPS_PER_INSTANT {
            let fv = a.f_v(&x);
            let next = match q {
                Mode::MaxGap if fv < 0.0 => Some((x, Mode::Motion, EventKind::LiftOffMax)),
                Mode::MinGap if fv > 0.0 => Some((x, Mode::Motion, EventKind::LiftOffMin)),
                Mode::Motion if x.z >= p.z_max && (x.v > 0.0 || (x.v == 0.0 && fv >= 0.0)) => {
                    x.z = p.z_max;
                    Some((State::new(p.z_max, 0.0, x.phi), Mode::MaxGap, EventKind::ImpactMax))
                }
                Mode::Motion if x.z <= p.z_min && (x.v < 0.0 || (x.v == 0.0 && fv <= 0.0)) => {
                    x.z = p.z_min;
                    Some((State::new(p.z_min, 0.0, x.phi), Mode::MinGap, EventKind::ImpactMin))
                }
                _ => None,
            };
            let Some((after, q_next, kind)) = next else {
                return Ok((q, x));
            };
            events.push(Event {
                t,
                kind,
                before: x,
                after,
                u,
            });
            q = q_next;
            x = after;
        }
        Err(Error::Chattering {
            t,
            jumps: MAX_JUMPS_PER_INSTANT,
        })
    }

    fn sample(&self, t: f64, q: Mode, x: State) -> Result<Sample> {
        Ok(Sample {
            t,
            mode: q,
            state: x,
            current: self.actuator.current_from_flux(x.z, x.phi)?,
            force: self.actuator.force(x.phi),
            u: self.profile.at(t),
        })
    }
}

/// Runs the automaton from `(q0, x0)` until `t_end`.
///
/// Flows are integrated with an adaptive Dormand-Prince 5(4) scheme. Guard
/// crossings (stops in free motion, sign change of the net force at rest) are
/// bracketed by bisection to `opts.event_tol` and the jump maps applied there.
/// Samples are taken every `opts.output_dt` and at `t_end`.
pub fn simulate(
    actuator: &Actuator,
    q0: Mode,
    x0: State,
    profile: &VoltageProfile,
    t_end: f64,
    opts: &SimOptions,
) -> Result<Trajectory> {
    opts.validate()?;
    if !(t_end.is_finite() && t_end > 0.0) {
        return Err(Error::Precondition("t_end must be positive".into()));
    }
    if !super::in_flow_set(actuator, q0, &x0) {
        return Err(Error::Precondition(format!(
            "initial state {x0:?} is not in the flow set of mode {q0}"
        )));
    }
    let run = Runner {
        actuator,
        profile,
        opts: *opts,
        tol: Tolerances {
            rtol: opts.rtol,
            atol: opts.atol,
        },
    };
    let mut breakpoints: Vec<f64> = profile
        .breakpoints()
        .into_iter()
        .filter(|&b| b > 0.0 && b < t_end)
        .collect();
    breakpoints.sort_by(f64::total_cmp);

    let mut traj = Trajectory::default();
    let mut t = 0.0;
    let (mut q, mut x) = run.settle(q0, x0, t, &mut traj.events)?;
    traj.samples.push(run.sample(t, q, x)?);

    let mut k_out: u64 = 1;
    let mut h = opts.h_init;
    let mut steps = 0usize;
    while t < t_end {
        let t_out = (k_out as f64 * opts.output_dt).min(t_end);
        let t_bp = breakpoints
            .iter()
            .copied()
            .find(|&b| b > t)
            .unwrap_or(f64::INFINITY);
        let target = t_out.min(t_bp);

        if target - t <= 4.0 * f64::EPSILON * t.abs().max(1.0) {
            t = target;
        } else {
            steps += 1;
            if steps > opts.max_steps {
                return Err(Error::NoConvergence(format!(
                    "exceeded {} integration steps at t = {t}",
                    opts.max_steps
                )));
            }
            let h_min = 1e-14 * t.abs().max(1.0);
            if h < h_min {
                return Err(Error::StepSizeUnderflow { t, h });
            }
            let clamped = h >= target - t;
            let h_try = if clamped { target - t } else { h };
            let (x1, err) = match run.step(q, t, &x, h_try) {
                Ok(r) => r,
                Err(Error::Domain(_)) => {
                    if h_try * 0.25 < h_min {
                        return Err(Error::FluxDomainBreach { t, phi: x.phi });
                    }
                    h = h_try * 0.25;
                    continue;
                }
                Err(e) => return Err(e),
            };
            if !(err <= 1.0) {
                h = h_try * step_factor(err).min(0.9);
                continue;
            }
            let h_next = h_try * step_factor(err);
            h = if clamped { h.max(h_next) } else { h_next };

            if run.guard_hit(q, &x1) {
                let (te, xe) = run.localize(q, t, &x, h_try)?;
                t = te;
                (q, x) = run.settle(q, xe, t, &mut traj.events)?;
                continue;
            }
            t = if clamped { target } else { t + h_try };
            x = x1;
        }

        if t == t_out {
            traj.samples.push(run.sample(t, q, x)?);
            k_out += 1;
        }
    }
    Ok(traj)
}
