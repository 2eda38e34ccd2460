//! TOML run configuration.
//!
//! Actuator constants sit at the top level under their usual symbols, next to
//! `model`. Analyses read their own optional tables:
//!
//! ```toml
//! model = "saturation"
//! R = 50.0
//! N = 1200
//! R0 = 1.5e7
//! kR = 2e10
//! phi_sat = 20e-6
//! m = 1e-3
//! ks = 55.0
//! zs = 0.015
//! c = 0.1
//! z_min = 0.0
//! z_max = inf
//!
//! [sweep]
//! u_lo = 0.0
//! u_hi = 80.0
//! ```

use std::path::Path;

use serde::Deserialize;
use switchdyn::{Actuator, ActuatorParams, Mode, SimOptions, State, VoltageProfile};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Basic,
    Saturation,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub model: ModelKind,
    #[serde(rename = "R")]
    pub r: f64,
    #[serde(rename = "N")]
    pub n: u32,
    #[serde(rename = "R0")]
    pub r0: f64,
    #[serde(rename = "kR")]
    pub kr: f64,
    pub phi_sat: Option<f64>,
    pub m: f64,
    pub ks: f64,
    pub zs: f64,
    pub c: f64,
    #[serde(default)]
    pub z_min: f64,
    #[serde(default = "no_upper_stop")]
    pub z_max: f64,
    pub simulation: Option<SimulationConfig>,
    pub sweep: Option<SweepConfig>,
    pub hysteresis: Option<HysteresisConfig>,
}

fn no_upper_stop() -> f64 {
    f64::INFINITY
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    pub t_end: f64,
    pub output_dt: Option<f64>,
    pub rtol: Option<f64>,
    pub atol: Option<f64>,
    pub event_tol: Option<f64>,
    /// Initial mode (1, 2 or 3); inferred from the initial state when omitted.
    pub mode: Option<u8>,
    pub z: Option<f64>,
    #[serde(default)]
    pub v: f64,
    #[serde(default)]
    pub phi: f64,
    pub voltage: VoltageConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum VoltageConfig {
    Constant { u: f64 },
    Step { t0: f64, before: f64, after: f64 },
    Ramp { u_start: f64, rate: f64, u_end: Option<f64> },
}

impl From<VoltageConfig> for VoltageProfile {
    fn from(v: VoltageConfig) -> Self {
        match v {
            VoltageConfig::Constant { u } => VoltageProfile::Constant(u),
            VoltageConfig::Step { t0, before, after } => VoltageProfile::Step { t0, before, after },
            VoltageConfig::Ramp { u_start, rate, u_end } => VoltageProfile::Ramp { u_start, rate, u_end },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub u_lo: f64,
    pub u_hi: f64,
    #[serde(default = "default_steps")]
    pub steps: usize,
    /// Use the equilibria of the hybrid automaton instead of free motion only.
    #[serde(default)]
    pub hybrid: bool,
}

fn default_steps() -> usize {
    1001
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HysteresisMode {
    #[default]
    Quasistatic,
    Dynamic,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HysteresisConfig {
    #[serde(default)]
    pub mode: HysteresisMode,
    /// Voltage ramp rate for the dynamic loop (V/s).
    #[serde(default = "default_ramp_rate")]
    pub ramp_rate: f64,
}

impl Default for HysteresisConfig {
    fn default() -> Self {
        Self {
            mode: HysteresisMode::Quasistatic,
            ramp_rate: default_ramp_rate(),
        }
    }
}

fn default_ramp_rate() -> f64 {
    1.0
}

/// Reads, parses and validates a configuration file.
pub fn load_config(path: &Path) -> Result<Config, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let cfg = parse_config(&text).map_err(|e| match e {
        CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
        other => other,
    })?;
    Ok(cfg)
}

pub fn parse_config(text: &str) -> Result<Config, CliError> {
    let cfg: Config = toml::from_str(text).map_err(|e| CliError::Config(e.message().to_string()))?;
    cfg.actuator()?;
    if let Some(s) = &cfg.simulation {
        s.options()?;
        s.initial(&cfg.params())?;
    }
    if let Some(h) = &cfg.hysteresis {
        if !(h.ramp_rate.is_finite() && h.ramp_rate > 0.0) {
            return Err(invalid("hysteresis.ramp_rate", "must be finite and strictly positive"));
        }
    }
    if let Some(s) = &cfg.sweep {
        if !(s.u_lo.is_finite() && s.u_hi.is_finite() && s.u_lo <= s.u_hi) {
            return Err(invalid("sweep.u_hi", "finite bounds with u_lo <= u_hi"));
        }
        if s.steps < 2 && s.u_lo != s.u_hi {
            return Err(invalid("sweep.steps", "at least 2"));
        }
    }
    Ok(cfg)
}

fn invalid(key: &str, constraint: &str) -> CliError {
    CliError::Config(format!("invalid parameter `{key}`: {constraint}"))
}

impl Config {
    pub fn params(&self) -> ActuatorParams {
        ActuatorParams {
            r: self.r,
            n: self.n,
            r0: self.r0,
            kr: self.kr,
            phi_sat: self.phi_sat,
            m: self.m,
            ks: self.ks,
            zs: self.zs,
            c: self.c,
            z_min: self.z_min,
            z_max: self.z_max,
        }
    }

    pub fn actuator(&self) -> Result<Actuator, CliError> {
        let p = self.params();
        let a = match self.model {
            ModelKind::Basic => Actuator::basic(p),
            ModelKind::Saturation => Actuator::saturated(p),
        };
        a.map_err(|e| CliError::Config(e.to_string()))
    }
}

impl SimulationConfig {
    pub fn options(&self) -> Result<SimOptions, CliError> {
        let d = SimOptions::default();
        let pick = |key: &str, x: Option<f64>, default: f64| match x {
            Some(v) if !(v.is_finite() && v > 0.0) => {
                Err(invalid(&format!("simulation.{key}"), "must be finite and strictly positive"))
            }
            Some(v) => Ok(v),
            None => Ok(default),
        };
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return Err(invalid("simulation.t_end", "must be finite and strictly positive"));
        }
        Ok(SimOptions {
            rtol: pick("rtol", self.rtol, d.rtol)?,
            atol: pick("atol", self.atol, d.atol)?,
            event_tol: pick("event_tol", self.event_tol, d.event_tol)?,
            output_dt: pick("output_dt", self.output_dt, d.output_dt)?,
            ..d
        })
    }

    /// Initial mode and state. Without `z` the armature starts at rest against
    /// the upper stop, or at the spring rest position when there is none.
    pub fn initial(&self, p: &ActuatorParams) -> Result<(Mode, State), CliError> {
        let z = self.z.unwrap_or(if p.z_max.is_finite() { p.z_max } else { p.zs });
        let x = State::new(z, self.v, self.phi);
        let mode = match self.mode {
            Some(q) => Mode::from_index(q).ok_or_else(|| invalid("simulation.mode", "one of 1, 2, 3"))?,
            None if x.v == 0.0 && z == p.z_max => Mode::MaxGap,
            None if x.v == 0.0 && z == p.z_min => Mode::MinGap,
            None => Mode::Motion,
        };
        Ok((mode, x))
    }
}
