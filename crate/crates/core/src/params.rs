//! Physical constants of the actuator and the choice of reluctance law.
//!
//! Everything is in SI base units: metres, webers, volts, amperes, seconds.

use crate::error::{Error, Result};

/// Relative margin below the saturation flux that is still accepted as inside
/// the open flux interval.
pub const FLUX_MARGIN: f64 = 1e-12;

/// Physical constants of a single-coil reluctance actuator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActuatorParams {
    /// Coil resistance (ohm).
    pub r: f64,
    /// Number of turns.
    pub n: u32,
    /// Core reluctance constant (1/H).
    pub r0: f64,
    /// Gap reluctance slope (1/(H m)).
    pub kr: f64,
    /// Saturation flux (Wb); `None` for actuators described only by the basic law.
    pub phi_sat: Option<f64>,
    /// Armature mass (kg).
    pub m: f64,
    /// Spring stiffness (N/m).
    pub ks: f64,
    /// Spring rest position (m).
    pub zs: f64,
    /// Viscous damping (N s/m).
    pub c: f64,
    /// Minimum gap (m).
    pub z_min: f64,
    /// Maximum gap (m); `f64::INFINITY` means no upper stop.
    pub z_max: f64,
}

impl ActuatorParams {
    /// Parameter values of the commercial device used throughout the analysis,
    /// with `z_min = 0` and no upper stop.
    pub fn table_one() -> Self {
        Self {
            r: 50.0,
            n: 1200,
            r0: 1.5e7,
            kr: 2e10,
            phi_sat: Some(20e-6),
            m: 1e-3,
            ks: 55.0,
            zs: 15e-3,
            c: 0.1,
            z_min: 0.0,
            z_max: f64::INFINITY,
        }
    }

    pub fn with_stroke(mut self, z_min: f64, z_max: f64) -> Self {
        self.z_min = z_min;
        self.z_max = z_max;
        self
    }

    pub fn with_phi_sat(mut self, phi_sat: Option<f64>) -> Self {
        self.phi_sat = phi_sat;
        self
    }

    /// Number of turns as a float.
    #[inline]
    pub fn turns(&self) -> f64 {
        f64::from(self.n)
    }

    pub fn validate(&self) -> Result<()> {
        fn positive(key: &'static str, x: f64) -> Result<()> {
            if x.is_finite() && x > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidParameter {
                    key,
                    constraint: "must be finite and strictly positive",
                })
            }
        }
        positive("R", self.r)?;
        if self.n == 0 {
            return Err(Error::InvalidParameter {
                key: "N",
                constraint: "must be a positive integer",
            });
        }
        positive("R0", self.r0)?;
        positive("kR", self.kr)?;
        positive("m", self.m)?;
        positive("ks", self.ks)?;
        positive("zs", self.zs)?;
        positive("c", self.c)?;
        if let Some(phi_sat) = self.phi_sat {
            positive("phi_sat", phi_sat)?;
        }
        if !(self.z_min.is_finite() && self.z_min >= 0.0) {
            return Err(Error::InvalidParameter {
                key: "z_min",
                constraint: "0 <= z_min",
            });
        }
        if self.z_max.is_nan() || self.z_min >= self.z_max {
            return Err(Error::InvalidParameter {
                key: "z_max",
                constraint: "z_min < z_max",
            });
        }
        Ok(())
    }
}

/// Reluctance law of the magnetic circuit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ReluctanceModel {
    /// Core reluctance constant, gap reluctance linear in `z`.
    Basic,
    /// Core reluctance grows as `|phi|` approaches `phi_sat` (Froehlich-Kennelly).
    Saturation { phi_sat: f64 },
}

impl ReluctanceModel {
    pub fn phi_sat(&self) -> Option<f64> {
        match *self {
            ReluctanceModel::Basic => None,
            ReluctanceModel::Saturation { phi_sat } => Some(phi_sat),
        }
    }

    /// Largest admissible `|phi|`; infinite for the basic law.
    pub fn flux_limit(&self) -> f64 {
        match *self {
            ReluctanceModel::Basic => f64::INFINITY,
            ReluctanceModel::Saturation { phi_sat } => phi_sat * (1.0 - FLUX_MARGIN),
        }
    }

    pub fn is_saturated(&self) -> bool {
        matches!(self, ReluctanceModel::Saturation { .. })
    }

    pub fn name(&self) -> &'static str {
        match self {
            ReluctanceModel::Basic => "basic",
            ReluctanceModel::Saturation { .. } => "saturation",
        }
    }
}

/// Validated pairing of parameters with a reluctance law. All analyses take one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Actuator {
    pub params: ActuatorParams,
    pub model: ReluctanceModel,
}

impl Actuator {
    pub fn new(params: ActuatorParams, model: ReluctanceModel) -> Result<Self> {
        params.validate()?;
        if let ReluctanceModel::Saturation { phi_sat } = model {
            if !(phi_sat.is_finite() && phi_sat > 0.0) {
                return Err(Error::InvalidParameter {
                    key: "phi_sat",
                    constraint: "must be finite and strictly positive",
                });
            }
        }
        Ok(Self { params, model })
    }

    pub fn basic(params: ActuatorParams) -> Result<Self> {
        Self::new(params, ReluctanceModel::Basic)
    }

    /// Saturation law using `params.phi_sat`, which must be present.
    pub fn saturated(params: ActuatorParams) -> Result<Self> {
        let phi_sat = params.phi_sat.ok_or(Error::InvalidParameter {
            key: "phi_sat",
            constraint: "required by the saturation model",
        })?;
        Self::new(params, ReluctanceModel::Saturation { phi_sat })
    }

    /// Same device with the basic law, used as a reference for saturated results.
    pub fn as_basic(&self) -> Self {
        Self {
            params: self.params,
            model: ReluctanceModel::Basic,
        }
    }

    pub fn with_stroke(&self, z_min: f64, z_max: f64) -> Result<Self> {
        Self::new(self.params.with_stroke(z_min, z_max), self.model)
    }
}
