//! Voltage sweeps, stroke-case classification and hysteretic switching loops.

mod hysteresis;
mod sweep;

pub use hysteresis::{
    hysteresis_dynamic, hysteresis_dynamic_to, hysteresis_quasistatic, ramp_refinement, HysteresisLoop,
    RampRefinement,
};
pub use sweep::{sweep, Annotation, AnnotationKind, Branch, BranchData, BranchPoint, Endpoint};

use crate::equilibria::critical_points;
use crate::error::{Error, Result};
use crate::params::Actuator;

/// Position of the upper stop relative to the spring rest and the fold gap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrokeCase {
    /// `z_max > zs`: the spring rest position is reachable.
    Case1,
    /// `zb <= z_max <= zs`.
    Case2,
    /// `z_min < z_max < zb`: stable rest only at the stops.
    Case3,
}

impl StrokeCase {
    pub fn as_str(self) -> &'static str {
        match self {
            StrokeCase::Case1 => "case1",
            StrokeCase::Case2 => "case2",
            StrokeCase::Case3 => "case3",
        }
    }
}

/// Classifies the stroke against `zs` and the fold gap of the active law.
/// Requires `z_min` below the fold gap.
pub fn classify_case(a: &Actuator) -> Result<StrokeCase> {
    let zb = critical_points(a)?.active_zb();
    let p = &a.params;
    if p.z_min >= zb {
        return Err(Error::Precondition(format!(
            "z_min = {} must lie below the fold gap {zb}",
            p.z_min
        )));
    }
    Ok(if p.z_max > p.zs {
        StrokeCase::Case1
    } else if p.z_max >= zb {
        StrokeCase::Case2
    } else {
        StrokeCase::Case3
    })
}
