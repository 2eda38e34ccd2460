//! Hybrid dynamics, equilibria and hysteretic switching of single-coil
//! electromagnetic reluctance actuators with mechanical end stops.
//!
//! The actuator is a mass-spring-damper armature driven by the reluctance force
//! of a coil. Motion between two stops is modelled as a three-mode hybrid
//! automaton (resting at the upper stop, moving, resting at the lower stop).
//!
//! ```
//! use switchdyn::{critical_points, hybrid_equilibria, Actuator, ActuatorParams};
//!
//! let a = Actuator::basic(ActuatorParams::table_one().with_stroke(0.0, 0.005)).unwrap();
//! let cp = critical_points(&a).unwrap();
//! assert!((cp.u_max.unwrap() - 35.54).abs() < 0.01);
//! assert_eq!(hybrid_equilibria(&a, 20.0).unwrap().len(), 3);
//! ```

pub mod bifurcation;
pub mod equilibria;
mod error;
pub mod hybrid;
pub mod magnetics;
mod params;
mod roots;

pub use bifurcation::{
    classify_case, hysteresis_dynamic, hysteresis_quasistatic, ramp_refinement, sweep, BranchData,
    HysteresisLoop, StrokeCase,
};
pub use equilibria::{
    continuous_equilibria, critical_points, hybrid_equilibria, CriticalPoints, Equilibrium, Stability,
};
pub use error::{Error, Result};
pub use hybrid::{simulate, Mode, SimOptions, State, Trajectory, VoltageProfile};
pub use params::{Actuator, ActuatorParams, ReluctanceModel, FLUX_MARGIN};
