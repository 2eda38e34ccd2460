//! Python bindings for `switchdyn`.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyComplex;

use switchdyn as sd;
use switchdyn::equilibria;

fn err(e: sd::Error) -> PyErr {
    if e.is_input_error() || matches!(e, sd::Error::Domain(_)) {
        PyValueError::new_err(e.to_string())
    } else {
        PyRuntimeError::new_err(e.to_string())
    }
}

/// Equilibrium of the hybrid automaton (velocity zero).
#[pyclass(module = "switchdyn_py", frozen, get_all, skip_from_py_object)]
#[derive(Clone)]
struct Equilibrium {
    mode: u8,
    z: f64,
    phi: f64,
    u: f64,
    stability: String,
    branch: usize,
}

#[pymethods]
impl Equilibrium {
    fn __repr__(&self) -> String {
        format!(
            "Equilibrium(mode={}, z={:?}, phi={:?}, u={:?}, stability='{}')",
            self.mode, self.z, self.phi, self.u, self.stability
        )
    }
}

impl From<&equilibria::Equilibrium> for Equilibrium {
    fn from(e: &equilibria::Equilibrium) -> Self {
        Self {
            mode: e.mode.index(),
            z: e.z,
            phi: e.phi,
            u: e.u,
            stability: e.stability.as_str().to_string(),
            branch: e.branch,
        }
    }
}

/// Jump of the automaton; the state is the one just before the jump.
#[pyclass(module = "switchdyn_py", frozen, get_all, skip_from_py_object)]
#[derive(Clone)]
struct Event {
    t: f64,
    kind: String,
    z: f64,
    v: f64,
    phi: f64,
    u: f64,
}

#[pymethods]
impl Event {
    fn __repr__(&self) -> String {
        format!("Event(t={:?}, kind='{}', u={:?})", self.t, self.kind, self.u)
    }
}

/// Sampled trajectory, one list per column.
#[pyclass(module = "switchdyn_py", frozen, get_all)]
struct Trajectory {
    t: Vec<f64>,
    q: Vec<u8>,
    z: Vec<f64>,
    v: Vec<f64>,
    phi: Vec<f64>,
    i: Vec<f64>,
    force: Vec<f64>,
    u: Vec<f64>,
    events: Vec<Event>,
}

#[pymethods]
impl Trajectory {
    fn __len__(&self) -> usize {
        self.t.len()
    }
}

/// Sweep output: one entry per (voltage, branch) in the point columns.
#[pyclass(module = "switchdyn_py", frozen, get_all)]
struct BranchData {
    u: Vec<f64>,
    branch: Vec<usize>,
    mode: Vec<u8>,
    z: Vec<f64>,
    phi: Vec<f64>,
    stability: Vec<String>,
    /// `(u, branch, kind)` for every branch end inside the sweep range.
    annotations: Vec<(f64, usize, String)>,
}

#[pyclass(module = "switchdyn_py", frozen, get_all)]
struct HysteresisLoop {
    /// `(u, z)` pairs while the voltage rises.
    up: Vec<(f64, f64)>,
    down: Vec<(f64, f64)>,
    closing_voltage: Option<f64>,
    opening_voltage: Option<f64>,
}

/// Supply voltage as a function of time.
#[pyclass(module = "switchdyn_py", frozen)]
struct Voltage(sd::VoltageProfile);

#[pymethods]
impl Voltage {
    #[staticmethod]
    fn constant(u: f64) -> Self {
        Voltage(sd::VoltageProfile::Constant(u))
    }

    #[staticmethod]
    fn step(t0: f64, before: f64, after: f64) -> Self {
        Voltage(sd::VoltageProfile::Step { t0, before, after })
    }

    /// Linear ramp from `u_start` at `rate` (V/s), held once it reaches `u_end`.
    #[staticmethod]
    #[pyo3(signature = (u_start, rate, u_end=None))]
    fn ramp(u_start: f64, rate: f64, u_end: Option<f64>) -> Self {
        Voltage(sd::VoltageProfile::Ramp { u_start, rate, u_end })
    }

    fn __call__(&self, t: f64) -> f64 {
        self.0.at(t)
    }

    fn __repr__(&self) -> String {
        format!("Voltage({:?})", self.0)
    }
}

#[derive(FromPyObject)]
enum VoltageArg<'py> {
    Constant(f64),
    Profile(PyRef<'py, Voltage>),
}

impl VoltageArg<'_> {
    fn profile(&self) -> sd::VoltageProfile {
        match self {
            VoltageArg::Constant(u) => sd::VoltageProfile::Constant(*u),
            VoltageArg::Profile(v) => v.0,
        }
    }
}

/// Reluctance actuator with mechanical stops. Defaults are the constants of the
/// reference device, with `z_min = 0` and no upper stop.
#[pyclass(module = "switchdyn_py", frozen)]
struct Actuator(sd::Actuator);

#[pymethods]
impl Actuator {
    #[new]
    #[pyo3(signature = (
        model = "basic", *, R = 50.0, N = 1200, R0 = 1.5e7, kR = 2e10, phi_sat = Some(20e-6),
        m = 1e-3, ks = 55.0, zs = 0.015, c = 0.1, z_min = 0.0, z_max = f64::INFINITY
    ))]
    #[allow(non_snake_case, clippy::too_many_arguments)]
    fn new(
        model: &str,
        R: f64,
        N: u32,
        R0: f64,
        kR: f64,
        phi_sat: Option<f64>,
        m: f64,
        ks: f64,
        zs: f64,
        c: f64,
        z_min: f64,
        z_max: f64,
    ) -> PyResult<Self> {
        let p = sd::ActuatorParams {
            r: R,
            n: N,
            r0: R0,
            kr: kR,
            phi_sat,
            m,
            ks,
            zs,
            c,
            z_min,
            z_max,
        };
        let a = match model {
            "basic" => sd::Actuator::basic(p),
            "saturation" => sd::Actuator::saturated(p),
            other => return Err(PyValueError::new_err(format!("unknown model '{other}'"))),
        };
        a.map(Actuator).map_err(err)
    }

    #[getter]
    fn model(&self) -> &'static str {
        self.0.model.name()
    }

    #[getter]
    fn z_min(&self) -> f64 {
        self.0.params.z_min
    }

    #[getter]
    fn z_max(&self) -> f64 {
        self.0.params.z_max
    }

    /// Same device with different stops.
    fn with_stroke(&self, z_min: f64, z_max: f64) -> PyResult<Self> {
        self.0.with_stroke(z_min, z_max).map(Actuator).map_err(err)
    }

    fn reluctance(&self, z: f64, phi: f64) -> PyResult<f64> {
        self.0.reluctance(z, phi).map_err(err)
    }

    fn force(&self, phi: f64) -> f64 {
        self.0.force(phi)
    }

    fn current(&self, z: f64, phi: f64) -> PyResult<f64> {
        self.0.current_from_flux(z, phi).map_err(err)
    }

    fn steady_flux(&self, z: f64, u: f64) -> PyResult<f64> {
        equilibria::steady_flux(&self.0, z, u).map_err(err)
    }

    /// Critical voltages, gaps and fluxes as a dict; saturated values are
    /// prefixed with `sat_` and `None` for the basic law.
    fn critical_points(&self) -> PyResult<Vec<(&'static str, Option<f64>)>> {
        let cp = sd::critical_points(&self.0).map_err(err)?;
        let s = cp.saturated;
        Ok(vec![
            ("u0", Some(cp.u0)),
            ("phi0", Some(cp.phi0)),
            ("ub", Some(cp.ub)),
            ("zb", Some(cp.zb)),
            ("phib", Some(cp.phib)),
            ("u_min", cp.u_min),
            ("phi_min", cp.phi_min),
            ("u_max", cp.u_max),
            ("phi_max", cp.phi_max),
            ("sat_u0", s.map(|s| s.u0)),
            ("sat_ub", s.map(|s| s.ub)),
            ("sat_zb", s.map(|s| s.zb)),
            ("sat_phib", s.map(|s| s.phib)),
            ("sat_u_min", s.and_then(|s| s.u_min)),
            ("sat_u_max", s.and_then(|s| s.u_max)),
        ])
    }

    /// One of `case1`, `case2`, `case3`.
    fn classify_case(&self) -> PyResult<&'static str> {
        sd::classify_case(&self.0).map(|c| c.as_str()).map_err(err)
    }

    /// Equilibria of the hybrid automaton at supply voltage `u`.
    fn equilibria(&self, u: f64) -> PyResult<Vec<Equilibrium>> {
        let eq = sd::hybrid_equilibria(&self.0, u).map_err(err)?;
        Ok(eq.iter().map(Equilibrium::from).collect())
    }

    /// Free-motion equilibria with gap in `[z_lo, z_hi]` (the stroke by default).
    #[pyo3(signature = (u, z_lo=None, z_hi=None))]
    fn continuous_equilibria(&self, u: f64, z_lo: Option<f64>, z_hi: Option<f64>) -> PyResult<Vec<Equilibrium>> {
        let p = &self.0.params;
        let eq = sd::continuous_equilibria(&self.0, u, z_lo.unwrap_or(p.z_min), z_hi.unwrap_or(p.z_max))
            .map_err(err)?;
        Ok(eq.iter().map(Equilibrium::from).collect())
    }

    /// Free-motion Jacobian with respect to `(z, v, phi)`, row by row.
    #[pyo3(signature = (z, v, phi, u=0.0))]
    fn jacobian(&self, z: f64, v: f64, phi: f64, u: f64) -> PyResult<Vec<[f64; 3]>> {
        let j = equilibria::jacobian(&self.0, &sd::State::new(z, v, phi), u).map_err(err)?;
        Ok((0..3).map(|i| [j[(i, 0)], j[(i, 1)], j[(i, 2)]]).collect())
    }

    #[pyo3(signature = (z, v, phi, u=0.0))]
    fn eigenvalues<'py>(&self, py: Python<'py>, z: f64, v: f64, phi: f64, u: f64) -> PyResult<Vec<Bound<'py, PyComplex>>> {
        let j = equilibria::jacobian(&self.0, &sd::State::new(z, v, phi), u).map_err(err)?;
        let ev = equilibria::eigenvalues(&j).map_err(err)?;
        Ok(ev.iter().map(|l| PyComplex::from_doubles(py, l.re, l.im)).collect())
    }

    /// Integrates the automaton. `voltage` is a number (constant supply) or a
    /// `Voltage`. Without `z` the armature starts at rest on the upper stop, or
    /// at the spring rest position when there is no upper stop; without `mode`
    /// the mode follows from the initial state.
    #[pyo3(signature = (
        voltage, t_end, *, mode=None, z=None, v=0.0, phi=0.0,
        output_dt=1e-4, rtol=1e-8, atol=1e-12, event_tol=1e-10
    ))]
    #[allow(clippy::too_many_arguments)]
    fn simulate(
        &self,
        voltage: VoltageArg<'_>,
        t_end: f64,
        mode: Option<u8>,
        z: Option<f64>,
        v: f64,
        phi: f64,
        output_dt: f64,
        rtol: f64,
        atol: f64,
        event_tol: f64,
    ) -> PyResult<Trajectory> {
        let p = &self.0.params;
        let z = z.unwrap_or(if p.z_max.is_finite() { p.z_max } else { p.zs });
        let x0 = sd::State::new(z, v, phi);
        let q0 = match mode {
            Some(q) => sd::Mode::from_index(q).ok_or_else(|| PyValueError::new_err("mode must be 1, 2 or 3"))?,
            None if v == 0.0 && z == p.z_max => sd::Mode::MaxGap,
            None if v == 0.0 && z == p.z_min => sd::Mode::MinGap,
            None => sd::Mode::Motion,
        };
        let opts = sd::SimOptions {
            rtol,
            atol,
            event_tol,
            output_dt,
            ..sd::SimOptions::default()
        };
        let traj = sd::simulate(&self.0, q0, x0, &voltage.profile(), t_end, &opts).map_err(err)?;
        let col = |f: fn(&sd::hybrid::Sample) -> f64| traj.samples.iter().map(f).collect::<Vec<f64>>();
        Ok(Trajectory {
            t: col(|s| s.t),
            q: traj.samples.iter().map(|s| s.mode.index()).collect(),
            z: col(|s| s.state.z),
            v: col(|s| s.state.v),
            phi: col(|s| s.state.phi),
            i: col(|s| s.current),
            force: col(|s| s.force),
            u: col(|s| s.u),
            events: traj
                .events
                .iter()
                .map(|e| Event {
                    t: e.t,
                    kind: e.kind.as_str().to_string(),
                    z: e.before.z,
                    v: e.before.v,
                    phi: e.before.phi,
                    u: e.u,
                })
                .collect(),
        })
    }

    /// Equilibrium branches over `steps` voltages in `[u_lo, u_hi]`.
    #[pyo3(signature = (u_lo, u_hi, steps=1001, hybrid=false))]
    fn sweep(&self, u_lo: f64, u_hi: f64, steps: usize, hybrid: bool) -> PyResult<BranchData> {
        let d = sd::sweep(&self.0, u_lo, u_hi, steps, hybrid).map_err(err)?;
        let pts = &d.points;
        Ok(BranchData {
            u: pts.iter().map(|p| p.u).collect(),
            branch: pts.iter().map(|p| p.branch).collect(),
            mode: pts.iter().map(|p| p.mode.index()).collect(),
            z: pts.iter().map(|p| p.z).collect(),
            phi: pts.iter().map(|p| p.phi).collect(),
            stability: pts.iter().map(|p| p.stability.as_str().to_string()).collect(),
            annotations: d
                .annotations
                .iter()
                .map(|a| (a.u, a.branch, a.kind.as_str().to_string()))
                .collect(),
        })
    }

    /// Switching loop between the stops, `quasistatic` or `dynamic` (triangular
    /// ramp at `ramp_rate` V/s).
    #[pyo3(signature = (mode="quasistatic", ramp_rate=1.0))]
    fn hysteresis(&self, mode: &str, ramp_rate: f64) -> PyResult<HysteresisLoop> {
        let l = match mode {
            "quasistatic" => sd::hysteresis_quasistatic(&self.0),
            "dynamic" => sd::hysteresis_dynamic(&self.0, ramp_rate),
            other => return Err(PyValueError::new_err(format!("unknown hysteresis mode '{other}'"))),
        }
        .map_err(err)?;
        Ok(HysteresisLoop {
            up: l.up,
            down: l.down,
            closing_voltage: l.closing_voltage,
            opening_voltage: l.opening_voltage,
        })
    }

    fn __repr__(&self) -> String {
        format!(
            "Actuator(model='{}', z_min={:?}, z_max={:?})",
            self.0.model.name(),
            self.0.params.z_min,
            self.0.params.z_max
        )
    }
}

#[pymodule]
fn switchdyn_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Actuator>()?;
    m.add_class::<Voltage>()?;
    m.add_class::<Equilibrium>()?;
    m.add_class::<Event>()?;
    m.add_class::<Trajectory>()?;
    m.add_class::<BranchData>()?;
    m.add_class::<HysteresisLoop>()?;
    Ok(())
}
