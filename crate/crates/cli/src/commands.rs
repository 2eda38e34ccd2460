//! Subcommand implementations. Each writes one main CSV file and, where the
//! analysis produces them, companion files next to it named `<stem>_<what>.csv`.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use switchdyn::bifurcation::RampRefinement;
use switchdyn::{
    critical_points, hybrid_equilibria, hysteresis_quasistatic, ramp_refinement, simulate, sweep, HysteresisLoop,
    VoltageProfile,
};

use crate::config::{Config, HysteresisMode};
use crate::CliError;

pub const TRAJECTORY_HEADER: &str = "t,q,z,v,phi,i,force";
pub const EVENTS_HEADER: &str = "t,kind,z,v,phi";
pub const EQUILIBRIA_HEADER: &str = "u,mode,branch,z,phi,stability";
pub const CRITICAL_HEADER: &str =
    "u0,phi0,ub,zb,phib,u_min,phi_min,u_max,phi_max,sat_u0,sat_ub,sat_zb,sat_phib,sat_u_min,sat_u_max";
pub const SWEEP_HEADER: &str = "u,branch,mode,z,phi,stability";
pub const ANNOTATIONS_HEADER: &str = "u,branch,kind";
pub const HYSTERESIS_HEADER: &str = "direction,u,z";
pub const SUMMARY_HEADER: &str = "closing_voltage,opening_voltage";

/// Shortest decimal that parses back to the same double; `-0.0` prints as `0.0`.
fn num(x: f64) -> String {
    format!("{:?}", x + 0.0)
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// `<dir>/<stem>_<suffix>.csv` for an output path `<dir>/<stem>.<ext>`.
pub fn companion(out: &Path, suffix: &str) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    out.with_file_name(format!("{stem}_{suffix}.csv"))
}

fn write(path: &Path, header: &str, body: &str) -> Result<(), CliError> {
    let text = format!("{header}\n{body}");
    std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn cmd_simulate(cfg: &Config, out: &Path) -> Result<(), CliError> {
    let sim = cfg
        .simulation
        .as_ref()
        .ok_or_else(|| CliError::Config("missing [simulation] table".into()))?;
    let a = cfg.actuator()?;
    let (q0, x0) = sim.initial(&a.params)?;
    let profile = VoltageProfile::from(sim.voltage);
    let traj = simulate(&a, q0, x0, &profile, sim.t_end, &sim.options()?)?;

    let mut rows = String::new();
    for s in &traj.samples {
        let x = s.state;
        let _ = writeln!(
            rows,
            "{},{},{},{},{},{},{}",
            num(s.t),
            s.mode,
            num(x.z),
            num(x.v),
            num(x.phi),
            num(s.current),
            num(s.force)
        );
    }
    let mut events = String::new();
    for e in &traj.events {
        let x = e.before;
        let _ = writeln!(
            events,
            "{},{},{},{},{}",
            num(e.t),
            e.kind.as_str(),
            num(x.z),
            num(x.v),
            num(x.phi)
        );
    }
    write(out, TRAJECTORY_HEADER, &rows)?;
    write(&companion(out, "events"), EVENTS_HEADER, &events)
}

pub fn cmd_equilibria(cfg: &Config, u: f64, out: &Path) -> Result<(), CliError> {
    if !u.is_finite() {
        return Err(CliError::Usage("--u must be finite".into()));
    }
    let a = cfg.actuator()?;
    let mut rows = String::new();
    for e in hybrid_equilibria(&a, u)? {
        let _ = writeln!(
            rows,
            "{},{},{},{},{},{}",
            num(e.u),
            e.mode,
            e.branch,
            num(e.z),
            num(e.phi),
            e.stability
        );
    }
    write(out, EQUILIBRIA_HEADER, &rows)
}

pub fn cmd_critical(cfg: &Config, out: &Path) -> Result<(), CliError> {
    let cp = critical_points(&cfg.actuator()?)?;
    let s = cp.saturated;
    let fields = [
        num(cp.u0),
        num(cp.phi0),
        num(cp.ub),
        num(cp.zb),
        num(cp.phib),
        opt(cp.u_min),
        opt(cp.phi_min),
        opt(cp.u_max),
        opt(cp.phi_max),
        opt(s.map(|s| s.u0)),
        opt(s.map(|s| s.ub)),
        opt(s.map(|s| s.zb)),
        opt(s.map(|s| s.phib)),
        opt(s.and_then(|s| s.u_min)),
        opt(s.and_then(|s| s.u_max)),
    ];
    write(out, CRITICAL_HEADER, &format!("{}\n", fields.join(",")))
}

pub fn cmd_sweep(cfg: &Config, out: &Path) -> Result<(), CliError> {
    let sw = cfg.sweep.ok_or_else(|| CliError::Config("missing [sweep] table".into()))?;
    let data = sweep(&cfg.actuator()?, sw.u_lo, sw.u_hi, sw.steps, sw.hybrid)?;
    let mut rows = String::new();
    for p in &data.points {
        let _ = writeln!(
            rows,
            "{},{},{},{},{},{}",
            num(p.u),
            p.branch,
            p.mode,
            num(p.z),
            num(p.phi),
            p.stability
        );
    }
    let mut notes = String::new();
    for a in &data.annotations {
        let _ = writeln!(notes, "{},{},{}", num(a.u), a.branch, a.kind.as_str());
    }
    write(out, SWEEP_HEADER, &rows)?;
    write(&companion(out, "annotations"), ANNOTATIONS_HEADER, &notes)
}

/// Runs the configured loop. A dynamic loop is also repeated at half the ramp
/// rate and a warning is returned when the switching voltages moved by more
/// than 1 %.
pub fn cmd_hysteresis(cfg: &Config, out: &Path) -> Result<Option<String>, CliError> {
    let h = cfg.hysteresis.unwrap_or_default();
    let a = cfg.actuator()?;
    let (lp, warning): (HysteresisLoop, _) = match h.mode {
        HysteresisMode::Quasistatic => (hysteresis_quasistatic(&a)?, None),
        HysteresisMode::Dynamic => {
            let r: RampRefinement = ramp_refinement(&a, h.ramp_rate)?;
            let warning = (!r.is_quasistatic()).then(|| {
                format!(
                    "switching voltages moved by {:.3} % when halving the ramp rate; \
                     {} V/s may be too fast for a quasi-static loop",
                    100.0 * r.shift,
                    h.ramp_rate
                )
            });
            (r.coarse, warning)
        }
    };
    let mut rows = String::new();
    for (dir, pts) in [("up", &lp.up), ("down", &lp.down)] {
        for &(u, z) in pts {
            let _ = writeln!(rows, "{dir},{},{}", num(u), num(z));
        }
    }
    write(out, HYSTERESIS_HEADER, &rows)?;
    write(
        &companion(out, "summary"),
        SUMMARY_HEADER,
        &format!("{},{}\n", opt(lp.closing_voltage), opt(lp.opening_voltage)),
    )?;
    Ok(warning)
}
