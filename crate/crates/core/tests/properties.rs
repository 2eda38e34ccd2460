use proptest::prelude::*;
use switchdyn::bifurcation::StrokeCase;
use switchdyn::hybrid::{flow, in_flow_set, jump, EventKind};
use switchdyn::{
    classify_case, continuous_equilibria, critical_points, hybrid_equilibria, simulate, Actuator, ActuatorParams,
    Mode, SimOptions, Stability, State, VoltageProfile,
};

fn actuator(sat: bool, z_max: f64) -> Actuator {
    let p = ActuatorParams::table_one().with_stroke(0.0, z_max);
    if sat {
        Actuator::saturated(p).unwrap()
    } else {
        Actuator::basic(p).unwrap()
    }
}

/// Largest rate component in natural units: gap over `zs`, net force over the
/// spring preload, induced voltage `N dphi/dt` over the supply voltage.
fn scaled_rate(a: &Actuator, q: Mode, x: &State, u: f64) -> f64 {
    let p = a.params;
    let r = flow(a, q, x, u).unwrap();
    let force = r.dv * p.m / (p.ks * p.zs);
    let emf = r.dphi * p.n as f64 / u.abs().max(1.0);
    (r.dz / p.zs).abs().max(force.abs()).max(emf.abs())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hybrid_equilibria_are_rest_points(sat in any::<bool>(), z_max in 0.001..0.03f64, u in -120.0..120.0f64) {
        let a = actuator(sat, z_max);
        for e in hybrid_equilibria(&a, u).unwrap() {
            let x = e.state();
            prop_assert!(in_flow_set(&a, e.mode, &x));
            prop_assert!(e.z >= 0.0 && e.z <= z_max);
            match e.mode {
                Mode::Motion => prop_assert!(scaled_rate(&a, e.mode, &x, u) < 1e-9),
                _ => {
                    prop_assert!(scaled_rate(&a, e.mode, &x, u) < 1e-9);
                    // a resting equilibrium is never in the jump set, except exactly at lift-off
                    if e.stability == Stability::Stable {
                        prop_assert!(jump(&a, e.mode, &x).is_none());
                    }
                }
            }
        }
    }

    #[test]
    fn stops_are_the_only_stable_rest_below_the_fold_gap(sat in any::<bool>(), frac in 0.05..0.98f64, u in -120.0..120.0f64) {
        let a0 = actuator(sat, f64::INFINITY);
        let zb = critical_points(&a0).unwrap().active_zb();
        let a = actuator(sat, frac * zb);
        prop_assert_eq!(classify_case(&a).unwrap(), StrokeCase::Case3);
        for e in hybrid_equilibria(&a, u).unwrap() {
            if e.mode == Mode::Motion {
                prop_assert_eq!(e.stability, Stability::Unstable);
            }
        }
        prop_assert!(hybrid_equilibria(&a, u).unwrap().iter().any(|e| e.stability != Stability::Unstable));
    }

    #[test]
    fn continuous_equilibria_respect_the_interval(sat in any::<bool>(), lo in 0.0..0.01f64, width in 0.001..0.02f64, u in -80.0..80.0f64) {
        let a = actuator(sat, f64::INFINITY);
        let all = continuous_equilibria(&a, u, 0.0, f64::INFINITY).unwrap();
        let some = continuous_equilibria(&a, u, lo, lo + width).unwrap();
        let inside = all.iter().filter(|e| e.z >= lo && e.z <= lo + width).count();
        prop_assert_eq!(some.len(), inside);
        prop_assert!(all.len() <= 2);
    }

    #[test]
    fn steady_drive_ends_at_a_hybrid_equilibrium(sat in any::<bool>(), u in 0.0..80.0f64) {
        let a = actuator(sat, 0.005);
        let traj = simulate(
            &a,
            Mode::MaxGap,
            State::new(0.005, 0.0, 0.0),
            &VoltageProfile::Constant(u),
            0.2,
            &SimOptions { output_dt: 1e-3, ..SimOptions::default() },
        )
        .unwrap();
        for s in &traj.samples {
            prop_assert!(in_flow_set(&a, s.mode, &s.state));
        }
        prop_assert!(traj.count(EventKind::ImpactMin) <= 1);
        let end = traj.last().unwrap();
        let eq = hybrid_equilibria(&a, u).unwrap();
        let target = eq.iter().find(|e| e.mode == end.mode && e.stability != Stability::Unstable);
        prop_assert!(target.is_some(), "ended in mode {} at u = {u}", end.mode);
        let t = target.unwrap();
        let opts = SimOptions::default();
        let err = (end.state.phi - t.phi).abs();
        prop_assert!(err <= 100.0 * (opts.rtol * t.phi.abs() + opts.atol), "flux off by {err:e}");
        prop_assert_eq!(end.state.z, t.z);
    }
}
