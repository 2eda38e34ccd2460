/// Supply voltage as a function of time (V).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VoltageProfile {
    Constant(f64),
    /// `before` for `t < t0`, `after` from `t0` on.
    Step { t0: f64, before: f64, after: f64 },
    /// `u_start + rate t`, held at `u_end` once reached.
    Ramp {
        u_start: f64,
        rate: f64,
        u_end: Option<f64>,
    },
}

impl Default for VoltageProfile {
    fn default() -> Self {
        VoltageProfile::Constant(0.0)
    }
}

impl VoltageProfile {
    pub fn at(&self, t: f64) -> f64 {
        match *self {
            VoltageProfile::Constant(u) => u,
            VoltageProfile::Step { t0, before, after } => {
                if t < t0 {
                    before
                } else {
                    after
                }
            }
            VoltageProfile::Ramp {
                u_start,
                rate,
                u_end,
            } => {
                let u = u_start + rate * t;
                match u_end {
                    Some(end) if rate >= 0.0 => u.min(end),
                    Some(end) => u.max(end),
                    None => u,
                }
            }
        }
    }

    /// Times at which the profile has a kink or a jump. The integrator lands on them.
    pub fn breakpoints(&self) -> Vec<f64> {
        match *self {
            VoltageProfile::Constant(_) => Vec::new(),
            VoltageProfile::Step { t0, .. } => vec![t0],
            VoltageProfile::Ramp {
                u_start,
                rate,
                u_end: Some(end),
            } if rate != 0.0 => {
                let t = (end - u_start) / rate;
                if t > 0.0 {
                    vec![t]
                } else {
                    Vec::new()
                }
            }
            VoltageProfile::Ramp { .. } => Vec::new(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_is_right_continuous() {
        let s = VoltageProfile::Step {
            t0: 0.01,
            before: 0.0,
            after: 24.0,
        };
        assert_eq!(s.at(0.0), 0.0);
        assert_eq!(s.at(0.01), 24.0);
        assert_eq!(s.breakpoints(), vec![0.01]);
    }

    #[test]
    fn ramps_clamp_in_their_direction() {
        let up = VoltageProfile::Ramp {
            u_start: 0.0,
            rate: 2.0,
            u_end: Some(10.0),
        };
        assert_eq!(up.at(1.0), 2.0);
        assert_eq!(up.at(100.0), 10.0);
        assert_eq!(up.breakpoints(), vec![5.0]);
        let down = VoltageProfile::Ramp {
            u_start: 10.0,
            rate: -1.0,
            u_end: Some(0.0),
        };
        assert_eq!(down.at(3.0), 7.0);
        assert_eq!(down.at(30.0), 0.0);
        let free = VoltageProfile::Ramp {
            u_start: 1.0,
            rate: 1.0,
            u_end: None,
        };
        assert_eq!(free.at(1e3), 1001.0);
        assert!(free.breakpoints().is_empty());
    }
}
