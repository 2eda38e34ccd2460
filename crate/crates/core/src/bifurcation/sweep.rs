//! One-parameter sweeps in the supply voltage.
//!
//! Equilibria are solved independently on a uniform voltage grid and then
//! chained into branches by nearest-neighbour association in the normalized
//! plane `(z/zs, phi/phi0)`. Branch ends inside the grid are refined by bisection
//! on the existence of an equilibrium with the same mode and stability.

use crate::equilibria::{continuous_equilibria, hybrid_equilibria, Equilibrium, Stability};
use crate::error::{Error, Result};
use crate::hybrid::Mode;
use crate::params::Actuator;
use crate::roots::bisect_predicate;

/// Bisection width on branch end voltages (V).
const ENDPOINT_TOL: f64 = 1e-6;
/// A candidate farther than this multiple of the branch's last step starts a new branch.
const ASSOCIATION_FACTOR: f64 = 5.0;
/// Gap distance (relative to `zs`) from a stop at which a disappearing branch is
/// attributed to leaving the domain.
const DOMAIN_EDGE_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchPoint {
    pub u: f64,
    pub branch: usize,
    pub mode: Mode,
    pub z: f64,
    pub phi: f64,
    pub stability: Stability,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AnnotationKind {
    /// Stable and unstable equilibria merge (saddle-node).
    TangentialBifurcation,
    /// A free-motion equilibrium crosses a stop.
    DomainExit,
    /// A resting equilibrium appears or disappears because the net force at the
    /// stop changes sign.
    LiftOff,
}

impl AnnotationKind {
    pub fn as_str(self) -> &'static str {
        match self {
            AnnotationKind::TangentialBifurcation => "tangential_bifurcation",
            AnnotationKind::DomainExit => "domain_exit",
            AnnotationKind::LiftOff => "lift_off",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Endpoint {
    Birth,
    Death,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Annotation {
    pub u: f64,
    pub branch: usize,
    pub kind: AnnotationKind,
    pub endpoint: Endpoint,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Branch {
    pub id: usize,
    pub mode: Mode,
    /// Refined voltage where the branch appears inside the sweep range.
    pub birth: Option<f64>,
    /// Refined voltage where the branch disappears inside the sweep range.
    pub death: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BranchData {
    /// Sweep points in grid order; within a voltage, ordered by branch id.
    pub points: Vec<BranchPoint>,
    pub branches: Vec<Branch>,
    pub annotations: Vec<Annotation>,
}

impl BranchData {
    pub fn branch_points(&self, id: usize) -> impl Iterator<Item = &BranchPoint> + '_ {
        self.points.iter().filter(move |p| p.branch == id)
    }

    pub fn annotations_of(&self, id: usize) -> impl Iterator<Item = &Annotation> + '_ {
        self.annotations.iter().filter(move |a| a.branch == id)
    }

    /// Number of equilibria at grid voltage `u`.
    pub fn count_at(&self, u: f64) -> usize {
        self.points.iter().filter(|p| p.u == u).count()
    }

    /// Distinct grid voltages, in sweep order.
    pub fn voltages(&self) -> Vec<f64> {
        let mut v: Vec<f64> = Vec::new();
        for p in &self.points {
            if v.last() != Some(&p.u) {
                v.push(p.u);
            }
        }
        v
    }
}

fn same_class(a: Stability, b: Stability) -> bool {
    a == b || a == Stability::Marginal || b == Stability::Marginal
}

struct Sweeper<'a> {
    actuator: &'a Actuator,
    hybrid: bool,
    z_ref: f64,
    phi_ref: f64,
}

impl Sweeper<'_> {
    fn solve(&self, u: f64) -> Result<Vec<Equilibrium>> {
        let p = &self.actuator.params;
        if self.hybrid {
            hybrid_equilibria(self.actuator, u)
        } else {
            continuous_equilibria(self.actuator, u, p.z_min, p.z_max)
        }
    }

    fn norm(&self, z: f64, phi: f64) -> (f64, f64) {
        (z / self.z_ref, phi / self.phi_ref)
    }

    fn count(&self, u: f64, mode: Mode, stability: Stability) -> Result<usize> {
        Ok(self
            .solve(u)?
            .iter()
            .filter(|e| e.mode == mode && same_class(e.stability, stability))
            .count())
    }

    /// Bisects between a voltage where the branch exists and one where it does not.
    /// Returns the refined voltage and the equilibrium on the existing side nearest
    /// to `anchor`.
    fn refine(
        &self,
        present: f64,
        absent: f64,
        mode: Mode,
        stability: Stability,
        anchor: (f64, f64),
    ) -> Result<(f64, Option<Equilibrium>)> {
        let needed = self.count(present, mode, stability)?;
        let err = std::cell::Cell::new(None);
        let exists = |u: f64| match self.count(u, mode, stability) {
            Ok(c) => c >= needed,
            Err(e) => {
                err.set(Some(e));
                false
            }
        };
        let (good, bad) = bisect_predicate(exists, present, absent, ENDPOINT_TOL);
        if let Some(e) = err.take() {
            return Err(e);
        }
        let nearest = self
            .solve(good)?
            .into_iter()
            .filter(|e| e.mode == mode && same_class(e.stability, stability))
            .min_by(|x, y| {
                let d = |e: &Equilibrium| dist(self.norm(e.z, e.phi), anchor);
                d(x).total_cmp(&d(y))
            });
        Ok((0.5 * (good + bad), nearest))
    }

    fn endpoint_kind(&self, eq: Option<&Equilibrium>) -> AnnotationKind {
        let Some(eq) = eq else {
            return AnnotationKind::TangentialBifurcation;
        };
        match eq.mode {
            Mode::MaxGap | Mode::MinGap => AnnotationKind::LiftOff,
            Mode::Motion => {
                let p = &self.actuator.params;
                let edge = DOMAIN_EDGE_TOL * p.zs;
                if (eq.z - p.z_min).abs() <= edge || (p.z_max.is_finite() && (p.z_max - eq.z).abs() <= edge) {
                    AnnotationKind::DomainExit
                } else {
                    AnnotationKind::TangentialBifurcation
                }
            }
        }
    }
}

fn dist(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).hypot(a.1 - b.1)
}

struct Active {
    id: usize,
    mode: Mode,
    stability: Stability,
    last: (f64, f64),
    step: f64,
}

/// Sweeps `u` over `n_steps` evenly spaced values in `[u_lo, u_hi]`.
///
/// With `hybrid` the equilibria of the full automaton are used, otherwise the
/// free-motion equilibria with gap in `[z_min, z_max]`. A degenerate range
/// `u_lo == u_hi` yields the equilibria at that single voltage.
pub fn sweep(a: &Actuator, u_lo: f64, u_hi: f64, n_steps: usize, hybrid: bool) -> Result<BranchData> {
    if !(u_lo.is_finite() && u_hi.is_finite()) {
        return Err(Error::Precondition("sweep bounds must be finite".into()));
    }
    if n_steps < 2 && u_lo != u_hi {
        return Err(Error::Precondition("a sweep needs at least 2 steps".into()));
    }
    let p = &a.params;
    let phi0 = (2.0 * p.ks * p.zs / p.kr).sqrt();
    let u_ref = p.r * p.r0 / p.turns() * phi0;
    let sw = Sweeper {
        actuator: a,
        hybrid,
        z_ref: p.zs,
        phi_ref: phi0,
    };

    let grid: Vec<f64> = if u_lo == u_hi {
        vec![u_lo]
    } else {
        (0..n_steps)
            .map(|k| u_lo + (u_hi - u_lo) * k as f64 / (n_steps - 1) as f64)
            .collect()
    };
    let solutions = grid.iter().map(|&u| sw.solve(u)).collect::<Result<Vec<_>>>()?;
    let base_step = if grid.len() > 1 {
        (grid[1] - grid[0]).abs() / u_ref
    } else {
        0.0
    };

    let mut data = BranchData::default();
    let new_branch = |data: &mut BranchData, e: &Equilibrium| -> Active {
        let id = data.branches.len();
        data.branches.push(Branch {
            id,
            mode: e.mode,
            birth: None,
            death: None,
        });
        Active {
            id,
            mode: e.mode,
            stability: e.stability,
            last: sw.norm(e.z, e.phi),
            step: 0.0,
        }
    };

    let mut active: Vec<Active> = Vec::new();
    for e in &solutions[0] {
        let br = new_branch(&mut data, e);
        data.points.push(point(grid[0], br.id, e));
        active.push(br);
    }

    for k in 1..grid.len() {
        let (u_prev, u) = (grid[k - 1], grid[k]);
        let cands = &solutions[k];

        let mut pairs = Vec::new();
        for (i, br) in active.iter().enumerate() {
            let limit = ASSOCIATION_FACTOR * br.step.max(base_step);
            for (j, e) in cands.iter().enumerate() {
                if e.mode != br.mode {
                    continue;
                }
                let d = dist(br.last, sw.norm(e.z, e.phi));
                if d <= limit {
                    pairs.push((d, i, j));
                }
            }
        }
        pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut branch_of: Vec<Option<(usize, f64)>> = vec![None; cands.len()];
        let mut matched = vec![false; active.len()];
        for (d, i, j) in pairs {
            if matched[i] || branch_of[j].is_some() {
                continue;
            }
            matched[i] = true;
            branch_of[j] = Some((i, d));
        }

        let mut old: Vec<Option<Active>> = active.into_iter().map(Some).collect();
        let mut next = Vec::with_capacity(cands.len());
        let mut row = Vec::with_capacity(cands.len());
        for (j, e) in cands.iter().enumerate() {
            let br = match branch_of[j] {
                Some((i, d)) => {
                    let mut br = old[i].take().expect("branch matched twice");
                    br.last = sw.norm(e.z, e.phi);
                    br.step = d;
                    br.stability = e.stability;
                    br
                }
                None => {
                    let (u_start, eq) = sw.refine(u, u_prev, e.mode, e.stability, sw.norm(e.z, e.phi))?;
                    let br = new_branch(&mut data, e);
                    data.branches[br.id].birth = Some(u_start);
                    data.annotations.push(Annotation {
                        u: u_start,
                        branch: br.id,
                        kind: sw.endpoint_kind(eq.as_ref()),
                        endpoint: Endpoint::Birth,
                    });
                    br
                }
            };
            row.push(point(u, br.id, e));
            next.push(br);
        }
        for br in old.into_iter().flatten() {
            let (u_end, eq) = sw.refine(u_prev, u, br.mode, br.stability, br.last)?;
            data.branches[br.id].death = Some(u_end);
            data.annotations.push(Annotation {
                u: u_end,
                branch: br.id,
                kind: sw.endpoint_kind(eq.as_ref()),
                endpoint: Endpoint::Death,
            });
        }
        row.sort_by_key(|p| p.branch);
        data.points.extend(row);
        next.sort_by_key(|b| b.id);
        active = next;
    }

    data.annotations.sort_by(|x, y| x.u.total_cmp(&y.u).then(x.branch.cmp(&y.branch)));
    Ok(data)
}

fn point(u: f64, branch: usize, e: &Equilibrium) -> BranchPoint {
    BranchPoint {
        u,
        branch,
        mode: e.mode,
        z: e.z,
        phi: e.phi,
        stability: e.stability,
    }
}
