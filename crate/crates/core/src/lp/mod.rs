//! The cycle-covering LP
//!
//!   min c^T x   s.t.   x(C) >= 1 for every dicycle C,   x >= 0,
//!
//! solved by cutting planes. Each strongly connected piece gets its own
//! constraint pool, seeded with one lightest cycle per root; the pool only
//! grows. Infinite-cost vertices carry no variable (their x is 0).

mod separation;
mod simplex;
mod weights;

use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::embedded::{nontrivial_scc_indices, DiCycle, EmbeddedDigraph, VertexId};
use crate::error::{Error, Result};
use crate::rational::{self, ratio};

pub use separation::{min_weight_dicycle, separate, separate_float};
pub use weights::{scale_and_weigh, scale_values, weighted_distance, Scaling, WeightedDistanceOracle};

pub(crate) use separation::{lightest_cycle_per_root, path_to_cycle};
pub(crate) use simplex::PackingSimplex;
use simplex::SimplexError;

use simplex::FLOAT_TOL;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Arithmetic {
    Exact,
    Float,
}

#[derive(Clone, Debug)]
pub struct LpConfig {
    pub arithmetic: Arithmetic,
    /// Separator scale parameter; only affects `N`.
    pub epsilon: BigRational,
    pub max_rounds: usize,
    pub max_pivots: usize,
}

impl Default for LpConfig {
    fn default() -> Self {
        LpConfig { arithmetic: Arithmetic::Exact, epsilon: ratio(1, 12), max_rounds: 2000, max_pivots: 1_000_000 }
    }
}

/// Optimal fractional cover plus its integer scaling.
#[derive(Clone, Debug, Serialize)]
pub struct LpSolution {
    pub arithmetic: Arithmetic,
    /// One entry per vertex of the input graph.
    #[serde(serialize_with = "ser_rational_map")]
    pub x: BTreeMap<VertexId, BigRational>,
    #[serde(serialize_with = "ser_rational")]
    pub objective: BigRational,
    pub objective_f64: f64,
    /// The constraint pool, in insertion order per component.
    pub active_cycles: Vec<DiCycle>,
    /// Packing values of the pool constraints, parallel to `active_cycles`.
    #[serde(serialize_with = "ser_rational_vec")]
    pub cycle_duals: Vec<BigRational>,
    pub scaling: Scaling,
    /// Set when x came from floating point and was rationalized.
    pub approximate: bool,
    pub rounds: usize,
}

fn ser_rational<S: serde::Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&rational::format_rational(r))
}

fn ser_rational_vec<S: serde::Serializer>(v: &[BigRational], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(rational::format_rational))
}

fn ser_rational_map<S: serde::Serializer>(
    m: &BTreeMap<VertexId, BigRational>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_map(m.iter().filter(|(_, r)| !r.is_zero()).map(|(k, r)| (k.0.to_string(), rational::format_rational(r))))
}

impl LpSolution {
    pub fn value(&self, v: VertexId) -> BigRational {
        self.x.get(&v).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn cycle_value(&self, c: &DiCycle) -> BigRational {
        c.vertices().iter().map(|&v| self.value(v)).fold(BigRational::zero(), |a, b| a + b)
    }

    /// Pool constraints holding with equality.
    pub fn binding_cycles(&self) -> Vec<&DiCycle> {
        let one = BigRational::one();
        self.active_cycles.iter().filter(|c| self.cycle_value(c) == one).collect()
    }

    /// `N`
    pub fn scale(&self) -> u128 {
        self.scaling.n
    }

    pub fn weight(&self, v: VertexId) -> u128 {
        self.scaling.w.get(&v).copied().unwrap_or(0)
    }
}

pub fn solve_lp(g: &EmbeddedDigraph, cfg: &LpConfig) -> Result<LpSolution> {
    solve_lp_warm(g, cfg, &[])
}

/// Like [`solve_lp`], seeding the pool with those `warm` cycles that are
/// still dicycles of `g`.
pub fn solve_lp_warm(g: &EmbeddedDigraph, cfg: &LpConfig, warm: &[DiCycle]) -> Result<LpSolution> {
    let mut x: BTreeMap<VertexId, BigRational> = g.vertices().map(|v| (v, BigRational::zero())).collect();
    let mut objective = BigRational::zero();
    let mut objective_f64 = 0.0;
    let mut active_cycles = Vec::new();
    let mut cycle_duals = Vec::new();
    let mut rounds = 0;
    let alive = vec![true; g.n()];
    for comp in nontrivial_scc_indices(g, &alive) {
        let keep: BTreeSet<VertexId> = comp.iter().map(|&i| g.id(i)).collect();
        let h = g.induced(&keep);
        let seeds: Vec<&DiCycle> = warm.iter().filter(|c| c.vertices().iter().all(|v| keep.contains(v))).collect();
        let part = match cfg.arithmetic {
            Arithmetic::Exact => solve_component::<BigRational>(&h, &seeds, cfg)?,
            Arithmetic::Float => solve_component::<f64>(&h, &seeds, cfg)?,
        };
        for (v, val) in part.x {
            x.insert(v, val);
        }
        objective += &part.objective;
        objective_f64 += part.objective_f64;
        active_cycles.extend(part.pool);
        cycle_duals.extend(part.duals);
        rounds = rounds.max(part.rounds);
    }
    let approximate = cfg.arithmetic == Arithmetic::Float;
    let scaling = scale_values(&x, &cfg.epsilon, approximate)?;
    Ok(LpSolution {
        arithmetic: cfg.arithmetic,
        x,
        objective,
        objective_f64,
        active_cycles,
        cycle_duals,
        scaling,
        approximate,
        rounds,
    })
}

struct ComponentLp {
    x: Vec<(VertexId, BigRational)>,
    objective: BigRational,
    objective_f64: f64,
    pool: Vec<DiCycle>,
    duals: Vec<BigRational>,
    rounds: usize,
}

/// Per-scalar hooks: how to sweep for violated cycles and how to turn
/// results back into rationals.
trait LpScalar: simplex::Scalar {
    fn violated(h: &EmbeddedDigraph, x: &[Self]) -> Vec<DiCycle>;
    fn to_rational(&self) -> BigRational;
    fn to_f64(&self) -> f64;
}

impl LpScalar for BigRational {
    fn violated(h: &EmbeddedDigraph, x: &[Self]) -> Vec<DiCycle> {
        separation::violated_exact(h, x).into_iter().map(|(c, _)| c).collect()
    }
    fn to_rational(&self) -> BigRational {
        self.clone()
    }
    fn to_f64(&self) -> f64 {
        rational::to_f64(self)
    }
}

const FLOAT_DENOMINATOR_BOUND: u64 = 1_000_000;

impl LpScalar for f64 {
    fn violated(h: &EmbeddedDigraph, x: &[Self]) -> Vec<DiCycle> {
        separation::violated_float(h, x, FLOAT_TOL).into_iter().map(|(c, _)| c).collect()
    }
    fn to_rational(&self) -> BigRational {
        rational::rationalize(self.max(0.0), FLOAT_DENOMINATOR_BOUND)
    }
    fn to_f64(&self) -> f64 {
        self.max(0.0)
    }
}

fn solve_component<T: LpScalar>(h: &EmbeddedDigraph, seeds: &[&DiCycle], cfg: &LpConfig) -> Result<ComponentLp> {
    let n = h.n();
    let mut row = vec![usize::MAX; n];
    let mut caps = Vec::new();
    for i in 0..n {
        if let Some(c) = h.cost_ix(i).as_finite() {
            row[i] = caps.len();
            caps.push(T::from_rational(c));
        }
    }
    let mut simplex = PackingSimplex::new(&caps);
    let mut pool: Vec<DiCycle> = Vec::new();
    let mut in_pool: BTreeSet<DiCycle> = BTreeSet::new();

    let mut add = |c: DiCycle, simplex: &mut PackingSimplex<T>, pool: &mut Vec<DiCycle>| -> Result<bool> {
        if in_pool.contains(&c) {
            return Ok(false);
        }
        let members: Vec<usize> = c
            .vertices()
            .iter()
            .map(|&v| row[h.ix(v).expect("cycle lies in the component")])
            .filter(|&r| r != usize::MAX)
            .collect();
        if members.is_empty() {
            return Err(Error::Unhittable(c));
        }
        simplex.add_column(&members);
        in_pool.insert(c.clone());
        pool.push(c);
        Ok(true)
    };

    for c in seeds {
        if crate::embedded::cycle_arc_indices(h, c).is_ok() {
            add((*c).clone(), &mut simplex, &mut pool)?;
        }
    }
    let mut x: Vec<T> = vec![T::zero(); n];
    let mut rounds = 0;
    loop {
        match simplex.solve(cfg.max_pivots) {
            Ok(()) => {}
            Err(SimplexError::Unbounded(col)) => {
                return Err(Error::Unhittable(pool[col - caps.len()].clone()));
            }
            Err(SimplexError::PivotCap) => return Err(Error::IterationCap { rounds, pool: pool.len() }),
        }
        let mult = simplex.multipliers();
        for i in 0..n {
            x[i] = if row[i] == usize::MAX { T::zero() } else { mult[row[i]].clone() };
        }
        let mut grew = false;
        for c in T::violated(h, &x) {
            grew |= add(c, &mut simplex, &mut pool)?;
        }
        if !grew {
            break;
        }
        rounds += 1;
        if rounds > cfg.max_rounds {
            return Err(Error::IterationCap { rounds, pool: pool.len() });
        }
    }
    Ok(ComponentLp {
        x: (0..n).map(|i| (h.id(i), x[i].to_rational())).collect(),
        objective: simplex.objective().to_rational(),
        objective_f64: simplex.objective().to_f64(),
        duals: simplex.column_values().iter().map(|y| y.to_rational()).collect(),
        pool,
        rounds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::Cost;
    use crate::embedded::fixtures::*;
    use crate::embedded::ArcId;
    use crate::rational::int;

    fn bidirected_triangle() -> EmbeddedDigraph {
        let mut b = EmbeddedDigraph::builder();
        for i in 0..3 {
            b.add_vertex(v(i), Cost::unit());
        }
        let mut k = 0;
        for (t, h) in [(0, 1), (1, 0), (1, 2), (2, 1), (2, 0), (0, 2)] {
            b.add_arc(ArcId(k), v(t), v(h));
            k += 1;
        }
        b.build().unwrap()
    }

    #[test]
    fn unit_triangle_has_objective_one() {
        let sol = solve_lp(&directed_cycle(3), &LpConfig::default()).unwrap();
        assert_eq!(sol.objective, int(1));
        assert_eq!(sol.binding_cycles().len(), 1);
        assert!(separate(&directed_cycle(3), &sol.x).is_none());
    }

    #[test]
    fn disjoint_triangles_add_up() {
        let t = directed_cycle(3);
        let mut b = t.to_builder();
        for i in 0..3u32 {
            b.add_vertex(v(10 + i), Cost::unit());
            b.add_arc(a(10 + i), v(10 + i), v(10 + (i + 1) % 3));
        }
        let g = b.build().unwrap();
        let sol = solve_lp(&g, &LpConfig::default()).unwrap();
        assert_eq!(sol.objective, int(2));
    }

    #[test]
    fn bidirected_triangle_is_three_halves() {
        let sol = solve_lp(&bidirected_triangle(), &LpConfig::default()).unwrap();
        assert_eq!(sol.objective, ratio(3, 2));
        assert_eq!(sol.scale(), 12);
        let float = solve_lp(&bidirected_triangle(), &LpConfig { arithmetic: Arithmetic::Float, ..Default::default() })
            .unwrap();
        assert!((float.objective_f64 - 1.5).abs() < 1e-9);
        assert!(float.approximate);
    }

    #[test]
    fn infinite_vertices_get_no_value() {
        let g = directed_cycle(3).with_cost(v(0), Cost::Infinite).with_cost(v(1), Cost::from_int(5));
        let sol = solve_lp(&g, &LpConfig::default()).unwrap();
        assert_eq!(sol.objective, int(1));
        assert_eq!(sol.value(v(2)), int(1));
        assert_eq!(sol.value(v(0)), int(0));
    }

    #[test]
    fn all_infinite_cycle_is_unhittable() {
        let mut g = directed_cycle(3);
        for i in 0..3 {
            g = g.with_cost(v(i), Cost::Infinite);
        }
        assert!(matches!(solve_lp(&g, &LpConfig::default()), Err(Error::Unhittable(_))));
    }

    #[test]
    fn acyclic_graph_has_zero_objective() {
        let mut b = EmbeddedDigraph::builder();
        b.add_vertex(v(0), Cost::unit()).add_vertex(v(1), Cost::unit());
        b.add_arc(a(0), v(0), v(1));
        let sol = solve_lp(&b.build().unwrap(), &LpConfig::default()).unwrap();
        assert_eq!(sol.objective, int(0));
        assert!(sol.active_cycles.is_empty());
    }

    #[test]
    fn warm_pool_gives_same_optimum() {
        let g = torus_grid(3);
        let cold = solve_lp(&g, &LpConfig::default()).unwrap();
        let warm = solve_lp_warm(&g, &LpConfig::default(), &cold.active_cycles).unwrap();
        assert_eq!(cold.objective, warm.objective);
        assert_eq!(warm.rounds, 0);
    }

    #[test]
    fn duals_match_objective() {
        let g = torus_grid(3);
        let sol = solve_lp(&g, &LpConfig::default()).unwrap();
        let dual: BigRational = sol.cycle_duals.iter().cloned().fold(BigRational::zero(), |a, b| a + b);
        assert_eq!(dual, sol.objective);
        let primal: BigRational = sol.x.values().cloned().fold(BigRational::zero(), |a, b| a + b);
        assert_eq!(primal, sol.objective);
    }
}
