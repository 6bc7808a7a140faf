//! Separation around a tight cycle once no face-bounding dicycle is left:
//! threshold rounding of heavy LP values, boundary ports on the cycle,
//! and layered cuts in the scaled LP metric.

mod layers;
mod plan;
mod ports;

use std::collections::BTreeSet;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::embedded::{residual_graph, DiCycle, EmbeddedDigraph, VertexId};
use crate::error::Result;
use crate::lp::{solve_lp_warm, LpConfig, LpSolution};
use crate::rational::{format_rational, ratio, to_f64};

pub use layers::LayerAudit;
pub use plan::{plan, Branch, CloseWitness, SeparatorPlan};
pub use ports::{build_ports, port_reach_sets, BoundaryPorts, Port, PortKind, ReachSets};

pub fn default_heavy_threshold() -> BigRational {
    ratio(1, 24)
}

#[derive(Clone, Debug, Serialize)]
pub struct HeavyRound {
    #[serde(serialize_with = "ser")]
    pub lp_value: BigRational,
    pub added: Vec<VertexId>,
    #[serde(serialize_with = "ser")]
    pub added_cost: BigRational,
}

fn ser<S: serde::Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(r))
}

#[derive(Clone, Debug)]
pub struct HeavyRounding {
    pub threshold: BigRational,
    pub f: BTreeSet<VertexId>,
    pub rounds: Vec<HeavyRound>,
    pub root_lp: BigRational,
    /// `g` minus `f`, restricted to vertices still on dicycles.
    pub residual: EmbeddedDigraph,
    /// LP of `residual` with every value below the threshold; `None` when
    /// the residual is acyclic.
    pub solution: Option<LpSolution>,
}

impl HeavyRounding {
    pub fn cost(&self) -> BigRational {
        self.rounds.iter().fold(BigRational::zero(), |a, r| a + &r.added_cost)
    }

    /// Per round: `cost(added) <= (LP_k - LP_{k+1}) / t`; overall
    /// `cost(F) <= root LP / t`.
    pub fn audit(&self) -> Vec<String> {
        let mut out = Vec::new();
        let last = self.solution.as_ref().map_or_else(BigRational::zero, |s| s.objective.clone());
        for (k, r) in self.rounds.iter().enumerate() {
            let next = self.rounds.get(k + 1).map_or(&last, |n| &n.lp_value);
            let bound = (&r.lp_value - next) / &self.threshold;
            if r.added_cost > bound {
                out.push(format!("round {k}: added cost {} above {}", format_rational(&r.added_cost), format_rational(&bound)));
            }
        }
        let total = &self.root_lp / &self.threshold;
        if self.cost() > total {
            out.push(format!("heavy cost {} above {}", format_rational(&self.cost()), format_rational(&total)));
        }
        out
    }
}

/// Repeatedly solves the LP on `g - F` and moves every vertex with
/// `x_v >= threshold` into `F`, until none is left or `g - F` is acyclic.
pub fn round_heavy(g: &EmbeddedDigraph, threshold: &BigRational, cfg: &LpConfig) -> Result<HeavyRounding> {
    let mut f = BTreeSet::new();
    let mut rounds = Vec::new();
    let mut root_lp = None;
    let mut pool: Vec<DiCycle> = Vec::new();
    loop {
        let residual = residual_graph(g, &f);
        if residual.is_empty() {
            return Ok(HeavyRounding {
                threshold: threshold.clone(),
                f,
                rounds,
                root_lp: root_lp.unwrap_or_else(BigRational::zero),
                residual,
                solution: None,
            });
        }
        let sol = solve_lp_warm(&residual, cfg, &pool)?;
        root_lp.get_or_insert_with(|| sol.objective.clone());
        let heavy: Vec<VertexId> = sol.x.iter().filter(|(_, x)| *x >= threshold).map(|(v, _)| *v).collect();
        if heavy.is_empty() {
            return Ok(HeavyRounding {
                threshold: threshold.clone(),
                f,
                rounds,
                root_lp: root_lp.unwrap(),
                residual,
                solution: Some(sol),
            });
        }
        let added_cost = heavy
            .iter()
            .map(|v| g.cost(*v).and_then(|c| c.as_finite()).cloned().unwrap_or_else(BigRational::zero))
            .fold(BigRational::zero(), |a, b| a + b);
        f.extend(heavy.iter().copied());
        rounds.push(HeavyRound { lp_value: sol.objective.clone(), added: heavy, added_cost });
        pool = sol.active_cycles;
    }
}

/// Binding pool constraint with the fewest vertices, then the smallest
/// vertex sequence. `None` means no cycle is tight: the LP graph is acyclic.
pub fn tight_cycle(sol: &LpSolution) -> Option<DiCycle> {
    let binding: Vec<&DiCycle> = if sol.approximate {
        sol.active_cycles.iter().filter(|c| (to_f64(&sol.cycle_value(c)) - 1.0).abs() <= 1e-7).collect()
    } else {
        let one = BigRational::one();
        sol.active_cycles.iter().filter(|c| sol.cycle_value(c) == one).collect()
    };
    binding.into_iter().min_by_key(|c| (c.len(), c.vertices().to_vec())).cloned()
}

#[cfg(test)]
mod tests;
