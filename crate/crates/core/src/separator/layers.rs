use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::embedded::{EmbeddedDigraph, VertexId};
use crate::rational::format_rational;

/// Which way the layer index runs against the measured distance.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub(crate) enum Direction {
    /// `i >= d(v) > i - w(v)`, distances from a source set
    From,
    /// `d(v) >= i > d(v) - w(v)`, distances to a target set
    To,
}

/// One family of distance layers and the member that was kept.
#[derive(Clone, Debug, Serialize)]
pub struct LayerAudit {
    pub family: String,
    pub lo: u128,
    pub hi: u128,
    pub chosen: u128,
    #[serde(serialize_with = "ser")]
    pub chosen_cost: BigRational,
    /// Sum of all member costs in `lo..=hi`.
    #[serde(serialize_with = "ser")]
    pub total: BigRational,
    /// `N * OPT_LP`
    #[serde(serialize_with = "ser")]
    pub total_bound: BigRational,
    /// `OPT_LP / eps`
    #[serde(serialize_with = "ser")]
    pub chosen_bound: BigRational,
    pub members: BTreeSet<VertexId>,
}

fn ser<S: serde::Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(r))
}

impl LayerAudit {
    pub fn passes(&self) -> bool {
        self.total <= self.total_bound && self.chosen_cost <= self.chosen_bound
    }

    pub fn layer_count(&self) -> u128 {
        self.hi - self.lo + 1
    }
}

pub(crate) struct LayerInput<'a> {
    pub g: &'a EmbeddedDigraph,
    pub w: &'a [u128],
    pub total_bound: &'a BigRational,
    pub chosen_bound: &'a BigRational,
}

/// Index interval of layers containing a vertex at distance `d` with weight `w`.
fn span(dir: Direction, d: u128, w: u128) -> Option<(u128, u128)> {
    if w == 0 {
        return None;
    }
    match dir {
        Direction::From => Some((d, d + w - 1)),
        Direction::To => Some(((d + 1).saturating_sub(w), d)),
    }
}

/// Cheapest layer in `lo..=hi` (smallest index on ties), by a sweep over
/// interval endpoints so the cost does not depend on `hi - lo`.
pub(crate) fn cheapest_layer(
    inp: &LayerInput,
    family: &str,
    dist: &[Option<u128>],
    dir: Direction,
    lo: u128,
    hi: u128,
) -> LayerAudit {
    let mut events: BTreeMap<u128, BigRational> = BTreeMap::new();
    let mut total = BigRational::zero();
    let mut spans = Vec::new();
    for i in 0..inp.g.n() {
        let Some(d) = dist[i] else { continue };
        let Some((a, b)) = span(dir, d, inp.w[i]) else { continue };
        let (a, b) = (a.max(lo), b.min(hi));
        if a > b {
            continue;
        }
        // positive weight means positive x, so the cost is finite
        let c = inp.g.cost_ix(i).as_finite().cloned().unwrap_or_else(BigRational::zero);
        total += &c * BigRational::from_integer((b - a + 1).into());
        *events.entry(a).or_insert_with(BigRational::zero) += &c;
        if b < hi {
            *events.entry(b + 1).or_insert_with(BigRational::zero) -= &c;
        }
        spans.push((i, a, b));
    }
    let mut best = (BigRational::zero(), lo);
    let mut best_set = false;
    let mut running = BigRational::zero();
    if events.first_key_value().map_or(true, |(&k, _)| k > lo) {
        best_set = true;
    }
    for (&at, delta) in &events {
        running += delta;
        if !best_set || running < best.0 {
            best = (running.clone(), at);
            best_set = true;
        }
        if best.0.is_zero() {
            break;
        }
    }
    let chosen = best.1;
    let members = spans.iter().filter(|&&(_, a, b)| a <= chosen && chosen <= b).map(|&(i, _, _)| inp.g.id(i)).collect();
    LayerAudit {
        family: family.to_string(),
        lo,
        hi,
        chosen,
        chosen_cost: best.0,
        total,
        total_bound: inp.total_bound.clone(),
        chosen_bound: inp.chosen_bound.clone(),
        members,
    }
}
