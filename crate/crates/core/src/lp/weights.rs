//! Integer scaling of LP values and the weighted path metric built on it.
//!
//! A path `v_0 ... v_l` weighs `w(v_0) + ... + w(v_{l-1})`: every vertex
//! except the last. A dicycle read as a closed walk therefore weighs
//! `N * x(C) >= N`.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::Serialize;

use super::LpSolution;
use crate::embedded::{EmbeddedDigraph, VertexId};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Scaling {
    /// `N`: smallest positive integer making every `N x_v` and `eps N` integral.
    pub n: u128,
    /// `eps N`
    pub eps_n: u128,
    pub w: BTreeMap<VertexId, u128>,
    pub approximate: bool,
}

/// `N = lcm` of the denominators of `x` and of `epsilon`; `w_v = N x_v`.
pub fn scale_values(x: &BTreeMap<VertexId, BigRational>, epsilon: &BigRational, approximate: bool) -> Result<Scaling> {
    let n_big = x.values().fold(epsilon.denom().clone(), |acc, r| acc.lcm(r.denom()));
    let n = n_big.to_u128().ok_or(Error::ScaleOverflow)?;
    let times_n = |r: &BigRational| -> Result<u128> {
        let v: BigInt = r.numer() * (&n_big / r.denom());
        v.to_u128().ok_or(Error::ScaleOverflow)
    };
    let eps_n = times_n(epsilon)?;
    let mut w = BTreeMap::new();
    for (&v, r) in x {
        w.insert(v, times_n(r)?);
    }
    Ok(Scaling { n, eps_n, w, approximate })
}

/// Rescales `sol` for a (possibly different) `epsilon`.
pub fn scale_and_weigh(sol: &LpSolution, epsilon: &BigRational) -> Result<Scaling> {
    scale_values(&sol.x, epsilon, sol.approximate)
}

/// Shortest paths under the path weight above, on a fixed graph.
#[derive(Clone, Debug)]
pub struct WeightedDistanceOracle {
    g: EmbeddedDigraph,
    w: Vec<u128>,
}

type PathLabel = (u128, Vec<usize>);

impl WeightedDistanceOracle {
    /// Vertices missing from `w` weigh 0.
    pub fn new(g: &EmbeddedDigraph, w: &BTreeMap<VertexId, u128>) -> Self {
        let weights = g.vertices().map(|v| w.get(&v).copied().unwrap_or(0)).collect();
        WeightedDistanceOracle { g: g.clone(), w: weights }
    }

    pub fn graph(&self) -> &EmbeddedDigraph {
        &self.g
    }

    fn mask(&self, set: &BTreeSet<VertexId>) -> Vec<bool> {
        self.g.vertices().map(|v| set.contains(&v)).collect()
    }

    /// Multi-source distances `d(S, v)`, indexed like the graph.
    pub(crate) fn from_sources_ix(&self, sources: &[bool], forbidden: &[bool]) -> Vec<Option<u128>> {
        self.dijkstra(sources, forbidden, false)
    }

    /// Distances `d(v, T)` to a target set, indexed like the graph.
    pub(crate) fn to_targets_ix(&self, targets: &[bool], forbidden: &[bool]) -> Vec<Option<u128>> {
        self.dijkstra(targets, forbidden, true)
    }

    fn dijkstra(&self, start: &[bool], forbidden: &[bool], reverse: bool) -> Vec<Option<u128>> {
        let n = self.g.n();
        let mut dist: Vec<Option<u128>> = vec![None; n];
        let mut done = vec![false; n];
        for i in 0..n {
            if start[i] && !forbidden[i] {
                dist[i] = Some(0);
            }
        }
        let mut heap = std::collections::BinaryHeap::new();
        for i in 0..n {
            if dist[i].is_some() {
                heap.push(std::cmp::Reverse((0u128, i)));
            }
        }
        while let Some(std::cmp::Reverse((d, u))) = heap.pop() {
            if done[u] {
                continue;
            }
            done[u] = true;
            let arcs = if reverse { self.g.in_arcs(u) } else { self.g.out_arcs(u) };
            for &k in arcs {
                let rec = self.g.arc_rec(k);
                let z = if reverse { rec.tail } else { rec.head };
                if forbidden[z] || done[z] {
                    continue;
                }
                // forward: leaving u costs w(u); backward: entering z first costs w(z)
                let nd = d + if reverse { self.w[z] } else { self.w[u] };
                if dist[z].map_or(true, |old| nd < old) {
                    dist[z] = Some(nd);
                    heap.push(std::cmp::Reverse((nd, z)));
                }
            }
        }
        dist
    }

    pub fn distances_from(&self, sources: &BTreeSet<VertexId>, forbidden: &BTreeSet<VertexId>) -> BTreeMap<VertexId, u128> {
        let d = self.from_sources_ix(&self.mask(sources), &self.mask(forbidden));
        d.iter().enumerate().filter_map(|(i, x)| x.map(|x| (self.g.id(i), x))).collect()
    }

    /// `min_{s in S, t in T} d(s, t)` avoiding `forbidden`; `None` is infinity.
    pub fn distance(
        &self,
        sources: &BTreeSet<VertexId>,
        targets: &BTreeSet<VertexId>,
        forbidden: &BTreeSet<VertexId>,
    ) -> Option<u128> {
        let d = self.from_sources_ix(&self.mask(sources), &self.mask(forbidden));
        self.g.vertices().enumerate().filter(|(_, v)| targets.contains(v)).filter_map(|(i, _)| d[i]).min()
    }

    /// Lightest `S -> T` path, ties broken by smallest vertex sequence.
    pub(crate) fn shortest_path_ix(&self, sources: &[bool], targets: &[bool], forbidden: &[bool]) -> Option<(u128, Vec<usize>)> {
        let n = self.g.n();
        let mut labels: Vec<Option<PathLabel>> = vec![None; n];
        let mut done = vec![false; n];
        for i in 0..n {
            if sources[i] && !forbidden[i] {
                labels[i] = Some((0, vec![i]));
            }
        }
        let mut best: Option<PathLabel> = None;
        loop {
            let mut pick: Option<usize> = None;
            for u in 0..n {
                if !done[u] && labels[u].is_some() && pick.map_or(true, |p| labels[u] < labels[p]) {
                    pick = Some(u);
                }
            }
            let Some(u) = pick else { break };
            done[u] = true;
            let lu = labels[u].clone().unwrap();
            if best.as_ref().is_some_and(|b| &lu >= b) {
                break;
            }
            if targets[u] {
                best = Some(lu);
                continue;
            }
            for &k in self.g.out_arcs(u) {
                let z = self.g.arc_rec(k).head;
                if forbidden[z] || done[z] {
                    continue;
                }
                let mut path = lu.1.clone();
                path.push(z);
                let cand = (lu.0 + self.w[u], path);
                if labels[z].as_ref().map_or(true, |l| &cand < l) {
                    labels[z] = Some(cand);
                }
            }
        }
        best
    }

    pub fn shortest_path(
        &self,
        sources: &BTreeSet<VertexId>,
        targets: &BTreeSet<VertexId>,
        forbidden: &BTreeSet<VertexId>,
    ) -> Option<(u128, Vec<VertexId>)> {
        self.shortest_path_ix(&self.mask(sources), &self.mask(targets), &self.mask(forbidden))
            .map(|(w, p)| (w, p.into_iter().map(|i| self.g.id(i)).collect()))
    }

    /// `N x(C)` for a vertex set read as a closed walk.
    pub fn closed_walk_weight(&self, cycle: &[VertexId]) -> u128 {
        cycle.iter().filter_map(|v| self.g.ix(*v)).map(|i| self.w[i]).sum()
    }
}

pub fn weighted_distance(
    o: &WeightedDistanceOracle,
    sources: &BTreeSet<VertexId>,
    targets: &BTreeSet<VertexId>,
    forbidden: &BTreeSet<VertexId>,
) -> Option<u128> {
    o.distance(sources, targets, forbidden)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::Cost;
    use crate::embedded::fixtures::*;
    use crate::rational::{int, ratio};
    use num_traits::One;

    fn x_of(vals: &[BigRational]) -> BTreeMap<VertexId, BigRational> {
        vals.iter().enumerate().map(|(i, r)| (v(i as u32), r.clone())).collect()
    }

    #[test]
    fn scaling_examples() {
        let eps = ratio(1, 12);
        let s = scale_values(&x_of(&[ratio(1, 2), ratio(1, 2), int(0)]), &eps, false).unwrap();
        assert_eq!((s.n, s.eps_n), (12, 1));
        assert_eq!(s.w.values().copied().collect::<Vec<_>>(), vec![6, 6, 0]);
        let s = scale_values(&x_of(&[int(1), int(0), int(0)]), &eps, false).unwrap();
        assert_eq!(s.n, 12);
        assert_eq!(s.w.values().copied().collect::<Vec<_>>(), vec![12, 0, 0]);
        let s = scale_values(&x_of(&[ratio(1, 3), ratio(1, 3), ratio(1, 3), ratio(1, 4)]), &eps, false).unwrap();
        assert_eq!(s.n, 12);
        assert_eq!(s.w.values().copied().collect::<Vec<_>>(), vec![4, 4, 4, 3]);
    }

    #[test]
    fn huge_denominators_overflow() {
        let big = BigRational::new(BigInt::one(), BigInt::from(10u8).pow(50));
        assert!(matches!(scale_values(&x_of(&[big]), &ratio(1, 12), false), Err(Error::ScaleOverflow)));
    }

    fn path3() -> EmbeddedDigraph {
        let mut b = EmbeddedDigraph::builder();
        for i in 0..3 {
            b.add_vertex(v(i), Cost::unit());
        }
        b.add_arc(a(0), v(0), v(1)).add_arc(a(1), v(1), v(2));
        b.build().unwrap()
    }

    #[test]
    fn distance_excludes_last_vertex() {
        let w: BTreeMap<_, _> = [(v(0), 2), (v(1), 3), (v(2), 5)].into_iter().collect();
        let o = WeightedDistanceOracle::new(&path3(), &w);
        let set = |xs: &[u32]| xs.iter().map(|&i| v(i)).collect::<BTreeSet<_>>();
        assert_eq!(weighted_distance(&o, &set(&[0]), &set(&[2]), &BTreeSet::new()), Some(5));
        assert_eq!(weighted_distance(&o, &set(&[0]), &set(&[0]), &BTreeSet::new()), Some(0));
        assert_eq!(weighted_distance(&o, &set(&[2]), &set(&[0]), &BTreeSet::new()), None);
        assert_eq!(weighted_distance(&o, &set(&[0]), &set(&[2]), &set(&[1])), None);
        let to = o.to_targets_ix(&[false, false, true], &[false; 3]);
        assert_eq!(to, vec![Some(5), Some(3), Some(0)]);
        assert_eq!(o.shortest_path(&set(&[0]), &set(&[2]), &BTreeSet::new()), Some((5, vec![v(0), v(1), v(2)])));
    }
}
