//! Minimum-weight dicycle search under nonnegative vertex weights.
//!
//! For every root `s` a Dijkstra restricted to vertices `>= s` finds the
//! lightest cycle whose smallest vertex is `s`; the minimum over roots is
//! the lightest cycle overall. Labels compare by (weight, hops, vertex
//! sequence), which gives the fewest-vertices-then-lexicographic tie-break
//! and keeps subpaths of optimal labels optimal.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::ops::Add;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::embedded::{DiCycle, EmbeddedDigraph, VertexId};

#[derive(Copy, Clone, Debug, PartialEq)]
pub(crate) struct OrdF64(pub f64);

impl Eq for OrdF64 {}

impl PartialOrd for OrdF64 {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for OrdF64 {
    fn cmp(&self, o: &Self) -> Ordering {
        self.0.total_cmp(&o.0)
    }
}

impl Add for OrdF64 {
    type Output = OrdF64;
    fn add(self, o: OrdF64) -> OrdF64 {
        OrdF64(self.0 + o.0)
    }
}

type Label<W> = (W, usize, Vec<usize>);

/// Lightest cycle through each root, restricted to `alive` vertices. The
/// returned paths list vertex indices starting at the root.
pub(crate) fn lightest_cycle_per_root<W>(g: &EmbeddedDigraph, wt: &[W], alive: &[bool]) -> Vec<Label<W>>
where
    W: Clone + Ord + Add<Output = W>,
{
    let n = g.n();
    let mut out = Vec::new();
    for s in 0..n {
        if !alive[s] {
            continue;
        }
        let mut labels: Vec<Option<Label<W>>> = vec![None; n];
        let mut done = vec![false; n];
        labels[s] = Some((wt[s].clone(), 1, vec![s]));
        let mut best: Option<Label<W>> = None;
        loop {
            let mut pick: Option<usize> = None;
            for u in s..n {
                if done[u] {
                    continue;
                }
                if let Some(l) = &labels[u] {
                    if pick.map_or(true, |p| l < labels[p].as_ref().unwrap()) {
                        pick = Some(u);
                    }
                }
            }
            let Some(u) = pick else { break };
            done[u] = true;
            let lu = labels[u].clone().unwrap();
            if best.as_ref().is_some_and(|b| &lu >= b) {
                // every cycle closed from here on is at least as heavy
                break;
            }
            for &k in g.out_arcs(u) {
                let h = g.arc_rec(k).head;
                if h < s || !alive[h] {
                    continue;
                }
                if h == s {
                    if best.as_ref().map_or(true, |b| &lu < b) {
                        best = Some(lu.clone());
                    }
                    continue;
                }
                if done[h] {
                    continue;
                }
                let mut path = lu.2.clone();
                path.push(h);
                let cand = (lu.0.clone() + wt[h].clone(), lu.1 + 1, path);
                if labels[h].as_ref().map_or(true, |l| &cand < l) {
                    labels[h] = Some(cand);
                }
            }
        }
        if let Some(b) = best {
            out.push(b);
        }
    }
    out
}

/// Turns an index path into a cycle, using the smallest-id arc between
/// consecutive vertices.
pub(crate) fn path_to_cycle(g: &EmbeddedDigraph, path: &[usize]) -> DiCycle {
    let len = path.len();
    let arcs = (0..len)
        .map(|i| {
            let (u, v) = (path[i], path[(i + 1) % len]);
            let k = *g
                .out_arcs(u)
                .iter()
                .find(|&&k| g.arc_rec(k).head == v)
                .expect("consecutive path vertices are joined by an arc");
            g.arc_rec(k).id
        })
        .collect();
    DiCycle::new(path.iter().map(|&i| g.id(i)).collect(), arcs)
}

/// Integer weights over a common denominator: `x_i = num_i / den`.
pub(crate) fn common_denominator(x: &[BigRational]) -> (Vec<BigInt>, BigInt) {
    let den = x.iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
    let nums = x.iter().map(|r| r.numer() * (&den / r.denom())).collect();
    (nums, den)
}

fn by_index(g: &EmbeddedDigraph, x: &BTreeMap<VertexId, BigRational>) -> Vec<BigRational> {
    g.vertices().map(|v| x.get(&v).cloned().unwrap_or_else(BigRational::zero)).collect()
}

fn best_of<W: Ord>(cands: Vec<Label<W>>) -> Option<Label<W>> {
    cands.into_iter().min()
}

/// Exact sweep over index-aligned values: every per-root lightest cycle
/// with `x(C) < 1`, lightest first.
pub(crate) fn violated_exact(g: &EmbeddedDigraph, x: &[BigRational]) -> Vec<(DiCycle, BigRational)> {
    let (nums, den) = common_denominator(x);
    let alive = vec![true; g.n()];
    let mut found: Vec<Label<BigInt>> = lightest_cycle_per_root(g, &nums, &alive)
        .into_iter()
        .filter(|(w, _, _)| w < &den)
        .collect();
    found.sort();
    found
        .into_iter()
        .map(|(w, _, p)| (path_to_cycle(g, &p), BigRational::new(w, den.clone())))
        .collect()
}

/// Float sweep: cycles with `x(C) < 1 - tol`.
pub(crate) fn violated_float(g: &EmbeddedDigraph, x: &[f64], tol: f64) -> Vec<(DiCycle, f64)> {
    let wt: Vec<OrdF64> = x.iter().map(|&v| OrdF64(v.max(0.0))).collect();
    let alive = vec![true; g.n()];
    let mut found: Vec<Label<OrdF64>> = lightest_cycle_per_root(g, &wt, &alive)
        .into_iter()
        .filter(|(w, _, _)| w.0 < 1.0 - tol)
        .collect();
    found.sort();
    found.into_iter().map(|(w, _, p)| (path_to_cycle(g, &p), w.0)).collect()
}

/// The lightest dicycle of `g` under `x` (missing vertices weigh 0), ties
/// broken by fewer vertices, then by vertex sequence.
pub fn min_weight_dicycle(g: &EmbeddedDigraph, x: &BTreeMap<VertexId, BigRational>) -> Option<(DiCycle, BigRational)> {
    let xs = by_index(g, x);
    let (nums, den) = common_denominator(&xs);
    let alive = vec![true; g.n()];
    best_of(lightest_cycle_per_root(g, &nums, &alive))
        .map(|(w, _, p)| (path_to_cycle(g, &p), BigRational::new(w, den)))
}

/// Separation oracle: a dicycle with `x(C) < 1`, the lightest one, or
/// `None` when every dicycle is covered.
pub fn separate(g: &EmbeddedDigraph, x: &BTreeMap<VertexId, BigRational>) -> Option<DiCycle> {
    min_weight_dicycle(g, x).filter(|(_, w)| w < &BigRational::one()).map(|(c, _)| c)
}

/// Float separation with tolerance: a dicycle with `x(C) < 1 - tol`.
pub fn separate_float(g: &EmbeddedDigraph, x: &BTreeMap<VertexId, f64>, tol: f64) -> Option<DiCycle> {
    let xs: Vec<f64> = g.vertices().map(|v| x.get(&v).copied().unwrap_or(0.0)).collect();
    violated_float(g, &xs, tol).into_iter().next().map(|(c, _)| c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::Cost;
    use crate::embedded::fixtures::*;
    use crate::embedded::ArcId;
    use crate::rational::int;

    fn xs(pairs: &[(u32, i64)]) -> BTreeMap<VertexId, BigRational> {
        pairs.iter().map(|&(v_, q)| (v(v_), int(q))).collect()
    }

    /// Two triangles 0-1-2 and 0-3-4 sharing vertex 0.
    fn bowtie() -> EmbeddedDigraph {
        let mut b = EmbeddedDigraph::builder();
        for i in 0..5 {
            b.add_vertex(v(i), Cost::unit());
        }
        for (k, (t, h)) in [(0, 1), (1, 2), (2, 0), (0, 3), (3, 4), (4, 0)].into_iter().enumerate() {
            b.add_arc(ArcId(k as u32), v(t), v(h));
        }
        b.build().unwrap()
    }

    #[test]
    fn triangle_with_zero_weights_is_returned() {
        let g = directed_cycle(3);
        let (c, w) = min_weight_dicycle(&g, &BTreeMap::new()).unwrap();
        assert_eq!(c.vertices(), &[v(0), v(1), v(2)]);
        assert_eq!(w, int(0));
        assert!(separate(&g, &xs(&[(0, 1)])).is_none());
    }

    #[test]
    fn shared_vertex_covers_both_triangles() {
        let g = bowtie();
        assert!(separate(&g, &xs(&[(0, 1)])).is_none());
        let c = separate(&g, &xs(&[(1, 1)])).unwrap();
        assert_eq!(c.vertices(), &[v(0), v(3), v(4)]);
    }

    #[test]
    fn ties_prefer_fewer_vertices_then_lexicographic() {
        // digon 0 <-> 1 and triangle 0 -> 2 -> 3 -> 0, all weight 0
        let mut b = EmbeddedDigraph::builder();
        for i in 0..4 {
            b.add_vertex(v(i), Cost::unit());
        }
        for (k, (t, h)) in [(0, 2), (2, 3), (3, 0), (0, 1), (1, 0)].into_iter().enumerate() {
            b.add_arc(ArcId(k as u32), v(t), v(h));
        }
        let g = b.build().unwrap();
        let (c, _) = min_weight_dicycle(&g, &BTreeMap::new()).unwrap();
        assert_eq!(c.vertices(), &[v(0), v(1)]);
        assert_eq!(c.arcs(), &[a(3), a(4)]);
    }

    #[test]
    fn acyclic_gives_none() {
        let mut b = EmbeddedDigraph::builder();
        b.add_vertex(v(0), Cost::unit()).add_vertex(v(1), Cost::unit());
        b.add_arc(a(0), v(0), v(1));
        assert!(min_weight_dicycle(&b.build().unwrap(), &BTreeMap::new()).is_none());
    }

    #[test]
    fn loops_are_cycles() {
        let mut b = EmbeddedDigraph::builder();
        b.add_vertex(v(0), Cost::unit());
        b.add_arc(a(0), v(0), v(0));
        let g = b.build().unwrap();
        assert_eq!(separate(&g, &BTreeMap::new()).unwrap().vertices(), &[v(0)]);
    }

    #[test]
    fn float_sweep_respects_tolerance() {
        let g = directed_cycle(3);
        let mut x = BTreeMap::new();
        x.insert(v(0), 1.0 - 1e-12);
        assert!(separate_float(&g, &x, 1e-9).is_none());
        x.insert(v(0), 0.5);
        assert!(separate_float(&g, &x, 1e-9).is_some());
    }
}
