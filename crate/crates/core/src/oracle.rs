//! Exact references for small instances: cycle enumeration, minimum-cost
//! DFVS by branch and bound, a brute-force hitting-set cross-check, the full
//! cycle LP with a duality certificate, and maximum dicycle packing.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::cost::Cost;
use crate::embedded::{face_minimal_dicycles, residual_graph, DiCycle, EmbeddedDigraph, VertexId};
use crate::error::{Error, Result};
use crate::lp::{lightest_cycle_per_root, path_to_cycle, solve_lp, Arithmetic, LpConfig};
use crate::rational::{format_rational, to_f64};

pub const DEFAULT_DFVS_CAP: usize = 18;
pub const DEFAULT_PACKING_CAP: usize = 14;
pub const MAX_ENUMERATED_CYCLES: usize = 2_000_000;

#[derive(Clone, Debug, Serialize)]
pub struct ExactResult {
    #[serde(serialize_with = "ser_rational")]
    pub value: BigRational,
    pub vertices: BTreeSet<VertexId>,
    /// Cycles of an optimal packing; empty for hitting problems.
    pub cycles: Vec<DiCycle>,
    pub nodes: u64,
    pub method: &'static str,
}

fn ser_rational<S: serde::Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(r))
}

fn check_cap(g: &EmbeddedDigraph, cap: usize) -> Result<()> {
    if g.vertex_count() > cap {
        return Err(Error::CapExceeded { size: g.vertex_count(), cap });
    }
    Ok(())
}

/// All simple dicycles, one per vertex sequence (parallel arcs collapse to
/// the smallest arc id), sorted.
pub fn enumerate_dicycles(g: &EmbeddedDigraph, cap: usize) -> Result<Vec<DiCycle>> {
    check_cap(g, cap)?;
    let n = g.n();
    let mut found: BTreeSet<Vec<usize>> = BTreeSet::new();
    for s in 0..n {
        // backtracking over simple paths through vertices > s
        let mut path = vec![s];
        let mut on_path = vec![false; n];
        on_path[s] = true;
        let mut iters: Vec<usize> = vec![0];
        while let Some(&u) = path.last() {
            let depth = path.len() - 1;
            let outs = g.out_arcs(u);
            if iters[depth] >= outs.len() {
                path.pop();
                iters.pop();
                on_path[u] = false;
                continue;
            }
            let h = g.arc_rec(outs[iters[depth]]).head;
            iters[depth] += 1;
            if h == s {
                found.insert(path.clone());
                if found.len() > MAX_ENUMERATED_CYCLES {
                    return Err(Error::TooManyCycles(found.len()));
                }
            } else if h > s && !on_path[h] {
                on_path[h] = true;
                path.push(h);
                iters.push(0);
            }
        }
    }
    Ok(found.into_iter().map(|p| path_to_cycle(g, &p)).collect())
}

fn vertex_mask(g: &EmbeddedDigraph, c: &DiCycle) -> u64 {
    c.vertices().iter().fold(0u64, |m, v| m | 1 << g.ix(*v).expect("cycle vertex in graph"))
}

fn finite_cost(g: &EmbeddedDigraph, i: usize) -> Option<&BigRational> {
    g.cost_ix(i).as_finite()
}

/// Upper bound on what a branch may cost; `None` means unbounded.
type Budget = Option<BigRational>;

fn under(budget: &Budget, x: &BigRational) -> bool {
    budget.as_ref().map_or(true, |b| x < b)
}

struct Bb {
    nodes: u64,
    lp: LpConfig,
}

impl Bb {
    /// Cheapest DFVS of `g` costing strictly less than `budget`.
    fn solve(&mut self, g: &EmbeddedDigraph, budget: &Budget) -> Result<Option<(BigRational, BTreeSet<VertexId>)>> {
        self.nodes += 1;
        let r = residual_graph(g, &BTreeSet::new());
        if r.is_empty() {
            return Ok(Some((BigRational::zero(), BTreeSet::new())));
        }
        let comps = crate::embedded::scc(&r);
        if comps.len() > 1 {
            let mut total = BigRational::zero();
            let mut set = BTreeSet::new();
            for comp in comps {
                let keep: BTreeSet<VertexId> = comp.into_iter().collect();
                match self.solve(&r.induced(&keep), &None)? {
                    Some((c, s)) => {
                        total += c;
                        set.extend(s);
                    }
                    None => return Ok(None),
                }
            }
            return Ok(under(budget, &total).then_some((total, set)));
        }
        match solve_lp(&r, &self.lp) {
            Ok(sol) => {
                // float bound, loosened so rounding never prunes an optimum
                let lb = sol.objective_f64 - 1e-6;
                if let Some(b) = budget {
                    if lb >= to_f64(b) {
                        return Ok(None);
                    }
                }
            }
            Err(Error::Unhittable(_)) => return Ok(None),
            Err(e) => return Err(e),
        }
        let alive = vec![true; r.n()];
        let zeros = vec![0u32; r.n()];
        let shortest = lightest_cycle_per_root(&r, &zeros, &alive)
            .into_iter()
            .min_by(|a, b| (a.1, &a.2).cmp(&(b.1, &b.2)))
            .expect("nonempty residual has a cycle");
        let mut best: Option<(BigRational, BTreeSet<VertexId>)> = None;
        let mut frozen: Vec<VertexId> = Vec::new();
        for &i in &shortest.2 {
            let v = r.id(i);
            let Some(c) = finite_cost(&r, i).cloned() else { continue };
            let limit: Budget = match (&best, budget) {
                (Some((b, _)), _) => Some(b.clone()),
                (None, b) => b.clone(),
            };
            if !under(&limit, &c) {
                frozen.push(v);
                continue;
            }
            let mut child = r.without(&[v].into_iter().collect());
            for &f in &frozen {
                child = child.with_cost(f, Cost::Infinite);
            }
            let sub_budget = limit.map(|l| l - &c);
            if let Some((sc, mut ss)) = self.solve(&child, &sub_budget)? {
                ss.insert(v);
                best = Some((sc + c, ss));
            }
            frozen.push(v);
        }
        Ok(best)
    }
}

/// Minimum-cost DFVS by branch and bound: branch on the vertices of a
/// shortest dicycle (the i-th branch deletes `v_i` and keeps `v_1..v_{i-1}`),
/// bound with the LP of the remaining graph, split into SCCs.
pub fn exact_dfvs(g: &EmbeddedDigraph, cap: usize) -> Result<ExactResult> {
    check_cap(g, cap)?;
    let mut bb = Bb { nodes: 0, lp: LpConfig { arithmetic: Arithmetic::Float, ..LpConfig::default() } };
    match bb.solve(g, &None)? {
        Some((value, vertices)) => Ok(ExactResult { value, vertices, cycles: Vec::new(), nodes: bb.nodes, method: "branch-and-bound" }),
        None => {
            // a cycle with x(C) < 1 under x = 1 on finite vertices is all infinite
            let ones = g.vertices().filter(|v| !g.cost(*v).unwrap().is_infinite()).map(|v| (v, BigRational::one())).collect();
            let c = crate::lp::separate(g, &ones).expect("infeasible instance has an all-infinite dicycle");
            Err(Error::Unhittable(c))
        }
    }
}

/// Cheapest vertex set meeting every cycle in `cycles`, by scanning all
/// subsets of finite-cost vertices. Ties go to the smallest mask.
fn min_hitting_set(g: &EmbeddedDigraph, cycles: &[DiCycle], method: &'static str) -> Result<ExactResult> {
    let n = g.n();
    let masks: Vec<u64> = cycles.iter().map(|c| vertex_mask(g, c)).collect();
    let finite: u64 = (0..n).filter(|&i| finite_cost(g, i).is_some()).fold(0, |m, i| m | 1 << i);
    if let Some(k) = masks.iter().position(|&m| m & finite == 0) {
        return Err(Error::Unhittable(cycles[k].clone()));
    }
    let costs: Vec<BigRational> = (0..n).map(|i| finite_cost(g, i).cloned().unwrap_or_else(BigRational::zero)).collect();
    let mut best: Option<(BigRational, u64)> = None;
    let mut nodes = 0u64;
    let mut sub = finite;
    loop {
        nodes += 1;
        if masks.iter().all(|&m| m & sub != 0) {
            let c: BigRational = (0..n).filter(|i| sub >> i & 1 == 1).map(|i| costs[i].clone()).sum();
            let better = match &best {
                None => true,
                Some((bc, bm)) => c < *bc || (c == *bc && sub < *bm),
            };
            if better {
                best = Some((c, sub));
            }
        }
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & finite;
    }
    let (value, mask) = best.expect("the full finite set hits every cycle");
    let vertices = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| g.id(i)).collect();
    Ok(ExactResult { value, vertices, cycles: Vec::new(), nodes, method })
}

/// Exhaustive cross-check: enumerate all dicycles, then try every subset.
pub fn exhaustive_dfvs(g: &EmbeddedDigraph, cap: usize) -> Result<ExactResult> {
    check_cap(g, cap.min(24))?;
    let cycles = enumerate_dicycles(g, cap)?;
    min_hitting_set(g, &cycles, "exhaustive-hitting-set")
}

/// Cheapest vertex set meeting every face-bounding dicycle of `g` itself.
pub fn exact_facial_hitting_set(g: &EmbeddedDigraph, cap: usize) -> Result<ExactResult> {
    check_cap(g, cap.min(24))?;
    min_hitting_set(g, &face_minimal_dicycles(g), "exhaustive-facial-hitting-set")
}

/// The complete cycle LP with primal and dual solutions.
#[derive(Clone, Debug)]
pub struct FullLp {
    pub cycles: Vec<DiCycle>,
    pub x: BTreeMap<VertexId, BigRational>,
    pub y: Vec<BigRational>,
    pub objective: BigRational,
}

impl FullLp {
    /// Strong-duality certificate: x covers every cycle, y packs under the
    /// costs, and the two objectives agree.
    pub fn certificate_holds(&self, g: &EmbeddedDigraph) -> bool {
        let one = BigRational::from_integer(1.into());
        let zero = BigRational::zero();
        if self.x.values().any(|v| v.is_negative()) || self.y.iter().any(|v| v.is_negative()) {
            return false;
        }
        for c in &self.cycles {
            let s: BigRational = c.vertices().iter().map(|v| self.x.get(v).cloned().unwrap_or_else(BigRational::zero)).sum();
            if s < one {
                return false;
            }
        }
        let mut load: BTreeMap<VertexId, BigRational> = BTreeMap::new();
        for (c, y) in self.cycles.iter().zip(&self.y) {
            for v in c.vertices() {
                *load.entry(*v).or_insert_with(BigRational::zero) += y;
            }
        }
        for (v, l) in &load {
            if let Some(c) = g.cost(*v).and_then(Cost::as_finite) {
                if l > c {
                    return false;
                }
            }
        }
        let primal: BigRational = g
            .vertices()
            .filter_map(|v| g.cost(v).and_then(Cost::as_finite).map(|c| c * self.x.get(&v).unwrap_or(&zero)))
            .sum();
        let dual: BigRational = self.y.iter().cloned().sum();
        primal == dual && dual == self.objective
    }
}

/// Solves the LP with every dicycle as a constraint, exactly.
pub fn full_lp(g: &EmbeddedDigraph, cap: usize) -> Result<FullLp> {
    let cycles = enumerate_dicycles(g, cap)?;
    let n = g.n();
    let mut row = vec![usize::MAX; n];
    let mut caps = Vec::new();
    for i in 0..n {
        if let Some(c) = finite_cost(g, i) {
            row[i] = caps.len();
            caps.push(c.clone());
        }
    }
    let mut simplex = crate::lp::PackingSimplex::new(&caps);
    for c in &cycles {
        let members: Vec<usize> =
            c.vertices().iter().map(|v| row[g.ix(*v).unwrap()]).filter(|&r| r != usize::MAX).collect();
        if members.is_empty() {
            return Err(Error::Unhittable(c.clone()));
        }
        simplex.add_column(&members);
    }
    simplex.solve(usize::MAX).map_err(|e| Error::Internal(format!("full LP: {e:?}")))?;
    let mult = simplex.multipliers();
    let x = (0..n)
        .map(|i| (g.id(i), if row[i] == usize::MAX { BigRational::zero() } else { mult[row[i]].clone() }))
        .collect();
    Ok(FullLp { y: simplex.column_values(), objective: simplex.objective().clone(), cycles, x })
}

/// Maximum number of pairwise vertex-disjoint dicycles.
pub fn max_dicycle_packing(g: &EmbeddedDigraph, cap: usize) -> Result<ExactResult> {
    let all = enumerate_dicycles(g, cap)?;
    // keep one cycle per vertex set
    let mut by_mask: BTreeMap<u64, DiCycle> = BTreeMap::new();
    for c in all {
        by_mask.entry(vertex_mask(g, &c)).or_insert(c);
    }
    let cycles: Vec<(u64, DiCycle)> = by_mask.into_iter().collect();
    let min_len = cycles.iter().map(|(m, _)| m.count_ones()).min().unwrap_or(1).max(1);

    struct Search<'a> {
        cycles: &'a [(u64, DiCycle)],
        min_len: u32,
        best: Vec<usize>,
        nodes: u64,
    }
    impl Search<'_> {
        fn go(&mut self, used: u64, chosen: &mut Vec<usize>, start: usize) {
            self.nodes += 1;
            if chosen.len() > self.best.len() {
                self.best = chosen.clone();
            }
            let free_cycles: Vec<usize> =
                (start..self.cycles.len()).filter(|&k| self.cycles[k].0 & used == 0).collect();
            let Some(&first) = free_cycles.first() else { return };
            let union = free_cycles.iter().fold(0u64, |m, &k| m | self.cycles[k].0);
            let bound = chosen.len() + (union.count_ones() / self.min_len) as usize;
            if bound <= self.best.len() {
                return;
            }
            // either the lowest vertex of `first` is covered by some cycle, or it is never used
            let pivot = self.cycles[first].0.trailing_zeros();
            for &k in &free_cycles {
                if self.cycles[k].0 >> pivot & 1 == 1 {
                    chosen.push(k);
                    self.go(used | self.cycles[k].0, chosen, start);
                    chosen.pop();
                }
            }
            self.go(used | 1 << pivot, chosen, start);
        }
    }
    let mut s = Search { cycles: &cycles, min_len, best: Vec::new(), nodes: 0 };
    s.go(0, &mut Vec::new(), 0);
    let chosen: Vec<DiCycle> = s.best.iter().map(|&k| cycles[k].1.clone()).collect();
    let vertices = chosen.iter().flat_map(|c| c.vertices().iter().copied()).collect();
    Ok(ExactResult {
        value: BigRational::from_integer((chosen.len() as i64).into()),
        vertices,
        cycles: chosen,
        nodes: s.nodes,
        method: "packing-branch-and-bound",
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedded::fixtures::*;
    use crate::embedded::ArcId;
    use crate::rational::{int, ratio};

    fn bidirected_triangle() -> EmbeddedDigraph {
        let mut b = EmbeddedDigraph::builder();
        for i in 0..3 {
            b.add_vertex(v(i), Cost::unit());
        }
        for (k, (t, h)) in [(0, 1), (1, 0), (1, 2), (2, 1), (2, 0), (0, 2)].into_iter().enumerate() {
            b.add_arc(ArcId(k as u32), v(t), v(h));
        }
        b.build().unwrap()
    }

    #[test]
    fn enumeration_examples() {
        assert_eq!(enumerate_dicycles(&directed_cycle(3), 18).unwrap().len(), 1);
        let cs = enumerate_dicycles(&bidirected_triangle(), 18).unwrap();
        assert_eq!(cs.iter().filter(|c| c.len() == 2).count(), 3);
        assert_eq!(cs.iter().filter(|c| c.len() == 3).count(), 2);
        let mut b = EmbeddedDigraph::builder();
        b.add_vertex(v(0), Cost::unit()).add_vertex(v(1), Cost::unit());
        b.add_arc(a(0), v(0), v(1));
        assert!(enumerate_dicycles(&b.build().unwrap(), 18).unwrap().is_empty());
    }

    #[test]
    fn exact_examples() {
        assert_eq!(exact_dfvs(&directed_cycle(3), 18).unwrap().value, int(1));
        assert_eq!(exact_dfvs(&bidirected_triangle(), 18).unwrap().value, int(2));
        assert_eq!(exhaustive_dfvs(&bidirected_triangle(), 10).unwrap().value, int(2));
    }

    #[test]
    fn torus_grid_exact_matches_subset_scan() {
        let g = torus_grid(3);
        let bb = exact_dfvs(&g, 18).unwrap();
        let ex = exhaustive_dfvs(&g, 10).unwrap();
        assert_eq!(bb.value, ex.value);
        assert!(residual_graph(&g, &bb.vertices).is_empty());
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(exact_dfvs(&torus_grid(5), 18), Err(Error::CapExceeded { size: 25, cap: 18 })));
    }

    #[test]
    fn full_lp_certificate() {
        let g = bidirected_triangle();
        let lp = full_lp(&g, 18).unwrap();
        assert_eq!(lp.objective, ratio(3, 2));
        assert!(lp.certificate_holds(&g));
        let mut bad = lp.clone();
        bad.y[0] += int(1);
        assert!(!bad.certificate_holds(&g));
    }

    #[test]
    fn packing_examples() {
        assert_eq!(max_dicycle_packing(&directed_cycle(3), 14).unwrap().value, int(1));
        assert_eq!(max_dicycle_packing(&bidirected_triangle(), 14).unwrap().value, int(1));
        let t = directed_cycle(3);
        let mut b = t.to_builder();
        for i in 0..3u32 {
            b.add_vertex(v(10 + i), Cost::unit());
            b.add_arc(a(10 + i), v(10 + i), v(10 + (i + 1) % 3));
        }
        assert_eq!(max_dicycle_packing(&b.build().unwrap(), 14).unwrap().value, int(2));
    }

    #[test]
    fn weighted_exact_prefers_cheap_vertices() {
        let g = directed_cycle(3).with_cost(v(0), Cost::from_int(5)).with_cost(v(1), Cost::Infinite);
        let r = exact_dfvs(&g, 18).unwrap();
        assert_eq!(r.vertices, [v(2)].into_iter().collect());
    }
}
