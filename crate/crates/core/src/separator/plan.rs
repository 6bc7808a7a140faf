use std::collections::{BTreeSet, VecDeque};

use num_rational::BigRational;
use serde::Serialize;

use super::layers::{cheapest_layer, Direction, LayerAudit, LayerInput};
use super::ports::{reach_pair, BoundaryPorts, PortKind, ReachSets};
use crate::embedded::{nontrivial_scc_indices, EmbeddedDigraph, VertexId};
use crate::error::{Error, Result};
use crate::lp::{scale_and_weigh, LpSolution, WeightedDistanceOracle};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Branch {
    Far,
    Close,
}

/// Paths certifying a short connection between the two near index sets.
#[derive(Clone, Debug, Serialize)]
pub struct CloseWitness {
    /// `tau` or `kappa`
    pub family: &'static str,
    pub i: usize,
    pub j: usize,
    pub a: usize,
    pub b: usize,
    pub p1: Vec<VertexId>,
    pub p2: Vec<VertexId>,
    pub p3: Vec<VertexId>,
    pub weights: [u128; 3],
}

#[derive(Clone, Debug, Serialize)]
pub struct SeparatorPlan {
    pub branch: Branch,
    /// Original vertices to delete; never ports.
    pub removed: BTreeSet<VertexId>,
    pub audits: Vec<LayerAudit>,
    pub reach: ReachSets,
    pub n: u128,
    pub eps_n: u128,
    pub tau_distance: Option<u128>,
    pub kappa_distance: Option<u128>,
    pub witness: Option<CloseWitness>,
    /// Failed post-assertions; empty when the plan is sound.
    pub violations: Vec<String>,
}

impl SeparatorPlan {
    pub fn audits_pass(&self) -> bool {
        self.audits.iter().all(LayerAudit::passes)
    }

    pub fn check(&self) -> Result<()> {
        match self.violations.first() {
            None => Ok(()),
            Some(v) => Err(Error::Topology(v.clone())),
        }
    }
}

struct Ctx<'a> {
    bp: &'a BoundaryPorts,
    g: &'a EmbeddedDigraph,
    o: WeightedDistanceOracle,
    w: Vec<u128>,
    on_cycle: Vec<bool>,
    nothing: Vec<bool>,
    eps_n: u128,
}

impl Ctx<'_> {
    fn port_mask(&self, kind: PortKind, keep: impl Fn(usize) -> bool) -> Vec<bool> {
        let mut m = vec![false; self.g.n()];
        for p in self.bp.of_kind(kind).filter(|p| keep(p.position)) {
            m[self.g.ix(p.id).unwrap()] = true;
        }
        m
    }

    fn positions_mask(&self, pos: impl IntoIterator<Item = usize>) -> Vec<bool> {
        let mut m = vec![false; self.g.n()];
        for k in pos {
            m[self.g.ix(self.bp.cycle.vertices()[k]).unwrap()] = true;
        }
        m
    }

    fn position_of_port(&self, ix: usize) -> usize {
        let id = self.g.id(ix);
        self.bp.ports.iter().find(|p| p.id == id).unwrap().position
    }

    /// Positions `s, s+1, ..., e` along the cycle.
    fn segment(&self, s: usize, e: usize) -> Vec<usize> {
        let l = self.bp.cycle.len();
        let mut out = vec![s % l];
        let mut k = s % l;
        while k != e % l && out.len() < l {
            k = (k + 1) % l;
            out.push(k);
        }
        out
    }

    fn set_distance(&self, from: &[bool], to: &[bool]) -> Option<u128> {
        let d = self.o.from_sources_ix(from, &self.nothing);
        (0..self.g.n()).filter(|&i| to[i]).filter_map(|i| d[i]).min()
    }
}

/// Chooses the separator branch around `bp.cycle` and the layers to delete.
/// `sol` must be the LP of `g`, the graph the ports were built on.
pub fn plan(g: &EmbeddedDigraph, sol: &LpSolution, bp: &BoundaryPorts, epsilon: &BigRational) -> Result<SeparatorPlan> {
    let scaling = scale_and_weigh(sol, epsilon)?;
    let gp = &bp.graph;
    let o = WeightedDistanceOracle::new(gp, &scaling.w);
    let w: Vec<u128> = gp.vertices().map(|v| scaling.w.get(&v).copied().unwrap_or(0)).collect();
    let cyc = bp.cycle.vertex_set();
    let ctx = Ctx {
        bp,
        g: gp,
        w,
        on_cycle: gp.vertices().map(|v| cyc.contains(&v)).collect(),
        nothing: vec![false; gp.n()],
        eps_n: scaling.eps_n,
        o,
    };
    let (tau_minus, tau_plus) = reach_pair(&ctx.o, bp, PortKind::U, PortKind::W, ctx.eps_n);
    let (kappa_minus, kappa_plus) = reach_pair(&ctx.o, bp, PortKind::D, PortKind::B, ctx.eps_n);
    let reach = ReachSets { tau_minus, tau_plus, kappa_minus, kappa_plus };

    let n_big = BigRational::from_integer(scaling.n.into());
    let total_bound = &n_big * &sol.objective;
    let chosen_bound = &sol.objective / epsilon;
    let inp = LayerInput { g: gp, w: &ctx.w, total_bound: &total_bound, chosen_bound: &chosen_bound };

    let tau_distance = ctx.set_distance(
        &ctx.positions_mask(reach.tau_minus.iter().copied()),
        &ctx.positions_mask(reach.tau_plus.iter().copied()),
    );
    let kappa_distance = ctx.set_distance(
        &ctx.positions_mask(reach.kappa_minus.iter().copied()),
        &ctx.positions_mask(reach.kappa_plus.iter().copied()),
    );
    let far = |d: Option<u128>| d.map_or(true, |d| d > ctx.eps_n);

    let families = [
        ("tau", PortKind::U, PortKind::W, &reach.tau_minus, &reach.tau_plus, tau_distance),
        ("kappa", PortKind::D, PortKind::B, &reach.kappa_minus, &reach.kappa_plus, kappa_distance),
    ];
    let mut audits = Vec::new();
    let mut witness = None;
    let mut violations = Vec::new();
    let branch = if far(tau_distance) && far(kappa_distance) {
        for (name, from, to, minus, plus, _) in families {
            let src = ctx.port_mask(from, |p| !plus.contains(&p));
            let dst = ctx.port_mask(to, |p| !minus.contains(&p));
            let ds = ctx.o.from_sources_ix(&src, &ctx.on_cycle);
            let dt = ctx.o.to_targets_ix(&dst, &ctx.on_cycle);
            let dy = ctx.o.from_sources_ix(&ctx.positions_mask(minus.iter().copied()), &ctx.nothing);
            audits.push(cheapest_layer(&inp, &format!("S_{name}"), &ds, Direction::From, 0, ctx.eps_n - 1));
            audits.push(cheapest_layer(&inp, &format!("T_{name}"), &dt, Direction::To, 1, ctx.eps_n));
            audits.push(cheapest_layer(&inp, &format!("Y_{name}"), &dy, Direction::From, 0, ctx.eps_n));
        }
        Branch::Far
    } else {
        let (name, from, to, minus, plus, _) =
            if far(tau_distance) { families[1] } else { families[0] };
        let wit = close_witness(&ctx, name, from, to, minus, plus)?;
        if wit.a == wit.i || wit.b == wit.j {
            violations.push(format!("degenerate {name} witness: a={} i={} b={} j={}", wit.a, wit.i, wit.b, wit.j));
        }
        let mut src = ctx.positions_mask(ctx.segment(wit.j + 1, wit.b));
        for v in &wit.p2 {
            src[gp.ix(*v).unwrap()] = true;
        }
        let dr = ctx.o.from_sources_ix(&src, &ctx.nothing);
        let dk = ctx.o.from_sources_ix(&ctx.positions_mask([wit.j]), &ctx.nothing);
        audits.push(cheapest_layer(&inp, &format!("R_{name}"), &dr, Direction::From, 0, ctx.eps_n));
        audits.push(cheapest_layer(&inp, &format!("K_{name}"), &dk, Direction::From, 1, ctx.eps_n));
        witness = Some(wit);
        Branch::Close
    };
    let removed: BTreeSet<VertexId> = audits.iter().flat_map(|a| a.members.iter().copied()).collect();
    let ports = bp.port_ids();
    if removed.iter().any(|v| ports.contains(v)) {
        violations.push("a port was selected".into());
    }
    if removed.iter().any(|v| !g.contains_vertex(*v)) {
        violations.push("removed set leaves the input graph".into());
    }
    match &witness {
        None => violations.extend(far_violations(&ctx, &removed)),
        Some(wit) => violations.extend(close_violations(&ctx, &removed, wit)),
    }
    Ok(SeparatorPlan {
        branch,
        removed,
        audits,
        reach,
        n: scaling.n,
        eps_n: scaling.eps_n,
        tau_distance,
        kappa_distance,
        witness,
        violations,
    })
}

fn close_witness(
    ctx: &Ctx,
    family: &'static str,
    from: PortKind,
    to: PortKind,
    minus: &BTreeSet<usize>,
    plus: &BTreeSet<usize>,
) -> Result<CloseWitness> {
    let g = ctx.g;
    let cyc = ctx.bp.cycle.vertices();
    let pos_of = |ix: usize| ctx.bp.cycle.position(g.id(ix)).unwrap();
    let fail = |what: &str| Error::Internal(format!("no {what} witness within eps N for the {family} sets"));

    let (w3, p3) = ctx
        .o
        .shortest_path_ix(&ctx.positions_mask(minus.iter().copied()), &ctx.positions_mask(plus.iter().copied()), &ctx.nothing)
        .ok_or_else(|| fail("P3"))?;
    if w3 > ctx.eps_n {
        return Err(fail("P3"));
    }
    let (i, j) = (pos_of(p3[0]), pos_of(*p3.last().unwrap()));

    let (w1, mut p1) = ctx
        .o
        .shortest_path_ix(&ctx.port_mask(from, |_| true), &ctx.port_mask(to, |p| p == i), &ctx.on_cycle)
        .ok_or_else(|| fail("P1"))?;
    if w1 >= ctx.eps_n {
        return Err(fail("P1"));
    }
    let a = ctx.position_of_port(p1[0]);
    p1.push(g.ix(cyc[i]).unwrap());

    let (w2, mut p2) = ctx
        .o
        .shortest_path_ix(&ctx.port_mask(from, |p| p == j), &ctx.port_mask(to, |_| true), &ctx.on_cycle)
        .ok_or_else(|| fail("P2"))?;
    if w2 >= ctx.eps_n {
        return Err(fail("P2"));
    }
    let b = ctx.position_of_port(*p2.last().unwrap());
    p2.push(g.ix(cyc[b]).unwrap());

    let ids = |p: Vec<usize>| p.into_iter().map(|k| g.id(k)).collect();
    Ok(CloseWitness { family, i, j, a, b, p1: ids(p1), p2: ids(p2), p3: ids(p3), weights: [w1, w2, w3] })
}

fn residual_components(ctx: &Ctx, removed: &BTreeSet<VertexId>) -> Vec<Vec<usize>> {
    let alive: Vec<bool> = ctx.g.vertices().map(|v| !removed.contains(&v)).collect();
    nontrivial_scc_indices(ctx.g, &alive)
}

/// Vertices reachable from `start` inside `allowed`, following arcs forward,
/// or both ways when `undirected`.
fn reach(g: &EmbeddedDigraph, start: &[bool], allowed: &[bool], undirected: bool) -> Vec<bool> {
    let mut seen = vec![false; g.n()];
    let mut queue = VecDeque::new();
    for i in 0..g.n() {
        if start[i] && allowed[i] {
            seen[i] = true;
            queue.push_back(i);
        }
    }
    while let Some(u) = queue.pop_front() {
        let fwd = g.out_arcs(u).iter().map(|&k| g.arc_rec(k).head);
        let next: Vec<usize> = if undirected {
            fwd.chain(g.in_arcs(u).iter().map(|&k| g.arc_rec(k).tail)).collect()
        } else {
            fwd.collect()
        };
        for z in next {
            if allowed[z] && !seen[z] {
                seen[z] = true;
                queue.push_back(z);
            }
        }
    }
    seen
}

fn far_violations(ctx: &Ctx, removed: &BTreeSet<VertexId>) -> Vec<String> {
    let g = ctx.g;
    let mut out = Vec::new();
    let all = |k: PortKind| ctx.port_mask(k, |_| true);
    let (u, w, b, d) = (all(PortKind::U), all(PortKind::W), all(PortKind::B), all(PortKind::D));
    for comp in residual_components(ctx, removed) {
        let mut allowed = vec![false; g.n()];
        for &i in &comp {
            allowed[i] = !ctx.on_cycle[i];
        }
        let hits = |r: &[bool], t: &[bool]| (0..g.n()).any(|i| r[i] && t[i]);
        let first = g.id(comp[0]);
        if hits(&reach(g, &u, &allowed, false), &w) {
            out.push(format!("component of {first} has a U->W path avoiding the cycle"));
        }
        if hits(&reach(g, &d, &allowed, false), &b) {
            out.push(format!("component of {first} has a D->B path avoiding the cycle"));
        }
        let wd: Vec<bool> = (0..g.n()).map(|i| w[i] || d[i]).collect();
        let ub: Vec<bool> = (0..g.n()).map(|i| u[i] || b[i]).collect();
        if hits(&reach(g, &wd, &allowed, true), &ub) {
            out.push(format!("component of {first} joins W+D to U+B without the cycle"));
        }
    }
    out
}

fn close_violations(ctx: &Ctx, removed: &BTreeSet<VertexId>, wit: &CloseWitness) -> Vec<String> {
    let g = ctx.g;
    let region = |path: &[VertexId], seg: Vec<usize>| -> Vec<bool> {
        let mut m = ctx.positions_mask(seg);
        for v in path {
            m[g.ix(*v).unwrap()] = true;
        }
        m
    };
    let a1 = region(&wit.p1, ctx.segment(wit.a, wit.i));
    let a2 = region(&wit.p2, ctx.segment(wit.j, wit.b));
    let vj = g.ix(ctx.bp.cycle.vertices()[wit.j]).unwrap();
    let mut out = Vec::new();
    for comp in residual_components(ctx, removed) {
        let first = g.id(comp[0]);
        if comp.contains(&vj) {
            out.push(format!("v_j = {} still lies on a dicycle", g.id(vj)));
        }
        if comp.iter().any(|&k| a1[k]) && comp.iter().any(|&k| a2[k]) {
            out.push(format!("component of {first} meets both sides of the close decomposition"));
        }
    }
    out
}
