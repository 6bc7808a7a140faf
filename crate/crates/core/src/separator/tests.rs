use std::collections::{BTreeMap, BTreeSet};

use super::*;
use crate::cost::Cost;
use crate::embedded::fixtures::*;
use crate::embedded::{scc, Dart};
use crate::lp::solve_lp;
use crate::rational::int;

fn cycle_of(g: &EmbeddedDigraph, vs: &[u32]) -> DiCycle {
    let n = vs.len();
    let arcs = (0..n)
        .map(|i| g.arcs().find(|&(_, t, h)| t == v(vs[i]) && h == v(vs[(i + 1) % n])).unwrap().0)
        .collect();
    DiCycle::new(vs.iter().map(|&i| v(i)).collect(), arcs)
}

fn eps() -> BigRational {
    ratio(1, 12)
}

#[test]
fn heavy_rounding_of_acyclic_graph_is_empty() {
    let mut b = EmbeddedDigraph::builder();
    b.add_vertex(v(0), Cost::unit()).add_vertex(v(1), Cost::unit()).add_arc(a(0), v(0), v(1));
    let r = round_heavy(&b.build().unwrap(), &default_heavy_threshold(), &LpConfig::default()).unwrap();
    assert!(r.f.is_empty() && r.solution.is_none() && r.rounds.is_empty());
}

#[test]
fn heavy_rounding_of_triangle_clears_it() {
    let r = round_heavy(&directed_cycle(3), &default_heavy_threshold(), &LpConfig::default()).unwrap();
    assert!(!r.f.is_empty());
    assert!(r.residual.is_empty() && r.solution.is_none());
    assert!(r.audit().is_empty());
}

#[test]
fn heavy_rounding_audit_on_torus() {
    let g = torus_grid(3);
    let r = round_heavy(&g, &default_heavy_threshold(), &LpConfig::default()).unwrap();
    assert_eq!(r.root_lp, solve_lp(&g, &LpConfig::default()).unwrap().objective);
    assert!(r.audit().is_empty(), "{:?}", r.audit());
    assert!(r.cost() <= &r.root_lp * int(24));
    if let Some(sol) = &r.solution {
        assert!(sol.x.values().all(|x| x < &default_heavy_threshold()));
    }
    // F is exactly the union of the rounds
    let added: BTreeSet<VertexId> = r.rounds.iter().flat_map(|k| k.added.iter().copied()).collect();
    assert_eq!(added, r.f);
}

#[test]
fn tight_cycle_of_triangle_and_acyclic() {
    let g = directed_cycle(3);
    let sol = solve_lp(&g, &LpConfig::default()).unwrap();
    assert_eq!(tight_cycle(&sol), Some(cycle_of(&g, &[0, 1, 2])));
    let mut b = EmbeddedDigraph::builder();
    b.add_vertex(v(0), Cost::unit());
    let sol = solve_lp(&b.build().unwrap(), &LpConfig::default()).unwrap();
    assert_eq!(tight_cycle(&sol), None);
}

#[test]
fn tight_cycle_on_torus_sums_to_one() {
    let g = torus_grid(3);
    let sol = solve_lp(&g, &LpConfig::default()).unwrap();
    let c = tight_cycle(&sol).unwrap();
    assert_eq!(sol.cycle_value(&c), int(1));
    assert!(sol.active_cycles.contains(&c));
    assert!(sol.binding_cycles().iter().all(|d| d.len() >= c.len()));
}

#[test]
fn lone_triangle_is_far_with_nothing_removed() {
    let g = directed_cycle(3);
    let sol = solve_lp(&g, &LpConfig::default()).unwrap();
    let bp = build_ports(&g, &cycle_of(&g, &[0, 1, 2])).unwrap();
    assert!(bp.ports.is_empty());
    let p = plan(&g, &sol, &bp, &eps()).unwrap();
    assert_eq!(p.branch, Branch::Far);
    assert!(p.removed.is_empty());
    assert_eq!(p.reach, ReachSets::default());
    assert_eq!(p.audits.len(), 6);
    assert!(p.audits_pass() && p.violations.is_empty());
}

/// All-pairs path weights by Floyd-Warshall over `allowed` vertices.
fn all_pairs(g: &EmbeddedDigraph, w: &BTreeMap<VertexId, u128>, allowed: &BTreeSet<VertexId>) -> BTreeMap<(VertexId, VertexId), u128> {
    let vs: Vec<VertexId> = g.vertices().filter(|x| allowed.contains(x)).collect();
    let mut d: BTreeMap<(VertexId, VertexId), u128> = BTreeMap::new();
    for &x in &vs {
        d.insert((x, x), 0);
    }
    for (_, t, h) in g.arcs() {
        if allowed.contains(&t) && allowed.contains(&h) && t != h {
            let c = w.get(&t).copied().unwrap_or(0);
            let e = d.entry((t, h)).or_insert(c);
            *e = (*e).min(c);
        }
    }
    for &k in &vs {
        for &x in &vs {
            for &y in &vs {
                if let (Some(&a), Some(&b)) = (d.get(&(x, k)), d.get(&(k, y))) {
                    let e = d.entry((x, y)).or_insert(a + b);
                    *e = (*e).min(a + b);
                }
            }
        }
    }
    d
}

fn brute_reach(bp: &BoundaryPorts, w: &BTreeMap<VertexId, u128>, eps_n: u128) -> ReachSets {
    let allowed: BTreeSet<VertexId> = bp.graph.vertices().filter(|x| !bp.cycle.contains(*x)).collect();
    let d = all_pairs(&bp.graph, w, &allowed);
    let mut r = ReachSets::default();
    for p in &bp.ports {
        for q in &bp.ports {
            if d.get(&(p.id, q.id)).is_some_and(|&x| x < eps_n) {
                match (p.kind, q.kind) {
                    (PortKind::U, PortKind::W) => {
                        r.tau_plus.insert(p.position);
                        r.tau_minus.insert(q.position);
                    }
                    (PortKind::D, PortKind::B) => {
                        r.kappa_plus.insert(p.position);
                        r.kappa_minus.insert(q.position);
                    }
                    _ => {}
                }
            }
        }
    }
    r
}

#[test]
fn reach_sets_match_floyd_warshall_on_torus() {
    let g = torus_grid(3);
    let sol = solve_lp(&g, &LpConfig::default()).unwrap();
    let s = crate::lp::scale_and_weigh(&sol, &eps()).unwrap();
    for rows in [[0u32, 1, 2], [0, 3, 6]] {
        let bp = build_ports(&g, &cycle_of(&g, &rows)).unwrap();
        for eps_n in [0, 1, s.eps_n, s.n, 10 * s.n] {
            assert_eq!(port_reach_sets(&bp, &s.w, eps_n), brute_reach(&bp, &s.w, eps_n));
        }
    }
}

#[test]
fn torus_plan_audits_hold() {
    let g = torus_grid(4);
    let sol = solve_lp(&g, &LpConfig::default()).unwrap();
    let c = tight_cycle(&sol).unwrap();
    let bp = build_ports(&g, &c).unwrap();
    let p = plan(&g, &sol, &bp, &eps()).unwrap();
    assert!(p.audits_pass());
    assert!(p.removed.iter().all(|v| g.contains_vertex(*v)));
    for au in &p.audits {
        assert!(au.layer_count() >= p.eps_n);
    }
}

/// 12-cycle with a chord 0 -> 2 leaving on the left and entering on the
/// right; vertex 0 is the only cheap vertex so the LP puts all weight there.
fn chorded_twelve() -> EmbeddedDigraph {
    let mut b = EmbeddedDigraph::builder();
    for i in 0..12 {
        b.add_vertex(v(i), Cost::from_int(if i == 0 { 1 } else { 2 }));
    }
    for i in 0..12 {
        b.add_arc(a(i), v(i), v((i + 1) % 12));
    }
    b.add_arc(a(12), v(0), v(2));
    b.set_rotation(v(0), vec![Dart::head(a(11)), Dart::tail(a(12)), Dart::tail(a(0))]);
    b.set_rotation(v(2), vec![Dart::head(a(1)), Dart::tail(a(2)), Dart::head(a(12))]);
    b.build().unwrap()
}

#[test]
fn chorded_cycle_goes_close() {
    let g = chorded_twelve();
    let sol = solve_lp(&g, &LpConfig::default()).unwrap();
    assert_eq!(sol.objective, int(1));
    assert_eq!(sol.value(v(0)), int(1));
    let c1 = cycle_of(&g, &(0..12).collect::<Vec<_>>());
    let bp = build_ports(&g, &c1).unwrap();
    assert_eq!((bp.count(PortKind::U), bp.count(PortKind::W)), (1, 1));
    let p = plan(&g, &sol, &bp, &eps()).unwrap();
    assert_eq!(p.branch, Branch::Close);
    assert_eq!(p.reach.tau_plus, [0].into_iter().collect());
    assert_eq!(p.reach.tau_minus, [2].into_iter().collect());
    let wit = p.witness.as_ref().unwrap();
    assert_eq!((wit.i, wit.j, wit.a, wit.b), (2, 0, 0, 2));
    assert!(wit.weights.iter().all(|&x| x <= p.eps_n));
    assert!(p.audits_pass() && p.violations.is_empty(), "{:?}", p.violations);
    // audited bound: R' and K'+ each at most OPT / eps
    let cost = g.total_cost(&p.removed);
    assert!(cost.as_finite().unwrap() <= &(int(24) * &sol.objective));
    // brute force: no dicycle survives through v_j, and no SCC meets both regions
    let rest = g.without(&p.removed);
    for comp in scc(&rest).into_iter().filter(|k| k.len() > 1) {
        assert!(!comp.contains(&v(0)));
    }
}

#[test]
fn layer_totals_match_direct_counting() {
    let g = torus_grid(4);
    let sol = solve_lp(&g, &LpConfig::default()).unwrap();
    let s = crate::lp::scale_and_weigh(&sol, &eps()).unwrap();
    // each vertex lies in at most w_v layers, so a family sums to at most sum c_v w_v
    let bound: BigRational = g
        .vertices()
        .map(|x| g.cost(x).unwrap().as_finite().unwrap() * BigRational::from_integer(s.w[&x].into()))
        .sum();
    assert_eq!(bound, BigRational::from_integer(s.n.into()) * &sol.objective);
    let c = tight_cycle(&sol).unwrap();
    let p = plan(&g, &sol, &build_ports(&g, &c).unwrap(), &eps()).unwrap();
    for au in &p.audits {
        assert!(au.total <= bound);
    }
}
