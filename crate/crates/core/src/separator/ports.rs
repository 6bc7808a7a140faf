use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::cost::Cost;
use crate::embedded::{classify_sides, cycle_arc_indices, ArcId, Dart, DiCycle, EmbeddedDigraph, Side, VertexId};
use crate::error::Result;

/// Side and direction of a subdivided boundary arc, seen from the cycle.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum PortKind {
    /// leaves the cycle on the left
    U,
    /// enters the cycle from the right
    W,
    /// enters the cycle from the left
    B,
    /// leaves the cycle on the right
    D,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Port {
    pub id: VertexId,
    pub kind: PortKind,
    /// Index of the cycle vertex the port hangs off, in cycle order.
    pub position: usize,
    pub arc: ArcId,
}

/// A map with every non-cycle arc at the cycle subdivided by an
/// infinite-cost port vertex next to the cycle.
#[derive(Clone, Debug)]
pub struct BoundaryPorts {
    pub cycle: DiCycle,
    pub graph: EmbeddedDigraph,
    pub ports: Vec<Port>,
}

impl BoundaryPorts {
    pub fn of_kind(&self, kind: PortKind) -> impl Iterator<Item = &Port> + '_ {
        self.ports.iter().filter(move |p| p.kind == kind)
    }

    pub fn count(&self, kind: PortKind) -> usize {
        self.of_kind(kind).count()
    }

    pub fn port_ids(&self) -> BTreeSet<VertexId> {
        self.ports.iter().map(|p| p.id).collect()
    }
}

pub fn build_ports(g: &EmbeddedDigraph, c1: &DiCycle) -> Result<BoundaryPorts> {
    let sides = classify_sides(g, c1)?;
    let cycle_arcs: BTreeSet<ArcId> = cycle_arc_indices(g, c1)?.into_iter().map(|k| g.arc_rec(k).id).collect();
    let position: BTreeMap<VertexId, usize> = c1.vertices().iter().enumerate().map(|(i, v)| (*v, i)).collect();

    let mut next_vertex = g.max_vertex_id().map_or(0, |v| v.0 + 1);
    let mut next_arc = g.max_arc_id().map_or(0, |a| a.0 + 1);
    let mut b = EmbeddedDigraph::builder();
    for v in g.vertices() {
        b.add_vertex(v, g.cost(v).unwrap().clone());
    }
    // dart at an original vertex -> replacement dart
    let mut replace: BTreeMap<Dart, Dart> = BTreeMap::new();
    let mut port_rot: Vec<(VertexId, Vec<Dart>)> = Vec::new();
    let mut ports = Vec::new();

    for (arc, tail, head) in g.arcs() {
        let tail_on = position.contains_key(&tail) && !cycle_arcs.contains(&arc);
        let head_on = position.contains_key(&head) && !cycle_arcs.contains(&arc);
        if !tail_on && !head_on {
            b.add_arc(arc, tail, head);
            continue;
        }
        let mut chain = vec![tail];
        if tail_on {
            let p = VertexId(next_vertex);
            next_vertex += 1;
            let kind = match sides[&Dart::tail(arc)] {
                Side::Left => PortKind::U,
                Side::Right => PortKind::D,
            };
            ports.push(Port { id: p, kind, position: position[&tail], arc });
            chain.push(p);
        }
        if head_on {
            let p = VertexId(next_vertex);
            next_vertex += 1;
            let kind = match sides[&Dart::head(arc)] {
                Side::Right => PortKind::W,
                Side::Left => PortKind::B,
            };
            ports.push(Port { id: p, kind, position: position[&head], arc });
            chain.push(p);
        }
        chain.push(head);
        let mut links = Vec::new();
        for w in chain.windows(2) {
            let id = ArcId(next_arc);
            next_arc += 1;
            b.add_arc(id, w[0], w[1]);
            links.push(id);
        }
        replace.insert(Dart::tail(arc), Dart::tail(links[0]));
        replace.insert(Dart::head(arc), Dart::head(*links.last().unwrap()));
        for (k, &p) in chain[1..chain.len() - 1].iter().enumerate() {
            port_rot.push((p, vec![Dart::head(links[k]), Dart::tail(links[k + 1])]));
        }
    }
    for p in &ports {
        b.add_vertex(p.id, Cost::Infinite);
    }
    for v in g.vertices() {
        let rot = g.rotation(v).unwrap().into_iter().map(|d| replace.get(&d).copied().unwrap_or(d)).collect();
        b.set_rotation(v, rot);
    }
    for (p, rot) in port_rot {
        b.set_rotation(p, rot);
    }
    Ok(BoundaryPorts { cycle: c1.clone(), graph: b.build()?, ports })
}

/// Cycle positions with a short port-to-port connection avoiding the cycle.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ReachSets {
    pub tau_minus: BTreeSet<usize>,
    pub tau_plus: BTreeSet<usize>,
    pub kappa_minus: BTreeSet<usize>,
    pub kappa_plus: BTreeSet<usize>,
}

/// `(into, out_of)`: positions of `to` ports reached from some `from` port,
/// and positions of `from` ports reaching some `to` port, both with
/// distance `< eps_n` in the graph minus the cycle.
pub(crate) fn reach_pair(
    o: &crate::lp::WeightedDistanceOracle,
    bp: &BoundaryPorts,
    from: PortKind,
    to: PortKind,
    eps_n: u128,
) -> (BTreeSet<usize>, BTreeSet<usize>) {
    let g = &bp.graph;
    let cyc = bp.cycle.vertex_set();
    let forbidden: Vec<bool> = g.vertices().map(|v| cyc.contains(&v)).collect();
    let mask = |kind: PortKind| -> Vec<bool> {
        let ids: BTreeSet<VertexId> = bp.of_kind(kind).map(|p| p.id).collect();
        g.vertices().map(|v| ids.contains(&v)).collect()
    };
    let d_from = o.from_sources_ix(&mask(from), &forbidden);
    let d_to = o.to_targets_ix(&mask(to), &forbidden);
    let near = |d: Option<u128>| d.is_some_and(|d| d < eps_n);
    let into = bp.of_kind(to).filter(|p| near(d_from[g.ix(p.id).unwrap()])).map(|p| p.position).collect();
    let out_of = bp.of_kind(from).filter(|p| near(d_to[g.ix(p.id).unwrap()])).map(|p| p.position).collect();
    (into, out_of)
}

pub fn port_reach_sets(bp: &BoundaryPorts, w: &BTreeMap<VertexId, u128>, eps_n: u128) -> ReachSets {
    let o = crate::lp::WeightedDistanceOracle::new(&bp.graph, w);
    let (tau_minus, tau_plus) = reach_pair(&o, bp, PortKind::U, PortKind::W, eps_n);
    let (kappa_minus, kappa_plus) = reach_pair(&o, bp, PortKind::D, PortKind::B, eps_n);
    ReachSets { tau_minus, tau_plus, kappa_minus, kappa_plus }
}
