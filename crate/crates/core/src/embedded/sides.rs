use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::{Dart, DiCycle, EmbeddedDigraph};
use crate::error::{Error, Result};

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn flipped(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

/// Checks that `c` is a simple dicycle of `g` and returns its arcs as
/// internal indices.
pub(crate) fn cycle_arc_indices(g: &EmbeddedDigraph, c: &DiCycle) -> Result<Vec<usize>> {
    let len = c.len();
    let distinct: BTreeSet<_> = c.vertices().iter().collect();
    if distinct.len() != len {
        return Err(Error::NotACycle(format!("{c} repeats a vertex")));
    }
    let mut out = Vec::with_capacity(len);
    for i in 0..len {
        let (from, to) = (c.vertices()[i], c.vertices()[(i + 1) % len]);
        let arc = c.arcs()[i];
        let k = g
            .arc_ix(arc)
            .ok_or_else(|| Error::NotACycle(format!("{c}: arc {arc} not in the map")))?;
        let rec = g.arc_rec(k);
        if g.id(rec.tail) != from || g.id(rec.head) != to {
            return Err(Error::NotACycle(format!("{c}: arc {arc} does not run {from} -> {to}")));
        }
        out.push(k);
    }
    Ok(out)
}

/// Splits the non-cycle darts at the vertices of `c` into the two sides of
/// the cycle. At `v_i`, with incoming cycle dart `in` and outgoing cycle
/// dart `out`, the darts met when turning from `in` to `out` in rotation
/// order are LEFT and the rest are RIGHT. Because every vertex uses the same
/// rule, the classification is consistent along the cycle.
pub fn classify_sides(g: &EmbeddedDigraph, c: &DiCycle) -> Result<BTreeMap<Dart, Side>> {
    let arcs = cycle_arc_indices(g, c)?;
    let len = arcs.len();
    let mut out = BTreeMap::new();
    for i in 0..len {
        let in_dart = 2 * arcs[(i + len - 1) % len] + 1;
        let out_dart = 2 * arcs[i];
        let rot = g.rot(g.dart_vertex(out_dart));
        let start = g.dart_position(in_dart);
        let mut side = Side::Left;
        for step in 1..rot.len() {
            let d = rot[(start + step) % rot.len()];
            if d == out_dart {
                side = Side::Right;
                continue;
            }
            out.insert(g.dart(d), side);
        }
    }
    Ok(out)
}
