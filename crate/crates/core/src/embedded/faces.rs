use std::collections::BTreeSet;

use super::{DiCycle, EmbeddedDigraph, FaceWalk};
use crate::error::{Error, Result};

/// Dart-index orbits of `d -> succ(rev(d))`, plus one empty orbit per
/// isolated vertex (reported with that vertex index).
pub(crate) fn face_orbits(g: &EmbeddedDigraph) -> Vec<(Vec<usize>, Option<usize>)> {
    let mut seen = vec![false; g.dart_total()];
    let mut out = Vec::new();
    // walk vertices in order so orbit order is deterministic
    for i in 0..g.n() {
        if g.rot(i).is_empty() {
            out.push((Vec::new(), Some(i)));
            continue;
        }
        for &start in g.rot(i) {
            if seen[start] {
                continue;
            }
            let mut orbit = Vec::new();
            let mut d = start;
            loop {
                seen[d] = true;
                orbit.push(d);
                d = g.succ(d ^ 1);
                if d == start {
                    break;
                }
            }
            out.push((orbit, None));
        }
    }
    out
}

/// All faces of the embedding. Walk lengths sum to the number of darts.
pub fn trace_faces(g: &EmbeddedDigraph) -> Vec<FaceWalk> {
    face_orbits(g)
        .into_iter()
        .map(|(orbit, _)| FaceWalk { darts: orbit.into_iter().map(|d| g.dart(d)).collect() })
        .collect()
}

/// Sum over connected components of `(2 - V + A - F) / 2`.
pub fn genus(g: &EmbeddedDigraph) -> Result<usize> {
    let n = g.n();
    if n == 0 {
        return Ok(0);
    }
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for k in 0..g.arc_count() {
        let a = g.arc_rec(k);
        let (r1, r2) = (find(&mut parent, a.tail), find(&mut parent, a.head));
        if r1 != r2 {
            parent[r1.max(r2)] = r1.min(r2);
        }
    }
    let mut verts = vec![0i64; n];
    let mut arcs = vec![0i64; n];
    let mut faces = vec![0i64; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        verts[r] += 1;
    }
    for k in 0..g.arc_count() {
        let r = find(&mut parent, g.arc_rec(k).tail);
        arcs[r] += 1;
    }
    for (orbit, isolated) in face_orbits(g) {
        let anchor = match isolated {
            Some(i) => i,
            None => g.dart_vertex(orbit[0]),
        };
        let r = find(&mut parent, anchor);
        faces[r] += 1;
    }
    let mut total = 0usize;
    for r in 0..n {
        if verts[r] == 0 {
            continue;
        }
        let defect = 2 - verts[r] + arcs[r] - faces[r];
        if defect < 0 || defect % 2 != 0 {
            return Err(Error::EulerDefect(g.id(r)));
        }
        total += (defect / 2) as usize;
    }
    Ok(total)
}

/// Interprets a face orbit as a directed cycle: every dart a tail-dart
/// (boundary walked along the arcs) or every dart a head-dart (walked
/// against them), with no repeated vertex.
pub(crate) fn orbit_as_dicycle(g: &EmbeddedDigraph, orbit: &[usize]) -> Option<DiCycle> {
    if orbit.is_empty() {
        return None;
    }
    let forward = orbit.iter().all(|d| d % 2 == 0);
    let backward = orbit.iter().all(|d| d % 2 == 1);
    if !forward && !backward {
        return None;
    }
    let mut seq: Vec<(usize, usize)> = if forward {
        orbit.iter().map(|&d| (g.arc_rec(d / 2).tail, d / 2)).collect()
    } else {
        orbit.iter().rev().map(|&d| (g.arc_rec(d / 2).tail, d / 2)).collect()
    };
    let mut seen = BTreeSet::new();
    if !seq.iter().all(|(v, _)| seen.insert(*v)) {
        return None;
    }
    let vertices = seq.iter().map(|(v, _)| g.id(*v)).collect();
    let arcs = seq.drain(..).map(|(_, a)| g.arc_rec(a).id).collect();
    Some(DiCycle::new(vertices, arcs))
}

/// One entry per face whose boundary is a simple dicycle. A cycle bounding
/// two faces appears twice.
pub fn face_minimal_faces(g: &EmbeddedDigraph) -> Vec<DiCycle> {
    face_orbits(g)
        .iter()
        .filter_map(|(orbit, _)| orbit_as_dicycle(g, orbit))
        .collect()
}

/// Face-bounding simple dicycles, each reported once, sorted.
pub fn face_minimal_dicycles(g: &EmbeddedDigraph) -> Vec<DiCycle> {
    let set: BTreeSet<DiCycle> = face_minimal_faces(g).into_iter().collect();
    set.into_iter().collect()
}

pub(crate) fn has_face_minimal_dicycle(g: &EmbeddedDigraph) -> bool {
    face_orbits(g).iter().any(|(orbit, _)| orbit_as_dicycle(g, orbit).is_some())
}
