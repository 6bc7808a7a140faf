//! Digraphs embedded on orientable surfaces, stored as combinatorial maps.
//!
//! Every arc contributes two darts: the tail-dart sits in the rotation of
//! the arc's tail, the head-dart in the rotation of its head. The rotation of
//! a vertex is the cyclic order of its darts and is taken verbatim from the
//! input. Faces are the orbits of `d -> succ(rev(d))`.
//!
//! Vertices and arcs are kept sorted by id, so internal indices order the
//! same way as the public ids.

mod emd;
mod faces;
mod scc;
mod sides;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::Serialize;

use crate::cost::Cost;
use crate::error::{Error, Result};

pub use emd::{parse_emd, read_emd, write_emd};
pub use faces::{face_minimal_dicycles, face_minimal_faces, genus, trace_faces};
pub use scc::{residual_graph, scc};
pub use sides::{classify_sides, Side};

pub(crate) use faces::has_face_minimal_dicycle;
pub(crate) use scc::nontrivial_scc_indices;
pub(crate) use sides::cycle_arc_indices;

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct VertexId(pub u32);

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct ArcId(pub u32);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for ArcId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum End {
    Tail,
    Head,
}

/// One side of an arc record, located at the arc's tail or head.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Dart {
    pub arc: ArcId,
    pub end: End,
}

impl Dart {
    pub fn tail(arc: ArcId) -> Self {
        Dart { arc, end: End::Tail }
    }

    pub fn head(arc: ArcId) -> Self {
        Dart { arc, end: End::Head }
    }

    pub fn reversed(self) -> Self {
        let end = match self.end {
            End::Tail => End::Head,
            End::Head => End::Tail,
        };
        Dart { arc: self.arc, end }
    }
}

impl fmt::Display for Dart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.end {
            End::Tail => write!(f, "+{}", self.arc),
            End::Head => write!(f, "-{}", self.arc),
        }
    }
}

impl Serialize for Dart {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// A simple directed cycle, rotated so that its smallest vertex comes first.
/// `arcs[i]` runs from `vertices[i]` to `vertices[i + 1]` (cyclically).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct DiCycle {
    vertices: Vec<VertexId>,
    arcs: Vec<ArcId>,
}

impl DiCycle {
    /// Builds a cycle from parallel vertex/arc sequences, rotating it into
    /// canonical position. Panics on length mismatch or empty input.
    pub fn new(mut vertices: Vec<VertexId>, mut arcs: Vec<ArcId>) -> Self {
        assert!(!vertices.is_empty() && vertices.len() == arcs.len());
        let start = (0..vertices.len()).min_by_key(|&i| vertices[i]).unwrap();
        vertices.rotate_left(start);
        arcs.rotate_left(start);
        DiCycle { vertices, arcs }
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn arcs(&self) -> &[ArcId] {
        &self.arcs
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.vertices.contains(&v)
    }

    pub fn position(&self, v: VertexId) -> Option<usize> {
        self.vertices.iter().position(|&u| u == v)
    }

    pub fn vertex_set(&self) -> BTreeSet<VertexId> {
        self.vertices.iter().copied().collect()
    }
}

impl fmt::Display for DiCycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, v) in self.vertices.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str(")")
    }
}

/// Dart sequence of one face, in tracing order. Isolated vertices give an
/// empty walk.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaceWalk {
    pub darts: Vec<Dart>,
}

#[derive(Clone, Debug)]
pub(crate) struct ArcRec {
    pub id: ArcId,
    pub tail: usize,
    pub head: usize,
}

/// Immutable rotation-system digraph with vertex costs.
#[derive(Clone, Debug)]
pub struct EmbeddedDigraph {
    ids: Vec<VertexId>,
    costs: Vec<Cost>,
    arcs: Vec<ArcRec>,
    rotation: Vec<Vec<usize>>,
    dart_pos: Vec<usize>,
    out_arcs: Vec<Vec<usize>>,
    in_arcs: Vec<Vec<usize>>,
    vindex: HashMap<VertexId, usize>,
    aindex: HashMap<ArcId, usize>,
}

impl PartialEq for EmbeddedDigraph {
    fn eq(&self, other: &Self) -> bool {
        self.ids == other.ids
            && self.costs == other.costs
            && self.arcs.len() == other.arcs.len()
            && self
                .arcs
                .iter()
                .zip(&other.arcs)
                .all(|(a, b)| a.id == b.id && a.tail == b.tail && a.head == b.head)
            && self.rotation == other.rotation
    }
}

impl Eq for EmbeddedDigraph {}

impl EmbeddedDigraph {
    pub fn builder() -> EmbeddedDigraphBuilder {
        EmbeddedDigraphBuilder::default()
    }

    pub fn empty() -> Self {
        EmbeddedDigraphBuilder::default().build().expect("empty map is valid")
    }

    pub fn vertex_count(&self) -> usize {
        self.ids.len()
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.ids.iter().copied()
    }

    pub fn vertex_set(&self) -> BTreeSet<VertexId> {
        self.ids.iter().copied().collect()
    }

    pub fn contains_vertex(&self, v: VertexId) -> bool {
        self.vindex.contains_key(&v)
    }

    pub fn cost(&self, v: VertexId) -> Option<&Cost> {
        self.vindex.get(&v).map(|&i| &self.costs[i])
    }

    pub fn total_cost<'a>(&self, set: impl IntoIterator<Item = &'a VertexId>) -> Cost {
        set.into_iter()
            .map(|v| self.cost(*v).cloned().unwrap_or(Cost::Infinite))
            .sum()
    }

    /// `(id, tail, head)` for every arc, ordered by id.
    pub fn arcs(&self) -> impl Iterator<Item = (ArcId, VertexId, VertexId)> + '_ {
        self.arcs.iter().map(|a| (a.id, self.ids[a.tail], self.ids[a.head]))
    }

    pub fn arc(&self, id: ArcId) -> Option<(VertexId, VertexId)> {
        self.aindex
            .get(&id)
            .map(|&a| (self.ids[self.arcs[a].tail], self.ids[self.arcs[a].head]))
    }

    pub fn rotation(&self, v: VertexId) -> Option<Vec<Dart>> {
        self.vindex
            .get(&v)
            .map(|&i| self.rotation[i].iter().map(|&d| self.dart(d)).collect())
    }

    /// The vertex a dart sits at.
    pub fn dart_vertex_of(&self, d: Dart) -> Option<VertexId> {
        self.dart_index(d).map(|i| self.ids[self.dart_vertex(i)])
    }

    pub fn max_vertex_id(&self) -> Option<VertexId> {
        self.ids.last().copied()
    }

    pub fn max_arc_id(&self) -> Option<ArcId> {
        self.arcs.last().map(|a| a.id)
    }

    /// Sub-map induced by `keep`; rotations are restricted, ids preserved.
    pub fn induced(&self, keep: &BTreeSet<VertexId>) -> EmbeddedDigraph {
        let mask: Vec<bool> = self.ids.iter().map(|v| keep.contains(v)).collect();
        self.induced_mask(&mask)
    }

    pub fn without(&self, removed: &BTreeSet<VertexId>) -> EmbeddedDigraph {
        let mask: Vec<bool> = self.ids.iter().map(|v| !removed.contains(v)).collect();
        self.induced_mask(&mask)
    }

    /// Same map with every rotation reversed (mirror image embedding).
    pub fn mirrored(&self) -> EmbeddedDigraph {
        let mut g = self.clone();
        for r in &mut g.rotation {
            r.reverse();
        }
        g.rebuild_positions();
        g
    }

    pub fn with_cost(&self, v: VertexId, cost: Cost) -> EmbeddedDigraph {
        let mut g = self.clone();
        if let Some(&i) = g.vindex.get(&v) {
            g.costs[i] = cost;
        }
        g
    }

    pub fn to_builder(&self) -> EmbeddedDigraphBuilder {
        let mut b = EmbeddedDigraphBuilder::default();
        for (i, &v) in self.ids.iter().enumerate() {
            b.add_vertex(v, self.costs[i].clone());
        }
        for a in &self.arcs {
            b.add_arc(a.id, self.ids[a.tail], self.ids[a.head]);
        }
        for (i, &v) in self.ids.iter().enumerate() {
            b.set_rotation(v, self.rotation[i].iter().map(|&d| self.dart(d)).collect());
        }
        b
    }

    // ---- index-level access used by the algorithms ----

    pub(crate) fn n(&self) -> usize {
        self.ids.len()
    }

    pub(crate) fn id(&self, i: usize) -> VertexId {
        self.ids[i]
    }

    pub(crate) fn ix(&self, v: VertexId) -> Option<usize> {
        self.vindex.get(&v).copied()
    }

    pub(crate) fn cost_ix(&self, i: usize) -> &Cost {
        &self.costs[i]
    }

    pub(crate) fn arc_rec(&self, a: usize) -> &ArcRec {
        &self.arcs[a]
    }

    pub(crate) fn arc_ix(&self, id: ArcId) -> Option<usize> {
        self.aindex.get(&id).copied()
    }

    pub(crate) fn out_arcs(&self, i: usize) -> &[usize] {
        &self.out_arcs[i]
    }

    pub(crate) fn in_arcs(&self, i: usize) -> &[usize] {
        &self.in_arcs[i]
    }

    pub(crate) fn rot(&self, i: usize) -> &[usize] {
        &self.rotation[i]
    }

    pub(crate) fn dart_total(&self) -> usize {
        2 * self.arcs.len()
    }

    pub(crate) fn dart_vertex(&self, d: usize) -> usize {
        let a = &self.arcs[d / 2];
        if d % 2 == 0 {
            a.tail
        } else {
            a.head
        }
    }

    pub(crate) fn dart(&self, d: usize) -> Dart {
        let arc = self.arcs[d / 2].id;
        if d % 2 == 0 {
            Dart::tail(arc)
        } else {
            Dart::head(arc)
        }
    }

    pub(crate) fn dart_index(&self, d: Dart) -> Option<usize> {
        let a = self.arc_ix(d.arc)?;
        Some(2 * a + usize::from(d.end == End::Head))
    }

    pub(crate) fn dart_position(&self, d: usize) -> usize {
        self.dart_pos[d]
    }

    /// Rotation successor of dart `d` at its vertex.
    pub(crate) fn succ(&self, d: usize) -> usize {
        let v = self.dart_vertex(d);
        let r = &self.rotation[v];
        r[(self.dart_pos[d] + 1) % r.len()]
    }

    pub(crate) fn induced_mask(&self, keep: &[bool]) -> EmbeddedDigraph {
        let mut b = EmbeddedDigraphBuilder::default();
        for (i, &v) in self.ids.iter().enumerate() {
            if keep[i] {
                b.add_vertex(v, self.costs[i].clone());
            }
        }
        let arc_kept: Vec<bool> = self.arcs.iter().map(|a| keep[a.tail] && keep[a.head]).collect();
        for (k, a) in self.arcs.iter().enumerate() {
            if arc_kept[k] {
                b.add_arc(a.id, self.ids[a.tail], self.ids[a.head]);
            }
        }
        for (i, &v) in self.ids.iter().enumerate() {
            if keep[i] {
                let rot = self.rotation[i]
                    .iter()
                    .filter(|&&d| arc_kept[d / 2])
                    .map(|&d| self.dart(d))
                    .collect();
                b.set_rotation(v, rot);
            }
        }
        b.build().expect("restriction of a valid map is valid")
    }

    fn rebuild_positions(&mut self) {
        for r in &self.rotation {
            for (p, &d) in r.iter().enumerate() {
                self.dart_pos[d] = p;
            }
        }
    }
}

/// Copy-and-edit constructor for [`EmbeddedDigraph`].
#[derive(Clone, Debug, Default)]
pub struct EmbeddedDigraphBuilder {
    vertices: Vec<(VertexId, Cost)>,
    arcs: Vec<(ArcId, VertexId, VertexId)>,
    rotations: BTreeMap<VertexId, Vec<Dart>>,
}

impl EmbeddedDigraphBuilder {
    pub fn add_vertex(&mut self, v: VertexId, cost: Cost) -> &mut Self {
        self.vertices.push((v, cost));
        self
    }

    pub fn add_arc(&mut self, id: ArcId, tail: VertexId, head: VertexId) -> &mut Self {
        self.arcs.push((id, tail, head));
        self
    }

    /// Sets the cyclic dart order at `v`. Vertices left without an explicit
    /// rotation get their darts in arc-id order (tail-dart first for loops).
    pub fn set_rotation(&mut self, v: VertexId, darts: Vec<Dart>) -> &mut Self {
        self.rotations.insert(v, darts);
        self
    }

    pub fn build(&self) -> Result<EmbeddedDigraph> {
        let mut verts = self.vertices.clone();
        verts.sort_by_key(|(v, _)| *v);
        for w in verts.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::InvalidMap(format!("duplicate vertex {}", w[0].0)));
            }
        }
        let ids: Vec<VertexId> = verts.iter().map(|(v, _)| *v).collect();
        let costs: Vec<Cost> = verts.into_iter().map(|(_, c)| c).collect();
        let vindex: HashMap<VertexId, usize> = ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();

        let mut arc_list = self.arcs.clone();
        arc_list.sort_by_key(|(a, _, _)| *a);
        for w in arc_list.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::InvalidMap(format!("duplicate arc {}", w[0].0)));
            }
        }
        let mut arcs = Vec::with_capacity(arc_list.len());
        for &(id, t, h) in &arc_list {
            let tail = *vindex.get(&t).ok_or(Error::UnknownVertex(t))?;
            let head = *vindex.get(&h).ok_or(Error::UnknownVertex(h))?;
            arcs.push(ArcRec { id, tail, head });
        }
        let aindex: HashMap<ArcId, usize> = arcs.iter().enumerate().map(|(k, a)| (a.id, k)).collect();

        let n = ids.len();
        let mut out_arcs = vec![Vec::new(); n];
        let mut in_arcs = vec![Vec::new(); n];
        let mut incident: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (k, a) in arcs.iter().enumerate() {
            out_arcs[a.tail].push(k);
            in_arcs[a.head].push(k);
            incident[a.tail].push(2 * k);
            incident[a.head].push(2 * k + 1);
        }

        for v in self.rotations.keys() {
            if !vindex.contains_key(v) {
                return Err(Error::UnknownVertex(*v));
            }
        }

        let mut placed = vec![false; 2 * arcs.len()];
        let mut dart_pos = vec![0usize; 2 * arcs.len()];
        let mut rotation = Vec::with_capacity(n);
        for (i, &v) in ids.iter().enumerate() {
            let darts: Vec<usize> = match self.rotations.get(&v) {
                Some(list) => {
                    let mut out = Vec::with_capacity(list.len());
                    for &d in list {
                        let a = *aindex.get(&d.arc).ok_or_else(|| Error::InvalidDart {
                            dart: d,
                            msg: "unknown arc".into(),
                        })?;
                        let di = 2 * a + usize::from(d.end == End::Head);
                        let at = if d.end == End::Tail { arcs[a].tail } else { arcs[a].head };
                        if at != i {
                            return Err(Error::InvalidDart {
                                dart: d,
                                msg: format!("listed at vertex {v} but belongs to vertex {}", ids[at]),
                            });
                        }
                        if placed[di] {
                            return Err(Error::InvalidDart { dart: d, msg: "appears more than once".into() });
                        }
                        placed[di] = true;
                        out.push(di);
                    }
                    if let Some(&missing) = incident[i].iter().find(|&&d| !placed[d]) {
                        let arc = arcs[missing / 2].id;
                        let dart = if missing % 2 == 0 { Dart::tail(arc) } else { Dart::head(arc) };
                        return Err(Error::InvalidDart {
                            dart,
                            msg: format!("missing from the rotation of vertex {v}"),
                        });
                    }
                    out
                }
                None => {
                    for &d in &incident[i] {
                        placed[d] = true;
                    }
                    incident[i].clone()
                }
            };
            for (p, &d) in darts.iter().enumerate() {
                dart_pos[d] = p;
            }
            rotation.push(darts);
        }

        Ok(EmbeddedDigraph { ids, costs, arcs, rotation, dart_pos, out_arcs, in_arcs, vindex, aindex })
    }
}
