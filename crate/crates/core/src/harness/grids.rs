use crate::cost::Cost;
use crate::embedded::{ArcId, Dart, EmbeddedDigraph, VertexId};
use crate::error::{Error, Result};

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum GridOrientation {
    /// Every horizontal arc points right, every vertical arc points down.
    RightDown,
    /// Faces alternate clockwise and counter-clockwise, so every face is a
    /// dicycle. Wrapping needs even side lengths.
    Checkerboard,
}

fn grid_id(cols: u32, r: u32, c: u32) -> VertexId {
    VertexId(r * cols + c)
}

/// Arc leaving cell `(r, c)` to the right (`horizontal`) or downward, and
/// whether it actually points that way.
fn grid_arc(orient: GridOrientation, r: u32, c: u32, horizontal: bool) -> bool {
    match orient {
        GridOrientation::RightDown => true,
        GridOrientation::Checkerboard => {
            let even = (r + c) % 2 == 0;
            if horizontal {
                even
            } else {
                !even
            }
        }
    }
}

/// Shared builder for grids. Horizontal edge of cell `(r, c)` gets arc id
/// `2(r*cols + c)`, the vertical one `2(r*cols + c) + 1`. The rotation at
/// each vertex is west, north, east, south.
fn build_grid(
    rows: u32,
    cols: u32,
    wrap: bool,
    orient: impl Fn(u32, u32, bool) -> bool,
    mut cost: impl FnMut(VertexId) -> Cost,
) -> Result<EmbeddedDigraph> {
    let mut b = EmbeddedDigraph::builder();
    for r in 0..rows {
        for c in 0..cols {
            let v = grid_id(cols, r, c);
            b.add_vertex(v, cost(v));
        }
    }
    let mut rot: Vec<[Option<Dart>; 4]> = vec![[None; 4]; (rows * cols) as usize];
    let edge = |b: &mut crate::embedded::EmbeddedDigraphBuilder,
                    rot: &mut Vec<[Option<Dart>; 4]>,
                    id: ArcId,
                    from: VertexId,
                    to: VertexId,
                    forward: bool,
                    horizontal: bool| {
        let (t, h) = if forward { (from, to) } else { (to, from) };
        b.add_arc(id, t, h);
        // slot at `from` faces east/south, at `to` west/north
        let (from_slot, to_slot) = if horizontal { (2, 0) } else { (3, 1) };
        let (from_dart, to_dart) = if forward {
            (Dart::tail(id), Dart::head(id))
        } else {
            (Dart::head(id), Dart::tail(id))
        };
        rot[from.0 as usize][from_slot] = Some(from_dart);
        rot[to.0 as usize][to_slot] = Some(to_dart);
    };
    for r in 0..rows {
        for c in 0..cols {
            let from = grid_id(cols, r, c);
            let base = 2 * (r * cols + c);
            if wrap || c + 1 < cols {
                let to = grid_id(cols, r, (c + 1) % cols);
                edge(&mut b, &mut rot, ArcId(base), from, to, orient(r, c, true), true);
            }
            if wrap || r + 1 < rows {
                let to = grid_id(cols, (r + 1) % rows, c);
                edge(&mut b, &mut rot, ArcId(base + 1), from, to, orient(r, c, false), false);
            }
        }
    }
    for (i, slots) in rot.iter().enumerate() {
        b.set_rotation(VertexId(i as u32), slots.iter().flatten().copied().collect());
    }
    b.build()
}

/// `rows x cols` grid wrapped into a torus (genus 1).
pub fn toroidal_grid(
    rows: u32,
    cols: u32,
    orientation: GridOrientation,
    cost: impl FnMut(VertexId) -> Cost,
) -> Result<EmbeddedDigraph> {
    if rows < 2 || cols < 2 {
        return Err(Error::InvalidSpec(format!("toroidal grid needs sides >= 2, got {rows}x{cols}")));
    }
    if orientation == GridOrientation::Checkerboard && (rows % 2 != 0 || cols % 2 != 0) {
        return Err(Error::InvalidSpec(format!("checkerboard torus needs even sides, got {rows}x{cols}")));
    }
    build_grid(rows, cols, true, |r, c, h| grid_arc(orientation, r, c, h), cost)
}

/// Plane grid; `forward(r, c, horizontal)` picks each edge's direction.
pub fn planar_grid(
    rows: u32,
    cols: u32,
    forward: impl Fn(u32, u32, bool) -> bool,
    cost: impl FnMut(VertexId) -> Cost,
) -> Result<EmbeddedDigraph> {
    if rows == 0 || cols == 0 {
        return Err(Error::InvalidSpec("empty grid".into()));
    }
    build_grid(rows, cols, false, forward, cost)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedded::{face_minimal_dicycles, genus, trace_faces};

    #[test]
    fn torus_grids_have_genus_one() {
        for n in 2..=6 {
            let g = toroidal_grid(n, n, GridOrientation::RightDown, |_| Cost::unit()).unwrap();
            assert_eq!(genus(&g).unwrap(), 1, "n = {n}");
            assert_eq!(trace_faces(&g).len(), (n * n) as usize);
        }
    }

    #[test]
    fn checkerboard_faces_are_all_dicycles() {
        for n in [2u32, 4, 6] {
            let g = toroidal_grid(n, n, GridOrientation::Checkerboard, |_| Cost::unit()).unwrap();
            assert_eq!(genus(&g).unwrap(), 1);
            assert_eq!(face_minimal_dicycles(&g).len(), (n * n) as usize, "n = {n}");
        }
        assert!(toroidal_grid(3, 3, GridOrientation::Checkerboard, |_| Cost::unit()).is_err());
    }

    #[test]
    fn planar_grid_is_planar() {
        let g = planar_grid(3, 4, |r, c, h| (r + c + u32::from(h)) % 2 == 0, |_| Cost::unit()).unwrap();
        assert_eq!(genus(&g).unwrap(), 0);
        assert_eq!(g.arc_count(), 3 * 3 + 2 * 4);
    }
}
