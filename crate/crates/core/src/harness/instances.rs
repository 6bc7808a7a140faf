use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::grids::{planar_grid, toroidal_grid, GridOrientation};
use crate::cost::Cost;
use crate::embedded::{genus, ArcId, Dart, EmbeddedDigraph, VertexId};
use crate::error::{Error, Result};

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum CostModel {
    Unit,
    /// Uniform integers in `1..=10`.
    UniformInt,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Family {
    ToroidalGrid { n: u32, orientation: GridOrientation },
    /// Directed cycle on the sphere.
    Cycle { n: u32 },
    /// Plane grid with random arc directions, some edges dropped and some
    /// arcs doubled by a reverse twin in the adjacent rotation slot.
    Planar { rows: u32, cols: u32, drop_pct: u32, twin_pct: u32 },
    /// A random plane grid whose rotation is reshuffled at `shuffles`
    /// vertices, resampled until the genus is at most `max_genus`.
    RandomRotation { rows: u32, cols: u32, shuffles: u32, max_genus: usize },
    DisjointUnion { parts: Vec<InstanceSpec> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InstanceSpec {
    pub name: String,
    pub family: Family,
    pub costs: CostModel,
    pub seed: u64,
}

impl InstanceSpec {
    pub fn new(name: impl Into<String>, family: Family, costs: CostModel, seed: u64) -> Self {
        InstanceSpec { name: name.into(), family, costs, seed }
    }

    /// Genus known from the family alone.
    pub fn expected_genus(&self) -> Option<usize> {
        match &self.family {
            Family::ToroidalGrid { .. } => Some(1),
            Family::Cycle { .. } | Family::Planar { .. } => Some(0),
            Family::RandomRotation { .. } => None,
            Family::DisjointUnion { parts } => parts.iter().map(|p| p.expected_genus()).sum(),
        }
    }

    pub fn family_name(&self) -> &'static str {
        match self.family {
            Family::ToroidalGrid { .. } => "toroidal_grid",
            Family::Cycle { .. } => "cycle",
            Family::Planar { .. } => "planar",
            Family::RandomRotation { .. } => "random_rotation",
            Family::DisjointUnion { .. } => "disjoint_union",
        }
    }

    /// Plain `key=value` lines; union parts are prefixed `partK.`.
    pub fn to_manifest(&self) -> String {
        let mut out = Vec::new();
        self.write_keys("", &mut out);
        out.join("\n") + "\n"
    }

    fn write_keys(&self, prefix: &str, out: &mut Vec<String>) {
        let mut kv = |k: &str, v: String| out.push(format!("{prefix}{k}={v}"));
        kv("name", self.name.clone());
        kv("family", self.family_name().into());
        kv("cost", match self.costs {
            CostModel::Unit => "unit".into(),
            CostModel::UniformInt => "uniform".into(),
        });
        kv("seed", self.seed.to_string());
        if let Some(g) = self.expected_genus() {
            kv("expected_genus", g.to_string());
        }
        match &self.family {
            Family::ToroidalGrid { n, orientation } => {
                kv("n", n.to_string());
                kv("orientation", match orientation {
                    GridOrientation::RightDown => "right_down".into(),
                    GridOrientation::Checkerboard => "checkerboard".into(),
                });
            }
            Family::Cycle { n } => kv("n", n.to_string()),
            Family::Planar { rows, cols, drop_pct, twin_pct } => {
                kv("rows", rows.to_string());
                kv("cols", cols.to_string());
                kv("drop_pct", drop_pct.to_string());
                kv("twin_pct", twin_pct.to_string());
            }
            Family::RandomRotation { rows, cols, shuffles, max_genus } => {
                kv("rows", rows.to_string());
                kv("cols", cols.to_string());
                kv("shuffles", shuffles.to_string());
                kv("max_genus", max_genus.to_string());
            }
            Family::DisjointUnion { parts } => {
                kv("parts", parts.len().to_string());
                for (k, p) in parts.iter().enumerate() {
                    p.write_keys(&format!("{prefix}part{k}."), out);
                }
            }
        }
    }

    pub fn from_manifest(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (k, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse { line: k + 1, msg: format!("expected key=value, got {line:?}") })?;
            map.insert(key.trim().to_string(), value.trim().to_string());
        }
        Self::from_keys(&map, "")
    }

    fn from_keys(map: &BTreeMap<String, String>, prefix: &str) -> Result<Self> {
        let get = |k: &str| -> Result<&str> {
            map.get(&format!("{prefix}{k}"))
                .map(String::as_str)
                .ok_or_else(|| Error::InvalidSpec(format!("missing key {prefix}{k}")))
        };
        let num = |k: &str| -> Result<u64> {
            get(k)?.parse().map_err(|_| Error::InvalidSpec(format!("{prefix}{k} is not a number")))
        };
        let costs = match get("cost")? {
            "unit" => CostModel::Unit,
            "uniform" => CostModel::UniformInt,
            other => return Err(Error::InvalidSpec(format!("unknown cost model {other}"))),
        };
        let family = match get("family")? {
            "toroidal_grid" => Family::ToroidalGrid {
                n: num("n")? as u32,
                orientation: match get("orientation")? {
                    "right_down" => GridOrientation::RightDown,
                    "checkerboard" => GridOrientation::Checkerboard,
                    other => return Err(Error::InvalidSpec(format!("unknown orientation {other}"))),
                },
            },
            "cycle" => Family::Cycle { n: num("n")? as u32 },
            "planar" => Family::Planar {
                rows: num("rows")? as u32,
                cols: num("cols")? as u32,
                drop_pct: num("drop_pct")? as u32,
                twin_pct: num("twin_pct")? as u32,
            },
            "random_rotation" => Family::RandomRotation {
                rows: num("rows")? as u32,
                cols: num("cols")? as u32,
                shuffles: num("shuffles")? as u32,
                max_genus: num("max_genus")? as usize,
            },
            "disjoint_union" => {
                let parts = (0..num("parts")?)
                    .map(|k| Self::from_keys(map, &format!("{prefix}part{k}.")))
                    .collect::<Result<_>>()?;
                Family::DisjointUnion { parts }
            }
            other => return Err(Error::InvalidSpec(format!("unknown family {other}"))),
        };
        Ok(InstanceSpec { name: get("name")?.to_string(), family, costs, seed: num("seed")? })
    }
}

fn cost_fn(model: CostModel, rng: &mut ChaCha8Rng) -> impl FnMut(VertexId) -> Cost + '_ {
    move |_| match model {
        CostModel::Unit => Cost::unit(),
        CostModel::UniformInt => Cost::from_int(rng.gen_range(1..=10)),
    }
}

/// Deterministic per spec; checks the genus against the family when known.
pub fn generate(spec: &InstanceSpec) -> Result<EmbeddedDigraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let g = match &spec.family {
        Family::ToroidalGrid { n, orientation } => toroidal_grid(*n, *n, *orientation, cost_fn(spec.costs, &mut rng))?,
        Family::Cycle { n } => {
            if *n == 0 {
                return Err(Error::InvalidSpec("cycle needs at least one vertex".into()));
            }
            let mut b = EmbeddedDigraph::builder();
            let mut cost = cost_fn(spec.costs, &mut rng);
            for i in 0..*n {
                b.add_vertex(VertexId(i), cost(VertexId(i)));
                b.add_arc(ArcId(i), VertexId(i), VertexId((i + 1) % n));
            }
            b.build()?
        }
        Family::Planar { rows, cols, drop_pct, twin_pct } => random_planar(*rows, *cols, *drop_pct, *twin_pct, spec.costs, &mut rng)?,
        Family::RandomRotation { rows, cols, shuffles, max_genus } => {
            let mut attempt = 0;
            loop {
                let base = random_planar(*rows, *cols, 10, 10, spec.costs, &mut rng)?;
                let g = shuffle_rotations(&base, *shuffles, &mut rng)?;
                if genus(&g)? <= *max_genus {
                    break g;
                }
                attempt += 1;
                if attempt > 1000 {
                    return Err(Error::InvalidSpec(format!("no rotation of genus <= {max_genus} found")));
                }
            }
        }
        Family::DisjointUnion { parts } => {
            let graphs = parts.iter().map(generate).collect::<Result<Vec<_>>>()?;
            disjoint_union(&graphs)?
        }
    };
    if let Some(want) = spec.expected_genus() {
        let got = genus(&g)?;
        if got != want {
            return Err(Error::Internal(format!("{}: genus {got}, expected {want}", spec.name)));
        }
    }
    Ok(g)
}

fn random_planar(
    rows: u32,
    cols: u32,
    drop_pct: u32,
    twin_pct: u32,
    costs: CostModel,
    rng: &mut ChaCha8Rng,
) -> Result<EmbeddedDigraph> {
    if rows == 0 || cols == 0 {
        return Err(Error::InvalidSpec("planar grid needs positive sides".into()));
    }
    let dirs: Vec<bool> = (0..2 * rows * cols).map(|_| rng.gen_bool(0.5)).collect();
    let g = planar_grid(rows, cols, |r, c, h| dirs[(2 * (r * cols + c) + u32::from(!h)) as usize], cost_fn(costs, rng))?;
    let arcs: Vec<ArcId> = g.arcs().map(|(a, _, _)| a).collect();
    let dropped: BTreeSet<ArcId> = arcs.iter().copied().filter(|_| rng.gen_range(0..100) < drop_pct).collect();
    let g = drop_arcs(&g, &dropped)?;
    let twins: Vec<ArcId> = arcs.iter().copied().filter(|a| !dropped.contains(a) && rng.gen_range(0..100) < twin_pct).collect();
    add_reverse_twins(&g, &twins)
}

/// Removes arcs and their darts, keeping every vertex.
pub fn drop_arcs(g: &EmbeddedDigraph, dropped: &BTreeSet<ArcId>) -> Result<EmbeddedDigraph> {
    let mut b = EmbeddedDigraph::builder();
    for v in g.vertices() {
        b.add_vertex(v, g.cost(v).unwrap().clone());
    }
    for (a, t, h) in g.arcs().filter(|(a, _, _)| !dropped.contains(a)) {
        b.add_arc(a, t, h);
    }
    for v in g.vertices() {
        b.set_rotation(v, g.rotation(v).unwrap().into_iter().filter(|d| !dropped.contains(&d.arc)).collect());
    }
    b.build()
}

/// For each listed arc `u -> v` adds `v -> u` so the two bound a digon face.
pub fn add_reverse_twins(g: &EmbeddedDigraph, arcs: &[ArcId]) -> Result<EmbeddedDigraph> {
    let mut b = g.to_builder();
    let mut rot: BTreeMap<VertexId, Vec<Dart>> = g.vertices().map(|v| (v, g.rotation(v).unwrap())).collect();
    let mut next = g.max_arc_id().map_or(0, |a| a.0 + 1);
    for &a in arcs {
        let (u, v) = g.arc(a).ok_or_else(|| Error::InvalidSpec(format!("no arc {}", a.0)))?;
        if u == v {
            continue;
        }
        let twin = ArcId(next);
        next += 1;
        b.add_arc(twin, v, u);
        let ru = rot.get_mut(&u).unwrap();
        let k = ru.iter().position(|d| *d == Dart::tail(a)).unwrap();
        ru.insert(k, Dart::head(twin));
        let rv = rot.get_mut(&v).unwrap();
        let k = rv.iter().position(|d| *d == Dart::head(a)).unwrap();
        rv.insert(k + 1, Dart::tail(twin));
    }
    for (v, r) in rot {
        b.set_rotation(v, r);
    }
    b.build()
}

/// Randomly permutes the rotation at `count` vertices of degree at least 3.
pub fn shuffle_rotations(g: &EmbeddedDigraph, count: u32, rng: &mut ChaCha8Rng) -> Result<EmbeddedDigraph> {
    let mut candidates: Vec<VertexId> = g.vertices().filter(|v| g.rotation(*v).unwrap().len() >= 3).collect();
    candidates.shuffle(rng);
    let mut b = g.to_builder();
    for &v in candidates.iter().take(count as usize) {
        let mut r = g.rotation(v).unwrap();
        r.shuffle(rng);
        b.set_rotation(v, r);
    }
    b.build()
}

/// Places the maps side by side, shifting ids past those already used.
pub fn disjoint_union(parts: &[EmbeddedDigraph]) -> Result<EmbeddedDigraph> {
    let mut b = EmbeddedDigraph::builder();
    let (mut voff, mut aoff) = (0u32, 0u32);
    for g in parts {
        let sv = |v: VertexId| VertexId(v.0 + voff);
        let sa = |a: ArcId| ArcId(a.0 + aoff);
        for v in g.vertices() {
            b.add_vertex(sv(v), g.cost(v).unwrap().clone());
        }
        for (a, t, h) in g.arcs() {
            b.add_arc(sa(a), sv(t), sv(h));
        }
        for v in g.vertices() {
            b.set_rotation(sv(v), g.rotation(v).unwrap().into_iter().map(|d| Dart { arc: sa(d.arc), ..d }).collect());
        }
        voff += g.max_vertex_id().map_or(0, |v| v.0 + 1);
        aoff += g.max_arc_id().map_or(0, |a| a.0 + 1);
    }
    b.build()
}

/// The standing corpus: tori of side 2..6, plane grids, reshuffled
/// rotations up to genus 3 and a few disjoint unions, all with at most 60
/// vertices.
pub fn default_corpus() -> Vec<InstanceSpec> {
    let mut out = Vec::new();
    let models = [(CostModel::Unit, "unit"), (CostModel::UniformInt, "unif")];
    for n in 2..=6u32 {
        for (o, tag) in [(GridOrientation::RightDown, "rd"), (GridOrientation::Checkerboard, "cb")] {
            if o == GridOrientation::Checkerboard && n % 2 == 1 {
                continue;
            }
            for (m, mt) in models {
                let seeds: &[u64] = if m == CostModel::Unit { &[0] } else { &[1, 2, 3] };
                for &s in seeds {
                    out.push(InstanceSpec::new(format!("torus-{n}-{tag}-{mt}-s{s}"), Family::ToroidalGrid { n, orientation: o }, m, s));
                }
            }
        }
    }
    for n in [2u32, 3, 5, 8] {
        out.push(InstanceSpec::new(format!("cycle-{n}"), Family::Cycle { n }, CostModel::Unit, 0));
    }
    let shapes = [(2u32, 3u32), (3, 3), (3, 4), (4, 4), (4, 5), (5, 5), (5, 6), (6, 6), (6, 8), (7, 8)];
    for (k, &(rows, cols)) in shapes.iter().enumerate() {
        for s in 0..8u64 {
            let m = if s % 2 == 0 { CostModel::Unit } else { CostModel::UniformInt };
            let fam = Family::Planar { rows, cols, drop_pct: 10 + 5 * (s as u32 % 3), twin_pct: 15 + 10 * (s as u32 % 4) };
            out.push(InstanceSpec::new(format!("planar-{rows}x{cols}-s{s}"), fam, m, 100 * k as u64 + s));
        }
    }
    let rot_shapes = [(3u32, 3u32), (3, 4), (4, 4), (4, 5), (4, 6), (5, 5), (5, 6), (6, 6), (6, 8), (7, 8)];
    for (k, &(rows, cols)) in rot_shapes.iter().enumerate() {
        for s in 0..8u64 {
            let m = if s % 2 == 0 { CostModel::Unit } else { CostModel::UniformInt };
            let fam = Family::RandomRotation { rows, cols, shuffles: 1 + s as u32 % 4, max_genus: 3 };
            out.push(InstanceSpec::new(format!("rotation-{rows}x{cols}-s{s}"), fam, m, 1000 + 100 * k as u64 + s));
        }
    }
    for s in 0..10u64 {
        let a = InstanceSpec::new("a", Family::ToroidalGrid { n: 2 + s as u32 % 3, orientation: GridOrientation::RightDown }, CostModel::Unit, s);
        let b = InstanceSpec::new("b", Family::Planar { rows: 3, cols: 4, drop_pct: 10, twin_pct: 30 }, CostModel::UniformInt, 50 + s);
        let c = InstanceSpec::new("c", Family::RandomRotation { rows: 3, cols: 3, shuffles: 2, max_genus: 2 }, CostModel::Unit, 90 + s);
        let parts = if s % 2 == 0 { vec![a, b] } else { vec![a, c] };
        out.push(InstanceSpec::new(format!("union-s{s}"), Family::DisjointUnion { parts }, CostModel::Unit, s));
    }
    out
}
