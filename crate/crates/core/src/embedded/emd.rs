//! The `.emd` text format.
//!
//! ```text
//! emd <V> <A>
//! v <id> <cost|inf>
//! a <id> <tail> <head>
//! r <id> <dart> <dart> ...     # +k = tail-dart of arc k, -k = head-dart
//! ```
//!
//! Blank lines and `#` comments are ignored. Every vertex with incident
//! arcs needs an `r` line listing all of its darts in rotation order.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;
use std::path::Path;

use super::{ArcId, Dart, EmbeddedDigraph, VertexId};
use crate::cost::Cost;
use crate::error::{Error, Result};

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn parse_u32(tok: &str, line: usize, what: &str) -> Result<u32> {
    tok.parse().map_err(|_| perr(line, format!("bad {what} `{tok}`")))
}

fn parse_dart(tok: &str, line: usize) -> Result<Dart> {
    let (sign, rest) = tok.split_at(tok.len().min(1));
    let arc = ArcId(parse_u32(rest, line, "dart")?);
    match sign {
        "+" => Ok(Dart::tail(arc)),
        "-" => Ok(Dart::head(arc)),
        _ => Err(perr(line, format!("dart `{tok}` must start with + or -"))),
    }
}

pub fn parse_emd(text: &str) -> Result<EmbeddedDigraph> {
    let mut header: Option<(usize, usize)> = None;
    let mut b = EmbeddedDigraph::builder();
    let mut vertex_lines: HashMap<VertexId, usize> = HashMap::new();
    let mut arc_lines: HashMap<ArcId, usize> = HashMap::new();
    let mut arc_ends: HashMap<ArcId, (VertexId, VertexId)> = HashMap::new();
    let mut rotations: BTreeMap<VertexId, (usize, Vec<Dart>)> = BTreeMap::new();
    let mut seen_darts: HashMap<Dart, usize> = HashMap::new();

    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let toks: Vec<&str> = content.split_whitespace().collect();
        if header.is_none() {
            if toks.len() != 3 || toks[0] != "emd" {
                return Err(perr(line, "expected header `emd <V> <A>`"));
            }
            let nv = parse_u32(toks[1], line, "vertex count")? as usize;
            let na = parse_u32(toks[2], line, "arc count")? as usize;
            header = Some((nv, na));
            continue;
        }
        match toks[0] {
            "v" => {
                if toks.len() != 3 {
                    return Err(perr(line, "expected `v <id> <cost|inf>`"));
                }
                let id = VertexId(parse_u32(toks[1], line, "vertex id")?);
                let cost = Cost::parse(toks[2])
                    .ok_or_else(|| perr(line, format!("bad cost `{}`", toks[2])))?;
                if let Some(prev) = vertex_lines.insert(id, line) {
                    return Err(perr(line, format!("vertex {id} already declared on line {prev}")));
                }
                b.add_vertex(id, cost);
            }
            "a" => {
                if toks.len() != 4 {
                    return Err(perr(line, "expected `a <id> <tail> <head>`"));
                }
                let id = ArcId(parse_u32(toks[1], line, "arc id")?);
                let t = VertexId(parse_u32(toks[2], line, "tail")?);
                let h = VertexId(parse_u32(toks[3], line, "head")?);
                if let Some(prev) = arc_lines.insert(id, line) {
                    return Err(perr(line, format!("arc {id} already declared on line {prev}")));
                }
                arc_ends.insert(id, (t, h));
                b.add_arc(id, t, h);
            }
            "r" => {
                if toks.len() < 2 {
                    return Err(perr(line, "expected `r <id> <dart...>`"));
                }
                let id = VertexId(parse_u32(toks[1], line, "vertex id")?);
                let mut darts = Vec::with_capacity(toks.len() - 2);
                for tok in &toks[2..] {
                    let d = parse_dart(tok, line)?;
                    if let Some(prev) = seen_darts.insert(d, line) {
                        return Err(perr(line, format!("duplicate dart {d} (first listed on line {prev})")));
                    }
                    darts.push(d);
                }
                if let Some((prev, _)) = rotations.insert(id, (line, darts)) {
                    return Err(perr(line, format!("rotation of {id} already given on line {prev}")));
                }
            }
            other => return Err(perr(line, format!("unknown record `{other}`"))),
        }
    }

    let (nv, na) = header.ok_or_else(|| perr(0, "missing header"))?;
    if vertex_lines.len() != nv {
        return Err(perr(0, format!("header declares {nv} vertices, found {}", vertex_lines.len())));
    }
    if arc_lines.len() != na {
        return Err(perr(0, format!("header declares {na} arcs, found {}", arc_lines.len())));
    }
    let mut has_darts: HashSet<VertexId> = HashSet::new();
    for (t, h) in arc_ends.values() {
        has_darts.insert(*t);
        has_darts.insert(*h);
    }
    for v in &has_darts {
        if !rotations.contains_key(v) {
            let line = vertex_lines.get(v).copied().unwrap_or(0);
            return Err(perr(line, format!("vertex {v} has arcs but no rotation line")));
        }
    }
    for (v, (line, darts)) in rotations {
        if !vertex_lines.contains_key(&v) {
            return Err(perr(line, format!("rotation for undeclared vertex {v}")));
        }
        b.set_rotation(v, darts);
    }
    b.build()
}

pub fn read_emd(path: impl AsRef<Path>) -> Result<EmbeddedDigraph> {
    let text = std::fs::read_to_string(path)?;
    parse_emd(&text)
}

pub fn write_emd(g: &EmbeddedDigraph) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "emd {} {}", g.vertex_count(), g.arc_count());
    for v in g.vertices() {
        let _ = writeln!(s, "v {} {}", v, g.cost(v).unwrap());
    }
    for (id, t, h) in g.arcs() {
        let _ = writeln!(s, "a {id} {t} {h}");
    }
    for v in g.vertices() {
        let rot = g.rotation(v).unwrap();
        if rot.is_empty() {
            continue;
        }
        let _ = write!(s, "r {v}");
        for d in rot {
            let _ = write!(s, " {d}");
        }
        s.push('\n');
    }
    s
}
