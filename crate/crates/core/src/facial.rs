//! Primal-dual hitting of facial dicycles.
//!
//! Each round takes the faces of the current residual map whose boundary is
//! a dicycle, raises their duals uniformly until some covered vertex runs
//! out of slack, and adds every vertex that went tight. A vertex on `k`
//! raised faces loses slack `k` times as fast. Reverse deletion then drops
//! selected vertices that are not needed to keep the residual free of
//! face-bounding dicycles.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::cost::Cost;
use crate::embedded::{face_minimal_faces, genus, has_face_minimal_dicycle, residual_graph, DiCycle, EmbeddedDigraph, VertexId};
use crate::error::{Error, Result};
use crate::rational::format_rational;

#[derive(Clone, Debug, Default)]
pub struct DualLedger {
    /// Dual value per cycle; a cycle bounding two faces collects both raises.
    pub raised: Vec<(DiCycle, BigRational)>,
    /// `c_v - sum_{C ∋ v} y_C` for finite-cost vertices.
    pub slack: BTreeMap<VertexId, BigRational>,
}

impl DualLedger {
    pub fn total(&self) -> BigRational {
        self.raised.iter().map(|(_, y)| y.clone()).sum()
    }

    /// `sum_{C ∋ v} y_C`
    pub fn load(&self) -> BTreeMap<VertexId, BigRational> {
        let mut load: BTreeMap<VertexId, BigRational> = BTreeMap::new();
        for (c, y) in &self.raised {
            for v in c.vertices() {
                *load.entry(*v).or_insert_with(BigRational::zero) += y;
            }
        }
        load
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct IterationRecord {
    /// Face-bounding dicycles raised this round, one entry per face.
    pub faces: Vec<DiCycle>,
    #[serde(serialize_with = "ser_rational")]
    pub delta: BigRational,
    pub added: Vec<VertexId>,
    /// `sum_{C in faces} |S ∩ C|` for the final set `S`.
    pub debit: usize,
}

fn ser_rational<S: serde::Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(r))
}

#[derive(Clone, Debug)]
pub struct HitterResult {
    pub selected: BTreeSet<VertexId>,
    pub ledger: DualLedger,
    pub addition_order: Vec<VertexId>,
    pub iterations: Vec<IterationRecord>,
    /// Genus of the input map; the debit bound is `3 + 3g` per face.
    pub genus: usize,
}

impl HitterResult {
    pub fn cost(&self, g: &EmbeddedDigraph) -> Cost {
        g.total_cost(&self.selected)
    }

    /// `(|C_t|, sum_{C in C_t} |S ∩ C|)` per round.
    pub fn per_iteration_stats(&self) -> Vec<(usize, usize)> {
        self.iterations.iter().map(|it| (it.faces.len(), it.debit)).collect()
    }

    pub fn debit_factor(&self) -> usize {
        3 + 3 * self.genus
    }

    /// One JSON object per round.
    pub fn write_trace(&self, mut out: impl Write) -> Result<()> {
        for (t, it) in self.iterations.iter().enumerate() {
            let line = serde_json::json!({
                "iteration": t + 1,
                "faces": it.faces.iter().map(|c| c.vertices().iter().map(|v| v.0).collect::<Vec<_>>()).collect::<Vec<_>>(),
                "delta": format_rational(&it.delta),
                "added": it.added.iter().map(|v| v.0).collect::<Vec<_>>(),
                "face_count": it.faces.len(),
                "debit": it.debit,
            });
            writeln!(out, "{line}")?;
        }
        Ok(())
    }
}

fn has_facial_dicycle(g: &EmbeddedDigraph, removed: &BTreeSet<VertexId>) -> bool {
    has_face_minimal_dicycle(&residual_graph(g, removed))
}

pub fn run(g: &EmbeddedDigraph) -> Result<HitterResult> {
    let genus = genus(g)?;
    let mut slack: BTreeMap<VertexId, BigRational> =
        g.vertices().filter_map(|v| g.cost(v).unwrap().as_finite().map(|c| (v, c.clone()))).collect();
    let mut y: BTreeMap<DiCycle, BigRational> = BTreeMap::new();
    let mut chosen: BTreeSet<VertexId> = BTreeSet::new();
    let mut order = Vec::new();
    let mut rounds: Vec<(Vec<DiCycle>, BigRational, Vec<VertexId>)> = Vec::new();

    loop {
        let faces = face_minimal_faces(&residual_graph(g, &chosen));
        if faces.is_empty() {
            break;
        }
        let mut k: BTreeMap<VertexId, usize> = BTreeMap::new();
        for f in &faces {
            if !f.vertices().iter().any(|v| slack.contains_key(v)) {
                return Err(Error::Unhittable(f.clone()));
            }
            for v in f.vertices() {
                *k.entry(*v).or_insert(0) += 1;
            }
        }
        let delta = k
            .iter()
            .filter_map(|(v, &kv)| slack.get(v).map(|s| s / BigRational::from_integer(kv.into())))
            .min()
            .expect("every face has a finite vertex");
        for f in &faces {
            *y.entry(f.clone()).or_insert_with(BigRational::zero) += &delta;
        }
        let mut added = Vec::new();
        for (v, &kv) in &k {
            if let Some(s) = slack.get_mut(v) {
                *s -= &delta * BigRational::from_integer(kv.into());
                if s.is_zero() {
                    added.push(*v);
                }
            }
        }
        chosen.extend(added.iter().copied());
        order.extend(added.iter().copied());
        rounds.push((faces, delta, added));
    }

    // reverse deletion, repeated until no vertex can be dropped
    loop {
        let mut changed = false;
        for &s in order.iter().rev() {
            if !chosen.contains(&s) {
                continue;
            }
            chosen.remove(&s);
            if has_facial_dicycle(g, &chosen) {
                chosen.insert(s);
            } else {
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }

    let iterations = rounds
        .into_iter()
        .map(|(faces, delta, added)| {
            let debit = faces.iter().map(|c| c.vertices().iter().filter(|v| chosen.contains(v)).count()).sum();
            IterationRecord { faces, delta, added, debit }
        })
        .collect();
    Ok(HitterResult {
        selected: chosen,
        ledger: DualLedger { raised: y.into_iter().collect(), slack },
        addition_order: order,
        iterations,
        genus,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct CertificateReport {
    pub checks: Vec<Check>,
}

impl CertificateReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Recomputes every claim of a hitter run from scratch.
pub fn verify_certificate(g: &EmbeddedDigraph, r: &HitterResult) -> CertificateReport {
    let mut checks = Vec::new();
    let mut push = |name, passed, detail: String| checks.push(Check { name, passed, detail });
    let finite = |v: &VertexId| g.cost(*v).and_then(Cost::as_finite).cloned();

    let load = r.ledger.load();
    let mut bad = Vec::new();
    for (c, yc) in &r.ledger.raised {
        if yc.is_negative() {
            bad.push(format!("y{c} < 0"));
        }
    }
    for (v, l) in &load {
        if let Some(c) = finite(v) {
            if l > &c {
                bad.push(format!("vertex {v}: load {} > cost {}", format_rational(l), format_rational(&c)));
            }
        }
    }
    push("dual_feasible", bad.is_empty(), bad.join("; "));

    // replay the rounds: slack must stay nonnegative after every raise
    let mut slack: BTreeMap<VertexId, BigRational> = g.vertices().filter_map(|v| finite(&v).map(|c| (v, c))).collect();
    let mut replay_bad = Vec::new();
    for (t, it) in r.iterations.iter().enumerate() {
        for f in &it.faces {
            for v in f.vertices() {
                if let Some(s) = slack.get_mut(v) {
                    *s -= &it.delta;
                }
            }
        }
        for (v, s) in &slack {
            if s.is_negative() {
                replay_bad.push(format!("round {}: vertex {v} overdrawn", t + 1));
            }
        }
        for v in &it.added {
            if slack.get(v).map_or(true, |s| !s.is_zero()) {
                replay_bad.push(format!("round {}: vertex {v} added while not tight", t + 1));
            }
        }
    }
    push("event_feasibility", replay_bad.is_empty(), replay_bad.join("; "));

    let untight: Vec<String> = r
        .selected
        .iter()
        .filter(|v| match finite(v) {
            Some(c) => load.get(v).cloned().unwrap_or_else(BigRational::zero) != c,
            None => true,
        })
        .map(|v| v.to_string())
        .collect();
    push("tightness", untight.is_empty(), if untight.is_empty() { String::new() } else { format!("untight: {}", untight.join(" ")) });

    let factor = r.debit_factor();
    let mut over = Vec::new();
    for (t, it) in r.iterations.iter().enumerate() {
        let debit: usize = it.faces.iter().map(|c| c.vertices().iter().filter(|v| r.selected.contains(v)).count()).sum();
        if debit > factor * it.faces.len() {
            over.push(format!("round {}: {debit} > {factor}*{}", t + 1, it.faces.len()));
        }
    }
    push("debit_bound", over.is_empty(), over.join("; "));

    let raised_total: BigRational = r
        .iterations
        .iter()
        .map(|it| &it.delta * BigRational::from_integer(it.faces.len().into()))
        .sum();
    let total = r.ledger.total();
    push("ledger_consistent", raised_total == total, format!("rounds {} vs ledger {}", format_rational(&raised_total), format_rational(&total)));

    push("facial_free", !has_facial_dicycle(g, &r.selected), String::new());

    let redundant: Vec<String> = r
        .selected
        .iter()
        .filter(|v| {
            let mut s = r.selected.clone();
            s.remove(v);
            !has_facial_dicycle(g, &s)
        })
        .map(|v| v.to_string())
        .collect();
    push("minimal", redundant.is_empty(), redundant.join(" "));

    let cost = g.total_cost(&r.selected);
    let bound = Cost::Finite(&total * BigRational::from_integer(factor.into()));
    push("cost_bound", cost <= bound, format!("cost {cost} vs {factor}*{}", format_rational(&total)));

    CertificateReport { checks }
}
