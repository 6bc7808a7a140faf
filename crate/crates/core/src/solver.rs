//! Genus recursion: facial hitting, heavy rounding, one separator round
//! around a tight cycle, then recursion into the strongly connected pieces.

use std::collections::BTreeSet;

use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::embedded::{genus, has_face_minimal_dicycle, residual_graph, scc, EmbeddedDigraph, VertexId};
use crate::error::{Error, Result};
use crate::facial;
use crate::lp::{solve_lp, Arithmetic, LpConfig};
use crate::oracle::{exact_dfvs, DEFAULT_DFVS_CAP};
use crate::rational::{format_rational, ratio};
use crate::separator::{
    build_ports, default_heavy_threshold, plan, round_heavy, tight_cycle, Branch, LayerAudit,
};

pub const CERT_SCHEMA: &str = "dfvs-cert/1";

#[derive(Clone, Debug)]
pub struct SolverConfig {
    pub epsilon: BigRational,
    pub heavy_threshold: BigRational,
    /// Largest piece handed to the exact oracle when the recursion stalls.
    pub oracle_cap: usize,
    pub parallel: bool,
    pub max_rounds: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            epsilon: ratio(1, 12),
            heavy_threshold: default_heavy_threshold(),
            oracle_cap: DEFAULT_DFVS_CAP,
            parallel: true,
            max_rounds: 2000,
        }
    }
}

impl SolverConfig {
    fn lp(&self) -> LpConfig {
        LpConfig { arithmetic: Arithmetic::Exact, epsilon: self.epsilon.clone(), max_rounds: self.max_rounds, ..LpConfig::default() }
    }
}

/// How a node was reached from its parent.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Entry {
    Root,
    /// The piece's own map has lower genus than its parent's.
    GenusDrop,
    /// Same genus, strictly fewer vertices.
    SizeDrop,
}

#[derive(Clone, Debug, Serialize)]
pub struct RecursionNode {
    pub id: usize,
    pub parent: Option<usize>,
    pub genus: usize,
    pub vertices: usize,
    pub entry: Entry,
    pub branch: Option<Branch>,
    pub facial: usize,
    pub heavy: usize,
    pub separator: usize,
    /// Vertices chosen by the exact oracle after a stall.
    pub oracle: usize,
    pub children: Vec<usize>,
    pub note: Option<String>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct PhaseCosts {
    #[serde(serialize_with = "ser")]
    pub facial: BigRational,
    #[serde(serialize_with = "ser")]
    pub heavy: BigRational,
    #[serde(serialize_with = "ser")]
    pub separator: BigRational,
    #[serde(serialize_with = "ser")]
    pub oracle: BigRational,
}

impl PhaseCosts {
    pub fn total(&self) -> BigRational {
        &self.facial + &self.heavy + &self.separator + &self.oracle
    }

    fn add(&mut self, o: &PhaseCosts) {
        self.facial += &o.facial;
        self.heavy += &o.heavy;
        self.separator += &o.separator;
        self.oracle += &o.oracle;
    }
}

fn ser<S: serde::Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(r))
}

/// Audit trail of one separator round.
#[derive(Clone, Debug, Serialize)]
pub struct SeparatorRecord {
    pub node: usize,
    pub branch: Branch,
    pub n: u128,
    pub eps_n: u128,
    #[serde(serialize_with = "ser")]
    pub lp_value: BigRational,
    pub audits: Vec<LayerAudit>,
    pub violations: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct HeavyRecord {
    pub node: usize,
    #[serde(serialize_with = "ser")]
    pub cost: BigRational,
    #[serde(serialize_with = "ser")]
    pub root_lp: BigRational,
    #[serde(serialize_with = "ser")]
    pub threshold: BigRational,
    pub failures: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SolveCertificate {
    pub schema: &'static str,
    pub solution: BTreeSet<VertexId>,
    #[serde(serialize_with = "ser")]
    pub cost: BigRational,
    /// LP optimum of the input.
    #[serde(serialize_with = "ser")]
    pub lp_bound: BigRational,
    pub phases: PhaseCosts,
    pub tree: Vec<RecursionNode>,
    pub separators: Vec<SeparatorRecord>,
    pub heavy: Vec<HeavyRecord>,
    /// No dicycle survives the solution.
    pub valid: bool,
    pub approximate: bool,
    pub fallbacks: usize,
}

impl SolveCertificate {
    /// Every tree edge decreases `(genus, |V|)` lexicographically.
    pub fn recursion_monotone(&self) -> bool {
        self.tree.iter().all(|n| match n.parent {
            None => true,
            Some(p) => {
                let q = &self.tree[p];
                (n.genus, n.vertices) < (q.genus, q.vertices)
            }
        })
    }

    pub fn audits_pass(&self) -> bool {
        self.separators.iter().all(|s| s.audits.iter().all(LayerAudit::passes))
            && self.heavy.iter().all(|h| h.failures.is_empty())
    }

    pub fn ratio(&self) -> Option<f64> {
        if self.lp_bound.is_zero() {
            return None;
        }
        Some(crate::rational::to_f64(&(&self.cost / &self.lp_bound)))
    }
}

/// `true` iff `g - s` has no dicycle.
pub fn check_solution(g: &EmbeddedDigraph, s: &BTreeSet<VertexId>) -> bool {
    residual_graph(g, s).is_empty()
}

fn finite_cost(g: &EmbeddedDigraph, set: &BTreeSet<VertexId>) -> BigRational {
    set.iter()
        .filter_map(|v| g.cost(*v).and_then(|c| c.as_finite()).cloned())
        .fold(BigRational::zero(), |a, b| a + b)
}

/// Result of one subtree, with node ids local to it.
#[derive(Default)]
struct Part {
    solution: BTreeSet<VertexId>,
    phases: PhaseCosts,
    nodes: Vec<RecursionNode>,
    separators: Vec<SeparatorRecord>,
    heavy: Vec<HeavyRecord>,
    fallbacks: usize,
}

impl Part {
    /// Appends `child` below node `at`, shifting its ids.
    fn graft(&mut self, at: usize, child: Part) {
        let off = self.nodes.len();
        self.nodes[at].children.push(off);
        for mut n in child.nodes {
            n.id += off;
            n.parent = Some(n.parent.map_or(at, |p| p + off));
            n.children.iter_mut().for_each(|c| *c += off);
            self.nodes.push(n);
        }
        for mut s in child.separators {
            s.node += off;
            self.separators.push(s);
        }
        for mut h in child.heavy {
            h.node += off;
            self.heavy.push(h);
        }
        self.solution.extend(child.solution);
        self.phases.add(&child.phases);
        self.fallbacks += child.fallbacks;
    }
}

pub fn solve(g: &EmbeddedDigraph, cfg: &SolverConfig) -> Result<SolveCertificate> {
    let root_lp = solve_lp(g, &cfg.lp())?;
    let h = residual_graph(g, &BTreeSet::new());
    let part = if h.is_empty() {
        let mut p = Part::default();
        p.nodes.push(node(0, 0, Entry::Root));
        p
    } else {
        let gen = genus(&h)?;
        solve_node(&h, gen, Entry::Root, cfg)?
    };
    let cost = finite_cost(g, &part.solution);
    debug_assert_eq!(cost, part.phases.total());
    Ok(SolveCertificate {
        schema: CERT_SCHEMA,
        valid: check_solution(g, &part.solution),
        solution: part.solution,
        cost,
        lp_bound: root_lp.objective,
        phases: part.phases,
        tree: part.nodes,
        separators: part.separators,
        heavy: part.heavy,
        approximate: root_lp.approximate,
        fallbacks: part.fallbacks,
    })
}

fn node(genus: usize, vertices: usize, entry: Entry) -> RecursionNode {
    RecursionNode {
        id: 0,
        parent: None,
        genus,
        vertices,
        entry,
        branch: None,
        facial: 0,
        heavy: 0,
        separator: 0,
        oracle: 0,
        children: Vec::new(),
        note: None,
    }
}

/// Solves `rest` exactly when small enough, else reports the stall.
fn fallback(part: &mut Part, rest: &EmbeddedDigraph, cfg: &SolverConfig, why: String) -> Result<()> {
    if rest.vertex_count() > cfg.oracle_cap {
        return Err(Error::NoProgress(format!("{why}; {} vertices left, oracle cap {}", rest.vertex_count(), cfg.oracle_cap)));
    }
    let ex = exact_dfvs(rest, cfg.oracle_cap)?;
    part.phases.oracle += &ex.value;
    part.nodes[0].oracle += ex.vertices.len();
    part.nodes[0].note = Some(why);
    part.solution.extend(ex.vertices);
    part.fallbacks += 1;
    Ok(())
}

/// `h` is strongly connected piecewise (every vertex on a dicycle) and has
/// genus `gen`.
fn solve_node(h: &EmbeddedDigraph, gen: usize, entry: Entry, cfg: &SolverConfig) -> Result<Part> {
    let mut part = Part::default();
    part.nodes.push(node(gen, h.vertex_count(), entry));

    let hit = facial::run(h)?;
    part.phases.facial = finite_cost(h, &hit.selected);
    part.nodes[0].facial = hit.selected.len();
    part.solution.extend(hit.selected.iter().copied());
    let r1 = residual_graph(h, &hit.selected);
    if r1.is_empty() {
        return Ok(part);
    }
    if gen == 0 {
        // every dicycle of a plane map is facial, so this cannot happen
        fallback(&mut part, &r1, cfg, "planar residual kept a dicycle after facial hitting".into())?;
        return Ok(part);
    }

    let heavy = round_heavy(&r1, &cfg.heavy_threshold, &cfg.lp())?;
    part.phases.heavy = finite_cost(h, &heavy.f);
    part.nodes[0].heavy = heavy.f.len();
    part.solution.extend(heavy.f.iter().copied());
    part.heavy.push(HeavyRecord {
        node: 0,
        cost: heavy.cost(),
        root_lp: heavy.root_lp.clone(),
        threshold: heavy.threshold.clone(),
        failures: heavy.audit(),
    });
    let Some(sol) = &heavy.solution else { return Ok(part) };
    let r2 = &heavy.residual;

    let Some(c1) = tight_cycle(sol) else {
        fallback(&mut part, r2, cfg, "no tight cycle in a cyclic residual".into())?;
        return Ok(part);
    };
    let bp = build_ports(r2, &c1)?;
    let p = plan(r2, sol, &bp, &cfg.epsilon)?;
    part.nodes[0].branch = Some(p.branch);
    part.separators.push(SeparatorRecord {
        node: 0,
        branch: p.branch,
        n: p.n,
        eps_n: p.eps_n,
        lp_value: sol.objective.clone(),
        audits: p.audits.clone(),
        violations: p.violations.clone(),
    });
    if let Err(e) = p.check() {
        fallback(&mut part, r2, cfg, e.to_string())?;
        return Ok(part);
    }
    part.phases.separator = finite_cost(h, &p.removed);
    part.nodes[0].separator = p.removed.len();
    part.solution.extend(p.removed.iter().copied());

    let r3 = residual_graph(r2, &p.removed);
    let mut pieces = Vec::new();
    for comp in scc(&r3).into_iter().filter(|c| c.len() > 1 || r3.induced(&c.iter().copied().collect()).arc_count() > 0) {
        let k = r3.induced(&comp.into_iter().collect());
        let kg = genus(&k)?;
        let child_entry = if kg < gen {
            Entry::GenusDrop
        } else if k.vertex_count() < h.vertex_count() {
            Entry::SizeDrop
        } else {
            Entry::Root
        };
        pieces.push((k, kg, child_entry));
    }
    let stalled: Vec<&(EmbeddedDigraph, usize, Entry)> = pieces.iter().filter(|p| p.2 == Entry::Root).collect();
    if !stalled.is_empty() {
        let mut keep = BTreeSet::new();
        for s in &stalled {
            keep.extend(s.0.vertices());
        }
        let has_faces = stalled.iter().any(|s| has_face_minimal_dicycle(&s.0));
        fallback(&mut part, &r3.induced(&keep), cfg, format!("piece kept genus {gen} and all {} vertices (facial: {has_faces})", h.vertex_count()))?;
    }
    let todo: Vec<_> = pieces.into_iter().filter(|p| p.2 != Entry::Root).collect();
    let children: Vec<Result<Part>> = if cfg.parallel {
        todo.par_iter().map(|(k, kg, e)| solve_node(k, *kg, *e, cfg)).collect()
    } else {
        todo.iter().map(|(k, kg, e)| solve_node(k, *kg, *e, cfg)).collect()
    };
    for child in children {
        part.graft(0, child?);
    }
    Ok(part)
}
