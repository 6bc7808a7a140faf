use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;

use super::instances::{generate, InstanceSpec};
use crate::embedded::{genus, read_emd, write_emd, EmbeddedDigraph};
use crate::error::{Error, Result};
use crate::oracle::{exact_dfvs, max_dicycle_packing, DEFAULT_PACKING_CAP};
use crate::rational::{format_rational, to_f64};
use crate::solver::{solve, SolverConfig};

pub const REPORT_VERSION: &str = "dfvs-report/1";

#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub name: String,
    pub graph: EmbeddedDigraph,
    pub spec: Option<InstanceSpec>,
}

pub fn materialize(specs: &[InstanceSpec]) -> Result<Vec<CorpusEntry>> {
    specs
        .iter()
        .map(|s| Ok(CorpusEntry { name: s.name.clone(), graph: generate(s)?, spec: Some(s.clone()) }))
        .collect()
}

/// Writes `<name>.emd` and `<name>.spec` per instance.
pub fn write_corpus(dir: &Path, specs: &[InstanceSpec]) -> Result<()> {
    fs::create_dir_all(dir)?;
    for e in materialize(specs)? {
        fs::write(dir.join(format!("{}.emd", e.name)), write_emd(&e.graph))?;
        fs::write(dir.join(format!("{}.spec", e.name)), e.spec.unwrap().to_manifest())?;
    }
    Ok(())
}

/// Every `.emd` file in `dir`, with its manifest when one sits next to it,
/// sorted by name.
pub fn read_corpus(dir: &Path) -> Result<Vec<CorpusEntry>> {
    let mut out = Vec::new();
    for ent in fs::read_dir(dir)? {
        let path = ent?.path();
        if path.extension().and_then(|e| e.to_str()) != Some("emd") {
            continue;
        }
        let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default().to_string();
        let graph = read_emd(&path)?;
        let manifest = path.with_extension("spec");
        let spec = if manifest.exists() { Some(InstanceSpec::from_manifest(&fs::read_to_string(manifest)?)?) } else { None };
        out.push(CorpusEntry { name, graph, spec });
    }
    out.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    /// Largest instance given to the exact DFVS oracle.
    pub exact_cap: usize,
    pub packing_cap: usize,
    pub solver: SolverConfig,
    pub parallel: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            exact_cap: DEFAULT_PACKING_CAP,
            packing_cap: DEFAULT_PACKING_CAP,
            solver: SolverConfig { parallel: false, ..SolverConfig::default() },
            parallel: true,
        }
    }
}

/// One report line. Every column but the last is reproducible.
#[derive(Clone, Debug, Serialize)]
pub struct ReportRow {
    pub version: &'static str,
    pub id: String,
    pub family: String,
    pub vertices: usize,
    pub arcs: usize,
    pub genus: Option<usize>,
    pub lp: Option<String>,
    pub exact_opt: Option<String>,
    pub cost: Option<String>,
    pub cost_over_lp: Option<String>,
    pub cost_over_opt: Option<String>,
    pub packing: Option<usize>,
    pub opt_over_packing: Option<String>,
    pub valid: Option<bool>,
    pub sandwich: Option<bool>,
    pub recursion_monotone: Option<bool>,
    pub audits: Option<bool>,
    pub fallbacks: Option<usize>,
    pub error: String,
    pub timing: String,
}

fn ratio(a: &BigRational, b: &BigRational) -> Option<String> {
    if b == &BigRational::from_integer(0.into()) {
        return None;
    }
    Some(format!("{:.6}", to_f64(&(a / b))))
}

fn row(e: &CorpusEntry, cfg: &ExperimentConfig) -> ReportRow {
    let g = &e.graph;
    let mut r = ReportRow {
        version: REPORT_VERSION,
        id: e.name.clone(),
        family: e.spec.as_ref().map_or("file", |s| s.family_name()).to_string(),
        vertices: g.vertex_count(),
        arcs: g.arc_count(),
        genus: genus(g).ok(),
        lp: None,
        exact_opt: None,
        cost: None,
        cost_over_lp: None,
        cost_over_opt: None,
        packing: None,
        opt_over_packing: None,
        valid: None,
        sandwich: None,
        recursion_monotone: None,
        audits: None,
        fallbacks: None,
        error: String::new(),
        timing: String::new(),
    };
    let mut errors = Vec::new();
    let t0 = Instant::now();
    let cert = solve(g, &cfg.solver);
    let solve_ms = t0.elapsed().as_secs_f64() * 1e3;
    let t1 = Instant::now();
    let exact = (g.vertex_count() <= cfg.exact_cap).then(|| exact_dfvs(g, cfg.exact_cap));
    let exact_ms = t1.elapsed().as_secs_f64() * 1e3;
    let t2 = Instant::now();
    let pack = (g.vertex_count() <= cfg.packing_cap).then(|| max_dicycle_packing(g, cfg.packing_cap));
    let pack_ms = t2.elapsed().as_secs_f64() * 1e3;

    let opt = match exact {
        Some(Ok(x)) => Some(x.value),
        Some(Err(err)) => {
            errors.push(format!("exact: {err}"));
            None
        }
        None => None,
    };
    match pack {
        Some(Ok(p)) => r.packing = Some(p.cycles.len()),
        Some(Err(err)) => errors.push(format!("packing: {err}")),
        None => {}
    }
    if let (Some(o), Some(p)) = (&opt, r.packing) {
        r.opt_over_packing = ratio(o, &BigRational::from_integer(p.into()));
    }
    r.exact_opt = opt.as_ref().map(format_rational);
    match cert {
        Ok(c) => {
            r.lp = Some(format_rational(&c.lp_bound));
            r.cost = Some(format_rational(&c.cost));
            r.cost_over_lp = ratio(&c.cost, &c.lp_bound);
            r.valid = Some(c.valid);
            r.recursion_monotone = Some(c.recursion_monotone());
            r.audits = Some(c.audits_pass());
            r.fallbacks = Some(c.fallbacks);
            if let Some(o) = &opt {
                r.cost_over_opt = ratio(&c.cost, o);
                r.sandwich = Some(c.lp_bound <= *o && *o <= c.cost);
            }
        }
        Err(err) => errors.push(format!("solve: {err}")),
    }
    r.error = errors.join("; ");
    r.timing = format!("solve_ms={solve_ms:.1};exact_ms={exact_ms:.1};packing_ms={pack_ms:.1}");
    r
}

/// One row per entry, in input order; failures land in the `error` column.
pub fn run_experiment(corpus: &[CorpusEntry], cfg: &ExperimentConfig) -> Vec<ReportRow> {
    if cfg.parallel {
        corpus.par_iter().map(|e| row(e, cfg)).collect()
    } else {
        corpus.iter().map(|e| row(e, cfg)).collect()
    }
}

pub fn write_report(rows: &[ReportRow], out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if rows.is_empty() {
        w.write_record(REPORT_COLUMNS)?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(Error::Io)
}

pub const REPORT_COLUMNS: [&str; 20] = [
    "version",
    "id",
    "family",
    "vertices",
    "arcs",
    "genus",
    "lp",
    "exact_opt",
    "cost",
    "cost_over_lp",
    "cost_over_opt",
    "packing",
    "opt_over_packing",
    "valid",
    "sandwich",
    "recursion_monotone",
    "audits",
    "fallbacks",
    "error",
    "timing",
];
