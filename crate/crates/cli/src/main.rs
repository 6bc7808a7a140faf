use std::collections::BTreeSet;
use std::fs::File;
use std::io::{self, BufWriter};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use dfvs_core::embedded::{read_emd, residual_graph, write_emd};
use dfvs_core::harness::{
    default_corpus, generate, read_corpus, run_experiment, write_corpus, write_report, ExperimentConfig, InstanceSpec,
};
use dfvs_core::lp::{solve_lp, Arithmetic, LpConfig};
use dfvs_core::oracle::{enumerate_dicycles, exact_dfvs, max_dicycle_packing};
use dfvs_core::rational::{format_rational, parse_rational};
use dfvs_core::separator::{build_ports, default_heavy_threshold, plan, round_heavy, tight_cycle};
use dfvs_core::solver::{solve, SolverConfig};
use dfvs_core::{facial, EmbeddedDigraph, Error, VertexId};
use num_rational::BigRational;

#[derive(Parser)]
#[command(name = "dfvs", version, about = "Directed feedback vertex set on embedded digraphs")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve the cycle-covering LP.
    Lp {
        file: PathBuf,
        #[arg(long)]
        float: bool,
        #[arg(long)]
        json: bool,
    },
    /// Primal-dual hitting set for face-bounding dicycles.
    HitFacial {
        file: PathBuf,
        #[arg(long)]
        json: bool,
        /// Write one JSON line per round here.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// One separator round around a tight cycle of the LP.
    SeparatePlan {
        file: PathBuf,
        #[arg(long)]
        json: bool,
        #[arg(long, default_value = "1/12")]
        epsilon: String,
        /// Round heavy LP values first, as the solver does.
        #[arg(long)]
        round_heavy: bool,
    },
    /// Full recursion; exits with 2 when it stalls above the oracle cap.
    Solve {
        file: PathBuf,
        #[arg(long)]
        json: bool,
        #[arg(long, default_value_t = 18)]
        oracle_cap: usize,
        #[arg(long, default_value = "1/12")]
        epsilon: String,
    },
    /// Exact references for small instances.
    Oracle {
        what: OracleKind,
        file: PathBuf,
        #[arg(long, default_value_t = 18)]
        cap: usize,
    },
    /// Run every instance of a corpus directory into a CSV report.
    Bench {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 14)]
        oracle_cap: usize,
    },
    /// Write the default corpus, or a single instance from a manifest.
    Gen {
        #[arg(long)]
        out: PathBuf,
        /// `key=value` manifest; without it the default corpus is written.
        #[arg(long)]
        spec: Option<PathBuf>,
    },
}

#[derive(Copy, Clone, ValueEnum)]
enum OracleKind {
    Dfvs,
    Pack,
    Cycles,
}

fn load(path: &PathBuf) -> Result<EmbeddedDigraph> {
    read_emd(path).with_context(|| format!("reading {}", path.display()))
}

fn epsilon(s: &str) -> Result<BigRational> {
    parse_rational(s)
        .filter(|e| e > &BigRational::from_integer(0.into()) && e < &BigRational::from_integer(1.into()))
        .ok_or_else(|| anyhow!("epsilon must be a rational in (0, 1), got {s}"))
}

fn ids(set: &BTreeSet<VertexId>) -> String {
    set.iter().map(|v| v.0.to_string()).collect::<Vec<_>>().join(" ")
}

fn print_json(v: &impl serde::Serialize) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.cmd {
        Cmd::Lp { file, float, json } => {
            let g = load(&file)?;
            let cfg = LpConfig { arithmetic: if float { Arithmetic::Float } else { Arithmetic::Exact }, ..LpConfig::default() };
            let sol = solve_lp(&g, &cfg)?;
            if json {
                print_json(&sol)?;
            } else {
                println!("objective {}", format_rational(&sol.objective));
                println!("rounds {} pool {} N {}", sol.rounds, sol.active_cycles.len(), sol.scale());
                for (v, x) in sol.x.iter().filter(|(_, x)| **x != BigRational::from_integer(0.into())) {
                    println!("x[{v}] = {}", format_rational(x));
                }
            }
        }
        Cmd::HitFacial { file, json, trace } => {
            let g = load(&file)?;
            let r = facial::run(&g)?;
            if let Some(path) = trace {
                r.write_trace(BufWriter::new(File::create(&path)?))?;
            }
            let report = facial::verify_certificate(&g, &r);
            if json {
                print_json(&serde_json::json!({
                    "selected": r.selected,
                    "cost": r.cost(&g).to_string(),
                    "dual": format_rational(&r.ledger.total()),
                    "genus": r.genus,
                    "rounds": r.iterations,
                    "checks": report.checks,
                }))?;
            } else {
                println!("selected {}", ids(&r.selected));
                println!("cost {} dual {} genus {} rounds {}", r.cost(&g), format_rational(&r.ledger.total()), r.genus, r.iterations.len());
                for c in &report.checks {
                    println!("{:<18} {} {}", c.name, if c.passed { "ok" } else { "FAIL" }, c.detail);
                }
            }
        }
        Cmd::SeparatePlan { file, json, epsilon: eps, round_heavy: heavy } => {
            let eps = epsilon(&eps)?;
            let g = load(&file)?;
            let lp = LpConfig { epsilon: eps.clone(), ..LpConfig::default() };
            let (h, sol) = if heavy {
                let r = round_heavy(&g, &default_heavy_threshold(), &lp)?;
                eprintln!("heavy rounding removed {}", ids(&r.f));
                match r.solution {
                    Some(s) => (r.residual, s),
                    None => {
                        println!("residual acyclic after heavy rounding");
                        return Ok(ExitCode::SUCCESS);
                    }
                }
            } else {
                let h = residual_graph(&g, &BTreeSet::new());
                let s = solve_lp(&h, &lp)?;
                (h, s)
            };
            let Some(c1) = tight_cycle(&sol) else {
                println!("no tight cycle: graph is acyclic");
                return Ok(ExitCode::SUCCESS);
            };
            let bp = build_ports(&h, &c1)?;
            let p = plan(&h, &sol, &bp, &eps)?;
            if json {
                print_json(&serde_json::json!({ "cycle": c1, "ports": bp.ports, "plan": p }))?;
            } else {
                println!("cycle {c1}");
                println!("branch {:?}  N {}  eps N {}", p.branch, p.n, p.eps_n);
                println!("tau- {:?} tau+ {:?} kappa- {:?} kappa+ {:?}", p.reach.tau_minus, p.reach.tau_plus, p.reach.kappa_minus, p.reach.kappa_plus);
                println!("removed {}", ids(&p.removed));
                for a in &p.audits {
                    println!(
                        "{:<8} i={:<4} cost {:<8} total {:<10} <= {:<10} chosen <= {:<8} {}",
                        a.family,
                        a.chosen,
                        format_rational(&a.chosen_cost),
                        format_rational(&a.total),
                        format_rational(&a.total_bound),
                        format_rational(&a.chosen_bound),
                        if a.passes() { "ok" } else { "FAIL" }
                    );
                }
                for v in &p.violations {
                    println!("violation: {v}");
                }
            }
        }
        Cmd::Solve { file, json, oracle_cap, epsilon: eps } => {
            let g = load(&file)?;
            let cfg = SolverConfig { epsilon: epsilon(&eps)?, oracle_cap, ..SolverConfig::default() };
            let cert = match solve(&g, &cfg) {
                Ok(c) => c,
                Err(e @ Error::NoProgress(_)) => {
                    eprintln!("aborted: {e}");
                    if json {
                        print_json(&serde_json::json!({
                            "schema": dfvs_core::solver::CERT_SCHEMA,
                            "aborted": e.to_string(),
                            "instance": write_emd(&g),
                        }))?;
                    }
                    return Ok(ExitCode::from(2));
                }
                Err(e) => return Err(e.into()),
            };
            if json {
                print_json(&cert)?;
            } else {
                println!("solution {}", ids(&cert.solution));
                println!("cost {} lp {} valid {}", format_rational(&cert.cost), format_rational(&cert.lp_bound), cert.valid);
                let ph = &cert.phases;
                println!(
                    "phases facial {} heavy {} separator {} oracle {}",
                    format_rational(&ph.facial),
                    format_rational(&ph.heavy),
                    format_rational(&ph.separator),
                    format_rational(&ph.oracle)
                );
                println!("nodes {} separators {} fallbacks {}", cert.tree.len(), cert.separators.len(), cert.fallbacks);
            }
            if !cert.valid {
                return Ok(ExitCode::from(1));
            }
        }
        Cmd::Oracle { what, file, cap } => {
            let g = load(&file)?;
            match what {
                OracleKind::Dfvs => {
                    let r = exact_dfvs(&g, cap)?;
                    println!("optimum {} set {} nodes {}", format_rational(&r.value), ids(&r.vertices), r.nodes);
                }
                OracleKind::Pack => {
                    let r = max_dicycle_packing(&g, cap)?;
                    println!("packing {}", r.cycles.len());
                    for c in &r.cycles {
                        println!("  {c}");
                    }
                }
                OracleKind::Cycles => {
                    let cs = enumerate_dicycles(&g, cap)?;
                    println!("{} dicycles", cs.len());
                    for c in &cs {
                        println!("  {c}");
                    }
                }
            }
        }
        Cmd::Bench { corpus, out, oracle_cap } => {
            let entries = read_corpus(&corpus)?;
            let cfg = ExperimentConfig { exact_cap: oracle_cap, packing_cap: oracle_cap, ..ExperimentConfig::default() };
            let rows = run_experiment(&entries, &cfg);
            write_report(&rows, BufWriter::new(File::create(&out)?))?;
            let failed = rows.iter().filter(|r| !r.error.is_empty() || r.valid != Some(true)).count();
            eprintln!("{} rows, {failed} with errors or invalid solutions", rows.len());
        }
        Cmd::Gen { out, spec } => match spec {
            Some(path) => {
                let s = InstanceSpec::from_manifest(&std::fs::read_to_string(&path)?)?;
                std::fs::write(&out, write_emd(&generate(&s)?))?;
            }
            None => {
                let specs = default_corpus();
                write_corpus(&out, &specs)?;
                eprintln!("wrote {} instances to {}", specs.len(), out.display());
            }
        },
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            let _ = io::Write::flush(&mut io::stdout());
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
