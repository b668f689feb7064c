//! Command-line front end for `ddvv-core`.

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use ddvv_core::comass::{comass_pcovector, comass_pontryagin, ComassEstimate, DEFAULT_BUDGET};
use ddvv_core::ddvv::{curvature_check, ddvv_gap, inequality_1a_sides};
use ddvv_core::extremal::{lemma1_extrema, proof_trace_p33, proof_trace_p34, ratio_maximize, SearchOptions};
use ddvv_core::reduction::{
    classify_equality, classify_equality_pair, diagonalize_first, is_austere, reduce_lemma3, reduce_thm3_pair,
    thm5_shape_check, CANONICAL_RESIDUAL_TOL, PREDICATE_TOL,
};
use ddvv_core::{selftest, Budget, Configuration};
use serde_json::json;

pub mod config;
pub mod report;

use config::{ConfigFile, CovectorFile};
use report::{Format, Report, Table};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "DDVV_LAB_THREADS";
/// Default tolerance for invariant checks, relative to the natural scale.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Allowed excess of a ratio above 1 in searches.
pub const RATIO_EXCESS_TOL: f64 = 1e-6;
/// Allowed excess of a Pontryagin comass estimate over its known value.
pub const COMASS_EXCESS_TOL: f64 = 5e-3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Internal(_) => 1,
        }
    }
}

fn core_err(e: ddvv_core::Error) -> CliError {
    CliError::Usage(e.to_string())
}

fn parse_seed(s: &str) -> Result<u64, String> {
    let s = s.trim();
    let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    };
    parsed.map_err(|e| format!("invalid seed {s:?}: {e}"))
}

fn parse_budget(s: &str) -> Result<Budget, String> {
    let mut parts = s.split(',').map(str::trim);
    let restarts = parts
        .next()
        .unwrap_or_default()
        .parse()
        .map_err(|e| format!("invalid restart count in {s:?}: {e}"))?;
    let iters = match parts.next() {
        Some(p) => p.parse().map_err(|e| format!("invalid iteration cap in {s:?}: {e}"))?,
        None => 0,
    };
    if parts.next().is_some() {
        return Err(format!("budget is RESTARTS[,ITERS], got {s:?}"));
    }
    Ok(Budget::new(restarts, iters))
}

#[derive(Debug, Parser)]
#[command(name = "ddvv-lab", version, about = "Numerical laboratory for the DDVV matrix inequality and Pontryagin comass")]
pub struct Cli {
    /// Master seed (decimal or 0x-prefixed hex).
    #[arg(long, global = true, value_parser = parse_seed, default_value = "0x5EED")]
    pub seed: u64,
    /// Search budget as RESTARTS[,ITERS].
    #[arg(long, global = true, value_parser = parse_budget)]
    pub budget: Option<Budget>,
    /// Tolerance for invariant checks.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Project matrices to their traceless parts (searches default to true).
    #[arg(long, global = true, num_args = 0..=1, default_missing_value = "true")]
    pub traceless: Option<bool>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReduceKind {
    Auto,
    First,
    Pair,
    Quadruple,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Both sides of the inequality for a configuration file.
    Eval { input: PathBuf },
    /// Canonical-form reduction with a verifiable certificate.
    Reduce {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = ReduceKind::Auto)]
        kind: ReduceKind,
    },
    /// Equality classification.
    Classify { input: PathBuf },
    /// Multi-start search for the supremum of the ratio.
    Search {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
    },
    /// Closed-form extrema of Σλ_k²p_k on the constraint circle.
    Lemma1 {
        #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
        p: Vec<f64>,
    },
    /// Named slacks of the inequality chain for three or four 3×3 matrices.
    ProofTrace { input: PathBuf },
    /// Comass of the Pontryagin form or of a p-covector file.
    Comass {
        #[arg(long, num_args = 2, value_names = ["N", "M"], conflicts_with = "covector")]
        pontryagin: Option<Vec<usize>>,
        #[arg(long)]
        covector: Option<PathBuf>,
    },
    /// Curvature, equality-shape and austerity checks for a second fundamental form.
    CheckH { input: PathBuf },
    /// Reduced-size run of the invariant suites.
    Selftest,
}

/// A rendered report plus whether an invariant check failed.
#[derive(Debug)]
pub struct Outcome {
    pub report: Report,
    pub violated: bool,
}

/// Applies the thread cap from [`THREADS_ENV`], if set.
pub fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got {v:?}")))?;
    if n == 0 {
        return Err(CliError::Usage(format!("{THREADS_ENV} must be positive")));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Internal(e.to_string()))
}

/// The known comass of the Pontryagin form for `(n, m)`, when available.
pub fn known_pontryagin_comass(n: usize, m: usize) -> Option<f64> {
    match (n, m) {
        (3, 6) => Some(1.5f64.sqrt()),
        (3, m) if m >= 7 => Some(4.0 / 3.0),
        (n, m) if n >= 4 && m >= 2 * n => Some(1.5),
        _ => None,
    }
}

/// Whether the inequality is a theorem for these sizes.
fn proven_case(n: usize, m: usize) -> bool {
    n <= 3 || m <= 2
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let tol = cli.tol.unwrap_or(DEFAULT_TOL);
    match &cli.command {
        Command::Eval { input } => eval(&ConfigFile::load(input)?, cli, tol),
        Command::Reduce { input, kind } => reduce(&ConfigFile::load(input)?.configuration(cli.traceless)?, *kind),
        Command::Classify { input } => classify(&ConfigFile::load(input)?.configuration(cli.traceless)?),
        Command::Search { n, m } => search(*n, *m, cli),
        Command::Lemma1 { p } => lemma1(p),
        Command::ProofTrace { input } => proof_trace(&ConfigFile::load(input)?.configuration(cli.traceless)?, tol),
        Command::Comass { pontryagin, covector } => comass(pontryagin.as_deref(), covector.as_ref(), cli),
        Command::CheckH { input } => check_h(&ConfigFile::load(input)?, tol),
        Command::Selftest => {
            let r = selftest::run(cli.seed);
            let mut t = Table::new(vec!["suite", "passed", "samples", "worst"]);
            for s in &r.suites {
                t.push(vec![s.name.into(), s.passed.into(), s.samples.into(), s.worst.into()]);
            }
            Ok(Outcome {
                violated: !r.passed(),
                report: Report::new(&r, t)?,
            })
        }
    }
}

fn eval(file: &ConfigFile, cli: &Cli, tol: f64) -> Result<Outcome, CliError> {
    let c = file.configuration(cli.traceless)?;
    let g = ddvv_gap(&c);
    let violated = proven_case(c.n(), c.m()) && g.gap < -tol * g.lhs;
    let table = Table::record(vec![
        ("n", c.n().into()),
        ("m", c.m().into()),
        ("lhs", g.lhs.into()),
        ("rhs", g.rhs.into()),
        ("gap", g.gap.into()),
        ("ratio", g.ratio.into()),
    ]);
    let value = json!({ "n": c.n(), "m": c.m(), "gap": g });
    Ok(Outcome {
        report: Report::new(&value, table)?,
        violated,
    })
}

fn reduce(c: &Configuration, kind: ReduceKind) -> Result<Outcome, CliError> {
    let (n, m) = (c.n(), c.m());
    let kind = match kind {
        ReduceKind::Auto if n == 3 && m == 4 => ReduceKind::Quadruple,
        ReduceKind::Auto if m >= n * (n - 1) / 2 + 2 => ReduceKind::Pair,
        ReduceKind::Auto => ReduceKind::First,
        k => k,
    };
    let cert = match kind {
        ReduceKind::Quadruple => reduce_lemma3(c),
        ReduceKind::Pair => reduce_thm3_pair(c),
        _ => diagonalize_first(c),
    }
    .map_err(core_err)?;
    let verified = cert.verify(PREDICATE_TOL.max(1e-9));
    let mut t = Table::new(vec!["predicate", "holds"]);
    for p in &cert.satisfied_predicates {
        t.push(vec![p.name().into(), true.into()]);
    }
    let value = json!({ "verified": verified, "certificate": cert });
    Ok(Outcome {
        report: Report::new(&value, t)?,
        violated: !verified,
    })
}

fn classify(c: &Configuration) -> Result<Outcome, CliError> {
    let d = if matches!(c.n(), 2 | 3) {
        classify_equality(c)
    } else if c.m() == 2 {
        classify_equality_pair(c.get(0), c.get(1))
    } else {
        return Err(CliError::Usage(format!(
            "equality classification needs n in {{2, 3}} or exactly two matrices, got n = {}, m = {}",
            c.n(),
            c.m()
        )));
    }
    .map_err(core_err)?;
    let scale = c.norm_sq().sqrt();
    let violated = d.is_equality && d.residual > CANONICAL_RESIDUAL_TOL * scale.max(1.0);
    let table = Table::record(vec![
        ("is_equality", d.is_equality.into()),
        ("lambda", d.lambda.into()),
        ("sign", (if d.sign > 0 { "+1" } else { "-1" }).into()),
        ("residual", d.residual.into()),
    ]);
    Ok(Outcome {
        report: Report::new(&d, table)?,
        violated,
    })
}

fn search(n: usize, m: usize, cli: &Cli) -> Result<Outcome, CliError> {
    let defaults = SearchOptions::default();
    let budget = match cli.budget {
        Some(b) if b.max_iters == 0 => Budget::new(b.restarts, defaults.budget.max_iters),
        Some(b) => b,
        None => defaults.budget,
    };
    let opts = SearchOptions {
        budget,
        seed: cli.seed,
        traceless: cli.traceless.unwrap_or(true),
    };
    let r = ratio_maximize(n, m, &opts).map_err(core_err)?;
    let violated = proven_case(n, m) && r.trace.iter().any(|t| t.best_ratio > 1.0 + RATIO_EXCESS_TOL);
    let mut t = Table::new(vec!["restart", "iterations", "best_ratio", "converged"]);
    for rec in &r.trace {
        t.push(vec![rec.restart.into(), rec.iterations.into(), rec.best_ratio.into(), rec.converged.into()]);
    }
    let value = json!({ "n": n, "m": m, "options": opts, "result": r });
    Ok(Outcome {
        report: Report::new(&value, t)?,
        violated,
    })
}

fn lemma1(p: &[f64]) -> Result<Outcome, CliError> {
    if p.len() != 3 {
        return Err(CliError::Usage(format!("--p needs three values a,b,c, got {}", p.len())));
    }
    let r = lemma1_extrema(p[0], p[1], p[2]).map_err(core_err)?;
    let table = Table::record(vec![
        ("s", r.s.into()),
        ("sigma", r.sigma.into()),
        ("f_min", r.f_min.into()),
        ("f_max", r.f_max.into()),
        ("bound_2_5", r.bound_2_5.into()),
    ]);
    Ok(Outcome {
        report: Report::new(&r, table)?,
        violated: false,
    })
}

fn proof_trace(c: &Configuration, tol: f64) -> Result<Outcome, CliError> {
    if c.n() != 3 {
        return Err(CliError::Usage(format!("proof traces need 3×3 matrices, got n = {}", c.n())));
    }
    let m = c.matrices();
    let tr = match m.len() {
        3 => proof_trace_p33(&m[0], &m[1], &m[2]),
        4 => proof_trace_p34(&m[0], &m[1], &m[2], &m[3]),
        k => return Err(CliError::Usage(format!("proof traces need 3 or 4 matrices, got {k}"))),
    }
    .map_err(core_err)?;
    let violated = !tr.violations(tol).is_empty();
    let mut t = Table::new(vec!["name", "value", "status"]);
    for s in &tr.slacks {
        let status = serde_json::to_value(s.status).map_err(|e| CliError::Internal(e.to_string()))?;
        t.push(vec![s.name.into(), s.value.into(), status.as_str().unwrap_or_default().into()]);
    }
    Ok(Outcome {
        report: Report::new(&tr, t)?,
        violated,
    })
}

fn comass_table(est: &ComassEstimate) -> Table {
    let mut t = Table::new(vec!["restart", "best_value"]);
    for (i, v) in est.trace.iter().enumerate() {
        t.push(vec![i.into(), (*v).into()]);
    }
    t
}

fn comass(pontryagin: Option<&[usize]>, covector: Option<&PathBuf>, cli: &Cli) -> Result<Outcome, CliError> {
    let budget = match cli.budget {
        Some(b) if b.max_iters == 0 && b.restarts > 0 => Budget::new(b.restarts, DEFAULT_BUDGET.max_iters),
        Some(b) => b,
        None => DEFAULT_BUDGET,
    };
    match (pontryagin, covector) {
        (Some(&[n, m]), None) => {
            let est = comass_pontryagin(n, m, budget, cli.seed).map_err(core_err)?;
            let known = known_pontryagin_comass(n, m);
            let violated = known.is_some_and(|k| est.value > k + COMASS_EXCESS_TOL);
            let value = json!({ "n": n, "m": m, "known_value": known, "estimate": est });
            Ok(Outcome {
                report: Report::new(&value, comass_table(&est))?,
                violated,
            })
        }
        (None, Some(path)) => {
            let phi = CovectorFile::load(path)?.covector()?;
            let est = comass_pcovector(&phi, budget, cli.seed).map_err(core_err)?;
            let value = json!({ "covector": phi, "estimate": est });
            Ok(Outcome {
                report: Report::new(&value, comass_table(&est))?,
                violated: false,
            })
        }
        _ => Err(CliError::Usage("comass needs either --pontryagin N M or --covector FILE".into())),
    }
}

fn check_h(file: &ConfigFile, tol: f64) -> Result<Outcome, CliError> {
    let (h, c) = file
        .sff()?
        .ok_or_else(|| CliError::Usage("check-h needs an \"h\" block with the ambient curvature \"c\"".into()))?;
    let curv = curvature_check(&h, c).map_err(core_err)?;
    let (lhs_1a, rhs_1a) = inequality_1a_sides(&h);
    let (shape, austere) = if h.n() == 3 {
        (
            Some(thm5_shape_check(&h).map_err(core_err)?),
            Some(is_austere(&h, tol.max(1e-12)).map_err(core_err)?),
        )
    } else {
        (None, None)
    };
    let scale = h.as_configuration().norm_sq() + c.abs();
    let violated = proven_case(h.n(), h.m()) && curv.slack < -tol * scale.max(1.0);
    let mut fields = vec![
        ("rho", curv.rho.into()),
        ("rho_perp", curv.rho_perp.into()),
        ("mean_h_sq", curv.mean_h_sq.into()),
        ("c", c.into()),
        ("slack", curv.slack.into()),
        ("lhs_1a", lhs_1a.into()),
        ("rhs_1a", rhs_1a.into()),
    ];
    if let (Some(s), Some(a)) = (&shape, austere) {
        fields.push(("equality_shape", s.matches.into()));
        fields.push(("austere", a.into()));
    }
    let value = json!({
        "curvature": curv,
        "coordinate_form": { "lhs": lhs_1a, "rhs": rhs_1a },
        "equality_shape": shape,
        "austere": austere,
    });
    Ok(Outcome {
        report: Report::new(&value, Table::record(fields))?,
        violated,
    })
}

/// Parses arguments, runs the command and writes the report. Returns the
/// process exit code.
pub fn main_with(cli: Cli) -> u8 {
    if let Err(e) = configure_threads() {
        eprintln!("ddvv-lab: {e}");
        return e.exit_code();
    }
    let outcome = run(&cli).and_then(|o| o.report.render(cli.format).map(|text| (o.violated, text)));
    let (violated, text) = match outcome {
        Ok(v) => v,
        Err(e) => {
            eprintln!("ddvv-lab: {e}");
            return e.exit_code();
        }
    };
    let written = match &cli.out {
        Some(path) => std::fs::write(path, &text).map_err(|e| format!("{}: {e}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    };
    if let Err(e) = written {
        eprintln!("ddvv-lab: {e}");
        return 2;
    }
    if violated {
        eprintln!("ddvv-lab: invariant violated");
        1
    } else {
        0
    }
}

