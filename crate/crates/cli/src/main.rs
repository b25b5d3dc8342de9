//! `opmod` command-line front end.
//!
//! Every subcommand writes `<out>/<command>.json` and/or `.csv` plus a
//! two-column `<command>.tsv` (parameter against ratio). Exit status is 0 on
//! success, 1 when an invariant check fails during the run and 2 on invalid
//! input.

mod commands;
mod parse;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use opmod::par::{self, Exec};
use opmod::report::{write_tsv, Format, Report};
use opmod::Error;
use serde_json::{json, Value};

use commands::{Builtin, Ctx, ExperimentConfig, Outcome, SamplingKind};

#[derive(Parser, Debug)]
#[command(name = "opmod", version, about = "Operator modulus of continuity experiments")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug, Clone)]
struct Common {
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Relative gap at which multiplier norm solves stop.
    #[arg(long, global = true, default_value_t = 1e-4)]
    tol: f64,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Both)]
    format: FormatArg,
    /// Worker threads; 0 uses every core, 1 runs sequentially.
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
enum FormatArg {
    Json,
    Csv,
    Both,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Json => Format::Json,
            FormatArg::Csv => Format::Csv,
            FormatArg::Both => Format::Both,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Check the double operator integral identity on random triples.
    DoiCheck {
        #[arg(long, default_value_t = 8)]
        n: usize,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        /// Comma-separated function names.
        #[arg(long, default_value = "abs")]
        functions: String,
    },
    /// Certified Schur multiplier norm of a builtin matrix.
    Multnorm {
        #[arg(long, value_enum)]
        builtin: Builtin,
        #[arg(long, default_value_t = 4)]
        n: usize,
        /// Function for `diffquot`.
        #[arg(long, default_value = "abs")]
        function: String,
        /// Grid points for `diffquot` (default: n uniform points on [-1, 1]).
        #[arg(long, allow_hyphen_values = true, default_value = "")]
        points: String,
    },
    /// Bracket on the L̂¹ norm of a function restricted to an interval.
    Hatnorm {
        #[arg(long)]
        function: String,
        #[arg(long, allow_hyphen_values = true, default_value = "-1,1")]
        interval: String,
    },
    /// Certified lower bounds for Ω♭ from explicit witnesses.
    OmegaLower {
        #[arg(long, default_value = "abs")]
        function: String,
        #[arg(long, default_value_t = 1.0)]
        a: f64,
        #[arg(long, default_value = "0.125,0.0625")]
        deltas: String,
    },
    /// δ-net upper bounds for Ω♭.
    OmegaUpper {
        #[arg(long, default_value = "abs")]
        function: String,
        #[arg(long, allow_hyphen_values = true, default_value = "-1,1")]
        interval: String,
        #[arg(long, default_value = "0.25,0.125")]
        deltas: String,
    },
    /// Sweep of the commutator lower bound for |x| against δ log(2 + log(a/δ)).
    Kato {
        #[arg(long, default_value_t = 1.0)]
        a: f64,
        #[arg(long, default_value_t = 4)]
        kmin: u32,
        #[arg(long, default_value_t = 10)]
        kmax: u32,
    },
    /// Integral upper bounds for the operator modulus.
    ConcaveBounds {
        #[arg(long, default_value = "kappa")]
        function: String,
        #[arg(long, allow_hyphen_values = true, default_value = "-1,1")]
        interval: String,
        #[arg(long, default_value = "0.125,0.0625,0.03125")]
        deltas: String,
    },
    /// ε-entropy of a finite union of intervals and points.
    Entropy {
        /// `LO,HI`; repeat for several intervals.
        #[arg(long, allow_hyphen_values = true)]
        intervals: Vec<String>,
        #[arg(long, allow_hyphen_values = true, default_value = "")]
        points: String,
        #[arg(long)]
        eps: f64,
    },
    /// Quasicommutator ratio against the entropy bound on random triples.
    Qcom {
        #[arg(long, default_value = "linear:1")]
        function: String,
        #[arg(long, allow_hyphen_values = true, default_value = "0,1")]
        interval: String,
        #[arg(long, default_value_t = 6)]
        n: usize,
        #[arg(long, default_value_t = 5)]
        trials: usize,
    },
    /// Multiplier norm of Δ₀|x| on ±{1..n} against 1 + log 2n.
    Logn {
        #[arg(long, default_value = "4,8,16,32")]
        sizes: String,
    },
    /// Reconstruction errors and kernel masses of the sampling formulas.
    Sampling {
        #[arg(long, value_enum, default_value_t = SamplingKind::Line)]
        kind: SamplingKind,
        /// Exponential type on the line, polynomial degree on the circle.
        #[arg(long, default_value_t = 1)]
        degree: usize,
        #[arg(long, default_value_t = 200)]
        n_max: usize,
        #[arg(long, default_value_t = 10)]
        points: usize,
    },
    /// Seeded search for lacunary polynomials with large Δ₀ multiplier norm.
    LacunarySearch {
        #[arg(long, default_value_t = 4)]
        max_level: usize,
        #[arg(long, default_value_t = 8)]
        trials: usize,
    },
    /// Merge earlier JSON outputs into one comparison table.
    Report {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
    },
}

/// Failure before any computation: bad flags or parameters.
#[derive(Debug)]
struct InputError(anyhow::Error);

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:#}", self.0)
    }
}

impl std::error::Error for InputError {}

fn input<T>(r: Result<T>) -> Result<T> {
    r.map_err(|e| InputError(e).into())
}

fn is_input_error(e: &anyhow::Error) -> bool {
    if e.downcast_ref::<InputError>().is_some() {
        return true;
    }
    matches!(
        e.downcast_ref::<Error>(),
        Some(
            Error::Invalid(_)
                | Error::Domain { .. }
                | Error::Kink { .. }
                | Error::Unsupported(_)
                | Error::Precondition(_)
                | Error::TooLarge { .. }
        )
    )
}

fn name(cmd: &Cmd) -> &'static str {
    match cmd {
        Cmd::DoiCheck { .. } => "doi-check",
        Cmd::Multnorm { .. } => "multnorm",
        Cmd::Hatnorm { .. } => "hatnorm",
        Cmd::OmegaLower { .. } => "omega-lower",
        Cmd::OmegaUpper { .. } => "omega-upper",
        Cmd::Kato { .. } => "kato",
        Cmd::ConcaveBounds { .. } => "concave-bounds",
        Cmd::Entropy { .. } => "entropy",
        Cmd::Qcom { .. } => "qcom",
        Cmd::Logn { .. } => "logn",
        Cmd::Sampling { .. } => "sampling",
        Cmd::LacunarySearch { .. } => "lacunary-search",
        Cmd::Report { .. } => "report",
    }
}

fn value_name(v: impl clap::ValueEnum) -> String {
    v.to_possible_value().map(|p| p.get_name().to_string()).unwrap_or_default()
}

fn positive(what: &str, x: f64) -> Result<f64> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(InputError(anyhow::anyhow!("{what} must be positive, got {x}")).into())
    }
}

fn deltas(s: &str) -> Result<Vec<f64>> {
    let v = input(parse::numbers(s))?;
    if v.is_empty() {
        return input(Err(anyhow::anyhow!("need at least one δ")));
    }
    v.iter().try_for_each(|&d| positive("δ", d).map(drop))?;
    Ok(v)
}

/// A validated run: parameters recorded in the report and the work to do.
type Job = Box<dyn FnOnce(&Ctx) -> Result<Outcome> + Send>;

fn plan(cmd: Cmd) -> Result<(BTreeMap<String, Value>, Job)> {
    let mut p = BTreeMap::new();
    let job: Job = match cmd {
        Cmd::DoiCheck { n, trials, functions } => {
            let fs = functions.split(',').map(parse::scalar_fn).collect::<Result<Vec<_>>>();
            let fs = input(fs)?;
            if n == 0 || trials == 0 {
                return input(Err(anyhow::anyhow!("n and trials must be positive")));
            }
            p.insert("n".into(), json!(n));
            p.insert("trials".into(), json!(trials));
            p.insert("functions".into(), json!(functions));
            Box::new(move |c| commands::doi_check(c, n, trials, &fs))
        }
        Cmd::Multnorm { builtin, n, function, points } => {
            let f = input(parse::scalar_fn(&function))?;
            let pts = input(parse::numbers(&points))?;
            if n == 0 && pts.is_empty() {
                return input(Err(anyhow::anyhow!("n must be positive")));
            }
            p.insert("builtin".into(), json!(value_name(builtin)));
            p.insert("n".into(), json!(n));
            if builtin == Builtin::Diffquot {
                p.insert("function".into(), json!(function));
                p.insert("points".into(), json!(pts));
            }
            Box::new(move |c| commands::multnorm(c, builtin, n, &f, &pts))
        }
        Cmd::Hatnorm { function, interval } => {
            let f = input(parse::scalar_fn(&function))?;
            let j = input(parse::interval(&interval))?;
            p.insert("function".into(), json!(function));
            p.insert("interval".into(), json!([j.0, j.1]));
            Box::new(move |_| commands::hatnorm(&f, j))
        }
        Cmd::OmegaLower { function, a, deltas: ds } => {
            let f = input(parse::scalar_fn(&function))?;
            let a = positive("a", a)?;
            let ds = deltas(&ds)?;
            p.insert("function".into(), json!(function));
            p.insert("a".into(), json!(a));
            p.insert("deltas".into(), json!(ds));
            Box::new(move |c| commands::omega_lower(c, &f, a, &ds))
        }
        Cmd::OmegaUpper { function, interval, deltas: ds } => {
            let f = input(parse::scalar_fn(&function))?;
            let j = input(parse::interval(&interval))?;
            let ds = deltas(&ds)?;
            p.insert("function".into(), json!(function));
            p.insert("interval".into(), json!([j.0, j.1]));
            p.insert("deltas".into(), json!(ds));
            Box::new(move |c| commands::omega_upper(c, &f, j, &ds))
        }
        Cmd::Kato { a, kmin, kmax } => {
            let a = positive("a", a)?;
            if kmin > kmax {
                return input(Err(anyhow::anyhow!("empty range k = {kmin}..{kmax}")));
            }
            p.insert("a".into(), json!(a));
            p.insert("kmin".into(), json!(kmin));
            p.insert("kmax".into(), json!(kmax));
            Box::new(move |c| commands::kato(c, a, kmin, kmax))
        }
        Cmd::ConcaveBounds { function, interval, deltas: ds } => {
            let f = input(parse::scalar_fn(&function))?;
            let j = input(parse::interval(&interval))?;
            let ds = deltas(&ds)?;
            p.insert("function".into(), json!(function));
            p.insert("interval".into(), json!([j.0, j.1]));
            p.insert("deltas".into(), json!(ds));
            Box::new(move |_| commands::concave_bounds(&f, j, &ds))
        }
        Cmd::Entropy { intervals, points, eps } => {
            let iv = input(intervals.iter().map(|s| parse::interval(s)).collect::<Result<Vec<_>>>())?;
            let pts = input(parse::numbers(&points))?;
            let eps = positive("ε", eps)?;
            if iv.is_empty() && pts.is_empty() {
                return input(Err(anyhow::anyhow!("the set is empty; pass --intervals or --points")));
            }
            p.insert("intervals".into(), json!(iv.iter().map(|(a, b)| [*a, *b]).collect::<Vec<_>>()));
            p.insert("points".into(), json!(pts));
            p.insert("eps".into(), json!(eps));
            Box::new(move |_| commands::entropy(&iv, &pts, eps))
        }
        Cmd::Qcom { function, interval, n, trials } => {
            let f = input(parse::scalar_fn(&function))?;
            let j = input(parse::interval(&interval))?;
            if n == 0 || trials == 0 {
                return input(Err(anyhow::anyhow!("n and trials must be positive")));
            }
            p.insert("function".into(), json!(function));
            p.insert("interval".into(), json!([j.0, j.1]));
            p.insert("n".into(), json!(n));
            p.insert("trials".into(), json!(trials));
            Box::new(move |c| commands::qcom(c, &f, j, n, trials))
        }
        Cmd::Logn { sizes } => {
            let v = input(parse::numbers(&sizes))?;
            if v.is_empty() || v.iter().any(|&x| !(x >= 1.0 && x.fract() == 0.0)) {
                return input(Err(anyhow::anyhow!("sizes must be positive integers")));
            }
            let v: Vec<usize> = v.into_iter().map(|x| x as usize).collect();
            p.insert("sizes".into(), json!(v));
            Box::new(move |c| commands::logn(c, &v))
        }
        Cmd::Sampling { kind, degree, n_max, points } => {
            if degree == 0 || n_max == 0 || points == 0 {
                return input(Err(anyhow::anyhow!("degree, n-max and points must be positive")));
            }
            p.insert("kind".into(), json!(value_name(kind)));
            p.insert("degree".into(), json!(degree));
            p.insert("n_max".into(), json!(n_max));
            p.insert("points".into(), json!(points));
            Box::new(move |c| commands::sampling(c, kind, degree, n_max, points))
        }
        Cmd::LacunarySearch { max_level, trials } => {
            if max_level == 0 || trials == 0 {
                return input(Err(anyhow::anyhow!("max-level and trials must be positive")));
            }
            p.insert("max_level".into(), json!(max_level));
            p.insert("trials".into(), json!(trials));
            Box::new(move |c| commands::lacunary_search(c, max_level, trials))
        }
        Cmd::Report { inputs } => {
            p.insert("inputs".into(), json!(inputs.iter().map(|p| p.display().to_string()).collect::<Vec<_>>()));
            Box::new(move |_| commands::report(&inputs))
        }
    };
    Ok((p, job))
}

fn write_outputs(cfg: &ExperimentConfig, format: Format, outcome: &Outcome) -> Result<Vec<PathBuf>> {
    let report = Report::new(cfg.command.clone(), cfg.params.clone(), outcome.records.clone());
    let mut paths = report.write(&cfg.out, &cfg.command, format)?;
    let rows: Vec<(f64, f64)> = report
        .records
        .iter()
        .enumerate()
        .filter_map(|(i, r)| {
            let x = outcome.tsv_x.and_then(|k| r.param_f64(k)).unwrap_or(i as f64);
            r.ratio.map(|y| (x, y))
        })
        .collect();
    let tsv = cfg.out.join(format!("{}.tsv", cfg.command));
    write_tsv(&tsv, &rows)?;
    paths.push(tsv);
    Ok(paths)
}

fn run(cli: Cli) -> Result<ExitCode> {
    let common = cli.common;
    let command = name(&cli.cmd).to_string();
    positive("tol", common.tol)?;
    let (mut params, job) = plan(cli.cmd)?;
    params.insert("seed".into(), json!(common.seed));
    params.insert("tol".into(), json!(common.tol));
    let cfg = ExperimentConfig { command, params, out: common.out.clone() };
    let ctx = Ctx {
        seed: common.seed,
        tol: common.tol,
        exec: if common.jobs == 1 { Exec::Sequential } else { Exec::Auto },
    };
    let outcome = par::with_jobs(common.jobs, move || job(&ctx))?;
    let paths = write_outputs(&cfg, common.format.into(), &outcome)?;
    for p in &paths {
        println!("wrote {}", display(p));
    }
    println!("{}: {} records", cfg.command, outcome.records.len());
    if outcome.violations.is_empty() {
        Ok(ExitCode::SUCCESS)
    } else {
        for v in &outcome.violations {
            eprintln!("invariant violated: {v}");
        }
        Ok(ExitCode::from(1))
    }
}

fn display(p: &Path) -> String {
    p.display().to_string()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(if is_input_error(&e) { 2 } else { 1 })
        }
    }
}
