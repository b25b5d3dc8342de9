use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, SQRT_2};
use std::path::PathBuf;

use anyhow::{bail, Result};
use opmod::linalg::C64;
use opmod::modulus::{
    concave_reduction, concave_upper_integral, covers, doi_identity_residual, doi_tolerance, epsilon_entropy, fm_upper,
    kato_experiment, kato_fit, kato_grids, logn_sharp_constant, modnep_upper_integral, omega_lower_witness,
    omega_probe_lower, omega_upper_net, qcom_ratio, CompactSetDescr, OperatorTriple,
};
use opmod::par::Exec;
use opmod::report::{BoundRecord, Report};
use opmod::sampling::{
    circle_kernel_mass, line_kernel_mass, reconstruct_circle, reconstruct_line, BandlimitedFn, KERNEL_MASS_BOUND,
};
use opmod::schur::{
    difference_quotient_problem, geometric_ratio_problem, hilbert_multiplier, mult_norm_with, toral_lambda,
    toral_lambda_exact, Kernel, MultiplierProblem, SolverOptions,
};
use opmod::func::second_derivative_summary;
use opmod::{fourier, sampling, Grid, ScalarFn};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

/// Shared settings of one run.
#[derive(Debug, Clone)]
pub struct Ctx {
    pub seed: u64,
    pub tol: f64,
    pub exec: Exec,
}

impl Ctx {
    pub fn opts(&self) -> SolverOptions {
        SolverOptions::with_tol(self.tol)
    }
}

/// Records of one run plus any invariant violations found while producing them.
#[derive(Debug, Default)]
pub struct Outcome {
    pub records: Vec<BoundRecord>,
    pub violations: Vec<String>,
    /// Parameter plotted against the ratio in the TSV.
    pub tsv_x: Option<&'static str>,
}

impl Outcome {
    fn check(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        if !ok {
            self.violations.push(msg());
        }
    }
}

/// Validated command, its typed parameters and where its artifacts go.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub command: String,
    pub params: BTreeMap<String, Value>,
    pub out: PathBuf,
}

pub fn doi_check(ctx: &Ctx, n: usize, trials: usize, functions: &[ScalarFn]) -> Result<Outcome> {
    let mut out = Outcome { tsv_x: Some("trial"), ..Default::default() };
    for f in functions {
        for trial in 0..trials {
            let seed = ctx.seed.wrapping_mul(1_000_003).wrapping_add(trial as u64);
            let t = OperatorTriple::random(n, (-1.0, 1.0), seed)?;
            let res = doi_identity_residual(f, &t)?;
            let tol = doi_tolerance(f, &t)?;
            out.check(res <= tol, || format!("{f} trial {trial}: residual {res:e} > {tol:e}"));
            out.records.push(
                BoundRecord::new("doi", res, tol).param("function", f.to_string()).param("n", n).param("trial", trial),
            );
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Builtin {
    Hilbert,
    ToralLambda,
    Diffquot,
    Geometric,
}

pub fn multnorm(ctx: &Ctx, builtin: Builtin, n: usize, function: &ScalarFn, points: &[f64]) -> Result<Outcome> {
    let (problem, reference, note): (MultiplierProblem, f64, &str) = match builtin {
        Builtin::Hilbert => (hilbert_multiplier(n), FRAC_PI_2, "rhs is the limit π/2"),
        Builtin::ToralLambda => (toral_lambda(n)?, toral_lambda_exact(n), "rhs is the exact value"),
        Builtin::Geometric => {
            let p = geometric_ratio_problem(n)?;
            let m = p.matrix.max_abs();
            (p, m, "rhs is the largest entry, a lower bound")
        }
        Builtin::Diffquot => {
            let g = if points.is_empty() { Grid::uniform(-1.0, 1.0, n)? } else { Grid::line(points.to_vec())? };
            let p = difference_quotient_problem(&Kernel::DividedDifference { function: function.clone() }, &g, &g)?;
            let m = p.matrix.max_abs();
            (p, m, "rhs is the largest entry, a lower bound")
        }
    };
    let opts = SolverOptions { cap: ctx.opts().cap.max(problem.matrix.rows().max(problem.matrix.cols())), ..ctx.opts() };
    let c = mult_norm_with(&problem, &opts)?;
    let mut out = Outcome { tsv_x: Some("n"), ..Default::default() };
    if let Err(e) = c.verify(&problem.matrix) {
        out.violations.push(format!("{}: {e}", problem.label));
    }
    out.records.push(
        BoundRecord::new("multnorm", c.value(), reference)
            .param("builtin", clap::ValueEnum::to_possible_value(&builtin).map(|p| p.get_name().to_string()).unwrap_or_default())
            .param("n", n)
            .param("label", problem.label.clone())
            .param("lower", c.lower.value)
            .param("upper", c.upper.value)
            .param("gap", c.gap)
            .param("iterations", c.iterations)
            .param("converged", c.converged)
            .note(note),
    );
    Ok(out)
}

pub fn hatnorm(f: &ScalarFn, interval: (f64, f64)) -> Result<Outcome> {
    let e = fourier::hat_norm_estimate(f, interval)?;
    let mut out = Outcome::default();
    out.check(e.lower <= e.upper.value + e.error_bound, || {
        format!("sup-norm {} exceeds the upper construction {}", e.lower, e.upper.value)
    });
    for c in &e.candidates {
        out.records.push(
            BoundRecord::new("hatnorm", e.lower, c.value)
                .param("function", f.to_string())
                .param("lo", interval.0)
                .param("hi", interval.1)
                .param("method", serde_json::to_value(c.method)?)
                .note("lhs is the probe sup-norm, rhs an upper construction"),
        );
    }
    if let ScalarFn::FaKernel { a } = f {
        let q = fourier::hat_norm_quadrature(f, 200.0 * a, a / 64.0)?;
        out.check(q.value >= 1.0 / a - 1e-3 && q.value <= 2.0 / a + 1e-3, || {
            format!("quadrature {} outside [1/a, 2/a]", q.value)
        });
        out.records.push(
            BoundRecord::new("hatnorm-quadrature", q.value, 1.0 / a)
                .param("function", f.to_string())
                .param("a", *a)
                .param("error_bound", q.error_bound),
        );
    }
    Ok(out)
}

pub fn omega_lower(ctx: &Ctx, f: &ScalarFn, a: f64, deltas: &[f64]) -> Result<Outcome> {
    let mut out = Outcome { tsv_x: Some("delta"), ..Default::default() };
    for &d in deltas {
        let (l, m) = kato_grids(a, d)?;
        let p = difference_quotient_problem(&Kernel::DividedDifference { function: f.clone() }, &l, &m)?;
        let c = mult_norm_with(&p, &ctx.opts())?;
        let b = omega_lower_witness(f, &l, &m, d, &c)?;
        if let Err(e) = b.verify() {
            out.violations.push(format!("δ={d}: {e}"));
        }
        out.records.push(
            BoundRecord::new("omega-lower", b.certified_lower, d)
                .param("function", f.to_string())
                .param("a", a)
                .param("delta", d)
                .param("grid", l.len())
                .param("norm_r", b.measured.norm_r)
                .param("norm_commut", b.measured.norm_commut)
                .param("measured", b.measured.norm_fcommut)
                .note("lhs is a certified lower bound for Ω♭(δ); ratio is Ω♭/δ"),
        );
    }
    Ok(out)
}

pub fn omega_upper(ctx: &Ctx, f: &ScalarFn, interval: (f64, f64), deltas: &[f64]) -> Result<Outcome> {
    let set = CompactSetDescr::interval(interval.0, interval.1)?;
    let mut out = Outcome { tsv_x: Some("delta"), ..Default::default() };
    for &d in deltas {
        let r = omega_upper_net(f, &set, d, 0.5 * d, &ctx.opts())?;
        out.check(r.lhs <= r.rhs, || format!("δ={d}: ω(δ) = {} exceeds the upper bound {}", r.lhs, r.rhs));
        out.records.push(r);
    }
    Ok(out)
}

pub fn kato(ctx: &Ctx, a: f64, kmin: u32, kmax: u32) -> Result<Outcome> {
    if kmin > kmax {
        bail!("empty range k = {kmin}..{kmax}");
    }
    let deltas: Vec<f64> = (kmin..=kmax).map(|k| 2f64.powi(-(k as i32))).collect();
    let pts = kato_experiment(a, &deltas, &ctx.opts(), ctx.exec)?;
    let mut out = Outcome { tsv_x: Some("delta"), ..Default::default() };
    for p in &pts {
        if let Err(e) = p.bundle.verify() {
            out.violations.push(format!("δ={}: {e}", p.delta));
        }
        out.records.push(p.record.clone());
    }
    let (c, resid) = kato_fit(&pts);
    out.records.push(
        BoundRecord::new("kato-fit", resid, 0.3)
            .param("a", a)
            .param("c", c)
            .param("points", pts.len())
            .note("lhs is the relative residual of L(δ) ≈ c·δ log(2 + log(a/δ))"),
    );
    Ok(out)
}

pub fn concave_bounds(f: &ScalarFn, interval: (f64, f64), deltas: &[f64]) -> Result<Outcome> {
    let set = CompactSetDescr::interval(interval.0, interval.1)?;
    let (probe, _) = set.probe(4001)?;
    let reduced = concave_reduction(f);
    let measure = second_derivative_summary(f).ok();
    let mut out = Outcome { tsv_x: Some("delta"), ..Default::default() };
    for &d in deltas {
        let low = omega_probe_lower(f, &set, d)?;
        let base = |name: &str, rhs: f64| {
            BoundRecord::new(name, low, rhs).param("function", f.to_string()).param("delta", d)
        };
        let m = modnep_upper_integral(f, d, &probe)?;
        out.check(low <= m, || format!("δ={d}: ω = {low} exceeds modnep bound {m}"));
        out.records.push(base("modnep", m).note("rhs omits the absolute constant"));
        if let Some(g) = &reduced {
            if let Ok(v) = concave_upper_integral(g, d) {
                out.records.push(base("concave", v).param("reduced", g.to_string()).note("rhs omits the absolute constant"));
            }
        }
        if let Some(mu) = &measure {
            if let Ok(v) = fm_upper(mu, d) {
                out.records.push(base("fm", v).note("rhs omits the absolute constant"));
            }
        }
    }
    Ok(out)
}

pub fn entropy(intervals: &[(f64, f64)], points: &[f64], eps: f64) -> Result<Outcome> {
    let set = CompactSetDescr::new(intervals.to_vec(), points.to_vec())?;
    let e = epsilon_entropy(&set, eps)?;
    let mut out = Outcome::default();
    out.check(covers(&set, e.net.points(), eps), || "returned net does not cover the set".into());
    let minimal = e.separated.len() == e.cardinality;
    out.records.push(
        BoundRecord::new("entropy", e.cardinality as f64, e.separated.len() as f64)
            .param("eps", eps)
            .param("cardinality", e.cardinality)
            .param("entropy", e.value)
            .param("net", e.net.points().to_vec())
            .param("minimal", minimal)
            .note("lhs is the net size, rhs the size of a 2ε-separated set"),
    );
    Ok(out)
}

pub fn qcom(ctx: &Ctx, f: &ScalarFn, interval: (f64, f64), n: usize, trials: usize) -> Result<Outcome> {
    let set = CompactSetDescr::interval(interval.0, interval.1)?;
    let mut out = Outcome { tsv_x: Some("eps"), ..Default::default() };
    for trial in 0..trials {
        let seed = ctx.seed.wrapping_mul(1_000_003).wrapping_add(trial as u64);
        let t = OperatorTriple::random(n, interval, seed)?;
        let r = qcom_ratio(f, &t, &set)?.param("trial", trial);
        if f.as_affine().is_some() {
            out.check(r.lhs <= r.rhs * (1.0 + 1e-9) + 1e-12, || format!("trial {trial}: {} > {}", r.lhs, r.rhs));
        }
        out.records.push(r);
    }
    Ok(out)
}

pub fn logn(ctx: &Ctx, sizes: &[usize]) -> Result<Outcome> {
    let mut out = Outcome { tsv_x: Some("card"), ..Default::default() };
    let mut prev = 0.0;
    for &n in sizes {
        let pts: Vec<f64> = (1..=n).flat_map(|k| [k as f64, -(k as f64)]).collect();
        let r = logn_sharp_constant(&Grid::line(pts)?, &ctx.opts())?.param("n", n);
        let lower = r.param_f64("lower").unwrap_or(0.0);
        out.check(lower <= r.lhs + 1e-12, || format!("n={n}: lower {lower} above upper {}", r.lhs));
        if r.lhs <= prev {
            out.records.push(r.clone().note("not increasing"));
        } else {
            out.records.push(r.clone());
        }
        prev = r.lhs;
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SamplingKind {
    Line,
    Circle,
}

pub fn sampling(ctx: &Ctx, kind: SamplingKind, degree: usize, n_max: usize, points: usize) -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let mut out = Outcome { tsv_x: Some("point"), ..Default::default() };
    match kind {
        SamplingKind::Line => {
            let sigma = degree.max(1) as f64;
            let f = BandlimitedFn::cos(sigma, sigma)?;
            let reach = 0.8 * std::f64::consts::PI * n_max as f64 / (2.0 * sigma);
            let reach = reach.min(10.0);
            for i in 0..points {
                let z = rng.random_range(-reach..reach);
                let r = reconstruct_line(&f, z, n_max, 0.0)?;
                let err = (r.value - f.eval(z)).norm();
                out.check(err <= r.tail_bound + 1e-12, || format!("z={z}: error {err:e} > tail bound {:e}", r.tail_bound));
                let mass = line_kernel_mass(sigma * z, n_max);
                out.check(mass <= KERNEL_MASS_BOUND + 1e-8, || format!("z={z}: kernel mass {mass} > √2"));
                out.records.push(BoundRecord::new("sampling-line", err, r.tail_bound).param("point", i).param("z", z));
                out.records.push(BoundRecord::new("line-mass", mass, SQRT_2).param("point", i).param("z", z));
            }
        }
        SamplingKind::Circle => {
            let n = degree.max(1);
            let coeffs: Vec<C64> =
                (0..2 * n + 1).map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
            let f = ScalarFn::trig_poly(coeffs)?;
            let scale: f64 = sampling::trig_coefficients(&f)?.1.iter().map(|c| c.norm()).sum();
            let tau = rng.random_range(0.0..std::f64::consts::TAU);
            for i in 0..points {
                let z = C64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU));
                let v = reconstruct_circle(&f, n, tau, z)?;
                let err = (v - f.eval_circle(z)?).norm();
                let tol = 1e-10 * scale.max(1.0);
                out.check(err <= tol, || format!("z={z}: circle reconstruction error {err:e}"));
                let mass = circle_kernel_mass(n, tau, z)?;
                out.check(mass <= KERNEL_MASS_BOUND + 1e-8, || format!("z={z}: kernel mass {mass} > √2"));
                out.records.push(BoundRecord::new("sampling-circle", err, tol).param("point", i).param("n", n));
                out.records.push(BoundRecord::new("circle-mass", mass, SQRT_2).param("point", i).param("n", n));
            }
        }
    }
    Ok(out)
}

pub fn lacunary_search(ctx: &Ctx, max_level: usize, trials: usize) -> Result<Outcome> {
    let mut out = Outcome { tsv_x: Some("level"), ..Default::default() };
    for level in 1..=max_level {
        let s = sampling::lacunary_search(level, trials, ctx.seed, &ctx.opts(), ctx.exec)?;
        let reference = (1.0 + (s.degree as f64).ln()).sqrt();
        out.records.push(
            BoundRecord::new("lacunary", s.best.score, reference)
                .param("level", level)
                .param("degree", s.degree)
                .param("grid", s.grid)
                .param("best_trial", s.best.trial)
                .param("trials", trials)
                .note("measured growth curve; rhs is √(1 + log d) without constant"),
        );
    }
    Ok(out)
}

pub fn report(inputs: &[PathBuf]) -> Result<Outcome> {
    if inputs.is_empty() {
        bail!("report needs at least one input file");
    }
    let mut out = Outcome::default();
    for p in inputs {
        let r = Report::load(p)?;
        for bad in r.inconsistent_records() {
            out.violations.push(format!("{}: record {} has ratio inconsistent with lhs/rhs", p.display(), bad.name));
        }
        out.records.extend(r.records.into_iter().map(|rec| rec.param("source", r.command.clone())));
    }
    Ok(out)
}
