//! Schur multiplier norms of finite matrices with two-sided certificates.
//!
//! The norm equals the γ₂ factorization norm, which has the dual form
//! `max { ‖D_√u M D_√v‖_tr : u, v probability vectors }`. The solver climbs
//! this concave objective with a multiplicative fixed-point update. Every
//! iterate yields both a lower witness (a contraction `B` with
//! `‖M⋆B‖ ≥ φ(u,v)`) and an explicit factorization `M_ij = ⟨row_i, col_j⟩`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::func::{divided_diff, DiagonalRule, Grid, ScalarFn};
use crate::linalg::{op_norm, op_norm_from, vec_norm, CMat, JacobiWork, Svd, C64, ZERO};
use crate::par::{self, Exec};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Provenance {
    /// Kernel name, e.g. `divided-difference` or `ratio`.
    pub kernel: String,
    pub function: Option<ScalarFn>,
    pub rows: Grid,
    pub cols: Grid,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MultiplierProblem {
    pub label: String,
    pub matrix: CMat,
    pub provenance: Option<Provenance>,
}

impl MultiplierProblem {
    pub fn new(label: impl Into<String>, matrix: CMat) -> Result<Self> {
        if !matrix.is_finite() {
            return invalid("multiplier matrix has non-finite entries");
        }
        if matrix.rows() == 0 || matrix.cols() == 0 {
            return invalid("multiplier matrix is empty");
        }
        Ok(MultiplierProblem { label: label.into(), matrix, provenance: None })
    }

    pub fn transpose(&self) -> Self {
        MultiplierProblem {
            label: format!("{}^T", self.label),
            matrix: self.matrix.transpose(),
            provenance: None,
        }
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        MultiplierProblem { label: format!("{}[sub]", self.label), matrix: self.matrix.submatrix(rows, cols), provenance: None }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LowerWitness {
    pub value: f64,
    pub witness: CMat,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UpperFactorization {
    pub value: f64,
    pub row_vectors: Vec<Vec<C64>>,
    pub col_vectors: Vec<Vec<C64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MultiplierCertificate {
    pub label: String,
    pub lower: LowerWitness,
    pub upper: UpperFactorization,
    pub gap: f64,
    pub iterations: usize,
    pub converged: bool,
    pub tol: f64,
}

/// The JSON face of a certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateSummary {
    pub label: String,
    pub lower: f64,
    pub upper: f64,
    pub gap: f64,
    pub iterations: usize,
    pub converged: bool,
}

pub const WITNESS_SLACK: f64 = 1e-8;

impl MultiplierCertificate {
    pub fn summary(&self) -> CertificateSummary {
        CertificateSummary {
            label: self.label.clone(),
            lower: self.lower.value,
            upper: self.upper.value,
            gap: self.gap,
            iterations: self.iterations,
            converged: self.converged,
        }
    }

    /// Midpoint of the bracket.
    pub fn value(&self) -> f64 {
        0.5 * (self.lower.value + self.upper.value)
    }

    /// Check both witnesses against `m` independently of the solver.
    pub fn verify(&self, m: &CMat) -> std::result::Result<(), String> {
        let mut errs = Vec::new();
        let b = &self.lower.witness;
        if b.shape() != m.shape() {
            errs.push(format!("witness shape {:?} vs matrix {:?}", b.shape(), m.shape()));
        } else {
            let nb = op_norm(b);
            if nb == 0.0 {
                errs.push("zero witness".into());
            }
            let lhs = op_norm(&m.hadamard(b));
            if lhs < self.lower.value * nb - WITNESS_SLACK {
                errs.push(format!("‖M⋆B‖ = {lhs:.12} < lower·‖B‖ = {:.12}", self.lower.value * nb));
            }
        }
        let (rows, cols) = (&self.upper.row_vectors, &self.upper.col_vectors);
        if rows.len() != m.rows() || cols.len() != m.cols() {
            errs.push("factorization has wrong number of vectors".into());
        } else {
            let mut worst: f64 = 0.0;
            for (i, r) in rows.iter().enumerate() {
                for (j, c) in cols.iter().enumerate() {
                    let ip: C64 = r.iter().zip(c).map(|(a, b)| a * b.conj()).sum();
                    worst = worst.max((ip - m[(i, j)]).norm());
                }
            }
            if worst > WITNESS_SLACK {
                errs.push(format!("factorization residual {worst:.3e}"));
            }
            let mr = rows.iter().map(|r| vec_norm(r)).fold(0.0, f64::max);
            let mc = cols.iter().map(|c| vec_norm(c)).fold(0.0, f64::max);
            if mr * mc > self.upper.value + WITNESS_SLACK {
                errs.push(format!("max‖row‖·max‖col‖ = {} > upper {}", mr * mc, self.upper.value));
            }
            let dim = rows.first().map_or(0, |r| r.len());
            if dim > m.rows() + m.cols() {
                errs.push(format!("factorization dimension {dim} too large"));
            }
        }
        if self.lower.value > self.upper.value + 2.0 * self.tol {
            errs.push(format!("lower {} exceeds upper {}", self.lower.value, self.upper.value));
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(errs.join("; "))
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Largest accepted dimension.
    pub cap: usize,
}

pub const DEFAULT_TOL: f64 = 1e-4;
pub const DEFAULT_CAP: usize = 256;

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { tol: DEFAULT_TOL, max_iter: 5000, cap: DEFAULT_CAP }
    }
}

impl SolverOptions {
    pub fn with_tol(tol: f64) -> Self {
        SolverOptions { tol, ..Default::default() }
    }
}

const WEIGHT_FLOOR: f64 = 1e-12;
const OMEGA_MAX: f64 = 4.0;
const OMEGA_GROWTH: f64 = 1.3;

/// Current point of the dual iteration.
struct State {
    u: Vec<f64>,
    v: Vec<f64>,
    phi: f64,
    ru: Vec<f64>,
    rv: Vec<f64>,
    svd: Svd,
    vfull: Vec<C64>,
}

fn evaluate(m: &CMat, u: &[f64], v: &[f64], warm: Option<&[C64]>) -> State {
    let pu: Vec<f64> = u.iter().map(|x| x.sqrt()).collect();
    let pv: Vec<f64> = v.iter().map(|x| x.sqrt()).collect();
    let a = m.scale_rows_cols(&pu, &pv);
    let mut w = JacobiWork::new(&a, warm);
    w.run(60);
    let svd = w.finish(0.0);
    let phi: f64 = svd.s.iter().sum();
    let (mm, nn) = m.shape();
    let mut ru = vec![0.0; mm];
    let mut rv = vec![0.0; nn];
    for (k, &s) in svd.s.iter().enumerate() {
        for i in 0..mm {
            ru[i] += s * svd.u[(i, k)].norm_sqr();
        }
        for j in 0..nn {
            rv[j] += s * svd.v[(j, k)].norm_sqr();
        }
    }
    for i in 0..mm {
        ru[i] /= u[i];
    }
    for j in 0..nn {
        rv[j] /= v[j];
    }
    State { u: u.to_vec(), v: v.to_vec(), phi, ru, rv, svd, vfull: w.v }
}

fn reorthonormalize(v: &mut [C64], n: usize) {
    for j in 0..n {
        for _ in 0..2 {
            for k in 0..j {
                let (lo, hi) = v.split_at_mut(j * n);
                let ck = &lo[k * n..(k + 1) * n];
                let cj = &mut hi[..n];
                let d: C64 = ck.iter().zip(cj.iter()).map(|(a, b)| a.conj() * b).sum();
                for (x, y) in cj.iter_mut().zip(ck) {
                    *x -= d * y;
                }
            }
        }
        let c = &mut v[j * n..(j + 1) * n];
        let nrm = vec_norm(c);
        if nrm > 0.0 {
            c.iter_mut().for_each(|x| *x /= nrm);
        }
    }
}

fn step(x: &[f64], r: &[f64], phi: f64, omega: f64) -> Vec<f64> {
    let mut y: Vec<f64> = x.iter().zip(r).map(|(&a, &b)| a * (b / phi).powf(omega)).collect();
    let s: f64 = y.iter().sum();
    y.iter_mut().for_each(|t| *t = (*t / s).max(WEIGHT_FLOOR));
    let s: f64 = y.iter().sum();
    y.iter_mut().for_each(|t| *t /= s);
    y
}

/// `B = conj(U V*)` restricted to the numerically nonzero singular triplets.
fn witness_from(st: &State) -> CMat {
    let smax = st.svd.s.first().copied().unwrap_or(0.0);
    let r = st.svd.s.iter().take_while(|&&s| s > 1e-13 * smax).count();
    let (m, n) = (st.u.len(), st.v.len());
    CMat::from_fn(m, n, |i, j| {
        let mut acc = ZERO;
        for k in 0..r {
            acc += st.svd.u[(i, k)] * st.svd.v[(j, k)].conj();
        }
        acc.conj()
    })
}

fn factorization_from(st: &State) -> (Vec<Vec<C64>>, Vec<Vec<C64>>) {
    let r = st.svd.s.len();
    let sq: Vec<f64> = st.svd.s.iter().map(|s| s.sqrt()).collect();
    let rows = (0..st.u.len())
        .map(|i| {
            let d = st.u[i].sqrt();
            (0..r).map(|k| st.svd.u[(i, k)] * (sq[k] / d)).collect()
        })
        .collect();
    let cols = (0..st.v.len())
        .map(|j| {
            let d = st.v[j].sqrt();
            (0..r).map(|k| st.svd.v[(j, k)] * (sq[k] / d)).collect()
        })
        .collect();
    (rows, cols)
}

struct Raw {
    lower: f64,
    witness: CMat,
    upper: f64,
    rows: Vec<Vec<C64>>,
    cols: Vec<Vec<C64>>,
    iterations: usize,
    converged: bool,
}

/// Solver on a matrix with no zero rows or columns and `rows ≥ cols`.
fn solve_reduced(m: &CMat, opts: &SolverOptions) -> Raw {
    let (mm, nn) = m.shape();
    let mut st = evaluate(m, &vec![1.0 / mm as f64; mm], &vec![1.0 / nn as f64; nn], None);
    let upper_of = |s: &State| {
        let a = s.ru.iter().cloned().fold(0.0, f64::max);
        let b = s.rv.iter().cloned().fold(0.0, f64::max);
        (a * b).sqrt()
    };
    let mut best_lo = st.phi;
    let mut best_lo_w = witness_from(&st);
    let mut best_up = upper_of(&st);
    let (mut best_rows, mut best_cols) = factorization_from(&st);
    let mut omega = 1.0;
    let mut iterations = 0;
    let mut converged = best_up - best_lo <= opts.tol * best_up.max(1.0);
    while !converged && iterations < opts.max_iter {
        iterations += 1;
        if iterations % 25 == 0 {
            reorthonormalize(&mut st.vfull, nn);
        }
        let next = loop {
            let u = step(&st.u, &st.ru, st.phi, omega);
            let v = step(&st.v, &st.rv, st.phi, omega);
            let cand = evaluate(m, &u, &v, Some(&st.vfull));
            if cand.phi >= st.phi * (1.0 - 1e-14) || omega == 1.0 {
                break cand;
            }
            omega = 1.0;
        };
        omega = (omega * OMEGA_GROWTH).min(OMEGA_MAX);
        st = next;
        if st.phi > best_lo {
            best_lo = st.phi;
            best_lo_w = witness_from(&st);
        }
        let up = upper_of(&st);
        if up < best_up {
            best_up = up;
            let (r, c) = factorization_from(&st);
            best_rows = r;
            best_cols = c;
        }
        converged = best_up - best_lo <= opts.tol * best_up.max(1.0);
    }
    Raw { lower: best_lo, witness: best_lo_w, upper: best_up, rows: best_rows, cols: best_cols, iterations, converged }
}

/// Schur multiplier norm with a verified two-sided certificate.
pub fn mult_norm(problem: &MultiplierProblem, tol: f64) -> Result<MultiplierCertificate> {
    mult_norm_with(problem, &SolverOptions::with_tol(tol))
}

pub fn mult_norm_with(problem: &MultiplierProblem, opts: &SolverOptions) -> Result<MultiplierCertificate> {
    if !(1e-8..=1e-2).contains(&opts.tol) {
        return invalid(format!("tolerance {} outside [1e-8, 1e-2]", opts.tol));
    }
    let m = &problem.matrix;
    let (rows, cols) = m.shape();
    if rows > opts.cap || cols > opts.cap {
        return Err(Error::TooLarge { rows, cols, cap: opts.cap });
    }
    if !m.is_finite() {
        return invalid("non-finite multiplier entries");
    }
    let keep_r: Vec<usize> = (0..rows).filter(|&i| m.row(i).iter().any(|z| *z != ZERO)).collect();
    let keep_c: Vec<usize> = (0..cols).filter(|&j| (0..rows).any(|i| m[(i, j)] != ZERO)).collect();
    let label = problem.label.clone();
    if keep_r.is_empty() {
        let mut witness = CMat::zeros(rows, cols);
        witness[(0, 0)] = C64::new(1.0, 0.0);
        return Ok(MultiplierCertificate {
            label,
            lower: LowerWitness { value: 0.0, witness },
            upper: UpperFactorization { value: 0.0, row_vectors: vec![vec![]; rows], col_vectors: vec![vec![]; cols] },
            gap: 0.0,
            iterations: 0,
            converged: true,
            tol: opts.tol,
        });
    }
    let reduced = m.submatrix(&keep_r, &keep_c);
    let flip = reduced.rows() < reduced.cols();
    let raw = if flip {
        let t = solve_reduced(&reduced.adjoint(), opts);
        Raw {
            lower: t.lower,
            witness: t.witness.adjoint(),
            upper: t.upper,
            rows: t.cols,
            cols: t.rows,
            iterations: t.iterations,
            converged: t.converged,
        }
    } else {
        solve_reduced(&reduced, opts)
    };
    let dim = raw.rows.first().map_or(0, |r| r.len());
    let mut row_vectors = vec![vec![ZERO; dim]; rows];
    for (k, &i) in keep_r.iter().enumerate() {
        row_vectors[i] = raw.rows[k].clone();
    }
    let mut col_vectors = vec![vec![ZERO; dim]; cols];
    for (k, &j) in keep_c.iter().enumerate() {
        col_vectors[j] = raw.cols[k].clone();
    }
    let mut witness = CMat::zeros(rows, cols);
    for (a, &i) in keep_r.iter().enumerate() {
        for (b, &j) in keep_c.iter().enumerate() {
            witness[(i, j)] = raw.witness[(a, b)];
        }
    }
    let mr = row_vectors.iter().map(|r| vec_norm(r)).fold(0.0, f64::max);
    let mc = col_vectors.iter().map(|c| vec_norm(c)).fold(0.0, f64::max);
    let upper = raw.upper.max(mr * mc);
    let nb = op_norm(&witness);
    let prod = m.hadamard(&witness);
    let lower = raw.lower.min(op_norm(&prod)) / nb;
    Ok(MultiplierCertificate {
        label,
        lower: LowerWitness { value: lower, witness },
        upper: UpperFactorization { value: upper, row_vectors, col_vectors },
        gap: upper - lower,
        iterations: raw.iterations,
        converged: raw.converged,
        tol: opts.tol,
    })
}

/// Top singular pair `(x, y)` of `c`, by power iteration.
fn top_pair(c: &CMat) -> (Vec<C64>, Vec<C64>) {
    let n = c.cols();
    let mut y: Vec<C64> = (0..n).map(|j| C64::new(1.0 + 0.1 * (j as f64).sin(), 0.05 * (j as f64).cos())).collect();
    let ny = vec_norm(&y);
    y.iter_mut().for_each(|z| *z /= ny);
    let mut prev = 0.0;
    let mut x = c.matvec(&y);
    for _ in 0..500 {
        x = c.matvec(&y);
        let s = vec_norm(&x);
        if s == 0.0 {
            break;
        }
        let z = c.adj_matvec(&x);
        let nz = vec_norm(&z);
        if nz == 0.0 {
            break;
        }
        y = z.into_iter().map(|t| t / nz).collect();
        if (s - prev).abs() <= 1e-12 * s {
            break;
        }
        prev = s;
    }
    let nx = vec_norm(&x).max(f64::MIN_POSITIVE);
    (x.into_iter().map(|t| t / nx).collect(), y)
}

fn ratio(m: &CMat, b: &CMat) -> f64 {
    let nb = op_norm(b);
    if nb == 0.0 {
        0.0
    } else {
        op_norm(&m.hadamard(b)) / nb
    }
}

const SEARCH_STEPS: usize = 25;

fn search_trial(m: &CMat, start: CMat) -> (f64, CMat) {
    let (rows, cols) = m.shape();
    let mut best = (ratio(m, &start), start.clone());
    let mut b = start;
    for _ in 0..SEARCH_STEPS {
        let c = m.hadamard(&b);
        let (x, y) = top_pair(&c);
        let u: Vec<f64> = x.iter().map(|z| z.norm_sqr().max(WEIGHT_FLOOR)).collect();
        let v: Vec<f64> = y.iter().map(|z| z.norm_sqr().max(WEIGHT_FLOOR)).collect();
        let st = if rows >= cols {
            evaluate(m, &u, &v, None)
        } else {
            let t = evaluate(&m.adjoint(), &v, &u, None);
            State { u: u.clone(), v: v.clone(), phi: t.phi, ru: t.rv, rv: t.ru, svd: Svd { u: t.svd.v, s: t.svd.s, v: t.svd.u }, vfull: vec![] }
        };
        let nb = witness_from(&st);
        let r = ratio(m, &nb);
        let improved = r > best.0 * (1.0 + 1e-12);
        if r > best.0 {
            best = (r, nb.clone());
        }
        if !improved {
            break;
        }
        b = nb;
    }
    best
}

/// Cheap lower bound on the multiplier norm: alternating maximization of
/// `‖M⋆B‖/‖B‖` from structured and seeded random starts.
pub fn mult_lower_search(problem: &MultiplierProblem, trials: usize, seed: u64) -> (f64, CMat) {
    mult_lower_search_exec(problem, trials, seed, Exec::Auto)
}

pub fn mult_lower_search_exec(problem: &MultiplierProblem, trials: usize, seed: u64, exec: Exec) -> (f64, CMat) {
    let m = &problem.matrix;
    let (rows, cols) = m.shape();
    let trials = trials.max(1);
    let start = |t: usize| -> CMat {
        match t {
            0 => CMat::from_fn(rows, cols, |_, _| C64::new(1.0, 0.0)),
            1 => CMat::from_real_fn(rows, cols, |i, j| 1.0 / (i as f64 - j as f64 + 0.5)),
            2 => m.map(|z| if z == ZERO { ZERO } else { (z / z.norm()).conj() }),
            _ => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9).wrapping_add(t as u64));
                CMat::from_fn(rows, cols, |_, _| C64::from_polar(1.0, rng.random::<f64>() * std::f64::consts::TAU))
            }
        }
    };
    let results = par::map_range(exec, trials, |t| search_trial(m, start(t)));
    let mut best = (f64::NEG_INFINITY, CMat::zeros(rows, cols));
    for r in results {
        if r.0 > best.0 {
            best = r;
        }
    }
    best
}

/// `H(j,k) = 1/(j−k)` off the diagonal, indices `−n..=n`.
pub fn hilbert_multiplier(n: usize) -> MultiplierProblem {
    let size = 2 * n + 1;
    let matrix = CMat::from_real_fn(size, size, |i, j| if i == j { 0.0 } else { 1.0 / (i as f64 - j as f64) });
    MultiplierProblem { label: format!("hilbert(n={n})"), matrix, provenance: None }
}

/// `λ(ζ−ξ)` over `ζ, ξ ∈ 𝕋_n` with `λ(0) = 0`, `λ(z) = 1/z`.
pub fn toral_lambda(n: usize) -> Result<MultiplierProblem> {
    if n < 2 {
        return invalid("toral lambda needs n ≥ 2");
    }
    let g = Grid::roots_of_unity(n, 0.0)?;
    let z = g.complex_points();
    let matrix = CMat::from_fn(n, n, |i, j| if i == j { ZERO } else { C64::new(1.0, 0.0) / (z[i] - z[j]) });
    Ok(MultiplierProblem {
        label: format!("toral-lambda(n={n})"),
        matrix,
        provenance: Some(Provenance { kernel: "toral-lambda".into(), function: None, rows: g.clone(), cols: g }),
    })
}

/// Closed-form multiplier norm of [`toral_lambda`].
pub fn toral_lambda_exact(n: usize) -> f64 {
    let n = n as f64;
    if n as usize % 2 == 0 {
        n / 4.0
    } else {
        (n * n - 1.0) / (4.0 * n)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kernel", rename_all = "kebab-case")]
pub enum Kernel {
    /// `Δ₀f`
    DividedDifference { function: ScalarFn },
    /// `(x−y)/(x+y)`
    Ratio,
}

pub fn difference_quotient_problem(kernel: &Kernel, x: &Grid, y: &Grid) -> Result<MultiplierProblem> {
    match kernel {
        Kernel::DividedDifference { function } => {
            let d = divided_diff(function, x, y, DiagonalRule::Zero)?;
            Ok(MultiplierProblem {
                label: format!("dd[{function}]({}x{})", x.len(), y.len()),
                matrix: d.entries,
                provenance: Some(Provenance {
                    kernel: "divided-difference".into(),
                    function: Some(function.clone()),
                    rows: x.clone(),
                    cols: y.clone(),
                }),
            })
        }
        Kernel::Ratio => {
            let (xs, ys) = (x.points(), y.points());
            for &a in xs {
                for &b in ys {
                    if a + b == 0.0 {
                        return invalid(format!("ratio kernel undefined at x={a}, y={b} (x+y=0)"));
                    }
                }
            }
            let matrix = CMat::from_real_fn(xs.len(), ys.len(), |i, j| (xs[i] - ys[j]) / (xs[i] + ys[j]));
            Ok(MultiplierProblem {
                label: format!("ratio({}x{})", x.len(), y.len()),
                matrix,
                provenance: Some(Provenance { kernel: "ratio".into(), function: None, rows: x.clone(), cols: y.clone() }),
            })
        }
    }
}

/// `(x−y)/(x+y)` on `{2^k : 0 ≤ k ≤ m}`.
pub fn geometric_ratio_problem(m: usize) -> Result<MultiplierProblem> {
    let g = Grid::geometric(1.0, 2.0, m + 1)?;
    difference_quotient_problem(&Kernel::Ratio, &g, &g)
}

/// Run [`mult_norm`] over a batch, in parallel unless `exec` says otherwise.
pub fn mult_norm_batch(problems: &[MultiplierProblem], opts: &SolverOptions, exec: Exec) -> Vec<Result<MultiplierCertificate>> {
    par::map(exec, problems, |p| mult_norm_with(p, opts))
}

/// Lower bound from a single start vector, used when checking a witness.
pub fn witness_ratio(m: &CMat, b: &CMat) -> f64 {
    let x0 = vec![C64::new(1.0, 0.0); b.cols()];
    let nb = op_norm_from(b, &x0).max(op_norm(b));
    if nb == 0.0 {
        0.0
    } else {
        op_norm(&m.hadamard(b)) / nb
    }
}
