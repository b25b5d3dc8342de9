//! Sampling identities for band-limited functions on the line and
//! trigonometric polynomials on the circle, and the transfer of multiplier
//! norms from sampling grids to the continuum.

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::func::{lip_const, Grid, ScalarFn};
use crate::linalg::{CMat, C64, ZERO};
use crate::numeric::trigamma;
use crate::par::{self, Exec};
use crate::report::BoundRecord;
use crate::schur::{
    difference_quotient_problem, mult_norm_with, CertificateSummary, Kernel, MultiplierProblem, SolverOptions,
};

/// Below this distance from a node the kernel switches to its Taylor branch.
pub const NODE_SWITCH: f64 = 1e-6;

/// `Σ_k c_k e^{i ω_k x}` with every `|ω_k| ≤ σ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandlimitedFn {
    pub sigma: f64,
    /// `(ω_k, c_k)`
    pub terms: Vec<(f64, C64)>,
}

impl BandlimitedFn {
    pub fn new(sigma: f64, terms: Vec<(f64, C64)>) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return invalid(format!("exponential type must be positive, got {sigma}"));
        }
        if let Some(&(w, _)) = terms.iter().find(|(w, _)| !(w.abs() <= sigma * (1.0 + 1e-12))) {
            return invalid(format!("frequency {w} exceeds the declared type {sigma}"));
        }
        Ok(BandlimitedFn { sigma, terms })
    }

    /// `sin(ωx)` of type `σ ≥ |ω|`.
    pub fn sin(omega: f64, sigma: f64) -> Result<Self> {
        let h = C64::new(0.0, -0.5);
        Self::new(sigma, vec![(omega, h), (-omega, -h)])
    }

    /// `cos(ωx)` of type `σ ≥ |ω|`.
    pub fn cos(omega: f64, sigma: f64) -> Result<Self> {
        Self::new(sigma, vec![(omega, C64::new(0.5, 0.0)), (-omega, C64::new(0.5, 0.0))])
    }

    /// `x ↦ f(e^{ix})` for a trigonometric polynomial `f`.
    pub fn lift(f: &ScalarFn, sigma: f64) -> Result<Self> {
        let (n, c) = trig_coefficients(f)?;
        let terms = (0..c.len()).filter(|&k| c[k] != ZERO).map(|k| (k as f64 - n as f64, c[k])).collect();
        Self::new(sigma, terms)
    }

    pub fn eval(&self, x: f64) -> C64 {
        self.terms.iter().map(|&(w, c)| c * C64::from_polar(1.0, w * x)).sum()
    }

    /// `Σ |c_k| ≥ sup |f|` on the line.
    pub fn sup_bound(&self) -> f64 {
        self.terms.iter().map(|(_, c)| c.norm()).sum()
    }

    pub fn node(&self, n: i64, alpha: f64) -> f64 {
        PI * n as f64 / (2.0 * self.sigma) + alpha
    }

    /// Values at `πn/(2σ) + α` for `n` in `lo..=hi`.
    pub fn samples(&self, lo: i64, hi: i64, alpha: f64) -> Vec<C64> {
        (lo..=hi).map(|n| self.eval(self.node(n, alpha))).collect()
    }
}

/// `sin²t cos t / t²`, with its Taylor branch near `0`.
pub fn line_kernel(t: f64) -> f64 {
    if t.abs() < NODE_SWITCH {
        1.0 - 5.0 * t * t / 6.0
    } else {
        let s = t.sin();
        s * s * t.cos() / (t * t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Reconstruction {
    pub value: C64,
    pub tail_bound: f64,
}

/// `Σ_{|n|≤N} K(σ(z−α) − πn/2) f(πn/(2σ) + α)` with the bound
/// `‖f‖_∞ Σ_{|n|>N} (σ(z−α) − πn/2)⁻²` on the omitted terms.
pub fn reconstruct_line(f: &BandlimitedFn, z: f64, n_max: usize, alpha: f64) -> Result<Reconstruction> {
    if n_max == 0 {
        return invalid("truncation half-width must be at least 1");
    }
    let u = f.sigma * (z - alpha);
    let y = u / FRAC_PI_2;
    let n = n_max as f64;
    if y.abs() >= n {
        return invalid(format!("z = {z} lies outside the truncation window"));
    }
    let mut value = ZERO;
    for k in -(n_max as i64)..=n_max as i64 {
        value += f.eval(f.node(k, alpha)) * line_kernel(u - FRAC_PI_2 * k as f64);
    }
    let tail = (trigamma(n + 1.0 - y) + trigamma(n + 1.0 + y)) / (FRAC_PI_2 * FRAC_PI_2);
    Ok(Reconstruction { value, tail_bound: f.sup_bound() * tail })
}

/// `Σ_n |K(u − πn/2)|` summed directly over `|n| ≤ N` plus the exact tail.
pub fn line_kernel_mass(u: f64, n_max: usize) -> f64 {
    let mut m = 0.0;
    for k in -(n_max as i64)..=n_max as i64 {
        m += line_kernel(u - FRAC_PI_2 * k as f64).abs();
    }
    // Beyond N the numerator is s²|c| on even and c²|s| on odd n.
    let (s, c) = u.sin_cos();
    let y = u / FRAC_PI_2;
    let n = n_max as i64;
    let mut tail = 0.0;
    for (parity, weight) in [(0, s * s * c.abs()), (1, c * c * s.abs())] {
        // Σ over n ≡ parity (mod 2), n > N and n < −N, of 1/(y − n)² · (2/π)²
        let first_pos = if (n + 1).rem_euclid(2) == parity { n + 1 } else { n + 2 };
        let first_neg = if (-n - 1).rem_euclid(2) == parity { n + 1 } else { n + 2 };
        let pos = trigamma((first_pos as f64 - y) / 2.0) / 4.0;
        let neg = trigamma((first_neg as f64 + y) / 2.0) / 4.0;
        tail += weight * (pos + neg) / (FRAC_PI_2 * FRAC_PI_2);
    }
    m + tail
}

/// `|cos u| + |sin u|`
pub fn line_kernel_mass_exact(u: f64) -> f64 {
    u.cos().abs() + u.sin().abs()
}

/// Trigonometric coefficients `(n, [c_{−n}, …, c_n])` of a circle function.
pub fn trig_coefficients(f: &ScalarFn) -> Result<(usize, Vec<C64>)> {
    match f {
        ScalarFn::TrigPoly { coeffs } => Ok((coeffs.len() / 2, coeffs.clone())),
        ScalarFn::LacunarySigned { level, signs, weights } => {
            let n = 1usize << level;
            let mut c = vec![ZERO; 2 * n + 1];
            for (j, (&e, &w)) in signs.iter().zip(weights).enumerate() {
                c[n + (1 << j)] += C64::new(e as f64 * w, 0.0);
            }
            Ok((n, c))
        }
        _ => Err(Error::Unsupported(format!("{f} is not a trigonometric polynomial"))),
    }
}

/// Largest `|k|` with a nonzero coefficient.
pub fn trig_degree(f: &ScalarFn) -> Result<usize> {
    let (n, c) = trig_coefficients(f)?;
    Ok((0..c.len()).filter(|&k| c[k] != ZERO).map(|k| k.abs_diff(n)).max().unwrap_or(0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircleKernel {
    pub n: usize,
}

impl CircleKernel {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return invalid("kernel order must be at least 1");
        }
        Ok(CircleKernel { n })
    }
}

/// `𝔡_n(z) = (1/n)(zⁿ − 1)/(z − 1)`, with value `1` at `z = 1`.
pub fn dirichlet_eval(k: CircleKernel, z: C64) -> C64 {
    let n = k.n as f64;
    if (z - 1.0).norm() < 1e-3 {
        let mut acc = ZERO;
        let mut p = C64::new(1.0, 0.0);
        for _ in 0..k.n {
            acc += p;
            p *= z;
        }
        acc / n
    } else {
        (z.powu(k.n as u32) - 1.0) / (n * (z - 1.0))
    }
}

/// `Σ_{j<k} z^j ζ^{k−1−j} = (z^k − ζ^k)/(z − ζ)`
fn geometric_pair(z: C64, w: C64, k: usize) -> C64 {
    let mut acc = ZERO;
    let mut zp = C64::new(1.0, 0.0);
    let mut wp = w.powu((k - 1) as u32);
    let winv = w.inv();
    for _ in 0..k {
        acc += zp * wp;
        zp *= z;
        wp *= winv;
    }
    acc
}

/// `F_n(z, ζ) = (ζ/z)ⁿ 𝔡_{2n}(ζ/z) 𝔡_{4n}(z/ζ)
///            = z^{1−3n} ζ^{1−3n} (z^{2n} − ζ^{2n})(z^{4n} − ζ^{4n}) / (8n²(z − ζ)²)`.
///
/// `F_n(z, z) = 1` and `|F_n|` on `𝕋 × 𝕋` does not depend on the power of `ζ`.
pub fn f_n_kernel(n: usize, z: C64, zeta: C64) -> C64 {
    let nn = n as i32;
    let s2 = geometric_pair(z, zeta, 2 * n);
    let s4 = geometric_pair(z, zeta, 4 * n);
    z.powi(1 - 3 * nn) * zeta.powi(1 - 3 * nn) * s2 * s4 / (8.0 * (n * n) as f64)
}

/// `Σ_{ζ∈τ𝕋_{4n}} f(ζ) F_n(z, ζ)` for a trigonometric polynomial of degree `≤ n`.
pub fn reconstruct_circle(f: &ScalarFn, n: usize, tau: f64, z: C64) -> Result<C64> {
    CircleKernel::new(n)?;
    let d = trig_degree(f)?;
    if d > n {
        return invalid(format!("degree {d} exceeds kernel order {n}"));
    }
    let nodes = Grid::roots_of_unity(4 * n, tau)?.complex_points();
    let mut acc = ZERO;
    for zeta in nodes {
        acc += f.eval_circle(zeta)? * f_n_kernel(n, z, zeta);
    }
    Ok(acc)
}

/// `Σ_{ζ∈τ₁𝕋_{4n}} Σ_{ξ∈τ₂𝕋_{4n}} Φ(ζ, ξ) F_n(z, ζ) F_n(w, ξ)` for `Φ ∈ 𝒫_n(𝕋²)`.
pub fn reconstruct_circle2(phi: &TrigPoly2, n: usize, tau: (f64, f64), z: C64, w: C64) -> Result<C64> {
    CircleKernel::new(n)?;
    if phi.degree() > n {
        return invalid(format!("Φ has degree {} > {n}", phi.degree()));
    }
    let rows = Grid::roots_of_unity(4 * n, tau.0)?.complex_points();
    let cols = Grid::roots_of_unity(4 * n, tau.1)?.complex_points();
    let fz: Vec<C64> = rows.iter().map(|&x| f_n_kernel(n, z, x)).collect();
    let fw: Vec<C64> = cols.iter().map(|&y| f_n_kernel(n, w, y)).collect();
    let mut acc = ZERO;
    for (i, &x) in rows.iter().enumerate() {
        for (j, &y) in cols.iter().enumerate() {
            acc += phi.eval(x, y) * fz[i] * fw[j];
        }
    }
    Ok(acc)
}

/// `Σ_{ζ∈τ𝕋_{4n}} |F_n(z, ζ)|`
pub fn circle_kernel_mass(n: usize, tau: f64, z: C64) -> Result<f64> {
    CircleKernel::new(n)?;
    Ok(Grid::roots_of_unity(4 * n, tau)?.complex_points().into_iter().map(|w| f_n_kernel(n, z, w).norm()).sum())
}

/// `(|w^{2n} + 1| + |w^{2n} − 1|)/2` with `w = z e^{−iτ}`, the mass over `τ𝕋_{4n}`.
pub fn circle_kernel_mass_exact(n: usize, tau: f64, z: C64) -> f64 {
    let p = (z * C64::from_polar(1.0, -tau)).powu(2 * n as u32);
    0.5 * ((p + 1.0).norm() + (p - 1.0).norm())
}

/// `Σ c_{jk} z^j w^k` with `|j|, |k| ≤ n`; `coeffs[(j+n, k+n)]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrigPoly2 {
    pub n: usize,
    pub coeffs: CMat,
}

impl TrigPoly2 {
    pub fn new(n: usize, coeffs: CMat) -> Result<Self> {
        if coeffs.shape() != (2 * n + 1, 2 * n + 1) {
            return invalid(format!("coefficient array {:?} does not match degree {n}", coeffs.shape()));
        }
        Ok(TrigPoly2 { n, coeffs })
    }

    pub fn constant(c: C64) -> Self {
        TrigPoly2 { n: 0, coeffs: CMat::from_fn(1, 1, |_, _| c) }
    }

    /// `Δf(z, w) = (f(z) − f(w))/(z − w)` (`f′` on the diagonal).
    pub fn divided_difference(f: &ScalarFn) -> Result<Self> {
        let (m, c0) = trig_coefficients(f)?;
        let deg = m.max(1);
        let mut c = vec![ZERO; 2 * deg + 1];
        c[deg - m..deg + m + 1].copy_from_slice(&c0);
        let mut out = CMat::zeros(2 * deg + 1, 2 * deg + 1);
        let at = |j: i64, k: i64| ((j + deg as i64) as usize, (k + deg as i64) as usize);
        for (idx, &ck) in c.iter().enumerate() {
            let k = idx as i64 - deg as i64;
            if ck == ZERO || k == 0 {
                continue;
            }
            if k > 0 {
                for j in 0..k {
                    out[at(j, k - 1 - j)] += ck;
                }
            } else {
                let m = -k;
                for j in 0..m {
                    out[at(j - m, -1 - j)] -= ck;
                }
            }
        }
        Self::new(deg, out)
    }

    /// Degree actually used by the coefficients.
    pub fn degree(&self) -> usize {
        let n = self.n as i64;
        let mut d = 0;
        for j in 0..self.coeffs.rows() {
            for k in 0..self.coeffs.cols() {
                if self.coeffs[(j, k)] != ZERO {
                    d = d.max((j as i64 - n).unsigned_abs() as usize).max((k as i64 - n).unsigned_abs() as usize);
                }
            }
        }
        d
    }

    pub fn eval(&self, z: C64, w: C64) -> C64 {
        let n = self.n as i32;
        let mut acc = ZERO;
        for j in 0..self.coeffs.rows() {
            let zj = z.powi(j as i32 - n);
            for k in 0..self.coeffs.cols() {
                let c = self.coeffs[(j, k)];
                if c != ZERO {
                    acc += c * zj * w.powi(k as i32 - n);
                }
            }
        }
        acc
    }

    pub fn sample(&self, rows: &Grid, cols: &Grid) -> CMat {
        let (z, w) = (rows.complex_points(), cols.complex_points());
        CMat::from_fn(z.len(), w.len(), |i, j| self.eval(z[i], w[j]))
    }

    /// `(x, y) ↦ Φ(e^{ix}, e^{iy})` as a band-limited kernel.
    pub fn lift(&self) -> Bandlimited2 {
        let n = self.n as f64;
        let mut terms = Vec::new();
        for j in 0..self.coeffs.rows() {
            for k in 0..self.coeffs.cols() {
                let c = self.coeffs[(j, k)];
                if c != ZERO {
                    terms.push((j as f64 - n, k as f64 - n, c));
                }
            }
        }
        Bandlimited2 { sigma: (self.degree() as f64).max(1.0), terms }
    }
}

/// Two-sided bracket on a continuum multiplier norm.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TransferBracket {
    pub lower: f64,
    pub upper: f64,
    pub grid: CertificateSummary,
    /// Whether `upper` is fully certified (finite sampling grid).
    pub certified_upper: bool,
    pub notes: String,
}

/// Bracket `[grid lower, 2·grid upper]` for `Φ ∈ 𝒫_n(𝕋²)` from the grid
/// `τ₁𝕋_{4n} × τ₂𝕋_{4n}`.
pub fn transfer_circle(phi: &TrigPoly2, n: usize, tau: (f64, f64), opts: &SolverOptions) -> Result<TransferBracket> {
    if n == 0 {
        return invalid("degree bound must be at least 1");
    }
    if phi.degree() > n {
        return invalid(format!("Φ has degree {} > {n}", phi.degree()));
    }
    let rows = Grid::roots_of_unity(4 * n, tau.0)?;
    let cols = Grid::roots_of_unity(4 * n, tau.1)?;
    let p = MultiplierProblem::new(format!("circle-grid(n={n})"), phi.sample(&rows, &cols))?;
    let c = mult_norm_with(&p, opts)?;
    Ok(TransferBracket {
        lower: c.lower.value,
        upper: 2.0 * c.upper.value,
        grid: c.summary(),
        certified_upper: true,
        notes: format!("grid τ𝕋_{}", 4 * n),
    })
}

/// `Σ c e^{i(ax + by)}` with `|a|, |b| ≤ σ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bandlimited2 {
    pub sigma: f64,
    pub terms: Vec<(f64, f64, C64)>,
}

impl Bandlimited2 {
    pub fn new(sigma: f64, terms: Vec<(f64, f64, C64)>) -> Result<Self> {
        if !(sigma > 0.0) {
            return invalid("exponential type must be positive");
        }
        let lim = sigma * (1.0 + 1e-12);
        if terms.iter().any(|&(a, b, _)| !(a.abs() <= lim && b.abs() <= lim)) {
            return Err(Error::Precondition(format!(
                "kernel is not of exponential type {sigma} in each variable; the factor-2 transfer does not apply"
            )));
        }
        Ok(Bandlimited2 { sigma, terms })
    }

    pub fn eval(&self, x: f64, y: f64) -> C64 {
        self.terms.iter().map(|&(a, b, c)| c * C64::from_polar(1.0, a * x + b * y)).sum()
    }
}

/// Window `{πm/(2σ) + α : m ∈ rows} × {πn/(2σ) + β : n ∈ cols}` of the
/// sampling lattice. The lower end is certified; the upper end is twice the
/// window norm and only becomes a bound once the window exhausts the lattice.
pub fn transfer_line(
    phi: &Bandlimited2,
    rows: (i64, i64),
    cols: (i64, i64),
    offsets: (f64, f64),
    opts: &SolverOptions,
) -> Result<TransferBracket> {
    let phi = Bandlimited2::new(phi.sigma, phi.terms.clone())?;
    if rows.0 > rows.1 || cols.0 > cols.1 {
        return invalid("empty window");
    }
    let h = PI / (2.0 * phi.sigma);
    let xs: Vec<f64> = (rows.0..=rows.1).map(|m| h * m as f64 + offsets.0).collect();
    let ys: Vec<f64> = (cols.0..=cols.1).map(|n| h * n as f64 + offsets.1).collect();
    let m = CMat::from_fn(xs.len(), ys.len(), |i, j| phi.eval(xs[i], ys[j]));
    let p = MultiplierProblem::new(format!("line-window({}x{})", xs.len(), ys.len()), m)?;
    let c = mult_norm_with(&p, &SolverOptions { cap: opts.cap.max(xs.len().max(ys.len())), ..*opts })?;
    Ok(TransferBracket {
        lower: c.lower.value,
        upper: 2.0 * c.upper.value,
        grid: c.summary(),
        certified_upper: false,
        notes: "upper is 2× the window norm; it bounds the continuum only as the window exhausts the lattice".into(),
    })
}

/// Bracket on `‖f‖_{OL}` of a window of `ℤ`, hence a window lower bound for
/// `Ω♭_{f,ℤ}(δ)/δ`.
pub fn commutator_sharpness_z(f: &ScalarFn, window: (i64, i64), delta: f64, opts: &SolverOptions) -> Result<BoundRecord> {
    if !(delta > 0.0 && delta <= 2.0 / PI) {
        return invalid(format!("δ = {delta} is outside (0, 2/π]"));
    }
    let g = Grid::integers(window.0, window.1)?;
    let p = difference_quotient_problem(&Kernel::DividedDifference { function: f.clone() }, &g, &g)?;
    let c = mult_norm_with(&p, &SolverOptions { cap: opts.cap.max(g.len()), ..*opts })?;
    let lower = 0.5 * c.lower.value;
    let upper = c.upper.value;
    Ok(BoundRecord::new("z-sharpness", lower, upper)
        .param("function", f.to_string())
        .param("lo", window.0)
        .param("hi", window.1)
        .param("delta", delta)
        .param("multiplier_lower", c.lower.value)
        .param("multiplier_upper", c.upper.value)
        .note("[lhs, rhs] brackets the window operator Lipschitz norm; window-dependent lower bound for the ℤ value"))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BesPoint {
    pub n: usize,
    /// `Σ_{k<n} 2^k (|f̂(2^k)| + |f̂(−2^k)|)`
    pub partial_sum: f64,
    /// `2^{−n}` times the partial sum.
    pub profile: f64,
}

pub fn bes_n_profile(f: &ScalarFn, n_max: usize) -> Result<Vec<BesPoint>> {
    let (deg, c) = trig_coefficients(f)?;
    let coef = |k: usize| if k <= deg { c[deg + k].norm() + c[deg - k].norm() } else { 0.0 };
    let mut out = Vec::with_capacity(n_max);
    let mut s = 0.0;
    for n in 1..=n_max {
        let k = 1usize << (n - 1);
        s += k as f64 * coef(k);
        out.push(BesPoint { n, partial_sum: s, profile: s / 2f64.powi(n as i32) });
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LacunaryTrial {
    pub trial: usize,
    pub function: ScalarFn,
    /// Certified grid lower bound of `‖Δ₀f‖` over the probe Lipschitz constant.
    pub score: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LacunarySearch {
    pub level: usize,
    pub degree: usize,
    pub grid: usize,
    pub best: LacunaryTrial,
    pub scores: Vec<f64>,
}

fn lacunary_trial(level: usize, trial: usize, seed: u64, opts: &SolverOptions) -> Result<LacunaryTrial> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (trial as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let m = level + 1;
    let (signs, weights): (Vec<i8>, Vec<f64>) = if trial == 0 {
        (vec![1; m], (0..m).map(|j| 1.0 / (1u64 << j) as f64).collect())
    } else {
        (0..m)
            .map(|j| {
                let s = if rng.random::<bool>() { 1 } else { -1 };
                (s, rng.random_range(0.25..1.0) / (1u64 << j) as f64)
            })
            .unzip()
    };
    let f = ScalarFn::lacunary(signs, weights)?;
    let n = 1usize << level;
    let g = Grid::roots_of_unity(4 * n, 0.0)?;
    let p = difference_quotient_problem(&Kernel::DividedDifference { function: f.clone() }, &g, &g)?;
    let c = mult_norm_with(&p, opts)?;
    let lip = lip_const(&f, (0.0, 0.0)).value;
    Ok(LacunaryTrial { trial, function: f, score: c.lower.value / lip })
}

/// Seeded random search over lacunary sign and weight patterns maximizing the
/// grid multiplier norm of `Δ₀f` per unit Lipschitz norm. Trials run
/// concurrently; the best is the largest score, ties going to the lower trial.
pub fn lacunary_search(level: usize, trials: usize, seed: u64, opts: &SolverOptions, exec: Exec) -> Result<LacunarySearch> {
    if trials == 0 {
        return invalid("need at least one trial");
    }
    if level > 6 {
        return invalid("level above 6 exceeds the desk-scale grid");
    }
    let results: Vec<LacunaryTrial> =
        par::map_range(exec, trials, |t| lacunary_trial(level, t, seed, opts)).into_iter().collect::<Result<_>>()?;
    let scores = results.iter().map(|r| r.score).collect();
    let best = results
        .into_iter()
        .reduce(|a, b| if b.score > a.score { b } else { a })
        .expect("trials > 0");
    Ok(LacunarySearch { level, degree: 1 << level, grid: 4 << level, best, scores })
}

/// `√2`, the bound on both kernel masses.
pub const KERNEL_MASS_BOUND: f64 = SQRT_2;

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn node_hit_and_cos() {
        let s = 1.7;
        let f = BandlimitedFn::sin(s, s).unwrap();
        let r = reconstruct_line(&f, FRAC_PI_2 / s, 50, 0.0).unwrap();
        assert!((r.value - c(1.0)).norm() < 1e-12);
        let f = BandlimitedFn::cos(1.0, 1.0).unwrap();
        let r = reconstruct_line(&f, 0.3, 200, 0.0).unwrap();
        let err = (r.value - c(0.3f64.cos())).norm();
        assert!(err <= r.tail_bound && err <= 1e-3, "{err} {}", r.tail_bound);
        let zero = BandlimitedFn::new(1.0, vec![]).unwrap();
        assert_eq!(reconstruct_line(&zero, 0.4, 10, 0.0).unwrap().value, ZERO);
        assert!(BandlimitedFn::cos(2.0, 1.0).is_err());
    }

    #[test]
    fn taylor_branch_is_continuous() {
        let t = 0.99 * NODE_SWITCH;
        let direct = t.sin().powi(2) * t.cos() / (t * t);
        assert!((line_kernel(t) - direct).abs() < 1e-12);
    }

    #[test]
    fn line_mass_identity() {
        for u in [0.0, 0.3, 1.1, -2.7, 5.0] {
            let m = line_kernel_mass(u, 300);
            assert!((m - line_kernel_mass_exact(u)).abs() < 1e-8, "{u}: {m}");
        }
    }

    #[test]
    fn dirichlet_values() {
        let k = CircleKernel::new(5).unwrap();
        assert!((dirichlet_eval(k, c(1.0)) - c(1.0)).norm() < 1e-15);
        assert!(dirichlet_eval(CircleKernel::new(2).unwrap(), c(-1.0)).norm() < 1e-15);
        let z = C64::from_polar(1.0, 0.4);
        let direct: C64 = (0..5).map(|j| z.powi(j)).sum::<C64>() / 5.0;
        assert!((dirichlet_eval(k, z) - direct).norm() < 1e-14);
    }

    #[test]
    fn f_n_is_one_on_diagonal() {
        let z = C64::from_polar(1.0, 1.3);
        assert!((f_n_kernel(3, z, z) - c(1.0)).norm() < 1e-13);
    }

    #[test]
    fn circle_reconstruction_of_z() {
        let f = ScalarFn::analytic_poly(&[ZERO, c(1.0)]);
        let z = C64::from_polar(1.0, 0.7);
        let v = reconstruct_circle(&f, 3, 0.0, z).unwrap();
        assert!((v - z).norm() < 1e-12);
        let g = ScalarFn::trig_poly(vec![C64::new(0.2, -1.0), c(0.5), c(0.0), C64::new(0.0, 2.0), c(-1.0)]).unwrap();
        let v = reconstruct_circle(&g, 2, 0.3, z).unwrap();
        assert!((v - g.eval_circle(z).unwrap()).norm() < 1e-12);
        assert!(reconstruct_circle(&g, 1, 0.0, z).is_err());
    }

    #[test]
    fn two_variable_reconstruction() {
        let f = ScalarFn::trig_poly(vec![c(0.3), C64::new(0.0, 1.0), c(-0.5), c(2.0), c(0.25)]).unwrap();
        let phi = TrigPoly2::divided_difference(&f).unwrap();
        let (z, w) = (C64::from_polar(1.0, 0.9), C64::from_polar(1.0, -2.2));
        let v = reconstruct_circle2(&phi, 2, (0.1, 0.7), z, w).unwrap();
        assert!((v - phi.eval(z, w)).norm() < 1e-12);
    }

    #[test]
    fn circle_mass() {
        for t in [0.1, 0.9, 2.0, 4.4] {
            let z = C64::from_polar(1.0, t);
            let m = circle_kernel_mass(4, 0.0, z).unwrap();
            assert!((m - circle_kernel_mass_exact(4, 0.0, z)).abs() < 1e-10);
            assert!(m <= SQRT_2 + 1e-8);
        }
    }

    #[test]
    fn divided_difference_polynomial() {
        let f = ScalarFn::analytic_poly(&[c(0.0), c(1.0), c(1.0)]);
        let d = TrigPoly2::divided_difference(&f).unwrap();
        let (z, w) = (C64::from_polar(1.0, 0.4), C64::from_polar(1.0, 2.1));
        assert!((d.eval(z, w) - (c(1.0) + z + w)).norm() < 1e-14);
        let g = ScalarFn::trig_poly(vec![c(0.5), c(0.0), c(0.0), c(0.0), C64::new(0.0, 1.0)]).unwrap();
        let d = TrigPoly2::divided_difference(&g).unwrap();
        let direct = (g.eval_circle(z).unwrap() - g.eval_circle(w).unwrap()) / (z - w);
        assert!((d.eval(z, w) - direct).norm() < 1e-13);
    }

    #[test]
    fn transfer_constants() {
        let one = TrigPoly2::constant(c(1.0));
        let b = transfer_circle(&one, 1, (0.0, 0.0), &SolverOptions::default()).unwrap();
        assert!((b.lower - 1.0).abs() < 1e-6 && (b.upper - 2.0).abs() < 1e-3);
        let phi = Bandlimited2::new(1.0, vec![(1.0, -1.0, c(1.0))]).unwrap();
        let b = transfer_line(&phi, (-5, 5), (-5, 5), (0.0, 0.0), &SolverOptions::default()).unwrap();
        assert!((b.lower - 1.0).abs() < 1e-6);
        assert!(Bandlimited2::new(1.0, vec![(2.0, 0.0, c(1.0))]).is_err());
    }

    #[test]
    fn besov_profiles() {
        let z2 = ScalarFn::analytic_poly(&[c(0.0), c(0.0), c(1.0)]);
        let p = bes_n_profile(&z2, 4).unwrap();
        assert_eq!(p[0].partial_sum, 0.0);
        assert_eq!(p[1].partial_sum, 2.0);
        assert_eq!(p[3].partial_sum, 2.0);
        let lac = ScalarFn::lacunary(vec![1; 6], (0..6).map(|j| 4f64.powi(-j)).collect()).unwrap();
        let p = bes_n_profile(&lac, 8).unwrap();
        assert!((p[7].partial_sum - 2.0 * (1.0 - 2f64.powi(-6))).abs() < 1e-14);
        let zero = ScalarFn::analytic_poly(&[c(0.0)]);
        assert!(bes_n_profile(&zero, 3).unwrap().iter().all(|b| b.partial_sum == 0.0));
    }

    #[test]
    fn z_sharpness_linear() {
        let f = ScalarFn::linear(2.0, 0.0);
        let r = commutator_sharpness_z(&f, (-3, 3), 0.5, &SolverOptions::with_tol(1e-6)).unwrap();
        // ‖f‖_OL = 2 sits inside [M/2, M] with M = 2‖J − I‖ > 2.
        assert!(r.lhs <= 2.0 + 1e-6 && r.rhs >= 2.0 - 1e-6 && r.rhs <= 4.0 + 1e-6, "{r:?}");
        assert!((r.rhs - 2.0 * r.lhs).abs() < 1e-12);
        assert!(commutator_sharpness_z(&f, (-3, 3), 0.7, &SolverOptions::default()).is_err());
    }

    #[test]
    fn lacunary_search_is_deterministic() {
        let o = SolverOptions::default();
        let a = lacunary_search(2, 4, 7, &o, Exec::Auto).unwrap();
        let b = lacunary_search(2, 4, 7, &o, Exec::Sequential).unwrap();
        assert_eq!(a.scores, b.scores);
        assert_eq!(a.best.trial, b.best.trial);
    }
}
