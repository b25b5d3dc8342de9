//! Bounds for `‖f‖_{L̂¹(J)}`: a quadrature for the inverse Fourier transform in
//! `L¹`, closed-form bounds for monotone convex functions, the hyperbolic
//! tangent family and Lipschitz extensions, and a periodization lemma.
//!
//! Convention: `(𝓕⁻¹f)(ξ) = (1/2π) ∫ f(x) e^{ixξ} dx` and
//! `‖f‖_{L̂¹} = ‖𝓕⁻¹f‖_{L¹}`.

use std::f64::consts::{PI, SQRT_2};
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::func::{lip_const, ScalarFn};
use crate::numeric::{simpson, trigamma};

/// A function on ℝ whose inverse Fourier transform is integrated.
pub trait HatTarget: Sync {
    fn eval(&self, x: f64) -> f64;

    /// Length scale of the function; windows must be at least ten times it.
    fn scale(&self) -> f64 {
        1.0
    }

    /// `Some((c, a))` when `f(x) ~ c/x` at infinity; the quadrature then
    /// subtracts `c·x/(x²+a²)`, whose transform is known in closed form.
    fn reciprocal_tail(&self) -> Option<(f64, f64)> {
        None
    }

    fn label(&self) -> String;
}

impl HatTarget for ScalarFn {
    fn eval(&self, x: f64) -> f64 {
        self.eval_real(x).unwrap_or(f64::NAN)
    }

    fn scale(&self) -> f64 {
        match self {
            ScalarFn::FaKernel { a } => *a,
            ScalarFn::PhiS { s } if *s != 0.0 => s.abs(),
            _ => 1.0,
        }
    }

    fn reciprocal_tail(&self) -> Option<(f64, f64)> {
        match self {
            ScalarFn::FaKernel { a } => Some((1.0, *a)),
            _ => None,
        }
    }

    fn label(&self) -> String {
        self.to_string()
    }
}

/// `(1 − |x|/w)₊`
#[derive(Debug, Clone, Copy)]
pub struct Triangle {
    pub half_width: f64,
}

impl HatTarget for Triangle {
    fn eval(&self, x: f64) -> f64 {
        (1.0 - x.abs() / self.half_width).max(0.0)
    }
    fn scale(&self) -> f64 {
        self.half_width
    }
    fn label(&self) -> String {
        format!("triangle(w={})", self.half_width)
    }
}

/// `e^{−(x/w)²}`
#[derive(Debug, Clone, Copy)]
pub struct Gaussian {
    pub width: f64,
}

impl HatTarget for Gaussian {
    fn eval(&self, x: f64) -> f64 {
        (-(x / self.width).powi(2)).exp()
    }
    fn scale(&self) -> f64 {
        self.width
    }
    fn label(&self) -> String {
        format!("gaussian(w={})", self.width)
    }
}

/// Wraps a closure as a [`HatTarget`].
pub struct FnTarget<F> {
    pub f: F,
    pub scale: f64,
    pub reciprocal_tail: Option<(f64, f64)>,
    pub label: String,
}

impl<F: Fn(f64) -> f64 + Sync> HatTarget for FnTarget<F> {
    fn eval(&self, x: f64) -> f64 {
        (self.f)(x)
    }
    fn scale(&self) -> f64 {
        self.scale
    }
    fn reciprocal_tail(&self) -> Option<(f64, f64)> {
        self.reciprocal_tail
    }
    fn label(&self) -> String {
        self.label.clone()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult {
    pub value: f64,
    /// `discretization + truncation + frequency_tail`
    pub error_bound: f64,
    /// `|v(h) − v(2h)|`
    pub discretization: f64,
    /// `|v(W) − v(W/2)|`
    pub truncation: f64,
    /// Bound on the frequency mass beyond the integrated band.
    pub frequency_tail: f64,
}

const OVERSAMPLE: usize = 4;
const REPLICAS: i64 = 2;

/// `∫|𝓕⁻¹ f_h|` for the piecewise linear interpolant `f_h` of `f` at nodes
/// `kh`, `|k| ≤ W/h`. Returns the value and a bound on the part of the
/// integral outside the computed band.
fn interpolant_l1(f: &dyn HatTarget, window: f64, h: f64, planner: &mut FftPlanner<f64>) -> (f64, f64) {
    let k = (window / h).floor() as i64;
    let tail = f.reciprocal_tail();
    let nodes = (2 * k + 1) as usize;
    let len = (OVERSAMPLE * nodes).next_power_of_two();
    let mut buf = vec![Complex64::new(0.0, 0.0); len];
    for j in -k..=k {
        let x = j as f64 * h;
        let mut v = f.eval(x);
        if let Some((c, a)) = tail {
            v -= c * x / (x * x + a * a);
        }
        buf[j.rem_euclid(len as i64) as usize] = Complex64::new(v, 0.0);
    }
    let fft: Arc<dyn rustfft::Fft<f64>> = planner.plan_fft_inverse(len);
    fft.process(&mut buf);
    let dxi = 2.0 * PI / (len as f64 * h);
    let period = 2.0 * PI / h;
    let analytic = |xi: f64| -> Complex64 {
        match tail {
            Some((c, a)) if xi != 0.0 => Complex64::new(0.0, 0.5 * c * xi.signum() * (-a * xi.abs()).exp()),
            _ => Complex64::new(0.0, 0.0),
        }
    };
    // Σ_m sinc²(t + πm) = 1, so replicas beyond the explicit band contribute
    // (h/2π)|S| times the leftover sinc² mass, up to the analytic part.
    let mut total = 0.0;
    for (j, s) in buf.iter().enumerate() {
        let base = j as f64 * dxi;
        let r = *s * (h / (2.0 * PI));
        let mut used = 0.0;
        for m in -REPLICAS..REPLICAS {
            let xi = base + m as f64 * period;
            let t = 0.5 * h * xi;
            let sinc2 = if t.abs() < 1e-8 { 1.0 - t * t / 3.0 } else { (t.sin() / t).powi(2) };
            used += sinc2;
            let w = if xi == 0.0 && tail.is_some() {
                // the analytic part jumps at 0; average the one-sided moduli
                let c = tail.map_or(0.0, |t| 0.5 * t.0);
                0.5 * ((r + Complex64::new(0.0, c)).norm() + (r - Complex64::new(0.0, c)).norm())
            } else {
                (r * sinc2 + analytic(xi)).norm()
            };
            total += w * dxi;
        }
        total += r.norm() * (1.0 - used).max(0.0) * dxi;
    }
    let mut freq_tail = 0.0;
    if let Some((c, a)) = tail {
        freq_tail = c.abs() * (-a * (REPLICAS as f64 - 1.0) * period).exp() / a;
    }
    (total, freq_tail)
}

/// `‖𝓕⁻¹f‖_{L¹}` on a symmetric window `[−W, W]` with node spacing `h`, with
/// an empirical discretization and truncation error estimate.
pub fn hat_norm_quadrature(f: &dyn HatTarget, window: f64, grid_step: f64) -> Result<QuadratureResult> {
    if !(grid_step > 0.0 && window > 0.0) || !window.is_finite() {
        return invalid("window and grid step must be positive");
    }
    if window < 10.0 * f.scale() {
        return Err(Error::Precondition(format!(
            "window {window} is below ten times the scale {} of {}",
            f.scale(),
            f.label()
        )));
    }
    if window / grid_step > 4.0e6 {
        return invalid("too many quadrature nodes");
    }
    let mut planner = FftPlanner::new();
    let (v, ft) = interpolant_l1(f, window, grid_step, &mut planner);
    if !v.is_finite() {
        return Err(Error::Domain { function: f.label(), point: "some quadrature node".into() });
    }
    let (v2h, _) = interpolant_l1(f, window, 2.0 * grid_step, &mut planner);
    let (vw, _) = interpolant_l1(f, 0.5 * window, grid_step, &mut planner);
    let discretization = (v - v2h).abs();
    let truncation = (v - vw).abs();
    let error_bound = discretization + truncation + ft;
    if error_bound > 0.1 * v {
        return Err(Error::InsufficientDecay { tail: error_bound, value: v });
    }
    Ok(QuadratureResult { value: v, error_bound, discretization, truncation, frequency_tail: ft })
}

/// A closed half-line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Ray {
    /// `[a, ∞)`
    From(f64),
    /// `(−∞, b]`
    UpTo(f64),
}

const POLYA_PROBE: usize = 2000;

/// Sup-norm bound for a function that is monotone, convex or concave and
/// vanishing at infinity on a ray; the probe check rejects anything else.
pub fn polya_bound(f: impl Fn(f64) -> f64, ray: Ray) -> Result<f64> {
    let (end, dir) = match ray {
        Ray::From(a) => (a, 1.0),
        Ray::UpTo(b) => (b, -1.0),
    };
    let smax = (1e6f64).ln_1p();
    let xs: Vec<f64> = (0..POLYA_PROBE)
        .map(|k| end + dir * (smax * k as f64 / (POLYA_PROBE - 1) as f64).exp_m1())
        .collect();
    let ys: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    if ys.iter().any(|y| !y.is_finite()) {
        return Err(Error::Precondition("function is not finite on the probe".into()));
    }
    let scale = ys.iter().fold(0.0f64, |m, y| m.max(y.abs()));
    let eps = 1e-12 * scale.max(1e-300);
    let d: Vec<f64> = ys.windows(2).map(|w| w[1] - w[0]).collect();
    let inc = d.iter().all(|&v| v >= -eps);
    let dec = d.iter().all(|&v| v <= eps);
    if !inc && !dec {
        let k = (1..d.len()).find(|&k| d[k] * d[0] < -eps * eps).unwrap_or(1);
        return Err(Error::Precondition(format!(
            "not monotone near ({}, {}, {})",
            xs[k - 1],
            xs[k],
            xs[k + 1]
        )));
    }
    let mut sd = Vec::with_capacity(xs.len());
    for k in 1..xs.len() - 1 {
        let (a, b, c) = (xs[k - 1], xs[k], xs[k + 1]);
        let s1 = (ys[k] - ys[k - 1]) / (b - a);
        let s2 = (ys[k + 1] - ys[k]) / (c - b);
        sd.push((s2 - s1) / (c - a));
    }
    let stol = 1e-9 * sd.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let convex = sd.iter().all(|&v| v >= -stol);
    let concave = sd.iter().all(|&v| v <= stol);
    if !convex && !concave {
        let k = 1 + sd.iter().position(|&v| v * sd[0] < 0.0 && v.abs() > stol).unwrap_or(0);
        return Err(Error::Precondition(format!(
            "neither convex nor concave near ({}, {}, {})",
            xs[k - 1],
            xs[k],
            xs[k + 1]
        )));
    }
    let far = ys[ys.len() - 1].abs();
    if far > 1e-3 * scale {
        return Err(Error::Precondition(format!(
            "does not vanish at infinity: |f({})| = {far}",
            xs[xs.len() - 1]
        )));
    }
    Ok(scale)
}

/// `12^{1/4}`
pub fn fourth_root_12() -> f64 {
    12f64.powf(0.25)
}

/// Bound for `(eˣ−1)/(eˣ+1)` on an interval containing 0: the minimum of
/// `|J|/12^{1/4}` and, when `|J| ≥ 4`, `5 + (4/π) log(|J|/2)`.
pub fn tanh_half_interval_bound((lo, hi): (f64, f64)) -> Result<f64> {
    if !(lo <= 0.0 && hi >= 0.0) {
        return Err(Error::Precondition(format!("0 is not in [{lo}, {hi}]")));
    }
    let len = hi - lo;
    let small = len / fourth_root_12();
    Ok(if len >= 4.0 { small.min(5.0 + 4.0 / PI * (len / 2.0).ln()) } else { small })
}

/// Bound for `eˣ/(1+eˣ)`-type functions on `(−∞, a]`: `2 + (2/π) log a`, `a ≥ 2`.
pub fn exp_ray_bound(a: f64) -> Result<f64> {
    if !(a >= 2.0) {
        return Err(Error::Unsupported(format!("a = {a} < 2")));
    }
    Ok(2.0 + 2.0 / PI * a.ln())
}

/// `ξ(t) = t / (2 sin(t/2))`
pub fn xi(t: f64) -> f64 {
    if t.abs() < 1e-4 {
        let t2 = t * t;
        1.0 + t2 / 24.0 + 7.0 * t2 * t2 / 5760.0
    } else {
        t / (2.0 * (0.5 * t).sin())
    }
}

/// `ξ′(3π/2)`
pub fn xi_prime_at_end() -> f64 {
    SQRT_2 * (1.0 + 3.0 * PI / 4.0) / 2.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Periodization {
    pub n: usize,
    /// `a_{−N}, …, a_N`
    pub coeffs: Vec<f64>,
    /// `Σ_{|n|≤N} |a_n|`
    pub sum_abs: f64,
    /// `ξ(3π/2) = 3√2π/4`, the full sum.
    pub limit: f64,
    /// Estimated `Σ_{|n|>N} |a_n|` from the `1/n²` decay of the coefficients.
    pub tail_estimate: f64,
}

impl Periodization {
    pub fn coeff(&self, n: i64) -> f64 {
        self.coeffs[(n + self.n as i64) as usize]
    }
}

/// Fourier coefficients of the `3π`-periodic even extension of `ξ` from
/// `[−3π/2, 3π/2]`: `a_n = (2/3π) ∫₀^{3π/2} ξ(t) cos(2nt/3) dt`.
pub fn periodization_coefficients(n: usize) -> Result<Periodization> {
    if n < 1 {
        return invalid("N must be at least 1");
    }
    let end = 1.5 * PI;
    let panels = 4000 + 200 * n;
    let half: Vec<f64> = (0..=n)
        .map(|k| 2.0 / (3.0 * PI) * simpson(|t| xi(t) * (2.0 * k as f64 * t / 3.0).cos(), 0.0, end, panels))
        .collect();
    let coeffs: Vec<f64> = (-(n as i64)..=n as i64).map(|k| half[k.unsigned_abs() as usize]).collect();
    let sum_abs = coeffs.iter().map(|c| c.abs()).sum();
    let c = 3.0 / (2.0 * PI) * xi_prime_at_end();
    Ok(Periodization {
        n,
        coeffs,
        sum_abs,
        limit: 3.0 * SQRT_2 * PI / 4.0,
        tail_estimate: 2.0 * c * trigamma(n as f64 + 1.0),
    })
}

/// `(2/12^{1/4})·|J|·Lip(f)` for `f(0) = 0`, `0 ∈ J`.
pub fn lip_extension_bound(f: &ScalarFn, (lo, hi): (f64, f64)) -> Result<f64> {
    if !(lo <= 0.0 && hi >= 0.0) {
        return Err(Error::Precondition(format!("0 is not in [{lo}, {hi}]")));
    }
    let f0 = f.eval_real(0.0)?;
    if f0 != 0.0 {
        return Err(Error::Precondition(format!("f(0) = {f0} ≠ 0")));
    }
    Ok(2.0 / fourth_root_12() * (hi - lo) * lip_const(f, (lo, hi)).value)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HatMethod {
    Polya,
    LipExtension,
    Logaa,
    Quadrature,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HatUpper {
    pub value: f64,
    pub method: HatMethod,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HatNormEstimate {
    pub target: ScalarFn,
    #[serde(rename = "J")]
    pub interval: (f64, f64),
    pub lower: f64,
    pub upper: HatUpper,
    pub error_bound: f64,
    /// Every applicable upper bound, best first.
    pub candidates: Vec<HatUpper>,
}

/// Two-sided bracket for `‖f‖_{L̂¹(J)}` on a bounded interval: the probe
/// sup-norm below and the best applicable construction above.
pub fn hat_norm_estimate(f: &ScalarFn, (lo, hi): (f64, f64)) -> Result<HatNormEstimate> {
    if !(lo <= hi) {
        return invalid(format!("empty interval [{lo}, {hi}]"));
    }
    let probe = 2001;
    let mut lower: f64 = 0.0;
    for k in 0..probe {
        let x = lo + (hi - lo) * k as f64 / (probe - 1) as f64;
        lower = lower.max(f.eval_real(x)?.abs());
    }
    let mut cands = Vec::new();
    let mut error_bound = 0.0;
    if lo <= 0.0 && hi >= 0.0 {
        if let Ok(v) = lip_extension_bound(f, (lo, hi)) {
            cands.push(HatUpper { value: v, method: HatMethod::LipExtension });
        }
        if matches!(f, ScalarFn::TanhHalf) && hi - lo >= 4.0 {
            cands.push(HatUpper { value: 5.0 + 4.0 / PI * ((hi - lo) / 2.0).ln(), method: HatMethod::Logaa });
        }
    }
    if let ScalarFn::FaKernel { a } = f {
        let a = *a;
        if lo >= a {
            cands.push(HatUpper { value: polya_bound(|x| 1.0 / x, Ray::From(lo))?, method: HatMethod::Polya });
        } else if hi <= -a {
            cands.push(HatUpper { value: polya_bound(|x| 1.0 / x, Ray::UpTo(hi))?, method: HatMethod::Polya });
        }
        let q = hat_norm_quadrature(f, 200.0 * a, a / 64.0)?;
        cands.push(HatUpper { value: q.value + q.error_bound, method: HatMethod::Quadrature });
        error_bound = q.error_bound;
    }
    if cands.is_empty() {
        return Err(Error::Unsupported(format!("no upper construction for {f} on [{lo}, {hi}]")));
    }
    cands.sort_by(|a, b| a.value.total_cmp(&b.value));
    Ok(HatNormEstimate { target: f.clone(), interval: (lo, hi), lower, upper: cands[0], error_bound, candidates: cands })
}
