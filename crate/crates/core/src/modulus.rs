//! Operator moduli of continuity on finite matrices: the double operator
//! integral identity, commutator witnesses certifying lower bounds, net and
//! integral upper bounds, ε-entropy, and the Kato-type sweeps.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::func::{lip_const, modulus_estimate, Grid, MeasureSummary, PiecewiseLinear, ScalarFn};
use crate::linalg::{
    apply_fn, eig_hermitian, random_general, random_hermitian, singular_values, unitary_exp, CMat, HermitianMatrix,
    ZERO,
};
use crate::numeric::adaptive_simpson;
use crate::par::{self, Exec};
use crate::report::BoundRecord;
use crate::schur::{
    difference_quotient_problem, mult_norm_with, CertificateSummary, Kernel, MultiplierCertificate, SolverOptions,
    WITNESS_SLACK,
};

/// Eigen-tolerance used for identity checks.
const EIG_TOL: f64 = 1e-12;

/// Largest singular value, computed by a full SVD.
pub fn spectral_norm(m: &CMat) -> f64 {
    if m.rows() == 0 || m.cols() == 0 {
        return 0.0;
    }
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// `(A, B, R)` with `R` mapping the space of `B` into the space of `A`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OperatorTriple {
    pub a: HermitianMatrix,
    pub b: HermitianMatrix,
    pub r: CMat,
    pub label: String,
}

impl OperatorTriple {
    pub fn new(a: HermitianMatrix, b: HermitianMatrix, r: CMat, label: impl Into<String>) -> Result<Self> {
        if r.shape() != (a.dim(), b.dim()) {
            return invalid(format!("R has shape {:?}, expected {}x{}", r.shape(), a.dim(), b.dim()));
        }
        Ok(OperatorTriple { a, b, r, label: label.into() })
    }

    /// `A − B` as a triple with `R = I`.
    pub fn pair(a: HermitianMatrix, b: HermitianMatrix, label: impl Into<String>) -> Result<Self> {
        let n = a.dim();
        Self::new(a, b, CMat::identity(n), label)
    }

    /// Random `A`, `B` with spectra in `range` and `R` of norm one.
    pub fn random(n: usize, range: (f64, f64), seed: u64) -> Result<Self> {
        let a = random_hermitian(n, range, seed.wrapping_mul(3))?;
        let b = random_hermitian(n, range, seed.wrapping_mul(3).wrapping_add(1))?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(3).wrapping_add(2));
        let r = random_general(n, n, &mut rng);
        let r = r.scale(1.0 / spectral_norm(&r));
        Self::new(a, b, r, format!("random(n={n}, seed={seed})"))
    }

    /// `AR − RB`
    pub fn commutator(&self) -> CMat {
        self.a.as_mat().matmul(&self.r).sub(&self.r.matmul(self.b.as_mat()))
    }
}

/// `f(A)R − Rf(B)` by direct functional calculus.
pub fn quasicommutator(f: &ScalarFn, t: &OperatorTriple) -> Result<CMat> {
    let fa = apply_fn(f, &t.a)?;
    let fb = apply_fn(f, &t.b)?;
    Ok(fa.as_mat().matmul(&t.r).sub(&t.r.matmul(fb.as_mat())))
}

/// Distance between `f(A)R − Rf(B)` and its double operator integral
/// `U (Δ₀f(λ, μ) ⋆ U*(AR−RB)V) V*`.
pub fn doi_identity_residual(f: &ScalarFn, t: &OperatorTriple) -> Result<f64> {
    let ea = eig_hermitian(&t.a, EIG_TOL)?;
    let eb = eig_hermitian(&t.b, EIG_TOL)?;
    let fa = ea.eigenvalues.iter().map(|&x| f.eval_real(x)).collect::<Result<Vec<_>>>()?;
    let fb = eb.eigenvalues.iter().map(|&x| f.eval_real(x)).collect::<Result<Vec<_>>>()?;
    let (la, lb) = (&ea.eigenvalues, &eb.eigenvalues);
    let d = CMat::from_real_fn(la.len(), lb.len(), |i, j| {
        if la[i] == lb[j] {
            0.0
        } else {
            (fa[i] - fb[j]) / (la[i] - lb[j])
        }
    });
    let inner = ea.basis.adjoint().matmul(&t.commutator()).matmul(&eb.basis);
    let doi = ea.basis.matmul(&d.hadamard(&inner)).matmul(&eb.basis.adjoint());
    Ok(spectral_norm(&doi.sub(&quasicommutator(f, t)?)))
}

/// The admissible size of [`doi_identity_residual`] for a triple.
pub fn doi_tolerance(f: &ScalarFn, t: &OperatorTriple) -> Result<f64> {
    let ea = eig_hermitian(&t.a, EIG_TOL)?;
    let eb = eig_hermitian(&t.b, EIG_TOL)?;
    let lo = ea.eigenvalues.iter().chain(&eb.eigenvalues).copied().fold(f64::INFINITY, f64::min);
    let hi = ea.eigenvalues.iter().chain(&eb.eigenvalues).copied().fold(f64::NEG_INFINITY, f64::max);
    let lip = lip_const(f, (lo, hi)).value;
    Ok(1e-9 * (1.0 + spectral_norm(&t.commutator())) * (1.0 + lip))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Measured {
    pub norm_r: f64,
    pub norm_commut: f64,
    pub norm_fcommut: f64,
}

/// A concrete `(A, B, R)` certifying `Ω♭_f(δ) ≥ certified_lower`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WitnessBundle {
    pub function: ScalarFn,
    pub triple: OperatorTriple,
    pub delta: f64,
    pub measured: Measured,
    pub certified_lower: f64,
}

impl WitnessBundle {
    pub fn measure(f: &ScalarFn, t: &OperatorTriple) -> Result<Measured> {
        Ok(Measured {
            norm_r: spectral_norm(&t.r),
            norm_commut: spectral_norm(&t.commutator()),
            norm_fcommut: spectral_norm(&quasicommutator(f, t)?),
        })
    }

    /// Re-measure the matrices and check the three bundle constraints.
    pub fn verify(&self) -> std::result::Result<(), String> {
        let m = Self::measure(&self.function, &self.triple).map_err(|e| e.to_string())?;
        let mut errs = Vec::new();
        if m.norm_r > 1.0 + 1e-9 {
            errs.push(format!("‖R‖ = {} > 1", m.norm_r));
        }
        if m.norm_commut > self.delta + 1e-9 {
            errs.push(format!("‖AR−RB‖ = {} > δ = {}", m.norm_commut, self.delta));
        }
        if m.norm_fcommut < self.certified_lower - 1e-8 {
            errs.push(format!("‖f(A)R−Rf(B)‖ = {} < certified {}", m.norm_fcommut, self.certified_lower));
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(errs.join("; "))
        }
    }
}

/// Pairs `(λ, μ)` with `0 < |λ − μ| < δ`.
pub fn separation_violations(l: &Grid, m: &Grid, delta: f64) -> Vec<(f64, f64)> {
    let mut bad = Vec::new();
    for &x in l.points() {
        for &y in m.points() {
            let d = (x - y).abs();
            if d > 0.0 && d < delta {
                bad.push((x, y));
            }
        }
    }
    bad
}

/// Build the commutator witness from a multiplier certificate for `Δ₀f` on
/// `Λ × M`: `A = diag(Λ)`, `B = diag(M)` and `R = (δ/2) f_δ(λ−μ) ⋆ k` with
/// `k` the normalized lower witness.
pub fn omega_lower_witness(
    f: &ScalarFn,
    l: &Grid,
    m: &Grid,
    delta: f64,
    cert: &MultiplierCertificate,
) -> Result<WitnessBundle> {
    if !(delta > 0.0 && delta.is_finite()) {
        return invalid(format!("δ must be positive, got {delta}"));
    }
    let bad = separation_violations(l, m, delta);
    if let Some(&(x, y)) = bad.first() {
        return Err(Error::Precondition(format!(
            "grids are not δ-separated: |{x} − {y}| < {delta} ({} offending pairs)",
            bad.len()
        )));
    }
    let (p, q) = (l.len(), m.len());
    let k = &cert.lower.witness;
    if k.shape() != (p, q) {
        return invalid(format!("certificate witness has shape {:?}, grids give {p}x{q}", k.shape()));
    }
    let nk = spectral_norm(k);
    let (lx, my) = (l.points(), m.points());
    let fd = ScalarFn::FaKernel { a: delta };
    let mut r = CMat::zeros(p, q);
    if nk > 0.0 {
        for i in 0..p {
            for j in 0..q {
                let phi = fd.eval_real(lx[i] - my[j])?;
                r[(i, j)] = k[(i, j)] * (0.5 * delta * phi / nk);
            }
        }
    }
    let triple = OperatorTriple::new(HermitianMatrix::diag(lx)?, HermitianMatrix::diag(my)?, r, "commutator-witness")?;
    let measured = WitnessBundle::measure(f, &triple)?;
    let certified_lower = if nk > 0.0 { (0.5 * delta * (cert.lower.value - WITNESS_SLACK)).max(0.0) } else { 0.0 };
    let bundle = WitnessBundle { function: f.clone(), triple, delta, measured, certified_lower };
    bundle.verify().map_err(|e| Error::Invalid(format!("witness construction failed: {e}")))?;
    Ok(bundle)
}

/// A compact subset of the line: finitely many closed intervals and points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompactSetDescr {
    pub intervals: Vec<(f64, f64)>,
    pub points: Vec<f64>,
}

impl CompactSetDescr {
    /// Normalizes: overlapping intervals merge, points inside intervals drop.
    pub fn new(intervals: Vec<(f64, f64)>, points: Vec<f64>) -> Result<Self> {
        let mut iv = Vec::new();
        let mut pts = points;
        for (a, b) in intervals {
            if !a.is_finite() || !b.is_finite() || a > b {
                return invalid(format!("bad interval [{a}, {b}]"));
            }
            if a == b {
                pts.push(a);
            } else {
                iv.push((a, b));
            }
        }
        if pts.iter().any(|x| !x.is_finite()) {
            return invalid("set points must be finite");
        }
        iv.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut merged: Vec<(f64, f64)> = Vec::new();
        for (a, b) in iv {
            match merged.last_mut() {
                Some(last) if a <= last.1 => last.1 = last.1.max(b),
                _ => merged.push((a, b)),
            }
        }
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts.retain(|&x| !merged.iter().any(|&(a, b)| a <= x && x <= b));
        Ok(CompactSetDescr { intervals: merged, points: pts })
    }

    pub fn interval(a: f64, b: f64) -> Result<Self> {
        Self::new(vec![(a, b)], vec![])
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty() && self.points.is_empty()
    }

    /// Connected components in ascending order (points as `[p, p]`).
    pub fn components(&self) -> Vec<(f64, f64)> {
        let mut c: Vec<(f64, f64)> = self.intervals.clone();
        c.extend(self.points.iter().map(|&p| (p, p)));
        c.sort_by(|x, y| x.0.total_cmp(&y.0));
        c
    }

    pub fn hull(&self) -> Option<(f64, f64)> {
        let c = self.components();
        Some((c.first()?.0, c.iter().map(|x| x.1).fold(f64::NEG_INFINITY, f64::max)))
    }

    pub fn scale(&self) -> f64 {
        self.hull().map_or(1.0, |(a, b)| 1.0f64.max(a.abs()).max(b.abs()))
    }

    pub fn distance(&self, x: f64) -> f64 {
        self.components()
            .iter()
            .map(|&(a, b)| if x < a { a - x } else if x > b { x - b } else { 0.0 })
            .fold(f64::INFINITY, f64::min)
    }

    pub fn contains(&self, x: f64, tol: f64) -> bool {
        self.distance(x) <= tol
    }

    /// About `n` probe points spread over the intervals, plus every isolated
    /// point; also returns the largest gap inside a component.
    pub fn probe(&self, n: usize) -> Result<(Grid, f64)> {
        if self.is_empty() {
            return invalid("empty set");
        }
        let total: f64 = self.intervals.iter().map(|(a, b)| b - a).sum();
        let mut pts = self.points.clone();
        let mut gap: f64 = 0.0;
        for &(a, b) in &self.intervals {
            let k = ((n as f64 * (b - a) / total).ceil() as usize).max(2);
            let h = (b - a) / (k - 1) as f64;
            gap = gap.max(h);
            pts.extend((0..k).map(|i| if i + 1 == k { b } else { a + h * i as f64 }));
        }
        pts.sort_by(f64::total_cmp);
        let tol = crate::func::MIN_RELATIVE_SPACING * self.scale() * 2.0;
        pts.dedup_by(|x, y| (*x - *y).abs() < tol);
        Ok((Grid::line(pts)?, gap))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Entropy {
    /// `log` of the cardinality.
    pub value: f64,
    pub cardinality: usize,
    pub net: Grid,
    /// Points of the set pairwise more than `2ε` apart; as many of them as
    /// net points proves minimality.
    pub separated: Vec<f64>,
}

fn rel_tol(x: f64) -> f64 {
    1e-12 * x.abs().max(1.0)
}

/// Minimal ε-net by left-to-right greedy placement.
pub fn epsilon_entropy(set: &CompactSetDescr, eps: f64) -> Result<Entropy> {
    if set.is_empty() {
        return invalid("ε-entropy of the empty set");
    }
    if !(eps > 0.0 && eps.is_finite()) {
        return invalid(format!("ε must be positive, got {eps}"));
    }
    let comps = set.components();
    let mut net = Vec::new();
    let mut reach = f64::NEG_INFINITY;
    for &(a, b) in &comps {
        if b <= reach + rel_tol(b) {
            continue;
        }
        let start = a.max(reach);
        let mut k = 0usize;
        loop {
            net.push(start + (2 * k + 1) as f64 * eps);
            reach = start + (2 * k + 2) as f64 * eps;
            if reach >= b - rel_tol(b) {
                break;
            }
            k += 1;
        }
    }
    let mut separated = Vec::new();
    let mut last = f64::NEG_INFINITY;
    let gap = 2.0 * eps * (1.0 + 1e-9);
    for &(a, b) in &comps {
        let mut x = a.max(last + gap);
        while x <= b {
            separated.push(x);
            last = x;
            x = last + gap;
        }
    }
    let cardinality = net.len();
    Ok(Entropy { value: (cardinality as f64).ln(), cardinality, net: Grid::line(net)?, separated })
}

/// Every point of the set lies within `eps` of `net`.
pub fn covers(set: &CompactSetDescr, net: &[f64], eps: f64) -> bool {
    let mut net: Vec<f64> = net.to_vec();
    net.sort_by(f64::total_cmp);
    set.components().iter().all(|&(a, b)| {
        let tol = rel_tol(b);
        // x is the leftmost point of [a, b] not yet covered
        let mut x = a;
        for &p in &net {
            if p - eps <= x + tol && p + eps >= x - tol {
                x = x.max(p + eps);
                if x >= b - tol {
                    return true;
                }
            }
        }
        false
    })
}

/// Net of radius `r` made of points of the set.
pub fn net_inside(set: &CompactSetDescr, r: f64) -> Result<Grid> {
    if set.is_empty() {
        return invalid("net of the empty set");
    }
    if !(r > 0.0) {
        return invalid(format!("net radius must be positive, got {r}"));
    }
    let mut pts = Vec::new();
    for (a, b) in set.components() {
        if b - a <= 2.0 * r {
            pts.push(0.5 * (a + b));
            continue;
        }
        let m = ((b - a) / (2.0 * r) - 1e-12).ceil() as usize;
        let s = (b - a) / m as f64;
        pts.extend((0..m).map(|k| a + s * (k as f64 + 0.5)));
    }
    Grid::line(pts)
}

const OMEGA_PROBE: usize = 4000;

/// Upper bound for `ω_{f,F}(t)`: exact where a closed form exists, otherwise a
/// probe maximum at `t + h` plus `Lip·h` for the probe gap `h`.
pub fn omega_upper(f: &ScalarFn, set: &CompactSetDescr, t: f64) -> Result<f64> {
    let (probe, h) = set.probe(OMEGA_PROBE)?;
    let est = modulus_estimate(f, t, &probe)?;
    if est.exact {
        return Ok(est.value);
    }
    let lip = lip_const(f, set.hull().unwrap_or((0.0, 0.0))).value;
    Ok(modulus_estimate(f, t + h, &probe)?.value + lip * h)
}

/// `max |f(x) − f(y)|` over probe pairs at distance at most `t` (a lower
/// bound for `ω_{f,F}(t)`).
pub fn omega_probe_lower(f: &ScalarFn, set: &CompactSetDescr, t: f64) -> Result<f64> {
    let (probe, _) = set.probe(OMEGA_PROBE)?;
    let x = probe.points();
    let v = x.iter().map(|&p| f.eval_real(p)).collect::<Result<Vec<_>>>()?;
    let mut best: f64 = 0.0;
    let mut hi = 0;
    for i in 0..x.len() {
        hi = hi.max(i);
        while hi + 1 < x.len() && x[hi + 1] - x[i] <= t {
            hi += 1;
        }
        for j in i + 1..=hi {
            best = best.max((v[j] - v[i]).abs());
        }
    }
    Ok(best)
}

/// Net upper bound `2ω(δ/2) + 2δ‖Δ₀f‖` over a net of radius
/// `net_resolution` inside the set. `lhs` is the trivial lower bound `ω(δ)`.
pub fn omega_upper_net(
    f: &ScalarFn,
    set: &CompactSetDescr,
    delta: f64,
    net_resolution: f64,
    opts: &SolverOptions,
) -> Result<BoundRecord> {
    if !(delta > 0.0) {
        return invalid(format!("δ must be positive, got {delta}"));
    }
    if !(net_resolution > 0.0 && net_resolution <= 0.5 * delta * (1.0 + 1e-12)) {
        return invalid(format!("net resolution {net_resolution} must lie in (0, δ/2]"));
    }
    let net = net_inside(set, net_resolution)?;
    let (upper, lower) = if net.len() == 1 {
        (0.0, 0.0)
    } else {
        let p = difference_quotient_problem(&Kernel::DividedDifference { function: f.clone() }, &net, &net)?;
        let o = SolverOptions { cap: opts.cap.max(net.len()), ..*opts };
        let c = mult_norm_with(&p, &o)?;
        (c.upper.value, c.lower.value)
    };
    let omega_half = omega_upper(f, set, 0.5 * delta)?;
    let rhs = 2.0 * omega_half + 2.0 * delta * upper;
    let lhs = omega_probe_lower(f, set, delta)?;
    Ok(BoundRecord::new("omega-upper-net", lhs, rhs)
        .param("function", f.to_string())
        .param("delta", delta)
        .param("net_size", net.len())
        .param("net_resolution", net_resolution)
        .param("omega_half", omega_half)
        .param("multiplier_upper", upper)
        .param("multiplier_lower", lower)
        .note("rhs bounds Ω♭; lhs is the scalar modulus ω(δ)"))
}

const DIVERGENCE_NOTE: &str = "f(t)/t does not decay to zero, so the integral diverges";

/// Probe check that `f` vanishes on `(−∞, 0]`, is nondecreasing and concave on
/// `[0, ∞)` and constant beyond its last kink. Returns that last kink scale
/// and the limit value.
fn concave_profile_check(f: &ScalarFn) -> Result<(f64, f64)> {
    let t = f.kinks().iter().fold(1.0f64, |m, k| m.max(k.abs()));
    let n = 6000;
    let xs: Vec<f64> = (0..=n).map(|i| -2.0 * t + 6.0 * t * i as f64 / n as f64).collect();
    let v = xs.iter().map(|&x| f.eval_real(x)).collect::<Result<Vec<_>>>()?;
    let sup = v.iter().fold(0.0f64, |m, y| m.max(y.abs()));
    let tol = 1e-12 * sup.max(1.0);
    for (x, y) in xs.iter().zip(&v) {
        if *x <= 0.0 && y.abs() > tol {
            return Err(Error::Precondition(format!("{f} does not vanish at {x}")));
        }
    }
    if v.windows(2).any(|w| w[1] < w[0] - tol) {
        return Err(Error::Precondition(format!("{f} is not nondecreasing")));
    }
    let first = xs.iter().position(|&x| x >= 0.0).unwrap_or(0);
    if v[first..].windows(3).any(|w| w[0] - 2.0 * w[1] + w[2] > tol) {
        return Err(Error::Precondition(format!("{f} is not concave on [0, ∞)")));
    }
    let far = f.eval_real(8.0 * t)?;
    if (far - f.eval_real(4.0 * t)?).abs() > tol {
        return Err(Error::Precondition(format!("{f}: {DIVERGENCE_NOTE}")));
    }
    Ok((t, far))
}

/// `∫_e^∞ f(δs) ds/(s² log s)` for a concave profile `f`.
pub fn concave_upper_integral(f: &ScalarFn, delta: f64) -> Result<f64> {
    if !(delta > 0.0) {
        return invalid(format!("δ must be positive, got {delta}"));
    }
    let (t, limit) = concave_profile_check(f)?;
    // s = e^u
    let g = |u: f64| f.eval_real(delta * u.exp()).map(|y| y * (-u).exp() / u).unwrap_or(f64::NAN);
    let mut cuts = vec![1.0];
    for k in f.kinks() {
        if k > 0.0 {
            let u = (k / delta).ln();
            if u > 1.0 {
                cuts.push(u);
            }
        }
    }
    let mut u_end = 1.0f64.max((4.0 * t / delta).ln()) + 20.0;
    cuts.push(u_end);
    cuts.sort_by(f64::total_cmp);
    let mut value: f64 = cuts.windows(2).map(|w| adaptive_simpson(&g, w[0], w[1], 1e-13)).sum();
    if !value.is_finite() {
        return invalid("integrand evaluation failed");
    }
    let mut tail = limit * (-u_end).exp() / u_end;
    while tail > 1e-6 * value && u_end < 700.0 {
        let next = u_end + 20.0;
        value += adaptive_simpson(&g, u_end, next, 1e-13);
        u_end = next;
        tail = limit * (-u_end).exp() / u_end;
    }
    Ok(value + tail)
}

/// A concave profile with the same operator modulus as `f`, when one exists:
/// `κ(t) = φ₂(t+1) − 1`, `φ_s(t) = φ_{|s|}(−t)`, and eligible functions map to
/// themselves.
pub fn concave_reduction(f: &ScalarFn) -> Option<ScalarFn> {
    let g = match f {
        ScalarFn::Kappa => ScalarFn::PhiS { s: 2.0 },
        ScalarFn::PhiS { s } => ScalarFn::PhiS { s: s.abs() },
        other => other.clone(),
    };
    concave_profile_check(&g).ok().map(|_| g)
}

/// `δ∫_δ^W ω(t)/t² dt + δ ω(W)/max(δ, W)` with `W` the probe diameter and `ω`
/// constant beyond `W`.
pub fn modnep_upper_integral(f: &ScalarFn, delta: f64, probe: &Grid) -> Result<f64> {
    if !(delta > 0.0) {
        return invalid(format!("δ must be positive, got {delta}"));
    }
    let (lo, hi) = probe.hull();
    let w = hi - lo;
    let exact = modulus_estimate(f, 1.0, probe)?.exact;
    let h = probe.points().windows(2).map(|p| p[1] - p[0]).fold(0.0, f64::max);
    let lip = lip_const(f, (lo, hi)).value;
    let om = |t: f64| -> Result<f64> {
        let t = t.min(w);
        if exact {
            Ok(modulus_estimate(f, t, probe)?.value)
        } else {
            Ok(modulus_estimate(f, t + h, probe)?.value + lip * h)
        }
    };
    let ow = if w > 0.0 { om(w)? } else { 0.0 };
    if !ow.is_finite() {
        return Err(Error::Precondition(format!("ω_{f} is unbounded on the probe")));
    }
    let mut integral = 0.0;
    if delta < w {
        if exact {
            let g = |u: f64| om(u.exp()).unwrap_or(f64::NAN) * (-u).exp();
            integral = adaptive_simpson(&g, delta.ln(), w.ln(), 1e-12 * ow / delta);
        } else {
            // ω is nondecreasing: bound each log-cell by its right endpoint.
            let n = 400;
            let (a, b) = (delta.ln(), w.ln());
            for k in 0..n {
                let u0 = a + (b - a) * k as f64 / n as f64;
                let u1 = a + (b - a) * (k + 1) as f64 / n as f64;
                integral += om(u1.exp())? * ((-u0).exp() - (-u1).exp());
            }
        }
    }
    let value = delta * integral + delta * ow / delta.max(w);
    if !value.is_finite() {
        return Err(Error::Precondition("divergent modulus integral".into()));
    }
    Ok(value)
}

/// `‖μ‖ δ log(log(1/δ + 3))`, for second derivatives of total mass zero.
pub fn fm_upper(mu: &MeasureSummary, delta: f64) -> Result<f64> {
    if !(delta > 0.0) {
        return invalid(format!("δ must be positive, got {delta}"));
    }
    let mass = mu.total_mass();
    if mass.abs() > 1e-12 * mu.total_variation.max(1.0) {
        return Err(Error::Precondition(format!(
            "second derivative has total mass {mass}; the operator modulus is infinite for every δ > 0"
        )));
    }
    Ok(mu.total_variation * delta * (1.0 / delta + 3.0).ln().ln())
}

/// Growth profiles with the constant set to one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GrowthBound {
    /// `a δ log(log(M/(aδ)))`
    Lipconv { a: f64, m: f64, delta: f64 },
    /// `log(2/(1−α)) ‖f‖_{Λα} δ^α`
    Holconv { alpha: f64, delta: f64, norm: f64 },
    /// `x / log log x`
    Bound911 { x: f64 },
}

pub fn growth_bound(kind: &GrowthBound) -> Result<f64> {
    match *kind {
        GrowthBound::Lipconv { a, m, delta } => {
            if !(a > 0.0 && m > 0.0 && delta > 0.0 && delta < m / (3.0 * a)) {
                return invalid(format!("lipconv needs a, M, δ > 0 and δ < M/(3a); got a={a}, M={m}, δ={delta}"));
            }
            Ok(a * delta * (m / (a * delta)).ln().ln())
        }
        GrowthBound::Holconv { alpha, delta, norm } => {
            if !((0.0..1.0).contains(&alpha) && delta > 0.0 && norm >= 0.0) {
                return invalid(format!("holconv needs 0 ≤ α < 1, δ > 0; got α={alpha}, δ={delta}"));
            }
            Ok((2.0 / (1.0 - alpha)).ln() * norm * delta.powf(alpha))
        }
        GrowthBound::Bound911 { x } => {
            if !(x >= 4.0 && x.is_finite()) {
                return invalid(format!("bound911 needs x ≥ 4, got {x}"));
            }
            Ok(x / x.ln().ln())
        }
    }
}

/// Compare `‖f(A)R − Rf(B)‖` with `(1 + K_ε(F)) Lip ‖AR − RB‖`, `ε = ‖AR−RB‖`.
pub fn qcom_ratio(f: &ScalarFn, t: &OperatorTriple, set: &CompactSetDescr) -> Result<BoundRecord> {
    let ea = eig_hermitian(&t.a, EIG_TOL)?;
    let eb = eig_hermitian(&t.b, EIG_TOL)?;
    let tol = 1e-9 * set.scale();
    if let Some(x) = ea.eigenvalues.iter().find(|&&x| !set.contains(x, tol)) {
        return Err(Error::Precondition(format!("eigenvalue {x} of A lies outside F")));
    }
    let all = ea.eigenvalues.iter().chain(&eb.eigenvalues);
    let lo = all.clone().copied().fold(f64::INFINITY, f64::min);
    let hi = all.copied().fold(f64::NEG_INFINITY, f64::max);
    let lip = lip_const(f, (lo, hi));
    let eps = spectral_norm(&t.commutator());
    let lhs = spectral_norm(&quasicommutator(f, t)?);
    let (k, card) = if eps > 0.0 {
        let e = epsilon_entropy(set, eps)?;
        (e.value, e.cardinality)
    } else {
        (0.0, 1)
    };
    let rhs = (1.0 + k) * lip.value * eps;
    let mut rec = BoundRecord::new("qcom", lhs, rhs)
        .param("function", f.to_string())
        .param("n", t.a.dim())
        .param("eps", eps)
        .param("entropy", k)
        .param("net_size", card)
        .param("lip", lip.value);
    if !lip.exact {
        rec = rec.note("Lipschitz constant is a probe value");
    }
    Ok(rec)
}

/// `‖Δ₀|·|‖` on `X × X` against `1 + log card X`.
pub fn logn_sharp_constant(x: &Grid, opts: &SolverOptions) -> Result<BoundRecord> {
    let f = ScalarFn::Abs;
    let p = difference_quotient_problem(&Kernel::DividedDifference { function: f }, x, x)?;
    let o = SolverOptions { cap: opts.cap.max(x.len()), ..*opts };
    let c = mult_norm_with(&p, &o)?;
    let rhs = 1.0 + (x.len() as f64).ln();
    Ok(BoundRecord::new("logn", c.upper.value, rhs)
        .param("card", x.len())
        .param("lower", c.lower.value)
        .param("upper", c.upper.value)
        .param("converged", c.converged))
}

/// `Λ = −G`, `M = G` with `G = {δ 2^j : δ 2^j ≤ a}`.
pub fn kato_grids(a: f64, delta: f64) -> Result<(Grid, Grid)> {
    if !(delta > 0.0 && delta < a && a.is_finite()) {
        return invalid(format!("need 0 < δ < a, got δ={delta}, a={a}"));
    }
    let k = ((a / delta).log2() + 1e-12).floor() as i32;
    let g: Vec<f64> = (0..=k).map(|j| delta * 2f64.powi(j)).collect();
    Ok((Grid::line(g.iter().map(|x| -x).collect())?, Grid::line(g)?))
}

/// `δ log(2 + log₊(a/δ))`
pub fn kato_profile(a: f64, delta: f64) -> f64 {
    delta * (2.0 + (a / delta).ln().max(0.0)).ln()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KatoPoint {
    pub a: f64,
    pub delta: f64,
    pub certificate: CertificateSummary,
    pub bundle: WitnessBundle,
    /// Certified lower bound for `Ω♭`.
    pub omega_flat_lower: f64,
    /// `omega_flat_lower / 2`, a lower bound for `Ω`.
    pub omega_lower: f64,
    pub profile: f64,
    pub record: BoundRecord,
}

pub fn kato_point(a: f64, delta: f64, opts: &SolverOptions) -> Result<KatoPoint> {
    let (l, m) = kato_grids(a, delta)?;
    let f = ScalarFn::Abs;
    let p = difference_quotient_problem(&Kernel::DividedDifference { function: f.clone() }, &l, &m)?;
    let cert = mult_norm_with(&p, opts)?;
    let bundle = omega_lower_witness(&f, &l, &m, delta, &cert)?;
    let flat = bundle.certified_lower;
    let profile = kato_profile(a, delta);
    let record = BoundRecord::new("kato", 0.5 * flat, profile)
        .param("a", a)
        .param("delta", delta)
        .param("grid", l.len())
        .param("omega_flat_lower", flat)
        .param("measured", bundle.measured.norm_fcommut)
        .note("lhs bounds Ω (certified Ω♭ lower halved); rhs is the profile without constant");
    Ok(KatoPoint {
        a,
        delta,
        certificate: cert.summary(),
        bundle,
        omega_flat_lower: flat,
        omega_lower: 0.5 * flat,
        profile,
        record,
    })
}

pub fn kato_experiment(a: f64, deltas: &[f64], opts: &SolverOptions, exec: Exec) -> Result<Vec<KatoPoint>> {
    if let Some(d) = deltas.iter().find(|&&d| !(d > 0.0 && d < a)) {
        return invalid(format!("δ = {d} is not in (0, a) for a = {a}"));
    }
    par::map(exec, deltas, |&d| kato_point(a, d, opts)).into_iter().collect()
}

/// Least-squares `c` in `Ω♭ lower ≈ c·profile` and the relative residual.
pub fn kato_fit(points: &[KatoPoint]) -> (f64, f64) {
    let p: Vec<f64> = points.iter().map(|k| k.profile).collect();
    let y: Vec<f64> = points.iter().map(|k| k.omega_flat_lower).collect();
    crate::numeric::fit_through_origin(&p, &y)
}

/// The truncated series `Σ αₙ φ_{sₙ}` with `αₙ = n / log log sₙ`.
pub fn series_function(s: &[f64]) -> Result<(ScalarFn, Vec<f64>)> {
    if s.is_empty() {
        return invalid("empty level list");
    }
    if s[0] < 10.0 {
        return invalid(format!("first level must be at least 10, got {}", s[0]));
    }
    if let Some(w) = s.windows(2).find(|w| w[1] < 2.0 * w[0]) {
        return invalid(format!("levels must at least double: {} after {}", w[1], w[0]));
    }
    let alphas: Vec<f64> = s.iter().enumerate().map(|(i, &x)| (i + 1) as f64 / x.ln().ln()).collect();
    let mut knots = vec![(0.0, 0.0)];
    for &sk in s {
        let y: f64 = s.iter().zip(&alphas).map(|(&sj, &aj)| aj * sk.min(sj)).sum();
        knots.push((sk, y));
    }
    Ok((ScalarFn::PiecewiseLinear(PiecewiseLinear::new(knots, 0.0, 0.0)?), alphas))
}

/// Self-adjoint `A₀, B₀` with spectra in `(−1, 1)` and `‖A₀ − B₀‖ ≤ 2/s`,
/// obtained from a commutator witness by the dilation
/// `B₀ = e^{iK} A₀ e^{−iK}`, `K = [[0, R], [R*, 0]]`.
pub fn level_pair(s: f64, opts: &SolverOptions) -> Result<(HermitianMatrix, HermitianMatrix)> {
    const SHRINK: f64 = 0.9;
    let delta = 2.0 / (SHRINK * s);
    let kp = kato_point(1.0, delta, opts)?;
    let t = &kp.bundle.triple;
    let (p, q) = (t.a.dim(), t.b.dim());
    let n = p + q;
    let mut diag: Vec<f64> = t.a.as_mat().data().iter().step_by(p + 1).map(|z| z.re).collect();
    diag.extend(t.b.as_mat().data().iter().step_by(q + 1).map(|z| z.re));
    let a0 = CMat::diag_real(&diag);
    let k = CMat::from_fn(n, n, |i, j| match (i < p, j < p) {
        (true, false) => t.r[(i, j - p)],
        (false, true) => t.r[(j, i - p)].conj(),
        _ => ZERO,
    });
    let u = unitary_exp(&HermitianMatrix::new(k)?, 1.0)?;
    let b0 = u.matmul(&a0).matmul(&u.adjoint());
    Ok((HermitianMatrix::new(a0.scale(SHRINK))?, HermitianMatrix::new(b0.scale(SHRINK))?))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeriesLevel {
    pub s: f64,
    pub alpha: f64,
    /// `(Aₙ, Bₙ)` with `R = I`.
    pub pair: OperatorTriple,
    pub norm_diff: f64,
    pub phi_diff: f64,
    pub f_diff: f64,
    /// `max_{k<n} ‖φ_{s_k}(Aₙ) − s_k I‖` over `Aₙ` and `Bₙ`.
    pub lower_levels_residual: f64,
    /// `max_{k>n} ‖φ_{s_k}(Aₙ) − Aₙ‖` over `Aₙ` and `Bₙ`.
    pub upper_levels_residual: f64,
    /// Distance of `f(Aₙ) − f(Bₙ)` from `αₙ(φ(Aₙ) − φ(Bₙ)) + Σ_{k>n} α_k (Aₙ − Bₙ)`.
    pub decomposition_residual: f64,
    pub record: BoundRecord,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PathologicalSeries {
    pub function: ScalarFn,
    pub alphas: Vec<f64>,
    pub levels: Vec<SeriesLevel>,
    pub warnings: Vec<String>,
}

pub fn pathological_series(s: &[f64], opts: &SolverOptions) -> Result<PathologicalSeries> {
    let (f, alphas) = series_function(s)?;
    let mut warnings = Vec::new();
    for (i, &x) in s.iter().enumerate() {
        let n = (i + 1) as f64;
        if x.ln().ln() < n.powi(3) {
            warnings.push(format!("level {}: log log s = {:.3} is below n³ = {}", i + 1, x.ln().ln(), n.powi(3)));
        }
    }
    let mut levels = Vec::new();
    for (i, &sn) in s.iter().enumerate() {
        let (a0, b0) = level_pair(sn, opts)?;
        let dim = a0.dim();
        let id = CMat::identity(dim);
        let lift = |m: &HermitianMatrix| HermitianMatrix::new(id.scale(sn).add(&m.as_mat().scale(0.5 * sn)));
        let an = lift(&a0)?;
        let bn = lift(&b0)?;
        let phi = |s: f64, m: &HermitianMatrix| apply_fn(&ScalarFn::PhiS { s }, m).map(HermitianMatrix::into_mat);
        let mut lower_res: f64 = 0.0;
        let mut upper_res: f64 = 0.0;
        for (k, &sk) in s.iter().enumerate() {
            for m in [&an, &bn] {
                if k < i {
                    lower_res = lower_res.max(spectral_norm(&phi(sk, m)?.sub(&id.scale(sk))));
                } else if k > i {
                    upper_res = upper_res.max(spectral_norm(&phi(sk, m)?.sub(m.as_mat())));
                }
            }
        }
        let diff = an.as_mat().sub(bn.as_mat());
        let phi_d = phi(sn, &an)?.sub(&phi(sn, &bn)?);
        let f_d = apply_fn(&f, &an)?.into_mat().sub(apply_fn(&f, &bn)?.as_mat());
        let tail: f64 = alphas[i + 1..].iter().sum();
        let predicted = phi_d.scale(alphas[i]).add(&diff.scale(tail));
        let decomposition_residual = spectral_norm(&f_d.sub(&predicted));
        let f_diff = spectral_norm(&f_d);
        let n = (i + 1) as f64;
        let record = BoundRecord::new("pathological-level", f_diff, n)
            .param("level", i + 1)
            .param("s", sn)
            .param("alpha", alphas[i])
            .param("norm_diff", spectral_norm(&diff))
            .param("phi_diff", spectral_norm(&phi_d))
            .note("rhs is αₙ log log sₙ = n");
        levels.push(SeriesLevel {
            s: sn,
            alpha: alphas[i],
            pair: OperatorTriple::pair(an, bn, format!("level {}", i + 1))?,
            norm_diff: spectral_norm(&diff),
            phi_diff: spectral_norm(&phi_d),
            f_diff,
            lower_levels_residual: lower_res,
            upper_levels_residual: upper_res,
            decomposition_residual,
            record,
        });
    }
    Ok(PathologicalSeries { function: f, alphas, levels, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    fn e1_one() -> f64 {
        0.219_383_934_395_520_3
    }

    #[test]
    fn quasicommutator_examples() {
        let t = OperatorTriple::random(5, (-2.0, 2.0), 4).unwrap();
        let q = quasicommutator(&ScalarFn::linear(3.0, 1.0), &t).unwrap();
        assert!(q.sub(&t.commutator().scale(3.0)).max_abs() < 1e-12);
        let a = HermitianMatrix::diag(&[1.0, -1.0]).unwrap();
        let r = CMat::from_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        let t = OperatorTriple::new(a.clone(), a, r, "x").unwrap();
        assert!(quasicommutator(&ScalarFn::Abs, &t).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn doi_residuals_small() {
        for f in [ScalarFn::Abs, ScalarFn::Kappa, ScalarFn::PhiS { s: 2.0 }, ScalarFn::TanhHalf] {
            for seed in 0..3 {
                let t = OperatorTriple::random(8, (-3.0, 3.0), seed).unwrap();
                let r = doi_identity_residual(&f, &t).unwrap();
                assert!(r <= doi_tolerance(&f, &t).unwrap(), "{f} seed {seed}: {r}");
            }
        }
        let a = HermitianMatrix::diag(&[-4.0, -2.5, -1.0]).unwrap();
        let b = HermitianMatrix::diag(&[1.5, 3.0, 4.5]).unwrap();
        let u = crate::linalg::random_unitary(3, &mut ChaCha8Rng::seed_from_u64(2));
        let b = HermitianMatrix::new(u.matmul(b.as_mat()).matmul(&u.adjoint())).unwrap();
        let t = OperatorTriple::pair(a, b, "disjoint").unwrap();
        assert!(doi_identity_residual(&ScalarFn::Kappa, &t).unwrap() < 1e-9 * 10.0);
    }

    #[test]
    fn trivial_witness() {
        let l = Grid::line(vec![-1.0]).unwrap();
        let m = Grid::line(vec![1.0]).unwrap();
        let p = difference_quotient_problem(&Kernel::DividedDifference { function: ScalarFn::Abs }, &l, &m).unwrap();
        let c = mult_norm_with(&p, &SolverOptions::default()).unwrap();
        let b = omega_lower_witness(&ScalarFn::Abs, &l, &m, 1.0, &c).unwrap();
        assert_eq!(b.certified_lower, 0.0);
    }

    #[test]
    fn separation_is_enforced() {
        let l = Grid::line(vec![-0.05, 0.5]).unwrap();
        let m = Grid::line(vec![0.0, 0.5]).unwrap();
        let p = difference_quotient_problem(&Kernel::DividedDifference { function: ScalarFn::Abs }, &l, &m).unwrap();
        let c = mult_norm_with(&p, &SolverOptions::default()).unwrap();
        assert!(matches!(omega_lower_witness(&ScalarFn::Abs, &l, &m, 0.1, &c), Err(Error::Precondition(_))));
    }

    #[test]
    fn kato_witness_holds() {
        let k = kato_point(1.0, 1.0 / 16.0, &SolverOptions::default()).unwrap();
        k.bundle.verify().unwrap();
        assert!(k.bundle.measured.norm_fcommut >= k.omega_flat_lower - 1e-8);
        assert!(k.omega_flat_lower > 0.0);
    }

    #[test]
    fn entropy_examples() {
        let f = CompactSetDescr::interval(0.0, 1.0).unwrap();
        let e = epsilon_entropy(&f, 0.1).unwrap();
        assert_eq!(e.cardinality, 5);
        assert_eq!(e.separated.len(), 5);
        assert!(covers(&f, e.net.points(), 0.1));
        let p = CompactSetDescr::new(vec![], vec![3.0]).unwrap();
        assert_eq!(epsilon_entropy(&p, 0.1).unwrap().value, 0.0);
        let two = CompactSetDescr::new(vec![(0.0, 1.0), (10.0, 11.0)], vec![]).unwrap();
        let e = epsilon_entropy(&two, 0.5).unwrap();
        assert_eq!(e.cardinality, 2);
        assert!((e.value - 2f64.ln()).abs() < 1e-15);
        assert!(!covers(&f, &[0.1, 0.3, 0.5, 0.7], 0.1));
    }

    #[test]
    fn set_normalization() {
        let s = CompactSetDescr::new(vec![(2.0, 3.0), (0.0, 1.0), (0.5, 2.5)], vec![1.0, 7.0, 7.0]).unwrap();
        assert_eq!(s.intervals, vec![(0.0, 3.0)]);
        assert_eq!(s.points, vec![7.0]);
        assert!(CompactSetDescr::interval(1.0, 0.0).is_err());
    }

    #[test]
    fn concave_integral() {
        let v = concave_upper_integral(&ScalarFn::PhiS { s: 1.0 }, 1.0).unwrap();
        assert!((v - e1_one()).abs() < 1e-6 * e1_one(), "{v}");
        assert!(v < 1.0 / E);
        assert_eq!(concave_upper_integral(&ScalarFn::constant(0.0), 0.5).unwrap(), 0.0);
        let ramp = ScalarFn::piecewise_linear(vec![(0.0, 0.0)], 0.0, 1.0).unwrap();
        assert!(matches!(concave_upper_integral(&ramp, 1.0), Err(Error::Precondition(_))));
        assert_eq!(concave_reduction(&ScalarFn::Kappa), Some(ScalarFn::PhiS { s: 2.0 }));
        assert_eq!(concave_reduction(&ScalarFn::Abs), None);
    }

    #[test]
    fn modnep_abs_closed_form() {
        let probe = Grid::uniform(-1.0, 1.0, 201).unwrap();
        for d in [0.01, 0.1, 0.5] {
            let v = modnep_upper_integral(&ScalarFn::Abs, d, &probe).unwrap();
            let exact = d * (2.0 / d).ln() + d;
            assert!((v - exact).abs() < 1e-9, "{d}: {v} vs {exact}");
        }
        let v = modnep_upper_integral(&ScalarFn::Abs, 5.0, &probe).unwrap();
        assert!((v - 2.0).abs() < 1e-12);
    }

    #[test]
    fn fm_examples() {
        let mu = crate::func::second_derivative_summary(&ScalarFn::PhiS { s: 3.0 }).unwrap();
        let d = 0.01;
        assert!((fm_upper(&mu, d).unwrap() - 2.0 * d * (1.0 / d + 3.0).ln().ln()).abs() < 1e-15);
        let abs = crate::func::second_derivative_summary(&ScalarFn::Abs).unwrap();
        assert!(fm_upper(&abs, d).is_err());
        assert_eq!(fm_upper(&MeasureSummary::new(vec![]), d).unwrap(), 0.0);
    }

    #[test]
    fn growth_examples() {
        let v = growth_bound(&GrowthBound::Lipconv { a: 1.0, m: 2.0, delta: 0.01 }).unwrap();
        assert!((v - 0.01 * 200f64.ln().ln()).abs() < 1e-15);
        let v = growth_bound(&GrowthBound::Holconv { alpha: 0.0, delta: 0.3, norm: 1.0 }).unwrap();
        assert!((v - 2f64.ln()).abs() < 1e-15);
        let x = E.powf(E);
        assert!((growth_bound(&GrowthBound::Bound911 { x }).unwrap() - x).abs() < 1e-12);
        assert!(growth_bound(&GrowthBound::Bound911 { x: 3.0 }).is_err());
        assert!(growth_bound(&GrowthBound::Holconv { alpha: 1.0, delta: 0.3, norm: 1.0 }).is_err());
    }

    #[test]
    fn qcom_linear_and_trivial() {
        let f = ScalarFn::linear(-2.0, 0.5);
        let set = CompactSetDescr::interval(-3.0, 3.0).unwrap();
        let t = OperatorTriple::random(6, (-3.0, 3.0), 9).unwrap();
        let r = qcom_ratio(&f, &t, &set).unwrap();
        let k = r.param_f64("entropy").unwrap();
        assert!((r.ratio.unwrap() - 1.0 / (1.0 + k)).abs() < 1e-10);
        let a = random_hermitian(4, (-1.0, 1.0), 1).unwrap();
        let t = OperatorTriple::pair(a.clone(), a, "same").unwrap();
        let r = qcom_ratio(&ScalarFn::Abs, &t, &set).unwrap();
        assert!(r.lhs < 1e-12);
    }

    #[test]
    fn series_single_level() {
        let (f, a) = series_function(&[10.0]).unwrap();
        assert!((a[0] - 1.0 / 10f64.ln().ln()).abs() < 1e-15);
        assert!((f.eval_real(5.0).unwrap() - 5.0 * a[0]).abs() < 1e-12);
        assert!((f.eval_real(50.0).unwrap() - 10.0 * a[0]).abs() < 1e-12);
        assert!(series_function(&[]).is_err());
        assert!(series_function(&[10.0, 15.0]).is_err());
    }

    #[test]
    fn series_two_levels() {
        let p = pathological_series(&[10.0, 40.0], &SolverOptions::default()).unwrap();
        for l in &p.levels {
            assert!(l.norm_diff <= 1.0 + 1e-9, "{}", l.norm_diff);
            assert!(l.lower_levels_residual <= 1e-9 * l.s);
            assert!(l.upper_levels_residual <= 1e-9 * l.s);
            assert!(l.decomposition_residual <= 1e-9 * l.s, "{}", l.decomposition_residual);
        }
        assert!(!p.warnings.is_empty());
    }

    #[test]
    fn net_upper_constant_and_order() {
        let set = CompactSetDescr::interval(-1.0, 1.0).unwrap();
        let r = omega_upper_net(&ScalarFn::constant(2.0), &set, 0.25, 0.125, &SolverOptions::default()).unwrap();
        assert!(r.rhs.abs() < 1e-9);
        let r = omega_upper_net(&ScalarFn::Abs, &set, 0.125, 0.0625, &SolverOptions::default()).unwrap();
        let k = kato_point(1.0, 0.125, &SolverOptions::default()).unwrap();
        assert!(k.omega_flat_lower <= r.rhs);
        assert!(r.ratio.unwrap() <= 1.0);
    }
}
