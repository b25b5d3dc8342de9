//! Dense complex matrices, Hermitian eigendecomposition, singular values and
//! random instance generation.

use std::ops::{Index, IndexMut};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::func::ScalarFn;

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Dense complex matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

pub type GeneralMatrix = CMat;

#[derive(Serialize, Deserialize)]
struct CMatRepr {
    rows: usize,
    cols: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl Serialize for CMat {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CMatRepr {
            rows: self.rows,
            cols: self.cols,
            re: self.data.iter().map(|z| z.re).collect(),
            im: self.data.iter().map(|z| z.im).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CMat {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = CMatRepr::deserialize(d)?;
        if r.re.len() != r.rows * r.cols || r.im.len() != r.re.len() {
            return Err(serde::de::Error::custom("matrix entry count does not match shape"));
        }
        let data = r.re.iter().zip(&r.im).map(|(&a, &b)| C64::new(a, b)).collect();
        Ok(CMat { rows: r.rows, cols: r.cols, data })
    }
}

impl Index<(usize, usize)> for CMat {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMat {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMat { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        CMat { rows, cols, data }
    }

    pub fn from_real_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        Self::from_fn(rows, cols, |i, j| C64::new(f(i, j), 0.0))
    }

    /// Build from row-major data.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return invalid(format!("{} entries for a {rows}x{cols} matrix", data.len()));
        }
        Ok(CMat { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|x| x.len() != c) {
            return invalid("ragged rows");
        }
        Ok(Self::from_real_fn(r, c, |i, j| rows[i][j]))
    }

    pub fn diag_real(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, &x) in d.iter().enumerate() {
            m[(i, i)] = C64::new(x, 0.0);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        CMat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&z| f(z)).collect() }
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|z| z * s)
    }

    pub fn matmul(&self, other: &CMat) -> CMat {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = CMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let orow = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let brow = &other.data[k * other.cols..(k + 1) * other.cols];
                for (o, &b) in orow.iter_mut().zip(brow) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, x.len());
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(&a, &b)| a * b).sum())
            .collect()
    }

    /// `self* x`
    pub fn adj_matvec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(self.rows, x.len());
        let mut out = vec![ZERO; self.cols];
        for (i, &xi) in x.iter().enumerate() {
            if xi == ZERO {
                continue;
            }
            for (o, &a) in out.iter_mut().zip(self.row(i)) {
                *o += a.conj() * xi;
            }
        }
        out
    }

    /// Schur–Hadamard (entrywise) product.
    pub fn hadamard(&self, other: &CMat) -> CMat {
        assert_eq!(self.shape(), other.shape(), "hadamard shape mismatch");
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| a * b).collect(),
        }
    }

    pub fn add(&self, other: &CMat) -> CMat {
        assert_eq!(self.shape(), other.shape());
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &CMat) -> CMat {
        assert_eq!(self.shape(), other.shape());
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| a - b).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> CMat {
        CMat::from_fn(rows.len(), cols.len(), |i, j| self[(rows[i], cols[j])])
    }

    /// Scale row i by `r[i]` and column j by `c[j]`.
    pub fn scale_rows_cols(&self, r: &[f64], c: &[f64]) -> CMat {
        CMat::from_fn(self.rows, self.cols, |i, j| self[(i, j)] * (r[i] * c[j]))
    }
}

/// Finite self-adjoint operator. The constructor symmetrizes its input.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix(CMat);

#[derive(Serialize, Deserialize)]
struct HermRepr {
    dim: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl Serialize for HermitianMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        HermRepr {
            dim: self.dim(),
            re: self.0.data.iter().map(|z| z.re).collect(),
            im: self.0.data.iter().map(|z| z.im).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for HermitianMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = HermRepr::deserialize(d)?;
        if r.dim == 0 || r.re.len() != r.dim * r.dim || r.im.len() != r.re.len() {
            return Err(serde::de::Error::custom("bad Hermitian matrix shape"));
        }
        let data = r.re.iter().zip(&r.im).map(|(&a, &b)| C64::new(a, b)).collect();
        HermitianMatrix::new(CMat { rows: r.dim, cols: r.dim, data })
            .map_err(serde::de::Error::custom)
    }
}

impl HermitianMatrix {
    pub fn new(m: CMat) -> Result<Self> {
        if !m.is_square() || m.rows == 0 {
            return invalid(format!("Hermitian matrix must be square and nonempty, got {:?}", m.shape()));
        }
        if !m.is_finite() {
            return invalid("non-finite entries");
        }
        let n = m.rows;
        let mut s = m;
        for i in 0..n {
            s[(i, i)] = C64::new(s[(i, i)].re, 0.0);
            for j in i + 1..n {
                let v = (s[(i, j)] + s[(j, i)].conj()) * 0.5;
                s[(i, j)] = v;
                s[(j, i)] = v.conj();
            }
        }
        Ok(HermitianMatrix(s))
    }

    pub fn diag(d: &[f64]) -> Result<Self> {
        Self::new(CMat::diag_real(d))
    }

    pub fn identity(n: usize) -> Self {
        HermitianMatrix(CMat::identity(n))
    }

    pub fn dim(&self) -> usize {
        self.0.rows
    }

    pub fn as_mat(&self) -> &CMat {
        &self.0
    }

    pub fn into_mat(self) -> CMat {
        self.0
    }
}

/// Eigenvalues ascending, eigenvectors as the columns of `basis`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub basis: CMat,
}

impl SpectralDecomposition {
    /// `basis · diag(g(λ)) · basis*`
    pub fn reassemble(&self, g: impl Fn(f64) -> f64) -> CMat {
        let n = self.eigenvalues.len();
        let vals: Vec<f64> = self.eigenvalues.iter().map(|&l| g(l)).collect();
        let u = &self.basis;
        CMat::from_fn(n, n, |i, j| {
            let mut acc = ZERO;
            for k in 0..n {
                acc += u[(i, k)] * vals[k] * u[(j, k)].conj();
            }
            acc
        })
    }
}

pub const JACOBI_MAX_SWEEPS: usize = 100;
const JACOBI_THRESHOLD: f64 = 1e-13;

/// Cyclic Jacobi eigendecomposition of a Hermitian matrix.
///
/// Sweeps stop once the off-diagonal Frobenius mass falls below
/// `1e-13·‖A‖_F`. If the sweep cap is hit, the result is still accepted when
/// the off-diagonal mass is below `tol·‖A‖_F`.
pub fn eig_hermitian(a: &HermitianMatrix, tol: f64) -> Result<SpectralDecomposition> {
    if !(tol > 0.0 && tol <= 1e-6) {
        return invalid(format!("eigen tolerance {tol} outside (0, 1e-6]"));
    }
    let n = a.dim();
    let mut m = a.0.clone();
    let mut v = CMat::identity(n);
    let norm = m.frobenius();
    let off = |m: &CMat| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += m[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };
    let mut sweeps = 0;
    let mut converged = norm == 0.0 || off(&m) <= JACOBI_THRESHOLD * norm;
    while !converged && sweeps < JACOBI_MAX_SWEEPS {
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                let r = apq.norm();
                if r <= f64::MIN_POSITIVE {
                    continue;
                }
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                if r < 1e-18 * norm && r < 1e-3 * (aqq - app).abs() {
                    m[(p, q)] = ZERO;
                    m[(q, p)] = ZERO;
                    continue;
                }
                let w = apq / r;
                let tau = (aqq - app) / (2.0 * r);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let wc = w.conj();
                // columns: A ← A G with G = [[c, s], [-s w̄, c w̄]]
                for k in 0..n {
                    let akp = m[(k, p)];
                    let akq = m[(k, q)];
                    m[(k, p)] = akp * c - akq * wc * s;
                    m[(k, q)] = akp * s + akq * wc * c;
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * c - vkq * wc * s;
                    v[(k, q)] = vkp * s + vkq * wc * c;
                }
                // rows: A ← G* A
                for k in 0..n {
                    let apk = m[(p, k)];
                    let aqk = m[(q, k)];
                    m[(p, k)] = apk * c - aqk * w * s;
                    m[(q, k)] = apk * s + aqk * w * c;
                }
                m[(p, q)] = ZERO;
                m[(q, p)] = ZERO;
                m[(p, p)] = C64::new(m[(p, p)].re, 0.0);
                m[(q, q)] = C64::new(m[(q, q)].re, 0.0);
            }
        }
        converged = off(&m) <= JACOBI_THRESHOLD * norm;
    }
    if !converged {
        let o = off(&m);
        if o > tol * norm {
            return Err(Error::NoConvergence { norm, sweeps, off: o });
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.total_cmp(&m[(j, j)].re));
    let eigenvalues = order.iter().map(|&i| m[(i, i)].re).collect();
    let basis = CMat::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok(SpectralDecomposition { eigenvalues, basis })
}

pub const DEFAULT_EIG_TOL: f64 = 1e-10;

const POWER_STOP: f64 = 1e-12;
const POWER_CAP: usize = 10_000;

/// Largest singular value by power iteration on `M*M`.
pub fn op_norm(m: &CMat) -> f64 {
    let (r, c) = m.shape();
    if r == 0 || c == 0 {
        return 0.0;
    }
    let x0: Vec<C64> = (0..c)
        .map(|j| {
            let t = j as f64;
            C64::new(1.0 + 0.5 * (1.3 * t + 0.7).sin(), 0.3 * (0.9 * t).cos())
        })
        .collect();
    op_norm_from(m, &x0)
}

/// Power iteration started from `x0`. The estimate never drops below
/// `‖M x0‖/‖x0‖`, nor below the largest row or column norm.
pub fn op_norm_from(m: &CMat, x0: &[C64]) -> f64 {
    let (r, c) = m.shape();
    if r == 0 || c == 0 {
        return 0.0;
    }
    let mut floor: f64 = 0.0;
    for i in 0..r {
        floor = floor.max(m.row(i).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt());
    }
    for j in 0..c {
        floor = floor.max((0..r).map(|i| m[(i, j)].norm_sqr()).sum::<f64>().sqrt());
    }
    if floor == 0.0 {
        return 0.0;
    }
    let mut x = x0.to_vec();
    let mut nx = vec_norm(&x);
    if nx == 0.0 {
        x = vec![ONE; c];
        nx = vec_norm(&x);
    }
    x.iter_mut().for_each(|z| *z /= nx);
    let mut best: f64 = 0.0;
    let mut prev = 0.0;
    for _ in 0..POWER_CAP {
        let y = m.matvec(&x);
        let s = vec_norm(&y);
        best = best.max(s);
        if s == 0.0 {
            break;
        }
        let z = m.adj_matvec(&y);
        let nz = vec_norm(&z);
        if nz == 0.0 {
            break;
        }
        x = z.into_iter().map(|v| v / nz).collect();
        if (s - prev).abs() <= POWER_STOP * s {
            break;
        }
        prev = s;
    }
    best.max(floor)
}

pub fn vec_norm(x: &[C64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Thin singular value decomposition `M = U diag(s) V*`, singular values
/// descending, only strictly positive ones kept.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: CMat,
    pub s: Vec<f64>,
    pub v: CMat,
}

/// Column-major work arrays for one-sided Jacobi.
pub(crate) struct JacobiWork {
    pub m: usize,
    pub n: usize,
    /// `n` columns of length `m`
    pub g: Vec<C64>,
    /// `n` columns of length `n`
    pub v: Vec<C64>,
}

impl JacobiWork {
    /// Start from `A·V0` with accumulated right factor `V0`.
    pub fn new(a: &CMat, v0: Option<&[C64]>) -> Self {
        let (m, n) = a.shape();
        let v: Vec<C64> = match v0 {
            Some(v0) if v0.len() == n * n => v0.to_vec(),
            _ => {
                let mut v = vec![ZERO; n * n];
                for j in 0..n {
                    v[j * n + j] = ONE;
                }
                v
            }
        };
        let mut g = vec![ZERO; m * n];
        for j in 0..n {
            let vc = &v[j * n..(j + 1) * n];
            let gc = &mut g[j * m..(j + 1) * m];
            for (k, &vk) in vc.iter().enumerate() {
                if vk == ZERO {
                    continue;
                }
                for (i, gi) in gc.iter_mut().enumerate() {
                    *gi += a.data[i * n + k] * vk;
                }
            }
        }
        JacobiWork { m, n, g, v }
    }

    /// Run cyclic sweeps until all column pairs are numerically orthogonal.
    pub fn run(&mut self, max_sweeps: usize) -> usize {
        let (m, n) = (self.m, self.n);
        let eps = 4.0 * f64::EPSILON * (m as f64).sqrt().max(1.0);
        let mut norms: Vec<f64> =
            (0..n).map(|j| self.g[j * m..(j + 1) * m].iter().map(|z| z.norm_sqr()).sum()).collect();
        let mut sweeps = 0;
        while sweeps < max_sweeps {
            sweeps += 1;
            let mut rotated = false;
            for p in 0..n {
                for q in p + 1..n {
                    let alpha = norms[p];
                    let beta = norms[q];
                    if alpha == 0.0 || beta == 0.0 {
                        continue;
                    }
                    let (gp, gq) = two_cols(&mut self.g, m, p, q);
                    let mut gamma = ZERO;
                    for (a, b) in gp.iter().zip(gq.iter()) {
                        gamma += a.conj() * b;
                    }
                    let r = gamma.norm();
                    if r <= eps * (alpha * beta).sqrt() {
                        continue;
                    }
                    rotated = true;
                    let w = gamma / r;
                    let wc = w.conj();
                    let tau = (beta - alpha) / (2.0 * r);
                    let t = if tau >= 0.0 {
                        1.0 / (tau + (1.0 + tau * tau).sqrt())
                    } else {
                        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                    };
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = t * c;
                    let mut na = 0.0;
                    let mut nb = 0.0;
                    for (a, b) in gp.iter_mut().zip(gq.iter_mut()) {
                        let x = *a;
                        let y = *b;
                        *a = x * c - y * wc * s;
                        *b = x * s + y * wc * c;
                        na += a.norm_sqr();
                        nb += b.norm_sqr();
                    }
                    norms[p] = na;
                    norms[q] = nb;
                    let (vp, vq) = two_cols(&mut self.v, n, p, q);
                    for (a, b) in vp.iter_mut().zip(vq.iter_mut()) {
                        let x = *a;
                        let y = *b;
                        *a = x * c - y * wc * s;
                        *b = x * s + y * wc * c;
                    }
                }
            }
            if !rotated {
                break;
            }
        }
        sweeps
    }

    /// Extract the thin SVD; singular values at or below `cut·σ_max` are dropped.
    pub fn finish(&self, cut: f64) -> Svd {
        let (m, n) = (self.m, self.n);
        let norms: Vec<f64> =
            (0..n).map(|j| self.g[j * m..(j + 1) * m].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()).collect();
        let smax = norms.iter().cloned().fold(0.0, f64::max);
        let mut order: Vec<usize> = (0..n).filter(|&j| norms[j] > cut * smax && norms[j] > 0.0).collect();
        order.sort_by(|&a, &b| norms[b].total_cmp(&norms[a]));
        let r = order.len();
        let u = CMat::from_fn(m, r, |i, k| self.g[order[k] * m + i] / norms[order[k]]);
        let v = CMat::from_fn(n, r, |i, k| self.v[order[k] * n + i]);
        let s = order.iter().map(|&j| norms[j]).collect();
        Svd { u, s, v }
    }
}

fn two_cols(buf: &mut [C64], len: usize, p: usize, q: usize) -> (&mut [C64], &mut [C64]) {
    debug_assert!(p < q);
    let (lo, hi) = buf.split_at_mut(q * len);
    (&mut lo[p * len..(p + 1) * len], &mut hi[..len])
}

/// One-sided Jacobi SVD.
pub fn svd(a: &CMat) -> Svd {
    if a.rows() >= a.cols() {
        let mut w = JacobiWork::new(a, None);
        w.run(80);
        w.finish(0.0)
    } else {
        let t = svd(&a.adjoint());
        Svd { u: t.v, s: t.s, v: t.u }
    }
}

/// All singular values, descending (zeros included).
pub fn singular_values(a: &CMat) -> Vec<f64> {
    let big = if a.rows() >= a.cols() { a.clone() } else { a.adjoint() };
    let mut w = JacobiWork::new(&big, None);
    w.run(80);
    let m = w.m;
    let mut s: Vec<f64> = (0..w.n)
        .map(|j| w.g[j * m..(j + 1) * m].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Trace norm (sum of singular values).
pub fn trace_norm(a: &CMat) -> f64 {
    singular_values(a).iter().sum()
}

/// `f(A)` through the spectral theorem.
pub fn apply_fn(f: &ScalarFn, a: &HermitianMatrix) -> Result<HermitianMatrix> {
    let dec = eig_hermitian(a, DEFAULT_EIG_TOL)?;
    apply_fn_decomposed(f, &dec)
}

pub fn apply_fn_decomposed(f: &ScalarFn, dec: &SpectralDecomposition) -> Result<HermitianMatrix> {
    let vals = dec
        .eigenvalues
        .iter()
        .map(|&l| f.eval_real(l))
        .collect::<Result<Vec<f64>>>()?;
    let n = vals.len();
    let u = &dec.basis;
    let m = CMat::from_fn(n, n, |i, j| {
        let mut acc = ZERO;
        for k in 0..n {
            acc += u[(i, k)] * vals[k] * u[(j, k)].conj();
        }
        acc
    });
    HermitianMatrix::new(m)
}

/// Haar-distributed unitary by Gram–Schmidt on a complex Gaussian matrix.
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMat {
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut x: Vec<C64> = (0..n)
            .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        for _ in 0..2 {
            for c in &cols {
                let d: C64 = c.iter().zip(&x).map(|(a, b)| a.conj() * b).sum();
                for (xi, ci) in x.iter_mut().zip(c) {
                    *xi -= d * ci;
                }
            }
        }
        let nx = vec_norm(&x);
        if nx > 1e-8 {
            cols.push(x.into_iter().map(|z| z / nx).collect());
        }
    }
    CMat::from_fn(n, n, |i, j| cols[j][i])
}

/// Random Hermitian matrix `U diag(λ) U*` with eigenvalues drawn uniformly from
/// `[lo, hi]` and a Haar unitary `U`.
pub fn random_hermitian(dim: usize, (lo, hi): (f64, f64), seed: u64) -> Result<HermitianMatrix> {
    if dim == 0 {
        return invalid("dimension must be positive");
    }
    if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
        return invalid(format!("empty spectrum box [{lo}, {hi}]"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lam: Vec<f64> = (0..dim).map(|_| lo + (hi - lo) * rng.random::<f64>()).collect();
    let u = random_unitary(dim, &mut rng);
    with_spectrum(&u, &lam)
}

/// `U diag(λ) U*`
pub fn with_spectrum(u: &CMat, lam: &[f64]) -> Result<HermitianMatrix> {
    let n = lam.len();
    let m = CMat::from_fn(n, n, |i, j| {
        let mut acc = ZERO;
        for k in 0..n {
            acc += u[(i, k)] * lam[k] * u[(j, k)].conj();
        }
        acc
    });
    HermitianMatrix::new(m)
}

/// Random complex matrix with standard Gaussian entries.
pub fn random_general<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMat {
    CMat::from_fn(rows, cols, |_, _| {
        C64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
    })
}

/// `exp(i t H)` for Hermitian `H`.
pub fn unitary_exp(h: &HermitianMatrix, t: f64) -> Result<CMat> {
    let dec = eig_hermitian(h, DEFAULT_EIG_TOL)?;
    let n = h.dim();
    let u = &dec.basis;
    let ph: Vec<C64> = dec.eigenvalues.iter().map(|&l| C64::from_polar(1.0, t * l)).collect();
    Ok(CMat::from_fn(n, n, |i, j| {
        let mut acc = ZERO;
        for k in 0..n {
            acc += u[(i, k)] * ph[k] * u[(j, k)].conj();
        }
        acc
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn herm(rows: &[Vec<f64>]) -> HermitianMatrix {
        HermitianMatrix::new(CMat::from_rows(rows).unwrap()).unwrap()
    }

    #[test]
    fn eig_diagonal_is_permutation() {
        let d = eig_hermitian(&HermitianMatrix::diag(&[3.0, 1.0, 2.0]).unwrap(), 1e-10).unwrap();
        assert_eq!(d.eigenvalues, vec![1.0, 2.0, 3.0]);
        for j in 0..3 {
            let nz = (0..3).filter(|&i| d.basis[(i, j)].norm() > 0.5).count();
            assert_eq!(nz, 1);
        }
    }

    #[test]
    fn eig_identity() {
        let d = eig_hermitian(&HermitianMatrix::identity(4), 1e-10).unwrap();
        assert_eq!(d.eigenvalues, vec![1.0; 4]);
    }

    #[test]
    fn eig_swap_matrix() {
        let d = eig_hermitian(&herm(&[vec![0.0, 1.0], vec![1.0, 0.0]]), 1e-10).unwrap();
        assert!((d.eigenvalues[0] + 1.0).abs() < 1e-14);
        assert!((d.eigenvalues[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn eig_complex_reconstructs() {
        let a = random_hermitian(12, (-3.0, 5.0), 4).unwrap();
        let d = eig_hermitian(&a, 1e-10).unwrap();
        let back = d.reassemble(|x| x);
        assert!(op_norm(&back.sub(a.as_mat())) < 1e-12 * (1.0 + op_norm(a.as_mat())));
        let g = d.basis.adjoint().matmul(&d.basis);
        assert!(g.sub(&CMat::identity(12)).max_abs() < 1e-12);
        assert!(d.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn eig_rejects_bad_tolerance() {
        assert!(eig_hermitian(&HermitianMatrix::identity(2), 1e-3).is_err());
        assert!(eig_hermitian(&HermitianMatrix::identity(2), 0.0).is_err());
    }

    #[test]
    fn op_norm_examples() {
        let m = CMat::from_rows(&[vec![1.0, 0.0], vec![0.0, -2.0]]).unwrap();
        assert!((op_norm(&m) - 2.0).abs() < 1e-12);
        let ones = CMat::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        assert!((op_norm(&ones) - 2.0).abs() < 1e-12);
        assert_eq!(op_norm(&CMat::zeros(3, 2)), 0.0);
        let u = [C64::new(1.0, 2.0), C64::new(-0.5, 0.0), C64::new(0.0, 3.0)];
        let v = [C64::new(2.0, 0.0), C64::new(0.0, -1.0)];
        let r1 = CMat::from_fn(3, 2, |i, j| u[i] * v[j].conj());
        assert!((op_norm(&r1) - vec_norm(&u) * vec_norm(&v)).abs() < 1e-10);
    }

    #[test]
    fn svd_reconstructs_wide_and_tall() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for &(r, c) in &[(5, 3), (3, 7), (6, 6)] {
            let a = random_general(r, c, &mut rng);
            let s = svd(&a);
            let us = CMat::from_fn(r, s.s.len(), |i, k| s.u[(i, k)] * s.s[k]);
            let back = us.matmul(&s.v.adjoint());
            assert!(back.sub(&a).max_abs() < 1e-12);
            assert!((s.s[0] - op_norm(&a)).abs() < 1e-10);
        }
    }

    #[test]
    fn apply_fn_examples() {
        let a = HermitianMatrix::diag(&[-2.0, 3.0]).unwrap();
        let r = apply_fn(&ScalarFn::Abs, &a).unwrap();
        assert!(r.as_mat().sub(&CMat::diag_real(&[2.0, 3.0])).max_abs() < 1e-14);
        let a = HermitianMatrix::diag(&[-5.0, 0.5, 5.0]).unwrap();
        let r = apply_fn(&ScalarFn::Kappa, &a).unwrap();
        assert!(r.as_mat().sub(&CMat::diag_real(&[-1.0, 0.5, 1.0])).max_abs() < 1e-14);
        let a = HermitianMatrix::diag(&[0.0, 1.0, 2.0, 3.0]).unwrap();
        let r = apply_fn(&ScalarFn::PhiS { s: 2.0 }, &a).unwrap();
        assert!(r.as_mat().sub(&CMat::diag_real(&[0.0, 1.0, 2.0, 2.0])).max_abs() < 1e-14);
    }

    #[test]
    fn random_hermitian_is_reproducible_and_boxed() {
        let a = random_hermitian(8, (-1.0, 1.0), 7).unwrap();
        let b = random_hermitian(8, (-1.0, 1.0), 7).unwrap();
        assert_eq!(a, b);
        let d = eig_hermitian(&a, 1e-10).unwrap();
        assert!(d.eigenvalues.iter().all(|&x| (-1.0 - 1e-12..=1.0 + 1e-12).contains(&x)));
        let one = random_hermitian(1, (0.0, 1.0), 3).unwrap();
        let v = one.as_mat()[(0, 0)];
        assert!(v.im == 0.0 && (0.0..=1.0).contains(&v.re));
    }

    #[test]
    fn json_round_trip() {
        let a = random_hermitian(3, (0.0, 1.0), 1).unwrap();
        let s = serde_json::to_string(&a).unwrap();
        assert!(s.starts_with("{\"dim\":3"));
        let b: HermitianMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(a, b);
    }
}
