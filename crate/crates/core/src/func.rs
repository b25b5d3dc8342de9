//! Test functions with exact metadata, grids, divided differences and scalar
//! moduli of continuity.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::{CMat, C64, ZERO};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Domain {
    Line,
    Circle,
}

/// A point of the real line or of the unit circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Point {
    Real(f64),
    Circle(C64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseLinear {
    /// Strictly ascending `(x, y)` pairs.
    pub knots: Vec<(f64, f64)>,
    pub left_slope: f64,
    pub right_slope: f64,
}

impl PiecewiseLinear {
    pub fn new(knots: Vec<(f64, f64)>, left_slope: f64, right_slope: f64) -> Result<Self> {
        let p = PiecewiseLinear { knots, left_slope, right_slope };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.knots.is_empty() {
            return invalid("piecewise linear function needs at least one knot");
        }
        if self.knots.windows(2).any(|w| !(w[0].0 < w[1].0)) {
            return invalid("piecewise linear knots must be strictly ascending");
        }
        let finite = self.knots.iter().all(|&(x, y)| x.is_finite() && y.is_finite())
            && self.left_slope.is_finite()
            && self.right_slope.is_finite();
        if !finite {
            return invalid("non-finite piecewise linear data");
        }
        Ok(())
    }

    pub fn eval(&self, x: f64) -> f64 {
        let k = &self.knots;
        let (x0, y0) = k[0];
        let (xl, yl) = k[k.len() - 1];
        if x <= x0 {
            return y0 + self.left_slope * (x - x0);
        }
        if x >= xl {
            return yl + self.right_slope * (x - xl);
        }
        let i = k.partition_point(|&(kx, _)| kx <= x) - 1;
        let (xa, ya) = k[i];
        let (xb, yb) = k[i + 1];
        ya + (yb - ya) * (x - xa) / (xb - xa)
    }

    /// Slopes of the `knots.len() + 1` pieces, left to right.
    pub fn slopes(&self) -> Vec<f64> {
        let mut s = vec![self.left_slope];
        for w in self.knots.windows(2) {
            s.push((w[1].1 - w[0].1) / (w[1].0 - w[0].0));
        }
        s.push(self.right_slope);
        s
    }
}

/// The function registry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params")]
pub enum ScalarFn {
    /// `|x|`
    Abs,
    /// `½(|1+t| − |1−t|)`
    Kappa,
    /// `½(|t|+|s|) − |t−s|/2`
    PhiS { s: f64 },
    /// `(eˣ−1)/(eˣ+1)`
    TanhHalf,
    /// `x/a²` on `[−a, a]`, `1/x` outside.
    FaKernel { a: f64 },
    PiecewiseLinear(PiecewiseLinear),
    /// `Σ_{k=−n}^{n} c_k z^k` on the unit circle, coefficients listed from `c_{−n}`.
    TrigPoly { coeffs: Vec<C64> },
    /// `Σ_{j=0}^{m} ε_j w_j z^{2^j}` on the unit circle.
    LacunarySigned { level: usize, signs: Vec<i8>, weights: Vec<f64> },
}

impl fmt::Display for ScalarFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarFn::Abs => write!(f, "abs"),
            ScalarFn::Kappa => write!(f, "kappa"),
            ScalarFn::PhiS { s } => write!(f, "phi_{s}"),
            ScalarFn::TanhHalf => write!(f, "tanh-half"),
            ScalarFn::FaKernel { a } => write!(f, "f_a(a={a})"),
            ScalarFn::PiecewiseLinear(p) => write!(f, "piecewise-linear({} knots)", p.knots.len()),
            ScalarFn::TrigPoly { coeffs } => write!(f, "trig-poly(deg {})", coeffs.len() / 2),
            ScalarFn::LacunarySigned { level, .. } => write!(f, "lacunary(level {level})"),
        }
    }
}

impl ScalarFn {
    pub fn linear(slope: f64, intercept: f64) -> Self {
        ScalarFn::PiecewiseLinear(PiecewiseLinear {
            knots: vec![(0.0, intercept)],
            left_slope: slope,
            right_slope: slope,
        })
    }

    pub fn constant(c: f64) -> Self {
        Self::linear(0.0, c)
    }

    pub fn piecewise_linear(knots: Vec<(f64, f64)>, left: f64, right: f64) -> Result<Self> {
        Ok(ScalarFn::PiecewiseLinear(PiecewiseLinear::new(knots, left, right)?))
    }

    pub fn trig_poly(coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.len() % 2 != 1 {
            return invalid("trigonometric polynomial needs 2n+1 coefficients");
        }
        Ok(ScalarFn::TrigPoly { coeffs })
    }

    /// Analytic polynomial `Σ_{k=0}^{n} a_k z^k` as a trigonometric polynomial.
    pub fn analytic_poly(a: &[C64]) -> Self {
        let n = a.len().saturating_sub(1);
        let mut coeffs = vec![ZERO; 2 * n + 1];
        coeffs[n..].copy_from_slice(a);
        ScalarFn::TrigPoly { coeffs }
    }

    pub fn lacunary(signs: Vec<i8>, weights: Vec<f64>) -> Result<Self> {
        if signs.is_empty() || signs.len() != weights.len() {
            return invalid("lacunary function needs matching nonempty signs and weights");
        }
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return invalid("lacunary signs must be ±1");
        }
        Ok(ScalarFn::LacunarySigned { level: signs.len() - 1, signs, weights })
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ScalarFn::PhiS { s } if !s.is_finite() => invalid("phi_s needs finite s"),
            ScalarFn::FaKernel { a } if !(*a > 0.0 && a.is_finite()) => invalid("f_a needs a > 0"),
            ScalarFn::PiecewiseLinear(p) => p.validate(),
            ScalarFn::TrigPoly { coeffs } if coeffs.len() % 2 != 1 => {
                invalid("trigonometric polynomial needs 2n+1 coefficients")
            }
            ScalarFn::LacunarySigned { level, signs, weights } => {
                if signs.len() != level + 1 || weights.len() != level + 1 {
                    return invalid("lacunary level does not match signs/weights");
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn domain(&self) -> Domain {
        match self {
            ScalarFn::TrigPoly { .. } | ScalarFn::LacunarySigned { .. } => Domain::Circle,
            _ => Domain::Line,
        }
    }

    pub fn eval(&self, t: Point) -> Result<C64> {
        match t {
            Point::Real(x) => self.eval_real(x).map(|v| C64::new(v, 0.0)),
            Point::Circle(z) => self.eval_circle(z),
        }
    }

    pub fn eval_real(&self, x: f64) -> Result<f64> {
        Ok(match self {
            ScalarFn::Abs => x.abs(),
            ScalarFn::Kappa => 0.5 * ((1.0 + x).abs() - (1.0 - x).abs()),
            ScalarFn::PhiS { s } => 0.5 * (x.abs() + s.abs()) - 0.5 * (x - s).abs(),
            ScalarFn::TanhHalf => (0.5 * x).tanh(),
            ScalarFn::FaKernel { a } => {
                if x.abs() <= *a {
                    x / (a * a)
                } else {
                    1.0 / x
                }
            }
            ScalarFn::PiecewiseLinear(p) => p.eval(x),
            ScalarFn::TrigPoly { .. } | ScalarFn::LacunarySigned { .. } => {
                return Err(Error::Domain { function: self.to_string(), point: format!("{x} on the real line") })
            }
        })
    }

    pub fn eval_circle(&self, z: C64) -> Result<C64> {
        match self {
            ScalarFn::TrigPoly { coeffs } => {
                let n = (coeffs.len() / 2) as i32;
                Ok((-n..=n).map(|k| coeffs[(k + n) as usize] * z.powi(k)).sum())
            }
            ScalarFn::LacunarySigned { signs, weights, .. } => Ok(signs
                .iter()
                .zip(weights)
                .enumerate()
                .map(|(j, (&e, &w))| z.powi(1 << j) * (e as f64 * w))
                .sum()),
            _ => Err(Error::Domain { function: self.to_string(), point: format!("{z} on the circle") }),
        }
    }

    /// Points where the real derivative does not exist.
    pub fn kinks(&self) -> Vec<f64> {
        match self {
            ScalarFn::Abs => vec![0.0],
            ScalarFn::Kappa => vec![-1.0, 1.0],
            ScalarFn::PhiS { s } if *s != 0.0 => vec![0.0, *s],
            ScalarFn::FaKernel { a } => vec![-*a, *a],
            ScalarFn::PiecewiseLinear(p) => {
                let sl = p.slopes();
                p.knots
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| sl[i] != sl[i + 1])
                    .map(|(_, &(x, _))| x)
                    .collect()
            }
            _ => vec![],
        }
    }

    pub fn derivative_real(&self, x: f64) -> Result<f64> {
        if self.kinks().contains(&x) {
            return Err(Error::Kink { function: self.to_string(), point: x });
        }
        Ok(match self {
            ScalarFn::Abs => x.signum(),
            ScalarFn::Kappa => {
                if x.abs() < 1.0 {
                    1.0
                } else {
                    0.0
                }
            }
            ScalarFn::PhiS { s } => {
                if *s == 0.0 {
                    0.0
                } else {
                    0.5 * x.signum() + 0.5 * (s - x).signum()
                }
            }
            ScalarFn::TanhHalf => {
                let t = (0.5 * x).tanh();
                0.5 * (1.0 - t * t)
            }
            ScalarFn::FaKernel { a } => {
                if x.abs() < *a {
                    1.0 / (a * a)
                } else {
                    -1.0 / (x * x)
                }
            }
            ScalarFn::PiecewiseLinear(p) => {
                let sl = p.slopes();
                sl[p.knots.partition_point(|&(kx, _)| kx <= x)]
            }
            ScalarFn::TrigPoly { .. } | ScalarFn::LacunarySigned { .. } => {
                return Err(Error::Domain { function: self.to_string(), point: format!("{x} on the real line") })
            }
        })
    }

    /// Complex derivative `f′(z)` for circle kinds.
    pub fn derivative_circle(&self, z: C64) -> Result<C64> {
        match self {
            ScalarFn::TrigPoly { coeffs } => {
                let n = (coeffs.len() / 2) as i32;
                Ok((-n..=n)
                    .filter(|&k| k != 0)
                    .map(|k| coeffs[(k + n) as usize] * k as f64 * z.powi(k - 1))
                    .sum())
            }
            ScalarFn::LacunarySigned { signs, weights, .. } => Ok(signs
                .iter()
                .zip(weights)
                .enumerate()
                .map(|(j, (&e, &w))| {
                    let p = 1i32 << j;
                    z.powi(p - 1) * (e as f64 * w * p as f64)
                })
                .sum()),
            _ => Err(Error::Domain { function: self.to_string(), point: format!("{z} on the circle") }),
        }
    }

    /// Exact Lipschitz constant on the whole domain, when known in closed form.
    pub fn exact_lip(&self) -> Option<f64> {
        match self {
            ScalarFn::Abs | ScalarFn::Kappa => Some(1.0),
            ScalarFn::PhiS { s } => Some(if *s == 0.0 { 0.0 } else { 1.0 }),
            ScalarFn::TanhHalf => Some(0.5),
            ScalarFn::FaKernel { a } => Some(1.0 / (a * a)),
            ScalarFn::PiecewiseLinear(p) => Some(p.slopes().iter().fold(0.0, |m, s| m.max(s.abs()))),
            _ => None,
        }
    }

    /// Exact `sup |f|` over the domain, when finite and known.
    pub fn exact_sup(&self) -> Option<f64> {
        match self {
            ScalarFn::Kappa | ScalarFn::TanhHalf => Some(1.0),
            ScalarFn::PhiS { s } => Some(s.abs()),
            ScalarFn::FaKernel { a } => Some(1.0 / a),
            ScalarFn::PiecewiseLinear(p) if p.left_slope == 0.0 && p.right_slope == 0.0 => {
                Some(p.knots.iter().fold(0.0, |m, &(_, y)| m.max(y.abs())))
            }
            _ => None,
        }
    }

    /// `Some((α, β))` when the function is affine, `f(t) = αt + β`.
    pub fn as_affine(&self) -> Option<(f64, f64)> {
        match self {
            ScalarFn::PiecewiseLinear(p) => {
                let sl = p.slopes();
                if sl.iter().all(|&s| s == sl[0]) {
                    Some((sl[0], p.knots[0].1 - sl[0] * p.knots[0].0))
                } else {
                    None
                }
            }
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Carrier {
    RealLine,
    Circle,
}

#[derive(Serialize, Deserialize)]
struct GridRepr {
    carrier: Carrier,
    points: Vec<f64>,
}

/// A finite ordered point set. On the circle the points are stored as
/// arguments in `[0, 2π)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridRepr", into = "GridRepr")]
pub struct Grid {
    carrier: Carrier,
    points: Vec<f64>,
}

impl TryFrom<GridRepr> for Grid {
    type Error = Error;
    fn try_from(r: GridRepr) -> Result<Self> {
        match r.carrier {
            Carrier::RealLine => Grid::line(r.points),
            Carrier::Circle => Grid::circle(r.points),
        }
    }
}

impl From<Grid> for GridRepr {
    fn from(g: Grid) -> Self {
        GridRepr { carrier: g.carrier, points: g.points }
    }
}

/// Relative spacing below which two grid points count as colliding.
pub const MIN_RELATIVE_SPACING: f64 = 1e-9;

impl Grid {
    /// Real grid from arbitrary distinct points (sorted on construction).
    pub fn line(mut points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return invalid("grid needs at least one point");
        }
        if points.iter().any(|x| !x.is_finite()) {
            return invalid("grid points must be finite");
        }
        points.sort_by(f64::total_cmp);
        let scale = points.iter().fold(1.0f64, |m, x| m.max(x.abs()));
        for w in points.windows(2) {
            if w[1] - w[0] < MIN_RELATIVE_SPACING * scale {
                return invalid(format!("grid points {} and {} are not distinct at resolution", w[0], w[1]));
            }
        }
        Ok(Grid { carrier: Carrier::RealLine, points })
    }

    /// Circle grid from arguments (reduced to `[0, 2π)` and sorted).
    pub fn circle(angles: Vec<f64>) -> Result<Self> {
        if angles.is_empty() {
            return invalid("grid needs at least one point");
        }
        let mut a: Vec<f64> = angles.iter().map(|t| t.rem_euclid(2.0 * PI)).collect();
        a.sort_by(f64::total_cmp);
        let n = a.len();
        for i in 0..n {
            let gap = if i + 1 < n { a[i + 1] - a[i] } else { a[0] + 2.0 * PI - a[i] };
            if n > 1 && gap < MIN_RELATIVE_SPACING {
                return invalid("circle grid points are not distinct at resolution");
            }
        }
        Ok(Grid { carrier: Carrier::Circle, points: a })
    }

    pub fn uniform(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if n == 0 {
            return invalid("uniform grid needs n ≥ 1");
        }
        if n == 1 {
            return Self::line(vec![lo]);
        }
        Self::line((0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect())
    }

    /// `{start·ratio^k : 0 ≤ k < count}`
    pub fn geometric(start: f64, ratio: f64, count: usize) -> Result<Self> {
        Self::line((0..count).map(|k| start * ratio.powi(k as i32)).collect())
    }

    /// Integers `lo..=hi`.
    pub fn integers(lo: i64, hi: i64) -> Result<Self> {
        Self::line((lo..=hi).map(|k| k as f64).collect())
    }

    /// `τ𝕋_n` with `τ = e^{i·rotation}`.
    pub fn roots_of_unity(n: usize, rotation: f64) -> Result<Self> {
        Self::circle((0..n).map(|k| rotation + 2.0 * PI * k as f64 / n as f64).collect())
    }

    pub fn carrier(&self) -> Carrier {
        self.carrier
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn complex_points(&self) -> Vec<C64> {
        match self.carrier {
            Carrier::RealLine => self.points.iter().map(|&x| C64::new(x, 0.0)).collect(),
            Carrier::Circle => self.points.iter().map(|&t| C64::from_polar(1.0, t)).collect(),
        }
    }

    pub fn as_points(&self) -> Vec<Point> {
        match self.carrier {
            Carrier::RealLine => self.points.iter().map(|&x| Point::Real(x)).collect(),
            Carrier::Circle => self.complex_points().into_iter().map(Point::Circle).collect(),
        }
    }

    pub fn negated(&self) -> Result<Self> {
        Self::line(self.points.iter().map(|x| -x).collect())
    }

    pub fn hull(&self) -> (f64, f64) {
        (self.points[0], self.points[self.points.len() - 1])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiagonalRule {
    /// 0 on coincident points (Δ₀f).
    Zero,
    /// `f′` on coincident points (Δf).
    Derivative,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DividedDiffMatrix {
    pub function: ScalarFn,
    pub rows: Grid,
    pub cols: Grid,
    pub rule: DiagonalRule,
    pub entries: CMat,
}

fn check_carrier(f: &ScalarFn, g: &Grid) -> Result<()> {
    let ok = matches!(
        (f.domain(), g.carrier()),
        (Domain::Line, Carrier::RealLine) | (Domain::Circle, Carrier::Circle)
    );
    if ok {
        Ok(())
    } else {
        Err(Error::Domain { function: f.to_string(), point: format!("{:?} grid", g.carrier()) })
    }
}

pub fn divided_diff(f: &ScalarFn, x: &Grid, y: &Grid, rule: DiagonalRule) -> Result<DividedDiffMatrix> {
    check_carrier(f, x)?;
    check_carrier(f, y)?;
    let xs = x.as_points();
    let ys = y.as_points();
    let fx = xs.iter().map(|&p| f.eval(p)).collect::<Result<Vec<_>>>()?;
    let fy = ys.iter().map(|&p| f.eval(p)).collect::<Result<Vec<_>>>()?;
    let zx = x.complex_points();
    let zy = y.complex_points();
    let mut m = CMat::zeros(xs.len(), ys.len());
    for i in 0..xs.len() {
        for j in 0..ys.len() {
            m[(i, j)] = if xs[i] == ys[j] {
                match rule {
                    DiagonalRule::Zero => ZERO,
                    DiagonalRule::Derivative => match xs[i] {
                        Point::Real(t) => C64::new(f.derivative_real(t)?, 0.0),
                        Point::Circle(z) => f.derivative_circle(z)?,
                    },
                }
            } else {
                (fx[i] - fy[j]) / (zx[i] - zy[j])
            };
        }
    }
    Ok(DividedDiffMatrix { function: f.clone(), rows: x.clone(), cols: y.clone(), rule, entries: m })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub location: f64,
    pub weight: f64,
}

/// Finite atomic measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureSummary {
    pub atoms: Vec<Atom>,
    pub total_variation: f64,
}

impl MeasureSummary {
    pub fn new(mut atoms: Vec<Atom>) -> Self {
        atoms.retain(|a| a.weight != 0.0);
        atoms.sort_by(|a, b| a.location.total_cmp(&b.location));
        let total_variation = atoms.iter().map(|a| a.weight.abs()).sum();
        MeasureSummary { atoms, total_variation }
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight).sum()
    }
}

/// Distributional second derivative of a piecewise linear registry function.
pub fn second_derivative_summary(f: &ScalarFn) -> Result<MeasureSummary> {
    let atom = |location, weight| Atom { location, weight };
    let atoms = match f {
        ScalarFn::Abs => vec![atom(0.0, 2.0)],
        ScalarFn::Kappa => vec![atom(-1.0, 1.0), atom(1.0, -1.0)],
        ScalarFn::PhiS { s } => {
            if *s == 0.0 {
                vec![]
            } else {
                vec![atom(0.0, 1.0), atom(*s, -1.0)]
            }
        }
        ScalarFn::PiecewiseLinear(p) => {
            let sl = p.slopes();
            p.knots.iter().enumerate().map(|(i, &(x, _))| atom(x, sl[i + 1] - sl[i])).collect()
        }
        _ => return Err(Error::Unsupported(format!("second derivative of {f} is not a finite atomic measure"))),
    };
    Ok(MeasureSummary::new(atoms))
}

/// `ω_f(δ)` value with its provenance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModulusEstimate {
    pub value: f64,
    /// Closed form over the whole domain rather than a probe maximum.
    pub exact: bool,
    /// Largest gap of the probe (0 when exact).
    pub resolution: f64,
}

/// Modulus of continuity, exact for registry kinds with a closed form and a
/// probe lower bound otherwise.
pub fn modulus_estimate(f: &ScalarFn, delta: f64, probe: &Grid) -> Result<ModulusEstimate> {
    if !(delta > 0.0) {
        return invalid(format!("δ must be positive, got {delta}"));
    }
    if probe.is_empty() {
        return invalid("empty probe");
    }
    let exact = match f {
        ScalarFn::Abs => Some(delta),
        ScalarFn::Kappa => Some(delta.min(2.0)),
        ScalarFn::PhiS { s } => Some(delta.min(s.abs())),
        _ => f.as_affine().map(|(a, _)| a.abs() * delta),
    };
    if let Some(value) = exact {
        return Ok(ModulusEstimate { value, exact: true, resolution: 0.0 });
    }
    check_carrier(f, probe)?;
    let pts = probe.as_points();
    let vals = pts.iter().map(|&p| f.eval(p)).collect::<Result<Vec<_>>>()?;
    let mut best: f64 = 0.0;
    let resolution;
    match probe.carrier() {
        Carrier::RealLine => {
            let x = probe.points();
            resolution = x.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
            let mut hi = 0;
            for i in 0..x.len() {
                if hi < i {
                    hi = i;
                }
                while hi + 1 < x.len() && x[hi + 1] - x[i] <= delta {
                    hi += 1;
                }
                for j in i + 1..=hi {
                    best = best.max((vals[j] - vals[i]).norm());
                }
            }
        }
        Carrier::Circle => {
            let z = probe.complex_points();
            let a = probe.points();
            resolution = a.windows(2).map(|w| w[1] - w[0]).fold(2.0 * PI + a[0] - a[a.len() - 1], f64::max);
            for i in 0..z.len() {
                for j in i + 1..z.len() {
                    if (z[i] - z[j]).norm() <= delta {
                        best = best.max((vals[j] - vals[i]).norm());
                    }
                }
            }
        }
    }
    Ok(ModulusEstimate { value: best, exact: false, resolution })
}

/// `ω_f(δ)`; see [`modulus_estimate`].
pub fn scalar_modulus(f: &ScalarFn, delta: f64, probe: &Grid) -> Result<f64> {
    modulus_estimate(f, delta, probe).map(|m| m.value)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LipConst {
    pub value: f64,
    /// False when the value is a probe supremum (a lower bound).
    pub exact: bool,
}

const LIP_PROBE: usize = 4096;

/// Lipschitz constant on a window `[lo, hi]` of the real line; for circle
/// kinds the window is ignored and the whole circle is probed.
pub fn lip_const(f: &ScalarFn, (lo, hi): (f64, f64)) -> LipConst {
    let exact = |value| LipConst { value, exact: true };
    let meets = |a: f64, b: f64| lo < b && hi > a;
    match f {
        ScalarFn::Abs => exact(if hi > lo { 1.0 } else { 0.0 }),
        ScalarFn::Kappa => exact(if meets(-1.0, 1.0) { 1.0 } else { 0.0 }),
        ScalarFn::PhiS { s } => exact(if meets(s.min(0.0), s.max(0.0)) { 1.0 } else { 0.0 }),
        ScalarFn::TanhHalf => {
            let x = if lo <= 0.0 && hi >= 0.0 { 0.0 } else { lo.abs().min(hi.abs()) };
            let t = (0.5 * x).tanh();
            exact(0.5 * (1.0 - t * t))
        }
        ScalarFn::FaKernel { a } => {
            if lo <= *a && hi >= -a {
                exact(1.0 / (a * a))
            } else {
                let m = lo.abs().min(hi.abs());
                exact(1.0 / (m * m))
            }
        }
        ScalarFn::PiecewiseLinear(p) => {
            let sl = p.slopes();
            let mut edges = vec![f64::NEG_INFINITY];
            edges.extend(p.knots.iter().map(|k| k.0));
            edges.push(f64::INFINITY);
            let mut v: f64 = 0.0;
            for (i, s) in sl.iter().enumerate() {
                if meets(edges[i], edges[i + 1]) || (lo == hi && lo >= edges[i] && lo <= edges[i + 1]) {
                    v = v.max(s.abs());
                }
            }
            exact(v)
        }
        ScalarFn::TrigPoly { .. } | ScalarFn::LacunarySigned { .. } => {
            let mut v: f64 = 0.0;
            for k in 0..LIP_PROBE {
                let z = C64::from_polar(1.0, 2.0 * PI * k as f64 / LIP_PROBE as f64);
                v = v.max(f.derivative_circle(z).map(|d| d.norm()).unwrap_or(0.0));
            }
            LipConst { value: v, exact: false }
        }
    }
}
