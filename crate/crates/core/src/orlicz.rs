//! Orlicz integrands `φ(ω, x)` on `R^d`.
//!
//! An integrand is either a per-point radial profile from the catalog
//! (`φ(ω, x) = c_ω ψ_ω(‖x‖)`) or an opaque evaluable. Catalog profiles know
//! their conjugates in closed form; opaque ones may supply a conjugate or
//! rely on [`crate::conjugation`] for a tabulated one.
//!
//! The axiom checks, the coercivity test and the Δ₂ classification are all
//! relative to a [`SampleGrid`]: they certify what the samples show and
//! nothing about off-grid behaviour.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ext::{ExtReal, PosInf};
use crate::measure::Carrier;

/// Euclidean norm.
pub fn norm(x: &[f64]) -> f64 {
    if x.len() == 1 {
        x[0].abs()
    } else {
        let s = x.iter().map(|v| v * v).sum::<f64>();
        if s.is_normal() {
            return s.sqrt();
        }
        // squares under- or overflowed; rescale by the largest entry
        let m = x.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if m == 0.0 || !m.is_finite() {
            return m;
        }
        m * x.iter().map(|v| (v / m) * (v / m)).sum::<f64>().sqrt()
    }
}

pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

fn pow(r: f64, p: f64) -> f64 {
    if p.fract() == 0.0 && p.abs() <= 64.0 {
        r.powi(p as i32)
    } else {
        r.powf(p)
    }
}

/// Nondecreasing radial profile sampled on `radii`, interpolated linearly
/// and `+∞` beyond the last radius.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialTable {
    radii: Vec<f64>,
    values: Vec<ExtReal>,
}

impl RadialTable {
    pub fn new(radii: Vec<f64>, values: Vec<ExtReal>) -> Result<Self> {
        if radii.len() != values.len() || radii.is_empty() {
            return Err(Error::InvalidArgument("radial table needs matching, nonempty columns".into()));
        }
        if radii[0] != 0.0 || radii.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument(
                "radial table radii must start at 0 and increase strictly".into(),
            ));
        }
        Ok(RadialTable { radii, values })
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn values(&self) -> &[ExtReal] {
        &self.values
    }

    pub fn eval(&self, r: f64) -> ExtReal {
        let k = self.radii.partition_point(|x| *x <= r);
        if k == 0 {
            return self.values[0];
        }
        let i = k - 1;
        if self.radii[i] == r || i + 1 == self.radii.len() {
            return if self.radii[i] == r { self.values[i] } else { PosInf };
        }
        match (self.values[i], self.values[i + 1]) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => {
                let t = (r - self.radii[i]) / (self.radii[i + 1] - self.radii[i]);
                ExtReal::from(a + t * (b - a))
            }
            _ => PosInf,
        }
    }
}

/// Radial profile shapes.
#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    /// `r^p / p`, `p > 1`.
    Power { p: f64 },
    /// `r^p`, `p > 1`.
    Monomial { p: f64 },
    /// `r`.
    Abs,
    /// `e^r − 1`.
    Exp,
    /// `0` on `r ≤ 1`, `∞` beyond.
    Ball,
    /// Tabulated profile, optionally paired with the profile it is conjugate to.
    Table {
        table: Arc<RadialTable>,
        dual: Option<Box<Profile>>,
    },
}

/// `c · ψ(r)`, or its conjugate `c · ψ*(s / c)` when `conjugated`.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    pub shape: Shape,
    pub scale: f64,
    pub conjugated: bool,
}

impl Profile {
    pub fn new(shape: Shape, scale: f64) -> Self {
        Profile {
            shape,
            scale,
            conjugated: false,
        }
    }

    fn base(&self, r: f64) -> ExtReal {
        match &self.shape {
            Shape::Power { p } => ExtReal::from(pow(r, *p) / p),
            Shape::Monomial { p } => ExtReal::from(pow(r, *p)),
            Shape::Abs => ExtReal::from(r),
            Shape::Exp => ExtReal::from(r.exp_m1()),
            Shape::Ball => {
                if r <= 1.0 {
                    ExtReal::ZERO
                } else {
                    PosInf
                }
            }
            Shape::Table { table, .. } => table.eval(r),
        }
    }

    fn base_conjugate(&self, s: f64) -> Option<ExtReal> {
        Some(match &self.shape {
            Shape::Power { p } => {
                let q = p / (p - 1.0);
                ExtReal::from(pow(s, q) / q)
            }
            Shape::Monomial { p } => {
                let q = p / (p - 1.0);
                ExtReal::from((p - 1.0) * pow(s / p, q))
            }
            Shape::Abs => {
                if s <= 1.0 {
                    ExtReal::ZERO
                } else {
                    PosInf
                }
            }
            Shape::Exp => {
                if s <= 1.0 {
                    ExtReal::ZERO
                } else {
                    ExtReal::from(s * s.ln() - s + 1.0)
                }
            }
            Shape::Ball => ExtReal::from(s),
            Shape::Table { dual, .. } => return dual.as_ref().map(|d| d.eval(s)),
        })
    }

    pub fn eval(&self, r: f64) -> ExtReal {
        let c = self.scale;
        if self.conjugated {
            self.base_conjugate(r / c)
                .map(|v| ExtReal::from(c) * v)
                .unwrap_or(PosInf)
        } else {
            let v = self.base(r);
            match v {
                ExtReal::Finite(x) => ExtReal::from(c * x),
                other => ExtReal::from(c) * other,
            }
        }
    }

    /// Radius of the zero set `{r : value(r) = 0}` in exact arithmetic.
    pub fn zero_radius(&self) -> f64 {
        let base = if self.conjugated {
            match &self.shape {
                Shape::Power { .. } | Shape::Monomial { .. } | Shape::Ball => 0.0,
                Shape::Abs | Shape::Exp => 1.0,
                Shape::Table { dual, .. } => return dual.as_ref().map_or(0.0, |d| d.zero_radius()) * self.scale,
            }
        } else {
            match &self.shape {
                Shape::Ball => 1.0,
                Shape::Table { table, .. } => {
                    let k = table.values.iter().take_while(|v| v.is_zero()).count();
                    if k == 0 { 0.0 } else { table.radii[k - 1] }
                }
                _ => 0.0,
            }
        };
        if self.conjugated {
            base * self.scale
        } else {
            base
        }
    }

    pub fn has_conjugate(&self) -> bool {
        !matches!(&self.shape, Shape::Table { dual: None, .. })
    }

    /// Degree `p` when the profile is positively homogeneous, `ψ(tr) = t^p ψ(r)`.
    pub fn homogeneous_degree(&self) -> Option<f64> {
        let p = match &self.shape {
            Shape::Power { p } | Shape::Monomial { p } => *p,
            Shape::Abs if !self.conjugated => return Some(1.0),
            _ => return None,
        };
        Some(if self.conjugated { p / (p - 1.0) } else { p })
    }

    pub fn conjugate(&self) -> Profile {
        Profile {
            shape: self.shape.clone(),
            scale: self.scale,
            conjugated: !self.conjugated,
        }
    }

    fn describe(&self) -> String {
        let base = match &self.shape {
            Shape::Power { p } => format!("power(p={p})"),
            Shape::Monomial { p } => format!("monomial(p={p})"),
            Shape::Abs => "abs".into(),
            Shape::Exp => "exp".into(),
            Shape::Ball => "ball".into(),
            Shape::Table { .. } => "table".into(),
        };
        let base = if self.scale == 1.0 { base } else { format!("{}*{base}", self.scale) };
        if self.conjugated {
            format!("({base})*")
        } else {
            base
        }
    }
}

pub type EvalFn = Arc<dyn Fn(usize, &[f64]) -> ExtReal + Send + Sync>;

#[derive(Clone)]
enum Kind {
    Radial(Vec<Profile>),
    Custom {
        eval: EvalFn,
        conjugate: Option<EvalFn>,
        radial: bool,
        points: usize,
    },
}

/// A point-dependent even convex function on `R^d`.
#[derive(Clone)]
pub struct OrliczIntegrand {
    dim: usize,
    label: String,
    kind: Kind,
}

impl fmt::Debug for OrliczIntegrand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OrliczIntegrand")
            .field("dim", &self.dim)
            .field("label", &self.label)
            .finish()
    }
}

impl OrliczIntegrand {
    /// Radial integrand with one profile per point; points beyond the list
    /// reuse the last profile.
    pub fn radial(dim: usize, profiles: Vec<Profile>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("dimension must be positive".into()));
        }
        if profiles.is_empty() {
            return Err(Error::InvalidArgument("at least one profile required".into()));
        }
        for p in &profiles {
            if !(p.scale.is_finite() && p.scale > 0.0) {
                return Err(Error::InvalidArgument(format!("scale {} must be positive", p.scale)));
            }
            if let Shape::Power { p } | Shape::Monomial { p } = p.shape {
                if !(p > 1.0 && p.is_finite()) {
                    return Err(Error::InvalidArgument(format!("exponent {p} must exceed 1")));
                }
            }
        }
        let label = if profiles.iter().all(|p| *p == profiles[0]) {
            profiles[0].describe()
        } else {
            format!("[{}]", profiles.iter().map(Profile::describe).collect::<Vec<_>>().join(", "))
        };
        Ok(OrliczIntegrand {
            dim,
            label,
            kind: Kind::Radial(profiles),
        })
    }

    fn single(dim: usize, shape: Shape) -> Self {
        Self::radial(dim, vec![Profile::new(shape, 1.0)]).expect("catalog entry is valid")
    }

    /// `‖x‖^p / p`.
    pub fn power(dim: usize, p: f64) -> Result<Self> {
        Self::radial(dim, vec![Profile::new(Shape::Power { p }, 1.0)])
    }

    /// `‖x‖`.
    pub fn abs(dim: usize) -> Self {
        Self::single(dim, Shape::Abs)
    }

    /// `e^{‖x‖} − 1`.
    pub fn exponential(dim: usize) -> Self {
        Self::single(dim, Shape::Exp)
    }

    /// Indicator of the closed unit ball.
    pub fn ball(dim: usize) -> Self {
        Self::single(dim, Shape::Ball)
    }

    /// `‖x‖^{p(ω)}` with one exponent per point.
    pub fn variable_exponent(dim: usize, exponents: &[f64]) -> Result<Self> {
        Self::radial(
            dim,
            exponents
                .iter()
                .map(|&p| Profile::new(Shape::Monomial { p }, 1.0))
                .collect(),
        )
    }

    /// Opaque integrand defined on `points` points (later points reuse the last).
    pub fn custom(
        dim: usize,
        points: usize,
        label: impl Into<String>,
        radial: bool,
        eval: EvalFn,
        conjugate: Option<EvalFn>,
    ) -> Self {
        OrliczIntegrand {
            dim,
            label: label.into(),
            kind: Kind::Custom {
                eval,
                conjugate,
                radial,
                points: points.max(1),
            },
        }
    }

    /// Rescales every profile by `c_ω` (last entry repeats).
    pub fn with_scales(&self, scales: &[f64]) -> Result<Self> {
        match &self.kind {
            Kind::Radial(profiles) => {
                let n = profiles.len().max(scales.len());
                let out = (0..n)
                    .map(|i| {
                        let mut p = profiles[i.min(profiles.len() - 1)].clone();
                        p.scale *= scales[i.min(scales.len() - 1)];
                        p
                    })
                    .collect();
                Self::radial(self.dim, out)
            }
            Kind::Custom { .. } => Err(Error::Unsupported("rescaling an opaque integrand".into())),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Number of points with their own definition.
    pub fn point_count(&self) -> usize {
        match &self.kind {
            Kind::Radial(p) => p.len(),
            Kind::Custom { points, .. } => *points,
        }
    }

    pub fn is_radial(&self) -> bool {
        match &self.kind {
            Kind::Radial(_) => true,
            Kind::Custom { radial, .. } => *radial,
        }
    }

    pub fn profile(&self, point: usize) -> Option<&Profile> {
        match &self.kind {
            Kind::Radial(p) => Some(&p[point.min(p.len() - 1)]),
            Kind::Custom { .. } => None,
        }
    }

    pub fn eval(&self, point: usize, x: &[f64]) -> ExtReal {
        match &self.kind {
            Kind::Radial(p) => p[point.min(p.len() - 1)].eval(norm(x)),
            Kind::Custom { eval, points, .. } => eval((point).min(points - 1), x),
        }
    }

    /// Like [`Self::eval`], but a value that is positive in exact arithmetic
    /// and underflowed to zero is reported as the smallest positive float.
    /// Keeps `0 · ∞ = 0` at infinite atoms from firing spuriously.
    pub fn eval_strict(&self, point: usize, x: &[f64]) -> ExtReal {
        let v = self.eval(point, x);
        match (&self.kind, v) {
            (Kind::Radial(p), v) if v.is_zero() => {
                if norm(x) > p[point.min(p.len() - 1)].zero_radius() {
                    ExtReal::from(f64::MIN_POSITIVE)
                } else {
                    v
                }
            }
            _ => v,
        }
    }

    /// Radial profile `ψ_ω(r)`; `None` for non-radial integrands.
    pub fn eval_radial(&self, point: usize, r: f64) -> Option<ExtReal> {
        if !self.is_radial() {
            return None;
        }
        let mut x = vec![0.0; self.dim];
        x[0] = r;
        Some(self.eval(point, &x))
    }

    pub fn has_conjugate(&self) -> bool {
        match &self.kind {
            Kind::Radial(p) => p.iter().all(Profile::has_conjugate),
            Kind::Custom { conjugate, .. } => conjugate.is_some(),
        }
    }

    /// Analytic conjugate `φ*(ω, ·)`, itself an integrand whose conjugate is `φ`.
    pub fn conjugate(&self) -> Result<Self> {
        match &self.kind {
            Kind::Radial(profiles) => {
                if !self.has_conjugate() {
                    return Err(Error::ConjugateUnavailable(self.label.clone()));
                }
                let mut c = Self::radial(self.dim, profiles.iter().map(Profile::conjugate).collect())?;
                c.label = format!("({})*", self.label);
                Ok(c)
            }
            Kind::Custom {
                eval,
                conjugate,
                radial,
                points,
            } => match conjugate {
                Some(cj) => Ok(OrliczIntegrand {
                    dim: self.dim,
                    label: format!("({})*", self.label),
                    kind: Kind::Custom {
                        eval: cj.clone(),
                        conjugate: Some(eval.clone()),
                        radial: *radial,
                        points: *points,
                    },
                }),
                None => Err(Error::ConjugateUnavailable(self.label.clone())),
            },
        }
    }
}

/// Catalog selection in JSON: `{"family": "power", "params": {"p": 2}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegrandSpec {
    pub family: String,
    #[serde(default)]
    pub params: IntegrandParams,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct IntegrandParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exponents: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scales: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
}

impl IntegrandSpec {
    pub fn build(&self) -> Result<OrliczIntegrand> {
        let dim = self.params.dim.unwrap_or(1);
        let base = match self.family.as_str() {
            "power" => OrliczIntegrand::power(
                dim,
                self.params
                    .p
                    .ok_or_else(|| Error::Parse("power family needs params.p".into()))?,
            )?,
            "abs" => OrliczIntegrand::abs(dim),
            "exp" => OrliczIntegrand::exponential(dim),
            "ball" => OrliczIntegrand::ball(dim),
            "varexp" => OrliczIntegrand::variable_exponent(
                dim,
                self.params
                    .exponents
                    .as_deref()
                    .ok_or_else(|| Error::Parse("varexp family needs params.exponents".into()))?,
            )?,
            other => return Err(Error::Parse(format!("unknown integrand family {other:?}"))),
        };
        match &self.params.scales {
            Some(s) if !s.is_empty() => base.with_scales(s),
            _ => Ok(base),
        }
    }
}

/// Radii times directions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleGrid {
    pub radii: Vec<f64>,
    pub directions: Vec<Vec<f64>>,
}

impl SampleGrid {
    /// Logarithmic radii `10^lo ..= 10^hi` with `per_decade` samples per decade.
    pub fn log_radii(lo: i32, hi: i32, per_decade: usize) -> Vec<f64> {
        let steps = (hi - lo) as usize * per_decade;
        (0..=steps)
            .map(|k| 10f64.powf(lo as f64 + k as f64 / per_decade as f64))
            .collect()
    }

    /// The `2d` signed axis directions, plus all `2^d` diagonals for `d ≤ 3`.
    pub fn directions(dim: usize) -> Vec<Vec<f64>> {
        let mut dirs = Vec::new();
        for k in 0..dim {
            for s in [1.0, -1.0] {
                let mut v = vec![0.0; dim];
                v[k] = s;
                dirs.push(v);
            }
        }
        if (2..=3).contains(&dim) {
            let c = 1.0 / (dim as f64).sqrt();
            for mask in 0..1usize << dim {
                dirs.push((0..dim).map(|k| if mask >> k & 1 == 1 { -c } else { c }).collect());
            }
        }
        dirs
    }

    /// Default grid: radii `10^-6 ..= 10^3`, 64 per decade.
    pub fn standard(dim: usize) -> Self {
        SampleGrid {
            radii: Self::log_radii(-6, 3, 64),
            directions: Self::directions(dim),
        }
    }

    pub fn new(radii: Vec<f64>, directions: Vec<Vec<f64>>) -> Result<Self> {
        if radii.is_empty() || directions.is_empty() {
            return Err(Error::InvalidArgument("sample grid must be nonempty".into()));
        }
        if radii.windows(2).any(|w| w[0] >= w[1]) || radii[0] <= 0.0 {
            return Err(Error::InvalidArgument("grid radii must be positive and increasing".into()));
        }
        Ok(SampleGrid { radii, directions })
    }

    fn point(&self, r: f64, d: &[f64]) -> Vec<f64> {
        d.iter().map(|v| r * v).collect()
    }

    /// `min_d φ(ω, r·d)` over the grid directions.
    fn sphere_min(&self, phi: &OrliczIntegrand, point: usize, r: f64) -> ExtReal {
        self.directions
            .iter()
            .map(|d| phi.eval(point, &self.point(r, d)))
            .min()
            .unwrap_or(PosInf)
    }

    fn sphere_max(&self, phi: &OrliczIntegrand, point: usize, r: f64) -> ExtReal {
        self.directions
            .iter()
            .map(|d| phi.eval(point, &self.point(r, d)))
            .max()
            .unwrap_or(PosInf)
    }
}

/// Outcome of one axiom family.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomCheck {
    pub passed: bool,
    /// Largest violation found (0 when passed).
    pub worst_violation: f64,
    /// Point and sample where the worst violation occurred.
    pub witness: Option<(usize, Vec<f64>)>,
}

impl AxiomCheck {
    fn pass() -> Self {
        AxiomCheck {
            passed: true,
            worst_violation: 0.0,
            witness: None,
        }
    }

    fn record(&mut self, violation: f64, point: usize, x: &[f64]) {
        if violation > 0.0 {
            self.passed = false;
            if violation > self.worst_violation {
                self.worst_violation = violation;
                self.witness = Some((point, x.to_vec()));
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomReport {
    pub zero_at_origin: AxiomCheck,
    pub even: AxiomCheck,
    pub convex: AxiomCheck,
    pub vanishes_at_origin: AxiomCheck,
    pub coercive: AxiomCheck,
}

impl AxiomReport {
    pub fn all_passed(&self) -> bool {
        self.zero_at_origin.passed
            && self.even.passed
            && self.convex.passed
            && self.vanishes_at_origin.passed
            && self.coercive.passed
    }
}

/// Value below which `φ` at the smallest sampled radius counts as vanished.
pub const VANISH_TOL: f64 = 1e-3;
const CONVEX_RTOL: f64 = 1e-12;

fn violation(lhs: ExtReal, rhs: ExtReal) -> f64 {
    // amount by which lhs exceeds rhs
    match (lhs, rhs) {
        (_, PosInf) => 0.0,
        (PosInf, _) => f64::INFINITY,
        (a, b) => {
            let (a, b) = (a.to_f64(), b.to_f64());
            let slack = CONVEX_RTOL * a.abs().max(b.abs()).max(1.0);
            if a - b > slack {
                a - b
            } else {
                0.0
            }
        }
    }
}

fn midpoint_violation(phi: &OrliczIntegrand, point: usize, x: &[f64], y: &[f64]) -> (f64, Vec<f64>) {
    let mid: Vec<f64> = x.iter().zip(y).map(|(a, b)| 0.5 * (a + b)).collect();
    let lhs = phi.eval(point, &mid);
    let fx = phi.eval(point, x);
    let fy = phi.eval(point, y);
    let rhs = match (fx, fy) {
        (ExtReal::Finite(a), ExtReal::Finite(b)) => ExtReal::from(0.5 * a + 0.5 * b),
        _ => fx + fy,
    };
    (violation(lhs, rhs), mid)
}

/// Pairs of grid samples used for the midpoint convexity test: neighbours
/// along a ray, far pairs along a ray, antipodal pairs and pairs across
/// adjacent directions.
fn segment_pairs(grid: &SampleGrid) -> Vec<(Vec<f64>, Vec<f64>)> {
    let mut pairs = Vec::new();
    let n = grid.radii.len();
    for (k, d) in grid.directions.iter().enumerate() {
        let neg: Vec<f64> = d.iter().map(|v| -v).collect();
        let next = &grid.directions[(k + 1) % grid.directions.len()];
        for i in 0..n {
            let x = grid.point(grid.radii[i], d);
            for step in [1, 8, 64] {
                if i + step < n {
                    pairs.push((x.clone(), grid.point(grid.radii[i + step], d)));
                }
            }
            for step in [0, 8] {
                if i + step < n {
                    pairs.push((x.clone(), grid.point(grid.radii[i + step], &neg)));
                }
            }
            pairs.push((x.clone(), grid.point(grid.radii[i], next)));
        }
    }
    pairs
}

fn convexity_check(phi: &OrliczIntegrand, point: usize, grid: &SampleGrid, out: &mut AxiomCheck) {
    for (x, y) in segment_pairs(grid) {
        let (v, mid) = midpoint_violation(phi, point, &x, &y);
        out.record(v, point, &mid);
    }
}

/// Evaluates the Orlicz-function axioms for every defined point.
pub fn check_axioms(phi: &OrliczIntegrand, grid: &SampleGrid) -> Result<AxiomReport> {
    check_grid(phi, grid)?;
    let mut report = AxiomReport {
        zero_at_origin: AxiomCheck::pass(),
        even: AxiomCheck::pass(),
        convex: AxiomCheck::pass(),
        vanishes_at_origin: AxiomCheck::pass(),
        coercive: AxiomCheck::pass(),
    };
    let origin = vec![0.0; phi.dim()];
    for point in 0..phi.point_count() {
        match phi.eval(point, &origin) {
            v if v.is_zero() => {}
            v => report.zero_at_origin.record(v.abs().to_f64().max(f64::MIN_POSITIVE), point, &origin),
        }

        for d in &grid.directions {
            for &r in &grid.radii {
                let x = grid.point(r, d);
                let neg: Vec<f64> = x.iter().map(|v| -v).collect();
                let (a, b) = (phi.eval(point, &x), phi.eval(point, &neg));
                if a != b {
                    let gap = (a - b).abs().max(b - a).to_f64();
                    let scale = a.abs().to_f64().max(b.abs().to_f64()).max(1.0);
                    if !(gap <= CONVEX_RTOL * scale) {
                        report.even.record(gap, point, &x);
                    }
                }
            }
        }

        convexity_check(phi, point, grid, &mut report.convex);

        let r0 = grid.radii[0];
        let near = grid.sphere_max(phi, point, r0);
        if !(near <= ExtReal::from(VANISH_TOL)) {
            let x = grid.point(r0, &grid.directions[0]);
            report.vanishes_at_origin.record(near.to_f64().max(VANISH_TOL), point, &x);
        }

        let best = grid
            .radii
            .iter()
            .map(|&r| grid.sphere_min(phi, point, r))
            .max()
            .unwrap_or(ExtReal::ZERO);
        if !(best > ExtReal::ZERO) {
            let x = grid.point(*grid.radii.last().unwrap(), &grid.directions[0]);
            report.coercive.record(f64::MIN_POSITIVE.max(-best.to_f64()), point, &x);
        }
    }
    Ok(report)
}

fn check_grid(phi: &OrliczIntegrand, grid: &SampleGrid) -> Result<()> {
    if grid.radii.is_empty() || grid.directions.is_empty() {
        return Err(Error::InvalidArgument("sample grid must be nonempty".into()));
    }
    if let Some(d) = grid.directions.iter().find(|d| d.len() != phi.dim()) {
        return Err(Error::DimensionMismatch {
            expected: phi.dim(),
            found: d.len(),
        });
    }
    Ok(())
}

/// The three equivalent coercivity conditions, evaluated on the grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoercivityReport {
    /// Convexity along sampled segments and `φ(0) = 0`.
    pub precondition_holds: bool,
    pub precondition_witness: Option<Vec<f64>>,
    /// Sphere minimum positive at the outermost radius and growing at least
    /// linearly over the outermost decade.
    pub diverges: bool,
    /// Some sampled sphere has a positive minimum.
    pub sphere_positive: bool,
    /// The quotient `min_{‖x‖=r} φ(x) / r` at the outermost radius is positive.
    pub quotient_positive: bool,
    pub liminf_quotient: f64,
}

impl CoercivityReport {
    pub fn agree(&self) -> bool {
        self.diverges == self.sphere_positive && self.sphere_positive == self.quotient_positive
    }

    pub fn triple(&self) -> (bool, bool, bool) {
        (self.diverges, self.sphere_positive, self.quotient_positive)
    }
}

pub fn coercivity_equivalence(
    phi: &OrliczIntegrand,
    point: usize,
    grid: &SampleGrid,
) -> Result<CoercivityReport> {
    check_grid(phi, grid)?;
    let origin = vec![0.0; phi.dim()];
    let mut convex = AxiomCheck::pass();
    if !phi.eval(point, &origin).is_zero() {
        convex.record(1.0, point, &origin);
    }
    convexity_check(phi, point, grid, &mut convex);

    let sphere: Vec<ExtReal> = grid.radii.iter().map(|&r| grid.sphere_min(phi, point, r)).collect();
    let r_max = *grid.radii.last().unwrap();
    let m_max = *sphere.last().unwrap();
    let sphere_positive = sphere.iter().any(|m| *m > ExtReal::ZERO);

    // sphere minimum one decade in
    let k = grid.radii.partition_point(|r| *r < r_max / 10.0).min(grid.radii.len() - 1);
    let (r_in, m_in) = (grid.radii[k], sphere[k]);
    let diverges = m_max > ExtReal::ZERO
        && (m_max == PosInf
            || m_in <= ExtReal::ZERO
            || m_max.to_f64() >= (r_max / r_in) * m_in.to_f64() * (1.0 - 1e-9));

    let liminf_quotient = match m_max {
        ExtReal::Finite(m) => m / r_max,
        other => other.to_f64(),
    };
    Ok(CoercivityReport {
        precondition_holds: convex.passed,
        precondition_witness: convex.witness.map(|(_, x)| x),
        diverges,
        sphere_positive,
        quotient_positive: liminf_quotient > 0.0,
        liminf_quotient,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict")]
pub enum Delta2Certificate {
    Holds {
        k: f64,
        /// Residual `max(0, sup_x φ(ω,2x) − k φ(ω,x))` per point.
        f: Vec<f64>,
    },
    FailsWithWitness {
        point: usize,
        x: Vec<f64>,
        ratio: f64,
    },
}

impl Delta2Certificate {
    pub fn holds(&self) -> bool {
        matches!(self, Delta2Certificate::Holds { .. })
    }
}

/// Points whose integrand definition the Δ₂ scan must visit on `carrier`.
fn scan_points(phi: &OrliczIntegrand, carrier: &Carrier) -> Vec<usize> {
    let explicit = if carrier.is_tail() {
        carrier.len().max(phi.point_count()) + 1
    } else {
        carrier.len()
    };
    (0..explicit).collect()
}

/// `2^p` for the largest degree when every scanned point has a homogeneous
/// profile and the sampled ratio agrees with it up to rounding; the sampled
/// ratio otherwise.
fn homogeneous_constant(phi: &OrliczIntegrand, points: &[usize], sampled: f64) -> f64 {
    let degrees: Option<Vec<f64>> = points
        .iter()
        .map(|&i| phi.profile(i).and_then(Profile::homogeneous_degree))
        .collect();
    match degrees {
        Some(d) if !d.is_empty() => {
            let k = 2f64.powf(d.into_iter().fold(f64::NEG_INFINITY, f64::max));
            if (sampled - k).abs() <= 1e-12 * k {
                k
            } else {
                sampled
            }
        }
        _ => sampled,
    }
}

/// Grid-relative Δ₂ classification: `φ(ω, 2x) ≤ k φ(ω, x) + f(ω)`.
///
/// If every sampled doubling ratio is at most `bound`, the condition holds
/// with `k` the largest ratio (at least 1) and `f ≡ 0`. Otherwise `k` is
/// taken as the largest ratio over the outermost decade; the condition then
/// fails if that exceeds `bound` or the residual `φ(2x) − kφ(x)` is infinite
/// somewhere, and holds with the residual as `f` otherwise. A failure
/// reports the innermost sample whose ratio exceeds `bound`.
pub fn delta2(
    phi: &OrliczIntegrand,
    carrier: &Carrier,
    grid: &SampleGrid,
    bound: f64,
) -> Result<Delta2Certificate> {
    check_grid(phi, grid)?;
    if !(bound > 1.0) {
        return Err(Error::InvalidArgument(format!("bound {bound} must exceed 1")));
    }
    let points = scan_points(phi, carrier);
    let r_max = *grid.radii.last().unwrap();
    let outer = r_max / 10.0;

    struct Sample {
        point: usize,
        x: Vec<f64>,
        r: f64,
        single: ExtReal,
        double: ExtReal,
        ratio: f64,
    }
    let mut samples = Vec::new();
    for &point in &points {
        for &r in &grid.radii {
            for d in &grid.directions {
                let x = grid.point(r, d);
                let x2: Vec<f64> = x.iter().map(|v| 2.0 * v).collect();
                let single = phi.eval(point, &x);
                let double = phi.eval(point, &x2);
                let ratio = match (single, double) {
                    (s, dd) if s.is_zero() && dd.is_zero() => continue,
                    (PosInf, _) => continue,
                    (s, _) if s.is_zero() => f64::INFINITY,
                    (ExtReal::Finite(s), dd) => dd.to_f64() / s,
                    _ => continue,
                };
                samples.push(Sample {
                    point,
                    x,
                    r,
                    single,
                    double,
                    ratio,
                });
            }
        }
    }

    let max_ratio = samples.iter().map(|s| s.ratio).fold(1.0f64, f64::max);
    if max_ratio <= bound {
        return Ok(Delta2Certificate::Holds {
            k: homogeneous_constant(phi, &points, max_ratio),
            f: vec![0.0; points.len()],
        });
    }

    let witness = || {
        let s = samples
            .iter()
            .filter(|s| s.ratio > bound)
            .min_by(|a, b| a.r.total_cmp(&b.r).then(a.point.cmp(&b.point)))
            .expect("some ratio exceeds the bound");
        Delta2Certificate::FailsWithWitness {
            point: s.point,
            x: s.x.clone(),
            ratio: s.ratio,
        }
    };

    let k = samples
        .iter()
        .filter(|s| s.r >= outer)
        .map(|s| s.ratio)
        .fold(1.0f64, f64::max);
    if k > bound {
        return Ok(witness());
    }
    let mut f = vec![0.0f64; points.len()];
    for s in &samples {
        let residual = s.double - ExtReal::from(k) * s.single;
        match residual {
            PosInf => return Ok(witness()),
            r => f[s.point] = f[s.point].max(r.to_f64()),
        }
    }
    Ok(Delta2Certificate::Holds { k, f })
}
