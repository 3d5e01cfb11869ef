//! Integral functionals `I_f(u) = ∫ f(ω, u(ω)) dμ` and their duality.
//!
//! Minimisation runs over a search grid: every value a function may take at a
//! point is a node of the product of `axes`. Functions in the decomposable
//! space are free at points of finite weight and on the tail; at atoms of
//! infinite weight they are pinned to an anchor, since a function can only
//! be patched on sets of finite measure.

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::charges::{de_giorgi_signed, hewitt_yosida, Charge};
use crate::conjugation::GridFunction;
use crate::error::{Error, Result};
use crate::ext::{ExtReal, NegInf, PosInf};
use crate::measure::{Carrier, MSet};
use crate::norms::{amemiya_norm, luxemburg_norm, modular, NormResult, SampledFunction, LUXEMBURG_TOL};
use crate::orlicz::{delta2, dot, norm, Delta2Certificate, OrliczIntegrand, Profile, SampleGrid, Shape};
use crate::rng;
use crate::search::golden_section;

/// A closure-backed point function without a known conjugate.
#[derive(Clone)]
pub struct CustomFunction {
    pub label: String,
    pub eval: Arc<dyn Fn(&[f64]) -> ExtReal + Send + Sync>,
}

impl fmt::Debug for CustomFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CustomFunction({})", self.label)
    }
}

impl PartialEq for CustomFunction {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.eval, &other.eval)
    }
}

/// A convex function `R^d → (−∞, ∞]` attached to one point of the carrier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PointFunction {
    /// `a‖x − c‖² + k`, `a > 0`.
    Quadratic {
        center: Vec<f64>,
        curvature: f64,
        #[serde(default)]
        offset: f64,
    },
    /// `‖x‖ + b`.
    TiltedAbs { b: f64 },
    /// `⟨t, x⟩` on the ball `‖x‖ ≤ r`, `+∞` outside.
    BallLinear { radius: f64, tilt: Vec<f64> },
    /// Finite only on the nodes of a grid.
    Grid { function: GridFunction },
    /// `base(x) − ⟨slope, x⟩`.
    Tilted { base: Box<PointFunction>, slope: Vec<f64> },
    #[serde(skip)]
    Custom(CustomFunction),
}

fn sq_dist(x: &[f64], c: &[f64]) -> f64 {
    x.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum()
}

fn sub(x: &[f64], y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(a, b)| a - b).collect()
}

impl PointFunction {
    pub fn custom(label: &str, f: impl Fn(&[f64]) -> ExtReal + Send + Sync + 'static) -> Self {
        PointFunction::Custom(CustomFunction {
            label: label.to_string(),
            eval: Arc::new(f),
        })
    }

    /// Dimension fixed by the function's parameters, if any.
    pub fn dim(&self) -> Option<usize> {
        match self {
            PointFunction::Quadratic { center, .. } => Some(center.len()),
            PointFunction::BallLinear { tilt, .. } => Some(tilt.len()),
            PointFunction::Grid { function } => Some(function.dim()),
            PointFunction::Tilted { slope, .. } => Some(slope.len()),
            PointFunction::TiltedAbs { .. } | PointFunction::Custom(_) => None,
        }
    }

    fn validate(&self, dim: usize) -> Result<()> {
        if let Some(d) = self.dim() {
            if d != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: d });
            }
        }
        match self {
            PointFunction::Quadratic { curvature, .. } if !(*curvature > 0.0 && curvature.is_finite()) => {
                Err(Error::InvalidArgument(format!("curvature {curvature} must be positive")))
            }
            PointFunction::BallLinear { radius, .. } if !(*radius >= 0.0 && radius.is_finite()) => {
                Err(Error::InvalidArgument(format!("radius {radius} must be nonnegative")))
            }
            PointFunction::Tilted { base, .. } => base.validate(dim),
            _ => Ok(()),
        }
    }

    pub fn eval(&self, x: &[f64]) -> ExtReal {
        match self {
            PointFunction::Quadratic {
                center,
                curvature,
                offset,
            } => ExtReal::from(curvature * sq_dist(x, center) + offset),
            PointFunction::TiltedAbs { b } => ExtReal::from(norm(x) + b),
            PointFunction::BallLinear { radius, tilt } => {
                if norm(x) <= *radius {
                    ExtReal::from(dot(tilt, x))
                } else {
                    PosInf
                }
            }
            PointFunction::Grid { function } => grid_lookup(function, x),
            PointFunction::Tilted { base, slope } => base.eval(x) - ExtReal::from(dot(slope, x)),
            PointFunction::Custom(c) => (c.eval)(x),
        }
    }

    /// Closed-form conjugate `f*(y)`; `None` for custom functions.
    pub fn conjugate(&self, y: &[f64]) -> Option<ExtReal> {
        Some(match self {
            PointFunction::Quadratic {
                center,
                curvature,
                offset,
            } => ExtReal::from(dot(y, center) + sq_dist(y, &vec![0.0; y.len()]) / (4.0 * curvature) - offset),
            PointFunction::TiltedAbs { b } => {
                if norm(y) <= 1.0 {
                    ExtReal::from(-b)
                } else {
                    PosInf
                }
            }
            PointFunction::BallLinear { radius, tilt } => ExtReal::from(radius * norm(&sub(y, tilt))),
            PointFunction::Grid { function } => {
                let best = (0..function.len())
                    .filter_map(|i| function.value(i).finite().map(|v| dot(y, &function.point(i)) - v))
                    .fold(f64::NEG_INFINITY, f64::max);
                ExtReal::from_f64(best)
            }
            PointFunction::Tilted { base, slope } => {
                let shifted: Vec<f64> = y.iter().zip(slope).map(|(a, b)| a + b).collect();
                base.conjugate(&shifted)?
            }
            PointFunction::Custom(_) => return None,
        })
    }

    /// Closed-form `inf f`; `None` for custom functions.
    pub fn infimum(&self) -> Option<ExtReal> {
        match self {
            PointFunction::Quadratic { offset, .. } => Some(ExtReal::from(*offset)),
            PointFunction::TiltedAbs { b } => Some(ExtReal::from(*b)),
            PointFunction::BallLinear { radius, tilt } => Some(ExtReal::from(-radius * norm(tilt))),
            PointFunction::Grid { function } => function.values().iter().copied().min(),
            PointFunction::Tilted { .. } => self.conjugate(&vec![0.0; self.dim()?]).map(|v| -v),
            PointFunction::Custom(_) => None,
        }
    }

    /// Support function of the zero sublevel set, `sup{⟨y, x⟩ : f(x) ≤ 0}`,
    /// `−∞` when the set is empty. Grid and tilted functions are scanned over
    /// the nodes of `axes` (their own nodes for grid functions).
    pub fn zero_set_support(&self, y: &[f64], axes: &[Vec<f64>]) -> Result<ExtReal> {
        let ball = |center: f64, rho: f64| ExtReal::from(center + rho * norm(y));
        Ok(match self {
            PointFunction::Quadratic {
                center,
                curvature,
                offset,
            } => {
                if *offset > 0.0 {
                    NegInf
                } else {
                    ball(dot(y, center), (-offset / curvature).sqrt())
                }
            }
            PointFunction::TiltedAbs { b } => {
                if *b > 0.0 {
                    NegInf
                } else {
                    ball(0.0, -b)
                }
            }
            PointFunction::BallLinear { radius, tilt } => {
                // half ball {‖x‖ ≤ r, ⟨t, x⟩ ≤ 0}
                let tt = dot(tilt, tilt);
                let yt = dot(y, tilt);
                if tt == 0.0 || yt <= 0.0 {
                    ball(0.0, *radius)
                } else {
                    let perp: Vec<f64> = y.iter().zip(tilt).map(|(a, t)| a - yt / tt * t).collect();
                    ExtReal::from(radius * norm(&perp))
                }
            }
            PointFunction::Grid { function } => {
                let best = (0..function.len())
                    .filter(|i| function.value(*i) <= ExtReal::ZERO)
                    .map(|i| dot(y, &function.point(i)))
                    .fold(f64::NEG_INFINITY, f64::max);
                ExtReal::from_f64(best)
            }
            PointFunction::Tilted { .. } => {
                let best = product_nodes(axes)
                    .iter()
                    .filter(|x| self.eval(x) <= ExtReal::ZERO)
                    .map(|x| dot(y, x))
                    .fold(f64::NEG_INFINITY, f64::max);
                ExtReal::from_f64(best)
            }
            PointFunction::Custom(c) => return Err(Error::Unsupported(c.label.clone())),
        })
    }
}

fn grid_lookup(g: &GridFunction, x: &[f64]) -> ExtReal {
    if x.len() != g.dim() {
        return PosInf;
    }
    let mut idx = Vec::with_capacity(x.len());
    for (a, v) in g.axes().iter().zip(x) {
        match a.binary_search_by(|p| p.total_cmp(v)) {
            Ok(k) => idx.push(k),
            Err(_) => return PosInf,
        }
    }
    let flat = idx.iter().zip(g.axes()).fold(0, |acc, (k, a)| acc * a.len() + k);
    g.value(flat)
}

/// Row-major product of `axes`; the order is lexicographic.
pub fn product_nodes(axes: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut out = vec![Vec::new()];
    for a in axes {
        out = out
            .into_iter()
            .flat_map(|p| {
                a.iter().map(move |x| {
                    let mut q = p.clone();
                    q.push(*x);
                    q
                })
            })
            .collect();
    }
    out
}

/// A normal integrand on a carrier: one point function per explicit point,
/// and on tail carriers one more for the tail. A shorter list repeats its
/// last entry.
#[derive(Debug, Clone, PartialEq)]
pub struct Integrand {
    carrier: Carrier,
    dim: usize,
    functions: Vec<PointFunction>,
}

impl Integrand {
    pub fn new(carrier: Carrier, dim: usize, functions: Vec<PointFunction>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("dimension must be positive".into()));
        }
        if functions.is_empty() {
            return Err(Error::InvalidArgument("at least one point function required".into()));
        }
        let slots = Self::slot_count(&carrier);
        if functions.len() > slots {
            return Err(Error::LengthMismatch {
                expected: slots,
                found: functions.len(),
            });
        }
        for f in &functions {
            f.validate(dim)?;
        }
        Ok(Integrand { carrier, dim, functions })
    }

    fn slot_count(carrier: &Carrier) -> usize {
        carrier.len() + usize::from(carrier.is_tail())
    }

    pub fn carrier(&self) -> &Carrier {
        &self.carrier
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Point function at explicit point `i`; index `carrier.len()` is the tail.
    pub fn function(&self, i: usize) -> &PointFunction {
        &self.functions[i.min(self.functions.len() - 1)]
    }

    fn slots(&self) -> usize {
        Self::slot_count(&self.carrier)
    }

    /// Weight of slot `i` as it enters `integrate`.
    fn is_pinned(&self, i: usize) -> bool {
        i < self.carrier.len() && self.carrier.weight(i) == PosInf
    }

    fn integrate_slots(&self, v: &[ExtReal]) -> Result<ExtReal> {
        let n = self.carrier.len();
        let eventual = self.carrier.is_tail().then(|| v[n]);
        self.carrier.integrate(&v[..n], eventual)
    }

    /// `I_f(u)`.
    pub fn value(&self, u: &SampledFunction) -> Result<ExtReal> {
        self.check(u)?;
        let v: Vec<ExtReal> = (0..self.slots()).map(|i| self.function(i).eval(&slot_value(u, i))).collect();
        self.integrate_slots(&v)
    }

    fn check(&self, u: &SampledFunction) -> Result<()> {
        if u.carrier() != &self.carrier {
            return Err(Error::InvalidArgument("function lives on a different carrier".into()));
        }
        if u.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: u.dim(),
            });
        }
        Ok(())
    }

    /// The integrand `f(ω, x) − ⟨v(ω), x⟩`.
    pub fn tilted(&self, v: &SampledFunction) -> Result<Integrand> {
        self.check(v)?;
        let functions = (0..self.slots())
            .map(|i| PointFunction::Tilted {
                base: Box::new(self.function(i).clone()),
                slope: slot_value(v, i),
            })
            .collect();
        Integrand::new(self.carrier.clone(), self.dim, functions)
    }
}

/// Value of `u` at slot `i` (the eventual value for the tail slot).
fn slot_value(u: &SampledFunction, i: usize) -> Vec<f64> {
    if i < u.values().len() {
        u.values()[i].clone()
    } else {
        u.eventual().map(<[f64]>::to_vec).unwrap_or_else(|| vec![0.0; u.dim()])
    }
}

fn function_from_slots(carrier: &Carrier, slots: Vec<Vec<f64>>) -> Result<SampledFunction> {
    let n = carrier.len();
    let mut values = slots;
    let eventual = if carrier.is_tail() { values.pop() } else { None };
    debug_assert_eq!(values.len(), n);
    SampledFunction::new(carrier.clone(), values, eventual)
}

#[derive(Debug, Clone)]
pub struct InterchangeOptions {
    pub seed: u64,
    pub restarts: usize,
    /// Value pinned at atoms of infinite weight; the origin when `None`.
    pub anchor: Option<Vec<f64>>,
    pub tol: f64,
}

impl Default for InterchangeOptions {
    fn default() -> Self {
        InterchangeOptions {
            seed: 0,
            restarts: 32,
            anchor: None,
            tol: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InterchangeResult {
    /// `inf_R I_f`, minimising each free coordinate exactly.
    pub lhs: ExtReal,
    /// The same infimum from a joint random-restart coordinate search.
    pub lhs_joint: ExtReal,
    /// `∫ m̄ dμ` with `m̄(ω) = inf_x f(ω, x)` over the grid.
    pub rhs: ExtReal,
    /// Pointwise minima per explicit point, then the tail.
    pub pointwise_min: Vec<ExtReal>,
    #[serde(skip)]
    pub minimizer: Option<SampledFunction>,
    /// `inf f(ω, ·) ≥ 0` at every atom of infinite weight.
    pub hypothesis_holds: bool,
    /// `I_f` is not identically `+∞` on the space.
    pub proper: bool,
    /// `lhs`, `lhs_joint` and `rhs` coincide within tolerance.
    pub agree: bool,
    /// When both sides are finite: the minimiser attains `m̄` at every point
    /// of positive weight, and the joint search's optimum is pointwise
    /// optimal exactly when its value matches.
    pub minimizer_characterized: Option<bool>,
    pub note: &'static str,
}

pub const ESSENTIAL_INFIMUM_NOTE: &str = "essential infimum over the space realised as the pointwise minimum over the grid";

/// Equality of extended reals up to `tol · max(1, |b|)`.
pub fn ext_close(a: ExtReal, b: ExtReal, tol: f64) -> bool {
    match (a.finite(), b.finite()) {
        (Some(x), Some(y)) => (x - y).abs() <= tol * y.abs().max(1.0),
        _ => a == b,
    }
}

/// Ordering key for the joint search: the integral, then the number of
/// coordinates contributing `+∞`, then the finite part of the sum.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
struct Key(ExtReal, usize, f64);

struct Table {
    /// `f(i, node)` for every free slot; pinned slots hold a single value.
    values: Vec<Vec<ExtReal>>,
    free: Vec<bool>,
}

impl Integrand {
    fn anchor(&self, opts: &InterchangeOptions) -> Result<Vec<f64>> {
        let a = opts.anchor.clone().unwrap_or_else(|| vec![0.0; self.dim]);
        if a.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: a.len(),
            });
        }
        Ok(a)
    }

    fn table(&self, nodes: &[Vec<f64>], anchor: &[f64]) -> Table {
        let mut values = Vec::new();
        let mut free = Vec::new();
        for i in 0..self.slots() {
            let f = self.function(i);
            if self.is_pinned(i) {
                values.push(vec![f.eval(anchor)]);
                free.push(false);
            } else {
                values.push(nodes.iter().map(|x| f.eval(x)).collect());
                free.push(true);
            }
        }
        Table { values, free }
    }

    fn slot_weight(&self, i: usize) -> ExtReal {
        if i < self.carrier.len() {
            self.carrier.weight(i)
        } else {
            PosInf
        }
    }

    fn key(&self, t: &Table, assign: &[usize]) -> Result<Key> {
        let v: Vec<ExtReal> = assign.iter().enumerate().map(|(i, k)| t.values[i][*k]).collect();
        let total = self.integrate_slots(&v)?;
        let mut infinite = 0;
        let mut finite = 0.0;
        for (i, val) in v.iter().enumerate() {
            match self.slot_weight(i) * *val {
                PosInf => infinite += 1,
                ExtReal::Finite(x) => finite += x,
                NegInf => {}
            }
        }
        Ok(Key(total, infinite, finite))
    }

    fn joint_search(&self, t: &Table, axes: &[Vec<f64>], opts: &InterchangeOptions) -> Result<Vec<usize>> {
        let shape: Vec<usize> = axes.iter().map(Vec::len).collect();
        let node_count: usize = shape.iter().product();
        let mut best: Option<(Key, Vec<usize>)> = None;
        for r in 0..opts.restarts.max(1) {
            let mut rng = rng::stream(opts.seed, r as u64);
            // continuous start, snapped to the nearest node on each axis
            let mut assign: Vec<usize> = t
                .free
                .iter()
                .map(|free| {
                    if !free {
                        return 0;
                    }
                    axes.iter().fold(0, |acc, a| {
                        let x = rng.gen_range(a[0]..=a[a.len() - 1]);
                        let k = a
                            .iter()
                            .enumerate()
                            .min_by(|p, q| (p.1 - x).abs().total_cmp(&(q.1 - x).abs()))
                            .map(|p| p.0)
                            .unwrap_or(0);
                        acc * a.len() + k
                    })
                })
                .collect();
            for _ in 0..64 {
                let mut changed = false;
                for c in 0..assign.len() {
                    if !t.free[c] {
                        continue;
                    }
                    let start = assign[c];
                    let mut best_node = start;
                    let mut best_key = self.key(t, &assign)?;
                    for node in 0..node_count {
                        assign[c] = node;
                        let k = self.key(t, &assign)?;
                        if k < best_key || (k == best_key && node < best_node) {
                            best_key = k;
                            best_node = node;
                        }
                    }
                    assign[c] = best_node;
                    changed |= best_node != start;
                }
                if !changed {
                    break;
                }
            }
            let key = self.key(t, &assign)?;
            let better = match &best {
                None => true,
                Some((k, a)) => key < *k || (key == *k && assign < *a),
            };
            if better {
                best = Some((key, assign));
            }
        }
        Ok(best.expect("at least one restart").1)
    }
}

/// `inf_{u ∈ R} I_f(u)` against `∫ inf_x f(ω, x) dμ` on the search grid.
pub fn interchange(f: &Integrand, axes: &[Vec<f64>], opts: &InterchangeOptions) -> Result<InterchangeResult> {
    if axes.len() != f.dim || axes.iter().any(Vec::is_empty) {
        return Err(Error::InvalidArgument(format!(
            "search grid needs {} nonempty axes",
            f.dim
        )));
    }
    let anchor = f.anchor(opts)?;
    let nodes = product_nodes(axes);
    let t = f.table(&nodes, &anchor);
    let slots = f.slots();

    let argmin = |row: &[ExtReal]| -> usize {
        let mut k = 0;
        for (j, v) in row.iter().enumerate() {
            if *v < row[k] {
                k = j;
            }
        }
        k
    };

    let pointwise_min: Vec<ExtReal> = (0..slots)
        .map(|i| {
            if t.free[i] {
                t.values[i][argmin(&t.values[i])]
            } else {
                nodes.iter().map(|x| f.function(i).eval(x)).min().unwrap_or(PosInf)
            }
        })
        .collect();
    let rhs = f.integrate_slots(&pointwise_min)?;

    let separate: Vec<usize> = (0..slots).map(|i| if t.free[i] { argmin(&t.values[i]) } else { 0 }).collect();
    let lhs = f.key(&t, &separate)?.0;
    let joint = f.joint_search(&t, axes, opts)?;
    let lhs_joint = f.key(&t, &joint)?.0;

    let hypothesis_holds = (0..slots).filter(|i| !t.free[*i]).all(|i| {
        let fi = f.function(i);
        let inf = fi.infimum().unwrap_or(pointwise_min[i]);
        inf >= ExtReal::ZERO
    });
    let proper = lhs < PosInf;

    let to_function = |assign: &[usize]| -> Result<SampledFunction> {
        let slots: Vec<Vec<f64>> = assign
            .iter()
            .enumerate()
            .map(|(i, k)| if t.free[i] { nodes[*k].clone() } else { anchor.clone() })
            .collect();
        function_from_slots(&f.carrier, slots)
    };

    let positive = |i: usize| f.slot_weight(i) > ExtReal::ZERO;
    let pointwise_optimal =
        |assign: &[usize]| (0..slots).filter(|i| positive(*i)).all(|i| t.values[i][assign[i]] == pointwise_min[i]);
    let joint_matches = ext_close(lhs_joint, lhs, opts.tol);
    let minimizer_characterized = (lhs.is_finite() && rhs.is_finite())
        .then(|| pointwise_optimal(&separate) && pointwise_optimal(&joint) == joint_matches);

    Ok(InterchangeResult {
        lhs,
        lhs_joint,
        rhs,
        pointwise_min,
        minimizer: if proper { Some(to_function(&separate)?) } else { None },
        hypothesis_holds,
        proper,
        agree: ext_close(lhs, rhs, opts.tol) && joint_matches,
        minimizer_characterized,
        note: ESSENTIAL_INFIMUM_NOTE,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntegralConjugate {
    /// `−inf_u ∫ f(ω, u) − ⟨v, u⟩ dμ` through the interchange.
    pub via_interchange: ExtReal,
    /// `∫ f*(ω, v(ω)) dμ` from the closed-form conjugates.
    pub via_pointwise: ExtReal,
    pub agree: bool,
}

/// `I*_f(v) = I_{f*}(v)`, computed both ways.
pub fn integral_conjugate(
    f: &Integrand,
    v: &SampledFunction,
    axes: &[Vec<f64>],
    opts: &InterchangeOptions,
) -> Result<IntegralConjugate> {
    let tilted = f.tilted(v)?;
    let via_interchange = -interchange(&tilted, axes, opts)?.lhs;
    let via_pointwise = pointwise_conjugate_integral(f, v)?;
    Ok(IntegralConjugate {
        via_interchange,
        via_pointwise,
        agree: ext_close(via_interchange, via_pointwise, opts.tol),
    })
}

fn pointwise_conjugate_integral(f: &Integrand, v: &SampledFunction) -> Result<ExtReal> {
    f.check(v)?;
    let vals = (0..f.slots())
        .map(|i| {
            let fi = f.function(i);
            fi.conjugate(&slot_value(v, i))
                .ok_or_else(|| Error::ConjugateUnavailable(format!("point function {fi:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    f.integrate_slots(&vals)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubdifferentialReport {
    /// `f(u) + f*(v) − ⟨v, u⟩` per explicit point.
    pub gaps: Vec<f64>,
    /// Pointwise Fenchel–Young test.
    pub member_pointwise: bool,
    /// Integral definition tested against single-point perturbations.
    pub member_direct: bool,
    /// A function `w` with `I_f(w) < I_f(u) + ⟨v, w − u⟩` when not a member.
    #[serde(skip)]
    pub witness: Option<SampledFunction>,
    pub agree: bool,
}

/// Steps used by the perturbation test: `±2^k`, `k = −12..=12`.
fn perturbation_steps() -> Vec<f64> {
    (-12..=12).flat_map(|k| [2f64.powi(k), -(2f64.powi(k))]).collect()
}

/// Unit directions for the perturbation test at one point: the coordinate
/// axes, then `v/‖v‖` and `u/‖u‖` when nonzero. The axes settle smooth
/// points; the last two reach the kinks of the catalog (`‖x‖` at the origin,
/// the boundary of a ball).
fn perturbation_directions(u: &[f64], v: &[f64]) -> Vec<Vec<f64>> {
    let d = u.len();
    let mut out: Vec<Vec<f64>> = (0..d)
        .map(|k| (0..d).map(|j| if j == k { 1.0 } else { 0.0 }).collect())
        .collect();
    if d > 1 {
        for x in [v, u] {
            let r = norm(x);
            if r > 0.0 {
                out.push(x.iter().map(|a| a / r).collect());
            }
        }
    }
    out
}

/// Whether `v ∈ ∂I_f(u)`, decided pointwise by Fenchel–Young and directly
/// from the integral definition. Needs a finite carrier of finite weights.
pub fn integral_subdifferential(
    f: &Integrand,
    u: &SampledFunction,
    v: &SampledFunction,
    tol: f64,
) -> Result<SubdifferentialReport> {
    f.check(u)?;
    f.check(v)?;
    let carrier = &f.carrier;
    if carrier.is_tail() {
        return Err(Error::WrongCarrierKind { expected: "finite" });
    }
    if carrier.weights().iter().any(|w| !w.is_finite()) {
        return Err(Error::InvalidArgument("subdifferential test needs finite weights".into()));
    }
    let mut gaps = Vec::with_capacity(carrier.len());
    let mut worst: Option<(f64, usize, Vec<f64>)> = None;
    for i in 0..carrier.len() {
        let fi = f.function(i);
        let (ui, vi) = (&u.values()[i], &v.values()[i]);
        let fu = fi.eval(ui);
        let conj = fi
            .conjugate(vi)
            .ok_or_else(|| Error::ConjugateUnavailable(format!("point function {fi:?}")))?;
        let gap = (fu + conj - ExtReal::from(dot(vi, ui))).to_f64();
        let w = carrier.weight(i).to_f64();
        gaps.push(if w > 0.0 { gap } else { 0.0 });
        if w == 0.0 {
            continue;
        }
        // I_f(u + δe) − I_f(u) − ⟨v, δe⟩ = μ_i (f(u_i + δe) − f(u_i) − ⟨v_i, δe⟩)
        for e in perturbation_directions(ui, vi) {
            for step in perturbation_steps() {
                let x: Vec<f64> = ui.iter().zip(&e).map(|(a, b)| a + step * b).collect();
                let change = (fi.eval(&x) - fu).to_f64() - step * dot(vi, &e);
                let scaled = w * change;
                if worst.as_ref().is_none_or(|b| scaled < b.0) {
                    worst = Some((scaled, i, x));
                }
            }
        }
    }
    let member_pointwise = gaps.iter().all(|g| *g <= tol);
    let (member_direct, witness) = match worst {
        Some((d, i, x)) if d < -tol => {
            let mut values = u.values().to_vec();
            values[i] = x;
            (false, Some(SampledFunction::new(carrier.clone(), values, None)?))
        }
        _ => (true, None),
    };
    Ok(SubdifferentialReport {
        gaps,
        member_pointwise,
        member_direct,
        witness,
        agree: member_pointwise == member_direct,
    })
}

/// A continuous linear functional split into its three parts:
/// `ℓ(u) = Σ μ_i ⟨v_i, u_i⟩ + Σ_A ⟨d_A, u_A⟩ + ⟨λ, u_∞⟩`.
///
/// The density lives on explicit points of finite weight, the diffuse part
/// on atoms of infinite weight, and the purely finitely additive part acts
/// on the eventual value of a tail function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionalTriple {
    pub density: Vec<Vec<f64>>,
    pub diffuse: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pfa: Option<Vec<f64>>,
}

impl FunctionalTriple {
    pub fn zero(carrier: &Carrier, dim: usize) -> Self {
        FunctionalTriple {
            density: vec![vec![0.0; dim]; carrier.len()],
            diffuse: vec![vec![0.0; dim]; carrier.len()],
            pfa: carrier.is_tail().then(|| vec![0.0; dim]),
        }
    }

    /// Checks shapes and that each part vanishes where it must.
    pub fn validate(&self, carrier: &Carrier, dim: usize) -> Result<()> {
        let n = carrier.len();
        for part in [&self.density, &self.diffuse] {
            if part.len() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    found: part.len(),
                });
            }
            if let Some(v) = part.iter().find(|v| v.len() != dim) {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: v.len(),
                });
            }
        }
        for i in 0..n {
            let infinite = carrier.weight(i) == PosInf;
            if infinite && norm(&self.density[i]) != 0.0 {
                return Err(Error::InvalidArgument(format!("density must vanish at the infinite atom {i}")));
            }
            if !infinite && norm(&self.diffuse[i]) != 0.0 {
                return Err(Error::InvalidArgument(format!("diffuse part must vanish at point {i}")));
            }
        }
        match (&self.pfa, carrier.is_tail()) {
            (Some(l), true) if l.len() != dim => Err(Error::DimensionMismatch {
                expected: dim,
                found: l.len(),
            }),
            (Some(_), false) => Err(Error::WrongCarrierKind { expected: "tail" }),
            _ => Ok(()),
        }
    }

    pub fn apply(&self, u: &SampledFunction) -> f64 {
        let c = u.carrier();
        let mut total = 0.0;
        for (i, ui) in u.values().iter().enumerate() {
            match c.weight(i) {
                ExtReal::Finite(w) if w > 0.0 => total += w * dot(&self.density[i], ui),
                PosInf => total += dot(&self.diffuse[i], ui),
                _ => {}
            }
        }
        if let (Some(l), Some(e)) = (&self.pfa, u.eventual()) {
            total += dot(l, e);
        }
        total
    }

    /// `max_i ‖v_i‖` over points of positive finite weight.
    pub fn density_norm(&self, carrier: &Carrier) -> f64 {
        self.density
            .iter()
            .enumerate()
            .filter(|(i, _)| matches!(carrier.weight(*i), ExtReal::Finite(w) if w > 0.0))
            .map(|(_, v)| norm(v))
            .fold(0.0, f64::max)
    }

    pub fn diffuse_norm(&self) -> f64 {
        self.diffuse.iter().map(|d| norm(d)).sum()
    }

    pub fn pfa_norm(&self) -> f64 {
        self.pfa.as_deref().map_or(0.0, norm)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThreePartConjugate {
    pub absolutely_continuous: ExtReal,
    pub diffuse: ExtReal,
    pub pfa: ExtReal,
    pub total: ExtReal,
}

/// `I*_f(ℓ) = I*_f(ℓ_a) + s_dom(ℓ_d) + s_dom(ℓ_f)`.
///
/// The support terms are sums of support functions of the zero sublevel
/// sets of `f` at infinite atoms and on the tail: exactly the values a
/// function of finite integral may take there.
pub fn conjugate_three_part(f: &Integrand, ell: &FunctionalTriple, axes: &[Vec<f64>]) -> Result<ThreePartConjugate> {
    let carrier = &f.carrier;
    ell.validate(carrier, f.dim)?;
    let n = carrier.len();
    let zero = vec![0.0; f.dim];
    let mut ac = Vec::with_capacity(n);
    let mut diffuse = ExtReal::ZERO;
    for i in 0..n {
        let fi = f.function(i);
        let y = if carrier.weight(i) == PosInf { &zero } else { &ell.density[i] };
        ac.push(
            fi.conjugate(y)
                .ok_or_else(|| Error::ConjugateUnavailable(format!("point function {fi:?}")))?,
        );
        if carrier.weight(i) == PosInf {
            diffuse = diffuse + fi.zero_set_support(&ell.diffuse[i], axes)?;
        }
    }
    let (eventual, pfa) = if carrier.is_tail() {
        let ft = f.function(n);
        let e = ft
            .conjugate(&zero)
            .ok_or_else(|| Error::ConjugateUnavailable(format!("point function {ft:?}")))?;
        let l = ell.pfa.clone().unwrap_or_else(|| zero.clone());
        (Some(e), ft.zero_set_support(&l, axes)?)
    } else {
        (None, ExtReal::ZERO)
    };
    let absolutely_continuous = carrier.integrate(&ac, eventual)?;
    Ok(ThreePartConjugate {
        absolutely_continuous,
        diffuse,
        pfa,
        total: absolutely_continuous + diffuse + pfa,
    })
}

/// The integrand `‖x‖` at points of finite weight and the indicator of the
/// unit ball at infinite atoms and on the tail.
pub fn mixed_abs_ball(carrier: &Carrier, dim: usize) -> Result<OrliczIntegrand> {
    let mut profiles: Vec<Profile> = (0..carrier.len())
        .map(|i| {
            let shape = if carrier.weight(i) == PosInf { Shape::Ball } else { Shape::Abs };
            Profile::new(shape, 1.0)
        })
        .collect();
    profiles.push(Profile::new(if carrier.is_tail() { Shape::Ball } else { Shape::Abs }, 1.0));
    OrliczIntegrand::radial(dim, profiles)
}

/// Coordinate probes: `e_k` at one explicit point, then `e_k` as the
/// eventual value on tail carriers.
pub fn canonical_probes(carrier: &Carrier, dim: usize) -> Vec<SampledFunction> {
    let n = carrier.len();
    let tail = carrier.is_tail();
    let mut out = Vec::new();
    for i in 0..n + usize::from(tail) {
        for k in 0..dim {
            let mut slots = vec![vec![0.0; dim]; n + usize::from(tail)];
            slots[i][k] = 1.0;
            out.push(function_from_slots(carrier, slots).expect("probe shape matches the carrier"));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormAdditivity {
    pub absolutely_continuous: f64,
    pub diffuse: f64,
    pub pfa: f64,
    pub total: f64,
    /// `ℓ(u*)` at the constructed maximiser.
    pub attained: f64,
    /// Luxemburg norm of the maximiser (at most one).
    pub maximizer_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FunctionalDecomposition {
    pub triple: FunctionalTriple,
    pub rank: usize,
    /// Largest probe residual `|ℓ(u) − ℓ̂(u)|`.
    pub residual: f64,
    /// Largest coefficient found at points of zero weight.
    pub null_mass: f64,
    /// Largest mismatch between the per-probe charges' decompositions and
    /// the recovered parts.
    pub charge_mismatch: f64,
    pub norms: NormAdditivity,
}

/// Recovers the three-part representation of a black-box linear functional
/// from its values on `probes`, which must span the sampled test space.
pub fn decompose_functional<L>(
    ell: L,
    carrier: &Carrier,
    dim: usize,
    probes: &[SampledFunction],
) -> Result<FunctionalDecomposition>
where
    L: Fn(&SampledFunction) -> f64,
{
    use nalgebra::{DMatrix, DVector};

    let n = carrier.len();
    let slots = n + usize::from(carrier.is_tail());
    let unknowns = slots * dim;
    for p in probes {
        if p.carrier() != carrier || p.dim() != dim {
            return Err(Error::InvalidArgument("probe does not match the carrier or dimension".into()));
        }
    }
    let row = |p: &SampledFunction| -> Vec<f64> { (0..slots).flat_map(|i| slot_value(p, i)).collect() };
    let a = DMatrix::from_fn(probes.len(), unknowns, |r, c| row(&probes[r])[c]);
    let b = DVector::from_iterator(probes.len(), probes.iter().map(&ell));
    let rank = if probes.is_empty() { 0 } else { a.clone().svd(false, false).rank(1e-10) };
    if rank < unknowns {
        return Err(Error::NonSpanning { rank, needed: unknowns });
    }
    let normal = a.transpose() * &a;
    let rhs = a.transpose() * &b;
    let theta = normal
        .full_piv_lu()
        .solve(&rhs)
        .ok_or(Error::NonSpanning { rank, needed: unknowns })?;
    let residual = (&a * &theta - &b).amax();

    let coef = |i: usize| -> Vec<f64> { (0..dim).map(|k| theta[i * dim + k]).collect() };
    let mut triple = FunctionalTriple::zero(carrier, dim);
    let mut null_mass = 0.0f64;
    for i in 0..n {
        match carrier.weight(i) {
            PosInf => triple.diffuse[i] = coef(i),
            ExtReal::Finite(w) if w > 0.0 => triple.density[i] = coef(i).iter().map(|c| c / w).collect(),
            _ => null_mass = null_mass.max(coef(i).iter().fold(0.0, |m, c| m.max(c.abs()))),
        }
    }
    if carrier.is_tail() {
        triple.pfa = Some(coef(n));
    }

    let mut charge_mismatch = 0.0f64;
    for p in probes {
        charge_mismatch = charge_mismatch.max(charge_mismatch_for(&ell, &triple, carrier, p)?);
    }
    let norms = norm_additivity(&triple, carrier, dim)?;
    Ok(FunctionalDecomposition {
        triple,
        rank,
        residual,
        null_mass,
        charge_mismatch,
        norms,
    })
}

/// The charge `A ↦ ℓ(u · χ_A)`, assembled from singletons and the tail set.
pub fn functional_charge<L>(ell: &L, u: &SampledFunction) -> Result<Charge>
where
    L: Fn(&SampledFunction) -> f64,
{
    let carrier = u.carrier();
    let n = carrier.len();
    let masses = (0..n)
        .map(|i| Ok(ell(&u.mask(&MSet::from_points([i]))?)))
        .collect::<Result<Vec<f64>>>()?;
    let lambda = if carrier.is_tail() {
        ell(&u.mask(&MSet::complement_of(0..n))?)
    } else {
        0.0
    };
    Charge::new(carrier.clone(), masses, lambda)
}

fn charge_mismatch_for<L>(ell: &L, triple: &FunctionalTriple, carrier: &Carrier, u: &SampledFunction) -> Result<f64>
where
    L: Fn(&SampledFunction) -> f64,
{
    let nu = functional_charge(ell, u)?;
    let n = carrier.len();
    let (sigma, pfa) = if carrier.is_tail() {
        let hy = hewitt_yosida(&nu)?;
        (hy.sigma_additive.masses().to_vec(), hy.purely_finitely_additive.lambda())
    } else {
        (nu.masses().to_vec(), 0.0)
    };
    let prefix = Carrier::finite(carrier.weights().to_vec())?;
    let parts = de_giorgi_signed(&Charge::point_masses(prefix.clone(), sigma)?, &prefix)?;
    let mut worst = 0.0f64;
    for i in 0..n {
        let ui = &u.values()[i];
        let (ac, diffuse) = match carrier.weight(i) {
            PosInf => (0.0, dot(&triple.diffuse[i], ui)),
            ExtReal::Finite(w) if w > 0.0 => (w * dot(&triple.density[i], ui), 0.0),
            _ => (0.0, 0.0),
        };
        worst = worst
            .max((parts.absolutely_continuous.mass(i) - ac).abs())
            .max((parts.diffuse.mass(i) - diffuse).abs())
            .max(parts.singular.mass(i).abs());
    }
    let expected_pfa = match (&triple.pfa, u.eventual()) {
        (Some(l), Some(e)) => dot(l, e),
        _ => 0.0,
    };
    Ok(worst.max((pfa - expected_pfa).abs()))
}

/// Closed-form operator norm against the mixed absolute/ball integrand,
/// confirmed by an explicit maximiser.
pub fn norm_additivity(triple: &FunctionalTriple, carrier: &Carrier, dim: usize) -> Result<NormAdditivity> {
    let n = carrier.len();
    let ac = triple.density_norm(carrier);
    let diffuse = triple.diffuse_norm();
    let pfa = triple.pfa_norm();
    let unit = |v: &[f64], s: f64| -> Vec<f64> {
        let r = norm(v);
        if r == 0.0 {
            vec![0.0; v.len()]
        } else {
            v.iter().map(|x| x / (r * s)).collect()
        }
    };
    let mut slots = vec![vec![0.0; dim]; n + usize::from(carrier.is_tail())];
    let top = (0..n)
        .filter(|i| matches!(carrier.weight(*i), ExtReal::Finite(w) if w > 0.0))
        .max_by(|a, b| norm(&triple.density[*a]).total_cmp(&norm(&triple.density[*b])).then(b.cmp(a)));
    if let Some(i) = top {
        slots[i] = unit(&triple.density[i], carrier.weight(i).to_f64());
    }
    for i in 0..n {
        if carrier.weight(i) == PosInf {
            slots[i] = unit(&triple.diffuse[i], 1.0);
        }
    }
    if let Some(l) = &triple.pfa {
        slots[n] = unit(l, 1.0);
    }
    let u = function_from_slots(carrier, slots)?;
    let phi = mixed_abs_ball(carrier, dim)?;
    let maximizer_norm = luxemburg_norm(&phi, &u, LUXEMBURG_TOL)?.to_f64();
    Ok(NormAdditivity {
        absolutely_continuous: ac,
        diffuse,
        pfa,
        total: ac + diffuse + pfa,
        attained: triple.apply(&u),
        maximizer_norm,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualNormAgreement {
    /// `sup{⟨v, u⟩ : ‖u‖_φ ≤ 1}` by projected gradient ascent.
    pub operator_norm: f64,
    /// Amemiya norm of `v` under `φ*`.
    pub amemiya: NormResult,
    /// Angle-scan value for one-dimensional functions on two points.
    pub oracle: Option<f64>,
    pub agree: bool,
}

/// Smallest sampled radius `ρ` with `w·ψ(ρ) > 1`; no feasible point lies
/// beyond it.
fn radial_cap(phi: &OrliczIntegrand, point: usize, w: f64) -> f64 {
    let over = |r: f64| ExtReal::from(w) * phi.eval_radial(point, r).expect("radial integrand") > ExtReal::from(1.0);
    let mut hi = 1.0;
    while !over(hi) && hi < 1e300 {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return hi;
        }
        if over(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
}

/// Prox of `t·w·ψ(‖·‖)` at `z`, with the radius searched on `[0, cap]`.
fn radial_prox(phi: &OrliczIntegrand, point: usize, z: &[f64], tw: f64, cap: f64) -> Vec<f64> {
    let r = norm(z);
    if r == 0.0 {
        return z.to_vec();
    }
    let h = |rho: f64| {
        let psi = phi.eval_radial(point, rho).expect("radial integrand");
        ExtReal::from(rho * (0.5 * rho - r)) + ExtReal::from(tw) * psi
    };
    let top = r.min(cap);
    let pts = golden_section(h, 0.0, top, 1e-15 * top.max(f64::MIN_POSITIVE));
    let rho = pts
        .iter()
        .min_by(|a, b| a.1.cmp(&b.1))
        .map(|p| p.0)
        .unwrap_or(0.0);
    z.iter().map(|x| x * rho / r).collect()
}

/// Euclidean projection onto `{u : Σ w_i φ_i(u_i) ≤ 1}` (points of zero
/// weight are unconstrained and dropped by the caller).
fn project(phi: &OrliczIntegrand, points: &[usize], weights: &[f64], caps: &[f64], z: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let modular = |u: &[Vec<f64>]| -> ExtReal {
        u.iter()
            .zip(points)
            .zip(weights)
            .map(|((x, p), w)| ExtReal::from(*w) * phi.eval_strict(*p, x))
            .sum()
    };
    let one = ExtReal::from(1.0);
    if modular(z) <= one {
        return z.to_vec();
    }
    let prox = |t: f64| -> Vec<Vec<f64>> {
        z.iter()
            .zip(points)
            .zip(weights)
            .zip(caps)
            .map(|(((x, p), w), cap)| radial_prox(phi, *p, x, t * w, *cap))
            .collect()
    };
    let mut hi = 1.0;
    while modular(&prox(hi)) > one && hi < 1e300 {
        hi *= 4.0;
    }
    let mut lo = 0.0;
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if modular(&prox(mid)) > one {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    prox(hi)
}

/// `sup{⟨v, u⟩_μ : ‖u‖_φ ≤ 1}` against the Amemiya norm of `v` under `φ*`.
/// Needs a radial integrand on a finite carrier of finite weights.
pub fn dual_norm_agreement(phi: &OrliczIntegrand, v: &SampledFunction, tol: f64, seed: u64) -> Result<DualNormAgreement> {
    let carrier = v.carrier();
    if carrier.is_tail() || carrier.weights().iter().any(|w| !w.is_finite()) {
        return Err(Error::InvalidArgument("dual norm agreement needs finitely many finite weights".into()));
    }
    if !phi.is_radial() {
        return Err(Error::NotRadial(phi.label().to_string()));
    }
    let active: Vec<usize> = (0..carrier.len()).filter(|i| carrier.weight(*i) > ExtReal::ZERO).collect();
    let weights: Vec<f64> = active.iter().map(|i| carrier.weight(*i).to_f64()).collect();
    let g: Vec<Vec<f64>> = active
        .iter()
        .zip(&weights)
        .map(|(i, w)| v.values()[*i].iter().map(|x| w * x).collect())
        .collect();
    let caps: Vec<f64> = active.iter().zip(&weights).map(|(i, w)| radial_cap(phi, *i, *w)).collect();
    let objective = |u: &[Vec<f64>]| -> f64 { u.iter().zip(&g).map(|(a, b)| dot(a, b)).sum() };
    let scale: f64 = g.iter().map(|x| dot(x, x)).sum::<f64>().sqrt();

    let mut operator_norm = 0.0f64;
    if scale > 0.0 {
        for restart in 0..3u64 {
            let mut rng = rng::stream(seed, restart);
            let mut u: Vec<Vec<f64>> = g
                .iter()
                .map(|x| x.iter().map(|_| rng.gen_range(-1.0..1.0) * 1e-3).collect())
                .collect();
            u = project(phi, &active, &weights, &caps, &u);
            let mut last = f64::NAN;
            // ramp the step up, then iterate to the fixed point u = P(u + ηg)
            for k in 0..120 {
                let eta = 1e-2 * 2f64.powi(k.min(17)) / scale;
                let z: Vec<Vec<f64>> = u
                    .iter()
                    .zip(&g)
                    .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + eta * y).collect())
                    .collect();
                u = project(phi, &active, &weights, &caps, &z);
                let value = objective(&u);
                if k > 17 && (value - last).abs() <= 1e-13 * value.abs() {
                    break;
                }
                last = value;
            }
            operator_norm = operator_norm.max(objective(&u));
        }
    }

    let conj = phi.conjugate()?;
    let amemiya = amemiya_norm(&conj, v, tol.min(1e-8))?;
    let oracle = if v.dim() == 1 && active.len() == 2 {
        Some(angle_scan(phi, v, &active, &g)?)
    } else {
        None
    };
    let target = amemiya.to_f64();
    let close = |x: f64| (x - target).abs() <= tol * target.abs().max(1.0);
    Ok(DualNormAgreement {
        operator_norm,
        amemiya,
        oracle,
        agree: close(operator_norm) && oracle.is_none_or(close),
    })
}

/// `sup_θ ⟨g, θ⟩ / ‖θ‖_φ` over unit directions `θ` in the plane.
fn angle_scan(phi: &OrliczIntegrand, v: &SampledFunction, active: &[usize], g: &[Vec<f64>]) -> Result<f64> {
    let carrier = v.carrier();
    let ratio = |a: f64| -> Result<f64> {
        let mut values = vec![vec![0.0]; carrier.len()];
        values[active[0]][0] = a.cos();
        values[active[1]][0] = a.sin();
        let u = SampledFunction::new(carrier.clone(), values, None)?;
        let n = luxemburg_norm(phi, &u, 1e-13)?.to_f64();
        Ok((g[0][0] * a.cos() + g[1][0] * a.sin()) / n)
    };
    let steps = 720;
    let h = std::f64::consts::TAU / steps as f64;
    let mut best = (f64::NEG_INFINITY, 0.0);
    for j in 0..steps {
        let a = j as f64 * h;
        let r = ratio(a)?;
        if r > best.0 {
            best = (r, a);
        }
    }
    let mut failure = None;
    let pts = golden_section(
        |a| match ratio(a) {
            Ok(r) => ExtReal::from(-r),
            Err(e) => {
                failure = Some(e);
                PosInf
            }
        },
        best.1 - h,
        best.1 + h,
        1e-12,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(pts.iter().map(|p| -p.1.to_f64()).fold(best.0, f64::max))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DomainLinearity {
    pub linear: bool,
    #[serde(skip)]
    pub witness: Option<SampledFunction>,
    pub samples: usize,
}

/// Whether `{u : I_φ(u) < ∞}` looks closed under doubling on sampled `u`.
pub fn domain_linearity<R: Rng>(phi: &OrliczIntegrand, carrier: &Carrier, rng: &mut R) -> Result<DomainLinearity> {
    let dim = phi.dim();
    let n = carrier.len();
    let tail = carrier.is_tail();
    let slots = n + usize::from(tail);
    let mut candidates = Vec::new();
    for k in 0..dim {
        for c in [0.25, 0.5, 1.0, 2.0, 4.0] {
            let mut e = vec![0.0; dim];
            e[k] = c;
            candidates.push(vec![e.clone(); slots]);
            for i in 0..slots {
                let mut s = vec![vec![0.0; dim]; slots];
                s[i] = e.clone();
                candidates.push(s);
            }
        }
    }
    for _ in 0..32 {
        candidates.push(
            (0..slots)
                .map(|_| (0..dim).map(|_| rng.gen_range(-2.0..2.0)).collect())
                .collect(),
        );
    }
    let samples = candidates.len();
    for slots in candidates {
        let u = function_from_slots(carrier, slots)?;
        if modular(phi, &u)?.is_finite() && !modular(phi, &u.scale(2.0))?.is_finite() {
            return Ok(DomainLinearity {
                linear: false,
                witness: Some(u),
                samples,
            });
        }
    }
    Ok(DomainLinearity {
        linear: true,
        witness: None,
        samples,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReflexivityReport {
    pub delta2: Delta2Certificate,
    pub delta2_conjugate: Delta2Certificate,
    pub domain_linear: DomainLinearity,
    pub domain_linear_conjugate: DomainLinearity,
    /// Δ₂ implies a linear domain, for `φ` and for `φ*`.
    pub consistent: bool,
    /// Both Δ₂ certificates hold.
    pub reflexive: bool,
    /// Set when a domain is linear although Δ₂ fails.
    pub caveat: Option<String>,
}

pub fn reflexivity_linearity_check(
    phi: &OrliczIntegrand,
    carrier: &Carrier,
    grid: &SampleGrid,
    bound: f64,
    seed: u64,
) -> Result<ReflexivityReport> {
    let conj = phi.conjugate()?;
    let d = delta2(phi, carrier, grid, bound)?;
    let dc = delta2(&conj, carrier, grid, bound)?;
    let lin = domain_linearity(phi, carrier, &mut rng::stream(seed, 0))?;
    let linc = domain_linearity(&conj, carrier, &mut rng::stream(seed, 1))?;
    let consistent = (!d.holds() || lin.linear) && (!dc.holds() || linc.linear);
    let caveat = ((lin.linear && !d.holds()) || (linc.linear && !dc.holds())).then(|| {
        "domain is linear although Δ₂ fails: the converse needs a carrier without atoms of positive weight".to_string()
    });
    Ok(ReflexivityReport {
        reflexive: d.holds() && dc.holds(),
        delta2: d,
        delta2_conjugate: dc,
        domain_linear: lin,
        domain_linear_conjugate: linc,
        consistent,
        caveat,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn axis(lo: f64, hi: f64, h: f64) -> Vec<f64> {
        let n = ((hi - lo) / h).round() as usize;
        (0..=n).map(|k| lo + k as f64 * h).collect()
    }

    fn quad(c: f64, a: f64) -> PointFunction {
        PointFunction::Quadratic {
            center: vec![c],
            curvature: a,
            offset: 0.0,
        }
    }

    fn scalar(c: &Carrier, v: &[f64]) -> SampledFunction {
        SampledFunction::scalar(c.clone(), v).unwrap()
    }

    #[test]
    fn exact_fit_has_zero_infimum() {
        let c = Carrier::finite_f64(&[1.0, 2.0, 3.0]).unwrap();
        let f = Integrand::new(c.clone(), 1, vec![quad(1.0, 1.0), quad(-1.0, 1.0), quad(2.0, 1.0)]).unwrap();
        let r = interchange(&f, &[axis(-4.0, 4.0, 0.25)], &InterchangeOptions::default()).unwrap();
        assert_eq!(r.lhs, ExtReal::ZERO);
        assert_eq!(r.rhs, ExtReal::ZERO);
        assert_eq!(r.lhs_joint, ExtReal::ZERO);
        assert!(r.agree && r.hypothesis_holds && r.proper);
        assert_eq!(r.minimizer_characterized, Some(true));
        assert_eq!(r.minimizer.unwrap(), scalar(&c, &[1.0, -1.0, 2.0]));
    }

    #[test]
    fn tilted_abs_sums_offsets() {
        let c = Carrier::finite_f64(&[1.0, 2.0, 3.0]).unwrap();
        let f = Integrand::new(
            c,
            1,
            [1.0, 0.0, 2.0].iter().map(|b| PointFunction::TiltedAbs { b: *b }).collect(),
        )
        .unwrap();
        let r = interchange(&f, &[axis(-2.0, 2.0, 0.125)], &InterchangeOptions::default()).unwrap();
        assert_eq!(r.lhs, ExtReal::from(7.0));
        assert_eq!(r.rhs, ExtReal::from(7.0));
        assert_eq!(r.lhs_joint, ExtReal::from(7.0));
    }

    #[test]
    fn negative_minimum_at_infinite_atom_breaks_the_interchange() {
        let c = Carrier::finite(vec![ExtReal::from(1.0), PosInf]).unwrap();
        let f = Integrand::new(
            c,
            1,
            vec![
                quad(0.5, 1.0),
                PointFunction::Quadratic {
                    center: vec![1.0],
                    curvature: 1.0,
                    offset: -1.0,
                },
            ],
        )
        .unwrap();
        let r = interchange(&f, &[axis(-2.0, 2.0, 0.25)], &InterchangeOptions::default()).unwrap();
        assert!(!r.hypothesis_holds);
        assert_eq!(r.rhs, NegInf);
        // pinned at the origin, where f = 0 and 0 · ∞ = 0
        assert_eq!(r.lhs, ExtReal::ZERO);
        assert!(!r.agree);
    }

    #[test]
    fn infinite_atom_and_tail_satisfying_hypotheses() {
        let c = Carrier::tail(vec![ExtReal::from(0.5), PosInf], 1.0).unwrap();
        let f = Integrand::new(
            c,
            1,
            vec![
                PointFunction::TiltedAbs { b: -1.0 },
                quad(0.0, 2.0),
                PointFunction::BallLinear {
                    radius: 1.0,
                    tilt: vec![0.0],
                },
            ],
        )
        .unwrap();
        let r = interchange(&f, &[axis(-2.0, 2.0, 0.25)], &InterchangeOptions::default()).unwrap();
        assert!(r.hypothesis_holds && r.proper && r.agree);
        assert_eq!(r.lhs, ExtReal::from(-0.5));
    }

    #[test]
    fn quadratic_integral_conjugate() {
        let c = Carrier::finite_f64(&[1.0, 1.0]).unwrap();
        let f = Integrand::new(c.clone(), 1, vec![quad(0.0, 0.5)]).unwrap();
        let v = scalar(&c, &[1.0, 2.0]);
        let r = integral_conjugate(&f, &v, &[axis(-4.0, 4.0, 0.25)], &InterchangeOptions::default()).unwrap();
        assert_eq!(r.via_pointwise, ExtReal::from(2.5));
        assert_eq!(r.via_interchange, ExtReal::from(2.5));
        assert!(r.agree);

        let zero = scalar(&c, &[0.0, 0.0]);
        let r = integral_conjugate(&f, &zero, &[axis(-4.0, 4.0, 0.25)], &InterchangeOptions::default()).unwrap();
        assert_eq!(r.via_pointwise, ExtReal::ZERO);
        assert_eq!(r.via_interchange, ExtReal::ZERO);
    }

    #[test]
    fn subdifferential_examples() {
        let c = Carrier::finite_f64(&[1.0, 1.0]).unwrap();
        let abs = Integrand::new(c.clone(), 1, vec![PointFunction::TiltedAbs { b: 0.0 }]).unwrap();
        let r = integral_subdifferential(&abs, &scalar(&c, &[0.0, 0.0]), &scalar(&c, &[0.5, 0.5]), 1e-12).unwrap();
        assert!(r.member_pointwise && r.member_direct);

        let q = Integrand::new(c.clone(), 1, vec![quad(0.0, 0.5)]).unwrap();
        let r = integral_subdifferential(&q, &scalar(&c, &[1.0, 2.0]), &scalar(&c, &[1.0, 2.0]), 1e-12).unwrap();
        assert!(r.member_pointwise && r.member_direct);

        let u = scalar(&c, &[1.0, 0.0]);
        let v = scalar(&c, &[0.5, 0.0]);
        let r = integral_subdifferential(&abs, &u, &v, 1e-12).unwrap();
        assert!(!r.member_pointwise && !r.member_direct && r.agree);
        assert!(r.gaps[0] > 0.0 && r.gaps[1] == 0.0);
        let w = r.witness.unwrap();
        let lhs = abs.value(&w).unwrap().to_f64();
        let rhs = abs.value(&u).unwrap().to_f64() + (w.values()[0][0] - 1.0) * 0.5;
        assert!(lhs < rhs);

        // ‖v‖ > 1 at the kink, yet no single coordinate of v exceeds 1
        let one = Carrier::finite_f64(&[1.0]).unwrap();
        let abs2 = Integrand::new(one.clone(), 2, vec![PointFunction::TiltedAbs { b: 0.0 }]).unwrap();
        let origin = SampledFunction::new(one.clone(), vec![vec![0.0, 0.0]], None).unwrap();
        let v = SampledFunction::new(one, vec![vec![0.75, 0.75]], None).unwrap();
        let r = integral_subdifferential(&abs2, &origin, &v, 1e-12).unwrap();
        assert!(!r.member_pointwise && !r.member_direct);
    }

    #[test]
    fn three_part_on_finite_carrier_matches_integral_conjugate() {
        let c = Carrier::finite_f64(&[1.0, 2.0]).unwrap();
        let f = Integrand::new(c.clone(), 1, vec![quad(1.0, 0.5), PointFunction::TiltedAbs { b: 1.0 }]).unwrap();
        let ell = FunctionalTriple {
            density: vec![vec![1.5], vec![0.5]],
            diffuse: vec![vec![0.0], vec![0.0]],
            pfa: None,
        };
        let t = conjugate_three_part(&f, &ell, &[axis(-4.0, 4.0, 0.25)]).unwrap();
        let v = scalar(&c, &[1.5, 0.5]);
        let ic = integral_conjugate(&f, &v, &[axis(-4.0, 4.0, 0.25)], &InterchangeOptions::default()).unwrap();
        assert_eq!(t.total, ic.via_pointwise);
        assert_eq!(t.diffuse, ExtReal::ZERO);
        assert_eq!(t.pfa, ExtReal::ZERO);
    }

    #[test]
    fn support_terms() {
        let ball = PointFunction::BallLinear {
            radius: 1.0,
            tilt: vec![0.0],
        };
        let c = Carrier::tail_f64(&[1.0], 1.0).unwrap();
        let f = Integrand::new(c, 1, vec![ball.clone()]).unwrap();
        let ell = FunctionalTriple {
            density: vec![vec![0.0]],
            diffuse: vec![vec![0.0]],
            pfa: Some(vec![2.0]),
        };
        let t = conjugate_three_part(&f, &ell, &[axis(-2.0, 2.0, 0.5)]).unwrap();
        assert_eq!(t.pfa, ExtReal::from(2.0));
        assert_eq!(t.absolutely_continuous, ExtReal::ZERO);

        let ball2 = PointFunction::BallLinear {
            radius: 1.0,
            tilt: vec![0.0, 0.0],
        };
        let c = Carrier::finite(vec![ExtReal::from(1.0), PosInf]).unwrap();
        let f = Integrand::new(c, 2, vec![ball2]).unwrap();
        let ell = FunctionalTriple {
            density: vec![vec![0.0, 0.0], vec![0.0, 0.0]],
            diffuse: vec![vec![0.0, 0.0], vec![3.0, 4.0]],
            pfa: None,
        };
        let t = conjugate_three_part(&f, &ell, &[axis(-1.0, 1.0, 0.5), axis(-1.0, 1.0, 0.5)]).unwrap();
        assert_eq!(t.diffuse, ExtReal::from(5.0));

        let custom = PointFunction::custom("flat", |_| ExtReal::ZERO);
        let c = Carrier::finite(vec![PosInf]).unwrap();
        let f = Integrand::new(c, 1, vec![custom]).unwrap();
        let ell = FunctionalTriple {
            density: vec![vec![0.0]],
            diffuse: vec![vec![1.0]],
            pfa: None,
        };
        assert!(conjugate_three_part(&f, &ell, &[axis(-1.0, 1.0, 0.5)]).is_err());
    }

    #[test]
    fn tilted_support_uses_the_grid() {
        // zero set of x² − 1 − x is [(1 − √5)/2, (1 + √5)/2]
        let f = PointFunction::Tilted {
            base: Box::new(PointFunction::Quadratic {
                center: vec![0.0],
                curvature: 1.0,
                offset: -1.0,
            }),
            slope: vec![1.0],
        };
        let s = f.zero_set_support(&[1.0], &[axis(-2.0, 2.0, 0.5)]).unwrap();
        assert_eq!(s, ExtReal::from(1.5));
    }

    #[test]
    fn pure_pfa_functional() {
        let c = Carrier::tail_f64(&[1.0, 2.0], 1.0).unwrap();
        let ell = FunctionalTriple {
            density: vec![vec![0.0]; 2],
            diffuse: vec![vec![0.0]; 2],
            pfa: Some(vec![3.0]),
        };
        let d = decompose_functional(|u| ell.apply(u), &c, 1, &canonical_probes(&c, 1)).unwrap();
        assert_eq!(d.triple, ell);
        assert_eq!(d.charge_mismatch, 0.0);
        let u = SampledFunction::new(c.clone(), vec![vec![5.0], vec![-1.0]], Some(vec![2.0])).unwrap();
        assert_eq!(ell.apply(&u), 6.0);
        let nu = functional_charge(&|u: &SampledFunction| ell.apply(u), &u).unwrap();
        let hy = hewitt_yosida(&nu).unwrap();
        assert!(hy.sigma_additive.masses().iter().all(|m| *m == 0.0));
        assert_eq!(hy.purely_finitely_additive.lambda(), 6.0);
    }

    #[test]
    fn mixed_functional_recovered_and_norms_add() {
        let c = Carrier::tail(vec![ExtReal::from(2.0), PosInf, ExtReal::from(0.5)], 1.0).unwrap();
        let ell = FunctionalTriple {
            density: vec![vec![0.5, -1.0], vec![0.0, 0.0], vec![3.0, 4.0]],
            diffuse: vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 0.0]],
            pfa: Some(vec![0.0, -2.0]),
        };
        ell.validate(&c, 2).unwrap();
        let d = decompose_functional(|u| ell.apply(u), &c, 2, &canonical_probes(&c, 2)).unwrap();
        assert_eq!(d.triple, ell);
        assert_eq!(d.residual, 0.0);
        assert_eq!(d.charge_mismatch, 0.0);
        assert_eq!(d.norms.total, 5.0 + 1.0 + 2.0);
        assert!((d.norms.attained - 8.0).abs() < 1e-12);
        assert!(d.norms.maximizer_norm <= 1.0 + 1e-9);
    }

    #[test]
    fn non_spanning_probes_are_reported() {
        let c = Carrier::finite_f64(&[1.0, 1.0]).unwrap();
        let probes = vec![SampledFunction::scalar(c.clone(), &[1.0, 1.0]).unwrap()];
        let err = decompose_functional(|u| u.values()[0][0], &c, 1, &probes).unwrap_err();
        assert_eq!(err, Error::NonSpanning { rank: 1, needed: 2 });
    }

    #[test]
    fn operator_norm_matches_dual_amemiya() {
        let c = Carrier::finite_f64(&[1.0, 1.0]).unwrap();
        let phi = OrliczIntegrand::radial(1, vec![Profile::new(Shape::Monomial { p: 2.0 }, 1.0)]).unwrap();
        let v = scalar(&c, &[3.0, 4.0]);
        let r = dual_norm_agreement(&phi, &v, 1e-6, 1).unwrap();
        assert!((r.operator_norm - 5.0).abs() < 1e-6, "{}", r.operator_norm);
        assert!((r.amemiya.to_f64() - 5.0).abs() < 1e-6);
        assert!((r.oracle.unwrap() - 5.0).abs() < 1e-6);
        assert!(r.agree);

        let r = dual_norm_agreement(&phi, &scalar(&c, &[0.0, 0.0]), 1e-6, 1).unwrap();
        assert_eq!(r.operator_norm, 0.0);
        assert_eq!(r.amemiya.to_f64(), 0.0);
    }

    #[test]
    fn random_dual_norms_agree() {
        let mut rng = rng::stream(11, 0);
        let catalog = [
            OrliczIntegrand::power(1, 1.5).unwrap(),
            OrliczIntegrand::power(1, 3.0).unwrap(),
            OrliczIntegrand::exponential(1),
            OrliczIntegrand::abs(1),
            OrliczIntegrand::variable_exponent(1, &[1.5, 4.0]).unwrap(),
        ];
        for round in 0..10 {
            let phi = &catalog[round % catalog.len()];
            let w: Vec<f64> = (0..2).map(|_| rng.gen_range(0.25..4.0)).collect();
            let c = Carrier::finite_f64(&w).unwrap();
            let v: Vec<f64> = (0..2).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let r = dual_norm_agreement(phi, &scalar(&c, &v), 1e-6, round as u64).unwrap();
            assert!(r.agree, "{} {w:?} {v:?}: {r:?}", phi.label());
        }
    }

    #[test]
    fn reflexivity_examples() {
        let c = Carrier::finite_f64(&[1.0, 2.0]).unwrap();
        let grid = SampleGrid::standard(1);
        let r = reflexivity_linearity_check(&OrliczIntegrand::power(1, 2.0).unwrap(), &c, &grid, 16.0, 0).unwrap();
        assert!(r.reflexive && r.consistent && r.domain_linear.linear && r.domain_linear_conjugate.linear);
        assert!(r.caveat.is_none());

        let r = reflexivity_linearity_check(&OrliczIntegrand::exponential(1), &c, &grid, 16.0, 0).unwrap();
        assert!(!r.delta2.holds() && r.domain_linear.linear && r.consistent);
        assert!(r.caveat.is_some());

        let r = reflexivity_linearity_check(&OrliczIntegrand::abs(1), &c, &grid, 16.0, 0).unwrap();
        assert!(!r.domain_linear_conjugate.linear && r.domain_linear_conjugate.witness.is_some());
        assert!(!r.reflexive && r.consistent);
    }
}
