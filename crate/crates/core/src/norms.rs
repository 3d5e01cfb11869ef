//! Modular, Luxemburg and Amemiya norms of sampled functions.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ext::{ExtReal, PosInf};
use crate::measure::{Carrier, MSet};
use crate::orlicz::{dot, norm, OrliczIntegrand, SampleGrid};
use crate::search::{convex_lower_bound, golden_section};

/// Default relative tolerance of the Luxemburg bisection.
pub const LUXEMBURG_TOL: f64 = 1e-10;
/// Default tolerance of the Amemiya golden-section search.
pub const AMEMIYA_TOL: f64 = 1e-8;
const GROWTH: f64 = 4.0;

/// An `R^d`-valued function on a carrier. On tail carriers the values past
/// the prefix all equal `eventual` (zero when absent).
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    carrier: Carrier,
    dim: usize,
    values: Vec<Vec<f64>>,
    eventual: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledFunctionJson {
    pub values: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eventual: Option<Vec<f64>>,
}

impl SampledFunction {
    pub fn new(carrier: Carrier, values: Vec<Vec<f64>>, eventual: Option<Vec<f64>>) -> Result<Self> {
        if values.len() != carrier.len() {
            return Err(Error::LengthMismatch {
                expected: carrier.len(),
                found: values.len(),
            });
        }
        if eventual.is_some() && !carrier.is_tail() {
            return Err(Error::WrongCarrierKind { expected: "tail" });
        }
        let dim = values
            .first()
            .or(eventual.as_ref())
            .map(Vec::len)
            .ok_or_else(|| Error::InvalidArgument("cannot infer the dimension of an empty function".into()))?;
        if dim == 0 {
            return Err(Error::InvalidArgument("values must have positive dimension".into()));
        }
        for v in values.iter().chain(eventual.iter()) {
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: v.len(),
                });
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidArgument("function values must be finite".into()));
            }
        }
        Ok(SampledFunction {
            carrier,
            dim,
            values,
            eventual,
        })
    }

    /// Scalar-valued function.
    pub fn scalar(carrier: Carrier, values: &[f64]) -> Result<Self> {
        Self::new(carrier, values.iter().map(|v| vec![*v]).collect(), None)
    }

    pub fn zero(carrier: Carrier, dim: usize) -> Self {
        let values = vec![vec![0.0; dim]; carrier.len()];
        SampledFunction {
            carrier,
            dim,
            values,
            eventual: None,
        }
    }

    pub fn from_json(carrier: Carrier, json: SampledFunctionJson) -> Result<Self> {
        Self::new(carrier, json.values, json.eventual)
    }

    pub fn to_json(&self) -> SampledFunctionJson {
        SampledFunctionJson {
            values: self.values.clone(),
            eventual: self.eventual.clone(),
        }
    }

    pub fn carrier(&self) -> &Carrier {
        &self.carrier
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn eventual(&self) -> Option<&[f64]> {
        self.eventual.as_deref()
    }

    /// Value at `point`; past the prefix this is the eventual value.
    pub fn at(&self, point: usize) -> Vec<f64> {
        match self.values.get(point) {
            Some(v) => v.clone(),
            None => self.eventual.clone().unwrap_or_else(|| vec![0.0; self.dim]),
        }
    }

    pub fn map(&self, f: impl Fn(&[f64]) -> Vec<f64>) -> Self {
        SampledFunction {
            carrier: self.carrier.clone(),
            dim: self.dim,
            values: self.values.iter().map(|v| f(v)).collect(),
            eventual: self.eventual.as_ref().map(|v| f(v)),
        }
    }

    pub fn scale(&self, a: f64) -> Self {
        self.map(|v| v.iter().map(|x| a * x).collect())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_pair(other)?;
        let sum = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x + y).collect::<Vec<_>>();
        Ok(SampledFunction {
            carrier: self.carrier.clone(),
            dim: self.dim,
            values: self.values.iter().zip(&other.values).map(|(a, b)| sum(a, b)).collect(),
            eventual: match (&self.eventual, &other.eventual) {
                (None, None) => None,
                _ => Some(sum(&self.at(usize::MAX), &other.at(usize::MAX))),
            },
        })
    }

    /// Zero outside the listed prefix points (and on the tail).
    pub fn restrict(&self, keep: &[bool]) -> Self {
        SampledFunction {
            carrier: self.carrier.clone(),
            dim: self.dim,
            values: self
                .values
                .iter()
                .enumerate()
                .map(|(i, v)| if keep.get(i).copied().unwrap_or(false) { v.clone() } else { vec![0.0; self.dim] })
                .collect(),
            eventual: None,
        }
    }

    /// `u · χ_A` for a set whose listed points lie in the prefix; the
    /// eventual value survives only when `A` is cofinite.
    pub fn mask(&self, set: &MSet) -> Result<Self> {
        if set.listed().iter().any(|p| *p >= self.values.len()) {
            return Err(Error::ForeignSet(format!("{set:?} lists points past the prefix")));
        }
        let mut out = self.clone();
        for (i, v) in out.values.iter_mut().enumerate() {
            if !set.contains(i) {
                v.iter_mut().for_each(|x| *x = 0.0);
            }
        }
        if !set.is_cofinite() {
            out.eventual = None;
        }
        Ok(out)
    }

    pub(crate) fn check_pair(&self, other: &Self) -> Result<()> {
        if self.carrier != other.carrier {
            return Err(Error::InvalidArgument("functions live on different carriers".into()));
        }
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(())
    }

    /// `∫ g(ω, u(ω)) dμ`, with one extra explicit point for the per-point
    /// data of `g` and the eventual value covering the rest.
    pub(crate) fn integrate_with(
        &self,
        explicit: usize,
        g: impl Fn(usize, &[f64]) -> ExtReal,
    ) -> Result<ExtReal> {
        match self.carrier.is_tail() {
            false => {
                let vals: Vec<ExtReal> = self.values.iter().enumerate().map(|(i, v)| g(i, v)).collect();
                self.carrier.integrate(&vals, None)
            }
            true => {
                let n = self.values.len().max(explicit);
                let vals: Vec<ExtReal> = (0..n).map(|i| g(i, &self.at(i))).collect();
                let eventual = g(n, &self.at(n));
                self.carrier.integrate(&vals, Some(eventual))
            }
        }
    }
}

fn check_dim(phi: &OrliczIntegrand, u: &SampledFunction) -> Result<()> {
    if phi.dim() != u.dim() {
        return Err(Error::DimensionMismatch {
            expected: phi.dim(),
            found: u.dim(),
        });
    }
    Ok(())
}

/// `I_φ(u) = ∫ φ(ω, u(ω)) dμ(ω)`.
pub fn modular(phi: &OrliczIntegrand, u: &SampledFunction) -> Result<ExtReal> {
    check_dim(phi, u)?;
    u.integrate_with(phi.point_count(), |i, x| phi.eval_strict(i, x))
}

/// A norm value with a certified enclosing interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormResult {
    pub value: ExtReal,
    pub lower: ExtReal,
    pub upper: ExtReal,
    pub evaluations: usize,
}

impl NormResult {
    fn exact(value: ExtReal, evaluations: usize) -> Self {
        NormResult {
            value,
            lower: value,
            upper: value,
            evaluations,
        }
    }

    pub fn width(&self) -> f64 {
        (self.upper - self.lower).to_f64()
    }

    /// `upper − lower ≤ tol · max(1, value)`.
    pub fn within(&self, tol: f64) -> bool {
        if self.value == PosInf {
            return self.lower == PosInf;
        }
        self.width() <= tol * self.value.to_f64().max(1.0)
    }

    pub fn to_f64(&self) -> f64 {
        self.value.to_f64()
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("tolerance {tol} must be positive")))
    }
}

/// Luxemburg norm `inf{α > 0 : I_φ(u/α) ≤ 1}` by bisection.
///
/// The returned value is the feasible end of the final bracket. If the
/// bracket cannot be narrowed to `tol` (floating-point resolution), the
/// result still reports the bracket actually reached.
pub fn luxemburg_norm(phi: &OrliczIntegrand, u: &SampledFunction, tol: f64) -> Result<NormResult> {
    check_dim(phi, u)?;
    check_tol(tol)?;
    let mut evals = 0usize;
    let mut feasible = |alpha: f64| -> Result<bool> {
        evals += 1;
        Ok(modular(phi, &u.scale(1.0 / alpha))? <= ExtReal::from(1.0))
    };

    let start = u
        .values
        .iter()
        .chain(u.eventual.iter())
        .map(|v| norm(v))
        .fold(0.0f64, f64::max);
    if start == 0.0 {
        return Ok(NormResult::exact(ExtReal::ZERO, 0));
    }
    let (mut lo, mut hi);
    if feasible(start)? {
        hi = start;
        lo = start / GROWTH;
        while feasible(lo)? {
            hi = lo;
            lo /= GROWTH;
            if lo < f64::MIN_POSITIVE {
                return Ok(NormResult {
                    value: ExtReal::ZERO,
                    lower: ExtReal::ZERO,
                    upper: ExtReal::from(hi),
                    evaluations: evals,
                });
            }
        }
    } else {
        lo = start;
        hi = start * GROWTH;
        while !feasible(hi)? {
            lo = hi;
            hi *= GROWTH;
            if !hi.is_finite() {
                return Ok(NormResult {
                    value: PosInf,
                    lower: ExtReal::from(lo),
                    upper: PosInf,
                    evaluations: evals,
                });
            }
        }
    }
    while hi - lo > tol * hi {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if feasible(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(NormResult {
        value: ExtReal::from(hi),
        lower: ExtReal::from(lo),
        upper: ExtReal::from(hi),
        evaluations: evals,
    })
}

/// Amemiya norm `inf_{α>0} α^{-1}(1 + I_φ(αu))`.
///
/// Substituting `β = 1/α` turns the objective into the perspective
/// `H(β) = β(1 + I_φ(u/β))`, which is convex and at least `β`. The minimum
/// lies in `[‖u‖, 2‖u‖]` (Luxemburg norm), so `β ≤ 2‖u‖`; the search runs
/// over `log β` down to `10^-12 ‖u‖`, and the lower end of the returned
/// bracket is a chord bound valid for every `β > 0`.
pub fn amemiya_norm(phi: &OrliczIntegrand, u: &SampledFunction, tol: f64) -> Result<NormResult> {
    check_dim(phi, u)?;
    check_tol(tol)?;
    let lux = luxemburg_norm(phi, u, LUXEMBURG_TOL.min(tol))?;
    if lux.value.is_zero() {
        return Ok(NormResult::exact(ExtReal::ZERO, lux.evaluations));
    }
    if lux.value == PosInf {
        return Ok(NormResult::exact(PosInf, lux.evaluations));
    }
    let l = lux.upper.to_f64();
    let mut evals = lux.evaluations;
    let mut err = None;
    let mut h = |t: f64| -> ExtReal {
        let beta = t.exp();
        evals += 1;
        match modular(phi, &u.scale(1.0 / beta)) {
            Ok(m) => ExtReal::from(beta) * (ExtReal::from(1.0) + m),
            Err(e) => {
                err = Some(e);
                PosInf
            }
        }
    };
    let (a, b) = ((l * 1e-12).ln(), (2.0 * l).ln() + 1e-12);
    let pts = golden_section(&mut h, a, b, tol.max(1e-15));
    if let Some(e) = err {
        return Err(e);
    }
    let pts: Vec<(f64, ExtReal)> = pts.into_iter().map(|(t, v)| (t.exp(), v)).collect();
    let upper = pts.iter().map(|p| p.1).min().unwrap_or(PosInf);
    let lower = convex_lower_bound(&pts, 0.0).min(upper.to_f64());
    Ok(NormResult {
        value: upper,
        lower: ExtReal::from(lower),
        upper,
        evaluations: evals,
    })
}

/// Dual Luxemburg and dual Amemiya norms, computed with `φ*`.
pub fn dual_norms(phi: &OrliczIntegrand, v: &SampledFunction, tol: f64) -> Result<(NormResult, NormResult)> {
    let conj = phi.conjugate()?;
    Ok((luxemburg_norm(&conj, v, tol)?, amemiya_norm(&conj, v, tol)?))
}

/// Outcome of the modular/norm comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModularNormReport {
    pub norm: f64,
    pub modular: ExtReal,
    /// `‖u‖ ≤ 1 ⟹ I_φ(u) ≤ ‖u‖`, when applicable.
    pub below_one: Option<bool>,
    /// `‖u‖ > 1 ⟹ I_φ(u) ≥ ‖u‖`, when applicable.
    pub above_one: Option<bool>,
    /// `‖u‖ ≤ 1 + I_φ(u)`.
    pub bounded: bool,
    /// Smallest slack across the applicable checks.
    pub slack: f64,
}

impl ModularNormReport {
    pub fn holds(&self) -> bool {
        self.below_one != Some(false) && self.above_one != Some(false) && self.bounded
    }
}

/// Checks the three modular/norm inequalities at relative tolerance `tol`.
pub fn modular_norm_inequalities(phi: &OrliczIntegrand, u: &SampledFunction, tol: f64) -> Result<ModularNormReport> {
    let lux = luxemburg_norm(phi, u, LUXEMBURG_TOL.min(tol))?;
    let m = modular(phi, u)?;
    let n = lux.to_f64();
    let (lo, hi) = (lux.lower.to_f64(), lux.upper.to_f64());
    let mf = m.to_f64();
    let slack_tol = tol * n.max(1.0);
    let mut slack = f64::INFINITY;
    let mut below_one = None;
    let mut above_one = None;
    if n <= 1.0 {
        let s = hi - mf;
        slack = slack.min(s);
        below_one = Some(s >= -slack_tol);
    }
    if lo > 1.0 || (n > 1.0 && hi > 1.0) {
        let s = mf - lo;
        slack = slack.min(s);
        above_one = Some(s >= -slack_tol);
    }
    let s = (1.0 + mf) - lo;
    slack = slack.min(s);
    Ok(ModularNormReport {
        norm: n,
        modular: m,
        below_one,
        above_one,
        bounded: s >= -slack_tol,
        slack,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HoelderReport {
    /// `∫ |⟨v, u⟩| dμ`.
    pub lhs: ExtReal,
    /// `2 ‖v‖_{φ*} ‖u‖_φ`.
    pub rhs: ExtReal,
    pub holds: bool,
}

/// Hölder inequality `∫|⟨v, u⟩| ≤ 2 ‖v‖_{φ*} ‖u‖_φ`.
pub fn hoelder(phi: &OrliczIntegrand, u: &SampledFunction, v: &SampledFunction, tol: f64) -> Result<HoelderReport> {
    u.check_pair(v)?;
    let conj = phi.conjugate()?;
    let nu = luxemburg_norm(phi, u, LUXEMBURG_TOL.min(tol))?;
    let nv = luxemburg_norm(&conj, v, LUXEMBURG_TOL.min(tol))?;
    let lhs = if u.carrier.is_tail() {
        let n = u.values.len();
        let vals: Vec<ExtReal> = (0..=n).map(|i| ExtReal::from(dot(&u.at(i), &v.at(i)).abs())).collect();
        let e = vals[n];
        u.carrier.integrate(&vals[..n], Some(e))?
    } else {
        let vals: Vec<ExtReal> = u
            .values
            .iter()
            .zip(&v.values)
            .map(|(a, b)| ExtReal::from(dot(a, b).abs()))
            .collect();
        u.carrier.integrate(&vals, None)?
    };
    let rhs = ExtReal::from(2.0) * nv.upper * nu.upper;
    let holds = match (lhs, rhs) {
        (_, PosInf) => true,
        (PosInf, _) => false,
        (l, r) => l.to_f64() <= r.to_f64() + tol * r.to_f64().max(1.0),
    };
    Ok(HoelderReport { lhs, rhs, holds })
}

/// Constants and verification of the sub-carrier embeddings
/// `L_∞(Ω_ε) → L_φ(Ω_ε) → L_1(Ω_ε)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmbeddingReport {
    pub epsilon: f64,
    /// Points of `Ω_ε`.
    pub omega: Vec<usize>,
    /// `|||u|||_φ ≤ C_∞ |||u|||_∞`.
    pub c_inf: f64,
    /// `|||u|||_1 ≤ C_1 |||u|||_φ`.
    pub c_1: f64,
    pub samples: usize,
    /// Smallest `C·rhs − lhs` over all samples and both inequalities.
    pub worst_slack: f64,
}

impl EmbeddingReport {
    pub fn verified(&self, tol: f64) -> bool {
        self.worst_slack >= -tol
    }
}

/// Whether point `ω` belongs to `Ω_ε`: `φ_ω ≤ 1` on the closed `ε`-ball and
/// `φ_ω ≥ 1` outside the closed `1/ε`-ball, both judged on grid directions.
pub fn in_omega_eps(phi: &OrliczIntegrand, point: usize, eps: f64) -> bool {
    let dirs = SampleGrid::directions(phi.dim());
    let at = |r: f64, d: &[f64]| phi.eval(point, &d.iter().map(|x| r * x).collect::<Vec<_>>());
    let outer = (1.0 / eps) * (1.0 + f64::powi(2.0, -40));
    dirs.iter().all(|d| at(eps, d) <= ExtReal::from(1.0)) && dirs.iter().all(|d| at(outer, d) >= ExtReal::from(1.0))
}

/// Determines `Ω_ε` for `ε ∈ (0, 1]`, the constants `C_∞ = (1 + μ(Ω))/ε` and
/// `C_1 = (1 + μ(Ω)/ε)/ε`, and checks both inequalities on `samples` random
/// functions supported in `Ω_ε`. An empty `Ω_ε` is reported with no samples.
pub fn embedding_constants<R: Rng>(
    phi: &OrliczIntegrand,
    carrier: &Carrier,
    eps: f64,
    samples: usize,
    rng: &mut R,
) -> Result<EmbeddingReport> {
    if !carrier.is_finite_points() || carrier.weights().iter().any(|w| !w.is_finite()) {
        return Err(Error::InvalidCarrier("embedding constants need finite total measure".into()));
    }
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::InvalidArgument(format!("epsilon {eps} must lie in (0, 1]")));
    }
    let total = carrier.total_measure().to_f64();
    let omega: Vec<usize> = (0..carrier.len()).filter(|&i| in_omega_eps(phi, i, eps)).collect();
    let c_inf = (1.0 + total) / eps;
    let c_1 = (1.0 + total / eps) / eps;
    let mut worst = f64::INFINITY;
    let d = phi.dim();
    let abs = OrliczIntegrand::abs(d);
    let ball = OrliczIntegrand::ball(d);
    let mut done = 0;
    if !omega.is_empty() {
        for _ in 0..samples {
            let scale = 10f64.powf(rng.gen_range(-2.0..2.0));
            let values = (0..carrier.len())
                .map(|i| {
                    if omega.contains(&i) {
                        (0..d).map(|_| scale * rng.gen_range(-1.0..1.0)).collect()
                    } else {
                        vec![0.0; d]
                    }
                })
                .collect();
            let u = SampledFunction::new(carrier.clone(), values, None)?;
            let a_phi = amemiya_norm(phi, &u, AMEMIYA_TOL)?;
            let a_inf = amemiya_norm(&ball, &u, AMEMIYA_TOL)?;
            let a_1 = amemiya_norm(&abs, &u, AMEMIYA_TOL)?;
            let s1 = c_inf * a_inf.upper.to_f64() - a_phi.lower.to_f64();
            let s2 = c_1 * a_phi.upper.to_f64() - a_1.lower.to_f64();
            let scale_ref = a_phi.upper.to_f64().max(1.0);
            worst = worst.min(s1 / scale_ref).min(s2 / scale_ref);
            done += 1;
        }
    }
    Ok(EmbeddingReport {
        epsilon: eps,
        omega,
        c_inf,
        c_1,
        samples: done,
        worst_slack: if done == 0 { 0.0 } else { worst },
    })
}

/// Whether `I_φ(λu) < ∞` for every `λ = 2^k`, `k = 0..=60`: membership in
/// the largest subspace on which the modular is finite everywhere.
pub fn modular_finite_for_all_scales(phi: &OrliczIntegrand, u: &SampledFunction) -> Result<bool> {
    for k in 0..=60 {
        if modular(phi, &u.scale(f64::powi(2.0, k)))? == PosInf {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    fn two() -> Carrier {
        Carrier::finite_f64(&[1.0, 1.0]).unwrap()
    }

    fn square() -> OrliczIntegrand {
        // x² as power p = 2 with scale 2
        OrliczIntegrand::power(1, 2.0).unwrap().with_scales(&[2.0]).unwrap()
    }

    fn u(c: Carrier, v: &[f64]) -> SampledFunction {
        SampledFunction::scalar(c, v).unwrap()
    }

    #[test]
    fn modular_examples() {
        assert_eq!(modular(&square(), &u(two(), &[3.0, 4.0])).unwrap(), ExtReal::from(25.0));
        assert_eq!(modular(&square(), &u(two(), &[0.0, 0.0])).unwrap(), ExtReal::ZERO);
        let c = Carrier::finite_f64(&[1.0, f64::INFINITY]).unwrap();
        assert_eq!(modular(&square(), &u(c, &[1.0, 0.0])).unwrap(), ExtReal::from(1.0));
    }

    #[test]
    fn tail_modular_needs_vanishing_eventual_value() {
        let c = Carrier::tail_f64(&[1.0], 0.5).unwrap();
        let f = SampledFunction::new(c.clone(), vec![vec![1.0]], Some(vec![0.5])).unwrap();
        assert_eq!(modular(&square(), &f).unwrap(), PosInf);
        assert_eq!(modular(&OrliczIntegrand::ball(1), &f).unwrap(), ExtReal::ZERO);
        let g = SampledFunction::new(c, vec![vec![2.0]], None).unwrap();
        assert_eq!(modular(&square(), &g).unwrap(), ExtReal::from(4.0));
    }

    #[test]
    fn luxemburg_examples() {
        let r = luxemburg_norm(&square(), &u(two(), &[3.0, 4.0]), LUXEMBURG_TOL).unwrap();
        assert!((r.to_f64() - 5.0).abs() < 1e-9);
        assert!(r.lower <= r.value && r.value <= r.upper && r.within(LUXEMBURG_TOL));
        let r = luxemburg_norm(&square(), &u(two(), &[0.0, 0.0]), LUXEMBURG_TOL).unwrap();
        assert_eq!(r.value, ExtReal::ZERO);
        let three = Carrier::finite_f64(&[1.0; 3]).unwrap();
        let r = luxemburg_norm(&OrliczIntegrand::ball(1), &u(three, &[1.0, -2.0, 0.5]), LUXEMBURG_TOL).unwrap();
        assert!((r.to_f64() - 2.0).abs() < 1e-9);
    }

    #[test]
    fn norm_vanishes_off_positive_weights() {
        let c = Carrier::finite_f64(&[1.0, 0.0]).unwrap();
        let r = luxemburg_norm(&square(), &u(c, &[0.0, 7.0]), LUXEMBURG_TOL).unwrap();
        assert_eq!(r.value, ExtReal::ZERO);
    }

    #[test]
    fn infinite_atom_forces_infinite_norm_unless_bounded() {
        let c = Carrier::finite_f64(&[1.0, f64::INFINITY]).unwrap();
        let f = u(c, &[1.0, 1.0]);
        assert_eq!(luxemburg_norm(&square(), &f, LUXEMBURG_TOL).unwrap().value, PosInf);
        let r = luxemburg_norm(&OrliczIntegrand::ball(1), &f, LUXEMBURG_TOL).unwrap();
        assert!((r.to_f64() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn amemiya_examples() {
        let r = amemiya_norm(&square(), &u(two(), &[3.0, 4.0]), AMEMIYA_TOL).unwrap();
        assert!((r.to_f64() - 10.0).abs() < 1e-9, "{r:?}");
        assert!(r.lower <= r.value && r.within(AMEMIYA_TOL), "{r:?}");
        let r = amemiya_norm(&square(), &u(two(), &[0.0, 0.0]), AMEMIYA_TOL).unwrap();
        assert_eq!(r.value, ExtReal::ZERO);
    }

    #[test]
    fn amemiya_of_abs_and_ball() {
        let f = u(two(), &[3.0, -4.0]);
        let r = amemiya_norm(&OrliczIntegrand::abs(1), &f, AMEMIYA_TOL).unwrap();
        assert!((r.to_f64() - 7.0).abs() < 1e-9 && r.within(AMEMIYA_TOL), "{r:?}");
        let r = amemiya_norm(&OrliczIntegrand::ball(1), &f, AMEMIYA_TOL).unwrap();
        assert!((r.to_f64() - 4.0).abs() < 1e-7 && r.within(AMEMIYA_TOL), "{r:?}");
    }

    #[test]
    fn sandwich_on_random_instances() {
        let mut rng = stream(1, 0);
        for phi in [square(), OrliczIntegrand::exponential(1), OrliczIntegrand::abs(1)] {
            for _ in 0..20 {
                let vals: Vec<f64> = (0..3).map(|_| rng.gen_range(-5.0..5.0)).collect();
                let f = u(Carrier::finite_f64(&[0.5, 1.0, 2.0]).unwrap(), &vals);
                let l = luxemburg_norm(&phi, &f, LUXEMBURG_TOL).unwrap().to_f64();
                let a = amemiya_norm(&phi, &f, AMEMIYA_TOL).unwrap().to_f64();
                assert!(l <= a * (1.0 + 1e-8) && a <= 2.0 * l * (1.0 + 1e-8), "{l} {a}");
            }
        }
    }

    #[test]
    fn dual_norm_examples() {
        let (l, _) = dual_norms(&square(), &u(two(), &[3.0, 4.0]), LUXEMBURG_TOL).unwrap();
        assert!((l.to_f64() - 2.5).abs() < 1e-9);
        let (l, a) = dual_norms(&square(), &u(two(), &[0.0, 0.0]), LUXEMBURG_TOL).unwrap();
        assert_eq!((l.value, a.value), (ExtReal::ZERO, ExtReal::ZERO));
    }

    #[test]
    fn modular_norm_cases() {
        let r = modular_norm_inequalities(&square(), &u(two(), &[0.3, 0.4]), 1e-8).unwrap();
        assert!((r.norm - 0.5).abs() < 1e-9);
        assert_eq!(r.below_one, Some(true));
        assert!(r.holds());
        let r = modular_norm_inequalities(&square(), &u(two(), &[3.0, 4.0]), 1e-8).unwrap();
        assert_eq!(r.above_one, Some(true));
        assert!(r.holds());
    }

    #[test]
    fn hoelder_tight_and_orthogonal() {
        let r = hoelder(&square(), &u(two(), &[3.0, 4.0]), &u(two(), &[3.0, 4.0]), 1e-6).unwrap();
        assert_eq!(r.lhs, ExtReal::from(25.0));
        assert!((r.rhs.to_f64() - 25.0).abs() < 1e-6 && r.holds);
        let phi = OrliczIntegrand::power(2, 2.0).unwrap();
        let a = SampledFunction::new(two(), vec![vec![1.0, 0.0], vec![0.0, 2.0]], None).unwrap();
        let b = SampledFunction::new(two(), vec![vec![0.0, 5.0], vec![3.0, 0.0]], None).unwrap();
        assert_eq!(hoelder(&phi, &a, &b, 1e-6).unwrap().lhs, ExtReal::ZERO);
    }

    #[test]
    fn embedding_at_eps_one() {
        let mut rng = stream(3, 0);
        let r = embedding_constants(&square(), &two(), 1.0, 30, &mut rng).unwrap();
        assert_eq!(r.omega, vec![0, 1]);
        assert_eq!(r.c_inf, 3.0);
        assert!(r.verified(1e-8), "{r:?}");
    }

    #[test]
    fn embedding_excludes_extreme_point() {
        let mut rng = stream(3, 1);
        // a steep point fails φ ≤ 1 on the ε-ball once ε is large
        let phi = OrliczIntegrand::variable_exponent(1, &[2.0, 2.0])
            .unwrap()
            .with_scales(&[1.0, 1e4])
            .unwrap();
        let r = embedding_constants(&phi, &two(), 0.5, 10, &mut rng).unwrap();
        assert_eq!(r.omega, vec![0]);
        assert!(r.verified(1e-8));
        let r = embedding_constants(&phi, &two(), 0.001, 0, &mut rng).unwrap();
        assert_eq!(r.omega, vec![0, 1]);
    }

    #[test]
    fn finite_modular_subspace() {
        let f = u(two(), &[1.0, 2.0]);
        assert!(modular_finite_for_all_scales(&square(), &f).unwrap());
        assert!(!modular_finite_for_all_scales(&OrliczIntegrand::ball(1), &f).unwrap());
    }

    #[test]
    fn monotone_convergence_on_growing_sets() {
        let c = Carrier::finite_f64(&[1.0, 2.0, 0.5, 3.0]).unwrap();
        let f = u(c, &[1.0, -2.0, 3.0, 0.5]);
        let mut prev = 0.0;
        for k in 0..=4 {
            let keep: Vec<bool> = (0..4).map(|i| i < k).collect();
            let n = luxemburg_norm(&square(), &f.restrict(&keep), LUXEMBURG_TOL).unwrap().to_f64();
            assert!(n >= prev);
            prev = n;
        }
        let full = luxemburg_norm(&square(), &f, LUXEMBURG_TOL).unwrap().to_f64();
        assert_eq!(prev, full);
    }
}
