//! Numerical Legendre–Fenchel transforms on grids.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ext::{ExtReal, PosInf};
use crate::oracle::conjugate::grid_sup;
use crate::orlicz::{dot, norm, OrliczIntegrand, Profile, RadialTable, SampleGrid, Shape};

/// Extended-real samples on a product grid in dimension 1 or 2, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridFunctionJson", into = "GridFunctionJson")]
pub struct GridFunction {
    axes: Vec<Vec<f64>>,
    values: Vec<ExtReal>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridFunctionJson {
    pub axes: Vec<Vec<f64>>,
    pub values: Vec<ExtReal>,
}

impl TryFrom<GridFunctionJson> for GridFunction {
    type Error = Error;
    fn try_from(j: GridFunctionJson) -> Result<Self> {
        GridFunction::new(j.axes, j.values)
    }
}

impl From<GridFunction> for GridFunctionJson {
    fn from(g: GridFunction) -> Self {
        GridFunctionJson {
            axes: g.axes,
            values: g.values,
        }
    }
}

impl GridFunction {
    pub fn new(axes: Vec<Vec<f64>>, values: Vec<ExtReal>) -> Result<Self> {
        if axes.is_empty() || axes.len() > 2 {
            return Err(Error::InvalidArgument(format!("grid dimension {} not in {{1, 2}}", axes.len())));
        }
        for a in &axes {
            if a.is_empty() || a.iter().any(|x| !x.is_finite()) || a.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidArgument("grid axes must be finite and strictly increasing".into()));
            }
        }
        let n: usize = axes.iter().map(Vec::len).product();
        if values.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                found: values.len(),
            });
        }
        if values.contains(&ExtReal::NegInf) {
            return Err(Error::InvalidArgument("grid functions must not take the value -inf".into()));
        }
        Ok(GridFunction { axes, values })
    }

    /// Samples `f` on the product grid.
    pub fn from_fn(axes: Vec<Vec<f64>>, f: impl Fn(&[f64]) -> ExtReal) -> Result<Self> {
        let shell = GridFunction {
            values: Vec::new(),
            axes,
        };
        let n: usize = shell.axes.iter().map(Vec::len).product();
        let values = (0..n).map(|i| f(&shell.point(i))).collect();
        GridFunction::new(shell.axes, values)
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn axes(&self) -> &[Vec<f64>] {
        &self.axes
    }

    pub fn values(&self) -> &[ExtReal] {
        &self.values
    }

    pub fn value(&self, i: usize) -> ExtReal {
        self.values[i]
    }

    fn index(&self, i: usize) -> Vec<usize> {
        match self.axes.len() {
            1 => vec![i],
            _ => {
                let ny = self.axes[1].len();
                vec![i / ny, i % ny]
            }
        }
    }

    pub fn point(&self, i: usize) -> Vec<f64> {
        self.index(i).iter().zip(&self.axes).map(|(k, a)| a[*k]).collect()
    }

    /// Whether node `i` lies on the boundary of the grid box.
    pub fn on_boundary(&self, i: usize) -> bool {
        self.index(i)
            .iter()
            .zip(&self.axes)
            .any(|(k, a)| *k == 0 || *k + 1 == a.len())
    }

    /// Largest spacing between adjacent nodes along any axis.
    pub fn step(&self) -> f64 {
        self.axes
            .iter()
            .flat_map(|a| a.windows(2).map(|w| w[1] - w[0]))
            .fold(0.0, f64::max)
    }
}

/// Uniform axis `lo, lo + h, …, hi` with `n` nodes.
pub fn uniform_axis(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2 && hi > lo);
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConjugateMethod {
    Analytic,
    LinearTimeTransform1D,
    GridSup,
}

/// Conjugate samples `g*(s)` on a dual grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConjugateTable {
    pub input: GridFunction,
    /// Dual grid and conjugate values.
    pub dual: GridFunction,
    pub method: ConjugateMethod,
}

impl ConjugateTable {
    /// Discrete midpoint convexity along each dual axis at every finite
    /// triple of consecutive nodes, with relative tolerance `tol`.
    pub fn is_convex(&self, tol: f64) -> bool {
        let d = &self.dual;
        let check = |a: (f64, ExtReal), b: (f64, ExtReal), c: (f64, ExtReal)| match (a.1, b.1, c.1) {
            (ExtReal::Finite(fa), ExtReal::Finite(fb), ExtReal::Finite(fc)) => {
                let t = (b.0 - a.0) / (c.0 - a.0);
                let chord = (1.0 - t) * fa + t * fc;
                fb <= chord + tol * chord.abs().max(1.0)
            }
            (ExtReal::Finite(_), PosInf, ExtReal::Finite(_)) => false,
            _ => true,
        };
        match d.dim() {
            1 => {
                let a = &d.axes[0];
                (1..a.len().saturating_sub(1))
                    .all(|i| check((a[i - 1], d.values[i - 1]), (a[i], d.values[i]), (a[i + 1], d.values[i + 1])))
            }
            _ => {
                let (ax, ay) = (&d.axes[0], &d.axes[1]);
                let v = |i: usize, j: usize| d.values[i * ay.len() + j];
                let rows = (0..ax.len()).all(|i| {
                    (1..ay.len().saturating_sub(1))
                        .all(|j| check((ay[j - 1], v(i, j - 1)), (ay[j], v(i, j)), (ay[j + 1], v(i, j + 1))))
                });
                let cols = (0..ay.len()).all(|j| {
                    (1..ax.len().saturating_sub(1))
                        .all(|i| check((ax[i - 1], v(i - 1, j)), (ax[i], v(i, j)), (ax[i + 1], v(i + 1, j))))
                });
                rows && cols
            }
        }
    }
}

/// Lower convex hull of the finite samples, as grid indices.
fn lower_hull(x: &[f64], g: &[ExtReal]) -> Vec<usize> {
    let mut hull: Vec<usize> = Vec::new();
    for i in (0..x.len()).filter(|i| g[*i].is_finite()) {
        let gi = g[i].to_f64();
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let (ga, gb) = (g[a].to_f64(), g[b].to_f64());
            // drop b unless it lies strictly below the chord a–i
            let cross = (x[b] - x[a]) * (gi - ga) - (gb - ga) * (x[i] - x[a]);
            if cross <= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }
    hull
}

/// One-dimensional conjugate by a sweep over the lower convex hull.
///
/// For increasing dual nodes the maximising hull vertex moves right; the
/// pointer advances while the next vertex does not decrease `s·x − g(x)`.
/// Values are flagged `+∞` exactly as in the grid-sup oracle.
pub fn conjugate_1d(g: &GridFunction, dual: &[f64]) -> Result<ConjugateTable> {
    if g.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: g.dim(),
        });
    }
    if dual.is_empty() || dual.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("dual grid must be strictly increasing".into()));
    }
    let x = &g.axes[0];
    let hull = lower_hull(x, &g.values);
    if hull.is_empty() {
        return Err(Error::AllInfinite);
    }
    let last_grid = x.len() - 1;
    let val = |s: f64, k: usize| s * x[hull[k]] - g.values[hull[k]].to_f64();
    let mut k = 0;
    let values = dual
        .iter()
        .map(|&s| {
            while k + 1 < hull.len() && val(s, k + 1) >= val(s, k) {
                k += 1;
            }
            let v = val(s, k);
            let flagged = hull.len() >= 2
                && ((k == 0 && hull[0] == 0 && val(s, 1) < v)
                    || (k + 1 == hull.len() && hull[k] == last_grid && val(s, k - 1) < v));
            if flagged {
                PosInf
            } else {
                ExtReal::from(v)
            }
        })
        .collect();
    Ok(ConjugateTable {
        input: g.clone(),
        dual: GridFunction::new(vec![dual.to_vec()], values)?,
        method: ConjugateMethod::LinearTimeTransform1D,
    })
}

/// Conjugate in dimension 1 (hull sweep) or 2 (grid sup).
pub fn conjugate(g: &GridFunction, dual_axes: &[Vec<f64>]) -> Result<ConjugateTable> {
    match g.dim() {
        1 => conjugate_1d(g, dual_axes.first().map(Vec::as_slice).unwrap_or(&[])),
        _ => grid_sup(g, dual_axes),
    }
}

/// Dual grid spanning the hull slopes of a 1-D input, widened by 10% per
/// side, with every hull edge slope added as a node so that the conjugate
/// is sampled at all of its kinks.
pub fn default_dual_grid(g: &GridFunction, n: usize) -> Result<Vec<f64>> {
    if g.dim() != 1 {
        return Err(Error::Unsupported("default dual grids are one-dimensional".into()));
    }
    let x = &g.axes[0];
    let hull = lower_hull(x, &g.values);
    if hull.is_empty() {
        return Err(Error::AllInfinite);
    }
    let slope = |a: usize, b: usize| (g.values[b].to_f64() - g.values[a].to_f64()) / (x[b] - x[a]);
    let (lo, hi) = if hull.len() >= 2 {
        (slope(hull[0], hull[1]), slope(hull[hull.len() - 2], hull[hull.len() - 1]))
    } else {
        (-1.0, 1.0)
    };
    let pad = 0.1 * (hi - lo).max(1e-12);
    let mut axis = uniform_axis(lo - pad, hi + pad, n.max(2));
    axis.extend(hull.windows(2).map(|w| slope(w[0], w[1])));
    axis.sort_by(f64::total_cmp);
    axis.dedup();
    Ok(axis)
}

/// Conjugate of a conjugate table, evaluated back on the input grid.
pub fn biconjugate_1d(table: &ConjugateTable) -> Result<GridFunction> {
    let back = conjugate_1d(&table.dual, &table.input.axes[0])?;
    Ok(back.dual)
}

/// Conjugate of a radial integrand at `point`: `φ*(x') = ψ*(‖x'‖)`, with
/// `ψ*` obtained from the even extension of `ψ` sampled at `radii`.
pub fn conjugate_radial(
    phi: &OrliczIntegrand,
    point: usize,
    radii: &[f64],
    dual_radii: &[f64],
) -> Result<ConjugateTable> {
    if !phi.is_radial() {
        return Err(Error::NotRadial(phi.label().to_string()));
    }
    if radii.first() != Some(&0.0) || radii.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("radii must start at 0 and increase".into()));
    }
    let axis: Vec<f64> = radii.iter().skip(1).rev().map(|r| -r).chain(radii.iter().copied()).collect();
    let g = GridFunction::from_fn(vec![axis], |x| phi.eval_radial(point, x[0].abs()).unwrap_or(PosInf))?;
    conjugate_1d(&g, dual_radii)
}

/// Radial integrand whose profiles are the tabulated numeric conjugates of
/// `phi` at its defined points.
pub fn numeric_conjugate(phi: &OrliczIntegrand, radii: &[f64], dual_radii: &[f64]) -> Result<OrliczIntegrand> {
    let mut profiles = Vec::new();
    for point in 0..phi.point_count() {
        let t = conjugate_radial(phi, point, radii, dual_radii)?;
        let table = RadialTable::new(dual_radii.to_vec(), t.dual.values.clone())?;
        let dual = phi.profile(point).cloned().map(Box::new);
        profiles.push(Profile::new(
            Shape::Table {
                table: Arc::new(table),
                dual,
            },
            1.0,
        ));
    }
    OrliczIntegrand::radial(phi.dim(), profiles)
}

/// Constants from the growth bounds linking `φ` and `φ*`, with their checks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConjugateBounds {
    /// `φ(x) > s‖x‖` for `‖x‖ > r`, so `φ*(x') ≤ r‖x'‖` for `‖x'‖ < s`.
    pub r: f64,
    pub s: f64,
    pub upper_verified: bool,
    pub upper_worst: f64,
    /// `φ ≤ ε` on the `δ`-ball, so `φ*(x') ≥ δ‖x'‖ − ε`.
    pub epsilon: f64,
    pub delta: f64,
    pub lower_verified: bool,
    pub lower_worst: f64,
    pub samples: usize,
}

impl ConjugateBounds {
    pub fn verified(&self) -> bool {
        self.upper_verified && self.lower_verified
    }
}

const BOUND_RTOL: f64 = 1e-12;

/// Checks `φ*(x') ≤ r‖x'‖` at grid samples with `‖x'‖ < s`; returns the
/// smallest slack and the number of samples.
pub fn verify_conjugate_upper(
    phi: &OrliczIntegrand,
    point: usize,
    grid: &SampleGrid,
    r: f64,
    s: f64,
) -> Result<(f64, usize)> {
    let conj = phi.conjugate()?;
    let mut worst = f64::INFINITY;
    let mut n = 0;
    for &rho in grid.radii.iter().filter(|rho| **rho < s) {
        for d in &grid.directions {
            let x: Vec<f64> = d.iter().map(|v| rho * v).collect();
            let bound = r * norm(&x);
            let slack = (ExtReal::from(bound) - conj.eval(point, &x)).to_f64() + BOUND_RTOL * bound.max(1.0);
            worst = worst.min(slack);
            n += 1;
        }
    }
    Ok((worst, n))
}

/// Extracts `(r, s)` and `(ε, δ)` from the grid and verifies both bounds on it.
pub fn quantitative_conjugate_bounds(phi: &OrliczIntegrand, point: usize, grid: &SampleGrid) -> Result<ConjugateBounds> {
    let conj = phi.conjugate()?;
    let sphere = |rho: f64, pick_max: bool| {
        let vals = grid.directions.iter().map(|d| {
            let x: Vec<f64> = d.iter().map(|v| rho * v).collect();
            phi.eval(point, &x)
        });
        if pick_max {
            vals.max().unwrap_or(PosInf)
        } else {
            vals.min().unwrap_or(PosInf)
        }
    };
    let r_cap = *grid.radii.last().unwrap();
    let (mut r, mut s) = (r_cap, 0.0);
    for &rho in grid.radii.iter().filter(|rho| **rho >= 1.0) {
        let q = sphere(rho, false);
        if q > ExtReal::ZERO {
            r = rho;
            s = match q {
                ExtReal::Finite(v) => (v / rho) * (1.0 - 1e-9),
                _ => r_cap,
            };
            break;
        }
    }
    let (upper_worst, n_upper) = verify_conjugate_upper(phi, point, grid, r, s)?;

    let (mut delta, mut epsilon) = (0.0, 0.0);
    for &rho in grid.radii.iter().filter(|rho| **rho <= 1.0) {
        if let ExtReal::Finite(v) = sphere(rho, true) {
            delta = rho;
            epsilon = v;
        }
    }
    let mut lower_worst = f64::INFINITY;
    let mut n_lower = 0;
    for &rho in &grid.radii {
        for d in &grid.directions {
            let x: Vec<f64> = d.iter().map(|v| rho * v).collect();
            let bound = delta * norm(&x) - epsilon;
            let slack = (conj.eval(point, &x) - ExtReal::from(bound)).to_f64() + BOUND_RTOL * bound.abs().max(1.0);
            lower_worst = lower_worst.min(slack);
            n_lower += 1;
        }
    }
    Ok(ConjugateBounds {
        r,
        s,
        upper_verified: upper_worst >= 0.0,
        upper_worst,
        epsilon,
        delta,
        lower_verified: lower_worst >= 0.0,
        lower_worst,
        samples: n_upper + n_lower,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SubdifferentialCheck {
    /// Fenchel–Young gap `φ(x) + φ*(x') − ⟨x', x⟩ ≥ 0`.
    pub gap: ExtReal,
    pub member: bool,
}

/// Decides `x' ∈ ∂φ_ω(x)` by the Fenchel–Young gap.
pub fn subdifferential_check(
    phi: &OrliczIntegrand,
    point: usize,
    x: &[f64],
    x_dual: &[f64],
    tol: f64,
) -> Result<SubdifferentialCheck> {
    let conj = phi.conjugate()?;
    let gap = phi.eval(point, x) + conj.eval(point, x_dual) - ExtReal::from(dot(x, x_dual));
    Ok(SubdifferentialCheck {
        gap,
        member: gap <= ExtReal::from(tol),
    })
}

/// `f_λ(x) = min_y g(y) + λ‖x − y‖` over grid nodes.
///
/// In one dimension two linear sweeps track the best node to the left and
/// to the right; in two dimensions every pair is compared.
pub fn lipschitz_regularize(g: &GridFunction, lambda: f64) -> Result<GridFunction> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidArgument(format!("lambda {lambda} must be positive")));
    }
    if g.values.iter().all(|v| !v.is_finite()) {
        return Err(Error::AllInfinite);
    }
    if g.dim() == 2 {
        return crate::oracle::conjugate::lipschitz_envelope(g, lambda);
    }
    let x = &g.axes[0];
    let n = x.len();
    let mut out = vec![f64::INFINITY; n];
    let mut best: Option<usize> = None;
    for i in 0..n {
        if let ExtReal::Finite(v) = g.values[i] {
            let better = match best {
                None => true,
                Some(j) => v - lambda * x[i] <= g.values[j].to_f64() - lambda * x[j],
            };
            if better {
                best = Some(i);
            }
        }
        if let Some(j) = best {
            out[i] = g.values[j].to_f64() + lambda * (x[i] - x[j]);
        }
    }
    best = None;
    for i in (0..n).rev() {
        if let ExtReal::Finite(v) = g.values[i] {
            let better = match best {
                None => true,
                Some(j) => v + lambda * x[i] <= g.values[j].to_f64() + lambda * x[j],
            };
            if better {
                best = Some(i);
            }
        }
        if let Some(j) = best {
            out[i] = out[i].min(g.values[j].to_f64() + lambda * (x[j] - x[i]));
        }
    }
    GridFunction::new(g.axes.clone(), out.into_iter().map(ExtReal::from).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dyadic(lo: f64, hi: f64, h: f64) -> Vec<f64> {
        let n = ((hi - lo) / h).round() as usize;
        (0..=n).map(|i| lo + h * i as f64).collect()
    }

    #[test]
    fn quadratic_is_self_conjugate() {
        let h = 1.0 / 64.0;
        let g = GridFunction::from_fn(vec![dyadic(-5.0, 5.0, h)], |x| ExtReal::from(x[0] * x[0] / 2.0)).unwrap();
        let dual = dyadic(-3.0, 3.0, 1.0 / 16.0);
        let t = conjugate_1d(&g, &dual).unwrap();
        for (s, v) in dual.iter().zip(t.dual.values()) {
            assert!((v.to_f64() - s * s / 2.0).abs() <= h * h, "{s}");
        }
        assert_eq!(t.dual, grid_sup(&g, &[dual]).unwrap().dual);
    }

    #[test]
    fn abs_conjugate_is_indicator() {
        let g = GridFunction::from_fn(vec![dyadic(-4.0, 4.0, 0.25)], |x| ExtReal::from(x[0].abs())).unwrap();
        let dual = dyadic(-2.0, 2.0, 0.25);
        let t = conjugate_1d(&g, &dual).unwrap();
        for (s, v) in dual.iter().zip(t.dual.values()) {
            if s.abs() <= 1.0 {
                assert_eq!(*v, ExtReal::ZERO, "{s}");
            } else {
                assert_eq!(*v, PosInf, "{s}");
            }
        }
        assert_eq!(t.dual, grid_sup(&g, &[dual]).unwrap().dual);
    }

    #[test]
    fn exponential_matches_oracle() {
        let g = GridFunction::from_fn(vec![dyadic(-6.0, 6.0, 1.0 / 32.0)], |x| ExtReal::from(x[0].abs().exp_m1())).unwrap();
        let dual = dyadic(-500.0, 500.0, 0.5);
        let t = conjugate_1d(&g, &dual).unwrap();
        assert_eq!(t.dual, grid_sup(&g, &[dual]).unwrap().dual);
        assert!(t.is_convex(1e-12));
    }

    #[test]
    fn infinite_samples_end_the_domain() {
        // even extension of the ball indicator: conjugate is |s|
        let g = GridFunction::from_fn(vec![dyadic(-2.0, 2.0, 0.125)], |x| {
            if x[0].abs() <= 1.0 {
                ExtReal::ZERO
            } else {
                PosInf
            }
        })
        .unwrap();
        let dual = dyadic(-3.0, 3.0, 0.5);
        let t = conjugate_1d(&g, &dual).unwrap();
        for (s, v) in dual.iter().zip(t.dual.values()) {
            assert_eq!(*v, ExtReal::from(s.abs()));
        }
        assert_eq!(t.dual, grid_sup(&g, &[dual]).unwrap().dual);
    }

    #[test]
    fn all_infinite_rejected() {
        let g = GridFunction::new(vec![vec![0.0, 1.0]], vec![PosInf, PosInf]).unwrap();
        assert_eq!(conjugate_1d(&g, &[0.0]).unwrap_err(), Error::AllInfinite);
    }

    #[test]
    fn biconjugate_is_convex_hull() {
        let x = dyadic(-2.0, 2.0, 0.25);
        // nonconvex double well
        let g = GridFunction::from_fn(vec![x.clone()], |x| ExtReal::from((x[0] * x[0] - 1.0).powi(2))).unwrap();
        let dual = default_dual_grid(&g, 2001).unwrap();
        let t = conjugate_1d(&g, &dual).unwrap();
        let bi = biconjugate_1d(&t).unwrap();
        for (i, xi) in x.iter().enumerate() {
            let b = bi.value(i).to_f64();
            assert!(b <= g.value(i).to_f64() + 1e-12);
            if xi.abs() <= 1.0 {
                assert!(b.abs() < 1e-9, "{xi}: {b}");
            } else {
                assert!((b - g.value(i).to_f64()).abs() < 1e-9, "{xi}: {b}");
            }
        }
    }

    #[test]
    fn radial_conjugates() {
        let radii = dyadic(0.0, 8.0, 1.0 / 64.0);
        let dual = dyadic(0.0, 4.0, 0.25);
        let t = conjugate_radial(&OrliczIntegrand::power(1, 2.0).unwrap(), 0, &radii, &dual).unwrap();
        for (s, v) in dual.iter().zip(t.dual.values()) {
            assert!((v.to_f64() - s * s / 2.0).abs() <= 1.0 / 4096.0);
        }
        let radii = dyadic(0.0, 2.0, 1.0 / 64.0);
        let t = conjugate_radial(&OrliczIntegrand::ball(3), 0, &radii, &dual).unwrap();
        for (s, v) in dual.iter().zip(t.dual.values()) {
            assert_eq!(*v, ExtReal::from(*s));
        }
        let skew = OrliczIntegrand::custom(1, 1, "skew", false, Arc::new(|_, x| ExtReal::from(x[0])), None);
        assert!(matches!(conjugate_radial(&skew, 0, &radii, &dual), Err(Error::NotRadial(_))));
    }

    #[test]
    fn radial_exponential_matches_two_dimensional_sup() {
        let phi = OrliczIntegrand::exponential(2);
        let radii = dyadic(0.0, 4.0, 1.0 / 16.0);
        let dual_r = dyadic(0.0, 3.0, 0.5);
        let t = conjugate_radial(&phi, 0, &radii, &dual_r).unwrap();
        let axis = dyadic(-4.0, 4.0, 1.0 / 16.0);
        let g = GridFunction::from_fn(vec![axis.clone(), axis], |x| phi.eval(0, x)).unwrap();
        // along the first axis the 2-d grid contains the 1-d samples
        let two = grid_sup(&g, &[dual_r.clone(), vec![0.0]]).unwrap();
        for (a, b) in t.dual.values().iter().zip(two.dual.values()) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn numeric_conjugates_pass_axioms() {
        use crate::orlicz::check_axioms;
        let radii = dyadic(0.0, 64.0, 1.0 / 64.0);
        let dual = dyadic(0.0, 2048.0, 1.0 / 16.0);
        for phi in [OrliczIntegrand::power(1, 2.0).unwrap(), OrliczIntegrand::exponential(1)] {
            let c = numeric_conjugate(&phi, &radii, &dual).unwrap();
            let report = check_axioms(&c, &SampleGrid::standard(1)).unwrap();
            assert!(report.all_passed(), "{}: {report:?}", phi.label());
        }
    }

    #[test]
    fn quantitative_bounds() {
        let grid = SampleGrid::standard(1);
        for phi in [
            OrliczIntegrand::power(1, 2.0).unwrap(),
            OrliczIntegrand::abs(1),
            OrliczIntegrand::exponential(1),
            OrliczIntegrand::ball(1),
        ] {
            let b = quantitative_conjugate_bounds(&phi, 0, &grid).unwrap();
            assert!(b.verified(), "{}: {b:?}", phi.label());
        }
        let (worst, n) = verify_conjugate_upper(&OrliczIntegrand::power(1, 2.0).unwrap(), 0, &grid, 2.0, 1.0).unwrap();
        assert!(worst >= 0.0 && n > 0);
        // r too small for s
        let (worst, _) = verify_conjugate_upper(&OrliczIntegrand::power(1, 2.0).unwrap(), 0, &grid, 0.1, 1.0).unwrap();
        assert!(worst < 0.0);
    }

    #[test]
    fn subdifferential_examples() {
        let half_sq = OrliczIntegrand::power(1, 2.0).unwrap();
        assert!(subdifferential_check(&half_sq, 0, &[3.0], &[3.0], 1e-12).unwrap().member);
        let abs = OrliczIntegrand::abs(1);
        assert!(subdifferential_check(&abs, 0, &[0.0], &[0.5], 1e-12).unwrap().member);
        let r = subdifferential_check(&abs, 0, &[1.0], &[0.5], 1e-12).unwrap();
        assert!(!r.member);
        assert_eq!(r.gap, ExtReal::from(0.5));
    }

    #[test]
    fn lipschitz_cone() {
        let x = dyadic(-1.0, 1.0, 0.125);
        let g = GridFunction::from_fn(vec![x.clone()], |x| if x[0] == 0.0 { ExtReal::ZERO } else { PosInf }).unwrap();
        let f = lipschitz_regularize(&g, 2.0).unwrap();
        for (i, xi) in x.iter().enumerate() {
            assert_eq!(f.value(i), ExtReal::from(2.0 * xi.abs()));
        }
    }

    #[test]
    fn lipschitz_matches_oracle_and_increases() {
        let x = dyadic(-2.0, 2.0, 0.0625);
        let g = GridFunction::from_fn(vec![x.clone()], |x| {
            ExtReal::from(((x[0] * 16.0) as i64 * 7 % 11) as f64 / 4.0)
        })
        .unwrap();
        let mut prev = vec![f64::NEG_INFINITY; x.len()];
        for lambda in [0.5, 1.0, 4.0, 64.0] {
            let f = lipschitz_regularize(&g, lambda).unwrap();
            assert_eq!(f, crate::oracle::conjugate::lipschitz_envelope(&g, lambda).unwrap());
            for i in 0..x.len() {
                let fi = f.value(i).to_f64();
                assert!(fi <= g.value(i).to_f64() && fi >= prev[i]);
                prev[i] = fi;
                if i > 0 {
                    assert!((fi - f.value(i - 1).to_f64()).abs() <= lambda * (x[i] - x[i - 1]));
                }
            }
        }
        assert_eq!(prev, g.values().iter().map(|v| v.to_f64()).collect::<Vec<_>>());
    }
}
