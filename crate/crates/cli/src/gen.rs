//! Seeded random instances for the verification suites.

use orlicz_kit::charges::Charge;
use orlicz_kit::conjugation::GridFunction;
use orlicz_kit::duality::{FunctionalTriple, PointFunction};
use orlicz_kit::measure::Carrier;
use orlicz_kit::norms::SampledFunction;
use orlicz_kit::orlicz::OrliczIntegrand;
use orlicz_kit::ExtReal;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub type Rand = ChaCha8Rng;

/// `k / denom` for a uniform integer `k` with `lo ≤ k/denom ≤ hi`.
pub fn dyadic(rng: &mut Rand, lo: f64, hi: f64, denom: f64) -> f64 {
    let a = (lo * denom).ceil() as i64;
    let b = (hi * denom).floor() as i64;
    rng.gen_range(a..=b) as f64 / denom
}

#[derive(Debug, Clone, Copy, Default)]
pub struct WeightMix {
    pub zero: bool,
    pub infinite: bool,
}

fn weight(rng: &mut Rand, mix: WeightMix) -> ExtReal {
    let roll: f64 = rng.gen();
    if mix.infinite && roll < 0.15 {
        ExtReal::PosInf
    } else if mix.zero && roll > 0.85 {
        ExtReal::ZERO
    } else {
        ExtReal::from(dyadic(rng, 0.25, 4.0, 4.0))
    }
}

/// At least one weight is nonzero, as carriers require.
pub fn finite_carrier(rng: &mut Rand, n: usize, mix: WeightMix) -> Carrier {
    let mut w: Vec<ExtReal> = (0..n).map(|_| weight(rng, mix)).collect();
    if w.iter().all(|x| x.is_zero()) {
        w[0] = ExtReal::from(1.0);
    }
    Carrier::finite(w).expect("weights are valid")
}

/// Tail prefixes take positive weights only, so `mix.zero` is ignored.
pub fn tail_carrier(rng: &mut Rand, n: usize, mix: WeightMix) -> Carrier {
    let mix = WeightMix { zero: false, ..mix };
    let w = (0..n).map(|_| weight(rng, mix)).collect();
    Carrier::tail(w, dyadic(rng, 0.25, 2.0, 4.0)).expect("weights are valid")
}

/// A catalog integrand with `points` independently drawn profiles.
pub fn catalog_integrand(rng: &mut Rand, dim: usize, points: usize) -> OrliczIntegrand {
    match rng.gen_range(0..5) {
        0 => {
            let p = *[1.5, 2.0, 2.5, 3.0, 4.0].choose(rng).unwrap();
            OrliczIntegrand::power(dim, p).unwrap()
        }
        1 => OrliczIntegrand::abs(dim),
        2 => OrliczIntegrand::exponential(dim),
        3 => OrliczIntegrand::ball(dim),
        _ => {
            let ex: Vec<f64> = (0..points.max(1)).map(|_| dyadic(rng, 1.25, 4.0, 4.0)).collect();
            OrliczIntegrand::variable_exponent(dim, &ex).unwrap()
        }
    }
}

/// Values uniform in `[−scale, scale]^dim`; on tail carriers the eventual
/// value is drawn too unless `eventually_zero`.
pub fn function(rng: &mut Rand, carrier: &Carrier, dim: usize, scale: f64, eventually_zero: bool) -> SampledFunction {
    let mut draw = || -> Vec<f64> { (0..dim).map(|_| rng.gen_range(-scale..=scale)).collect() };
    let values = (0..carrier.len()).map(|_| draw()).collect();
    let eventual = (carrier.is_tail() && !eventually_zero).then(&mut draw);
    SampledFunction::new(carrier.clone(), values, eventual).unwrap()
}

pub fn charge(rng: &mut Rand, carrier: &Carrier) -> Charge {
    let masses = (0..carrier.len()).map(|_| dyadic(rng, -4.0, 4.0, 8.0)).collect();
    let lambda = if carrier.is_tail() { dyadic(rng, -4.0, 4.0, 8.0) } else { 0.0 };
    Charge::new(carrier.clone(), masses, lambda).unwrap()
}

/// Dyadic axis `lo, lo + h, …, hi`.
pub fn axis(lo: f64, hi: f64, h: f64) -> Vec<f64> {
    let n = ((hi - lo) / h).round() as usize;
    (0..=n).map(|k| lo + k as f64 * h).collect()
}

/// A convex 1-D grid function: max of a few dyadic affine pieces plus a
/// quadratic, occasionally `+∞` near one end.
pub fn convex_grid(rng: &mut Rand, n: usize) -> GridFunction {
    let h = 1.0 / 8.0;
    let lo = -(n as f64 / 2.0).floor() * h;
    let xs: Vec<f64> = (0..n).map(|k| lo + k as f64 * h).collect();
    let pieces: Vec<(f64, f64)> = (0..rng.gen_range(1..4))
        .map(|_| (dyadic(rng, -4.0, 4.0, 4.0), dyadic(rng, -2.0, 2.0, 4.0)))
        .collect();
    let a = dyadic(rng, 0.0, 2.0, 4.0);
    let cut = rng.gen_bool(0.3).then(|| rng.gen_range(n / 2..n));
    let values = xs
        .iter()
        .enumerate()
        .map(|(k, x)| {
            if cut.is_some_and(|c| k > c) {
                return ExtReal::PosInf;
            }
            let aff = pieces.iter().map(|(s, b)| s * x + b).fold(f64::NEG_INFINITY, f64::max);
            ExtReal::from(aff + a * x * x)
        })
        .collect();
    GridFunction::new(vec![xs], values).unwrap()
}

/// Arbitrary (not necessarily convex) 1-D samples.
pub fn rough_grid(rng: &mut Rand, n: usize) -> GridFunction {
    let xs = axis(-2.0, -2.0 + (n - 1) as f64 / 4.0, 0.25);
    let values = (0..n)
        .map(|_| {
            if rng.gen_bool(0.1) {
                ExtReal::PosInf
            } else {
                ExtReal::from(dyadic(rng, -4.0, 4.0, 16.0))
            }
        })
        .collect();
    let mut g = GridFunction::new(vec![xs.clone()], values).unwrap();
    if g.values().iter().all(|v| !v.is_finite()) {
        g = GridFunction::from_fn(vec![xs], |_| ExtReal::ZERO).unwrap();
    }
    g
}

/// Quadratic point function `a‖x − c‖² + k` whose minimiser is on the
/// dyadic search grid of step 1/4.
pub fn quadratic(rng: &mut Rand, dim: usize, offset: f64) -> PointFunction {
    PointFunction::Quadratic {
        center: (0..dim).map(|_| dyadic(rng, -1.5, 1.5, 4.0)).collect(),
        curvature: dyadic(rng, 0.25, 2.0, 4.0),
        offset,
    }
}

/// A catalog point function with `inf = 0` attained at the origin, as the
/// interchange hypothesis requires at infinite atoms.
pub fn anchored(rng: &mut Rand, dim: usize) -> PointFunction {
    match rng.gen_range(0..3) {
        0 => PointFunction::Quadratic {
            center: vec![0.0; dim],
            curvature: dyadic(rng, 0.25, 2.0, 4.0),
            offset: 0.0,
        },
        1 => PointFunction::TiltedAbs { b: 0.0 },
        _ => PointFunction::BallLinear {
            radius: dyadic(rng, 0.5, 1.5, 4.0),
            tilt: vec![0.0; dim],
        },
    }
}

/// Any catalog point function, minimum attained on the search grid.
pub fn point_function(rng: &mut Rand, dim: usize) -> PointFunction {
    match rng.gen_range(0..3) {
        0 => {
            let offset = dyadic(rng, -2.0, 2.0, 4.0);
            quadratic(rng, dim, offset)
        }
        1 => PointFunction::TiltedAbs {
            b: dyadic(rng, -2.0, 2.0, 4.0),
        },
        _ => PointFunction::BallLinear {
            radius: 1.0,
            tilt: (0..dim).map(|k| if k == 0 { dyadic(rng, -2.0, 2.0, 4.0) } else { 0.0 }).collect(),
        },
    }
}

/// A random three-part functional consistent with `carrier`.
pub fn triple(rng: &mut Rand, carrier: &Carrier, dim: usize) -> FunctionalTriple {
    let mut t = FunctionalTriple::zero(carrier, dim);
    for i in 0..carrier.len() {
        let v: Vec<f64> = (0..dim).map(|_| dyadic(rng, -4.0, 4.0, 4.0)).collect();
        match carrier.weight(i) {
            ExtReal::PosInf => t.diffuse[i] = v,
            w if w > ExtReal::ZERO => t.density[i] = v,
            _ => {}
        }
    }
    if carrier.is_tail() {
        t.pfa = Some((0..dim).map(|_| dyadic(rng, -4.0, 4.0, 4.0)).collect());
    }
    t
}
