//! Verification suites run by `verify`.
//!
//! Every suite draws its instances from its own random stream, so results
//! do not depend on which other suites run or in what order they finish.

use orlicz_kit::charges::{de_giorgi, de_giorgi_signed, hewitt_yosida, jordan, Charge};
use orlicz_kit::conjugation::{
    biconjugate_1d, conjugate_1d, default_dual_grid, lipschitz_regularize, numeric_conjugate,
    quantitative_conjugate_bounds, subdifferential_check, GridFunction,
};
use orlicz_kit::duality::{
    canonical_probes, decompose_functional, dual_norm_agreement, integral_conjugate, integral_subdifferential,
    interchange, reflexivity_linearity_check, Integrand, InterchangeOptions, PointFunction,
};
use orlicz_kit::measure::{Carrier, MSet};
use orlicz_kit::norms::{
    amemiya_norm, embedding_constants, hoelder, luxemburg_norm, modular_norm_inequalities, SampledFunction,
};
use orlicz_kit::oracle::charges::{de_giorgi_brute_force, positive_part_by_sup, total_variation_by_partitions};
use orlicz_kit::oracle::conjugate::{grid_sup, lipschitz_envelope};
use orlicz_kit::orlicz::{check_axioms, coercivity_equivalence, delta2, Delta2Certificate, OrliczIntegrand, SampleGrid};
use orlicz_kit::{rng, ExtReal, Result};
use rand::Rng;
use std::time::Instant;

use crate::gen::{self, Rand, WeightMix};
use crate::report::Record;

pub struct Suite {
    pub name: &'static str,
    pub about: &'static str,
    run: fn(&mut Ctx) -> Result<()>,
}

/// Suites in declared order.
pub const SUITES: &[Suite] = &[
    Suite {
        name: "measure",
        about: "carrier measures, integral conventions, point classes",
        run: measure,
    },
    Suite {
        name: "charges",
        about: "Jordan decomposition against partition and subset oracles",
        run: charges,
    },
    Suite {
        name: "orlicz",
        about: "Orlicz axioms and coercivity equivalences for the catalog",
        run: orlicz,
    },
    Suite {
        name: "norms",
        about: "Luxemburg and Amemiya norms, modular inequalities, Hölder, embeddings",
        run: norms,
    },
    Suite {
        name: "conjugation",
        about: "linear-time conjugates, biconjugates, conjugate growth bounds",
        run: conjugation,
    },
    Suite {
        name: "interchange",
        about: "infimum of integral functionals and integral conjugates",
        run: interchange_suite,
    },
    Suite {
        name: "subdiff",
        about: "subdifferentials of integral functionals",
        run: subdiff,
    },
    Suite {
        name: "degiorgi",
        about: "de Giorgi decomposition against the sup-formula oracle",
        run: degiorgi,
    },
    Suite {
        name: "hewitt-yosida",
        about: "Hewitt–Yosida decomposition on tail carriers",
        run: hewitt_yosida_suite,
    },
    Suite {
        name: "delta2",
        about: "Δ₂ classification of catalog integrands",
        run: delta2_suite,
    },
    Suite {
        name: "dual-norm",
        about: "operator norm against the dual Amemiya norm",
        run: dual_norm,
    },
    Suite {
        name: "functional",
        about: "three-part decomposition of linear functionals",
        run: functional,
    },
    Suite {
        name: "lipschitz",
        about: "Lipschitz regularisation of grid functions",
        run: lipschitz,
    },
    Suite {
        name: "reflexivity",
        about: "Δ₂ certificates against domain linearity",
        run: reflexivity,
    },
];

pub fn find(name: &str) -> Option<(usize, &'static Suite)> {
    SUITES.iter().enumerate().find(|(_, s)| s.name == name)
}

pub struct Ctx {
    pub tol: f64,
    pub rng: Rand,
    records: Vec<Record>,
    /// Start of the current check, when timings are recorded.
    clock: Option<Instant>,
}

impl Ctx {
    fn push(&mut self, mut r: Record) {
        if let Some(t) = self.clock.as_mut() {
            r.ms = t.elapsed().as_millis() as u64;
            *t = Instant::now();
        }
        self.records.push(r);
    }

    fn check(&mut self, name: &str, anchor: &'static str, slack: f64) {
        self.push(Record::new(name, anchor, slack, self.tol));
    }

    fn flag(&mut self, name: &str, anchor: &'static str, ok: bool) {
        self.push(Record::flag(name, anchor, ok, self.tol));
    }
}

/// Runs suite `index` with its own stream of `seed`. Wall-clock times are
/// recorded only when `timings` is set, so default reports are reproducible
/// byte for byte.
pub fn run(index: usize, seed: u64, tol: f64, timings: bool) -> Result<Vec<Record>> {
    let mut ctx = Ctx {
        tol,
        rng: rng::stream(seed, index as u64 + 1),
        records: Vec::new(),
        clock: timings.then(Instant::now),
    };
    (SUITES[index].run)(&mut ctx)?;
    Ok(ctx.records)
}

/// `−|a − b| / max(1, |b|)`.
fn rel_err(a: f64, b: f64) -> f64 {
    -(a - b).abs() / b.abs().max(1.0)
}

fn ext_err(a: ExtReal, b: ExtReal) -> f64 {
    match (a.finite(), b.finite()) {
        (Some(x), Some(y)) => rel_err(x, y),
        _ if a == b => 0.0,
        _ => -1.0,
    }
}

/// `−max |a_i − b_i|`, treating equal infinities as equal.
fn table_err(a: &[ExtReal], b: &[ExtReal]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| match (x.finite(), y.finite()) {
            (Some(p), Some(q)) => -(p - q).abs(),
            _ if x == y => 0.0,
            _ => f64::NEG_INFINITY,
        })
        .fold(0.0, f64::min)
}

fn charge_err(a: &Charge, b: &Charge) -> f64 {
    let n = a.masses().len().max(b.masses().len());
    let masses = (0..n).map(|i| (a.mass(i) - b.mass(i)).abs()).fold(0.0, f64::max);
    -masses.max((a.lambda() - b.lambda()).abs())
}

fn measure(ctx: &mut Ctx) -> Result<()> {
    let c = Carrier::finite(vec![ExtReal::ZERO, ExtReal::PosInf, ExtReal::from(1.0)])?;
    let zero_times_inf = c.integrate(&[ExtReal::PosInf, ExtReal::ZERO, ExtReal::from(2.0)], None)? == ExtReal::from(2.0);
    let inf_minus_inf = c.integrate(&[ExtReal::ZERO, ExtReal::from(1.0), ExtReal::NegInf], None)? == ExtReal::PosInf;
    ctx.flag("measure.conventions", "integral conventions 0·∞ = 0 and ∞ − ∞ = ∞", zero_times_inf && inf_minus_inf);

    let mut worst = 0.0f64;
    let mut classes_ok = true;
    for _ in 0..60 {
        let n = ctx.rng.gen_range(1..10);
        let mix = WeightMix {
            zero: true,
            infinite: true,
        };
        let c = if ctx.rng.gen_bool(0.5) {
            gen::finite_carrier(&mut ctx.rng, n, mix)
        } else {
            gen::tail_carrier(&mut ctx.rng, n, mix)
        };
        let pick = |rng: &mut Rand| -> MSet {
            let pts: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
            MSet::from_points(pts)
        };
        let a = pick(&mut ctx.rng);
        let b = c.complement(&a).intersect(&pick(&mut ctx.rng));
        let b = if c.is_tail() && ctx.rng.gen_bool(0.5) { c.complement(&a) } else { b };
        let lhs = c.measure(&a.union(&b))?;
        let rhs = c.measure(&a)? + c.measure(&b)?;
        worst = worst.min(ext_err(lhs, rhs));
        if !c.is_tail() {
            let k = c.classify_points()?;
            classes_ok &= k.infinite_atoms.iter().all(|i| c.weight(*i) == ExtReal::PosInf)
                && k.null.iter().all(|i| c.weight(*i) == ExtReal::ZERO)
                && k.null.len() + k.finite_atoms.len() + k.infinite_atoms.len() == n;
        }
    }
    ctx.check("measure.additivity", "finite additivity of the carrier measure", worst);
    ctx.flag("measure.point-classes", "atoms of finite and infinite measure", classes_ok);
    Ok(())
}

fn charges(ctx: &mut Ctx) -> Result<()> {
    let (mut additivity, mut partitions, mut positive) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..40 {
        let n = ctx.rng.gen_range(1..8);
        let c = gen::finite_carrier(&mut ctx.rng, n, WeightMix::default());
        let nu = gen::charge(&mut ctx.rng, &c);
        let j = jordan(&nu);
        additivity = additivity.min(rel_err(j.positive.norm() + j.negative.norm(), nu.norm()));
        partitions = partitions.min(rel_err(j.total_variation, total_variation_by_partitions(&nu)?));
        let sup = positive_part_by_sup(&nu)?;
        let sets: Vec<MSet> = c.subsets()?.collect();
        for (s, v) in sets.iter().zip(&sup) {
            positive = positive.min(rel_err(j.positive.evaluate(s)?, *v));
        }
    }
    ctx.check("charges.jordan-additivity", "Jordan decomposition splits the total variation", additivity);
    ctx.check("charges.total-variation", "total variation as a supremum over partitions", partitions);
    ctx.check("charges.positive-part", "positive part as a supremum over subsets", positive);
    Ok(())
}

fn catalog(dim: usize) -> Vec<OrliczIntegrand> {
    vec![
        OrliczIntegrand::power(dim, 1.5).unwrap(),
        OrliczIntegrand::power(dim, 3.0).unwrap(),
        OrliczIntegrand::abs(dim),
        OrliczIntegrand::exponential(dim),
        OrliczIntegrand::ball(dim),
        OrliczIntegrand::variable_exponent(dim, &[2.0, 4.0]).unwrap(),
    ]
}

fn orlicz(ctx: &mut Ctx) -> Result<()> {
    let mut axioms = true;
    let mut coercive = true;
    for dim in [1, 2] {
        let grid = SampleGrid::standard(dim);
        for phi in catalog(dim) {
            axioms &= check_axioms(&phi, &grid)?.all_passed();
            for point in 0..phi.point_count() {
                coercive &= coercivity_equivalence(&phi, point, &grid)?.agree();
            }
        }
    }
    ctx.flag("orlicz.axioms", "axioms of an Orlicz integrand", axioms);
    ctx.flag("orlicz.coercivity", "equivalent forms of coercivity", coercive);
    Ok(())
}

fn norms(ctx: &mut Ctx) -> Result<()> {
    let tol = ctx.tol;
    let (mut sandwich, mut lemma, mut bracket, mut hold) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..150 {
        let n = ctx.rng.gen_range(1..6);
        let dim = ctx.rng.gen_range(1..3);
        let mix = WeightMix {
            zero: true,
            infinite: true,
        };
        let c = if ctx.rng.gen_bool(0.3) {
            gen::tail_carrier(&mut ctx.rng, n, mix)
        } else {
            gen::finite_carrier(&mut ctx.rng, n, mix)
        };
        let phi = gen::catalog_integrand(&mut ctx.rng, dim, n + 1);
        let scale = 10f64.powf(ctx.rng.gen_range(-1.0..1.0));
        let eventually_zero = ctx.rng.gen_bool(0.5);
        let u = gen::function(&mut ctx.rng, &c, dim, scale, eventually_zero);
        let lux = luxemburg_norm(&phi, &u, tol)?;
        let ame = amemiya_norm(&phi, &u, tol)?;
        bracket = bracket.min(-lux.width() / lux.to_f64().max(1.0));
        if let (Some(l), Some(a)) = (lux.value.finite(), ame.value.finite()) {
            let s = l.max(1.0);
            sandwich = sandwich.min((a - l) / s).min((2.0 * l - a) / s);
        }
        let r = modular_norm_inequalities(&phi, &u, tol)?;
        lemma = lemma.min(if r.holds() { 0.0 } else { -1.0 });
        let v = gen::function(&mut ctx.rng, &c, dim, scale, true);
        let h = hoelder(&phi, &u, &v, tol)?;
        if let (Some(l), Some(r)) = (h.lhs.finite(), h.rhs.finite()) {
            hold = hold.min((r - l) / r.max(1.0));
        }
    }
    ctx.check("norms.luxemburg-bracket", "Luxemburg norm as a Minkowski functional", bracket);
    ctx.check("norms.sandwich", "Luxemburg and Amemiya norms agree within factor 2", sandwich);
    ctx.check("norms.modular-lemma", "modular against norm above and below the unit sphere", lemma);
    ctx.check("norms.hoelder", "Hölder inequality with constant 2", hold);

    let mut lp = 0.0f64;
    for _ in 0..60 {
        let n = ctx.rng.gen_range(1..6);
        let c = gen::finite_carrier(&mut ctx.rng, n, WeightMix::default());
        let p = gen::dyadic(&mut ctx.rng, 1.25, 4.0, 4.0);
        let phi = OrliczIntegrand::power(1, p)?;
        let u = gen::function(&mut ctx.rng, &c, 1, 3.0, true);
        let exact = (0..n)
            .map(|i| c.weight(i).to_f64() * u.values()[i][0].abs().powf(p) / p)
            .sum::<f64>()
            .powf(1.0 / p);
        lp = lp.min(rel_err(luxemburg_norm(&phi, &u, tol)?.to_f64(), exact));
    }
    ctx.check("norms.lp", "Luxemburg norm of power integrands", lp);

    // x² on two unit weights with u = v = (3, 4): Hölder is tight
    let two = Carrier::finite_f64(&[1.0, 1.0])?;
    let sq = OrliczIntegrand::power(1, 2.0)?.with_scales(&[2.0])?;
    let u = SampledFunction::scalar(two, &[3.0, 4.0])?;
    let h = hoelder(&sq, &u, &u, tol)?;
    ctx.check("norms.hoelder-equality", "Hölder inequality with constant 2", ext_err(h.lhs, h.rhs));

    let mut embed = 0.0f64;
    for _ in 0..8 {
        let n = ctx.rng.gen_range(1..5);
        let c = gen::finite_carrier(&mut ctx.rng, n, WeightMix::default());
        let phi = gen::catalog_integrand(&mut ctx.rng, 1, n);
        let eps = *[1.0, 0.5, 0.25].get(ctx.rng.gen_range(0..3)).unwrap();
        let r = embedding_constants(&phi, &c, eps, 6, &mut ctx.rng)?;
        embed = embed.min(r.worst_slack);
    }
    ctx.check("norms.embedding", "embeddings of L∞ into L_φ into L1 on Ω_ε", embed);
    Ok(())
}

fn conjugation(ctx: &mut Ctx) -> Result<()> {
    let (mut exact, mut bic) = (0.0f64, 0.0f64);
    for k in 0..40 {
        let n = ctx.rng.gen_range(2..40);
        let g = if k % 2 == 0 {
            gen::rough_grid(&mut ctx.rng, n)
        } else {
            gen::convex_grid(&mut ctx.rng, n)
        };
        let dual = gen::axis(-6.0, 6.0, 0.125);
        let fast = conjugate_1d(&g, &dual)?;
        let slow = grid_sup(&g, &[dual])?;
        exact = exact.min(table_err(fast.dual.values(), slow.dual.values()));
        if k % 2 == 1 {
            let t = conjugate_1d(&g, &default_dual_grid(&g, 4 * n)?)?;
            let back = biconjugate_1d(&t)?;
            let h = g.step();
            let err = table_err(back.values(), g.values());
            bic = bic.min(if err.is_finite() { (err + h * h).min(0.0) } else { err });
        }
    }
    ctx.check("conjugation.linear-time", "Fenchel conjugate by the linear-time transform", exact);
    ctx.check("conjugation.biconjugate", "biconjugate recovers a closed convex function", bic);

    let radii = gen::axis(0.0, 64.0, 1.0 / 64.0);
    let dual_radii = gen::axis(0.0, 2048.0, 1.0 / 16.0);
    let grid = SampleGrid::standard(1);
    let mut numeric = true;
    let mut bounds = true;
    let mut sub = true;
    for phi in catalog(1) {
        let nc = numeric_conjugate(&phi, &radii, &dual_radii)?;
        numeric &= check_axioms(&nc, &grid)?.all_passed();
        for point in 0..phi.point_count() {
            bounds &= quantitative_conjugate_bounds(&phi, point, &grid)?.verified();
            // the derivative at 1/2 is a subgradient there; a shifted slope is not
            let x = 0.5;
            let h = 1e-5;
            let at = |r: f64| phi.eval(point, &[r]).to_f64();
            let slope = (at(x + h) - at(x - h)) / (2.0 * h);
            sub &= subdifferential_check(&phi, point, &[x], &[slope], 1e-6)?.member;
            sub &= !subdifferential_check(&phi, point, &[x], &[slope + 1.0], 1e-6)?.member;
        }
    }
    ctx.flag("conjugation.numeric-axioms", "conjugate of an Orlicz integrand is Orlicz", numeric);
    ctx.flag("conjugation.growth-bounds", "growth bounds linking φ and φ*", bounds);
    ctx.flag("conjugation.fenchel-young", "Fenchel–Young characterisation of subgradients", sub);
    Ok(())
}

fn interchange_suite(ctx: &mut Ctx) -> Result<()> {
    let tol = ctx.tol;
    let mut worst = 0.0f64;
    let mut characterized = true;
    let mut conj = 0.0f64;
    for k in 0..40 {
        let dim = if k % 4 == 3 { 2 } else { 1 };
        let n = ctx.rng.gen_range(1..if dim == 1 { 17 } else { 7 });
        let mix = WeightMix {
            zero: true,
            infinite: true,
        };
        let c = if ctx.rng.gen_bool(0.3) {
            gen::tail_carrier(&mut ctx.rng, n, mix)
        } else {
            gen::finite_carrier(&mut ctx.rng, n, mix)
        };
        let slots = n + usize::from(c.is_tail());
        let fs: Vec<PointFunction> = (0..slots)
            .map(|i| {
                // infinite atoms and the tail need a nonnegative infimum
                if i == n || c.weight(i) == ExtReal::PosInf {
                    gen::anchored(&mut ctx.rng, dim)
                } else {
                    gen::point_function(&mut ctx.rng, dim)
                }
            })
            .collect();
        let f = Integrand::new(c.clone(), dim, fs)?;
        let axes = vec![gen::axis(-2.0, 2.0, 0.25); dim];
        let opts = InterchangeOptions {
            seed: ctx.rng.gen(),
            restarts: 8,
            anchor: None,
            tol,
        };
        let r = interchange(&f, &axes, &opts)?;
        worst = worst.min(ext_err(r.lhs, r.rhs)).min(ext_err(r.lhs_joint, r.rhs));
        characterized &= r.hypothesis_holds && r.minimizer_characterized != Some(false);

        if dim == 1 && !c.is_tail() && c.weights().iter().all(|w| w.is_finite()) {
            let q: Vec<PointFunction> = (0..n)
                .map(|_| PointFunction::Quadratic {
                    center: vec![gen::dyadic(&mut ctx.rng, -1.5, 1.5, 4.0)],
                    curvature: [0.25, 0.5, 1.0, 2.0][ctx.rng.gen_range(0..4)],
                    offset: 0.0,
                })
                .collect();
            let f = Integrand::new(c.clone(), 1, q)?;
            // slopes chosen so the tilted minimisers stay on the grid
            let v: Vec<f64> = (0..n).map(|_| gen::dyadic(&mut ctx.rng, -1.0, 1.0, 4.0)).collect();
            let v = SampledFunction::scalar(c.clone(), &v)?;
            let axes = vec![gen::axis(-4.0, 4.0, 1.0 / 64.0)];
            let r = integral_conjugate(&f, &v, &axes, &opts)?;
            conj = conj.min(ext_err(r.via_interchange, r.via_pointwise));
        }
    }
    ctx.check("interchange.identity", "infimum of an integral functional equals the integral of pointwise infima", worst);
    ctx.flag("interchange.minimizers", "minimisers attain the pointwise infimum almost everywhere", characterized);
    ctx.check("interchange.conjugate", "conjugate of an integral functional is the integral of conjugates", conj);

    // a negative minimum at an infinite atom violates the hypothesis
    let c = Carrier::finite(vec![ExtReal::from(1.0), ExtReal::PosInf])?;
    let f = Integrand::new(
        c,
        1,
        vec![
            PointFunction::TiltedAbs { b: 0.0 },
            PointFunction::Quadratic {
                center: vec![1.0],
                curvature: 1.0,
                offset: -1.0,
            },
        ],
    )?;
    let r = interchange(&f, &[gen::axis(-2.0, 2.0, 0.25)], &InterchangeOptions::default())?;
    ctx.flag(
        "interchange.hypothesis-break",
        "nonnegativity at infinite atoms is needed for the interchange",
        !r.hypothesis_holds && !r.agree && r.rhs == ExtReal::NegInf,
    );
    Ok(())
}

fn subdiff(ctx: &mut Ctx) -> Result<()> {
    let mut agree = true;
    let mut members = 0;
    for _ in 0..60 {
        let n = ctx.rng.gen_range(1..6);
        let c = gen::finite_carrier(
            &mut ctx.rng,
            n,
            WeightMix {
                zero: true,
                infinite: false,
            },
        );
        let fs: Vec<PointFunction> = (0..n).map(|_| gen::point_function(&mut ctx.rng, 1)).collect();
        let f = Integrand::new(c.clone(), 1, fs.clone())?;
        let u: Vec<f64> = (0..n).map(|_| gen::dyadic(&mut ctx.rng, -1.0, 1.0, 4.0)).collect();
        let v: Vec<f64> = (0..n)
            .map(|i| {
                // half the time a genuine subgradient
                if ctx.rng.gen_bool(0.5) {
                    subgradient(&fs[i], u[i]).unwrap_or(0.0)
                } else {
                    gen::dyadic(&mut ctx.rng, -2.0, 2.0, 4.0)
                }
            })
            .collect();
        let r = integral_subdifferential(
            &f,
            &SampledFunction::scalar(c.clone(), &u)?,
            &SampledFunction::scalar(c, &v)?,
            1e-9,
        )?;
        agree &= r.agree;
        members += usize::from(r.member_pointwise);
    }
    ctx.flag("subdiff.representation", "subdifferential of an integral functional is taken pointwise", agree);
    ctx.flag("subdiff.coverage", "subdifferential of an integral functional is taken pointwise", members > 0 && members < 60);
    Ok(())
}

/// A subgradient of a 1-D catalog function at `x`, if one is known.
fn subgradient(f: &PointFunction, x: f64) -> Option<f64> {
    match f {
        PointFunction::Quadratic { center, curvature, .. } => Some(2.0 * curvature * (x - center[0])),
        PointFunction::TiltedAbs { .. } => Some(if x > 0.0 {
            1.0
        } else if x < 0.0 {
            -1.0
        } else {
            0.5
        }),
        PointFunction::BallLinear { radius, tilt } => {
            if x.abs() < *radius {
                Some(tilt[0])
            } else if x.abs() == *radius {
                Some(tilt[0] + x.signum())
            } else {
                None
            }
        }
        _ => None,
    }
}

fn degiorgi(ctx: &mut Ctx) -> Result<()> {
    let (mut fast, mut additive, mut commute) = (0.0f64, 0.0f64, 0.0f64);
    for k in 0..40 {
        let n = ctx.rng.gen_range(1..if k % 2 == 0 { 9 } else { 13 });
        let mu = gen::finite_carrier(
            &mut ctx.rng,
            n,
            WeightMix {
                zero: true,
                infinite: true,
            },
        );
        let masses: Vec<f64> = (0..n).map(|_| gen::dyadic(&mut ctx.rng, 0.0, 4.0, 8.0)).collect();
        let nu = Charge::point_masses(Carrier::finite_f64(&vec![1.0; n])?, masses)?;
        let parts = de_giorgi(&nu, &mu)?;
        let tables = de_giorgi_brute_force(&nu, &mu)?;
        let carrier = nu.carrier().clone();
        for (mask, s) in carrier.subsets()?.enumerate() {
            fast = fast
                .min(-(parts.absolutely_continuous.evaluate(&s)? - tables.absolutely_continuous[mask]).abs())
                .min(-(parts.diffuse.evaluate(&s)? - tables.diffuse[mask]).abs())
                .min(-(parts.singular.evaluate(&s)? - tables.singular[mask]).abs());
            if n <= 8 {
                let sub = de_giorgi(&nu.restrict(&s)?, &mu)?;
                commute = commute
                    .min(charge_err(&sub.absolutely_continuous, &parts.absolutely_continuous.restrict(&s)?))
                    .min(charge_err(&sub.diffuse, &parts.diffuse.restrict(&s)?))
                    .min(charge_err(&sub.singular, &parts.singular.restrict(&s)?));
            }
        }
        let [a, d, s] = parts.norms();
        additive = additive.min(-(nu.norm() - (a + d + s)).abs());

        let signed = gen::charge(&mut ctx.rng, &carrier);
        let sp = de_giorgi_signed(&signed, &mu)?;
        additive = additive.min(charge_err(&sp.sum()?, &signed));
    }
    ctx.check("degiorgi.oracle", "de Giorgi decomposition by its sup formulas", fast);
    ctx.check("degiorgi.additivity", "de Giorgi parts split the total variation", additive);
    ctx.check("degiorgi.restriction", "de Giorgi decomposition commutes with restriction", commute);
    Ok(())
}

fn hewitt_yosida_suite(ctx: &mut Ctx) -> Result<()> {
    let (mut additive, mut commute) = (0.0f64, 0.0f64);
    for _ in 0..40 {
        let n = ctx.rng.gen_range(0..8);
        let c = gen::tail_carrier(&mut ctx.rng, n, WeightMix::default());
        let nu = gen::charge(&mut ctx.rng, &c);
        let hy = hewitt_yosida(&nu)?;
        additive = additive.min(-(nu.norm() - hy.sigma_additive.norm() - hy.purely_finitely_additive.norm()).abs());
        for s in c.tail_test_sets(n.min(6) + 1)? {
            let sub = hewitt_yosida(&nu.restrict(&s)?)?;
            commute = commute
                .min(charge_err(&sub.sigma_additive, &hy.sigma_additive.restrict(&s)?))
                .min(charge_err(&sub.purely_finitely_additive, &hy.purely_finitely_additive.restrict(&s)?));
        }
    }
    ctx.check("hewitt-yosida.additivity", "Hewitt–Yosida parts split the total variation", additive);
    ctx.check("hewitt-yosida.restriction", "Hewitt–Yosida decomposition commutes with restriction", commute);
    Ok(())
}

fn delta2_suite(ctx: &mut Ctx) -> Result<()> {
    let grid = SampleGrid::standard(1);
    let c = Carrier::finite_f64(&[1.0, 2.0])?;
    let mut power = 0.0f64;
    for p in [1.5, 2.0, 3.0, 4.0] {
        let phi = OrliczIntegrand::power(1, p)?;
        power = power.min(match delta2(&phi, &c, &grid, 1e3)? {
            Delta2Certificate::Holds { k, .. } => rel_err(k, 2f64.powf(p)),
            _ => -1.0,
        });
    }
    ctx.check("delta2.power", "Δ₂ condition for power integrands", power);
    let exp = matches!(
        delta2(&OrliczIntegrand::exponential(1), &c, &grid, 1e3)?,
        Delta2Certificate::FailsWithWitness { ratio, .. } if ratio > 1e3
    );
    ctx.flag("delta2.exponential", "the exponential integrand violates Δ₂", exp);
    let var = match delta2(&OrliczIntegrand::variable_exponent(1, &[2.0, 4.0])?, &c, &grid, 1e3)? {
        Delta2Certificate::Holds { k, .. } => rel_err(k, 16.0),
        _ => -1.0,
    };
    ctx.check("delta2.variable-exponent", "Δ₂ condition for variable exponents", var);
    Ok(())
}

fn dual_norm(ctx: &mut Ctx) -> Result<()> {
    let tol = ctx.tol.max(1e-7);
    let mut worst = 0.0f64;
    let mut oracle = 0.0f64;
    for k in 0..12 {
        let n = if k % 2 == 0 { 2 } else { ctx.rng.gen_range(1..4) };
        let c = gen::finite_carrier(&mut ctx.rng, n, WeightMix::default());
        let phi = match k % 4 {
            0 => OrliczIntegrand::power(1, gen::dyadic(&mut ctx.rng, 1.25, 4.0, 4.0))?,
            1 => OrliczIntegrand::exponential(1),
            2 => OrliczIntegrand::abs(1),
            _ => OrliczIntegrand::variable_exponent(1, &[1.5, 3.0])?,
        };
        let v = gen::function(&mut ctx.rng, &c, 1, 3.0, true);
        let r = dual_norm_agreement(&phi, &v, tol, k)?;
        let a = r.amemiya.to_f64();
        worst = worst.min(rel_err(r.operator_norm, a));
        if let Some(o) = r.oracle {
            oracle = oracle.min(rel_err(o, a));
        }
    }
    ctx.check("dual-norm.ascent", "Amemiya norm of φ* is the operator norm on L_φ", worst);
    ctx.check("dual-norm.oracle", "Amemiya norm of φ* is the operator norm on L_φ", oracle);
    Ok(())
}

fn functional(ctx: &mut Ctx) -> Result<()> {
    let (mut recover, mut charges, mut norms) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..20 {
        let n = ctx.rng.gen_range(1..6);
        let dim = ctx.rng.gen_range(1..3);
        let mix = WeightMix {
            zero: true,
            infinite: true,
        };
        let c = if ctx.rng.gen_bool(0.6) {
            gen::tail_carrier(&mut ctx.rng, n, mix)
        } else {
            gen::finite_carrier(&mut ctx.rng, n, mix)
        };
        let t = gen::triple(&mut ctx.rng, &c, dim);
        let d = decompose_functional(|u| t.apply(u), &c, dim, &canonical_probes(&c, dim))?;
        recover = recover.min(if d.triple == t { 0.0 } else { -1.0 }).min(-d.residual);
        charges = charges.min(-d.charge_mismatch);
        let closed = t.density_norm(&c) + t.diffuse_norm() + t.pfa_norm();
        norms = norms
            .min(rel_err(d.norms.total, closed))
            .min(rel_err(d.norms.attained, closed))
            .min((1.0 - d.norms.maximizer_norm).min(0.0));
    }
    ctx.check("functional.recovery", "unique three-part decomposition of a functional", recover);
    ctx.check("functional.charges", "the charge of a functional and its decomposition", charges);
    ctx.check("functional.norms", "norm of a functional is the sum of its parts' norms", norms);
    Ok(())
}

fn lipschitz(ctx: &mut Ctx) -> Result<()> {
    let (mut bound, mut monotone, mut oracle) = (0.0f64, true, 0.0f64);
    for _ in 0..40 {
        let n = ctx.rng.gen_range(2..40);
        let g = gen::rough_grid(&mut ctx.rng, n);
        let l1 = gen::dyadic(&mut ctx.rng, 0.25, 4.0, 4.0);
        let l2 = l1 + gen::dyadic(&mut ctx.rng, 0.25, 4.0, 4.0);
        let e1 = lipschitz_regularize(&g, l1)?;
        let e2 = lipschitz_regularize(&g, l2)?;
        oracle = oracle.min(table_err(e1.values(), lipschitz_envelope(&g, l1)?.values()));
        bound = bound.min(lipschitz_slack(&e1, l1));
        monotone &= e1.values().iter().zip(e2.values()).all(|(a, b)| a <= b)
            && e2.values().iter().zip(g.values()).all(|(a, b)| a <= b);
    }
    ctx.check("lipschitz.bound", "Lipschitz regularisation is λ-Lipschitz", bound);
    ctx.flag("lipschitz.monotone", "Lipschitz regularisation increases with λ", monotone);
    ctx.check("lipschitz.oracle", "Lipschitz regularisation as an infimal convolution", oracle);
    Ok(())
}

/// `min λ|x − y| − |g(x) − g(y)|` over adjacent nodes.
fn lipschitz_slack(g: &GridFunction, lambda: f64) -> f64 {
    let xs = &g.axes()[0];
    (1..xs.len())
        .map(|i| {
            let d = (g.value(i) - g.value(i - 1)).abs().to_f64();
            lambda * (xs[i] - xs[i - 1]) - d
        })
        .fold(0.0, f64::min)
}

fn reflexivity(ctx: &mut Ctx) -> Result<()> {
    let c = Carrier::finite_f64(&[1.0, 2.0, 0.5])?;
    let grid = SampleGrid::standard(1);
    let seed = ctx.rng.gen();
    let power = reflexivity_linearity_check(&OrliczIntegrand::power(1, 2.0)?, &c, &grid, 1e3, seed)?;
    ctx.flag(
        "reflexivity.power",
        "reflexivity through Δ₂ of φ and φ*",
        power.reflexive && power.domain_linear.linear && power.domain_linear_conjugate.linear,
    );
    let exp = reflexivity_linearity_check(&OrliczIntegrand::exponential(1), &c, &grid, 1e3, seed)?;
    ctx.flag(
        "reflexivity.exponential-caveat",
        "linear domains without Δ₂ on atomic carriers",
        !exp.delta2.holds() && exp.domain_linear.linear && exp.caveat.is_some(),
    );
    let mut consistent = power.consistent && exp.consistent;
    for phi in catalog(1) {
        consistent &= reflexivity_linearity_check(&phi, &c, &grid, 1e3, seed)?.consistent;
    }
    ctx.flag("reflexivity.implication", "Δ₂ implies a linear domain", consistent);
    Ok(())
}
