use approx::assert_relative_eq;
use orlicz_kit::charges::{de_giorgi, jordan, Charge};
use orlicz_kit::conjugation::{conjugate_1d, lipschitz_regularize, GridFunction};
use orlicz_kit::measure::{Carrier, MSet};
use orlicz_kit::norms::{luxemburg_norm, SampledFunction};
use orlicz_kit::oracle;
use orlicz_kit::orlicz::OrliczIntegrand;
use orlicz_kit::ExtReal;
use proptest::prelude::*;

fn dyadic(lo: i64, hi: i64, denom: f64) -> impl Strategy<Value = f64> {
    (lo..=hi).prop_map(move |k| k as f64 / denom)
}

fn weight() -> impl Strategy<Value = ExtReal> {
    prop_oneof![
        1 => Just(ExtReal::ZERO),
        1 => Just(ExtReal::PosInf),
        4 => dyadic(1, 24, 8.0).prop_map(ExtReal::from),
    ]
}

fn unit_carrier(n: usize) -> Carrier {
    Carrier::finite_f64(&vec![1.0; n]).unwrap()
}

fn mask_set(n: usize, m: usize) -> MSet {
    MSet::from_points((0..n).filter(|i| m >> i & 1 == 1))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn jordan_matches_sup_formula(masses in prop::collection::vec(dyadic(-32, 32, 8.0), 1..8)) {
        let n = masses.len();
        let nu = Charge::new(unit_carrier(n), masses, 0.0).unwrap();
        let j = jordan(&nu);
        let table = oracle::charges::positive_part_by_sup(&nu).unwrap();
        for (m, want) in table.iter().enumerate() {
            prop_assert_eq!(j.positive.evaluate(&mask_set(n, m)).unwrap(), *want);
        }
        prop_assert_eq!(j.total_variation, oracle::charges::total_variation_by_partitions(&nu).unwrap());
    }

    #[test]
    fn de_giorgi_matches_brute_force(
        pairs in prop::collection::vec((dyadic(0, 32, 8.0), weight()), 1..9),
    ) {
        let (masses, mu): (Vec<f64>, Vec<ExtReal>) = pairs.into_iter().unzip();
        let n = masses.len();
        prop_assume!(mu.iter().any(|w| !w.is_zero()));
        let mu = Carrier::finite(mu).unwrap();
        let nu = Charge::new(unit_carrier(n), masses, 0.0).unwrap();
        let fast = de_giorgi(&nu, &mu).unwrap();
        let slow = oracle::charges::de_giorgi_brute_force(&nu, &mu).unwrap();
        for m in 0..1usize << n {
            let s = mask_set(n, m);
            prop_assert_eq!(fast.absolutely_continuous.evaluate(&s).unwrap(), slow.absolutely_continuous[m]);
            prop_assert_eq!(fast.diffuse.evaluate(&s).unwrap(), slow.diffuse[m]);
            prop_assert_eq!(fast.singular.evaluate(&s).unwrap(), slow.singular[m]);
        }
    }

    #[test]
    fn luxemburg_is_a_norm(
        u in prop::collection::vec(-4.0f64..4.0, 1..6),
        shift in prop::collection::vec(-4.0f64..4.0, 6),
        t in -8.0f64..8.0,
        p in 1.1f64..5.0,
    ) {
        let n = u.len();
        let c = Carrier::finite_f64(&vec![0.75; n]).unwrap();
        let phi = OrliczIntegrand::power(1, p).unwrap();
        let lux = |v: &[f64]| {
            luxemburg_norm(&phi, &SampledFunction::scalar(c.clone(), v).unwrap(), 1e-12).unwrap().to_f64()
        };
        let scaled: Vec<f64> = u.iter().map(|x| t * x).collect();
        assert_relative_eq!(lux(&scaled), t.abs() * lux(&u), max_relative = 1e-9, epsilon = 1e-12);
        let w: Vec<f64> = shift[..n].to_vec();
        let sum: Vec<f64> = u.iter().zip(&w).map(|(a, b)| a + b).collect();
        prop_assert!(lux(&sum) <= (lux(&u) + lux(&w)) * (1.0 + 1e-9));
    }

    #[test]
    fn transforms_match_grid_oracles(
        values in prop::collection::vec(prop_oneof![1 => Just(f64::INFINITY), 6 => dyadic(-64, 64, 16.0)], 2..40),
        lambda in dyadic(1, 16, 4.0),
    ) {
        prop_assume!(values.iter().any(|v| v.is_finite()));
        let xs: Vec<f64> = (0..values.len()).map(|i| -2.0 + i as f64 * 0.125).collect();
        let vals: Vec<ExtReal> = values.iter().map(|v| if v.is_finite() { ExtReal::from(*v) } else { ExtReal::PosInf }).collect();
        let g = GridFunction::new(vec![xs], vals).unwrap();
        let dual: Vec<f64> = (-48..=48).map(|k| k as f64 / 4.0).collect();
        let fast = conjugate_1d(&g, &dual).unwrap();
        let slow = oracle::conjugate::grid_sup(&g, &[dual]).unwrap();
        prop_assert_eq!(fast.dual.values(), slow.dual.values());
        let env = lipschitz_regularize(&g, lambda).unwrap();
        let want = oracle::conjugate::lipschitz_envelope(&g, lambda).unwrap();
        prop_assert_eq!(env.values(), want.values());
    }
}

#[test]
fn extended_arithmetic_conventions() {
    assert_eq!(ExtReal::ZERO * ExtReal::PosInf, ExtReal::ZERO);
    assert_eq!(ExtReal::PosInf - ExtReal::PosInf, ExtReal::PosInf);
    assert_eq!(ExtReal::from(2.0) * ExtReal::PosInf, ExtReal::PosInf);
}
