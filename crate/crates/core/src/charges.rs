//! Bounded finitely additive set functions and their decompositions.
//!
//! A [`Charge`] on a finite carrier is a vector of point masses. On a tail
//! carrier it additionally carries a charge at infinity `λ`, so that
//! `ν(A) = Σ_{n∈A} a_n + λ·[A cofinite]`. The λ-term is the purely finitely
//! additive part: it vanishes on every finite set yet has total mass `λ`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ext::{ExtReal, PosInf};
use crate::measure::{Carrier, MSet};

#[derive(Debug, Clone, PartialEq)]
pub struct Charge {
    carrier: Carrier,
    masses: Vec<f64>,
    lambda: f64,
}

/// Wire form of a charge; the carrier travels separately.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChargeSpec {
    pub masses: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
}

/// Per-component masses and norm, as emitted in decomposition reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChargeReport {
    pub masses: Vec<f64>,
    pub lambda: f64,
    pub norm: f64,
}

impl Charge {
    pub fn new(carrier: Carrier, masses: Vec<f64>, lambda: f64) -> Result<Self> {
        if let Some(m) = masses.iter().find(|m| !m.is_finite()) {
            return Err(Error::InvalidCharge(format!("mass {m} is not finite")));
        }
        if !lambda.is_finite() {
            return Err(Error::InvalidCharge(format!("charge at infinity {lambda} is not finite")));
        }
        if carrier.is_finite_points() {
            if masses.len() != carrier.len() {
                return Err(Error::LengthMismatch {
                    expected: carrier.len(),
                    found: masses.len(),
                });
            }
            if lambda != 0.0 {
                return Err(Error::InvalidCharge(
                    "finite carriers admit no charge at infinity".into(),
                ));
            }
        }
        Ok(Charge {
            carrier,
            masses,
            lambda: lambda + 0.0,
        })
    }

    /// Point-mass charge on a finite carrier.
    pub fn point_masses(carrier: Carrier, masses: Vec<f64>) -> Result<Self> {
        Charge::new(carrier, masses, 0.0)
    }

    pub fn from_spec(carrier: Carrier, spec: &ChargeSpec) -> Result<Self> {
        Charge::new(carrier, spec.masses.clone(), spec.lambda.unwrap_or(0.0))
    }

    pub fn zero(carrier: Carrier) -> Self {
        let n = if carrier.is_finite_points() { carrier.len() } else { 0 };
        Charge {
            carrier,
            masses: vec![0.0; n],
            lambda: 0.0,
        }
    }

    pub fn carrier(&self) -> &Carrier {
        &self.carrier
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn mass(&self, point: usize) -> f64 {
        self.masses.get(point).copied().unwrap_or(0.0)
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn evaluate(&self, s: &MSet) -> Result<f64> {
        self.carrier.check_set(s)?;
        Ok(match s {
            MSet::Finite(p) => p.iter().map(|i| self.mass(*i)).sum(),
            MSet::Cofinite(excluded) => {
                let listed: f64 = self
                    .masses
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| !excluded.contains(i))
                    .map(|(_, m)| *m)
                    .sum();
                listed + self.lambda
            }
        })
    }

    /// Total variation `Σ|a_n| + |λ|`.
    pub fn norm(&self) -> f64 {
        self.masses.iter().map(|m| m.abs()).sum::<f64>() + self.lambda.abs()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.masses.iter().all(|m| *m >= 0.0) && self.lambda >= 0.0
    }

    /// `ν_B = ν(· ∩ B)`.
    pub fn restrict(&self, b: &MSet) -> Result<Charge> {
        self.carrier.check_set(b)?;
        let masses = self
            .masses
            .iter()
            .enumerate()
            .map(|(i, m)| if b.contains(i) { *m } else { 0.0 })
            .collect();
        let lambda = if b.is_cofinite() { self.lambda } else { 0.0 };
        Ok(Charge {
            carrier: self.carrier.clone(),
            masses,
            lambda,
        })
    }

    fn zip_with(&self, other: &Charge, f: impl Fn(f64, f64) -> f64) -> Result<Charge> {
        if self.carrier != other.carrier {
            return Err(Error::InvalidCharge("charges live on different carriers".into()));
        }
        let n = self.masses.len().max(other.masses.len());
        let masses = (0..n).map(|i| f(self.mass(i), other.mass(i))).collect();
        Ok(Charge {
            carrier: self.carrier.clone(),
            masses,
            lambda: f(self.lambda, other.lambda),
        })
    }

    pub fn add(&self, other: &Charge) -> Result<Charge> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Charge) -> Result<Charge> {
        self.zip_with(other, |a, b| a - b)
    }

    /// Equality as set functions: same masses up to trailing zeros, same λ.
    pub fn same_as(&self, other: &Charge) -> bool {
        let n = self.masses.len().max(other.masses.len());
        self.carrier == other.carrier
            && self.lambda == other.lambda
            && (0..n).all(|i| self.mass(i) == other.mass(i))
    }

    pub fn report(&self) -> ChargeReport {
        ChargeReport {
            masses: self.masses.clone(),
            lambda: self.lambda,
            norm: self.norm(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JordanParts {
    pub positive: Charge,
    pub negative: Charge,
    pub total_variation: f64,
}

pub fn jordan(nu: &Charge) -> JordanParts {
    let split = |sign: f64| Charge {
        carrier: nu.carrier.clone(),
        masses: nu.masses.iter().map(|m| (sign * m).max(0.0)).collect(),
        lambda: (sign * nu.lambda).max(0.0),
    };
    JordanParts {
        positive: split(1.0),
        negative: split(-1.0),
        total_variation: nu.norm(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HewittYosidaParts {
    pub sigma_additive: Charge,
    pub purely_finitely_additive: Charge,
}

/// Splits a tail-carrier charge into its σ-additive point masses and its
/// purely finitely additive charge at infinity.
pub fn hewitt_yosida(nu: &Charge) -> Result<HewittYosidaParts> {
    if !nu.carrier.is_tail() {
        return Err(Error::WrongCarrierKind { expected: "tail" });
    }
    Ok(HewittYosidaParts {
        sigma_additive: Charge {
            carrier: nu.carrier.clone(),
            masses: nu.masses.clone(),
            lambda: 0.0,
        },
        purely_finitely_additive: Charge {
            carrier: nu.carrier.clone(),
            masses: Vec::new(),
            lambda: nu.lambda,
        },
    })
}

/// de Giorgi decomposition relative to a reference measure `μ`.
#[derive(Debug, Clone, PartialEq)]
pub struct GiorgiParts {
    pub absolutely_continuous: Charge,
    pub diffuse: Charge,
    pub singular: Charge,
    /// Radon–Nikodym density of the a.c. part on points with `0 < μ < ∞`.
    pub density: Vec<Option<f64>>,
}

impl GiorgiParts {
    pub fn sum(&self) -> Result<Charge> {
        self.absolutely_continuous.add(&self.diffuse)?.add(&self.singular)
    }

    pub fn norms(&self) -> [f64; 3] {
        [
            self.absolutely_continuous.norm(),
            self.diffuse.norm(),
            self.singular.norm(),
        ]
    }
}

fn check_reference(nu: &Charge, mu: &Carrier) -> Result<()> {
    if !nu.carrier.is_finite_points() || !mu.is_finite_points() {
        return Err(Error::WrongCarrierKind { expected: "finite" });
    }
    if nu.carrier.len() != mu.len() {
        return Err(Error::LengthMismatch {
            expected: nu.carrier.len(),
            found: mu.len(),
        });
    }
    Ok(())
}

/// Decomposes a nonnegative charge into absolutely continuous, diffuse and
/// singular parts with respect to `μ`.
///
/// On a finite carrier the three sup formulas collapse to a classification
/// of points by reference weight: `μ_i = 0` is singular, `μ_i = ∞` is
/// diffuse, anything else is absolutely continuous with density `ν_i / μ_i`.
pub fn de_giorgi(nu: &Charge, mu: &Carrier) -> Result<GiorgiParts> {
    check_reference(nu, mu)?;
    if let Some((point, mass)) = nu.masses.iter().copied().enumerate().find(|(_, m)| *m < 0.0) {
        return Err(Error::SignedCharge { point, mass });
    }
    let n = nu.masses.len();
    let mut ac = vec![0.0; n];
    let mut diffuse = vec![0.0; n];
    let mut singular = vec![0.0; n];
    let mut density = vec![None; n];
    for (i, (&m, &w)) in nu.masses.iter().zip(mu.weights()).enumerate() {
        match w {
            w if w.is_zero() => singular[i] = m,
            PosInf => diffuse[i] = m,
            ExtReal::Finite(w) => {
                ac[i] = m;
                density[i] = Some(m / w);
            }
            ExtReal::NegInf => unreachable!("carrier weights are nonnegative"),
        }
    }
    let part = |masses| Charge {
        carrier: nu.carrier.clone(),
        masses,
        lambda: 0.0,
    };
    Ok(GiorgiParts {
        absolutely_continuous: part(ac),
        diffuse: part(diffuse),
        singular: part(singular),
        density,
    })
}

/// Signed de Giorgi decomposition through the Jordan parts:
/// `ν_a = (ν⁺)_a − (ν⁻)_a` and likewise for the other components.
pub fn de_giorgi_signed(nu: &Charge, mu: &Carrier) -> Result<GiorgiParts> {
    let j = jordan(nu);
    let p = de_giorgi(&j.positive, mu)?;
    let m = de_giorgi(&j.negative, mu)?;
    let density = p
        .density
        .iter()
        .zip(&m.density)
        .map(|(a, b)| match (a, b) {
            (Some(a), Some(b)) => Some(a - b),
            _ => None,
        })
        .collect();
    Ok(GiorgiParts {
        absolutely_continuous: p.absolutely_continuous.sub(&m.absolutely_continuous)?,
        diffuse: p.diffuse.sub(&m.diffuse)?,
        singular: p.singular.sub(&m.singular)?,
        density,
    })
}

/// Minimal σ-finite set carrying the absolutely continuous part: the points
/// with `0 < μ < ∞` where `ν_a` has nonzero mass.
pub fn sigma_finite_support(parts: &GiorgiParts) -> MSet {
    MSet::from_points(
        parts
            .density
            .iter()
            .enumerate()
            .filter(|(i, d)| d.is_some() && parts.absolutely_continuous.mass(*i) != 0.0)
            .map(|(i, _)| i),
    )
}

/// `ν` vanishes on `μ`-null points and on atoms of infinite measure.
pub fn is_absolutely_continuous(nu: &Charge, mu: &Carrier) -> Result<bool> {
    check_reference(nu, mu)?;
    Ok(nu
        .masses
        .iter()
        .zip(mu.weights())
        .all(|(m, w)| *m == 0.0 || w.is_finite() && !w.is_zero()))
}

/// Every set of nonzero `|ν|`-mass has infinite `μ`-measure.
pub fn is_diffuse(nu: &Charge, mu: &Carrier) -> Result<bool> {
    check_reference(nu, mu)?;
    Ok(nu.masses.iter().zip(mu.weights()).all(|(m, w)| *m == 0.0 || *w == PosInf))
}

/// `ν` is concentrated on a `μ`-null set.
pub fn is_singular(nu: &Charge, mu: &Carrier) -> Result<bool> {
    check_reference(nu, mu)?;
    Ok(nu.masses.iter().zip(mu.weights()).all(|(m, w)| *m == 0.0 || w.is_zero()))
}

#[cfg(test)]
mod tests {
    use super::*;

    const INF: f64 = f64::INFINITY;

    fn finite(weights: &[f64]) -> Carrier {
        Carrier::finite_f64(weights).unwrap()
    }

    #[test]
    fn jordan_sign_split() {
        let nu = Charge::point_masses(finite(&[1.0, 1.0]), vec![3.0, -2.0]).unwrap();
        let j = jordan(&nu);
        assert_eq!(j.positive.masses(), &[3.0, 0.0]);
        assert_eq!(j.negative.masses(), &[0.0, 2.0]);
        assert_eq!(j.total_variation, 5.0);
        assert_eq!(j.positive.sub(&j.negative).unwrap(), nu);
    }

    #[test]
    fn jordan_of_charge_at_infinity() {
        let t = Carrier::tail_f64(&[1.0], 1.0).unwrap();
        let nu = Charge::new(t, vec![0.0, 0.0], -4.0).unwrap();
        let j = jordan(&nu);
        assert_eq!(j.positive.lambda(), 0.0);
        assert_eq!(j.negative.lambda(), 4.0);
        assert_eq!(j.total_variation, 4.0);
    }

    #[test]
    fn hewitt_yosida_norms() {
        let t = Carrier::tail_f64(&[1.0, 1.0, 1.0], 1.0).unwrap();
        let nu = Charge::new(t.clone(), vec![1.0, 0.5, 0.25], 5.0).unwrap();
        let hy = hewitt_yosida(&nu).unwrap();
        assert_eq!(hy.sigma_additive.norm(), 1.75);
        assert_eq!(hy.purely_finitely_additive.norm(), 5.0);
        assert_eq!(nu.norm(), 6.75);

        let sigma = Charge::new(t, vec![1.0], 0.0).unwrap();
        let hy = hewitt_yosida(&sigma).unwrap();
        assert_eq!(hy.purely_finitely_additive.norm(), 0.0);

        let f = Charge::point_masses(finite(&[1.0]), vec![1.0]).unwrap();
        assert_eq!(hewitt_yosida(&f), Err(Error::WrongCarrierKind { expected: "tail" }));
    }

    #[test]
    fn pfa_part_commutes_with_restriction() {
        let t = Carrier::tail_f64(&[1.0, 1.0], 1.0).unwrap();
        let nu = Charge::new(t.clone(), vec![2.0, -2.0], -1.0).unwrap();
        for b in [MSet::from_points([0, 1]), MSet::complement_of([0])] {
            let lhs = hewitt_yosida(&nu).unwrap().purely_finitely_additive.restrict(&b).unwrap();
            let rhs = hewitt_yosida(&nu.restrict(&b).unwrap()).unwrap().purely_finitely_additive;
            for a in t.tail_test_sets(3).unwrap() {
                assert_eq!(lhs.evaluate(&a).unwrap(), rhs.evaluate(&a).unwrap());
            }
        }
    }

    #[test]
    fn de_giorgi_classifies_by_reference_weight() {
        let mu = finite(&[1.0, INF, 0.0]);
        let nu = Charge::point_masses(mu.clone(), vec![2.0, 3.0, 5.0]).unwrap();
        let g = de_giorgi(&nu, &mu).unwrap();
        assert_eq!(g.absolutely_continuous.masses(), &[2.0, 0.0, 0.0]);
        assert_eq!(g.diffuse.masses(), &[0.0, 3.0, 0.0]);
        assert_eq!(g.singular.masses(), &[0.0, 0.0, 5.0]);
        assert_eq!(g.density, vec![Some(2.0), None, None]);
        assert_eq!(sigma_finite_support(&g), MSet::from_points([0]));
        assert_eq!(g.norms().iter().sum::<f64>(), nu.norm());
    }

    #[test]
    fn identical_measures_have_unit_density() {
        let mu = finite(&[1.5, 2.0, 0.25]);
        let nu = Charge::point_masses(mu.clone(), vec![1.5, 2.0, 0.25]).unwrap();
        let g = de_giorgi(&nu, &mu).unwrap();
        assert_eq!(g.absolutely_continuous, nu);
        assert!(g.density.iter().all(|d| *d == Some(1.0)));
        assert_eq!(sigma_finite_support(&g), MSet::from_points([0, 1, 2]));
    }

    #[test]
    fn zero_charge_has_empty_support() {
        let mu = finite(&[1.0, INF]);
        let g = de_giorgi(&Charge::zero(mu.clone()), &mu).unwrap();
        assert_eq!(sigma_finite_support(&g), MSet::empty());
    }

    #[test]
    fn signed_charge_rejected_unless_through_jordan() {
        let mu = finite(&[1.0, INF, 0.0]);
        let nu = Charge::point_masses(mu.clone(), vec![2.0, -3.0, 5.0]).unwrap();
        assert!(matches!(de_giorgi(&nu, &mu), Err(Error::SignedCharge { point: 1, .. })));
        let g = de_giorgi_signed(&nu, &mu).unwrap();
        assert_eq!(g.diffuse.masses(), &[0.0, -3.0, 0.0]);
        assert!(g.sum().unwrap().same_as(&nu));
    }

    #[test]
    fn perturbing_components_breaks_membership() {
        let mu = finite(&[1.0, INF, 0.0]);
        let nu = Charge::point_masses(mu.clone(), vec![2.0, 3.0, 5.0]).unwrap();
        let g = de_giorgi(&nu, &mu).unwrap();
        // shift one unit of mass from the a.c. part into the diffuse part at point 0
        let shift = Charge::point_masses(mu.clone(), vec![1.0, 0.0, 0.0]).unwrap();
        let ac = g.absolutely_continuous.sub(&shift).unwrap();
        let d = g.diffuse.add(&shift).unwrap();
        assert!(ac.add(&d).unwrap().add(&g.singular).unwrap().same_as(&nu));
        assert!(!is_diffuse(&d, &mu).unwrap());
        // the same shift into the singular part
        let s = g.singular.add(&shift).unwrap();
        assert!(!is_singular(&s, &mu).unwrap());
        // moving diffuse mass into the a.c. part
        let shift = Charge::point_masses(mu.clone(), vec![0.0, 1.0, 0.0]).unwrap();
        let ac = g.absolutely_continuous.add(&shift).unwrap();
        assert!(!is_absolutely_continuous(&ac, &mu).unwrap());
        assert!(is_absolutely_continuous(&g.absolutely_continuous, &mu).unwrap());
    }

    #[test]
    fn invalid_charges() {
        let c = finite(&[1.0, 1.0]);
        assert!(Charge::point_masses(c.clone(), vec![1.0]).is_err());
        assert!(Charge::new(c.clone(), vec![1.0, 1.0], 2.0).is_err());
        assert!(Charge::point_masses(c, vec![1.0, f64::NAN]).is_err());
    }
}
