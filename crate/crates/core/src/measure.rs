//! Finite measure carriers.
//!
//! Two carrier shapes are supported. A [`CarrierKind::FinitePoints`] carrier
//! is a finite set of points whose weights lie in `[0, ∞]`; its σ-algebra is
//! the full power set, so every point of positive weight is an atom and the
//! points of weight `∞` are the atoms of infinite measure. A
//! [`CarrierKind::FiniteCofiniteTail`] carrier lives on the naturals with the
//! algebra of finite and cofinite sets; its weights are an explicit prefix
//! followed by a constant positive tail value, which makes every sum closed
//! form and lets purely finitely additive charges exist.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ext::{ExtReal, NegInf, PosInf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CarrierKind {
    FinitePoints,
    FiniteCofiniteTail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CarrierJson", into = "CarrierJson")]
pub struct Carrier {
    kind: CarrierKind,
    /// All point weights (finite carrier) or the explicit prefix (tail carrier).
    weights: Vec<ExtReal>,
    /// Constant weight of every natural beyond the prefix; tail carriers only.
    tail_value: Option<f64>,
}

/// A member of the carrier's algebra.
///
/// On a finite carrier only [`MSet::Finite`] occurs. On a tail carrier a set
/// is either finite or the complement of a finite set.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum MSet {
    Finite(BTreeSet<usize>),
    Cofinite(BTreeSet<usize>),
}

impl MSet {
    pub fn empty() -> Self {
        MSet::Finite(BTreeSet::new())
    }

    pub fn from_points<I: IntoIterator<Item = usize>>(points: I) -> Self {
        MSet::Finite(points.into_iter().collect())
    }

    /// Complement of a finite set of naturals; only meaningful on tail carriers.
    pub fn complement_of<I: IntoIterator<Item = usize>>(points: I) -> Self {
        MSet::Cofinite(points.into_iter().collect())
    }

    /// Bit `i` of `mask` selects point `i`.
    pub fn from_mask(mask: u64) -> Self {
        MSet::Finite((0..64).filter(|i| mask >> i & 1 == 1).collect())
    }

    pub fn contains(&self, point: usize) -> bool {
        match self {
            MSet::Finite(s) => s.contains(&point),
            MSet::Cofinite(s) => !s.contains(&point),
        }
    }

    pub fn is_cofinite(&self) -> bool {
        matches!(self, MSet::Cofinite(_))
    }

    pub fn intersect(&self, other: &MSet) -> MSet {
        match (self, other) {
            (MSet::Finite(a), MSet::Finite(b)) => MSet::Finite(a.intersection(b).copied().collect()),
            (MSet::Finite(a), MSet::Cofinite(b)) | (MSet::Cofinite(b), MSet::Finite(a)) => {
                MSet::Finite(a.difference(b).copied().collect())
            }
            (MSet::Cofinite(a), MSet::Cofinite(b)) => MSet::Cofinite(a.union(b).copied().collect()),
        }
    }

    pub fn union(&self, other: &MSet) -> MSet {
        match (self, other) {
            (MSet::Finite(a), MSet::Finite(b)) => MSet::Finite(a.union(b).copied().collect()),
            (MSet::Finite(a), MSet::Cofinite(b)) | (MSet::Cofinite(b), MSet::Finite(a)) => {
                MSet::Cofinite(b.difference(a).copied().collect())
            }
            (MSet::Cofinite(a), MSet::Cofinite(b)) => {
                MSet::Cofinite(a.intersection(b).copied().collect())
            }
        }
    }

    pub fn is_subset(&self, other: &MSet) -> bool {
        match (self, other) {
            (MSet::Finite(a), MSet::Finite(b)) => a.is_subset(b),
            (MSet::Finite(a), MSet::Cofinite(b)) => a.is_disjoint(b),
            (MSet::Cofinite(_), MSet::Finite(_)) => false,
            (MSet::Cofinite(a), MSet::Cofinite(b)) => b.is_subset(a),
        }
    }

    pub fn is_disjoint(&self, other: &MSet) -> bool {
        match self.intersect(other) {
            MSet::Finite(s) => s.is_empty(),
            MSet::Cofinite(_) => false,
        }
    }

    /// Explicit members of a finite set, or the excluded points of a cofinite one.
    pub fn listed(&self) -> &BTreeSet<usize> {
        match self {
            MSet::Finite(s) | MSet::Cofinite(s) => s,
        }
    }
}

/// Partition of a finite carrier's points by weight.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointClasses {
    pub null: Vec<usize>,
    pub finite_atoms: Vec<usize>,
    pub infinite_atoms: Vec<usize>,
}

impl PointClasses {
    /// A set is σ-finite iff it avoids every atom of infinite measure.
    pub fn is_sigma_finite(&self, s: &MSet) -> bool {
        self.infinite_atoms.iter().all(|p| !s.contains(*p))
    }
}

impl Carrier {
    /// Finite carrier with the given point weights.
    pub fn finite(weights: Vec<ExtReal>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidCarrier("no points".into()));
        }
        if let Some(w) = weights.iter().find(|w| **w < ExtReal::ZERO) {
            return Err(Error::InvalidCarrier(format!("negative weight {w}")));
        }
        if !weights.iter().any(|w| *w > ExtReal::ZERO) {
            return Err(Error::InvalidCarrier("all weights vanish".into()));
        }
        Ok(Carrier {
            kind: CarrierKind::FinitePoints,
            weights,
            tail_value: None,
        })
    }

    /// Convenience constructor from plain floats (`f64::INFINITY` allowed).
    pub fn finite_f64(weights: &[f64]) -> Result<Self> {
        let w = weights.iter().map(|&x| ExtReal::new(x)).collect::<Result<Vec<_>>>()?;
        Carrier::finite(w)
    }

    /// Tail carrier on the naturals: weight `prefix[n]` for `n < prefix.len()`
    /// and `tail_value` afterwards.
    ///
    /// Prefix weights must be strictly positive; `∞` is admitted so that a
    /// carrier can hold an atom of infinite measure next to its tail.
    pub fn tail(prefix: Vec<ExtReal>, tail_value: f64) -> Result<Self> {
        if !(tail_value.is_finite() && tail_value > 0.0) {
            return Err(Error::InvalidCarrier(format!(
                "tail value must be finite and positive, got {tail_value}"
            )));
        }
        if let Some(w) = prefix.iter().find(|w| **w <= ExtReal::ZERO) {
            return Err(Error::InvalidCarrier(format!(
                "tail carrier weights must be strictly positive, got {w}"
            )));
        }
        Ok(Carrier {
            kind: CarrierKind::FiniteCofiniteTail,
            weights: prefix,
            tail_value: Some(tail_value),
        })
    }

    pub fn tail_f64(prefix: &[f64], tail_value: f64) -> Result<Self> {
        let w = prefix.iter().map(|&x| ExtReal::new(x)).collect::<Result<Vec<_>>>()?;
        Carrier::tail(w, tail_value)
    }

    pub fn kind(&self) -> CarrierKind {
        self.kind
    }

    pub fn is_finite_points(&self) -> bool {
        self.kind == CarrierKind::FinitePoints
    }

    pub fn is_tail(&self) -> bool {
        self.kind == CarrierKind::FiniteCofiniteTail
    }

    /// Number of explicitly listed points (all points of a finite carrier,
    /// the prefix of a tail carrier).
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[ExtReal] {
        &self.weights
    }

    pub fn tail_value(&self) -> Option<f64> {
        self.tail_value
    }

    pub fn weight(&self, point: usize) -> ExtReal {
        match self.weights.get(point) {
            Some(w) => *w,
            None => match self.tail_value {
                Some(t) => ExtReal::from(t),
                None => ExtReal::ZERO,
            },
        }
    }

    /// Checks that a set is expressible on this carrier.
    pub fn check_set(&self, s: &MSet) -> Result<()> {
        match (self.kind, s) {
            (CarrierKind::FinitePoints, MSet::Cofinite(_)) => Err(Error::ForeignSet(
                "cofinite sets do not exist on finite carriers".into(),
            )),
            (CarrierKind::FinitePoints, MSet::Finite(p)) => match p.iter().find(|i| **i >= self.len()) {
                Some(i) => Err(Error::ForeignSet(format!("point {i} out of range"))),
                None => Ok(()),
            },
            (CarrierKind::FiniteCofiniteTail, _) => Ok(()),
        }
    }

    pub fn full_set(&self) -> MSet {
        match self.kind {
            CarrierKind::FinitePoints => MSet::Finite((0..self.len()).collect()),
            CarrierKind::FiniteCofiniteTail => MSet::Cofinite(BTreeSet::new()),
        }
    }

    pub fn complement(&self, s: &MSet) -> MSet {
        match (self.kind, s) {
            (CarrierKind::FinitePoints, MSet::Finite(p)) => {
                MSet::Finite((0..self.len()).filter(|i| !p.contains(i)).collect())
            }
            (CarrierKind::FinitePoints, MSet::Cofinite(p)) => {
                MSet::Finite(p.iter().copied().filter(|i| *i < self.len()).collect())
            }
            (CarrierKind::FiniteCofiniteTail, MSet::Finite(p)) => MSet::Cofinite(p.clone()),
            (CarrierKind::FiniteCofiniteTail, MSet::Cofinite(p)) => MSet::Finite(p.clone()),
        }
    }

    /// Measure of a set; cofinite sets of a tail carrier have measure `∞`.
    pub fn measure(&self, s: &MSet) -> Result<ExtReal> {
        self.check_set(s)?;
        Ok(match s {
            MSet::Finite(p) => p.iter().map(|i| self.weight(*i)).sum(),
            MSet::Cofinite(_) => PosInf,
        })
    }

    pub fn total_measure(&self) -> ExtReal {
        self.measure(&self.full_set()).expect("full set belongs to its carrier")
    }

    pub fn classify_points(&self) -> Result<PointClasses> {
        if !self.is_finite_points() {
            return Err(Error::WrongCarrierKind { expected: "finite" });
        }
        let mut classes = PointClasses {
            null: Vec::new(),
            finite_atoms: Vec::new(),
            infinite_atoms: Vec::new(),
        };
        for (i, w) in self.weights.iter().enumerate() {
            match w {
                w if w.is_zero() => classes.null.push(i),
                PosInf => classes.infinite_atoms.push(i),
                _ => classes.finite_atoms.push(i),
            }
        }
        Ok(classes)
    }

    /// Exhausting integral of a point function.
    ///
    /// `values[i]` is the integrand at point `i`. On a tail carrier `eventual`
    /// is the value taken at every natural `n ≥ values.len()` (zero if `None`);
    /// on a finite carrier `values` must cover every point and `eventual` must
    /// be `None`. Positive and negative parts are integrated separately with
    /// `0 · ∞ = 0`; if both diverge the integral is `+∞`.
    pub fn integrate(&self, values: &[ExtReal], eventual: Option<ExtReal>) -> Result<ExtReal> {
        let mut positive = ExtReal::ZERO;
        let mut negative = ExtReal::ZERO;
        let mut add = |w: ExtReal, g: ExtReal| {
            positive = positive + w * g.positive_part();
            negative = negative + w * g.negative_part();
        };
        match self.kind {
            CarrierKind::FinitePoints => {
                if values.len() != self.len() {
                    return Err(Error::LengthMismatch {
                        expected: self.len(),
                        found: values.len(),
                    });
                }
                if eventual.is_some() {
                    return Err(Error::WrongCarrierKind { expected: "tail" });
                }
                for (w, g) in self.weights.iter().zip(values) {
                    add(*w, *g);
                }
            }
            CarrierKind::FiniteCofiniteTail => {
                let e = eventual.unwrap_or(ExtReal::ZERO);
                let explicit = values.len().max(self.len());
                for n in 0..explicit {
                    let g = values.get(n).copied().unwrap_or(e);
                    add(self.weight(n), g);
                }
                // infinitely many points of weight tail_value > 0
                if e > ExtReal::ZERO {
                    positive = PosInf;
                } else if e < ExtReal::ZERO {
                    negative = PosInf;
                }
            }
        }
        Ok(if positive == PosInf && negative == PosInf {
            PosInf
        } else if negative == PosInf {
            NegInf
        } else {
            positive - negative
        })
    }

    /// All subsets of a finite carrier with at most 24 points, in mask order.
    pub fn subsets(&self) -> Result<impl Iterator<Item = MSet>> {
        if !self.is_finite_points() {
            return Err(Error::WrongCarrierKind { expected: "finite" });
        }
        if self.len() > 24 {
            return Err(Error::InvalidArgument("subset enumeration capped at 24 points".into()));
        }
        Ok((0u64..1 << self.len()).map(MSet::from_mask))
    }

    /// Test sets of a tail carrier: every subset of `{0, …, horizon−1}`
    /// together with its complement.
    pub fn tail_test_sets(&self, horizon: usize) -> Result<Vec<MSet>> {
        if !self.is_tail() {
            return Err(Error::WrongCarrierKind { expected: "tail" });
        }
        if horizon > 20 {
            return Err(Error::InvalidArgument("tail test horizon capped at 20".into()));
        }
        let mut out = Vec::with_capacity(2 << horizon);
        for mask in 0u64..1 << horizon {
            let s = MSet::from_mask(mask);
            out.push(self.complement(&s));
            out.push(s);
        }
        Ok(out)
    }
}

#[derive(Serialize, Deserialize)]
struct TailJson {
    prefix: Vec<ExtReal>,
    value: f64,
}

#[derive(Serialize, Deserialize)]
struct CarrierJson {
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    weights: Option<Vec<ExtReal>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tail: Option<TailJson>,
}

impl TryFrom<CarrierJson> for Carrier {
    type Error = Error;

    fn try_from(j: CarrierJson) -> Result<Self> {
        match j.kind.as_str() {
            "finite" => Carrier::finite(
                j.weights
                    .ok_or_else(|| Error::Parse("finite carrier needs \"weights\"".into()))?,
            ),
            "tail" => {
                let t = j
                    .tail
                    .ok_or_else(|| Error::Parse("tail carrier needs \"tail\"".into()))?;
                Carrier::tail(t.prefix, t.value)
            }
            other => Err(Error::Parse(format!("unknown carrier kind {other:?}"))),
        }
    }
}

impl From<Carrier> for CarrierJson {
    fn from(c: Carrier) -> Self {
        match c.kind {
            CarrierKind::FinitePoints => CarrierJson {
                kind: "finite".into(),
                weights: Some(c.weights),
                tail: None,
            },
            CarrierKind::FiniteCofiniteTail => CarrierJson {
                kind: "tail".into(),
                weights: None,
                tail: Some(TailJson {
                    prefix: c.weights,
                    value: c.tail_value.unwrap_or(1.0),
                }),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const INF: f64 = f64::INFINITY;

    fn e(x: f64) -> ExtReal {
        ExtReal::from(x)
    }

    #[test]
    fn measure_adds_infinity() {
        let c = Carrier::finite_f64(&[1.0, INF, 0.0]).unwrap();
        assert_eq!(c.measure(&MSet::from_points([0, 1])).unwrap(), PosInf);
        let c = Carrier::finite_f64(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(c.measure(&MSet::empty()).unwrap(), e(0.0));
    }

    #[test]
    fn cofinite_tail_set_has_infinite_measure() {
        let c = Carrier::tail_f64(&[1.0, 0.5], 0.25).unwrap();
        assert_eq!(c.measure(&MSet::complement_of([0])).unwrap(), PosInf);
        assert_eq!(c.measure(&MSet::from_points([0, 1, 5])).unwrap(), e(1.75));
    }

    #[test]
    fn classification_by_weight() {
        let c = Carrier::finite_f64(&[1.0, INF, 0.0]).unwrap();
        let k = c.classify_points().unwrap();
        assert_eq!(k.null, vec![2]);
        assert_eq!(k.finite_atoms, vec![0]);
        assert_eq!(k.infinite_atoms, vec![1]);
        assert!(k.is_sigma_finite(&MSet::from_points([0, 2])));
        assert!(!k.is_sigma_finite(&MSet::from_points([1])));

        let k = Carrier::finite_f64(&[2.0, 2.0]).unwrap().classify_points().unwrap();
        assert_eq!((k.null.len(), k.finite_atoms, k.infinite_atoms.len()), (0, vec![0, 1], 0));

        let k = Carrier::finite_f64(&[0.0, 0.0, 5.0]).unwrap().classify_points().unwrap();
        assert_eq!(k.null, vec![0, 1]);
        assert_eq!(k.finite_atoms, vec![2]);

        let t = Carrier::tail_f64(&[1.0], 1.0).unwrap();
        assert_eq!(t.classify_points(), Err(Error::WrongCarrierKind { expected: "finite" }));
    }

    #[test]
    fn integrate_examples() {
        let c = Carrier::finite_f64(&[1.0, 2.0]).unwrap();
        assert_eq!(c.integrate(&[e(3.0), e(-1.0)], None).unwrap(), e(1.0));
        let c = Carrier::finite_f64(&[INF, 1.0]).unwrap();
        assert_eq!(c.integrate(&[e(0.0), e(4.0)], None).unwrap(), e(4.0));
        let c = Carrier::finite_f64(&[INF, INF]).unwrap();
        assert_eq!(c.integrate(&[e(1.0), e(-1.0)], None).unwrap(), PosInf);
        assert_eq!(c.integrate(&[e(0.0), e(-1.0)], None).unwrap(), NegInf);
    }

    #[test]
    fn integrate_on_tail() {
        let c = Carrier::tail_f64(&[1.0, 2.0, 4.0], 0.5).unwrap();
        assert_eq!(c.integrate(&[e(1.0)], None).unwrap(), e(1.0));
        assert_eq!(c.integrate(&[e(1.0)], Some(e(1.0))).unwrap(), PosInf);
        assert_eq!(c.integrate(&[e(1.0), e(-1.0)], Some(e(-1.0))).unwrap(), NegInf);
    }

    #[test]
    fn invalid_carriers_are_rejected() {
        assert!(Carrier::finite_f64(&[0.0, 0.0]).is_err());
        assert!(Carrier::finite_f64(&[]).is_err());
        assert!(Carrier::finite_f64(&[-1.0, 1.0]).is_err());
        assert!(Carrier::finite_f64(&[f64::NAN]).is_err());
        assert!(Carrier::tail_f64(&[1.0, 0.0], 1.0).is_err());
        assert!(Carrier::tail_f64(&[1.0], 0.0).is_err());
        assert!(Carrier::tail_f64(&[1.0], INF).is_err());
    }

    #[test]
    fn carrier_json() {
        let c: Carrier = serde_json::from_str(r#"{"kind":"finite","weights":[1,"inf",0]}"#).unwrap();
        assert_eq!(c.weights(), &[e(1.0), PosInf, e(0.0)]);
        let t: Carrier =
            serde_json::from_str(r#"{"kind":"tail","tail":{"prefix":[1,0.5],"value":0.25}}"#).unwrap();
        assert_eq!(t.weight(7), e(0.25));
        let back: Carrier = serde_json::from_str(&serde_json::to_string(&t).unwrap()).unwrap();
        assert_eq!(back, t);
        assert!(serde_json::from_str::<Carrier>(r#"{"kind":"weird"}"#).is_err());
    }

    #[test]
    fn set_algebra_on_tail() {
        let c = Carrier::tail_f64(&[1.0], 1.0).unwrap();
        let a = MSet::from_points([0, 3]);
        let b = c.complement(&a);
        assert!(b.is_cofinite());
        assert!(a.is_disjoint(&b));
        assert_eq!(a.union(&b), c.full_set());
        assert!(a.is_subset(&MSet::complement_of([1])));
    }
}
