//! JSON records exchanged by the command-line tool.
//!
//! Complex numbers are `[re, im]` pairs throughout.

use num_complex::Complex64;
use serde::de::{self, Deserializer, Visitor};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::associated_lti::FactReport;
use crate::error::Result;
use crate::recursive_filter::{Initialization, RecursiveFilter};
use crate::sequences::{FiniteSignal, GeometricSum, GeometricTerm, Side};
use crate::ztransform::{RocImpulseResponse, SupportClass};

pub type Pair = [f64; 2];

pub fn to_pair(z: Complex64) -> Pair {
    [z.re, z.im]
}

pub fn from_pair(p: Pair) -> Complex64 {
    Complex64::new(p[0], p[1])
}

/// `{"start": int, "samples": [[re, im], ...]}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalRecord {
    pub start: i64,
    pub samples: Vec<Pair>,
}

impl SignalRecord {
    /// Every sample of `values`, starting at `start`, zeros kept.
    pub fn from_values(start: i64, values: &[Complex64]) -> Self {
        Self {
            start,
            samples: values.iter().copied().map(to_pair).collect(),
        }
    }
}

impl From<&FiniteSignal> for SignalRecord {
    fn from(s: &FiniteSignal) -> Self {
        Self::from_values(s.start(), s.samples())
    }
}

impl From<&SignalRecord> for FiniteSignal {
    fn from(r: &SignalRecord) -> Self {
        FiniteSignal::new(r.start, r.samples.iter().copied().map(from_pair).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermRecord {
    pub c: Pair,
    pub p: Pair,
    pub side: Side,
}

impl From<&GeometricTerm> for TermRecord {
    fn from(t: &GeometricTerm) -> Self {
        Self {
            c: to_pair(t.coeff),
            p: to_pair(t.ratio),
            side: t.side,
        }
    }
}

impl From<&TermRecord> for GeometricTerm {
    fn from(r: &TermRecord) -> Self {
        GeometricTerm {
            coeff: from_pair(r.c),
            ratio: from_pair(r.p),
            side: r.side,
        }
    }
}

/// `{"terms": [...], "correction": SignalRecord}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometricSumRecord {
    pub terms: Vec<TermRecord>,
    pub correction: SignalRecord,
}

impl From<&GeometricSum> for GeometricSumRecord {
    fn from(s: &GeometricSum) -> Self {
        Self {
            terms: s.terms.iter().map(TermRecord::from).collect(),
            correction: SignalRecord::from(&s.correction),
        }
    }
}

impl From<&GeometricSumRecord> for GeometricSum {
    fn from(r: &GeometricSumRecord) -> Self {
        GeometricSum::new(
            r.terms.iter().map(GeometricTerm::from).collect(),
            FiniteSignal::from(&r.correction),
        )
    }
}

/// `{"alpha": [[re, im], ...]}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterRecord {
    pub alpha: Vec<Pair>,
}

impl FilterRecord {
    pub fn to_filter(&self) -> Result<RecursiveFilter> {
        RecursiveFilter::new(self.alpha.iter().copied().map(from_pair).collect())
    }
}

impl From<&RecursiveFilter> for FilterRecord {
    fn from(f: &RecursiveFilter) -> Self {
        Self {
            alpha: f.coeffs().iter().copied().map(to_pair).collect(),
        }
    }
}

/// `{"init": [[re, im], ...]}`, ordered `y[−N]..y[−1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitRecord {
    pub init: Vec<Pair>,
}

impl InitRecord {
    pub fn to_init(&self, filter: &RecursiveFilter) -> Result<Initialization> {
        Initialization::new(filter, self.init.iter().copied().map(from_pair).collect())
    }
}

/// Outer radius: a number, or the string `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Radius(pub f64);

impl Serialize for Radius {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for Radius {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct RadiusVisitor;

        impl Visitor<'_> for RadiusVisitor {
            type Value = Radius;

            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("a number or \"inf\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Radius, E> {
                Ok(Radius(v))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Radius, E> {
                Ok(Radius(v as f64))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Radius, E> {
                Ok(Radius(v as f64))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Radius, E> {
                if v == "inf" {
                    Ok(Radius(f64::INFINITY))
                } else {
                    Err(E::invalid_value(de::Unexpected::Str(v), &self))
                }
            }
        }

        d.deserialize_any(RadiusVisitor)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocRecord {
    pub inner: f64,
    pub outer: Radius,
    pub support: SupportClass,
    pub stable_on_unit_circle: bool,
    pub h_terms: Vec<TermRecord>,
    /// Finite part of `h`; nonzero only for the pole-free filter (`h = δ`).
    pub h_correction: SignalRecord,
}

impl From<&RocImpulseResponse> for RocRecord {
    fn from(r: &RocImpulseResponse) -> Self {
        Self {
            inner: r.roc.inner,
            outer: Radius(r.roc.outer),
            support: r.support_class,
            stable_on_unit_circle: r.stable_on_unit_circle,
            h_terms: r.h.terms.iter().map(TermRecord::from).collect(),
            h_correction: SignalRecord::from(&r.h.correction),
        }
    }
}

/// `{"poles": [...], "rocs": [...]}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocReport {
    pub poles: Vec<Pair>,
    pub rocs: Vec<RocRecord>,
}

/// Output of `rlti impulse`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImpulseReport {
    pub alpha: Vec<Pair>,
    pub prefix: SignalRecord,
    pub closed: Option<GeometricSumRecord>,
    pub error: Option<String>,
}

/// Output of `rlti verify`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyBundle {
    pub alpha: Vec<Pair>,
    pub seed: u64,
    pub reports: Vec<FactReport>,
}

/// Output of `rlti settle`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SettleReport {
    pub f: f64,
    pub tol: f64,
    pub kcap: i64,
    pub settled: bool,
    pub settling_time: Option<i64>,
}

/// One JSON row of `rlti freq`; `h` is null on a unit-circle pole.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FreqRecord {
    pub f: f64,
    pub h: Option<Pair>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn radius_serializes_inf_as_string() {
        assert_eq!(serde_json::to_string(&Radius(f64::INFINITY)).unwrap(), r#""inf""#);
        assert_eq!(serde_json::to_string(&Radius(0.5)).unwrap(), "0.5");
        assert_eq!(
            serde_json::from_str::<Radius>(r#""inf""#).unwrap(),
            Radius(f64::INFINITY)
        );
        assert_eq!(serde_json::from_str::<Radius>("2").unwrap(), Radius(2.0));
        assert!(serde_json::from_str::<Radius>(r#""big""#).is_err());
    }

    #[test]
    fn geometric_sum_record_shape() {
        let s = GeometricSum::new(
            vec![GeometricTerm::anticausal(
                Complex64::new(1.0, -1.0),
                Complex64::new(2.0, 0.0),
            )],
            FiniteSignal::impulse(0),
        );
        let json = serde_json::to_string(&GeometricSumRecord::from(&s)).unwrap();
        assert_eq!(
            json,
            r#"{"terms":[{"c":[1.0,-1.0],"p":[2.0,0.0],"side":"anticausal"}],"correction":{"start":0,"samples":[[1.0,0.0]]}}"#
        );
    }

    proptest! {
        #[test]
        fn signal_record_round_trip(start in -50i64..50, vals in prop::collection::vec((-1e3f64..1e3, -1e3f64..1e3), 0..12)) {
            let s = FiniteSignal::new(start, vals.iter().map(|&(a, b)| Complex64::new(a, b)).collect());
            let json = serde_json::to_string(&SignalRecord::from(&s)).unwrap();
            let back: SignalRecord = serde_json::from_str(&json).unwrap();
            prop_assert_eq!(FiniteSignal::from(&back), s);
        }

        #[test]
        fn geometric_sum_round_trip(terms in prop::collection::vec((-5f64..5.0, -5f64..5.0, 0.1f64..3.0, any::<bool>()), 0..5)) {
            let s = GeometricSum::from_terms(terms.iter().map(|&(a, b, p, causal)| GeometricTerm {
                coeff: Complex64::new(a, b),
                ratio: Complex64::new(p, 0.0),
                side: if causal { Side::Causal } else { Side::Anticausal },
            }).collect());
            let json = serde_json::to_string(&GeometricSumRecord::from(&s)).unwrap();
            let back: GeometricSumRecord = serde_json::from_str(&json).unwrap();
            prop_assert_eq!(GeometricSum::from(&back), s);
        }
    }
}
