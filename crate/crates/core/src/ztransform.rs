//! Transfer function `H(z) = 1 / (1 − Σ αᵢ z⁻ⁱ)`: poles, the annuli that
//! can serve as its region of convergence, and the impulse response each
//! annulus selects.
//!
//! Every annulus gives a different two-sided `h` with `(δ, h)` a solution
//! pair of the recursion. The outermost one (`|z| > max |p|`) gives the
//! causal `h` of the associated LTI system; the one containing `|z| = 1`
//! (when no pole sits on it) gives the `h` whose DTFT is `H(e^{j2πf})`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly;
use crate::recursive_filter::{nonzero_roots, RecursiveFilter, DISTINCT_ROOT_TOL};
use crate::sequences::{impulse, GeometricSum, GeometricTerm, Side};

/// Relative tolerance for grouping equal pole magnitudes.
pub const TIES_TOL: f64 = 1e-8;

/// Poles closer than this to `|z| = 1` are on the unit circle.
pub const UNIT_CIRCLE_EPS: f64 = 1e-9;

/// Open annulus `inner < |z| < outer`; `outer` may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Annulus {
    pub inner: f64,
    pub outer: f64,
}

impl Annulus {
    pub fn new(inner: f64, outer: f64) -> Result<Self> {
        if !(inner >= 0.0 && inner < outer) {
            return Err(Error::InvalidArgument(format!(
                "annulus needs 0 <= r < R, got ({inner}, {outer})"
            )));
        }
        Ok(Self { inner, outer })
    }

    pub fn contains_radius(&self, r: f64) -> bool {
        self.inner < r && r < self.outer
    }

    pub fn contains_unit_circle(&self) -> bool {
        self.contains_radius(1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartialFractionTerm {
    pub residue: Complex64,
    pub pole: Complex64,
}

/// `H(z) = direct + Σ rᵢ / (1 − pᵢ z⁻¹)`.
///
/// `direct` is 1 only for the pole-free filter (all coefficients zero),
/// where `H(z) = 1`; otherwise it is 0 and `Σ rᵢ = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialFractionForm {
    terms: Vec<PartialFractionTerm>,
    direct: Complex64,
}

impl PartialFractionForm {
    pub fn new(terms: Vec<PartialFractionTerm>, direct: Complex64) -> Result<Self> {
        if terms.iter().any(|t| t.pole == Complex64::new(0.0, 0.0)) {
            return Err(Error::ZeroPole);
        }
        let poles: Vec<Complex64> = terms.iter().map(|t| t.pole).collect();
        let separation = poly::min_relative_separation(&poles);
        if separation <= DISTINCT_ROOT_TOL {
            return Err(Error::RepeatedPoles { separation });
        }
        Ok(Self { terms, direct })
    }

    pub fn terms(&self) -> &[PartialFractionTerm] {
        &self.terms
    }

    pub fn direct(&self) -> Complex64 {
        self.direct
    }

    pub fn poles(&self) -> Vec<Complex64> {
        self.terms.iter().map(|t| t.pole).collect()
    }

    /// `H(z)` from the expansion.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.terms
            .iter()
            .fold(self.direct, |acc, t| acc + t.residue / (1.0 - t.pole / z))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SupportClass {
    Causal,
    Anticausal,
    TwoSided,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RocImpulseResponse {
    pub roc: Annulus,
    pub h: GeometricSum,
    pub support_class: SupportClass,
    pub stable_on_unit_circle: bool,
}

/// Poles of `H(z)`: the nonzero characteristic roots. Roots at the origin
/// come from trailing zero coefficients, which drop out of `H(z)`.
pub fn poles(filter: &RecursiveFilter) -> Vec<Complex64> {
    nonzero_roots(filter)
}

/// Annuli bounded by consecutive distinct pole magnitudes. Magnitudes
/// within `ties_tol` (relative) of each other form one boundary, placed at
/// the largest magnitude in the group.
pub fn enumerate_rocs(poles: &[Complex64], ties_tol: f64) -> Vec<Annulus> {
    let mut mags: Vec<f64> = poles.iter().map(|p| p.norm()).filter(|m| *m > 0.0).collect();
    mags.sort_by(|a, b| a.partial_cmp(b).expect("finite pole magnitudes"));
    let mut bounds: Vec<f64> = Vec::with_capacity(mags.len());
    for m in mags {
        match bounds.last_mut() {
            Some(last) if m - *last <= ties_tol * m => *last = m,
            _ => bounds.push(m),
        }
    }
    let mut edges = Vec::with_capacity(bounds.len() + 2);
    edges.push(0.0);
    edges.extend(bounds);
    edges.push(f64::INFINITY);
    edges
        .windows(2)
        .map(|w| Annulus {
            inner: w[0],
            outer: w[1],
        })
        .collect()
}

/// Residues by the product formula `rᵢ = Πⱼ≠ᵢ 1 / (1 − pⱼ/pᵢ)`.
pub fn partial_fractions(filter: &RecursiveFilter) -> Result<PartialFractionForm> {
    let ps = poles(filter);
    if ps.is_empty() {
        return PartialFractionForm::new(vec![], Complex64::new(1.0, 0.0));
    }
    let separation = poly::min_relative_separation(&ps);
    if separation <= DISTINCT_ROOT_TOL {
        return Err(Error::RepeatedPoles { separation });
    }
    let terms = ps
        .iter()
        .enumerate()
        .map(|(i, &pi)| {
            let denom = ps
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .fold(Complex64::new(1.0, 0.0), |acc, (_, &pj)| acc * (1.0 - pj / pi));
            PartialFractionTerm {
                residue: denom.inv(),
                pole: pi,
            }
        })
        .collect();
    PartialFractionForm::new(terms, Complex64::new(0.0, 0.0))
}

/// Expand each term about `∞` (pole inside the hole: `rᵢpᵢᵏ`, `k >= 0`) or
/// about `0` (pole beyond the outer radius: `−rᵢpᵢᵏ`, `k <= −1`).
pub fn impulse_response_for_roc(pf: &PartialFractionForm, roc: Annulus) -> Result<RocImpulseResponse> {
    let mut terms = Vec::with_capacity(pf.terms.len());
    for t in &pf.terms {
        let m = t.pole.norm();
        if m <= roc.inner * (1.0 + TIES_TOL) {
            terms.push(GeometricTerm::causal(t.residue, t.pole));
        } else if m >= roc.outer * (1.0 - TIES_TOL) {
            terms.push(GeometricTerm::anticausal(-t.residue, t.pole));
        } else {
            return Err(Error::PoleInsideRoc {
                magnitude: m,
                inner: roc.inner,
                outer: roc.outer,
            });
        }
    }
    let has_causal = terms.iter().any(|t| t.side == Side::Causal) || pf.direct != Complex64::new(0.0, 0.0);
    let has_anticausal = terms.iter().any(|t| t.side == Side::Anticausal);
    let support_class = match (has_causal, has_anticausal) {
        (_, false) => SupportClass::Causal,
        (false, true) => SupportClass::Anticausal,
        (true, true) => SupportClass::TwoSided,
    };
    Ok(RocImpulseResponse {
        roc,
        h: GeometricSum::new(terms, impulse(0).scale(pf.direct)),
        support_class,
        stable_on_unit_circle: roc.contains_unit_circle(),
    })
}

/// Impulse response for every admissible annulus, innermost first.
pub fn all_roc_impulse_responses(filter: &RecursiveFilter) -> Result<Vec<RocImpulseResponse>> {
    let pf = partial_fractions(filter)?;
    enumerate_rocs(&pf.poles(), TIES_TOL)
        .into_iter()
        .map(|roc| impulse_response_for_roc(&pf, roc))
        .collect()
}

/// The outermost annulus, `|z| > max |p|`, which yields the causal `h`.
pub fn causal_ir_via_fact5(filter: &RecursiveFilter) -> Result<RocImpulseResponse> {
    let pf = partial_fractions(filter)?;
    let roc = *enumerate_rocs(&pf.poles(), TIES_TOL)
        .last()
        .expect("at least one annulus");
    impulse_response_for_roc(&pf, roc)
}

/// The annulus containing `|z| = 1`.
pub fn unit_circle_ir(filter: &RecursiveFilter) -> Result<RocImpulseResponse> {
    let pf = partial_fractions(filter)?;
    if let Some(p) = pf.terms.iter().find(|t| (t.pole.norm() - 1.0).abs() <= UNIT_CIRCLE_EPS) {
        return Err(Error::PoleOnUnitCircle {
            magnitude: (p.pole.norm() - 1.0).abs(),
        });
    }
    let roc = enumerate_rocs(&pf.poles(), TIES_TOL)
        .into_iter()
        .find(|a| a.contains_unit_circle())
        .expect("annuli cover every radius off the pole circles");
    impulse_response_for_roc(&pf, roc)
}
