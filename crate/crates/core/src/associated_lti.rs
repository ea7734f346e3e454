//! The associated LTI system `ỹ = h ∗ x`.
//!
//! `h` is the output of the zero-initialized filter driven by `δ`. It is
//! kept two ways: a simulated prefix (always available) and, when the
//! nonzero characteristic roots are distinct, a closed form `Σ cᵢλᵢᵏ u[k]`
//! fitted to the first samples of that prefix. The closed form makes
//! `h ∗ x` exact for every finite-support `x`, including unstable filters.
//!
//! The `verify_fact*` functions check, on concrete inputs, that
//! - `ỹ` is itself a solution of the recursion (fact 1),
//! - `ỹ` equals the zero-initialized output for causal inputs (fact 2),
//! - every other solution differs from `ỹ` by a homogeneous solution (fact 3).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly;
use crate::recursive_filter::{
    check_solution_pair, ensure_distinct, is_stable, nonzero_roots, run_forward, Initialization, RecursiveFilter,
    SolutionReport,
};
use crate::sequences::{
    convolve_closed, impulse, pow_int, FiniteSignal, GeometricSum, GeometricTerm, Sequence, Window,
};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Longest prefix stored by default.
pub const DEFAULT_PREFIX_LEN: usize = 64;

/// Target for the neglected tail `C·ρᴸ` when choosing the prefix length.
pub const PREFIX_TAIL_TARGET: f64 = 1e-12;

/// Truncated convolution is refused when its error bound exceeds this.
pub const DEFAULT_TRUNCATION_TOL: f64 = 1e-9;

const MAX_CERTIFIED_PREFIX: usize = 1 << 16;

/// `h[0..len−1]` from the zero-initialized recursion driven by `δ`.
pub fn impulse_response_prefix(filter: &RecursiveFilter, len: usize) -> Result<FiniteSignal> {
    if len == 0 {
        return Err(Error::InvalidArgument("prefix length must be >= 1".into()));
    }
    run_forward(filter, &Initialization::zeros(filter), &impulse(0), len as i64 - 1)
}

/// Closed-form causal `h`, fitted by solving `Σ cᵢλᵢᵏ = h[k]` for
/// `k = 0..n−1` over the `n` nonzero roots, then checked against the first
/// `2N` simulated samples.
pub fn impulse_response_closed(filter: &RecursiveFilter) -> Result<GeometricSum> {
    let roots = nonzero_roots(filter);
    ensure_distinct(&roots)?;
    if roots.is_empty() {
        // every coefficient is zero, h = δ
        return Ok(GeometricSum::new(vec![], impulse(0)));
    }
    let n = roots.len();
    let check_len = 2 * filter.order().max(n);
    let prefix = impulse_response_prefix(filter, check_len)?;

    let a: Vec<Vec<Complex64>> = (0..n as i64)
        .map(|k| roots.iter().map(|&r| pow_int(r, k)).collect())
        .collect();
    let b: Vec<Complex64> = (0..n as i64).map(|k| prefix.at(k)).collect();
    let c = poly::solve(&a, &b)?;

    let closed = GeometricSum::from_terms(
        c.iter()
            .zip(&roots)
            .map(|(&ci, &ri)| GeometricTerm::causal(ci, ri))
            .collect(),
    );
    let scale = prefix.max_abs().max(f64::MIN_POSITIVE);
    for k in 0..check_len as i64 {
        if (closed.eval(k) - prefix.at(k)).norm() > 1e-8 * scale.max(prefix.at(k).norm()) {
            return Err(Error::SingularSystem);
        }
    }
    Ok(closed)
}

/// Smallest `L` with `C·ρᴸ <= target`, capped at `cap`.
fn tail_length(c: f64, rho: f64, target: f64, cap: usize) -> usize {
    if rho == 0.0 || c == 0.0 {
        return 1;
    }
    let mut l = 1;
    let mut tail = c * rho;
    while tail > target && l < cap {
        l += 1;
        tail *= rho;
    }
    l
}

/// How a truncated prefix may stand in for `h`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct TailBound {
    /// `Σ_{k>=L} |h[k]| <= bound`
    bound: f64,
}

#[derive(Debug, Clone)]
pub struct AssociatedLti {
    filter: RecursiveFilter,
    h_closed: Option<GeometricSum>,
    h_prefix: FiniteSignal,
    prefix_len: usize,
    tail: Option<TailBound>,
    truncation_tol: f64,
}

impl AssociatedLti {
    pub fn new(filter: &RecursiveFilter) -> Self {
        let h_closed = impulse_response_closed(filter).ok();
        let stable = is_stable(filter);
        let (prefix_len, tail) = match (&h_closed, stable) {
            (Some(h), true) => {
                let c: f64 = h.terms.iter().map(|t| t.coeff.norm()).sum();
                let rho = h.terms.iter().map(|t| t.ratio.norm()).fold(0.0, f64::max);
                let len = tail_length(c, rho, PREFIX_TAIL_TARGET, DEFAULT_PREFIX_LEN);
                let bound = if rho == 0.0 {
                    0.0
                } else {
                    c * rho.powi(len as i32) / (1.0 - rho)
                };
                (len, Some(TailBound { bound }))
            }
            (None, true) => certified_prefix(filter),
            (_, false) => (DEFAULT_PREFIX_LEN, None),
        };
        let h_prefix = impulse_response_prefix(filter, prefix_len).expect("prefix length >= 1");
        Self {
            filter: filter.clone(),
            h_closed,
            h_prefix,
            prefix_len,
            tail,
            truncation_tol: DEFAULT_TRUNCATION_TOL,
        }
    }

    pub fn with_truncation_tol(mut self, tol: f64) -> Self {
        self.truncation_tol = tol;
        self
    }

    pub fn filter(&self) -> &RecursiveFilter {
        &self.filter
    }

    pub fn h_closed(&self) -> Option<&GeometricSum> {
        self.h_closed.as_ref()
    }

    pub fn h_prefix(&self) -> &FiniteSignal {
        &self.h_prefix
    }

    /// Number of simulated samples behind [`Self::h_prefix`].
    pub fn prefix_len(&self) -> usize {
        self.prefix_len
    }

    /// `h[k]`: exact from the closed form when present, otherwise the
    /// stored prefix (zero past it).
    pub fn h_at(&self, k: i64) -> Complex64 {
        match &self.h_closed {
            Some(h) => h.eval(k),
            None => self.h_prefix.at(k),
        }
    }

    /// Upper bound on the error of prefix convolution with `x`, when one
    /// is available.
    pub fn truncation_bound(&self, x: &FiniteSignal) -> Option<f64> {
        self.tail.map(|t| t.bound * x.l1_norm())
    }
}

/// Prefix for a stable filter without a closed form (repeated roots).
/// `|h[k]| <= C·σᵏ` with `σ = (1+ρ)/2`, where `C` is the largest
/// `|h[k]|/σᵏ` seen; the prefix is doubled until that maximum sits in the
/// first half (so the ratio is already falling) and the tail
/// `C·σᴸ/(1−σ)` is below target.
fn certified_prefix(filter: &RecursiveFilter) -> (usize, Option<TailBound>) {
    let rho = crate::recursive_filter::spectral_radius(filter);
    let sigma = 0.5 * (1.0 + rho);
    let mut len = DEFAULT_PREFIX_LEN;
    while len <= MAX_CERTIFIED_PREFIX {
        let h = impulse_response_prefix(filter, len).expect("len >= 1");
        let mut c = 0.0;
        let mut argmax = 0;
        let mut weight = 1.0;
        for k in 0..len {
            let ratio = h.at(k as i64).norm() / weight;
            if ratio > c {
                c = ratio;
                argmax = k;
            }
            weight *= sigma;
        }
        let bound = c * sigma.powi(len as i32) / (1.0 - sigma);
        if argmax < len / 2 && bound <= PREFIX_TAIL_TARGET {
            return (len, Some(TailBound { bound }));
        }
        len *= 2;
    }
    (DEFAULT_PREFIX_LEN, None)
}

/// Samples of `ỹ = h ∗ x` on `window`.
///
/// Exact with the closed form; otherwise a prefix convolution whose error
/// bound must stay within the system's truncation tolerance.
pub fn lti_output(sys: &AssociatedLti, x: &FiniteSignal, window: Window) -> Result<FiniteSignal> {
    if x.is_zero() {
        return Ok(FiniteSignal::zero());
    }
    if let Some(h) = &sys.h_closed {
        return Ok(convolve_closed(h, x, window));
    }
    match sys.truncation_bound(x) {
        Some(bound) if bound <= sys.truncation_tol => Ok(convolve_closed(&sys.h_prefix, x, window)),
        _ => Err(Error::TruncationUncertified),
    }
}

/// Outcome of one fact check. Serializes as
/// `{"fact", "ok", "max_residual", "counterexample_k"}` plus an optional
/// `note`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactReport {
    pub fact: u8,
    pub ok: bool,
    /// Non-finite residuals are reported as `f64::MAX`.
    pub max_residual: f64,
    pub counterexample_k: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl FactReport {
    pub fn from_solution(fact: u8, report: &SolutionReport) -> Self {
        Self {
            fact,
            ok: report.ok,
            max_residual: finite_or_max(report.max_residual),
            counterexample_k: report.first_violation.map(|v| v.k),
            note: None,
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

pub(crate) fn finite_or_max(v: f64) -> f64 {
    if v.is_finite() {
        v
    } else {
        f64::MAX
    }
}

/// `(x, ỹ)` is a solution pair on `window`.
pub fn verify_fact1(filter: &RecursiveFilter, x: &FiniteSignal, window: Window, tol: f64) -> Result<FactReport> {
    let sys = AssociatedLti::new(filter);
    let padded = window.pad_left(filter.order());
    let y_tilde = lti_output(&sys, x, padded)?;
    Ok(verify_fact1_output(filter, x, &y_tilde, window, tol))
}

/// Fact 1 check against a caller-supplied `ỹ`, e.g. a deliberately
/// corrupted one.
pub fn verify_fact1_output<Y: Sequence + ?Sized>(
    filter: &RecursiveFilter,
    x: &FiniteSignal,
    y_tilde: &Y,
    window: Window,
    tol: f64,
) -> FactReport {
    FactReport::from_solution(1, &check_solution_pair(filter, x, y_tilde, window, tol))
}

/// For causal `x`: zero-initialized output equals `ỹ` on `[0, kmax]`, and
/// `ỹ` vanishes on `[−N, −1]`.
pub fn verify_fact2(filter: &RecursiveFilter, x: &FiniteSignal, kmax: i64, tol: f64) -> Result<FactReport> {
    if !x.is_zero() && x.start() < 0 {
        return Err(Error::NotCausalInput { start: x.start() });
    }
    let y = run_forward(filter, &Initialization::zeros(filter), x, kmax)?;
    let sys = AssociatedLti::new(filter);
    let n = filter.order() as i64;
    let y_tilde = lti_output(&sys, x, Window::new(-n, kmax)?)?;

    let mut max_residual: f64 = 0.0;
    let mut counterexample_k = None;
    for k in -n..=kmax {
        let expected = if k < 0 { ZERO } else { y.at(k) };
        let r = (y_tilde.at(k) - expected).norm();
        if !(r <= tol) && counterexample_k.is_none() {
            counterexample_k = Some(k);
        }
        max_residual = max_residual.max(finite_or_max(r));
    }
    Ok(FactReport {
        fact: 2,
        ok: counterexample_k.is_none(),
        max_residual,
        counterexample_k,
        note: None,
    })
}

/// `y − ỹ`, sampled on the padded window, and the fact 3 verdict on it.
#[derive(Debug, Clone, PartialEq)]
pub struct Fact3Decomposition {
    pub report: FactReport,
    /// `y₀ = y − ỹ` on `[kmin − N, kmax]`.
    pub homogeneous: FiniteSignal,
}

/// Split `y` into `ỹ + y₀` and check that `y₀` solves the zero-input
/// recursion on `window`.
pub fn decompose_fact3<Y: Sequence + ?Sized>(
    filter: &RecursiveFilter,
    x: &FiniteSignal,
    y: &Y,
    window: Window,
    tol: f64,
) -> Result<Fact3Decomposition> {
    let sys = AssociatedLti::new(filter);
    let padded = window.pad_left(filter.order());
    let y_tilde = lti_output(&sys, x, padded)?;
    Ok(split_homogeneous(filter, y, &y_tilde, window, tol))
}

/// Fact 3 split against an already known associated output `y_tilde`.
pub fn split_homogeneous<Y, T>(
    filter: &RecursiveFilter,
    y: &Y,
    y_tilde: &T,
    window: Window,
    tol: f64,
) -> Fact3Decomposition
where
    Y: Sequence + ?Sized,
    T: Sequence + ?Sized,
{
    let padded = window.pad_left(filter.order());
    let homogeneous = FiniteSignal::new(
        padded.kmin(),
        padded.indices().map(|k| y.at(k) - y_tilde.at(k)).collect(),
    );
    let report = check_solution_pair(filter, &FiniteSignal::zero(), &homogeneous, window, tol);
    Fact3Decomposition {
        report: FactReport::from_solution(3, &report),
        homogeneous,
    }
}
