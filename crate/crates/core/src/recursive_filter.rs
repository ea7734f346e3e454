//! The raw recursion `y[k] = Σ αᵢ y[k−i] + x[k]` over all integers `k`.
//!
//! Without an initialization the recursion has infinitely many solutions
//! for any input. An [`Initialization`] fixes `y[−N..−1]`, after which the
//! output is unique: forward iteration gives `k >= 0`, backward iteration
//! (solving for `y[k−N]`) gives `k < −N`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::poly;
use crate::sequences::{pow_int, FiniteSignal, GeometricSum, GeometricTerm, Sequence, Window};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Relative separation below which two roots count as repeated.
pub const DISTINCT_ROOT_TOL: f64 = 1e-8;

/// Default absolute tolerance on recursion residuals.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Coefficients `α₁..α_N` of the recursion, `N >= 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct RecursiveFilter {
    coeffs: Vec<Complex64>,
}

impl RecursiveFilter {
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidArgument("filter needs at least one coefficient".into()));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument("filter coefficients must be finite".into()));
        }
        Ok(Self { coeffs })
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&a| Complex64::new(a, 0.0)).collect())
    }

    /// `α₁..α_N`.
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    /// Number of trailing zero coefficients, i.e. the multiplicity of the
    /// characteristic root at zero.
    pub fn zero_root_count(&self) -> usize {
        self.coeffs.iter().rev().take_while(|c| **c == ZERO).count()
    }

    /// Order once trailing zero coefficients are dropped.
    pub fn effective_order(&self) -> usize {
        self.order() - self.zero_root_count()
    }

    /// `λᴺ − α₁λᴺ⁻¹ − ⋯ − α_N`, descending powers.
    pub fn characteristic_polynomial(&self) -> Vec<Complex64> {
        std::iter::once(Complex64::new(1.0, 0.0))
            .chain(self.coeffs.iter().map(|a| -a))
            .collect()
    }

    /// `Σ αᵢ y[k−i]`.
    pub fn feedback<S: Sequence + ?Sized>(&self, y: &S, k: i64) -> Complex64 {
        self.coeffs
            .iter()
            .enumerate()
            .fold(ZERO, |acc, (i, a)| acc + a * y.at(k - 1 - i as i64))
    }
}

/// Values of `y[−N]..y[−1]`, in that order.
#[derive(Debug, Clone, PartialEq)]
pub struct Initialization {
    values: Vec<Complex64>,
}

impl Initialization {
    pub fn new(filter: &RecursiveFilter, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != filter.order() {
            return Err(Error::InvalidArgument(format!(
                "initialization has {} values, filter order is {}",
                values.len(),
                filter.order()
            )));
        }
        Ok(Self { values })
    }

    pub fn zeros(filter: &RecursiveFilter) -> Self {
        Self {
            values: vec![ZERO; filter.order()],
        }
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v == ZERO)
    }

    /// Value at `k` in `−N..=−1`.
    fn at(&self, k: i64) -> Complex64 {
        let n = self.values.len() as i64;
        debug_assert!((-n..0).contains(&k));
        self.values[(k + n) as usize]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Violation {
    pub k: i64,
    /// `y[k]`
    pub lhs: Complex64,
    /// `Σ αᵢ y[k−i] + x[k]`
    pub rhs: Complex64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolutionReport {
    pub ok: bool,
    pub max_residual: f64,
    pub first_violation: Option<Violation>,
}

/// `y[0..=kmax]` by forward iteration from `init`.
pub fn run_forward(
    filter: &RecursiveFilter,
    init: &Initialization,
    x: &FiniteSignal,
    kmax: i64,
) -> Result<FiniteSignal> {
    if kmax < 0 {
        return Err(Error::InvalidArgument(format!("kmax must be >= 0, got {kmax}")));
    }
    let n = filter.order();
    let len = kmax as usize + 1;
    // buf[j] holds y[j − N]
    let mut buf = Vec::with_capacity(n + len);
    buf.extend_from_slice(init.values());
    for k in 0..=kmax {
        let j = buf.len();
        let mut acc = x.at(k);
        for (i, a) in filter.coeffs.iter().enumerate() {
            acc += a * buf[j - 1 - i];
        }
        buf.push(acc);
    }
    Ok(FiniteSignal::new(0, buf.split_off(n)))
}

/// `y[kmin..=−N−1]` by solving the recursion for `y[k−N]`, walking down
/// from `k = −1`.
pub fn run_backward(
    filter: &RecursiveFilter,
    init: &Initialization,
    x: &FiniteSignal,
    kmin: i64,
) -> Result<FiniteSignal> {
    let n = filter.order() as i64;
    let last = filter.coeffs[filter.order() - 1];
    if last == ZERO {
        return Err(Error::SingularBackstep);
    }
    if kmin >= -n {
        return Err(Error::InvalidArgument(format!(
            "kmin must be < -N = {}, got {kmin}",
            -n
        )));
    }
    // rev[j] holds y[−1 − j]; starts with y[−1], y[−2], …, y[−N]
    let mut rev: Vec<Complex64> = init.values().iter().rev().copied().collect();
    for k in ((kmin + n)..=-1).rev() {
        let j = (-1 - k) as usize;
        let mut acc = rev[j] - x.at(k);
        for i in 1..filter.order() {
            acc -= filter.coeffs[i - 1] * rev[j + i];
        }
        rev.push(acc / last);
    }
    let mut out: Vec<Complex64> = rev.split_off(filter.order());
    out.reverse();
    Ok(FiniteSignal::new(kmin, out))
}

/// The unique output of the initialized filter, sampled on `window`.
/// Backward iteration is only needed (and only required to be possible)
/// when the window reaches below `−N`.
pub fn run_two_sided(
    filter: &RecursiveFilter,
    init: &Initialization,
    x: &FiniteSignal,
    window: Window,
) -> Result<FiniteSignal> {
    let n = filter.order() as i64;
    let forward = if window.kmax() >= 0 {
        run_forward(filter, init, x, window.kmax())?
    } else {
        FiniteSignal::zero()
    };
    let backward = if window.kmin() < -n {
        run_backward(filter, init, x, window.kmin())?
    } else {
        FiniteSignal::zero()
    };
    let values = window
        .indices()
        .map(|k| {
            if k >= 0 {
                forward.at(k)
            } else if k >= -n {
                init.at(k)
            } else {
                backward.at(k)
            }
        })
        .collect();
    Ok(FiniteSignal::new(window.kmin(), values))
}

/// Does `(x, y)` satisfy the recursion at every `k` in `window`?
/// Needs `y` on `[kmin − N, kmax]`.
pub fn check_solution_pair<X, Y>(filter: &RecursiveFilter, x: &X, y: &Y, window: Window, tol: f64) -> SolutionReport
where
    X: Sequence + ?Sized,
    Y: Sequence + ?Sized,
{
    let mut max_residual: f64 = 0.0;
    let mut first_violation = None;
    for k in window.indices() {
        let lhs = y.at(k);
        let rhs = filter.feedback(y, k) + x.at(k);
        let residual = (lhs - rhs).norm();
        // NaN counts as a violation
        let bad = !(residual <= tol);
        if bad && first_violation.is_none() {
            first_violation = Some(Violation { k, lhs, rhs, residual });
        }
        if residual.is_nan() {
            max_residual = f64::NAN;
        } else if !max_residual.is_nan() {
            max_residual = max_residual.max(residual);
        }
    }
    SolutionReport {
        ok: first_violation.is_none(),
        max_residual,
        first_violation,
    }
}

/// All roots of the characteristic polynomial, with multiplicity. Roots at
/// zero (from trailing zero coefficients) come last.
pub fn characteristic_roots(filter: &RecursiveFilter) -> Vec<Complex64> {
    let zeros = filter.zero_root_count();
    let poly = filter.characteristic_polynomial();
    let reduced = &poly[..poly.len() - zeros];
    let mut roots = poly::roots(reduced);
    roots.extend(std::iter::repeat_n(ZERO, zeros));
    roots
}

/// Nonzero characteristic roots only.
pub(crate) fn nonzero_roots(filter: &RecursiveFilter) -> Vec<Complex64> {
    let mut roots = characteristic_roots(filter);
    roots.truncate(filter.effective_order());
    roots
}

pub(crate) fn ensure_distinct(roots: &[Complex64]) -> Result<()> {
    let separation = poly::min_relative_separation(roots);
    if separation <= DISTINCT_ROOT_TOL {
        return Err(Error::RepeatedRoots { separation });
    }
    Ok(())
}

/// Largest characteristic root magnitude.
pub fn spectral_radius(filter: &RecursiveFilter) -> f64 {
    characteristic_roots(filter)
        .iter()
        .map(|r| r.norm())
        .fold(0.0, f64::max)
}

/// Every characteristic root strictly inside the unit circle.
pub fn is_stable(filter: &RecursiveFilter) -> bool {
    characteristic_roots(filter).iter().all(|r| r.norm() < 1.0)
}

/// The two-sided zero-input solution that takes the values `init` at
/// `k = −N..−1`, as `Σ cᵢλᵢᵏ` over the nonzero roots.
///
/// With `m` roots at zero only `y[−N+m..−1]` fix the geometric part, and
/// the forward run depends on nothing else. Any disagreement in the earlier
/// init values goes into the finite correction on `[−N, −N+m−1]`. The
/// result always satisfies the zero-input recursion for `k >= 0` and
/// `k < −N`; inside `[−N, −1]` it can only fail when no doubly-infinite
/// solution takes the given init values.
pub fn homogeneous_from_init(filter: &RecursiveFilter, init: &Initialization) -> Result<GeometricSum> {
    if init.is_zero() {
        return Ok(GeometricSum::default());
    }
    let n = filter.order() as i64;
    let n_eff = filter.effective_order();
    let roots = nonzero_roots(filter);
    ensure_distinct(&roots)?;

    let coeffs = if n_eff == 0 {
        Vec::new()
    } else {
        let ks: Vec<i64> = (-(n_eff as i64)..0).collect();
        let a: Vec<Vec<Complex64>> = ks
            .iter()
            .map(|&k| roots.iter().map(|&r| pow_int(r, k)).collect())
            .collect();
        let b: Vec<Complex64> = ks.iter().map(|&k| init.at(k)).collect();
        poly::solve(&a, &b)?
    };

    let mut terms = Vec::with_capacity(2 * n_eff);
    for (c, r) in coeffs.iter().zip(&roots) {
        terms.push(GeometricTerm::causal(*c, *r));
        terms.push(GeometricTerm::anticausal(*c, *r));
    }
    let geometric = GeometricSum::from_terms(terms);
    let first_fitted = -(n_eff as i64);
    let correction: Vec<Complex64> = (-n..first_fitted).map(|k| init.at(k) - geometric.eval(k)).collect();
    Ok(GeometricSum::new(geometric.terms, FiniteSignal::new(-n, correction)))
}
