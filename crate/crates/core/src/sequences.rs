//! Complex sequences indexed by the integers.
//!
//! Two concrete representations cover everything the crate needs:
//! [`FiniteSignal`] (finite support, implicit zeros elsewhere) and
//! [`GeometricSum`] (one-sided geometric terms plus a finite correction),
//! which holds impulse responses and homogeneous solutions exactly.
//! Both implement [`Sequence`], the read-only "evaluate at k" view used by
//! the verifiers.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Anything that can be evaluated at every integer index.
pub trait Sequence {
    fn at(&self, k: i64) -> Complex64;
}

impl<F> Sequence for F
where
    F: Fn(i64) -> Complex64,
{
    fn at(&self, k: i64) -> Complex64 {
        self(k)
    }
}

/// Inclusive index range `kmin..=kmax`, never empty.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Window {
    kmin: i64,
    kmax: i64,
}

impl Window {
    pub fn new(kmin: i64, kmax: i64) -> Result<Self> {
        if kmin > kmax {
            return Err(Error::InvalidArgument(format!(
                "window {kmin}:{kmax} is empty (kmin > kmax)"
            )));
        }
        Ok(Self { kmin, kmax })
    }

    pub fn kmin(&self) -> i64 {
        self.kmin
    }

    pub fn kmax(&self) -> i64 {
        self.kmax
    }

    pub fn len(&self) -> usize {
        (self.kmax - self.kmin + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, k: i64) -> bool {
        self.kmin <= k && k <= self.kmax
    }

    pub fn indices(&self) -> std::ops::RangeInclusive<i64> {
        self.kmin..=self.kmax
    }

    /// Widen the window by `before` indices on the left.
    pub fn pad_left(&self, before: usize) -> Window {
        Window {
            kmin: self.kmin - before as i64,
            kmax: self.kmax,
        }
    }
}

/// Finite-support complex sequence.
///
/// Stored in canonical form: leading and trailing exact zeros are trimmed,
/// and the all-zero signal has no samples and `start == 0`. Derived
/// equality therefore means "equal at every integer".
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FiniteSignal {
    start: i64,
    samples: Vec<Complex64>,
}

impl FiniteSignal {
    pub fn new(start: i64, samples: Vec<Complex64>) -> Self {
        let mut s = Self { start, samples };
        s.canonicalize();
        s
    }

    pub fn from_real(start: i64, samples: &[f64]) -> Self {
        Self::new(start, samples.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn zero() -> Self {
        Self::default()
    }

    /// Unit impulse at `shift`.
    pub fn impulse(shift: i64) -> Self {
        Self {
            start: shift,
            samples: vec![Complex64::new(1.0, 0.0)],
        }
    }

    /// Samples `seq` on `window`.
    pub fn sample<S: Sequence + ?Sized>(seq: &S, window: Window) -> Self {
        Self::new(window.kmin, window.indices().map(|k| seq.at(k)).collect())
    }

    fn canonicalize(&mut self) {
        let lead = self.samples.iter().take_while(|v| **v == ZERO).count();
        if lead == self.samples.len() {
            self.samples.clear();
            self.start = 0;
            return;
        }
        let trail = self.samples.iter().rev().take_while(|v| **v == ZERO).count();
        self.samples.truncate(self.samples.len() - trail);
        self.samples.drain(..lead);
        self.start += lead as i64;
    }

    /// First index of the support (0 for the zero signal).
    pub fn start(&self) -> i64 {
        self.start
    }

    /// One past the last index of the support.
    pub fn end(&self) -> i64 {
        self.start + self.samples.len() as i64
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn is_zero(&self) -> bool {
        self.samples.is_empty()
    }

    /// Support as a window, `None` for the zero signal.
    pub fn support(&self) -> Option<Window> {
        if self.samples.is_empty() {
            None
        } else {
            Some(Window {
                kmin: self.start,
                kmax: self.end() - 1,
            })
        }
    }

    pub fn at(&self, k: i64) -> Complex64 {
        if k < self.start {
            return ZERO;
        }
        self.samples.get((k - self.start) as usize).copied().unwrap_or(ZERO)
    }

    /// Values on `window`, zeros included.
    pub fn window_values(&self, window: Window) -> Vec<Complex64> {
        window.indices().map(|k| self.at(k)).collect()
    }

    /// `s[k - m]`: the signal delayed by `m`.
    pub fn shift(&self, m: i64) -> Self {
        Self {
            start: if self.samples.is_empty() { 0 } else { self.start + m },
            samples: self.samples.clone(),
        }
    }

    pub fn scale(&self, a: Complex64) -> Self {
        Self::new(self.start, self.samples.iter().map(|v| v * a).collect())
    }

    /// Zero out every index below `k0`.
    pub fn gate_from(&self, k0: i64) -> Self {
        Self::new(
            self.start,
            self.samples
                .iter()
                .enumerate()
                .map(|(i, v)| if self.start + (i as i64) < k0 { ZERO } else { *v })
                .collect(),
        )
    }

    /// Sum of sample magnitudes.
    pub fn l1_norm(&self) -> f64 {
        self.samples.iter().map(|v| v.norm()).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    fn combine(&self, other: &Self, op: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        let (lo, hi) = match (self.support(), other.support()) {
            (None, None) => return Self::zero(),
            (Some(a), None) => (a.kmin, a.kmax),
            (None, Some(b)) => (b.kmin, b.kmax),
            (Some(a), Some(b)) => (a.kmin.min(b.kmin), a.kmax.max(b.kmax)),
        };
        Self::new(lo, (lo..=hi).map(|k| op(self.at(k), other.at(k))).collect())
    }
}

impl Sequence for FiniteSignal {
    fn at(&self, k: i64) -> Complex64 {
        FiniteSignal::at(self, k)
    }
}

impl Add for &FiniteSignal {
    type Output = FiniteSignal;
    fn add(self, rhs: Self) -> FiniteSignal {
        self.combine(rhs, |a, b| a + b)
    }
}

impl Sub for &FiniteSignal {
    type Output = FiniteSignal;
    fn sub(self, rhs: Self) -> FiniteSignal {
        self.combine(rhs, |a, b| a - b)
    }
}

impl Neg for &FiniteSignal {
    type Output = FiniteSignal;
    fn neg(self) -> FiniteSignal {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Mul<Complex64> for &FiniteSignal {
    type Output = FiniteSignal;
    fn mul(self, rhs: Complex64) -> FiniteSignal {
        self.scale(rhs)
    }
}

/// Which half-line a geometric term lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// `k >= 0`
    Causal,
    /// `k <= -1`
    Anticausal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometricTerm {
    pub coeff: Complex64,
    pub ratio: Complex64,
    pub side: Side,
}

impl GeometricTerm {
    pub fn causal(coeff: Complex64, ratio: Complex64) -> Self {
        Self {
            coeff,
            ratio,
            side: Side::Causal,
        }
    }

    pub fn anticausal(coeff: Complex64, ratio: Complex64) -> Self {
        Self {
            coeff,
            ratio,
            side: Side::Anticausal,
        }
    }

    pub fn at(&self, k: i64) -> Complex64 {
        let active = match self.side {
            Side::Causal => k >= 0,
            Side::Anticausal => k <= -1,
        };
        if !active {
            return ZERO;
        }
        self.coeff * pow_int(self.ratio, k)
    }
}

/// `z^k` for any integer `k`; `0^0 = 1`.
pub(crate) fn pow_int(z: Complex64, k: i64) -> Complex64 {
    if k >= 0 {
        pow_u(z, k as u64)
    } else {
        pow_u(z.inv(), k.unsigned_abs())
    }
}

fn pow_u(mut base: Complex64, mut exp: u64) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    while exp > 0 {
        if exp & 1 == 1 {
            acc *= base;
        }
        base *= base;
        exp >>= 1;
    }
    acc
}

/// Closed-form two-sided sequence: geometric terms plus a finite correction.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct GeometricSum {
    pub terms: Vec<GeometricTerm>,
    pub correction: FiniteSignal,
}

impl GeometricSum {
    pub fn new(terms: Vec<GeometricTerm>, correction: FiniteSignal) -> Self {
        Self { terms, correction }
    }

    pub fn from_terms(terms: Vec<GeometricTerm>) -> Self {
        Self {
            terms,
            correction: FiniteSignal::zero(),
        }
    }

    /// Value at `k`: active terms in stored order, then the correction.
    pub fn eval(&self, k: i64) -> Complex64 {
        let mut acc = ZERO;
        for term in &self.terms {
            acc += term.at(k);
        }
        acc + self.correction.at(k)
    }

    pub fn is_causal(&self) -> bool {
        self.terms.iter().all(|t| t.side == Side::Causal) && self.correction.support().is_none_or(|w| w.kmin >= 0)
    }
}

impl Sequence for GeometricSum {
    fn at(&self, k: i64) -> Complex64 {
        self.eval(k)
    }
}

/// Free-function form of [`GeometricSum::eval`].
pub fn eval(s: &GeometricSum, k: i64) -> Complex64 {
    s.eval(k)
}

pub fn impulse(shift: i64) -> FiniteSignal {
    FiniteSignal::impulse(shift)
}

/// `e^{j2πfk}` sampled on `window`; with `causal_gate`, zero for `k < 0`.
pub fn exp_signal(f: f64, window: Window, causal_gate: bool) -> FiniteSignal {
    FiniteSignal::new(
        window.kmin,
        window
            .indices()
            .map(|k| if causal_gate && k < 0 { ZERO } else { tone(f, k) })
            .collect(),
    )
}

/// `e^{j2πfk}` with the phase reduced modulo one cycle first, so large `k`
/// does not lose accuracy in the argument.
pub fn tone(f: f64, k: i64) -> Complex64 {
    let cycles = (f * k as f64).rem_euclid(1.0);
    Complex64::from_polar(1.0, 2.0 * PI * cycles)
}

/// Direct finite convolution.
pub fn convolve(a: &FiniteSignal, b: &FiniteSignal) -> FiniteSignal {
    if a.is_zero() || b.is_zero() {
        return FiniteSignal::zero();
    }
    let mut out = vec![ZERO; a.samples.len() + b.samples.len() - 1];
    for (i, ai) in a.samples.iter().enumerate() {
        for (j, bj) in b.samples.iter().enumerate() {
            out[i + j] += ai * bj;
        }
    }
    FiniteSignal::new(a.start + b.start, out)
}

/// Samples of `h * x` on `window`. Every output sample is a finite sum over
/// the support of `x`, so nothing is truncated.
pub fn convolve_closed<S: Sequence + ?Sized>(h: &S, x: &FiniteSignal, window: Window) -> FiniteSignal {
    let values = window
        .indices()
        .map(|k| {
            let mut acc = ZERO;
            for (j, xj) in x.samples.iter().enumerate() {
                acc += h.at(k - (x.start + j as i64)) * xj;
            }
            acc
        })
        .collect();
    FiniteSignal::new(window.kmin, values)
}
