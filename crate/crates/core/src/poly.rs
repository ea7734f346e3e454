//! Small dense polynomial and linear-algebra helpers.
//!
//! Polynomials are coefficient slices in descending powers, leading
//! coefficient first.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Horner evaluation.
pub fn eval(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs.iter().fold(ZERO, |acc, c| acc * z + c)
}

fn derivative(coeffs: &[Complex64]) -> Vec<Complex64> {
    let n = coeffs.len().saturating_sub(1);
    coeffs[..n]
        .iter()
        .enumerate()
        .map(|(i, c)| c * (n - i) as f64)
        .collect()
}

/// Monic polynomial with the given roots, descending powers.
pub fn from_roots(roots: &[Complex64]) -> Vec<Complex64> {
    let mut p = vec![ONE];
    for r in roots {
        p.push(ZERO);
        for i in (1..p.len()).rev() {
            let prev = p[i - 1];
            p[i] -= r * prev;
        }
    }
    p
}

/// All roots of a polynomial with nonzero leading coefficient.
///
/// Eigenvalues of the companion matrix (complex Schur form), each refined by
/// a few Newton steps on the original polynomial.
pub fn roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    assert!(
        !coeffs.is_empty() && coeffs[0] != ZERO,
        "leading coefficient must be nonzero"
    );
    let n = coeffs.len() - 1;
    match n {
        0 => return Vec::new(),
        1 => return vec![-coeffs[1] / coeffs[0]],
        _ => {}
    }
    let lead = coeffs[0];
    let mut companion = DMatrix::<Complex64>::zeros(n, n);
    for j in 0..n {
        companion[(0, j)] = -coeffs[j + 1] / lead;
    }
    for i in 1..n {
        companion[(i, i - 1)] = ONE;
    }
    let schur = companion.schur();
    let (_, t) = schur.unpack();
    let dp = derivative(coeffs);
    (0..n).map(|i| polish(coeffs, &dp, t[(i, i)])).collect()
}

fn polish(p: &[Complex64], dp: &[Complex64], mut z: Complex64) -> Complex64 {
    let mut best = (eval(p, z).norm(), z);
    for _ in 0..8 {
        let d = eval(dp, z);
        if d == ZERO {
            break;
        }
        let step = eval(p, z) / d;
        if !step.is_finite() {
            break;
        }
        z -= step;
        let r = eval(p, z).norm();
        if r < best.0 {
            best = (r, z);
        }
        if step.norm() <= f64::EPSILON * z.norm().max(1.0) {
            break;
        }
    }
    best.1
}

/// Smallest pairwise distance relative to the larger magnitude of each
/// pair; `f64::INFINITY` for fewer than two values.
pub fn min_relative_separation(values: &[Complex64]) -> f64 {
    let mut sep = f64::INFINITY;
    for i in 0..values.len() {
        for j in (i + 1)..values.len() {
            let scale = values[i].norm().max(values[j].norm());
            let d = (values[i] - values[j]).norm();
            let rel = if scale > 0.0 { d / scale } else { 0.0 };
            sep = sep.min(rel);
        }
    }
    sep
}

/// Solve the square system `a x = b` (row-major `a`) with partial pivoting.
/// Refuses systems whose pivots span more than ~1e14 in magnitude.
pub fn solve(a: &[Vec<Complex64>], b: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = b.len();
    let m = DMatrix::from_fn(n, n, |i, j| a[i][j]);
    let lu = m.lu();
    let u = lu.u();
    let pivots: Vec<f64> = (0..n).map(|i| u[(i, i)].norm()).collect();
    let max = pivots.iter().cloned().fold(0.0, f64::max);
    let min = pivots.iter().cloned().fold(f64::INFINITY, f64::min);
    if n > 0 && (max == 0.0 || min <= max * 1e-14) {
        return Err(Error::SingularSystem);
    }
    let x = lu.solve(&DVector::from_column_slice(b)).ok_or(Error::SingularSystem)?;
    Ok(x.iter().copied().collect())
}
