//! Frequency response of the associated LTI system and how quickly an
//! initialized filter approaches it.
//!
//! Frequencies are in cycles per sample; the input `e^{j2πfk}` is an
//! eigenfunction of `h ∗ ·` with eigenvalue
//! `H(f) = 1 / (1 − Σ αᵢ e^{−j2πfi})`.

use num_complex::Complex64;

use crate::associated_lti::{split_homogeneous, Fact3Decomposition};
use crate::error::{Error, Result};
use crate::recursive_filter::{is_stable, run_forward, spectral_radius, Initialization, RecursiveFilter};
use crate::sequences::{exp_signal, tone, Sequence, Window};

/// Denominators at or below this magnitude count as a pole on the unit
/// circle.
pub const POLE_EPS: f64 = 1e-12;

fn denominator(filter: &RecursiveFilter, f: f64) -> Complex64 {
    let mut d = Complex64::new(1.0, 0.0);
    for (i, a) in filter.coeffs().iter().enumerate() {
        d -= a * tone(-f, i as i64 + 1);
    }
    d
}

pub fn frequency_response(filter: &RecursiveFilter, f: f64) -> Result<Complex64> {
    let d = denominator(filter, f);
    if d.norm() <= POLE_EPS {
        return Err(Error::PoleOnUnitCircle { magnitude: d.norm() });
    }
    Ok(d.inv())
}

/// `Σ_{k=0}^{L−1} h[k] e^{−j2πfk}`.
pub fn dtft_truncated<S: Sequence + ?Sized>(h: &S, f: f64, len: usize) -> Result<Complex64> {
    if len == 0 {
        return Err(Error::InvalidArgument("DTFT length must be >= 1".into()));
    }
    Ok((0..len as i64).fold(Complex64::new(0.0, 0.0), |acc, k| acc + h.at(k) * tone(-f, k)))
}

/// `|y[k] − H(f)e^{j2πfk}|` for `k = 0..=kcap`, where `y` is the
/// zero-initialized output for the input `u[k]e^{j2πfk}`.
pub fn settling_errors(filter: &RecursiveFilter, f: f64, kcap: i64) -> Result<Vec<f64>> {
    if kcap < 0 {
        return Err(Error::InvalidArgument(format!("kcap must be >= 0, got {kcap}")));
    }
    let h = frequency_response(filter, f)?;
    let x = exp_signal(f, Window::new(0, kcap)?, true);
    let y = run_forward(filter, &Initialization::zeros(filter), &x, kcap)?;
    Ok((0..=kcap).map(|k| (y.at(k) - h * tone(f, k)).norm()).collect())
}

/// Smallest `k <= kcap` after which the error stays within `tol` all the
/// way to `kcap`.
pub fn settling_time(filter: &RecursiveFilter, f: f64, tol: f64, kcap: i64) -> Result<i64> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be > 0, got {tol}")));
    }
    if !is_stable(filter) {
        return Err(Error::Unstable {
            max_root: spectral_radius(filter),
        });
    }
    let errors = settling_errors(filter, f, kcap)?;
    match errors.iter().rposition(|e| !(*e <= tol)) {
        None => Ok(0),
        Some(last) if last as i64 == kcap => Err(Error::NotSettled { cap: kcap }),
        Some(last) => Ok(last as i64 + 1),
    }
}

/// Ratios `e[k+1]/e[k]` over the stretch where the error is below `below`
/// and still nonzero.
pub fn decay_ratios(errors: &[f64], below: f64) -> Vec<f64> {
    errors
        .windows(2)
        .filter(|w| w[0] < below && w[0] > 0.0 && w[1] > 0.0)
        .map(|w| w[1] / w[0])
        .collect()
}

/// One row of a sweep. `h` is `None` where a pole sits on the unit circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyPoint {
    pub f: f64,
    pub h: Option<Complex64>,
}

/// `M` points `−½ + i/M`, covering `[−½, ½)`.
pub fn uniform_grid(points: usize) -> Result<Vec<f64>> {
    if points == 0 {
        return Err(Error::InvalidArgument("grid needs at least one point".into()));
    }
    Ok((0..points).map(|i| -0.5 + i as f64 / points as f64).collect())
}

pub fn freq_sweep(filter: &RecursiveFilter, grid: &[f64]) -> Vec<FrequencyPoint> {
    grid.iter()
        .map(|&f| FrequencyPoint {
            f,
            h: frequency_response(filter, f).ok(),
        })
        .collect()
}

/// CSV with header `f,re,im,abs,arg`. Pole rows carry `NaN` for the
/// components and `inf` for the magnitude.
pub fn sweep_csv(points: &[FrequencyPoint]) -> String {
    let mut out = String::from("f,re,im,abs,arg\n");
    for p in points {
        match p.h {
            Some(h) => out.push_str(&format!(
                "{:?},{:?},{:?},{:?},{:?}\n",
                p.f,
                h.re,
                h.im,
                h.norm(),
                h.arg()
            )),
            None => out.push_str(&format!("{:?},NaN,NaN,inf,NaN\n", p.f)),
        }
    }
    out
}

/// Residual of `y[k] = H(f)e^{j2πfk}` against the recursion with input
/// `e^{j2πfk}`, at index `k`.
pub fn eigen_residual(filter: &RecursiveFilter, f: f64, k: i64) -> Result<f64> {
    let h = frequency_response(filter, f)?;
    let y = |j: i64| h * tone(f, j);
    Ok((y(k) - filter.feedback(&y, k) - tone(f, k)).norm())
}

/// Fact 3 for the two-sided tone `e^{j2πfk}`: its associated output is
/// `H(f)e^{j2πfk}`, so `y − H(f)e^{j2πfk}` must be homogeneous on
/// `window`. The tone has infinite support, so this needs a stable filter
/// for `h ∗ x` to converge.
pub fn tone_decomposition<Y: Sequence + ?Sized>(
    filter: &RecursiveFilter,
    f: f64,
    y: &Y,
    window: Window,
    tol: f64,
) -> Result<Fact3Decomposition> {
    if !is_stable(filter) {
        return Err(Error::Unstable {
            max_root: spectral_radius(filter),
        });
    }
    let h = frequency_response(filter, f)?;
    let y_tilde = |k: i64| h * tone(f, k);
    Ok(split_homogeneous(filter, y, &y_tilde, window, tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::associated_lti::impulse_response_prefix;
    use crate::recursive_filter::run_two_sided;

    fn half() -> RecursiveFilter {
        RecursiveFilter::from_real(&[0.5]).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn response_examples() {
        assert!((frequency_response(&half(), 0.0).unwrap() - c(2.0, 0.0)).norm() < 1e-15);
        assert!((frequency_response(&half(), 0.5).unwrap() - c(2.0 / 3.0, 0.0)).norm() < 1e-15);
        let one = RecursiveFilter::from_real(&[1.0]).unwrap();
        assert!(matches!(
            frequency_response(&one, 0.0),
            Err(Error::PoleOnUnitCircle { .. })
        ));
    }

    #[test]
    fn dtft_examples() {
        let h = impulse_response_prefix(&half(), 40).unwrap();
        let v = dtft_truncated(&h, 0.0, 40).unwrap();
        assert!((v - c(2.0 * (1.0 - 2f64.powi(-40)), 0.0)).norm() < 2e-12);

        let g = impulse_response_prefix(&RecursiveFilter::from_real(&[-0.3, 0.2]).unwrap(), 5).unwrap();
        assert_eq!(dtft_truncated(&g, 0.37, 1).unwrap(), g.at(0));

        let h = impulse_response_prefix(&half(), 60).unwrap();
        let v = dtft_truncated(&h, 0.25, 60).unwrap();
        assert!((v - frequency_response(&half(), 0.25).unwrap()).norm() < 1e-12);

        assert!(dtft_truncated(&h, 0.0, 0).is_err());
    }

    #[test]
    fn settling_examples() {
        assert_eq!(settling_time(&half(), 0.0, 1e-3, 64), Ok(10));
        assert_eq!(settling_time(&half(), 0.0, 2.1, 64), Ok(0));
        let g = RecursiveFilter::from_real(&[2.5, -1.0]).unwrap();
        assert!(matches!(settling_time(&g, 0.0, 1e-3, 64), Err(Error::Unstable { .. })));
        assert_eq!(settling_time(&half(), 0.0, 1e-3, 5), Err(Error::NotSettled { cap: 5 }));
        assert!(settling_time(&half(), 0.0, 0.0, 5).is_err());
    }

    #[test]
    fn settling_error_is_closed_form() {
        // |y[k] − 2| = 2⁻ᵏ for the DC input
        let e = settling_errors(&half(), 0.0, 30).unwrap();
        for (k, v) in e.iter().enumerate() {
            assert!((v - 0.5f64.powi(k as i32)).abs() < 1e-15);
        }
    }

    #[test]
    fn settling_requires_tail_condition() {
        // oscillating error: roots ±0.9j, magnitude of error not monotone
        let f = RecursiveFilter::from_real(&[0.0, -0.81]).unwrap();
        let e = settling_errors(&f, 0.1, 200).unwrap();
        let k = settling_time(&f, 0.1, 1e-3, 200).unwrap();
        assert!(e[k as usize..].iter().all(|v| *v <= 1e-3));
        assert!(e[k as usize - 1] > 1e-3);
    }

    #[test]
    fn sweep_examples() {
        let pts = freq_sweep(&half(), &[0.0, 0.25, 0.5]);
        assert!((pts[0].h.unwrap() - c(2.0, 0.0)).norm() < 1e-15);
        let want = (c(1.0, 0.0) - 0.5 * Complex64::from_polar(1.0, -std::f64::consts::FRAC_PI_2)).inv();
        assert!((pts[1].h.unwrap() - want).norm() < 1e-15);
        assert!((pts[2].h.unwrap() - c(2.0 / 3.0, 0.0)).norm() < 1e-15);

        assert!(freq_sweep(&half(), &[]).is_empty());

        let grid = uniform_grid(256).unwrap();
        let pts = freq_sweep(&half(), &grid);
        let best = pts
            .iter()
            .max_by(|a, b| a.h.unwrap().norm().partial_cmp(&b.h.unwrap().norm()).unwrap())
            .unwrap();
        assert_eq!(best.f, 0.0);
    }

    #[test]
    fn grid_and_csv() {
        assert_eq!(uniform_grid(4).unwrap(), vec![-0.5, -0.25, 0.0, 0.25]);
        assert!(uniform_grid(0).is_err());
        let one = RecursiveFilter::from_real(&[1.0]).unwrap();
        let csv = sweep_csv(&freq_sweep(&one, &[0.0, 0.5]));
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "f,re,im,abs,arg");
        assert_eq!(lines[1], "0.0,NaN,NaN,inf,NaN");
        assert!(lines[2].starts_with("0.5,0.5,"));
        assert!(csv.ends_with('\n'));
    }

    #[test]
    fn conjugate_symmetry_for_real_filters() {
        let f = RecursiveFilter::from_real(&[0.6, -0.2, 0.1]).unwrap();
        for f0 in [0.03, 0.1, 0.27, 0.44] {
            let a = frequency_response(&f, f0).unwrap();
            let b = frequency_response(&f, -f0).unwrap();
            assert!((a - b.conj()).norm() < 1e-12);
        }
    }

    #[test]
    fn tone_decomposition_recovers_geometric_part() {
        let f = half();
        let window = Window::new(0, 25).unwrap();
        let x = exp_signal(0.13, window, true);
        let y = run_two_sided(&f, &Initialization::zeros(&f), &x, window.pad_left(1)).unwrap();
        let d = tone_decomposition(&f, 0.13, &y, window, 1e-9).unwrap();
        assert!(d.report.ok);
        let c0 = d.homogeneous.at(0);
        assert!(c0.norm() > 0.1);
        for k in 1..=25 {
            assert!((d.homogeneous.at(k) - c0 * 0.5f64.powi(k as i32)).norm() < 1e-12);
        }
        let g = RecursiveFilter::from_real(&[2.5, -1.0]).unwrap();
        assert!(matches!(
            tone_decomposition(&g, 0.1, &y, window, 1e-9),
            Err(Error::Unstable { .. })
        ));
    }
}
