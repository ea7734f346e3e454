//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.
//!
//! Run with `cargo test -p recursive-lti --test acceptance`.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::Rng;

use recursive_lti::associated_lti::{
    decompose_fact3, impulse_response_prefix, lti_output, verify_fact2, AssociatedLti,
};
use recursive_lti::cli::verify_bundle;
use recursive_lti::random;
use recursive_lti::recursive_filter::{
    check_solution_pair, run_backward, run_forward, Initialization, RecursiveFilter,
};
use recursive_lti::sequences::{exp_signal, impulse, FiniteSignal, Window};
use recursive_lti::spectral::{
    decay_ratios, dtft_truncated, frequency_response, settling_errors, settling_time, tone_decomposition, uniform_grid,
};
use recursive_lti::ztransform::{all_roc_impulse_responses, causal_ir_via_fact5, partial_fractions, poles};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn half() -> RecursiveFilter {
    RecursiveFilter::from_real(&[0.5]).unwrap()
}

fn two_pole() -> RecursiveFilter {
    RecursiveFilter::from_real(&[2.5, -1.0]).unwrap()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn criterion_1() -> Outcome {
    let filter = half();
    let t0 = Instant::now();
    let h = impulse_response_prefix(&filter, 30).map_err(|e| e.to_string())?;
    let elapsed = t0.elapsed();
    let mut worst: f64 = 0.0;
    for k in 0..30 {
        worst = worst.max((h.at(k) - c(0.5f64.powi(k as i32))).norm());
    }
    ensure(worst <= 1e-15, || format!("max error {worst:e}"))?;
    ensure(h.samples().len() == 30, || {
        format!("prefix has {} samples", h.samples().len())
    })?;
    ensure(elapsed < Duration::from_millis(1), || format!("took {elapsed:?}"))?;
    Ok(format!("max error {worst:e}, {elapsed:?}"))
}

fn criterion_2() -> Outcome {
    let filter = half();
    let x = FiniteSignal::from_real(0, &[1.0, 2.0]);
    let y = run_forward(&filter, &Initialization::zeros(&filter), &x, 2).map_err(|e| e.to_string())?;
    let expected = [1.0, 2.5, 1.25];
    for (k, e) in expected.iter().enumerate() {
        ensure(y.at(k as i64) == c(*e), || format!("y[{k}] = {}", y.at(k as i64)))?;
    }
    let report = verify_fact2(&filter, &x, 40, 1e-15).map_err(|e| e.to_string())?;
    ensure(report.ok && report.max_residual <= 1e-15, || format!("{report:?}"))?;
    Ok(format!(
        "y = {{1, 2.5, 1.25}}, fact 2 residual {:e}",
        report.max_residual
    ))
}

fn criterion_3() -> Outcome {
    let filter = half();
    let x = impulse(-1);
    let init = Initialization::zeros(&filter);
    let forward = run_forward(&filter, &init, &x, 0).map_err(|e| e.to_string())?;
    let backward = run_backward(&filter, &init, &x, -2).map_err(|e| e.to_string())?;
    let y_tilde =
        lti_output(&AssociatedLti::new(&filter), &x, Window::new(-3, 3).unwrap()).map_err(|e| e.to_string())?;
    ensure(forward.at(-1) == c(0.0), || format!("y[-1] = {}", forward.at(-1)))?;
    ensure(backward.at(-2) == c(-2.0), || format!("y[-2] = {}", backward.at(-2)))?;
    ensure(y_tilde.at(-1) == c(1.0), || format!("ỹ[-1] = {}", y_tilde.at(-1)))?;
    Ok("y[-1] = 0, y[-2] = -2, ỹ[-1] = 1".into())
}

fn criterion_4() -> Outcome {
    let filter = half();
    let h = impulse_response_prefix(&filter, 60).map_err(|e| e.to_string())?;
    let bound = 0.5f64.powi(60) / (1.0 - 0.5) + 1e-12;
    let mut worst: f64 = 0.0;
    for f in uniform_grid(32).map_err(|e| e.to_string())? {
        let exact = frequency_response(&filter, f).map_err(|e| e.to_string())?;
        let approx = dtft_truncated(&h, f, 60).map_err(|e| e.to_string())?;
        let err = (exact - approx).norm();
        ensure(err <= bound, || format!("f = {f}: error {err:e}"))?;
        worst = worst.max(err);
    }
    Ok(format!("32 points, max error {worst:e}"))
}

fn criterion_5() -> Outcome {
    let roc = causal_ir_via_fact5(&two_pole()).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for k in 0..=30 {
        let expected = (2f64.powi(2 * k + 2) - 1.0) / (3.0 * 2f64.powi(k));
        let rel = (roc.h.eval(k as i64) - c(expected)).norm() / expected;
        ensure(rel <= 1e-8, || format!("k = {k}: relative error {rel:e}"))?;
        worst = worst.max(rel);
    }
    Ok(format!("k = 0..30, max relative error {worst:e}"))
}

fn criterion_6() -> Outcome {
    let pf = partial_fractions(&two_pole()).map_err(|e| e.to_string())?;
    let find = |p: f64| {
        pf.terms()
            .iter()
            .find(|t| (t.pole - c(p)).norm() < 1e-10)
            .map(|t| t.residue)
            .ok_or_else(|| format!("no pole at {p}"))
    };
    let r2 = find(2.0)?;
    let r_half = find(0.5)?;
    ensure((r2 - c(4.0 / 3.0)).norm() <= 1e-10, || format!("residue at 2: {r2}"))?;
    ensure((r_half - c(-1.0 / 3.0)).norm() <= 1e-10, || {
        format!("residue at 1/2: {r_half}")
    })?;
    let sum: Complex64 = pf.terms().iter().map(|t| t.residue).sum();
    ensure((sum - c(1.0)).norm() <= 1e-12, || format!("sum of residues {sum}"))?;
    Ok(format!(
        "r(2) = {r2}, r(1/2) = {r_half}, sum - 1 = {:e}",
        (sum - c(1.0)).norm()
    ))
}

fn criterion_7() -> Outcome {
    let filter = two_pole();
    ensure(poles(&filter).len() == 2, || "expected 2 poles".into())?;
    let rocs = all_roc_impulse_responses(&filter).map_err(|e| e.to_string())?;
    ensure(rocs.len() == 3, || format!("{} annuli", rocs.len()))?;
    let middle = &rocs[1];
    ensure(
        (middle.roc.inner - 0.5).abs() < 1e-12 && (middle.roc.outer - 2.0).abs() < 1e-12,
        || format!("middle annulus {:?}", middle.roc),
    )?;
    let h0 = middle.h.eval(0);
    let hm1 = middle.h.eval(-1);
    ensure((h0 - c(-1.0 / 3.0)).norm() <= 1e-12, || format!("h[0] = {h0}"))?;
    ensure((hm1 - c(-2.0 / 3.0)).norm() <= 1e-12, || format!("h[-1] = {hm1}"))?;
    let report = check_solution_pair(
        &filter,
        &impulse(0),
        &|k: i64| middle.h.eval(k),
        Window::new(-15, 15).unwrap(),
        1e-9,
    );
    ensure(report.ok, || format!("δ check failed: {report:?}"))?;
    Ok(format!(
        "3 annuli, h[0] = {h0}, h[-1] = {hm1}, δ residual {:e}",
        report.max_residual
    ))
}

fn criterion_8() -> Outcome {
    let filter = half();
    let t = settling_time(&filter, 0.0, 1e-3, 1000).map_err(|e| e.to_string())?;
    ensure(t == 10, || format!("settling time {t}"))?;
    let errors = settling_errors(&filter, 0.0, 40).map_err(|e| e.to_string())?;
    let ratios = decay_ratios(&errors, 1.0);
    ensure(!ratios.is_empty(), || "no decay ratios".into())?;
    let worst = ratios.iter().map(|r| (r - 0.5).abs()).fold(0.0, f64::max);
    ensure(worst <= 1e-6, || format!("ratio deviation {worst:e}"))?;
    Ok(format!(
        "settling time 10, {} ratios within {worst:e} of 0.5",
        ratios.len()
    ))
}

/// Backward runs of a stable filter grow like `|λ|⁻ᵏ`, so `verify_bundle`
/// scales the tolerance by the largest magnitude in play.
fn criterion_9() -> Outcome {
    let t0 = Instant::now();
    let window = Window::new(-10, 30).unwrap();
    let mut rng = random::rng(2024);
    let mut worst = [0.0f64; 5];
    for case in 0..100u64 {
        let (filter, _) = random::stable_filter(&mut rng, 4, 0.95, 0.05);
        let x = random::signal_in(&mut rng, -5..=5, 6);
        let reports = verify_bundle(&filter, Some(&x), window, 1e-9, case, None);
        for r in reports.iter().filter(|r| r.fact != 4) {
            ensure(r.ok, || format!("case {case}, alpha {:?}: {r:?}", filter.coeffs()))?;
            let i = r.fact as usize - 1;
            worst[i] = worst[i].max(r.max_residual);
        }
    }
    let elapsed = t0.elapsed();
    ensure(elapsed < Duration::from_secs(10), || format!("took {elapsed:?}"))?;
    Ok(format!(
        "100 filters, max residual fact 1 {:e}, fact 2 {:e}, fact 3 {:e} (tol scaled by sup|y|), fact 5 {:e}, {elapsed:?}",
        worst[0], worst[1], worst[2], worst[4]
    ))
}

fn criterion_10() -> Outcome {
    let filter = half();
    let mut rng = random::rng(10);
    let window = Window::new(0, 30).unwrap();
    let mut worst: f64 = 0.0;
    for _ in 0..8 {
        let f: f64 = rng.gen_range(-0.5..0.5);
        let x = exp_signal(f, window, true);
        let y = run_forward(&filter, &Initialization::zeros(&filter), &x, window.kmax()).map_err(|e| e.to_string())?;

        let gated = decompose_fact3(&filter, &x, &y, window, 1e-9).map_err(|e| e.to_string())?;
        ensure(gated.report.ok, || format!("f = {f}: {:?}", gated.report))?;

        let split = tone_decomposition(&filter, f, &y, window, 1e-9).map_err(|e| e.to_string())?;
        ensure(split.report.ok, || format!("f = {f}: {:?}", split.report))?;
        let y0 = &split.homogeneous;
        let coeff = y0.at(0);
        for k in 1..=10 {
            let err = (y0.at(k) - coeff * 0.5f64.powi(k as i32)).norm();
            ensure(err <= 1e-9, || format!("f = {f}, k = {k}: error {err:e}"))?;
            worst = worst.max(err);
        }
    }
    Ok(format!("8 frequencies, max fit error {worst:e}"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("impulse response of α = 1/2", criterion_1),
        ("worked causal example", criterion_2),
        ("shifted-impulse divergence", criterion_3),
        ("frequency response vs truncated DTFT", criterion_4),
        ("two-pole closed form", criterion_5),
        ("partial fractions", criterion_6),
        ("ROC enumeration", criterion_7),
        ("settling time", criterion_8),
        ("random stable filters", criterion_9),
        ("homogeneous decomposition", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
