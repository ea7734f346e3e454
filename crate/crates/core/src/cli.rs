//! `rlti` command-line front end.
//!
//! Exit codes: 0 on success (including a verifier that reports `ok:
//! false`), 2 on usage or parse errors, 3 on numerical errors such as a
//! singular backward step.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand::Rng;

use crate::associated_lti::{
    decompose_fact3, finite_or_max, impulse_response_closed, impulse_response_prefix, lti_output, verify_fact1_output,
    verify_fact2, AssociatedLti, FactReport,
};
use crate::error::Error;
use crate::random;
use crate::records::{
    to_pair, FilterRecord, FreqRecord, GeometricSumRecord, ImpulseReport, InitRecord, RocRecord, RocReport,
    SettleReport, SignalRecord, VerifyBundle,
};
use crate::recursive_filter::{is_stable, run_two_sided, Initialization, RecursiveFilter, DEFAULT_TOL};
use crate::sequences::{FiniteSignal, Window};
use crate::spectral::{eigen_residual, freq_sweep, settling_time, sweep_csv, uniform_grid};
use crate::ztransform::{all_roc_impulse_responses, causal_ir_via_fact5, poles};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "rlti", version, about = "Recursive filters and their associated LTI systems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the initialized recursion over a window (forward and backward).
    Simulate(Common),
    /// Impulse response of the associated LTI system: simulated prefix and closed form.
    Impulse {
        #[command(flatten)]
        common: Common,
        /// Number of prefix samples.
        #[arg(long, default_value_t = 16, value_parser = clap::value_parser!(u32).range(1..))]
        length: u32,
    },
    /// Frequency response on a uniform grid over [-1/2, 1/2).
    Freq {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 256, value_parser = clap::value_parser!(u32).range(1..))]
        points: u32,
    },
    /// Regions of convergence and the impulse response each one selects.
    Roc(Common),
    /// Check facts 1-5 on the given or a seeded random input.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Add 1 to the associated output at this index before the fact 1 check.
        #[arg(long, allow_hyphen_values = true)]
        corrupt: Option<i64>,
    },
    /// Settling time of the zero-initialized filter driven by u[k]e^{j2πfk}.
    Settle {
        #[command(flatten)]
        common: Common,
        /// Frequency in cycles/sample.
        #[arg(long = "freq", default_value_t = 0.0, allow_hyphen_values = true)]
        freq: f64,
        #[arg(long, default_value_t = 1000)]
        kcap: i64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Coefficients α₁..α_N: "0.5", "2.5,-1", "0.3+0.4j", or @file.json with {"alpha": [[re, im], ...]}.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_alpha)]
    pub alpha: RecursiveFilterArg,
    /// Initial values y[-N]..y[-1] (default all zero), or @file.json with {"init": [...]}.
    #[arg(long, allow_hyphen_values = true)]
    pub init: Option<String>,
    /// Input signal "v@k,v@k,...", or @file.json with {"start": k, "samples": [...]}.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_signal)]
    pub x: Option<FiniteSignal>,
    /// Index window "a:b", inclusive.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_window)]
    pub window: Option<Window>,
    #[arg(long, value_parser = parse_tol)]
    pub tol: Option<f64>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// Parsed filter, wrapped so clap can carry it.
#[derive(Debug, Clone)]
pub struct RecursiveFilterArg(pub RecursiveFilter);

fn read_json<T: serde::de::DeserializeOwned>(path: &str) -> Result<T, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {path}: {e}"))?;
    serde_json::from_str(&text).map_err(|e| format!("{path}: {e}"))
}

/// Complex literal: "1.5", "-2", "0.3+0.4j", "0.3-0.4j", "2j", "-j".
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let t = s.trim();
    let bad = || format!("'{s}' is not a complex number (use re or re+imj)");
    if t.is_empty() {
        return Err(bad());
    }
    let Some(body) = t.strip_suffix(['j', 'i']) else {
        return t.parse::<f64>().map(|re| Complex64::new(re, 0.0)).map_err(|_| bad());
    };
    // split at the last sign that is not a leading sign or an exponent sign
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let parse_im = |p: &str| -> Result<f64, String> {
        match p {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => p.parse::<f64>().map_err(|_| bad()),
        }
    };
    match split {
        Some(i) => {
            let re = body[..i].parse::<f64>().map_err(|_| bad())?;
            Ok(Complex64::new(re, parse_im(&body[i..])?))
        }
        None => Ok(Complex64::new(0.0, parse_im(body)?)),
    }
}

fn parse_complex_list(s: &str) -> Result<Vec<Complex64>, String> {
    s.split(',').map(parse_complex).collect()
}

fn parse_alpha(s: &str) -> Result<RecursiveFilterArg, String> {
    let filter = if let Some(path) = s.strip_prefix('@') {
        read_json::<FilterRecord>(path)?.to_filter()
    } else {
        RecursiveFilter::new(parse_complex_list(s)?)
    };
    filter.map(RecursiveFilterArg).map_err(|e| e.to_string())
}

/// "v@k,v@k,..."; an empty string is the zero signal.
pub fn parse_signal(s: &str) -> Result<FiniteSignal, String> {
    if let Some(path) = s.strip_prefix('@') {
        return Ok(FiniteSignal::from(&read_json::<SignalRecord>(path)?));
    }
    if s.trim().is_empty() {
        return Ok(FiniteSignal::zero());
    }
    let mut entries: Vec<(i64, Complex64)> = Vec::new();
    for item in s.split(',') {
        let (v, k) = item
            .rsplit_once('@')
            .ok_or_else(|| format!("'{item}' is not of the form value@index"))?;
        let k: i64 = k.trim().parse().map_err(|_| format!("'{k}' is not an integer index"))?;
        if entries.iter().any(|(j, _)| *j == k) {
            return Err(format!("index {k} given twice"));
        }
        entries.push((k, parse_complex(v)?));
    }
    let lo = entries.iter().map(|e| e.0).min().expect("non-empty");
    let hi = entries.iter().map(|e| e.0).max().expect("non-empty");
    let mut samples = vec![Complex64::new(0.0, 0.0); (hi - lo + 1) as usize];
    for (k, v) in entries {
        samples[(k - lo) as usize] = v;
    }
    Ok(FiniteSignal::new(lo, samples))
}

pub fn parse_window(s: &str) -> Result<Window, String> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| format!("'{s}' is not of the form a:b"))?;
    let a: i64 = a.trim().parse().map_err(|_| format!("'{a}' is not an integer"))?;
    let b: i64 = b.trim().parse().map_err(|_| format!("'{b}' is not an integer"))?;
    Window::new(a, b).map_err(|e| e.to_string())
}

fn parse_tol(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("'{s}' is not a number"))?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("tolerance must be positive, got {s}"))
    }
}

/// Result of one invocation: exit code plus what goes to stdout/stderr.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn usage(msg: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            stdout: String::new(),
            stderr: msg.into(),
        }
    }
}

enum Failure {
    Usage(String),
    Numerical(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument(m) => Failure::Usage(m),
            other => Failure::Numerical(other),
        }
    }
}

/// Parse `args` (program name first) and run the command. With `--out`,
/// the output is written to that file and stdout stays empty.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.exit_code() == 0 {
                Outcome {
                    code: EXIT_OK,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                Outcome::usage(text)
            };
        }
    };
    let out_path = common_of(&cli.command).out.clone();
    match execute(&cli.command) {
        Ok(text) => match out_path {
            Some(path) => match std::fs::write(&path, &text) {
                Ok(()) => Outcome {
                    code: EXIT_OK,
                    stdout: String::new(),
                    stderr: String::new(),
                },
                Err(e) => Outcome::usage(format!("error: --out: cannot write {}: {e}\n", path.display())),
            },
            None => Outcome {
                code: EXIT_OK,
                stdout: text,
                stderr: String::new(),
            },
        },
        Err(Failure::Usage(m)) => Outcome::usage(format!("error: {m}\n")),
        Err(Failure::Numerical(e)) => Outcome {
            code: EXIT_NUMERICAL,
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

fn common_of(cmd: &Command) -> &Common {
    match cmd {
        Command::Simulate(c) | Command::Roc(c) => c,
        Command::Impulse { common, .. }
        | Command::Freq { common, .. }
        | Command::Verify { common, .. }
        | Command::Settle { common, .. } => common,
    }
}

fn execute(cmd: &Command) -> Result<String, Failure> {
    match cmd {
        Command::Simulate(c) => cmd_simulate(c),
        Command::Impulse { common, length } => cmd_impulse(common, *length as usize),
        Command::Freq { common, points } => cmd_freq(common, *points as usize),
        Command::Roc(c) => cmd_roc(c),
        Command::Verify { common, corrupt } => cmd_verify(common, *corrupt),
        Command::Settle { common, freq, kcap } => cmd_settle(common, *freq, *kcap),
    }
}

fn init_of(c: &Common, filter: &RecursiveFilter) -> Result<Initialization, Failure> {
    let Some(spec) = &c.init else {
        return Ok(Initialization::zeros(filter));
    };
    let values = if let Some(path) = spec.strip_prefix('@') {
        read_json::<InitRecord>(path)
            .map_err(|m| Failure::Usage(format!("--init: {m}")))?
            .init
            .into_iter()
            .map(crate::records::from_pair)
            .collect()
    } else {
        parse_complex_list(spec).map_err(|m| Failure::Usage(format!("--init: {m}")))?
    };
    Initialization::new(filter, values).map_err(|e| Failure::Usage(format!("--init: {e}")))
}

fn to_json<T: serde::Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string(v).expect("records serialize");
    s.push('\n');
    s
}

fn signal_csv(start: i64, values: &[Complex64]) -> String {
    let mut out = String::from("k,re,im\n");
    for (i, v) in values.iter().enumerate() {
        let _ = writeln!(out, "{},{:?},{:?}", start + i as i64, v.re, v.im);
    }
    out
}

/// `simulate`: the initialized output over the window, every sample kept.
fn cmd_simulate(c: &Common) -> Result<String, Failure> {
    let filter = &c.alpha.0;
    let init = init_of(c, filter)?;
    let x = c.x.clone().unwrap_or_default();
    let window = c.window.unwrap_or(Window::new(0, 15)?);
    let y = run_two_sided(filter, &init, &x, window)?;
    let values = y.window_values(window);
    Ok(match c.format.unwrap_or(Format::Json) {
        Format::Json => to_json(&SignalRecord::from_values(window.kmin(), &values)),
        Format::Csv => signal_csv(window.kmin(), &values),
    })
}

fn cmd_impulse(c: &Common, length: usize) -> Result<String, Failure> {
    let filter = &c.alpha.0;
    let prefix = impulse_response_prefix(filter, length)?;
    if c.format == Some(Format::Csv) {
        let w = Window::new(0, length as i64 - 1)?;
        return Ok(signal_csv(0, &prefix.window_values(w)));
    }
    let (closed, error) = match impulse_response_closed(filter) {
        Ok(h) => (Some(GeometricSumRecord::from(&h)), None),
        Err(e) => (None, Some(e.to_string())),
    };
    Ok(to_json(&ImpulseReport {
        alpha: FilterRecord::from(filter).alpha,
        prefix: SignalRecord::from(&prefix),
        closed,
        error,
    }))
}

fn cmd_freq(c: &Common, points: usize) -> Result<String, Failure> {
    let grid = uniform_grid(points)?;
    let sweep = freq_sweep(&c.alpha.0, &grid);
    Ok(match c.format.unwrap_or(Format::Csv) {
        Format::Csv => sweep_csv(&sweep),
        Format::Json => to_json(
            &sweep
                .iter()
                .map(|p| FreqRecord {
                    f: p.f,
                    h: p.h.map(to_pair),
                })
                .collect::<Vec<_>>(),
        ),
    })
}

fn cmd_roc(c: &Common) -> Result<String, Failure> {
    let filter = &c.alpha.0;
    let responses = all_roc_impulse_responses(filter)?;
    let report = RocReport {
        poles: poles(filter).into_iter().map(to_pair).collect(),
        rocs: responses.iter().map(RocRecord::from).collect(),
    };
    Ok(match c.format.unwrap_or(Format::Json) {
        Format::Json => to_json(&report),
        Format::Csv => {
            let mut out = String::from("inner,outer,support,stable_on_unit_circle\n");
            for r in &report.rocs {
                let support = serde_json::to_value(r.support).expect("enum serializes");
                let _ = writeln!(
                    out,
                    "{:?},{:?},{},{}",
                    r.inner,
                    r.outer.0,
                    support.as_str().unwrap_or_default(),
                    r.stable_on_unit_circle
                );
            }
            out
        }
    })
}

/// Run all five fact checks. Absolute tolerances are scaled by the largest
/// magnitude in play, so unstable filters with large outputs are judged
/// on relative error.
pub fn verify_bundle(
    filter: &RecursiveFilter,
    x: Option<&FiniteSignal>,
    window: Window,
    tol: f64,
    seed: u64,
    corrupt: Option<i64>,
) -> Vec<FactReport> {
    let mut rng = random::rng(seed);
    let x = x.cloned().unwrap_or_else(|| random::signal_in(&mut rng, -5..=5, 6));
    let n = filter.order();
    let padded = window.pad_left(n);
    let sys = AssociatedLti::new(filter);
    let failed = |fact: u8, e: &Error| FactReport {
        fact,
        ok: false,
        max_residual: f64::MAX,
        counterexample_k: None,
        note: Some(e.to_string()),
    };

    let mut reports = Vec::with_capacity(5);

    // fact 1
    let y_tilde = lti_output(&sys, &x, padded);
    reports.push(match &y_tilde {
        Ok(yt) => {
            let yt = match corrupt {
                Some(k) => yt + &FiniteSignal::impulse(k),
                None => yt.clone(),
            };
            let scale = yt.max_abs().max(1.0);
            verify_fact1_output(filter, &x, &yt, window, tol * scale)
        }
        Err(e) => failed(1, e),
    });

    // fact 2, on the causal part of x
    let xc = x.gate_from(0);
    let kmax = window.kmax().max(0);
    let scale2 = lti_output(&sys, &xc, Window::new(0, kmax).expect("kmax >= 0"))
        .map(|s| s.max_abs().max(1.0))
        .unwrap_or(1.0);
    reports.push(verify_fact2(filter, &xc, kmax, tol * scale2).unwrap_or_else(|e| failed(2, &e)));

    // fact 3: the initialized output from a random init
    let init_values: Vec<Complex64> = (0..n).map(|_| random::complex(&mut rng, 1.0)).collect();
    let init = Initialization::new(filter, init_values).expect("length N");
    let (w3, note3) = match run_two_sided(filter, &init, &x, padded) {
        Err(Error::SingularBackstep) => (
            Window::new(0, kmax).expect("kmax >= 0"),
            Some("alpha_N = 0: checked on k >= 0 only"),
        ),
        _ => (window, None),
    };
    reports.push(
        run_two_sided(filter, &init, &x, w3.pad_left(n))
            .map_err(Failure::from)
            .and_then(|y| {
                let scale = y.max_abs().max(1.0);
                decompose_fact3(filter, &x, &y, w3, tol * scale).map_err(Failure::from)
            })
            .map(|d| match note3 {
                Some(n) => d.report.with_note(n),
                None => d.report,
            })
            .unwrap_or_else(|f| match f {
                Failure::Numerical(e) => failed(3, &e),
                Failure::Usage(m) => failed(3, &Error::InvalidArgument(m)),
            }),
    );

    // fact 4: H(f)e^{j2πfk} solves the recursion with input e^{j2πfk}
    let mut worst: f64 = 0.0;
    let mut pole = None;
    for _ in 0..8 {
        let f = rng.gen_range(-0.5..0.5);
        for k in [-7i64, 0, 13] {
            match eigen_residual(filter, f, k) {
                Ok(r) => worst = worst.max(finite_or_max(r)),
                Err(e) => pole = Some(e),
            }
        }
    }
    let mut r4 = FactReport {
        fact: 4,
        ok: pole.is_none() && worst <= tol,
        max_residual: worst,
        counterexample_k: None,
        note: None,
    };
    if let Some(e) = pole {
        r4 = r4.with_note(e.to_string());
    } else if !is_stable(filter) {
        r4 = r4.with_note("uniqueness not applicable: filter unstable");
    }
    reports.push(r4);

    // fact 5: causal ROC expansion against the simulated prefix
    let len = 2 * n + 17;
    reports.push(
        match (causal_ir_via_fact5(filter), impulse_response_prefix(filter, len)) {
            (Ok(h), Ok(prefix)) => {
                let scale = prefix.max_abs().max(f64::MIN_POSITIVE);
                let mut worst: f64 = 0.0;
                let mut bad = None;
                for k in 0..len as i64 {
                    let rel = (h.h.eval(k) - prefix.at(k)).norm() / scale.max(prefix.at(k).norm());
                    if !(rel <= 1e-8) && bad.is_none() {
                        bad = Some(k);
                    }
                    worst = worst.max(finite_or_max(rel));
                }
                FactReport {
                    fact: 5,
                    ok: bad.is_none(),
                    max_residual: worst,
                    counterexample_k: bad,
                    note: None,
                }
            }
            (Err(e), _) | (_, Err(e)) => failed(5, &e),
        },
    );

    reports
}

fn cmd_verify(c: &Common, corrupt: Option<i64>) -> Result<String, Failure> {
    let filter = &c.alpha.0;
    let window = c.window.unwrap_or(Window::new(-10, 30)?);
    let tol = c.tol.unwrap_or(DEFAULT_TOL);
    let reports = verify_bundle(filter, c.x.as_ref(), window, tol, c.seed, corrupt);
    Ok(match c.format.unwrap_or(Format::Json) {
        Format::Json => to_json(&VerifyBundle {
            alpha: FilterRecord::from(filter).alpha,
            seed: c.seed,
            reports,
        }),
        Format::Csv => {
            let mut out = String::from("fact,ok,max_residual,counterexample_k\n");
            for r in &reports {
                let k = r.counterexample_k.map(|k| k.to_string()).unwrap_or_default();
                let _ = writeln!(out, "{},{},{:?},{}", r.fact, r.ok, r.max_residual, k);
            }
            out
        }
    })
}

fn cmd_settle(c: &Common, f: f64, kcap: i64) -> Result<String, Failure> {
    let tol = c.tol.unwrap_or(1e-3);
    let report = match settling_time(&c.alpha.0, f, tol, kcap) {
        Ok(k) => SettleReport {
            f,
            tol,
            kcap,
            settled: true,
            settling_time: Some(k),
        },
        Err(Error::NotSettled { .. }) => SettleReport {
            f,
            tol,
            kcap,
            settled: false,
            settling_time: None,
        },
        Err(e) => return Err(e.into()),
    };
    Ok(match c.format.unwrap_or(Format::Json) {
        Format::Json => to_json(&report),
        Format::Csv => format!(
            "f,tol,kcap,settled,settling_time\n{:?},{:?},{},{},{}\n",
            f,
            tol,
            kcap,
            report.settled,
            report.settling_time.map(|k| k.to_string()).unwrap_or_default()
        ),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_literals() {
        assert_eq!(parse_complex("0.5").unwrap(), Complex64::new(0.5, 0.0));
        assert_eq!(parse_complex("-1").unwrap(), Complex64::new(-1.0, 0.0));
        assert_eq!(parse_complex("0.3+0.4j").unwrap(), Complex64::new(0.3, 0.4));
        assert_eq!(parse_complex("0.3-0.4j").unwrap(), Complex64::new(0.3, -0.4));
        assert_eq!(parse_complex("-2j").unwrap(), Complex64::new(0.0, -2.0));
        assert_eq!(parse_complex("j").unwrap(), Complex64::new(0.0, 1.0));
        assert_eq!(parse_complex("1e-3+2e+1j").unwrap(), Complex64::new(1e-3, 20.0));
        assert!(parse_complex("abc").is_err());
        assert!(parse_complex("").is_err());
        assert!(parse_complex("1+xj").is_err());
    }

    #[test]
    fn signal_syntax() {
        let s = parse_signal("1@0,2@1").unwrap();
        assert_eq!(s, FiniteSignal::from_real(0, &[1.0, 2.0]));
        let s = parse_signal("1@-1").unwrap();
        assert_eq!(s, FiniteSignal::impulse(-1));
        let s = parse_signal("1+1j@3, 2@5").unwrap();
        assert_eq!(s.at(3), Complex64::new(1.0, 1.0));
        assert_eq!(s.at(4), Complex64::new(0.0, 0.0));
        assert!(parse_signal("1@0,2@0").is_err());
        assert!(parse_signal("1").is_err());
        assert!(parse_signal("").unwrap().is_zero());
    }

    #[test]
    fn window_syntax() {
        assert_eq!(parse_window("-2:-2").unwrap(), Window::new(-2, -2).unwrap());
        assert!(parse_window("3:1").is_err());
        assert!(parse_window("3").is_err());
    }

    #[test]
    fn tolerance_must_be_positive() {
        assert!(parse_tol("0").is_err());
        assert!(parse_tol("-1e-3").is_err());
        assert_eq!(parse_tol("1e-6").unwrap(), 1e-6);
    }
}
