//! Deterministic CSV emission. All floating-point output uses 9 significant
//! digits; exact rational values are additionally emitted as `p/q` columns.

use num_rational::BigRational;
use num_traits::ToPrimitive;

use super::{PointEstimate, TrialRecord};

/// Formats with 9 significant digits, deterministically. Values far from
/// unit scale fall back to scientific notation.
pub fn fmt_sig(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.8e}", x);
    let exp: i32 = sci[sci.find('e').unwrap() + 1..].parse().unwrap();
    if (-4..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        format!("{:.*}", decimals, x)
    } else {
        sci
    }
}

/// `p/q` for non-integers, plain `p` otherwise.
pub fn rational_str(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn opt_sig(x: Option<f64>) -> String {
    x.map(fmt_sig).unwrap_or_default()
}

/// Record CSV: one row per trial, sorted by (grid index, trial) upstream.
/// `echo` lines are embedded as `#`-prefixed comments before the header so
/// that the file alone suffices to re-run the experiment.
pub fn records_csv(problem: &str, records: &[TrialRecord], echo: &[String]) -> String {
    let mut out = String::new();
    for line in echo {
        out.push_str("# ");
        out.push_str(line);
        out.push('\n');
    }
    out.push_str("problem,beta,tau,trial,alg,opt,ratio,good_steps,bad_steps,alg_exact,opt_exact,ratio_exact\n");
    for r in records {
        let ratio_f = r.ratio.as_ref().and_then(|x| x.to_f64());
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}\n",
            problem,
            fmt_sig(r.beta),
            fmt_sig(r.tau),
            r.trial,
            fmt_sig(r.alg.to_f64().unwrap()),
            fmt_sig(r.opt.to_f64().unwrap()),
            opt_sig(ratio_f),
            r.good_steps,
            r.bad_steps,
            rational_str(&r.alg),
            rational_str(&r.opt),
            r.ratio.as_ref().map(rational_str).unwrap_or_default(),
        ));
    }
    out
}

/// Estimates CSV: one row per grid point.
pub fn estimates_csv(estimates: &[PointEstimate], echo: &[String]) -> String {
    let mut out = String::new();
    for line in echo {
        out.push_str("# ");
        out.push_str(line);
        out.push('\n');
    }
    out.push_str("problem,beta,tau,trials,mean_ratio,stderr,ci_low,ci_high,bound,margin,pass\n");
    for e in estimates {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            e.problem,
            fmt_sig(e.beta),
            fmt_sig(e.tau),
            e.trials,
            fmt_sig(e.mean_ratio),
            opt_sig(e.stderr),
            opt_sig(e.ci.map(|c| c.0)),
            opt_sig(e.ci.map(|c| c.1)),
            fmt_sig(e.bound),
            fmt_sig(e.margin),
            e.pass,
        ));
    }
    out
}
