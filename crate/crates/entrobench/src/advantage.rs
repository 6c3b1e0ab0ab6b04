//! Circuit-size thresholds for certified classical superiority.
//!
//! Given an entropy-density threshold `c` (the density beyond which a
//! classical solver provably beats the device on the target problem) and
//! effective depolarising rates, these bounds give the depth at which a
//! width-`n` brickwork circuit's output crosses that density. Depths at or
//! above the bound certify that quantum advantage is out of reach.
//!
//! The finite-width bound requires evaluating ln((2^n - 1) / (2^(n(1-c)) - 1))
//! for widths in the hundreds, so it is computed in the log domain via
//! `ln_2n_minus_1(x) = x ln 2 + ln(1 - 2^-x)`.

use crate::error::{Error, Result};

/// ln(2^x - 1) evaluated without overflow for large x.
fn ln_2x_minus_1(x: f64) -> f64 {
    x * std::f64::consts::LN_2 + (-(-x * std::f64::consts::LN_2).exp()).ln_1p()
}

fn check_c_open(c: f64) -> Result<()> {
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::InvalidArgument {
            name: "c",
            reason: format!("entropy-density threshold must lie in (0, 1), got {c}"),
        });
    }
    Ok(())
}

fn check_p2(p2: f64) -> Result<()> {
    if !(p2 > 0.0) {
        return Err(Error::InvalidArgument {
            name: "p2",
            reason: format!("two-qubit error rate must be positive, got {p2}"),
        });
    }
    Ok(())
}

/// Depth at which a width-`n` circuit with rates (`alpha1`, `alpha2`) is
/// certified to reach entropy density `c`:
/// ln((2^n - 1)/(2^(n(1-c)) - 1)) / (2 (2 alpha1 n + alpha2 (n-1))).
pub fn depth_threshold(n: usize, c: f64, alpha1: f64, alpha2: f64) -> Result<f64> {
    check_c_open(c)?;
    if n < 1 {
        return Err(Error::InvalidArgument {
            name: "n",
            reason: "width must be at least 1".into(),
        });
    }
    let n_f = n as f64;
    let coefficient = 2.0 * (2.0 * alpha1 * n_f + alpha2 * (n_f - 1.0));
    if coefficient <= 0.0 {
        return Err(Error::InvalidArgument {
            name: "alpha",
            reason: format!(
                "noise coefficient 2(2*alpha1*n + alpha2*(n-1)) vanishes at n = {n}"
            ),
        });
    }
    let numerator = ln_2x_minus_1(n_f) - ln_2x_minus_1(n_f * (1.0 - c));
    Ok(numerator / coefficient)
}

/// Wide-register limit of [`depth_threshold`] with dominant two-qubit noise:
/// c ln 2 / (2 p2).
pub fn depth_threshold_asymptotic(c: f64, p2: f64) -> Result<f64> {
    if !(c > 0.0 && c <= 1.0) {
        return Err(Error::InvalidArgument {
            name: "c",
            reason: format!("entropy-density threshold must lie in (0, 1], got {c}"),
        });
    }
    check_p2(p2)?;
    Ok(c * std::f64::consts::LN_2 / (2.0 * p2))
}

/// Previously published depth condition for the same setting:
/// ln(1/(1-c)) / (2 p2).
pub fn prior_threshold(c: f64, p2: f64) -> Result<f64> {
    check_c_open(c)?;
    check_p2(p2)?;
    Ok(-(1.0 - c).ln() / (2.0 * p2))
}

/// f(c) = c ln 2 + ln(1 - c). Nonpositive on [0, 1), which certifies the
/// asymptotic bound here is at least as tight as the prior one.
pub fn dominance_gap(c: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&c) {
        return Err(Error::InvalidArgument {
            name: "c",
            reason: format!("dominance gap is defined on [0, 1), got {c}"),
        });
    }
    Ok(c * std::f64::consts::LN_2 + (1.0 - c).ln())
}

/// One row of the advantage frontier.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrontierRow {
    pub n: usize,
    pub this_work_depth: f64,
    pub prior_depth: f64,
}

/// Frontier table with its two wide-register constants.
#[derive(Clone, Debug, PartialEq)]
pub struct ThresholdReport {
    pub c: f64,
    pub p2: f64,
    pub rows: Vec<FrontierRow>,
    pub this_work_asymptote: f64,
    pub prior_asymptote: f64,
}

/// Tabulate this work's bound (with alpha1 = 0, alpha2 = p2) against the
/// prior bound over the given widths. Widths where the noise coefficient
/// vanishes (n = 1 under pure two-qubit noise) are omitted.
pub fn frontier_curve(
    c: f64,
    p2: f64,
    n_range: impl IntoIterator<Item = usize>,
) -> Result<Vec<FrontierRow>> {
    check_c_open(c)?;
    check_p2(p2)?;
    let prior = prior_threshold(c, p2)?;
    let mut rows = Vec::new();
    for n in n_range {
        match depth_threshold(n, c, 0.0, p2) {
            Ok(depth) => rows.push(FrontierRow {
                n,
                this_work_depth: depth,
                prior_depth: prior,
            }),
            Err(Error::InvalidArgument { name: "alpha", .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(rows)
}

/// Full report over a width range.
pub fn threshold_report(
    c: f64,
    p2: f64,
    n_range: impl IntoIterator<Item = usize>,
) -> Result<ThresholdReport> {
    Ok(ThresholdReport {
        c,
        p2,
        rows: frontier_curve(c, p2, n_range)?,
        this_work_asymptote: depth_threshold_asymptotic(c, p2)?,
        prior_asymptote: prior_threshold(c, p2)?,
    })
}

/// Whether depth `d` at width `n` lies at or beyond the certified-classical
/// frontier. No rounding is applied.
pub fn certified_classical(n: usize, d: f64, c: f64, alpha1: f64, alpha2: f64) -> Result<bool> {
    Ok(d >= depth_threshold(n, c, alpha1, alpha2)?)
}
