//! Fit the global-depolarising purity model to a sweep CSV.

use entrobench::heuristic::{
    fit_with_options, model_purity, FitMode, FitOptions, FitResult, PurityCurve, PurityPoint,
};

use crate::csvio::{read_sweep, write_file, SweepRow, FITTED_HEADER};
use crate::errors::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FitModeArg {
    Ratio,
    Free,
    TwoQubitOnly,
}

impl std::str::FromStr for FitModeArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "ratio" => Ok(FitModeArg::Ratio),
            "free" => Ok(FitModeArg::Free),
            "two-qubit-only" => Ok(FitModeArg::TwoQubitOnly),
            other => Err(format!(
                "unknown fit mode `{other}` (expected ratio|free|two-qubit-only)"
            )),
        }
    }
}

pub struct FitArgs {
    pub data: std::path::PathBuf,
    pub p1: f64,
    pub p2: f64,
    pub mode: FitModeArg,
    pub fit_beta: bool,
    pub weighted: bool,
    pub per_width: bool,
    pub report: Option<std::path::PathBuf>,
    pub fitted_curve: Option<std::path::PathBuf>,
}

/// Collapse sweep rows into one purity point per (width, depth): the mean
/// over runs, with the standard error attached when several runs exist.
/// Rows with non-positive purity are dropped here and counted by the fit.
pub fn curves_from_rows(rows: &[SweepRow]) -> Vec<PurityCurve> {
    let mut widths: Vec<usize> = rows.iter().map(|r| r.n).collect();
    widths.sort_unstable();
    widths.dedup();

    let mut curves = Vec::new();
    for n in widths {
        let mut depths: Vec<usize> = rows
            .iter()
            .filter(|r| r.n == n)
            .map(|r| r.depth)
            .collect();
        depths.sort_unstable();
        depths.dedup();
        let mut points = Vec::new();
        for depth in depths {
            let values: Vec<f64> = rows
                .iter()
                .filter(|r| r.n == n && r.depth == depth)
                .map(|r| r.purity)
                .collect();
            let count = values.len() as f64;
            let mean = values.iter().sum::<f64>() / count;
            let stderr = if values.len() >= 2 {
                let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>()
                    / (count - 1.0);
                Some((var / count).sqrt())
            } else {
                None
            };
            points.push(PurityPoint {
                depth,
                purity: mean,
                stderr,
            });
        }
        curves.push(PurityCurve { n, points });
    }
    curves
}

fn fit_report_block(result: &FitResult, width: Option<usize>, points: usize) -> String {
    let mut out = String::new();
    if let Some(n) = width {
        out.push_str(&format!("width = {n}\n"));
    }
    out.push_str(&format!("converged = {}\n", result.converged));
    out.push_str(&format!("iterations = {}\n", result.iterations));
    match result.theta {
        Some(theta) => out.push_str(&format!("theta = {theta}\n")),
        None => out.push_str("theta =\n"),
    }
    out.push_str(&format!("alpha1 = {}\n", result.params.alpha1));
    out.push_str(&format!("alpha2 = {}\n", result.params.alpha2));
    out.push_str(&format!("beta = {}\n", result.params.beta));
    out.push_str(&format!("residual_rms = {}\n", result.residual_rms));
    out.push_str(&format!("points = {points}\n"));
    out.push_str(&format!("excluded_points = {}\n", result.excluded_points));
    out
}

pub fn run_fit(args: &FitArgs) -> CliResult<()> {
    let rows = read_sweep(&args.data)?;
    let curves = curves_from_rows(&rows);

    let mode = match args.mode {
        FitModeArg::Ratio => FitMode::Ratio {
            p1: args.p1,
            p2: args.p2,
        },
        FitModeArg::Free => FitMode::Free,
        FitModeArg::TwoQubitOnly => FitMode::TwoQubitOnly,
    };
    let opts = FitOptions {
        mode,
        fit_beta: args.fit_beta,
        weighted: args.weighted,
        max_iterations: 200,
    };

    let jobs: Vec<(Option<usize>, Vec<PurityCurve>)> = if args.per_width {
        curves
            .into_iter()
            .map(|c| (Some(c.n), vec![c]))
            .collect()
    } else {
        vec![(None, curves)]
    };

    let mut report = String::new();
    let mut fitted_rows = String::from(FITTED_HEADER);
    fitted_rows.push('\n');
    let mut all_converged = true;

    for (width, curves) in &jobs {
        let points: usize = curves.iter().map(|c| c.points.len()).sum();
        let result = fit_with_options(curves, &opts)?;
        all_converged &= result.converged;
        if !report.is_empty() {
            report.push('\n');
        }
        report.push_str(&fit_report_block(&result, *width, points));

        for curve in curves {
            let depths: Vec<usize> = curve.points.iter().map(|p| p.depth).collect();
            let (lo, hi) = (*depths.iter().min().unwrap(), *depths.iter().max().unwrap());
            for depth in lo..=hi {
                let purity = model_purity(curve.n, depth, &result.params);
                let density = -purity.log2() / curve.n as f64;
                fitted_rows.push_str(&format!("{},{depth},{purity},{density}\n", curve.n));
            }
        }
    }

    match &args.report {
        Some(path) => write_file(path, &report)?,
        None => print!("{report}"),
    }
    if let Some(path) = &args.fitted_curve {
        write_file(path, &fitted_rows)?;
    }

    if !all_converged {
        return Err(CliError::Numerical(
            "fit did not converge within the iteration budget (see report)".into(),
        ));
    }
    Ok(())
}
