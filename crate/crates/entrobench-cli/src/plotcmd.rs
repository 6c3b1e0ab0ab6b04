//! Render sweep or frontier CSV data as standalone SVG charts.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::csvio::{read_frontier, read_sweep, write_file, SweepRow};
use crate::errors::{CliError, CliResult};
use crate::svg::{Chart, LineStyle, RefLine, Series};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlotKind {
    EntropyCurve,
    PurityCurve,
    Frontier,
}

impl std::str::FromStr for PlotKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "entropy-curve" => Ok(PlotKind::EntropyCurve),
            "purity-curve" => Ok(PlotKind::PurityCurve),
            "frontier" => Ok(PlotKind::Frontier),
            other => Err(format!(
                "unknown plot kind `{other}` (expected entropy-curve|purity-curve|frontier)"
            )),
        }
    }
}

pub struct PlotArgs {
    pub data: PathBuf,
    pub kind: PlotKind,
    pub output: PathBuf,
}

pub fn run_plot(args: &PlotArgs) -> CliResult<()> {
    let chart = match args.kind {
        PlotKind::EntropyCurve => sweep_chart(&args.data, true)?,
        PlotKind::PurityCurve => sweep_chart(&args.data, false)?,
        PlotKind::Frontier => frontier_chart(&args.data)?,
    };
    write_file(&args.output, &chart.render())
}

/// Group sweep rows by width, aggregate runs into mean and sample standard
/// deviation per depth, and lay the widths out as one series each.
fn sweep_chart(path: &Path, entropy: bool) -> CliResult<Chart> {
    let rows = read_sweep(path)?;
    let mut by_width: BTreeMap<usize, BTreeMap<usize, Vec<&SweepRow>>> = BTreeMap::new();
    for row in &rows {
        by_width
            .entry(row.n)
            .or_default()
            .entry(row.depth)
            .or_default()
            .push(row);
    }

    let mut series = Vec::new();
    let mut ref_lines = Vec::new();
    if entropy {
        ref_lines.push(RefLine {
            y: 1.0,
            label: "maximally mixed".into(),
        });
    }
    for (n, depths) in &by_width {
        let mut points = Vec::new();
        let mut errors = Vec::new();
        for (&depth, cells) in depths {
            let values: Vec<f64> = if entropy {
                cells.iter().filter_map(|r| r.renyi2_density()).collect()
            } else {
                cells.iter().map(|r| r.purity).collect()
            };
            if values.is_empty() {
                continue;
            }
            let count = values.len() as f64;
            let mean = values.iter().sum::<f64>() / count;
            let std = if values.len() >= 2 {
                (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (count - 1.0)).sqrt()
            } else {
                0.0
            };
            points.push((depth as f64, mean));
            errors.push(std);
        }
        if points.is_empty() {
            continue;
        }
        series.push(Series {
            label: format!("n = {n}"),
            points,
            errors: Some(errors),
            style: LineStyle::Solid,
            markers: true,
        });
        if !entropy {
            ref_lines.push(RefLine {
                y: 0.5f64.powi(*n as i32),
                label: format!("2^-{n}"),
            });
        }
    }
    if series.is_empty() {
        return Err(CliError::validation(format!(
            "{}: no plottable points",
            path.display()
        )));
    }

    let estimator = rows[0].estimator.clone();
    Ok(Chart {
        title: if entropy {
            format!("Renyi-2 entropy density vs depth ({estimator})")
        } else {
            format!("Purity vs depth ({estimator})")
        },
        x_label: "circuit depth D".into(),
        y_label: if entropy {
            "entropy density".into()
        } else {
            "purity".into()
        },
        series,
        ref_lines,
    })
}

fn frontier_chart(path: &Path) -> CliResult<Chart> {
    let rows = read_frontier(path)?;
    let this_work: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| (r.n as f64, r.this_work_depth))
        .collect();
    let prior: Vec<(f64, f64)> = rows.iter().map(|r| (r.n as f64, r.prior_depth)).collect();
    let last = rows.last().expect("read_frontier rejects empty tables");

    Ok(Chart {
        title: "Certified-classical depth threshold vs width".into(),
        x_label: "width n".into(),
        y_label: "depth threshold".into(),
        series: vec![
            Series {
                label: "this work".into(),
                points: this_work,
                errors: None,
                style: LineStyle::Solid,
                markers: false,
            },
            Series {
                label: "prior bound".into(),
                points: prior,
                errors: None,
                style: LineStyle::Solid,
                markers: false,
            },
        ],
        ref_lines: vec![
            RefLine {
                y: last.this_work_depth,
                label: format!("asymptote {:.3}", last.this_work_depth),
            },
            RefLine {
                y: last.prior_depth,
                label: format!("prior {:.3}", last.prior_depth),
            },
        ],
    })
}
