//! CSV reading and writing in the tool's fixed dialect: comma separated,
//! `.` decimal point, one header row, LF line endings, UTF-8, no quoting.
//! Floats are printed with Rust's shortest round-trip formatting, so equal
//! configurations produce byte-identical files.

use std::path::Path;

use crate::errors::{CliError, CliResult};

pub const SWEEP_HEADER: &str = "n,depth,run_id,estimator,purity,purity_valid,renyi2_density";
pub const FITTED_HEADER: &str = "n,depth,purity_model,renyi2_density_model";
pub const FRONTIER_HEADER: &str = "n,depth_this_work,depth_prior";

/// One sweep result cell. A non-positive purity estimate cannot be converted
/// to an entropy density; such rows carry `purity_valid = 0` and an empty
/// density column rather than NaN text.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub n: usize,
    pub depth: usize,
    pub run_id: usize,
    pub estimator: String,
    pub purity: f64,
}

impl SweepRow {
    pub fn purity_valid(&self) -> bool {
        self.purity > 0.0
    }

    pub fn renyi2_density(&self) -> Option<f64> {
        self.purity_valid()
            .then(|| -self.purity.log2() / self.n as f64)
    }
}

pub fn write_sweep(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for row in rows {
        let density = row
            .renyi2_density()
            .map(|d| d.to_string())
            .unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            row.n,
            row.depth,
            row.run_id,
            row.estimator,
            row.purity,
            u8::from(row.purity_valid()),
            density,
        ));
    }
    out
}

pub fn read_sweep(path: &Path) -> CliResult<Vec<SweepRow>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::validation(format!("cannot read {}: {e}", path.display())))?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == SWEEP_HEADER => {}
        _ => {
            return Err(CliError::validation(format!(
                "{}: expected sweep header `{SWEEP_HEADER}`",
                path.display()
            )))
        }
    }
    let mut rows = Vec::new();
    for (no, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 7 {
            return Err(CliError::validation(format!(
                "{}:{}: expected 7 columns, found {}",
                path.display(),
                no + 1,
                cols.len()
            )));
        }
        let parse_usize = |cell: &str, what: &str| {
            cell.parse::<usize>().map_err(|_| {
                CliError::validation(format!(
                    "{}:{}: bad {what} `{cell}`",
                    path.display(),
                    no + 1
                ))
            })
        };
        let purity: f64 = cols[4].parse().map_err(|_| {
            CliError::validation(format!(
                "{}:{}: bad purity `{}`",
                path.display(),
                no + 1,
                cols[4]
            ))
        })?;
        rows.push(SweepRow {
            n: parse_usize(cols[0], "width")?,
            depth: parse_usize(cols[1], "depth")?,
            run_id: parse_usize(cols[2], "run_id")?,
            estimator: cols[3].to_string(),
            purity,
        });
    }
    if rows.is_empty() {
        return Err(CliError::validation(format!(
            "{}: no data rows",
            path.display()
        )));
    }
    Ok(rows)
}

pub fn write_frontier(rows: &[entrobench::advantage::FrontierRow]) -> String {
    let mut out = String::from(FRONTIER_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&format!(
            "{},{},{}\n",
            row.n, row.this_work_depth, row.prior_depth
        ));
    }
    out
}

pub fn read_frontier(path: &Path) -> CliResult<Vec<entrobench::advantage::FrontierRow>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::validation(format!("cannot read {}: {e}", path.display())))?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == FRONTIER_HEADER => {}
        _ => {
            return Err(CliError::validation(format!(
                "{}: expected frontier header `{FRONTIER_HEADER}`",
                path.display()
            )))
        }
    }
    let mut rows = Vec::new();
    for (no, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 3 {
            return Err(CliError::validation(format!(
                "{}:{}: expected 3 columns",
                path.display(),
                no + 1
            )));
        }
        let bad = |what: &str| {
            CliError::validation(format!("{}:{}: bad {what}", path.display(), no + 1))
        };
        rows.push(entrobench::advantage::FrontierRow {
            n: cols[0].parse().map_err(|_| bad("width"))?,
            this_work_depth: cols[1].parse().map_err(|_| bad("depth"))?,
            prior_depth: cols[2].parse().map_err(|_| bad("depth"))?,
        });
    }
    if rows.is_empty() {
        return Err(CliError::validation(format!(
            "{}: no data rows",
            path.display()
        )));
    }
    Ok(rows)
}

pub fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    std::fs::write(path, contents)?;
    Ok(())
}
