//! Device calibration tables and conversion to depolarising rates.
//!
//! The input is a two-section CSV (UTF-8, comma separated, LF endings, no
//! quoting), mirroring a typical transmon lattice calibration export. The
//! first section lists qubit pairs, the second individual qubits, separated
//! by one blank line:
//!
//! ```text
//! Pair,fXY,fXY std err,fCZ,fCZ std err,Avg T1 (us),Avg T2 (us),Avg fActiveReset,Avg fRO
//! 100-101,0.9614,0.007829,0.9598,0.0058,19.3,33.22,0.9943,0.941
//! ...
//!
//! Qubit,T1 (us),T2 (us),f1QRB,f1QRB std err,f1Q sim RB,f1Q sim RB std err,fActiveReset,fRO
//! 100,11.82,20.1,0.997,0.000175,0.9957,0.000109,0.9955,0.908
//! ...
//! ```
//!
//! Fidelity cells may be blank (gate not calibrated); blank cells parse to
//! absent values and are skipped during aggregation. Depolarising
//! probabilities follow from average gate fidelities as `p1 = 2 (1 - F1)`
//! and `p2 = 4/3 (1 - F2)`, clipped to [0, 1].

use crate::error::{Error, Result};

pub const PAIR_HEADER: &str =
    "Pair,fXY,fXY std err,fCZ,fCZ std err,Avg T1 (us),Avg T2 (us),Avg fActiveReset,Avg fRO";
pub const QUBIT_HEADER: &str =
    "Qubit,T1 (us),T2 (us),f1QRB,f1QRB std err,f1Q sim RB,f1Q sim RB std err,fActiveReset,fRO";

/// One two-qubit row of the table.
#[derive(Clone, Debug, PartialEq)]
pub struct PairRow {
    pub a: u32,
    pub b: u32,
    pub f_xy: Option<f64>,
    pub f_xy_stderr: Option<f64>,
    pub f_cz: Option<f64>,
    pub f_cz_stderr: Option<f64>,
    pub avg_t1_us: Option<f64>,
    pub avg_t2_us: Option<f64>,
    pub avg_f_active_reset: Option<f64>,
    pub avg_f_ro: Option<f64>,
}

/// One single-qubit row of the table.
#[derive(Clone, Debug, PartialEq)]
pub struct QubitRow {
    pub id: u32,
    pub t1_us: Option<f64>,
    pub t2_us: Option<f64>,
    pub f1q_rb: Option<f64>,
    pub f1q_rb_stderr: Option<f64>,
    pub f1q_sim_rb: Option<f64>,
    pub f1q_sim_rb_stderr: Option<f64>,
    pub f_active_reset: Option<f64>,
    pub f_ro: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CalibrationTable {
    pub pairs: Vec<PairRow>,
    pub qubits: Vec<QubitRow>,
}

/// How fidelities are pooled across rows.
#[derive(Clone, Debug, PartialEq)]
pub enum AggregatePolicy {
    Median,
    Mean,
    /// Restrict to the listed qubits: single-qubit fidelities from those
    /// rows, two-qubit fidelities from pairs with both endpoints listed.
    QubitSubset(Vec<u32>),
}

pub fn parse_calibration(text: &str) -> Result<CalibrationTable> {
    let mut lines = text.lines().enumerate();

    let (first_no, first) = lines
        .next()
        .filter(|(_, l)| !l.trim().is_empty())
        .ok_or_else(|| Error::Parse {
            line: 1,
            reason: "empty calibration file".into(),
        })?;
    if first.trim_end() != PAIR_HEADER {
        return Err(Error::Parse {
            line: first_no + 1,
            reason: format!("expected pair header `{PAIR_HEADER}`"),
        });
    }

    let mut pairs = Vec::new();
    let mut qubit_header_seen = false;
    let mut qubits = Vec::new();
    let mut in_pairs = true;
    for (no, raw) in lines {
        let line = raw.trim_end();
        if line.is_empty() {
            if in_pairs {
                in_pairs = false;
            }
            continue;
        }
        if in_pairs {
            pairs.push(parse_pair_row(line, no + 1)?);
        } else if !qubit_header_seen {
            if line != QUBIT_HEADER {
                return Err(Error::Parse {
                    line: no + 1,
                    reason: format!("expected qubit header `{QUBIT_HEADER}`"),
                });
            }
            qubit_header_seen = true;
        } else {
            qubits.push(parse_qubit_row(line, no + 1)?);
        }
    }

    if pairs.is_empty() || qubits.is_empty() {
        return Err(Error::Parse {
            line: 0,
            reason: format!(
                "calibration table needs both sections, found {} pair and {} qubit rows",
                pairs.len(),
                qubits.len()
            ),
        });
    }
    Ok(CalibrationTable { pairs, qubits })
}

fn split_columns(line: &str, expect: usize, line_no: usize) -> Result<Vec<&str>> {
    let cols: Vec<&str> = line.split(',').map(str::trim).collect();
    if cols.len() != expect {
        return Err(Error::Parse {
            line: line_no,
            reason: format!("expected {expect} columns, found {}", cols.len()),
        });
    }
    Ok(cols)
}

fn parse_optional(cell: &str, line_no: usize) -> Result<Option<f64>> {
    if cell.is_empty() {
        return Ok(None);
    }
    cell.parse::<f64>().map(Some).map_err(|_| Error::Parse {
        line: line_no,
        reason: format!("malformed numeric cell `{cell}`"),
    })
}

fn parse_id(cell: &str, line_no: usize) -> Result<u32> {
    cell.parse::<u32>().map_err(|_| Error::Parse {
        line: line_no,
        reason: format!("malformed qubit id `{cell}`"),
    })
}

fn parse_pair_row(line: &str, line_no: usize) -> Result<PairRow> {
    let cols = split_columns(line, 9, line_no)?;
    let (a, b) = cols[0].split_once('-').ok_or_else(|| Error::Parse {
        line: line_no,
        reason: format!("pair id `{}` is not of the form a-b", cols[0]),
    })?;
    Ok(PairRow {
        a: parse_id(a, line_no)?,
        b: parse_id(b, line_no)?,
        f_xy: parse_optional(cols[1], line_no)?,
        f_xy_stderr: parse_optional(cols[2], line_no)?,
        f_cz: parse_optional(cols[3], line_no)?,
        f_cz_stderr: parse_optional(cols[4], line_no)?,
        avg_t1_us: parse_optional(cols[5], line_no)?,
        avg_t2_us: parse_optional(cols[6], line_no)?,
        avg_f_active_reset: parse_optional(cols[7], line_no)?,
        avg_f_ro: parse_optional(cols[8], line_no)?,
    })
}

fn parse_qubit_row(line: &str, line_no: usize) -> Result<QubitRow> {
    let cols = split_columns(line, 9, line_no)?;
    Ok(QubitRow {
        id: parse_id(cols[0], line_no)?,
        t1_us: parse_optional(cols[1], line_no)?,
        t2_us: parse_optional(cols[2], line_no)?,
        f1q_rb: parse_optional(cols[3], line_no)?,
        f1q_rb_stderr: parse_optional(cols[4], line_no)?,
        f1q_sim_rb: parse_optional(cols[5], line_no)?,
        f1q_sim_rb_stderr: parse_optional(cols[6], line_no)?,
        f_active_reset: parse_optional(cols[7], line_no)?,
        f_ro: parse_optional(cols[8], line_no)?,
    })
}

/// Write the typed table back out in the same dialect.
pub fn serialize_calibration(table: &CalibrationTable) -> String {
    fn cell(v: Option<f64>) -> String {
        v.map(|x| x.to_string()).unwrap_or_default()
    }
    let mut out = String::new();
    out.push_str(PAIR_HEADER);
    out.push('\n');
    for p in &table.pairs {
        out.push_str(&format!(
            "{}-{},{},{},{},{},{},{},{},{}\n",
            p.a,
            p.b,
            cell(p.f_xy),
            cell(p.f_xy_stderr),
            cell(p.f_cz),
            cell(p.f_cz_stderr),
            cell(p.avg_t1_us),
            cell(p.avg_t2_us),
            cell(p.avg_f_active_reset),
            cell(p.avg_f_ro),
        ));
    }
    out.push('\n');
    out.push_str(QUBIT_HEADER);
    out.push('\n');
    for q in &table.qubits {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            q.id,
            cell(q.t1_us),
            cell(q.t2_us),
            cell(q.f1q_rb),
            cell(q.f1q_rb_stderr),
            cell(q.f1q_sim_rb),
            cell(q.f1q_sim_rb_stderr),
            cell(q.f_active_reset),
            cell(q.f_ro),
        ));
    }
    out
}

/// Depolarising probabilities from average gate fidelities:
/// p1 = 2 (1 - F1), p2 = 4/3 (1 - F2), both clipped to [0, 1].
pub fn noise_from_fidelities(f1: f64, f2: f64) -> (f64, f64) {
    let p1 = (2.0 * (1.0 - f1)).clamp(0.0, 1.0);
    let p2 = (4.0 / 3.0 * (1.0 - f2)).clamp(0.0, 1.0);
    (p1, p2)
}

/// Pool the single-qubit (`f1Q sim RB`) and two-qubit (`fCZ`) fidelities
/// according to `policy`, skipping absent cells.
pub fn aggregate(table: &CalibrationTable, policy: &AggregatePolicy) -> Result<(f64, f64)> {
    let keep_qubit = |q: &QubitRow| match policy {
        AggregatePolicy::QubitSubset(ids) => ids.contains(&q.id),
        _ => true,
    };
    let keep_pair = |p: &PairRow| match policy {
        AggregatePolicy::QubitSubset(ids) => ids.contains(&p.a) && ids.contains(&p.b),
        _ => true,
    };

    let f1: Vec<f64> = table
        .qubits
        .iter()
        .filter(|q| keep_qubit(q))
        .filter_map(|q| q.f1q_sim_rb)
        .collect();
    let f2: Vec<f64> = table
        .pairs
        .iter()
        .filter(|p| keep_pair(p))
        .filter_map(|p| p.f_cz)
        .collect();
    if f1.is_empty() || f2.is_empty() {
        return Err(Error::InsufficientData(format!(
            "aggregation selected {} single-qubit and {} two-qubit fidelities",
            f1.len(),
            f2.len()
        )));
    }
    let pool = |values: &[f64]| -> f64 {
        match policy {
            AggregatePolicy::Mean => values.iter().sum::<f64>() / values.len() as f64,
            _ => median(values),
        }
    };
    Ok((pool(&f1), pool(&f2)))
}

fn median(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mid = sorted.len() / 2;
    if sorted.len() % 2 == 1 {
        sorted[mid]
    } else {
        (sorted[mid - 1] + sorted[mid]) / 2.0
    }
}
