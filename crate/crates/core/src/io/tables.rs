//! CSV outputs: diagnostics series, error table and convergence-rate table.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::analysis::ErrorRecord;
use crate::error::{Error, Result};
use crate::real::Real;
use crate::solver::DiagnosticsRow;

/// Marker written in place of an error value whose run failed.
pub const FAILED: &str = "FAILED";
/// Marker for a convergence rate that cannot be computed.
pub const UNDEFINED: &str = "undefined";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRecord {
    pub step: usize,
    pub time: f64,
    pub total_mass: f64,
    pub total_momentum_x: f64,
    pub total_momentum_y: f64,
    pub total_energy: f64,
    pub ballistic_energy: f64,
    pub solid_kinetic: f64,
    pub solid_theta_mismatch: f64,
    pub advisory_adv: f64,
    pub advisory_diff: f64,
    pub advisory_pen: f64,
}

impl<T: Real> From<&DiagnosticsRow<T>> for DiagnosticsRecord {
    fn from(row: &DiagnosticsRow<T>) -> Self {
        let d = &row.diagnostics;
        Self {
            step: row.step,
            time: row.time.as_f64(),
            total_mass: d.total_mass.as_f64(),
            total_momentum_x: d.total_momentum[0].as_f64(),
            total_momentum_y: d.total_momentum[1].as_f64(),
            total_energy: d.total_energy.as_f64(),
            ballistic_energy: d.ballistic_energy.as_f64(),
            solid_kinetic: d.solid_kinetic.as_f64(),
            solid_theta_mismatch: d.solid_theta_mismatch.as_f64(),
            advisory_adv: row.advisory.advective.as_f64(),
            advisory_diff: row.advisory.diffusive.as_f64(),
            advisory_pen: row.advisory.penalty.as_f64(),
        }
    }
}

fn write_records<W: Write, R: Serialize>(out: W, records: &[R], header: &[&str]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(header)?;
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

fn read_records<R: Read, D: for<'de> Deserialize<'de>>(input: R, header: &[&str]) -> Result<Vec<D>> {
    let mut r = csv::Reader::from_reader(input);
    let found: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if found != header {
        return Err(Error::Format(format!("unexpected CSV header {found:?}")));
    }
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}

pub const DIAGNOSTICS_HEADER: [&str; 12] = [
    "step",
    "time",
    "total_mass",
    "total_momentum_x",
    "total_momentum_y",
    "total_energy",
    "ballistic_energy",
    "solid_kinetic",
    "solid_theta_mismatch",
    "advisory_adv",
    "advisory_diff",
    "advisory_pen",
];

pub fn write_diagnostics<W: Write>(out: W, rows: &[DiagnosticsRecord]) -> Result<()> {
    write_records(out, rows, &DIAGNOSTICS_HEADER)
}

pub fn read_diagnostics<R: Read>(input: R) -> Result<Vec<DiagnosticsRecord>> {
    read_records(input, &DIAGNOSTICS_HEADER)
}

/// Number formatted with the shortest representation that parses back exactly.
fn num(x: f64) -> String {
    format!("{x:e}")
}

/// Empty cells (column not applicable to the row) read as `None` as well.
fn parse_marked(s: &str, marker: &str) -> Result<Option<f64>> {
    if s == marker || s.is_empty() {
        Ok(None)
    } else {
        s.parse()
            .map(Some)
            .map_err(|_| Error::Format(format!("bad numeric cell `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorRow {
    pub experiment: String,
    pub field: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub h: String,
    pub epsilon: String,
    #[serde(rename = "error_E")]
    pub error_e: String,
    #[serde(rename = "error_P")]
    pub error_p: String,
}

impl ErrorRow {
    pub fn from_record<T: Real>(r: &ErrorRecord<T>) -> Self {
        let cell = |v: Option<T>| v.map_or_else(|| FAILED.to_string(), |x| num(x.as_f64()));
        Self {
            experiment: r.experiment.clone(),
            field: r.field.name().to_string(),
            n: r.n,
            h: num(r.h.as_f64()),
            epsilon: num(r.epsilon.as_f64()),
            error_e: cell(r.error_e),
            error_p: cell(r.error_p),
        }
    }

    pub fn epsilon_value(&self) -> Result<f64> {
        parse_marked(&self.epsilon, FAILED)?.ok_or_else(|| Error::Format("missing epsilon".into()))
    }

    pub fn error_e_value(&self) -> Result<Option<f64>> {
        parse_marked(&self.error_e, FAILED)
    }

    pub fn error_p_value(&self) -> Result<Option<f64>> {
        parse_marked(&self.error_p, FAILED)
    }
}

pub const ERRORS_HEADER: [&str; 7] = ["experiment", "field", "N", "h", "epsilon", "error_E", "error_P"];

/// Writes rows sorted by `(experiment, field, N, epsilon)`.
pub fn write_errors<W: Write>(out: W, rows: &[ErrorRow]) -> Result<()> {
    let mut sorted = rows.to_vec();
    let key = |r: &ErrorRow| (r.experiment.clone(), r.field.clone(), r.n, r.epsilon_value().unwrap_or(f64::NAN));
    sorted.sort_by(|a, b| key(a).partial_cmp(&key(b)).unwrap_or(std::cmp::Ordering::Equal));
    write_records(out, &sorted, &ERRORS_HEADER)
}

pub fn read_errors<R: Read>(input: R) -> Result<Vec<ErrorRow>> {
    read_records(input, &ERRORS_HEADER)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EocRow {
    pub experiment: String,
    pub field: String,
    /// e.g. `N=16->32@eps=1e-3` or `eps=1e-1->1e-2@N=64`.
    pub pair: String,
    pub rate_h: String,
    pub rate_eps: String,
}

impl EocRow {
    pub fn rate_cell(rate: Option<f64>) -> String {
        rate.map_or_else(|| UNDEFINED.to_string(), num)
    }

    pub fn rate_h_value(&self) -> Result<Option<f64>> {
        parse_marked(&self.rate_h, UNDEFINED)
    }

    pub fn rate_eps_value(&self) -> Result<Option<f64>> {
        parse_marked(&self.rate_eps, UNDEFINED)
    }
}

pub const EOC_HEADER: [&str; 5] = ["experiment", "field", "pair", "rate_h", "rate_eps"];

pub fn write_eoc<W: Write>(out: W, rows: &[EocRow]) -> Result<()> {
    write_records(out, rows, &EOC_HEADER)
}

pub fn read_eoc<R: Read>(input: R) -> Result<Vec<EocRow>> {
    read_records(input, &EOC_HEADER)
}

pub fn write_file(path: impl AsRef<Path>, f: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<()> {
    let mut buf = Vec::new();
    f(&mut buf)?;
    std::fs::write(path, buf)?;
    Ok(())
}
