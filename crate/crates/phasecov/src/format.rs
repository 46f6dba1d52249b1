//! Wire formats: the JSON fidelity report and the sweep table.
//!
//! Fidelities are rounded to 15 significant digits before serialization.
//! Residuals are written unrounded; JSON renders small magnitudes in
//! exponent form.
//!
//! The Choi matrix convention behind every value is fixed: output factor
//! first, row index `out·d_in + in`, and channel inputs transposed in the
//! real symmetric basis.

use std::io::Write;

use phasecov_core::choi::{CheckOutcome, FidelityReport, ReportNote};
use serde::{Deserialize, Serialize};

pub fn round_sig15(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.14e}").parse().unwrap_or(x)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualJson {
    pub pass: bool,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenJson {
    pub pass: bool,
    pub min_eig: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChecksJson {
    pub trace_preserving: ResidualJson,
    pub psd: EigenJson,
    pub covariant: ResidualJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportJson {
    pub system: String,
    pub criterion: String,
    pub n_in: usize,
    pub n_out: usize,
    pub closed_form: Option<f64>,
    pub from_choi: f64,
    pub oracle: Option<f64>,
    pub checks: ChecksJson,
    pub notes: Vec<String>,
}

fn residual(c: CheckOutcome) -> ResidualJson {
    ResidualJson { pass: c.pass, residual: c.value }
}

impl From<&FidelityReport> for ReportJson {
    fn from(r: &FidelityReport) -> Self {
        ReportJson {
            system: r.system.name().to_string(),
            criterion: r.criterion.name().to_string(),
            n_in: r.n_in,
            n_out: r.n_out,
            closed_form: r.closed_form.map(round_sig15),
            from_choi: round_sig15(r.from_choi),
            oracle: r.oracle.map(round_sig15),
            checks: ChecksJson {
                trace_preserving: residual(r.checks.trace_preserving),
                psd: EigenJson { pass: r.checks.psd.pass, min_eig: r.checks.psd.value },
                covariant: residual(r.checks.covariant),
            },
            notes: r.notes.iter().map(|n| n.to_string()).collect(),
        }
    }
}

/// Where a table value comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Source {
    ClosedForm,
    ConstructedMap,
    AnsatzOptimum,
}

impl Source {
    pub fn of(report: &FidelityReport) -> Self {
        if report.closed_form.is_some() {
            Source::ClosedForm
        } else if report.notes.contains(&ReportNote::NumericallyOptimalWithinAnsatz) {
            Source::AnsatzOptimum
        } else {
            Source::ConstructedMap
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub system: String,
    pub criterion: String,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "M")]
    pub m: usize,
    pub fidelity: f64,
    pub source: Source,
}

impl TableRow {
    pub fn new(report: &FidelityReport) -> Self {
        TableRow {
            system: report.system.name().to_string(),
            criterion: report.criterion.name().to_string(),
            n: report.n_in,
            m: report.n_out,
            fidelity: round_sig15(report.closed_form.unwrap_or(report.from_choi)),
            source: Source::of(report),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Csv,
    Json,
}

pub fn write_table(rows: &[TableRow], format: TableFormat, out: impl Write) -> Result<(), std::io::Error> {
    match format {
        TableFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for r in rows {
                w.serialize(r)?;
            }
            w.flush()
        }
        TableFormat::Json => {
            let mut out = out;
            serde_json::to_writer_pretty(&mut out, rows)?;
            writeln!(out)
        }
    }
}

pub fn read_csv_table(input: impl std::io::Read) -> Result<Vec<TableRow>, csv::Error> {
    csv::Reader::from_reader(input).deserialize().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounds_to_fifteen_digits() {
        assert_eq!(round_sig15(0.870_512_701_892_219_4), 0.870_512_701_892_219);
        assert_eq!(round_sig15(0.75), 0.75);
        assert_eq!(round_sig15(1.0 / 3.0), 0.333_333_333_333_333);
        assert_eq!(round_sig15(0.0), 0.0);
    }

    #[test]
    fn csv_header() {
        let row = TableRow {
            system: "qubit".into(),
            criterion: "global".into(),
            n: 1,
            m: 3,
            fidelity: 0.75,
            source: Source::ClosedForm,
        };
        let mut buf = Vec::new();
        write_table(&[row], TableFormat::Csv, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "system,criterion,N,M,fidelity,source\nqubit,global,1,3,0.75,closed-form\n");
    }
}
