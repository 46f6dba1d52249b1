//! The verification suite: integrity, closed-form and oracle-gap checks
//! over a sweep.

use std::fmt::Write as _;

use phasecov_core::choi::{COVARIANCE_TOL, PSD_TOL, TRACE_TOL};
use phasecov_core::oracle::{self, CLAIM_TOL};
use phasecov_core::report::{closed_form, constructed_map, REPORT_PHASE_GRID};
use phasecov_core::System;
use rayon::prelude::*;
use serde::Serialize;

use crate::sweep::{Cell, SweepConfig};
use crate::CliError;

/// Largest accepted difference between a closed form and the map value.
pub const CLOSED_FORM_TOL: f64 = 1e-10;
/// Size of the entry written by `--inject-fault offblock`.
pub const FAULT_SIZE: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    OffBlock,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub check: &'static str,
    pub pass: bool,
    pub value: f64,
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellResult {
    pub system: &'static str,
    pub criterion: &'static str,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "M")]
    pub m: usize,
    pub checks: Vec<CheckResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub cells: Vec<CellResult>,
    pub failures: usize,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    pub fn summary(&self) -> String {
        let total: usize = self.cells.iter().map(|c| c.checks.len()).sum();
        let mut s = String::new();
        for c in &self.cells {
            for k in c.checks.iter().filter(|k| !k.pass) {
                let _ = writeln!(
                    s,
                    "FAIL {} {} N={} M={} {}: {:e} (threshold {:e})",
                    c.system, c.criterion, c.n, c.m, k.check, k.value, k.threshold
                );
            }
        }
        let _ = writeln!(
            s,
            "{} cells, {} checks, {} failed",
            self.cells.len(),
            total,
            self.failures
        );
        s
    }
}

fn check(check: &'static str, value: f64, threshold: f64, pass: bool) -> CheckResult {
    CheckResult { check, pass, value, threshold }
}

fn verify_cell(config: &SweepConfig, cell: Cell, fault: Option<Fault>) -> Result<CellResult, CliError> {
    let system = config.system;
    let (map, _) = constructed_map(system, cell.criterion, cell.n, cell.m)?;
    let mut dense = map.expand_dense();
    if fault == Some(Fault::OffBlock) {
        dense = dense.with_offblock_fault(FAULT_SIZE);
    }
    let trace = dense.trace_residual()?;
    let min_eig = dense.min_eigenvalue()?;
    let cov = dense.covariance_residual(REPORT_PHASE_GRID)?;
    let constancy = dense.phase_constancy_residual(REPORT_PHASE_GRID)?;
    let value = map.fidelity(cell.criterion);
    let mut checks = vec![
        check("trace_preserving", trace, TRACE_TOL, trace < TRACE_TOL),
        check("psd", min_eig, -PSD_TOL, min_eig >= -PSD_TOL),
        check("covariant", cov, COVARIANCE_TOL, cov < COVARIANCE_TOL),
        check("phase_constancy", constancy, COVARIANCE_TOL, constancy < COVARIANCE_TOL),
    ];
    if let Some(closed) = closed_form(system, cell.criterion, cell.n, cell.m)? {
        let d = (closed - value).abs();
        checks.push(check("closed_form_vs_choi", d, CLOSED_FORM_TOL, d <= CLOSED_FORM_TOL));
    }
    if let Some(settings) = config.oracle {
        let r = oracle::maximize_fidelity(system, cell.criterion, cell.n, cell.m, settings.restarts, settings.seed)?;
        let gap = r.gap_vs_constructed;
        checks.push(check("oracle_gap", gap, CLAIM_TOL, gap <= CLAIM_TOL));
    }
    Ok(CellResult {
        system: system.name(),
        criterion: cell.criterion.name(),
        n: cell.n,
        m: cell.m,
        checks,
    })
}

fn check_oracle_bounds(config: &SweepConfig) -> Result<(), CliError> {
    if config.oracle.is_none() {
        return Ok(());
    }
    let (n_max, m_max) = (*config.n_range.end(), *config.m_range.end());
    let ok = match config.system {
        System::Qubit => n_max <= oracle::MAX_QUBIT_INPUTS && m_max <= oracle::MAX_QUBIT_OUTPUTS,
        System::Qutrit => m_max <= oracle::MAX_QUTRIT_OUTPUTS,
    };
    if ok {
        Ok(())
    } else {
        Err(CliError::BadInput(format!(
            "oracle checks are limited to qubit N <= {}, M <= {} and qutrit M <= {}",
            oracle::MAX_QUBIT_INPUTS,
            oracle::MAX_QUBIT_OUTPUTS,
            oracle::MAX_QUTRIT_OUTPUTS
        )))
    }
}

pub fn run_verify(config: &SweepConfig, fault: Option<Fault>) -> Result<VerifyReport, CliError> {
    config.validate()?;
    check_oracle_bounds(config)?;
    let cells = config
        .cells()
        .par_iter()
        .map(|&c| verify_cell(config, c, fault))
        .collect::<Result<Vec<_>, _>>()?;
    let failures = cells.iter().flat_map(|c| &c.checks).filter(|k| !k.pass).count();
    Ok(VerifyReport { cells, failures })
}

#[cfg(test)]
mod tests {
    use super::*;
    use phasecov_core::Criterion;

    fn config() -> SweepConfig {
        SweepConfig {
            system: System::Qubit,
            criteria: vec![Criterion::Global, Criterion::SingleParticle],
            n_range: 1..=2,
            m_range: 1..=4,
            oracle: None,
        }
    }

    #[test]
    fn clean_sweep_passes() {
        let r = run_verify(&config(), None).unwrap();
        assert!(r.passed(), "{}", r.summary());
        assert_eq!(r.cells.len(), 14);
    }

    #[test]
    fn fault_is_caught_by_covariance() {
        let r = run_verify(&config(), Some(Fault::OffBlock)).unwrap();
        assert!(!r.passed());
        assert!(r.summary().contains("covariant"));
        assert!(r.cells.iter().all(|c| c.checks.iter().any(|k| k.check == "covariant" && !k.pass)));
    }

    #[test]
    fn oracle_bounds() {
        let mut c = config();
        c.m_range = 1..=9;
        c.oracle = Some(Default::default());
        assert!(matches!(run_verify(&c, None), Err(CliError::BadInput(_))));
    }
}
