//! Assembly of the per-cell fidelity report.

use alloc::vec::Vec;

use crate::choi::{ChoiOperator, Criterion, FidelityReport, ReportNote};
use crate::error::Result;
use crate::oracle::{self, CLAIM_TOL};
use crate::qubit::{self, MapOrigin, QubitCloneSpec};
use crate::qutrit::{self, QutritCloneSpec};
use crate::symspace::System;

/// Phase samples per phase used by the report's covariance check.
pub const REPORT_PHASE_GRID: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleSettings {
    pub restarts: usize,
    pub seed: u64,
}

impl Default for OracleSettings {
    fn default() -> Self {
        Self { restarts: oracle::DEFAULT_RESTARTS, seed: 0 }
    }
}

/// The constructed optimal map for one cell and how it was obtained.
pub fn constructed_map(system: System, criterion: Criterion, n: usize, m: usize) -> Result<(ChoiOperator, MapOrigin)> {
    match system {
        System::Qubit => qubit::optimal_map_with_origin(QubitCloneSpec::new(n, m, criterion)?),
        System::Qutrit => {
            if n != 1 {
                return Err(crate::Error::Range("qutrit channels take a single input copy"));
            }
            let op = qutrit::optimal_map_qutrit(QutritCloneSpec::new(m, criterion)?)?;
            Ok((op, MapOrigin::Analytic))
        }
    }
}

pub fn closed_form(system: System, criterion: Criterion, n: usize, m: usize) -> Result<Option<f64>> {
    Ok(match system {
        System::Qubit => qubit::closed_form_fidelity(QubitCloneSpec::new(n, m, criterion)?),
        System::Qutrit => qutrit::closed_form_qutrit_fidelity(QutritCloneSpec::new(m, criterion)?),
    })
}

pub fn build_report(
    system: System,
    criterion: Criterion,
    n: usize,
    m: usize,
    oracle_settings: Option<OracleSettings>,
) -> Result<FidelityReport> {
    let (map, origin) = constructed_map(system, criterion, n, m)?;
    let from_choi = map.fidelity(criterion);
    let checks = map.expand_dense().integrity_checks(REPORT_PHASE_GRID)?;
    let mut notes = Vec::new();
    if system == System::Qubit && criterion == Criterion::Global && n == 1 && m.is_multiple_of(2) && m > 1 {
        notes.push(ReportNote::PrintedEvenMFormulaNotVerbatim);
    }
    if origin == MapOrigin::NumericalWithinAnsatz {
        notes.push(ReportNote::NumericallyOptimalWithinAnsatz);
    }
    let oracle_value = match oracle_settings {
        Some(s) => {
            let r = oracle::maximize_fidelity(system, criterion, n, m, s.restarts, s.seed)?;
            if r.gap_vs_constructed > CLAIM_TOL {
                notes.push(ReportNote::OracleExceedsConstruction { gap: r.gap_vs_constructed });
            }
            Some(r.best_value)
        }
        None => None,
    };
    Ok(FidelityReport {
        system,
        criterion,
        n_in: n,
        n_out: m,
        closed_form: closed_form(system, criterion, n, m)?,
        from_choi,
        oracle: oracle_value,
        checks,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn even_output_global_is_flagged() {
        let r = build_report(System::Qubit, Criterion::Global, 1, 2, None).unwrap();
        assert_eq!(r.closed_form, None);
        assert!(r.notes.contains(&ReportNote::PrintedEvenMFormulaNotVerbatim));
        assert!(r.checks.all_pass());
    }

    #[test]
    fn closed_form_matches_choi() {
        let r = build_report(System::Qutrit, Criterion::SingleParticle, 1, 4, None).unwrap();
        assert!((r.closed_form.unwrap() - r.from_choi).abs() < 1e-12);
        assert!(r.notes.is_empty());
    }

    #[test]
    fn numerical_maps_are_flagged() {
        let r = build_report(System::Qubit, Criterion::SingleParticle, 3, 4, None).unwrap();
        assert!(r.notes.contains(&ReportNote::NumericallyOptimalWithinAnsatz));
    }
}
