//! Sweeps over `(criterion, N, M)` cells, evaluated in parallel and
//! returned in a fixed order.

use std::ops::RangeInclusive;

use phasecov_core::choi::FidelityReport;
use phasecov_core::report::{build_report, OracleSettings};
use phasecov_core::{Criterion, System};
use rayon::prelude::*;

use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub system: System,
    pub criteria: Vec<Criterion>,
    pub n_range: RangeInclusive<usize>,
    pub m_range: RangeInclusive<usize>,
    pub oracle: Option<OracleSettings>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cell {
    pub criterion: Criterion,
    pub n: usize,
    pub m: usize,
}

/// Parses `a`, `a..b` or `a..=b`; both ends are inclusive.
pub fn parse_range(s: &str) -> Result<RangeInclusive<usize>, CliError> {
    let bad = || CliError::BadInput(format!("bad range `{s}`; expected `a` or `a..b`"));
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
    let r = match s.split_once("..") {
        Some((a, b)) => num(a)?..=num(b.strip_prefix('=').unwrap_or(b))?,
        None => {
            let a = num(s)?;
            a..=a
        }
    };
    if r.is_empty() {
        return Err(CliError::BadInput(format!("empty range `{s}`")));
    }
    Ok(r)
}

impl SweepConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.criteria.is_empty() {
            return Err(CliError::BadInput("no criterion selected".into()));
        }
        if self.n_range.is_empty() || self.m_range.is_empty() {
            return Err(CliError::BadInput("empty N or M range".into()));
        }
        if *self.n_range.start() == 0 {
            return Err(CliError::BadInput("N must be at least 1".into()));
        }
        if self.system == System::Qutrit && self.n_range != (1..=1) {
            return Err(CliError::BadInput("qutrit sweeps take N = 1 only".into()));
        }
        if self.cells().is_empty() {
            return Err(CliError::BadInput("no cells with M >= N in the requested ranges".into()));
        }
        Ok(())
    }

    /// Cells with `M ≥ N`, ordered by N, then M, then criterion.
    pub fn cells(&self) -> Vec<Cell> {
        let mut criteria = self.criteria.clone();
        criteria.sort();
        criteria.dedup();
        let mut out = Vec::new();
        for n in self.n_range.clone() {
            for m in self.m_range.clone().filter(|m| *m >= n) {
                out.extend(criteria.iter().map(|&criterion| Cell { criterion, n, m }));
            }
        }
        out
    }

    pub fn run(&self) -> Result<Vec<FidelityReport>, CliError> {
        self.validate()?;
        self.cells()
            .par_iter()
            .map(|c| build_report(self.system, c.criterion, c.n, c.m, self.oracle).map_err(CliError::from))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(system: System, criteria: Vec<Criterion>, n: RangeInclusive<usize>, m: RangeInclusive<usize>) -> SweepConfig {
        SweepConfig { system, criteria, n_range: n, m_range: m, oracle: None }
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("3").unwrap(), 3..=3);
        assert_eq!(parse_range("1..6").unwrap(), 1..=6);
        assert_eq!(parse_range("2..=4").unwrap(), 2..=4);
        assert!(parse_range("5..2").is_err());
        assert!(parse_range("x").is_err());
    }

    #[test]
    fn cell_counts() {
        let q = config(System::Qubit, vec![Criterion::Global], 1..=2, 1..=6);
        assert_eq!(q.cells().len(), 11);
        let t = config(System::Qutrit, vec![Criterion::SingleParticle, Criterion::Global], 1..=1, 1..=5);
        let cells = t.cells();
        assert_eq!(cells.len(), 10);
        assert_eq!(cells[0].criterion, Criterion::Global);
    }

    #[test]
    fn qutrit_needs_single_input() {
        assert!(config(System::Qutrit, vec![Criterion::Global], 1..=2, 1..=3).validate().is_err());
        assert!(config(System::Qubit, vec![Criterion::Global], 4..=4, 1..=3).validate().is_err());
    }
}
