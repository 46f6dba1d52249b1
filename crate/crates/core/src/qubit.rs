//! Optimal N → M phase-covariant cloners for equatorial qubits.

use alloc::vec;
use alloc::vec::Vec;

use crate::choi::{ChoiBlock, ChoiOperator, Criterion};
use crate::error::{Error, Result};
use crate::math;
use crate::oracle;
use crate::symspace::{binomial, PhaseWeight, System};

/// Seed and restart budget used when the map has to be found numerically.
pub const ANSATZ_SEED: u64 = 0x7068_6173_6563_6f76;
pub const ANSATZ_RESTARTS: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QubitCloneSpec {
    n_in: usize,
    n_out: usize,
    criterion: Criterion,
}

impl QubitCloneSpec {
    pub fn new(n_in: usize, n_out: usize, criterion: Criterion) -> Result<Self> {
        if n_in == 0 {
            return Err(Error::Range("at least one input copy is required"));
        }
        if n_out < n_in {
            return Err(Error::Range("output copies must not be fewer than input copies"));
        }
        Ok(Self { n_in, n_out, criterion })
    }

    pub fn n_in(&self) -> usize {
        self.n_in
    }

    pub fn n_out(&self) -> usize {
        self.n_out
    }

    pub fn criterion(&self) -> Criterion {
        self.criterion
    }

    pub fn same_parity(&self) -> bool {
        (self.n_out - self.n_in).is_multiple_of(2)
    }
}

/// How the coefficients of a constructed map were obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapOrigin {
    Analytic,
    /// Maximized numerically inside the two-block mirror ansatz.
    NumericalWithinAnsatz,
}

pub fn optimal_map(spec: QubitCloneSpec) -> Result<ChoiOperator> {
    optimal_map_with_origin(spec).map(|(op, _)| op)
}

pub fn optimal_map_with_origin(spec: QubitCloneSpec) -> Result<(ChoiOperator, MapOrigin)> {
    let (n, m) = (spec.n_in, spec.n_out);
    if spec.same_parity() {
        let block = ChoiBlock::new(PhaseWeight::Qubit { nu: (m - n) / 2 }, vec![1.0; n + 1], 1.0)?;
        return Ok((ChoiOperator::new(System::Qubit, n, m, vec![block])?, MapOrigin::Analytic));
    }
    let nu_minus = (m - n - 1) / 2;
    let (low, origin) = match spec.criterion {
        Criterion::Global => (global_mirror_coeffs(n, m, nu_minus)?, MapOrigin::Analytic),
        Criterion::SingleParticle if n == 1 => (vec![1.0, 1.0], MapOrigin::Analytic),
        Criterion::SingleParticle if n == 2 => (two_copy_single_coeffs(m), MapOrigin::Analytic),
        Criterion::SingleParticle => {
            let fit = oracle::optimize_mirror_ansatz(
                Criterion::SingleParticle,
                n,
                m,
                nu_minus,
                ANSATZ_RESTARTS,
                ANSATZ_SEED,
            )?;
            (fit.coeffs, MapOrigin::NumericalWithinAnsatz)
        }
    };
    Ok((mirror_pair(n, m, nu_minus, low)?, origin))
}

/// `½(R_{ν₋}(r) + R_{ν₊}(reverse r))` with `ν₊ = M − N − ν₋`.
pub fn mirror_pair(n: usize, m: usize, nu_minus: usize, low: Vec<f64>) -> Result<ChoiOperator> {
    let high: Vec<f64> = low.iter().rev().copied().collect();
    let blocks = vec![
        ChoiBlock::new(PhaseWeight::Qubit { nu: nu_minus }, low, 0.5)?,
        ChoiBlock::new(PhaseWeight::Qubit { nu: m - n - nu_minus }, high, 0.5)?,
    ];
    ChoiOperator::new(System::Qubit, n, m, blocks)
}

// Each mirror pair {j, N−j} carries weights proportional to √C(M, j+ν₋)
// and √C(M, N−j+ν₋) on a circle of radius √2.
fn global_mirror_coeffs(n: usize, m: usize, nu: usize) -> Result<Vec<f64>> {
    (0..=n)
        .map(|j| {
            let a = binomial(m, j + nu)? as f64;
            let b = binomial(m, n - j + nu)? as f64;
            Ok(math::sqrt(2.0 * a / (a + b)))
        })
        .collect()
}

fn two_copy_single_coeffs(m: usize) -> Vec<f64> {
    let m = m as f64;
    let p = (m - 1.0) * (m + 3.0);
    let r0 = math::sqrt(2.0 * p / (p + (m + 1.0) * (m + 1.0)));
    vec![r0, 1.0, math::sqrt(2.0 - r0 * r0)]
}

/// Closed-form optimal global fidelity, for same parity only.
///
/// Opposite-parity values have no reliable printed expression and must be
/// read off the constructed map.
pub fn closed_form_global_fidelity(spec: QubitCloneSpec) -> Option<f64> {
    if spec.criterion != Criterion::Global || !spec.same_parity() {
        return None;
    }
    let (n, m) = (spec.n_in, spec.n_out);
    if n == 1 {
        let c = binomial(m, (m - 1) / 2).ok()? as f64;
        return Some(c / math::powi(2.0, m as i32 - 1));
    }
    let nu = (m - n) / 2;
    let mut sum = 0.0;
    for j in 0..=n {
        sum += math::sqrt(binomial(n, j).ok()? as f64 * binomial(m, nu + j).ok()? as f64);
    }
    Some(sum * sum / math::powi(2.0, (n + m) as i32))
}

/// Closed-form optimal single-particle fidelity where one is known: all
/// same-parity pairs, `N = 1` and `N = 2` with odd `M`.
pub fn closed_form_single_fidelity(spec: QubitCloneSpec) -> Option<f64> {
    if spec.criterion != Criterion::SingleParticle {
        return None;
    }
    let (n, m) = (spec.n_in, spec.n_out);
    let mf = m as f64;
    if spec.same_parity() {
        let mut sum = 0.0;
        for j in 0..n {
            let c = math::sqrt(binomial(n, j).ok()? as f64 * binomial(n, j + 1).ok()? as f64);
            let ladder = (((m + n) / 2 - j) * ((m - n) / 2 + j + 1)) as f64;
            sum += c * math::sqrt(ladder);
        }
        return Some(0.5 + sum / (mf * math::powi(2.0, n as i32)));
    }
    match n {
        1 => Some(0.5 * (1.0 + math::sqrt(mf * (mf + 2.0)) / (2.0 * mf))),
        2 => Some(0.5 * (1.0 + math::sqrt(mf * mf + 2.0 * mf - 1.0) / (core::f64::consts::SQRT_2 * mf))),
        _ => None,
    }
}

pub fn closed_form_fidelity(spec: QubitCloneSpec) -> Option<f64> {
    match spec.criterion {
        Criterion::Global => closed_form_global_fidelity(spec),
        Criterion::SingleParticle => closed_form_single_fidelity(spec),
    }
}
