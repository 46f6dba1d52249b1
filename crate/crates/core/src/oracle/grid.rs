//! Brute-force angle grid over the symmetrized ansatz families.
//!
//! Qubits: for every weight `ν` the map `½(R_ν(x) + R_{M−N−ν}(reverse x))`.
//! Qutrits: for every weight the equal mixture of a block and its two
//! cyclic images. Each normalized coefficient group is swept by its polar
//! angles on `[0, π/2]`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;

use super::{
    check_bounds, constructed_value, distinct, embedded_block_forms, qubit_mirror_problem, FeasiblePoint,
    OracleResult,
};
use super::ascent::{Group, Problem, QuadTerm};
use crate::choi::Criterion;
use crate::error::{Error, Result};
use crate::math;
use crate::qutrit::permute_weight;
use crate::symspace::{PhaseWeight, System};

pub const MAX_GRID_COEFFS: usize = 6;
pub const MAX_GRID_STEPS: usize = 200;

struct Candidate {
    problem: Problem,
    /// `(weight, scale, variable order)` of each block in the ansatz.
    blocks: Vec<(PhaseWeight, f64, Vec<usize>)>,
}

fn qubit_candidates(criterion: Criterion, n: usize, m: usize) -> Result<Vec<Candidate>> {
    let forms = embedded_block_forms(System::Qubit, criterion, n, m)?;
    let lookup = |w: PhaseWeight| {
        forms
            .iter()
            .find(|(fw, _)| *fw == w)
            .map(|(_, q)| q.clone())
            .ok_or(Error::Range("missing phase block"))
    };
    (0..=m - n)
        .map(|nu| {
            let problem = qubit_mirror_problem(n, m, nu, lookup)?;
            let blocks = vec![
                (PhaseWeight::Qubit { nu }, 0.5, (0..=n).collect()),
                (PhaseWeight::Qubit { nu: m - n - nu }, 0.5, (0..=n).rev().collect()),
            ];
            Ok(Candidate { problem, blocks })
        })
        .collect()
}

fn qutrit_candidates(criterion: Criterion, m: usize) -> Result<Vec<Candidate>> {
    let forms = embedded_block_forms(System::Qutrit, criterion, 1, m)?;
    let form = |nu1: usize, nu2: usize| {
        forms
            .iter()
            .find(|(w, _)| *w == PhaseWeight::Qutrit { nu1, nu2 })
            .map(|(_, q)| q.iter().map(|v| v / 3.0).collect::<Vec<_>>())
            .ok_or(Error::Range("missing phase block"))
    };
    let mut out = Vec::new();
    for w in PhaseWeight::all(System::Qutrit, 1, m) {
        let PhaseWeight::Qutrit { nu1, nu2 } = w else { continue };
        let mut terms = Vec::new();
        let mut blocks = Vec::new();
        let (mut label, mut order) = ((nu1, nu2), vec![0, 1, 2]);
        for _ in 0..3 {
            terms.push(QuadTerm { idx: order.clone(), q: form(label.0, label.1)? });
            blocks.push((PhaseWeight::Qutrit { nu1: label.0, nu2: label.1 }, 1.0 / 3.0, order.clone()));
            label = permute_weight(m, label.0, label.1);
            order = vec![order[2], order[0], order[1]];
        }
        let problem = Problem {
            dim: 3,
            terms,
            groups: vec![Group { idx: vec![0, 1, 2], radius: math::sqrt(3.0) }],
            nonneg: true,
        };
        out.push(Candidate { problem, blocks });
    }
    Ok(out)
}

fn place(group: &Group, angles: &[f64], x: &mut [f64]) {
    let r = group.radius;
    match group.idx.as_slice() {
        [a] => x[*a] = r,
        [a, b] => {
            x[*a] = r * math::cos(angles[0]);
            x[*b] = r * math::sin(angles[0]);
        }
        [a, b, c] => {
            x[*a] = r * math::sin(angles[0]) * math::cos(angles[1]);
            x[*b] = r * math::sin(angles[0]) * math::sin(angles[1]);
            x[*c] = r * math::cos(angles[0]);
        }
        _ => unreachable!("groups have at most three members"),
    }
}

fn scan(c: &Candidate, steps: usize) -> (f64, Vec<f64>) {
    let n_angles: usize = c.problem.groups.iter().map(|g| g.idx.len() - 1).sum();
    let mut counter = vec![0usize; n_angles];
    let mut x = vec![0.0; c.problem.dim];
    let mut best = (f64::NEG_INFINITY, x.clone());
    let step = FRAC_PI_2 / steps as f64;
    loop {
        let mut k = 0;
        for g in &c.problem.groups {
            let len = g.idx.len() - 1;
            let angles: Vec<f64> = counter[k..k + len].iter().map(|&i| i as f64 * step).collect();
            place(g, &angles, &mut x);
            k += len;
        }
        let v = c.problem.value(&x);
        if v > best.0 {
            best = (v, x.clone());
        }
        // Odometer increment over the angle indices.
        let mut pos = 0;
        loop {
            if pos == n_angles {
                return best;
            }
            counter[pos] += 1;
            if counter[pos] <= steps {
                break;
            }
            counter[pos] = 0;
            pos += 1;
        }
    }
}

fn assemble(system: System, n: usize, m: usize, c: &Candidate, x: &[f64]) -> Result<FeasiblePoint> {
    let parts = c
        .blocks
        .iter()
        .map(|(w, scale, order)| {
            let s = math::sqrt(*scale);
            (*w, order.iter().map(|&i| s * x[i]).collect())
        })
        .collect();
    FeasiblePoint::from_coeffs(system, n, m, parts)
}

/// Dense angle scan over the ansatz; within `O(1/grid_steps)` of its optimum.
pub fn exhaustive_small_search(
    system: System,
    criterion: Criterion,
    n: usize,
    m: usize,
    grid_steps: usize,
) -> Result<OracleResult> {
    check_bounds(system, n, m)?;
    let coeffs = match system {
        System::Qubit => n + 1,
        System::Qutrit => 3,
    };
    if coeffs > MAX_GRID_COEFFS {
        return Err(Error::Range("grid search is limited to six coefficients"));
    }
    if grid_steps == 0 || grid_steps > MAX_GRID_STEPS {
        return Err(Error::Range("grid steps must lie in 1..=200"));
    }
    let candidates = match system {
        System::Qubit => qubit_candidates(criterion, n, m)?,
        System::Qutrit => qutrit_candidates(criterion, m)?,
    };
    let mut points = Vec::with_capacity(candidates.len());
    for c in &candidates {
        let (v, x) = scan(c, grid_steps);
        points.push((v, assemble(system, n, m, c, &x)?));
    }
    let (best_value, best_point) = points
        .iter()
        .max_by(|a, b| a.0.total_cmp(&b.0))
        .cloned()
        .ok_or(Error::Range("no phase blocks to scan"))?;
    Ok(OracleResult {
        best_value,
        best_point,
        restarts: 0,
        converged: true,
        gap_vs_constructed: best_value - constructed_value(system, criterion, n, m)?,
        distinct_optima: distinct(points, best_value),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qutrit_two_outputs() {
        let r = exhaustive_small_search(System::Qutrit, Criterion::Global, 1, 2, 200).unwrap();
        assert!((r.best_value - 5.0 / 9.0).abs() < 1e-4);
        assert!(r.best_point.to_choi().is_ok());
    }

    #[test]
    fn qubit_one_to_three_single() {
        let r = exhaustive_small_search(System::Qubit, Criterion::SingleParticle, 1, 3, 200).unwrap();
        assert!((r.best_value - 5.0 / 6.0).abs() < 1e-4);
    }

    #[test]
    fn rejects_large_cases() {
        assert!(exhaustive_small_search(System::Qubit, Criterion::Global, 1, 3, 201).is_err());
        assert!(exhaustive_small_search(System::Qubit, Criterion::Global, 1, 3, 0).is_err());
    }
}
