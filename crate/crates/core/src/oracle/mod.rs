//! Independent numerical maximization of the cloning fidelities.
//!
//! The fidelity functionals used here are rebuilt from the full product
//! space: the ideal output state (or the per-site projectors) is formed on
//! `d^M` digits and pulled back through the symmetric embedding. Nothing in
//! this module reads the block formulas of [`crate::choi`] except the
//! mirror-ansatz fit used by the qubit constructor.
//!
//! Feasible points are block-diagonal Choi operators with one rank-one
//! block per phase weight and nonnegative coefficients. The trace condition
//! makes the coefficients attached to each input basis vector a unit
//! vector, so the feasible set is a product of spheres intersected with the
//! nonnegative orthant.

mod ascent;
mod grid;

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::choi::{block_form, block_slots, ChoiBlock, ChoiOperator, Criterion};
use crate::error::{Error, Result};
use crate::math;
use crate::report::constructed_map;
use crate::symspace::{embedding, sym_dim, PhaseWeight, System};
use crate::tensor::ComplexMatrix;

use ascent::{Group, Problem, QuadTerm};

pub use grid::{exhaustive_small_search, MAX_GRID_COEFFS, MAX_GRID_STEPS};

pub const DEFAULT_RESTARTS: usize = 50;
/// Optima within this distance of the best value are reported as distinct
/// candidates.
pub const DISTINCT_TOL: f64 = 1e-8;
/// Largest oracle advantage over a constructed map that still counts as
/// agreement with an optimality claim.
pub const CLAIM_TOL: f64 = 1e-7;

pub const MAX_QUBIT_INPUTS: usize = 4;
pub const MAX_QUBIT_OUTPUTS: usize = 8;
pub const MAX_QUTRIT_OUTPUTS: usize = 6;
pub const MAX_FULL_BLOCK_OUTPUTS: usize = 3;

/// A feasible operator with every block at unit scale.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasiblePoint {
    system: System,
    n_in: usize,
    n_out: usize,
    blocks: Vec<ChoiBlock>,
}

impl FeasiblePoint {
    pub fn blocks(&self) -> &[ChoiBlock] {
        &self.blocks
    }

    pub fn to_choi(&self) -> Result<ChoiOperator> {
        ChoiOperator::new(self.system, self.n_in, self.n_out, self.blocks.clone())
    }

    fn from_coeffs(system: System, n_in: usize, n_out: usize, parts: Vec<(PhaseWeight, Vec<f64>)>) -> Result<Self> {
        let blocks = parts
            .into_iter()
            .map(|(w, c)| ChoiBlock::new(w, c, 1.0))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { system, n_in, n_out, blocks })
    }

    fn flat(&self) -> Vec<f64> {
        self.blocks.iter().flat_map(|b| b.coeffs().iter().copied()).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub best_value: f64,
    pub best_point: FeasiblePoint,
    pub restarts: usize,
    /// Whether the run that produced `best_value` met the gradient tolerance.
    pub converged: bool,
    /// `best_value` minus the fidelity of the constructed map.
    pub gap_vs_constructed: f64,
    /// Every distinct point found within [`DISTINCT_TOL`] of the best value.
    pub distinct_optima: Vec<FeasiblePoint>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FullBlockResult {
    pub best_value: f64,
    pub restarts: usize,
    pub converged: bool,
}

/// Coefficients of the best two-block mirror map found.
#[derive(Debug, Clone, PartialEq)]
pub struct MirrorFit {
    pub coeffs: Vec<f64>,
    pub value: f64,
    pub converged: bool,
}

fn check_bounds(system: System, n: usize, m: usize) -> Result<()> {
    let ok = match system {
        System::Qubit => (1..=MAX_QUBIT_INPUTS).contains(&n) && m >= n && m <= MAX_QUBIT_OUTPUTS,
        System::Qutrit => n == 1 && (1..=MAX_QUTRIT_OUTPUTS).contains(&m),
    };
    if ok {
        Ok(())
    } else {
        Err(Error::Range("oracle sizes outside the supported bounds"))
    }
}

/// Equatorial product state at zero phase on `d^n` digits.
fn product_state(d: usize, n: usize) -> Vec<Complex64> {
    let amp = math::powi(1.0 / math::sqrt(d as f64), n as i32);
    vec![Complex64::new(amp, 0.0); d.pow(n as u32)]
}

fn pull_back(v: &ComplexMatrix, x: &[Complex64]) -> Vec<Complex64> {
    (0..v.cols())
        .map(|a| (0..v.rows()).map(|r| v[(r, a)].conj() * x[r]).sum())
        .collect()
}

/// `V† (I ⊗ … ⊗ |ψ⟩⟨ψ| ⊗ … ⊗ I) V` with the projector on `site`.
fn site_projector(v: &ComplexMatrix, d: usize, m: usize, site: usize) -> ComplexMatrix {
    let one = 1.0 / d as f64;
    let stride = d.pow((m - 1 - site) as u32);
    let dim = v.cols();
    let mut out = ComplexMatrix::zeros(dim, dim);
    for x in 0..v.rows() {
        let base = x - ((x / stride) % d) * stride;
        for e in 0..d {
            let y = base + e * stride;
            for a in 0..dim {
                let left = v[(x, a)].conj() * one;
                if left == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for b in 0..dim {
                    out[(a, b)] += left * v[(y, b)];
                }
            }
        }
    }
    out
}

/// Output-side operator `A` with `fidelity = Tr[(A ⊗ ρᵗ) R]`.
fn output_operator(system: System, criterion: Criterion, m: usize) -> Result<ComplexMatrix> {
    let d = system.local_dim();
    let v = embedding(system, m)?;
    Ok(match criterion {
        Criterion::Global => ComplexMatrix::projector(&pull_back(&v, &product_state(d, m))),
        Criterion::SingleParticle => {
            let mut acc = ComplexMatrix::zeros(v.cols(), v.cols());
            for site in 0..m {
                acc = &acc + &site_projector(&v, d, m, site);
            }
            acc.scale(Complex64::new(1.0 / m as f64, 0.0))
        }
    })
}

/// Quadratic form of every phase block, derived from the product space.
pub fn embedded_block_forms(
    system: System,
    criterion: Criterion,
    n: usize,
    m: usize,
) -> Result<Vec<(PhaseWeight, Vec<f64>)>> {
    let a = output_operator(system, criterion, m)?;
    let psi_in = pull_back(&embedding(system, n)?, &product_state(system.local_dim(), n));
    let b = ComplexMatrix::projector(&psi_in).transpose();
    PhaseWeight::all(system, n, m)
        .into_iter()
        .map(|w| {
            let slots = block_slots(system, n, m, w)?;
            let k = slots.len();
            let mut q = vec![0.0; k * k];
            for (s, ss) in slots.iter().enumerate() {
                for (t, st) in slots.iter().enumerate() {
                    q[s * k + t] = (a[(ss.out, st.out)] * b[(ss.inp, st.inp)]).re;
                }
            }
            Ok((w, q))
        })
        .collect()
}

/// One rank-one block per weight; one unit sphere per input basis vector.
fn full_problem(system: System, n: usize, m: usize, forms: &[(PhaseWeight, Vec<f64>)]) -> Result<(Problem, Vec<(PhaseWeight, usize)>)> {
    let mut terms = Vec::new();
    let mut layout = Vec::new();
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); sym_dim(system, n)];
    let mut offset = 0;
    for (w, q) in forms {
        let slots = block_slots(system, n, m, *w)?;
        let idx: Vec<usize> = (offset..offset + slots.len()).collect();
        for (s, i) in slots.iter().zip(&idx) {
            groups[s.inp].push(*i);
        }
        terms.push(QuadTerm { idx, q: q.clone() });
        layout.push((*w, offset));
        offset += slots.len();
    }
    let groups = groups.into_iter().map(|idx| Group { idx, radius: 1.0 }).collect();
    Ok((Problem { dim: offset, terms, groups, nonneg: true }, layout))
}

fn split_point(system: System, n: usize, m: usize, layout: &[(PhaseWeight, usize)], x: &[f64]) -> Result<FeasiblePoint> {
    let mut parts = Vec::with_capacity(layout.len());
    for (i, (w, start)) in layout.iter().enumerate() {
        let end = layout.get(i + 1).map_or(x.len(), |l| l.1);
        parts.push((*w, x[*start..end].to_vec()));
    }
    FeasiblePoint::from_coeffs(system, n, m, parts)
}

fn constructed_value(system: System, criterion: Criterion, n: usize, m: usize) -> Result<f64> {
    Ok(constructed_map(system, criterion, n, m)?.0.fidelity(criterion))
}

fn distinct(points: Vec<(f64, FeasiblePoint)>, best: f64) -> Vec<FeasiblePoint> {
    let mut out: Vec<FeasiblePoint> = Vec::new();
    for (v, p) in points {
        if v < best - DISTINCT_TOL {
            continue;
        }
        let flat = p.flat();
        let dup = out.iter().any(|q| {
            q.flat().iter().zip(&flat).map(|(a, b)| math::abs(a - b)).fold(0.0, f64::max) < 1e-6
        });
        if !dup {
            out.push(p);
        }
    }
    out
}

/// Multi-start projected-gradient ascent over the full feasible set.
pub fn maximize_fidelity(
    system: System,
    criterion: Criterion,
    n: usize,
    m: usize,
    restarts: usize,
    seed: u64,
) -> Result<OracleResult> {
    check_bounds(system, n, m)?;
    if restarts == 0 {
        return Err(Error::Range("at least one restart is required"));
    }
    let forms = embedded_block_forms(system, criterion, n, m)?;
    let (problem, layout) = full_problem(system, n, m, &forms)?;
    let runs = problem.multistart(restarts, seed);
    let mut best = 0;
    for (i, r) in runs.iter().enumerate() {
        if r.value > runs[best].value {
            best = i;
        }
    }
    let best_value = runs[best].value;
    let converged = runs[best].converged;
    let best_point = split_point(system, n, m, &layout, &runs[best].x)?;
    let points = runs
        .iter()
        .map(|r| Ok((r.value, split_point(system, n, m, &layout, &r.x)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(OracleResult {
        best_value,
        best_point,
        restarts,
        converged,
        gap_vs_constructed: best_value - constructed_value(system, criterion, n, m)?,
        distinct_optima: distinct(points, best_value),
    })
}

/// Same search with an unrestricted positive block per weight,
/// `R_w = L_w L_wᵀ`, to test the rank-one reduction at the smallest sizes.
pub fn maximize_full_block(
    system: System,
    criterion: Criterion,
    n: usize,
    m: usize,
    restarts: usize,
    seed: u64,
) -> Result<FullBlockResult> {
    check_bounds(system, n, m)?;
    if n != 1 || m > MAX_FULL_BLOCK_OUTPUTS {
        return Err(Error::Range("full-block search needs N = 1 and M <= 3"));
    }
    if restarts == 0 {
        return Err(Error::Range("at least one restart is required"));
    }
    let forms = embedded_block_forms(system, criterion, n, m)?;
    let mut terms = Vec::new();
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); sym_dim(system, n)];
    let mut offset = 0;
    for (w, q) in &forms {
        let slots = block_slots(system, n, m, *w)?;
        let k = slots.len();
        // Variable offset + s*k + c is entry (s, c) of L_w.
        for c in 0..k {
            let idx: Vec<usize> = (0..k).map(|s| offset + s * k + c).collect();
            terms.push(QuadTerm { idx, q: q.clone() });
        }
        for (s, slot) in slots.iter().enumerate() {
            groups[slot.inp].extend((0..k).map(|c| offset + s * k + c));
        }
        offset += k * k;
    }
    let problem = Problem {
        dim: offset,
        terms,
        groups: groups.into_iter().map(|idx| Group { idx, radius: 1.0 }).collect(),
        nonneg: false,
    };
    let runs = problem.multistart(restarts, seed);
    let best = runs
        .iter()
        .max_by(|a, b| a.value.total_cmp(&b.value))
        .ok_or(Error::Range("at least one restart is required"))?;
    Ok(FullBlockResult { best_value: best.value, restarts, converged: best.converged })
}

/// `½(Q_ν x + Q_{M−N−ν} reverse(x))` with pairs `{j, N−j}` on a circle of
/// radius √2 and a self-paired middle entry fixed to one.
fn qubit_mirror_problem(n: usize, m: usize, nu: usize, form: impl Fn(PhaseWeight) -> Result<Vec<f64>>) -> Result<Problem> {
    let mirror = m - n - nu;
    let half = |q: Vec<f64>| q.into_iter().map(|v| 0.5 * v).collect::<Vec<_>>();
    let terms = vec![
        QuadTerm { idx: (0..=n).collect(), q: half(form(PhaseWeight::Qubit { nu })?) },
        QuadTerm { idx: (0..=n).rev().collect(), q: half(form(PhaseWeight::Qubit { nu: mirror })?) },
    ];
    let groups = (0..=n / 2)
        .map(|j| {
            if j == n - j {
                Group { idx: vec![j], radius: 1.0 }
            } else {
                Group { idx: vec![j, n - j], radius: core::f64::consts::SQRT_2 }
            }
        })
        .collect();
    Ok(Problem { dim: n + 1, terms, groups, nonneg: true })
}

/// Maximizes the chosen fidelity inside the qubit two-block mirror family
/// `½(R_{ν₋}(r) + R_{ν₊}(reverse r))`. Uses the block forms directly, so it
/// has no size bound.
pub fn optimize_mirror_ansatz(
    criterion: Criterion,
    n: usize,
    m: usize,
    nu_minus: usize,
    restarts: usize,
    seed: u64,
) -> Result<MirrorFit> {
    if n == 0 || m < n || nu_minus > m - n {
        return Err(Error::Range("mirror ansatz needs 1 <= N <= M and nu within 0..=M-N"));
    }
    if restarts == 0 {
        return Err(Error::Range("at least one restart is required"));
    }
    let problem = qubit_mirror_problem(n, m, nu_minus, |w| block_form(System::Qubit, criterion, n, m, w))?;
    let runs = problem.multistart(restarts, seed);
    let best = runs
        .into_iter()
        .max_by(|a, b| a.value.total_cmp(&b.value))
        .ok_or(Error::Range("at least one restart is required"))?;
    Ok(MirrorFit { coeffs: best.x, value: best.value, converged: best.converged })
}
