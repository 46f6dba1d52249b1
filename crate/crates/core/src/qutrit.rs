//! Optimal 1 → M cloners for equatorial qutrits, covariant under both phases.
//!
//! For `M ≢ 1 (mod 3)` the optimal map is an equal mixture of a central
//! block and its two images under the cyclic relabelling `0 → 1 → 2 → 0`
//! of the single-qutrit basis.

use alloc::vec;
use alloc::vec::Vec;

use crate::choi::{ChoiBlock, ChoiOperator, Criterion};
use crate::error::{Error, Result};
use crate::math;
use crate::symspace::{trinomial, PhaseWeight, System};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QutritCloneSpec {
    n_out: usize,
    criterion: Criterion,
}

impl QutritCloneSpec {
    pub fn new(n_out: usize, criterion: Criterion) -> Result<Self> {
        if n_out == 0 {
            return Err(Error::Range("at least one output copy is required"));
        }
        Ok(Self { n_out, criterion })
    }

    pub fn n_out(&self) -> usize {
        self.n_out
    }

    pub fn criterion(&self) -> Criterion {
        self.criterion
    }
}

/// `Λ_M(p, q) = √(p(q+1)) / M`.
pub fn lambda_m(m: usize, p: usize, q: usize) -> f64 {
    if p == 0 {
        return 0.0;
    }
    math::sqrt((p * (q + 1)) as f64) / m as f64
}

/// Block label after the cyclic relabelling: `(ν₁, ν₂) → (M−ν₁−ν₂−1, ν₁)`.
pub fn permute_weight(m: usize, nu1: usize, nu2: usize) -> (usize, usize) {
    (m - nu1 - nu2 - 1, nu1)
}

/// Coefficients after the cyclic relabelling, `[r₀, r₁, r₂] → [r₂, r₀, r₁]`.
pub fn permute_coeffs(r: [f64; 3]) -> [f64; 3] {
    [r[2], r[0], r[1]]
}

/// A block together with its two cyclic images, each at scale ⅓.
pub fn symmetrized_blocks(m: usize, nu1: usize, nu2: usize, r: [f64; 3]) -> Result<Vec<ChoiBlock>> {
    let mut out = Vec::with_capacity(3);
    let (mut w, mut c) = ((nu1, nu2), r);
    for _ in 0..3 {
        out.push(ChoiBlock::new(PhaseWeight::Qutrit { nu1: w.0, nu2: w.1 }, c.to_vec(), 1.0 / 3.0)?);
        w = permute_weight(m, w.0, w.1);
        c = permute_coeffs(c);
    }
    Ok(out)
}

pub fn optimal_map_qutrit(spec: QutritCloneSpec) -> Result<ChoiOperator> {
    let m = spec.n_out;
    let k = m / 3;
    let blocks = match m % 3 {
        1 => vec![ChoiBlock::new(PhaseWeight::Qutrit { nu1: k, nu2: k }, vec![1.0; 3], 1.0)?],
        _ => {
            let r1 = match spec.criterion {
                Criterion::Global => {
                    let a2 = trinomial(m, k, k)? as f64;
                    let b2 = trinomial(m, k + 1, k)? as f64;
                    math::sqrt(3.0 / (a2 / b2 + 2.0))
                }
                Criterion::SingleParticle => {
                    let (la, lb) = single_lambdas(m);
                    0.5 * math::sqrt(3.0) * math::sqrt(1.0 + lb / math::sqrt(lb * lb + 8.0 * la * la))
                }
            };
            let r0 = math::sqrt(3.0 - 2.0 * r1 * r1);
            // (k, k) is the central block for both residues 0 and 2.
            symmetrized_blocks(m, k, k, [r0, r1, r1])?
        }
    };
    ChoiOperator::new(System::Qutrit, 1, m, blocks)
}

fn single_lambdas(m: usize) -> (f64, f64) {
    let mf = m as f64;
    if m.is_multiple_of(3) {
        (math::sqrt(mf * (mf + 3.0)) / (3.0 * mf), (mf + 3.0) / (3.0 * mf))
    } else {
        (math::sqrt((mf + 4.0) * (mf + 1.0)) / (3.0 * mf), (mf + 1.0) / (3.0 * mf))
    }
}

/// Closed forms exist for `M ≡ 1 (mod 3)` under both criteria.
pub fn closed_form_qutrit_fidelity(spec: QutritCloneSpec) -> Option<f64> {
    let m = spec.n_out;
    if m % 3 != 1 {
        return None;
    }
    let k = (m - 1) / 3;
    match spec.criterion {
        Criterion::Global => Some(trinomial(m, k, k).ok()? as f64 / math::powi(3.0, m as i32 - 1)),
        Criterion::SingleParticle => {
            let mf = m as f64;
            Some((1.0 + 2.0 * (mf + 2.0) / (3.0 * mf)) / 3.0)
        }
    }
}
