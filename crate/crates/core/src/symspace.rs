//! Symmetric subspaces of N qubits and N qutrits.
//!
//! Basis vectors are labelled by occupation numbers and are the uniform,
//! real, positive superpositions of all product states with those
//! occupations. Qubit labels are ordered by the number of ones; qutrit
//! labels `(p, q)` (p ones, q twos) are ordered lexicographically. Every
//! matrix in the crate uses these orderings.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::math;
use crate::tensor::ComplexMatrix;

/// Largest number of sites for which [`embedding`] will build the
/// full tensor-product isometry.
pub const MAX_EMBED_SITES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum System {
    Qubit,
    Qutrit,
}

impl System {
    /// Single-site Hilbert space dimension.
    pub fn local_dim(self) -> usize {
        match self {
            System::Qubit => 2,
            System::Qutrit => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            System::Qubit => "qubit",
            System::Qutrit => "qutrit",
        }
    }

    /// Number of independent phases of an equatorial state.
    pub fn phase_count(self) -> usize {
        self.local_dim() - 1
    }
}

/// `|s_{N,n}⟩`: N qubits, n of them in `|1⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct QubitSymIndex {
    n_total: usize,
    n_ones: usize,
}

impl QubitSymIndex {
    pub fn new(n_total: usize, n_ones: usize) -> Result<Self> {
        if n_ones > n_total {
            return Err(Error::Range("qubit occupation exceeds the number of sites"));
        }
        Ok(Self { n_total, n_ones })
    }

    pub fn n_total(&self) -> usize {
        self.n_total
    }

    pub fn n_ones(&self) -> usize {
        self.n_ones
    }

    /// Position in the symmetric basis.
    pub fn position(&self) -> usize {
        self.n_ones
    }
}

/// `|s_{k,p,q}⟩`: k qutrits, p in `|1⟩`, q in `|2⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct QutritSymIndex {
    n_total: usize,
    n_one: usize,
    n_two: usize,
}

impl QutritSymIndex {
    pub fn new(n_total: usize, n_one: usize, n_two: usize) -> Result<Self> {
        if n_one + n_two > n_total {
            return Err(Error::Range("qutrit occupations exceed the number of sites"));
        }
        Ok(Self { n_total, n_one, n_two })
    }

    pub fn n_total(&self) -> usize {
        self.n_total
    }

    pub fn n_one(&self) -> usize {
        self.n_one
    }

    pub fn n_two(&self) -> usize {
        self.n_two
    }

    pub fn n_zero(&self) -> usize {
        self.n_total - self.n_one - self.n_two
    }

    /// Lexicographic position of `(p, q)` among all labels of `n_total` sites.
    pub fn position(&self) -> usize {
        qutrit_position(self.n_total, self.n_one, self.n_two)
    }

    pub fn from_position(n_total: usize, position: usize) -> Result<Self> {
        let mut rest = position;
        for p in 0..=n_total {
            let row = n_total - p + 1;
            if rest < row {
                return Self::new(n_total, p, rest);
            }
            rest -= row;
        }
        Err(Error::Range("qutrit basis position out of range"))
    }
}

pub(crate) fn qutrit_position(k: usize, p: usize, q: usize) -> usize {
    // Rows p' < p hold k - p' + 1 labels each.
    let before: usize = (0..p).map(|pp| k - pp + 1).sum();
    before + q
}

/// Irreducible-block label of a phase-covariant Choi operator.
///
/// A qubit block `ν` collects `|s_{M,j+ν}⟩⊗|s_{N,j}⟩`; a qutrit block
/// `(ν₁, ν₂)` collects the three vectors `|s_{M,ν₁,ν₂}⟩|0⟩`,
/// `|s_{M,ν₁+1,ν₂}⟩|1⟩` and `|s_{M,ν₁,ν₂+1}⟩|2⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PhaseWeight {
    Qubit { nu: usize },
    Qutrit { nu1: usize, nu2: usize },
}

impl PhaseWeight {
    pub fn system(&self) -> System {
        match self {
            PhaseWeight::Qubit { .. } => System::Qubit,
            PhaseWeight::Qutrit { .. } => System::Qutrit,
        }
    }

    /// Checks `0 ≤ ν ≤ M − N` (qubits) or `ν₁ + ν₂ ≤ M − 1` (qutrits).
    pub fn validate(&self, n_in: usize, n_out: usize) -> Result<()> {
        match *self {
            PhaseWeight::Qubit { nu } => {
                if n_out < n_in || nu > n_out - n_in {
                    return Err(Error::Range("qubit phase weight outside 0..=M-N"));
                }
            }
            PhaseWeight::Qutrit { nu1, nu2 } => {
                if n_in != 1 || n_out == 0 || nu1 + nu2 > n_out - 1 {
                    return Err(Error::Range("qutrit phase weight outside nu1+nu2 <= M-1"));
                }
            }
        }
        Ok(())
    }

    /// All valid weights for an `n_in → n_out` map, in ascending order.
    pub fn all(system: System, n_in: usize, n_out: usize) -> Vec<PhaseWeight> {
        match system {
            System::Qubit => {
                if n_out < n_in {
                    return Vec::new();
                }
                (0..=n_out - n_in).map(|nu| PhaseWeight::Qubit { nu }).collect()
            }
            System::Qutrit => {
                if n_in != 1 || n_out == 0 {
                    return Vec::new();
                }
                let mut out = Vec::new();
                for nu1 in 0..n_out {
                    for nu2 in 0..(n_out - nu1) {
                        out.push(PhaseWeight::Qutrit { nu1, nu2 });
                    }
                }
                out
            }
        }
    }
}

/// Exact binomial coefficient `C(n, k)`.
pub fn binomial(n: usize, k: usize) -> Result<u128> {
    if k > n {
        return Err(Error::Range("binomial: k > n"));
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step.
        acc = acc
            .checked_mul((n - i) as u128)
            .ok_or(Error::Overflow("binomial coefficient"))?
            / (i as u128 + 1);
    }
    Ok(acc)
}

/// Exact multinomial `T(M, ν₁, ν₂) = M! / ((M−ν₁−ν₂)! ν₁! ν₂!)`.
pub fn trinomial(m: usize, nu1: usize, nu2: usize) -> Result<u128> {
    if nu1 + nu2 > m {
        return Err(Error::Range("trinomial: nu1 + nu2 > M"));
    }
    let a = binomial(m, nu1)?;
    let b = binomial(m - nu1, nu2)?;
    a.checked_mul(b).ok_or(Error::Overflow("trinomial coefficient"))
}

/// Dimension of the symmetric subspace of `n` sites.
pub fn sym_dim(system: System, n: usize) -> usize {
    match system {
        System::Qubit => n + 1,
        System::Qutrit => (n + 1) * (n + 2) / 2,
    }
}

/// `⟨ψ₀^{⊗M}|s_{M,k}⟩ = √C(M,k) / 2^{M/2}`.
pub fn equatorial_overlap_qubit(m: usize, idx: QubitSymIndex) -> Result<f64> {
    if idx.n_total != m {
        return Err(Error::Dimension { expected: m, got: idx.n_total });
    }
    let c = binomial(m, idx.n_ones)? as f64;
    Ok(math::sqrt(c / math::powi(2.0, m as i32)))
}

/// `⟨ψ₀₀^{⊗M}|s_{M,p,q}⟩ = √T(M,p,q) / 3^{M/2}`.
pub fn equatorial_overlap_qutrit(m: usize, idx: QutritSymIndex) -> Result<f64> {
    if idx.n_total != m {
        return Err(Error::Dimension { expected: m, got: idx.n_total });
    }
    let t = trinomial(m, idx.n_one, idx.n_two)? as f64;
    Ok(math::sqrt(t / math::powi(3.0, m as i32)))
}

/// Real overlaps of the equatorial product state at zero phase with every
/// symmetric basis vector of `n` sites, in basis order.
pub fn equatorial_overlaps(system: System, n: usize) -> Result<Vec<f64>> {
    match system {
        System::Qubit => (0..=n)
            .map(|k| equatorial_overlap_qubit(n, QubitSymIndex::new(n, k)?))
            .collect(),
        System::Qutrit => qutrit_labels(n)
            .into_iter()
            .map(|idx| equatorial_overlap_qutrit(n, idx))
            .collect(),
    }
}

/// All qutrit labels of `k` sites in basis order.
pub fn qutrit_labels(k: usize) -> Vec<QutritSymIndex> {
    let mut out = Vec::with_capacity(sym_dim(System::Qutrit, k));
    for p in 0..=k {
        for q in 0..=(k - p) {
            out.push(QutritSymIndex { n_total: k, n_one: p, n_two: q });
        }
    }
    out
}

/// Phase carried by each symmetric basis vector under the equatorial phase
/// rotation: `n·φ` for qubits, `p·φ + q·θ` for qutrits.
pub fn basis_phases(system: System, n: usize, phases: &[f64]) -> Result<Vec<f64>> {
    if phases.len() != system.phase_count() {
        return Err(Error::Dimension { expected: system.phase_count(), got: phases.len() });
    }
    Ok(match system {
        System::Qubit => (0..=n).map(|k| k as f64 * phases[0]).collect(),
        System::Qutrit => qutrit_labels(n)
            .into_iter()
            .map(|l| l.n_one as f64 * phases[0] + l.n_two as f64 * phases[1])
            .collect(),
    })
}

/// Diagonal of the phase rotation `U^{⊗n}` restricted to the symmetric basis.
pub fn phase_rotation(system: System, n: usize, phases: &[f64]) -> Result<Vec<Complex64>> {
    Ok(basis_phases(system, n, phases)?
        .into_iter()
        .map(|a| Complex64::new(math::cos(a), math::sin(a)))
        .collect())
}

/// The equatorial product state `|ψ_φ⟩^{⊗n}` in symmetric coordinates.
pub fn equatorial_state(system: System, n: usize, phases: &[f64]) -> Result<Vec<Complex64>> {
    let overlaps = equatorial_overlaps(system, n)?;
    let rot = phase_rotation(system, n, phases)?;
    Ok(overlaps.iter().zip(rot).map(|(o, u)| u * *o).collect())
}

/// Isometry from the symmetric subspace of `n` sites into the full
/// `d^n`-dimensional product space. Site 0 is the most significant digit.
pub fn embedding(system: System, n: usize) -> Result<ComplexMatrix> {
    if n > MAX_EMBED_SITES {
        return Err(Error::Range("full-space embedding beyond the supported number of sites"));
    }
    let d = system.local_dim();
    let full = d.pow(n as u32);
    let cols = sym_dim(system, n);
    let mut v = ComplexMatrix::zeros(full, cols);
    for x in 0..full {
        let (col, weight) = occupation_column(system, n, x)?;
        v[(x, col)] = Complex64::new(1.0 / math::sqrt(weight as f64), 0.0);
    }
    Ok(v)
}

/// Symmetric basis column of a product-basis index, and the number of
/// product states sharing its occupations.
fn occupation_column(system: System, n: usize, mut x: usize) -> Result<(usize, u128)> {
    let d = system.local_dim();
    let mut counts = [0usize; 3];
    for _ in 0..n {
        counts[x % d] += 1;
        x /= d;
    }
    Ok(match system {
        System::Qubit => (counts[1], binomial(n, counts[1])?),
        System::Qutrit => (
            qutrit_position(n, counts[1], counts[2]),
            trinomial(n, counts[1], counts[2])?,
        ),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pascal(n: usize, k: usize) -> u128 {
        let mut row = alloc::vec![1u128];
        for _ in 0..n {
            let mut next = alloc::vec![1u128; row.len() + 1];
            for i in 1..row.len() {
                next[i] = row[i - 1] + row[i];
            }
            row = next;
        }
        row[k]
    }

    #[test]
    fn binomial_examples() {
        assert_eq!(binomial(3, 1).unwrap(), 3);
        assert_eq!(binomial(0, 0).unwrap(), 1);
        assert_eq!(binomial(10, 5).unwrap(), pascal(10, 5));
        assert_eq!(binomial(10, 5).unwrap(), 252);
        assert!(matches!(binomial(2, 3), Err(Error::Range(_))));
    }

    #[test]
    fn large_binomials_stay_exact() {
        for k in [0, 1, 17, 50, 51, 101] {
            assert_eq!(binomial(101, k).unwrap(), pascal(101, k));
        }
    }

    #[test]
    fn trinomial_examples() {
        assert_eq!(trinomial(4, 1, 1).unwrap(), 12);
        assert_eq!(trinomial(3, 1, 1).unwrap(), 6);
        for m in 0..8 {
            assert_eq!(trinomial(m, 0, 0).unwrap(), 1);
        }
        assert!(trinomial(2, 2, 1).is_err());
    }

    #[test]
    fn sym_dim_examples() {
        assert_eq!(sym_dim(System::Qubit, 3), 4);
        assert_eq!(sym_dim(System::Qutrit, 1), 3);
        assert_eq!(sym_dim(System::Qutrit, 4), 15);
    }

    #[test]
    fn qubit_overlap_examples() {
        let s = 1.0 / libm::sqrt(2.0);
        let o = equatorial_overlap_qubit(1, QubitSymIndex::new(1, 0).unwrap()).unwrap();
        assert!((o - s).abs() < 1e-15);
        let o = equatorial_overlap_qubit(2, QubitSymIndex::new(2, 1).unwrap()).unwrap();
        assert!((o - s).abs() < 1e-15);
        assert!(equatorial_overlap_qubit(3, QubitSymIndex::new(2, 1).unwrap()).is_err());
    }

    #[test]
    fn qutrit_overlap_examples() {
        let o = equatorial_overlap_qutrit(1, QutritSymIndex::new(1, 0, 0).unwrap()).unwrap();
        assert!((o - 1.0 / libm::sqrt(3.0)).abs() < 1e-15);
        let o = equatorial_overlap_qutrit(4, QutritSymIndex::new(4, 1, 1).unwrap()).unwrap();
        assert!((o - libm::sqrt(12.0) / 9.0).abs() < 1e-15);
    }

    #[test]
    fn overlaps_are_normalized() {
        let q: f64 = equatorial_overlaps(System::Qubit, 5).unwrap().iter().map(|x| x * x).sum();
        assert!((q - 1.0).abs() < 1e-14);
        let t: f64 = equatorial_overlaps(System::Qutrit, 3).unwrap().iter().map(|x| x * x).sum();
        assert!((t - 1.0).abs() < 1e-14);
    }

    #[test]
    fn qutrit_positions_roundtrip() {
        for k in 0..6 {
            for (i, l) in qutrit_labels(k).iter().enumerate() {
                assert_eq!(l.position(), i);
                assert_eq!(QutritSymIndex::from_position(k, i).unwrap(), *l);
            }
            assert!(QutritSymIndex::from_position(k, sym_dim(System::Qutrit, k)).is_err());
        }
    }

    #[test]
    fn phase_weight_ranges() {
        assert_eq!(PhaseWeight::all(System::Qubit, 2, 5).len(), 4);
        assert_eq!(PhaseWeight::all(System::Qutrit, 1, 3).len(), 6);
        assert!(PhaseWeight::Qubit { nu: 4 }.validate(2, 5).is_err());
        assert!(PhaseWeight::Qutrit { nu1: 1, nu2: 2 }.validate(1, 3).is_err());
        assert!(PhaseWeight::Qutrit { nu1: 1, nu2: 1 }.validate(1, 3).is_ok());
    }

    #[test]
    fn embedding_columns_are_orthonormal() {
        for (system, n) in [(System::Qubit, 4), (System::Qutrit, 3)] {
            let v = embedding(system, n).unwrap();
            let gram = v.adjoint().matmul(&v).unwrap();
            let id = ComplexMatrix::identity(sym_dim(system, n));
            assert!(gram.max_abs_diff(&id).unwrap() < 1e-14);
        }
        assert!(embedding(System::Qubit, MAX_EMBED_SITES + 1).is_err());
    }
}
