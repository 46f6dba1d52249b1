//! Optimal phase-covariant cloning of equatorial qubits and qutrits.
//!
//! Cloning channels are stored through their Choi operators, which for
//! phase-covariant maps split into a direct sum of blocks labelled by a
//! phase weight. Every block that can be optimal is a (non-normalized)
//! rank-one projector, so a channel is described by a handful of
//! nonnegative coefficients per block.
//!
//! The crate is `no_std` (it needs `alloc`). Module map:
//!
//! * [`tensor`]: small dense complex linear algebra.
//! * [`symspace`]: symmetric-subspace labels, combinatorial weights and
//!   equatorial overlaps.
//! * [`choi`]: block-diagonal Choi operators, channel application,
//!   integrity checks and the two fidelity functionals.
//! * [`qubit`] and [`qutrit`]: the optimal maps and their closed-form
//!   fidelities.
//! * [`oracle`]: an independent maximizer over the whole block feasible set.
//! * [`report`]: assembles a [`choi::FidelityReport`] for one cell.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

mod error;
mod math;

pub mod choi;
pub mod oracle;
pub mod qubit;
pub mod qutrit;
pub mod report;
pub mod symspace;
pub mod tensor;

pub use choi::{ChoiBlock, ChoiOperator, Criterion, DenseChoi, FidelityReport};
pub use error::{Error, Result};
pub use symspace::{PhaseWeight, System};
pub use tensor::{ComplexMatrix, DensityMatrix};
