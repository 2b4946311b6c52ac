//! Quantum thermometry with qubit probes dephasing in a squeezed thermal bath.
//!
//! The crate is organised bottom-up:
//!
//! - [`bath`]: the decay factor Γ(t) of the squeezed Ohmic bath and its
//!   temperature derivative, evaluated as explicitly truncated series.
//! - [`state`]: pure states, density matrices, the GHZ/W probe families and
//!   the independent-dephasing channel (Kraus and Hamming-damping forms).
//! - [`linalg`]: Hermitian eigendecomposition used by the spectral evaluators.
//! - [`qfi`]: spectral QFI, SLD, classical Fisher information, the
//!   Kraus-derivative upper bound and the catalog of closed-form QFIs.
//! - [`strategies`]: time sweeps, channel-use sweeps, optimal GHZ size and
//!   random-state search.
//!
//! Units are natural (ħ = k_B = 1). Basis index convention: qubit 0 is the
//! most significant bit of the computational-basis index.

// comparisons are written negated so that NaN fails them
#![allow(clippy::neg_cmp_op_on_partial_ord)]

#![forbid(unsafe_code)]

pub mod bath;
pub mod lambert;
pub mod linalg;
pub mod qfi;
pub mod state;
pub mod strategies;
pub mod summation;

mod error;

pub use error::{Error, Result};

pub use num_complex::Complex64;

/// Dense complex matrix used for every operator in the crate.
pub type CMatrix = nalgebra::DMatrix<Complex64>;

/// Largest supported register size. Matrix side is `2^MAX_QUBITS`.
pub const MAX_QUBITS: usize = 12;
