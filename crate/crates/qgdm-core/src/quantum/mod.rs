//! Dense complex linear algebra and the quantum primitives every circuit
//! is built from: the gate set, the parameterized unitary, the entangler,
//! and Born-rule readout.
//!
//! Everything here is a plain immutable value. Dimensions never exceed
//! 16 (four qubits), so all storage is dense and all products are naive.

mod matrix;
mod ops;
mod state;

pub use matrix::ComplexMatrix;
pub use ops::{entangler_j, unitary_u, Gate};
pub use state::StateVector;

/// Complex scalar used throughout the quantum layer.
pub type Complex = num_complex::Complex<f64>;

/// Tolerance for operator checks (unitarity, oracle comparisons).
pub const OPERATOR_TOL: f64 = 1e-10;

/// Tolerance on the 2-norm of a state vector.
pub const NORM_TOL: f64 = 1e-9;

/// Errors from quantum-layer operations with data-dependent preconditions.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QuantumError {
    #[error("entanglement angle {0} outside [0, pi/2]")]
    GammaOutOfRange(f64),
    #[error("unsupported qubit count {0} (supported: 2, 3, 4)")]
    UnsupportedQubitCount(usize),
    #[error("basis index {index} out of range for {n_qubits} qubits")]
    BasisIndexOutOfRange { index: usize, n_qubits: usize },
    #[error("state norm {norm} deviates from 1 by more than {NORM_TOL}")]
    NotNormalized { norm: f64 },
    #[error("operator is {rows}x{cols} but the state has dimension {dim}")]
    DimensionMismatch { rows: usize, cols: usize, dim: usize },
}
