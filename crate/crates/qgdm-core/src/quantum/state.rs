use super::{Complex, ComplexMatrix, QuantumError, NORM_TOL};

/// Pure state of a small qubit register.
///
/// Amplitudes are stored in computational-basis order with qubit 0 as the
/// most significant bit, so for two qubits the layout is
/// `[|00>, |01>, |10>, |11>]`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<Complex>,
}

impl StateVector {
    /// Wraps raw amplitudes, validating the register size and the norm.
    pub fn new(n_qubits: usize, amplitudes: Vec<Complex>) -> Result<Self, QuantumError> {
        check_qubit_count(n_qubits)?;
        let dim = 1usize << n_qubits;
        if amplitudes.len() != dim {
            return Err(QuantumError::DimensionMismatch {
                rows: amplitudes.len(),
                cols: 1,
                dim,
            });
        }
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(QuantumError::NotNormalized { norm });
        }
        Ok(Self { n_qubits, amplitudes })
    }

    /// Computational basis state `|k>`.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self, QuantumError> {
        check_qubit_count(n_qubits)?;
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(QuantumError::BasisIndexOutOfRange { index, n_qubits });
        }
        let mut amplitudes = vec![Complex::ZERO; dim];
        amplitudes[index] = Complex::ONE;
        Ok(Self { n_qubits, amplitudes })
    }

    /// Uniform superposition with equal real amplitudes `1/sqrt(m)`.
    pub fn uniform(n_qubits: usize) -> Result<Self, QuantumError> {
        check_qubit_count(n_qubits)?;
        let dim = 1usize << n_qubits;
        let amp = Complex::new(1.0 / (dim as f64).sqrt(), 0.0);
        Ok(Self { n_qubits, amplitudes: vec![amp; dim] })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex] {
        &self.amplitudes
    }

    /// Applies a square operator, returning the new state.
    ///
    /// The result is *not* re-validated against the norm tolerance: callers
    /// apply only unitaries, and accumulated rounding stays far below
    /// [`NORM_TOL`] at these dimensions.
    pub fn apply(&self, op: &ComplexMatrix) -> Result<Self, QuantumError> {
        let dim = self.dim();
        if op.rows() != dim || op.cols() != dim {
            return Err(QuantumError::DimensionMismatch {
                rows: op.rows(),
                cols: op.cols(),
                dim,
            });
        }
        let mut amplitudes = vec![Complex::ZERO; dim];
        for (i, out) in amplitudes.iter_mut().enumerate() {
            for j in 0..dim {
                *out += op.get(i, j) * self.amplitudes[j];
            }
        }
        Ok(Self { n_qubits: self.n_qubits, amplitudes })
    }

    /// Born-rule measurement distribution over basis states.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }
}

fn check_qubit_count(n_qubits: usize) -> Result<(), QuantumError> {
    if (2..=4).contains(&n_qubits) {
        Ok(())
    } else {
        Err(QuantumError::UnsupportedQubitCount(n_qubits))
    }
}
