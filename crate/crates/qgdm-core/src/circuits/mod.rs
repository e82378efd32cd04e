//! The player-strategy quantum circuits: configuration types, circuit
//! evaluation, decoding of final states into action-profile distributions,
//! and the named parameter presets.
//!
//! A circuit has one qubit per player strategy slot. Qubit 0 is the most
//! significant index bit and belongs to player 1 (the ego vehicle); this
//! ordering is fixed here once and relied on everywhere.

mod eval;
mod presets;

pub use eval::{build_initial_state, evaluate_circuit, profile_probabilities};
pub use presets::{preset, QuantumModel};

use serde::{Deserialize, Serialize};

use crate::quantum::{ComplexMatrix, Gate, QuantumError};

/// The three supported circuit shapes, named by players x strategies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CircuitKind {
    /// Two players, two strategies each: one qubit per player.
    TwoPTwoS,
    /// Three players, two strategies each: one qubit per player.
    ThreePTwoS,
    /// Two players, three strategies each: a two-qubit pair per player.
    TwoPThreeS,
}

impl CircuitKind {
    pub fn n_players(self) -> usize {
        match self {
            CircuitKind::TwoPTwoS | CircuitKind::TwoPThreeS => 2,
            CircuitKind::ThreePTwoS => 3,
        }
    }

    pub fn strategies_per_player(self) -> usize {
        match self {
            CircuitKind::TwoPTwoS | CircuitKind::ThreePTwoS => 2,
            CircuitKind::TwoPThreeS => 3,
        }
    }

    pub fn n_qubits(self) -> usize {
        match self {
            CircuitKind::TwoPTwoS => 2,
            CircuitKind::ThreePTwoS => 3,
            CircuitKind::TwoPThreeS => 4,
        }
    }

    /// Number of action profiles the decoded distribution ranges over.
    pub fn n_profiles(self) -> usize {
        self.strategies_per_player().pow(self.n_players() as u32)
    }
}

/// A single player's quantum operator: either the parameterized rotation
/// `U(theta)` or a fixed gate. In the two-player three-strategy circuit the
/// operator acts on the player's qubit pair as its tensor square.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorSpec {
    Unitary(f64),
    Gate(Gate),
}

impl OperatorSpec {
    /// The 2x2 matrix this spec denotes (before any tensor squaring).
    pub fn single_qubit_matrix(&self) -> ComplexMatrix {
        match self {
            OperatorSpec::Unitary(theta) => crate::quantum::unitary_u(*theta),
            OperatorSpec::Gate(gate) => gate.matrix(),
        }
    }
}

/// Initial state of the register: the equal-probability superposition or a
/// single computational basis state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialStateSpec {
    Epd,
    Basis(usize),
}

/// Full description of one quantum game evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantumGameConfig {
    pub circuit: CircuitKind,
    pub gamma: f64,
    pub player_ops: Vec<OperatorSpec>,
    pub initial: InitialStateSpec,
}

impl QuantumGameConfig {
    /// Checks the cross-field invariants (operator count, gamma range,
    /// basis index). Deserialized configs must pass through here before
    /// evaluation.
    pub fn validate(&self) -> Result<(), CircuitError> {
        let expected = self.circuit.n_players();
        if self.player_ops.len() != expected {
            return Err(CircuitError::WrongOperatorCount {
                circuit: self.circuit,
                expected,
                got: self.player_ops.len(),
            });
        }
        if !(0.0..=std::f64::consts::FRAC_PI_2 + 1e-12).contains(&self.gamma) {
            return Err(QuantumError::GammaOutOfRange(self.gamma).into());
        }
        if let InitialStateSpec::Basis(k) = self.initial {
            let dim = 1usize << self.circuit.n_qubits();
            if k >= dim {
                return Err(QuantumError::BasisIndexOutOfRange {
                    index: k,
                    n_qubits: self.circuit.n_qubits(),
                }
                .into());
            }
        }
        Ok(())
    }
}

/// Errors from invalid circuit configurations.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CircuitError {
    #[error("{circuit:?} takes {expected} player operators, got {got}")]
    WrongOperatorCount { circuit: CircuitKind, expected: usize, got: usize },
    #[error(transparent)]
    Quantum(#[from] QuantumError),
}
