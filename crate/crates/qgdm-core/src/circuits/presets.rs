use std::f64::consts::{FRAC_PI_2, FRAC_PI_3};

use serde::{Deserialize, Serialize};

use super::{CircuitKind, InitialStateSpec, OperatorSpec, QuantumGameConfig};
use crate::quantum::Gate;

/// The two published quantum model variants: unitary-parameterized
/// (`qgdm-u`) and gate-based (`qgdm-g`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuantumModel {
    QgdmU,
    QgdmG,
}

/// Best-found parameter sets per model and circuit.
///
/// The unitary model plays `U(pi/2)` for the ego and `U(0)` for every
/// opponent with no entanglement, starting from the uniform superposition.
/// The gate model entangles: identity/sigma-y at `gamma = pi/2` from basis
/// state 2 in the two-player two-strategy circuit, and Hadamard for the ego
/// with sigma-x opponents at `gamma = pi/3` from the uniform superposition
/// elsewhere.
pub fn preset(model: QuantumModel, circuit: CircuitKind) -> QuantumGameConfig {
    let n_players = circuit.n_players();
    match model {
        QuantumModel::QgdmU => {
            let mut player_ops = vec![OperatorSpec::Unitary(0.0); n_players];
            player_ops[0] = OperatorSpec::Unitary(FRAC_PI_2);
            QuantumGameConfig {
                circuit,
                gamma: 0.0,
                player_ops,
                initial: InitialStateSpec::Epd,
            }
        }
        QuantumModel::QgdmG => match circuit {
            CircuitKind::TwoPTwoS => QuantumGameConfig {
                circuit,
                gamma: FRAC_PI_2,
                player_ops: vec![
                    OperatorSpec::Gate(Gate::Identity),
                    OperatorSpec::Gate(Gate::SigmaY),
                ],
                initial: InitialStateSpec::Basis(2),
            },
            CircuitKind::ThreePTwoS | CircuitKind::TwoPThreeS => {
                let mut player_ops = vec![OperatorSpec::Gate(Gate::SigmaX); n_players];
                player_ops[0] = OperatorSpec::Gate(Gate::H);
                QuantumGameConfig {
                    circuit,
                    gamma: FRAC_PI_3,
                    player_ops,
                    initial: InitialStateSpec::Epd,
                }
            }
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::{evaluate_circuit, profile_probabilities};

    fn dist(model: QuantumModel, circuit: CircuitKind) -> Vec<f64> {
        let config = preset(model, circuit);
        config.validate().unwrap();
        profile_probabilities(&evaluate_circuit(&config).unwrap(), circuit)
            .probs()
            .to_vec()
    }

    fn assert_close(actual: &[f64], expected: &[f64]) {
        assert_eq!(actual.len(), expected.len());
        for (i, (&a, &e)) in actual.iter().zip(expected).enumerate() {
            assert!((a - e).abs() < 1e-10, "index {i}: got {a}, expected {e}");
        }
    }

    #[test]
    fn unitary_preset_parameters() {
        let config = preset(QuantumModel::QgdmU, CircuitKind::TwoPTwoS);
        assert_eq!(config.gamma, 0.0);
        assert_eq!(
            config.player_ops,
            vec![OperatorSpec::Unitary(FRAC_PI_2), OperatorSpec::Unitary(0.0)]
        );
        assert_eq!(config.initial, InitialStateSpec::Epd);
    }

    #[test]
    fn gate_preset_parameters() {
        let two = preset(QuantumModel::QgdmG, CircuitKind::TwoPTwoS);
        assert_eq!(two.gamma, FRAC_PI_2);
        assert_eq!(
            two.player_ops,
            vec![OperatorSpec::Gate(Gate::Identity), OperatorSpec::Gate(Gate::SigmaY)]
        );
        assert_eq!(two.initial, InitialStateSpec::Basis(2));

        let three = preset(QuantumModel::QgdmG, CircuitKind::ThreePTwoS);
        assert_eq!(three.gamma, FRAC_PI_3);
        assert_eq!(
            three.player_ops,
            vec![
                OperatorSpec::Gate(Gate::H),
                OperatorSpec::Gate(Gate::SigmaX),
                OperatorSpec::Gate(Gate::SigmaX),
            ]
        );
        assert_eq!(three.initial, InitialStateSpec::Epd);
    }

    // The expected distributions below were computed with an independent
    // matrix-chain evaluation and frozen here.

    #[test]
    fn unitary_two_player_distribution() {
        assert_close(&dist(QuantumModel::QgdmU, CircuitKind::TwoPTwoS), &[0.5, 0.5, 0.0, 0.0]);
    }

    #[test]
    fn unitary_three_player_distribution() {
        assert_close(
            &dist(QuantumModel::QgdmU, CircuitKind::ThreePTwoS),
            &[0.25, 0.25, 0.25, 0.25, 0.0, 0.0, 0.0, 0.0],
        );
    }

    #[test]
    fn unitary_three_strategy_distribution() {
        let third = 1.0 / 3.0;
        assert_close(
            &dist(QuantumModel::QgdmU, CircuitKind::TwoPThreeS),
            &[third, third, third, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        );
    }

    #[test]
    fn gate_two_player_distribution_is_the_cooperative_point_mass() {
        assert_close(&dist(QuantumModel::QgdmG, CircuitKind::TwoPTwoS), &[1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn gate_three_player_distribution() {
        assert_close(
            &dist(QuantumModel::QgdmG, CircuitKind::ThreePTwoS),
            &[0.1875, 0.1875, 0.1875, 0.1875, 0.0625, 0.0625, 0.0625, 0.0625],
        );
    }

    #[test]
    fn gate_three_strategy_distribution() {
        let third = 1.0 / 3.0;
        assert_close(
            &dist(QuantumModel::QgdmG, CircuitKind::TwoPThreeS),
            &[third, third, third, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        );
    }

    #[test]
    fn all_presets_validate() {
        for model in [QuantumModel::QgdmU, QuantumModel::QgdmG] {
            for circuit in
                [CircuitKind::TwoPTwoS, CircuitKind::ThreePTwoS, CircuitKind::TwoPThreeS]
            {
                preset(model, circuit).validate().unwrap();
            }
        }
    }
}
