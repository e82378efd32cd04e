use super::{CircuitError, CircuitKind, InitialStateSpec, QuantumGameConfig};
use crate::game::JointDistribution;
use crate::quantum::{entangler_j, ComplexMatrix, StateVector};

/// Mass below which a decoded 3-strategy distribution counts as fully
/// invalid and falls back to the uniform distribution.
const DEAD_STATE_EPSILON: f64 = 1e-9;

/// Builds the register's initial state.
pub fn build_initial_state(
    spec: &InitialStateSpec,
    n_qubits: usize,
) -> Result<StateVector, CircuitError> {
    match spec {
        InitialStateSpec::Epd => Ok(StateVector::uniform(n_qubits)?),
        InitialStateSpec::Basis(k) => Ok(StateVector::basis(n_qubits, *k)?),
    }
}

/// Evaluates the circuit: entangle, apply each player's operator to their
/// qubit(s), disentangle.
///
/// `psi_f = J_dagger(gamma) * (tensor of player operators) * J(gamma) * psi_0`
///
/// In the two-player three-strategy circuit each player's operator acts on
/// their qubit pair as `op (x) op`.
pub fn evaluate_circuit(cfg: &QuantumGameConfig) -> Result<StateVector, CircuitError> {
    cfg.validate()?;
    let n_qubits = cfg.circuit.n_qubits();
    let psi0 = build_initial_state(&cfg.initial, n_qubits)?;
    let j = entangler_j(cfg.gamma, n_qubits)?;

    let mut ops: Option<ComplexMatrix> = None;
    for spec in &cfg.player_ops {
        let single = spec.single_qubit_matrix();
        let player_op = match cfg.circuit {
            CircuitKind::TwoPTwoS | CircuitKind::ThreePTwoS => single,
            CircuitKind::TwoPThreeS => single.tensor(&single),
        };
        ops = Some(match ops {
            None => player_op,
            Some(acc) => acc.tensor(&player_op),
        });
    }
    let ops = ops.expect("validated configs have at least two players");

    let final_state = psi0.apply(&j)?.apply(&ops)?.apply(&j.dagger())?;
    Ok(final_state)
}

/// Decodes a final state into a probability distribution over action
/// profiles, in the game's flat row-major profile order (player 1 most
/// significant).
///
/// For single-qubit-per-player circuits this is the Born distribution
/// verbatim. For the three-strategy circuit each player's qubit pair decodes
/// as `00 -> strategy 0, 01 -> strategy 1, 10 -> strategy 2`; mass on a `11`
/// pair belongs to no strategy and is dropped, with the remaining nine
/// profiles renormalized. Should essentially all mass land on dropped
/// states, the decode falls back to the uniform distribution.
pub fn profile_probabilities(final_state: &StateVector, circuit: CircuitKind) -> JointDistribution {
    let born = final_state.probabilities();
    assert_eq!(
        born.len(),
        1 << circuit.n_qubits(),
        "state dimension does not match circuit"
    );
    match circuit {
        CircuitKind::TwoPTwoS | CircuitKind::ThreePTwoS => {
            JointDistribution::new(born).expect("Born rule yields a valid distribution")
        }
        CircuitKind::TwoPThreeS => {
            let mut probs = vec![0.0; 9];
            let mut valid_mass = 0.0;
            for (index, &p) in born.iter().enumerate() {
                let pair1 = index >> 2;
                let pair2 = index & 0b11;
                if pair1 == 0b11 || pair2 == 0b11 {
                    continue;
                }
                probs[3 * pair1 + pair2] += p;
                valid_mass += p;
            }
            if valid_mass < DEAD_STATE_EPSILON {
                log::warn!("all probability mass on invalid pair states; using uniform fallback");
                return JointDistribution::uniform(9);
            }
            for p in &mut probs {
                *p /= valid_mass;
            }
            JointDistribution::new(probs).expect("renormalized mass sums to one")
        }
    }
}
