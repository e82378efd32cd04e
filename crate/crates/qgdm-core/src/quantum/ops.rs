use std::f64::consts::FRAC_PI_2;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{Complex, ComplexMatrix, QuantumError};

/// The fixed single-qubit gate set available to gate-based strategies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gate {
    H,
    SigmaX,
    SigmaY,
    SigmaZ,
    Identity,
}

impl Gate {
    pub const ALL: [Gate; 5] = [Gate::H, Gate::SigmaX, Gate::SigmaY, Gate::SigmaZ, Gate::Identity];

    /// The gate's 2x2 matrix.
    pub fn matrix(self) -> ComplexMatrix {
        let z = Complex::ZERO;
        let one = Complex::ONE;
        let i = Complex::I;
        match self {
            Gate::H => {
                let h = Complex::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                ComplexMatrix::from_rows(&[vec![h, h], vec![h, -h]])
            }
            Gate::SigmaX => ComplexMatrix::from_rows(&[vec![z, one], vec![one, z]]),
            Gate::SigmaY => ComplexMatrix::from_rows(&[vec![z, -i], vec![i, z]]),
            Gate::SigmaZ => ComplexMatrix::from_rows(&[vec![one, z], vec![z, -one]]),
            Gate::Identity => ComplexMatrix::identity(2),
        }
    }
}

impl FromStr for Gate {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "h" => Ok(Gate::H),
            "sigma_x" | "sigmax" | "x" => Ok(Gate::SigmaX),
            "sigma_y" | "sigmay" | "y" => Ok(Gate::SigmaY),
            "sigma_z" | "sigmaz" | "z" => Ok(Gate::SigmaZ),
            "identity" | "i2" | "i" => Ok(Gate::Identity),
            other => Err(format!("unknown gate '{other}'")),
        }
    }
}

/// Real rotation used by the unitary-parameterized strategies:
///
/// ```text
/// U(theta) = [  cos(theta/2)  sin(theta/2) ]
///            [ -sin(theta/2)  cos(theta/2) ]
/// ```
///
/// `theta` is clamped to `[0, pi]` with a warning; angles outside that range
/// only ever come from hand-edited configs and the clamped endpoint is the
/// closest meaningful strategy.
pub fn unitary_u(theta: f64) -> ComplexMatrix {
    let theta = if (0.0..=std::f64::consts::PI).contains(&theta) {
        theta
    } else {
        let clamped = theta.clamp(0.0, std::f64::consts::PI);
        log::warn!("unitary angle {theta} outside [0, pi]; clamping to {clamped}");
        clamped
    };
    let (s, c) = (theta / 2.0).sin_cos();
    let c = Complex::new(c, 0.0);
    let s = Complex::new(s, 0.0);
    ComplexMatrix::from_rows(&[vec![c, s], vec![-s, c]])
}

/// Entangling operator `J(gamma) = exp(-i (gamma/2) X)` where `X` is the
/// `n_qubits`-fold tensor power of sigma-x.
///
/// Because `X^2 = I`, the exponential collapses to the closed form
/// `cos(gamma/2) I - i sin(gamma/2) X`, which is what we evaluate.
pub fn entangler_j(gamma: f64, n_qubits: usize) -> Result<ComplexMatrix, QuantumError> {
    if !(2..=4).contains(&n_qubits) {
        return Err(QuantumError::UnsupportedQubitCount(n_qubits));
    }
    if !(0.0..=FRAC_PI_2 + 1e-12).contains(&gamma) {
        return Err(QuantumError::GammaOutOfRange(gamma));
    }
    let mut x = Gate::SigmaX.matrix();
    for _ in 1..n_qubits {
        x = x.tensor(&Gate::SigmaX.matrix());
    }
    let dim = 1usize << n_qubits;
    let (s, c) = (gamma / 2.0).sin_cos();
    let id = ComplexMatrix::identity(dim).scale(Complex::new(c, 0.0));
    let flip = x.scale(Complex::new(0.0, -s));
    Ok(id.add(&flip))
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI};

    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    use super::*;
    use crate::quantum::{StateVector, NORM_TOL, OPERATOR_TOL};

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn hadamard_matches_definition() {
        let h = Gate::H.matrix();
        let r = 1.0 / 2.0_f64.sqrt();
        assert!((h.get(0, 0) - c(r, 0.0)).norm() < 1e-15);
        assert!((h.get(0, 1) - c(r, 0.0)).norm() < 1e-15);
        assert!((h.get(1, 0) - c(r, 0.0)).norm() < 1e-15);
        assert!((h.get(1, 1) - c(-r, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn sigma_y_matches_definition() {
        let y = Gate::SigmaY.matrix();
        assert_eq!(y.get(0, 0), Complex::ZERO);
        assert_eq!(y.get(0, 1), c(0.0, -1.0));
        assert_eq!(y.get(1, 0), c(0.0, 1.0));
        assert_eq!(y.get(1, 1), Complex::ZERO);
    }

    #[test]
    fn every_gate_is_unitary() {
        for gate in Gate::ALL {
            assert!(gate.matrix().is_unitary(OPERATOR_TOL), "{gate:?} failed unitarity");
        }
    }

    #[test]
    fn gate_names_round_trip() {
        for gate in Gate::ALL {
            let json = serde_json::to_string(&gate).unwrap();
            assert_eq!(serde_json::from_str::<Gate>(&json).unwrap(), gate);
        }
        assert_eq!("sigma_y".parse::<Gate>().unwrap(), Gate::SigmaY);
        assert_eq!("I2".parse::<Gate>().unwrap(), Gate::Identity);
        assert!("cnot".parse::<Gate>().is_err());
    }

    #[test]
    fn unitary_u_endpoints_and_midpoint() {
        // U(0) = I, U(pi) is the antisymmetric flip, U(pi/2) mixes equally.
        assert!(unitary_u(0.0).max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);

        let flip = unitary_u(PI);
        assert!((flip.get(0, 1) - Complex::ONE).norm() < 1e-15);
        assert!((flip.get(1, 0) + Complex::ONE).norm() < 1e-15);

        let r = 1.0 / 2.0_f64.sqrt();
        let mid = unitary_u(FRAC_PI_2);
        let expect = ComplexMatrix::from_rows(&[
            vec![c(r, 0.0), c(r, 0.0)],
            vec![c(-r, 0.0), c(r, 0.0)],
        ]);
        assert!(mid.max_abs_diff(&expect) < 1e-15);
    }

    #[test]
    fn unitary_u_clamps_out_of_range_angles() {
        assert!(unitary_u(-1.0).max_abs_diff(&unitary_u(0.0)) < 1e-15);
        assert!(unitary_u(4.0).max_abs_diff(&unitary_u(PI)) < 1e-15);
    }

    #[test]
    fn hadamard_tensor_sigma_y_entry() {
        // (H (x) sigma_y)[0][1] = (1/sqrt(2)) * (-i)
        let m = Gate::H.matrix().tensor(&Gate::SigmaY.matrix());
        let expect = c(0.0, -1.0 / 2.0_f64.sqrt());
        assert!((m.get(0, 1) - expect).norm() < 1e-15);
    }

    #[test]
    fn single_hadamard_expands_basis_zero() {
        // (H (x) I) |00> = (|00> + |10>) / sqrt(2)
        let op = Gate::H.matrix().tensor(&Gate::Identity.matrix());
        let out = StateVector::basis(2, 0).unwrap().apply(&op).unwrap();
        let r = 1.0 / 2.0_f64.sqrt();
        assert!((out.amplitudes()[0] - c(r, 0.0)).norm() < 1e-15);
        assert!((out.amplitudes()[2] - c(r, 0.0)).norm() < 1e-15);
        assert!(out.amplitudes()[1].norm() < 1e-15);
        assert!(out.amplitudes()[3].norm() < 1e-15);
    }

    #[test]
    fn entangler_rejects_bad_inputs() {
        assert!(matches!(entangler_j(-0.1, 2), Err(QuantumError::GammaOutOfRange(_))));
        assert!(matches!(entangler_j(2.0, 2), Err(QuantumError::GammaOutOfRange(_))));
        assert!(matches!(entangler_j(0.5, 1), Err(QuantumError::UnsupportedQubitCount(1))));
    }

    #[test]
    fn entangler_at_zero_is_identity() {
        for n in 2..=4 {
            let j = entangler_j(0.0, n).unwrap();
            assert!(j.max_abs_diff(&ComplexMatrix::identity(1 << n)) < 1e-15);
        }
    }

    #[test]
    fn entangler_creates_ghz_like_state() {
        // J(pi/2) |00> = (|00> - i|11>) / sqrt(2)
        let j = entangler_j(FRAC_PI_2, 2).unwrap();
        let out = StateVector::basis(2, 0).unwrap().apply(&j).unwrap();
        let r = 1.0 / 2.0_f64.sqrt();
        assert!((out.amplitudes()[0] - c(r, 0.0)).norm() < 1e-12);
        assert!((out.amplitudes()[3] - c(0.0, -r)).norm() < 1e-12);
        assert!(out.amplitudes()[1].norm() < 1e-12);
        assert!(out.amplitudes()[2].norm() < 1e-12);
    }

    #[test]
    fn entangler_is_unitary_across_the_angle_range() {
        for n in 2..=4 {
            for gamma in [0.0, PI / 6.0, FRAC_PI_3, FRAC_PI_2] {
                assert!(entangler_j(gamma, n).unwrap().is_unitary(OPERATOR_TOL));
            }
        }
    }

    /// Truncated Taylor series for `exp(A)`; independent of the closed form
    /// under test. Twenty terms of a matrix with spectral radius <= pi/4
    /// leave a remainder far below the comparison tolerance.
    fn series_exp(a: &ComplexMatrix) -> ComplexMatrix {
        let mut acc = ComplexMatrix::identity(a.rows());
        let mut term = ComplexMatrix::identity(a.rows());
        for k in 1..20 {
            term = term.mul(a).scale(c(1.0 / k as f64, 0.0));
            acc = acc.add(&term);
        }
        acc
    }

    #[test]
    fn entangler_matches_series_exponential() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(0x0e771);
        for n in 2..=4usize {
            let mut x = Gate::SigmaX.matrix();
            for _ in 1..n {
                x = x.tensor(&Gate::SigmaX.matrix());
            }
            for _ in 0..20 {
                let gamma: f64 = rng.random_range(0.0..=FRAC_PI_2);
                let exponent = x.scale(c(0.0, -gamma / 2.0));
                let oracle = series_exp(&exponent);
                let closed = entangler_j(gamma, n).unwrap();
                assert!(
                    closed.max_abs_diff(&oracle) < OPERATOR_TOL,
                    "n={n} gamma={gamma}: diff {}",
                    closed.max_abs_diff(&oracle)
                );
            }
        }
    }

    proptest! {
        #[test]
        fn unitary_u_is_unitary(theta in 0.0..=PI) {
            prop_assert!(unitary_u(theta).is_unitary(OPERATOR_TOL));
        }

        #[test]
        fn global_phase_leaves_probabilities_unchanged(
            phase in 0.0..std::f64::consts::TAU,
            raw in proptest::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 4),
        ) {
            let norm: f64 = raw.iter().map(|(re, im)| re * re + im * im).sum::<f64>().sqrt();
            prop_assume!(norm > 1e-3);
            let amps: Vec<Complex> =
                raw.iter().map(|&(re, im)| c(re / norm, im / norm)).collect();
            let state = StateVector::new(2, amps.clone()).unwrap();
            let rotated = StateVector::new(
                2,
                amps.iter().map(|a| a * Complex::from_polar(1.0, phase)).collect(),
            )
            .unwrap();
            for (p, q) in state.probabilities().iter().zip(rotated.probabilities()) {
                prop_assert!((p - q).abs() < 1e-12);
            }
        }

        #[test]
        fn circuits_preserve_norm(
            gamma in 0.0..=FRAC_PI_2,
            theta in 0.0..=PI,
            basis in 0usize..4,
        ) {
            let j = entangler_j(gamma, 2).unwrap();
            let ops = unitary_u(theta).tensor(&unitary_u(theta / 2.0));
            let out = StateVector::basis(2, basis)
                .unwrap()
                .apply(&j)
                .unwrap()
                .apply(&ops)
                .unwrap()
                .apply(&j.dagger())
                .unwrap();
            let norm: f64 = out.probabilities().iter().sum();
            prop_assert!((norm - 1.0).abs() < NORM_TOL);
        }

        #[test]
        fn tensor_product_is_associative(
            a_raw in proptest::collection::vec(-1.0..1.0f64, 8),
            b_raw in proptest::collection::vec(-1.0..1.0f64, 8),
            c_raw in proptest::collection::vec(-1.0..1.0f64, 8),
        ) {
            let build = |raw: &[f64]| {
                ComplexMatrix::from_rows(&[
                    vec![c(raw[0], raw[1]), c(raw[2], raw[3])],
                    vec![c(raw[4], raw[5]), c(raw[6], raw[7])],
                ])
            };
            let (a, b, cc) = (build(&a_raw), build(&b_raw), build(&c_raw));
            let left = a.tensor(&b).tensor(&cc);
            let right = a.tensor(&b.tensor(&cc));
            prop_assert!(left.max_abs_diff(&right) < 1e-12);
        }
    }
}
