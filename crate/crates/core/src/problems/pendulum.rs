//! Polynomial pendulum oscillator: the pendulum with its cosine potential
//! truncated to a degree-6 Taylor polynomial.
//!
//! y = (q, p), J canonical skew, M = I,
//!
//!   H(q, p) = p^2/2 + q^2/2 - q^4/24 + q^6/720,
//!   U(y) = -q^4/24 + q^6/720.
//!
//! The window-3 polarization and its 4-argument polarized discrete gradient
//! (acting on the q component only) are
//!
//!   Ubar(y_n, y_{n+1}, y_{n+2}) = -(1/24) q_n q_{n+1} q_{n+2} (q_n + q_{n+1} + q_{n+2})/3
//!                                + (1/720) q_n^2 q_{n+1}^2 q_{n+2}^2,
//!   grad_q = (1/240) q_{n+1}^2 q_{n+2}^2 (q_n + q_{n+3})
//!          - (1/24)  q_{n+1} q_{n+2} (q_n + q_{n+1} + q_{n+2} + q_{n+3}).

use crate::integrators::{SemilinearSystem, StructureClass};
use crate::linalg::SquareMatrix;
use crate::polarization::PolarizedPotential;
use crate::scalar::Scalar;

/// Paper initial state (q, p) = (0.5, 1).
pub fn pendulum_initial<T: Scalar>() -> Vec<T> {
    vec![T::lit(0.5), T::one()]
}

/// The untruncated pendulum energy p^2/2 + 1 - cos q, reported alongside the
/// polarized energy in the long-time runs.
pub fn pendulum_original_energy<T: Scalar>(y: &[T]) -> T {
    let (q, p) = (y[0], y[1]);
    T::lit(0.5) * p * p + T::one() - q.cos()
}

pub fn pendulum_truncated<T: Scalar>() -> (SemilinearSystem<T>, PolarizedPotential<T>) {
    let j = SquareMatrix::from_fn(2, |i, jx| match (i, jx) {
        (0, 1) => T::one(),
        (1, 0) => -T::one(),
        _ => T::zero(),
    });
    let m = SquareMatrix::identity(2);
    let c4 = T::lit(1.0 / 24.0);
    let c6 = T::lit(1.0 / 720.0);
    let potential = move |y: &[T]| -> T {
        let q2 = y[0] * y[0];
        -c4 * q2 * q2 + c6 * q2 * q2 * q2
    };
    let grad = move |y: &[T]| -> Vec<T> {
        let q = y[0];
        let q2 = q * q;
        vec![-T::lit(4.0) * c4 * q2 * q + T::lit(6.0) * c6 * q2 * q2 * q, T::zero()]
    };
    let sys = SemilinearSystem::new(
        j,
        m,
        StructureClass::SkewSymmetric,
        Box::new(potential),
        Box::new(grad),
    )
    .expect("canonical structure");

    let third = T::lit(1.0 / 3.0);
    let energy = move |states: &[Vec<T>]| -> T {
        let (q0, q1, q2) = (states[0][0], states[1][0], states[2][0]);
        let prod = q0 * q1 * q2;
        -c4 * prod * (q0 + q1 + q2) * third + c6 * prod * prod
    };
    let gradient = move |args: &[Vec<T>]| -> Vec<T> {
        let (q0, q1, q2, q3) = (args[0][0], args[1][0], args[2][0], args[3][0]);
        let mid = q1 * q2;
        let g = T::lit(1.0 / 240.0) * mid * mid * (q0 + q3)
            - c4 * mid * (q0 + q1 + q2 + q3);
        vec![g, T::zero()]
    };
    let affine = move |states: &[Vec<T>]| -> (SquareMatrix<T>, Vec<T>) {
        let (q0, q1, q2) = (states[0][0], states[1][0], states[2][0]);
        let mid = q1 * q2;
        let slope = T::lit(1.0 / 240.0) * mid * mid - c4 * mid;
        let offset = T::lit(1.0 / 240.0) * mid * mid * q0 - c4 * mid * (q0 + q1 + q2);
        let mut g_mat = SquareMatrix::zeros(2);
        g_mat.set(0, 0, slope);
        (g_mat, vec![offset, T::zero()])
    };
    let pot = PolarizedPotential::from_parts(
        3,
        2,
        true,
        Some(vec![0]),
        Box::new(energy),
        Box::new(gradient),
        Some(Box::new(affine)),
    );
    (sys, pot)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polarization::validate_polarization;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn gradient_consistent_at_equal_arguments() {
        // (1/240) q^4 2q - (1/24) q^2 4q = q^5/120 - q^3/6 = U'(q)
        let (sys, pot) = pendulum_truncated::<f64>();
        for q in [0.3, -1.1, 2.0] {
            let args = vec![vec![q, 0.7]; 4];
            let g = pot.gradient(&args);
            let gu = sys.grad_potential(&[q, 0.7]);
            assert!((g[0] - gu[0]).abs() < 1e-14, "q={q}");
            assert_eq!(g[1], 0.0);
            let closed = q.powi(5) / 120.0 - q.powi(3) / 6.0;
            assert!((g[0] - closed).abs() < 1e-14);
        }
    }

    #[test]
    fn truncated_energy_at_initial_state() {
        let (sys, _) = pendulum_truncated::<f64>();
        let h = sys.hamiltonian(&pendulum_initial::<f64>());
        let expected = 0.5 + 0.125 - 0.5f64.powi(4) / 24.0 + 0.5f64.powi(6) / 720.0;
        assert!((h - expected).abs() < 1e-15);
    }

    #[test]
    fn original_energy_at_initial_state() {
        let h = pendulum_original_energy(&pendulum_initial::<f64>());
        assert!((h - (0.5 + 1.0 - 0.5f64.cos())).abs() < 1e-15);
    }

    #[test]
    fn polarization_validates_with_p3_identity() {
        let (sys, pot) = pendulum_truncated::<f64>();
        let u = |x: &[f64]| sys.potential(x);
        let gu = |x: &[f64]| sys.grad_potential(x);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let report = validate_polarization(&pot, &u, &gu, 500, &mut rng);
        assert!(report.passed(), "{:?}", report.checks);
        for c in &report.checks {
            assert!(c.max_residual <= 1e-11, "{:?}", c);
        }
    }
}
