//! Energy functionals, error metrics, order estimation and theorem checks.

use crate::error::{Error, Result};
use crate::integrators::{SemilinearSystem, StepWindow, Trajectory};
use crate::linalg::{dot, vec_inf_norm, vec_norm2, vec_sub, SquareMatrix};
use crate::matfun;
use crate::polarization::PolarizedPotential;
use crate::scalar::Scalar;

/// Polarized energy of a window:
/// Hbar = (1/2p) sum_i y_i^T M y_i + Ubar(window).
pub fn polarized_energy<T: Scalar>(
    pot: &PolarizedPotential<T>,
    m: &SquareMatrix<T>,
    window: &[Vec<T>],
) -> T {
    assert_eq!(window.len(), pot.window(), "window length");
    let p = T::from_usize_exact(window.len());
    let mut quad = T::zero();
    for y in window {
        let my = m.mat_vec(y);
        quad = quad + dot(y, &my);
    }
    quad / (T::lit(2.0) * p) + pot.energy(window)
}

/// Discrete energy H(y) = y^T M y / 2 + U(y).
pub fn discrete_energy<T: Scalar>(sys: &SemilinearSystem<T>, y: &[T]) -> T {
    sys.hamiltonian(y)
}

/// Max Euclidean distance between two trajectories on the same grid.
pub fn global_error<T: Scalar>(traj: &Trajectory<T>, reference: &Trajectory<T>) -> Result<T> {
    if traj.len() != reference.len() {
        return Err(Error::GridMismatch {
            detail: "different numbers of states",
        });
    }
    let tol = T::lit(1e-9);
    for (a, b) in traj.times.iter().zip(&reference.times) {
        if (*a - *b).abs() > tol * (T::one() + a.abs()) {
            return Err(Error::GridMismatch {
                detail: "time grids differ",
            });
        }
    }
    let mut worst = T::zero();
    for (ya, yb) in traj.states.iter().zip(&reference.states) {
        worst = worst.max(vec_norm2(&vec_sub(ya, yb)));
    }
    Ok(worst)
}

/// Least-squares slope of log(err) against log(h), with per-interval slopes.
#[derive(Debug, Clone)]
pub struct OrderEstimate {
    pub slope: f64,
    pub pairwise: Vec<f64>,
    pub hs: Vec<f64>,
    pub errors: Vec<f64>,
}

pub fn observed_order<T: Scalar>(hs: &[T], errs: &[T]) -> Result<OrderEstimate> {
    if hs.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: hs.len(),
        });
    }
    if hs.len() != errs.len() {
        return Err(Error::ShapeMismatch {
            context: "observed_order",
            expected: hs.len(),
            got: errs.len(),
        });
    }
    for w in hs.windows(2) {
        if !(w[1] < w[0]) {
            return Err(Error::ParameterOutOfRange {
                name: "hs",
                value: w[1].to_f64_lossy(),
                expected: "strictly decreasing",
            });
        }
    }
    if errs.iter().any(|e| !(*e > T::zero())) {
        return Err(Error::ParameterOutOfRange {
            name: "errs",
            value: 0.0,
            expected: "positive",
        });
    }
    let xs: Vec<f64> = hs.iter().map(|h| h.to_f64_lossy().ln()).collect();
    let ys: Vec<f64> = errs.iter().map(|e| e.to_f64_lossy().ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let pairwise = xs
        .windows(2)
        .zip(ys.windows(2))
        .map(|(x, y)| (y[1] - y[0]) / (x[1] - x[0]))
        .collect();
    Ok(OrderEstimate {
        slope,
        pairwise,
        hs: hs.iter().map(|h| h.to_f64_lossy()).collect(),
        errors: errs.iter().map(|e| e.to_f64_lossy()).collect(),
    })
}

/// Report on B = exp(phJM)^T M exp(phJM) - M, which is zero for
/// skew-symmetric J and negative semidefinite for negative semidefinite J.
#[derive(Debug, Clone)]
pub struct DefinitenessReport<T> {
    pub norm_b: T,
    pub max_eigenvalue: T,
}

pub fn lemma_definiteness<T: Scalar>(
    j: &SquareMatrix<T>,
    m: &SquareMatrix<T>,
    p: usize,
    h: T,
) -> Result<DefinitenessReport<T>> {
    let e = matfun::expm(&j.mul(m).scale(T::from_usize_exact(p) * h))?;
    let b = e.transpose().mul(m).mul(&e).sub(m);
    let norm_b = b.inf_norm();
    let max_eigenvalue = crate::linalg::symmetric_eigenvalues(&b.symmetric_part())
        .into_iter()
        .fold(T::neg_infinity(), T::max);
    Ok(DefinitenessReport {
        norm_b,
        max_eigenvalue,
    })
}

/// Forward step from the window, then a backward step (negated h) from the
/// reversed shifted window; a symmetric scheme recovers the oldest state.
pub fn symmetry_residual<T: Scalar>(
    sys: &SemilinearSystem<T>,
    pot: &PolarizedPotential<T>,
    w: &StepWindow<T>,
    h: T,
) -> Result<T> {
    let p = pot.window();
    let scale = T::from_usize_exact(p) * h;
    let pair = matfun::exp_and_phi(sys.j(), sys.m(), scale)?;
    let y_new = crate::integrators::lieep_step(sys, pot, w, h, &pair)?;

    let mut shifted = w.clone();
    shifted.advance(y_new);
    let back_pair = matfun::exp_and_phi(sys.j(), sys.m(), -scale)?;
    let recovered =
        crate::integrators::lieep_step(sys, pot, &shifted.reversed(), -h, &back_pair)?;
    Ok(vec_inf_norm(&vec_sub(&recovered, w.oldest())))
}

/// Count of increases above tol * (1 + |series[0]|) and the largest one.
#[derive(Debug, Clone)]
pub struct MonotonicityReport<T> {
    pub violations: usize,
    pub max_increase: T,
}

pub fn monotonicity_check<T: Scalar>(series: &[T], tol: T) -> MonotonicityReport<T> {
    let threshold = tol * (T::one() + series.first().map(|v| v.abs()).unwrap_or_else(T::zero));
    let mut violations = 0;
    let mut max_increase = T::zero();
    for w in series.windows(2) {
        let inc = w[1] - w[0];
        if inc > threshold {
            violations += 1;
        }
        max_increase = max_increase.max(inc);
    }
    MonotonicityReport {
        violations,
        max_increase,
    }
}

/// Peak-to-peak spread of a series relative to 1 + |first value|.
pub fn relative_drift<T: Scalar>(series: &[T]) -> T {
    if series.is_empty() {
        return T::zero();
    }
    let lo = series.iter().copied().fold(T::infinity(), T::min);
    let hi = series.iter().copied().fold(T::neg_infinity(), T::max);
    (hi - lo) / (T::one() + series[0].abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrators::StructureClass;
    use crate::polarization::polarize_monomial;

    #[test]
    fn polarized_energy_direct_formula() {
        // p = 2, M = I, window ((1,0),(1,0)), Ubar = 0 -> 1/4 (1 + 1) = 0.5
        let pot = crate::polarization::polarize_polynomial(
            &crate::polarization::ScalarPolynomial::new(vec![0.0]),
            2,
        )
        .unwrap();
        // dim-1 polarization; build a dim-1 window
        let m = SquareMatrix::identity(1);
        let w = vec![vec![1.0f64], vec![1.0]];
        let e = polarized_energy(&pot, &m, &w);
        assert!((e - 0.5).abs() < 1e-15);
    }

    #[test]
    fn polarized_equals_discrete_at_equal_window() {
        // For the built-in polarizations Ubar(y,..,y) = U(y), so the window
        // energy at an all-equal window is the discrete energy.
        let pot = polarize_monomial::<f64>(4).unwrap();
        let m = SquareMatrix::new(1, vec![3.0f64]).unwrap();
        let x = 1.3f64;
        let w = vec![vec![x], vec![x]];
        let hbar = polarized_energy(&pot, &m, &w);
        let h = 0.5 * 3.0 * x * x + x.powi(4);
        assert!((hbar - h).abs() < 1e-13);
    }

    #[test]
    fn observed_order_recovers_synthetic_slopes() {
        let hs = [0.1f64, 0.05, 0.025, 0.0125];
        let e2: Vec<f64> = hs.iter().map(|h| 3.0 * h * h).collect();
        let est = observed_order(&hs, &e2).unwrap();
        assert!((est.slope - 2.0).abs() < 1e-10);
        let e3: Vec<f64> = hs.iter().map(|h| 0.7 * h.powi(3)).collect();
        let est = observed_order(&hs, &e3).unwrap();
        assert!((est.slope - 3.0).abs() < 1e-10);
        assert_eq!(est.pairwise.len(), 3);
    }

    #[test]
    fn observed_order_needs_two_points() {
        assert!(matches!(
            observed_order(&[0.1f64], &[0.5]),
            Err(Error::InsufficientData { .. })
        ));
    }

    #[test]
    fn lemma_scalar_dissipative_case() {
        // J = -1, M = 1, p = 1, h = 1: B = e^{-2} - 1 < 0
        let j = SquareMatrix::new(1, vec![-1.0]).unwrap();
        let m = SquareMatrix::identity(1);
        let rep = lemma_definiteness(&j, &m, 1, 1.0).unwrap();
        let expected = (-2.0f64).exp() - 1.0;
        assert!((rep.max_eigenvalue - expected).abs() < 1e-12);
    }

    #[test]
    fn monotonicity_counts() {
        let flat = [1.0f64; 5];
        assert_eq!(monotonicity_check(&flat, 1e-12).violations, 0);
        let rising = [0.0f64, 1.0, 2.0, 3.0];
        assert_eq!(monotonicity_check(&rising, 1e-12).violations, 3);
    }

    #[test]
    fn grid_mismatch_detected() {
        let t1 = Trajectory::<f64> {
            times: vec![0.0, 0.1],
            states: vec![vec![0.0], vec![0.0]],
            channels: vec![],
            truncated_tail: false,
        };
        let t2 = Trajectory::<f64> {
            times: vec![0.0, 0.2],
            states: vec![vec![0.0], vec![0.0]],
            channels: vec![],
            truncated_tail: false,
        };
        assert!(matches!(
            global_error(&t1, &t2),
            Err(Error::GridMismatch { .. })
        ));
        let _ = StructureClass::SkewSymmetric;
    }

    #[test]
    fn identical_trajectories_have_zero_error() {
        let t = Trajectory::<f64> {
            times: vec![0.0, 0.1],
            states: vec![vec![1.0, 2.0], vec![3.0, 4.0]],
            channels: vec![],
            truncated_tail: false,
        };
        assert_eq!(global_error(&t, &t).unwrap(), 0.0);
    }
}
