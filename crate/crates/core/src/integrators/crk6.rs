//! Sixth-order continuous Runge-Kutta scheme, used to manufacture reference
//! solutions and starting values.
//!
//! The three coupled stages (y_{n+1/3}, y_{n+2/3}, y_{n+1}) satisfy
//!
//!   y_{n+a} = y_n + h J int_0^1 w_a(s) gradH(Y_s) ds,
//!
//! with Y_s the cubic interpolant through the four stage values, weight
//! polynomials
//!
//!   w_{1/3}(s) = 37/27 - 32 s / 9 + 20 s^2 / 9,
//!   w_{2/3}(s) = 26/27 +  8 s / 9 - 20 s^2 / 9,
//!   w_1(s)     = 1,
//!
//! and the s-integrals evaluated by 5-point Gauss-Legendre. The stages are
//! solved by fixed-point iteration.

use crate::error::{Error, Result};
use crate::linalg::{axpy, vec_is_finite};
use crate::scalar::Scalar;

use super::quad::gauss_legendre_01;
use super::{IterativeStep, SemilinearSystem};

pub struct Crk6Stepper<'a, T: Scalar> {
    sys: &'a SemilinearSystem<T>,
    h: T,
    tol: T,
    max_iter: usize,
    /// Per quadrature node: GL weight, cubic basis at the node (4 values),
    /// and the two nontrivial weight polynomials at the node.
    nodes: Vec<NodeData<T>>,
}

struct NodeData<T> {
    gl_weight: T,
    basis: [T; 4],
    w_third: T,
    w_two_thirds: T,
}

fn cubic_basis<T: Scalar>(s: T) -> [T; 4] {
    let one = T::one();
    let two = T::lit(2.0);
    let three = T::lit(3.0);
    let half = T::lit(0.5);
    let t3 = three * s;
    [
        -(t3 - one) * (t3 - two) * (s - one) * half,
        t3 * (t3 - two) * (t3 - three) * half,
        -t3 * (t3 - one) * (t3 - three) * half,
        s * (t3 - one) * (t3 - two) * half,
    ]
}

impl<'a, T: Scalar> Crk6Stepper<'a, T> {
    pub fn new(sys: &'a SemilinearSystem<T>, h: T, tol: T, max_iter: usize) -> Result<Self> {
        if !(tol > T::zero()) {
            return Err(Error::ParameterOutOfRange {
                name: "tol",
                value: tol.to_f64_lossy(),
                expected: "positive",
            });
        }
        let nodes = gauss_legendre_01(5)
            .unwrap()
            .iter()
            .map(|&(x, w)| {
                let s = T::lit(x);
                let c0 = T::lit(37.0 / 27.0);
                let c1 = T::lit(32.0 / 9.0);
                let c2 = T::lit(20.0 / 9.0);
                let d0 = T::lit(26.0 / 27.0);
                let d1 = T::lit(8.0 / 9.0);
                NodeData {
                    gl_weight: T::lit(w),
                    basis: cubic_basis(s),
                    w_third: c0 - c1 * s + c2 * s * s,
                    w_two_thirds: d0 + d1 * s - c2 * s * s,
                }
            })
            .collect();
        Ok(Crk6Stepper {
            sys,
            h,
            tol,
            max_iter,
            nodes,
        })
    }

    pub fn step(&self, y: &[T]) -> Result<IterativeStep<T>> {
        let dim = y.len();
        let mut stages = [y.to_vec(), y.to_vec(), y.to_vec()];
        let mut interp = vec![T::zero(); dim];
        let mut acc = [
            vec![T::zero(); dim],
            vec![T::zero(); dim],
            vec![T::zero(); dim],
        ];
        let mut prev_delta = T::infinity();
        let mut growth_streak = 0usize;
        for it in 1..=self.max_iter {
            for a in acc.iter_mut() {
                a.iter_mut().for_each(|v| *v = T::zero());
            }
            for node in &self.nodes {
                for (i, v) in interp.iter_mut().enumerate() {
                    *v = node.basis[0] * y[i]
                        + node.basis[1] * stages[0][i]
                        + node.basis[2] * stages[1][i]
                        + node.basis[3] * stages[2][i];
                }
                let g = self.sys.grad_hamiltonian(&interp);
                axpy(node.gl_weight * node.w_third, &g, &mut acc[0]);
                axpy(node.gl_weight * node.w_two_thirds, &g, &mut acc[1]);
                axpy(node.gl_weight, &g, &mut acc[2]);
            }
            let mut delta = T::zero();
            for (stage, a) in stages.iter_mut().zip(&acc) {
                let mut fresh = y.to_vec();
                let forced = self.sys.j().mat_vec(a);
                axpy(self.h, &forced, &mut fresh);
                if !vec_is_finite(&fresh) {
                    return Err(Error::Divergence {
                        iterations: it,
                        residual: f64::INFINITY,
                    });
                }
                let d = fresh
                    .iter()
                    .zip(stage.iter())
                    .map(|(&p, &q)| (p - q).abs())
                    .fold(T::zero(), T::max);
                delta = delta.max(d);
                *stage = fresh;
            }
            if delta <= self.tol {
                return Ok(IterativeStep {
                    state: stages[2].clone(),
                    iterations: it,
                });
            }
            if delta > prev_delta {
                growth_streak += 1;
                if growth_streak >= 5 {
                    return Err(Error::Divergence {
                        iterations: it,
                        residual: delta.to_f64_lossy(),
                    });
                }
            } else {
                growth_streak = 0;
            }
            prev_delta = delta;
        }
        Err(Error::NonConvergence {
            iterations: self.max_iter,
            residual: prev_delta.to_f64_lossy(),
        })
    }
}

/// One CRK6 step from `y`.
pub fn crk6_step<T: Scalar>(
    sys: &SemilinearSystem<T>,
    y: &[T],
    h: T,
    tol: T,
    max_iter: usize,
) -> Result<Vec<T>> {
    Crk6Stepper::new(sys, h, tol, max_iter)?
        .step(y)
        .map(|s| s.state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrators::StructureClass;
    use crate::linalg::{vec_sub, SquareMatrix};

    fn rotation_system() -> SemilinearSystem<f64> {
        let j = SquareMatrix::new(2, vec![0.0, -1.0, 1.0, 0.0]).unwrap();
        let m = SquareMatrix::identity(2);
        SemilinearSystem::new(
            j,
            m,
            StructureClass::SkewSymmetric,
            Box::new(|_| 0.0),
            Box::new(|y: &[f64]| vec![0.0; y.len()]),
        )
        .unwrap()
    }

    #[test]
    fn fixed_point_of_zero_field() {
        let j = SquareMatrix::<f64>::zeros(2);
        let m = SquareMatrix::zeros(2);
        let sys = SemilinearSystem::new(
            j,
            m,
            StructureClass::SkewSymmetric,
            Box::new(|_| 0.0),
            Box::new(|y: &[f64]| vec![0.0; y.len()]),
        )
        .unwrap();
        let y = crk6_step(&sys, &[1.0, -2.0], 0.5, 1e-14, 10).unwrap();
        assert_eq!(y, vec![1.0, -2.0]);
    }

    #[test]
    fn sixth_order_on_linear_flow() {
        let sys = rotation_system();
        let y0 = [1.0, 0.0];
        let mut errs = Vec::new();
        for &h in &[0.4, 0.2] {
            let y = crk6_step(&sys, &y0, h, 1e-15, 200).unwrap();
            let exact = [h.cos(), h.sin()];
            errs.push(
                vec_sub(&y, &exact)
                    .iter()
                    .map(|v| v.abs())
                    .fold(0.0f64, f64::max),
            );
        }
        // one-step error is O(h^7): halving h divides the error by ~128
        let ratio = errs[0] / errs[1];
        assert!(ratio > 90.0, "ratio {ratio}, errs {errs:?}");
    }
}
