//! Exponential averaged-vector-field scheme (fully implicit reference).
//!
//! One step solves
//!
//!   y_{n+1} = exp(hJM) y_n + h phi(hJM) J int_0^1 gradU((1-tau) y_n + tau y_{n+1}) dtau
//!
//! by plain fixed-point iteration; the average is evaluated with a
//! Gauss-Legendre rule chosen exact for the potential's polynomial degree.

use crate::error::{Error, Result};
use crate::linalg::{axpy, vec_is_finite, SquareMatrix};
use crate::matfun::MatrixFunctionPair;
use crate::scalar::Scalar;

use super::quad::gauss_legendre_01;
use super::{IterativeStep, SemilinearSystem};

pub struct EavfStepper<'a, T: Scalar> {
    sys: &'a SemilinearSystem<T>,
    h: T,
    expv: SquareMatrix<T>,
    phiv_j: SquareMatrix<T>,
    nodes: Vec<(T, T)>,
    tol: T,
    max_iter: usize,
    // iteration workspaces
    fixed: Vec<T>,
    arg: Vec<T>,
    avg: Vec<T>,
    forced: Vec<T>,
}

impl<'a, T: Scalar> EavfStepper<'a, T> {
    /// `pair` must be the cached matrix functions at scale h.
    pub fn new(
        sys: &'a SemilinearSystem<T>,
        h: T,
        pair: &MatrixFunctionPair<T>,
        gl_points: usize,
        tol: T,
        max_iter: usize,
    ) -> Result<Self> {
        if pair.expv.dim() != sys.dim() {
            return Err(Error::ShapeMismatch {
                context: "EavfStepper cache dim",
                expected: sys.dim(),
                got: pair.expv.dim(),
            });
        }
        if (pair.scale - h).abs() > T::lit(1e-12) * (T::one() + h.abs()) {
            return Err(Error::ParameterOutOfRange {
                name: "cache scale",
                value: pair.scale.to_f64_lossy(),
                expected: "h",
            });
        }
        if !(tol > T::zero()) {
            return Err(Error::ParameterOutOfRange {
                name: "tol",
                value: tol.to_f64_lossy(),
                expected: "positive",
            });
        }
        let rule = gauss_legendre_01(gl_points).ok_or(Error::ParameterOutOfRange {
            name: "gl_points",
            value: gl_points as f64,
            expected: "1..=5",
        })?;
        let nodes = rule
            .iter()
            .map(|&(x, w)| (T::lit(x), T::lit(w)))
            .collect();
        let mut phiv_j = pair.phiv.mul(sys.j());
        phiv_j.flush_negligible();
        let dim = sys.dim();
        Ok(EavfStepper {
            sys,
            h,
            expv: pair.expv.clone(),
            phiv_j,
            nodes,
            tol,
            max_iter,
            fixed: vec![T::zero(); dim],
            arg: vec![T::zero(); dim],
            avg: vec![T::zero(); dim],
            forced: vec![T::zero(); dim],
        })
    }

    /// Average of gradU along the segment y -> z into the avg workspace.
    fn averaged_gradient(&mut self, y: &[T], z: &[T]) {
        self.avg.iter_mut().for_each(|a| *a = T::zero());
        for &(tau, weight) in &self.nodes {
            for ((slot, &a), &b) in self.arg.iter_mut().zip(y).zip(z) {
                *slot = (T::one() - tau) * a + tau * b;
            }
            let g = self.sys.grad_potential(&self.arg);
            axpy(weight, &g, &mut self.avg);
        }
    }

    pub fn step(&mut self, y: &[T]) -> Result<IterativeStep<T>> {
        self.expv.mat_vec_into(y, &mut self.fixed);
        let mut z = y.to_vec();
        let mut prev_delta = T::infinity();
        let mut growth_streak = 0usize;
        for it in 1..=self.max_iter {
            self.averaged_gradient(y, &z);
            self.phiv_j.mat_vec_into(&self.avg, &mut self.forced);
            // z_new overwrites z while measuring the update size
            let mut delta = T::zero();
            let mut finite = true;
            for ((zi, &f), &w) in z.iter_mut().zip(&self.fixed).zip(&self.forced) {
                let fresh = self.h.mul_add(w, f);
                delta = delta.max((fresh - *zi).abs());
                finite &= fresh.is_finite();
                *zi = fresh;
            }
            if !finite {
                return Err(Error::Divergence {
                    iterations: it,
                    residual: f64::INFINITY,
                });
            }
            if delta <= self.tol {
                return Ok(IterativeStep {
                    state: z,
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

/// One EAVF step from `y`.
pub fn eavf_step<T: Scalar>(
    sys: &SemilinearSystem<T>,
    y: &[T],
    h: T,
    pair: &MatrixFunctionPair<T>,
    gl_points: usize,
    tol: T,
    max_iter: usize,
) -> Result<Vec<T>> {
    let mut stepper = EavfStepper::new(sys, h, pair, gl_points, tol, max_iter)?;
    stepper.step(y).map(|s| s.state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrators::StructureClass;
    use crate::linalg::vec_inf_norm;
    use crate::matfun::exp_and_phi;

    #[test]
    fn exact_for_zero_gradient() {
        let j = SquareMatrix::new(2, vec![0.0, -1.0, 1.0, 0.0]).unwrap();
        let m = SquareMatrix::identity(2);
        let sys = SemilinearSystem::new(
            j,
            m,
            StructureClass::SkewSymmetric,
            Box::new(|_| 0.0),
            Box::new(|y: &[f64]| vec![0.0; y.len()]),
        )
        .unwrap();
        let h = 0.2;
        let pair = exp_and_phi(sys.j(), sys.m(), h).unwrap();
        let y = eavf_step(&sys, &[1.0, 0.0], h, &pair, 2, 1e-14, 100).unwrap();
        assert!((y[0] - h.cos()).abs() < 1e-13);
        assert!((y[1] - h.sin()).abs() < 1e-13);
    }

    #[test]
    fn tighter_tolerance_refines_fixed_point() {
        // cubic potential on a rotation: compare tol 1e-10 vs 1e-14 roots
        let j = SquareMatrix::new(2, vec![0.0, -1.0, 1.0, 0.0]).unwrap();
        let m = SquareMatrix::identity(2);
        let sys = SemilinearSystem::new(
            j,
            m,
            StructureClass::SkewSymmetric,
            Box::new(|y: &[f64]| y[0].powi(3) / 3.0),
            Box::new(|y: &[f64]| vec![y[0] * y[0], 0.0]),
        )
        .unwrap();
        let h = 0.1;
        let pair = exp_and_phi(sys.j(), sys.m(), h).unwrap();
        let loose = eavf_step(&sys, &[0.7, 0.2], h, &pair, 2, 1e-10, 200).unwrap();
        let tight = eavf_step(&sys, &[0.7, 0.2], h, &pair, 2, 1e-15, 200).unwrap();
        let d = vec_inf_norm(&crate::linalg::vec_sub(&loose, &tight));
        assert!(d < 1e-9, "fixed points disagree by {d}");
    }

    #[test]
    fn non_convergence_reported() {
        let j = SquareMatrix::new(1, vec![-1.0]).unwrap();
        let m = SquareMatrix::identity(1);
        let sys = SemilinearSystem::new(
            j,
            m,
            StructureClass::NegativeSemidefinite,
            Box::new(|y: &[f64]| y[0].powi(4) / 4.0),
            Box::new(|y: &[f64]| vec![y[0].powi(3)]),
        )
        .unwrap();
        let h = 0.5;
        let pair = exp_and_phi(sys.j(), sys.m(), h).unwrap();
        // max_iter 1 cannot reach 1e-14
        let r = eavf_step(&sys, &[2.0], h, &pair, 2, 1e-14, 1);
        assert!(matches!(r, Err(Error::NonConvergence { .. })));
    }
}
