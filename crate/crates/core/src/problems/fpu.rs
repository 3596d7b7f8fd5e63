//! Damped alpha-FPU lattice, semi-discretized in space.
//!
//! The PDE u_tt = beta u_txx + u_xx (1 + eps u_x) - gamma u_t - m^2 u on
//! [0, L] with homogeneous Dirichlet conditions is discretized with central
//! second differences and forward first differences on N cells. Interior
//! unknowns y = [u_1..u_{N-1}, v_1..v_{N-1}] satisfy y' = Q(My + gradU) with
//!
//!   Q = [[0, I], [-I, beta D - gamma I]],
//!   M = [[m^2 I - D, 0], [0, I]],
//!   U(y) = sum_j (eps/6) w_j^3,   w_j = (u_{j+1} - u_j) / dx.
//!
//! The window-2 polarization replaces w^3 by its cubic polarization per
//! cell; its discrete gradient is affine in the newest u and vanishes on the
//! v block, which the step solver exploits.

use crate::error::{Error, Result};
use crate::integrators::{SemilinearSystem, StructureClass};
use crate::linalg::SquareMatrix;
use crate::polarization::PolarizedPotential;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy)]
pub struct FpuParams<T> {
    /// Cell count; interior unknowns are nodes 1..N-1.
    pub n: usize,
    /// Domain length; dx = l / n.
    pub l: T,
    /// Internal damping coefficient (>= 0).
    pub beta: T,
    /// External damping coefficient (>= 0).
    pub gamma: T,
    /// Mass parameter.
    pub m: T,
    /// Nonlinearity coefficient (> 0).
    pub eps: T,
}

impl<T: Scalar> FpuParams<T> {
    /// Paper setup: N = L = 128, m = 0, eps = 3/4.
    pub fn paper(beta: T, gamma: T) -> Self {
        FpuParams {
            n: 128,
            l: T::lit(128.0),
            beta,
            gamma,
            m: T::zero(),
            eps: T::lit(0.75),
        }
    }
}

/// Forward differences w_j = (u_{j+1} - u_j)/dx, j = 0..N-1, of the interior
/// values with zero boundaries.
fn forward_diffs<T: Scalar>(u: &[T], dx: T) -> Vec<T> {
    let nw = u.len() + 1;
    let mut w = Vec::with_capacity(nw);
    w.push(u[0] / dx);
    for j in 1..u.len() {
        w.push((u[j] - u[j - 1]) / dx);
    }
    w.push(-u[u.len() - 1] / dx);
    w
}

pub fn fpu_system<T: Scalar>(
    params: FpuParams<T>,
) -> Result<(SemilinearSystem<T>, PolarizedPotential<T>)> {
    let FpuParams {
        n,
        l,
        beta,
        gamma,
        m,
        eps,
    } = params;
    if n < 3 {
        return Err(Error::ParameterOutOfRange {
            name: "n",
            value: n as f64,
            expected: ">= 3",
        });
    }
    for (name, v) in [("beta", beta), ("gamma", gamma)] {
        if !(v >= T::zero()) {
            return Err(Error::ParameterOutOfRange {
                name,
                value: v.to_f64_lossy(),
                expected: ">= 0",
            });
        }
    }
    if !(eps > T::zero()) || !(l > T::zero()) {
        return Err(Error::ParameterOutOfRange {
            name: "eps, l",
            value: eps.to_f64_lossy(),
            expected: "> 0",
        });
    }
    let dx = l / T::from_usize_exact(n);
    let inner = n - 1;
    let dim = 2 * inner;
    let inv_dx2 = T::one() / (dx * dx);

    // D: central second difference with Dirichlet closure.
    let d = SquareMatrix::from_fn(inner, |i, j| {
        if i == j {
            -T::lit(2.0) * inv_dx2
        } else if i.abs_diff(j) == 1 {
            inv_dx2
        } else {
            T::zero()
        }
    });

    let q = SquareMatrix::from_fn(dim, |i, j| {
        let (bi, bj) = (i / inner, j / inner);
        let (ri, rj) = (i % inner, j % inner);
        match (bi, bj) {
            (0, 1) => {
                if ri == rj {
                    T::one()
                } else {
                    T::zero()
                }
            }
            (1, 0) => {
                if ri == rj {
                    -T::one()
                } else {
                    T::zero()
                }
            }
            (1, 1) => {
                let damp = if ri == rj { -gamma } else { T::zero() };
                beta * d.get(ri, rj) + damp
            }
            _ => T::zero(),
        }
    });

    let m_mat = SquareMatrix::from_fn(dim, |i, j| {
        let (bi, bj) = (i / inner, j / inner);
        let (ri, rj) = (i % inner, j % inner);
        match (bi, bj) {
            (0, 0) => {
                let mass = if ri == rj { m * m } else { T::zero() };
                mass - d.get(ri, rj)
            }
            (1, 1) => {
                if ri == rj {
                    T::one()
                } else {
                    T::zero()
                }
            }
            _ => T::zero(),
        }
    });

    let j_class = if beta == T::zero() && gamma == T::zero() {
        StructureClass::SkewSymmetric
    } else {
        StructureClass::NegativeSemidefinite
    };

    let sixth = T::lit(1.0 / 6.0);
    let half = T::lit(0.5);

    let potential = {
        move |y: &[T]| -> T {
            let w = forward_diffs(&y[..inner], dx);
            w.iter().map(|&wj| eps * sixth * wj * wj * wj).sum()
        }
    };
    let grad = {
        move |y: &[T]| -> Vec<T> {
            let w = forward_diffs(&y[..inner], dx);
            let mut g = vec![T::zero(); 2 * inner];
            for i in 0..inner {
                g[i] = eps * half / dx * (w[i] * w[i] - w[i + 1] * w[i + 1]);
            }
            g
        }
    };
    let sys = SemilinearSystem::new(q, m_mat, j_class, Box::new(potential), Box::new(grad))?;

    // Polarization: per-cell cubic polarization of w^3.
    let energy = {
        move |states: &[Vec<T>]| -> T {
            let w0 = forward_diffs(&states[0][..inner], dx);
            let w1 = forward_diffs(&states[1][..inner], dx);
            w0.iter()
                .zip(&w1)
                .map(|(&a, &b)| eps * sixth * a * half * (a + b) * b)
                .sum()
        }
    };
    let gradient = {
        move |args: &[Vec<T>]| -> Vec<T> {
            let w0 = forward_diffs(&args[0][..inner], dx);
            let w1 = forward_diffs(&args[1][..inner], dx);
            let w2 = forward_diffs(&args[2][..inner], dx);
            let mut g = vec![T::zero(); 2 * inner];
            let coeff = eps * sixth / dx;
            for i in 0..inner {
                let left = w1[i] * (w0[i] + w1[i] + w2[i]);
                let right = w1[i + 1] * (w0[i + 1] + w1[i + 1] + w2[i + 1]);
                g[i] = coeff * (left - right);
            }
            g
        }
    };
    let affine = {
        move |states: &[Vec<T>]| -> (SquareMatrix<T>, Vec<T>) {
            let w0 = forward_diffs(&states[0][..inner], dx);
            let w1 = forward_diffs(&states[1][..inner], dx);
            let coeff = eps * sixth / dx;
            let coeff2 = coeff / dx;
            let mut g_mat = SquareMatrix::zeros(2 * inner);
            let mut g_vec = vec![T::zero(); 2 * inner];
            for i in 0..inner {
                g_mat.set(i, i, coeff2 * (w1[i] + w1[i + 1]));
                if i >= 1 {
                    g_mat.set(i, i - 1, -coeff2 * w1[i]);
                }
                if i + 1 < inner {
                    g_mat.set(i, i + 1, -coeff2 * w1[i + 1]);
                }
                let left = w1[i] * (w0[i] + w1[i]);
                let right = w1[i + 1] * (w0[i + 1] + w1[i + 1]);
                g_vec[i] = coeff * (left - right);
            }
            (g_mat, g_vec)
        }
    };
    let pot = PolarizedPotential::from_parts(
        2,
        dim,
        true,
        Some((0..inner).collect()),
        Box::new(energy),
        Box::new(gradient),
        Some(Box::new(affine)),
    );
    Ok((sys, pot))
}

/// Two-kink initial profile: u_j(0) = q_j(0) and v_j(0) = dq_j/dt(0) for the
/// printed log-profile
///
///   q_j(t) = 5 ln (1+e^{2(alpha(j-97)+t sinh alpha)})/(1+e^{2(alpha(j-96)+t sinh alpha)})
///          + 5 ln (1+e^{2(alpha(j-32)+t sinh alpha)})/(1+e^{2(alpha(j-33)+t sinh alpha)}),
///
/// differentiated analytically in t.
pub fn fpu_initial<T: Scalar>(alpha: T, n: usize) -> Vec<T> {
    let inner = n - 1;
    let five = T::lit(5.0);
    let two = T::lit(2.0);
    // stable ln(1 + e^{2x})
    let softplus2 = |x: T| -> T {
        if x > T::zero() {
            two * x + (-two * x).exp().ln_1p()
        } else {
            (two * x).exp().ln_1p()
        }
    };
    // logistic sigma(2x)
    let sigma2 = |x: T| -> T { T::one() / (T::one() + (-two * x).exp()) };
    let offsets: [(f64, T); 4] = [
        (-97.0, five),
        (-96.0, -five),
        (-32.0, five),
        (-33.0, -five),
    ];
    let sinh_a = alpha.sinh();
    let mut state = vec![T::zero(); 2 * inner];
    for j in 1..n {
        let jt = T::from_usize_exact(j);
        let mut q = T::zero();
        let mut qdot = T::zero();
        for &(off, sign) in &offsets {
            let arg = alpha * (jt + T::lit(off));
            q = q + sign * softplus2(arg);
            qdot = qdot + sign * two * sinh_a * sigma2(arg);
        }
        state[j - 1] = q;
        state[inner + j - 1] = qdot;
    }
    state
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polarization::validate_polarization;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn small_params(beta: f64, gamma: f64) -> FpuParams<f64> {
        FpuParams {
            n: 8,
            l: 8.0,
            beta,
            gamma,
            m: 0.0,
            eps: 0.75,
        }
    }

    #[test]
    fn undamped_q_is_skew() {
        let (sys, _) = fpu_system(small_params(0.0, 0.0)).unwrap();
        assert_eq!(sys.j_class(), StructureClass::SkewSymmetric);
        let q = sys.j();
        assert!(q.add(&q.transpose()).inf_norm() < 1e-15);
    }

    #[test]
    fn damped_q_is_negative_semidefinite() {
        let (sys, _) = fpu_system(small_params(2.0, 0.005)).unwrap();
        assert_eq!(sys.j_class(), StructureClass::NegativeSemidefinite);
    }

    #[test]
    fn too_few_nodes_rejected() {
        let mut p = small_params(0.0, 0.0);
        p.n = 2;
        assert!(matches!(
            fpu_system(p),
            Err(Error::ParameterOutOfRange { .. })
        ));
    }

    #[test]
    fn linear_profile_gradient_telescopes() {
        // u_j = j gives w constant away from the right Dirichlet boundary,
        // so (eps/2 dx)(w_{j-1}^2 - w_j^2) telescopes to zero at every node
        // except the one touching that boundary.
        let (sys, _) = fpu_system(small_params(0.0, 0.0)).unwrap();
        let inner = 7;
        let mut y = vec![0.0f64; 2 * inner];
        for i in 0..inner {
            y[i] = (i + 1) as f64;
        }
        let g = sys.grad_potential(&y);
        for (i, gi) in g.iter().enumerate().take(inner - 1) {
            assert!(gi.abs() < 1e-14, "entry {i}: {gi}");
        }
        assert!(g[inner - 1].abs() > 1.0);
        // v block untouched
        for i in inner..2 * inner {
            assert_eq!(g[i], 0.0);
        }
    }

    #[test]
    fn polarization_validates() {
        let (sys, pot) = fpu_system(small_params(0.0, 0.0)).unwrap();
        let u = |x: &[f64]| sys.potential(x);
        let gu = |x: &[f64]| sys.grad_potential(x);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let report = validate_polarization(&pot, &u, &gu, 500, &mut rng);
        assert!(report.passed(), "{:?}", report.checks);
        for c in &report.checks {
            assert!(c.max_residual <= 1e-11, "{:?}", c);
        }
    }

    #[test]
    fn initial_state_zero_for_zero_alpha() {
        let y = fpu_initial(0.0f64, 16);
        assert!(y.iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn initial_velocity_matches_finite_difference() {
        // centered difference of the printed q_j(t) at t = 0
        let alpha = 0.1f64;
        let n = 128;
        let y = fpu_initial(alpha, n);
        let inner = n - 1;
        let delta = 1e-6;
        let q_at = |j: usize, t: f64| -> f64 {
            let softplus2 = |x: f64| {
                if x > 0.0 {
                    2.0 * x + (-2.0 * x).exp().ln_1p()
                } else {
                    (2.0 * x).exp().ln_1p()
                }
            };
            let sh = alpha.sinh();
            5.0 * (softplus2(alpha * (j as f64 - 97.0) + t * sh)
                - softplus2(alpha * (j as f64 - 96.0) + t * sh)
                + softplus2(alpha * (j as f64 - 32.0) + t * sh)
                - softplus2(alpha * (j as f64 - 33.0) + t * sh))
        };
        for j in [1usize, 32, 64, 96, 127] {
            let fd = (q_at(j, delta) - q_at(j, -delta)) / (2.0 * delta);
            let v = y[inner + j - 1];
            assert!((v - fd).abs() < 1e-8, "node {j}: {v} vs {fd}");
            let q0 = q_at(j, 0.0);
            assert!((y[j - 1] - q0).abs() < 1e-12);
        }
    }
}
