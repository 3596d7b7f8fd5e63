//! Averaged system in wind-induced oscillation.
//!
//! With c = cos(theta), s = sin(theta), zeta = r c, lambda = r s:
//!
//!   x1' = -zeta x1 - lambda x2 + x1 x2
//!   x2' = lambda x1 - zeta x2 + (x1^2 - x2^2) / 2
//!
//! in the form y' = J(My + gradU) with
//!
//!   J = [[-c, -s], [s, -c]],   M = r I,
//!   U = -(s/2)(x1 x2^2 - x1^3/3) + (c/2)(x2^3/3 - x1^2 x2).
//!
//! The window-2 polarization of U carries a free parameter `a` in [0, 1];
//! a = 1/2 is the default (the superconvergent choice).

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::integrators::{SemilinearSystem, StructureClass};
use crate::linalg::SquareMatrix;
use crate::polarization::{multipoly::MultiPoly, PolarizedPotential};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy)]
pub struct WindOscillatorParams<T> {
    /// Magnitude r >= 0; zeta = r cos(theta), lambda = r sin(theta).
    pub r: T,
    /// Angle in [0, pi/2]; exactly pi/2 gives the conservative system.
    pub theta: T,
    /// Polarization parameter in [0, 1].
    pub a: T,
}

impl<T: Scalar> WindOscillatorParams<T> {
    pub fn conservative() -> Self {
        WindOscillatorParams {
            r: T::lit(20.0),
            theta: T::lit(FRAC_PI_2),
            a: T::lit(0.5),
        }
    }

    pub fn dissipative() -> Self {
        WindOscillatorParams {
            theta: T::lit(FRAC_PI_2) - T::lit(1e-4),
            ..Self::conservative()
        }
    }
}

/// exp(scale * J * M) in closed form: a damped rotation.
#[derive(Debug, Clone, Copy)]
pub struct ClosedFormExp<T> {
    r: T,
    theta: T,
}

impl<T: Scalar> ClosedFormExp<T> {
    pub fn eval(&self, scale: T) -> SquareMatrix<T> {
        let c = self.theta.cos();
        let s = self.theta.sin();
        let decay = (-scale * c * self.r).exp();
        let angle = scale * s * self.r;
        let (cos_a, sin_a) = (angle.cos(), angle.sin());
        SquareMatrix::from_fn(2, |i, j| match (i, j) {
            (0, 0) | (1, 1) => decay * cos_a,
            (0, 1) => -decay * sin_a,
            _ => decay * sin_a,
        })
    }
}

/// Paper initial state x(0) = (0, 1).
pub fn wind_initial<T: Scalar>() -> Vec<T> {
    vec![T::zero(), T::one()]
}

/// Polarization energy of U over two states, as a polynomial in
/// (x1^n, x2^n, x1^{n+1}, x2^{n+1}).
fn wind_energy_poly<T: Scalar>(theta: T, a: T) -> MultiPoly<T> {
    let s = theta.sin();
    let c = theta.cos();
    let one = T::one();
    let quarter = T::lit(0.25);
    let twelfth = T::lit(1.0 / 12.0);
    // variable layout: 0 = x1^n, 1 = x2^n, 2 = x1^{n+1}, 3 = x2^{n+1}
    let term = |exps: &[(usize, u8)], coeff: T| MultiPoly::monomial(4, exps, coeff);
    let mut p = MultiPoly::zero(4);
    // -(s/2) [ a (x1^n + x1^{n+1})/2 x2^n x2^{n+1} ]
    p = p.add(&term(&[(0, 1), (1, 1), (3, 1)], -s * a * quarter));
    p = p.add(&term(&[(2, 1), (1, 1), (3, 1)], -s * a * quarter));
    // -(s/2) [ (1-a) (x1^n (x2^{n+1})^2 + x1^{n+1} (x2^n)^2)/2 ]
    p = p.add(&term(&[(0, 1), (3, 2)], -s * (one - a) * quarter));
    p = p.add(&term(&[(2, 1), (1, 2)], -s * (one - a) * quarter));
    // +(s/2) (1/3) x1^n (x1^n + x1^{n+1})/2 x1^{n+1}
    p = p.add(&term(&[(0, 2), (2, 1)], s * twelfth));
    p = p.add(&term(&[(0, 1), (2, 2)], s * twelfth));
    // +(c/2) (1/3) x2^n (x2^n + x2^{n+1})/2 x2^{n+1}
    p = p.add(&term(&[(1, 2), (3, 1)], c * twelfth));
    p = p.add(&term(&[(1, 1), (3, 2)], c * twelfth));
    // -(c/2) a x1^n x1^{n+1} (x2^n + x2^{n+1})/2
    p = p.add(&term(&[(0, 1), (2, 1), (1, 1)], -c * a * quarter));
    p = p.add(&term(&[(0, 1), (2, 1), (3, 1)], -c * a * quarter));
    // -(c/2) (1-a) (x2^n (x1^{n+1})^2 + x2^{n+1} (x1^n)^2)/2
    p = p.add(&term(&[(1, 1), (2, 2)], -c * (one - a) * quarter));
    p = p.add(&term(&[(3, 1), (0, 2)], -c * (one - a) * quarter));
    p
}

/// Build the wind oscillator: system, polarization and the closed-form
/// matrix exponential.
pub fn wind_oscillator<T: Scalar>(
    params: WindOscillatorParams<T>,
) -> Result<(SemilinearSystem<T>, PolarizedPotential<T>, ClosedFormExp<T>)> {
    let WindOscillatorParams { r, theta, a } = params;
    if !(r >= T::zero()) || !r.is_finite() {
        return Err(Error::ParameterOutOfRange {
            name: "r",
            value: r.to_f64_lossy(),
            expected: ">= 0",
        });
    }
    if !(theta >= T::zero() && theta <= T::lit(FRAC_PI_2)) {
        return Err(Error::ParameterOutOfRange {
            name: "theta",
            value: theta.to_f64_lossy(),
            expected: "[0, pi/2]",
        });
    }
    if !(a >= T::zero() && a <= T::one()) {
        return Err(Error::ParameterOutOfRange {
            name: "a",
            value: a.to_f64_lossy(),
            expected: "[0, 1]",
        });
    }
    let c = theta.cos();
    let s = theta.sin();
    let j = SquareMatrix::new(2, vec![-c, -s, s, -c])?;
    let m = SquareMatrix::identity(2).scale(r);
    let j_class = if theta == T::lit(FRAC_PI_2) {
        StructureClass::SkewSymmetric
    } else {
        StructureClass::NegativeSemidefinite
    };
    let half = T::lit(0.5);
    let third = T::lit(1.0 / 3.0);
    let potential = move |y: &[T]| -> T {
        let (x1, x2) = (y[0], y[1]);
        -half * s * (x1 * x2 * x2 - third * x1 * x1 * x1)
            + half * c * (third * x2 * x2 * x2 - x1 * x1 * x2)
    };
    let grad = move |y: &[T]| -> Vec<T> {
        let (x1, x2) = (y[0], y[1]);
        vec![
            half * s * (x1 * x1 - x2 * x2) - c * x1 * x2,
            -s * x1 * x2 + half * c * (x2 * x2 - x1 * x1),
        ]
    };
    let sys = SemilinearSystem::new(j, m, j_class, Box::new(potential), Box::new(grad))?;
    let pot = PolarizedPotential::from_energy_poly(2, 2, wind_energy_poly(theta, a))?;
    Ok((sys, pot, ClosedFormExp { r, theta }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matfun::expm;
    use crate::polarization::validate_polarization;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn conservative_j_is_exactly_skew() {
        let (sys, _, _) = wind_oscillator(WindOscillatorParams::<f64>::conservative()).unwrap();
        let j = sys.j();
        assert!(j.add(&j.transpose()).inf_norm() < 1e-15);
        assert_eq!(sys.j_class(), StructureClass::SkewSymmetric);
    }

    #[test]
    fn energy_at_paper_initial_state() {
        let (sys, _, _) = wind_oscillator(WindOscillatorParams::<f64>::conservative()).unwrap();
        // H(0, 1) = r/2 = 10: the potential vanishes at x1 = 0, theta = pi/2
        let h = sys.hamiltonian(&wind_initial::<f64>());
        assert!((h - 10.0).abs() < 1e-14);
    }

    #[test]
    fn gradient_reproduces_vector_field() {
        // J(My + gradU) must equal the printed right-hand side
        let params = WindOscillatorParams {
            r: 20.0f64,
            theta: 0.9,
            a: 0.5,
        };
        let (sys, _, _) = wind_oscillator(params).unwrap();
        let (zeta, lambda) = (20.0 * 0.9f64.cos(), 20.0 * 0.9f64.sin());
        for y in [[0.3, -1.2], [1.5, 0.4]] {
            let gh = sys.grad_hamiltonian(&y);
            let f = sys.j().mat_vec(&gh);
            let expected = [
                -zeta * y[0] - lambda * y[1] + y[0] * y[1],
                lambda * y[0] - zeta * y[1] + 0.5 * (y[0] * y[0] - y[1] * y[1]),
            ];
            assert!((f[0] - expected[0]).abs() < 1e-12);
            assert!((f[1] - expected[1]).abs() < 1e-12);
        }
    }

    #[test]
    fn closed_form_exp_matches_expm() {
        for &theta in &[FRAC_PI_2, FRAC_PI_2 - 1e-4, std::f64::consts::FRAC_PI_4] {
            for &r in &[1.0, 20.0] {
                for &h in &[0.1, 1.0 / 320.0] {
                    let params = WindOscillatorParams { r, theta, a: 0.5 };
                    let (sys, _, cf) = wind_oscillator(params).unwrap();
                    let scale = 2.0 * h;
                    let direct = expm(&sys.j().mul(sys.m()).scale(scale)).unwrap();
                    assert!(
                        direct.max_abs_diff(&cf.eval(scale)) < 1e-12,
                        "theta={theta} r={r} h={h}"
                    );
                }
            }
        }
    }

    #[test]
    fn polarization_validates_for_all_a() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for &a in &[0.0, 0.25, 0.5, 1.0] {
            let params = WindOscillatorParams {
                r: 20.0f64,
                theta: FRAC_PI_2,
                a,
            };
            let (sys, pot, _) = wind_oscillator(params).unwrap();
            let u = |x: &[f64]| sys.potential(x);
            let gu = |x: &[f64]| sys.grad_potential(x);
            let report = validate_polarization(&pot, &u, &gu, 500, &mut rng);
            assert!(report.passed(), "a={a}: {:?}", report.checks);
        }
    }

    #[test]
    fn invalid_parameters_rejected() {
        let bad = WindOscillatorParams {
            r: -1.0f64,
            theta: 0.3,
            a: 0.5,
        };
        assert!(matches!(
            wind_oscillator(bad),
            Err(Error::ParameterOutOfRange { .. })
        ));
        let bad = WindOscillatorParams {
            r: 1.0f64,
            theta: 2.0,
            a: 0.5,
        };
        assert!(matches!(
            wind_oscillator(bad),
            Err(Error::ParameterOutOfRange { .. })
        ));
    }
}
