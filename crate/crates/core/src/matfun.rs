//! Dense matrix exponential and phi-function kernel.
//!
//! exp(A) uses scaling and squaring with a degree-13 Pade core; the scaled
//! norm is driven below 0.5 before the rational approximation is applied.
//! phi(A) = (exp(A) - I) A^{-1} is never formed through an inverse: at the
//! scaled level it is summed as a truncated Taylor series (valid for singular
//! A) and then doubled jointly with the exponential via
//!
//!   exp(2X) = exp(X)^2,      phi(2X) = phi(X) (exp(X) + I) / 2.

use crate::error::{Error, Result};
use crate::linalg::{LuFactors, SquareMatrix};
use crate::scalar::Scalar;

/// Cached pair (exp(V), phi(V)) for V = scale * J * M.
#[derive(Debug, Clone)]
pub struct MatrixFunctionPair<T> {
    pub expv: SquareMatrix<T>,
    pub phiv: SquareMatrix<T>,
    /// The factor `ph` that was applied to J*M to form V.
    pub scale: T,
}

/// Largest scaled infinity norm fed to the Pade core / Taylor series.
const SCALED_NORM_LIMIT: f64 = 0.5;

/// Degree-13 Pade numerator/denominator coefficients for exp.
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

fn squaring_count<T: Scalar>(norm: T) -> u32 {
    let limit = T::lit(SCALED_NORM_LIMIT);
    if norm <= limit {
        0
    } else {
        (norm / limit).log2().ceil().to_f64_lossy() as u32
    }
}

fn pade13_exp<T: Scalar>(a: &SquareMatrix<T>) -> Result<SquareMatrix<T>> {
    let n = a.dim();
    let eye = SquareMatrix::identity(n);
    let a2 = a.mul(a);
    let a4 = a2.mul(&a2);
    let a6 = a2.mul(&a4);
    let b = |k: usize| T::lit(PADE13[k]);

    let w1 = a6
        .scale(b(13))
        .add(&a4.scale(b(11)))
        .add(&a2.scale(b(9)));
    let w2 = w1
        .mul(&a6)
        .add(&a6.scale(b(7)))
        .add(&a4.scale(b(5)))
        .add(&a2.scale(b(3)))
        .add(&eye.scale(b(1)));
    let u = a.mul(&w2);

    let v1 = a6
        .scale(b(12))
        .add(&a4.scale(b(10)))
        .add(&a2.scale(b(8)));
    let v = v1
        .mul(&a6)
        .add(&a6.scale(b(6)))
        .add(&a4.scale(b(4)))
        .add(&a2.scale(b(2)))
        .add(&eye.scale(b(0)));

    let denom = v.sub(&u);
    let numer = v.add(&u);
    let lu = LuFactors::factor(&denom)?;
    Ok(lu.solve_matrix(&numer))
}

/// Truncated Taylor series of phi(A) = sum_{k>=0} A^k / (k+1)!.
///
/// Only called at scaled norm <= 0.5, where 16 terms leave a remainder far
/// below f64 round-off.
fn taylor_phi_small<T: Scalar>(a: &SquareMatrix<T>) -> SquareMatrix<T> {
    let n = a.dim();
    // Horner: phi = I/1! + A(I/2! + A(I/3! + ...))
    const TERMS: usize = 16;
    let mut acc = SquareMatrix::<T>::zeros(n);
    let mut factorial = 1.0f64;
    for k in 2..=TERMS + 1 {
        factorial *= k as f64;
    }
    // factorial == (TERMS+1)! ; walk back down
    let mut inv_fact = vec![0.0f64; TERMS + 2];
    let mut f = 1.0f64;
    for (k, slot) in inv_fact.iter_mut().enumerate() {
        if k > 0 {
            f *= k as f64;
        }
        *slot = 1.0 / f;
    }
    let _ = factorial;
    for k in (0..=TERMS).rev() {
        // acc = A*acc + I/(k+1)!
        let mut next = a.mul(&acc);
        let c = T::lit(inv_fact[k + 1]);
        for i in 0..n {
            next.set(i, i, next.get(i, i) + c);
        }
        acc = next;
    }
    acc
}

fn exp_phi_impl<T: Scalar>(a: &SquareMatrix<T>) -> Result<(SquareMatrix<T>, SquareMatrix<T>)> {
    if !a.is_finite() {
        return Err(Error::NonFiniteInput { context: "matfun" });
    }
    let n = a.dim();
    let norm = a.inf_norm();
    let s = squaring_count(norm);
    let scaled = a.scale(T::lit(0.5).powi(s as i32));
    let mut e = pade13_exp(&scaled)?;
    let mut phi = taylor_phi_small(&scaled);
    let eye = SquareMatrix::identity(n);
    let half = T::lit(0.5);
    for _ in 0..s {
        // phi(2X) = phi(X)(exp(X)+I)/2 before exp is squared
        phi = phi.mul(&e.add(&eye)).scale(half);
        e = e.mul(&e);
        if !e.is_finite() {
            return Err(Error::Overflow {
                norm: norm.to_f64_lossy(),
            });
        }
    }
    Ok((e, phi))
}

/// Matrix exponential exp(A).
pub fn expm<T: Scalar>(a: &SquareMatrix<T>) -> Result<SquareMatrix<T>> {
    if !a.is_finite() {
        return Err(Error::NonFiniteInput { context: "expm" });
    }
    let norm = a.inf_norm();
    let s = squaring_count(norm);
    let scaled = a.scale(T::lit(0.5).powi(s as i32));
    let mut e = pade13_exp(&scaled)?;
    for _ in 0..s {
        e = e.mul(&e);
        if !e.is_finite() {
            return Err(Error::Overflow {
                norm: norm.to_f64_lossy(),
            });
        }
    }
    Ok(e)
}

/// phi(A) with phi(z) = (e^z - 1)/z, well defined for singular and zero A.
pub fn phi1<T: Scalar>(a: &SquareMatrix<T>) -> Result<SquareMatrix<T>> {
    exp_phi_impl(a).map(|(_, phi)| phi)
}

/// Build the cached pair (exp(V), phi(V)) with V = scale * J * M.
///
/// `scale` is the full factor `ph`; negative values are accepted (the
/// symmetry diagnostics run the scheme with a negated step).
pub fn exp_and_phi<T: Scalar>(
    j: &SquareMatrix<T>,
    m: &SquareMatrix<T>,
    scale: T,
) -> Result<MatrixFunctionPair<T>> {
    if j.dim() != m.dim() {
        return Err(Error::ShapeMismatch {
            context: "exp_and_phi",
            expected: j.dim(),
            got: m.dim(),
        });
    }
    if !scale.is_finite() {
        return Err(Error::NonFiniteInput {
            context: "exp_and_phi scale",
        });
    }
    let v = j.mul(m).scale(scale);
    let (mut expv, mut phiv) = exp_phi_impl(&v)?;
    expv.flush_negligible();
    phiv.flush_negligible();
    Ok(MatrixFunctionPair { expv, phiv, scale })
}

impl<T: Scalar> MatrixFunctionPair<T> {
    /// Residual of the defining identity exp(V) = I + V phi(V), relative to
    /// 1 + |exp(V)|.
    pub fn identity_residual(&self, j: &SquareMatrix<T>, m: &SquareMatrix<T>) -> T {
        let v = j.mul(m).scale(self.scale);
        let lhs = self.expv.clone();
        let rhs = SquareMatrix::identity(v.dim()).add(&v.mul(&self.phiv));
        lhs.sub(&rhs).inf_norm() / (T::one() + lhs.inf_norm())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rotation_gen(theta: f64) -> SquareMatrix<f64> {
        SquareMatrix::new(2, vec![0.0, -theta, theta, 0.0]).unwrap()
    }

    #[test]
    fn expm_of_zero_is_identity() {
        let z = SquareMatrix::<f64>::zeros(2);
        let e = expm(&z).unwrap();
        assert_eq!(e.max_abs_diff(&SquareMatrix::identity(2)), 0.0);
    }

    #[test]
    fn expm_rotation_closed_form() {
        // wind oscillator at theta = pi/2, r = 20, h = 1/20: V = 2hJM rotates by 2
        let e = expm(&rotation_gen(2.0)).unwrap();
        let (c, s) = (2.0f64.cos(), 2.0f64.sin());
        let exact = SquareMatrix::new(2, vec![c, -s, s, c]).unwrap();
        assert!(e.max_abs_diff(&exact) < 1e-14);
    }

    #[test]
    fn expm_large_norm_rotation() {
        let e = expm(&rotation_gen(100.0)).unwrap();
        let (c, s) = (100.0f64.cos(), 100.0f64.sin());
        let exact = SquareMatrix::new(2, vec![c, -s, s, c]).unwrap();
        assert!(e.max_abs_diff(&exact) / e.inf_norm() < 1e-13);
    }

    #[test]
    fn expm_rejects_nan() {
        let mut a = SquareMatrix::<f64>::zeros(2);
        a.set(0, 0, f64::NAN);
        assert!(matches!(expm(&a), Err(Error::NonFiniteInput { .. })));
    }

    #[test]
    fn expm_overflow_reported() {
        let a = SquareMatrix::new(1, vec![1.0e4f64]).unwrap();
        // exp(1e4) overflows f64
        assert!(matches!(expm(&a), Err(Error::Overflow { .. })));
    }

    #[test]
    fn phi_of_zero_is_identity() {
        let z = SquareMatrix::<f64>::zeros(3);
        let p = phi1(&z).unwrap();
        assert!(p.max_abs_diff(&SquareMatrix::identity(3)) < 1e-15);
    }

    #[test]
    fn phi_scalar_value() {
        let a = SquareMatrix::new(1, vec![1.0f64]).unwrap();
        let p = phi1(&a).unwrap();
        assert!((p.get(0, 0) - (1.0f64.exp() - 1.0)).abs() < 1e-14);
    }

    #[test]
    fn phi_valid_at_singular_input() {
        // nilpotent (hence singular) matrix: phi([[0,1],[0,0]]) = I + A/2
        let a = SquareMatrix::new(2, vec![0.0f64, 1.0, 0.0, 0.0]).unwrap();
        let p = phi1(&a).unwrap();
        assert!((p.get(0, 0) - 1.0).abs() < 1e-15);
        assert!((p.get(0, 1) - 0.5).abs() < 1e-15);
        assert!((p.get(1, 1) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn pair_zero_j_gives_identities() {
        let j = SquareMatrix::<f64>::zeros(3);
        let m = SquareMatrix::identity(3);
        let pair = exp_and_phi(&j, &m, 0.7).unwrap();
        assert!(pair.expv.max_abs_diff(&SquareMatrix::identity(3)) < 1e-15);
        assert!(pair.phiv.max_abs_diff(&SquareMatrix::identity(3)) < 1e-15);
    }

    #[test]
    fn pair_satisfies_phi_identity() {
        let j = SquareMatrix::new(2, vec![0.0, -1.0, 1.0, 0.0]).unwrap();
        let m = SquareMatrix::new(2, vec![2.0, 0.3, 0.3, 1.0]).unwrap();
        let pair = exp_and_phi(&j, &m, 0.1).unwrap();
        assert!(pair.identity_residual(&j, &m) < 1e-12);
    }

    #[test]
    fn pair_dimension_mismatch() {
        let j = SquareMatrix::<f64>::zeros(2);
        let m = SquareMatrix::<f64>::zeros(3);
        assert!(matches!(
            exp_and_phi(&j, &m, 1.0),
            Err(Error::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn works_in_f32() {
        let a = SquareMatrix::new(2, vec![0.0f32, -1.0, 1.0, 0.0]).unwrap();
        let e = expm(&a).unwrap();
        let (c, s) = (1.0f32.cos(), 1.0f32.sin());
        assert!((e.get(0, 0) - c).abs() < 1e-6);
        assert!((e.get(1, 0) - s).abs() < 1e-6);
    }
}
