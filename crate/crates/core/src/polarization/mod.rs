//! Quadratic polarizations of polynomial potentials and their polarized
//! discrete gradients.
//!
//! A polarization of a potential U is a function Ubar of p consecutive
//! states, at most quadratic in each argument, with Ubar(x,...,x) = U(x).
//! Its polarized discrete gradient is the (p+1)-argument vector function
//! satisfying the telescoping identity
//!
//!   Ubar(y_{n+1},...,y_{n+p}) - Ubar(y_n,...,y_{n+p-1})
//!       = (1/p) (y_{n+p} - y_n)^T grad(y_n,...,y_{n+p})
//!
//! together with equal-arguments consistency grad(x,...,x) = gradU(x).
//!
//! For permutation-free energies the gradient is constructed here exactly:
//! the scaled difference above vanishes at y_{n+p} = y_n, and since the
//! energy is quadratic per argument the difference factors coordinate by
//! coordinate into (z_k - x_k) times an affine quotient. Averaging the
//! construction with its argument-reversed twin makes the gradient invariant
//! under window reversal, which the symmetry theorem requires.

pub mod multipoly;

use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::SquareMatrix;
use crate::scalar::Scalar;
use multipoly::{CompiledPoly, MultiPoly};

type EnergyFn<T> = Box<dyn Fn(&[Vec<T>]) -> T + Send + Sync>;
type GradientFn<T> = Box<dyn Fn(&[Vec<T>]) -> Vec<T> + Send + Sync>;
type AffineFn<T> = Box<dyn Fn(&[Vec<T>]) -> (SquareMatrix<T>, Vec<T>) + Send + Sync>;

struct PolyParts<T> {
    energy: CompiledPoly<T>,           // p*dim variables
    gradient: Vec<CompiledPoly<T>>,    // dim polys in (p+1)*dim variables
    lin: Vec<Vec<CompiledPoly<T>>>,    // lin[k][j]: coefficient of z_j in gradient k
    affine_const: Vec<CompiledPoly<T>>, // gradient with the newest argument zeroed
}

struct CustomParts<T> {
    energy: EnergyFn<T>,
    gradient: GradientFn<T>,
    affine: Option<AffineFn<T>>,
}

enum Backend<T> {
    Poly(PolyParts<T>),
    Custom(CustomParts<T>),
}

/// A polarized potential: window length, energy, polarized discrete
/// gradient, and the gradient's affine decomposition in its newest argument.
pub struct PolarizedPotential<T: Scalar> {
    window: usize,
    dim: usize,
    permutation_free: bool,
    newest_support: Option<Vec<usize>>,
    backend: Backend<T>,
}

impl<T: Scalar> PolarizedPotential<T> {
    /// Build from a symbolic energy in `window * dim` variables
    /// (argument i, coordinate c maps to variable i*dim + c).
    ///
    /// The energy must be permutation free; the polarized discrete gradient
    /// and its affine parts are derived exactly.
    pub fn from_energy_poly(window: usize, dim: usize, energy: MultiPoly<T>) -> Result<Self> {
        assert!(window >= 1 && dim >= 1);
        assert_eq!(energy.nvars(), window * dim);
        check_permutation_free(&energy, window, dim)?;
        let gradient = derive_gradient(&energy, window, dim);
        let zvars: Vec<usize> = (0..dim).map(|c| window * dim + c).collect();
        let mut lin = Vec::with_capacity(dim);
        let mut affine_const = Vec::with_capacity(dim);
        let mut support: Vec<usize> = Vec::new();
        for g in &gradient {
            debug_assert!(zvars.iter().all(|&z| g.degree_in(z) <= 1));
            let row: Vec<MultiPoly<T>> = zvars.iter().map(|&z| g.coeff_in_var(z, 1)).collect();
            lin.push(row);
            affine_const.push(g.drop_terms_involving(&zvars));
        }
        for j in 0..dim {
            if (0..dim).any(|k| !lin[k][j].is_zero()) {
                support.push(j);
            }
        }
        let newest_support = if support.len() == dim {
            None
        } else {
            Some(support)
        };
        Ok(PolarizedPotential {
            window,
            dim,
            permutation_free: true,
            newest_support,
            backend: Backend::Poly(PolyParts {
                energy: energy.compile(),
                gradient: gradient.iter().map(MultiPoly::compile).collect(),
                lin: lin
                    .iter()
                    .map(|row| row.iter().map(MultiPoly::compile).collect())
                    .collect(),
                affine_const: affine_const.iter().map(MultiPoly::compile).collect(),
            }),
        })
    }

    /// Build from hand-coded closures (used by the vector-valued problem
    /// polarizations where the gradient has a printed closed form).
    pub fn from_parts(
        window: usize,
        dim: usize,
        permutation_free: bool,
        newest_support: Option<Vec<usize>>,
        energy: EnergyFn<T>,
        gradient: GradientFn<T>,
        affine: Option<AffineFn<T>>,
    ) -> Self {
        PolarizedPotential {
            window,
            dim,
            permutation_free,
            newest_support,
            backend: Backend::Custom(CustomParts {
                energy,
                gradient,
                affine,
            }),
        }
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_permutation_free(&self) -> bool {
        self.permutation_free
    }

    /// Components of the newest argument the gradient actually depends on
    /// (and outside of which the gradient vanishes). `None` means full.
    pub fn newest_support(&self) -> Option<&[usize]> {
        self.newest_support.as_deref()
    }

    /// Ubar on a window of `window` states.
    pub fn energy(&self, states: &[Vec<T>]) -> T {
        assert_eq!(states.len(), self.window, "window length");
        match &self.backend {
            Backend::Poly(p) => p.energy.eval(&flatten(states)),
            Backend::Custom(c) => (c.energy)(states),
        }
    }

    /// Polarized discrete gradient on `window + 1` states.
    pub fn gradient(&self, args: &[Vec<T>]) -> Vec<T> {
        assert_eq!(args.len(), self.window + 1, "gradient arity");
        match &self.backend {
            Backend::Poly(p) => {
                let vars = flatten(args);
                p.gradient.iter().map(|g| g.eval(&vars)).collect()
            }
            Backend::Custom(c) => (c.gradient)(args),
        }
    }

    /// Decomposition grad(w, z) = G z + g for the window `w` of the oldest
    /// `window` arguments.
    pub fn affine_parts(&self, states: &[Vec<T>]) -> (SquareMatrix<T>, Vec<T>) {
        assert_eq!(states.len(), self.window, "affine window length");
        match &self.backend {
            Backend::Poly(p) => {
                let mut vars = flatten(states);
                vars.extend(std::iter::repeat(T::zero()).take(self.dim));
                let g = SquareMatrix::from_fn(self.dim, |k, j| p.lin[k][j].eval(&vars));
                let c = p.affine_const.iter().map(|q| q.eval(&vars)).collect();
                (g, c)
            }
            Backend::Custom(c) => match &c.affine {
                Some(f) => f(states),
                None => self.affine_by_probing(states),
            },
        }
    }

    /// Exact probe of the affine decomposition: the gradient is affine in
    /// its newest argument, so dim+1 evaluations recover (G, g).
    fn affine_by_probing(&self, states: &[Vec<T>]) -> (SquareMatrix<T>, Vec<T>) {
        let mut args: Vec<Vec<T>> = states.to_vec();
        args.push(vec![T::zero(); self.dim]);
        let g0 = self.gradient(&args);
        let mut gmat = SquareMatrix::zeros(self.dim);
        for j in 0..self.dim {
            args[self.window][j] = T::one();
            let gj = self.gradient(&args);
            args[self.window][j] = T::zero();
            for k in 0..self.dim {
                gmat.set(k, j, gj[k] - g0[k]);
            }
        }
        (gmat, g0)
    }

    /// Copy with the gradient's first component offset by `eps`; breaks the
    /// discrete-gradient identity on purpose (validator fault injection).
    pub fn corrupted(self, eps: T) -> Self {
        let window = self.window;
        let dim = self.dim;
        let permutation_free = self.permutation_free;
        let inner = Arc::new(self);
        let e = Arc::clone(&inner);
        let g = Arc::clone(&inner);
        PolarizedPotential {
            window,
            dim,
            permutation_free,
            newest_support: None,
            backend: Backend::Custom(CustomParts {
                energy: Box::new(move |w| e.energy(w)),
                gradient: Box::new(move |a| {
                    let mut v = g.gradient(a);
                    v[0] += eps;
                    v
                }),
                affine: None,
            }),
        }
    }
}

fn flatten<T: Scalar>(states: &[Vec<T>]) -> Vec<T> {
    let mut v = Vec::with_capacity(states.len() * states[0].len());
    for s in states {
        v.extend_from_slice(s);
    }
    v
}

/// Verify symbolic invariance under all adjacent argument transpositions
/// (which generate the full symmetric group).
fn check_permutation_free<T: Scalar>(
    energy: &MultiPoly<T>,
    window: usize,
    dim: usize,
) -> Result<()> {
    let tol = T::lit(1e-12) * (T::one() + energy.max_coeff_abs());
    for t in 0..window.saturating_sub(1) {
        let swapped = energy.map_vars(window * dim, |v| {
            let (arg, coord) = (v / dim, v % dim);
            let new_arg = if arg == t {
                t + 1
            } else if arg == t + 1 {
                t
            } else {
                arg
            };
            new_arg * dim + coord
        });
        let diff = energy.max_coeff_diff(&swapped);
        if diff > tol {
            return Err(Error::NotPermutationFree {
                residual: diff.to_f64_lossy(),
            });
        }
    }
    Ok(())
}

/// Exact polarized discrete gradient of a permutation-free quadratic
/// polarization, reversal-symmetrized.
fn derive_gradient<T: Scalar>(
    energy: &MultiPoly<T>,
    window: usize,
    dim: usize,
) -> Vec<MultiPoly<T>> {
    let p = window;
    let nvars = (p + 1) * dim;
    // N = p * (Ubar(y_1..y_p) - Ubar(y_0..y_{p-1})), vanishes at y_p = y_0.
    let base = energy.map_vars(nvars, |v| v);
    let shifted = energy.map_vars(nvars, |v| v + dim);
    let n_poly = shifted.sub(&base).scale(T::from_usize_exact(p));

    let zvar = |c: usize| p * dim + c;
    let mut grads = Vec::with_capacity(dim);
    for k in 0..dim {
        // Coordinates before k in the newest argument are pinned to the
        // oldest argument, telescoping the difference one coordinate at a
        // time; the k-th factor then divides exactly.
        let mut pinned = n_poly.clone();
        for c in 0..k {
            pinned = pinned.map_vars(nvars, |v| if v == zvar(c) { c } else { v });
        }
        let quad = pinned.coeff_in_var(zvar(k), 2);
        let lin = pinned.coeff_in_var(zvar(k), 1);
        let sum_var = MultiPoly::var(nvars, zvar(k)).add(&MultiPoly::var(nvars, k));
        let dk = quad.mul(&sum_var).add(&lin);
        grads.push(dk);
    }
    // Average with the construction on the reversed window.
    let half = T::lit(0.5);
    grads
        .iter()
        .map(|g| {
            let rev = g.map_vars(nvars, |v| {
                let (arg, coord) = (v / dim, v % dim);
                (p - arg) * dim + coord
            });
            g.add(&rev).scale(half)
        })
        .collect()
}

/// Scalar polynomial sum c_d x^d, coefficients indexed by degree.
#[derive(Debug, Clone)]
pub struct ScalarPolynomial<T> {
    pub coefficients: Vec<T>,
}

impl<T: Scalar> ScalarPolynomial<T> {
    pub fn new(coefficients: Vec<T>) -> Self {
        ScalarPolynomial { coefficients }
    }

    pub fn degree(&self) -> usize {
        self.coefficients
            .iter()
            .rposition(|c| *c != T::zero())
            .unwrap_or(0)
    }

    pub fn eval(&self, x: T) -> T {
        self.coefficients
            .iter()
            .rev()
            .fold(T::zero(), |acc, &c| acc * x + c)
    }

    pub fn derivative_eval(&self, x: T) -> T {
        let mut acc = T::zero();
        for (d, &c) in self.coefficients.iter().enumerate().rev() {
            if d > 0 {
                acc = acc * x + c * T::from_usize_exact(d);
            }
        }
        acc
    }
}

/// Window each built-in monomial polarization needs.
fn monomial_window(degree: usize) -> usize {
    match degree {
        0 | 1 => 1,
        2 | 3 | 4 => 2,
        5 => 4,
        6 => 3,
        _ => unreachable!(),
    }
}

/// Energy polynomial of the built-in polarization of x^degree.
fn monomial_energy<T: Scalar>(degree: usize) -> MultiPoly<T> {
    let half = T::lit(0.5);
    let quarter = T::lit(0.25);
    match degree {
        0 => MultiPoly::constant(1, T::one()),
        1 => MultiPoly::var(1, 0),
        // theta (x^2+y^2)/2 + (1-theta) x y at theta = 1/2
        2 => MultiPoly::monomial(2, &[(0, 2)], quarter)
            .add(&MultiPoly::monomial(2, &[(1, 2)], quarter))
            .add(&MultiPoly::monomial(2, &[(0, 1), (1, 1)], half)),
        // x (x+y)/2 y
        3 => MultiPoly::monomial(2, &[(0, 2), (1, 1)], half)
            .add(&MultiPoly::monomial(2, &[(0, 1), (1, 2)], half)),
        // x^2 y^2
        4 => MultiPoly::monomial(2, &[(0, 2), (1, 2)], T::one()),
        // x y z w (x+y+z+w)/4
        5 => {
            let mut p = MultiPoly::zero(4);
            for extra in 0..4 {
                let mut exps = vec![(0usize, 1u8), (1, 1), (2, 1), (3, 1)];
                exps.push((extra, 1));
                p = p.add(&MultiPoly::monomial(4, &exps, quarter));
            }
            p
        }
        // x^2 y^2 z^2
        6 => MultiPoly::monomial(3, &[(0, 2), (1, 2), (2, 2)], T::one()),
        _ => unreachable!(),
    }
}

/// The built-in polarization of the monomial x^degree (degree 2..6), with
/// the quadratic case at theta = 1/2.
pub fn polarize_monomial<T: Scalar>(degree: usize) -> Result<PolarizedPotential<T>> {
    if !(2..=6).contains(&degree) {
        return Err(Error::UnsupportedDegree { degree });
    }
    let p = monomial_window(degree);
    PolarizedPotential::from_energy_poly(p, 1, monomial_energy(degree))
}

/// Polarize a scalar polynomial of degree <= 6 over a common window.
///
/// Each monomial's polarization is lifted to the requested window by
/// averaging it over all argument subsets of its own window size, which
/// keeps the result permutation free.
pub fn polarize_polynomial<T: Scalar>(
    poly: &ScalarPolynomial<T>,
    window: usize,
) -> Result<PolarizedPotential<T>> {
    let degree = poly.degree();
    if degree > 6 {
        return Err(Error::UnsupportedDegree { degree });
    }
    let required = poly
        .coefficients
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != T::zero())
        .map(|(d, _)| monomial_window(d))
        .max()
        .unwrap_or(1);
    if window < required {
        return Err(Error::WindowTooSmall {
            required,
            got: window,
        });
    }
    let mut total = MultiPoly::zero(window);
    for (d, &c) in poly.coefficients.iter().enumerate() {
        if c == T::zero() {
            continue;
        }
        if d == 0 {
            total = total.add(&MultiPoly::constant(window, c));
            continue;
        }
        let pd = monomial_window(d);
        let base = monomial_energy::<T>(d);
        let subsets = k_subsets(window, pd);
        let weight = c / T::from_usize_exact(subsets.len());
        for subset in &subsets {
            let lifted = base.map_vars(window, |i| subset[i]);
            total = total.add(&lifted.scale(weight));
        }
    }
    PolarizedPotential::from_energy_poly(window, 1, total)
}

fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// One validator check: name, worst relative residual seen, tolerance.
#[derive(Debug, Clone)]
pub struct ValidationCheck {
    pub name: &'static str,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Outcome of [`validate_polarization`].
#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub checks: Vec<ValidationCheck>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

const VALIDATOR_TOL: f64 = 1e-10;

/// Numerically verify the defining identities of a polarization against the
/// potential it claims to polarize, on random argument tuples in [-2, 2].
///
/// Residuals are measured relative to 1 + the magnitude of the terms
/// involved, so the checks stay meaningful for large states.
pub fn validate_polarization<T: Scalar>(
    pot: &PolarizedPotential<T>,
    u: &dyn Fn(&[T]) -> T,
    grad_u: &dyn Fn(&[T]) -> Vec<T>,
    trials: usize,
    rng: &mut impl Rng,
) -> ValidationReport {
    assert!(trials >= 1);
    let p = pot.window();
    let dim = pot.dim();
    let inv_p = T::one() / T::from_usize_exact(p);
    let draw_state = |rng: &mut _| -> Vec<T> {
        (0..dim)
            .map(|_| T::lit(rand::Rng::gen_range(rng, -2.0..2.0)))
            .collect()
    };

    let mut res_identity = T::zero();
    let mut res_consistency = T::zero();
    let mut res_affine = T::zero();
    let mut res_permutation = T::zero();

    for _ in 0..trials {
        let args: Vec<Vec<T>> = (0..p + 1).map(|_| draw_state(rng)).collect();

        // (a) discrete-gradient identity
        let e_new = pot.energy(&args[1..]);
        let e_old = pot.energy(&args[..p]);
        let grad = pot.gradient(&args);
        let diff = crate::linalg::vec_sub(&args[p], &args[0]);
        let pairing = crate::linalg::dot(&diff, &grad) * inv_p;
        let scale = T::one() + e_new.abs() + e_old.abs() + pairing.abs();
        res_identity = res_identity.max(((e_new - e_old) - pairing).abs() / scale);

        // (b) consistency at equal arguments: gradient against gradU and
        // energy against U
        let x = draw_state(rng);
        let equal: Vec<Vec<T>> = (0..p + 1).map(|_| x.clone()).collect();
        let g_eq = pot.gradient(&equal);
        let g_ref = grad_u(&x);
        let scale = T::one()
            + crate::linalg::vec_inf_norm(&g_eq)
            + crate::linalg::vec_inf_norm(&g_ref);
        res_consistency = res_consistency
            .max(crate::linalg::vec_inf_norm(&crate::linalg::vec_sub(&g_eq, &g_ref)) / scale);
        let e_eq = pot.energy(&equal[..p]);
        let e_ref = u(&x);
        res_consistency =
            res_consistency.max((e_eq - e_ref).abs() / (T::one() + e_eq.abs() + e_ref.abs()));

        // (c) affine decomposition reproduces the gradient
        let (gmat, gvec) = pot.affine_parts(&args[..p]);
        let mut affine = gmat.mat_vec(&args[p]);
        for (a, &g) in affine.iter_mut().zip(&gvec) {
            *a = *a + g;
        }
        let scale = T::one()
            + crate::linalg::vec_inf_norm(&affine)
            + crate::linalg::vec_inf_norm(&grad);
        res_affine = res_affine
            .max(crate::linalg::vec_inf_norm(&crate::linalg::vec_sub(&affine, &grad)) / scale);

        // (d) permutation invariance of the energy
        if pot.is_permutation_free() {
            let mut perm: Vec<usize> = (0..p).collect();
            for i in (1..p).rev() {
                let j = rng.gen_range(0..=i);
                perm.swap(i, j);
            }
            let permuted: Vec<Vec<T>> = perm.iter().map(|&i| args[i].clone()).collect();
            let e_perm = pot.energy(&permuted);
            let scale = T::one() + e_old.abs();
            res_permutation = res_permutation.max((e_perm - e_old).abs() / scale);
        }
    }

    let mk = |name: &'static str, r: T| ValidationCheck {
        name,
        max_residual: r.to_f64_lossy(),
        tolerance: VALIDATOR_TOL,
        pass: r.to_f64_lossy() <= VALIDATOR_TOL,
    };
    let mut checks = vec![
        mk("discrete_gradient_identity", res_identity),
        mk("consistency_at_equal_arguments", res_consistency),
        mk("affine_decomposition", res_affine),
    ];
    if pot.is_permutation_free() {
        checks.push(mk("permutation_invariance", res_permutation));
    }
    ValidationReport { checks }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn states(vals: &[f64]) -> Vec<Vec<f64>> {
        vals.iter().map(|&v| vec![v]).collect()
    }

    #[test]
    fn cubic_energy_matches_table() {
        let p = polarize_monomial::<f64>(3).unwrap();
        // x (x+y)/2 y at (1, 2)
        assert!((p.energy(&states(&[1.0, 2.0])) - 3.0).abs() < 1e-15);
    }

    #[test]
    fn cubic_gradient_consistency() {
        let p = polarize_monomial::<f64>(3).unwrap();
        let g = p.gradient(&states(&[1.0, 1.0, 1.0]));
        assert!((g[0] - 3.0).abs() < 1e-15);
    }

    #[test]
    fn cubic_identity_at_124() {
        let p = polarize_monomial::<f64>(3).unwrap();
        // Ubar(2,4) - Ubar(1,2) = 24 - 3 = 21 = (4-1)/2 * grad(1,2,4)
        let lhs = p.energy(&states(&[2.0, 4.0])) - p.energy(&states(&[1.0, 2.0]));
        assert!((lhs - 21.0).abs() < 1e-13);
        let g = p.gradient(&states(&[1.0, 2.0, 4.0]));
        assert!((0.5 * 3.0 * g[0] - lhs).abs() < 1e-13);
        // closed form y(x+y+z)
        assert!((g[0] - 2.0 * 7.0).abs() < 1e-13);
    }

    #[test]
    fn degree_six_consistency_value() {
        let p = polarize_monomial::<f64>(6).unwrap();
        let x: f64 = 1.5;
        let g = p.gradient(&states(&[x, x, x, x]));
        assert!((g[0] - 6.0 * x.powi(5)).abs() < 1e-12);
    }

    #[test]
    fn quadratic_theta_half_forms() {
        let p = polarize_polynomial(&ScalarPolynomial::new(vec![0.0, 0.0, 1.0]), 2).unwrap();
        // Ubar(x,y) = (x^2+y^2)/4 + xy/2
        let e = p.energy(&states(&[3.0, 5.0]));
        assert!((e - ((9.0 + 25.0) / 4.0 + 7.5)).abs() < 1e-14);
        let g = p.gradient(&states(&[2.0, 2.0, 2.0]));
        assert!((g[0] - 4.0).abs() < 1e-14);
    }

    #[test]
    fn unsupported_degree_rejected() {
        assert!(matches!(
            polarize_monomial::<f64>(7),
            Err(Error::UnsupportedDegree { .. })
        ));
        assert!(matches!(
            polarize_monomial::<f64>(1),
            Err(Error::UnsupportedDegree { .. })
        ));
    }

    #[test]
    fn window_too_small_rejected() {
        let quintic = ScalarPolynomial::new(vec![0.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
        assert!(matches!(
            polarize_polynomial(&quintic, 3),
            Err(Error::WindowTooSmall { .. })
        ));
    }

    #[test]
    fn single_term_polynomial_equals_monomial() {
        let via_poly =
            polarize_polynomial(&ScalarPolynomial::new(vec![0.0, 0.0, 0.0, 1.0]), 2).unwrap();
        let direct = polarize_monomial::<f64>(3).unwrap();
        for vals in [[0.3, -1.2], [2.0, 0.5]] {
            let w = states(&vals);
            assert!((via_poly.energy(&w) - direct.energy(&w)).abs() < 1e-15);
        }
    }

    #[test]
    fn validator_passes_all_builtin_monomials() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for degree in 2..=6usize {
            let pot = polarize_monomial::<f64>(degree).unwrap();
            let u = move |x: &[f64]| x[0].powi(degree as i32);
            let gu = move |x: &[f64]| vec![degree as f64 * x[0].powi(degree as i32 - 1)];
            let report = validate_polarization(&pot, &u, &gu, 1000, &mut rng);
            assert!(report.passed(), "degree {degree}: {:?}", report.checks);
            for c in &report.checks {
                assert!(c.max_residual <= 1e-11, "degree {degree} {:?}", c);
            }
        }
    }

    #[test]
    fn validator_flags_corrupted_gradient() {
        let pot = polarize_monomial::<f64>(3).unwrap().corrupted(1e-3);
        let u = |x: &[f64]| x[0].powi(3);
        let gu = |x: &[f64]| vec![3.0 * x[0] * x[0]];
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let report = validate_polarization(&pot, &u, &gu, 200, &mut rng);
        assert!(!report.passed());
        let identity = &report.checks[0];
        assert_eq!(identity.name, "discrete_gradient_identity");
        assert!(identity.max_residual > 1e-5);
    }

    #[test]
    fn pendulum_style_polynomial_window3_validates() {
        let poly = ScalarPolynomial::new(vec![
            0.0,
            0.0,
            0.0,
            0.0,
            -1.0 / 24.0,
            0.0,
            1.0 / 720.0,
        ]);
        let pot = polarize_polynomial(&poly, 3).unwrap();
        assert_eq!(pot.window(), 3);
        let u = {
            let poly = poly.clone();
            move |x: &[f64]| poly.eval(x[0])
        };
        let gu = {
            let poly = poly.clone();
            move |x: &[f64]| vec![poly.derivative_eval(x[0])]
        };
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let report = validate_polarization(&pot, &u, &gu, 500, &mut rng);
        assert!(report.passed(), "{:?}", report.checks);
    }

    #[test]
    fn gradient_affine_in_newest_argument() {
        let pot = polarize_monomial::<f64>(5).unwrap();
        let w = states(&[0.4, -1.1, 0.9, 1.7]);
        let mut a1 = w.clone();
        a1.push(vec![2.0]);
        let mut a2 = w.clone();
        a2.push(vec![-0.6]);
        let mut amid = w.clone();
        amid.push(vec![0.7]);
        let g1 = pot.gradient(&a1);
        let g2 = pot.gradient(&a2);
        let gm = pot.gradient(&amid);
        assert!((g1[0] + g2[0] - 2.0 * gm[0]).abs() < 1e-12);
    }

    #[test]
    fn gradient_reversal_invariance() {
        for degree in 2..=6usize {
            let pot = polarize_monomial::<f64>(degree).unwrap();
            let p = pot.window();
            let vals: Vec<f64> = (0..=p).map(|i| 0.3 * i as f64 - 0.8).collect();
            let fwd = pot.gradient(&states(&vals));
            let rev_vals: Vec<f64> = vals.iter().rev().copied().collect();
            let rev = pot.gradient(&states(&rev_vals));
            assert!((fwd[0] - rev[0]).abs() < 1e-13, "degree {degree}");
        }
    }
}
