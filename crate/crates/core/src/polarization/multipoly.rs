//! Sparse multivariate polynomials with tiny variable counts.
//!
//! Used to build polarized energies symbolically and to derive their
//! discrete gradients by exact quadratic factorization. Variable counts stay
//! below a dozen (window length times state dimension for hand-sized
//! states), so a BTreeMap keyed by exponent tuples is plenty.

use std::collections::BTreeMap;

use crate::scalar::Scalar;

#[derive(Debug, Clone)]
pub struct MultiPoly<T> {
    nvars: usize,
    terms: BTreeMap<Vec<u8>, T>,
}

impl<T: Scalar> MultiPoly<T> {
    pub fn zero(nvars: usize) -> Self {
        MultiPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: T) -> Self {
        let mut p = Self::zero(nvars);
        if c != T::zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(i < nvars);
        let mut exp = vec![0u8; nvars];
        exp[i] = 1;
        let mut p = Self::zero(nvars);
        p.terms.insert(exp, T::one());
        p
    }

    /// Monomial c * prod vars[i]^exps[i].
    pub fn monomial(nvars: usize, exps: &[(usize, u8)], c: T) -> Self {
        let mut exp = vec![0u8; nvars];
        for &(i, e) in exps {
            assert!(i < nvars);
            exp[i] += e;
        }
        let mut p = Self::zero(nvars);
        if c != T::zero() {
            p.terms.insert(exp, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn insert(&mut self, exp: Vec<u8>, c: T) {
        if c == T::zero() {
            return;
        }
        let entry = self.terms.entry(exp);
        match entry {
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let v = *o.get() + c;
                if v == T::zero() {
                    o.remove();
                } else {
                    *o.get_mut() = v;
                }
            }
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars);
        let mut out = self.clone();
        for (exp, &c) in &other.terms {
            out.insert(exp.clone(), c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-T::one()))
    }

    pub fn scale(&self, s: T) -> Self {
        if s == T::zero() {
            return Self::zero(self.nvars);
        }
        MultiPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, &c)| (e.clone(), c * s)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars);
        let mut out = Self::zero(self.nvars);
        for (ea, &ca) in &self.terms {
            for (eb, &cb) in &other.terms {
                let exp: Vec<u8> = ea.iter().zip(eb).map(|(&a, &b)| a + b).collect();
                out.insert(exp, ca * cb);
            }
        }
        out
    }

    pub fn eval(&self, vars: &[T]) -> T {
        debug_assert_eq!(vars.len(), self.nvars);
        let mut total = T::zero();
        for (exp, &c) in &self.terms {
            let mut term = c;
            for (v, &e) in vars.iter().zip(exp) {
                match e {
                    0 => {}
                    1 => term = term * *v,
                    2 => term = term * *v * *v,
                    _ => term = term * v.powi(e as i32),
                }
            }
            total = total + term;
        }
        total
    }

    /// Remap every variable index; exponents landing on the same target merge.
    /// The result lives in `new_nvars` variables.
    pub fn map_vars(&self, new_nvars: usize, f: impl Fn(usize) -> usize) -> Self {
        let mut out = Self::zero(new_nvars);
        for (exp, &c) in &self.terms {
            let mut new_exp = vec![0u8; new_nvars];
            for (i, &e) in exp.iter().enumerate() {
                if e > 0 {
                    let t = f(i);
                    assert!(t < new_nvars);
                    new_exp[t] += e;
                }
            }
            out.insert(new_exp, c);
        }
        out
    }

    /// Coefficient of vars[i]^power, as a polynomial with that variable's
    /// exponent cleared.
    pub fn coeff_in_var(&self, i: usize, power: u8) -> Self {
        let mut out = Self::zero(self.nvars);
        for (exp, &c) in &self.terms {
            if exp[i] == power {
                let mut e = exp.clone();
                e[i] = 0;
                out.insert(e, c);
            }
        }
        out
    }

    pub fn degree_in(&self, i: usize) -> u8 {
        self.terms.keys().map(|e| e[i]).max().unwrap_or(0)
    }

    /// Keep only terms with exponent zero in all of `vars`.
    pub fn drop_terms_involving(&self, vars: &[usize]) -> Self {
        let mut out = Self::zero(self.nvars);
        for (exp, &c) in &self.terms {
            if vars.iter().all(|&v| exp[v] == 0) {
                out.insert(exp.clone(), c);
            }
        }
        out
    }

    /// Largest coefficient deviation from `other`.
    pub fn max_coeff_diff(&self, other: &Self) -> T {
        let mut worst = T::zero();
        for (exp, &c) in &self.terms {
            let o = other.terms.get(exp).copied().unwrap_or_else(T::zero);
            worst = worst.max((c - o).abs());
        }
        for (exp, &c) in &other.terms {
            if !self.terms.contains_key(exp) {
                worst = worst.max(c.abs());
            }
        }
        worst
    }

    pub fn max_coeff_abs(&self) -> T {
        self.terms
            .values()
            .map(|c| c.abs())
            .fold(T::zero(), T::max)
    }

    /// Freeze into a flat term table for fast repeated evaluation.
    pub fn compile(&self) -> CompiledPoly<T> {
        CompiledPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, &c)| {
                    let mut exps = [0u8; MAX_COMPILED_VARS];
                    assert!(e.len() <= MAX_COMPILED_VARS);
                    exps[..e.len()].copy_from_slice(e);
                    (exps, c)
                })
                .collect(),
        }
    }
}

pub const MAX_COMPILED_VARS: usize = 12;

/// Contiguous term table; evaluation walks one flat slice instead of a tree.
#[derive(Debug, Clone)]
pub struct CompiledPoly<T> {
    nvars: usize,
    terms: Vec<([u8; MAX_COMPILED_VARS], T)>,
}

impl<T: Scalar> CompiledPoly<T> {
    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn eval(&self, vars: &[T]) -> T {
        debug_assert_eq!(vars.len(), self.nvars);
        let mut total = T::zero();
        for (exps, c) in &self.terms {
            let mut term = *c;
            for (v, &e) in vars.iter().zip(&exps[..self.nvars]) {
                match e {
                    0 => {}
                    1 => term = term * *v,
                    2 => term = term * *v * *v,
                    _ => term = term * v.powi(e as i32),
                }
            }
            total = total + term;
        }
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_and_mul() {
        // (x + 2y)(x - y) = x^2 + xy - 2y^2
        let x = MultiPoly::<f64>::var(2, 0);
        let y = MultiPoly::<f64>::var(2, 1);
        let p = x.add(&y.scale(2.0)).mul(&x.sub(&y));
        assert_eq!(p.eval(&[3.0, 1.0]), 9.0 + 3.0 - 2.0);
    }

    #[test]
    fn coeff_extraction() {
        // p = 3x^2 y + x + 5
        let p = MultiPoly::<f64>::monomial(2, &[(0, 2), (1, 1)], 3.0)
            .add(&MultiPoly::var(2, 0))
            .add(&MultiPoly::constant(2, 5.0));
        let a = p.coeff_in_var(0, 2); // 3y
        assert_eq!(a.eval(&[0.0, 2.0]), 6.0);
        let b = p.coeff_in_var(0, 1); // 1
        assert_eq!(b.eval(&[0.0, 7.0]), 1.0);
    }

    #[test]
    fn map_vars_merges() {
        // x0*x1 with both mapped to var 0 becomes x0^2
        let p = MultiPoly::<f64>::monomial(2, &[(0, 1), (1, 1)], 1.0);
        let q = p.map_vars(1, |_| 0);
        assert_eq!(q.eval(&[3.0]), 9.0);
    }
}
