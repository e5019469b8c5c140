//! Sparse multivariate polynomials over a [`Field`].
//!
//! A polynomial lives in a ring fixed by an ordered list of variable names.
//! Terms are kept in a `BTreeMap` keyed by exponent vectors under graded
//! lexicographic order, so iteration (and therefore printing) is
//! deterministic. Zero coefficients are never stored. Polynomials over
//! different variable lists never mix implicitly: moving between rings goes
//! through [`MultiPoly::embed`] or [`MultiPoly::substitute`].

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{KovaError, Result};
use crate::scalar::Field;

/// Shared, ordered list of variable names defining a polynomial ring.
pub type Vars = Arc<Vec<String>>;

/// Builds a variable list from string slices.
pub fn vars(names: &[&str]) -> Vars {
    Arc::new(names.iter().map(|s| s.to_string()).collect())
}

/// Builds a variable list from owned names.
pub fn vars_owned(names: Vec<String>) -> Vars {
    Arc::new(names)
}

/// Exponent vector with graded lexicographic ordering.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Mono(pub Vec<u32>);

impl Mono {
    /// The all-zero exponent vector of length `n`.
    pub fn one(n: usize) -> Mono {
        Mono(vec![0; n])
    }

    /// Exponent vector of a single variable.
    pub fn var(n: usize, i: usize) -> Mono {
        let mut e = vec![0; n];
        e[i] = 1;
        Mono(e)
    }

    /// Total degree.
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Weighted degree `Σ w_k e_k`.
    pub fn weighted_degree(&self, w: &[i64]) -> i64 {
        self.0.iter().zip(w).map(|(&e, &wk)| e as i64 * wk).sum()
    }

    fn mul(&self, other: &Mono) -> Mono {
        Mono(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl Ord for Mono {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse multivariate polynomial.
#[derive(Clone, Debug)]
pub struct MultiPoly<F: Field> {
    vars: Vars,
    terms: BTreeMap<Mono, F>,
}

impl<F: Field> PartialEq for MultiPoly<F> {
    fn eq(&self, other: &Self) -> bool {
        same_ring(&self.vars, &other.vars) && self.terms == other.terms
    }
}

fn same_ring(a: &Vars, b: &Vars) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

impl<F: Field> MultiPoly<F> {
    /// The zero polynomial of a ring.
    pub fn zero(vars: &Vars) -> Self {
        MultiPoly {
            vars: vars.clone(),
            terms: BTreeMap::new(),
        }
    }

    /// A constant polynomial.
    pub fn constant(vars: &Vars, c: F) -> Self {
        let mut p = Self::zero(vars);
        p.add_term(Mono::one(vars.len()), c);
        p
    }

    /// The `i`-th variable.
    pub fn var(vars: &Vars, i: usize) -> Self {
        assert!(i < vars.len(), "variable index out of range");
        let mut p = Self::zero(vars);
        p.add_term(Mono::var(vars.len(), i), F::one());
        p
    }

    /// The variable with the given name.
    pub fn var_named(vars: &Vars, name: &str) -> Result<Self> {
        let i = vars
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| KovaError::UnknownVariable(name.to_string()))?;
        Ok(Self::var(vars, i))
    }

    /// A single term `c · x^e`.
    pub fn monomial(vars: &Vars, e: Vec<u32>, c: F) -> Self {
        assert_eq!(e.len(), vars.len(), "exponent length does not match ring");
        let mut p = Self::zero(vars);
        p.add_term(Mono(e), c);
        p
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs (like terms
    /// are combined).
    pub fn from_terms<I: IntoIterator<Item = (Vec<u32>, F)>>(vars: &Vars, it: I) -> Self {
        let mut p = Self::zero(vars);
        for (e, c) in it {
            assert_eq!(e.len(), vars.len(), "exponent length does not match ring");
            p.add_term(Mono(e), c);
        }
        p
    }

    /// Variable names of the ring.
    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    /// Number of ring variables.
    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    /// Index of a variable by name.
    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    /// Iterates `(exponents, coefficient)` in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Mono, &F)> {
        self.terms.iter()
    }

    /// Number of stored (nonzero) terms.
    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Whether the polynomial is zero.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of an exponent vector (zero when absent).
    pub fn coeff(&self, e: &[u32]) -> F {
        self.terms
            .get(&Mono(e.to_vec()))
            .cloned()
            .unwrap_or_else(F::zero)
    }

    /// Constant term.
    pub fn constant_term(&self) -> F {
        self.coeff(&vec![0; self.nvars()])
    }

    /// Whether the polynomial has no non-constant terms.
    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.degree() == 0)
    }

    /// Adds `c · x^e` in place.
    pub fn add_term(&mut self, e: Mono, c: F) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(v) => {
                let s = v.clone() + c;
                if s.is_zero() {
                    self.terms.remove(&e);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    fn check_ring(&self, other: &Self) {
        assert!(
            same_ring(&self.vars, &other.vars),
            "polynomials live in different rings {:?} vs {:?}; embed explicitly",
            self.vars,
            other.vars
        );
    }

    /// Sum.
    pub fn add(&self, other: &Self) -> Self {
        self.check_ring(other);
        let mut r = self.clone();
        for (e, c) in &other.terms {
            r.add_term(e.clone(), c.clone());
        }
        r
    }

    /// Difference.
    pub fn sub(&self, other: &Self) -> Self {
        self.check_ring(other);
        let mut r = self.clone();
        for (e, c) in &other.terms {
            r.add_term(e.clone(), -c.clone());
        }
        r
    }

    /// Product.
    pub fn mul(&self, other: &Self) -> Self {
        self.check_ring(other);
        let mut r = Self::zero(&self.vars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                r.add_term(e1.mul(e2), c1.clone() * c2.clone());
            }
        }
        r
    }

    /// Product truncated to weighted degree `≤ max`; products above the
    /// cutoff are never formed.
    pub fn mul_truncated(&self, other: &Self, w: &[i64], max: i64) -> Self {
        self.check_ring(other);
        let rhs: Vec<(&Mono, &F, i64)> = other
            .terms
            .iter()
            .map(|(e, c)| (e, c, e.weighted_degree(w)))
            .collect();
        let mut r = Self::zero(&self.vars);
        for (e1, c1) in &self.terms {
            let d1 = e1.weighted_degree(w);
            for &(e2, c2, d2) in &rhs {
                if d1 + d2 <= max {
                    r.add_term(e1.mul(e2), c1.clone() * c2.clone());
                }
            }
        }
        r
    }

    /// Negation.
    pub fn neg(&self) -> Self {
        MultiPoly {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), -c.clone()))
                .collect(),
        }
    }

    /// Multiplication by a scalar.
    pub fn scale(&self, c: &F) -> Self {
        let mut r = Self::zero(&self.vars);
        if c.is_zero() {
            return r;
        }
        for (e, v) in &self.terms {
            r.add_term(e.clone(), v.clone() * c.clone());
        }
        r
    }

    /// Multiplication by a monomial `x^e`.
    pub fn mul_mono(&self, e: &[u32]) -> Self {
        let m = Mono(e.to_vec());
        MultiPoly {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (k.mul(&m), c.clone()))
                .collect(),
        }
    }

    /// Non-negative integer power.
    pub fn pow(&self, n: u32) -> Self {
        let mut result = Self::constant(&self.vars, F::one());
        let mut base = self.clone();
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Partial derivative with respect to variable `i`.
    pub fn deriv(&self, i: usize) -> Self {
        let mut r = Self::zero(&self.vars);
        for (e, c) in &self.terms {
            let k = e.0[i];
            if k == 0 {
                continue;
            }
            let mut ne = e.0.clone();
            ne[i] -= 1;
            r.add_term(Mono(ne), c.clone() * F::from_i64(k as i64));
        }
        r
    }

    /// Antiderivative with respect to variable `i` (constant of integration 0).
    pub fn integrate(&self, i: usize) -> Self {
        let mut r = Self::zero(&self.vars);
        for (e, c) in &self.terms {
            let mut ne = e.0.clone();
            ne[i] += 1;
            let k = ne[i] as i64;
            r.add_term(Mono(ne), c.clone() / F::from_i64(k));
        }
        r
    }

    /// Total degree (`None` for the zero polynomial).
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Mono::degree).max()
    }

    /// Degree in variable `i` (`None` for zero).
    pub fn degree_in(&self, i: usize) -> Option<u32> {
        self.terms.keys().map(|e| e.0[i]).max()
    }

    /// Largest weighted degree of a term (`None` for zero).
    pub fn weighted_degree(&self, w: &[i64]) -> Option<i64> {
        self.terms.keys().map(|e| e.weighted_degree(w)).max()
    }

    /// Smallest weighted degree of a term (`None` for zero).
    pub fn min_weighted_degree(&self, w: &[i64]) -> Option<i64> {
        self.terms.keys().map(|e| e.weighted_degree(w)).min()
    }

    /// The weighted-homogeneous component of degree `d`.
    pub fn weighted_part(&self, w: &[i64], d: i64) -> Self {
        self.filter(|e| e.weighted_degree(w) == d)
    }

    /// Drops every term of weighted degree above `max`.
    pub fn truncate_weighted(&self, w: &[i64], max: i64) -> Self {
        self.filter(|e| e.weighted_degree(w) <= max)
    }

    /// Keeps the terms whose exponent vector satisfies `keep`.
    pub fn filter<P: Fn(&Mono) -> bool>(&self, keep: P) -> Self {
        MultiPoly {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| keep(e))
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    /// Whether variable `i` occurs in any term.
    pub fn involves(&self, i: usize) -> bool {
        self.terms.keys().any(|e| e.0[i] > 0)
    }

    /// Evaluates at a point of the coefficient field.
    pub fn eval(&self, point: &[F]) -> F {
        assert_eq!(point.len(), self.nvars(), "evaluation point has wrong length");
        let mut acc = F::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (k, &ek) in e.0.iter().enumerate() {
                for _ in 0..ek {
                    t = t * point[k].clone();
                }
            }
            acc = acc + t;
        }
        acc
    }

    /// Evaluates numerically at a complex point.
    pub fn eval_complex(&self, point: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (e, c) in &self.terms {
            let mut t = c.to_complex();
            for (k, &ek) in e.0.iter().enumerate() {
                if ek > 0 {
                    t *= point[k].powu(ek);
                }
            }
            acc += t;
        }
        acc
    }

    /// Substitutes a polynomial for every variable; all images must share a
    /// ring, which becomes the ring of the result.
    pub fn substitute(&self, images: &[MultiPoly<F>]) -> MultiPoly<F> {
        assert_eq!(images.len(), self.nvars(), "substitution has wrong arity");
        let target = match images.first() {
            Some(p) => p.vars.clone(),
            None => {
                return MultiPoly::constant(&self.vars, self.constant_term());
            }
        };
        for im in images {
            assert!(same_ring(&im.vars, &target), "substitution images in different rings");
        }
        let mut cache: Vec<Vec<MultiPoly<F>>> = images
            .iter()
            .map(|im| vec![MultiPoly::constant(&target, F::one()), im.clone()])
            .collect();
        let mut result = MultiPoly::zero(&target);
        for (e, c) in &self.terms {
            let mut t = MultiPoly::constant(&target, c.clone());
            for (k, &ek) in e.0.iter().enumerate() {
                if ek == 0 {
                    continue;
                }
                while cache[k].len() <= ek as usize {
                    let next = cache[k].last().unwrap().mul(&images[k]);
                    cache[k].push(next);
                }
                t = t.mul(&cache[k][ek as usize]);
            }
            result = result.add(&t);
        }
        result
    }

    /// Substitutes into a weighted truncation: products are truncated at
    /// weighted degree `max` (weights of the *target* ring).
    pub fn substitute_truncated(
        &self,
        images: &[MultiPoly<F>],
        w: &[i64],
        max: i64,
    ) -> MultiPoly<F> {
        assert_eq!(images.len(), self.nvars(), "substitution has wrong arity");
        let target = images[0].vars.clone();
        let mut result = MultiPoly::zero(&target);
        let images: Vec<MultiPoly<F>> =
            images.iter().map(|p| p.truncate_weighted(w, max)).collect();
        let mut cache: Vec<Vec<MultiPoly<F>>> = images
            .iter()
            .map(|im| vec![MultiPoly::constant(&target, F::one()), im.clone()])
            .collect();
        for (e, c) in &self.terms {
            let mut t = MultiPoly::constant(&target, c.clone());
            for (k, &ek) in e.0.iter().enumerate() {
                if ek == 0 {
                    continue;
                }
                while cache[k].len() <= ek as usize {
                    let next = cache[k].last().unwrap().mul_truncated(&images[k], w, max);
                    cache[k].push(next);
                }
                t = t.mul_truncated(&cache[k][ek as usize], w, max);
            }
            result = result.add(&t);
        }
        result
    }

    /// Maps coefficients into another field.
    pub fn map_coeffs<G: Field, M: Fn(&F) -> G>(&self, f: M) -> MultiPoly<G> {
        let mut r = MultiPoly::zero(&self.vars);
        for (e, c) in &self.terms {
            r.add_term(e.clone(), f(c));
        }
        r
    }

    /// Moves the polynomial into a ring whose variable list contains every
    /// variable that actually occurs (matched by name).
    pub fn embed(&self, target: &Vars) -> Result<MultiPoly<F>> {
        let mut map = Vec::with_capacity(self.nvars());
        for (i, name) in self.vars.iter().enumerate() {
            match target.iter().position(|t| t == name) {
                Some(j) => map.push(Some(j)),
                None => {
                    if self.involves(i) {
                        return Err(KovaError::UnknownVariable(name.clone()));
                    }
                    map.push(None);
                }
            }
        }
        let mut r = MultiPoly::zero(target);
        for (e, c) in &self.terms {
            let mut ne = vec![0; target.len()];
            for (i, &ei) in e.0.iter().enumerate() {
                if let Some(j) = map[i] {
                    ne[j] += ei;
                }
            }
            r.add_term(Mono(ne), c.clone());
        }
        Ok(r)
    }

    /// Coefficients with respect to variable `i`: `p = Σ_k coeffs[k] · x_i^k`,
    /// each coefficient free of `x_i` and in the same ring.
    pub fn coeffs_in(&self, i: usize) -> Vec<MultiPoly<F>> {
        let deg = self.degree_in(i).unwrap_or(0) as usize;
        let mut out = vec![MultiPoly::zero(&self.vars); deg + 1];
        for (e, c) in &self.terms {
            let k = e.0[i] as usize;
            let mut ne = e.0.clone();
            ne[i] = 0;
            out[k].add_term(Mono(ne), c.clone());
        }
        out
    }

    /// Dense coefficient list of a univariate polynomial (lowest degree first).
    pub fn to_dense(&self) -> Vec<F> {
        assert_eq!(self.nvars(), 1, "to_dense requires a univariate ring");
        let deg = self.total_degree().unwrap_or(0) as usize;
        let mut out = vec![F::zero(); deg + 1];
        for (e, c) in &self.terms {
            out[e.0[0] as usize] = c.clone();
        }
        out
    }

    /// Builds a univariate polynomial from dense coefficients.
    pub fn from_dense(vars: &Vars, coeffs: &[F]) -> Self {
        assert_eq!(vars.len(), 1, "from_dense requires a univariate ring");
        let mut p = Self::zero(vars);
        for (k, c) in coeffs.iter().enumerate() {
            p.add_term(Mono(vec![k as u32]), c.clone());
        }
        p
    }

    /// Renders in the expression grammar, highest-order terms first.
    pub fn to_expr(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (idx, (e, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative_literal();
            let mag = if neg { -c.clone() } else { c.clone() };
            if idx == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mono = format_mono(&self.vars, e);
            if mono.is_empty() {
                out.push_str(&mag.to_expr());
            } else if mag.is_one() {
                out.push_str(&mono);
            } else {
                out.push_str(&mag.to_expr());
                out.push('*');
                out.push_str(&mono);
            }
        }
        out
    }
}

fn format_mono(vars: &Vars, e: &Mono) -> String {
    let mut parts = Vec::new();
    for (name, &k) in vars.iter().zip(&e.0) {
        match k {
            0 => {}
            1 => parts.push(name.clone()),
            _ => parts.push(format!("{name}^{k}")),
        }
    }
    parts.join("*")
}

impl<F: Field> fmt::Display for MultiPoly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_expr())
    }
}

macro_rules! impl_binop {
    ($tr:ident, $m:ident) => {
        impl<'a, F: Field> $tr<&'a MultiPoly<F>> for &'a MultiPoly<F> {
            type Output = MultiPoly<F>;
            fn $m(self, rhs: &'a MultiPoly<F>) -> MultiPoly<F> {
                MultiPoly::$m(self, rhs)
            }
        }
    };
}

impl_binop!(Add, add);
impl_binop!(Sub, sub);
impl_binop!(Mul, mul);

impl<'a, F: Field> Neg for &'a MultiPoly<F> {
    type Output = MultiPoly<F>;
    fn neg(self) -> MultiPoly<F> {
        MultiPoly::neg(self)
    }
}
