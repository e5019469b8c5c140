//! Sparse multivariate Laurent polynomials: integer (possibly negative)
//! exponents over a coefficient [`Field`].
//!
//! Used where divisions by a monomial occur, such as weighted blow-ups and
//! the gluing maps, and for pole-order bookkeeping.

use std::collections::BTreeMap;
use std::fmt;

use crate::poly::{Mono, MultiPoly, Vars};
use crate::scalar::Field;

/// A Laurent polynomial `Σ c_e x^e` with `e ∈ ℤⁿ`.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentPoly<F: Field> {
    vars: Vars,
    terms: BTreeMap<Vec<i32>, F>,
}

impl<F: Field> LaurentPoly<F> {
    /// The zero element.
    pub fn zero(vars: &Vars) -> Self {
        LaurentPoly {
            vars: vars.clone(),
            terms: BTreeMap::new(),
        }
    }

    /// A constant.
    pub fn constant(vars: &Vars, c: F) -> Self {
        let mut p = Self::zero(vars);
        p.add_term(vec![0; vars.len()], c);
        p
    }

    /// The variable `i` raised to the integer power `k`.
    pub fn var_pow(vars: &Vars, i: usize, k: i32) -> Self {
        let mut e = vec![0; vars.len()];
        e[i] = k;
        let mut p = Self::zero(vars);
        p.add_term(e, F::one());
        p
    }

    /// Embeds an ordinary polynomial.
    pub fn from_poly(p: &MultiPoly<F>) -> Self {
        let mut out = Self::zero(p.vars());
        for (e, c) in p.terms() {
            out.add_term(e.0.iter().map(|&v| v as i32).collect(), c.clone());
        }
        out
    }

    /// The ring variables.
    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    /// Terms in ascending exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i32>, &F)> {
        self.terms.iter()
    }

    /// Whether this is zero.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of `x^e`.
    pub fn coeff(&self, e: &[i32]) -> F {
        self.terms.get(e).cloned().unwrap_or_else(F::zero)
    }

    /// Adds `c·x^e` in place.
    pub fn add_term(&mut self, e: Vec<i32>, c: F) {
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

    /// Sum.
    pub fn add(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (e, c) in &o.terms {
            r.add_term(e.clone(), c.clone());
        }
        r
    }

    /// Difference.
    pub fn sub(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (e, c) in &o.terms {
            r.add_term(e.clone(), -c.clone());
        }
        r
    }

    /// Product.
    pub fn mul(&self, o: &Self) -> Self {
        let mut r = Self::zero(&self.vars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let e: Vec<i32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                r.add_term(e, c1.clone() * c2.clone());
            }
        }
        r
    }

    /// Scalar multiple.
    pub fn scale(&self, c: &F) -> Self {
        let mut r = Self::zero(&self.vars);
        for (e, v) in &self.terms {
            r.add_term(e.clone(), v.clone() * c.clone());
        }
        r
    }

    /// Multiplies by the monomial `x^e`.
    pub fn shift(&self, e: &[i32]) -> Self {
        let mut r = Self::zero(&self.vars);
        for (k, v) in &self.terms {
            r.add_term(k.iter().zip(e).map(|(a, b)| a + b).collect(), v.clone());
        }
        r
    }

    /// Non-negative integer power.
    pub fn pow(&self, n: u32) -> Self {
        let mut r = Self::constant(&self.vars, F::one());
        for _ in 0..n {
            r = r.mul(self);
        }
        r
    }

    /// Lowest exponent of variable `i` (`None` for zero).
    pub fn min_exponent(&self, i: usize) -> Option<i32> {
        self.terms.keys().map(|e| e[i]).min()
    }

    /// The terms whose exponent in variable `i` is negative.
    pub fn polar_part(&self, i: usize) -> Self {
        let mut r = Self::zero(&self.vars);
        for (e, c) in &self.terms {
            if e[i] < 0 {
                r.add_term(e.clone(), c.clone());
            }
        }
        r
    }

    /// Converts to an ordinary polynomial when no exponent is negative.
    pub fn to_poly(&self) -> Option<MultiPoly<F>> {
        let mut out = MultiPoly::zero(&self.vars);
        for (e, c) in &self.terms {
            if e.iter().any(|&v| v < 0) {
                return None;
            }
            out.add_term(Mono(e.iter().map(|&v| v as u32).collect()), c.clone());
        }
        Some(out)
    }

    /// Partial derivative with respect to variable `i`.
    pub fn deriv(&self, i: usize) -> Self {
        let mut r = Self::zero(&self.vars);
        for (e, c) in &self.terms {
            if e[i] != 0 {
                let mut ne = e.clone();
                ne[i] -= 1;
                r.add_term(ne, c.clone() * F::from_i64(e[i] as i64));
            }
        }
        r
    }

    /// Substitutes Laurent polynomials for the variables; negative powers
    /// require the image to be a single monomial.
    pub fn substitute(&self, images: &[LaurentPoly<F>]) -> Option<LaurentPoly<F>> {
        let target = images.first()?.vars.clone();
        let mut r = LaurentPoly::zero(&target);
        for (e, c) in &self.terms {
            let mut t = LaurentPoly::constant(&target, c.clone());
            for (k, &ek) in e.iter().enumerate() {
                if ek >= 0 {
                    t = t.mul(&images[k].pow(ek as u32));
                } else {
                    let inv = images[k].monomial_inverse()?;
                    t = t.mul(&inv.pow((-ek) as u32));
                }
            }
            r = r.add(&t);
        }
        Some(r)
    }

    /// Inverse of a single-term Laurent polynomial.
    pub fn monomial_inverse(&self) -> Option<Self> {
        if self.terms.len() != 1 {
            return None;
        }
        let (e, c) = self.terms.iter().next()?;
        let mut r = Self::zero(&self.vars);
        r.add_term(e.iter().map(|v| -v).collect(), F::one() / c.clone());
        Some(r)
    }

    /// Moves into a ring containing every occurring variable (by name).
    pub fn embed(&self, target: &Vars) -> Option<Self> {
        let map: Vec<Option<usize>> = self
            .vars
            .iter()
            .map(|n| target.iter().position(|t| t == n))
            .collect();
        let mut r = Self::zero(target);
        for (e, c) in &self.terms {
            let mut ne = vec![0; target.len()];
            for (i, &v) in e.iter().enumerate() {
                match map[i] {
                    Some(j) => ne[j] += v,
                    None if v != 0 => return None,
                    None => {}
                }
            }
            r.add_term(ne, c.clone());
        }
        Some(r)
    }

    /// Expression string in the input grammar (negative powers as
    /// `w^-2`).
    pub fn to_expr(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (idx, (e, c)) in self.terms.iter().rev().enumerate() {
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &v)| v != 0)
                .map(|(i, &v)| {
                    if v == 1 {
                        self.vars[i].clone()
                    } else {
                        format!("{}^{}", self.vars[i], v)
                    }
                })
                .collect();
            let neg = c.is_negative_literal();
            let mag = if neg { -c.clone() } else { c.clone() };
            let body = if mono.is_empty() {
                mag.to_expr()
            } else if mag.is_one() {
                mono.join("*")
            } else {
                format!("{}*{}", mag.to_expr(), mono.join("*"))
            };
            if idx == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            out.push_str(&body);
        }
        out
    }
}

impl<F: Field> fmt::Display for LaurentPoly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_expr())
    }
}
