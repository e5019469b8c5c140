//! Exact arithmetic in a simple radical extension ℚ(t), tᵖ = c.
//!
//! Values are stored in the power basis `a₀ + a₁t + … + a_{p−1}t^{p−1}`.
//! A value without a generator is a plain rational and mixes freely with any
//! extension; two values carrying *different* generators cannot be combined
//! (that would require an algebraic-number tower, which is out of scope) and
//! doing so panics.
//!
//! The generator carries a fixed complex embedding used for numeric
//! diagnostics: the real root when one exists (positive for `c > 0`), else
//! the principal complex root.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{KovaError, Result};
use crate::scalar::{format_rational, rational_root, rational_to_f64, Field};

/// The generator `t` of ℚ(t), `tᵖ = c`.
#[derive(Debug, PartialEq)]
pub struct SurdGen {
    /// Degree of the radical.
    pub p: u32,
    /// Radicand.
    pub c: BigRational,
    /// Numeric value of `t` used for embeddings.
    pub embed: Complex64,
}

impl SurdGen {
    /// Rendering of `t` in the expression grammar.
    pub fn name(&self) -> String {
        let c = format_rational(&self.c);
        let c = if self.c.is_integer() && !self.c.is_negative() {
            c
        } else {
            format!("({c})")
        };
        if self.p == 2 {
            format!("sqrt({c})")
        } else {
            format!("root({c}, {})", self.p)
        }
    }
}

/// Element of ℚ or of a radical extension ℚ(c^{1/p}).
#[derive(Clone, Debug)]
pub struct Surd {
    gen: Option<Arc<SurdGen>>,
    coeffs: Vec<BigRational>,
}

/// Handle on a radical extension; creates its elements.
#[derive(Clone, Debug)]
pub struct SurdField {
    gen: Option<Arc<SurdGen>>,
    root: Option<BigRational>,
}

impl SurdField {
    /// The extension generated by a `p`-th root of `c`. When `c` is an exact
    /// rational `p`-th power the extension collapses to ℚ and the generator
    /// is that rational root.
    pub fn new(c: &BigRational, p: u32) -> Result<SurdField> {
        if p == 0 {
            return Err(KovaError::Precondition("radical degree must be positive".into()));
        }
        if c.is_zero() {
            return Err(KovaError::Precondition("radicand must be nonzero".into()));
        }
        if let Some(r) = rational_root(c, p) {
            return Ok(SurdField {
                gen: None,
                root: Some(r),
            });
        }
        let cf = rational_to_f64(c);
        let mag = cf.abs().powf(1.0 / p as f64);
        let embed = if cf > 0.0 {
            Complex64::new(mag, 0.0)
        } else if p % 2 == 1 {
            Complex64::new(-mag, 0.0)
        } else {
            Complex64::from_polar(mag, PI / p as f64)
        };
        let field = SurdField {
            gen: Some(Arc::new(SurdGen {
                p,
                c: c.clone(),
                embed,
            })),
            root: None,
        };
        // tᵖ − c must be irreducible for the power basis to be a field; the
        // inverse of t² + … is probed through the multiplication matrix.
        if p > 2 {
            let probe = field.gen_elem() + Surd::from_rational(&BigRational::one());
            probe.try_inv()?;
        }
        Ok(field)
    }

    /// The generator `t` (a `p`-th root of `c`) as an element.
    pub fn gen_elem(&self) -> Surd {
        match (&self.gen, &self.root) {
            (Some(g), _) => {
                let mut coeffs = vec![BigRational::zero(); g.p as usize];
                if g.p == 1 {
                    coeffs[0] = g.c.clone();
                } else {
                    coeffs[1] = BigRational::one();
                }
                Surd {
                    gen: Some(g.clone()),
                    coeffs,
                }
                .normalized()
            }
            (None, Some(r)) => Surd::from_rational(r),
            (None, None) => unreachable!("surd field without generator or root"),
        }
    }

    /// Whether the extension is ℚ itself.
    pub fn is_rational(&self) -> bool {
        self.gen.is_none()
    }

    /// Generator metadata (absent for ℚ).
    pub fn generator(&self) -> Option<&Arc<SurdGen>> {
        self.gen.as_ref()
    }
}

impl Surd {
    /// The rational part when the value lies in ℚ.
    pub fn rational_part(&self) -> &BigRational {
        &self.coeffs[0]
    }

    /// Power-basis coefficients (length 1 for a rational).
    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// Generator of the extension this value lives in (if any).
    pub fn generator(&self) -> Option<&Arc<SurdGen>> {
        self.gen.as_ref()
    }

    fn normalized(self) -> Surd {
        if self.gen.is_some() && self.coeffs[1..].iter().all(Zero::is_zero) {
            Surd {
                gen: None,
                coeffs: vec![self.coeffs[0].clone()],
            }
        } else {
            self
        }
    }

    fn promote(&self, g: &Arc<SurdGen>) -> Vec<BigRational> {
        match &self.gen {
            Some(h) => {
                assert!(
                    Arc::ptr_eq(g, h) || **g == **h,
                    "arithmetic between different radical extensions is unsupported"
                );
                self.coeffs.clone()
            }
            None => {
                let mut v = vec![BigRational::zero(); g.p as usize];
                v[0] = self.coeffs[0].clone();
                v
            }
        }
    }

    fn common_gen(a: &Surd, b: &Surd) -> Option<Arc<SurdGen>> {
        a.gen.clone().or_else(|| b.gen.clone())
    }

    fn mul_impl(&self, other: &Surd) -> Surd {
        match Self::common_gen(self, other) {
            None => Surd::from_rational(&(&self.coeffs[0] * &other.coeffs[0])),
            Some(g) => {
                let a = self.promote(&g);
                let b = other.promote(&g);
                let p = g.p as usize;
                let mut out = vec![BigRational::zero(); p];
                for (i, ai) in a.iter().enumerate() {
                    if ai.is_zero() {
                        continue;
                    }
                    for (j, bj) in b.iter().enumerate() {
                        if bj.is_zero() {
                            continue;
                        }
                        let prod = ai * bj;
                        let k = i + j;
                        if k >= p {
                            out[k - p] += prod * &g.c;
                        } else {
                            out[k] += prod;
                        }
                    }
                }
                Surd {
                    gen: Some(g),
                    coeffs: out,
                }
                .normalized()
            }
        }
    }

    /// Multiplicative inverse, or an error when the value is zero or the
    /// radical polynomial is reducible.
    pub fn try_inv(&self) -> Result<Surd> {
        match &self.gen {
            None => {
                if self.coeffs[0].is_zero() {
                    Err(KovaError::Precondition("division by zero".into()))
                } else {
                    Ok(Surd::from_rational(&self.coeffs[0].recip()))
                }
            }
            Some(g) => {
                // Solve (multiplication-by-self matrix) · x = e₀.
                let p = g.p as usize;
                let mut m = vec![vec![BigRational::zero(); p + 1]; p];
                for j in 0..p {
                    let mut basis = vec![BigRational::zero(); p];
                    basis[j] = BigRational::one();
                    let col = self.mul_impl(&Surd {
                        gen: Some(g.clone()),
                        coeffs: basis,
                    });
                    let colv = col.promote(g);
                    for i in 0..p {
                        m[i][j] = colv[i].clone();
                    }
                }
                m[0][p] = BigRational::one();
                for col in 0..p {
                    let piv = (col..p).find(|&r| !m[r][col].is_zero()).ok_or_else(|| {
                        KovaError::Precondition(format!(
                            "{} does not generate a field (reducible radical) or value is zero",
                            g.name()
                        ))
                    })?;
                    m.swap(col, piv);
                    let inv = m[col][col].recip();
                    for k in col..=p {
                        m[col][k] = &m[col][k] * &inv;
                    }
                    for r in 0..p {
                        if r != col && !m[r][col].is_zero() {
                            let f = m[r][col].clone();
                            for k in col..=p {
                                let d = &f * &m[col][k];
                                m[r][k] -= d;
                            }
                        }
                    }
                }
                Ok(Surd {
                    gen: Some(g.clone()),
                    coeffs: m.into_iter().map(|row| row[p].clone()).collect(),
                }
                .normalized())
            }
        }
    }

    /// Integer power (negative exponents invert).
    pub fn powi(&self, n: i64) -> Surd {
        let base = if n < 0 {
            self.try_inv().expect("power of zero with negative exponent")
        } else {
            self.clone()
        };
        let mut k = n.unsigned_abs();
        let mut acc = Surd::one();
        let mut b = base;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul_impl(&b);
            }
            k >>= 1;
            if k > 0 {
                b = b.mul_impl(&b);
            }
        }
        acc
    }

    fn nonzero_terms(&self) -> Vec<(usize, &BigRational)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .collect()
    }
}

impl PartialEq for Surd {
    fn eq(&self, other: &Self) -> bool {
        match Self::common_gen(self, other) {
            None => self.coeffs[0] == other.coeffs[0],
            Some(g) => self.promote(&g) == other.promote(&g),
        }
    }
}

impl Zero for Surd {
    fn zero() -> Self {
        Surd {
            gen: None,
            coeffs: vec![BigRational::zero()],
        }
    }
    fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }
}

impl One for Surd {
    fn one() -> Self {
        Surd {
            gen: None,
            coeffs: vec![BigRational::one()],
        }
    }
}

impl Add for Surd {
    type Output = Surd;
    fn add(self, rhs: Surd) -> Surd {
        match Self::common_gen(&self, &rhs) {
            None => Surd::from_rational(&(&self.coeffs[0] + &rhs.coeffs[0])),
            Some(g) => {
                let a = self.promote(&g);
                let b = rhs.promote(&g);
                Surd {
                    coeffs: a.into_iter().zip(b).map(|(x, y)| x + y).collect(),
                    gen: Some(g),
                }
                .normalized()
            }
        }
    }
}

impl Sub for Surd {
    type Output = Surd;
    fn sub(self, rhs: Surd) -> Surd {
        self + (-rhs)
    }
}

impl Neg for Surd {
    type Output = Surd;
    fn neg(self) -> Surd {
        Surd {
            gen: self.gen,
            coeffs: self.coeffs.into_iter().map(|c| -c).collect(),
        }
    }
}

impl Mul for Surd {
    type Output = Surd;
    fn mul(self, rhs: Surd) -> Surd {
        self.mul_impl(&rhs)
    }
}

impl Div for Surd {
    type Output = Surd;
    fn div(self, rhs: Surd) -> Surd {
        self.mul_impl(&rhs.try_inv().expect("division by zero in radical extension"))
    }
}

impl Field for Surd {
    fn from_rational(q: &BigRational) -> Self {
        Surd {
            gen: None,
            coeffs: vec![q.clone()],
        }
    }
    fn to_complex(&self) -> Complex64 {
        match &self.gen {
            None => Complex64::new(rational_to_f64(&self.coeffs[0]), 0.0),
            Some(g) => {
                let mut acc = Complex64::new(0.0, 0.0);
                let mut pw = Complex64::new(1.0, 0.0);
                for c in &self.coeffs {
                    acc += pw * rational_to_f64(c);
                    pw *= g.embed;
                }
                acc
            }
        }
    }
    fn is_exact() -> bool {
        true
    }
    fn as_rational(&self) -> Option<BigRational> {
        if self.gen.is_none() || self.coeffs[1..].iter().all(Zero::is_zero) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }
    fn to_expr(&self) -> String {
        let terms = self.nonzero_terms();
        if terms.is_empty() {
            return "0".into();
        }
        let g = self.gen.as_ref();
        let render = |i: usize, c: &BigRational| -> String {
            if i == 0 {
                return format_rational(c);
            }
            let g = g.expect("nonrational term without generator");
            let t = if i == 1 {
                g.name()
            } else {
                format!("{}^{i}", g.name())
            };
            if c.is_one() {
                t
            } else if (-c).is_one() {
                format!("-{t}")
            } else {
                format!("{}*{t}", format_rational(c))
            }
        };
        if terms.len() == 1 {
            return render(terms[0].0, terms[0].1);
        }
        let mut s = String::from("(");
        for (k, (i, c)) in terms.iter().enumerate() {
            let part = render(*i, c);
            if k == 0 {
                s.push_str(&part);
            } else if let Some(stripped) = part.strip_prefix('-') {
                s.push_str(" - ");
                s.push_str(stripped);
            } else {
                s.push_str(" + ");
                s.push_str(&part);
            }
        }
        s.push(')');
        s
    }
    fn is_negative_literal(&self) -> bool {
        let terms = self.nonzero_terms();
        terms.len() == 1 && terms[0].1.is_negative()
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_expr())
    }
}
