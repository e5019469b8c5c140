//! Root extraction for univariate polynomials.
//!
//! Rational roots are found exactly (rational-root theorem on the cleared
//! integer polynomial, multiplicities by repeated exact division). What is
//! left is split into square-free layers (Yun's algorithm, exact), and each
//! layer is solved numerically by simultaneous Durand–Kerner iteration with
//! a Newton polish; multiplicities come from the layer index, so the numeric
//! iteration only ever sees simple roots.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{KovaError, Result};
use crate::poly::MultiPoly;
use crate::scalar::Field;

/// Iteration cap of the simultaneous root iteration.
pub const DK_MAX_ITER: usize = 200;
/// Step-size convergence threshold of the simultaneous root iteration.
pub const DK_STEP_TOL: f64 = 1e-14;
/// Distance under which numeric roots are merged into one cluster.
pub const CLUSTER_TOL: f64 = 1e-8;
/// Relative residual bound a numeric root must satisfy.
pub const RESIDUAL_TOL: f64 = 1e-10;

/// Roots of a univariate polynomial: exact rationals plus numeric
/// approximations of the roots of the residual factor.
#[derive(Clone, Debug, PartialEq)]
pub struct RootSet<F: Field> {
    /// Exact roots in the coefficient field with multiplicities.
    pub exact_roots: Vec<(F, usize)>,
    /// Factor left after dividing out the exact roots (monic).
    pub residual_factor: MultiPoly<F>,
    /// Numeric roots of the residual factor with multiplicities.
    pub numeric_roots: Vec<(Complex64, usize)>,
    /// Whether every numeric root passed the residual bound.
    pub numeric_verified: bool,
}

impl<F: Field> RootSet<F> {
    /// Degree accounted for by all roots.
    pub fn total_multiplicity(&self) -> usize {
        self.exact_roots.iter().map(|r| r.1).sum::<usize>()
            + self.numeric_roots.iter().map(|r| r.1).sum::<usize>()
    }

    /// Every root as a complex number, repeated by multiplicity, exact roots
    /// first.
    pub fn all_complex(&self) -> Vec<Complex64> {
        let mut out = Vec::new();
        for (r, m) in &self.exact_roots {
            for _ in 0..*m {
                out.push(r.to_complex());
            }
        }
        for (r, m) in &self.numeric_roots {
            for _ in 0..*m {
                out.push(*r);
            }
        }
        out
    }

    /// Whether every root is exact.
    pub fn is_split(&self) -> bool {
        self.numeric_roots.is_empty()
    }

    /// The exact roots repeated by multiplicity.
    pub fn exact_multiset(&self) -> Vec<F> {
        let mut out = Vec::new();
        for (r, m) in &self.exact_roots {
            for _ in 0..*m {
                out.push(r.clone());
            }
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Dense univariate helpers (coefficients lowest degree first).

/// Removes trailing zero coefficients.
pub fn dense_trim<F: Field>(mut p: Vec<F>) -> Vec<F> {
    while p.len() > 1 && p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    if p.is_empty() {
        p.push(F::zero());
    }
    p
}

/// Degree (`None` for the zero polynomial).
pub fn dense_degree<F: Field>(p: &[F]) -> Option<usize> {
    p.iter().rposition(|c| !c.is_zero())
}

/// Evaluation by Horner's rule.
pub fn dense_eval<F: Field>(p: &[F], x: &F) -> F {
    let mut acc = F::zero();
    for c in p.iter().rev() {
        acc = acc * x.clone() + c.clone();
    }
    acc
}

/// Product.
pub fn dense_mul<F: Field>(a: &[F], b: &[F]) -> Vec<F> {
    let mut out = vec![F::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j].clone() + x.clone() * y.clone();
        }
    }
    dense_trim(out)
}

/// Derivative.
pub fn dense_deriv<F: Field>(p: &[F]) -> Vec<F> {
    if p.len() <= 1 {
        return vec![F::zero()];
    }
    dense_trim(
        p.iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c.clone() * F::from_i64(k as i64))
            .collect(),
    )
}

/// Euclidean division `a = q·b + r`.
pub fn dense_divrem<F: Field>(a: &[F], b: &[F]) -> Result<(Vec<F>, Vec<F>)> {
    let db = dense_degree(b).ok_or(KovaError::ZeroPolynomial)?;
    let mut r: Vec<F> = a.to_vec();
    let da = match dense_degree(a) {
        Some(d) if d >= db => d,
        _ => return Ok((vec![F::zero()], dense_trim(r))),
    };
    let mut q = vec![F::zero(); da - db + 1];
    let lead = b[db].clone();
    for k in (0..=da - db).rev() {
        let c = r[k + db].clone() / lead.clone();
        if c.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate().take(db + 1) {
            r[k + j] = r[k + j].clone() - c.clone() * bj.clone();
        }
        q[k] = c;
    }
    Ok((dense_trim(q), dense_trim(r)))
}

/// Monic normalisation.
pub fn dense_monic<F: Field>(p: &[F]) -> Vec<F> {
    match dense_degree(p) {
        None => vec![F::zero()],
        Some(d) => {
            let l = p[d].clone();
            p[..=d].iter().map(|c| c.clone() / l.clone()).collect()
        }
    }
}

/// Monic greatest common divisor (exact fields).
pub fn dense_gcd<F: Field>(a: &[F], b: &[F]) -> Vec<F> {
    let mut x = dense_trim(a.to_vec());
    let mut y = dense_trim(b.to_vec());
    while dense_degree(&y).is_some() {
        let (_, r) = dense_divrem(&x, &y).expect("nonzero divisor");
        x = y;
        y = r;
    }
    dense_monic(&x)
}

/// Square-free decomposition `p = lc · Π_i q_i^i` (Yun). Returns `(i, q_i)`
/// for non-constant `q_i`.
pub fn square_free_layers<F: Field>(p: &[F]) -> Vec<(usize, Vec<F>)> {
    let p = dense_monic(p);
    let mut out = Vec::new();
    if dense_degree(&p).unwrap_or(0) == 0 {
        return out;
    }
    let dp = dense_deriv(&p);
    let a0 = dense_gcd(&p, &dp);
    let mut b = dense_divrem(&p, &a0).expect("gcd nonzero").0;
    let mut c = dense_divrem(&dp, &a0).expect("gcd nonzero").0;
    let mut d = sub_dense(&c, &dense_deriv(&b));
    let mut i = 1;
    while dense_degree(&b).unwrap_or(0) > 0 {
        let a = dense_gcd(&b, &d);
        if dense_degree(&a).unwrap_or(0) > 0 {
            out.push((i, a.clone()));
        }
        b = dense_divrem(&b, &a).expect("gcd nonzero").0;
        c = dense_divrem(&d, &a).expect("gcd nonzero").0;
        d = sub_dense(&c, &dense_deriv(&b));
        i += 1;
    }
    out
}

fn sub_dense<F: Field>(a: &[F], b: &[F]) -> Vec<F> {
    let n = a.len().max(b.len());
    dense_trim(
        (0..n)
            .map(|k| {
                a.get(k).cloned().unwrap_or_else(F::zero) - b.get(k).cloned().unwrap_or_else(F::zero)
            })
            .collect(),
    )
}

// ---------------------------------------------------------------------------
// Numeric root finding.

/// Simultaneous (Durand–Kerner) iteration for the roots of a polynomial with
/// complex coefficients, followed by Newton polishing. Returns the roots
/// (not clustered) and whether the step size converged.
pub fn durand_kerner(coeffs: &[Complex64]) -> (Vec<Complex64>, bool) {
    let deg = match coeffs.iter().rposition(|c| c.norm() > 0.0) {
        Some(d) => d,
        None => return (Vec::new(), true),
    };
    if deg == 0 {
        return (Vec::new(), true);
    }
    let lead = coeffs[deg];
    let monic: Vec<Complex64> = coeffs[..=deg].iter().map(|c| c / lead).collect();
    let eval = |x: Complex64| -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in monic.iter().rev() {
            acc = acc * x + c;
        }
        acc
    };
    // Cauchy bound for the initial circle.
    let radius = 1.0
        + monic[..deg]
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..deg)
        .map(|k| Complex64::from_polar(radius, 0.4 + 2.0 * std::f64::consts::PI * k as f64 / deg as f64))
        .collect();
    let mut converged = false;
    for _ in 0..DK_MAX_ITER {
        let mut max_step: f64 = 0.0;
        for i in 0..deg {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..deg {
                if i != j {
                    denom *= z[i] - z[j];
                }
            }
            if denom.norm() == 0.0 {
                denom = Complex64::new(1e-300, 0.0);
            }
            let step = eval(z[i]) / denom;
            z[i] -= step;
            max_step = max_step.max(step.norm() / (1.0 + z[i].norm()));
        }
        if max_step < DK_STEP_TOL {
            converged = true;
            break;
        }
    }
    // Newton polish on each simple root.
    let deriv: Vec<Complex64> = monic
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c * k as f64)
        .collect();
    let eval_d = |x: Complex64| -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in deriv.iter().rev() {
            acc = acc * x + c;
        }
        acc
    };
    for zi in z.iter_mut() {
        for _ in 0..5 {
            let d = eval_d(*zi);
            if d.norm() == 0.0 {
                break;
            }
            let step = eval(*zi) / d;
            *zi -= step;
            if step.norm() < DK_STEP_TOL * (1.0 + zi.norm()) {
                break;
            }
        }
    }
    (z, converged)
}

/// Groups numeric roots closer than [`CLUSTER_TOL`], averaging each cluster.
pub fn cluster_roots(roots: &[Complex64], base_mult: usize) -> Vec<(Complex64, usize)> {
    let mut out: Vec<(Complex64, usize, usize)> = Vec::new();
    for &r in roots {
        if let Some(slot) = out
            .iter_mut()
            .find(|(c, _, n)| (c / *n as f64 - r).norm() < CLUSTER_TOL)
        {
            slot.0 += r;
            slot.1 += base_mult;
            slot.2 += 1;
        } else {
            out.push((r, base_mult, 1));
        }
    }
    let mut v: Vec<(Complex64, usize)> = out
        .into_iter()
        .map(|(s, m, n)| (s / n as f64, m))
        .collect();
    sort_complex(&mut v);
    v
}

fn sort_complex(v: &mut [(Complex64, usize)]) {
    v.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));
}

/// Numeric roots (with multiplicities) of a polynomial over any exact field:
/// exact square-free layering followed by simultaneous iteration per layer.
/// Returns the roots and whether all passed the residual bound against `p`.
pub fn numeric_roots<F: Field>(p: &[F]) -> (Vec<(Complex64, usize)>, bool) {
    let layers = if F::is_exact() {
        square_free_layers(p)
    } else {
        vec![(1, dense_monic(p))]
    };
    let full: Vec<Complex64> = p.iter().map(Field::to_complex).collect();
    let scale = full.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut all = Vec::new();
    let mut ok = true;
    for (mult, q) in layers {
        let qc: Vec<Complex64> = q.iter().map(Field::to_complex).collect();
        let (roots, _) = durand_kerner(&qc);
        let qscale = qc.iter().map(|c| c.norm()).fold(0.0, f64::max);
        for r in &roots {
            // The square-free layer must vanish to working precision; the
            // full polynomial vanishes to (multiplicity)-th order.
            let mut acc = Complex64::new(0.0, 0.0);
            for c in qc.iter().rev() {
                acc = acc * r + c;
            }
            if acc.norm() > RESIDUAL_TOL * qscale.max(1.0) * (1.0 + r.norm()).powi(qc.len() as i32 - 1).max(1.0) {
                ok = false;
            }
        }
        all.extend(cluster_roots(&roots, mult));
    }
    let _ = scale;
    sort_complex(&mut all);
    (all, ok)
}

// ---------------------------------------------------------------------------
// Exact rational roots.

fn divisors(n: &BigInt) -> Option<Vec<BigInt>> {
    let n = n.abs();
    if n.is_zero() {
        return None;
    }
    // Trial-division factorisation; give up on huge cofactors.
    let mut factors: Vec<(BigInt, u32)> = Vec::new();
    let mut m = n.clone();
    let mut d = BigInt::from(2u32);
    let limit = BigInt::from(2_000_000u64);
    while &d * &d <= m {
        if d > limit {
            return None;
        }
        let mut e = 0;
        while (&m % &d).is_zero() {
            m /= &d;
            e += 1;
        }
        if e > 0 {
            factors.push((d.clone(), e));
        }
        d += 1;
    }
    if m > BigInt::one() {
        factors.push((m, 1));
    }
    let mut divs = vec![BigInt::one()];
    for (p, e) in factors {
        let mut next = Vec::new();
        for dv in &divs {
            let mut pw = BigInt::one();
            for _ in 0..=e {
                next.push(dv * &pw);
                pw *= &p;
            }
        }
        divs = next;
    }
    divs.sort();
    Some(divs)
}

/// Clears denominators, returning primitive integer coefficients.
pub fn integer_coefficients(p: &[BigRational]) -> Vec<BigInt> {
    let l = p
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = p.iter().map(|c| (c * &l).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    if g.is_zero() {
        ints
    } else {
        ints.into_iter().map(|c| c / &g).collect()
    }
}

fn rational_root_candidates(p: &[BigRational]) -> Vec<BigRational> {
    let ints = integer_coefficients(p);
    let deg = match ints.iter().rposition(|c| !c.is_zero()) {
        Some(d) => d,
        None => return Vec::new(),
    };
    let low = ints.iter().position(|c| !c.is_zero()).unwrap_or(0);
    let a0 = &ints[low];
    let an = &ints[deg];
    let mut cands = Vec::new();
    match (divisors(a0), divisors(an)) {
        (Some(num), Some(den)) => {
            for n in &num {
                for d in &den {
                    let q = BigRational::new(n.clone(), d.clone());
                    cands.push(q.clone());
                    cands.push(-q);
                }
            }
        }
        _ => {
            // Coefficients too large to factor: numerically guided candidates.
            let pc: Vec<Complex64> = p.iter().map(Field::to_complex).collect();
            let (roots, _) = durand_kerner(&pc);
            for r in roots {
                if r.im.abs() < 1e-6 * (1.0 + r.re.abs()) {
                    if let Some(q) = rationalize(r.re, 1_000_000) {
                        cands.push(q);
                    }
                }
            }
        }
    }
    cands.sort();
    cands.dedup();
    cands
}

/// Best rational approximation with denominator at most `cap`
/// (continued fractions).
pub fn rationalize(x: f64, cap: i64) -> Option<BigRational> {
    if !x.is_finite() {
        return None;
    }
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut v = x;
    for _ in 0..64 {
        let a = v.floor();
        if a.abs() > 1e15 {
            break;
        }
        let ai = a as i128;
        let h2 = ai * h1 + h0;
        let k2 = ai * k1 + k0;
        if k2 > cap as i128 {
            break;
        }
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        let frac = v - a;
        if frac.abs() < 1e-12 {
            break;
        }
        v = 1.0 / frac;
    }
    if k1 == 0 {
        return None;
    }
    Some(BigRational::new(BigInt::from(h1), BigInt::from(k1)))
}

/// Exact rational roots plus numeric roots of the remaining factor.
pub fn extract_roots(p: &MultiPoly<BigRational>) -> Result<RootSet<BigRational>> {
    if p.is_zero() {
        return Err(KovaError::ZeroPolynomial);
    }
    if p.nvars() != 1 {
        return Err(KovaError::Dimension(
            "root extraction needs a univariate polynomial".into(),
        ));
    }
    let dense = dense_monic(&p.to_dense());
    if dense_degree(&dense).unwrap_or(0) == 0 {
        return Err(KovaError::Precondition(
            "root extraction needs degree at least 1".into(),
        ));
    }
    let mut rest = dense;
    let mut exact = Vec::new();
    // Zero roots first.
    let mut zero_mult = 0;
    while rest.len() > 1 && rest[0].is_zero() {
        rest.remove(0);
        zero_mult += 1;
    }
    if zero_mult > 0 {
        exact.push((BigRational::zero(), zero_mult));
    }
    for cand in rational_root_candidates(&rest) {
        let mut mult = 0;
        loop {
            if dense_degree(&rest).unwrap_or(0) == 0 {
                break;
            }
            if !dense_eval(&rest, &cand).is_zero() {
                break;
            }
            let lin = vec![-cand.clone(), BigRational::one()];
            rest = dense_divrem(&rest, &lin)?.0;
            mult += 1;
        }
        if mult > 0 {
            exact.push((cand, mult));
        }
    }
    exact.sort_by(|a, b| a.0.cmp(&b.0));
    let (numeric, ok) = if dense_degree(&rest).unwrap_or(0) > 0 {
        numeric_roots(&rest)
    } else {
        (Vec::new(), true)
    };
    Ok(RootSet {
        exact_roots: exact,
        residual_factor: MultiPoly::from_dense(p.vars(), &rest),
        numeric_roots: numeric,
        numeric_verified: ok,
    })
}

/// Roots of a polynomial over an arbitrary exact field. Coefficients that
/// all lie in ℚ take the exact route of [`extract_roots`]; otherwise every
/// root is reported numerically.
pub fn extract_roots_field<F: Field>(p: &MultiPoly<F>) -> Result<RootSet<F>> {
    if p.is_zero() {
        return Err(KovaError::ZeroPolynomial);
    }
    let rational: Option<MultiPoly<BigRational>> = if p.terms().all(|(_, c)| c.as_rational().is_some()) {
        Some(p.map_coeffs(|c| c.as_rational().expect("checked rational")))
    } else {
        None
    };
    if let Some(q) = rational {
        let rs = extract_roots(&q)?;
        return Ok(RootSet {
            exact_roots: rs
                .exact_roots
                .iter()
                .map(|(r, m)| (F::from_rational(r), *m))
                .collect(),
            residual_factor: rs.residual_factor.map_coeffs(F::from_rational),
            numeric_roots: rs.numeric_roots,
            numeric_verified: rs.numeric_verified,
        });
    }
    let dense = dense_monic(&p.to_dense());
    let (numeric, ok) = numeric_roots(&dense);
    Ok(RootSet {
        exact_roots: Vec::new(),
        residual_factor: MultiPoly::from_dense(p.vars(), &dense),
        numeric_roots: numeric,
        numeric_verified: ok,
    })
}

/// `|p(x)|` for a dense rational polynomial at a complex point.
pub fn residual_at(p: &[BigRational], x: Complex64) -> f64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for c in p.iter().rev() {
        acc = acc * x + c.to_complex();
    }
    acc.norm()
}

/// Converts a rational to `i64` when it is an integer in range.
pub fn as_small_integer(q: &BigRational) -> Option<i64> {
    if q.is_integer() {
        q.numer().to_i64()
    } else {
        None
    }
}
