//! The first Painlevé hierarchy.
//!
//! The operators `L_j` are generated in the differential-polynomial ring
//! with symbols `x⁽⁰⁾, x⁽¹⁾, …` and derivation `D x⁽ⁱ⁾ = x⁽ⁱ⁺¹⁾`:
//!
//! ```text
//! D L_{j+1} = (D³ − 8 x D − 4 x′) L_j,   L_0 = 1,
//! ```
//!
//! each `L_{j+1}` being recovered by exact antidifferentiation. The `m`-th
//! member of the hierarchy is `L_{m+1}[x] = −4z`, i.e.
//! `x⁽²ᵐ⁾ = P_m(x, …, x⁽²ᵐ⁻²⁾) + z` with `P_m = x⁽²ᵐ⁾ + L_{m+1}/4`; as a first
//! order system in `x_i = x⁽ⁱ⁻¹⁾` it carries the weights `(2, 3, …, 2m+3)`.
//!
//! Besides the system itself the module provides the closed-form exponent
//! lists, the `A_j`/`B_j` recursion whose last member vanishes exactly at
//! the exponents, and a three-way cross validation against the Kovalevskaya
//! matrix route.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::balances::Balance;
use crate::error::{KovaError, Result};
use crate::kovalevskaya::kov_matrix;
use crate::poly::{vars, vars_owned, MultiPoly, Vars};
use crate::roots::{
    dense_degree, dense_divrem, dense_gcd, dense_monic, dense_mul, dense_trim, extract_roots,
};
use crate::scalar::{int, rat};
use crate::system::{WeightVector, WeightedSystem};
use crate::{QPoly, QRootSet, QSystem, Rational};

/// Largest hierarchy index generated by default.
pub const M_CAP: usize = 6;

/// A generated member of the hierarchy.
#[derive(Clone, Debug)]
pub struct HierarchyInstance {
    /// Hierarchy index.
    pub m: usize,
    /// `P_m` in the variables `x1 … x{2m−1}`.
    pub p_m: QPoly,
    /// The first-order system.
    pub system: QSystem,
    /// Leading coefficients `c(k)`, `k = 1 … m`.
    pub balances: Vec<Vec<Rational>>,
}

/// The differential-polynomial ring with symbols `x⁽⁰⁾ … x⁽ⁿ⁾`.
pub fn diff_ring(n: usize) -> Vars {
    vars_owned((0..=n).map(|i| format!("x{i}")).collect())
}

/// Total derivative `D` (requires the top symbol to be absent).
pub fn total_derivative(p: &QPoly) -> Result<QPoly> {
    let n = p.nvars() - 1;
    if p.involves(n) {
        return Err(KovaError::Internal(
            "differential ring too small for derivative".into(),
        ));
    }
    let mut out = MultiPoly::zero(p.vars());
    for i in 0..n {
        let d = p.deriv(i);
        if !d.is_zero() {
            out = out.add(&d.mul(&MultiPoly::var(p.vars(), i + 1)));
        }
    }
    Ok(out)
}

/// Exact antiderivative `F` with `D F = e` (constant of integration 0);
/// errors when `e` is not a total derivative.
pub fn antiderivative(e: &QPoly) -> Result<QPoly> {
    let mut rest = e.clone();
    let mut acc = MultiPoly::zero(e.vars());
    let n = e.nvars();
    while !rest.is_zero() {
        let h = (0..n)
            .rev()
            .find(|&i| rest.involves(i))
            .ok_or_else(|| KovaError::Internal("constant is not a total derivative".into()))?;
        if h == 0 {
            return Err(KovaError::Internal(
                "expression in x alone is not a total derivative".into(),
            ));
        }
        let coeffs = rest.coeffs_in(h);
        if coeffs.len() > 2 {
            return Err(KovaError::Internal(format!(
                "expression is nonlinear in x{h}; not a total derivative"
            )));
        }
        let f1 = coeffs[1].integrate(h - 1);
        acc = acc.add(&f1);
        rest = rest.sub(&total_derivative(&f1)?);
    }
    if total_derivative(&acc)? != *e {
        return Err(KovaError::Internal("antiderivative verification failed".into()));
    }
    Ok(acc)
}

/// The operators `L_0 … L_n` in the ring `x⁽⁰⁾ … x⁽²ⁿ⁺¹⁾`.
pub fn operators(n: usize) -> Result<Vec<QPoly>> {
    let ring = diff_ring(2 * n + 1);
    let x = MultiPoly::var(&ring, 0);
    let x1 = MultiPoly::var(&ring, 1);
    let mut ls = vec![MultiPoly::constant(&ring, BigRational::one())];
    for j in 0..n {
        let l = &ls[j];
        let d1 = total_derivative(l)?;
        let d3 = total_derivative(&total_derivative(&d1)?)?;
        let e = d3
            .sub(&x.mul(&d1).scale(&int(8)))
            .sub(&x1.mul(l).scale(&int(4)));
        ls.push(antiderivative(&e)?);
    }
    Ok(ls)
}

/// Generates the `m`-th member of the hierarchy.
pub fn generate(m: usize) -> Result<HierarchyInstance> {
    if m == 0 || m > M_CAP {
        return Err(KovaError::Precondition(format!(
            "hierarchy index must be in 1..={M_CAP}, got {m}"
        )));
    }
    let ls = operators(m + 1)?;
    let l = &ls[m + 1];
    let top = MultiPoly::var(l.vars(), 2 * m);
    // L_{m+1} = −4 (x⁽²ᵐ⁾ − P_m)
    let p_diff = top.add(&l.scale(&rat(1, 4)));
    if p_diff.involves(2 * m) || (2 * m + 1..p_diff.nvars()).any(|i| p_diff.involves(i)) {
        return Err(KovaError::Internal(format!(
            "L_{} is not of the form −4(x^({}) − P)",
            m + 1,
            2 * m
        )));
    }
    let n = 2 * m;
    let state: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    let pm_ring = vars_owned(state[..n - 1].to_vec());
    // Rename x⁽ⁱ⁾ ↦ x_{i+1}.
    let images: Vec<QPoly> = (0..p_diff.nvars())
        .map(|i| {
            if i < n - 1 {
                MultiPoly::var(&pm_ring, i)
            } else {
                MultiPoly::zero(&pm_ring)
            }
        })
        .collect();
    let p_m = p_diff.substitute(&images);
    let mut sys_ring_names = state.clone();
    sys_ring_names.push("z".into());
    let sys_ring = vars_owned(sys_ring_names);
    let mut rhs: Vec<QPoly> = (1..n).map(|i| MultiPoly::var(&sys_ring, i)).collect();
    rhs.push(p_m.embed(&sys_ring)?.add(&MultiPoly::var(&sys_ring, n)));
    let p: Vec<i64> = (2..=(n as i64 + 1)).collect();
    let weight = WeightVector::new(p, n as i64 + 2, n as i64 + 3)?;
    let system = WeightedSystem::from_rhs(&format!("p1-hierarchy-{m}"), &state, weight, rhs)?;
    let balances = (1..=m).map(|k| closed_form_balance(m, k)).collect();
    Ok(HierarchyInstance {
        m,
        p_m,
        system,
        balances,
    })
}

/// `c_j(k) = (−1)^{j+1} j! · k(k+1)/2`, `j = 1 … 2m`.
pub fn closed_form_balance(m: usize, k: usize) -> Vec<Rational> {
    let b0 = rat((k * (k + 1)) as i64, 2);
    let mut fact = BigInt::one();
    (1..=2 * m)
        .map(|j| {
            fact *= BigInt::from(j);
            let sign = if j % 2 == 1 { 1 } else { -1 };
            BigRational::from_integer(fact.clone() * sign) * &b0
        })
        .collect()
}

/// The four arithmetic progressions of the closed-form exponent list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosedFormExponents {
    /// Hierarchy index.
    pub m: usize,
    /// Balance index.
    pub k: usize,
    /// `2, 4, …, 2m−2k`.
    pub evens: Vec<i64>,
    /// `2k+3, 2k+5, …, 2m+1`.
    pub odds: Vec<i64>,
    /// `2m+4, 2m+6, …, 2m+2k+2`.
    pub high: Vec<i64>,
    /// `−1, −3, …, −(2k−1)`.
    pub negative: Vec<i64>,
}

impl ClosedFormExponents {
    /// All `2m` exponents, sorted ascending.
    pub fn sorted(&self) -> Vec<i64> {
        let mut v: Vec<i64> = self
            .evens
            .iter()
            .chain(&self.odds)
            .chain(&self.high)
            .chain(&self.negative)
            .copied()
            .collect();
        v.sort();
        v
    }
}

/// Closed-form exponents of balance `k` of member `m`.
pub fn closed_form_exponents(m: usize, k: usize) -> Result<ClosedFormExponents> {
    if k == 0 || k > m {
        return Err(KovaError::Precondition(format!(
            "balance index must be in 1..={m}, got {k}"
        )));
    }
    let (m, k) = (m as i64, k as i64);
    Ok(ClosedFormExponents {
        m: m as usize,
        k: k as usize,
        evens: (1..=m - k).map(|i| 2 * i).collect(),
        odds: (0..m - k).map(|i| 2 * k + 3 + 2 * i).collect(),
        high: (0..k).map(|i| 2 * m + 4 + 2 * i).collect(),
        negative: (1..=k).map(|i| -(2 * i - 1)).collect(),
    })
}

/// `A_j` by the closed form `(−1)^j 2^j (2j−1)!! (k+j)! / (j! (k−j)!)` for
/// `j ≤ k`, and 0 beyond.
pub fn a_closed(k: usize, j: usize) -> Rational {
    if j > k {
        return BigRational::zero();
    }
    if j == 0 {
        return BigRational::one();
    }
    let fact = |n: usize| -> BigInt { (1..=n).fold(BigInt::one(), |a, i| a * BigInt::from(i)) };
    let dfact = (1..=2 * j - 1)
        .step_by(2)
        .fold(BigInt::one(), |a, i| a * BigInt::from(i));
    let sign: i64 = if j % 2 == 0 { 1 } else { -1 };
    let num = BigInt::from(sign) * (BigInt::one() << j) * dfact * fact(k + j);
    BigRational::new(num, fact(j) * fact(k - j))
}

/// `A_j` by the product recursion
/// `A_{j+1} = −4b₀ Π_{l=1}^{j} 4(2l+1)/(l+1) · (l(l+1)/2 − b₀)`.
pub fn a_product(k: usize, j: usize) -> Rational {
    if j == 0 {
        return BigRational::one();
    }
    let b0 = rat((k * (k + 1)) as i64, 2);
    let mut acc = -b0.clone() * int(4);
    for l in 1..j {
        let l = l as i64;
        acc = acc * rat(4 * (2 * l + 1), l + 1) * (rat(l * (l + 1), 2) - &b0);
    }
    acc
}

/// A rational function of λ as a reduced pair of dense polynomials.
#[derive(Clone, Debug)]
struct RatFn {
    num: Vec<Rational>,
    den: Vec<Rational>,
}

impl RatFn {
    fn poly(p: Vec<Rational>) -> Self {
        RatFn {
            num: dense_trim(p),
            den: vec![BigRational::one()],
        }
    }

    fn reduce(num: Vec<Rational>, den: Vec<Rational>) -> Self {
        let num = dense_trim(num);
        if dense_degree(&num).is_none() {
            return RatFn::poly(vec![BigRational::zero()]);
        }
        let g = dense_gcd(&num, &den);
        let n = dense_divrem(&num, &g).expect("gcd nonzero").0;
        let d = dense_divrem(&den, &g).expect("gcd nonzero").0;
        let lc = d[dense_degree(&d).expect("nonzero")].clone();
        RatFn {
            num: n.iter().map(|c| c / &lc).collect(),
            den: dense_monic(&d),
        }
    }

    fn add(&self, o: &RatFn) -> RatFn {
        let a = dense_mul(&self.num, &o.den);
        let b = dense_mul(&o.num, &self.den);
        let n = a.len().max(b.len());
        let sum: Vec<Rational> = (0..n)
            .map(|i| {
                a.get(i).cloned().unwrap_or_else(BigRational::zero)
                    + b.get(i).cloned().unwrap_or_else(BigRational::zero)
            })
            .collect();
        RatFn::reduce(sum, dense_mul(&self.den, &o.den))
    }

    fn mul(&self, o: &RatFn) -> RatFn {
        RatFn::reduce(dense_mul(&self.num, &o.num), dense_mul(&self.den, &o.den))
    }
}

/// `λ − a` as a dense polynomial.
fn lin(a: i64) -> Vec<Rational> {
    vec![int(-a), BigRational::one()]
}

/// Result of the `B_j` recursion.
#[derive(Clone, Debug)]
pub struct RecursionExponents {
    /// Hierarchy index.
    pub m: usize,
    /// Balance index.
    pub k: usize,
    /// `A_0 … A_m` (closed form, validated against the product recursion).
    pub a: Vec<Rational>,
    /// `B_{m+1}(λ)` (a polynomial after cancellation).
    pub b: QPoly,
    /// Roots of `B_{m+1}`.
    pub roots: QRootSet,
}

/// Runs the `B_j` recursion exactly and returns `B_{j_max}` for
/// `j_max = upto + 1` as a reduced rational function.
fn b_recursion(k: usize, upto: usize) -> Result<(Vec<Rational>, Vec<Rational>)> {
    let b0 = rat((k * (k + 1)) as i64, 2);
    let mut b = RatFn::poly(vec![BigRational::zero()]);
    for j in 0..=upto {
        let a_j = a_closed(k, j);
        let jj = j as i64;
        let kk = k as i64;
        let den = lin(2 * jj + 2);
        let pnum = dense_mul(
            &dense_mul(&lin(2 * jj + 2 * kk + 2), &lin(2 * jj + 1)),
            &lin(2 * jj - 2 * kk),
        );
        let p = RatFn::reduce(pnum, den.clone());
        let qnum: Vec<Rational> = lin(4 * jj + 2)
            .iter()
            .map(|c| -c * int(4) * &b0 * &a_j)
            .collect();
        let q = RatFn::reduce(qnum, den);
        b = p.mul(&b).add(&q);
    }
    Ok((b.num, b.den))
}

/// Exponents of balance `k` of member `m` via the `B_j` recursion.
pub fn recursion_exponents(m: usize, k: usize) -> Result<RecursionExponents> {
    if k == 0 || k > m {
        return Err(KovaError::Precondition(format!(
            "balance index must be in 1..={m}, got {k}"
        )));
    }
    let a: Vec<Rational> = (0..=m).map(|j| a_closed(k, j)).collect();
    for (j, aj) in a.iter().enumerate() {
        if *aj != a_product(k, j) {
            return Err(KovaError::Internal(format!(
                "closed form of A_{j} disagrees with the product recursion"
            )));
        }
    }
    let (num, den) = b_recursion(k, m)?;
    if dense_degree(&den) != Some(0) {
        return Err(KovaError::Internal(format!(
            "B_{} did not reduce to a polynomial",
            m + 1
        )));
    }
    let lam = vars(&["lambda"]);
    let b = MultiPoly::from_dense(&lam, &num);
    let roots = extract_roots(&b)?;
    Ok(RecursionExponents { m, k, a, b, roots })
}

/// Checks that `B_{k+1}` is divisible by `(λ−(2k+4))(λ−(2k+6))⋯(λ−(4k+2))`.
pub fn b_factor_check(k: usize) -> Result<bool> {
    let (num, den) = b_recursion(k, k)?;
    if dense_degree(&den) != Some(0) {
        return Ok(false);
    }
    let mut f = vec![BigRational::one()];
    for i in 0..k as i64 {
        f = dense_mul(&f, &lin(2 * k as i64 + 4 + 2 * i));
    }
    let (_, r) = dense_divrem(&num, &f)?;
    Ok(dense_degree(&r).is_none())
}

/// The function `F(l)` from the vanishing argument for the roots
/// `λ = 4k+2−2n` of `B_{k+1}`.
pub fn f_term(k: usize, n: usize, l: usize) -> Rational {
    let (k, n, l) = (k as i64, n as i64, l as i64);
    let fact = |v: i64| -> BigInt { (1..=v).fold(BigInt::one(), |a, i| a * BigInt::from(i)) };
    let dfact = |v: i64| -> BigInt {
        (1..=v)
            .rev()
            .step_by(2)
            .fold(BigInt::one(), |a, i| a * BigInt::from(i))
    };
    let mut val = rat(2 * l - n, k + l - n)
        * BigRational::new(dfact(2 * k - 2 * l - 1) * fact(2 * k - l), fact(k - l) * fact(l));
    for j in (k - l + 1)..=k {
        val = val * rat((j + n - k) * (4 * k - 2 * n - 2 * j + 1) * (3 * k - n - j + 1), 2 * k - n - j);
    }
    val
}

/// Checks `F(l) = −F(n−l)` for all `0 ≤ l ≤ n` and every `n < k`.
pub fn f_antisymmetry(k: usize) -> bool {
    (0..k).all(|n| (0..=n).all(|l| f_term(k, n, l) == -f_term(k, n, n - l)))
}

/// Outcome of the three-route comparison for one balance.
#[derive(Clone, Debug)]
pub struct CrossValidation {
    /// Balance index.
    pub k: usize,
    /// Exponents from the Kovalevskaya matrix (sorted).
    pub kmatrix: Vec<Rational>,
    /// Closed-form exponents (sorted).
    pub closed: Vec<i64>,
    /// Roots of `B_{m+1}` (sorted, with multiplicity).
    pub recursion: Vec<Rational>,
    /// Whether the three multisets coincide exactly.
    pub agree: bool,
    /// Whether the multiset is invariant under `λ ↦ 2m+3−λ`.
    pub reflection_symmetric: bool,
}

/// Reflection symmetry `multiset(λ) = multiset(h − λ)`.
pub fn reflection_symmetric(ex: &[Rational], h: i64) -> bool {
    let mut a = ex.to_vec();
    let mut b: Vec<Rational> = ex.iter().map(|l| int(h) - l).collect();
    a.sort();
    b.sort();
    a == b
}

/// Compares the Kovalevskaya-matrix, closed-form and recursion routes for
/// every balance of member `m`.
pub fn cross_validate(m: usize) -> Result<Vec<CrossValidation>> {
    let inst = generate(m)?;
    let h = 2 * m as i64 + 3;
    let mut out = Vec::new();
    for k in 1..=m {
        let b = Balance::new(&inst.system, inst.balances[k - 1].clone())?;
        let kd = kov_matrix(&inst.system, &b)?;
        let mut kmat = kd.exponents.exact_multiset();
        kmat.sort();
        let closed = closed_form_exponents(m, k)?.sorted();
        let rec = recursion_exponents(m, k)?;
        let mut b_roots = rec.roots.exact_multiset();
        b_roots.sort();
        let recursion = b_roots.clone();
        let closed_q: Vec<Rational> = closed.iter().map(|&v| int(v)).collect();
        let agree = rec.roots.is_split()
            && kd.exponents.is_split()
            && kmat == closed_q
            && recursion == closed_q;
        out.push(CrossValidation {
            k,
            reflection_symmetric: reflection_symmetric(&kmat, h),
            kmatrix: kmat,
            closed,
            recursion,
            agree,
        });
    }
    Ok(out)
}
