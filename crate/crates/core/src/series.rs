//! Formal Laurent series solutions `xᵢ = Σ a_{i,n} T^{n−pᵢ}`, `T = z − z₀`,
//! built by the resonance recursion `(K − nI) a_n = −R_n`, together with
//! the pole-order screen for candidate leading orders.
//!
//! Coefficients live in the parameter ring `ℚ[z₀, α…]`: `z₀` is kept
//! symbolic and every consistent resonance contributes fresh generators
//! `alpha{n}` (or `alpha{n}_{k}` for multi-dimensional resonances).

use num_traits::Zero;

use crate::balances::Balance;
use crate::error::{KovaError, Result};
use crate::kovalevskaya::{kov_matrix, KovalevskayaData};
use crate::matrix::Matrix;
use crate::poly::{vars_owned, Mono, MultiPoly, Vars};
use crate::scalar::int;
use crate::{QPoly, QSystem, Rational};

/// Name of the pole-position generator.
pub const Z0: &str = "z0";
/// Name of the local variable `T = z − z₀`.
pub const T: &str = "T";

/// Status of one order of the recursion.
#[derive(Clone, Debug, PartialEq)]
pub enum ResonanceStatus {
    /// `K − nI` is invertible.
    Nonresonant,
    /// Consistent resonance: `dim` new free parameters.
    FreeParameter {
        /// Nullity of `K − nI`.
        dim: usize,
        /// Names of the new generators.
        params: Vec<String>,
        /// Nullity below the algebraic multiplicity of `n`.
        non_semisimple: bool,
    },
    /// Inconsistent resonance: a logarithmic term is required.
    LogObstruction {
        /// Left null vector `w` of `K − nI` with `w·R_n ≠ 0`.
        witness: Vec<Rational>,
        /// The nonzero compatibility polynomial `w·(−R_n)`.
        obstruction: QPoly,
    },
}

/// One entry of the resonance log.
#[derive(Clone, Debug, PartialEq)]
pub struct ResonanceEntry {
    /// Order `n`.
    pub n: usize,
    /// Status.
    pub status: ResonanceStatus,
}

/// A truncated Laurent series solution.
#[derive(Clone, Debug)]
pub struct LaurentExpansion {
    /// The balance (leading coefficients).
    pub balance: Balance,
    /// Requested order `N`.
    pub order: usize,
    /// Highest order actually computed (below `N` after an obstruction).
    pub computed: usize,
    /// Parameter ring `(z0, alpha…, T)`; coefficients are free of `T`.
    pub ring: Vars,
    /// `coeffs[n][i] = a_{i,n}`, `n = 0 … computed` (`a_{i,0} = cᵢ`).
    pub coeffs: Vec<Vec<QPoly>>,
    /// Status of every order `1 … computed` (plus the obstructed order).
    pub resonance_log: Vec<ResonanceEntry>,
    /// Number of free parameters other than `z₀`.
    pub param_count: usize,
    /// Kovalevskaya data of the balance.
    pub kovalevskaya: KovalevskayaData,
}

impl LaurentExpansion {
    /// Orders at which `K − nI` was singular.
    pub fn resonance_positions(&self) -> Vec<usize> {
        self.resonance_log
            .iter()
            .filter(|e| !matches!(e.status, ResonanceStatus::Nonresonant))
            .map(|e| e.n)
            .collect()
    }

    /// Whether the recursion hit a logarithmic obstruction.
    pub fn obstructed(&self) -> bool {
        self.resonance_log
            .iter()
            .any(|e| matches!(e.status, ResonanceStatus::LogObstruction { .. }))
    }

    /// Free parameters including `z₀`.
    pub fn family_size(&self) -> usize {
        self.param_count + 1
    }

    /// The truncated series `Xᵢ(T) = Σ_{n ≤ computed} a_{i,n} Tⁿ` (so that
    /// `xᵢ = T^{−pᵢ} Xᵢ`), in the parameter ring.
    pub fn scaled_series(&self) -> Vec<QPoly> {
        let t = self.ring.len() - 1;
        let m = self.balance.c.len();
        (0..m)
            .map(|i| {
                let mut s = MultiPoly::zero(&self.ring);
                for (n, row) in self.coeffs.iter().enumerate() {
                    let mut e = vec![0u32; self.ring.len()];
                    e[t] = n as u32;
                    s = s.add(&row[i].mul_mono(&e));
                }
                s
            })
            .collect()
    }

    /// Exact residual check: the coefficients of `T^{n−pᵢ−1}`,
    /// `n = 0 … computed`, of `dxᵢ/dz − fᵢ − gᵢ` vanish identically in the
    /// parameters. Returns the first nonzero `(i, n)` if any.
    pub fn residual_failure(&self, sys: &QSystem) -> Result<Option<(usize, usize)>> {
        let scaled = scaled_rhs(sys)?;
        let x = self.scaled_series();
        let t = self.ring.len() - 1;
        let w = truncation_weights(&self.ring);
        let n_max = self.computed as i64;
        let mut images = x.clone();
        images.push(MultiPoly::var(&self.ring, t));
        images.push(MultiPoly::var(&self.ring, 0));
        for (i, s) in scaled.iter().enumerate() {
            let rhs = s.substitute_truncated(&images, &w, n_max);
            // T·Xᵢ′ − pᵢXᵢ
            let lhs = x[i]
                .deriv(t)
                .mul_mono(&unit(self.ring.len(), t))
                .sub(&x[i].scale(&int(sys.weight.p[i])));
            let diff = lhs.sub(&rhs).truncate_weighted(&w, n_max);
            let first = diff.terms().next().map(|(e, _)| e.0[t] as usize);
            if let Some(n) = first {
                return Ok(Some((i, n)));
            }
        }
        Ok(None)
    }
}

fn unit(n: usize, i: usize) -> Vec<u32> {
    let mut e = vec![0; n];
    e[i] = 1;
    e
}

fn truncation_weights(ring: &Vars) -> Vec<i64> {
    let mut w = vec![0; ring.len()];
    *w.last_mut().expect("ring has T") = 1;
    w
}

/// `Sᵢ(X, T, z₀) = T^{pᵢ+1} (fᵢ + gᵢ)(T^{−p}X, z₀ + T)` in the ring
/// `(X₁…X_m, T, z0)`, returned in the order of the equations. The series
/// equations read `T Xᵢ′ − pᵢXᵢ = Sᵢ`.
fn scaled_rhs(sys: &QSystem) -> Result<Vec<QPoly>> {
    let m = sys.dim();
    let mut names: Vec<String> = (1..=m).map(|i| format!("X{i}")).collect();
    names.push(T.into());
    names.push(Z0.into());
    let ring = vars_owned(names);
    let t = MultiPoly::var(&ring, m);
    let z = MultiPoly::var(&ring, m + 1).add(&t);
    let mut out = Vec::with_capacity(m);
    for i in 0..m {
        let mut s = MultiPoly::zero(&ring);
        for (e, c) in sys.rhs(i).terms() {
            let weight: i64 = (0..m).map(|k| e.0[k] as i64 * sys.weight.p[k]).sum();
            let texp = sys.weight.p[i] + 1 - weight;
            if texp < 0 {
                return Err(KovaError::Precondition(format!(
                    "equation {} has a monomial above the principal weighted degree",
                    i + 1
                )));
            }
            let mut ex = vec![0u32; m + 2];
            ex[..m].copy_from_slice(&e.0[..m]);
            ex[m] = texp as u32;
            let term = MultiPoly::monomial(&ring, ex, c.clone()).mul(&z.pow(e.0[m]));
            s = s.add(&term);
        }
        out.push(s);
    }
    Ok(out)
}

/// Coefficient of `v^n` in `p`, as a polynomial free of `v`.
fn coefficient_of(p: &QPoly, v: usize, n: u32) -> QPoly {
    let mut out = MultiPoly::zero(p.vars());
    for (e, c) in p.terms() {
        if e.0[v] == n {
            let mut ne = e.0.clone();
            ne[v] = 0;
            out.add_term(Mono(ne), c.clone());
        }
    }
    out
}

/// Default order: the largest positive integer exponent plus `s`.
pub fn default_order(sys: &QSystem, kd: &KovalevskayaData) -> usize {
    kd.positive_integer_exponents().into_iter().max().unwrap_or(0) as usize
        + sys.weight.s as usize
}

fn param_name(n: i64, k: usize, mult: usize) -> String {
    if mult == 1 {
        format!("alpha{n}")
    } else {
        format!("alpha{n}_{}", k + 1)
    }
}

/// Computes the Laurent expansion of a balance through order `n_max`.
pub fn expand(sys: &QSystem, b: &Balance, n_max: usize) -> Result<LaurentExpansion> {
    if n_max < 1 {
        return Err(KovaError::Precondition("expansion order must be at least 1".into()));
    }
    let m = sys.dim();
    let kd = kov_matrix(sys, b)?;
    // Generators: z0, one alpha per positive integer exponent ≤ N (with
    // multiplicity), then T.
    let mut names = vec![Z0.to_string()];
    let mut res_mult: Vec<(i64, usize)> = Vec::new();
    for r in kd.positive_integer_exponents() {
        match res_mult.last_mut() {
            Some((v, k)) if *v == r => *k += 1,
            _ => res_mult.push((r, 1)),
        }
    }
    for &(r, mult) in &res_mult {
        if r as usize <= n_max {
            for k in 0..mult {
                names.push(param_name(r, k, mult));
            }
        }
    }
    names.push(T.into());
    let ring = vars_owned(names);
    let tvar = ring.len() - 1;
    let w = truncation_weights(&ring);
    let scaled = scaled_rhs(sys)?;

    let mut coeffs: Vec<Vec<QPoly>> = vec![b
        .c
        .iter()
        .map(|c| MultiPoly::constant(&ring, c.clone()))
        .collect()];
    let mut log = Vec::new();
    let mut param_count = 0;
    let mut computed = 0;
    for n in 1..=n_max {
        // Partial series through order n − 1.
        let mut images: Vec<QPoly> = (0..m)
            .map(|i| {
                let mut s = MultiPoly::zero(&ring);
                for (j, row) in coeffs.iter().enumerate() {
                    s = s.add(&row[i].mul_mono(&{
                        let mut e = vec![0u32; ring.len()];
                        e[tvar] = j as u32;
                        e
                    }));
                }
                s
            })
            .collect();
        images.push(MultiPoly::var(&ring, tvar));
        images.push(MultiPoly::var(&ring, 0));
        let rhs: Vec<QPoly> = scaled
            .iter()
            .map(|s| {
                coefficient_of(&s.substitute_truncated(&images, &w, n as i64), tvar, n as u32)
                    .neg()
            })
            .collect();
        let a = kd.k.shift(&int(n as i64))?;
        let rr = a.rref();
        let rank = rr.pivots.len();
        let eb: Vec<QPoly> = (0..m)
            .map(|row| {
                (0..m).fold(MultiPoly::zero(&ring), |acc, j| {
                    acc.add(&rhs[j].scale(rr.transform.get(row, j)))
                })
            })
            .collect();
        if let Some(row) = (rank..m).find(|&r| !eb[r].is_zero()) {
            log.push(ResonanceEntry {
                n,
                status: ResonanceStatus::LogObstruction {
                    witness: rr.transform.row(row),
                    obstruction: eb[row].clone(),
                },
            });
            break;
        }
        let mut x = vec![MultiPoly::zero(&ring); m];
        for (row, &pc) in rr.pivots.iter().enumerate() {
            x[pc] = eb[row].clone();
        }
        if rank == m {
            log.push(ResonanceEntry {
                n,
                status: ResonanceStatus::Nonresonant,
            });
        } else {
            let ns = a.nullspace();
            let mult = res_mult
                .iter()
                .find(|(r, _)| *r == n as i64)
                .map(|(_, k)| *k)
                .unwrap_or(0);
            let mut params = Vec::new();
            for (k, v) in ns.iter().enumerate() {
                let name = param_name(n as i64, k, mult.max(ns.len()));
                let idx = ring.iter().position(|s| s == &name).ok_or_else(|| {
                    KovaError::Internal(format!("no generator reserved for resonance {n}"))
                })?;
                let alpha = MultiPoly::var(&ring, idx);
                for i in 0..m {
                    x[i] = x[i].add(&alpha.scale(&v[i]));
                }
                params.push(name);
            }
            param_count += ns.len();
            log.push(ResonanceEntry {
                n,
                status: ResonanceStatus::FreeParameter {
                    dim: ns.len(),
                    params,
                    non_semisimple: ns.len() < mult,
                },
            });
        }
        coeffs.push(x);
        computed = n;
    }
    Ok(LaurentExpansion {
        balance: b.clone(),
        order: n_max,
        computed,
        ring,
        coeffs,
        resonance_log: log,
        param_count,
        kovalevskaya: kd,
    })
}

/// Outcome of [`pole_order_screen`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ScreenVerdict {
    /// Every pole order is forced to vanish: the solution is holomorphic.
    ForcedHolomorphic,
    /// The leading coefficients with these (0-based) indices must vanish.
    ForcedZeroComponents(Vec<usize>),
    /// No constraint follows.
    Admissible,
    /// Orders above the weights were supplied but condition (S) is not
    /// established, so nothing can be concluded.
    Inconclusive,
}

/// Screens a candidate pole-order vector `q` (with optional leading
/// coefficients `c`).
///
/// Orders strictly below the weights with nonzero leading coefficients
/// force a holomorphic solution. Orders above the weights are reduced by the
/// block-decrement loop: the block with the largest ratio `qᵢ/pᵢ > 1` must
/// have vanishing leading coefficients under condition (S), its orders drop
/// by one, and the loop repeats until every ratio is at most 1.
pub fn pole_order_screen(
    sys: &QSystem,
    q: &[i64],
    c: Option<&[Rational]>,
    s_holds: bool,
) -> Result<ScreenVerdict> {
    let p = &sys.weight.p;
    if q.len() != p.len() {
        return Err(KovaError::Dimension(format!(
            "order vector has {} entries, system has {}",
            q.len(),
            p.len()
        )));
    }
    if q.iter().any(|&v| v < 0) {
        return Err(KovaError::Precondition("pole orders must be non-negative".into()));
    }
    if q.iter().zip(p).all(|(a, b)| a < b) {
        let nonzero = c.map_or(true, |c| c.iter().all(|v| !v.is_zero()));
        if nonzero && q.iter().any(|&v| v > 0) {
            return Ok(ScreenVerdict::ForcedHolomorphic);
        }
        return Ok(ScreenVerdict::Admissible);
    }
    if q.iter().zip(p).all(|(a, b)| a <= b) {
        return Ok(ScreenVerdict::Admissible);
    }
    if !s_holds {
        return Ok(ScreenVerdict::Inconclusive);
    }
    let mut q = q.to_vec();
    let mut forced: Vec<usize> = Vec::new();
    loop {
        // Largest ratio qᵢ/pᵢ, compared exactly.
        let ratios: Vec<Rational> = (0..q.len())
            .map(|i| Rational::new(q[i].into(), p[i].into()))
            .collect();
        let best = ratios.iter().max().expect("nonempty").clone();
        if best <= int(1) {
            break;
        }
        for i in 0..q.len() {
            if ratios[i] == best {
                if !forced.contains(&i) {
                    forced.push(i);
                }
                q[i] -= 1;
            }
        }
    }
    forced.sort();
    Ok(ScreenVerdict::ForcedZeroComponents(forced))
}

/// Renders a coefficient table row as expression strings.
pub fn coefficient_strings(exp: &LaurentExpansion) -> Vec<Vec<String>> {
    exp.coeffs
        .iter()
        .map(|row| row.iter().map(|p| p.to_expr()).collect())
        .collect()
}

/// The square matrix `K − nI` (exposed for diagnostics).
pub fn recursion_matrix(kd: &KovalevskayaData, n: i64) -> Result<Matrix<Rational>> {
    kd.k.shift(&int(n))
}

/// Classical Painlevé-test verdict of one balance.
#[derive(Clone, Debug, PartialEq)]
pub enum ClassicalVerdict {
    /// Every exponent except one `−1` is a positive integer, `K` is
    /// semisimple and the recursion is free of logarithms.
    Pass,
    /// The reason the test fails.
    Fail(String),
}

/// Extended (Prop.-type) verdict: the positive exponents are integers, the
/// unstable part is semisimple and the normal form on the unstable manifold
/// has no resonant terms below the blow-up threshold.
#[derive(Clone, Debug, PartialEq)]
pub enum ExtendedVerdict {
    /// Certified through the given weighted degree.
    PassAtOrder(i64),
    /// The reason the test fails.
    Fail(String),
    /// The certificate could not be computed (e.g. no chart with a
    /// rational root `c_j^{1/p_j}`).
    Undetermined(String),
}

/// Painlevé-test result of one balance.
#[derive(Clone, Debug)]
pub struct PainleveVerdict {
    /// The balance.
    pub balance: Balance,
    /// The exponents as expression strings (exact where available).
    pub exponents: Vec<String>,
    /// Whether every exponent is an integer.
    pub integral: bool,
    /// Classical verdict.
    pub classical: ClassicalVerdict,
    /// Extended verdict.
    pub extended: ExtendedVerdict,
    /// `k`: number of exponents with non-positive real part (counting −1).
    pub k: usize,
    /// Free parameters of the family, `dim − k + 1` (including `z₀`).
    pub family_dimension: usize,
    /// The expansion used for the resonance check.
    pub expansion: LaurentExpansion,
}

/// Runs the classical and extended tests on every balance. `order` is the
/// series order (default: largest positive integer exponent plus `s`).
pub fn painleve_test(
    sys: &QSystem,
    balances: &[Balance],
    order: Option<usize>,
    branch: crate::charts::Branch,
) -> Result<Vec<PainleveVerdict>> {
    use crate::kovalevskaya::Semisimple;
    use crate::normalform::{linearizability_certificate, Linearizability};

    let mut out = Vec::with_capacity(balances.len());
    for b in balances {
        let kd = kov_matrix(sys, b)?;
        let n = order.unwrap_or_else(|| default_order(sys, &kd)).max(1);
        let expansion = expand(sys, b, n)?;
        let complex = kd.exponents_complex();
        let k = complex.iter().filter(|z| z.re <= 1e-12).count();
        let exact = kd.exponents.exact_multiset();
        let integral = kd.exponents.is_split() && exact.iter().all(|q| q.is_integer());
        let minus_one = int(-1);
        let mut rest = exact.clone();
        if let Some(pos) = rest.iter().position(|q| *q == minus_one) {
            rest.remove(pos);
        }
        let positive_rest = kd.exponents.is_split()
            && rest.iter().all(|q| q.is_integer() && *q > Rational::zero());
        let classical = if !kd.exponents.is_split() || !exact.iter().all(|q| q.is_integer()) {
            ClassicalVerdict::Fail("non-integer exponent".into())
        } else if !positive_rest {
            ClassicalVerdict::Fail("an exponent other than −1 is not positive".into())
        } else if kd.semisimple != Semisimple::Yes {
            ClassicalVerdict::Fail("K is not semisimple".into())
        } else if expansion.obstructed() {
            ClassicalVerdict::Fail("logarithmic obstruction at a resonance".into())
        } else {
            ClassicalVerdict::Pass
        };

        let unstable_integral = kd.exponents.is_split()
            && exact
                .iter()
                .filter(|q| **q > Rational::zero())
                .all(|q| q.is_integer());
        let extended = if !unstable_integral {
            ExtendedVerdict::Fail("a positive exponent is not an integer".into())
        } else if kd.semisimple == Semisimple::No {
            ExtendedVerdict::Fail("K is not semisimple".into())
        } else if expansion.obstructed() {
            ExtendedVerdict::Fail("logarithmic obstruction at a resonance".into())
        } else {
            match crate::blowup::resolve(sys, b, None, branch, None) {
                Err(e) => ExtendedVerdict::Undetermined(e.to_string()),
                Ok(r) => match linearizability_certificate(&r.normal_form) {
                    Linearizability::Certified { degree, .. } => ExtendedVerdict::PassAtOrder(degree),
                    Linearizability::Obstructed { monomials } => ExtendedVerdict::Fail(format!(
                        "resonant terms on the unstable manifold: {}",
                        monomials.join(", ")
                    )),
                },
            }
        };
        let mut exponents: Vec<String> = exact.iter().map(crate::scalar::format_rational).collect();
        for (z, mult) in &kd.exponents.numeric_roots {
            for _ in 0..*mult {
                exponents.push(format!("{:.10}{:+.10}i", z.re, z.im));
            }
        }
        out.push(PainleveVerdict {
            balance: b.clone(),
            exponents,
            integral,
            classical,
            extended,
            k,
            family_dimension: sys.dim() + 1 - k,
            expansion,
        });
    }
    Ok(out)
}
