//! Balances: roots `c` of `−pᵢcᵢ = fᵢ^A(c)`, the leading coefficients of
//! pole-type solutions `xᵢ ≈ cᵢ (z − z₀)^{−pᵢ}`.
//!
//! Discovery combines three routes, every result being verified exactly:
//! closed forms for members of the first Painlevé hierarchy, elimination by
//! resultants for two-dimensional systems, and a seeded numeric multistart
//! whose roots are lifted to rationals by continued fractions.

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;

use crate::error::{KovaError, Result};
use crate::hierarchy;
use crate::kovalevskaya::kov_matrix;
use crate::matrix::Matrix;
use crate::numeric::{self, NumericSystem};
use crate::poly::{vars, vars_owned, MultiPoly};
use crate::roots::{dense_gcd, dense_degree, extract_roots, rationalize};
use crate::scalar::{int, Field};
use crate::system::WeightedSystem;
use crate::{QPoly, QSystem, Rational};

/// Denominator cap of the continued-fraction lifting.
pub const RATIONALIZE_CAP: i64 = 1_000_000;

/// Whether a balance is an isolated root of the balance equations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Isolation {
    /// 0 is not a Kovalevskaya exponent.
    Isolated,
    /// 0 is a Kovalevskaya exponent: the balance lies on a family.
    NonIsolated,
}

/// How a balance was found.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BalanceSource {
    /// Supplied by the caller.
    Given,
    /// Closed form for the first Painlevé hierarchy.
    ClosedForm,
    /// Resultant elimination.
    Elimination,
    /// Numeric multistart lifted to rationals.
    Numeric,
}

/// A verified balance.
#[derive(Clone, Debug, PartialEq)]
pub struct Balance {
    /// Leading coefficients.
    pub c: Vec<Rational>,
    /// First index with `c_j ≠ 0` (0-based); `None` for the zero balance.
    pub chart_index: Option<usize>,
    /// Isolation verdict (filled by [`find_balances`] / [`isolation_test`]).
    pub isolation: Option<Isolation>,
    /// Discovery route.
    pub source: BalanceSource,
}

impl Balance {
    /// Verifies `c` exactly and wraps it.
    pub fn new(sys: &QSystem, c: Vec<Rational>) -> Result<Balance> {
        match verify_balance(sys, &c) {
            BalanceCheck::Valid { .. } => Ok(Balance {
                chart_index: c.iter().position(|v| !v.is_zero()),
                c,
                isolation: None,
                source: BalanceSource::Given,
            }),
            BalanceCheck::Invalid { residual } => Err(KovaError::Precondition(format!(
                "not a balance: residual {:?}",
                residual.iter().map(Field::to_expr).collect::<Vec<_>>()
            ))),
        }
    }

    /// Whether this is the trivial balance `c = 0` (no pole).
    pub fn is_trivial(&self) -> bool {
        self.chart_index.is_none()
    }

    /// Rendering such as `(-2, 1)`.
    pub fn display(&self) -> String {
        format!(
            "({})",
            self.c.iter().map(Field::to_expr).collect::<Vec<_>>().join(", ")
        )
    }
}

/// Outcome of [`verify_balance`].
#[derive(Clone, Debug, PartialEq)]
pub enum BalanceCheck {
    /// The balance equations hold exactly.
    Valid {
        /// `c = 0`: valid but yields no pole.
        trivial: bool,
        /// `x = c(z−z₀)^{−p}` solves the truncated system symbolically.
        truncated_solution: bool,
    },
    /// Residuals `fᵢ^A(c) + pᵢcᵢ`.
    Invalid { residual: Vec<Rational> },
}

/// Exact check of the balance equations, plus the symbolic check that
/// `x(z) = c (z − z₀)^{−p}` solves `dx/dz = f^A(x)`.
pub fn verify_balance(sys: &QSystem, c: &[Rational]) -> BalanceCheck {
    let m = sys.dim();
    if c.len() != m {
        return BalanceCheck::Invalid {
            residual: vec![BigRational::one(); m.max(1)],
        };
    }
    let fa = sys.truncated();
    let residual: Vec<Rational> = (0..m)
        .map(|i| fa[i].eval(c) + int(sys.weight.p[i]) * &c[i])
        .collect();
    if residual.iter().any(|r| !r.is_zero()) {
        return BalanceCheck::Invalid { residual };
    }
    // With U = 1/(z − z₀): xₖ = cₖ U^{pₖ}, dxᵢ/dz = −pᵢcᵢ U^{pᵢ+1}.
    let ring = vars(&["U"]);
    let u = MultiPoly::var(&ring, 0);
    let images: Vec<QPoly> = (0..m)
        .map(|k| u.pow(sys.weight.p[k] as u32).scale(&c[k]))
        .collect();
    let truncated_solution = (0..m).all(|i| {
        let lhs = u.pow(sys.weight.p[i] as u32 + 1).scale(&(-int(sys.weight.p[i]) * &c[i]));
        fa[i].substitute(&images) == lhs
    });
    BalanceCheck::Valid {
        trivial: c.iter().all(Zero::is_zero),
        truncated_solution,
    }
}

/// Isolation test: non-isolated iff 0 is a Kovalevskaya exponent.
pub fn isolation_test(sys: &QSystem, b: &Balance) -> Result<Isolation> {
    let kd = kov_matrix(sys, b)?;
    Ok(if kd.k.det()?.is_zero() {
        Isolation::NonIsolated
    } else {
        Isolation::Isolated
    })
}

/// Image of a balance under the cyclic action `(x, z) ↦ (ω^{p}x, ω^{r}z)`,
/// `ωˢ = 1`, applied to the solution `c (z−z₀)^{−p}`: the curve maps to
/// `ω^{pₖ} cₖ (ω z′ − z₀)^{−pₖ}`, so the exponent of ω on each coefficient is
/// `pₖ − pₖ ≡ 0 (mod s)`. Returns the image coefficients and the phase
/// exponent `r` by which `z₀` is multiplied.
pub fn action_image(sys: &QSystem, b: &Balance) -> (Vec<Rational>, i64) {
    let s = sys.weight.s;
    let image = b
        .c
        .iter()
        .zip(&sys.weight.p)
        .map(|(c, &p)| {
            let omega_exp = (p - p).rem_euclid(s);
            debug_assert_eq!(omega_exp, 0);
            c.clone()
        })
        .collect();
    (image, sys.weight.r.rem_euclid(s))
}

/// Outcome of [`find_balances`].
#[derive(Clone, Debug, Default)]
pub struct BalanceSearch {
    /// Verified nonzero balances (deduplicated, in discovery order).
    pub balances: Vec<Balance>,
    /// Converged numeric roots that could not be lifted to exact values.
    pub numeric_only: Vec<Vec<Complex64>>,
}

/// Configuration of the numeric multistart.
#[derive(Clone, Copy, Debug)]
pub struct SearchConfig {
    /// Random starts.
    pub starts: usize,
    /// Iterations per start.
    pub iters: usize,
    /// Probe seed.
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            starts: 200,
            iters: 100,
            seed: numeric::DEFAULT_SEED,
        }
    }
}

fn balance_equations(sys: &QSystem) -> Vec<QPoly> {
    let sv = vars_owned(sys.state_names());
    sys.truncated()
        .into_iter()
        .enumerate()
        .map(|(i, fa)| fa.add(&MultiPoly::var(&sv, i).scale(&int(sys.weight.p[i]))))
        .collect()
}

fn push_unique(out: &mut Vec<Balance>, b: Balance) {
    if !b.is_trivial() && !out.iter().any(|o| o.c == b.c) {
        out.push(b);
    }
}

/// Finds the nonzero balances of a system.
pub fn find_balances(sys: &QSystem, cfg: &SearchConfig) -> Result<BalanceSearch> {
    let mut out = BalanceSearch::default();
    // (a) closed forms for the first Painlevé hierarchy.
    if sys.dim() % 2 == 0 && sys.dim() / 2 <= hierarchy::M_CAP {
        let m = sys.dim() / 2;
        if let Ok(inst) = hierarchy::generate(m) {
            if inst.system.f == sys.f && inst.system.weight == sys.weight {
                for c in inst.balances {
                    let mut b = Balance::new(sys, c)?;
                    b.source = BalanceSource::ClosedForm;
                    push_unique(&mut out.balances, b);
                }
            }
        }
    }
    // (b) exact elimination in low dimension.
    if sys.dim() <= 2 {
        for c in eliminate(sys)? {
            let mut b = Balance::new(sys, c)?;
            b.source = BalanceSource::Elimination;
            push_unique(&mut out.balances, b);
        }
    }
    // (c) numeric multistart with exact lifting.
    let eqs = balance_equations(sys);
    let nsys = NumericSystem::new(&eqs, sys.dim());
    let mut rng = numeric::rng(cfg.seed);
    let mut numeric_only: Vec<Vec<Complex64>> = Vec::new();
    for _ in 0..cfg.starts {
        let radius = 10f64.powf(rng.gen_range(-1.0..2.0));
        let start = numeric::random_polydisc(&mut rng, sys.dim(), radius);
        let (x, res) = nsys.solve(&start, cfg.iters, 1e-13);
        let scale = 1.0 + numeric::norm(&x);
        if !(res < 1e-9 * scale.powi(3)) || numeric::norm(&x) < 1e-6 {
            continue;
        }
        let lifted: Option<Vec<Rational>> = x
            .iter()
            .map(|v| {
                if v.im.abs() > 1e-7 * (1.0 + v.re.abs()) {
                    None
                } else {
                    rationalize(v.re, RATIONALIZE_CAP)
                }
            })
            .collect();
        match lifted.and_then(|c| Balance::new(sys, c).ok()) {
            Some(mut b) => {
                b.source = BalanceSource::Numeric;
                push_unique(&mut out.balances, b);
            }
            None => {
                if !numeric_only
                    .iter()
                    .any(|o| numeric::norm(&o.iter().zip(&x).map(|(a, b)| a - b).collect::<Vec<_>>()) < 1e-6 * scale)
                {
                    numeric_only.push(x);
                }
            }
        }
    }
    numeric_only.sort_by(|a, b| {
        a.iter()
            .zip(b)
            .map(|(x, y)| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    out.numeric_only = numeric_only;
    for b in out.balances.iter_mut() {
        b.isolation = Some(isolation_test(sys, b)?);
    }
    Ok(out)
}

/// Rational solutions of the balance equations for `m ≤ 2` by resultant
/// elimination.
fn eliminate(sys: &QSystem) -> Result<Vec<Vec<Rational>>> {
    let eqs = balance_equations(sys);
    let mut out = Vec::new();
    if sys.dim() == 1 {
        let p = eqs[0].clone();
        if p.is_zero() {
            return Ok(out);
        }
        if p.is_constant() {
            return Ok(out);
        }
        for (r, _) in extract_roots(&p)?.exact_roots {
            out.push(vec![r]);
        }
        return Ok(out);
    }
    // Eliminate c₁: Res_{c₁}(E₁, E₂) ∈ ℚ[c₂].
    let res = resultant_c1(&eqs[0], &eqs[1])?;
    let c2_ring = vars(&["c2"]);
    if res.iter().all(Zero::is_zero) {
        // Common factor: a continuum of solutions; left to the numeric probe.
        return Ok(out);
    }
    let res_poly = MultiPoly::from_dense(&c2_ring, &res);
    if res_poly.is_constant() {
        return Ok(out);
    }
    for (c2, _) in extract_roots(&res_poly)?.exact_roots {
        let u1: Vec<Vec<Rational>> = eqs
            .iter()
            .map(|e| {
                let cs = e.coeffs_in(0);
                cs.iter().map(|q| q.eval(&[BigRational::zero(), c2.clone()])).collect()
            })
            .collect();
        let g = dense_gcd(&u1[0], &u1[1]);
        match dense_degree(&g) {
            None => continue, // both vanish identically: continuum
            Some(0) => continue,
            Some(_) => {
                let gp = MultiPoly::from_dense(&vars(&["c1"]), &g);
                for (c1, _) in extract_roots(&gp)?.exact_roots {
                    out.push(vec![c1, c2.clone()]);
                }
            }
        }
    }
    Ok(out)
}

/// Dense coefficients (in `c₂`) of `Res_{c₁}(a, b)` by evaluation at
/// integer points and Lagrange interpolation.
fn resultant_c1(a: &QPoly, b: &QPoly) -> Result<Vec<Rational>> {
    let ca = a.coeffs_in(0);
    let cb = b.coeffs_in(0);
    let (da, db) = (ca.len() - 1, cb.len() - 1);
    let bound = (a.total_degree().unwrap_or(0) * b.total_degree().unwrap_or(0)) as usize + 1;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for t in 0..=bound as i64 {
        let pt = [BigRational::zero(), int(t)];
        let ea: Vec<Rational> = ca.iter().map(|q| q.eval(&pt)).collect();
        let eb: Vec<Rational> = cb.iter().map(|q| q.eval(&pt)).collect();
        xs.push(int(t));
        ys.push(sylvester_det(&ea, &eb, da, db)?);
    }
    Ok(lagrange(&xs, &ys))
}

fn sylvester_det(a: &[Rational], b: &[Rational], da: usize, db: usize) -> Result<Rational> {
    let n = da + db;
    if n == 0 {
        return Ok(BigRational::one());
    }
    let mut m = Matrix::<Rational>::zeros(n, n);
    for i in 0..db {
        for (k, c) in a.iter().enumerate() {
            m.set(i, i + da - k, c.clone());
        }
    }
    for i in 0..da {
        for (k, c) in b.iter().enumerate() {
            m.set(db + i, i + db - k, c.clone());
        }
    }
    m.det()
}

fn lagrange(xs: &[Rational], ys: &[Rational]) -> Vec<Rational> {
    let n = xs.len();
    let mut out = vec![BigRational::zero(); n];
    for i in 0..n {
        let mut basis = vec![BigRational::one()];
        let mut denom = BigRational::one();
        for j in 0..n {
            if i == j {
                continue;
            }
            let mut next = vec![BigRational::zero(); basis.len() + 1];
            for (k, c) in basis.iter().enumerate() {
                next[k + 1] += c;
                next[k] -= c * &xs[j];
            }
            basis = next;
            denom *= &xs[i] - &xs[j];
        }
        let f = &ys[i] / denom;
        for (k, c) in basis.iter().enumerate() {
            out[k] += c * &f;
        }
    }
    crate::roots::dense_trim(out)
}

/// Nonzero balances of a system with the default search configuration and
/// the given seed, discarding numeric-only roots.
pub fn balances_of(sys: &WeightedSystem<Rational>, seed: u64) -> Result<Vec<Balance>> {
    Ok(find_balances(
        sys,
        &SearchConfig {
            seed,
            ..SearchConfig::default()
        },
    )?
    .balances)
}
