//! Local analysis at a fixed point at infinity: linear preparation of the
//! chart field, the unstable-manifold graph, and the near-identity
//! normal-form transformation that removes every non-resonant monomial
//! below the blow-up threshold.
//!
//! Coordinates carry weighted degrees: a state coordinate gets its
//! Kovalevskaya exponent, `Z` gets `r` and `ε` gets `s`. In these degrees the
//! linear part of the polynomial-form field is `σ·diag(degrees)` plus
//! couplings that raise the degree, where `σ = Φ̃_j` at the fixed point.

use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::charts::{local_field, ChartField, InfinityFixedPoint};
use crate::error::{KovaError, Result};
use crate::kovalevskaya::KovalevskayaData;
use crate::matrix::{LinearSolution, Matrix};
use crate::poly::{vars_owned, Mono, MultiPoly, Vars};
use crate::scalar::{int, Field};
use crate::surd::Surd;
use crate::{QSystem, Rational, SMatrix, SPoly};

/// Cap on elementary normal-form steps and on unstable-manifold passes.
pub const ITERATION_CAP: usize = 10_000;

/// Role of a local coordinate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoordRole {
    /// A shifted state coordinate.
    State,
    /// The `Z` coordinate.
    Z,
    /// The `ε` coordinate.
    Eps,
}

/// A polynomial vector field with a fixed point at the origin.
#[derive(Clone, Debug)]
pub struct LocalVectorField {
    /// Coordinate names.
    pub coords: Vars,
    /// Role of every coordinate.
    pub roles: Vec<CoordRole>,
    /// Weighted degree of every coordinate.
    pub weights: Vec<Rational>,
    /// The scale `σ`: the linear part has diagonal `σ·weights`.
    pub sigma: Surd,
    /// One component per coordinate.
    pub components: Vec<SPoly>,
    /// Ordinary (total) degree through which the components are exact
    /// (`None`: exact polynomials). Weighted degree is not a filtration of
    /// a local field whose stable coordinates have non-positive weight, so
    /// jets are cut by total degree.
    pub truncation: Option<i64>,
}

impl LocalVectorField {
    /// Number of coordinates.
    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// Jacobian at the origin.
    pub fn linear_part(&self) -> SMatrix {
        let n = self.dim();
        Matrix::from_fn(n, n, |i, j| self.components[i].coeff(&Mono::var(n, j).0))
    }

    /// Components minus their linear parts.
    pub fn nonlinear_part(&self) -> Vec<SPoly> {
        self.components
            .iter()
            .map(|p| p.filter(|m| m.degree() >= 2))
            .collect()
    }

    /// Whether the origin is a fixed point.
    pub fn fixes_origin(&self) -> bool {
        self.components.iter().all(|p| p.constant_term().is_zero())
    }

    /// The weights as integers, when they all are.
    pub fn integer_weights(&self) -> Option<Vec<i64>> {
        self.weights
            .iter()
            .map(|w| if w.is_integer() { w.to_integer().to_i64() } else { None })
            .collect()
    }

    /// Indices of the `ε` and `Z` coordinates.
    pub fn index_of(&self, role: CoordRole) -> Option<usize> {
        self.roles.iter().position(|&r| r == role)
    }

    /// Numeric eigenvalues `σ·weight` of the diagonal.
    pub fn diagonal_numeric(&self) -> Vec<Complex64> {
        let s = self.sigma.to_complex();
        self.weights.iter().map(|w| s * w.to_complex()).collect()
    }
}

fn state_name(k: usize) -> String {
    format!("v{}", k + 1)
}

/// Result of the linear preparation.
#[derive(Clone, Debug)]
pub struct Prepared {
    /// Chart index `j`.
    pub chart: usize,
    /// The fixed point in chart coordinates.
    pub fixed_point: Vec<Surd>,
    /// Chart coordinate names `(X…, Z, eps)`.
    pub chart_coords: Vars,
    /// `X̂ = T·v`, with `X̂ = X − fixed point`.
    pub t: SMatrix,
    /// `T⁻¹`.
    pub t_inv: SMatrix,
    /// The field in the coordinates `v`.
    pub field: LocalVectorField,
}

impl Prepared {
    /// `X̂_i` as a polynomial in the `v` coordinates.
    pub fn hat_in_v(&self) -> Vec<SPoly> {
        let n = self.t.rows();
        let ring = &self.field.coords;
        (0..n)
            .map(|i| {
                let mut p = MultiPoly::zero(ring);
                for l in 0..n {
                    let c = self.t.get(i, l).clone();
                    if !c.is_zero() {
                        p.add_term(Mono::var(n, l), c);
                    }
                }
                p
            })
            .collect()
    }
}

/// The chart exponents in coordinate order: the Kovalevskaya exponents
/// other than one `−1`, ascending, for the state coordinates; then `r`, `s`.
pub fn coordinate_weights(sys: &QSystem, kd: &KovalevskayaData) -> Result<Vec<Rational>> {
    if !kd.exponents.is_split() {
        return Err(KovaError::Precondition(
            "linear preparation needs rational Kovalevskaya exponents".into(),
        ));
    }
    let mut e = kd.exponents.exact_multiset();
    let minus_one = -Rational::one();
    let pos = e
        .iter()
        .position(|v| v == &minus_one)
        .ok_or_else(|| KovaError::Internal("no exponent -1".into()))?;
    e.remove(pos);
    e.sort();
    e.push(int(sys.weight.r));
    e.push(int(sys.weight.s));
    Ok(e)
}

/// Order of the coordinates by weight (stable in the index).
fn weight_order(weights: &[Rational]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..weights.len()).collect();
    idx.sort_by(|&a, &b| weights[a].cmp(&weights[b]).then(a.cmp(&b)));
    idx
}

/// Shifts the chart field to the fixed point and triangularises its linear
/// part: `X̂ = T v` with `T` unit lower-triangular in weight order and
/// acting trivially on `Z` and `ε`, such that `T⁻¹ J T` has diagonal
/// `σ·weights` and only degree-raising couplings above it.
pub fn prepare(
    sys: &QSystem,
    cf: &ChartField,
    fp: &InfinityFixedPoint,
    kd: &KovalevskayaData,
) -> Result<Prepared> {
    let n = cf.coords.len();
    let m = sys.dim();
    let weights = coordinate_weights(sys, kd)?;
    if weights.len() != n {
        return Err(KovaError::Dimension("exponent count does not match chart".into()));
    }
    let roles: Vec<CoordRole> = cf
        .homogeneous_index
        .iter()
        .map(|&h| {
            if h < m {
                CoordRole::State
            } else if h == m {
                CoordRole::Z
            } else {
                CoordRole::Eps
            }
        })
        .collect();
    let sigma = fp.phi_j.clone();
    let a = fp.jacobian.clone();
    let order = weight_order(&weights);
    let pos_in_order: Vec<usize> = {
        let mut p = vec![0; n];
        for (k, &i) in order.iter().enumerate() {
            p[i] = k;
        }
        p
    };
    let mut t = SMatrix::zeros(n, n);
    let mut b = SMatrix::zeros(n, n);
    for (k, &l) in order.iter().enumerate() {
        let mu = sigma.clone() * Surd::from_rational(&weights[l]);
        let shifted = a.shift(&mu)?;
        let lower: Vec<usize> = order[k + 1..]
            .iter()
            .copied()
            .filter(|&i| roles[i] == CoordRole::State)
            .collect();
        let earlier: Vec<usize> = order[..k].to_vec();
        let cols = lower.len() + earlier.len();
        let mut mat = SMatrix::zeros(n, cols);
        for r in 0..n {
            for (c, &i) in lower.iter().enumerate() {
                mat.set(r, c, shifted.get(r, i).clone());
            }
            for (c, &i) in earlier.iter().enumerate() {
                mat.set(r, lower.len() + c, -t.get(r, i).clone());
            }
        }
        let rhs: Vec<Surd> = (0..n).map(|r| -shifted.get(r, l).clone()).collect();
        let x = match mat.solve(&rhs)? {
            LinearSolution::Unique(x) => x,
            LinearSolution::Affine { particular, .. } => particular,
            LinearSolution::Inconsistent { .. } => {
                return Err(KovaError::Precondition(format!(
                    "the linear part cannot be triangularised in weight order at column {}",
                    l + 1
                )))
            }
        };
        t.set(l, l, Surd::one());
        for (c, &i) in lower.iter().enumerate() {
            t.set(i, l, x[c].clone());
        }
        b.set(l, l, mu);
        for (c, &i) in earlier.iter().enumerate() {
            b.set(i, l, x[lower.len() + c].clone());
        }
    }
    let t_inv = t
        .inverse()?
        .ok_or_else(|| KovaError::Internal("triangular transform is singular".into()))?;
    if t_inv.mul(&a)?.mul(&t)? != b {
        return Err(KovaError::Internal("linear preparation does not conjugate".into()));
    }
    // Only degree-raising couplings may sit off the diagonal.
    for i in 0..n {
        for l in 0..n {
            if i != l && !b.get(i, l).is_zero() && pos_in_order[l] < pos_in_order[i] {
                return Err(KovaError::Internal("prepared linear part is not triangular".into()));
            }
        }
    }

    let mut names = Vec::with_capacity(n);
    let mut k = 0;
    for &r in &roles {
        names.push(match r {
            CoordRole::State => {
                k += 1;
                state_name(k - 1)
            }
            CoordRole::Z => "Z".into(),
            CoordRole::Eps => "eps".into(),
        });
    }
    let vring = vars_owned(names);
    let shifted = local_field(cf, &fp.coords);
    let images: Vec<SPoly> = (0..n)
        .map(|i| {
            let mut p = MultiPoly::zero(&vring);
            for l in 0..n {
                if !t.get(i, l).is_zero() {
                    p.add_term(Mono::var(n, l), t.get(i, l).clone());
                }
            }
            p
        })
        .collect();
    let pulled: Vec<SPoly> = shifted.iter().map(|f| f.substitute(&images)).collect();
    let components: Vec<SPoly> = (0..n)
        .map(|i| {
            (0..n).fold(MultiPoly::zero(&vring), |acc, k| {
                acc.add(&pulled[k].scale(t_inv.get(i, k)))
            })
        })
        .collect();
    let field = LocalVectorField {
        coords: vring,
        roles,
        weights,
        sigma,
        components,
        truncation: None,
    };
    if !field.fixes_origin() || field.linear_part() != b {
        return Err(KovaError::Internal("prepared field has the wrong linear part".into()));
    }
    Ok(Prepared {
        chart: fp.chart,
        fixed_point: fp.coords.clone(),
        chart_coords: cf.coords.clone(),
        t,
        t_inv,
        field,
    })
}

/// The unstable manifold `X_s = φ(X_u, Z, ε)` as a graph over the
/// coordinates of positive weight.
#[derive(Clone, Debug)]
pub struct UnstableManifold {
    /// Indices of the stable coordinates (weight ≤ 0).
    pub stable: Vec<usize>,
    /// Indices of the remaining coordinates.
    pub kept: Vec<usize>,
    /// `φ`, one polynomial per stable coordinate, in the ring of the kept
    /// coordinates.
    pub phi: Vec<SPoly>,
    /// Weighted degree `N` the computation is sized for.
    pub order: i64,
    /// Total degree `K = ⌊N / min weight⌋` of the jets of `φ` and of the
    /// restricted field; every term of weighted degree `≤ N` is exact.
    pub taylor_degree: i64,
    /// The field restricted to the graph, truncated at total degree
    /// `taylor_degree`.
    pub restricted: LocalVectorField,
    /// Whether the invariance equation holds exactly through `order`.
    pub residual_ok: bool,
}

/// Computes the unstable manifold `v_s = φ(y)` exactly through weighted
/// degree `n`.
///
/// The invariance equation `Dφ·f_u(φ, y) = f_s(φ, y)` is solved on jets of
/// total degree `K = ⌊n / min weight⌋`: within a total degree, the part of
/// weighted degree `d` is corrected by `(σd − J_s)⁻¹`, lowest `d` first,
/// until the residual of that total degree vanishes.
pub fn unstable_manifold(field: &LocalVectorField, n: i64) -> Result<UnstableManifold> {
    let dim = field.dim();
    let stable: Vec<usize> = (0..dim)
        .filter(|&i| field.roles[i] == CoordRole::State && !field.weights[i].is_positive())
        .collect();
    let kept: Vec<usize> = (0..dim).filter(|i| !stable.contains(i)).collect();
    let kw: Vec<i64> = kept
        .iter()
        .map(|&i| {
            let w = &field.weights[i];
            if w.is_integer() {
                w.to_integer().to_i64().ok_or_else(|| KovaError::Precondition("weight overflow".into()))
            } else {
                Err(KovaError::Precondition(format!(
                    "non-integer exponent {w} on the unstable side; the classical test must pass first"
                )))
            }
        })
        .collect::<Result<_>>()?;
    // Weight-0 coordinates (Z of an autonomous system) do not bound the
    // total degree; the jet order comes from the positive weights.
    let min_w = kw.iter().copied().filter(|&w| w > 0).min().unwrap_or(1);
    let taylor = (n / min_w).max(1);
    if stable.is_empty() {
        return Ok(UnstableManifold {
            stable,
            kept,
            phi: Vec::new(),
            order: n,
            taylor_degree: taylor,
            restricted: field.clone(),
            residual_ok: true,
        });
    }
    let ring = vars_owned(kept.iter().map(|&i| field.coords[i].clone()).collect());
    let ones = vec![1; kept.len()];
    let lin = field.linear_part();
    let js = Matrix::from_fn(stable.len(), stable.len(), |a, b| lin.get(stable[a], stable[b]).clone());
    let mut phi: Vec<SPoly> = vec![MultiPoly::zero(&ring); stable.len()];

    // Residual `f_s(φ, y) − Dφ·f_u(φ, y)` and the restricted field, as
    // jets of total degree `t`.
    let residual = |phi: &[SPoly], t: i64| -> (Vec<SPoly>, Vec<SPoly>) {
        let images: Vec<SPoly> = (0..dim)
            .map(|i| match stable.iter().position(|&s| s == i) {
                Some(k) => phi[k].clone(),
                None => MultiPoly::var(&ring, kept.iter().position(|&x| x == i).expect("kept")),
            })
            .collect();
        let sub: Vec<SPoly> = field
            .components
            .iter()
            .map(|f| f.substitute_truncated(&images, &ones, t))
            .collect();
        let res = stable
            .iter()
            .enumerate()
            .map(|(k, &s)| {
                let mut lhs = MultiPoly::zero(&ring);
                for (c, &l) in kept.iter().enumerate() {
                    lhs = lhs.add(&phi[k].deriv(c).mul_truncated(&sub[l], &ones, t));
                }
                sub[s].sub(&lhs)
            })
            .collect();
        (res, kept.iter().map(|&l| sub[l].clone()).collect())
    };

    // With no linear coupling from the stable into the unstable block, the
    // total-degree-k equation is linear in φ_k:
    //   (σd − J_s)·φ_{k,d} = R_{k,d} − (Dφ_{k,<d}·N y)_d,
    // where N is the linear part of f_u beyond its diagonal σ·weights.
    let decoupled = kept
        .iter()
        .all(|&l| stable.iter().all(|&s| lin.get(l, s).is_zero()));
    let ny: Vec<SPoly> = kept
        .iter()
        .enumerate()
        .map(|(a, &l)| {
            let mut p = MultiPoly::zero(&ring);
            for (b, &m) in kept.iter().enumerate() {
                let mut c = lin.get(l, m).clone();
                if a == b {
                    c = c - field.sigma.clone() * Surd::from_i64(kw[a]);
                }
                if !c.is_zero() {
                    p = p.add(&MultiPoly::var(&ring, b).scale(&c));
                }
            }
            p
        })
        .collect();
    let solve_at = |d: i64| -> Result<SMatrix> {
        let op = js.shift(&(field.sigma.clone() * Surd::from_i64(d)))?.scale(&-Surd::one());
        op.inverse()?
            .ok_or_else(|| KovaError::Internal(format!("σd − J_s is singular at degree {d}")))
    };
    let min_degree = |parts: &[SPoly]| -> Option<i64> {
        parts
            .iter()
            .flat_map(|p| p.terms().map(|(e, _)| e.weighted_degree(&kw)).collect::<Vec<_>>())
            .min()
    };

    for k in 1..=taylor {
        for _ in 0..ITERATION_CAP {
            let (res, _) = residual(&phi, k);
            let mut rhs: Vec<SPoly> = res.iter().map(|r| r.weighted_part(&ones, k)).collect();
            if rhs.iter().all(MultiPoly::is_zero) {
                break;
            }
            let mut steps = 0;
            while let Some(d) = min_degree(&rhs) {
                steps += 1;
                if steps > ITERATION_CAP {
                    return Err(KovaError::Internal(
                        "invariant-manifold solve does not terminate".into(),
                    ));
                }
                let inv = solve_at(d)?;
                let dparts: Vec<SPoly> = rhs.iter().map(|p| p.weighted_part(&kw, d)).collect();
                for (a, r) in rhs.iter_mut().enumerate() {
                    *r = r.sub(&dparts[a]);
                }
                for a in 0..stable.len() {
                    let mut delta = MultiPoly::zero(&ring);
                    for (l, part) in dparts.iter().enumerate() {
                        delta = delta.add(&part.scale(inv.get(a, l)));
                    }
                    if decoupled {
                        for (c, n) in ny.iter().enumerate() {
                            if !n.is_zero() {
                                rhs[a] = rhs[a].sub(&delta.deriv(c).mul(n));
                            }
                        }
                    }
                    phi[a] = phi[a].add(&delta);
                }
                if !decoupled {
                    // Coupled blocks: correct one weighted degree at a time
                    // and recompute the residual.
                    break;
                }
            }
            if decoupled {
                // The triangular solve is exact; the final residual check
                // below verifies the whole jet.
                break;
            }
        }
    }
    let (res, sub) = residual(&phi, taylor);
    let residual_ok = res.iter().all(MultiPoly::is_zero);
    let restricted = LocalVectorField {
        coords: ring,
        roles: kept.iter().map(|&i| field.roles[i]).collect(),
        weights: kept.iter().map(|&i| field.weights[i].clone()).collect(),
        sigma: field.sigma.clone(),
        components: sub,
        truncation: Some(taylor),
    };
    Ok(UnstableManifold {
        stable,
        kept,
        phi,
        order: n,
        taylor_degree: taylor,
        restricted,
        residual_ok,
    })
}

/// A monomial removed by the normal-form transformation.
#[derive(Clone, Debug, PartialEq)]
pub struct RemovedMonomial {
    /// Equation (coordinate index).
    pub equation: usize,
    /// The monomial, in the coordinates of the step that removed it.
    pub monomial: Mono,
    /// Its weighted degree.
    pub degree: i64,
    /// Coefficient `a` of the elementary step `y_i ↦ y_i + a·α`.
    pub coefficient: Surd,
}

/// A resonant monomial kept in the normal form.
#[derive(Clone, Debug, PartialEq)]
pub struct ResonantTerm {
    /// Equation (coordinate index).
    pub equation: usize,
    /// The monomial (in the normal-form coordinates).
    pub monomial: Mono,
    /// Its coefficient.
    pub coefficient: Surd,
}

/// Result of [`normal_form`].
#[derive(Clone, Debug)]
pub struct NormalFormResult {
    /// The input field.
    pub source: LocalVectorField,
    /// `y = H(v)`, in the ring of the input coordinates.
    pub transform: Vec<SPoly>,
    /// `v = H⁻¹(y)`, in the ring of the new coordinates.
    pub inverse: Vec<SPoly>,
    /// The transformed field in the new coordinates.
    pub field: LocalVectorField,
    /// Elementary steps in the order applied.
    pub removed: Vec<RemovedMonomial>,
    /// `G₁`: resonant terms below the threshold.
    pub g1: Vec<ResonantTerm>,
    /// Every resonant monomial `α` (`|α| ≥ 2`) of equation `i`: weighted
    /// degree equal to the weight of coordinate `i`.
    pub resonances: Vec<(usize, Mono)>,
    /// Whether the convex hull of the eigenvalues excludes the origin.
    pub condition_p: bool,
    /// Declared truncation degree `N`.
    pub order: i64,
    /// Per equation, the lowest weighted degree the remainder `G₂` can
    /// have (`weight + 1`).
    pub remainder_degree: Vec<i64>,
}

/// The same polynomial in a ring of the same arity with other names.
fn rering(p: &SPoly, ring: &Vars) -> SPoly {
    MultiPoly::from_terms(ring, p.terms().map(|(m, c)| (m.0.clone(), c.clone())))
}

fn renamed(name: &str) -> String {
    match name.strip_prefix('v') {
        Some(rest) => format!("y{rest}"),
        None if name == "Z" || name == "eps" => name.to_string(),
        None => format!("y_{name}"),
    }
}

/// Every monomial of total degree at least 2 whose weighted degree equals
/// `weights[i]`, for every coordinate `i`, with degree at most `n`.
pub fn resonances(weights: &[i64], n: i64) -> Vec<(usize, Mono)> {
    let mut out = Vec::new();
    for (i, &wi) in weights.iter().enumerate() {
        if wi > n || wi <= 0 {
            continue;
        }
        let mut cur = vec![0u32; weights.len()];
        enumerate(weights, 0, wi, &mut cur, &mut |e: &[u32]| {
            if e.iter().sum::<u32>() >= 2 {
                out.push((i, Mono(e.to_vec())));
            }
        });
    }
    out
}

fn enumerate(w: &[i64], k: usize, left: i64, cur: &mut Vec<u32>, f: &mut dyn FnMut(&[u32])) {
    if k == w.len() {
        if left == 0 {
            f(cur);
        }
        return;
    }
    if w[k] <= 0 {
        enumerate(w, k + 1, left, cur, f);
        return;
    }
    let mut e = 0;
    while e as i64 * w[k] <= left {
        cur[k] = e;
        enumerate(w, k + 1, left - e as i64 * w[k], cur, f);
        e += 1;
    }
    cur[k] = 0;
}

/// Whether the convex hull of the given complex numbers excludes the
/// origin (all of them lie in an open half-plane).
pub fn condition_p(eigs: &[Complex64]) -> bool {
    if eigs.iter().any(|z| z.norm() < 1e-12) {
        return false;
    }
    let mut args: Vec<f64> = eigs.iter().map(|z| z.arg()).collect();
    args.sort_by(f64::total_cmp);
    if args.len() == 1 {
        return true;
    }
    let mut gap = args[0] + std::f64::consts::TAU - args[args.len() - 1];
    for w in args.windows(2) {
        gap = gap.max(w[1] - w[0]);
    }
    gap > std::f64::consts::PI + 1e-12
}

/// Applies near-identity transformations `y_i = v_i + a·α(v)` until no
/// state equation contains a non-resonant monomial `α ≠ y_i` of weighted
/// degree below `deg(y_i) + 1`. Resonant monomials (degree exactly
/// `deg(y_i)`) are kept and reported as `G₁`. All weights must be positive
/// integers.
pub fn normal_form(field: &LocalVectorField, n: i64) -> Result<NormalFormResult> {
    let w = field.integer_weights().filter(|w| w.iter().all(|&x| x > 0)).ok_or_else(|| {
        KovaError::Precondition(
            "normal forms need positive integer weights; restrict to the unstable manifold first"
                .into(),
        )
    })?;
    let dim = field.dim();
    let yring = vars_owned(field.coords.iter().map(|c| renamed(c)).collect());
    let mut g: Vec<SPoly> = field
        .components
        .iter()
        .map(|p| rering(p, &yring))
        .collect();
    let mut h: Vec<SPoly> = (0..dim).map(|i| MultiPoly::var(&field.coords, i)).collect();
    let ones = vec![1; dim];
    let mul = |p: &SPoly, q: &SPoly| match field.truncation {
        Some(t) => p.mul_truncated(q, &ones, t),
        None => p.mul(q),
    };
    let subst = |p: &SPoly, images: &[SPoly]| match field.truncation {
        Some(t) => p.substitute_truncated(images, &ones, t),
        None => p.substitute(images),
    };
    let mut removed = Vec::new();
    let mut kept: Vec<(usize, Mono)> = Vec::new();
    let state: Vec<usize> = (0..dim).filter(|&i| field.roles[i] == CoordRole::State).collect();
    for _ in 0..ITERATION_CAP {
        // Lowest degree first; within a degree, the heaviest equation first.
        let mut best: Option<(i64, i64, usize, Mono, Surd)> = None;
        for &i in &state {
            let diag = Mono::var(dim, i);
            for (mono, c) in g[i].terms() {
                if *mono == diag || mono.degree() == 0 {
                    continue;
                }
                let d = mono.weighted_degree(&w);
                if d > w[i] || kept.iter().any(|(k, mm)| *k == i && mm == mono) {
                    continue;
                }
                let key = (d, -w[i]);
                if best.as_ref().is_none_or(|b| key < (b.0, b.1)) {
                    best = Some((d, -w[i], i, mono.clone(), c.clone()));
                }
            }
        }
        let Some((d, _, i, alpha, c)) = best else {
            break;
        };
        if d == w[i] {
            kept.push((i, alpha));
            continue;
        }
        let denom = field.sigma.clone() * Surd::from_i64(d - w[i]);
        let a = -(c / denom);
        let alpha_poly = MultiPoly::monomial(&yring, alpha.0.clone(), Surd::one());
        // Images of the old coordinates in the new ones: y_i = y'_i − a·α(y').
        let images: Vec<SPoly> = (0..dim)
            .map(|k| {
                let v = MultiPoly::var(&yring, k);
                if k == i {
                    v.sub(&alpha_poly.scale(&a))
                } else {
                    v
                }
            })
            .collect();
        let mut dalpha = MultiPoly::zero(&yring);
        for (l, gl) in g.iter().enumerate() {
            let dl = alpha_poly.deriv(l);
            if !dl.is_zero() {
                dalpha = dalpha.add(&mul(&dl, gl));
            }
        }
        let gi = g[i].add(&dalpha.scale(&a));
        g = g
            .iter()
            .enumerate()
            .map(|(k, gk)| {
                let src = if k == i { &gi } else { gk };
                subst(src, &images)
            })
            .collect();
        let alpha_h = MultiPoly::monomial(&field.coords, alpha.0.clone(), Surd::one()).substitute(&h);
        h[i] = h[i].add(&alpha_h.scale(&a));
        removed.push(RemovedMonomial {
            equation: i,
            monomial: alpha,
            degree: d,
            coefficient: a,
        });
    }
    // Inverse by back-substitution in ascending weight.
    let order = weight_order(&field.weights);
    let mut inverse: Vec<SPoly> = vec![MultiPoly::zero(&yring); dim];
    let mut done = vec![false; dim];
    for &i in &order {
        let tail = h[i].sub(&MultiPoly::var(&field.coords, i));
        let images: Vec<SPoly> = (0..dim)
            .map(|k| if done[k] { inverse[k].clone() } else { MultiPoly::var(&yring, k) })
            .collect();
        inverse[i] = MultiPoly::var(&yring, i).sub(&tail.substitute(&images));
        done[i] = true;
    }
    let g1: Vec<ResonantTerm> = kept
        .into_iter()
        .map(|(i, mono)| {
            let coefficient = g[i].coeff(&mono.0);
            ResonantTerm {
                equation: i,
                monomial: mono,
                coefficient,
            }
        })
        .filter(|t| !t.coefficient.is_zero())
        .collect();
    let new_field = LocalVectorField {
        coords: yring,
        roles: field.roles.clone(),
        weights: field.weights.clone(),
        sigma: field.sigma.clone(),
        components: g,
        truncation: field.truncation,
    };
    Ok(NormalFormResult {
        source: field.clone(),
        transform: h,
        inverse,
        condition_p: condition_p(&new_field.diagonal_numeric()),
        field: new_field,
        removed,
        g1,
        resonances: resonances(&w, n),
        order: n,
        remainder_degree: w.iter().map(|x| x + 1).collect(),
    })
}

/// Outcome of [`linearizability_certificate`].
#[derive(Clone, Debug, PartialEq)]
pub enum Linearizability {
    /// No resonant term survives through the given degree.
    Certified {
        /// Degree through which the normal form was computed.
        degree: i64,
        /// Whether condition (P) makes the check complete (every resonant
        /// monomial has degree at most the largest weight).
        complete: bool,
    },
    /// Resonant terms obstruct linearisation.
    Obstructed {
        /// The offending terms as `equation: coefficient*monomial`.
        monomials: Vec<String>,
    },
}

/// Certifies linearisability from a normal form.
pub fn linearizability_certificate(nf: &NormalFormResult) -> Linearizability {
    if nf.g1.is_empty() {
        let max_w = nf
            .field
            .integer_weights()
            .and_then(|w| w.into_iter().max())
            .unwrap_or(i64::MAX);
        Linearizability::Certified {
            degree: nf.order,
            complete: nf.condition_p && nf.order >= max_w,
        }
    } else {
        Linearizability::Obstructed {
            monomials: nf
                .g1
                .iter()
                .map(|t| {
                    let mono = MultiPoly::monomial(&nf.field.coords, t.monomial.0.clone(), t.coefficient.clone());
                    format!("{}: {}", nf.field.coords[t.equation], mono.to_expr())
                })
                .collect(),
        }
    }
}
