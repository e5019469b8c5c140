//! Weighted blow-ups of normal-formed fields at fixed points at infinity,
//! the gluing maps back to the original variables, and the cyclic actions
//! they inherit from the chart.
//!
//! On the blown-up chart a coordinate of weight `μ` becomes `u·w^μ`, with
//! `Z = z·w^r` and `ε = w^s`. The chart time `t` is eliminated through
//! `dz/dt = −p_j·w`, so the blown-up field is written in the original
//! independent variable `z`. Coordinates marked passive (the stable
//! directions) are carried along without being scaled.

use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::balances::Balance;
use crate::charts::{
    default_chart, homogeneous_weights, infinity_fixed_points, to_chart, to_surd, Branch,
    ChartKind, InfinityFixedPoint,
};
use crate::error::{KovaError, Result};
use crate::kovalevskaya::kov_matrix;
use crate::lpoly::LaurentPoly;
use crate::normalform::{
    normal_form, prepare, unstable_manifold, CoordRole, LocalVectorField, NormalFormResult,
    Prepared, UnstableManifold,
};
use crate::poly::{vars_owned, Mono, MultiPoly, Vars};
use crate::scalar::Field;
use crate::surd::Surd;
use crate::{QSystem, SPoly};

/// Laurent polynomials over the surd field.
pub type SLaurent = LaurentPoly<Surd>;

/// A term with a negative power of `w`.
#[derive(Clone, Debug, PartialEq)]
pub struct PoleTerm {
    /// Name of the blown-up coordinate whose equation contains the term.
    pub component: String,
    /// The term as an expression string.
    pub term: String,
    /// Its power of `w` (negative).
    pub w_order: i32,
}

/// Pole structure of a blown-up field along `w = 0`.
#[derive(Clone, Debug, PartialEq)]
pub enum Holomorphy {
    /// No negative powers of `w`.
    Holomorphic,
    /// Poles of the given maximal order, term by term.
    Pole {
        /// Highest pole order.
        order: i32,
        /// Every polar term.
        terms: Vec<PoleTerm>,
    },
}

impl Holomorphy {
    /// Whether the field is holomorphic.
    pub fn is_holomorphic(&self) -> bool {
        matches!(self, Holomorphy::Holomorphic)
    }
}

/// A field after the weighted blow-up.
#[derive(Clone, Debug)]
pub struct BlowupChart {
    /// Coordinates of the source field.
    pub source_coords: Vars,
    /// Blown-up coordinates, one per source coordinate (`ε ↦ w`,
    /// `Z ↦ z`, `y_i ↦ u_i`; passive ones keep their names).
    pub coords: Vars,
    /// Blow-up weight of every coordinate (0 for passive ones).
    pub weights: Vec<i64>,
    /// Indices of the passive coordinates.
    pub passive: Vec<usize>,
    /// `p_j` of the chart.
    pub p_j: i64,
    /// Images of the source coordinates in the blown-up ring.
    pub substitution: Vec<SLaurent>,
    /// `d/dz` of every blown-up coordinate.
    pub components: Vec<SLaurent>,
    /// Pole verdict.
    pub holomorphy: Holomorphy,
    /// Whether `dz/dz = 1` holds exactly on the blown-up chart.
    pub z_is_time: bool,
    /// Whether the polar part of every equation is exactly the one
    /// predicted by weighted-degree arithmetic on the source terms.
    pub dichotomy_ok: bool,
}

impl BlowupChart {
    /// Index of `w`.
    pub fn w_index(&self) -> usize {
        self.coords.iter().position(|c| c == "w").expect("w is always present")
    }

    /// Components whose coordinate is not passive and not `z`.
    pub fn component_named(&self, name: &str) -> Option<&SLaurent> {
        self.coords.iter().position(|c| c == name).map(|i| &self.components[i])
    }
}

fn blown_name(name: &str, role: CoordRole) -> String {
    match role {
        CoordRole::Eps => "w".into(),
        CoordRole::Z => "z".into(),
        CoordRole::State => match name.strip_prefix('y') {
            Some(rest) if !rest.is_empty() => format!("u{rest}"),
            _ => format!("u_{name}"),
        },
    }
}

fn lsub(p: &SPoly, images: &[SLaurent]) -> SLaurent {
    LaurentPoly::from_poly(p)
        .substitute(images)
        .expect("polynomial substitution needs no inverses")
}

fn one_hot(n: usize, i: usize, k: i32) -> Vec<i32> {
    let mut e = vec![0; n];
    e[i] = k;
    e
}

/// `Φ̃ = G_ε / (s·ε)`; the `ε` equation is always divisible by `ε`.
fn phi_tilde(field: &LocalVectorField, eps: usize, s: i64) -> Result<SPoly> {
    let inv_s = Surd::from_i64(s).try_inv()?;
    let mut out = MultiPoly::zero(&field.coords);
    for (m, c) in field.components[eps].terms() {
        if m.0[eps] == 0 {
            return Err(KovaError::Internal(format!(
                "the ε equation has a term without ε: {}",
                field.components[eps].to_expr()
            )));
        }
        let mut e = m.0.clone();
        e[eps] -= 1;
        out.add_term(Mono(e), c.clone() * inv_s.clone());
    }
    Ok(out)
}

fn weight_of(field: &LocalVectorField, i: usize) -> Result<i64> {
    let w = &field.weights[i];
    if !w.is_integer() {
        return Err(KovaError::Precondition(format!(
            "blow-up weight {w} of {} is not an integer; the classical test must pass first",
            field.coords[i]
        )));
    }
    w.to_integer()
        .to_i64()
        .ok_or_else(|| KovaError::Precondition("weight overflow".into()))
}

/// Blows up `field` at the origin with the weights of its coordinates and
/// rewrites it in the time `z` of a chart with `dz/dt = −p_j·w`.
pub fn blow_up(field: &LocalVectorField, p_j: i64, passive: &[usize]) -> Result<BlowupChart> {
    let n = field.dim();
    let eps = field
        .index_of(CoordRole::Eps)
        .ok_or_else(|| KovaError::Precondition("the field has no ε coordinate".into()))?;
    if p_j <= 0 {
        return Err(KovaError::Precondition(format!("p_j = {p_j} must be positive")));
    }
    let mut weights = vec![0i64; n];
    for i in 0..n {
        if passive.contains(&i) {
            if field.roles[i] != CoordRole::State {
                return Err(KovaError::Precondition("only state coordinates can be passive".into()));
            }
            continue;
        }
        let w = weight_of(field, i)?;
        let ok = match field.roles[i] {
            CoordRole::State | CoordRole::Eps => w > 0,
            CoordRole::Z => w >= 0,
        };
        if !ok {
            return Err(KovaError::Precondition(format!(
                "blow-up weight {w} of {} must be positive",
                field.coords[i]
            )));
        }
        weights[i] = w;
    }
    let s = weights[eps];
    let ring = vars_owned(
        (0..n)
            .map(|i| {
                if passive.contains(&i) {
                    field.coords[i].clone()
                } else {
                    blown_name(&field.coords[i], field.roles[i])
                }
            })
            .collect(),
    );
    let substitution: Vec<SLaurent> = (0..n)
        .map(|i| {
            if passive.contains(&i) {
                LaurentPoly::var_pow(&ring, i, 1)
            } else if i == eps {
                LaurentPoly::var_pow(&ring, eps, s as i32)
            } else {
                LaurentPoly::var_pow(&ring, i, 1).shift(&one_hot(n, eps, weights[i] as i32))
            }
        })
        .collect();
    let phi = lsub(&phi_tilde(field, eps, s)?, &substitution);
    let factor = -Surd::from_i64(p_j).try_inv()?;
    let per_w = one_hot(n, eps, -1);
    let components: Vec<SLaurent> = (0..n)
        .map(|i| {
            if i == eps {
                return phi.scale(&factor);
            }
            let g = lsub(&field.components[i], &substitution);
            let dt = if passive.contains(&i) {
                g
            } else {
                let mu = weights[i];
                let u = LaurentPoly::var_pow(&ring, i, 1);
                g.shift(&one_hot(n, eps, -(mu as i32)))
                    .sub(&u.mul(&phi).scale(&Surd::from_i64(mu)))
            };
            dt.shift(&per_w).scale(&factor)
        })
        .collect();

    let mut terms = Vec::new();
    let mut order = 0;
    for (i, comp) in components.iter().enumerate() {
        for (e, c) in comp.polar_part(eps).terms() {
            let mut t = LaurentPoly::zero(&ring);
            t.add_term(e.clone(), c.clone());
            order = order.max(-e[eps]);
            terms.push(PoleTerm {
                component: ring[i].clone(),
                term: t.to_expr(),
                w_order: e[eps],
            });
        }
    }
    let holomorphy = if terms.is_empty() {
        Holomorphy::Holomorphic
    } else {
        Holomorphy::Pole { order, terms }
    };
    let z_is_time = match field.index_of(CoordRole::Z) {
        Some(z) => components[z] == LaurentPoly::constant(&ring, Surd::one()),
        None => true,
    };

    // Polar part predicted term by term: a monomial `α ≠ y_i` of weighted
    // degree `d` in equation `i` lands at `w^{d − μ_i − 1}`. The diagonal
    // term `σμ_i·y_i` cancels against the constant part of `Φ̃`; what is
    // left of `Φ̃` (nonzero only through passive coordinates) contributes
    // `−μ_i·u_i·(Φ̃ − σ)/(−p_j·w)`.
    let phi_rest = phi.sub(&LaurentPoly::constant(&ring, field.sigma.clone()));
    let mut dichotomy_ok = true;
    for i in 0..n {
        if i == eps || passive.contains(&i) {
            continue;
        }
        let mu = weights[i];
        let mut predicted = LaurentPoly::var_pow(&ring, i, 1)
            .mul(&phi_rest)
            .scale(&Surd::from_i64(-mu))
            .shift(&per_w)
            .scale(&factor)
            .polar_part(eps);
        for (m, c) in field.components[i].terms() {
            let diagonal = m.0 == Mono::var(n, i).0;
            if diagonal {
                continue;
            }
            let mut img = LaurentPoly::constant(&ring, c.clone());
            for (k, &ek) in m.0.iter().enumerate() {
                img = img.mul(&substitution[k].pow(ek));
            }
            let scaled = img.shift(&one_hot(n, eps, -(mu as i32) - 1)).scale(&factor);
            predicted = predicted.add(&scaled.polar_part(eps));
        }
        if predicted != components[i].polar_part(eps) {
            dichotomy_ok = false;
        }
    }

    Ok(BlowupChart {
        source_coords: field.coords.clone(),
        coords: ring,
        weights,
        passive: passive.to_vec(),
        p_j,
        substitution,
        components,
        holomorphy,
        z_is_time,
        dichotomy_ok,
    })
}

/// The prepared field with the normal-form transformation applied to the
/// unstable coordinates; the stable coordinates are kept as they are. The
/// result is an exact polynomial field in `(v_s…, y…, Z, ε)`.
pub fn full_normal_field(
    prepared: &Prepared,
    um: &UnstableManifold,
    nf: &NormalFormResult,
) -> Result<LocalVectorField> {
    let src = &prepared.field;
    let n = src.dim();
    let names: Vec<String> = (0..n)
        .map(|i| match um.kept.iter().position(|&k| k == i) {
            Some(c) => nf.field.coords[c].clone(),
            None => src.coords[i].clone(),
        })
        .collect();
    let ring = vars_owned(names);
    let images: Vec<SPoly> = (0..n)
        .map(|i| match um.kept.iter().position(|&k| k == i) {
            Some(c) => nf.inverse[c].embed(&ring),
            None => Ok(MultiPoly::var(&ring, i)),
        })
        .collect::<Result<_>>()?;
    let sub: Vec<SPoly> = src.components.iter().map(|f| f.substitute(&images)).collect();
    let kept_images: Vec<SPoly> = um.kept.iter().map(|&i| images[i].clone()).collect();
    let components: Vec<SPoly> = (0..n)
        .map(|i| match um.kept.iter().position(|&k| k == i) {
            Some(c) => um.kept.iter().enumerate().fold(MultiPoly::zero(&ring), |acc, (l, &src_l)| {
                let d = nf.transform[c].deriv(l);
                if d.is_zero() {
                    acc
                } else {
                    acc.add(&d.substitute(&kept_images).mul(&sub[src_l]))
                }
            }),
            None => sub[i].clone(),
        })
        .collect();
    Ok(LocalVectorField {
        coords: ring,
        roles: src.roles.clone(),
        weights: (0..n)
            .map(|i| match um.kept.iter().position(|&k| k == i) {
                Some(c) => nf.field.weights[c].clone(),
                None => src.weights[i].clone(),
            })
            .collect(),
        sigma: src.sigma.clone(),
        components,
        truncation: None,
    })
}

/// Images of the prepared coordinates `v` in the blown-up ring of the full
/// field.
fn v_images(um: &UnstableManifold, nf: &NormalFormResult, full: &BlowupChart) -> Vec<SLaurent> {
    let n = full.coords.len();
    let kept_subst: Vec<SLaurent> = um.kept.iter().map(|&i| full.substitution[i].clone()).collect();
    (0..n)
        .map(|i| match um.kept.iter().position(|&k| k == i) {
            Some(c) => lsub(&nf.inverse[c], &kept_subst),
            None => full.substitution[i].clone(),
        })
        .collect()
}

/// Chart coordinates `fixed point + T·v` in the blown-up ring.
fn chart_images(prepared: &Prepared, v: &[SLaurent], ring: &Vars) -> Vec<SLaurent> {
    let n = prepared.t.rows();
    (0..n)
        .map(|i| {
            let mut acc = LaurentPoly::constant(ring, prepared.fixed_point[i].clone());
            for (l, vl) in v.iter().enumerate() {
                let c = prepared.t.get(i, l);
                if !c.is_zero() {
                    acc = acc.add(&vl.scale(c));
                }
            }
            acc
        })
        .collect()
}

/// The map from the blown-up chart back to the original variables.
#[derive(Clone, Debug)]
pub struct GluingMap {
    /// The blown-up coordinates.
    pub coords: Vars,
    /// `x_i` for every original state variable.
    pub forward: Vec<SLaurent>,
    /// `P_i` with `x_i = P_i·w^{−p_i}`.
    pub brackets: Vec<SPoly>,
    /// Weights `p_i`.
    pub p: Vec<i64>,
    /// Original state-variable names.
    pub names: Vec<String>,
    /// Whether `x_j = w^{−p_j}` exactly.
    pub divisor_bookkeeping: bool,
    /// Whether the blown-up field, pushed forward through the map, equals
    /// the original system.
    pub pullback_ok: bool,
}

impl GluingMap {
    /// `x_i = (P_i)*w^-p_i` strings.
    pub fn display(&self) -> Vec<String> {
        self.names
            .iter()
            .zip(&self.brackets)
            .zip(&self.p)
            .map(|((n, b), p)| format!("{n} = ({})*w^-{p}", b.to_expr()))
            .collect()
    }
}

/// Composes the chart, linear, normal-form and blow-up substitutions into
/// the original variables and checks the pushforward of the blown-up field.
pub fn gluing_map(
    sys: &QSystem,
    prepared: &Prepared,
    um: &UnstableManifold,
    nf: &NormalFormResult,
    full: &BlowupChart,
) -> Result<GluingMap> {
    let m = sys.dim();
    let j = prepared.chart;
    let ring = full.coords.clone();
    let nr = ring.len();
    let w = full.w_index();
    let v = v_images(um, nf, full);
    let chart = chart_images(prepared, &v, &ring);
    let p = sys.weight.p.clone();
    let mut forward = Vec::with_capacity(m);
    let mut brackets = Vec::with_capacity(m);
    for i in 0..m {
        let bracket = if i == j {
            LaurentPoly::constant(&ring, Surd::one())
        } else {
            chart[if i < j { i } else { i - 1 }].clone()
        };
        brackets.push(bracket.to_poly().ok_or_else(|| {
            KovaError::Internal(format!("gluing bracket of x{} has poles", i + 1))
        })?);
        forward.push(bracket.shift(&one_hot(nr, w, -(p[i] as i32))));
    }
    let divisor_bookkeeping = forward[j] == LaurentPoly::var_pow(&ring, w, -(p[j] as i32));

    let zi = full
        .coords
        .iter()
        .position(|c| c == "z")
        .ok_or_else(|| KovaError::Internal("no z coordinate on the blown-up chart".into()))?;
    let mut images = forward.clone();
    images.push(LaurentPoly::var_pow(&ring, zi, 1));
    let pullback_ok = full.z_is_time
        && (0..m).all(|i| {
            let lhs = (0..nr).fold(LaurentPoly::zero(&ring), |acc, q| {
                acc.add(&forward[i].deriv(q).mul(&full.components[q]))
            });
            let rhs = lsub(&to_surd(&sys.rhs(i)), &images);
            lhs == rhs
        });
    Ok(GluingMap {
        coords: ring,
        forward,
        brackets,
        p,
        names: sys.state_names(),
        divisor_bookkeeping,
        pullback_ok,
    })
}

/// The cyclic action of the chart carried to the blown-up coordinates.
#[derive(Clone, Debug)]
pub struct InducedAction {
    /// Order of the group (`p_j`).
    pub order: i64,
    /// Image of every blown-up coordinate.
    pub images: Vec<SLaurent>,
    /// Whether the gluing map is invariant: `x∘Ψ = x`.
    pub gluing_invariant: bool,
    /// Whether the blown-up field is invariant: `F∘Ψ = DΨ·F`.
    pub field_invariant: bool,
}

impl InducedAction {
    /// `coordinate ↦ image` strings.
    pub fn display(&self, coords: &Vars) -> Vec<String> {
        coords
            .iter()
            .zip(&self.images)
            .map(|(c, img)| format!("{c} -> {}", img.to_expr()))
            .collect()
    }
}

/// Conjugates the chart action `X_i ↦ ζ^{W_i}X_i` through the gluing chain.
/// Supported for `p_j ≤ 2`, where `ζ = ±1` stays in the coefficient field;
/// returns `None` otherwise.
pub fn induced_action(
    sys: &QSystem,
    prepared: &Prepared,
    um: &UnstableManifold,
    nf: &NormalFormResult,
    full: &BlowupChart,
    gluing: &GluingMap,
) -> Result<Option<InducedAction>> {
    let ring = full.coords.clone();
    let n = ring.len();
    let w = full.w_index();
    let identity: Vec<SLaurent> = (0..n).map(|i| LaurentPoly::var_pow(&ring, i, 1)).collect();
    let images = match full.p_j {
        1 => identity,
        2 => {
            let hw = homogeneous_weights(sys);
            let j = prepared.chart;
            let chart_w: Vec<i64> = (0..hw.len()).filter(|&h| h != j).map(|h| hw[h]).collect();
            let v = v_images(um, nf, full);
            let x = chart_images(prepared, &v, &ring);
            let minus = -Surd::one();
            let shifted: Vec<SLaurent> = x
                .iter()
                .enumerate()
                .map(|(i, xi)| {
                    let img = if chart_w[i] % 2 == 0 { xi.clone() } else { xi.scale(&minus) };
                    img.sub(&LaurentPoly::constant(&ring, prepared.fixed_point[i].clone()))
                })
                .collect();
            let v_new: Vec<SLaurent> = (0..n)
                .map(|i| {
                    (0..n).fold(LaurentPoly::zero(&ring), |acc, l| {
                        let c = prepared.t_inv.get(i, l);
                        if c.is_zero() {
                            acc
                        } else {
                            acc.add(&shifted[l].scale(c))
                        }
                    })
                })
                .collect();
            let kept_v: Vec<SLaurent> = um.kept.iter().map(|&i| v_new[i].clone()).collect();
            (0..n)
                .map(|i| match um.kept.iter().position(|&k| k == i) {
                    None => v_new[i].clone(),
                    Some(_) if i == w => identity[w].scale(&minus),
                    Some(c) => {
                        let y = lsub(&nf.transform[c], &kept_v);
                        let mu = full.weights[i];
                        let sign = if mu % 2 == 0 { Surd::one() } else { minus.clone() };
                        y.shift(&one_hot(n, w, -(mu as i32))).scale(&sign)
                    }
                })
                .collect()
        }
        _ => return Ok(None),
    };
    let compose = |p: &SLaurent| {
        p.substitute(&images)
            .ok_or_else(|| KovaError::Internal("non-monomial image of w".into()))
    };
    let mut gluing_invariant = true;
    for x in &gluing.forward {
        gluing_invariant &= &compose(x)? == x;
    }
    let mut field_invariant = true;
    for a in 0..n {
        let lhs = compose(&full.components[a])?;
        let rhs = (0..n).fold(LaurentPoly::zero(&ring), |acc, b| {
            acc.add(&images[a].deriv(b).mul(&full.components[b]))
        });
        field_invariant &= lhs == rhs;
    }
    Ok(Some(InducedAction {
        order: full.p_j,
        images,
        gluing_invariant,
        field_invariant,
    }))
}

/// `dw/dz` on the exceptional divisor, compared with `c_j·ρ^{−(1+p_j)}`.
#[derive(Clone, Debug)]
pub struct DivisorCheck {
    /// `dw/dz` at `w = 0` when it is a constant.
    pub value: Option<Surd>,
    /// `c_j·ρ^{−(1+p_j)} = 1/ρ`.
    pub expected: Surd,
    /// Whether both agree and are nonzero.
    pub ok: bool,
}

fn divisor_check(blown: &BlowupChart, fp: &InfinityFixedPoint) -> DivisorCheck {
    let w = blown.w_index();
    let comp = &blown.components[w];
    let n = blown.coords.len();
    let on_divisor: Vec<(Vec<i32>, Surd)> = comp
        .terms()
        .filter(|(e, _)| e[w] == 0)
        .map(|(e, c)| (e.clone(), c.clone()))
        .collect();
    let value = if on_divisor.iter().all(|(e, _)| e.iter().all(|&x| x == 0)) {
        Some(comp.coeff(&vec![0; n]))
    } else {
        None
    };
    let c_j = Surd::from_rational(&fp.balance.c[fp.chart]);
    let expected = c_j * fp.rho.powi(-(1 + blown.p_j));
    let ok = value.as_ref().is_some_and(|v| v == &expected && !v.is_zero());
    DivisorCheck { value, expected, ok }
}

/// Default truncation order: the largest positive integer exponent plus `s`.
pub fn default_order(exponents: &[i64], s: i64) -> i64 {
    exponents.iter().copied().max().unwrap_or(0) + s
}

/// The full Step 1–5 chain for one balance.
#[derive(Clone, Debug)]
pub struct Resolution {
    /// The balance.
    pub balance: Balance,
    /// Chart index `j`.
    pub chart: usize,
    /// Truncation order `N`.
    pub order: i64,
    /// The fixed point at infinity.
    pub fixed_point: InfinityFixedPoint,
    /// Linear preparation.
    pub prepared: Prepared,
    /// Unstable-manifold graph.
    pub manifold: UnstableManifold,
    /// Normal form of the field on the manifold.
    pub normal_form: NormalFormResult,
    /// Blow-up of the normal form on the manifold (the holomorphy
    /// certificate).
    pub blowup: BlowupChart,
    /// Blow-up of the full field with the stable coordinates passive.
    pub full: BlowupChart,
    /// Gluing map of the full chart.
    pub gluing: GluingMap,
    /// Induced cyclic action (`None` when `p_j > 2`).
    pub action: Option<InducedAction>,
    /// Exceptional-divisor check.
    pub divisor: DivisorCheck,
}

/// Runs chart selection, linear preparation, the unstable manifold, the
/// normal form, the blow-up, the gluing map and the induced action.
pub fn resolve(
    sys: &QSystem,
    balance: &Balance,
    chart: Option<usize>,
    branch: Branch,
    order: Option<i64>,
) -> Result<Resolution> {
    let j = match chart {
        Some(j) => j,
        None => default_chart(sys, balance).ok_or_else(|| {
            KovaError::Precondition(format!("balance {} has no usable chart", balance.display()))
        })?,
    };
    if j >= sys.dim() {
        return Err(KovaError::Precondition(format!("chart index {} out of range", j + 1)));
    }
    let kd = kov_matrix(sys, balance)?;
    let order = order.unwrap_or_else(|| default_order(&kd.positive_integer_exponents(), sys.weight.s));
    let cf = to_chart(sys, ChartKind::X(j))?;
    let (mut fps, _) = infinity_fixed_points(sys, &cf, std::slice::from_ref(balance), branch)?;
    let fixed_point = fps.pop().ok_or_else(|| {
        KovaError::Precondition(format!("balance {} has c_{} = 0", balance.display(), j + 1))
    })?;
    let prepared = prepare(sys, &cf, &fixed_point, &kd)?;
    // Poles after the blow-up come from terms of weighted degree at most
    // the largest unstable state weight, so the invariant-manifold jet is
    // sized for that degree (capped by the declared order).
    let pole_degree = prepared
        .field
        .weights
        .iter()
        .zip(&prepared.field.roles)
        .filter(|(w, r)| **r == CoordRole::State && w.is_positive())
        .filter_map(|(w, _)| w.ceil().to_integer().to_i64())
        .max()
        .unwrap_or(1)
        .min(order);
    let manifold = unstable_manifold(&prepared.field, pole_degree)?;
    let nf = normal_form(&manifold.restricted, order)?;
    let p_j = sys.weight.p[j];
    let blowup = blow_up(&nf.field, p_j, &[])?;
    let full_field = full_normal_field(&prepared, &manifold, &nf)?;
    let full = blow_up(&full_field, p_j, &manifold.stable)?;
    let gluing = gluing_map(sys, &prepared, &manifold, &nf, &full)?;
    let action = induced_action(sys, &prepared, &manifold, &nf, &full, &gluing)?;
    let divisor = divisor_check(&blowup, &fixed_point);
    Ok(Resolution {
        balance: balance.clone(),
        chart: j,
        order,
        fixed_point,
        prepared,
        manifold,
        normal_form: nf,
        blowup,
        full,
        gluing,
        action,
        divisor,
    })
}

/// Chart data of every balance: the original chart plus one blown-up chart
/// per balance that resolves, with the failures recorded by index.
#[derive(Clone, Debug)]
pub struct Atlas {
    /// Resolved balances.
    pub charts: Vec<Resolution>,
    /// `(balance index, reason)` for balances that did not resolve.
    pub failures: Vec<(usize, String)>,
}

/// Resolves every balance independently.
pub fn atlas(sys: &QSystem, balances: &[Balance], branch: Branch, order: Option<i64>) -> Atlas {
    let mut charts = Vec::new();
    let mut failures = Vec::new();
    for (i, b) in balances.iter().enumerate() {
        match resolve(sys, b, None, branch, order) {
            Ok(r) => charts.push(r),
            Err(e) => failures.push((i, e.to_string())),
        }
    }
    Atlas { charts, failures }
}
