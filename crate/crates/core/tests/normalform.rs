//! Linear preparation, unstable manifolds and normal forms at fixed points
//! at infinity, checked against hand-computed systems and by brute-force
//! resonance enumeration.

use kova::balances::Balance;
use kova::charts::{infinity_fixed_points, to_chart, Branch, ChartKind};
use kova::expr::parse_surd_poly;
use kova::hierarchy;
use kova::kovalevskaya::kov_matrix;
use kova::normalform::{
    condition_p, linearizability_certificate, normal_form, prepare, resonances,
    unstable_manifold, CoordRole, Linearizability, LocalVectorField, Prepared,
};
use kova::poly::{vars, Mono, MultiPoly};
use kova::scalar::{int, Field};
use kova::surd::Surd;
use kova::system::builtin;
use kova::{QSystem, SPoly};
use num_traits::Zero;
use num_complex::Complex64;

fn prepared(sys: &QSystem, c: &[kova::Rational], j: usize) -> Prepared {
    let b = Balance::new(sys, c.to_vec()).unwrap();
    let cf = to_chart(sys, ChartKind::X(j)).unwrap();
    let (fps, _) = infinity_fixed_points(sys, &cf, &[b.clone()], Branch::Standard).unwrap();
    let kd = kov_matrix(sys, &b).unwrap();
    prepare(sys, &cf, &fps[0], &kd).unwrap()
}

fn sp(ring: &kova::poly::Vars, text: &str) -> SPoly {
    parse_surd_poly(text, ring).unwrap()
}

#[test]
fn second_member_balance_one_preparation() {
    let inst = hierarchy::generate(2).unwrap();
    let p = prepared(&inst.system, &inst.balances[0], 0);
    let r = &p.field.coords;
    assert_eq!(r.as_slice(), ["v1", "v2", "v3", "Z", "eps"]);
    // X̂₂ = v₁, X̂₃ = 4v₁ + v₂, X̂₄ = 20v₁ + 3v₂ + v₃ + Z/2 − ε/2.
    let hat = p.hat_in_v();
    assert_eq!(hat[0], sp(r, "v1"));
    assert_eq!(hat[1], sp(r, "4*v1 + v2"));
    assert_eq!(hat[2], sp(r, "20*v1 + 3*v2 + v3 + Z/2 - eps/2"));
    let f = &p.field.components;
    assert_eq!(f[0], sp(r, "4*v1 - 2*v2 + 3*v1^2"));
    assert_eq!(f[1], sp(r, "10*v2 - 2*v3 - Z + eps + 4*v1^2 + 4*v1*v2"));
    assert_eq!(
        f[2],
        sp(r, "16*v3 + 8*v1^2 + 3*v1*v2 + 5*v1*v3 - v1*Z/2 + v1*eps")
    );
    assert_eq!(f[3], sp(r, "12*Z - 2*eps + 6*v1*Z"));
    assert_eq!(f[4], sp(r, "14*eps + 7*v1*eps"));
    assert_eq!(p.field.sigma, Surd::from_i64(2));
}

#[test]
fn second_member_balance_one_normal_form() {
    let inst = hierarchy::generate(2).unwrap();
    let p = prepared(&inst.system, &inst.balances[0], 0);
    let um = unstable_manifold(&p.field, 15).unwrap();
    assert!(um.phi.is_empty());
    let nf = normal_form(&um.restricted, 15).unwrap();
    let v = &p.field.coords;
    // y₂ = v₂ + a₁v₁², y₃ = v₃ + a₂v₁² + a₃v₁v₂ + a₄v₁³ + a₅v₁⁴ with
    // (a₁, …, a₅) = (3, 1, −1/2, −1/2, 0).
    assert_eq!(nf.transform[0], sp(v, "v1"));
    assert_eq!(nf.transform[1], sp(v, "v2 + 3*v1^2"));
    assert_eq!(nf.transform[2], sp(v, "v3 + v1^2 - v1*v2/2 - v1^3/2"));
    let y = &nf.field.coords;
    let g = &nf.field.components;
    assert_eq!(g[0], sp(y, "4*y1 - 2*y2 + 9*y1^2"));
    assert_eq!(g[1], sp(y, "10*y2 - 2*y3 - Z + eps - 9*y1*y2 + 44*y1^3"));
    assert_eq!(
        g[2],
        sp(y, "16*y3 + 6*y1*y3 + y1*eps/2 + y2^2 - 7*y1^2*y2/2")
    );
    assert_eq!(g[3], sp(y, "12*Z - 2*eps + 6*y1*Z"));
    assert_eq!(g[4], sp(y, "14*eps + 7*y1*eps"));
    assert!(nf.g1.is_empty());
    assert!(nf.condition_p);
    assert!(matches!(
        linearizability_certificate(&nf),
        Linearizability::Certified { complete: true, .. }
    ));
    // Inverse really inverts.
    let back: Vec<SPoly> = nf.transform.iter().map(|h| h.substitute(&nf.inverse)).collect();
    for (i, b) in back.iter().enumerate() {
        assert_eq!(b, &MultiPoly::var(y, i));
    }
}

/// Homological identity: pulling the normal form back through `H`
/// reproduces the original field, `DH(v)·f(v) = g(H(v))`.
#[test]
fn normal_form_conjugates_the_field() {
    let inst = hierarchy::generate(2).unwrap();
    let p = prepared(&inst.system, &inst.balances[0], 0);
    let nf = normal_form(&p.field, 15).unwrap();
    let n = p.field.dim();
    for i in 0..n {
        let lhs = (0..n).fold(MultiPoly::zero(&p.field.coords), |acc, l| {
            acc.add(&nf.transform[i].deriv(l).mul(&p.field.components[l]))
        });
        let rhs = nf.field.components[i].substitute(&nf.transform);
        assert_eq!(lhs, rhs, "component {i}");
    }
}

#[test]
fn second_member_balance_two_unstable_manifold() {
    let inst = hierarchy::generate(2).unwrap();
    let p = prepared(&inst.system, &inst.balances[1], 0);
    let r = &p.field.coords;
    // X̂₃ = 3√3v₁ + v₂ + (3/8)Z − (5√3/8)ε,
    // X̂₄ = 25v₁ + (5√3/3)v₂ + v₃ + (7√3/8)Z − (27/8)ε.
    let hat = p.hat_in_v();
    assert_eq!(hat[1], sp(r, "3*sqrt(3)*v1 + v2 + 3/8*Z - 5*sqrt(3)/8*eps"));
    assert_eq!(
        hat[2],
        sp(r, "25*v1 + 5*sqrt(3)/3*v2 + v3 + 7*sqrt(3)/8*Z - 27/8*eps")
    );
    // Linear part of the stable equation.
    let lin = p.field.components[0].filter(|m| m.degree() == 1);
    assert_eq!(
        lin,
        sp(r, "-2*sqrt(3)*v1 - 2*v2 - 3/4*Z + 5*sqrt(3)/4*eps")
    );
    let um = unstable_manifold(&p.field, 17).unwrap();
    assert_eq!(um.stable, vec![0]);
    assert!(um.residual_ok);
    // φ starts at weighted degree 6 (the Z term).
    let w = [8, 10, 6, 7];
    assert_eq!(um.phi[0].min_weighted_degree(&w), Some(6));
    // Below the threshold the restricted field is linear.
    let nf = normal_form(&um.restricted, 17).unwrap();
    assert!(nf.removed.is_empty());
    assert!(nf.g1.is_empty());
}

#[test]
fn linear_field_has_trivial_manifold_and_normal_form() {
    let ring = vars(&["v1", "v2", "Z", "eps"]);
    let field = LocalVectorField {
        coords: ring.clone(),
        roles: vec![CoordRole::State, CoordRole::State, CoordRole::Z, CoordRole::Eps],
        weights: vec![int(-1), int(3), int(1), int(2)],
        sigma: Surd::from_i64(1),
        components: vec![
            sp(&ring, "-v1"),
            sp(&ring, "3*v2"),
            sp(&ring, "Z"),
            sp(&ring, "2*eps"),
        ],
        truncation: None,
    };
    let um = unstable_manifold(&field, 6).unwrap();
    assert!(um.phi[0].is_zero());
    let nf = normal_form(&um.restricted, 6).unwrap();
    assert!(nf.removed.is_empty());
    for (i, h) in nf.transform.iter().enumerate() {
        assert_eq!(h, &MultiPoly::var(&um.restricted.coords, i));
    }
}

#[test]
fn planted_resonance_is_kept_and_flagged() {
    let ring = vars(&["v1", "Z", "eps"]);
    let field = LocalVectorField {
        coords: ring.clone(),
        roles: vec![CoordRole::State, CoordRole::Z, CoordRole::Eps],
        weights: vec![int(2), int(1), int(1)],
        sigma: Surd::from_i64(1),
        components: vec![
            sp(&ring, "2*v1 + Z*eps + 5*Z^3"),
            sp(&ring, "Z"),
            sp(&ring, "eps"),
        ],
        truncation: None,
    };
    let nf = normal_form(&field, 4).unwrap();
    assert_eq!(nf.g1.len(), 1);
    assert_eq!(nf.g1[0].monomial, Mono(vec![0, 1, 1]));
    match linearizability_certificate(&nf) {
        Linearizability::Obstructed { monomials } => assert_eq!(monomials, vec!["y1: Z*eps"]),
        other => panic!("{other:?}"),
    }
}

#[test]
fn removal_below_threshold() {
    // v' = 3v + Z², Z' = Z, ε' = ε with weights (3, 1, 1): Z² has degree 2 < 4
    // and is removed by y = v + Z² (a = −1/(2 − 3)).
    let ring = vars(&["v1", "Z", "eps"]);
    let field = LocalVectorField {
        coords: ring.clone(),
        roles: vec![CoordRole::State, CoordRole::Z, CoordRole::Eps],
        weights: vec![int(3), int(1), int(1)],
        sigma: Surd::from_i64(1),
        components: vec![sp(&ring, "3*v1 + Z^2"), sp(&ring, "Z"), sp(&ring, "eps")],
        truncation: None,
    };
    let nf = normal_form(&field, 4).unwrap();
    assert_eq!(nf.transform[0], sp(&ring, "v1 + Z^2"));
    assert_eq!(nf.field.components[0], sp(&nf.field.coords, "3*y1"));
}

#[test]
fn resonance_enumeration_is_exhaustive() {
    let w = [2, 5, 8, 6, 7];
    let got = resonances(&w, 15);
    // Brute force over the box of exponents ≤ 8.
    let mut want = Vec::new();
    for (i, &wi) in w.iter().enumerate() {
        for a in 0..9u32 {
            for b in 0..9u32 {
                for c in 0..9u32 {
                    for d in 0..9u32 {
                        for e in 0..9u32 {
                            let ex = [a, b, c, d, e];
                            let deg: i64 = ex.iter().zip(&w).map(|(&x, &y)| x as i64 * y).sum();
                            if deg == wi && ex.iter().sum::<u32>() >= 2 {
                                want.push((i, Mono(ex.to_vec())));
                            }
                        }
                    }
                }
            }
        }
    }
    let mut got_sorted = got.clone();
    got_sorted.sort_by(|a, b| (a.0, &a.1 .0).cmp(&(b.0, &b.1 .0)));
    want.sort_by(|a, b| (a.0, &a.1 .0).cmp(&(b.0, &b.1 .0)));
    assert_eq!(got_sorted, want);
    assert!(got.iter().any(|(i, m)| *i == 2 && m.0 == vec![4, 0, 0, 0, 0]));
}

#[test]
fn convex_hull_condition() {
    let c = |re: f64, im: f64| Complex64::new(re, im);
    assert!(condition_p(&[c(4.0, 0.0), c(10.0, 0.0), c(1.0, 5.0)]));
    assert!(!condition_p(&[c(4.0, 0.0), c(-1.0, 0.0)]));
    assert!(!condition_p(&[c(1.0, 1.0), c(1.0, -1.0), c(-3.0, 0.0)]));
}

#[test]
fn painleve1_is_linearizable_at_infinity() {
    let sys = builtin("painleve1").unwrap();
    let p = prepared(&sys, &[int(-2), int(1)], 1);
    let um = unstable_manifold(&p.field, 11).unwrap();
    let nf = normal_form(&um.restricted, 11).unwrap();
    assert!(nf.g1.is_empty());
    // No resonant monomial carries a nonzero coefficient in the normal form.
    for (i, m) in &nf.resonances {
        assert!(nf.field.components[*i].coeff(&m.0).is_zero());
    }
    assert!(matches!(
        linearizability_certificate(&nf),
        Linearizability::Certified { .. }
    ));
}

/// The stable coordinate of the second balance of the third member has
/// weight −3, so weighted degree is not a filtration of the local field.
/// The manifold jet must not depend on the order it is computed to, and
/// the Laurent family being free of logarithms forces every resonant term
/// of the restricted normal form to vanish.
#[test]
fn third_member_manifold_is_order_independent() {
    let inst = hierarchy::generate(3).unwrap();
    let p = prepared(&inst.system, &inst.balances[1], 0);
    let small = unstable_manifold(&p.field, 6).unwrap();
    let large = unstable_manifold(&p.field, 12).unwrap();
    assert!(small.residual_ok && large.residual_ok);
    assert_eq!(small.taylor_degree, 3);
    assert_eq!(large.taylor_degree, 6);
    let w: Vec<i64> = large.restricted.integer_weights().unwrap();
    for (a, b) in small.phi.iter().zip(&large.phi) {
        assert_eq!(a.truncate_weighted(&w, 6), b.truncate_weighted(&w, 6));
    }
    let nf = normal_form(&large.restricted, 12).unwrap();
    assert!(nf.g1.is_empty(), "{:?}", linearizability_certificate(&nf));
}
