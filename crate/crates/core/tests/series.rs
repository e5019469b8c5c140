//! Laurent recursion, residual checks and the pole-order screen. The
//! oracle substitutes the truncated series into the original equations with
//! genuine Laurent arithmetic, independently of the scaled recursion.

use kova::balances::Balance;
use kova::hierarchy;
use kova::lpoly::LaurentPoly;
use kova::poly::MultiPoly;
use kova::scalar::int;
use kova::series::{expand, pole_order_screen, ResonanceStatus, ScreenVerdict};
use kova::system::{builtin, parse_system};
use kova::{QPoly, QSystem, Rational};

fn q(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|&x| int(x)).collect()
}

/// Oracle: with `x_i = Σ a_{i,n} T^{n−p_i}` and `z = z0 + T`, every
/// coefficient of `T^k`, `k ≤ N − p_i − 1`, of `dx_i/dT − rhs_i` vanishes.
fn laurent_residual_vanishes(sys: &QSystem, exp: &kova::series::LaurentExpansion) -> bool {
    let ring = exp.ring.clone();
    let t = ring.len() - 1;
    let lift = |p: &QPoly| LaurentPoly::from_poly(p);
    let m = sys.dim();
    let xs: Vec<LaurentPoly<Rational>> = (0..m)
        .map(|i| {
            let mut s = LaurentPoly::zero(&ring);
            for (n, row) in exp.coeffs.iter().enumerate() {
                let shift = n as i32 - sys.weight.p[i] as i32;
                let mut e = vec![0; ring.len()];
                e[t] = shift;
                s = s.add(&lift(&row[i]).shift(&e));
            }
            s
        })
        .collect();
    let z = LaurentPoly::var_pow(&ring, 0, 1).add(&LaurentPoly::var_pow(&ring, t, 1));
    let mut images = xs.clone();
    images.push(z);
    for i in 0..m {
        let rhs = LaurentPoly::from_poly(&sys.rhs(i)).substitute(&images).unwrap();
        let res = xs[i].deriv(t).sub(&rhs);
        let bound = exp.computed as i32 - sys.weight.p[i] as i32 - 1;
        if res.terms().any(|(e, _)| e[t] <= bound) {
            return false;
        }
    }
    true
}

#[test]
fn painleve1_resonance_at_six_is_free() {
    let sys = builtin("painleve1").unwrap();
    let b = Balance::new(&sys, q(&[-2, 1])).unwrap();
    let exp = expand(&sys, &b, 8).unwrap();
    assert_eq!(exp.computed, 8);
    assert_eq!(exp.resonance_positions(), vec![6]);
    assert_eq!(exp.param_count, 1);
    assert_eq!(exp.family_size(), 2);
    assert!(!exp.obstructed());
    assert!(exp.residual_failure(&sys).unwrap().is_none());
    assert!(laurent_residual_vanishes(&sys, &exp));
    // Classical values: y = T^{-2} − z0 T²/10 − T³/6 + …
    let y4 = &exp.coeffs[4][1];
    let ring = exp.ring.clone();
    let z0 = MultiPoly::var(&ring, 0);
    assert_eq!(y4, &z0.scale(&Rational::new((-1).into(), 10.into())));
    assert_eq!(
        exp.coeffs[5][1],
        MultiPoly::constant(&ring, Rational::new((-1).into(), 6.into()))
    );
}

#[test]
fn autonomous_painleve1_coefficients_vanish_below_resonance() {
    let sys = parse_system("system p1a\nvars x y\nweights 3 2 4 5\neq x = 6*y^2\neq y = x\n").unwrap();
    let b = Balance::new(&sys, q(&[-2, 1])).unwrap();
    let exp = expand(&sys, &b, 8).unwrap();
    for n in 1..=5 {
        assert!(exp.coeffs[n].iter().all(|c| c.is_zero()), "order {n}");
    }
    assert_eq!(exp.resonance_positions(), vec![6]);
    assert!(laurent_residual_vanishes(&sys, &exp));
}

#[test]
fn second_hierarchy_member_parameters() {
    let inst = hierarchy::generate(2).unwrap();
    let b = Balance::new(&inst.system, inst.balances[0].clone()).unwrap();
    let exp = expand(&inst.system, &b, 9).unwrap();
    assert_eq!(exp.resonance_positions(), vec![2, 5, 8]);
    assert_eq!(exp.param_count, 3);
    assert_eq!(exp.family_size(), 4);
    assert!(laurent_residual_vanishes(&inst.system, &exp));

    let b = Balance::new(&inst.system, inst.balances[1].clone()).unwrap();
    let exp = expand(&inst.system, &b, 12).unwrap();
    assert_eq!(exp.resonance_positions(), vec![8, 10]);
    assert_eq!(exp.family_size(), 3);
    assert!(exp.residual_failure(&inst.system).unwrap().is_none());
}

#[test]
fn consistent_and_inconsistent_resonances() {
    // Weights (1, 2), balance (−1, 0), K = diag(−1, 2 − a·c₁) for
    // y' = a·x·y + 1. The constant enters the scaled recursion at order
    // p₂ + 1 = 3.
    // a = −3: exponent 5, forcing at the non-resonant order 3.
    let sys = parse_system(
        "system forced\nvars x y\nweights 1 2 0 1\neq x = x^2\neq y = -3*x*y + 1\n",
    )
    .unwrap();
    let b = Balance::new(&sys, q(&[-1, 0])).unwrap();
    let exp = expand(&sys, &b, 6).unwrap();
    assert!(!exp.obstructed());
    assert_eq!(exp.resonance_positions(), vec![5]);
    assert!(laurent_residual_vanishes(&sys, &exp));
    // a = −1: exponent 3, forcing exactly at the resonance.
    let sys = parse_system(
        "system obstructed\nvars x y\nweights 1 2 0 1\neq x = x^2\neq y = -x*y + 1\n",
    )
    .unwrap();
    let b = Balance::new(&sys, q(&[-1, 0])).unwrap();
    let exp = expand(&sys, &b, 6).unwrap();
    assert!(exp.obstructed());
    assert_eq!(exp.computed, 2);
    match &exp.resonance_log.last().unwrap().status {
        ResonanceStatus::LogObstruction { obstruction, .. } => assert!(!obstruction.is_zero()),
        other => panic!("{other:?}"),
    }
}

#[test]
fn hierarchy_family_sizes() {
    for m in 1..=3 {
        let inst = hierarchy::generate(m).unwrap();
        for (k, c) in inst.balances.iter().enumerate() {
            let k = k + 1;
            let b = Balance::new(&inst.system, c.clone()).unwrap();
            let n = 2 * m + 2 * k + 2;
            let exp = expand(&inst.system, &b, n).unwrap();
            assert!(!exp.obstructed());
            assert_eq!(exp.family_size(), 2 * m - k + 1, "m = {m}, k = {k}");
        }
    }
}

#[test]
fn pole_order_screen_cases() {
    let p1 = builtin("painleve1").unwrap();
    assert_eq!(
        pole_order_screen(&p1, &[3, 2], None, true).unwrap(),
        ScreenVerdict::Admissible
    );
    assert_eq!(
        pole_order_screen(&p1, &[1, 1], Some(&q(&[1, 1])), true).unwrap(),
        ScreenVerdict::ForcedHolomorphic
    );
    let h2 = hierarchy::generate(2).unwrap();
    assert_eq!(
        pole_order_screen(&h2.system, &[3, 4, 5, 6], None, true).unwrap(),
        ScreenVerdict::ForcedZeroComponents(vec![0, 1, 2, 3])
    );
    assert_eq!(
        pole_order_screen(&h2.system, &[3, 4, 5, 6], None, false).unwrap(),
        ScreenVerdict::Inconclusive
    );
}

#[test]
fn painleve_verdicts() {
    use kova::charts::Branch;
    use kova::series::{painleve_test, ClassicalVerdict, ExtendedVerdict};

    let sys = builtin("painleve1").unwrap();
    let b = Balance::new(&sys, q(&[-2, 1])).unwrap();
    let v = &painleve_test(&sys, &[b], None, Branch::Standard).unwrap()[0];
    assert_eq!(v.classical, ClassicalVerdict::Pass);
    assert!(matches!(v.extended, ExtendedVerdict::PassAtOrder(11)));
    assert_eq!(v.family_dimension, 2);

    let inst = hierarchy::generate(2).unwrap();
    let bs: Vec<Balance> = inst
        .balances
        .iter()
        .map(|c| Balance::new(&inst.system, c.clone()).unwrap())
        .collect();
    let vs = painleve_test(&inst.system, &bs, Some(12), Branch::Standard).unwrap();
    assert_eq!(vs[0].classical, ClassicalVerdict::Pass);
    assert_eq!(vs[0].family_dimension, 4);
    // Balance II: integral, but −3 fails the strict classical test; the
    // extended test certifies it on the unstable manifold.
    assert!(vs[1].integral);
    assert!(matches!(vs[1].classical, ClassicalVerdict::Fail(_)));
    assert!(matches!(vs[1].extended, ExtendedVerdict::PassAtOrder(_)));
    assert_eq!(vs[1].family_dimension, 3);
}

#[test]
fn half_integer_exponent_fails() {
    use kova::charts::Branch;
    use kova::series::{painleve_test, ClassicalVerdict, ExtendedVerdict};

    // x' = x² + y, y' = 8xy with weights (1, 2 | 0, 1): the balance
    // (−1/4, 3/16) has K with trace 1/2 and determinant −3/2, so its
    // exponents are −1 and 3/2.
    let sys = parse_system("system half\nvars x y\nweights 1 2 0 1\neq x = x^2 + y\neq y = 8*x*y\n").unwrap();
    let bs = kova::balances::balances_of(&sys, 3).unwrap();
    let vs = painleve_test(&sys, &bs, Some(4), Branch::Standard).unwrap();
    let any_half = vs.iter().any(|v| {
        v.exponents.iter().any(|e| e.contains('/'))
            && matches!(&v.classical, ClassicalVerdict::Fail(r) if r.contains("non-integer"))
            && matches!(v.extended, ExtendedVerdict::Fail(_) | ExtendedVerdict::Undetermined(_))
    });
    assert!(any_half, "{:?}", vs.iter().map(|v| &v.exponents).collect::<Vec<_>>());
}
