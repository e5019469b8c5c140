//! Balances, Kovalevskaya matrices and hierarchy closed forms, checked
//! against hand computations and independent recomputation.

use kova::balances::{
    action_image, find_balances, isolation_test, verify_balance, Balance, BalanceCheck, Isolation,
    SearchConfig,
};
use kova::hierarchy;
use kova::kovalevskaya::{
    hamiltonian_pairing_check, invariance_check, kov_matrix, MapDirection, PairingVerdict,
    Semisimple,
};
use kova::poly::{vars, MultiPoly};
use kova::scalar::{int, rat};
use kova::system::{builtin, parse_system};
use kova::{QMatrix, Rational};

fn q(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|&x| int(x)).collect()
}

fn sorted_exponents(sys: &kova::QSystem, c: &[i64]) -> Vec<Rational> {
    let b = Balance::new(sys, q(c)).unwrap();
    let kd = kov_matrix(sys, &b).unwrap();
    assert!(kd.exponents.is_split());
    let mut e = kd.exponents.exact_multiset();
    e.sort();
    e
}

#[test]
fn painleve1_balance_is_valid_and_solves_truncated_system() {
    let sys = builtin("painleve1").unwrap();
    match verify_balance(&sys, &q(&[-2, 1])) {
        BalanceCheck::Valid {
            trivial,
            truncated_solution,
        } => {
            assert!(!trivial);
            assert!(truncated_solution);
        }
        other => panic!("{other:?}"),
    }
    assert!(matches!(
        verify_balance(&sys, &q(&[0, 0])),
        BalanceCheck::Valid { trivial: true, .. }
    ));
    assert!(matches!(
        verify_balance(&sys, &q(&[2, 1])),
        BalanceCheck::Invalid { .. }
    ));
}

#[test]
fn painleve1_has_exactly_one_nonzero_balance() {
    let sys = builtin("painleve1").unwrap();
    let found = find_balances(&sys, &SearchConfig::default()).unwrap();
    let cs: Vec<_> = found.balances.iter().map(|b| b.c.clone()).collect();
    assert_eq!(cs, vec![q(&[-2, 1])]);
    assert!(found.numeric_only.is_empty());
    assert_eq!(found.balances[0].isolation, Some(Isolation::Isolated));
}

#[test]
fn painleve4_balances_include_hand_solutions() {
    let sys = builtin("painleve4").unwrap();
    let found = find_balances(&sys, &SearchConfig::default()).unwrap();
    for c in [[-1, -1], [0, 1], [1, 0]] {
        assert!(
            found.balances.iter().any(|b| b.c == q(&c)),
            "missing balance {c:?}"
        );
    }
    // Hand enumeration: the balance equations have exactly these nonzero roots.
    assert_eq!(found.balances.len(), 3);
    for b in &found.balances {
        let kd = kov_matrix(&sys, b).unwrap();
        let mut e = kd.exponents.exact_multiset();
        e.sort();
        assert_eq!(e, q(&[-1, 3]));
    }
}

#[test]
fn hierarchy_balances_are_found_for_small_members() {
    for m in 1..=4 {
        let inst = hierarchy::generate(m).unwrap();
        let found = find_balances(
            &inst.system,
            &SearchConfig {
                starts: 30,
                ..SearchConfig::default()
            },
        )
        .unwrap();
        let mut got: Vec<_> = found.balances.iter().map(|b| b.c.clone()).collect();
        let mut want = inst.balances.clone();
        got.sort();
        want.sort();
        assert_eq!(got, want, "m = {m}");
        for b in &found.balances {
            assert_eq!(b.isolation, Some(Isolation::Isolated));
        }
    }
}

#[test]
fn hierarchy_second_member_balances_match_closed_form() {
    let inst = hierarchy::generate(2).unwrap();
    assert_eq!(inst.balances[0], q(&[1, -2, 6, -24]));
    assert_eq!(inst.balances[1], q(&[3, -6, 18, -72]));
}

#[test]
fn line_of_balances_is_non_isolated() {
    // x' = x² − x·y, y' = x·y − y² with weights (1, 1): c₁ − c₂ = −1 is a
    // line of balances.
    let sys = parse_system(
        "system line\nvars x y\nweights 1 1 0 1\neq x = x^2 - x*y\neq y = x*y - y^2\n",
    )
    .unwrap();
    let b = Balance::new(&sys, q(&[0, 1])).unwrap();
    let b2 = Balance::new(&sys, q(&[4, 5])).unwrap();
    assert_eq!(isolation_test(&sys, &b).unwrap(), Isolation::NonIsolated);
    assert_eq!(isolation_test(&sys, &b2).unwrap(), Isolation::NonIsolated);
}

#[test]
fn action_maps_balances_to_balances() {
    for name in ["painleve1", "painleve2", "painleve4"] {
        let sys = builtin(name).unwrap();
        for b in find_balances(&sys, &SearchConfig::default()).unwrap().balances {
            let (image, _) = action_image(&sys, &b);
            assert!(matches!(
                verify_balance(&sys, &image),
                BalanceCheck::Valid { .. }
            ));
        }
    }
}

#[test]
fn painleve1_kovalevskaya_matrix() {
    let sys = builtin("painleve1").unwrap();
    let b = Balance::new(&sys, q(&[-2, 1])).unwrap();
    let kd = kov_matrix(&sys, &b).unwrap();
    let want = QMatrix::from_rows(vec![q(&[3, 12]), q(&[1, 2])]).unwrap();
    assert_eq!(kd.k, want);
    let mut e = kd.exponents.exact_multiset();
    e.sort();
    assert_eq!(e, q(&[-1, 6]));
    assert_eq!(kd.semisimple, Semisimple::Yes);
    assert!(kd.semisimple_exact);
    assert_eq!(kd.trivial_eigenvector, q(&[6, -2]));
    assert_eq!(hamiltonian_pairing_check(&kd, 5), PairingVerdict::Consistent);
    assert!(matches!(
        hamiltonian_pairing_check(&kd, 4),
        PairingVerdict::Inconsistent { .. }
    ));
}

#[test]
fn painleve2_kovalevskaya_matrix() {
    let sys = builtin("painleve2").unwrap();
    let b = Balance::new(&sys, q(&[-1, 1])).unwrap();
    let kd = kov_matrix(&sys, &b).unwrap();
    let want = QMatrix::from_rows(vec![q(&[2, 6]), q(&[1, 1])]).unwrap();
    assert_eq!(kd.k, want);
    assert_eq!(sorted_exponents(&sys, &[-1, 1]), q(&[-1, 4]));
}

#[test]
fn second_hierarchy_member_second_balance_exponents() {
    let inst = hierarchy::generate(2).unwrap();
    assert_eq!(
        sorted_exponents(&inst.system, &[3, -6, 18, -72]),
        q(&[-3, -1, 8, 10])
    );
}

#[test]
fn trace_equals_sum_of_exponents() {
    for m in 1..=3 {
        let inst = hierarchy::generate(m).unwrap();
        for c in &inst.balances {
            let b = Balance::new(&inst.system, c.clone()).unwrap();
            let kd = kov_matrix(&inst.system, &b).unwrap();
            let sum: Rational = kd.exponents.exact_multiset().iter().sum();
            assert_eq!(kd.k.trace(), sum);
        }
    }
}

#[test]
fn repeated_minus_one_is_semisimple() {
    // x' = x², y' = 2x² + 4x·y + y²: balance (−1, 1); the eigenvalue −1 is
    // double, and K₂₁ is forced to vanish by the trivial eigenvector.
    let sys = parse_system(
        "system double\nvars x y\nweights 1 1 0 1\neq x = x^2\neq y = 2*x^2 + 4*x*y + y^2\n",
    )
    .unwrap();
    let b = Balance::new(&sys, q(&[-1, 1])).unwrap();
    let kd = kov_matrix(&sys, &b).unwrap();
    let want = QMatrix::from_rows(vec![q(&[-1, 0]), q(&[0, -1])]).unwrap();
    assert_eq!(kd.k, want);
    assert_eq!(kd.semisimple, Semisimple::Yes);
}

#[test]
fn nontrivial_jordan_block_is_not_semisimple() {
    // At c = (−1, 0, 0): K = [[−1,0,0],[0,2,−1],[0,0,2]], a Jordan block
    // for the double exponent 2.
    let sys = parse_system(
        "system jordan\nvars x y w\nweights 1 1 1 0 1\neq x = x^2\neq y = -x*y + x*w\neq w = -x*w\n",
    )
    .unwrap();
    let b = Balance::new(&sys, q(&[-1, 0, 0])).unwrap();
    let kd = kov_matrix(&sys, &b).unwrap();
    let want =
        QMatrix::from_rows(vec![q(&[-1, 0, 0]), q(&[0, 2, -1]), q(&[0, 0, 2])]).unwrap();
    assert_eq!(kd.k, want);
    assert_eq!(kd.semisimple, Semisimple::No);
    assert!(kd.semisimple_exact);
}

#[test]
fn invariance_under_identity_rescaling_and_shear() {
    let sys = builtin("painleve1").unwrap();
    let b = Balance::new(&sys, q(&[-2, 1])).unwrap();
    let xv = vars(&["x", "y"]);
    let id = vec![MultiPoly::var(&xv, 0), MultiPoly::var(&xv, 1)];
    let v = invariance_check(&sys, &id, MapDirection::NewOfOld, &[3, 2], &[b.clone()]).unwrap();
    assert!(v.matches);
    // x = λ₀³ X, y = λ₀² Y with λ₀ = 2.
    let yv = vars(&["y1", "y2"]);
    let resc = vec![
        MultiPoly::var(&yv, 0).scale(&int(8)),
        MultiPoly::var(&yv, 1).scale(&int(4)),
    ];
    let v = invariance_check(&sys, &resc, MapDirection::OldOfNew, &[3, 2], &[b]).unwrap();
    assert!(v.matches);
    assert_eq!(v.entries[0].mapped, Some(vec![rat(-1, 4), rat(1, 4)]));

    let inst = hierarchy::generate(2).unwrap();
    let xv = vars(&["x1", "x2", "x3", "x4"]);
    let x = |i| MultiPoly::var(&xv, i);
    let shear = vec![x(0), x(1), x(2).add(&x(0).pow(2)), x(3)];
    let bs: Vec<Balance> = inst
        .balances
        .iter()
        .map(|c| Balance::new(&inst.system, c.clone()).unwrap())
        .collect();
    let v = invariance_check(&inst.system, &shear, MapDirection::NewOfOld, &[2, 3, 4, 5], &bs)
        .unwrap();
    assert!(v.matches);
    assert_eq!(v.entries.len(), 2);
    assert!(v.entries.iter().all(|e| e.skipped.is_none()));
}

#[test]
fn invariance_rejects_non_quasi_homogeneous_map() {
    let sys = builtin("painleve1").unwrap();
    let xv = vars(&["x", "y"]);
    let bad = vec![MultiPoly::var(&xv, 0).add(&MultiPoly::var(&xv, 1)), MultiPoly::var(&xv, 1)];
    assert!(invariance_check(&sys, &bad, MapDirection::NewOfOld, &[3, 2], &[]).is_err());
}

#[test]
fn hierarchy_three_routes_agree() {
    for m in 1..=4 {
        for cv in hierarchy::cross_validate(m).unwrap() {
            assert!(cv.agree, "m = {m}, k = {}: {cv:?}", cv.k);
            assert!(cv.reflection_symmetric);
        }
    }
}

#[test]
fn hierarchy_closed_form_lists() {
    let e = hierarchy::closed_form_exponents(2, 1).unwrap();
    assert_eq!(e.sorted(), vec![-1, 2, 5, 8]);
    let e = hierarchy::closed_form_exponents(3, 1).unwrap();
    assert_eq!(e.sorted(), vec![-1, 2, 4, 5, 7, 10]);
}
