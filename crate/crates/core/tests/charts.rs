//! Chart fields, cyclic actions, transition maps and fixed points at
//! infinity, checked against hand-derived chart equations.

use kova::balances::Balance;
use kova::charts::{
    all_charts, chart_consistency, default_chart, fixed_point_bridge, infinity_fixed_points,
    is_pushforward, local_field, to_chart, transition, Branch, BridgeVerdict, ChartKind,
};
use kova::hierarchy;
use kova::kovalevskaya::kov_matrix;
use kova::scalar::{int, Field};
use kova::surd::{Surd, SurdField};
use kova::system::{builtin, parse_system};
use kova::{QPoly, Rational};
use num_traits::Zero;

fn q(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|&x| int(x)).collect()
}

/// Parses a polynomial in the chart ring.
fn poly_in(cf: &kova::charts::ChartField, text: &str) -> QPoly {
    kova::expr::parse_poly(text, &cf.coords).unwrap()
}

#[test]
fn painleve1_x_chart_matches_hand_computation() {
    let sys = builtin("painleve1").unwrap();
    let cf = to_chart(&sys, ChartKind::X(0)).unwrap();
    assert_eq!(cf.coords.as_slice(), ["Y", "Z", "eps"]);
    assert_eq!(cf.weights, vec![2, 4, 5]);
    assert_eq!(cf.chart.order, 3);
    // dY/dε = (3 − 12Y³ − 2YZ)/(ε(−30Y² − 5Z)): numerator and denominator
    // of the polynomial form, up to the common factor −1.
    let dy = &cf.polynomial[0];
    let de = &cf.polynomial[2];
    assert_eq!(dy.neg(), poly_in(&cf, "3 - 12*Y^3 - 2*Y*Z"));
    assert_eq!(de.neg(), poly_in(&cf, "-30*Y^2*eps - 5*Z*eps"));
    assert_eq!(cf.denominator, poly_in(&cf, "6*Y^2 + Z"));
    assert_eq!(cf.polynomial[1], poly_in(&cf, "24*Y^2*Z + 4*Z^2 - 3*eps"));
    assert!(cf.action_invariant());
}

#[test]
fn second_hierarchy_member_first_chart() {
    let inst = hierarchy::generate(2).unwrap();
    let cf = to_chart(&inst.system, ChartKind::X(0)).unwrap();
    assert_eq!(cf.coords.as_slice(), ["X2", "X3", "X4", "Z", "eps"]);
    assert_eq!(cf.polynomial[0], poly_in(&cf, "3*X2^2 - 2*X3"));
    assert_eq!(cf.polynomial[4], poly_in(&cf, "7*X2*eps"));
    assert_eq!(cf.polynomial[3], poly_in(&cf, "6*Z*X2 - 2*eps"));
    assert_eq!(cf.denominator, poly_in(&cf, "X2"));
    // Z₂ acts by (X2, X3, X4, Z, ε) ↦ (−X2, X3, −X4, Z, −ε).
    assert_eq!(cf.action, vec![1, 0, 1, 0, 1]);
    assert!(cf.action_invariant());
}

#[test]
fn every_chart_is_consistent() {
    let mut systems = vec![
        builtin("painleve1").unwrap(),
        builtin("painleve2").unwrap(),
        builtin("painleve4").unwrap(),
    ];
    for m in 1..=3 {
        systems.push(hierarchy::generate(m).unwrap().system);
    }
    for sys in &systems {
        let c = chart_consistency(sys).unwrap();
        assert!(c.all(), "{}: {c:?}", sys.name);
    }
}

#[test]
fn one_dimensional_autonomous_chart() {
    // x' = x², p = 1, r = 0, s = 1. With x = ε^{−1}: Φ̃_x = 1, so the chart
    // field is dZ/dt = −ε, dε/dt = ε; the balance c = −1 sits at the origin.
    let sys = parse_system("system square\nvars x\nweights 1 0 1\neq x = x^2\n").unwrap();
    let charts = all_charts(&sys).unwrap();
    assert_eq!(charts.len(), 2);
    assert!(to_chart(&sys, ChartKind::Z).is_err());
    let cf = &charts[0];
    assert_eq!(cf.coords.as_slice(), ["Z", "eps"]);
    assert_eq!(cf.polynomial[0], poly_in(cf, "-eps"));
    assert_eq!(cf.polynomial[1], poly_in(cf, "eps"));
    assert!(is_pushforward(&sys, cf));
    let b = Balance::new(&sys, q(&[-1])).unwrap();
    let (fps, _) = infinity_fixed_points(&sys, cf, &[b.clone()], Branch::Standard).unwrap();
    assert!(fps[0].vanishes);
    let kd = kov_matrix(&sys, &b).unwrap();
    match fixed_point_bridge(&sys, &fps[0], &kd, false).unwrap() {
        BridgeVerdict::Verified { sigma, .. } => assert_eq!(sigma.unwrap(), Surd::from_rational(&int(1))),
        other => panic!("{other:?}"),
    }
}

#[test]
fn transitions_compose() {
    let w = [2, 3, 4, 5, 6, 7];
    for k in 0..6 {
        assert!(transition(&w, k, 5).then(&transition(&w, 5, k)).unwrap().is_identity());
        assert!(transition(&w, k, k).is_identity());
    }
    let lhs = transition(&w, 0, 2).then(&transition(&w, 2, 4)).unwrap();
    assert_eq!(lhs, transition(&w, 0, 4));
}

#[test]
fn painleve1_fixed_point_branches() {
    let sys = builtin("painleve1").unwrap();
    let b = Balance::new(&sys, q(&[-2, 1])).unwrap();
    assert_eq!(default_chart(&sys, &b), Some(1));
    let kd = kov_matrix(&sys, &b).unwrap();
    let cf = to_chart(&sys, ChartKind::X(1)).unwrap();
    for (branch, x) in [(Branch::Standard, 2), (Branch::Principal, -2)] {
        let (fps, skipped) = infinity_fixed_points(&sys, &cf, &[b.clone()], branch).unwrap();
        assert!(skipped.is_empty());
        let fp = &fps[0];
        assert!(fp.vanishes);
        assert_eq!(fp.coords[0], Surd::from_rational(&int(x)));
        match fixed_point_bridge(&sys, fp, &kd, false).unwrap() {
            BridgeVerdict::Verified { sigma, exact, .. } => {
                assert!(exact);
                assert_eq!(sigma.unwrap(), Surd::from_rational(&int(x)));
            }
            other => panic!("{other:?}"),
        }
        match fixed_point_bridge(&sys, fp, &kd, true).unwrap() {
            BridgeVerdict::Verified { sigma, .. } => assert_eq!(sigma.unwrap(), Surd::from_rational(&int(1))),
            other => panic!("{other:?}"),
        }
    }
}

#[test]
fn second_hierarchy_member_fixed_points() {
    let inst = hierarchy::generate(2).unwrap();
    let sys = &inst.system;
    let cf = to_chart(sys, ChartKind::X(0)).unwrap();
    let bs: Vec<Balance> = inst
        .balances
        .iter()
        .map(|c| Balance::new(sys, c.clone()).unwrap())
        .collect();
    let (fps, _) = infinity_fixed_points(sys, &cf, &bs, Branch::Standard).unwrap();

    // Balance I: (2, 6, 24, 0, 0), spectrum {4, 10, 16, 12, 14}, σ = 2.
    let fp = &fps[0];
    let want: Vec<Surd> = q(&[2, 6, 24, 0, 0]).iter().map(Surd::from_rational).collect();
    assert_eq!(fp.coords, want);
    assert!(fp.vanishes);
    let spec: Vec<f64> = fp.spectrum_numeric.iter().map(|z| z.re).collect();
    for (got, want) in spec.iter().zip([4.0, 10.0, 12.0, 14.0, 16.0]) {
        assert!((got - want).abs() < 1e-8, "{spec:?}");
    }
    let kd = kov_matrix(sys, &bs[0]).unwrap();
    match fixed_point_bridge(sys, fp, &kd, false).unwrap() {
        BridgeVerdict::Verified { sigma, exact, .. } => {
            assert!(exact);
            assert_eq!(sigma.unwrap(), Surd::from_rational(&int(2)));
        }
        other => panic!("{other:?}"),
    }

    // Balance II: (2/√3, 2, 8/√3, 0, 0), σ = 2/√3.
    let fp = &fps[1];
    let sqrt3 = SurdField::new(&int(3), 2).unwrap().gen_elem();
    let two = Surd::from_rational(&int(2));
    let want = vec![
        two.clone() / sqrt3.clone(),
        two.clone(),
        Surd::from_rational(&int(8)) / sqrt3.clone(),
        Surd::zero(),
        Surd::zero(),
    ];
    assert_eq!(fp.coords, want);
    assert!(fp.vanishes);
    let kd = kov_matrix(sys, &bs[1]).unwrap();
    match fixed_point_bridge(sys, fp, &kd, false).unwrap() {
        BridgeVerdict::Verified { sigma, exact, .. } => {
            assert!(exact);
            assert_eq!(sigma.unwrap(), two / sqrt3);
        }
        other => panic!("{other:?}"),
    }
    assert!((fp.phi_j.to_complex().re - 2.0 / 3f64.sqrt()).abs() < 1e-12);
}

#[test]
fn local_field_vanishes_at_origin() {
    let inst = hierarchy::generate(2).unwrap();
    let sys = &inst.system;
    let cf = to_chart(sys, ChartKind::X(0)).unwrap();
    let b = Balance::new(sys, inst.balances[0].clone()).unwrap();
    let (fps, _) = infinity_fixed_points(sys, &cf, &[b], Branch::Standard).unwrap();
    let lf = local_field(&cf, &fps[0].coords);
    for (i, f) in lf.iter().enumerate() {
        assert!(f.constant_term().is_zero());
        for j in 0..lf.len() {
            let lin = f.coeff(&{
                let mut e = vec![0; lf.len()];
                e[j] = 1;
                e
            });
            assert_eq!(&lin, fps[0].jacobian.get(i, j));
        }
    }
}

#[test]
fn balances_off_the_chart_are_skipped() {
    let sys = builtin("painleve4").unwrap();
    let cf = to_chart(&sys, ChartKind::X(0)).unwrap();
    let bs: Vec<Balance> = [[-1, -1], [0, 1], [1, 0]]
        .iter()
        .map(|c| Balance::new(&sys, q(c)).unwrap())
        .collect();
    let (fps, skipped) = infinity_fixed_points(&sys, &cf, &bs, Branch::Standard).unwrap();
    assert_eq!(skipped, vec![1]);
    assert_eq!(fps.len(), 2);
    for fp in &fps {
        assert!(fp.vanishes);
        let kd = kov_matrix(&sys, &fp.balance).unwrap();
        assert!(fixed_point_bridge(&sys, fp, &kd, false).unwrap().verified());
    }
}
