//! Weighted blow-ups, gluing maps and induced actions on the second member
//! of the first Painlevé hierarchy and on small planted examples.

use kova::balances::Balance;
use kova::expr::parse_surd_poly;
use kova::blowup::{blow_up, resolve, Holomorphy, SLaurent};
use kova::charts::Branch;
use kova::hierarchy;
use kova::lpoly::LaurentPoly;
use kova::normalform::{CoordRole, LocalVectorField};
use kova::poly::{vars, Vars};
use kova::scalar::{int, Field};
use kova::surd::Surd;
use kova::system::builtin;
use kova::SPoly;
use num_traits::One;

fn sp(ring: &Vars, text: &str) -> SPoly {
    parse_surd_poly(text, ring).unwrap()
}

/// `text·w^k` as a Laurent polynomial.
fn lp(ring: &Vars, text: &str, w_shift: i32) -> SLaurent {
    let w = ring.iter().position(|c| c == "w").unwrap();
    let mut e = vec![0; ring.len()];
    e[w] = w_shift;
    LaurentPoly::from_poly(&sp(ring, text)).shift(&e)
}

fn second_member(balance: usize) -> kova::blowup::Resolution {
    let inst = hierarchy::generate(2).unwrap();
    let b = Balance::new(&inst.system, inst.balances[balance].clone()).unwrap();
    resolve(&inst.system, &b, Some(0), Branch::Standard, None).unwrap()
}

#[test]
fn balance_one_blown_up_field() {
    let r = second_member(0);
    assert_eq!(r.order, 15);
    let b = &r.blowup;
    let ring = &b.coords;
    assert_eq!(ring.as_slice(), ["u1", "u2", "u3", "z", "w"]);
    assert_eq!(b.weights, vec![2, 5, 8, 6, 7]);
    assert!(b.holomorphy.is_holomorphic());
    assert!(b.z_is_time);
    assert!(b.dichotomy_ok);
    let c = &b.components;
    assert_eq!(c[0], lp(ring, "u2*w^2 - 7/2*u1^2*w", 0));
    assert_eq!(
        c[1],
        lp(ring, "-22*u1^3 + 7*u1*u2*w + u3*w^2 - w/2 + z/2", 0)
    );
    assert_eq!(
        c[2],
        lp(ring, "u1*u3*w - u1/4 + 7/4*u1^2*u2 - u2^2*w/2", 0)
    );
    assert_eq!(c[3], lp(ring, "1", 0));
    assert_eq!(c[4], lp(ring, "-1 - u1*w^2/2", 0));
    assert!(r.divisor.ok);
    assert_eq!(r.divisor.value, Some(Surd::from_i64(-1)));
}

#[test]
fn balance_one_gluing_map() {
    let r = second_member(0);
    let g = &r.gluing;
    let ring = &g.coords;
    assert!(g.divisor_bookkeeping);
    assert!(g.pullback_ok);
    assert_eq!(g.p, vec![2, 3, 4, 5]);
    assert_eq!(g.brackets[0], sp(ring, "1"));
    assert_eq!(g.brackets[1], sp(ring, "2 + u1*w^2"));
    assert_eq!(g.brackets[2], sp(ring, "6 + 4*u1*w^2 - 3*u1^2*w^4 + u2*w^5"));
    assert_eq!(
        g.brackets[3],
        sp(
            ring,
            "24 + 20*u1*w^2 - 10*u1^2*w^4 + 3*u2*w^5 - u1^3*w^6 - w^7/2 + u1*u2*w^7/2 + u3*w^8 + w^6*z/2"
        )
    );
}

#[test]
fn balance_one_induced_action() {
    let r = second_member(0);
    let a = r.action.as_ref().unwrap();
    let ring = &r.full.coords;
    assert_eq!(a.order, 2);
    assert!(a.gluing_invariant);
    assert!(a.field_invariant);
    assert_eq!(a.images[0], lp(ring, "-u1*w^2 - 4", -2));
    assert_eq!(a.images[1], lp(ring, "-u2*w^5 - 32*u1*w^2 - 64", -5));
    assert_eq!(
        a.images[2],
        lp(ring, "-u3*w^8 - z*w^6 - 4*u2*w^5 + 24*u1^2*w^4 + 32*u1*w^2 + 64", -8)
    );
    assert_eq!(a.images[3], lp(ring, "z", 0));
    assert_eq!(a.images[4], lp(ring, "-w", 0));
}

#[test]
fn balance_two_blow_up() {
    let r = second_member(1);
    assert_eq!(r.order, 17);
    assert_eq!(r.manifold.stable, vec![0]);
    assert!(r.manifold.residual_ok);
    let b = &r.blowup;
    assert_eq!(b.coords.as_slice(), ["u2", "u3", "z", "w"]);
    assert_eq!(b.weights, vec![8, 10, 6, 7]);
    assert!(b.holomorphy.is_holomorphic(), "{:?}", b.holomorphy);
    assert!(r.divisor.ok);

    // Off the manifold the stable coordinate is passive and the field has
    // v₁-dependent poles.
    let f = &r.full;
    let ring = &f.coords;
    assert_eq!(ring.as_slice(), ["v1", "u2", "u3", "z", "w"]);
    assert!(matches!(f.holomorphy, Holomorphy::Pole { order: 11, .. }));
    assert!(f.dichotomy_ok);
    let sum = |parts: &[(&str, i32)]| {
        parts
            .iter()
            .fold(LaurentPoly::zero(ring), |acc: SLaurent, (t, k)| acc.add(&lp(ring, t, *k)))
    };
    assert_eq!(
        f.components[0],
        sum(&[("sqrt(3)*v1 - 3/2*v1^2", -1), ("-5*sqrt(3)/8*w^6 + u2*w^7 + 3/8*z*w^5", 0)])
    );
    assert_eq!(
        f.components[1],
        sum(&[
            ("-3*sqrt(3)/2*v1^2", -9),
            ("-15*sqrt(3)/16*v1", -2),
            ("2*v1*u2", -1),
            ("u3*w", 0),
            ("3/8*v1*z", -3),
        ])
    );
    assert_eq!(
        f.components[2],
        sum(&[
            ("-15/2*v1^2", -11),
            ("21/16*v1", -4),
            ("-5*sqrt(3)/6*v1*u2", -3),
            ("5/2*v1*u3", -1),
            ("-3*sqrt(3)/16*v1*z", -5),
        ])
    );
    assert_eq!(f.components[4], lp(ring, "-sqrt(3)/3 - v1/2", 0));

    let g = &r.gluing;
    assert!(g.pullback_ok);
    assert_eq!(g.brackets[1], sp(ring, "2*sqrt(3)/3 + v1"));
    assert_eq!(
        g.brackets[2],
        sp(ring, "2 + 3*sqrt(3)*v1 + u2*w^8 - 5*sqrt(3)/8*w^7 + 3/8*z*w^6")
    );
    assert_eq!(
        g.brackets[3],
        sp(
            ring,
            "8*sqrt(3)/3 + 25*v1 + 5*sqrt(3)/3*u2*w^8 + u3*w^10 + 7*sqrt(3)/8*z*w^6 - 27/8*w^7"
        )
    );

    let a = r.action.as_ref().unwrap();
    assert!(a.gluing_invariant);
    assert!(a.field_invariant);
    assert_eq!(a.images[0], lp(ring, "-v1 - 4*sqrt(3)/3", 0));
    assert_eq!(
        a.images[1],
        sum(&[("u2", 0), ("-5*sqrt(3)/4", -1), ("6*sqrt(3)*v1 + 12", -8)])
    );
    assert_eq!(
        a.images[2],
        sum(&[
            ("-u3", 0),
            ("-10*sqrt(3)/3*u2", -2),
            ("25/4", -3),
            ("-7*sqrt(3)/4*z", -4),
            ("8*sqrt(3) - 30*v1", -10),
        ])
    );
    assert_eq!(a.images[3], lp(ring, "z", 0));
    assert_eq!(a.images[4], lp(ring, "-w", 0));
}

#[test]
fn planted_resonance_gives_a_simple_pole() {
    let ring = vars(&["y1", "Z", "eps"]);
    let mk = |first: &str| LocalVectorField {
        coords: ring.clone(),
        roles: vec![CoordRole::State, CoordRole::Z, CoordRole::Eps],
        weights: vec![int(2), int(1), int(1)],
        sigma: Surd::one(),
        components: vec![sp(&ring, first), sp(&ring, "Z"), sp(&ring, "eps")],
        truncation: None,
    };
    let b = blow_up(&mk("2*y1 + Z*eps"), 1, &[]).unwrap();
    match &b.holomorphy {
        Holomorphy::Pole { order, terms } => {
            assert_eq!(*order, 1);
            assert_eq!(terms.len(), 1);
            assert_eq!(terms[0].component, "u1");
            assert_eq!(terms[0].term, "-z*w^-1");
        }
        other => panic!("{other:?}"),
    }
    assert!(b.dichotomy_ok);
    // Above the threshold the same coupling is harmless.
    let b = blow_up(&mk("2*y1 + Z^2*eps"), 1, &[]).unwrap();
    assert!(b.holomorphy.is_holomorphic());
}

#[test]
fn non_integer_weight_is_rejected() {
    let ring = vars(&["y1", "eps"]);
    let field = LocalVectorField {
        coords: ring.clone(),
        roles: vec![CoordRole::State, CoordRole::Eps],
        weights: vec![kova::scalar::rat(1, 2), int(1)],
        sigma: Surd::one(),
        components: vec![sp(&ring, "y1/2"), sp(&ring, "eps")],
        truncation: None,
    };
    assert!(blow_up(&field, 1, &[]).is_err());
}

/// Oracle: substitute the gluing map into the original equation and check
/// the blown-up field is regular on the divisor.
#[test]
fn painleve1_single_blow_up() {
    let sys = builtin("painleve1").unwrap();
    let b = Balance::new(&sys, vec![int(-2), int(1)]).unwrap();
    let r = resolve(&sys, &b, None, Branch::Standard, None).unwrap();
    assert_eq!(r.chart, 1);
    assert!(r.blowup.holomorphy.is_holomorphic());
    assert!(r.gluing.pullback_ok);
    assert!(r.gluing.divisor_bookkeeping);
    // x = w⁻³(…), y = w⁻².
    assert_eq!(r.gluing.p, vec![3, 2]);
    assert_eq!(r.gluing.brackets[1], sp(&r.gluing.coords, "1"));
    assert_eq!(r.gluing.brackets[0].constant_term(), Surd::from_i64(2));
    let a = r.action.as_ref().unwrap();
    assert!(a.field_invariant && a.gluing_invariant);
    assert!(r.divisor.ok);
}

#[test]
fn every_painleve_balance_resolves() {
    // P_II and P_IV: charts with p_j = 1 carry the trivial action.
    let mut trivial = 0;
    for name in ["painleve2", "painleve4"] {
        let sys = builtin(name).unwrap();
        let bs = kova::balances::balances_of(&sys, 7).unwrap();
        for b in bs.iter().filter(|b| !b.is_trivial()) {
            let r = resolve(&sys, b, None, Branch::Standard, None).unwrap();
            assert!(r.blowup.holomorphy.is_holomorphic(), "{name} {}", b.display());
            assert!(r.gluing.pullback_ok, "{name} {}", b.display());
            assert!(r.divisor.ok, "{name} {}", b.display());
            let a = r.action.as_ref().unwrap();
            assert!(a.field_invariant && a.gluing_invariant);
            if sys.weight.p[r.chart] == 1 {
                assert_eq!(a.order, 1);
                trivial += 1;
            }
        }
    }
    assert!(trivial > 0);
}
