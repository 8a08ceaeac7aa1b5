use super::*;
use crate::groups::FiniteGroup;

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

#[test]
fn regular_representations_compose() {
    let g = FiniteGroup::symmetric(3).unwrap();
    for s in g.elements() {
        for t in g.elements() {
            let ls = lambda(&g, s).unwrap();
            let lt = lambda(&g, t).unwrap();
            let lst = lambda(&g, g.mul(s, t)).unwrap();
            assert!(ls.mul(&lt).unwrap().distance(&lst).unwrap() < 1e-14);
            let rs = rho(&g, s).unwrap();
            let rt = rho(&g, t).unwrap();
            let rst = rho(&g, g.mul(s, t)).unwrap();
            assert!(rs.mul(&rt).unwrap().distance(&rst).unwrap() < 1e-14);
            let comm = ls.mul(&rt).unwrap().sub(&rt.mul(&ls).unwrap()).unwrap();
            assert!(comm.frobenius_norm() < 1e-14);
        }
    }
}

#[test]
fn z2_fundamental_unitary_pairs() {
    let g = FiniteGroup::cyclic(2).unwrap();
    let r = Realization::commutative(&g).unwrap();
    assert_eq!(
        r.w_pairs().unwrap(),
        vec![
            [[0, 0], [0, 0]],
            [[0, 1], [0, 1]],
            [[1, 0], [1, 1]],
            [[1, 1], [1, 0]],
        ]
    );
}

#[test]
fn commutative_axioms_hold() {
    for g in [
        FiniteGroup::cyclic(3).unwrap(),
        FiniteGroup::symmetric(3).unwrap(),
    ] {
        let r = Realization::commutative(&g).unwrap();
        let report = r.check_axioms(1e-10).unwrap();
        assert!(report.all_hold(), "{report:?}");
    }
}

#[test]
fn cocommutative_axioms_hold() {
    for g in [
        FiniteGroup::cyclic(4).unwrap(),
        FiniteGroup::symmetric(3).unwrap(),
    ] {
        let r = Realization::cocommutative(&g).unwrap();
        let report = r.check_axioms(1e-10).unwrap();
        assert!(report.all_hold(), "{report:?}");
    }
}

#[test]
fn commutative_comultiplication_is_group_law() {
    let g = FiniteGroup::symmetric(3).unwrap();
    let r = Realization::commutative(&g).unwrap();
    let a: Vec<C64> = (0..6).map(|i| C64::new(i as f64 + 1.0, 0.5 * i as f64)).collect();
    let ma = mult(&a).unwrap();
    let gamma = r.comultiply(&ma, false).unwrap();
    let op = r.comultiply(&ma, true).unwrap();
    let right = r.comultiply_right(&ma).unwrap();
    for s in g.elements() {
        for t in g.elements() {
            let i = s * 6 + t;
            assert!((gamma.entry(i, i) - a[g.mul(s, t)]).norm() < 1e-14);
            assert!((op.entry(i, i) - a[g.mul(t, s)]).norm() < 1e-14);
            assert!((right.entry(i, i) - a[g.mul(s, t)]).norm() < 1e-14);
        }
    }
}

#[test]
fn cocommutative_comultiplication_is_diagonal_group_map() {
    let g = FiniteGroup::symmetric(3).unwrap();
    let r = Realization::cocommutative(&g).unwrap();
    for s in g.elements() {
        let l = lambda(&g, s).unwrap();
        let expected = crate::tensor::kron(&l, &l).unwrap();
        let gamma = r.comultiply(&l, false).unwrap();
        assert!(gamma.distance(&expected).unwrap() < 1e-14);
        let op = r.comultiply(&l, true).unwrap();
        assert!(op.distance(&gamma).unwrap() < 1e-14);
        let right = r.comultiply_right(&l).unwrap();
        assert!(right.distance(&expected).unwrap() < 1e-14);
    }
}

#[test]
fn comultiply_rejects_operators_outside_ambient() {
    let g = FiniteGroup::cyclic(3).unwrap();
    let r = Realization::commutative(&g).unwrap();
    let l = lambda(&g, 1).unwrap();
    assert!(matches!(
        r.comultiply(&l, false),
        Err(Error::NotInAmbient { .. })
    ));
}

#[test]
fn reduced_space_matches_dual() {
    let g = FiniteGroup::dihedral(4).unwrap();
    for r in [
        Realization::commutative(&g).unwrap(),
        Realization::cocommutative(&g).unwrap(),
    ] {
        let reduced = r.reduced_space().unwrap();
        assert_eq!(reduced.dim(), g.order());
        assert!(r.dual().contains_span(reduced, 1e-10).unwrap().member);
    }
}

#[test]
fn custom_accepts_valid_and_rejects_broken_unitary() {
    let g = FiniteGroup::cyclic(2).unwrap();
    let base = Realization::commutative(&g).unwrap();
    let ambient = (**base.ambient()).clone();
    let custom = Realization::custom(ambient.clone(), base.w().clone(), base.v().clone(), 1e-9)
        .unwrap();
    assert_eq!(custom.kind(), RealizationKind::Custom);
    assert_eq!(custom.dual().dim(), 2);

    let scaled = base.v().scale(c(2.0));
    assert!(matches!(
        Realization::custom(ambient, base.w().clone(), scaled, 1e-9),
        Err(Error::Certification(_))
    ));
}

#[test]
fn trivial_group_is_scalars() {
    let g = FiniteGroup::cyclic(1).unwrap();
    let r = Realization::commutative(&g).unwrap();
    assert!(r.check_axioms(1e-12).unwrap().all_hold());
}
