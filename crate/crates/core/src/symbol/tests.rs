use super::*;
use crate::groups::FiniteGroup;
use crate::realization::{lambda, Realization};
use crate::tensor::{Functional, TensorSpace};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn single(n: usize) -> TensorSpace {
    TensorSpace::single(n).unwrap()
}

#[test]
fn phi_of_elementary_tensor_is_sandwich() {
    let mut rng = random::rng(1);
    let s = single(3);
    let a = random::operator(&mut rng, &s).unwrap();
    let b = random::operator(&mut rng, &s).unwrap();
    let x = random::operator(&mut rng, &s).unwrap();
    let chi = Symbol::full(vec![(a.clone(), b.clone())]).unwrap();
    let expected = a.mul(&x).unwrap().mul(&b).unwrap();
    assert!(phi_apply(&chi, &x).unwrap().distance(&expected).unwrap() < 1e-12);

    let id = Symbol::identity(s, SymbolAmbient::Full).unwrap();
    assert!(phi_apply(&id, &x).unwrap().distance(&x).unwrap() < 1e-15);
}

#[test]
fn invariant_schur_symbol_scales_translations() {
    let g = FiniteGroup::cyclic(5).unwrap();
    let r = Realization::commutative(&g).unwrap();
    let u: Vec<C64> = (0..5).map(|k| c(k as f64 - 1.5, 0.25 * k as f64)).collect();
    let chi = from_schur_function(&r, &invariant_schur_function(&g, &u)).unwrap();
    for k in g.elements() {
        let l = lambda(&g, k).unwrap();
        let out = phi_apply(&chi, &l).unwrap();
        // entrywise: (λ_k)_{s,t} ≠ 0 iff s t⁻¹ = k
        for s in 0..5 {
            for t in 0..5 {
                let expected = if g.mul(s, g.inverse(t)) == k { u[k] } else { c(0.0, 0.0) };
                assert!((out.entry(s, t) - expected).norm() < 1e-12);
            }
        }
    }
}

#[test]
fn flatten_examples() {
    let s = single(2);
    let one = Operator::identity(s.clone());
    let chi = Symbol::full(vec![(one.clone(), one.clone())]).unwrap();
    assert!(chi
        .flatten()
        .unwrap()
        .distance(&Operator::identity(TensorSpace::uniform(2, 2).unwrap()))
        .unwrap()
        < 1e-15);

    let mut rng = random::rng(2);
    let a = random::operator(&mut rng, &s).unwrap();
    let b = random::operator(&mut rng, &s).unwrap();
    let cancel = Symbol::full(vec![(a.clone(), b.clone()), (a, b.scale(c(-1.0, 0.0)))]).unwrap();
    assert!(cancel.flatten().unwrap().frobenius_norm() < 1e-15);

    let g = FiniteGroup::cyclic(3).unwrap();
    let (l1, l2) = (lambda(&g, 1).unwrap(), lambda(&g, 2).unwrap());
    let chi = Symbol::full(vec![(l1.clone(), l2.clone())]).unwrap();
    let flat = chi.flatten().unwrap();
    let targets = flat.as_permutation().expect("stays a permutation");
    for (col, &row) in targets.iter().enumerate() {
        let (x, y) = (col / 3, col % 3);
        assert_eq!(row, g.mul(1, x) * 3 + g.mul(2, y));
    }
}

#[test]
fn lift_examples() {
    let g = FiniteGroup::symmetric(3).unwrap();
    let r = Realization::cocommutative(&g).unwrap();
    let (ls, lt) = (lambda(&g, 1).unwrap(), lambda(&g, 4).unwrap());
    let chi = Symbol::new(
        vec![(ls.clone(), lt.clone())],
        SymbolAmbient::Span(r.ambient().clone()),
    )
    .unwrap();
    let lifted = lift(&r, &chi).unwrap();
    let (x, y) = &lifted.terms()[0];
    assert!(x.distance(&kron(&ls, &ls).unwrap()).unwrap() < 1e-15);
    assert!(y.distance(&kron(&lt, &lt).unwrap()).unwrap() < 1e-15);

    let id = Symbol::identity(single(6), SymbolAmbient::Span(r.ambient().clone())).unwrap();
    let lifted = lift(&r, &id).unwrap();
    let pair = TensorSpace::uniform(6, 2).unwrap();
    for (x, y) in lifted.terms() {
        assert!(x.distance(&Operator::identity(pair.clone())).unwrap() < 1e-15);
        assert!(y.distance(&Operator::identity(pair.clone())).unwrap() < 1e-15);
    }
}

#[test]
fn t_map_of_elementary_tensors() {
    let mut rng = random::rng(3);
    let s = single(2);
    let ops: Vec<Operator> = (0..4).map(|_| random::operator(&mut rng, &s).unwrap()).collect();
    let (a, b, cc, d) = (&ops[0], &ops[1], &ops[2], &ops[3]);
    let psi = Symbol::full(vec![(kron(a, b).unwrap(), kron(cc, d).unwrap())]).unwrap();
    let t = t_map(&psi).unwrap();
    let expected = kron(&kron(a, &b.mul(cc).unwrap()).unwrap(), d).unwrap();
    assert!(t.distance(&expected).unwrap() < 1e-12);

    let pair = TensorSpace::uniform(2, 2).unwrap();
    let one = Operator::identity(pair);
    let t = t_map(&Symbol::full(vec![(one.clone(), one)]).unwrap()).unwrap();
    assert!(t.distance(&Operator::identity(TensorSpace::uniform(2, 3).unwrap())).unwrap() < 1e-15);
}

#[test]
fn t_map_of_lifted_cocommutative_tensor() {
    let g = FiniteGroup::symmetric(3).unwrap();
    let r = Realization::cocommutative(&g).unwrap();
    for (s, t) in [(1, 2), (3, 5), (0, 4)] {
        let chi = Symbol::new(
            vec![(lambda(&g, s).unwrap(), lambda(&g, t).unwrap())],
            SymbolAmbient::Span(r.ambient().clone()),
        )
        .unwrap();
        let psi = t_map(&lift(&r, &chi).unwrap()).unwrap();
        let expected = kron(
            &kron(&lambda(&g, s).unwrap(), &lambda(&g, g.mul(s, t)).unwrap()).unwrap(),
            &lambda(&g, t).unwrap(),
        )
        .unwrap();
        assert!(psi.distance(&expected).unwrap() < 1e-14);
    }
}

#[test]
fn slice_oracle_examples() {
    let mut rng = random::rng(4);
    let n = 2;
    let s = single(n);
    let f = random::functional(&mut rng, n).unwrap();
    let w = random::functional(&mut rng, n).unwrap();
    let g = random::functional(&mut rng, n).unwrap();

    let pair = TensorSpace::uniform(n, 2).unwrap();
    let one = Operator::identity(pair);
    let id = Symbol::full(vec![(one.clone(), one)]).unwrap();
    let unit = |h: &Functional| h.unit_value();
    let got = t_map_slice_oracle(&id, &f, &w, &g).unwrap();
    assert!((got - unit(&f) * unit(&w) * unit(&g)).norm() < 1e-12);

    let ops: Vec<Operator> = (0..4).map(|_| random::operator(&mut rng, &s).unwrap()).collect();
    let psi = Symbol::full(vec![(
        kron(&ops[0], &ops[1]).unwrap(),
        kron(&ops[2], &ops[3]).unwrap(),
    )])
    .unwrap();
    let expected = f.eval(&ops[0]).unwrap()
        * w.eval(&ops[1].mul(&ops[2]).unwrap()).unwrap()
        * g.eval(&ops[3]).unwrap();
    assert!((t_map_slice_oracle(&psi, &f, &w, &g).unwrap() - expected).norm() < 1e-11);
}

#[test]
fn slice_oracle_matches_dense_evaluation_on_z3() {
    let g = FiniteGroup::cyclic(3).unwrap();
    let mut rng = random::rng(5);
    for r in [
        Realization::commutative(&g).unwrap(),
        Realization::cocommutative(&g).unwrap(),
    ] {
        let chi = random_symbol(&r, &mut rng).unwrap();
        let psi = lift(&r, &chi).unwrap();
        for _ in 0..5 {
            let f = random::functional(&mut rng, 3).unwrap();
            let w = random::functional(&mut rng, 3).unwrap();
            let h = random::functional(&mut rng, 3).unwrap();
            let a = t_map_slice_oracle(&psi, &f, &w, &h).unwrap();
            let b = t_map_evaluated(&psi, &f, &w, &h).unwrap();
            assert!((a - b).norm() < 1e-10 * b.norm().max(1.0));
        }
    }
}

#[test]
fn slice_identity_examples() {
    let g = FiniteGroup::cyclic(2).unwrap();
    let r = Realization::commutative(&g).unwrap();
    let mut rng = random::rng(6);
    let id = Symbol::identity(single(2), SymbolAmbient::Span(r.ambient().clone())).unwrap();
    let f = random::vector_functional(&mut rng, 2).unwrap();
    let h = random::vector_functional(&mut rng, 2).unwrap();
    assert!(slice_identity_residual(&r, &id, &f, &h).unwrap() < 1e-12);

    let a = crate::realization::mult(&[c(1.0, 2.0), c(-0.5, 0.0)]).unwrap();
    let b = crate::realization::mult(&[c(0.0, 1.0), c(3.0, -1.0)]).unwrap();
    let chi = Symbol::new(vec![(a, b)], SymbolAmbient::Span(r.ambient().clone())).unwrap();
    assert!(slice_identity_residual(&r, &chi, &f, &h).unwrap() < 1e-10);
}

#[test]
fn t_map_respects_guardrail() {
    let g = FiniteGroup::cyclic(3).unwrap();
    let r = Realization::cocommutative(&g).unwrap();
    let mut rng = random::rng(7);
    let psi = lift(&r, &random_symbol(&r, &mut rng).unwrap()).unwrap();
    assert!(matches!(
        t_map_within(&psi, 100),
        Err(Error::ResourceLimit { .. })
    ));
    assert!(t_map_within(&psi, 1_000).is_ok());
}

#[test]
fn canonical_form_preserves_flattening_and_is_minimal() {
    let g = FiniteGroup::cyclic(4).unwrap();
    let r = Realization::cocommutative(&g).unwrap();
    let mut rng = random::rng(8);
    let chi = random_symbol(&r, &mut rng).unwrap();
    let doubled = chi.concat(&chi).unwrap();
    let canon = doubled.canonicalize().unwrap();
    assert!(canon.approx_eq(&doubled, 1e-10).unwrap());
    assert!(canon.len() <= chi.len());
    let rank_one = Symbol::full(vec![
        (lambda(&g, 1).unwrap(), lambda(&g, 2).unwrap()),
        (lambda(&g, 1).unwrap().scale(c(2.0, 0.0)), lambda(&g, 2).unwrap()),
    ])
    .unwrap();
    assert_eq!(rank_one.canonicalize().unwrap().len(), 1);
}

#[test]
fn random_symbols_are_reproducible_and_in_ambient() {
    let g = FiniteGroup::dihedral(3).unwrap();
    let r = Realization::cocommutative(&g).unwrap();
    let a = random_symbol(&r, &mut random::rng(11)).unwrap();
    let b = random_symbol(&r, &mut random::rng(11)).unwrap();
    assert_eq!(a.len(), b.len());
    assert!(a.flatten().unwrap().distance(b.flatten().unwrap()).unwrap() == 0.0);
    assert!((1..=4).contains(&a.len()));
    for (x, y) in a.terms() {
        assert!(r.ambient().membership(x, 1e-12).unwrap().member);
        assert!(r.ambient().membership(y, 1e-12).unwrap().member);
    }
}

#[test]
fn rejects_factors_outside_ambient() {
    let g = FiniteGroup::cyclic(3).unwrap();
    let r = Realization::commutative(&g).unwrap();
    let l = lambda(&g, 1).unwrap();
    assert!(matches!(
        Symbol::new(vec![(l.clone(), l)], SymbolAmbient::Span(r.ambient().clone())),
        Err(Error::NotInAmbient { .. })
    ));
    assert!(matches!(
        Symbol::new(vec![], SymbolAmbient::Full),
        Err(Error::EmptySymbol)
    ));
}
