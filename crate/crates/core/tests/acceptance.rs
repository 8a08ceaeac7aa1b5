//! Acceptance gate: one line per criterion, nonzero exit if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use qsymbol_core::invariance::{
    anti_diagonal, check_direct, check_symbolic, flip_identity_residual, measure_to_symbol,
    schur_function, support_of, symbol_to_measure, translation_invariance, Measure,
};
use qsymbol_core::norms::{haagerup_bound, schur_cb_norm, schur_factorization_bound, schur_symbol};
use qsymbol_core::random;
use qsymbol_core::realization::{lambda, Realization, RealizationKind};
use qsymbol_core::symbol::{
    from_schur_function, invariant_schur_function, lift, phi_apply, random_antidiagonal,
    random_symbol, slice_identity_residual, t_map, t_map_slice_oracle,
};
use qsymbol_core::tensor::{evaluate, with_dense_budget, Functional, TensorSpace};
use qsymbol_core::{Error, FiniteGroup, GroupSpec, Symbol, SymbolAmbient, C64};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn group(spec: &str) -> FiniteGroup {
    FiniteGroup::build(&GroupSpec::parse(spec).unwrap()).unwrap()
}

fn both(g: &FiniteGroup) -> [Realization; 2] {
    [
        Realization::commutative(g).unwrap(),
        Realization::cocommutative(g).unwrap(),
    ]
}

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Slice oracle against the dense three-leg operator over every matrix-unit triple.
fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut rng = random::rng(101);
    let mut worst: f64 = 0.0;
    let mut triples = 0usize;
    for n in [2, 3, 4] {
        let g = FiniteGroup::cyclic(n).unwrap();
        for r in both(&g) {
            let basis = Functional::entry_basis(n);
            for _ in 0..20 {
                let psi = lift(&r, &random_symbol(&r, &mut rng).unwrap()).unwrap();
                let t = t_map(&psi).unwrap();
                for f in &basis {
                    for w in &basis {
                        for h in &basis {
                            let oracle = t_map_slice_oracle(&psi, f, w, h).unwrap();
                            let dense = evaluate(&[f, w, h], &t).unwrap();
                            worst = worst.max((oracle - dense).norm());
                            triples += 1;
                        }
                    }
                }
            }
        }
    }
    let elapsed = start.elapsed();
    ensure(worst < 1e-10, || format!("max deviation {worst:.3e}"))?;
    ensure(elapsed < Duration::from_secs(60), || format!("took {elapsed:?}"))?;
    Ok(format!(
        "{triples} triples, max deviation {worst:.2e}, {:.1}s",
        elapsed.as_secs_f64()
    ))
}

/// Slice identity for random symbols and functionals.
fn criterion_2() -> Outcome {
    let mut rng = random::rng(102);
    let mut worst: f64 = 0.0;
    for spec in ["Z3", "S3"] {
        let g = group(spec);
        for r in both(&g) {
            for _ in 0..20 {
                let chi = random_symbol(&r, &mut rng).unwrap();
                let f = random::functional(&mut rng, g.order()).unwrap();
                let h = random::functional(&mut rng, g.order()).unwrap();
                worst = worst.max(slice_identity_residual(&r, &chi, &f, &h).unwrap());
            }
        }
    }
    ensure(worst < 1e-9, || format!("max residual {worst:.3e}"))?;
    Ok(format!("80 triples, max residual {worst:.2e}"))
}

/// Co-commutative criterion on S3.
fn criterion_3() -> Outcome {
    let g = group("S3");
    let r = Realization::cocommutative(&g).unwrap();
    let nabla = anti_diagonal(&g);
    let ambient = SymbolAmbient::Span(r.ambient().clone());
    let tol = 1e-9;
    let mut worst_identity: f64 = 0.0;
    let mut true_cases = 0;
    let mut identity = |chi: &Symbol| {
        let res = flip_identity_residual(&r, chi, tol).unwrap().residual;
        worst_identity = worst_identity.max(res);
    };
    for s in g.elements() {
        for t in g.elements() {
            let chi = Symbol::new(
                vec![(lambda(&g, s).unwrap(), lambda(&g, t).unwrap())],
                ambient.clone(),
            )
            .unwrap();
            let symbolic = check_symbolic(&r, &chi, tol).unwrap().holds;
            ensure(symbolic == (g.mul(s, t) == g.identity()), || {
                format!("elementary ({s},{t}) gave {symbolic}")
            })?;
            if symbolic {
                true_cases += 1;
                identity(&chi);
            }
        }
    }
    let mut rng = random::rng(103);
    let mut disagreements = 0;
    for k in 0..100 {
        let chi = if k < 50 {
            random_antidiagonal(&r, &mut rng).unwrap()
        } else {
            random_symbol(&r, &mut rng).unwrap()
        };
        let symbolic = check_symbolic(&r, &chi, tol).unwrap().holds;
        let supported = support_of(&r, &chi, tol).unwrap().is_subset(&nabla);
        if symbolic != supported {
            disagreements += 1;
        }
        if symbolic {
            true_cases += 1;
            identity(&chi);
        }
    }
    ensure(disagreements == 0, || format!("{disagreements} disagreements"))?;
    ensure(worst_identity < 1e-10, || {
        format!("flip identity residual {worst_identity:.3e}")
    })?;
    Ok(format!(
        "36 elementary + 100 random, 0 disagreements, {true_cases} true cases, identity residual {worst_identity:.2e}"
    ))
}

/// Commutative criterion on Z6 and D4.
fn criterion_4() -> Outcome {
    let mut rng = random::rng(104);
    let tol = 1e-9;
    let mut worst_action: f64 = 0.0;
    let mut agreements = 0;
    for spec in ["Z6", "D4"] {
        let g = group(spec);
        let n = g.order();
        let r = Realization::commutative(&g).unwrap();
        for _ in 0..10 {
            let u = random::weights(&mut rng, n);
            let phi = invariant_schur_function(&g, &u);
            let chi = from_schur_function(&r, &phi).unwrap();
            let results = [
                check_direct(&r, &chi, tol).unwrap().holds,
                check_symbolic(&r, &chi, tol).unwrap().holds,
                translation_invariance(&g, &schur_function(&r, &chi).unwrap(), tol)
                    .unwrap()
                    .holds,
            ];
            ensure(results.iter().all(|&b| b), || {
                format!("{spec}: invariant φ gave {results:?}")
            })?;
            agreements += 1;
            for k in g.elements() {
                let l = lambda(&g, k).unwrap();
                let out = phi_apply(&chi, &l).unwrap();
                for row in 0..n {
                    for col in 0..n {
                        let expected = l.entry(row, col) * u[k];
                        worst_action = worst_action.max((out.entry(row, col) - expected).norm());
                    }
                }
            }

            let perturbed = &phi + random::matrix(&mut rng, n, n) * c(0.1);
            let chi = from_schur_function(&r, &perturbed).unwrap();
            let results = [
                check_direct(&r, &chi, tol).unwrap().holds,
                check_symbolic(&r, &chi, tol).unwrap().holds,
                translation_invariance(&g, &perturbed, tol).unwrap().holds,
            ];
            ensure(results.iter().all(|&b| !b), || {
                format!("{spec}: perturbed φ gave {results:?}")
            })?;
            agreements += 1;
        }
    }
    ensure(worst_action < 1e-10, || format!("Schur action deviation {worst_action:.3e}"))?;
    Ok(format!(
        "{agreements}/40 agreeing, Schur action deviation {worst_action:.2e}"
    ))
}

/// Direct and symbolic checks agree on 100 random symbols.
fn criterion_5() -> Outcome {
    let specs = ["Z2", "Z3", "Z4", "Z2xZ2", "Z5", "S3", "Z6", "Z7", "D4", "Z8", "Z2xZ4"];
    let mut rng = random::rng(105);
    let tol = 1e-9;
    let mut disagreements = Vec::new();
    let (mut trues, mut total) = (0, 0);
    for k in 0..100 {
        let g = group(specs[k % specs.len()]);
        let kind = if k % 2 == 0 {
            RealizationKind::Commutative
        } else {
            RealizationKind::Cocommutative
        };
        let r = Realization::build(kind, &g).unwrap();
        // every third symbol is drawn from the invariant class so both outcomes occur
        let chi = match (k % 3, kind) {
            (0, RealizationKind::Cocommutative) => random_antidiagonal(&r, &mut rng).unwrap(),
            (0, _) => {
                let u = random::weights(&mut rng, g.order());
                from_schur_function(&r, &invariant_schur_function(&g, &u)).unwrap()
            }
            _ => random_symbol(&r, &mut rng).unwrap(),
        };
        let direct = check_direct(&r, &chi, tol).unwrap().holds;
        let symbolic = check_symbolic(&r, &chi, tol).unwrap().holds;
        total += 1;
        if direct {
            trues += 1;
        }
        if direct != symbolic {
            disagreements.push(k);
        }
    }
    ensure(disagreements.is_empty(), || format!("disagreements at {disagreements:?}"))?;
    Ok(format!("{total} symbols, {trues} invariant, 0 disagreements"))
}

/// Measure round trip on S3.
fn criterion_6() -> Outcome {
    let g = group("S3");
    let r = Realization::cocommutative(&g).unwrap();
    let mut rng = random::rng(106);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let mu = Measure {
            weights: random::weights(&mut rng, 6),
        };
        let chi = measure_to_symbol(&r, &mu).unwrap();
        let back = symbol_to_measure(&r, &chi, 1e-9).unwrap();
        ensure(back == mu, || format!("round trip {:?} != {:?}", back, mu))?;
        let x = random::operator(&mut rng, &TensorSpace::single(6).unwrap()).unwrap();
        let mut expected = x.scale(c(0.0));
        for s in g.elements() {
            let l = lambda(&g, s).unwrap();
            expected = expected
                .add(&l.mul(&x).unwrap().mul(&l.adjoint()).unwrap().scale(mu.weights[s]))
                .unwrap();
        }
        worst = worst.max(phi_apply(&chi, &x).unwrap().distance(&expected).unwrap());
    }
    ensure(worst < 1e-10, || format!("Φ deviation {worst:.3e}"))?;
    Ok(format!("20 measures exact, Φ deviation {worst:.2e}"))
}

/// Schur multiplier norms.
fn criterion_7() -> Outcome {
    let tol = 1e-3;
    let mut rng = random::rng(107);
    let mut slowest = Duration::ZERO;
    let mut timed = |g: &FiniteGroup, phi: &DMatrix<C64>| {
        let start = Instant::now();
        let res = schur_cb_norm(g, phi, tol).unwrap();
        slowest = slowest.max(start.elapsed());
        res
    };
    let mut checked = 0;
    for spec in ["Z4", "S3", "D4"] {
        let g = group(spec);
        let n = g.order();
        let ones = DMatrix::from_element(n, n, c(1.0));
        let v = timed(&g, &ones).value;
        ensure((v - 1.0).abs() <= tol, || format!("{spec}: all-ones gave {v}"))?;

        let a = random::weights(&mut rng, n);
        let b = random::weights(&mut rng, n);
        let phi = DMatrix::from_fn(n, n, |s, t| a[s] * b[t]);
        let expected = a.iter().map(|x| x.norm()).fold(0.0, f64::max)
            * b.iter().map(|x| x.norm()).fold(0.0, f64::max);
        let v = timed(&g, &phi).value;
        ensure((v - expected).abs() <= tol, || {
            format!("{spec}: rank-one gave {v}, expected {expected}")
        })?;

        for _ in 0..20 {
            let phi = random::matrix(&mut rng, n, n);
            let res = timed(&g, &phi);
            let lower = phi.iter().map(|x| x.norm()).fold(0.0, f64::max);
            let canonical = haagerup_bound(&schur_symbol(&phi).unwrap().canonicalize().unwrap())
                .unwrap()
                .raw
                .value;
            let (svd_bound, _) = schur_factorization_bound(&phi);
            ensure(res.converged, || format!("{spec}: bisection did not converge"))?;
            ensure(lower <= res.value && res.value <= canonical.min(svd_bound) + tol, || {
                format!(
                    "{spec}: sandwich {lower} <= {} <= {canonical} failed",
                    res.value
                )
            })?;
            checked += 1;
        }
    }
    ensure(slowest < Duration::from_secs(30), || format!("slowest norm {slowest:?}"))?;
    Ok(format!(
        "all-ones and rank-one exact, {checked} sandwiches, slowest {:.2}s",
        slowest.as_secs_f64()
    ))
}

/// Performance guardrails.
fn criterion_8() -> Outcome {
    let mut rng = random::rng(108);
    let g8 = group("D4");
    let r = Realization::cocommutative(&g8).unwrap();
    let psi = lift(&r, &random_symbol(&r, &mut rng).unwrap()).unwrap();
    let start = Instant::now();
    let t = t_map(&psi).unwrap();
    let dense_time = start.elapsed();
    ensure(t.dim() == 512, || format!("three-leg dimension {}", t.dim()))?;
    ensure(dense_time < Duration::from_secs(5), || format!("dense T took {dense_time:?}"))?;

    let g16 = group("D8");
    let n3 = 16usize.pow(3);
    let budget = n3 * n3 - 1;
    let mut sliced = Vec::new();
    for r in both(&g16) {
        let chi = random_symbol(&r, &mut rng).unwrap();
        let start = Instant::now();
        let check = with_dense_budget(budget, || check_symbolic(&r, &chi, 1e-9))
            .map_err(|e| format!("sliced path at |G| = 16: {e}"))?;
        sliced.push(format!("{} {:.2}s", r.kind(), start.elapsed().as_secs_f64()));
        ensure(!check.holds, || "random symbol reported invariant".into())?;
        // commutative factors stay diagonal, so only the co-commutative T is dense
        let forced = with_dense_budget(budget, || t_map(&lift(&r, &chi).unwrap()));
        match (r.kind(), forced) {
            (RealizationKind::Cocommutative, Err(Error::ResourceLimit { .. })) => {}
            (RealizationKind::Commutative, Ok(t)) if !t.is_dense() => {}
            (kind, other) => {
                return Err(format!(
                    "{kind} T at |G| = 16 under the budget: unexpected {:?}",
                    other.map(|t| t.is_dense())
                ))
            }
        }
    }
    let tiny = with_dense_budget(10, || t_map(&psi));
    ensure(matches!(tiny, Err(Error::ResourceLimit { .. })), || {
        "forced guardrail did not trigger".into()
    })?;
    Ok(format!(
        "dense T |G|=8 in {:.2}s; sliced |G|=16 under budget n³·n³−1 ({}); guardrail trips",
        dense_time.as_secs_f64(),
        sliced.join(", ")
    ))
}

/// Realization invariants on every built-in group of order at most 12.
fn criterion_9() -> Outcome {
    let mut specs: Vec<String> = (1..=12).map(|n| format!("Z{n}")).collect();
    specs.extend((1..=6).map(|n| format!("D{n}")));
    specs.extend((1..=3).map(|n| format!("S{n}")));
    specs.extend(
        ["Z2xZ2", "Z2xZ3", "Z2xZ4", "Z2xZ6", "Z3xZ3", "Z2xZ2xZ2", "Z2xS3", "Z3xZ4", "Z2xD3"]
            .map(String::from),
    );
    let mut count = 0;
    for spec in &specs {
        let g = group(spec);
        ensure(g.order() <= 12, || format!("{spec} has order {}", g.order()))?;
        for r in both(&g) {
            let report = r.check_axioms(1e-10).unwrap();
            let wanted = [
                ("w_unitary", report.w_unitary),
                ("v_unitary", report.v_unitary),
                ("w_hat_unitary", report.w_hat_unitary),
                ("pentagon", report.pentagon),
                ("defining_property", report.defining_property),
                ("coassociativity", report.coassociativity),
                ("scalar_intersection", report.scalar_intersection),
            ];
            for (name, check) in wanted {
                ensure(check.holds, || {
                    format!("{spec} {}: {name} residual {:.3e}", r.kind(), check.residual)
                })?;
            }
            ensure(report.all_hold(), || format!("{spec} {}: {report:?}", r.kind()))?;
            count += 1;
        }
    }
    Ok(format!("{count} realizations over {} groups", specs.len()))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 9] = [
        ("1 slice oracle agreement", criterion_1),
        ("2 slice identity", criterion_2),
        ("3 co-commutative support criterion", criterion_3),
        ("4 commutative translation invariance", criterion_4),
        ("5 direct vs symbolic harness", criterion_5),
        ("6 measure round trip", criterion_6),
        ("7 Schur multiplier norms", criterion_7),
        ("8 performance guardrails", criterion_8),
        ("9 realization axioms", criterion_9),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run))
            .unwrap_or_else(|_| Err("panicked".to_string()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {name}: {detail} [{secs:.2}s]"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {name}: {detail} [{secs:.2}s]");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all 9 acceptance criteria passed");
}
