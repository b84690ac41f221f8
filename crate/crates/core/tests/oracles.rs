//! Cross-checks of the fixed example values against brute-force oracles
//! that share no code with the library's solvers.

mod common;

use common::{build, canonical_tree, closure_classes, formula, holds, model, naive_relates, props, Grammar, Kind};
use modalchar::characterize::{characterize_conj_diamond, characterize_positive, refute_full_language, ExampleSet};
use modalchar::kripke::{chain, enumerate_models, height, single_point, truncate, ExtendedNat, PointedModel};
use modalchar::semantics::satisfies;
use modalchar::syntax::{enumerate_formulas, parse_formula, Formula, Fragment};
use modalchar::Budget;
use proptest::prelude::*;

const P: &[&str] = &["p"];

fn depth_one_trees() -> Vec<PointedModel> {
    enumerate_models(&props(P), 1, false, &Budget::default()).unwrap()
}

#[test]
fn depth_one_types_are_distinct_and_complete() {
    let u = depth_one_trees();
    assert_eq!(u.len(), 8);
    for (i, a) in u.iter().enumerate() {
        for b in &u[i + 1..] {
            assert!(!naive_relates(Kind::Bisim, a, b));
        }
    }
    // every root valuation with every set of leaf valuations
    let p = props(P);
    for root in 0..2u64 {
        for leaves in 0..4u64 {
            let mut vals = vec![root];
            let mut edges = Vec::new();
            for v in 0..2u64 {
                if leaves >> v & 1 == 1 {
                    edges.push((0, vals.len()));
                    vals.push(v);
                }
            }
            let m = build(&p, &vals, &edges, 0);
            assert_eq!(u.iter().filter(|t| naive_relates(Kind::Bisim, t, &m)).count(), 1);
        }
    }
}

#[test]
fn formula_counts_match_closure_oracle() {
    let b = Budget::default();
    let pq = props(&["p", "q"]);
    let valuations: Vec<PointedModel> = (0..4u64).map(|v| build(&pq, &[v], &[], 0)).collect();
    let atoms = [Formula::atom("p"), Formula::atom("q")];
    let oracle = closure_classes(&valuations, &atoms, true, true, &[], 0);
    let fr = Fragment::parse("pos:&,|", pq.clone()).unwrap();
    let reps = enumerate_formulas(&fr, 0, &valuations, &b).unwrap();
    assert_eq!(oracle.len(), 4);
    assert_eq!(reps.len(), 4);

    let u = depth_one_trees();
    let dia: fn(Formula) -> Formula = Formula::dia;
    let boxed: fn(Formula) -> Formula = Formula::boxed;
    let p_atom = [Formula::atom("p")];
    for (spec, modal, expected) in [("pos:<>,&", vec![dia], 3), ("pos:&,|,<>,[]", vec![dia, boxed], 18)] {
        let ors = spec.contains('|');
        let oracle = closure_classes(&u, &p_atom, true, ors, &modal, 1);
        let reps = enumerate_formulas(&Fragment::parse(spec, props(P)).unwrap(), 1, &u, &b).unwrap();
        assert_eq!(oracle.len(), expected, "{spec}");
        assert_eq!(reps.len(), expected, "{spec}");
        let mut got: Vec<Vec<bool>> = reps
            .iter()
            .map(|f| u.iter().map(|m| holds(m.model(), m.point(), f)).collect())
            .collect();
        got.sort();
        let want: Vec<Vec<bool>> = oracle.into_iter().map(|(v, _)| v).collect();
        assert_eq!(got, want, "{spec}");
    }
}

/// Both directions of the duality contract, decided with the naive fixpoint.
fn naive_duality(f: &Formula, e: &ExampleSet, universe: &[PointedModel]) -> usize {
    universe
        .iter()
        .filter(|m| {
            if holds(m.model(), m.point(), f) {
                !e.positive.iter().any(|x| naive_relates(Kind::Weak, m, x))
            } else {
                !e.negative.iter().any(|x| naive_relates(Kind::Weak, x, m))
            }
        })
        .count()
}

#[test]
fn positive_characterizations_pass_naive_duality() {
    let b = Budget::default();
    let fr = Fragment::parse("pos:&,|,<>,[]", props(P)).unwrap();
    let universe = enumerate_models(&props(P), 1, true, &b).unwrap();
    assert_eq!(universe.len(), 512);
    for text in ["p", "[]p", "<>p", "p | []p"] {
        let f = parse_formula(text).unwrap();
        let e = characterize_positive(&f, &fr, &b).unwrap();
        assert_eq!(naive_duality(&f, &e, &universe), 0, "{text}");
        for (i, a) in e.positive.iter().enumerate() {
            for c in &e.positive[i + 1..] {
                assert!(!naive_relates(Kind::Weak, a, c) && !naive_relates(Kind::Weak, c, a), "{text}");
            }
        }
        for (i, a) in e.negative.iter().enumerate() {
            for c in &e.negative[i + 1..] {
                assert!(!naive_relates(Kind::Weak, a, c) && !naive_relates(Kind::Weak, c, a), "{text}");
            }
        }
    }
}

#[test]
fn refuter_output_is_checked_by_textbook_semantics() {
    let e0 = props(&[]);
    let e = ExampleSet::new(e0.clone(), vec![single_point(&e0, Vec::<&str>::new()).unwrap()], vec![chain(&e0, &[0, 0])]).unwrap();
    let phi = refute_full_language(&e, &Budget::default()).unwrap();
    assert!(e.positive.iter().all(|m| holds(m.model(), m.point(), &phi)));
    assert!(e.negative.iter().all(|m| !holds(m.model(), m.point(), &phi)));
    let witness = chain(&e0, &[0, 0, 0]);
    let bot = parse_formula("[]F").unwrap();
    assert!(holds(witness.model(), 0, &phi) && !holds(witness.model(), 0, &bot));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn diamond_p_frontier_admits_no_other_formula(g in formula(P, Grammar::CONJ_DIAMOND, 3)) {
        let p = props(P);
        let f = parse_formula("<>p").unwrap();
        let e = characterize_conj_diamond(&f, &Fragment::parse("pos:<>,&", p.clone()).unwrap()).unwrap();
        prop_assert_eq!(&e.positive, &vec![chain(&p, &[0, 1])]);
        let fits = e.positive.iter().all(|m| holds(m.model(), m.point(), &g))
            && e.negative.iter().all(|m| !holds(m.model(), m.point(), &g));
        if fits {
            let tf = canonical_tree(&f, &p);
            let tg = canonical_tree(&g, &p);
            prop_assert!(holds(tf.model(), 0, &g) && holds(tg.model(), 0, &f), "{} fits", g);
        }
    }

    #[test]
    fn truncation_measures_height(m in model(props(P), 4), d in 0usize..5) {
        let cut = truncate(&m, d, &Budget::default()).unwrap();
        let deep = satisfies(&cut, &Formula::dia_n(d, Formula::Top)).unwrap();
        let tall = match height(&m) {
            ExtendedNat::Infinite => true,
            ExtendedNat::Finite(h) => h >= d,
        };
        prop_assert_eq!(deep, tall);
    }
}
