use std::collections::BTreeSet;

use ordalg::algebra::obs_equiv;
use ordalg::event::Sym;
use ordalg::event::{Chan, Pol};
use ordalg::picalc::{bar, dependency_order, linear_action, new, oplus, outcome_by_runs, outcome_term, par, runs, term_equiv, translate, Term};
use ordalg::semiring::SemiringDescriptor;
use ordalg_cli::corpus::{rng, TermGen};
use proptest::prelude::*;

const NAMES: [&str; 2] = ["a", "b"];

fn nat() -> SemiringDescriptor {
    SemiringDescriptor::nat()
}

fn term(seed: u64, actions: usize) -> Term {
    TermGen::new(nat(), &NAMES).simple(&mut rng(seed), actions)
}

fn alphabet() -> BTreeSet<Sym> {
    NAMES.iter().map(|x| ordalg::event::sym(x)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn reduced_evaluator_matches_runs(s in any::<u64>(), t in any::<u64>()) {
        let p = par(&term(s, 4), &term(t, 4));
        prop_assert_eq!(outcome_term(nat(), &p), outcome_by_runs(nat(), &p));
    }

    #[test]
    fn causal_order_is_prefix_dependency(s in any::<u64>(), t in any::<u64>()) {
        let p = par(&term(s, 4), &term(t, 4));
        for run in runs(&p) {
            prop_assert_eq!(&run.order, &dependency_order(&p, &run.labels));
        }
    }

    #[test]
    fn translation_is_linear(s in any::<u64>(), t in any::<u64>()) {
        let (p, q) = (term(s, 3), term(t, 3));
        let sum = translate(nat(), &oplus(nat(), &p, &q), &alphabet()).unwrap();
        let parts = translate(nat(), &p, &alphabet()).unwrap().add(&translate(nat(), &q, &alphabet()).unwrap()).unwrap();
        prop_assert!(obs_equiv(&sum, &parts).unwrap());
    }

    #[test]
    fn bar_is_an_involution_on_translations(s in any::<u64>()) {
        let u = translate(nat(), &term(s, 4), &alphabet()).unwrap();
        prop_assert_eq!(bar(&bar(&u).unwrap()).unwrap(), u);
    }

    #[test]
    fn fresh_hiding_is_invisible(s in any::<u64>(), t in any::<u64>()) {
        let (p, r) = (term(s, 4), term(t, 4));
        prop_assert_eq!(outcome_term(nat(), &par(&new("fresh", p.clone()), &r)), outcome_term(nat(), &par(&p, &r)));
    }

    #[test]
    fn equivalence_is_a_congruence(s in any::<u64>(), t in any::<u64>()) {
        let (p, c) = (term(s, 3), term(t, 2));
        let q = par(&p, &Term::Scalar(nat().one()));
        prop_assert!(term_equiv(nat(), &p, &q).unwrap());
        prop_assert!(term_equiv(nat(), &par(&p, &c), &par(&q, &c)).unwrap());
        prop_assert!(term_equiv(nat(), &new("a", p.clone()), &new("a", q.clone())).unwrap());
        prop_assert!(term_equiv(nat(), &oplus(nat(), &p, &c), &oplus(nat(), &q, &c)).unwrap());
        let prefix = |t: &Term| linear_action(nat(), &Chan::root("b"), Pol::Neg, "z", t);
        prop_assert!(term_equiv(nat(), &prefix(&p), &prefix(&q)).unwrap());
    }
}
