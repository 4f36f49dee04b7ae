mod common;

use common::{corpus_file, lasso_member};
use omega_sct::formats::parse_ba;
use omega_sct::generate::random_automaton_uniform;
use omega_sct::{accepts_lasso, intersect, is_empty, BuchiAutomaton, Emptiness, Error, Lasso};
use proptest::prelude::*;
use rand::{rngs::StdRng, SeedableRng};

fn fig1() -> BuchiAutomaton {
    parse_ba(&corpus_file("fig1.ba")).unwrap()
}

fn lasso(b: &BuchiAutomaton, u: &[&str], v: &[&str]) -> Lasso {
    Lasso::new(b.word(u).unwrap(), b.word(v).unwrap()).unwrap()
}

#[test]
fn fig1_language_is_finitely_many_but_some_a() {
    let b = fig1();
    let cases: [(&[&str], &[&str], bool); 7] = [
        (&["a"], &["b"], true),
        (&["b", "a", "a"], &["b"], true),
        (&["a", "b", "a"], &["b", "b"], true),
        (&[], &["b"], false),
        (&[], &["a"], false),
        (&[], &["a", "b"], false),
        (&["a"], &["b", "a"], false),
    ];
    for (u, v, want) in cases {
        let w = lasso(&b, u, v);
        assert_eq!(accepts_lasso(&b, &w).unwrap(), want, "{u:?} ({v:?})^ω");
        assert_eq!(lasso_member(&b, &w), want, "oracle on {u:?} ({v:?})^ω");
    }
}

#[test]
fn empty_cycle_is_rejected() {
    assert_eq!(Lasso::new(vec![0], vec![]), Err(Error::EmptyWord));
}

#[test]
fn unknown_names_are_reported() {
    let b = fig1();
    assert!(matches!(b.word(&["c"]), Err(Error::UnknownSymbol(_))));
    assert!(matches!(b.state_id("t"), Err(Error::UnknownState(_))));
}

#[test]
fn universal_automaton_accepts_everything() {
    let u = BuchiAutomaton::universal(&["a", "b"]).unwrap();
    for w in common::all_lassos(2, 2, 2) {
        assert!(accepts_lasso(&u, &w).unwrap());
    }
}

#[test]
fn emptiness_witness_is_accepted() {
    let b = fig1();
    match is_empty(&b) {
        Emptiness::NonEmpty(w) => assert!(lasso_member(&b, &w)),
        Emptiness::Empty => panic!("fig1 has words"),
    }
    let mut dead = BuchiAutomaton::new(&["a"]).unwrap();
    let q = dead.add_state("q").unwrap();
    dead.set_initial(q);
    dead.set_accepting(q);
    assert!(is_empty(&dead).is_empty());
}

#[test]
fn fig1_is_not_reverse_deterministic() {
    // s has two a-predecessors
    assert!(!fig1().is_reverse_deterministic());
    let u = BuchiAutomaton::universal(&["a", "b"]).unwrap();
    assert!(u.is_reverse_deterministic());
}

#[test]
fn alphabets_must_match() {
    let a = BuchiAutomaton::universal(&["a"]).unwrap();
    let b = BuchiAutomaton::universal(&["a", "b"]).unwrap();
    assert_eq!(intersect(&a, &b).err(), Some(Error::AlphabetMismatch));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn membership_matches_oracle(seed in any::<u64>(), n in 1usize..5, u in proptest::collection::vec(0usize..2, 0..3), v in proptest::collection::vec(0usize..2, 1..4)) {
        let b = random_automaton_uniform(&mut StdRng::seed_from_u64(seed), n, 2, 0.4);
        let w = Lasso::new(u, v).unwrap();
        prop_assert_eq!(accepts_lasso(&b, &w).unwrap(), lasso_member(&b, &w));
    }

    #[test]
    fn intersection_is_conjunction(seed in any::<u64>(), n in 1usize..4, m in 1usize..4) {
        let mut rng = StdRng::seed_from_u64(seed);
        let a = random_automaton_uniform(&mut rng, n, 2, 0.5);
        let b = random_automaton_uniform(&mut rng, m, 2, 0.5);
        let ab = intersect(&a, &b).unwrap();
        for w in common::all_lassos(2, 1, 2) {
            prop_assert_eq!(lasso_member(&ab, &w), lasso_member(&a, &w) && lasso_member(&b, &w));
        }
        if let Emptiness::NonEmpty(w) = is_empty(&ab) {
            prop_assert!(lasso_member(&a, &w) && lasso_member(&b, &w));
        }
    }
}
