mod common;

use common::{corpus_file, lasso_member};
use omega_sct::formats::parse_ba;
use omega_sct::generate::random_automaton;
use omega_sct::rank::{
    covers, default_rank_bound, kv_complement, rank_containment_with, rank_universality_with, LevelRanking,
    RankOptions,
};
use omega_sct::{BuchiAutomaton, Error};
use rand::{rngs::StdRng, SeedableRng};

fn fig1() -> BuchiAutomaton {
    parse_ba(&corpus_file("fig1.ba")).unwrap()
}

#[test]
fn default_bounds() {
    assert_eq!(default_rank_bound(&fig1()), 4);
    let u = BuchiAutomaton::universal(&["a"]).unwrap();
    assert_eq!(default_rank_bound(&u), 2);
    // q has two a-predecessors; 2|Q| - 2 = 2 anyway
    let mut two = BuchiAutomaton::new(&["a"]).unwrap();
    let p = two.add_state("p").unwrap();
    let q = two.add_state("q").unwrap();
    two.add_transition(p, 0, q);
    two.add_transition(q, 0, q);
    assert_eq!(default_rank_bound(&two), 2);
}

#[test]
fn fig1_complement_is_exact_on_short_lassos() {
    let b = fig1();
    let c = kv_complement(&b, default_rank_bound(&b) as i64).unwrap();
    for w in common::all_lassos(2, 3, 3) {
        assert_ne!(lasso_member(&b, &w), lasso_member(&c, &w), "{}", w.render(b.alphabet()));
    }
}

#[test]
fn negative_bound_is_rejected() {
    assert_eq!(kv_complement(&fig1(), -1).err(), Some(Error::InvalidRank(-1)));
}

#[test]
fn accepting_states_never_take_odd_ranks() {
    let b = fig1();
    let r = b.state_id("r").unwrap();
    let mut ranks = vec![Some(2), Some(2), Some(2)];
    assert!(LevelRanking::from_ranks(&ranks).unwrap().is_valid_for(&b, 4));
    ranks[r] = Some(1);
    assert!(!LevelRanking::from_ranks(&ranks).unwrap().is_valid_for(&b, 4));
    ranks[r] = Some(6);
    assert!(!LevelRanking::from_ranks(&ranks).unwrap().is_valid_for(&b, 4));
}

#[test]
fn covering_forbids_rank_increase() {
    let b = fig1();
    let a = b.symbol_id("a").unwrap();
    let hi = LevelRanking::from_ranks(&[Some(3), Some(2), Some(1)]).unwrap();
    let lo = LevelRanking::from_ranks(&[Some(1), Some(0), Some(1)]).unwrap();
    assert!(covers(&hi, &lo, a, &b).unwrap());
    assert!(!covers(&lo, &hi, a, &b).unwrap());
    // q is ranked and reaches r on a, so r cannot become unranked
    let gap = LevelRanking::from_ranks(&[Some(3), None, Some(1)]).unwrap();
    assert!(!covers(&hi, &gap, a, &b).unwrap());
}

#[test]
fn antichain_and_explicit_agree() {
    let mut rng = StdRng::seed_from_u64(3);
    for _ in 0..60 {
        let b = random_automaton(&mut rng, 3, 2, 1.5, 0.5);
        let on = rank_universality_with(&b, &RankOptions::default()).unwrap();
        let off = rank_universality_with(
            &b,
            &RankOptions {
                subsumption: false,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(on.verdict.holds(), off.verdict.holds());
        assert_eq!(on.stats.max_rank, default_rank_bound(&b));
        for v in [&on.verdict, &off.verdict] {
            if let Some(w) = v.lasso() {
                assert!(!lasso_member(&b, w));
            }
        }
    }
}

#[test]
fn fig1_contains_its_subset() {
    // a b^ω only
    let b = fig1();
    let mut a = BuchiAutomaton::new(&["a", "b"]).unwrap();
    let p = a.add_state("p").unwrap();
    let q = a.add_state("q").unwrap();
    a.set_initial(p);
    a.set_accepting(q);
    a.add_transition(p, 0, q);
    a.add_transition(q, 1, q);
    let v = rank_containment_with(&a, &b, &RankOptions::default()).unwrap();
    assert!(v.verdict.holds());
    let back = rank_containment_with(&b, &a, &RankOptions::default()).unwrap();
    let w = back.verdict.lasso().unwrap();
    assert!(lasso_member(&b, w) && !lasso_member(&a, w));
}
