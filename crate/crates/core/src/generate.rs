//! Random instances and the bundled pathological family.

use rand::{Rng, RngExt};

use crate::automaton::BuchiAutomaton;
use crate::graph::Label;
use crate::sct::SctProblem;

/// Random automaton in the style of Tabakov and Vardi: for each letter,
/// `round(density * states)` distinct transitions; `round(acceptance *
/// states)` accepting states (at least one when `acceptance > 0`); state 0
/// initial.
pub fn random_automaton<R: Rng + ?Sized>(
    rng: &mut R,
    states: usize,
    symbols: usize,
    density: f64,
    acceptance: f64,
) -> BuchiAutomaton {
    let alphabet: Vec<String> = (0..symbols).map(|i| ((b'a' + i as u8) as char).to_string()).collect();
    let mut b = BuchiAutomaton::new(&alphabet).expect("distinct letters");
    for i in 0..states {
        b.add_state(format!("q{i}")).expect("distinct names");
    }
    if states == 0 {
        return b;
    }
    b.set_initial(0);
    let n_acc = ((acceptance * states as f64).round() as usize)
        .max(usize::from(acceptance > 0.0))
        .min(states);
    for q in sample(rng, states, n_acc) {
        b.set_accepting(q);
    }
    let per_letter = ((density * states as f64).round() as usize).min(states * states);
    for a in 0..symbols {
        for k in sample(rng, states * states, per_letter) {
            b.add_transition(k / states, a, k % states);
        }
    }
    b
}

/// `k` distinct values below `n`.
fn sample<R: Rng + ?Sized>(rng: &mut R, n: usize, k: usize) -> Vec<usize> {
    rand::seq::index::sample(rng, n, k).into_vec()
}

/// Fully random automaton: every transition, initial and accepting flag
/// independently with the given probabilities.
pub fn random_automaton_uniform<R: Rng + ?Sized>(
    rng: &mut R,
    states: usize,
    symbols: usize,
    p_trans: f64,
) -> BuchiAutomaton {
    let alphabet: Vec<String> = (0..symbols).map(|i| ((b'a' + i as u8) as char).to_string()).collect();
    let mut b = BuchiAutomaton::new(&alphabet).expect("distinct letters");
    for i in 0..states {
        b.add_state(format!("q{i}")).expect("distinct names");
        if rng.random_bool(0.5) {
            b.set_initial(i);
        }
        if rng.random_bool(0.5) {
            b.set_accepting(i);
        }
    }
    for p in 0..states {
        for a in 0..symbols {
            for q in 0..states {
                if rng.random_bool(p_trans) {
                    b.add_transition(p, a, q);
                }
            }
        }
    }
    b
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SctShape {
    pub max_functions: usize,
    pub max_arity: usize,
    pub max_calls: usize,
    /// Probability of each possible arc.
    pub arc_probability: f64,
    /// Probability that an arc is strict.
    pub strict_probability: f64,
    /// At most one incoming arc per callee parameter.
    pub reverse_deterministic: bool,
}

impl Default for SctShape {
    fn default() -> Self {
        SctShape {
            max_functions: 5,
            max_arity: 4,
            max_calls: 8,
            arc_probability: 0.35,
            strict_probability: 0.4,
            reverse_deterministic: false,
        }
    }
}

/// Random SCT problem of the given shape. Functions are `f0, f1, ...`,
/// parameters `x0, x1, ...`, calls `c0, c1, ...`.
pub fn random_sct<R: Rng + ?Sized>(rng: &mut R, shape: &SctShape) -> SctProblem {
    let mut p = SctProblem::new();
    let nf = rng.random_range(1..=shape.max_functions.max(1));
    for f in 0..nf {
        let arity = rng.random_range(1..=shape.max_arity.max(1));
        let names: Vec<String> = (0..arity).map(|i| format!("x{i}")).collect();
        p.add_function(&format!("f{f}"), &names).expect("fresh names");
    }
    let nc = rng.random_range(1..=shape.max_calls.max(1));
    for c in 0..nc {
        let (s, t) = (rng.random_range(0..nf), rng.random_range(0..nf));
        let (ns, nt) = (p.params(s).len(), p.params(t).len());
        let label = |rng: &mut R| Label::from_bit(rng.random_bool(shape.strict_probability));
        let mut arcs = Vec::new();
        for y in 0..nt {
            if shape.reverse_deterministic {
                if rng.random_bool((shape.arc_probability * ns as f64).min(1.0)) {
                    let x = rng.random_range(0..ns);
                    arcs.push((x, label(rng), y));
                }
            } else {
                for x in 0..ns {
                    if rng.random_bool(shape.arc_probability) {
                        arcs.push((x, label(rng), y));
                    }
                }
            }
        }
        p.add_call(&format!("c{c}"), s, t, &arcs).expect("valid arcs");
    }
    p
}

/// Parameter-permutation gadget of size `n`: one function `f(x1..xn)` and
/// two calls whose strict arcs rotate and swap the parameters. The
/// rotation call also lets `x1` keep its value (a non-strict arc into
/// `x1`), so callee nodes may have two incoming arcs. Every call carries a
/// strict permutation, so the problem terminates, while compositions range
/// over the whole symmetric group.
pub fn permutation_gadget(n: usize) -> SctProblem {
    assert!(n >= 2, "gadgets need at least two parameters");
    let names: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    let mut p = SctProblem::new();
    let f = p.add_function("f", &names).expect("fresh names");
    let mut rot: Vec<_> = (0..n).map(|i| (i, Label::One, (i + 1) % n)).collect();
    rot.push((0, Label::Zero, 0));
    p.add_call("rot", f, f, &rot).expect("valid arcs");
    let mut swap: Vec<_> = (2..n).map(|i| (i, Label::One, i)).collect();
    swap.push((0, Label::One, 1));
    swap.push((1, Label::One, 0));
    p.add_call("swap", f, f, &swap).expect("valid arcs");
    p
}
