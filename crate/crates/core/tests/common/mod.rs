//! Reference oracles shared by the integration tests. They are written
//! against plain vectors and brute force, independently of the library
//! internals.
#![allow(dead_code)]

use std::collections::{HashSet, VecDeque};
use std::path::PathBuf;

use omega_sct::sct::{CallId, SctProblem};
use omega_sct::{BuchiAutomaton, Label, Lasso};

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

pub fn corpus_file(name: &str) -> String {
    std::fs::read_to_string(corpus_dir().join(name)).expect("bundled fixture")
}

/// Membership of `u v^ω` by searching the product of `b` with the lasso's
/// position graph for a reachable accepting cycle.
pub fn lasso_member(b: &BuchiAutomaton, w: &Lasso) -> bool {
    let (lu, lv) = (w.prefix.len(), w.cycle.len());
    let len = lu + lv;
    let n = b.num_states();
    let letter = |i: usize| if i < lu { w.prefix[i] } else { w.cycle[i - lu] };
    let next_pos = |i: usize| if i + 1 == len { lu } else { i + 1 };
    let id = |q: usize, i: usize| q * len + i;
    let succ = |v: usize| -> Vec<usize> {
        let (q, i) = (v / len, v % len);
        b.successors(q, letter(i)).ones().map(|r| id(r, next_pos(i))).collect()
    };
    // nodes reachable in one or more steps
    let reach = |starts: Vec<usize>| {
        let mut seen = vec![false; n * len];
        let mut todo: VecDeque<usize> = starts.into();
        while let Some(v) = todo.pop_front() {
            for s in succ(v) {
                if !seen[s] {
                    seen[s] = true;
                    todo.push_back(s);
                }
            }
        }
        seen
    };
    let mut from_init = vec![false; n * len];
    for q in b.initial().ones() {
        from_init[id(q, 0)] = true;
    }
    let after = reach(b.initial().ones().map(|q| id(q, 0)).collect());
    for v in 0..n * len {
        from_init[v] |= after[v];
    }
    (0..n * len).any(|v| {
        let (q, i) = (v / len, v % len);
        from_init[v] && i >= lu && b.is_accepting(q) && reach(vec![v])[v]
    })
}

/// Every lasso over `symbols` letters with `|u| <= max_u`, `1 <= |v| <= max_v`.
pub fn all_lassos(symbols: usize, max_u: usize, max_v: usize) -> Vec<Lasso> {
    let words = |min: usize, max: usize| {
        let mut out: Vec<Vec<usize>> = Vec::new();
        for len in min..=max {
            for k in 0..symbols.pow(len as u32) {
                out.push((0..len).map(|i| k / symbols.pow(i as u32) % symbols).collect());
            }
        }
        out
    };
    let mut out = Vec::new();
    for u in words(0, max_u) {
        for v in words(1, max_v) {
            out.push(Lasso::new(u.clone(), v).unwrap());
        }
    }
    out
}

/// Every automaton with `n` states over `{a, b}`: all transition relations,
/// initial sets and accepting sets.
pub fn all_automata(n: usize) -> impl Iterator<Item = BuchiAutomaton> {
    let bits = 2 * n * n;
    (0u64..1 << bits).flat_map(move |trans| {
        (0u64..1 << n).flat_map(move |init| {
            (0u64..1 << n).map(move |acc| {
                let mut b = BuchiAutomaton::new(&["a", "b"]).unwrap();
                for q in 0..n {
                    b.add_state(format!("q{q}")).unwrap();
                    if init >> q & 1 == 1 {
                        b.set_initial(q);
                    }
                    if acc >> q & 1 == 1 {
                        b.set_accepting(q);
                    }
                }
                for k in 0..bits {
                    if trans >> k & 1 == 1 {
                        let (p, rest) = (k / (2 * n), k % (2 * n));
                        b.add_transition(p, rest / n, rest % n);
                    }
                }
                b
            })
        })
    })
}

/// Dense size-change graph: `m[x][y]` is `None`, `Some(false)` for a
/// non-strict arc or `Some(true)` for a strict one.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Dense {
    pub source: usize,
    pub target: usize,
    pub m: Vec<Vec<Option<bool>>>,
}

impl Dense {
    pub fn compose(&self, other: &Dense) -> Dense {
        let rows = self.m.len();
        let cols = other.m.first().map_or(0, Vec::len);
        let mut m = vec![vec![None; cols]; rows];
        for (x, row) in m.iter_mut().enumerate() {
            for (y, cell) in self.m[x].iter().enumerate() {
                let Some(s) = *cell else { continue };
                for (z, out) in row.iter_mut().enumerate() {
                    if let Some(t) = other.m[y][z] {
                        *out = Some(out.unwrap_or(false) | s | t);
                    }
                }
            }
        }
        Dense {
            source: self.source,
            target: other.target,
            m,
        }
    }

    pub fn has_strict_self_loop(&self) -> bool {
        (0..self.m.len()).any(|x| self.m[x][x] == Some(true))
    }
}

pub fn dense_scgs(p: &SctProblem) -> Vec<Dense> {
    p.scgs()
        .iter()
        .map(|g| {
            let mut m = vec![vec![None; p.params(g.target).len()]; p.params(g.source).len()];
            for (x, l, y) in g.graph.arcs() {
                m[x][y] = Some(l == Label::One);
            }
            Dense {
                source: g.source,
                target: g.target,
                m,
            }
        })
        .collect()
}

/// Naive composition closure. Returns the closure and whether every
/// idempotent `f -> f` graph carries a strict self-loop.
pub fn dense_closure(p: &SctProblem) -> (HashSet<Dense>, bool) {
    let base = dense_scgs(p);
    let mut all: HashSet<Dense> = base.iter().cloned().collect();
    let mut todo: VecDeque<Dense> = base.iter().cloned().collect();
    while let Some(g) = todo.pop_front() {
        for h in &base {
            if h.source == g.target {
                let gh = g.compose(h);
                if all.insert(gh.clone()) {
                    todo.push_back(gh);
                }
            }
        }
    }
    let ok = all
        .iter()
        .filter(|g| g.source == g.target && g.compose(g) == **g)
        .all(Dense::has_strict_self_loop);
    (all, ok)
}

/// True iff the calls form a cycle in the call graph and `(calls)^ω`
/// admits no infinitely descending thread.
pub fn is_nontermination_witness(p: &SctProblem, calls: &[CallId]) -> bool {
    if calls.is_empty() {
        return false;
    }
    let calls_of = p.calls();
    let linked = (0..calls.len()).all(|i| {
        calls_of[calls[i]].target == calls_of[calls[(i + 1) % calls.len()]].source
    });
    if !linked {
        return false;
    }
    let scgs = dense_scgs(p);
    let mut g = scgs[calls[0]].clone();
    for &c in &calls[1..] {
        g = g.compose(&scgs[c]);
    }
    // some power of g is idempotent
    let mut powers = vec![g.clone()];
    loop {
        let next = powers.last().unwrap().compose(&g);
        if let Some(i) = powers.iter().position(|h| *h == next) {
            let period = powers.len() - i;
            // the idempotent power sits in the cycle of powers
            let k = (i..powers.len()).find(|k| (k + 1) % period == 0).unwrap();
            return !powers[k].has_strict_self_loop();
        }
        powers.push(next);
    }
}
