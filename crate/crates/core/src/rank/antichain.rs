//! Backward Emerson-Lei fixpoint over `A × KV(B)` with antichains.
//!
//! Elements are `(a, c, f, o)`: a state of `A`, a phase bit (only used when
//! `A` has rejecting states), a level ranking and an obligation set. The
//! order used for subsumption is
//!
//! ```text
//! x ⊒ y  iff  a, c equal; f_x ≥ f_y pointwise (⊥ on top);
//!             o_x ⊆ o_y; and o_x = ∅ iff o_y = ∅
//! ```
//!
//! which is a step-wise simulation of the complement in which an obligation
//! set may be padded with extra states (padding never makes a run accept, and
//! the unpadded run is always available, so the language is unchanged).
//! Every set in the fixpoint is upward closed and stored by its minimal
//! elements.

use std::collections::HashMap;

use crate::automaton::{BuchiAutomaton, Lasso, SymbolId};
use crate::deadline::{Deadline, Ticker};
use crate::error::Result;

use super::ranking::BOT;

pub(crate) struct Product<'a> {
    a: &'a BuchiAutomaton,
    n: usize,
    r: u8,
    counter: bool,
    acc_b: u64,
    // [a'][σ] -> predecessors of a' in A
    pred_a: Vec<Vec<Vec<usize>>>,
    // [σ][q] -> successors of q in B
    succ_b: Vec<Vec<u64>>,
}

#[derive(Clone, Debug)]
struct Node {
    a: u32,
    c: u8,
    f: Box<[u8]>,
    o: u64,
    step: Option<Step>,
}

#[derive(Clone, Debug)]
struct Step {
    target: usize,
    sigma: SymbolId,
    f_next: Box<[u8]>,
    into_y: bool,
}

#[inline]
fn dominates(xf: &[u8], xo: u64, yf: &[u8], yo: u64) -> bool {
    (xo == 0) == (yo == 0) && xo & !yo == 0 && xf.iter().zip(yf).all(|(a, b)| a >= b)
}

/// Minimal elements of an upward-closed set, bucketed by `(a, c, o = ∅)`.
#[derive(Default)]
struct Antichain {
    lists: HashMap<(u32, u8, bool), Vec<usize>>,
    len: usize,
}

impl Antichain {
    fn find_below(&self, arena: &[Node], a: u32, c: u8, f: &[u8], o: u64) -> Option<usize> {
        self.lists.get(&(a, c, o == 0)).and_then(|list| {
            list.iter()
                .copied()
                .find(|&m| dominates(f, o, &arena[m].f, arena[m].o))
        })
    }

    fn insert(&mut self, arena: &[Node], id: usize, member: &mut [bool]) -> bool {
        let x = &arena[id];
        if self.find_below(arena, x.a, x.c, &x.f, x.o).is_some() {
            return false;
        }
        let list = self.lists.entry((x.a, x.c, x.o == 0)).or_default();
        let before = list.len();
        list.retain(|&m| {
            let keep = !dominates(&arena[m].f, arena[m].o, &x.f, x.o);
            if !keep {
                member[m] = false;
            }
            keep
        });
        self.len -= before - list.len();
        list.push(id);
        member[id] = true;
        self.len += 1;
        true
    }

    fn ids(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.lists.values().flatten().copied().collect();
        v.sort_unstable();
        v
    }

    fn covers_all(&self, arena: &[Node], other: &Antichain) -> bool {
        other.lists.values().flatten().all(|&y| {
            let n = &arena[y];
            self.find_below(arena, n.a, n.c, &n.f, n.o).is_some()
        })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct AntichainStats {
    /// Elements generated over the whole run.
    pub elements: usize,
    pub iterations: usize,
    pub max_antichain: usize,
    /// Largest number of incomparable elements produced by one
    /// predecessor computation (one element, one letter, one source of A).
    pub max_pre_width: usize,
}

pub(crate) struct Outcome {
    pub nonempty: bool,
    pub lasso: Option<Lasso>,
    pub stats: AntichainStats,
}

type Ranks = Box<[u8]>;

struct PreResult {
    // (f, f_next) for an empty-obligation predecessor
    reset: Option<(Ranks, Ranks)>,
    // (f, o, f_next)
    keep: Vec<(Ranks, u64, Ranks)>,
}

impl<'a> Product<'a> {
    pub(crate) fn new(a: &'a BuchiAutomaton, b: &'a BuchiAutomaton, r: u8) -> Self {
        let n = b.num_states();
        let k = b.num_symbols();
        let mut pred_a = vec![vec![Vec::new(); k]; a.num_states()];
        for (p, s, q) in a.transitions() {
            pred_a[q][s].push(p);
        }
        let succ_b = (0..k)
            .map(|s| {
                (0..n)
                    .map(|q| b.successors(q, s).ones().fold(0u64, |m, x| m | 1 << x))
                    .collect()
            })
            .collect();
        let acc_b = b.accepting().ones().fold(0u64, |m, x| m | 1 << x);
        let counter = a.accepting().count_ones(..) < a.num_states();
        Product {
            a,
            n,
            r,
            counter,
            acc_b,
            pred_a,
            succ_b,
        }
    }

    #[inline]
    fn acc(&self, q: usize) -> bool {
        self.acc_b >> q & 1 == 1
    }

    /// Least rank `≥ v` allowed at `q`.
    #[inline]
    fn legal_min(&self, v: u8, q: usize) -> u8 {
        if v == BOT {
            return BOT;
        }
        let v = if self.acc(q) && v % 2 == 1 { v + 1 } else { v };
        if v > self.r {
            BOT
        } else {
            v
        }
    }

    /// Least ranking at the source that covers `f_next`.
    fn lift(&self, sigma: usize, f_next: &[u8]) -> Box<[u8]> {
        (0..self.n)
            .map(|s| {
                let mut m = self.succ_b[sigma][s];
                if m == 0 {
                    return 0;
                }
                let mut hi = 0u8;
                while m != 0 {
                    let q = m.trailing_zeros() as usize;
                    m &= m - 1;
                    hi = hi.max(f_next[q]);
                }
                self.legal_min(hi, s)
            })
            .collect()
    }

    /// Minimal complement predecessors on `sigma` of `↑(g, p)`.
    fn pre_kv(&self, sigma: usize, g: &[u8], p: u64) -> PreResult {
        let n = self.n;
        let base: Vec<u8> = (0..n).map(|q| self.legal_min(g[q], q)).collect();

        // o = ∅: the successor's obligation is every even state, so states
        // outside p must be odd or unranked.
        let reset_next: Box<[u8]> = (0..n)
            .map(|q| {
                let v = base[q];
                if p >> q & 1 == 1 || v == BOT || v % 2 == 1 {
                    v
                } else if self.acc(q) || v + 1 > self.r {
                    BOT
                } else {
                    v + 1
                }
            })
            .collect();
        let reset = Some((self.lift(sigma, &reset_next), reset_next));

        // o ≠ ∅: successors of o outside p must be odd.
        let odd: Vec<Option<u8>> = (0..n)
            .map(|q| {
                if p >> q & 1 == 1 || g[q] == BOT || self.acc(q) {
                    return None;
                }
                let v = if g[q] % 2 == 1 { g[q] } else { g[q] + 1 };
                (v <= self.r).then_some(v)
            })
            .collect();
        let mut free = 0u64;
        let mut contested: Vec<(usize, u64)> = Vec::new();
        for s in 0..n {
            let mut out = self.succ_b[sigma][s] & !p;
            let mut allowed = true;
            let mut raise = 0u64;
            while out != 0 {
                let q = out.trailing_zeros() as usize;
                out &= out - 1;
                match odd[q] {
                    None => {
                        allowed = false;
                        break;
                    }
                    Some(v) if v != base[q] => raise |= 1 << q,
                    Some(_) => {}
                }
            }
            if !allowed {
                continue;
            }
            if raise == 0 {
                free |= 1 << s;
            } else {
                contested.push((s, raise));
            }
        }
        let mut keep: Vec<(Ranks, u64, Ranks)> = Vec::new();
        let k = contested.len();
        assert!(k < 64, "too many contested sources");
        for j in 0u64..(1u64 << k) {
            let mut o = free;
            let mut raise = 0u64;
            for (i, &(s, r)) in contested.iter().enumerate() {
                if j >> i & 1 == 1 {
                    o |= 1 << s;
                    raise |= r;
                }
            }
            if o == 0 {
                continue;
            }
            let next: Box<[u8]> = (0..n)
                .map(|q| {
                    if raise >> q & 1 == 1 {
                        odd[q].expect("raised states have an odd rank")
                    } else {
                        base[q]
                    }
                })
                .collect();
            let f = self.lift(sigma, &next);
            if keep.iter().any(|(kf, ko, _)| dominates(&f, o, kf, *ko)) {
                continue;
            }
            keep.retain(|(kf, ko, _)| !dominates(kf, *ko, &f, o));
            keep.push((f, o, next));
        }
        PreResult { reset, keep }
    }

    fn in_f(&self, c: u8, o: u64) -> bool {
        o == 0 && (!self.counter || c == 1)
    }

    fn next_counter(&self, a: usize, c: u8, o: u64) -> u8 {
        if !self.counter {
            0
        } else if c == 0 {
            u8::from(self.a.is_accepting(a))
        } else if o == 0 {
            0
        } else {
            1
        }
    }

    /// Predecessor elements of `arena[t]` on every letter.
    fn pre(&self, arena: &[Node], t: usize, into_y: bool, out: &mut Vec<Node>, width: &mut usize) {
        let tn = &arena[t];
        let phases: &[u8] = if self.counter { &[0, 1] } else { &[0] };
        for sigma in 0..self.succ_b.len() {
            let preds = &self.pred_a[tn.a as usize][sigma];
            if preds.is_empty() {
                continue;
            }
            let pr = self.pre_kv(sigma, &tn.f, tn.o);
            for &a in preds {
                let mut produced = 0;
                for &c in phases {
                    let mut push = |f: &[u8], o: u64, nx: &[u8]| {
                        if self.next_counter(a, c, o) == tn.c {
                            produced += 1;
                            out.push(Node {
                                a: a as u32,
                                c,
                                f: f.into(),
                                o,
                                step: Some(Step {
                                    target: t,
                                    sigma,
                                    f_next: nx.into(),
                                    into_y,
                                }),
                            });
                        }
                    };
                    if let Some((f, nx)) = &pr.reset {
                        push(f, 0, nx);
                    }
                    for (f, o, nx) in &pr.keep {
                        push(f, *o, nx);
                    }
                }
                *width = (*width).max(produced);
            }
        }
    }

    /// Decides whether some initial state `(a, 0, f_in, ∅)` has an accepting
    /// run, extracting a lasso when it does.
    pub(crate) fn solve(
        &self,
        f_in: &[u8],
        initial_a: &[usize],
        deadline: Deadline,
        want_lasso: bool,
    ) -> Result<Outcome> {
        let mut stats = AntichainStats::default();
        let mut ticker = Ticker::new(deadline);
        let mut arena: Vec<Node> = Vec::new();
        let mut member: Vec<bool> = Vec::new();
        let full = if self.n == 64 { u64::MAX } else { (1u64 << self.n) - 1 };

        let mut y = Antichain::default();
        let phases: &[u8] = if self.counter { &[0, 1] } else { &[0] };
        for a in 0..self.a.num_states() {
            for &c in phases {
                for o in [0u64, full] {
                    arena.push(Node {
                        a: a as u32,
                        c,
                        f: vec![0u8; self.n].into_boxed_slice(),
                        o,
                        step: None,
                    });
                    member.push(false);
                    let id = arena.len() - 1;
                    y.insert(&arena, id, &mut member);
                }
            }
        }

        let initial_covered = |ac: &Antichain, arena: &[Node]| {
            initial_a
                .iter()
                .any(|&a| ac.find_below(arena, a as u32, 0, f_in, 0).is_some())
        };

        let mut buf: Vec<Node> = Vec::new();
        loop {
            stats.iterations += 1;
            deadline.check()?;
            let mut x = Antichain::default();
            let mut frontier = Vec::new();
            for t in y.ids() {
                buf.clear();
                self.pre(&arena, t, true, &mut buf, &mut stats.max_pre_width);
                for node in buf.drain(..) {
                    ticker.tick()?;
                    if !self.in_f(node.c, node.o) {
                        continue;
                    }
                    arena.push(node);
                    member.push(false);
                    let id = arena.len() - 1;
                    if x.insert(&arena, id, &mut member) {
                        frontier.push(id);
                    }
                }
            }
            while !frontier.is_empty() {
                let mut next = Vec::new();
                for t in frontier {
                    if !member[t] {
                        continue;
                    }
                    buf.clear();
                    self.pre(&arena, t, false, &mut buf, &mut stats.max_pre_width);
                    for node in buf.drain(..) {
                        ticker.tick()?;
                        arena.push(node);
                        member.push(false);
                        let id = arena.len() - 1;
                        if x.insert(&arena, id, &mut member) {
                            next.push(id);
                        }
                    }
                }
                stats.max_antichain = stats.max_antichain.max(x.len);
                frontier = next;
            }
            stats.max_antichain = stats.max_antichain.max(x.len);
            if !initial_covered(&x, &arena) {
                stats.elements = arena.len();
                return Ok(Outcome {
                    nonempty: false,
                    lasso: None,
                    stats,
                });
            }
            let converged = x.covers_all(&arena, &y);
            y = x;
            if converged {
                break;
            }
        }
        stats.elements = arena.len();
        let lasso = if want_lasso {
            Some(self.extract_lasso(&arena, &y, f_in, initial_a))
        } else {
            None
        };
        Ok(Outcome {
            nonempty: true,
            lasso,
            stats,
        })
    }

    /// Replays provenance from a concrete initial state, one round per
    /// accepting visit, until a round start repeats.
    fn extract_lasso(&self, arena: &[Node], y: &Antichain, f_in: &[u8], initial_a: &[usize]) -> Lasso {
        type Concrete = (u32, u8, Box<[u8]>, u64);
        let start_a = initial_a
            .iter()
            .copied()
            .find(|&a| y.find_below(arena, a as u32, 0, f_in, 0).is_some())
            .expect("initial state is covered");
        let mut cur: Concrete = (start_a as u32, 0, f_in.to_vec().into_boxed_slice(), 0);
        let mut seen: HashMap<Concrete, usize> = HashMap::new();
        let mut words: Vec<Vec<SymbolId>> = Vec::new();
        loop {
            if let Some(&i) = seen.get(&cur) {
                let prefix = words[..i].concat();
                let cycle = words[i..].concat();
                return Lasso { prefix, cycle };
            }
            seen.insert(cur.clone(), words.len());
            let mut e = y
                .find_below(arena, cur.0, cur.1, &cur.2, cur.3)
                .expect("round start stays inside the fixpoint");
            let mut word = Vec::new();
            loop {
                let step = arena[e].step.as_ref().expect("fixpoint elements have provenance");
                let t = &arena[step.target];
                let c = self.next_counter(cur.0 as usize, cur.1, cur.3);
                cur = (t.a, c, step.f_next.clone(), t.o);
                word.push(step.sigma);
                if step.into_y {
                    break;
                }
                e = step.target;
            }
            words.push(word);
        }
    }
}
