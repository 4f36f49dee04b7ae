//! Explicit construction of the reachable part of the rank-based complement.

use std::collections::{HashMap, VecDeque};

use crate::automaton::{find_lasso, BuchiAutomaton, Lasso, StateId, SymbolId};
use crate::deadline::{Deadline, Ticker};
use crate::error::Result;

use super::ranking::{check_rank, check_states, KvState, LevelRanking, BOT};

/// Successors of `<f, o>` on `sigma`. States without a ranked predecessor
/// become `⊥`; every other state independently takes any rank up to the
/// least rank of its ranked predecessors (even ranks only when accepting).
pub(crate) fn for_each_kv_successor(
    b: &BuchiAutomaton,
    f: &[u8],
    o: u64,
    sigma: usize,
    mut visit: impl FnMut(&[u8], u64) -> Result<()>,
) -> Result<()> {
    let n = b.num_states();
    let mut cap = vec![BOT; n];
    let mut img_o = 0u64;
    for (p, &fp) in f.iter().enumerate().take(n) {
        if fp == BOT {
            continue;
        }
        for q in b.successors(p, sigma).ones() {
            cap[q] = cap[q].min(fp);
            if o >> p & 1 == 1 {
                img_o |= 1 << q;
            }
        }
    }
    // odometer over g(q) in {cap, cap-1, ..., 0}, skipping odd ranks on
    // accepting states
    let step = |q: usize, v: u8| -> Option<u8> {
        let mut v = v.checked_sub(1)?;
        if b.is_accepting(q) && v % 2 == 1 {
            v = v.checked_sub(1)?;
        }
        Some(v)
    };
    let top = |q: usize| -> u8 {
        if cap[q] != BOT && b.is_accepting(q) && cap[q] % 2 == 1 {
            cap[q] - 1
        } else {
            cap[q]
        }
    };
    let mut g: Vec<u8> = (0..n).map(top).collect();
    loop {
        let mut even = 0u64;
        let mut odd = 0u64;
        for (q, &v) in g.iter().enumerate() {
            if v != BOT {
                if v % 2 == 0 {
                    even |= 1 << q;
                } else {
                    odd |= 1 << q;
                }
            }
        }
        let o2 = if o == 0 { even } else { img_o & !odd };
        visit(&g, o2)?;
        let mut k = 0;
        loop {
            if k == n {
                return Ok(());
            }
            if g[k] != BOT {
                if let Some(v) = step(k, g[k]) {
                    g[k] = v;
                    break;
                }
                g[k] = top(k);
            }
            k += 1;
        }
    }
}

/// Rank-based complement with ranks bounded by `max_rank`.
pub fn kv_complement(b: &BuchiAutomaton, max_rank: i64) -> Result<BuchiAutomaton> {
    Ok(kv_complement_with(b, max_rank, Deadline::NONE)?.0)
}

/// As [`kv_complement`], also returning the complement's states.
pub fn kv_complement_with(
    b: &BuchiAutomaton,
    max_rank: i64,
    deadline: Deadline,
) -> Result<(BuchiAutomaton, Vec<KvState>)> {
    let r = check_rank(max_rank)?;
    check_states(b)?;
    let n = b.num_states();
    let mut out = BuchiAutomaton::new(b.alphabet())?;
    let mut index: HashMap<(Vec<u8>, u64), StateId> = HashMap::new();
    let mut states: Vec<KvState> = Vec::new();
    let mut queue = VecDeque::new();
    let mut ticker = Ticker::new(deadline);

    let f_in: Vec<u8> = (0..n)
        .map(|q| if b.is_initial(q) { r } else { BOT })
        .collect();
    let mut intern = |out: &mut BuchiAutomaton,
                      states: &mut Vec<KvState>,
                      queue: &mut VecDeque<StateId>,
                      f: Vec<u8>,
                      o: u64|
     -> StateId {
        let key = (f, o);
        if let Some(&id) = index.get(&key) {
            return id;
        }
        let st = KvState {
            ranking: LevelRanking(key.0.clone()),
            obligation: o,
        };
        let id = out.add_state(st.name()).expect("ranking names are unique");
        if o == 0 {
            out.set_accepting(id);
        }
        states.push(st);
        index.insert(key, id);
        queue.push_back(id);
        id
    };
    let init = intern(&mut out, &mut states, &mut queue, f_in, 0);
    out.set_initial(init);
    while let Some(id) = queue.pop_front() {
        let (f, o) = (states[id].ranking.0.clone(), states[id].obligation);
        for s in 0..b.num_symbols() {
            for_each_kv_successor(b, &f, o, s, |g, o2| {
                ticker.tick()?;
                let dst = intern(&mut out, &mut states, &mut queue, g.to_vec(), o2);
                out.add_transition(id, s, dst);
                Ok(())
            })?;
        }
    }
    Ok((out, states))
}

/// Reachable part of `a × KV(b)` with a two-phase counter, kept as
/// adjacency lists. Used by the rank engines when subsumption is off.
pub(crate) struct ExplicitProduct {
    adj: Vec<Vec<(SymbolId, u32)>>,
    accepting: Vec<bool>,
    roots: Vec<usize>,
}

trait RankKey: Clone + Eq + std::hash::Hash {
    fn encode(f: &[u8]) -> Self;
    fn decode(&self, n: usize) -> Vec<u8>;
}

impl RankKey for u128 {
    fn encode(f: &[u8]) -> Self {
        f.iter().rev().fold(0u128, |k, &v| k << 8 | v as u128)
    }

    fn decode(&self, n: usize) -> Vec<u8> {
        (0..n).map(|q| (self >> (8 * q)) as u8).collect()
    }
}

impl RankKey for Box<[u8]> {
    fn encode(f: &[u8]) -> Self {
        f.into()
    }

    fn decode(&self, _: usize) -> Vec<u8> {
        self.to_vec()
    }
}

impl ExplicitProduct {
    pub(crate) fn build(
        a: &BuchiAutomaton,
        b: &BuchiAutomaton,
        max_rank: u8,
        deadline: Deadline,
    ) -> Result<Self> {
        check_states(b)?;
        if b.num_states() <= 16 {
            Self::build_keyed::<u128>(a, b, max_rank, deadline)
        } else {
            Self::build_keyed::<Box<[u8]>>(a, b, max_rank, deadline)
        }
    }

    fn build_keyed<K: RankKey>(
        a: &BuchiAutomaton,
        b: &BuchiAutomaton,
        max_rank: u8,
        deadline: Deadline,
    ) -> Result<Self> {
        let n = b.num_states();
        type Key<K> = (usize, K, u64, bool);
        let mut index: HashMap<Key<K>, u32> = HashMap::new();
        let mut keys: Vec<Key<K>> = Vec::new();
        let mut ticker = Ticker::new(deadline);
        let intern = |k: Key<K>, index: &mut HashMap<Key<K>, u32>, keys: &mut Vec<Key<K>>| {
            if let Some(&id) = index.get(&k) {
                return id;
            }
            let id = keys.len() as u32;
            keys.push(k.clone());
            index.insert(k, id);
            id
        };
        let f_in: Vec<u8> = (0..n)
            .map(|q| if b.is_initial(q) { max_rank } else { BOT })
            .collect();
        let mut roots = Vec::new();
        for p in a.initial().ones() {
            let k = (p, K::encode(&f_in), 0, false);
            roots.push(intern(k, &mut index, &mut keys) as usize);
        }
        let mut adj: Vec<Vec<(SymbolId, u32)>> = Vec::new();
        while adj.len() < keys.len() {
            let (p, fk, o, phase) = keys[adj.len()].clone();
            let f = fk.decode(n);
            let phase2 = if phase { o != 0 } else { a.is_accepting(p) };
            let mut out = Vec::new();
            for s in 0..b.num_symbols() {
                let succ_a = a.successors(p, s);
                if succ_a.is_clear() {
                    continue;
                }
                for_each_kv_successor(b, &f, o, s, |g, o2| {
                    ticker.tick()?;
                    let gk = K::encode(g);
                    for p2 in succ_a.ones() {
                        let id = intern((p2, gk.clone(), o2, phase2), &mut index, &mut keys);
                        out.push((s, id));
                    }
                    Ok(())
                })?;
            }
            out.sort_unstable();
            out.dedup();
            adj.push(out);
        }
        let accepting = keys.iter().map(|(_, _, o, phase)| *phase && *o == 0).collect();
        Ok(ExplicitProduct {
            adj,
            accepting,
            roots,
        })
    }

    pub(crate) fn len(&self) -> usize {
        self.adj.len()
    }

    pub(crate) fn find_lasso(&self) -> Option<Lasso> {
        find_lasso(
            self.adj.len(),
            &self.roots,
            |v| self.adj[v].iter().map(|&(s, w)| (s, w as usize)).collect(),
            |v| self.accepting[v],
        )
    }
}
