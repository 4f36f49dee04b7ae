//! Worklist closure of endpoint-labeled graphs under composition, with
//! optional `⪯`-subsumption and an insertion hook for early exit.
//!
//! Supergraphs (endpoints are an arc of `A`), plain graphs for universality
//! (a single dummy endpoint) and size-change graphs (endpoints are functions)
//! all share this engine.

use std::collections::HashMap;

use crate::automaton::SymbolId;
use crate::deadline::{Deadline, Ticker};
use crate::error::Result;
use crate::graph::ArcLabeledGraph;

/// Witness words longer than this are dropped.
pub const WITNESS_CAP: usize = 10_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Element {
    pub src: usize,
    pub tgt: usize,
    pub graph: ArcLabeledGraph,
    /// A word described by this element, when tracked.
    pub witness: Option<Vec<SymbolId>>,
}

impl Element {
    pub fn compose(&self, other: &Element) -> Element {
        debug_assert_eq!(self.tgt, other.src);
        let witness = match (&self.witness, &other.witness) {
            (Some(u), Some(v)) if u.len() + v.len() <= WITNESS_CAP => {
                let mut w = Vec::with_capacity(u.len() + v.len());
                w.extend_from_slice(u);
                w.extend_from_slice(v);
                Some(w)
            }
            _ => None,
        };
        Element {
            src: self.src,
            tgt: other.tgt,
            graph: self.graph.compose(&other.graph),
            witness,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ClosureStats {
    /// Elements ever stored.
    pub inserted: usize,
    pub compositions: usize,
    /// New elements dropped as duplicates or because a stored element
    /// subsumes them.
    pub discarded: usize,
    /// Stored elements removed because a new element subsumes them.
    pub evicted: usize,
    /// Live elements when the search stopped.
    pub final_size: usize,
}

pub(crate) struct Closure {
    elems: Vec<Element>,
    alive: Vec<bool>,
    buckets: HashMap<(usize, usize), Vec<usize>>,
    by_src: HashMap<usize, Vec<usize>>,
    by_tgt: HashMap<usize, Vec<usize>>,
    seen: HashMap<(usize, usize, ArcLabeledGraph), usize>,
    subsumption: bool,
    pub(crate) stats: ClosureStats,
}

pub(crate) enum Outcome<H> {
    Closed,
    Hit(H),
}

impl Closure {
    fn new(subsumption: bool) -> Self {
        Closure {
            elems: Vec::new(),
            alive: Vec::new(),
            buckets: HashMap::new(),
            by_src: HashMap::new(),
            by_tgt: HashMap::new(),
            seen: HashMap::new(),
            subsumption,
            stats: ClosureStats::default(),
        }
    }

    pub(crate) fn get(&self, i: usize) -> &Element {
        &self.elems[i]
    }

    /// Live elements with the given endpoints.
    pub(crate) fn live_between(&self, src: usize, tgt: usize) -> Vec<usize> {
        self.live(self.buckets.get(&(src, tgt)))
    }

    pub(crate) fn live_into(&self, tgt: usize) -> Vec<usize> {
        self.live(self.by_tgt.get(&tgt))
    }

    fn live_from(&self, src: usize) -> Vec<usize> {
        self.live(self.by_src.get(&src))
    }

    fn live(&self, list: Option<&Vec<usize>>) -> Vec<usize> {
        list.map(|v| v.iter().copied().filter(|&i| self.alive[i]).collect())
            .unwrap_or_default()
    }

    pub(crate) fn live_elements(&self) -> impl Iterator<Item = &Element> {
        self.elems
            .iter()
            .zip(&self.alive)
            .filter(|(_, &a)| a)
            .map(|(e, _)| e)
    }

    /// Stores `e` unless it is redundant; returns its index when stored.
    fn insert(&mut self, e: Element) -> Option<usize> {
        let key = (e.src, e.tgt);
        if self.subsumption {
            let bucket = self.buckets.get(&key).cloned().unwrap_or_default();
            if bucket
                .iter()
                .any(|&i| self.alive[i] && self.elems[i].graph.subsumed_by(&e.graph))
            {
                self.stats.discarded += 1;
                return None;
            }
            for &i in &bucket {
                if self.alive[i] && e.graph.subsumed_by(&self.elems[i].graph) {
                    self.alive[i] = false;
                    self.stats.evicted += 1;
                }
            }
        } else {
            let k = (e.src, e.tgt, e.graph.clone());
            if self.seen.contains_key(&k) {
                self.stats.discarded += 1;
                return None;
            }
            self.seen.insert(k, self.elems.len());
        }
        let i = self.elems.len();
        self.buckets.entry(key).or_default().push(i);
        self.by_src.entry(e.src).or_default().push(i);
        self.by_tgt.entry(e.tgt).or_default().push(i);
        self.elems.push(e);
        self.alive.push(true);
        self.stats.inserted += 1;
        Some(i)
    }

    /// Runs the closure of `initial`, calling `check` on every stored
    /// element. Stops at the first hit.
    pub(crate) fn run<H>(
        initial: Vec<Element>,
        subsumption: bool,
        deadline: Deadline,
        mut check: impl FnMut(&Closure, usize) -> Option<H>,
    ) -> Result<(Outcome<H>, ClosureStats, Closure)> {
        let mut c = Closure::new(subsumption);
        let mut ticker = Ticker::new(deadline);
        let mut work = Vec::new();
        for e in initial {
            if let Some(i) = c.insert(e) {
                work.push(i);
                if let Some(h) = check(&c, i) {
                    c.stats.final_size = c.alive.iter().filter(|&&a| a).count();
                    let stats = c.stats;
                    return Ok((Outcome::Hit(h), stats, c));
                }
            }
        }
        deadline.check()?;
        // FIFO order keeps witnesses short
        let mut head = 0;
        while head < work.len() {
            let x = work[head];
            head += 1;
            if !c.alive[x] {
                continue;
            }
            let (src, tgt) = (c.elems[x].src, c.elems[x].tgt);
            let mut products = Vec::new();
            for y in c.live_from(tgt) {
                products.push((x, y));
            }
            for y in c.live_into(src) {
                if y != x || src != tgt {
                    products.push((y, x));
                }
            }
            for (l, r) in products {
                ticker.tick()?;
                if !c.alive[l] || !c.alive[r] {
                    continue;
                }
                c.stats.compositions += 1;
                let e = c.elems[l].compose(&c.elems[r]);
                if let Some(i) = c.insert(e) {
                    work.push(i);
                    if let Some(h) = check(&c, i) {
                        c.stats.final_size = c.alive.iter().filter(|&&a| a).count();
                        let stats = c.stats;
                        return Ok((Outcome::Hit(h), stats, c));
                    }
                }
            }
        }
        c.stats.final_size = c.alive.iter().filter(|&&a| a).count();
        let stats = c.stats;
        Ok((Outcome::Closed, stats, c))
    }
}
