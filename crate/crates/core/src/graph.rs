//! `{0,1}`-arc-labeled relations stored as one pair of bit rows per source node.
//!
//! The same type backs the graphs over automaton states used by the Ramsey
//! engine and the bipartite size-change graphs of the SCT engine.

use std::fmt;

use crate::error::{Error, Result};

/// Largest supported target-node count (one machine word per row).
pub const MAX_NODES: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    /// Path exists (non-increase for SCGs).
    Zero,
    /// Path visits an accepting state (strict decrease for SCGs).
    One,
}

impl Label {
    pub fn from_bit(one: bool) -> Self {
        if one {
            Label::One
        } else {
            Label::Zero
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::Zero => "0",
            Label::One => "1",
        })
    }
}

/// A set of arcs `<q, label, r>` with `q < rows`, `r < cols`.
///
/// `one[q]` is always a subset of `any[q]`, so no pair carries both labels.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ArcLabeledGraph {
    cols: usize,
    any: Vec<u64>,
    one: Vec<u64>,
}

#[inline]
fn bits(mut word: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if word == 0 {
            None
        } else {
            let i = word.trailing_zeros() as usize;
            word &= word - 1;
            Some(i)
        }
    })
}

impl ArcLabeledGraph {
    /// Empty graph. Fails when `cols` exceeds [`MAX_NODES`].
    pub fn new(rows: usize, cols: usize) -> Result<Self> {
        if cols > MAX_NODES {
            return Err(Error::TooLarge {
                what: "graph node set",
                size: cols,
                limit: MAX_NODES,
            });
        }
        Ok(ArcLabeledGraph {
            cols,
            any: vec![0; rows],
            one: vec![0; rows],
        })
    }

    pub fn from_arcs(
        rows: usize,
        cols: usize,
        arcs: impl IntoIterator<Item = (usize, Label, usize)>,
    ) -> Result<Self> {
        let mut g = Self::new(rows, cols)?;
        for (q, l, r) in arcs {
            if q >= rows || r >= cols {
                return Err(Error::Malformed(format!(
                    "arc ({q},{r}) outside a {rows}x{cols} graph"
                )));
            }
            if g.arc(q, r).is_some_and(|old| old != l) {
                return Err(Error::Malformed(format!(
                    "arc ({q},{r}) carries both labels"
                )));
            }
            g.set_arc(q, l, r);
        }
        Ok(g)
    }

    pub fn rows(&self) -> usize {
        self.any.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Sets the arc between `q` and `r` to exactly `label`.
    pub fn set_arc(&mut self, q: usize, label: Label, r: usize) {
        let b = 1u64 << r;
        self.any[q] |= b;
        match label {
            Label::One => self.one[q] |= b,
            Label::Zero => self.one[q] &= !b,
        }
    }

    /// Adds an arc, keeping the stronger label if one is already present.
    pub fn join_arc(&mut self, q: usize, label: Label, r: usize) {
        let b = 1u64 << r;
        self.any[q] |= b;
        if label == Label::One {
            self.one[q] |= b;
        }
    }

    pub fn remove_arc(&mut self, q: usize, r: usize) {
        let b = !(1u64 << r);
        self.any[q] &= b;
        self.one[q] &= b;
    }

    pub fn arc(&self, q: usize, r: usize) -> Option<Label> {
        let b = 1u64 << r;
        if self.any[q] & b == 0 {
            None
        } else {
            Some(Label::from_bit(self.one[q] & b != 0))
        }
    }

    pub fn arcs(&self) -> impl Iterator<Item = (usize, Label, usize)> + '_ {
        (0..self.rows()).flat_map(move |q| {
            bits(self.any[q]).map(move |r| (q, Label::from_bit(self.one[q] >> r & 1 == 1), r))
        })
    }

    pub fn arc_count(&self) -> usize {
        self.any.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.any.iter().all(|&w| w == 0)
    }

    pub(crate) fn row_any(&self, q: usize) -> u64 {
        self.any[q]
    }

    /// Composition `self ; other`: a 1 anywhere on a connecting path wins.
    ///
    /// Panics if `self.cols() != other.rows()`.
    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows(), "graph composition shape mismatch");
        let mut any = vec![0u64; self.rows()];
        let mut one = vec![0u64; self.rows()];
        for q in 0..self.rows() {
            let (ga, go) = (self.any[q], self.one[q]);
            let (mut a, mut o) = (0u64, 0u64);
            for s in bits(ga) {
                a |= other.any[s];
                o |= other.one[s];
                if go >> s & 1 == 1 {
                    o |= other.any[s];
                }
            }
            any[q] = a;
            one[q] = o;
        }
        ArcLabeledGraph {
            cols: other.cols,
            any,
            one,
        }
    }

    /// `self ⪯ other`: every arc of `self` is present in `other` with an
    /// equal or larger label.
    pub fn subsumed_by(&self, other: &Self) -> bool {
        self.rows() == other.rows()
            && self.cols == other.cols
            && self
                .any
                .iter()
                .zip(&other.any)
                .all(|(a, b)| a & !b == 0)
            && self
                .one
                .iter()
                .zip(&other.one)
                .all(|(a, b)| a & !b == 0)
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols
    }

    pub fn is_idempotent(&self) -> bool {
        self.is_square() && self.compose(self) == *self
    }

    /// Whether some node has a 1-labeled self-arc.
    pub fn has_one_self_loop(&self) -> bool {
        (0..self.rows().min(self.cols)).any(|q| self.one[q] >> q & 1 == 1)
    }

    /// Reflexive-transitive reachability rows of a square graph.
    fn reach_star(&self) -> Vec<u64> {
        let n = self.rows();
        let mut reach: Vec<u64> = (0..n).map(|q| self.any[q] | (1u64 << q)).collect();
        for k in 0..n {
            let rk = reach[k];
            for row in reach.iter_mut() {
                if *row >> k & 1 == 1 {
                    *row |= rk;
                }
            }
        }
        reach
    }

    /// True when no 1-labeled arc lies inside a strongly connected component
    /// of the arc digraph, i.e. no iterate of this graph can ever produce a
    /// 1-labeled self-arc. Requires a square graph.
    pub fn scc_counterexample(&self) -> bool {
        assert!(self.is_square(), "SCC test needs a square graph");
        let reach = self.reach_star();
        for q in 0..self.rows() {
            for r in bits(self.one[q]) {
                if reach[r] >> q & 1 == 1 {
                    return false;
                }
            }
        }
        true
    }

    /// Largest in-degree over target nodes.
    pub fn max_in_degree(&self) -> usize {
        (0..self.cols)
            .map(|r| self.any.iter().filter(|&&w| w >> r & 1 == 1).count())
            .max()
            .unwrap_or(0)
    }
}

impl fmt::Debug for ArcLabeledGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (q, l, r)) in self.arcs().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "<{q},{l},{r}>")?;
        }
        write!(f, "}}")
    }
}
