//! Ramsey-based universality and containment: supergraphs, the double-graph
//! search, the single-graph search and `⪯`-subsumption.

use std::collections::HashSet;

use crate::automaton::{BuchiAutomaton, Lasso, StateId, SymbolId};
use crate::closure::{Closure, ClosureStats, Element, Outcome};
use crate::deadline::Deadline;
use crate::error::{Error, Result};
use crate::graph::{ArcLabeledGraph, Label, MAX_NODES};

/// An arc `<q, r>` of `A` paired with a graph over the states of `B`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Supergraph {
    pub arc: (StateId, StateId),
    pub graph: ArcLabeledGraph,
    pub witness: Option<Vec<SymbolId>>,
}

impl Supergraph {
    fn from_element(e: &Element) -> Self {
        Supergraph {
            arc: (e.src, e.tgt),
            graph: e.graph.clone(),
            witness: e.witness.clone(),
        }
    }

    fn to_element(&self) -> Element {
        Element {
            src: self.arc.0,
            tgt: self.arc.1,
            graph: self.graph.clone(),
            witness: self.witness.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ContainmentVerdict {
    Contained,
    NotContained {
        /// `(ĝ, ĥ)` with `L(ĝ)·L(ĥ)^ω` outside `L(B)`; the single-graph
        /// search reports its graph twice.
        pair: Option<(Supergraph, Supergraph)>,
        lasso: Option<Lasso>,
    },
}

impl ContainmentVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, ContainmentVerdict::Contained)
    }

    pub fn lasso(&self) -> Option<&Lasso> {
        match self {
            ContainmentVerdict::Contained => None,
            ContainmentVerdict::NotContained { lasso, .. } => lasso.as_ref(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RamseyOptions {
    /// Keep only `⪯`-minimal graphs and use the SCC counterexample test.
    /// Only the single-graph search honours this.
    pub subsumption: bool,
    /// Caller vouches that `L(B)` is strongly suffix closed w.r.t. `L(A)`.
    pub preconditions_asserted: bool,
    pub witnesses: bool,
    pub deadline: Deadline,
}

impl Default for RamseyOptions {
    fn default() -> Self {
        RamseyOptions {
            subsumption: false,
            preconditions_asserted: false,
            witnesses: true,
            deadline: Deadline::NONE,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RamseyReport {
    pub verdict: ContainmentVerdict,
    pub stats: ClosureStats,
    pub warnings: Vec<String>,
}

fn check_size(b: &BuchiAutomaton) -> Result<()> {
    if b.num_states() > MAX_NODES {
        return Err(Error::TooLarge {
            what: "automaton B",
            size: b.num_states(),
            limit: MAX_NODES,
        });
    }
    Ok(())
}

/// The graph of the one-letter word `σ`: `<q',1,r'>` when either endpoint
/// accepts, `<q',0,r'>` otherwise.
pub fn single_letter_graph(b: &BuchiAutomaton, sigma: SymbolId) -> Result<ArcLabeledGraph> {
    check_size(b)?;
    if sigma >= b.num_symbols() {
        return Err(Error::UnknownSymbol(format!("#{sigma}")));
    }
    let n = b.num_states();
    let mut g = ArcLabeledGraph::new(n, n)?;
    for q in 0..n {
        for r in b.successors(q, sigma).ones() {
            let one = b.is_accepting(q) || b.is_accepting(r);
            g.set_arc(q, Label::from_bit(one), r);
        }
    }
    Ok(g)
}

/// The unique graph whose language contains `w`.
pub fn graph_of_word(b: &BuchiAutomaton, w: &[SymbolId]) -> Result<ArcLabeledGraph> {
    let (&first, rest) = w.split_first().ok_or(Error::EmptyWord)?;
    let mut g = single_letter_graph(b, first)?;
    for &a in rest {
        g = g.compose(&single_letter_graph(b, a)?);
    }
    Ok(g)
}

pub fn graph_compose(g: &ArcLabeledGraph, h: &ArcLabeledGraph) -> Result<ArcLabeledGraph> {
    if g.cols() != h.rows() {
        return Err(Error::Precondition(
            "graphs range over different node sets".into(),
        ));
    }
    Ok(g.compose(h))
}

pub fn supergraph_compose(g: &Supergraph, h: &Supergraph) -> Result<Supergraph> {
    if g.arc.1 != h.arc.0 {
        return Err(Error::Precondition(format!(
            "arc <{},{}> does not continue <{},{}>",
            h.arc.0, h.arc.1, g.arc.0, g.arc.1
        )));
    }
    Ok(Supergraph::from_element(
        &g.to_element().compose(&h.to_element()),
    ))
}

/// `g ⪯ h`.
pub fn subsumes(g: &ArcLabeledGraph, h: &ArcLabeledGraph) -> bool {
    g.subsumed_by(h)
}

/// True when no 1-labeled arc of `g` lies inside one of its SCCs.
pub fn scc_counterexample_test(g: &ArcLabeledGraph) -> bool {
    g.scc_counterexample()
}

fn initial_elements(
    a: &BuchiAutomaton,
    b: &BuchiAutomaton,
    witnesses: bool,
) -> Result<Vec<Element>> {
    a.same_alphabet(b)?;
    check_size(b)?;
    let letters: Vec<ArcLabeledGraph> = (0..b.num_symbols())
        .map(|s| single_letter_graph(b, s))
        .collect::<Result<_>>()?;
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (p, s, q) in a.transitions() {
        if seen.insert((p, q, letters[s].clone())) {
            out.push(Element {
                src: p,
                tgt: q,
                graph: letters[s].clone(),
                witness: witnesses.then(|| vec![s]),
            });
        }
    }
    Ok(out)
}

/// One supergraph per `A`-edge and letter, duplicates removed; each carries
/// its letter as witness.
pub fn initial_supergraphs(a: &BuchiAutomaton, b: &BuchiAutomaton) -> Result<Vec<Supergraph>> {
    Ok(initial_elements(a, b, true)?
        .iter()
        .map(Supergraph::from_element)
        .collect())
}

/// `<q',a,r'> ∈ g` with `q'` initial and `<r',1,r'> ∈ h`.
fn has_satisfying_arcs(b: &BuchiAutomaton, g: &ArcLabeledGraph, h: &ArcLabeledGraph) -> bool {
    let mut loops = 0u64;
    for r in 0..h.rows() {
        if h.arc(r, r) == Some(Label::One) {
            loops |= 1 << r;
        }
    }
    b.initial().ones().any(|q| g.row_any(q) & loops != 0)
}

fn not_contained(g: &Element, h: &Element) -> ContainmentVerdict {
    let lasso = match (&g.witness, &h.witness) {
        (Some(u), Some(v)) => Some(Lasso {
            prefix: u.clone(),
            cycle: v.clone(),
        }),
        _ => None,
    };
    ContainmentVerdict::NotContained {
        pair: Some((Supergraph::from_element(g), Supergraph::from_element(h))),
        lasso,
    }
}

fn double_graph_search(
    a: &BuchiAutomaton,
    b: &BuchiAutomaton,
    initial: Vec<Element>,
    opts: &RamseyOptions,
) -> Result<RamseyReport> {
    let proper_counterexample = |c: &Closure, gi: usize, hi: usize| {
        let (g, h) = (c.get(gi), c.get(hi));
        g.graph.compose(&h.graph) == g.graph
            && h.graph.compose(&h.graph) == h.graph
            && !has_satisfying_arcs(b, &g.graph, &h.graph)
    };
    let check = |c: &Closure, x: usize| -> Option<(usize, usize)> {
        let e = c.get(x);
        if a.is_initial(e.src) && a.is_accepting(e.tgt) {
            for h in c.live_between(e.tgt, e.tgt) {
                if proper_counterexample(c, x, h) {
                    return Some((x, h));
                }
            }
        }
        if e.src == e.tgt && a.is_accepting(e.src) {
            for g in c.live_into(e.src) {
                if a.is_initial(c.get(g).src) && proper_counterexample(c, g, x) {
                    return Some((g, x));
                }
            }
        }
        None
    };
    let (outcome, stats, closure) = Closure::run(initial, false, opts.deadline, check)?;
    let verdict = match outcome {
        Outcome::Closed => ContainmentVerdict::Contained,
        Outcome::Hit((g, h)) => not_contained(closure.get(g), closure.get(h)),
    };
    Ok(RamseyReport {
        verdict,
        stats,
        warnings: Vec::new(),
    })
}

/// Double-graph search for `L(A) ⊆ L(B)`.
pub fn dgs_containment(a: &BuchiAutomaton, b: &BuchiAutomaton) -> Result<ContainmentVerdict> {
    Ok(dgs_containment_with(a, b, &RamseyOptions::default())?.verdict)
}

pub fn dgs_containment_with(
    a: &BuchiAutomaton,
    b: &BuchiAutomaton,
    opts: &RamseyOptions,
) -> Result<RamseyReport> {
    let initial = initial_elements(a, b, opts.witnesses)?;
    double_graph_search(a, b, initial, opts)
}

/// Universality of `B` by the double-graph search against the one-state
/// universal automaton, run directly on graphs.
pub fn ramsey_universality(b: &BuchiAutomaton) -> Result<ContainmentVerdict> {
    Ok(ramsey_universality_with(b, &RamseyOptions::default())?.verdict)
}

pub fn ramsey_universality_with(
    b: &BuchiAutomaton,
    opts: &RamseyOptions,
) -> Result<RamseyReport> {
    let u = BuchiAutomaton::universal(b.alphabet())?;
    let mut seen = HashSet::new();
    let mut initial = Vec::new();
    for s in 0..b.num_symbols() {
        let g = single_letter_graph(b, s)?;
        if seen.insert(g.clone()) {
            initial.push(Element {
                src: 0,
                tgt: 0,
                graph: g,
                witness: opts.witnesses.then(|| vec![s]),
            });
        }
    }
    double_graph_search(&u, b, initial, opts)
}

/// Single-graph search for `L(A) ⊆ L(B)`, valid when every state of `A` is
/// initial, every state of `B` is reachable and `L(B)` is strongly suffix
/// closed with respect to `L(A)`.
pub fn sgs_containment(
    a: &BuchiAutomaton,
    b: &BuchiAutomaton,
    opts: &RamseyOptions,
) -> Result<ContainmentVerdict> {
    Ok(sgs_containment_with(a, b, opts)?.verdict)
}

pub fn sgs_containment_with(
    a: &BuchiAutomaton,
    b: &BuchiAutomaton,
    opts: &RamseyOptions,
) -> Result<RamseyReport> {
    a.same_alphabet(b)?;
    if !opts.preconditions_asserted {
        return Err(Error::Precondition(
            "single-graph search needs L(B) strongly suffix closed w.r.t. L(A); assert it explicitly".into(),
        ));
    }
    if a.initial().count_ones(..) != a.num_states() {
        return Err(Error::Precondition(
            "single-graph search needs every state of A to be initial".into(),
        ));
    }
    let mut warnings = Vec::new();
    let reach = b.reachable_states();
    let pruned;
    let b = if reach.count_ones(..) < b.num_states() {
        let dropped: Vec<&str> = (0..b.num_states())
            .filter(|&q| !reach.contains(q))
            .map(|q| b.state_name(q))
            .collect();
        warnings.push(format!(
            "pruned unreachable states of B: {}",
            dropped.join(" ")
        ));
        pruned = b.restrict_to(&reach);
        &pruned
    } else {
        b
    };
    let initial = initial_elements(a, b, opts.witnesses)?;
    let subsumption = opts.subsumption;
    let check = |c: &Closure, x: usize| -> Option<usize> {
        let e = c.get(x);
        if e.src != e.tgt || !a.is_accepting(e.src) {
            return None;
        }
        let hit = if subsumption {
            e.graph.scc_counterexample()
        } else {
            e.graph.is_idempotent() && !e.graph.has_one_self_loop()
        };
        hit.then_some(x)
    };
    let (outcome, stats, closure) = Closure::run(initial, subsumption, opts.deadline, check)?;
    let verdict = match outcome {
        Outcome::Closed => ContainmentVerdict::Contained,
        Outcome::Hit(k) => {
            let e = closure.get(k);
            ContainmentVerdict::NotContained {
                pair: Some((Supergraph::from_element(e), Supergraph::from_element(e))),
                lasso: e.witness.as_ref().map(|v| Lasso {
                    prefix: Vec::new(),
                    cycle: v.clone(),
                }),
            }
        }
    };
    Ok(RamseyReport {
        verdict,
        stats,
        warnings,
    })
}

/// All live closure elements, for inspection in tests and diagnostics.
pub fn supergraph_closure(
    a: &BuchiAutomaton,
    b: &BuchiAutomaton,
    subsumption: bool,
) -> Result<Vec<Supergraph>> {
    let initial = initial_elements(a, b, true)?;
    let (_, _, closure) =
        Closure::run(initial, subsumption, Deadline::NONE, |_, _| None::<()>)?;
    Ok(closure.live_elements().map(Supergraph::from_element).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::accepts_lasso;

    fn one_state(acc: bool, loops: &[usize]) -> BuchiAutomaton {
        let mut b = BuchiAutomaton::new(&["a", "b"]).unwrap();
        let q = b.add_state("q").unwrap();
        b.set_initial(q);
        if acc {
            b.set_accepting(q);
        }
        for &s in loops {
            b.add_transition(q, s, q);
        }
        b
    }

    #[test]
    fn single_letter_labels() {
        let acc = one_state(true, &[0]);
        assert_eq!(single_letter_graph(&acc, 0).unwrap().arc(0, 0), Some(Label::One));
        let rej = one_state(false, &[0]);
        assert_eq!(single_letter_graph(&rej, 0).unwrap().arc(0, 0), Some(Label::Zero));
        assert!(graph_of_word(&rej, &[]).is_err());
    }

    #[test]
    fn dgs_basics() {
        let a = one_state(true, &[0]);
        let b = one_state(true, &[1]);
        assert!(dgs_containment(&a, &a).unwrap().holds());
        let v = dgs_containment(&a, &b).unwrap();
        let w = v.lasso().unwrap();
        assert_eq!(w.cycle, vec![0]);
        assert!(accepts_lasso(&a, w).unwrap());
        assert!(!accepts_lasso(&b, w).unwrap());
    }

    #[test]
    fn universality_basics() {
        assert!(ramsey_universality(&one_state(true, &[0, 1])).unwrap().holds());
        let v = ramsey_universality(&one_state(true, &[0])).unwrap();
        assert!(!v.holds());
    }

    #[test]
    fn sgs_refuses_without_assertion() {
        let u = one_state(true, &[0, 1]);
        assert!(matches!(
            sgs_containment(&u, &u, &RamseyOptions::default()),
            Err(Error::Precondition(_))
        ));
        let opts = RamseyOptions {
            preconditions_asserted: true,
            ..Default::default()
        };
        assert!(sgs_containment(&u, &u, &opts).unwrap().holds());
    }

    #[test]
    fn supergraph_arc_mismatch() {
        let b = one_state(true, &[0]);
        let g = Supergraph {
            arc: (0, 1),
            graph: single_letter_graph(&b, 0).unwrap(),
            witness: None,
        };
        assert!(supergraph_compose(&g, &g).is_err());
        let h = Supergraph { arc: (1, 2), ..g.clone() };
        assert_eq!(supergraph_compose(&g, &h).unwrap().arc, (0, 2));
    }
}
