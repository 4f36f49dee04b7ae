//! Size-change termination: problems, the LJB closure, the reductions to
//! Büchi containment and the supergraph-to-SCG correspondence.

use std::collections::HashMap;

use crate::automaton::{BuchiAutomaton, Lasso, SymbolId};
use crate::closure::{Closure, ClosureStats, Element, Outcome};
use crate::deadline::Deadline;
use crate::error::{Error, Result};
use crate::graph::{ArcLabeledGraph, Label, MAX_NODES};
use crate::ramsey::Supergraph;

pub type FunId = usize;
pub type CallId = usize;

/// A bipartite `{0,1}`-labeled graph from the parameters of `source` to
/// those of `target`. Label `1` is strict decrease, `0` non-increase.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SizeChangeGraph {
    pub source: FunId,
    pub target: FunId,
    pub graph: ArcLabeledGraph,
}

impl SizeChangeGraph {
    pub fn is_reverse_deterministic(&self) -> bool {
        self.graph.max_in_degree() <= 1
    }
}

/// `G;G'`.
pub fn scg_compose(g: &SizeChangeGraph, h: &SizeChangeGraph) -> Result<SizeChangeGraph> {
    if g.target != h.source || g.graph.cols() != h.graph.rows() {
        return Err(Error::Precondition(format!(
            "cannot compose a graph into function #{} with one out of #{}",
            g.target, h.source
        )));
    }
    Ok(SizeChangeGraph {
        source: g.source,
        target: h.target,
        graph: g.graph.compose(&h.graph),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Call {
    pub name: String,
    pub source: FunId,
    pub target: FunId,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SctProblem {
    functions: Vec<String>,
    params: Vec<Vec<String>>,
    calls: Vec<Call>,
    scgs: Vec<SizeChangeGraph>,
}

impl SctProblem {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_function<S: AsRef<str>>(&mut self, name: &str, params: &[S]) -> Result<FunId> {
        if self.functions.iter().any(|f| f == name) {
            return Err(Error::Duplicate(name.to_string()));
        }
        if params.len() > MAX_NODES {
            return Err(Error::TooLarge {
                what: "parameter list",
                size: params.len(),
                limit: MAX_NODES,
            });
        }
        let params: Vec<String> = params.iter().map(|p| p.as_ref().to_string()).collect();
        for (i, p) in params.iter().enumerate() {
            if params[..i].contains(p) {
                return Err(Error::Duplicate(format!("{name}.{p}")));
            }
        }
        self.functions.push(name.to_string());
        self.params.push(params);
        Ok(self.functions.len() - 1)
    }

    /// Adds call `name: source -> target` with arcs given as parameter
    /// positions.
    pub fn add_call(
        &mut self,
        name: &str,
        source: FunId,
        target: FunId,
        arcs: &[(usize, Label, usize)],
    ) -> Result<CallId> {
        if self.calls.iter().any(|c| c.name == name) {
            return Err(Error::Duplicate(name.to_string()));
        }
        if source >= self.functions.len() || target >= self.functions.len() {
            return Err(Error::Malformed(format!("call `{name}` names an unknown function")));
        }
        let mut g = ArcLabeledGraph::new(self.params[source].len(), self.params[target].len())?;
        for &(x, l, y) in arcs {
            if x >= g.rows() || y >= g.cols() {
                return Err(Error::Malformed(format!(
                    "call `{name}` has an arc outside the parameter lists"
                )));
            }
            match g.arc(x, y) {
                Some(old) if old != l => {
                    return Err(Error::Malformed(format!(
                        "call `{name}` gives {}.{} -> {}.{} both labels",
                        self.functions[source],
                        self.params[source][x],
                        self.functions[target],
                        self.params[target][y]
                    )))
                }
                _ => g.set_arc(x, l, y),
            }
        }
        self.calls.push(Call {
            name: name.to_string(),
            source,
            target,
        });
        self.scgs.push(SizeChangeGraph {
            source,
            target,
            graph: g,
        });
        Ok(self.calls.len() - 1)
    }

    pub fn functions(&self) -> &[String] {
        &self.functions
    }

    pub fn function_id(&self, name: &str) -> Option<FunId> {
        self.functions.iter().position(|f| f == name)
    }

    pub fn params(&self, f: FunId) -> &[String] {
        &self.params[f]
    }

    pub fn calls(&self) -> &[Call] {
        &self.calls
    }

    pub fn scg(&self, c: CallId) -> &SizeChangeGraph {
        &self.scgs[c]
    }

    pub fn scgs(&self) -> &[SizeChangeGraph] {
        &self.scgs
    }

    pub fn call_names(&self) -> Vec<String> {
        self.calls.iter().map(|c| c.name.clone()).collect()
    }

    pub fn max_arity(&self) -> usize {
        self.params.iter().map(Vec::len).max().unwrap_or(0)
    }

    fn total_params(&self) -> usize {
        self.params.iter().map(Vec::len).sum()
    }

    /// Functions reachable from `entry` through calls.
    pub fn reachable_from(&self, entry: FunId) -> Vec<bool> {
        let mut seen = vec![false; self.functions.len()];
        let mut stack = vec![entry];
        seen[entry] = true;
        while let Some(f) = stack.pop() {
            for c in self.calls.iter().filter(|c| c.source == f) {
                if !seen[c.target] {
                    seen[c.target] = true;
                    stack.push(c.target);
                }
            }
        }
        seen
    }

    /// Drops functions not reachable from `entry`, and their calls. Returns
    /// the names of the dropped functions.
    pub fn prune_unreachable(&mut self, entry: FunId) -> Vec<String> {
        let keep = self.reachable_from(entry);
        if keep.iter().all(|&k| k) {
            return Vec::new();
        }
        let mut remap = vec![usize::MAX; keep.len()];
        let mut out = SctProblem::new();
        let mut dropped = Vec::new();
        for f in 0..keep.len() {
            if keep[f] {
                remap[f] = out.functions.len();
                out.functions.push(self.functions[f].clone());
                out.params.push(self.params[f].clone());
            } else {
                dropped.push(self.functions[f].clone());
            }
        }
        for (c, g) in self.calls.iter().zip(&self.scgs) {
            if keep[c.source] {
                out.calls.push(Call {
                    name: c.name.clone(),
                    source: remap[c.source],
                    target: remap[c.target],
                });
                out.scgs.push(SizeChangeGraph {
                    source: remap[g.source],
                    target: remap[g.target],
                    graph: g.graph.clone(),
                });
            }
        }
        *self = out;
        dropped
    }

    /// Graph of a nonempty call sequence, or an error when it is not a valid
    /// walk through the call graph.
    pub fn graph_of_calls(&self, calls: &[CallId]) -> Result<SizeChangeGraph> {
        let (&first, rest) = calls.split_first().ok_or(Error::EmptyWord)?;
        let mut g = self
            .scgs
            .get(first)
            .cloned()
            .ok_or_else(|| Error::UnknownSymbol(format!("#{first}")))?;
        for &c in rest {
            let h = self
                .scgs
                .get(c)
                .ok_or_else(|| Error::UnknownSymbol(format!("#{c}")))?;
            g = scg_compose(&g, h)?;
        }
        Ok(g)
    }
}

/// True iff every SCG gives each target parameter at most one incoming arc.
pub fn sct_is_reverse_deterministic(p: &SctProblem) -> bool {
    p.scgs.iter().all(SizeChangeGraph::is_reverse_deterministic)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SctVerdict {
    Terminating,
    NotTerminating {
        /// A graph `f -> f` without a descending thread.
        graph: SizeChangeGraph,
        /// Call sequence whose infinite repetition is the counterexample.
        calls: Option<Vec<CallId>>,
    },
}

impl SctVerdict {
    pub fn is_terminating(&self) -> bool {
        matches!(self, SctVerdict::Terminating)
    }

    /// The counterexample as a lasso over call ids.
    pub fn lasso(&self) -> Option<Lasso> {
        match self {
            SctVerdict::NotTerminating {
                calls: Some(w), ..
            } => Some(Lasso {
                prefix: Vec::new(),
                cycle: w.clone(),
            }),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LjbOptions {
    pub subsumption: bool,
    pub witnesses: bool,
    pub deadline: Deadline,
}

impl Default for LjbOptions {
    fn default() -> Self {
        LjbOptions {
            subsumption: false,
            witnesses: true,
            deadline: Deadline::NONE,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SctReport {
    pub verdict: SctVerdict,
    pub stats: ClosureStats,
}

/// Closure of the problem's SCGs under composition. Exact mode looks for an
/// idempotent `G: f -> f` without `x ->1 x`; subsumption mode keeps
/// `⪯`-minimal graphs and applies the SCC test instead.
pub fn ljb_check(p: &SctProblem, opts: &LjbOptions) -> Result<SctVerdict> {
    Ok(ljb_check_with(p, opts)?.verdict)
}

pub fn ljb_check_with(p: &SctProblem, opts: &LjbOptions) -> Result<SctReport> {
    let initial = initial_elements(p, opts.witnesses);
    let subsumption = opts.subsumption;
    let check = |c: &Closure, x: usize| {
        let e = c.get(x);
        let hit = e.src == e.tgt
            && if subsumption {
                e.graph.scc_counterexample()
            } else {
                e.graph.is_idempotent() && !e.graph.has_one_self_loop()
            };
        hit.then_some(x)
    };
    let (outcome, stats, closure) = Closure::run(initial, subsumption, opts.deadline, check)?;
    let verdict = match outcome {
        Outcome::Closed => SctVerdict::Terminating,
        Outcome::Hit(x) => {
            let e = closure.get(x);
            SctVerdict::NotTerminating {
                graph: SizeChangeGraph {
                    source: e.src,
                    target: e.tgt,
                    graph: e.graph.clone(),
                },
                calls: e.witness.clone(),
            }
        }
    };
    Ok(SctReport { verdict, stats })
}

/// Every live element of the (optionally subsumption-reduced) closure.
pub fn scg_closure(p: &SctProblem, subsumption: bool) -> Result<Vec<SizeChangeGraph>> {
    let (_, _, closure) = Closure::run(
        initial_elements(p, false),
        subsumption,
        Deadline::NONE,
        |_, _| None::<()>,
    )?;
    Ok(closure
        .live_elements()
        .map(|e| SizeChangeGraph {
            source: e.src,
            target: e.tgt,
            graph: e.graph.clone(),
        })
        .collect())
}

fn initial_elements(p: &SctProblem, witnesses: bool) -> Vec<Element> {
    p.scgs
        .iter()
        .enumerate()
        .map(|(c, g)| Element {
            src: g.source,
            tgt: g.target,
            graph: g.graph.clone(),
            witness: witnesses.then(|| vec![c]),
        })
        .collect()
}

/// Call graph as an automaton: states are functions, all initial and
/// accepting; the alphabet is the call ids.
pub fn flow_automaton(p: &SctProblem) -> Result<BuchiAutomaton> {
    let mut a = BuchiAutomaton::new(&p.call_names())?;
    for f in &p.functions {
        let q = a.add_state(f.as_str())?;
        a.set_initial(q);
        a.set_accepting(q);
    }
    for (c, call) in p.calls.iter().enumerate() {
        a.add_transition(call.source, c, call.target);
    }
    Ok(a)
}

/// State layout of [`desc_automaton`]: functions first, then for each
/// parameter in declaration order its `0`- and `1`-flagged copies.
#[derive(Clone, Debug)]
pub struct DescLayout {
    offsets: Vec<usize>,
    functions: usize,
}

impl DescLayout {
    pub fn new(p: &SctProblem) -> Self {
        let mut offsets = Vec::with_capacity(p.functions.len());
        let mut next = p.functions.len();
        for ps in &p.params {
            offsets.push(next);
            next += 2 * ps.len();
        }
        DescLayout {
            offsets,
            functions: p.functions.len(),
        }
    }

    pub fn function_state(&self, f: FunId) -> usize {
        f
    }

    pub fn param_state(&self, f: FunId, x: usize, flag: bool) -> usize {
        self.offsets[f] + 2 * x + flag as usize
    }

    /// `(function, parameter, flag)` for parameter states.
    pub fn decode(&self, p: &SctProblem, q: usize) -> Option<(FunId, usize, bool)> {
        if q < self.functions {
            return None;
        }
        let f = self.offsets.partition_point(|&o| o <= q) - 1;
        let k = q - self.offsets[f];
        (k / 2 < p.params[f].len()).then_some((f, k / 2, k % 2 == 1))
    }
}

/// Automaton of call sequences with an infinitely descending thread.
pub fn desc_automaton(p: &SctProblem) -> Result<BuchiAutomaton> {
    let n = p.functions.len() + 2 * p.total_params();
    if n > MAX_NODES {
        return Err(Error::TooLarge {
            what: "descent automaton",
            size: n,
            limit: MAX_NODES,
        });
    }
    let lay = DescLayout::new(p);
    let mut a = BuchiAutomaton::new(&p.call_names())?;
    for f in &p.functions {
        a.add_state(f.as_str())?;
    }
    for (f, ps) in p.params.iter().enumerate() {
        for x in ps {
            for flag in 0..2 {
                a.add_state(format!("{}.{}:{}", p.functions[f], x, flag))?;
            }
        }
    }
    for q in 0..a.num_states() {
        a.set_initial(q);
        if lay.decode(p, q).is_some_and(|(_, _, flag)| flag) {
            a.set_accepting(q);
        }
    }
    for (c, call) in p.calls.iter().enumerate() {
        let (f1, f2) = (call.source, call.target);
        a.add_transition(f1, c, f2);
        for x in 0..p.params[f2].len() {
            a.add_transition(f1, c, lay.param_state(f2, x, false));
        }
        for (x, l, y) in p.scgs[c].graph.arcs() {
            for flag in [false, true] {
                a.add_transition(
                    lay.param_state(f1, x, flag),
                    c,
                    lay.param_state(f2, y, l == Label::One),
                );
            }
        }
    }
    Ok(a)
}

/// The position-based descent automaton: `2 * maxArity + 1` states, with
/// parameters identified by their position in the parameter list.
pub fn desc_automaton_optimized(p: &SctProblem) -> Result<BuchiAutomaton> {
    let m = p.max_arity();
    let mut a = BuchiAutomaton::new(&p.call_names())?;
    let q0 = a.add_state("q0")?;
    let pos = |h: usize, flag: bool| 1 + 2 * h + flag as usize;
    for h in 0..m {
        a.add_state(format!("h{}_0", h + 1))?;
        a.add_state(format!("h{}_1", h + 1))?;
    }
    for q in 0..a.num_states() {
        a.set_initial(q);
    }
    for h in 0..m {
        a.set_accepting(pos(h, true));
    }
    for (c, call) in p.calls.iter().enumerate() {
        a.add_transition(q0, c, q0);
        for x in 0..p.params[call.target].len() {
            a.add_transition(q0, c, pos(x, false));
        }
        for (x, l, y) in p.scgs[c].graph.arcs() {
            for flag in [false, true] {
                a.add_transition(pos(x, flag), c, pos(y, l == Label::One));
            }
        }
    }
    Ok(a)
}

/// Drops function nodes and flags from a supergraph over
/// `(flow_automaton, desc_automaton)`: `<x,b,y>` is kept iff some
/// `<<x,a>,b,<y,c>>` is present.
pub fn simplify_supergraph(p: &SctProblem, sg: &Supergraph) -> Result<SizeChangeGraph> {
    let lay = DescLayout::new(p);
    let n = p.functions.len() + 2 * p.total_params();
    let (f1, f2) = sg.arc;
    if f1 >= p.functions.len() || f2 >= p.functions.len() || sg.graph.cols() != n || sg.graph.rows() != n
    {
        return Err(Error::Precondition(
            "supergraph does not come from this problem's reduction".into(),
        ));
    }
    let mut k = ArcLabeledGraph::new(p.params[f1].len(), p.params[f2].len())?;
    for (q, l, r) in sg.graph.arcs() {
        if let (Some((fq, x, _)), Some((fr, y, _))) = (lay.decode(p, q), lay.decode(p, r)) {
            if fq == f1 && fr == f2 {
                k.join_arc(x, l, y);
            }
        }
    }
    Ok(SizeChangeGraph {
        source: f1,
        target: f2,
        graph: k,
    })
}

/// Call ids by name, for parsing witness sequences.
pub fn call_index(p: &SctProblem) -> HashMap<&str, CallId> {
    p.calls
        .iter()
        .enumerate()
        .map(|(i, c)| (c.name.as_str(), i))
        .collect()
}

/// Renders a call sequence with call names.
pub fn render_calls(p: &SctProblem, calls: &[SymbolId]) -> String {
    calls
        .iter()
        .map(|&c| p.calls[c].name.as_str())
        .collect::<Vec<_>>()
        .join(" ")
}
