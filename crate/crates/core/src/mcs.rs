//! Monotonicity constraint systems and their projection to SCT problems.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::graph::Label;
use crate::sct::{FunId, SctProblem};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Relation {
    Ge,
    Eq,
    Gt,
}

impl Relation {
    /// Relation of `u -a-> v -b-> w` between `u` and `w`.
    pub fn then(self, other: Relation) -> Relation {
        use Relation::*;
        match (self, other) {
            (Gt, _) | (_, Gt) => Gt,
            (Eq, Eq) => Eq,
            _ => Ge,
        }
    }

    /// The stronger of two facts about the same ordered pair. `=` and `>`
    /// together are contradictory; keeping `>` lets the closure find the
    /// resulting `u > u`.
    fn merge(self, other: Relation) -> Relation {
        self.max(other)
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Ge => ">=",
            Relation::Eq => "=",
            Relation::Gt => ">",
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Source,
    Target,
}

/// A parameter of the caller (`Source`) or the callee (`Target`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var {
    pub side: Side,
    pub index: usize,
}

impl Var {
    pub fn source(index: usize) -> Self {
        Var {
            side: Side::Source,
            index,
        }
    }

    pub fn target(index: usize) -> Self {
        Var {
            side: Side::Target,
            index,
        }
    }
}

/// Edges `u rel v` over the caller's and callee's parameters of one call.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonotonicityConstraint {
    pub source: FunId,
    pub target: FunId,
    source_arity: usize,
    target_arity: usize,
    edges: BTreeMap<(usize, usize), Relation>,
}

impl MonotonicityConstraint {
    pub fn new(source: FunId, target: FunId, source_arity: usize, target_arity: usize) -> Self {
        MonotonicityConstraint {
            source,
            target,
            source_arity,
            target_arity,
            edges: BTreeMap::new(),
        }
    }

    fn node(&self, v: Var) -> Result<usize> {
        let (i, n) = match v.side {
            Side::Source => (v.index, self.source_arity),
            Side::Target => (self.source_arity + v.index, self.target_arity),
        };
        if v.index < n {
            Ok(i)
        } else {
            Err(Error::Malformed(format!("{v:?} outside the parameter lists")))
        }
    }

    fn var(&self, i: usize) -> Var {
        if i < self.source_arity {
            Var::source(i)
        } else {
            Var::target(i - self.source_arity)
        }
    }

    fn nodes(&self) -> usize {
        self.source_arity + self.target_arity
    }

    /// Records `u rel v`, keeping the strongest relation per pair.
    pub fn add(&mut self, u: Var, rel: Relation, v: Var) -> Result<()> {
        let (a, b) = (self.node(u)?, self.node(v)?);
        self.put(a, rel, b);
        Ok(())
    }

    fn put(&mut self, a: usize, rel: Relation, b: usize) -> bool {
        let e = self.edges.entry((a, b)).or_insert(rel);
        let merged = e.merge(rel);
        let changed = merged != *e;
        *e = merged;
        changed
    }

    pub fn get(&self, u: Var, v: Var) -> Option<Relation> {
        let (a, b) = (self.node(u).ok()?, self.node(v).ok()?);
        self.edges.get(&(a, b)).copied()
    }

    pub fn edges(&self) -> impl Iterator<Item = (Var, Relation, Var)> + '_ {
        self.edges
            .iter()
            .map(|(&(a, b), &r)| (self.var(a), r, self.var(b)))
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }
}

/// Which implied arcs are added before projecting.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum ImpliedArcs {
    None,
    /// Symmetry of `=` and substitution of equals.
    EqualityOnly,
    /// Transitive composition of arbitrary edges.
    #[default]
    Full,
}

/// Full implied-arc closure.
pub fn implied_arcs_closure(mc: &MonotonicityConstraint) -> Result<MonotonicityConstraint> {
    close(mc, ImpliedArcs::Full, "")
}

fn close(mc: &MonotonicityConstraint, mode: ImpliedArcs, call: &str) -> Result<MonotonicityConstraint> {
    let mut out = mc.clone();
    if mode != ImpliedArcs::None {
        let n = out.nodes();
        let mut m = vec![vec![None::<Relation>; n]; n];
        for (&(a, b), &r) in &out.edges {
            m[a][b] = Some(r);
        }
        let mut changed = true;
        while changed {
            changed = false;
            for a in 0..n {
                for b in 0..n {
                    if m[a][b] == Some(Relation::Eq) && m[b][a] != Some(Relation::Eq) {
                        changed |= upd(&mut m, b, a, Relation::Eq);
                    }
                }
            }
            for k in 0..n {
                for a in 0..n {
                    let Some(r1) = m[a][k] else { continue };
                    for b in 0..n {
                        let Some(r2) = m[k][b] else { continue };
                        if mode == ImpliedArcs::EqualityOnly
                            && r1 != Relation::Eq
                            && r2 != Relation::Eq
                        {
                            continue;
                        }
                        changed |= upd(&mut m, a, b, r1.then(r2));
                    }
                }
            }
        }
        out.edges.clear();
        for (a, row) in m.iter().enumerate() {
            for (b, r) in row.iter().enumerate() {
                if let Some(r) = *r {
                    out.edges.insert((a, b), r);
                }
            }
        }
    }
    if let Some((&(a, _), _)) = out
        .edges
        .iter()
        .find(|(&(a, b), &r)| a == b && r == Relation::Gt)
    {
        return Err(Error::Inconsistent {
            call: call.to_string(),
            detail: format!("derives {:?} > itself", out.var(a)),
        });
    }
    Ok(out)
}

fn upd(m: &mut [Vec<Option<Relation>>], a: usize, b: usize, r: Relation) -> bool {
    let new = match m[a][b] {
        None => r,
        Some(old) => old.merge(r),
    };
    let changed = m[a][b] != Some(new);
    m[a][b] = Some(new);
    changed
}

/// Keeps caller-to-callee edges only: `>` becomes a 1-arc, `>=` and `=`
/// become 0-arcs.
pub fn project_constraint(mc: &MonotonicityConstraint) -> Vec<(usize, Label, usize)> {
    mc.edges()
        .filter(|(u, _, v)| u.side == Side::Source && v.side == Side::Target)
        .map(|(u, r, v)| (u.index, Label::from_bit(r == Relation::Gt), v.index))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct McsCall {
    pub name: String,
    pub constraint: MonotonicityConstraint,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MonotonicityConstraintSystem {
    functions: Vec<String>,
    params: Vec<Vec<String>>,
    calls: Vec<McsCall>,
}

impl MonotonicityConstraintSystem {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_function<S: AsRef<str>>(&mut self, name: &str, params: &[S]) -> Result<FunId> {
        if self.functions.iter().any(|f| f == name) {
            return Err(Error::Duplicate(name.to_string()));
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

    /// Adds a call with no edges and returns its constraint for filling in.
    pub fn add_call(
        &mut self,
        name: &str,
        source: FunId,
        target: FunId,
    ) -> Result<&mut MonotonicityConstraint> {
        if self.calls.iter().any(|c| c.name == name) {
            return Err(Error::Duplicate(name.to_string()));
        }
        if source >= self.functions.len() || target >= self.functions.len() {
            return Err(Error::Malformed(format!("call `{name}` names an unknown function")));
        }
        let mc = MonotonicityConstraint::new(
            source,
            target,
            self.params[source].len(),
            self.params[target].len(),
        );
        self.calls.push(McsCall {
            name: name.to_string(),
            constraint: mc,
        });
        Ok(&mut self.calls.last_mut().unwrap().constraint)
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

    pub fn calls(&self) -> &[McsCall] {
        &self.calls
    }

    pub fn constraint_mut(&mut self, call: usize) -> &mut MonotonicityConstraint {
        &mut self.calls[call].constraint
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Projection {
    pub problem: SctProblem,
    /// One entry per call dropped as unsatisfiable.
    pub warnings: Vec<String>,
}

/// Closes every constraint per `mode` and projects it to an SCG. Calls whose
/// closure is contradictory can never be taken and are dropped with a
/// warning.
pub fn mcs_to_sct(m: &MonotonicityConstraintSystem, mode: ImpliedArcs) -> Result<Projection> {
    let mut problem = SctProblem::new();
    for (f, ps) in m.functions.iter().zip(&m.params) {
        problem.add_function(f, ps)?;
    }
    let mut warnings = Vec::new();
    for call in &m.calls {
        match close(&call.constraint, mode, &call.name) {
            Ok(mc) => {
                problem.add_call(&call.name, mc.source, mc.target, &project_constraint(&mc))?;
            }
            Err(e @ Error::Inconsistent { .. }) => warnings.push(format!("{e}; call dropped")),
            Err(e) => return Err(e),
        }
    }
    Ok(Projection { problem, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use Relation::*;

    #[test]
    fn label_table() {
        assert_eq!(Ge.then(Gt), Gt);
        assert_eq!(Eq.then(Eq), Eq);
        assert_eq!(Eq.then(Ge), Ge);
        assert_eq!(Ge.then(Ge), Ge);
    }

    #[test]
    fn equality_substitution() {
        // f(x) -> g(u) with x = x' style edge inside the source: x0 = x1, x1 > u
        let mut mc = MonotonicityConstraint::new(0, 1, 2, 1);
        mc.add(Var::source(0), Eq, Var::source(1)).unwrap();
        mc.add(Var::source(1), Gt, Var::target(0)).unwrap();
        let c = close(&mc, ImpliedArcs::EqualityOnly, "c").unwrap();
        assert_eq!(c.get(Var::source(0), Var::target(0)), Some(Gt));
        assert_eq!(c.get(Var::source(1), Var::source(0)), Some(Eq));
    }

    #[test]
    fn inconsistency() {
        let mut mc = MonotonicityConstraint::new(0, 0, 2, 2);
        mc.add(Var::source(0), Gt, Var::source(1)).unwrap();
        mc.add(Var::source(1), Ge, Var::source(0)).unwrap();
        assert!(matches!(
            implied_arcs_closure(&mc),
            Err(Error::Inconsistent { .. })
        ));
    }

    #[test]
    fn closure_is_idempotent_and_monotone() {
        let mut mc = MonotonicityConstraint::new(0, 0, 2, 2);
        mc.add(Var::source(1), Ge, Var::source(0)).unwrap();
        mc.add(Var::source(0), Gt, Var::target(0)).unwrap();
        mc.add(Var::target(0), Eq, Var::target(1)).unwrap();
        let c = implied_arcs_closure(&mc).unwrap();
        assert_eq!(implied_arcs_closure(&c).unwrap(), c);
        for (u, r, v) in mc.edges() {
            assert!(c.get(u, v).unwrap() >= r);
        }
        let mut arcs = project_constraint(&c);
        arcs.sort();
        assert_eq!(
            arcs,
            vec![
                (0, Label::One, 0),
                (0, Label::One, 1),
                (1, Label::One, 0),
                (1, Label::One, 1)
            ]
        );
    }
}
