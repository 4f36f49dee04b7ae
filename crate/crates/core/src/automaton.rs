//! Büchi automata over interned states and symbols.

use std::collections::{HashMap, VecDeque};

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::scc::tarjan;

pub type StateId = usize;
pub type SymbolId = usize;
pub type StateSet = FixedBitSet;

/// Nondeterministic Büchi automaton with a total transition map
/// (missing transitions are empty target sets).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BuchiAutomaton {
    alphabet: Vec<String>,
    states: Vec<String>,
    symbol_index: HashMap<String, SymbolId>,
    state_index: HashMap<String, StateId>,
    initial: FixedBitSet,
    accepting: FixedBitSet,
    // indexed by state * |alphabet| + symbol
    delta: Vec<FixedBitSet>,
}

/// The ultimately periodic word `prefix · cycle^ω`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Lasso {
    pub prefix: Vec<SymbolId>,
    pub cycle: Vec<SymbolId>,
}

impl Lasso {
    pub fn new(prefix: Vec<SymbolId>, cycle: Vec<SymbolId>) -> Result<Self> {
        if cycle.is_empty() {
            return Err(Error::EmptyWord);
        }
        Ok(Lasso { prefix, cycle })
    }

    pub fn render(&self, alphabet: &[String]) -> String {
        let word = |w: &[SymbolId]| {
            if w.is_empty() {
                "ε".to_string()
            } else {
                w.iter()
                    .map(|&s| alphabet[s].as_str())
                    .collect::<Vec<_>>()
                    .join(" ")
            }
        };
        format!("{} ({})^ω", word(&self.prefix), word(&self.cycle))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Emptiness {
    Empty,
    NonEmpty(Lasso),
}

impl Emptiness {
    pub fn is_empty(&self) -> bool {
        matches!(self, Emptiness::Empty)
    }
}

impl BuchiAutomaton {
    /// Automaton with the given alphabet and no states.
    pub fn new<S: AsRef<str>>(alphabet: &[S]) -> Result<Self> {
        let mut symbol_index = HashMap::new();
        let mut names = Vec::with_capacity(alphabet.len());
        for (i, s) in alphabet.iter().enumerate() {
            let s = s.as_ref().to_string();
            if symbol_index.insert(s.clone(), i).is_some() {
                return Err(Error::Duplicate(s));
            }
            names.push(s);
        }
        Ok(BuchiAutomaton {
            alphabet: names,
            states: Vec::new(),
            symbol_index,
            state_index: HashMap::new(),
            initial: FixedBitSet::new(),
            accepting: FixedBitSet::new(),
            delta: Vec::new(),
        })
    }

    /// Single accepting initial state looping on every symbol.
    pub fn universal<S: AsRef<str>>(alphabet: &[S]) -> Result<Self> {
        let mut u = Self::new(alphabet)?;
        let q = u.add_state("u")?;
        u.set_initial(q);
        u.set_accepting(q);
        for a in 0..u.num_symbols() {
            u.add_transition(q, a, q);
        }
        Ok(u)
    }

    pub fn add_state(&mut self, name: impl Into<String>) -> Result<StateId> {
        let name = name.into();
        if self.state_index.contains_key(&name) {
            return Err(Error::Duplicate(name));
        }
        let id = self.states.len();
        self.state_index.insert(name.clone(), id);
        self.states.push(name);
        let n = self.states.len();
        self.initial.grow(n);
        self.accepting.grow(n);
        for set in &mut self.delta {
            set.grow(n);
        }
        for _ in 0..self.alphabet.len() {
            self.delta.push(FixedBitSet::with_capacity(n));
        }
        Ok(id)
    }

    pub fn set_initial(&mut self, q: StateId) {
        self.initial.insert(q);
    }

    pub fn set_accepting(&mut self, q: StateId) {
        self.accepting.insert(q);
    }

    pub fn add_transition(&mut self, p: StateId, a: SymbolId, q: StateId) {
        let k = p * self.alphabet.len() + a;
        self.delta[k].insert(q);
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_symbols(&self) -> usize {
        self.alphabet.len()
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn state_names(&self) -> &[String] {
        &self.states
    }

    pub fn state_name(&self, q: StateId) -> &str {
        &self.states[q]
    }

    pub fn symbol_name(&self, a: SymbolId) -> &str {
        &self.alphabet[a]
    }

    pub fn state_id(&self, name: &str) -> Result<StateId> {
        self.state_index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownState(name.to_string()))
    }

    pub fn symbol_id(&self, name: &str) -> Result<SymbolId> {
        self.symbol_index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownSymbol(name.to_string()))
    }

    pub fn word(&self, names: &[&str]) -> Result<Vec<SymbolId>> {
        names.iter().map(|s| self.symbol_id(s)).collect()
    }

    pub fn initial(&self) -> &StateSet {
        &self.initial
    }

    pub fn accepting(&self) -> &StateSet {
        &self.accepting
    }

    pub fn is_initial(&self, q: StateId) -> bool {
        self.initial.contains(q)
    }

    pub fn is_accepting(&self, q: StateId) -> bool {
        self.accepting.contains(q)
    }

    pub fn successors(&self, q: StateId, a: SymbolId) -> &StateSet {
        &self.delta[q * self.alphabet.len() + a]
    }

    pub fn empty_set(&self) -> StateSet {
        FixedBitSet::with_capacity(self.num_states())
    }

    pub fn full_set(&self) -> StateSet {
        let mut s = self.empty_set();
        s.insert_range(..);
        s
    }

    pub fn transition_count(&self) -> usize {
        self.delta.iter().map(|s| s.count_ones(..)).sum()
    }

    /// All transitions `(p, a, q)` in state-then-symbol order.
    pub fn transitions(&self) -> impl Iterator<Item = (StateId, SymbolId, StateId)> + '_ {
        let k = self.alphabet.len();
        self.delta
            .iter()
            .enumerate()
            .flat_map(move |(i, set)| set.ones().map(move |q| (i / k.max(1), i % k.max(1), q)))
    }

    fn check_symbol(&self, a: SymbolId) -> Result<()> {
        if a < self.alphabet.len() {
            Ok(())
        } else {
            Err(Error::UnknownSymbol(format!("#{a}")))
        }
    }

    /// `ρ(R, w)`, the set of states reachable from `R` by reading `w`.
    pub fn lift_transitions(&self, from: &StateSet, word: &[SymbolId]) -> Result<StateSet> {
        if let Some(q) = from.ones().find(|&q| q >= self.num_states()) {
            return Err(Error::UnknownState(format!("#{q}")));
        }
        for &a in word {
            self.check_symbol(a)?;
        }
        let mut cur = self.empty_set();
        for q in from.ones() {
            cur.insert(q);
        }
        for &a in word {
            let mut next = self.empty_set();
            for q in cur.ones() {
                next.union_with(self.successors(q, a));
            }
            cur = next;
        }
        Ok(cur)
    }

    pub fn is_reverse_deterministic(&self) -> bool {
        let n = self.num_states();
        for a in 0..self.num_symbols() {
            let mut seen = FixedBitSet::with_capacity(n);
            for p in 0..n {
                let succ = self.successors(p, a);
                if succ.intersection(&seen).next().is_some() {
                    return false;
                }
                seen.union_with(succ);
            }
        }
        true
    }

    /// States reachable from the initial states.
    pub fn reachable_states(&self) -> StateSet {
        let mut seen = self.initial.clone();
        let mut queue: VecDeque<StateId> = self.initial.ones().collect();
        while let Some(p) = queue.pop_front() {
            for a in 0..self.num_symbols() {
                for q in self.successors(p, a).ones() {
                    if !seen.put(q) {
                        queue.push_back(q);
                    }
                }
            }
        }
        seen
    }

    /// Sub-automaton on `keep`, preserving state names and order.
    pub fn restrict_to(&self, keep: &StateSet) -> BuchiAutomaton {
        let mut out = BuchiAutomaton::new(&self.alphabet).expect("alphabet already unique");
        let mut map = vec![usize::MAX; self.num_states()];
        for q in keep.ones() {
            map[q] = out.add_state(self.states[q].clone()).expect("names unique");
        }
        for q in keep.ones() {
            if self.is_initial(q) {
                out.set_initial(map[q]);
            }
            if self.is_accepting(q) {
                out.set_accepting(map[q]);
            }
        }
        for (p, a, q) in self.transitions() {
            if map[p] != usize::MAX && map[q] != usize::MAX {
                out.add_transition(map[p], a, map[q]);
            }
        }
        out
    }

    pub fn same_alphabet(&self, other: &BuchiAutomaton) -> Result<()> {
        if self.alphabet == other.alphabet {
            Ok(())
        } else {
            Err(Error::AlphabetMismatch)
        }
    }
}

/// Product automaton with a two-phase counter; `L = L(a) ∩ L(b)`.
///
/// Phase 0 waits for an accepting state of `a`, phase 1 for one of `b`;
/// product states `(p, q, 1)` with `q` accepting are accepting. Only
/// reachable product states are built.
pub fn intersect(a: &BuchiAutomaton, b: &BuchiAutomaton) -> Result<BuchiAutomaton> {
    a.same_alphabet(b)?;
    let nb = b.num_states();
    let key = |p: usize, q: usize, c: usize| (p * nb + q) * 2 + c;
    let mut out = BuchiAutomaton::new(a.alphabet())?;
    let mut index: HashMap<usize, StateId> = HashMap::new();
    let mut queue: VecDeque<(usize, usize, usize, StateId)> = VecDeque::new();
    let mut intern = |out: &mut BuchiAutomaton,
                      queue: &mut VecDeque<(usize, usize, usize, StateId)>,
                      p: usize,
                      q: usize,
                      c: usize|
     -> StateId {
        *index.entry(key(p, q, c)).or_insert_with(|| {
            let id = out
                .add_state(format!("{}|{}|{}", a.state_name(p), b.state_name(q), c))
                .expect("product names are unique");
            if c == 1 && b.is_accepting(q) {
                out.set_accepting(id);
            }
            queue.push_back((p, q, c, id));
            id
        })
    };
    for p in a.initial().ones() {
        for q in b.initial().ones() {
            let id = intern(&mut out, &mut queue, p, q, 0);
            out.set_initial(id);
        }
    }
    while let Some((p, q, c, src)) = queue.pop_front() {
        let next_c = match c {
            0 if a.is_accepting(p) => 1,
            1 if b.is_accepting(q) => 0,
            c => c,
        };
        for s in 0..a.num_symbols() {
            for p2 in a.successors(p, s).ones() {
                for q2 in b.successors(q, s).ones() {
                    let dst = intern(&mut out, &mut queue, p2, q2, next_c);
                    out.add_transition(src, s, dst);
                }
            }
        }
    }
    Ok(out)
}

/// Emptiness over an implicit graph with labeled edges; returns a lasso
/// through an accepting node when one exists.
pub(crate) fn find_lasso<S, A>(
    n: usize,
    roots: &[usize],
    succ: S,
    accepting: A,
) -> Option<Lasso>
where
    S: Fn(usize) -> Vec<(SymbolId, usize)>,
    A: Fn(usize) -> bool,
{
    let (comps, comp_of) = tarjan(n, roots.iter().copied(), |v| {
        succ(v).into_iter().map(|(_, w)| w).collect()
    });
    let mut target = None;
    'outer: for (ci, comp) in comps.iter().enumerate() {
        for &v in comp {
            if !accepting(v) {
                continue;
            }
            let cyclic = comp.len() > 1 || succ(v).iter().any(|&(_, w)| w == v);
            if cyclic {
                target = Some((ci, v));
                break 'outer;
            }
        }
    }
    let (ci, r) = target?;

    // prefix: BFS from the roots to r
    let mut parent: HashMap<usize, (usize, SymbolId)> = HashMap::new();
    let mut seen = FixedBitSet::with_capacity(n);
    let mut queue = VecDeque::new();
    for &v in roots {
        if !seen.put(v) {
            queue.push_back(v);
        }
    }
    while let Some(v) = queue.pop_front() {
        if v == r {
            break;
        }
        for (a, w) in succ(v) {
            if !seen.put(w) {
                parent.insert(w, (v, a));
                queue.push_back(w);
            }
        }
    }
    let mut prefix = Vec::new();
    let mut v = r;
    while let Some(&(u, a)) = parent.get(&v) {
        prefix.push(a);
        v = u;
    }
    prefix.reverse();

    // cycle: BFS inside the component from r's successors back to r
    let mut parent: HashMap<usize, (usize, SymbolId)> = HashMap::new();
    let mut seen = FixedBitSet::with_capacity(n);
    let mut queue = VecDeque::new();
    let mut closing = None;
    for (a, w) in succ(r) {
        if comp_of[w] != ci {
            continue;
        }
        if w == r {
            closing = Some(vec![a]);
            break;
        }
        if !seen.put(w) {
            parent.insert(w, (r, a));
            queue.push_back(w);
        }
    }
    if closing.is_none() {
        'bfs: while let Some(v) = queue.pop_front() {
            for (a, w) in succ(v) {
                if comp_of[w] != ci {
                    continue;
                }
                if w == r {
                    let mut cycle = vec![a];
                    let mut x = v;
                    while x != r {
                        let (u, b) = parent[&x];
                        cycle.push(b);
                        x = u;
                    }
                    cycle.reverse();
                    closing = Some(cycle);
                    break 'bfs;
                }
                if !seen.put(w) {
                    parent.insert(w, (v, a));
                    queue.push_back(w);
                }
            }
        }
    }
    closing.map(|cycle| Lasso { prefix, cycle })
}

/// SCC-based emptiness with a lasso witness.
pub fn is_empty(b: &BuchiAutomaton) -> Emptiness {
    let roots: Vec<usize> = b.initial().ones().collect();
    let succ = |p: usize| {
        let mut out = Vec::new();
        for a in 0..b.num_symbols() {
            for q in b.successors(p, a).ones() {
                out.push((a, q));
            }
        }
        out
    };
    match find_lasso(b.num_states(), &roots, succ, |q| b.is_accepting(q)) {
        Some(l) => Emptiness::NonEmpty(l),
        None => Emptiness::Empty,
    }
}

/// Whether `prefix · cycle^ω ∈ L(b)`, by a direct product of `b` with the
/// positions of the lasso.
pub fn accepts_lasso(b: &BuchiAutomaton, w: &Lasso) -> Result<bool> {
    if w.cycle.is_empty() {
        return Err(Error::EmptyWord);
    }
    for &a in w.prefix.iter().chain(&w.cycle) {
        b.check_symbol(a)?;
    }
    let u = w.prefix.len();
    let m = u + w.cycle.len();
    let letter = |i: usize| {
        if i < u {
            w.prefix[i]
        } else {
            w.cycle[i - u]
        }
    };
    let next = |i: usize| if i + 1 < m { i + 1 } else { u };
    let n = b.num_states() * m;
    let roots: Vec<usize> = b.initial().ones().map(|q| q * m).collect();
    let succ = |v: usize| {
        let (q, i) = (v / m, v % m);
        let j = next(i);
        b.successors(q, letter(i))
            .ones()
            .map(|q2| q2 * m + j)
            .collect::<Vec<_>>()
    };
    let (comps, _) = tarjan(n, roots, succ);
    Ok(comps.iter().any(|comp| {
        let cyclic = comp.len() > 1 || succ(comp[0]).contains(&comp[0]);
        cyclic && comp.iter().any(|&v| b.is_accepting(v / m))
    }))
}
