//! Text formats: `.ba` automata, `.sct` problems and `.mcs` constraint
//! systems. All are line-oriented UTF-8 with `#` comments.

use std::collections::BTreeSet;

use crate::automaton::BuchiAutomaton;
use crate::error::{Error, Result};
use crate::graph::Label;
use crate::mcs::{MonotonicityConstraintSystem, Relation, Side, Var};
use crate::sct::SctProblem;

/// Header written by `sct reduce`; marks the pair as satisfying the
/// single-graph search preconditions.
pub const SUFFIX_CLOSED_STAMP: &str = "# suffix-closed-wrt-flow: yes";

pub fn has_suffix_closed_stamp(text: &str) -> bool {
    text.lines().any(|l| l.trim() == SUFFIX_CLOSED_STAMP)
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

/// Parses the `.ba` format. The alphabet is stored sorted so that files
/// listing the same symbols in different orders agree.
pub fn parse_ba(text: &str) -> Result<BuchiAutomaton> {
    let mut alphabet: Option<(usize, Vec<String>)> = None;
    let mut states: Option<(usize, Vec<String>)> = None;
    let mut initial: Option<(usize, Vec<String>)> = None;
    let mut accepting: Option<(usize, Vec<String>)> = None;
    let mut trans: Vec<(usize, Vec<String>)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        let (key, rest) = line
            .split_once(':')
            .ok_or_else(|| Error::parse(line_no, "expected `key: values`"))?;
        let words: Vec<String> = rest.split_whitespace().map(str::to_string).collect();
        let slot = match key.trim() {
            "alphabet" => &mut alphabet,
            "states" => &mut states,
            "initial" => &mut initial,
            "accepting" => &mut accepting,
            "trans" => {
                if words.len() != 3 {
                    return Err(Error::parse(line_no, "expected `trans: <state> <symbol> <state>`"));
                }
                trans.push((line_no, words));
                continue;
            }
            other => return Err(Error::parse(line_no, format!("unknown key `{other}`"))),
        };
        if slot.is_some() {
            return Err(Error::parse(line_no, format!("duplicate `{}` declaration", key.trim())));
        }
        *slot = Some((line_no, words));
    }
    let last = text.lines().count().max(1);
    let need = |v: Option<(usize, Vec<String>)>, what: &str| {
        v.ok_or_else(|| Error::parse(last, format!("missing `{what}` section")))
    };
    let (al, mut alphabet) = need(alphabet, "alphabet")?;
    let (sl, states) = need(states, "states")?;
    let (il, initial) = need(initial, "initial")?;
    let (fl, accepting) = need(accepting, "accepting")?;
    alphabet.sort();
    let mut b = BuchiAutomaton::new(&alphabet).map_err(|e| at(al, e))?;
    for s in &states {
        b.add_state(s.as_str()).map_err(|e| at(sl, e))?;
    }
    for s in &initial {
        let q = b.state_id(s).map_err(|e| at(il, e))?;
        b.set_initial(q);
    }
    for s in &accepting {
        let q = b.state_id(s).map_err(|e| at(fl, e))?;
        b.set_accepting(q);
    }
    for (line, w) in trans {
        let p = b.state_id(&w[0]).map_err(|e| at(line, e))?;
        let a = b.symbol_id(&w[1]).map_err(|e| at(line, e))?;
        let q = b.state_id(&w[2]).map_err(|e| at(line, e))?;
        b.add_transition(p, a, q);
    }
    Ok(b)
}

fn at(line: usize, e: Error) -> Error {
    match e {
        Error::Parse { .. } => e,
        other => Error::parse(line, other.to_string()),
    }
}

/// Canonical `.ba` text: every list sorted lexicographically.
pub fn render_ba(b: &BuchiAutomaton) -> String {
    let sorted = |it: &mut dyn Iterator<Item = &str>| {
        let v: BTreeSet<&str> = it.collect();
        v.into_iter().collect::<Vec<_>>().join(" ")
    };
    let mut out = String::new();
    out.push_str(&format!(
        "alphabet: {}\n",
        sorted(&mut b.alphabet().iter().map(String::as_str))
    ));
    out.push_str(&format!(
        "states: {}\n",
        sorted(&mut b.state_names().iter().map(String::as_str))
    ));
    out.push_str(&format!(
        "initial: {}\n",
        sorted(&mut b.initial().ones().map(|q| b.state_name(q)))
    ));
    out.push_str(&format!(
        "accepting: {}\n",
        sorted(&mut b.accepting().ones().map(|q| b.state_name(q)))
    ));
    let mut trans: Vec<(&str, &str, &str)> = b
        .transitions()
        .map(|(p, a, q)| (b.state_name(p), b.symbol_name(a), b.state_name(q)))
        .collect();
    trans.sort();
    for (p, a, q) in trans {
        out.push_str(&format!("trans: {p} {a} {q}\n"));
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Op(String),
    Punct(char),
}

struct Lexer {
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

fn is_ident(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '.' || c == '\''
}

impl Lexer {
    fn new(text: &str) -> Result<Self> {
        let mut toks = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let mut chars = strip_comment(raw).chars().peekable();
            while let Some(&c) = chars.peek() {
                if c.is_whitespace() {
                    chars.next();
                } else if is_ident(c) {
                    let mut s = String::new();
                    while let Some(&c) = chars.peek().filter(|&&c| is_ident(c)) {
                        s.push(c);
                        chars.next();
                    }
                    toks.push((line, Tok::Ident(s)));
                } else if "<>=-!".contains(c) {
                    let mut s = String::new();
                    while let Some(&c) = chars.peek().filter(|&&c| "<>=-!".contains(c)) {
                        s.push(c);
                        chars.next();
                    }
                    toks.push((line, Tok::Op(s)));
                } else if "(){};:,".contains(c) {
                    toks.push((line, Tok::Punct(c)));
                    chars.next();
                } else {
                    return Err(Error::parse(line, format!("unexpected character `{c}`")));
                }
            }
        }
        Ok(Lexer { toks, pos: 0 })
    }

    fn line(&self) -> usize {
        self.toks
            .get(self.pos)
            .or(self.toks.last())
            .map_or(1, |t| t.0)
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.1)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.1.clone());
        self.pos += 1;
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::parse(self.line(), msg))
    }

    fn ident(&mut self, what: &str) -> Result<String> {
        match self.next() {
            Some(Tok::Ident(s)) => Ok(s),
            _ => {
                self.pos -= 1;
                self.err(format!("expected {what}"))
            }
        }
    }

    fn punct(&mut self, c: char) -> Result<()> {
        match self.next() {
            Some(Tok::Punct(d)) if d == c => Ok(()),
            _ => {
                self.pos -= 1;
                self.err(format!("expected `{c}`"))
            }
        }
    }

    fn op(&mut self) -> Result<String> {
        match self.next() {
            Some(Tok::Op(s)) => Ok(s),
            _ => {
                self.pos -= 1;
                self.err("expected a relation")
            }
        }
    }
}

/// Shared skeleton of `.sct` and `.mcs`: declarations, then call blocks
/// whose arcs are handed to `arc`.
fn parse_program(
    text: &str,
    mut fun: impl FnMut(&str, &[String]) -> Result<()>,
    mut call: impl FnMut(&str, &str, &str) -> Result<()>,
    mut arc: impl FnMut(&str, &str, &str) -> Result<()>,
) -> Result<()> {
    let mut lx = Lexer::new(text)?;
    while let Some(t) = lx.next() {
        let line = lx.toks[lx.pos - 1].0;
        let ctx = |e: Error| at(line, e);
        match t {
            Tok::Ident(k) if k == "fun" => {
                let name = lx.ident("a function name")?;
                lx.punct('(')?;
                let mut params = Vec::new();
                while let Some(Tok::Ident(_)) = lx.peek() {
                    params.push(lx.ident("a parameter")?);
                    if let Some(Tok::Punct(',')) = lx.peek() {
                        lx.pos += 1;
                    }
                }
                lx.punct(')')?;
                fun(&name, &params).map_err(ctx)?;
            }
            Tok::Ident(k) if k == "call" => {
                let name = lx.ident("a call name")?;
                lx.punct(':')?;
                let src = lx.ident("a source function")?;
                if lx.op()? != "->" {
                    lx.pos -= 1;
                    return lx.err("expected `->`");
                }
                let tgt = lx.ident("a target function")?;
                call(&name, &src, &tgt).map_err(ctx)?;
                lx.punct('{')?;
                loop {
                    match lx.peek() {
                        Some(Tok::Punct('}')) => {
                            lx.pos += 1;
                            break;
                        }
                        Some(Tok::Punct(';')) => {
                            lx.pos += 1;
                        }
                        Some(Tok::Ident(_)) => {
                            let line = lx.line();
                            let u = lx.ident("an endpoint")?;
                            let rel = lx.op()?;
                            let v = lx.ident("an endpoint")?;
                            arc(&u, &rel, &v).map_err(|e| at(line, e))?;
                        }
                        _ => return lx.err("expected an arc or `}`"),
                    }
                }
            }
            _ => {
                lx.pos -= 1;
                return lx.err("expected `fun` or `call`");
            }
        }
    }
    Ok(())
}

/// Parses the `.sct` format: `fun f(x y)` and
/// `call a: f -> g { x > z ; y >= z }`.
pub fn parse_sct(text: &str) -> Result<SctProblem> {
    use std::cell::RefCell;
    let p = RefCell::new(SctProblem::new());
    let pending: RefCell<Option<(String, usize, usize, Vec<(usize, Label, usize)>)>> =
        RefCell::new(None);
    let flush = || -> Result<()> {
        if let Some((name, s, t, arcs)) = pending.borrow_mut().take() {
            p.borrow_mut().add_call(&name, s, t, &arcs)?;
        }
        Ok(())
    };
    parse_program(
        text,
        |name, params| {
            flush()?;
            p.borrow_mut().add_function(name, params).map(|_| ())
        },
        |name, src, tgt| {
            flush()?;
            let prob = p.borrow();
            let s = prob
                .function_id(src)
                .ok_or_else(|| Error::Malformed(format!("unknown function `{src}`")))?;
            let t = prob
                .function_id(tgt)
                .ok_or_else(|| Error::Malformed(format!("unknown function `{tgt}`")))?;
            if prob.calls().iter().any(|c| c.name == name)
                || pending.borrow().as_ref().is_some_and(|c| c.0 == name)
            {
                return Err(Error::Duplicate(name.to_string()));
            }
            *pending.borrow_mut() = Some((name.to_string(), s, t, Vec::new()));
            Ok(())
        },
        |u, rel, v| {
            let label = match rel {
                ">" => Label::One,
                ">=" => Label::Zero,
                other => return Err(Error::Malformed(format!("unknown relation `{other}`"))),
            };
            let mut pend = pending.borrow_mut();
            let (_, s, t, arcs) = pend.as_mut().expect("arcs follow a call header");
            let prob = p.borrow();
            let x = position(prob.params(*s), u, &prob.functions()[*s])?;
            let y = position(prob.params(*t), v, &prob.functions()[*t])?;
            if arcs.iter().any(|&(a, l, b)| a == x && b == y && l != label) {
                return Err(Error::Malformed(format!("`{u}` and `{v}` carry both labels")));
            }
            arcs.push((x, label, y));
            Ok(())
        },
    )?;
    flush()?;
    Ok(p.into_inner())
}

fn position(params: &[String], name: &str, f: &str) -> Result<usize> {
    params
        .iter()
        .position(|p| p == name)
        .ok_or_else(|| Error::Malformed(format!("`{name}` is not a parameter of `{f}`")))
}

/// Parses `.sct` and prunes functions unreachable from the first declared
/// one. Returns the problem and one warning per pruned function.
pub fn load_sct(text: &str) -> Result<(SctProblem, Vec<String>)> {
    let mut p = parse_sct(text)?;
    if p.functions().is_empty() {
        return Ok((p, Vec::new()));
    }
    let dropped = p.prune_unreachable(0);
    let warnings = dropped
        .into_iter()
        .map(|f| format!("function `{f}` is unreachable from the entry; pruned"))
        .collect();
    Ok((p, warnings))
}

/// Canonical `.sct` text: declaration order, arcs sorted by position.
pub fn render_sct(p: &SctProblem) -> String {
    let mut out = String::new();
    for (f, name) in p.functions().iter().enumerate() {
        out.push_str(&format!("fun {name}({})\n", p.params(f).join(" ")));
    }
    for (c, call) in p.calls().iter().enumerate() {
        let (s, t) = (call.source, call.target);
        let arcs: Vec<String> = p
            .scg(c)
            .graph
            .arcs()
            .map(|(x, l, y)| {
                let rel = if l == Label::One { ">" } else { ">=" };
                format!("{} {rel} {}", p.params(s)[x], p.params(t)[y])
            })
            .collect();
        out.push_str(&format!(
            "call {}: {} -> {} {{ {} }}\n",
            call.name,
            p.functions()[s],
            p.functions()[t],
            arcs.join(" ; ")
        ));
    }
    out
}

/// Parses the `.mcs` format. Endpoints are `x`, `f.x` or, for the callee
/// side of a self-call, `x'` / `f.x'`. Unqualified names present on both
/// sides of a call between different functions are rejected.
pub fn parse_mcs(text: &str) -> Result<MonotonicityConstraintSystem> {
    use std::cell::RefCell;
    let m = RefCell::new(MonotonicityConstraintSystem::new());
    let current: RefCell<Option<String>> = RefCell::new(None);
    parse_program(
        text,
        |name, params| m.borrow_mut().add_function(name, params).map(|_| ()),
        |name, src, tgt| {
            let mut sys = m.borrow_mut();
            let s = sys
                .function_id(src)
                .ok_or_else(|| Error::Malformed(format!("unknown function `{src}`")))?;
            let t = sys
                .function_id(tgt)
                .ok_or_else(|| Error::Malformed(format!("unknown function `{tgt}`")))?;
            sys.add_call(name, s, t)?;
            *current.borrow_mut() = Some(name.to_string());
            Ok(())
        },
        |u, rel, v| {
            let rel = match rel {
                ">" => Relation::Gt,
                ">=" => Relation::Ge,
                "=" => Relation::Eq,
                other => return Err(Error::Malformed(format!("unknown relation `{other}`"))),
            };
            let mut sys = m.borrow_mut();
            let (s, t) = {
                let mc = &sys.calls().last().expect("arcs follow a call header").constraint;
                (mc.source, mc.target)
            };
            let uv = resolve(&sys, s, t, u)?;
            let vv = resolve(&sys, s, t, v)?;
            let idx = sys.calls().len() - 1;
            sys.constraint_mut(idx).add(uv, rel, vv)
        },
    )?;
    Ok(m.into_inner())
}

fn resolve(sys: &MonotonicityConstraintSystem, s: usize, t: usize, name: &str) -> Result<Var> {
    let (body, primed) = match name.strip_suffix('\'') {
        Some(b) => (b, true),
        None => (name, false),
    };
    let (qual, param) = match body.split_once('.') {
        Some((f, x)) => (Some(f), x),
        None => (None, body),
    };
    let side = match (qual, primed) {
        (_, true) => {
            if qual.is_some_and(|f| sys.function_id(f) != Some(t)) {
                return Err(Error::Malformed(format!("`{name}` does not name a callee parameter")));
            }
            Side::Target
        }
        (Some(f), false) => match sys.function_id(f) {
            Some(id) if id == s => Side::Source,
            Some(id) if id == t => Side::Target,
            _ => return Err(Error::Malformed(format!("`{f}` is neither caller nor callee"))),
        },
        (None, false) => {
            let in_s = sys.params(s).iter().any(|p| p == param);
            let in_t = sys.params(t).iter().any(|p| p == param);
            match (in_s, in_t) {
                (true, true) if s != t => {
                    return Err(Error::Malformed(format!(
                        "`{name}` is ambiguous; qualify it with a function name"
                    )))
                }
                (true, _) => Side::Source,
                (false, true) => Side::Target,
                (false, false) => {
                    return Err(Error::Malformed(format!("unknown parameter `{name}`")))
                }
            }
        }
    };
    let f = if side == Side::Source { s } else { t };
    let index = position(sys.params(f), param, &sys.functions()[f])?;
    Ok(Var { side, index })
}

/// Canonical `.mcs` text with fully qualified endpoints.
pub fn render_mcs(m: &MonotonicityConstraintSystem) -> String {
    let mut out = String::new();
    for (f, name) in m.functions().iter().enumerate() {
        out.push_str(&format!("fun {name}({})\n", m.params(f).join(" ")));
    }
    for call in m.calls() {
        let mc = &call.constraint;
        let show = |v: Var| {
            let f = if v.side == Side::Source { mc.source } else { mc.target };
            let prime = if v.side == Side::Target && mc.source == mc.target {
                "'"
            } else {
                ""
            };
            format!("{}.{}{prime}", m.functions()[f], m.params(f)[v.index])
        };
        let edges: Vec<String> = mc
            .edges()
            .map(|(u, r, v)| format!("{} {r} {}", show(u), show(v)))
            .collect();
        out.push_str(&format!(
            "call {}: {} -> {} {{ {} }}\n",
            call.name,
            m.functions()[mc.source],
            m.functions()[mc.target],
            edges.join(" ; ")
        ));
    }
    out
}
