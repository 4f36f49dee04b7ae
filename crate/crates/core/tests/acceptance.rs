//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::time::{Duration, Instant};

use rand::{rngs::StdRng, RngExt, SeedableRng};
use rayon::prelude::*;

use common::{all_automata, all_lassos, corpus_file, dense_closure, is_nontermination_witness, lasso_member};
use omega_sct::bench::{load_corpus, run_cell, write_csv, BenchProblem, BenchRecord, Engine};
use omega_sct::formats::{load_sct, parse_ba};
use omega_sct::generate::{permutation_gadget, random_automaton, random_automaton_uniform, random_sct, SctShape};
use omega_sct::ramsey::{dgs_containment, ramsey_universality, sgs_containment_with, ContainmentVerdict, RamseyOptions};
use omega_sct::rank::{kv_complement, rank_containment_with, rank_universality, RankOptions};
use omega_sct::sct::{
    call_index, desc_automaton_optimized, flow_automaton, ljb_check, scg_closure, scg_compose,
    sct_is_reverse_deterministic, LjbOptions, SctProblem,
};
use omega_sct::{ArcLabeledGraph, BuchiAutomaton, Label, Lasso};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e2s<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn show(b: &BuchiAutomaton) -> String {
    omega_sct::formats::render_ba(b).replace('\n', "; ")
}

fn complement_exhaustive() -> Outcome {
    let lassos = all_lassos(2, 2, 2);
    let automata: Vec<BuchiAutomaton> = (0..=2).flat_map(all_automata).collect();
    let failures: Vec<String> = automata
        .par_iter()
        .filter_map(|b| {
            let bound = (2 * b.num_states() as i64 - 2).max(1);
            let c = match kv_complement(b, bound) {
                Ok(c) => c,
                Err(e) => return Some(format!("{}: {e}", show(b))),
            };
            lassos
                .iter()
                .find(|w| lasso_member(b, w) == lasso_member(&c, w))
                .map(|w| format!("{} on {}", show(b), w.render(b.alphabet())))
        })
        .collect();
    ensure(failures.is_empty(), || {
        format!("{} failures, first: {}", failures.len(), failures[0])
    })?;
    Ok(format!("{} automata x {} lassos", automata.len(), lassos.len()))
}

fn check_refutation(a: Option<&BuchiAutomaton>, b: &BuchiAutomaton, v: &ContainmentVerdict) -> Result<(), String> {
    if let Some(w) = v.lasso() {
        let in_a = a.is_none_or(|a| lasso_member(a, w));
        ensure(in_a && !lasso_member(b, w), || {
            format!("bad witness {} for {}", w.render(b.alphabet()), show(b))
        })?;
    }
    Ok(())
}

fn engine_agreement() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed_0001);
    let universality: Vec<BuchiAutomaton> = (0..500)
        .map(|_| {
            let n = rng.random_range(1..=5);
            let d = rng.random_range(1..=3) as f64;
            random_automaton(&mut rng, n, 2, d, 0.5)
        })
        .collect();
    let explicit = RankOptions {
        subsumption: false,
        ..Default::default()
    };
    let universal = universality
        .par_iter()
        .map(|b| -> Result<bool, String> {
            let r = ramsey_universality(b).map_err(e2s)?;
            let k = rank_universality(b, &RankOptions::default()).map_err(e2s)?;
            let e = rank_universality(b, &explicit).map_err(e2s)?;
            ensure(r.holds() == k.holds() && k.holds() == e.holds(), || {
                format!("universality disagrees on {}", show(b))
            })?;
            for v in [&r, &k, &e] {
                check_refutation(None, b, v)?;
            }
            Ok(r.holds())
        })
        .collect::<Result<Vec<_>, _>>()?;

    let pairs: Vec<(BuchiAutomaton, BuchiAutomaton)> = (0..200)
        .map(|_| {
            let (n, m) = (rng.random_range(1..=4), rng.random_range(1..=4));
            (
                random_automaton_uniform(&mut rng, n, 2, 0.4),
                random_automaton_uniform(&mut rng, m, 2, 0.4),
            )
        })
        .collect();
    let contained = pairs
        .par_iter()
        .map(|(a, b)| -> Result<bool, String> {
            let d = dgs_containment(a, b).map_err(e2s)?;
            let k = rank_containment_with(a, b, &RankOptions::default()).map_err(e2s)?.verdict;
            ensure(d.holds() == k.holds(), || {
                format!("containment disagrees on {} vs {}", show(a), show(b))
            })?;
            check_refutation(Some(a), b, &d)?;
            check_refutation(Some(a), b, &k)?;
            Ok(d.holds())
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(format!(
        "500 universality ({} universal), 200 containment ({} contained)",
        universal.iter().filter(|&&u| u).count(),
        contained.iter().filter(|&&c| c).count()
    ))
}

fn corpus_sct() -> Vec<(String, SctProblem)> {
    let (problems, _) = load_corpus(&common::corpus_dir()).expect("corpus loads");
    problems
        .into_iter()
        .filter_map(|(n, p)| match p {
            BenchProblem::Sct(p) => Some((n, p)),
            BenchProblem::Universality(_) => None,
        })
        .collect()
}

fn random_problems(seed: u64, shape: &SctShape, count: usize) -> Vec<(String, SctProblem)> {
    let mut rng = StdRng::seed_from_u64(seed);
    (0..count)
        .map(|i| (format!("random-{i}"), random_sct(&mut rng, shape)))
        .collect()
}

fn sgs(p: &SctProblem, subsumption: bool) -> Result<ContainmentVerdict, String> {
    let opts = RamseyOptions {
        subsumption,
        preconditions_asserted: true,
        ..Default::default()
    };
    let flow = flow_automaton(p).map_err(e2s)?;
    let desc = desc_automaton_optimized(p).map_err(e2s)?;
    Ok(sgs_containment_with(&flow, &desc, &opts).map_err(e2s)?.verdict)
}

fn rank(p: &SctProblem, max_rank: Option<u32>) -> Result<ContainmentVerdict, String> {
    let opts = RankOptions {
        max_rank,
        ..Default::default()
    };
    let flow = flow_automaton(p).map_err(e2s)?;
    let desc = desc_automaton_optimized(p).map_err(e2s)?;
    Ok(rank_containment_with(&flow, &desc, &opts).map_err(e2s)?.verdict)
}

fn ljb(p: &SctProblem, subsumption: bool) -> Result<omega_sct::sct::SctVerdict, String> {
    let opts = LjbOptions {
        subsumption,
        ..Default::default()
    };
    ljb_check(p, &opts).map_err(e2s)
}

fn sct_witness_ok(p: &SctProblem, w: Option<&Lasso>) -> bool {
    w.is_none_or(|w| is_nontermination_witness(p, &w.cycle))
}

fn four_way() -> Outcome {
    let mut problems = corpus_sct();
    let fixtures = problems.len();
    problems.extend(random_problems(0x5eed_0003, &SctShape::default(), 100));
    let terminating = problems
        .par_iter()
        .map(|(name, p)| -> Result<bool, String> {
            let exact = ljb(p, false)?;
            let (s, k) = (sgs(p, true)?, rank(p, None)?);
            let verdicts = [
                exact.is_terminating(),
                ljb(p, true)?.is_terminating(),
                s.holds(),
                k.holds(),
                dense_closure(p).1,
            ];
            ensure(verdicts.iter().all(|&v| v == verdicts[0]), || {
                format!("{name}: verdicts {verdicts:?}")
            })?;
            let own = exact.lasso();
            let witnesses = [own.as_ref(), s.lasso(), k.lasso()];
            ensure(witnesses.into_iter().all(|w| sct_witness_ok(p, w)), || format!("{name}: bad witness"))?;
            Ok(verdicts[0])
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(format!(
        "{fixtures} fixtures + 100 random, {} terminating",
        terminating.iter().filter(|&&t| t).count()
    ))
}

fn running_examples() -> Outcome {
    let (fig3, _) = load_sct(&corpus_file("fig3.sct")).map_err(e2s)?;
    ensure(ljb(&fig3, false)?.is_terminating(), || "fig3 not terminating".into())?;
    let calls = call_index(&fig3);
    let g = fig3.function_id("g").ok_or("no g")?;
    let bc = scg_compose(fig3.scg(calls["b"]), fig3.scg(calls["c"])).map_err(e2s)?;
    let expected = ArcLabeledGraph::from_arcs(2, 2, [(0, Label::One, 0), (1, Label::Zero, 1)]).map_err(e2s)?;
    ensure(bc.source == g && bc.target == g && bc.graph == expected, || {
        format!("G_b;G_c = {:?}", bc.graph)
    })?;
    ensure(bc.graph.is_idempotent(), || "G_b;G_c not idempotent".into())?;
    ensure(bc.graph.arc(0, 0) == Some(Label::One), || "no y ->1 y".into())?;

    let fig1 = parse_ba(&corpus_file("fig1.ba")).map_err(e2s)?;
    for v in [
        ramsey_universality(&fig1).map_err(e2s)?,
        rank_universality(&fig1, &RankOptions::default()).map_err(e2s)?,
    ] {
        let w = v.lasso().ok_or("fig1 reported universal or without a lasso")?;
        ensure(!lasso_member(&fig1, w), || {
            format!("fig1 accepts its own counterexample {}", w.render(fig1.alphabet()))
        })?;
    }
    Ok("fig3 terminating, G_b;G_c = {y->1 y, z->0 z}, fig1 refuted".into())
}

/// Reverse-deterministic graphs between every pair of functions: each
/// target parameter has no arc or one of `2 * arity(source)` labelled arcs.
fn reverse_deterministic_bound(p: &SctProblem) -> usize {
    let ar: Vec<usize> = (0..p.functions().len()).map(|f| p.params(f).len()).collect();
    ar.iter()
        .map(|&s| ar.iter().map(|&t| (2 * s + 1).pow(t as u32)).sum::<usize>())
        .sum()
}

fn reverse_determinism() -> Outcome {
    let shape = SctShape {
        reverse_deterministic: true,
        ..Default::default()
    };
    let problems = random_problems(0x5eed_0005, &shape, 100);
    let largest = problems
        .par_iter()
        .map(|(name, p)| -> Result<usize, String> {
            ensure(sct_is_reverse_deterministic(p), || format!("{name}: generator broke reverse determinism"))?;
            let closure = scg_closure(p, false).map_err(e2s)?;
            ensure(closure.iter().all(|g| g.is_reverse_deterministic()), || {
                format!("{name}: closure element with in-degree > 1")
            })?;
            ensure(closure.len() <= reverse_deterministic_bound(p), || {
                format!("{name}: closure size {} exceeds bound", closure.len())
            })?;
            let n = desc_automaton_optimized(p).map_err(e2s)?.num_states() as u32;
            let two = rank(p, Some(2))?.holds();
            let full = rank(p, Some((2 * n).saturating_sub(2).max(1)))?.holds();
            ensure(two == full, || format!("{name}: rank 2 says {two}, rank 2n-2 says {full}"))?;
            ensure(two == ljb(p, false)?.is_terminating(), || format!("{name}: rank disagrees with closure"))?;
            Ok(closure.len())
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(format!("100 problems, largest closure {}", largest.iter().max().unwrap_or(&0)))
}

fn parse_work(csv_bytes: &[u8]) -> Result<Vec<(String, String, usize)>, String> {
    let mut reader = csv::Reader::from_reader(csv_bytes);
    let headers = reader.headers().map_err(e2s)?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name).ok_or(format!("no {name} column"));
    let (p, e, w) = (col("problem")?, col("engine")?, col("work")?);
    reader
        .records()
        .map(|r| {
            let r = r.map_err(e2s)?;
            Ok((r[p].to_string(), r[e].to_string(), r[w].parse().map_err(e2s)?))
        })
        .collect()
}

fn subsumption_safety() -> Outcome {
    let fixtures = corpus_sct();
    let mut problems = fixtures.clone();
    problems.extend(random_problems(0x5eed_0003, &SctShape::default(), 100));
    let shape = SctShape {
        reverse_deterministic: true,
        ..Default::default()
    };
    problems.extend(random_problems(0x5eed_0005, &shape, 100));
    problems
        .par_iter()
        .map(|(name, p)| -> Result<(), String> {
            let (a, b) = (ljb(p, false)?.is_terminating(), ljb(p, true)?.is_terminating());
            let (c, d) = (sgs(p, false)?.holds(), sgs(p, true)?.holds());
            ensure(a == b && c == d && a == c, || format!("{name}: {a} {b} {c} {d}"))
        })
        .collect::<Result<Vec<_>, _>>()?;

    let records: Vec<BenchRecord> = fixtures
        .iter()
        .flat_map(|(name, p)| {
            let p = BenchProblem::Sct(p.clone());
            [Engine::LjbExact, Engine::LjbSubsume]
                .map(|e| run_cell(name, &p, e, Duration::from_secs(60)))
        })
        .collect();
    let mut buf = Vec::new();
    write_csv(&records, &mut buf).map_err(e2s)?;
    let work = parse_work(&buf)?;
    let reduced: Vec<String> = work
        .chunks(2)
        .filter(|c| c[0].1 == "ljb-exact" && c[1].1 == "ljb-subsume" && c[1].2 < c[0].2)
        .map(|c| format!("{} {}->{}", c[0].0, c[0].2, c[1].2))
        .collect();
    ensure(!reduced.is_empty(), || "no fixture shrinks under subsumption".into())?;
    Ok(format!("{} problems agree; reduced: {}", problems.len(), reduced.join(", ")))
}

fn permutation_trend() -> Outcome {
    let mut rows = Vec::new();
    for n in 2..=6 {
        let p = BenchProblem::Sct(permutation_gadget(n));
        let name = format!("perm{n}");
        let r = run_cell(&name, &p, Engine::RamseySgs, Duration::from_secs(60));
        let k = run_cell(&name, &p, Engine::Rank, Duration::from_secs(60));
        ensure(r.timeout || !k.timeout, || format!("{name}: rank timed out where Ramsey finished"))?;
        ensure(r.timeout || r.verdict == k.verdict, || format!("{name}: {} vs {}", r.verdict, k.verdict))?;
        if r.timeout {
            break;
        }
        rows.push((r.work, k.work));
    }
    ensure(rows.len() >= 3, || format!("Ramsey finished only {} sizes", rows.len()))?;
    for w in rows.windows(2) {
        let (dr, dk) = (w[1].0 as i64 - w[0].0 as i64, w[1].1 as i64 - w[0].1 as i64);
        ensure(dr > 0 && dr > dk, || format!("work steps Ramsey {dr}, rank {dk}"))?;
    }
    let fmt = |f: fn(&(usize, usize)) -> usize| rows.iter().map(f).map(|w| w.to_string()).collect::<Vec<_>>().join(" ");
    Ok(format!("Ramsey work {}; rank work {}", fmt(|r| r.0), fmt(|r| r.1)))
}

fn main() {
    // sanity check of the oracles before trusting them
    assert_eq!(dense_closure(&permutation_gadget(2)).0.len(), 8);

    let criteria: [Criterion; 7] = [
        ("complement correctness, all automata with |Q| <= 2", complement_exhaustive),
        ("engine agreement on random automata", engine_agreement),
        ("four-way SCT agreement", four_way),
        ("running examples", running_examples),
        ("reverse-deterministic problems", reverse_determinism),
        ("subsumption safety", subsumption_safety),
        ("permutation gadget work trend", permutation_trend),
    ];
    let mut failed = 0;
    for (i, (title, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {} {title} ({detail}) [{secs:.1}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {} {title}: {detail} [{secs:.1}s]", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
