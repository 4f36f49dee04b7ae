//! Engine comparison over a directory of problems, with CSV output.

use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::automaton::BuchiAutomaton;
use crate::deadline::Deadline;
use crate::error::{Error, Result};
use crate::formats::{load_sct, parse_ba, parse_mcs};
use crate::mcs::{mcs_to_sct, ImpliedArcs};
use crate::ramsey::{dgs_containment_with, ramsey_universality_with, sgs_containment_with, RamseyOptions};
use crate::rank::{rank_containment_with, rank_universality_with, RankOptions};
use crate::sct::{
    desc_automaton, desc_automaton_optimized, flow_automaton, ljb_check_with,
    sct_is_reverse_deterministic, LjbOptions, SctProblem,
};

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(60);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Engine {
    LjbExact,
    LjbSubsume,
    RamseyDgs,
    RamseySgs,
    Rank,
    /// Rank search with bound 2; only run on reverse-deterministic input.
    RankR2,
}

impl Engine {
    pub const ALL: [Engine; 6] = [
        Engine::LjbExact,
        Engine::LjbSubsume,
        Engine::RamseyDgs,
        Engine::RamseySgs,
        Engine::Rank,
        Engine::RankR2,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Engine::LjbExact => "ljb-exact",
            Engine::LjbSubsume => "ljb-subsume",
            Engine::RamseyDgs => "ramsey-dgs",
            Engine::RamseySgs => "ramsey-sgs",
            Engine::Rank => "rank",
            Engine::RankR2 => "rank-r2",
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Engine::ALL
            .into_iter()
            .find(|e| e.id() == s)
            .ok_or_else(|| Error::Malformed(format!("unknown engine `{s}`")))
    }
}

#[derive(Clone, Debug)]
pub enum BenchProblem {
    /// Termination of an SCT problem (`.sct`, or `.mcs` after projection).
    Sct(SctProblem),
    /// Universality of a Büchi automaton (`.ba`).
    Universality(BuchiAutomaton),
}

impl BenchProblem {
    pub fn engines(&self) -> Vec<Engine> {
        match self {
            BenchProblem::Sct(_) => Engine::ALL.to_vec(),
            BenchProblem::Universality(_) => vec![Engine::RamseyDgs, Engine::Rank, Engine::RankR2],
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRecord {
    pub problem: String,
    pub engine: Engine,
    /// `holds`, `refuted`, `skipped`, `error` or empty on timeout.
    pub verdict: String,
    pub time_ms: f64,
    /// Closure size for Ramsey engines, antichain elements for rank.
    pub work: usize,
    pub timeout: bool,
}

pub type Corpus = Vec<(String, BenchProblem)>;

/// Loads every `.sct`, `.mcs` and `.ba` file in `dir`, sorted by name.
/// Returns the problems and loader warnings.
pub fn load_corpus(dir: &Path) -> Result<(Corpus, Vec<String>)> {
    let mut entries: Vec<_> = std::fs::read_dir(dir)
        .map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file())
        .collect();
    entries.sort();
    let mut out = Vec::new();
    let mut warnings = Vec::new();
    for path in entries {
        let Some(ext) = path.extension().and_then(|e| e.to_str()) else {
            continue;
        };
        let name = path.file_name().unwrap().to_string_lossy().into_owned();
        let text = std::fs::read_to_string(&path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let with_name = |e: Error| Error::Malformed(format!("{name}: {e}"));
        let problem = match ext {
            "sct" => {
                let (p, w) = load_sct(&text).map_err(with_name)?;
                warnings.extend(w.into_iter().map(|w| format!("{name}: {w}")));
                BenchProblem::Sct(p)
            }
            "mcs" => {
                let m = parse_mcs(&text).map_err(with_name)?;
                let proj = mcs_to_sct(&m, ImpliedArcs::Full).map_err(with_name)?;
                warnings.extend(proj.warnings.into_iter().map(|w| format!("{name}: {w}")));
                BenchProblem::Sct(proj.problem)
            }
            "ba" => BenchProblem::Universality(parse_ba(&text).map_err(with_name)?),
            _ => continue,
        };
        out.push((name, problem));
    }
    Ok((out, warnings))
}

enum CellOutcome {
    Verdict(bool, usize),
    Skipped,
}

fn run_engine(problem: &BenchProblem, engine: Engine, deadline: Deadline) -> Result<CellOutcome> {
    use CellOutcome::*;
    let ramsey = RamseyOptions {
        deadline,
        witnesses: false,
        ..Default::default()
    };
    let rank = RankOptions {
        deadline,
        witnesses: false,
        ..Default::default()
    };
    match problem {
        BenchProblem::Sct(p) => {
            let flow = || flow_automaton(p);
            Ok(match engine {
                Engine::LjbExact | Engine::LjbSubsume => {
                    let r = ljb_check_with(
                        p,
                        &LjbOptions {
                            subsumption: engine == Engine::LjbSubsume,
                            witnesses: false,
                            deadline,
                        },
                    )?;
                    Verdict(r.verdict.is_terminating(), r.stats.final_size)
                }
                Engine::RamseyDgs => {
                    let r = dgs_containment_with(&flow()?, &desc_automaton(p)?, &ramsey)?;
                    Verdict(r.verdict.holds(), r.stats.final_size)
                }
                Engine::RamseySgs => {
                    let opts = RamseyOptions {
                        subsumption: true,
                        preconditions_asserted: true,
                        ..ramsey
                    };
                    let r = sgs_containment_with(&flow()?, &desc_automaton_optimized(p)?, &opts)?;
                    Verdict(r.verdict.holds(), r.stats.final_size)
                }
                Engine::Rank => {
                    let r = rank_containment_with(&flow()?, &desc_automaton_optimized(p)?, &rank)?;
                    Verdict(r.verdict.holds(), r.stats.explored)
                }
                Engine::RankR2 => {
                    if !sct_is_reverse_deterministic(p) {
                        return Ok(Skipped);
                    }
                    let opts = RankOptions {
                        max_rank: Some(2),
                        ..rank
                    };
                    let r = rank_containment_with(&flow()?, &desc_automaton_optimized(p)?, &opts)?;
                    Verdict(r.verdict.holds(), r.stats.explored)
                }
            })
        }
        BenchProblem::Universality(b) => Ok(match engine {
            Engine::RamseyDgs => {
                let r = ramsey_universality_with(b, &ramsey)?;
                Verdict(r.verdict.holds(), r.stats.final_size)
            }
            Engine::Rank => {
                let r = rank_universality_with(b, &rank)?;
                Verdict(r.verdict.holds(), r.stats.explored)
            }
            Engine::RankR2 if b.is_reverse_deterministic() => {
                let opts = RankOptions {
                    max_rank: Some(2),
                    ..rank
                };
                let r = rank_universality_with(b, &opts)?;
                Verdict(r.verdict.holds(), r.stats.explored)
            }
            _ => Skipped,
        }),
    }
}

/// Runs one (problem, engine) cell.
pub fn run_cell(name: &str, problem: &BenchProblem, engine: Engine, timeout: Duration) -> BenchRecord {
    let start = Instant::now();
    let result = run_engine(problem, engine, Deadline::after(timeout));
    let time_ms = start.elapsed().as_secs_f64() * 1e3;
    let (verdict, work, timeout) = match result {
        Ok(CellOutcome::Verdict(holds, work)) => {
            ((if holds { "holds" } else { "refuted" }).to_string(), work, false)
        }
        Ok(CellOutcome::Skipped) => ("skipped".to_string(), 0, false),
        Err(Error::Timeout) => (String::new(), 0, true),
        Err(e) => (format!("error: {e}"), 0, false),
    };
    BenchRecord {
        problem: name.to_string(),
        engine,
        verdict,
        time_ms,
        work,
        timeout,
    }
}

/// Runs every applicable engine on every problem, `jobs` cells at a time.
/// Records come back in (problem, engine) order.
pub fn run_bench(
    problems: &[(String, BenchProblem)],
    timeout: Duration,
    jobs: Option<usize>,
) -> Result<Vec<BenchRecord>> {
    let cells: Vec<(&str, &BenchProblem, Engine)> = problems
        .iter()
        .flat_map(|(n, p)| p.engines().into_iter().map(move |e| (n.as_str(), p, e)))
        .collect();
    let run = || {
        cells
            .par_iter()
            .map(|&(n, p, e)| run_cell(n, p, e, timeout))
            .collect::<Vec<_>>()
    };
    match jobs {
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build()
            .map_err(|e| Error::Io(format!("thread pool: {e}")))
            .map(|pool| pool.install(run)),
        None => Ok(run()),
    }
}

/// Problems whose non-timeout, non-skipped verdicts disagree.
pub fn disagreements(records: &[BenchRecord]) -> Vec<String> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < records.len() {
        let j = records[i..]
            .iter()
            .position(|r| r.problem != records[i].problem)
            .map_or(records.len(), |k| i + k);
        let mut seen: Vec<&str> = records[i..j]
            .iter()
            .filter(|r| r.verdict == "holds" || r.verdict == "refuted")
            .map(|r| r.verdict.as_str())
            .collect();
        seen.dedup();
        if seen.len() > 1 {
            out.push(records[i].problem.clone());
        }
        i = j;
    }
    out
}

pub const CSV_HEADER: [&str; 6] = ["problem", "engine", "verdict", "time_ms", "work", "timeout"];

pub fn write_csv<W: Write>(records: &[BenchRecord], w: W) -> Result<()> {
    let io = |e: csv::Error| Error::Io(format!("csv: {e}"));
    let mut out = csv::Writer::from_writer(w);
    out.write_record(CSV_HEADER).map_err(io)?;
    for r in records {
        out.write_record([
            r.problem.clone(),
            r.engine.id().to_string(),
            r.verdict.clone(),
            format!("{:.3}", r.time_ms),
            r.work.to_string(),
            r.timeout.to_string(),
        ])
        .map_err(io)?;
    }
    out.flush().map_err(|e| Error::Io(format!("csv: {e}")))
}
