//! Command-line front end. Exit status: 0 when the property holds, 1 when it
//! is refuted, 2 on any error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};

use crate::automaton::{BuchiAutomaton, Lasso};
use crate::bench::{disagreements, load_corpus, run_bench, write_csv};
use crate::error::{Error, Result};
use crate::formats::{
    has_suffix_closed_stamp, load_sct, parse_ba, parse_mcs, render_ba, render_sct,
    SUFFIX_CLOSED_STAMP,
};
use crate::mcs::{mcs_to_sct, ImpliedArcs};
use crate::ramsey::{
    dgs_containment_with, ramsey_universality_with, sgs_containment_with, ContainmentVerdict,
    RamseyOptions,
};
use crate::rank::{
    default_rank_bound, kv_complement, rank_containment_with, rank_universality_with, RankOptions,
};
use crate::sct::{
    desc_automaton, desc_automaton_optimized, flow_automaton, ljb_check_with, render_calls,
    sct_is_reverse_deterministic, LjbOptions, SctProblem, SctVerdict,
};

#[derive(Parser, Debug)]
#[command(name = "omega-sct", version, about = "Büchi containment and size-change termination")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Size-change termination problems.
    Sct {
        #[command(subcommand)]
        cmd: SctCmd,
    },
    /// Büchi automata.
    Buchi {
        #[command(subcommand)]
        cmd: BuchiCmd,
    },
    /// Monotonicity constraint systems.
    Mcs {
        #[command(subcommand)]
        cmd: McsCmd,
    },
    /// Run every engine on every problem in a directory.
    Bench {
        dir: PathBuf,
        #[arg(long)]
        csv: PathBuf,
        #[arg(long, default_value_t = 60_000)]
        timeout_ms: u64,
        #[arg(long)]
        jobs: Option<usize>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SctEngine {
    Ljb,
    Dgs,
    Sgs,
    Rank,
}

#[derive(Subcommand, Debug)]
enum SctCmd {
    /// Decide size-change termination.
    Check {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "ljb")]
        engine: SctEngine,
        #[arg(long)]
        no_subsumption: bool,
        #[arg(long)]
        witness: bool,
        /// Rank bound for `--engine rank`; 2 by default on
        /// reverse-deterministic problems.
        #[arg(long)]
        max_rank: Option<u32>,
    },
    /// Write the flow and descent automata.
    Reduce {
        file: PathBuf,
        #[arg(long)]
        out_flow: PathBuf,
        #[arg(long)]
        out_desc: PathBuf,
        /// Position-based descent automaton.
        #[arg(long)]
        optimized: bool,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum UnivEngine {
    Ramsey,
    Rank,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ContainEngine {
    Dgs,
    Sgs,
    Rank,
}

#[derive(Subcommand, Debug)]
enum BuchiCmd {
    /// Decide universality.
    Universal {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "ramsey")]
        engine: UnivEngine,
        #[arg(long)]
        max_rank: Option<u32>,
        #[arg(long)]
        no_subsumption: bool,
        #[arg(long)]
        witness: bool,
    },
    /// Decide `L(A) ⊆ L(B)`.
    Contains {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, value_enum, default_value = "dgs")]
        engine: ContainEngine,
        /// Vouch for the single-graph search preconditions.
        #[arg(long)]
        assert_suffix_closed: bool,
        #[arg(long)]
        max_rank: Option<u32>,
        #[arg(long)]
        no_subsumption: bool,
        #[arg(long)]
        witness: bool,
    },
    /// Print the rank-based complement.
    Complement {
        file: PathBuf,
        #[arg(long)]
        max_rank: Option<u32>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Implied {
    None,
    Equality,
    Full,
}

#[derive(Subcommand, Debug)]
enum McsCmd {
    /// Project to an SCT problem and print it.
    Project {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "full")]
        implied: Implied,
    },
}

/// Runs the CLI on `args` (including the program name).
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    match dispatch(cli.cmd, out, err) {
        Ok(holds) => i32::from(!holds),
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn io(e: std::io::Error) -> Error {
    Error::Io(e.to_string())
}

fn dispatch(cmd: Cmd, out: &mut dyn Write, err: &mut dyn Write) -> Result<bool> {
    match cmd {
        Cmd::Sct { cmd } => sct(cmd, out, err),
        Cmd::Buchi { cmd } => buchi(cmd, out),
        Cmd::Mcs {
            cmd: McsCmd::Project { file, implied },
        } => {
            let m = parse_mcs(&read(&file)?)?;
            let mode = match implied {
                Implied::None => ImpliedArcs::None,
                Implied::Equality => ImpliedArcs::EqualityOnly,
                Implied::Full => ImpliedArcs::Full,
            };
            let proj = mcs_to_sct(&m, mode)?;
            for w in &proj.warnings {
                writeln!(err, "warning: {w}").map_err(io)?;
            }
            write!(out, "{}", render_sct(&proj.problem)).map_err(io)?;
            Ok(true)
        }
        Cmd::Bench {
            dir,
            csv,
            timeout_ms,
            jobs,
        } => {
            let (problems, warnings) = load_corpus(&dir)?;
            for w in &warnings {
                writeln!(err, "warning: {w}").map_err(io)?;
            }
            let records = run_bench(&problems, Duration::from_millis(timeout_ms), jobs)?;
            let file = std::fs::File::create(&csv)
                .map_err(|e| Error::Io(format!("{}: {e}", csv.display())))?;
            write_csv(&records, file)?;
            let bad = disagreements(&records);
            writeln!(
                out,
                "{} problems, {} cells, {} timeouts",
                problems.len(),
                records.len(),
                records.iter().filter(|r| r.timeout).count()
            )
            .map_err(io)?;
            for p in &bad {
                writeln!(err, "engines disagree on {p}").map_err(io)?;
            }
            Ok(bad.is_empty())
        }
    }
}

fn sct(cmd: SctCmd, out: &mut dyn Write, err: &mut dyn Write) -> Result<bool> {
    match cmd {
        SctCmd::Check {
            file,
            engine,
            no_subsumption,
            witness,
            max_rank,
        } => {
            let (p, warnings) = load_sct(&read(&file)?)?;
            for w in &warnings {
                writeln!(err, "warning: {w}").map_err(io)?;
            }
            let (holds, lasso) = check_sct(&p, engine, !no_subsumption, max_rank, witness, out)?;
            writeln!(out, "{}", if holds { "Terminating" } else { "NotTerminating" }).map_err(io)?;
            if let (true, Some(l)) = (witness, lasso) {
                writeln!(out, "witness: ({})^ω", render_calls(&p, &l.cycle)).map_err(io)?;
            }
            Ok(holds)
        }
        SctCmd::Reduce {
            file,
            out_flow,
            out_desc,
            optimized,
        } => {
            let (p, warnings) = load_sct(&read(&file)?)?;
            for w in &warnings {
                writeln!(err, "warning: {w}").map_err(io)?;
            }
            let desc = if optimized {
                desc_automaton_optimized(&p)?
            } else {
                desc_automaton(&p)?
            };
            write_file(&out_flow, &stamped(&flow_automaton(&p)?))?;
            write_file(&out_desc, &stamped(&desc))?;
            Ok(true)
        }
    }
}

fn stamped(b: &BuchiAutomaton) -> String {
    format!("{SUFFIX_CLOSED_STAMP}\n{}", render_ba(b))
}

fn check_sct(
    p: &SctProblem,
    engine: SctEngine,
    subsumption: bool,
    max_rank: Option<u32>,
    witness: bool,
    out: &mut dyn Write,
) -> Result<(bool, Option<Lasso>)> {
    match engine {
        SctEngine::Ljb => {
            let r = ljb_check_with(
                p,
                &LjbOptions {
                    subsumption,
                    witnesses: witness,
                    ..Default::default()
                },
            )?;
            if let (true, SctVerdict::NotTerminating { graph, .. }) = (witness, &r.verdict) {
                writeln!(
                    out,
                    "counterexample graph {} -> {}: {:?}",
                    p.functions()[graph.source],
                    p.functions()[graph.target],
                    graph.graph
                )
                .map_err(io)?;
            }
            Ok((r.verdict.is_terminating(), r.verdict.lasso()))
        }
        SctEngine::Dgs | SctEngine::Sgs => {
            let flow = flow_automaton(p)?;
            let opts = RamseyOptions {
                subsumption,
                witnesses: witness,
                preconditions_asserted: true,
                ..Default::default()
            };
            let r = if matches!(engine, SctEngine::Dgs) {
                dgs_containment_with(&flow, &desc_automaton(p)?, &opts)?
            } else {
                sgs_containment_with(&flow, &desc_automaton_optimized(p)?, &opts)?
            };
            Ok(split(r.verdict))
        }
        SctEngine::Rank => {
            let max_rank = max_rank.or(sct_is_reverse_deterministic(p).then_some(2));
            let r = rank_containment_with(
                &flow_automaton(p)?,
                &desc_automaton_optimized(p)?,
                &RankOptions {
                    max_rank,
                    subsumption,
                    witnesses: witness,
                    ..Default::default()
                },
            )?;
            Ok(split(r.verdict))
        }
    }
}

fn split(v: ContainmentVerdict) -> (bool, Option<Lasso>) {
    let lasso = v.lasso().cloned();
    (v.holds(), lasso)
}

fn buchi(cmd: BuchiCmd, out: &mut dyn Write) -> Result<bool> {
    match cmd {
        BuchiCmd::Universal {
            file,
            engine,
            max_rank,
            no_subsumption,
            witness,
        } => {
            let b = parse_ba(&read(&file)?)?;
            let v = match engine {
                UnivEngine::Ramsey => {
                    let opts = RamseyOptions {
                        witnesses: witness,
                        ..Default::default()
                    };
                    ramsey_universality_with(&b, &opts)?.verdict
                }
                UnivEngine::Rank => {
                    let opts = RankOptions {
                        max_rank,
                        subsumption: !no_subsumption,
                        witnesses: witness,
                        ..Default::default()
                    };
                    rank_universality_with(&b, &opts)?.verdict
                }
            };
            report(&b, &v, "Universal", "NotUniversal", witness, out)
        }
        BuchiCmd::Contains {
            a,
            b,
            engine,
            assert_suffix_closed,
            max_rank,
            no_subsumption,
            witness,
        } => {
            let (ta, tb) = (read(&a)?, read(&b)?);
            let (fa, fb) = (parse_ba(&ta)?, parse_ba(&tb)?);
            let v = match engine {
                ContainEngine::Dgs => {
                    let opts = RamseyOptions {
                        witnesses: witness,
                        ..Default::default()
                    };
                    dgs_containment_with(&fa, &fb, &opts)?.verdict
                }
                ContainEngine::Sgs => {
                    let stamped = has_suffix_closed_stamp(&ta) && has_suffix_closed_stamp(&tb);
                    let opts = RamseyOptions {
                        subsumption: !no_subsumption,
                        preconditions_asserted: assert_suffix_closed || stamped,
                        witnesses: witness,
                        ..Default::default()
                    };
                    sgs_containment_with(&fa, &fb, &opts)?.verdict
                }
                ContainEngine::Rank => {
                    let opts = RankOptions {
                        max_rank,
                        subsumption: !no_subsumption,
                        witnesses: witness,
                        ..Default::default()
                    };
                    rank_containment_with(&fa, &fb, &opts)?.verdict
                }
            };
            report(&fa, &v, "Contained", "NotContained", witness, out)
        }
        BuchiCmd::Complement { file, max_rank } => {
            let b = parse_ba(&read(&file)?)?;
            let r = max_rank.unwrap_or_else(|| default_rank_bound(&b));
            write!(out, "{}", render_ba(&kv_complement(&b, r as i64)?)).map_err(io)?;
            Ok(true)
        }
    }
}

fn report(
    b: &BuchiAutomaton,
    v: &ContainmentVerdict,
    yes: &str,
    no: &str,
    witness: bool,
    out: &mut dyn Write,
) -> Result<bool> {
    writeln!(out, "{}", if v.holds() { yes } else { no }).map_err(io)?;
    if let (true, Some(l)) = (witness, v.lasso()) {
        writeln!(out, "witness: {}", l.render(b.alphabet())).map_err(io)?;
    }
    Ok(v.holds())
}
