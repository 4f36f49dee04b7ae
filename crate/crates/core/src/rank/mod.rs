//! Rank-based complementation and the containment checks built on it.

mod antichain;
mod complement;
mod ranking;

pub use antichain::AntichainStats;
pub use complement::{kv_complement, kv_complement_with};

use complement::ExplicitProduct;
pub use ranking::{covers, default_rank_bound, KvState, LevelRanking, BOT, MAX_RANK_LIMIT, MAX_STATES};

use crate::automaton::BuchiAutomaton;
use crate::deadline::Deadline;
use crate::error::Result;
use crate::ramsey::ContainmentVerdict;

use ranking::{check_rank, check_states};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RankOptions {
    /// Defaults to [`default_rank_bound`] of the complemented automaton.
    pub max_rank: Option<u32>,
    /// Antichain fixpoint when set; explicit complement plus forward
    /// emptiness otherwise.
    pub subsumption: bool,
    pub witnesses: bool,
    pub deadline: Deadline,
}

impl Default for RankOptions {
    fn default() -> Self {
        RankOptions {
            max_rank: None,
            subsumption: true,
            witnesses: true,
            deadline: Deadline::NONE,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RankStats {
    pub max_rank: u32,
    /// Antichain elements generated, or explicit states built.
    pub explored: usize,
    pub antichain: Option<AntichainStats>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankReport {
    pub verdict: ContainmentVerdict,
    pub stats: RankStats,
}

/// Universality of `b`: holds iff the complement is empty.
pub fn rank_universality(b: &BuchiAutomaton, opts: &RankOptions) -> Result<ContainmentVerdict> {
    Ok(rank_universality_with(b, opts)?.verdict)
}

pub fn rank_universality_with(b: &BuchiAutomaton, opts: &RankOptions) -> Result<RankReport> {
    let u = BuchiAutomaton::universal(b.alphabet())?;
    rank_containment_with(&u, b, opts)
}

/// `L(a) ⊆ L(b)` iff `a` intersected with the complement of `b` is empty.
pub fn rank_containment(
    a: &BuchiAutomaton,
    b: &BuchiAutomaton,
    opts: &RankOptions,
) -> Result<ContainmentVerdict> {
    Ok(rank_containment_with(a, b, opts)?.verdict)
}

pub fn rank_containment_with(
    a: &BuchiAutomaton,
    b: &BuchiAutomaton,
    opts: &RankOptions,
) -> Result<RankReport> {
    a.same_alphabet(b)?;
    check_states(b)?;
    let r = opts.max_rank.unwrap_or_else(|| default_rank_bound(b));
    let r8 = check_rank(r as i64)?;
    if !opts.subsumption {
        let product = ExplicitProduct::build(a, b, r8, opts.deadline)?;
        let explored = product.len();
        return Ok(RankReport {
            verdict: match product.find_lasso() {
                None => ContainmentVerdict::Contained,
                Some(l) => ContainmentVerdict::NotContained {
                    pair: None,
                    lasso: opts.witnesses.then_some(l),
                },
            },
            stats: RankStats {
                max_rank: r,
                explored,
                antichain: None,
            },
        });
    }
    let f_in: Vec<u8> = (0..b.num_states())
        .map(|q| if b.is_initial(q) { r8 } else { BOT })
        .collect();
    let initial_a: Vec<usize> = a.initial().ones().collect();
    let outcome = antichain::Product::new(a, b, r8).solve(
        &f_in,
        &initial_a,
        opts.deadline,
        opts.witnesses,
    )?;
    let verdict = if outcome.nonempty {
        ContainmentVerdict::NotContained {
            pair: None,
            lasso: outcome.lasso,
        }
    } else {
        ContainmentVerdict::Contained
    };
    Ok(RankReport {
        verdict,
        stats: RankStats {
            max_rank: r,
            explored: outcome.stats.elements,
            antichain: Some(outcome.stats),
        },
    })
}
