use std::fmt;

use crate::automaton::{BuchiAutomaton, SymbolId};
use crate::error::{Error, Result};

/// Sentinel for an unranked state. Sorts above every real rank.
pub const BOT: u8 = u8::MAX;

/// Largest supported rank bound.
pub const MAX_RANK_LIMIT: u32 = (BOT - 1) as u32;

/// Largest supported state count (obligations are one machine word).
pub const MAX_STATES: usize = 64;

pub(crate) fn check_rank(max_rank: i64) -> Result<u8> {
    if (0..=MAX_RANK_LIMIT as i64).contains(&max_rank) {
        Ok(max_rank as u8)
    } else {
        Err(Error::InvalidRank(max_rank))
    }
}

pub(crate) fn check_states(b: &BuchiAutomaton) -> Result<()> {
    if b.num_states() > MAX_STATES {
        return Err(Error::TooLarge {
            what: "complemented automaton",
            size: b.num_states(),
            limit: MAX_STATES,
        });
    }
    Ok(())
}

/// `2` for reverse-deterministic automata, `max(2|Q| - 2, 1)` otherwise.
///
/// A single non-accepting state still needs the odd rank 1, so the bound
/// never drops to 0.
pub fn default_rank_bound(b: &BuchiAutomaton) -> u32 {
    if b.is_reverse_deterministic() {
        2
    } else {
        (2 * b.num_states()).saturating_sub(2).max(1) as u32
    }
}

/// A map from states to `{0..maxRank} ∪ {⊥}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LevelRanking(pub(crate) Vec<u8>);

impl LevelRanking {
    pub fn from_ranks(ranks: &[Option<u32>]) -> Result<Self> {
        ranks
            .iter()
            .map(|r| match r {
                None => Ok(BOT),
                Some(v) => check_rank(*v as i64),
            })
            .collect::<Result<Vec<u8>>>()
            .map(LevelRanking)
    }

    pub fn get(&self, q: usize) -> Option<u32> {
        match self.0[q] {
            BOT => None,
            v => Some(v as u32),
        }
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Accepting states are even or `⊥`, and no rank exceeds `max_rank`.
    pub fn is_valid_for(&self, b: &BuchiAutomaton, max_rank: u32) -> bool {
        self.0.len() == b.num_states()
            && self.0.iter().enumerate().all(|(q, &v)| {
                v == BOT || (v as u32 <= max_rank && (v % 2 == 0 || !b.is_accepting(q)))
            })
    }
}


impl fmt::Debug for LevelRanking {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_ranks(&self.0))
    }
}

pub(crate) fn render_ranks(f: &[u8]) -> String {
    f.iter()
        .map(|&v| if v == BOT { "_".to_string() } else { v.to_string() })
        .collect::<Vec<_>>()
        .join(",")
}

/// A state `<f, o>` of the rank-based complement.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct KvState {
    pub ranking: LevelRanking,
    /// Bit `q` set when `q` is in the obligation set.
    pub obligation: u64,
}

impl KvState {
    pub fn name(&self) -> String {
        let o: Vec<String> = (0..64)
            .filter(|q| self.obligation >> q & 1 == 1)
            .map(|q| q.to_string())
            .collect();
        format!("<{}|{}>", render_ranks(&self.ranking.0), o.join(","))
    }
}

/// `f` covers `f'` under `σ`: no transition on `σ` leaves a ranked state
/// for an unranked one or increases the rank.
pub fn covers(
    f: &LevelRanking,
    f2: &LevelRanking,
    sigma: SymbolId,
    b: &BuchiAutomaton,
) -> Result<bool> {
    if sigma >= b.num_symbols() {
        return Err(Error::UnknownSymbol(format!("#{sigma}")));
    }
    if f.len() != b.num_states() || f2.len() != b.num_states() {
        return Err(Error::Precondition(
            "rankings must range over the automaton's states".into(),
        ));
    }
    for q in 0..b.num_states() {
        let r = f.0[q];
        if r == BOT {
            continue;
        }
        for q2 in b.successors(q, sigma).ones() {
            let r2 = f2.0[q2];
            if r2 == BOT || r2 > r {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
