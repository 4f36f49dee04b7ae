//! Büchi containment and size-change termination.
//!
//! Two independent families of decision procedures live side by side so that
//! every verdict can be cross-checked: Ramsey-based closure over arc-labeled
//! graphs, and rank-based complementation with an antichain fixpoint.

pub mod automaton;
pub mod deadline;
pub mod error;
pub mod graph;
pub(crate) mod scc;

pub use automaton::{accepts_lasso, intersect, is_empty, BuchiAutomaton, Emptiness, Lasso};
pub use deadline::Deadline;
pub use error::{Error, Result};
pub use graph::{ArcLabeledGraph, Label};
pub mod closure;
pub mod ramsey;
pub mod rank;
pub mod sct;
pub mod mcs;
pub mod formats;
pub mod generate;
pub mod bench;
pub mod cli;
