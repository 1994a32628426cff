//! Canonical n-theories of labeled chains and their composition.
//!
//! A [`TheoryEngine`] computes `Th^n` of finite words directly, composes
//! theories under ordered sum and ω-power, and decides formulas of depth at
//! most `n` from a theory alone.

mod census;
mod decide;
mod engine;
mod pretty;
mod sequence;
mod store;
mod tower;

pub use census::{candidate_wellformed, CensusEntry, HfValue, Provenance, TheoryCensus};
pub use decide::ColumnMap;
pub use engine::{TheoryEngine, TheoryHandle};
pub use sequence::{formal_shuffle, parse_literal, UPSequence, UpIndexSet, UpSequence};
pub use store::{BasePattern, Node, NodeId, Rel, TheoryStore};
pub use tower::{Side, SideSplit, ThTower};
