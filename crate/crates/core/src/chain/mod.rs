//! Finite labeled chains, chain expressions, the brute-force oracle and
//! block shuffling of set tuples.

mod expr;
mod oracle;
mod shuffle;
mod word;

pub use expr::{parse_chain_expr, ChainExpr};
pub use oracle::{oracle_eval, oracle_eval_core, point_atomic_type, AtomicType, Assignment};
pub use shuffle::{shuffle_sets, CutPartition, IndexSet, Segment};
pub use word::{Letter, PosSet, Word};
