//! First-order interpretations of finite structures inside labeled chains.
//!
//! An [`Interpretation`] defines a structure whose elements are tuples of
//! position sets. On a finite word the structure is computed by brute force
//! and, when the word respects the interpretation, collapsed into a
//! [`QuotientModel`].

mod interpretation;
mod model;
mod target;

pub use interpretation::{parse_interp, x_var, y_var, Arity, Interpretation, RelationDef};
pub use model::{
    all_tuples, bouquet_size, image, model_check_fo, respects, show_tuple, QuotientModel, Relation,
    RespectFailure, Structure, Tuple,
};
pub use target::{parse_target, t_axioms, tk_axioms, TargetFormula, MAX_TK};
