#![allow(dead_code)]

use chaincalc::formula::{parse_formula, Formula};

/// Closed formulas over one predicate, quantifier depth at most 2.
pub const SENTENCES: &[&str] = &[
    "true",
    "ex x. x in A0",
    "all x. x in A0",
    "ex x. all y. (y < x | y = x)",
    "ex x. all y. (x < y | x = y)",
    "ex x. ex y. x < y",
    "ex x. ex y. ~(x = y)",
    "ex x. ex y. (x < y & x in A0 & y in A0)",
    "ex x. ex y. (x < y & x in A0 & ~(y in A0))",
    "ex x. ex y. (x < y & ~(x in A0) & ~(y in A0))",
    "all x. (x in A0 -> ex y. x < y)",
    "all x. ex y. (y < x | x < y)",
    "all x. all y. (x < y -> (x in A0 | y in A0))",
    "all x. all y. ((x in A0 & y in A0) -> x = y)",
    "ex x. (x in A0 & all y. (y < x -> ~(y in A0)))",
    "ex x. (~(x in A0) & all y. (x < y -> y in A0))",
    "all x. (x in A0 | ex y. (y < x & y in A0))",
    "ex x. (x in A0 & ex y. (x < y & y in A0))",
    "all x. (x in A0 <-> all y. (y < x | y = x))",
    "(~(ex x. x in A0)) | (all x. x in A0)",
    "ex2 X. all x. (x in X <-> x in A0)",
    "ex2 X. ex x. (x in X & ~(x in A0))",
    "all2 X. (X sub A0 | ex x. x in X)",
    "ex2 X. (X sub A0 & sing(X))",
    "ex2 X. ex2 Y. (X sub Y & ~(Y sub X))",
    "all2 X. ex2 Y. X sub Y",
    "ex2 X. (sing(X) & all x. (x in X -> x in A0))",
    "ex2 X. (~(X sub A0) & ~(A0 sub X))",
    "all2 X. (X sub A0 -> ex x. (x in A0 & ~(x in X)))",
    "all2 X. all x. (x in X -> x in A0)",
    "ex x. all2 Y. (x in Y | ~(x in Y))",
    "all x. ex2 Y. (x in Y & Y sub A0)",
];

pub fn sentences() -> Vec<Formula> {
    SENTENCES
        .iter()
        .map(|s| parse_formula(s, 1).unwrap_or_else(|e| panic!("{s}: {e}")))
        .collect()
}
