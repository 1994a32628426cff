use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::{Formula, SetTerm};

/// Set-only form of a formula. Point variables have been replaced by
/// set variables guarded by `Sing`.
///
/// `PointLt(X, Y)` holds when some element of `X` precedes some element of
/// `Y`; desugaring only emits it under singleton guards, where it means
/// `x < y`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum CoreFormula {
    True,
    False,
    Sing(SetTerm),
    SubSet(SetTerm, SetTerm),
    PointLt(SetTerm, SetTerm),
    Not(Box<CoreFormula>),
    And(Box<CoreFormula>, Box<CoreFormula>),
    Or(Box<CoreFormula>, Box<CoreFormula>),
    Implies(Box<CoreFormula>, Box<CoreFormula>),
    Iff(Box<CoreFormula>, Box<CoreFormula>),
    Exists(String, Box<CoreFormula>),
    Forall(String, Box<CoreFormula>),
}

impl CoreFormula {
    pub fn depth(&self) -> usize {
        use CoreFormula::*;
        match self {
            True | False | Sing(_) | SubSet(..) | PointLt(..) => 0,
            Not(a) => a.depth(),
            And(a, b) | Or(a, b) | Implies(a, b) | Iff(a, b) => a.depth().max(b.depth()),
            Exists(_, a) | Forall(_, a) => a.depth() + 1,
        }
    }

    /// Free set variables (predicates and parameters excluded).
    pub fn free_sets(&self) -> BTreeSet<String> {
        fn go(f: &CoreFormula, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
            use CoreFormula::*;
            let mut term = |t: &SetTerm, bound: &Vec<String>| {
                if let SetTerm::Var(v) = t {
                    if !bound.contains(v) {
                        out.insert(v.clone());
                    }
                }
            };
            match f {
                True | False => {}
                Sing(a) => term(a, bound),
                SubSet(a, b) | PointLt(a, b) => {
                    term(a, bound);
                    term(b, bound);
                }
                Not(a) => go(a, bound, out),
                And(a, b) | Or(a, b) | Implies(a, b) | Iff(a, b) => {
                    go(a, bound, out);
                    go(b, bound, out);
                }
                Exists(x, a) | Forall(x, a) => {
                    bound.push(x.clone());
                    go(a, bound, out);
                    bound.pop();
                }
            }
        }
        let mut out = BTreeSet::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }
}

impl fmt::Display for CoreFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use CoreFormula::*;
        let operand = |g: &CoreFormula, f: &mut fmt::Formatter<'_>| -> fmt::Result {
            if matches!(g, Exists(..) | Forall(..)) {
                write!(f, "({g})")
            } else {
                write!(f, "{g}")
            }
        };
        let binary = |a: &CoreFormula, op: &str, b: &CoreFormula, f: &mut fmt::Formatter<'_>| {
            f.write_str("(")?;
            operand(a, f)?;
            write!(f, " {op} ")?;
            operand(b, f)?;
            f.write_str(")")
        };
        match self {
            True => f.write_str("true"),
            False => f.write_str("false"),
            Sing(a) => write!(f, "sing({a})"),
            SubSet(a, b) => write!(f, "{a} sub {b}"),
            PointLt(a, b) => write!(f, "ptlt({a},{b})"),
            Not(a) => {
                f.write_str("~")?;
                if matches!(**a, SubSet(..)) {
                    write!(f, "({a})")
                } else {
                    operand(a, f)
                }
            }
            And(a, b) => binary(a, "&", b, f),
            Or(a, b) => binary(a, "|", b, f),
            Implies(a, b) => binary(a, "->", b, f),
            Iff(a, b) => binary(a, "<->", b, f),
            Exists(x, a) => write!(f, "ex2 {x}. {a}"),
            Forall(x, a) => write!(f, "all2 {x}. {a}"),
        }
    }
}

/// The set variable standing for each point variable of `f` after
/// desugaring: `S` followed by the point name, suffixed if that would
/// collide with a set variable already in `f`.
pub fn singleton_names(f: &Formula) -> BTreeMap<String, String> {
    let names = f.all_names();
    let mut taken: BTreeSet<String> = names
        .iter()
        .filter(|n| !n.starts_with(|c: char| c.is_ascii_lowercase()))
        .cloned()
        .collect();
    let mut out = BTreeMap::new();
    for p in names.iter().filter(|n| n.starts_with(|c: char| c.is_ascii_lowercase())) {
        let base = format!("S{p}");
        let name = if taken.contains(&base) {
            (1..)
                .map(|k| format!("{base}_{k}"))
                .find(|c| !taken.contains(c))
                .expect("unbounded counter")
        } else {
            base
        };
        taken.insert(name.clone());
        out.insert(p.clone(), name);
    }
    out
}

/// Rewrites first-order quantification as quantification over singletons.
pub fn desugar(f: &Formula) -> CoreFormula {
    let names = singleton_names(f);
    go(f, &names)
}

fn go(f: &Formula, names: &BTreeMap<String, String>) -> CoreFormula {
    use CoreFormula as C;
    let s = |x: &String| SetTerm::Var(names[x].clone());
    let b = |g: &Formula| Box::new(go(g, names));
    match f {
        Formula::True => C::True,
        Formula::False => C::False,
        Formula::Lt(x, y) => C::PointLt(s(x), s(y)),
        Formula::Eq(x, y) => C::And(
            Box::new(C::SubSet(s(x), s(y))),
            Box::new(C::SubSet(s(y), s(x))),
        ),
        Formula::In(x, t) => C::SubSet(s(x), t.clone()),
        Formula::SubSet(a, c) => C::SubSet(a.clone(), c.clone()),
        Formula::EqSet(a, c) => C::And(
            Box::new(C::SubSet(a.clone(), c.clone())),
            Box::new(C::SubSet(c.clone(), a.clone())),
        ),
        Formula::Sing(a) => C::Sing(a.clone()),
        Formula::Not(a) => C::Not(b(a)),
        Formula::And(x, y) => C::And(b(x), b(y)),
        Formula::Or(x, y) => C::Or(b(x), b(y)),
        Formula::Implies(x, y) => C::Implies(b(x), b(y)),
        Formula::Iff(x, y) => C::Iff(b(x), b(y)),
        Formula::ExistsFO(x, a) => C::Exists(
            names[x].clone(),
            Box::new(C::And(Box::new(C::Sing(s(x))), b(a))),
        ),
        Formula::ForallFO(x, a) => C::Forall(
            names[x].clone(),
            Box::new(C::Implies(Box::new(C::Sing(s(x))), b(a))),
        ),
        Formula::ExistsSO(x, a) => C::Exists(x.clone(), b(a)),
        Formula::ForallSO(x, a) => C::Forall(x.clone(), b(a)),
    }
}
