//! Two-sorted monadic second-order formulas over labeled chains.
//!
//! Point variables are lowercase identifiers, set variables are uppercase
//! identifiers. `A<i>` names the i-th predicate of the chain and `W<i>` the
//! i-th parameter of an interpretation (numbered from 1).

mod core_form;
mod parse;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

pub use core_form::{desugar, singleton_names, CoreFormula};
pub use parse::parse_formula;
pub(crate) use parse::{lex, parse_with, Tok, Token};

/// A set-sorted term: a set variable, a predicate constant or a parameter.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SetTerm {
    Var(String),
    Pred(usize),
    Param(usize),
}

impl fmt::Display for SetTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SetTerm::Var(v) => f.write_str(v),
            SetTerm::Pred(i) => write!(f, "A{i}"),
            SetTerm::Param(i) => write!(f, "W{i}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sort {
    Point,
    Set,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Lt(String, String),
    Eq(String, String),
    In(String, SetTerm),
    SubSet(SetTerm, SetTerm),
    EqSet(SetTerm, SetTerm),
    Sing(SetTerm),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    ExistsFO(String, Box<Formula>),
    ForallFO(String, Box<Formula>),
    ExistsSO(String, Box<Formula>),
    ForallSO(String, Box<Formula>),
}

/// Free symbols of a formula, split by kind.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FreeVars {
    pub points: BTreeSet<String>,
    pub sets: BTreeSet<String>,
    pub preds: BTreeSet<usize>,
    pub params: BTreeSet<usize>,
}

impl FreeVars {
    pub fn is_closed(&self) -> bool {
        self.points.is_empty() && self.sets.is_empty()
    }
}

#[allow(clippy::should_implement_trait)]
impl Formula {
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }
    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }
    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }
    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }
    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Iff(Box::new(a), Box::new(b))
    }
    pub fn exists_fo(x: &str, f: Formula) -> Formula {
        Formula::ExistsFO(x.to_string(), Box::new(f))
    }
    pub fn forall_fo(x: &str, f: Formula) -> Formula {
        Formula::ForallFO(x.to_string(), Box::new(f))
    }
    pub fn exists_so(x: &str, f: Formula) -> Formula {
        Formula::ExistsSO(x.to_string(), Box::new(f))
    }
    pub fn forall_so(x: &str, f: Formula) -> Formula {
        Formula::ForallSO(x.to_string(), Box::new(f))
    }
    pub fn lt(x: &str, y: &str) -> Formula {
        Formula::Lt(x.to_string(), y.to_string())
    }
    pub fn eq(x: &str, y: &str) -> Formula {
        Formula::Eq(x.to_string(), y.to_string())
    }
    pub fn mem(x: &str, s: SetTerm) -> Formula {
        Formula::In(x.to_string(), s)
    }

    /// Conjunction of a list; `true` when empty.
    pub fn conj(parts: impl IntoIterator<Item = Formula>) -> Formula {
        parts
            .into_iter()
            .reduce(Formula::and)
            .unwrap_or(Formula::True)
    }

    /// Disjunction of a list; `false` when empty.
    pub fn disj(parts: impl IntoIterator<Item = Formula>) -> Formula {
        parts
            .into_iter()
            .reduce(Formula::or)
            .unwrap_or(Formula::False)
    }

    /// Quantifier count along the deepest path.
    pub fn depth(&self) -> usize {
        use Formula::*;
        match self {
            True | False | Lt(..) | Eq(..) | In(..) | SubSet(..) | EqSet(..) | Sing(_) => 0,
            Not(a) => a.depth(),
            And(a, b) | Or(a, b) | Implies(a, b) | Iff(a, b) => a.depth().max(b.depth()),
            ExistsFO(_, a) | ForallFO(_, a) | ExistsSO(_, a) | ForallSO(_, a) => a.depth() + 1,
        }
    }

    pub fn free_vars(&self) -> FreeVars {
        let mut out = FreeVars::default();
        let mut bound = Vec::new();
        self.collect_free(&mut bound, &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut FreeVars) {
        use Formula::*;
        let point = |x: &String, bound: &Vec<String>, out: &mut FreeVars| {
            if !bound.contains(x) {
                out.points.insert(x.clone());
            }
        };
        let set = |s: &SetTerm, bound: &Vec<String>, out: &mut FreeVars| match s {
            SetTerm::Var(v) if !bound.contains(v) => {
                out.sets.insert(v.clone());
            }
            SetTerm::Var(_) => {}
            SetTerm::Pred(i) => {
                out.preds.insert(*i);
            }
            SetTerm::Param(i) => {
                out.params.insert(*i);
            }
        };
        match self {
            True | False => {}
            Lt(x, y) | Eq(x, y) => {
                point(x, bound, out);
                point(y, bound, out);
            }
            In(x, s) => {
                point(x, bound, out);
                set(s, bound, out);
            }
            SubSet(a, b) | EqSet(a, b) => {
                set(a, bound, out);
                set(b, bound, out);
            }
            Sing(a) => set(a, bound, out),
            Not(a) => a.collect_free(bound, out),
            And(a, b) | Or(a, b) | Implies(a, b) | Iff(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            ExistsFO(x, a) | ForallFO(x, a) | ExistsSO(x, a) | ForallSO(x, a) => {
                bound.push(x.clone());
                a.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// All variable names occurring anywhere, bound or free.
    pub fn all_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit_names(&mut |n| {
            out.insert(n.to_string());
        });
        out
    }

    fn visit_names(&self, f: &mut impl FnMut(&str)) {
        use Formula::*;
        let st = |s: &SetTerm, f: &mut dyn FnMut(&str)| {
            if let SetTerm::Var(v) = s {
                f(v)
            }
        };
        match self {
            True | False => {}
            Lt(x, y) | Eq(x, y) => {
                f(x);
                f(y);
            }
            In(x, s) => {
                f(x);
                st(s, f);
            }
            SubSet(a, b) | EqSet(a, b) => {
                st(a, f);
                st(b, f);
            }
            Sing(a) => st(a, f),
            Not(a) => a.visit_names(f),
            And(a, b) | Or(a, b) | Implies(a, b) | Iff(a, b) => {
                a.visit_names(f);
                b.visit_names(f);
            }
            ExistsFO(x, a) | ForallFO(x, a) | ExistsSO(x, a) | ForallSO(x, a) => {
                f(x);
                a.visit_names(f);
            }
        }
    }

    /// Renames bound variables so that no name is bound twice and no bound
    /// name collides with a free name or with anything in `avoid`.
    pub fn rename_apart(&self, avoid: &BTreeSet<String>) -> Formula {
        let free = self.free_vars();
        let mut used: BTreeSet<String> = avoid.clone();
        used.extend(free.points.iter().cloned());
        used.extend(free.sets.iter().cloned());
        let mut r = Renamer {
            used,
            all: self.all_names().into_iter().chain(avoid.iter().cloned()).collect(),
        };
        r.go(self, &mut Vec::new())
    }

    /// Replaces free set variables according to `map`. Bound variables are
    /// first renamed away from every replacement name.
    pub fn substitute_sets(&self, map: &BTreeMap<String, SetTerm>) -> Formula {
        let avoid: BTreeSet<String> = map
            .values()
            .filter_map(|t| match t {
                SetTerm::Var(v) => Some(v.clone()),
                _ => None,
            })
            .collect();
        self.rename_apart(&avoid).subst(map)
    }

    fn subst(&self, map: &BTreeMap<String, SetTerm>) -> Formula {
        use Formula::*;
        let st = |s: &SetTerm| match s {
            SetTerm::Var(v) => map.get(v).cloned().unwrap_or_else(|| s.clone()),
            _ => s.clone(),
        };
        let b = |f: &Formula| Box::new(f.subst(map));
        match self {
            True => True,
            False => False,
            Lt(..) | Eq(..) => self.clone(),
            In(x, s) => In(x.clone(), st(s)),
            SubSet(a, c) => SubSet(st(a), st(c)),
            EqSet(a, c) => EqSet(st(a), st(c)),
            Sing(a) => Sing(st(a)),
            Not(a) => Not(b(a)),
            And(x, y) => And(b(x), b(y)),
            Or(x, y) => Or(b(x), b(y)),
            Implies(x, y) => Implies(b(x), b(y)),
            Iff(x, y) => Iff(b(x), b(y)),
            ExistsFO(x, a) => ExistsFO(x.clone(), b(a)),
            ForallFO(x, a) => ForallFO(x.clone(), b(a)),
            ExistsSO(x, a) => {
                let mut inner = map.clone();
                inner.remove(x);
                ExistsSO(x.clone(), Box::new(a.subst(&inner)))
            }
            ForallSO(x, a) => {
                let mut inner = map.clone();
                inner.remove(x);
                ForallSO(x.clone(), Box::new(a.subst(&inner)))
            }
        }
    }

    /// Equality up to consistent renaming of bound variables.
    pub fn alpha_eq(&self, other: &Formula) -> bool {
        self.canonical_names() == other.canonical_names()
    }

    fn canonical_names(&self) -> Formula {
        fn go(f: &Formula, env: &mut Vec<(String, String)>, counter: &mut usize) -> Formula {
            use Formula::*;
            let look = |x: &String, env: &Vec<(String, String)>| {
                env.iter()
                    .rev()
                    .find(|(from, _)| from == x)
                    .map(|(_, to)| to.clone())
                    .unwrap_or_else(|| x.clone())
            };
            let st = |s: &SetTerm, env: &Vec<(String, String)>| match s {
                SetTerm::Var(v) => SetTerm::Var(look(v, env)),
                _ => s.clone(),
            };
            let mut bind = |x: &String, body: &Formula, env: &mut Vec<(String, String)>| {
                let name = format!("#{}", *counter);
                *counter += 1;
                env.push((x.clone(), name.clone()));
                let body = go(body, env, counter);
                env.pop();
                (name, Box::new(body))
            };
            match f {
                True => True,
                False => False,
                Lt(x, y) => Lt(look(x, env), look(y, env)),
                Eq(x, y) => Eq(look(x, env), look(y, env)),
                In(x, s) => In(look(x, env), st(s, env)),
                SubSet(a, b) => SubSet(st(a, env), st(b, env)),
                EqSet(a, b) => EqSet(st(a, env), st(b, env)),
                Sing(a) => Sing(st(a, env)),
                Not(a) => Not(Box::new(go(a, env, counter))),
                And(a, b) => And(Box::new(go(a, env, counter)), Box::new(go(b, env, counter))),
                Or(a, b) => Or(Box::new(go(a, env, counter)), Box::new(go(b, env, counter))),
                Implies(a, b) => {
                    Implies(Box::new(go(a, env, counter)), Box::new(go(b, env, counter)))
                }
                Iff(a, b) => Iff(Box::new(go(a, env, counter)), Box::new(go(b, env, counter))),
                ExistsFO(x, a) => {
                    let (n, b) = bind(x, a, env);
                    ExistsFO(n, b)
                }
                ForallFO(x, a) => {
                    let (n, b) = bind(x, a, env);
                    ForallFO(n, b)
                }
                ExistsSO(x, a) => {
                    let (n, b) = bind(x, a, env);
                    ExistsSO(n, b)
                }
                ForallSO(x, a) => {
                    let (n, b) = bind(x, a, env);
                    ForallSO(n, b)
                }
            }
        }
        go(self, &mut Vec::new(), &mut 0)
    }

    fn is_quantifier(&self) -> bool {
        matches!(
            self,
            Formula::ExistsFO(..) | Formula::ForallFO(..) | Formula::ExistsSO(..) | Formula::ForallSO(..)
        )
    }
}

struct Renamer {
    used: BTreeSet<String>,
    all: BTreeSet<String>,
}

impl Renamer {
    fn fresh(&mut self, base: &str) -> String {
        let stem = base.split('_').next().unwrap_or(base);
        let stem = if stem.is_empty() { base } else { stem };
        (1..)
            .map(|k| format!("{stem}_{k}"))
            .find(|c| !self.used.contains(c) && !self.all.contains(c))
            .expect("unbounded counter")
    }

    fn bind(&mut self, x: &str) -> String {
        let name = if self.used.contains(x) {
            self.fresh(x)
        } else {
            x.to_string()
        };
        self.used.insert(name.clone());
        self.all.insert(name.clone());
        name
    }

    fn go(&mut self, f: &Formula, env: &mut Vec<(String, String)>) -> Formula {
        use Formula::*;
        let look = |x: &String, env: &Vec<(String, String)>| {
            env.iter()
                .rev()
                .find(|(from, _)| from == x)
                .map(|(_, to)| to.clone())
                .unwrap_or_else(|| x.clone())
        };
        let st = |s: &SetTerm, env: &Vec<(String, String)>| match s {
            SetTerm::Var(v) => SetTerm::Var(look(v, env)),
            _ => s.clone(),
        };
        macro_rules! quant {
            ($ctor:ident, $x:expr, $a:expr) => {{
                let name = self.bind($x);
                env.push(($x.clone(), name.clone()));
                let body = self.go($a, env);
                env.pop();
                $ctor(name, Box::new(body))
            }};
        }
        match f {
            True => True,
            False => False,
            Lt(x, y) => Lt(look(x, env), look(y, env)),
            Eq(x, y) => Eq(look(x, env), look(y, env)),
            In(x, s) => In(look(x, env), st(s, env)),
            SubSet(a, b) => SubSet(st(a, env), st(b, env)),
            EqSet(a, b) => EqSet(st(a, env), st(b, env)),
            Sing(a) => Sing(st(a, env)),
            Not(a) => Not(Box::new(self.go(a, env))),
            And(a, b) => And(Box::new(self.go(a, env)), Box::new(self.go(b, env))),
            Or(a, b) => Or(Box::new(self.go(a, env)), Box::new(self.go(b, env))),
            Implies(a, b) => Implies(Box::new(self.go(a, env)), Box::new(self.go(b, env))),
            Iff(a, b) => Iff(Box::new(self.go(a, env)), Box::new(self.go(b, env))),
            ExistsFO(x, a) => quant!(ExistsFO, x, a),
            ForallFO(x, a) => quant!(ForallFO, x, a),
            ExistsSO(x, a) => quant!(ExistsSO, x, a),
            ForallSO(x, a) => quant!(ForallSO, x, a),
        }
    }
}

/// Prints in the concrete grammar, fully parenthesized so that the output
/// parses back to an alpha-equivalent formula.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Formula::*;
        let operand = |g: &Formula, f: &mut fmt::Formatter<'_>| -> fmt::Result {
            if g.is_quantifier() {
                write!(f, "({g})")
            } else {
                write!(f, "{g}")
            }
        };
        let binary = |a: &Formula, op: &str, b: &Formula, f: &mut fmt::Formatter<'_>| {
            f.write_str("(")?;
            operand(a, f)?;
            write!(f, " {op} ")?;
            operand(b, f)?;
            f.write_str(")")
        };
        match self {
            True => f.write_str("true"),
            False => f.write_str("false"),
            Lt(x, y) => write!(f, "{x} < {y}"),
            Eq(x, y) => write!(f, "{x} = {y}"),
            In(x, s) => write!(f, "{x} in {s}"),
            SubSet(a, b) => write!(f, "{a} sub {b}"),
            EqSet(a, b) => write!(f, "{a} =set {b}"),
            Sing(a) => write!(f, "sing({a})"),
            Not(a) => {
                f.write_str("~")?;
                match **a {
                    Lt(..) | Eq(..) | In(..) | SubSet(..) | EqSet(..) => write!(f, "({a})"),
                    _ => operand(a, f),
                }
            }
            And(a, b) => binary(a, "&", b, f),
            Or(a, b) => binary(a, "|", b, f),
            Implies(a, b) => binary(a, "->", b, f),
            Iff(a, b) => binary(a, "<->", b, f),
            ExistsFO(x, a) => write!(f, "ex {x}. {a}"),
            ForallFO(x, a) => write!(f, "all {x}. {a}"),
            ExistsSO(x, a) => write!(f, "ex2 {x}. {a}"),
            ForallSO(x, a) => write!(f, "all2 {x}. {a}"),
        }
    }
}

/// Depth used to pick the theory level that decides `f`.
pub fn formula_depth(f: &Formula) -> usize {
    f.depth()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn depth_examples() {
        let f = parse_formula("ex x. all y. (x = y | y < x)", 0).unwrap();
        assert_eq!(formula_depth(&f), 2);
        let f = parse_formula("x in A0", 1).unwrap();
        assert_eq!(formula_depth(&f), 0);
        let f = parse_formula("ex2 X. (ex x. x in X) & (all y. y in X)", 0).unwrap();
        assert_eq!(formula_depth(&f), 2);
    }

    #[test]
    fn free_vars_split_by_kind() {
        let f = parse_formula("x in A0 & ex2 X. (y in X & X sub W2)", 1).unwrap();
        let fv = f.free_vars();
        assert_eq!(fv.points.into_iter().collect::<Vec<_>>(), vec!["x", "y"]);
        assert!(fv.sets.is_empty());
        assert!(fv.preds.contains(&0));
        assert!(fv.params.contains(&2));
    }

    #[test]
    fn substitution_avoids_capture() {
        let f = parse_formula("ex2 Y. X sub Y", 0).unwrap();
        let mut map = BTreeMap::new();
        map.insert("X".to_string(), SetTerm::Var("Y".to_string()));
        let g = f.substitute_sets(&map);
        let fv = g.free_vars();
        assert!(fv.sets.contains("Y"));
        assert_ne!(g, Formula::exists_so("Y", Formula::SubSet(SetTerm::Var("Y".into()), SetTerm::Var("Y".into()))));
    }

    #[test]
    fn rename_apart_separates_siblings() {
        let f = Formula::and(
            Formula::exists_fo("x", Formula::True),
            Formula::exists_fo("x", Formula::eq("x", "x")),
        );
        let g = f.rename_apart(&BTreeSet::new());
        match g {
            Formula::And(a, b) => match (*a, *b) {
                (Formula::ExistsFO(x1, _), Formula::ExistsFO(x2, _)) => assert_ne!(x1, x2),
                _ => panic!(),
            },
            _ => panic!(),
        }
        assert!(f.alpha_eq(&f.rename_apart(&BTreeSet::new())));
    }
}
