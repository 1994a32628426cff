use std::collections::{BTreeMap, BTreeSet};

use super::target::TargetFormula;
use crate::error::{Error, Result};
use crate::formula::{Formula, SetTerm};

/// Which variable tuples a relation formula is written over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Arity {
    /// `X1..Xd`.
    Unary,
    /// `Y1..Yd`; used by unary formulas written over the second tuple.
    UnaryY,
    /// `X1..Xd` then `Y1..Yd`.
    Binary,
}

impl Arity {
    pub fn count(self) -> usize {
        match self {
            Arity::Unary | Arity::UnaryY => 1,
            Arity::Binary => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationDef {
    pub name: String,
    pub arity: Arity,
    pub formula: Formula,
}

/// A first-order interpretation into monadic formulas over a chain:
/// elements are `d`-tuples of sets, with universe `U`, equality `E` and one
/// formula per relation symbol, all possibly mentioning set constants
/// `W1..Wk`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interpretation {
    pub dim: usize,
    pub params: usize,
    pub universe: Formula,
    pub equality: Formula,
    pub relations: Vec<RelationDef>,
}

pub fn x_var(i: usize) -> String {
    format!("X{}", i + 1)
}

pub fn y_var(i: usize) -> String {
    format!("Y{}", i + 1)
}

/// Section names with their relation symbol and arity. The binary `P` of
/// the pairing signature is the relation `p`.
fn relation_section(name: &str) -> Option<(&'static str, Arity)> {
    match name {
        "P" => Some(("p", Arity::Binary)),
        "Atom" => Some(("Atom", Arity::Unary)),
        "Set" => Some(("Set", Arity::Unary)),
        "Code" => Some(("Code", Arity::Binary)),
        _ => None,
    }
}

impl Interpretation {
    pub fn relation(&self, name: &str) -> Option<&RelationDef> {
        self.relations.iter().find(|r| r.name == name)
    }

    fn xs(&self) -> Vec<String> {
        (0..self.dim).map(x_var).collect()
    }

    fn ys(&self) -> Vec<String> {
        (0..self.dim).map(y_var).collect()
    }

    fn validate(&self, section: &str, f: &Formula, allowed: &[String]) -> Result<()> {
        let free = f.free_vars();
        if let Some(x) = free.points.iter().next() {
            return Err(Error::Interp(format!("{section}: free point variable `{x}`")));
        }
        for s in &free.sets {
            if !allowed.contains(s) {
                return Err(Error::Interp(format!(
                    "{section}: set variable `{s}` is not among {}",
                    allowed.join(", ")
                )));
            }
        }
        if let Some(&w) = free.params.iter().find(|&&w| w > self.params) {
            return Err(Error::Interp(format!(
                "{section}: parameter W{w} used but only {} declared",
                self.params
            )));
        }
        Ok(())
    }

    /// Builds and validates an interpretation.
    pub fn new(dim: usize, params: usize, universe: Formula, equality: Formula, relations: Vec<RelationDef>) -> Result<Interpretation> {
        if dim == 0 {
            return Err(Error::Interp("dimension must be positive".into()));
        }
        let interp = Interpretation {
            dim,
            params,
            universe,
            equality,
            relations,
        };
        let xs = interp.xs();
        let xy: Vec<String> = xs.iter().cloned().chain(interp.ys()).collect();
        interp.validate("U", &interp.universe, &xs)?;
        interp.validate("E", &interp.equality, &xy)?;
        for r in &interp.relations {
            let allowed = match r.arity {
                Arity::Unary => xs.clone(),
                Arity::UnaryY => interp.ys(),
                Arity::Binary => xy.clone(),
            };
            interp.validate(&r.name, &r.formula, &allowed)?;
        }
        let names: BTreeSet<&str> = interp.relations.iter().map(|r| r.name.as_str()).collect();
        let pairing = names.contains("p");
        let coding = ["Atom", "Set", "Code"].iter().all(|n| names.contains(n));
        if !pairing && !coding {
            return Err(Error::Interp("missing section: need P, or all of Atom, Set and Code".into()));
        }
        Ok(interp)
    }

    /// Set variables standing for target variable `x`.
    pub fn tuple_for(&self, x: &str) -> Vec<String> {
        (1..=self.dim).map(|i| format!("T_{x}_{i}")).collect()
    }

    fn instance(&self, f: &Formula, xs: &[String], ys: &[String]) -> Formula {
        let mut map = BTreeMap::new();
        for (i, x) in xs.iter().enumerate() {
            map.insert(x_var(i), SetTerm::Var(x.clone()));
        }
        for (i, y) in ys.iter().enumerate() {
            map.insert(y_var(i), SetTerm::Var(y.clone()));
        }
        f.substitute_sets(&map)
    }

    /// The formula `U` applied to the tuple of target variable `x`.
    pub fn universe_of(&self, x: &str) -> Formula {
        self.instance(&self.universe, &self.tuple_for(x), &[])
    }

    /// Translates a first-order formula over the interpreted signature into
    /// a monadic formula over the chain. Target variable `x` becomes the
    /// set tuple `T_x_1..T_x_d`; quantifiers are relativized to `U`.
    pub fn translate(&self, f: &TargetFormula) -> Result<Formula> {
        use TargetFormula as T;
        Ok(match f {
            T::True => Formula::True,
            T::False => Formula::False,
            T::Eq(x, y) => self.instance(&self.equality, &self.tuple_for(x), &self.tuple_for(y)),
            T::Rel(name, args) => {
                let r = self
                    .relation(name)
                    .ok_or_else(|| Error::Interp(format!("relation `{name}` is not interpreted")))?;
                if args.len() != r.arity.count() {
                    return Err(Error::Interp(format!(
                        "relation `{name}` has arity {}, used with {}",
                        r.arity.count(),
                        args.len()
                    )));
                }
                match r.arity {
                    Arity::Unary => self.instance(&r.formula, &self.tuple_for(&args[0]), &[]),
                    Arity::UnaryY => self.instance(&r.formula, &[], &self.tuple_for(&args[0])),
                    Arity::Binary => self.instance(&r.formula, &self.tuple_for(&args[0]), &self.tuple_for(&args[1])),
                }
            }
            T::Not(a) => Formula::not(self.translate(a)?),
            T::And(a, b) => Formula::and(self.translate(a)?, self.translate(b)?),
            T::Or(a, b) => Formula::or(self.translate(a)?, self.translate(b)?),
            T::Implies(a, b) => Formula::implies(self.translate(a)?, self.translate(b)?),
            T::Iff(a, b) => Formula::iff(self.translate(a)?, self.translate(b)?),
            T::Exists(x, a) | T::Forall(x, a) => {
                let body = self.translate(a)?;
                let guard = self.universe_of(x);
                let exists = matches!(f, T::Exists(..));
                let mut out = if exists {
                    Formula::and(guard, body)
                } else {
                    Formula::implies(guard, body)
                };
                for v in self.tuple_for(x).iter().rev() {
                    out = if exists {
                        Formula::exists_so(v, out)
                    } else {
                        Formula::forall_so(v, out)
                    };
                }
                out
            }
        })
    }
}

/// Parses the line-oriented interpretation format:
///
/// ```text
/// # comment
/// dim 1
/// params 0
/// U := true
/// E := X1 =set Y1
/// P := X1 sub Y1
/// ```
///
/// A line that starts with whitespace continues the previous formula.
/// Sections are `U`, `E`, and either `P` or all of `Atom`, `Set`, `Code`.
pub fn parse_interp(text: &str) -> Result<Interpretation> {
    let mut dim = None;
    let mut params = None;
    let mut sections: Vec<(String, String, usize)> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        if line.trim().is_empty() {
            continue;
        }
        let at = |msg: String| Error::Interp(format!("line {}: {msg}", lineno + 1));
        if line.starts_with(char::is_whitespace) {
            let last = sections
                .last_mut()
                .ok_or_else(|| at("continuation line before any formula".into()))?;
            last.1.push(' ');
            last.1.push_str(line.trim());
            continue;
        }
        let line = line.trim();
        if let Some((name, body)) = line.split_once(":=") {
            let name = name.trim();
            if sections.iter().any(|(n, _, _)| n == name) {
                return Err(at(format!("section `{name}` given twice")));
            }
            sections.push((name.to_string(), body.trim().to_string(), lineno + 1));
            continue;
        }
        let mut words = line.split_whitespace();
        let key = words.next().unwrap_or("");
        let value = words
            .next()
            .and_then(|v| v.parse::<usize>().ok())
            .ok_or_else(|| at(format!("expected `{key} <number>`")))?;
        if words.next().is_some() {
            return Err(at("trailing text".into()));
        }
        match key {
            "dim" => dim = Some(value),
            "params" => params = Some(value),
            other => return Err(at(format!("unknown directive `{other}`"))),
        }
    }
    let dim = dim.ok_or_else(|| Error::Interp("missing `dim`".into()))?;
    if dim == 0 {
        return Err(Error::Interp("dimension must be positive".into()));
    }
    let params = params.unwrap_or(0);
    let mut universe = None;
    let mut equality = None;
    let mut relations = Vec::new();
    for (name, body, line) in sections {
        let f = crate::formula::parse_with(&body, None)
            .map_err(|e| Error::Interp(format!("line {line}: {name}: {e}")))?;
        match name.as_str() {
            "U" => universe = Some(f),
            "E" => equality = Some(f),
            _ => {
                let (rel, mut arity) = relation_section(&name)
                    .ok_or_else(|| Error::Interp(format!("line {line}: unknown section `{name}`")))?;
                if arity == Arity::Unary {
                    let free = f.free_vars().sets;
                    let uses_y = free.iter().any(|s| s.starts_with('Y'));
                    let uses_x = free.iter().any(|s| s.starts_with('X'));
                    if uses_y && !uses_x {
                        arity = Arity::UnaryY;
                    }
                }
                relations.push(RelationDef {
                    name: rel.to_string(),
                    arity,
                    formula: f,
                });
            }
        }
    }
    let universe = universe.ok_or_else(|| Error::Interp("missing section `U`".into()))?;
    let equality = equality.ok_or_else(|| Error::Interp("missing section `E`".into()))?;
    Interpretation::new(dim, params, universe, equality, relations)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interp::parse_target;

    pub(crate) const MEMBERSHIP: &str = include_str!("../../interps/membership.interp");

    #[test]
    fn membership_file() {
        let i = parse_interp(MEMBERSHIP).unwrap();
        assert_eq!((i.dim, i.params, i.relations.len()), (1, 0, 3));
    }

    #[test]
    fn rejects_bad_files() {
        let zero = "dim 0\nU := true\nE := X1 =set Y1\nP := X1 sub Y1\n";
        assert!(matches!(parse_interp(zero), Err(Error::Interp(m)) if m.contains("positive")));
        let undeclared = "dim 1\nparams 0\nU := true\nE := X1 =set Y1\nAtom := sing(X1)\nSet := true\nCode := X1 sub W1\n";
        assert!(matches!(parse_interp(undeclared), Err(Error::Interp(m)) if m.contains("W1")));
        let missing = "dim 1\nU := true\nE := X1 =set Y1\nAtom := sing(X1)\n";
        assert!(parse_interp(missing).is_err());
        let stray = "dim 1\nU := Y1 sub X1\nE := X1 =set Y1\nP := X1 sub Y1\n";
        assert!(parse_interp(stray).is_err());
    }

    #[test]
    fn continuation_lines() {
        let text = "dim 1\nU := true\nE := X1 sub Y1\n   & Y1 sub X1 # both ways\nP := X1 sub Y1\n";
        let i = parse_interp(text).unwrap();
        assert_eq!(i.equality.to_string(), "(X1 sub Y1 & Y1 sub X1)");
    }

    #[test]
    fn translation_clauses() {
        let i = parse_interp(MEMBERSHIP).unwrap();
        let eq = i.translate(&parse_target("x = y").unwrap()).unwrap();
        assert_eq!(eq.to_string(), "T_x_1 =set T_y_1");
        let ex = i.translate(&parse_target("ex x. x = x").unwrap()).unwrap();
        assert_eq!(ex.to_string(), "ex2 T_x_1. (true & T_x_1 =set T_x_1)");
        let neg = i.translate(&parse_target("~Code(x,y)").unwrap()).unwrap();
        assert!(matches!(neg, Formula::Not(_)));
        assert!(i.translate(&parse_target("p(x,y)").unwrap()).is_err());
    }
}
