use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::formula::{lex, Tok, Token};

/// First-order formula over an interpreted signature: equality plus named
/// relation symbols.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TargetFormula {
    True,
    False,
    Eq(String, String),
    Rel(String, Vec<String>),
    Not(Box<TargetFormula>),
    And(Box<TargetFormula>, Box<TargetFormula>),
    Or(Box<TargetFormula>, Box<TargetFormula>),
    Implies(Box<TargetFormula>, Box<TargetFormula>),
    Iff(Box<TargetFormula>, Box<TargetFormula>),
    Exists(String, Box<TargetFormula>),
    Forall(String, Box<TargetFormula>),
}

#[allow(clippy::should_implement_trait)]
impl TargetFormula {
    pub fn eq(x: &str, y: &str) -> TargetFormula {
        TargetFormula::Eq(x.into(), y.into())
    }

    pub fn rel(name: &str, args: &[&str]) -> TargetFormula {
        TargetFormula::Rel(name.into(), args.iter().map(|a| a.to_string()).collect())
    }

    pub fn not(f: TargetFormula) -> TargetFormula {
        TargetFormula::Not(Box::new(f))
    }

    pub fn and(a: TargetFormula, b: TargetFormula) -> TargetFormula {
        TargetFormula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: TargetFormula, b: TargetFormula) -> TargetFormula {
        TargetFormula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: TargetFormula, b: TargetFormula) -> TargetFormula {
        TargetFormula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: TargetFormula, b: TargetFormula) -> TargetFormula {
        TargetFormula::Iff(Box::new(a), Box::new(b))
    }

    pub fn exists(x: &str, f: TargetFormula) -> TargetFormula {
        TargetFormula::Exists(x.into(), Box::new(f))
    }

    pub fn forall(x: &str, f: TargetFormula) -> TargetFormula {
        TargetFormula::Forall(x.into(), Box::new(f))
    }

    /// Conjunction of the parts; `true` when empty.
    pub fn conj(parts: impl IntoIterator<Item = TargetFormula>) -> TargetFormula {
        parts
            .into_iter()
            .reduce(TargetFormula::and)
            .unwrap_or(TargetFormula::True)
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        fn go(f: &TargetFormula, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
            use TargetFormula::*;
            let mut var = |x: &String, bound: &Vec<String>| {
                if !bound.contains(x) {
                    out.insert(x.clone());
                }
            };
            match f {
                True | False => {}
                Eq(x, y) => {
                    var(x, bound);
                    var(y, bound);
                }
                Rel(_, args) => args.iter().for_each(|a| var(a, bound)),
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

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Relation symbols with the arities they are used at.
    pub fn relations(&self) -> BTreeSet<(String, usize)> {
        use TargetFormula::*;
        let mut out = BTreeSet::new();
        let mut stack = vec![self];
        while let Some(f) = stack.pop() {
            match f {
                True | False | Eq(..) => {}
                Rel(name, args) => {
                    out.insert((name.clone(), args.len()));
                }
                Not(a) | Exists(_, a) | Forall(_, a) => stack.push(a),
                And(a, b) | Or(a, b) | Implies(a, b) | Iff(a, b) => {
                    stack.push(a);
                    stack.push(b);
                }
            }
        }
        out
    }

    pub fn quantifier_depth(&self) -> usize {
        use TargetFormula::*;
        match self {
            True | False | Eq(..) | Rel(..) => 0,
            Not(a) => a.quantifier_depth(),
            And(a, b) | Or(a, b) | Implies(a, b) | Iff(a, b) => a.quantifier_depth().max(b.quantifier_depth()),
            Exists(_, a) | Forall(_, a) => 1 + a.quantifier_depth(),
        }
    }
}

impl fmt::Display for TargetFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use TargetFormula::*;
        let operand = |g: &TargetFormula, f: &mut fmt::Formatter<'_>| -> fmt::Result {
            if matches!(g, Exists(..) | Forall(..)) {
                write!(f, "({g})")
            } else {
                write!(f, "{g}")
            }
        };
        let binary = |a: &TargetFormula, op: &str, b: &TargetFormula, f: &mut fmt::Formatter<'_>| {
            f.write_str("(")?;
            operand(a, f)?;
            write!(f, " {op} ")?;
            operand(b, f)?;
            f.write_str(")")
        };
        match self {
            True => f.write_str("true"),
            False => f.write_str("false"),
            Eq(x, y) => write!(f, "{x} = {y}"),
            Rel(name, args) => write!(f, "{name}({})", args.join(",")),
            Not(a) => {
                f.write_str("~")?;
                if matches!(**a, Eq(..)) {
                    write!(f, "({a})")
                } else {
                    operand(a, f)
                }
            }
            And(a, b) => binary(a, "&", b, f),
            Or(a, b) => binary(a, "|", b, f),
            Implies(a, b) => binary(a, "->", b, f),
            Iff(a, b) => binary(a, "<->", b, f),
            Exists(x, a) => write!(f, "ex {x}. {a}"),
            Forall(x, a) => write!(f, "all {x}. {a}"),
        }
    }
}

struct Parser {
    toks: Vec<Token>,
    at: usize,
    end: usize,
    scope: Vec<String>,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|t| &t.tok)
    }

    fn err<T>(&self, msg: &str) -> Result<T> {
        let pos = self.toks.get(self.at).map_or(self.end, |t| t.pos);
        Err(Error::Syntax {
            pos,
            msg: msg.to_string(),
        })
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        if self.eat(&tok) {
            Ok(())
        } else {
            self.err(&format!("expected {what}"))
        }
    }

    fn ident(&mut self, what: &str) -> Result<String> {
        match self.peek() {
            Some(Tok::Ident(name)) => {
                let name = name.clone();
                self.at += 1;
                Ok(name)
            }
            _ => self.err(&format!("expected {what}")),
        }
    }

    fn formula(&mut self) -> Result<TargetFormula> {
        let mut lhs = self.implication()?;
        while self.eat(&Tok::Iff) {
            lhs = TargetFormula::iff(lhs, self.implication()?);
        }
        Ok(lhs)
    }

    fn implication(&mut self) -> Result<TargetFormula> {
        let lhs = self.disjunction()?;
        if self.eat(&Tok::Implies) {
            return Ok(TargetFormula::implies(lhs, self.implication()?));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<TargetFormula> {
        let mut lhs = self.conjunction()?;
        while self.eat(&Tok::Or) {
            lhs = TargetFormula::or(lhs, self.conjunction()?);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<TargetFormula> {
        let mut lhs = self.unary()?;
        while self.eat(&Tok::And) {
            lhs = TargetFormula::and(lhs, self.unary()?);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<TargetFormula> {
        match self.peek() {
            Some(Tok::Not) => {
                self.at += 1;
                Ok(TargetFormula::not(self.unary()?))
            }
            Some(Tok::Ex | Tok::All) => {
                let exists = self.peek() == Some(&Tok::Ex);
                self.at += 1;
                let x = self.ident("a variable after quantifier")?;
                if self.scope.contains(&x) {
                    return Err(Error::Shadowing(x));
                }
                self.expect(Tok::Dot, "`.` after quantified variable")?;
                self.scope.push(x.clone());
                let body = self.formula();
                self.scope.pop();
                let body = body?;
                Ok(if exists {
                    TargetFormula::exists(&x, body)
                } else {
                    TargetFormula::forall(&x, body)
                })
            }
            Some(Tok::Ex2 | Tok::All2 | Tok::In | Tok::Sub | Tok::EqSet | Tok::Sing) => {
                self.err("set quantifiers and set atoms are not part of a first-order signature")
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<TargetFormula> {
        if self.eat(&Tok::True) {
            return Ok(TargetFormula::True);
        }
        if self.eat(&Tok::False) {
            return Ok(TargetFormula::False);
        }
        if self.eat(&Tok::LParen) {
            let f = self.formula()?;
            self.expect(Tok::RParen, "`)`")?;
            return Ok(f);
        }
        let name = self.ident("a formula")?;
        if self.eat(&Tok::LParen) {
            let mut args = vec![self.ident("an argument")?];
            while self.eat(&Tok::Comma) {
                args.push(self.ident("an argument")?);
            }
            self.expect(Tok::RParen, "`)` closing the argument list")?;
            return Ok(TargetFormula::Rel(name, args));
        }
        if self.eat(&Tok::Eq) {
            let rhs = self.ident("a variable after `=`")?;
            return Ok(TargetFormula::Eq(name, rhs));
        }
        self.err("expected `=` or an argument list")
    }
}

/// Parses a first-order formula such as `all x. ex y. (p(x,y) | x = y)`.
/// Any identifier followed by an argument list is a relation symbol.
pub fn parse_target(text: &str) -> Result<TargetFormula> {
    let mut p = Parser {
        toks: lex(text)?,
        at: 0,
        end: text.len(),
        scope: Vec::new(),
    };
    let f = p.formula()?;
    if p.at < p.toks.len() {
        return p.err("unexpected trailing input");
    }
    Ok(f)
}

/// The three axioms of the pairing theory over a binary `p`: singletons
/// exist, unions of two exist, and an empty element exists.
pub fn t_axioms() -> Vec<TargetFormula> {
    use TargetFormula as F;
    let p = |a: &str, b: &str| F::rel("p", &[a, b]);
    vec![
        F::forall("x", F::exists("y", F::forall("z", F::iff(p("z", "y"), F::eq("z", "x"))))),
        F::forall(
            "x",
            F::forall(
                "y",
                F::exists(
                    "u",
                    F::forall("z", F::iff(p("z", "u"), F::or(p("z", "x"), p("z", "y")))),
                ),
            ),
        ),
        F::exists("x", F::forall("y", F::not(p("y", "x")))),
    ]
}

/// Largest `k` accepted by [`tk_axioms`].
pub const MAX_TK: usize = 8;

/// Axioms for a family of `k` atoms with a coding set for every subfamily:
/// existence of `k` distinct atoms together with all codes, extensionality
/// of codes, and `Code` relating atoms to sets.
pub fn tk_axioms(k: usize) -> Result<Vec<TargetFormula>> {
    use TargetFormula as F;
    if k == 0 || k > MAX_TK {
        return Err(Error::OutOfRange {
            what: "family size k",
            value: k,
            limit: MAX_TK,
        });
    }
    let atoms: Vec<String> = (1..=k).map(|i| format!("a{i}")).collect();
    let mut body = Vec::new();
    for (i, a) in atoms.iter().enumerate() {
        body.push(F::rel("Atom", &[a]));
        for b in &atoms[i + 1..] {
            body.push(F::not(F::eq(a, b)));
        }
    }
    for s in 0u32..1 << k {
        let coded = atoms.iter().enumerate().map(|(i, a)| {
            let c = F::rel("Code", &[a, "y"]);
            if s >> i & 1 == 1 {
                c
            } else {
                F::not(c)
            }
        });
        body.push(F::exists(
            "y",
            F::and(F::rel("Set", &["y"]), F::conj(coded)),
        ));
    }
    let mut family = F::conj(body);
    for a in atoms.iter().rev() {
        family = F::exists(a, family);
    }
    let same_atoms = F::forall(
        "x",
        F::implies(
            F::rel("Atom", &["x"]),
            F::iff(F::rel("Code", &["x", "y"]), F::rel("Code", &["x", "z"])),
        ),
    );
    let extensional = F::forall(
        "y",
        F::forall(
            "z",
            F::implies(
                F::conj([F::rel("Set", &["y"]), F::rel("Set", &["z"]), same_atoms]),
                F::eq("y", "z"),
            ),
        ),
    );
    let sorted = F::forall(
        "x",
        F::forall(
            "y",
            F::implies(
                F::rel("Code", &["x", "y"]),
                F::and(F::rel("Atom", &["x"]), F::rel("Set", &["y"])),
            ),
        ),
    );
    Ok(vec![family, extensional, sorted])
}
