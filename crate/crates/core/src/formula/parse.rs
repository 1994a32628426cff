use std::collections::BTreeSet;

use super::{Formula, SetTerm};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Dot,
    LParen,
    RParen,
    Comma,
    Lt,
    Eq,
    EqSet,
    And,
    Or,
    Implies,
    Iff,
    Not,
    Ex,
    All,
    Ex2,
    All2,
    In,
    Sub,
    True,
    False,
    Sing,
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub pos: usize,
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

pub(crate) fn lex(text: &str) -> Result<Vec<Token>> {
    let bytes: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let syntax = |pos: usize, msg: String| Error::Syntax { pos, msg };
    while i < bytes.len() {
        let (pos, c) = bytes[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let rest = &text[pos..];
        let (tok, width) = if rest.starts_with("<->") {
            (Tok::Iff, 3)
        } else if rest.starts_with("->") {
            (Tok::Implies, 2)
        } else if rest.starts_with("=set")
            && !rest[4..].chars().next().is_some_and(is_ident_char)
        {
            (Tok::EqSet, 4)
        } else {
            match c {
                '.' => (Tok::Dot, 1),
                '(' => (Tok::LParen, 1),
                ')' => (Tok::RParen, 1),
                ',' => (Tok::Comma, 1),
                '<' => (Tok::Lt, 1),
                '=' => (Tok::Eq, 1),
                '&' => (Tok::And, 1),
                '|' => (Tok::Or, 1),
                '~' => (Tok::Not, 1),
                c if c.is_ascii_alphabetic() => {
                    let word: String = rest.chars().take_while(|&c| is_ident_char(c)).collect();
                    let tok = match word.as_str() {
                        "ex" => Tok::Ex,
                        "all" => Tok::All,
                        "ex2" => Tok::Ex2,
                        "all2" => Tok::All2,
                        "in" => Tok::In,
                        "sub" => Tok::Sub,
                        "true" => Tok::True,
                        "false" => Tok::False,
                        "sing" => Tok::Sing,
                        _ => Tok::Ident(word.clone()),
                    };
                    (tok, word.len())
                }
                other => return Err(syntax(pos, format!("unexpected character `{other}`"))),
            }
        };
        out.push(Token { tok, pos });
        let end = pos + width;
        while i < bytes.len() && bytes[i].0 < end {
            i += 1;
        }
    }
    Ok(out)
}

fn is_point_name(s: &str) -> bool {
    s.starts_with(|c: char| c.is_ascii_lowercase())
}

/// Classifies an uppercase identifier as predicate, parameter or variable.
pub(crate) fn classify_set_name(name: &str) -> SetTerm {
    let numbered = |prefix: char| -> Option<usize> {
        let rest = name.strip_prefix(prefix)?;
        if !rest.is_empty() && rest.chars().all(|c| c.is_ascii_digit()) {
            rest.parse().ok()
        } else {
            None
        }
    };
    if let Some(i) = numbered('A') {
        SetTerm::Pred(i)
    } else if let Some(i) = numbered('W') {
        SetTerm::Param(i)
    } else {
        SetTerm::Var(name.to_string())
    }
}

struct Parser {
    toks: Vec<Token>,
    at: usize,
    end: usize,
    num_predicates: Option<usize>,
    scope: Vec<String>,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|t| &t.tok)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |t| t.pos)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        let msg = match self.peek() {
            None => format!("{} (at end of input)", msg.into()),
            Some(_) => msg.into(),
        };
        Err(Error::Syntax {
            pos: self.pos(),
            msg,
        })
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.at).map(|t| t.tok.clone());
        if t.is_some() {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        if self.peek() == Some(&tok) {
            self.at += 1;
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn formula(&mut self) -> Result<Formula> {
        let mut lhs = self.implication()?;
        while self.peek() == Some(&Tok::Iff) {
            self.at += 1;
            let rhs = self.implication()?;
            lhs = Formula::iff(lhs, rhs);
        }
        Ok(lhs)
    }

    fn implication(&mut self) -> Result<Formula> {
        let lhs = self.disjunction()?;
        if self.peek() == Some(&Tok::Implies) {
            self.at += 1;
            let rhs = self.implication()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula> {
        let mut lhs = self.conjunction()?;
        while self.peek() == Some(&Tok::Or) {
            self.at += 1;
            let rhs = self.conjunction()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula> {
        let mut lhs = self.unary()?;
        while self.peek() == Some(&Tok::And) {
            self.at += 1;
            let rhs = self.unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula> {
        match self.peek() {
            Some(Tok::Not) => {
                self.at += 1;
                Ok(Formula::not(self.unary()?))
            }
            Some(Tok::LParen) => {
                self.at += 1;
                let f = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Some(Tok::Ex | Tok::All | Tok::Ex2 | Tok::All2) => self.quantified(),
            _ => self.atom(),
        }
    }

    fn quantified(&mut self) -> Result<Formula> {
        let kw = self.bump().expect("peeked");
        let second_order = matches!(kw, Tok::Ex2 | Tok::All2);
        let pos = self.pos();
        let name = match self.bump() {
            Some(Tok::Ident(name)) => name,
            other => {
                if other.is_some() {
                    self.at -= 1;
                }
                return self.err("expected a variable after quantifier");
            }
        };
        if second_order {
            if is_point_name(&name) {
                return Err(Error::SortMismatch(format!(
                    "`{name}` is a point variable but is bound by a set quantifier"
                )));
            }
            if !matches!(classify_set_name(&name), SetTerm::Var(_)) {
                return Err(Error::Syntax {
                    pos,
                    msg: format!("`{name}` is a constant and cannot be bound"),
                });
            }
        } else if !is_point_name(&name) {
            return Err(Error::SortMismatch(format!(
                "`{name}` is a set variable but is bound by a point quantifier"
            )));
        }
        if self.scope.contains(&name) {
            return Err(Error::Shadowing(name));
        }
        self.expect(Tok::Dot, "`.` after quantified variable")?;
        self.scope.push(name.clone());
        let body = self.formula()?;
        self.scope.pop();
        let body = Box::new(body);
        Ok(match kw {
            Tok::Ex => Formula::ExistsFO(name, body),
            Tok::All => Formula::ForallFO(name, body),
            Tok::Ex2 => Formula::ExistsSO(name, body),
            _ => Formula::ForallSO(name, body),
        })
    }

    fn set_term(&mut self) -> Result<SetTerm> {
        match self.bump() {
            Some(Tok::Ident(name)) => {
                if is_point_name(&name) {
                    return Err(Error::SortMismatch(format!(
                        "`{name}` is a point variable where a set term is required"
                    )));
                }
                let term = classify_set_name(&name);
                match term {
                    SetTerm::Pred(i) => {
                        if let Some(m) = self.num_predicates {
                            if i >= m {
                                return Err(Error::UnknownPredicate(name));
                            }
                        }
                    }
                    SetTerm::Param(0) => {
                        return Err(Error::Syntax {
                            pos: self.toks[self.at - 1].pos,
                            msg: "parameters are numbered from W1".into(),
                        })
                    }
                    _ => {}
                }
                Ok(term)
            }
            other => {
                if other.is_some() {
                    self.at -= 1;
                }
                self.err("expected a set term")
            }
        }
    }

    fn point_var(&mut self) -> Result<String> {
        match self.bump() {
            Some(Tok::Ident(name)) if is_point_name(&name) => Ok(name),
            Some(Tok::Ident(name)) => Err(Error::SortMismatch(format!(
                "`{name}` is a set term where a point variable is required"
            ))),
            Some(_) => {
                self.at -= 1;
                self.err("expected a point variable")
            }
            None => self.err("expected a point variable"),
        }
    }

    fn atom(&mut self) -> Result<Formula> {
        match self.peek().cloned() {
            Some(Tok::True) => {
                self.at += 1;
                Ok(Formula::True)
            }
            Some(Tok::False) => {
                self.at += 1;
                Ok(Formula::False)
            }
            Some(Tok::Sing) => {
                self.at += 1;
                self.expect(Tok::LParen, "`(` after sing")?;
                let s = self.set_term()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(Formula::Sing(s))
            }
            Some(Tok::Ident(name)) if is_point_name(&name) => {
                self.at += 1;
                match self.bump() {
                    Some(Tok::Lt) => Ok(Formula::Lt(name, self.point_var()?)),
                    Some(Tok::Eq) => Ok(Formula::Eq(name, self.point_var()?)),
                    Some(Tok::In) => Ok(Formula::In(name, self.set_term()?)),
                    Some(Tok::Sub | Tok::EqSet) => Err(Error::SortMismatch(format!(
                        "`{name}` is a point variable; set comparison needs set terms"
                    ))),
                    Some(_) => {
                        self.at -= 1;
                        self.err("expected `<`, `=` or `in`")
                    }
                    None => {
                        self.err("expected `<`, `=` or `in`")
                    }
                }
            }
            Some(Tok::Ident(_)) => {
                let lhs = self.set_term()?;
                match self.bump() {
                    Some(Tok::Sub) => Ok(Formula::SubSet(lhs, self.set_term()?)),
                    Some(Tok::EqSet) => Ok(Formula::EqSet(lhs, self.set_term()?)),
                    Some(Tok::Lt | Tok::Eq | Tok::In) => Err(Error::SortMismatch(format!(
                        "`{lhs}` is a set term; `<`, `=` and `in` need a point variable on the left"
                    ))),
                    other => {
                        if other.is_some() {
                            self.at -= 1;
                        }
                        self.err("expected `sub` or `=set`")
                    }
                }
            }
            _ => self.err("expected a formula"),
        }
    }
}

/// Parses a formula. Predicate constants must be among `A0..A(m-1)` with
/// `m = num_predicates`. Bound variables are renamed apart; a variable bound
/// twice on one path is rejected.
pub fn parse_formula(text: &str, num_predicates: usize) -> Result<Formula> {
    parse_with(text, Some(num_predicates))
}

pub(crate) fn parse_with(text: &str, num_predicates: Option<usize>) -> Result<Formula> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        at: 0,
        end: text.len(),
        num_predicates,
        scope: Vec::new(),
    };
    let f = p.formula()?;
    if p.at < p.toks.len() {
        return p.err("unexpected trailing input");
    }
    Ok(f.rename_apart(&BTreeSet::new()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_nested_quantifiers() {
        let f = parse_formula("ex x. all y. (x = y | y < x)", 0).unwrap();
        let want = Formula::exists_fo(
            "x",
            Formula::forall_fo("y", Formula::or(Formula::eq("x", "y"), Formula::lt("y", "x"))),
        );
        assert_eq!(f, want);
    }

    #[test]
    fn parses_predicate_membership() {
        let f = parse_formula("ex x. x in A0", 1).unwrap();
        assert_eq!(f, Formula::exists_fo("x", Formula::mem("x", SetTerm::Pred(0))));
    }

    #[test]
    fn unbalanced_input_reports_end() {
        let text = "ex x. (x <";
        match parse_formula(text, 0) {
            Err(Error::Syntax { pos, .. }) => assert_eq!(pos, text.len()),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_predicate() {
        assert_eq!(
            parse_formula("ex x. x in A1", 1),
            Err(Error::UnknownPredicate("A1".into()))
        );
    }

    #[test]
    fn sort_mismatch() {
        assert!(matches!(parse_formula("ex y. X < y", 0), Err(Error::SortMismatch(_))));
        assert!(matches!(parse_formula("x sub A0", 1), Err(Error::SortMismatch(_))));
        assert!(matches!(parse_formula("ex X. true", 0), Err(Error::SortMismatch(_))));
    }

    #[test]
    fn shadowing_rejected() {
        assert_eq!(
            parse_formula("ex x. ex x. x < x", 0),
            Err(Error::Shadowing("x".into()))
        );
    }

    #[test]
    fn sibling_binders_renamed_apart() {
        let f = parse_formula("(ex x. x in A0) & (x < y) & (ex x. true)", 1).unwrap();
        let fv = f.free_vars();
        assert!(fv.points.contains("x") && fv.points.contains("y"));
        let text = f.to_string();
        assert!(text.contains("ex x_1.") && text.contains("ex x_2."), "{text}");
    }

    #[test]
    fn precedence() {
        let f = parse_formula("~ true & false | true -> false <-> true", 0).unwrap();
        let want = Formula::iff(
            Formula::implies(
                Formula::or(Formula::and(Formula::not(Formula::True), Formula::False), Formula::True),
                Formula::False,
            ),
            Formula::True,
        );
        assert_eq!(f, want);
    }

    #[test]
    fn set_atoms() {
        let f = parse_formula("all2 X. X sub A0 -> sing(X) | X =set W1", 1).unwrap();
        assert!(matches!(f, Formula::ForallSO(..)));
        assert!(parse_formula("ex2 A0. true", 1).is_err());
        assert!(parse_formula("X sub W0", 0).is_err());
    }
}
