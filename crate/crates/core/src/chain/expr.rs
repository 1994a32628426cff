use std::fmt;

use super::word::Word;
use crate::error::{Error, Result};

/// A chain built from finite words by concatenation and ω-power. Every
/// denoted order type is a well-order below ω^ω.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ChainExpr {
    Finite(Word),
    Concat(Box<ChainExpr>, Box<ChainExpr>),
    OmegaPower(Box<ChainExpr>),
}

impl ChainExpr {
    pub fn width(&self) -> usize {
        match self {
            ChainExpr::Finite(w) => w.width(),
            ChainExpr::Concat(a, _) | ChainExpr::OmegaPower(a) => a.width(),
        }
    }

    /// True when every leaf is the empty word.
    pub fn is_provably_empty(&self) -> bool {
        match self {
            ChainExpr::Finite(w) => w.is_empty(),
            ChainExpr::Concat(a, b) => a.is_provably_empty() && b.is_provably_empty(),
            ChainExpr::OmegaPower(a) => a.is_provably_empty(),
        }
    }

    /// The word denoted, when the expression has no ω-power.
    pub fn as_finite(&self) -> Option<Word> {
        match self {
            ChainExpr::Finite(w) => Some(w.clone()),
            ChainExpr::Concat(a, b) => Some(a.as_finite()?.concat(&b.as_finite()?)),
            ChainExpr::OmegaPower(_) => None,
        }
    }
}

impl fmt::Display for ChainExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChainExpr::Finite(w) => write!(f, "{w}"),
            ChainExpr::Concat(a, b) => {
                write!(f, "{a} + ")?;
                match **b {
                    ChainExpr::Concat(..) => write!(f, "({b})"),
                    _ => write!(f, "{b}"),
                }
            }
            ChainExpr::OmegaPower(a) => write!(f, "({a})^w"),
        }
    }
}

struct Scanner<'a> {
    text: &'a str,
    at: usize,
    width: usize,
}

impl Scanner<'_> {
    fn skip_ws(&mut self) {
        while let Some(c) = self.text[self.at..].chars().next() {
            if !c.is_whitespace() {
                break;
            }
            self.at += c.len_utf8();
        }
    }

    fn eat(&mut self, s: &str) -> bool {
        self.skip_ws();
        if self.text[self.at..].starts_with(s) {
            self.at += s.len();
            true
        } else {
            false
        }
    }

    fn err<T>(&self, msg: &str) -> Result<T> {
        Err(Error::Syntax {
            pos: self.at,
            msg: msg.to_string(),
        })
    }

    fn expr(&mut self) -> Result<ChainExpr> {
        let mut lhs = self.term()?;
        while self.eat("+") {
            let rhs = self.term()?;
            lhs = ChainExpr::Concat(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<ChainExpr> {
        let start = self.at;
        let atom = self.atom()?;
        if self.eat("^w") {
            if atom.is_provably_empty() {
                return Err(Error::Syntax {
                    pos: start,
                    msg: "ω-power of an empty chain".into(),
                });
            }
            return Ok(ChainExpr::OmegaPower(Box::new(atom)));
        }
        Ok(atom)
    }

    fn atom(&mut self) -> Result<ChainExpr> {
        if self.eat("(") {
            let e = self.expr()?;
            if !self.eat(")") {
                return self.err("expected `)`");
            }
            return Ok(e);
        }
        if self.eat("w:") {
            let rest = &self.text[self.at..];
            let len: usize = rest
                .chars()
                .take_while(|c| c.is_ascii_alphanumeric() || *c == '.' || *c == '·')
                .map(char::len_utf8)
                .sum();
            let bits = &rest[..len];
            self.at += len;
            return Ok(ChainExpr::Finite(Word::from_bits(bits, self.width)?));
        }
        self.err("expected `w:<bits>` or `(`")
    }
}

/// Parses `expr := term ("+" term)*`, `term := atom | atom "^w"`,
/// `atom := "w:" bits | "(" expr ")"` with letters of width `m`.
pub fn parse_chain_expr(text: &str, m: usize) -> Result<ChainExpr> {
    let mut s = Scanner {
        text,
        at: 0,
        width: m,
    };
    let e = s.expr()?;
    s.skip_ws();
    if s.at != text.len() {
        return s.err("unexpected trailing input");
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::Letter;

    #[test]
    fn finite_word() {
        let e = parse_chain_expr("w:011", 1).unwrap();
        let want = Word::new(1, vec![Letter(0), Letter(1), Letter(1)]).unwrap();
        assert_eq!(e, ChainExpr::Finite(want));
    }

    #[test]
    fn omega_then_letter() {
        let e = parse_chain_expr("(w:1)^w + w:0", 1).unwrap();
        let one = ChainExpr::Finite(Word::from_bits("1", 1).unwrap());
        let zero = ChainExpr::Finite(Word::from_bits("0", 1).unwrap());
        assert_eq!(
            e,
            ChainExpr::Concat(Box::new(ChainExpr::OmegaPower(Box::new(one))), Box::new(zero))
        );
        assert_eq!(parse_chain_expr(&e.to_string(), 1).unwrap(), e);
    }

    #[test]
    fn rejects_bad_letters_and_empty_powers() {
        assert!(matches!(parse_chain_expr("w:2", 1), Err(Error::InvalidLetter(_))));
        assert!(parse_chain_expr("(w:)^w", 1).is_err());
        assert!(parse_chain_expr("(w: + w:)^w", 1).is_err());
        assert!(parse_chain_expr("w:1 +", 1).is_err());
    }

    #[test]
    fn flattening() {
        let e = parse_chain_expr("w:1 + (w:0 + w:11)", 1).unwrap();
        assert_eq!(e.as_finite().unwrap().bits(), "1011");
        assert!(parse_chain_expr("(w:1)^w", 1).unwrap().as_finite().is_none());
    }
}
