//! Direct semantics by exhaustive quantification. Exponential in the word
//! length, so every entry point checks the configured length guard.

use std::collections::BTreeMap;
use std::fmt;

use super::word::{PosSet, Word};
use crate::error::{Error, Result};
use crate::formula::{CoreFormula, Formula, SetTerm};
use crate::guards::Guards;

/// Values for the free variables and parameters of a formula.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Assignment {
    pub points: BTreeMap<String, usize>,
    pub sets: BTreeMap<String, PosSet>,
    /// `params[i]` is the value of `W{i+1}`.
    pub params: Vec<PosSet>,
}

impl Assignment {
    pub fn new() -> Assignment {
        Assignment::default()
    }

    pub fn point(mut self, x: &str, p: usize) -> Assignment {
        self.points.insert(x.to_string(), p);
        self
    }

    pub fn set(mut self, x: &str, s: PosSet) -> Assignment {
        self.sets.insert(x.to_string(), s);
        self
    }

    pub fn with_params(mut self, params: Vec<PosSet>) -> Assignment {
        self.params = params;
        self
    }
}

struct Env<'a> {
    word: &'a Word,
    full: PosSet,
    points: Vec<(String, usize)>,
    sets: Vec<(String, PosSet)>,
    base: &'a Assignment,
}

impl Env<'_> {
    fn point(&self, x: &str) -> Result<usize> {
        self.points
            .iter()
            .rev()
            .find(|(n, _)| n == x)
            .map(|&(_, p)| p)
            .or_else(|| self.base.points.get(x).copied())
            .ok_or_else(|| Error::Unassigned(x.to_string()))
    }

    fn set(&self, t: &SetTerm) -> Result<PosSet> {
        match t {
            SetTerm::Var(x) => self
                .sets
                .iter()
                .rev()
                .find(|(n, _)| n == x)
                .map(|&(_, s)| s)
                .or_else(|| self.base.sets.get(x).copied())
                .ok_or_else(|| Error::Unassigned(x.clone())),
            SetTerm::Pred(i) => {
                if *i >= self.word.width() {
                    return Err(Error::UnknownPredicate(format!("A{i}")));
                }
                Ok(self.word.pred_set(*i))
            }
            SetTerm::Param(i) => self
                .base
                .params
                .get(i - 1)
                .copied()
                .ok_or_else(|| Error::Unassigned(format!("W{i}"))),
        }
    }

    fn eval(&mut self, f: &Formula) -> Result<bool> {
        use Formula::*;
        Ok(match f {
            True => true,
            False => false,
            Lt(x, y) => self.point(x)? < self.point(y)?,
            Eq(x, y) => self.point(x)? == self.point(y)?,
            In(x, s) => self.set(s)?.contains(self.point(x)?),
            SubSet(a, b) => self.set(a)?.is_subset(self.set(b)?),
            EqSet(a, b) => self.set(a)? == self.set(b)?,
            Sing(a) => self.set(a)?.len() == 1,
            Not(a) => !self.eval(a)?,
            And(a, b) => self.eval(a)? && self.eval(b)?,
            Or(a, b) => self.eval(a)? || self.eval(b)?,
            Implies(a, b) => !self.eval(a)? || self.eval(b)?,
            Iff(a, b) => self.eval(a)? == self.eval(b)?,
            ExistsFO(x, a) | ForallFO(x, a) => {
                let want = matches!(f, ExistsFO(..));
                for p in 0..self.word.len() {
                    self.points.push((x.clone(), p));
                    let v = self.eval(a);
                    self.points.pop();
                    if v? == want {
                        return Ok(want);
                    }
                }
                !want
            }
            ExistsSO(x, a) | ForallSO(x, a) => {
                let want = matches!(f, ExistsSO(..));
                for mask in 0..=self.full.0 {
                    self.sets.push((x.clone(), PosSet(mask)));
                    let v = self.eval(a);
                    self.sets.pop();
                    if v? == want {
                        return Ok(want);
                    }
                }
                !want
            }
        })
    }

    fn eval_core(&mut self, f: &CoreFormula) -> Result<bool> {
        use CoreFormula::*;
        Ok(match f {
            True => true,
            False => false,
            Sing(a) => self.set(a)?.len() == 1,
            SubSet(a, b) => self.set(a)?.is_subset(self.set(b)?),
            PointLt(a, b) => {
                let (a, b) = (self.set(a)?, self.set(b)?);
                // some element of a lies below some element of b
                !a.is_empty() && !b.is_empty() && a.0.trailing_zeros() < (b.bound() - 1) as u32
            }
            Not(a) => !self.eval_core(a)?,
            And(a, b) => self.eval_core(a)? && self.eval_core(b)?,
            Or(a, b) => self.eval_core(a)? || self.eval_core(b)?,
            Implies(a, b) => !self.eval_core(a)? || self.eval_core(b)?,
            Iff(a, b) => self.eval_core(a)? == self.eval_core(b)?,
            Exists(x, a) | Forall(x, a) => {
                let want = matches!(f, Exists(..));
                for mask in 0..=self.full.0 {
                    self.sets.push((x.clone(), PosSet(mask)));
                    let v = self.eval_core(a);
                    self.sets.pop();
                    if v? == want {
                        return Ok(want);
                    }
                }
                !want
            }
        })
    }
}

fn check_inputs(w: &Word, a: &Assignment, guards: &Guards) -> Result<()> {
    guards.check_len(w.len())?;
    let full = PosSet::full(w.len());
    for (x, &p) in &a.points {
        if p >= w.len() {
            return Err(Error::OutOfRange {
                what: "point assignment",
                value: p,
                limit: w.len(),
            });
        }
        let _ = x;
    }
    for s in a.sets.values().chain(a.params.iter()) {
        if !s.is_subset(full) {
            return Err(Error::OutOfRange {
                what: "set assignment position",
                value: s.bound() - 1,
                limit: w.len(),
            });
        }
    }
    Ok(())
}

/// Truth of `f` in the word under `assignment`, by exhaustive search.
pub fn oracle_eval(w: &Word, f: &Formula, assignment: &Assignment, guards: &Guards) -> Result<bool> {
    check_inputs(w, assignment, guards)?;
    let fv = f.free_vars();
    if let Some(x) = fv.points.iter().find(|x| !assignment.points.contains_key(*x)) {
        return Err(Error::Unassigned(x.clone()));
    }
    if let Some(x) = fv.sets.iter().find(|x| !assignment.sets.contains_key(*x)) {
        return Err(Error::Unassigned(x.clone()));
    }
    let mut env = Env {
        word: w,
        full: PosSet::full(w.len()),
        points: Vec::new(),
        sets: Vec::new(),
        base: assignment,
    };
    env.eval(f)
}

/// Same as [`oracle_eval`] for the set-only form.
pub fn oracle_eval_core(
    w: &Word,
    f: &CoreFormula,
    assignment: &Assignment,
    guards: &Guards,
) -> Result<bool> {
    check_inputs(w, assignment, guards)?;
    if let Some(x) = f.free_sets().iter().find(|x| !assignment.sets.contains_key(*x)) {
        return Err(Error::Unassigned(x.clone()));
    }
    let mut env = Env {
        word: w,
        full: PosSet::full(w.len()),
        points: Vec::new(),
        sets: Vec::new(),
        base: assignment,
    };
    env.eval_core(f)
}

/// The atomic type of one position: membership in each predicate and in
/// each extra set.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AtomicType {
    pub preds: Vec<bool>,
    pub extra: Vec<bool>,
}

impl fmt::Display for AtomicType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lits = self
            .preds
            .iter()
            .enumerate()
            .map(|(i, &b)| format!("x {} A{i}", if b { "∈" } else { "∉" }))
            .chain(
                self.extra
                    .iter()
                    .enumerate()
                    .map(|(i, &b)| format!("x {} X{i}", if b { "∈" } else { "∉" })),
            )
            .collect::<Vec<_>>();
        write!(f, "{{{}}}", lits.join(", "))
    }
}

pub fn point_atomic_type(w: &Word, extra_sets: &[PosSet], a: usize) -> Result<AtomicType> {
    if a >= w.len() {
        return Err(Error::OutOfRange {
            what: "position",
            value: a,
            limit: w.len(),
        });
    }
    let letter = w.letter(a);
    Ok(AtomicType {
        preds: (0..w.width()).map(|i| letter.has(i)).collect(),
        extra: extra_sets.iter().map(|s| s.contains(a)).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{desugar, parse_formula};

    fn eval(w: &str, m: usize, f: &str) -> bool {
        let w = Word::from_bits(w, m).unwrap();
        let f = parse_formula(f, m).unwrap();
        oracle_eval(&w, &f, &Assignment::new(), &Guards::default()).unwrap()
    }

    #[test]
    fn examples() {
        assert!(eval("01", 1, "ex x. x in A0"));
        assert!(!eval("011", 1, "ex x. x < x"));
        assert!(!eval("", 1, "ex x. x < x"));
        assert!(!eval("00", 1, "all2 X. ex x. x in X"));
    }

    #[test]
    fn unassigned_and_guard_errors() {
        let w = Word::from_bits("01", 1).unwrap();
        let f = parse_formula("x in A0", 1).unwrap();
        assert_eq!(
            oracle_eval(&w, &f, &Assignment::new(), &Guards::default()),
            Err(Error::Unassigned("x".into()))
        );
        assert_eq!(
            oracle_eval(&w, &f, &Assignment::new().point("x", 1), &Guards::default()),
            Ok(true)
        );
        let long = Word::from_bits(&"0".repeat(13), 1).unwrap();
        assert!(matches!(
            oracle_eval(&long, &Formula::True, &Assignment::new(), &Guards::default()),
            Err(Error::Resource { .. })
        ));
    }

    #[test]
    fn core_point_order() {
        let w = Word::from_bits("000", 1).unwrap();
        let f = parse_formula("x < y", 1).unwrap();
        let core = desugar(&f);
        for x in 0..3 {
            for y in 0..3 {
                let a = Assignment::new()
                    .set("Sx", PosSet::singleton(x))
                    .set("Sy", PosSet::singleton(y));
                assert_eq!(oracle_eval_core(&w, &core, &a, &Guards::default()).unwrap(), x < y);
            }
        }
    }

    #[test]
    fn atomic_types() {
        let w = Word::from_bits("01", 1).unwrap();
        assert_eq!(point_atomic_type(&w, &[], 1).unwrap().to_string(), "{x ∈ A0}");
        assert_eq!(point_atomic_type(&w, &[], 0).unwrap().to_string(), "{x ∉ A0}");
        assert!(point_atomic_type(&w, &[], 5).is_err());
        let t = point_atomic_type(&w, &[PosSet(0b01)], 0).unwrap();
        assert_eq!(t.extra, vec![true]);
    }
}
