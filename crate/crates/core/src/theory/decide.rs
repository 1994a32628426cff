use std::collections::BTreeMap;

use super::engine::{TheoryEngine, TheoryHandle};
use super::store::{NodeId, Rel};
use crate::error::{Error, Result};
use crate::formula::{desugar, CoreFormula, Formula, SetTerm};

/// Assignment of set terms to theory columns. Predicates default to their
/// own index.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ColumnMap {
    pub preds: Option<Vec<usize>>,
    pub params: Vec<usize>,
    pub vars: BTreeMap<String, usize>,
}

impl ColumnMap {
    fn resolve(&self, t: &SetTerm, scope: &[(String, usize)]) -> Result<usize> {
        match t {
            SetTerm::Var(v) => scope
                .iter()
                .rev()
                .find(|(n, _)| n == v)
                .map(|(_, c)| *c)
                .or_else(|| self.vars.get(v).copied())
                .ok_or_else(|| Error::Unassigned(v.clone())),
            SetTerm::Pred(i) => Ok(match &self.preds {
                None => *i,
                Some(map) => *map.get(*i).ok_or_else(|| Error::UnknownPredicate(format!("A{i}")))?,
            }),
            SetTerm::Param(i) => self
                .params
                .get(i - 1)
                .copied()
                .ok_or_else(|| Error::Unassigned(format!("W{i}"))),
        }
    }
}

impl TheoryEngine {
    /// Truth of `f` in every model whose theory is `t`. Requires the
    /// quantifier depth of `f` to be at most the level of `t`.
    pub fn decide(&mut self, f: &Formula, t: TheoryHandle) -> Result<bool> {
        self.decide_with(f, t, &ColumnMap::default())
    }

    pub fn decide_with(&mut self, f: &Formula, t: TheoryHandle, columns: &ColumnMap) -> Result<bool> {
        self.decide_core_with(&desugar(f), t, columns)
    }

    pub fn decide_core_with(&mut self, f: &CoreFormula, t: TheoryHandle, columns: &ColumnMap) -> Result<bool> {
        let depth = f.depth();
        if depth > t.level {
            return Err(Error::DepthExceedsLevel {
                depth,
                level: t.level,
            });
        }
        self.check_terms(f, t, columns, &mut Vec::new())?;
        self.eval(f, t, columns, &mut Vec::new())
    }

    fn check_terms(&self, f: &CoreFormula, t: TheoryHandle, cm: &ColumnMap, scope: &mut Vec<(String, usize)>) -> Result<()> {
        use CoreFormula::*;
        let term = |x: &SetTerm, scope: &[(String, usize)]| -> Result<()> {
            let c = cm.resolve(x, scope)?;
            if c >= t.cols + scope.len() {
                return Err(Error::OutOfRange {
                    what: "column",
                    value: c,
                    limit: t.cols,
                });
            }
            Ok(())
        };
        match f {
            True | False => Ok(()),
            Sing(a) => term(a, scope),
            SubSet(a, b) | PointLt(a, b) => {
                term(a, scope)?;
                term(b, scope)
            }
            Not(a) => self.check_terms(a, t, cm, scope),
            And(a, b) | Or(a, b) | Implies(a, b) | Iff(a, b) => {
                self.check_terms(a, t, cm, scope)?;
                self.check_terms(b, t, cm, scope)
            }
            Exists(x, a) | Forall(x, a) => {
                scope.push((x.clone(), t.cols + scope.len()));
                let r = self.check_terms(a, t, cm, scope);
                scope.pop();
                r
            }
        }
    }

    fn eval(&mut self, f: &CoreFormula, t: TheoryHandle, cm: &ColumnMap, scope: &mut Vec<(String, usize)>) -> Result<bool> {
        use CoreFormula::*;
        Ok(match f {
            True => true,
            False => false,
            Not(a) => !self.eval(a, t, cm, scope)?,
            And(a, b) => self.eval(a, t, cm, scope)? && self.eval(b, t, cm, scope)?,
            Or(a, b) => self.eval(a, t, cm, scope)? || self.eval(b, t, cm, scope)?,
            Implies(a, b) => !self.eval(a, t, cm, scope)? || self.eval(b, t, cm, scope)?,
            Iff(a, b) => self.eval(a, t, cm, scope)? == self.eval(b, t, cm, scope)?,
            Exists(x, a) | Forall(x, a) => {
                let want = matches!(f, Exists(..));
                scope.push((x.clone(), t.cols));
                let mut found = !want;
                for e in self.elements(t) {
                    if self.eval(a, e, cm, scope)? == want {
                        found = want;
                        break;
                    }
                }
                scope.pop();
                found
            }
            Sing(a) => {
                let x = cm.resolve(a, scope)?;
                let base = self.lower_to(t, 0)?.node;
                self.base_sing(base, x)
            }
            SubSet(a, b) => {
                let (x, y) = (cm.resolve(a, scope)?, cm.resolve(b, scope)?);
                let base = self.lower_to(t, 0)?.node;
                self.base_subset(base, x, y)
            }
            PointLt(a, b) => {
                let (x, y) = (cm.resolve(a, scope)?, cm.resolve(b, scope)?);
                let base = self.lower_to(t, 0)?.node;
                self.base_point_lt(base, x, y)
            }
        })
    }

    /// Some point is in column `x` and every point of `x` equals it.
    fn base_sing(&self, base: NodeId, x: usize) -> bool {
        self.children(base).iter().any(|&ty| {
            let pats = self.children(ty);
            let p0 = self.store().get_pattern(pats[0]);
            p0.member(0, x)
                && pats.iter().all(|&q| {
                    let q = self.store().get_pattern(q);
                    !q.member(1, x) || q.rel(0, 1) == Rel::Eq
                })
        })
    }

    fn base_subset(&self, base: NodeId, x: usize, y: usize) -> bool {
        self.children(base).iter().all(|&ty| {
            self.children(ty).iter().all(|&q| {
                let q = self.store().get_pattern(q);
                !q.member(1, x) || q.member(1, y)
            })
        })
    }

    fn base_point_lt(&self, base: NodeId, x: usize, y: usize) -> bool {
        self.children(base).iter().any(|&ty| {
            self.children(ty).iter().any(|&q| {
                let q = self.store().get_pattern(q);
                q.rel(0, 1) == Rel::Lt && q.member(0, x) && q.member(1, y)
            })
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{parse_chain_expr, Word};
    use crate::formula::parse_formula;

    #[test]
    fn finite_chain_has_maximum() {
        let mut e = TheoryEngine::default();
        let f = parse_formula("ex x. all y. (y<x | y=x)", 0).unwrap();
        let t = e.theory_of_word(&Word::from_bits("...", 0).unwrap(), 2).unwrap();
        assert!(e.decide(&f, t).unwrap());
    }

    #[test]
    fn omega_at_level_one() {
        let mut e = TheoryEngine::default();
        let om = parse_chain_expr("(w:1)^w", 1).unwrap();
        let t = e.theory_of_expr(&om, 1).unwrap();
        let all_in = parse_formula("all2 X. X sub A0", 1).unwrap();
        assert!(e.decide(&all_in, t).unwrap());
        let none = parse_formula("ex2 X. ~(X sub A0)", 1).unwrap();
        assert!(!e.decide(&none, t).unwrap());
    }

    #[test]
    fn large_closures_hit_the_guard() {
        let guards = crate::Guards {
            max_closure: 300,
            ..crate::Guards::default()
        };
        let mut e = TheoryEngine::new(guards);
        let om = parse_chain_expr("(w:1)^w", 1).unwrap();
        assert!(matches!(
            e.theory_of_expr(&om, 2),
            Err(Error::Resource { what: "closure size", .. })
        ));
    }

    #[test]
    fn membership_read_off() {
        let mut e = TheoryEngine::default();
        let f = parse_formula("ex x. x in A0", 1).unwrap();
        let t = e.theory_of_word(&Word::from_bits("01", 1).unwrap(), 1).unwrap();
        assert!(e.decide(&f, t).unwrap());
        let t = e.theory_of_word(&Word::from_bits("00", 1).unwrap(), 1).unwrap();
        assert!(!e.decide(&f, t).unwrap());
    }

    #[test]
    fn depth_must_fit() {
        let mut e = TheoryEngine::default();
        let f = parse_formula("ex x. ex y. x < y", 0).unwrap();
        let t = e.theory_of_word(&Word::from_bits("..", 0).unwrap(), 1).unwrap();
        assert_eq!(
            e.decide(&f, t),
            Err(Error::DepthExceedsLevel { depth: 2, level: 1 })
        );
    }

    #[test]
    fn free_variables_need_columns() {
        let mut e = TheoryEngine::default();
        let f = parse_formula("X sub A0", 1).unwrap();
        let w = Word::from_bits("01", 1).unwrap();
        let t = e.theory_of_word(&w, 0).unwrap();
        assert_eq!(e.decide(&f, t), Err(Error::Unassigned("X".into())));
        let x = crate::chain::PosSet::parse("1").unwrap();
        let t = e.theory_of_word_with(&w, &[x], 0).unwrap();
        let cm = ColumnMap {
            vars: [("X".to_string(), 1)].into(),
            ..ColumnMap::default()
        };
        assert!(e.decide_with(&f, t, &cm).unwrap());
    }
}
