use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::interpretation::{x_var, y_var, Arity, Interpretation};
use super::target::TargetFormula;
use crate::chain::{oracle_eval, Assignment, PosSet, Segment, Word};
use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::guards::Guards;

/// A `d`-tuple of position sets: one element of the interpreted universe.
pub type Tuple = Vec<PosSet>;

pub fn show_tuple(t: &[PosSet]) -> String {
    if t.len() == 1 {
        return t[0].to_string();
    }
    let parts: Vec<String> = t.iter().map(|s| s.to_string()).collect();
    format!("({})", parts.join(","))
}

fn show_args(args: &[Tuple]) -> String {
    args.iter().map(|t| show_tuple(t)).collect::<Vec<_>>().join(", ")
}

/// Why a word fails to respect an interpretation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RespectFailure {
    EmptyUniverse,
    NotReflexive(Tuple),
    NotSymmetric(Tuple, Tuple),
    NotTransitive(Tuple, Tuple, Tuple),
    /// The relation holds of `holds` but not of `fails`, which differs in
    /// one argument by an equivalent element.
    NotInvariant {
        relation: String,
        holds: Vec<Tuple>,
        fails: Vec<Tuple>,
    },
}

impl fmt::Display for RespectFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RespectFailure::EmptyUniverse => f.write_str("the universe is empty"),
            RespectFailure::NotReflexive(a) => write!(f, "E fails to be reflexive at {}", show_tuple(a)),
            RespectFailure::NotSymmetric(a, b) => write!(
                f,
                "E fails to be symmetric: E({}, {}) but not E({1}, {0})",
                show_tuple(a),
                show_tuple(b)
            ),
            RespectFailure::NotTransitive(a, b, c) => write!(
                f,
                "E fails to be transitive: E({}, {}) and E({1}, {}) but not E({0}, {2})",
                show_tuple(a),
                show_tuple(b),
                show_tuple(c)
            ),
            RespectFailure::NotInvariant {
                relation,
                holds,
                fails,
            } => write!(
                f,
                "{relation}({}) holds, {relation}({}) fails, arguments equivalent",
                show_args(holds),
                show_args(fails)
            ),
        }
    }
}

/// The finite structure an interpretation defines inside one word: the
/// universe `U*`, the relation `E*` and the relation tables, evaluated by
/// brute force.
#[derive(Debug, Clone)]
pub struct Structure {
    pub word: Word,
    pub dim: usize,
    /// `U*` in increasing tuple order.
    pub universe: Vec<Tuple>,
    equiv: Vec<Vec<bool>>,
    relations: Vec<(String, usize, Vec<bool>)>,
}

fn assignment(params: &[PosSet], xs: &[PosSet], ys: &[PosSet]) -> Assignment {
    let mut a = Assignment::new().with_params(params.to_vec());
    for (i, s) in xs.iter().enumerate() {
        a = a.set(&x_var(i), *s);
    }
    for (i, s) in ys.iter().enumerate() {
        a = a.set(&y_var(i), *s);
    }
    a
}

/// All `d`-tuples over a word of length `len`, ordered lexicographically
/// by component masks.
pub fn all_tuples(dim: usize, len: usize) -> Vec<Tuple> {
    let mask = (1u64 << len) - 1;
    (0u64..1 << (dim * len))
        .map(|t| {
            (0..dim)
                .map(|i| PosSet(t >> (len * (dim - 1 - i)) & mask))
                .collect()
        })
        .collect()
}

impl Structure {
    pub fn compute(w: &Word, interp: &Interpretation, params: &[PosSet], guards: &Guards) -> Result<Structure> {
        guards.check_len(interp.dim * w.len())?;
        if params.len() != interp.params {
            return Err(Error::Interp(format!(
                "interpretation declares {} parameters, {} given",
                interp.params,
                params.len()
            )));
        }
        let eval = |f: &Formula, xs: &[PosSet], ys: &[PosSet]| -> Result<bool> {
            oracle_eval(w, f, &assignment(params, xs, ys), guards)
        };
        let mut universe = Vec::new();
        for t in all_tuples(interp.dim, w.len()) {
            if eval(&interp.universe, &t, &[])? {
                universe.push(t);
            }
        }
        let n = universe.len();
        let mut equiv = vec![vec![false; n]; n];
        for i in 0..n {
            for j in 0..n {
                equiv[i][j] = eval(&interp.equality, &universe[i], &universe[j])?;
            }
        }
        let mut relations = Vec::new();
        for r in &interp.relations {
            let k = r.arity.count();
            let mut table = Vec::with_capacity(n.pow(k as u32));
            for idx in 0..n.pow(k as u32) {
                let args = Self::unrank(idx, n, k);
                let value = match r.arity {
                    Arity::Unary => eval(&r.formula, &universe[args[0]], &[])?,
                    Arity::UnaryY => eval(&r.formula, &[], &universe[args[0]])?,
                    Arity::Binary => eval(&r.formula, &universe[args[0]], &universe[args[1]])?,
                };
                table.push(value);
            }
            relations.push((r.name.clone(), k, table));
        }
        Ok(Structure {
            word: w.clone(),
            dim: interp.dim,
            universe,
            equiv,
            relations,
        })
    }

    fn unrank(mut idx: usize, n: usize, k: usize) -> Vec<usize> {
        let mut out = vec![0; k];
        for slot in out.iter_mut().rev() {
            *slot = idx % n;
            idx /= n;
        }
        out
    }

    fn rank(args: &[usize], n: usize) -> usize {
        args.iter().fold(0, |acc, &a| acc * n + a)
    }

    pub fn equivalent(&self, i: usize, j: usize) -> bool {
        self.equiv[i][j]
    }

    /// First failure among: nonempty universe, reflexivity, symmetry and
    /// transitivity of `E*`.
    pub fn equivalence_failure(&self) -> Option<RespectFailure> {
        let n = self.universe.len();
        let u = &self.universe;
        if n == 0 {
            return Some(RespectFailure::EmptyUniverse);
        }
        if let Some(i) = (0..n).find(|&i| !self.equiv[i][i]) {
            return Some(RespectFailure::NotReflexive(u[i].clone()));
        }
        for i in 0..n {
            for j in 0..n {
                if self.equiv[i][j] && !self.equiv[j][i] {
                    return Some(RespectFailure::NotSymmetric(u[i].clone(), u[j].clone()));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                if !self.equiv[i][j] {
                    continue;
                }
                if let Some(k) = (0..n).find(|&k| self.equiv[j][k] && !self.equiv[i][k]) {
                    return Some(RespectFailure::NotTransitive(u[i].clone(), u[j].clone(), u[k].clone()));
                }
            }
        }
        None
    }

    /// First violation of invariance of one relation under `E*`. For each
    /// argument tuple where the relation holds, each argument is replaced
    /// by the equivalent elements that follow it, cyclically.
    pub fn relation_failure(&self, name: &str) -> Result<Option<RespectFailure>> {
        let (_, k, table) = self
            .relations
            .iter()
            .find(|(n, _, _)| n == name)
            .ok_or_else(|| Error::Interp(format!("relation `{name}` is not interpreted")))?;
        let n = self.universe.len();
        for idx in 0..table.len() {
            if !table[idx] {
                continue;
            }
            let args = Self::unrank(idx, n, *k);
            for pos in 0..*k {
                let a = args[pos];
                for step in 1..n {
                    let b = (a + step) % n;
                    if !self.equiv[a][b] {
                        continue;
                    }
                    let mut other = args.clone();
                    other[pos] = b;
                    if !table[Self::rank(&other, n)] {
                        let tuples = |v: &[usize]| v.iter().map(|&i| self.universe[i].clone()).collect();
                        return Ok(Some(RespectFailure::NotInvariant {
                            relation: name.to_string(),
                            holds: tuples(&args),
                            fails: tuples(&other),
                        }));
                    }
                }
            }
        }
        Ok(None)
    }

    /// First reason the structure fails to respect the interpretation:
    /// equivalence conditions, then relations by decreasing arity.
    pub fn respect_failure(&self) -> Result<Option<RespectFailure>> {
        if let Some(f) = self.equivalence_failure() {
            return Ok(Some(f));
        }
        let mut order: Vec<(usize, usize)> = self.relations.iter().enumerate().map(|(i, r)| (i, r.1)).collect();
        order.sort_by_key(|&(i, k)| (std::cmp::Reverse(k), i));
        for (i, _) in order {
            let name = self.relations[i].0.clone();
            if let Some(f) = self.relation_failure(&name)? {
                return Ok(Some(f));
            }
        }
        Ok(None)
    }

    /// Index of the least member of each element's class.
    fn class_leaders(&self) -> Vec<usize> {
        (0..self.universe.len())
            .map(|i| (0..=i).find(|&j| self.equiv[i][j]).expect("reflexive"))
            .collect()
    }

    /// The quotient structure; refuses when the word does not respect the
    /// interpretation.
    pub fn image(&self) -> Result<QuotientModel> {
        if let Some(f) = self.respect_failure()? {
            return Err(Error::NotRespected(f.to_string()));
        }
        let leaders = self.class_leaders();
        let mut class_of = vec![usize::MAX; leaders.len()];
        let mut representatives = Vec::new();
        let mut members: Vec<Vec<Tuple>> = Vec::new();
        for (i, &l) in leaders.iter().enumerate() {
            if l == i {
                class_of[i] = representatives.len();
                representatives.push(self.universe[i].clone());
                members.push(Vec::new());
            }
            class_of[i] = class_of[l];
            members[class_of[i]].push(self.universe[i].clone());
        }
        let n = self.universe.len();
        let mut relations = BTreeMap::new();
        for (name, k, table) in &self.relations {
            let mut tuples = BTreeSet::new();
            for (idx, &v) in table.iter().enumerate() {
                if v {
                    tuples.insert(Self::unrank(idx, n, *k).into_iter().map(|a| class_of[a]).collect());
                }
            }
            relations.insert(name.clone(), Relation { arity: *k, tuples });
        }
        Ok(QuotientModel {
            size: representatives.len(),
            representatives,
            members,
            relations,
        })
    }

    /// Largest number of pairwise nonequivalent elements that all agree
    /// outside `seg`.
    pub fn bouquet_size(&self, seg: &Segment) -> Result<usize> {
        if seg.hi > self.word.len() {
            return Err(Error::OutOfRange {
                what: "segment end",
                value: seg.hi,
                limit: self.word.len(),
            });
        }
        if let Some(f) = self.respect_failure()? {
            return Err(Error::NotRespected(f.to_string()));
        }
        let leaders = self.class_leaders();
        let outside = PosSet::full(self.word.len()).minus(seg.mask());
        let mut groups: BTreeMap<Vec<PosSet>, BTreeSet<usize>> = BTreeMap::new();
        for (i, t) in self.universe.iter().enumerate() {
            let key = t.iter().map(|s| s.intersect(outside)).collect();
            groups.entry(key).or_default().insert(leaders[i]);
        }
        Ok(groups.values().map(|g| g.len()).max().unwrap_or(0))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    pub arity: usize,
    pub tuples: BTreeSet<Vec<usize>>,
}

/// A finite structure whose elements are `0..size`. Images of
/// interpretations also record each class's members, least first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientModel {
    pub size: usize,
    pub representatives: Vec<Tuple>,
    pub members: Vec<Vec<Tuple>>,
    pub relations: BTreeMap<String, Relation>,
}

impl QuotientModel {
    pub fn new(size: usize, relations: BTreeMap<String, Relation>) -> Result<QuotientModel> {
        for (name, r) in &relations {
            if r.tuples.iter().any(|t| t.len() != r.arity || t.iter().any(|&a| a >= size)) {
                return Err(Error::Mismatch(format!("relation `{name}` has ill-formed tuples")));
            }
        }
        Ok(QuotientModel {
            size,
            representatives: Vec::new(),
            members: Vec::new(),
            relations,
        })
    }

    /// Renames a relation symbol, e.g. to read `Code` as the `p` of the
    /// pairing signature.
    pub fn rename(&mut self, from: &str, to: &str) -> Result<()> {
        let r = self
            .relations
            .remove(from)
            .ok_or_else(|| Error::Interp(format!("no relation `{from}`")))?;
        self.relations.insert(to.to_string(), r);
        Ok(())
    }

    pub fn holds(&self, name: &str, args: &[usize]) -> bool {
        self.relations.get(name).is_some_and(|r| r.tuples.contains(args))
    }

    /// Index of the class containing `t`.
    pub fn class_of(&self, t: &[PosSet]) -> Option<usize> {
        self.members.iter().position(|m| m.iter().any(|x| x.as_slice() == t))
    }

    pub fn render(&self) -> String {
        let mut out = Vec::new();
        for (i, r) in self.representatives.iter().enumerate() {
            out.push(format!("class {i}: {}", show_tuple(r)));
        }
        for (name, r) in &self.relations {
            let tuples: Vec<String> = r
                .tuples
                .iter()
                .map(|t| format!("({})", t.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(",")))
                .collect();
            out.push(format!("{name}: {}", tuples.join(" ")));
        }
        out.join("\n")
    }
}

/// Evaluates a first-order formula in a finite structure; free variables
/// take class indices from `env`.
pub fn model_check_fo(m: &QuotientModel, f: &TargetFormula, env: &BTreeMap<String, usize>) -> Result<bool> {
    for (name, arity) in f.relations() {
        match m.relations.get(&name) {
            None => return Err(Error::Interp(format!("relation `{name}` is not in the model"))),
            Some(r) if r.arity != arity => {
                return Err(Error::Interp(format!(
                    "relation `{name}` has arity {}, used with {arity}",
                    r.arity
                )))
            }
            _ => {}
        }
    }
    if let Some(x) = f.free_vars().iter().find(|x| !env.contains_key(*x)) {
        return Err(Error::Unassigned(x.clone()));
    }
    let mut scope: Vec<(String, usize)> = env.iter().map(|(k, &v)| (k.clone(), v)).collect();
    Ok(check(m, f, &mut scope))
}

fn check(m: &QuotientModel, f: &TargetFormula, scope: &mut Vec<(String, usize)>) -> bool {
    use TargetFormula::*;
    let val = |x: &String, scope: &Vec<(String, usize)>| {
        scope.iter().rev().find(|(n, _)| n == x).expect("checked").1
    };
    match f {
        True => true,
        False => false,
        Eq(x, y) => val(x, scope) == val(y, scope),
        Rel(name, args) => {
            let a: Vec<usize> = args.iter().map(|x| val(x, scope)).collect();
            m.holds(name, &a)
        }
        Not(a) => !check(m, a, scope),
        And(a, b) => check(m, a, scope) && check(m, b, scope),
        Or(a, b) => check(m, a, scope) || check(m, b, scope),
        Implies(a, b) => !check(m, a, scope) || check(m, b, scope),
        Iff(a, b) => check(m, a, scope) == check(m, b, scope),
        Exists(x, a) | Forall(x, a) => {
            let want = matches!(f, Exists(..));
            let mut result = !want;
            for c in 0..m.size {
                scope.push((x.clone(), c));
                let v = check(m, a, scope);
                scope.pop();
                if v == want {
                    result = want;
                    break;
                }
            }
            result
        }
    }
}

/// `None` when `w` respects the interpretation, otherwise the first failure.
pub fn respects(w: &Word, interp: &Interpretation, params: &[PosSet], guards: &Guards) -> Result<Option<RespectFailure>> {
    Structure::compute(w, interp, params, guards)?.respect_failure()
}

pub fn image(w: &Word, interp: &Interpretation, params: &[PosSet], guards: &Guards) -> Result<QuotientModel> {
    Structure::compute(w, interp, params, guards)?.image()
}

pub fn bouquet_size(w: &Word, interp: &Interpretation, params: &[PosSet], seg: &Segment, guards: &Guards) -> Result<usize> {
    Structure::compute(w, interp, params, guards)?.bouquet_size(seg)
}
