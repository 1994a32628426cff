use std::sync::Arc;

use rustc_hash::{FxHashMap, FxHashSet};

use super::store::{BasePattern, NodeId, TheoryStore};
use crate::chain::{ChainExpr, PosSet, Word};
use crate::error::{Error, Result};
use crate::guards::Guards;

/// An interned `Th^n(M, A_0 .. A_{l-1})`.
///
/// Level 0 stores `th^2` of the empty point tuple: a set of one-point types,
/// each a set of two-point base patterns. Level `k + 1` stores the set of
/// level-`k` handles of all one-column extensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TheoryHandle {
    pub node: NodeId,
    pub level: usize,
    pub cols: usize,
}

impl TheoryHandle {
    pub fn n(&self) -> usize {
        self.level
    }

    pub fn l(&self) -> usize {
        self.cols
    }
}

/// Where a direct theory computation should switch to composition.
const DIRECT_BUDGET: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub(crate) struct SplitBits {
    pub(crate) bits: u64,
    pub(crate) len: u8,
}

impl SplitBits {
    pub(crate) const EMPTY: SplitBits = SplitBits { bits: 0, len: 0 };

    pub(crate) fn push(self, right: bool) -> SplitBits {
        SplitBits {
            bits: self.bits | (right as u64) << self.len,
            len: self.len + 1,
        }
    }

    pub(crate) fn is_right(self, i: usize) -> bool {
        self.bits >> i & 1 == 1
    }
}

#[derive(Debug, Default)]
struct Caches {
    lower: FxHashMap<(NodeId, u8, u16), NodeId>,
    tower_col: FxHashMap<(NodeId, u8, u16), NodeId>,
    tower_point: FxHashMap<(NodeId, u8, u16), NodeId>,
    theory_col: FxHashMap<(NodeId, u8, u16), NodeId>,
    lower_theory: FxHashMap<(NodeId, u8, u16), NodeId>,
    tower_sum: FxHashMap<(NodeId, NodeId, u8, u64, u8), NodeId>,
    sum: FxHashMap<(NodeId, NodeId, u8, u16), NodeId>,
    omega: FxHashMap<(NodeId, u8, u16), NodeId>,
}

/// Computes, composes and inspects theories. All values live in the
/// engine's [`TheoryStore`]; handles from different engines are unrelated.
#[derive(Debug, Default)]
pub struct TheoryEngine {
    store: TheoryStore,
    guards: Guards,
    caches: Caches,
}

impl TheoryEngine {
    pub fn new(guards: Guards) -> TheoryEngine {
        TheoryEngine {
            store: TheoryStore::new(),
            guards,
            caches: Caches::default(),
        }
    }

    pub fn guards(&self) -> Guards {
        self.guards
    }

    pub fn store(&self) -> &TheoryStore {
        &self.store
    }

    pub fn store_mut(&mut self) -> &mut TheoryStore {
        &mut self.store
    }

    pub fn digest(&mut self, h: TheoryHandle) -> String {
        self.store.digest(h.node)
    }

    pub(crate) fn children(&self, id: NodeId) -> Arc<[NodeId]> {
        self.store.children(id)
    }

    pub(crate) fn set(&mut self, children: Vec<NodeId>) -> NodeId {
        self.store.set(children)
    }

    /// Level-`level - 1` handles of the elements of `h`.
    pub fn elements(&self, h: TheoryHandle) -> Vec<TheoryHandle> {
        assert!(h.level > 0, "level-0 theories have no theory elements");
        self.children(h.node)
            .iter()
            .map(|&node| TheoryHandle {
                node,
                level: h.level - 1,
                cols: h.cols + 1,
            })
            .collect()
    }

    // ---- direct computation -------------------------------------------

    /// Column bits of every position: predicates first, then `sets`.
    pub(crate) fn column_bits(w: &Word, sets: &[PosSet]) -> Result<Vec<u32>> {
        let cols = w.width() + sets.len();
        if cols > 32 {
            return Err(Error::OutOfRange {
                what: "column count",
                value: cols,
                limit: 32,
            });
        }
        let mut bits: Vec<u32> = w.letters().iter().map(|l| l.0).collect();
        for (k, s) in sets.iter().enumerate() {
            if s.bound() > w.len() {
                return Err(Error::OutOfRange {
                    what: "set position",
                    value: s.bound() - 1,
                    limit: w.len(),
                });
            }
            for p in s.iter() {
                bits[p] |= 1 << (w.width() + k);
            }
        }
        Ok(bits)
    }

    pub(crate) fn direct_tower(&mut self, bits: &[u32], cols: usize, points: &mut Vec<usize>, k: usize) -> NodeId {
        if k == 0 {
            let members = points.iter().map(|&p| bits[p]).collect();
            return self.store.pattern(BasePattern::from_keys(cols, points, members));
        }
        let mut out = Vec::with_capacity(bits.len());
        for b in 0..bits.len() {
            points.push(b);
            out.push(self.direct_tower(bits, cols, points, k - 1));
            points.pop();
        }
        self.set(out)
    }

    fn direct_theory(&mut self, bits: &mut [u32], cols: usize, level: usize) -> NodeId {
        if level == 0 {
            return self.direct_tower(bits, cols, &mut Vec::new(), 2);
        }
        let len = bits.len();
        let flag = 1u32 << cols;
        let mut out = Vec::with_capacity(1 << len);
        for mask in 0u64..1 << len {
            for (i, b) in bits.iter_mut().enumerate() {
                if mask >> i & 1 == 1 {
                    *b |= flag;
                }
            }
            out.push(self.direct_theory(bits, cols + 1, level - 1));
            for b in bits.iter_mut() {
                *b &= !flag;
            }
        }
        self.set(out)
    }

    /// `Th^n` of a finite word by the defining recursion over all subsets.
    pub fn theory_of_word(&mut self, w: &Word, n: usize) -> Result<TheoryHandle> {
        self.theory_of_word_with(w, &[], n)
    }

    /// `Th^n(w, A_0 .. A_{m-1}, sets..)`: the extra sets become the columns
    /// after the predicates.
    pub fn theory_of_word_with(&mut self, w: &Word, sets: &[PosSet], n: usize) -> Result<TheoryHandle> {
        self.guards.check_level(n)?;
        self.guards.check_len(w.len())?;
        let mut bits = Self::column_bits(w, sets)?;
        let cols = w.width() + sets.len();
        if cols + n > 32 {
            return Err(Error::OutOfRange {
                what: "column count",
                value: cols + n,
                limit: 32,
            });
        }
        let node = self.direct_theory(&mut bits, cols, n);
        Ok(TheoryHandle { node, level: n, cols })
    }

    /// The theory of the empty chain.
    pub fn empty_theory(&mut self, n: usize, cols: usize) -> TheoryHandle {
        let mut node = self.set(Vec::new());
        for _ in 0..n {
            node = self.set(vec![node]);
        }
        TheoryHandle { node, level: n, cols }
    }

    /// Structural fold of a chain expression. Long finite words are split
    /// and composed, which gives the same value as the direct computation.
    pub fn theory_of_expr(&mut self, e: &ChainExpr, n: usize) -> Result<TheoryHandle> {
        self.guards.check_level(n)?;
        match e {
            ChainExpr::Finite(w) => self.theory_of_segment(w, n),
            ChainExpr::Concat(a, b) => {
                let x = self.theory_of_expr(a, n)?;
                let y = self.theory_of_expr(b, n)?;
                self.sum(x, y)
            }
            ChainExpr::OmegaPower(a) => {
                let x = self.theory_of_expr(a, n)?;
                self.omega_power(x)
            }
        }
    }

    fn theory_of_segment(&mut self, w: &Word, n: usize) -> Result<TheoryHandle> {
        if w.len() <= 1 || w.len() * n.max(1) <= DIRECT_BUDGET {
            let mut bits = Self::column_bits(w, &[])?;
            let node = self.direct_theory(&mut bits, w.width(), n);
            return Ok(TheoryHandle {
                node,
                level: n,
                cols: w.width(),
            });
        }
        let mid = w.len() / 2;
        let a = self.theory_of_segment(&w.slice(0, mid), n)?;
        let b = self.theory_of_segment(&w.slice(mid, w.len()), n)?;
        self.sum(a, b)
    }

    // ---- towers: lowering and projection ------------------------------

    /// Level `k - 1` of a point tower whose level-`k` value is `id`.
    pub(crate) fn lower_tower(&mut self, id: NodeId, k: usize, cols: usize) -> NodeId {
        debug_assert!(k >= 1);
        let key = (id, k as u8, cols as u16);
        if let Some(&r) = self.caches.lower.get(&key) {
            return r;
        }
        let children = self.children(id);
        let r = if k == 1 {
            match children.first() {
                None => self.store.pattern(BasePattern::empty(cols)),
                Some(&c) => {
                    let p = self.store.get_pattern(c);
                    self.store.pattern(p.without_point(p.points() - 1))
                }
            }
        } else {
            let out = children.iter().map(|&c| self.lower_tower(c, k - 1, cols)).collect();
            self.set(out)
        };
        self.caches.lower.insert(key, r);
        r
    }

    /// Deletes set column `j` from every base pattern of a level-`k` value.
    pub(crate) fn tower_without_col(&mut self, id: NodeId, k: usize, j: usize) -> NodeId {
        let key = (id, k as u8, j as u16);
        if let Some(&r) = self.caches.tower_col.get(&key) {
            return r;
        }
        let r = if k == 0 {
            let p = self.store.get_pattern(id);
            self.store.pattern(p.without_col(j))
        } else {
            let children = self.children(id);
            let out = children.iter().map(|&c| self.tower_without_col(c, k - 1, j)).collect();
            self.set(out)
        };
        self.caches.tower_col.insert(key, r);
        r
    }

    /// Deletes point `q` from every base pattern of a level-`k` value.
    pub(crate) fn tower_without_point(&mut self, id: NodeId, k: usize, q: usize) -> NodeId {
        let key = (id, k as u8, q as u16);
        if let Some(&r) = self.caches.tower_point.get(&key) {
            return r;
        }
        let r = if k == 0 {
            let p = self.store.get_pattern(id);
            self.store.pattern(p.without_point(q))
        } else {
            let children = self.children(id);
            let out = children.iter().map(|&c| self.tower_without_point(c, k - 1, q)).collect();
            self.set(out)
        };
        self.caches.tower_point.insert(key, r);
        r
    }

    /// Deletes column `j` from a theory value.
    pub(crate) fn theory_without_col(&mut self, id: NodeId, level: usize, j: usize) -> NodeId {
        if level == 0 {
            return self.tower_without_col(id, 2, j);
        }
        let key = (id, level as u8, j as u16);
        if let Some(&r) = self.caches.theory_col.get(&key) {
            return r;
        }
        let children = self.children(id);
        let out = children
            .iter()
            .map(|&c| self.theory_without_col(c, level - 1, j))
            .collect();
        let r = self.set(out);
        self.caches.theory_col.insert(key, r);
        r
    }

    /// Removes column `j` of a theory handle.
    pub fn project_column(&mut self, h: TheoryHandle, j: usize) -> Result<TheoryHandle> {
        if j >= h.cols {
            return Err(Error::OutOfRange {
                what: "column",
                value: j,
                limit: h.cols,
            });
        }
        Ok(TheoryHandle {
            node: self.theory_without_col(h.node, h.level, j),
            level: h.level,
            cols: h.cols - 1,
        })
    }

    /// `Th^{n-1}` of the same model and columns.
    pub fn lower(&mut self, h: TheoryHandle) -> Result<TheoryHandle> {
        if h.level == 0 {
            return Err(Error::Mismatch("cannot lower a level-0 theory".into()));
        }
        let key = (h.node, h.level as u8, h.cols as u16);
        if let Some(&node) = self.caches.lower_theory.get(&key) {
            return Ok(TheoryHandle {
                node,
                level: h.level - 1,
                cols: h.cols,
            });
        }
        // Every element projects to the same value; the element for the
        // empty extension always exists.
        let first = *self
            .children(h.node)
            .first()
            .ok_or_else(|| Error::Mismatch("theory without elements".into()))?;
        let node = self.theory_without_col(first, h.level - 1, h.cols);
        self.caches.lower_theory.insert(key, node);
        Ok(TheoryHandle {
            node,
            level: h.level - 1,
            cols: h.cols,
        })
    }

    pub fn lower_to(&mut self, mut h: TheoryHandle, level: usize) -> Result<TheoryHandle> {
        if level > h.level {
            return Err(Error::DepthExceedsLevel {
                depth: level,
                level: h.level,
            });
        }
        while h.level > level {
            h = self.lower(h)?;
        }
        Ok(h)
    }

    // ---- composition --------------------------------------------------

    fn combine(&mut self, left: NodeId, right: NodeId, split: SplitBits) -> NodeId {
        let l = self.store.get_pattern(left);
        let r = self.store.get_pattern(right);
        let offset = l.ranks().iter().map(|&x| x as usize + 1).max().unwrap_or(0);
        let (mut li, mut ri) = (0, 0);
        let mut keys = Vec::with_capacity(split.len as usize);
        let mut members = Vec::with_capacity(split.len as usize);
        for i in 0..split.len as usize {
            if split.is_right(i) {
                keys.push(offset + r.ranks()[ri] as usize);
                members.push(r.members()[ri]);
                ri += 1;
            } else {
                keys.push(l.ranks()[li] as usize);
                members.push(l.members()[li]);
                li += 1;
            }
        }
        debug_assert_eq!((li, ri), (l.points(), r.points()));
        self.store.pattern(BasePattern::from_keys(l.cols(), &keys, members))
    }

    /// Sided sum of two level-`k` tower values.
    pub(crate) fn tower_sum(&mut self, left: NodeId, right: NodeId, k: usize, split: SplitBits, cols: usize) -> NodeId {
        let key = (left, right, k as u8, split.bits, split.len);
        if let Some(&r) = self.caches.tower_sum.get(&key) {
            return r;
        }
        let r = if k == 0 {
            self.combine(left, right, split)
        } else {
            let left_low = self.lower_tower(left, k, cols);
            let right_low = self.lower_tower(right, k, cols);
            let lc = self.children(left);
            let rc = self.children(right);
            let mut out = Vec::with_capacity(lc.len() + rc.len());
            for &c in lc.iter() {
                out.push(self.tower_sum(c, right_low, k - 1, split.push(false), cols));
            }
            for &c in rc.iter() {
                out.push(self.tower_sum(left_low, c, k - 1, split.push(true), cols));
            }
            self.set(out)
        };
        self.caches.tower_sum.insert(key, r);
        r
    }

    fn check_compatible(a: TheoryHandle, b: TheoryHandle) -> Result<()> {
        if a.level != b.level || a.cols != b.cols {
            return Err(Error::Mismatch(format!(
                "theories of shape (n={}, l={}) and (n={}, l={})",
                a.level, a.cols, b.level, b.cols
            )));
        }
        Ok(())
    }

    /// Theory of the ordered sum of two chains.
    pub fn sum(&mut self, a: TheoryHandle, b: TheoryHandle) -> Result<TheoryHandle> {
        Self::check_compatible(a, b)?;
        let node = self.sum_node(a.node, b.node, a.level, a.cols)?;
        Ok(TheoryHandle { node, ..a })
    }

    pub(crate) fn sum_node(&mut self, a: NodeId, b: NodeId, level: usize, cols: usize) -> Result<NodeId> {
        if level == 0 {
            return Ok(self.tower_sum(a, b, 2, SplitBits::EMPTY, cols));
        }
        let key = (a, b, level as u8, cols as u16);
        if let Some(&r) = self.caches.sum.get(&key) {
            return Ok(r);
        }
        self.guards.check_nodes(self.store.len())?;
        let ac = self.children(a);
        let bc = self.children(b);
        let mut out = Vec::with_capacity(ac.len() * bc.len());
        for &x in ac.iter() {
            for &y in bc.iter() {
                out.push(self.sum_node(x, y, level - 1, cols + 1)?);
            }
        }
        let r = self.set(out);
        self.caches.sum.insert(key, r);
        Ok(r)
    }

    /// Theory of the sum of a list of chains, left to right.
    pub fn sum_all(&mut self, parts: &[TheoryHandle]) -> Result<Option<TheoryHandle>> {
        let mut acc: Option<TheoryHandle> = None;
        for &p in parts {
            acc = Some(match acc {
                None => p,
                Some(a) => self.sum(a, p)?,
            });
        }
        Ok(acc)
    }

    /// Theory of the ω-sum of chains that all have theory `t`.
    pub fn omega_power(&mut self, t: TheoryHandle) -> Result<TheoryHandle> {
        self.guards.check_level(t.level)?;
        let node = self.omega_node(t.node, t.level, t.cols)?;
        Ok(TheoryHandle { node, ..t })
    }

    fn omega_node(&mut self, t: NodeId, level: usize, cols: usize) -> Result<NodeId> {
        let key = (t, level as u8, cols as u16);
        if let Some(&r) = self.caches.omega.get(&key) {
            return Ok(r);
        }
        let r = if level == 0 {
            self.omega_base(t, cols)
        } else {
            self.omega_ramsey(t, level, cols)?
        };
        self.caches.omega.insert(key, r);
        Ok(r)
    }

    /// One-point types of the ω-sum as a least fixpoint: a point lies in
    /// the first copy, or in the remainder after one more copy.
    fn omega_base(&mut self, t: NodeId, cols: usize) -> NodeId {
        let types = self.children(t);
        if types.is_empty() {
            return t;
        }
        let whole1 = self.lower_tower(t, 2, cols);
        let mut first: Vec<NodeId> = Vec::with_capacity(types.len());
        for &c in types.iter() {
            first.push(self.tower_sum(c, whole1, 1, SplitBits::EMPTY.push(false), cols));
        }
        let mut seen: FxHashSet<NodeId> = first.iter().copied().collect();
        let mut frontier = first.clone();
        let mut all = first;
        while let Some(s) = frontier.pop() {
            let shifted = self.tower_sum(whole1, s, 1, SplitBits::EMPTY.push(true), cols);
            if seen.insert(shifted) {
                all.push(shifted);
                frontier.push(shifted);
            }
        }
        self.set(all)
    }

    /// Elements of the ω-power are the ω-sums `x + e^ω` with `x, e` in the
    /// semigroup generated by the elements of `t`, `e` idempotent and
    /// `x + e = x`.
    fn omega_ramsey(&mut self, t: NodeId, level: usize, cols: usize) -> Result<NodeId> {
        let gens: Vec<NodeId> = self.children(t).to_vec();
        let semigroup = self.generate(&gens, level - 1, cols + 1)?;
        let mut out = Vec::new();
        for &e in &semigroup {
            if self.sum_node(e, e, level - 1, cols + 1)? != e {
                continue;
            }
            let oe = self.omega_node(e, level - 1, cols + 1)?;
            for &x in &semigroup {
                if self.sum_node(x, e, level - 1, cols + 1)? == x {
                    out.push(self.sum_node(x, oe, level - 1, cols + 1)?);
                }
            }
        }
        Ok(self.set(out))
    }

    /// Closure of `gens` under sum, in discovery order.
    pub(crate) fn generate(&mut self, gens: &[NodeId], level: usize, cols: usize) -> Result<Vec<NodeId>> {
        let mut seen: FxHashSet<NodeId> = FxHashSet::default();
        let mut out = Vec::new();
        for &g in gens {
            if seen.insert(g) {
                out.push(g);
            }
        }
        let mut i = 0;
        while i < out.len() {
            let x = out[i];
            for &g in gens {
                let y = self.sum_node(x, g, level, cols)?;
                if seen.insert(y) {
                    out.push(y);
                    self.guards.check_closure(out.len())?;
                }
            }
            i += 1;
        }
        Ok(out)
    }

    /// Semigroup generated by a set of theories, in discovery order.
    pub fn generated_semigroup(&mut self, gens: &[TheoryHandle]) -> Result<Vec<TheoryHandle>> {
        let Some(&first) = gens.first() else {
            return Ok(Vec::new());
        };
        for &g in gens {
            Self::check_compatible(first, g)?;
        }
        let nodes: Vec<NodeId> = gens.iter().map(|g| g.node).collect();
        Ok(self
            .generate(&nodes, first.level, first.cols)?
            .into_iter()
            .map(|node| TheoryHandle { node, ..first })
            .collect())
    }

    pub fn is_idempotent(&mut self, t: TheoryHandle) -> Result<bool> {
        Ok(self.sum_node(t.node, t.node, t.level, t.cols)? == t.node)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn word(n: usize) -> Word {
        Word::from_bits(&".".repeat(n), 0).unwrap()
    }

    #[test]
    fn lengths_three_and_more_agree() {
        let mut e = TheoryEngine::default();
        let t3 = e.theory_of_word(&word(3), 0).unwrap();
        let t5 = e.theory_of_word(&word(5), 0).unwrap();
        assert_eq!(t3, t5);
        assert_eq!(e.children(t3.node).len(), 3);
    }

    #[test]
    fn empty_word_is_identity() {
        let mut e = TheoryEngine::default();
        for n in 0..=2 {
            let eps = e.theory_of_word(&word(0), n).unwrap();
            assert_eq!(eps, e.empty_theory(n, 0));
            let t = e.theory_of_word(&word(2), n).unwrap();
            assert_eq!(e.sum(eps, t).unwrap(), t);
            assert_eq!(e.sum(t, eps).unwrap(), t);
        }
    }

    #[test]
    fn sum_matches_concatenation() {
        let mut e = TheoryEngine::default();
        for n in 0..=2 {
            let a = e.theory_of_word(&Word::from_bits("10", 1).unwrap(), n).unwrap();
            let b = e.theory_of_word(&Word::from_bits("011", 1).unwrap(), n).unwrap();
            let ab = e.theory_of_word(&Word::from_bits("10011", 1).unwrap(), n).unwrap();
            assert_eq!(e.sum(a, b).unwrap(), ab, "n={n}");
        }
    }

    #[test]
    fn lowering_matches_direct() {
        let mut e = TheoryEngine::default();
        let w = Word::from_bits("0110", 1).unwrap();
        let t2 = e.theory_of_word(&w, 2).unwrap();
        let t1 = e.theory_of_word(&w, 1).unwrap();
        let t0 = e.theory_of_word(&w, 0).unwrap();
        assert_eq!(e.lower(t2).unwrap(), t1);
        assert_eq!(e.lower_to(t2, 0).unwrap(), t0);
    }

    #[test]
    fn omega_of_point_has_first_but_no_last() {
        let mut e = TheoryEngine::default();
        let one = e.theory_of_word(&word(1), 0).unwrap();
        let om = e.omega_power(one).unwrap();
        // {eq,lt} and {eq,lt,gt}
        assert_eq!(e.children(om.node).len(), 2);
        let again = e.sum(one, om).unwrap();
        assert_eq!(again, om);
    }

    #[test]
    fn mismatched_shapes_rejected() {
        let mut e = TheoryEngine::default();
        let a = e.theory_of_word(&word(1), 0).unwrap();
        let b = e.theory_of_word(&word(1), 1).unwrap();
        assert!(matches!(e.sum(a, b), Err(Error::Mismatch(_))));
    }
}
