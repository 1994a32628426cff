//! Hash-consed storage for hereditarily finite theory values.
//!
//! A value is either a base pattern (the atomic facts about a tuple of
//! points) or a finite set of values. Sets are stored with their children
//! sorted by id and deduplicated, so two ids are equal exactly when the
//! values are structurally equal.

use std::cmp::Ordering;
use std::sync::Arc;

use rustc_hash::FxHashMap;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub u32);

/// Relation of one point to another in a base pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rel {
    Eq,
    Lt,
    Gt,
}

impl Rel {
    pub fn token(self) -> &'static str {
        match self {
            Rel::Eq => "eq",
            Rel::Lt => "lt",
            Rel::Gt => "gt",
        }
    }

    /// Byte used by the canonical encoding.
    fn code(self) -> u8 {
        match self {
            Rel::Lt => 0,
            Rel::Eq => 1,
            Rel::Gt => 2,
        }
    }
}

/// Atomic facts about `p` points and `l` set columns: a total preorder of
/// the points, stored as dense ranks, and the membership bits of each point.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasePattern {
    cols: u16,
    ranks: Vec<u8>,
    members: Vec<u32>,
}

impl BasePattern {
    /// Builds a pattern from arbitrary comparable keys; ranks are densified.
    pub fn from_keys<K: Ord + Copy>(cols: usize, keys: &[K], members: Vec<u32>) -> BasePattern {
        assert_eq!(keys.len(), members.len());
        let mut sorted: Vec<K> = keys.to_vec();
        sorted.sort();
        sorted.dedup();
        let ranks = keys
            .iter()
            .map(|k| sorted.binary_search(k).expect("present") as u8)
            .collect();
        BasePattern {
            cols: cols as u16,
            ranks,
            members,
        }
    }

    pub fn empty(cols: usize) -> BasePattern {
        BasePattern {
            cols: cols as u16,
            ranks: Vec::new(),
            members: Vec::new(),
        }
    }

    pub fn points(&self) -> usize {
        self.ranks.len()
    }

    pub fn cols(&self) -> usize {
        self.cols as usize
    }

    pub fn ranks(&self) -> &[u8] {
        &self.ranks
    }

    pub fn members(&self) -> &[u32] {
        &self.members
    }

    pub fn rel(&self, i: usize, j: usize) -> Rel {
        match self.ranks[i].cmp(&self.ranks[j]) {
            Ordering::Less => Rel::Lt,
            Ordering::Equal => Rel::Eq,
            Ordering::Greater => Rel::Gt,
        }
    }

    pub fn member(&self, point: usize, col: usize) -> bool {
        self.members[point] >> col & 1 == 1
    }

    pub fn without_point(&self, q: usize) -> BasePattern {
        let mut ranks = self.ranks.clone();
        let mut members = self.members.clone();
        ranks.remove(q);
        members.remove(q);
        BasePattern::from_keys(self.cols(), &ranks, members)
    }

    pub fn without_col(&self, j: usize) -> BasePattern {
        let low = (1u32 << j) - 1;
        BasePattern {
            cols: self.cols - 1,
            ranks: self.ranks.clone(),
            members: self
                .members
                .iter()
                .map(|&m| (m & low) | ((m >> 1) & !low))
                .collect(),
        }
    }

    /// Consistency of the stored relation: ranks dense and members within
    /// the column count.
    pub fn is_canonical(&self) -> bool {
        let mut seen: Vec<u8> = self.ranks.clone();
        seen.sort();
        seen.dedup();
        let dense = seen.iter().enumerate().all(|(i, &r)| r as usize == i);
        let fits = self.cols >= 32 || self.members.iter().all(|&m| m >> self.cols == 0);
        dense && fits && self.ranks.len() == self.members.len()
    }

    pub fn canonical_bytes(&self) -> Vec<u8> {
        let p = self.points();
        let l = self.cols();
        let mut out = Vec::with_capacity(9 + p * p + p * l);
        out.push(b'P');
        out.extend_from_slice(&(p as u32).to_be_bytes());
        out.extend_from_slice(&(l as u32).to_be_bytes());
        for i in 0..p {
            for j in 0..p {
                out.push(self.rel(i, j).code());
            }
        }
        for i in 0..p {
            for c in 0..l {
                out.push(self.member(i, c) as u8);
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Node {
    Pattern(Arc<BasePattern>),
    Set(Arc<[NodeId]>),
}

/// Append-only interning table. Interning is idempotent and ids never
/// change meaning. The store is `Send + Sync`; share it behind a lock so
/// concurrent interning is serialized.
#[derive(Debug, Default)]
pub struct TheoryStore {
    nodes: Vec<Node>,
    index: FxHashMap<Node, NodeId>,
    digests: FxHashMap<NodeId, [u8; 32]>,
}

impl TheoryStore {
    pub fn new() -> TheoryStore {
        TheoryStore::default()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn intern(&mut self, node: Node) -> NodeId {
        if let Some(&id) = self.index.get(&node) {
            return id;
        }
        let id = NodeId(self.nodes.len() as u32);
        self.nodes.push(node.clone());
        self.index.insert(node, id);
        id
    }

    pub fn pattern(&mut self, p: BasePattern) -> NodeId {
        self.intern(Node::Pattern(Arc::new(p)))
    }

    /// Interns the set of the given children (any order, duplicates allowed).
    pub fn set(&mut self, mut children: Vec<NodeId>) -> NodeId {
        children.sort_unstable();
        children.dedup();
        self.intern(Node::Set(children.into()))
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id.0 as usize]
    }

    pub fn children(&self, id: NodeId) -> Arc<[NodeId]> {
        match self.node(id) {
            Node::Set(c) => c.clone(),
            Node::Pattern(_) => panic!("node {id:?} is a pattern, not a set"),
        }
    }

    pub fn get_pattern(&self, id: NodeId) -> Arc<BasePattern> {
        match self.node(id) {
            Node::Pattern(p) => p.clone(),
            Node::Set(_) => panic!("node {id:?} is a set, not a pattern"),
        }
    }

    /// Encoding of one node: a pattern as `P, p, l, relation matrix,
    /// membership matrix`; a set as `S, count` followed by the digests of its
    /// children in ascending byte order. Integers are 4-byte big-endian.
    pub fn canonical_bytes(&mut self, id: NodeId) -> Vec<u8> {
        match self.node(id).clone() {
            Node::Pattern(p) => p.canonical_bytes(),
            Node::Set(children) => {
                let mut ds: Vec<[u8; 32]> = children.iter().map(|&c| self.digest_bytes(c)).collect();
                ds.sort_unstable();
                let mut out = Vec::with_capacity(5 + 32 * ds.len());
                out.push(b'S');
                out.extend_from_slice(&(ds.len() as u32).to_be_bytes());
                for d in ds {
                    out.extend_from_slice(&d);
                }
                out
            }
        }
    }

    pub fn digest_bytes(&mut self, id: NodeId) -> [u8; 32] {
        if let Some(d) = self.digests.get(&id) {
            return *d;
        }
        let bytes = self.canonical_bytes(id);
        let d: [u8; 32] = Sha256::digest(&bytes).into();
        self.digests.insert(id, d);
        d
    }

    /// Lowercase hex SHA-256 content address of the value.
    pub fn digest(&mut self, id: NodeId) -> String {
        hex::encode(self.digest_bytes(id))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interning_is_idempotent() {
        let mut s = TheoryStore::new();
        let a = s.pattern(BasePattern::from_keys(1, &[3, 7], vec![0, 1]));
        let b = s.pattern(BasePattern::from_keys(1, &[0, 1], vec![0, 1]));
        assert_eq!(a, b);
        let x = s.set(vec![a, b]);
        let y = s.set(vec![b]);
        assert_eq!(x, y);
        assert_eq!(s.children(x).len(), 1);
        assert_eq!(s.len(), 2);
    }

    #[test]
    fn digest_is_order_independent() {
        let mut s1 = TheoryStore::new();
        let mut s2 = TheoryStore::new();
        let p = BasePattern::from_keys(0, &[0, 1], vec![0, 0]);
        let q = BasePattern::from_keys(0, &[1, 0], vec![0, 0]);
        let (a1, b1) = (s1.pattern(p.clone()), s1.pattern(q.clone()));
        let (b2, a2) = (s2.pattern(q), s2.pattern(p));
        let x1 = s1.set(vec![a1, b1]);
        let x2 = s2.set(vec![b2, a2]);
        assert_eq!(s1.digest(x1), s2.digest(x2));
        assert_ne!(s1.digest(a1), s1.digest(b1));
        assert_eq!(s1.digest(x1).len(), 64);
    }

    #[test]
    fn pattern_encoding_layout() {
        let p = BasePattern::from_keys(1, &[0, 1], vec![0, 1]);
        let bytes = p.canonical_bytes();
        assert_eq!(
            bytes,
            vec![b'P', 0, 0, 0, 2, 0, 0, 0, 1, 1, 0, 2, 1, 0, 1]
        );
    }

    #[test]
    fn column_and_point_deletion() {
        let p = BasePattern::from_keys(3, &[2, 0, 2], vec![0b101, 0b010, 0b111]);
        let q = p.without_col(1);
        assert_eq!(q.members(), &[0b11, 0b00, 0b11]);
        let r = p.without_point(1);
        assert_eq!(r.ranks(), &[0, 0]);
        assert!(r.is_canonical());
    }
}
