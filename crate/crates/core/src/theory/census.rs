use std::collections::VecDeque;
use std::fmt;

use rustc_hash::FxHashMap;

use super::engine::{TheoryEngine, TheoryHandle};
use super::store::{BasePattern, Node, NodeId};
use crate::chain::Word;
use crate::error::Result;
use crate::guards::Guards;

/// A hereditarily finite value detached from any store.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum HfValue {
    Pattern(BasePattern),
    Set(Vec<HfValue>),
}

impl HfValue {
    /// Builds a set value, sorting and deduplicating the elements.
    pub fn set(mut items: Vec<HfValue>) -> HfValue {
        items.sort();
        items.dedup();
        HfValue::Set(items)
    }
}

/// Necessary structural conditions for `v` to be the value of a level-`n`
/// theory over `l` columns: exact nesting shape, canonical set order, and
/// two-point base patterns that are total preorders over `l` columns.
pub fn candidate_wellformed(v: &HfValue, n: usize, l: usize) -> bool {
    fn sorted(items: &[HfValue]) -> bool {
        items.windows(2).all(|w| w[0] < w[1])
    }
    fn base(v: &HfValue, l: usize) -> bool {
        let HfValue::Set(types) = v else {
            return false;
        };
        sorted(types)
            && types.iter().all(|ty| {
                let HfValue::Set(pats) = ty else {
                    return false;
                };
                !pats.is_empty()
                    && sorted(pats)
                    && pats.iter().all(|p| match p {
                        HfValue::Pattern(p) => p.points() == 2 && p.cols() == l && p.is_canonical(),
                        HfValue::Set(_) => false,
                    })
            })
    }
    match v {
        HfValue::Pattern(_) => false,
        HfValue::Set(items) if n > 0 => {
            sorted(items) && items.iter().all(|x| candidate_wellformed(x, n - 1, l + 1))
        }
        HfValue::Set(_) => base(v, l),
    }
}

/// How a census element was first obtained.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Provenance {
    Word(Word),
    Sum(usize, usize),
    Omega(usize),
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Word(w) => write!(f, "word {w}"),
            Provenance::Sum(i, j) => write!(f, "sum #{i} + #{j}"),
            Provenance::Omega(i) => write!(f, "omega #{i}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CensusEntry {
    pub theory: TheoryHandle,
    pub provenance: Provenance,
}

/// Distinct theories produced by a closure run, in discovery order.
#[derive(Debug, Clone, Default)]
pub struct TheoryCensus {
    pub n: usize,
    pub m: usize,
    pub use_omega: bool,
    pub entries: Vec<CensusEntry>,
    index: FxHashMap<NodeId, usize>,
}

impl TheoryCensus {
    pub fn count(&self) -> usize {
        self.entries.len()
    }

    pub fn theories(&self) -> Vec<TheoryHandle> {
        self.entries.iter().map(|e| e.theory).collect()
    }

    pub fn position(&self, t: TheoryHandle) -> Option<usize> {
        self.index.get(&t.node).copied()
    }

    pub fn contains(&self, t: TheoryHandle) -> bool {
        self.index.contains_key(&t.node)
    }

    fn add(&mut self, theory: TheoryHandle, provenance: Provenance, guards: &Guards) -> Result<Option<usize>> {
        if self.index.contains_key(&theory.node) {
            return Ok(None);
        }
        guards.check_closure(self.entries.len() + 1)?;
        let i = self.entries.len();
        self.index.insert(theory.node, i);
        self.entries.push(CensusEntry { theory, provenance });
        Ok(Some(i))
    }
}

impl TheoryEngine {
    /// Least set of theories containing every word of length at most
    /// `max_word_len` and closed under sum, and under ω-power if requested.
    pub fn reachable_theories(&mut self, n: usize, m: usize, max_word_len: usize, use_omega: bool) -> Result<TheoryCensus> {
        self.guards().check_level(n)?;
        self.guards().check_len(max_word_len)?;
        let guards = self.guards();
        let mut census = TheoryCensus {
            n,
            m,
            use_omega,
            ..TheoryCensus::default()
        };
        let mut queue = VecDeque::new();
        for w in Word::all_up_to(m, max_word_len) {
            let t = self.theory_of_word(&w, n)?;
            if let Some(i) = census.add(t, Provenance::Word(w), &guards)? {
                queue.push_back(i);
            }
        }
        // Each dequeued element is combined with itself and every element
        // dequeued before it, so every pair is visited once.
        let mut done: Vec<usize> = Vec::new();
        while let Some(i) = queue.pop_front() {
            guards.check_nodes(self.store().len())?;
            let t = census.entries[i].theory;
            done.push(i);
            for &j in &done {
                let u = census.entries[j].theory;
                let tu = self.sum(t, u)?;
                if let Some(k) = census.add(tu, Provenance::Sum(i, j), &guards)? {
                    queue.push_back(k);
                }
                let ut = self.sum(u, t)?;
                if let Some(k) = census.add(ut, Provenance::Sum(j, i), &guards)? {
                    queue.push_back(k);
                }
            }
            if use_omega {
                let o = self.omega_power(t)?;
                if let Some(k) = census.add(o, Provenance::Omega(i), &guards)? {
                    queue.push_back(k);
                }
            }
        }
        Ok(census)
    }

    /// Detached copy of a stored value.
    pub fn export(&self, id: NodeId) -> HfValue {
        match self.store().node(id) {
            Node::Pattern(p) => HfValue::Pattern((**p).clone()),
            Node::Set(children) => HfValue::set(children.iter().map(|&c| self.export(c)).collect()),
        }
    }

    pub fn import(&mut self, v: &HfValue) -> NodeId {
        match v {
            HfValue::Pattern(p) => self.store_mut().pattern(p.clone()),
            HfValue::Set(items) => {
                let ids = items.iter().map(|x| self.import(x)).collect();
                self.set(ids)
            }
        }
    }
}
