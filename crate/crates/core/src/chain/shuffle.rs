use std::collections::BTreeSet;

use super::word::PosSet;
use crate::error::{Error, Result};

/// The half-open interval `[lo, hi)` of positions of a word of length `len`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Segment {
    pub lo: usize,
    pub hi: usize,
    len: usize,
}

impl Segment {
    pub fn new(lo: usize, hi: usize, len: usize) -> Result<Segment> {
        if lo > hi || hi > len {
            return Err(Error::OutOfRange {
                what: "segment bound",
                value: hi.max(lo),
                limit: len,
            });
        }
        Ok(Segment { lo, hi, len })
    }

    pub fn whole(len: usize) -> Segment {
        Segment { lo: 0, hi: len, len }
    }

    pub fn is_initial(&self) -> bool {
        self.lo == 0
    }

    pub fn is_final(&self) -> bool {
        self.hi == self.len
    }

    pub fn is_empty(&self) -> bool {
        self.lo == self.hi
    }

    pub fn mask(&self) -> PosSet {
        PosSet::range(self.lo, self.hi)
    }

    pub fn contains_segment(&self, other: &Segment) -> bool {
        other.is_empty() || (self.lo <= other.lo && other.hi <= self.hi)
    }

    /// The Dedekind cut at `c`: the initial segment `[0, c)` and its
    /// complement.
    pub fn dedekind_cut(c: usize, len: usize) -> Result<(Segment, Segment)> {
        Ok((Segment::new(0, c, len)?, Segment::new(c, len, len)?))
    }
}

/// Cut positions `0 = c_0 < c_1 < … < c_k = len`; block `j` is
/// `[c_j, c_{j+1})`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CutPartition {
    cuts: Vec<usize>,
}

impl CutPartition {
    /// Builds the partition from its interior cuts, which must be strictly
    /// increasing and strictly between 0 and `len`.
    pub fn from_interior(interior: &[usize], len: usize) -> Result<CutPartition> {
        let mut cuts = vec![0];
        cuts.extend_from_slice(interior);
        cuts.push(len);
        CutPartition::new(cuts)
    }

    pub fn new(cuts: Vec<usize>) -> Result<CutPartition> {
        if cuts.first() != Some(&0) || cuts.len() < 2 {
            return Err(Error::Mismatch("cuts must start at 0 and end at the word length".into()));
        }
        if cuts.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Mismatch("cuts must be strictly increasing (blocks nonempty)".into()));
        }
        Ok(CutPartition { cuts })
    }

    /// Parses the CLI form: comma-separated interior cuts, e.g. `2`.
    pub fn parse(text: &str, len: usize) -> Result<CutPartition> {
        let text = text.trim();
        let mut interior = Vec::new();
        if !text.is_empty() && text != "-" {
            for part in text.split(',') {
                let part = part.trim();
                interior.push(part.parse::<usize>().map_err(|_| Error::Syntax {
                    pos: 0,
                    msg: format!("invalid cut `{part}`"),
                })?);
            }
        }
        CutPartition::from_interior(&interior, len)
    }

    pub fn len(&self) -> usize {
        *self.cuts.last().expect("nonempty")
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn block_count(&self) -> usize {
        self.cuts.len() - 1
    }

    pub fn block(&self, j: usize) -> Segment {
        Segment::new(self.cuts[j], self.cuts[j + 1], self.len()).expect("valid cuts")
    }

    pub fn blocks(&self) -> Vec<Segment> {
        (0..self.block_count()).map(|j| self.block(j)).collect()
    }

    pub fn cuts(&self) -> &[usize] {
        &self.cuts
    }
}

/// A set of block indices. Every subset of a finite index set qualifies as
/// a shuffling index set.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct IndexSet(pub BTreeSet<usize>);

impl IndexSet {
    pub fn all(k: usize) -> IndexSet {
        IndexSet((0..k).collect())
    }

    pub fn none() -> IndexSet {
        IndexSet::default()
    }

    pub fn complement(&self, k: usize) -> IndexSet {
        IndexSet((0..k).filter(|i| !self.0.contains(i)).collect())
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.contains(&i)
    }

    pub fn parse(text: &str) -> Result<IndexSet> {
        Ok(IndexSet(PosSet::parse(text)?.iter().collect()))
    }
}

impl FromIterator<usize> for IndexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        IndexSet(iter.into_iter().collect())
    }
}

/// Componentwise shuffle: on block `j` take `xs` when `j ∈ a`, otherwise
/// `ys`.
pub fn shuffle_sets(
    xs: &[PosSet],
    ys: &[PosSet],
    cuts: &CutPartition,
    a: &IndexSet,
) -> Result<Vec<PosSet>> {
    if xs.len() != ys.len() {
        return Err(Error::Mismatch(format!(
            "set tuples of lengths {} and {}",
            xs.len(),
            ys.len()
        )));
    }
    let full = PosSet::full(cuts.len());
    if let Some(s) = xs.iter().chain(ys).find(|s| !s.is_subset(full)) {
        return Err(Error::OutOfRange {
            what: "set position",
            value: s.bound() - 1,
            limit: cuts.len(),
        });
    }
    if let Some(&j) = a.0.iter().find(|&&j| j >= cuts.block_count()) {
        return Err(Error::OutOfRange {
            what: "block index",
            value: j,
            limit: cuts.block_count(),
        });
    }
    let from_x = cuts
        .blocks()
        .iter()
        .enumerate()
        .filter(|(j, _)| a.contains(*j))
        .fold(PosSet::EMPTY, |acc, (_, b)| acc.union(b.mask()));
    Ok(xs
        .iter()
        .zip(ys)
        .map(|(x, y)| x.intersect(from_x).union(y.minus(from_x)))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shuffle_example() {
        let cuts = CutPartition::parse("2", 4).unwrap();
        let x = PosSet::parse("0,3").unwrap();
        let y = PosSet::parse("1,2").unwrap();
        let out = shuffle_sets(&[x], &[y], &cuts, &IndexSet::parse("0").unwrap()).unwrap();
        assert_eq!(out, vec![PosSet::parse("0,2").unwrap()]);
        assert_eq!(shuffle_sets(&[x], &[y], &cuts, &IndexSet::all(2)).unwrap(), vec![x]);
        assert_eq!(shuffle_sets(&[x], &[y], &cuts, &IndexSet::none()).unwrap(), vec![y]);
    }

    #[test]
    fn shuffle_errors() {
        let cuts = CutPartition::parse("2", 4).unwrap();
        let x = PosSet(1);
        assert!(shuffle_sets(&[x], &[], &cuts, &IndexSet::none()).is_err());
        assert!(shuffle_sets(&[PosSet(1 << 4)], &[x], &cuts, &IndexSet::none()).is_err());
        assert!(shuffle_sets(&[x], &[x], &cuts, &IndexSet::parse("2").unwrap()).is_err());
    }

    #[test]
    fn cuts_validated() {
        assert!(CutPartition::parse("2,2", 4).is_err());
        assert!(CutPartition::parse("4", 4).is_err());
        assert_eq!(CutPartition::parse("", 4).unwrap().block_count(), 1);
        assert_eq!(CutPartition::parse("1,3", 4).unwrap().block(1), Segment::new(1, 3, 4).unwrap());
    }

    #[test]
    fn segments() {
        let s = Segment::new(0, 2, 3).unwrap();
        assert!(s.is_initial() && !s.is_final());
        assert!(Segment::new(2, 1, 3).is_err());
        let (l, r) = Segment::dedekind_cut(1, 3).unwrap();
        assert_eq!(l.mask().union(r.mask()), PosSet::full(3));
    }
}
