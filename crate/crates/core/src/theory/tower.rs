use std::fmt;

use super::engine::{SplitBits, TheoryEngine};
use super::store::NodeId;
use crate::chain::{PosSet, Word};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Left,
    Right,
}

/// Which operand each point of a sum belongs to, in point-tuple order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct SideSplit(pub Vec<Side>);

impl SideSplit {
    pub fn new(sides: Vec<Side>) -> SideSplit {
        SideSplit(sides)
    }

    pub fn all_left(n: usize) -> SideSplit {
        SideSplit(vec![Side::Left; n])
    }

    pub fn all_right(n: usize) -> SideSplit {
        SideSplit(vec![Side::Right; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn count(&self, side: Side) -> usize {
        self.0.iter().filter(|&&s| s == side).count()
    }

    pub(crate) fn bits(&self) -> SplitBits {
        self.0
            .iter()
            .fold(SplitBits::EMPTY, |acc, &s| acc.push(s == Side::Right))
    }
}

/// `th^k(M, Ā, ā)` for every `k` up to `n`, kept together because a sided
/// sum at level `k + 1` needs the partner's level-`k` value.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ThTower {
    pub model: String,
    pub cols: usize,
    pub points: usize,
    pub levels: Vec<NodeId>,
}

impl ThTower {
    pub fn n(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn level(&self, k: usize) -> NodeId {
        self.levels[k]
    }

    pub fn top(&self) -> NodeId {
        *self.levels.last().expect("towers have level 0")
    }
}

impl fmt::Display for ThTower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "th^{}({}, l={}, p={})",
            self.n(),
            self.model,
            self.cols,
            self.points
        )
    }
}

impl TheoryEngine {
    /// `th^k(w, Ā, ā)` for `k = 0 ..= n`, where `Ā` lists the predicates of
    /// `w` followed by `sets`.
    pub fn th_tower(&mut self, w: &Word, sets: &[PosSet], points: &[usize], n: usize) -> Result<ThTower> {
        self.guards().check_level(n)?;
        if let Some(&p) = points.iter().find(|&&p| p >= w.len()) {
            return Err(Error::OutOfRange {
                what: "point position",
                value: p,
                limit: w.len(),
            });
        }
        let bits = Self::column_bits(w, sets)?;
        let cols = w.width() + sets.len();
        let levels = (0..=n)
            .map(|k| self.direct_tower(&bits, cols, &mut points.to_vec(), k))
            .collect();
        let mut model = w.to_string();
        for s in sets {
            model.push_str(&format!(", {s}"));
        }
        Ok(ThTower {
            model,
            cols,
            points: points.len(),
            levels,
        })
    }

    /// Tower of the sum of two chains with columns united pointwise. Points
    /// come from the two operands in the order given by `split`.
    pub fn th_sum(&mut self, left: &ThTower, right: &ThTower, split: &SideSplit) -> Result<ThTower> {
        if left.n() != right.n() || left.cols != right.cols {
            return Err(Error::Mismatch(format!(
                "towers of shape (n={}, l={}) and (n={}, l={})",
                left.n(),
                left.cols,
                right.n(),
                right.cols
            )));
        }
        if split.count(Side::Left) != left.points || split.count(Side::Right) != right.points {
            return Err(Error::Mismatch(format!(
                "split has {} left and {} right points, towers have {} and {}",
                split.count(Side::Left),
                split.count(Side::Right),
                left.points,
                right.points
            )));
        }
        if split.len() + left.n() > 64 {
            return Err(Error::OutOfRange {
                what: "point tuple length",
                value: split.len(),
                limit: 64 - left.n(),
            });
        }
        let bits = split.bits();
        let levels = (0..=left.n())
            .map(|k| self.tower_sum(left.level(k), right.level(k), k, bits, left.cols))
            .collect();
        Ok(ThTower {
            model: format!("{} + {}", left.model, right.model),
            cols: left.cols,
            points: split.len(),
            levels,
        })
    }

    /// Deletes set column `j` at every level.
    pub fn tower_project_column(&mut self, t: &ThTower, j: usize) -> Result<ThTower> {
        if j >= t.cols {
            return Err(Error::OutOfRange {
                what: "column",
                value: j,
                limit: t.cols,
            });
        }
        let levels = (0..=t.n())
            .map(|k| self.tower_without_col(t.level(k), k, j))
            .collect();
        Ok(ThTower {
            model: format!("{} without column {j}", t.model),
            cols: t.cols - 1,
            points: t.points,
            levels,
        })
    }

    /// Deletes point `q` of the tuple at every level.
    pub fn tower_project_point(&mut self, t: &ThTower, q: usize) -> Result<ThTower> {
        if q >= t.points {
            return Err(Error::OutOfRange {
                what: "point index",
                value: q,
                limit: t.points,
            });
        }
        let levels = (0..=t.n())
            .map(|k| self.tower_without_point(t.level(k), k, q))
            .collect();
        Ok(ThTower {
            model: format!("{} without point {q}", t.model),
            cols: t.cols,
            points: t.points - 1,
            levels,
        })
    }

    /// Level `k - 1` of a tower, derived from level `k` alone.
    pub fn tower_lower(&mut self, t: &ThTower, k: usize) -> Result<NodeId> {
        if k == 0 || k > t.n() {
            return Err(Error::OutOfRange {
                what: "tower level",
                value: k,
                limit: t.n(),
            });
        }
        Ok(self.lower_tower(t.level(k), k, t.cols))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theory::store::Rel;

    #[test]
    fn read_off_base_pattern() {
        let mut e = TheoryEngine::default();
        let w = Word::from_bits("01", 1).unwrap();
        let t = e.th_tower(&w, &[], &[0, 1], 0).unwrap();
        let p = e.store().get_pattern(t.level(0));
        assert_eq!(p.rel(0, 1), Rel::Lt);
        assert!(!p.member(0, 0));
        assert!(p.member(1, 0));
    }

    #[test]
    fn empty_word_has_empty_level_one() {
        let mut e = TheoryEngine::default();
        let t = e.th_tower(&Word::empty(0), &[], &[], 1).unwrap();
        assert!(e.store().children(t.level(1)).is_empty());
        let one = e.th_tower(&Word::from_bits(".", 0).unwrap(), &[], &[], 1).unwrap();
        assert_eq!(e.store().children(one.level(1)).len(), 1);
    }

    #[test]
    fn left_point_precedes_right_point() {
        let mut e = TheoryEngine::default();
        let w = Word::from_bits("1", 1).unwrap();
        let a = e.th_tower(&w, &[], &[0], 1).unwrap();
        let b = e.th_tower(&w, &[], &[0], 1).unwrap();
        let s = e
            .th_sum(&a, &b, &SideSplit::new(vec![Side::Left, Side::Right]))
            .unwrap();
        let p = e.store().get_pattern(s.level(0));
        assert_eq!(p.rel(0, 1), Rel::Lt);
        let ww = Word::from_bits("11", 1).unwrap();
        let direct = e.th_tower(&ww, &[], &[0, 1], 1).unwrap();
        assert_eq!(s.levels, direct.levels);
    }

    #[test]
    fn empty_left_operand_is_identity() {
        let mut e = TheoryEngine::default();
        let eps = e.th_tower(&Word::empty(1), &[], &[], 2).unwrap();
        let w = Word::from_bits("101", 1).unwrap();
        let t = e.th_tower(&w, &[], &[2, 0], 2).unwrap();
        let s = e.th_sum(&eps, &t, &SideSplit::all_right(2)).unwrap();
        assert_eq!(s.levels, t.levels);
    }

    #[test]
    fn projections_commute_with_construction() {
        let mut e = TheoryEngine::default();
        let w = Word::from_bits("0110", 1).unwrap();
        let x = PosSet::parse("1,3").unwrap();
        let full = e.th_tower(&w, &[x], &[2, 0], 2).unwrap();
        let no_col = e.tower_project_column(&full, 1).unwrap();
        let direct = e.th_tower(&w, &[], &[2, 0], 2).unwrap();
        assert_eq!(no_col.levels, direct.levels);
        let no_point = e.tower_project_point(&full, 0).unwrap();
        let direct = e.th_tower(&w, &[x], &[0], 2).unwrap();
        assert_eq!(no_point.levels, direct.levels);
        assert_eq!(e.tower_lower(&full, 2).unwrap(), full.level(1));
    }
}
