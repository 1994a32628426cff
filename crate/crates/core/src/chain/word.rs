use std::fmt;

use crate::error::{Error, Result};
use crate::guards::MASK_WIDTH;

/// Maximum number of predicates a letter can carry.
pub const MAX_WIDTH: usize = 16;

/// Membership bits of one position: bit `i` is set when the position lies in
/// predicate `A_i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter(pub u32);

impl Letter {
    pub fn has(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }
}

/// A set of positions of a word, as a bit mask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct PosSet(pub u64);

impl PosSet {
    pub const EMPTY: PosSet = PosSet(0);

    pub fn singleton(i: usize) -> PosSet {
        PosSet(1 << i)
    }

    /// All positions `0..len`.
    pub fn full(len: usize) -> PosSet {
        if len >= 64 {
            PosSet(u64::MAX)
        } else {
            PosSet((1u64 << len) - 1)
        }
    }

    pub fn range(lo: usize, hi: usize) -> PosSet {
        PosSet(PosSet::full(hi).0 & !PosSet::full(lo).0)
    }

    pub fn contains(self, i: usize) -> bool {
        i < 64 && self.0 >> i & 1 == 1
    }

    pub fn insert(&mut self, i: usize) {
        self.0 |= 1 << i;
    }

    pub fn union(self, o: PosSet) -> PosSet {
        PosSet(self.0 | o.0)
    }

    pub fn intersect(self, o: PosSet) -> PosSet {
        PosSet(self.0 & o.0)
    }

    pub fn minus(self, o: PosSet) -> PosSet {
        PosSet(self.0 & !o.0)
    }

    pub fn is_subset(self, o: PosSet) -> bool {
        self.0 & !o.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..64).filter(move |&i| self.contains(i))
    }

    /// Highest position plus one, or 0 for the empty set.
    pub fn bound(self) -> usize {
        64 - self.0.leading_zeros() as usize
    }

    /// Parses a comma-separated list of positions, e.g. `0,3`. The empty
    /// string (or `-`) is the empty set.
    pub fn parse(text: &str) -> Result<PosSet> {
        let text = text.trim();
        let mut s = PosSet::EMPTY;
        if text.is_empty() || text == "-" {
            return Ok(s);
        }
        for part in text.split(',') {
            let part = part.trim();
            let i: usize = part.parse().map_err(|_| Error::Syntax {
                pos: 0,
                msg: format!("invalid position `{part}`"),
            })?;
            if i >= MASK_WIDTH {
                return Err(Error::OutOfRange {
                    what: "position",
                    value: i,
                    limit: MASK_WIDTH,
                });
            }
            s.insert(i);
        }
        Ok(s)
    }
}

impl fmt::Display for PosSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, i) in self.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{i}")?;
        }
        f.write_str("}")
    }
}

/// A finite chain `0 < 1 < … < len-1` whose positions carry letters of a
/// fixed width.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    width: usize,
    letters: Vec<Letter>,
}

impl Word {
    pub fn new(width: usize, letters: Vec<Letter>) -> Result<Word> {
        if width > MAX_WIDTH {
            return Err(Error::OutOfRange {
                what: "predicate count",
                value: width,
                limit: MAX_WIDTH,
            });
        }
        if let Some(l) = letters.iter().find(|l| l.0 >> width != 0) {
            return Err(Error::InvalidLetter(format!(
                "letter {:#b} does not fit width {width}",
                l.0
            )));
        }
        Ok(Word { width, letters })
    }

    pub fn empty(width: usize) -> Word {
        Word {
            width,
            letters: Vec::new(),
        }
    }

    /// Parses letters written as consecutive `m`-character bit strings
    /// (character `i` of a letter is membership in `A_i`). With `m = 0` each
    /// `.` or `·` is one unlabeled position.
    pub fn from_bits(text: &str, width: usize) -> Result<Word> {
        let chars: Vec<char> = text.chars().collect();
        if width == 0 {
            if let Some(c) = chars.iter().find(|&&c| c != '.' && c != '·') {
                return Err(Error::InvalidLetter(format!(
                    "`{c}`: with no predicates, positions are written `.`"
                )));
            }
            return Ok(Word::empty(0).repeat_blank(chars.len()));
        }
        if let Some(c) = chars.iter().find(|&&c| c != '0' && c != '1') {
            return Err(Error::InvalidLetter(format!("`{c}` is not a bit")));
        }
        if !chars.len().is_multiple_of(width) {
            return Err(Error::InvalidLetter(format!(
                "{} bits do not split into letters of width {width}",
                chars.len()
            )));
        }
        let letters = chars
            .chunks(width)
            .map(|chunk| {
                Letter(
                    chunk
                        .iter()
                        .enumerate()
                        .filter(|(_, &c)| c == '1')
                        .fold(0, |acc, (i, _)| acc | 1 << i),
                )
            })
            .collect();
        Word::new(width, letters)
    }

    fn repeat_blank(mut self, n: usize) -> Word {
        self.letters = vec![Letter(0); n];
        self
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn letter(&self, i: usize) -> Letter {
        self.letters[i]
    }

    /// Positions lying in predicate `A_i`.
    pub fn pred_set(&self, i: usize) -> PosSet {
        let mut s = PosSet::EMPTY;
        for (p, l) in self.letters.iter().enumerate() {
            if l.has(i) {
                s.insert(p);
            }
        }
        s
    }

    pub fn concat(&self, other: &Word) -> Word {
        assert_eq!(self.width, other.width, "letter widths differ");
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Word {
            width: self.width,
            letters,
        }
    }

    pub fn slice(&self, lo: usize, hi: usize) -> Word {
        Word {
            width: self.width,
            letters: self.letters[lo..hi].to_vec(),
        }
    }

    /// Every word of length `0..=max_len` over the `2^width` letters, in
    /// length-then-lexicographic order.
    pub fn all_up_to(width: usize, max_len: usize) -> Vec<Word> {
        let alphabet = 1u32 << width;
        let mut out = vec![Word::empty(width)];
        let mut frontier = vec![Word::empty(width)];
        for _ in 0..max_len {
            let mut next = Vec::new();
            for w in &frontier {
                for a in 0..alphabet {
                    let mut letters = w.letters.clone();
                    letters.push(Letter(a));
                    next.push(Word { width, letters });
                }
            }
            out.extend(next.iter().cloned());
            frontier = next;
        }
        out
    }

    pub fn bits(&self) -> String {
        if self.width == 0 {
            return ".".repeat(self.len());
        }
        let mut s = String::new();
        for l in &self.letters {
            for i in 0..self.width {
                s.push(if l.has(i) { '1' } else { '0' });
            }
        }
        s
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "w:{}", self.bits())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_bits() {
        let w = Word::from_bits("011", 1).unwrap();
        assert_eq!(w.letters(), &[Letter(0), Letter(1), Letter(1)]);
        let w = Word::from_bits("0110", 2).unwrap();
        assert_eq!(w.letters(), &[Letter(0b10), Letter(0b01)]);
        assert_eq!(w.bits(), "0110");
        assert_eq!(Word::from_bits("...", 0).unwrap().len(), 3);
        assert!(Word::from_bits("2", 1).is_err());
        assert!(Word::from_bits("011", 2).is_err());
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(Word::all_up_to(1, 3).len(), 1 + 2 + 4 + 8);
        assert_eq!(Word::all_up_to(0, 4).len(), 5);
    }

    #[test]
    fn posset_roundtrip() {
        let s = PosSet::parse("0,3").unwrap();
        assert_eq!(s, PosSet(0b1001));
        assert_eq!(s.to_string(), "{0,3}");
        assert_eq!(PosSet::range(1, 3), PosSet(0b110));
        assert_eq!(s.bound(), 4);
    }
}
