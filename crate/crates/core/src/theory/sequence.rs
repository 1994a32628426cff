use std::fmt;

use super::engine::{TheoryEngine, TheoryHandle};
use crate::error::{Error, Result};

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    if a == 0 || b == 0 {
        a.max(b)
    } else {
        a / gcd(a, b) * b
    }
}

/// An ultimately periodic sequence `prefix, period, period, ...`, or a
/// finite sequence when the period is empty.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UpSequence<T> {
    pub prefix: Vec<T>,
    pub period: Vec<T>,
}

/// Sequence of theories indexed by a finite ordinal or by ω.
pub type UPSequence = UpSequence<TheoryHandle>;

/// Index predicate over a finite range or over ω.
pub type UpIndexSet = UpSequence<bool>;

impl<T: Clone + PartialEq> UpSequence<T> {
    pub fn finite(items: Vec<T>) -> Self {
        UpSequence {
            prefix: items,
            period: Vec::new(),
        }
    }

    pub fn omega(prefix: Vec<T>, period: Vec<T>) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::Mismatch("an ω-sequence needs a nonempty period".into()));
        }
        Ok(UpSequence { prefix, period })
    }

    pub fn constant(item: T) -> Self {
        UpSequence {
            prefix: Vec::new(),
            period: vec![item],
        }
    }

    pub fn is_finite(&self) -> bool {
        self.period.is_empty()
    }

    /// Number of entries of a finite sequence.
    pub fn len(&self) -> Option<usize> {
        self.is_finite().then_some(self.prefix.len())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == Some(0)
    }

    pub fn get(&self, i: usize) -> Option<&T> {
        if i < self.prefix.len() {
            return self.prefix.get(i);
        }
        if self.period.is_empty() {
            return None;
        }
        self.period.get((i - self.prefix.len()) % self.period.len())
    }

    /// Shortest prefix and period describing the same sequence.
    pub fn normalize(&self) -> Self {
        if self.is_finite() {
            return self.clone();
        }
        let q = self.period.len();
        let d = (1..=q)
            .find(|&d| q.is_multiple_of(d) && (0..q).all(|i| self.period[i] == self.period[i % d]))
            .expect("q divides itself");
        let mut prefix = self.prefix.clone();
        let mut period: Vec<T> = self.period[..d].to_vec();
        while prefix.last().is_some_and(|x| *x == period[d - 1]) {
            prefix.pop();
            period.rotate_right(1);
        }
        UpSequence { prefix, period }
    }

    /// Entries `0..k`, or all entries of a shorter finite sequence.
    pub fn take(&self, k: usize) -> Vec<T> {
        (0..k).map_while(|i| self.get(i).cloned()).collect()
    }
}

impl UpIndexSet {
    /// `true` at even indices.
    pub fn even() -> UpIndexSet {
        UpSequence {
            prefix: Vec::new(),
            period: vec![true, false],
        }
    }

    /// Parses `prefix=[1,0];period=[0,1]` with 0/1 entries.
    pub fn parse(text: &str) -> Result<UpIndexSet> {
        parse_literal(text, |s| match s {
            "1" | "true" => Ok(true),
            "0" | "false" => Ok(false),
            other => Err(Error::Syntax {
                pos: 0,
                msg: format!("index flag must be 0 or 1, found `{other}`"),
            }),
        })
    }
}

/// Parses the literal `prefix=[a,b];period=[c]`. Either part may be
/// omitted; an empty or absent period describes a finite sequence.
pub fn parse_literal<T, F>(text: &str, mut item: F) -> Result<UpSequence<T>>
where
    F: FnMut(&str) -> Result<T>,
{
    let mut prefix = Vec::new();
    let mut period = Vec::new();
    let mut offset = 0;
    for part in text.split(';') {
        let pos = offset;
        offset += part.len() + 1;
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (key, value) = part.split_once('=').ok_or_else(|| Error::Syntax {
            pos,
            msg: format!("expected `prefix=[..]` or `period=[..]`, found `{part}`"),
        })?;
        let value = value.trim();
        let inner = value
            .strip_prefix('[')
            .and_then(|v| v.strip_suffix(']'))
            .ok_or_else(|| Error::Syntax {
                pos,
                msg: "list must be enclosed in brackets".into(),
            })?;
        let items = inner
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(&mut item)
            .collect::<Result<Vec<T>>>()?;
        match key.trim() {
            "prefix" => prefix = items,
            "period" => period = items,
            other => {
                return Err(Error::Syntax {
                    pos,
                    msg: format!("unknown field `{other}`"),
                })
            }
        }
    }
    Ok(UpSequence { prefix, period })
}

impl<T: fmt::Display> UpSequence<T> {
    pub fn render(&self) -> String {
        let list = |v: &[T]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        format!("prefix=[{}];period=[{}]", list(&self.prefix), list(&self.period))
    }
}

/// `u_i = s_i` where `a` holds and `t_i` elsewhere.
pub fn formal_shuffle<T: Clone + PartialEq>(s: &UpSequence<T>, t: &UpSequence<T>, a: &UpIndexSet) -> Result<UpSequence<T>> {
    if s.is_finite() != t.is_finite() {
        return Err(Error::Mismatch("sequences of different order types".into()));
    }
    if let (Some(x), Some(y)) = (s.len(), t.len()) {
        if x != y {
            return Err(Error::Mismatch(format!("finite sequences of lengths {x} and {y}")));
        }
        if a.prefix.len() > x {
            return Err(Error::Mismatch(format!(
                "index set mentions index {} beyond length {x}",
                a.prefix.len() - 1
            )));
        }
        let pick = |i: usize| a.get(i).copied().unwrap_or(false);
        let items = (0..x)
            .map(|i| if pick(i) { s.prefix[i].clone() } else { t.prefix[i].clone() })
            .collect();
        return Ok(UpSequence::finite(items));
    }
    let p = s.prefix.len().max(t.prefix.len()).max(a.prefix.len());
    let q = lcm(lcm(s.period.len(), t.period.len()), a.period.len().max(1));
    let pick = |i: usize| a.get(i).copied().unwrap_or(false);
    let at = |i: usize| {
        if pick(i) {
            s.get(i).expect("ω-sequence").clone()
        } else {
            t.get(i).expect("ω-sequence").clone()
        }
    };
    let out = UpSequence {
        prefix: (0..p).map(at).collect(),
        period: (p..p + q).map(at).collect(),
    };
    Ok(out.normalize())
}

impl TheoryEngine {
    fn check_sequence(&self, seq: &UPSequence) -> Result<Option<TheoryHandle>> {
        let first = seq.prefix.first().or(seq.period.first()).copied();
        if let Some(f) = first {
            for t in seq.prefix.iter().chain(&seq.period) {
                if (t.level, t.cols) != (f.level, f.cols) {
                    return Err(Error::Mismatch("sequence entries of different shapes".into()));
                }
            }
        }
        Ok(first)
    }

    /// A pair `(prefix, idem)` with `idem` idempotent such that the ω-sum
    /// of `seq` is `prefix + idem^ω`. An empty prefix sums to the theory of
    /// the empty chain.
    pub fn ramsey_factorize(&mut self, seq: &UPSequence) -> Result<(TheoryHandle, TheoryHandle)> {
        let first = self.check_sequence(seq)?;
        if seq.is_finite() {
            return Err(Error::Mismatch("ramsey factorization needs an ω-sequence".into()));
        }
        let first = first.expect("nonempty period");
        let q = self.sum_all(&seq.period)?.expect("nonempty period");
        // Powers of q eventually reach an idempotent.
        let mut power = q;
        let mut steps = 0usize;
        while !self.is_idempotent(power)? {
            power = self.sum(power, q)?;
            steps += 1;
            self.guards().check_closure(steps)?;
        }
        let prefix = match self.sum_all(&seq.prefix)? {
            Some(p) => p,
            None => self.empty_theory(first.level, first.cols),
        };
        Ok((prefix, power))
    }

    /// Theory of the sum of the sequence: the ordinary sum for a finite
    /// sequence, the ω-sum otherwise.
    pub fn omega_sum(&mut self, seq: &UPSequence) -> Result<TheoryHandle> {
        self.check_sequence(seq)?;
        if seq.is_finite() {
            return match self.sum_all(&seq.prefix)? {
                Some(t) => Ok(t),
                None => Err(Error::Mismatch("empty sequence has no shape".into())),
            };
        }
        let (prefix, idem) = self.ramsey_factorize(seq)?;
        let tail = self.omega_power(idem)?;
        self.sum(prefix, tail)
    }

    /// First `(i, j)` with `i < j` inside the index range and
    /// `s_i != s_i + .. + s_{j-1}`, or `None` when the sequence is formal.
    ///
    /// The condition reduces to `s_i + s_k = s_i` for all `i < k` with
    /// `k + 1` in range. Past the prefix the sequence repeats with the
    /// period, so indices `i` below prefix + period and `j` at most one
    /// window beyond `i` witness every such pair.
    pub fn check_formal_sequence(&mut self, seq: &UPSequence) -> Result<Option<(usize, usize)>> {
        self.check_sequence(seq)?;
        let window = seq.prefix.len() + seq.period.len();
        let bound = seq.len().unwrap_or(usize::MAX);
        for i in 0..window.min(bound) {
            let si = *seq.get(i).expect("in range");
            let mut acc = si;
            let last = (i + window + 1).min(bound.saturating_sub(1));
            for j in i + 2..=last {
                acc = self.sum(acc, *seq.get(j - 1).expect("in range"))?;
                if acc != si {
                    return Ok(Some((i, j)));
                }
            }
        }
        Ok(None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::Word;

    fn th(e: &mut TheoryEngine, len: usize) -> TheoryHandle {
        e.theory_of_word(&Word::from_bits(&".".repeat(len), 0).unwrap(), 0).unwrap()
    }

    #[test]
    fn normalize_shrinks() {
        let s = UpSequence {
            prefix: vec![1, 2, 1],
            period: vec![2, 1, 2, 1],
        };
        let n = s.normalize();
        assert_eq!(n.prefix, Vec::<i32>::new());
        assert_eq!(n.period, vec![1, 2]);
        for i in 0..20 {
            assert_eq!(s.get(i), n.get(i));
        }
    }

    #[test]
    fn shuffle_of_constants_alternates() {
        let s = UpSequence::constant('t');
        let t = UpSequence::constant('u');
        let u = formal_shuffle(&s, &t, &UpIndexSet::even()).unwrap();
        assert_eq!(u.period, vec!['t', 'u']);
        assert_eq!(formal_shuffle(&s, &s, &UpIndexSet::even()).unwrap(), s);
        let none = UpSequence::constant(false);
        assert_eq!(formal_shuffle(&s, &t, &none).unwrap(), t);
    }

    #[test]
    fn formal_sequence_examples() {
        let mut e = TheoryEngine::default();
        let one = th(&mut e, 1);
        let three = th(&mut e, 3);
        assert_eq!(e.check_formal_sequence(&UpSequence::constant(one)).unwrap(), Some((0, 2)));
        assert_eq!(e.check_formal_sequence(&UpSequence::constant(three)).unwrap(), None);
        assert_eq!(e.check_formal_sequence(&UpSequence::finite(vec![one])).unwrap(), None);
    }

    #[test]
    fn ramsey_of_idempotent_has_empty_prefix() {
        let mut e = TheoryEngine::default();
        let three = th(&mut e, 3);
        let (p, i) = e.ramsey_factorize(&UpSequence::constant(three)).unwrap();
        assert_eq!(p, e.empty_theory(0, 0));
        assert_eq!(i, three);
        let one = th(&mut e, 1);
        let (p, i) = e.ramsey_factorize(&UpSequence::constant(one)).unwrap();
        assert!(e.is_idempotent(i).unwrap());
        let via = e.omega_sum(&UpSequence::constant(one)).unwrap();
        let direct = e.omega_power(one).unwrap();
        assert_eq!(via, direct);
        let _ = p;
    }

    #[test]
    fn literal_parsing() {
        let a = UpIndexSet::parse("prefix=[1];period=[0,1]").unwrap();
        assert_eq!(a.get(0), Some(&true));
        assert_eq!(a.get(1), Some(&false));
        assert_eq!(a.get(4), Some(&true));
        assert_eq!(a.render(), "prefix=[true];period=[false,true]");
        assert!(UpIndexSet::parse("prefix=1").is_err());
    }
}
