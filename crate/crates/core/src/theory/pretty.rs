use super::engine::{TheoryEngine, TheoryHandle};
use super::store::{BasePattern, Node, NodeId};
use super::tower::ThTower;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum Key {
    Pattern(Vec<u8>, Vec<u32>),
    Set(Vec<Key>),
}

fn pattern_key(p: &BasePattern) -> Key {
    let n = p.points();
    let mut rels = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            rels.push(p.rel(i, j) as u8);
        }
    }
    Key::Pattern(rels, p.members().to_vec())
}

fn bits(m: u32, cols: usize) -> String {
    (0..cols).map(|c| if m >> c & 1 == 1 { '1' } else { '0' }).collect()
}

fn render_pattern(p: &BasePattern) -> String {
    if p.points() == 2 {
        let rel = p.rel(0, 1).token();
        if p.cols() == 0 {
            return rel.to_string();
        }
        return format!(
            "{rel}:{}/{}",
            bits(p.members()[0], p.cols()),
            bits(p.members()[1], p.cols())
        );
    }
    let ranks: Vec<String> = p.ranks().iter().map(|r| r.to_string()).collect();
    let members: Vec<String> = p.members().iter().map(|&m| bits(m, p.cols())).collect();
    if p.cols() == 0 {
        format!("[{}]", ranks.join(" "))
    } else {
        format!("[{} | {}]", ranks.join(" "), members.join(" "))
    }
}

impl TheoryEngine {
    fn keyed(&self, id: NodeId) -> (Key, String) {
        match self.store().node(id) {
            Node::Pattern(p) => (pattern_key(p), render_pattern(p)),
            Node::Set(children) => {
                let mut parts: Vec<(Key, String)> = children.iter().map(|&c| self.keyed(c)).collect();
                parts.sort();
                let text = parts.iter().map(|(_, s)| s.as_str()).collect::<Vec<_>>().join(",");
                (Key::Set(parts.into_iter().map(|(k, _)| k).collect()), format!("{{{text}}}"))
            }
        }
    }

    /// Nested-set rendering. Two-point patterns print as `eq`, `lt` or `gt`,
    /// followed by the membership bits of both points when there are
    /// columns; elements are listed in a fixed structural order.
    pub fn pretty(&self, h: TheoryHandle) -> String {
        self.pretty_node(h.node)
    }

    pub fn pretty_node(&self, id: NodeId) -> String {
        self.keyed(id).1
    }

    pub fn pretty_tower(&self, t: &ThTower) -> String {
        t.levels
            .iter()
            .enumerate()
            .map(|(k, &id)| format!("level {k}: {}", self.pretty_node(id)))
            .collect::<Vec<_>>()
            .join("\n")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::Word;

    fn th0(e: &mut TheoryEngine, len: usize) -> String {
        let t = e.theory_of_word(&Word::from_bits(&".".repeat(len), 0).unwrap(), 0).unwrap();
        e.pretty(t)
    }

    #[test]
    fn small_words() {
        let mut e = TheoryEngine::default();
        assert_eq!(th0(&mut e, 0), "{}");
        assert_eq!(th0(&mut e, 1), "{{eq}}");
        assert_eq!(th0(&mut e, 2), "{{eq,lt},{eq,gt}}");
        assert_eq!(th0(&mut e, 3), "{{eq,lt},{eq,lt,gt},{eq,gt}}");
    }

    #[test]
    fn membership_bits_shown() {
        let mut e = TheoryEngine::default();
        let t = e.theory_of_word(&Word::from_bits("1", 1).unwrap(), 0).unwrap();
        assert_eq!(e.pretty(t), "{{eq:1/1}}");
    }
}
