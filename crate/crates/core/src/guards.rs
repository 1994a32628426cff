use crate::error::{Error, Result};

pub const DEFAULT_MAX_LEVEL: usize = 3;
pub const DEFAULT_MAX_ORACLE_LEN: usize = 12;
pub const DEFAULT_MAX_CLOSURE: usize = 5_000;
pub const DEFAULT_MAX_NODES: usize = 3_000_000;

/// Hard ceiling for anything enumerated as a 64-bit position mask.
pub const MASK_WIDTH: usize = 63;

/// Resource limits for exhaustive enumeration.
///
/// `max_oracle_len` bounds every operation that ranges over all subsets of
/// a word (the brute-force oracle, direct theory computation, interpretation
/// checks). `max_level` bounds the theory level `n`. `max_closure` bounds
/// the size of any closure run (generated semigroups, censuses) and
/// `max_nodes` the number of values interned by one engine.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Guards {
    pub max_level: usize,
    pub max_oracle_len: usize,
    pub max_closure: usize,
    pub max_nodes: usize,
}

impl Default for Guards {
    fn default() -> Self {
        Guards {
            max_level: DEFAULT_MAX_LEVEL,
            max_oracle_len: DEFAULT_MAX_ORACLE_LEN,
            max_closure: DEFAULT_MAX_CLOSURE,
            max_nodes: DEFAULT_MAX_NODES,
        }
    }
}

impl Guards {
    pub fn check_level(&self, n: usize) -> Result<()> {
        if n > self.max_level {
            return Err(Error::Resource {
                what: "theory level",
                actual: n,
                limit: self.max_level,
            });
        }
        Ok(())
    }

    pub fn check_closure(&self, size: usize) -> Result<()> {
        if size > self.max_closure {
            return Err(Error::Resource {
                what: "closure size",
                actual: size,
                limit: self.max_closure,
            });
        }
        Ok(())
    }

    pub fn check_nodes(&self, nodes: usize) -> Result<()> {
        if nodes > self.max_nodes {
            return Err(Error::Resource {
                what: "interned theory values",
                actual: nodes,
                limit: self.max_nodes,
            });
        }
        Ok(())
    }

    pub fn check_len(&self, len: usize) -> Result<()> {
        let limit = self.max_oracle_len.min(MASK_WIDTH);
        if len > limit {
            return Err(Error::Resource {
                what: "word length for subset enumeration",
                actual: len,
                limit,
            });
        }
        Ok(())
    }
}
