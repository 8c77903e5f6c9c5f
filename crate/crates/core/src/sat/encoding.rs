//! Integer encoding of parameter domains.

use crate::model::{Domain, Ipm, ParamId};

/// Maps every domain value to an integer code. Booleans use 1 for `true`
/// and 0 for `false`, ranges use their own values, and each enumerative
/// parameter gets a block of consecutive codes disjoint from every other
/// enumerative block, starting at 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Encoding {
    /// Code of value index 0 for each parameter (unused for Booleans).
    base: Vec<i64>,
    boolean: Vec<bool>,
    cards: Vec<u64>,
}

impl Encoding {
    pub fn new(ipm: &Ipm) -> Self {
        let mut next_block = 1i64;
        let mut base = Vec::new();
        let mut boolean = Vec::new();
        for p in ipm.parameters() {
            match &p.domain {
                Domain::Boolean => {
                    base.push(0);
                    boolean.push(true);
                }
                Domain::Range { lower, .. } => {
                    base.push(*lower);
                    boolean.push(false);
                }
                Domain::Enumerative(values) => {
                    base.push(next_block);
                    next_block += values.len() as i64;
                    boolean.push(false);
                }
            }
        }
        Encoding {
            base,
            boolean,
            cards: ipm.cardinalities(),
        }
    }

    pub fn code(&self, p: ParamId, index: usize) -> i64 {
        if self.boolean[p] {
            if index == 0 {
                1
            } else {
                0
            }
        } else {
            self.base[p] + index as i64
        }
    }

    pub fn decode(&self, p: ParamId, code: i64) -> Option<usize> {
        if self.boolean[p] {
            return match code {
                1 => Some(0),
                0 => Some(1),
                _ => None,
            };
        }
        let index = code.checked_sub(self.base[p])?;
        (index >= 0 && (index as u64) < self.cards[p]).then_some(index as usize)
    }

    /// Inclusive code interval of a parameter.
    pub fn bounds(&self, p: ParamId) -> (i64, i64) {
        if self.boolean[p] {
            (0, 1)
        } else {
            (self.base[p], self.base[p] + self.cards[p] as i64 - 1)
        }
    }
}
