//! t-tuples: partial assignments of exactly t distinct parameters.

use super::{Ipm, ParamId};

/// Sorted `(parameter, value index)` pairs over distinct parameters.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tuple(Vec<(ParamId, usize)>);

impl Tuple {
    /// Returns `None` when entries repeat a parameter or a value lies
    /// outside its domain.
    pub fn new(ipm: &Ipm, mut entries: Vec<(ParamId, usize)>) -> Option<Self> {
        entries.sort_unstable();
        let n = ipm.parameters().len();
        for w in entries.windows(2) {
            if w[0].0 == w[1].0 {
                return None;
            }
        }
        for &(p, v) in &entries {
            if p >= n || v as u64 >= ipm.parameter(p).cardinality() {
                return None;
            }
        }
        Some(Tuple(entries))
    }

    /// Entries already sorted by parameter, distinct and in domain.
    pub(crate) fn from_sorted(entries: Vec<(ParamId, usize)>) -> Self {
        debug_assert!(entries.windows(2).all(|w| w[0].0 < w[1].0));
        Tuple(entries)
    }

    pub fn entries(&self) -> &[(ParamId, usize)] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Partial assignment with the tuple's values filled in.
    pub fn to_partial(&self, n_params: usize) -> Vec<Option<usize>> {
        let mut out = vec![None; n_params];
        for &(p, v) in &self.0 {
            out[p] = Some(v);
        }
        out
    }
}

/// Number of t-tuples: sum over t-subsets of the product of cardinalities.
pub fn tuple_count(ipm: &Ipm, t: usize) -> u128 {
    let cards = ipm.cardinalities();
    // dp[j] = sum over j-subsets of the first i parameters
    let mut dp = vec![0u128; t + 1];
    dp[0] = 1;
    for c in cards {
        for j in (1..=t).rev() {
            dp[j] += dp[j - 1] * c as u128;
        }
    }
    dp[t]
}

/// Streams every t-tuple: parameter subsets in lexicographic order, then
/// values in domain order with the last parameter varying fastest.
pub fn enumerate_tuples(ipm: &Ipm, t: usize) -> Option<TupleIter> {
    let n = ipm.parameters().len();
    if t == 0 || t > n {
        return None;
    }
    Some(TupleIter {
        cards: ipm.cardinalities(),
        subset: (0..t).collect(),
        values: vec![0; t],
        done: false,
    })
}

#[derive(Debug, Clone)]
pub struct TupleIter {
    cards: Vec<u64>,
    subset: Vec<ParamId>,
    values: Vec<usize>,
    done: bool,
}

impl TupleIter {
    fn advance_values(&mut self) -> bool {
        for i in (0..self.values.len()).rev() {
            self.values[i] += 1;
            if (self.values[i] as u64) < self.cards[self.subset[i]] {
                return true;
            }
            self.values[i] = 0;
        }
        false
    }

    fn advance_subset(&mut self) -> bool {
        let t = self.subset.len();
        let n = self.cards.len();
        for i in (0..t).rev() {
            if self.subset[i] < n - t + i {
                self.subset[i] += 1;
                for j in i + 1..t {
                    self.subset[j] = self.subset[j - 1] + 1;
                }
                return true;
            }
        }
        false
    }
}

impl Iterator for TupleIter {
    type Item = Tuple;

    fn next(&mut self) -> Option<Tuple> {
        if self.done {
            return None;
        }
        let item = Tuple(self.subset.iter().copied().zip(self.values.iter().copied()).collect());
        if !self.advance_values() && !self.advance_subset() {
            self.done = true;
        }
        Some(item)
    }
}
