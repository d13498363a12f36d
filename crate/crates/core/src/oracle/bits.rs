use std::collections::BTreeMap;

use crate::error::{PspError, Result};
use crate::oracle::Oracle;
use crate::rational::Rational;
use crate::set::{self, Set};

/// Each user observes a set of independent uniform bits; `f(X)` counts
/// the distinct bits seen by `X`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitAssignmentSource {
    words: usize,
    bits_of: Vec<Vec<u64>>,
    bit_labels: Vec<String>,
}

impl BitAssignmentSource {
    /// `bits_of[i]` lists the bit labels of user `i`.
    pub fn new<S: AsRef<str>>(bits_of: &[Vec<S>]) -> Result<BitAssignmentSource> {
        if bits_of.len() > set::MAX_USERS {
            return Err(PspError::TooLarge { what: "users", size: bits_of.len(), limit: set::MAX_USERS });
        }
        let mut index: BTreeMap<String, usize> = BTreeMap::new();
        for bits in bits_of {
            for b in bits {
                let k = index.len();
                index.entry(b.as_ref().to_string()).or_insert(k);
            }
        }
        let mut bit_labels = vec![String::new(); index.len()];
        for (l, k) in &index {
            bit_labels[*k] = l.clone();
        }
        let words = index.len().div_ceil(64).max(1);
        let bits_of = bits_of
            .iter()
            .map(|bits| {
                let mut w = vec![0u64; words];
                for b in bits {
                    let k = index[b.as_ref()];
                    w[k / 64] |= 1u64 << (k % 64);
                }
                w
            })
            .collect();
        Ok(BitAssignmentSource { words, bits_of, bit_labels })
    }

    pub fn bit_count(&self) -> usize {
        self.bit_labels.len()
    }

    pub fn bit_labels(&self) -> &[String] {
        &self.bit_labels
    }

    /// Bit indices held by user `i`.
    pub fn bits_of(&self, i: usize) -> Vec<usize> {
        (0..self.bit_count()).filter(|k| self.bits_of[i][k / 64] >> (k % 64) & 1 == 1).collect()
    }
}

impl Oracle for BitAssignmentSource {
    fn size(&self) -> usize {
        self.bits_of.len()
    }

    fn eval(&self, x: Set) -> Rational {
        let mut acc = vec![0u64; self.words];
        for i in set::members(x) {
            for (a, w) in acc.iter_mut().zip(&self.bits_of[i]) {
                *a |= w;
            }
        }
        Rational::from(acc.iter().map(|w| w.count_ones() as i64).sum::<i64>())
    }

    fn is_monotone(&self) -> bool {
        true
    }

    fn lower_bound(&self) -> Option<Rational> {
        Some(Rational::ZERO)
    }
}
