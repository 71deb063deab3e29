//! Longest strictly increasing subsequences.
//!
//! [`lis_fast`] is patience sorting with a deterministic witness;
//! [`lis_oracle`] is the independent quadratic dynamic program used to check it.
//! Both reject words with repeated entries.
//!
//! The witness is the lexicographically smallest sequence of positions among
//! all maximum-length increasing subsequences. It is recovered from the
//! suffix pile numbers: a right-to-left patience pass gives, for every
//! position, the length of the longest increasing subsequence starting there,
//! and a single left-to-right sweep then takes the first admissible position
//! for each slot.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::wreath::{ColoredPermutation, SignedPermutation};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LisWitness {
    pub length: usize,
    /// One-based, strictly increasing positions of one longest increasing subsequence.
    pub positions: Vec<usize>,
}

impl LisWitness {
    pub fn values<T: Copy>(&self, word: &[T]) -> Vec<T> {
        self.positions.iter().map(|&p| word[p - 1]).collect()
    }
}

/// LIS length by patience sorting, without the distinctness check.
///
/// With repeated entries this is still the longest *strictly* increasing
/// subsequence. This is the hot path for words known to be permutations.
pub fn lis_len<T: Ord + Copy>(word: &[T]) -> usize {
    let mut tops: Vec<T> = Vec::with_capacity(64);
    for &x in word {
        let pile = tops.partition_point(|&t| t < x);
        if pile == tops.len() {
            tops.push(x);
        } else {
            tops[pile] = x;
        }
    }
    tops.len()
}

/// LIS length and canonical witness in `O(m log m)`.
pub fn lis_fast<T: Ord + Copy>(word: &[T]) -> Result<LisWitness> {
    ensure_distinct(word)?;
    Ok(canonical_witness(word))
}

pub(crate) fn canonical_witness<T: Ord + Copy>(word: &[T]) -> LisWitness {
    let from_here = suffix_lengths(word);
    let length = from_here.iter().copied().max().unwrap_or(0);
    let mut positions = Vec::with_capacity(length);
    let mut last: Option<T> = None;
    let mut need = length;
    for (i, &x) in word.iter().enumerate() {
        if need == 0 {
            break;
        }
        if from_here[i] == need && last.is_none_or(|v| v < x) {
            positions.push(i + 1);
            last = Some(x);
            need -= 1;
        }
    }
    debug_assert_eq!(positions.len(), length);
    LisWitness { length, positions }
}

/// Length of the longest increasing subsequence starting at each position.
fn suffix_lengths<T: Ord + Copy>(word: &[T]) -> Vec<usize> {
    // best_start[l] is the largest value that can start an increasing run of
    // length l + 1 in the suffix seen so far; it decreases in l.
    let mut best_start: Vec<T> = Vec::new();
    let mut out = vec![0; word.len()];
    for (i, &x) in word.iter().enumerate().rev() {
        let l = best_start.partition_point(|&s| s > x);
        if l == best_start.len() {
            best_start.push(x);
        } else {
            best_start[l] = x;
        }
        out[i] = l + 1;
    }
    out
}

/// Quadratic dynamic-programming LIS length.
pub fn lis_oracle<T: Ord + Copy>(word: &[T]) -> Result<usize> {
    ensure_distinct(word)?;
    let mut ending_here = vec![0u32; word.len()];
    let mut best = 0;
    for i in 0..word.len() {
        let x = word[i];
        let mut longest = 0;
        for j in 0..i {
            let candidate = if word[j] < x { ending_here[j] } else { 0 };
            longest = longest.max(candidate);
        }
        ending_here[i] = longest + 1;
        best = best.max(longest + 1);
    }
    Ok(best as usize)
}

/// LIS of the centrally symmetric word on `{-n..-1, 1..n}`.
pub fn lis_signed(s: &SignedPermutation) -> usize {
    lis_len(&s.word())
}

/// Longest increasing subsequence using a single color.
pub fn lis_colored(c: &ColoredPermutation) -> usize {
    let images = c.perm().images();
    let mut by_color: std::collections::BTreeMap<u32, Vec<u32>> = Default::default();
    for (&v, &color) in images.iter().zip(c.colors()) {
        by_color.entry(color).or_default().push(v);
    }
    by_color.values().map(|w| lis_len(w)).max().unwrap_or(0)
}

fn ensure_distinct<T: Ord + Copy>(word: &[T]) -> Result<()> {
    let mut order: Vec<usize> = (0..word.len()).collect();
    order.sort_unstable_by(|&a, &b| word[a].cmp(&word[b]).then(a.cmp(&b)));
    match order.windows(2).find(|w| word[w[0]] == word[w[1]]) {
        Some(w) => Err(Error::DuplicateEntry { position: w[1] + 1 }),
        None => Ok(()),
    }
}
