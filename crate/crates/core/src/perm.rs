//! Permutations in one-line notation.
//!
//! Positions and values are one-based: entry `j` of `images()` is the image of
//! `j + 1`. Cycle notation is only used for parsing fixtures and for the
//! cycle decomposition needed by the centralizer sampler.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RandomSource;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Permutation(Vec<u32>);

impl Permutation {
    pub fn new(images: Vec<u32>) -> Result<Self> {
        let degree = images.len();
        let mut seen = vec![false; degree];
        for &v in &images {
            let slot = (v as usize)
                .checked_sub(1)
                .filter(|&s| s < degree)
                .ok_or_else(|| Error::InvalidPermutation {
                    degree,
                    reason: format!("value {v} out of range"),
                })?;
            if std::mem::replace(&mut seen[slot], true) {
                return Err(Error::InvalidPermutation {
                    degree,
                    reason: format!("value {v} repeated"),
                });
            }
        }
        Ok(Self(images))
    }

    pub fn identity(degree: usize) -> Self {
        Self((1..=degree as u32).collect())
    }

    /// Builds a permutation from disjoint cycles; `(3 1 2)` sends 3→1, 1→2, 2→3.
    /// Points not mentioned are fixed.
    pub fn from_cycles(degree: usize, cycles: &[&[u32]]) -> Result<Self> {
        let mut images: Vec<u32> = (1..=degree as u32).collect();
        let mut touched = vec![false; degree];
        for cycle in cycles {
            for (pos, &from) in cycle.iter().enumerate() {
                let to = cycle[(pos + 1) % cycle.len()];
                for v in [from, to] {
                    if v == 0 || v as usize > degree {
                        return Err(Error::InvalidPermutation {
                            degree,
                            reason: format!("cycle entry {v} out of range"),
                        });
                    }
                }
                let slot = from as usize - 1;
                if std::mem::replace(&mut touched[slot], true) {
                    return Err(Error::InvalidPermutation {
                        degree,
                        reason: format!("cycles are not disjoint at {from}"),
                    });
                }
                images[slot] = to;
            }
        }
        Self::new(images)
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn images(&self) -> &[u32] {
        &self.0
    }

    pub fn into_images(self) -> Vec<u32> {
        self.0
    }

    /// Image of the one-based point `j`.
    pub fn apply(&self, j: u32) -> u32 {
        self.0[j as usize - 1]
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &v)| v as usize == i + 1)
    }

    /// `self ∘ other`: maps `j` to `self(other(j))`.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        if self.degree() != other.degree() {
            return Err(Error::DegreeMismatch {
                left: self.degree(),
                right: other.degree(),
            });
        }
        Ok(Self(other.0.iter().map(|&j| self.apply(j)).collect()))
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0u32; self.degree()];
        for (i, &v) in self.0.iter().enumerate() {
            inv[v as usize - 1] = i as u32 + 1;
        }
        Self(inv)
    }

    /// Uniform element of `S_m` by Fisher–Yates with exact bounded draws.
    pub fn sample_uniform(degree: usize, rng: &mut RandomSource) -> Self {
        let mut images: Vec<u32> = (1..=degree as u32).collect();
        shuffle(&mut images, rng);
        Self(images)
    }

    /// Disjoint cycles in canonical form: each cycle starts at its minimum,
    /// cycles are ordered by their minimum. Fixed points are included.
    pub fn cycles(&self) -> Vec<Vec<u32>> {
        let mut seen = vec![false; self.degree()];
        let mut out = Vec::new();
        for start in 1..=self.degree() as u32 {
            if seen[start as usize - 1] {
                continue;
            }
            let mut cycle = vec![start];
            seen[start as usize - 1] = true;
            let mut next = self.apply(start);
            while next != start {
                seen[next as usize - 1] = true;
                cycle.push(next);
                next = self.apply(next);
            }
            out.push(cycle);
        }
        out
    }

    /// Number of cycles of each length; entry `i` counts cycles of length `i + 1`.
    pub fn cycle_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.degree()];
        for c in self.cycles() {
            counts[c.len() - 1] += 1;
        }
        counts
    }
}

/// In-place Fisher–Yates shuffle.
pub fn shuffle<T>(items: &mut [T], rng: &mut RandomSource) {
    for i in (1..items.len()).rev() {
        let j = rng.below(i as u64 + 1) as usize;
        items.swap(i, j);
    }
}

impl TryFrom<Vec<u32>> for Permutation {
    type Error = Error;

    fn try_from(images: Vec<u32>) -> Result<Self> {
        Self::new(images)
    }
}

impl From<Permutation> for Vec<u32> {
    fn from(p: Permutation) -> Self {
        p.0
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// All permutations of degree `m` in lexicographic one-line order.
pub fn permutations(degree: usize) -> Permutations {
    Permutations {
        next: Some((1..=degree as u32).collect()),
    }
}

#[derive(Debug, Clone)]
pub struct Permutations {
    next: Option<Vec<u32>>,
}

impl Iterator for Permutations {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        if next_lexicographic(&mut succ) {
            self.next = Some(succ);
        }
        Some(Permutation(current))
    }
}

/// Advances `v` to its lexicographic successor; false when `v` was the last.
pub(crate) fn next_lexicographic(v: &mut [u32]) -> bool {
    let Some(i) = v.windows(2).rposition(|w| w[0] < w[1]) else {
        return false;
    };
    let j = v.iter().rposition(|&x| x > v[i]).expect("pivot has a successor");
    v.swap(i, j);
    v[i + 1..].reverse();
    true
}

pub fn factorial(m: usize) -> u128 {
    (1..=m as u128).product()
}
