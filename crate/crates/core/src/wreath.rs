//! Elements of the wreath product `S_k ≀ S_n` and the two other encodings of
//! (colored) signed permutations.
//!
//! A [`WreathElement`] acts on `1..=n*k` in two stages. Input block `i` holds
//! the symbols `(i-1)k+1 ..= ik`, rearranged so that its `j`-th entry is
//! `(i-1)k + inner[i](j)`. The blocks are then placed so that output block
//! position `b` receives input block `outer⁻¹(b)`; in other words `outer`
//! sends each input block to its output position.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm::{permutations, Permutation};
use crate::rng::RandomSource;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WreathElement {
    k: usize,
    n: usize,
    inner: Vec<Permutation>,
    outer: Permutation,
}

impl WreathElement {
    pub fn new(k: usize, inner: Vec<Permutation>, outer: Permutation) -> Result<Self> {
        let n = outer.degree();
        if k == 0 || n == 0 {
            return Err(Error::InvalidWreath(format!(
                "block size and block count must be positive (k={k}, n={n})"
            )));
        }
        if inner.len() != n {
            return Err(Error::InvalidWreath(format!(
                "{} inner permutations for {n} blocks",
                inner.len()
            )));
        }
        if let Some((i, g)) = inner.iter().enumerate().find(|(_, g)| g.degree() != k) {
            return Err(Error::InvalidWreath(format!(
                "inner permutation {} has degree {}, expected {k}",
                i + 1,
                g.degree()
            )));
        }
        Ok(Self { k, n, inner, outer })
    }

    pub fn identity(n: usize, k: usize) -> Result<Self> {
        Self::new(k, vec![Permutation::identity(k); n], Permutation::identity(n))
    }

    /// Independent uniform `inner[0..n]`, then a uniform `outer`.
    pub fn sample(n: usize, k: usize, rng: &mut RandomSource) -> Result<Self> {
        if n == 0 || k == 0 {
            return Err(Error::InvalidArgument(format!(
                "wreath sampling needs n, k >= 1 (n={n}, k={k})"
            )));
        }
        let inner = (0..n).map(|_| Permutation::sample_uniform(k, rng)).collect();
        let outer = Permutation::sample_uniform(n, rng);
        Ok(Self { k, n, inner, outer })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn inner(&self) -> &[Permutation] {
        &self.inner
    }

    pub fn outer(&self) -> &Permutation {
        &self.outer
    }

    /// Original block index at each output block position (`outer⁻¹`).
    pub fn block_word(&self) -> Permutation {
        self.outer.inverse()
    }

    /// The image word of `1..=nk`; always a permutation of degree `nk`.
    pub fn to_word(&self) -> Vec<u32> {
        let k = self.k as u32;
        let mut word = Vec::with_capacity(self.n * self.k);
        for &block in self.block_word().images() {
            let offset = (block - 1) * k;
            word.extend(self.inner[block as usize - 1].images().iter().map(|&v| offset + v));
        }
        word
    }

    pub fn to_permutation(&self) -> Permutation {
        Permutation::new(self.to_word()).expect("wreath action yields a permutation")
    }

    /// Signed-permutation image of an element of `S_2 ≀ S_n`: sign `i` is `+1`
    /// iff `inner[i]` is the identity, and the underlying permutation is `outer`.
    pub fn to_signed(&self) -> Result<SignedPermutation> {
        if self.k != 2 {
            return Err(Error::NotHyperoctahedral(self.k));
        }
        let signs = self
            .inner
            .iter()
            .map(|g| if g.is_identity() { 1 } else { -1 })
            .collect();
        SignedPermutation::new(self.outer.clone(), signs)
    }

    pub fn order(n: usize, k: usize) -> u128 {
        let fk = crate::perm::factorial(k);
        let mut order = crate::perm::factorial(n);
        for _ in 0..n {
            order = order.saturating_mul(fk);
        }
        order
    }
}

/// Every element of `S_k ≀ S_n`.
///
/// Odometer order: `outer` is the slowest digit, then `inner[n-1]`, …, with
/// `inner[0]` fastest; each digit runs through its symmetric group in
/// lexicographic one-line order. For `n = k = 2` this lists the words
/// `1234 2134 1243 2143 3412 3421 4312 4321`.
pub fn wreath_elements(n: usize, k: usize) -> impl Iterator<Item = WreathElement> {
    let blocks: Arc<[Permutation]> = permutations(k).collect();
    permutations(n).flat_map(move |outer| wreath_elements_with_outer(Arc::clone(&blocks), n, k, outer))
}

/// The `(k!)^n` elements sharing one outer permutation, in odometer order.
pub(crate) fn wreath_elements_with_outer(
    blocks: Arc<[Permutation]>,
    n: usize,
    k: usize,
    outer: Permutation,
) -> impl Iterator<Item = WreathElement> {
    let mut digits = if n == 0 { None } else { Some(vec![0usize; n]) };
    std::iter::from_fn(move || {
        let current = digits.as_mut()?;
        let element = WreathElement {
            k,
            n,
            inner: current.iter().map(|&d| blocks[d].clone()).collect(),
            outer: outer.clone(),
        };
        let mut carry = true;
        for d in current.iter_mut() {
            *d += 1;
            if *d < blocks.len() {
                carry = false;
                break;
            }
            *d = 0;
        }
        if carry {
            digits = None;
        }
        Some(element)
    })
}

/// A centrally symmetric permutation of `{-n..-1, 1..n}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SignedPermutation {
    underlying: Permutation,
    signs: Vec<i8>,
}

impl SignedPermutation {
    pub fn new(underlying: Permutation, signs: Vec<i8>) -> Result<Self> {
        if signs.len() != underlying.degree() {
            return Err(Error::DegreeMismatch {
                left: underlying.degree(),
                right: signs.len(),
            });
        }
        if let Some(s) = signs.iter().find(|s| s.abs() != 1) {
            return Err(Error::InvalidArgument(format!("sign {s} is not ±1")));
        }
        Ok(Self { underlying, signs })
    }

    pub fn degree(&self) -> usize {
        self.underlying.degree()
    }

    pub fn underlying(&self) -> &Permutation {
        &self.underlying
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    /// The word of length `2n`: position `n + j` holds `sign(p(j)) * p(j)` for
    /// `p = underlying`, and position `n + 1 - j` holds its negation.
    pub fn word(&self) -> Vec<i32> {
        let n = self.degree();
        let mut word = vec![0i32; 2 * n];
        for (j, &v) in self.underlying.images().iter().enumerate() {
            let value = i32::from(self.signs[v as usize - 1]) * v as i32;
            word[n + j] = value;
            word[n - 1 - j] = -value;
        }
        word
    }
}

/// Every element of the hyperoctahedral group `B_n`: underlying permutation in
/// lexicographic order, signs as a binary odometer with the first sign fastest
/// (`+` before `-`).
pub fn signed_permutations(n: usize) -> impl Iterator<Item = SignedPermutation> {
    permutations(n).flat_map(move |p| {
        (0u64..(1u64 << n)).map(move |mask| {
            let signs = (0..n).map(|i| if mask >> i & 1 == 0 { 1 } else { -1 }).collect();
            SignedPermutation {
                underlying: p.clone(),
                signs,
            }
        })
    })
}

/// A permutation whose symbols each carry one of `palette` colors.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ColoredPermutation {
    perm: Permutation,
    colors: Vec<u32>,
    palette: u32,
}

impl ColoredPermutation {
    /// `colors[j]` is the color of the symbol at position `j + 1`, in `1..=palette`.
    pub fn new(perm: Permutation, colors: Vec<u32>, palette: u32) -> Result<Self> {
        if colors.len() != perm.degree() {
            return Err(Error::DegreeMismatch {
                left: perm.degree(),
                right: colors.len(),
            });
        }
        if let Some(c) = colors.iter().find(|&&c| c == 0 || c > palette) {
            return Err(Error::InvalidArgument(format!(
                "color {c} outside 1..={palette}"
            )));
        }
        Ok(Self {
            perm,
            colors,
            palette,
        })
    }

    /// Uniform over the `n! m^n` colored permutations.
    pub fn sample(n: usize, palette: u32, rng: &mut RandomSource) -> Result<Self> {
        if palette == 0 {
            return Err(Error::InvalidArgument("palette must be nonempty".into()));
        }
        let perm = Permutation::sample_uniform(n, rng);
        let colors = (0..n).map(|_| 1 + rng.below(u64::from(palette)) as u32).collect();
        Ok(Self {
            perm,
            colors,
            palette,
        })
    }

    pub fn perm(&self) -> &Permutation {
        &self.perm
    }

    pub fn colors(&self) -> &[u32] {
        &self.colors
    }

    pub fn palette(&self) -> u32 {
        self.palette
    }
}
