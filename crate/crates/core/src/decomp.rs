//! The block lower bound `W`.
//!
//! Take a longest increasing subsequence of the block arrangement and add up
//! the within-block LIS lengths of the blocks it visits. Concatenating those
//! within-block subsequences gives an increasing subsequence of the full word,
//! so `W <= L`.
//!
//! The chosen blocks are the canonical LIS witness of the block word alone.
//! They never look at block contents, which keeps `N` independent of the
//! per-block lengths `N_1..N_n`.

use serde::{Deserialize, Serialize};

use crate::lis::{canonical_witness, lis_len};
use crate::perm::Permutation;
use crate::wreath::WreathElement;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockDecomposition {
    /// Original block index at each output block position.
    pub block_word: Permutation,
    /// LIS length of `block_word`.
    pub block_lis: usize,
    /// Original block indices `i_1 < … < i_N` of the canonical block witness.
    pub chosen_blocks: Vec<u32>,
    /// `N_i` for every original block `i`, in block order.
    pub per_block_lis: Vec<usize>,
    pub w: usize,
}

pub fn decompose(element: &WreathElement) -> BlockDecomposition {
    let block_word = element.block_word();
    let witness = canonical_witness(block_word.images());
    let chosen_blocks = witness.values(block_word.images());
    let per_block_lis: Vec<usize> = element.inner().iter().map(|g| lis_len(g.images())).collect();
    let w = chosen_blocks
        .iter()
        .map(|&b| per_block_lis[b as usize - 1])
        .sum();
    BlockDecomposition {
        block_word,
        block_lis: witness.length,
        chosen_blocks,
        per_block_lis,
        w,
    }
}

/// `W <= L` for this element.
pub fn verify_lower_bound(element: &WreathElement) -> bool {
    decompose(element).w <= lis_len(&element.to_word())
}
