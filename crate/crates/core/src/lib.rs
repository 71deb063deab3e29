//! Longest increasing subsequences of random elements of the wreath product
//! `S_k ≀ S_n`, acting on `1..=nk` by shuffling within blocks of size `k` and
//! then shuffling the blocks.
//!
//! The crate samples such elements reproducibly, computes LIS lengths with a
//! deterministic witness, evaluates the block lower bound `W` and its exact
//! moments over small groups, checks concentration bounds by simulation, and
//! runs the commuting-graph partition sampler on `S_n`.

pub mod decomp;
pub mod error;
pub mod exact;
pub mod lis;
pub mod montecarlo;
pub mod partitions;
pub mod perm;
pub mod rng;
pub mod wreath;

pub use decomp::{decompose, verify_lower_bound, BlockDecomposition};
pub use error::{Error, Result};
pub use exact::{DistributionTable, EnumerationCaps, PermStats, WreathStatistic};
pub use lis::{lis_colored, lis_fast, lis_len, lis_oracle, lis_signed, LisWitness};
pub use montecarlo::{
    ConjectureRow, ScanRow, Statistic, SummaryStats, TailReport, TrialPlan, TrialRecord, TrialRun,
};
pub use partitions::{ChainState, CycleType, PartitionRun, SamplerConfig};
pub use perm::Permutation;
pub use rng::RandomSource;
pub use wreath::{ColoredPermutation, SignedPermutation, WreathElement};
