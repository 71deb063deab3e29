//! Random partitions from the commuting-graph walk on `S_n`.
//!
//! Each step moves from `s` to a uniform element of its centralizer. The
//! stationary law of the walk weights `s` by `|C(s)|`, which puts equal mass
//! on every conjugacy class, so the reported cycle types are asymptotically
//! uniform over the partitions of `n`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm::{factorial, Permutation};
use crate::rng::RandomSource;

/// A partition of `n` with parts in weakly decreasing order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CycleType(Vec<usize>);

impl CycleType {
    pub fn new(mut parts: Vec<usize>) -> Result<Self> {
        if parts.contains(&0) {
            return Err(Error::InvalidArgument("partition parts must be positive".into()));
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Self(parts))
    }

    pub fn of(p: &Permutation) -> Self {
        Self::new(p.cycles().iter().map(Vec::len).collect()).expect("cycles are nonempty")
    }

    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    pub fn size(&self) -> usize {
        self.0.iter().sum()
    }

    /// `a_i` for `i = 1..=n` (index `i - 1`).
    pub fn multiplicities(&self) -> Vec<usize> {
        let mut a = vec![0; self.size()];
        for &part in &self.0 {
            a[part - 1] += 1;
        }
        a
    }

    /// `|C(s)| = ∏ i^{a_i} a_i!` for any `s` of this cycle type.
    pub fn centralizer_order(&self) -> u128 {
        self.multiplicities()
            .iter()
            .enumerate()
            .map(|(i, &a)| (i as u128 + 1).pow(a as u32) * factorial(a))
            .product()
    }

    /// Size of the conjugacy class, `n! / |C(s)|`.
    pub fn class_size(&self) -> u128 {
        factorial(self.size()) / self.centralizer_order()
    }
}

impl fmt::Display for CycleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(usize::to_string).collect();
        f.write_str(&parts.join("+"))
    }
}

/// All partitions of `n`, largest first part first.
pub fn all_partitions(n: usize) -> Vec<CycleType> {
    fn extend(rest: usize, max: usize, prefix: &mut Vec<usize>, out: &mut Vec<CycleType>) {
        if rest == 0 {
            out.push(CycleType(prefix.clone()));
            return;
        }
        for part in (1..=max.min(rest)).rev() {
            prefix.push(part);
            extend(rest - part, part, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    extend(n, n, &mut Vec::new(), &mut out);
    out
}

/// Number of partitions of `n`.
pub fn partition_count(n: usize) -> u128 {
    let mut ways = vec![0u128; n + 1];
    ways[0] = 1;
    for part in 1..=n {
        for total in part..=n {
            ways[total] += ways[total - part];
        }
    }
    ways[n]
}

/// Uniform element of the centralizer of `s`.
///
/// Cycles of `s` are taken in canonical order (each starting at its minimum,
/// equal lengths ordered by minimum). For each cycle length, a uniform
/// permutation of the cycles of that length is drawn, then a uniform rotation
/// for each of those cycles in order; the `j`-th cycle is mapped onto the
/// `π(j)`-th, shifted by its rotation.
pub fn sample_centralizer(s: &Permutation, rng: &mut RandomSource) -> Permutation {
    let mut by_length: BTreeMap<usize, Vec<Vec<u32>>> = BTreeMap::new();
    for cycle in s.cycles() {
        by_length.entry(cycle.len()).or_default().push(cycle);
    }
    let mut images = vec![0u32; s.degree()];
    for (len, cycles) in &by_length {
        let shuffle = Permutation::sample_uniform(cycles.len(), rng);
        for (j, source) in cycles.iter().enumerate() {
            let target = &cycles[shuffle.images()[j] as usize - 1];
            let rotation = rng.below(*len as u64) as usize;
            for (l, &x) in source.iter().enumerate() {
                images[x as usize - 1] = target[(l + rotation) % len];
            }
        }
    }
    Permutation::new(images).expect("centralizer element is a permutation")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainState {
    pub current: Permutation,
    pub step_count: u64,
}

impl ChainState {
    pub fn start(n: usize) -> Self {
        Self {
            current: Permutation::identity(n),
            step_count: 0,
        }
    }

    pub fn cycle_type(&self) -> CycleType {
        CycleType::of(&self.current)
    }
}

pub fn chain_step(state: ChainState, rng: &mut RandomSource) -> ChainState {
    ChainState {
        current: sample_centralizer(&state.current, rng),
        step_count: state.step_count + 1,
    }
}

/// Like [`chain_step`], but verifies that the new state commutes with the old.
pub fn chain_step_checked(state: ChainState, rng: &mut RandomSource) -> Result<ChainState> {
    let next = chain_step(state.clone(), rng);
    let st = state.current.compose(&next.current)?;
    let ts = next.current.compose(&state.current)?;
    if st != ts {
        return Err(Error::InvariantViolation(format!(
            "step {}: {} does not commute with {}",
            next.step_count, next.current, state.current
        )));
    }
    Ok(next)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub n: usize,
    /// Total steps, burn-in included.
    pub steps: u64,
    pub burn_in: u64,
    /// Check every step for commutation.
    pub check: bool,
}

pub const DEFAULT_BURN_IN: u64 = 1000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionRun {
    pub n: usize,
    pub reported: u64,
    pub counts: BTreeMap<CycleType, u64>,
}

pub const PARTITION_CSV_HEADER: &str = "partition,count,frequency";

impl PartitionRun {
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            reported: 0,
            counts: BTreeMap::new(),
        }
    }

    pub fn record(&mut self, class: CycleType) {
        *self.counts.entry(class).or_insert(0) += 1;
        self.reported += 1;
    }

    /// Sums the tables of independent chains on the same `n`.
    pub fn merge(&mut self, other: &PartitionRun) -> Result<()> {
        if other.n != self.n {
            return Err(Error::DegreeMismatch {
                left: self.n,
                right: other.n,
            });
        }
        for (class, &c) in &other.counts {
            *self.counts.entry(class.clone()).or_insert(0) += c;
        }
        self.reported += other.reported;
        Ok(())
    }

    pub fn frequency(&self, class: &CycleType) -> f64 {
        self.counts.get(class).copied().unwrap_or(0) as f64 / self.reported as f64
    }

    /// Total-variation distance from the uniform law on partitions of `n`.
    pub fn tv_to_uniform(&self) -> f64 {
        let classes = partition_count(self.n) as f64;
        let uniform = 1.0 / classes;
        let seen: f64 = self
            .counts
            .values()
            .map(|&c| (c as f64 / self.reported as f64 - uniform).abs())
            .sum();
        let unseen = (classes - self.counts.len() as f64) * uniform;
        (seen + unseen) / 2.0
    }

    /// Frequency rows, largest first part first. Every partition of `n` is
    /// listed when `n <= 30`; above that only observed classes appear.
    pub fn rows(&self) -> Vec<(CycleType, u64, f64)> {
        let classes = if self.n <= 30 {
            all_partitions(self.n)
        } else {
            self.counts.keys().rev().cloned().collect()
        };
        classes
            .into_iter()
            .map(|c| {
                let count = self.counts.get(&c).copied().unwrap_or(0);
                let freq = self.frequency(&c);
                (c, count, freq)
            })
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("{PARTITION_CSV_HEADER}\n");
        for (c, count, freq) in self.rows() {
            out.push_str(&format!("{c},{count},{freq}\n"));
        }
        out
    }
}

/// Runs the chain from the identity, reporting the cycle type of every state
/// after the burn-in to `on_class` and tallying them.
pub fn run_partition_sampler_with<S>(
    config: &SamplerConfig,
    rng: &mut RandomSource,
    mut on_class: S,
) -> Result<PartitionRun>
where
    S: FnMut(&CycleType) -> Result<()>,
{
    if config.steps <= config.burn_in {
        return Err(Error::InvalidArgument(format!(
            "steps ({}) must exceed burn-in ({})",
            config.steps, config.burn_in
        )));
    }
    let mut state = ChainState::start(config.n);
    let mut run = PartitionRun::empty(config.n);
    for _ in 0..config.steps {
        state = if config.check {
            chain_step_checked(state, rng)?
        } else {
            chain_step(state, rng)
        };
        if state.step_count > config.burn_in {
            let class = state.cycle_type();
            on_class(&class)?;
            run.record(class);
        }
    }
    Ok(run)
}

pub fn run_partition_sampler(config: &SamplerConfig, rng: &mut RandomSource) -> Result<PartitionRun> {
    run_partition_sampler_with(config, rng, |_| Ok(()))
}
