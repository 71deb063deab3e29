//! Exhaustive enumeration over small groups, with moments in exact rational
//! arithmetic.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::ser::{Serialize, SerializeStruct, Serializer};

use crate::decomp::decompose;
use crate::error::{Error, Result};
use crate::lis::{lis_len, lis_signed};
use crate::perm::{factorial, permutations, Permutation};
use crate::wreath::{signed_permutations, wreath_elements_with_outer, WreathElement};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationCaps {
    /// Largest `m` for which all of `S_m` is enumerated.
    pub sym_degree: usize,
    /// Largest group order enumerated for wreath and signed groups.
    pub group_order: u128,
}

impl Default for EnumerationCaps {
    fn default() -> Self {
        Self {
            sym_degree: 8,
            group_order: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WreathStatistic {
    /// LIS of the full word.
    L,
    /// Block lower bound.
    W,
    /// LIS of the block arrangement.
    N,
}

impl WreathStatistic {
    pub fn evaluate(self, element: &WreathElement) -> u64 {
        match self {
            Self::L => lis_len(&element.to_word()) as u64,
            Self::W => decompose(element).w as u64,
            Self::N => lis_len(element.outer().images()) as u64,
        }
    }
}

/// Exact law of an integer statistic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistributionTable {
    pub support: Vec<u64>,
    pub counts: Vec<u64>,
    pub total: u64,
    pub exact_mean: BigRational,
    /// Variance of the law itself (divisor `total`).
    pub exact_variance: BigRational,
}

impl DistributionTable {
    pub fn from_counts(counts: &BTreeMap<u64, u64>) -> Self {
        let total: u64 = counts.values().sum();
        let mut sum = BigInt::zero();
        let mut sum_sq = BigInt::zero();
        for (&v, &c) in counts {
            let v = BigInt::from(v);
            let c = BigInt::from(c);
            sum_sq += &v * &v * &c;
            sum += v * c;
        }
        let (exact_mean, exact_variance) = if total == 0 {
            (BigRational::zero(), BigRational::zero())
        } else {
            let t = BigInt::from(total);
            let mean = BigRational::new(sum, t.clone());
            let second = BigRational::new(sum_sq, t);
            let var = second - &mean * &mean;
            (mean, var)
        };
        Self {
            support: counts.keys().copied().collect(),
            counts: counts.values().copied().collect(),
            total,
            exact_mean,
            exact_variance,
        }
    }

    pub fn count_of(&self, value: u64) -> u64 {
        self.support
            .binary_search(&value)
            .map(|i| self.counts[i])
            .unwrap_or(0)
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.counts
            .iter()
            .map(|&c| c as f64 / self.total as f64)
            .collect()
    }

    /// `value,count,probability` rows with a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("value,count,probability\n");
        for ((v, c), pr) in self.support.iter().zip(&self.counts).zip(self.probabilities()) {
            out.push_str(&format!("{v},{c},{pr}\n"));
        }
        out
    }
}

fn integer_json(x: &BigInt) -> serde_json::Value {
    match x.to_i64() {
        Some(v) => serde_json::Value::from(v),
        None => serde_json::Value::from(x.to_string()),
    }
}

pub(crate) fn fraction_json(q: &BigRational) -> serde_json::Value {
    serde_json::json!({ "num": integer_json(q.numer()), "den": integer_json(q.denom()) })
}

impl Serialize for DistributionTable {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("DistributionTable", 5)?;
        s.serialize_field("support", &self.support)?;
        s.serialize_field("counts", &self.counts)?;
        s.serialize_field("total", &self.total)?;
        s.serialize_field("mean", &fraction_json(&self.exact_mean))?;
        s.serialize_field("var", &fraction_json(&self.exact_variance))?;
        s.end()
    }
}

/// Mean `f(m)` and variance `g(m)` of the LIS of a uniform permutation of
/// size `m`, with `h(m) = f(m) + 2 sqrt(g(m))`.
#[derive(Debug, Clone, PartialEq)]
pub struct PermStats {
    pub m: usize,
    pub f: BigRational,
    pub g: BigRational,
    pub h: f64,
}

impl PermStats {
    pub fn f_f64(&self) -> f64 {
        self.f.to_f64().unwrap_or(f64::NAN)
    }

    pub fn g_f64(&self) -> f64 {
        self.g.to_f64().unwrap_or(f64::NAN)
    }
}

impl Serialize for PermStats {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("PermStats", 4)?;
        s.serialize_field("m", &self.m)?;
        s.serialize_field("f", &fraction_json(&self.f))?;
        s.serialize_field("g", &fraction_json(&self.g))?;
        s.serialize_field("h", &self.h)?;
        s.end()
    }
}

fn check_cap(what: String, required: u128, cap: u128) -> Result<()> {
    if required > cap {
        Err(Error::CapExceeded {
            what,
            required,
            cap,
        })
    } else {
        Ok(())
    }
}

/// Law of `statistic` over all of `S_m`.
pub fn enumerate_sym<F>(m: usize, caps: &EnumerationCaps, statistic: F) -> Result<DistributionTable>
where
    F: Fn(&Permutation) -> u64,
{
    if m > caps.sym_degree {
        return Err(Error::CapExceeded {
            what: format!("S_{m}"),
            required: factorial(m),
            cap: factorial(caps.sym_degree),
        });
    }
    let mut counts = BTreeMap::new();
    for p in permutations(m) {
        *counts.entry(statistic(&p)).or_insert(0) += 1;
    }
    Ok(DistributionTable::from_counts(&counts))
}

pub fn enumerate_sym_lis(m: usize, caps: &EnumerationCaps) -> Result<DistributionTable> {
    enumerate_sym(m, caps, |p| lis_len(p.images()) as u64)
}

pub fn perm_stats(m: usize, caps: &EnumerationCaps) -> Result<PermStats> {
    let table = enumerate_sym_lis(m, caps)?;
    let f = table.exact_mean;
    let g = table.exact_variance;
    let h = f.to_f64().unwrap_or(f64::NAN) + 2.0 * g.to_f64().unwrap_or(f64::NAN).sqrt();
    Ok(PermStats { m, f, g, h })
}

/// Law of `statistic` over all of `S_k ≀ S_n`, split across threads by outer
/// permutation. The result does not depend on the split.
pub fn enumerate_wreath(
    n: usize,
    k: usize,
    statistic: WreathStatistic,
    caps: &EnumerationCaps,
) -> Result<DistributionTable> {
    if n == 0 || k == 0 {
        return Err(Error::InvalidArgument(format!(
            "wreath enumeration needs n, k >= 1 (n={n}, k={k})"
        )));
    }
    check_cap(
        format!("S_{k} wr S_{n}"),
        WreathElement::order(n, k),
        caps.group_order,
    )?;
    let blocks: Arc<[Permutation]> = permutations(k).collect();
    let outers: Vec<Permutation> = permutations(n).collect();
    let counts = outers
        .into_par_iter()
        .map(|outer| {
            let mut local = BTreeMap::new();
            for e in wreath_elements_with_outer(Arc::clone(&blocks), n, k, outer) {
                *local.entry(statistic.evaluate(&e)).or_insert(0u64) += 1;
            }
            local
        })
        .reduce(BTreeMap::new, merge_counts);
    Ok(DistributionTable::from_counts(&counts))
}

fn merge_counts(mut a: BTreeMap<u64, u64>, b: BTreeMap<u64, u64>) -> BTreeMap<u64, u64> {
    for (v, c) in b {
        *a.entry(v).or_insert(0) += c;
    }
    a
}

/// Law of the signed-action LIS over the hyperoctahedral group `B_n`.
pub fn enumerate_signed(n: usize, caps: &EnumerationCaps) -> Result<DistributionTable> {
    let order = factorial(n).saturating_mul(1u128 << n.min(127));
    check_cap(format!("B_{n}"), order, caps.group_order)?;
    let mut counts = BTreeMap::new();
    for s in signed_permutations(n) {
        *counts.entry(lis_signed(&s) as u64).or_insert(0) += 1;
    }
    Ok(DistributionTable::from_counts(&counts))
}

/// Both sides of the conditional-expectation identities for `W`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentReport {
    pub n: usize,
    pub k: usize,
    pub mean_w: BigRational,
    /// `f(n) f(k)`
    pub mean_rhs: BigRational,
    pub var_w: BigRational,
    /// `f(n) g(k) + g(n) f(k)^2`
    pub var_rhs: BigRational,
}

impl Serialize for MomentReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("MomentReport", 6)?;
        s.serialize_field("n", &self.n)?;
        s.serialize_field("k", &self.k)?;
        s.serialize_field("mean_w", &fraction_json(&self.mean_w))?;
        s.serialize_field("mean_rhs", &fraction_json(&self.mean_rhs))?;
        s.serialize_field("var_w", &fraction_json(&self.var_w))?;
        s.serialize_field("var_rhs", &fraction_json(&self.var_rhs))?;
        s.end()
    }
}

/// Checks `E W = f(n) f(k)` and `Var W = f(n) g(k) + g(n) f(k)^2` exactly.
///
/// A violation means the block witness leaks information about block
/// contents.
pub fn verify_moment_identities(n: usize, k: usize, caps: &EnumerationCaps) -> Result<MomentReport> {
    let w = enumerate_wreath(n, k, WreathStatistic::W, caps)?;
    let outer = perm_stats(n, caps)?;
    let block = perm_stats(k, caps)?;
    let mean_rhs = &outer.f * &block.f;
    let var_rhs = &outer.f * &block.g + &outer.g * &block.f * &block.f;
    let report = MomentReport {
        n,
        k,
        mean_w: w.exact_mean,
        mean_rhs,
        var_w: w.exact_variance,
        var_rhs,
    };
    if report.mean_w != report.mean_rhs {
        return Err(Error::IdentityViolation {
            n,
            k,
            detail: format!("mean {} != {}", report.mean_w, report.mean_rhs),
        });
    }
    if report.var_w != report.var_rhs {
        return Err(Error::IdentityViolation {
            n,
            k,
            detail: format!("variance {} != {}", report.var_w, report.var_rhs),
        });
    }
    Ok(report)
}
