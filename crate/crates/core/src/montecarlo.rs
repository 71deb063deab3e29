//! Seeded Monte Carlo trials over random wreath elements, with the summary
//! statistics and scans built on them.
//!
//! Trial `t` of a plan always draws from `RandomSource::new(master_seed, t)`.
//! Trials run in parallel in fixed-size chunks and are handed to the sink in
//! trial order, so every output is independent of the thread count.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decomp::decompose;
use crate::error::{Error, Result};
use crate::exact::{perm_stats, EnumerationCaps};
use crate::lis::lis_len;
use crate::perm::Permutation;
use crate::rng::{derive_seed, RandomSource};
use crate::wreath::WreathElement;

const CHUNK: u64 = 4096;

pub const DEFAULT_QUANTILES: [f64; 5] = [0.05, 0.25, 0.5, 0.75, 0.95];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Statistic {
    L,
    W,
    N,
    /// `L / (4 sqrt(nk))`
    Ratio,
}

impl Statistic {
    pub const ALL: [Statistic; 4] = [Statistic::L, Statistic::W, Statistic::N, Statistic::Ratio];

    pub fn of(self, record: &TrialRecord) -> f64 {
        match self {
            Self::L => record.l as f64,
            Self::W => record.w as f64,
            Self::N => record.block_lis as f64,
            Self::Ratio => record.l as f64 / scale(record.n, record.k),
        }
    }
}

fn scale(n: usize, k: usize) -> f64 {
    4.0 * ((n * k) as f64).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialPlan {
    pub n: usize,
    pub k: usize,
    pub trials: u64,
    pub statistics: Vec<Statistic>,
    pub master_seed: u64,
    pub quantiles: Vec<f64>,
}

impl TrialPlan {
    pub fn new(n: usize, k: usize, trials: u64, master_seed: u64) -> Self {
        Self {
            n,
            k,
            trials,
            statistics: Statistic::ALL.to_vec(),
            master_seed,
            quantiles: DEFAULT_QUANTILES.to_vec(),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidArgument("trials must be at least 1".into()));
        }
        if self.n == 0 || self.k == 0 {
            return Err(Error::InvalidArgument(format!(
                "n and k must be positive (n={}, k={})",
                self.n, self.k
            )));
        }
        if let Some(p) = self.quantiles.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::InvalidArgument(format!("quantile {p} outside [0, 1]")));
        }
        Ok(())
    }
}

/// One JSON-lines record: `{"trial", "n", "k", "L", "W", "N"}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub n: usize,
    pub k: usize,
    #[serde(rename = "L")]
    pub l: usize,
    #[serde(rename = "W")]
    pub w: usize,
    #[serde(rename = "N")]
    pub block_lis: usize,
}

pub fn simulate_trial(n: usize, k: usize, master_seed: u64, trial: u64) -> TrialRecord {
    let mut rng = RandomSource::new(master_seed, trial);
    let element = WreathElement::sample(n, k, &mut rng).expect("validated sizes");
    let d = decompose(&element);
    TrialRecord {
        trial,
        n,
        k,
        l: lis_len(&element.to_word()),
        w: d.w,
        block_lis: d.block_lis,
    }
}

/// Evaluates `job(t)` for `t in 0..count` in parallel chunks and feeds the
/// results to `sink` in index order.
pub fn for_each_ordered<T, J, S>(count: u64, job: J, mut sink: S) -> Result<()>
where
    T: Send,
    J: Fn(u64) -> T + Sync + Send,
    S: FnMut(T) -> Result<()>,
{
    let mut start = 0;
    while start < count {
        let end = (start + CHUNK).min(count);
        let chunk: Vec<T> = (start..end).into_par_iter().map(&job).collect();
        for item in chunk {
            sink(item)?;
        }
        start = end;
    }
    Ok(())
}

/// Streams every trial record of `plan` to `sink`, in trial order.
///
/// Fails with [`Error::InvariantViolation`] if any record has `W > L`.
pub fn stream_trials<S>(plan: &TrialPlan, mut sink: S) -> Result<()>
where
    S: FnMut(&TrialRecord) -> Result<()>,
{
    plan.validate()?;
    let (n, k, seed) = (plan.n, plan.k, plan.master_seed);
    for_each_ordered(
        plan.trials,
        |t| simulate_trial(n, k, seed, t),
        |record| {
            if record.w > record.l {
                return Err(Error::InvariantViolation(format!(
                    "trial {}: W = {} exceeds L = {}",
                    record.trial, record.w, record.l
                )));
            }
            sink(&record)
        },
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRun {
    pub plan: TrialPlan,
    pub records: Vec<TrialRecord>,
    pub summaries: BTreeMap<Statistic, SummaryStats>,
}

impl TrialRun {
    pub fn summary(&self, statistic: Statistic) -> Option<&SummaryStats> {
        self.summaries.get(&statistic)
    }

    /// Raw histogram of an integer statistic (`L`, `W` or `N`).
    pub fn histogram(&self, statistic: Statistic) -> BTreeMap<u64, u64> {
        let mut hist = BTreeMap::new();
        for r in &self.records {
            *hist.entry(statistic.of(r) as u64).or_insert(0) += 1;
        }
        hist
    }
}

pub fn run_trials(plan: &TrialPlan) -> Result<TrialRun> {
    let mut records = Vec::with_capacity(plan.trials.min(1 << 24) as usize);
    stream_trials(plan, |r| {
        records.push(*r);
        Ok(())
    })?;
    let summaries = plan
        .statistics
        .iter()
        .map(|&s| {
            let values: Vec<f64> = records.iter().map(|r| s.of(r)).collect();
            (s, SummaryStats::from_values(&values, &plan.quantiles))
        })
        .collect();
    Ok(TrialRun {
        plan: plan.clone(),
        records,
        summaries,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub count: u64,
    pub mean: f64,
    /// Unbiased sample variance; zero for a single observation.
    pub variance: f64,
    /// `sorted[(count - 1) / 2]`, always an attained value.
    pub lower_median: f64,
    /// `(p, x_p)` with `x_p` the smallest sample value whose empirical CDF is at least `p`.
    pub quantiles: Vec<(f64, f64)>,
    pub std_error: f64,
}

impl SummaryStats {
    pub fn from_values(values: &[f64], probabilities: &[f64]) -> Self {
        let count = values.len() as u64;
        if values.is_empty() {
            return Self {
                count,
                mean: f64::NAN,
                variance: f64::NAN,
                lower_median: f64::NAN,
                quantiles: probabilities.iter().map(|&p| (p, f64::NAN)).collect(),
                std_error: f64::NAN,
            };
        }
        let len = values.len() as f64;
        let mean = values.iter().sum::<f64>() / len;
        let variance = if values.len() > 1 {
            values.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (len - 1.0)
        } else {
            0.0
        };
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let quantiles = probabilities
            .iter()
            .map(|&p| (p, lower_quantile(&sorted, p)))
            .collect();
        Self {
            count,
            mean,
            variance,
            lower_median: sorted[(sorted.len() - 1) / 2],
            quantiles,
            std_error: (variance / len).sqrt(),
        }
    }
}

fn lower_quantile(sorted: &[f64], p: f64) -> f64 {
    let rank = (p * sorted.len() as f64).ceil() as usize;
    sorted[rank.clamp(1, sorted.len()) - 1]
}

/// One cell of a scan over `(n, k)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub n: usize,
    pub k: usize,
    pub trials: u64,
    /// Master seed actually used for this cell.
    pub cell_seed: u64,
    pub l: SummaryStats,
    pub w: SummaryStats,
    /// `L / (4 sqrt(nk))`
    pub ratio: SummaryStats,
    /// `W / (4 sqrt(nk))`
    pub w_ratio: SummaryStats,
}

pub const SCAN_CSV_HEADER: &str = "n,k,trials,mean_L,se_L,var_L,median_L,mean_ratio,mean_W";

impl ScanRow {
    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.n,
            self.k,
            self.trials,
            self.l.mean,
            self.l.std_error,
            self.l.variance,
            self.l.lower_median,
            self.ratio.mean,
            self.w.mean
        )
    }
}

/// Seed for the cell `(n, k)` of a scan with the given master seed.
pub fn cell_seed(master_seed: u64, n: usize, k: usize) -> u64 {
    derive_seed(master_seed, &[n as u64, k as u64])
}

/// Summary of `L / (4 sqrt(nk))` for each cell, sorted by `nk`.
///
/// `on_record` sees every trial record of every cell, cell by cell in output order.
pub fn theorem1_scan_with<S>(
    cells: &[(usize, usize)],
    trials: u64,
    master_seed: u64,
    mut on_record: S,
) -> Result<Vec<ScanRow>>
where
    S: FnMut(&TrialRecord) -> Result<()>,
{
    if cells.is_empty() {
        return Err(Error::InvalidArgument("empty scan grid".into()));
    }
    let mut ordered = cells.to_vec();
    ordered.sort_by_key(|&(n, k)| (n * k, n));
    let mut rows = Vec::with_capacity(ordered.len());
    for (n, k) in ordered {
        let seed = cell_seed(master_seed, n, k);
        let run = run_trials(&TrialPlan::new(n, k, trials, seed))?;
        for r in &run.records {
            on_record(r)?;
        }
        let s = scale(n, k);
        let q = &run.plan.quantiles;
        let w_ratio: Vec<f64> = run.records.iter().map(|r| r.w as f64 / s).collect();
        rows.push(ScanRow {
            n,
            k,
            trials,
            cell_seed: seed,
            l: run.summaries[&Statistic::L].clone(),
            w: run.summaries[&Statistic::W].clone(),
            ratio: run.summaries[&Statistic::Ratio].clone(),
            w_ratio: SummaryStats::from_values(&w_ratio, q),
        });
    }
    Ok(rows)
}

pub fn theorem1_scan(cells: &[(usize, usize)], trials: u64, master_seed: u64) -> Result<Vec<ScanRow>> {
    theorem1_scan_with(cells, trials, master_seed, |_| Ok(()))
}

pub const DEFAULT_U_GRID: [f64; 13] = [0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 8.0, 10.0, 15.0, 20.0, 30.0, 40.0];

/// Empirical upper tails of `L_k` against `2 exp(-u^2 / (4 (h + u)))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailReport {
    pub k: usize,
    pub trials: u64,
    pub master_seed: u64,
    pub f: f64,
    pub g: f64,
    /// `f + 2 sqrt(g)`
    pub h: f64,
    /// Whether `f`, `g` come from exact enumeration rather than the sample.
    pub h_exact: bool,
    /// Delta-method standard error of the plug-in `h` (zero when exact).
    pub h_std_error: f64,
    pub lower_median: f64,
    /// `P̂(L_k >= h)`, to be compared with the Chebyshev bound 1/4.
    pub chebyshev_tail: f64,
    pub chebyshev_se: f64,
    pub u_grid: Vec<f64>,
    /// `P̂(L_k >= h + u)`
    pub empirical_tail: Vec<f64>,
    pub bound: Vec<f64>,
    /// `sqrt(p̂ (1 - p̂) / trials)`
    pub binomial_se: Vec<f64>,
    /// Binomial error plus the tail mass within one `h_std_error` below the threshold.
    pub mc_error: Vec<f64>,
}

pub const TAIL_CSV_HEADER: &str = "u,threshold,empirical_tail,bound,binomial_se,mc_error";

impl TailReport {
    pub fn to_csv(&self) -> String {
        let mut out = format!("{TAIL_CSV_HEADER}\n");
        for i in 0..self.u_grid.len() {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                self.u_grid[i],
                self.h + self.u_grid[i],
                self.empirical_tail[i],
                self.bound[i],
                self.binomial_se[i],
                self.mc_error[i]
            ));
        }
        out
    }
}

/// `2 exp(-u^2 / (4 (h + u)))`
pub fn tail_bound(h: f64, u: f64) -> f64 {
    2.0 * (-(u * u) / (4.0 * (h + u))).exp()
}

/// Samples `L_k` for `trials` uniform permutations of size `k`, in trial order.
pub fn sample_lis_lengths(k: usize, trials: u64, master_seed: u64) -> Result<Vec<u32>> {
    let mut out = Vec::with_capacity(trials.min(1 << 24) as usize);
    for_each_ordered(
        trials,
        |t| {
            let mut rng = RandomSource::new(master_seed, t);
            lis_len(Permutation::sample_uniform(k, &mut rng).images()) as u32
        },
        |l| {
            out.push(l);
            Ok(())
        },
    )?;
    Ok(out)
}

pub fn tail_check(k: usize, trials: u64, u_grid: &[f64], master_seed: u64) -> Result<TailReport> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("tail check needs k >= 2, got {k}")));
    }
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    if let Some(u) = u_grid.iter().find(|u| !(u.is_finite() && **u >= 0.0)) {
        return Err(Error::InvalidArgument(format!("u = {u} must be finite and nonnegative")));
    }
    let samples = sample_lis_lengths(k, trials, master_seed)?;
    let values: Vec<f64> = samples.iter().map(|&l| f64::from(l)).collect();
    let summary = SummaryStats::from_values(&values, &[]);
    let caps = EnumerationCaps::default();
    let (f, g, h_exact) = if k <= caps.sym_degree {
        let exact = perm_stats(k, &caps)?;
        (exact.f_f64(), exact.g_f64(), true)
    } else {
        (summary.mean, summary.variance, false)
    };
    let h = f + 2.0 * g.sqrt();
    let h_std_error = if h_exact { 0.0 } else { plug_in_h_error(&values, f, g) };

    let t = trials as f64;
    let tail_at = |threshold: f64| values.iter().filter(|&&l| l >= threshold).count() as f64 / t;
    let se = |p: f64| (p * (1.0 - p) / t).sqrt();

    let chebyshev_tail = tail_at(h);
    let mut empirical_tail = Vec::with_capacity(u_grid.len());
    let mut bound = Vec::with_capacity(u_grid.len());
    let mut binomial_se = Vec::with_capacity(u_grid.len());
    let mut mc_error = Vec::with_capacity(u_grid.len());
    for &u in u_grid {
        let p = tail_at(h + u);
        let shift = tail_at(h + u - h_std_error) - p;
        empirical_tail.push(p);
        bound.push(tail_bound(h, u));
        binomial_se.push(se(p));
        mc_error.push(se(p) + shift);
    }
    Ok(TailReport {
        k,
        trials,
        master_seed,
        f,
        g,
        h,
        h_exact,
        h_std_error,
        lower_median: summary.lower_median,
        chebyshev_tail,
        chebyshev_se: se(chebyshev_tail),
        u_grid: u_grid.to_vec(),
        empirical_tail,
        bound,
        binomial_se,
        mc_error,
    })
}

/// Standard error of `f̂ + 2 sqrt(ĝ)` by the delta method, using the sample
/// third and fourth central moments.
fn plug_in_h_error(values: &[f64], mean: f64, var: f64) -> f64 {
    let t = values.len() as f64;
    if var <= 0.0 || t < 2.0 {
        return 0.0;
    }
    let m3 = values.iter().map(|x| (x - mean).powi(3)).sum::<f64>() / t;
    let m4 = values.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / t;
    // gradient (1, 1/sqrt(g)) against Cov(f̂, ĝ) = [[g, m3], [m3, m4 - g^2]] / t
    let sd = var.sqrt();
    let v = (var + 2.0 * m3 / sd + (m4 - var * var) / var) / t;
    v.max(0.0).sqrt()
}

/// One row of the block-size-two scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConjectureRow {
    pub n: usize,
    pub trials: u64,
    pub cell_seed: u64,
    /// `L_{n,2} / sqrt(n)`
    pub l_scaled: SummaryStats,
    /// `W / sqrt(n)`
    pub w_scaled: SummaryStats,
}

pub const CONJECTURE_CSV_HEADER: &str = "n,k,trials,mean_L_over_sqrt_n,se_L_over_sqrt_n,mean_W_over_sqrt_n,se_W_over_sqrt_n,median_L_over_sqrt_n";

impl ConjectureRow {
    pub fn csv_line(&self) -> String {
        format!(
            "{},2,{},{},{},{},{},{}",
            self.n,
            self.trials,
            self.l_scaled.mean,
            self.l_scaled.std_error,
            self.w_scaled.mean,
            self.w_scaled.std_error,
            self.l_scaled.lower_median
        )
    }
}

pub fn conjecture_scan_with<S>(
    n_grid: &[usize],
    trials: u64,
    master_seed: u64,
    mut on_record: S,
) -> Result<Vec<ConjectureRow>>
where
    S: FnMut(&TrialRecord) -> Result<()>,
{
    if n_grid.is_empty() {
        return Err(Error::InvalidArgument("empty n grid".into()));
    }
    let mut rows = Vec::with_capacity(n_grid.len());
    for &n in n_grid {
        let seed = cell_seed(master_seed, n, 2);
        let run = run_trials(&TrialPlan::new(n, 2, trials, seed))?;
        for r in &run.records {
            on_record(r)?;
        }
        let root = (n as f64).sqrt();
        let q = &run.plan.quantiles;
        let l: Vec<f64> = run.records.iter().map(|r| r.l as f64 / root).collect();
        let w: Vec<f64> = run.records.iter().map(|r| r.w as f64 / root).collect();
        rows.push(ConjectureRow {
            n,
            trials,
            cell_seed: seed,
            l_scaled: SummaryStats::from_values(&l, q),
            w_scaled: SummaryStats::from_values(&w, q),
        });
    }
    Ok(rows)
}

pub fn conjecture_scan(n_grid: &[usize], trials: u64, master_seed: u64) -> Result<Vec<ConjectureRow>> {
    conjecture_scan_with(n_grid, trials, master_seed, |_| Ok(()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_group() {
        let run = run_trials(&TrialPlan::new(1, 1, 50, 3)).unwrap();
        assert!(run.records.iter().all(|r| r.l == 1 && r.w == 1 && r.block_lis == 1));
        let l = run.summary(Statistic::L).unwrap();
        assert_eq!((l.mean, l.variance), (1.0, 0.0));
    }

    #[test]
    fn rejects_bad_plans() {
        assert!(run_trials(&TrialPlan::new(2, 2, 0, 1)).is_err());
        assert!(run_trials(&TrialPlan::new(0, 2, 5, 1)).is_err());
        let mut plan = TrialPlan::new(2, 2, 5, 1);
        plan.quantiles = vec![1.5];
        assert!(run_trials(&plan).is_err());
    }

    #[test]
    fn summary_stats_basics() {
        let s = SummaryStats::from_values(&[4.0, 1.0, 3.0, 2.0], &[0.0, 0.25, 0.5, 1.0]);
        assert_eq!(s.count, 4);
        assert_eq!(s.mean, 2.5);
        assert!((s.variance - 5.0 / 3.0).abs() < 1e-12);
        assert_eq!(s.lower_median, 2.0);
        assert_eq!(s.quantiles, vec![(0.0, 1.0), (0.25, 1.0), (0.5, 2.0), (1.0, 4.0)]);
        let single = SummaryStats::from_values(&[7.0], &[0.5]);
        assert_eq!((single.variance, single.lower_median), (0.0, 7.0));
    }

    #[test]
    fn records_follow_their_stream() {
        let plan = TrialPlan::new(5, 3, 20, 77);
        let run = run_trials(&plan).unwrap();
        for r in &run.records {
            assert_eq!(*r, simulate_trial(5, 3, 77, r.trial));
        }
        assert_eq!(run.records.iter().map(|r| r.trial).collect::<Vec<_>>(), (0..20).collect::<Vec<_>>());
    }

    #[test]
    fn thread_count_does_not_matter() {
        let plan = TrialPlan::new(6, 4, 9000, 12);
        let runs: Vec<TrialRun> = [1, 2, 5]
            .iter()
            .map(|&threads| {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build()
                    .unwrap()
                    .install(|| run_trials(&plan).unwrap())
            })
            .collect();
        assert_eq!(runs[0], runs[1]);
        assert_eq!(runs[0], runs[2]);
    }

    #[test]
    fn small_group_means_match_exact_values() {
        // exact: E L = 19/8, E W = 9/4 over S_2 ≀ S_2
        let run = run_trials(&TrialPlan::new(2, 2, 200_000, 5)).unwrap();
        let l = run.summary(Statistic::L).unwrap();
        let w = run.summary(Statistic::W).unwrap();
        assert!((l.mean - 19.0 / 8.0).abs() < 4.0 * l.std_error);
        assert!((w.mean - 9.0 / 4.0).abs() < 4.0 * w.std_error);
        assert!(run.records.iter().all(|r| r.w <= r.l));
    }

    #[test]
    fn bound_at_zero_is_two() {
        assert_eq!(tail_bound(17.3, 0.0), 2.0);
        assert!(tail_bound(10.0, 5.0) < 2.0);
    }

    #[test]
    fn tail_report_shapes() {
        let r = tail_check(5, 5000, &[0.0, 1.0, 2.0], 9).unwrap();
        assert!(r.h_exact);
        assert_eq!(r.h_std_error, 0.0);
        assert_eq!(r.bound[0], 2.0);
        assert!(r.empirical_tail.iter().all(|p| (0.0..=1.0).contains(p)));
        assert!(r.bound.iter().all(|b| *b > 0.0 && *b <= 2.0));
        assert!(r.empirical_tail.windows(2).all(|w| w[0] >= w[1]));
        assert!(r.chebyshev_tail <= 0.25 + 3.0 * r.chebyshev_se);
        assert!(tail_check(1, 10, &[0.0], 1).is_err());
        assert!(tail_check(4, 10, &[-1.0], 1).is_err());
    }

    #[test]
    fn plug_in_tail_report() {
        let r = tail_check(30, 4000, &[0.0, 2.0, 5.0], 4).unwrap();
        assert!(!r.h_exact);
        assert!(r.h_std_error > 0.0);
        for i in 0..3 {
            assert!(r.mc_error[i] >= r.binomial_se[i]);
            assert!(r.empirical_tail[i] <= r.bound[i] + 3.0 * r.binomial_se[i]);
        }
    }

    #[test]
    fn scan_sorts_by_size() {
        let rows = theorem1_scan(&[(8, 8), (2, 3), (4, 1)], 10, 1).unwrap();
        let sizes: Vec<usize> = rows.iter().map(|r| r.n * r.k).collect();
        assert_eq!(sizes, vec![4, 6, 64]);
        for row in &rows {
            assert!(row.w_ratio.mean <= row.ratio.mean);
        }
    }

    #[test]
    fn conjecture_single_block() {
        let rows = conjecture_scan(&[1], 40_000, 8).unwrap();
        let l = &rows[0].l_scaled;
        assert!((l.mean - 1.5).abs() < 4.0 * l.std_error);
        assert_eq!(l.quantiles.first().unwrap().1, 1.0);
    }
}
