//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use wreath_lis::decomp::verify_lower_bound;
use wreath_lis::exact::{self, EnumerationCaps, WreathStatistic};
use wreath_lis::montecarlo::{self, TrialPlan, DEFAULT_U_GRID};
use wreath_lis::partitions::{self, SamplerConfig, DEFAULT_BURN_IN};
use wreath_lis::perm::permutations;
use wreath_lis::wreath::wreath_elements;
use wreath_lis::{lis_fast, lis_len, lis_oracle, Permutation, RandomSource, WreathElement};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, ok: impl Into<String>, bad: impl Into<String>) -> Outcome {
    if cond {
        Ok(ok.into())
    } else {
        Err(bad.into())
    }
}

fn within(elapsed: Duration, limit: Duration, detail: String) -> Outcome {
    check(
        elapsed < limit,
        format!("{detail}; {elapsed:.2?} < {limit:?}"),
        format!("{detail}; took {elapsed:.2?}, limit {limit:?}"),
    )
}

fn table_1() -> Outcome {
    let start = Instant::now();
    let table = exact::enumerate_wreath(2, 2, WreathStatistic::L, &EnumerationCaps::default())
        .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let detail = format!("support {:?}, counts {:?}", table.support, table.counts);
    if table.support != [1, 2, 3, 4] || table.counts != [1, 4, 2, 1] {
        return Err(detail);
    }
    within(elapsed, Duration::from_secs(1), detail)
}

fn table_2() -> Outcome {
    let start = Instant::now();
    let table = exact::enumerate_signed(2, &EnumerationCaps::default()).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let detail = format!("support {:?}, counts {:?}", table.support, table.counts);
    if table.support != [1, 2, 3, 4] || table.counts != [1, 5, 1, 1] {
        return Err(detail);
    }
    within(elapsed, Duration::from_secs(1), detail)
}

fn worked_example() -> Outcome {
    let swap = Permutation::from_cycles(2, &[&[1, 2]]).map_err(|e| e.to_string())?;
    let outer = Permutation::from_cycles(3, &[&[3, 1, 2]]).map_err(|e| e.to_string())?;
    let element = WreathElement::new(2, vec![swap.clone(), Permutation::identity(2), swap], outer)
        .map_err(|e| e.to_string())?;
    let word = element.to_word();
    let l = lis_len(&word);
    let detail = format!("word {word:?}, L = {l}");
    check(word == [6, 5, 2, 1, 3, 4] && l == 3, detail.clone(), detail)
}

fn moments() -> Outcome {
    let start = Instant::now();
    let caps = EnumerationCaps::default();
    let mut parts = Vec::new();
    for (n, k) in [(2, 2), (2, 3), (3, 2)] {
        let r = exact::verify_moment_identities(n, k, &caps).map_err(|e| e.to_string())?;
        if r.mean_w != r.mean_rhs || r.var_w != r.var_rhs {
            return Err(format!("({n},{k}) mismatch"));
        }
        parts.push(format!("({n},{k}) E={} Var={}", r.mean_w, r.var_w));
    }
    within(start.elapsed(), Duration::from_secs(30), parts.join(", "))
}

fn lower_bound() -> Outcome {
    let mut exhaustive = 0u64;
    for (n, k) in [(2, 2), (2, 3), (3, 2)] {
        for e in wreath_elements(n, k) {
            if !verify_lower_bound(&e) {
                return Err(format!("violation at ({n},{k}): {:?}", e.to_word()));
            }
            exhaustive += 1;
        }
    }
    let plan = TrialPlan::new(100, 20, 1_000_000, 5);
    let mut draws = 0u64;
    // stream_trials itself fails on the first record with W > L
    montecarlo::stream_trials(&plan, |r| {
        draws += u64::from(r.w <= r.l);
        Ok(())
    })
    .map_err(|e| e.to_string())?;
    let detail = format!("{exhaustive} exhaustive elements, {draws} of 1000000 draws at (100,20) satisfy W <= L");
    check(draws == 1_000_000, detail.clone(), detail)
}

fn lis_equivalence() -> Outcome {
    let start = Instant::now();
    let mut mismatches = 0u64;
    let mut words = 0u64;
    for p in permutations(8) {
        let fast = lis_fast(p.images()).map_err(|e| e.to_string())?.length;
        let slow = lis_oracle(p.images()).map_err(|e| e.to_string())?;
        mismatches += u64::from(fast != slow);
        words += 1;
    }
    let mut rng = RandomSource::new(6, 0);
    for _ in 0..100_000 {
        let p = Permutation::sample_uniform(500, &mut rng);
        let fast = lis_fast(p.images()).map_err(|e| e.to_string())?.length;
        let slow = lis_oracle(p.images()).map_err(|e| e.to_string())?;
        mismatches += u64::from(fast != slow);
        words += 1;
    }
    let detail = format!("{words} words, {mismatches} mismatches");
    if mismatches != 0 {
        return Err(detail);
    }
    within(start.elapsed(), Duration::from_secs(60), detail)
}

fn theorem_trend() -> Outcome {
    let cells = [(16, 16), (64, 64), (256, 256)];
    let rows = montecarlo::theorem1_scan(&cells, 50, 7).map_err(|e| e.to_string())?;
    let means: Vec<f64> = rows.iter().map(|r| r.ratio.mean).collect();
    let increasing = means.windows(2).all(|w| w[0] < w[1]);
    let last = means[2];
    let in_window = (0.85..=1.02).contains(&last);
    let detail = format!(
        "mean L/(4 sqrt(nk)) = {:.4}, {:.4}, {:.4}; increasing: {increasing}; window [0.85, 1.02] at 256: {in_window}",
        means[0], means[1], means[2]
    );
    check(increasing && in_window, detail.clone(), detail)
}

fn tail() -> Outcome {
    let mut parts = Vec::new();
    for k in [50, 100] {
        let r = montecarlo::tail_check(k, 100_000, &DEFAULT_U_GRID, 8).map_err(|e| e.to_string())?;
        for i in 0..r.u_grid.len() {
            if r.empirical_tail[i] > r.bound[i] + 3.0 * r.binomial_se[i] {
                return Err(format!(
                    "k={k}, u={}: tail {} > bound {} + 3 se",
                    r.u_grid[i], r.empirical_tail[i], r.bound[i]
                ));
            }
        }
        if r.chebyshev_tail > 0.25 + 3.0 * r.chebyshev_se {
            return Err(format!("k={k}: P(L >= h) = {} > 1/4 + 3 se", r.chebyshev_tail));
        }
        parts.push(format!("k={k} h={:.3} P(L>=h)={:.4}", r.h, r.chebyshev_tail));
    }
    Ok(parts.join(", "))
}

fn partition_chain() -> Outcome {
    let config = SamplerConfig {
        n: 5,
        steps: DEFAULT_BURN_IN + 1_000_000,
        burn_in: DEFAULT_BURN_IN,
        check: true,
    };
    let mut rng = RandomSource::new(9, 0);
    let run = partitions::run_partition_sampler(&config, &mut rng).map_err(|e| e.to_string())?;
    let tv = run.tv_to_uniform();
    let detail = format!(
        "{} reported steps over {} classes, TV = {tv:.5}, every step commuted",
        run.reported,
        run.counts.len()
    );
    check(run.reported == 1_000_000 && run.counts.len() == 7 && tv < 0.02, detail.clone(), detail)
}

fn conjecture() -> Outcome {
    let rows = montecarlo::conjecture_scan(&[10_000], 200, 7).map_err(|e| e.to_string())?;
    let r = &rows[0];
    let w = r.w_scaled.mean;
    let detail = format!(
        "n=10000, 200 trials: mean W/sqrt(n) = {w:.4} (se {:.4}), mean L/sqrt(n) = {:.4}",
        r.w_scaled.std_error, r.l_scaled.mean
    );
    check((2.7..=3.0).contains(&w), detail.clone(), detail)
}

fn run_cli(args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_wreath-lis"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("{args:?} failed: {}", String::from_utf8_lossy(&out.stderr)));
    }
    Ok(out.stdout)
}

fn reproducibility() -> Outcome {
    let commands: [&[&str]; 7] = [
        &["sample", "--n", "40", "--k", "7", "--seed", "3"],
        &["exact", "--wreath", "3", "2", "--statistic", "w"],
        &["scan", "--grid", "20x5,12", "--trials", "5000", "--seed", "11", "--format", "json"],
        &["scan", "--grid", "20x5,12", "--trials", "5000", "--seed", "11"],
        &["tail", "--k", "30", "--trials", "10000", "--seed", "11"],
        &["conjecture", "--grid", "50,200", "--trials", "3000", "--seed", "11"],
        &["partitions", "--n", "6", "--steps", "20000", "--seed", "11", "--format", "json"],
    ];
    for args in commands {
        let reference = run_cli(args)?;
        for threads in ["1", "2", "4", "1"] {
            let mut with_threads = args.to_vec();
            with_threads.extend(["--threads", threads]);
            if run_cli(&with_threads)? != reference {
                return Err(format!("{args:?} differs with --threads {threads}"));
            }
        }
    }
    Ok(format!("{} commands byte-identical over reruns and --threads 1, 2, 4", commands.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("wreath-action LIS table of G_{2,2}", table_1),
        ("signed-action LIS table of B_2", table_2),
        ("worked example word and LIS", worked_example),
        ("exact moment identities for W", moments),
        ("W <= L exhaustively and on random draws", lower_bound),
        ("fast LIS agrees with quadratic oracle", lis_equivalence),
        ("LIS / (4 sqrt(nk)) trend and window", theorem_trend),
        ("LIS tail bound and Chebyshev step", tail),
        ("partition chain stationarity", partition_chain),
        ("block size two scan of W / sqrt(n)", conjecture),
        ("byte-identical CLI output", reproducibility),
    ];
    let mut failed = 0;
    for (i, (name, criterion)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = criterion();
        let elapsed = start.elapsed();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS [{elapsed:.1?}] {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL [{elapsed:.1?}] {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
