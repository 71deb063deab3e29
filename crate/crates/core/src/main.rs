use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use wreath_lis::exact::{self, EnumerationCaps, WreathStatistic};
use wreath_lis::montecarlo::{
    self, CONJECTURE_CSV_HEADER, DEFAULT_U_GRID, SCAN_CSV_HEADER,
};
use wreath_lis::partitions::{self, SamplerConfig, DEFAULT_BURN_IN};
use wreath_lis::{decompose, lis_fast, Error, Permutation, RandomSource, WreathElement};

const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Longest increasing subsequences of random wreath-product permutations.
///
/// Every output starts with one metadata line (JSON; prefixed by "# " in CSV
/// output) holding the version, command, seed and configuration, which is
/// enough to reproduce it exactly. Exit codes: 0 success, 2 usage error,
/// 3 enumeration cap exceeded, 4 internal invariant violation.
#[derive(Debug, Parser)]
#[command(name = "wreath-lis", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Worker threads; results do not depend on this value.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Fixture {
    /// ((1 2), (1)(2), (1 2); (3 1 2)) in S_2 wr S_3, word 6 5 2 1 3 4.
    Demo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StatArg {
    L,
    W,
    N,
}

impl From<StatArg> for WreathStatistic {
    fn from(s: StatArg) -> Self {
        match s {
            StatArg::L => WreathStatistic::L,
            StatArg::W => WreathStatistic::W,
            StatArg::N => WreathStatistic::N,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Draw one wreath element and print its word, L and block decomposition.
    ///
    /// CSV columns: n,k,word,L,W,N,chosen_blocks,per_block_lis
    Sample(SampleArgs),
    /// Exact distributions by exhaustive enumeration.
    ///
    /// CSV columns: value,count,probability
    Exact(ExactArgs),
    /// Monte Carlo scan of L / (4 sqrt(nk)) over a grid of (n, k).
    ///
    /// CSV columns: n,k,trials,mean_L,se_L,var_L,median_L,mean_ratio,mean_W.
    /// JSON output is one record per trial: {"trial","n","k","L","W","N"}.
    Scan(ScanArgs),
    /// Empirical upper tails of the LIS of a uniform permutation against
    /// 2 exp(-u^2 / (4 (h + u))), h = f + 2 sqrt(g).
    ///
    /// CSV columns: u,threshold,empirical_tail,bound,binomial_se,mc_error
    Tail(TailArgs),
    /// Block size 2 scan of L / sqrt(n) and W / sqrt(n).
    ///
    /// CSV columns: n,k,trials,mean_L_over_sqrt_n,se_L_over_sqrt_n,mean_W_over_sqrt_n,se_W_over_sqrt_n,median_L_over_sqrt_n
    Conjecture(ConjectureArgs),
    /// Random partitions from the commuting-graph walk on S_n.
    ///
    /// CSV columns: partition,count,frequency. JSON output is one array of
    /// descending parts per reported step.
    Partitions(PartitionArgs),
}

#[derive(Debug, Args)]
struct SampleArgs {
    #[arg(long, required_unless_present = "fixture")]
    n: Option<usize>,
    #[arg(long, required_unless_present = "fixture")]
    k: Option<usize>,
    #[arg(long, required_unless_present = "fixture")]
    seed: Option<u64>,
    /// Print a fixed element instead of sampling.
    #[arg(long, conflicts_with_all = ["n", "k", "seed"])]
    fixture: Option<Fixture>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Debug, Args)]
#[group(id = "target", required = true, multiple = false)]
struct ExactTarget {
    /// Wreath action of S_K wr S_N: takes N K.
    #[arg(long, num_args = 2, value_names = ["N", "K"], group = "target")]
    wreath: Option<Vec<usize>>,
    /// Signed action of the hyperoctahedral group B_N.
    #[arg(long, value_name = "N", group = "target")]
    signed: Option<usize>,
    /// LIS over the symmetric group S_M.
    #[arg(long, value_name = "M", group = "target")]
    sym: Option<usize>,
    /// Exact moment identities for W over S_K wr S_N: takes N K.
    #[arg(long, num_args = 2, value_names = ["N", "K"], group = "target")]
    moments: Option<Vec<usize>>,
}

#[derive(Debug, Args)]
struct ExactArgs {
    #[command(flatten)]
    target: ExactTarget,
    /// Statistic for --wreath.
    #[arg(long, value_enum, default_value = "l")]
    statistic: StatArg,
    /// Largest group order to enumerate.
    #[arg(long, default_value_t = 1_000_000)]
    cap: u128,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Debug, Args)]
struct ScanArgs {
    /// Comma-separated cells: "16" means n = k = 16, "100x20" means n = 100, k = 20.
    #[arg(long)]
    grid: String,
    #[arg(long)]
    trials: u64,
    #[arg(long)]
    seed: u64,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Debug, Args)]
struct TailArgs {
    #[arg(long)]
    k: usize,
    #[arg(long)]
    trials: u64,
    #[arg(long)]
    seed: u64,
    /// Comma-separated offsets u >= 0.
    #[arg(long)]
    u_grid: Option<String>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Debug, Args)]
struct ConjectureArgs {
    /// Comma-separated block counts n (block size is 2).
    #[arg(long)]
    grid: String,
    #[arg(long)]
    trials: u64,
    #[arg(long)]
    seed: u64,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Debug, Args)]
struct PartitionArgs {
    #[arg(long)]
    n: usize,
    /// Reported steps after the burn-in.
    #[arg(long)]
    steps: u64,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_BURN_IN)]
    burn_in: u64,
    /// Verify that every step commutes with its predecessor.
    #[arg(long)]
    check: bool,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

enum Failure {
    Usage(String),
    Lib(Error),
    Io(io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Lib(Error::CapExceeded { .. }) => 3,
            Failure::Lib(Error::InvariantViolation(_) | Error::IdentityViolation { .. }) => 4,
            Failure::Lib(_) => 2,
            Failure::Io(_) => 1,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(m) => f.write_str(m),
            Failure::Lib(e) => write!(f, "{e}"),
            Failure::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

type Sink = BufWriter<Box<dyn Write + Send>>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {failure}");
            ExitCode::from(failure.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let writer: Box<dyn Write + Send> = match &cli.out {
        Some(path) => Box::new(File::create(path)?),
        None => Box::new(io::stdout()),
    };
    let mut out = BufWriter::new(writer);
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(Failure::Usage("--threads must be at least 1".into()));
        }
        builder = builder.num_threads(t);
    }
    let pool = builder
        .build()
        .map_err(|e| Failure::Usage(format!("cannot build thread pool: {e}")))?;
    pool.install(|| match &cli.command {
        Command::Sample(a) => cmd_sample(a, &mut out),
        Command::Exact(a) => cmd_exact(a, &mut out),
        Command::Scan(a) => cmd_scan(a, &mut out),
        Command::Tail(a) => cmd_tail(a, &mut out),
        Command::Conjecture(a) => cmd_conjecture(a, &mut out),
        Command::Partitions(a) => cmd_partitions(a, &mut out),
    })?;
    out.flush()?;
    Ok(())
}

fn write_meta(out: &mut Sink, format: Format, command: &str, seed: Option<u64>, config: Value) -> io::Result<()> {
    let meta = json!({
        "meta": {
            "tool": "wreath-lis",
            "version": VERSION,
            "command": command,
            "seed": seed,
            "config": config,
        }
    });
    match format {
        Format::Json => writeln!(out, "{meta}"),
        Format::Csv => writeln!(out, "# {meta}"),
    }
}

fn json_line(out: &mut Sink, value: &impl serde::Serialize) -> Result<(), Failure> {
    serde_json::to_writer(&mut *out, value).map_err(|e| Failure::Io(e.into()))?;
    writeln!(out)?;
    Ok(())
}

fn parse_list<T: std::str::FromStr>(raw: &str, what: &str) -> Result<Vec<T>, Failure> {
    let items: Vec<T> = raw
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| Failure::Usage(format!("malformed {what} entry {s:?}"))))
        .collect::<Result<_, _>>()?;
    if items.is_empty() {
        return Err(Failure::Usage(format!("{what} is empty")));
    }
    Ok(items)
}

fn parse_cells(raw: &str) -> Result<Vec<(usize, usize)>, Failure> {
    let cells: Vec<String> = parse_list(raw, "--grid")?;
    cells
        .iter()
        .map(|cell| {
            let bad = || Failure::Usage(format!("malformed --grid cell {cell:?}"));
            let (n, k) = match cell.split_once('x') {
                Some((n, k)) => (n.parse().map_err(|_| bad())?, k.parse().map_err(|_| bad())?),
                None => {
                    let v = cell.parse().map_err(|_| bad())?;
                    (v, v)
                }
            };
            if n == 0 || k == 0 {
                return Err(bad());
            }
            Ok((n, k))
        })
        .collect()
}

fn positive_trials(trials: u64) -> Result<(), Failure> {
    if trials == 0 {
        Err(Failure::Usage("--trials must be positive".into()))
    } else {
        Ok(())
    }
}

fn demo_element() -> WreathElement {
    let swap = Permutation::from_cycles(2, &[&[1, 2]]).expect("fixture");
    let outer = Permutation::from_cycles(3, &[&[3, 1, 2]]).expect("fixture");
    WreathElement::new(2, vec![swap.clone(), Permutation::identity(2), swap], outer).expect("fixture")
}

fn cmd_sample(a: &SampleArgs, out: &mut Sink) -> Result<(), Failure> {
    let (element, config, seed) = match a.fixture {
        Some(Fixture::Demo) => (demo_element(), json!({"fixture": "demo"}), None),
        None => {
            let (n, k, seed) = (a.n.unwrap_or(0), a.k.unwrap_or(0), a.seed.unwrap_or(0));
            let mut rng = RandomSource::new(seed, 0);
            let element = WreathElement::sample(n, k, &mut rng)?;
            (element, json!({"n": n, "k": k}), Some(seed))
        }
    };
    let word = element.to_word();
    let l = lis_fast(&word)?.length;
    let d = decompose(&element);
    if d.w > l {
        return Err(Error::InvariantViolation(format!("W = {} exceeds L = {l}", d.w)).into());
    }
    let word_text = Permutation::new(word.clone())?.to_string();
    write_meta(out, a.format, "sample", seed, config)?;
    match a.format {
        Format::Json => json_line(
            out,
            &json!({
                "n": element.n(),
                "k": element.k(),
                "inner": element.inner(),
                "outer": element.outer(),
                "word": word,
                "word_text": word_text,
                "L": l,
                "decomposition": {
                    "block_word": d.block_word,
                    "N": d.block_lis,
                    "chosen_blocks": d.chosen_blocks,
                    "per_block_lis": d.per_block_lis,
                    "W": d.w,
                },
            }),
        )?,
        Format::Csv => {
            let join = |v: &[usize]| v.iter().map(usize::to_string).collect::<Vec<_>>().join(" ");
            let chosen: Vec<usize> = d.chosen_blocks.iter().map(|&b| b as usize).collect();
            writeln!(out, "n,k,word,L,W,N,chosen_blocks,per_block_lis")?;
            writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                element.n(),
                element.k(),
                word_text,
                l,
                d.w,
                d.block_lis,
                join(&chosen),
                join(&d.per_block_lis)
            )?;
        }
    }
    Ok(())
}

fn cmd_exact(a: &ExactArgs, out: &mut Sink) -> Result<(), Failure> {
    let caps = EnumerationCaps {
        group_order: a.cap,
        ..Default::default()
    };
    let t = &a.target;
    if let Some(nk) = &t.moments {
        let (n, k) = (nk[0], nk[1]);
        let report = exact::verify_moment_identities(n, k, &caps)?;
        write_meta(out, a.format, "exact", None, json!({"moments": [n, k], "cap": a.cap.to_string()}))?;
        match a.format {
            Format::Json => json_line(out, &report)?,
            Format::Csv => {
                writeln!(out, "n,k,mean_w,mean_rhs,var_w,var_rhs")?;
                writeln!(out, "{n},{k},{},{},{},{}", report.mean_w, report.mean_rhs, report.var_w, report.var_rhs)?;
            }
        }
        return Ok(());
    }
    let (table, config) = if let Some(nk) = &t.wreath {
        let stat = WreathStatistic::from(a.statistic);
        let table = exact::enumerate_wreath(nk[0], nk[1], stat, &caps)?;
        (table, json!({"wreath": [nk[0], nk[1]], "statistic": format!("{stat:?}")}))
    } else if let Some(n) = t.signed {
        (exact::enumerate_signed(n, &caps)?, json!({"signed": n}))
    } else if let Some(m) = t.sym {
        (exact::enumerate_sym_lis(m, &caps)?, json!({"sym": m}))
    } else {
        return Err(Failure::Usage("one of --wreath, --signed, --sym, --moments is required".into()));
    };
    let mut config = config;
    config["cap"] = json!(a.cap.to_string());
    write_meta(out, a.format, "exact", None, config)?;
    match a.format {
        Format::Json => json_line(out, &table)?,
        Format::Csv => write!(out, "{}", table.to_csv())?,
    }
    Ok(())
}

fn cmd_scan(a: &ScanArgs, out: &mut Sink) -> Result<(), Failure> {
    positive_trials(a.trials)?;
    let cells = parse_cells(&a.grid)?;
    let config = json!({"grid": cells, "trials": a.trials});
    write_meta(out, a.format, "scan", Some(a.seed), config)?;
    match a.format {
        Format::Json => {
            montecarlo::theorem1_scan_with(&cells, a.trials, a.seed, |r| json_line(out, r).map_err(to_lib))?;
        }
        Format::Csv => {
            let rows = montecarlo::theorem1_scan(&cells, a.trials, a.seed)?;
            writeln!(out, "{SCAN_CSV_HEADER}")?;
            for row in rows {
                writeln!(out, "{}", row.csv_line())?;
            }
        }
    }
    Ok(())
}

fn to_lib(f: Failure) -> Error {
    Error::InvalidArgument(f.to_string())
}

fn cmd_tail(a: &TailArgs, out: &mut Sink) -> Result<(), Failure> {
    positive_trials(a.trials)?;
    let u_grid = match &a.u_grid {
        Some(raw) => parse_list::<f64>(raw, "--u-grid")?,
        None => DEFAULT_U_GRID.to_vec(),
    };
    let report = montecarlo::tail_check(a.k, a.trials, &u_grid, a.seed)?;
    let config = json!({"k": a.k, "trials": a.trials, "u_grid": u_grid});
    write_meta(out, a.format, "tail", Some(a.seed), config)?;
    match a.format {
        Format::Json => json_line(out, &report)?,
        Format::Csv => write!(out, "{}", report.to_csv())?,
    }
    Ok(())
}

fn cmd_conjecture(a: &ConjectureArgs, out: &mut Sink) -> Result<(), Failure> {
    positive_trials(a.trials)?;
    let grid: Vec<usize> = parse_list(&a.grid, "--grid")?;
    if grid.contains(&0) {
        return Err(Failure::Usage("--grid entries must be positive".into()));
    }
    let config = json!({"grid": grid, "k": 2, "trials": a.trials});
    write_meta(out, a.format, "conjecture", Some(a.seed), config)?;
    match a.format {
        Format::Json => {
            montecarlo::conjecture_scan_with(&grid, a.trials, a.seed, |r| json_line(out, r).map_err(to_lib))?;
        }
        Format::Csv => {
            let rows = montecarlo::conjecture_scan(&grid, a.trials, a.seed)?;
            writeln!(out, "{CONJECTURE_CSV_HEADER}")?;
            for row in rows {
                writeln!(out, "{}", row.csv_line())?;
            }
        }
    }
    Ok(())
}

fn cmd_partitions(a: &PartitionArgs, out: &mut Sink) -> Result<(), Failure> {
    if a.steps == 0 {
        return Err(Failure::Usage("--steps must be positive".into()));
    }
    let config = SamplerConfig {
        n: a.n,
        steps: a.steps + a.burn_in,
        burn_in: a.burn_in,
        check: a.check,
    };
    let meta = json!({"n": a.n, "steps": a.steps, "burn_in": a.burn_in, "check": a.check});
    write_meta(out, a.format, "partitions", Some(a.seed), meta)?;
    let mut rng = RandomSource::new(a.seed, 0);
    match a.format {
        Format::Json => {
            partitions::run_partition_sampler_with(&config, &mut rng, |c| json_line(out, c).map_err(to_lib))?;
        }
        Format::Csv => {
            let run = partitions::run_partition_sampler(&config, &mut rng)?;
            write!(out, "{}", run.to_csv())?;
        }
    }
    Ok(())
}
