//! `fuim` command-line front end.
//!
//! Exit codes:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success (for `diff`: files agree) |
//! | 1 | internal error |
//! | 2 | bad command-line usage |
//! | 3 | input could not be read or parsed |
//! | 4 | validation error |
//! | 5 | resource limit hit |
//! | 6 | results disagree (`diff`, `bench`) |
//! | 7 | output could not be written |

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use fuim::baseline::{oracle_mine, tpfu_mine_with, OracleConfig, TpfuConfig};
use fuim::bench::{run_bench, write_csv, Algorithm, BenchConfig};
use fuim::database::parse_utilities;
use fuim::generate::{generate, GeneratorConfig};
use fuim::miner::{mine_with, Variant};
use fuim::report::{diff_results, parse_result, render_result, render_stats, RunManifest};
use fuim::result::UTILITY_REL_TOL;
use fuim::spmf::convert_spmf;
use fuim::{
    FuimError, FuzzyDatabase, ItemOrder, MembershipFunction, MinerConfig, MiningResult, OrderDirection,
    QuantitativeDatabase, Threshold,
};

/// Directory searched for `default.mf` when `--mf` is not given.
const CONFIG_DIR_ENV: &str = "FUIM_CONFIG_DIR";

#[derive(Parser)]
#[command(name = "fuim", version, about = "Fuzzy utility itemset mining")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mine high fuzzy utility itemsets with the fuzzy-list miner.
    Mine(MineArgs),
    /// Mine by exhaustive enumeration (small databases only).
    Oracle(OracleArgs),
    /// Mine with the two-phase level-wise baseline.
    Tpfu(TpfuArgs),
    /// Compare two result files, ignoring order.
    Diff(DiffArgs),
    /// Run the ablation / scalability benchmark and write CSV.
    Bench(BenchArgs),
    /// Generate a synthetic quantitative database.
    Generate(GenerateArgs),
    /// Convert an SPMF utility database into the quantity format.
    Convert(ConvertArgs),
    /// Print the fuzzy-lists of all promising fuzzy 1-items.
    Lists(ListsArgs),
}

#[derive(Args, Clone)]
struct Input {
    /// Transactions file (`tid:item=qty,...`).
    #[arg(long)]
    db: PathBuf,
    /// External-utility file (`item value`).
    #[arg(long)]
    eu: PathBuf,
    /// Membership-function file; defaults to $FUIM_CONFIG_DIR/default.mf, then the bundled function.
    #[arg(long)]
    mf: Option<PathBuf>,
}

#[derive(Args, Clone)]
#[group(required = true, multiple = false)]
struct ThresholdArg {
    /// Absolute minimum fuzzy utility.
    #[arg(long)]
    gamma: Option<f64>,
    /// Minimum fuzzy utility as a fraction of the total crisp utility.
    #[arg(long)]
    gamma_rate: Option<f64>,
}

impl ThresholdArg {
    fn threshold(&self) -> Threshold {
        match (self.gamma, self.gamma_rate) {
            (Some(g), _) => Threshold::Absolute(g),
            (_, Some(r)) => Threshold::Rate(r),
            _ => unreachable!("clap enforces exactly one"),
        }
    }
}

#[derive(Args, Clone)]
struct Output {
    /// Result file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Stats file.
    #[arg(long)]
    stats: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum OrderArg {
    Asc,
    Desc,
}

impl From<OrderArg> for OrderDirection {
    fn from(o: OrderArg) -> Self {
        match o {
            OrderArg::Asc => OrderDirection::Ascending,
            OrderArg::Desc => OrderDirection::Descending,
        }
    }
}

#[derive(Args)]
struct MineArgs {
    #[command(flatten)]
    input: Input,
    #[command(flatten)]
    threshold: ThresholdArg,
    #[command(flatten)]
    output: Output,
    #[arg(long, value_enum, default_value = "asc")]
    order: OrderArg,
    /// Ablation variant: FUIM, FUIM1, FUIM2 or FUIM3.
    #[arg(long, default_value = "FUIM")]
    variant: String,
    /// Build lists for every item, skipping the fuub filter (requires --exhaustive).
    #[arg(long)]
    no_fuub_filter: bool,
    /// Acknowledge that the search may be exponential.
    #[arg(long)]
    exhaustive: bool,
    /// Longest itemset to report or extend.
    #[arg(long)]
    max_length: Option<usize>,
    /// Abort after constructing this many fuzzy-lists.
    #[arg(long)]
    max_lists: Option<u64>,
    /// Explore top-level branches on all cores.
    #[arg(long)]
    parallel: bool,
    /// Also record the process peak RSS in the stats file (Linux only).
    #[arg(long)]
    rss: bool,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    input: Input,
    #[command(flatten)]
    threshold: ThresholdArg,
    #[command(flatten)]
    output: Output,
    /// Refuse databases with more distinct items than this.
    #[arg(long, default_value_t = 12)]
    max_items: usize,
}

#[derive(Args)]
struct TpfuArgs {
    #[command(flatten)]
    input: Input,
    #[command(flatten)]
    threshold: ThresholdArg,
    #[command(flatten)]
    output: Output,
    /// Abort once phase one generates more candidates than this.
    #[arg(long)]
    max_candidates: Option<u64>,
}

#[derive(Args)]
struct DiffArgs {
    left: PathBuf,
    right: PathBuf,
    #[arg(long, default_value_t = UTILITY_REL_TOL)]
    rel_tol: f64,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, requires = "eu")]
    db: Option<PathBuf>,
    #[arg(long)]
    eu: Option<PathBuf>,
    #[arg(long)]
    mf: Option<PathBuf>,
    /// Dataset name in the CSV (defaults to the transactions file name).
    #[arg(long)]
    name: Option<String>,
    /// Without --db, benchmark a generated database.
    #[command(flatten)]
    generator: GeneratorArgs,
    /// Comma-separated threshold rates.
    #[arg(long, value_delimiter = ',', default_values_t = [0.001, 0.002, 0.003, 0.004, 0.005])]
    gamma_rates: Vec<f64>,
    /// Comma-separated absolute thresholds; replaces --gamma-rates.
    #[arg(long, value_delimiter = ',')]
    gammas: Vec<f64>,
    /// Comma-separated algorithms: FUIM, FUIM1, FUIM2, FUIM3, TPFU, ORACLE.
    #[arg(long, value_delimiter = ',', default_value = "FUIM,FUIM2,FUIM3,TPFU")]
    variants: Vec<String>,
    #[arg(long, default_value_t = 3)]
    repeat: usize,
    /// Benchmark transaction prefixes of 40, 55, 70, 85 and 100 percent.
    #[arg(long)]
    scalability: bool,
    #[arg(long, value_enum, default_value = "asc")]
    order: OrderArg,
    #[arg(long)]
    parallel: bool,
    #[arg(long, default_value_t = 10_000_000)]
    tpfu_cap: u64,
    #[arg(long)]
    miner_cap: Option<u64>,
    /// CSV file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct GeneratorArgs {
    #[arg(long, default_value_t = 870)]
    items: usize,
    #[arg(long, default_value_t = 10_000)]
    transactions: usize,
    #[arg(long, default_value_t = 10.1)]
    avg_len: f64,
    /// Quantity range `lo-hi`.
    #[arg(long, default_value = "1-6")]
    quantity: String,
    #[arg(long, default_value_t = 5.0)]
    utility_mu: f64,
    #[arg(long, default_value_t = 1.5)]
    utility_sigma: f64,
    #[arg(long, default_value_t = 1.0)]
    popularity_sigma: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

impl GeneratorArgs {
    fn config(&self) -> Result<GeneratorConfig, FuimError> {
        let (lo, hi) = self
            .quantity
            .split_once('-')
            .and_then(|(a, b)| Some((a.trim().parse().ok()?, b.trim().parse().ok()?)))
            .ok_or_else(|| FuimError::Validation(format!("quantity range must be `lo-hi`, got {:?}", self.quantity)))?;
        Ok(GeneratorConfig {
            items: self.items,
            transactions: self.transactions,
            avg_len: self.avg_len,
            quantity_min: lo,
            quantity_max: hi,
            utility_mu: self.utility_mu,
            utility_sigma: self.utility_sigma,
            popularity_sigma: self.popularity_sigma,
            seed: self.seed,
        })
    }

    fn record(&self, m: &mut RunManifest) {
        m.push("items", self.items);
        m.push("transactions", self.transactions);
        m.push("avg_len", self.avg_len);
        m.push("quantity", &self.quantity);
        m.push("utility_mu", self.utility_mu);
        m.push("utility_sigma", self.utility_sigma);
        m.push("popularity_sigma", self.popularity_sigma);
        m.push("seed", self.seed);
    }
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    generator: GeneratorArgs,
    /// Membership function whose domain bounds the quantity range.
    #[arg(long)]
    mf: Option<PathBuf>,
    #[arg(long)]
    out_db: PathBuf,
    #[arg(long)]
    out_eu: PathBuf,
}

#[derive(Args)]
struct ConvertArgs {
    /// SPMF utility file (`items:tu:utilities`).
    #[arg(long)]
    spmf: PathBuf,
    #[arg(long)]
    eu: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ListsArgs {
    #[command(flatten)]
    input: Input,
    #[command(flatten)]
    threshold: ThresholdArg,
    #[arg(long, value_enum, default_value = "asc")]
    order: OrderArg,
}

fn exit_code(err: &FuimError) -> u8 {
    match err {
        FuimError::Parse { .. } => 3,
        FuimError::Validation(_) => 4,
        FuimError::ResourceLimit(_) => 5,
        FuimError::Disagreement(_) => 6,
        FuimError::Io { .. } => 7,
        FuimError::Precondition(_) | FuimError::Contract(_) => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Mine(a) => cmd_mine(a),
        Command::Oracle(a) => cmd_oracle(a),
        Command::Tpfu(a) => cmd_tpfu(a),
        Command::Diff(a) => cmd_diff(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Generate(a) => cmd_generate(a),
        Command::Convert(a) => cmd_convert(a),
        Command::Lists(a) => cmd_lists(a),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}

fn load_mf(path: Option<&Path>) -> Result<(MembershipFunction, String), FuimError> {
    if let Some(p) = path {
        return Ok((MembershipFunction::load(p)?, p.display().to_string()));
    }
    if let Some(dir) = std::env::var_os(CONFIG_DIR_ENV) {
        let candidate = PathBuf::from(dir).join("default.mf");
        if candidate.exists() {
            let mf = MembershipFunction::load(&candidate)?;
            return Ok((mf, candidate.display().to_string()));
        }
    }
    Ok((MembershipFunction::bundled(), "bundled".into()))
}

fn load_input(
    input: &Input,
    manifest: &mut RunManifest,
) -> Result<(QuantitativeDatabase, MembershipFunction), FuimError> {
    let (mf, mf_name) = load_mf(input.mf.as_deref())?;
    let db = QuantitativeDatabase::load(&input.db, &input.eu)?;
    manifest.push("db", input.db.display());
    manifest.push("eu", input.eu.display());
    manifest.push("mf", mf_name);
    Ok((db, mf))
}

fn write_file(path: &Path, contents: &str) -> Result<(), FuimError> {
    std::fs::write(path, contents).map_err(|e| FuimError::Io {
        context: format!("writing {}", path.display()),
        source: e,
    })
}

fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

fn peak_rss_kib() -> Option<u64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
    line.split_whitespace().nth(1)?.parse().ok()
}

fn emit(
    result: &MiningResult,
    fdb: &FuzzyDatabase<'_>,
    manifest: &RunManifest,
    output: &Output,
    started_at: u64,
    rss: bool,
) -> Result<(), FuimError> {
    let body = render_result(result, fdb, manifest);
    let mut stats = render_stats(result, manifest, started_at);
    if rss {
        match peak_rss_kib() {
            Some(kib) => stats.push_str(&format!("peak_rss_kib {kib}\n")),
            None => stats.push_str("peak_rss_kib unavailable\n"),
        }
    }
    match &output.out {
        Some(p) => write_file(p, &body)?,
        None => print!("{body}"),
    }
    if let Some(p) = &output.stats {
        write_file(p, &stats)?;
    }
    Ok(())
}

fn record_output(manifest: &mut RunManifest, output: &Output) {
    if let Some(p) = &output.out {
        manifest.push("out", p.display());
    }
    if let Some(p) = &output.stats {
        manifest.push("stats", p.display());
    }
}

fn cmd_mine(a: MineArgs) -> Result<u8, FuimError> {
    let started_at = unix_now();
    let mut manifest = RunManifest::new("mine");
    let (db, mf) = load_input(&a.input, &mut manifest)?;
    let threshold = a.threshold.threshold();
    let gamma = threshold.resolve(&db)?;
    let variant: Variant = a.variant.parse()?;
    let mut cfg = MinerConfig::for_variant(variant, gamma);
    cfg.order = a.order.into();
    cfg.prune_fuub = !a.no_fuub_filter;
    cfg.exhaustive = a.exhaustive;
    cfg.max_pattern_length = a.max_length;
    cfg.max_constructed_lists = a.max_lists;
    cfg.parallel = a.parallel;

    manifest.push("threshold", threshold);
    manifest.push("gamma", gamma);
    manifest.push("variant", variant);
    manifest.push("order", format!("{:?}", cfg.order).to_lowercase());
    manifest.push("prune_fuub", cfg.prune_fuub);
    manifest.push("prune_remaining", cfg.prune_remaining);
    manifest.push("prune_expended", cfg.prune_expended);
    if let Some(m) = cfg.max_pattern_length {
        manifest.push("max_length", m);
    }
    if let Some(m) = cfg.max_constructed_lists {
        manifest.push("max_lists", m);
    }
    manifest.push("parallel", cfg.parallel);
    record_output(&mut manifest, &a.output);

    let fdb = FuzzyDatabase::new(&db, &mf);
    let result = mine_with(&fdb, &cfg, None, None)?;
    emit(&result, &fdb, &manifest, &a.output, started_at, a.rss)?;
    Ok(0)
}

fn cmd_oracle(a: OracleArgs) -> Result<u8, FuimError> {
    let started_at = unix_now();
    let mut manifest = RunManifest::new("oracle");
    let (db, mf) = load_input(&a.input, &mut manifest)?;
    let threshold = a.threshold.threshold();
    let gamma = threshold.resolve(&db)?;
    manifest.push("threshold", threshold);
    manifest.push("gamma", gamma);
    manifest.push("max_items", a.max_items);
    record_output(&mut manifest, &a.output);
    let fdb = FuzzyDatabase::new(&db, &mf);
    let cfg = OracleConfig {
        max_items: a.max_items,
        ..Default::default()
    };
    let result = oracle_mine(&fdb, gamma, &cfg)?;
    emit(&result, &fdb, &manifest, &a.output, started_at, false)?;
    Ok(0)
}

fn cmd_tpfu(a: TpfuArgs) -> Result<u8, FuimError> {
    let started_at = unix_now();
    let mut manifest = RunManifest::new("tpfu");
    let (db, mf) = load_input(&a.input, &mut manifest)?;
    let threshold = a.threshold.threshold();
    let gamma = threshold.resolve(&db)?;
    manifest.push("threshold", threshold);
    manifest.push("gamma", gamma);
    if let Some(c) = a.max_candidates {
        manifest.push("max_candidates", c);
    }
    record_output(&mut manifest, &a.output);
    let fdb = FuzzyDatabase::new(&db, &mf);
    let cfg = TpfuConfig {
        gamma,
        max_candidates: a.max_candidates,
    };
    let result = tpfu_mine_with(&fdb, &cfg)?;
    emit(&result, &fdb, &manifest, &a.output, started_at, false)?;
    Ok(0)
}

fn cmd_diff(a: DiffArgs) -> Result<u8, FuimError> {
    let read = |p: &Path| -> Result<_, FuimError> {
        let text = std::fs::read_to_string(p).map_err(|e| FuimError::Parse {
            source_name: p.display().to_string(),
            line: 0,
            message: format!("cannot read file: {e}"),
        })?;
        parse_result(&text, &p.display().to_string())
    };
    let left = read(&a.left)?;
    let right = read(&a.right)?;
    match diff_results(&left, &right, a.rel_tol) {
        Ok(()) => {
            println!("identical: {} itemsets", left.len());
            Ok(0)
        }
        Err(first) => {
            println!("{first}");
            Ok(6)
        }
    }
}

fn cmd_bench(a: BenchArgs) -> Result<u8, FuimError> {
    let mut manifest = RunManifest::new("bench");
    let (mf, mf_name) = load_mf(a.mf.as_deref())?;
    let (db, name) = match (&a.db, &a.eu) {
        (Some(db), Some(eu)) => {
            manifest.push("db", db.display());
            manifest.push("eu", eu.display());
            let name = a
                .name
                .clone()
                .unwrap_or_else(|| db.file_stem().map_or("db".into(), |s| s.to_string_lossy().into_owned()));
            (QuantitativeDatabase::load(db, eu)?, name)
        }
        _ => {
            let cfg = a.generator.config()?;
            a.generator.record(&mut manifest);
            let name = a
                .name
                .clone()
                .unwrap_or_else(|| format!("synthetic-{}", a.generator.seed));
            (generate(&cfg)?, name)
        }
    };
    manifest.push("mf", mf_name);
    let algorithms = a
        .variants
        .iter()
        .map(|v| v.parse::<Algorithm>())
        .collect::<Result<Vec<_>, _>>()?;
    let fractions = if a.scalability {
        vec![0.40, 0.55, 0.70, 0.85, 1.0]
    } else {
        vec![1.0]
    };
    let thresholds: Vec<Threshold> = if a.gammas.is_empty() {
        a.gamma_rates.iter().map(|&r| Threshold::Rate(r)).collect()
    } else {
        a.gammas.iter().map(|&g| Threshold::Absolute(g)).collect()
    };
    let cfg = BenchConfig {
        algorithms,
        thresholds: thresholds.clone(),
        repeat: a.repeat,
        fractions,
        order: a.order.into(),
        parallel: a.parallel,
        miner_cap: a.miner_cap,
        tpfu_cap: Some(a.tpfu_cap),
        oracle: OracleConfig::default(),
    };
    manifest.push(
        "thresholds",
        thresholds.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(","),
    );
    manifest.push("variants", a.variants.join(","));
    manifest.push("repeat", a.repeat);
    manifest.push("scalability", a.scalability);
    manifest.push("parallel", a.parallel);
    manifest.push("tpfu_cap", a.tpfu_cap);
    if let Some(p) = &a.out {
        manifest.push("out", p.display());
    }

    let rows = run_bench(&name, &db, &mf, &cfg)?;
    let mut buf = manifest.header().into_bytes();
    write_csv(&rows, &mut buf)?;
    let text = String::from_utf8(buf).expect("CSV output is UTF-8");
    match &a.out {
        Some(p) => write_file(p, &text)?,
        None => print!("{text}"),
    }
    Ok(0)
}

fn cmd_generate(a: GenerateArgs) -> Result<u8, FuimError> {
    let cfg = a.generator.config()?;
    let (mf, mf_name) = load_mf(a.mf.as_deref())?;
    let domain = mf
        .regions()
        .iter()
        .filter_map(|r| r.breakpoints.last().map(|b| b.0))
        .fold(f64::NEG_INFINITY, f64::max);
    cfg.validate(Some(domain))?;
    let db = generate(&cfg)?;
    let mut manifest = RunManifest::new("generate");
    a.generator.record(&mut manifest);
    manifest.push("mf", mf_name);
    manifest.push("out_db", a.out_db.display());
    manifest.push("out_eu", a.out_eu.display());
    let header = manifest.header();
    write_file(&a.out_db, &format!("{header}{}", db.to_transactions_text()))?;
    write_file(&a.out_eu, &format!("{header}{}", db.to_utilities_text()))?;
    Ok(0)
}

fn cmd_convert(a: ConvertArgs) -> Result<u8, FuimError> {
    let read = |p: &Path| {
        std::fs::read_to_string(p).map_err(|e| FuimError::Parse {
            source_name: p.display().to_string(),
            line: 0,
            message: format!("cannot read file: {e}"),
        })
    };
    let spmf = read(&a.spmf)?;
    let eu = parse_utilities(&read(&a.eu)?, &a.eu.display().to_string())?;
    let tx = convert_spmf(&spmf, &eu, &a.spmf.display().to_string())?;
    let db = QuantitativeDatabase::new(tx, eu)?;
    let manifest = RunManifest::new("convert")
        .with("spmf", a.spmf.display())
        .with("eu", a.eu.display())
        .with("out", a.out.display());
    write_file(&a.out, &format!("{}{}", manifest.header(), db.to_transactions_text()))?;
    Ok(0)
}

fn cmd_lists(a: ListsArgs) -> Result<u8, FuimError> {
    let mut manifest = RunManifest::new("lists");
    let (db, mf) = load_input(&a.input, &mut manifest)?;
    let gamma = a.threshold.threshold().resolve(&db)?;
    let fdb = FuzzyDatabase::new(&db, &mf);
    let order = ItemOrder::compute(&fdb, a.order.into());
    let fuubs = fdb.item_fuubs();
    let promising: Vec<bool> = fuubs.iter().map(|&f| f >= gamma).collect();
    print!("{}", manifest.header());
    for list in fuim::fuzzylist::build_initial_lists(&fdb, &order, &promising) {
        println!("{}", list.dump(&fdb));
    }
    Ok(0)
}
