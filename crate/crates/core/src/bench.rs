//! Ablation and scalability benchmark harness with CSV output.
//!
//! Every `(dataset size, gamma)` cell runs each requested algorithm `repeat`
//! times; the wall-time column is the arithmetic mean, counters come from the
//! first run. Before a cell's rows are emitted, the HFUI sets of all completed
//! runs are compared and any disagreement aborts the benchmark.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Duration;

use crate::baseline::{oracle_mine, tpfu_mine_with, OracleConfig, TpfuConfig};
use crate::database::{QuantitativeDatabase, Threshold};
use crate::error::{FuimError, Result};
use crate::fuzzy::{FuzzyDatabase, MembershipFunction};
use crate::miner::{mine, MinerConfig, Variant};
use crate::order::OrderDirection;
use crate::result::{MiningResult, UTILITY_REL_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Miner(Variant),
    Tpfu,
    Oracle,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Miner(v) => v.name(),
            Algorithm::Tpfu => "TPFU",
            Algorithm::Oracle => "ORACLE",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = FuimError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "TPFU" => Ok(Algorithm::Tpfu),
            "ORACLE" => Ok(Algorithm::Oracle),
            _ => s.parse().map(Algorithm::Miner),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub algorithms: Vec<Algorithm>,
    pub thresholds: Vec<Threshold>,
    pub repeat: usize,
    /// Transaction-prefix fractions; `[1.0]` benchmarks the whole database.
    pub fractions: Vec<f64>,
    pub order: OrderDirection,
    pub parallel: bool,
    pub miner_cap: Option<u64>,
    pub tpfu_cap: Option<u64>,
    pub oracle: OracleConfig,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            algorithms: vec![
                Algorithm::Miner(Variant::Fuim),
                Algorithm::Miner(Variant::Fuim2),
                Algorithm::Miner(Variant::Fuim3),
                Algorithm::Tpfu,
            ],
            thresholds: vec![Threshold::Rate(0.001)],
            repeat: 3,
            fractions: vec![1.0],
            order: OrderDirection::Ascending,
            parallel: false,
            miner_cap: None,
            tpfu_cap: Some(10_000_000),
            oracle: OracleConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowStatus {
    Ok,
    /// The run hit its resource cap; metrics are blank.
    Capped,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub dataset: String,
    pub transactions: usize,
    pub threshold: String,
    pub gamma: f64,
    pub algorithm: Algorithm,
    pub status: RowStatus,
    pub hfuis: usize,
    pub candidates: u64,
    pub visited_nodes: u64,
    pub wall_time: Duration,
    pub peak_memory_estimate: u64,
}

fn run_once(fdb: &FuzzyDatabase<'_>, algorithm: Algorithm, gamma: f64, cfg: &BenchConfig) -> Result<MiningResult> {
    match algorithm {
        Algorithm::Miner(v) => {
            let mut mc = MinerConfig::for_variant(v, gamma);
            mc.order = cfg.order;
            mc.parallel = cfg.parallel;
            mc.max_constructed_lists = cfg.miner_cap;
            mine(fdb, &mc)
        }
        Algorithm::Tpfu => tpfu_mine_with(
            fdb,
            &TpfuConfig {
                gamma,
                max_candidates: cfg.tpfu_cap,
            },
        ),
        Algorithm::Oracle => oracle_mine(fdb, gamma, &cfg.oracle),
    }
}

pub fn run_bench(
    dataset: &str,
    db: &QuantitativeDatabase,
    mf: &MembershipFunction,
    cfg: &BenchConfig,
) -> Result<Vec<BenchRow>> {
    if cfg.repeat == 0 {
        return Err(FuimError::Validation("repeat must be at least 1".into()));
    }
    if cfg.fractions.iter().any(|f| !(*f > 0.0 && *f <= 1.0)) {
        return Err(FuimError::Validation("prefix fractions must lie in (0, 1]".into()));
    }
    let mut rows = Vec::new();
    for &fraction in &cfg.fractions {
        let size = ((db.len() as f64) * fraction).round() as usize;
        let part = db.prefix(size);
        let fdb = FuzzyDatabase::new(&part, mf);
        for &threshold in &cfg.thresholds {
            let gamma = threshold.resolve(&part)?;
            let mut cell: Vec<(BenchRow, Option<MiningResult>)> = Vec::new();
            for &algorithm in &cfg.algorithms {
                let mut first: Option<MiningResult> = None;
                let mut total = Duration::ZERO;
                let mut capped = false;
                for _ in 0..cfg.repeat {
                    match run_once(&fdb, algorithm, gamma, cfg) {
                        Ok(res) => {
                            total += res.stats.wall_time;
                            first.get_or_insert(res);
                        }
                        Err(FuimError::ResourceLimit(_)) => {
                            capped = true;
                            break;
                        }
                        Err(e) => return Err(e),
                    }
                }
                let row = match (&first, capped) {
                    (Some(res), false) => BenchRow {
                        dataset: dataset.to_string(),
                        transactions: part.len(),
                        threshold: threshold.to_string(),
                        gamma,
                        algorithm,
                        status: RowStatus::Ok,
                        hfuis: res.len(),
                        candidates: res.stats.constructed_lists,
                        visited_nodes: res.stats.visited_nodes,
                        wall_time: total / cfg.repeat as u32,
                        peak_memory_estimate: res.stats.peak_memory_estimate,
                    },
                    _ => BenchRow {
                        dataset: dataset.to_string(),
                        transactions: part.len(),
                        threshold: threshold.to_string(),
                        gamma,
                        algorithm,
                        status: RowStatus::Capped,
                        hfuis: 0,
                        candidates: 0,
                        visited_nodes: 0,
                        wall_time: Duration::ZERO,
                        peak_memory_estimate: 0,
                    },
                };
                cell.push((row, if capped { None } else { first }));
            }

            let completed: Vec<_> = cell
                .iter()
                .filter_map(|(r, res)| res.as_ref().map(|x| (r.algorithm, x)))
                .collect();
            if let Some((base_alg, base)) = completed.first() {
                for (alg, res) in &completed[1..] {
                    base.compare(res, UTILITY_REL_TOL).map_err(|diff| {
                        FuimError::Disagreement(format!(
                            "{dataset} ({} transactions, {threshold}): {base_alg} vs {alg}: {diff}",
                            part.len()
                        ))
                    })?;
                }
            }
            rows.extend(cell.into_iter().map(|(r, _)| r));
        }
    }
    Ok(rows)
}

pub const CSV_HEADER: [&str; 11] = [
    "dataset",
    "transactions",
    "threshold",
    "gamma",
    "variant",
    "status",
    "hfuis",
    "candidates",
    "visited_nodes",
    "wall_time_ms",
    "peak_memory_estimate",
];

pub fn write_csv<W: Write>(rows: &[BenchRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io_err = |e: csv::Error| FuimError::Io {
        context: "writing benchmark CSV".into(),
        source: std::io::Error::other(e),
    };
    w.write_record(CSV_HEADER).map_err(io_err)?;
    for r in rows {
        let ok = r.status == RowStatus::Ok;
        let metric = |v: String| if ok { v } else { String::new() };
        w.write_record([
            r.dataset.clone(),
            r.transactions.to_string(),
            r.threshold.clone(),
            r.gamma.to_string(),
            r.algorithm.to_string(),
            if ok { "ok".into() } else { "capped".into() },
            metric(r.hfuis.to_string()),
            metric(r.candidates.to_string()),
            metric(r.visited_nodes.to_string()),
            metric(format!("{:.3}", r.wall_time.as_secs_f64() * 1e3)),
            metric(r.peak_memory_estimate.to_string()),
        ])
        .map_err(io_err)?;
    }
    w.flush().map_err(|e| FuimError::io("writing benchmark CSV", e))?;
    Ok(())
}
