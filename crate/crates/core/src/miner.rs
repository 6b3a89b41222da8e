//! Depth-first fuzzy-list search over the set-enumeration tree.
//!
//! Three prunes can be toggled independently:
//!
//! * fuub filter on base items before any list is built,
//! * remaining utility: a node whose `sumIfu + sumRfu` is below gamma is not
//!   extended,
//! * expended utility: a join `XY` is abandoned once the `ifu + rfu` mass of `X`
//!   over transactions shared with `Y` falls below gamma.
//!
//! The set of reported itemsets does not depend on the toggles or on the item
//! order, only the amount of work does.

use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};
use std::time::Instant;

use crate::error::{FuimError, Result};
use crate::fuzzy::FuzzyDatabase;
use crate::fuzzylist::{build_initial_lists, join_unchecked, Element, FuzzyList, JoinOutcome};
use crate::order::{ItemOrder, OrderDirection};
use crate::result::{below_threshold, Hfui, MiningResult, RunStats};

#[derive(Debug, Clone, PartialEq)]
pub struct MinerConfig {
    pub gamma: f64,
    pub order: OrderDirection,
    pub prune_fuub: bool,
    pub prune_remaining: bool,
    pub prune_expended: bool,
    /// Required to run with `prune_fuub` off.
    pub exhaustive: bool,
    pub max_pattern_length: Option<usize>,
    /// Abort with [`FuimError::ResourceLimit`] past this many constructed lists.
    pub max_constructed_lists: Option<u64>,
    /// Explore top-level branches concurrently (needs the `parallel` feature).
    pub parallel: bool,
}

impl MinerConfig {
    /// All prunes on, ascending order, sequential.
    pub fn new(gamma: f64) -> Self {
        MinerConfig {
            gamma,
            order: OrderDirection::Ascending,
            prune_fuub: true,
            prune_remaining: true,
            prune_expended: true,
            exhaustive: false,
            max_pattern_length: None,
            max_constructed_lists: None,
            parallel: false,
        }
    }

    pub fn for_variant(variant: Variant, gamma: f64) -> Self {
        let (prune_remaining, prune_expended) = variant.prunes();
        MinerConfig {
            prune_remaining,
            prune_expended,
            ..Self::new(gamma)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma.is_finite() && self.gamma >= 0.0) {
            return Err(FuimError::Validation(format!(
                "gamma must be finite and non-negative, got {}",
                self.gamma
            )));
        }
        if !self.prune_fuub && !self.exhaustive {
            return Err(FuimError::Validation(
                "disabling the fuub filter requires the exhaustive flag".into(),
            ));
        }
        if self.max_pattern_length == Some(0) {
            return Err(FuimError::Validation("max pattern length must be positive".into()));
        }
        Ok(())
    }
}

/// Miner variants used in the ablation study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    /// All prunes.
    Fuim,
    /// fuub filter only.
    Fuim1,
    /// fuub filter and remaining utility.
    Fuim2,
    /// fuub filter and expended utility.
    Fuim3,
}

impl Variant {
    pub const ALL: [Variant; 4] = [Variant::Fuim, Variant::Fuim1, Variant::Fuim2, Variant::Fuim3];

    /// `(prune_remaining, prune_expended)`.
    pub fn prunes(self) -> (bool, bool) {
        match self {
            Variant::Fuim => (true, true),
            Variant::Fuim1 => (false, false),
            Variant::Fuim2 => (true, false),
            Variant::Fuim3 => (false, true),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Variant::Fuim => "FUIM",
            Variant::Fuim1 => "FUIM1",
            Variant::Fuim2 => "FUIM2",
            Variant::Fuim3 => "FUIM3",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = FuimError;

    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| FuimError::Validation(format!("unknown miner variant {s:?}")))
    }
}

/// Called with every fuzzy-list the search visits.
pub type Observer<'o> = &'o mut dyn FnMut(&FuzzyList);

/// Accumulates emitted itemsets and counters for one search.
pub struct SearchState<'a, 'o> {
    cfg: &'a MinerConfig,
    budget: Option<&'a AtomicU64>,
    observer: Option<Observer<'o>>,
    pub hfuis: Vec<Hfui>,
    pub stats: RunStats,
    live_elements: u64,
    peak_elements: u64,
}

impl<'a, 'o> SearchState<'a, 'o> {
    pub fn new(cfg: &'a MinerConfig) -> Self {
        SearchState {
            cfg,
            budget: None,
            observer: None,
            hfuis: Vec::new(),
            stats: RunStats::default(),
            live_elements: 0,
            peak_elements: 0,
        }
    }

    /// Largest number of list elements this search held alive at once,
    /// excluding the lists it was handed.
    pub fn peak_elements(&self) -> u64 {
        self.peak_elements
    }

    /// Processes node `lists[index]`: emit, then extend with its later siblings.
    fn visit(&mut self, prefix: Option<&FuzzyList>, lists: &[FuzzyList], index: usize) -> Result<()> {
        let cfg = self.cfg;
        let x = &lists[index];
        self.stats.visited_nodes += 1;
        if let Some(obs) = self.observer.as_mut() {
            obs(x);
        }
        if x.sum_ifu() >= cfg.gamma {
            self.hfuis.push(Hfui {
                itemset: x.itemset().clone(),
                utility: x.sum_ifu(),
            });
        }
        if cfg.max_pattern_length.is_some_and(|max| x.itemset().len() >= max) {
            return Ok(());
        }
        if cfg.prune_remaining && below_threshold(x.sum_ifu() + x.sum_rfu(), cfg.gamma) {
            self.stats.pruned_by_remaining += 1;
            return Ok(());
        }

        let bound = cfg.prune_expended.then_some(cfg.gamma);
        let x_item = x.last().item;
        let mut extensions = Vec::new();
        for y in &lists[index + 1..] {
            if y.last().item == x_item {
                continue;
            }
            match join_unchecked(prefix, x, y, bound) {
                JoinOutcome::Pruned => self.stats.pruned_by_expended += 1,
                JoinOutcome::Built(list) if list.is_empty() => {}
                JoinOutcome::Built(list) => {
                    self.stats.constructed_lists += 1;
                    self.charge()?;
                    extensions.push(list);
                }
            }
        }
        if extensions.is_empty() {
            return Ok(());
        }

        let held: u64 = extensions.iter().map(|l| l.len() as u64).sum();
        self.live_elements += held;
        self.peak_elements = self.peak_elements.max(self.live_elements);
        let outcome = miner_step(Some(x), &extensions, self);
        self.live_elements -= held;
        outcome
    }

    fn charge(&self) -> Result<()> {
        if let (Some(limit), Some(counter)) = (self.cfg.max_constructed_lists, self.budget) {
            if counter.fetch_add(1, AtomicOrdering::Relaxed) + 1 > limit {
                return Err(FuimError::ResourceLimit(format!(
                    "more than {limit} fuzzy-lists constructed"
                )));
            }
        }
        Ok(())
    }
}

/// One level of the search: every list in `lists` shares the prefix `prefix`
/// and is visited in order.
pub fn miner_step(prefix: Option<&FuzzyList>, lists: &[FuzzyList], state: &mut SearchState<'_, '_>) -> Result<()> {
    for index in 0..lists.len() {
        state.visit(prefix, lists, index)?;
    }
    Ok(())
}

/// Global order used by [`mine`] for this database and config.
pub fn compute_order(fdb: &FuzzyDatabase<'_>, direction: OrderDirection) -> ItemOrder {
    ItemOrder::compute(fdb, direction)
}

pub fn mine(fdb: &FuzzyDatabase<'_>, cfg: &MinerConfig) -> Result<MiningResult> {
    mine_with(fdb, cfg, None, None)
}

/// [`mine`] with an explicit item order and/or a node observer.
///
/// An observer forces the sequential search.
pub fn mine_with(
    fdb: &FuzzyDatabase<'_>,
    cfg: &MinerConfig,
    order: Option<ItemOrder>,
    observer: Option<Observer<'_>>,
) -> Result<MiningResult> {
    cfg.validate()?;
    let started = Instant::now();
    let fuubs = fdb.item_fuubs();
    let order = match order {
        Some(o) if o.items().len() == fuubs.len() => o,
        Some(_) => return Err(FuimError::Validation("explicit order does not cover every item".into())),
        None => ItemOrder::from_fuubs(&fuubs, cfg.order),
    };
    let promising: Vec<bool> = fuubs
        .iter()
        .map(|&f| !cfg.prune_fuub || !below_threshold(f, cfg.gamma))
        .collect();
    let lists = build_initial_lists(fdb, &order, &promising);
    let initial_elements: u64 = lists.iter().map(|l| l.len() as u64).sum();
    let budget = AtomicU64::new(0);

    let branches = if observer.is_none() && cfg.parallel {
        search_parallel(cfg, &lists, &budget)?
    } else {
        let mut state = SearchState::new(cfg);
        state.budget = Some(&budget);
        state.observer = observer;
        let mut branches = Vec::with_capacity(lists.len());
        // one state per top-level branch keeps the peak accounting identical
        // to the parallel path
        for index in 0..lists.len() {
            state.visit(None, &lists, index)?;
            branches.push(Branch {
                hfuis: std::mem::take(&mut state.hfuis),
                stats: std::mem::take(&mut state.stats),
                peak_elements: std::mem::take(&mut state.peak_elements),
            });
        }
        branches
    };

    let mut result = MiningResult::default();
    let mut peak_branch = 0;
    for b in branches {
        result.hfuis.extend(b.hfuis);
        result.stats.add_counters(&b.stats);
        peak_branch = peak_branch.max(b.peak_elements);
    }
    result.stats.peak_memory_estimate = (initial_elements + peak_branch) * std::mem::size_of::<Element>() as u64;
    result.sort_by_order(&order);
    result.stats.wall_time = started.elapsed();
    Ok(result)
}

struct Branch {
    hfuis: Vec<Hfui>,
    stats: RunStats,
    peak_elements: u64,
}

#[cfg(feature = "parallel")]
fn search_parallel(cfg: &MinerConfig, lists: &[FuzzyList], budget: &AtomicU64) -> Result<Vec<Branch>> {
    use rayon::prelude::*;

    (0..lists.len())
        .into_par_iter()
        .map(|index| {
            let mut state = SearchState::new(cfg);
            state.budget = Some(budget);
            state.visit(None, lists, index)?;
            Ok(Branch {
                hfuis: state.hfuis,
                stats: state.stats,
                peak_elements: state.peak_elements,
            })
        })
        .collect()
}

#[cfg(not(feature = "parallel"))]
fn search_parallel(cfg: &MinerConfig, lists: &[FuzzyList], budget: &AtomicU64) -> Result<Vec<Branch>> {
    let mut branches = Vec::with_capacity(lists.len());
    for index in 0..lists.len() {
        let mut state = SearchState::new(cfg);
        state.budget = Some(budget);
        state.visit(None, lists, index)?;
        branches.push(Branch {
            hfuis: state.hfuis,
            stats: state.stats,
            peak_elements: state.peak_elements,
        });
    }
    Ok(branches)
}
