//! Mining output shared by the miner and both baselines.

use std::cmp::Ordering;
use std::time::Duration;

use crate::fuzzy::FuzzyItemset;
use crate::order::ItemOrder;

/// Relative tolerance used whenever two fuzzy utilities are compared.
pub const UTILITY_REL_TOL: f64 = 1e-9;

pub fn utilities_match(a: f64, b: f64, rel_tol: f64) -> bool {
    a == b || (a - b).abs() <= rel_tol * a.abs().max(b.abs())
}

/// Relative slack a bound must fall short of gamma by before it prunes.
pub const PRUNE_SLACK: f64 = 1e-9;

/// True when `bound` is below `gamma` by more than [`PRUNE_SLACK`].
pub fn below_threshold(bound: f64, gamma: f64) -> bool {
    bound < gamma - PRUNE_SLACK * gamma.abs().max(1.0)
}

/// A high fuzzy utility itemset and its total fuzzy utility.
#[derive(Debug, Clone, PartialEq)]
pub struct Hfui {
    pub itemset: FuzzyItemset,
    pub utility: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunStats {
    /// Fuzzy-lists examined by the search (one per enumeration-tree node).
    pub visited_nodes: u64,
    /// Joins that produced a non-empty list; for the two-phase baseline, the
    /// phase-one candidates of length two or more.
    pub constructed_lists: u64,
    pub pruned_by_remaining: u64,
    pub pruned_by_expended: u64,
    pub wall_time: Duration,
    /// Peak live fuzzy-list elements times the element size.
    pub peak_memory_estimate: u64,
}

impl RunStats {
    /// Counter totals of `self` and `other`; wall time and peak are left to the caller.
    pub(crate) fn add_counters(&mut self, other: &RunStats) {
        self.visited_nodes += other.visited_nodes;
        self.constructed_lists += other.constructed_lists;
        self.pruned_by_remaining += other.pruned_by_remaining;
        self.pruned_by_expended += other.pruned_by_expended;
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct MiningResult {
    pub hfuis: Vec<Hfui>,
    pub stats: RunStats,
}

impl MiningResult {
    /// Descending utility, ties broken lexicographically under `order`.
    pub fn sort_by_order(&mut self, order: &ItemOrder) {
        self.hfuis.sort_by(|a, b| {
            b.utility
                .total_cmp(&a.utility)
                .then_with(|| order.cmp_itemsets(&a.itemset, &b.itemset))
        });
    }

    /// Descending utility, ties broken by canonical `(item, region)` order.
    pub fn sort_canonical(&mut self) {
        self.hfuis.sort_by(|a, b| {
            b.utility
                .total_cmp(&a.utility)
                .then_with(|| a.itemset.canonical().members().cmp(b.itemset.canonical().members()))
        });
    }

    pub fn len(&self) -> usize {
        self.hfuis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hfuis.is_empty()
    }

    /// `(canonical itemset, utility)` pairs sorted by itemset.
    pub fn canonical_set(&self) -> Vec<(FuzzyItemset, f64)> {
        let mut out: Vec<_> = self.hfuis.iter().map(|h| (h.itemset.canonical(), h.utility)).collect();
        out.sort_by(|a, b| a.0.members().cmp(b.0.members()));
        out
    }

    /// `Ok` when both results hold the same itemsets with utilities within
    /// `rel_tol`; otherwise a description of the first difference.
    pub fn compare(&self, other: &MiningResult, rel_tol: f64) -> Result<(), String> {
        let a = self.canonical_set();
        let b = other.canonical_set();
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            let ord = match (a.get(i), b.get(j)) {
                (Some(x), Some(y)) => x.0.members().cmp(y.0.members()),
                (Some(_), None) => Ordering::Less,
                (None, _) => Ordering::Greater,
            };
            match ord {
                Ordering::Less => return Err(format!("only in left: {:?} = {}", a[i].0.members(), a[i].1)),
                Ordering::Greater => return Err(format!("only in right: {:?} = {}", b[j].0.members(), b[j].1)),
                Ordering::Equal => {
                    if !utilities_match(a[i].1, b[j].1, rel_tol) {
                        return Err(format!(
                            "utility differs for {:?}: {} vs {}",
                            a[i].0.members(),
                            a[i].1,
                            b[j].1
                        ));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        Ok(())
    }
}
