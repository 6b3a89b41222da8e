//! Two-phase level-wise fuzzy utility mining.
//!
//! Phase one grows candidates level by level, Apriori style, keeping only
//! those whose fuub reaches gamma (fuub is anti-monotone, so the surviving
//! sets are closed under subsets). Phase two rescans the database for the
//! exact fuzzy utility of every survivor.

use std::collections::{HashMap, HashSet};
use std::time::Instant;

use crate::database::ItemId;
use crate::error::{FuimError, Result};
use crate::fuzzy::{FuzzyDatabase, FuzzyItem, FuzzyItemset};
use crate::order::{ItemOrder, OrderDirection};
use crate::result::{below_threshold, Hfui, MiningResult};

#[derive(Debug, Clone, PartialEq)]
pub struct TpfuConfig {
    pub gamma: f64,
    /// Abort with [`FuimError::ResourceLimit`] once phase one generates more
    /// candidates than this.
    pub max_candidates: Option<u64>,
}

impl TpfuConfig {
    pub fn new(gamma: f64) -> Self {
        TpfuConfig {
            gamma,
            max_candidates: None,
        }
    }
}

pub fn tpfu_mine(fdb: &FuzzyDatabase<'_>, gamma: f64) -> Result<MiningResult> {
    tpfu_mine_with(fdb, &TpfuConfig::new(gamma))
}

struct Candidate {
    members: Vec<FuzzyItem>,
    tids: std::rc::Rc<Vec<u32>>,
}

fn intersect(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len().min(b.len()));
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

pub fn tpfu_mine_with(fdb: &FuzzyDatabase<'_>, cfg: &TpfuConfig) -> Result<MiningResult> {
    if !(cfg.gamma.is_finite() && cfg.gamma >= 0.0) {
        return Err(FuimError::Validation(format!(
            "gamma must be non-negative, got {}",
            cfg.gamma
        )));
    }
    let started = Instant::now();
    let gamma = cfg.gamma;
    let fuubs = fdb.item_fuubs();
    let order = ItemOrder::from_fuubs(&fuubs, OrderDirection::Ascending);
    let mtfu: Vec<f64> = (0..fdb.len()).map(|t| fdb.max_transaction_fuzzy_utility(t)).collect();
    let fuub_of = |tids: &[u32]| -> f64 { tids.iter().map(|&t| mtfu[t as usize]).sum() };

    let item_count = fdb.database().item_count();
    let mut item_tids: Vec<Vec<u32>> = vec![Vec::new(); item_count];
    let mut has_region = vec![false; item_count * fdb.region_count()];
    for tx in 0..fdb.len() {
        for e in fdb.transaction(tx) {
            item_tids[e.item.index()].push(tx as u32);
            for &(r, _) in fdb.regions_of(e) {
                has_region[e.item.index() * fdb.region_count() + usize::from(r)] = true;
            }
        }
    }

    let mut result = MiningResult::default();
    let mut generated: u64 = 0;
    let mut peak_stored: u64 = 0;

    // level 1
    let mut level: Vec<Candidate> = Vec::new();
    for &item in order.items() {
        for r in 0..fdb.region_count() as u16 {
            if !has_region[item.index() * fdb.region_count() + usize::from(r)] {
                continue;
            }
            result.stats.visited_nodes += 1;
            if !below_threshold(fuubs[item.index()], gamma) {
                level.push(Candidate {
                    members: vec![FuzzyItem::new(item, r)],
                    tids: std::rc::Rc::new(item_tids[item.index()].clone()),
                });
            }
        }
    }

    let mut survivors: Vec<Vec<FuzzyItem>> = Vec::new();
    while !level.is_empty() {
        peak_stored = peak_stored.max(level.iter().map(|c| c.members.len() as u64).sum());
        let known: HashSet<&[FuzzyItem]> = level.iter().map(|c| c.members.as_slice()).collect();
        let mut fuub_cache: HashMap<Vec<ItemId>, (f64, std::rc::Rc<Vec<u32>>)> = HashMap::new();
        let mut next = Vec::new();
        let k = level[0].members.len();

        // `level` is sorted lexicographically under the order, so candidates
        // sharing a (k-1)-prefix are contiguous
        let mut start = 0;
        while start < level.len() {
            let prefix = &level[start].members[..k - 1];
            let mut end = start + 1;
            while end < level.len() && &level[end].members[..k - 1] == prefix {
                end += 1;
            }
            for a in start..end {
                for b in a + 1..end {
                    let (ca, cb) = (&level[a], &level[b]);
                    let tail = *cb.members.last().unwrap();
                    if ca.members.last().unwrap().item == tail.item {
                        continue;
                    }
                    let mut members = ca.members.clone();
                    members.push(tail);
                    // every k-subset obtained by dropping a prefix member must survive
                    let closed = (0..k - 1).all(|drop| {
                        let sub: Vec<FuzzyItem> = members
                            .iter()
                            .enumerate()
                            .filter(|&(i, _)| i != drop)
                            .map(|(_, m)| *m)
                            .collect();
                        known.contains(sub.as_slice())
                    });
                    if !closed {
                        continue;
                    }
                    generated += 1;
                    result.stats.visited_nodes += 1;
                    if cfg.max_candidates.is_some_and(|cap| generated > cap) {
                        return Err(FuimError::ResourceLimit(format!(
                            "two-phase miner generated more than {} candidates",
                            cfg.max_candidates.unwrap()
                        )));
                    }
                    let mut base: Vec<ItemId> = members.iter().map(|m| m.item).collect();
                    base.sort_unstable();
                    let (fuub, tids) = fuub_cache
                        .entry(base)
                        .or_insert_with(|| {
                            let tids = intersect(&ca.tids, &item_tids[tail.item.index()]);
                            (fuub_of(&tids), std::rc::Rc::new(tids))
                        })
                        .clone();
                    if !tids.is_empty() && !below_threshold(fuub, gamma) {
                        next.push(Candidate { members, tids });
                    }
                }
            }
            start = end;
        }
        drop(known);
        survivors.extend(level.into_iter().map(|c| c.members));
        level = next;
    }
    result.stats.constructed_lists = generated;
    result.stats.peak_memory_estimate = peak_stored * std::mem::size_of::<FuzzyItem>() as u64;

    // phase 2
    for members in survivors {
        let itemset = FuzzyItemset::new(members).expect("distinct base items by construction");
        let utility = fdb.total_fuzzy_utility(&itemset);
        if utility > 0.0 && utility >= gamma {
            result.hfuis.push(Hfui { itemset, utility });
        }
    }
    result.sort_by_order(&order);
    result.stats.wall_time = started.elapsed();
    Ok(result)
}
