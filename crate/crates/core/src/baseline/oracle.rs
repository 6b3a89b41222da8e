//! Brute-force enumeration of every fuzzy itemset with positive support.
//!
//! Utilities come straight from [`FuzzyDatabase::total_fuzzy_utility`], a
//! full scan per itemset. Nothing here touches fuzzy-lists or item orders.

use std::time::Instant;

use crate::error::{FuimError, Result};
use crate::fuzzy::{FuzzyDatabase, FuzzyItem, FuzzyItemset};
use crate::result::{Hfui, MiningResult};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleConfig {
    /// Refuse databases with more distinct occurring items than this.
    pub max_items: usize,
    pub max_pattern_length: Option<usize>,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            max_items: 12,
            max_pattern_length: None,
        }
    }
}

/// Every fuzzy itemset with positive support, with its total fuzzy utility.
pub fn oracle_enumerate(fdb: &FuzzyDatabase<'_>, cfg: &OracleConfig) -> Result<Vec<Hfui>> {
    if cfg.max_items == 0 || cfg.max_pattern_length == Some(0) {
        return Err(FuimError::Validation("oracle caps must be positive".into()));
    }
    let mut atoms: Vec<FuzzyItem> = Vec::new();
    for tx in 0..fdb.len() {
        for e in fdb.transaction(tx) {
            for &(region, _) in fdb.regions_of(e) {
                atoms.push(FuzzyItem::new(e.item, region));
            }
        }
    }
    atoms.sort_unstable();
    atoms.dedup();
    let mut distinct: Vec<_> = atoms.iter().map(|a| a.item).collect();
    distinct.dedup();
    if distinct.len() > cfg.max_items {
        return Err(FuimError::ResourceLimit(format!(
            "oracle enumeration over {} items exceeds the cap of {}; \
             the search grows like (regions + 1)^items, shrink the database or raise max_items",
            distinct.len(),
            cfg.max_items
        )));
    }

    let mut out = Vec::new();
    let mut current = Vec::new();
    extend(fdb, cfg, &atoms, 0, &mut current, &mut out);
    Ok(out)
}

fn extend(
    fdb: &FuzzyDatabase<'_>,
    cfg: &OracleConfig,
    atoms: &[FuzzyItem],
    from: usize,
    current: &mut Vec<FuzzyItem>,
    out: &mut Vec<Hfui>,
) {
    if cfg.max_pattern_length.is_some_and(|m| current.len() >= m) {
        return;
    }
    for (i, &atom) in atoms.iter().enumerate().skip(from) {
        if current.last().is_some_and(|last| last.item >= atom.item) {
            continue;
        }
        current.push(atom);
        let itemset = FuzzyItemset::new(current.clone()).expect("distinct base items by construction");
        // supersets of a zero-support itemset have zero support too
        if fdb.support(&itemset) > 0 {
            let utility = fdb.total_fuzzy_utility(&itemset);
            out.push(Hfui { itemset, utility });
            extend(fdb, cfg, atoms, i + 1, current, out);
        }
        current.pop();
    }
}

/// All positive-support fuzzy itemsets whose total fuzzy utility reaches `gamma`.
pub fn oracle_mine(fdb: &FuzzyDatabase<'_>, gamma: f64, cfg: &OracleConfig) -> Result<MiningResult> {
    let started = Instant::now();
    let all = oracle_enumerate(fdb, cfg)?;
    let mut result = MiningResult::default();
    result.stats.visited_nodes = all.len() as u64;
    result.hfuis = all.into_iter().filter(|h| h.utility >= gamma).collect();
    result.sort_canonical();
    result.stats.wall_time = started.elapsed();
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::database::QuantitativeDatabase;
    use crate::fuzzy::MembershipFunction;

    #[test]
    fn single_transaction_single_item() {
        let db = QuantitativeDatabase::parse("1:a=1\n", "a 5\n").unwrap();
        let fdb = FuzzyDatabase::new(&db, &MembershipFunction::bundled());
        let res = oracle_mine(&fdb, 0.0, &OracleConfig::default()).unwrap();
        // q=1 is fully Low under the bundled function
        assert_eq!(res.len(), 1);
        assert_eq!(res.hfuis[0].utility, 5.0);
        assert!(oracle_mine(&fdb, 5.5, &OracleConfig::default()).unwrap().is_empty());
    }

    #[test]
    fn gamma_zero_reports_every_supported_itemset() {
        let db = QuantitativeDatabase::parse("1:a=2,b=4\n", "a 1\nb 1\n").unwrap();
        let fdb = FuzzyDatabase::new(&db, &MembershipFunction::bundled());
        // a=2 has two positive regions, b=4 has three: 2 + 3 + 2*3
        let res = oracle_mine(&fdb, 0.0, &OracleConfig::default()).unwrap();
        assert_eq!(res.len(), 11);
    }

    #[test]
    fn refuses_too_many_items() {
        let db = QuantitativeDatabase::parse("1:a=1,b=1,c=1\n", "a 1\nb 1\nc 1\n").unwrap();
        let fdb = FuzzyDatabase::new(&db, &MembershipFunction::bundled());
        let cfg = OracleConfig {
            max_items: 2,
            ..Default::default()
        };
        assert!(matches!(oracle_mine(&fdb, 0.0, &cfg), Err(FuimError::ResourceLimit(_))));
    }
}
