//! Membership functions and the fuzzy-utility quantities derived from them.
//!
//! A [`FuzzyDatabase`] is a quantitative database with every item occurrence
//! fuzzified once up front. Everything downstream (the miner, the two-phase
//! baseline, the oracle) reads memberships from it rather than re-evaluating
//! the membership function.

use std::fmt::{self, Write as _};
use std::path::Path;

use crate::database::{read_input, ItemId, QuantitativeDatabase};
use crate::error::{FuimError, Result};

/// Position of a region in the governing membership function.
pub type RegionIndex = u16;

/// One linguistic region: a piecewise-linear map from quantity to `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    pub name: String,
    /// `(quantity, membership)` with strictly increasing quantities.
    pub breakpoints: Vec<(f64, f64)>,
}

impl Region {
    /// Linear interpolation between breakpoints, clamped outside them.
    pub fn evaluate(&self, q: f64) -> f64 {
        let pts = &self.breakpoints;
        let (first, last) = (pts[0], pts[pts.len() - 1]);
        if q <= first.0 {
            return first.1;
        }
        if q >= last.0 {
            return last.1;
        }
        let upper = pts.partition_point(|&(x, _)| x <= q);
        let (x0, y0) = pts[upper - 1];
        let (x1, y1) = pts[upper];
        if q == x0 {
            return y0;
        }
        y0 + (y1 - y0) * (q - x0) / (x1 - x0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MembershipFunction {
    regions: Vec<Region>,
}

impl MembershipFunction {
    pub fn new(regions: Vec<Region>) -> Result<Self> {
        if regions.is_empty() {
            return Err(FuimError::Validation(
                "membership function needs at least one region".into(),
            ));
        }
        if regions.len() > usize::from(RegionIndex::MAX) {
            return Err(FuimError::Validation("too many regions".into()));
        }
        for (i, r) in regions.iter().enumerate() {
            if r.name.is_empty() || r.name.contains(|c: char| c.is_whitespace() || c == ',' || c == '.') {
                return Err(FuimError::Validation(format!("invalid region name {:?}", r.name)));
            }
            if regions[..i].iter().any(|o| o.name == r.name) {
                return Err(FuimError::Validation(format!("duplicate region name {:?}", r.name)));
            }
            if r.breakpoints.is_empty() {
                return Err(FuimError::Validation(format!("region {} has no breakpoints", r.name)));
            }
            for &(q, mu) in &r.breakpoints {
                if !q.is_finite() || !(0.0..=1.0).contains(&mu) {
                    return Err(FuimError::Validation(format!(
                        "region {}: breakpoint ({q},{mu}) out of range",
                        r.name
                    )));
                }
            }
            if r.breakpoints.windows(2).any(|w| w[0].0 >= w[1].0) {
                return Err(FuimError::Validation(format!(
                    "region {}: breakpoint quantities must be strictly increasing",
                    r.name
                )));
            }
        }
        Ok(MembershipFunction { regions })
    }

    /// The bundled three-region function (Low, Middle, High) over quantities 1..6.
    pub fn bundled() -> Self {
        Self::parse(DEFAULT_MEMBERSHIP, "default.mf").expect("bundled membership function is valid")
    }

    /// Parses region lines of the form `name: (q,mu) (q,mu) ...`.
    pub fn parse(text: &str, source_name: &str) -> Result<Self> {
        let mut regions = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (name, rest) = line
                .split_once(':')
                .ok_or_else(|| FuimError::parse(source_name, line_no, "expected `name: (q,mu) ...`"))?;
            let mut breakpoints = Vec::new();
            let mut rest = rest.trim();
            while !rest.is_empty() {
                let body = rest
                    .strip_prefix('(')
                    .and_then(|r| r.split_once(')'))
                    .ok_or_else(|| FuimError::parse(source_name, line_no, format!("bad breakpoint near {rest:?}")))?;
                let (pair, tail) = body;
                let (q, mu) = pair
                    .split_once(',')
                    .ok_or_else(|| FuimError::parse(source_name, line_no, format!("bad breakpoint ({pair})")))?;
                let q: f64 = q
                    .trim()
                    .parse()
                    .map_err(|_| FuimError::parse(source_name, line_no, format!("bad quantity {q:?}")))?;
                let mu: f64 = mu
                    .trim()
                    .parse()
                    .map_err(|_| FuimError::parse(source_name, line_no, format!("bad membership {mu:?}")))?;
                breakpoints.push((q, mu));
                rest = tail.trim_start();
            }
            regions.push(Region {
                name: name.trim().to_string(),
                breakpoints,
            });
        }
        if regions.is_empty() {
            return Err(FuimError::parse(source_name, 0, "no regions defined"));
        }
        Self::new(regions)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = read_input(path)?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn regions(&self) -> &[Region] {
        &self.regions
    }

    pub fn region_names(&self) -> Vec<String> {
        self.regions.iter().map(|r| r.name.clone()).collect()
    }

    /// Strictly positive memberships of quantity `q`, in region order.
    ///
    /// A quantity of zero marks an absent item and yields no regions.
    pub fn fuzzify(&self, q: f64) -> Vec<(RegionIndex, f64)> {
        if q <= 0.0 {
            return Vec::new();
        }
        self.regions
            .iter()
            .enumerate()
            .filter_map(|(i, r)| {
                let mu = r.evaluate(q);
                (mu > 0.0).then_some((i as RegionIndex, mu))
            })
            .collect()
    }
}

impl fmt::Display for MembershipFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.regions {
            write!(f, "{}:", r.name)?;
            for (q, mu) in &r.breakpoints {
                write!(f, " ({q},{mu})")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

pub const DEFAULT_MEMBERSHIP: &str = include_str!("../data/default.mf");

/// A `(base item, region)` atom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FuzzyItem {
    pub item: ItemId,
    pub region: RegionIndex,
}

impl FuzzyItem {
    pub fn new(item: ItemId, region: RegionIndex) -> Self {
        FuzzyItem { item, region }
    }
}

/// Fuzzy items over pairwise distinct base items, kept in the order given.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct FuzzyItemset {
    members: Vec<FuzzyItem>,
}

impl FuzzyItemset {
    pub fn new(members: Vec<FuzzyItem>) -> Result<Self> {
        for (i, m) in members.iter().enumerate() {
            if members[..i].iter().any(|o| o.item == m.item) {
                return Err(FuimError::Validation(format!(
                    "fuzzy itemset uses base item {} twice",
                    m.item
                )));
            }
        }
        Ok(FuzzyItemset { members })
    }

    pub fn singleton(member: FuzzyItem) -> Self {
        FuzzyItemset { members: vec![member] }
    }

    /// Appends `member`; the caller guarantees its base item is new.
    pub(crate) fn extended(&self, member: FuzzyItem) -> Self {
        debug_assert!(!self.contains_item(member.item));
        let mut members = Vec::with_capacity(self.members.len() + 1);
        members.extend_from_slice(&self.members);
        members.push(member);
        FuzzyItemset { members }
    }

    pub fn members(&self) -> &[FuzzyItem] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn last(&self) -> Option<FuzzyItem> {
        self.members.last().copied()
    }

    pub fn contains_item(&self, item: ItemId) -> bool {
        self.members.iter().any(|m| m.item == item)
    }

    pub fn base_items(&self) -> Vec<ItemId> {
        self.members.iter().map(|m| m.item).collect()
    }

    /// Members sorted by `(item, region)`; equal sets compare equal.
    pub fn canonical(&self) -> FuzzyItemset {
        let mut members = self.members.clone();
        members.sort_unstable();
        FuzzyItemset { members }
    }

    /// `LABEL.Region` members joined by commas.
    pub fn render(&self, fdb: &FuzzyDatabase<'_>) -> String {
        let mut out = String::new();
        for (i, m) in self.members.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            write!(out, "{}.{}", fdb.database().label(m.item), fdb.region_name(m.region)).unwrap();
        }
        out
    }
}

/// One item occurrence of a fuzzified transaction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FuzzyEntry {
    pub item: ItemId,
    pub quantity: u32,
    /// `q * eu`.
    pub crisp: f64,
    /// Largest region fuzzy utility of this occurrence (mfu).
    pub mfu: f64,
    start: u32,
    end: u32,
}

/// A quantitative database with every occurrence fuzzified.
#[derive(Debug, Clone)]
pub struct FuzzyDatabase<'db> {
    db: &'db QuantitativeDatabase,
    region_names: Vec<String>,
    offsets: Vec<u32>,
    entries: Vec<FuzzyEntry>,
    memberships: Vec<(RegionIndex, f64)>,
    mtfu: Vec<f64>,
}

impl<'db> FuzzyDatabase<'db> {
    pub fn new(db: &'db QuantitativeDatabase, mf: &MembershipFunction) -> Self {
        Self::build(db, mf.region_names(), |_, _, q| Ok(mf.fuzzify(f64::from(q))))
            .expect("membership function output is always in range")
    }

    /// Builds the fuzzified view from explicitly supplied memberships.
    ///
    /// `memberships(tx_index, item, quantity)` returns `(region, value)` pairs;
    /// zero values are dropped and anything outside `[0, 1]` is rejected.
    pub fn with_memberships<F>(
        db: &'db QuantitativeDatabase,
        region_names: Vec<String>,
        mut memberships: F,
    ) -> Result<Self>
    where
        F: FnMut(usize, ItemId, u32) -> Vec<(RegionIndex, f64)>,
    {
        Self::build(db, region_names, |t, i, q| Ok(memberships(t, i, q)))
    }

    fn build<F>(db: &'db QuantitativeDatabase, region_names: Vec<String>, mut memberships: F) -> Result<Self>
    where
        F: FnMut(usize, ItemId, u32) -> Result<Vec<(RegionIndex, f64)>>,
    {
        let mut offsets = Vec::with_capacity(db.len() + 1);
        let mut entries = Vec::new();
        let mut arena = Vec::new();
        let mut mtfu = Vec::with_capacity(db.len());
        offsets.push(0);
        for (t, tx) in db.transactions().iter().enumerate() {
            let mut tx_mtfu = 0.0;
            for &(item, quantity) in &tx.entries {
                let mut regions = memberships(t, item, quantity)?;
                regions.retain(|&(_, mu)| mu != 0.0);
                regions.sort_by_key(|&(r, _)| r);
                for (k, &(r, mu)) in regions.iter().enumerate() {
                    if usize::from(r) >= region_names.len() {
                        return Err(FuimError::Validation(format!("region index {r} out of range")));
                    }
                    if !(mu > 0.0 && mu <= 1.0) {
                        return Err(FuimError::Validation(format!(
                            "membership {mu} of item {} in transaction {} outside (0, 1]",
                            db.label(item),
                            tx.tid
                        )));
                    }
                    if k > 0 && regions[k - 1].0 == r {
                        return Err(FuimError::Validation(format!("region {r} given twice")));
                    }
                }
                let crisp = db.crisp_utility(item, quantity);
                let max_mu = regions.iter().map(|&(_, mu)| mu).fold(0.0, f64::max);
                let start = arena.len() as u32;
                arena.extend_from_slice(&regions);
                let entry = FuzzyEntry {
                    item,
                    quantity,
                    crisp,
                    mfu: max_mu * crisp,
                    start,
                    end: arena.len() as u32,
                };
                tx_mtfu += entry.mfu;
                entries.push(entry);
            }
            offsets.push(entries.len() as u32);
            mtfu.push(tx_mtfu);
        }
        Ok(FuzzyDatabase {
            db,
            region_names,
            offsets,
            entries,
            memberships: arena,
            mtfu,
        })
    }

    pub fn database(&self) -> &'db QuantitativeDatabase {
        self.db
    }

    pub fn region_count(&self) -> usize {
        self.region_names.len()
    }

    pub fn region_name(&self, region: RegionIndex) -> &str {
        &self.region_names[usize::from(region)]
    }

    pub fn region_by_name(&self, name: &str) -> Option<RegionIndex> {
        self.region_names
            .iter()
            .position(|n| n == name)
            .map(|p| p as RegionIndex)
    }

    pub fn len(&self) -> usize {
        self.mtfu.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mtfu.is_empty()
    }

    pub fn tid(&self, tx: usize) -> u64 {
        self.db.transactions()[tx].tid
    }

    /// Entries of transaction `tx`, sorted by item id.
    pub fn transaction(&self, tx: usize) -> &[FuzzyEntry] {
        &self.entries[self.offsets[tx] as usize..self.offsets[tx + 1] as usize]
    }

    pub fn entry(&self, tx: usize, item: ItemId) -> Option<&FuzzyEntry> {
        let entries = self.transaction(tx);
        entries
            .binary_search_by_key(&item, |e| e.item)
            .ok()
            .map(|p| &entries[p])
    }

    /// Positive memberships of one occurrence.
    pub fn regions_of(&self, entry: &FuzzyEntry) -> &[(RegionIndex, f64)] {
        &self.memberships[entry.start as usize..entry.end as usize]
    }

    pub fn membership(&self, entry: &FuzzyEntry, region: RegionIndex) -> f64 {
        self.regions_of(entry)
            .iter()
            .find(|&&(r, _)| r == region)
            .map_or(0.0, |&(_, mu)| mu)
    }

    fn require_entry(&self, item: ItemId, tx: usize) -> Result<&FuzzyEntry> {
        self.entry(tx, item).ok_or_else(|| {
            FuimError::Precondition(format!(
                "item {} does not occur in transaction {}",
                self.db.label(item),
                self.tid(tx)
            ))
        })
    }

    /// `f_ijl * q(x, T) * eu(x)`.
    pub fn region_fuzzy_utility(&self, item: ItemId, region: RegionIndex, tx: usize) -> Result<f64> {
        let entry = self.require_entry(item, tx)?;
        Ok(self.membership(entry, region) * entry.crisp)
    }

    /// Fuzzy utility of `itemset` in one transaction: the smallest member
    /// membership times the summed crisp utility. Zero when the itemset does
    /// not fuzzily occur in the transaction.
    pub fn itemset_fuzzy_utility_in_tx(&self, itemset: &FuzzyItemset, tx: usize) -> f64 {
        if itemset.is_empty() {
            return 0.0;
        }
        let mut min_mu = f64::INFINITY;
        let mut crisp = 0.0;
        for m in itemset.members() {
            let Some(entry) = self.entry(tx, m.item) else {
                return 0.0;
            };
            let mu = self.membership(entry, m.region);
            if mu == 0.0 {
                return 0.0;
            }
            min_mu = min_mu.min(mu);
            crisp += entry.crisp;
        }
        min_mu * crisp
    }

    /// Sum of the per-transaction fuzzy utilities of `itemset`.
    pub fn total_fuzzy_utility(&self, itemset: &FuzzyItemset) -> f64 {
        (0..self.len())
            .map(|tx| self.itemset_fuzzy_utility_in_tx(itemset, tx))
            .sum()
    }

    /// Number of transactions in which `itemset` fuzzily occurs.
    pub fn support(&self, itemset: &FuzzyItemset) -> usize {
        (0..self.len())
            .filter(|&tx| {
                itemset.members().iter().all(|m| {
                    self.entry(tx, m.item)
                        .is_some_and(|e| self.membership(e, m.region) > 0.0)
                })
            })
            .count()
    }

    /// Largest region fuzzy utility of `item` in `tx` (mfu).
    pub fn max_fuzzy_utility(&self, item: ItemId, tx: usize) -> Result<f64> {
        Ok(self.require_entry(item, tx)?.mfu)
    }

    /// Sum of mfu over the items of `tx` (mtfu).
    pub fn max_transaction_fuzzy_utility(&self, tx: usize) -> f64 {
        self.mtfu[tx]
    }

    /// Sum of mtfu over transactions containing every base item in `items`.
    pub fn fuub(&self, items: &[ItemId]) -> f64 {
        (0..self.len())
            .filter(|&tx| items.iter().all(|&i| self.entry(tx, i).is_some()))
            .map(|tx| self.mtfu[tx])
            .sum()
    }

    /// fuub of every single base item, indexed by item id.
    pub fn item_fuubs(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.db.item_count()];
        for tx in 0..self.len() {
            for e in self.transaction(tx) {
                out[e.item.index()] += self.mtfu[tx];
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::database::sample_database;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
    }

    #[test]
    fn bundled_function_at_integer_quantities() {
        let mf = MembershipFunction::bundled();
        let names = mf.region_names();
        assert_eq!(names, ["Low", "Middle", "High"]);
        // hand interpolation of the bundled breakpoints
        let expected: [(f64, [f64; 3]); 6] = [
            (1.0, [1.0, 0.0, 0.0]),
            (2.0, [0.8, 0.4, 0.0]),
            (3.0, [0.6, 0.8, 0.0]),
            (4.0, [0.4, 0.8, 0.2]),
            (5.0, [0.2, 0.4, 0.6]),
            (6.0, [0.0, 0.0, 1.0]),
        ];
        for (q, mus) in expected {
            for (r, want) in mus.iter().enumerate() {
                let got = mf.regions()[r].evaluate(q);
                assert!(close(got, *want), "q={q} region={r}: {got} vs {want}");
            }
            let fz = mf.fuzzify(q);
            let nonzero: Vec<_> = mus.iter().enumerate().filter(|(_, m)| **m > 0.0).collect();
            assert_eq!(fz.len(), nonzero.len());
        }
        assert!(mf.fuzzify(0.0).is_empty());
        // clamping past the last breakpoint
        assert_eq!(mf.fuzzify(9.0), vec![(2, 1.0)]);
    }

    #[test]
    fn parse_roundtrip_and_errors() {
        let mf = MembershipFunction::bundled();
        let again = MembershipFunction::parse(&mf.to_string(), "x").unwrap();
        assert_eq!(mf, again);
        assert!(matches!(
            MembershipFunction::parse("Low: (1,1) (1,0)\n", "x"),
            Err(FuimError::Validation(_))
        ));
        assert!(matches!(
            MembershipFunction::parse("Low: (1,1.5)\n", "x"),
            Err(FuimError::Validation(_))
        ));
        assert!(matches!(
            MembershipFunction::parse("Low (1,1)\n", "x"),
            Err(FuimError::Parse { line: 1, .. })
        ));
        assert!(matches!(
            MembershipFunction::parse("A: (1,1)\nA: (2,1)\n", "x"),
            Err(FuimError::Validation(_))
        ));
        assert!(MembershipFunction::parse("# nothing\n", "x").is_err());
    }

    #[test]
    fn region_utility_and_mfu_on_sample() {
        let db = sample_database();
        let fdb = FuzzyDatabase::new(&db, &MembershipFunction::bundled());
        let c = db.item_by_label("C").unwrap();
        // C in T5: q=8 clamps to the last breakpoints, only High survives
        assert_eq!(fdb.region_fuzzy_utility(c, 1, 4).unwrap(), 0.0);
        assert_eq!(fdb.region_fuzzy_utility(c, 2, 4).unwrap(), 24.0);
        assert_eq!(fdb.max_fuzzy_utility(c, 4).unwrap(), 24.0);
        // B in T1: q=2, eu=6 -> Low 0.8*12, Middle 0.4*12
        let b = db.item_by_label("B").unwrap();
        assert!(close(fdb.region_fuzzy_utility(b, 0, 0).unwrap(), 9.6));
        assert!(close(fdb.region_fuzzy_utility(b, 1, 0).unwrap(), 4.8));
        assert!(close(fdb.max_fuzzy_utility(b, 0).unwrap(), 9.6));
        // item absent from transaction
        let a = db.item_by_label("A").unwrap();
        assert!(matches!(
            fdb.region_fuzzy_utility(a, 0, 0),
            Err(FuimError::Precondition(_))
        ));
        assert!(fdb.max_fuzzy_utility(a, 0).is_err());
    }

    #[test]
    fn mtfu_is_sum_of_mfu() {
        let db = sample_database();
        let mf = MembershipFunction::bundled();
        let fdb = FuzzyDatabase::new(&db, &mf);
        for (t, tx) in db.transactions().iter().enumerate() {
            let mut expect = 0.0;
            for &(item, q) in &tx.entries {
                let crisp = db.crisp_utility(item, q);
                let best = mf
                    .regions()
                    .iter()
                    .map(|r| r.evaluate(f64::from(q)) * crisp)
                    .fold(0.0, f64::max);
                expect += best;
            }
            assert!(close(fdb.max_transaction_fuzzy_utility(t), expect));
        }
    }

    #[test]
    fn injected_memberships_validated() {
        let db = sample_database();
        let names = vec!["Low".to_string()];
        assert!(FuzzyDatabase::with_memberships(&db, names.clone(), |_, _, _| vec![(0, 1.2)]).is_err());
        assert!(FuzzyDatabase::with_memberships(&db, names.clone(), |_, _, _| vec![(3, 0.5)]).is_err());
        let fdb = FuzzyDatabase::with_memberships(&db, names, |_, _, _| vec![(0, 0.0)]).unwrap();
        assert_eq!(fdb.max_transaction_fuzzy_utility(0), 0.0);
    }

    #[test]
    fn itemset_rejects_repeated_base_item() {
        let a = ItemId(0);
        assert!(FuzzyItemset::new(vec![FuzzyItem::new(a, 0), FuzzyItem::new(a, 1)]).is_err());
    }

    #[test]
    fn singleton_equals_region_utility() {
        let db = sample_database();
        let fdb = FuzzyDatabase::new(&db, &MembershipFunction::bundled());
        for tx in 0..fdb.len() {
            for e in fdb.transaction(tx) {
                for &(r, _) in fdb.regions_of(e) {
                    let x = FuzzyItemset::singleton(FuzzyItem::new(e.item, r));
                    assert_eq!(
                        fdb.itemset_fuzzy_utility_in_tx(&x, tx),
                        fdb.region_fuzzy_utility(e.item, r, tx).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn fuub_zero_when_items_never_cooccur() {
        let db = QuantitativeDatabase::parse("1:a=1\n2:b=1\n", "a 1\nb 1\n").unwrap();
        let fdb = FuzzyDatabase::new(&db, &MembershipFunction::bundled());
        assert_eq!(fdb.fuub(&[ItemId(0), ItemId(1)]), 0.0);
        let ab = FuzzyItemset::new(vec![FuzzyItem::new(ItemId(0), 0), FuzzyItem::new(ItemId(1), 0)]).unwrap();
        assert_eq!(fdb.total_fuzzy_utility(&ab), 0.0);
    }
}
