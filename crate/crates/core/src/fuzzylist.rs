//! Fuzzy-lists: per-itemset rows of `(tid, membership, crisp, rfu)`.
//!
//! A row stores the itemset's minimum membership and its summed crisp utility
//! separately instead of their product. The min operator makes fuzzy utility
//! non-additive across joins, so keeping both factors lets a join combine them
//! exactly: memberships by `min`, crisp utilities by inclusion-exclusion over
//! the common prefix. The internal fuzzy utility `ifu` is derived on read.

use std::fmt::Write as _;

use crate::error::{FuimError, Result};
use crate::fuzzy::{FuzzyDatabase, FuzzyEntry, FuzzyItem, FuzzyItemset};
use crate::order::ItemOrder;
use crate::result::below_threshold;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Element {
    /// Transaction index (position in the database, not the file tid).
    pub tx: u32,
    pub membership: f64,
    pub crisp: f64,
    /// Sum of mfu over the items after the itemset in the revised transaction.
    pub rfu: f64,
}

impl Element {
    #[inline]
    pub fn ifu(&self) -> f64 {
        self.membership * self.crisp
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FuzzyList {
    itemset: FuzzyItemset,
    elements: Vec<Element>,
    sum_ifu: f64,
    sum_rfu: f64,
}

impl FuzzyList {
    pub fn new(itemset: FuzzyItemset, elements: Vec<Element>) -> Self {
        debug_assert!(elements.windows(2).all(|w| w[0].tx < w[1].tx));
        let (sum_ifu, sum_rfu) = elements.iter().fold((0.0, 0.0), |(i, r), e| (i + e.ifu(), r + e.rfu));
        FuzzyList {
            itemset,
            elements,
            sum_ifu,
            sum_rfu,
        }
    }

    pub fn itemset(&self) -> &FuzzyItemset {
        &self.itemset
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn sum_ifu(&self) -> f64 {
        self.sum_ifu
    }

    pub fn sum_rfu(&self) -> f64 {
        self.sum_rfu
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn last(&self) -> FuzzyItem {
        self.itemset
            .last()
            .expect("fuzzy-lists are never built for the empty itemset")
    }

    fn find(&self, tx: u32) -> Option<&Element> {
        self.elements
            .binary_search_by_key(&tx, |e| e.tx)
            .ok()
            .map(|p| &self.elements[p])
    }

    /// Text table with one row per element, for diffing against hand-built lists.
    pub fn dump(&self, fdb: &FuzzyDatabase<'_>) -> String {
        let mut out = String::new();
        writeln!(out, "# {}", self.itemset.render(fdb)).unwrap();
        writeln!(out, "tid\tmembership\tcrisp\tifu\trfu").unwrap();
        for e in &self.elements {
            writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}",
                fdb.tid(e.tx as usize),
                e.membership,
                e.crisp,
                e.ifu(),
                e.rfu
            )
            .unwrap();
        }
        writeln!(out, "sumIfu\t{}\nsumRfu\t{}", self.sum_ifu, self.sum_rfu).unwrap();
        out
    }
}

/// Builds the fuzzy-lists of every fuzzy 1-item whose base item is `promising`.
///
/// Transactions are revised to the promising items sorted by `order`; the rfu
/// of an occurrence is the mfu sum of the promising items ranked after it.
/// Lists come back in `order`, empty ones omitted.
pub fn build_initial_lists(fdb: &FuzzyDatabase<'_>, order: &ItemOrder, promising: &[bool]) -> Vec<FuzzyList> {
    let regions = fdb.region_count();
    let slot = |item: crate::database::ItemId, region: u16| item.index() * regions + usize::from(region);
    let mut rows: Vec<Vec<Element>> = vec![Vec::new(); promising.len() * regions];
    let mut revised: Vec<&FuzzyEntry> = Vec::new();
    for tx in 0..fdb.len() {
        revised.clear();
        revised.extend(fdb.transaction(tx).iter().filter(|e| promising[e.item.index()]));
        revised.sort_unstable_by_key(|e| order.rank(e.item));
        let mut remaining: f64 = 0.0;
        // walk backwards so `remaining` holds the mfu sum of later items
        for e in revised.iter().rev() {
            for &(region, mu) in fdb.regions_of(e) {
                rows[slot(e.item, region)].push(Element {
                    tx: tx as u32,
                    membership: mu,
                    crisp: e.crisp,
                    rfu: remaining,
                });
            }
            remaining += e.mfu;
        }
    }

    let mut lists = Vec::new();
    for &item in order.items() {
        if !promising[item.index()] {
            continue;
        }
        for region in 0..regions as u16 {
            let elements = std::mem::take(&mut rows[slot(item, region)]);
            if !elements.is_empty() {
                lists.push(FuzzyList::new(
                    FuzzyItemset::singleton(FuzzyItem::new(item, region)),
                    elements,
                ));
            }
        }
    }
    lists
}

fn check_prefix(prefix: Option<&FuzzyList>, px: &FuzzyList, py: &FuzzyList) -> Result<()> {
    let p = prefix.map_or(&[][..], |l| l.itemset.members());
    let x = px.itemset.members();
    let y = py.itemset.members();
    if x.len() != p.len() + 1 || y.len() != p.len() + 1 || &x[..p.len()] != p || &y[..p.len()] != p {
        return Err(FuimError::Contract(format!(
            "join operands do not share the prefix of length {}",
            p.len()
        )));
    }
    if px.last().item == py.last().item {
        return Err(FuimError::Contract(
            "join operands extend the prefix with the same base item".into(),
        ));
    }
    Ok(())
}

/// Outcome of a join that may be abandoned by the expended-utility check.
#[derive(Debug, Clone, PartialEq)]
pub enum JoinOutcome {
    Built(FuzzyList),
    Pruned,
}

/// Joins `Px` and `Py` (sharing prefix `P`) into `Pxy`.
///
/// `Py`'s extension item must rank after `Px`'s; the rfu of each result row is
/// taken from `Py`.
pub fn join(prefix: Option<&FuzzyList>, px: &FuzzyList, py: &FuzzyList) -> Result<FuzzyList> {
    check_prefix(prefix, px, py)?;
    match join_unchecked(prefix, px, py, None) {
        JoinOutcome::Built(l) => Ok(l),
        JoinOutcome::Pruned => unreachable!("no bound supplied"),
    }
}

/// Join with an optional expended-utility bound.
///
/// With `Some(gamma)` the join is abandoned as soon as the `ifu + rfu` mass
/// of `Px` over transactions still able to contain `Py` drops below `gamma`.
pub fn join_bounded(
    prefix: Option<&FuzzyList>,
    px: &FuzzyList,
    py: &FuzzyList,
    gamma: Option<f64>,
) -> Result<JoinOutcome> {
    check_prefix(prefix, px, py)?;
    Ok(join_unchecked(prefix, px, py, gamma))
}

pub(crate) fn join_unchecked(
    prefix: Option<&FuzzyList>,
    px: &FuzzyList,
    py: &FuzzyList,
    gamma: Option<f64>,
) -> JoinOutcome {
    let mut budget = px.sum_ifu + px.sum_rfu;
    if gamma.is_some_and(|g| below_threshold(budget, g)) {
        return JoinOutcome::Pruned;
    }
    let mut out = Vec::with_capacity(px.len().min(py.len()));
    let ys = &py.elements;
    let mut j = 0;
    for ex in &px.elements {
        while j < ys.len() && ys[j].tx < ex.tx {
            j += 1;
        }
        if j < ys.len() && ys[j].tx == ex.tx {
            let ey = &ys[j];
            let shared = match prefix {
                Some(p) => {
                    p.find(ex.tx)
                        .expect("prefix list covers every row of its extensions")
                        .crisp
                }
                None => 0.0,
            };
            out.push(Element {
                tx: ex.tx,
                membership: ex.membership.min(ey.membership),
                crisp: ex.crisp + ey.crisp - shared,
                rfu: ey.rfu,
            });
            j += 1;
        } else if let Some(g) = gamma {
            budget -= ex.ifu() + ex.rfu;
            if below_threshold(budget, g) {
                return JoinOutcome::Pruned;
            }
        }
    }
    JoinOutcome::Built(FuzzyList::new(px.itemset.extended(py.last()), out))
}

/// Expended fuzzy utility check between sibling lists `X` and `Y`.
///
/// True when the `ifu + rfu` mass of `X` over transactions that also appear in
/// `Y` is below `gamma` (see [`crate::result::below_threshold`]), in which case no extension of `XY` can reach `gamma`.
pub fn expended_check(list_x: &FuzzyList, list_y: &FuzzyList, gamma: f64) -> bool {
    let mut remaining = list_x.sum_ifu + list_x.sum_rfu;
    for e in list_x.elements.iter().filter(|e| list_y.find(e.tx).is_none()) {
        remaining -= e.ifu() + e.rfu;
    }
    below_threshold(remaining, gamma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::database::{sample_database, ItemId};
    use crate::fuzzy::MembershipFunction;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
    }

    fn singleton_list(item: u32, region: u16, rows: &[(u32, f64, f64, f64)]) -> FuzzyList {
        FuzzyList::new(
            FuzzyItemset::singleton(FuzzyItem::new(ItemId(item), region)),
            rows.iter()
                .map(|&(tx, membership, crisp, rfu)| Element {
                    tx,
                    membership,
                    crisp,
                    rfu,
                })
                .collect(),
        )
    }

    #[test]
    fn disjoint_join_is_empty() {
        let a = singleton_list(0, 0, &[(0, 0.5, 10.0, 4.0), (2, 1.0, 3.0, 1.0)]);
        let b = singleton_list(1, 0, &[(1, 0.5, 4.0, 0.0), (3, 1.0, 5.0, 0.0)]);
        let ab = join(None, &a, &b).unwrap();
        assert!(ab.is_empty());
        assert_eq!(ab.sum_ifu(), 0.0);
        assert_eq!(ab.sum_rfu(), 0.0);
        assert_eq!(ab.itemset().len(), 2);
    }

    #[test]
    fn join_takes_min_membership_and_later_rfu() {
        let a = singleton_list(0, 0, &[(0, 0.5, 10.0, 9.0), (1, 0.9, 2.0, 5.0)]);
        let b = singleton_list(1, 2, &[(1, 0.3, 4.0, 1.0)]);
        let ab = join(None, &a, &b).unwrap();
        assert_eq!(
            ab.elements(),
            &[Element {
                tx: 1,
                membership: 0.3,
                crisp: 6.0,
                rfu: 1.0
            }]
        );
        assert!(close(ab.sum_ifu(), 1.8));
    }

    #[test]
    fn prefix_mismatch_is_a_contract_error() {
        let a = singleton_list(0, 0, &[(0, 0.5, 10.0, 9.0)]);
        let b = singleton_list(1, 0, &[(0, 0.5, 10.0, 9.0)]);
        let c = singleton_list(2, 0, &[(0, 0.5, 10.0, 9.0)]);
        let ab = join(None, &a, &b).unwrap();
        // `ab` and `c` do not share a prefix of length 1
        assert!(matches!(join(Some(&a), &ab, &c), Err(FuimError::Contract(_))));
        let a_mid = singleton_list(0, 1, &[(0, 0.5, 10.0, 9.0)]);
        assert!(matches!(join(None, &a, &a_mid), Err(FuimError::Contract(_))));
    }

    #[test]
    fn three_level_join_matches_direct_computation() {
        let db = sample_database();
        let fdb = FuzzyDatabase::new(&db, &MembershipFunction::bundled());
        let order = ItemOrder::ascending(&fdb);
        let lists = build_initial_lists(&fdb, &order, &vec![true; db.item_count()]);
        let mut checked = 0;
        for (i, x) in lists.iter().enumerate() {
            for (k, y) in lists.iter().enumerate().skip(i + 1) {
                if x.last().item == y.last().item {
                    continue;
                }
                let xy = join(None, x, y).unwrap();
                assert!(close(xy.sum_ifu(), fdb.total_fuzzy_utility(xy.itemset())));
                for z in lists.iter().skip(k + 1) {
                    if z.last().item == x.last().item || z.last().item == y.last().item {
                        continue;
                    }
                    let xz = join(None, x, z).unwrap();
                    let xyz = join(Some(x), &xy, &xz).unwrap();
                    assert!(close(xyz.sum_ifu(), fdb.total_fuzzy_utility(xyz.itemset())));
                    assert!(xyz.len() <= xy.len().min(xz.len()));
                    checked += 1;
                }
            }
        }
        assert!(checked > 0);
    }

    #[test]
    fn expended_check_edge_cases() {
        let x = singleton_list(0, 0, &[(0, 1.0, 10.0, 5.0), (1, 1.0, 10.0, 5.0)]);
        let covering = singleton_list(1, 0, &[(0, 1.0, 1.0, 0.0), (1, 1.0, 1.0, 0.0)]);
        let disjoint = singleton_list(1, 0, &[(5, 1.0, 1.0, 0.0)]);
        // covering: reduces to sumIfu + sumRfu < gamma
        assert!(!expended_check(&x, &covering, 30.0));
        assert!(expended_check(&x, &covering, 30.5));
        // disjoint: reduces to 0 < gamma, up to the prune slack
        assert!(expended_check(&x, &disjoint, 0.01));
        assert!(!expended_check(&x, &disjoint, 1e-12));
        assert!(!expended_check(&x, &disjoint, 0.0));
        assert_eq!(
            join_bounded(None, &x, &disjoint, Some(1.0)).unwrap(),
            JoinOutcome::Pruned
        );
    }

    #[test]
    fn bounded_join_agrees_with_expended_check() {
        let db = sample_database();
        let fdb = FuzzyDatabase::new(&db, &MembershipFunction::bundled());
        let order = ItemOrder::ascending(&fdb);
        let lists = build_initial_lists(&fdb, &order, &vec![true; db.item_count()]);
        for gamma in [0.0, 10.0, 30.0, 60.0, 100.0] {
            for (i, x) in lists.iter().enumerate() {
                for y in lists.iter().skip(i + 1).filter(|y| y.last().item != x.last().item) {
                    let pruned = matches!(join_bounded(None, x, y, Some(gamma)).unwrap(), JoinOutcome::Pruned);
                    assert_eq!(pruned, expended_check(x, y, gamma));
                }
            }
        }
    }

    #[test]
    fn dump_lists_rows() {
        let db = sample_database();
        let fdb = FuzzyDatabase::new(&db, &MembershipFunction::bundled());
        let order = ItemOrder::ascending(&fdb);
        let lists = build_initial_lists(&fdb, &order, &vec![true; db.item_count()]);
        let text = lists[0].dump(&fdb);
        assert_eq!(text.lines().count(), lists[0].len() + 4);
        assert!(text.starts_with("# "));
    }
}
