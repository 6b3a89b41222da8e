//! Global processing order over base items.

use std::cmp::Ordering;

use crate::database::ItemId;
use crate::error::{FuimError, Result};
use crate::fuzzy::{FuzzyDatabase, FuzzyItem, FuzzyItemset};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OrderDirection {
    /// Smallest fuub first.
    #[default]
    Ascending,
    /// Exact reverse of the ascending order at the base-item level.
    Descending,
}

/// Rank of every base item. Fuzzy items order by `(rank, region)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ItemOrder {
    items: Vec<ItemId>,
    rank: Vec<u32>,
}

impl ItemOrder {
    /// Items sorted by `(fuub, id)`, then reversed for [`OrderDirection::Descending`].
    pub fn compute(fdb: &FuzzyDatabase<'_>, direction: OrderDirection) -> Self {
        let fuub = fdb.item_fuubs();
        Self::from_fuubs(&fuub, direction)
    }

    pub fn ascending(fdb: &FuzzyDatabase<'_>) -> Self {
        Self::compute(fdb, OrderDirection::Ascending)
    }

    pub(crate) fn from_fuubs(fuub: &[f64], direction: OrderDirection) -> Self {
        let mut items: Vec<ItemId> = (0..fuub.len() as u32).map(ItemId).collect();
        items.sort_by(|a, b| fuub[a.index()].total_cmp(&fuub[b.index()]).then(a.cmp(b)));
        if direction == OrderDirection::Descending {
            items.reverse();
        }
        Self::from_sequence_unchecked(items)
    }

    /// An explicit order; `items` must be a permutation of `0..len`.
    pub fn from_sequence(items: Vec<ItemId>) -> Result<Self> {
        let mut seen = vec![false; items.len()];
        for item in &items {
            match seen.get_mut(item.index()) {
                Some(s) if !*s => *s = true,
                _ => {
                    return Err(FuimError::Validation(format!(
                        "order is not a permutation of the item ids (offending {item})"
                    )))
                }
            }
        }
        Ok(Self::from_sequence_unchecked(items))
    }

    fn from_sequence_unchecked(items: Vec<ItemId>) -> Self {
        let mut rank = vec![0; items.len()];
        for (r, item) in items.iter().enumerate() {
            rank[item.index()] = r as u32;
        }
        ItemOrder { items, rank }
    }

    /// Base items from first to last.
    pub fn items(&self) -> &[ItemId] {
        &self.items
    }

    #[inline]
    pub fn rank(&self, item: ItemId) -> u32 {
        self.rank[item.index()]
    }

    pub fn cmp_fuzzy(&self, a: FuzzyItem, b: FuzzyItem) -> Ordering {
        self.rank(a.item).cmp(&self.rank(b.item)).then(a.region.cmp(&b.region))
    }

    /// Lexicographic comparison of two itemsets whose members are in this order.
    pub fn cmp_itemsets(&self, a: &FuzzyItemset, b: &FuzzyItemset) -> Ordering {
        for (x, y) in a.members().iter().zip(b.members()) {
            match self.cmp_fuzzy(*x, *y) {
                Ordering::Equal => continue,
                other => return other,
            }
        }
        a.len().cmp(&b.len())
    }

    /// `itemset` with its members rearranged into this order.
    pub fn arrange(&self, itemset: &FuzzyItemset) -> FuzzyItemset {
        let mut members = itemset.members().to_vec();
        members.sort_by(|a, b| self.cmp_fuzzy(*a, *b));
        FuzzyItemset::new(members).expect("rearranging keeps base items distinct")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ties_break_by_item_id() {
        let order = ItemOrder::from_fuubs(&[5.0, 3.0, 5.0, 1.0], OrderDirection::Ascending);
        assert_eq!(order.items(), &[ItemId(3), ItemId(1), ItemId(0), ItemId(2)]);
        assert_eq!(order.rank(ItemId(0)), 2);
    }

    #[test]
    fn descending_reverses_ascending() {
        let fuub = [2.0, 7.0, 7.0, 0.5, 3.0];
        let asc = ItemOrder::from_fuubs(&fuub, OrderDirection::Ascending);
        let desc = ItemOrder::from_fuubs(&fuub, OrderDirection::Descending);
        let mut rev = asc.items().to_vec();
        rev.reverse();
        assert_eq!(desc.items(), rev.as_slice());
    }

    #[test]
    fn regions_order_within_an_item() {
        let order = ItemOrder::from_sequence(vec![ItemId(1), ItemId(0)]).unwrap();
        let a = FuzzyItem::new(ItemId(1), 2);
        let b = FuzzyItem::new(ItemId(0), 0);
        assert_eq!(order.cmp_fuzzy(a, b), Ordering::Less);
        assert_eq!(
            order.cmp_fuzzy(FuzzyItem::new(ItemId(0), 0), FuzzyItem::new(ItemId(0), 1)),
            Ordering::Less
        );
        assert!(ItemOrder::from_sequence(vec![ItemId(0), ItemId(0)]).is_err());
        assert!(ItemOrder::from_sequence(vec![ItemId(2)]).is_err());
    }
}
