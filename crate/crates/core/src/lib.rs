//! Fuzzy utility itemset mining.
//!
//! Quantities in a transaction database are mapped through a membership
//! function onto linguistic regions (Low, Middle, High, ...). The fuzzy utility
//! of an itemset in a transaction is the smallest member membership times the
//! itemset's crisp utility; an itemset is a high fuzzy utility itemset (HFUI)
//! when its total over the database reaches a threshold.
//!
//! [`miner::mine`] finds every HFUI with a depth-first fuzzy-list search. The
//! [`baseline`] module holds a level-wise two-phase miner and an exhaustive
//! oracle used to check it.

pub mod baseline;
pub mod bench;
pub mod database;
pub mod error;
pub mod fuzzy;
pub mod fuzzylist;
pub mod generate;
pub mod miner;
pub mod order;
pub mod report;
pub mod result;
pub mod spmf;

pub use database::{ItemId, QuantitativeDatabase, QuantitativeTransaction, Threshold};
pub use error::{FuimError, Result};
pub use fuzzy::{FuzzyDatabase, FuzzyItem, FuzzyItemset, MembershipFunction, RegionIndex};
pub use fuzzylist::{FuzzyList, JoinOutcome};
pub use miner::{mine, MinerConfig, Variant};
pub use order::{ItemOrder, OrderDirection};
pub use result::{Hfui, MiningResult, RunStats};
