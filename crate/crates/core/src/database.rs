//! Quantitative transaction databases and their text formats.
//!
//! Transactions file, one transaction per line:
//!
//! ```text
//! tid:item=qty,item=qty,...
//! ```
//!
//! External-utility file, one `item value` pair per line. In both files blank
//! lines and lines starting with `#` are ignored.

use std::collections::HashMap;
use std::fmt::{self, Write as _};
use std::path::Path;

use crate::error::{FuimError, Result};

/// Dense item identifier, `0..item_count()` in first-appearance order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ItemId(pub u32);

impl ItemId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for ItemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantitativeTransaction {
    pub tid: u64,
    /// `(item, quantity)` pairs sorted by item id, quantities >= 1.
    pub entries: Vec<(ItemId, u32)>,
}

impl QuantitativeTransaction {
    pub fn quantity(&self, item: ItemId) -> Option<u32> {
        self.entries
            .binary_search_by_key(&item, |&(i, _)| i)
            .ok()
            .map(|pos| self.entries[pos].1)
    }

    pub fn contains(&self, item: ItemId) -> bool {
        self.quantity(item).is_some()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Raw transaction as read from text: tid plus labelled quantities.
pub type RawTransaction = (u64, Vec<(String, i64)>);

#[derive(Debug, Clone, PartialEq)]
pub struct QuantitativeDatabase {
    labels: Vec<String>,
    index: HashMap<String, ItemId>,
    utilities: Vec<f64>,
    transactions: Vec<QuantitativeTransaction>,
}

impl QuantitativeDatabase {
    /// Builds a database from labelled transactions and an external-utility table.
    ///
    /// Item ids are assigned in first-appearance order over the transactions;
    /// items that only appear in the utility table are numbered afterwards in
    /// table order.
    pub fn new(transactions: Vec<RawTransaction>, utilities: Vec<(String, f64)>) -> Result<Self> {
        let mut table: HashMap<String, f64> = HashMap::with_capacity(utilities.len());
        for (label, value) in &utilities {
            validate_label(label)?;
            if !(value.is_finite() && *value > 0.0) {
                return Err(FuimError::Validation(format!(
                    "external utility of item {label:?} must be positive, got {value}"
                )));
            }
            if table.insert(label.clone(), *value).is_some() {
                return Err(FuimError::Validation(format!(
                    "item {label:?} has more than one external utility"
                )));
            }
        }

        let mut labels = Vec::new();
        let mut index = HashMap::new();
        let mut out = Vec::with_capacity(transactions.len());
        let mut last_tid: Option<u64> = None;
        for (tid, raw_entries) in transactions {
            if let Some(prev) = last_tid {
                if tid <= prev {
                    return Err(FuimError::Validation(format!(
                        "transaction ids must be strictly increasing: {tid} follows {prev}"
                    )));
                }
            }
            last_tid = Some(tid);

            let mut entries = Vec::with_capacity(raw_entries.len());
            for (label, qty) in raw_entries {
                if qty <= 0 {
                    return Err(FuimError::Validation(format!(
                        "transaction {tid}: quantity of {label:?} must be positive, got {qty}"
                    )));
                }
                let qty = u32::try_from(qty)
                    .map_err(|_| FuimError::Validation(format!("transaction {tid}: quantity {qty} too large")))?;
                if !table.contains_key(&label) {
                    return Err(FuimError::Validation(format!(
                        "transaction {tid}: item {label:?} has no external utility"
                    )));
                }
                let id = *index.entry(label.clone()).or_insert_with(|| {
                    labels.push(label.clone());
                    ItemId(labels.len() as u32 - 1)
                });
                entries.push((id, qty));
            }
            entries.sort_unstable_by_key(|&(id, _)| id);
            if entries.windows(2).any(|w| w[0].0 == w[1].0) {
                return Err(FuimError::Validation(format!(
                    "transaction {tid}: an item appears more than once"
                )));
            }
            out.push(QuantitativeTransaction { tid, entries });
        }

        for (label, _) in &utilities {
            if !index.contains_key(label) {
                index.insert(label.clone(), ItemId(labels.len() as u32));
                labels.push(label.clone());
            }
        }
        let utilities = labels.iter().map(|l| table[l]).collect();

        Ok(QuantitativeDatabase {
            labels,
            index,
            utilities,
            transactions: out,
        })
    }

    /// Parses the transactions and utilities text formats.
    pub fn parse(transactions: &str, utilities: &str) -> Result<Self> {
        let tx = parse_transactions(transactions, "transactions")?;
        let eu = parse_utilities(utilities, "utilities")?;
        Self::new(tx, eu)
    }

    pub fn load(transactions: &Path, utilities: &Path) -> Result<Self> {
        let tx_text = read_input(transactions)?;
        let eu_text = read_input(utilities)?;
        let tx = parse_transactions(&tx_text, &transactions.display().to_string())?;
        let eu = parse_utilities(&eu_text, &utilities.display().to_string())?;
        Self::new(tx, eu)
    }

    pub fn item_count(&self) -> usize {
        self.labels.len()
    }

    pub fn items(&self) -> impl Iterator<Item = ItemId> + '_ {
        (0..self.labels.len() as u32).map(ItemId)
    }

    pub fn label(&self, item: ItemId) -> &str {
        &self.labels[item.index()]
    }

    pub fn item_by_label(&self, label: &str) -> Option<ItemId> {
        self.index.get(label).copied()
    }

    pub fn external_utility(&self, item: ItemId) -> f64 {
        self.utilities[item.index()]
    }

    pub fn transactions(&self) -> &[QuantitativeTransaction] {
        &self.transactions
    }

    pub fn len(&self) -> usize {
        self.transactions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transactions.is_empty()
    }

    /// Crisp utility `q(x, T) * eu(x)`.
    #[inline]
    pub fn crisp_utility(&self, item: ItemId, quantity: u32) -> f64 {
        f64::from(quantity) * self.utilities[item.index()]
    }

    pub fn transaction_utility(&self, tx: &QuantitativeTransaction) -> f64 {
        tx.entries.iter().map(|&(item, q)| self.crisp_utility(item, q)).sum()
    }

    /// Sum of `q * eu` over every item occurrence in the database.
    pub fn total_utility(&self) -> f64 {
        self.transactions.iter().map(|tx| self.transaction_utility(tx)).sum()
    }

    /// The first `count` transactions with the same item table.
    pub fn prefix(&self, count: usize) -> QuantitativeDatabase {
        QuantitativeDatabase {
            labels: self.labels.clone(),
            index: self.index.clone(),
            utilities: self.utilities.clone(),
            transactions: self.transactions[..count.min(self.len())].to_vec(),
        }
    }

    pub fn to_transactions_text(&self) -> String {
        let mut out = String::new();
        for tx in &self.transactions {
            write!(out, "{}:", tx.tid).unwrap();
            for (i, &(item, q)) in tx.entries.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write!(out, "{}={}", self.label(item), q).unwrap();
            }
            out.push('\n');
        }
        out
    }

    pub fn to_utilities_text(&self) -> String {
        let mut out = String::new();
        for item in self.items() {
            writeln!(out, "{} {}", self.label(item), self.external_utility(item)).unwrap();
        }
        out
    }
}

pub(crate) fn read_input(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| FuimError::Parse {
        source_name: path.display().to_string(),
        line: 0,
        message: format!("cannot read file: {e}"),
    })
}

fn validate_label(label: &str) -> Result<()> {
    if label.is_empty()
        || label
            .chars()
            .any(|c| c.is_whitespace() || matches!(c, ',' | '=' | ':' | '#'))
    {
        return Err(FuimError::Validation(format!("invalid item label {label:?}")));
    }
    Ok(())
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

pub fn parse_transactions(text: &str, source_name: &str) -> Result<Vec<RawTransaction>> {
    let mut out = Vec::new();
    for (line_no, line) in content_lines(text) {
        let (tid, rest) = line
            .split_once(':')
            .ok_or_else(|| FuimError::parse(source_name, line_no, "expected `tid:item=qty,...`"))?;
        let tid: u64 = tid
            .trim()
            .parse()
            .map_err(|_| FuimError::parse(source_name, line_no, format!("bad tid {tid:?}")))?;
        let mut entries = Vec::new();
        let rest = rest.trim();
        if !rest.is_empty() {
            for pair in rest.split(',') {
                let (label, qty) = pair.split_once('=').ok_or_else(|| {
                    FuimError::parse(source_name, line_no, format!("expected `item=qty`, got {pair:?}"))
                })?;
                let label = label.trim();
                if label.is_empty() {
                    return Err(FuimError::parse(source_name, line_no, "empty item label"));
                }
                let qty: i64 = qty
                    .trim()
                    .parse()
                    .map_err(|_| FuimError::parse(source_name, line_no, format!("bad quantity {qty:?}")))?;
                entries.push((label.to_string(), qty));
            }
        }
        out.push((tid, entries));
    }
    Ok(out)
}

pub fn parse_utilities(text: &str, source_name: &str) -> Result<Vec<(String, f64)>> {
    let mut out = Vec::new();
    for (line_no, line) in content_lines(text) {
        let mut parts = line.split_whitespace();
        let (Some(label), Some(value), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(FuimError::parse(source_name, line_no, "expected `item value`"));
        };
        let value: f64 = value
            .parse()
            .map_err(|_| FuimError::parse(source_name, line_no, format!("bad utility {value:?}")))?;
        out.push((label.to_string(), value));
    }
    Ok(out)
}

/// Minimum fuzzy utility threshold, absolute or as a fraction of the
/// database's total crisp utility.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Threshold {
    Absolute(f64),
    Rate(f64),
}

impl Threshold {
    pub fn resolve(self, db: &QuantitativeDatabase) -> Result<f64> {
        match self {
            Threshold::Absolute(g) if g.is_finite() && g >= 0.0 => Ok(g),
            Threshold::Absolute(g) => Err(FuimError::Validation(format!(
                "absolute threshold must be a finite non-negative number, got {g}"
            ))),
            Threshold::Rate(r) if (0.0..=1.0).contains(&r) => Ok(r * db.total_utility()),
            Threshold::Rate(r) => Err(FuimError::Validation(format!(
                "threshold rate must lie in [0, 1], got {r}"
            ))),
        }
    }
}

impl fmt::Display for Threshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Threshold::Absolute(g) => write!(f, "gamma={g}"),
            Threshold::Rate(r) => write!(f, "gamma-rate={r}"),
        }
    }
}

/// Quantities and utilities of the ten-transaction worked example over items A-E.
pub const SAMPLE_TRANSACTIONS: &str = include_str!("../data/sample.qdb");
pub const SAMPLE_UTILITIES: &str = include_str!("../data/sample.eu");

pub fn sample_database() -> QuantitativeDatabase {
    QuantitativeDatabase::parse(SAMPLE_TRANSACTIONS, SAMPLE_UTILITIES).expect("bundled sample database is valid")
}
