//! Import of SPMF-style utility transaction files.
//!
//! SPMF lines look like `items:transaction_utility:item_utilities` and store
//! `q * eu` per item. Dividing by the external utility recovers the quantity;
//! anything that does not divide to a positive integer is rejected.

use std::collections::HashMap;

use crate::database::RawTransaction;
use crate::error::{FuimError, Result};

pub fn convert_spmf(text: &str, utilities: &[(String, f64)], source_name: &str) -> Result<Vec<RawTransaction>> {
    let table: HashMap<&str, f64> = utilities.iter().map(|(l, v)| (l.as_str(), *v)).collect();
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with(['#', '%', '@']) {
            continue;
        }
        let mut parts = line.split(':');
        let (Some(items), Some(_tu), Some(utils), None) = (parts.next(), parts.next(), parts.next(), parts.next())
        else {
            return Err(FuimError::parse(source_name, line_no, "expected `items:tu:utilities`"));
        };
        let items: Vec<&str> = items.split_whitespace().collect();
        let utils: Vec<&str> = utils.split_whitespace().collect();
        if items.len() != utils.len() {
            return Err(FuimError::parse(source_name, line_no, "item and utility counts differ"));
        }
        let mut entries = Vec::with_capacity(items.len());
        for (item, u) in items.iter().zip(&utils) {
            let u: f64 = u
                .parse()
                .map_err(|_| FuimError::parse(source_name, line_no, format!("bad utility {u:?}")))?;
            let eu = *table.get(item).ok_or_else(|| {
                FuimError::Validation(format!("line {line_no}: item {item:?} has no external utility"))
            })?;
            let q = u / eu;
            let rounded = q.round();
            if rounded < 1.0 || (q - rounded).abs() > 1e-9 * q.abs().max(1.0) {
                return Err(FuimError::Validation(format!(
                    "line {line_no}: utility {u} of item {item:?} is not a positive multiple of {eu}"
                )));
            }
            entries.push((item.to_string(), rounded as i64));
        }
        out.push((out.len() as u64 + 1, entries));
    }
    Ok(out)
}
