//! Seeded synthetic quantitative databases.
//!
//! Item popularity is log-normally skewed so that some itemsets co-occur often
//! enough to be mined; external utilities are log-normal, rounded and clamped
//! to `[1, 10000]`; quantities are uniform over the configured range.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{LogNormal, Poisson};

use crate::database::QuantitativeDatabase;
use crate::error::{FuimError, Result};

pub const UTILITY_MIN: f64 = 1.0;
pub const UTILITY_MAX: f64 = 10_000.0;

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorConfig {
    pub items: usize,
    pub transactions: usize,
    /// Mean transaction length (Poisson, at least one item).
    pub avg_len: f64,
    pub quantity_min: u32,
    pub quantity_max: u32,
    /// Location and scale of the log-normal external-utility distribution.
    pub utility_mu: f64,
    pub utility_sigma: f64,
    /// Scale of the log-normal item popularity weights; 0 means uniform.
    pub popularity_sigma: f64,
    pub seed: u64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            items: 870,
            transactions: 10_000,
            avg_len: 10.1,
            quantity_min: 1,
            quantity_max: 6,
            utility_mu: 5.0,
            utility_sigma: 1.5,
            popularity_sigma: 1.0,
            seed: 1,
        }
    }
}

impl GeneratorConfig {
    /// Checks sizes and ranges; `quantity_domain` is the largest quantity the
    /// membership function distinguishes, when known.
    pub fn validate(&self, quantity_domain: Option<f64>) -> Result<()> {
        if self.items == 0 || self.transactions == 0 {
            return Err(FuimError::Validation(
                "item and transaction counts must be positive".into(),
            ));
        }
        if !(self.avg_len.is_finite() && self.avg_len > 0.0) {
            return Err(FuimError::Validation(format!(
                "average length must be positive, got {}",
                self.avg_len
            )));
        }
        if self.quantity_min == 0 || self.quantity_min > self.quantity_max {
            return Err(FuimError::Validation(format!(
                "invalid quantity range {}-{}",
                self.quantity_min, self.quantity_max
            )));
        }
        if let Some(domain) = quantity_domain {
            if f64::from(self.quantity_max) > domain {
                return Err(FuimError::Validation(format!(
                    "quantity range {}-{} exceeds the membership domain (max {domain})",
                    self.quantity_min, self.quantity_max
                )));
            }
        }
        if !(self.utility_sigma >= 0.0 && self.popularity_sigma >= 0.0) || !self.utility_mu.is_finite() {
            return Err(FuimError::Validation("distribution parameters out of range".into()));
        }
        Ok(())
    }
}

/// Log-normal external utilities rounded to integers and clamped to `[1, 10000]`.
pub fn sample_utilities<R: Rng + ?Sized>(rng: &mut R, count: usize, mu: f64, sigma: f64) -> Result<Vec<f64>> {
    let dist = LogNormal::new(mu, sigma).map_err(|e| FuimError::Validation(format!("log-normal: {e}")))?;
    Ok((0..count)
        .map(|_| dist.sample(rng).round().clamp(UTILITY_MIN, UTILITY_MAX))
        .collect())
}

pub fn generate(cfg: &GeneratorConfig) -> Result<QuantitativeDatabase> {
    cfg.validate(None)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let utilities = sample_utilities(&mut rng, cfg.items, cfg.utility_mu, cfg.utility_sigma)?;

    let popularity: Vec<f64> = if cfg.popularity_sigma > 0.0 {
        let dist = LogNormal::new(0.0, cfg.popularity_sigma).map_err(|e| FuimError::Validation(e.to_string()))?;
        (0..cfg.items).map(|_| dist.sample(&mut rng)).collect()
    } else {
        vec![1.0; cfg.items]
    };
    let picker = WeightedIndex::new(&popularity).map_err(|e| FuimError::Validation(e.to_string()))?;
    let length = Poisson::new(cfg.avg_len).map_err(|e| FuimError::Validation(e.to_string()))?;

    let labels: Vec<String> = (1..=cfg.items).map(|i| i.to_string()).collect();
    let mut transactions = Vec::with_capacity(cfg.transactions);
    let mut chosen = vec![false; cfg.items];
    let mut picked = Vec::new();
    for t in 0..cfg.transactions {
        let len = (length.sample(&mut rng) as usize).clamp(1, cfg.items);
        picked.clear();
        let mut attempts = 0;
        while picked.len() < len && attempts < 50 * len {
            let i = picker.sample(&mut rng);
            attempts += 1;
            if !chosen[i] {
                chosen[i] = true;
                picked.push(i);
            }
        }
        // heavy skew can starve rejection sampling; top up uniformly
        while picked.len() < len {
            let i = rng.random_range(0..cfg.items);
            if !chosen[i] {
                chosen[i] = true;
                picked.push(i);
            }
        }
        picked.sort_unstable();
        let entries = picked
            .iter()
            .map(|&i| {
                chosen[i] = false;
                let q = rng.random_range(cfg.quantity_min..=cfg.quantity_max);
                (labels[i].clone(), i64::from(q))
            })
            .collect();
        transactions.push((t as u64 + 1, entries));
    }
    let table = labels.into_iter().zip(utilities).collect();
    QuantitativeDatabase::new(transactions, table)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> GeneratorConfig {
        GeneratorConfig {
            items: 6,
            transactions: 20,
            avg_len: 3.0,
            seed: 42,
            ..Default::default()
        }
    }

    #[test]
    fn same_seed_same_database() {
        let a = generate(&small()).unwrap();
        let b = generate(&small()).unwrap();
        assert_eq!(a.to_transactions_text(), b.to_transactions_text());
        assert_eq!(a.to_utilities_text(), b.to_utilities_text());
        let c = generate(&GeneratorConfig { seed: 43, ..small() }).unwrap();
        assert_ne!(a.to_transactions_text(), c.to_transactions_text());
    }

    #[test]
    fn quantities_within_range_and_db_round_trips() {
        let db = generate(&small()).unwrap();
        assert_eq!(db.len(), 20);
        for tx in db.transactions() {
            assert!(!tx.is_empty());
            assert!(tx.entries.iter().all(|&(_, q)| (1..=6).contains(&q)));
        }
        let again = QuantitativeDatabase::parse(&db.to_transactions_text(), &db.to_utilities_text()).unwrap();
        assert_eq!(db.to_transactions_text(), again.to_transactions_text());
    }

    #[test]
    fn utilities_clamped_and_right_skewed() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut us = sample_utilities(&mut rng, 100_000, 5.0, 1.5).unwrap();
        assert!(us.iter().all(|&u| (UTILITY_MIN..=UTILITY_MAX).contains(&u)));
        let mean = us.iter().sum::<f64>() / us.len() as f64;
        us.sort_by(f64::total_cmp);
        let median = us[us.len() / 2];
        assert!(median < mean, "median {median} mean {mean}");
    }

    #[test]
    fn invalid_ranges_rejected() {
        assert!(GeneratorConfig {
            quantity_min: 0,
            ..small()
        }
        .validate(None)
        .is_err());
        assert!(GeneratorConfig {
            quantity_min: 5,
            quantity_max: 2,
            ..small()
        }
        .validate(None)
        .is_err());
        assert!(GeneratorConfig {
            quantity_max: 9,
            ..small()
        }
        .validate(Some(6.0))
        .is_err());
        assert!(GeneratorConfig { items: 0, ..small() }.validate(None).is_err());
        assert!(small().validate(Some(6.0)).is_ok());
    }
}
