mod common;

use fuim::baseline::{oracle_enumerate, tpfu_mine, OracleConfig};
use fuim::fuzzylist::{build_initial_lists, join};
use fuim::generate::{generate, GeneratorConfig};
use fuim::miner::compute_order;
use fuim::result::UTILITY_REL_TOL;
use fuim::{
    mine, FuzzyDatabase, FuzzyItemset, MembershipFunction, MinerConfig, MiningResult, OrderDirection,
    QuantitativeDatabase, Threshold, Variant,
};
use proptest::prelude::*;

fn small_db(seed: u64, items: usize, transactions: usize) -> QuantitativeDatabase {
    generate(&GeneratorConfig {
        items,
        transactions,
        avg_len: 3.0,
        utility_mu: 1.0,
        utility_sigma: 1.0,
        popularity_sigma: 0.5,
        seed,
        ..Default::default()
    })
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn memberships_lie_in_unit_interval(q in 0.0f64..20.0) {
        let mf = MembershipFunction::bundled();
        let regions = mf.region_names().len();
        for (r, mu) in mf.fuzzify(q) {
            prop_assert!(usize::from(r) < regions);
            prop_assert!(mu > 0.0 && mu <= 1.0, "membership {mu} at {q}");
        }
    }

    #[test]
    fn membership_function_text_round_trips(a in 1.0f64..5.0, w in 0.5f64..5.0) {
        let text = format!("Low: ({a},1) ({},0)\nHigh: ({a},0) ({},1)\n", a + w, a + w);
        let mf = MembershipFunction::parse(&text, "t").unwrap();
        let again = MembershipFunction::parse(&mf.to_string(), "t").unwrap();
        prop_assert_eq!(mf, again);
    }

    #[test]
    fn database_text_round_trips(seed in any::<u64>(), items in 1usize..30, n in 1usize..50) {
        let db = small_db(seed, items, n);
        let again = QuantitativeDatabase::parse(&db.to_transactions_text(), &db.to_utilities_text()).unwrap();
        prop_assert_eq!(db.to_transactions_text(), again.to_transactions_text());
        prop_assert!((db.total_utility() - again.total_utility()).abs() <= 1e-9 * db.total_utility());
    }

    #[test]
    fn threshold_rate_scales_total_utility(seed in any::<u64>(), rate in 0.0f64..=1.0) {
        let db = small_db(seed, 6, 12);
        let gamma = Threshold::Rate(rate).resolve(&db).unwrap();
        prop_assert!((gamma - rate * db.total_utility()).abs() <= 1e-9 * db.total_utility());
    }

    #[test]
    fn fuub_bounds_fuzzy_utility(seed in any::<u64>()) {
        let db = small_db(seed, 6, 15);
        let mf = MembershipFunction::bundled();
        let fdb = FuzzyDatabase::new(&db, &mf);
        for h in oracle_enumerate(&fdb, &OracleConfig::default()).unwrap() {
            let fuub = fdb.fuub(&h.itemset.base_items());
            prop_assert!(fuub >= h.utility * (1.0 - UTILITY_REL_TOL));
            prop_assert!(h.utility > 0.0);
        }
    }

    #[test]
    fn joined_lists_are_exact(seed in any::<u64>()) {
        let db = small_db(seed, 5, 15);
        let mf = MembershipFunction::bundled();
        let fdb = FuzzyDatabase::new(&db, &mf);
        let order = compute_order(&fdb, OrderDirection::Ascending);
        let lists = build_initial_lists(&fdb, &order, &vec![true; db.item_count()]);
        for (i, x) in lists.iter().enumerate() {
            prop_assert!((x.sum_ifu() - fdb.total_fuzzy_utility(x.itemset())).abs() <= 1e-9 * x.sum_ifu().max(1.0));
            for y in &lists[i + 1..] {
                if x.last().item == y.last().item {
                    continue;
                }
                let xy = join(None, x, y).unwrap();
                let want = fdb.total_fuzzy_utility(xy.itemset());
                prop_assert!((xy.sum_ifu() - want).abs() <= 1e-9 * want.max(1.0));
                prop_assert_eq!(xy.len(), fdb.support(xy.itemset()));
                prop_assert!(xy.sum_ifu() + xy.sum_rfu() <= x.sum_ifu() + x.sum_rfu() + 1e-9);
            }
        }
    }

    #[test]
    fn every_variant_matches_the_oracle(seed in any::<u64>(), frac in 0.0f64..0.5) {
        let db = small_db(seed, 6, 20);
        let mf = MembershipFunction::bundled();
        let fdb = FuzzyDatabase::new(&db, &mf);
        let all = oracle_enumerate(&fdb, &OracleConfig::default()).unwrap();
        let gamma = frac * all.iter().map(|h| h.utility).fold(0.0, f64::max);
        let expected = MiningResult {
            hfuis: all.into_iter().filter(|h| h.utility >= gamma).collect(),
            ..Default::default()
        };
        for v in Variant::ALL {
            for order in [OrderDirection::Ascending, OrderDirection::Descending] {
                for parallel in [false, true] {
                    let cfg = MinerConfig { order, parallel, ..MinerConfig::for_variant(v, gamma) };
                    let got = mine(&fdb, &cfg).unwrap();
                    prop_assert!(got.compare(&expected, UTILITY_REL_TOL).is_ok(), "{v} {order:?}");
                }
            }
        }
        let tpfu = tpfu_mine(&fdb, gamma).unwrap();
        prop_assert!(tpfu.compare(&expected, UTILITY_REL_TOL).is_ok());
    }

    #[test]
    fn utility_is_anti_monotone_in_support_only(seed in any::<u64>()) {
        // fu itself is not anti-monotone, but support is
        let db = small_db(seed, 5, 15);
        let mf = MembershipFunction::bundled();
        let fdb = FuzzyDatabase::new(&db, &mf);
        for h in oracle_enumerate(&fdb, &OracleConfig::default()).unwrap() {
            let members = h.itemset.members();
            if members.len() < 2 {
                continue;
            }
            let sub = FuzzyItemset::new(members[..members.len() - 1].to_vec()).unwrap();
            prop_assert!(fdb.support(&sub) >= fdb.support(&h.itemset));
        }
    }
}

#[test]
fn pattern_length_cap_matches_filtered_oracle() {
    let db = common::corpus_db(3);
    let mf = MembershipFunction::bundled();
    let fdb = FuzzyDatabase::new(&db, &mf);
    let all = oracle_enumerate(&fdb, &OracleConfig::default()).unwrap();
    let gamma = common::quantile_gammas(&fdb.item_fuubs())[1];
    for cap in 1..=3 {
        let expected = MiningResult {
            hfuis: all
                .iter()
                .filter(|h| h.utility >= gamma && h.itemset.len() <= cap)
                .cloned()
                .collect(),
            ..Default::default()
        };
        let cfg = MinerConfig {
            max_pattern_length: Some(cap),
            ..MinerConfig::new(gamma)
        };
        mine(&fdb, &cfg).unwrap().compare(&expected, UTILITY_REL_TOL).unwrap();
    }
}
