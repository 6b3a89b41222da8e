//! Reference miners: an exhaustive oracle and a two-phase level-wise miner.

mod oracle;
mod tpfu;

pub use oracle::{oracle_enumerate, oracle_mine, OracleConfig};
pub use tpfu::{tpfu_mine, tpfu_mine_with, TpfuConfig};
