//! Run configuration: budgets, output settings and thread count.

use std::path::PathBuf;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::{FamilyTag, DEFAULT_MAX_ENUMERATION_N};

/// Cap on Cayley-table entries (`|S|²`) for table-backed checks.
pub const MAX_TABLE_ENTRIES: usize = 1 << 25;

/// Cap on element pairs visited by direct pairwise scans.
pub const MAX_PAIR_CHECKS: usize = 1 << 28;

/// Largest chain size each method is allowed to run at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Budget {
    pub max_enumeration_n: u8,
    pub max_oracle_n: u8,
    pub max_jstar_n: u8,
}

impl Default for Budget {
    fn default() -> Self {
        Self {
            max_enumeration_n: DEFAULT_MAX_ENUMERATION_N,
            max_oracle_n: 4,
            max_jstar_n: 3,
        }
    }
}

impl Budget {
    pub fn validate(&self) -> Result<()> {
        if self.max_oracle_n > self.max_enumeration_n || self.max_jstar_n > self.max_oracle_n {
            return Err(Error::HypothesisNotMet(format!(
                "budgets must satisfy jstar ({}) <= oracle ({}) <= enumeration ({})",
                self.max_jstar_n, self.max_oracle_n, self.max_enumeration_n
            )));
        }
        Ok(())
    }

    pub fn check_oracle(&self, n: u8) -> Result<()> {
        check("oracle", n, self.max_oracle_n)
    }

    pub fn check_jstar(&self, n: u8) -> Result<()> {
        check("J* fixpoint", n, self.max_jstar_n)
    }

    pub fn check_enumeration(&self, n: u8) -> Result<()> {
        check("enumeration", n, self.max_enumeration_n)
    }

    /// Pairwise scans over `S × S` without a table.
    pub fn check_pairs(&self, n: u8, len: usize) -> Result<()> {
        self.check_enumeration(n)?;
        if len.saturating_mul(len) > MAX_PAIR_CHECKS {
            return Err(Error::BudgetExceeded {
                what: "pairwise scan",
                n,
                max: n - 1,
            });
        }
        Ok(())
    }

    /// Table-backed checks need `|S|²` entries.
    pub fn check_table(&self, n: u8, len: usize) -> Result<()> {
        self.check_enumeration(n)?;
        if len.saturating_mul(len) > MAX_TABLE_ENTRIES {
            return Err(Error::BudgetExceeded {
                what: "Cayley table",
                n,
                max: n - 1,
            });
        }
        Ok(())
    }
}

fn check(what: &'static str, n: u8, max: u8) -> Result<()> {
    if n > max {
        Err(Error::BudgetExceeded { what, n, max })
    } else {
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone)]
pub struct Config {
    pub budget: Budget,
    pub families: Vec<FamilyTag>,
    pub format: OutputFormat,
    pub cache_dir: Option<PathBuf>,
    /// 0 lets the thread pool pick.
    pub threads: usize,
    /// Seed for sampled checks.
    pub seed: u64,
    /// Write per-claim runtimes into machine-readable reports.
    pub timings: bool,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            budget: Budget::default(),
            families: FamilyTag::CONTRACTIONS.to_vec(),
            format: OutputFormat::Json,
            cache_dir: None,
            threads: 0,
            seed: 0x5eed,
            timings: false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn budget_ordering() {
        assert!(Budget::default().validate().is_ok());
        let bad = Budget {
            max_enumeration_n: 6,
            max_oracle_n: 3,
            max_jstar_n: 4,
        };
        assert!(bad.validate().is_err());
        let bad = Budget {
            max_enumeration_n: 4,
            max_oracle_n: 5,
            max_jstar_n: 3,
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn budget_checks() {
        let b = Budget::default();
        assert!(b.check_oracle(4).is_ok());
        assert!(matches!(
            b.check_oracle(5),
            Err(Error::BudgetExceeded { n: 5, max: 4, .. })
        ));
        assert!(b.check_jstar(4).is_err());
    }
}
