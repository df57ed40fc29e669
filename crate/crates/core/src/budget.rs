//! Resource caps for the exhaustive parts of the pipeline.

use std::str::FromStr;

/// Caps on search effort. Every exhaustive routine consults one of these
/// and fails with a budget error instead of running unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    /// Completions an ensemble query may enumerate.
    pub completions: u64,
    /// Branching nodes a hitting-set search may expand.
    pub mhs_nodes: u64,
    /// Explanations a single enumeration may report.
    pub explanations: u64,
    /// Features a brute-force subset enumeration may range over.
    pub brute_force_features: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            completions: 1 << 20,
            mhs_nodes: 10_000_000,
            explanations: 100_000,
            brute_force_features: 20,
        }
    }
}

impl FromStr for Budget {
    type Err = String;

    /// Accepts either a single number, applied to the completion and node
    /// caps, or `key=value` pairs separated by commas with keys
    /// `completions`, `mhs`, `explanations`, `brute`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut budget = Budget::default();
        let s = s.trim();
        if let Ok(n) = s.parse::<u64>() {
            budget.completions = n;
            budget.mhs_nodes = n;
            return Ok(budget);
        }
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| format!("expected key=value, got '{part}'"))?;
            let n: u64 = value
                .trim()
                .parse()
                .map_err(|_| format!("'{value}' is not a non-negative integer"))?;
            match key.trim() {
                "completions" => budget.completions = n,
                "mhs" => budget.mhs_nodes = n,
                "explanations" => budget.explanations = n,
                "brute" => budget.brute_force_features = n as usize,
                other => return Err(format!("unknown budget key '{other}'")),
            }
        }
        Ok(budget)
    }
}
