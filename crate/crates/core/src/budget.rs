use std::env;

/// Environment variable that overrides the node and norm caps.
pub const BUDGET_ENV: &str = "ORDER_ELASTICITY_BUDGET";

/// Per-call limits for the searches in this crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    /// Backtracking nodes for zero-sum searches.
    pub nodes: u64,
    /// Largest norm the brute-force factorization oracle will enumerate.
    pub norm: u64,
    /// Rational primes are tried up to this bound when hunting for prime ideals.
    pub prime_bound: u64,
    /// Coordinate scan length for generator searches in real fields.
    pub generator_scan: u64,
    /// Continued fraction steps for fundamental units.
    pub cf_steps: u64,
    /// Terms accepted by the proper-zero-subsequence check.
    pub sequence_terms: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            nodes: 10_000_000,
            norm: 1_000_000,
            prime_bound: 10_000,
            generator_scan: 10_000_000,
            cf_steps: 1_000_000,
            sequence_terms: 64,
        }
    }
}

impl Budget {
    /// Defaults, with `nodes` and `norm` replaced by `ORDER_ELASTICITY_BUDGET` when it
    /// holds a positive integer.
    pub fn from_env() -> Self {
        let mut budget = Budget::default();
        if let Some(cap) = env::var(BUDGET_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<u64>().ok())
            .filter(|&v| v > 0)
        {
            budget.nodes = cap;
            budget.norm = cap;
        }
        budget
    }
}
