//! Capacity limits for the exponential code paths.

/// Caps on the instance sizes the exponential solvers and searches accept.
/// Exceeding a cap is reported as an error, never silently truncated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Largest `n` the backtracking stable/IR searches accept.
    pub exact_search_max_agents: usize,
    /// Largest `n` the subset-enumeration oracle accepts.
    pub oracle_max_agents: usize,
    /// Largest `n` the brute-force misreport search accepts.
    pub brute_force_max_agents: usize,
    /// Most accept/reject declaration pairs the misreport search enumerates.
    pub declaration_reports_max: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            exact_search_max_agents: 24,
            oracle_max_agents: 20,
            brute_force_max_agents: 12,
            declaration_reports_max: 1_000_000,
        }
    }
}
