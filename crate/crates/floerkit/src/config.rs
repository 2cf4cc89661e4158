use thiserror::Error;

/// Default cap on tuple evaluations for a single enumeration.
pub const DEFAULT_BUDGET: u64 = 100_000_000;

pub const THREADS_ENV: &str = "FLOERKIT_THREADS";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("resource limit: estimated {estimate} tuple evaluations exceed the budget of {budget}")]
pub struct ResourceLimit {
    pub estimate: u128,
    pub budget: u64,
}

/// Fails before any work starts if `estimate` exceeds `budget`.
pub fn check_budget(estimate: u128, budget: u64) -> Result<(), ResourceLimit> {
    if estimate > budget as u128 {
        Err(ResourceLimit { estimate, budget })
    } else {
        Ok(())
    }
}

pub fn pow_estimate(base: usize, exp: usize) -> u128 {
    (base as u128).saturating_pow(exp as u32)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub workers: Option<usize>,
    pub budget: u64,
    pub depth: usize,
    pub groups: Vec<String>,
    pub output_dir: Option<std::path::PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            workers: None,
            budget: DEFAULT_BUDGET,
            depth: 4,
            groups: ["Z2", "Z3", "Z4", "S3", "Q8"].iter().map(|s| s.to_string()).collect(),
            output_dir: None,
        }
    }
}

impl RunConfig {
    /// Worker count: explicit setting, then the environment variable, then all cores.
    pub fn resolved_workers(&self) -> usize {
        self.workers
            .or_else(|| std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse().ok()))
            .filter(|&n| n > 0)
            .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.budget == 0 {
            return Err("budget must be positive".into());
        }
        if self.workers == Some(0) {
            return Err("worker count must be positive".into());
        }
        Ok(())
    }
}
