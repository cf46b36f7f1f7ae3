use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("metric undefined: no events with two or more photons (denominator {denominator:e})")]
    UndefinedMetric { denominator: f64 },

    #[error("truncation too small: boundary probability {leak:e} at cutoff {cutoff}")]
    CutoffTooSmall { cutoff: usize, leak: f64 },

    #[error("no anti-clones: mode 2 is empty when M = {m} <= N = {n}")]
    NoAntiClones { n: u64, m: u64 },

    #[error("empty component: M = {m} < N = {n}")]
    EmptyComponent { n: u64, m: u64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
