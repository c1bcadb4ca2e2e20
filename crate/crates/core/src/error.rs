use std::fmt;

use thiserror::Error;

use crate::physics::Outcome;

/// Errors raised by the simulation library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameter `{name}` = {value} is out of domain: {reason}")]
    Domain {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("distribution is not normalized (sum = {sum})")]
    Unnormalized { sum: f64 },

    #[error("negative probability {value:e} at n = {n}")]
    NegativeProbability { n: usize, value: f64 },

    #[error("distribution has {actual} levels but {expected} were expected")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error(
        "truncation: tail mass p(n_max = {n_max}) = {tail:e} exceeds tolerance {tolerance:e}; \
         increase n_max"
    )]
    Truncation {
        n_max: usize,
        tail: f64,
        tolerance: f64,
    },

    #[error("integration failed at t = {time} s: {reason}")]
    Integration { time: f64, reason: String },

    #[error("outcome {outcome} is impossible under the current belief (posterior weight {weight:e})")]
    ImpossibleOutcome { outcome: Outcome, weight: f64 },

    #[error(
        "truncation breach: true photon number reached n_max = {n_max} at t = {time} s; \
         increase n_max"
    )]
    TrajectoryTruncation { n_max: usize, time: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("at phi = {phi}: {source}")]
    SweepPoint { phi: f64, source: Box<Error> },
}

pub type Result<T> = std::result::Result<T, Error>;

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

pub(crate) fn ensure_finite(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain {
            name,
            value,
            reason: "must be finite",
        })
    }
}

pub(crate) fn ensure_positive(name: &'static str, value: f64) -> Result<()> {
    ensure_finite(name, value)?;
    if value > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            name,
            value,
            reason: "must be > 0",
        })
    }
}

pub(crate) fn ensure_non_negative(name: &'static str, value: f64) -> Result<()> {
    ensure_finite(name, value)?;
    if value >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            name,
            value,
            reason: "must be >= 0",
        })
    }
}
