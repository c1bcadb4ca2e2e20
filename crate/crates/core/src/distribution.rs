//! Truncated photon-number distributions and their moments.

use crate::error::{Error, Result};

/// Tolerance on `Σ p(n) = 1` accepted at construction.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-10;
/// Default bound on the mass left in the last retained level.
pub const DEFAULT_TAIL_TOLERANCE: f64 = 1e-10;
/// Below this mean the Fano factor is reported as undefined.
pub const FANO_MEAN_EPSILON: f64 = 1e-9;

/// Round-off negatives down to this value are clamped to zero.
const NEGATIVE_CLAMP: f64 = -1e-12;

/// Diagonal of the cavity density matrix, `p(n)` for `n = 0..=n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhotonDistribution {
    probs: Vec<f64>,
}

impl PhotonDistribution {
    /// Validates a probability vector: finite, no entries below `-1e-12`,
    /// summing to one within [`NORMALIZATION_TOLERANCE`]. Round-off
    /// negatives are clamped and the vector is renormalized.
    pub fn from_probs(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::DimensionMismatch {
                expected: 1,
                actual: 0,
            });
        }
        let sum = checked_sum(&probs)?;
        if (sum - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::Unnormalized { sum });
        }
        Self::normalize(probs)
    }

    /// Clamps round-off negatives and divides by the total mass.
    pub fn normalize(mut probs: Vec<f64>) -> Result<Self> {
        checked_sum(&probs)?;
        for p in probs.iter_mut() {
            if *p < 0.0 {
                *p = 0.0;
            }
        }
        let sum: f64 = probs.iter().sum();
        if !(sum > 0.0 && sum.is_finite()) {
            return Err(Error::Unnormalized { sum });
        }
        for p in probs.iter_mut() {
            *p /= sum;
        }
        Ok(Self { probs })
    }

    /// Wraps entries already known to form a distribution.
    pub(crate) fn from_raw(probs: Vec<f64>) -> Self {
        debug_assert!(!probs.is_empty());
        Self { probs }
    }

    /// Fock state `|n⟩` in a basis truncated at `n_max`.
    pub fn fock(n: usize, n_max: usize) -> Result<Self> {
        if n > n_max {
            return Err(Error::Config(format!("Fock level {n} exceeds n_max = {n_max}")));
        }
        let mut probs = vec![0.0; n_max + 1];
        probs[n] = 1.0;
        Ok(Self { probs })
    }

    pub fn vacuum(n_max: usize) -> Self {
        let mut probs = vec![0.0; n_max + 1];
        probs[0] = 1.0;
        Self { probs }
    }

    /// Bose–Einstein distribution `p(n) ∝ (n̄ / (n̄ + 1))ⁿ`, renormalized over
    /// the truncated basis.
    pub fn thermal(nbar: f64, n_max: usize) -> Result<Self> {
        crate::error::ensure_non_negative("nbar", nbar)?;
        let ratio = nbar / (nbar + 1.0);
        let probs = (0..=n_max).map(|n| ratio.powi(n as i32)).collect();
        Self::normalize(probs)
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn into_probs(self) -> Vec<f64> {
        self.probs
    }

    pub fn n_max(&self) -> usize {
        self.probs.len() - 1
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn get(&self, n: usize) -> f64 {
        self.probs.get(n).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// Mass in the last retained level, `p(n_max)`.
    pub fn tail_mass(&self) -> f64 {
        self.probs[self.probs.len() - 1]
    }

    pub fn check_tail(&self, tolerance: f64) -> Result<()> {
        let tail = self.tail_mass();
        if tail < tolerance {
            Ok(())
        } else {
            Err(Error::Truncation {
                n_max: self.n_max(),
                tail,
                tolerance,
            })
        }
    }

    pub fn l1_distance(&self, other: &PhotonDistribution) -> f64 {
        let len = self.len().max(other.len());
        (0..len).map(|n| (self.get(n) - other.get(n)).abs()).sum()
    }

    pub fn statistics(&self) -> FieldStatistics {
        statistics(self)
    }
}

fn checked_sum(probs: &[f64]) -> Result<f64> {
    let mut sum = 0.0;
    for (n, &p) in probs.iter().enumerate() {
        if !p.is_finite() || p < NEGATIVE_CLAMP {
            return Err(Error::NegativeProbability { n, value: p });
        }
        sum += p;
    }
    Ok(sum)
}

/// Photon-number moments of a distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldStatistics {
    pub mean_n: f64,
    pub variance: f64,
    /// `variance / mean_n`, or `None` when the mean is below
    /// [`FANO_MEAN_EPSILON`] (vacuum).
    pub fano: Option<f64>,
    pub std_dev: f64,
}

impl FieldStatistics {
    pub fn fano_defined(&self) -> bool {
        self.fano.is_some()
    }
}

pub fn statistics(p: &PhotonDistribution) -> FieldStatistics {
    moments(p.probs())
}

pub(crate) fn moments(probs: &[f64]) -> FieldStatistics {
    let (mean_n, second) = probs
        .iter()
        .enumerate()
        .fold((0.0, 0.0), |(m1, m2), (n, &p)| {
            let n = n as f64;
            (m1 + n * p, m2 + n * n * p)
        });
    let variance = (second - mean_n * mean_n).max(0.0);
    let fano = (mean_n >= FANO_MEAN_EPSILON).then(|| variance / mean_n);
    FieldStatistics {
        mean_n,
        variance,
        fano,
        std_dev: variance.sqrt(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vacuum_statistics() {
        let stats = statistics(&PhotonDistribution::vacuum(10));
        assert_eq!(stats.mean_n, 0.0);
        assert_eq!(stats.variance, 0.0);
        assert_eq!(stats.fano, None);
    }

    #[test]
    fn thermal_statistics() {
        let nbar = 0.92;
        let stats = statistics(&PhotonDistribution::thermal(nbar, 80).unwrap());
        assert!((stats.mean_n - nbar).abs() < 1e-12);
        assert!((stats.fano.unwrap() - (nbar + 1.0)).abs() < 1e-12);
        assert!((stats.std_dev * stats.std_dev - stats.variance).abs() < 1e-12);
    }

    #[test]
    fn poisson_fano_is_one() {
        let lambda: f64 = 0.5;
        let mut probs = Vec::new();
        let mut term = (-lambda).exp();
        for n in 0..=40 {
            probs.push(term);
            term *= lambda / (n + 1) as f64;
        }
        let stats = statistics(&PhotonDistribution::from_probs(probs).unwrap());
        assert!((stats.fano.unwrap() - 1.0).abs() < 1e-6);
        assert!((stats.mean_n - lambda).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_vectors() {
        assert!(matches!(
            PhotonDistribution::from_probs(vec![0.5, 0.4]),
            Err(Error::Unnormalized { .. })
        ));
        assert!(matches!(
            PhotonDistribution::from_probs(vec![1.1, -0.1]),
            Err(Error::NegativeProbability { n: 1, .. })
        ));
        assert!(PhotonDistribution::from_probs(vec![]).is_err());
        assert!(PhotonDistribution::from_probs(vec![f64::NAN, 1.0]).is_err());
    }

    #[test]
    fn clamps_round_off_negatives() {
        let p = PhotonDistribution::from_probs(vec![1.0 + 1e-15, -1e-15, 0.0]).unwrap();
        assert_eq!(p.get(1), 0.0);
        assert!((p.total() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn tail_check() {
        let p = PhotonDistribution::thermal(0.92, 30).unwrap();
        assert!(p.check_tail(DEFAULT_TAIL_TOLERANCE).is_err());
        let p = PhotonDistribution::thermal(0.92, 40).unwrap();
        assert!(p.check_tail(DEFAULT_TAIL_TOLERANCE).is_ok());
    }
}
