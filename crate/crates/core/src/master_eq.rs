//! Birth–death master equation for the cavity photon number.
//!
//! Between atoms the field exchanges photons with the bath; every atom that
//! leaves in the excited state removes one photon. Coarse-grained over a
//! Poissonian atom beam of rate `r`, the diagonal `p(n)` obeys
//!
//! ```text
//! dp(n)/dt = up(n-1) p(n-1) + down(n+1) p(n+1) - [up(n) + down(n)] p(n)
//! up(n)    = γ n̄ (n + 1)
//! down(n)  = (r/4) sin²(2φ√n) + γ (n̄ + 1) n
//! ```
//!
//! The atom loss term in `down(n)` uses `sin²(2φ√n)` for both the outflow
//! from `n` and the inflow from `n + 1`. This is the only choice that
//! conserves probability and whose stationary state is the product formula
//! implemented in [`steady_state_analytic`].

use crate::distribution::{PhotonDistribution, DEFAULT_TAIL_TOLERANCE, NORMALIZATION_TOLERANCE};
use crate::error::{Error, Result};
use crate::physics::{absorption_weight, check_phase, passage_weights, DerivedRates, PhysicalParams};

/// Default photon-number truncation.
pub const DEFAULT_N_MAX: usize = 40;

/// Explicit RK4 steps are bounded by `STEP_SAFETY / max exit rate`.
pub const STEP_SAFETY: f64 = 0.1;

const MAX_STEPS: u64 = 1 << 34;

/// Unconditional effect of one atom on the photon distribution, the atom
/// states traced out:
///
/// `p'(n) = [cos²(φ√n) + sin⁴(φ√n)] p(n) + ¼ sin²(2φ√(n+1)) p(n+1)`.
///
/// The map is trace preserving, so the result is not renormalized. The last
/// level receives no inflow from above the truncation.
pub fn apply_atom_map(p: &PhotonDistribution, phase: f64) -> Result<PhotonDistribution> {
    check_phase(phase)?;
    let sum = p.total();
    if (sum - 1.0).abs() > NORMALIZATION_TOLERANCE {
        return Err(Error::Unnormalized { sum });
    }
    let probs = p.probs();
    let n_max = p.n_max();
    let mut out = Vec::with_capacity(probs.len());
    for n in 0..=n_max {
        let w = passage_weights(n, phase);
        let mut value = (w.w_f + w.w_g) * probs[n];
        if n < n_max {
            value += absorption_weight(n + 1, phase) * probs[n + 1];
        }
        out.push(value);
    }
    Ok(PhotonDistribution::from_raw(out))
}

/// Tridiagonal generator of the photon-number master equation.
#[derive(Debug, Clone, PartialEq)]
pub struct BirthDeathGenerator {
    up: Vec<f64>,
    down: Vec<f64>,
    rates: DerivedRates,
    atom_rate: f64,
    phase: f64,
}

impl BirthDeathGenerator {
    /// Bath-only generator (no atoms).
    pub fn thermal(rates: DerivedRates, n_max: usize) -> Result<Self> {
        Self::with_atoms(rates, 0.0, 0.0, n_max)
    }

    fn with_atoms(rates: DerivedRates, atom_rate: f64, phase: f64, n_max: usize) -> Result<Self> {
        if n_max < 2 {
            return Err(Error::Config(format!("n_max must be >= 2, got {n_max}")));
        }
        let DerivedRates { gamma, nbar } = rates;
        let up = (0..=n_max)
            .map(|n| {
                if n < n_max {
                    gamma * nbar * (n as f64 + 1.0)
                } else {
                    0.0
                }
            })
            .collect();
        let down = (0..=n_max)
            .map(|n| {
                let atoms = if atom_rate > 0.0 {
                    atom_rate * absorption_weight(n, phase)
                } else {
                    0.0
                };
                atoms + gamma * (nbar + 1.0) * n as f64
            })
            .collect();
        Ok(Self {
            up,
            down,
            rates,
            atom_rate,
            phase,
        })
    }

    pub fn n_max(&self) -> usize {
        self.up.len() - 1
    }

    /// Rates `n → n + 1` in s⁻¹; the last entry is zero.
    pub fn up_rates(&self) -> &[f64] {
        &self.up
    }

    /// Rates `n → n − 1` in s⁻¹; the first entry is zero.
    pub fn down_rates(&self) -> &[f64] {
        &self.down
    }

    pub fn rates(&self) -> DerivedRates {
        self.rates
    }

    pub fn atom_rate(&self) -> f64 {
        self.atom_rate
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    pub fn exit_rate(&self, n: usize) -> f64 {
        self.up[n] + self.down[n]
    }

    pub fn max_exit_rate(&self) -> f64 {
        (0..self.up.len())
            .map(|n| self.exit_rate(n))
            .fold(0.0, f64::max)
    }

    /// Writes `G·p` into `out`.
    pub fn apply(&self, p: &[f64], out: &mut [f64]) {
        let last = self.up.len() - 1;
        for n in 0..=last {
            let mut value = -(self.up[n] + self.down[n]) * p[n];
            if n > 0 {
                value += self.up[n - 1] * p[n - 1];
            }
            if n < last {
                value += self.down[n + 1] * p[n + 1];
            }
            out[n] = value;
        }
    }

    /// Largest absolute column sum of the generator, zero up to round-off.
    pub fn column_sum_defect(&self) -> f64 {
        let last = self.up.len() - 1;
        (0..=last)
            .map(|n| {
                let mut sum = -(self.up[n] + self.down[n]);
                if n < last {
                    sum += self.up[n];
                }
                if n > 0 {
                    sum += self.down[n];
                }
                sum.abs()
            })
            .fold(0.0, f64::max)
    }
}

/// Generator with bath exchange and the atom loss channel at rate
/// `params.atom_rate` and phase `params.phase`.
pub fn build_generator(
    params: &PhysicalParams,
    rates: DerivedRates,
    n_max: usize,
) -> Result<BirthDeathGenerator> {
    params.validate()?;
    BirthDeathGenerator::with_atoms(rates, params.atom_rate, params.phase, n_max)
}

/// Stationary distribution in closed form:
///
/// `p(n) = p(0) ∏_{m=1}^{n} 4γn̄m / [r sin²(2φ√m) + 4γ(n̄+1)m]`,
///
/// accumulated in log space and normalized over the truncated basis. Fails
/// with a truncation error when `p(n_max)` exceeds the default tolerance.
pub fn steady_state_analytic(gen: &BirthDeathGenerator) -> Result<PhotonDistribution> {
    steady_state_with_tolerance(gen, DEFAULT_TAIL_TOLERANCE)
}

pub fn steady_state_with_tolerance(
    gen: &BirthDeathGenerator,
    tail_tolerance: f64,
) -> Result<PhotonDistribution> {
    let n_max = gen.n_max();
    let DerivedRates { gamma, nbar } = gen.rates;
    if nbar == 0.0 {
        return Ok(PhotonDistribution::vacuum(n_max));
    }
    let r = gen.atom_rate;
    let phi = gen.phase;
    let mut log_p = Vec::with_capacity(n_max + 1);
    let mut acc = 0.0;
    log_p.push(acc);
    for m in 1..=n_max {
        let mf = m as f64;
        let s = (2.0 * phi * mf.sqrt()).sin();
        let atoms = if r > 0.0 { r * s * s } else { 0.0 };
        let factor = 4.0 * gamma * nbar * mf / (atoms + 4.0 * gamma * (nbar + 1.0) * mf);
        acc += factor.ln();
        log_p.push(acc);
    }
    let peak = log_p.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let probs = log_p.into_iter().map(|l| (l - peak).exp()).collect();
    let p = PhotonDistribution::normalize(probs)?;
    p.check_tail(tail_tolerance)?;
    Ok(p)
}

/// Scratch space for the RK4 stepper.
#[derive(Debug, Clone, Default)]
pub(crate) struct Rk4Scratch {
    k1: Vec<f64>,
    k2: Vec<f64>,
    k3: Vec<f64>,
    k4: Vec<f64>,
    tmp: Vec<f64>,
}

impl Rk4Scratch {
    fn resize(&mut self, len: usize) {
        for buf in [
            &mut self.k1,
            &mut self.k2,
            &mut self.k3,
            &mut self.k4,
            &mut self.tmp,
        ] {
            buf.resize(len, 0.0);
        }
    }
}

/// Number of RK4 steps [`evolve`] uses for `duration`.
pub fn default_step_count(gen: &BirthDeathGenerator, duration: f64) -> u64 {
    let max_rate = gen.max_exit_rate();
    if duration <= 0.0 || max_rate == 0.0 {
        return 1;
    }
    ((duration * max_rate / STEP_SAFETY).ceil() as u64).max(1)
}

/// Integrates `dp/dt = G·p` over `duration` seconds with fixed-step RK4,
/// `dt ≤ 0.1 / max exit rate`.
pub fn evolve(
    p0: &PhotonDistribution,
    gen: &BirthDeathGenerator,
    duration: f64,
) -> Result<PhotonDistribution> {
    evolve_steps(p0, gen, duration, default_step_count(gen, duration))
}

/// As [`evolve`], with an explicit number of equal steps.
pub fn evolve_steps(
    p0: &PhotonDistribution,
    gen: &BirthDeathGenerator,
    duration: f64,
    steps: u64,
) -> Result<PhotonDistribution> {
    let mut scratch = Rk4Scratch::default();
    evolve_with_scratch(p0, gen, duration, steps, &mut scratch)
}

pub(crate) fn evolve_with_scratch(
    p0: &PhotonDistribution,
    gen: &BirthDeathGenerator,
    duration: f64,
    steps: u64,
    scratch: &mut Rk4Scratch,
) -> Result<PhotonDistribution> {
    if !(duration.is_finite() && duration >= 0.0) {
        return Err(Error::Domain {
            name: "duration",
            value: duration,
            reason: "must be finite and >= 0",
        });
    }
    if p0.len() != gen.up.len() {
        return Err(Error::DimensionMismatch {
            expected: gen.up.len(),
            actual: p0.len(),
        });
    }
    if duration == 0.0 {
        return Ok(p0.clone());
    }
    if steps == 0 || steps > MAX_STEPS {
        return Err(Error::Integration {
            time: 0.0,
            reason: format!("step count {steps} outside 1..={MAX_STEPS}"),
        });
    }
    let dt = duration / steps as f64;
    if dt <= 0.0 || !dt.is_normal() {
        return Err(Error::Integration {
            time: 0.0,
            reason: format!("step size {dt:e} underflowed"),
        });
    }

    let mut state = p0.probs().to_vec();
    scratch.resize(state.len());
    for step in 0..steps {
        rk4_step(gen, &mut state, dt, scratch);
        if !state.iter().all(|v| v.is_finite()) {
            return Err(Error::Integration {
                time: (step + 1) as f64 * dt,
                reason: "non-finite probability".into(),
            });
        }
    }

    let sum: f64 = state.iter().sum();
    if (sum - 1.0).abs() > NORMALIZATION_TOLERANCE {
        return Err(Error::Integration {
            time: duration,
            reason: format!("normalization drifted to {sum}"),
        });
    }
    let p = PhotonDistribution::normalize(state).map_err(|err| Error::Integration {
        time: duration,
        reason: err.to_string(),
    })?;
    p.check_tail(DEFAULT_TAIL_TOLERANCE)?;
    Ok(p)
}

fn rk4_step(gen: &BirthDeathGenerator, state: &mut [f64], dt: f64, s: &mut Rk4Scratch) {
    let half = 0.5 * dt;
    gen.apply(state, &mut s.k1);
    for ((t, &x), &k) in s.tmp.iter_mut().zip(state.iter()).zip(&s.k1) {
        *t = x + half * k;
    }
    gen.apply(&s.tmp, &mut s.k2);
    for ((t, &x), &k) in s.tmp.iter_mut().zip(state.iter()).zip(&s.k2) {
        *t = x + half * k;
    }
    gen.apply(&s.tmp, &mut s.k3);
    for ((t, &x), &k) in s.tmp.iter_mut().zip(state.iter()).zip(&s.k3) {
        *t = x + dt * k;
    }
    gen.apply(&s.tmp, &mut s.k4);
    let sixth = dt / 6.0;
    for (n, x) in state.iter_mut().enumerate() {
        *x += sixth * (s.k1[n] + 2.0 * s.k2[n] + 2.0 * s.k3[n] + s.k4[n]);
    }
}
