//! Physical parameters, derived cavity rates and single-atom passage weights.
//!
//! All user-facing frequencies are in Hz (cycles per second). The angular
//! frequency `ω = 2πf` only appears internally.

use crate::error::{ensure_finite, ensure_non_negative, ensure_positive, Result};

/// Physical constants (CODATA 2018, exact in the revised SI).
pub mod constants {
    /// Planck constant `h` in J·s.
    pub const PLANCK: f64 = 6.626_070_15e-34;
    /// Reduced Planck constant `ħ = h / 2π` in J·s.
    pub const HBAR: f64 = PLANCK / (2.0 * std::f64::consts::PI);
    /// Boltzmann constant `k_B` in J/K.
    pub const BOLTZMANN: f64 = 1.380_649e-23;

    /// Cavity mode frequency of the 61D5/2 → 63P3/2 transition, Hz.
    pub const CAVITY_FREQUENCY_HZ: f64 = 21.456e9;
    /// Loaded quality factor of the niobium toroidal cavity.
    pub const CAVITY_Q_FACTOR: f64 = 2.0e9;
    /// Cryostat temperature, K.
    pub const BATH_TEMPERATURE_K: f64 = 1.4;
    /// Atom injection rate, s⁻¹.
    pub const ATOM_RATE: f64 = 3000.0;
}

/// Control parameters of the detector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    /// Cavity mode frequency `f` in Hz.
    pub frequency: f64,
    /// Quality factor `Q`.
    pub q_factor: f64,
    /// Bath temperature in kelvin.
    pub temperature: f64,
    /// Atom injection rate `r` in s⁻¹.
    pub atom_rate: f64,
    /// Rabi phase `φ` in radians. Not clamped; the sweep goes well past π/2.
    pub phase: f64,
}

impl PhysicalParams {
    pub fn new(
        frequency: f64,
        q_factor: f64,
        temperature: f64,
        atom_rate: f64,
        phase: f64,
    ) -> Result<Self> {
        let params = Self {
            frequency,
            q_factor,
            temperature,
            atom_rate,
            phase,
        };
        params.validate()?;
        Ok(params)
    }

    /// The experimental operating point: 21.456 GHz, Q = 2×10⁹, 1.4 K,
    /// 3000 atoms per second.
    pub fn experimental(phase: f64) -> Self {
        Self {
            frequency: constants::CAVITY_FREQUENCY_HZ,
            q_factor: constants::CAVITY_Q_FACTOR,
            temperature: constants::BATH_TEMPERATURE_K,
            atom_rate: constants::ATOM_RATE,
            phase,
        }
    }

    pub fn validate(&self) -> Result<()> {
        ensure_positive("frequency", self.frequency)?;
        ensure_positive("q_factor", self.q_factor)?;
        ensure_non_negative("temperature", self.temperature)?;
        ensure_non_negative("atom_rate", self.atom_rate)?;
        ensure_non_negative("phase", self.phase)?;
        Ok(())
    }

    pub fn with_phase(self, phase: f64) -> Self {
        Self { phase, ..self }
    }

    pub fn derived_rates(&self) -> Result<DerivedRates> {
        self.validate()?;
        Ok(DerivedRates {
            gamma: cavity_decay_rate(self.frequency, self.q_factor)?,
            nbar: thermal_occupation(self.frequency, self.temperature)?,
        })
    }
}

impl Default for PhysicalParams {
    fn default() -> Self {
        Self::experimental(std::f64::consts::FRAC_PI_2)
    }
}

/// Atom transit geometry; the Rabi phase is `ḡ·L/v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InteractionGeometry {
    /// Effective Rabi frequency `ḡ` in rad/s.
    pub rabi_frequency: f64,
    /// Interaction length in metres.
    pub length: f64,
    /// Atom velocity in m/s.
    pub velocity: f64,
}

impl InteractionGeometry {
    pub fn new(rabi_frequency: f64, length: f64, velocity: f64) -> Result<Self> {
        let geometry = Self {
            rabi_frequency,
            length,
            velocity,
        };
        geometry.validate()?;
        Ok(geometry)
    }

    pub fn validate(&self) -> Result<()> {
        ensure_positive("rabi_frequency", self.rabi_frequency)?;
        ensure_positive("length", self.length)?;
        ensure_positive("velocity", self.velocity)
    }
}

/// Cavity decay rate and thermal photon number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedRates {
    /// Energy decay rate `γ = ω / (2πQ) = f / Q` in s⁻¹.
    pub gamma: f64,
    /// Mean thermal photon number `n̄`.
    pub nbar: f64,
}

impl DerivedRates {
    pub fn new(gamma: f64, nbar: f64) -> Result<Self> {
        ensure_positive("gamma", gamma)?;
        ensure_non_negative("nbar", nbar)?;
        Ok(Self { gamma, nbar })
    }
}

/// Bose–Einstein occupation `[exp(hf/kT) − 1]⁻¹`; exactly zero at `T = 0`.
pub fn thermal_occupation(frequency: f64, temperature: f64) -> Result<f64> {
    ensure_positive("frequency", frequency)?;
    ensure_non_negative("temperature", temperature)?;
    if temperature == 0.0 {
        return Ok(0.0);
    }
    let x = constants::PLANCK * frequency / (constants::BOLTZMANN * temperature);
    Ok(1.0 / x.exp_m1())
}

/// `γ = ω / (2πQ)`, which with `ω = 2πf` is just `f / Q`.
pub fn cavity_decay_rate(frequency: f64, q_factor: f64) -> Result<f64> {
    ensure_positive("frequency", frequency)?;
    ensure_positive("q_factor", q_factor)?;
    Ok(frequency / q_factor)
}

pub fn rabi_phase(geometry: &InteractionGeometry) -> Result<f64> {
    geometry.validate()?;
    Ok(geometry.rabi_frequency * geometry.length / geometry.velocity)
}

/// Detected state of an atom after its passage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Outcome {
    /// Auxiliary level: the atom saw an empty cavity and was transferred by
    /// the central field.
    Auxiliary,
    /// Ground level: the photon was absorbed and re-emitted.
    Ground,
    /// Excited level: the photon was absorbed and carried away.
    Excited,
}

impl Outcome {
    pub const ALL: [Outcome; 3] = [Outcome::Auxiliary, Outcome::Ground, Outcome::Excited];

    /// Level label used in messages: `f`, `g` or `e`.
    pub fn label(self) -> &'static str {
        match self {
            Outcome::Auxiliary => "f",
            Outcome::Ground => "g",
            Outcome::Excited => "e",
        }
    }

    /// Photons removed from the cavity by this outcome.
    pub fn photons_removed(self) -> usize {
        match self {
            Outcome::Excited => 1,
            Outcome::Auxiliary | Outcome::Ground => 0,
        }
    }
}

/// Detection probabilities of one atom for a cavity holding `n` photons.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutcomeWeights {
    pub w_f: f64,
    pub w_g: f64,
    pub w_e: f64,
}

impl OutcomeWeights {
    pub fn get(&self, outcome: Outcome) -> f64 {
        match outcome {
            Outcome::Auxiliary => self.w_f,
            Outcome::Ground => self.w_g,
            Outcome::Excited => self.w_e,
        }
    }

    pub fn total(&self) -> f64 {
        self.w_f + self.w_g + self.w_e
    }
}

/// Weights of the three branches of the ideal three-stage passage:
/// `cos²(φ√n)`, `sin⁴(φ√n)` and `¼ sin²(2φ√n)`.
pub fn passage_weights(n: usize, phase: f64) -> OutcomeWeights {
    let x = phase * (n as f64).sqrt();
    let (s, c) = x.sin_cos();
    OutcomeWeights {
        w_f: c * c,
        w_g: s * s * s * s,
        w_e: absorption_weight(n, phase),
    }
}

/// Probability `¼ sin²(2φ√n)` that the atom leaves excited, taking one photon.
pub fn absorption_weight(n: usize, phase: f64) -> f64 {
    let s = (2.0 * phase * (n as f64).sqrt()).sin();
    0.25 * s * s
}

pub(crate) fn check_phase(phase: f64) -> Result<()> {
    ensure_finite("phase", phase)
}
