//! Steady-state photon statistics as a function of the Rabi phase.

use rayon::prelude::*;

use crate::distribution::{statistics, DEFAULT_TAIL_TOLERANCE};
use crate::error::{ensure_finite, Error, Result};
use crate::master_eq::{build_generator, steady_state_with_tolerance, DEFAULT_N_MAX};
use crate::physics::PhysicalParams;

pub const DEFAULT_PHI_MIN: f64 = 0.05;
pub const DEFAULT_PHI_MAX: f64 = 3.0;
pub const DEFAULT_STEPS: usize = 600;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseSweepSpec {
    /// The phase field is ignored; every grid point sets its own.
    pub params: PhysicalParams,
    pub phi_min: f64,
    pub phi_max: f64,
    pub steps: usize,
    pub n_max: usize,
}

impl PhaseSweepSpec {
    pub fn new(params: PhysicalParams) -> Self {
        Self {
            params,
            phi_min: DEFAULT_PHI_MIN,
            phi_max: DEFAULT_PHI_MAX,
            steps: DEFAULT_STEPS,
            n_max: DEFAULT_N_MAX,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.with_phase(self.phi_min.max(0.0)).validate()?;
        ensure_finite("phi_min", self.phi_min)?;
        ensure_finite("phi_max", self.phi_max)?;
        if self.phi_min < 0.0 || self.phi_min >= self.phi_max {
            return Err(Error::Config(format!(
                "need 0 <= phi_min < phi_max, got [{}, {}]",
                self.phi_min, self.phi_max
            )));
        }
        if self.steps < 2 {
            return Err(Error::Config(format!("steps must be >= 2, got {}", self.steps)));
        }
        Ok(())
    }

    /// Grid point `i` of `steps` evenly spaced phases, both ends included.
    pub fn phi(&self, i: usize) -> f64 {
        if i + 1 == self.steps {
            return self.phi_max;
        }
        let span = self.phi_max - self.phi_min;
        self.phi_min + span * i as f64 / (self.steps - 1) as f64
    }

    pub fn grid_step(&self) -> f64 {
        (self.phi_max - self.phi_min) / (self.steps - 1) as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub phi: f64,
    pub mean_n: f64,
    /// `None` marks the vacuum limit where the Fano factor is undefined.
    pub fano: Option<f64>,
    pub tail_mass: f64,
}

/// Evaluates the stationary state at one phase.
pub fn sweep_point(spec: &PhaseSweepSpec, phi: f64) -> Result<SweepRow> {
    let params = spec.params.with_phase(phi);
    let rates = params.derived_rates()?;
    let gen = build_generator(&params, rates, spec.n_max)?;
    let p = steady_state_with_tolerance(&gen, DEFAULT_TAIL_TOLERANCE)?;
    let stats = statistics(&p);
    Ok(SweepRow {
        phi,
        mean_n: stats.mean_n,
        fano: stats.fano,
        tail_mass: p.tail_mass(),
    })
}

/// Rows in ascending phase. Grid points are evaluated in parallel; each is
/// a pure function of its phase, so the output does not depend on the
/// thread count.
pub fn run_sweep(spec: &PhaseSweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    (0..spec.steps)
        .into_par_iter()
        .map(|i| point_or_error(spec, i))
        .collect()
}

/// Single-threaded [`run_sweep`].
pub fn run_sweep_sequential(spec: &PhaseSweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    (0..spec.steps).map(|i| point_or_error(spec, i)).collect()
}

fn point_or_error(spec: &PhaseSweepSpec, i: usize) -> Result<SweepRow> {
    let phi = spec.phi(i);
    sweep_point(spec, phi).map_err(|source| Error::SweepPoint {
        phi,
        source: Box::new(source),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtremumKind {
    Min,
    Max,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum {
    pub phi: f64,
    pub kind: ExtremumKind,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Extrema {
    pub points: Vec<Extremum>,
    /// Set when fewer than three rows carry a defined Fano factor.
    pub insufficient_data: bool,
}

impl Extrema {
    pub fn maxima(&self) -> impl Iterator<Item = &Extremum> {
        self.points.iter().filter(|e| e.kind == ExtremumKind::Max)
    }

    pub fn minima(&self) -> impl Iterator<Item = &Extremum> {
        self.points.iter().filter(|e| e.kind == ExtremumKind::Min)
    }
}

/// Interior local extrema of the Fano column. Rows with an undefined Fano
/// factor are skipped. A flat run of equal values counts as one extremum,
/// reported at its smallest phase, when both neighbours of the run lie on
/// the same side.
pub fn find_local_extrema(rows: &[SweepRow]) -> Extrema {
    let points: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|r| r.fano.map(|f| (r.phi, f)))
        .collect();
    if points.len() < 3 {
        return Extrema {
            points: Vec::new(),
            insufficient_data: true,
        };
    }

    let mut out = Vec::new();
    let mut i = 1;
    while i + 1 < points.len() {
        let value = points[i].1;
        let before = points[i - 1].1;
        let mut j = i;
        while j + 1 < points.len() && points[j + 1].1 == value {
            j += 1;
        }
        if j + 1 == points.len() {
            break;
        }
        let after = points[j + 1].1;
        let kind = if value > before && value > after {
            Some(ExtremumKind::Max)
        } else if value < before && value < after {
            Some(ExtremumKind::Min)
        } else {
            None
        };
        if let Some(kind) = kind {
            out.push(Extremum {
                phi: points[i].0,
                kind,
                value,
            });
        }
        i = j + 1;
    }
    Extrema {
        points: out,
        insufficient_data: false,
    }
}
