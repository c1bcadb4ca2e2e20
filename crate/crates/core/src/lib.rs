//! Simulation of a quantum-nondemolition photon-number detector: a
//! microwave cavity crossed one by one by ground-state Rydberg atoms.
//!
//! * [`physics`] holds the parameters, derived cavity rates and the
//!   single-atom passage weights.
//! * [`master_eq`] builds the birth–death master equation of the photon
//!   number, its closed-form steady state and an RK4 integrator.
//! * [`sweep`] evaluates the steady state over a grid of Rabi phases.
//! * [`trajectory`] generates seeded Monte-Carlo measurement records with an
//!   observer-side Bayesian filter.
//! * [`report`] writes the CSV files.

pub mod distribution;
pub mod error;
pub mod master_eq;
pub mod physics;
pub mod report;
pub mod sweep;
pub mod trajectory;

pub use distribution::{statistics, FieldStatistics, PhotonDistribution};
pub use error::{Error, Result};
pub use master_eq::{
    apply_atom_map, build_generator, evolve, evolve_steps, steady_state_analytic,
    BirthDeathGenerator, DEFAULT_N_MAX,
};
pub use physics::{
    cavity_decay_rate, passage_weights, rabi_phase, thermal_occupation, DerivedRates,
    InteractionGeometry, Outcome, OutcomeWeights, PhysicalParams,
};
pub use sweep::{find_local_extrema, run_sweep, PhaseSweepSpec, SweepRow};
pub use trajectory::{
    filter_correct, filter_predict, sample_atom_outcome, simulate, simulate_observed, step_hidden,
    ArrivalModel, FilterState, TrajectoryConfig, TrajectoryRecord,
};
