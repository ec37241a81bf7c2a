//! Axisymmetric, swirl-free incompressible Euler flow in dimension `d >= 3`.
//!
//! The library models velocity fields of the form `u = u_r e_r + u_z e_z` on
//! the half-plane `r > 0`, with scalar vorticity `omega = d(u_z)/dr -
//! d(u_r)/dz` and the transported ratio `eta = omega / r^(d-2)`. It provides
//!
//! * the closed-form and quadrature evaluations of the velocity
//!   reconstruction kernel, with its sharp elementary bounds
//!   ([`kernel`]);
//! * Lorentz-space diagnostics - quasinorms `L^{p,q}` against the measure
//!   `r^(d-2) dr dz`, weak-type norms, and the decay checks built from them
//!   ([`lorentz`]);
//! * velocity reconstruction from vorticity with a pointwise bound and the
//!   stretching-quotient diagnostics ([`biot_savart`]);
//! * a deterministic Lagrangian vorticity-transport simulator
//!   ([`simulator`]) and a reproducible corpus of compactly supported test
//!   flows ([`corpus`]).
//!
//! Grids, fields and the sample engine are generic over the scalar type
//! through the [`Real`] trait (defaulting to `f64`); the quadrature-backed
//! kernel and reconstruction paths are fixed to `f64`, where all quoted
//! accuracy targets hold.
//!
//! Determinism is part of the contract: reruns are bitwise identical
//! (including under rayon parallelism, which only ever splits over targets),
//! and mirror-symmetric input stays bitwise mirror-symmetric.

pub mod biot_savart;
pub mod corpus;
pub mod error;
pub mod fields;
pub mod grid;
pub mod io;
pub mod kernel;
pub mod lorentz;
pub mod quadrature;
pub mod scalar;
pub mod simulator;

pub use biot_savart::{
    analytic_bound_product, kernel_prefactor, stretching_ratio, velocity_bound_rhs,
    velocity_from_vorticity, ReconstructionJob, StretchingReport,
};
pub use corpus::{corpus_grid, generate_corpus, CorpusField, StreamBump};
pub use error::{Error, Result};
pub use fields::{
    curl_rz, cyl_divergence, gaussian_test_field, gaussian_test_vorticity, gaussian_velocity_at,
};
pub use grid::{make_uniform_grid, measure_weight, CylGrid, Dimension, ScalarField, VectorFieldRZ};
pub use io::{
    read_diagnostics, read_scalar_field, read_targets, write_diagnostics, write_particles,
    write_scalar_field, write_velocities,
};
pub use kernel::{g_kernel, h_closed, h_quad, h_upper_bound, tau_kernel, KernelParams, TauComponent};
pub use lorentz::{
    decay_hypothesis_check, distribution_function, holder_pairing, intersection_check,
    lorentz_quasinorm, weak_norm_of_g, weak_quasinorm, DecayReport, IntersectionLevel,
    IntersectionReport, LorentzExponents, MajorantNorm, WeightedSamples,
};
pub use scalar::Real;
pub use simulator::{
    induced_velocity, init_from_vorticity, particle_velocity, preset_initial_data, run, step_rk4,
    DiagnosticsRecord, ParticleSet, RunOutput, SimulationConfig,
};

/// Single-precision grid.
pub type Grid32 = CylGrid<f32>;
/// Double-precision grid, the workhorse type.
pub type Grid64 = CylGrid<f64>;
/// Single-precision scalar field.
pub type Field32 = ScalarField<f32>;
/// Double-precision scalar field.
pub type Field64 = ScalarField<f64>;
/// Single-precision velocity field.
pub type Velocity32 = VectorFieldRZ<f32>;
/// Double-precision velocity field.
pub type Velocity64 = VectorFieldRZ<f64>;
