//! Radial waves outside the unit ball in three dimensions with a Dirichlet
//! condition on the unit sphere.
//!
//! The exterior Dirichlet Laplacian is diagonalized by a sine transform in
//! `r − 1` (see [`transform`]), which makes linear wave propagation exact on
//! the grid. On top of this sit Littlewood-Paley calculus ([`calculus`]),
//! linear propagators and dispersive/Strichartz probes ([`propagator`]), a
//! split-step solver for the defocusing cubic wave equation ([`nlw`]) and the
//! Fourier-truncation experiment ([`ftm`]).
//!
//! Everything is generic over [`Real`] (`f32` or `f64`); the aliases at the
//! crate root fix `f64`.

// `!(x > 0)` style guards are how NaN inputs are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod calculus;
pub mod dst;
pub mod error;
pub mod ftm;
pub mod grid;
pub mod nlw;
pub mod profiles;
pub mod propagator;
pub mod quadrature;
pub mod scalar;
pub mod transform;

pub use calculus::{BlockKind, DyadicBlock, SmoothCutoff};
pub use error::{Error, Result};
pub use grid::{lq_norm, ComplexRadialField, RadialField, RadialGrid, SpectralField, Trajectory, WaveState};
pub use scalar::Real;
pub use transform::DistortedFourier;

/// `f64` grid.
pub type Grid = RadialGrid<f64>;
/// `f64` radial field.
pub type Field = RadialField<f64>;
/// `f64` complex radial field.
pub type ComplexField = ComplexRadialField<f64>;
/// `f64` spectral coefficients.
pub type Spectrum = SpectralField<f64>;
/// `f64` wave state.
pub type State = WaveState<f64>;
/// `f64` trajectory.
pub type Traj = Trajectory<f64>;
/// `f64` transform engine.
pub type Transform = DistortedFourier<f64>;

/// `f32` grid.
pub type Grid32 = RadialGrid<f32>;
/// `f32` radial field.
pub type Field32 = RadialField<f32>;
/// `f32` spectral coefficients.
pub type Spectrum32 = SpectralField<f32>;
/// `f32` wave state.
pub type State32 = WaveState<f32>;
