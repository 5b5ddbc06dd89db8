//! Boundary-driven symmetric exclusion on Sierpinski gasket graphs.
//!
//! The crate covers the level-`N` graphs and their measure ([`gasket`]),
//! discrete analysis on them ([`calculus`]), boundary-conditioned spectra and
//! heat semigroups ([`spectral`]), the limiting heat equations ([`pde`]),
//! exact simulation and small-system oracles for the particle system
//! ([`sim`]) and equilibrium fluctuation diagnostics ([`fluct`]).
//!
//! Numerical code is generic over the scalar type. The calculus layer needs
//! only field arithmetic ([`scalar::Arith`]) and so also runs on exact
//! rationals; spectral, PDE and simulation code needs [`scalar::Real`]
//! (`f32` or `f64`). Aliases for the common `f64` instantiations are below.
//!
//! ```
//! use gasket_hydro::{calculus, Field, GasketGraph};
//!
//! let g = GasketGraph::build(3).unwrap();
//! let h: Field<f64> = calculus::harmonic_extension(&g, [1.0, 0.0, 0.0]);
//! assert!((calculus::energy_quad(&g, &h).unwrap() - 2.0).abs() < 1e-12);
//! ```

pub mod calculus;
pub mod error;
pub mod field;
pub mod fluct;
pub mod gasket;
pub mod linalg;
pub mod pde;
pub mod scalar;
pub mod sim;
pub mod spectral;
pub mod stats;

pub use error::{Error, Result};
pub use field::Field;
pub use gasket::{Corner, GasketGraph, VertexId, Word};
pub use scalar::{Arith, Real};

pub type Field64 = Field<f64>;
pub type Field32 = Field<f32>;
pub type Spectrum64 = spectral::Spectrum<f64>;
pub type Spectrum32 = spectral::Spectrum<f32>;
pub type BoundaryCondition64 = spectral::BoundaryCondition<f64>;
pub type BoundarySpec64 = sim::BoundarySpec<f64>;
pub type HeatProblem64 = pde::HeatProblem<f64>;
pub type Engine64<'g> = sim::Engine<'g, f64>;
/// Exact rational scalar for the identity checks.
pub type Rational = num_rational::Ratio<i64>;
