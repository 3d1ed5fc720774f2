//! Energy-based discontinuous Galerkin discretization of coupled
//! acoustic-elastic wave propagation in two dimensions.
//!
//! The fluid is described by a velocity potential `psi` and its time
//! derivative `p`; the solid by displacement `u` and velocity `v`. Elements
//! are quadrilaterals with analytic maps, fields are expanded in tensor
//! Legendre polynomials, and the two media are coupled through single-valued
//! interface fluxes.
//!
//! All numerical kernels are generic over [`Real`] (`f32` or `f64`); the
//! aliases at the crate root fix the scalar to `f64`.

pub mod scalar;
pub mod error;
pub mod linalg;
pub mod basis;
pub mod mesh;
pub mod modal;
pub mod fluxes;
pub mod acoustic;
pub mod elastic;
pub mod analytic;
pub mod timestep;
pub mod solver;
pub mod inversion;
pub mod harness;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Mesh = mesh::Mesh<f64>;
pub type Solver = solver::Solver<f64>;
pub type FluxParams = fluxes::FluxParams<f64>;
