//! Lowest-order virtual element discretization of 3D linear magnetostatics
//! on general polyhedral meshes.
//!
//! The magnetic field `H` carries one degree of freedom per mesh edge (the
//! tangential moment), the Lagrange multiplier `p` one per vertex, and the
//! current density is interpolated through face normal fluxes. The three
//! discrete spaces form an exact sequence: the integer incidence operators
//! satisfy `C*G = 0` and `D*C = 0` on every valid mesh, which is what the
//! solver's structural checks lean on.
//!
//! Module map:
//! - [`mesh`]: oriented polyhedral complexes, generators, validation, i/o
//! - [`quadrature`]: exact polynomial integration over edges, faces, cells
//! - [`spaces`]: global DOF layouts and incidence operators
//! - [`projections`]: per-element L2 projections onto polynomials
//! - [`localforms`]: stabilized local scalar products
//! - [`system`]: interpolants, saddle-point assembly, linear solve
//! - [`verify`]: manufactured cases, error norms, convergence studies

pub mod localforms;
pub mod mesh;
pub mod projections;
pub mod quadrature;
pub mod sparse;
pub mod spaces;
pub mod system;
pub mod verify;

pub(crate) mod par;

pub use mesh::{PolyMesh, ValidationReport};
pub use spaces::DofLayout;
pub use system::{CaseSpec, SaddleSystem, SolveStats};
pub use verify::{ConvergenceReport, EnergyBreakdown};

/// Point/vector aliases used throughout.
pub type V3 = nalgebra::Vector3<f64>;
pub type M3 = nalgebra::Matrix3<f64>;
