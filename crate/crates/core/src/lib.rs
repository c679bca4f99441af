//! Reconstructed discontinuous Galerkin schemes for scalar conservation laws
//! in one space dimension.
//!
//! A `PNPM` scheme evolves piecewise polynomials of degree `N` (the
//! [`ModalField`]) but evaluates every flux on a reconstructed piecewise
//! polynomial of degree `M >= N` (the [`ReconField`]) obtained from the
//! three-cell central stencil. `N = M` is the classical DG method, `N = 0`
//! a high order finite volume method.
//!
//! The reconstruction breaks the square-entropy (L2) stability that pure DG
//! enjoys. The [`scheme`] module restores it with an interface flux limiter
//! that enforces a discrete cell entropy inequality, plus an in-cell fallback
//! for the rare cells where the interface limiter alone cannot.
//!
//! Module map:
//!
//! - [`basis`]: Legendre polynomials, Gauss quadrature, uniform grids
//! - [`reconstruction`]: the stencil operator and its invertibility analysis
//! - [`physics`]: flux models, entropy pairs and numerical fluxes
//! - [`scheme`]: semi-discrete right-hand side, limiter, time stepping
//! - [`diagnostics`]: error norms, convergence tables, entropy series

pub mod basis;
pub mod diagnostics;
pub mod error;
pub mod physics;
pub mod reconstruction;
pub mod scheme;

pub use basis::{Boundary, GaussLegendre, Grid, ReferenceBasis};
pub use error::{Error, Result};
pub use physics::{FluxModel, NumericalFlux};
pub use reconstruction::{ModalField, ReconField, ReconOperator};
pub use scheme::{EntropyBudget, Integrator, Scheme, SchemeConfig, Simulation};
