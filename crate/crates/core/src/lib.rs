//! Numerical laboratory for slow p-Laplacian diffusion (p > 2) in tubular
//! domains: the renormalized flow, its cross-sectional stationary profile,
//! phase-plane wave analysis, travelling-wave construction, and front-law
//! diagnostics.

pub mod asymptotics;
pub mod eigen;
pub mod error;
pub mod grid;
pub mod io;
pub mod ode;
pub mod pde;
pub mod phaseplane;
pub mod plap;
pub mod rescale;
pub mod wavefront;

pub use error::{Error, Result};
pub use grid::{CrossSection, Params, ProfileField, TubeField, TubeGrid};
