//! Numerical laboratory for mean curvature flow solitons: sampled
//! hypersurfaces, their curvature, Gaussian-weighted functionals, weighted
//! stability spectra and certificates for the integral and pointwise
//! curvature estimates satisfied by stable self-shrinkers and translators.

pub mod diffops;
pub mod error;
pub mod estimates;
pub mod gaussian;
pub mod geometry;
pub mod ode;
pub mod optimize;
pub mod report;
pub mod stability;
pub mod stencil;
pub mod surfaces;
pub mod translators;
pub mod vecops;

pub use error::{Error, Result};
