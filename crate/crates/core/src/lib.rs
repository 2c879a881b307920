//! Computational toolkit for two-sided square-function coefficients,
//! capacities, flatness numbers and the stopping-time Lipschitz graph
//! construction.

pub mod arcs;
pub mod capacity;
pub mod content;
pub mod coeffs;
pub mod corona;
pub mod cloud;
pub mod dini;
pub mod flatness;
pub mod fourier;
pub mod geom;
pub mod sphere;
pub mod whitney;
pub mod region;
pub mod rng;
pub mod scenes;
pub mod spectral;
