//! Command-line front end: configuration, batch orchestration, seeding,
//! report emission, and the end-to-end verification suites.

pub mod config;
pub mod io;
pub mod scene;
pub mod suites;
pub mod tasks;
