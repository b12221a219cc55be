//! Random walks on the hyperbolic plane and on weighted free-group trees.
//!
//! The crate is layered bottom-up: [`hplane`] (isometries of the upper
//! half-plane), [`group`] (words, measures, representations), [`actions`]
//! (metric actions and their limits), [`walk`] (Monte Carlo and exact
//! estimators), [`schottky`] (ping-pong certificates) and [`experiment`]
//! (configuration files and reproducible named runs).

pub mod error;
pub mod group;
pub mod hplane;
pub mod actions;
pub mod schottky;
pub mod walk;
pub mod experiment;

pub use error::{Error, Result};
