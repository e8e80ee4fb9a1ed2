//! Low-lying zero statistics for families of automorphic L-functions.
//!
//! The crate computes weighted 1- and 2-level densities for the families
//! {φ×f} and {φ×sym²f}, where f runs over level-1 holomorphic Hecke
//! eigenforms of weight k and φ is a fixed even Hecke–Maass form, and
//! compares them with the random matrix predictions for the classical
//! compact groups.

pub mod density;
pub mod eigen;
pub mod error;
pub mod gammafactors;
pub mod hecke;
pub mod maass;
pub mod modular;
pub mod primes;
pub mod quad;
pub mod rmt;
pub mod satake;
pub mod testfns;

pub use error::{Error, Result};
