//! Subhyperbolic metrics on planar domains.
//!
//! The library computes curve lengths weighted by powers of the boundary
//! distance, approximates the induced path metric d_{α,Ω} on grid graphs,
//! certifies α-subhyperbolicity by adversarial pair sampling, and carries the
//! certification through to Sobolev extension verdicts. Supporting machinery
//! includes m-adic Cantor decompositions of weight traces, Whitney-style cube
//! chains along curves, and sharp maximal functions with local polynomial
//! approximation.

pub mod catalog;
pub mod certify;
pub mod chains;
pub mod cli;
pub mod error;
pub mod geometry;
pub mod metric;
pub mod pool;
pub mod report;
pub mod selfimprove;
pub mod sharpmax;

pub use error::{Error, Result};
pub use geometry::{Cube, DistanceField, Norm, PlanarDomain, Point};
