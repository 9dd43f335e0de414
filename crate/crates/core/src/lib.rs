//! Exact computation of noncommutative Donaldson-Thomas partition functions
//! for quiver potentials coming from brane tilings.
//!
//! The pipeline: a [`model::TilingSpec`] (quiver on the torus with shifts) is
//! validated and given its weight lattice; perfect matchings certify
//! non-degeneracy and R-charges; a windowed universal cover carries the path
//! poset, whose finite order ideals are enumerated into partition functions;
//! the dimer module recomputes the same series from perfect matchings of the
//! periodic tiling; and the series module provides the plethystic logarithm
//! used to test rationality.

pub mod cli;
pub mod cover;
pub mod dimer;
pub mod error;
pub mod ideals;
pub mod lp;
pub mod matching;
pub mod model;
pub mod series;
pub mod verify;

pub use error::{Error, Result};
