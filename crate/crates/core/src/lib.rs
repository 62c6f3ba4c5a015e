//! A workbench for generalized tilings.
//!
//! The crate models finite patterns over integer lattices, tile sets given
//! by forbidden patterns, and a small algebra of subshift-building
//! operations (product, finite type, factor, sub-action, superposition)
//! with a sound finite-window semantics. On top of that sit exact 1D
//! language machinery via labeled graphs, substitution tilings with a
//! rectangle framework, and Turing machines compiled to forbidden-pattern
//! sets, including semi-oracle machines and the four-dimensional simulation
//! term that ties machine domains to subshift languages.

pub mod alphabet;
pub mod error;
pub mod geom;
pub mod onedim;
pub mod pattern;
pub mod solver;
pub mod substitution;
pub mod term;
pub mod tileset;
pub mod turing;

pub use alphabet::{Alphabet, Symbol};
pub use error::{Error, Result};
pub use geom::{BoxRegion, Point};
pub use pattern::{Pattern, PatternSet};
pub use tileset::TileSet;
