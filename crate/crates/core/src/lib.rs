//! Empirical-measure distances on symbolic blocks, greedy decompositions of
//! sequences into blocks near ergodic measures, Banach density estimates, and
//! the two-dimensional analogues on nested grid tilings of the plane.

pub mod acceptance;
mod error;
pub mod core1d;
pub mod decompose;
pub mod density;
pub mod generators;
pub mod grid2d;
pub mod metric;
pub mod rational;
pub mod reference;
pub mod region;

pub use core1d::{concat, frequency, profile, Alphabet, Block, FrequencyProfile};
pub use error::{Error, Result};
pub use metric::{d_star, DistanceBound, MeasureSpec};
pub use region::Region;
pub use rational::Rational;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
