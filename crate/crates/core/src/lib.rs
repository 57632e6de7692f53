//! Vector partition functions, chamber quasi-polynomials and the eventual
//! piecewise quasi-polynomial structure of Betti numbers of ideal powers.

pub mod error;
pub mod exactlinalg;
pub mod chamber;
pub mod vpf;
pub mod quasipoly;
pub mod hilbert;
pub mod regions;
pub mod rees;

pub use error::{Error, Result};
