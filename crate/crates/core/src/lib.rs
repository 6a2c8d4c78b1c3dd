//! Exact semilinear algebra over Breuil-Kisin type rings: Witt coefficient
//! rings, truncated power series and divided-power rings, finite
//! Frobenius modules, and the decompositions and structure checks built on
//! them.

pub mod breuil;
pub mod cyclo;
pub mod decomposition;
pub mod dp;
pub mod error;
pub mod etale;
pub mod fl;
pub mod fmod;
pub mod linalg;
pub mod phi_modules;
pub mod s1;
pub mod series;
pub mod suites;
pub mod trunc;
pub mod witt;
pub mod zpn;

pub use error::{Error, Result};
