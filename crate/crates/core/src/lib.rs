pub mod bounds;
pub mod cfr;
pub mod cli;
pub mod constructions;
pub mod error;
pub mod io;
pub mod sequence;
pub mod spectral;
pub mod tol;
