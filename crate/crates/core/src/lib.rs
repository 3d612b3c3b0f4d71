//! Eisenstein–Kronecker–Lerch series, Weierstrass theta functions and the
//! Kronecker limit formulas over a complex lattice, with a p-adic
//! formal-series layer.

pub mod eklerch;
pub mod error;
pub mod lattice;
pub mod numeric;
pub mod padic;
pub mod report;
pub mod verify;
pub mod weierstrass;

pub use error::{Error, Result};
pub use lattice::Lattice;
pub use numeric::{ComplexValue, PrecisionConfig};
