//! q-Euler numbers and polynomials, fermionic p-adic Riemann sums, Dirichlet
//! characters and p-adic q-L-values, together with an engine that checks the
//! congruences relating them.

pub mod arith;
pub mod chars;
pub mod cli;
pub mod error;
pub mod lfunc;
pub mod padic;
pub mod qnum;
pub mod verify;

pub use error::{Error, Result};
