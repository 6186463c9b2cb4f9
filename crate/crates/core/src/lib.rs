//! Factorization invariants of quadratic orders `Z + f*O_K`.
//!
//! The crate computes class groups (order, structure and the kernel of the
//! extension map to the maximal order), Davenport constants, and the elasticity of
//! orders whose conductor is a prime ideal of the maximal order. A brute-force
//! factorization oracle ([`factorlab`]) checks the results on imaginary orders.

pub mod abelian;
pub mod arith;
pub mod budget;
pub mod classgroup;
pub mod elasticity;
pub mod error;
pub mod factorlab;
pub mod order;
pub mod quadfield;
pub mod report;

pub use budget::Budget;
pub use error::{Error, Result};
