//! Exact query-complexity measures for explicit Boolean functions:
//! certificates, block sensitivity, fractional certificates via exact linear
//! programming, polynomial degrees, randomized verifiers, weighted Grover
//! simulation and set-design promise problems.

pub mod cube;
pub mod designs;
pub mod error;
pub mod fraccert;
pub mod function;
pub mod linalg;
pub mod lp;
pub mod measures;
pub mod poly;
pub mod quantum;
pub mod text;
pub mod verifiers;

pub use error::{Error, Result};
pub use function::{FunctionObject, InputPoint, Kind, Output};
