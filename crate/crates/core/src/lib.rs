//! Numerical mixed Hodge theory: Deligne bigradings and splittings, heights of
//! framed mixed Hodge structures, and the polylogarithm structure `H(z)`.

// Index loops read better than iterator chains in the matrix code.
#![allow(clippy::needless_range_loop)]

pub mod deligne;
pub mod framed;
pub mod io;
pub mod linalg;
pub mod mhs;
pub mod polylog;
pub mod rational;
