//! Quaternion arithmetic, hermitian quaternionic operators and the solvers
//! built on their real representation.

pub mod dense;
pub mod eigen;
mod operator;
mod quaternion;
pub mod sparse;

pub use eigen::{low_spectrum, smallest_eigenpair, EigenOptions, Eigenpair};
pub use operator::{QuatSparseOperator, QuatVector};
pub use quaternion::{quat_mul, to_real_block, Quaternion};
