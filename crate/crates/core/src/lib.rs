//! Quantum Fisher information of states evolved under non-Hermitian
//! Hamiltonians.

pub mod bosonic;
pub mod error;
pub mod evolution;
pub mod linalg;
pub mod measurement;
pub mod pt;
pub mod qfi;
pub mod search;
pub mod sweep;
pub mod validate;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, ComplexVector, C64};
