//! Characteristic-function tools for macroscopic superpositions probed by
//! qubit Ramsey interferometry: state models, measurement simulation,
//! nonclassicality and entanglement criteria built from displacement moments,
//! and a truncated Fock-space oracle for cross-checking.

pub mod entanglement;
pub mod error;
pub mod linalg;
pub mod nonclassicality;
pub mod oracle;
pub mod ramsey;
pub mod schema;
pub mod special;
pub mod states;

pub use error::{Error, Result};
