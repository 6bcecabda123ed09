//! Fisher-Yates permutation circuits.
//!
//! Builds the state-preparation and register-shuffle circuits that put a
//! permutation register (and optionally a data register) into the uniform
//! superposition over all permutations, simulates them on a dense
//! statevector, and evaluates closed-form qubit, gate and cycle counts
//! against the constructed gate lists.

pub mod bits;
pub mod builders;
pub mod circuit;
pub mod cost;
pub mod error;
pub mod json;
pub mod mcx;
pub mod permutation;
pub mod prep;
pub mod qasm;
pub mod resources;
pub mod simulator;
pub mod stats;
pub mod verify;

pub use builders::{build, BuildSpec, Variant};
pub use circuit::{Circuit, Control, Gate, Primitive, QubitRef};
pub use cost::{CostProfile, GateClass};
pub use error::{Error, Result};
pub use mcx::{LoweringLevel, McxMode};
pub use prep::Encoding;
