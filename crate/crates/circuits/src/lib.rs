//! Syndrome-extraction circuits for stabilizer codes: five gadget styles
//! with different fault-tolerance/overhead trade-offs, deterministic
//! scheduling into parallel ticks, circuit-level fault enumeration with
//! frame propagation, and exhaustive fault-tolerance probes.

pub mod circuit;
pub mod gadgets;
pub mod memory;
pub mod noise;
pub mod probe;
pub mod chp;
pub mod schedule;

pub use circuit::{Basis, Circuit, Gate1Kind, Gate2Kind, Instruction};
pub use gadgets::SecStyle;
pub use memory::{build_sec_circuit, SecCircuitError};
pub use noise::{enumerate_faults, FaultChannel, FaultKind, NoiseModel};
