//! Mirror stabilizer codes: a quantum LDPC code family parameterized by a
//! finite group `G` and two subsets `A, B ⊆ G`.
//!
//! Each group element labels one data qubit and one stabilizer. The stabilizer
//! labeled `g` places `Z` on the translate `Ag` and `X` on `Bg⁻¹` (symmetric
//! form) or `g⁻¹B` (asymmetric form); overlaps become `Y`. This crate covers
//! the combinatorial side of working with these codes:
//!
//! - [`groups`]: finite group arithmetic, Cayley-table validation, subsets,
//!   centers, normality, and abelian automorphism enumeration.
//! - [`mirror`]: building stabilizer tableaux from `(G, A, B)`, deciding
//!   validity, sufficiency shortcuts, bad-parameter prefilters, and the
//!   group-algebra cross-check.
//! - [`codeparams`]: bit-packed GF(2)/symplectic linear algebra, logical
//!   dimension, exact (meet-in-the-middle) and estimated distance, weight
//!   enumerators.
//! - [`cssform`]: deciding CSS-equivalence (general local-Clifford
//!   2-colouring, Hadamard-only coset graphs, abelian fast path) and gauge
//!   transformations.
//! - [`canon`]: canonical forms and gauge-orbit equivalence for abelian
//!   specs.
//! - [`search`]: the symmetry-pruned exhaustive enumeration engine.
//! - [`catalog`]: the persistent JSON-lines code catalog.

pub mod bits;
pub mod canon;
pub mod catalog;
pub mod codeparams;
pub mod cssform;
pub mod groups;
pub mod mirror;
pub mod pauli;
pub mod search;

pub use groups::{GroupElement, GroupSpec, Subset};
pub use mirror::{MirrorSpec, StabilizerTableau, Variant};
pub use pauli::PauliString;
