//! Covariant state-elimination measurements for qubit sequences.
//!
//! An elimination (exclusion) measurement tells you a state you were *not*
//! given. This crate constructs such measurements for families of qubit-
//! sequence states that form the orbit of a fiducial state under a unitary
//! representation of a finite group: the POVM elements are the orbit of a
//! single seed operator, so one orthogonality condition on the seed vector
//! eliminates every state in the family at once.
//!
//! The crate is organized around the pipeline
//!
//! ```text
//! group  ->  repr  ->  solvers  ->  povm  ->  entropy
//! ```
//!
//! * [`group`] — finite group algebra: cyclic groups, direct products, the
//!   dihedral group D3, subgroups and cosets.
//! * [`repr`] — unitary representations, character tables, and decomposition
//!   into irreducible blocks by character projection.
//! * [`solvers`] — closed-form and numerical seed-phase solvers for each
//!   supported scenario, including the inconclusive-outcome (failure) POVM
//!   and the n-qubit condition.
//! * [`povm`] — covariant POVM assembly, coset merging, verification, Born
//!   probabilities, and seeded multinomial sampling.
//! * [`entropy`] — von Neumann entropy, the Holevo feasibility constraint on
//!   set elimination, and minimum-mutual-information verification.
//!
//! Everything is immutable after construction and safe to share across
//! threads; all verification functions are pure.
//!
//! # Quick start
//!
//! ```
//! use qelim::povm::{born_probabilities, verify_elimination, verify_povm};
//! use qelim::solvers::two_qubit_scenario;
//!
//! // Eliminate one of the four states |±θ>|±θ> at θ = π/8.
//! let inst = two_qubit_scenario(std::f64::consts::PI / 8.0)?;
//! let povm = inst.build_povm()?;
//! assert_eq!(povm.len(), 4);
//! assert!(verify_povm(&povm).pass);
//! assert!(verify_elimination(&povm, &inst.scenario).pass);
//!
//! // The outcome labeled by a group element never fires on that
//! // element's state.
//! let g = inst.scenario.group().elements().nth(2).unwrap();
//! let probs = born_probabilities(&povm, &inst.scenario.state(g))?;
//! assert!(probs[2].abs() < 1e-12);
//! # Ok::<(), qelim::QelimError>(())
//! ```

pub mod entropy;
pub mod error;
pub mod group;
pub mod linalg;
pub mod povm;
pub mod repr;
pub mod solvers;
pub mod tol;

pub use error::{QelimError, Result};
