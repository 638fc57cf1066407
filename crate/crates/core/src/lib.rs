//! Semigroups of linear maps over GF(p) whose restriction to a fixed
//! subspace `U` is an automorphism of `U`.
//!
//! Matrices act on row vectors from the right, so `a * b` applies `a` first.
//!
//! ```
//! use lglu::Instance;
//!
//! let inst = Instance::new(2, 3, 1).unwrap();
//! assert_eq!(inst.order(), 64);
//! let e = inst.enumerate(4096).unwrap();
//! assert_eq!(e.minimal_idempotents_char().len(), 4);
//! ```

pub mod cli;
pub mod error;
pub mod gf;
pub mod iso;
pub mod lglu;
pub mod semigroup;

pub use error::{Error, Result};
pub use gf::{Field, Mat, Row, Subspace};
pub use iso::{decide_isomorphic, transport, IsoWitness};
pub use lglu::{Element, Enumerated, Instance, Relation, SubgroupKind};
pub use semigroup::{green_oracle, GreenPartitions, Partition, SemigroupTable};

#[cfg(doctest)]
#[doc = include_str!("../../../README.md")]
pub struct ReadmeDoctests;
