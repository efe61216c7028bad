//! Sequential implementation of qubit isometries.
//!
//! Given an M→N isometry `U`, this crate decides whether `U` can be carried
//! out by a single ancilla that interacts once with each qubit of the chain,
//! in order and without measurements. When it can, it builds the step
//! unitaries using the smallest possible ancilla, which is the largest bond
//! dimension of the canonical matrix-product form of `U`. Plans are checked
//! by direct state-vector simulation.
//!
//! ```
//! use seqfactory::{oplib, sequencer::{build_plan, verify_plan, Tolerances}};
//!
//! let shor = oplib::shor_encoder();
//! let plan = build_plan(&shor, &Tolerances::default()).unwrap();
//! assert_eq!(plan.ancilla_dim(), 4);
//! assert!(verify_plan(&plan, &shor).unwrap().max_error < 1e-9);
//! ```

// negated float comparisons are deliberate: they also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod linalg;
pub mod mps;
pub mod oplib;
pub mod sequencer;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, C64};
pub use oplib::Isometry;
pub use sequencer::{SequentialPlan, SequentialityReport, Tolerances};
