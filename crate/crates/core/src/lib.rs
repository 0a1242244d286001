//! Exact decision procedures for social welfare relations on worlds over a
//! countably infinite population, with an axiom harness and checkable
//! refutation certificates.

pub mod axioms;
pub mod criteria;
pub mod density;
pub mod error;
pub mod exactnum;
pub mod gen;
pub mod oracle;
pub mod ordered;
pub mod refuter;
pub mod replays;
pub mod scenario;
pub mod worlds;

pub use criteria::{compare, Criterion, Verdict};
pub use error::{Error, Result};
