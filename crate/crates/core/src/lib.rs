//! Semigroups of partial contractions on a finite chain.
//!
//! Enumerates the families `P_n`, `CP_n`, `ORCP_n`, `OCP_n`, `CT_n` and
//! `OCT_n`, computes classical and starred Green's relations both from their
//! defining cancellation conditions and from image/kernel/height
//! characterizations, and checks abundance, regularity and strong regularity
//! exhaustively. The [`claims`] module ties each structural statement to a
//! check that produces a pass/fail entry in a [`claims::VerificationReport`].

pub mod cache;
pub mod claims;
pub mod config;
pub mod error;
pub mod family;
pub mod green;
pub mod kernel;
pub mod map;
pub mod output;
pub mod partition;
pub mod regularity;
pub mod transversal;

pub use config::{Budget, Config, OutputFormat};
pub use error::{Error, Result};
pub use family::{verify_closure, ElementSet, FamilyTag};
pub use green::{Method, Relation, RelationClasses, Side};
pub use kernel::KernelPartition;
pub use map::{PartialMap, PropertySet};
pub use transversal::Transversal;
