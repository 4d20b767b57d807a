//! Consistent power-commutator presentations of finite p-groups and the
//! p-group generation algorithm, with the invariants needed to search for
//! groups with prescribed abelian quotients, transfer kernels and automorphic
//! inversion.

pub mod abelian;
pub mod audit;
pub mod error;
pub mod fixtures;
pub mod format;
pub mod homsearch;
mod linalg;
pub mod pcp;
pub mod pga;
pub mod search;
pub mod sigma;
pub mod structure;
pub mod table;
pub mod transfer;

pub use abelian::{abelianization, is_quotient, smith_normal_form, AbelianInvariants};
pub use error::{GroupError, PcpError};
pub use pcp::{
    check_consistency, ConsistencyReport, Definition, ExponentVector, PcPresentation, PcRelations,
    RelationId,
};
pub use table::Group;
