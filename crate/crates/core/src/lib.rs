//! Finite-level computations with iterated wreath products of permutation
//! groups: imprimitive and product-action towers, P-embeddings between
//! them, embeddings of groups with a chosen composition series, and
//! co-Hopfian verdicts for eventually specified sequences.
//!
//! Everything works at "desk scale": orders and degrees are exact big
//! integers, element enumeration and domain materialization are guarded by
//! explicit caps, and every constructed embedding can be re-verified
//! exhaustively or by seeded sampling.

pub mod cohopf;
pub mod embed;
pub mod equiv;
pub mod error;
pub mod group;
pub mod groupspec;
pub mod kaloujnine;
pub mod perm;
pub mod wreath;

pub use error::{Error, Result};
pub use group::PermGroup;
pub use perm::{Domain, Perm};
