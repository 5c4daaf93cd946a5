//! A compressed substring index built in one left-to-right pass.
//!
//! The text is parsed into a locally consistent hierarchy of blocks, pruned
//! into a jiggly block tree, and searched with deterministic fingerprints
//! instead of randomized hashes.

pub mod builder;
pub mod dict;
pub mod error;
pub mod fingerprint;
pub mod geom;
pub mod hierarchy;
pub mod index;
pub mod jiggly;
pub mod oracle;
pub mod search;
pub mod serial;
pub mod tries;

pub use error::Error;
pub use index::Index;

/// Letter code; the letter namespace is `[0, 2^32)`.
pub type Symbol = u32;

/// Block identifier. Letters use their own code, generated ids start at
/// [`FIRST_GENERATED`], query-local ids start at [`OVERLAY_BASE`].
pub type Id = u64;

pub const LETTER_LIMIT: Id = 1 << 32;
pub const FIRST_GENERATED: Id = 1 << 32;
pub const OVERLAY_BASE: Id = 1 << 63;
pub const SENTINEL: Id = u64::MAX;

#[inline]
pub fn is_letter(id: Id) -> bool {
    id < LETTER_LIMIT
}
