//! Succinct bit sequences.
//!
//! - [`BitSequence`]: immutable bitmap with constant-time rank and
//!   logarithmic select.
//! - [`DynBitSequence`]: bitmap that also supports positional insert/remove.
//! - [`DynSequence`]: dynamic symbol sequence with access/rank/select,
//!   backed by a wavelet matrix of dynamic bitmaps.
//! - [`IntVector`]: fixed-width packed integers.
//!
//! All public positions and ordinals are 1-based; `rank*(0)` is always 0.

mod bitseq;
mod dynbits;
mod fenwick;
mod intvec;
mod sequence;

pub use bitseq::{BitBuilder, BitSequence};
pub use dynbits::DynBitSequence;
pub use intvec::IntVector;
pub use sequence::DynSequence;
