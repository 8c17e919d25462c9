//! Command-line companion crate for [`qbp_core`].
//!
//! The library half of the crate defines the on-disk JSON document formats
//! for every object `qbp-core` works with — branching programs, circuits
//! and truth tables — together with lossless conversions between those
//! documents and the in-memory types. The binary half (`qbp`) wires the
//! formats to the simulator, the transpilers and the degree analysis.

pub mod docs;

pub use docs::{Document, Model};
