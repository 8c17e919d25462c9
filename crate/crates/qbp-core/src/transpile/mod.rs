//! Model-to-model translations with resource-accounting certificates.
//!
//! Every public operation here converts one computational model into
//! another while preserving the acceptance probability on every input
//! (one documented exception: [`nqbp_to_gqbp`] on programs whose
//! intermediate measurements matter — those are flagged with a warning).
//! Each returns the converted object together with a
//! [`TranspileCertificate`] recording the source and target resource
//! measures, the claimed bound, and whether the output meets it.
//!
//! The available directions:
//!
//! * [`aqbp_to_gqbp`] — width/length-preserving unrolling.
//! * [`gqbp_to_nqbp`] / [`nqbp_to_gqbp`] — embedding into, and unrolling
//!   out of, the measure-every-step model.
//! * [`qram_circuit_to_aqbp`] / [`aqbp_to_qram_circuit`] — QRAM-gate
//!   circuits are AQBPs in disguise (`2^q`-dimensional, one step per
//!   gate).
//! * [`aqbp_to_oracle_circuit`] — standard-oracle circuit with
//!   `⌈log n⌉ + ⌈log d⌉ + 1` qubits and `2l` queries.
//! * [`phase_circuit_to_gqbp`] (+ [`fuse_to_alternating`]) — phase-oracle
//!   circuits become `(2^q, 2t+1)`-programs; [`remove_dummy_levels`]
//!   then shrinks them to length `t`.
//! * [`gqbp_to_oracle_circuit`] — any well-behaved program becomes a
//!   `l·⌈log w⌉ + ⌈log n⌉ + 1`-qubit, `2l`-query circuit.

mod circuits;
mod dummy;
mod extension;
mod programs;

pub use circuits::{
    aqbp_to_oracle_circuit, aqbp_to_qram_circuit, fuse_to_alternating, gqbp_to_oracle_circuit,
    phase_circuit_to_gqbp, qram_circuit_to_aqbp,
};
pub use dummy::remove_dummy_levels;
pub use programs::{aqbp_to_gqbp, gqbp_to_nqbp, nqbp_to_gqbp};

use std::fmt;

use crate::circuit::CircuitMeasures;
use crate::model::ProgramMeasures;

/// Resource measures of either kind of object.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasureSet {
    Program(ProgramMeasures),
    Circuit(CircuitMeasures),
}

impl fmt::Display for MeasureSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeasureSet::Program(m) => m.fmt(f),
            MeasureSet::Circuit(m) => m.fmt(f),
        }
    }
}

impl From<ProgramMeasures> for MeasureSet {
    fn from(m: ProgramMeasures) -> Self {
        MeasureSet::Program(m)
    }
}

impl From<CircuitMeasures> for MeasureSet {
    fn from(m: CircuitMeasures) -> Self {
        MeasureSet::Circuit(m)
    }
}

/// Accounting record attached to every translation: what went in, what
/// came out, the bound the construction promises, and whether the output
/// actually meets it (always true unless something is badly wrong).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranspileCertificate {
    pub source: MeasureSet,
    pub target: MeasureSet,
    /// Human-readable statement of the promised resource bound.
    pub claimed: String,
    pub bound_satisfied: bool,
    /// Caveats that do not invalidate the output, e.g. the
    /// intermediate-measurement divergence flag of [`nqbp_to_gqbp`].
    pub warnings: Vec<String>,
}

impl TranspileCertificate {
    pub(crate) fn new(
        source: impl Into<MeasureSet>,
        target: impl Into<MeasureSet>,
        claimed: impl Into<String>,
        bound_satisfied: bool,
    ) -> Self {
        Self {
            source: source.into(),
            target: target.into(),
            claimed: claimed.into(),
            bound_satisfied,
            warnings: Vec::new(),
        }
    }
}

impl fmt::Display for TranspileCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "source: {}", self.source)?;
        writeln!(f, "target: {}", self.target)?;
        writeln!(f, "claim: {}", self.claimed)?;
        write!(f, "bound satisfied: {}", if self.bound_satisfied { "yes" } else { "NO" })?;
        for w in &self.warnings {
            write!(f, "\nwarning: {w}")?;
        }
        Ok(())
    }
}
