//! Quantum query circuits under three oracle access models.
//!
//! A [`QueryCircuit`] is a `qubits`-wide circuit made of explicit dense
//! unitaries and oracle invocations, started in the all-zeros state and
//! measured once at the end on a named register. The oracle models:
//!
//! * **phase** — `O_x|i⟩ = (−1)^{x_i}|i⟩` on an index register; basis
//!   values `i ≥ n` are treated as querying a padding bit fixed to 0, so
//!   the oracle acts as the identity there.
//! * **standard** — `O_x|a⟩|b⟩ = |a⟩|b ⊕ x_a⟩` with a `⌈log₂ n⌉`-qubit
//!   index register and a 1-qubit value register (same `x_a = 0` padding
//!   for `a ≥ n`).
//! * **qram** — a gate parameterized by an input position `p` that applies
//!   `u0` to its targets when `x_p = 0` and `u1` when `x_p = 1`; the input
//!   acts as a classical control and is never in superposition.
//!
//! Registers are named contiguous qubit ranges. Qubit 0 is the least
//! significant bit of the global basis index, and a register's value reads
//! its qubits little-endian from its `start`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::{ceil_log2, zero_vec, CVec, Mat};
use crate::model::{Reporter, ValidationReport};
use crate::sim::{bit, AcceptanceModel, StateVector};
use crate::{default_tol, Scalar};

/// How a circuit reads its input.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleModel {
    Phase,
    Standard,
    Qram,
}

impl fmt::Display for OracleModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleModel::Phase => write!(f, "phase"),
            OracleModel::Standard => write!(f, "standard"),
            OracleModel::Qram => write!(f, "qram"),
        }
    }
}

/// A named contiguous qubit range `[start, start + len)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Register {
    pub start: usize,
    pub len: usize,
}

impl Register {
    pub fn new(start: usize, len: usize) -> Self {
        Self { start, len }
    }

    /// The qubits covered, in little-endian order.
    pub fn qubits(&self) -> Vec<usize> {
        (self.start..self.start + self.len).collect()
    }

    /// The register's value in the global basis index `i`.
    pub fn value_in(&self, i: usize) -> u64 {
        ((i >> self.start) as u64) & ((1u64 << self.len) - 1)
    }
}

/// One circuit operation.
#[derive(Debug, Clone, PartialEq)]
pub enum CircuitOp<T: Scalar> {
    /// An explicit `2^k × 2^k` unitary on `k` target qubits; target `j` is
    /// the `j`-th least significant bit of the gate's local basis index.
    Unitary { targets: Vec<usize>, matrix: Mat<T> },
    /// One oracle invocation. Phase model: `value_register` must be
    /// absent. Standard model: `value_register` names the 1-qubit target
    /// of the XOR.
    OracleCall { index_register: String, value_register: Option<String> },
    /// QRAM-style access: applies `u0` or `u1` to the targets according to
    /// input bit `x_p`.
    QramGate { p: usize, u0: Mat<T>, u1: Mat<T>, targets: Vec<usize> },
}

impl<T: Scalar> CircuitOp<T> {
    /// Whether this op invokes the oracle (counts toward the query count).
    pub fn is_oracle(&self) -> bool {
        matches!(self, CircuitOp::OracleCall { .. } | CircuitOp::QramGate { .. })
    }
}

/// A quantum query circuit: ops applied in order to `|0…0⟩`, acceptance
/// decided by measuring `measure_register` against the `accept` values.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryCircuit<T: Scalar> {
    /// Number of input bits `n`.
    pub n: usize,
    /// Total qubit count.
    pub qubits: usize,
    pub oracle_model: OracleModel,
    pub registers: BTreeMap<String, Register>,
    pub ops: Vec<CircuitOp<T>>,
    pub measure_register: String,
    /// Accepted computational-basis values of the measured register.
    pub accept: BTreeSet<u64>,
}

/// Resource counts of a circuit: width and number of oracle invocations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CircuitMeasures {
    pub qubits: usize,
    pub oracle_calls: usize,
}

impl fmt::Display for CircuitMeasures {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "qubits={} queries={}", self.qubits, self.oracle_calls)
    }
}

impl<T: Scalar> QueryCircuit<T> {
    /// Look up a register by name.
    pub fn register(&self, name: &str) -> Result<Register> {
        self.registers
            .get(name)
            .copied()
            .ok_or_else(|| Error::BadParameter(format!("unknown register {name:?}")))
    }

    /// Number of oracle invocations (`OracleCall` and `QramGate` ops).
    pub fn oracle_call_count(&self) -> usize {
        self.ops.iter().filter(|op| op.is_oracle()).count()
    }

    /// Width and query count.
    pub fn measures(&self) -> CircuitMeasures {
        CircuitMeasures { qubits: self.qubits, oracle_calls: self.oracle_call_count() }
    }

    /// Validate with the default tolerance.
    pub fn validate(&self) -> ValidationReport<T> {
        self.validate_with(default_tol::<T>())
    }

    /// Check every structural invariant and that every explicit matrix is
    /// unitary within `tol`.
    pub fn validate_with(&self, tol: T) -> ValidationReport<T> {
        let mut rep = Reporter::new();
        if self.n == 0 {
            rep.structural("circuit reads no input bits", "n".into());
        }
        if self.qubits == 0 {
            rep.structural("circuit has no qubits", "qubits".into());
        }
        if self.qubits >= usize::BITS as usize {
            rep.structural("qubit count too large to simulate", "qubits".into());
        }
        for (name, reg) in &self.registers {
            if reg.len == 0 {
                rep.structural("empty register", format!("register {name}"));
            }
            if reg.start + reg.len > self.qubits {
                rep.structural("register outside the qubit range", format!("register {name}"));
            }
        }
        match self.registers.get(&self.measure_register) {
            None => rep.structural(
                "unknown measure register",
                format!("measure_register {:?}", self.measure_register),
            ),
            Some(reg) => {
                if reg.len < 64 {
                    for &v in &self.accept {
                        if v >= 1u64 << reg.len {
                            rep.structural(
                                "accept value outside the measured register",
                                format!("accept value {v}"),
                            );
                        }
                    }
                }
            }
        }
        for (k, op) in self.ops.iter().enumerate() {
            let loc = |what: &str| format!("op {k} {what}");
            match op {
                CircuitOp::Unitary { targets, matrix } => {
                    self.check_targets(&mut rep, targets, &loc("targets"));
                    self.check_gate_matrix(&mut rep, matrix, targets.len(), &loc("matrix"), tol);
                }
                CircuitOp::OracleCall { index_register, value_register } => {
                    match self.oracle_model {
                        OracleModel::Qram => rep.structural(
                            "oracle call in a qram-model circuit",
                            loc("oracle call"),
                        ),
                        OracleModel::Phase => {
                            if value_register.is_some() {
                                rep.structural(
                                    "phase-model oracle call names a value register",
                                    loc("oracle call"),
                                );
                            }
                        }
                        OracleModel::Standard => match value_register {
                            None => rep.structural(
                                "standard-model oracle call missing its value register",
                                loc("oracle call"),
                            ),
                            Some(vname) => match self.registers.get(vname) {
                                None => rep.structural(
                                    "unknown value register",
                                    loc(&format!("value register {vname:?}")),
                                ),
                                Some(vreg) => {
                                    if vreg.len != 1 {
                                        rep.structural(
                                            "value register is not one qubit",
                                            loc(&format!("value register {vname:?}")),
                                        );
                                    }
                                }
                            },
                        },
                    }
                    match self.registers.get(index_register) {
                        None => rep.structural(
                            "unknown index register",
                            loc(&format!("index register {index_register:?}")),
                        ),
                        Some(ireg) => {
                            if ireg.len < ceil_log2(self.n) {
                                rep.structural(
                                    "index register cannot address every input bit",
                                    loc(&format!("index register {index_register:?}")),
                                );
                            }
                        }
                    }
                }
                CircuitOp::QramGate { p, u0, u1, targets } => {
                    if self.oracle_model != OracleModel::Qram {
                        rep.structural(
                            "qram gate outside a qram-model circuit",
                            loc("qram gate"),
                        );
                    }
                    if *p >= self.n {
                        rep.structural("qram gate reads a nonexistent input bit", loc("p"));
                    }
                    self.check_targets(&mut rep, targets, &loc("targets"));
                    self.check_gate_matrix(&mut rep, u0, targets.len(), &loc("u0"), tol);
                    self.check_gate_matrix(&mut rep, u1, targets.len(), &loc("u1"), tol);
                }
            }
        }
        rep.finish()
    }

    fn check_targets(&self, rep: &mut Reporter<T>, targets: &[usize], loc: &str) {
        let mut seen = BTreeSet::new();
        for &t in targets {
            if t >= self.qubits {
                rep.structural("target qubit out of range", loc.to_string());
            }
            if !seen.insert(t) {
                rep.structural("repeated target qubit", loc.to_string());
            }
        }
        if targets.is_empty() {
            rep.structural("gate with no targets", loc.to_string());
        }
    }

    fn check_gate_matrix(
        &self,
        rep: &mut Reporter<T>,
        m: &Mat<T>,
        k: usize,
        loc: &str,
        tol: T,
    ) {
        let dim = 1usize << k;
        if m.rows() != dim || m.cols() != dim {
            rep.structural("gate matrix does not match its target count", loc.to_string());
            return;
        }
        if !m.is_finite() {
            rep.structural("gate matrix has non-finite entries", loc.to_string());
            return;
        }
        rep.numeric("gate matrix not unitary", loc.to_string(), m.isometry_deviation(), tol);
    }
}

/// Validate every [`QueryCircuit`] invariant; see
/// [`QueryCircuit::validate_with`].
pub fn validate_circuit<T: Scalar>(c: &QueryCircuit<T>) -> ValidationReport<T> {
    c.validate()
}

// ---------------------------------------------------------------------------
// Exact simulation
// ---------------------------------------------------------------------------

/// Apply a `2^k × 2^k` matrix to the listed target qubits of a state over
/// all qubits; target `j` is bit `j` of the matrix's local index.
pub(crate) fn apply_gate<T: Scalar>(amps: &mut CVec<T>, targets: &[usize], m: &Mat<T>) {
    let k = targets.len();
    let sub = 1usize << k;
    let tmask: usize = targets.iter().map(|&t| 1usize << t).sum();
    let mut idx = vec![0usize; sub];
    let mut local = vec![Complex::new(T::zero(), T::zero()); sub];
    for base in 0..amps.len() {
        if base & tmask != 0 {
            continue;
        }
        for v in 0..sub {
            let mut full = base;
            for (j, &t) in targets.iter().enumerate() {
                if (v >> j) & 1 == 1 {
                    full |= 1 << t;
                }
            }
            idx[v] = full;
            local[v] = amps[full];
        }
        for (r, &target_index) in idx.iter().enumerate() {
            let mut acc = Complex::new(T::zero(), T::zero());
            for (cc, &a) in local.iter().enumerate() {
                acc += m[(r, cc)] * a;
            }
            amps[target_index] = acc;
        }
    }
}

fn apply_phase_oracle<T: Scalar>(amps: &mut CVec<T>, ireg: Register, x: u64, n: usize) {
    for (i, amp) in amps.iter_mut().enumerate() {
        let a = ireg.value_in(i);
        if (a as usize) < n && bit(x, a as usize) == 1 {
            *amp = -*amp;
        }
    }
}

fn apply_standard_oracle<T: Scalar>(
    amps: &mut CVec<T>,
    ireg: Register,
    value_qubit: usize,
    x: u64,
    n: usize,
) {
    // Permutation: flip the value qubit exactly when x_a = 1. Visit each
    // swapped pair once via the value-0 side.
    let vbit = 1usize << value_qubit;
    for i in 0..amps.len() {
        if i & vbit != 0 {
            continue;
        }
        let a = ireg.value_in(i);
        if (a as usize) < n && bit(x, a as usize) == 1 {
            amps.swap(i, i | vbit);
        }
    }
}

pub(crate) fn evolve_circuit<T: Scalar>(c: &QueryCircuit<T>, x: u64) -> CVec<T> {
    let mut amps = zero_vec::<T>(1usize << c.qubits);
    amps[0] = Complex::new(T::one(), T::zero());
    for op in &c.ops {
        match op {
            CircuitOp::Unitary { targets, matrix } => apply_gate(&mut amps, targets, matrix),
            CircuitOp::OracleCall { index_register, value_register } => {
                let ireg = self_register(c, index_register);
                match (c.oracle_model, value_register) {
                    (OracleModel::Standard, Some(vname)) => {
                        let vreg = self_register(c, vname);
                        apply_standard_oracle(&mut amps, ireg, vreg.start, x, c.n);
                    }
                    _ => apply_phase_oracle(&mut amps, ireg, x, c.n),
                }
            }
            CircuitOp::QramGate { p, u0, u1, targets } => {
                let u = if bit(x, *p) == 0 { u0 } else { u1 };
                apply_gate(&mut amps, targets, u);
            }
        }
    }
    amps
}

fn self_register<T: Scalar>(c: &QueryCircuit<T>, name: &str) -> Register {
    *c.registers.get(name).expect("validated circuit references known registers")
}

/// Simulate a circuit on input `x`: the final state over all `2^qubits`
/// basis states, labelled by little-endian qubit strings.
///
/// The circuit is validated up front and rejected if broken.
pub fn simulate_circuit<T: Scalar>(c: &QueryCircuit<T>, x: u64) -> Result<StateVector<T>> {
    let report = c.validate();
    if !report.ok {
        return Err(Error::InvalidProgram(report.to_string()));
    }
    let amps = evolve_circuit(c, x);
    let basis = (0..amps.len())
        .map(|i| {
            (0..c.qubits)
                .map(|q| if (i >> q) & 1 == 1 { '1' } else { '0' })
                .collect::<String>()
        })
        .collect();
    Ok(StateVector { basis, amps })
}

fn measured_accept_prob<T: Scalar>(c: &QueryCircuit<T>, amps: &CVec<T>) -> T {
    let mreg = self_register(c, &c.measure_register);
    let mut p = T::zero();
    for (i, amp) in amps.iter().enumerate() {
        if c.accept.contains(&mreg.value_in(i)) {
            p = p + amp.norm_sqr();
        }
    }
    p
}

/// Probability that measuring `measure_register` after the run yields an
/// accepted value; all other qubits are traced out.
pub fn accept_prob_circuit<T: Scalar>(c: &QueryCircuit<T>, x: u64) -> Result<T> {
    let report = c.validate();
    if !report.ok {
        return Err(Error::InvalidProgram(report.to_string()));
    }
    Ok(measured_accept_prob(c, &evolve_circuit(c, x)))
}

impl<T: Scalar> AcceptanceModel<T> for QueryCircuit<T> {
    fn input_bits(&self) -> usize {
        self.n
    }

    fn accept_prob(&self, x: u64) -> T {
        measured_accept_prob(self, &evolve_circuit(self, x))
    }
}
