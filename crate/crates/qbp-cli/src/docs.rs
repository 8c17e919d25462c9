//! JSON document formats and their conversions to and from core types.
//!
//! Every document is a single JSON object with a `"kind"` discriminator
//! (`gqbp`, `aqbp`, `nqbp`, `classical`, `circuit` or `table`) and a
//! `"version"` field, currently always `1`. Complex amplitudes are encoded
//! as two-element arrays `[re, im]`. Program documents name their nodes and
//! spell transitions out as explicit records, omitting entries whose
//! amplitude (or probability) is exactly zero; decoding treats absent
//! entries as zero, so encode–decode round trips reproduce the in-memory
//! object field for field.
//!
//! Decoding is structural only: it resolves names, checks shapes that are
//! needed to build the in-memory value at all (unknown or duplicate node
//! names, out-of-range step indices, ragged matrices) and leaves every
//! semantic invariant — unit vectors, well-behavedness, isometry — to the
//! models' own `validate` methods.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use qbp_core::circuit::{CircuitOp, OracleModel, Register};
use qbp_core::linalg::{CVec, Mat};
use qbp_core::model::{ClassicalStep, LevelStep, NodeKind, QuantumTransformation, ValidationReport};
use qbp_core::sim::AcceptanceModel;
use qbp_core::{Amp, Aqbp, Circuit, Classical, Gqbp, Nqbp, Table};

/// The only document format version this build reads and writes.
pub const FORMAT_VERSION: u32 = 1;

fn check_version(version: u32, kind: &str) -> Result<()> {
    if version != FORMAT_VERSION {
        bail!("{kind} document has version {version}, this build reads version {FORMAT_VERSION}");
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Scalar pieces
// ---------------------------------------------------------------------------

/// A complex amplitude, serialized as the two-element array `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmpDoc(pub f64, pub f64);

impl From<Amp> for AmpDoc {
    fn from(a: Amp) -> Self {
        AmpDoc(a.re, a.im)
    }
}

impl From<AmpDoc> for Amp {
    fn from(a: AmpDoc) -> Self {
        Amp::new(a.0, a.1)
    }
}

fn mat_to_doc(m: &Mat<f64>) -> Vec<Vec<AmpDoc>> {
    (0..m.rows())
        .map(|r| (0..m.cols()).map(|c| AmpDoc::from(m[(r, c)])).collect())
        .collect()
}

fn mat_from_doc(rows: &[Vec<AmpDoc>], what: &str) -> Result<Mat<f64>> {
    if rows.is_empty() || rows[0].is_empty() {
        bail!("{what}: matrix must have at least one row and one column");
    }
    let cols = rows[0].len();
    if rows.iter().any(|r| r.len() != cols) {
        bail!("{what}: matrix rows have unequal lengths");
    }
    Ok(Mat::from_fn(rows.len(), cols, |r, c| Amp::from(rows[r][c])))
}

fn is_zero(a: Amp) -> bool {
    a.re == 0.0 && a.im == 0.0
}

// ---------------------------------------------------------------------------
// Document structs
// ---------------------------------------------------------------------------

/// An initial-state entry: one named node and its amplitude.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeAmp {
    pub node: String,
    pub amp: AmpDoc,
}

/// One edge of a level-structured quantum program. `step` is 1-based:
/// step `s` connects level `s − 1` to level `s`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeAmp {
    pub step: usize,
    pub from: String,
    pub bit: u8,
    pub to: String,
    pub amp: AmpDoc,
}

/// Level-structured quantum branching program document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GqbpDoc {
    pub version: u32,
    pub n: usize,
    pub levels: Vec<Vec<String>>,
    /// Variable index queried at each named node; terminal nodes are absent.
    pub labels: BTreeMap<String, usize>,
    pub initial: Vec<NodeAmp>,
    pub transitions: Vec<EdgeAmp>,
    pub accept: Vec<String>,
}

/// One register-program step: query variable `j`, then apply `u0` or `u1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AqbpStepDoc {
    pub j: usize,
    pub u0: Vec<Vec<AmpDoc>>,
    pub u1: Vec<Vec<AmpDoc>>,
}

/// Register-style (single-column) quantum program document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AqbpDoc {
    pub version: u32,
    pub n: usize,
    pub d: usize,
    pub initial: Vec<AmpDoc>,
    pub steps: Vec<AqbpStepDoc>,
    pub accept: Vec<usize>,
}

/// Partition of non-uniform program nodes into accepting, rejecting and
/// non-terminal classes. Every node appears in exactly one list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionDoc {
    pub acc: Vec<String>,
    pub rej: Vec<String>,
    pub non: Vec<String>,
}

/// One edge of a non-uniform program (no level structure).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NqbpEdge {
    pub from: String,
    pub bit: u8,
    pub to: String,
    pub amp: AmpDoc,
}

/// Non-uniform quantum branching program document: one transition map
/// applied `steps` times, measuring terminal nodes after every step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NqbpDoc {
    pub version: u32,
    pub n: usize,
    pub nodes: Vec<String>,
    pub partition: PartitionDoc,
    /// Variable index queried at each node, terminals included.
    pub labels: BTreeMap<String, usize>,
    pub start: String,
    pub transitions: Vec<NqbpEdge>,
    pub steps: usize,
}

/// A starting-distribution entry of a classical program.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeProb {
    pub node: String,
    pub p: f64,
}

/// One edge of a classical branching program, with its probability.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeProb {
    pub step: usize,
    pub from: String,
    pub bit: u8,
    pub to: String,
    pub p: f64,
}

/// Classical (deterministic or stochastic) branching program document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassicalDoc {
    pub version: u32,
    pub n: usize,
    pub levels: Vec<Vec<String>>,
    pub labels: BTreeMap<String, usize>,
    pub start: Vec<NodeProb>,
    pub transitions: Vec<EdgeProb>,
    pub accept: Vec<String>,
    pub reject: Vec<String>,
}

/// One circuit operation, discriminated by the `"op"` field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum OpDoc {
    /// A unitary on an explicit list of qubits (first target = least
    /// significant index of the matrix).
    Unitary { targets: Vec<usize>, matrix: Vec<Vec<AmpDoc>> },
    /// A black-box input query on a named index register, plus a value
    /// qubit register for the standard (non-phase) oracle.
    Oracle {
        index_register: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        value_register: Option<String>,
    },
    /// Input-conditioned unitary: applies `u0` or `u1` to `targets`
    /// according to bit `p` of the input.
    Qram { p: usize, u0: Vec<Vec<AmpDoc>>, u1: Vec<Vec<AmpDoc>>, targets: Vec<usize> },
}

/// Quantum query circuit document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircuitDoc {
    pub version: u32,
    pub n: usize,
    pub qubits: usize,
    /// `"phase"`, `"standard"` or `"qram"`.
    pub oracle_model: String,
    /// Register name to `[start, len]` (contiguous qubits, qubit 0 = LSB).
    pub registers: BTreeMap<String, (usize, usize)>,
    pub ops: Vec<OpDoc>,
    pub measure_register: String,
    pub accept: Vec<u64>,
}

/// Acceptance-value table over all `2ⁿ` inputs, indexed little-endian.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableDoc {
    pub version: u32,
    pub n: usize,
    pub values: Vec<f64>,
}

/// Any on-disk document, discriminated by the `"kind"` field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Document {
    Gqbp(GqbpDoc),
    Aqbp(AqbpDoc),
    Nqbp(NqbpDoc),
    Classical(ClassicalDoc),
    Circuit(CircuitDoc),
    Table(TableDoc),
}

impl Document {
    /// The `kind` discriminator as written in the JSON.
    pub fn kind_name(&self) -> &'static str {
        match self {
            Document::Gqbp(_) => "gqbp",
            Document::Aqbp(_) => "aqbp",
            Document::Nqbp(_) => "nqbp",
            Document::Classical(_) => "classical",
            Document::Circuit(_) => "circuit",
            Document::Table(_) => "table",
        }
    }

    /// Parse a document from JSON text. Error messages carry the position
    /// reported by the parser.
    pub fn from_json(text: &str) -> Result<Document> {
        serde_json::from_str(text).context("cannot parse document")
    }

    /// Pretty-printed JSON, newline-terminated.
    pub fn to_json_string(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self).context("cannot serialize document")?;
        s.push('\n');
        Ok(s)
    }

    /// Read and parse a document file.
    pub fn load(path: &Path) -> Result<Document> {
        let text =
            fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        Self::from_json(&text).with_context(|| format!("in {}", path.display()))
    }

    /// Serialize and write a document file.
    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json_string()?)
            .with_context(|| format!("cannot write {}", path.display()))
    }
}

// ---------------------------------------------------------------------------
// Name resolution helpers
// ---------------------------------------------------------------------------

/// Map every node name of a levelled program to `(level, index)`,
/// rejecting duplicates anywhere in the program.
fn level_index(levels: &[Vec<String>]) -> Result<BTreeMap<&str, (usize, usize)>> {
    let mut map = BTreeMap::new();
    for (i, level) in levels.iter().enumerate() {
        for (v, name) in level.iter().enumerate() {
            if map.insert(name.as_str(), (i, v)).is_some() {
                bail!("duplicate node name {name:?}");
            }
        }
    }
    Ok(map)
}

/// Look a name up and insist it sits on the given level.
fn node_on_level(
    map: &BTreeMap<&str, (usize, usize)>,
    name: &str,
    level: usize,
    role: &str,
) -> Result<usize> {
    match map.get(name) {
        None => bail!("{role} refers to unknown node {name:?}"),
        Some(&(i, v)) if i == level => Ok(v),
        Some(&(i, _)) => bail!("{role} node {name:?} is on level {i}, expected level {level}"),
    }
}

/// Labels parallel to `levels`, filled from the name-keyed map. Missing
/// and superfluous entries are left for the model's validator to flag.
fn labels_from_map(levels: &[Vec<String>], labels: &BTreeMap<String, usize>) -> Vec<Vec<Option<usize>>> {
    levels
        .iter()
        .map(|level| level.iter().map(|name| labels.get(name).copied()).collect())
        .collect()
}

// ---------------------------------------------------------------------------
// GQBP encode / decode
// ---------------------------------------------------------------------------

/// Encode a level-structured quantum program.
pub fn encode_gqbp(g: &Gqbp) -> GqbpDoc {
    let mut labels = BTreeMap::new();
    for (level, row) in g.levels.iter().zip(&g.labels) {
        for (name, lab) in level.iter().zip(row) {
            if let Some(j) = lab {
                labels.insert(name.clone(), *j);
            }
        }
    }
    let initial = g
        .levels
        .first()
        .map(|level| {
            level
                .iter()
                .zip(&g.initial)
                .filter(|(_, &a)| !is_zero(a))
                .map(|(name, &a)| NodeAmp { node: name.clone(), amp: a.into() })
                .collect()
        })
        .unwrap_or_default();
    let mut transitions = Vec::new();
    for (s, step) in g.steps.iter().enumerate() {
        for v in 0..step.sources() {
            for bit in [0u8, 1] {
                for (t, &a) in step.col(v, bit).iter().enumerate() {
                    if !is_zero(a) {
                        transitions.push(EdgeAmp {
                            step: s + 1,
                            from: g.levels[s][v].clone(),
                            bit,
                            to: g.levels[s + 1][t].clone(),
                            amp: a.into(),
                        });
                    }
                }
            }
        }
    }
    let last = g.levels.last();
    let accept = g
        .accept
        .iter()
        .filter_map(|&v| last.and_then(|lvl| lvl.get(v)).cloned())
        .collect();
    GqbpDoc {
        version: FORMAT_VERSION,
        n: g.n,
        levels: g.levels.clone(),
        labels,
        initial,
        transitions,
        accept,
    }
}

/// Decode a level-structured quantum program.
pub fn decode_gqbp(doc: &GqbpDoc) -> Result<Gqbp> {
    check_version(doc.version, "gqbp")?;
    let map = level_index(&doc.levels)?;
    let l = doc.levels.len().saturating_sub(1);
    let labels = labels_from_map(&doc.levels, &doc.labels);

    let mut initial: CVec<f64> =
        vec![Amp::new(0.0, 0.0); doc.levels.first().map_or(0, Vec::len)];
    let mut seen_init = BTreeSet::new();
    for e in &doc.initial {
        let v = node_on_level(&map, &e.node, 0, "initial entry")?;
        if !seen_init.insert(v) {
            bail!("duplicate initial entry for node {:?}", e.node);
        }
        initial[v] = e.amp.into();
    }

    let mut steps: Vec<LevelStep<f64>> = (1..=l)
        .map(|s| LevelStep::zeros(doc.levels[s - 1].len(), doc.levels[s].len()))
        .collect();
    let mut seen_edge = BTreeSet::new();
    for e in &doc.transitions {
        if e.step == 0 || e.step > l {
            bail!("transition step {} out of range 1..={l}", e.step);
        }
        if e.bit > 1 {
            bail!("transition bit {} is not 0 or 1", e.bit);
        }
        let role = format!("step {} transition", e.step);
        let from = node_on_level(&map, &e.from, e.step - 1, &role)?;
        let to = node_on_level(&map, &e.to, e.step, &role)?;
        if !seen_edge.insert((e.step, from, e.bit, to)) {
            bail!("duplicate transition {:?} --{}--> {:?} at step {}", e.from, e.bit, e.to, e.step);
        }
        steps[e.step - 1].col_mut(from, e.bit)[to] = e.amp.into();
    }

    let mut accept = BTreeSet::new();
    for name in &doc.accept {
        accept.insert(node_on_level(&map, name, l, "accept entry")?);
    }

    Ok(Gqbp { n: doc.n, levels: doc.levels.clone(), labels, initial, steps, accept })
}

// ---------------------------------------------------------------------------
// AQBP encode / decode
// ---------------------------------------------------------------------------

/// Encode a register-style quantum program.
pub fn encode_aqbp(a: &Aqbp) -> AqbpDoc {
    AqbpDoc {
        version: FORMAT_VERSION,
        n: a.n,
        d: a.d,
        initial: a.initial.iter().map(|&x| x.into()).collect(),
        steps: a
            .steps
            .iter()
            .map(|s| AqbpStepDoc { j: s.j, u0: mat_to_doc(&s.u0), u1: mat_to_doc(&s.u1) })
            .collect(),
        accept: a.accept.iter().copied().collect(),
    }
}

/// Decode a register-style quantum program.
pub fn decode_aqbp(doc: &AqbpDoc) -> Result<Aqbp> {
    check_version(doc.version, "aqbp")?;
    let steps = doc
        .steps
        .iter()
        .enumerate()
        .map(|(i, s)| {
            Ok(QuantumTransformation {
                j: s.j,
                u0: mat_from_doc(&s.u0, &format!("step {i} u0"))?,
                u1: mat_from_doc(&s.u1, &format!("step {i} u1"))?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Aqbp {
        n: doc.n,
        d: doc.d,
        initial: doc.initial.iter().map(|&x| x.into()).collect(),
        steps,
        accept: doc.accept.iter().copied().collect(),
    })
}

// ---------------------------------------------------------------------------
// NQBP encode / decode
// ---------------------------------------------------------------------------

/// Encode a non-uniform quantum program.
pub fn encode_nqbp(p: &Nqbp) -> NqbpDoc {
    let mut partition = PartitionDoc { acc: vec![], rej: vec![], non: vec![] };
    for (name, kind) in p.nodes.iter().zip(&p.kinds) {
        match kind {
            NodeKind::Acc => partition.acc.push(name.clone()),
            NodeKind::Rej => partition.rej.push(name.clone()),
            NodeKind::Non => partition.non.push(name.clone()),
        }
    }
    let labels =
        p.nodes.iter().cloned().zip(p.labels.iter().copied()).collect::<BTreeMap<_, _>>();
    let mut transitions = Vec::new();
    let q = p.nodes.len();
    for from in 0..q {
        for (bit, delta) in [(0u8, &p.delta0), (1u8, &p.delta1)] {
            for to in 0..q {
                let a = delta[(to, from)];
                if !is_zero(a) {
                    transitions.push(NqbpEdge {
                        from: p.nodes[from].clone(),
                        bit,
                        to: p.nodes[to].clone(),
                        amp: a.into(),
                    });
                }
            }
        }
    }
    NqbpDoc {
        version: FORMAT_VERSION,
        n: p.n,
        nodes: p.nodes.clone(),
        partition,
        labels,
        start: p.nodes.get(p.start).cloned().unwrap_or_default(),
        transitions,
        steps: p.steps,
    }
}

/// Decode a non-uniform quantum program.
pub fn decode_nqbp(doc: &NqbpDoc) -> Result<Nqbp> {
    check_version(doc.version, "nqbp")?;
    let mut map = BTreeMap::new();
    for (v, name) in doc.nodes.iter().enumerate() {
        if map.insert(name.as_str(), v).is_some() {
            bail!("duplicate node name {name:?}");
        }
    }
    let lookup = |name: &str, role: &str| -> Result<usize> {
        map.get(name).copied().with_context(|| format!("{role} refers to unknown node {name:?}"))
    };

    let q = doc.nodes.len();
    let mut kinds: Vec<Option<NodeKind>> = vec![None; q];
    for (names, kind) in [
        (&doc.partition.acc, NodeKind::Acc),
        (&doc.partition.rej, NodeKind::Rej),
        (&doc.partition.non, NodeKind::Non),
    ] {
        for name in names {
            let v = lookup(name, "partition entry")?;
            if kinds[v].replace(kind).is_some() {
                bail!("node {name:?} appears twice in the partition");
            }
        }
    }
    let kinds = kinds
        .into_iter()
        .zip(&doc.nodes)
        .map(|(k, name)| k.with_context(|| format!("node {name:?} is missing from the partition")))
        .collect::<Result<Vec<_>>>()?;

    let labels = doc
        .nodes
        .iter()
        .map(|name| {
            doc.labels
                .get(name)
                .copied()
                .with_context(|| format!("node {name:?} has no label"))
        })
        .collect::<Result<Vec<_>>>()?;

    let start = lookup(&doc.start, "start")?;

    let mut delta0 = Mat::zeros(q, q);
    let mut delta1 = Mat::zeros(q, q);
    let mut seen = BTreeSet::new();
    for e in &doc.transitions {
        if e.bit > 1 {
            bail!("transition bit {} is not 0 or 1", e.bit);
        }
        let from = lookup(&e.from, "transition")?;
        let to = lookup(&e.to, "transition")?;
        if !seen.insert((from, e.bit, to)) {
            bail!("duplicate transition {:?} --{}--> {:?}", e.from, e.bit, e.to);
        }
        let delta = if e.bit == 0 { &mut delta0 } else { &mut delta1 };
        delta[(to, from)] = e.amp.into();
    }

    Ok(Nqbp {
        n: doc.n,
        nodes: doc.nodes.clone(),
        kinds,
        labels,
        start,
        delta0,
        delta1,
        steps: doc.steps,
    })
}

// ---------------------------------------------------------------------------
// Classical encode / decode
// ---------------------------------------------------------------------------

/// Encode a classical branching program.
pub fn encode_classical(b: &Classical) -> ClassicalDoc {
    let mut labels = BTreeMap::new();
    for (level, row) in b.levels.iter().zip(&b.labels) {
        for (name, lab) in level.iter().zip(row) {
            if let Some(j) = lab {
                labels.insert(name.clone(), *j);
            }
        }
    }
    let start = b
        .levels
        .first()
        .map(|level| {
            level
                .iter()
                .zip(&b.start)
                .filter(|(_, &p)| p != 0.0)
                .map(|(name, &p)| NodeProb { node: name.clone(), p })
                .collect()
        })
        .unwrap_or_default();
    let mut transitions = Vec::new();
    for (s, step) in b.steps.iter().enumerate() {
        for v in 0..step.rows0.len() {
            for bit in [0u8, 1] {
                for (t, &p) in step.row(v, bit).iter().enumerate() {
                    if p != 0.0 {
                        transitions.push(EdgeProb {
                            step: s + 1,
                            from: b.levels[s][v].clone(),
                            bit,
                            to: b.levels[s + 1][t].clone(),
                            p,
                        });
                    }
                }
            }
        }
    }
    let last = b.levels.last();
    let names_of = |set: &BTreeSet<usize>| {
        set.iter().filter_map(|&v| last.and_then(|lvl| lvl.get(v)).cloned()).collect::<Vec<_>>()
    };
    ClassicalDoc {
        version: FORMAT_VERSION,
        n: b.n,
        levels: b.levels.clone(),
        labels,
        start,
        transitions,
        accept: names_of(&b.accept),
        reject: names_of(&b.reject),
    }
}

/// Decode a classical branching program.
pub fn decode_classical(doc: &ClassicalDoc) -> Result<Classical> {
    check_version(doc.version, "classical")?;
    let map = level_index(&doc.levels)?;
    let l = doc.levels.len().saturating_sub(1);
    let labels = labels_from_map(&doc.levels, &doc.labels);

    let mut start = vec![0.0; doc.levels.first().map_or(0, Vec::len)];
    let mut seen_start = BTreeSet::new();
    for e in &doc.start {
        let v = node_on_level(&map, &e.node, 0, "start entry")?;
        if !seen_start.insert(v) {
            bail!("duplicate start entry for node {:?}", e.node);
        }
        start[v] = e.p;
    }

    let mut steps: Vec<ClassicalStep<f64>> = (1..=l)
        .map(|s| ClassicalStep {
            rows0: vec![vec![0.0; doc.levels[s].len()]; doc.levels[s - 1].len()],
            rows1: vec![vec![0.0; doc.levels[s].len()]; doc.levels[s - 1].len()],
        })
        .collect();
    let mut seen_edge = BTreeSet::new();
    for e in &doc.transitions {
        if e.step == 0 || e.step > l {
            bail!("transition step {} out of range 1..={l}", e.step);
        }
        if e.bit > 1 {
            bail!("transition bit {} is not 0 or 1", e.bit);
        }
        let role = format!("step {} transition", e.step);
        let from = node_on_level(&map, &e.from, e.step - 1, &role)?;
        let to = node_on_level(&map, &e.to, e.step, &role)?;
        if !seen_edge.insert((e.step, from, e.bit, to)) {
            bail!("duplicate transition {:?} --{}--> {:?} at step {}", e.from, e.bit, e.to, e.step);
        }
        let step = &mut steps[e.step - 1];
        let row = if e.bit == 0 { &mut step.rows0[from] } else { &mut step.rows1[from] };
        row[to] = e.p;
    }

    let mut accept = BTreeSet::new();
    for name in &doc.accept {
        accept.insert(node_on_level(&map, name, l, "accept entry")?);
    }
    let mut reject = BTreeSet::new();
    for name in &doc.reject {
        reject.insert(node_on_level(&map, name, l, "reject entry")?);
    }

    Ok(Classical {
        n: doc.n,
        levels: doc.levels.clone(),
        labels,
        start,
        steps,
        accept,
        reject,
    })
}

// ---------------------------------------------------------------------------
// Circuit encode / decode
// ---------------------------------------------------------------------------

/// Encode a query circuit.
pub fn encode_circuit(c: &Circuit) -> CircuitDoc {
    let ops = c
        .ops
        .iter()
        .map(|op| match op {
            CircuitOp::Unitary { targets, matrix } => {
                OpDoc::Unitary { targets: targets.clone(), matrix: mat_to_doc(matrix) }
            }
            CircuitOp::OracleCall { index_register, value_register } => OpDoc::Oracle {
                index_register: index_register.clone(),
                value_register: value_register.clone(),
            },
            CircuitOp::QramGate { p, u0, u1, targets } => OpDoc::Qram {
                p: *p,
                u0: mat_to_doc(u0),
                u1: mat_to_doc(u1),
                targets: targets.clone(),
            },
        })
        .collect();
    CircuitDoc {
        version: FORMAT_VERSION,
        n: c.n,
        qubits: c.qubits,
        oracle_model: c.oracle_model.to_string(),
        registers: c.registers.iter().map(|(k, r)| (k.clone(), (r.start, r.len))).collect(),
        ops,
        measure_register: c.measure_register.clone(),
        accept: c.accept.iter().copied().collect(),
    }
}

/// Decode a query circuit.
pub fn decode_circuit(doc: &CircuitDoc) -> Result<Circuit> {
    check_version(doc.version, "circuit")?;
    let oracle_model = match doc.oracle_model.as_str() {
        "phase" => OracleModel::Phase,
        "standard" => OracleModel::Standard,
        "qram" => OracleModel::Qram,
        other => bail!("unknown oracle model {other:?} (expected phase, standard or qram)"),
    };
    let ops = doc
        .ops
        .iter()
        .enumerate()
        .map(|(i, op)| {
            Ok(match op {
                OpDoc::Unitary { targets, matrix } => CircuitOp::Unitary {
                    targets: targets.clone(),
                    matrix: mat_from_doc(matrix, &format!("op {i} matrix"))?,
                },
                OpDoc::Oracle { index_register, value_register } => CircuitOp::OracleCall {
                    index_register: index_register.clone(),
                    value_register: value_register.clone(),
                },
                OpDoc::Qram { p, u0, u1, targets } => CircuitOp::QramGate {
                    p: *p,
                    u0: mat_from_doc(u0, &format!("op {i} u0"))?,
                    u1: mat_from_doc(u1, &format!("op {i} u1"))?,
                    targets: targets.clone(),
                },
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Circuit {
        n: doc.n,
        qubits: doc.qubits,
        oracle_model,
        registers: doc
            .registers
            .iter()
            .map(|(k, &(start, len))| (k.clone(), Register::new(start, len)))
            .collect(),
        ops,
        measure_register: doc.measure_register.clone(),
        accept: doc.accept.iter().copied().collect(),
    })
}

// ---------------------------------------------------------------------------
// Table encode / decode
// ---------------------------------------------------------------------------

/// Encode an acceptance-value table.
pub fn encode_table(t: &Table) -> TableDoc {
    TableDoc { version: FORMAT_VERSION, n: t.n, values: t.values.clone() }
}

/// Decode an acceptance-value table; the value count must be `2ⁿ`.
pub fn decode_table(doc: &TableDoc) -> Result<Table> {
    check_version(doc.version, "table")?;
    Table::new(doc.n, doc.values.clone()).map_err(Into::into)
}

// ---------------------------------------------------------------------------
// The in-memory model bundle
// ---------------------------------------------------------------------------

/// Any runnable in-memory object decoded from a document. Tables are data,
/// not programs, and are deliberately excluded; handle them separately.
#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Gqbp(Gqbp),
    Aqbp(Aqbp),
    Nqbp(Nqbp),
    Classical(Classical),
    Circuit(Circuit),
}

impl Model {
    /// Short lowercase name of the model family.
    pub fn kind_name(&self) -> &'static str {
        match self {
            Model::Gqbp(_) => "gqbp",
            Model::Aqbp(_) => "aqbp",
            Model::Nqbp(_) => "nqbp",
            Model::Classical(_) => "classical",
            Model::Circuit(_) => "circuit",
        }
    }

    /// The model as a black-box acceptance function.
    pub fn as_acceptance(&self) -> &dyn AcceptanceModel<f64> {
        match self {
            Model::Gqbp(g) => g,
            Model::Aqbp(a) => a,
            Model::Nqbp(p) => p,
            Model::Classical(b) => b,
            Model::Circuit(c) => c,
        }
    }

    /// Run the family's own validator.
    pub fn validate(&self) -> ValidationReport<f64> {
        match self {
            Model::Gqbp(g) => g.validate(),
            Model::Aqbp(a) => a.validate(),
            Model::Nqbp(p) => p.validate(),
            Model::Classical(b) => b.validate(),
            Model::Circuit(c) => c.validate(),
        }
    }

    /// Number of input bits the model reads.
    pub fn input_bits(&self) -> usize {
        self.as_acceptance().input_bits()
    }
}

impl Document {
    /// Decode into a runnable model; table documents are rejected.
    pub fn to_model(&self) -> Result<Model> {
        Ok(match self {
            Document::Gqbp(d) => Model::Gqbp(decode_gqbp(d)?),
            Document::Aqbp(d) => Model::Aqbp(decode_aqbp(d)?),
            Document::Nqbp(d) => Model::Nqbp(decode_nqbp(d)?),
            Document::Classical(d) => Model::Classical(decode_classical(d)?),
            Document::Circuit(d) => Model::Circuit(decode_circuit(d)?),
            Document::Table(_) => {
                bail!("a table document holds data, not a runnable program")
            }
        })
    }
}

impl From<&Gqbp> for Document {
    fn from(g: &Gqbp) -> Self {
        Document::Gqbp(encode_gqbp(g))
    }
}

impl From<&Aqbp> for Document {
    fn from(a: &Aqbp) -> Self {
        Document::Aqbp(encode_aqbp(a))
    }
}

impl From<&Nqbp> for Document {
    fn from(p: &Nqbp) -> Self {
        Document::Nqbp(encode_nqbp(p))
    }
}

impl From<&Classical> for Document {
    fn from(b: &Classical) -> Self {
        Document::Classical(encode_classical(b))
    }
}

impl From<&Circuit> for Document {
    fn from(c: &Circuit) -> Self {
        Document::Circuit(encode_circuit(c))
    }
}

impl From<&Table> for Document {
    fn from(t: &Table) -> Self {
        Document::Table(encode_table(t))
    }
}

impl From<&Model> for Document {
    fn from(m: &Model) -> Self {
        match m {
            Model::Gqbp(g) => g.into(),
            Model::Aqbp(a) => a.into(),
            Model::Nqbp(p) => p.into(),
            Model::Classical(b) => b.into(),
            Model::Circuit(c) => c.into(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use qbp_core::transpile::gqbp_to_nqbp;
    use qbp_core::zoo;

    fn round_trip(doc: &Document) -> Document {
        Document::from_json(&doc.to_json_string().unwrap()).unwrap()
    }

    #[test]
    fn gqbp_document_round_trips_to_identical_program() {
        let g = zoo::build_dj::<f64>(4).unwrap();
        let doc = Document::from(&g);
        let back = round_trip(&doc);
        assert_eq!(doc, back);
        match back.to_model().unwrap() {
            Model::Gqbp(g2) => assert_eq!(g2, g),
            other => panic!("wrong kind {}", other.kind_name()),
        }
    }

    #[test]
    fn aqbp_document_round_trips_to_identical_program() {
        let a = zoo::random_aqbp::<f64>(3, 3, 3, 11);
        let doc = Document::from(&a);
        match round_trip(&doc).to_model().unwrap() {
            Model::Aqbp(a2) => assert_eq!(a2, a),
            other => panic!("wrong kind {}", other.kind_name()),
        }
    }

    #[test]
    fn nqbp_document_round_trips_to_identical_program() {
        let g = zoo::build_maj3::<f64>();
        let (p, _) = gqbp_to_nqbp(&g).unwrap();
        let doc = Document::from(&p);
        match round_trip(&doc).to_model().unwrap() {
            Model::Nqbp(p2) => assert_eq!(p2, p),
            other => panic!("wrong kind {}", other.kind_name()),
        }
    }

    #[test]
    fn circuit_document_round_trips_to_identical_circuit() {
        let c = zoo::random_qram_circuit::<f64>(2, 3, 3, 5);
        let doc = Document::from(&c);
        match round_trip(&doc).to_model().unwrap() {
            Model::Circuit(c2) => assert_eq!(c2, c),
            other => panic!("wrong kind {}", other.kind_name()),
        }
    }

    #[test]
    fn zero_amplitudes_are_dropped_and_recovered() {
        let g = zoo::build_parity::<f64>(4).unwrap();
        let doc = encode_gqbp(&g);
        let dense: usize = g
            .steps
            .iter()
            .map(|s| 2 * s.sources() * s.targets())
            .sum();
        assert!(doc.transitions.len() < dense, "sparse encoding expected");
        assert_eq!(decode_gqbp(&doc).unwrap(), g);
    }

    #[test]
    fn unknown_node_names_are_rejected() {
        let g = zoo::build_maj3::<f64>();
        let mut doc = encode_gqbp(&g);
        doc.transitions[0].from = "nonsense".into();
        let err = decode_gqbp(&doc).unwrap_err().to_string();
        assert!(err.contains("unknown node"), "got: {err}");
    }

    #[test]
    fn wrong_version_is_rejected() {
        let g = zoo::build_maj3::<f64>();
        let mut doc = encode_gqbp(&g);
        doc.version = 2;
        assert!(decode_gqbp(&doc).is_err());
    }

    #[test]
    fn table_document_checks_value_count() {
        let doc = TableDoc { version: 1, n: 2, values: vec![0.0, 1.0, 1.0] };
        assert!(decode_table(&doc).is_err());
        let doc = TableDoc { version: 1, n: 2, values: vec![0.0, 1.0, 1.0, 0.0] };
        assert_eq!(decode_table(&doc).unwrap().values, vec![0.0, 1.0, 1.0, 0.0]);
    }

    #[test]
    fn kind_tag_is_spelled_lowercase() {
        let g = zoo::build_maj3::<f64>();
        let text = Document::from(&g).to_json_string().unwrap();
        assert!(text.contains("\"kind\": \"gqbp\""), "got: {text}");
        assert!(text.contains("\"version\": 1"));
    }
}
