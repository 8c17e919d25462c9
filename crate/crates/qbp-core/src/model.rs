//! Program representations and validation.
//!
//! Four models share this module:
//!
//! * [`GqbpProgram`] — a *generalized quantum branching program*: a levelled
//!   DAG whose transition amplitudes `δ(v, a, v′)` depend on the bit
//!   `a = x_{L(v)}` queried by the source node. One measurement at the last
//!   level decides acceptance.
//! * [`AqbpProgram`] — an *alternative* formulation: a start vector in `C^d`
//!   and a sequence of transformations `⟨jᵢ, Uᵢ(0), Uᵢ(1)⟩` that apply
//!   `Uᵢ(x_{jᵢ})`, followed by projection onto accepting basis states.
//! * [`NqbpProgram`] — a *non-uniform* program over one node set `Q`
//!   partitioned into accepting / rejecting / non-terminal nodes, with a
//!   single transition function applied for a fixed number of steps and a
//!   three-outcome projective measurement after every application.
//! * [`ClassicalBp`] — a deterministic or probabilistic levelled branching
//!   program with stochastic routing.
//!
//! The central algebraic invariant is the **quantumly well-behaved**
//! condition: for every pair of source nodes `(v₁, v₂)` and every bit pair
//! `(a, b)` jointly realizable by some input — all four combinations when
//! the nodes query different bits, only `a = b` when they query the same
//! bit — the transition columns must satisfy
//!
//! ```text
//! Σ_{v′} δ(v₁, a, v′) · conj(δ(v₂, b, v′)) = [v₁ = v₂]
//! ```
//!
//! which is exactly the statement that the per-input step matrix is an
//! isometry for *every* input, checked in `O(w³)` instead of `O(2ⁿ)`.
//! Rectangular steps (|sources| < |targets|) are allowed; orthonormality of
//! the source columns is the only requirement.

use std::collections::BTreeSet;
use std::fmt;

use num_complex::Complex;

use crate::linalg::{dot_conj, norm_sqr, CVec, Mat};
use crate::{default_tol, error::Error, error::Result, Scalar};

/// Width / length / size of a program.
///
/// * width — maximum number of nodes in any level,
/// * length — number of level steps (queries along a path),
/// * size — total node count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProgramMeasures {
    pub width: usize,
    pub length: usize,
    pub size: usize,
}

impl fmt::Display for ProgramMeasures {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "width={} length={} size={}", self.width, self.length, self.size)
    }
}

/// One reported invariant violation: what, where, and by how much.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation<T: Scalar> {
    /// Short machine-readable category, e.g. `"initial-norm"`.
    pub kind: String,
    /// Human-readable location, e.g. `"step 2"`.
    pub location: String,
    /// Numeric size of the violation (0 for purely structural findings).
    pub magnitude: T,
}

impl<T: Scalar> fmt::Display for Violation<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {}: magnitude {:e}", self.kind, self.location, self.magnitude)
    }
}

/// Outcome of validating a program or circuit. `ok` holds exactly when
/// `violations` is empty; findings are data, not errors.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport<T: Scalar> {
    pub ok: bool,
    pub violations: Vec<Violation<T>>,
}

impl<T: Scalar> ValidationReport<T> {
    pub fn from_violations(violations: Vec<Violation<T>>) -> Self {
        Self { ok: violations.is_empty(), violations }
    }
}

impl<T: Scalar> fmt::Display for ValidationReport<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ok {
            write!(f, "ok")
        } else {
            for (i, v) in self.violations.iter().enumerate() {
                if i > 0 {
                    writeln!(f)?;
                }
                write!(f, "{v}")?;
            }
            Ok(())
        }
    }
}

/// Collects violations during validation.
pub(crate) struct Reporter<T: Scalar> {
    violations: Vec<Violation<T>>,
}

impl<T: Scalar> Reporter<T> {
    pub(crate) fn new() -> Self {
        Self { violations: Vec::new() }
    }

    pub(crate) fn structural(&mut self, kind: &str, location: String) {
        self.violations.push(Violation {
            kind: kind.to_string(),
            location,
            magnitude: T::zero(),
        });
    }

    pub(crate) fn numeric(&mut self, kind: &str, location: String, magnitude: T, tol: T) {
        if magnitude > tol {
            self.violations.push(Violation { kind: kind.to_string(), location, magnitude });
        }
    }

    pub(crate) fn finish(self) -> ValidationReport<T> {
        ValidationReport::from_violations(self.violations)
    }
}

/// One level step of a [`GqbpProgram`]: for every source node `v` and bit
/// `a`, the amplitude column `δ(v, a, ·)` over the target level.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelStep<T: Scalar> {
    /// `cols0[v][v′] = δ(v, 0, v′)`.
    pub cols0: Vec<CVec<T>>,
    /// `cols1[v][v′] = δ(v, 1, v′)`.
    pub cols1: Vec<CVec<T>>,
}

impl<T: Scalar> LevelStep<T> {
    /// Step with all-zero columns, `sources × targets`.
    pub fn zeros(sources: usize, targets: usize) -> Self {
        let z = vec![vec![Complex::new(T::zero(), T::zero()); targets]; sources];
        Self { cols0: z.clone(), cols1: z }
    }

    /// The column `δ(v, bit, ·)`.
    pub fn col(&self, v: usize, bit: u8) -> &CVec<T> {
        if bit == 0 {
            &self.cols0[v]
        } else {
            &self.cols1[v]
        }
    }

    pub fn col_mut(&mut self, v: usize, bit: u8) -> &mut CVec<T> {
        if bit == 0 {
            &mut self.cols0[v]
        } else {
            &mut self.cols1[v]
        }
    }

    /// Number of source nodes.
    pub fn sources(&self) -> usize {
        self.cols0.len()
    }

    /// Number of target nodes (0 only for an empty step).
    pub fn targets(&self) -> usize {
        self.cols0.first().map_or(0, Vec::len)
    }

    /// A step is *dummy* when no source distinguishes its queried bit:
    /// `δ(v, 0, ·) == δ(v, 1, ·)` (stored amplitudes compared exactly) for
    /// every source `v`. Dummy steps are removable without changing any
    /// acceptance probability.
    pub fn is_dummy(&self) -> bool {
        self.cols0 == self.cols1
    }

    /// The bit-independent matrix of a dummy step (targets × sources).
    pub fn dummy_matrix(&self) -> Option<Mat<T>> {
        if self.is_dummy() {
            Mat::from_cols(&self.cols0)
        } else {
            None
        }
    }

    fn shape_consistent(&self) -> bool {
        let t = self.targets();
        self.cols1.len() == self.cols0.len()
            && self.cols0.iter().all(|c| c.len() == t)
            && self.cols1.iter().all(|c| c.len() == t)
    }

    fn is_finite(&self) -> bool {
        self.cols0
            .iter()
            .chain(self.cols1.iter())
            .flatten()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

/// Largest deviation from pairwise orthonormality over all realizable
/// source/bit pairs of one level step (see the module docs for the exact
/// condition). Labels must cover every source node.
pub fn well_behaved_deviation<T: Scalar>(
    step: &LevelStep<T>,
    labels: &[Option<usize>],
) -> Result<T> {
    if labels.len() != step.sources() {
        return Err(Error::InvalidProgram(format!(
            "{} labels for {} source nodes",
            labels.len(),
            step.sources()
        )));
    }
    let labels: Vec<usize> = labels
        .iter()
        .enumerate()
        .map(|(v, l)| l.ok_or_else(|| Error::InvalidProgram(format!("source node {v} unlabeled"))))
        .collect::<Result<_>>()?;

    let mut worst = T::zero();
    for v1 in 0..step.sources() {
        for v2 in 0..step.sources() {
            for a in 0..2u8 {
                for b in 0..2u8 {
                    // Realizable iff the two nodes can see bits (a, b) on a
                    // common input: equal labels force a = b.
                    if labels[v1] == labels[v2] && a != b {
                        continue;
                    }
                    let ip = dot_conj(step.col(v1, a), step.col(v2, b));
                    let expected = if v1 == v2 { T::one() } else { T::zero() };
                    let dev = (ip - Complex::new(expected, T::zero())).norm();
                    worst = worst.max(dev);
                }
            }
        }
    }
    Ok(worst)
}

/// `true` iff one level step satisfies the quantumly well-behaved condition
/// within `tol`. Equivalent to: the step matrix assembled for any input is
/// an isometry.
pub fn is_quantumly_well_behaved<T: Scalar>(
    step: &LevelStep<T>,
    labels: &[Option<usize>],
    tol: T,
) -> Result<bool> {
    Ok(well_behaved_deviation(step, labels)? <= tol)
}

/// A generalized quantum branching program.
///
/// The tuple `(Q, E, |v₀⟩, L, δ, F)`: levelled node set `Q` (`levels`),
/// initial superposition `|v₀⟩` over level 0 (`initial`), variable labels
/// `L` on all non-terminal nodes (`labels`), amplitude transition function
/// `δ` (`steps`), and accepting set `F` inside the last level (`accept`).
#[derive(Debug, Clone, PartialEq)]
pub struct GqbpProgram<T: Scalar> {
    /// Number of input bits (labels range over `0..n`).
    pub n: usize,
    /// Node names, level 0 through level `l`.
    pub levels: Vec<Vec<String>>,
    /// `labels[i][v]`: bit queried by node `v` of level `i`; `None` exactly
    /// on the last level (terminal nodes query nothing).
    pub labels: Vec<Vec<Option<usize>>>,
    /// Initial amplitudes over level-0 nodes; unit 2-norm.
    pub initial: CVec<T>,
    /// `steps[i]` maps level `i` to level `i+1`.
    pub steps: Vec<LevelStep<T>>,
    /// Accepting node indices within the last level.
    pub accept: BTreeSet<usize>,
}

impl<T: Scalar> GqbpProgram<T> {
    /// Number of level steps `l`.
    pub fn length(&self) -> usize {
        self.steps.len()
    }

    /// Default node names `v{level}_{index}` for the given level sizes.
    pub fn auto_names(level_sizes: &[usize]) -> Vec<Vec<String>> {
        level_sizes
            .iter()
            .enumerate()
            .map(|(i, &w)| (0..w).map(|j| format!("v{i}_{j}")).collect())
            .collect()
    }

    /// Width / length / size.
    pub fn measures(&self) -> ProgramMeasures {
        ProgramMeasures {
            width: self.levels.iter().map(Vec::len).max().unwrap_or(0),
            length: self.length(),
            size: self.levels.iter().map(Vec::len).sum(),
        }
    }

    /// Validate with the default tolerance.
    pub fn validate(&self) -> ValidationReport<T> {
        self.validate_with(default_tol::<T>())
    }

    /// Check every structural and algebraic invariant; see module docs.
    pub fn validate_with(&self, tol: T) -> ValidationReport<T> {
        let mut rep = Reporter::new();
        if self.n == 0 {
            rep.structural("empty-input", "n = 0".into());
        }
        if self.levels.is_empty() {
            rep.structural("no-levels", "program has no levels".into());
            return rep.finish();
        }
        let l = self.levels.len() - 1;
        if self.labels.len() != self.levels.len() {
            rep.structural("labels-shape", "labels not parallel to levels".into());
            return rep.finish();
        }
        if self.steps.len() != l {
            rep.structural("steps-shape", format!("{} steps for {} level gaps", self.steps.len(), l));
            return rep.finish();
        }
        let mut seen = BTreeSet::new();
        for (i, level) in self.levels.iter().enumerate() {
            if level.is_empty() {
                rep.structural("empty-level", format!("level {i}"));
            }
            for name in level {
                if !seen.insert(name.clone()) {
                    rep.structural("duplicate-node", format!("node {name}"));
                }
            }
            if self.labels[i].len() != level.len() {
                rep.structural("labels-shape", format!("level {i}"));
                return rep.finish();
            }
            for (v, lab) in self.labels[i].iter().enumerate() {
                match (i == l, *lab) {
                    (false, None) => {
                        rep.structural("unlabeled-node", format!("level {i} node {v}"))
                    }
                    (true, Some(_)) => {
                        rep.structural("labeled-terminal", format!("level {i} node {v}"))
                    }
                    (false, Some(j)) if j >= self.n => {
                        rep.structural("label-range", format!("level {i} node {v} queries bit {j}"))
                    }
                    _ => {}
                }
            }
        }
        if self.initial.len() != self.levels[0].len() {
            rep.structural("initial-shape", "initial vector not aligned with level 0".into());
            return rep.finish();
        }
        if !self.initial.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            rep.structural("non-finite", "initial vector".into());
        }
        let norm_dev = (norm_sqr(&self.initial) - T::one()).abs();
        rep.numeric("initial-norm", "level 0".into(), norm_dev, tol);

        for (i, step) in self.steps.iter().enumerate() {
            let loc = format!("step {}", i + 1);
            if !step.shape_consistent()
                || step.sources() != self.levels[i].len()
                || step.targets() != self.levels[i + 1].len()
            {
                rep.structural("step-shape", loc);
                continue;
            }
            if !step.is_finite() {
                rep.structural("non-finite", loc.clone());
                continue;
            }
            match well_behaved_deviation(step, &self.labels[i]) {
                Ok(dev) => rep.numeric("well-behaved", loc, dev, tol),
                Err(_) => rep.structural("unlabeled-node", loc),
            }
        }
        for &v in &self.accept {
            if v >= self.levels[l].len() {
                rep.structural("accept-range", format!("node index {v}"));
            }
        }
        rep.finish()
    }
}

/// One step of an [`AqbpProgram`]: apply `u0` when bit `j` of the input is
/// 0, `u1` when it is 1.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumTransformation<T: Scalar> {
    /// Queried input bit.
    pub j: usize,
    pub u0: Mat<T>,
    pub u1: Mat<T>,
}

/// An alternative quantum branching program: dimension-`d` state evolved by
/// a sequence of [`QuantumTransformation`]s, then projected onto `accept`.
#[derive(Debug, Clone, PartialEq)]
pub struct AqbpProgram<T: Scalar> {
    /// Number of input bits.
    pub n: usize,
    /// State dimension (the program's width).
    pub d: usize,
    /// Start vector `|ψ₀⟩`, unit norm.
    pub initial: CVec<T>,
    pub steps: Vec<QuantumTransformation<T>>,
    /// Accepting basis indices in `0..d`.
    pub accept: BTreeSet<usize>,
}

impl<T: Scalar> AqbpProgram<T> {
    pub fn length(&self) -> usize {
        self.steps.len()
    }

    /// Width = `d`, length = number of steps, size = nodes of the unrolled
    /// levelled program.
    pub fn measures(&self) -> ProgramMeasures {
        ProgramMeasures {
            width: self.d,
            length: self.length(),
            size: self.d * (self.length() + 1),
        }
    }

    pub fn validate(&self) -> ValidationReport<T> {
        self.validate_with(default_tol::<T>())
    }

    pub fn validate_with(&self, tol: T) -> ValidationReport<T> {
        let mut rep = Reporter::new();
        if self.n == 0 {
            rep.structural("empty-input", "n = 0".into());
        }
        if self.d == 0 {
            rep.structural("empty-state", "d = 0".into());
            return rep.finish();
        }
        if self.initial.len() != self.d {
            rep.structural("initial-shape", "initial vector not of dimension d".into());
            return rep.finish();
        }
        if !self.initial.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            rep.structural("non-finite", "initial vector".into());
        }
        rep.numeric("initial-norm", "initial".into(), (norm_sqr(&self.initial) - T::one()).abs(), tol);
        for (i, step) in self.steps.iter().enumerate() {
            let loc = format!("step {}", i + 1);
            if step.j >= self.n {
                rep.structural("label-range", format!("{loc} queries bit {}", step.j));
            }
            for (name, u) in [("u0", &step.u0), ("u1", &step.u1)] {
                if u.rows() != self.d || u.cols() != self.d {
                    rep.structural("matrix-shape", format!("{loc} {name}"));
                    continue;
                }
                if !u.is_finite() {
                    rep.structural("non-finite", format!("{loc} {name}"));
                    continue;
                }
                rep.numeric("non-unitary", format!("{loc} {name}"), u.isometry_deviation(), tol);
            }
        }
        for &v in &self.accept {
            if v >= self.d {
                rep.structural("accept-range", format!("basis index {v}"));
            }
        }
        rep.finish()
    }
}

/// Classification of an [`NqbpProgram`] node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    /// Accepting: measured mass here ends the run with "accept".
    Acc,
    /// Rejecting: measured mass here ends the run with "reject".
    Rej,
    /// Non-terminal: evolution continues.
    Non,
}

/// A non-uniform quantum branching program: one node set `Q` with a single
/// transition function applied `steps` times; after every application the
/// state is measured against the accept / reject / continue decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct NqbpProgram<T: Scalar> {
    /// Number of input bits.
    pub n: usize,
    /// Node names (all of `Q`).
    pub nodes: Vec<String>,
    /// Partition of `Q` into accepting / rejecting / non-terminal nodes.
    pub kinds: Vec<NodeKind>,
    /// Queried bit per node; every node carries a label (labels on
    /// accepting / rejecting nodes are inert but must be in range).
    pub labels: Vec<usize>,
    /// Start node `v₀`.
    pub start: usize,
    /// `delta0.col(v) = δ(v, 0, ·)` over all of `Q`.
    pub delta0: Mat<T>,
    /// `delta1.col(v) = δ(v, 1, ·)`.
    pub delta1: Mat<T>,
    /// Length budget: number of transition applications. Must be ≥ 1.
    pub steps: usize,
}

impl<T: Scalar> NqbpProgram<T> {
    /// Node count `|Q|`.
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Indices of nodes with the given kind.
    pub fn nodes_of_kind(&self, kind: NodeKind) -> Vec<usize> {
        (0..self.node_count()).filter(|&v| self.kinds[v] == kind).collect()
    }

    /// Width = size = `|Q|`, length = `steps`.
    pub fn measures(&self) -> ProgramMeasures {
        ProgramMeasures {
            width: self.node_count(),
            length: self.steps,
            size: self.node_count(),
        }
    }

    /// View the full transition function as a single level step `Q → Q`,
    /// reusing the pairwise well-behavedness machinery.
    pub fn as_level_step(&self) -> LevelStep<T> {
        LevelStep {
            cols0: (0..self.node_count()).map(|v| self.delta0.col(v)).collect(),
            cols1: (0..self.node_count()).map(|v| self.delta1.col(v)).collect(),
        }
    }

    pub fn validate(&self) -> ValidationReport<T> {
        self.validate_with(default_tol::<T>())
    }

    pub fn validate_with(&self, tol: T) -> ValidationReport<T> {
        let mut rep = Reporter::new();
        let q = self.node_count();
        if self.n == 0 {
            rep.structural("empty-input", "n = 0".into());
        }
        if q == 0 {
            rep.structural("no-nodes", "empty node set".into());
            return rep.finish();
        }
        if self.steps == 0 {
            rep.structural("zero-steps", "step budget must be positive".into());
        }
        let mut seen = BTreeSet::new();
        for name in &self.nodes {
            if !seen.insert(name.clone()) {
                rep.structural("duplicate-node", format!("node {name}"));
            }
        }
        if self.kinds.len() != q || self.labels.len() != q {
            rep.structural("partition-shape", "kinds/labels not parallel to nodes".into());
            return rep.finish();
        }
        for (v, &lab) in self.labels.iter().enumerate() {
            if lab >= self.n {
                rep.structural("label-range", format!("node {v} queries bit {lab}"));
            }
        }
        if self.start >= q {
            rep.structural("start-range", format!("start index {}", self.start));
        }
        for (name, m) in [("bit 0", &self.delta0), ("bit 1", &self.delta1)] {
            if m.rows() != q || m.cols() != q {
                rep.structural("matrix-shape", format!("transition matrix for {name}"));
                return rep.finish();
            }
            if !m.is_finite() {
                rep.structural("non-finite", format!("transition matrix for {name}"));
            }
        }
        let step = self.as_level_step();
        let labels: Vec<Option<usize>> = self.labels.iter().map(|&l| Some(l)).collect();
        match well_behaved_deviation(&step, &labels) {
            Ok(dev) => rep.numeric("well-behaved", "transition function".into(), dev, tol),
            Err(_) => rep.structural("unlabeled-node", "transition function".into()),
        }
        rep.finish()
    }
}

/// One level step of a [`ClassicalBp`]: routing probabilities per source
/// node and queried bit, `rows0[v][v′] = Pr[v → v′ | bit = 0]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalStep<T: Scalar> {
    pub rows0: Vec<Vec<T>>,
    pub rows1: Vec<Vec<T>>,
}

impl<T: Scalar> ClassicalStep<T> {
    pub fn row(&self, v: usize, bit: u8) -> &Vec<T> {
        if bit == 0 {
            &self.rows0[v]
        } else {
            &self.rows1[v]
        }
    }

    fn shape_consistent(&self) -> bool {
        let t = self.rows0.first().map_or(0, Vec::len);
        self.rows1.len() == self.rows0.len()
            && self.rows0.iter().all(|r| r.len() == t)
            && self.rows1.iter().all(|r| r.len() == t)
    }
}

/// `true` iff every (node, bit) routing row is non-negative and sums to 1
/// within `tol` — the classically well-behaved condition.
pub fn is_classically_well_behaved<T: Scalar>(steps: &[ClassicalStep<T>], tol: T) -> bool {
    steps.iter().all(|s| {
        s.rows0.iter().chain(s.rows1.iter()).all(|row| {
            row.iter().all(|&p| p >= -tol)
                && (row.iter().fold(T::zero(), |a, &p| a + p) - T::one()).abs() <= tol
        })
    })
}

/// A classical (deterministic or probabilistic) levelled branching program
/// with accepting and rejecting sinks in the last level.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalBp<T: Scalar> {
    pub n: usize,
    pub levels: Vec<Vec<String>>,
    /// Parallel to `levels`; `None` exactly on the last level.
    pub labels: Vec<Vec<Option<usize>>>,
    /// Start distribution over level-0 nodes.
    pub start: Vec<T>,
    pub steps: Vec<ClassicalStep<T>>,
    /// Accepting sinks `F_a` (last-level indices).
    pub accept: BTreeSet<usize>,
    /// Rejecting sinks `F_r`.
    pub reject: BTreeSet<usize>,
}

impl<T: Scalar> ClassicalBp<T> {
    pub fn length(&self) -> usize {
        self.steps.len()
    }

    pub fn measures(&self) -> ProgramMeasures {
        ProgramMeasures {
            width: self.levels.iter().map(Vec::len).max().unwrap_or(0),
            length: self.length(),
            size: self.levels.iter().map(Vec::len).sum(),
        }
    }

    /// `true` when every routing probability is (within `tol` of) 0 or 1.
    pub fn is_deterministic(&self, tol: T) -> bool {
        self.steps.iter().all(|s| {
            s.rows0
                .iter()
                .chain(s.rows1.iter())
                .flatten()
                .all(|&p| p.abs() <= tol || (p - T::one()).abs() <= tol)
        }) && self.start.iter().all(|&p| p.abs() <= tol || (p - T::one()).abs() <= tol)
    }

    pub fn validate(&self) -> ValidationReport<T> {
        self.validate_with(default_tol::<T>())
    }

    pub fn validate_with(&self, tol: T) -> ValidationReport<T> {
        let mut rep = Reporter::new();
        if self.n == 0 {
            rep.structural("empty-input", "n = 0".into());
        }
        if self.levels.is_empty() {
            rep.structural("no-levels", "program has no levels".into());
            return rep.finish();
        }
        let l = self.levels.len() - 1;
        if self.labels.len() != self.levels.len() || self.steps.len() != l {
            rep.structural("shape", "levels/labels/steps misaligned".into());
            return rep.finish();
        }
        let mut seen = BTreeSet::new();
        for (i, level) in self.levels.iter().enumerate() {
            for name in level {
                if !seen.insert(name.clone()) {
                    rep.structural("duplicate-node", format!("node {name}"));
                }
            }
            if self.labels[i].len() != level.len() {
                rep.structural("labels-shape", format!("level {i}"));
                return rep.finish();
            }
            for (v, lab) in self.labels[i].iter().enumerate() {
                match (i == l, *lab) {
                    (false, None) => rep.structural("unlabeled-node", format!("level {i} node {v}")),
                    (true, Some(_)) => rep.structural("labeled-terminal", format!("level {i} node {v}")),
                    (false, Some(j)) if j >= self.n => {
                        rep.structural("label-range", format!("level {i} node {v} queries bit {j}"))
                    }
                    _ => {}
                }
            }
        }
        if self.start.len() != self.levels[0].len() {
            rep.structural("start-shape", "start distribution not aligned with level 0".into());
            return rep.finish();
        }
        let neg = self.start.iter().fold(T::zero(), |m, &p| m.max(-p));
        rep.numeric("negative-probability", "start distribution".into(), neg, tol);
        let sum_dev = (self.start.iter().fold(T::zero(), |a, &p| a + p) - T::one()).abs();
        rep.numeric("start-norm", "start distribution".into(), sum_dev, tol);

        for (i, step) in self.steps.iter().enumerate() {
            let loc = format!("step {}", i + 1);
            if !step.shape_consistent()
                || step.rows0.len() != self.levels[i].len()
                || step.rows0.first().map_or(0, Vec::len) != self.levels[i + 1].len()
            {
                rep.structural("step-shape", loc);
                continue;
            }
            for (v, bit) in (0..step.rows0.len()).flat_map(|v| [(v, 0u8), (v, 1u8)]) {
                let row = step.row(v, bit);
                let loc = format!("step {} node {v} bit {bit}", i + 1);
                let neg = row.iter().fold(T::zero(), |m, &p| m.max(-p));
                rep.numeric("negative-probability", loc.clone(), neg, tol);
                let dev = (row.iter().fold(T::zero(), |a, &p| a + p) - T::one()).abs();
                rep.numeric("row-sum", loc, dev, tol);
            }
        }
        let last = self.levels[l].len();
        for &v in self.accept.iter().chain(self.reject.iter()) {
            if v >= last {
                rep.structural("sink-range", format!("node index {v}"));
            }
        }
        if self.accept.intersection(&self.reject).next().is_some() {
            rep.structural("sink-overlap", "accept ∩ reject nonempty".into());
        }
        if self.accept.len() + self.reject.len() != last {
            rep.structural("sink-partition", "accept ∪ reject must cover the last level".into());
        }
        rep.finish()
    }
}
