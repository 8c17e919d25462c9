//! Exact state-vector evolution and measurement semantics.
//!
//! Inputs `x ∈ {0,1}ⁿ` are packed into `u64` masks little-endian: bit `i`
//! of the mask is `xᵢ`, and truth tables are indexed by that mask. All
//! simulation is exact linear algebra — no sampling.
//!
//! * GQBP: `|ψᵢ⟩ = Uᵢ|ψᵢ₋₁⟩` with the per-input step matrix assembled from
//!   the queried bits, then `P_accept = Σ_{v∈F} |ψ_l[v]|²`.
//! * AQBP: apply each step's `U(x_{jᵢ})` to the start vector, then project
//!   onto the accepting basis states.
//! * NQBP: apply the full transition matrix, measure against the
//!   accept / reject / continue decomposition after **every** application,
//!   and continue with the unnormalized non-terminal branch. The leftover
//!   squared norm after the last step is reported as `p_residual`.
//! * Classical BP: follow unique edges (deterministic) or propagate the
//!   distribution level by level (probabilistic).

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::{norm_sqr, zero_vec, CVec, Mat};
use crate::model::{
    AqbpProgram, ClassicalBp, GqbpProgram, NodeKind, NqbpProgram,
};
use crate::{default_tol, Scalar, DEFAULT_MAX_N};

/// Bit `i` of the input mask `x` (little-endian packing).
pub fn bit(x: u64, i: usize) -> u8 {
    ((x >> i) & 1) as u8
}

/// Render an input mask as the bit string `x₀x₁…x_{n−1}`.
pub fn format_input(x: u64, n: usize) -> String {
    (0..n).map(|i| if bit(x, i) == 1 { '1' } else { '0' }).collect()
}

/// Parse a bit string (`'0'`/`'1'`, character `i` is `xᵢ`) into a mask,
/// checking its length against the expected number of bits.
pub fn parse_input(s: &str, n: usize) -> Result<u64> {
    if s.len() != n {
        return Err(Error::InputLength { expected: n, got: s.len() });
    }
    let mut x = 0u64;
    for (i, ch) in s.chars().enumerate() {
        match ch {
            '0' => {}
            '1' => x |= 1 << i,
            _ => return Err(Error::BadParameter(format!("input character {ch:?} is not a bit"))),
        }
    }
    Ok(x)
}

/// Current cap on exhaustive enumeration: `QBP_MAX_N` when set to a valid
/// number, otherwise [`DEFAULT_MAX_N`].
pub fn enumeration_cap() -> usize {
    std::env::var("QBP_MAX_N").ok().and_then(|v| v.parse().ok()).unwrap_or(DEFAULT_MAX_N)
}

fn check_cap(n: usize) -> Result<()> {
    let cap = enumeration_cap();
    if n > cap {
        return Err(Error::CapExceeded { n, cap });
    }
    Ok(())
}

/// A labelled state vector: amplitudes aligned with named basis elements
/// (node names for programs, basis-index strings for circuits).
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<T: Scalar> {
    pub basis: Vec<String>,
    pub amps: CVec<T>,
}

impl<T: Scalar> StateVector<T> {
    /// Squared 2-norm of the amplitudes.
    pub fn norm_sqr(&self) -> T {
        norm_sqr(&self.amps)
    }
}

/// Outcome of a non-uniform program run: accumulated accept and reject
/// masses plus whatever squared norm never left the non-terminal subspace.
/// The three components sum to 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NqbpOutcome<T: Scalar> {
    pub p_acc: T,
    pub p_rej: T,
    pub p_residual: T,
}

impl<T: Scalar> NqbpOutcome<T> {
    /// `p_acc + p_rej + p_residual`; 1 within tolerance for valid programs.
    pub fn total(&self) -> T {
        self.p_acc + self.p_rej + self.p_residual
    }
}

/// Acceptance values over all `2ⁿ` inputs, indexed by the little-endian
/// input mask.
#[derive(Debug, Clone, PartialEq)]
pub struct BooleanTable<T: Scalar> {
    pub n: usize,
    pub values: Vec<T>,
}

impl<T: Scalar> BooleanTable<T> {
    /// Build from raw values; their count must be `2ⁿ`.
    pub fn new(n: usize, values: Vec<T>) -> Result<Self> {
        if values.len() != 1usize << n {
            return Err(Error::BadParameter(format!(
                "{} values for a {n}-bit table (expected {})",
                values.len(),
                1usize << n
            )));
        }
        Ok(Self { n, values })
    }

    /// The table value on input mask `x`.
    pub fn value(&self, x: u64) -> T {
        self.values[x as usize]
    }
}

/// What a truth table should contain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableKind {
    /// Exact 0/1 values; errors if any acceptance probability is not
    /// within tolerance of 0 or 1.
    Boolean,
    /// Raw acceptance probabilities.
    Probability,
}

/// Anything with an acceptance probability per input: every program model
/// and every query circuit. The brute-force oracle behind truth tables and
/// equivalence checking.
///
/// Implementations assume a structurally consistent (validated) object;
/// they do not re-validate per input.
pub trait AcceptanceModel<T: Scalar> {
    /// Number of input bits `n`.
    fn input_bits(&self) -> usize;

    /// Probability of acceptance on the input mask `x` (only the low `n`
    /// bits are read).
    fn accept_prob(&self, x: u64) -> T;
}

// ---------------------------------------------------------------------------
// GQBP evolution
// ---------------------------------------------------------------------------

/// Final-level amplitudes without validation (internal fast path).
pub(crate) fn evolve_gqbp<T: Scalar>(g: &GqbpProgram<T>, x: u64) -> CVec<T> {
    let mut psi = g.initial.clone();
    for (i, step) in g.steps.iter().enumerate() {
        let mut next = zero_vec::<T>(step.targets());
        for (v, amp) in psi.iter().enumerate() {
            if *amp == Complex::new(T::zero(), T::zero()) {
                continue;
            }
            let b = bit(x, g.labels[i][v].expect("non-terminal node labeled"));
            for (t, d) in step.col(v, b).iter().enumerate() {
                next[t] = next[t] + *amp * *d;
            }
        }
        psi = next;
    }
    psi
}

/// The `|level i| × |level i−1|` matrix applied at step `i` (1-based) on
/// input `x`: column `v` is `δ(v, x_{L(v)}, ·)`. An isometry for valid
/// programs.
pub fn step_matrix<T: Scalar>(g: &GqbpProgram<T>, i: usize, x: u64) -> Result<Mat<T>> {
    if i == 0 || i > g.length() {
        return Err(Error::StepIndex { index: i, length: g.length() });
    }
    let step = &g.steps[i - 1];
    let cols: Vec<CVec<T>> = (0..step.sources())
        .map(|v| {
            let b = bit(x, g.labels[i - 1][v].expect("non-terminal node labeled"));
            step.col(v, b).clone()
        })
        .collect();
    Ok(Mat::from_cols(&cols).expect("validated step columns share the target dimension"))
}

/// Run a GQBP on input `x`: the final-level state `|ψ_l⟩`.
///
/// The program is validated up front; structurally or algebraically broken
/// programs are rejected rather than simulated.
pub fn run_gqbp<T: Scalar>(g: &GqbpProgram<T>, x: u64) -> Result<StateVector<T>> {
    let report = g.validate();
    if !report.ok {
        return Err(Error::InvalidProgram(report.to_string()));
    }
    Ok(StateVector {
        basis: g.levels.last().expect("validated program has levels").clone(),
        amps: evolve_gqbp(g, x),
    })
}

/// Acceptance probability `Σ_{v∈F} |ψ_l[v]|²` of a GQBP on `x`.
pub fn accept_prob_gqbp<T: Scalar>(g: &GqbpProgram<T>, x: u64) -> Result<T> {
    let psi = run_gqbp(g, x)?;
    Ok(g.accept.iter().fold(T::zero(), |acc, &v| acc + psi.amps[v].norm_sqr()))
}

impl<T: Scalar> AcceptanceModel<T> for GqbpProgram<T> {
    fn input_bits(&self) -> usize {
        self.n
    }

    fn accept_prob(&self, x: u64) -> T {
        let psi = evolve_gqbp(self, x);
        self.accept.iter().fold(T::zero(), |acc, &v| acc + psi[v].norm_sqr())
    }
}

// ---------------------------------------------------------------------------
// AQBP evolution
// ---------------------------------------------------------------------------

fn evolve_aqbp<T: Scalar>(a: &AqbpProgram<T>, x: u64) -> CVec<T> {
    let mut psi = a.initial.clone();
    for step in &a.steps {
        let u = if bit(x, step.j) == 0 { &step.u0 } else { &step.u1 };
        psi = u.mul_vec(&psi);
    }
    psi
}

/// Acceptance probability of an AQBP on `x`: apply each step's `U(x_{jᵢ})`
/// in order, then `‖M|ψ_x⟩‖²` for the projection `M` onto `accept`.
pub fn run_aqbp<T: Scalar>(a: &AqbpProgram<T>, x: u64) -> Result<T> {
    let report = a.validate();
    if !report.ok {
        return Err(Error::InvalidProgram(report.to_string()));
    }
    let psi = evolve_aqbp(a, x);
    Ok(a.accept.iter().fold(T::zero(), |acc, &v| acc + psi[v].norm_sqr()))
}

impl<T: Scalar> AcceptanceModel<T> for AqbpProgram<T> {
    fn input_bits(&self) -> usize {
        self.n
    }

    fn accept_prob(&self, x: u64) -> T {
        let psi = evolve_aqbp(self, x);
        self.accept.iter().fold(T::zero(), |acc, &v| acc + psi[v].norm_sqr())
    }
}

// ---------------------------------------------------------------------------
// NQBP evolution
// ---------------------------------------------------------------------------

pub(crate) fn run_nqbp_raw<T: Scalar>(p: &NqbpProgram<T>, x: u64) -> NqbpOutcome<T> {
    let q = p.node_count();
    let mut psi = zero_vec::<T>(q);
    psi[p.start] = Complex::new(T::one(), T::zero());
    let mut p_acc = T::zero();
    let mut p_rej = T::zero();
    for _ in 0..p.steps {
        // One application of the transition function for this input.
        let mut next = zero_vec::<T>(q);
        for (v, amp) in psi.iter().enumerate() {
            if *amp == Complex::new(T::zero(), T::zero()) {
                continue;
            }
            let m = if bit(x, p.labels[v]) == 0 { &p.delta0 } else { &p.delta1 };
            for t in 0..q {
                next[t] = next[t] + *amp * m[(t, v)];
            }
        }
        // Three-outcome measurement: bank terminal mass, keep the
        // unnormalized projection onto the non-terminal subspace.
        for (v, amp) in next.iter_mut().enumerate() {
            match p.kinds[v] {
                NodeKind::Acc => {
                    p_acc += amp.norm_sqr();
                    *amp = Complex::new(T::zero(), T::zero());
                }
                NodeKind::Rej => {
                    p_rej += amp.norm_sqr();
                    *amp = Complex::new(T::zero(), T::zero());
                }
                NodeKind::Non => {}
            }
        }
        psi = next;
    }
    NqbpOutcome { p_acc, p_rej, p_residual: norm_sqr(&psi) }
}

/// Run a non-uniform program: `steps` applications of the transition
/// function, each followed by the three-outcome projective measurement.
pub fn run_nqbp<T: Scalar>(p: &NqbpProgram<T>, x: u64) -> Result<NqbpOutcome<T>> {
    let report = p.validate();
    if !report.ok {
        return Err(Error::InvalidProgram(report.to_string()));
    }
    Ok(run_nqbp_raw(p, x))
}

impl<T: Scalar> AcceptanceModel<T> for NqbpProgram<T> {
    fn input_bits(&self) -> usize {
        self.n
    }

    fn accept_prob(&self, x: u64) -> T {
        run_nqbp_raw(self, x).p_acc
    }
}

// ---------------------------------------------------------------------------
// Classical evolution
// ---------------------------------------------------------------------------

fn det_index<T: Scalar>(row: &[T], tol: T, location: &str) -> Result<usize> {
    let mut hit = None;
    for (i, &p) in row.iter().enumerate() {
        if (p - T::one()).abs() <= tol {
            if hit.is_some() {
                return Err(Error::NotDeterministic {
                    location: location.to_string(),
                    p: p.to_f64().unwrap_or(f64::NAN),
                });
            }
            hit = Some(i);
        } else if p.abs() > tol {
            return Err(Error::NotDeterministic {
                location: location.to_string(),
                p: p.to_f64().unwrap_or(f64::NAN),
            });
        }
    }
    hit.ok_or_else(|| Error::NotDeterministic { location: location.to_string(), p: 0.0 })
}

/// Follow the unique 0/1 edges of a deterministic branching program;
/// `true` iff the reached sink accepts. Errors on any probability that is
/// not 0 or 1.
pub fn run_deterministic<T: Scalar>(b: &ClassicalBp<T>, x: u64) -> Result<bool> {
    let report = b.validate();
    if !report.ok {
        return Err(Error::InvalidProgram(report.to_string()));
    }
    let tol = default_tol::<T>();
    let mut cur = det_index(&b.start, tol, "start distribution")?;
    for (i, step) in b.steps.iter().enumerate() {
        let bto = bit(x, b.labels[i][cur].expect("non-terminal node labeled"));
        let loc = format!("step {} node {cur} bit {bto}", i + 1);
        cur = det_index(step.row(cur, bto), tol, &loc)?;
    }
    Ok(b.accept.contains(&cur))
}

fn propagate_classical<T: Scalar>(b: &ClassicalBp<T>, x: u64) -> Vec<T> {
    let mut dist = b.start.clone();
    for (i, step) in b.steps.iter().enumerate() {
        let mut next = vec![T::zero(); step.rows0.first().map_or(0, Vec::len)];
        for (v, &mass) in dist.iter().enumerate() {
            if mass == T::zero() {
                continue;
            }
            let bto = bit(x, b.labels[i][v].expect("non-terminal node labeled"));
            for (t, &p) in step.row(v, bto).iter().enumerate() {
                next[t] += mass * p;
            }
        }
        dist = next;
    }
    dist
}

/// Probability that a (possibly probabilistic) branching program reaches an
/// accepting sink on input `x`.
pub fn run_probabilistic<T: Scalar>(b: &ClassicalBp<T>, x: u64) -> Result<T> {
    let report = b.validate();
    if !report.ok {
        return Err(Error::InvalidProgram(report.to_string()));
    }
    let dist = propagate_classical(b, x);
    Ok(b.accept.iter().fold(T::zero(), |acc, &v| acc + dist[v]))
}

impl<T: Scalar> AcceptanceModel<T> for ClassicalBp<T> {
    fn input_bits(&self) -> usize {
        self.n
    }

    fn accept_prob(&self, x: u64) -> T {
        let dist = propagate_classical(self, x);
        self.accept.iter().fold(T::zero(), |acc, &v| acc + dist[v])
    }
}

// ---------------------------------------------------------------------------
// Truth tables
// ---------------------------------------------------------------------------

/// Exhaustively simulate all `2ⁿ` inputs.
///
/// `TableKind::Boolean` demands every acceptance probability be within the
/// default tolerance of 0 or 1 (exact computation) and rounds; otherwise
/// the offending input is reported as an error.
pub fn truth_table<T: Scalar>(
    m: &dyn AcceptanceModel<T>,
    kind: TableKind,
) -> Result<BooleanTable<T>> {
    let n = m.input_bits();
    check_cap(n)?;
    let tol = default_tol::<T>();
    let mut values = Vec::with_capacity(1usize << n);
    for x in 0..(1u64 << n) {
        let p = m.accept_prob(x);
        match kind {
            TableKind::Probability => values.push(p),
            TableKind::Boolean => {
                if p.abs() <= tol {
                    values.push(T::zero());
                } else if (p - T::one()).abs() <= tol {
                    values.push(T::one());
                } else {
                    return Err(Error::NotBoolean {
                        input: x,
                        value: p.to_f64().unwrap_or(f64::NAN),
                    });
                }
            }
        }
    }
    BooleanTable::new(n, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::basis_vec;
    use crate::model::{ClassicalStep, LevelStep};
    use num_complex::Complex64;
    use std::collections::BTreeSet;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    /// One node querying x₀, routing to reject (0) / accept (1).
    fn one_bit_router() -> ClassicalBp<f64> {
        ClassicalBp {
            n: 1,
            levels: vec![vec!["s".into()], vec!["r".into(), "a".into()]],
            labels: vec![vec![Some(0)], vec![None, None]],
            start: vec![1.0],
            steps: vec![ClassicalStep {
                rows0: vec![vec![1.0, 0.0]],
                rows1: vec![vec![0.0, 1.0]],
            }],
            accept: BTreeSet::from([1]),
            reject: BTreeSet::from([0]),
        }
    }

    #[test]
    fn input_mask_roundtrip() {
        // Character i of the string is x_i; bit i of the mask is x_i.
        let x = parse_input("110", 3).unwrap();
        assert_eq!(x, 0b011);
        assert_eq!(format_input(x, 3), "110");
        assert_eq!(bit(x, 0), 1);
        assert_eq!(bit(x, 2), 0);
    }

    #[test]
    fn parse_input_rejects_wrong_length_and_chars() {
        assert!(matches!(parse_input("01", 3), Err(Error::InputLength { expected: 3, got: 2 })));
        assert!(parse_input("0x1", 3).is_err());
    }

    #[test]
    fn deterministic_router_reads_its_bit() {
        let b = one_bit_router();
        assert!(run_deterministic(&b, 0b1).unwrap());
        assert!(!run_deterministic(&b, 0b0).unwrap());
        // Probabilistic semantics agree on deterministic programs.
        assert_eq!(run_probabilistic(&b, 0b1).unwrap(), 1.0);
        assert_eq!(run_probabilistic(&b, 0b0).unwrap(), 0.0);
    }

    #[test]
    fn coin_flip_program_accepts_half() {
        let mut b = one_bit_router();
        b.steps[0] = ClassicalStep {
            rows0: vec![vec![0.5, 0.5]],
            rows1: vec![vec![0.5, 0.5]],
        };
        assert!((run_probabilistic(&b, 0).unwrap() - 0.5).abs() < 1e-12);
        // …and the deterministic runner refuses it.
        assert!(matches!(run_deterministic(&b, 0), Err(Error::NotDeterministic { .. })));
    }

    #[test]
    fn single_step_aqbp_is_a_bit_flip() {
        let x_gate = Mat::from_rows(&[vec![c(0.0), c(1.0)], vec![c(1.0), c(0.0)]]).unwrap();
        let a = AqbpProgram::<f64> {
            n: 1,
            d: 2,
            initial: basis_vec(2, 0),
            steps: vec![crate::model::QuantumTransformation {
                j: 0,
                u0: Mat::identity(2),
                u1: x_gate,
            }],
            accept: BTreeSet::from([1]),
        };
        assert!((run_aqbp(&a, 0b1).unwrap() - 1.0).abs() < 1e-12);
        assert!(run_aqbp(&a, 0b0).unwrap().abs() < 1e-12);
    }

    #[test]
    fn nqbp_closed_rotation_never_terminates() {
        // Two non-terminal nodes swapped by the transition: all mass stays
        // in the continue subspace, so everything lands in p_residual.
        let swap =
            Mat::from_rows(&[vec![c(0.0), c(1.0)], vec![c(1.0), c(0.0)]]).unwrap();
        let p = NqbpProgram::<f64> {
            n: 1,
            nodes: vec!["a".into(), "b".into()],
            kinds: vec![NodeKind::Non, NodeKind::Non],
            labels: vec![0, 0],
            start: 0,
            delta0: swap.clone(),
            delta1: swap,
            steps: 3,
        };
        let out = run_nqbp(&p, 0).unwrap();
        assert_eq!(out.p_acc, 0.0);
        assert_eq!(out.p_rej, 0.0);
        assert!((out.p_residual - 1.0).abs() < 1e-12);
        assert!((out.total() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn nqbp_measures_after_each_application() {
        // start (non) → acc under both bits; one step banks all mass.
        let m = Mat::from_rows(&[vec![c(0.0), c(1.0)], vec![c(1.0), c(0.0)]]).unwrap();
        let p = NqbpProgram::<f64> {
            n: 1,
            nodes: vec!["s".into(), "t".into()],
            kinds: vec![NodeKind::Non, NodeKind::Acc],
            labels: vec![0, 0],
            start: 0,
            delta0: m.clone(),
            delta1: m,
            steps: 2,
        };
        let out = run_nqbp(&p, 0).unwrap();
        // After application 1 the mass is measured in acc and removed, so
        // application 2 acts on the zero vector.
        assert!((out.p_acc - 1.0).abs() < 1e-12);
        assert_eq!(out.p_residual, 0.0);
    }

    #[test]
    fn step_matrix_bounds_are_checked() {
        let g = GqbpProgram::<f64> {
            n: 1,
            levels: vec![vec!["a".into()], vec!["b".into()]],
            labels: vec![vec![Some(0)], vec![None]],
            initial: vec![c(1.0)],
            steps: vec![LevelStep { cols0: vec![vec![c(1.0)]], cols1: vec![vec![c(-1.0)]] }],
            accept: BTreeSet::new(),
        };
        assert!(step_matrix(&g, 0, 0).is_err());
        assert!(step_matrix(&g, 2, 0).is_err());
        let m = step_matrix(&g, 1, 0b1).unwrap();
        assert_eq!(m[(0, 0)], c(-1.0));
    }

    #[test]
    fn step_matrix_depends_only_on_queried_bits() {
        let g = GqbpProgram::<f64> {
            n: 2,
            levels: vec![vec!["a".into()], vec!["b".into()]],
            labels: vec![vec![Some(0)], vec![None]],
            initial: vec![c(1.0)],
            steps: vec![LevelStep { cols0: vec![vec![c(1.0)]], cols1: vec![vec![c(-1.0)]] }],
            accept: BTreeSet::new(),
        };
        // Inputs 00 and 10 agree on x₀ (bit 0 differs only in x₁).
        assert_eq!(step_matrix(&g, 1, 0b00).unwrap(), step_matrix(&g, 1, 0b10).unwrap());
    }

    #[test]
    fn run_rejects_invalid_programs() {
        let g = GqbpProgram::<f64> {
            n: 1,
            levels: vec![vec!["a".into()]],
            labels: vec![vec![None]],
            initial: vec![c(0.5)],
            steps: vec![],
            accept: BTreeSet::new(),
        };
        assert!(matches!(run_gqbp(&g, 0), Err(Error::InvalidProgram(_))));
    }

    #[test]
    fn boolean_table_rejects_intermediate_probabilities() {
        let mut b = one_bit_router();
        b.steps[0] =
            ClassicalStep { rows0: vec![vec![0.5, 0.5]], rows1: vec![vec![0.5, 0.5]] };
        let err = truth_table(&b, TableKind::Boolean).unwrap_err();
        assert!(matches!(err, Error::NotBoolean { .. }));
        // The probability table is fine with it.
        let t = truth_table(&b, TableKind::Probability).unwrap();
        assert_eq!(t.values.len(), 2);
    }

    #[test]
    fn truth_table_little_endian_order() {
        let b = one_bit_router();
        let t = truth_table(&b, TableKind::Boolean).unwrap();
        assert_eq!(t.values, vec![0.0, 1.0]);
    }
}
