//! Canonical example programs and seeded random-instance generators.
//!
//! The three named constructions — parity, 3-bit majority, and the
//! Deutsch–Jozsa distinguisher — are exact GQBPs of provably optimal
//! length, and double as fixed points for the test suite. The `random_*`
//! generators produce valid-by-construction instances, deterministic in
//! their seed (ChaCha8), for property sweeps and transpiler checks.

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circuit::{CircuitOp, OracleModel, QueryCircuit, Register};
use crate::error::{Error, Result};
use crate::linalg::{basis_vec, random_unit_vec, random_unitary, CVec};
use crate::model::{
    AqbpProgram, GqbpProgram, LevelStep, QuantumTransformation,
};
use crate::Scalar;

fn re<T: Scalar>(v: f64) -> Complex<T> {
    Complex::new(T::from_f64(v).unwrap(), T::zero())
}

/// Width-2, length-`n/2` GQBP computing the parity `x₀ ⊕ … ⊕ x_{n−1}`
/// exactly. Requires even `n ≥ 2`.
///
/// The two branches accumulate `(−1)`-phases for the even- and
/// odd-indexed halves of the input in parallel — node `v_{i,j}` queries
/// `x_{2i+j}` — and the final step interferes them Hadamard-style so that
/// all probability lands on the parity-indexed end node.
pub fn build_parity<T: Scalar>(n: usize) -> Result<GqbpProgram<T>> {
    if n == 0 || n % 2 != 0 {
        return Err(Error::BadParameter(format!("parity program requires even n ≥ 2, got {n}")));
    }
    let l = n / 2;
    let s = re::<T>(std::f64::consts::FRAC_1_SQRT_2);
    let levels: Vec<Vec<String>> =
        (0..=l).map(|i| vec![format!("v{i}_0"), format!("v{i}_1")]).collect();
    let labels: Vec<Vec<Option<usize>>> = (0..=l)
        .map(|i| {
            if i == l {
                vec![None, None]
            } else {
                vec![Some(2 * i), Some(2 * i + 1)]
            }
        })
        .collect();
    let mut steps = Vec::with_capacity(l);
    // Steps 1..l−1: pure phase kicks (−1)^a on each branch.
    for _ in 1..l {
        let mut st = LevelStep::zeros(2, 2);
        for v in 0..2 {
            st.col_mut(v, 0)[v] = re(1.0);
            st.col_mut(v, 1)[v] = re(-1.0);
        }
        steps.push(st);
    }
    // Final step: (−1)^a times the Hadamard merge of the two branches.
    let mut last = LevelStep::zeros(2, 2);
    for a in 0..2u8 {
        let sign = if a == 0 { T::one() } else { -T::one() };
        let c0 = last.col_mut(0, a);
        c0[0] = s.scale(sign);
        c0[1] = s.scale(sign);
        let c1 = last.col_mut(1, a);
        c1[0] = s.scale(sign);
        c1[1] = -s.scale(sign);
    }
    steps.push(last);
    Ok(GqbpProgram {
        n,
        levels,
        labels,
        initial: vec![s, s],
        steps,
        accept: BTreeSet::from([1]),
    })
}

/// The width-4, length-2 GQBP computing the majority of 3 bits exactly.
///
/// Step 1 interferes the two start branches so that the level-1 state is
/// `±|v1_0⟩` when `x₀ = x₁` and `±|v1_1⟩` otherwise; step 2 then routes on
/// `x₀` (whose value is the majority in the first case) or on `x₂` (the
/// tie-breaker) into the four end nodes, of which `v2_1` and `v2_3`
/// accept.
pub fn build_maj3<T: Scalar>() -> GqbpProgram<T> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let levels = vec![
        vec!["v0_0".to_string(), "v0_1".to_string()],
        vec!["v1_0".to_string(), "v1_1".to_string()],
        vec!["v2_0".to_string(), "v2_1".to_string(), "v2_2".to_string(), "v2_3".to_string()],
    ];
    let labels = vec![
        vec![Some(0), Some(1)],
        vec![Some(0), Some(2)],
        vec![None, None, None, None],
    ];
    let mut step1 = LevelStep::zeros(2, 2);
    *step1.col_mut(0, 0) = vec![re(s), re(s)];
    *step1.col_mut(0, 1) = vec![re(-s), re(-s)];
    *step1.col_mut(1, 0) = vec![re(s), re(-s)];
    *step1.col_mut(1, 1) = vec![re(-s), re(s)];
    let mut step2 = LevelStep::zeros(2, 4);
    step2.col_mut(0, 0)[0] = re(1.0);
    step2.col_mut(0, 1)[1] = re(1.0);
    step2.col_mut(1, 0)[2] = re(1.0);
    step2.col_mut(1, 1)[3] = re(1.0);
    GqbpProgram {
        n: 3,
        levels,
        labels,
        initial: vec![re(s), re(s)],
        steps: vec![step1, step2],
        accept: BTreeSet::from([1, 3]),
    }
}

/// Width-`n`, length-1 GQBP for the Deutsch–Jozsa promise problem;
/// requires `n` a power of two.
///
/// Nodes at both levels are indexed by `⌈log₂ n⌉`-bit strings; the single
/// step applies `δ(v0_i, a, v1_j) = (1/√n)(−1)^a(−1)^{⟨i,j⟩}` (the
/// Hadamard transform with input-dependent column signs) to the uniform
/// start state. Every end node except `j = 0…0` accepts: balanced inputs
/// accept with probability 1, constant inputs with probability 0, and
/// unpromised inputs with `1 − |(1/n) Σᵢ (−1)^{xᵢ}|²`.
pub fn build_dj<T: Scalar>(n: usize) -> Result<GqbpProgram<T>> {
    if n < 2 || !n.is_power_of_two() {
        return Err(Error::BadParameter(format!(
            "Deutsch–Jozsa program requires n a power of two ≥ 2, got {n}"
        )));
    }
    let amp = 1.0 / (n as f64).sqrt();
    let levels: Vec<Vec<String>> =
        (0..=1).map(|i| (0..n).map(|j| format!("v{i}_{j}")).collect()).collect();
    let labels = vec![(0..n).map(Some).collect(), vec![None; n]];
    let mut step = LevelStep::zeros(n, n);
    for i in 0..n {
        for a in 0..2u8 {
            let col = step.col_mut(i, a);
            for (j, slot) in col.iter_mut().enumerate() {
                let inner = (i & j).count_ones() as i32 + i32::from(a);
                let sign = if inner % 2 == 0 { amp } else { -amp };
                *slot = re(sign);
            }
        }
    }
    Ok(GqbpProgram {
        n,
        levels,
        labels,
        initial: vec![re(amp); n],
        steps: vec![step],
        accept: (1..n).collect(),
    })
}

/// Seeded random GQBP from the phase family: each step is a shared `w×w`
/// unitary with per-source, bit-dependent `±1` phases, so the program is
/// well-behaved by construction. Labels, phases, start state (basis or
/// random unit vector), and accept set are all drawn from the seed;
/// output is bit-for-bit reproducible. Requires `w, l, n ≥ 1`.
pub fn random_phase_gqbp<T: Scalar>(w: usize, l: usize, n: usize, seed: u64) -> GqbpProgram<T> {
    assert!(w >= 1 && l >= 1 && n >= 1, "random_phase_gqbp requires w, l, n ≥ 1");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let levels: Vec<Vec<String>> = (0..=l)
        .map(|i| (0..w).map(|j| format!("v{i}_{j}")).collect())
        .collect();
    let labels: Vec<Vec<Option<usize>>> = (0..=l)
        .map(|i| {
            (0..w)
                .map(|_| if i == l { None } else { Some(rng.gen_range(0..n)) })
                .collect()
        })
        .collect();
    let mut steps = Vec::with_capacity(l);
    for _ in 0..l {
        let u = random_unitary::<T, _>(w, &mut rng);
        let mut st = LevelStep::zeros(w, w);
        for v in 0..w {
            let col = u.col(v);
            for a in 0..2u8 {
                let sign = if rng.gen_bool(0.5) { T::one() } else { -T::one() };
                *st.col_mut(v, a) = col.iter().map(|z| z.scale(sign)).collect();
            }
        }
        steps.push(st);
    }
    let initial = if rng.gen_bool(0.5) {
        basis_vec(w, rng.gen_range(0..w))
    } else {
        random_unit_vec(w, &mut rng)
    };
    let accept = (0..w).filter(|_| rng.gen_bool(0.5)).collect();
    GqbpProgram { n, levels, labels, initial, steps, accept }
}

/// Seeded random AQBP: `l` steps of random unitary pairs over `C^d`, each
/// querying a random input position; start state and accept set drawn from
/// the seed. Requires `d, n ≥ 1`.
pub fn random_aqbp<T: Scalar>(d: usize, l: usize, n: usize, seed: u64) -> AqbpProgram<T> {
    assert!(d >= 1 && n >= 1, "random_aqbp requires d, n ≥ 1");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let steps = (0..l)
        .map(|_| QuantumTransformation {
            j: rng.gen_range(0..n),
            u0: random_unitary::<T, _>(d, &mut rng),
            u1: random_unitary::<T, _>(d, &mut rng),
        })
        .collect();
    let initial: CVec<T> = if rng.gen_bool(0.5) {
        basis_vec(d, rng.gen_range(0..d))
    } else {
        random_unit_vec(d, &mut rng)
    };
    let accept = (0..d).filter(|_| rng.gen_bool(0.5)).collect();
    AqbpProgram { n, d, initial, steps, accept }
}

fn random_accept(values: u64, rng: &mut ChaCha8Rng) -> BTreeSet<u64> {
    (0..values).filter(|_| rng.gen_bool(0.5)).collect()
}

/// Seeded random phase-oracle circuit in strict alternating all-qubit
/// form: `t + 1` random `2^q`-dimensional unitaries with an oracle call
/// between each pair, measured on the full register. Requires
/// `q, n ≥ 1` and `n ≤ 2^q` so the index register can address every
/// input bit.
pub fn random_phase_circuit<T: Scalar>(q: usize, t: usize, n: usize, seed: u64) -> QueryCircuit<T> {
    assert!(q >= 1 && n >= 1, "random_phase_circuit requires q, n ≥ 1");
    assert!(n <= 1 << q, "random_phase_circuit requires n ≤ 2^q");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = 1usize << q;
    let all: Vec<usize> = (0..q).collect();
    let mut ops = vec![CircuitOp::Unitary {
        targets: all.clone(),
        matrix: random_unitary::<T, _>(dim, &mut rng),
    }];
    for _ in 0..t {
        ops.push(CircuitOp::OracleCall { index_register: "all".into(), value_register: None });
        ops.push(CircuitOp::Unitary {
            targets: all.clone(),
            matrix: random_unitary::<T, _>(dim, &mut rng),
        });
    }
    let accept = random_accept(dim as u64, &mut rng);
    QueryCircuit {
        n,
        qubits: q,
        oracle_model: OracleModel::Phase,
        registers: BTreeMap::from([("all".to_string(), Register::new(0, q))]),
        ops,
        measure_register: "all".into(),
        accept,
    }
}

/// Seeded random QRAM-model circuit: `t` QRAM gates on all `q` qubits
/// with random unitary pairs and query positions, with plain unitaries
/// interleaved at random (including possibly before the first gate and
/// after the last). Requires `q, n ≥ 1`.
pub fn random_qram_circuit<T: Scalar>(q: usize, t: usize, n: usize, seed: u64) -> QueryCircuit<T> {
    assert!(q >= 1 && n >= 1, "random_qram_circuit requires q, n ≥ 1");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = 1usize << q;
    let all: Vec<usize> = (0..q).collect();
    let mut ops: Vec<CircuitOp<T>> = Vec::new();
    for _ in 0..t {
        if rng.gen_bool(0.5) {
            ops.push(CircuitOp::Unitary {
                targets: all.clone(),
                matrix: random_unitary::<T, _>(dim, &mut rng),
            });
        }
        ops.push(CircuitOp::QramGate {
            p: rng.gen_range(0..n),
            u0: random_unitary::<T, _>(dim, &mut rng),
            u1: random_unitary::<T, _>(dim, &mut rng),
            targets: all.clone(),
        });
    }
    if rng.gen_bool(0.5) {
        ops.push(CircuitOp::Unitary {
            targets: all.clone(),
            matrix: random_unitary::<T, _>(dim, &mut rng),
        });
    }
    let accept = random_accept(dim as u64, &mut rng);
    QueryCircuit {
        n,
        qubits: q,
        oracle_model: OracleModel::Qram,
        registers: BTreeMap::from([("all".to_string(), Register::new(0, q))]),
        ops,
        measure_register: "all".into(),
        accept,
    }
}

/// Reference parity of the low `n` bits of `x`, for test comparison.
pub fn parity_of(x: u64, n: usize) -> bool {
    (x & ((1u64 << n) - 1)).count_ones() % 2 == 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{accept_prob_gqbp, bit, run_gqbp};

    #[test]
    fn parity_requires_even_n() {
        assert!(build_parity::<f64>(3).is_err());
        assert!(build_parity::<f64>(0).is_err());
        assert!(build_parity::<f64>(2).is_ok());
    }

    #[test]
    fn parity_fixed_points() {
        let g = build_parity::<f64>(4).unwrap();
        // x = 1110 (x₀x₁x₂x₃) has odd weight → certain acceptance.
        let x = crate::sim::parse_input("1110", 4).unwrap();
        assert!((accept_prob_gqbp(&g, x).unwrap() - 1.0).abs() < 1e-12);
        // x = 0110 has even weight → certain rejection.
        let y = crate::sim::parse_input("0110", 4).unwrap();
        assert!(accept_prob_gqbp(&g, y).unwrap() < 1e-12);
    }

    #[test]
    fn parity_matches_xor_exhaustively() {
        let n = 10;
        let g = build_parity::<f64>(n).unwrap();
        assert!(g.validate().ok);
        for x in 0..(1u64 << n) {
            let want = if parity_of(x, n) { 1.0 } else { 0.0 };
            let got = crate::sim::AcceptanceModel::accept_prob(&g, x);
            assert!((got - want).abs() < 1e-9, "x={x:b}: got {got}, want {want}");
        }
    }

    #[test]
    fn parity_measures() {
        let g = build_parity::<f64>(8).unwrap();
        let m = g.measures();
        assert_eq!((m.width, m.length, m.size), (2, 4, 10));
    }

    #[test]
    fn maj3_truth_table_and_measures() {
        let g = build_maj3::<f64>();
        assert!(g.validate().ok);
        let m = g.measures();
        assert_eq!((m.width, m.length, m.size), (4, 2, 8));
        let expect = [0.0, 0.0, 0.0, 1.0, 0.0, 1.0, 1.0, 1.0];
        for x in 0..8u64 {
            let got = crate::sim::AcceptanceModel::accept_prob(&g, x);
            assert!((got - expect[x as usize]).abs() < 1e-9, "x={x:03b}");
        }
    }

    #[test]
    fn maj3_intermediate_state_compares_first_two_bits() {
        let g = build_maj3::<f64>();
        // Stop after step 1 by truncating the program.
        let head = GqbpProgram {
            n: 3,
            levels: g.levels[..2].to_vec(),
            labels: vec![g.labels[0].clone(), vec![None, None]],
            initial: g.initial.clone(),
            steps: vec![g.steps[0].clone()],
            accept: BTreeSet::new(),
        };
        let x = crate::sim::parse_input("110", 3).unwrap();
        let psi = run_gqbp(&head, x).unwrap();
        // x₀ = x₁ = 1: the state is −|v1_0⟩ (sign from the shared phase).
        assert!((psi.amps[0].re + 1.0).abs() < 1e-12);
        assert!(psi.amps[1].norm() < 1e-12);
    }

    #[test]
    fn dj_promise_and_nonpromise_values() {
        let g = build_dj::<f64>(4).unwrap();
        assert!(g.validate().ok);
        let m = g.measures();
        assert_eq!((m.width, m.length, m.size), (4, 1, 8));
        let balanced = crate::sim::parse_input("0101", 4).unwrap();
        assert!((accept_prob_gqbp(&g, balanced).unwrap() - 1.0).abs() < 1e-12);
        let constant = crate::sim::parse_input("0000", 4).unwrap();
        assert!(accept_prob_gqbp(&g, constant).unwrap() < 1e-12);
        // Off-promise: 1 − (2/4)² = 3/4.
        let off = crate::sim::parse_input("0001", 4).unwrap();
        assert!((accept_prob_gqbp(&g, off).unwrap() - 0.75).abs() < 1e-12);
    }

    #[test]
    fn dj_matches_closed_form_for_all_inputs() {
        for n in [2usize, 8] {
            let g = build_dj::<f64>(n).unwrap();
            for x in 0..(1u64 << n) {
                let s: f64 = (0..n).map(|i| if bit(x, i) == 1 { -1.0 } else { 1.0 }).sum();
                let want = 1.0 - (s / n as f64).powi(2);
                let got = crate::sim::AcceptanceModel::accept_prob(&g, x);
                assert!((got - want).abs() < 1e-9, "n={n} x={x:b}");
            }
        }
    }

    #[test]
    fn dj_rejects_non_powers_of_two() {
        assert!(build_dj::<f64>(3).is_err());
        assert!(build_dj::<f64>(1).is_err());
    }

    #[test]
    fn generators_are_seed_deterministic() {
        assert_eq!(random_phase_gqbp::<f64>(3, 2, 4, 99), random_phase_gqbp::<f64>(3, 2, 4, 99));
        assert_ne!(random_phase_gqbp::<f64>(3, 2, 4, 99), random_phase_gqbp::<f64>(3, 2, 4, 100));
        assert_eq!(random_aqbp::<f64>(3, 2, 4, 7), random_aqbp::<f64>(3, 2, 4, 7));
        assert_eq!(
            random_phase_circuit::<f64>(2, 2, 3, 5),
            random_phase_circuit::<f64>(2, 2, 3, 5)
        );
        assert_eq!(random_qram_circuit::<f64>(2, 2, 3, 5), random_qram_circuit::<f64>(2, 2, 3, 5));
    }

    #[test]
    fn random_instances_validate() {
        for seed in 0..10u64 {
            assert!(random_phase_gqbp::<f64>(4, 3, 5, seed).validate().ok, "gqbp seed {seed}");
            assert!(random_aqbp::<f64>(3, 3, 4, seed).validate().ok, "aqbp seed {seed}");
            assert!(random_phase_circuit::<f64>(2, 2, 3, seed).validate().ok, "phase {seed}");
            assert!(random_qram_circuit::<f64>(2, 2, 3, seed).validate().ok, "qram {seed}");
        }
    }

    #[test]
    fn random_qram_circuit_has_requested_query_count() {
        for seed in 0..5u64 {
            let c = random_qram_circuit::<f64>(2, 3, 3, seed);
            assert_eq!(c.oracle_call_count(), 3);
        }
    }
}
