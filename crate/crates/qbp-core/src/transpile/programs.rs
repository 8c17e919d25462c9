//! Translations among the three program models.

use std::collections::BTreeSet;

use num_complex::Complex;

use super::extension::label_groups;
use super::TranspileCertificate;
use crate::error::{Error, Result};
use crate::linalg::{basis_vec, complete_basis, extend_within_span, CVec, Mat};
use crate::model::{
    AqbpProgram, GqbpProgram, LevelStep, NodeKind, NqbpProgram,
};
use crate::{default_tol, Scalar};

fn require_valid<T: Scalar>(report: crate::model::ValidationReport<T>) -> Result<()> {
    if report.ok {
        Ok(())
    } else {
        Err(Error::InvalidProgram(report.to_string()))
    }
}

/// Unroll an AQBP into an equivalent GQBP of identical width and length.
///
/// Level `s` holds one node per basis state of `C^d`; every node of level
/// `s` queries the step's variable `j_{s+1}`, and the transition columns
/// are the columns of `U_{s+1}(a)`. The start level carries the AQBP's
/// initial vector verbatim.
pub fn aqbp_to_gqbp<T: Scalar>(
    a: &AqbpProgram<T>,
) -> Result<(GqbpProgram<T>, TranspileCertificate)> {
    require_valid(a.validate())?;
    let l = a.length();
    let d = a.d;
    let levels = (0..=l).map(|s| (0..d).map(|t| format!("v{s}_{t}")).collect()).collect();
    let labels = (0..=l)
        .map(|s| {
            (0..d)
                .map(|_| if s == l { None } else { Some(a.steps[s].j) })
                .collect()
        })
        .collect();
    let steps = a
        .steps
        .iter()
        .map(|st| {
            let mut step = LevelStep::zeros(d, d);
            for v in 0..d {
                *step.col_mut(v, 0) = st.u0.col(v);
                *step.col_mut(v, 1) = st.u1.col(v);
            }
            step
        })
        .collect();
    let g = GqbpProgram {
        n: a.n,
        levels,
        labels,
        initial: a.initial.clone(),
        steps,
        accept: a.accept.clone(),
    };
    let gm = g.measures();
    let am = a.measures();
    let cert = TranspileCertificate::new(
        am,
        gm,
        format!("(d, l) program maps to a (d, l) program: width {d}, length {l}"),
        gm.width == am.width && gm.length == am.length,
    );
    Ok((g, cert))
}

/// Count of exactly-nonzero amplitudes and the index of the last one.
fn support<T: Scalar>(v: &[Complex<T>]) -> (usize, usize) {
    let mut count = 0;
    let mut last = 0;
    for (i, z) in v.iter().enumerate() {
        if z.re != T::zero() || z.im != T::zero() {
            count += 1;
            last = i;
        }
    }
    (count, last)
}

/// Embed a GQBP into the measure-every-step model with the same node set
/// (plus one fan-out node when the start state is a superposition).
///
/// The single transition pair routes each level to the next exactly as
/// the source program does; the unconstrained columns (the end-level
/// nodes) are completed so that the matrix is unitary for **every**
/// input: each target level's free directions split into per-label-group
/// subspaces whose position depends only on that group's own queried bit,
/// plus input-independent remainders. End-level nodes are assigned to
/// those subspaces (inheriting the group's variable as their label), so
/// the completion never constrains observable behaviour — amplitude
/// reaches the end level only at the final application, where it is
/// measured off entirely. Hence `p_residual = 0` and `p_acc` equals the
/// source program's acceptance probability on every input.
pub fn gqbp_to_nqbp<T: Scalar>(
    g: &GqbpProgram<T>,
) -> Result<(NqbpProgram<T>, TranspileCertificate)> {
    require_valid(g.validate())?;
    let l = g.length();
    let widths: Vec<usize> = g.levels.iter().map(Vec::len).collect();
    let offsets: Vec<usize> = widths
        .iter()
        .scan(0usize, |acc, &w| {
            let o = *acc;
            *acc += w;
            Some(o)
        })
        .collect();
    let size: usize = widths.iter().sum();
    let (nnz, single) = support(&g.initial);
    let fanout = nnz > 1;
    let total = size + usize::from(fanout);

    let mut delta0 = Mat::zeros(total, total);
    let mut delta1 = Mat::zeros(total, total);
    let mut labels = vec![0usize; total];
    let mut names: Vec<String> = g.levels.iter().flatten().cloned().collect();

    let place = |m: &mut Mat<T>, col: usize, block: usize, v: &[Complex<T>]| {
        for (t, z) in v.iter().enumerate() {
            m[(block + t, col)] = *z;
        }
    };

    // Interior columns: level i evolves into level i+1 through step i+1.
    for (i, step) in g.steps.iter().enumerate() {
        for v in 0..widths[i] {
            let col = offsets[i] + v;
            labels[col] = g.labels[i][v].expect("non-terminal node labeled");
            place(&mut delta0, col, offsets[i + 1], step.col(v, 0));
            place(&mut delta1, col, offsets[i + 1], step.col(v, 1));
        }
    }

    // Completion columns for the end-level nodes: serve each target
    // level's free directions, then the start level.
    let mut servings: Vec<(usize, CVec<T>, CVec<T>)> = Vec::new();
    for (i, step) in g.steps.iter().enumerate() {
        let w_tgt = widths[i + 1];
        let groups = label_groups(step, &g.labels[i], w_tgt);
        let mut occupied: Vec<CVec<T>> = Vec::new();
        for grp in &groups {
            let fills0 = grp.fills(0);
            let fills1 = grp.fills(1);
            for (f0, f1) in fills0.into_iter().zip(fills1) {
                servings.push((grp.label, shift(&f0, offsets[i + 1], total), shift(&f1, offsets[i + 1], total)));
            }
            occupied.extend(grp.u_basis.iter().cloned());
        }
        let occupied_len = occupied.len();
        for f in complete_basis(&occupied, w_tgt).split_off(occupied_len) {
            let e = shift(&f, offsets[i + 1], total);
            servings.push((0, e.clone(), e));
        }
    }
    if fanout {
        // Fan-out column: the extra start node spreads into the initial
        // superposition under both bit values.
        let psi = shift(&g.initial, offsets[0], total);
        place(&mut delta0, size, 0, &psi);
        place(&mut delta1, size, 0, &psi);
        names.push("start*".to_string());
        // The start level's free directions: everything orthogonal to the
        // initial vector, plus the fan-out coordinate itself.
        let fills = extend_within_span(
            &[g.initial.clone()],
            &(0..widths[0]).map(|j| basis_vec(widths[0], j)).collect::<Vec<_>>(),
        );
        for f in fills {
            let e = shift(&f, offsets[0], total);
            servings.push((0, e.clone(), e));
        }
        let e_fan = basis_vec::<T>(total, size);
        servings.push((0, e_fan.clone(), e_fan));
    } else {
        for j in 0..widths[0] {
            let e = basis_vec::<T>(total, offsets[0] + j);
            servings.push((0, e.clone(), e));
        }
    }
    debug_assert_eq!(servings.len(), widths[l], "completion must fill the end level exactly");
    for (k, (label, c0, c1)) in servings.into_iter().enumerate() {
        let col = offsets[l] + k;
        labels[col] = label;
        place(&mut delta0, col, 0, &c0);
        place(&mut delta1, col, 0, &c1);
    }

    let kinds: Vec<NodeKind> = (0..total)
        .map(|v| {
            if v >= offsets[l] && v < offsets[l] + widths[l] {
                if g.accept.contains(&(v - offsets[l])) {
                    NodeKind::Acc
                } else {
                    NodeKind::Rej
                }
            } else {
                NodeKind::Non
            }
        })
        .collect();
    let steps = (l + usize::from(fanout)).max(1);
    let p = NqbpProgram {
        n: g.n,
        nodes: names,
        kinds,
        labels,
        start: if fanout { size } else { offsets[0] + single },
        delta0,
        delta1,
        steps,
    };
    let pm = p.measures();
    let gm = g.measures();
    let mut cert = TranspileCertificate::new(
        gm,
        pm,
        format!(
            "size {size} program embeds with {} node(s) added and {} application(s)",
            usize::from(fanout),
            steps
        ),
        pm.width == total && pm.length == steps,
    );
    if fanout {
        cert.warnings.push(
            "superposed start state: one fan-out node and one extra application added".into(),
        );
    }
    Ok((p, cert))
}

/// Zero-extend `v` into a length-`total` vector starting at `offset`.
fn shift<T: Scalar>(v: &[Complex<T>], offset: usize, total: usize) -> CVec<T> {
    let mut out = vec![Complex::new(T::zero(), T::zero()); total];
    out[offset..offset + v.len()].copy_from_slice(v);
    out
}

/// Unroll a measure-every-step program into a GQBP by making one level
/// copy of the node set per application, all driven by the same
/// transition pair.
///
/// The unrolling drops the intermediate measurements, so it is exact
/// precisely when no accepting or rejecting node carries amplitude
/// before the final application (always true for images of
/// [`gqbp_to_nqbp`]). When a transition can syntactically reach a
/// terminal node early, the certificate carries a warning and an
/// exhaustive equivalence check is the ground truth.
pub fn nqbp_to_gqbp<T: Scalar>(
    p: &NqbpProgram<T>,
) -> Result<(GqbpProgram<T>, TranspileCertificate)> {
    require_valid(p.validate())?;
    let q = p.node_count();
    let l = p.steps;
    let levels: Vec<Vec<String>> = (0..=l)
        .map(|i| p.nodes.iter().map(|name| format!("{name}@{i}")).collect())
        .collect();
    let labels: Vec<Vec<Option<usize>>> = (0..=l)
        .map(|i| {
            (0..q)
                .map(|v| if i == l { None } else { Some(p.labels[v]) })
                .collect()
        })
        .collect();
    let mut step = LevelStep::zeros(q, q);
    for v in 0..q {
        *step.col_mut(v, 0) = p.delta0.col(v);
        *step.col_mut(v, 1) = p.delta1.col(v);
    }
    let steps = vec![step; l];
    let accept: BTreeSet<usize> =
        (0..q).filter(|&v| p.kinds[v] == NodeKind::Acc).collect();
    let g = GqbpProgram {
        n: p.n,
        levels,
        labels,
        initial: basis_vec(q, p.start),
        steps,
        accept,
    };
    let gm = g.measures();
    let pm = p.measures();
    let mut cert = TranspileCertificate::new(
        pm,
        gm,
        format!("width {q}, length {l} unrolling"),
        gm.width == q && gm.length == l,
    );
    if reaches_terminal_early(p) {
        cert.warnings.push(
            "a terminal node is reachable before the final application; the unrolling may \
             disagree with the measured semantics — compare acceptance exhaustively"
                .into(),
        );
    }
    Ok((g, cert))
}

/// Input-oblivious reachability: can any accepting/rejecting node carry
/// amplitude strictly before the final application?
fn reaches_terminal_early<T: Scalar>(p: &NqbpProgram<T>) -> bool {
    let q = p.node_count();
    let tol = default_tol::<T>();
    let mut reachable = vec![false; q];
    reachable[p.start] = true;
    for _ in 1..p.steps {
        let mut next = vec![false; q];
        for v in 0..q {
            if !reachable[v] {
                continue;
            }
            for t in 0..q {
                if p.delta0[(t, v)].norm() > tol || p.delta1[(t, v)].norm() > tol {
                    next[t] = true;
                }
            }
        }
        if next
            .iter()
            .enumerate()
            .any(|(v, &r)| r && p.kinds[v] != NodeKind::Non)
        {
            return true;
        }
        reachable = next;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::equivalent;
    use crate::linalg::basis_vec;
    use crate::model::QuantumTransformation;
    use crate::sim::{run_nqbp, AcceptanceModel};
    use crate::zoo::{build_maj3, build_parity, random_aqbp, random_phase_gqbp};

    #[test]
    fn single_step_aqbp_unrolls_to_bit_test() {
        let x_gate = Mat::from_fn(2, 2, |r, c| {
            if r != c { Complex::new(1.0, 0.0) } else { Complex::new(0.0, 0.0) }
        });
        let a = AqbpProgram::<f64> {
            n: 1,
            d: 2,
            initial: basis_vec(2, 0),
            steps: vec![QuantumTransformation { j: 0, u0: Mat::identity(2), u1: x_gate }],
            accept: BTreeSet::from([1]),
        };
        let (g, cert) = aqbp_to_gqbp(&a).unwrap();
        assert!(cert.bound_satisfied);
        assert!(g.validate().ok);
        assert!(g.accept_prob(0b0) < 1e-12);
        assert!((g.accept_prob(0b1) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn aqbp_to_gqbp_preserves_measures_and_acceptance() {
        for seed in 0..6u64 {
            let a = random_aqbp::<f64>(3, 3, 4, seed);
            let (g, cert) = aqbp_to_gqbp(&a).unwrap();
            assert!(cert.bound_satisfied, "seed {seed}");
            assert!(g.validate().ok, "seed {seed}");
            let eq = equivalent(&a, &g, 1e-9).unwrap();
            assert!(eq.equivalent, "seed {seed}: {eq}");
        }
    }

    #[test]
    fn maj3_embeds_exactly() {
        let g = build_maj3::<f64>();
        let (p, cert) = gqbp_to_nqbp(&g).unwrap();
        assert!(p.validate().ok, "{}", p.validate());
        // Superposed start: one fan-out node on top of the 8 originals.
        assert_eq!(p.node_count(), 9);
        assert_eq!(p.steps, 3);
        assert!(!cert.warnings.is_empty());
        for x in 0..8u64 {
            let out = run_nqbp(&p, x).unwrap();
            assert!((out.p_acc - g.accept_prob(x)).abs() < 1e-9, "x={x}");
            assert!(out.p_residual < 1e-9, "x={x}");
        }
    }

    #[test]
    fn parity_embeds_exactly() {
        let g = build_parity::<f64>(4).unwrap();
        let (p, _) = gqbp_to_nqbp(&g).unwrap();
        assert!(p.validate().ok, "{}", p.validate());
        for x in 0..16u64 {
            let out = run_nqbp(&p, x).unwrap();
            assert!((out.p_acc - g.accept_prob(x)).abs() < 1e-9, "x={x}");
            assert!(out.p_residual < 1e-9);
        }
    }

    #[test]
    fn basis_start_gqbp_embeds_without_fanout() {
        for seed in 0..20u64 {
            let g = random_phase_gqbp::<f64>(3, 2, 3, seed);
            let (nnz, _) = super::support(&g.initial);
            let (p, _) = gqbp_to_nqbp(&g).unwrap();
            assert!(p.validate().ok, "seed {seed}: {}", p.validate());
            assert_eq!(p.node_count(), 3 * 3 + usize::from(nnz > 1));
            for x in 0..8u64 {
                let out = run_nqbp(&p, x).unwrap();
                assert!((out.p_acc - g.accept_prob(x)).abs() < 1e-9, "seed {seed} x={x}");
            }
        }
    }

    #[test]
    fn nqbp_round_trip_matches_maj3() {
        let g = build_maj3::<f64>();
        let (p, _) = gqbp_to_nqbp(&g).unwrap();
        let (g2, cert) = nqbp_to_gqbp(&p).unwrap();
        assert!(g2.validate().ok);
        // Clean embedding: amplitude avoids terminal nodes until the end.
        assert!(cert.warnings.is_empty());
        for x in 0..8u64 {
            assert!((g2.accept_prob(x) - g.accept_prob(x)).abs() < 1e-9, "x={x}");
        }
    }

    #[test]
    fn early_terminal_mass_diverges_and_is_flagged() {
        // Two nodes swapped every step; the accepting node is hit at
        // application 1 of 2 and rotated away again. The measured model
        // banks the mass; the unrolling does not.
        let swap = Mat::from_fn(2, 2, |r, c| {
            if r != c { Complex::new(1.0, 0.0) } else { Complex::new(0.0, 0.0) }
        });
        let p = NqbpProgram::<f64> {
            n: 1,
            nodes: vec!["park".into(), "go".into()],
            kinds: vec![NodeKind::Acc, NodeKind::Non],
            labels: vec![0, 0],
            start: 1,
            delta0: swap.clone(),
            delta1: swap,
            steps: 2,
        };
        assert!(p.validate().ok);
        let (g, cert) = nqbp_to_gqbp(&p).unwrap();
        assert!(!cert.warnings.is_empty(), "divergence must be flagged");
        let out = run_nqbp(&p, 0).unwrap();
        assert!((out.p_acc - 1.0).abs() < 1e-12, "mass banked at application 1");
        // The unrolled program moves the mass back off the accept copy.
        assert!(g.accept_prob(0) < 1e-12);
    }

    #[test]
    fn zero_length_gqbp_still_embeds() {
        // Measure-the-start-state program: one level, no steps.
        let g = GqbpProgram::<f64> {
            n: 1,
            levels: vec![vec!["a".into(), "b".into()]],
            labels: vec![vec![None, None]],
            initial: vec![
                Complex::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
                Complex::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
            ],
            steps: vec![],
            accept: BTreeSet::from([1]),
        };
        assert!(g.validate().ok);
        let (p, _) = gqbp_to_nqbp(&g).unwrap();
        assert!(p.validate().ok, "{}", p.validate());
        assert_eq!(p.steps, 1);
        let out = run_nqbp(&p, 0).unwrap();
        assert!((out.p_acc - 0.5).abs() < 1e-12);
        assert!(out.p_residual < 1e-12);
    }
}
