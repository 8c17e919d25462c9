//! Removal of steps that never consult the input.

use super::TranspileCertificate;
use crate::error::{Error, Result};
use crate::model::GqbpProgram;
use crate::Scalar;

/// Collapse every dummy step (identical columns under both bit values)
/// into its neighbour, shrinking the program's length without changing
/// its acceptance probability on any input.
///
/// A dummy step is an input-independent isometry `D`. A leading dummy is
/// absorbed into the start state (`initial ← D·initial`); any later
/// dummy at position `k` is absorbed into step `k − 1` by composing `D`
/// on the left of each of its columns. The surviving steps keep their
/// variables, so the result accepts with exactly the same probability
/// and the same end measurement as the input program.
///
/// The pass iterates until no dummy steps remain, so it is idempotent; a
/// program whose steps are all dummies collapses to a single level with
/// no steps at all.
pub fn remove_dummy_levels<T: Scalar>(
    g: &GqbpProgram<T>,
) -> Result<(GqbpProgram<T>, TranspileCertificate)> {
    let report = g.validate();
    if !report.ok {
        return Err(Error::InvalidProgram(report.to_string()));
    }
    let mut out = g.clone();
    let mut removed = 0usize;
    loop {
        let Some(k) = out.steps.iter().position(|s| s.is_dummy()) else {
            break;
        };
        let d = out.steps[k]
            .dummy_matrix()
            .expect("position() found a dummy step");
        if k == 0 {
            out.initial = d.mul_vec(&out.initial);
        } else {
            let prev = &mut out.steps[k - 1];
            for v in 0..prev.sources() {
                for bit in 0..2u8 {
                    let composed = d.mul_vec(prev.col(v, bit));
                    *prev.col_mut(v, bit) = composed;
                }
            }
        }
        out.levels.remove(k);
        out.labels.remove(k);
        out.steps.remove(k);
        removed += 1;
    }
    let before = g.measures();
    let after = out.measures();
    let cert = TranspileCertificate::new(
        before,
        after,
        format!(
            "{removed} dummy step(s) removed; length {} -> {}, width preserved",
            before.length, after.length
        ),
        after.width == before.width
            && after.length == before.length - removed
            && out.steps.iter().all(|s| !s.is_dummy()),
    );
    Ok((out, cert))
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use num_complex::Complex;

    use super::*;
    use crate::linalg::{basis_vec, Mat};
    use crate::model::LevelStep;
    use crate::sim::AcceptanceModel;
    use crate::zoo::build_parity;

    fn dummy_step_from(m: &Mat<f64>) -> LevelStep<f64> {
        let mut s = LevelStep::zeros(m.cols(), m.rows());
        for v in 0..m.cols() {
            *s.col_mut(v, 0) = m.col(v);
            *s.col_mut(v, 1) = m.col(v);
        }
        s
    }

    fn hadamard() -> Mat<f64> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Mat::from_rows(&[
            vec![Complex::new(s, 0.0), Complex::new(s, 0.0)],
            vec![Complex::new(s, 0.0), Complex::new(-s, 0.0)],
        ])
        .unwrap()
    }

    /// Parity program with a cancelling pair of dummy Hadamard steps
    /// spliced before each querying step. H·H = I, so the padded program
    /// computes the same function while carrying four removable steps.
    fn padded_parity() -> GqbpProgram<f64> {
        let g = build_parity::<f64>(4).unwrap();
        let h = hadamard();
        let pad_labels = || vec![Some(0), Some(0)];
        let pad_level = |tag: &str| vec![format!("{tag}_0"), format!("{tag}_1")];
        let mut levels = Vec::new();
        let mut labels: Vec<Vec<Option<usize>>> = Vec::new();
        let mut steps = Vec::new();
        for (i, s) in g.steps.iter().enumerate() {
            levels.push(pad_level(&format!("padA{i}")));
            labels.push(pad_labels());
            steps.push(dummy_step_from(&h));
            levels.push(pad_level(&format!("padB{i}")));
            labels.push(pad_labels());
            steps.push(dummy_step_from(&h));
            levels.push(g.levels[i].clone());
            labels.push(g.labels[i].clone());
            steps.push(s.clone());
        }
        levels.push(g.levels.last().unwrap().clone());
        labels.push(vec![None, None]);
        GqbpProgram {
            n: g.n,
            levels,
            labels,
            initial: g.initial.clone(),
            steps,
            accept: g.accept.clone(),
        }
    }

    #[test]
    fn strips_dummies_and_preserves_acceptance() {
        let g = build_parity::<f64>(4).unwrap();
        let padded = padded_parity();
        assert!(padded.validate().ok, "{}", padded.validate());
        assert_eq!(padded.length(), 6);
        let (clean, cert) = remove_dummy_levels(&padded).unwrap();
        assert!(cert.bound_satisfied, "{cert}");
        assert!(clean.validate().ok);
        assert_eq!(clean.length(), 2);
        assert!(clean.steps.iter().all(|s| !s.is_dummy()));
        for x in 0..16u64 {
            assert!(
                (clean.accept_prob(x) - g.accept_prob(x)).abs() < 1e-12,
                "x={x}"
            );
            assert!(
                (padded.accept_prob(x) - g.accept_prob(x)).abs() < 1e-12,
                "x={x}"
            );
        }
    }

    #[test]
    fn idempotent_and_identity_on_clean_programs() {
        let g = build_parity::<f64>(6).unwrap();
        let (once, cert) = remove_dummy_levels(&g).unwrap();
        assert!(cert.bound_satisfied);
        assert_eq!(once, g, "no dummy steps: program must come back unchanged");
        let padded = padded_parity();
        let (a, _) = remove_dummy_levels(&padded).unwrap();
        let (b, _) = remove_dummy_levels(&a).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn all_dummy_program_collapses_to_length_zero() {
        let h = hadamard();
        let g = GqbpProgram::<f64> {
            n: 1,
            levels: vec![
                vec!["a0".into(), "a1".into()],
                vec!["b0".into(), "b1".into()],
                vec!["c0".into(), "c1".into()],
            ],
            labels: vec![
                vec![Some(0), Some(0)],
                vec![Some(0), Some(0)],
                vec![None, None],
            ],
            initial: basis_vec(2, 0),
            steps: vec![dummy_step_from(&h), dummy_step_from(&h)],
            accept: BTreeSet::from([0]),
        };
        assert!(g.validate().ok);
        let (clean, cert) = remove_dummy_levels(&g).unwrap();
        assert_eq!(clean.length(), 0);
        assert_eq!(clean.levels.len(), 1);
        assert!(cert.bound_satisfied);
        // H·H = I, so the start state survives untouched and is accepted.
        assert!((clean.accept_prob(0) - 1.0).abs() < 1e-12);
        assert!((clean.accept_prob(0) - g.accept_prob(0)).abs() < 1e-12);
    }

    #[test]
    fn widening_dummy_absorbs_into_initial() {
        // A 1 -> 2 dummy isometry in front: absorbed by replaying it on
        // the start state, which widens the surviving start level.
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut widen = LevelStep::zeros(1, 2);
        *widen.col_mut(0, 0) = vec![Complex::new(s, 0.0), Complex::new(s, 0.0)];
        *widen.col_mut(0, 1) = widen.col(0, 0).clone();
        let mut query = LevelStep::zeros(2, 2);
        *query.col_mut(0, 0) = basis_vec(2, 0);
        *query.col_mut(0, 1) = basis_vec(2, 0);
        *query.col_mut(1, 0) = basis_vec(2, 1);
        *query.col_mut(1, 1) = vec![Complex::new(0.0, 0.0), Complex::new(-1.0, 0.0)];
        let g = GqbpProgram::<f64> {
            n: 1,
            levels: vec![
                vec!["s".into()],
                vec!["m0".into(), "m1".into()],
                vec!["t0".into(), "t1".into()],
            ],
            labels: vec![vec![Some(0)], vec![Some(0), Some(0)], vec![None, None]],
            initial: basis_vec(1, 0),
            steps: vec![widen, query],
            accept: BTreeSet::from([1]),
        };
        assert!(g.validate().ok, "{}", g.validate());
        let (clean, _) = remove_dummy_levels(&g).unwrap();
        assert!(clean.validate().ok, "{}", clean.validate());
        assert_eq!(clean.length(), 1);
        assert_eq!(clean.levels[0].len(), 2, "start level is the widened one");
        for x in 0..2u64 {
            assert!(
                (clean.accept_prob(x) - g.accept_prob(x)).abs() < 1e-12,
                "x={x}"
            );
        }
    }
}
