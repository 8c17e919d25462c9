//! Label-group analysis of a level step and unitary completion.
//!
//! A well-behaved level step prescribes two columns per source node —
//! `c₀(v) = δ(v,0,·)` and `c₁(v) = δ(v,1,·)` — and the well-behaved
//! condition makes the *group subspaces*
//!
//! ```text
//! U_p = span{ c₀(v), c₁(v) : L(v) = p }
//! ```
//!
//! mutually orthogonal across labels `p`. Both heavyweight constructions
//! in this module tree lean on that structure:
//!
//! * completing the step's two column matrices `B₀, B₁` to full unitaries
//!   `B̃₀, B̃₁` while keeping `M = B̃₀†B̃₁` block-diagonal over an extended
//!   labelling (so an oracle-computed label can be uncomputed after `M`
//!   is applied), and
//! * filling the unconstrained columns of a single transition matrix so
//!   that it is unitary for every input (the per-bit free directions
//!   `U_p ⊖ span{c_a(v)}` depend only on the group's own queried bit).

use num_complex::Complex;

use crate::linalg::{complete_basis, extend_within_span, orthonormal_span, CVec, Mat};
use crate::model::LevelStep;
use crate::Scalar;

/// One label group of a step: the source nodes querying the same
/// variable, their columns embedded into `C^dim`, and an orthonormal
/// basis of their joint target subspace `U_p`.
pub(crate) struct LabelGroup<T: Scalar> {
    pub label: usize,
    /// Source node indices, ascending.
    pub members: Vec<usize>,
    /// Embedded `c₀(v)` / `c₁(v)` aligned with `members`.
    pub cols0: Vec<CVec<T>>,
    pub cols1: Vec<CVec<T>>,
    /// Orthonormal basis of `U_p = span(cols0 ∪ cols1)`.
    pub u_basis: Vec<CVec<T>>,
}

impl<T: Scalar> LabelGroup<T> {
    /// Fresh orthonormal directions completing `span{c_a(v)}` to `U_p`,
    /// for the given bit. Both bits always yield the same count.
    pub fn fills(&self, bit: u8) -> Vec<CVec<T>> {
        let existing = if bit == 0 { &self.cols0 } else { &self.cols1 };
        extend_within_span(existing, &self.u_basis)
    }
}

/// Zero-extend a column to `dim` entries.
pub(crate) fn embed<T: Scalar>(col: &[Complex<T>], dim: usize) -> CVec<T> {
    let mut v = col.to_vec();
    v.resize(dim, Complex::new(T::zero(), T::zero()));
    v
}

/// Partition a step's source nodes by queried variable, with columns
/// embedded into `C^dim` (`dim ≥` the step's target count). Groups are
/// returned in ascending label order.
///
/// Every source must be labelled; this is guaranteed for steps of a
/// validated program.
pub(crate) fn label_groups<T: Scalar>(
    step: &LevelStep<T>,
    labels: &[Option<usize>],
    dim: usize,
) -> Vec<LabelGroup<T>> {
    let mut by_label: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for v in 0..step.sources() {
        let p = labels[v].expect("non-terminal node labeled");
        by_label.entry(p).or_default().push(v);
    }
    by_label
        .into_iter()
        .map(|(label, members)| {
            let cols0: Vec<CVec<T>> =
                members.iter().map(|&v| embed(step.col(v, 0), dim)).collect();
            let cols1: Vec<CVec<T>> =
                members.iter().map(|&v| embed(step.col(v, 1), dim)).collect();
            let mut generators = cols0.clone();
            generators.extend(cols1.iter().cloned());
            let u_basis = orthonormal_span(&generators);
            LabelGroup { label, members, cols0, cols1, u_basis }
        })
        .collect()
}

/// A step completed to a pair of `w × w` unitaries with an extended
/// labelling under which `M = B₀†B₁` is block-diagonal.
pub(crate) struct StepExtension<T: Scalar> {
    /// Unitary extension of the bit-0 column matrix.
    pub b0: Mat<T>,
    /// Unitary extension of the bit-1 column matrix.
    pub b1: Mat<T>,
    /// Label per basis state (length `w`); real sources keep their label,
    /// phantom positions inherit their group's, leftover positions get 0.
    pub labels: Vec<usize>,
}

impl<T: Scalar> StepExtension<T> {
    /// `M = B₀† B₁`: the "relative" transition applied when the queried
    /// bit is 1. Block-diagonal over [`Self::labels`], so the label of a
    /// basis state is invariant under it.
    pub fn relative_unitary(&self) -> Mat<T> {
        self.b0.dagger().mul_mat(&self.b1)
    }
}

/// Complete a step to [`StepExtension`] at width `w` (a power of two ≥
/// both the source and target count).
///
/// Column placement: real sources keep their positions; each group's
/// extra directions (`dim U_p − |G_p|` per bit, same count for both) go
/// to the next free positions with the group's label; the orthogonal
/// remainder gets identical columns in both matrices (label 0), so `M`
/// acts as the identity there.
pub(crate) fn extend_step<T: Scalar>(
    step: &LevelStep<T>,
    labels: &[Option<usize>],
    w: usize,
) -> StepExtension<T> {
    let groups = label_groups(step, labels, w);
    let w_src = step.sources();
    let mut b0 = Mat::zeros(w, w);
    let mut b1 = Mat::zeros(w, w);
    let mut ext_labels = vec![0usize; w];
    for g in &groups {
        for (k, &v) in g.members.iter().enumerate() {
            b0.set_col(v, &g.cols0[k]);
            b1.set_col(v, &g.cols1[k]);
            ext_labels[v] = g.label;
        }
    }
    let mut next = w_src;
    for g in &groups {
        let fills0 = g.fills(0);
        let fills1 = g.fills(1);
        debug_assert_eq!(fills0.len(), fills1.len(), "group fills must pair up");
        for (f0, f1) in fills0.iter().zip(&fills1) {
            b0.set_col(next, f0);
            b1.set_col(next, f1);
            ext_labels[next] = g.label;
            next += 1;
        }
    }
    // Remainder orthogonal to every group subspace: share columns so the
    // relative unitary is the identity there.
    let placed: Vec<CVec<T>> = (0..next).map(|j| b0.col(j)).collect();
    for f in complete_basis(&placed, w).split_off(next) {
        b0.set_col(next, &f);
        b1.set_col(next, &f);
        next += 1;
    }
    debug_assert_eq!(next, w);
    StepExtension { b0, b1, labels: ext_labels }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::dot_conj;
    use crate::zoo::{build_maj3, build_parity};

    #[test]
    fn parity_step_extends_to_unitaries() {
        let g = build_parity::<f64>(4).unwrap();
        for (i, step) in g.steps.iter().enumerate() {
            let ext = extend_step(step, &g.labels[i], 2);
            assert!(ext.b0.is_unitary(1e-9), "step {i} b0");
            assert!(ext.b1.is_unitary(1e-9), "step {i} b1");
            let m = ext.relative_unitary();
            assert!(m.is_unitary(1e-9), "step {i} relative");
        }
    }

    #[test]
    fn maj3_second_step_relative_unitary_is_label_blocked() {
        let g = build_maj3::<f64>();
        let ext = extend_step(&g.steps[1], &g.labels[1], 4);
        let m = ext.relative_unitary();
        // Nonzero entries only connect equal extended labels.
        for r in 0..4 {
            for c in 0..4 {
                if m[(r, c)].norm() > 1e-9 {
                    assert_eq!(
                        ext.labels[r], ext.labels[c],
                        "entry ({r},{c}) crosses label groups"
                    );
                }
            }
        }
    }

    #[test]
    fn group_fills_stay_inside_the_group_subspace() {
        let g = build_maj3::<f64>();
        let groups = label_groups(&g.steps[1], &g.labels[1], 4);
        assert_eq!(groups.len(), 2);
        for grp in &groups {
            for bit in 0..2u8 {
                for f in grp.fills(bit) {
                    // Orthogonal to the same-bit prescribed columns…
                    let cols = if bit == 0 { &grp.cols0 } else { &grp.cols1 };
                    for c in cols {
                        assert!(dot_conj(&f, c).norm() < 1e-9);
                    }
                    // …and inside U_p: projecting onto the basis recovers
                    // the whole vector.
                    let norm_in: f64 = grp
                        .u_basis
                        .iter()
                        .map(|b| dot_conj(&f, b).norm_sqr())
                        .sum();
                    assert!((norm_in - 1.0).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn fills_count_is_bit_independent() {
        // Step 2 of maj3 has one fill per group and bit (U_p is 2-dim,
        // one prescribed column per bit).
        let g = build_maj3::<f64>();
        let groups = label_groups(&g.steps[1], &g.labels[1], 4);
        for grp in &groups {
            assert_eq!(grp.fills(0).len(), 1);
            assert_eq!(grp.fills(1).len(), 1);
            assert_eq!(grp.u_basis.len(), 2);
        }
    }
}
