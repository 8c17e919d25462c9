//! Small dense complex vectors and matrices.
//!
//! Every object in this crate is desk-scale (widths ≤ a few dozen, circuit
//! states ≤ a few thousand amplitudes), so matrices are plain row-major
//! `Vec`s with straightforward O(n³) products. The module also provides the
//! Gram–Schmidt utilities used by validators and transpilers: orthonormal
//! bases of spans, completion of partial isometries to unitaries, and
//! seeded pseudorandom unitaries.

use num_complex::Complex;
use rand::Rng;

use crate::Scalar;

/// A complex column vector.
pub type CVec<T> = Vec<Complex<T>>;

/// `⟨b|a⟩ = Σᵢ aᵢ·conj(bᵢ)` — the inner product with `b` conjugated.
///
/// With this orientation, two columns `a`, `b` are orthogonal exactly when
/// `dot_conj(a, b) == 0`, matching the pairwise orthonormality conditions
/// used throughout [`crate::model`].
pub fn dot_conj<T: Scalar>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(Complex::new(T::zero(), T::zero()), |acc, (x, y)| acc + x * y.conj())
}

/// Squared 2-norm `Σ |vᵢ|²`.
pub fn norm_sqr<T: Scalar>(v: &[Complex<T>]) -> T {
    v.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr())
}

/// 2-norm.
pub fn norm<T: Scalar>(v: &[Complex<T>]) -> T {
    norm_sqr(v).sqrt()
}

/// The standard basis vector `e_i` in dimension `dim`.
pub fn basis_vec<T: Scalar>(dim: usize, i: usize) -> CVec<T> {
    let mut v = vec![Complex::new(T::zero(), T::zero()); dim];
    v[i] = Complex::new(T::one(), T::zero());
    v
}

/// Zero vector of dimension `dim`.
pub fn zero_vec<T: Scalar>(dim: usize) -> CVec<T> {
    vec![Complex::new(T::zero(), T::zero()); dim]
}

/// Largest entry-wise modulus difference `max |aᵢ − bᵢ|`.
pub fn max_abs_diff<T: Scalar>(a: &[Complex<T>], b: &[Complex<T>]) -> T {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(T::zero(), |m, (x, y)| m.max((*x - *y).norm()))
}

/// Rank-decision threshold for Gram–Schmidt: residuals below this norm are
/// treated as linearly dependent. `ε^(3/4)` keeps the discarded mass well
/// under the crate's validation tolerance for the scalar in use.
pub fn rank_tol<T: Scalar>() -> T {
    T::epsilon().powf(T::from_f64(0.75).unwrap())
}

/// A dense complex matrix in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat<T: Scalar> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

impl<T: Scalar> Mat<T> {
    /// The `rows × cols` zero matrix.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Complex::new(T::zero(), T::zero()); rows * cols] }
    }

    /// The `dim × dim` identity.
    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m[(i, i)] = Complex::new(T::one(), T::zero());
        }
        m
    }

    /// Build from a closure over `(row, col)`.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut m = Self::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m[(r, c)] = f(r, c);
            }
        }
        m
    }

    /// Build from a row-major nested list. Returns `None` on ragged input.
    pub fn from_rows(rows: &[Vec<Complex<T>>]) -> Option<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return None;
        }
        Some(Self { rows: nrows, cols: ncols, data: rows.concat() })
    }

    /// Build from a list of columns, all of the same length.
    pub fn from_cols(cols: &[CVec<T>]) -> Option<Self> {
        let ncols = cols.len();
        let nrows = cols.first().map_or(0, Vec::len);
        if cols.iter().any(|c| c.len() != nrows) {
            return None;
        }
        let mut m = Self::zeros(nrows, ncols);
        for (j, col) in cols.iter().enumerate() {
            m.set_col(j, col);
        }
        Some(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Column `j` as an owned vector.
    pub fn col(&self, j: usize) -> CVec<T> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    /// Overwrite column `j`.
    pub fn set_col(&mut self, j: usize, col: &[Complex<T>]) {
        debug_assert_eq!(col.len(), self.rows);
        for (i, z) in col.iter().enumerate() {
            self[(i, j)] = *z;
        }
    }

    /// Row-major rows, for serialization.
    pub fn to_rows(&self) -> Vec<Vec<Complex<T>>> {
        (0..self.rows).map(|i| self.data[i * self.cols..(i + 1) * self.cols].to_vec()).collect()
    }

    /// Conjugate transpose `A†`.
    pub fn dagger(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    /// Matrix product `self · rhs`.
    pub fn mul_mat(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch in matrix product");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == Complex::new(T::zero(), T::zero()) {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] = out[(i, j)] + a * rhs[(k, j)];
                }
            }
        }
        out
    }

    /// Matrix–vector product `self · v`.
    pub fn mul_vec(&self, v: &[Complex<T>]) -> CVec<T> {
        assert_eq!(self.cols, v.len(), "dimension mismatch in matrix-vector product");
        (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .fold(Complex::new(T::zero(), T::zero()), |acc, j| acc + self[(i, j)] * v[j])
            })
            .collect()
    }

    /// Kronecker product `self ⊗ rhs`.
    pub fn kron(&self, rhs: &Self) -> Self {
        let mut out = Self::zeros(self.rows * rhs.rows, self.cols * rhs.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                for k in 0..rhs.rows {
                    for l in 0..rhs.cols {
                        out[(i * rhs.rows + k, j * rhs.cols + l)] = self[(i, j)] * rhs[(k, l)];
                    }
                }
            }
        }
        out
    }

    /// Block-diagonal extension `diag(self, I_{dim−cols})`, used to pad an
    /// operator into a larger power-of-two space.
    pub fn pad_to(&self, dim: usize) -> Self {
        assert!(self.rows == self.cols && dim >= self.rows);
        let mut out = Self::identity(dim);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = self[(i, j)];
            }
        }
        out
    }

    /// Largest deviation of `self† · self` from the identity; 0 means the
    /// columns are exactly orthonormal (an isometry, unitary when square).
    pub fn isometry_deviation(&self) -> T {
        let gram = self.dagger().mul_mat(self);
        let id = Self::identity(self.cols);
        gram.max_diff(&id)
    }

    /// `true` when the matrix is square with orthonormal columns within `tol`.
    pub fn is_unitary(&self, tol: T) -> bool {
        self.rows == self.cols && self.isometry_deviation() <= tol
    }

    /// Largest entry-wise modulus difference against `other`.
    pub fn max_diff(&self, other: &Self) -> T {
        assert!(self.rows == other.rows && self.cols == other.cols);
        max_abs_diff(&self.data, &other.data)
    }

    /// `true` when all entries have finite components.
    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl<T: Scalar> std::ops::Index<(usize, usize)> for Mat<T> {
    type Output = Complex<T>;

    fn index(&self, (r, c): (usize, usize)) -> &Complex<T> {
        &self.data[r * self.cols + c]
    }
}

impl<T: Scalar> std::ops::IndexMut<(usize, usize)> for Mat<T> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[r * self.cols + c]
    }
}

/// Subtract from `v` its projections onto each (orthonormal) vector in
/// `basis`, in place.
fn project_out<T: Scalar>(v: &mut CVec<T>, basis: &[CVec<T>]) {
    for b in basis {
        let coeff = dot_conj(v, b);
        for (vi, bi) in v.iter_mut().zip(b) {
            *vi = *vi - coeff * bi;
        }
    }
}

/// Orthonormal basis of the span of `generators` (Gram–Schmidt with the
/// [`rank_tol`] dependence threshold).
pub fn orthonormal_span<T: Scalar>(generators: &[CVec<T>]) -> Vec<CVec<T>> {
    let mut basis: Vec<CVec<T>> = Vec::new();
    let tol = rank_tol::<T>();
    for g in generators {
        let mut v = g.clone();
        project_out(&mut v, &basis);
        let n = norm(&v);
        if n > tol {
            let inv = n.recip();
            for z in &mut v {
                *z = z.scale(inv);
            }
            basis.push(v);
        }
    }
    basis
}

/// Extend the orthonormal family `existing` to an orthonormal basis of
/// `span(existing ∪ generators)`, returning only the new vectors.
///
/// Used to fill the unconstrained columns of a level step when completing
/// it to a unitary: `existing` are the prescribed columns, `generators`
/// span the subspace the fills must stay inside.
pub fn extend_within_span<T: Scalar>(
    existing: &[CVec<T>],
    generators: &[CVec<T>],
) -> Vec<CVec<T>> {
    let mut basis: Vec<CVec<T>> = existing.to_vec();
    let mut fresh = Vec::new();
    let tol = rank_tol::<T>();
    for g in generators {
        let mut v = g.clone();
        project_out(&mut v, &basis);
        let n = norm(&v);
        if n > tol {
            let inv = n.recip();
            for z in &mut v {
                *z = z.scale(inv);
            }
            basis.push(v.clone());
            fresh.push(v);
        }
    }
    fresh
}

/// Complete `cols` (orthonormal vectors in `C^dim`) to a full orthonormal
/// basis by sweeping the standard basis, returning all `dim` vectors with
/// the prescribed ones first.
pub fn complete_basis<T: Scalar>(cols: &[CVec<T>], dim: usize) -> Vec<CVec<T>> {
    let mut basis: Vec<CVec<T>> = cols.to_vec();
    let tol = rank_tol::<T>();
    for i in 0..dim {
        if basis.len() == dim {
            break;
        }
        let mut v = basis_vec::<T>(dim, i);
        project_out(&mut v, &basis);
        // A second pass keeps the completion orthonormal to working precision
        // even when e_i is nearly inside the current span.
        project_out(&mut v, &basis);
        let n = norm(&v);
        if n > tol {
            let inv = n.recip();
            for z in &mut v {
                *z = z.scale(inv);
            }
            basis.push(v);
        }
    }
    assert_eq!(basis.len(), dim, "orthonormal completion failed");
    basis
}

/// A unitary whose first column is the unit vector `psi` (Gram–Schmidt
/// completion). Handy as a state-preparation operator from `|0⟩`.
pub fn prep_unitary<T: Scalar>(psi: &[Complex<T>]) -> Mat<T> {
    let dim = psi.len();
    let basis = complete_basis(&[psi.to_vec()], dim);
    Mat::from_cols(&basis).unwrap()
}

/// Seeded pseudorandom `dim × dim` unitary: a matrix with uniform complex
/// entries, orthonormalized column by column. The ensemble is arbitrary;
/// only validity and seed-reproducibility matter here.
pub fn random_unitary<T: Scalar, R: Rng>(dim: usize, rng: &mut R) -> Mat<T> {
    loop {
        let cols: Vec<CVec<T>> = (0..dim)
            .map(|_| {
                (0..dim)
                    .map(|_| {
                        let re = T::from_f64(rng.gen_range(-1.0..1.0)).unwrap();
                        let im = T::from_f64(rng.gen_range(-1.0..1.0)).unwrap();
                        Complex::new(re, im)
                    })
                    .collect()
            })
            .collect();
        let basis = orthonormal_span(&cols);
        // Resample on (vanishingly unlikely) rank deficiency.
        if basis.len() == dim {
            return Mat::from_cols(&basis).unwrap();
        }
    }
}

/// Seeded random unit vector in `C^dim`.
pub fn random_unit_vec<T: Scalar, R: Rng>(dim: usize, rng: &mut R) -> CVec<T> {
    loop {
        let v: CVec<T> = (0..dim)
            .map(|_| {
                let re = T::from_f64(rng.gen_range(-1.0..1.0)).unwrap();
                let im = T::from_f64(rng.gen_range(-1.0..1.0)).unwrap();
                Complex::new(re, im)
            })
            .collect();
        let n = norm(&v);
        if n > T::from_f64(1e-3).unwrap() {
            let inv = n.recip();
            return v.into_iter().map(|z| z.scale(inv)).collect();
        }
    }
}

/// `⌈log₂ v⌉` for `v ≥ 1`.
pub fn ceil_log2(v: usize) -> usize {
    assert!(v >= 1);
    (usize::BITS - (v - 1).leading_zeros()) as usize
}

/// The smallest power of two `≥ v`.
pub fn next_pow2(v: usize) -> usize {
    1 << ceil_log2(v.max(1))
}
