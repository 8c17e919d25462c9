//! Polynomial-degree analysis and the brute-force equivalence oracle.
//!
//! The acceptance probability of a length-`l` program is a multilinear
//! polynomial of degree at most `2l` in the input bits, so any program
//! computing `f` exactly needs length at least `⌈deg(f)/2⌉`. This module
//! recovers the unique multilinear interpolation of a value table with an
//! in-place Möbius (inclusion–exclusion) transform, reads off degrees,
//! and turns them into length lower bounds. It also houses the exhaustive
//! acceptance-probability comparison used to certify every model-to-model
//! translation in this crate.

use std::fmt;

use crate::error::{Error, Result};
use crate::model::GqbpProgram;
use crate::sim::{truth_table, AcceptanceModel, BooleanTable, TableKind};
use crate::{degree_tol, Scalar};

/// The unique multilinear polynomial `Σ_S c_S Π_{i∈S} xᵢ` through a value
/// table. Coefficients are indexed by the subset mask `S` (bit `i` set ⇔
/// variable `xᵢ` ∈ `S`).
#[derive(Debug, Clone, PartialEq)]
pub struct MultilinearPoly<T: Scalar> {
    pub n: usize,
    /// `coeffs[S]` is `c_S`; length `2ⁿ`.
    pub coeffs: Vec<T>,
}

impl<T: Scalar> MultilinearPoly<T> {
    /// The coefficient of the monomial `Π_{i∈S} xᵢ`.
    pub fn coeff(&self, subset: u64) -> T {
        self.coeffs[subset as usize]
    }

    /// Evaluate at a 0/1 point given as an input mask: `Σ_{S ⊆ x} c_S`.
    pub fn evaluate(&self, x: u64) -> T {
        let mut acc = T::zero();
        let mut s = x;
        loop {
            acc += self.coeffs[s as usize];
            if s == 0 {
                break;
            }
            s = (s - 1) & x;
        }
        acc
    }

    /// Largest `|S|` whose coefficient exceeds `tol` in magnitude; 0 if
    /// none does (constant polynomial).
    pub fn degree(&self, tol: T) -> usize {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| c.abs() > tol)
            .map(|(s, _)| s.count_ones() as usize)
            .max()
            .unwrap_or(0)
    }
}

impl<T: Scalar> fmt::Display for MultilinearPoly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tol = degree_tol::<T>();
        let mut first = true;
        for (s, c) in self.coeffs.iter().enumerate() {
            if c.abs() <= tol {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c:.6}")?;
            for i in 0..self.n {
                if (s >> i) & 1 == 1 {
                    write!(f, "·x{i}")?;
                }
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Exact multilinear interpolation of a table by the in-place Möbius
/// transform: `c_S = Σ_{T⊆S} (−1)^{|S∖T|} t(1_T)`.
pub fn multilinear_coefficients<T: Scalar>(t: &BooleanTable<T>) -> MultilinearPoly<T> {
    let mut coeffs = t.values.clone();
    for i in 0..t.n {
        let bit = 1usize << i;
        for mask in 0..coeffs.len() {
            if mask & bit != 0 {
                let low = coeffs[mask ^ bit];
                coeffs[mask] -= low;
            }
        }
    }
    MultilinearPoly { n: t.n, coeffs }
}

/// Degree of the multilinear interpolation of `t`, ignoring coefficients
/// with magnitude ≤ `tol`.
pub fn exact_degree<T: Scalar>(t: &BooleanTable<T>, tol: T) -> usize {
    multilinear_coefficients(t).degree(tol)
}

/// Halved-degree length bound `⌈degree/2⌉` from an externally supplied
/// degree value. This is the shape of both the exact bound and its
/// approximate-degree variant; no approximate degree is computed here.
pub fn length_bound_from_degree(degree: usize) -> usize {
    degree.div_ceil(2)
}

/// Minimum length of any program computing the table exactly:
/// `⌈deg(t)/2⌉`, with the degree read at the coarse coefficient
/// tolerance.
pub fn length_lower_bound<T: Scalar>(t: &BooleanTable<T>) -> usize {
    length_bound_from_degree(exact_degree(t, degree_tol::<T>()))
}

/// Degree of the acceptance-probability polynomial of a program: build the
/// exhaustive probability table and interpolate. At most `2·length` for
/// every valid program.
pub fn acceptance_poly_degree<T: Scalar>(g: &GqbpProgram<T>, tol: T) -> Result<usize> {
    let t = truth_table(g, TableKind::Probability)?;
    Ok(exact_degree(&t, tol))
}

/// Result of an exhaustive acceptance comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Equivalence<T: Scalar> {
    pub equivalent: bool,
    /// Largest `|P_a(x) − P_b(x)|` over all inputs.
    pub max_deviation: T,
    /// The input attaining the largest deviation, when not equivalent.
    pub witness: Option<u64>,
}

impl<T: Scalar> fmt::Display for Equivalence<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.equivalent {
            write!(f, "equivalent (max deviation {:.3e})", self.max_deviation)
        } else {
            match self.witness {
                Some(w) => write!(
                    f,
                    "NOT equivalent (max deviation {:.3e} at input {w})",
                    self.max_deviation
                ),
                None => write!(f, "NOT equivalent (max deviation {:.3e})", self.max_deviation),
            }
        }
    }
}

/// Compare two models' acceptance probabilities on every input.
///
/// Errors if the models read different numbers of input bits or if `n`
/// exceeds the enumeration cap. On failure the witness is the
/// worst-deviating input.
pub fn equivalent<T: Scalar>(
    a: &dyn AcceptanceModel<T>,
    b: &dyn AcceptanceModel<T>,
    tol: T,
) -> Result<Equivalence<T>> {
    if a.input_bits() != b.input_bits() {
        return Err(Error::MismatchedN { a: a.input_bits(), b: b.input_bits() });
    }
    let ta = truth_table(a, TableKind::Probability)?;
    let tb = truth_table(b, TableKind::Probability)?;
    let mut max_deviation = T::zero();
    let mut argmax = 0u64;
    for (x, (va, vb)) in ta.values.iter().zip(&tb.values).enumerate() {
        let dev = (*va - *vb).abs();
        if dev > max_deviation {
            max_deviation = dev;
            argmax = x as u64;
        }
    }
    let equivalent = max_deviation <= tol;
    Ok(Equivalence {
        equivalent,
        max_deviation,
        witness: if equivalent { None } else { Some(argmax) },
    })
}
