//! Canonical subspaces of `Q^N`.
//!
//! A subspace is stored as the unique reduced row-echelon basis of its row
//! space, with zero rows dropped. Two `Subspace` values are equal as Rust
//! values exactly when they are equal as subspaces, so all the lattice and
//! verifier code upstream gets decidable, O(1)-after-construction equality.

use crate::matrix::{LinAlgError, Matrix};
use crate::rational::Rat;
use num_traits::{One, Zero};
use std::cmp::Ordering;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subspace {
    ambient: usize,
    /// RREF basis, no zero rows; row count = dim.
    basis: Matrix,
    pivots: Vec<usize>,
}

impl Subspace {
    /// Span of the given row vectors inside `Q^ambient`.
    pub fn span(ambient: usize, rows: Vec<Vec<Rat>>) -> Self {
        for r in &rows {
            assert_eq!(r.len(), ambient, "spanning vector has wrong length");
        }
        let m = Matrix::from_rows(rows);
        Subspace::from_matrix(ambient, &m)
    }

    /// Span of the rows of `m` inside `Q^ambient`.
    pub fn from_matrix(ambient: usize, m: &Matrix) -> Self {
        assert!(m.rows() == 0 || m.cols() == ambient);
        let (red, pivots) = m.rref();
        let kept: Vec<Vec<Rat>> = (0..pivots.len()).map(|r| red.row(r).to_vec()).collect();
        Subspace {
            ambient,
            basis: Matrix::new(pivots.len(), ambient, kept.into_iter().flatten().collect()),
            pivots,
        }
    }

    pub fn zero(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: Matrix::new(0, ambient, Vec::new()),
            pivots: Vec::new(),
        }
    }

    pub fn full(ambient: usize) -> Self {
        Subspace::from_matrix(ambient, &Matrix::identity(ambient))
    }

    /// The line spanned by a single vector (which must be nonzero).
    pub fn line(v: Vec<Rat>) -> Self {
        let ambient = v.len();
        let s = Subspace::span(ambient, vec![v]);
        assert_eq!(s.dim(), 1, "line through the zero vector");
        s
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn basis_rows(&self) -> Vec<Vec<Rat>> {
        self.basis.row_vecs()
    }

    pub fn pivot_columns(&self) -> &[usize] {
        &self.pivots
    }

    /// Reduces `v` modulo this subspace; the result is zero iff `v` lies in it.
    pub fn reduce(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(v.len(), self.ambient);
        let mut x = v.to_vec();
        for (r, &p) in self.pivots.iter().enumerate() {
            if !x[p].is_zero() {
                let c = x[p].clone();
                for j in 0..self.ambient {
                    let b = &self.basis[(r, j)];
                    if !b.is_zero() {
                        let delta = b * &c;
                        x[j] -= delta;
                    }
                }
            }
        }
        x
    }

    pub fn contains_vector(&self, v: &[Rat]) -> bool {
        self.reduce(v).iter().all(Zero::is_zero)
    }

    pub fn contains(&self, other: &Subspace) -> bool {
        self.ambient == other.ambient
            && other.basis_rows().iter().all(|r| self.contains_vector(r))
    }

    fn check_ambient(&self, other: &Subspace) -> Result<(), LinAlgError> {
        if self.ambient != other.ambient {
            return Err(LinAlgError::AmbientMismatch {
                left: self.ambient,
                right: other.ambient,
            });
        }
        Ok(())
    }

    /// Smallest subspace containing both operands.
    pub fn sum(&self, other: &Subspace) -> Result<Subspace, LinAlgError> {
        self.check_ambient(other)?;
        let mut rows = self.basis_rows();
        rows.extend(other.basis_rows());
        Ok(Subspace::span(self.ambient, rows))
    }

    /// Largest subspace contained in both operands.
    ///
    /// Solves `u A = v B` for the two bases: the kernel of the stacked
    /// transposed system yields coefficient vectors whose `A`-halves span
    /// the intersection.
    pub fn intersect(&self, other: &Subspace) -> Result<Subspace, LinAlgError> {
        self.check_ambient(other)?;
        let (ra, rb) = (self.dim(), other.dim());
        if ra == 0 || rb == 0 {
            return Ok(Subspace::zero(self.ambient));
        }
        if self.is_full() {
            return Ok(other.clone());
        }
        if other.is_full() {
            return Ok(self.clone());
        }
        // columns: ra coefficients for self, rb for other
        let sys = Matrix::from_fn(self.ambient, ra + rb, |r, c| {
            if c < ra {
                self.basis[(c, r)].clone()
            } else {
                -other.basis[(c - ra, r)].clone()
            }
        });
        let mut rows = Vec::new();
        for coeffs in sys.kernel_basis() {
            let mut v = vec![Rat::zero(); self.ambient];
            for (i, coef) in coeffs[..ra].iter().enumerate() {
                if !coef.is_zero() {
                    for j in 0..self.ambient {
                        let b = &self.basis[(i, j)];
                        if !b.is_zero() {
                            let delta = b * coef;
                            v[j] += delta;
                        }
                    }
                }
            }
            rows.push(v);
        }
        Ok(Subspace::span(self.ambient, rows))
    }

    /// Image of this subspace under the linear map `m` (acting on columns).
    pub fn image_under(&self, m: &Matrix) -> Subspace {
        assert_eq!(m.cols(), self.ambient);
        let rows: Vec<Vec<Rat>> = self.basis_rows().iter().map(|r| m.apply(r)).collect();
        Subspace::span(m.rows(), rows)
    }

    /// A complement of `self` inside `within`: rows of `within`'s basis that
    /// extend a basis of `self`, picked greedily in canonical order. The
    /// result maps isomorphically onto `within / self`.
    pub fn complement_within(&self, within: &Subspace) -> Result<Subspace, LinAlgError> {
        self.check_ambient(within)?;
        debug_assert!(within.contains(self), "complement requires containment");
        let mut reducer = RowReducer::new(self.ambient);
        for row in self.basis_rows() {
            reducer.add(row);
        }
        let mut picked = Vec::new();
        for row in within.basis_rows() {
            if reducer.add(row.clone()) {
                picked.push(row);
            }
        }
        Ok(Subspace::span(self.ambient, picked))
    }
}

/// Incremental echelon accumulator: tracks the span of rows added so far and
/// reports whether each new row enlarges it. One reduction pass per row.
#[derive(Debug, Clone)]
pub struct RowReducer {
    ambient: usize,
    rows: Vec<Vec<Rat>>,
    pivots: Vec<usize>,
}

impl RowReducer {
    pub fn new(ambient: usize) -> Self {
        RowReducer { ambient, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Adds a row; returns `true` if it was independent of the span so far.
    pub fn add(&mut self, mut v: Vec<Rat>) -> bool {
        assert_eq!(v.len(), self.ambient);
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if !v[p].is_zero() {
                let c = v[p].clone();
                for j in 0..self.ambient {
                    if !row[j].is_zero() {
                        let delta = &row[j] * &c;
                        v[j] -= delta;
                    }
                }
            }
        }
        let Some(pivot) = v.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = v[pivot].recip();
        for x in &mut v {
            if !x.is_zero() {
                *x = &*x * &inv;
            }
        }
        self.rows.push(v);
        self.pivots.push(pivot);
        true
    }

    /// Rank of the union of the current span with the given rows, without
    /// mutating the accumulator.
    pub fn rank_with(&self, extra: &[Vec<Rat>]) -> usize {
        let mut clone = self.clone();
        for row in extra {
            clone.add(row.clone());
        }
        clone.rank()
    }
}

impl PartialOrd for Subspace {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Subspace {
    /// Canonical ordering: by dimension, then lexicographically on the RREF
    /// basis. Used to make closure elements and failure witnesses
    /// deterministic.
    fn cmp(&self, other: &Self) -> Ordering {
        self.dim()
            .cmp(&other.dim())
            .then_with(|| self.basis.cmp(&other.basis))
    }
}

impl fmt::Display for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0 (in Q^{})", self.ambient);
        }
        write!(f, "span")?;
        for r in 0..self.dim() {
            write!(f, " [")?;
            for c in 0..self.ambient {
                if c > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", crate::rational::format_rat(&self.basis[(r, c)]))?;
            }
            write!(f, "]")?;
        }
        Ok(())
    }
}

/// Kernel of `m` as a subspace of `Q^cols`.
pub fn kernel(m: &Matrix) -> Subspace {
    Subspace::span(m.cols(), m.kernel_basis())
}

/// Exact eigenspace `ker(op - lambda)`.
pub fn eigenspace(op: &Matrix, lambda: &Rat) -> Result<Subspace, LinAlgError> {
    if !op.is_square() {
        return Err(LinAlgError::NotSquare { rows: op.rows(), cols: op.cols() });
    }
    let shifted = op - &Matrix::identity(op.rows()).scale(lambda);
    Ok(kernel(&shifted))
}

/// Generalized eigenspace `ker((op - lambda)^N)` with `N` the ambient
/// dimension; the exponent is deliberately the crude upper bound.
pub fn generalized_eigenspace(op: &Matrix, lambda: &Rat) -> Result<Subspace, LinAlgError> {
    if !op.is_square() {
        return Err(LinAlgError::NotSquare { rows: op.rows(), cols: op.cols() });
    }
    let shifted = op - &Matrix::identity(op.rows()).scale(lambda);
    Ok(kernel(&shifted.pow(op.rows())?))
}

/// A linear projection `Q^N -> Q^(N-k)` with a prescribed kernel.
///
/// Coordinates of the target are the non-pivot columns of the kernel's RREF
/// basis, so the standard basis vectors at those columns map to the standard
/// basis of the quotient.
#[derive(Debug, Clone)]
pub struct QuotientMap {
    kernel: Subspace,
    proj: Matrix,
}

impl QuotientMap {
    pub fn new(kernel_space: Subspace) -> Self {
        let n = kernel_space.ambient_dim();
        let pivots = kernel_space.pivot_columns().to_vec();
        let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
        let mut proj = Matrix::zero(free.len(), n);
        for (j, &c) in free.iter().enumerate() {
            proj[(j, c)] = Rat::one();
            for (r, &p) in pivots.iter().enumerate() {
                proj[(j, p)] = -kernel_space.basis()[(r, c)].clone();
            }
        }
        QuotientMap { kernel: kernel_space, proj }
    }

    pub fn kernel(&self) -> &Subspace {
        &self.kernel
    }

    pub fn source_dim(&self) -> usize {
        self.proj.cols()
    }

    pub fn target_dim(&self) -> usize {
        self.proj.rows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.proj
    }

    pub fn apply(&self, v: &[Rat]) -> Vec<Rat> {
        self.proj.apply(v)
    }

    pub fn image_of(&self, s: &Subspace) -> Subspace {
        s.image_under(&self.proj)
    }
}
