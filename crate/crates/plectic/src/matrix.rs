//! Dense matrices over `Q` with exact Gauss–Jordan elimination.

use crate::rational::{format_rat, Rat};
use num_traits::{One, Zero};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LinAlgError {
    /// Two operands had incompatible shapes.
    DimMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },
    /// A square matrix was required.
    NotSquare { rows: usize, cols: usize },
    /// Inversion of a singular matrix was attempted.
    Singular,
    /// Two subspaces of different ambient spaces were combined.
    AmbientMismatch { left: usize, right: usize },
}

impl fmt::Display for LinAlgError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LinAlgError::DimMismatch { left, right } => {
                write!(f, "shape mismatch: {}x{} vs {}x{}", left.0, left.1, right.0, right.1)
            }
            LinAlgError::NotSquare { rows, cols } => {
                write!(f, "square matrix required, got {rows}x{cols}")
            }
            LinAlgError::Singular => write!(f, "matrix is singular"),
            LinAlgError::AmbientMismatch { left, right } => {
                write!(f, "ambient dimension mismatch: {left} vs {right}")
            }
        }
    }
}

impl std::error::Error for LinAlgError {}

/// A dense `rows x cols` matrix of exact rationals, stored row-major.
///
/// Vectors are columns: a matrix acts on the left, `y = M x`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rat>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Rat>) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count must be rows*cols");
        Matrix { rows, cols, entries }
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        Matrix::new(rows, cols, vec![Rat::zero(); rows * cols])
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zero(n, n);
        for i in 0..n {
            m[(i, i)] = Rat::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Rat) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                entries.push(f(r, c));
            }
        }
        Matrix::new(rows, cols, entries)
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        for r in &rows {
            assert_eq!(r.len(), ncols, "ragged rows");
        }
        Matrix::new(nrows, ncols, rows.into_iter().flatten().collect())
    }

    /// Diagonal matrix from its diagonal entries.
    pub fn diagonal(diag: &[Rat]) -> Self {
        let n = diag.len();
        Matrix::from_fn(n, n, |r, c| if r == c { diag[r].clone() } else { Rat::zero() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn row(&self, r: usize) -> &[Rat] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<Rat>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |r, c| self[(c, r)].clone())
    }

    pub fn scale(&self, s: &Rat) -> Matrix {
        Matrix::from_fn(self.rows, self.cols, |r, c| &self[(r, c)] * s)
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|r| (0..r).all(|c| self[(r, c)] == self[(c, r)]))
    }

    /// `M v` for a column vector `v`.
    pub fn apply(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(v.len(), self.cols, "vector length must match cols");
        (0..self.rows)
            .map(|r| {
                let mut acc = Rat::zero();
                for c in 0..self.cols {
                    let a = &self[(r, c)];
                    if !a.is_zero() && !v[c].is_zero() {
                        acc += a * &v[c];
                    }
                }
                acc
            })
            .collect()
    }

    pub fn mul_mat(&self, other: &Matrix) -> Result<Matrix, LinAlgError> {
        if self.cols != other.rows {
            return Err(LinAlgError::DimMismatch {
                left: (self.rows, self.cols),
                right: (other.rows, other.cols),
            });
        }
        let mut out = Matrix::zero(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(r, k)];
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let b = &other[(k, c)];
                    if !b.is_zero() {
                        let prod = a * b;
                        out[(r, c)] += prod;
                    }
                }
            }
        }
        Ok(out)
    }

    /// `M^e` for a square matrix, `e >= 0`.
    pub fn pow(&self, e: usize) -> Result<Matrix, LinAlgError> {
        if !self.is_square() {
            return Err(LinAlgError::NotSquare { rows: self.rows, cols: self.cols });
        }
        let mut acc = Matrix::identity(self.rows);
        for _ in 0..e {
            acc = acc.mul_mat(self)?;
        }
        Ok(acc)
    }

    /// Kronecker product; block `(i,j)` of the result is `self[i,j] * other`.
    pub fn kronecker(&self, other: &Matrix) -> Matrix {
        Matrix::from_fn(self.rows * other.rows, self.cols * other.cols, |r, c| {
            let (r0, r1) = (r / other.rows, r % other.rows);
            let (c0, c1) = (c / other.cols, c % other.cols);
            &self[(r0, c0)] * &other[(r1, c1)]
        })
    }

    /// Reduced row-echelon form together with the pivot columns.
    /// The RREF of a matrix is unique, so this is a canonical form of the
    /// row space.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut pr = 0usize;
        for col in 0..m.cols {
            if pr >= m.rows {
                break;
            }
            // find a pivot row at or below pr
            let Some(src) = (pr..m.rows).find(|&r| !m[(r, col)].is_zero()) else {
                continue;
            };
            m.swap_rows(pr, src);
            let inv = m[(pr, col)].recip();
            m.scale_row(pr, &inv);
            for r in 0..m.rows {
                if r != pr && !m[(r, col)].is_zero() {
                    let factor = m[(r, col)].clone();
                    m.sub_scaled_row(r, pr, &factor);
                }
            }
            pivots.push(col);
            pr += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    pub fn det(&self) -> Result<Rat, LinAlgError> {
        if !self.is_square() {
            return Err(LinAlgError::NotSquare { rows: self.rows, cols: self.cols });
        }
        let mut m = self.clone();
        let mut det = Rat::one();
        for col in 0..m.cols {
            let Some(src) = (col..m.rows).find(|&r| !m[(r, col)].is_zero()) else {
                return Ok(Rat::zero());
            };
            if src != col {
                m.swap_rows(col, src);
                det = -det;
            }
            det *= m[(col, col)].clone();
            let inv = m[(col, col)].recip();
            m.scale_row(col, &inv);
            for r in col + 1..m.rows {
                if !m[(r, col)].is_zero() {
                    let factor = m[(r, col)].clone();
                    m.sub_scaled_row(r, col, &factor);
                }
            }
        }
        Ok(det)
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    pub fn inverse(&self) -> Result<Matrix, LinAlgError> {
        if !self.is_square() {
            return Err(LinAlgError::NotSquare { rows: self.rows, cols: self.cols });
        }
        let n = self.rows;
        // eliminate on [self | I]
        let mut aug = Matrix::from_fn(n, 2 * n, |r, c| {
            if c < n {
                self[(r, c)].clone()
            } else if c - n == r {
                Rat::one()
            } else {
                Rat::zero()
            }
        });
        let (red, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] >= n {
            return Err(LinAlgError::Singular);
        }
        aug = red;
        Ok(Matrix::from_fn(n, n, |r, c| aug[(r, c + n)].clone()))
    }

    /// A particular solution of `M x = rhs`, or `None` if inconsistent.
    /// Free variables are set to zero.
    pub fn solve(&self, rhs: &[Rat]) -> Option<Vec<Rat>> {
        assert_eq!(rhs.len(), self.rows, "rhs length must match rows");
        let aug = Matrix::from_fn(self.rows, self.cols + 1, |r, c| {
            if c < self.cols {
                self[(r, c)].clone()
            } else {
                rhs[r].clone()
            }
        });
        let (red, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![Rat::zero(); self.cols];
        for (pr, &pc) in pivots.iter().enumerate() {
            x[pc] = red[(pr, self.cols)].clone();
        }
        Some(x)
    }

    /// Basis of the kernel `{ x : M x = 0 }`, one row per basis vector.
    pub fn kernel_basis(&self) -> Vec<Vec<Rat>> {
        let (red, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut basis = Vec::with_capacity(free.len());
        for &fc in &free {
            let mut v = vec![Rat::zero(); self.cols];
            v[fc] = Rat::one();
            for (pr, &pc) in pivots.iter().enumerate() {
                v[pc] = -red[(pr, fc)].clone();
            }
            basis.push(v);
        }
        basis
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.entries.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    fn scale_row(&mut self, r: usize, s: &Rat) {
        for c in 0..self.cols {
            let idx = r * self.cols + c;
            if !self.entries[idx].is_zero() {
                self.entries[idx] = &self.entries[idx] * s;
            }
        }
    }

    /// row[r] -= s * row[src]
    fn sub_scaled_row(&mut self, r: usize, src: usize, s: &Rat) {
        for c in 0..self.cols {
            let v = &self.entries[src * self.cols + c];
            if !v.is_zero() {
                let delta = v * s;
                self.entries[r * self.cols + c] -= delta;
            }
        }
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = Rat;
    fn index(&self, (r, c): (usize, usize)) -> &Rat {
        &self.entries[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Rat {
        &mut self.entries[r * self.cols + c]
    }
}

impl Add for &Matrix {
    type Output = Matrix;
    fn add(self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix::from_fn(self.rows, self.cols, |r, c| &self[(r, c)] + &other[(r, c)])
    }
}

impl Sub for &Matrix {
    type Output = Matrix;
    fn sub(self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix::from_fn(self.rows, self.cols, |r, c| &self[(r, c)] - &other[(r, c)])
    }
}

impl Neg for &Matrix {
    type Output = Matrix;
    fn neg(self) -> Matrix {
        Matrix::from_fn(self.rows, self.cols, |r, c| -self[(r, c)].clone())
    }
}

impl Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, other: &Matrix) -> Matrix {
        self.mul_mat(other).expect("shape mismatch in matrix product")
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            write!(f, "[")?;
            for c in 0..self.cols {
                if c > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", format_rat(&self[(r, c)]))?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_int};

    fn m(rows: &[&[i64]]) -> Matrix {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| rat_int(x)).collect()).collect())
    }

    #[test]
    fn rref_of_identity_is_identity() {
        let id = Matrix::identity(2);
        assert_eq!(id.rref().0, id);
    }

    #[test]
    fn rref_is_idempotent() {
        let a = m(&[&[2, 4, 1], &[1, 2, 0], &[0, 0, 3]]);
        let (r1, _) = a.rref();
        let (r2, _) = r1.rref();
        assert_eq!(r1, r2);
    }

    #[test]
    fn rank_and_kernel() {
        let a = m(&[&[2, 4], &[1, 2]]);
        assert_eq!(a.rank(), 1);
        let k = a.kernel_basis();
        assert_eq!(k.len(), 1);
        // kernel vector (-2, 1)
        assert_eq!(a.apply(&k[0]), vec![rat_int(0), rat_int(0)]);
    }

    #[test]
    fn inverse_round_trip() {
        let a = m(&[&[1, 2], &[3, 5]]);
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul_mat(&inv).unwrap(), Matrix::identity(2));
        assert!(m(&[&[1, 2], &[2, 4]]).inverse().is_err());
    }

    #[test]
    fn determinant() {
        assert_eq!(m(&[&[1, 2], &[3, 5]]).det().unwrap(), rat_int(-1));
        assert_eq!(m(&[&[1, 2], &[2, 4]]).det().unwrap(), rat_int(0));
        assert_eq!(Matrix::diagonal(&[rat(1, 2), rat_int(4)]).det().unwrap(), rat_int(2));
    }

    #[test]
    fn solve_linear_system() {
        let a = m(&[&[1, 2], &[3, 5]]);
        let x = a.solve(&[rat_int(5), rat_int(13)]).unwrap();
        assert_eq!(a.apply(&x), vec![rat_int(5), rat_int(13)]);
        // inconsistent system
        let s = m(&[&[1, 2], &[2, 4]]);
        assert!(s.solve(&[rat_int(1), rat_int(3)]).is_none());
        // underdetermined but consistent
        assert!(s.solve(&[rat_int(1), rat_int(2)]).is_some());
    }

    #[test]
    fn kronecker_shape_and_values() {
        let a = m(&[&[1, 2]]);
        let b = m(&[&[3], &[4]]);
        let k = a.kronecker(&b);
        assert_eq!((k.rows(), k.cols()), (2, 2));
        assert_eq!(k, m(&[&[3, 6], &[4, 8]]));
    }
}
