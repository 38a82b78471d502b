//! Dense matrices over `Q` and their p-adic norms.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use thiserror::Error;

use crate::padic::{format_rational, norm, valuation, Norm, Prime, Rational, Valuation};
use crate::poly::Poly;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatrixError {
    #[error("matrix must have at least one row and one column")]
    Empty,
    #[error("row {row} has {found} entries, expected {expected}")]
    Ragged { row: usize, found: usize, expected: usize },
}

/// Row-major dense matrix with at least one row and one column.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl Matrix {
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Matrix, MatrixError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if r == 0 || c == 0 {
            return Err(MatrixError::Empty);
        }
        let mut data = Vec::with_capacity(r * c);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != c {
                return Err(MatrixError::Ragged { row: i, found: row.len(), expected: c });
            }
            data.extend(row);
        }
        Ok(Matrix { rows: r, cols: c, data })
    }

    /// Integer matrix from rows; panics on ragged input.
    pub fn from_i64(rows: &[&[i64]]) -> Matrix {
        Matrix::from_rows(
            rows.iter().map(|r| r.iter().map(|&x| Rational::from_integer(x.into())).collect()).collect(),
        )
        .expect("rectangular integer matrix")
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Rational) -> Matrix {
        assert!(rows > 0 && cols > 0);
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Matrix {
        Matrix::from_fn(rows, cols, |_, _| Rational::zero())
    }

    pub fn identity(n: usize) -> Matrix {
        Matrix::from_fn(n, n, |i, j| if i == j { Rational::one() } else { Rational::zero() })
    }

    pub fn diag(entries: &[Rational]) -> Matrix {
        Matrix::from_fn(entries.len(), entries.len(), |i, j| if i == j { entries[i].clone() } else { Rational::zero() })
    }

    pub fn scalar(n: usize, c: &Rational) -> Matrix {
        Matrix::identity(n).scale(c)
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

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> impl Iterator<Item = &Rational> {
        self.data.iter()
    }

    pub fn row_vecs(&self) -> Vec<Vec<Rational>> {
        self.data.chunks(self.cols).map(<[Rational]>::to_vec).collect()
    }

    pub fn column(&self, j: usize) -> Vec<Rational> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn from_columns(cols: &[Vec<Rational>]) -> Matrix {
        let n = cols[0].len();
        Matrix::from_fn(n, cols.len(), |i, j| cols[j][i].clone())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square() && *self == Matrix::identity(self.rows)
    }

    /// Whether the matrix is `c * I` for some `c`.
    pub fn is_scalar(&self) -> bool {
        self.is_square() && *self == Matrix::scalar(self.rows, self.get(0, 0))
    }

    pub fn scale(&self, c: &Rational) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x * c).collect() }
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn trace(&self) -> Rational {
        assert!(self.is_square());
        (0..self.rows).map(|i| self.get(i, i).clone()).sum()
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * &v[j]).sum())
            .collect()
    }

    pub fn pow(&self, k: u32) -> Matrix {
        let mut acc = Matrix::identity(self.rows);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Reduced row echelon form and the pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(pr) = (row..m.rows).find(|&r| !m.get(r, col).is_zero()) else {
                continue;
            };
            m.swap_rows(row, pr);
            let inv = m.get(row, col).recip();
            for j in 0..m.cols {
                let v = m.get(row, j) * &inv;
                m.set(row, j, v);
            }
            for r in 0..m.rows {
                if r != row && !m.get(r, col).is_zero() {
                    let f = m.get(r, col).clone();
                    for j in 0..m.cols {
                        let v = m.get(r, j) - &f * m.get(row, j);
                        m.set(r, j, v);
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right kernel `{x : M x = 0}`.
    pub fn nullspace(&self) -> Vec<Vec<Rational>> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Rational::zero(); self.cols];
                v[f] = Rational::one();
                for (row, &pc) in pivots.iter().enumerate() {
                    v[pc] = -r.get(row, f).clone();
                }
                v
            })
            .collect()
    }

    pub fn det(&self) -> Rational {
        assert!(self.is_square());
        let mut m = self.clone();
        let n = m.rows;
        let mut det = Rational::one();
        for col in 0..n {
            let Some(pr) = (col..n).find(|&r| !m.get(r, col).is_zero()) else {
                return Rational::zero();
            };
            if pr != col {
                m.swap_rows(pr, col);
                det = -det;
            }
            let pivot = m.get(col, col).clone();
            det *= &pivot;
            for r in col + 1..n {
                if !m.get(r, col).is_zero() {
                    let f = m.get(r, col) / &pivot;
                    for j in col..n {
                        let v = m.get(r, j) - &f * m.get(col, j);
                        m.set(r, j, v);
                    }
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Option<Matrix> {
        assert!(self.is_square());
        let n = self.rows;
        let aug = Matrix::from_fn(n, 2 * n, |i, j| {
            if j < n {
                self.get(i, j).clone()
            } else if j - n == i {
                Rational::one()
            } else {
                Rational::zero()
            }
        });
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        Some(Matrix::from_fn(n, n, |i, j| r.get(i, n + j).clone()))
    }

    /// Kronecker product.
    pub fn kron(&self, other: &Matrix) -> Matrix {
        Matrix::from_fn(self.rows * other.rows, self.cols * other.cols, |i, j| {
            self.get(i / other.rows, j / other.cols) * other.get(i % other.rows, j % other.cols)
        })
    }

    /// Block diagonal matrix with `self` then `other`.
    pub fn block_diag(&self, other: &Matrix) -> Matrix {
        Matrix::from_fn(self.rows + other.rows, self.cols + other.cols, |i, j| {
            match (i < self.rows, j < self.cols) {
                (true, true) => self.get(i, j).clone(),
                (false, false) => other.get(i - self.rows, j - self.cols).clone(),
                _ => Rational::zero(),
            }
        })
    }

    /// Characteristic polynomial `det(X I - M)` (Faddeev-LeVerrier, exact over `Q`).
    pub fn char_poly(&self) -> Poly {
        assert!(self.is_square());
        let n = self.rows;
        let mut coeffs = vec![Rational::zero(); n + 1];
        coeffs[n] = Rational::one();
        let mut aux = Matrix::zeros(n, n);
        for k in 1..=n {
            aux = &(self * &aux) + &Matrix::scalar(n, &coeffs[n - k + 1]);
            let am = self * &aux;
            coeffs[n - k] = -am.trace() / Rational::from_integer((k as i64).into());
        }
        Poly::new(coeffs)
    }

    /// `sum c_i M^i` for a polynomial `f`.
    pub fn eval_poly(&self, f: &Poly) -> Matrix {
        let n = self.rows;
        f.coeffs()
            .iter()
            .rev()
            .fold(Matrix::zeros(n, n), |acc, c| &(&acc * self) + &Matrix::scalar(n, c))
    }

    /// `max |m_ij|_p`.
    pub fn norm(&self, p: Prime) -> Norm {
        self.data.iter().map(|x| norm(x, p)).max().expect("nonempty matrix")
    }

    /// `min v_p(m_ij)`.
    pub fn min_valuation(&self, p: Prime) -> Valuation {
        self.data.iter().map(|x| valuation(x, p)).min().expect("nonempty matrix")
    }

    pub fn is_integral(&self, p: Prime) -> bool {
        self.min_valuation(p) >= Valuation::Finite(0)
    }
}

impl Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows, "incompatible matrix shapes");
        let mut data = vec![Rational::zero(); self.rows * rhs.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if !b.is_zero() {
                        data[i * rhs.cols + j] += a * b;
                    }
                }
            }
        }
        Matrix { rows: self.rows, cols: rhs.cols, data }
    }
}

impl Add for &Matrix {
    type Output = Matrix;
    fn add(self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect() }
    }
}

impl Neg for &Matrix {
    type Output = Matrix;
    fn neg(self) -> Matrix {
        self.scale(&-Rational::one())
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .data
            .chunks(self.cols)
            .map(|r| format!("[{}]", r.iter().map(format_rational).collect::<Vec<_>>().join(", ")))
            .collect();
        write!(f, "[{}]", rows.join(", "))
    }
}

/// A matrix over `Q` viewed at a fixed prime.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PadicMatrix {
    pub prime: Prime,
    pub matrix: Matrix,
}

impl PadicMatrix {
    pub fn new(matrix: Matrix, prime: Prime) -> Self {
        PadicMatrix { prime, matrix }
    }

    /// `||M|| = max_ij |m_ij|`.
    pub fn norm(&self) -> Norm {
        self.matrix.norm(self.prime)
    }
}

/// `||M||` for a matrix at prime `p`.
pub fn matrix_norm(m: &PadicMatrix) -> Norm {
    m.norm()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn norm_examples() {
        let p = Prime::new(5).unwrap();
        assert_eq!(matrix_norm(&PadicMatrix::new(Matrix::from_i64(&[&[1, 5], &[25, 1]]), p)), Norm::ONE);
        let m = Matrix::diag(&[q(1, 5), q(1, 1)]);
        assert_eq!(matrix_norm(&PadicMatrix::new(m, p)), Norm::Pow(1));
        for n in 1..5 {
            assert_eq!(Matrix::identity(n).norm(p), Norm::ONE);
        }
    }

    #[test]
    fn inverse_and_det() {
        let m = Matrix::from_i64(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        let inv = m.inverse().unwrap();
        assert!((&m * &inv).is_identity());
        assert_eq!(m.det(), q(18, 1));
        assert!(Matrix::from_i64(&[&[1, 2], &[2, 4]]).inverse().is_none());
    }

    #[test]
    fn char_poly_examples() {
        let p5 = Matrix::diag(&[q(5, 1), q(1, 1)]);
        assert_eq!(p5.char_poly(), Poly::from_i64(&[5, -6, 1]));
        assert_eq!(Matrix::identity(2).char_poly(), Poly::from_i64(&[1, -2, 1]));
        assert_eq!(Matrix::from_i64(&[&[0, 1], &[1, 0]]).char_poly(), Poly::from_i64(&[-1, 0, 1]));
        // Cayley-Hamilton
        let m = Matrix::from_i64(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        assert!(m.eval_poly(&m.char_poly()).is_zero());
    }

    #[test]
    fn nullspace_and_kron() {
        let m = Matrix::from_i64(&[&[1, 2, 3], &[2, 4, 6]]);
        let ns = m.nullspace();
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert!(m.mul_vec(v).iter().all(Zero::is_zero));
        }
        let k = Matrix::identity(2).kron(&Matrix::from_i64(&[&[1, 2], &[3, 4]]));
        assert_eq!(k, Matrix::from_i64(&[&[1, 2], &[3, 4]]).block_diag(&Matrix::from_i64(&[&[1, 2], &[3, 4]])));
    }
}
