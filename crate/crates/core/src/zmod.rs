//! Square matrices over `Z/p^n`.

use std::fmt;

use num_traits::ToPrimitive;

use crate::matrix::Matrix;
use crate::padic::{reduce_mod, PadicError, Prime};

/// Largest modulus accepted, so that products of residues fit in `u128` comfortably.
pub const MAX_MODULUS: u64 = 1 << 32;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ZnMatrix {
    size: usize,
    modulus: u64,
    data: Vec<u64>,
}

impl ZnMatrix {
    pub fn new(size: usize, modulus: u64, data: Vec<u64>) -> ZnMatrix {
        assert_eq!(data.len(), size * size);
        assert!((2..=MAX_MODULUS).contains(&modulus));
        ZnMatrix { size, modulus, data: data.into_iter().map(|x| x % modulus).collect() }
    }

    pub fn identity(size: usize, modulus: u64) -> ZnMatrix {
        let mut data = vec![0; size * size];
        for i in 0..size {
            data[i * size + i] = 1 % modulus;
        }
        ZnMatrix::new(size, modulus, data)
    }

    /// Reduction of a p-integral rational matrix modulo `p^n`.
    pub fn reduce(m: &Matrix, p: Prime, n: u32) -> Result<ZnMatrix, PadicError> {
        assert!(m.is_square());
        let modulus = p.pow(n).to_u64().filter(|&x| x <= MAX_MODULUS).expect("p^n too large for residue matrices");
        let data = m
            .entries()
            .map(|x| reduce_mod(x, p, n).map(|r| r.to_u64().expect("residue fits")))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ZnMatrix::new(m.rows(), modulus, data))
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.size + j]
    }

    pub fn entries(&self) -> &[u64] {
        &self.data
    }

    pub fn is_identity(&self) -> bool {
        *self == ZnMatrix::identity(self.size, self.modulus)
    }

    pub fn mul(&self, rhs: &ZnMatrix) -> ZnMatrix {
        assert_eq!((self.size, self.modulus), (rhs.size, rhs.modulus));
        let n = self.size;
        let m = self.modulus as u128;
        let mut data = vec![0u64; n * n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = 0u128;
                for k in 0..n {
                    acc = (acc + self.get(i, k) as u128 * rhs.get(k, j) as u128) % m;
                }
                data[i * n + j] = acc as u64;
            }
        }
        ZnMatrix { size: n, modulus: self.modulus, data }
    }

    pub fn mul_vec(&self, v: &[u64]) -> Vec<u64> {
        let m = self.modulus as u128;
        (0..self.size)
            .map(|i| {
                (0..self.size).fold(0u128, |acc, k| (acc + self.get(i, k) as u128 * v[k] as u128) % m) as u64
            })
            .collect()
    }

    /// Inverse via Gauss-Jordan with unit pivots; `None` when the matrix is
    /// singular modulo `p`.
    pub fn inverse(&self, p: Prime) -> Option<ZnMatrix> {
        let n = self.size;
        let m = self.modulus as i128;
        let mut a: Vec<Vec<i128>> = (0..n).map(|i| (0..n).map(|j| self.get(i, j) as i128).collect()).collect();
        let mut inv: Vec<Vec<i128>> = (0..n).map(|i| (0..n).map(|j| i128::from(i == j)).collect()).collect();
        let is_unit = |x: i128| x.rem_euclid(p.get() as i128) != 0;
        for col in 0..n {
            let pr = (col..n).find(|&r| is_unit(a[r][col]))?;
            a.swap(col, pr);
            inv.swap(col, pr);
            let pinv = mod_inv_i128(a[col][col], m)?;
            for j in 0..n {
                a[col][j] = (a[col][j] * pinv).rem_euclid(m);
                inv[col][j] = (inv[col][j] * pinv).rem_euclid(m);
            }
            for r in 0..n {
                if r != col && a[r][col] != 0 {
                    let f = a[r][col];
                    for j in 0..n {
                        a[r][j] = (a[r][j] - f * a[col][j]).rem_euclid(m);
                        inv[r][j] = (inv[r][j] - f * inv[col][j]).rem_euclid(m);
                    }
                }
            }
        }
        Some(ZnMatrix::new(n, self.modulus, inv.into_iter().flatten().map(|x| x as u64).collect()))
    }

    /// Reduction to a smaller modulus dividing the current one.
    pub fn reduce_to(&self, modulus: u64) -> ZnMatrix {
        assert_eq!(self.modulus % modulus, 0);
        ZnMatrix::new(self.size, modulus, self.data.clone())
    }

    pub fn row_vecs(&self) -> Vec<Vec<u64>> {
        self.data.chunks(self.size).map(<[u64]>::to_vec).collect()
    }
}

fn mod_inv_i128(a: i128, m: i128) -> Option<i128> {
    let (mut old_r, mut r) = (a.rem_euclid(m), m);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    (old_r == 1).then(|| old_s.rem_euclid(m))
}

impl fmt::Display for ZnMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} mod {}", self.row_vecs(), self.modulus)
    }
}
