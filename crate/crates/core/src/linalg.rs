//! Dense exact linear algebra over a prime field `F_p`.
//!
//! Matrices here are small (a few hundred rows at most), so everything is a
//! plain row-major `Vec<u32>` and Gaussian elimination without pivoting
//! heuristics.

use std::fmt;

use thiserror::Error;

/// Largest characteristic accepted; keeps products of two residues inside `u64`
/// with plenty of room for accumulation.
pub const MAX_PRIME: u32 = 1 << 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("shape mismatch: {op} on {left:?} and {right:?}")]
    ShapeMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("characteristic mismatch: {0} vs {1}")]
    FieldMismatch(u32, u32),
    #[error("{0} is not a prime in [2, 2^16)")]
    NotPrime(u32),
}

pub fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub fn check_prime(p: u32) -> Result<u32, LinalgError> {
    if p < MAX_PRIME && is_prime(p) {
        Ok(p)
    } else {
        Err(LinalgError::NotPrime(p))
    }
}

#[inline]
pub fn mod_add(a: u32, b: u32, p: u32) -> u32 {
    let s = a + b;
    if s >= p {
        s - p
    } else {
        s
    }
}

#[inline]
pub fn mod_sub(a: u32, b: u32, p: u32) -> u32 {
    if a >= b {
        a - b
    } else {
        a + p - b
    }
}

#[inline]
pub fn mod_mul(a: u32, b: u32, p: u32) -> u32 {
    ((a as u64 * b as u64) % p as u64) as u32
}

#[inline]
pub fn mod_neg(a: u32, p: u32) -> u32 {
    if a == 0 {
        0
    } else {
        p - a
    }
}

pub fn mod_inv(a: u32, p: u32) -> u32 {
    debug_assert!(a % p != 0, "inverse of zero");
    let mut base = a as u64 % p as u64;
    let mut exp = p - 2;
    let mut acc = 1u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p as u64;
        }
        base = base * base % p as u64;
        exp >>= 1;
    }
    acc as u32
}

/// Reduce a signed integer into `[0, p)`.
pub fn reduce(value: i64, p: u32) -> u32 {
    value.rem_euclid(p as i64) as u32
}

#[derive(Clone, PartialEq, Eq)]
pub struct FpMatrix {
    rows: usize,
    cols: usize,
    p: u32,
    data: Vec<u32>,
}

impl fmt::Debug for FpMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FpMatrix[{}x{} mod {}]", self.rows, self.cols, self.p)?;
        for r in 0..self.rows {
            write!(f, "\n  {:?}", self.row(r))?;
        }
        Ok(())
    }
}

/// Reduced row echelon form together with the pivot column of each nonzero row.
#[derive(Debug, Clone)]
pub struct Rref {
    pub matrix: FpMatrix,
    pub pivots: Vec<usize>,
}

/// Kernel basis whose restriction to the `free` coordinates is the identity.
///
/// Because of that normalization, the coordinates of a kernel vector `w` in
/// `basis` are simply `w[free[0]], w[free[1]], ...`.
#[derive(Debug, Clone)]
pub struct Kernel {
    pub basis: FpMatrix,
    pub free: Vec<usize>,
}

impl Kernel {
    pub fn dim(&self) -> usize {
        self.free.len()
    }

    /// Coordinates (in `basis`) of every column of `vectors`, which must lie in the kernel.
    pub fn coordinates(&self, vectors: &FpMatrix) -> FpMatrix {
        vectors.select_rows(&self.free)
    }
}

/// A complement of a subspace `W ⊆ F_p^dim` spanned by standard basis vectors,
/// together with the projection `F_p^dim → F_p^dim / W` in those coordinates.
#[derive(Debug, Clone)]
pub struct QuotientBasis {
    pub complement: Vec<usize>,
    pub projection: FpMatrix,
}

impl QuotientBasis {
    pub fn dim(&self) -> usize {
        self.complement.len()
    }

    /// Section of the projection: the standard vectors at the complement indices.
    pub fn section(&self, ambient: usize, p: u32) -> FpMatrix {
        let mut s = FpMatrix::zeros(ambient, self.complement.len(), p);
        for (c, &idx) in self.complement.iter().enumerate() {
            s.set(idx, c, 1);
        }
        s
    }
}

impl FpMatrix {
    pub fn zeros(rows: usize, cols: usize, p: u32) -> Self {
        FpMatrix {
            rows,
            cols,
            p,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize, p: u32) -> Self {
        let mut m = Self::zeros(n, n, p);
        for i in 0..n {
            m.set(i, i, 1 % p);
        }
        m
    }

    /// Build from signed integer rows; entries are reduced mod `p`.
    pub fn from_rows(p: u32, rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut m = Self::zeros(r, c, p);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, &v) in row.iter().enumerate() {
                m.set(i, j, reduce(v, p));
            }
        }
        m
    }

    /// Build a `rows × columns.len()` matrix from column vectors.
    pub fn from_columns(p: u32, rows: usize, columns: &[Vec<u32>]) -> Self {
        let mut m = Self::zeros(rows, columns.len(), p);
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows, "column length");
            for (i, &v) in col.iter().enumerate() {
                m.set(i, j, v % p);
            }
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<u32> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    pub fn transpose(&self) -> FpMatrix {
        let mut t = FpMatrix::zeros(self.cols, self.rows, self.p);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    pub fn mul(&self, other: &FpMatrix) -> Result<FpMatrix, LinalgError> {
        if self.p != other.p {
            return Err(LinalgError::FieldMismatch(self.p, other.p));
        }
        if self.cols != other.rows {
            return Err(LinalgError::ShapeMismatch {
                op: "mul",
                left: self.shape(),
                right: other.shape(),
            });
        }
        let p = self.p as u64;
        let mut out = FpMatrix::zeros(self.rows, other.cols, self.p);
        let mut acc = vec![0u64; other.cols];
        for r in 0..self.rows {
            acc.iter_mut().for_each(|a| *a = 0);
            for k in 0..self.cols {
                let a = self.get(r, k) as u64;
                if a == 0 {
                    continue;
                }
                let orow = other.row(k);
                for (slot, &b) in acc.iter_mut().zip(orow) {
                    *slot = (*slot + a * b as u64) % p;
                }
            }
            for (c, &v) in acc.iter().enumerate() {
                out.set(r, c, v as u32);
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[u32]) -> Result<Vec<u32>, LinalgError> {
        if v.len() != self.cols {
            return Err(LinalgError::ShapeMismatch {
                op: "mul_vec",
                left: self.shape(),
                right: (v.len(), 1),
            });
        }
        let p = self.p as u64;
        Ok((0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .fold(0u64, |acc, (&a, &b)| (acc + a as u64 * b as u64) % p) as u32
            })
            .collect())
    }

    pub fn add(&self, other: &FpMatrix) -> Result<FpMatrix, LinalgError> {
        if self.shape() != other.shape() {
            return Err(LinalgError::ShapeMismatch {
                op: "add",
                left: self.shape(),
                right: other.shape(),
            });
        }
        let mut out = self.clone();
        for (a, &b) in out.data.iter_mut().zip(&other.data) {
            *a = mod_add(*a, b, self.p);
        }
        Ok(out)
    }

    pub fn scale(&self, s: u32) -> FpMatrix {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a = mod_mul(*a, s % self.p, self.p);
        }
        out
    }

    /// Horizontal concatenation; all parts must have `rows` rows.
    pub fn hstack(rows: usize, p: u32, parts: &[&FpMatrix]) -> Result<FpMatrix, LinalgError> {
        let cols = parts.iter().map(|m| m.cols).sum();
        let mut out = FpMatrix::zeros(rows, cols, p);
        let mut offset = 0;
        for m in parts {
            if m.rows != rows {
                return Err(LinalgError::ShapeMismatch {
                    op: "hstack",
                    left: (rows, offset),
                    right: m.shape(),
                });
            }
            for r in 0..rows {
                for c in 0..m.cols {
                    out.set(r, offset + c, m.get(r, c));
                }
            }
            offset += m.cols;
        }
        Ok(out)
    }

    pub fn select_columns(&self, cols: &[usize]) -> FpMatrix {
        let mut out = FpMatrix::zeros(self.rows, cols.len(), self.p);
        for r in 0..self.rows {
            for (j, &c) in cols.iter().enumerate() {
                out.set(r, j, self.get(r, c));
            }
        }
        out
    }

    pub fn select_rows(&self, rows: &[usize]) -> FpMatrix {
        let mut out = FpMatrix::zeros(rows.len(), self.cols, self.p);
        for (i, &r) in rows.iter().enumerate() {
            out.data[i * self.cols..(i + 1) * self.cols].copy_from_slice(self.row(r));
        }
        out
    }

    pub fn rref(&self) -> Rref {
        let p = self.p;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(piv) = (row..m.rows).find(|&r| m.get(r, col) != 0) else {
                continue;
            };
            if piv != row {
                for c in 0..m.cols {
                    m.data.swap(piv * m.cols + c, row * m.cols + c);
                }
            }
            let inv = mod_inv(m.get(row, col), p);
            for c in col..m.cols {
                let v = m.get(row, c);
                m.set(row, c, mod_mul(v, inv, p));
            }
            for r in 0..m.rows {
                if r == row {
                    continue;
                }
                let factor = m.get(r, col);
                if factor == 0 {
                    continue;
                }
                for c in col..m.cols {
                    let v = mod_sub(m.get(r, c), mod_mul(factor, m.get(row, c), p), p);
                    m.set(r, c, v);
                }
            }
            pivots.push(col);
            row += 1;
        }
        Rref { matrix: m, pivots }
    }

    pub fn rank(&self) -> usize {
        if self.rows == 0 || self.cols == 0 {
            return 0;
        }
        self.rref().pivots.len()
    }

    pub fn kernel(&self) -> Kernel {
        let Rref { matrix: r, pivots } = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        let free: Vec<usize> = (0..self.cols).filter(|&c| !is_pivot[c]).collect();
        let mut basis = FpMatrix::zeros(self.cols, free.len(), self.p);
        for (k, &f) in free.iter().enumerate() {
            basis.set(f, k, 1 % self.p);
            for (i, &pc) in pivots.iter().enumerate() {
                basis.set(pc, k, mod_neg(r.get(i, f), self.p));
            }
        }
        Kernel { basis, free }
    }

    pub fn kernel_basis(&self) -> FpMatrix {
        self.kernel().basis
    }

    /// Linearly independent columns of `self` spanning its column space.
    pub fn image_basis(&self) -> FpMatrix {
        let pivots = self.rref().pivots;
        self.select_columns(&pivots)
    }

    /// Solve `self · x = b`; `Ok(None)` when `b` is not in the image.
    pub fn solve(&self, b: &[u32]) -> Result<Option<Vec<u32>>, LinalgError> {
        if b.len() != self.rows {
            return Err(LinalgError::ShapeMismatch {
                op: "solve",
                left: self.shape(),
                right: (b.len(), 1),
            });
        }
        let mut aug = FpMatrix::zeros(self.rows, self.cols + 1, self.p);
        for r in 0..self.rows {
            for c in 0..self.cols {
                aug.set(r, c, self.get(r, c));
            }
            aug.set(r, self.cols, b[r] % self.p);
        }
        let Rref { matrix, pivots } = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return Ok(None);
        }
        let mut x = vec![0; self.cols];
        for (i, &pc) in pivots.iter().enumerate() {
            x[pc] = matrix.get(i, self.cols);
        }
        Ok(Some(x))
    }
}

/// Complement of `span(spanning columns)` in `F_p^dim` by standard vectors,
/// and the projection onto the quotient in those coordinates.
pub fn quotient_basis(dim: usize, spanning: &FpMatrix) -> Result<QuotientBasis, LinalgError> {
    if spanning.rows() != dim {
        return Err(LinalgError::ShapeMismatch {
            op: "quotient_basis",
            left: (dim, dim),
            right: spanning.shape(),
        });
    }
    let p = spanning.p();
    let Rref { matrix: w, pivots } = spanning.transpose().rref();
    let mut pivot_row = vec![None; dim];
    for (i, &c) in pivots.iter().enumerate() {
        pivot_row[c] = Some(i);
    }
    let complement: Vec<usize> = (0..dim).filter(|&c| pivot_row[c].is_none()).collect();
    let mut projection = FpMatrix::zeros(complement.len(), dim, p);
    for (k, &t) in complement.iter().enumerate() {
        projection.set(k, t, 1 % p);
    }
    for (t, slot) in pivot_row.iter().enumerate() {
        if let Some(i) = *slot {
            for (k, &c) in complement.iter().enumerate() {
                projection.set(k, t, mod_neg(w.get(i, c), p));
            }
        }
    }
    Ok(QuotientBasis {
        complement,
        projection,
    })
}
