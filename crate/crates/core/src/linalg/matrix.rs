use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numeric::compensated_sum;

/// Default cap on the dimension of any Kronecker product or tensor power.
pub const DEFAULT_DIM_CAP: usize = 4096;

/// Dense `dim x dim` complex Hermitian operator, stored row-major.
///
/// Construction symmetrizes the input, `(M + M^*) / 2`, so the stored
/// entries satisfy `a[j][k] == conj(a[k][j])` exactly.
#[derive(Clone, PartialEq)]
pub struct HermitianMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl HermitianMatrix {
    /// Build from row-major entries, symmetrizing.
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("matrix dimension must be at least 1".into()));
        }
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch(entries.len(), dim * dim));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidInput("matrix has non-finite entries".into()));
        }
        let mut m = Self { dim, data: entries };
        m.symmetrize();
        Ok(m)
    }

    /// Like [`HermitianMatrix::new`] but rejects inputs whose largest
    /// entrywise deviation from Hermiticity exceeds `tol`.
    pub fn new_checked(dim: usize, entries: Vec<Complex64>, tol: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("matrix dimension must be at least 1".into()));
        }
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch(entries.len(), dim * dim));
        }
        let mut worst = 0.0f64;
        for j in 0..dim {
            for k in j..dim {
                let d = (entries[j * dim + k] - entries[k * dim + j].conj()).norm();
                worst = worst.max(d);
            }
        }
        if worst > tol {
            return Err(Error::InvalidInput(format!(
                "matrix is not Hermitian: max |a[j][k] - conj(a[k][j])| = {worst:e} exceeds {tol:e}"
            )));
        }
        Self::new(dim, entries)
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch(row.len(), dim));
            }
            data.extend_from_slice(row);
        }
        Self::new(dim, data)
    }

    /// Real symmetric input given as rows.
    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let rows: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn diagonal(diag: &[f64]) -> Result<Self> {
        let dim = diag.len();
        let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
        for (i, &d) in diag.iter().enumerate() {
            data[i * dim + i] = Complex64::new(d, 0.0);
        }
        Self::new(dim, data)
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal(&vec![1.0; dim]).expect("identity of positive dimension")
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    /// Rank-one projector `|v><v| / <v|v>`.
    pub fn projector(v: &[Complex64]) -> Result<Self> {
        let norm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if norm2 == 0.0 {
            return Err(Error::InvalidInput("zero vector has no projector".into()));
        }
        Ok(Self::outer(v, 1.0 / norm2))
    }

    /// `scale * |v><v|` without normalization.
    pub(crate) fn outer(v: &[Complex64], scale: f64) -> Self {
        let dim = v.len();
        let mut data = Vec::with_capacity(dim * dim);
        for a in v {
            for b in v {
                data.push(a * b.conj() * scale);
            }
        }
        let mut m = Self { dim, data };
        m.symmetrize();
        m
    }

    pub(crate) fn from_raw(dim: usize, data: Vec<Complex64>) -> Self {
        debug_assert_eq!(data.len(), dim * dim);
        let mut m = Self { dim, data };
        m.symmetrize();
        m
    }

    fn symmetrize(&mut self) {
        let n = self.dim;
        for j in 0..n {
            let d = self.data[j * n + j];
            self.data[j * n + j] = Complex64::new(d.re, 0.0);
            for k in (j + 1)..n {
                let avg = (self.data[j * n + k] + self.data[k * n + j].conj()) * 0.5;
                self.data[j * n + k] = avg;
                self.data[k * n + j] = avg.conj();
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim + col]
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn trace(&self) -> f64 {
        compensated_sum((0..self.dim).map(|i| self.data[i * self.dim + i].re))
    }

    /// `Re Tr(self * other)`; exact trace of a product of Hermitian operators
    /// is real.
    pub fn trace_product(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "trace_product dimension mismatch");
        // Tr(AB) = sum_{jk} A_jk B_kj = sum_{jk} A_jk conj(B_jk)
        compensated_sum(
            self.data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| (a * b.conj()).re),
        )
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    /// `alpha * self + beta * other`.
    pub fn combine(&self, alpha: f64, other: &Self, beta: f64) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(self.dim, other.dim));
        }
        Ok(Self {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a * alpha + b * beta)
                .collect(),
        })
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_diagonal(&self) -> bool {
        let n = self.dim;
        (0..n).all(|j| (0..n).all(|k| j == k || self.data[j * n + k] == Complex64::new(0.0, 0.0)))
    }

    pub fn diagonal_entries(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.data[i * self.dim + i].re).collect()
    }

    /// Kronecker product with the default dimension cap.
    pub fn kron(&self, other: &Self) -> Result<Self> {
        self.kron_with_cap(other, DEFAULT_DIM_CAP)
    }

    /// Kronecker product, index order `i_a * dim_b + i_b`.
    pub fn kron_with_cap(&self, other: &Self, cap: usize) -> Result<Self> {
        let (da, db) = (self.dim, other.dim);
        let d = da
            .checked_mul(db)
            .filter(|&d| d <= cap)
            .ok_or(Error::ResourceLimit {
                what: "kronecker product dimension",
                value: da as u128 * db as u128,
                cap: cap as u128,
            })?;
        let mut data = vec![Complex64::new(0.0, 0.0); d * d];
        for ia in 0..da {
            for ja in 0..da {
                let a = self.data[ia * da + ja];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for ib in 0..db {
                    let row = (ia * db + ib) * d + ja * db;
                    let src = &other.data[ib * db..(ib + 1) * db];
                    for (dst, b) in data[row..row + db].iter_mut().zip(src) {
                        *dst = a * b;
                    }
                }
            }
        }
        Ok(Self { dim: d, data })
    }

    /// `self^{(x)n}` with the default dimension cap.
    pub fn tensor_power(&self, n: usize) -> Result<Self> {
        self.tensor_power_with_cap(n, DEFAULT_DIM_CAP)
    }

    pub fn tensor_power_with_cap(&self, n: usize, cap: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("tensor power requires n >= 1".into()));
        }
        let total = (self.dim as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
        if total > cap as u128 {
            return Err(Error::ResourceLimit {
                what: "tensor power dimension",
                value: total,
                cap: cap as u128,
            });
        }
        let mut acc = self.clone();
        for _ in 1..n {
            acc = acc.kron_with_cap(self, cap)?;
        }
        Ok(acc)
    }
}

impl fmt::Debug for HermitianMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "HermitianMatrix({}x{}) [", self.dim, self.dim)?;
        for r in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|c| {
                    let z = self.get(r, c);
                    format!("{:+.6}{:+.6}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  {}", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl Add for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn add(self, rhs: &HermitianMatrix) -> HermitianMatrix {
        self.combine(1.0, rhs, 1.0).expect("dimension mismatch in Add")
    }
}

impl Sub for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn sub(self, rhs: &HermitianMatrix) -> HermitianMatrix {
        self.combine(1.0, rhs, -1.0).expect("dimension mismatch in Sub")
    }
}

impl Neg for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn neg(self) -> HermitianMatrix {
        self.scale(-1.0)
    }
}
