//! Block form of qubit tensor powers.
//!
//! For a 2x2 matrix `M`, `M^{(x)n}` commutes with permutations of the tensor
//! factors. In the isotypic decomposition of `(C^2)^{(x)n}` it acts as
//!
//! ```text
//! M^{(x)n} = (+)_{k=0}^{floor(n/2)}  det(M)^k Sym^{n-2k}(M) (x) I_{f_k},
//! f_k = C(n, k) - C(n, k-1),
//! ```
//!
//! where `Sym^m(M)` is `M^{(x)m}` restricted to the symmetric subspace in the
//! normalized Dicke basis. The decomposition is orthogonal and the Dicke basis
//! is orthonormal, so any real linear combination of such tensor powers has
//! the same spectrum as the block-diagonal operator. This turns the
//! `2^n`-dimensional eigenproblems of the exact oracles into at most
//! `n / 2 + 1` problems of size at most `n + 1`.

use num_complex::Complex64;

use super::eigen::{eigenvalues, eigh, SpectralDecomposition};
use super::matrix::HermitianMatrix;
use crate::error::{Error, Result};
use crate::numeric::compensated_sum;

/// One irreducible block `matrix (x) I_multiplicity`.
#[derive(Debug, Clone)]
pub struct SymmetricBlock {
    pub multiplicity: f64,
    pub matrix: HermitianMatrix,
}

/// Block-diagonal operator on `(C^2)^{(x)n}` in the permutation-adapted basis.
#[derive(Debug, Clone)]
pub struct SymmetricBlocks {
    n: usize,
    blocks: Vec<SymmetricBlock>,
}

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64).round()
}

fn powers(z: Complex64, max: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(max + 1);
    let mut acc = Complex64::new(1.0, 0.0);
    for _ in 0..=max {
        out.push(acc);
        acc *= z;
    }
    out
}

/// `Sym^m(M)` in the normalized Dicke basis `|D_a>`, `a` = number of ones.
fn symmetric_power(m: &HermitianMatrix, deg: usize) -> HermitianMatrix {
    let (m00, m01, m10, m11) = (m.get(0, 0), m.get(0, 1), m.get(1, 0), m.get(1, 1));
    let (p00, p01, p10, p11) = (
        powers(m00, deg),
        powers(m01, deg),
        powers(m10, deg),
        powers(m11, deg),
    );
    let d = deg + 1;
    let mut data = vec![Complex64::new(0.0, 0.0); d * d];
    for a in 0..=deg {
        for b in 0..=deg {
            // sum over y with |y| = b fixed, x with |x| = a:
            // j ones of x sit under ones of y, a - j under zeros of y
            let lo = a.saturating_sub(deg - b);
            let hi = a.min(b);
            let mut acc = Complex64::new(0.0, 0.0);
            for j in lo..=hi {
                let coeff = binomial(b, j) * binomial(deg - b, a - j);
                acc += p11[j] * p01[b - j] * p10[a - j] * p00[deg + j - a - b] * coeff;
            }
            let norm = (binomial(deg, b) / binomial(deg, a)).sqrt();
            data[a * d + b] = acc * norm;
        }
    }
    HermitianMatrix::from_raw(d, data)
}

impl SymmetricBlocks {
    /// Block form of `m^{(x)n}` for a 2x2 Hermitian `m`.
    pub fn tensor_power(m: &HermitianMatrix, n: usize) -> Result<Self> {
        if m.dim() != 2 {
            return Err(Error::InvalidInput(format!(
                "symmetric block form needs a qubit operator, got dimension {}",
                m.dim()
            )));
        }
        if n == 0 {
            return Err(Error::InvalidInput("tensor power requires n >= 1".into()));
        }
        let det = (m.get(0, 0) * m.get(1, 1) - m.get(0, 1) * m.get(1, 0)).re;
        let blocks = (0..=n / 2)
            .map(|k| {
                let mult = binomial(n, k) - if k == 0 { 0.0 } else { binomial(n, k - 1) };
                SymmetricBlock {
                    multiplicity: mult,
                    matrix: symmetric_power(m, n - 2 * k).scale(det.powi(k as i32)),
                }
            })
            .collect();
        Ok(Self { n, blocks })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[SymmetricBlock] {
        &self.blocks
    }

    /// Dimension of the full operator, `sum_k f_k * dim(block_k)`.
    pub fn full_dim(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| b.multiplicity * b.matrix.dim() as f64)
            .sum()
    }

    /// `alpha * self + beta * other`, block by block.
    pub fn combine(&self, alpha: f64, other: &Self, beta: f64) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(self.n, other.n));
        }
        let blocks = self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(x, y)| {
                Ok(SymmetricBlock {
                    multiplicity: x.multiplicity,
                    matrix: x.matrix.combine(alpha, &y.matrix, beta)?,
                })
            })
            .collect::<Result<_>>()?;
        Ok(Self { n: self.n, blocks })
    }

    pub fn trace(&self) -> f64 {
        compensated_sum(self.blocks.iter().map(|b| b.multiplicity * b.matrix.trace()))
    }

    /// Eigenvalues with their multiplicities.
    pub fn weighted_eigenvalues(&self) -> Result<Vec<(f64, f64)>> {
        let mut out = Vec::new();
        for b in &self.blocks {
            for l in eigenvalues(&b.matrix)? {
                out.push((l, b.multiplicity));
            }
        }
        Ok(out)
    }

    pub fn trace_norm(&self) -> Result<f64> {
        Ok(compensated_sum(
            self.weighted_eigenvalues()?
                .into_iter()
                .map(|(l, m)| m * l.abs()),
        ))
    }

    pub fn positive_part_trace(&self) -> Result<f64> {
        Ok(compensated_sum(
            self.weighted_eigenvalues()?
                .into_iter()
                .filter(|(l, _)| *l > 0.0)
                .map(|(l, m)| m * l),
        ))
    }

    /// Spectral decomposition of each block.
    pub fn eigh(&self, group_tol: f64) -> Result<Vec<(f64, SpectralDecomposition)>> {
        self.blocks
            .iter()
            .map(|b| Ok((b.multiplicity, eigh(&b.matrix, group_tol)?)))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::eigen::trace_norm;

    fn qubit(a: f64, b: f64, re: f64, im: f64) -> HermitianMatrix {
        HermitianMatrix::new(
            2,
            vec![
                Complex64::new(a, 0.0),
                Complex64::new(re, im),
                Complex64::new(re, -im),
                Complex64::new(b, 0.0),
            ],
        )
        .unwrap()
    }

    #[test]
    fn block_dimensions_add_up() {
        let m = qubit(0.6, 0.4, 0.1, 0.2);
        for n in 1..=9 {
            let b = SymmetricBlocks::tensor_power(&m, n).unwrap();
            assert_eq!(b.full_dim(), 2f64.powi(n as i32));
            assert!((b.trace() - m.trace().powi(n as i32)).abs() < 1e-13);
        }
    }

    #[test]
    fn matches_dense_trace_norm() {
        let rho = qubit(0.7, 0.3, 0.2, -0.1);
        let sigma = qubit(0.45, 0.55, -0.15, 0.25);
        for n in 1..=6 {
            for kappa in [0.3, 1.0, 2.5] {
                let dense = rho
                    .tensor_power(n)
                    .unwrap()
                    .combine(kappa, &sigma.tensor_power(n).unwrap(), -1.0)
                    .unwrap();
                let blocks = SymmetricBlocks::tensor_power(&rho, n)
                    .unwrap()
                    .combine(kappa, &SymmetricBlocks::tensor_power(&sigma, n).unwrap(), -1.0)
                    .unwrap();
                let a = trace_norm(&dense).unwrap();
                let b = blocks.trace_norm().unwrap();
                assert!((a - b).abs() < 1e-12, "n={n} kappa={kappa}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn rejects_non_qubit() {
        assert!(SymmetricBlocks::tensor_power(&HermitianMatrix::identity(3), 2).is_err());
    }
}
