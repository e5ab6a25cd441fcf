//! Cyclic Jacobi eigensolver for dense Hermitian matrices and the spectral
//! functions built on it.

use num_complex::Complex64;

use super::matrix::HermitianMatrix;
use crate::error::{Error, Result};
use crate::numeric::{compensated_sum, NeumaierSum};

/// Default relative gap below which raw eigenvalues are merged.
pub const DEFAULT_GROUP_TOL: f64 = 1e-8;
/// Eigenvalues below `SUPPORT_CUTOFF * lambda_max` count as zero.
pub const SUPPORT_CUTOFF: f64 = 1e-12;
/// Most negative eigenvalue accepted for a positive semidefinite input.
pub const PSD_TOL: f64 = 1e-12;

const MAX_SWEEPS: usize = 100;
const OFF_DIAGONAL_TOL: f64 = 1e-14;

/// `A = sum_j eigenvalues[j] * projectors[j]` with distinct eigenvalues in
/// descending order and mutually orthogonal projectors.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    dim: usize,
    eigenvalues: Vec<f64>,
    projectors: Vec<HermitianMatrix>,
    ranks: Vec<usize>,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn projectors(&self) -> &[HermitianMatrix] {
        &self.projectors
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    /// Iterate over `(eigenvalue, projector, rank)`.
    pub fn iter(&self) -> impl Iterator<Item = (f64, &HermitianMatrix, usize)> {
        self.eigenvalues
            .iter()
            .zip(&self.projectors)
            .zip(&self.ranks)
            .map(|((&l, p), &r)| (l, p, r))
    }

    pub fn max_abs_eigenvalue(&self) -> f64 {
        self.eigenvalues.iter().map(|l| l.abs()).fold(0.0, f64::max)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    /// Threshold separating the support from the kernel.
    pub fn support_threshold(&self) -> f64 {
        let top = self.eigenvalues.first().copied().unwrap_or(0.0).max(0.0);
        SUPPORT_CUTOFF * top
    }

    /// The `(eigenvalue, projector, rank)` triples with eigenvalue above the
    /// support cutoff.
    pub fn support(&self) -> impl Iterator<Item = (f64, &HermitianMatrix, usize)> {
        let thr = self.support_threshold();
        self.iter().filter(move |(l, _, _)| *l > thr)
    }

    /// `Tr A` over the support (compensated).
    pub fn trace(&self) -> f64 {
        compensated_sum(self.iter().map(|(l, _, r)| l * r as f64))
    }

    /// Rank of the support.
    pub fn support_rank(&self) -> usize {
        self.support().map(|(_, _, r)| r).sum()
    }

    /// `sum_j eigenvalues[j] * projectors[j]`.
    pub fn reconstruct(&self) -> HermitianMatrix {
        let mut acc = HermitianMatrix::zeros(self.dim);
        for (l, p, _) in self.iter() {
            acc = acc.combine(1.0, p, l).expect("projectors share the dimension");
        }
        acc
    }

    /// Same decomposition with every eigenvalue mapped through `f`; groups
    /// are kept as they are.
    pub(crate) fn map_eigenvalues(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            dim: self.dim,
            eigenvalues: self.eigenvalues.iter().map(|&l| f(l)).collect(),
            projectors: self.projectors.clone(),
            ranks: self.ranks.clone(),
        }
    }
}

struct RawEigen {
    values: Vec<f64>,
    // column k of the row-major `vectors` is the eigenvector for values[k]
    vectors: Option<Vec<Complex64>>,
}

fn jacobi(h: &HermitianMatrix, want_vectors: bool) -> Result<RawEigen> {
    let n = h.dim();
    let mut a = h.entries().to_vec();
    let mut v = want_vectors.then(|| HermitianMatrix::identity(n).entries().to_vec());
    let norm = h.frobenius_norm();
    let zero = Complex64::new(0.0, 0.0);

    if norm > 0.0 && n > 1 {
        let mut converged = false;
        for _ in 0..MAX_SWEEPS {
            let off: f64 = (0..n)
                .flat_map(|j| (0..n).filter(move |&k| k != j).map(move |k| (j, k)))
                .map(|(j, k)| a[j * n + k].norm_sqr())
                .sum::<f64>()
                .sqrt();
            if off < OFF_DIAGONAL_TOL * norm {
                converged = true;
                break;
            }
            for p in 0..n - 1 {
                for q in (p + 1)..n {
                    let apq = a[p * n + q];
                    let mag = apq.norm();
                    if mag == 0.0 {
                        continue;
                    }
                    let phase = apq / mag;
                    let app = a[p * n + p].re;
                    let aqq = a[q * n + q].re;
                    let theta = (aqq - app) / (2.0 * mag);
                    let t = if theta.abs() > 1e150 {
                        0.5 / theta
                    } else {
                        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                    };
                    let t = if theta == 0.0 { 1.0 } else { t };
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    // V = [[c, s e^{i phi}], [-s e^{-i phi}, c]] on the (p, q) plane
                    let vpq = phase * s;
                    let vqp = -phase.conj() * s;
                    for r in 0..n {
                        let x = a[r * n + p];
                        let y = a[r * n + q];
                        a[r * n + p] = x * c + y * vqp;
                        a[r * n + q] = x * vpq + y * c;
                    }
                    for r in 0..n {
                        let x = a[p * n + r];
                        let y = a[q * n + r];
                        a[p * n + r] = x * c + y * vqp.conj();
                        a[q * n + r] = x * vpq.conj() + y * c;
                    }
                    a[p * n + q] = zero;
                    a[q * n + p] = zero;
                    a[p * n + p] = Complex64::new(a[p * n + p].re, 0.0);
                    a[q * n + q] = Complex64::new(a[q * n + q].re, 0.0);
                    if let Some(v) = v.as_mut() {
                        for r in 0..n {
                            let x = v[r * n + p];
                            let y = v[r * n + q];
                            v[r * n + p] = x * c + y * vqp;
                            v[r * n + q] = x * vpq + y * c;
                        }
                    }
                }
            }
        }
        if !converged {
            return Err(Error::NonConvergence {
                routine: "cyclic Jacobi eigensolver",
                iterations: MAX_SWEEPS,
            });
        }
    }

    Ok(RawEigen {
        values: (0..n).map(|i| a[i * n + i].re).collect(),
        vectors: v,
    })
}

/// Raw eigenvalues (with multiplicity) in descending order.
pub fn eigenvalues(h: &HermitianMatrix) -> Result<Vec<f64>> {
    if h.is_diagonal() {
        let mut d = h.diagonal_entries();
        d.sort_by(|x, y| y.total_cmp(x));
        return Ok(d);
    }
    let mut vals = jacobi(h, false)?.values;
    vals.sort_by(|x, y| y.total_cmp(x));
    Ok(vals)
}

/// Spectral decomposition with eigenvalues grouped when consecutive raw
/// eigenvalues differ by at most `group_tol * max(1, ||H||)`.
pub fn eigh(h: &HermitianMatrix, group_tol: f64) -> Result<SpectralDecomposition> {
    let n = h.dim();
    let raw = jacobi(h, true)?;
    let vecs = raw.vectors.expect("vectors requested");
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| raw.values[y].total_cmp(&raw.values[x]));

    let spectral_norm = raw.values.iter().map(|l| l.abs()).fold(0.0, f64::max);
    let gap = group_tol * spectral_norm.max(1.0);

    let mut groups: Vec<Vec<usize>> = Vec::new();
    for &k in &order {
        match groups.last_mut() {
            Some(g) if raw.values[*g.last().unwrap()] - raw.values[k] <= gap => g.push(k),
            _ => groups.push(vec![k]),
        }
    }

    let mut eigenvalues = Vec::with_capacity(groups.len());
    let mut projectors = Vec::with_capacity(groups.len());
    let mut ranks = Vec::with_capacity(groups.len());
    for g in groups {
        let mean = compensated_sum(g.iter().map(|&k| raw.values[k])) / g.len() as f64;
        let mut proj = vec![Complex64::new(0.0, 0.0); n * n];
        for &k in &g {
            for r in 0..n {
                let vr = vecs[r * n + k];
                for c in 0..n {
                    proj[r * n + c] += vr * vecs[c * n + k].conj();
                }
            }
        }
        eigenvalues.push(mean);
        projectors.push(HermitianMatrix::from_raw(n, proj));
        ranks.push(g.len());
    }
    Ok(SpectralDecomposition {
        dim: n,
        eigenvalues,
        projectors,
        ranks,
    })
}

/// `(lambda_k, <v_k|A|v_k>, <v_k|B|v_k>)` for every eigenpair of `h`, without
/// forming projectors.
pub(crate) fn eigen_overlaps(
    h: &HermitianMatrix,
    a: &HermitianMatrix,
    b: &HermitianMatrix,
) -> Result<Vec<(f64, f64, f64)>> {
    let n = h.dim();
    if a.dim() != n || b.dim() != n {
        return Err(Error::DimensionMismatch(n, a.dim().max(b.dim())));
    }
    if h.is_diagonal() {
        let (hd, ad, bd) = (h.diagonal_entries(), a.diagonal_entries(), b.diagonal_entries());
        return Ok((0..n).map(|i| (hd[i], ad[i], bd[i])).collect());
    }
    let raw = jacobi(h, true)?;
    let vecs = raw.vectors.expect("vectors requested");
    let quad = |m: &HermitianMatrix, k: usize| -> f64 {
        let e = m.entries();
        let mut acc = NeumaierSum::new();
        for r in 0..n {
            let vr = vecs[r * n + k].conj();
            let mut row = Complex64::new(0.0, 0.0);
            for c in 0..n {
                row += e[r * n + c] * vecs[c * n + k];
            }
            acc.add((vr * row).re);
        }
        acc.value()
    };
    Ok((0..n).map(|k| (raw.values[k], quad(a, k), quad(b, k))).collect())
}

/// `||H||_1`, the sum of absolute eigenvalues.
pub fn trace_norm(h: &HermitianMatrix) -> Result<f64> {
    Ok(compensated_sum(eigenvalues(h)?.into_iter().map(f64::abs)))
}

/// `Tr H_+`, the sum of positive eigenvalues.
pub fn positive_part_trace(h: &HermitianMatrix) -> Result<f64> {
    Ok(compensated_sum(
        eigenvalues(h)?.into_iter().filter(|&l| l > 0.0),
    ))
}

/// `X^t := sum_{x > 0} x^t P_x`, powers taken on the support. `t = 0` gives
/// the support projection.
pub fn matrix_power_support(d: &SpectralDecomposition, t: f64) -> Result<HermitianMatrix> {
    let scale = d.max_abs_eigenvalue().max(1.0);
    if d.min_eigenvalue() < -PSD_TOL * scale {
        return Err(Error::InvalidInput(format!(
            "matrix power on the support needs a positive semidefinite input; min eigenvalue {:e}",
            d.min_eigenvalue()
        )));
    }
    let mut acc = HermitianMatrix::zeros(d.dim());
    for (l, p, _) in d.support() {
        acc = acc.combine(1.0, p, l.powf(t))?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn plus_projector() -> HermitianMatrix {
        HermitianMatrix::projector(&[c(1.0, 0.0), c(1.0, 0.0)]).unwrap()
    }

    #[test]
    fn diagonal_groups_degenerate_eigenvalues() {
        let h = HermitianMatrix::diagonal(&[3.0, 1.0, 1.0]).unwrap();
        let d = eigh(&h, 1e-8).unwrap();
        assert_eq!(d.eigenvalues(), &[3.0, 1.0]);
        assert_eq!(d.ranks(), &[1, 2]);
    }

    #[test]
    fn identity_has_single_eigenvalue() {
        let d = eigh(&HermitianMatrix::identity(4), 1e-8).unwrap();
        assert_eq!(d.eigenvalues(), &[1.0]);
        assert!(d.projectors()[0].max_abs_diff(&HermitianMatrix::identity(4)) < 1e-15);
    }

    #[test]
    fn complex_two_by_two() {
        // [[2, i], [-i, 2]] has eigenvalues 3 and 1
        let h = HermitianMatrix::new(2, vec![c(2.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(2.0, 0.0)])
            .unwrap();
        let d = eigh(&h, 1e-8).unwrap();
        assert!((d.eigenvalues()[0] - 3.0).abs() < 1e-14);
        assert!((d.eigenvalues()[1] - 1.0).abs() < 1e-14);
        assert!(d.reconstruct().max_abs_diff(&h) < 1e-14);
    }

    #[test]
    fn trace_norm_and_positive_part_examples() {
        let h = HermitianMatrix::diagonal(&[1.0, -2.0]).unwrap();
        assert_eq!(trace_norm(&h).unwrap(), 3.0);
        assert_eq!(positive_part_trace(&h).unwrap(), 1.0);
        assert_eq!(trace_norm(&HermitianMatrix::zeros(3)).unwrap(), 0.0);

        // pure states |0> and |+>: ||rho - sigma||_1 = 2 sqrt(1 - |<0|+>|^2) = sqrt(2)
        let rho = HermitianMatrix::diagonal(&[1.0, 0.0]).unwrap();
        let diff = &rho - &plus_projector();
        assert!((trace_norm(&diff).unwrap() - 2f64.sqrt()).abs() < 1e-14);
        assert!((positive_part_trace(&diff).unwrap() - 0.5 * 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn matrix_power_examples() {
        let d = eigh(&HermitianMatrix::diagonal(&[4.0, 0.0]).unwrap(), 1e-8).unwrap();
        let r = matrix_power_support(&d, 0.5).unwrap();
        assert!(r.max_abs_diff(&HermitianMatrix::diagonal(&[2.0, 0.0]).unwrap()) < 1e-15);

        let d = eigh(&HermitianMatrix::diagonal(&[0.5, 0.5]).unwrap(), 1e-8).unwrap();
        let r = matrix_power_support(&d, 0.0).unwrap();
        assert!(r.max_abs_diff(&HermitianMatrix::identity(2)) < 1e-15);

        let plus = plus_projector();
        let d = eigh(&plus, 1e-8).unwrap();
        let r = matrix_power_support(&d, 3.0).unwrap();
        assert!(r.max_abs_diff(&plus) < 1e-14);
    }

    #[test]
    fn matrix_power_rejects_negative_spectrum() {
        let d = eigh(&HermitianMatrix::diagonal(&[1.0, -0.5]).unwrap(), 1e-8).unwrap();
        assert!(matches!(
            matrix_power_support(&d, 0.5),
            Err(Error::InvalidInput(_))
        ));
    }
}
