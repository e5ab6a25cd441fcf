//! `psi(t) = log Tr A^t B^{1-t}` and the divergences derived from it.
//!
//! Every quantity is evaluated on the Nussbaum–Szkoła measures of the pair,
//! for which `psi_{A,B} = psi_{p,q}` holds exactly. Logarithms are natural.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{trace_norm, DensityMatrix, SpectralDecomposition};
use crate::ns_mapping::ns_measures;
use crate::numeric::{bisect, binary_entropy, compensated_sum, grid_golden_max, log_sum_exp};

const GRID: usize = 201;
const T_TOL: f64 = 1e-10;
const SUPPORT_TOL: f64 = 1e-10;

/// Evaluator for `psi`, `psi'` and `psi''` of a fixed pair.
#[derive(Debug, Clone, Serialize)]
pub struct PsiCurve {
    log_p: Vec<f64>,
    log_q: Vec<f64>,
    log_ratios: Vec<f64>,
    trace_a: f64,
    trace_b: f64,
}

/// Summary of the divergences of a pair. Infinite entries serialize as
/// `null`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DivergenceProfile {
    pub relative_entropy: f64,
    pub chernoff: f64,
    pub chernoff_argmin_t: f64,
    pub eta: f64,
    pub variance: f64,
}

impl PsiCurve {
    /// Joint-support construction from the spectral decompositions of two
    /// positive semidefinite operators.
    pub fn new(a: &SpectralDecomposition, b: &SpectralDecomposition) -> Result<Self> {
        for (name, d) in [("A", a), ("B", b)] {
            if d.min_eigenvalue() < -1e-12 * d.max_abs_eigenvalue().max(1.0) {
                return Err(Error::InvalidInput(format!(
                    "{name} is not positive semidefinite"
                )));
            }
        }
        let triples = ns_measures(a, b)?;
        let mut curve = Self {
            log_p: Vec::with_capacity(triples.len()),
            log_q: Vec::with_capacity(triples.len()),
            log_ratios: Vec::with_capacity(triples.len()),
            trace_a: compensated_sum(a.support().map(|(l, _, r)| l * r as f64)),
            trace_b: compensated_sum(b.support().map(|(l, _, r)| l * r as f64)),
        };
        for (_, p, q) in triples {
            curve.push(p, q);
        }
        Ok(curve)
    }

    /// Curve of two finite measures on a common alphabet. Symbols where one
    /// measure vanishes contribute to that measure's total mass only.
    pub fn from_measures(p: &[f64], q: &[f64]) -> Result<Self> {
        if p.len() != q.len() {
            return Err(Error::DimensionMismatch(p.len(), q.len()));
        }
        if p.iter().chain(q).any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidInput(
                "measures must be finite and nonnegative".into(),
            ));
        }
        let mut curve = Self {
            log_p: Vec::new(),
            log_q: Vec::new(),
            log_ratios: Vec::new(),
            trace_a: compensated_sum(p.iter().copied()),
            trace_b: compensated_sum(q.iter().copied()),
        };
        for (&px, &qx) in p.iter().zip(q) {
            if px > 0.0 && qx > 0.0 {
                curve.push(px, qx);
            }
        }
        Ok(curve)
    }

    fn push(&mut self, p: f64, q: f64) {
        let (lp, lq) = (p.ln(), q.ln());
        self.log_p.push(lp);
        self.log_q.push(lq);
        self.log_ratios.push(lp - lq);
    }

    pub fn len(&self) -> usize {
        self.log_p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_p.is_empty()
    }

    /// True when the joint support is empty (`supp A` orthogonal to `supp B`).
    pub fn is_orthogonal(&self) -> bool {
        self.log_p.is_empty()
    }

    pub fn log_p(&self) -> &[f64] {
        &self.log_p
    }

    pub fn log_q(&self) -> &[f64] {
        &self.log_q
    }

    pub fn log_ratios(&self) -> &[f64] {
        &self.log_ratios
    }

    pub fn trace_a(&self) -> f64 {
        self.trace_a
    }

    pub fn trace_b(&self) -> f64 {
        self.trace_b
    }

    /// `Tr A B^0`.
    pub fn mass_p(&self) -> f64 {
        log_sum_exp(&self.log_p).exp()
    }

    /// `Tr A^0 B`.
    pub fn mass_q(&self) -> f64 {
        log_sum_exp(&self.log_q).exp()
    }

    /// `supp A <= supp B`, detected as `Tr A B^0 = Tr A`.
    pub fn support_contained(&self) -> bool {
        !self.is_orthogonal()
            && (self.mass_p() - self.trace_a).abs() <= SUPPORT_TOL * self.trace_a.max(1.0)
    }

    /// `supp B <= supp A`.
    pub fn reverse_support_contained(&self) -> bool {
        !self.is_orthogonal()
            && (self.mass_q() - self.trace_b).abs() <= SUPPORT_TOL * self.trace_b.max(1.0)
    }

    fn exponents(&self, t: f64) -> Vec<f64> {
        self.log_p
            .iter()
            .zip(&self.log_q)
            .map(|(lp, lq)| t * lp + (1.0 - t) * lq)
            .collect()
    }

    pub fn psi(&self, t: f64) -> f64 {
        log_sum_exp(&self.exponents(t))
    }

    /// `(psi, psi', psi'')` at `t`: the log-partition function and the mean and
    /// variance of the log-ratio under the tilted measure `mu^t`.
    pub fn moments(&self, t: f64) -> (f64, f64, f64) {
        if self.is_orthogonal() {
            return (f64::NEG_INFINITY, 0.0, 0.0);
        }
        let ex = self.exponents(t);
        let psi = log_sum_exp(&ex);
        let w: Vec<f64> = ex.iter().map(|e| (e - psi).exp()).collect();
        let norm = compensated_sum(w.iter().copied());
        let mean =
            compensated_sum(w.iter().zip(&self.log_ratios).map(|(w, f)| w * f)) / norm;
        let var = compensated_sum(
            w.iter()
                .zip(&self.log_ratios)
                .map(|(w, f)| w * (f - mean) * (f - mean)),
        ) / norm;
        (psi, mean, var)
    }

    pub fn psi_prime(&self, t: f64) -> f64 {
        self.moments(t).1
    }

    pub fn psi_second(&self, t: f64) -> f64 {
        self.moments(t).2
    }

    /// `D_t = psi(t) / (t - 1)` for `t >= 0`, `t != 1`.
    pub fn renyi(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) || t == 1.0 {
            return Err(Error::InvalidInput(format!(
                "Renyi order must be nonnegative and different from 1, got {t}"
            )));
        }
        if self.is_orthogonal() || (t > 1.0 && !self.support_contained()) {
            return Ok(f64::INFINITY);
        }
        Ok(self.psi(t) / (t - 1.0))
    }

    /// `D(A||B) = Tr A (log A - log B)`, `+inf` unless `supp A <= supp B`.
    pub fn relative_entropy(&self) -> f64 {
        if !self.support_contained() {
            return f64::INFINITY;
        }
        compensated_sum(
            self.log_p
                .iter()
                .zip(&self.log_ratios)
                .map(|(lp, f)| lp.exp() * f),
        )
    }

    /// `(C, t*)` with `C = -min_{t in [0,1]} psi(t)` and `t*` the leftmost
    /// minimizer.
    pub fn chernoff(&self) -> (f64, f64) {
        if self.is_orthogonal() {
            return (f64::INFINITY, 0.0);
        }
        let (t, v) = grid_golden_max(|t| -self.psi(t), 0.0, 1.0, GRID, T_TOL);
        (v, t)
    }

    /// `H_r = sup_{0 <= t < 1} (-t r - psi(t)) / (1 - t)`.
    ///
    /// Returns `-psi(0)` when `r >= -psi(0) - psi'(0)` and `+inf` when
    /// `r < -psi(1)`.
    pub fn hoeffding(&self, r: f64) -> f64 {
        if self.is_orthogonal() {
            return f64::INFINITY;
        }
        let (psi0, d0, _) = self.moments(0.0);
        if r >= -psi0 - d0 {
            return -psi0;
        }
        if r < -self.psi(1.0) {
            return f64::INFINITY;
        }
        // concave in s = t / (1 - t)
        let obj = |s: f64| {
            let t = s / (1.0 + s);
            -s * r - (1.0 + s) * self.psi(t)
        };
        let mut h = 1.0;
        while obj(2.0 * h) >= obj(h) && h < 1e12 {
            h *= 2.0;
        }
        let lo = if h == 1.0 { 0.0 } else { h / 2.0 };
        let (_, v) = crate::numeric::golden_section_max(obj, lo, 2.0 * h, T_TOL * (1.0 + h));
        v.max(-psi0)
    }

    /// `phi(a) = max_{t in [0,1]} (a t - psi(t))`.
    pub fn phi(&self, a: f64) -> f64 {
        if self.is_orthogonal() {
            return f64::INFINITY;
        }
        grid_golden_max(|t| a * t - self.psi(t), 0.0, 1.0, GRID, T_TOL).1
    }

    /// `phi_hat(a) = phi(a) - a`.
    pub fn phi_hat(&self, a: f64) -> f64 {
        self.phi(a) - a
    }

    /// The open interval `(-psi(1), -psi(0) - psi'(0))` of rates `r` for which
    /// `t_r` lies in `(0, 1)`.
    pub fn hoeffding_window(&self) -> (f64, f64) {
        let (psi0, d0, _) = self.moments(0.0);
        (-self.psi(1.0), -psi0 - d0)
    }

    fn is_affine(&self) -> bool {
        let f0 = self.log_ratios.first().copied().unwrap_or(0.0);
        let scale = self.log_ratios.iter().fold(1.0f64, |m, f| m.max(f.abs()));
        self.log_ratios
            .iter()
            .all(|f| (f - f0).abs() <= 1e-12 * scale)
    }

    /// Unique `t_r in (0,1)` with `r = (t - 1) psi'(t) - psi(t)`.
    pub fn solve_t_r(&self, r: f64) -> Result<f64> {
        if self.is_orthogonal() {
            return Err(Error::OrthogonalSupports);
        }
        if self.is_affine() {
            return Err(Error::Degenerate(
                "psi is affine (q proportional to p on the joint support)".into(),
            ));
        }
        let (lo, hi) = self.hoeffding_window();
        if !(lo < r && r < hi) {
            return Err(Error::OutOfRange {
                what: "r",
                value: r,
                lo,
                hi,
            });
        }
        let g = |t: f64| {
            let (psi, d, _) = self.moments(t);
            (t - 1.0) * d - psi - r
        };
        bisect(g, 0.0, 1.0, 1e-12)
    }

    /// `a_r = psi'(t_r) = H_r - r`.
    pub fn a_r(&self, r: f64) -> Result<f64> {
        Ok(self.psi_prime(self.solve_t_r(r)?))
    }

    /// `eta = 1 + exp(D_{3/2} / 2) + exp(-D_{1/2} / 2)`, `+inf` unless
    /// `supp A <= supp B`.
    pub fn eta(&self) -> f64 {
        if !self.support_contained() {
            return f64::INFINITY;
        }
        1.0 + self.psi(1.5).exp() + self.psi(0.5).exp()
    }

    /// `V(A||B) = psi''(1)`.
    pub fn variance(&self) -> Result<f64> {
        if !self.support_contained() {
            return Err(Error::SupportViolation(
                "relative-entropy variance needs supp A <= supp B".into(),
            ));
        }
        Ok(self.psi_second(1.0))
    }

    pub fn profile(&self) -> DivergenceProfile {
        let (chernoff, chernoff_argmin_t) = self.chernoff();
        DivergenceProfile {
            relative_entropy: self.relative_entropy(),
            chernoff,
            chernoff_argmin_t,
            eta: self.eta(),
            variance: self.variance().unwrap_or(f64::NAN),
        }
    }
}

pub fn build_psi(a: &SpectralDecomposition, b: &SpectralDecomposition) -> Result<PsiCurve> {
    PsiCurve::new(a, b)
}

pub fn relative_entropy(a: &SpectralDecomposition, b: &SpectralDecomposition) -> Result<f64> {
    Ok(PsiCurve::new(a, b)?.relative_entropy())
}

pub fn eta(a: &SpectralDecomposition, b: &SpectralDecomposition) -> Result<f64> {
    Ok(PsiCurve::new(a, b)?.eta())
}

/// `(1/2)||A - B||_1 log(d - 1) + h_2(||A - B||_1 / 2)`, an upper bound on
/// `|S(A) - S(B)|`.
pub fn entropy_difference_bound(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(a.dim(), b.dim()));
    }
    let d = a.dim();
    if d == 1 {
        return Ok(0.0);
    }
    let t = (0.5 * trace_norm(&(a.matrix() - b.matrix()))?).clamp(0.0, 1.0);
    Ok(t * ((d - 1) as f64).ln() + binary_entropy(t))
}
