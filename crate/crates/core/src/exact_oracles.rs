//! Exact finite-`n` error probabilities.
//!
//! Quantum quantities act on `rho^{(x)n}` and `sigma^{(x)n}`. For qubits the
//! tensor powers are handled in their permutation-symmetric block form (see
//! [`SymmetricBlocks`](crate::linalg::SymmetricBlocks)), which has the same
//! spectrum as the dense operator; other dimensions use dense Kronecker
//! powers. Both routes share the `d^n <= 4096` cap.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{eigen_overlaps, DensityMatrix, HermitianMatrix, SymmetricBlocks, DEFAULT_DIM_CAP};
use crate::ns_mapping::{type_table, ClassicalPair};
use crate::numeric::{compensated_sum, NeumaierSum};

/// Eigenvalues of `e^{-na} rho_n - sigma_n` with `|lambda|` at most this are
/// reported as a degenerate kernel.
pub const KERNEL_TOL: f64 = 1e-12;
const LAMBDA_REL_TOL: f64 = 1e-12;
const MAX_ITERATIONS: usize = 200;

/// How tensor powers are represented.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Backend {
    /// Symmetric blocks for qubits, dense otherwise.
    #[default]
    Auto,
    Dense,
}

enum Powers {
    Dense(HermitianMatrix, HermitianMatrix),
    Blocks(SymmetricBlocks, SymmetricBlocks),
}

/// `(multiplicity, Tr rho P, Tr sigma P, eigenvalue)` per eigenprojector `P`
/// of a linear combination `kappa rho_n - lambda sigma_n`.
type Spectrum = Vec<(f64, f64, f64, f64)>;

impl Powers {
    fn new(rho: &DensityMatrix, sigma: &DensityMatrix, n: usize, backend: Backend) -> Result<Self> {
        if rho.dim() != sigma.dim() {
            return Err(Error::DimensionMismatch(rho.dim(), sigma.dim()));
        }
        if n == 0 {
            return Err(Error::InvalidInput("n must be at least 1".into()));
        }
        let d = rho.dim() as u128;
        let full = d.checked_pow(n as u32).unwrap_or(u128::MAX);
        if full > DEFAULT_DIM_CAP as u128 {
            return Err(Error::ResourceLimit {
                what: "tensor power dimension",
                value: full,
                cap: DEFAULT_DIM_CAP as u128,
            });
        }
        if rho.dim() == 2 && backend == Backend::Auto {
            Ok(Self::Blocks(
                SymmetricBlocks::tensor_power(rho.matrix(), n)?,
                SymmetricBlocks::tensor_power(sigma.matrix(), n)?,
            ))
        } else {
            Ok(Self::Dense(
                rho.matrix().tensor_power(n)?,
                sigma.matrix().tensor_power(n)?,
            ))
        }
    }

    fn trace_norm(&self, kappa: f64, lambda: f64) -> Result<f64> {
        match self {
            Self::Dense(r, s) => crate::linalg::trace_norm(&r.combine(kappa, s, -lambda)?),
            Self::Blocks(r, s) => r.combine(kappa, s, -lambda)?.trace_norm(),
        }
    }

    fn spectrum(&self, kappa: f64, lambda: f64) -> Result<Spectrum> {
        let mut out = Vec::new();
        let mut push = |mult: f64, r: &HermitianMatrix, s: &HermitianMatrix| -> Result<()> {
            let diff = r.combine(kappa, s, -lambda)?;
            for (l, tr_r, tr_s) in eigen_overlaps(&diff, r, s)? {
                out.push((mult, tr_r, tr_s, l));
            }
            Ok(())
        };
        match self {
            Self::Dense(r, s) => push(1.0, r, s)?,
            Self::Blocks(r, s) => {
                for (br, bs) in r.blocks().iter().zip(s.blocks()) {
                    push(br.multiplicity, &br.matrix, &bs.matrix)?;
                }
            }
        }
        Ok(out)
    }
}

/// `e_n(a) = (1 + e^{-na})/2 - (1/2)||e^{-na} rho_n - sigma_n||_1`.
pub fn quantum_mixed_error_exact(rho: &DensityMatrix, sigma: &DensityMatrix, n: usize, a: f64) -> Result<f64> {
    quantum_mixed_error_exact_with(rho, sigma, n, a, Backend::Auto)
}

pub fn quantum_mixed_error_exact_with(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    n: usize,
    a: f64,
    backend: Backend,
) -> Result<f64> {
    let powers = Powers::new(rho, sigma, n, backend)?;
    let kappa = (-(n as f64) * a).exp();
    let norm = powers.trace_norm(kappa, 1.0)?;
    Ok(((1.0 + kappa) / 2.0 - norm / 2.0).max(0.0))
}

/// Errors of the projective Neyman–Pearson test `{e^{-na} rho_n - sigma_n > 0}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NpErrors {
    /// `Tr rho_n (I - T)`.
    pub alpha: f64,
    /// `Tr sigma_n T`.
    pub beta: f64,
    /// `e^{-na} alpha + beta`.
    pub mixed: f64,
    /// Some eigenvalue lies within [`KERNEL_TOL`] of zero.
    pub degenerate_kernel: bool,
}

pub fn np_test_errors(rho: &DensityMatrix, sigma: &DensityMatrix, n: usize, a: f64) -> Result<NpErrors> {
    np_test_errors_with(rho, sigma, n, a, Backend::Auto)
}

pub fn np_test_errors_with(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    n: usize,
    a: f64,
    backend: Backend,
) -> Result<NpErrors> {
    let powers = Powers::new(rho, sigma, n, backend)?;
    let kappa = (-(n as f64) * a).exp();
    let spectrum = powers.spectrum(kappa, 1.0)?;
    let (mut alpha, mut beta) = (NeumaierSum::new(), NeumaierSum::new());
    let mut degenerate_kernel = false;
    for &(m, tr_rho, tr_sigma, l) in &spectrum {
        if l.abs() <= KERNEL_TOL {
            degenerate_kernel = true;
        }
        if l > 0.0 && l.abs() > KERNEL_TOL {
            beta.add(m * tr_sigma);
        } else {
            alpha.add(m * tr_rho);
        }
    }
    let (alpha, beta) = (alpha.value().clamp(0.0, 1.0), beta.value().clamp(0.0, 1.0));
    Ok(NpErrors {
        alpha,
        beta,
        mixed: kappa * alpha + beta,
        degenerate_kernel,
    })
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps < 1.0 {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            what: "eps",
            value: eps,
            lo: 0.0,
            hi: 1.0,
        })
    }
}

/// `beta_{n,eps} = sup_{lambda >= 0} (1 - eps) lambda - Tr(lambda rho_n - sigma_n)_+`.
pub fn beta_eps_exact(rho: &DensityMatrix, sigma: &DensityMatrix, n: usize, eps: f64) -> Result<f64> {
    beta_eps_exact_with(rho, sigma, n, eps, Backend::Auto)
}

pub fn beta_eps_exact_with(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    n: usize,
    eps: f64,
    backend: Backend,
) -> Result<f64> {
    check_eps(eps)?;
    let powers = Powers::new(rho, sigma, n, backend)?;
    // with T the positive-part projector, the objective equals
    // lambda (Tr rho_n (I - T) - eps) + Tr sigma_n T
    let objective = |lambda: f64| -> Result<f64> {
        let spectrum = powers.spectrum(lambda, 1.0)?;
        let (mut alpha, mut beta) = (NeumaierSum::new(), NeumaierSum::new());
        for &(m, tr_rho, tr_sigma, l) in &spectrum {
            if l > 0.0 {
                beta.add(m * tr_sigma);
            } else {
                alpha.add(m * tr_rho);
            }
        }
        Ok(lambda * (alpha.value() - eps) + beta.value())
    };
    let mut h = 1.0;
    let mut fh = objective(h)?;
    let mut lo = 0.0;
    let mut iterations = 0;
    loop {
        let f2 = objective(2.0 * h)?;
        if f2 < fh {
            break;
        }
        lo = h;
        h *= 2.0;
        fh = f2;
        iterations += 1;
        if iterations >= MAX_ITERATIONS || !fh.is_finite() {
            return Err(Error::NonConvergence {
                routine: "beta_eps lambda bracket",
                iterations,
            });
        }
    }
    let hi = 2.0 * h;
    let (mut a, mut b) = (lo, hi);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = objective(x1)?;
    let mut f2 = objective(x2)?;
    let mut best = fh.max(f1).max(f2).max(objective(lo)?);
    let mut converged = false;
    for _ in 0..MAX_ITERATIONS {
        if b - a <= LAMBDA_REL_TOL * b.max(1e-6) {
            converged = true;
            break;
        }
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = objective(x1)?;
            best = best.max(f1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = objective(x2)?;
            best = best.max(f2);
        }
    }
    if !converged {
        return Err(Error::NonConvergence {
            routine: "beta_eps golden section",
            iterations: MAX_ITERATIONS,
        });
    }
    Ok(best.clamp(0.0, 1.0))
}

/// Optimal type-II error of the randomized classical Neyman–Pearson test
/// with type-I error at most `eps` for `n` i.i.d. copies.
///
/// Mass of `p` outside the joint support is always accepted and mass of `q`
/// outside it is always rejected, so neither enters the budget. For `eps = 0`
/// the result is `q^{(x)n}` of the joint support.
pub fn classical_beta_eps_exact(pair: &ClassicalPair, n: usize, eps: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::OutOfRange {
            what: "eps",
            value: eps,
            lo: 0.0,
            hi: 1.0,
        });
    }
    let table = type_table(pair, n)?;
    let mut order: Vec<usize> = (0..table.llr.len()).collect();
    order.sort_by(|&i, &j| table.llr[i].total_cmp(&table.llr[j]).then(i.cmp(&j)));
    let mut budget = eps;
    let mut idx = 0;
    let mut kept_fraction = 1.0;
    while idx < order.len() {
        let pm = table.log_p[order[idx]].exp();
        if pm <= budget {
            budget -= pm;
            idx += 1;
        } else {
            kept_fraction = 1.0 - budget / pm;
            break;
        }
    }
    if idx == order.len() {
        return Ok(0.0);
    }
    let beta = kept_fraction * table.log_q[order[idx]].exp()
        + compensated_sum(order[idx + 1..].iter().map(|&i| table.log_q[i].exp()));
    Ok(beta.clamp(0.0, 1.0))
}
