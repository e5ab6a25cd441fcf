//! Two binary distributions `(p, 1-p)` and `(q, 1-q)` with equal priors:
//! exact mixed error, crossover point, regularized incomplete beta function
//! and the incomplete-beta envelope of the mixed error.
//!
//! Here `e_n(a)` carries the prior factor `1/2`, so it equals half of the
//! classical mixed error `e^{-na} alpha~ + beta~` of the same pair.

use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use crate::divergences::PsiCurve;
use crate::error::{Error, Result};
use crate::numeric::{ln_binomial, log_sum_exp};

const CF_MAX_TERMS: usize = 300;
const CF_EPS: f64 = 1e-15;
const CF_TINY: f64 = 1e-300;

/// Binary pair in canonical order `p <= q`. Inputs with `p > q` are relabeled
/// `p -> 1-p`, `q -> 1-q` (swapping the two outcomes), which leaves every
/// error probability unchanged.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BinaryPair {
    p: f64,
    q: f64,
    relabeled: bool,
}

impl BinaryPair {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        for (name, v) in [("p", p), ("q", q)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::OutOfRange {
                    what: name,
                    value: v,
                    lo: 0.0,
                    hi: 1.0,
                });
            }
        }
        Ok(if p <= q {
            Self { p, q, relabeled: false }
        } else {
            Self {
                p: 1.0 - p,
                q: 1.0 - q,
                relabeled: true,
            }
        })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn relabeled(&self) -> bool {
        self.relabeled
    }

    pub fn psi_curve(&self) -> PsiCurve {
        PsiCurve::from_measures(&[self.p, 1.0 - self.p], &[self.q, 1.0 - self.q])
            .expect("binary pairs have positive entries")
    }

    /// `-min_{t in [0,1]} psi(t)`.
    pub fn chernoff(&self) -> f64 {
        self.psi_curve().chernoff().0
    }
}

/// `log e_n(a)`.
pub fn ln_en_exact(bp: &BinaryPair, n: usize, a: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be at least 1".into()));
    }
    let (p, q) = (bp.p, bp.q);
    let nf = n as f64;
    let (lp, lp1, lq, lq1) = (p.ln(), (-p).ln_1p(), q.ln(), (-q).ln_1p());
    let terms: Vec<f64> = (0..=n)
        .map(|k| {
            let (k, m) = (k as f64, (n - k) as f64);
            let tp = -nf * a + k * lp + m * lp1;
            let tq = k * lq + m * lq1;
            ln_binomial(n as u64, k as u64) + tp.min(tq)
        })
        .collect();
    Ok(log_sum_exp(&terms) - 2f64.ln())
}

/// `e_n(a) = (1/2) sum_k C(n,k) min(e^{-na} p^k (1-p)^{n-k}, q^k (1-q)^{n-k})`.
pub fn en_exact(bp: &BinaryPair, n: usize, a: f64) -> Result<f64> {
    Ok(ln_en_exact(bp, n, a)?.exp())
}

/// `s(a) = (log((1-p)/(1-q)) - a) / log(q(1-p) / (p(1-q)))`, the crossover
/// `k = sn` where the two terms of the mixed error are equal.
pub fn crossover_s(bp: &BinaryPair, a: f64) -> Result<f64> {
    let (p, q) = (bp.p, bp.q);
    if p == q {
        return Err(Error::Degenerate("p = q has no crossover point".into()));
    }
    let num = ((1.0 - p) / (1.0 - q)).ln() - a;
    let den = (q * (1.0 - p) / (p * (1.0 - q))).ln();
    Ok(num / den)
}

/// Regularized incomplete beta function `I_z(k, l)` for `z in [0,1]`,
/// `k, l >= 0`. The limits `I_z(0, l) = 1` and `I_z(k, 0) = 0` (for
/// `0 < z < 1`) are returned for vanishing shape parameters.
pub fn inc_beta_reg(z: f64, k: f64, l: f64) -> Result<f64> {
    Ok(ln_inc_beta_reg(z, k, l)?.exp())
}

/// `log I_z(k, l)`, accurate also where `I_z(k, l)` underflows.
pub fn ln_inc_beta_reg(z: f64, k: f64, l: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&z) || !(k >= 0.0) || !(l >= 0.0) || (k == 0.0 && l == 0.0) {
        return Err(Error::InvalidInput(format!(
            "incomplete beta needs 0 <= z <= 1 and k, l >= 0 not both zero, got z={z}, k={k}, l={l}"
        )));
    }
    if z == 0.0 || (l == 0.0 && z < 1.0) {
        return Ok(f64::NEG_INFINITY);
    }
    if z == 1.0 || k == 0.0 {
        return Ok(0.0);
    }
    if z > (k + 1.0) / (k + l + 2.0) {
        return Ok((-ln_inc_beta_cf(1.0 - z, l, k)?.exp()).ln_1p());
    }
    Ok(ln_inc_beta_cf(z, k, l)?.min(0.0))
}

fn ln_beta(k: f64, l: f64) -> f64 {
    ln_gamma(k) + ln_gamma(l) - ln_gamma(k + l)
}

/// Continued-fraction evaluation (modified Lentz) of `log I_z(k, l)`,
/// accurate for `z <= (k+1)/(k+l+2)`.
fn ln_inc_beta_cf(z: f64, k: f64, l: f64) -> Result<f64> {
    let ln_front = k * z.ln() + l * (-z).ln_1p() - ln_beta(k, l) - k.ln();
    let (qab, qap, qam) = (k + l, k + 1.0, k - 1.0);
    let clamp_tiny = |x: f64| if x.abs() < CF_TINY { CF_TINY } else { x };
    let mut c = 1.0;
    let mut d = 1.0 / clamp_tiny(1.0 - qab * z / qap);
    let mut h = d;
    for m in 1..=CF_MAX_TERMS {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (l - m) * z / ((qam + m2) * (k + m2));
        d = 1.0 / clamp_tiny(1.0 + aa * d);
        c = clamp_tiny(1.0 + aa / c);
        h *= d * c;
        let aa = -(k + m) * (qab + m) * z / ((k + m2) * (qap + m2));
        d = 1.0 / clamp_tiny(1.0 + aa * d);
        c = clamp_tiny(1.0 + aa / c);
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < CF_EPS {
            return Ok(ln_front + h.ln());
        }
    }
    Err(Error::NonConvergence {
        routine: "incomplete beta continued fraction",
        iterations: CF_MAX_TERMS,
    })
}

/// `sum_{k=0}^{k0} C(n,k) p^k (1-p)^{n-k}`, summed in log domain.
pub fn binomial_cdf(n: u64, k0: u64, p: f64) -> f64 {
    let terms: Vec<f64> = (0..=k0.min(n))
        .map(|k| {
            let lp = if k == 0 { 0.0 } else { k as f64 * p.ln() };
            let lq = if k == n { 0.0 } else { (n - k) as f64 * (-p).ln_1p() };
            ln_binomial(n, k) + lp + lq
        })
        .collect();
    log_sum_exp(&terms).exp().min(1.0)
}

/// The incomplete-beta envelope `(lower, upper)` of `e_n(a)`.
pub fn en_bounds(bp: &BinaryPair, n: usize, a: f64) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be at least 1".into()));
    }
    let s = crossover_s(bp, a)?;
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::OutOfRange {
            what: "s(a)",
            value: s,
            lo: 0.0,
            hi: 1.0,
        });
    }
    let (p, q) = (bp.p, bp.q);
    let nf = n as f64;
    let (ns, nt) = (nf * s, nf * (1.0 - s));
    let lw = -nf * a;
    let half_sum = |x: f64, y: f64| log_sum_exp(&[x, y]).exp() / 2.0;
    let lower = half_sum(ln_inc_beta_reg(1.0 - q, nt + 1.0, ns)?, lw + ln_inc_beta_reg(p, ns + 1.0, nt)?);
    let upper = half_sum(ln_inc_beta_reg(1.0 - q, nt, ns + 1.0)?, lw + ln_inc_beta_reg(p, ns, nt + 1.0)?);
    Ok((lower, upper))
}

/// Whether `x -> I_z(n - x, x)` is nondecreasing (within `1e-12`) on `grid`
/// equally spaced interior points of `(0, n)`.
pub fn incbeta_monotonicity_check(z: f64, n: f64, grid: usize) -> Result<bool> {
    let mut prev = f64::NEG_INFINITY;
    for i in 1..=grid {
        let x = n * i as f64 / (grid + 1) as f64;
        let v = inc_beta_reg(z, n - x, x)?;
        if v < prev - 1e-12 {
            return Ok(false);
        }
        prev = v;
    }
    Ok(true)
}

/// One row of the error-rate table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateRow {
    pub n: usize,
    /// `-log(e_n(a)) / n`.
    pub rate_exact: f64,
    /// `-log(upper) / n`; `NaN` when the envelope is undefined.
    pub rate_lower: f64,
    /// `-log(lower) / n`; `NaN` when the envelope is undefined.
    pub rate_upper: f64,
    pub chernoff: f64,
}

pub const RATE_CURVE_HEADER: &str = "n,rate_exact,rate_lower,rate_upper,chernoff";

/// Rows `n = 1..=n_max` of the exact error rate, its envelope and the
/// Chernoff constant.
pub fn rate_curve(bp: &BinaryPair, a: f64, n_max: usize) -> Result<Vec<RateRow>> {
    if n_max < 2 {
        return Err(Error::InvalidInput("n_max must be at least 2".into()));
    }
    let chernoff = bp.chernoff();
    (1..=n_max)
        .map(|n| {
            let nf = n as f64;
            let rate_exact = -ln_en_exact(bp, n, a)? / nf;
            let (rate_lower, rate_upper) = match en_bounds(bp, n, a) {
                Ok((lo, up)) => (-up.ln() / nf, -lo.ln() / nf),
                Err(Error::Degenerate(_)) | Err(Error::OutOfRange { .. }) => (f64::NAN, f64::NAN),
                Err(e) => return Err(e),
            };
            Ok(RateRow {
                n,
                rate_exact,
                rate_lower,
                rate_upper,
                chernoff,
            })
        })
        .collect()
}
