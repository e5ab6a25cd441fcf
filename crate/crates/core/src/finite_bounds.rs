//! Closed-form finite-`n` bounds on the optimal error exponents.
//!
//! Every function returns a per-copy log-rate `(1/n) log(error)` bound in
//! nats, wrapped in a [`BoundReport`] carrying the parameters used and
//! whether the preconditions of the underlying inequality hold.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::divergences::PsiCurve;
use crate::error::{Error, Result};
use crate::linalg::{eigh, DensityMatrix, DEFAULT_GROUP_TOL};
use crate::ns_mapping::{build_classical_pair, ClassicalPair};
use crate::numeric::{binary_entropy, bisect, normal_quantile};

/// Constant added to `c_n` in the classical lower bounds as stated.
pub const STATED_TYPE_CONSTANT: f64 = 1.3;
/// `-min_{s >= 1} s (log sqrt(s / 2 pi) - 1/12)`, attained at `s = 3`.
pub const SHARP_TYPE_CONSTANT: f64 = 1.358_897_166_611_853_7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    SteinRate,
    HoeffdingRate,
    MixedRate,
    AlphaRate,
    BetaRate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Upper,
    Lower,
}

/// Which `sqrt(n)` coefficient of the Stein-regime bounds to use.
///
/// `AsDerived` fixes `cosh c = 2`, which gives a coefficient
/// `4 sqrt 2 sqrt(log 1/eps) log eta` valid for every `n`. `AsPrinted`
/// reproduces the displayed coefficient `4 sqrt 2 log(1/eps) log eta`,
/// which corresponds to `cosh c = 2 log(1/eps)` and needs that to be `>= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SteinVariant {
    #[default]
    AsDerived,
    AsPrinted,
}

/// One `(n, quantity)` record.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub n: usize,
    pub quantity: Quantity,
    pub side: Side,
    pub bound_value: f64,
    /// `(1/n) log` of the exact error when an oracle value was attached.
    pub exact: Option<f64>,
    pub parameters: BTreeMap<String, f64>,
    pub variant: Option<SteinVariant>,
    pub valid: bool,
    pub reason: Option<String>,
}

impl BoundReport {
    fn new(n: usize, quantity: Quantity, side: Side, bound_value: f64) -> Self {
        Self {
            n,
            quantity,
            side,
            bound_value,
            exact: None,
            parameters: BTreeMap::new(),
            variant: None,
            valid: true,
            reason: None,
        }
    }

    fn param(mut self, key: &str, value: f64) -> Self {
        self.parameters.insert(key.to_string(), value);
        self
    }

    fn invalid(mut self, reason: impl Into<String>) -> Self {
        if self.valid {
            self.valid = false;
            self.reason = Some(reason.into());
        }
        self
    }

    /// Attach the exact rate `(1/n) log(error)`.
    pub fn with_exact(mut self, exact_rate: f64) -> Self {
        self.exact = Some(exact_rate);
        self
    }

    /// Whether `exact` lies on the correct side of the bound within `tol`.
    pub fn holds(&self, tol: f64) -> Option<bool> {
        self.exact.map(|e| match self.side {
            Side::Upper => e <= self.bound_value + tol,
            Side::Lower => e >= self.bound_value - tol,
        })
    }
}

/// A pair of states with the derived objects every bound needs.
#[derive(Debug, Clone)]
pub struct StatePair {
    rho: DensityMatrix,
    sigma: DensityMatrix,
    curve: PsiCurve,
    classical: Option<ClassicalPair>,
    support_dim: usize,
}

impl StatePair {
    pub fn new(rho: DensityMatrix, sigma: DensityMatrix) -> Result<Self> {
        if rho.dim() != sigma.dim() {
            return Err(Error::DimensionMismatch(rho.dim(), sigma.dim()));
        }
        let curve = PsiCurve::new(rho.spectrum(), sigma.spectrum())?;
        let classical = build_classical_pair(rho.spectrum(), sigma.spectrum()).ok();
        let sum = rho.matrix().combine(1.0, sigma.matrix(), 1.0)?;
        let support_dim = eigh(&sum, DEFAULT_GROUP_TOL)?.support_rank();
        Ok(Self {
            rho,
            sigma,
            curve,
            classical,
            support_dim,
        })
    }

    pub fn rho(&self) -> &DensityMatrix {
        &self.rho
    }

    pub fn sigma(&self) -> &DensityMatrix {
        &self.sigma
    }

    pub fn curve(&self) -> &PsiCurve {
        &self.curve
    }

    /// The Nussbaum–Szkoła pair, absent for orthogonal supports.
    pub fn classical(&self) -> Option<&ClassicalPair> {
        self.classical.as_ref()
    }

    /// Rank of `rho + sigma`, the dimension of `supp rho v supp sigma`.
    pub fn support_dim(&self) -> usize {
        self.support_dim
    }
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

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::InvalidInput("n must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// `-D_t + (log(1/eps)/n) t/(1-t) - (1/n) h_2(t)/(1-t)` for `t in [0, 1)`.
pub fn stein_upper_generic(curve: &PsiCurve, n: usize, eps: f64, t: f64) -> Result<f64> {
    check_n(n)?;
    check_eps(eps)?;
    if !(0.0..1.0 - 1e-9).contains(&t) {
        return Err(Error::OutOfRange {
            what: "t",
            value: t,
            lo: 0.0,
            hi: 1.0 - 1e-9,
        });
    }
    let nf = n as f64;
    let l = -eps.ln();
    Ok(-curve.renyi(t)? + l / nf * t / (1.0 - t) - binary_entropy(t) / (nf * (1.0 - t)))
}

/// Sample sizes from which the `cosh c` form of the Stein bounds is proven:
/// `n >= L / (cosh c (log eta)^2)` and `n >= L / (c^2 cosh c)`.
pub fn stein_min_n(l: f64, log_eta: f64, cosh_c: f64) -> f64 {
    let c = cosh_c.acosh();
    (l / (cosh_c * log_eta * log_eta)).max(l / (c * c * cosh_c))
}

fn stein_setup(
    curve: &PsiCurve,
    n: usize,
    eps: f64,
) -> Result<(f64, f64)> {
    check_n(n)?;
    check_eps(eps)?;
    Ok((curve.relative_entropy(), curve.eta()))
}

/// `-D + (2/sqrt n) sqrt(4 cosh c (log eta)^2 log(1/eps)) - 2 log 2 / n`.
pub fn stein_upper_cosh(curve: &PsiCurve, n: usize, eps: f64, cosh_c: f64) -> Result<BoundReport> {
    let (d, eta) = stein_setup(curve, n, eps)?;
    let nf = n as f64;
    let l = -eps.ln();
    let le = eta.ln();
    let value = -d + 2.0 / nf.sqrt() * (4.0 * cosh_c * le * le * l).sqrt() - 2.0 * 2f64.ln() / nf;
    let mut rep = BoundReport::new(n, Quantity::SteinRate, Side::Upper, value)
        .param("eps", eps)
        .param("cosh_c", cosh_c)
        .param("relative_entropy", d)
        .param("eta", eta);
    if !eta.is_finite() {
        return Ok(rep.invalid("eta is infinite: supp rho is not contained in supp sigma"));
    }
    if !(cosh_c >= 1.0) {
        return Ok(rep.invalid(format!("cosh c = {cosh_c} is below 1")));
    }
    let min_n = stein_min_n(l, le, cosh_c);
    rep = rep.param("min_n", min_n);
    if nf < min_n {
        rep = rep.invalid(format!("n = {n} is below the validity threshold {min_n}"));
    }
    Ok(rep)
}

/// Stein-regime upper bound on `(1/n) log beta_{n,eps}`.
pub fn stein_upper(curve: &PsiCurve, n: usize, eps: f64, variant: SteinVariant) -> Result<BoundReport> {
    let cosh_c = match variant {
        SteinVariant::AsDerived => 2.0,
        SteinVariant::AsPrinted => -2.0 * eps.ln(),
    };
    let mut rep = stein_upper_cosh(curve, n, eps, cosh_c)?;
    rep.variant = Some(variant);
    Ok(rep)
}

/// Lower bound `-D - (2/sqrt n) sqrt(4 cosh c (log eta)^2 L') - L'/n` with
/// `L' = log 1/(1-eps)`, including the `L'/n` term.
pub fn stein_lower_cosh(curve: &PsiCurve, n: usize, eps: f64, cosh_c: f64) -> Result<BoundReport> {
    let (d, eta) = stein_setup(curve, n, eps)?;
    let nf = n as f64;
    let l = -(1.0 - eps).ln();
    let le = eta.ln();
    let value = -d - 2.0 / nf.sqrt() * (4.0 * cosh_c * le * le * l).sqrt() - l / nf;
    let mut rep = BoundReport::new(n, Quantity::SteinRate, Side::Lower, value)
        .param("eps", eps)
        .param("cosh_c", cosh_c)
        .param("relative_entropy", d)
        .param("eta", eta);
    if !eta.is_finite() {
        return Ok(rep.invalid("eta is infinite: supp rho is not contained in supp sigma"));
    }
    if !(cosh_c >= 1.0) {
        return Ok(rep.invalid(format!("cosh c = {cosh_c} is below 1")));
    }
    let min_n = stein_min_n(l, le, cosh_c);
    rep = rep.param("min_n", min_n);
    if nf < min_n {
        rep = rep.invalid(format!("n = {n} is below the validity threshold {min_n}"));
    }
    Ok(rep)
}

/// Stein-regime lower bound on `(1/n) log beta_{n,eps}`:
/// `-D - (1/sqrt n) 4 sqrt 2 sqrt(L') log eta` (`AsDerived`) or with `L'` in
/// place of `sqrt(L')` (`AsPrinted`).
pub fn stein_lower(curve: &PsiCurve, n: usize, eps: f64, variant: SteinVariant) -> Result<BoundReport> {
    let (d, eta) = stein_setup(curve, n, eps)?;
    let nf = n as f64;
    let l = -(1.0 - eps).ln();
    let le = eta.ln();
    let coeff = match variant {
        SteinVariant::AsDerived => l.sqrt(),
        SteinVariant::AsPrinted => l,
    };
    let value = -d - 4.0 * 2f64.sqrt() * coeff * le / nf.sqrt();
    let mut rep = BoundReport::new(n, Quantity::SteinRate, Side::Lower, value)
        .param("eps", eps)
        .param("relative_entropy", d)
        .param("eta", eta);
    rep.variant = Some(variant);
    if !eta.is_finite() {
        rep = rep.invalid("eta is infinite: supp rho is not contained in supp sigma");
    } else if variant == SteinVariant::AsPrinted && 2.0 * l < 1.0 {
        rep = rep.invalid(format!(
            "cosh c = 2 log 1/(1-eps) = {} is below 1",
            2.0 * l
        ));
    }
    Ok(rep)
}

/// `(1/n) log beta_{n, e^{-nr}} <= -H_r - (1/n) h_2(t_r)/(1 - t_r)`.
pub fn hoeffding_upper(curve: &PsiCurve, n: usize, r: f64) -> Result<BoundReport> {
    check_n(n)?;
    let (lo, hi) = curve.hoeffding_window();
    let h = curve.hoeffding(r);
    let t_r = if r >= hi { 0.0 } else if r > lo { curve.solve_t_r(r)? } else { f64::NAN };
    let value = -h - binary_entropy(t_r) / (n as f64 * (1.0 - t_r));
    let rep = BoundReport::new(n, Quantity::HoeffdingRate, Side::Upper, value)
        .param("r", r)
        .param("t_r", t_r)
        .param("hoeffding", h);
    if !(r > lo) {
        return Ok(rep.invalid(format!("r = {r} must exceed -psi(1) = {lo}")));
    }
    Ok(rep)
}

/// Upper bounds of the Neyman–Pearson tests at threshold `a`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixedUpper {
    /// `(1/n) log e_n(a) <= -phi(a)`.
    pub mixed: BoundReport,
    /// `(1/n) log alpha_n(T) <= -phi_hat(a)`.
    pub alpha: BoundReport,
    /// `(1/n) log beta_n(T) <= -phi(a)`.
    pub beta: BoundReport,
}

pub fn mixed_upper(curve: &PsiCurve, n: usize, a: f64) -> Result<MixedUpper> {
    check_n(n)?;
    let phi = curve.phi(a);
    let mk = |q, v| BoundReport::new(n, q, Side::Upper, v).param("a", a).param("phi", phi);
    Ok(MixedUpper {
        mixed: mk(Quantity::MixedRate, -phi),
        alpha: mk(Quantity::AlphaRate, -(phi - a)),
        beta: mk(Quantity::BetaRate, -phi),
    })
}

/// `(|X| - 1)(1 + log p_min^{-2}) + constant`.
pub fn classical_type_constant(alphabet: usize, min_mass: f64, constant: f64) -> f64 {
    (alphabet as f64 - 1.0) * (1.0 - 2.0 * min_mass.ln()) + constant
}

fn classical_lower_value(leading: f64, k: usize, n: usize, c: f64) -> f64 {
    let nf = n as f64;
    -leading - 1.5 * (k as f64 - 1.0) * nf.ln() / nf - c / nf + 1.0 / (nf * (12.0 * nf + 1.0))
}

/// Lower bounds on `(1/n) log alpha~_n(a_r)` and `(1/n) log beta~_n(a_r)` for
/// the classical Neyman–Pearson test, with the constants instantiated from
/// `p_min`, `q_min` and `constant` (see [`STATED_TYPE_CONSTANT`]).
pub fn classical_lower_with(
    pair: &ClassicalPair,
    n: usize,
    r: f64,
    constant: f64,
) -> Result<(BoundReport, BoundReport)> {
    check_n(n)?;
    let curve = pair.psi_curve();
    let k = pair.len();
    let (lo, hi) = curve.hoeffding_window();
    let h = curve.hoeffding(r);
    let c_n = classical_type_constant(k, pair.p_min(), constant);
    let d_n = classical_type_constant(k, pair.q_min(), constant);
    let a_r = h - r;
    let mut alpha = BoundReport::new(n, Quantity::AlphaRate, Side::Lower, classical_lower_value(r, k, n, c_n))
        .param("r", r)
        .param("a_r", a_r)
        .param("c_n", c_n)
        .param("alphabet", k as f64);
    let mut beta = BoundReport::new(n, Quantity::BetaRate, Side::Lower, classical_lower_value(h, k, n, d_n))
        .param("r", r)
        .param("a_r", a_r)
        .param("hoeffding", h)
        .param("d_n", d_n)
        .param("alphabet", k as f64);
    let reason = if !(lo < r && r < hi) {
        Some(format!("r = {r} outside the open interval ({lo}, {hi})"))
    } else if n < k * (k - 1) {
        Some(format!("n = {n} is below |X|(|X|-1) = {}", k * (k - 1)))
    } else {
        None
    };
    if let Some(reason) = reason {
        alpha = alpha.invalid(reason.clone());
        beta = beta.invalid(reason);
    }
    Ok((alpha, beta))
}

pub fn classical_lower(pair: &ClassicalPair, n: usize, r: f64) -> Result<(BoundReport, BoundReport)> {
    classical_lower_with(pair, n, r, STATED_TYPE_CONSTANT)
}

/// `(d^2 - 1)(1 - 2 log min(p_min, q_min)) + constant`.
pub fn quantum_lower_constant(pair: &StatePair, constant: f64) -> Option<f64> {
    let d2 = (pair.support_dim() * pair.support_dim()) as f64;
    pair.classical()
        .map(|c| (d2 - 1.0) * (1.0 - 2.0 * c.p_min().min(c.q_min()).ln()) + constant)
}

/// Lower bound on `(1/n) log e_n(a_r)`:
/// `-H_r - (3(d^2-1)/2) log n / n - c/n + 1/(n(12n+1))`.
pub fn quantum_mixed_lower(pair: &StatePair, n: usize, r: f64) -> Result<BoundReport> {
    check_n(n)?;
    let curve = pair.curve();
    let d = pair.support_dim();
    let d2 = d * d;
    let (lo, hi) = curve.hoeffding_window();
    let h = curve.hoeffding(r);
    let c = quantum_lower_constant(pair, STATED_TYPE_CONSTANT).unwrap_or(f64::INFINITY);
    let value = classical_lower_value(h, d2, n, c);
    let mut rep = BoundReport::new(n, Quantity::MixedRate, Side::Lower, value)
        .param("r", r)
        .param("a_r", h - r)
        .param("hoeffding", h)
        .param("c", c)
        .param("d", d as f64);
    if !(lo < r && r < hi) {
        rep = rep.invalid(format!("r = {r} outside the open interval ({lo}, {hi})"));
    } else if n < d2 * (d2 - 1) {
        rep = rep.invalid(format!("n = {n} is below d^2(d^2-1) = {}", d2 * (d2 - 1)));
    }
    Ok(rep)
}

/// Root of `psi'` in `(0, 1)`, if any.
pub fn chernoff_root(curve: &PsiCurve) -> Option<f64> {
    let (d0, d1) = (curve.psi_prime(0.0), curve.psi_prime(1.0));
    if !(d0 < 0.0 && 0.0 < d1) {
        return None;
    }
    bisect(|t| curve.psi_prime(t), 0.0, 1.0, 1e-12).ok()
}

/// Lower bound on `(1/n) log e_n(0)` with `-C` in place of `-H_r`, available
/// when `psi'` vanishes inside `(0, 1)`.
pub fn quantum_chernoff_lower(pair: &StatePair, n: usize) -> Result<Option<BoundReport>> {
    let Some(t0) = chernoff_root(pair.curve()) else {
        return Ok(None);
    };
    let r0 = -pair.curve().psi(t0);
    let mut rep = quantum_mixed_lower(pair, n, r0)?;
    rep.parameters.insert("t_star".into(), t0);
    rep.parameters.insert("a_r".into(), 0.0);
    Ok(Some(rep))
}

/// Asymptotic reference line `-D + sqrt(V) Phi^{-1}(eps) / sqrt(n)`, with
/// `Phi` the standard normal distribution function. Not a proven bound.
pub fn second_order_reference(curve: &PsiCurve, n: usize, eps: f64) -> Result<f64> {
    check_n(n)?;
    check_eps(eps)?;
    let v = curve.variance()?;
    Ok(-curve.relative_entropy() + v.sqrt() * normal_quantile(eps) / (n as f64).sqrt())
}
