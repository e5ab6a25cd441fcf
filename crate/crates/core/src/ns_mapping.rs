//! Nussbaum–Szkoła reduction of a pair of positive operators to a pair of
//! classical measures, and method-of-types machinery on top of it.

use serde::Serialize;

use crate::divergences::PsiCurve;
use crate::error::{Error, Result};
use crate::linalg::SpectralDecomposition;
use crate::numeric::{compensated_sum, ln_factorial, log_sum_exp};

/// Overlaps `Tr P_i Q_j` at or below this value are pruned from the alphabet.
pub const WEIGHT_CUTOFF: f64 = 1e-12;
/// Largest number of types `classical_exact_errors` will enumerate.
pub const TYPE_ENUMERATION_CAP: u128 = 2_000_000;
/// Slack used when classifying a type into `N_{n,a}`.
pub const TIE_TOL: f64 = 1e-12;

/// Joint-support triples `((i, j), a_i Tr P_i Q_j, b_j Tr P_i Q_j)`.
pub(crate) fn ns_measures(
    a: &SpectralDecomposition,
    b: &SpectralDecomposition,
) -> Result<Vec<((usize, usize), f64, f64)>> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(a.dim(), b.dim()));
    }
    let mut out = Vec::new();
    for (i, (ai, pi, _)) in a.support().enumerate() {
        for (j, (bj, qj, _)) in b.support().enumerate() {
            let w = pi.trace_product(qj);
            if w > WEIGHT_CUTOFF {
                out.push(((i, j), ai * w, bj * w));
            }
        }
    }
    Ok(out)
}

/// The classical pair `(X, p, q)` with `p(i,j) = a_i Tr P_i Q_j` and
/// `q(i,j) = b_j Tr P_i Q_j` restricted to the joint support.
#[derive(Debug, Clone, Serialize)]
pub struct ClassicalPair {
    labels: Vec<(usize, usize)>,
    p: Vec<f64>,
    q: Vec<f64>,
}

impl ClassicalPair {
    /// Build from two measures on a common alphabet. Symbols where either
    /// measure vanishes are dropped; labels are `(x, x)`.
    pub fn from_measures(p: &[f64], q: &[f64]) -> Result<Self> {
        if p.len() != q.len() {
            return Err(Error::DimensionMismatch(p.len(), q.len()));
        }
        if p.iter().chain(q).any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidInput(
                "measures must be finite and nonnegative".into(),
            ));
        }
        let mut pair = Self {
            labels: Vec::new(),
            p: Vec::new(),
            q: Vec::new(),
        };
        for (x, (&px, &qx)) in p.iter().zip(q).enumerate() {
            if px > 0.0 && qx > 0.0 {
                pair.labels.push((x, x));
                pair.p.push(px);
                pair.q.push(qx);
            }
        }
        if pair.p.is_empty() {
            return Err(Error::OrthogonalSupports);
        }
        Ok(pair)
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    pub fn labels(&self) -> &[(usize, usize)] {
        &self.labels
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    pub fn q(&self) -> &[f64] {
        &self.q
    }

    pub fn p_min(&self) -> f64 {
        self.p.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn q_min(&self) -> f64 {
        self.q.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `f(x) = log p(x) - log q(x)`.
    pub fn log_ratios(&self) -> Vec<f64> {
        self.p
            .iter()
            .zip(&self.q)
            .map(|(p, q)| p.ln() - q.ln())
            .collect()
    }

    pub fn psi_curve(&self) -> PsiCurve {
        PsiCurve::from_measures(&self.p, &self.q)
            .expect("classical pairs have positive entries on a common alphabet")
    }
}

pub fn build_classical_pair(
    a: &SpectralDecomposition,
    b: &SpectralDecomposition,
) -> Result<ClassicalPair> {
    let triples = ns_measures(a, b)?;
    if triples.is_empty() {
        return Err(Error::OrthogonalSupports);
    }
    let mut pair = ClassicalPair {
        labels: Vec::with_capacity(triples.len()),
        p: Vec::with_capacity(triples.len()),
        q: Vec::with_capacity(triples.len()),
    };
    for (label, p, q) in triples {
        pair.labels.push(label);
        pair.p.push(p);
        pair.q.push(q);
    }
    Ok(pair)
}

/// Empirical distribution of a length-`n` sequence, stored as counts.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct TypeVector {
    counts: Vec<u32>,
    n: u32,
}

impl TypeVector {
    pub fn new(counts: Vec<u32>) -> Result<Self> {
        let n: u32 = counts.iter().sum();
        if n == 0 {
            return Err(Error::InvalidInput("a type needs n >= 1".into()));
        }
        Ok(Self { counts, n })
    }

    /// The type of a sequence over the alphabet `0..alphabet`.
    pub fn of_sequence(seq: &[usize], alphabet: usize) -> Result<Self> {
        let mut counts = vec![0u32; alphabet];
        for &x in seq {
            if x >= alphabet {
                return Err(Error::InvalidInput(format!(
                    "symbol {x} outside alphabet of size {alphabet}"
                )));
            }
            counts[x] += 1;
        }
        Self::new(counts)
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn support_size(&self) -> usize {
        self.counts.iter().filter(|&&c| c > 0).count()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        let n = self.n as f64;
        self.counts.iter().map(|&c| c as f64 / n).collect()
    }

    /// `log |{y : type(y) = T}| = log n! / prod k_x!`.
    pub fn ln_class_size(&self) -> f64 {
        ln_factorial(self.n as u64)
            - self
                .counts
                .iter()
                .map(|&c| ln_factorial(c as u64))
                .sum::<f64>()
    }

    /// `log mu^{(x)n}(x)` for any sequence `x` of this type.
    pub fn ln_sequence_probability(&self, log_mu: &[f64]) -> f64 {
        compensated_sum(
            self.counts
                .iter()
                .zip(log_mu)
                .filter(|(&c, _)| c > 0)
                .map(|(&c, &l)| c as f64 * l),
        )
    }

    /// `sum_x T(x) v(x)`.
    pub fn mean(&self, v: &[f64]) -> f64 {
        let n = self.n as f64;
        compensated_sum(
            self.counts
                .iter()
                .zip(v)
                .filter(|(&c, _)| c > 0)
                .map(|(&c, &vx)| c as f64 * vx),
        ) / n
    }

    pub fn l1_distance(&self, mu: &[f64]) -> f64 {
        self.probabilities()
            .iter()
            .zip(mu)
            .map(|(a, b)| (a - b).abs())
            .sum()
    }
}

/// Exact and lower-bound values of `(1/n) log T^{(x)n}(type class of T)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TypeClassProbability {
    pub exact: f64,
    pub lower_bound: f64,
}

pub fn type_class_log_probability(t: &TypeVector) -> TypeClassProbability {
    let n = t.n() as f64;
    let r = t.support_size() as f64;
    let log_t: Vec<f64> = t.probabilities().iter().map(|p| p.ln()).collect();
    let exact = (t.ln_class_size() + t.ln_sequence_probability(&log_t)) / n;
    let lower_bound = -(r - 1.0) / 2.0 * n.ln() / n
        + r / n * ((r / (2.0 * std::f64::consts::PI)).sqrt().ln() - 1.0 / 12.0)
        + 1.0 / (n * (12.0 * n + 1.0));
    TypeClassProbability { exact, lower_bound }
}

/// Number of types of length `n` over `k` symbols, `C(n + k - 1, k - 1)`.
pub fn type_count(n: usize, k: usize) -> u128 {
    if k == 0 {
        return 0;
    }
    let (top, choose) = ((n + k - 1) as u128, (k - 1) as u128);
    let mut acc: u128 = 1;
    for i in 0..choose {
        acc = acc * (top - i) / (i + 1);
        if acc > u64::MAX as u128 {
            return u128::MAX;
        }
    }
    acc
}

/// Visit every composition of `n` into `k` nonnegative parts in
/// lexicographic order.
pub fn for_each_type<F: FnMut(&[u32])>(n: u32, k: usize, mut f: F) {
    if k == 0 {
        return;
    }
    let mut counts = vec![0u32; k];
    fn rec<F: FnMut(&[u32])>(counts: &mut [u32], pos: usize, left: u32, f: &mut F) {
        if pos + 1 == counts.len() {
            counts[pos] = left;
            f(counts);
            return;
        }
        for c in 0..=left {
            counts[pos] = c;
            rec(counts, pos + 1, left - c, f);
        }
    }
    rec(&mut counts, 0, n, &mut f);
}

fn check_enumerable(n: usize, k: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be at least 1".into()));
    }
    let count = type_count(n, k);
    if count > TYPE_ENUMERATION_CAP {
        return Err(Error::ResourceLimit {
            what: "type count",
            value: count,
            cap: TYPE_ENUMERATION_CAP,
        });
    }
    Ok(())
}

/// Per-type log masses and normalized log-likelihood ratios.
pub(crate) struct TypeTable {
    pub(crate) log_p: Vec<f64>,
    pub(crate) log_q: Vec<f64>,
    pub(crate) llr: Vec<f64>,
}

pub(crate) fn type_table(pair: &ClassicalPair, n: usize) -> Result<TypeTable> {
    let k = pair.len();
    check_enumerable(n, k)?;
    let lp: Vec<f64> = pair.p.iter().map(|x| x.ln()).collect();
    let lq: Vec<f64> = pair.q.iter().map(|x| x.ln()).collect();
    let f = pair.log_ratios();
    let ln_n_fact = ln_factorial(n as u64);
    let cap = type_count(n, k) as usize;
    let mut table = TypeTable {
        log_p: Vec::with_capacity(cap),
        log_q: Vec::with_capacity(cap),
        llr: Vec::with_capacity(cap),
    };
    for_each_type(n as u32, k, |c| {
        let mut size = ln_n_fact;
        let (mut sp, mut sq, mut sf) = (0.0, 0.0, 0.0);
        for x in 0..k {
            if c[x] > 0 {
                let cx = c[x] as f64;
                size -= ln_factorial(c[x] as u64);
                sp += cx * lp[x];
                sq += cx * lq[x];
                sf += cx * f[x];
            }
        }
        table.log_p.push(size + sp);
        table.log_q.push(size + sq);
        table.llr.push(sf / n as f64);
    });
    Ok(table)
}

/// Exact errors of the classical Neyman–Pearson test
/// `N_{n,a} = {x : (1/n) log p^n(x)/q^n(x) >= a}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassicalErrors {
    /// `p^{(x)n}` of the complement of `N_{n,a}`.
    pub alpha: f64,
    /// `q^{(x)n}(N_{n,a})`.
    pub beta: f64,
    /// `e^{-na} alpha + beta`.
    pub mixed: f64,
    pub ln_alpha: f64,
    pub ln_beta: f64,
    pub ln_mixed: f64,
}

pub fn classical_exact_errors(pair: &ClassicalPair, n: usize, a: f64) -> Result<ClassicalErrors> {
    let table = type_table(pair, n)?;
    let thr = a - TIE_TOL * (1.0 + a.abs());
    let mut out_p = Vec::new();
    let mut in_q = Vec::new();
    for i in 0..table.llr.len() {
        if table.llr[i] >= thr {
            in_q.push(table.log_q[i]);
        } else {
            out_p.push(table.log_p[i]);
        }
    }
    let ln_alpha = log_sum_exp(&out_p);
    let ln_beta = log_sum_exp(&in_q);
    let ln_mixed = log_sum_exp(&[ln_alpha - n as f64 * a, ln_beta]);
    Ok(ClassicalErrors {
        alpha: ln_alpha.exp(),
        beta: ln_beta.exp(),
        mixed: ln_mixed.exp(),
        ln_alpha,
        ln_beta,
        ln_mixed,
    })
}

/// Types `(mu1, mu2)` with `<mu1, v> < c < <mu2, v>`, both supported in
/// `supp mu` and within `l1` distance `2(r-1)/n` of `mu`.
pub fn halfspace_type_approximation(
    mu: &[f64],
    v: &[f64],
    c: f64,
    n: usize,
) -> Result<(TypeVector, TypeVector)> {
    if mu.len() != v.len() {
        return Err(Error::DimensionMismatch(mu.len(), v.len()));
    }
    if mu.iter().any(|&m| !(m >= 0.0)) || (mu.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidInput("mu must be a probability vector".into()));
    }
    let mean = compensated_sum(mu.iter().zip(v).map(|(m, x)| m * x));
    if (mean - c).abs() > 1e-9 {
        return Err(Error::InvalidInput(format!(
            "<mu, v> = {mean} differs from c = {c}"
        )));
    }
    let supp: Vec<usize> = (0..mu.len()).filter(|&x| mu[x] > 0.0).collect();
    let r = supp.len();
    if n < r * (r - 1) || n == 0 {
        return Err(Error::InvalidInput(format!(
            "n = {n} is below r(r-1) = {} for support size r = {r}",
            r * (r - 1)
        )));
    }
    let vmin = supp.iter().map(|&x| v[x]).fold(f64::INFINITY, f64::min);
    let vmax = supp.iter().map(|&x| v[x]).fold(f64::NEG_INFINITY, f64::max);
    if !(vmin < c && c < vmax) {
        return Err(Error::InvalidInput(
            "both open half-spaces must meet the simplex on supp mu".into(),
        ));
    }
    let bound = 2.0 * (r as f64 - 1.0) / n as f64;
    let below = rounded_type(mu, v, &supp, n, true);
    let above = rounded_type(mu, v, &supp, n, false);
    let mut out = Vec::with_capacity(2);
    for (counts, want_below) in [(below, true), (above, false)] {
        let t = TypeVector::new(counts)?;
        let m = t.mean(v);
        let side_ok = if want_below { m < c } else { m > c };
        let dist = t.l1_distance(mu);
        if !side_ok || dist > bound + 1e-12 {
            return Err(Error::NonConvergence {
                routine: "halfspace type approximation",
                iterations: n,
            });
        }
        out.push(t);
    }
    let above = out.pop().expect("two types");
    let below = out.pop().expect("two types");
    Ok((below, above))
}

fn rounded_type(mu: &[f64], v: &[f64], supp: &[usize], n: usize, below: bool) -> Vec<u32> {
    let nf = n as f64;
    let mut counts = vec![0u32; mu.len()];
    for &x in supp {
        counts[x] = (mu[x] * nf).floor() as u32;
    }
    let assigned: u32 = counts.iter().sum();
    let mut order: Vec<usize> = supp.to_vec();
    order.sort_by(|&x, &y| {
        let key = v[x].total_cmp(&v[y]);
        if below {
            key
        } else {
            key.reverse()
        }
    });
    let mut deficit = (n as u32).saturating_sub(assigned);
    let fractional: Vec<usize> = order
        .iter()
        .copied()
        .filter(|&x| mu[x] * nf > counts[x] as f64)
        .collect();
    for x in fractional {
        if deficit == 0 {
            break;
        }
        counts[x] += 1;
        deficit -= 1;
    }
    for &x in order.iter() {
        if deficit == 0 {
            break;
        }
        counts[x] += 1;
        deficit -= 1;
    }
    let c = compensated_sum(mu.iter().zip(v).map(|(m, x)| m * x));
    let strictly = |counts: &[u32]| {
        let m = compensated_sum(counts.iter().zip(v).map(|(&k, x)| k as f64 * x)) / nf;
        if below {
            m < c
        } else {
            m > c
        }
    };
    let target = order[0];
    for _ in 0..n {
        if strictly(&counts) {
            break;
        }
        let Some(&from) = order.iter().rev().find(|&&x| x != target && counts[x] > 0) else {
            break;
        };
        counts[from] -= 1;
        counts[target] += 1;
    }
    counts
}
