#![allow(dead_code)]

use num_complex::Complex64;
use qbound::linalg::{DensityMatrix, HermitianMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `(I + r . sigma) / 2`.
pub fn bloch(r: [f64; 3]) -> DensityMatrix {
    let m = HermitianMatrix::from_rows(&[
        vec![Complex64::new((1.0 + r[2]) / 2.0, 0.0), Complex64::new(r[0] / 2.0, -r[1] / 2.0)],
        vec![Complex64::new(r[0] / 2.0, r[1] / 2.0), Complex64::new((1.0 - r[2]) / 2.0, 0.0)],
    ])
    .unwrap();
    DensityMatrix::new(m).unwrap()
}

/// Random direction with length uniform in `[lo, hi]`.
pub fn random_bloch(rng: &mut impl Rng, lo: f64, hi: f64) -> DensityMatrix {
    let v: [f64; 3] = loop {
        let v: [f64; 3] = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if norm > 0.1 && norm <= 1.0 {
            let len = rng.gen_range(lo..hi);
            break [v[0] / norm * len, v[1] / norm * len, v[2] / norm * len];
        }
    };
    bloch(v)
}

/// Ten full-rank qubit pairs from a fixed seed.
pub fn qubit_pairs() -> Vec<(DensityMatrix, DensityMatrix)> {
    let mut rng = rng(20_240_101);
    (0..10)
        .map(|_| (random_bloch(&mut rng, 0.2, 0.9), random_bloch(&mut rng, 0.2, 0.9)))
        .collect()
}

/// Random Hermitian matrix with entries uniform in the unit square.
pub fn random_hermitian(rng: &mut impl Rng, dim: usize) -> HermitianMatrix {
    let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
    for i in 0..dim {
        entries[i * dim + i] = Complex64::new(rng.gen_range(-1.0..1.0), 0.0);
        for j in i + 1..dim {
            let z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            entries[i * dim + j] = z;
            entries[j * dim + i] = z.conj();
        }
    }
    HermitianMatrix::new(dim, entries).unwrap()
}

/// Random probability vector with every entry at least `floor`.
pub fn random_distribution(rng: &mut impl Rng, len: usize, floor: f64) -> Vec<f64> {
    let raw: Vec<f64> = (0..len).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let scale = 1.0 - floor * len as f64;
    raw.iter().map(|x| floor + scale * x / total).collect()
}

/// Adaptive Simpson quadrature of `f` on `[a, b]` to relative accuracy `rel`
/// of a 256-panel composite estimate.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rel: f64) -> f64 {
    let h = (b - a) / 256.0;
    let rough: f64 = (0..256)
        .map(|i| {
            let x = a + i as f64 * h;
            h / 6.0 * (f(x) + 4.0 * f(x + h / 2.0) + f(x + h))
        })
        .sum();
    let tol = rel * rough.abs().max(f64::MIN_POSITIVE);
    fn step<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = (a + b) / 2.0;
        let (lm, rm) = ((a + m) / 2.0, (m + b) / 2.0);
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let diff = left + right - whole;
        if depth == 0 || diff.abs() <= 15.0 * tol {
            return left + right + diff / 15.0;
        }
        step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    let (fa, fb) = (f(a), f(b));
    let fm = f((a + b) / 2.0);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(f, a, b, fa, fm, fb, whole, tol, 50)
}

/// `sum_i w_i P_i` over the eigenprojectors of a random Hermitian matrix, with
/// random weights bounded below by `floor`.
pub fn random_density(rng: &mut impl Rng, dim: usize, floor: f64) -> DensityMatrix {
    let spectral = qbound::linalg::eigh(&random_hermitian(rng, dim), 0.0).unwrap();
    let ranks = spectral.ranks().to_vec();
    let w = random_distribution(rng, ranks.len(), floor);
    let mut m = HermitianMatrix::zeros(dim);
    for (i, (_, p, r)) in spectral.iter().enumerate() {
        m = m.combine(1.0, p, w[i] / r as f64).unwrap();
    }
    DensityMatrix::new(m).unwrap()
}
