mod common;

use qbound::ns_mapping::{
    build_classical_pair, classical_exact_errors, for_each_type, halfspace_type_approximation, type_class_log_probability,
    type_count, ClassicalPair, TypeVector,
};
use rand::Rng;

use common::{qubit_pairs, random_distribution, rng};

#[test]
fn exact_errors_match_product_space_enumeration() {
    let mut rng = rng(11);
    for _ in 0..20 {
        let p = random_distribution(&mut rng, 2, 0.02);
        let q = random_distribution(&mut rng, 2, 0.02);
        let n = rng.gen_range(1..=12usize);
        let a = rng.gen_range(-0.7..0.7);
        let pair = ClassicalPair::from_measures(&p, &q).unwrap();
        let errs = classical_exact_errors(&pair, n, a).unwrap();
        let (mut alpha, mut beta) = (0.0, 0.0);
        for word in 0..(1usize << n) {
            let (mut pw, mut qw) = (1.0, 1.0);
            for i in 0..n {
                let x = (word >> i) & 1;
                pw *= p[x];
                qw *= q[x];
            }
            if (pw / qw).ln() / n as f64 >= a {
                beta += qw;
            } else {
                alpha += pw;
            }
        }
        assert!((errs.alpha - alpha).abs() < 1e-12 && (errs.beta - beta).abs() < 1e-12, "n={n} a={a}");
    }
}

#[test]
fn type_class_lower_bound_below_exact() {
    let mut rng = rng(12);
    for _ in 0..200 {
        let k = rng.gen_range(2..=4usize);
        let n = rng.gen_range(k as u32..=60);
        let mut counts = vec![1u32; k];
        for _ in 0..(n - k as u32) {
            counts[rng.gen_range(0..k)] += 1;
        }
        let t = TypeVector::new(counts).unwrap();
        let v = type_class_log_probability(&t);
        assert!(v.lower_bound <= v.exact + 1e-12);
    }
    let half = type_class_log_probability(&TypeVector::new(vec![2, 2]).unwrap());
    assert!((half.exact * 4.0 - 0.375f64.ln()).abs() < 1e-13);
}

#[test]
fn enumeration_visits_every_type_once() {
    let mut seen = 0u128;
    for_each_type(7, 4, |c| {
        assert_eq!(c.iter().sum::<u32>(), 7);
        seen += 1;
    });
    assert_eq!(seen, type_count(7, 4));
}

#[test]
fn halfspace_types_on_three_letters() {
    let mut rng = rng(13);
    for _ in 0..20 {
        let mu = random_distribution(&mut rng, 3, 0.05);
        let v: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let c: f64 = mu.iter().zip(&v).map(|(m, x)| m * x).sum();
        let n = 30;
        let (below, above) = halfspace_type_approximation(&mu, &v, c, n).unwrap();
        assert!(below.mean(&v) < c && c < above.mean(&v));
        let limit = 2.0 * 2.0 / n as f64 + 1e-12;
        assert!(below.l1_distance(&mu) <= limit && above.l1_distance(&mu) <= limit);
    }
}

#[test]
fn ns_alphabet_is_at_most_d_squared() {
    for (rho, sigma) in qubit_pairs() {
        let pair = build_classical_pair(rho.spectrum(), sigma.spectrum()).unwrap();
        assert!(pair.len() <= 4);
        assert!((pair.p().iter().sum::<f64>() - 1.0).abs() < 1e-10);
        assert!((pair.q().iter().sum::<f64>() - 1.0).abs() < 1e-10);
    }
}
