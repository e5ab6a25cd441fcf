use proptest::prelude::*;
use qbound::classical_binary::{
    crossover_s, en_bounds, en_exact, inc_beta_reg, incbeta_monotonicity_check, rate_curve, BinaryPair, RATE_CURVE_HEADER,
};
use qbound::ns_mapping::{classical_exact_errors, ClassicalPair};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn envelope_contains_exact_value(p in 0.01f64..0.99, q in 0.01f64..0.99, frac in 0.05f64..0.95, n in 1usize..400) {
        prop_assume!((p - q).abs() > 0.02);
        let bp = BinaryPair::new(p, q).unwrap();
        // choose a so that s(a) = frac
        let (p, q) = (bp.p(), bp.q());
        let a = ((1.0 - p) / (1.0 - q)).ln() - frac * (q * (1.0 - p) / (p * (1.0 - q))).ln();
        prop_assert!((crossover_s(&bp, a).unwrap() - frac).abs() < 1e-9);
        let e = en_exact(&bp, n, a).unwrap();
        let (lo, up) = en_bounds(&bp, n, a).unwrap();
        prop_assert!(lo <= e * (1.0 + 1e-10), "lower {lo} > exact {e}");
        prop_assert!(e <= up * (1.0 + 1e-10), "exact {e} > upper {up}");
    }

    #[test]
    fn half_the_classical_mixed_error(p in 0.02f64..0.98, q in 0.02f64..0.98, a in -0.5f64..0.5, n in 1usize..60) {
        let bp = BinaryPair::new(p, q).unwrap();
        let pair = ClassicalPair::from_measures(&[p, 1.0 - p], &[q, 1.0 - q]).unwrap();
        let tilde = classical_exact_errors(&pair, n, a).unwrap().mixed;
        let e = en_exact(&bp, n, a).unwrap();
        prop_assert!((e - tilde / 2.0).abs() <= 1e-12 * tilde.max(1e-300) + 1e-300);
    }

    #[test]
    fn relabeling_preserves_error(p in 0.01f64..0.99, q in 0.01f64..0.99, n in 1usize..50) {
        let x = en_exact(&BinaryPair::new(p, q).unwrap(), n, 0.0).unwrap();
        let y = en_exact(&BinaryPair::new(1.0 - p, 1.0 - q).unwrap(), n, 0.0).unwrap();
        prop_assert!((x - y).abs() <= 1e-13 * x);
    }

    #[test]
    fn incomplete_beta_reflection(z in 0.0f64..=1.0, k in 0.1f64..80.0, l in 0.1f64..80.0) {
        let x = inc_beta_reg(z, k, l).unwrap();
        let y = inc_beta_reg(1.0 - z, l, k).unwrap();
        prop_assert!((0.0..=1.0).contains(&x));
        prop_assert!((x + y - 1.0).abs() < 1e-12);
    }

    #[test]
    fn incomplete_beta_monotone_in_z(z1 in 0.0f64..1.0, dz in 0.0f64..0.5, k in 0.2f64..40.0, l in 0.2f64..40.0) {
        let z2 = (z1 + dz).min(1.0);
        prop_assert!(inc_beta_reg(z1, k, l).unwrap() <= inc_beta_reg(z2, k, l).unwrap() + 1e-13);
    }

    #[test]
    fn appendix_monotonicity_lemma(z in 0.0f64..=1.0, n in 0.5f64..120.0) {
        prop_assert!(incbeta_monotonicity_check(z, n, 99).unwrap());
    }
}

#[test]
fn smaller_p_oscillates_more() {
    let amplitude = |p: f64| {
        let bp = BinaryPair::new(p, 0.5).unwrap();
        let rows = rate_curve(&bp, 0.0, 300).unwrap();
        let c = rows[0].chernoff;
        rows[100..].iter().map(|r| r.rate_exact - c).fold(0.0f64, f64::max)
            - rows[100..].iter().map(|r| r.rate_exact - c).fold(f64::INFINITY, f64::min)
    };
    assert!(amplitude(1e-10) > amplitude(1e-3));
}

#[test]
fn tiny_p_still_sandwiched() {
    let bp = BinaryPair::new(1e-10, 0.5).unwrap();
    for row in rate_curve(&bp, 0.0, 300).unwrap() {
        let tol = 1e-12 * row.rate_exact;
        assert!(row.rate_lower <= row.rate_exact + tol && row.rate_exact <= row.rate_upper + tol, "n={}", row.n);
        assert!(row.rate_exact > row.chernoff);
    }
}

#[test]
fn envelope_rate_width_shrinks() {
    let bp = BinaryPair::new(0.001, 0.5).unwrap();
    let widths: Vec<f64> = (1..=20)
        .map(|k| {
            let n = 10 * k;
            let (lo, up) = en_bounds(&bp, n, 0.0).unwrap();
            (up / lo).ln() / n as f64
        })
        .collect();
    assert!(widths.windows(2).all(|w| w[1] <= w[0]), "{widths:?}");
}

#[test]
fn envelope_rejects_crossover_outside_unit_interval() {
    let bp = BinaryPair::new(0.2, 0.6).unwrap();
    let a = ((1.0 - 0.2) / (1.0 - 0.6f64)).ln() + 0.1;
    assert!(crossover_s(&bp, a).unwrap() < 0.0);
    assert!(en_bounds(&bp, 10, a).is_err());
}

#[test]
fn binomial_identity_on_small_grid() {
    use qbound::classical_binary::binomial_cdf;
    for n in 1..=30u64 {
        for k0 in 0..=n {
            for p in [0.1, 0.5, 0.9] {
                let beta = inc_beta_reg(1.0 - p, (n - k0) as f64, (k0 + 1) as f64).unwrap();
                assert!((binomial_cdf(n, k0, p) - beta).abs() < 1e-11, "n={n} k0={k0} p={p}");
            }
        }
    }
}

#[test]
fn header_matches_row_layout() {
    assert_eq!(RATE_CURVE_HEADER.split(',').count(), 5);
    let rows = rate_curve(&BinaryPair::new(0.25, 0.75).unwrap(), 0.0, 2).unwrap();
    assert_eq!(rows.iter().map(|r| r.n).collect::<Vec<_>>(), vec![1, 2]);
    assert!((rows[0].rate_exact - 4f64.ln()).abs() < 1e-14);
}
