use approx::assert_relative_eq;
use oscmax::argbranch::{phi, power_weight, unwrap_arg};
use oscmax::curve::{generate_log_spiral, generate_mixed_spirality};
use oscmax::submult::{
    compute_w, estimate_indices, phi_indices_closed_form, power_sandwich, sandwich_pair_scan, spirality_indices,
    IndexPair, WOptions,
};
use oscmax::{eta, Error, Execution, C64};
use proptest::prelude::*;

const ORIGIN: C64 = C64::new(0.0, 0.0);

#[test]
fn mixed_curve_indices() {
    let c = generate_mixed_spirality(-1.0, 1.0, 1e-6, 1.0, 65536).unwrap();
    let idx = spirality_indices(&c, ORIGIN).unwrap();
    assert!((idx.alpha + 1.0).abs() <= 0.15, "{idx:?}");
    assert!((idx.beta - 1.0).abs() <= 0.15, "{idx:?}");
}

#[test]
fn power_weight_has_flat_w() {
    // |τ|^λ along a spiral is constant on circles, so W(x) = x^λ exactly
    let c = generate_log_spiral(1.0, 1e-5, 1.0, 8192).unwrap();
    let w = power_weight(&c, ORIGIN, 0.35).unwrap();
    let s = compute_w(&c, ORIGIN, &w, &WOptions::default(), Execution::Sequential).unwrap();
    for (x, lv) in s.xs.iter().zip(&s.log_vals) {
        assert_relative_eq!(*lv, 0.35 * x.ln(), epsilon = 1e-9);
    }
    assert_eq!(s.log_vals[s.center()], 0.0);
}

#[test]
fn narrow_grid_is_rejected() {
    let c = generate_log_spiral(1.0, 1e-6, 1.0, 4096).unwrap();
    let b = unwrap_arg(&c, ORIGIN).unwrap();
    let s = compute_w(&c, ORIGIN, &eta(&b), &WOptions::wide(2.0), Execution::Sequential).unwrap();
    assert!(matches!(estimate_indices(&s), Err(Error::GridTooNarrow { .. })));
}

#[test]
fn shallow_curve_has_empty_annuli() {
    let c = generate_log_spiral(1.0, 0.1, 1.0, 512).unwrap();
    let b = unwrap_arg(&c, ORIGIN).unwrap();
    let r = compute_w(&c, ORIGIN, &eta(&b), &WOptions::default(), Execution::Sequential);
    assert!(matches!(r, Err(Error::AllAnnuliEmpty)));
}

#[test]
fn execution_modes_agree() {
    let c = generate_mixed_spirality(-0.5, 1.0, 1e-8, 1.0, 8192).unwrap();
    let w = eta(&unwrap_arg(&c, ORIGIN).unwrap());
    let a = compute_w(&c, ORIGIN, &w, &WOptions::default(), Execution::Sequential).unwrap();
    let b = compute_w(&c, ORIGIN, &w, &WOptions::default(), Execution::Parallel).unwrap();
    assert_eq!(a.log_vals, b.log_vals);
}

#[test]
fn sandwich_dominates_the_pair_scan() {
    let c = generate_log_spiral(1.0, 1e-4, 1.0, 2048).unwrap();
    let w = phi(&unwrap_arg(&c, ORIGIN).unwrap(), C64::new(0.3, 0.2));
    let idx = IndexPair::new(0.5, 0.5);
    let d = c.d_t(ORIGIN) / 8.0;
    let (c1, c2) = power_sandwich(&c, ORIGIN, &w, &idx, 0.1, d).unwrap();
    let (s1, s2) = sandwich_pair_scan(&c, ORIGIN, &w, &idx, 0.1, d, 1 << 20).unwrap();
    assert!(s1 <= c1 * (1.0 + 1e-9) && s2 <= c2 * (1.0 + 1e-9));
    // the full scan is exhaustive at this size
    assert_relative_eq!(s1, c1, max_relative = 1e-9);
    assert_relative_eq!(s2, c2, max_relative = 1e-9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn closed_form_matches_numerics(re in -1.0f64..1.0, im in -1.0f64..1.0, delta in -2.0f64..2.0) {
        let c = generate_log_spiral(delta, 1e-4, 1.0, 4096).unwrap();
        let b = unwrap_arg(&c, ORIGIN).unwrap();
        let g = C64::new(re, im);
        let s = compute_w(&c, ORIGIN, &phi(&b, g), &WOptions::default(), Execution::Sequential).unwrap();
        let est = estimate_indices(&s).unwrap();
        let want = phi_indices_closed_form(g, &IndexPair::new(delta, delta));
        prop_assert!((est.alpha - want.alpha).abs() < 1e-6);
        prop_assert!((est.beta - want.beta).abs() < 1e-6);
    }

    #[test]
    fn samples_are_submultiplicative(alpha in -1.5f64..0.5, gap in 0.0f64..2.0) {
        let c = generate_mixed_spirality(alpha, alpha + gap, 1e-14, 1.0, 8192).unwrap();
        let b = unwrap_arg(&c, ORIGIN).unwrap();
        let s = compute_w(&c, ORIGIN, &eta(&b), &WOptions::default(), Execution::Sequential).unwrap();
        prop_assert!(s.submult_excess() <= 1e-9);
        let idx = estimate_indices(&s).unwrap();
        prop_assert!(idx.alpha <= idx.beta + 1e-9);
    }
}
