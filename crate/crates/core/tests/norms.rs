use approx::assert_relative_eq;
use oscmax::argbranch::{power_weight, Weight};
use oscmax::curve::{generate_circle, generate_log_spiral, Curve};
use oscmax::norms::{
    ap_t_grid, classic_p_norm, luxemburg_norm, make_exponent, modular, muckenhoupt_ap, ExponentField, ExponentKind,
};
use oscmax::{Execution, C64};
use proptest::prelude::*;

fn circle() -> Curve {
    generate_circle(1.0, 512).unwrap()
}

fn profile(c: &Curve) -> ExponentField {
    make_exponent(c, ExponentKind::Profile { t0: c.require_marked().unwrap(), p_t0: 1.8, p_far: 2.2 }).unwrap()
}

#[test]
fn constant_function_norm() {
    let c = circle();
    let one = Weight::constant(c.len(), 1.0);
    for p in [1.5, 2.0, 4.0] {
        let e = make_exponent(&c, ExponentKind::Constant { p }).unwrap();
        let n = luxemburg_norm(&c, &vec![3.0; c.len()], &one, &e).unwrap();
        // node quadrature integrates a constant exactly over the polygon
        assert_relative_eq!(n, 3.0 * c.total_length().powf(1.0 / p), max_relative = 1e-12);
    }
}

#[test]
fn zero_function_has_zero_norm() {
    let c = circle();
    let e = profile(&c);
    let n = luxemburg_norm(&c, &vec![0.0; c.len()], &Weight::constant(c.len(), 1.0), &e).unwrap();
    assert_eq!(n, 0.0);
}

#[test]
fn profile_exponent_shape() {
    let c = generate_log_spiral(1.0, 1e-6, 1.0, 4096).unwrap();
    let e = profile(&c);
    assert_eq!(e.at_t0, 1.8);
    assert!(e.p_min > 1.8 && e.p_max <= 2.2 + 1e-12);
    assert_eq!(e.p_star(), 1.8);
    assert!(e.dini_constant.is_finite() && e.dini_constant > 0.0);
    assert!(!e.is_constant());
    assert!(make_exponent(&c, ExponentKind::Constant { p: 1.0 }).is_err());
}

#[test]
fn ap_characteristic_tracks_the_power() {
    let c = generate_circle(1.0, 2048).unwrap();
    let t0 = c.require_marked().unwrap();
    let grid = ap_t_grid(&c, 64);
    let ap = |l: f64| {
        let w = power_weight(&c, t0, l).unwrap();
        muckenhoupt_ap(&c, &w, 2.0, &grid, None, Execution::Sequential).unwrap()
    };
    let flat = ap(0.0);
    // averages are taken over ε, so w ≡ 1 gives sup |Γ(t,ε)|/ε = π on the circle
    assert_relative_eq!(flat, std::f64::consts::PI, max_relative = 1e-6);
    let (a, b, d) = (ap(0.2), ap(0.4), ap(0.49));
    assert!(flat < a && a < b && b < d, "{a} {b} {d}");
    // beyond the endpoint the grid value blows up with depth
    assert!(ap(0.7) > 10.0 * d);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn normalized_function_has_unit_modular(seed in proptest::collection::vec(0.01f64..10.0, 16), lam in -0.4f64..0.4) {
        let c = circle();
        let t0 = c.require_marked().unwrap();
        let f: Vec<f64> = (0..c.len()).map(|k| seed[k % 16]).collect();
        let w = power_weight(&c, t0, lam).unwrap();
        let e = profile(&c);
        let n = luxemburg_norm(&c, &f, &w, &e).unwrap();
        let m = modular(&c, &f, &w, &e, n).unwrap();
        prop_assert!((m - 1.0).abs() < 1e-9, "{m}");
    }

    #[test]
    fn norm_is_monotone_and_homogeneous(seed in proptest::collection::vec(0.0f64..5.0, 16), s in 0.0f64..1.0, k in 0.01f64..100.0) {
        let c = circle();
        let one = Weight::constant(c.len(), 1.0);
        let e = profile(&c);
        let g: Vec<f64> = (0..c.len()).map(|i| seed[i % 16]).collect();
        let f: Vec<f64> = g.iter().enumerate().map(|(i, v)| if i % 3 == 0 { v * s } else { *v }).collect();
        let nf = luxemburg_norm(&c, &f, &one, &e).unwrap();
        let ng = luxemburg_norm(&c, &g, &one, &e).unwrap();
        prop_assert!(nf <= ng * (1.0 + 1e-12));
        let kg: Vec<f64> = g.iter().map(|v| -k * v).collect();
        let nk = luxemburg_norm(&c, &kg, &one, &e).unwrap();
        prop_assert!((nk - k * ng).abs() <= 1e-10 * (k * ng).max(1e-300));
    }

    #[test]
    fn constant_exponent_is_the_classical_norm(seed in proptest::collection::vec(-3.0f64..3.0, 8), p in 1.1f64..6.0) {
        let c = circle();
        let w = power_weight(&c, C64::new(1.0, 0.0), 0.1).unwrap();
        let f: Vec<f64> = (0..c.len()).map(|i| seed[i % 8]).collect();
        prop_assume!(f.iter().any(|v| *v != 0.0));
        let e = make_exponent(&c, ExponentKind::Constant { p }).unwrap();
        let a = luxemburg_norm(&c, &f, &w, &e).unwrap();
        let b = classic_p_norm(&c, &f, &w, p);
        prop_assert!((a - b).abs() <= 1e-10 * b);
    }
}
