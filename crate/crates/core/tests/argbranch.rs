use approx::assert_relative_eq;
use oscmax::argbranch::{equivalent, eta, phi, power_weight, unwrap_arg, Weight};
use oscmax::curve::{generate_log_spiral, generate_mixed_spirality, mixed_phase, Curve};
use oscmax::C64;
use proptest::prelude::*;

fn spiral(delta: f64) -> Curve {
    generate_log_spiral(delta, 1e-4, 1.0, 2048).unwrap()
}

#[test]
fn spiral_argument_is_linear_in_log_distance() {
    for delta in [-1.0, 0.5, 2.0] {
        let b = unwrap_arg(&spiral(delta), C64::new(0.0, 0.0)).unwrap();
        let offset = b.values[0] + delta * b.log_dist[0];
        for (a, l) in b.values.iter().zip(&b.log_dist) {
            assert_relative_eq!(*a, offset - delta * l, epsilon = 1e-9);
        }
        // the offset is a whole number of turns
        let turns = offset / std::f64::consts::TAU;
        assert!((turns - turns.round()).abs() < 1e-9);
    }
}

#[test]
fn mixed_curve_follows_its_phase() {
    let c = generate_mixed_spirality(-1.0, 1.0, 1e-8, 1.0, 8192).unwrap();
    let b = unwrap_arg(&c, C64::new(0.0, 0.0)).unwrap();
    let shift = b.values[0] - mixed_phase(-1.0, 1.0, -b.log_dist[0]);
    for (a, l) in b.values.iter().zip(&b.log_dist) {
        assert_relative_eq!(*a, mixed_phase(-1.0, 1.0, -l) + shift, epsilon = 1e-8);
    }
}

#[test]
fn argument_growth_constant_is_stable_under_refinement() {
    let t0 = C64::new(0.0, 0.0);
    let coarse = unwrap_arg(&generate_log_spiral(1.0, 1e-6, 1.0, 2048).unwrap(), t0).unwrap();
    let fine = unwrap_arg(&generate_log_spiral(1.0, 1e-6, 1.0, 16384).unwrap(), t0).unwrap();
    let (a, b) = (coarse.log_growth_constant(), fine.log_growth_constant());
    assert!(a.is_finite() && a > 0.0);
    assert_relative_eq!(a, b, max_relative = 1e-2);
    // the anchor's whole-turn offset enters the constant, so only stability is asserted
    let mixed = |n| {
        let c = generate_mixed_spirality(-1.0, 1.0, 1e-12, 1.0, n).unwrap();
        unwrap_arg(&c, t0).unwrap().log_growth_constant()
    };
    assert_relative_eq!(mixed(4096), mixed(16384), max_relative = 1e-2);
}

#[test]
fn eta_inverts_exp_arg() {
    let b = unwrap_arg(&spiral(1.0), C64::new(0.0, 0.0)).unwrap();
    for (lw, a) in eta(&b).log_values().iter().zip(&b.values) {
        assert_eq!(*lw, -a);
    }
}

#[test]
fn power_weight_is_a_real_gamma() {
    let c = spiral(1.5);
    let t0 = C64::new(0.0, 0.0);
    let b = unwrap_arg(&c, t0).unwrap();
    let p = power_weight(&c, t0, -0.3).unwrap();
    let q = phi(&b, C64::new(-0.3, 0.0));
    for (x, y) in p.log_values().iter().zip(q.log_values()) {
        assert_relative_eq!(*x, *y, epsilon = 1e-12);
    }
}

#[test]
fn equivalence_ignores_constants() {
    let b = unwrap_arg(&spiral(1.0), C64::new(0.0, 0.0)).unwrap();
    let w = phi(&b, C64::new(0.2, 0.4));
    assert_relative_eq!(equivalent(&w, &w).unwrap(), 1.0);
    let scaled = w.mul(&Weight::constant(w.len(), 7.5));
    assert_relative_eq!(equivalent(&w, &scaled).unwrap(), 1.0, max_relative = 1e-12);
    // r^0.1 against 1 over four decades
    let other = phi(&b, C64::new(0.3, 0.4));
    assert_relative_eq!(equivalent(&w, &other).unwrap(), 1e4f64.powf(0.1), max_relative = 1e-9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn phi_is_a_character(a in -2.0f64..2.0, b in -2.0f64..2.0, c in -2.0f64..2.0, d in -2.0f64..2.0) {
        let br = unwrap_arg(&spiral(1.0), C64::new(0.0, 0.0)).unwrap();
        let (g1, g2) = (C64::new(a, b), C64::new(c, d));
        let sum = phi(&br, g1 + g2);
        let prod = phi(&br, g1).mul(&phi(&br, g2));
        for (x, y) in sum.log_values().iter().zip(prod.log_values()) {
            prop_assert!((x - y).abs() <= 1e-10 * (1.0 + x.abs()));
        }
        let inv = phi(&br, -g1);
        for (x, y) in inv.log_values().iter().zip(phi(&br, g1).recip().log_values()) {
            prop_assert!((x - y).abs() <= 1e-12 * (1.0 + x.abs()));
        }
    }

    #[test]
    fn powers_compose(s in -3.0f64..3.0, g in -1.0f64..1.0) {
        let br = unwrap_arg(&spiral(2.0), C64::new(0.0, 0.0)).unwrap();
        let w = phi(&br, C64::new(0.1, g));
        let lhs = w.powf(s);
        let rhs = phi(&br, C64::new(0.1, g) * s);
        for (x, y) in lhs.log_values().iter().zip(rhs.log_values()) {
            prop_assert!((x - y).abs() <= 1e-10 * (1.0 + x.abs()));
        }
    }
}
