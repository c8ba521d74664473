mod common;

use std::sync::Arc;

use common::*;
use ndarray::Array2;
use qkt_core::measures::axis_extent;
use qkt_core::{
    build_gcs, evolve, extent, fidelity_series, purity_su2, Axis, FloquetOperator, GcsParams,
    QuarterTurn, SpinSystem,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn real_max_abs(a: &Array2<f64>) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

#[test]
fn rotation_invariants_at_large_spin() {
    for j in [50.0, 500.0] {
        let sys = SpinSystem::<f64>::from_j(j).unwrap();
        let turn = QuarterTurn::new(&sys).unwrap();
        let r = turn.matrix();
        let n = sys.dim();
        let rtr = r.t().dot(r) - Array2::<f64>::eye(n);
        assert!(real_max_abs(&rtr) < 1e-10, "J={j}");

        let m = Array2::from_diag(&ndarray::Array1::from(sys.m_values().to_vec()));
        let jx_real = sys.jx().mapv(|c| c.re);
        // R Jz R^T = Jx and R Jx R^T = -Jz
        let zx = r.dot(&m).dot(&r.t()) - &jx_real;
        assert!(real_max_abs(&zx) < 1e-8, "J={j}");
        let xz = r.dot(&jx_real).dot(&r.t()) + &m;
        assert!(real_max_abs(&xz) < 1e-8, "J={j}");

        // U^dagger U = K^dagger R^T R K
        let u = FloquetOperator::with_rotation(&sys, Arc::new(turn.clone()), 12.0).unwrap();
        let k = u.kick_phases();
        let mut worst = 0.0f64;
        let rtr = r.t().dot(r);
        for a in 0..n {
            for b in 0..n {
                let v = k[a].conj() * rtr[[a, b]] * k[b];
                let expect = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((v - C::new(expect, 0.0)).norm());
            }
        }
        assert!(worst < 1e-10, "J={j}");
    }
}

#[test]
fn dense_floquet_unitary_at_moderate_spin() {
    let sys = SpinSystem::<f64>::from_j(50.0).unwrap();
    let u = FloquetOperator::new(&sys, 3.0).unwrap().to_dense();
    let udu = u.t().mapv(|c| c.conj()).dot(&u);
    let id = Array2::from_diag_elem(sys.dim(), C::new(1.0, 0.0));
    assert!(max_abs(&(udu - id)) < 1e-10);
}

#[test]
fn norm_preserved_over_thousand_kicks() {
    let sys = SpinSystem::<f64>::from_j(500.0).unwrap();
    let u = FloquetOperator::new(&sys, 12.0).unwrap();
    let psi = build_gcs(&sys, &GcsParams::new(1.3, -0.4).unwrap());
    let mut worst = 0.0f64;
    evolve(&u, &psi, 1000, |r| worst = worst.max((r.psi.norm() - 1.0).abs())).unwrap();
    assert!(worst < 1e-9, "drift {worst}");
}

#[test]
fn pure_rotation_keeps_purity_one() {
    let sys = SpinSystem::<f64>::from_j(50.0).unwrap();
    let u = FloquetOperator::new(&sys, 0.0).unwrap();
    let psi = build_gcs(&sys, &GcsParams::new(2.2, 0.9).unwrap());
    evolve(&u, &psi, 40, |r| {
        let p = purity_su2(&sys, r.psi).unwrap();
        assert!((p - 1.0).abs() < 1e-8, "t={} p={p}", r.t);
    })
    .unwrap();
}

#[test]
fn spin_half_dynamics_is_pure_rotation() {
    let sys = SpinSystem::<f64>::from_j(0.5).unwrap();
    let u = FloquetOperator::new(&sys, 7.0).unwrap();
    let psi = build_gcs(&sys, &GcsParams::new(1.0, 0.2).unwrap());
    evolve(&u, &psi, 20, |r| {
        assert!((purity_su2(&sys, r.psi).unwrap() - 1.0).abs() < 1e-12);
    })
    .unwrap();
}

#[test]
fn strong_kicks_saturate_near_rmt_value() {
    let sys = SpinSystem::<f64>::from_j(500.0).unwrap();
    let u = FloquetOperator::new(&sys, 12.0).unwrap();
    let psi = build_gcs(&sys, &GcsParams::new(2.0, 1.0).unwrap());
    let last = evolve(&u, &psi, 200, |_| {}).unwrap();
    let ge = 1.0 - purity_su2(&sys, &last).unwrap();
    assert!((0.99..=1.0).contains(&ge), "GE(200) = {ge}");
}

/// Finds `delta` with `1 - F(1)` inside `[1e-6, 1e-4]`, returning the
/// pair `(delta, 1 - F(1))`.
fn bracket_delta(sys: &SpinSystem<f64>, u: &FloquetOperator<f64>, psi: &qkt_core::StateVector<f64>) -> (f64, f64) {
    let mut delta = 1e-3;
    for _ in 0..20 {
        let f = qkt_core::dynamics::fidelity_series_with(sys, u, delta, psi, 1).unwrap();
        let loss = 1.0 - f[1];
        if (1e-6..=1e-4).contains(&loss) {
            return (delta, loss);
        }
        delta *= (1e-5 / loss.max(1e-30)).sqrt();
    }
    panic!("could not bracket delta");
}

#[test]
fn second_order_fidelity_matches_initial_extent() {
    let sys = SpinSystem::<f64>::from_j(100.0).unwrap();
    let u = FloquetOperator::new(&sys, 3.0).unwrap();
    let v = sys.jz().mapv(|c| c * c / (2.0 * 100.0));
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..10 {
        let p = GcsParams::new(rng.gen_range(0.1..PI - 0.1), rng.gen_range(-PI..PI)).unwrap();
        let psi = build_gcs(&sys, &p);
        let (delta, loss) = bracket_delta(&sys, &u, &psi);
        let spread = extent(&sys, &v, &psi).unwrap();
        let coeff = loss / (delta * delta);
        let rel = (coeff - spread * spread).abs() / (spread * spread);
        assert!(rel < 0.05, "rel {rel} at {p:?}");
    }
}

#[test]
fn fidelity_coefficient_at_equator_gcs() {
    let sys = SpinSystem::<f64>::from_j(100.0).unwrap();
    let u = FloquetOperator::new(&sys, 1.1).unwrap();
    let psi = build_gcs(&sys, &GcsParams::new(PI / 2.0, 0.0).unwrap());
    let v = sys.jz().mapv(|c| c * c / 200.0);
    let (delta, loss) = bracket_delta(&sys, &u, &psi);
    let spread = extent(&sys, &v, &psi).unwrap();
    assert!(((loss / (delta * delta)) / (spread * spread) - 1.0).abs() < 0.05);
    // z-extent of the equatorial state is sqrt(J/2)
    let ez = axis_extent(&sys, Axis::Z, &psi).unwrap();
    assert!((ez - (50.0f64).sqrt()).abs() < 1e-8 * 10.0);
}

#[test]
fn zero_perturbation_has_unit_fidelity() {
    let sys = SpinSystem::<f64>::from_j(50.0).unwrap();
    let psi = build_gcs(&sys, &GcsParams::new(0.4, -2.0).unwrap());
    let f = fidelity_series(&sys, 12.0, 0.0, &psi, 100).unwrap();
    assert_eq!(f[0], 1.0);
    assert!(f.iter().all(|x| (x - 1.0).abs() < 1e-10));
}
