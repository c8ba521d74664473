//! Algebraic self-test behind `qkt check`.

use ndarray::{Array1, Array2};
use qkt_core::{
    build_gcs, evolve, haar_random_state, Axis, Complex, FloquetOperator, GcsParams, GeRecord,
    SpinSystem, StateVector,
};
use serde::Serialize;

use crate::error::Result;

/// Every residual below must stay under this.
pub const CHECK_TOLERANCE: f64 = 1e-10;

/// Spins exercised by default.
pub const DEFAULT_SPINS: [f64; 5] = [0.5, 1.0, 5.0, 50.0, 500.0];

type C = Complex<f64>;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub j: f64,
    pub residual: f64,
    pub passed: bool,
}

/// Runs every check at every spin in `spins`.
pub fn run_checks(spins: &[f64]) -> Result<Vec<CheckOutcome>> {
    let mut out = Vec::new();
    for &j in spins {
        let sys = SpinSystem::<f64>::from_j(j)?;
        let u = FloquetOperator::new(&sys, 3.0)?;
        let mut push = |name, residual: f64| {
            out.push(CheckOutcome {
                name,
                j,
                residual,
                passed: residual < CHECK_TOLERANCE,
            })
        };
        push("commutators", commutator_residual(&sys)?);
        push("casimir", casimir_residual(&sys)?);
        push("unitarity", unitarity_residual(&u));
        push("gcs_eigen_equation", gcs_residual(&sys)?);
        push("ge_extent_identity", identity_residual(&sys, &u)?);
    }
    Ok(out)
}

fn basis_vector(n: usize, i: usize) -> Array1<C> {
    let mut v = Array1::zeros(n);
    v[i] = C::new(1.0, 0.0);
    v
}

fn max_norm(v: &Array1<C>) -> f64 {
    v.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// `max |([J_a, J_b] - i J_c) e_i|` over basis vectors and cyclic `(a, b, c)`,
/// relative to `J^2`, the scale of the products involved.
fn commutator_residual(sys: &SpinSystem<f64>) -> Result<f64> {
    let n = sys.dim();
    let scale = 1.0_f64.max(sys.j() * sys.j());
    let cyc = [(Axis::X, Axis::Y, Axis::Z), (Axis::Y, Axis::Z, Axis::X), (Axis::Z, Axis::X, Axis::Y)];
    let mut worst: f64 = 0.0;
    for i in 0..n {
        let e = basis_vector(n, i);
        for (a, b, c) in cyc {
            let ab = sys.apply_vec(a, &sys.apply_vec(b, &e)?)?;
            let ba = sys.apply_vec(b, &sys.apply_vec(a, &e)?)?;
            let jc = sys.apply_vec(c, &e)?;
            let r = &ab - &ba - jc.mapv(|z| z * C::i());
            worst = worst.max(max_norm(&r) / scale);
        }
    }
    Ok(worst)
}

/// `max |(J^2 - J(J+1)) e_i| / J(J+1)`.
fn casimir_residual(sys: &SpinSystem<f64>) -> Result<f64> {
    let n = sys.dim();
    let c = sys.casimir();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        let e = basis_vector(n, i);
        let mut total = e.mapv(|z| z * -c);
        for axis in Axis::ALL {
            total = total + sys.apply_vec(axis, &sys.apply_vec(axis, &e)?)?;
        }
        worst = worst.max(max_norm(&total) / c);
    }
    Ok(worst)
}

/// `max |R R^T - 1|` plus the largest deviation of a kick phase from modulus one.
fn unitarity_residual(u: &FloquetOperator<f64>) -> f64 {
    let r = u.rotation().matrix();
    let gram = r.dot(&r.t());
    let eye = Array2::<f64>::eye(r.nrows());
    let rot = (&gram - &eye).iter().map(|x| x.abs()).fold(0.0, f64::max);
    let kick = u
        .kick_phases()
        .iter()
        .map(|c| (c.norm() - 1.0).abs())
        .fold(0.0, f64::max);
    rot.max(kick)
}

/// `|(n.J) psi - J psi| / J` on a grid of coherent states.
fn gcs_residual(sys: &SpinSystem<f64>) -> Result<f64> {
    let j = sys.j();
    let mut worst: f64 = 0.0;
    for &theta in &[0.0, 0.4, 1.3, std::f64::consts::FRAC_PI_2, 2.5, std::f64::consts::PI] {
        for &phi in &[-3.0, -1.0, 0.0, 0.7, 2.9] {
            let p = GcsParams::new(theta, phi)?;
            let psi = build_gcs(sys, &p);
            let [nx, ny, nz] = p.direction();
            let a = psi.amplitudes();
            let nj = sys.apply_vec(Axis::X, a)?.mapv(|z| z * nx)
                + sys.apply_vec(Axis::Y, a)?.mapv(|z| z * ny)
                + sys.apply_vec(Axis::Z, a)?.mapv(|z| z * nz);
            let r = nj - a.mapv(|z| z * j);
            let norm = r.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            worst = worst.max(norm / j);
        }
    }
    Ok(worst)
}

/// GE/extent identity on coherent, Haar-random and evolved states.
fn identity_residual(sys: &SpinSystem<f64>, u: &FloquetOperator<f64>) -> Result<f64> {
    let j = sys.j();
    let mut states: Vec<StateVector<f64>> = Vec::new();
    states.push(build_gcs(sys, &GcsParams::new(1.0, 0.5)?));
    for seed in 0..4 {
        states.push(haar_random_state(sys.dim(), seed)?);
    }
    let mut evolved = Vec::new();
    evolve(u, &states[0], 20, |rec| evolved.push(rec.psi.clone()))?;
    states.extend(evolved);
    let mut worst: f64 = 0.0;
    for psi in &states {
        worst = worst.max(GeRecord::measure(sys, psi)?.identity_residual(j));
    }
    Ok(worst)
}
