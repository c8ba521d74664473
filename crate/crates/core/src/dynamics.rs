//! Stroboscopic kicked-top evolution and fidelity decay.
//!
//! One period is `U = exp(-i pi Jy / 2) exp(-i k Jz^2 / 2J)`: the diagonal kick
//! acts first, then the quarter turn about `y`.

use std::sync::Arc;

use ndarray::{Array1, Array2};
use num_complex::Complex;

use crate::eigen::symmetric_tridiagonal_eigen;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::spin::{l2_norm, Spin, SpinSystem, StateVector};

/// The quarter turn `exp(-i pi Jy / 2)`.
///
/// In the `Jz` basis with the standard phase convention `-i Jy` is a real
/// antisymmetric matrix, so the rotation is real orthogonal and is stored as
/// such. [`QuarterTurn::to_complex`] gives the complex form.
#[derive(Clone, Debug)]
pub struct QuarterTurn<T: Real> {
    spin: Spin,
    matrix: Array2<T>,
}

impl<T: Real> QuarterTurn<T> {
    /// Builds the rotation from the eigendecomposition of `Jx`, using
    /// `Jy = D Jx D^dagger` with `D = diag(i^(J - m))`.
    pub fn new(sys: &SpinSystem<T>) -> Result<Self> {
        let n = sys.dim();
        let half = T::lit(0.5);
        let diag = vec![T::zero(); n];
        let off: Vec<T> = sys.ladder_coefficients()[1..]
            .iter()
            .map(|&c| c * half)
            .collect();
        let eig = symmetric_tridiagonal_eigen(&diag, &off)?;
        // z[a][n]: component a of eigenvector n
        let z = eig.vectors.t().as_standard_layout().into_owned();
        let angle = T::FRAC_PI_2();
        let cos_w: Array1<T> = eig.values.iter().map(|&l| (angle * l).cos()).collect();
        let sin_w: Array1<T> = eig.values.iter().map(|&l| (angle * l).sin()).collect();
        let zc = &z * &cos_w;
        let zs = &z * &sin_w;

        // R[a][b] = Re( i^(a-b) * sum_n z[a][n] z[b][n] e^{-i angle l_n} )
        let mut matrix = Array2::<T>::zeros((n, n));
        for a in 0..n {
            let zca = zc.row(a);
            let zsa = zs.row(a);
            for b in a..n {
                let zb = z.row(b);
                let diff = (b - a) % 4;
                if diff % 2 == 0 {
                    let c = zca.dot(&zb);
                    // a - b = 0 or 2 (mod 4) in both orders
                    let v = if diff == 0 { c } else { -c };
                    matrix[[a, b]] = v;
                    matrix[[b, a]] = v;
                } else {
                    let s = zsa.dot(&zb);
                    // (a - b) mod 4 is 3 when diff == 1, 1 when diff == 3
                    let v = if diff == 1 { -s } else { s };
                    matrix[[a, b]] = v;
                    matrix[[b, a]] = -v;
                }
            }
        }
        Ok(QuarterTurn {
            spin: sys.spin(),
            matrix,
        })
    }

    pub fn spin(&self) -> Spin {
        self.spin
    }

    pub fn matrix(&self) -> &Array2<T> {
        &self.matrix
    }

    pub fn to_complex(&self) -> Array2<Complex<T>> {
        self.matrix.mapv(|v| Complex::new(v, T::zero()))
    }

    /// `R v` for a complex vector.
    pub fn apply(&self, v: &Array1<Complex<T>>) -> Array1<Complex<T>> {
        let n = v.len();
        let mut split = Array2::<T>::zeros((n, 2));
        for (i, c) in v.iter().enumerate() {
            split[[i, 0]] = c.re;
            split[[i, 1]] = c.im;
        }
        let out = self.matrix.dot(&split);
        Array1::from_shape_fn(n, |i| Complex::new(out[[i, 0]], out[[i, 1]]))
    }
}

/// Factored Floquet operator: diagonal kick phases plus a shared rotation.
#[derive(Clone, Debug)]
pub struct FloquetOperator<T: Real> {
    k: T,
    spin: Spin,
    kick_phases: Array1<Complex<T>>,
    rotation: Arc<QuarterTurn<T>>,
}

impl<T: Real> FloquetOperator<T> {
    /// Builds the rotation and the kick for strength `k`.
    pub fn new(sys: &SpinSystem<T>, k: T) -> Result<Self> {
        let rotation = Arc::new(QuarterTurn::new(sys)?);
        Self::with_rotation(sys, rotation, k)
    }

    /// Reuses an existing rotation; only the kick phases depend on `k`.
    pub fn with_rotation(sys: &SpinSystem<T>, rotation: Arc<QuarterTurn<T>>, k: T) -> Result<Self> {
        if !k.is_finite() {
            return Err(Error::param("k", "kick strength must be finite"));
        }
        if rotation.spin() != sys.spin() {
            return Err(Error::DimensionMismatch {
                expected: sys.dim(),
                found: rotation.spin().dim(),
            });
        }
        let scale = k / (T::lit(2.0) * sys.j());
        let kick_phases = sys
            .m_values()
            .iter()
            .map(|&m| Complex::from_polar(T::one(), -(scale * m * m)))
            .collect();
        Ok(FloquetOperator {
            k,
            spin: sys.spin(),
            kick_phases,
            rotation,
        })
    }

    /// Same rotation, kick strength shifted by `delta`.
    pub fn perturbed(&self, sys: &SpinSystem<T>, delta: T) -> Result<Self> {
        Self::with_rotation(sys, Arc::clone(&self.rotation), self.k + delta)
    }

    pub fn k(&self) -> T {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.spin.dim()
    }

    pub fn kick_phases(&self) -> &Array1<Complex<T>> {
        &self.kick_phases
    }

    pub fn rotation(&self) -> &Arc<QuarterTurn<T>> {
        &self.rotation
    }

    /// Kick factor alone, `exp(-i k Jz^2 / 2J) psi`.
    pub fn apply_kick(&self, psi: &StateVector<T>) -> Result<StateVector<T>> {
        self.check(psi)?;
        Ok(StateVector::from_normalized(
            psi.amplitudes() * &self.kick_phases,
        ))
    }

    /// One full period.
    pub fn apply(&self, psi: &StateVector<T>) -> Result<StateVector<T>> {
        self.check(psi)?;
        Ok(StateVector::from_normalized(self.step_raw(psi.amplitudes())))
    }

    fn step_raw(&self, a: &Array1<Complex<T>>) -> Array1<Complex<T>> {
        self.rotation.apply(&(a * &self.kick_phases))
    }

    /// Dense `U = R K`.
    pub fn to_dense(&self) -> Array2<Complex<T>> {
        let r = self.rotation.matrix();
        Array2::from_shape_fn((self.dim(), self.dim()), |(i, j)| {
            self.kick_phases[j] * r[[i, j]]
        })
    }

    fn check(&self, psi: &StateVector<T>) -> Result<()> {
        if psi.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: psi.dim(),
            });
        }
        Ok(())
    }
}

/// State after `t` kicks, handed to evolution observers.
#[derive(Clone, Copy, Debug)]
pub struct EvolutionRecord<'a, T: Real> {
    pub t: usize,
    pub psi: &'a StateVector<T>,
}

fn drift_tolerance<T: Real>() -> T {
    T::lit(1e-9).max(T::epsilon() * T::lit(16.0))
}

/// Applies `U` `steps` times, calling `observer` at every `t` from 0 to
/// `steps` inclusive. Renormalizes only when the norm drifts past 1e-9.
pub fn evolve<T, F>(
    u: &FloquetOperator<T>,
    psi0: &StateVector<T>,
    steps: usize,
    mut observer: F,
) -> Result<StateVector<T>>
where
    T: Real,
    F: FnMut(EvolutionRecord<'_, T>),
{
    u.check(psi0)?;
    let tol = drift_tolerance::<T>();
    let mut psi = psi0.clone();
    observer(EvolutionRecord { t: 0, psi: &psi });
    for t in 1..=steps {
        let mut next = u.step_raw(psi.amplitudes());
        let norm = l2_norm(&next);
        if (norm - T::one()).abs() > tol {
            log::debug!("renormalizing at t={t}: norm drift {:e}", (norm - T::one()).to_f64_lossy());
            next.mapv_inplace(|c| c / norm);
        }
        psi = StateVector::from_normalized(next);
        observer(EvolutionRecord { t, psi: &psi });
    }
    Ok(psi)
}

/// `F(t) = |<psi0| U^-t U_p^t |psi0>|^2` for `t = 0..=steps`, where the
/// perturbed map shifts the kick strength to `k + delta` (perturbation
/// `delta * Jz^2 / 2J`, which commutes with `Jz`).
pub fn fidelity_series<T: Real>(
    sys: &SpinSystem<T>,
    k: T,
    delta: T,
    psi0: &StateVector<T>,
    steps: usize,
) -> Result<Vec<T>> {
    let u = FloquetOperator::new(sys, k)?;
    fidelity_series_with(sys, &u, delta, psi0, steps)
}

/// As [`fidelity_series`], reusing the rotation inside `u`.
pub fn fidelity_series_with<T: Real>(
    sys: &SpinSystem<T>,
    u: &FloquetOperator<T>,
    delta: T,
    psi0: &StateVector<T>,
    steps: usize,
) -> Result<Vec<T>> {
    if steps < 1 {
        return Err(Error::param("steps", "fidelity needs at least one step"));
    }
    if !delta.is_finite() {
        return Err(Error::param("delta", "perturbation strength must be finite"));
    }
    sys.check_dim(psi0.dim())?;
    let up = u.perturbed(sys, delta)?;
    let mut free = psi0.clone();
    let mut kicked = psi0.clone();
    let mut out = Vec::with_capacity(steps + 1);
    out.push(T::one());
    for _ in 0..steps {
        free = u.apply(&free)?;
        kicked = up.apply(&kicked)?;
        // <psi0|U^-t U_p^t|psi0> = <U^t psi0 | U_p^t psi0>
        out.push(free.inner(&kicked)?.norm_sqr());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin::{build_gcs, GcsParams};

    fn max_abs_c(a: &Array2<Complex<f64>>) -> f64 {
        a.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    fn unitarity_error(u: &Array2<Complex<f64>>) -> f64 {
        let udu = u.t().mapv(|c| c.conj()).dot(u);
        let id = Array2::from_diag_elem(u.nrows(), Complex::new(1.0, 0.0));
        max_abs_c(&(udu - id))
    }

    #[test]
    fn quarter_turn_maps_z_onto_x() {
        for j in [0.5, 1.0, 1.5, 4.0, 7.5] {
            let sys = SpinSystem::<f64>::from_j(j).unwrap();
            let r = QuarterTurn::new(&sys).unwrap().to_complex();
            let rd = r.t().mapv(|c| c.conj());
            assert!(unitarity_error(&r) < 1e-12);
            // R Jz R^dagger = Jx, R Jx R^dagger = -Jz
            let zx = r.dot(sys.jz()).dot(&rd) - sys.jx();
            assert!(max_abs_c(&zx) < 1e-10, "J={j}");
            let xz = r.dot(sys.jx()).dot(&rd) + sys.jz();
            assert!(max_abs_c(&xz) < 1e-10, "J={j}");
            // Heisenberg form: R^dagger Jz R = -Jx, R^dagger Jx R = Jz
            let h = rd.dot(sys.jz()).dot(&r) + sys.jx();
            assert!(max_abs_c(&h) < 1e-10, "J={j}");
        }
    }

    #[test]
    fn quarter_turn_matches_series_exponential() {
        // Oracle: Taylor series of exp(-i pi/2 Jy) with scaling and squaring.
        let sys = SpinSystem::<f64>::from_j(2.5).unwrap();
        let n = sys.dim();
        let gen = sys.jy().mapv(|c| c * Complex::new(0.0, -std::f64::consts::FRAC_PI_2 / 64.0));
        let mut term = Array2::from_diag_elem(n, Complex::new(1.0, 0.0));
        let mut sum = term.clone();
        for p in 1..30 {
            term = term.dot(&gen).mapv(|c| c / p as f64);
            sum += &term;
        }
        for _ in 0..6 {
            sum = sum.dot(&sum);
        }
        let r = QuarterTurn::new(&sys).unwrap().to_complex();
        assert!(max_abs_c(&(r - sum)) < 1e-11);
    }

    #[test]
    fn floquet_is_unitary() {
        let sys = SpinSystem::<f64>::from_j(6.0).unwrap();
        for k in [0.0, 1.1, -3.0, 12.0] {
            let u = FloquetOperator::new(&sys, k).unwrap();
            assert!(unitarity_error(&u.to_dense()) < 1e-10);
            assert!(u.kick_phases().iter().all(|c| (c.norm() - 1.0).abs() < 1e-12));
        }
        assert!(FloquetOperator::new(&sys, f64::NAN).is_err());
    }

    #[test]
    fn four_quarter_turns_return_up_to_sign() {
        for (j, sign) in [(1.0, 1.0), (1.5, -1.0)] {
            let sys = SpinSystem::<f64>::from_j(j).unwrap();
            let u = FloquetOperator::new(&sys, 0.0).unwrap();
            let psi = build_gcs(&sys, &GcsParams::new(0.7, -1.2).unwrap());
            let mut out = psi.clone();
            for _ in 0..4 {
                out = u.apply(&out).unwrap();
            }
            for (a, b) in out.amplitudes().iter().zip(psi.amplitudes()) {
                assert!((a - b * sign).norm() < 1e-12, "J={j}");
            }
        }
    }

    #[test]
    fn spin_half_kick_is_global_phase() {
        let sys = SpinSystem::<f64>::from_j(0.5).unwrap();
        let k = 2.3;
        let u = FloquetOperator::new(&sys, k).unwrap();
        let expect = Complex::from_polar(1.0, -k / 4.0);
        for c in u.kick_phases() {
            assert!((c - expect).norm() < 1e-15);
        }
    }

    #[test]
    fn evolve_zero_steps_and_observer_schedule() {
        let sys = SpinSystem::<f64>::from_j(3.0).unwrap();
        let u = FloquetOperator::new(&sys, 3.0).unwrap();
        let psi = build_gcs(&sys, &GcsParams::new(1.0, 0.2).unwrap());
        let mut seen = vec![];
        let out = evolve(&u, &psi, 0, |r| seen.push(r.t)).unwrap();
        assert_eq!(out, psi);
        assert_eq!(seen, vec![0]);
        seen.clear();
        evolve(&u, &psi, 5, |r| seen.push(r.t)).unwrap();
        assert_eq!(seen, vec![0, 1, 2, 3, 4, 5]);
        let other = SpinSystem::<f64>::from_j(1.0).unwrap();
        let bad = build_gcs(&other, &GcsParams::new(1.0, 0.2).unwrap());
        assert!(evolve(&u, &bad, 3, |_| {}).is_err());
    }

    #[test]
    fn kick_is_pure_phase_on_jz_eigenstates() {
        let sys = SpinSystem::<f64>::from_j(4.0).unwrap();
        let u = FloquetOperator::new(&sys, 5.0).unwrap();
        let up = u.perturbed(&sys, 0.3).unwrap();
        for i in 0..sys.dim() {
            let b = StateVector::basis_index(sys.spin(), i);
            let ov = u.apply_kick(&b).unwrap().inner(&up.apply_kick(&b).unwrap()).unwrap();
            assert!((ov.norm() - 1.0).abs() < 1e-14);
        }
        // the full period does mix m, so fidelity of a basis state decays
        let b = StateVector::basis_index(sys.spin(), 2);
        let f = fidelity_series(&sys, 5.0, 0.3, &b, 6).unwrap();
        assert!(f.iter().any(|&x| x < 1.0 - 1e-6));
    }

    #[test]
    fn fidelity_unperturbed_is_one() {
        let sys = SpinSystem::<f64>::from_j(10.0).unwrap();
        let psi = build_gcs(&sys, &GcsParams::new(2.0, 0.5).unwrap());
        let f = fidelity_series(&sys, 3.0, 0.0, &psi, 50).unwrap();
        assert_eq!(f.len(), 51);
        assert_eq!(f[0], 1.0);
        assert!(f.iter().all(|x| (x - 1.0).abs() < 1e-10));
        assert!(fidelity_series(&sys, 3.0, 0.1, &psi, 0).is_err());
    }

    #[test]
    fn rotation_keeps_coherent_states_coherent() {
        let sys = SpinSystem::<f64>::from_j(8.0).unwrap();
        let u = FloquetOperator::new(&sys, 0.0).unwrap();
        let psi = build_gcs(&sys, &GcsParams::new(0.9, 2.0).unwrap());
        evolve(&u, &psi, 10, |r| {
            let v = sys.mean_vector(r.psi).unwrap();
            let len = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            assert!((len - 8.0).abs() < 1e-10);
        })
        .unwrap();
    }
}
