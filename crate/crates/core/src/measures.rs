//! Generalized-entanglement purities, extents and random-state baselines.

use ndarray::{Array1, Array2};
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::spin::{expectation, Axis, Spin, SpinSystem, StateVector};

/// Purities, extents and total variance of one state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeRecord<T: Real> {
    pub p_su2: T,
    pub ge_su2: T,
    pub p_so2: T,
    pub ge_so2: T,
    pub ext_x: T,
    pub ext_y: T,
    pub ext_z: T,
    pub inv_uncertainty: T,
}

impl<T: Real> GeRecord<T> {
    /// Measures `psi` using the O(N) tridiagonal structure of the spin matrices.
    pub fn measure(sys: &SpinSystem<T>, psi: &StateVector<T>) -> Result<Self> {
        sys.check_dim(psi.dim())?;
        let a = psi.amplitudes();
        let j2 = sys.j() * sys.j();
        let mut means = [T::zero(); 3];
        let mut ext = [T::zero(); 3];
        for (slot, axis) in Axis::ALL.into_iter().enumerate() {
            let mean = sys.mean_raw(axis, a);
            let second = sys.second_moment_raw(axis, a);
            means[slot] = mean;
            ext[slot] = clamp_variance(second - mean * mean, second)?.sqrt();
        }
        let p_su2 = means.iter().map(|&v| v * v).sum::<T>() / j2;
        let p_so2 = means[2] * means[2] / j2;
        Ok(GeRecord {
            p_su2,
            ge_su2: T::one() - p_su2,
            p_so2,
            ge_so2: T::one() - p_so2,
            ext_x: ext[0],
            ext_y: ext[1],
            ext_z: ext[2],
            inv_uncertainty: ext.iter().map(|&e| e * e).sum(),
        })
    }

    /// `|GE_su2 - (sum_l (Delta J_l / J)^2 - 1/J)|` from the stored fields.
    pub fn identity_residual(&self, j: T) -> T {
        let spread = (self.ext_x * self.ext_x + self.ext_y * self.ext_y + self.ext_z * self.ext_z)
            / (j * j);
        (self.ge_su2 - (spread - T::one() / j)).abs()
    }
}

/// Negative variances down to `-1e-12` (relative to the second moment) are
/// roundoff and become zero; anything lower is reported.
fn clamp_variance<T: Real>(var: T, second: T) -> Result<T> {
    if var >= T::zero() {
        return Ok(var);
    }
    let tol = T::lit(1e-12).max(T::epsilon() * T::lit(64.0)) * T::one().max(second.abs());
    if -var <= tol {
        Ok(T::zero())
    } else {
        Err(Error::NegativeVariance(var.to_f64_lossy()))
    }
}

/// `(<Jx>^2 + <Jy>^2 + <Jz>^2) / J^2`.
pub fn purity_su2<T: Real>(sys: &SpinSystem<T>, psi: &StateVector<T>) -> Result<T> {
    let v = sys.mean_vector(psi)?;
    let j = sys.j();
    Ok((v[0] * v[0] + v[1] * v[1] + v[2] * v[2]) / (j * j))
}

/// `<Jz>^2 / J^2`.
pub fn purity_so2<T: Real>(sys: &SpinSystem<T>, psi: &StateVector<T>) -> Result<T> {
    let z = sys.mean(Axis::Z, psi)?;
    let j = sys.j();
    Ok(z * z / (j * j))
}

/// `sqrt(<A^2> - <A>^2)` for a dense Hermitian `A`.
pub fn extent<T: Real>(
    sys: &SpinSystem<T>,
    a: &Array2<Complex<T>>,
    psi: &StateVector<T>,
) -> Result<T> {
    let mean = expectation(sys, a, psi)?;
    let av = a.dot(psi.amplitudes());
    let second: T = av.iter().map(|c| c.norm_sqr()).sum();
    Ok(clamp_variance(second - mean * mean, second)?.sqrt())
}

/// Extent of one spin component, O(N).
pub fn axis_extent<T: Real>(sys: &SpinSystem<T>, axis: Axis, psi: &StateVector<T>) -> Result<T> {
    sys.check_dim(psi.dim())?;
    let a = psi.amplitudes();
    let mean = sys.mean_raw(axis, a);
    let second = sys.second_moment_raw(axis, a);
    Ok(clamp_variance(second - mean * mean, second)?.sqrt())
}

/// Total variance `sum_l (Delta J_l)^2`; equals `J(J+1) - sum_l <J_l>^2`.
pub fn invariant_uncertainty<T: Real>(sys: &SpinSystem<T>, psi: &StateVector<T>) -> Result<T> {
    Ok(GeRecord::measure(sys, psi)?.inv_uncertainty)
}

/// `|(1 - P_su2) - (sum_l Delta(J_l / J)^2 - 1/J)|`.
pub fn ge_extent_identity_residual<T: Real>(
    sys: &SpinSystem<T>,
    psi: &StateVector<T>,
) -> Result<T> {
    Ok(GeRecord::measure(sys, psi)?.identity_residual(sys.j()))
}

/// Mean su(2) generalized entanglement of Haar-random states, `1 - 1/(2J)`.
pub fn rmt_average_ge<T: Real>(spin: Spin) -> T {
    T::one() - T::one() / (T::lit(2.0) * spin.value::<T>())
}

/// Haar-random pure state drawn from a caller-owned RNG.
pub fn haar_random_state_with<T: Real, R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<StateVector<T>> {
    if dim == 0 {
        return Err(Error::param("dim", "dimension must be at least 1"));
    }
    let amps = Array1::from_shape_fn(dim, |_| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex::new(T::lit(re), T::lit(im))
    });
    StateVector::new(amps)
}

/// Haar-random pure state; deterministic for a given seed.
pub fn haar_random_state<T: Real>(dim: usize, seed: u64) -> Result<StateVector<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    haar_random_state_with(dim, &mut rng)
}

/// Predicted and sampled mean GE over Haar-random states.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RmtBaseline<T: Real> {
    pub spin: Spin,
    pub mean_ge: T,
    pub sample_mean: T,
    pub sample_stderr: T,
    pub samples: usize,
}

impl<T: Real> RmtBaseline<T> {
    /// `|sample_mean - mean_ge|` in units of the standard error.
    pub fn z_score(&self) -> T {
        if self.sample_stderr > T::zero() {
            (self.sample_mean - self.mean_ge).abs() / self.sample_stderr
        } else {
            T::infinity()
        }
    }
}

pub fn haar_baseline<T: Real>(sys: &SpinSystem<T>, samples: usize, seed: u64) -> Result<RmtBaseline<T>> {
    if samples < 2 {
        return Err(Error::param("samples", "need at least two samples"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ge = Vec::with_capacity(samples);
    for _ in 0..samples {
        let psi = haar_random_state_with(sys.dim(), &mut rng)?;
        ge.push(T::one() - purity_su2(sys, &psi)?);
    }
    let n = T::from_usize_lossy(samples);
    let mean = ge.iter().copied().sum::<T>() / n;
    let var = ge.iter().map(|&g| (g - mean) * (g - mean)).sum::<T>() / (n - T::one());
    Ok(RmtBaseline {
        spin: sys.spin(),
        mean_ge: rmt_average_ge(sys.spin()),
        sample_mean: mean,
        sample_stderr: (var / n).sqrt(),
        samples,
    })
}

/// Largest `2J` accepted by the qubit embedding.
pub const MEYER_WALLACH_MAX_QUBITS: u32 = 10;

/// Meyer-Wallach global entanglement `Q = 2 (1 - mean_k Tr rho_k^2)` of the
/// state embedded in the symmetric subspace of `2J` qubits.
pub fn meyer_wallach<T: Real>(sys: &SpinSystem<T>, psi: &StateVector<T>) -> Result<T> {
    let qubits = sys.spin().twice();
    if qubits > MEYER_WALLACH_MAX_QUBITS {
        return Err(Error::param(
            "J",
            format!("qubit embedding limited to 2J <= {MEYER_WALLACH_MAX_QUBITS}, got 2J = {qubits}"),
        ));
    }
    sys.check_dim(psi.dim())?;
    let full = embed_symmetric(psi, qubits);
    let n = qubits as usize;
    let mut purity_sum = T::zero();
    for q in 0..n {
        let rho = single_qubit_reduced(&full, q);
        let tr2 = rho[0][0].norm_sqr()
            + rho[1][1].norm_sqr()
            + T::lit(2.0) * rho[0][1].norm_sqr();
        purity_sum += tr2;
    }
    Ok(T::lit(2.0) * (T::one() - purity_sum / T::from_usize_lossy(n)))
}

/// `|Q_MW - GE_su2|`; zero when the two entanglement measures agree.
pub fn meyer_wallach_crosscheck<T: Real>(sys: &SpinSystem<T>, psi: &StateVector<T>) -> Result<T> {
    let q = meyer_wallach(sys, psi)?;
    Ok((q - (T::one() - purity_su2(sys, psi)?)).abs())
}

/// Dicke embedding: `|J, m>` becomes the uniform superposition of bit strings
/// with `J + m` ones.
fn embed_symmetric<T: Real>(psi: &StateVector<T>, qubits: u32) -> Vec<Complex<T>> {
    let n = qubits as usize;
    let binom: Vec<f64> = (0..=n)
        .map(|k| crate::scalar::ln_binomial(qubits, k as u32).exp())
        .collect();
    (0..1usize << n)
        .map(|bits| {
            let ones = bits.count_ones() as usize;
            psi.amplitudes()[n - ones] / T::lit(binom[ones].sqrt())
        })
        .collect()
}

fn single_qubit_reduced<T: Real>(full: &[Complex<T>], qubit: usize) -> [[Complex<T>; 2]; 2] {
    let zero = Complex::new(T::zero(), T::zero());
    let mut rho = [[zero; 2]; 2];
    let mask = 1usize << qubit;
    for (idx, amp) in full.iter().enumerate() {
        if idx & mask != 0 {
            continue;
        }
        let a0 = *amp;
        let a1 = full[idx | mask];
        rho[0][0] += a0 * a0.conj();
        rho[1][1] += a1 * a1.conj();
        rho[0][1] += a0 * a1.conj();
        rho[1][0] += a1 * a0.conj();
    }
    rho
}
