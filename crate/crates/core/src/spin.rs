//! Spin-J representation of su(2): angular momentum matrices, states and
//! spin coherent states.
//!
//! Basis layout: index `i` holds the `Jz` eigenstate with `m = J - i`, so the
//! highest-weight state `|J, J>` is basis vector 0.

use std::fmt;

use ndarray::{Array1, Array2};
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{ln_binomial, Real};

/// Spin quantum number, stored as the integer `2J` so half-integers are exact.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Spin(u32);

impl Spin {
    /// Spin from `2J`. Rejects zero.
    pub fn from_twice(twice: u32) -> Result<Self> {
        if twice == 0 {
            return Err(Error::InvalidSpin(0.0));
        }
        Ok(Spin(twice))
    }

    /// Spin from a real value; `2J` must be a positive integer.
    pub fn new(j: f64) -> Result<Self> {
        let twice = 2.0 * j;
        if !twice.is_finite() || twice < 0.5 || (twice - twice.round()).abs() > 1e-9 {
            return Err(Error::InvalidSpin(j));
        }
        Self::from_twice(twice.round() as u32)
    }

    pub fn twice(self) -> u32 {
        self.0
    }

    /// Hilbert-space dimension `N = 2J + 1`.
    pub fn dim(self) -> usize {
        self.0 as usize + 1
    }

    pub fn as_f64(self) -> f64 {
        f64::from(self.0) / 2.0
    }

    pub fn value<T: Real>(self) -> T {
        T::from_u32(self.0).unwrap() / T::lit(2.0)
    }

    /// `m` eigenvalue carried by basis index `i`.
    pub fn m_at<T: Real>(self, i: usize) -> T {
        self.value::<T>() - T::from_usize_lossy(i)
    }

    /// Basis index of the `Jz` eigenvalue `m`, if it exists.
    pub fn index_of(self, m: f64) -> Option<usize> {
        let idx = self.as_f64() - m;
        let r = idx.round();
        if (idx - r).abs() > 1e-9 || r < 0.0 || r as usize >= self.dim() {
            None
        } else {
            Some(r as usize)
        }
    }
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

/// Cartesian component of the angular momentum vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];
}

/// Spin-J irreducible representation with dense `Jx`, `Jy`, `Jz` matrices.
///
/// Immutable after construction.
#[derive(Clone, Debug)]
pub struct SpinSystem<T: Real> {
    spin: Spin,
    m: Vec<T>,
    /// `ladder[i] = <m_i + 1| J+ |m_i>`; `ladder[0] = 0`.
    ladder: Vec<T>,
    jx: Array2<Complex<T>>,
    jy: Array2<Complex<T>>,
    jz: Array2<Complex<T>>,
}

impl<T: Real> SpinSystem<T> {
    pub fn new(spin: Spin) -> Self {
        let n = spin.dim();
        let m: Vec<T> = (0..n).map(|i| spin.m_at(i)).collect();
        // (J - m)(J + m + 1) = i (N - i) with m = J - i.
        let ladder: Vec<T> = (0..n)
            .map(|i| T::from_usize_lossy(i * (n - i)).sqrt())
            .collect();

        let zero = Complex::new(T::zero(), T::zero());
        let half = T::lit(0.5);
        let mut jx = Array2::from_elem((n, n), zero);
        let mut jy = Array2::from_elem((n, n), zero);
        let mut jz = Array2::from_elem((n, n), zero);
        for i in 0..n {
            jz[[i, i]] = Complex::new(m[i], T::zero());
        }
        for i in 1..n {
            let c = ladder[i] * half;
            // J+ sits above the diagonal at (i - 1, i).
            jx[[i - 1, i]] = Complex::new(c, T::zero());
            jx[[i, i - 1]] = Complex::new(c, T::zero());
            jy[[i - 1, i]] = Complex::new(T::zero(), -c);
            jy[[i, i - 1]] = Complex::new(T::zero(), c);
        }
        SpinSystem {
            spin,
            m,
            ladder,
            jx,
            jy,
            jz,
        }
    }

    /// Convenience constructor from a real `J`.
    pub fn from_j(j: f64) -> Result<Self> {
        Ok(Self::new(Spin::new(j)?))
    }

    pub fn spin(&self) -> Spin {
        self.spin
    }

    pub fn j(&self) -> T {
        self.spin.value()
    }

    pub fn dim(&self) -> usize {
        self.spin.dim()
    }

    /// `Jz` eigenvalues in basis order.
    pub fn m_values(&self) -> &[T] {
        &self.m
    }

    pub fn ladder_coefficients(&self) -> &[T] {
        &self.ladder
    }

    pub fn component(&self, axis: Axis) -> &Array2<Complex<T>> {
        match axis {
            Axis::X => &self.jx,
            Axis::Y => &self.jy,
            Axis::Z => &self.jz,
        }
    }

    pub fn jx(&self) -> &Array2<Complex<T>> {
        &self.jx
    }

    pub fn jy(&self) -> &Array2<Complex<T>> {
        &self.jy
    }

    pub fn jz(&self) -> &Array2<Complex<T>> {
        &self.jz
    }

    /// `J(J + 1)`, the Casimir eigenvalue.
    pub fn casimir(&self) -> T {
        let j = self.j();
        j * (j + T::one())
    }

    pub(crate) fn check_dim(&self, found: usize) -> Result<()> {
        if found != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found,
            });
        }
        Ok(())
    }

    /// `J_axis |psi>` using the tridiagonal structure, O(N).
    pub fn apply(&self, axis: Axis, psi: &StateVector<T>) -> Result<Array1<Complex<T>>> {
        self.check_dim(psi.dim())?;
        Ok(self.apply_raw(axis, psi.amplitudes()))
    }

    /// As [`SpinSystem::apply`] on a raw amplitude vector (no normalization).
    pub fn apply_vec(&self, axis: Axis, a: &Array1<Complex<T>>) -> Result<Array1<Complex<T>>> {
        self.check_dim(a.len())?;
        Ok(self.apply_raw(axis, a))
    }

    pub(crate) fn apply_raw(&self, axis: Axis, a: &Array1<Complex<T>>) -> Array1<Complex<T>> {
        let n = self.dim();
        let half = T::lit(0.5);
        match axis {
            Axis::Z => Array1::from_shape_fn(n, |i| a[i] * self.m[i]),
            Axis::X | Axis::Y => Array1::from_shape_fn(n, |i| {
                // raise: c_{i+1} a_{i+1}, lower: c_i a_{i-1}
                let up = if i + 1 < n {
                    a[i + 1] * self.ladder[i + 1]
                } else {
                    Complex::new(T::zero(), T::zero())
                };
                let down = if i > 0 {
                    a[i - 1] * self.ladder[i]
                } else {
                    Complex::new(T::zero(), T::zero())
                };
                match axis {
                    Axis::X => (up + down) * half,
                    // (up - down) / (2i) = -i (up - down) / 2
                    _ => {
                        let d = up - down;
                        Complex::new(d.im, -d.re) * half
                    }
                }
            }),
        }
    }

    /// `<psi| J_axis |psi>` via the tridiagonal structure.
    pub(crate) fn mean_raw(&self, axis: Axis, a: &Array1<Complex<T>>) -> T {
        match axis {
            Axis::Z => a
                .iter()
                .zip(&self.m)
                .map(|(c, &m)| c.norm_sqr() * m)
                .sum(),
            Axis::X | Axis::Y => {
                // <J+> = sum_i conj(a_{i-1}) c_i a_i; Jx = Re, Jy = Im.
                let mut acc = Complex::new(T::zero(), T::zero());
                for i in 1..a.len() {
                    acc += a[i - 1].conj() * a[i] * self.ladder[i];
                }
                if axis == Axis::X {
                    acc.re
                } else {
                    acc.im
                }
            }
        }
    }

    /// `<psi| J_axis^2 |psi> = || J_axis psi ||^2`.
    pub(crate) fn second_moment_raw(&self, axis: Axis, a: &Array1<Complex<T>>) -> T {
        match axis {
            Axis::Z => a
                .iter()
                .zip(&self.m)
                .map(|(c, &m)| c.norm_sqr() * m * m)
                .sum(),
            _ => self.apply_raw(axis, a).iter().map(|c| c.norm_sqr()).sum(),
        }
    }

    /// Fast `<J_axis>`.
    pub fn mean(&self, axis: Axis, psi: &StateVector<T>) -> Result<T> {
        self.check_dim(psi.dim())?;
        Ok(self.mean_raw(axis, psi.amplitudes()))
    }

    /// Mean spin vector `(<Jx>, <Jy>, <Jz>)`.
    pub fn mean_vector(&self, psi: &StateVector<T>) -> Result<[T; 3]> {
        self.check_dim(psi.dim())?;
        let a = psi.amplitudes();
        Ok([
            self.mean_raw(Axis::X, a),
            self.mean_raw(Axis::Y, a),
            self.mean_raw(Axis::Z, a),
        ])
    }
}

/// Normalized pure state in the `Jz` eigenbasis.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector<T: Real> {
    amps: Array1<Complex<T>>,
}

impl<T: Real> StateVector<T> {
    /// Normalizes the given amplitudes. Fails on an empty or zero vector.
    pub fn new(amps: Array1<Complex<T>>) -> Result<Self> {
        let norm = l2_norm(&amps);
        if amps.is_empty() || !(norm > T::zero()) || !norm.is_finite() {
            return Err(Error::ZeroNorm);
        }
        Ok(StateVector {
            amps: amps.mapv(|c| c / norm),
        })
    }

    pub(crate) fn from_normalized(amps: Array1<Complex<T>>) -> Self {
        StateVector { amps }
    }

    /// `Jz` eigenstate `|J, m>`.
    pub fn basis(spin: Spin, m: f64) -> Result<Self> {
        let idx = spin
            .index_of(m)
            .ok_or_else(|| Error::param("m", format!("{m} is not a valid projection for J = {spin}")))?;
        Ok(Self::basis_index(spin, idx))
    }

    /// Basis vector at index `i` (`m = J - i`). Panics if out of range.
    pub fn basis_index(spin: Spin, i: usize) -> Self {
        let mut amps = Array1::from_elem(spin.dim(), Complex::new(T::zero(), T::zero()));
        amps[i] = Complex::new(T::one(), T::zero());
        StateVector { amps }
    }

    pub fn amplitudes(&self) -> &Array1<Complex<T>> {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Array1<Complex<T>> {
        self.amps
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn norm(&self) -> T {
        l2_norm(&self.amps)
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector<T>) -> Result<Complex<T>> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(other.amps.iter())
            .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| {
                acc + a.conj() * b
            }))
    }
}

pub(crate) fn l2_norm<T: Real>(a: &Array1<Complex<T>>) -> T {
    a.iter().map(|c| c.norm_sqr()).sum::<T>().sqrt()
}

/// Center `(theta, phi)` of a spin coherent state on the unit sphere.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GcsParams<T: Real> {
    theta: T,
    phi: T,
}

impl<T: Real> GcsParams<T> {
    /// `theta` in `[0, pi]`, `phi` in `[-pi, pi]`.
    pub fn new(theta: T, phi: T) -> Result<Self> {
        let pi = T::PI();
        if !(theta >= T::zero() && theta <= pi) {
            return Err(Error::param("theta", format!("{theta} outside [0, pi]")));
        }
        if !(phi >= -pi && phi <= pi) {
            return Err(Error::param("phi", format!("{phi} outside [-pi, pi]")));
        }
        Ok(GcsParams { theta, phi })
    }

    pub fn theta(&self) -> T {
        self.theta
    }

    pub fn phi(&self) -> T {
        self.phi
    }

    /// `n = (sin theta cos phi, sin theta sin phi, cos theta)`.
    pub fn direction(&self) -> [T; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }
}

/// Spin coherent state satisfying `(n . J)|psi> = J |psi>`.
///
/// Amplitudes are assembled in log space,
/// `ln|a_m| = ln C(2J, J+m)/2 + (J+m) ln cos(theta/2) + (J-m) ln sin(theta/2)`,
/// with phase `e^{i (J-m) phi}`, so nothing overflows at large `J`.
pub fn build_gcs<T: Real>(sys: &SpinSystem<T>, p: &GcsParams<T>) -> StateVector<T> {
    let spin = sys.spin();
    let twice = spin.twice();
    let half_theta = p.theta() * T::lit(0.5);
    let (s, c) = half_theta.sin_cos();
    let ln_c = c.ln();
    let ln_s = s.ln();
    let amps = Array1::from_shape_fn(sys.dim(), |i| {
        // J + m = 2J - i, J - m = i
        let up = twice as usize - i;
        let down = i;
        let mut log_mag = T::lit(0.5 * ln_binomial(twice, i as u32));
        if up > 0 {
            log_mag += T::from_usize_lossy(up) * ln_c;
        }
        if down > 0 {
            log_mag += T::from_usize_lossy(down) * ln_s;
        }
        let mag = if log_mag.is_finite() {
            log_mag.exp()
        } else {
            T::zero()
        };
        Complex::from_polar(mag, T::from_usize_lossy(i) * p.phi())
    });
    // Re-normalize to absorb log-gamma roundoff.
    StateVector::new(amps).expect("coherent state has a nonzero amplitude")
}

/// `<psi|A|psi>` for a dense Hermitian `A`.
///
/// The imaginary residue is checked against a relative tolerance and dropped.
pub fn expectation<T: Real>(
    sys: &SpinSystem<T>,
    a: &Array2<Complex<T>>,
    psi: &StateVector<T>,
) -> Result<T> {
    let n = sys.dim();
    if a.nrows() != n || a.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: a.nrows().max(a.ncols()),
        });
    }
    sys.check_dim(psi.dim())?;
    let v = psi.amplitudes();
    let av = a.dot(v);
    let z = v
        .iter()
        .zip(av.iter())
        .fold(Complex::new(T::zero(), T::zero()), |acc, (x, y)| {
            acc + x.conj() * y
        });
    let tol = hermitian_tolerance::<T>() * T::one().max(z.re.abs());
    if z.im.abs() > tol {
        return Err(Error::NonHermitian(z.im.to_f64_lossy()));
    }
    Ok(z.re)
}

fn hermitian_tolerance<T: Real>() -> T {
    T::lit(1e-10).max(T::epsilon() * T::lit(1e3))
}
