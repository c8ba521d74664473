//! Classical kicked top on the unit sphere.
//!
//! The map mirrors the quantum period: a twist about `z` by angle `k z`,
//! then a quarter turn about `y`. Rotation senses are the ones that make
//! [`quantum_classical_correspondence_check`] close.

use crate::dynamics::{evolve, FloquetOperator};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::spin::{build_gcs, GcsParams, SpinSystem};

/// Below this estimate an orbit is labelled regular.
pub const REGULAR_THRESHOLD: f64 = 0.01;
/// Above this estimate an orbit is labelled chaotic.
pub const CHAOTIC_THRESHOLD: f64 = 0.1;
/// Default trajectory length for labelling.
pub const DEFAULT_LYAPUNOV_STEPS: usize = 2000;

/// Point `J / J` on the unit sphere.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClassicalState<T: Real> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Real> ClassicalState<T> {
    /// Projects `(x, y, z)` onto the sphere.
    pub fn new(x: T, y: T, z: T) -> Result<Self> {
        let s = ClassicalState { x, y, z };
        let n = s.norm();
        if !(n > T::zero()) || !n.is_finite() {
            return Err(Error::param("state", "classical state needs a nonzero finite vector"));
        }
        Ok(s.scaled(T::one() / n))
    }

    pub fn from_angles(theta: T, phi: T) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        ClassicalState {
            x: st * cp,
            y: st * sp,
            z: ct,
        }
    }

    pub fn from_gcs(p: &GcsParams<T>) -> Self {
        Self::from_angles(p.theta(), p.phi())
    }

    /// Polar and azimuthal angles of the point.
    pub fn to_gcs(&self) -> GcsParams<T> {
        let theta = self.z.max(-T::one()).min(T::one()).acos();
        let phi = self.y.atan2(self.x);
        GcsParams::new(theta, phi).expect("angles from a unit vector are in range")
    }

    pub fn norm(&self) -> T {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn as_array(&self) -> [T; 3] {
        [self.x, self.y, self.z]
    }

    fn scaled(self, f: T) -> Self {
        ClassicalState {
            x: self.x * f,
            y: self.y * f,
            z: self.z * f,
        }
    }

    fn distance(&self, o: &Self) -> T {
        let (dx, dy, dz) = (self.x - o.x, self.y - o.y, self.z - o.z);
        (dx * dx + dy * dy + dz * dz).sqrt()
    }
}

/// One classical period: twist by `k z` about `z`, then the quarter turn
/// `(x, y, z) -> (z, y, -x)`.
pub fn classical_step<T: Real>(s: &ClassicalState<T>, k: T) -> ClassicalState<T> {
    let (sn, cs) = (k * s.z).sin_cos();
    let x = s.x * cs - s.y * sn;
    let y = s.x * sn + s.y * cs;
    let z = s.z;
    let out = ClassicalState { x: z, y, z: -x };
    out.scaled(T::one() / out.norm())
}

/// Mean log stretching per kick from two trajectories started `1e-8` apart,
/// with the separation rescaled every step.
pub fn lyapunov_estimate<T: Real>(s0: &ClassicalState<T>, k: T, steps: usize) -> Result<T> {
    if steps < 100 {
        return Err(Error::param("steps", format!("need at least 100 steps, got {steps}")));
    }
    let d0 = T::lit(1e-8).max(T::epsilon().sqrt() * T::lit(4.0));
    let mut a = *s0;
    let tangent = tangent_direction(&a);
    let mut b = ClassicalState {
        x: a.x + d0 * tangent[0],
        y: a.y + d0 * tangent[1],
        z: a.z + d0 * tangent[2],
    };
    b = b.scaled(T::one() / b.norm());
    let mut total = T::zero();
    for _ in 0..steps {
        a = classical_step(&a, k);
        b = classical_step(&b, k);
        let d = a.distance(&b);
        if !(d > T::zero()) {
            // trajectories merged numerically; no stretching this step
            b = offset(&a, d0);
            continue;
        }
        total += (d / d0).ln();
        let f = d0 / d;
        b = ClassicalState {
            x: a.x + (b.x - a.x) * f,
            y: a.y + (b.y - a.y) * f,
            z: a.z + (b.z - a.z) * f,
        };
        b = b.scaled(T::one() / b.norm());
    }
    Ok(total / T::from_usize_lossy(steps))
}

fn tangent_direction<T: Real>(s: &ClassicalState<T>) -> [T; 3] {
    // cross with z, or with x near the poles
    let (ax, ay, az) = if s.z.abs() < T::lit(0.9) {
        (T::zero(), T::zero(), T::one())
    } else {
        (T::one(), T::zero(), T::zero())
    };
    let c = [s.y * az - s.z * ay, s.z * ax - s.x * az, s.x * ay - s.y * ax];
    let n = (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt();
    [c[0] / n, c[1] / n, c[2] / n]
}

fn offset<T: Real>(s: &ClassicalState<T>, d: T) -> ClassicalState<T> {
    let t = tangent_direction(s);
    let b = ClassicalState {
        x: s.x + d * t[0],
        y: s.y + d * t[1],
        z: s.z + d * t[2],
    };
    b.scaled(T::one() / b.norm())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ChaosLabel {
    Regular,
    Edge,
    Chaotic,
}

impl ChaosLabel {
    pub fn from_lyapunov<T: Real>(lyapunov: T) -> Self {
        let l = lyapunov.to_f64_lossy();
        if l < REGULAR_THRESHOLD {
            ChaosLabel::Regular
        } else if l > CHAOTIC_THRESHOLD {
            ChaosLabel::Chaotic
        } else {
            ChaosLabel::Edge
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ChaosLabel::Regular => "regular",
            ChaosLabel::Edge => "edge",
            ChaosLabel::Chaotic => "chaotic",
        }
    }
}

/// Lyapunov estimate together with its label.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Classification<T: Real> {
    pub lyapunov: T,
    pub label: ChaosLabel,
}

pub fn classify<T: Real>(s0: &ClassicalState<T>, k: T, steps: usize) -> Result<Classification<T>> {
    let lyapunov = lyapunov_estimate(s0, k, steps)?;
    Ok(Classification {
        lyapunov,
        label: ChaosLabel::from_lyapunov(lyapunov),
    })
}

/// Deterministic quasi-uniform sphere lattice (golden-angle spiral).
pub fn fibonacci_sphere<T: Real>(count: usize) -> Vec<ClassicalState<T>> {
    let golden = T::PI() * (T::lit(3.0) - T::lit(5.0).sqrt());
    let n = T::from_usize_lossy(count);
    (0..count)
        .map(|i| {
            let fi = T::from_usize_lossy(i);
            let z = T::one() - (T::lit(2.0) * fi + T::one()) / n;
            let r = (T::one() - z * z).max(T::zero()).sqrt();
            let (sp, cp) = (fi * golden).sin_cos();
            ClassicalState { x: r * cp, y: r * sp, z }
        })
        .collect()
}

/// Fraction of `points` labelled chaotic at kick strength `k`.
pub fn chaotic_fraction<T: Real>(points: &[ClassicalState<T>], k: T, steps: usize) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::param("points", "need at least one point"));
    }
    let mut chaotic = 0usize;
    for p in points {
        if classify(p, k, steps)?.label == ChaosLabel::Chaotic {
            chaotic += 1;
        }
    }
    Ok(chaotic as f64 / points.len() as f64)
}

/// Largest distance over `t <= steps` between the normalized quantum mean
/// spin of an evolved coherent state and the classical trajectory from the
/// same point.
pub fn quantum_classical_correspondence_check<T: Real>(
    sys: &SpinSystem<T>,
    p: &GcsParams<T>,
    k: T,
    steps: usize,
) -> Result<T> {
    let u = FloquetOperator::new(sys, k)?;
    correspondence_with(sys, &u, p, steps)
}

/// As [`quantum_classical_correspondence_check`] with a prebuilt operator.
pub fn correspondence_with<T: Real>(
    sys: &SpinSystem<T>,
    u: &FloquetOperator<T>,
    p: &GcsParams<T>,
    steps: usize,
) -> Result<T> {
    let psi = build_gcs(sys, p);
    let j = sys.j();
    let mut classical = ClassicalState::from_gcs(p);
    let mut worst = T::zero();
    let mut failure = None;
    evolve(u, &psi, steps, |rec| {
        if rec.t > 0 {
            classical = classical_step(&classical, u.k());
        }
        match sys.mean_vector(rec.psi) {
            Ok(v) => {
                let q = ClassicalState {
                    x: v[0] / j,
                    y: v[1] / j,
                    z: v[2] / j,
                };
                worst = worst.max(q.distance(&classical));
            }
            Err(e) => failure = Some(e),
        }
    })?;
    match failure {
        Some(e) => Err(e),
        None => Ok(worst),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &ClassicalState<f64>, b: [f64; 3], tol: f64) -> bool {
        (a.x - b[0]).abs() < tol && (a.y - b[1]).abs() < tol && (a.z - b[2]).abs() < tol
    }

    #[test]
    fn quarter_turn_moves_north_pole_to_x() {
        let n = ClassicalState::new(0.0, 0.0, 1.0).unwrap();
        let one = classical_step(&n, 0.0);
        assert!(close(&one, [1.0, 0.0, 0.0], 1e-15));
        let two = classical_step(&one, 0.0);
        assert!(close(&two, [0.0, 0.0, -1.0], 1e-15));
    }

    #[test]
    fn pure_rotation_has_period_four() {
        let s0 = ClassicalState::from_angles(1.234, -0.77);
        let mut s = s0;
        for _ in 0..4 {
            s = classical_step(&s, 0.0);
        }
        assert!(close(&s, s0.as_array(), 1e-12));
    }

    #[test]
    fn norm_is_preserved() {
        let mut s = ClassicalState::<f64>::from_angles(0.3, 2.0);
        for _ in 0..100_000 {
            s = classical_step(&s, 4.5);
        }
        assert!((s.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn labels_follow_thresholds() {
        assert_eq!(ChaosLabel::from_lyapunov(0.001), ChaosLabel::Regular);
        assert_eq!(ChaosLabel::from_lyapunov(0.05), ChaosLabel::Edge);
        assert_eq!(ChaosLabel::from_lyapunov(0.5), ChaosLabel::Chaotic);
        assert!(lyapunov_estimate(&ClassicalState::from_angles(1.0, 0.0), 3.0, 99).is_err());
    }

    #[test]
    fn fibonacci_points_are_unit_and_balanced() {
        let pts = fibonacci_sphere::<f64>(200);
        assert_eq!(pts.len(), 200);
        assert!(pts.iter().all(|p| (p.norm() - 1.0).abs() < 1e-12));
        let mean_z: f64 = pts.iter().map(|p| p.z).sum::<f64>() / 200.0;
        assert!(mean_z.abs() < 1e-12);
        let g = pts[17].to_gcs();
        assert!(close(&ClassicalState::from_gcs(&g), pts[17].as_array(), 1e-12));
    }
}
