//! Adaptive Dormand–Prince 5(4) integration of complex first-order systems
//! along a parametrized path in the complex plane.

use num_complex::Complex64;

use super::Tolerances;
use crate::error::{Error, Result};

/// A curve θ ↦ z(θ), θ ∈ [0, Θ].
pub trait Path {
    fn point(&self, theta: f64) -> Complex64;
    /// dz/dθ.
    fn tangent(&self, theta: f64) -> Complex64;
    /// Θ, the end of the parameter range.
    fn length(&self) -> f64;
}

/// Straight segment parametrized by arc length.
#[derive(Debug, Clone, Copy)]
pub struct Segment {
    pub from: Complex64,
    pub to: Complex64,
}

impl Path for Segment {
    fn point(&self, theta: f64) -> Complex64 {
        self.from + self.tangent(theta) * theta
    }
    fn tangent(&self, _theta: f64) -> Complex64 {
        (self.to - self.from) / self.length()
    }
    fn length(&self) -> f64 {
        (self.to - self.from).norm()
    }
}

/// Circular arc `center + radius·e^{i(start ± θ)}`, θ ∈ [0, |sweep|].
#[derive(Debug, Clone, Copy)]
pub struct Arc {
    pub center: Complex64,
    pub radius: f64,
    pub start: f64,
    pub sweep: f64,
}

impl Arc {
    /// The unit circle traversed once counter-clockwise from z = 1.
    pub fn unit_circle() -> Self {
        Arc {
            center: Complex64::ZERO,
            radius: 1.0,
            start: 0.0,
            sweep: 2.0 * std::f64::consts::PI,
        }
    }

    fn angle(&self, theta: f64) -> f64 {
        self.start + self.sweep.signum() * theta
    }
}

impl Path for Arc {
    fn point(&self, theta: f64) -> Complex64 {
        self.center + Complex64::from_polar(self.radius, self.angle(theta))
    }
    fn tangent(&self, theta: f64) -> Complex64 {
        Complex64::i() * self.sweep.signum() * Complex64::from_polar(self.radius, self.angle(theta))
    }
    fn length(&self) -> f64 {
        self.sweep.abs()
    }
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// 5th-order minus embedded 4th-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;
const BETA: f64 = 0.04;
const ALPHA: f64 = 0.2 - 0.75 * BETA;

/// Integrates `dy/dz = field(z, y)` along `path` from θ = 0 to Θ, returning
/// the state at the end point.
///
/// Step control is the PI controller of Hairer–Wanner with the error measured
/// against `ode_abs + ode_rel·|y|` per component. The step sequence depends
/// only on the inputs.
pub fn integrate_path<F, P>(field: F, path: &P, ic: &[Complex64], tol: &Tolerances) -> Result<Vec<Complex64>>
where
    F: Fn(Complex64, &[Complex64]) -> Vec<Complex64>,
    P: Path + ?Sized,
{
    let total = path.length();
    let dim = ic.len();
    let rhs = |theta: f64, y: &[Complex64]| -> Vec<Complex64> {
        let dz = path.tangent(theta);
        field(path.point(theta), y).into_iter().map(|v| v * dz).collect()
    };
    let mut y = ic.to_vec();
    if total == 0.0 {
        return Ok(y);
    }
    let h_min = 1e-13 * total;
    let mut theta = 0.0;
    let mut h = (total * 1e-3).min(0.01);
    let mut err_prev: f64 = 1e-4;
    let mut k: Vec<Vec<Complex64>> = vec![rhs(0.0, &y)];
    let mut stage = vec![Complex64::ZERO; dim];

    while theta < total {
        let last = theta + h >= total;
        if last {
            h = total - theta;
        }
        k.truncate(1);
        for s in 1..7 {
            for (i, st) in stage.iter_mut().enumerate() {
                let mut acc = y[i];
                for (j, kj) in k.iter().enumerate() {
                    acc += kj[i] * (A[s][j] * h);
                }
                *st = acc;
            }
            k.push(rhs(theta + C[s] * h, &stage));
        }
        // stage now holds the 5th-order solution (FSAL row)
        let mut err = 0.0;
        for i in 0..dim {
            let mut e = Complex64::ZERO;
            for (j, kj) in k.iter().enumerate() {
                e += kj[i] * E[j];
            }
            let scale = tol.ode_abs + tol.ode_rel * y[i].norm().max(stage[i].norm());
            err += ((e * h).norm() / scale).powi(2);
        }
        let err = (err / dim as f64).sqrt();

        if err <= 1.0 {
            theta = if last { total } else { theta + h };
            y.copy_from_slice(&stage);
            let fsal = k.pop().expect("seven stages");
            k[0] = fsal;
            let fac = SAFETY * err.max(1e-10).powf(-ALPHA) * err_prev.powf(BETA);
            h *= fac.clamp(FAC_MIN, FAC_MAX);
            err_prev = err.max(1e-4);
        } else {
            let fac = if err.is_finite() {
                (SAFETY * err.powf(-ALPHA)).max(FAC_MIN)
            } else {
                FAC_MIN
            };
            h *= fac.min(1.0);
        }
        if h < h_min && theta < total {
            return Err(Error::StepUnderflow { theta, step: h });
        }
    }
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn constant_solution() {
        let seg = Segment { from: c(0.0), to: c(3.0) };
        let y = integrate_path(|_, y| vec![y[1], c(0.0)], &seg, &[c(1.0), c(0.0)], &Tolerances::default()).unwrap();
        assert!((y[0] - c(1.0)).norm() < 1e-15 && y[1].norm() < 1e-15);
    }

    #[test]
    fn sine_on_segment() {
        let seg = Segment { from: c(0.0), to: c(PI) };
        let y = integrate_path(|_, y| vec![y[1], -y[0]], &seg, &[c(0.0), c(1.0)], &Tolerances::default()).unwrap();
        assert!(y[0].norm() < 1e-10, "{}", y[0]);
        assert!((y[1] + c(1.0)).norm() < 1e-10, "{}", y[1]);
    }

    #[test]
    fn exponential_around_circle() {
        // w' = w around a closed loop returns to its start value
        let y = integrate_path(|_, y| vec![y[0]], &Arc::unit_circle(), &[c(1.0)], &Tolerances::default()).unwrap();
        assert!((y[0] - c(1.0)).norm() < 1e-11);
        // w' = w/z picks up nothing either (w = z), but w' = w/(2z) flips sign
        let y = integrate_path(|z, y| vec![y[0] / (2.0 * z)], &Arc::unit_circle(), &[c(1.0)], &Tolerances::default())
            .unwrap();
        assert!((y[0] + c(1.0)).norm() < 1e-11, "{}", y[0]);
    }

    #[test]
    fn clockwise_arc() {
        let arc = Arc {
            center: c(0.0),
            radius: 2.0,
            start: 0.0,
            sweep: -PI,
        };
        assert!((arc.point(PI) - c(-2.0)).norm() < 1e-15);
        // ∫ dz along the arc = z_end − z_start
        let y = integrate_path(|_, _| vec![c(1.0)], &arc, &[c(0.0)], &Tolerances::default()).unwrap();
        assert!((y[0] - c(-4.0)).norm() < 1e-12);
    }

    #[test]
    fn underflow_is_reported() {
        let seg = Segment { from: c(0.0), to: c(2.0) };
        // y' = y² from y(0) = 1 blows up at z = 1
        let r = integrate_path(|_, y| vec![y[0] * y[0]], &seg, &[c(1.0)], &Tolerances::default());
        assert!(matches!(r, Err(Error::StepUnderflow { .. })), "{r:?}");
    }
}
