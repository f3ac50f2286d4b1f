//! Complex numerical kernels shared by the solver modules.

mod gamma;
mod linalg;
mod ode;

pub use gamma::complex_gamma;
pub use linalg::{lu_solve, LuFactor, Matrix};
pub use ode::{integrate_path, Arc, Path, Segment};

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Accuracy targets for the whole pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub ode_rel: f64,
    pub ode_abs: f64,
    pub newton_tol: f64,
    pub series_tail_tol: f64,
    pub onray_angle_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            ode_rel: 1e-12,
            ode_abs: 1e-14,
            newton_tol: 1e-13,
            series_tail_tol: 1e-16,
            onray_angle_tol: 1e-12,
        }
    }
}

impl Tolerances {
    /// Named bundles: `default`, `strict` (tighter integration) and `fast`
    /// (looser integration; Newton still polishes the indices).
    pub fn profile(name: &str) -> Result<Self> {
        let d = Tolerances::default();
        match name {
            "default" => Ok(d),
            "strict" => Ok(Tolerances {
                ode_rel: 1e-13,
                ode_abs: 1e-15,
                ..d
            }),
            "fast" => Ok(Tolerances {
                ode_rel: 1e-9,
                ode_abs: 1e-11,
                ..d
            }),
            other => Err(Error::InvalidInput(format!(
                "unknown tolerance profile '{other}' (expected default, strict or fast)"
            ))),
        }
    }

    pub fn validate(self) -> Result<Self> {
        let all = [
            self.ode_rel,
            self.ode_abs,
            self.newton_tol,
            self.series_tail_tol,
            self.onray_angle_tol,
        ];
        if all.iter().all(|x| x.is_finite() && *x > 0.0) {
            Ok(self)
        } else {
            Err(Error::InvalidInput("tolerances must be strictly positive".into()))
        }
    }
}

/// Which end of the argument range is closed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ArgConvention {
    /// arg ∈ (−π, π]; used for z, β and square roots.
    UpperClosed,
    /// arg ∈ [−π, π); used for α.
    LowerClosed,
}

/// Argument of `z` in the requested half-open range.
pub fn arg(z: Complex64, conv: ArgConvention) -> f64 {
    let a = z.im.atan2(z.re);
    match conv {
        ArgConvention::UpperClosed if a == -PI => PI,
        ArgConvention::LowerClosed if a == PI => -PI,
        _ => a,
    }
}

/// Wraps an angle into (−π, π].
pub fn wrap_angle(x: f64) -> f64 {
    let mut y = x % (2.0 * PI);
    if y <= -PI {
        y += 2.0 * PI;
    } else if y > PI {
        y -= 2.0 * PI;
    }
    y
}

/// `z^e = exp(e (ln|z| + i arg z))` with the argument taken in `conv`.
///
/// Integer real exponents are branch-free and evaluated by repeated
/// multiplication, so `branch_power(z, 1, _) == z`.
pub fn branch_power(z: Complex64, e: Complex64, conv: ArgConvention) -> Complex64 {
    debug_assert!(z != Complex64::ZERO, "branch_power at z = 0");
    if e.im == 0.0 && e.re.fract() == 0.0 && e.re.abs() < 1024.0 {
        return z.powi(e.re as i32);
    }
    let log = Complex64::new(z.norm().ln(), arg(z, conv));
    (e * log).exp()
}

/// `r^e · exp(i θ e)` for a value given in polar form with an explicit
/// argument θ (which may lie outside the principal range).
pub fn polar_power(r: f64, theta: f64, e: Complex64) -> Complex64 {
    (e * Complex64::new(r.ln(), theta)).exp()
}

/// Principal square root with a stable cut: a value within `1e-8` relative of
/// the negative real axis is treated as having arg = π.
pub fn sqrt_upper(z: Complex64) -> Complex64 {
    if z.re < 0.0 && z.im.abs() <= 1e-8 * z.norm() {
        Complex64::new(0.0, z.norm().sqrt())
    } else {
        z.sqrt()
    }
}

pub(crate) fn max_abs(v: &[Complex64]) -> f64 {
    v.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn branch_power_examples() {
        let half = c(0.5, 0.0);
        assert_eq!(branch_power(c(1.0, 0.0), c(0.3, 2.0), ArgConvention::UpperClosed), c(1.0, 0.0));
        let up = branch_power(c(-1.0, 0.0), half, ArgConvention::UpperClosed);
        assert!((up - c(0.0, 1.0)).norm() < 1e-15);
        let lo = branch_power(c(-1.0, 0.0), half, ArgConvention::LowerClosed);
        assert!((lo - c(0.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn unit_exponent_is_identity() {
        for z in [c(-1.0, 0.0), c(-3.5, -0.0), c(0.2, -7.0), c(1e-9, 3.0)] {
            for conv in [ArgConvention::UpperClosed, ArgConvention::LowerClosed] {
                assert_eq!(branch_power(z, c(1.0, 0.0), conv), z);
            }
        }
    }

    #[test]
    fn arg_conventions() {
        assert_eq!(arg(c(-1.0, 0.0), ArgConvention::UpperClosed), PI);
        assert_eq!(arg(c(-1.0, -0.0), ArgConvention::UpperClosed), PI);
        assert_eq!(arg(c(-1.0, 0.0), ArgConvention::LowerClosed), -PI);
        assert_eq!(arg(c(0.0, 1.0), ArgConvention::LowerClosed), PI / 2.0);
        assert_eq!(wrap_angle(-PI), PI);
        assert!((wrap_angle(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn sqrt_cut() {
        assert_eq!(sqrt_upper(c(-4.0, -1e-12)), c(0.0, 2.0));
        assert!((sqrt_upper(c(-4.0, -1e-3)) - c(-4.0, -1e-3).sqrt()).norm() == 0.0);
    }

    #[test]
    fn tolerance_profiles() {
        assert_eq!(Tolerances::profile("default").unwrap(), Tolerances::default());
        assert!(Tolerances::profile("strict").unwrap().ode_rel < 1e-12);
        assert!(Tolerances::profile("nope").is_err());
        let bad = Tolerances {
            newton_tol: 0.0,
            ..Tolerances::default()
        };
        assert!(bad.validate().is_err());
    }
}
