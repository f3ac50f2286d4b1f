//! Parameter forms of the double confluent Heun equation and the exact maps
//! between them.
//!
//! The working form is
//!
//! ```text
//! z² w'' + (A₋₂ z⁻² + A₋₁ z⁻¹ + A₀ + A₁ z + A₂ z²) w = 0
//! ```
//!
//! which has no first-derivative term, so Wronskians of its solutions are
//! constant. All other forms are converted into it.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coefficients of `D²y + B(z)y = 0` with `D = z d/dz`, ordered p = −2…2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalFormParams {
    pub b: [Complex64; 5],
}

/// Coefficients `A_p`, p = −2…2, of the working form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DcheParams {
    a: [Complex64; 5],
}

/// The four parameters of the Jaffé–Lay form on the t-variable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JaffeLayParams {
    pub alpha: Complex64,
    pub beta: Complex64,
    pub gamma: Complex64,
    pub delta: Complex64,
}

/// Reduced radial Schrödinger problem in dimensionless form (`z = r/r₀`).
///
/// `v_coeffs` holds the symbols `A₋₂, A₋₁, A₀, A₁` that parameterize the
/// potential; the r⁻² strength of the potential itself is `A₀ + l(l+1)`,
/// which cancels the centrifugal term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialProblem {
    pub l: u32,
    pub v_coeffs: [Complex64; 4],
    pub energy_param: Complex64,
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

impl DcheParams {
    /// Validated constructor.
    pub fn new(a: [Complex64; 5]) -> Result<Self> {
        DcheParams { a }.validate()
    }

    /// Real-coefficient convenience constructor, ordered p = −2…2.
    pub fn from_real(a: [f64; 5]) -> Result<Self> {
        Self::new(a.map(c))
    }

    /// Builds the value without the non-degeneracy check. Use [`validate`]
    /// before handing the result to a solver.
    ///
    /// [`validate`]: DcheParams::validate
    pub fn raw(a: [Complex64; 5]) -> Self {
        DcheParams { a }
    }

    /// `A_p` for p ∈ −2…2.
    ///
    /// # Panics
    /// If `p` is outside −2…2.
    pub fn a(&self, p: i32) -> Complex64 {
        assert!((-2..=2).contains(&p), "A_p index {p} out of range");
        self.a[(p + 2) as usize]
    }

    pub fn coeffs(&self) -> [Complex64; 5] {
        self.a
    }

    /// Σ_p |A_p|.
    pub fn abs_sum(&self) -> f64 {
        self.a.iter().map(|x| x.norm()).sum()
    }

    /// Returns a copy with `A₂` replaced.
    pub fn with_a2(&self, a2: Complex64) -> Self {
        let mut a = self.a;
        a[4] = a2;
        DcheParams { a }
    }

    /// `Σ_p A_p z^p`.
    pub fn potential(&self, z: Complex64) -> Complex64 {
        let zi = z.inv();
        self.a[0] * zi * zi + self.a[1] * zi + self.a[2] + self.a[3] * z + self.a[4] * z * z
    }

    /// Returns the parameters unchanged when `A₂·A₋₂ ≠ 0`.
    pub fn validate(self) -> Result<Self> {
        let (a2, am2) = (self.a(2), self.a(-2));
        let finite = self.a.iter().all(|x| x.re.is_finite() && x.im.is_finite());
        if !finite {
            return Err(Error::InvalidInput("non-finite coefficient".into()));
        }
        if a2 == Complex64::ZERO || am2 == Complex64::ZERO {
            return Err(Error::DegenerateEquation {
                a2: format!("{a2}"),
                am2: format!("{am2}"),
            });
        }
        Ok(self)
    }

    pub fn to_normal_form(&self) -> NormalFormParams {
        let mut b = self.a;
        b[2] -= c(0.25);
        NormalFormParams { b }
    }

    /// JSON object `{"A": [[re,im], …]}` ordered p = −2…2.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&ParamsJson::from(self)).expect("params serialize")
    }

    /// Parses the JSON object form and validates the result.
    pub fn from_json(s: &str) -> Result<Self> {
        let j: ParamsJson = serde_json::from_str(s)?;
        j.try_into()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsJson {
    #[serde(rename = "A")]
    pub a: Vec<[f64; 2]>,
}

impl From<&DcheParams> for ParamsJson {
    fn from(p: &DcheParams) -> Self {
        ParamsJson {
            a: p.a.iter().map(|x| [x.re, x.im]).collect(),
        }
    }
}

impl TryFrom<ParamsJson> for DcheParams {
    type Error = Error;

    fn try_from(j: ParamsJson) -> Result<Self> {
        let a: [[f64; 2]; 5] = j
            .a
            .try_into()
            .map_err(|v: Vec<_>| Error::Parse(format!("expected 5 coefficients, got {}", v.len())))?;
        DcheParams::new(a.map(|[re, im]| Complex64::new(re, im)))
    }
}

impl NormalFormParams {
    pub fn from_real(b: [f64; 5]) -> Self {
        NormalFormParams { b: b.map(c) }
    }
}

/// `A₀ = B₀ + 1/4`, all other coefficients carried over.
pub fn from_normal_form(b: &NormalFormParams) -> Result<DcheParams> {
    let mut a = b.b;
    a[2] += c(0.25);
    DcheParams::new(a)
}

impl JaffeLayParams {
    pub fn from_real(alpha: f64, beta: f64, gamma: f64, delta: f64) -> Self {
        JaffeLayParams {
            alpha: c(alpha),
            beta: c(beta),
            gamma: c(gamma),
            delta: c(delta),
        }
    }
}

pub fn from_jaffe_lay(j: &JaffeLayParams) -> Result<DcheParams> {
    let JaffeLayParams {
        alpha,
        beta,
        gamma,
        delta,
    } = *j;
    if alpha == Complex64::ZERO {
        return Err(Error::DegenerateEquation {
            a2: "0".into(),
            am2: "0".into(),
        });
    }
    let a_edge = -alpha * alpha / 64.0;
    DcheParams::new([
        a_edge,
        (gamma - beta - delta) / 16.0,
        (c(8.0) - alpha * alpha + (beta - delta) * 4.0) / 32.0,
        (-gamma - beta - delta) / 16.0,
        a_edge,
    ])
}

/// Maps a Jaffé–Lay point `t` to `z = (1+t)/(1−t)` and returns the factor
/// `z^(−1/2) exp((α/8)(z − 1/z))` such that `y(t) = factor · w(z)`.
pub fn jaffe_lay_point_map(t: Complex64, j: &JaffeLayParams) -> Result<(Complex64, Complex64)> {
    if (t - 1.0).norm() < 1e-15 || (t + 1.0).norm() < 1e-15 {
        return Err(Error::MapSingularity(format!("{t}")));
    }
    let z = (1.0 + t) / (1.0 - t);
    let prefactor = z.powf(-0.5) * ((j.alpha / 8.0) * (z - z.inv())).exp();
    Ok((z, prefactor))
}

/// Inverse point map `t = (z − 1)/(z + 1)`.
pub fn jaffe_lay_inverse_map(z: Complex64) -> Complex64 {
    (z - 1.0) / (z + 1.0)
}

impl RadialProblem {
    /// Dimensionless potential strengths multiplying z⁻⁴, z⁻³, z⁻², z⁻¹
    /// (the r⁻² one includes `l(l+1)`).
    pub fn potential_strengths(&self) -> [Complex64; 4] {
        let ll = (self.l as f64) * (self.l as f64 + 1.0);
        let v = self.v_coeffs;
        [v[0], v[1], v[2] + ll, v[3]]
    }

    /// Builds the problem from the physical r⁻² strength, subtracting the
    /// centrifugal part.
    pub fn from_potential_strengths(l: u32, s: [Complex64; 4], energy_param: Complex64) -> Self {
        let ll = (l as f64) * (l as f64 + 1.0);
        RadialProblem {
            l,
            v_coeffs: [s[0], s[1], s[2] - ll, s[3]],
            energy_param,
        }
    }
}

pub fn from_radial(r: &RadialProblem) -> Result<DcheParams> {
    let v = r.v_coeffs;
    DcheParams::new([v[0], v[1], v[2], v[3], r.energy_param])
}

/// Parses a complex number written as `re` or `re,im`.
pub fn parse_complex(s: &str) -> Result<Complex64> {
    let s = s.trim();
    let bad = || Error::Parse(format!("invalid complex number '{s}' (expected re or re,im)"));
    let mut parts = s.split(',');
    let re: f64 = parts.next().ok_or_else(bad)?.trim().parse().map_err(|_| bad())?;
    let im: f64 = match parts.next() {
        Some(p) => p.trim().parse().map_err(|_| bad())?,
        None => 0.0,
    };
    if parts.next().is_some() || !re.is_finite() || !im.is_finite() {
        return Err(bad());
    }
    Ok(Complex64::new(re, im))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn normal_form_shift() {
        let a = from_normal_form(&NormalFormParams::from_real([1.0, 0.0, 0.0, 0.0, 1.0])).unwrap();
        assert_eq!(a.coeffs().map(|x| x.re), [1.0, 0.0, 0.25, 0.0, 1.0]);

        let b = NormalFormParams::from_real([-1.0, 0.8, 31.0 / 25.0 - 0.25, 0.6, -0.25]);
        let a = from_normal_form(&b).unwrap();
        let want = [-1.0, 0.8, 31.0 / 25.0, 0.6, -0.25];
        for (x, w) in a.coeffs().iter().zip(want) {
            assert!(close(*x, c(w), 1e-15));
        }
    }

    #[test]
    fn degenerate_inputs() {
        let b = NormalFormParams::from_real([1.0, 0.0, 0.0, 0.0, 0.0]);
        assert!(matches!(from_normal_form(&b), Err(Error::DegenerateEquation { .. })));
        assert!(DcheParams::from_real([0.0, 0.8, 1.24, 0.6, -0.25]).is_err());
        assert!(DcheParams::from_real([-1.0, 0.8, 1.24, 0.6, 0.0]).is_err());
        assert!(DcheParams::from_real([-1.0, 0.8, 1.24, 0.6, -0.25]).is_ok());
    }

    #[test]
    fn jaffe_lay_parameters() {
        let a = from_jaffe_lay(&JaffeLayParams::from_real(4.0, -3.0, 2.0, -1.0)).unwrap();
        let want = [-0.25, 0.375, -0.5, 0.125, -0.25];
        assert_eq!(a.coeffs().map(|x| x.re), want);

        let a = from_jaffe_lay(&JaffeLayParams::from_real(8.0, 0.0, 0.0, 0.0)).unwrap();
        assert_eq!(a.coeffs().map(|x| x.re), [-1.0, 0.0, -1.75, 0.0, -1.0]);

        let j = JaffeLayParams::from_real(0.0, 1.0, 2.0, 3.0);
        assert!(matches!(from_jaffe_lay(&j), Err(Error::DegenerateEquation { .. })));
    }

    #[test]
    fn point_map() {
        let j = JaffeLayParams::from_real(4.0, -3.0, 2.0, -1.0);
        let (z, f) = jaffe_lay_point_map(c(0.0), &j).unwrap();
        assert!(close(z, c(1.0), 1e-15) && close(f, c(1.0), 1e-15));
        let (z, _) = jaffe_lay_point_map(c(1.0 / 3.0), &j).unwrap();
        assert!(close(z, c(2.0), 1e-15));
        let (z, f) = jaffe_lay_point_map(c(0.5), &j).unwrap();
        let want = 3f64.powf(-0.5) * (0.5 * (3.0 - 1.0 / 3.0f64)).exp();
        assert!(close(z, c(3.0), 1e-15));
        assert!((f.re - want).abs() < 1e-14 * want && f.im.abs() < 1e-15);
        assert!(matches!(jaffe_lay_point_map(c(1.0), &j), Err(Error::MapSingularity(_))));
        assert!(matches!(jaffe_lay_point_map(c(-1.0), &j), Err(Error::MapSingularity(_))));
    }

    #[test]
    fn radial_mapping() {
        let r = RadialProblem {
            l: 0,
            v_coeffs: [c(-1.0), c(0.8), c(31.0 / 25.0), c(0.6)],
            energy_param: c(-0.25),
        };
        let a = from_radial(&r).unwrap();
        assert_eq!(a.coeffs().map(|x| x.re), [-1.0, 0.8, 1.24, 0.6, -0.25]);

        let r1 = RadialProblem { l: 1, ..r };
        assert_eq!(from_radial(&r1).unwrap().a(0), c(31.0 / 25.0));
        assert_eq!(r1.potential_strengths()[2], c(31.0 / 25.0 + 2.0));
        let back = RadialProblem::from_potential_strengths(1, r1.potential_strengths(), c(-0.25));
        assert_eq!(back.l, 1);
        for (x, y) in back.v_coeffs.iter().zip(&r1.v_coeffs) {
            assert!((x - y).norm() < 1e-15);
        }

        let zero = RadialProblem {
            l: 0,
            v_coeffs: [Complex64::ZERO; 4],
            energy_param: c(-1.0),
        };
        assert!(matches!(from_radial(&zero), Err(Error::DegenerateEquation { .. })));
    }

    #[test]
    fn json_form() {
        let a = DcheParams::from_real([-1.0, 0.8, 1.24, 0.6, -0.25]).unwrap();
        let s = a.to_json();
        assert_eq!(s, r#"{"A":[[-1.0,0.0],[0.8,0.0],[1.24,0.0],[0.6,0.0],[-0.25,0.0]]}"#);
        assert_eq!(DcheParams::from_json(&s).unwrap(), a);
        assert!(DcheParams::from_json(r#"{"A":[[1,0]]}"#).is_err());
        assert!(DcheParams::from_json(r#"{"A":[[0,0],[0,0],[0,0],[0,0],[1,0]]}"#).is_err());
    }

    #[test]
    fn complex_arguments() {
        assert_eq!(parse_complex("-0.25").unwrap(), c(-0.25));
        assert_eq!(parse_complex("1,-2").unwrap(), Complex64::new(1.0, -2.0));
        assert_eq!(parse_complex(" 1e-3 , 4 ").unwrap(), Complex64::new(1e-3, 4.0));
        for bad in ["", "x", "1,2,3", "1,", "nan", "inf,0"] {
            assert!(parse_complex(bad).is_err(), "{bad}");
        }
    }
}
