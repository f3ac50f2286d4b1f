//! Independent reference values.
//!
//! The quasi-exactly solvable member `A = (−1, 4/5, 31/25, 3/5, −1/4)` has the
//! closed-form solution `z^{3/5} exp(−1/z − z/2)`. The Jaffé–Lay oracle sums
//! the Taylor series of the generalized spheroidal equation about `t = 0`
//! directly in `t`, without going through the DCHE transformation.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{DcheParams, JaffeLayParams};

/// Exponent of the closed-form solution.
pub const QES_EXPONENT: f64 = 0.6;

/// Parameters of the closed-form member.
pub fn qes_params() -> DcheParams {
    DcheParams::from_real([-1.0, 0.8, 31.0 / 25.0, 0.6, -0.25]).expect("nondegenerate")
}

/// `z^{3/5} exp(−1/z − z/2)` for `z > 0`.
pub fn qes_exact_value(z: f64) -> f64 {
    z.powf(QES_EXPONENT) * (-1.0 / z - z / 2.0).exp()
}

/// Coefficient of `z^{n + 3/5}` in the Laurent expansion of the closed form,
/// `Σ_k (−1)^k/k! · (−1/2)^{n+k}/(n+k)!`.
pub fn qes_exact_coefficient(n: i64) -> f64 {
    let k0 = (-n).max(0);
    // first term: (−1)^{k0}/k0! · (−1/2)^{n+k0}/(n+k0)!
    let j0 = n + k0;
    let mut term = 1.0;
    for k in 1..=k0 {
        term *= -1.0 / k as f64;
    }
    for j in 1..=j0 {
        term *= -0.5 / j as f64;
    }
    let mut sum = term;
    let mut k = k0;
    loop {
        k += 1;
        let j = n + k;
        term *= (-1.0 / k as f64) * (-0.5 / j as f64);
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1e-300) {
            return sum;
        }
    }
}

/// `T₁₃` for the closed-form member. With `w₁` normalized to a unit central
/// coefficient and `ν₁ = −2/5`, the closed form equals `c₋₁ · w₁`, and it is
/// exactly the formal solution `w₃` at infinity.
pub fn qes_exact_connection() -> f64 {
    1.0 / qes_exact_coefficient(-1)
}

/// Maximum Taylor order before giving up.
pub const TAYLOR_MAX_ORDER: usize = 400;

/// Sums the Taylor series of the Jaffé–Lay solution with `y(0) = 1`,
/// `y'(0) = 0` at `t`, returning `(y, y')`.
///
/// The series is generated from the polynomial form
/// `(t²−1)³y″ − (α+2t+αt²−2t³)(t²−1)y′ + (δ+(2α+γ)t+βt²)y = 0`
/// and is accepted once two consecutive terms of both sums fall below
/// `1e-16` of the partial sums.
pub fn jaffe_lay_series_oracle(j: &JaffeLayParams, t: Complex64) -> Result<(Complex64, Complex64)> {
    if !(t.norm() < 1.0) {
        return Err(Error::InvalidInput(format!("|t| = {} is outside the unit disk", t.norm())));
    }
    let JaffeLayParams {
        alpha,
        beta,
        gamma,
        delta,
    } = *j;
    let zero = Complex64::ZERO;
    let mut y: Vec<Complex64> = vec![Complex64::new(1.0, 0.0), zero];
    let at = |v: &Vec<Complex64>, i: i64| if i < 0 { zero } else { v[i as usize] };
    // y''_j and y'_j in terms of the coefficient vector
    let d2 = |v: &Vec<Complex64>, i: i64| {
        if i < 0 {
            zero
        } else {
            v[i as usize + 2] * ((i + 2) * (i + 1)) as f64
        }
    };
    let d1 = |v: &Vec<Complex64>, i: i64| {
        if i < 0 {
            zero
        } else {
            v[i as usize + 1] * (i + 1) as f64
        }
    };

    let mut val = y[0];
    let mut der = zero;
    let mut tp = t; // t^{n−1} for the newest coefficient y_n
    let mut quiet = 0;
    for k in 0..TAYLOR_MAX_ORDER as i64 {
        // coefficient of t^k; the −y''_k term carries y_{k+2}
        let rest = d2(&y, k - 6) - 3.0 * d2(&y, k - 4) + 3.0 * d2(&y, k - 2)
            + alpha * d1(&y, k)
            + 2.0 * d1(&y, k - 1)
            - 4.0 * d1(&y, k - 3)
            - alpha * d1(&y, k - 4)
            + 2.0 * d1(&y, k - 5)
            + delta * at(&y, k)
            + (2.0 * alpha + gamma) * at(&y, k - 1)
            + beta * at(&y, k - 2);
        y.push(rest / ((k + 2) * (k + 1)) as f64);

        let n = (k + 2) as usize;
        let dterm = y[n] * n as f64 * tp;
        let vterm = y[n] * tp * t;
        tp *= t;
        val += vterm;
        der += dterm;
        if vterm.norm() <= 1e-16 * val.norm() && dterm.norm() <= 1e-16 * der.norm().max(val.norm()) {
            quiet += 1;
            if quiet >= 2 {
                return Ok((val, der));
            }
        } else {
            quiet = 0;
        }
        if !(val.is_finite() && der.is_finite()) {
            break;
        }
    }
    Err(Error::SeriesNotConverged(TAYLOR_MAX_ORDER))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn laurent_coefficients_reproduce_closed_form() {
        let z: f64 = 0.7;
        let s: f64 = (-60..=60).map(|n| qes_exact_coefficient(n) * z.powi(n as i32)).sum();
        assert!((s * z.powf(QES_EXPONENT) / qes_exact_value(z) - 1.0).abs() < 1e-13);
    }

    #[test]
    fn exact_connection_value() {
        assert!((qes_exact_connection() + 0.786_334_477_859).abs() < 1e-12);
    }

    #[test]
    fn taylor_oracle_on_polynomial_case() {
        // with every parameter zero the solution is y ≡ 1
        let j = JaffeLayParams::from_real(0.0, 0.0, 0.0, 0.0);
        let (y, dy) = jaffe_lay_series_oracle(&j, Complex64::new(0.5, 0.0)).unwrap();
        assert!((y - 1.0).norm() < 1e-15 && dy.norm() < 1e-15);
    }

    #[test]
    fn taylor_oracle_satisfies_equation() {
        let j = JaffeLayParams::from_real(4.0, -3.0, 2.0, -1.0);
        let t = 0.3;
        let h = 1e-4;
        let f = |x: f64| jaffe_lay_series_oracle(&j, Complex64::new(x, 0.0)).unwrap();
        let (y0, d0) = f(t);
        let (_, dp) = f(t + h);
        let (_, dm) = f(t - h);
        let y2 = (dp - dm) / (2.0 * h);
        let (a, b, g, d) = (4.0, -3.0, 2.0, -1.0);
        let r = (t * t - 1.0f64).powi(3) * y2 - (a + 2.0 * t + a * t * t - 2.0 * t.powi(3)) * (t * t - 1.0) * d0
            + (d + (2.0 * a + g) * t + b * t * t) * y0;
        assert!(r.norm() < 1e-6, "{r}");
    }

    #[test]
    fn closed_form_satisfies_equation() {
        let a = qes_params();
        for z in [0.1, 0.4, 1.0, 2.5, 7.0] {
            let w = qes_exact_value(z);
            let g = QES_EXPONENT / z + 1.0 / (z * z) - 0.5;
            let dg = -QES_EXPONENT / (z * z) - 2.0 / (z * z * z);
            let w2 = w * (g * g + dg);
            let p = a.potential(Complex64::new(z, 0.0));
            let r = z * z * w2 + p * w;
            assert!(r.norm() <= 1e-13 * (z * z * w2).abs().max(p.norm() * w), "z = {z}: {r}");
        }
    }

    #[test]
    fn mapped_oracle_satisfies_dche() {
        use crate::model::{from_jaffe_lay, jaffe_lay_inverse_map, jaffe_lay_point_map};
        let j = JaffeLayParams::from_real(4.0, -3.0, 2.0, -1.0);
        let a = from_jaffe_lay(&j).unwrap();
        // w'(z) from the oracle's (y, dy/dt) through y = pre(z)·w(z)
        let dw = |z: f64| {
            let zc = Complex64::new(z, 0.0);
            let t = jaffe_lay_inverse_map(zc);
            let (_, pre) = jaffe_lay_point_map(t, &j).unwrap();
            let (y, dy) = jaffe_lay_series_oracle(&j, t).unwrap();
            let dpre = pre * (-0.5 / zc + (j.alpha / 8.0) * (1.0 + 1.0 / (zc * zc)));
            let dtdz = 2.0 / ((zc + 1.0) * (zc + 1.0));
            let w = y / pre;
            (w, (dy * dtdz - dpre * w) / pre)
        };
        for z in [2.0, 3.0] {
            let h = 1e-3;
            let d = |k: f64| dw(z + k * h).1;
            let w2 = (d(-2.0) - 8.0 * d(-1.0) + 8.0 * d(1.0) - d(2.0)) / (12.0 * h);
            let (w, _) = dw(z);
            let p = a.potential(Complex64::new(z, 0.0));
            let r = z * z * w2 + p * w;
            assert!(r.norm() <= 1e-9 * (p * w).norm(), "z = {z}: {r}");
        }
    }

    #[test]
    fn taylor_oracle_rejects_outside_disk() {
        let j = JaffeLayParams::from_real(4.0, -3.0, 2.0, -1.0);
        assert!(jaffe_lay_series_oracle(&j, Complex64::new(1.2, 0.0)).is_err());
    }
}
