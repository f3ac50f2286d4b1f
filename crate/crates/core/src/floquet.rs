//! Multiplicative (Floquet-type) solutions `w = z^ν Σ c_n z^n`.
//!
//! Indices are seeded from the eigenvalues of the circuit matrix around the
//! origin, coefficients from inverse iteration on the truncated recurrence
//! matrix, and both are polished by Newton's method on the bordered system
//! (recurrence rows plus one linearized normalization row). The truncation
//! window is widened until the index and coefficients stop moving.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::DcheParams;
use crate::numerics::{
    branch_power, integrate_path, max_abs, sqrt_upper, Arc, ArgConvention, LuFactor, Matrix, Tolerances,
};

/// Initial truncation `(M, N)` of the driver.
pub const INITIAL_TRUNCATION: usize = 16;
/// Growth of `M` and `N` per escalation round.
pub const ESCALATION_STEP: usize = 8;
const MAX_TRUNCATION: usize = 400;
const SNAP: f64 = 1e-10;

/// Monodromy of the solution basis `w_a(1) = 1, w_a'(1) = 0`,
/// `w_b(1) = 0, w_b'(1) = 1` once around the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircuitMatrix {
    pub c11: Complex64,
    pub c12: Complex64,
    pub c21: Complex64,
    pub c22: Complex64,
    pub det: Complex64,
    /// Eigenvalue taken with the minus sign in front of the root; belongs to
    /// solution 1.
    pub lambda1: Complex64,
    /// Eigenvalue taken with the plus sign; belongs to solution 2.
    pub lambda2: Complex64,
    pub disc: Complex64,
}

/// A multiplicative solution with its truncated coefficient window.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiplicativeSolution {
    pub params: DcheParams,
    pub nu: Complex64,
    /// `c_n` for n = −m_lo…n_hi, ascending.
    pub coeffs: Vec<Complex64>,
    pub m_lo: usize,
    pub n_hi: usize,
    /// max over interior n of the recurrence residual, divided by max |c_n|.
    pub recurrence_residual: f64,
    pub label: u8,
}

/// The ODE `z² w'' + P(z) w = 0` as a first-order field on `(w, w')`.
pub fn dche_field(a: DcheParams) -> impl Fn(Complex64, &[Complex64]) -> Vec<Complex64> {
    move |z, y| vec![y[1], -a.potential(z) * y[0] / (z * z)]
}

/// Number of arcs the unit circle is split into for the circuit matrix.
pub const CIRCUIT_ARCS: usize = 16;

/// Circuit matrix in the basis `(w, w') = (1, 0), (0, 1)` at `z = 1`.
///
/// The circle is traversed as [`CIRCUIT_ARCS`] arcs whose transfer matrices
/// are multiplied together. The determinant is the product of the per-arc
/// determinants, which avoids the cancellation in `C₁₁C₂₂ − C₁₂C₂₁` when the
/// entries are large.
pub fn compute_circuit_matrix(a: &DcheParams, tol: &Tolerances) -> Result<CircuitMatrix> {
    let field = dche_field(*a);
    let one = Complex64::new(1.0, 0.0);
    let sweep = 2.0 * PI / CIRCUIT_ARCS as f64;
    // row-major [[m11, m12], [m21, m22]]
    let mut m = [[one, Complex64::ZERO], [Complex64::ZERO, one]];
    let mut det = one;
    for k in 0..CIRCUIT_ARCS {
        let arc = Arc {
            start: k as f64 * sweep,
            sweep,
            ..Arc::unit_circle()
        };
        let ta = integrate_path(&field, &arc, &[one, Complex64::ZERO], tol)?;
        let tb = integrate_path(&field, &arc, &[Complex64::ZERO, one], tol)?;
        det *= ta[0] * tb[1] - tb[0] * ta[1];
        m = [
            [ta[0] * m[0][0] + tb[0] * m[1][0], ta[0] * m[0][1] + tb[0] * m[1][1]],
            [ta[1] * m[0][0] + tb[1] * m[1][0], ta[1] * m[0][1] + tb[1] * m[1][1]],
        ];
    }
    let (c11, c12, c21, c22) = (m[0][0], m[0][1], m[1][0], m[1][1]);
    let disc = (c11 - c22) * (c11 - c22) + 4.0 * c12 * c21;
    let root = sqrt_upper(disc);
    let minus = (c11 + c22 - root) / 2.0;
    let plus = (c11 + c22 + root) / 2.0;
    // the smaller root suffers cancellation; recover it from λ₁λ₂ = det
    let (lambda1, lambda2) = if minus.norm() < plus.norm() {
        (det / plus, plus)
    } else {
        (minus, det / minus)
    };
    Ok(CircuitMatrix {
        c11,
        c12,
        c21,
        c22,
        det,
        lambda1,
        lambda2,
        disc,
    })
}

/// Reduces `ν` modulo 1 into Re ν ∈ [−1/2, 1/2); values within 1e−10 of
/// +1/2 go to −1/2. Returns the reduced index and the integer removed.
pub fn reduce_index(nu: Complex64) -> (Complex64, i64) {
    let k = (nu.re + 0.5 + SNAP).floor();
    (Complex64::new(nu.re - k, nu.im), k as i64)
}

/// Index seeds `(ν₁, ν₂)` from the circuit matrix eigenvalues.
pub fn index_seeds(c: &CircuitMatrix) -> Result<(Complex64, Complex64)> {
    let scale = c.c11.norm() + c.c22.norm();
    if c.disc.norm() <= 1e-10 * scale || !c.disc.norm().is_finite() {
        return Err(Error::LogarithmicCase { disc: c.disc.norm() });
    }
    let to_index = |l: Complex64| reduce_index(l.ln() / Complex64::new(0.0, 2.0 * PI)).0;
    Ok((to_index(c.lambda1), to_index(c.lambda2)))
}

/// Truncated recurrence matrix for rows n = −m_lo…n_hi.
fn recurrence_matrix(a: &DcheParams, nu: Complex64, m_lo: usize, n_hi: usize, extra: usize) -> Matrix {
    let k = m_lo + n_hi + 1;
    let mut m = Matrix::zeros(k + extra);
    for i in 0..k {
        let n = i as f64 - m_lo as f64;
        m[(i, i)] = (n + nu) * (n - 1.0 + nu);
        for p in -2i64..=2 {
            let j = i as i64 - p;
            if (0..k as i64).contains(&j) {
                m[(i, j as usize)] += a.a(p as i32);
            }
        }
    }
    m
}

fn unit_normalize(v: &mut [Complex64]) {
    let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    for x in v.iter_mut() {
        *x /= norm;
    }
}

/// Approximate null vector of the truncated recurrence matrix at `nu0`,
/// normalized to Σ|c_n|² = 1: two rounds of inverse iteration from the
/// all-equal vector.
pub fn seed_coefficients(a: &DcheParams, nu0: Complex64, m_lo: usize, n_hi: usize) -> Result<Vec<Complex64>> {
    if m_lo < 5 || n_hi < 5 {
        return Err(Error::InvalidInput("seed truncation needs M, N >= 5".into()));
    }
    let k = m_lo + n_hi + 1;
    let lu = match LuFactor::new(recurrence_matrix(a, nu0, m_lo, n_hi, 0)) {
        Ok(lu) => lu,
        Err(Error::SingularMatrix { .. }) => {
            LuFactor::new(recurrence_matrix(a, nu0 + 1e-10, m_lo, n_hi, 0))?
        }
        Err(e) => return Err(e),
    };
    let mut c = vec![Complex64::new(1.0, 0.0); k];
    unit_normalize(&mut c);
    for _ in 0..2 {
        c = lu.solve(&c)?;
        if c.iter().any(|x| !x.is_finite()) {
            return Err(Error::SingularMatrix { column: 0, pivot: 0.0 });
        }
        unit_normalize(&mut c);
    }
    Ok(c)
}

/// Newton refinement of `(ν, c)` on the bordered system. `seed` is laid out
/// for n = −m_lo…n_hi.
pub fn newton_refine(
    a: &DcheParams,
    nu0: Complex64,
    seed: &[Complex64],
    m_lo: usize,
    n_hi: usize,
    tol: &Tolerances,
    max_iter: usize,
) -> Result<MultiplicativeSolution> {
    let k = m_lo + n_hi + 1;
    if seed.len() != k {
        return Err(Error::DimensionMismatch(format!(
            "seed has {} coefficients, window needs {k}",
            seed.len()
        )));
    }
    let mut nu = nu0;
    let mut c = seed.to_vec();
    unit_normalize(&mut c);
    let mut prev_update = f64::INFINITY;
    let mut converged = false;
    let mut update = f64::INFINITY;
    for _ in 0..max_iter {
        let mut m = recurrence_matrix(a, nu, m_lo, n_hi, 1);
        for i in 0..k {
            let n = i as f64 - m_lo as f64;
            m[(i, k)] = (2.0 * n - 1.0 + 2.0 * nu) * c[i];
            m[(k, i)] = c[i].conj();
        }
        let mut rhs = vec![Complex64::ZERO; k + 1];
        rhs[k] = Complex64::new(1.0, 0.0);
        let x = LuFactor::new(m)?.solve(&rhs)?;
        let dnu = x[k];
        let dc = x[..k].iter().zip(&c).map(|(n, o)| (n - o).norm()).fold(0.0, f64::max);
        update = dnu.norm() + dc;
        if !update.is_finite() {
            break;
        }
        nu += dnu;
        c.copy_from_slice(&x[..k]);
        // stop at the tolerance, or once updates stall at the rounding floor
        if update <= tol.newton_tol || (update <= 1e3 * tol.newton_tol && update >= 0.5 * prev_update) {
            converged = true;
            break;
        }
        prev_update = update;
    }
    if !converged {
        return Err(Error::NoConvergence {
            iterations: max_iter,
            last_update: update,
        });
    }
    let sol = MultiplicativeSolution {
        params: *a,
        nu,
        coeffs: c,
        m_lo,
        n_hi,
        recurrence_residual: 0.0,
        label: 1,
    };
    let (_, shift) = reduce_index(nu);
    sol.shifted(-shift)
}

impl MultiplicativeSolution {
    /// `c_n`, zero outside the window.
    pub fn coeff(&self, n: i64) -> Complex64 {
        let i = n + self.m_lo as i64;
        if i >= 0 && (i as usize) < self.coeffs.len() {
            self.coeffs[i as usize]
        } else {
            Complex64::ZERO
        }
    }

    pub fn max_coeff(&self) -> f64 {
        max_abs(&self.coeffs)
    }

    /// Re-expresses the solution with index `ν + k` (the same function),
    /// relabeling `c'_n = c_{n+k}` and renormalizing so that `c'_0 = 1`.
    pub fn shifted(&self, k: i64) -> Result<Self> {
        let m_lo = self.m_lo as i64 + k;
        let n_hi = self.n_hi as i64 - k;
        if m_lo < 1 || n_hi < 1 {
            return Err(Error::InsufficientTruncation(format!(
                "index shift {k} leaves window [-{m_lo}, {n_hi}]"
            )));
        }
        let mut out = MultiplicativeSolution {
            nu: self.nu + k as f64,
            m_lo: m_lo as usize,
            n_hi: n_hi as usize,
            ..self.clone()
        };
        let max = out.max_coeff();
        let c0 = out.coeff(0);
        if c0.norm() < 1e-14 * max {
            return Err(Error::ZeroCentralCoefficient { c0: c0.norm(), max });
        }
        for x in out.coeffs.iter_mut() {
            *x /= c0;
        }
        out.recurrence_residual = out.residual();
        Ok(out)
    }

    /// Re-solves on a window enlarged by `extra` on both sides, keeping the
    /// integer part of `ν` and the label.
    pub fn widened(&self, extra: usize, tol: &Tolerances) -> Result<Self> {
        let (m_lo, n_hi) = (self.m_lo + extra, self.n_hi + extra);
        let seed: Vec<Complex64> = (-(m_lo as i64)..=n_hi as i64).map(|n| self.coeff(n)).collect();
        let next = newton_refine(&self.params, self.nu, &seed, m_lo, n_hi, tol, 50)?;
        let k = (self.nu - next.nu).re.round() as i64;
        let mut next = next.shifted(k)?;
        next.label = self.label;
        Ok(next)
    }

    /// max over n ∈ (−M+2, N−2) of |(n+ν)(n−1+ν)c_n + Σ_p A_p c_{n−p}|,
    /// relative to max |c_n|.
    pub fn residual(&self) -> f64 {
        let lo = -(self.m_lo as i64) + 3;
        let hi = self.n_hi as i64 - 3;
        let mut worst: f64 = 0.0;
        for n in lo..=hi {
            let nf = n as f64;
            let mut r = (nf + self.nu) * (nf - 1.0 + self.nu) * self.coeff(n);
            for p in -2..=2 {
                r += self.params.a(p) * self.coeff(n - p as i64);
            }
            worst = worst.max(r.norm());
        }
        worst / self.max_coeff()
    }

    /// True when the window edges are below `1e-16 · max |c_n|`.
    pub fn tails_decayed(&self) -> bool {
        let max = self.max_coeff();
        self.coeffs[0].norm() <= 1e-16 * max && self.coeffs[self.coeffs.len() - 1].norm() <= 1e-16 * max
    }

    /// JSON dump `{"nu": [re,im], "m_lo": M, "n_hi": N, "coeffs": [[re,im],…]}`.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.dump()).expect("solution serialize")
    }

    pub fn dump(&self) -> SolutionDump {
        SolutionDump {
            nu: [self.nu.re, self.nu.im],
            m_lo: self.m_lo,
            n_hi: self.n_hi,
            coeffs: self.coeffs.iter().map(|x| [x.re, x.im]).collect(),
        }
    }

    /// Rebuilds a solution from its dump and the parameters it solves.
    pub fn from_dump(d: &SolutionDump, params: DcheParams, label: u8) -> Result<Self> {
        d.check()?;
        let mut s = MultiplicativeSolution {
            params,
            nu: Complex64::new(d.nu[0], d.nu[1]),
            coeffs: d.coeffs.iter().map(|[re, im]| Complex64::new(*re, *im)).collect(),
            m_lo: d.m_lo,
            n_hi: d.n_hi,
            recurrence_residual: 0.0,
            label,
        };
        s.recurrence_residual = s.residual();
        Ok(s)
    }
}

/// Serialized form of a multiplicative solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionDump {
    pub nu: [f64; 2],
    pub m_lo: usize,
    pub n_hi: usize,
    pub coeffs: Vec<[f64; 2]>,
}

impl SolutionDump {
    pub fn from_json(s: &str) -> Result<Self> {
        let d: SolutionDump = serde_json::from_str(s)?;
        d.check()?;
        Ok(d)
    }

    fn check(&self) -> Result<()> {
        let want = self.m_lo.checked_add(self.n_hi).and_then(|x| x.checked_add(1));
        if want != Some(self.coeffs.len()) {
            return Err(Error::Parse(format!(
                "window [-{}, {}] does not match {} coefficients",
                self.m_lo,
                self.n_hi,
                self.coeffs.len()
            )));
        }
        let finite = self.nu.iter().chain(self.coeffs.iter().flatten()).all(|x| x.is_finite());
        if !finite {
            return Err(Error::Parse("non-finite value in solution dump".into()));
        }
        if self.coeffs.iter().all(|[re, im]| *re == 0.0 && *im == 0.0) {
            return Err(Error::Parse("all coefficients are zero".into()));
        }
        Ok(())
    }
}

/// Solves for one multiplicative solution starting from an index seed,
/// widening the truncation until the result is stable.
pub fn solve_multiplicative(a: &DcheParams, nu_seed: Complex64, tol: &Tolerances) -> Result<MultiplicativeSolution> {
    let (m0, n0) = (INITIAL_TRUNCATION, INITIAL_TRUNCATION);
    let seed = seed_coefficients(a, nu_seed, m0, n0)?;
    let mut prev = newton_refine(a, nu_seed, &seed, m0, n0, tol, 50)?;
    loop {
        let (m_lo, n_hi) = (prev.m_lo + ESCALATION_STEP, prev.n_hi + ESCALATION_STEP);
        if m_lo + n_hi > 2 * MAX_TRUNCATION {
            return Err(Error::NoConvergence {
                iterations: 0,
                last_update: f64::NAN,
            });
        }
        let seed: Vec<Complex64> = (-(m_lo as i64)..=n_hi as i64).map(|n| prev.coeff(n)).collect();
        let next = newton_refine(a, prev.nu, &seed, m_lo, n_hi, tol, 50)?;
        let shift = (next.nu - prev.nu).re.round() as i64;
        let next = if shift != 0 { next.shifted(-shift)? } else { next };
        let dnu = (next.nu - prev.nu).norm();
        let lo = -(next.m_lo.min(prev.m_lo) as i64);
        let hi = next.n_hi.min(prev.n_hi) as i64;
        let dc = (lo..=hi)
            .map(|n| (next.coeff(n) - prev.coeff(n)).norm())
            .fold(0.0, f64::max)
            / next.max_coeff();
        if dnu <= 1e-12 && dc <= 1e-12 && next.tails_decayed() {
            return Ok(next);
        }
        prev = next;
    }
}

/// Full driver: circuit matrix, index seeds, Newton with escalation.
///
/// Solution 1 comes from the minus-sign eigenvalue. Solution 2 is relabeled
/// so that `ν₂ = −ν₁` exactly in its integer part.
pub fn solve_multiplicative_pair(
    a: &DcheParams,
    tol: &Tolerances,
) -> Result<(MultiplicativeSolution, MultiplicativeSolution)> {
    let a = a.validate()?;
    let circuit = compute_circuit_matrix(&a, tol)?;
    let (s1, s2) = index_seeds(&circuit)?;
    let w1 = solve_multiplicative(&a, s1, tol)?;
    let w2 = solve_multiplicative(&a, s2, tol)?;
    let sum = w1.nu + w2.nu;
    let k = sum.re.round();
    if (sum - k).norm() > 1e-10 {
        return Err(Error::InvalidInput(format!(
            "indices do not satisfy nu1 + nu2 = 0 (mod 1): sum = {sum}"
        )));
    }
    if (w1.nu - w2.nu - (w1.nu - w2.nu).re.round()).norm() < 1e-8 {
        return Err(Error::LogarithmicCase { disc: circuit.disc.norm() });
    }
    let mut w2 = if k != 0.0 { w2.shifted(-(k as i64))? } else { w2 };
    w2.label = 2;
    Ok((MultiplicativeSolution { label: 1, ..w1 }, w2))
}

/// Exchanges labels 1 and 2 of a pair from [`solve_multiplicative_pair`].
pub fn swap_labels(
    pair: (MultiplicativeSolution, MultiplicativeSolution),
) -> (MultiplicativeSolution, MultiplicativeSolution) {
    let (w1, w2) = pair;
    (
        MultiplicativeSolution { label: 1, ..w2 },
        MultiplicativeSolution { label: 2, ..w1 },
    )
}

/// `(w(z), w'(z))` from the Laurent series, `z^ν` evaluated with `conv`.
pub fn evaluate_multiplicative(
    w: &MultiplicativeSolution,
    z: Complex64,
    conv: ArgConvention,
    tol: &Tolerances,
) -> Result<(Complex64, Complex64)> {
    if z == Complex64::ZERO {
        return Err(Error::InvalidInput("evaluation at z = 0".into()));
    }
    let mut terms = Vec::with_capacity(w.coeffs.len());
    let zi = z.inv();
    // z^n for n = −M…N, built outward from n = 0
    let mut pow = vec![Complex64::ZERO; w.coeffs.len()];
    let m = w.m_lo;
    pow[m] = Complex64::new(1.0, 0.0);
    for i in (0..m).rev() {
        pow[i] = pow[i + 1] * zi;
    }
    for i in m + 1..pow.len() {
        pow[i] = pow[i - 1] * z;
    }
    let mut sum = Complex64::ZERO;
    let mut dsum = Complex64::ZERO;
    for (i, (c, p)) in w.coeffs.iter().zip(&pow).enumerate() {
        let n = i as f64 - m as f64;
        let t = c * p;
        terms.push(t.norm());
        sum += t;
        dsum += t * (n + w.nu);
    }
    let max = terms.iter().cloned().fold(0.0, f64::max);
    let edge = terms[0].max(terms[terms.len() - 1]);
    if !(edge <= tol.series_tail_tol * max) {
        return Err(Error::InsufficientTruncation(format!(
            "edge term {edge:e} vs max term {max:e} at z = {z}"
        )));
    }
    let zn = branch_power(z, w.nu, conv);
    Ok((zn * sum, zn * dsum * zi))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qes(a2: f64) -> DcheParams {
        DcheParams::from_real([-1.0, 0.8, 31.0 / 25.0, 0.6, a2]).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn circuit_matrix_has_unit_determinant() {
        let tol = Tolerances::default();
        for a2 in [-0.1, -0.25, -0.4] {
            let cm = compute_circuit_matrix(&qes(a2), &tol).unwrap();
            assert!((cm.det - 1.0).norm() < 1e-10, "{}", cm.det);
            assert!((cm.lambda1 * cm.lambda2 - 1.0).norm() < 1e-10);
        }
    }

    #[test]
    fn circuit_eigenvalues_match_known_index() {
        let cm = compute_circuit_matrix(&qes(-0.25), &Tolerances::default()).unwrap();
        let want = Complex64::from_polar(1.0, -0.8 * PI);
        assert!((cm.lambda1 - want).norm() < 1e-9, "{}", cm.lambda1);
        let (n1, n2) = index_seeds(&cm).unwrap();
        assert!((n1 - c(-0.4, 0.0)).norm() < 1e-9);
        assert!((n2 - c(0.4, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn diagonal_circuit_seeds() {
        let l = Complex64::from_polar(1.0, 2.0 * PI * 0.3);
        let cm = CircuitMatrix {
            c11: l,
            c12: Complex64::ZERO,
            c21: Complex64::ZERO,
            c22: l.inv(),
            det: c(1.0, 0.0),
            lambda1: l.inv(),
            lambda2: l,
            disc: (l - l.inv()) * (l - l.inv()),
        };
        let (n1, n2) = index_seeds(&cm).unwrap();
        assert!((n1 - c(-0.3, 0.0)).norm() < 1e-14);
        assert!((n2 - c(0.3, 0.0)).norm() < 1e-14);

        let degenerate = CircuitMatrix {
            c11: c(-1.0, 0.0),
            c22: c(-1.0, 0.0),
            lambda1: c(-1.0, 0.0),
            lambda2: c(-1.0, 0.0),
            disc: Complex64::ZERO,
            ..cm
        };
        assert!(matches!(index_seeds(&degenerate), Err(Error::LogarithmicCase { .. })));
    }

    #[test]
    fn reduction_is_half_open() {
        assert_eq!(reduce_index(c(0.5, 1.0)).0, c(-0.5, 1.0));
        assert_eq!(reduce_index(c(-0.5, 0.0)).0, c(-0.5, 0.0));
        assert_eq!(reduce_index(c(1.25, 0.0)), (c(0.25, 0.0), 1));
        assert_eq!(reduce_index(c(0.5 - 1e-12, 0.0)).1, 1);
    }

    #[test]
    fn seed_is_unit_norm_and_reduces_residual() {
        let a = qes(-0.25);
        let nu = c(-0.4, 0.0);
        let (m, n) = (10, 10);
        let one = seed_coefficients(&a, nu, m, n).unwrap();
        let norm: f64 = one.iter().map(|x| x.norm_sqr()).sum();
        assert!((norm - 1.0).abs() < 1e-14);
        let t = recurrence_matrix(&a, nu, m, n, 0);
        let r2 = max_abs(&t.mul_vec(&one));
        // one inverse-iteration round only
        let lu = LuFactor::new(t.clone()).unwrap();
        let mut x = vec![c(1.0, 0.0); m + n + 1];
        unit_normalize(&mut x);
        let mut x = lu.solve(&x).unwrap();
        unit_normalize(&mut x);
        let r1 = max_abs(&t.mul_vec(&x));
        assert!(r2 <= r1, "{r2} > {r1}");
        assert!(seed_coefficients(&a, nu, 4, 10).is_err());
    }

    #[test]
    fn newton_reaches_table_indices() {
        let tol = Tolerances::default();
        let (w1, w2) = solve_multiplicative_pair(&qes(-0.25), &tol).unwrap();
        assert!((w1.nu - c(-0.4, 0.0)).norm() < 1e-10, "{}", w1.nu);
        assert!((w1.nu + w2.nu).norm() < 1e-10);
        let (w1, _) = solve_multiplicative_pair(&qes(-0.3), &tol).unwrap();
        assert!((w1.nu - c(0.0, 0.509_507_933_497)).norm() < 1e-9, "{}", w1.nu);
    }

    #[test]
    fn converged_solution_invariants() {
        let (w1, w2) = solve_multiplicative_pair(&qes(-0.1), &Tolerances::default()).unwrap();
        for w in [&w1, &w2] {
            assert!(w.nu.re.abs() <= 0.5 + 1e-10);
            assert_eq!(w.coeff(0), c(1.0, 0.0));
            assert!(w.recurrence_residual <= 1e-12, "{}", w.recurrence_residual);
            assert!(w.tails_decayed());
        }
        // boundary indices: solution 1 sits at −1/2, solution 2 at +1/2
        assert!((w1.nu.re + 0.5).abs() < 1e-10 && (w2.nu.re - 0.5).abs() < 1e-10);
    }

    #[test]
    fn shifting_keeps_the_function() {
        let (w1, _) = solve_multiplicative_pair(&qes(-0.2), &Tolerances::default()).unwrap();
        let tol = Tolerances::default();
        let z = c(0.7, 0.4);
        let (v, d) = evaluate_multiplicative(&w1, z, ArgConvention::UpperClosed, &tol).unwrap();
        let s = w1.shifted(1).unwrap();
        let (vs, ds) = evaluate_multiplicative(&s, z, ArgConvention::UpperClosed, &tol).unwrap();
        // same function up to the c₀ renormalization factor
        let f = w1.coeff(1);
        assert!((vs * f - v).norm() < 1e-12 * v.norm());
        assert!((ds * f - d).norm() < 1e-12 * d.norm());
    }

    #[test]
    fn evaluation_at_one_sums_coefficients() {
        let (w1, _) = solve_multiplicative_pair(&qes(-0.25), &Tolerances::default()).unwrap();
        let (v, d) = evaluate_multiplicative(&w1, c(1.0, 0.0), ArgConvention::UpperClosed, &Tolerances::default()).unwrap();
        let sum: Complex64 = w1.coeffs.iter().sum();
        assert!((v - sum).norm() < 1e-14 * sum.norm());
        let dsum: Complex64 = (-(w1.m_lo as i64)..=w1.n_hi as i64)
            .map(|n| w1.coeff(n) * (n as f64 + w1.nu))
            .sum();
        assert!((d - dsum).norm() < 1e-13 * dsum.norm());
        assert!(evaluate_multiplicative(&w1, Complex64::ZERO, ArgConvention::UpperClosed, &Tolerances::default()).is_err());
    }

    #[test]
    fn monodromy_matches_index() {
        let tol = Tolerances::default();
        let (w1, _) = solve_multiplicative_pair(&qes(-0.2), &tol).unwrap();
        let one = c(1.0, 0.0);
        let (v, d) = evaluate_multiplicative(&w1, one, ArgConvention::UpperClosed, &tol).unwrap();
        let end = integrate_path(dche_field(w1.params), &Arc::unit_circle(), &[v, d], &tol).unwrap();
        let factor = (Complex64::new(0.0, 2.0 * PI) * w1.nu).exp();
        assert!((end[0] - factor * v).norm() < 1e-9 * (factor * v).norm());
        assert!((end[1] - factor * d).norm() < 1e-9 * (factor * d).norm());
    }

    #[test]
    fn dump_round_trip() {
        let (w1, _) = solve_multiplicative_pair(&qes(-0.25), &Tolerances::default()).unwrap();
        let d = SolutionDump::from_json(&w1.to_json()).unwrap();
        let back = MultiplicativeSolution::from_dump(&d, w1.params, 1).unwrap();
        assert_eq!(back.coeffs, w1.coeffs);
        assert_eq!(back.nu, w1.nu);
        assert!(SolutionDump::from_json(r#"{"nu":[0,0],"m_lo":1,"n_hi":1,"coeffs":[[1,0]]}"#).is_err());
    }
}
