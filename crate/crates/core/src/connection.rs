//! Wronskians between multiplicative and formal solutions, and the
//! connection factors `T_{j,t}` built from them.
//!
//! A multiplicative solution `w_j` and a formal solution `w_t` have a
//! constant Wronskian. Re-expanding the exponential factor of `w_t` with
//! Heaviside's series `e^ξ ~ Σ_n ξ^{n+δ}/Γ(n+1+δ)` and matching powers of
//! `z` gives it as a Gamma factor times a finite coefficient sum (γ at
//! infinity, η at the origin), for any admissible `n`. The branch of
//! `(−α)^{n+ν+μ}` depends on the side of the Stokes ray that `arg z` is on;
//! on the ray itself the two one-sided values are averaged.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::asymptotics::{formal_solutions, End, FormalSolution, DEFAULT_RATIO_COUNT};
use crate::error::{Error, Result};
use crate::floquet::{evaluate_multiplicative, MultiplicativeSolution};
use crate::model::DcheParams;
use crate::numerics::{arg, complex_gamma, polar_power, ArgConvention, Tolerances};

/// Accepted relative spread of a Wronskian across `n, n+1, n+2`.
pub const CONSISTENCY_LIMIT: f64 = 1e-8;
const TAIL_RUN: usize = 5;
/// Extra coefficients added on each side when a sum runs out of window.
pub const RETRY_EXTRA: usize = 16;
const MAX_RETRIES: usize = 4;

/// Smallest `n ≥ 1` with `|(n+δ)(n+δ−1)| > Σ|A_p| + 2`.
pub fn select_n(a: &DcheParams, delta: Complex64) -> i64 {
    let bound = a.abs_sum() + 2.0;
    let mut n = 1i64;
    while ((n as f64 + delta) * (n as f64 - 1.0 + delta)).norm() <= bound {
        n += 1;
    }
    n
}

/// Sum with tail control; returns the value and Σ|term|.
fn tail_sum(mut term: impl FnMut(usize) -> Option<Complex64>, tol: &Tolerances, what: &str) -> Result<(Complex64, f64)> {
    let mut sum = Complex64::ZERO;
    let mut abs_sum = 0.0;
    let mut max: f64 = 0.0;
    let mut small_run = 0;
    let mut m = 0;
    while let Some(t) = term(m) {
        sum += t;
        abs_sum += t.norm();
        max = max.max(t.norm());
        if t.norm() <= tol.series_tail_tol * max {
            small_run += 1;
            if small_run >= TAIL_RUN {
                return Ok((sum, abs_sum));
            }
        } else {
            small_run = 0;
        }
        m += 1;
    }
    Err(Error::InsufficientTruncation(format!(
        "{what}: coefficient window exhausted after {m} terms"
    )))
}

fn gamma_sum(n: i64, w: &MultiplicativeSolution, f: &FormalSolution, tol: &Tolerances) -> Result<(Complex64, f64)> {
    let a = f.coefficients(f.ratios.len());
    let (alpha, mu, nu) = (f.lead, f.power, w.nu);
    let top = w.n_hi as i64;
    tail_sum(
        |m| {
            let k = n + m as i64;
            if k + 1 > top || m >= a.len() {
                return None;
            }
            let lin = (n + 2 * m as i64 + 1) as f64 + nu - mu;
            Some(a[m] * (alpha * w.coeff(k) - lin * w.coeff(k + 1)))
        },
        tol,
        "gamma sum",
    )
}

fn eta_sum(n: i64, w: &MultiplicativeSolution, f: &FormalSolution, tol: &Tolerances) -> Result<(Complex64, f64)> {
    let b = f.coefficients(f.ratios.len());
    let (beta, rho, nu) = (f.lead, f.power, w.nu);
    let bottom = -(w.m_lo as i64);
    tail_sum(
        |m| {
            let k = n - m as i64;
            if k + 1 < bottom || m >= b.len() {
                return None;
            }
            let lin = (n - 2 * m as i64 + 1) as f64 + nu - rho;
            Some(b[m] * (-beta * w.coeff(k + 2) - lin * w.coeff(k + 1)))
        },
        tol,
        "eta sum",
    )
}

/// `γ_n = Σ_m a_m [α c_{n+m} − (n+2m+1+ν−μ) c_{n+m+1}]`.
pub fn gamma_coefficient(n: i64, w: &MultiplicativeSolution, f: &FormalSolution, tol: &Tolerances) -> Result<Complex64> {
    Ok(gamma_sum(n, w, f, tol)?.0)
}

/// `η_n = Σ_m b_m [−β c_{n−m+2} − (n−2m+1+ν−ρ) c_{n−m+1}]`.
pub fn eta_coefficient(n: i64, w: &MultiplicativeSolution, f: &FormalSolution, tol: &Tolerances) -> Result<Complex64> {
    Ok(eta_sum(n, w, f, tol)?.0)
}

/// How to treat `arg z` on a Stokes ray.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RayPolicy {
    /// Use the on-ray (averaged) formula when on the ray.
    Auto,
    /// Refuse to evaluate on the ray.
    StrictOffRay,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WronskianResult {
    pub value: Complex64,
    pub n_used: i64,
    pub consistency_err: f64,
    pub onray: bool,
}

/// Angle of the ray test and the base argument of the power for a formal
/// solution: `(arg z + arg α, arg α)` at infinity, `(arg β − arg z, arg β)`
/// at the origin.
fn ray_geometry(f: &FormalSolution, arg_z: f64) -> (f64, f64) {
    match f.end {
        End::Infinity => {
            let t = arg(f.lead, ArgConvention::LowerClosed);
            (arg_z + t, t)
        }
        End::Origin => {
            let t = arg(f.lead, ArgConvention::UpperClosed);
            (t - arg_z, t)
        }
    }
}

/// The argument assigned to `−lead`: `arg lead ± π`, chosen so that the
/// Heaviside variable stays within |arg| < π.
fn minus_lead_arg(phi: f64, base: f64) -> f64 {
    if (phi + PI).abs() < PI {
        base + PI
    } else {
        base - PI
    }
}

/// One Wronskian value at a fixed `n`, with its intrinsic scale.
fn wronskian_at(
    n: i64,
    w: &MultiplicativeSolution,
    f: &FormalSolution,
    phi: f64,
    base: f64,
    onray: bool,
    tol: &Tolerances,
) -> Result<(Complex64, f64)> {
    let (sum, abs_sum, shift) = match f.end {
        End::Infinity => {
            let (s, a) = gamma_sum(n, w, f, tol)?;
            (s, a, w.nu + f.power)
        }
        End::Origin => {
            let (s, a) = eta_sum(-n, w, f, tol)?;
            (s, a, -(w.nu + f.power))
        }
    };
    let e = shift + n as f64;
    let g = complex_gamma(e + 1.0)?;
    let r = f.lead.norm();
    let factor = if onray {
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        // cos is even, so cos(π(ν+μ)) and cos(π(ν+ρ)) are both cos(π·shift)
        sign * (PI * shift).cos() * g / polar_power(r, base, e)
    } else {
        g / polar_power(r, minus_lead_arg(phi, base), e)
    };
    Ok((factor * sum, factor.norm() * abs_sum))
}

/// `W[w_j, w_t]` for a multiplicative and a formal solution along `arg z`.
pub fn wronskian_mult_formal(
    w: &MultiplicativeSolution,
    f: &FormalSolution,
    arg_z: f64,
    policy: RayPolicy,
    tol: &Tolerances,
) -> Result<WronskianResult> {
    if !(arg_z > -PI && arg_z <= PI) {
        return Err(Error::InvalidInput(format!("arg z = {arg_z} outside (-pi, pi]")));
    }
    let (phi, base) = ray_geometry(f, arg_z);
    let onray = phi.abs() <= tol.onray_angle_tol;
    if onray && policy == RayPolicy::StrictOffRay {
        return Err(Error::AmbiguousBranch { arg_z });
    }
    let delta = match f.end {
        End::Infinity => w.nu + f.power,
        End::Origin => -(w.nu + f.power),
    };
    let n = select_n(&w.params, delta);
    let mut vals = Vec::with_capacity(3);
    let mut scale: f64 = 0.0;
    for k in n..n + 3 {
        let (v, s) = wronskian_at(k, w, f, phi, base, onray, tol)?;
        vals.push(v);
        scale = scale.max(s);
    }
    let value = vals[0];
    let spread = vals[1..].iter().map(|v| (v - value).norm()).fold(0.0, f64::max);
    // measured against the term scale: some Wronskians vanish identically
    let consistency_err = if spread == 0.0 { 0.0 } else { spread / scale };
    if !(consistency_err <= CONSISTENCY_LIMIT) {
        return Err(Error::InconsistentWronskian { n, spread: consistency_err });
    }
    Ok(WronskianResult {
        value,
        n_used: n,
        consistency_err,
        onray,
    })
}

/// `W[w₃, w₄] = 2α₄` or `W[w₅, w₆] = 2β₅` (and the negatives when swapped).
pub fn wronskian_formal_pair(fa: &FormalSolution, fb: &FormalSolution) -> Result<Complex64> {
    if fa.end != fb.end || fa.label == fb.label {
        return Err(Error::InvalidInput("need the two formal solutions of one end".into()));
    }
    // W = lead_b − lead_a for infinity, lead_a − lead_b at the origin
    Ok(match fa.end {
        End::Infinity => fb.lead - fa.lead,
        End::Origin => fa.lead - fb.lead,
    })
}

/// Diagnostics kept alongside a connection table.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionDiagnostics {
    /// `wronskians[j−1][t−3] = W[w_j, w_t]`.
    pub wronskians: [[WronskianResult; 4]; 2],
    /// `W[w₁, w₂]` from the Laurent series at z = 1.
    pub w12_direct: Complex64,
    /// `(T₁₃T₂₄ − T₁₄T₂₃)·2α₄`.
    pub cross_infinity: Complex64,
    /// `(T₁₅T₂₆ − T₁₆T₂₅)·2β₅`.
    pub cross_origin: Complex64,
    pub cross_err: f64,
    pub truncations: [(usize, usize); 2],
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionTable {
    pub arg_z: f64,
    /// `t[j−1][t−3] = T_{j,t}`.
    pub t: [[Complex64; 4]; 2],
    pub alpha4: Complex64,
    pub beta5: Complex64,
    pub diag: ConnectionDiagnostics,
}

impl ConnectionTable {
    /// `T_{j,t}` for j ∈ {1, 2}, t ∈ {3, 4, 5, 6}.
    pub fn get(&self, j: usize, t: usize) -> Complex64 {
        assert!((1..=2).contains(&j) && (3..=6).contains(&t), "no entry T{j}{t}");
        self.t[j - 1][t - 3]
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let pair = |c: Complex64| serde_json::json!([c.re, c.im]);
        let mut t = BTreeMap::new();
        let mut n_used = BTreeMap::new();
        let mut spread = BTreeMap::new();
        let mut onray = BTreeMap::new();
        for j in 1..=2 {
            for s in 3..=6 {
                let key = format!("{j}{s}");
                let wr = &self.diag.wronskians[j - 1][s - 3];
                t.insert(key.clone(), pair(self.get(j, s)));
                n_used.insert(key.clone(), serde_json::json!(wr.n_used));
                spread.insert(key.clone(), serde_json::json!(wr.consistency_err));
                onray.insert(key, serde_json::json!(wr.onray));
            }
        }
        serde_json::json!({
            "arg_z": self.arg_z,
            "T": t,
            "diag": {
                "n_used": n_used,
                "consistency_err": spread,
                "onray": onray,
                "w12_direct": pair(self.diag.w12_direct),
                "cross_infinity": pair(self.diag.cross_infinity),
                "cross_origin": pair(self.diag.cross_origin),
                "cross_err": self.diag.cross_err,
                "truncations": self.diag.truncations.iter().map(|(m, n)| [*m, *n]).collect::<Vec<_>>(),
            }
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_json_value()).expect("table serialize")
    }
}

/// Direct `W[w₁, w₂] = w₁w₂' − w₁'w₂` at z = 1.
pub fn direct_wronskian(w1: &MultiplicativeSolution, w2: &MultiplicativeSolution, tol: &Tolerances) -> Result<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    let (v1, d1) = evaluate_multiplicative(w1, one, ArgConvention::UpperClosed, tol)?;
    let (v2, d2) = evaluate_multiplicative(w2, one, ArgConvention::UpperClosed, tol)?;
    Ok(v1 * d2 - d1 * v2)
}

/// Connection factors for a solved pair and the four formal solutions
/// `[w₃, w₄, w₅, w₆]`.
pub fn connection_table(
    w1: &MultiplicativeSolution,
    w2: &MultiplicativeSolution,
    formals: &[FormalSolution; 4],
    arg_z: f64,
    tol: &Tolerances,
) -> Result<ConnectionTable> {
    let jobs: Vec<(usize, usize)> = (0..2).flat_map(|j| (0..4).map(move |t| (j, t))).collect();
    let results: Vec<Result<WronskianResult>> = jobs
        .par_iter()
        .map(|&(j, t)| {
            let w = if j == 0 { w1 } else { w2 };
            wronskian_mult_formal(w, &formals[t], arg_z, RayPolicy::Auto, tol)
        })
        .collect();
    let mut wr = [[None; 4]; 2];
    for (&(j, t), r) in jobs.iter().zip(results) {
        wr[j][t] = Some(r?);
    }
    let wr = wr.map(|row| row.map(|x| x.expect("all entries computed")));

    let w34 = wronskian_formal_pair(&formals[0], &formals[1])?;
    let w56 = wronskian_formal_pair(&formals[2], &formals[3])?;
    let mut t = [[Complex64::ZERO; 4]; 2];
    for j in 0..2 {
        t[j][0] = wr[j][1].value / w34;
        t[j][1] = wr[j][0].value / -w34;
        t[j][2] = wr[j][3].value / w56;
        t[j][3] = wr[j][2].value / -w56;
    }
    let cross_infinity = (t[0][0] * t[1][1] - t[0][1] * t[1][0]) * w34;
    let cross_origin = (t[0][2] * t[1][3] - t[0][3] * t[1][2]) * w56;
    let w12_direct = direct_wronskian(w1, w2, tol)?;
    let scale = w12_direct
        .norm()
        .max((t[0][0] * t[1][1] * w34).norm())
        .max((t[0][1] * t[1][0] * w34).norm())
        .max((t[0][2] * t[1][3] * w56).norm())
        .max((t[0][3] * t[1][2] * w56).norm());
    let cross_err = (cross_infinity - w12_direct).norm().max((cross_origin - w12_direct).norm()) / scale;
    Ok(ConnectionTable {
        arg_z,
        t,
        alpha4: formals[1].lead,
        beta5: formals[2].lead,
        diag: ConnectionDiagnostics {
            wronskians: wr,
            w12_direct,
            cross_infinity,
            cross_origin,
            cross_err,
            truncations: [(w1.m_lo, w1.n_hi), (w2.m_lo, w2.n_hi)],
        },
    })
}

/// Ratio count used for the formal solutions paired with a truncation.
pub fn ratio_count(w1: &MultiplicativeSolution, w2: &MultiplicativeSolution) -> usize {
    DEFAULT_RATIO_COUNT.max(w1.m_lo.max(w2.m_lo) + w1.n_hi.max(w2.n_hi) + 8)
}

/// Connection table, widening the coefficient window (up to
/// `MAX_RETRIES` times) when a coefficient sum runs out of terms. Returns the
/// (possibly re-solved) pair as well.
pub fn connection_table_with_retry(
    w1: &MultiplicativeSolution,
    w2: &MultiplicativeSolution,
    arg_z: f64,
    tol: &Tolerances,
) -> Result<(ConnectionTable, MultiplicativeSolution, MultiplicativeSolution)> {
    let (mut v1, mut v2) = (w1.clone(), w2.clone());
    let mut retries = 0;
    loop {
        let formals = formal_solutions(&v1.params, ratio_count(&v1, &v2))?;
        match connection_table(&v1, &v2, &formals, arg_z, tol) {
            Ok(tbl) => return Ok((tbl, v1, v2)),
            Err(Error::InsufficientTruncation(_)) | Err(Error::InconsistentWronskian { .. }) if retries < MAX_RETRIES => {
                v1 = v1.widened(RETRY_EXTRA, tol)?;
                v2 = v2.widened(RETRY_EXTRA, tol)?;
                retries += 1;
            }
            Err(e) => return Err(e),
        }
    }
}

/// `Σ_{n=n_lo}^{n_hi} ξ^{n+δ}/Γ(n+1+δ)`, terms at Gamma poles being zero.
pub fn heaviside_partial_sum(xi: Complex64, delta: Complex64, n_lo: i64, n_hi: i64) -> Result<Complex64> {
    if xi == Complex64::ZERO {
        return Err(Error::InvalidInput("xi = 0".into()));
    }
    let t = arg(xi, ArgConvention::UpperClosed);
    if t.abs() >= PI {
        return Err(Error::BranchViolation(format!("{xi}")));
    }
    let mut sum = Complex64::ZERO;
    for n in n_lo..=n_hi {
        let e = delta + n as f64;
        match complex_gamma(e + 1.0) {
            Ok(g) => sum += polar_power(xi.norm(), t, e) / g,
            Err(Error::PoleOfGamma(_)) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(sum)
}
