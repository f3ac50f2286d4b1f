//! Formal (asymptotic) solutions at the two irregular singular points.
//!
//! At infinity `w ~ e^{αz} z^μ Σ a_m z^{−m}`, at the origin
//! `w ~ e^{β/z} z^ρ Σ b_m z^m`. Coefficients are stored as successive
//! quotients `q_m = a_m / a_{m−1}` to keep the factorially growing series
//! representable.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::DcheParams;
use crate::numerics::{arg, branch_power, ArgConvention};

/// Default number of stored ratios.
pub const DEFAULT_RATIO_COUNT: usize = 64;
const RATIO_FLOOR: f64 = 1e-290;
const OVERFLOW_GUARD: f64 = 1e250;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum End {
    Infinity,
    Origin,
}

/// One formal solution. At infinity `lead = α`, `power = μ`; at the origin
/// `lead = β`, `power = ρ`.
#[derive(Debug, Clone, PartialEq)]
pub struct FormalSolution {
    pub end: End,
    /// 3 or 4 at infinity, 5 or 6 at the origin.
    pub label: u8,
    pub lead: Complex64,
    pub power: Complex64,
    /// `ratios[m − 1] = q_m`.
    pub ratios: Vec<Complex64>,
    /// Set when the series is a finite sum; coefficients past the stored
    /// ratios are zero.
    pub terminated: bool,
}

pub type FormalSolutionInfinity = FormalSolution;
pub type FormalSolutionOrigin = FormalSolution;

/// Stubs `(w₃, w₄)`: `α = ±√(−A₂)`, label 4 for arg α ∈ [−π/2, π/2).
pub fn exponents_at_infinity(a: &DcheParams) -> (FormalSolution, FormalSolution) {
    let r = (-a.a(2)).sqrt();
    let in_window = |x: Complex64| {
        let t = arg(x, ArgConvention::LowerClosed);
        (-FRAC_PI_2..FRAC_PI_2).contains(&t)
    };
    let (a4, a3) = if in_window(r) { (r, -r) } else { (-r, r) };
    let stub = |label, alpha: Complex64| FormalSolution {
        end: End::Infinity,
        label,
        lead: alpha,
        power: -a.a(1) / (2.0 * alpha),
        ratios: Vec::new(),
        terminated: false,
    };
    (stub(3, a3), stub(4, a4))
}

/// Stubs `(w₅, w₆)`: `β = ±√(−A₋₂)`, label 6 for arg β ∈ (−π/2, π/2].
pub fn exponents_at_origin(a: &DcheParams) -> (FormalSolution, FormalSolution) {
    let r = (-a.a(-2)).sqrt();
    let in_window = |x: Complex64| {
        let t = arg(x, ArgConvention::UpperClosed);
        t > -FRAC_PI_2 && t <= FRAC_PI_2
    };
    let (b6, b5) = if in_window(r) { (r, -r) } else { (-r, r) };
    let stub = |label, beta: Complex64| FormalSolution {
        end: End::Origin,
        label,
        lead: beta,
        power: 1.0 + a.a(-1) / (2.0 * beta),
        ratios: Vec::new(),
        terminated: false,
    };
    (stub(5, b5), stub(6, b6))
}

impl FormalSolution {
    /// `P(m)`, the coefficient of the `m − 1` term in the recurrence.
    fn poly(&self, a: &DcheParams, m: f64) -> Complex64 {
        let p = self.power;
        let a0 = a.a(0);
        match self.end {
            End::Infinity => (m - p) * (m - 1.0 - p) + a0,
            End::Origin => (m - 1.0 + p) * (m - 2.0 + p) + a0,
        }
    }

    /// The two tail coefficients `(t₁, t₂)` multiplying `a_{m−2}`, `a_{m−3}`.
    fn tails(&self, a: &DcheParams) -> (Complex64, Complex64) {
        match self.end {
            End::Infinity => (a.a(-1), a.a(-2)),
            End::Origin => (a.a(1), a.a(2)),
        }
    }

    /// Raw coefficients `a_0 = 1, a_1, …` up to `max_m`, truncated early if
    /// they become too large to represent safely.
    pub fn coefficients(&self, max_m: usize) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(1.0, 0.0)];
        let mut cur = out[0];
        for q in self.ratios.iter().take(max_m) {
            cur *= q;
            if !(cur.norm() < OVERFLOW_GUARD) {
                break;
            }
            out.push(cur);
        }
        out
    }

    /// Coefficient `a_m` (zero past a terminated series).
    pub fn coefficient(&self, m: usize) -> Option<Complex64> {
        let c = self.coefficients(m);
        if m < c.len() {
            Some(c[m])
        } else if self.terminated && m > self.ratios.len() {
            Some(Complex64::ZERO)
        } else {
            None
        }
    }
}

fn fill_ratios(a: &DcheParams, mut f: FormalSolution, count: usize) -> Result<FormalSolution> {
    if count < 3 {
        return Err(Error::InvalidInput("ratio count must be at least 3".into()));
    }
    let (t1, t2) = f.tails(a);
    let two_lead = 2.0 * f.lead;
    let mut q: Vec<Complex64> = Vec::with_capacity(count);
    for m in 1..=count {
        let mf = m as f64;
        let mut rhs = f.poly(a, mf);
        if m >= 2 {
            rhs += t1 / q[m - 2];
        }
        if m >= 3 {
            rhs += t2 / (q[m - 2] * q[m - 3]);
        }
        let qm = rhs / (two_lead * mf);
        q.push(qm);
        if qm.norm() < RATIO_FLOOR {
            // a_m = 0: the series ends here only if nothing feeds later terms
            if t1 == Complex64::ZERO && t2 == Complex64::ZERO {
                f.ratios = q;
                f.terminated = true;
                return Ok(f);
            }
            return Err(Error::RatioBreakdown(m));
        }
    }
    f.ratios = q;
    f.terminated = false;
    Ok(f)
}

/// Ratios `q_1…q_count` for a formal solution at infinity.
pub fn coefficient_ratios_infinity(a: &DcheParams, stub: FormalSolution, count: usize) -> Result<FormalSolution> {
    if stub.end != End::Infinity {
        return Err(Error::InvalidInput("expected a formal solution at infinity".into()));
    }
    fill_ratios(a, stub, count)
}

/// Ratios `q_1…q_count` for a formal solution at the origin.
pub fn coefficient_ratios_origin(a: &DcheParams, stub: FormalSolution, count: usize) -> Result<FormalSolution> {
    if stub.end != End::Origin {
        return Err(Error::InvalidInput("expected a formal solution at the origin".into()));
    }
    fill_ratios(a, stub, count)
}

/// `[w₃, w₄, w₅, w₆]` with `count` ratios each.
pub fn formal_solutions(a: &DcheParams, count: usize) -> Result<[FormalSolution; 4]> {
    let (w3, w4) = exponents_at_infinity(a);
    let (w5, w6) = exponents_at_origin(a);
    Ok([
        coefficient_ratios_infinity(a, w3, count)?,
        coefficient_ratios_infinity(a, w4, count)?,
        coefficient_ratios_origin(a, w5, count)?,
        coefficient_ratios_origin(a, w6, count)?,
    ])
}

/// Optimally truncated value of a formal solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticValue {
    pub value: Complex64,
    pub derivative: Complex64,
    pub est_error: f64,
    pub terms_used: usize,
}

/// Sums the formal series up to its smallest term. The exponential factor
/// and `z`-power use `conv` for arg z.
pub fn evaluate_asymptotic(f: &FormalSolution, z: Complex64, conv: ArgConvention) -> Result<AsymptoticValue> {
    if z == Complex64::ZERO {
        return Err(Error::InvalidInput("asymptotic evaluation at z = 0".into()));
    }
    let x = match f.end {
        End::Infinity => z.inv(),
        End::Origin => z,
    };
    let coeffs = f.coefficients(f.ratios.len());
    let mut terms = Vec::with_capacity(coeffs.len());
    let mut xm = Complex64::new(1.0, 0.0);
    for c in &coeffs {
        terms.push(c * xm);
        xm *= x;
    }
    let mut k = 0;
    while k + 1 < terms.len() && terms[k + 1].norm() <= terms[k].norm() {
        k += 1;
    }
    let exhausted = f.terminated && k + 1 == terms.len();
    if k == 0 && terms.len() > 1 && !exhausted {
        return Err(Error::NoDecreasingTerm(format!(
            "formal solution {} at z = {z}",
            f.label
        )));
    }
    let (pref, dfac): (Complex64, Box<dyn Fn(usize) -> Complex64>) = match f.end {
        End::Infinity => {
            let pref = (f.lead * z).exp() * branch_power(z, f.power, conv);
            let (alpha, mu) = (f.lead, f.power);
            (pref, Box::new(move |m| alpha + (mu - m as f64) / z))
        }
        End::Origin => {
            let pref = (f.lead / z).exp() * branch_power(z, f.power, conv);
            let (beta, rho) = (f.lead, f.power);
            (pref, Box::new(move |m| -beta / (z * z) + (rho + m as f64) / z))
        }
    };
    let mut sum = Complex64::ZERO;
    let mut dsum = Complex64::ZERO;
    for (m, t) in terms.iter().enumerate().take(k + 1) {
        sum += t;
        dsum += t * dfac(m);
    }
    let omitted = if exhausted { 0.0 } else { terms.get(k + 1).map_or(0.0, |t| t.norm()) };
    Ok(AsymptoticValue {
        value: pref * sum,
        derivative: pref * dsum,
        est_error: omitted * pref.norm(),
        terms_used: k + 1,
    })
}
