//! Global solutions assembled from the connection data: the solution that is
//! regular at the origin, bound states in the parameter `A₂`, matching of a
//! Jaffé–Lay initial-value problem, and wavefunction export.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::connection::{connection_table_with_retry, ConnectionTable};
use crate::error::{Error, Result};
use crate::floquet::{evaluate_multiplicative, solve_multiplicative_pair, MultiplicativeSolution};
use crate::model::{DcheParams, JaffeLayParams};
use crate::numerics::{ArgConvention, Tolerances};

/// Default number of grid samples in a bound-state scan.
pub const DEFAULT_GRID: usize = 32;
const SECANT_MAX_ITER: usize = 60;
const ROOT_TOL: f64 = 1e-10;

/// `w_reg = ζ₁w₁ + ζ₂w₂ ~ w₅` as z → 0⁺, and its behaviour
/// `w_reg ~ T_reg,3 w₃ + T_reg,4 w₄` at infinity.
#[derive(Debug, Clone, PartialEq)]
pub struct RegularCombination {
    pub zeta1: Complex64,
    pub zeta2: Complex64,
    pub t_reg3: Complex64,
    pub t_reg4: Complex64,
    pub source_table: ConnectionTable,
}

impl RegularCombination {
    /// Residuals of `ζ₁T₁₅ + ζ₂T₂₅ = 1` and `ζ₁T₁₆ + ζ₂T₂₆ = 0`.
    pub fn residuals(&self) -> (f64, f64) {
        let t = &self.source_table;
        let r5 = self.zeta1 * t.get(1, 5) + self.zeta2 * t.get(2, 5) - 1.0;
        let r6 = self.zeta1 * t.get(1, 6) + self.zeta2 * t.get(2, 6);
        (r5.norm(), r6.norm())
    }
}

pub fn regular_at_origin(tbl: &ConnectionTable) -> Result<RegularCombination> {
    let (t15, t25, t16, t26) = (tbl.get(1, 5), tbl.get(2, 5), tbl.get(1, 6), tbl.get(2, 6));
    let det = t15 * t26 - t25 * t16;
    let size = (t15 * t26).norm() + (t25 * t16).norm();
    if !(det.norm() > 1e-14 * size) {
        return Err(Error::NoRegularSelection);
    }
    let zeta1 = t26 / det;
    let zeta2 = -t16 / det;
    Ok(RegularCombination {
        zeta1,
        zeta2,
        t_reg3: zeta1 * tbl.get(1, 3) + zeta2 * tbl.get(2, 3),
        t_reg4: zeta1 * tbl.get(1, 4) + zeta2 * tbl.get(2, 4),
        source_table: tbl.clone(),
    })
}

/// Everything computed for one parameter set along `arg z`.
#[derive(Debug, Clone)]
pub struct Pipeline {
    pub w1: MultiplicativeSolution,
    pub w2: MultiplicativeSolution,
    pub table: ConnectionTable,
}

/// Multiplicative pair plus connection table.
pub fn run_pipeline(a: &DcheParams, arg_z: f64, tol: &Tolerances) -> Result<Pipeline> {
    let (w1, w2) = solve_multiplicative_pair(a, tol)?;
    let (table, w1, w2) = connection_table_with_retry(&w1, &w2, arg_z, tol)?;
    Ok(Pipeline { w1, w2, table })
}

/// A refined bound state.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundState {
    pub a2: f64,
    pub t_reg3: Complex64,
    pub t_reg4: Complex64,
    /// `|T_reg,4| / |T_reg,3|` at the root.
    pub residual: f64,
}

/// Result of a bound-state scan. Grid points where the pipeline failed are
/// listed with their error rather than aborting the scan.
#[derive(Debug, Clone)]
pub struct BoundStateScan {
    pub roots: Vec<BoundState>,
    pub samples: Vec<(f64, Complex64, Complex64)>,
    pub failures: Vec<(f64, Error)>,
}

fn regular_t(base: &DcheParams, a2: f64, tol: &Tolerances) -> Result<(Complex64, Complex64)> {
    let a = base.with_a2(Complex64::new(a2, 0.0)).validate()?;
    let p = run_pipeline(&a, 0.0, tol)?;
    let rc = regular_at_origin(&p.table)?;
    Ok((rc.t_reg3, rc.t_reg4))
}

fn is_real(x: Complex64) -> bool {
    x.im.abs() <= 1e-8 * x.norm()
}

/// Secant iteration on `T_reg,4(A₂)`, kept inside `[lo, hi]` by falling
/// back to bisection on the real part when a step leaves the bracket.
fn refine_root(
    base: &DcheParams,
    (lo, flo): (f64, Complex64),
    (hi, fhi): (f64, Complex64),
    tol: &Tolerances,
) -> Result<BoundState> {
    let (mut x0, mut f0) = (lo, flo);
    let (mut x1, mut f1) = (hi, fhi);
    let (mut blo, mut bhi) = (lo, hi);
    let mut flo_re = flo.re;
    for _ in 0..SECANT_MAX_ITER {
        let denom = f1 - f0;
        let mut x2 = if denom.norm() > 0.0 { x1 - (f1 * (x1 - x0) / denom).re } else { f64::NAN };
        if !(x2 > blo.min(bhi) && x2 < blo.max(bhi)) {
            x2 = 0.5 * (blo + bhi);
        }
        let (t3, f2) = regular_t(base, x2, tol)?;
        let residual = f2.norm() / t3.norm();
        if residual <= ROOT_TOL || (x2 - x1).abs() <= 1e-15 * x2.abs().max(1.0) {
            return Ok(BoundState {
                a2: x2,
                t_reg3: t3,
                t_reg4: f2,
                residual,
            });
        }
        if f2.re.signum() == flo_re.signum() {
            blo = x2;
            flo_re = f2.re;
        } else {
            bhi = x2;
        }
        x0 = x1;
        f0 = f1;
        x1 = x2;
        f1 = f2;
    }
    Err(Error::NoConvergence {
        iterations: SECANT_MAX_ITER,
        last_update: (x1 - x0).abs(),
    })
}

/// Scans `A₂ ∈ [lo, hi]` for zeros of `T_reg,4`, with `A₋₂…A₁` from `base`.
pub fn bound_state_search(base: &DcheParams, lo: f64, hi: f64, grid: usize, tol: &Tolerances) -> Result<BoundStateScan> {
    if !(lo.is_finite() && hi.is_finite()) || !(lo < hi) {
        return Err(Error::NoRootInInterval { lo, hi });
    }
    if grid < 2 {
        return Err(Error::InvalidInput("grid needs at least two points".into()));
    }
    let xs: Vec<f64> = (0..grid).map(|i| lo + (hi - lo) * i as f64 / (grid - 1) as f64).collect();
    let evals: Vec<Result<(Complex64, Complex64)>> = xs.par_iter().map(|&x| regular_t(base, x, tol)).collect();
    let mut samples = Vec::new();
    let mut failures = Vec::new();
    for (&x, r) in xs.iter().zip(evals) {
        match r {
            Ok((t3, t4)) => samples.push((x, t3, t4)),
            Err(e) => failures.push((x, e)),
        }
    }
    let mut roots: Vec<BoundState> = Vec::new();
    for pair in samples.windows(2) {
        let (x0, _, f0) = pair[0];
        let (x1, _, f1) = pair[1];
        let bracket = if is_real(f0) && is_real(f1) {
            f0.re == 0.0 || f0.re.signum() != f1.re.signum()
        } else {
            false
        };
        if bracket {
            let root = refine_root(base, (x0, f0), (x1, f1), tol)?;
            if !roots.iter().any(|r| (r.a2 - root.a2).abs() < 1e-9) {
                roots.push(root);
            }
        }
    }
    // complex-valued samples: refine from local minima of |T_reg,4|
    for i in 1..samples.len().saturating_sub(1) {
        let (x, _, f) = samples[i];
        if is_real(f) {
            continue;
        }
        let (_, _, fp) = samples[i - 1];
        let (xn, _, fn_) = samples[i + 1];
        if f.norm() < fp.norm() && f.norm() < fn_.norm() {
            if let Ok(root) = refine_root(base, (x, f), (xn, fn_), tol) {
                if root.residual <= ROOT_TOL && !roots.iter().any(|r| (r.a2 - root.a2).abs() < 1e-9) {
                    roots.push(root);
                }
            }
        }
    }
    if roots.is_empty() {
        return Err(Error::NoRootInInterval { lo, hi });
    }
    roots.sort_by(|a, b| a.a2.total_cmp(&b.a2));
    Ok(BoundStateScan {
        roots,
        samples,
        failures,
    })
}

/// Coefficients of `ξ₁w₁ + ξ₂w₂` reproducing the Jaffé–Lay initial data
/// `y(0) = 1, y'(0) = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchCoefficients {
    pub xi1: Complex64,
    pub xi2: Complex64,
}

/// Solves `ξ₁w₁(1) + ξ₂w₂(1) = 1`, `ξ₁w₁'(1) + ξ₂w₂'(1) = 1/2 − α/4`.
pub fn match_jaffe_lay(
    w1: &MultiplicativeSolution,
    w2: &MultiplicativeSolution,
    j: &JaffeLayParams,
    tol: &Tolerances,
) -> Result<MatchCoefficients> {
    if w1.params != w2.params {
        return Err(Error::ParameterMismatch);
    }
    let one = Complex64::new(1.0, 0.0);
    let (v1, d1) = evaluate_multiplicative(w1, one, ArgConvention::UpperClosed, tol)?;
    let (v2, d2) = evaluate_multiplicative(w2, one, ArgConvention::UpperClosed, tol)?;
    let det = v1 * d2 - v2 * d1;
    if !(det.norm() > 1e-14 * ((v1 * d2).norm() + (v2 * d1).norm())) {
        return Err(Error::SingularMatch);
    }
    let rhs = 0.5 - j.alpha / 4.0;
    Ok(MatchCoefficients {
        xi1: (d2 - v2 * rhs) / det,
        xi2: (v1 * rhs - d1) / det,
    })
}

/// One point of an exported solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GlobalSample {
    pub z: f64,
    pub w: Complex64,
    pub dw: Complex64,
}

/// `ζ₁w₁ + ζ₂w₂` and its derivative on positive real points.
pub fn evaluate_global(
    rc: &RegularCombination,
    w1: &MultiplicativeSolution,
    w2: &MultiplicativeSolution,
    z_points: &[f64],
    tol: &Tolerances,
) -> Result<Vec<GlobalSample>> {
    z_points
        .iter()
        .map(|&z| {
            if !(z > 0.0 && z.is_finite()) {
                return Err(Error::InvalidInput(format!("sample point {z} is not positive")));
            }
            let zc = Complex64::new(z, 0.0);
            let (v1, d1) = evaluate_multiplicative(w1, zc, ArgConvention::UpperClosed, tol)?;
            let (v2, d2) = evaluate_multiplicative(w2, zc, ArgConvention::UpperClosed, tol)?;
            Ok(GlobalSample {
                z,
                w: rc.zeta1 * v1 + rc.zeta2 * v2,
                dw: rc.zeta1 * d1 + rc.zeta2 * d2,
            })
        })
        .collect()
}

/// CSV with header `z,re_w,im_w,re_dw,im_dw`, 15 significant digits.
pub fn samples_to_csv(samples: &[GlobalSample]) -> String {
    let mut out = String::from("z,re_w,im_w,re_dw,im_dw\n");
    for s in samples {
        out.push_str(&format!(
            "{:.14e},{:.14e},{:.14e},{:.14e},{:.14e}\n",
            s.z, s.w.re, s.w.im, s.dw.re, s.dw.im
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn family(a2: f64) -> DcheParams {
        DcheParams::from_real([-1.0, 0.8, 1.24, 0.6, a2]).unwrap()
    }

    #[test]
    fn regular_solution_in_exact_case() {
        let tol = Tolerances::default();
        let p = run_pipeline(&family(-0.25), 0.0, &tol).unwrap();
        let rc = regular_at_origin(&p.table).unwrap();
        assert!((rc.zeta1 - c(-1.271_723_456_31, 0.0)).norm() < 1e-9, "{}", rc.zeta1);
        assert!(rc.zeta2.norm() < 1e-9);
        assert!((rc.t_reg3 - 1.0).norm() < 1e-9);
        assert!(rc.t_reg4.norm() < 1e-10);
        let (r5, r6) = rc.residuals();
        assert!(r5 < 1e-10 && r6 < 1e-10);

        let s = evaluate_global(&rc, &p.w1, &p.w2, &[1.0, 2.0], &tol).unwrap();
        assert!((s[1].w / s[0].w - 2f64.powf(0.6)).norm() < 1e-10);
        // w_reg ~ w₅ = z^{3/5} e^{−1/z}(1 + O(z)) near the origin; here it is exact
        assert!(matches!(
            evaluate_global(&rc, &p.w1, &p.w2, &[0.05], &tol),
            Err(Error::InsufficientTruncation(_))
        ));
        let (v1, v2) = (p.w1.widened(16, &tol).unwrap(), p.w2.widened(16, &tol).unwrap());
        let z = 0.2;
        let s = evaluate_global(&rc, &v1, &v2, &[z], &tol).unwrap();
        let exact = z.powf(0.6) * (-1.0 / z - z / 2.0).exp();
        assert!((s[0].w.re / exact - 1.0).abs() < 1e-8, "{}", s[0].w);
        assert!(evaluate_global(&rc, &p.w1, &p.w2, &[], &tol).unwrap().is_empty());
        assert!(evaluate_global(&rc, &p.w1, &p.w2, &[-1.0], &tol).is_err());
    }

    #[test]
    fn regular_solution_general_row() {
        let p = run_pipeline(&family(-0.1), 0.0, &Tolerances::default()).unwrap();
        let rc = regular_at_origin(&p.table).unwrap();
        assert!((rc.zeta1 - c(-0.136_295_750_328, 0.028_330_282_175_8)).norm() < 1e-8, "{}", rc.zeta1);
        assert!((rc.zeta2 - c(0.222_074_702_056, -0.109_613_756_594)).norm() < 1e-8, "{}", rc.zeta2);
        assert!((rc.t_reg3 - c(0.231_089_872_113, 0.0)).norm() < 1e-8, "{}", rc.t_reg3);
    }

    #[test]
    fn singular_origin_block() {
        let p = run_pipeline(&family(-0.25), 0.0, &Tolerances::default()).unwrap();
        let mut tbl = p.table.clone();
        tbl.t[1][2] = tbl.t[0][2] * 2.0;
        tbl.t[1][3] = tbl.t[0][3] * 2.0;
        assert!(matches!(regular_at_origin(&tbl), Err(Error::NoRegularSelection)));
    }

    #[test]
    fn empty_interval_has_no_root() {
        let tol = Tolerances::default();
        assert!(matches!(
            bound_state_search(&family(-0.25), -0.2, -0.2, 8, &tol),
            Err(Error::NoRootInInterval { .. })
        ));
        assert!(matches!(
            bound_state_search(&family(-0.25), -0.15, -0.05, 6, &tol),
            Err(Error::NoRootInInterval { .. })
        ));
    }

    #[test]
    fn csv_layout() {
        let s = [GlobalSample {
            z: 1.5,
            w: c(0.25, -1e-20),
            dw: c(-3.0, 0.0),
        }];
        let csv = samples_to_csv(&s);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("z,re_w,im_w,re_dw,im_dw"));
        let row: Vec<f64> = lines.next().unwrap().split(',').map(|x| x.parse().unwrap()).collect();
        assert_eq!(row, vec![1.5, 0.25, -1e-20, -3.0, 0.0]);
        assert!(csv.contains("1.50000000000000e0"));
    }
}
