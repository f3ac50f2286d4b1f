//! Text, JSON and CSV renderings of command results.

use num_complex::Complex64;
use serde_json::{json, Value};

use dche::connection::ConnectionTable;
use dche::floquet::MultiplicativeSolution;
use dche::global::{samples_to_csv, BoundStateScan, GlobalSample, RegularCombination};

use crate::Format;

fn pair(c: Complex64) -> Value {
    json!([c.re, c.im])
}

fn fmt_c(c: Complex64) -> String {
    format!("{:>21.12e} {:>21.12e}", c.re, c.im)
}

fn json_line(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json") + "\n"
}

fn solution_json(w: &MultiplicativeSolution, dump: bool) -> Value {
    let mut v = json!({
        "label": w.label,
        "nu": pair(w.nu),
        "m_lo": w.m_lo,
        "n_hi": w.n_hi,
        "residual": w.residual(),
    });
    if dump {
        v["coeffs"] = w.coeffs.iter().map(|&c| pair(c)).collect();
    }
    v
}

pub fn solve(w1: &MultiplicativeSolution, w2: &MultiplicativeSolution, dump: bool, format: Format) -> String {
    match format {
        Format::Json => json_line(&json!({
            "w1": solution_json(w1, dump),
            "w2": solution_json(w2, dump),
        })),
        Format::Csv => {
            let mut out = String::new();
            if dump {
                out.push_str("label,n,re,im\n");
                for w in [w1, w2] {
                    for (i, c) in w.coeffs.iter().enumerate() {
                        let n = i as i64 - w.m_lo as i64;
                        out.push_str(&format!("{},{},{:.17e},{:.17e}\n", w.label, n, c.re, c.im));
                    }
                }
            } else {
                out.push_str("label,re_nu,im_nu,m_lo,n_hi,residual\n");
                for w in [w1, w2] {
                    out.push_str(&format!(
                        "{},{:.17e},{:.17e},{},{},{:.3e}\n",
                        w.label, w.nu.re, w.nu.im, w.m_lo, w.n_hi,
                        w.residual()
                    ));
                }
            }
            out
        }
        Format::Text => {
            let mut out = String::new();
            for w in [w1, w2] {
                out.push_str(&format!(
                    "nu{} = {}   n = -{}..{}   residual {:.1e}\n",
                    w.label,
                    fmt_c(w.nu),
                    w.m_lo,
                    w.n_hi,
                    w.residual()
                ));
            }
            if dump {
                for w in [w1, w2] {
                    out.push_str(&format!("\ncoefficients c(n, {})\n", w.label));
                    for (i, c) in w.coeffs.iter().enumerate() {
                        out.push_str(&format!("{:>5} {}\n", i as i64 - w.m_lo as i64, fmt_c(*c)));
                    }
                }
            }
            out
        }
    }
}

fn regular_json(rc: &RegularCombination) -> Value {
    let (r5, r6) = rc.residuals();
    json!({
        "zeta1": pair(rc.zeta1),
        "zeta2": pair(rc.zeta2),
        "Treg3": pair(rc.t_reg3),
        "Treg4": pair(rc.t_reg4),
        "residuals": [r5, r6],
    })
}

const ENTRIES: [(usize, usize); 8] = [(1, 3), (1, 4), (2, 3), (2, 4), (1, 5), (1, 6), (2, 5), (2, 6)];

pub fn connect(tbl: &ConnectionTable, rc: Option<&RegularCombination>, format: Format) -> String {
    match format {
        Format::Json => {
            let mut v = tbl.to_json_value();
            v["regular"] = rc.map(regular_json).unwrap_or(Value::Null);
            json_line(&v)
        }
        Format::Csv => {
            let mut out = String::from("entry,re,im\n");
            for (j, t) in ENTRIES {
                let c = tbl.get(j, t);
                out.push_str(&format!("T{j}{t},{:.17e},{:.17e}\n", c.re, c.im));
            }
            if let Some(rc) = rc {
                for (name, c) in [("zeta1", rc.zeta1), ("zeta2", rc.zeta2), ("Treg3", rc.t_reg3), ("Treg4", rc.t_reg4)] {
                    out.push_str(&format!("{name},{:.17e},{:.17e}\n", c.re, c.im));
                }
            }
            out
        }
        Format::Text => {
            let mut out = format!("arg z = {}\n", tbl.arg_z);
            out.push_str(&format!("{:<6} {:>21} {:>21}\n", "", "Re", "Im"));
            for (j, t) in ENTRIES {
                // T_{j,t} is built from the Wronskian with the partner of w_t
                let partner = [1, 0, 3, 2][t - 3];
                let onray = if tbl.diag.wronskians[j - 1][partner].onray { "  (on ray)" } else { "" };
                out.push_str(&format!("T{j},{t}   {}{onray}\n", fmt_c(tbl.get(j, t))));
            }
            out.push_str(&format!("cross-check error {:.1e}\n", tbl.diag.cross_err));
            match rc {
                Some(rc) => {
                    out.push_str(&format!("zeta1   {}\n", fmt_c(rc.zeta1)));
                    out.push_str(&format!("zeta2   {}\n", fmt_c(rc.zeta2)));
                    out.push_str(&format!("Treg,3  {}\n", fmt_c(rc.t_reg3)));
                    out.push_str(&format!("Treg,4  {}\n", fmt_c(rc.t_reg4)));
                }
                None => out.push_str("no regular combination (origin block singular)\n"),
            }
            out
        }
    }
}

pub fn regular(rc: &RegularCombination, samples: &[GlobalSample], format: Format) -> String {
    match format {
        Format::Json => {
            let mut v = regular_json(rc);
            v["samples"] = samples
                .iter()
                .map(|s| json!({"z": s.z, "w": pair(s.w), "dw": pair(s.dw)}))
                .collect();
            json_line(&v)
        }
        Format::Csv => samples_to_csv(samples),
        Format::Text => {
            let mut out = format!(
                "zeta1   {}\nzeta2   {}\nTreg,3  {}\nTreg,4  {}\n",
                fmt_c(rc.zeta1),
                fmt_c(rc.zeta2),
                fmt_c(rc.t_reg3),
                fmt_c(rc.t_reg4)
            );
            for s in samples {
                out.push_str(&format!("z = {:<12} w = {}  w' = {}\n", s.z, fmt_c(s.w), fmt_c(s.dw)));
            }
            out
        }
    }
}

pub fn bound_states(scan: &BoundStateScan, format: Format) -> String {
    match format {
        Format::Json => json_line(&json!({
            "roots": scan.roots.iter().map(|r| json!({
                "A2": r.a2,
                "Treg3": pair(r.t_reg3),
                "Treg4": pair(r.t_reg4),
                "residual": r.residual,
            })).collect::<Vec<_>>(),
            "samples": scan.samples.len(),
            "failures": scan.failures.iter().map(|(x, e)| json!({"A2": x, "error": e.to_string()})).collect::<Vec<_>>(),
        })),
        Format::Csv => {
            let mut out = String::from("A2,re_treg3,im_treg3,re_treg4,im_treg4,residual\n");
            for r in &scan.roots {
                out.push_str(&format!(
                    "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.3e}\n",
                    r.a2, r.t_reg3.re, r.t_reg3.im, r.t_reg4.re, r.t_reg4.im, r.residual
                ));
            }
            out
        }
        Format::Text => {
            let mut out = String::new();
            for r in &scan.roots {
                out.push_str(&format!("A2 = {:.14}   |Treg,4/Treg,3| = {:.1e}\n", r.a2, r.residual));
            }
            for (x, e) in &scan.failures {
                out.push_str(&format!("skipped A2 = {x}: {e}\n"));
            }
            out
        }
    }
}
