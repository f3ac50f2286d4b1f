use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use dche::floquet::solve_multiplicative_pair;
use dche::global::{bound_state_search, evaluate_global, regular_at_origin, run_pipeline, DEFAULT_GRID};
use dche::model::{from_jaffe_lay, from_normal_form, from_radial, parse_complex, JaffeLayParams, NormalFormParams, RadialProblem};
use dche::validation::reproduce::{parse_table_list, ReproduceLimits};
use dche::validation::reproduce_tables;
use dche::{DcheParams, Error, Tolerances};

mod output;

const EXIT_NUMERIC: u8 = 1;
const EXIT_DEGENERATE: u8 = 2;
const EXIT_NO_ROOT: u8 = 3;
const EXIT_USAGE: u8 = 64;

/// Global solutions of the double confluent Heun equation
/// z²w'' + (A₋₂z⁻² + A₋₁z⁻¹ + A₀ + A₁z + A₂z²)w = 0.
///
/// Complex values are written `re` or `re,im` (for example `0.5,-1`).
/// Exit codes: 0 success, 1 numerical failure, 2 degenerate or logarithmic
/// case, 3 no root found, 64 usage error.
#[derive(Debug, Parser)]
#[command(name = "dche", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Multiplicative solutions: indices, truncation and residuals.
    Solve {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        common: Common,
        /// Include the Laurent coefficients in the output.
        #[arg(long)]
        dump_coeffs: bool,
    },
    /// Connection factors T_{j,t} and the combination regular at the origin.
    Connect {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        common: Common,
    },
    /// The solution regular at the origin, sampled on the positive real axis.
    Regular {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        common: Common,
        /// Sample `n` points evenly spaced on [from, to].
        #[arg(long, num_args = 3, value_names = ["FROM", "TO", "N"], allow_hyphen_values = true)]
        sample: Option<Vec<String>>,
    },
    /// Scans A₂ for zeros of T_reg,4 with the other coefficients fixed.
    BoundStates {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        common: Common,
        /// Interval of A₂ values to scan.
        #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_hyphen_values = true, required = true)]
        scan: Vec<f64>,
        /// Number of grid points.
        #[arg(long, default_value_t = DEFAULT_GRID)]
        grid: usize,
    },
    /// Recomputes the reference tables and reports deviations.
    #[command(alias = "reproduce-tables")]
    Reproduce {
        /// `all` or a comma-separated list such as `T2,T5`.
        #[arg(long, default_value = "all")]
        tables: String,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct Input {
    /// A₋₂ A₋₁ A₀ A₁ A₂.
    #[arg(long, num_args = 5, value_names = ["A-2", "A-1", "A0", "A1", "A2"], allow_hyphen_values = true, value_parser = complex_arg)]
    dche: Option<Vec<Complex64>>,
    /// B₋₂ … B₂ of the normal form D²y + B(z)y = 0, D = z d/dz.
    #[arg(long, num_args = 5, value_names = ["B-2", "B-1", "B0", "B1", "B2"], allow_hyphen_values = true, value_parser = complex_arg)]
    normal: Option<Vec<Complex64>>,
    /// α β γ δ of the Jaffé–Lay form.
    #[arg(long, num_args = 4, value_names = ["ALPHA", "BETA", "GAMMA", "DELTA"], allow_hyphen_values = true, value_parser = complex_arg)]
    jaffe_lay: Option<Vec<Complex64>>,
    /// l v₋₂ v₋₁ v₀ v₁ of a radial problem; combine with --energy.
    #[arg(long, num_args = 5, value_names = ["L", "V-2", "V-1", "V0", "V1"], allow_hyphen_values = true)]
    radial: Option<Vec<String>>,
}

#[derive(Debug, Args)]
struct Common {
    /// Energy parameter A₂ for --radial.
    #[arg(long, value_parser = complex_arg, allow_hyphen_values = true)]
    energy: Option<Complex64>,
    /// Direction arg z ∈ (−π, π] along which connection factors are taken.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    arg_z: f64,
    /// Write the output here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Tolerance overrides; the base bundle comes from DCHE_TOL_PROFILE
    /// (default, strict or fast).
    #[arg(long)]
    tol_ode_rel: Option<f64>,
    #[arg(long)]
    tol_ode_abs: Option<f64>,
    #[arg(long)]
    tol_newton: Option<f64>,
    #[arg(long)]
    tol_series_tail: Option<f64>,
    #[arg(long)]
    tol_onray: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

fn complex_arg(s: &str) -> Result<Complex64, String> {
    parse_complex(s).map_err(|e| e.to_string())
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::DegenerateEquation { .. } | Error::LogarithmicCase { .. } => EXIT_DEGENERATE,
            Error::NoRootInInterval { .. } => EXIT_NO_ROOT,
            _ => EXIT_NUMERIC,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

impl Common {
    fn tolerances(&self) -> Result<Tolerances, Failure> {
        let mut t = match std::env::var("DCHE_TOL_PROFILE") {
            Ok(p) if !p.is_empty() => Tolerances::profile(&p).map_err(|e| usage(e.to_string()))?,
            _ => Tolerances::default(),
        };
        let set = |slot: &mut f64, v: Option<f64>| {
            if let Some(v) = v {
                *slot = v;
            }
        };
        set(&mut t.ode_rel, self.tol_ode_rel);
        set(&mut t.ode_abs, self.tol_ode_abs);
        set(&mut t.newton_tol, self.tol_newton);
        set(&mut t.series_tail_tol, self.tol_series_tail);
        set(&mut t.onray_angle_tol, self.tol_onray);
        t.validate().map_err(|e| usage(e.to_string()))
    }

    fn arg_z(&self) -> Result<f64, Failure> {
        let pi = std::f64::consts::PI;
        if self.arg_z > -pi && self.arg_z <= pi {
            Ok(self.arg_z)
        } else {
            Err(usage(format!("--arg-z {} is outside (-pi, pi]", self.arg_z)))
        }
    }

    fn emit(&self, text: String) -> Result<(), Failure> {
        match &self.out {
            Some(path) => std::fs::write(path, text).map_err(|e| Failure {
                code: EXIT_NUMERIC,
                message: format!("cannot write {}: {e}", path.display()),
            }),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}

/// Parameters from the input group. When `allow_missing_energy` is set a
/// radial problem without --energy gets `A₂ = −1` as a placeholder (the
/// bound-state scan replaces it).
fn params(input: &Input, common: &Common, allow_missing_energy: bool) -> Result<DcheParams, Failure> {
    let arr = |v: &Vec<Complex64>| -> [Complex64; 5] { [v[0], v[1], v[2], v[3], v[4]] };
    if let Some(v) = &input.dche {
        return Ok(DcheParams::new(arr(v))?);
    }
    if let Some(v) = &input.normal {
        return Ok(from_normal_form(&NormalFormParams { b: arr(v) })?);
    }
    if let Some(v) = &input.jaffe_lay {
        let j = JaffeLayParams {
            alpha: v[0],
            beta: v[1],
            gamma: v[2],
            delta: v[3],
        };
        return Ok(from_jaffe_lay(&j)?);
    }
    if let Some(v) = &input.radial {
        let l: u32 = v[0]
            .parse()
            .map_err(|_| usage(format!("radial l must be a non-negative integer, got '{}'", v[0])))?;
        let mut coeffs = [Complex64::ZERO; 4];
        for (slot, s) in coeffs.iter_mut().zip(&v[1..]) {
            *slot = parse_complex(s).map_err(|e| usage(e.to_string()))?;
        }
        let energy = match common.energy {
            Some(e) => e,
            None if allow_missing_energy => Complex64::new(-1.0, 0.0),
            None => return Err(usage("--radial needs --energy")),
        };
        let r = RadialProblem {
            l,
            v_coeffs: coeffs,
            energy_param: energy,
        };
        return Ok(from_radial(&r)?);
    }
    Err(usage("no input form given"))
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Solve {
            input,
            common,
            dump_coeffs,
        } => {
            let tol = common.tolerances()?;
            let a = params(&input, &common, false)?;
            let (w1, w2) = solve_multiplicative_pair(&a, &tol)?;
            common.emit(output::solve(&w1, &w2, dump_coeffs, common.format))
        }
        Command::Connect { input, common } => {
            let tol = common.tolerances()?;
            let arg_z = common.arg_z()?;
            let a = params(&input, &common, false)?;
            let p = run_pipeline(&a, arg_z, &tol)?;
            let rc = regular_at_origin(&p.table);
            common.emit(output::connect(&p.table, rc.as_ref().ok(), common.format))
        }
        Command::Regular { input, common, sample } => {
            let tol = common.tolerances()?;
            let arg_z = common.arg_z()?;
            let a = params(&input, &common, false)?;
            let p = run_pipeline(&a, arg_z, &tol)?;
            let rc = regular_at_origin(&p.table)?;
            let points = match sample {
                Some(v) => sample_points(&v)?,
                None => Vec::new(),
            };
            let samples = evaluate_global(&rc, &p.w1, &p.w2, &points, &tol)?;
            common.emit(output::regular(&rc, &samples, common.format))
        }
        Command::BoundStates {
            input,
            common,
            scan,
            grid,
        } => {
            let tol = common.tolerances()?;
            let a = params(&input, &common, true)?;
            let result = bound_state_search(&a, scan[0], scan[1], grid, &tol);
            match result {
                Ok(s) => common.emit(output::bound_states(&s, common.format)),
                Err(Error::NoRootInInterval { lo, hi }) => Err(Failure {
                    code: EXIT_NO_ROOT,
                    message: format!("no sign change of T_reg,4 in [{lo}, {hi}]"),
                }),
                Err(e) => Err(e.into()),
            }
        }
        Command::Reproduce { tables, common } => {
            let tol = common.tolerances()?;
            let ids = parse_table_list(&tables).map_err(|e| usage(e.to_string()))?;
            let report = reproduce_tables(&ids, &tol, &ReproduceLimits::default());
            let text = match common.format {
                Format::Json => report.to_json() + "\n",
                _ => report.to_text(),
            };
            common.emit(text)?;
            if report.passed() {
                Ok(())
            } else {
                Err(Failure {
                    code: EXIT_NUMERIC,
                    message: "reproduction failed".into(),
                })
            }
        }
    }
}

fn sample_points(v: &[String]) -> Result<Vec<f64>, Failure> {
    let from: f64 = v[0].parse().map_err(|_| usage(format!("invalid sample start '{}'", v[0])))?;
    let to: f64 = v[1].parse().map_err(|_| usage(format!("invalid sample end '{}'", v[1])))?;
    let n: usize = v[2].parse().map_err(|_| usage(format!("invalid sample count '{}'", v[2])))?;
    if n == 0 || !(from.is_finite() && to.is_finite()) {
        return Err(usage("--sample needs finite bounds and N >= 1"));
    }
    if n == 1 {
        return Ok(vec![from]);
    }
    Ok((0..n).map(|i| from + (to - from) * i as f64 / (n - 1) as f64).collect())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
