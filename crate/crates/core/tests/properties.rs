use num_complex::Complex64;
use proptest::prelude::*;

use dche::asymptotics::{exponents_at_infinity, exponents_at_origin};
use dche::floquet::{compute_circuit_matrix, reduce_index, SolutionDump};
use dche::model::{from_jaffe_lay, jaffe_lay_inverse_map, jaffe_lay_point_map, parse_complex, JaffeLayParams};
use dche::numerics::{arg, branch_power, ArgConvention};
use dche::{DcheParams, Tolerances};

fn complex(r: f64) -> impl Strategy<Value = Complex64> {
    (-r..r, -r..r).prop_map(|(re, im)| Complex64::new(re, im))
}

fn edge(r: f64) -> impl Strategy<Value = Complex64> {
    complex(r).prop_filter("nondegenerate", |z| z.norm() > 0.05)
}

fn params(r: f64) -> impl Strategy<Value = DcheParams> {
    (edge(r), complex(r), complex(r), complex(r), edge(r))
        .prop_map(|(a, b, c, d, e)| DcheParams::new([a, b, c, d, e]).unwrap())
}

fn jaffe_lay() -> impl Strategy<Value = JaffeLayParams> {
    (edge(5.0), complex(5.0), complex(5.0), complex(5.0)).prop_map(|(alpha, beta, gamma, delta)| JaffeLayParams {
        alpha,
        beta,
        gamma,
        delta,
    })
}

proptest! {
    #[test]
    fn point_map_round_trip(t in complex(0.7).prop_filter("disk", |t| t.norm() < 0.99), j in jaffe_lay()) {
        let (z, _) = jaffe_lay_point_map(t, &j).unwrap();
        prop_assert!((jaffe_lay_inverse_map(z) - t).norm() < 1e-14);
    }

    #[test]
    fn jaffe_lay_edges_agree(j in jaffe_lay()) {
        let a = from_jaffe_lay(&j).unwrap();
        prop_assert_eq!(a.a(2), a.a(-2));
    }

    #[test]
    fn reduced_index_window(nu in complex(40.0)) {
        let (r, k) = reduce_index(nu);
        prop_assert!(r.re >= -0.5 && r.re < 0.5 + 1e-9);
        prop_assert!((r + k as f64 - nu).norm() < 1e-12 * nu.norm().max(1.0));
    }

    #[test]
    fn integer_power_is_exact(z in edge(10.0)) {
        let one = Complex64::new(1.0, 0.0);
        prop_assert_eq!(branch_power(z, one, ArgConvention::UpperClosed), z);
        prop_assert_eq!(branch_power(z, one, ArgConvention::LowerClosed), z);
    }

    #[test]
    fn formal_exponent_windows(a in params(2.0)) {
        let (w3, w4) = exponents_at_infinity(&a);
        prop_assert!((w4.lead * w4.lead + a.a(2)).norm() < 1e-13 * a.a(2).norm().max(1.0));
        prop_assert_eq!(w3.lead, -w4.lead);
        let t = arg(w4.lead, ArgConvention::LowerClosed);
        prop_assert!((-std::f64::consts::FRAC_PI_2..std::f64::consts::FRAC_PI_2).contains(&t));
        let (w5, w6) = exponents_at_origin(&a);
        prop_assert!((w6.lead * w6.lead + a.a(-2)).norm() < 1e-13 * a.a(-2).norm().max(1.0));
        prop_assert_eq!(w5.lead, -w6.lead);
        let t = arg(w6.lead, ArgConvention::UpperClosed);
        prop_assert!(t > -std::f64::consts::FRAC_PI_2 && t <= std::f64::consts::FRAC_PI_2);
    }

    #[test]
    fn params_json_round_trip(a in params(1e6)) {
        prop_assert_eq!(DcheParams::from_json(&a.to_json()).unwrap(), a);
    }

    #[test]
    fn complex_arg_round_trip(z in complex(1e9)) {
        prop_assert_eq!(parse_complex(&format!("{},{}", z.re, z.im)).unwrap(), z);
        prop_assert_eq!(parse_complex(&format!(" {} ", z.re)).unwrap(), Complex64::new(z.re, 0.0));
    }

    #[test]
    fn dump_json_round_trip(
        nu in complex(0.5),
        m_lo in 1usize..6,
        coeffs in prop::collection::vec((-1e3f64..1e3, -1e3f64..1e3), 12),
    ) {
        let n_hi = coeffs.len() - 1 - m_lo;
        let d = SolutionDump {
            nu: [nu.re, nu.im],
            m_lo,
            n_hi,
            coeffs: coeffs.iter().map(|&(re, im)| [re, im]).collect(),
        };
        let s = serde_json::to_string(&d).unwrap();
        prop_assert_eq!(SolutionDump::from_json(&s).unwrap(), d);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn circuit_determinant_is_one(a in params(2.0)) {
        let cm = compute_circuit_matrix(&a, &Tolerances::default()).unwrap();
        prop_assert!((cm.det - 1.0).norm() < 1e-10, "det = {}", cm.det);
        prop_assert!((cm.lambda1 * cm.lambda2 - cm.det).norm() < 1e-10 * cm.det.norm());
    }
}
