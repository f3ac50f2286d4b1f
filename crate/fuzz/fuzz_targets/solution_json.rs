#![no_main]

use dche::floquet::{MultiplicativeSolution, SolutionDump};
use dche::DcheParams;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(d) = SolutionDump::from_json(s) {
        let params = DcheParams::from_real([-1.0, 0.8, 1.24, 0.6, -0.25]).unwrap();
        if let Ok(w) = MultiplicativeSolution::from_dump(&d, params, 1) {
            let _ = w.residual();
            let _ = w.shifted(1);
        }
    }
});
