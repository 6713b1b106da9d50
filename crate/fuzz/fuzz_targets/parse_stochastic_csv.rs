#![no_main]

use libfuzzer_sys::fuzz_target;
use povmrt_core::io::{format_stochastic_csv, parse_stochastic_csv};
use povmrt_core::Tolerances;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let tol = Tolerances::default();
    if let Ok(m) = parse_stochastic_csv(text, &tol) {
        let again = parse_stochastic_csv(&format_stochastic_csv(&m), &tol).expect("formatted grid parses");
        assert!(again.max_abs_diff(&m) <= 1e-15);
        let _ = povmrt_core::stochastic::decompose(&m);
    }
});
