#![no_main]

use libfuzzer_sys::fuzz_target;
use povmrt_core::io::StateDocument;
use povmrt_core::Tolerances;

fuzz_target!(|data: &[u8]| {
    if let Ok(doc) = StateDocument::parse(data) {
        if let Ok(rho) = doc.to_state(&Tolerances::default()) {
            let _ = povmrt_core::monotones::von_neumann_entropy(&rho);
        }
    }
});
