#![no_main]

use libfuzzer_sys::fuzz_target;
use povmrt_core::io::PovmDocument;
use povmrt_core::Tolerances;

fuzz_target!(|data: &[u8]| {
    let Ok(doc) = PovmDocument::parse(data) else {
        return;
    };
    let tol = Tolerances::default();
    if let Ok(povm) = doc.to_povm(&tol) {
        let _ = povm.canonicalize(&tol);
        // Whatever validates must survive a write/read cycle unchanged.
        let again = PovmDocument::parse(PovmDocument::from_povm(&povm, None).to_json().as_bytes())
            .expect("serialized document parses");
        assert_eq!(again.to_povm(&tol).expect("still valid"), povm);
    }
});
