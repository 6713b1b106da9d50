#![no_main]

use libfuzzer_sys::fuzz_target;
use povmrt_core::io::EnsembleDocument;
use povmrt_core::{Povm, Tolerances};

fuzz_target!(|data: &[u8]| {
    let Ok(doc) = EnsembleDocument::parse(data) else {
        return;
    };
    let tol = Tolerances::default();
    if let Ok(ens) = doc.to_ensemble(&tol) {
        let game = povmrt_core::discrimination::posterior_success(&Povm::trivial(ens.dim()), &ens, &tol)
            .expect("dimensions agree");
        assert!(game.success >= ens.max_prior() - 1e-9);
    }
});
