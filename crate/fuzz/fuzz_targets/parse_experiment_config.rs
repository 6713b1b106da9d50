#![no_main]

use libfuzzer_sys::fuzz_target;
use povmrt_cli::ExperimentConfig;

fuzz_target!(|data: &[u8]| {
    if let Ok(config) = ExperimentConfig::parse(data) {
        config.validate().expect("parse validates");
    }
});
