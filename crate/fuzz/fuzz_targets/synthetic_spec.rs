#![no_main]
use dmrf_cli::parse_synthetic;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(arg) = parse_synthetic(text) {
            assert!(arg.spec.validate().is_ok());
        }
    }
});
