#![no_main]
use dmrf::model_io::{decode_model, encode_model};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(forest) = decode_model(text) {
        let encoded = encode_model(&forest);
        let again = decode_model(&encoded).expect("re-encoded model decodes");
        assert_eq!(encode_model(&again), encoded);
    }
});
