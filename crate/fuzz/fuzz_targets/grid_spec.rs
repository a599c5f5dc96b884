#![no_main]
use std::str::FromStr;

use dmrf::eval::{KnRule, SweepAxis};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(axis) = SweepAxis::from_str(text) {
        assert!(!axis.values.is_empty());
    }
    if let Ok(rule) = KnRule::from_str(text) {
        assert!(rule.k_n(1000) >= 1);
    }
});
