#![no_main]
use dmrf::data::{read_feature_rows, FeatureKind, Schema, Task};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let schema = Schema {
        feature_names: vec!["a".into(), "b".into(), "colour".into()],
        feature_kinds: vec![
            FeatureKind::Numeric,
            FeatureKind::Numeric,
            FeatureKind::Categorical(vec!["red".into(), "green".into()]),
        ],
        label_name: "y".into(),
        label_column: 3,
        task: Task::Classification,
        class_names: vec!["no".into(), "yes".into()],
    };
    if let Ok(rows) = read_feature_rows(data, &schema, true) {
        assert!(rows.iter().all(|r| r.len() == 3));
    }
});
