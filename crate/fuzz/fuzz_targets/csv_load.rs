#![no_main]
use dmrf::data::{read_csv, CsvOptions, LabelColumn, Task};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Some((&flags, body)) = data.split_first() else {
        return;
    };
    let opts = CsvOptions {
        label: if flags & 1 == 0 { LabelColumn::Last } else { LabelColumn::Index(0) },
        has_header: flags & 2 == 0,
        log_label: flags & 4 != 0,
        task: if flags & 8 == 0 { Task::Classification } else { Task::Regression },
    };
    if let Ok(ds) = read_csv(body, &opts) {
        assert!(ds.n_rows() > 0);
        for i in 0..ds.n_rows() {
            assert_eq!(ds.row(i).len(), ds.n_features());
        }
    }
});
