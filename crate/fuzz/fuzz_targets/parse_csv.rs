#![no_main]

use dwlab::harness::{read_calibration_csv, read_gap_csv, read_records_csv};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let _ = read_gap_csv(data);
    let _ = read_calibration_csv(data);
    let _ = read_records_csv(data);
});
