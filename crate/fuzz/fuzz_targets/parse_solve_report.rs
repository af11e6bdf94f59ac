#![no_main]

use dwlab::dw_solver::SolveReport;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(report) = SolveReport::from_json(text) {
        let again = SolveReport::from_json(&report.to_json()).expect("written report parses");
        assert_eq!(report.queries, again.queries);
        assert_eq!(report.outcome_name(), again.outcome_name());
    }
});
