#![no_main]
use dopt_core::cli::report::RunReport;
use libfuzzer_sys::{fuzz_target, Corpus};

fuzz_target!(|data: &[u8]| -> Corpus {
    let Ok(text) = std::str::from_utf8(data) else {
        return Corpus::Reject;
    };
    let Ok(report) = RunReport::from_json_str(text) else {
        return Corpus::Keep;
    };
    let _ = report.to_json();
    if report.degree() <= 4 && report.dimension() <= 3 && report.solve.candidates.len() <= 2000 {
        let _ = report.rebuild_certificate();
    }
    Corpus::Keep
});
