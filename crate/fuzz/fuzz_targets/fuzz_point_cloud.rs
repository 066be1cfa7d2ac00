#![no_main]
use dopt_core::cli::config::parse_point_cloud;
use libfuzzer_sys::{fuzz_target, Corpus};

fuzz_target!(|data: &[u8]| -> Corpus {
    let Some((&first, rest)) = data.split_first() else {
        return Corpus::Reject;
    };
    let Ok(text) = std::str::from_utf8(rest) else {
        return Corpus::Reject;
    };
    let n = usize::from(first % 4) + 1;
    if let Ok(points) = parse_point_cloud(text, n) {
        assert!(points.iter().all(|p| p.len() == n));
    }
    Corpus::Keep
});
