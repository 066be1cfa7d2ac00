#![no_main]
use std::path::Path;

use dopt_core::cli::config::{CandidateConfig, ProblemConfig};
use libfuzzer_sys::{fuzz_target, Corpus};

fuzz_target!(|data: &[u8]| -> Corpus {
    let Ok(text) = std::str::from_utf8(data) else {
        return Corpus::Reject;
    };
    let Ok(cfg) = ProblemConfig::from_json_str(text) else {
        return Corpus::Keep;
    };
    let _ = cfg.semialgebraic_set();
    let small = match &cfg.candidates {
        CandidateConfig::Grid { resolution } => {
            (*resolution as f64).powi(cfg.dimension.min(64) as i32) <= 1e5
        }
        CandidateConfig::Points(_) => true,
        // reading files is outside the parser under test
        CandidateConfig::PointCloud(_) => false,
    };
    if small {
        let _ = cfg.candidate_set(Path::new("."));
    }
    Corpus::Keep
});
