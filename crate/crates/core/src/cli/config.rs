//! Problem configuration: a single JSON document, unknown keys rejected.
//!
//! ```json
//! {
//!   "dimension": 2,
//!   "degree": 1,
//!   "set": {
//!     "bounding_box": [[-1, 1], [-1, 1]],
//!     "inequalities": [[{"exponents": [0, 0], "coeff": 1},
//!                       {"exponents": [2, 0], "coeff": -1},
//!                       {"exponents": [0, 2], "coeff": -1}]]
//!   },
//!   "candidates": {"grid": {"resolution": 41}},
//!   "solver": {"algorithm": "hybrid", "epsilon": 1e-6},
//!   "validation_resolution": 401
//! }
//! ```
//!
//! `candidates` is one of `{"grid": {"resolution": N}}`,
//! `{"points": [[...], ...]}` or `{"point_cloud": "path.csv"}`; a point-cloud
//! path is resolved against the directory holding the config file.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::basis::{basis_size, MultiIndex};
use crate::semialg::{
    explicit_candidates, grid_candidates, CandidateSet, SemiAlgebraicSet, SparsePolynomial,
};
use crate::solver::SolverConfig;

use super::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermConfig {
    pub exponents: Vec<u32>,
    pub coeff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetConfig {
    pub bounding_box: Vec<[f64; 2]>,
    /// Each inner list is one polynomial `g_j`, read as `g_j(x) >= 0`.
    #[serde(default)]
    pub inequalities: Vec<Vec<TermConfig>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum CandidateConfig {
    Grid { resolution: usize },
    Points(Vec<Vec<f64>>),
    PointCloud(String),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    /// Output directory, relative paths resolved against the config file; `--out` takes precedence.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dir: Option<String>,
    /// Record wall-clock timings in the report.
    pub timings: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub dimension: usize,
    pub degree: usize,
    pub set: SetConfig,
    pub candidates: CandidateConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub validation_resolution: Option<usize>,
    #[serde(default)]
    pub output: OutputConfig,
    /// Seed for randomized audit commands; the solver itself is deterministic.
    #[serde(default)]
    pub seed: u64,
}

/// Largest validation grid resolution used when none is configured.
pub const MAX_DEFAULT_VALIDATION_RESOLUTION: usize = 2001;

/// Per-axis resolution keeping the default validation grid near 10⁶ points.
pub fn default_validation_resolution(n: usize) -> usize {
    let mut r = MAX_DEFAULT_VALIDATION_RESOLUTION;
    while r > 2 && (r as f64).powi(n as i32) > 1e6 {
        r -= 1;
    }
    r
}

impl ProblemConfig {
    pub fn from_json_str(text: &str) -> Result<Self, CliError> {
        let cfg: ProblemConfig =
            serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.check_shape()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    pub fn n_d(&self) -> usize {
        basis_size(self.dimension, self.degree)
    }

    pub fn validation_resolution(&self) -> usize {
        self.validation_resolution
            .unwrap_or_else(|| default_validation_resolution(self.dimension))
    }

    /// Structural checks that need no file system access.
    fn check_shape(&self) -> Result<(), CliError> {
        if self.dimension < 1 {
            return Err(CliError::Config("dimension must be at least 1".into()));
        }
        if self.degree < 1 {
            return Err(CliError::Config(format!(
                "degree must be at least 1, got {}",
                self.degree
            )));
        }
        // upper bound on n and d
        if self.dimension > 64 || self.degree > 64 {
            return Err(CliError::Config("dimension and degree must not exceed 64".into()));
        }
        if self.set.bounding_box.len() != self.dimension {
            return Err(CliError::Config(format!(
                "bounding_box has {} axes, dimension is {}",
                self.set.bounding_box.len(),
                self.dimension
            )));
        }
        if let CandidateConfig::Grid { resolution } = self.candidates {
            if resolution < 2 {
                return Err(CliError::Config("grid resolution must be at least 2".into()));
            }
        }
        if let Some(r) = self.validation_resolution {
            if r < 2 {
                return Err(CliError::Config(
                    "validation_resolution must be at least 2".into(),
                ));
            }
        }
        self.semialgebraic_set()?;
        self.solver
            .validate(self.n_d())
            .map_err(|e| CliError::Config(e.to_string()))?;
        Ok(())
    }

    pub fn semialgebraic_set(&self) -> Result<SemiAlgebraicSet, CliError> {
        let n = self.dimension;
        let inequalities = self
            .set
            .inequalities
            .iter()
            .map(|terms| {
                SparsePolynomial::new(
                    n,
                    terms
                        .iter()
                        .map(|t| (MultiIndex::new(t.exponents.clone()), t.coeff)),
                )
            })
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| CliError::Config(format!("bad inequality: {e}")))?;
        let bbox = self.set.bounding_box.iter().map(|b| (b[0], b[1])).collect();
        SemiAlgebraicSet::new(bbox, inequalities).map_err(|e| CliError::Config(e.to_string()))
    }

    /// Materializes the candidate set. `base_dir` resolves point-cloud paths.
    pub fn candidate_set(&self, base_dir: &Path) -> Result<CandidateSet, CliError> {
        let set = self.semialgebraic_set()?;
        let cands = match &self.candidates {
            CandidateConfig::Grid { resolution } => grid_candidates(&set, *resolution),
            CandidateConfig::Points(pts) => {
                check_points(pts, self.dimension)?;
                explicit_candidates(&set, pts)
            }
            CandidateConfig::PointCloud(file) => {
                let path = resolve(base_dir, file);
                let text = std::fs::read_to_string(&path).map_err(|e| {
                    CliError::Config(format!("cannot read point cloud {}: {e}", path.display()))
                })?;
                let pts = parse_point_cloud(&text, self.dimension)?;
                explicit_candidates(&set, &pts)
            }
        };
        cands.map_err(CliError::from)
    }
}

fn resolve(base_dir: &Path, file: &str) -> PathBuf {
    let p = Path::new(file);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base_dir.join(p)
    }
}

fn check_points(pts: &[Vec<f64>], n: usize) -> Result<(), CliError> {
    if pts.is_empty() {
        return Err(CliError::Config("explicit point list is empty".into()));
    }
    for (k, p) in pts.iter().enumerate() {
        if p.len() != n {
            return Err(CliError::Config(format!(
                "point {k} has {} coordinates, dimension is {n}",
                p.len()
            )));
        }
        if p.iter().any(|c| !c.is_finite()) {
            return Err(CliError::Config(format!("point {k} is not finite")));
        }
    }
    Ok(())
}

/// Parses a CSV point cloud: one header row, then one point of `n` numeric
/// coordinates per row.
pub fn parse_point_cloud(text: &str, n: usize) -> Result<Vec<Vec<f64>>, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| CliError::Config(format!("point cloud: {e}")))?;
    if headers.len() != n {
        return Err(CliError::Config(format!(
            "point cloud header has {} columns, dimension is {n}",
            headers.len()
        )));
    }
    let mut points = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::Config(format!("point cloud: {e}")))?;
        let point = record
            .iter()
            .map(|field| field.parse::<f64>())
            .collect::<Result<Vec<f64>, _>>()
            .map_err(|e| CliError::Config(format!("point cloud row {}: {e}", row + 1)))?;
        points.push(point);
    }
    check_points(&points, n)?;
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;

    const DISK: &str = r#"{
        "dimension": 2,
        "degree": 1,
        "set": {
            "bounding_box": [[-1, 1], [-1, 1]],
            "inequalities": [[{"exponents": [0, 0], "coeff": 1},
                              {"exponents": [2, 0], "coeff": -1},
                              {"exponents": [0, 2], "coeff": -1}]]
        },
        "candidates": {"grid": {"resolution": 3}}
    }"#;

    #[test]
    fn parses_and_builds_grid() {
        let cfg = ProblemConfig::from_json_str(DISK).unwrap();
        assert_eq!(cfg.solver, SolverConfig::default());
        let c = cfg.candidate_set(Path::new(".")).unwrap();
        assert_eq!(c.len(), 5);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let bad = DISK.replace("\"degree\": 1", "\"degree\": 1, \"epsilon\": 1e-3");
        assert!(matches!(
            ProblemConfig::from_json_str(&bad),
            Err(CliError::Config(_))
        ));
        let bad = DISK.replace(
            "\"candidates\"",
            "\"solver\": {\"epsilom\": 1e-3}, \"candidates\"",
        );
        assert!(ProblemConfig::from_json_str(&bad).is_err());
    }

    #[test]
    fn degree_zero_is_a_config_error() {
        let bad = DISK.replace("\"degree\": 1", "\"degree\": 0");
        assert!(matches!(
            ProblemConfig::from_json_str(&bad),
            Err(CliError::Config(_))
        ));
    }

    #[test]
    fn shape_mismatches_are_config_errors() {
        let bad = DISK.replace("[[-1, 1], [-1, 1]]", "[[-1, 1]]");
        assert!(ProblemConfig::from_json_str(&bad).is_err());
        let bad = DISK.replace("{\"exponents\": [0, 0], \"coeff\": 1}", "{\"exponents\": [0], \"coeff\": 1}");
        assert!(ProblemConfig::from_json_str(&bad).is_err());
        let bad = DISK.replace("\"resolution\": 3", "\"resolution\": 1");
        assert!(ProblemConfig::from_json_str(&bad).is_err());
    }

    #[test]
    fn point_cloud_parsing() {
        let pts = parse_point_cloud("x1,x2\n0.5, -1\n1e-3,2\n", 2).unwrap();
        assert_eq!(pts, vec![vec![0.5, -1.0], vec![1e-3, 2.0]]);
        assert!(parse_point_cloud("x1\n0.5\n", 2).is_err());
        assert!(parse_point_cloud("x1,x2\n0.5,abc\n", 2).is_err());
        assert!(parse_point_cloud("x1,x2\n0.5\n", 2).is_err());
        assert!(parse_point_cloud("x1,x2\n", 2).is_err());
        assert!(parse_point_cloud("x1,x2\nNaN,0\n", 2).is_err());
    }

    #[test]
    fn default_validation_grid_stays_bounded() {
        assert_eq!(default_validation_resolution(1), 2001);
        assert_eq!(default_validation_resolution(2), 1000);
        assert_eq!(default_validation_resolution(3), 100);
        assert!(default_validation_resolution(6) >= 2);
    }

    #[test]
    fn config_round_trips() {
        let cfg = ProblemConfig::from_json_str(DISK).unwrap();
        let text = super::super::format::to_json_string(&cfg).unwrap();
        assert_eq!(ProblemConfig::from_json_str(&text).unwrap(), cfg);
    }
}
