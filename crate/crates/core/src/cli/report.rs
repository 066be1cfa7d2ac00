//! Run report schema.

use serde::{Deserialize, Serialize};

use crate::certificate::{certify_design, DualCertificate};
use crate::design::DesignMeasure;
use crate::geometry::Ellipsoid;
use crate::semialg::{CandidateSet, CandidateSource};
use crate::solver::{Algorithm, TraceEntry};

use super::config::ProblemConfig;
use super::format::to_json_string;
use super::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightedPoint {
    pub point: Vec<f64>,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveSection {
    pub algorithm: Algorithm,
    pub iterations: usize,
    pub converged: bool,
    pub prune_rolled_back: bool,
    /// `log det M_d(ŵ)`.
    pub objective: f64,
    pub p_max: f64,
    pub candidates: Vec<Vec<f64>>,
    /// `p(x)` at each entry of `candidates`.
    pub p_values: Vec<f64>,
    /// Pruned design.
    pub design: Vec<WeightedPoint>,
    pub trace: Vec<TraceEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SupportRow {
    pub point: Vec<f64>,
    pub weight: f64,
    pub p_value: f64,
    pub scaled_p_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateSection {
    /// Scaled dual matrix `(n_d / p_max) M⁻¹`, row-major.
    pub x_hat: Vec<Vec<f64>>,
    pub z_hat: f64,
    /// `-log det M` (the mass-constrained primal has no linear term).
    pub primal_value: f64,
    /// `log det X̂`: normalized dual objective, where `n_d + z` cancels.
    pub dual_value: f64,
    /// `z + n_d + log det X` at `(M⁻¹, z_hat)`.
    pub dual_value_unscaled: f64,
    pub gap: f64,
    pub gap_unscaled: f64,
    pub p_max: f64,
    pub complementarity_residual: f64,
    pub support: Vec<SupportRow>,
    pub contact_tolerance: f64,
    pub contact_points: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidationSection {
    pub resolution: usize,
    pub num_points: usize,
    pub max_violation: f64,
    pub argmax_point: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonomialValue {
    pub exponents: Vec<u32>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StatusSection {
    /// Final design passes `p_max <= n_d (1 + ε)` on the candidates.
    pub converged: bool,
    /// Validation violation is at most `n_d ε`.
    pub validated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Timings {
    pub candidates_s: f64,
    pub solve_s: f64,
    pub certificate_s: f64,
    pub validation_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunReport {
    pub version: String,
    pub config: ProblemConfig,
    pub n_d: usize,
    pub status: StatusSection,
    pub solve: SolveSection,
    pub certificate: CertificateSection,
    pub validation: ValidationSection,
    /// Moment vector of the final design up to degree `2d`.
    pub moments: Vec<MonomialValue>,
    /// Coefficients of `p` in the degree-`2d` monomial basis.
    pub cd_coefficients: Vec<MonomialValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ellipsoid: Option<Ellipsoid>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings: Option<Timings>,
}

impl RunReport {
    pub fn to_json(&self) -> Result<String, CliError> {
        to_json_string(self).map_err(|e| CliError::Report(e.to_string()))
    }

    pub fn from_json_str(text: &str) -> Result<Self, CliError> {
        let report: RunReport =
            serde_json::from_str(text).map_err(|e| CliError::Report(e.to_string()))?;
        report.check_consistency()?;
        Ok(report)
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Report(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    pub fn dimension(&self) -> usize {
        self.config.dimension
    }

    pub fn degree(&self) -> usize {
        self.config.degree
    }

    fn check_consistency(&self) -> Result<(), CliError> {
        let n = self.config.dimension;
        if self.config.degree < 1 || n < 1 || self.config.dimension > 64 || self.config.degree > 64
        {
            return Err(CliError::Report("report has an invalid dimension or degree".into()));
        }
        if self.n_d != self.config.n_d() {
            return Err(CliError::Report(format!(
                "report n_d = {} does not match the configured model ({})",
                self.n_d,
                self.config.n_d()
            )));
        }
        if self.solve.p_values.len() != self.solve.candidates.len() {
            return Err(CliError::Report("p_values and candidates differ in length".into()));
        }
        let bad_point = self
            .solve
            .candidates
            .iter()
            .chain(self.solve.design.iter().map(|a| &a.point))
            .any(|p| p.len() != n);
        if bad_point || self.solve.candidates.is_empty() || self.solve.design.is_empty() {
            return Err(CliError::Report("report points do not match the dimension".into()));
        }
        Ok(())
    }

    pub fn candidate_set(&self) -> Result<CandidateSet, CliError> {
        CandidateSet::new(
            self.dimension(),
            self.solve.candidates.clone(),
            CandidateSource::Explicit,
        )
        .map_err(|e| CliError::Report(e.to_string()))
    }

    pub fn design(&self) -> Result<DesignMeasure, CliError> {
        let pts = self.solve.design.iter().map(|a| a.point.clone()).collect();
        let weights = self.solve.design.iter().map(|a| a.weight).collect();
        let cands = CandidateSet::new(self.dimension(), pts, CandidateSource::Explicit)
            .map_err(|e| CliError::Report(e.to_string()))?;
        DesignMeasure::new(cands, weights).map_err(|e| CliError::Report(e.to_string()))
    }

    /// Recomputes the dual certificate from the stored design and candidates.
    pub fn rebuild_certificate(&self) -> Result<DualCertificate, CliError> {
        let design = self.design()?;
        let cands = self.candidate_set()?;
        certify_design(
            &design,
            &cands,
            self.degree(),
            self.config.solver.prune_threshold,
        )
        .map_err(CliError::from)
    }
}
