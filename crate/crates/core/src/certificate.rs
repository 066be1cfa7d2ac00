//! Dual certificates for the log-det design problem.
//!
//! For a design `w` with information matrix `M` and CD polynomial `p`, the
//! matrix `X̂ = (n_d / p_max) M⁻¹` satisfies `v_d(x)ᵀ X̂ v_d(x) <= n_d` at every
//! candidate, so it is feasible for the dual problem
//! `max log det X  s.t.  n_d - v_d(x)ᵀ X v_d(x) >= 0`.
//! The duality gap is then `n_d log(p_max / n_d)`, which vanishes exactly
//! when the design is optimal on the candidate set.

use crate::basis::{enumerate_basis, MultiIndexBasis};
use crate::design::{moment_matrix, CDPolynomial, DesignMeasure, MomentVector};
use crate::error::{Error, Result};
use crate::semialg::CandidateSet;
use crate::solver::SolveResult;
use crate::spd::{factorize, SymMatrix};

/// Relative slack used by level-set membership tests.
pub const LEVEL_SET_SLACK: f64 = 1e-10;

/// Default contact tolerance `n_d · 1e-4`.
pub fn default_contact_tolerance(n_d: usize) -> f64 {
    n_d as f64 * 1e-4
}

#[derive(Debug, Clone, PartialEq)]
pub struct SupportAtom {
    pub point: Vec<f64>,
    pub weight: f64,
    /// Unscaled `p(x)` at the atom.
    pub p_value: f64,
}

#[derive(Debug, Clone)]
pub struct DualCertificate {
    pub degree: usize,
    pub n_d: usize,
    /// `(n_d / p_max) M⁻¹`.
    pub x_hat: SymMatrix,
    /// Multiplier of the mass constraint paired with the unscaled `M⁻¹`: `-p_max`.
    pub z_hat: f64,
    /// `-log det M`.
    pub primal_value: f64,
    /// `log det X̂`, the objective of the normalized dual.
    pub dual_value: f64,
    /// `z + n_d + log det X` at the unscaled pair `(M⁻¹, z_hat)`.
    pub dual_value_unscaled: f64,
    /// `primal_value - dual_value`.
    pub gap: f64,
    /// `primal_value - dual_value_unscaled`, equal to `p_max - n_d`.
    pub gap_unscaled: f64,
    pub p_max: f64,
    /// `Σ w_i (n_d - (n_d / p_max) p(x_i))`.
    pub complementarity_residual: f64,
    pub support: Vec<SupportAtom>,
    cd: CDPolynomial,
    candidates: CandidateSet,
    p_values: Vec<f64>,
}

impl DualCertificate {
    pub fn cd_polynomial(&self) -> &CDPolynomial {
        &self.cd
    }

    pub fn candidates(&self) -> &CandidateSet {
        &self.candidates
    }

    /// Unscaled `p` at every candidate.
    pub fn p_values(&self) -> &[f64] {
        &self.p_values
    }

    pub fn scale(&self) -> f64 {
        self.n_d as f64 / self.p_max
    }

    /// `v_d(x)ᵀ X̂ v_d(x)`.
    pub fn scaled_cd(&self, x: &[f64]) -> Result<f64> {
        Ok(self.scale() * self.cd.eval(x)?)
    }
}

/// Builds the certificate of a finished solve.
pub fn build_certificate(result: &SolveResult, d: usize) -> Result<DualCertificate> {
    if result.degree != d {
        return Err(Error::WrongDegree {
            expected: result.degree,
            got: d,
        });
    }
    certify_design(
        &result.design,
        &result.candidates,
        d,
        result.config.prune_threshold,
    )
}

/// Builds the certificate of an arbitrary non-degenerate design, with
/// `p_max` taken over `candidates` and the design's own atoms.
pub fn certify_design(
    design: &DesignMeasure,
    candidates: &CandidateSet,
    d: usize,
    support_threshold: f64,
) -> Result<DualCertificate> {
    if candidates.dimension() != design.dimension() {
        return Err(Error::DimensionMismatch {
            expected: design.dimension(),
            got: candidates.dimension(),
        });
    }
    let cd = CDPolynomial::from_design(design, d)?;
    let n_d = cd.n_d();
    let nd = n_d as f64;
    let p_values = cd.profile(candidates.points())?;
    let atom_p = cd.profile(design.points())?;
    let p_max = p_values
        .iter()
        .chain(&atom_p)
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);

    let log_det_m = cd.factor().log_det();
    let x_hat = cd.factor().inverse().scaled(nd / p_max);
    let dual_value = factorize(&x_hat)?.log_det();
    let primal_value = -log_det_m;
    let z_hat = -p_max;
    let dual_value_unscaled = z_hat + nd - log_det_m;

    let complementarity_residual = design
        .weights()
        .iter()
        .zip(&atom_p)
        .map(|(w, p)| w * (nd - nd / p_max * p))
        .sum();

    let support = design
        .points()
        .iter()
        .zip(design.weights())
        .zip(&atom_p)
        .filter(|((_, &w), _)| w > 0.0 && w >= support_threshold)
        .map(|((x, &w), &p)| SupportAtom {
            point: x.clone(),
            weight: w,
            p_value: p,
        })
        .collect();

    Ok(DualCertificate {
        degree: d,
        n_d,
        x_hat,
        z_hat,
        primal_value,
        dual_value,
        dual_value_unscaled,
        gap: primal_value - dual_value,
        gap_unscaled: primal_value - dual_value_unscaled,
        p_max,
        complementarity_residual,
        support,
        cd,
        candidates: candidates.clone(),
        p_values,
    })
}

/// Coefficients of `v_d(x)ᵀ X v_d(x)` in the degree-`2d` monomial basis.
#[derive(Debug, Clone, PartialEq)]
pub struct CDCoefficients {
    pub basis2d: MultiIndexBasis,
    pub coeffs: Vec<f64>,
}

impl CDCoefficients {
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        let v = self.basis2d.eval(x)?;
        Ok(v.iter().zip(&self.coeffs).map(|(a, b)| a * b).sum())
    }
}

/// The adjoint `M*_d(X)`: coefficient of `α` is the sum of `X_ij` over all
/// `(i, j)` with `α_i + α_j = α`.
pub fn adjoint_expand(x: &SymMatrix, basis_d: &MultiIndexBasis) -> Result<CDCoefficients> {
    if x.size() != basis_d.len() {
        return Err(Error::SizeMismatch {
            expected: basis_d.len(),
            got: x.size(),
        });
    }
    let map = basis_d.outer_index_map();
    let mut coeffs = vec![0.0; map.basis2d().len()];
    for i in 0..x.size() {
        for j in 0..x.size() {
            coeffs[map.position(i, j)] += x.get(i, j);
        }
    }
    Ok(CDCoefficients {
        basis2d: map.basis2d().clone(),
        coeffs,
    })
}

/// `|trace(M_d(y) X) - M*_d(X) · y|`.
pub fn adjoint_identity_check(y: &MomentVector, x: &SymMatrix) -> Result<f64> {
    let d = y.half_degree();
    let basis_d = enumerate_basis(y.basis().dimension(), d)?;
    let coeffs = adjoint_expand(x, &basis_d)?;
    let m = moment_matrix(y, d)?;
    let trace = m.trace_product(x);
    let pairing: f64 = coeffs.coeffs.iter().zip(y.values()).map(|(c, v)| c * v).sum();
    Ok((trace - pairing).abs())
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualViolation {
    /// `max_x v_d(x)ᵀ X̂ v_d(x) - n_d` over the validation points.
    pub max_violation: f64,
    pub argmax_point: Vec<f64>,
}

/// Checks the dual constraint on a validation set; a positive value means
/// the candidate set missed a region where `p` exceeds its candidate maximum.
pub fn validate_dual_feasibility(
    cert: &DualCertificate,
    validation: &CandidateSet,
) -> Result<DualViolation> {
    let nd = cert.n_d as f64;
    let mut best = DualViolation {
        max_violation: f64::NEG_INFINITY,
        argmax_point: Vec::new(),
    };
    for x in validation.points() {
        let gap = cert.scaled_cd(x)? - nd;
        if gap > best.max_violation {
            best.max_violation = gap;
            best.argmax_point = x.clone();
        }
    }
    Ok(best)
}

/// Candidates where the scaled CD polynomial is within `delta` of `n_d`.
pub fn contact_points(cert: &DualCertificate, delta: f64) -> Vec<Vec<f64>> {
    let level = cert.n_d as f64 - delta;
    let scale = cert.scale();
    cert.candidates
        .points()
        .iter()
        .zip(&cert.p_values)
        .filter(|(_, &p)| scale * p >= level)
        .map(|(x, _)| x.clone())
        .collect()
}
