//! Enclosing sets read off a dual certificate.
//!
//! For `d = 1` the dual-feasible set `{x : v_1(x)ᵀ X̂ v_1(x) <= n_d}` is an
//! ellipsoid containing the candidates; at the optimal design it is the
//! minimum-volume enclosing ellipsoid. For `d > 1` only the level-set
//! membership test is available.

use serde::{Deserialize, Serialize};

use crate::certificate::{contact_points, DualCertificate, LEVEL_SET_SLACK};
use crate::error::{Error, Result};
use crate::spd::{factorize, SymMatrix};

/// `{x : (x - c)ᵀ E (x - c) <= radius_sq}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ellipsoid {
    pub center: Vec<f64>,
    /// Row-major `n x n` shape matrix.
    pub shape: Vec<Vec<f64>>,
    pub radius_sq: f64,
    /// `-½ log det E`, monotone in the volume for a fixed radius.
    pub log_volume_proxy: f64,
}

impl Ellipsoid {
    pub fn dimension(&self) -> usize {
        self.center.len()
    }

    /// `(x - c)ᵀ E (x - c)`.
    pub fn level(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.center.len() {
            return Err(Error::DimensionMismatch {
                expected: self.center.len(),
                got: x.len(),
            });
        }
        let diff: Vec<f64> = x.iter().zip(&self.center).map(|(a, b)| a - b).collect();
        Ok(self
            .shape
            .iter()
            .zip(&diff)
            .map(|(row, di)| di * row.iter().zip(&diff).map(|(e, dj)| e * dj).sum::<f64>())
            .sum())
    }

    pub fn contains(&self, x: &[f64]) -> Result<bool> {
        Ok(self.level(x)? <= self.radius_sq * (1.0 + LEVEL_SET_SLACK))
    }
}

/// Rewrites the degree-1 level set in centered form by block elimination of
/// `X̂ = [[a, bᵀ], [b, C]]`: center `-C⁻¹ b`, shape `C`,
/// radius² `n_d - a + bᵀ C⁻¹ b`.
pub fn extract_ellipsoid(cert: &DualCertificate, n: usize) -> Result<Ellipsoid> {
    if cert.degree != 1 {
        return Err(Error::WrongDegree {
            expected: 1,
            got: cert.degree,
        });
    }
    let x = &cert.x_hat;
    if x.size() != n + 1 {
        return Err(Error::SizeMismatch {
            expected: n + 1,
            got: x.size(),
        });
    }
    let a = x.get(0, 0);
    let b: Vec<f64> = (1..=n).map(|i| x.get(i, 0)).collect();
    let mut c = SymMatrix::zeros(n);
    for i in 0..n {
        for j in 0..=i {
            c.set(i, j, x.get(i + 1, j + 1));
        }
    }
    let factor = factorize(&c).map_err(|e| {
        Error::NotAnEllipsoid(format!("quadratic block is not positive definite ({e})"))
    })?;
    let c_inv_b = factor.solve(&b)?;
    let radius_sq = cert.n_d as f64 - a + b.iter().zip(&c_inv_b).map(|(u, v)| u * v).sum::<f64>();
    if !(radius_sq > 0.0) {
        return Err(Error::NotAnEllipsoid(format!(
            "non-positive squared radius {radius_sq}"
        )));
    }
    Ok(Ellipsoid {
        center: c_inv_b.iter().map(|v| -v).collect(),
        shape: c.to_rows(),
        radius_sq,
        log_volume_proxy: -0.5 * factor.log_det(),
    })
}

pub fn contains(e: &Ellipsoid, x: &[f64]) -> Result<bool> {
    e.contains(x)
}

/// `v_d(x)ᵀ X̂ v_d(x) <= n_d (1 + 1e-10)`.
pub fn levelset_membership(cert: &DualCertificate, x: &[f64]) -> Result<bool> {
    Ok(cert.scaled_cd(x)? <= cert.n_d as f64 * (1.0 + LEVEL_SET_SLACK))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelSetReport {
    /// Degree `2d` of the CD polynomial.
    pub degree: usize,
    pub threshold: f64,
    /// `(point, inside)` for each probe.
    pub probes: Vec<(Vec<f64>, bool)>,
    pub contact_points: Vec<Vec<f64>>,
}

pub fn levelset_report(
    cert: &DualCertificate,
    probes: &[Vec<f64>],
    delta: f64,
) -> Result<LevelSetReport> {
    let probes = probes
        .iter()
        .map(|x| Ok((x.clone(), levelset_membership(cert, x)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(LevelSetReport {
        degree: 2 * cert.degree,
        threshold: cert.n_d as f64,
        probes,
        contact_points: contact_points(cert, delta),
    })
}
