//! Design measures, their moments, and the Christoffel-Darboux polynomial.
//!
//! A [`DesignMeasure`] is a probability vector over a [`CandidateSet`]. Its
//! information matrix `M_d(w) = Σ w_i v_d(x_i) v_d(x_i)ᵀ` is the moment matrix
//! of the atomic measure, and `p(x) = v_d(x)ᵀ M_d⁻¹ v_d(x)` is the associated
//! Christoffel-Darboux polynomial. `p` is always evaluated through the
//! Cholesky factor of `M_d`; its coefficients are never expanded here.

use crate::basis::{enumerate_basis, MultiIndexBasis};
use crate::error::{Error, Result};
use crate::semialg::CandidateSet;
use crate::spd::{factorize, SpdFactor, SymMatrix};

/// Weight vectors whose mass is within this of 1 are renormalized; others are rejected.
pub const MASS_TOLERANCE: f64 = 1e-9;

/// Probability weights on a finite candidate set.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMeasure {
    candidates: CandidateSet,
    weights: Vec<f64>,
}

impl DesignMeasure {
    pub fn new(candidates: CandidateSet, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != candidates.len() {
            return Err(Error::DimensionMismatch {
                expected: candidates.len(),
                got: weights.len(),
            });
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
            return Err(Error::InvalidWeights(format!(
                "weights must be finite and non-negative, found {w}"
            )));
        }
        let mass: f64 = weights.iter().sum();
        if (mass - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::InvalidWeights(format!(
                "weights sum to {mass}, expected 1"
            )));
        }
        Ok(DesignMeasure {
            candidates,
            weights: normalized(weights),
        })
    }

    /// Equal weight `1/N` on every candidate.
    pub fn uniform(candidates: CandidateSet) -> Self {
        let n = candidates.len();
        DesignMeasure {
            candidates,
            weights: vec![1.0 / n as f64; n],
        }
    }

    /// Internal constructor for weights already on the simplex up to round-off.
    pub(crate) fn from_simplex(candidates: CandidateSet, weights: Vec<f64>) -> Self {
        debug_assert_eq!(candidates.len(), weights.len());
        DesignMeasure {
            candidates,
            weights: normalized(weights),
        }
    }

    pub fn candidates(&self) -> &CandidateSet {
        &self.candidates
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn points(&self) -> &[Vec<f64>] {
        self.candidates.points()
    }

    pub fn dimension(&self) -> usize {
        self.candidates.dimension()
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// `(point, weight)` pairs with strictly positive weight.
    pub fn atoms(&self) -> impl Iterator<Item = (&[f64], f64)> {
        self.points()
            .iter()
            .zip(&self.weights)
            .filter(|(_, &w)| w > 0.0)
            .map(|(p, &w)| (p.as_slice(), w))
    }
}

/// Sum in ascending order, so the result does not depend on input order.
fn canonical_sum(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.iter().sum()
}

pub(crate) fn normalized(mut weights: Vec<f64>) -> Vec<f64> {
    let mass = canonical_sum(&weights);
    if mass > 0.0 && mass != 1.0 {
        for w in &mut weights {
            *w /= mass;
        }
    }
    weights
}

/// Moments `y_α = Σ w_i x_i^α` for all `|α| <= 2d`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentVector {
    basis2d: MultiIndexBasis,
    values: Vec<f64>,
}

impl MomentVector {
    /// Wraps raw moments; `values` must follow `basis2d`, whose degree must be even.
    pub fn new(basis2d: MultiIndexBasis, values: Vec<f64>) -> Result<Self> {
        if values.len() != basis2d.len() {
            return Err(Error::DimensionMismatch {
                expected: basis2d.len(),
                got: values.len(),
            });
        }
        if !basis2d.degree().is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!(
                "moment vector needs an even degree, got {}",
                basis2d.degree()
            )));
        }
        Ok(MomentVector { basis2d, values })
    }

    pub fn basis(&self) -> &MultiIndexBasis {
        &self.basis2d
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Half the degree of the underlying basis.
    pub fn half_degree(&self) -> usize {
        self.basis2d.degree() / 2
    }

    pub fn mass(&self) -> f64 {
        self.values[0]
    }
}

/// Atoms sorted by coordinates, then weight. Accumulating in this order
/// makes assembled quantities bit-identical under reordering of the atoms.
fn canonical_atoms(mu: &DesignMeasure) -> Vec<(&[f64], f64)> {
    let mut atoms: Vec<(&[f64], f64)> = mu.atoms().collect();
    atoms.sort_by(|(xa, wa), (xb, wb)| {
        xa.iter()
            .zip(xb.iter())
            .map(|(a, b)| a.total_cmp(b))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(wa.total_cmp(wb))
    });
    atoms
}

pub fn moment_vector(mu: &DesignMeasure, d: usize) -> Result<MomentVector> {
    let basis2d = enumerate_basis(mu.dimension(), 2 * d)?;
    let mut values = vec![0.0; basis2d.len()];
    for (x, w) in canonical_atoms(mu) {
        for (acc, m) in values.iter_mut().zip(basis2d.eval_unchecked(x)) {
            *acc += w * m;
        }
    }
    Ok(MomentVector { basis2d, values })
}

/// Hankel-type fill `M_d(y)_{ij} = y_{α_i + α_j}`.
pub fn moment_matrix(y: &MomentVector, d: usize) -> Result<SymMatrix> {
    if y.basis2d.degree() != 2 * d {
        return Err(Error::InvalidArgument(format!(
            "moment vector has degree {}, expected {}",
            y.basis2d.degree(),
            2 * d
        )));
    }
    let basis = enumerate_basis(y.basis2d.dimension(), d)?;
    let map = basis.outer_index_map();
    let mut m = SymMatrix::zeros(basis.len());
    for i in 0..basis.len() {
        for j in 0..=i {
            m.set(i, j, y.values[map.position(i, j)]);
        }
    }
    Ok(m)
}

/// Rank-one-sum assembly of `M_d(w)`.
pub fn information_matrix(mu: &DesignMeasure, d: usize) -> Result<SymMatrix> {
    let basis = enumerate_basis(mu.dimension(), d)?;
    let mut m = SymMatrix::zeros(basis.len());
    for (x, w) in canonical_atoms(mu) {
        m.add_outer(w, &basis.eval_unchecked(x));
    }
    Ok(m)
}

/// Factor of `M_d(w)`; `DegenerateDesign` when the weights do not span the model.
pub fn assemble_information(mu: &DesignMeasure, d: usize) -> Result<SpdFactor> {
    factorize(&information_matrix(mu, d)?).map_err(Error::into_degenerate)
}

/// `p(x) = v_d(x)ᵀ M⁻¹ v_d(x)`, held as the factor of `M`.
#[derive(Debug, Clone)]
pub struct CDPolynomial {
    basis: MultiIndexBasis,
    factor: SpdFactor,
}

impl CDPolynomial {
    pub fn new(basis: MultiIndexBasis, factor: SpdFactor) -> Result<Self> {
        if basis.len() != factor.size() {
            return Err(Error::SizeMismatch {
                expected: basis.len(),
                got: factor.size(),
            });
        }
        Ok(CDPolynomial { basis, factor })
    }

    pub fn from_design(mu: &DesignMeasure, d: usize) -> Result<Self> {
        let factor = assemble_information(mu, d)?;
        Ok(CDPolynomial {
            basis: enumerate_basis(mu.dimension(), d)?,
            factor,
        })
    }

    pub fn basis(&self) -> &MultiIndexBasis {
        &self.basis
    }

    pub fn factor(&self) -> &SpdFactor {
        &self.factor
    }

    /// `n_d`, the number of model coefficients.
    pub fn n_d(&self) -> usize {
        self.basis.len()
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        let v = self.basis.eval(x)?;
        Ok(self.factor.quad_form_inv_unchecked(&v))
    }

    pub fn profile(&self, pts: &[Vec<f64>]) -> Result<Vec<f64>> {
        pts.iter().map(|x| self.eval(x)).collect()
    }
}

pub fn cd_eval(p: &CDPolynomial, x: &[f64]) -> Result<f64> {
    p.eval(x)
}

pub fn cd_profile(p: &CDPolynomial, pts: &[Vec<f64>]) -> Result<Vec<f64>> {
    p.profile(pts)
}
