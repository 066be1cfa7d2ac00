//! Semi-algebraic design spaces and their finite discretizations.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::basis::MultiIndex;
use crate::error::{Error, Result};

/// Largest grid the discretizer will enumerate.
pub const MAX_GRID_POINTS: usize = 50_000_000;

/// Polynomial stored as a map from exponent vector to nonzero coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct SparsePolynomial {
    n: usize,
    terms: BTreeMap<MultiIndex, f64>,
}

impl SparsePolynomial {
    /// Builds a polynomial from `(exponents, coefficient)` pairs. Repeated
    /// exponents are summed; zero coefficients are dropped.
    pub fn new<I>(n: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (MultiIndex, f64)>,
    {
        if n < 1 {
            return Err(Error::InvalidArgument(
                "polynomial dimension must be at least 1".into(),
            ));
        }
        let mut map: BTreeMap<MultiIndex, f64> = BTreeMap::new();
        for (alpha, coeff) in terms {
            if alpha.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: alpha.len(),
                });
            }
            if !coeff.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "non-finite coefficient {coeff} for monomial {alpha}"
                )));
            }
            *map.entry(alpha).or_insert(0.0) += coeff;
        }
        map.retain(|_, c| *c != 0.0);
        Ok(SparsePolynomial { n, terms: map })
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, f64)> {
        self.terms.iter().map(|(a, &c)| (a, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        Ok(self.terms.iter().map(|(a, c)| c * a.monomial(x)).sum())
    }
}

/// `{x in box : g_j(x) >= 0 for all j}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SemiAlgebraicSet {
    n: usize,
    inequalities: Vec<SparsePolynomial>,
    bounding_box: Vec<(f64, f64)>,
}

impl SemiAlgebraicSet {
    pub fn new(bounding_box: Vec<(f64, f64)>, inequalities: Vec<SparsePolynomial>) -> Result<Self> {
        let n = bounding_box.len();
        if n < 1 {
            return Err(Error::InvalidArgument(
                "bounding box needs at least one coordinate".into(),
            ));
        }
        for (i, &(lo, hi)) in bounding_box.iter().enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::InvalidArgument(format!(
                    "bounding box axis {i} must satisfy lo < hi, got [{lo}, {hi}]"
                )));
            }
        }
        for g in &inequalities {
            if g.dimension() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: g.dimension(),
                });
            }
        }
        Ok(SemiAlgebraicSet {
            n,
            inequalities,
            bounding_box,
        })
    }

    /// The box itself, with no polynomial constraints.
    pub fn from_box(bounding_box: Vec<(f64, f64)>) -> Result<Self> {
        Self::new(bounding_box, Vec::new())
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn inequalities(&self) -> &[SparsePolynomial] {
        &self.inequalities
    }

    pub fn bounding_box(&self) -> &[(f64, f64)] {
        &self.bounding_box
    }

    /// Closed membership test, exact comparison against zero.
    pub fn contains(&self, x: &[f64]) -> Result<bool> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        Ok(self.contains_unchecked(x))
    }

    fn contains_unchecked(&self, x: &[f64]) -> bool {
        let in_box = x
            .iter()
            .zip(&self.bounding_box)
            .all(|(&xi, &(lo, hi))| lo <= xi && xi <= hi);
        in_box
            && self
                .inequalities
                .iter()
                .all(|g| g.terms.iter().map(|(a, c)| c * a.monomial(x)).sum::<f64>() >= 0.0)
    }
}

/// Where a candidate set came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CandidateSource {
    Grid { resolution: usize },
    Explicit,
}

/// Finite list of points discretizing the design space.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateSet {
    n: usize,
    points: Vec<Vec<f64>>,
    source: CandidateSource,
}

impl CandidateSet {
    /// Wraps a point list without membership filtering. Every point must have
    /// length `n` and the list must be non-empty.
    pub fn new(n: usize, points: Vec<Vec<f64>>, source: CandidateSource) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyCandidateSet);
        }
        if let Some(bad) = points.iter().find(|p| p.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: bad.len(),
            });
        }
        Ok(CandidateSet { n, points, source })
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn source(&self) -> &CandidateSource {
        &self.source
    }

    /// Keeps the points at positions where `keep` is true, in order.
    pub(crate) fn subset(&self, keep: &[bool]) -> CandidateSet {
        CandidateSet {
            n: self.n,
            points: self
                .points
                .iter()
                .zip(keep)
                .filter(|(_, &k)| k)
                .map(|(p, _)| p.clone())
                .collect(),
            source: self.source.clone(),
        }
    }
}

/// Coordinates of the `k`-th of `resolution` equispaced nodes on `[lo, hi]`.
fn grid_node(lo: f64, hi: f64, k: usize, resolution: usize) -> f64 {
    if k + 1 == resolution {
        hi
    } else {
        lo + (hi - lo) * k as f64 / (resolution - 1) as f64
    }
}

/// Uniform box grid with `resolution` nodes per axis, filtered by membership.
/// The first coordinate varies slowest.
pub fn grid_candidates(set: &SemiAlgebraicSet, resolution: usize) -> Result<CandidateSet> {
    if resolution < 2 {
        return Err(Error::InvalidArgument(format!(
            "grid resolution must be at least 2, got {resolution}"
        )));
    }
    let n = set.dimension();
    let total = u32::try_from(n)
        .ok()
        .and_then(|e| resolution.checked_pow(e))
        .filter(|&t| t <= MAX_GRID_POINTS)
        .ok_or_else(|| {
            Error::InvalidArgument(format!(
                "grid of {resolution}^{n} points exceeds the {MAX_GRID_POINTS}-point limit"
            ))
        })?;
    let axes: Vec<Vec<f64>> = set
        .bounding_box()
        .iter()
        .map(|&(lo, hi)| (0..resolution).map(|k| grid_node(lo, hi, k, resolution)).collect())
        .collect();

    let mut counter = vec![0usize; n];
    let mut point = vec![0.0; n];
    let mut points = Vec::new();
    for _ in 0..total {
        for (i, &c) in counter.iter().enumerate() {
            point[i] = axes[i][c];
        }
        if set.contains_unchecked(&point) {
            points.push(point.clone());
        }
        // odometer, last axis fastest
        for i in (0..n).rev() {
            counter[i] += 1;
            if counter[i] < resolution {
                break;
            }
            counter[i] = 0;
        }
    }
    if points.is_empty() {
        return Err(Error::EmptyCandidateSet);
    }
    Ok(CandidateSet {
        n,
        points,
        source: CandidateSource::Grid { resolution },
    })
}

/// Filters an explicit point list by membership, dropping exact duplicates
/// (first occurrence kept).
pub fn explicit_candidates(set: &SemiAlgebraicSet, pts: &[Vec<f64>]) -> Result<CandidateSet> {
    if pts.is_empty() {
        return Err(Error::InvalidArgument("explicit point list is empty".into()));
    }
    let mut seen: std::collections::HashSet<Vec<u64>> = std::collections::HashSet::new();
    let mut points = Vec::new();
    for p in pts {
        if !set.contains(p)? {
            continue;
        }
        // +0.0 and -0.0 compare equal
        let key: Vec<u64> = p.iter().map(|&c| (c + 0.0).to_bits()).collect();
        if seen.insert(key) {
            points.push(p.clone());
        }
    }
    if points.is_empty() {
        return Err(Error::EmptyCandidateSet);
    }
    Ok(CandidateSet {
        n: set.dimension(),
        points,
        source: CandidateSource::Explicit,
    })
}
