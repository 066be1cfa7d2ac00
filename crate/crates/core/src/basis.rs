//! Monomial bases in graded lexicographic order.
//!
//! A [`MultiIndexBasis`] of dimension `n` and degree `d` lists every exponent
//! vector of total degree at most `d`, sorted by total degree and then in
//! descending lexicographic order within a degree, so that for `n = 2, d = 1`
//! the basis reads `(1, x1, x2)`. Every matrix and report in the crate uses
//! this order.

use std::collections::HashMap;
use std::fmt;
use std::ops::Add;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exponent vector of a monomial, one entry per variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        MultiIndex(exponents)
    }

    pub fn zero(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    /// Evaluates `x^alpha`. The caller guarantees `x.len() == self.len()`.
    pub fn monomial(&self, x: &[f64]) -> f64 {
        self.0
            .iter()
            .zip(x)
            .map(|(&e, &xi)| xi.powi(e as i32))
            .product()
    }
}

impl Add for &MultiIndex {
    type Output = MultiIndex;

    fn add(self, rhs: &MultiIndex) -> MultiIndex {
        debug_assert_eq!(self.len(), rhs.len());
        MultiIndex(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, e) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

/// All multi-indices of total degree `<= d` in `n` variables.
#[derive(Debug, Clone)]
pub struct MultiIndexBasis {
    n: usize,
    d: usize,
    indices: Vec<MultiIndex>,
    position: HashMap<MultiIndex, usize>,
}

impl PartialEq for MultiIndexBasis {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.d == other.d && self.indices == other.indices
    }
}

/// Binomial coefficient `(n + d choose d)`, the size of the degree-`d` basis.
pub fn basis_size(n: usize, d: usize) -> usize {
    let mut acc: u128 = 1;
    for k in 1..=d as u128 {
        acc = acc * (n as u128 + k) / k;
    }
    acc as usize
}

/// Enumerates the graded lexicographic monomial basis. Rejects `n < 1` and `d < 1`.
pub fn enumerate_basis(n: usize, d: usize) -> Result<MultiIndexBasis> {
    if n < 1 || d < 1 {
        return Err(Error::InvalidDimension { n, d });
    }
    Ok(MultiIndexBasis::build(n, d))
}

/// Pushes every exponent vector of `n` variables with total degree exactly
/// `remaining`, first exponent descending.
fn push_degree(prefix: &mut Vec<u32>, n: usize, remaining: u32, out: &mut Vec<MultiIndex>) {
    if prefix.len() + 1 == n {
        prefix.push(remaining);
        out.push(MultiIndex(prefix.clone()));
        prefix.pop();
        return;
    }
    for e in (0..=remaining).rev() {
        prefix.push(e);
        push_degree(prefix, n, remaining - e, out);
        prefix.pop();
    }
}

impl MultiIndexBasis {
    fn build(n: usize, d: usize) -> Self {
        let mut indices = Vec::with_capacity(basis_size(n, d));
        let mut prefix = Vec::with_capacity(n);
        for degree in 0..=d as u32 {
            push_degree(&mut prefix, n, degree, &mut indices);
        }
        let position = indices
            .iter()
            .enumerate()
            .map(|(k, a)| (a.clone(), k))
            .collect();
        MultiIndexBasis {
            n,
            d,
            indices,
            position,
        }
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    /// Number of basis monomials, `n_d`.
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    /// Position of `alpha` in the basis, if its degree is within range.
    pub fn position_of(&self, alpha: &MultiIndex) -> Option<usize> {
        self.position.get(alpha).copied()
    }

    /// The vector `v_d(x)` of all basis monomials evaluated at `x`.
    pub fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        Ok(self.eval_unchecked(x))
    }

    pub(crate) fn eval_unchecked(&self, x: &[f64]) -> Vec<f64> {
        // powers[i][e] = x_i^e
        let powers: Vec<Vec<f64>> = x
            .iter()
            .map(|&xi| {
                let mut row = Vec::with_capacity(self.d + 1);
                let mut acc = 1.0;
                for _ in 0..=self.d {
                    row.push(acc);
                    acc *= xi;
                }
                row
            })
            .collect();
        self.indices
            .iter()
            .map(|alpha| {
                alpha
                    .0
                    .iter()
                    .enumerate()
                    .map(|(i, &e)| powers[i][e as usize])
                    .product()
            })
            .collect()
    }

    /// Builds the table sending each moment-matrix entry to its degree-`2d` monomial.
    pub fn outer_index_map(&self) -> OuterIndexMap {
        OuterIndexMap::new(self)
    }
}

/// Index table realizing the moment matrix `M_d` as a linear map from
/// degree-`2d` moment vectors to symmetric `n_d x n_d` matrices.
#[derive(Debug, Clone)]
pub struct OuterIndexMap {
    size: usize,
    basis2d: MultiIndexBasis,
    // row-major, size * size entries, each a position in basis2d
    table: Vec<usize>,
}

impl OuterIndexMap {
    fn new(basis: &MultiIndexBasis) -> Self {
        let basis2d = MultiIndexBasis::build(basis.n, 2 * basis.d);
        let size = basis.len();
        let mut table = Vec::with_capacity(size * size);
        for a in &basis.indices {
            for b in &basis.indices {
                let sum = a + b;
                let pos = basis2d
                    .position_of(&sum)
                    .expect("sum of two degree-d indices has degree <= 2d");
                table.push(pos);
            }
        }
        OuterIndexMap {
            size,
            basis2d,
            table,
        }
    }

    /// Side length `n_d` of the moment matrix.
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn basis2d(&self) -> &MultiIndexBasis {
        &self.basis2d
    }

    /// Position in the degree-`2d` basis of entry `(row, col)`.
    pub fn position(&self, row: usize, col: usize) -> usize {
        self.table[row * self.size + col]
    }

    /// The multi-index `indices[row] + indices[col]`.
    pub fn get(&self, row: usize, col: usize) -> &MultiIndex {
        &self.basis2d.indices[self.position(row, col)]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn idx(e: &[u32]) -> MultiIndex {
        MultiIndex::new(e.to_vec())
    }

    #[test]
    fn univariate_quadratic_basis() {
        let b = enumerate_basis(1, 2).unwrap();
        assert_eq!(b.len(), 3);
        assert_eq!(b.indices(), &[idx(&[0]), idx(&[1]), idx(&[2])]);
    }

    #[test]
    fn bivariate_linear_basis() {
        let b = enumerate_basis(2, 1).unwrap();
        assert_eq!(b.indices(), &[idx(&[0, 0]), idx(&[1, 0]), idx(&[0, 1])]);
    }

    #[test]
    fn trivariate_quadratic_size() {
        assert_eq!(enumerate_basis(3, 2).unwrap().len(), 10);
    }

    #[test]
    fn bivariate_quadratic_order() {
        let b = enumerate_basis(2, 2).unwrap();
        let expected = [
            [0, 0],
            [1, 0],
            [0, 1],
            [2, 0],
            [1, 1],
            [0, 2],
        ];
        let got: Vec<_> = b.indices().iter().map(|a| a.exponents().to_vec()).collect();
        assert_eq!(got, expected.iter().map(|e| e.to_vec()).collect::<Vec<_>>());
    }

    #[test]
    fn rejects_degenerate_dimensions() {
        assert_eq!(
            enumerate_basis(0, 2).unwrap_err(),
            Error::InvalidDimension { n: 0, d: 2 }
        );
        assert!(matches!(
            enumerate_basis(2, 0),
            Err(Error::InvalidDimension { .. })
        ));
    }

    #[test]
    fn sizes_match_binomial() {
        for n in 1..=4 {
            for d in 1..=6 {
                // (n+d)! / (n! d!) by direct factorials
                let fact = |k: usize| (1..=k as u128).product::<u128>();
                let expected = fact(n + d) / (fact(n) * fact(d));
                let b = enumerate_basis(n, d).unwrap();
                assert_eq!(b.len() as u128, expected, "n={n} d={d}");
                assert_eq!(basis_size(n, d) as u128, expected);
                // graded and duplicate free
                let degrees: Vec<u32> = b.indices().iter().map(|a| a.degree()).collect();
                assert!(degrees.windows(2).all(|w| w[0] <= w[1]));
                let mut sorted = b.indices().to_vec();
                sorted.sort();
                sorted.dedup();
                assert_eq!(sorted.len(), b.len());
            }
        }
    }

    #[test]
    fn enumeration_is_deterministic() {
        let a = enumerate_basis(3, 4).unwrap();
        let b = enumerate_basis(3, 4).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn eval_examples() {
        let b = enumerate_basis(1, 2).unwrap();
        assert_eq!(b.eval(&[2.0]).unwrap(), vec![1.0, 2.0, 4.0]);
        let b = enumerate_basis(2, 1).unwrap();
        assert_eq!(b.eval(&[3.0, 5.0]).unwrap(), vec![1.0, 3.0, 5.0]);
        let b = enumerate_basis(3, 3).unwrap();
        let v = b.eval(&[0.0, 0.0, 0.0]).unwrap();
        assert_eq!(v[0], 1.0);
        assert!(v[1..].iter().all(|&c| c == 0.0));
    }

    #[test]
    fn eval_rejects_wrong_length() {
        let b = enumerate_basis(2, 2).unwrap();
        assert_eq!(
            b.eval(&[1.0]).unwrap_err(),
            Error::DimensionMismatch {
                expected: 2,
                got: 1
            }
        );
    }

    #[test]
    fn outer_map_examples() {
        let map = enumerate_basis(1, 1).unwrap().outer_index_map();
        assert_eq!(map.get(0, 0), &idx(&[0]));
        assert_eq!(map.get(0, 1), &idx(&[1]));
        assert_eq!(map.get(1, 1), &idx(&[2]));

        let b = enumerate_basis(2, 1).unwrap();
        let map = b.outer_index_map();
        assert_eq!(map.get(1, 2), &idx(&[1, 1]));
        for k in 0..b.len() {
            let doubled = &b.indices()[k] + &b.indices()[k];
            assert_eq!(map.get(k, k), &doubled);
        }
    }

    #[test]
    fn outer_products_agree_with_monomials() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for (n, d) in [(1, 3), (2, 2), (3, 2), (2, 4)] {
            let b = enumerate_basis(n, d).unwrap();
            let map = b.outer_index_map();
            for _ in 0..20 {
                let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.5..1.5)).collect();
                let v = b.eval(&x).unwrap();
                for i in 0..b.len() {
                    for j in 0..b.len() {
                        let direct = map.get(i, j).monomial(&x);
                        let outer = v[i] * v[j];
                        assert!((direct - outer).abs() <= 1e-12 * direct.abs());
                    }
                }
            }
        }
    }
}
