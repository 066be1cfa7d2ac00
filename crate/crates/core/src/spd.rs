//! Dense symmetric positive-definite kernel.
//!
//! [`SymMatrix`] stores one triangle; [`SpdFactor`] is its Cholesky factor
//! `A = L Lᵀ` and carries everything downstream code needs from `A`: the
//! log-determinant, solves, and the quadratic form `vᵀ A⁻¹ v`. A failed
//! factorization is reported, never patched with jitter.

use crate::error::{Error, Result};

#[inline]
fn tri(i: usize, j: usize) -> usize {
    debug_assert!(j <= i);
    i * (i + 1) / 2 + j
}

/// Symmetric matrix, lower triangle packed row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    m: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(m: usize) -> Self {
        SymMatrix {
            m,
            data: vec![0.0; m * (m + 1) / 2],
        }
    }

    pub fn identity(m: usize) -> Self {
        let mut a = Self::zeros(m);
        for k in 0..m {
            a.set(k, k, 1.0);
        }
        a
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        let mut a = Self::zeros(diag.len());
        for (k, &v) in diag.iter().enumerate() {
            a.set(k, k, v);
        }
        a
    }

    /// Builds from full rows. The input must be square and symmetric up to
    /// a relative `1e-12` mismatch; the lower triangle is kept.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let m = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != m) {
            return Err(Error::InvalidArgument(format!(
                "matrix is not square: {m} rows but a row of length {}",
                bad.len()
            )));
        }
        let mut a = Self::zeros(m);
        for i in 0..m {
            for j in 0..=i {
                let (lo, up) = (rows[i][j], rows[j][i]);
                let scale = lo.abs().max(up.abs()).max(1.0);
                if !((lo - up).abs() <= 1e-12 * scale) {
                    return Err(Error::InvalidArgument(format!(
                        "matrix is not symmetric at ({i}, {j}): {lo} vs {up}"
                    )));
                }
                a.set(i, j, lo);
            }
        }
        Ok(a)
    }

    pub fn size(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if j <= i {
            self.data[tri(i, j)]
        } else {
            self.data[tri(j, i)]
        }
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        if j <= i {
            self.data[tri(i, j)] = value;
        } else {
            self.data[tri(j, i)] = value;
        }
    }

    /// `self += weight · v vᵀ`.
    pub fn add_outer(&mut self, weight: f64, v: &[f64]) {
        debug_assert_eq!(v.len(), self.m);
        let mut k = 0;
        for i in 0..self.m {
            let wi = weight * v[i];
            for vj in &v[..=i] {
                self.data[k] += wi * vj;
                k += 1;
            }
        }
    }

    pub fn scaled(&self, factor: f64) -> SymMatrix {
        SymMatrix {
            m: self.m,
            data: self.data.iter().map(|v| v * factor).collect(),
        }
    }

    pub fn max_diagonal(&self) -> f64 {
        (0..self.m)
            .map(|k| self.get(k, k))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.m)
            .map(|i| (0..self.m).map(|j| self.get(i, j)).collect())
            .collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.m {
            for j in 0..self.m {
                acc += self.get(i, j).powi(2);
            }
        }
        acc.sqrt()
    }

    /// `trace(self · other)` for symmetric operands.
    pub fn trace_product(&self, other: &SymMatrix) -> f64 {
        debug_assert_eq!(self.m, other.m);
        let mut acc = 0.0;
        for i in 0..self.m {
            for j in 0..self.m {
                acc += self.get(i, j) * other.get(j, i);
            }
        }
        acc
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.m)
            .map(|i| (0..self.m).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    /// `vᵀ A v`.
    pub fn quad_form(&self, v: &[f64]) -> f64 {
        v.iter().zip(self.mul_vec(v)).map(|(a, b)| a * b).sum()
    }
}

/// Cholesky factor of a positive-definite [`SymMatrix`].
#[derive(Debug, Clone, PartialEq)]
pub struct SpdFactor {
    m: usize,
    l: Vec<f64>,
    log_det: f64,
}

/// Cholesky factorization. Fails with the 0-based pivot index when a pivot
/// drops to `m · ε · max_k A_kk` or below.
pub fn factorize(a: &SymMatrix) -> Result<SpdFactor> {
    let m = a.size();
    let max_diag = a.max_diagonal();
    if m > 0 && !(max_diag > 0.0 && max_diag.is_finite()) {
        return Err(Error::NotPositiveDefinite { pivot: 0 });
    }
    let threshold = m as f64 * f64::EPSILON * max_diag;
    let mut l = a.data.clone();
    let mut log_det = 0.0;
    for j in 0..m {
        let mut pivot = l[tri(j, j)];
        for k in 0..j {
            pivot -= l[tri(j, k)] * l[tri(j, k)];
        }
        if !(pivot > threshold) {
            return Err(Error::NotPositiveDefinite { pivot: j });
        }
        let ljj = pivot.sqrt();
        l[tri(j, j)] = ljj;
        log_det += ljj.ln();
        for i in j + 1..m {
            let mut s = l[tri(i, j)];
            for k in 0..j {
                s -= l[tri(i, k)] * l[tri(j, k)];
            }
            l[tri(i, j)] = s / ljj;
        }
    }
    Ok(SpdFactor {
        m,
        l,
        log_det: 2.0 * log_det,
    })
}

impl SpdFactor {
    pub fn size(&self) -> usize {
        self.m
    }

    /// Entry `(i, j)` of `L`, zero above the diagonal.
    pub fn lower(&self, i: usize, j: usize) -> f64 {
        if j <= i {
            self.l[tri(i, j)]
        } else {
            0.0
        }
    }

    pub fn log_det(&self) -> f64 {
        self.log_det
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.m {
            return Err(Error::DimensionMismatch {
                expected: self.m,
                got: len,
            });
        }
        Ok(())
    }

    /// `L⁻¹ b`.
    pub(crate) fn forward(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        for i in 0..self.m {
            let row = &self.l[tri(i, 0)..=tri(i, i)];
            let mut s = x[i];
            for k in 0..i {
                s -= row[k] * x[k];
            }
            x[i] = s / row[i];
        }
        x
    }

    /// `L⁻ᵀ b`.
    fn backward(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        for i in (0..self.m).rev() {
            let mut s = x[i];
            for k in i + 1..self.m {
                s -= self.l[tri(k, i)] * x[k];
            }
            x[i] = s / self.l[tri(i, i)];
        }
        x
    }

    /// `A⁻¹ b`.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        self.check_len(b.len())?;
        Ok(self.backward(&self.forward(b)))
    }

    /// `vᵀ A⁻¹ v` as `‖L⁻¹ v‖²`.
    pub fn quad_form_inv(&self, v: &[f64]) -> Result<f64> {
        self.check_len(v.len())?;
        Ok(self.quad_form_inv_unchecked(v))
    }

    pub(crate) fn quad_form_inv_unchecked(&self, v: &[f64]) -> f64 {
        // fused forward substitution and squared norm
        let mut z = Vec::with_capacity(self.m);
        let mut acc = 0.0;
        for i in 0..self.m {
            let row = &self.l[tri(i, 0)..=tri(i, i)];
            let mut s = v[i];
            for (lk, zk) in row[..i].iter().zip(&z) {
                s -= lk * zk;
            }
            let zi = s / row[i];
            acc += zi * zi;
            z.push(zi);
        }
        acc
    }

    /// Explicit `A⁻¹ = L⁻ᵀ L⁻¹`.
    pub fn inverse(&self) -> SymMatrix {
        let m = self.m;
        // columns of L⁻¹
        let mut linv = vec![0.0; m * m];
        for c in 0..m {
            let mut e = vec![0.0; m];
            e[c] = 1.0;
            let col = self.forward(&e);
            for r in 0..m {
                linv[r * m + c] = col[r];
            }
        }
        let mut out = SymMatrix::zeros(m);
        for i in 0..m {
            for j in 0..=i {
                let s: f64 = (i..m).map(|k| linv[k * m + i] * linv[k * m + j]).sum();
                out.set(i, j, s);
            }
        }
        out
    }

    /// `L Lᵀ`.
    pub fn reconstruct(&self) -> SymMatrix {
        let mut out = SymMatrix::zeros(self.m);
        for i in 0..self.m {
            for j in 0..=i {
                let s: f64 = (0..=j).map(|k| self.lower(i, k) * self.lower(j, k)).sum();
                out.set(i, j, s);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn sample() -> SymMatrix {
        SymMatrix::from_rows(&[vec![4.0, 2.0], vec![2.0, 3.0]]).unwrap()
    }

    #[test]
    fn identity_factor() {
        let f = factorize(&SymMatrix::identity(3)).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(f.lower(i, j), if i == j { 1.0 } else { 0.0 });
            }
        }
        assert_eq!(f.log_det(), 0.0);
    }

    #[test]
    fn two_by_two_factor() {
        let f = factorize(&sample()).unwrap();
        assert!(close(f.lower(0, 0), 2.0, 1e-15));
        assert!(close(f.lower(1, 0), 1.0, 1e-15));
        assert!(close(f.lower(1, 1), 2f64.sqrt(), 1e-15));
        assert!(close(f.log_det(), 8f64.ln(), 1e-14));
    }

    #[test]
    fn indefinite_fails_at_second_pivot() {
        let a = SymMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        assert_eq!(factorize(&a).unwrap_err(), Error::NotPositiveDefinite { pivot: 1 });
    }

    #[test]
    fn singular_rank_one_fails() {
        let mut a = SymMatrix::zeros(3);
        a.add_outer(1.0, &[1.0, 0.5, 0.25]);
        assert!(matches!(
            factorize(&a),
            Err(Error::NotPositiveDefinite { pivot: 1 })
        ));
        assert!(matches!(
            factorize(&SymMatrix::zeros(2)),
            Err(Error::NotPositiveDefinite { pivot: 0 })
        ));
    }

    #[test]
    fn asymmetric_rows_rejected() {
        assert!(SymMatrix::from_rows(&[vec![1.0, 2.0], vec![2.5, 1.0]]).is_err());
        assert!(SymMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0]]).is_err());
    }

    #[test]
    fn solve_examples() {
        let f = factorize(&SymMatrix::identity(3)).unwrap();
        assert_eq!(f.solve(&[1.0, 2.0, 3.0]).unwrap(), vec![1.0, 2.0, 3.0]);

        let f = factorize(&sample()).unwrap();
        let x = f.solve(&[8.0, 7.0]).unwrap();
        assert!(close(x[0], 1.25, 1e-14) && close(x[1], 1.5, 1e-14));

        let f = factorize(&SymMatrix::diagonal(&[2.0, 2.0])).unwrap();
        let x = f.solve(&[2.0, 4.0]).unwrap();
        assert!(close(x[0], 1.0, 1e-15) && close(x[1], 2.0, 1e-15));

        assert!(matches!(
            f.solve(&[1.0]),
            Err(Error::DimensionMismatch { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn quad_form_examples() {
        let f = factorize(&SymMatrix::identity(2)).unwrap();
        assert!(close(f.quad_form_inv(&[3.0, 4.0]).unwrap(), 25.0, 1e-13));

        let f = factorize(&SymMatrix::diagonal(&[4.0, 1.0])).unwrap();
        assert!(close(f.quad_form_inv(&[2.0, 0.0]).unwrap(), 1.0, 1e-15));

        // explicit inverse (1/8)[[3,-2],[-2,4]] gives (3 - 2 - 2 + 4)/8
        let inv = [[3.0 / 8.0, -2.0 / 8.0], [-2.0 / 8.0, 4.0 / 8.0]];
        let v = [1.0, 1.0];
        let oracle: f64 = (0..2)
            .map(|i| (0..2).map(|j| v[i] * inv[i][j] * v[j]).sum::<f64>())
            .sum();
        assert!(close(oracle, 0.375, 1e-15));
        let f = factorize(&sample()).unwrap();
        assert!(close(f.quad_form_inv(&v).unwrap(), 0.375, 1e-15));
        assert!(f.quad_form_inv(&[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn log_det_examples() {
        let e = std::f64::consts::E;
        let f = factorize(&SymMatrix::diagonal(&[e, e])).unwrap();
        assert!(close(f.log_det(), 2.0, 1e-15));
        assert_eq!(factorize(&SymMatrix::identity(5)).unwrap().log_det(), 0.0);

        // 3x3 closed form: det by cofactor expansion
        let rows = vec![
            vec![5.0, 1.0, 0.5],
            vec![1.0, 4.0, -1.0],
            vec![0.5, -1.0, 3.0],
        ];
        let det = rows[0][0] * (rows[1][1] * rows[2][2] - rows[1][2] * rows[2][1])
            - rows[0][1] * (rows[1][0] * rows[2][2] - rows[1][2] * rows[2][0])
            + rows[0][2] * (rows[1][0] * rows[2][1] - rows[1][1] * rows[2][0]);
        let f = factorize(&SymMatrix::from_rows(&rows).unwrap()).unwrap();
        assert!(close(f.log_det(), det.ln(), 1e-13));

        // 2x2: eigenvalues from the characteristic polynomial
        let (a, b, c) = (4.0, 2.0, 3.0);
        let tr: f64 = a + c;
        let disc = ((a - c) * (a - c) + 4.0 * b * b).sqrt();
        let (l1, l2) = ((tr + disc) / 2.0, (tr - disc) / 2.0);
        assert!(close(factorize(&sample()).unwrap().log_det(), l1.ln() + l2.ln(), 1e-13));
    }

    fn random_spd(rng: &mut impl Rng, m: usize) -> SymMatrix {
        let b: Vec<Vec<f64>> = (0..m)
            .map(|_| (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        let mut a = SymMatrix::identity(m);
        for row in &b {
            a.add_outer(1.0, row);
        }
        a
    }

    #[test]
    fn random_reconstruction_and_solves() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for trial in 0..100 {
            let m = 1 + trial % 50;
            let a = random_spd(&mut rng, m);
            let f = factorize(&a).unwrap();
            for k in 0..m {
                assert!(f.lower(k, k) > 0.0);
            }
            let r = f.reconstruct();
            let mut diff = SymMatrix::zeros(m);
            for i in 0..m {
                for j in 0..=i {
                    diff.set(i, j, r.get(i, j) - a.get(i, j));
                }
            }
            assert!(diff.frobenius_norm() <= 1e-10 * a.frobenius_norm());

            let b: Vec<f64> = (0..m).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let x = f.solve(&b).unwrap();
            let ax = a.mul_vec(&x);
            let err: f64 = ax.iter().zip(&b).map(|(u, v)| (u - v).powi(2)).sum::<f64>().sqrt();
            let norm: f64 = b.iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!(err <= 1e-9 * norm);

            let q = f.quad_form_inv(&b).unwrap();
            let via_solve: f64 = b.iter().zip(&x).map(|(u, v)| u * v).sum();
            assert!(q >= 0.0);
            assert!((q - via_solve).abs() <= 1e-12 * q.abs());
        }
    }

    #[test]
    fn inverse_matches_solves() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let a = random_spd(&mut rng, 6);
        let f = factorize(&a).unwrap();
        let inv = f.inverse();
        for c in 0..6 {
            let mut e = vec![0.0; 6];
            e[c] = 1.0;
            let col = f.solve(&e).unwrap();
            for r in 0..6 {
                assert!(close(inv.get(r, c), col[r], 1e-12));
            }
        }
    }
}
