//! Reference implementations used as test oracles. Nothing here calls into
//! the numerical code of `dopt_core`.

#![allow(dead_code)]

use num_rational::Ratio;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Exponent tuples with total degree `<= d`, by degree and then descending
/// lexicographic order, found by brute force over `[0, d]^n`.
pub fn exponents(n: usize, d: usize) -> Vec<Vec<u32>> {
    let mut all = Vec::new();
    let mut cur = vec![0u32; n];
    loop {
        if cur.iter().sum::<u32>() as usize <= d {
            all.push(cur.clone());
        }
        let mut k = 0;
        loop {
            if k == n {
                all.sort_by(|a, b| {
                    let (da, db) = (a.iter().sum::<u32>(), b.iter().sum::<u32>());
                    da.cmp(&db).then_with(|| b.cmp(a))
                });
                return all;
            }
            cur[k] += 1;
            if cur[k] as usize <= d {
                break;
            }
            cur[k] = 0;
            k += 1;
        }
    }
}

pub fn monomials(x: &[f64], exps: &[Vec<u32>]) -> Vec<f64> {
    exps.iter()
        .map(|e| x.iter().zip(e).map(|(xi, &k)| xi.powi(k as i32)).product())
        .collect()
}

pub fn info_matrix(points: &[Vec<f64>], weights: &[f64], d: usize) -> Vec<Vec<f64>> {
    let exps = exponents(points[0].len(), d);
    let m = exps.len();
    let mut a = vec![vec![0.0; m]; m];
    for (x, &w) in points.iter().zip(weights) {
        let v = monomials(x, &exps);
        for i in 0..m {
            for j in 0..m {
                a[i][j] += w * v[i] * v[j];
            }
        }
    }
    a
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn det(a: &[Vec<f64>]) -> f64 {
    let mut a = a.to_vec();
    let m = a.len();
    let mut det = 1.0;
    for c in 0..m {
        let p = (c..m)
            .max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))
            .unwrap();
        if a[p][c] == 0.0 {
            return 0.0;
        }
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det *= a[c][c];
        for r in c + 1..m {
            let f = a[r][c] / a[c][c];
            for k in c..m {
                a[r][k] -= f * a[c][k];
            }
        }
    }
    det
}

/// Gauss-Jordan inverse with partial pivoting.
pub fn inverse(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let m = a.len();
    let mut aug: Vec<Vec<f64>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..m).map(|j| if i == j { 1.0 } else { 0.0 }));
            r
        })
        .collect();
    for c in 0..m {
        let p = (c..m)
            .max_by(|&i, &j| aug[i][c].abs().total_cmp(&aug[j][c].abs()))
            .unwrap();
        aug.swap(p, c);
        let piv = aug[c][c];
        for v in aug[c].iter_mut() {
            *v /= piv;
        }
        for r in 0..m {
            if r != c {
                let f = aug[r][c];
                for k in 0..2 * m {
                    aug[r][k] -= f * aug[c][k];
                }
            }
        }
    }
    aug.into_iter().map(|r| r[m..].to_vec()).collect()
}

pub fn log_det(points: &[Vec<f64>], weights: &[f64], d: usize) -> f64 {
    det(&info_matrix(points, weights, d)).ln()
}

/// `v(x)ᵀ M(w)⁻¹ v(x)` through an explicit inverse.
pub fn cd_value(points: &[Vec<f64>], weights: &[f64], d: usize, x: &[f64]) -> f64 {
    let inv = inverse(&info_matrix(points, weights, d));
    let v = monomials(x, &exponents(x.len(), d));
    let mut s = 0.0;
    for i in 0..v.len() {
        for j in 0..v.len() {
            s += v[i] * inv[i][j] * v[j];
        }
    }
    s
}

/// Exhaustive maximizer of `log det M(w)` over weight vectors on the simplex
/// lattice with spacing `1/k`.
pub struct SimplexSearch {
    outers: Vec<Vec<f64>>,
    m: usize,
}

impl SimplexSearch {
    pub fn new(points: &[Vec<f64>], d: usize) -> Self {
        let exps = exponents(points[0].len(), d);
        let m = exps.len();
        let outers = points
            .iter()
            .map(|x| {
                let v = monomials(x, &exps);
                let mut o = Vec::with_capacity(m * m);
                for vi in &v {
                    for vj in &v {
                        o.push(vi * vj);
                    }
                }
                o
            })
            .collect();
        SimplexSearch { outers, m }
    }

    pub fn objective(&self, w: &[f64]) -> f64 {
        let m = self.m;
        let mut a = vec![0.0; m * m];
        for (o, &wi) in self.outers.iter().zip(w) {
            for (ak, ok) in a.iter_mut().zip(o) {
                *ak += wi * ok;
            }
        }
        let det = match m {
            1 => a[0],
            2 => a[0] * a[3] - a[1] * a[2],
            3 => {
                a[0] * (a[4] * a[8] - a[5] * a[7]) - a[1] * (a[3] * a[8] - a[5] * a[6])
                    + a[2] * (a[3] * a[7] - a[4] * a[6])
            }
            _ => det(&a.chunks(m).map(<[f64]>::to_vec).collect::<Vec<_>>()),
        };
        if det > 0.0 {
            det.ln()
        } else {
            f64::NEG_INFINITY
        }
    }

    /// Best `(objective, lattice counts)` over all count vectors summing to
    /// `k` with `|c_i - center_i| <= radius` for every coordinate.
    pub fn search(&self, k: i64, window: Option<(&[i64], i64)>) -> (f64, Vec<i64>) {
        let n = self.outers.len();
        let (lo, hi): (Vec<i64>, Vec<i64>) = match window {
            Some((c, r)) => (
                c.iter().map(|&ci| (ci - r).max(0)).collect(),
                c.iter().map(|&ci| (ci + r).min(k)).collect(),
            ),
            None => (vec![0; n], vec![k; n]),
        };
        let mut best = (f64::NEG_INFINITY, vec![0; n]);
        let mut counts = vec![0i64; n];
        self.recurse(0, k, &lo, &hi, &mut counts, k, &mut best);
        best
    }

    #[allow(clippy::too_many_arguments)]
    fn recurse(
        &self,
        i: usize,
        remaining: i64,
        lo: &[i64],
        hi: &[i64],
        counts: &mut Vec<i64>,
        k: i64,
        best: &mut (f64, Vec<i64>),
    ) {
        let n = counts.len();
        if i == n - 1 {
            if remaining < lo[i] || remaining > hi[i] {
                return;
            }
            counts[i] = remaining;
            let w: Vec<f64> = counts.iter().map(|&c| c as f64 / k as f64).collect();
            let f = self.objective(&w);
            if f > best.0 {
                *best = (f, counts.clone());
            }
            return;
        }
        let top = hi[i].min(remaining);
        let mut c = lo[i];
        while c <= top {
            counts[i] = c;
            self.recurse(i + 1, remaining - c, lo, hi, counts, k, best);
            c += 1;
        }
    }

    /// Exhaustive search at step `1/k_fine`; for four or more weights the
    /// search runs at step `1/k_coarse` first and is then exhausted at
    /// `1/k_fine` within `window` coarse steps of the coarse optimum.
    pub fn best(&self, k_fine: i64, k_coarse: i64, window: i64) -> f64 {
        if self.outers.len() <= 3 {
            return self.search(k_fine, None).0;
        }
        let (_, coarse) = self.search(k_coarse, None);
        let ratio = k_fine / k_coarse;
        let center: Vec<i64> = coarse.iter().map(|&c| c * ratio).collect();
        self.search(k_fine, Some((&center, window * ratio))).0
    }
}

/// Golden-section maximizer of a unimodal `f` on `[lo, hi]`.
pub fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - g * (hi - lo);
    let mut b = lo + g * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    while hi - lo > tol {
        if fa < fb {
            lo = a;
            a = b;
            fa = fb;
            b = lo + g * (hi - lo);
            fb = f(b);
        } else {
            hi = b;
            b = a;
            fb = fa;
            a = hi - g * (hi - lo);
            fa = f(a);
        }
    }
    0.5 * (lo + hi)
}

pub type Q = Ratio<i64>;

pub fn q(n: i64, d: i64) -> Q {
    Ratio::new(n, d)
}

pub fn det3(a: &[[Q; 3]; 3]) -> Q {
    a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
        - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
}

/// Exact inverse through the adjugate.
pub fn inverse3(a: &[[Q; 3]; 3]) -> [[Q; 3]; 3] {
    let det = det3(a);
    let mut inv = [[q(0, 1); 3]; 3];
    for (i, row) in inv.iter_mut().enumerate() {
        for (j, entry) in row.iter_mut().enumerate() {
            let (r0, r1) = ((j + 1) % 3, (j + 2) % 3);
            let (c0, c1) = ((i + 1) % 3, (i + 2) % 3);
            *entry = (a[r0][c0] * a[r1][c1] - a[r0][c1] * a[r1][c0]) / det;
        }
    }
    inv
}

pub fn to_f64(x: Q) -> f64 {
    *x.numer() as f64 / *x.denom() as f64
}

/// Weights drawn uniformly then normalized, with no zero entries.
pub fn random_weights(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
    let s: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / s).collect()
}

pub fn random_points(rng: &mut impl Rng, count: usize, n: usize) -> Vec<Vec<f64>> {
    (0..count)
        .map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect()
}

pub fn max_abs_diff(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    a.iter()
        .zip(b)
        .flat_map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| (x - y).abs()))
        .fold(0.0, f64::max)
}
