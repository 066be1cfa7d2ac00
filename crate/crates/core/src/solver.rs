//! Maximization of `log det M_d(w)` over the weight simplex.
//!
//! Two first-order schemes are provided, plus a hybrid:
//!
//! * the multiplicative update `w_i ← w_i p(x_i) / n_d`, which never
//!   decreases the objective and whose fixed points satisfy complementarity;
//! * the vertex-direction (Fedorov-Wynn) step, which moves mass toward the
//!   candidate maximizing `p` with the exact line-search step.
//!
//! Inside [`solve`], each vertex-direction iteration is followed by a
//! vertex-exchange step that shifts mass from the support atom with the
//! smallest `p` to the maximizer, with the optimal step along that direction.
//! The hybrid runs multiplicative updates until `p_max <= n_d (1 + 100 ε)`
//! and vertex-direction iterations afterwards.
//!
//! Both stop on the scaled dual-feasibility test `max_i p(x_i) <= n_d (1 + ε)`.

use serde::{Deserialize, Serialize};

use crate::basis::enumerate_basis;
use crate::design::{normalized, DesignMeasure};
use crate::error::{Error, Result};
use crate::semialg::CandidateSet;
use crate::spd::{factorize, SpdFactor, SymMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Multiplicative,
    FedorovWynn,
    #[default]
    Hybrid,
}

/// Ratio between the hybrid switch-over tolerance and the final tolerance.
pub const HYBRID_SWITCH_FACTOR: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    pub algorithm: Algorithm,
    /// Relative tolerance on `p_max / n_d - 1`.
    pub epsilon: f64,
    pub max_iters: usize,
    pub prune_threshold: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            algorithm: Algorithm::Hybrid,
            epsilon: 1e-6,
            max_iters: 100_000,
            prune_threshold: 1e-7,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self, n_d: usize) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if self.max_iters < 1 {
            return Err(Error::InvalidArgument("max_iters must be at least 1".into()));
        }
        let limit = 1.0 / n_d as f64;
        if !(self.prune_threshold >= 0.0 && self.prune_threshold < limit) {
            return Err(Error::InvalidArgument(format!(
                "prune_threshold must lie in [0, 1/n_d) = [0, {limit}), got {}",
                self.prune_threshold
            )));
        }
        Ok(())
    }

    /// `n_d (1 + ε)`.
    pub fn stopping_level(&self, n_d: usize) -> f64 {
        n_d as f64 * (1.0 + self.epsilon)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub objective: f64,
    pub p_max: f64,
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    /// Every candidate the solver started from.
    pub candidates: CandidateSet,
    /// Final design after pruning.
    pub design: DesignMeasure,
    pub degree: usize,
    pub n_d: usize,
    /// `log det M_d(ŵ)` of the final design.
    pub objective: f64,
    /// `p(x)` of the final design at every entry of `candidates`.
    pub p_values: Vec<f64>,
    pub p_max: f64,
    pub iterations: usize,
    pub converged: bool,
    pub prune_rolled_back: bool,
    pub config: SolverConfig,
    /// `(objective, p_max)` before each step and at termination (pre-pruning).
    pub trace: Vec<TraceEntry>,
}

/// Per-candidate basis vectors, assembled once per solve.
struct Engine {
    n_d: usize,
    vectors: Vec<Vec<f64>>,
}

struct Evaluation {
    factor: SpdFactor,
    p: Vec<f64>,
    p_max: f64,
    argmax: usize,
}

impl Engine {
    fn new(candidates: &CandidateSet, d: usize) -> Result<Self> {
        let basis = enumerate_basis(candidates.dimension(), d)?;
        let vectors = candidates
            .points()
            .iter()
            .map(|x| basis.eval_unchecked(x))
            .collect();
        Ok(Engine {
            n_d: basis.len(),
            vectors,
        })
    }

    fn factor(&self, w: &[f64]) -> Result<SpdFactor> {
        let mut m = SymMatrix::zeros(self.n_d);
        for (v, &wi) in self.vectors.iter().zip(w) {
            if wi > 0.0 {
                m.add_outer(wi, v);
            }
        }
        factorize(&m).map_err(Error::into_degenerate)
    }

    fn evaluate(&self, w: &[f64]) -> Result<Evaluation> {
        let factor = self.factor(w)?;
        let p: Vec<f64> = self
            .vectors
            .iter()
            .map(|v| factor.quad_form_inv_unchecked(v))
            .collect();
        let (argmax, p_max) = argmax_lowest(&p);
        Ok(Evaluation {
            factor,
            p,
            p_max,
            argmax,
        })
    }

    fn multiplicative(&self, w: &[f64], eval: &Evaluation) -> Vec<f64> {
        let n_d = self.n_d as f64;
        normalized(w.iter().zip(&eval.p).map(|(wi, pi)| wi * pi / n_d).collect())
    }

    fn vertex_direction(&self, w: &[f64], eval: &Evaluation) -> Vec<f64> {
        let alpha = vertex_step_length(eval.p_max, self.n_d);
        if alpha <= 0.0 {
            return w.to_vec();
        }
        let mut next: Vec<f64> = w.iter().map(|wi| (1.0 - alpha) * wi).collect();
        next[eval.argmax] += alpha;
        normalized(next)
    }

    /// Moves mass from the support atom with the smallest `p` to the argmax,
    /// with the step maximizing `log det` along that exchange direction.
    fn exchange(&self, w: &[f64], eval: &Evaluation) -> Vec<f64> {
        let k = eval.argmax;
        let mut j = None;
        for (i, (&wi, &pi)) in w.iter().zip(&eval.p).enumerate() {
            if wi > 0.0 && j.is_none_or(|jj: usize| pi < eval.p[jj]) {
                j = Some(i);
            }
        }
        let Some(j) = j else {
            return w.to_vec();
        };
        let (pj, pk) = (eval.p[j], eval.p[k]);
        if j == k || pk <= pj {
            return w.to_vec();
        }
        let uj = eval.factor.forward(&self.vectors[j]);
        let uk = eval.factor.forward(&self.vectors[k]);
        let pjk: f64 = uj.iter().zip(&uk).map(|(a, b)| a * b).sum();
        let curvature = pj * pk - pjk * pjk;
        let delta = if curvature > 0.0 {
            ((pk - pj) / (2.0 * curvature)).min(w[j])
        } else {
            w[j]
        };
        let mut next = w.to_vec();
        next[j] -= delta;
        next[k] += delta;
        if next[j] < 0.0 {
            next[j] = 0.0;
        }
        normalized(next)
    }
}

/// Largest entry, ties resolved toward the lowest index.
fn argmax_lowest(values: &[f64]) -> (usize, f64) {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, &v) in values.iter().enumerate() {
        if v > best.1 {
            best = (i, v);
        }
    }
    best
}

/// Exact line-search step toward the vertex with CD value `p_star`:
/// `(p* - n_d) / (n_d (p* - 1))`, zero when `p* <= n_d`.
pub fn vertex_step_length(p_star: f64, n_d: usize) -> f64 {
    let m = n_d as f64;
    if p_star <= m {
        0.0
    } else {
        (p_star - m) / (m * (p_star - 1.0))
    }
}

/// Uniform weights on all candidates; the starting point of every solve.
pub fn init_uniform(candidates: &CandidateSet, d: usize) -> Result<DesignMeasure> {
    let n_d = enumerate_basis(candidates.dimension(), d)?.len();
    if candidates.len() < n_d {
        return Err(Error::TooFewCandidates {
            got: candidates.len(),
            needed: n_d,
        });
    }
    let mu = DesignMeasure::uniform(candidates.clone());
    Engine::new(candidates, d)?.factor(mu.weights())?;
    Ok(mu)
}

/// One multiplicative update `w_i ← w_i p(x_i) / n_d`.
pub fn mult_step(mu: &DesignMeasure, d: usize) -> Result<DesignMeasure> {
    let engine = Engine::new(mu.candidates(), d)?;
    let eval = engine.evaluate(mu.weights())?;
    let w = engine.multiplicative(mu.weights(), &eval);
    Ok(DesignMeasure::from_simplex(mu.candidates().clone(), w))
}

/// One vertex-direction step toward `argmax_i p(x_i)`.
pub fn fw_step(mu: &DesignMeasure, d: usize) -> Result<DesignMeasure> {
    let engine = Engine::new(mu.candidates(), d)?;
    let eval = engine.evaluate(mu.weights())?;
    let w = engine.vertex_direction(mu.weights(), &eval);
    Ok(DesignMeasure::from_simplex(mu.candidates().clone(), w))
}

#[derive(Debug, Clone)]
pub struct PruneOutcome {
    pub design: DesignMeasure,
    /// Set when dropping small weights would have made the design degenerate.
    pub rolled_back: bool,
}

/// Drops atoms with weight below `threshold` and renormalizes. If the
/// survivors no longer determine the degree-`d` model, the input is returned
/// unchanged with `rolled_back` set.
pub fn prune(mu: &DesignMeasure, d: usize, threshold: f64) -> PruneOutcome {
    let keep: Vec<bool> = mu.weights().iter().map(|&w| w >= threshold).collect();
    if keep.iter().all(|&k| k) {
        return PruneOutcome {
            design: mu.clone(),
            rolled_back: false,
        };
    }
    let rollback = PruneOutcome {
        design: mu.clone(),
        rolled_back: true,
    };
    if !keep.iter().any(|&k| k) {
        return rollback;
    }
    let weights: Vec<f64> = mu
        .weights()
        .iter()
        .zip(&keep)
        .filter(|(_, &k)| k)
        .map(|(&w, _)| w)
        .collect();
    let pruned = DesignMeasure::from_simplex(mu.candidates().subset(&keep), weights);
    match crate::design::assemble_information(&pruned, d) {
        Ok(_) => PruneOutcome {
            design: pruned,
            rolled_back: false,
        },
        Err(_) => rollback,
    }
}

/// Runs the configured algorithm from the uniform design until
/// `p_max <= n_d (1 + ε)` or `max_iters` steps, then prunes.
pub fn solve(candidates: &CandidateSet, d: usize, cfg: &SolverConfig) -> Result<SolveResult> {
    let engine = Engine::new(candidates, d)?;
    let n_d = engine.n_d;
    cfg.validate(n_d)?;
    let start = init_uniform(candidates, d)?;

    let stop = cfg.stopping_level(n_d);
    let switch = n_d as f64 * (1.0 + HYBRID_SWITCH_FACTOR * cfg.epsilon);
    let mut vertex_phase = cfg.algorithm == Algorithm::FedorovWynn;
    let mut w = start.weights().to_vec();
    let mut trace = Vec::new();
    let mut iterations = 0;
    loop {
        let eval = engine.evaluate(&w)?;
        trace.push(TraceEntry {
            objective: eval.factor.log_det(),
            p_max: eval.p_max,
        });
        if eval.p_max <= stop || iterations >= cfg.max_iters {
            break;
        }
        if cfg.algorithm == Algorithm::Hybrid && eval.p_max <= switch {
            vertex_phase = true;
        }
        w = if vertex_phase {
            let toward = engine.vertex_direction(&w, &eval);
            let eval = engine.evaluate(&toward)?;
            if eval.p_max <= stop {
                toward
            } else {
                engine.exchange(&toward, &eval)
            }
        } else {
            engine.multiplicative(&w, &eval)
        };
        iterations += 1;
    }

    let unpruned = DesignMeasure::from_simplex(candidates.clone(), w);
    let PruneOutcome {
        design,
        rolled_back,
    } = prune(&unpruned, d, cfg.prune_threshold);

    let factor = crate::design::assemble_information(&design, d)?;
    let p_values: Vec<f64> = engine
        .vectors
        .iter()
        .map(|v| factor.quad_form_inv_unchecked(v))
        .collect();
    let (_, p_max) = argmax_lowest(&p_values);
    Ok(SolveResult {
        candidates: candidates.clone(),
        design,
        degree: d,
        n_d,
        objective: factor.log_det(),
        p_values,
        p_max,
        iterations,
        converged: p_max <= stop,
        prune_rolled_back: rolled_back,
        config: *cfg,
        trace,
    })
}

/// Group of support atoms lying within a merge radius of each other.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportCluster {
    /// Weighted mean of the member atoms.
    pub center: Vec<f64>,
    pub weight: f64,
    /// Positions of the member atoms in the design.
    pub members: Vec<usize>,
}

/// Single-linkage clustering of the atoms of `mu` (Euclidean distance
/// `<= radius`). Clusters are ordered by their lowest member index.
pub fn cluster_support(mu: &DesignMeasure, radius: f64) -> Vec<SupportCluster> {
    let atoms: Vec<usize> = (0..mu.len()).filter(|&i| mu.weights()[i] > 0.0).collect();
    let mut parent: Vec<usize> = (0..atoms.len()).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    let pts = mu.points();
    for a in 0..atoms.len() {
        for b in a + 1..atoms.len() {
            let dist2: f64 = pts[atoms[a]]
                .iter()
                .zip(&pts[atoms[b]])
                .map(|(u, v)| (u - v).powi(2))
                .sum();
            if dist2.sqrt() <= radius {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                if ra != rb {
                    parent[ra.max(rb)] = ra.min(rb);
                }
            }
        }
    }
    let mut clusters: Vec<(usize, SupportCluster)> = Vec::new();
    for a in 0..atoms.len() {
        let root = find(&mut parent, a);
        let idx = atoms[a];
        let w = mu.weights()[idx];
        match clusters.iter_mut().find(|(r, _)| *r == root) {
            Some((_, c)) => {
                for (ck, xk) in c.center.iter_mut().zip(&pts[idx]) {
                    *ck += w * xk;
                }
                c.weight += w;
                c.members.push(idx);
            }
            None => clusters.push((
                root,
                SupportCluster {
                    center: pts[idx].iter().map(|xk| w * xk).collect(),
                    weight: w,
                    members: vec![idx],
                },
            )),
        }
    }
    clusters
        .into_iter()
        .map(|(_, mut c)| {
            for ck in &mut c.center {
                *ck /= c.weight;
            }
            c
        })
        .collect()
}
