//! Random-walk (MCMC) estimation of the stationary vector.
//!
//! Three estimators share one transition kernel ([`RowSampler`]):
//!
//! * **single**: one long walk; visits after the burn-in are counted and
//!   normalized.
//! * **parallel**: many independent short walks from uniform random starts;
//!   the estimate is the empirical law of their endpoints.
//! * **adaptive**: a single walk without burn-in that stops once the running
//!   estimate changes by less than a tolerance over a lag of `tau` steps, then
//!   discards roughly the first fifth of the counts.

use crate::error::{Error, Result};
use crate::graph::StochasticMatrix;
use crate::sampling::{RngStream, RowSampler};
use crate::vector::{robust_ceil, RankVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;
use std::time::{Duration, Instant};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum McmcMode {
    Single,
    Parallel,
    Adaptive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StartNode {
    /// Node index 0.
    First,
    UniformRandom,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McmcConfig {
    pub eps: f64,
    pub sigma: f64,
    /// Spectral gap of the chain; taken on trust.
    pub alpha: f64,
    pub mode: McmcMode,
    pub c_burn: f64,
    pub c_total: f64,
    pub start: StartNode,
    /// Lag between compared estimates in adaptive mode.
    pub tau: u64,
    pub tol_adapt: f64,
    /// Step cap for adaptive mode; defaults to ten times [`total_steps`].
    pub max_steps: Option<u64>,
    /// Overrides [`trajectory_count`] in parallel mode.
    pub trajectories: Option<u64>,
}

impl McmcConfig {
    pub fn new(eps: f64, sigma: f64, alpha: f64, mode: McmcMode) -> Self {
        Self {
            eps,
            sigma,
            alpha,
            mode,
            c_burn: 1.0,
            c_total: 1.0,
            start: match mode {
                McmcMode::Parallel => StartNode::UniformRandom,
                _ => StartNode::First,
            },
            tau: 100,
            tol_adapt: 0.01,
            max_steps: None,
            trajectories: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if !(self.eps > 0.0) || !self.eps.is_finite() {
            return bad(format!("eps must be positive, got {}", self.eps));
        }
        if !(self.sigma > 0.0 && self.sigma < 1.0) {
            return bad(format!("sigma must lie in (0, 1), got {}", self.sigma));
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return bad(format!("alpha must lie in (0, 1], got {}", self.alpha));
        }
        if !(self.c_burn >= 0.0) || !self.c_burn.is_finite() {
            return bad(format!("c_burn must be nonnegative, got {}", self.c_burn));
        }
        if !(self.c_total > 0.0) || !self.c_total.is_finite() {
            return bad(format!("c_total must be positive, got {}", self.c_total));
        }
        if self.mode == McmcMode::Adaptive {
            if self.tau == 0 {
                return bad("tau must be at least 1".into());
            }
            if !(self.tol_adapt > 0.0) {
                return bad(format!("tol_adapt must be positive, got {}", self.tol_adapt));
            }
        }
        if self.trajectories == Some(0) {
            return bad("trajectory count must be positive".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct McmcResult {
    pub estimate: RankVector,
    /// Walk length (single/adaptive) or total transitions over all walks (parallel).
    pub steps_total: u64,
    /// Discarded prefix; in parallel mode, the per-walk length.
    pub steps_burn: u64,
    pub trajectories: u64,
    pub elapsed: Duration,
    /// Counts normalized into `estimate` (visits, or endpoint hits in parallel mode).
    pub visits: Vec<u64>,
    /// False when adaptive mode hit its step cap before meeting the tolerance.
    pub converged: bool,
    /// Adaptive mode only: `(step, ‖p_t - p_{t-τ}‖₂)` at every check.
    pub lag_trace: Vec<(u64, f64)>,
}

/// `⌈c_burn · ln(n/ε) / α⌉`, clamped at zero when `ε ≥ n`.
pub fn burn_in_steps(cfg: &McmcConfig, n: usize) -> Result<u64> {
    cfg.validate()?;
    Ok(burn_in_raw(cfg.c_burn, cfg.alpha, cfg.eps, n))
}

fn burn_in_raw(c_burn: f64, alpha: f64, eps: f64, n: usize) -> u64 {
    let log = (n as f64 / eps).ln().max(0.0);
    robust_ceil(c_burn * log / alpha)
}

/// `⌈c_total · ln(n/σ) / (α ε²)⌉`.
pub fn total_steps(cfg: &McmcConfig, n: usize) -> Result<u64> {
    cfg.validate()?;
    Ok(total_raw(cfg.c_total, cfg.alpha, cfg.eps, cfg.sigma, n))
}

fn total_raw(c_total: f64, alpha: f64, eps: f64, sigma: f64, n: usize) -> u64 {
    let log = (n as f64 / sigma).ln().max(0.0);
    robust_ceil(c_total * log / (alpha * eps * eps))
}

/// `⌈(4 + 6 ln(1/σ)) / ε²⌉` independent walks for the parallel estimator.
///
/// `σ = 1` is accepted and gives `⌈4/ε²⌉`.
pub fn trajectory_count(eps: f64, sigma: f64) -> Result<u64> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::InvalidConfig(format!("eps must be positive, got {eps}")));
    }
    if !(sigma > 0.0 && sigma <= 1.0) {
        return Err(Error::InvalidConfig(format!("sigma must lie in (0, 1], got {sigma}")));
    }
    Ok(robust_ceil((4.0 + 6.0 * (1.0 / sigma).ln()) / (eps * eps)))
}

pub fn run(matrix: &StochasticMatrix, cfg: &McmcConfig, seed: u64) -> Result<McmcResult> {
    match cfg.mode {
        McmcMode::Single => run_single(matrix, cfg, seed),
        McmcMode::Parallel => run_parallel(matrix, cfg, seed),
        McmcMode::Adaptive => run_adaptive(matrix, cfg, seed),
    }
}

fn start_node(start: StartNode, n: usize, rng: &mut RngStream) -> usize {
    match start {
        StartNode::First => 0,
        StartNode::UniformRandom => rng.index(n),
    }
}

/// One walk of `T` steps; the visit at step `t` is counted when `t > T⁰`.
pub fn run_single(matrix: &StochasticMatrix, cfg: &McmcConfig, seed: u64) -> Result<McmcResult> {
    cfg.validate()?;
    let began = Instant::now();
    let n = matrix.n();
    let burn = burn_in_raw(cfg.c_burn, cfg.alpha, cfg.eps, n);
    let total = total_raw(cfg.c_total, cfg.alpha, cfg.eps, cfg.sigma, n);
    if total <= burn {
        return Err(Error::ZeroSteps { total, burn });
    }
    let sampler = RowSampler::new(matrix);
    let mut rng = RngStream::new(seed, 0);
    let mut node = start_node(cfg.start, n, &mut rng);
    let mut visits = vec![0u64; n];
    for t in 1..=total {
        if t > burn {
            visits[node] += 1;
        }
        if t < total {
            node = sampler.sample(node, &mut rng)?;
        }
    }
    let estimate = RankVector::from_counts(&visits, total - burn)?;
    Ok(McmcResult {
        estimate,
        steps_total: total,
        steps_burn: burn,
        trajectories: 1,
        elapsed: began.elapsed(),
        visits,
        converged: true,
        lag_trace: Vec::new(),
    })
}

/// `N` independent walks of `T⁰(ε/2)` steps each, started uniformly at random.
///
/// Walk `k` draws from stream `k` of `seed`, so the estimate is independent of
/// how rayon schedules the walks.
pub fn run_parallel(matrix: &StochasticMatrix, cfg: &McmcConfig, seed: u64) -> Result<McmcResult> {
    cfg.validate()?;
    let began = Instant::now();
    let n = matrix.n();
    let walks = match cfg.trajectories {
        Some(k) => k,
        None => trajectory_count(cfg.eps, cfg.sigma)?,
    };
    let length = burn_in_raw(cfg.c_burn, cfg.alpha, cfg.eps / 2.0, n);
    let sampler = RowSampler::new(matrix);
    let endpoints: Vec<usize> = (0..walks)
        .into_par_iter()
        .map(|k| {
            let mut rng = RngStream::new(seed, k);
            let mut node = rng.index(n);
            for _ in 0..length {
                node = sampler.sample(node, &mut rng)?;
            }
            Ok(node)
        })
        .collect::<Result<_>>()?;
    let mut visits = vec![0u64; n];
    for &e in &endpoints {
        visits[e] += 1;
    }
    let estimate = RankVector::from_counts(&visits, walks)?;
    Ok(McmcResult {
        estimate,
        steps_total: walks * length,
        steps_burn: length,
        trajectories: walks,
        elapsed: began.elapsed(),
        visits,
        converged: true,
        lag_trace: Vec::new(),
    })
}

/// Snapshots of the visit counts at `t = 5, 10, 20, 40, …`, keeping only those
/// that can still serve as the discarded prefix `≈ t/5`.
struct Checkpoints {
    next: u64,
    saved: VecDeque<(u64, Vec<u64>)>,
}

impl Checkpoints {
    fn new() -> Self {
        Self { next: 5, saved: VecDeque::new() }
    }

    fn observe(&mut self, t: u64, visits: &[u64]) {
        if t == self.next {
            self.saved.push_back((t, visits.to_vec()));
            self.next *= 2;
        }
        // the front stays the latest snapshot at or below t/5
        while self.saved.len() >= 2 && self.saved[1].0 * 5 <= t {
            self.saved.pop_front();
        }
    }

    fn prefix(&self, t: u64) -> Option<&(u64, Vec<u64>)> {
        self.saved.front().filter(|(c, _)| c * 5 <= t)
    }
}

pub fn run_adaptive(matrix: &StochasticMatrix, cfg: &McmcConfig, seed: u64) -> Result<McmcResult> {
    cfg.validate()?;
    let began = Instant::now();
    let n = matrix.n();
    let cap = match cfg.max_steps {
        Some(m) => m,
        None => 10 * total_raw(cfg.c_total, cfg.alpha, cfg.eps, cfg.sigma, n).max(1),
    }
    .max(1);
    let sampler = RowSampler::new(matrix);
    let mut rng = RngStream::new(seed, 0);
    let mut node = start_node(cfg.start, n, &mut rng);
    let mut visits = vec![0u64; n];
    let mut lagged: Option<Vec<f64>> = None;
    let mut checkpoints = Checkpoints::new();
    let mut lag_trace = Vec::new();
    let mut converged = false;
    let mut t = 0u64;
    while t < cap {
        t += 1;
        visits[node] += 1;
        checkpoints.observe(t, &visits);
        if t.is_multiple_of(cfg.tau) {
            let current: Vec<f64> = visits.iter().map(|&c| c as f64 / t as f64).collect();
            let diff = match &lagged {
                Some(prev) => current.iter().zip(prev).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt(),
                // the zero vector stands in before the first lag exists
                None => current.iter().map(|a| a * a).sum::<f64>().sqrt(),
            };
            lag_trace.push((t, diff));
            lagged = Some(current);
            if diff <= cfg.tol_adapt {
                converged = true;
                break;
            }
        }
        node = sampler.sample(node, &mut rng)?;
    }
    let (burn, kept) = match checkpoints.prefix(t) {
        Some((c, snapshot)) => (*c, visits.iter().zip(snapshot).map(|(a, b)| a - b).collect()),
        None => (0, visits),
    };
    let estimate = RankVector::from_counts(&kept, t - burn)?;
    Ok(McmcResult {
        estimate,
        steps_total: t,
        steps_burn: burn,
        trajectories: 1,
        elapsed: began.elapsed(),
        visits: kept,
        converged,
        lag_trace,
    })
}
