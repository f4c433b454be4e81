//! Grigoriadis–Khachiyan randomized mirror descent for the PageRank game.
//!
//! The matrix game `min_p max_u ⟨u, (Pᵀ - I)p⟩` over two simplices is embedded
//! into the skew-symmetric `(2n+1) × (2n+1)` game
//!
//! ```text
//!       ⎡  0    A   -e ⎤
//!   𝒜 = ⎢ -Aᵀ   0    e ⎥,   A = Pᵀ - I,
//!       ⎣  eᵀ  -eᵀ   0 ⎦
//! ```
//!
//! whose solutions `x = (y, p', u)` yield the PageRank vector as `p'/eᵀp'`.
//! The solver keeps unnormalized weights `exp(ε U_i / 2)`, `U = 𝒜X`, in a
//! [`WeightTree`]. Each iteration samples a coordinate `k` from the tree,
//! increments its count, and rescales only the leaves in the support of
//! column `k`, so a sparse `P` costs `O(s log n)` per step.

use crate::error::{Error, Result};
use crate::graph::StochasticMatrix;
use crate::metrics::game_objective;
use crate::sampling::{RngStream, WeightTree};
use crate::vector::{robust_ceil, RankVector};
use serde::{Deserialize, Serialize};
use std::time::{Duration, Instant};

/// Largest base dimension accepted by the dense diagnostics.
pub const DENSE_DIAGNOSTIC_LIMIT: usize = 200;
/// The tree is rebuilt around a new shift once its total leaves this range.
const RESCALE_HIGH: f64 = 1e250;
const RESCALE_LOW: f64 = 1e-250;

/// Implicit Dantzig symmetrization of `A = Pᵀ - I`.
#[derive(Debug, Clone, Copy)]
pub struct GameOperator<'a> {
    matrix: &'a StochasticMatrix,
}

pub fn symmetrize(matrix: &StochasticMatrix) -> GameOperator<'_> {
    GameOperator { matrix }
}

impl<'a> GameOperator<'a> {
    pub fn n(&self) -> usize {
        self.matrix.n()
    }

    pub fn dim(&self) -> usize {
        2 * self.matrix.n() + 1
    }

    pub fn matrix(&self) -> &'a StochasticMatrix {
        self.matrix
    }

    /// Nonzero entries `(row, 𝒜[row][k])` of column `k`, rows ascending.
    pub fn column(&self, k: usize) -> Result<Vec<(usize, f64)>> {
        let mut out = Vec::new();
        self.column_into(k, &mut out)?;
        Ok(out)
    }

    /// [`column`](Self::column) into a reusable buffer (cleared first).
    pub fn column_into(&self, k: usize, out: &mut Vec<(usize, f64)>) -> Result<()> {
        let n = self.n();
        if k >= self.dim() {
            return Err(Error::IndexOutOfRange { index: k, len: self.dim() });
        }
        out.clear();
        if k < n {
            // rows n..2n hold -A[k][i] = -(P[i][k] - [i = k]): column k of P
            let (rows, vals) = self.matrix.col(k);
            self.push_shifted_line(k, rows, vals, n, -1.0, out);
            out.push((2 * n, 1.0));
        } else if k < 2 * n {
            // rows 0..n hold A[i][j] = P[j][i] - [i = j]: row j of P
            let j = k - n;
            let (cols, vals) = self.matrix.row(j);
            self.push_shifted_line(j, cols, vals, 0, 1.0, out);
            out.push((2 * n, -1.0));
        } else {
            out.extend((0..n).map(|i| (i, -1.0)));
            out.extend((0..n).map(|i| (n + i, 1.0)));
        }
        Ok(())
    }

    /// Emits `(offset + i, sign · (P_line[i] - [i = diag]))` for the nonzero
    /// values of one line of `P`, including the implicit uniform share.
    fn push_shifted_line(
        &self,
        diag: usize,
        idx: &[usize],
        vals: &[f64],
        offset: usize,
        sign: f64,
        out: &mut Vec<(usize, f64)>,
    ) {
        let share = self.matrix.uniform_share();
        let mut emit = |i: usize, stored: f64| {
            let value = self.a_value(stored, share, i == diag);
            if value != 0.0 {
                out.push((offset + i, sign * value));
            }
        };
        if share > 0.0 {
            let mut k = 0;
            for i in 0..self.n() {
                let stored = if k < idx.len() && idx[k] == i {
                    k += 1;
                    vals[k - 1]
                } else {
                    0.0
                };
                emit(i, stored);
            }
        } else {
            let mut diag_seen = false;
            for (&i, &v) in idx.iter().zip(vals) {
                if !diag_seen && i > diag {
                    emit(diag, 0.0);
                    diag_seen = true;
                }
                if i == diag {
                    diag_seen = true;
                }
                emit(i, v);
            }
            if !diag_seen {
                emit(diag, 0.0);
            }
        }
    }

    /// `P_ij - [i = j]`, evaluated identically wherever the entry appears so
    /// that mirrored entries of 𝒜 negate exactly.
    #[inline]
    fn a_value(&self, stored: f64, share: f64, on_diagonal: bool) -> f64 {
        let p = stored + share;
        if on_diagonal {
            p - 1.0
        } else {
            p
        }
    }

    /// Dense 𝒜 assembled column by column (for `n ≤ 100`-ish diagnostics).
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let d = self.dim();
        let mut m = vec![vec![0.0; d]; d];
        let mut buf = Vec::new();
        for k in 0..d {
            self.column_into(k, &mut buf).expect("column index in range");
            for &(i, v) in &buf {
                m[i][k] = v;
            }
        }
        m
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IterationRule {
    /// `⌈12 (ln(2n+1) + ln σ⁻¹) / ε²⌉`, targeting `f(p̂) ≤ ε`.
    Theorem,
    /// `⌈3 (ln(2n+1) + ln σ⁻¹) / ε²⌉`, targeting `𝒜x̄ ≤ εe` only.
    Potential,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GkConfig {
    /// Target accuracy, also the step scale of the multiplicative update.
    pub eps: f64,
    pub sigma: f64,
    /// Runs exactly this many iterations instead of the rule's count.
    pub max_iter: Option<u64>,
    /// Emit a trace row every this many iterations.
    pub trace_every: Option<u64>,
    pub rule: IterationRule,
}

impl GkConfig {
    pub fn new(eps: f64, sigma: f64) -> Self {
        Self { eps, sigma, max_iter: None, trace_every: None, rule: IterationRule::Theorem }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps <= 1.0) {
            return Err(Error::InvalidConfig(format!("eps must lie in (0, 1], got {}", self.eps)));
        }
        if !(self.sigma > 0.0 && self.sigma < 1.0) {
            return Err(Error::InvalidConfig(format!("sigma must lie in (0, 1), got {}", self.sigma)));
        }
        if self.trace_every == Some(0) {
            return Err(Error::InvalidConfig("trace period must be positive".into()));
        }
        Ok(())
    }

    pub fn iterations(&self, n: usize) -> Result<u64> {
        if let Some(m) = self.max_iter {
            return Ok(m);
        }
        match self.rule {
            IterationRule::Theorem => iteration_count(n, self.eps, self.sigma),
            IterationRule::Potential => potential_iteration_count(n, self.eps, self.sigma),
        }
    }
}

fn check_count_args(n: usize, eps: f64, sigma: f64) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidConfig("n must be positive".into()));
    }
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::InvalidConfig(format!("eps must be positive, got {eps}")));
    }
    if !(sigma > 0.0 && sigma <= 1.0) {
        return Err(Error::InvalidConfig(format!("sigma must lie in (0, 1], got {sigma}")));
    }
    Ok(())
}

/// `⌈12 (ln(2n+1) + ln σ⁻¹) / ε²⌉`; `σ = 1` is accepted.
pub fn iteration_count(n: usize, eps: f64, sigma: f64) -> Result<u64> {
    check_count_args(n, eps, sigma)?;
    let logs = ((2 * n + 1) as f64).ln() + (1.0 / sigma).ln();
    Ok(robust_ceil(12.0 * logs / (eps * eps)))
}

/// `⌈3 (ln(2n+1) + ln σ⁻¹) / ε²⌉`, the count after which `𝒜x̄ ≤ εe` w.p. `1 - σ`.
pub fn potential_iteration_count(n: usize, eps: f64, sigma: f64) -> Result<u64> {
    check_count_args(n, eps, sigma)?;
    let logs = ((2 * n + 1) as f64).ln() + (1.0 / sigma).ln();
    Ok(robust_ceil(3.0 * logs / (eps * eps)))
}

/// Tree-node write statistics, split by whether the dense border column was drawn.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct WorkCounters {
    pub sparse_iterations: u64,
    pub sparse_writes: u64,
    pub sparse_max_writes: u64,
    pub border_iterations: u64,
    pub border_writes: u64,
    pub border_max_writes: u64,
    pub rescales: u64,
}

impl WorkCounters {
    pub fn mean_sparse_writes(&self) -> f64 {
        if self.sparse_iterations == 0 {
            0.0
        } else {
            self.sparse_writes as f64 / self.sparse_iterations as f64
        }
    }

    fn record(&mut self, border: bool, writes: u64) {
        if border {
            self.border_iterations += 1;
            self.border_writes += writes;
            self.border_max_writes = self.border_max_writes.max(writes);
        } else {
            self.sparse_iterations += 1;
            self.sparse_writes += writes;
            self.sparse_max_writes = self.sparse_max_writes.max(writes);
        }
    }
}

/// Solver state after `t` iterations.
#[derive(Debug, Clone)]
pub struct GkState {
    eps: f64,
    /// `X̄`: how often each coordinate was drawn.
    counts: Vec<u64>,
    /// `U = 𝒜X̄`.
    payoff: Vec<f64>,
    /// Leaf `i` holds `exp(ε U_i / 2 - shift)`.
    tree: WeightTree,
    shift: f64,
    t: u64,
    counters: WorkCounters,
}

impl GkState {
    fn new(dim: usize, eps: f64) -> Result<Self> {
        Ok(Self {
            eps,
            counts: vec![0; dim],
            payoff: vec![0.0; dim],
            tree: WeightTree::new(&vec![1.0; dim])?,
            shift: 0.0,
            t: 0,
            counters: WorkCounters::default(),
        })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn iteration(&self) -> u64 {
        self.t
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn payoff(&self) -> &[f64] {
        &self.payoff
    }

    pub fn tree(&self) -> &WeightTree {
        &self.tree
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    pub fn counters(&self) -> &WorkCounters {
        &self.counters
    }

    /// Sampling distribution `p_i(t) = P_i(t) / Φ(t)`.
    pub fn distribution(&self) -> Vec<f64> {
        let total = self.tree.total();
        self.tree.leaves().iter().map(|w| w / total).collect()
    }

    /// `x̄ = X̄ / t`.
    pub fn average(&self) -> Result<RankVector> {
        RankVector::from_counts(&self.counts, self.t)
    }

    fn exponent(&self, i: usize) -> f64 {
        0.5 * self.eps * self.payoff[i]
    }

    fn rescale(&mut self) -> Result<()> {
        let shift = (0..self.payoff.len()).map(|i| self.exponent(i)).fold(f64::NEG_INFINITY, f64::max);
        self.shift = shift;
        let weights: Vec<f64> = (0..self.payoff.len()).map(|i| (self.exponent(i) - shift).exp()).collect();
        self.tree.rebuild(weights)?;
        self.counters.rescales += 1;
        Ok(())
    }
}

/// `ln Φ(t)`, where `Φ(t) = Σ exp(ε U_i(t) / 2)`.
pub fn potential(state: &GkState) -> f64 {
    state.tree.total().ln() + state.shift
}

/// `Σ_k p_k Σ_i p_i exp(ε 𝒜_ik / 2)`, the exact ratio `E[Φ(t+1) | state] / Φ(t)`.
pub fn conditional_growth_check(op: &GameOperator, state: &GkState) -> Result<f64> {
    if op.n() > DENSE_DIAGNOSTIC_LIMIT {
        return Err(Error::DimensionTooLarge { n: op.n(), limit: DENSE_DIAGNOSTIC_LIMIT });
    }
    if state.counts.len() != op.dim() {
        return Err(Error::DimensionMismatch { expected: op.dim(), got: state.counts.len() });
    }
    let p = state.distribution();
    let half = 0.5 * state.eps;
    let mut buf = Vec::new();
    let mut ratio = 0.0;
    for (k, &pk) in p.iter().enumerate() {
        if pk == 0.0 {
            continue;
        }
        op.column_into(k, &mut buf)?;
        // entries absent from the column contribute exp(0) = 1
        let mut inner: f64 = 1.0;
        for &(i, a) in &buf {
            inner += p[i] * ((half * a).exp() - 1.0);
        }
        ratio += pk * inner;
    }
    Ok(ratio)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub iter: u64,
    pub ln_phi: f64,
    /// `f(p̂)` at this iteration; absent while the middle block has no mass.
    pub f_checkpoint: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct GkResult {
    /// `x̄ = X̄ / t` on the `(2n+1)`-simplex.
    pub average: RankVector,
    /// Recovered PageRank estimate `p̂ = p'/eᵀp'`.
    pub rank: RankVector,
    /// `eᵀp'`.
    pub mass: f64,
    pub iterations: u64,
    pub objective: f64,
    pub ln_potential: f64,
    pub counters: WorkCounters,
    pub trace: Vec<TraceRow>,
    pub elapsed: Duration,
}

/// Splits `x̄ = (y, p', u)` and returns `(p'/eᵀp', eᵀp')`.
pub fn recover_rank(average: &[f64]) -> Result<(RankVector, f64)> {
    let dim = average.len();
    if dim < 3 || dim.is_multiple_of(2) {
        return Err(Error::InvalidConfig(format!("expected a vector of length 2n+1, got {dim}")));
    }
    let n = (dim - 1) / 2;
    let middle = &average[n..2 * n];
    let mass: f64 = middle.iter().sum();
    if !(mass > 0.0) {
        return Err(Error::ZeroMass);
    }
    let rank = RankVector::normalized(middle.to_vec())?;
    Ok((rank, mass))
}

/// Step-by-step driver; [`gk_run`] wraps it for the common case.
pub struct GkSolver<'a> {
    op: GameOperator<'a>,
    state: GkState,
    rng: RngStream,
    column: Vec<(usize, f64)>,
}

impl<'a> GkSolver<'a> {
    pub fn new(matrix: &'a StochasticMatrix, eps: f64, seed: u64, stream: u64) -> Result<Self> {
        if !(eps > 0.0 && eps <= 1.0) {
            return Err(Error::InvalidConfig(format!("eps must lie in (0, 1], got {eps}")));
        }
        let op = symmetrize(matrix);
        Ok(Self { state: GkState::new(op.dim(), eps)?, op, rng: RngStream::new(seed, stream), column: Vec::new() })
    }

    pub fn operator(&self) -> &GameOperator<'a> {
        &self.op
    }

    pub fn state(&self) -> &GkState {
        &self.state
    }

    /// One iteration; returns the sampled coordinate.
    pub fn step(&mut self) -> Result<usize> {
        let state = &mut self.state;
        let k = state.tree.sample(&mut self.rng)?;
        state.t += 1;
        state.counts[k] += 1;
        self.op.column_into(k, &mut self.column)?;
        let before = state.tree.writes();
        for &(i, a) in &self.column {
            state.payoff[i] += a;
            let w = (state.exponent(i) - state.shift).exp();
            state.tree.update(i, w)?;
        }
        let writes = state.tree.writes() - before;
        state.counters.record(k == self.op.dim() - 1, writes);
        let total = state.tree.total();
        if !(RESCALE_LOW..=RESCALE_HIGH).contains(&total) {
            state.rescale()?;
        }
        Ok(k)
    }

    pub fn checkpoint_objective(&self) -> Option<f64> {
        let avg = self.state.average().ok()?;
        let (rank, _) = recover_rank(&avg).ok()?;
        game_objective(self.op.matrix(), &rank).ok()
    }

    pub fn finish(self, elapsed: Duration, trace: Vec<TraceRow>) -> Result<GkResult> {
        let average = self.state.average()?;
        let (rank, mass) = recover_rank(&average)?;
        let objective = game_objective(self.op.matrix(), &rank)?;
        Ok(GkResult {
            ln_potential: potential(&self.state),
            iterations: self.state.t,
            counters: self.state.counters.clone(),
            average,
            rank,
            mass,
            objective,
            trace,
            elapsed,
        })
    }
}

/// Runs the solver for [`GkConfig::iterations`] steps on stream 0 of `seed`.
pub fn gk_run(matrix: &StochasticMatrix, cfg: &GkConfig, seed: u64) -> Result<GkResult> {
    gk_run_stream(matrix, cfg, seed, 0)
}

pub fn gk_run_stream(matrix: &StochasticMatrix, cfg: &GkConfig, seed: u64, stream: u64) -> Result<GkResult> {
    cfg.validate()?;
    let began = Instant::now();
    let iterations = cfg.iterations(matrix.n())?;
    let mut solver = GkSolver::new(matrix, cfg.eps, seed, stream)?;
    let mut trace = Vec::new();
    for t in 1..=iterations {
        solver.step()?;
        if let Some(every) = cfg.trace_every {
            if t % every == 0 || t == iterations {
                trace.push(TraceRow {
                    iter: t,
                    ln_phi: potential(solver.state()),
                    f_checkpoint: solver.checkpoint_objective(),
                });
            }
        }
    }
    solver.finish(began.elapsed(), trace)
}
