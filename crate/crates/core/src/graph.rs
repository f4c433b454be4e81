//! Directed graphs and the row-stochastic matrices built from them.
//!
//! A [`StochasticMatrix`] stores its explicit entries twice, once per row and
//! once per column, so that both `Pᵀp` (row scatter) and column reads (used by
//! the game operator) touch only the nonzeros. Teleportation is kept as an
//! implicit rank-one term: every entry of the represented matrix equals its
//! stored value plus `uniform_mass / n`.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Tolerance for row sums of a stochastic matrix.
pub const ROW_SUM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dangling {
    /// Rows without out-edges jump uniformly to every node.
    Uniform,
    /// Rows without out-edges stay put.
    SelfLoop,
}

/// A directed graph on `0..n` with nonnegative edge weights.
///
/// Duplicate `(src, dst)` pairs are merged by summing their weights, and the
/// edge list is kept sorted by `(src, dst)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AdjacencyGraph {
    n: usize,
    edges: Vec<(usize, usize, f64)>,
}

impl AdjacencyGraph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        Self::weighted(n, edges.into_iter().map(|(s, d)| (s, d, 1.0)))
    }

    pub fn weighted(n: usize, edges: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        let mut list = Vec::new();
        for (src, dst, w) in edges {
            for idx in [src, dst] {
                if idx >= n {
                    return Err(Error::IndexOutOfRange { index: idx, len: n });
                }
            }
            if !w.is_finite() {
                return Err(Error::NonFiniteWeight { context: format!("edge ({src}, {dst})") });
            }
            if w < 0.0 {
                return Err(Error::NegativeWeight { weight: w, context: format!("edge ({src}, {dst})") });
            }
            list.push((src, dst, w));
        }
        list.sort_by_key(|&(s, d, _)| (s, d));
        let mut edges: Vec<(usize, usize, f64)> = Vec::with_capacity(list.len());
        for (s, d, w) in list {
            match edges.last_mut() {
                Some(last) if last.0 == s && last.1 == d => last.2 += w,
                _ => edges.push((s, d, w)),
            }
        }
        Ok(Self { n, edges })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    pub fn out_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for &(s, _, _) in &self.edges {
            deg[s] += 1;
        }
        deg
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DampingMode {
    /// `(1-δ)I + δP̃`
    Lazy,
    /// `(1-δ)·𝟙𝟙ᵀ/n + δP̃`, with the rank-one part kept implicit.
    Teleport,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DampingSpec {
    delta: f64,
    mode: DampingMode,
}

impl DampingSpec {
    pub fn new(delta: f64, mode: DampingMode) -> Result<Self> {
        if !(delta > 0.0 && delta <= 1.0) {
            return Err(Error::InvalidDelta(delta));
        }
        Ok(Self { delta, mode })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn mode(&self) -> DampingMode {
        self.mode
    }
}

/// Compressed sparse layout: `ptr[i]..ptr[i+1]` indexes the entries of line `i`.
#[derive(Debug, Clone, PartialEq)]
struct Compressed {
    ptr: Vec<usize>,
    idx: Vec<usize>,
    val: Vec<f64>,
}

impl Compressed {
    fn line(&self, i: usize) -> (&[usize], &[f64]) {
        let r = self.ptr[i]..self.ptr[i + 1];
        (&self.idx[r.clone()], &self.val[r])
    }

    fn from_lines(lines: &[Vec<(usize, f64)>]) -> Self {
        let mut ptr = Vec::with_capacity(lines.len() + 1);
        let nnz = lines.iter().map(Vec::len).sum();
        let mut idx = Vec::with_capacity(nnz);
        let mut val = Vec::with_capacity(nnz);
        ptr.push(0);
        for line in lines {
            for &(j, v) in line {
                idx.push(j);
                val.push(v);
            }
            ptr.push(idx.len());
        }
        Self { ptr, idx, val }
    }

    /// The same matrix viewed along the other axis.
    fn transposed(&self, n: usize) -> Self {
        let mut count = vec![0usize; n + 1];
        for &j in &self.idx {
            count[j + 1] += 1;
        }
        for j in 0..n {
            count[j + 1] += count[j];
        }
        let ptr = count.clone();
        let mut next = count;
        let mut idx = vec![0; self.idx.len()];
        let mut val = vec![0.0; self.val.len()];
        // visiting source lines in order keeps every target line sorted
        for i in 0..n {
            for k in self.ptr[i]..self.ptr[i + 1] {
                let j = self.idx[k];
                let slot = next[j];
                idx[slot] = i;
                val[slot] = self.val[k];
                next[j] += 1;
            }
        }
        Self { ptr, idx, val }
    }
}

/// A row-stochastic `n × n` matrix in dual row/column layout.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticMatrix {
    n: usize,
    rows: Compressed,
    cols: Compressed,
    uniform_mass: f64,
    damping: Option<DampingSpec>,
    gap_lower_bound: Option<f64>,
}

impl StochasticMatrix {
    /// Builds `P̃` from a graph: each row is its out-weights divided by their sum.
    /// Rows with no positive out-weight are completed by `dangling`.
    pub fn from_edge_list(graph: &AdjacencyGraph, dangling: Dangling) -> Result<Self> {
        let n = graph.n();
        let mut lines: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for &(s, d, w) in graph.edges() {
            if w > 0.0 {
                lines[s].push((d, w));
            }
        }
        for (i, line) in lines.iter_mut().enumerate() {
            let total: f64 = line.iter().map(|&(_, w)| w).sum();
            if total > 0.0 {
                line.iter_mut().for_each(|(_, w)| *w /= total);
            } else {
                *line = match dangling {
                    Dangling::Uniform => (0..n).map(|j| (j, 1.0 / n as f64)).collect(),
                    Dangling::SelfLoop => vec![(i, 1.0)],
                };
            }
        }
        Self::assemble(n, lines, 0.0, None, None)
    }

    /// Builds a matrix from dense rows; zero entries are not stored.
    pub fn from_dense(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        let mut lines = Vec::with_capacity(n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: row.len() });
            }
            if let Some(&v) = row.iter().find(|v| !v.is_finite()) {
                return Err(Error::NotStochastic { row: i, reason: format!("entry {v}") });
            }
            lines.push(
                row.iter().enumerate().filter(|(_, v)| **v != 0.0).map(|(j, &v)| (j, v)).collect(),
            );
        }
        Self::assemble(n, lines, 0.0, None, None)
    }

    fn assemble(
        n: usize,
        lines: Vec<Vec<(usize, f64)>>,
        uniform_mass: f64,
        damping: Option<DampingSpec>,
        gap_lower_bound: Option<f64>,
    ) -> Result<Self> {
        let share = uniform_mass / n as f64;
        for (i, line) in lines.iter().enumerate() {
            debug_assert!(line.windows(2).all(|w| w[0].0 < w[1].0), "row {i} not sorted");
            let mut sum = uniform_mass;
            for &(j, v) in line {
                if j >= n {
                    return Err(Error::IndexOutOfRange { index: j, len: n });
                }
                if !(0.0..=1.0).contains(&(v + share)) {
                    return Err(Error::NotStochastic { row: i, reason: format!("entry ({i}, {j}) = {v}") });
                }
                sum += v;
            }
            let tol = ROW_SUM_TOL.max(line.len() as f64 * f64::EPSILON);
            if (sum - 1.0).abs() > tol {
                return Err(Error::NotStochastic { row: i, reason: format!("row sum {sum}") });
            }
        }
        let rows = Compressed::from_lines(&lines);
        let cols = rows.transposed(n);
        Ok(Self { n, rows, cols, uniform_mass, damping, gap_lower_bound })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of explicitly stored entries (the implicit teleport part is not counted).
    pub fn nnz(&self) -> usize {
        self.rows.idx.len()
    }

    /// Stored entries of row `i` as parallel `(columns, values)` slices.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        self.rows.line(i)
    }

    /// Stored entries of column `j` as parallel `(rows, values)` slices.
    pub fn col(&self, j: usize) -> (&[usize], &[f64]) {
        self.cols.line(j)
    }

    /// Total implicit mass spread uniformly over each row.
    pub fn uniform_mass(&self) -> f64 {
        self.uniform_mass
    }

    /// The implicit value added to every entry, `uniform_mass / n`.
    pub fn uniform_share(&self) -> f64 {
        self.uniform_mass / self.n as f64
    }

    pub fn damping(&self) -> Option<DampingSpec> {
        self.damping
    }

    /// Known lower bound on the spectral gap, if the construction provides one.
    pub fn gap_lower_bound(&self) -> Option<f64> {
        self.gap_lower_bound
    }

    /// Largest number of nonzeros in any row or column of the represented matrix.
    pub fn max_line_nnz(&self) -> usize {
        if self.uniform_mass > 0.0 {
            return self.n;
        }
        (0..self.n)
            .map(|i| (self.rows.ptr[i + 1] - self.rows.ptr[i]).max(self.cols.ptr[i + 1] - self.cols.ptr[i]))
            .max()
            .unwrap_or(0)
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        let stored = cols.binary_search(&j).map(|k| vals[k]).unwrap_or(0.0);
        stored + self.uniform_share()
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let share = self.uniform_share();
        let mut m = vec![vec![share; self.n]; self.n];
        for (i, row) in m.iter_mut().enumerate() {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                row[j] += v;
            }
        }
        m
    }

    /// Dense materialization read through the column layout.
    pub fn to_dense_from_columns(&self) -> Vec<Vec<f64>> {
        let share = self.uniform_share();
        let mut m = vec![vec![share; self.n]; self.n];
        for j in 0..self.n {
            let (rows, vals) = self.col(j);
            for (&i, &v) in rows.iter().zip(vals) {
                m[i][j] += v;
            }
        }
        m
    }

    /// Returns `(1-δ)I + δP` (lazy) or `(1-δ)𝟙𝟙ᵀ/n + δP` (teleport).
    pub fn apply_damping(&self, spec: DampingSpec) -> Result<Self> {
        let delta = spec.delta();
        let mut lines: Vec<Vec<(usize, f64)>> = (0..self.n)
            .map(|i| {
                let (cols, vals) = self.row(i);
                cols.iter().zip(vals).map(|(&j, &v)| (j, delta * v)).collect()
            })
            .collect();
        let rest = 1.0 - delta;
        let (uniform_mass, gap) = match spec.mode() {
            DampingMode::Lazy => {
                if rest > 0.0 {
                    for (i, line) in lines.iter_mut().enumerate() {
                        match line.binary_search_by_key(&i, |&(j, _)| j) {
                            Ok(k) => line[k].1 += rest,
                            Err(k) => line.insert(k, (i, rest)),
                        }
                    }
                }
                (delta * self.uniform_mass, if delta == 1.0 { self.gap_lower_bound } else { None })
            }
            DampingMode::Teleport => {
                let gap = if rest > 0.0 { Some(rest) } else { self.gap_lower_bound };
                (delta * self.uniform_mass + rest, gap)
            }
        };
        Self::assemble(self.n, lines, uniform_mass, Some(spec), gap)
    }

    /// Computes `Pᵀp` for an arbitrary vector `p`.
    pub fn transpose_apply(&self, p: &[f64]) -> Result<Vec<f64>> {
        if p.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: p.len() });
        }
        let base = if self.uniform_mass > 0.0 { self.uniform_share() * p.iter().sum::<f64>() } else { 0.0 };
        let mut out = vec![base; self.n];
        for (i, &pi) in p.iter().enumerate() {
            if pi == 0.0 {
                continue;
            }
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                out[j] += v * pi;
            }
        }
        Ok(out)
    }
}
