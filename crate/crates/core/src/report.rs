//! Machine-readable run reports.

use crate::metrics::Residuals;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Echo of every solver parameter. All keys are always present; unused ones are `null`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub eps: Option<f64>,
    pub sigma: Option<f64>,
    pub alpha: Option<f64>,
    pub delta: Option<f64>,
    pub damping_mode: Option<String>,
    pub dangling: Option<String>,
    pub mode: Option<String>,
    pub c_burn: Option<f64>,
    pub c_total: Option<f64>,
    pub tau: Option<u64>,
    pub tol_adapt: Option<f64>,
    pub tol: Option<f64>,
    pub max_iter: Option<u64>,
    pub restarts: Option<u64>,
    pub iteration_rule: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankedNode {
    pub node: usize,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleComparison {
    pub against: String,
    pub l1: f64,
    pub l2: f64,
    pub linf: f64,
    pub topk_overlap: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Status {
    pub converged: bool,
    pub flags: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub algorithm: String,
    pub n: usize,
    pub nnz: usize,
    pub params: Params,
    pub seed: u64,
    pub iterations: u64,
    pub trajectories: Option<u64>,
    pub wall_ms: f64,
    pub counters: BTreeMap<String, f64>,
    pub residuals: Residuals,
    pub mass: Option<f64>,
    pub topk: Vec<RankedNode>,
    pub oracle: Option<OracleComparison>,
    pub status: Status,
}

impl RunReport {
    /// True when every numeric field is finite.
    pub fn is_finite(&self) -> bool {
        let opt = |v: Option<f64>| v.is_none_or(f64::is_finite);
        let p = &self.params;
        [p.eps, p.sigma, p.alpha, p.delta, p.c_burn, p.c_total, p.tol_adapt, p.tol, self.mass]
            .into_iter()
            .all(opt)
            && self.wall_ms.is_finite()
            && self.counters.values().all(|v| v.is_finite())
            && [self.residuals.l1, self.residuals.l2, self.residuals.linf, self.residuals.f].iter().all(|v| v.is_finite())
            && self.topk.iter().all(|r| r.score.is_finite())
            && self.oracle.as_ref().is_none_or(|o| [o.l1, o.l2, o.linf, o.topk_overlap].iter().all(|v| v.is_finite()))
    }
}

/// The `k` best nodes, descending by score with ascending-index tie-break.
pub fn ranked(p: &[f64], k: usize) -> Vec<RankedNode> {
    let k = k.min(p.len());
    if k == 0 {
        return Vec::new();
    }
    crate::metrics::topk(p, k)
        .expect("k within range")
        .into_iter()
        .map(|node| RankedNode { node, score: p[node] })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranked_order() {
        let r = ranked(&[0.2, 0.4, 0.2, 0.2], 3);
        assert_eq!(r.iter().map(|x| x.node).collect::<Vec<_>>(), vec![1, 0, 2]);
        assert!(ranked(&[1.0], 0).is_empty());
        assert_eq!(ranked(&[0.5, 0.5], 10).len(), 2);
    }

    #[test]
    fn key_set_is_fixed() {
        let report = RunReport {
            algorithm: "power".into(),
            n: 1,
            nnz: 1,
            params: Params::default(),
            seed: 0,
            iterations: 1,
            trajectories: None,
            wall_ms: 0.0,
            counters: BTreeMap::new(),
            residuals: Residuals { l1: 0.0, l2: 0.0, linf: 0.0, f: 0.0 },
            mass: None,
            topk: vec![],
            oracle: None,
            status: Status::default(),
        };
        let v = serde_json::to_value(&report).unwrap();
        let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
        assert_eq!(keys.len(), 14);
        assert_eq!(v["params"].as_object().unwrap().len(), 15);
        assert!(report.is_finite());
    }
}
