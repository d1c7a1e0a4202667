use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Endpoint {
    Regular,
    /// Inverse-square singularity; the grid offset applies here.
    Singular,
}

/// `-u'' + V(x) u = E u` on `(a, b)` with Dirichlet ends, i.e. already in
/// Liouville normal form.
#[derive(Clone)]
pub struct SLProblem {
    pub a: f64,
    pub b: f64,
    pub left: Endpoint,
    pub right: Endpoint,
    pub potential: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub label: String,
}

impl fmt::Debug for SLProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SLProblem")
            .field("label", &self.label)
            .field("a", &self.a)
            .field("b", &self.b)
            .field("left", &self.left)
            .field("right", &self.right)
            .finish()
    }
}

impl SLProblem {
    pub fn new(a: f64, b: f64, left: Endpoint, right: Endpoint, v: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        SLProblem {
            a,
            b,
            left,
            right,
            potential: Arc::new(v),
            label: String::new(),
        }
    }

    pub fn labeled(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    fn interval(&self, offset: f64) -> (f64, f64) {
        let a = if self.left == Endpoint::Singular { self.a + offset } else { self.a };
        let b = if self.right == Endpoint::Singular { self.b - offset } else { self.b };
        (a, b)
    }
}

/// Finest grid has `nodes` subintervals; refinement level `k` uses
/// `nodes / 2^(levels-1-k)`. Singular endpoints are pulled in by `offset`
/// (zero means the endpoint itself carries the Dirichlet condition and is
/// never sampled).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridSpec {
    pub nodes: usize,
    pub levels: usize,
    pub offset: f64,
    /// Maximum relative drift between the finest grid and the extrapolant.
    pub tol: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            nodes: 4096,
            levels: 3,
            offset: 0.0,
            tol: 1e-4,
        }
    }
}

impl GridSpec {
    pub fn with_nodes(nodes: usize) -> Self {
        GridSpec {
            nodes,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.nodes < 64 {
            return Err(Error::InvalidParams(format!("grid needs at least 64 nodes, got {}", self.nodes)));
        }
        if self.levels < 2 {
            return Err(Error::InvalidParams("at least two refinement levels are needed".into()));
        }
        let coarse = self.nodes >> (self.levels - 1);
        if coarse < 8 || coarse << (self.levels - 1) != self.nodes {
            return Err(Error::InvalidParams(format!(
                "{} nodes cannot be halved {} times",
                self.nodes,
                self.levels - 1
            )));
        }
        if !(self.offset >= 0.0) || !(self.tol > 0.0) {
            return Err(Error::InvalidParams("offset must be >= 0 and tol > 0".into()));
        }
        Ok(())
    }

    pub fn level_nodes(&self) -> Vec<usize> {
        (0..self.levels).map(|k| self.nodes >> (self.levels - 1 - k)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Eigenvalue {
    pub index: usize,
    /// Richardson extrapolant of the two finest levels.
    pub value: f64,
    /// Raw eigenvalue per refinement level, coarsest first.
    pub per_level: Vec<f64>,
    /// `|value - finest| / max(|value|, 1)`.
    pub drift: f64,
    /// Observed order from the three finest levels; `None` when the
    /// differences vanish or fewer than three levels exist.
    pub order: Option<f64>,
}

/// Symmetric tridiagonal matrix of the three-point Laplacian plus `V` on the
/// interior nodes.
pub(crate) struct Tridiag {
    diag: Vec<f64>,
    off: f64,
}

impl Tridiag {
    pub(crate) fn build(prob: &SLProblem, n: usize, offset: f64) -> Tridiag {
        let (a, b) = prob.interval(offset);
        let h = (b - a) / n as f64;
        let ih2 = 1.0 / (h * h);
        let diag = (1..n).map(|i| 2.0 * ih2 + (prob.potential)(a + i as f64 * h)).collect();
        Tridiag { diag, off: -ih2 }
    }

    /// Number of eigenvalues strictly below `sigma`.
    pub(crate) fn count_below(&self, sigma: f64) -> usize {
        let e2 = self.off * self.off;
        let tiny = f64::MIN_POSITIVE.sqrt() * self.off.abs().max(1.0);
        let mut count = 0;
        let mut q = 1.0;
        for (i, d) in self.diag.iter().enumerate() {
            q = if i == 0 { d - sigma } else { d - sigma - e2 / q };
            if q == 0.0 {
                q = -tiny;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn bounds(&self) -> (f64, f64) {
        let r = 2.0 * self.off.abs();
        let lo = self.diag.iter().cloned().fold(f64::INFINITY, f64::min) - r;
        let hi = self.diag.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + r;
        (lo, hi)
    }

    /// `k`-th eigenvalue (0-based) by bisection on the Sturm count.
    pub(crate) fn eigenvalue(&self, k: usize) -> f64 {
        let (mut lo, mut hi) = self.bounds();
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 4.0 * f64::EPSILON * mid.abs().max(1.0) {
                break;
            }
        }
        0.5 * (lo + hi)
    }

    pub(crate) fn len(&self) -> usize {
        self.diag.len()
    }
}

fn extrapolate(index: usize, per_level: Vec<f64>) -> Eigenvalue {
    let n = per_level.len();
    let fine = per_level[n - 1];
    let mid = per_level[n - 2];
    let value = fine + (fine - mid) / 3.0;
    let order = if n >= 3 {
        let d1 = (per_level[n - 3] - mid).abs();
        let d2 = (mid - fine).abs();
        (d1 > 0.0 && d2 > 0.0).then(|| (d1 / d2).log2())
    } else {
        None
    };
    Eigenvalue {
        index,
        value,
        drift: (value - fine).abs() / value.abs().max(1.0),
        per_level,
        order,
    }
}

/// Lowest `count` eigenvalues, extrapolated across the grid levels.
pub fn solve_sturm_liouville(prob: &SLProblem, grid: &GridSpec, count: usize) -> Result<Vec<Eigenvalue>> {
    grid.validate()?;
    if count == 0 {
        return Err(Error::InvalidParams("count must be at least 1".into()));
    }
    let mats: Vec<Tridiag> = grid
        .level_nodes()
        .into_par_iter()
        .map(|n| Tridiag::build(prob, n, grid.offset))
        .collect();
    if mats[0].len() < count {
        return Err(Error::InvalidParams(format!("coarsest grid has fewer than {count} nodes")));
    }
    let out: Vec<Eigenvalue> = (0..count)
        .into_par_iter()
        .map(|k| extrapolate(k, mats.iter().map(|m| m.eigenvalue(k)).collect()))
        .collect();
    if let Some(bad) = out.iter().find(|e| e.drift > grid.tol) {
        return Err(Error::NonConvergence(format!(
            "{}: eigenvalue {} drifts by {:.3e}",
            prob.label, bad.index, bad.drift
        )));
    }
    Ok(out)
}
