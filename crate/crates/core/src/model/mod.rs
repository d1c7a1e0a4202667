//! The generic system on a pseudo-sphere: Hamiltonian, first-order
//! generators, quadratic and cubic symmetries, and their relations.
//!
//! Indices in the public API are 1-based, as in `Q_12`.

mod convention;
mod linear;
mod relations;

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{HbarPoly, Rational};
use crate::weyl::WeylOp;

pub use crate::laurent::Metric;
pub use convention::{convention_table, hyperboloid_generators, hyperboloid_hamiltonian, sphere_hamiltonian, ConventionEntry};
pub use linear::{discover_linear_relation, verify_metric_independence, LinearRelation, MetricIndependenceReport};
pub use relations::{
    all_tuples, verify_relation, Family, Form, Gen, RelTerm, Relation, RelationId, RelationReport,
    VerifyOptions,
};

/// Potential strengths `a_i`, optionally given through `a_i = l_i² - 1/4`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct ModelParams {
    a: Vec<Rational>,
    #[serde(skip_serializing_if = "Option::is_none")]
    l: Option<Vec<Rational>>,
}

#[derive(Deserialize)]
struct RawParams {
    a: Option<Vec<Rational>>,
    l: Option<Vec<Rational>>,
}

impl<'de> Deserialize<'de> for ModelParams {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let raw = RawParams::deserialize(de)?;
        match (raw.a, raw.l) {
            (None, Some(l)) => Ok(ModelParams::from_l(l)),
            (Some(a), None) => Ok(ModelParams::from_a(a)),
            (Some(a), Some(l)) => {
                let p = ModelParams::from_l(l);
                if p.a != a {
                    return Err(serde::de::Error::custom("a and l are inconsistent"));
                }
                Ok(p)
            }
            (None, None) => Err(serde::de::Error::custom("params need `a` or `l`")),
        }
    }
}

impl ModelParams {
    pub fn from_a(a: Vec<Rational>) -> Self {
        ModelParams { a, l: None }
    }

    pub fn from_l(l: Vec<Rational>) -> Self {
        let quarter = Rational::new(1, 4);
        let a = l.iter().map(|x| x * x - &quarter).collect();
        ModelParams { a, l: Some(l) }
    }

    pub fn zero(dim: usize) -> Self {
        Self::from_a(vec![Rational::zero(); dim])
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    /// `a_i`, 1-based.
    pub fn a(&self, i: usize) -> &Rational {
        &self.a[i - 1]
    }

    pub fn a_values(&self) -> &[Rational] {
        &self.a
    }

    pub fn l_values(&self) -> Option<&[Rational]> {
        self.l.as_deref()
    }

    pub fn a_sum(&self) -> Rational {
        self.a.iter().sum()
    }

    /// Compact label such as `a=(1,2,3)` or `l=(1/2,1/2,13/2)`.
    pub fn label(&self) -> String {
        let join = |v: &[Rational]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        match &self.l {
            Some(l) => format!("l=({})", join(l)),
            None => format!("a=({})", join(&self.a)),
        }
    }
}

fn check_index(i: usize, dim: usize) -> Result<()> {
    if i == 0 || i > dim {
        return Err(Error::IndexOutOfRange { index: i, dim });
    }
    Ok(())
}

fn check_distinct(idx: &[usize], dim: usize) -> Result<()> {
    for &i in idx {
        check_index(i, dim)?;
    }
    for (n, i) in idx.iter().enumerate() {
        if idx[..n].contains(i) {
            return Err(Error::RepeatedIndex(idx.to_vec()));
        }
    }
    Ok(())
}

fn check_params(metric: &Metric, params: &ModelParams) -> Result<()> {
    if metric.dim() != params.dim() {
        return Err(Error::DimensionMismatch(metric.dim(), params.dim()));
    }
    Ok(())
}

/// `J_ij = ħ(g_jj s_i ∂_j - g_ii s_j ∂_i)`.
#[allow(non_snake_case)]
pub fn build_J(metric: &Metric, i: usize, j: usize) -> Result<WeylOp> {
    let d = metric.dim();
    check_index(i, d)?;
    check_index(j, d)?;
    let (i0, j0) = (i - 1, j - 1);
    let hbar = HbarPoly::monomial(1, Rational::one());
    let a = WeylOp::coord(d, i0, 1).compose(&WeylOp::deriv(d, j0, 1)).scale(&metric.g_rat(j0));
    let b = WeylOp::coord(d, j0, 1).compose(&WeylOp::deriv(d, i0, 1)).scale(&metric.g_rat(i0));
    Ok(a.sub(&b).scale_hbar(&hbar))
}

/// `H = Σ_{k<l} g_kk g_ll J_kl² + Σ_i g_ii a_i / s_i²`.
#[allow(non_snake_case)]
pub fn build_H(metric: &Metric, params: &ModelParams) -> Result<WeylOp> {
    check_params(metric, params)?;
    let d = metric.dim();
    let mut h = WeylOp::zero(d);
    for k in 1..=d {
        for l in k + 1..=d {
            let j = build_J(metric, k, l)?;
            let g = metric.g_rat(k - 1) * metric.g_rat(l - 1);
            h = h.add(&j.compose(&j).scale(&g));
        }
    }
    for i in 1..=d {
        let c = metric.g_rat(i - 1) * params.a(i);
        h = h.add(&WeylOp::coord(d, i - 1, -2).scale(&c));
    }
    Ok(h)
}

/// `Q_ij = -g_ii g_jj J_ij² + g_ii g_jj (a_i s_j²/s_i² + a_j s_i²/s_j²)`.
#[allow(non_snake_case)]
pub fn build_Q(metric: &Metric, params: &ModelParams, i: usize, j: usize) -> Result<WeylOp> {
    check_params(metric, params)?;
    let d = metric.dim();
    check_distinct(&[i, j], d)?;
    let (i0, j0) = (i - 1, j - 1);
    let g = metric.g_rat(i0) * metric.g_rat(j0);
    let jij = build_J(metric, i, j)?;
    let ratio = |num: usize, den: usize| WeylOp::coord(d, num, 2).compose(&WeylOp::coord(d, den, -2));
    let pot = ratio(j0, i0)
        .scale(params.a(i))
        .add(&ratio(i0, j0).scale(params.a(j)));
    Ok(jij.compose(&jij).scale(&-g.clone()).add(&pot.scale(&g)))
}

/// `C_ijk = (1/ħ)[Q_ij, Q_ik]`.
#[allow(non_snake_case)]
pub fn build_C(metric: &Metric, params: &ModelParams, i: usize, j: usize, k: usize) -> Result<WeylOp> {
    check_distinct(&[i, j, k], metric.dim())?;
    let qij = build_Q(metric, params, i, j)?;
    let qik = build_Q(metric, params, i, k)?;
    qij.commutator(&qik).divide_by_hbar()
}

/// A metric and parameter set together with a cache of the generators
/// built so far. Shareable across threads.
pub struct Model {
    metric: Metric,
    params: ModelParams,
    cache: Mutex<HashMap<Gen, Arc<WeylOp>>>,
}

impl Model {
    pub fn new(metric: Metric, params: ModelParams) -> Result<Self> {
        check_params(&metric, &params)?;
        Ok(Model {
            metric,
            params,
            cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn metric(&self) -> &Metric {
        &self.metric
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn dim(&self) -> usize {
        self.metric.dim()
    }

    /// Generator with formal ħ.
    pub fn gen(&self, g: &Gen) -> Result<Arc<WeylOp>> {
        if let Some(op) = self.cache.lock().expect("cache poisoned").get(g) {
            return Ok(op.clone());
        }
        let op = match *g {
            Gen::H => build_H(&self.metric, &self.params)?,
            Gen::Q(i, j) => build_Q(&self.metric, &self.params, i, j)?,
            Gen::C(i, j, k) => {
                check_distinct(&[i, j, k], self.dim())?;
                let qij = self.gen(&Gen::Q(i, j))?;
                let qik = self.gen(&Gen::Q(i, k))?;
                qij.commutator(&qik).divide_by_hbar()?
            }
        };
        let op = Arc::new(op);
        self.cache
            .lock()
            .expect("cache poisoned")
            .insert(*g, op.clone());
        Ok(op)
    }

    pub fn h(&self) -> Result<Arc<WeylOp>> {
        self.gen(&Gen::H)
    }

    pub fn q(&self, i: usize, j: usize) -> Result<Arc<WeylOp>> {
        self.gen(&Gen::Q(i, j))
    }

    pub fn c(&self, i: usize, j: usize, k: usize) -> Result<Arc<WeylOp>> {
        self.gen(&Gen::C(i, j, k))
    }
}
