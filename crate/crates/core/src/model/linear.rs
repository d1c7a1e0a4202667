use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use super::relations::{all_tuples, verify_relation, Family, Form, RelationId, VerifyOptions};
use super::{Model, ModelParams};
use crate::error::{Error, Result};
use crate::laurent::Metric;
use crate::linalg::null_space;
use crate::rational::Rational;
use crate::weyl::{OpKey, WeylOp};

/// Coefficients of `Σ_{i<j} α_ij Q_ij - α_0 H - α_00 = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LinearRelation {
    /// `((i, j), α_ij)` for `i < j`, 1-based.
    pub alpha: Vec<((usize, usize), Rational)>,
    pub alpha_0: Rational,
    pub alpha_00: Rational,
}

fn pairs(dim: usize) -> Vec<(usize, usize)> {
    (1..=dim)
        .flat_map(|i| (i + 1..=dim).map(move |j| (i, j)))
        .collect()
}

/// `Σ α_ij Q_ij - α_0 H - α_00` with the computed (`ΣQ + H + Σa`) or the
/// reference (`α_ij = n(n+1)/2`, `α_00 = -Σa`, `α_0 = 1`) coefficients.
pub(crate) fn linear_residual(model: &Model, form: Form) -> Result<WeylOp> {
    let d = model.dim();
    let n = (d - 1) as i64;
    let (aq, a0, a00) = match form {
        Form::Verified => (Rational::from_int(-1), Rational::one(), model.params().a_sum()),
        Form::Reference => (
            Rational::from_int(n * (n + 1) / 2),
            Rational::one(),
            -model.params().a_sum(),
        ),
    };
    let mut out = model.h()?.scale(&-a0);
    for (i, j) in pairs(d) {
        out = out.add(&model.q(i, j)?.scale(&aq));
    }
    Ok(out.sub(&WeylOp::constant(d, a00)))
}

/// Solve exactly for the linear relation among the `Q_ij`, `H` and `1`,
/// modulo the constraint, and check that it is unique up to scale.
pub fn discover_linear_relation(model: &Model) -> Result<LinearRelation> {
    let d = model.dim();
    if d < 3 {
        return Err(Error::InvalidParams("linear relation needs d ≥ 3".into()));
    }
    let ps = pairs(d);
    let mut cols: Vec<WeylOp> = Vec::new();
    for &(i, j) in &ps {
        cols.push((*model.q(i, j)?).clone());
    }
    cols.push(model.h()?.neg());
    cols.push(WeylOp::constant(d, Rational::from_int(-1)));
    let last = d - 1;
    let min = cols
        .iter()
        .filter_map(|c| c.min_coord_exponent(last))
        .min()
        .unwrap_or(0);
    let shift = if min < 0 { (-min + 1) / 2 * 2 } else { 0 };
    let reduced: Vec<WeylOp> = cols
        .iter()
        .map(|c| c.constraint_normal_form_shifted(model.metric(), shift))
        .collect::<Result<_>>()?;
    let mut row_index: BTreeMap<(OpKey, u32), usize> = BTreeMap::new();
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    for (col, op) in reduced.iter().enumerate() {
        for (key, c) in op.terms() {
            for (e, x) in c.terms() {
                let r = *row_index.entry((key.clone(), *e)).or_insert_with(|| {
                    rows.push(vec![Rational::zero(); reduced.len()]);
                    rows.len() - 1
                });
                rows[r][col] = x.clone();
            }
        }
    }
    let ns = null_space(&rows, reduced.len());
    match ns.len() {
        0 => return Err(Error::NoRelation),
        1 => {}
        k => return Err(Error::RelationNotUnique(k)),
    }
    let mut v = ns.into_iter().next().expect("one vector");
    let np = ps.len();
    let pivot = if !v[np].is_zero() {
        v[np].clone()
    } else {
        v.iter().find(|x| !x.is_zero()).cloned().expect("nonzero null vector")
    };
    let inv = pivot.recip();
    for x in v.iter_mut() {
        *x *= &inv;
    }
    Ok(LinearRelation {
        alpha: ps.into_iter().zip(v[..np].iter().cloned()).collect(),
        alpha_0: v[np].clone(),
        alpha_00: v[np + 1].clone(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct MetricIndependenceReport {
    pub dim: usize,
    pub signatures: Vec<String>,
    pub relations_checked: usize,
    pub failures: Vec<String>,
    pub linear: Vec<(String, Option<LinearRelation>)>,
    pub linear_coefficients_equal: bool,
    pub pass: bool,
}

/// Check every relation among `families` (all index tuples at this
/// dimension) plus the discovered linear relation, for each signature.
pub fn verify_metric_independence(
    dim: usize,
    params: &ModelParams,
    signatures: &[Metric],
    families: &[Family],
) -> Result<MetricIndependenceReport> {
    let models: Vec<Model> = signatures
        .iter()
        .map(|m| {
            if m.dim() != dim {
                return Err(Error::DimensionMismatch(dim, m.dim()));
            }
            Model::new(m.clone(), params.clone())
        })
        .collect::<Result<_>>()?;
    let mut jobs = Vec::new();
    for (mi, _) in models.iter().enumerate() {
        for &fam in families {
            if fam == Family::Linear || fam.arity() > dim {
                continue;
            }
            for idx in all_tuples(fam, dim) {
                jobs.push((mi, RelationId::new(fam, idx)));
            }
        }
    }
    // warm the generator caches so workers mostly read
    models.par_iter().try_for_each(|m| -> Result<()> {
        m.h()?;
        for (i, j) in pairs(dim) {
            m.q(i, j)?;
        }
        Ok(())
    })?;
    let opts = VerifyOptions::default();
    let results: Vec<(usize, String, bool)> = jobs
        .par_iter()
        .map(|(mi, id)| {
            verify_relation(id, &models[*mi], &opts).map(|r| (*mi, r.relation_id, r.pass))
        })
        .collect::<Result<_>>()?;
    let failures: Vec<String> = results
        .iter()
        .filter(|r| !r.2)
        .map(|(mi, id, _)| format!("{} on {}", id, signatures[*mi].label()))
        .collect();
    let linear: Vec<(String, Option<LinearRelation>)> = models
        .par_iter()
        .map(|m| (m.metric().label(), discover_linear_relation(m).ok()))
        .collect();
    let first = &linear[0].1;
    let linear_coefficients_equal = first.is_some() && linear.iter().all(|(_, l)| l == first);
    Ok(MetricIndependenceReport {
        dim,
        signatures: signatures.iter().map(|m| m.label()).collect(),
        relations_checked: results.len(),
        pass: failures.is_empty() && linear_coefficients_equal,
        failures,
        linear,
        linear_coefficients_equal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> ModelParams {
        ModelParams::from_a(vec![Rational::from_int(1), Rational::from_int(2), Rational::from_int(3)])
    }

    #[test]
    fn discovered_relation_on_sphere_and_hyperboloid() {
        for m in [Metric::euclidean(3), Metric::new(vec![1, 1, -1]).unwrap()] {
            let model = Model::new(m, params()).unwrap();
            let rel = discover_linear_relation(&model).unwrap();
            assert_eq!(rel.alpha_0, Rational::one());
            assert!(rel.alpha.iter().all(|(_, a)| *a == Rational::from_int(-1)));
            assert_eq!(rel.alpha_00, Rational::from_int(6));
        }
    }

    #[test]
    fn zero_potential_has_zero_constant() {
        let model = Model::new(Metric::euclidean(3), ModelParams::zero(3)).unwrap();
        assert!(discover_linear_relation(&model).unwrap().alpha_00.is_zero());
    }

    #[test]
    fn reference_coefficients_fail() {
        let model = Model::new(Metric::euclidean(3), params()).unwrap();
        let r = linear_residual(&model, Form::Reference).unwrap();
        assert!(!r.is_zero_mod_constraint(model.metric()).unwrap());
        let r = linear_residual(&model, Form::Verified).unwrap();
        assert!(r.is_zero_mod_constraint(model.metric()).unwrap());
    }

    #[test]
    fn single_signature_is_trivially_independent() {
        let rep = verify_metric_independence(3, &params(), &[Metric::euclidean(3)], &[Family::Qq]).unwrap();
        assert!(rep.pass);
    }
}
