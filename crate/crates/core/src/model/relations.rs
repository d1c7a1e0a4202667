use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::{check_distinct, Model, ModelParams};
use crate::error::{Error, Result};
use crate::rational::{HbarPoly, Rational};
use crate::weyl::WeylOp;

/// Generator of the symmetry algebra. Indices are 1-based when attached to
/// a model and tuple positions (0-based) inside relation templates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Gen {
    H,
    Q(usize, usize),
    C(usize, usize, usize),
}

impl Gen {
    fn resolve(&self, tuple: &[usize]) -> Gen {
        match *self {
            Gen::H => Gen::H,
            Gen::Q(a, b) => Gen::Q(tuple[a], tuple[b]),
            Gen::C(a, b, c) => Gen::C(tuple[a], tuple[b], tuple[c]),
        }
    }
}

impl fmt::Display for Gen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gen::H => write!(f, "H"),
            Gen::Q(i, j) => write!(f, "Q{i}{j}"),
            Gen::C(i, j, k) => write!(f, "C{i}{j}{k}"),
        }
    }
}

/// `coeff · ħ^hbar · a_index · Π factors` (factors in operator order).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelTerm {
    pub coeff: i64,
    pub hbar: u32,
    pub a_index: Option<usize>,
    pub factors: Vec<Gen>,
}

fn t(coeff: i64, hbar: u32, a_index: Option<usize>, factors: &[Gen]) -> RelTerm {
    RelTerm {
        coeff,
        hbar,
        a_index,
        factors: factors.to_vec(),
    }
}

/// `bracket(lhs.0, lhs.1) = Σ rhs`, with every index resolved. The quantum
/// bracket is the commutator; the classical one the Poisson bracket.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    pub lhs: (Gen, Gen),
    pub rhs: Vec<RelTerm>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// `[H, Q_ij] = 0`
    Symmetry,
    /// `[Q_ij, Q_ik] = ħ C_ijk`
    Qq,
    /// `[Q_jk, C_ijk]`
    QcAdjacent,
    /// `[Q_kl, C_ijk]`
    QcDisjoint,
    /// `[C_ijk, C_jkl]`
    CcShare2,
    /// `[C_ijk, C_klm]`
    CcShare1,
    /// `[C_ijk, C_lmn] = 0`
    CcDisjoint,
    /// `Σ α_ij Q_ij - α_0 H - α_00 = 0`
    Linear,
}

impl Family {
    pub const ALL: [Family; 8] = [
        Family::Symmetry,
        Family::Qq,
        Family::QcAdjacent,
        Family::QcDisjoint,
        Family::CcShare2,
        Family::CcShare1,
        Family::CcDisjoint,
        Family::Linear,
    ];

    /// Families of the closed quadratic algebra (brackets among Q and C).
    pub const CLOSURE: [Family; 5] = [
        Family::QcAdjacent,
        Family::QcDisjoint,
        Family::CcShare2,
        Family::CcShare1,
        Family::CcDisjoint,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Family::Symmetry => "symmetry",
            Family::Qq => "qq",
            Family::QcAdjacent => "qc-adjacent",
            Family::QcDisjoint => "qc-disjoint",
            Family::CcShare2 => "cc-share2",
            Family::CcShare1 => "cc-share1",
            Family::CcDisjoint => "cc-disjoint",
            Family::Linear => "linear",
        }
    }

    pub fn arity(&self) -> usize {
        match self {
            Family::Linear => 0,
            Family::Symmetry => 2,
            Family::Qq | Family::QcAdjacent => 3,
            Family::QcDisjoint | Family::CcShare2 => 4,
            Family::CcShare1 => 5,
            Family::CcDisjoint => 6,
        }
    }

    /// Smallest ambient dimension admitting the family (at least 3).
    pub fn min_dim(&self) -> usize {
        self.arity().max(3)
    }

    /// Template over tuple positions `i, j, k, l, m, n = 0..6`.
    fn template(&self, form: Form, classical: bool) -> Option<Relation> {
        use Gen::{C, Q};
        let (i, j, k, l, m, n) = (0, 1, 2, 3, 4, 5);
        let sign = if form == Form::Reference { -1 } else { 1 };
        let rel = |lhs: (Gen, Gen), rhs: Vec<RelTerm>| Some(Relation { lhs, rhs });
        match (self, classical) {
            (Family::Linear, _) => None,
            (Family::Symmetry, _) => rel((Gen::H, Q(i, j)), vec![]),
            (Family::Qq, false) => rel((Q(i, j), Q(i, k)), vec![t(1, 1, None, &[C(j, k, i)])]),
            (Family::Qq, true) => rel((Q(i, j), Q(i, k)), vec![t(1, 0, None, &[C(j, k, i)])]),
            (Family::QcAdjacent, false) => {
                let s = -sign;
                rel(
                    (Q(j, k), C(i, j, k)),
                    vec![
                        t(8 * s, 1, None, &[Q(i, k), Q(j, k)]),
                        t(-8 * s, 1, None, &[Q(j, k), Q(i, j)]),
                        t(-8 * s, 3, None, &[Q(i, k)]),
                        t(16 * s, 1, Some(j), &[Q(i, k)]),
                        t(8 * s, 3, None, &[Q(i, j)]),
                        t(-16 * s, 1, Some(k), &[Q(i, j)]),
                        t(8 * s, 3, Some(j), &[]),
                        t(-8 * s, 3, Some(k), &[]),
                    ],
                )
            }
            (Family::QcAdjacent, true) => rel(
                (Q(j, k), C(i, j, k)),
                vec![
                    t(-8, 0, None, &[Q(i, k), Q(j, k)]),
                    t(8, 0, None, &[Q(j, k), Q(i, j)]),
                    t(-16, 0, Some(j), &[Q(i, k)]),
                    t(16, 0, Some(k), &[Q(i, j)]),
                ],
            ),
            (Family::QcDisjoint, false) => {
                let s = -sign;
                rel(
                    (Q(k, l), C(i, j, k)),
                    vec![
                        t(8 * s, 1, None, &[Q(i, k), Q(j, l)]),
                        t(-8 * s, 1, None, &[Q(i, l), Q(j, k)]),
                        t(4 * s, 3, None, &[Q(i, k)]),
                        t(4 * s, 3, None, &[Q(j, l)]),
                        t(-4 * s, 3, None, &[Q(i, l)]),
                        t(-4 * s, 3, None, &[Q(j, k)]),
                    ],
                )
            }
            (Family::QcDisjoint, true) => rel(
                (Q(k, l), C(i, j, k)),
                vec![
                    t(-8, 0, None, &[Q(i, k), Q(j, l)]),
                    t(8, 0, None, &[Q(i, l), Q(j, k)]),
                ],
            ),
            (Family::CcShare2, false) => {
                let s = sign;
                rel(
                    (C(i, j, k), C(j, k, l)),
                    vec![
                        t(-8, 1, None, &[C(j, k, l), Q(i, j)]),
                        t(8 * s, 1, None, &[C(i, k, l), Q(j, k)]),
                        t(8 * s, 1, None, &[C(i, j, k), Q(j, l)]),
                        t(-4 * s, 3, None, &[C(j, k, l)]),
                        t(4 * s, 3, None, &[C(i, j, k)]),
                        t(-8 * s, 3, None, &[C(i, k, l)]),
                        t(16 * s, 1, Some(j), &[C(i, k, l)]),
                    ],
                )
            }
            (Family::CcShare2, true) => rel(
                (C(i, j, k), C(j, k, l)),
                vec![
                    t(-8 * sign, 0, None, &[C(j, k, l), Q(i, j)]),
                    t(8, 0, None, &[C(i, k, l), Q(j, k)]),
                    t(8, 0, None, &[C(i, j, k), Q(j, l)]),
                    t(16, 0, Some(j), &[C(i, k, l)]),
                ],
            ),
            (Family::CcShare1, false) => {
                let s = sign;
                rel(
                    (C(i, j, k), C(k, l, m)),
                    vec![
                        t(-8, 1, None, &[C(i, l, m), Q(j, k)]),
                        t(8 * s, 1, None, &[Q(i, k), C(j, l, m)]),
                        t(-4 * s, 3, None, &[C(i, l, m)]),
                        t(4 * s, 3, None, &[C(j, l, m)]),
                    ],
                )
            }
            (Family::CcShare1, true) => rel(
                (C(i, j, k), C(k, l, m)),
                vec![
                    t(-8 * sign, 0, None, &[C(i, l, m), Q(j, k)]),
                    t(8, 0, None, &[Q(i, k), C(j, l, m)]),
                ],
            ),
            (Family::CcDisjoint, _) => rel((C(i, j, k), C(l, m, n)), vec![]),
        }
    }

    /// The relation with tuple positions replaced by `indices` (1-based).
    pub fn relation(&self, form: Form, classical: bool, indices: &[usize]) -> Option<Relation> {
        let tpl = self.template(form, classical)?;
        Some(Relation {
            lhs: (tpl.lhs.0.resolve(indices), tpl.lhs.1.resolve(indices)),
            rhs: tpl
                .rhs
                .into_iter()
                .map(|term| RelTerm {
                    a_index: term.a_index.map(|p| indices[p]),
                    factors: term.factors.iter().map(|g| g.resolve(indices)).collect(),
                    ..term
                })
                .collect(),
        })
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|fam| fam.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown relation family {s:?}")))
    }
}

/// Which right-hand sides to check: the ones established by exact
/// computation, or the commonly quoted reference forms (several of which
/// fail and are kept to report their residuals).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Form {
    #[default]
    Verified,
    Reference,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RelationId {
    pub family: Family,
    pub indices: Vec<usize>,
}

impl RelationId {
    pub fn new(family: Family, indices: Vec<usize>) -> Self {
        RelationId { family, indices }
    }
}

impl fmt::Display for RelationId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let idx: Vec<String> = self.indices.iter().map(|i| i.to_string()).collect();
        write!(f, "{}({})", self.family, idx.join(","))
    }
}

/// All ordered tuples of distinct indices in `1..=dim` of the family's arity.
pub fn all_tuples(family: Family, dim: usize) -> Vec<Vec<usize>> {
    fn rec(k: usize, dim: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in 1..=dim {
            if !cur.contains(&i) {
                cur.push(i);
                rec(k, dim, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(family.arity(), dim, &mut Vec::new(), &mut out);
    out
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct VerifyOptions {
    /// Retry a nonzero ambient residual modulo the quadric constraint.
    pub reduce_mod_constraint: bool,
    /// `None` keeps ħ formal.
    pub hbar: Option<Rational>,
    pub form: Form,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            reduce_mod_constraint: true,
            hbar: None,
            form: Form::Verified,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RelationReport {
    pub relation_id: String,
    pub signature: String,
    pub params: ModelParams,
    pub form: Form,
    /// Terms of the residual after the last simplification applied.
    pub residual_terms: usize,
    /// Whether the constraint rewrite was needed to reach zero.
    pub reduced: bool,
    pub elapsed_ms: u128,
    pub pass: bool,
}

fn eval_rhs(model: &Model, rhs: &[RelTerm]) -> Result<WeylOp> {
    let d = model.dim();
    let mut out = WeylOp::zero(d);
    for term in rhs {
        let mut c = Rational::from_int(term.coeff);
        if let Some(i) = term.a_index {
            c = c * model.params().a(i);
        }
        if c.is_zero() {
            continue;
        }
        let mut prod = WeylOp::one(d);
        for g in &term.factors {
            prod = prod.compose(&*model.gen(g)?);
        }
        out = out.add(&prod.scale_hbar(&HbarPoly::monomial(term.hbar, c)));
    }
    Ok(out)
}

/// `LHS - RHS` of a relation in the ambient algebra, ħ formal.
pub(crate) fn residual(model: &Model, id: &RelationId, form: Form) -> Result<WeylOp> {
    let d = model.dim();
    if id.family == Family::Linear {
        return super::linear::linear_residual(model, form);
    }
    if id.indices.len() != id.family.arity() {
        return Err(Error::InvalidParams(format!(
            "{} needs {} indices",
            id.family,
            id.family.arity()
        )));
    }
    check_distinct(&id.indices, d)?;
    let rel = id
        .family
        .relation(form, false, &id.indices)
        .expect("bracket families have templates");
    let x = model.gen(&rel.lhs.0)?;
    let y = model.gen(&rel.lhs.1)?;
    Ok(x.commutator(&y).sub(&eval_rhs(model, &rel.rhs)?))
}

/// Check one relation: zero in the ambient algebra, or (when enabled) zero
/// modulo the constraint. A failing relation is reported, not an error.
pub fn verify_relation(id: &RelationId, model: &Model, opts: &VerifyOptions) -> Result<RelationReport> {
    let start = Instant::now();
    let mut res = residual(model, id, opts.form)?;
    if let Some(h) = &opts.hbar {
        res = res.specialize_hbar(h);
    }
    let mut reduced = false;
    if !res.is_zero() && opts.reduce_mod_constraint {
        res = res.constraint_normal_form(model.metric())?;
        reduced = true;
    }
    Ok(RelationReport {
        relation_id: id.to_string(),
        signature: model.metric().label(),
        params: model.params().clone(),
        form: opts.form,
        residual_terms: res.len(),
        reduced,
        elapsed_ms: start.elapsed().as_millis(),
        pass: res.is_zero(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::Metric;

    fn params3() -> ModelParams {
        ModelParams::from_a(vec![Rational::new(3, 4), Rational::new(3, 4), Rational::from_int(2)])
    }

    #[test]
    fn symmetry_needs_constraint() {
        let model = Model::new(Metric::euclidean(3), params3()).unwrap();
        let id = RelationId::new(Family::Symmetry, vec![1, 2]);
        let rep = verify_relation(&id, &model, &VerifyOptions::default()).unwrap();
        assert!(rep.pass);
        assert!(rep.reduced);
        let ambient = VerifyOptions {
            reduce_mod_constraint: false,
            ..Default::default()
        };
        assert!(!verify_relation(&id, &model, &ambient).unwrap().pass);
    }

    #[test]
    fn three_index_families_are_ambient() {
        let model = Model::new(Metric::new(vec![1, -1, 1]).unwrap(), params3()).unwrap();
        for fam in [Family::Qq, Family::QcAdjacent] {
            for idx in all_tuples(fam, 3) {
                let rep = verify_relation(&RelationId::new(fam, idx), &model, &VerifyOptions::default()).unwrap();
                assert!(rep.pass && !rep.reduced, "{}", rep.relation_id);
            }
        }
    }

    #[test]
    fn reference_adjacent_family_fails() {
        let model = Model::new(Metric::euclidean(3), params3()).unwrap();
        let opts = VerifyOptions {
            form: Form::Reference,
            ..Default::default()
        };
        let rep = verify_relation(&RelationId::new(Family::QcAdjacent, vec![1, 2, 3]), &model, &opts).unwrap();
        assert!(!rep.pass);
    }

    #[test]
    fn tuple_counts_and_parsing() {
        assert_eq!(all_tuples(Family::CcShare1, 5).len(), 120);
        assert_eq!(all_tuples(Family::Linear, 3), vec![Vec::<usize>::new()]);
        assert_eq!("cc-share2".parse::<Family>().unwrap(), Family::CcShare2);
        assert!("cc".parse::<Family>().is_err());
        assert_eq!(RelationId::new(Family::Qq, vec![1, 2, 3]).to_string(), "qq(1,2,3)");
    }
}
