//! Classical phase space: Laurent polynomials in `s`, polynomials in `p`,
//! exact Poisson brackets, and the ħ → 0 symbol map.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::laurent::{DerivMonomial, LaurentMonomial, Metric};
use crate::model::{all_tuples, Family, Form, Gen, Model, ModelParams, RelTerm, RelationId};
use crate::rational::Rational;
use crate::weyl::WeylOp;

/// `Σ c s^a p^b`; the momentum exponents reuse [`DerivMonomial`].
#[derive(Clone, PartialEq, Eq)]
pub struct PhasePoly {
    dim: usize,
    terms: BTreeMap<(LaurentMonomial, DerivMonomial), Rational>,
}

impl PhasePoly {
    pub fn zero(dim: usize) -> Self {
        PhasePoly {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn term(c: Rational, s: LaurentMonomial, p: DerivMonomial) -> Self {
        let mut out = PhasePoly::zero(s.dim());
        out.add_term((s, p), &c);
        out
    }

    pub fn constant(dim: usize, c: Rational) -> Self {
        Self::term(c, LaurentMonomial::one(dim), DerivMonomial::one(dim))
    }

    pub fn one(dim: usize) -> Self {
        Self::constant(dim, Rational::one())
    }

    /// `s_var^power`, zero-based.
    pub fn s(dim: usize, var: usize, power: i32) -> Self {
        Self::term(Rational::one(), LaurentMonomial::var(dim, var, power), DerivMonomial::one(dim))
    }

    /// `p_var`, zero-based.
    pub fn p(dim: usize, var: usize) -> Self {
        Self::term(Rational::one(), LaurentMonomial::one(dim), DerivMonomial::var(dim, var, 1))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(LaurentMonomial, DerivMonomial), &Rational)> {
        self.terms.iter()
    }

    /// Highest total momentum degree.
    pub fn momentum_degree(&self) -> u32 {
        self.terms.keys().map(|(_, p)| p.order()).max().unwrap_or(0)
    }

    pub fn add_term(&mut self, key: (LaurentMonomial, DerivMonomial), c: &Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            Entry::Vacant(v) => {
                v.insert(c.clone());
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &PhasePoly) -> PhasePoly {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), c);
        }
        out
    }

    pub fn neg(&self) -> PhasePoly {
        self.scale(&Rational::from_int(-1))
    }

    pub fn sub(&self, other: &PhasePoly) -> PhasePoly {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Rational) -> PhasePoly {
        let mut out = PhasePoly::zero(self.dim);
        for (k, x) in &self.terms {
            out.add_term(k.clone(), &(x * c));
        }
        out
    }

    pub fn mul(&self, other: &PhasePoly) -> PhasePoly {
        let mut out = PhasePoly::zero(self.dim);
        for ((s1, p1), c1) in &self.terms {
            for ((s2, p2), c2) in &other.terms {
                let mut p = p1.clone();
                for (e, f) in p.exps_mut().iter_mut().zip(p2.exps()) {
                    *e += f;
                }
                out.add_term((s1.mul(s2), p), &(c1 * c2));
            }
        }
        out
    }

    pub fn d_s(&self, var: usize) -> PhasePoly {
        let mut out = PhasePoly::zero(self.dim);
        for ((s, p), c) in &self.terms {
            let e = s.exps()[var];
            if e == 0 {
                continue;
            }
            let mut s = s.clone();
            s.exps_mut()[var] -= 1;
            out.add_term((s, p.clone()), &(c * Rational::from_int(e as i64)));
        }
        out
    }

    pub fn d_p(&self, var: usize) -> PhasePoly {
        let mut out = PhasePoly::zero(self.dim);
        for ((s, p), c) in &self.terms {
            let e = p.exps()[var];
            if e == 0 {
                continue;
            }
            let mut p = p.clone();
            p.exps_mut()[var] -= 1;
            out.add_term((s.clone(), p), &(c * Rational::from_int(e as i64)));
        }
        out
    }

    pub fn eval(&self, s: &[Rational], p: &[Rational]) -> Rational {
        self.terms
            .iter()
            .map(|((sm, pm), c)| {
                let mut v = c * sm.eval(s);
                for (x, e) in p.iter().zip(pm.exps()) {
                    if *e > 0 {
                        v = v * x.pow(*e as i32);
                    }
                }
                v
            })
            .sum()
    }

    /// Rewrite `s_d² → g_dd(-1 - Σ_{i<d} g_ii s_i²)` after a common even
    /// shift in `s_d`; zero iff the polynomial vanishes on the quadric.
    pub fn constraint_normal_form(&self, metric: &Metric) -> Result<PhasePoly> {
        if metric.dim() != self.dim {
            return Err(Error::DimensionMismatch(self.dim, metric.dim()));
        }
        let last = self.dim - 1;
        let min = self.terms.keys().map(|(s, _)| s.exps()[last]).min().unwrap_or(0);
        let shift = if min < 0 { (-min + 1) / 2 * 2 } else { 0 };
        let mut out = PhasePoly::zero(self.dim);
        for ((s, p), c) in &self.terms {
            let mut s = s.clone();
            s.exps_mut()[last] += shift;
            for (k, m) in crate::laurent::rewrite_monomial(&s, metric) {
                out.add_term((m, p.clone()), &(c * &k));
            }
        }
        Ok(out)
    }
}

impl fmt::Debug for PhasePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, ((s, p), c)) in self.terms.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c}){s:?}")?;
            if !p.is_one() {
                write!(f, "·p{:?}", p.exps())?;
            }
        }
        Ok(())
    }
}

pub fn try_poisson_bracket(f: &PhasePoly, g: &PhasePoly) -> Result<PhasePoly> {
    if f.dim != g.dim {
        return Err(Error::DimensionMismatch(f.dim, g.dim));
    }
    let mut out = PhasePoly::zero(f.dim);
    for i in 0..f.dim {
        out = out
            .add(&f.d_s(i).mul(&g.d_p(i)))
            .sub(&f.d_p(i).mul(&g.d_s(i)));
    }
    Ok(out)
}

/// `{f, g} = Σ_i ∂f/∂s_i ∂g/∂p_i - ∂f/∂p_i ∂g/∂s_i`, so `{s_i, p_j} = δ_ij`.
pub fn poisson_bracket(f: &PhasePoly, g: &PhasePoly) -> PhasePoly {
    try_poisson_bracket(f, g).expect("dimension mismatch")
}

/// Leading symbol: `c(ħ) s^a ∂^b ↦ [ħ^{|b|}]c · s^a p^b`. Fails if some term
/// carries fewer powers of ħ than derivatives.
pub fn symbol(op: &WeylOp) -> Result<PhasePoly> {
    let mut out = PhasePoly::zero(op.dim());
    for ((s, d), c) in op.terms() {
        let order = d.order();
        if let Some(low) = c.min_exponent() {
            if low < order {
                return Err(Error::NotSemiclassical { hbar: low, order });
            }
        }
        out.add_term((s.clone(), d.clone()), &c.coeff(order));
    }
    Ok(out)
}

/// Classical `J_ij = g_jj s_i p_j - g_ii s_j p_i`.
pub fn classical_j(metric: &Metric, i: usize, j: usize) -> PhasePoly {
    let d = metric.dim();
    let (i0, j0) = (i - 1, j - 1);
    PhasePoly::s(d, i0, 1)
        .mul(&PhasePoly::p(d, j0))
        .scale(&metric.g_rat(j0))
        .sub(&PhasePoly::s(d, j0, 1).mul(&PhasePoly::p(d, i0)).scale(&metric.g_rat(i0)))
}

pub fn classical_h(metric: &Metric, params: &ModelParams) -> PhasePoly {
    let d = metric.dim();
    let mut h = PhasePoly::zero(d);
    for k in 1..=d {
        for l in k + 1..=d {
            let j = classical_j(metric, k, l);
            h = h.add(&j.mul(&j).scale(&(metric.g_rat(k - 1) * metric.g_rat(l - 1))));
        }
    }
    for i in 1..=d {
        h = h.add(&PhasePoly::s(d, i - 1, -2).scale(&(metric.g_rat(i - 1) * params.a(i))));
    }
    h
}

pub fn classical_q(metric: &Metric, params: &ModelParams, i: usize, j: usize) -> PhasePoly {
    let d = metric.dim();
    let (i0, j0) = (i - 1, j - 1);
    let g = metric.g_rat(i0) * metric.g_rat(j0);
    let jij = classical_j(metric, i, j);
    let ratio = |n: usize, m: usize| PhasePoly::s(d, n, 2).mul(&PhasePoly::s(d, m, -2));
    let pot = ratio(j0, i0).scale(params.a(i)).add(&ratio(i0, j0).scale(params.a(j)));
    jij.mul(&jij).scale(&-g.clone()).add(&pot.scale(&g))
}

/// `C_ijk = {Q_ij, Q_ik}`.
pub fn classical_c(metric: &Metric, params: &ModelParams, i: usize, j: usize, k: usize) -> PhasePoly {
    poisson_bracket(&classical_q(metric, params, i, j), &classical_q(metric, params, i, k))
}

/// Classical generators keyed like the quantum ones.
pub struct ClassicalModel {
    metric: Metric,
    params: ModelParams,
}

impl ClassicalModel {
    pub fn new(metric: Metric, params: ModelParams) -> Result<Self> {
        if metric.dim() != params.dim() {
            return Err(Error::DimensionMismatch(metric.dim(), params.dim()));
        }
        Ok(ClassicalModel { metric, params })
    }

    pub fn metric(&self) -> &Metric {
        &self.metric
    }

    pub fn gen(&self, g: &Gen) -> PhasePoly {
        match *g {
            Gen::H => classical_h(&self.metric, &self.params),
            Gen::Q(i, j) => classical_q(&self.metric, &self.params, i, j),
            Gen::C(i, j, k) => classical_c(&self.metric, &self.params, i, j, k),
        }
    }
}

/// Build `H`, every `Q_ij` (`i < j`) and every `C_ijk` (`i < j`, `k` distinct).
pub fn build_classical_model(metric: &Metric, params: &ModelParams) -> Result<BTreeMap<Gen, PhasePoly>> {
    let cm = ClassicalModel::new(metric.clone(), params.clone())?;
    let d = metric.dim();
    let mut out = BTreeMap::new();
    out.insert(Gen::H, cm.gen(&Gen::H));
    for i in 1..=d {
        for j in i + 1..=d {
            out.insert(Gen::Q(i, j), cm.gen(&Gen::Q(i, j)));
            for k in 1..=d {
                if k != i && k != j {
                    out.insert(Gen::C(i, j, k), cm.gen(&Gen::C(i, j, k)));
                }
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassicalReport {
    pub relation_id: String,
    pub signature: String,
    pub form: Form,
    pub residual_terms: usize,
    pub reduced: bool,
    pub pass: bool,
}

fn eval_classical(cm: &ClassicalModel, params: &ModelParams, rhs: &[RelTerm]) -> PhasePoly {
    let d = cm.metric.dim();
    let mut out = PhasePoly::zero(d);
    for term in rhs {
        debug_assert_eq!(term.hbar, 0);
        let mut c = Rational::from_int(term.coeff);
        if let Some(i) = term.a_index {
            c = c * params.a(i);
        }
        let mut prod = PhasePoly::one(d);
        for g in &term.factors {
            prod = prod.mul(&cm.gen(g));
        }
        out = out.add(&prod.scale(&c));
    }
    out
}

/// Poisson version of a relation family: ambient first, then modulo the
/// constraint.
pub fn verify_classical_relation(id: &RelationId, cm: &ClassicalModel, form: Form) -> Result<ClassicalReport> {
    let rel = id
        .family
        .relation(form, true, &id.indices)
        .ok_or_else(|| Error::InvalidParams(format!("{} has no bracket form", id.family)))?;
    let lhs = poisson_bracket(&cm.gen(&rel.lhs.0), &cm.gen(&rel.lhs.1));
    let mut res = lhs.sub(&eval_classical(cm, &cm.params, &rel.rhs));
    let mut reduced = false;
    if !res.is_zero() {
        res = res.constraint_normal_form(&cm.metric)?;
        reduced = true;
    }
    Ok(ClassicalReport {
        relation_id: id.to_string(),
        signature: cm.metric.label(),
        form,
        residual_terms: res.len(),
        reduced,
        pass: res.is_zero(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CorrespondenceReport {
    pub pair: String,
    /// Both sides vanish, so no sign is measured.
    pub both_zero: bool,
    /// `s` with `σ((1/ħ)[X, Y]) = s · {σX, σY}`, if one sign works.
    pub sign: Option<i32>,
}

/// Compare `σ((1/ħ)[X, Y])` with `±{σX, σY}`.
pub fn correspondence_check(model: &Model, x: &Gen, y: &Gen) -> Result<CorrespondenceReport> {
    let gx = model.gen(x)?;
    let gy = model.gen(y)?;
    let q = symbol(&gx.commutator(&gy).divide_by_hbar()?)?;
    let c = poisson_bracket(&symbol(&gx)?, &symbol(&gy)?);
    let both_zero = q.is_zero() && c.is_zero();
    let sign = if both_zero {
        None
    } else if q == c {
        Some(1)
    } else if q == c.neg() {
        Some(-1)
    } else {
        None
    };
    Ok(CorrespondenceReport {
        pair: format!("({x},{y})"),
        both_zero,
        sign,
    })
}

/// Pairs of generators whose brackets appear in the relation families at
/// dimension `dim`, plus the `(H, Q_ij)` pairs.
pub fn bracket_pairs(dim: usize) -> Vec<(Gen, Gen)> {
    let mut out = BTreeSet::new();
    for fam in [
        Family::Symmetry,
        Family::Qq,
        Family::QcAdjacent,
        Family::QcDisjoint,
        Family::CcShare2,
        Family::CcShare1,
        Family::CcDisjoint,
    ] {
        if fam.arity() > dim {
            continue;
        }
        for idx in all_tuples(fam, dim) {
            let rel = fam.relation(Form::Verified, false, &idx).expect("bracket family");
            out.insert(rel.lhs);
        }
    }
    out.into_iter().collect()
}
