//! Normal-ordered differential operators `Σ c(ħ) s^a ∂^b` with Laurent
//! coordinate parts.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::laurent::{rewrite_monomial, DerivMonomial, LaurentMonomial, LaurentPoly, Metric};
use crate::rational::{HbarPoly, Rational};

pub type OpKey = (LaurentMonomial, DerivMonomial);

/// A differential operator in canonical normal order (coordinates left of
/// derivatives). Terms are kept in a `BTreeMap`, so structural equality is
/// operator equality.
#[derive(Clone, PartialEq, Eq)]
pub struct WeylOp {
    dim: usize,
    terms: BTreeMap<OpKey, HbarPoly>,
}

/// `binom(n, j) * k(k-1)...(k-j+1)`.
fn leibniz_coeff(n: u32, k: i32, j: u32) -> i128 {
    let mut c: i128 = 1;
    for t in 0..j {
        c = c * (n - t) as i128 / (t + 1) as i128;
    }
    for t in 0..j {
        c *= (k - t as i32) as i128;
    }
    c
}

impl WeylOp {
    pub fn zero(dim: usize) -> Self {
        WeylOp {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn term(c: HbarPoly, s: LaurentMonomial, d: DerivMonomial) -> Self {
        assert_eq!(s.dim(), d.dim(), "monomial dimensions differ");
        let mut op = WeylOp::zero(s.dim());
        op.add_term((s, d), &c);
        op
    }

    pub fn scalar(dim: usize, c: HbarPoly) -> Self {
        Self::term(c, LaurentMonomial::one(dim), DerivMonomial::one(dim))
    }

    pub fn constant(dim: usize, c: Rational) -> Self {
        Self::scalar(dim, HbarPoly::constant(c))
    }

    pub fn one(dim: usize) -> Self {
        Self::constant(dim, Rational::one())
    }

    /// `ħ^k` as an operator.
    pub fn hbar_power(dim: usize, k: u32) -> Self {
        Self::scalar(dim, HbarPoly::monomial(k, Rational::one()))
    }

    /// Multiplication by `s_var^power` (zero-based `var`).
    pub fn coord(dim: usize, var: usize, power: i32) -> Self {
        Self::term(
            HbarPoly::one(),
            LaurentMonomial::var(dim, var, power),
            DerivMonomial::one(dim),
        )
    }

    /// `∂_var^power` (zero-based `var`).
    pub fn deriv(dim: usize, var: usize, power: u32) -> Self {
        Self::term(
            HbarPoly::one(),
            LaurentMonomial::one(dim),
            DerivMonomial::var(dim, var, power),
        )
    }

    /// Multiplication operator by a Laurent polynomial.
    pub fn from_function(f: &LaurentPoly) -> Self {
        let mut op = WeylOp::zero(f.dim());
        for (m, c) in f.terms() {
            op.add_term((m.clone(), DerivMonomial::one(f.dim())), &HbarPoly::constant(c.clone()));
        }
        op
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

    pub fn terms(&self) -> impl Iterator<Item = (&OpKey, &HbarPoly)> {
        self.terms.iter()
    }

    pub fn coeff(&self, s: &LaurentMonomial, d: &DerivMonomial) -> HbarPoly {
        self.terms
            .get(&(s.clone(), d.clone()))
            .cloned()
            .unwrap_or_else(HbarPoly::zero)
    }

    pub fn add_term(&mut self, key: OpKey, c: &HbarPoly) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            Entry::Vacant(v) => {
                v.insert(c.clone());
            }
            Entry::Occupied(mut o) => {
                o.get_mut().add_assign_poly(c);
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn check_dim(&self, other: &WeylOp) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(self.dim, other.dim));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &WeylOp) -> Result<WeylOp> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), c);
        }
        Ok(out)
    }

    /// Panics on dimension mismatch; use [`WeylOp::try_add`] for checked input.
    pub fn add(&self, other: &WeylOp) -> WeylOp {
        self.try_add(other).expect("dimension mismatch")
    }

    pub fn sub(&self, other: &WeylOp) -> WeylOp {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> WeylOp {
        WeylOp {
            dim: self.dim,
            terms: self.terms.iter().map(|(k, c)| (k.clone(), c.neg())).collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> WeylOp {
        if c.is_zero() {
            return WeylOp::zero(self.dim);
        }
        WeylOp {
            dim: self.dim,
            terms: self.terms.iter().map(|(k, x)| (k.clone(), x.scale(c))).collect(),
        }
    }

    pub fn scale_hbar(&self, c: &HbarPoly) -> WeylOp {
        let mut out = WeylOp::zero(self.dim);
        for (k, x) in &self.terms {
            out.add_term(k.clone(), &x.mul(c));
        }
        out
    }

    pub fn try_compose(&self, rhs: &WeylOp) -> Result<WeylOp> {
        self.check_dim(rhs)?;
        let d = self.dim;
        let mut out = WeylOp::zero(d);
        // each entry: (integer factor, exponent lowered by j)
        let mut factors: Vec<Vec<(i128, u32)>> = vec![Vec::new(); d];
        for ((x1, d1), c1) in &self.terms {
            for ((x2, d2), c2) in &rhs.terms {
                for v in 0..d {
                    let n = d1.exps()[v];
                    let k = x2.exps()[v];
                    factors[v].clear();
                    for j in 0..=n {
                        let c = leibniz_coeff(n, k, j);
                        if c != 0 {
                            factors[v].push((c, j));
                        }
                    }
                }
                let c12 = c1.mul(c2);
                let base_s = x1.mul(x2);
                let mut base_d = d1.clone();
                for v in 0..d {
                    base_d.exps_mut()[v] += d2.exps()[v];
                }
                let mut idx = vec![0usize; d];
                'outer: loop {
                    let mut coef: i128 = 1;
                    let mut s = base_s.clone();
                    let mut dd = base_d.clone();
                    for v in 0..d {
                        let (c, j) = factors[v][idx[v]];
                        coef *= c;
                        s.exps_mut()[v] -= j as i32;
                        dd.exps_mut()[v] -= j;
                    }
                    let r = Rational::from_bigint(coef.into());
                    out.add_term((s, dd), &c12.scale(&r));
                    for v in 0..d {
                        idx[v] += 1;
                        if idx[v] < factors[v].len() {
                            continue 'outer;
                        }
                        idx[v] = 0;
                    }
                    break;
                }
            }
        }
        Ok(out)
    }

    /// Operator product `self ∘ rhs`. Panics on dimension mismatch.
    pub fn compose(&self, rhs: &WeylOp) -> WeylOp {
        self.try_compose(rhs).expect("dimension mismatch")
    }

    pub fn try_commutator(&self, rhs: &WeylOp) -> Result<WeylOp> {
        Ok(self.try_compose(rhs)?.sub(&rhs.compose(self)))
    }

    pub fn commutator(&self, rhs: &WeylOp) -> WeylOp {
        self.try_commutator(rhs).expect("dimension mismatch")
    }

    pub fn anticommutator(&self, rhs: &WeylOp) -> WeylOp {
        self.compose(rhs).add(&rhs.compose(self))
    }

    pub fn pow(&self, n: u32) -> WeylOp {
        let mut out = WeylOp::one(self.dim);
        for _ in 0..n {
            out = out.compose(self);
        }
        out
    }

    pub fn divide_by_hbar(&self) -> Result<WeylOp> {
        let mut terms = BTreeMap::new();
        for (k, c) in &self.terms {
            terms.insert(k.clone(), c.divide_by_hbar().ok_or(Error::NotDivisible)?);
        }
        Ok(WeylOp {
            dim: self.dim,
            terms,
        })
    }

    /// Replace the formal ħ by a rational number.
    pub fn specialize_hbar(&self, hbar: &Rational) -> WeylOp {
        let mut out = WeylOp::zero(self.dim);
        for (k, c) in &self.terms {
            out.add_term(k.clone(), &HbarPoly::constant(c.eval(hbar)));
        }
        out
    }

    /// Terms with no ħ dependence beyond a constant.
    pub fn is_hbar_free(&self) -> bool {
        self.terms.values().all(|c| c.degree().unwrap_or(0) == 0)
    }

    pub fn max_hbar_degree(&self) -> u32 {
        self.terms.values().filter_map(|c| c.degree()).max().unwrap_or(0)
    }

    pub fn max_deriv_order(&self) -> u32 {
        self.terms.keys().map(|(_, d)| d.order()).max().unwrap_or(0)
    }

    /// Act on a function; every scalar must already be a constant in ħ
    /// (see [`WeylOp::specialize_hbar`]).
    pub fn apply(&self, f: &LaurentPoly) -> Result<LaurentPoly> {
        if f.dim() != self.dim {
            return Err(Error::DimensionMismatch(self.dim, f.dim()));
        }
        if !self.is_hbar_free() {
            return Err(Error::UnspecializedHbar);
        }
        let mut out = LaurentPoly::zero(self.dim);
        for ((x, d), c) in &self.terms {
            let c = c.coeff(0);
            for (m, fc) in f.terms() {
                let mut k = Rational::one();
                let mut e = m.clone();
                for v in 0..self.dim {
                    let n = d.exps()[v];
                    if n == 0 {
                        continue;
                    }
                    let ff = leibniz_coeff(n, m.exps()[v], n);
                    if ff == 0 {
                        k = Rational::zero();
                        break;
                    }
                    // leibniz_coeff(n, k, n) is exactly the falling factorial
                    k = k * Rational::from_bigint(ff.into());
                    e.exps_mut()[v] -= n as i32;
                }
                if k.is_zero() {
                    continue;
                }
                out.add_term(x.mul(&e), &(&c * &k * fc));
            }
        }
        Ok(out)
    }

    /// Rewrite `s_d^2` with the quadric relation in every coordinate part,
    /// `d` the last coordinate. Idempotent.
    pub fn reduce_mod_constraint(&self, metric: &Metric) -> Result<WeylOp> {
        if metric.dim() != self.dim {
            return Err(Error::DimensionMismatch(self.dim, metric.dim()));
        }
        let mut out = WeylOp::zero(self.dim);
        for ((x, d), c) in &self.terms {
            for (k, m) in rewrite_monomial(x, metric) {
                out.add_term((m, d.clone()), &c.scale(&k));
            }
        }
        Ok(out)
    }

    /// Normal form used for zero tests modulo the constraint: every term is
    /// first multiplied by a common even power of `s_d` so that no negative
    /// `s_d` exponents remain, then rewritten. The result vanishes exactly
    /// when the operator is a left multiple of `g_ij s^i s^j + 1` on `s_d ≠ 0`.
    pub fn constraint_normal_form(&self, metric: &Metric) -> Result<WeylOp> {
        let min = self.min_coord_exponent(self.dim.saturating_sub(1)).unwrap_or(0);
        let shift = if min < 0 { (-min + 1) / 2 * 2 } else { 0 };
        self.constraint_normal_form_shifted(metric, shift)
    }

    /// Smallest exponent of `s_var` over all terms.
    pub fn min_coord_exponent(&self, var: usize) -> Option<i32> {
        self.terms.keys().map(|(x, _)| x.exps()[var]).min()
    }

    /// Multiply by `s_d^shift` (`shift` even) and rewrite. Linear in the
    /// operator for a fixed shift, so combinations can be tested termwise.
    pub fn constraint_normal_form_shifted(&self, metric: &Metric, shift: i32) -> Result<WeylOp> {
        if metric.dim() != self.dim {
            return Err(Error::DimensionMismatch(self.dim, metric.dim()));
        }
        debug_assert!(shift % 2 == 0);
        let last = self.dim - 1;
        let mut shifted = WeylOp::zero(self.dim);
        for ((x, d), c) in &self.terms {
            let mut x = x.clone();
            x.exps_mut()[last] += shift;
            shifted.add_term((x, d.clone()), c);
        }
        shifted.reduce_mod_constraint(metric)
    }

    pub fn is_zero_mod_constraint(&self, metric: &Metric) -> Result<bool> {
        Ok(self.constraint_normal_form(metric)?.is_zero())
    }

    /// Serializable term list with exact rational strings.
    pub fn to_records(&self) -> Vec<TermRecord> {
        self.terms
            .iter()
            .map(|((x, d), c)| TermRecord {
                hbar: c
                    .terms()
                    .iter()
                    .map(|(e, r)| (*e, r.to_ratio_string()))
                    .collect(),
                s: x.exps().to_vec(),
                d: d.exps().to_vec(),
            })
            .collect()
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct TermRecord {
    /// `(ħ exponent, "num/den")` pairs.
    pub hbar: Vec<(u32, String)>,
    pub s: Vec<i32>,
    pub d: Vec<u32>,
}

impl fmt::Debug for WeylOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, ((x, d), c)) in self.terms.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            write!(f, "[{c:?}]")?;
            if x.exps().iter().any(|&e| e != 0) {
                write!(f, "{x:?}")?;
            }
            if !d.is_one() {
                write!(f, "{d:?}")?;
            }
        }
        Ok(())
    }
}
