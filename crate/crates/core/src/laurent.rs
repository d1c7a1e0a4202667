//! Monomials in the ambient coordinates and their derivatives, Laurent
//! polynomials, and the quadric rewrite `g_ij s^i s^j = -1`.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::Rational;

/// `s_1^{e_1} ... s_d^{e_d}` with integer (possibly negative) exponents.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct LaurentMonomial(Vec<i32>);

/// `∂_1^{e_1} ... ∂_d^{e_d}`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct DerivMonomial(Vec<u32>);

impl LaurentMonomial {
    pub fn one(dim: usize) -> Self {
        LaurentMonomial(vec![0; dim])
    }

    pub fn new(exps: Vec<i32>) -> Self {
        LaurentMonomial(exps)
    }

    /// `s_var^power`, `var` zero-based.
    pub fn var(dim: usize, var: usize, power: i32) -> Self {
        let mut e = vec![0; dim];
        e[var] = power;
        LaurentMonomial(e)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn exps(&self) -> &[i32] {
        &self.0
    }

    pub fn exps_mut(&mut self) -> &mut [i32] {
        &mut self.0
    }

    pub fn mul(&self, other: &LaurentMonomial) -> LaurentMonomial {
        LaurentMonomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn total_degree(&self) -> i32 {
        self.0.iter().sum()
    }

    pub fn eval(&self, point: &[Rational]) -> Rational {
        let mut out = Rational::one();
        for (x, e) in point.iter().zip(&self.0) {
            if *e != 0 {
                out = out * x.pow(*e);
            }
        }
        out
    }
}

impl DerivMonomial {
    pub fn one(dim: usize) -> Self {
        DerivMonomial(vec![0; dim])
    }

    pub fn new(exps: Vec<u32>) -> Self {
        DerivMonomial(exps)
    }

    pub fn var(dim: usize, var: usize, power: u32) -> Self {
        let mut e = vec![0; dim];
        e[var] = power;
        DerivMonomial(e)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn exps(&self) -> &[u32] {
        &self.0
    }

    pub fn exps_mut(&mut self) -> &mut [u32] {
        &mut self.0
    }

    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }
}

fn write_factors(f: &mut fmt::Formatter<'_>, sym: &str, exps: impl Iterator<Item = i64>) -> fmt::Result {
    let mut any = false;
    for (i, e) in exps.enumerate() {
        if e == 0 {
            continue;
        }
        any = true;
        if e == 1 {
            write!(f, "{sym}{}", i + 1)?;
        } else {
            write!(f, "{sym}{}^{e}", i + 1)?;
        }
    }
    if !any {
        write!(f, "1")?;
    }
    Ok(())
}

impl fmt::Debug for LaurentMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_factors(f, "s", self.0.iter().map(|&e| e as i64))
    }
}

impl fmt::Debug for DerivMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_factors(f, "∂", self.0.iter().map(|&e| e as i64))
    }
}

/// Finite rational Laurent polynomial in `s_1..s_d`.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct LaurentPoly {
    dim: usize,
    terms: BTreeMap<LaurentMonomial, Rational>,
}

impl LaurentPoly {
    pub fn zero(dim: usize) -> Self {
        LaurentPoly {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn monomial(mono: LaurentMonomial, c: Rational) -> Self {
        let mut p = LaurentPoly::zero(mono.dim());
        p.add_term(mono, &c);
        p
    }

    pub fn constant(dim: usize, c: Rational) -> Self {
        Self::monomial(LaurentMonomial::one(dim), c)
    }

    /// `s_var^power`, zero-based `var`.
    pub fn var(dim: usize, var: usize, power: i32) -> Self {
        Self::monomial(LaurentMonomial::var(dim, var, power), Rational::one())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&LaurentMonomial, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, mono: LaurentMonomial, c: &Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(mono) {
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

    pub fn add(&self, other: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c);
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> LaurentPoly {
        let mut out = LaurentPoly::zero(self.dim);
        for (m, x) in &self.terms {
            out.add_term(m.clone(), &(x * c));
        }
        out
    }

    pub fn sub(&self, other: &LaurentPoly) -> LaurentPoly {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn mul(&self, other: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero(self.dim);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), &(c1 * c2));
            }
        }
        out
    }

    pub fn eval(&self, point: &[Rational]) -> Rational {
        self.terms.iter().map(|(m, c)| c * m.eval(point)).sum()
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c}){m:?}")?;
        }
        Ok(())
    }
}

/// Diagonal pseudo-Riemannian metric `diag(g_11, ..., g_dd)`, entries `±1`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Metric {
    diag: Vec<i8>,
}

impl Metric {
    pub fn new(diag: Vec<i8>) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::InvalidMetric("empty metric".into()));
        }
        if let Some(bad) = diag.iter().find(|&&g| g != 1 && g != -1) {
            return Err(Error::InvalidMetric(format!("entry {bad} is not ±1")));
        }
        Ok(Metric { diag })
    }

    pub fn euclidean(dim: usize) -> Self {
        Metric { diag: vec![1; dim] }
    }

    /// Every diagonal sign pattern of dimension `dim`.
    pub fn all_patterns(dim: usize) -> Vec<Metric> {
        (0..1u32 << dim)
            .map(|bits| Metric {
                diag: (0..dim)
                    .map(|i| if bits >> (dim - 1 - i) & 1 == 1 { -1 } else { 1 })
                    .collect(),
            })
            .collect()
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// `g_ii`, zero-based.
    pub fn g(&self, i: usize) -> i8 {
        self.diag[i]
    }

    pub fn g_rat(&self, i: usize) -> Rational {
        Rational::from_int(self.diag[i] as i64)
    }

    pub fn diag(&self) -> &[i8] {
        &self.diag
    }

    /// `(count of +1, count of -1)`.
    pub fn signature(&self) -> (usize, usize) {
        let plus = self.diag.iter().filter(|&&g| g == 1).count();
        (plus, self.diag.len() - plus)
    }

    pub fn negated(&self) -> Metric {
        Metric {
            diag: self.diag.iter().map(|g| -g).collect(),
        }
    }

    /// Sign string such as `+,+,-`.
    pub fn label(&self) -> String {
        self.diag
            .iter()
            .map(|&g| if g == 1 { "+" } else { "-" })
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn parse_label(s: &str) -> Result<Metric> {
        let diag = s
            .split(',')
            .map(|t| match t.trim() {
                "+" | "+1" | "1" => Ok(1),
                "-" | "-1" => Ok(-1),
                other => Err(Error::Parse(format!("bad metric entry {other:?}"))),
            })
            .collect::<Result<Vec<i8>>>()?;
        Metric::new(diag)
    }

    /// Whether `point` lies on `g_ij s^i s^j = -1`.
    pub fn on_surface(&self, point: &[Rational]) -> bool {
        let q: Rational = point
            .iter()
            .enumerate()
            .map(|(i, x)| self.g_rat(i) * x * x)
            .sum();
        q == Rational::from_int(-1)
    }
}

impl fmt::Debug for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "diag({})", self.label())
    }
}

/// Expand one coordinate monomial with the rewrite
/// `s_d^2 -> g_dd (-1 - Σ_{i<d} g_ii s_i^2)` until the exponent of the last
/// coordinate drops below 2. Negative exponents of `s_d` are left alone.
pub fn rewrite_monomial(mono: &LaurentMonomial, metric: &Metric) -> Vec<(Rational, LaurentMonomial)> {
    let d = metric.dim();
    let last = d - 1;
    let mut done = Vec::new();
    let mut work = vec![(Rational::one(), mono.clone())];
    while let Some((c, m)) = work.pop() {
        if m.exps()[last] < 2 {
            done.push((c, m));
            continue;
        }
        let gd = metric.g_rat(last);
        let mut base = m.clone();
        base.exps_mut()[last] -= 2;
        work.push((-(&c * &gd), base.clone()));
        for i in 0..last {
            let mut t = base.clone();
            t.exps_mut()[i] += 2;
            work.push((-(&c * &gd * metric.g_rat(i)), t));
        }
    }
    done
}

impl LaurentPoly {
    pub fn reduce_mod_constraint(&self, metric: &Metric) -> Result<LaurentPoly> {
        if metric.dim() != self.dim {
            return Err(Error::DimensionMismatch(self.dim, metric.dim()));
        }
        let mut out = LaurentPoly::zero(self.dim);
        for (m, c) in &self.terms {
            for (k, mm) in rewrite_monomial(m, metric) {
                out.add_term(mm, &(c * &k));
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn rewrite_on_hyperboloid() {
        let m = Metric::new(vec![1, 1, -1]).unwrap();
        let p = LaurentPoly::var(3, 2, 2).reduce_mod_constraint(&m).unwrap();
        let want = LaurentPoly::constant(3, Rational::one())
            .add(&LaurentPoly::var(3, 0, 2))
            .add(&LaurentPoly::var(3, 1, 2));
        assert_eq!(p, want);
    }

    #[test]
    fn quadric_reduces_to_minus_one() {
        for m in Metric::all_patterns(3) {
            let mut p = LaurentPoly::zero(3);
            for i in 0..3 {
                p = p.add(&LaurentPoly::var(3, i, 2).scale(&m.g_rat(i)));
            }
            assert_eq!(
                p.reduce_mod_constraint(&m).unwrap(),
                LaurentPoly::constant(3, Rational::from_int(-1))
            );
        }
    }

    #[test]
    fn reduction_agrees_on_surface_points() {
        let m = Metric::new(vec![1, 1, -1]).unwrap();
        let pts = [
            vec![q(0, 1), q(0, 1), q(1, 1)],
            vec![q(3, 4), q(0, 1), q(5, 4)],
            vec![q(4, 3), q(0, 1), q(5, 3)],
            vec![q(2, 1), q(2, 1), q(3, 1)],
        ];
        let mut p = LaurentPoly::var(3, 2, 5);
        p = p.add(&LaurentPoly::var(3, 0, -2).mul(&LaurentPoly::var(3, 2, 4)));
        let r = p.reduce_mod_constraint(&m).unwrap();
        for pt in pts {
            assert!(m.on_surface(&pt));
            if pt[0].is_zero() {
                continue;
            }
            assert_eq!(p.eval(&pt), r.eval(&pt));
        }
    }

    #[test]
    fn metric_validation() {
        assert!(Metric::new(vec![1, 0, 1]).is_err());
        assert_eq!(Metric::new(vec![1, 1, -1]).unwrap().signature(), (2, 1));
        assert_eq!(Metric::parse_label("+,+,-").unwrap().label(), "+,+,-");
        assert_eq!(Metric::all_patterns(3).len(), 8);
    }
}
