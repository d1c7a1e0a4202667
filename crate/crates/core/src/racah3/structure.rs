use std::fmt;

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::rational::Rational;

use super::QuadraticAlgebraConstants;

/// Leading coefficient of the factorized structure function, `3 · 2^38`.
pub const LEADING_COEFF: i64 = 824_633_720_832;
/// Prefactor of the intermediate `(N, u, E)` form, `3 · 2^30`.
pub const INTERMEDIATE_FACTOR: i64 = 3_221_225_472;

/// `m_i ≥ 0` with `m_i² = 1 + 4a_i`; taken as `2|l_i|` when `l` is known.
pub fn m_values(params: &ModelParams) -> Result<[Rational; 3]> {
    if params.dim() != 3 {
        return Err(Error::DimensionMismatch(3, params.dim()));
    }
    let mut out = [Rational::zero(), Rational::zero(), Rational::zero()];
    for i in 0..3 {
        out[i] = match params.l_values() {
            Some(l) => (Rational::from_int(2) * &l[i]).abs(),
            None => {
                let a = params.a(i + 1);
                let disc = Rational::one() + Rational::from_int(4) * a;
                if disc.is_negative() {
                    return Err(Error::InvalidParams(format!("a_{} = {a} < -1/4", i + 1)));
                }
                disc.sqrt_exact().ok_or_else(|| {
                    Error::InvalidParams(format!("1 + 4a_{} is not a rational square", i + 1))
                })?
            }
        };
    }
    Ok(out)
}

/// `N_1..N_8`: `(2 ∓ (m_1 - m_2))/4`, `(2 ∓ (m_1 + m_2))/4`,
/// `(2 ∓ (Ẽ - m_3))/4`, `(2 ∓ (Ẽ + m_3))/4`.
pub fn roots(m: &[Rational; 3], etilde: &Rational) -> [Rational; 8] {
    let two = Rational::from_int(2);
    let quarter = Rational::new(1, 4);
    let r = |s: i64, y: Rational| (&two + Rational::from_int(s) * y) * &quarter;
    let d12 = &m[0] - &m[1];
    let s12 = &m[0] + &m[1];
    let de = etilde - &m[2];
    let se = etilde + &m[2];
    [
        r(-1, d12.clone()),
        r(1, d12),
        r(-1, s12.clone()),
        r(1, s12),
        r(-1, de.clone()),
        r(1, de),
        r(-1, se.clone()),
        r(1, se),
    ]
}

/// `Φ(x) = 824633720832 · Π_r (x - N_r)` at `x = N + u`.
pub fn structure_function_eval(x: &Rational, etilde: &Rational, params: &ModelParams) -> Result<Rational> {
    let m = m_values(params)?;
    Ok(phi_from_roots(x, &roots(&m, etilde)))
}

pub(crate) fn phi_from_roots(x: &Rational, roots: &[Rational; 8]) -> Rational {
    roots
        .iter()
        .fold(Rational::from_int(LEADING_COEFF), |acc, n| acc * (x - n))
}

/// The structure function expressed through the structure constants at a
/// fixed central value `h` and Casimir value `k`, `x = N + u`.
pub fn structure_function_general(x: &Rational, h: &Rational, k: &QuadraticAlgebraConstants, casimir: &Rational) -> Rational {
    let i = Rational::from_int;
    let (al, ga, ep, a) = (&k.alpha, &k.gamma, &k.epsilon, &k.a_const);
    let de = k.delta.eval(h);
    let ze = k.zeta.eval(h);
    let z = k.z_const.eval(h);
    let d = k.d_const.eval(h);
    let p = |b: &Rational, n: i32| b.pow(n);
    let t = i(2) * x - i(1);
    let t3 = i(2) * x - i(3);
    let t1 = i(2) * x + i(1);

    let s1 = al * ep * ep + i(4) * p(ga, 2) * &ze - i(2) * ga * &de * ep;
    let s2 = i(3) * p(al, 2) * p(ep, 2) + i(4) * al * p(ga, 2) * &ze - i(6) * al * ga * &de * ep
        + i(2) * a * ga * p(ep, 2)
        + i(2) * p(ga, 2) * p(&de, 2)
        - i(4) * p(ga, 2) * &d * ep
        + i(8) * p(ga, 3) * &z;
    let s3 = p(al, 2) * ep - al * ga * &de + a * ga * ep - p(ga, 2) * &d;
    let s4 = i(3) * p(al, 2) * p(ep, 3) + i(4) * al * p(ga, 4) * &ze + i(12) * al * p(ga, 2) * &ze * ep
        - i(9) * al * ga * &de * p(ep, 2)
        + a * ga * p(ep, 3)
        + i(2) * p(ga, 4) * p(&de, 2)
        - i(12) * p(ga, 3) * &de * &ze
        + i(6) * p(ga, 2) * p(&de, 2) * ep
        + i(2) * p(ga, 4) * &d * ep
        - i(3) * p(ga, 2) * &d * p(ep, 2)
        - i(4) * p(ga, 5) * &z
        + i(12) * p(ga, 3) * &z * ep;
    let s5 = i(3) * p(al, 2) + i(4) * a * ga;

    i(768) * p(&s1, 2)
        + i(32) * p(ga, 4) * p(&t, 2) * (i(12) * x * x - i(12) * x - i(1)) * s2
        - i(48) * p(ga, 6) * &t3 * p(&t, 4) * &t1 * s3
        - i(256) * p(ga, 2) * p(&t, 2) * s4
        + p(ga, 8) * p(&t3, 2) * p(&t, 4) * p(&t1, 2) * s5
        - i(3072) * p(ga, 6) * casimir * p(&t, 2)
}

/// Kept for API symmetry with the factorized form: `Φ` through the
/// structure constants with `K` read off the realized Casimir.
pub fn k_general_phi(x: &Rational, h: &Rational, params: &ModelParams) -> Result<Rational> {
    let k = super::structure_constants(params)?;
    let kv = super::casimir_realized(params)?.eval(h);
    Ok(structure_function_general(x, h, &k, &kv))
}

/// `u = (2 + ε_1 m_1 + ε_2 m_2)/4`.
pub fn rep_parameter_u(signs: (i8, i8), params: &ModelParams) -> Result<Rational> {
    let m = m_values(params)?;
    Ok(u_from_m(signs, &m))
}

pub(crate) fn u_from_m(signs: (i8, i8), m: &[Rational; 3]) -> Rational {
    (Rational::from_int(2) + Rational::from_int(signs.0 as i64) * &m[0] + Rational::from_int(signs.1 as i64) * &m[1])
        * Rational::new(1, 4)
}

/// `(Ẽ, E)` with `Ẽ = 4(p+1) + Σ ε_i m_i` and `E = (1 - Ẽ²)/4`.
pub fn energy_from_rep(signs: [i8; 3], p: u32, m: &[Rational; 3]) -> (Rational, Rational) {
    let mut et = Rational::from_int(4 * (p as i64 + 1));
    for i in 0..3 {
        et = et + Rational::from_int(signs[i] as i64) * &m[i];
    }
    let e = (Rational::one() - &et * &et) * Rational::new(1, 4);
    (et, e)
}

/// Linear form `c_0 + c_1 m_1 + c_2 m_2 + c_3 m_3`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinForm(pub [Rational; 4]);

impl LinForm {
    fn new(c: [i64; 4]) -> Self {
        LinForm(c.map(Rational::from_int))
    }

    pub fn neg(&self) -> LinForm {
        LinForm(self.0.clone().map(|c| -c))
    }

    pub fn eval(&self, m: &[Rational; 3]) -> Rational {
        &self.0[0] + &self.0[1] * &m[0] + &self.0[2] * &m[1] + &self.0[3] * &m[2]
    }
}

impl fmt::Display for LinForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = ["", "m1", "m2", "m3"];
        let mut first = true;
        for (c, n) in self.0.iter().zip(names) {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " {} ", if c.is_negative() { '-' } else { '+' })?;
            } else if c.is_negative() {
                write!(f, "-")?;
            }
            first = false;
            let a = c.abs();
            match (n.is_empty(), a.is_one()) {
                (true, _) => write!(f, "{a}")?,
                (false, true) => write!(f, "{n}")?,
                (false, false) => write!(f, "{a}{n}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Solve `u + p + 1 = N_r` for `Ẽ` over the four `Ẽ`-dependent roots,
/// treating `m_1, m_2, m_3, Ẽ` as indeterminates. Each entry is `Ẽ` as a
/// linear form in the `m_i`.
pub fn etilde_solutions(signs: (i8, i8), p: u32) -> Vec<LinForm> {
    // forms over (1, m1, m2, m3, Ẽ), scaled by 4
    let (e1, e2) = (signs.0 as i64, signs.1 as i64);
    let x = [2 + 4 * (p as i64 + 1), e1, e2, 0, 0];
    let root = |s: i64, m3: i64| [2, 0, 0, s * m3, s];
    let mut out = Vec::new();
    for (s, m3) in [(-1, -1), (1, -1), (-1, 1), (1, 1)] {
        let r = root(s, m3);
        let diff: Vec<i64> = x.iter().zip(r).map(|(a, b)| a - b).collect();
        // diff[0..4] + diff[4] Ẽ = 0
        let c = diff[4];
        out.push(LinForm::new([-diff[0] / c, -diff[1] / c, -diff[2] / c, -diff[3] / c]));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn leading_constant_identity() {
        assert_eq!(LEADING_COEFF, 256 * INTERMEDIATE_FACTOR);
        assert_eq!(LEADING_COEFF, 3 * (1i64 << 38));
    }

    #[test]
    fn equal_m_collapses_first_roots() {
        let m = [r(3, 2), r(3, 2), r(1, 1)];
        let ns = roots(&m, &r(5, 1));
        assert_eq!(ns[0], r(1, 2));
        assert_eq!(ns[1], r(1, 2));
    }

    #[test]
    fn u_examples() {
        let p = ModelParams::from_l(vec![r(1, 2), r(1, 2), r(1, 2)]);
        assert_eq!(rep_parameter_u((1, 1), &p).unwrap(), r(1, 1));
        assert_eq!(rep_parameter_u((-1, -1), &p).unwrap(), r(0, 1));
    }

    #[test]
    fn non_square_discriminant_rejected() {
        let p = ModelParams::from_a(vec![r(1, 1), r(0, 1), r(0, 1)]);
        assert!(m_values(&p).is_err());
        let p = ModelParams::from_a(vec![r(-1, 1), r(0, 1), r(0, 1)]);
        assert!(m_values(&p).is_err());
        let p = ModelParams::from_a(vec![r(2, 1), r(0, 1), r(3, 4)]);
        assert_eq!(m_values(&p).unwrap(), [r(3, 1), r(1, 1), r(2, 1)]);
    }

    #[test]
    fn linear_form_display() {
        let s = etilde_solutions((1, -1), 0);
        assert_eq!(s[1].to_string(), "4 + m1 - m2 + m3");
    }
}
