use serde::Serialize;

use super::{build_H, build_J, ModelParams};
use crate::error::Result;
use crate::laurent::Metric;
use crate::rational::Rational;
use crate::weyl::WeylOp;

fn sd(a: usize, b: usize) -> WeylOp {
    WeylOp::coord(3, a, 1).compose(&WeylOp::deriv(3, b, 1))
}

/// `so(2,1)` generators in the usual hyperboloid convention:
/// `J_1 = s_2∂_3 + s_3∂_2`, `J_2 = s_3∂_1 + s_1∂_3`, `J_3 = -s_1∂_2 + s_2∂_1`.
pub fn hyperboloid_generators() -> [WeylOp; 3] {
    [
        sd(1, 2).add(&sd(2, 1)),
        sd(2, 0).add(&sd(0, 2)),
        sd(1, 0).sub(&sd(0, 1)),
    ]
}

/// Rotation generators `J_1 = s_2∂_3 - s_3∂_2` and cyclic.
fn so3_generators() -> [WeylOp; 3] {
    [sd(1, 2).sub(&sd(2, 1)), sd(2, 0).sub(&sd(0, 2)), sd(0, 1).sub(&sd(1, 0))]
}

fn potential(params: &ModelParams, signs: [i64; 3]) -> WeylOp {
    let mut out = WeylOp::zero(3);
    for (i, s) in signs.iter().enumerate() {
        let c = Rational::from_int(*s) * params.a(i + 1);
        out = out.add(&WeylOp::coord(3, i, -2).scale(&c));
    }
    out
}

/// `-J_1² - J_2² + J_3² + a_1/s_1² + a_2/s_2² - a_3/s_3²` on the hyperboloid, ħ = 1.
pub fn hyperboloid_hamiltonian(params: &ModelParams) -> WeylOp {
    let [j1, j2, j3] = hyperboloid_generators();
    j3.compose(&j3)
        .sub(&j1.compose(&j1))
        .sub(&j2.compose(&j2))
        .add(&potential(params, [1, 1, -1]))
}

/// `-(J_1² + J_2² + J_3²) + Σ a_i/s_i²` on the sphere, ħ = 1.
pub fn sphere_hamiltonian(params: &ModelParams) -> WeylOp {
    let mut h = potential(params, [1, 1, 1]);
    for j in so3_generators() {
        h = h.sub(&j.compose(&j));
    }
    h
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConventionEntry {
    pub signature: String,
    /// e.g. `J_23 ~ J_1`
    pub pair: String,
    /// `Some(s)` when `built = s · reference`; `None` when no sign relates them.
    pub sign: Option<i32>,
}

fn relative_sign(built: &WeylOp, reference: &WeylOp) -> Option<i32> {
    if built == reference {
        Some(1)
    } else if *built == reference.neg() {
        Some(-1)
    } else {
        None
    }
}

/// Signs relating the generic builders (ħ = 1) to the explicit three-
/// dimensional generators and Hamiltonians, measured at a generic `l`.
pub fn convention_table() -> Result<Vec<ConventionEntry>> {
    let one = Rational::one();
    let params = ModelParams::from_l(vec![Rational::new(1, 3), Rational::new(2, 5), Rational::new(7, 2)]);
    let h2 = Metric::new(vec![1, 1, -1])?;
    let mut out = Vec::new();
    let refs = hyperboloid_generators();
    for ((i, j), (n, r)) in [(2, 3), (1, 3), (1, 2)].into_iter().zip(refs.iter().enumerate()) {
        let built = build_J(&h2, i, j)?.specialize_hbar(&one);
        out.push(ConventionEntry {
            signature: h2.label(),
            pair: format!("J_{i}{j} ~ J_{}", n + 1),
            sign: relative_sign(&built, r),
        });
    }
    out.push(ConventionEntry {
        signature: h2.label(),
        pair: "H ~ H_hyperboloid".into(),
        sign: relative_sign(&build_H(&h2, &params)?.specialize_hbar(&one), &hyperboloid_hamiltonian(&params)),
    });
    for m in [Metric::new(vec![-1, -1, -1])?, Metric::euclidean(3)] {
        out.push(ConventionEntry {
            signature: m.label(),
            pair: "H ~ H_sphere".into(),
            sign: relative_sign(&build_H(&m, &params)?.specialize_hbar(&one), &sphere_hamiltonian(&params)),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::LaurentPoly;

    #[test]
    fn measured_table() {
        let t = convention_table().unwrap();
        let signs: Vec<Option<i32>> = t.iter().map(|e| e.sign).collect();
        assert_eq!(signs, vec![Some(-1), Some(-1), Some(-1), Some(1), Some(-1), None]);
    }

    #[test]
    fn free_sphere_on_s3() {
        let h = sphere_hamiltonian(&ModelParams::zero(3));
        let f = LaurentPoly::var(3, 2, 1);
        assert_eq!(h.apply(&f).unwrap(), f.scale(&Rational::from_int(2)));
    }
}
