//! Three-dimensional case: the quadratic algebra generated by
//! `A = Q_12`, `B = Q_13`, `C = [A, B]`, its Casimir, the deformed-oscillator
//! structure function and the resulting spectra.
//!
//! Throughout, ħ = 1 and the central element is `h = -H`.

mod spectrum;
mod structure;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::laurent::Metric;
use crate::model::{discover_linear_relation, Model, ModelParams};
use crate::rational::Rational;
use crate::weyl::WeylOp;

pub use spectrum::{find_representations, find_spectrum, match_spectrum_to_signature, MatchReport, PatternMatch, RepSolution, SignMode};
pub use structure::{
    energy_from_rep, etilde_solutions, k_general_phi, m_values, rep_parameter_u, roots, structure_function_eval,
    structure_function_general, LinForm, LEADING_COEFF, INTERMEDIATE_FACTOR,
};

/// Polynomial in the central element `h`, lowest degree first.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HPoly(pub Vec<Rational>);

impl HPoly {
    pub fn constant(c: Rational) -> Self {
        HPoly(vec![c])
    }

    pub fn linear(c0: Rational, c1: Rational) -> Self {
        HPoly(vec![c0, c1])
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.0.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn degree(&self) -> usize {
        self.0.iter().rposition(|c| !c.is_zero()).unwrap_or(0)
    }

    pub fn add(&self, o: &HPoly) -> HPoly {
        let n = self.0.len().max(o.0.len());
        HPoly((0..n).map(|k| self.coeff(k) + o.coeff(k)).collect())
    }

    pub fn sub(&self, o: &HPoly) -> HPoly {
        self.add(&o.scale(&Rational::from_int(-1)))
    }

    pub fn scale(&self, c: &Rational) -> HPoly {
        HPoly(self.0.iter().map(|x| x * c).collect())
    }

    pub fn mul(&self, o: &HPoly) -> HPoly {
        let mut out = vec![Rational::zero(); self.0.len() + o.0.len() - 1];
        for (i, x) in self.0.iter().enumerate() {
            for (j, y) in o.0.iter().enumerate() {
                out[i + j] += &(x * y);
            }
        }
        HPoly(out)
    }

    pub fn eval(&self, h: &Rational) -> Rational {
        self.0.iter().rev().fold(Rational::zero(), |acc, c| acc * h + c)
    }

    /// `Σ c_k h^k ∘ x` with `h` replaced by an operator.
    pub fn apply_op(&self, h: &WeylOp, x: &WeylOp) -> WeylOp {
        let mut out = WeylOp::zero(x.dim());
        let mut hk = x.clone();
        for c in &self.0 {
            out = out.add(&hk.scale(c));
            hk = h.compose(&hk);
        }
        out
    }
}

/// Structure constants of `[A,C] = αA² + γ{A,B} + δA + εB + ζ`,
/// `[B,C] = aA² - γB² - α{A,B} + dA - δB + z`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuadraticAlgebraConstants {
    pub alpha: Rational,
    pub gamma: Rational,
    pub epsilon: Rational,
    pub a_const: Rational,
    pub delta: HPoly,
    pub zeta: HPoly,
    pub z_const: HPoly,
    pub d_const: HPoly,
}

fn a3(params: &ModelParams) -> Result<(Rational, Rational, Rational)> {
    if params.dim() != 3 {
        return Err(Error::DimensionMismatch(3, params.dim()));
    }
    Ok((params.a(1).clone(), params.a(2).clone(), params.a(3).clone()))
}

fn q(n: i64) -> Rational {
    Rational::from_int(n)
}

/// Constants of the realization. `ε = 16(-1 + a_1 + a_2)` is what the
/// operators produce; see [`reference_structure_constants`] for `ε = 16`.
pub fn structure_constants(params: &ModelParams) -> Result<QuadraticAlgebraConstants> {
    let (a1, a2, a3) = a3(params)?;
    let delta = HPoly::linear(q(4) * (q(-2) + q(6) * &a1 + q(2) * &a2 + q(2) * &a3), q(-8));
    let zeta_c = q(4) * (q(-4) * &a1 + q(4) * &a1 * &a1 + q(4) * &a1 * &a2 - q(2) * &a3 + q(4) * &a1 * &a3);
    let zeta = HPoly::linear(zeta_c, q(-8) * (q(-1) + q(2) * &a1));
    let z_c = q(-4) * (q(-4) * &a1 + q(4) * &a1 * &a1 - q(2) * &a2 + q(4) * &a1 * &a2 + q(4) * &a1 * &a3);
    let z_const = HPoly::linear(z_c, q(8) * (q(-1) + q(2) * &a1));
    let d_const = HPoly::constant(q(-16) * (q(-1) + &a1 + &a3));
    Ok(QuadraticAlgebraConstants {
        alpha: q(8),
        gamma: q(8),
        epsilon: q(16) * (q(-1) + &a1 + &a2),
        a_const: q(0),
        delta,
        zeta,
        z_const,
        d_const,
    })
}

/// The constants with the commonly quoted `ε = 16`.
pub fn reference_structure_constants(params: &ModelParams) -> Result<QuadraticAlgebraConstants> {
    Ok(QuadraticAlgebraConstants {
        epsilon: q(16),
        ..structure_constants(params)?
    })
}

/// `K(h)` as a quadratic in the central element.
pub fn casimir_realized(params: &ModelParams) -> Result<HPoly> {
    let (a1, a2, a3) = a3(params)?;
    let c2 = q(4) * (q(-3) + q(4) * &a1);
    let c1 = q(-8)
        * (q(6) - q(21) * &a1 + q(4) * &a1 * &a1 - q(3) * &a2 + q(4) * &a1 * &a2 - q(3) * &a3
            + q(4) * &a1 * &a3);
    let c0 = q(4)
        * (q(20) * &a1 - q(39) * &a1 * &a1 + q(4) * &a1 * &a1 * &a1 + q(4) * &a2 - q(30) * &a1 * &a2
            + q(8) * &a1 * &a1 * &a2
            - q(3) * &a2 * &a2
            + q(4) * &a1 * &a2 * &a2
            + q(4) * &a3
            - q(30) * &a1 * &a3
            + q(8) * &a1 * &a1 * &a3
            + q(6) * &a2 * &a3
            - q(8) * &a1 * &a2 * &a3
            - q(3) * &a3 * &a3
            + q(4) * &a1 * &a3 * &a3);
    Ok(HPoly(vec![c0, c1, c2]))
}

/// The operators `A, B, C`, the central element `h = -H`, and `Q_23` both
/// built directly and reconstructed from the discovered linear relation.
pub struct Realization {
    pub a: WeylOp,
    pub b: WeylOp,
    pub c: WeylOp,
    pub h: WeylOp,
    pub q23: WeylOp,
    pub q23_reconstructed: WeylOp,
    pub metric: Metric,
}

/// `A = Q_12`, `B = Q_13`, `C = (1/ħ)[A, B]` (ħ formal).
pub fn abc_realization(metric: &Metric, params: &ModelParams) -> Result<Realization> {
    if metric.dim() != 3 {
        return Err(Error::DimensionMismatch(3, metric.dim()));
    }
    let model = Model::new(metric.clone(), params.clone())?;
    let a = (*model.q(1, 2)?).clone();
    let b = (*model.q(1, 3)?).clone();
    let c = (*model.c(1, 2, 3)?).clone();
    let h = model.h()?.neg();
    let rel = discover_linear_relation(&model)?;
    let coef = |i, j| {
        rel.alpha
            .iter()
            .find(|(p, _)| *p == (i, j))
            .map(|(_, c)| c.clone())
            .expect("pair present")
    };
    let a23 = coef(2, 3);
    if a23.is_zero() {
        return Err(Error::NoRelation);
    }
    let hh = model.h()?;
    let q23_reconstructed = hh
        .scale(&rel.alpha_0)
        .add(&WeylOp::constant(3, rel.alpha_00.clone()))
        .sub(&a.scale(&coef(1, 2)))
        .sub(&b.scale(&coef(1, 3)))
        .scale(&a23.recip());
    Ok(Realization {
        q23: (*model.q(2, 3)?).clone(),
        a,
        b,
        c,
        h,
        q23_reconstructed,
        metric: metric.clone(),
    })
}

impl Realization {
    pub fn at_hbar_one(&self) -> Realization {
        let one = Rational::one();
        Realization {
            a: self.a.specialize_hbar(&one),
            b: self.b.specialize_hbar(&one),
            c: self.c.specialize_hbar(&one),
            h: self.h.specialize_hbar(&one),
            q23: self.q23.specialize_hbar(&one),
            q23_reconstructed: self.q23_reconstructed.specialize_hbar(&one),
            metric: self.metric.clone(),
        }
    }

    fn zero_mod(&self, op: &WeylOp) -> Result<bool> {
        op.is_zero_mod_constraint(&self.metric)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DaskaloyannisReport {
    pub signature: String,
    pub ab_is_c: bool,
    pub ac_form: bool,
    pub bc_form: bool,
    pub q23_reconstruction: bool,
    pub pass: bool,
}

/// `[A,C]` and `[B,C]` against the structure-constant form, ħ = 1, modulo
/// the constraint, with the given constants.
pub fn check_daskaloyannis_with(
    metric: &Metric,
    params: &ModelParams,
    k: &QuadraticAlgebraConstants,
) -> Result<DaskaloyannisReport> {
    let real = abc_realization(metric, params)?.at_hbar_one();
    let (a, b, c, h) = (&real.a, &real.b, &real.c, &real.h);
    let one = WeylOp::one(3);
    let ab = a.anticommutator(b);
    let ac_rhs = a
        .compose(a)
        .scale(&k.alpha)
        .add(&ab.scale(&k.gamma))
        .add(&k.delta.apply_op(h, a))
        .add(&b.scale(&k.epsilon))
        .add(&k.zeta.apply_op(h, &one));
    let bc_rhs = a
        .compose(a)
        .scale(&k.a_const)
        .sub(&b.compose(b).scale(&k.gamma))
        .sub(&ab.scale(&k.alpha))
        .add(&k.d_const.apply_op(h, a))
        .sub(&k.delta.apply_op(h, b))
        .add(&k.z_const.apply_op(h, &one));
    let ab_is_c = a.commutator(b) == *c;
    let ac_form = real.zero_mod(&a.commutator(c).sub(&ac_rhs))?;
    let bc_form = real.zero_mod(&b.commutator(c).sub(&bc_rhs))?;
    let q23_reconstruction = real.zero_mod(&real.q23.sub(&real.q23_reconstructed))?;
    Ok(DaskaloyannisReport {
        signature: metric.label(),
        pass: ab_is_c && ac_form && bc_form && q23_reconstruction,
        ab_is_c,
        ac_form,
        bc_form,
        q23_reconstruction,
    })
}

pub fn verify_daskaloyannis_form(metric: &Metric, params: &ModelParams) -> Result<DaskaloyannisReport> {
    check_daskaloyannis_with(metric, params, &structure_constants(params)?)
}

/// The Casimir both as an expression in `A, B, C` and as a polynomial in `h`.
#[derive(Clone, Debug, Serialize)]
pub struct CasimirExpr {
    pub constants: QuadraticAlgebraConstants,
    pub realized_form: HPoly,
}

pub fn casimir(params: &ModelParams) -> Result<CasimirExpr> {
    Ok(CasimirExpr {
        constants: structure_constants(params)?,
        realized_form: casimir_realized(params)?,
    })
}

impl CasimirExpr {
    /// `C² - α{A²,B} - γ{A,B²} + (αγ-δ){A,B} + (γ²-ε)B² + (γδ-2ζ)B
    ///  + (2a/3)A³ + (d + aγ/3 + α²)A² + (aε/3 + αδ + 2z)A`.
    pub fn generator_form(&self, real: &Realization) -> WeylOp {
        let k = &self.constants;
        let (a, b, c, h) = (&real.a, &real.b, &real.c, &real.h);
        let third = Rational::new(1, 3);
        let a2 = a.compose(a);
        let b2 = b.compose(b);
        let c_ag_minus_d = HPoly::constant(&k.alpha * &k.gamma).sub(&k.delta);
        let c_b = k.delta.scale(&k.gamma).sub(&k.zeta.scale(&q(2)));
        let c_a2 = k.d_const.add(&HPoly::constant(&k.a_const * &k.gamma * &third + &k.alpha * &k.alpha));
        let c_a = HPoly::constant(&k.a_const * &k.epsilon * &third)
            .add(&k.delta.scale(&k.alpha))
            .add(&k.z_const.scale(&q(2)));
        c.compose(c)
            .sub(&a2.anticommutator(b).scale(&k.alpha))
            .sub(&a.anticommutator(&b2).scale(&k.gamma))
            .add(&c_ag_minus_d.apply_op(h, &a.anticommutator(b)))
            .add(&b2.scale(&(&k.gamma * &k.gamma - &k.epsilon)))
            .add(&c_b.apply_op(h, b))
            .add(&a2.compose(a).scale(&(q(2) * &k.a_const * &third)))
            .add(&c_a2.apply_op(h, &a2))
            .add(&c_a.apply_op(h, a))
    }

    pub fn realized_op(&self, real: &Realization) -> WeylOp {
        self.realized_form.apply_op(&real.h, &WeylOp::one(3))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CasimirReport {
    pub signature: String,
    pub generator_equals_realized: bool,
    pub commutes_with_a: bool,
    pub commutes_with_b: bool,
    pub pass: bool,
}

/// `K_gen = K(h)` and `[K_gen, A] = [K_gen, B] = 0`, modulo the constraint.
pub fn verify_casimir_with(metric: &Metric, params: &ModelParams, expr: &CasimirExpr) -> Result<CasimirReport> {
    let real = abc_realization(metric, params)?.at_hbar_one();
    let kg = expr.generator_form(&real);
    let generator_equals_realized = real.zero_mod(&kg.sub(&expr.realized_op(&real)))?;
    let commutes_with_a = real.zero_mod(&kg.commutator(&real.a))?;
    let commutes_with_b = real.zero_mod(&kg.commutator(&real.b))?;
    Ok(CasimirReport {
        signature: metric.label(),
        pass: generator_equals_realized && commutes_with_a && commutes_with_b,
        generator_equals_realized,
        commutes_with_a,
        commutes_with_b,
    })
}

pub fn verify_casimir(metric: &Metric, params: &ModelParams) -> Result<CasimirReport> {
    verify_casimir_with(metric, params, &casimir(params)?)
}
