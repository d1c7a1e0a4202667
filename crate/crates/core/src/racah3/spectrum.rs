use rayon::prelude::*;
use serde::Serialize;

use super::structure::{energy_from_rep, m_values, phi_from_roots, roots, u_from_m};
use crate::error::{Error, Result};
use crate::laurent::Metric;
use crate::model::ModelParams;
use crate::rational::Rational;
use crate::specsolver::{analytic_spectrum, Surface};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SignMode {
    All,
    Fixed([i8; 3]),
}

impl SignMode {
    pub fn patterns(self) -> Vec<[i8; 3]> {
        match self {
            SignMode::Fixed(s) => vec![s],
            SignMode::All => {
                let mut v = Vec::new();
                for e1 in [1, -1] {
                    for e2 in [1, -1] {
                        for e3 in [1, -1] {
                            v.push([e1, e2, e3]);
                        }
                    }
                }
                v
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RepSolution {
    pub signs: [i8; 3],
    pub u: Rational,
    pub p: u32,
    #[serde(rename = "E")]
    pub energy: Rational,
    #[serde(rename = "Etilde")]
    pub etilde: Rational,
    pub degeneracy: u32,
    /// `Φ(u) = Φ(u+p+1) = 0` and `Φ(u+ν) > 0` for `ν = 1..p`, exactly.
    pub certified: bool,
    /// `ε_3 Ẽ > 0`: the representation is realized by a normalizable state.
    pub bound_state: bool,
}

fn candidate(signs: [i8; 3], p: u32, m: &[Rational; 3]) -> RepSolution {
    let u = u_from_m((signs[0], signs[1]), m);
    let (etilde, energy) = energy_from_rep(signs, p, m);
    let rs = roots(m, &etilde);
    let phi = |nu: u32| phi_from_roots(&(&u + Rational::from_int(nu as i64)), &rs);
    let certified = phi(0).is_zero() && phi(p + 1).is_zero() && (1..=p).all(|nu| phi(nu).is_positive());
    let bound_state = (Rational::from_int(signs[2] as i64) * &etilde).is_positive();
    RepSolution {
        signs,
        u,
        p,
        energy,
        etilde,
        degeneracy: p + 1,
        certified,
        bound_state,
    }
}

/// Every certified finite-dimensional representation with `p ≤ max_p`,
/// bound or not.
pub fn find_representations(params: &ModelParams, max_p: u32, mode: SignMode) -> Result<Vec<RepSolution>> {
    let m = m_values(params)?;
    let grid: Vec<([i8; 3], u32)> = mode
        .patterns()
        .into_iter()
        .flat_map(|s| (0..=max_p).map(move |p| (s, p)))
        .collect();
    Ok(grid
        .into_par_iter()
        .map(|(s, p)| candidate(s, p, &m))
        .filter(|r| r.certified)
        .collect())
}

/// Certified bound-state representations, the algebraic discrete spectrum.
pub fn find_spectrum(params: &ModelParams, max_p: u32, mode: SignMode) -> Result<Vec<RepSolution>> {
    Ok(find_representations(params, max_p, mode)?
        .into_iter()
        .filter(|r| r.bound_state)
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PatternMatch {
    pub signs: [i8; 3],
    /// `-1` when the algebraic energies match after `E ↦ -E`.
    pub global_sign: i8,
}

#[derive(Clone, Debug, Serialize)]
pub struct MatchReport {
    pub signature: String,
    pub surface: Surface,
    pub max_p: u32,
    /// `(E, degeneracy)` from separation of variables.
    pub analytic: Vec<(Rational, u32)>,
    pub matches: Vec<PatternMatch>,
    pub unique: bool,
    pub vacuous: bool,
}

fn surface_for(metric: &Metric) -> Result<Surface> {
    match metric.diag() {
        [1, 1, -1] => Ok(Surface::H2),
        [1, 1, 1] | [-1, -1, -1] => Ok(Surface::S2),
        _ => Err(Error::InvalidMetric(format!(
            "no separated spectrum for {}; use +,+,- or a definite metric",
            metric.label()
        ))),
    }
}

fn sorted(mut v: Vec<(Rational, u32)>) -> Vec<(Rational, u32)> {
    v.sort();
    v
}

/// Compare every sign pattern, with and without the global sign, against
/// the analytic spectrum of the surface selected by `metric`, for `P ≤ max_p`.
pub fn match_spectrum_to_signature(metric: &Metric, params: &ModelParams, max_p: u32) -> Result<MatchReport> {
    let surface = surface_for(metric)?;
    let l = params
        .l_values()
        .ok_or_else(|| Error::InvalidParams("spectrum matching needs l values".into()))?;
    let l: [Rational; 3] = l
        .to_vec()
        .try_into()
        .map_err(|_| Error::DimensionMismatch(3, params.dim()))?;
    let analytic = sorted(
        analytic_spectrum(surface, &l, max_p as usize + 1)
            .into_iter()
            .map(|lv| (lv.energy, lv.degeneracy as u32))
            .collect(),
    );
    let reps = find_spectrum(params, max_p, SignMode::All)?;
    let mut matches = Vec::new();
    for signs in SignMode::All.patterns() {
        for global_sign in [1i8, -1] {
            let g = Rational::from_int(global_sign as i64);
            let alg = sorted(
                reps.iter()
                    .filter(|r| r.signs == signs)
                    .map(|r| (&g * &r.energy, r.degeneracy))
                    .collect(),
            );
            if alg == analytic {
                matches.push(PatternMatch { signs, global_sign });
            }
        }
    }
    Ok(MatchReport {
        signature: metric.label(),
        surface,
        max_p,
        vacuous: analytic.is_empty(),
        unique: matches.len() == 1,
        analytic,
        matches,
    })
}
