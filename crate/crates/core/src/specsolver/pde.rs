use std::f64::consts::FRAC_PI_2;

use rayon::prelude::*;
use serde::Serialize;

use super::sturm::Tridiag;
use super::{solve_sturm_liouville, Endpoint, GridSpec, SLProblem, SpectrumLevel, Surface};
use crate::error::{Error, Result};
use crate::rational::Rational;

/// `-u'' + [(ℓ_1²-¼)/cos²θ + (ℓ_2²-¼)/sin²θ] u = λu` on `(0, π/2)`.
pub fn angular_problem(l1: f64, l2: f64) -> SLProblem {
    let (c1, c2) = (l1 * l1 - 0.25, l2 * l2 - 0.25);
    SLProblem::new(0.0, FRAC_PI_2, Endpoint::Singular, Endpoint::Singular, move |t: f64| {
        c1 / t.cos().powi(2) + c2 / t.sin().powi(2)
    })
    .labeled("angular")
}

/// Radial H² equation after `Ψ = (sinh ξ)^{-1/2} u`, which turns
/// `-(∂² + coth ξ ∂)` into `-∂² + ¼ - 1/(4 sinh²ξ)`:
/// `V = ¼ + (λ-¼)/sinh²ξ - (ℓ_3²-¼)/cosh²ξ` on `(0, length)`.
pub fn h2_radial_problem(lambda: f64, l3: f64, length: f64) -> SLProblem {
    let c3 = l3 * l3 - 0.25;
    SLProblem::new(0.0, length, Endpoint::Singular, Endpoint::Regular, move |x: f64| {
        0.25 + (lambda - 0.25) / x.sinh().powi(2) - c3 / x.cosh().powi(2)
    })
    .labeled("h2-radial")
}

/// Polar S² equation after `Ψ = (sin φ)^{-1/2} u`:
/// `V = -¼ + (λ-¼)/sin²φ + (ℓ_3²-¼)/cos²φ` on `(0, π/2)`.
pub fn s2_polar_problem(lambda: f64, l3: f64) -> SLProblem {
    let c3 = l3 * l3 - 0.25;
    SLProblem::new(0.0, FRAC_PI_2, Endpoint::Singular, Endpoint::Singular, move |x: f64| {
        -0.25 + (lambda - 0.25) / x.sin().powi(2) + c3 / x.cos().powi(2)
    })
    .labeled("s2-polar")
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NumericState {
    pub n: u32,
    pub m: u32,
    pub p: u32,
    pub energy: f64,
    pub lambda: f64,
    pub drift: f64,
    pub order: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PdeSpectrum {
    pub surface: Surface,
    pub l: [Rational; 3],
    pub grid: GridSpec,
    pub states: Vec<NumericState>,
    pub levels: Vec<SpectrumLevel<f64>>,
    /// Radial truncation per angular channel (H² only).
    pub radial_lengths: Vec<f64>,
}

const THRESHOLD: f64 = 0.25;
const LENGTH_STEP: f64 = 2.0;
const LENGTH_MAX: f64 = 160.0;
const LENGTH_REF_H: f64 = 1.0 / 64.0;

fn bound_eigenvalues(prob: &SLProblem, n: usize) -> Vec<f64> {
    let t = Tridiag::build(prob, n, 0.0);
    (0..t.count_below(THRESHOLD)).map(|k| t.eigenvalue(k)).collect()
}

/// Smallest `L = 12 + 2k` at which the sub-threshold eigenvalues move by
/// less than `1e-8` relative when `L → L + 2`, at a fixed spacing.
fn radial_length(lambda: f64, l3: f64) -> Result<f64> {
    let at = |len: f64| bound_eigenvalues(&h2_radial_problem(lambda, l3, len), (len / LENGTH_REF_H).round() as usize);
    let mut len = 12.0;
    let mut prev = at(len);
    while len < LENGTH_MAX {
        let next = at(len + LENGTH_STEP);
        let settled = next.len() == prev.len()
            && prev
                .iter()
                .zip(&next)
                .all(|(a, b)| (a - b).abs() < 1e-8 * a.abs().max(1.0));
        if settled {
            return Ok(len);
        }
        len += LENGTH_STEP;
        prev = next;
    }
    Err(Error::NonConvergence(format!(
        "radial truncation for λ = {lambda} did not settle below L = {LENGTH_MAX}"
    )))
}

fn group(states: &[NumericState], max_p: u32) -> Vec<SpectrumLevel<f64>> {
    (0..max_p)
        .filter_map(|p| {
            let mut at: Vec<&NumericState> = states.iter().filter(|s| s.p == p).collect();
            if at.is_empty() {
                return None;
            }
            at.sort_by_key(|s| s.m);
            let energy = at.iter().map(|s| s.energy).sum::<f64>() / at.len() as f64;
            Some(SpectrumLevel {
                p,
                energy,
                states: at.iter().map(|s| (s.n, s.m)).collect(),
                degeneracy: at.len(),
            })
        })
        .collect()
}

fn h2_states(l: [f64; 3], max_p: u32, grid: &GridSpec) -> Result<(Vec<NumericState>, Vec<f64>)> {
    let ang = angular_problem(l[0], l[1]);
    let lambdas = solve_sturm_liouville(&ang, grid, max_p.max(1) as usize)?;
    let mut states = Vec::new();
    let mut lengths = Vec::new();
    for (m, lam) in lambdas.iter().enumerate() {
        let len = radial_length(lam.value, l[2])?;
        let rad = h2_radial_problem(lam.value, l[2], len);
        let finest = Tridiag::build(&rad, grid.nodes, grid.offset);
        let nb = finest.count_below(THRESHOLD);
        lengths.push(len);
        if nb == 0 {
            break;
        }
        for e in solve_sturm_liouville(&rad, grid, nb)? {
            let n = e.index as u32;
            let p = n + m as u32;
            if e.value < THRESHOLD && p < max_p {
                states.push(state(n, m as u32, lam.value, e));
            }
        }
    }
    Ok((states, lengths))
}

fn state(n: u32, m: u32, lambda: f64, e: super::Eigenvalue) -> NumericState {
    NumericState {
        n,
        m,
        p: n + m,
        energy: e.value,
        lambda,
        drift: e.drift,
        order: e.order,
    }
}

fn s2_states(l: [f64; 3], max_p: u32, grid: &GridSpec) -> Result<Vec<NumericState>> {
    let ang = angular_problem(l[0], l[1]);
    let lambdas = solve_sturm_liouville(&ang, grid, max_p as usize)?;
    let per_m: Vec<Vec<NumericState>> = lambdas
        .par_iter()
        .enumerate()
        .map(|(m, lam)| -> Result<Vec<NumericState>> {
            let polar = s2_polar_problem(lam.value, l[2]);
            let count = (max_p as usize) - m;
            Ok(solve_sturm_liouville(&polar, grid, count)?
                .into_iter()
                .map(|e| state(e.index as u32, m as u32, lam.value, e))
                .collect())
        })
        .collect::<Result<_>>()?;
    Ok(per_m.into_iter().flatten().collect())
}

/// Numerical spectrum up to `levels` values of `P`, with the angular
/// separation constant inserted into the second equation. On H² only
/// states below the continuum threshold `¼` are returned.
pub fn pde_spectrum(surface: Surface, l: &[Rational; 3], levels: usize, grid: &GridSpec) -> Result<PdeSpectrum> {
    grid.validate()?;
    if levels == 0 {
        return Err(Error::InvalidParams("levels must be at least 1".into()));
    }
    let lf = l.clone().map(|x| x.abs().to_f64());
    let max_p = levels as u32;
    let (mut states, radial_lengths) = match surface {
        Surface::H2 => h2_states(lf, max_p, grid)?,
        Surface::S2 => (s2_states(lf, max_p, grid)?, Vec::new()),
    };
    states.sort_by(|a, b| (a.p, a.m).cmp(&(b.p, b.m)));
    Ok(PdeSpectrum {
        surface,
        l: l.clone(),
        grid: grid.clone(),
        levels: group(&states, max_p),
        states,
        radial_lengths,
    })
}
