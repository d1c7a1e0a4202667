//! Separation-of-variables spectra on S² and H², closed form and from a
//! finite-difference Sturm–Liouville solver.

mod pde;
mod sturm;

use serde::Serialize;

use crate::rational::Rational;

pub use pde::{angular_problem, h2_radial_problem, pde_spectrum, s2_polar_problem, NumericState, PdeSpectrum};
pub use sturm::{solve_sturm_liouville, Eigenvalue, Endpoint, GridSpec, SLProblem};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Surface {
    H2,
    S2,
}

impl Surface {
    pub fn name(self) -> &'static str {
        match self {
            Surface::H2 => "h2",
            Surface::S2 => "s2",
        }
    }
}

impl std::str::FromStr for Surface {
    type Err = crate::Error;
    fn from_str(s: &str) -> crate::Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "h2" => Ok(Surface::H2),
            "s2" => Ok(Surface::S2),
            _ => Err(crate::Error::Parse(format!("unknown surface {s:?}"))),
        }
    }
}

/// One energy level grouped by `P = n + m`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumLevel<E> {
    pub p: u32,
    pub energy: E,
    /// `(n, m)` with `n + m = P`.
    pub states: Vec<(u32, u32)>,
    pub degeneracy: usize,
}

fn level<E>(p: u32, energy: E) -> SpectrumLevel<E> {
    let states: Vec<(u32, u32)> = (0..=p).map(|m| (p - m, m)).collect();
    SpectrumLevel {
        p,
        energy,
        degeneracy: states.len(),
        states,
    }
}

/// Bound states `E = 1/4 - w²`, `w = ℓ_3 - ℓ_1 - ℓ_2 - 2(P+1) > 0`, at most
/// `max_levels` of them.
pub fn analytic_spectrum_h2(l: &[Rational; 3], max_levels: usize) -> Vec<SpectrumLevel<Rational>> {
    let [l1, l2, l3] = l.clone().map(|x| x.abs());
    let quarter = Rational::new(1, 4);
    let mut out = Vec::new();
    for p in 0u32.. {
        if out.len() >= max_levels {
            break;
        }
        let w = &l3 - &l1 - &l2 - Rational::from_int(2 * (p as i64 + 1));
        if !w.is_positive() {
            break;
        }
        out.push(level(p, &quarter - &w * &w));
    }
    out
}

/// `E = (ℓ_1 + ℓ_2 + ℓ_3 + 2(P+1))² - 1/4` for `P < max_levels`.
pub fn analytic_spectrum_s2(l: &[Rational; 3], max_levels: usize) -> Vec<SpectrumLevel<Rational>> {
    let [l1, l2, l3] = l.clone().map(|x| x.abs());
    let quarter = Rational::new(1, 4);
    (0..max_levels as u32)
        .map(|p| {
            let w = &l1 + &l2 + &l3 + Rational::from_int(2 * (p as i64 + 1));
            level(p, &w * &w - &quarter)
        })
        .collect()
}

pub fn analytic_spectrum(surface: Surface, l: &[Rational; 3], max_levels: usize) -> Vec<SpectrumLevel<Rational>> {
    match surface {
        Surface::H2 => analytic_spectrum_h2(l, max_levels),
        Surface::S2 => analytic_spectrum_s2(l, max_levels),
    }
}
