use std::collections::BTreeSet;
use std::f64::consts::FRAC_PI_2;
use std::io::Write;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use superint_core::laurent::Metric;
use superint_core::model::{
    all_tuples, verify_metric_independence, verify_relation, Family, Model, ModelParams, RelationId, VerifyOptions,
};
use superint_core::phase::{bracket_pairs, correspondence_check, verify_classical_relation, ClassicalModel};
use superint_core::racah3::{
    check_daskaloyannis_with, etilde_solutions, find_spectrum, match_spectrum_to_signature,
    rep_parameter_u, structure_constants, structure_function_eval, verify_casimir, LinForm, PatternMatch, SignMode,
    INTERMEDIATE_FACTOR, LEADING_COEFF,
};
use superint_core::specsolver::{
    analytic_spectrum, angular_problem, h2_radial_problem, pde_spectrum, solve_sturm_liouville, Endpoint, GridSpec,
    SLProblem, Surface,
};
use superint_core::Rational;

struct Outcome {
    pass: bool,
    detail: String,
}

fn report(n: usize, title: &str, run: impl FnOnce() -> Outcome) -> bool {
    let t = Instant::now();
    let o = run();
    let line = format!(
        "criterion {n} {}: {title} ({:.1}s) {}\n",
        if o.pass { "PASS" } else { "FAIL" },
        t.elapsed().as_secs_f64(),
        o.detail
    );
    // written past the test harness capture so the lines always show
    let _ = std::io::stderr().write_all(line.as_bytes());
    o.pass
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_rational(r: &mut ChaCha8Rng) -> Rational {
    Rational::new(r.gen_range(-9..=9), r.gen_range(1..=6))
}

fn random_params(r: &mut ChaCha8Rng, dim: usize) -> ModelParams {
    ModelParams::from_a((0..dim).map(|_| random_rational(r)).collect())
}

fn metric(diag: &[i8]) -> Metric {
    Metric::new(diag.to_vec()).unwrap()
}

fn rl(v: [(i64, i64); 3]) -> [Rational; 3] {
    v.map(|(n, d)| Rational::new(n, d))
}

/// Run every tuple of `families` on `model`; returns (checked, failures).
fn run_families(model: &Model, families: &[Family], opts: &VerifyOptions) -> (usize, Vec<String>) {
    let jobs: Vec<RelationId> = families
        .iter()
        .filter(|f| f.arity() <= model.dim() && **f != Family::Linear)
        .flat_map(|&f| all_tuples(f, model.dim()).into_iter().map(move |i| RelationId::new(f, i)))
        .collect();
    let failures: Vec<String> = jobs
        .par_iter()
        .filter_map(|id| {
            let r = verify_relation(id, model, opts).unwrap();
            (!r.pass).then(|| format!("{} on {}", r.relation_id, r.signature))
        })
        .collect();
    (jobs.len(), failures)
}

fn symmetry_everywhere(dim: usize, metrics: &[Metric], sets: usize, seed: u64) -> Outcome {
    let mut r = rng(seed);
    let params: Vec<ModelParams> = (0..sets).map(|_| random_params(&mut r, dim)).collect();
    let mut checked = 0;
    let mut failures = Vec::new();
    for m in metrics {
        for p in &params {
            let model = Model::new(m.clone(), p.clone()).unwrap();
            let (n, f) = run_families(&model, &[Family::Symmetry], &VerifyOptions::default());
            checked += n;
            failures.extend(f);
        }
    }
    Outcome {
        pass: failures.is_empty(),
        detail: format!("d={dim}: {checked} [H,Q_ij] checks, failures {failures:?}"),
    }
}

fn criterion1() -> Outcome {
    symmetry_everywhere(3, &Metric::all_patterns(3), 3, 1)
}

fn closure_families() -> Vec<Family> {
    let mut v = vec![Family::Qq];
    v.extend(Family::CLOSURE);
    v
}

fn criterion2() -> Outcome {
    let mut r = rng(2);
    let opts = VerifyOptions {
        reduce_mod_constraint: false,
        ..Default::default()
    };
    let mut details = Vec::new();
    let mut pass = true;
    for fam in closure_families() {
        let d = fam.min_dim();
        let model = Model::new(Metric::euclidean(d), random_params(&mut r, d)).unwrap();
        let (n, f) = run_families(&model, &[fam], &opts);
        pass &= f.is_empty();
        details.push(format!("{}@d={d}: {n} ambient", fam.name()));
        if !f.is_empty() {
            details.push(format!("failures {f:?}"));
        }
    }
    Outcome {
        pass,
        detail: details.join(", "),
    }
}

fn independence(dim: usize, signatures: &[Metric], seed: u64) -> (bool, String) {
    let p = random_params(&mut rng(seed), dim);
    let rep = verify_metric_independence(dim, &p, signatures, &Family::ALL).unwrap();
    (
        rep.pass,
        format!(
            "d={dim}: {} signatures, {} relations, linear relation equal: {}, failures {:?}",
            rep.signatures.len(),
            rep.relations_checked,
            rep.linear_coefficients_equal,
            rep.failures
        ),
    )
}

fn criterion3() -> Outcome {
    let (p3, d3) = independence(3, &Metric::all_patterns(3), 3);
    let (p4, d4) = independence(4, &[metric(&[1, 1, 1, 1]), metric(&[1, 1, -1, -1])], 4);
    Outcome {
        pass: p3 && p4,
        detail: format!("{d3}; {d4}"),
    }
}

fn criterion4() -> Outcome {
    let mut r = rng(5);
    let mut pass = true;
    let mut details = Vec::new();
    for fam in closure_families() {
        let d = fam.min_dim();
        let p = random_params(&mut r, d);
        let metrics = Metric::all_patterns(d);
        let failures: Vec<String> = metrics
            .par_iter()
            .flat_map_iter(|m| {
                let cm = ClassicalModel::new(m.clone(), p.clone()).unwrap();
                all_tuples(fam, d)
                    .into_iter()
                    .filter_map(|idx| {
                        let rep = verify_classical_relation(&RelationId::new(fam, idx), &cm, Default::default()).unwrap();
                        (!rep.pass).then(|| format!("{} on {}", rep.relation_id, rep.signature))
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
        pass &= failures.is_empty();
        details.push(format!("{}@d={d}x{}", fam.name(), metrics.len()));
        if !failures.is_empty() {
            details.push(format!("failures {failures:?}"));
        }
    }
    let model = Model::new(Metric::euclidean(3), random_params(&mut r, 3)).unwrap();
    let mut signs = BTreeSet::new();
    let mut undetermined = Vec::new();
    for (x, y) in bracket_pairs(3) {
        let c = correspondence_check(&model, &x, &y).unwrap();
        match (c.both_zero, c.sign) {
            (true, _) => {}
            (false, Some(s)) => {
                signs.insert(s);
            }
            (false, None) => undetermined.push(c.pair),
        }
    }
    pass &= signs.len() == 1 && undetermined.is_empty();
    details.push(format!("correspondence signs {signs:?}"));
    Outcome {
        pass,
        detail: details.join(", "),
    }
}

fn criterion5() -> Outcome {
    let mut r = rng(6);
    let mut sets: Vec<ModelParams> = (0..5).map(|_| random_params(&mut r, 3)).collect();
    sets.push(ModelParams::from_a(vec![Rational::new(1, 4); 3]));
    let metrics = [Metric::euclidean(3), metric(&[1, 1, -1])];
    let jobs: Vec<(Metric, ModelParams)> = metrics
        .iter()
        .flat_map(|m| sets.iter().map(move |p| (m.clone(), p.clone())))
        .collect();
    let failures: Vec<String> = jobs
        .par_iter()
        .filter_map(|(m, p)| {
            let k = structure_constants(p).unwrap();
            let d = check_daskaloyannis_with(m, p, &k).unwrap();
            let c = verify_casimir(m, p).unwrap();
            (!(d.pass && c.pass)).then(|| format!("{} {}: {d:?} {c:?}", m.label(), p.label()))
        })
        .collect();
    Outcome {
        pass: failures.is_empty(),
        detail: format!(
            "{} (metric, a) pairs: [A,B]=C, [A,C], [B,C], Q23 reconstruction, K_gen = K(h), [K,A] = [K,B] = 0; failures {failures:?}",
            jobs.len()
        ),
    }
}

fn lin(c: [i64; 4]) -> LinForm {
    LinForm(c.map(Rational::from_int))
}

fn criterion6() -> Outcome {
    let mut pass = LEADING_COEFF == 256 * INTERMEDIATE_FACTOR;
    let mut notes = vec![format!("{LEADING_COEFF} = 256 x {INTERMEDIATE_FACTOR}: {pass}")];

    // leading behaviour: Φ(x)/x^8 → leading coefficient
    let p = ModelParams::from_l(vec![Rational::new(3, 2), Rational::new(2, 3), Rational::new(5, 4)]);
    let big = Rational::from_int(10i64.pow(9));
    let ratio = structure_function_eval(&big, &Rational::new(7, 2), &p).unwrap() / big.pow(8);
    let rel = ((ratio - Rational::from_int(LEADING_COEFF)) / Rational::from_int(LEADING_COEFF)).abs();
    let leading_ok = rel < Rational::new(1, 1_000_000);
    pass &= leading_ok;
    notes.push(format!("Φ(x)/x^8 at x=1e9 within 1e-6: {leading_ok}"));

    let mut r = rng(7);
    let mut u_ok = true;
    for _ in 0..20 {
        let l: Vec<Rational> = (0..3).map(|_| Rational::new(r.gen_range(0..=20), r.gen_range(1..=6))).collect();
        let p = ModelParams::from_l(l);
        let et = random_rational(&mut r);
        for s in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
            let u = rep_parameter_u(s, &p).unwrap();
            u_ok &= structure_function_eval(&u, &et, &p).unwrap().is_zero();
        }
    }
    pass &= u_ok;
    notes.push(format!("Φ(u)=0 for all (ε1,ε2), 20 random m: {u_ok}"));

    // Ẽ forced by Φ(u+p+1) = 0, solved over indeterminate m_i and Ẽ
    let mut forced = true;
    let mut reference_relabelled = true;
    for p in 0..6u32 {
        for (e1, e2) in [(1i64, 1i64), (1, -1), (-1, 1), (-1, -1)] {
            let sols = etilde_solutions((e1 as i8, e2 as i8), p);
            let c0 = 4 * (p as i64 + 1);
            for e3 in [1i64, -1] {
                forced &= sols.contains(&lin([c0, e1, e2, e3]));
                // the reference expression with the opposite labelling of ε
                let flipped = etilde_solutions((-e1 as i8, -e2 as i8), p);
                reference_relabelled &= flipped.contains(&lin([c0, -e1, -e2, -e3]));
            }
        }
    }
    pass &= forced && reference_relabelled;
    notes.push(format!(
        "Ẽ = 4(p+1)+ε1m1+ε2m2+ε3m3 forced: {forced}; 4(p+1)-ε3m3-ε2m2-ε1m1 under u=(2-ε1m1-ε2m2)/4: {reference_relabelled}"
    ));
    Outcome {
        pass,
        detail: notes.join("; "),
    }
}

fn algebraic(params: &ModelParams, signs: [i8; 3], flip: bool, max_p: u32) -> Vec<(Rational, u32)> {
    find_spectrum(params, max_p, SignMode::Fixed(signs))
        .unwrap()
        .into_iter()
        .map(|r| (if flip { -r.energy } else { r.energy }, r.degeneracy))
        .collect()
}

fn analytic(surface: Surface, l: &[Rational; 3], n: usize) -> Vec<(Rational, u32)> {
    analytic_spectrum(surface, l, n)
        .into_iter()
        .map(|v| (v.energy, v.degeneracy as u32))
        .collect()
}

fn criterion7() -> Outcome {
    let mut r = rng(8);
    let mut mismatches = Vec::new();
    let trials = 25;
    for _ in 0..trials {
        let d = r.gen_range(1..=4);
        let l1 = Rational::new(r.gen_range(0..=8), d);
        let l2 = Rational::new(r.gen_range(0..=8), 2 * d);
        let l3 = &l1 + &l2 + Rational::from_int(2) + Rational::new(r.gen_range(1..=40), d);
        let l = [l1, l2, l3];
        let p = ModelParams::from_l(l.to_vec());
        let max_p = 25;
        let h2 = analytic(Surface::H2, &l, max_p as usize + 1);
        if algebraic(&p, [1, 1, -1], false, max_p) != h2 {
            mismatches.push(format!("h2 {l:?}"));
        }
        let s2 = analytic(Surface::S2, &l, 6);
        if algebraic(&p, [1, 1, 1], true, 5) != s2 {
            mismatches.push(format!("s2 {l:?}"));
        }
    }
    let q = |n: i64| Rational::from_int(n);
    let ex_h2 = algebraic(&ModelParams::from_l(rl([(1, 2), (1, 2), (13, 2)]).to_vec()), [1, 1, -1], false, 8);
    let ex_s2 = algebraic(&ModelParams::from_l(rl([(1, 2), (1, 2), (1, 2)]).to_vec()), [1, 1, 1], true, 0);
    let examples = ex_h2 == vec![(q(-12), 1), (q(-2), 2)] && ex_s2 == vec![(q(12), 1)];

    let h2m = match_spectrum_to_signature(&metric(&[1, 1, -1]), &ModelParams::from_l(rl([(1, 2), (1, 2), (13, 2)]).to_vec()), 8).unwrap();
    let s2m = match_spectrum_to_signature(&Metric::euclidean(3), &ModelParams::from_l(rl([(1, 2), (1, 2), (1, 2)]).to_vec()), 4).unwrap();
    let matched = h2m.unique
        && h2m.matches[0] == PatternMatch { signs: [1, 1, -1], global_sign: 1 }
        && s2m.unique
        && s2m.matches[0] == PatternMatch { signs: [1, 1, 1], global_sign: -1 };
    Outcome {
        pass: mismatches.is_empty() && examples && matched,
        detail: format!(
            "{trials} random l (H² pattern +,+,-; S² pattern +,+,+ with E -> -E): mismatches {mismatches:?}; \
             worked examples {ex_h2:?} / {ex_s2:?}; unique signature matches: {matched}"
        ),
    }
}

fn orders() -> Vec<(String, Option<f64>)> {
    let grid = GridSpec::default();
    let free = SLProblem::new(0.0, FRAC_PI_2, Endpoint::Regular, Endpoint::Regular, |_| 0.0).labeled("free");
    let ang = angular_problem(0.5, 0.5);
    let lambda0 = solve_sturm_liouville(&ang, &grid, 1).unwrap()[0].value;
    let radial = h2_radial_problem(lambda0, 6.5, 24.0);
    [free, ang, radial]
        .iter()
        .map(|p| (p.label.clone(), solve_sturm_liouville(p, &grid, 1).unwrap()[0].order))
        .collect()
}

fn numerical(surface: Surface, sets: &[[Rational; 3]], levels: usize) -> (bool, String) {
    let grid = GridSpec::default();
    let mut pass = true;
    let mut notes = Vec::new();
    for l in sets {
        let exact = analytic_spectrum(surface, l, levels);
        let num = pde_spectrum(surface, l, levels, &grid).unwrap();
        let mut worst: f64 = 0.0;
        let ok = exact.len() == num.levels.len()
            && exact.iter().zip(&num.levels).all(|(a, b)| {
                let e = a.energy.to_f64();
                let rel = (b.energy - e).abs() / e.abs();
                worst = worst.max(rel);
                a.p == b.p && a.degeneracy == b.degeneracy && rel < 1e-3
            })
            && num.states.iter().all(|s| surface == Surface::S2 || s.energy < 0.25);
        pass &= ok;
        notes.push(format!("{} l={:?}: {} levels, worst rel {:.1e}", surface.name(), l.clone().map(|x| x.to_string()), exact.len(), worst));
    }
    (pass, notes.join(", "))
}

fn criterion8() -> Outcome {
    let ord = orders();
    let orders_ok = ord.iter().all(|(_, o)| o.map_or(false, |o| o >= 2.0 - 1e-3));
    let t = Instant::now();
    let (h2, dh2) = numerical(
        Surface::H2,
        &[rl([(1, 2), (1, 2), (13, 2)]), rl([(1, 1), (3, 2), (10, 1)]), rl([(3, 4), (1, 2), (9, 1)])],
        6,
    );
    let th2 = t.elapsed().as_secs_f64();
    let t = Instant::now();
    let (s2, ds2) = numerical(
        Surface::S2,
        &[rl([(1, 2), (1, 2), (1, 2)]), rl([(1, 1), (1, 2), (3, 2)]), rl([(3, 4), (5, 4), (1, 1)])],
        3,
    );
    let ts2 = t.elapsed().as_secs_f64();
    Outcome {
        pass: h2 && s2 && orders_ok && th2 < 120.0 && ts2 < 120.0,
        detail: format!(
            "orders {:?}; {dh2} ({th2:.1}s); {ds2} ({ts2:.1}s)",
            ord.iter().map(|(n, o)| format!("{n}={:.6}", o.unwrap_or(f64::NAN))).collect::<Vec<_>>()
        ),
    }
}

fn criterion9() -> Outcome {
    let mut pass = true;
    let mut notes = Vec::new();
    for (d, metrics) in [
        (4, vec![metric(&[1, 1, 1, 1]), metric(&[1, -1, 1, -1]), metric(&[-1, -1, -1, -1])]),
        (5, vec![metric(&[1, 1, 1, 1, 1]), metric(&[1, 1, -1, -1, -1])]),
        (6, vec![metric(&[1, 1, 1, 1, 1, 1]), metric(&[1, 1, 1, -1, -1, -1])]),
    ] {
        let o = symmetry_everywhere(d, &metrics, 1, 90 + d as u64);
        pass &= o.pass;
        notes.push(o.detail);
        let (p, detail) = independence(d, &metrics, 95 + d as u64);
        pass &= p;
        notes.push(detail);
    }
    Outcome {
        pass,
        detail: notes.join("; "),
    }
}

#[test]
fn acceptance() {
    let results = [
        report(1, "[H,Q_ij] = 0 on all d=3 signatures", criterion1),
        report(2, "closure families with formal ħ at minimal dimensions", criterion2),
        report(3, "metric independence at d=3 and d=4", criterion3),
        report(4, "classical relations and correspondence sign", criterion4),
        report(5, "structure-constant form and Casimir", criterion5),
        report(6, "structure function", criterion6),
        report(7, "algebraic spectra against separation of variables", criterion7),
        report(8, "finite-difference spectra", criterion8),
        report(9, "criteria 1-3 up to d=6", criterion9),
    ];
    let failed: Vec<usize> = results.iter().enumerate().filter(|(_, p)| !**p).map(|(i, _)| i + 1).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
