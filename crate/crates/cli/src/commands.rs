use std::collections::BTreeSet;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use superint_core::laurent::Metric;
use superint_core::model::{all_tuples, verify_relation, Family, Model, ModelParams, RelationId, RelationReport};
use superint_core::phase::{bracket_pairs, correspondence_check, verify_classical_relation, ClassicalModel, ClassicalReport};
use superint_core::racah3::{find_representations, find_spectrum, match_spectrum_to_signature, RepSolution, SignMode};
use superint_core::specsolver::{analytic_spectrum, pde_spectrum, GridSpec, Surface};
use superint_core::Rational;

use crate::manifest::Manifest;
use crate::{CliError, CrossArgs, ManifestArgs, PdeArgs, SpectrumArgs};

const TOOL: &str = "superint";
const VERSION: &str = env!("CARGO_PKG_VERSION");

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => {
            let mut so = std::io::stdout().lock();
            so.write_all(text.as_bytes())?;
            so.flush()?;
        }
    }
    Ok(())
}

fn json_text(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

pub fn parse_l(s: &str) -> Result<[Rational; 3], CliError> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(CliError::Usage(format!("--l needs three comma-separated values, got {s:?}")));
    }
    let mut out = Vec::with_capacity(3);
    for p in parts {
        let v: Rational = p
            .parse()
            .map_err(|e| CliError::Usage(format!("--l: {e}")))?;
        out.push(v);
    }
    Ok(out.try_into().expect("three values"))
}

pub fn parse_signs(s: &str) -> Result<SignMode, CliError> {
    match s {
        "all" => return Ok(SignMode::All),
        "h2" => return Ok(SignMode::Fixed([1, 1, -1])),
        "s2" => return Ok(SignMode::Fixed([1, 1, 1])),
        _ => {}
    }
    let signs: Vec<i8> = s
        .split(',')
        .map(|t| match t.trim() {
            "+" | "+1" | "1" => Ok(1),
            "-" | "-1" => Ok(-1),
            other => Err(CliError::Usage(format!("--signs: bad sign {other:?}"))),
        })
        .collect::<Result<_, _>>()?;
    let signs: [i8; 3] = signs
        .try_into()
        .map_err(|_| CliError::Usage(format!("--signs needs three signs, got {s:?}")))?;
    Ok(SignMode::Fixed(signs))
}

fn sign_char(s: i8) -> &'static str {
    if s > 0 {
        "+"
    } else {
        "-"
    }
}

#[derive(Serialize)]
struct Summary {
    jobs: usize,
    passed: usize,
    failed: usize,
}

fn jobs(manifest: &Manifest) -> Result<Vec<(Metric, ModelParams, RelationId)>, CliError> {
    let mut out = Vec::new();
    for metric in manifest.metrics()? {
        for params in &manifest.params {
            for &family in &manifest.relations {
                for idx in all_tuples(family, manifest.dim) {
                    out.push((metric.clone(), params.clone(), RelationId::new(family, idx)));
                }
            }
        }
    }
    Ok(out)
}

pub fn verify_algebra(args: &ManifestArgs) -> Result<bool, CliError> {
    let manifest = Manifest::load(args.manifest.as_deref())?;
    let opts = manifest.options.verify_options();
    let todo = jobs(&manifest)?;
    let records: Vec<RelationReport> = todo
        .par_iter()
        .map(|(metric, params, id)| {
            let model = Model::new(metric.clone(), params.clone())?;
            verify_relation(id, &model, &opts)
        })
        .collect::<Result<_, _>>()?;
    let passed = records.iter().filter(|r| r.pass).count();
    let ok = passed == records.len();
    for r in records.iter().filter(|r| !r.pass) {
        eprintln!("FAIL {} on {} with {}", r.relation_id, r.signature, r.params.label());
    }
    let report = json!({
        "tool": TOOL,
        "version": VERSION,
        "command": "verify-algebra",
        "options": manifest.options,
        "records": records,
        "summary": Summary { jobs: records.len(), passed, failed: records.len() - passed },
        "exit_status": if ok { 0 } else { 1 },
    });
    emit(args.out.as_deref(), &json_text(&report))?;
    Ok(ok)
}

#[derive(Serialize)]
struct Correspondence {
    signature: String,
    params: ModelParams,
    pairs: usize,
    measured: usize,
    signs: Vec<i32>,
    /// Every measured pair agrees on one sign.
    consistent: bool,
}

pub fn classical_check(args: &ManifestArgs) -> Result<bool, CliError> {
    let manifest = Manifest::load(args.manifest.as_deref())?;
    let form = manifest.options.form;
    let skipped: Vec<Family> = manifest
        .relations
        .iter()
        .copied()
        .filter(|f| f.relation(form, true, &all_tuples(*f, manifest.dim)[0]).is_none())
        .collect();
    let todo: Vec<_> = jobs(&manifest)?
        .into_iter()
        .filter(|(_, _, id)| !skipped.contains(&id.family))
        .collect();
    let records: Vec<ClassicalReport> = todo
        .par_iter()
        .map(|(metric, params, id)| {
            let cm = ClassicalModel::new(metric.clone(), params.clone())?;
            verify_classical_relation(id, &cm, form)
        })
        .collect::<Result<_, _>>()?;

    let pairs = bracket_pairs(manifest.dim);
    let mut cases = Vec::new();
    for metric in manifest.metrics()? {
        for params in &manifest.params {
            cases.push((metric.clone(), params.clone()));
        }
    }
    let correspondence: Vec<Correspondence> = cases
        .par_iter()
        .map(|(metric, params)| {
            let model = Model::new(metric.clone(), params.clone())?;
            let mut signs = BTreeSet::new();
            let mut measured = 0;
            for (x, y) in &pairs {
                if let Some(s) = correspondence_check(&model, x, y)?.sign {
                    signs.insert(s);
                    measured += 1;
                }
            }
            Ok(Correspondence {
                signature: metric.label(),
                params: params.clone(),
                pairs: pairs.len(),
                measured,
                consistent: signs.len() == 1,
                signs: signs.into_iter().collect(),
            })
        })
        .collect::<Result<_, superint_core::Error>>()?;

    let passed = records.iter().filter(|r| r.pass).count();
    let consistent = correspondence.iter().all(|c| c.consistent);
    let ok = passed == records.len() && consistent;
    for r in records.iter().filter(|r| !r.pass) {
        eprintln!("FAIL {} on {}", r.relation_id, r.signature);
    }
    let report = json!({
        "tool": TOOL,
        "version": VERSION,
        "command": "classical-check",
        "form": form,
        "skipped_families": skipped,
        "records": records,
        "correspondence": correspondence,
        "summary": Summary { jobs: records.len(), passed, failed: records.len() - passed },
        "exit_status": if ok { 0 } else { 1 },
    });
    emit(args.out.as_deref(), &json_text(&report))?;
    Ok(ok)
}

fn spectrum_csv(rows: &[RepSolution]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "epsilon1",
        "epsilon2",
        "epsilon3",
        "p",
        "E",
        "degeneracy",
        "certified",
        "bound_state",
        "u",
        "Etilde",
    ])
    .map_err(csv_err)?;
    for r in rows {
        w.write_record([
            sign_char(r.signs[0]).to_string(),
            sign_char(r.signs[1]).to_string(),
            sign_char(r.signs[2]).to_string(),
            r.p.to_string(),
            r.energy.to_ratio_string(),
            r.degeneracy.to_string(),
            r.certified.to_string(),
            r.bound_state.to_string(),
            r.u.to_ratio_string(),
            r.etilde.to_ratio_string(),
        ])
        .map_err(csv_err)?;
    }
    finish_csv(w)
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Io(std::io::Error::other(e))
}

fn finish_csv(w: csv::Writer<Vec<u8>>) -> Result<String, CliError> {
    let bytes = w.into_inner().map_err(|e| CliError::Io(std::io::Error::other(e.to_string())))?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}

pub fn racah_spectrum(args: &SpectrumArgs) -> Result<bool, CliError> {
    let l = parse_l(&args.l)?;
    let mode = parse_signs(&args.signs)?;
    let params = ModelParams::from_l(l.to_vec());
    let rows = if args.all_reps {
        find_representations(&params, args.max_p, mode)?
    } else {
        find_spectrum(&params, args.max_p, mode)?
    };
    let text = match args.format.as_str() {
        "json" => json_text(&json!({
            "tool": TOOL,
            "version": VERSION,
            "command": "racah-spectrum",
            "l": l,
            "signs": args.signs,
            "max_p": args.max_p,
            "all_reps": args.all_reps,
            "rows": rows,
        })),
        _ => spectrum_csv(&rows)?,
    };
    emit(args.out.as_deref(), &text)?;
    Ok(true)
}

pub fn pde_check(args: &PdeArgs) -> Result<bool, CliError> {
    let surface: Surface = args.surface.parse()?;
    let l = parse_l(&args.l)?;
    let grid = GridSpec {
        levels: args.refinements,
        ..GridSpec::with_nodes(args.grid)
    };
    grid.validate()?;
    let exact = analytic_spectrum(surface, &l, args.levels);
    let num = match pde_spectrum(surface, &l, args.levels, &grid) {
        Err(e @ superint_core::Error::NonConvergence(_)) => {
            eprintln!("superint: {e}");
            return Ok(false);
        }
        r => r?,
    };

    let mut ok = exact.len() == num.levels.len();
    if !ok {
        eprintln!(
            "level count differs: {} analytic, {} numerical",
            exact.len(),
            num.levels.len()
        );
    }
    for (a, b) in exact.iter().zip(&num.levels) {
        let e = a.energy.to_f64();
        let rel = (b.energy - e).abs() / e.abs().max(1.0);
        if a.p != b.p || a.degeneracy != b.degeneracy || rel > args.tol {
            eprintln!(
                "P={}: analytic {} (x{}), numerical {:.9} (x{}), rel {:.2e}",
                a.p, a.energy, a.degeneracy, b.energy, b.degeneracy, rel
            );
            ok = false;
        }
    }

    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "surface",
        "l1",
        "l2",
        "l3",
        "n",
        "m",
        "P",
        "E",
        "degeneracy",
        "method",
        "grid",
        "residual_drift",
    ])
    .map_err(csv_err)?;
    let head = |n: u32, m: u32, p: u32| {
        vec![
            surface.name().to_string(),
            l[0].to_string(),
            l[1].to_string(),
            l[2].to_string(),
            n.to_string(),
            m.to_string(),
            p.to_string(),
        ]
    };
    for lv in &exact {
        for &(n, m) in &lv.states {
            let mut rec = head(n, m, lv.p);
            rec.extend([
                lv.energy.to_ratio_string(),
                lv.degeneracy.to_string(),
                "analytic".into(),
                String::new(),
                String::new(),
            ]);
            w.write_record(&rec).map_err(csv_err)?;
        }
    }
    for s in &num.states {
        let deg = num.levels.iter().find(|lv| lv.p == s.p).map_or(0, |lv| lv.degeneracy);
        let mut rec = head(s.n, s.m, s.p);
        rec.extend([
            format!("{:.12}", s.energy),
            deg.to_string(),
            "finite-difference".into(),
            args.grid.to_string(),
            format!("{:.3e}", s.drift),
        ]);
        w.write_record(&rec).map_err(csv_err)?;
    }
    emit(args.out.as_deref(), &finish_csv(w)?)?;
    Ok(ok)
}

pub fn cross_check(args: &CrossArgs) -> Result<bool, CliError> {
    let l = parse_l(&args.l)?;
    let metric = Metric::parse_label(&args.signature).map_err(|e| CliError::Usage(format!("--signature: {e}")))?;
    let params = ModelParams::from_l(l.to_vec());
    let rep = match_spectrum_to_signature(&metric, &params, args.max_p)?;
    let ok = !rep.matches.is_empty();
    let named: Vec<String> = rep
        .matches
        .iter()
        .map(|m| {
            format!(
                "({},{},{}) global {}",
                sign_char(m.signs[0]),
                sign_char(m.signs[1]),
                sign_char(m.signs[2]),
                sign_char(m.global_sign)
            )
        })
        .collect();
    let report = json!({
        "tool": TOOL,
        "version": VERSION,
        "command": "cross-check",
        "l": l,
        "report": rep,
        "patterns": named,
        "exit_status": if ok { 0 } else { 1 },
    });
    emit(args.out.as_deref(), &json_text(&report))?;
    Ok(ok)
}
