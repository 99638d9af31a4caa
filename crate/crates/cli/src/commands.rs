use std::collections::BTreeMap;
use std::io::Write;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use dualgeo::eguchi::SymmetryRow;
use dualgeo::manifold::{info_for, BUILTIN_NAMES};
use dualgeo::parse::{grid_points, parse_grid, parse_point, parse_point_list};
use dualgeo::sampling::{rng_from_seed, sample_near, sample_point};
use dualgeo::verify::{run_suite, Suite, VerificationReport, VerifyOptions, DEFAULT_MODELS};
use dualgeo::{divergence, symmetry_probe, DivergenceKind, ManifoldModel, Point, ToleranceConfig};
use rayon::prelude::*;
use serde::Serialize;

use crate::args::{Coords, DivArgs, ListFormat, ModelArgs, ProbeArgs, SweepArgs, VerifyArgs};
use crate::output::{indexed, num, open, opt_num, Table};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILED: u8 = 1;
pub const EXIT_NOT_CONVERGED: u8 = 3;

pub const MIN_PROBE_SAMPLES: usize = 10;

fn build_model(spec: &str) -> Result<ManifoldModel> {
    spec.parse::<ManifoldModel>().with_context(|| format!("model '{spec}'"))
}

fn to_point(model: &ManifoldModel, coords: Coords, raw: Vec<f64>) -> dualgeo::Result<Point> {
    match coords {
        Coords::Natural => {
            let p = Point::new(raw);
            model.check_point(&p)?;
            Ok(p)
        }
        Coords::Mixture => model.point_from_mixture(&raw),
    }
}

fn points(model: &ManifoldModel, args: &ModelArgs, list: &str) -> Result<Vec<Point>> {
    parse_point_list(list)?
        .into_iter()
        .map(|raw| to_point(model, args.coords, raw).map_err(Into::into))
        .collect()
}

fn quadrature_nodes(kind: DivergenceKind, cfg: &ToleranceConfig) -> usize {
    match kind {
        DivergenceKind::Ay | DivergenceKind::Canonical | DivergenceKind::CanonicalDual => cfg.quad_nodes,
        DivergenceKind::PseudoNorm | DivergenceKind::OracleKL => 0,
    }
}

fn require_oracle(model: &ManifoldModel, kinds: &[DivergenceKind]) -> Result<()> {
    if kinds.contains(&DivergenceKind::OracleKL) && !model.has_oracle() {
        bail!(dualgeo::Error::OracleUnavailable(model.spec_string()));
    }
    Ok(())
}

pub fn models(format: ListFormat) -> Result<u8> {
    let infos: Vec<_> = BUILTIN_NAMES.iter().map(|n| info_for(n)).collect();
    let mut out = open(None)?;
    match format {
        ListFormat::Json => {
            serde_json::to_writer_pretty(&mut out, &infos)?;
            writeln!(out)?;
        }
        ListFormat::Text => {
            for i in &infos {
                writeln!(out, "{}", i.name)?;
                writeln!(out, "  params:    {}", i.params)?;
                writeln!(out, "  chart:     {}", i.chart)?;
                writeln!(out, "  domain:    {}", i.domain)?;
                writeln!(out, "  structure: {}", i.structure)?;
            }
        }
    }
    out.flush()?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct DivRecord<'a> {
    kind: &'static str,
    p: &'a [f64],
    q: &'a [f64],
    value: Option<f64>,
    quad_nodes: usize,
    converged: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

pub fn div(args: &DivArgs) -> Result<u8> {
    let model = build_model(&args.model.model)?;
    let cfg = args.tol.config()?;
    require_oracle(&model, &[args.kind])?;
    let ps = points(&model, &args.model, &args.p).context("-p")?;
    let qs = points(&model, &args.model, &args.q).context("-q")?;
    let pairs: Vec<(&Point, &Point)> = match (ps.len(), qs.len()) {
        (1, _) => qs.iter().map(|q| (&ps[0], q)).collect(),
        (a, b) if a == b => ps.iter().zip(&qs).collect(),
        (a, b) => bail!("-p has {a} points but -q has {b}"),
    };
    let results: Vec<dualgeo::Result<f64>> =
        pairs.par_iter().map(|(p, q)| divergence(&model, args.kind, p, q, &cfg)).collect();

    let n = model.dim();
    let header: Vec<String> = ["kind".to_string()]
        .into_iter()
        .chain(indexed("p", n))
        .chain(indexed("q", n))
        .chain(["value", "quad_nodes", "converged", "error"].map(String::from))
        .collect();
    let mut table = Table::new(args.out.format, open(args.out.output.as_deref())?, &header)?;
    let nodes = quadrature_nodes(args.kind, &cfg);
    let mut failed = 0;
    for ((p, q), res) in pairs.iter().zip(results) {
        let (value, error) = match res {
            Ok(v) => (Some(v), None),
            Err(e) => (None, Some(e.to_string())),
        };
        failed += usize::from(value.is_none());
        let rec = DivRecord {
            kind: args.kind.as_str(),
            p: &p.coords,
            q: &q.coords,
            value,
            quad_nodes: nodes,
            converged: value.is_some(),
            error,
        };
        table.row(
            || {
                let mut c = vec![rec.kind.to_string()];
                c.extend(rec.p.iter().copied().map(num));
                c.extend(rec.q.iter().copied().map(num));
                c.push(opt_num(rec.value));
                c.push(rec.quad_nodes.to_string());
                c.push(rec.converged.to_string());
                c.push(rec.error.clone().unwrap_or_default());
                c
            },
            &rec,
        )?;
    }
    table.finish()?;
    if failed > 0 {
        eprintln!("{failed} of {} pairs did not converge", pairs.len());
        return Ok(EXIT_NOT_CONVERGED);
    }
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct VerifySummary {
    suite: Suite,
    seed: u64,
    pass: bool,
    reports: Vec<VerificationReport>,
}

pub fn verify(args: &VerifyArgs) -> Result<u8> {
    let cfg = args.tol.config()?;
    let opts = VerifyOptions { seed: args.seed, samples: args.samples, cfg };
    let specs: Vec<&str> = match &args.model {
        Some(m) => vec![m.as_str()],
        None => DEFAULT_MODELS.to_vec(),
    };
    let models = specs.iter().map(|s| build_model(s)).collect::<Result<Vec<_>>>()?;
    let mut reports = Vec::with_capacity(models.len());
    for model in &models {
        let start = Instant::now();
        let mut report = run_suite(model, args.suite, &opts)?;
        if args.timing {
            report.duration_seconds = Some(start.elapsed().as_secs_f64());
        }
        reports.push(report);
    }
    let pass = reports.iter().all(|r| r.pass);
    let mut out = open(args.output.as_deref())?;
    if args.model.is_some() {
        serde_json::to_writer_pretty(&mut out, &reports[0])?;
    } else {
        let summary = VerifySummary { suite: args.suite, seed: args.seed, pass, reports };
        serde_json::to_writer_pretty(&mut out, &summary)?;
    }
    writeln!(out)?;
    out.flush()?;
    Ok(if pass { EXIT_OK } else { EXIT_FAILED })
}

#[derive(Serialize)]
struct SweepRecord<'a> {
    q: &'a [f64],
    values: BTreeMap<&'static str, Option<f64>>,
    converged: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

pub fn sweep(args: &SweepArgs) -> Result<u8> {
    let model = build_model(&args.model.model)?;
    let cfg = args.tol.config()?;
    require_oracle(&model, &args.kind)?;
    if args.kind.is_empty() {
        bail!("no divergence kind requested");
    }
    let p = to_point(&model, args.model.coords, parse_point(&args.p)?).context("-p")?;
    let axes = parse_grid(&args.grid, model.dim())?;
    let raw = grid_points(&axes);

    let rows: Vec<(Vec<f64>, Vec<Option<f64>>, Option<String>)> = raw
        .into_par_iter()
        .map(|coords| match to_point(&model, args.model.coords, coords.clone()) {
            Err(e) => (coords, vec![None; args.kind.len()], Some(e.to_string())),
            Ok(q) => {
                let mut err = None;
                let values = args
                    .kind
                    .iter()
                    .map(|&k| match divergence(&model, k, &p, &q, &cfg) {
                        Ok(v) => Some(v),
                        Err(e) => {
                            err.get_or_insert_with(|| e.to_string());
                            None
                        }
                    })
                    .collect();
                (coords, values, err)
            }
        })
        .collect();

    let header: Vec<String> = indexed("q", model.dim())
        .chain(args.kind.iter().map(|k| k.as_str().to_string()))
        .chain(["converged", "error"].map(String::from))
        .collect();
    let mut table = Table::new(args.out.format, open(args.out.output.as_deref())?, &header)?;
    let mut flagged = 0;
    for (coords, values, error) in rows {
        let converged = error.is_none();
        flagged += usize::from(!converged);
        let rec = SweepRecord {
            q: &coords,
            values: args.kind.iter().map(|k| k.as_str()).zip(values.iter().copied()).collect(),
            converged,
            error,
        };
        table.row(
            || {
                let mut c: Vec<String> = coords.iter().copied().map(num).collect();
                c.extend(values.iter().copied().map(opt_num));
                c.push(converged.to_string());
                c.push(rec.error.clone().unwrap_or_default());
                c
            },
            &rec,
        )?;
    }
    table.finish()?;
    if flagged > 0 {
        eprintln!("{flagged} grid points flagged");
    }
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct ProbeSummary {
    p: Vec<f64>,
    samples: usize,
    skipped: usize,
    rank_agreement: f64,
    max_relative_gap: f64,
    equality_holds: Option<bool>,
    passed: bool,
}

pub fn probe_f(args: &ProbeArgs) -> Result<u8> {
    let model = build_model(&args.model.model)?;
    let cfg = args.tol.config()?;
    if args.samples < MIN_PROBE_SAMPLES {
        bail!("probe-f needs at least {MIN_PROBE_SAMPLES} samples, got {}", args.samples);
    }
    let mut rng = rng_from_seed(args.seed);
    let p = match &args.p {
        Some(s) => to_point(&model, args.model.coords, parse_point(s)?).context("-p")?,
        None => sample_point(&model, &mut rng),
    };
    let qs: Vec<Point> = (0..args.samples).map(|_| sample_near(&model, &p, &mut rng)).collect();
    let probe = symmetry_probe(&model, &p, &qs, &cfg)?;

    let header: Vec<String> = indexed("q", model.dim())
        .chain(["dual_forward", "primal_reverse", "converged"].map(String::from))
        .collect();
    let mut table = Table::new(args.out.format, open(args.out.output.as_deref())?, &header)?;
    for row in &probe.rows {
        table.row(|| probe_cells(row), row)?;
    }
    let summary = ProbeSummary {
        p: p.coords.clone(),
        samples: probe.rows.len(),
        skipped: probe.skipped,
        rank_agreement: probe.rank_agreement,
        max_relative_gap: probe.max_relative_gap,
        equality_holds: probe.equality_holds,
        passed: probe.passed,
    };
    table.json_line(&serde_json::json!({ "summary": summary }))?;
    table.finish()?;
    eprintln!(
        "rank agreement {} over {} rows ({} skipped), max relative gap {:e}, {}",
        summary.rank_agreement,
        summary.samples,
        summary.skipped,
        summary.max_relative_gap,
        if summary.passed { "pass" } else { "fail" }
    );
    Ok(if probe.passed { EXIT_OK } else { EXIT_FAILED })
}

fn probe_cells(row: &SymmetryRow) -> Vec<String> {
    let mut c: Vec<String> = row.q.iter().copied().map(num).collect();
    c.push(opt_num(row.dual_forward));
    c.push(opt_num(row.primal_reverse));
    c.push(row.converged.to_string());
    c
}
