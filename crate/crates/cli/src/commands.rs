//! Command implementations.

use std::path::Path;

use besselkit_core::experiments::{run_experiment, ExperimentParams, TheoremTag};
use besselkit_core::interpolation::{k2_envelope_p2, ExactL1Linf, KCurve, KFunctional, NumericK, SolverOptions};
use besselkit_core::norms::decreasing_rearrangement;
use besselkit_core::potentials::{bessel_potential, fractional_gradient, gradient, riesz_potential, riesz_transform};
use besselkit_core::{synthesize, Error, GridFunction, MultiplierOrder, NormCouple, Result};

use crate::config::{default_ensemble_size, ExperimentSection, Format, RunConfig};
use crate::output::{emit, Cell, Table};
use crate::suite::standard_suite;
use crate::{Command, ExperimentArgs, InputArgs, Outcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Operator {
    Bessel,
    Riesz,
    RieszTransform,
    Fracgrad,
    Gradient,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum CoupleName {
    #[value(name = "L1-Linf")]
    L1Linf,
    #[value(name = "Lp-W1p")]
    LpW1p,
    #[value(name = "L2-Hs2")]
    L2Hs2,
}

pub fn dispatch(command: Command, mut cfg: RunConfig) -> Result<Outcome> {
    match command {
        Command::Norm { input, spaces } => {
            merge_input(&mut cfg, &input);
            if !spaces.is_empty() {
                cfg.spaces = spaces;
            }
            cmd_norm(&cfg)
        }
        Command::Potential { input, op, order, imag } => {
            merge_input(&mut cfg, &input);
            cmd_potential(&cfg, op, order, imag)
        }
        Command::Kcurve {
            input,
            couple,
            p,
            s,
            t_min,
            t_max,
            points,
            tol,
            numeric,
        } => {
            merge_input(&mut cfg, &input);
            let request = CurveRequest {
                couple,
                p,
                s,
                t_min,
                t_max,
                points,
                tol,
                numeric,
            };
            cmd_kcurve(&cfg, &request)
        }
        Command::Rearrange { input } => {
            merge_input(&mut cfg, &input);
            cmd_rearrange(&cfg)
        }
        Command::Experiment(args) => {
            merge_experiment(&mut cfg, &args)?;
            cmd_experiment(&cfg)
        }
        Command::SuiteAll { seeds } => cmd_suite_all(&cfg, seeds),
    }
}

fn merge_input(cfg: &mut RunConfig, input: &InputArgs) {
    if let Some(g) = &input.grid {
        cfg.grid = Some(g.clone());
    }
    if !input.functions.is_empty() {
        cfg.functions = input.functions.clone();
    }
}

fn merge_experiment(cfg: &mut RunConfig, a: &ExperimentArgs) -> Result<()> {
    let mut section = cfg.experiment.take().unwrap_or_else(|| ExperimentSection {
        tag: String::new(),
        params: ExperimentParams::default(),
        ensemble_size: default_ensemble_size(),
    });
    if let Some(tag) = &a.tag {
        section.tag = tag.clone();
    }
    if section.tag.is_empty() {
        return Err(Error::Config("experiment needs --tag".into()));
    }
    let p = &mut section.params;
    macro_rules! set {
        ($($flag:ident => $field:expr),*) => {$(if let Some(v) = a.$flag { $field = v; })*};
    }
    set!(n => p.n, grid_points => p.grid_points, s => p.s, p => p.p);
    macro_rules! set_opt {
        ($($flag:ident),*) => {$(if a.$flag.is_some() { p.$flag = a.$flag; })*};
    }
    set_opt!(q, t, s0, s1, mu);
    if a.no_refine {
        p.refine = false;
    }
    if let Some(seed) = cfg.seed {
        p.seed = seed;
    }
    if let Some(tol) = cfg.tolerances {
        p.tolerances = tol;
    }
    if let Some(k) = a.seeds {
        section.ensemble_size = k;
    }
    cfg.experiment = Some(section);
    cfg.validate()
}

fn require_inputs(cfg: &RunConfig) -> Result<Vec<(String, GridFunction)>> {
    let grid = cfg.grid()?;
    if cfg.functions.is_empty() {
        return Err(Error::Config("at least one --fn is required".into()));
    }
    cfg.function_specs()?
        .iter()
        .zip(&cfg.functions)
        .map(|(spec, text)| Ok((text.clone(), synthesize(spec, &grid)?)))
        .collect()
}

fn out_path(cfg: &RunConfig) -> Option<&Path> {
    cfg.output.path.as_deref()
}

pub fn cmd_norm(cfg: &RunConfig) -> Result<Outcome> {
    let inputs = require_inputs(cfg)?;
    let spaces = cfg.space_specs()?;
    if spaces.is_empty() {
        return Err(Error::Config("at least one --space is required".into()));
    }
    let mut table = Table::new(&["function", "space", "value"]);
    for (text, u) in &inputs {
        for space in &spaces {
            table.push(vec![
                Cell::Text(text.clone()),
                Cell::Text(space.to_string()),
                Cell::Float(space.evaluate(u)?),
            ]);
        }
    }
    emit(&table.render(cfg.format()), out_path(cfg))?;
    Ok(Outcome::Pass)
}

pub fn cmd_potential(cfg: &RunConfig, op: Operator, order: f64, imag: f64) -> Result<Outcome> {
    let inputs = require_inputs(cfg)?;
    let grid = cfg.grid()?;
    let dim = grid.dim();
    let mut columns: Vec<String> = vec!["function".into()];
    columns.extend((0..dim).map(|j| format!("x{j}")));
    let components = match op {
        Operator::Bessel | Operator::Riesz => 1,
        _ => dim,
    };
    for c in 0..components {
        let suffix = if components == 1 { String::new() } else { format!("{c}") };
        columns.push(format!("re{suffix}"));
        columns.push(format!("im{suffix}"));
    }
    let refs: Vec<&str> = columns.iter().map(String::as_str).collect();
    let mut table = Table::new(&refs);
    for (text, u) in &inputs {
        let field: Vec<GridFunction> = match op {
            Operator::Bessel => vec![bessel_potential(u, MultiplierOrder::new(order, imag)?)],
            Operator::Riesz => vec![riesz_potential(u, order)?],
            Operator::RieszTransform => riesz_transform(u)?,
            Operator::Fracgrad => fractional_gradient(u, order)?,
            Operator::Gradient => gradient(u),
        };
        for i in 0..grid.len() {
            let x = grid.point(i);
            let mut row = vec![Cell::Text(text.clone())];
            row.extend(x[..dim].iter().map(|&v| Cell::Float(v)));
            for comp in &field {
                let z = comp.samples()[i];
                row.push(Cell::Float(z.re));
                row.push(Cell::Float(z.im));
            }
            table.push(row);
        }
    }
    emit(&table.render(cfg.format()), out_path(cfg))?;
    Ok(Outcome::Pass)
}

pub struct CurveRequest {
    pub couple: CoupleName,
    pub p: f64,
    pub s: f64,
    pub t_min: f64,
    pub t_max: f64,
    pub points: usize,
    pub tol: f64,
    pub numeric: bool,
}

fn log_grid(t_min: f64, t_max: f64, points: usize) -> Result<Vec<f64>> {
    if !(t_min > 0.0 && t_max > t_min && t_max.is_finite() && points >= 2) {
        return Err(Error::Config(format!(
            "need 0 < t-min < t-max and at least two points, got [{t_min}, {t_max}] with {points}"
        )));
    }
    let (a, b) = (t_min.log10(), t_max.log10());
    Ok((0..points)
        .map(|i| {
            if i + 1 == points {
                t_max
            } else {
                10f64.powf(a + (b - a) * i as f64 / (points - 1) as f64)
            }
        })
        .collect())
}

fn real_samples(u: &GridFunction) -> Result<Vec<f64>> {
    let scale = u.magnitudes().into_iter().fold(0.0, f64::max);
    if u.samples().iter().any(|z| z.im.abs() > 1e-12 * scale.max(1.0)) {
        return Err(Error::Domain("K-functional couples take real functions".into()));
    }
    Ok(u.real_samples())
}

pub fn cmd_kcurve(cfg: &RunConfig, req: &CurveRequest) -> Result<Outcome> {
    let inputs = require_inputs(cfg)?;
    if inputs.len() != 1 {
        return Err(Error::Config("kcurve takes exactly one --fn".into()));
    }
    let u = &inputs[0].1;
    let grid = *u.grid();
    let ts = log_grid(req.t_min, req.t_max, req.points)?;
    let options = SolverOptions::with_tol(req.tol);
    let x = real_samples(u)?;
    let (mut k, exact): (Box<dyn KFunctional>, bool) = match req.couple {
        CoupleName::L1Linf if !req.numeric => (Box::new(ExactL1Linf::new(&x)), true),
        CoupleName::L1Linf => (Box::new(NumericK::new(NormCouple::l1_linf(x.len())?, &x, options)?), false),
        CoupleName::LpW1p => (Box::new(NumericK::new(NormCouple::lp_w1p(&grid, req.p)?, &x, options)?), false),
        CoupleName::L2Hs2 => (Box::new(NumericK::new(NormCouple::l2_hs2(&grid, req.s)?, &x, options)?), false),
    };
    let curve = KCurve::evaluate(k.as_mut(), &ts)?;
    curve.validate(if exact { 1e-12 } else { 4.0 * req.tol })?;

    let envelope = req.couple == CoupleName::L2Hs2;
    let mut columns = vec!["t", "K", "split-norm0", "split-norm1"];
    if envelope {
        columns.extend(["K2", "sqrt2K2"]);
    }
    let mut table = Table::new(&columns);
    for pt in &curve.points {
        let (a, b) = pt.split_norms.unwrap_or((f64::NAN, f64::NAN));
        let mut row = vec![Cell::Float(pt.t), Cell::Float(pt.value), Cell::Float(a), Cell::Float(b)];
        if envelope {
            let k2 = k2_envelope_p2(u, pt.t, req.s)?;
            row.push(Cell::Float(k2));
            row.push(Cell::Float(std::f64::consts::SQRT_2 * k2));
        }
        table.push(row);
    }
    emit(&table.render(cfg.format()), out_path(cfg))?;
    Ok(Outcome::Pass)
}

pub fn cmd_rearrange(cfg: &RunConfig) -> Result<Outcome> {
    let inputs = require_inputs(cfg)?;
    let mut table = Table::new(&["function", "t", "value"]);
    for (text, u) in &inputs {
        let r = decreasing_rearrangement(u);
        for (i, &v) in r.values().iter().enumerate() {
            table.push(vec![Cell::Text(text.clone()), Cell::Float(i as f64 * r.cell()), Cell::Float(v)]);
        }
    }
    emit(&table.render(cfg.format()), out_path(cfg))?;
    Ok(Outcome::Pass)
}

pub fn cmd_experiment(cfg: &RunConfig) -> Result<Outcome> {
    let section = cfg
        .experiment
        .as_ref()
        .ok_or_else(|| Error::Config("no experiment configured".into()))?;
    let tag: TheoremTag = section.tag.parse()?;
    let report = run_experiment(tag, &section.params, section.ensemble_size)?;
    let text = match cfg.format() {
        Format::Csv if cfg.output.format.is_some() => report.to_csv(),
        _ => report.to_json(),
    };
    emit(&text, out_path(cfg))?;
    eprintln!("{}", report.summary());
    Ok(if report.pass { Outcome::Pass } else { Outcome::Fail })
}

pub fn cmd_suite_all(cfg: &RunConfig, seeds: usize) -> Result<Outcome> {
    let dir = cfg.output.path.clone().unwrap_or_else(|| "reports".into());
    std::fs::create_dir_all(&dir)?;
    let seed = cfg.seed.unwrap_or(0);
    let mut summary = Table::new(&["name", "tag", "pass", "max", "min", "median", "drift"]);
    let mut all_pass = true;
    for entry in standard_suite(seed, seeds) {
        let mut params = entry.params.clone();
        if let Some(tol) = cfg.tolerances {
            params.tolerances = tol;
        }
        let report = run_experiment(entry.tag, &params, entry.ensemble_size)?;
        emit(&report.to_json(), Some(&dir.join(format!("{}.report.json", entry.name))))?;
        emit(&report.to_csv(), Some(&dir.join(format!("{}.csv", entry.name))))?;
        eprintln!("{}", report.summary());
        all_pass &= report.pass;
        summary.push(vec![
            Cell::Text(entry.name.clone()),
            Cell::Text(entry.tag.to_string()),
            Cell::Text(report.pass.to_string()),
            Cell::Float(report.aggregate.max),
            Cell::Float(report.aggregate.min),
            Cell::Float(report.aggregate.median),
            Cell::Float(report.refinement.map_or(f64::NAN, |r| r.statistic_drift())),
        ]);
    }
    emit(&summary.render(Format::Csv), Some(&dir.join("summary.csv")))?;
    Ok(if all_pass { Outcome::Pass } else { Outcome::Fail })
}
