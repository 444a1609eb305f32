//! The three suite runners and the shared ensemble sweep.

use std::f64::consts::PI;

use rayon::prelude::*;

use super::ensemble::{default_ensemble, Member};
use super::report::{
    Aggregate, Check, ExperimentReport, MemberRatio, RatioFamily, Refinement, ReportParameters, SuiteKind, SCHEMA,
};
use super::{ExperimentParams, TheoremTag};
use crate::error::{Error, Result};
use crate::grid::{lp_of_magnitudes, make_grid, pointwise_magnitude, quadrature_lp, GridFunction, PeriodicGrid};
use crate::interpolation::{real_interp_norm, NormCouple, NumericK, SolverOptions};
use crate::norms::{bessel_norm, bmo_norm, conjugates, gagliardo_norm, holder_norm, lorentz_norm, Conjugates, Regime};
use crate::potentials::{
    bessel_potential, fftc_reconstruct, fractional_gradient, gradient, riesz_potential, riesz_potential_with,
    MeanPolicy, MultiplierOrder,
};

/// Per-member output of a measurement: one `(numerator, denominator)` pair
/// per ratio family and an optional consistency defect.
struct Measured {
    pairs: Vec<(f64, f64)>,
    defect: f64,
}

impl Measured {
    fn one(num: f64, den: f64) -> Self {
        Self {
            pairs: vec![(num, den)],
            defect: 0.0,
        }
    }
}

struct FamilyDef {
    name: String,
    numerator: String,
    denominator: String,
    gated: bool,
}

fn family(name: &str, numerator: impl Into<String>, denominator: impl Into<String>, gated: bool) -> FamilyDef {
    FamilyDef {
        name: name.into(),
        numerator: numerator.into(),
        denominator: denominator.into(),
        gated,
    }
}

type Measure<'a> = Box<dyn Fn(&GridFunction) -> Result<Measured> + Sync + 'a>;
type PostCheck = Box<dyn Fn(&[Vec<f64>]) -> Result<Check> + Sync>;

struct Plan<'a> {
    families: Vec<FamilyDef>,
    zero_mean: bool,
    measure: Measure<'a>,
    /// Name and tolerance of the check on the largest member defect.
    defect_check: Option<(&'static str, f64)>,
    post_checks: Vec<PostCheck>,
    parameters: ReportParameters,
}

fn config<E: std::fmt::Display>(e: E) -> Error {
    Error::Config(e.to_string())
}

fn require_kind(tag: TheoremTag, kind: SuiteKind) -> Result<()> {
    if tag.kind() != kind {
        return Err(Error::config(format!("{tag} is not a {kind:?} suite tag")));
    }
    Ok(())
}

fn require_regime(tag: TheoremTag, n: usize, s: f64, p: f64, want: Regime) -> Result<Conjugates> {
    let c = conjugates(n, s, p).map_err(config)?;
    if c.regime != want {
        return Err(Error::config(format!(
            "{tag} needs the {want:?} regime, but n={n}, order {s}, p={p} is {:?}",
            c.regime
        )));
    }
    Ok(c)
}

fn require_order(name: &str, v: f64, lo: f64, hi: f64) -> Result<()> {
    if !(v > lo && v < hi) {
        return Err(Error::config(format!("{name} = {v} must lie in ({lo}, {hi})")));
    }
    Ok(())
}

fn base_parameters(params: &ExperimentParams, members: usize) -> ReportParameters {
    ReportParameters {
        n: params.n,
        grid_points: params.grid_points,
        s: params.s,
        p: params.p,
        q: params.q,
        theta: params.theta,
        t: params.t,
        s0: params.s0,
        s1: params.s1,
        mu: params.mu,
        seed: params.seed,
        seed_count: members,
    }
}

fn experiment_id(tag: TheoremTag, r: &ReportParameters) -> String {
    let mut id = format!("{tag}:n={}:N={}:s={}:p={}", r.n, r.grid_points, r.s, r.p);
    for (key, v) in [("q", r.q), ("theta", r.theta), ("t", r.t), ("s0", r.s0), ("s1", r.s1), ("mu", r.mu)] {
        if let Some(v) = v {
            id.push_str(&format!(":{key}={v}"));
        }
    }
    id.push_str(&format!(":seed={}", r.seed));
    id
}

fn field_l2(field: &[GridFunction]) -> f64 {
    field.iter().map(|c| c.l2_spectral().powi(2)).sum::<f64>().sqrt()
}

fn field_diff_l2(a: &[GridFunction], b: &[GridFunction]) -> Result<f64> {
    let mut acc = 0.0;
    for (x, y) in a.iter().zip(b) {
        acc += x.sub(y)?.l2_spectral().powi(2);
    }
    Ok(acc.sqrt())
}

fn field_lp(field: &[GridFunction], p: f64) -> Result<f64> {
    let cell = field[0].grid().cell_volume();
    lp_of_magnitudes(&pointwise_magnitude(field), p, cell)
}

fn sweep(plan: &Plan<'_>, members: &[Member], grid: &PeriodicGrid) -> Result<Vec<Measured>> {
    let results: Vec<Result<Measured>> = members
        .par_iter()
        .map(|m| {
            let u = m.sample(grid, plan.zero_mean)?;
            (plan.measure)(&u)
        })
        .collect();
    results.into_iter().collect()
}

/// Ratio of a member, rejecting anything not finite. Inequality suites
/// also demand strictly positive ratios.
fn checked_ratio(num: f64, den: f64, strict: bool, what: &str) -> Result<f64> {
    let r = num / den;
    let ok = num.is_finite() && den.is_finite() && den > 0.0 && r.is_finite() && (r > 0.0 || (!strict && r == 0.0));
    if !ok {
        return Err(Error::Numerical {
            message: format!("{what}: ratio {num:e}/{den:e} is not a positive finite number"),
            best: r,
            residual: f64::NAN,
        });
    }
    Ok(r)
}

fn execute(tag: TheoremTag, params: &ExperimentParams, plan: Plan<'_>, grid: PeriodicGrid, members: &[Member]) -> Result<ExperimentReport> {
    let kind = tag.kind();
    let strict = kind != SuiteKind::Identity;
    let refine = params.refine && kind != SuiteKind::Identity;
    let coarse = sweep(&plan, members, &grid)?;
    let fine = if refine {
        Some(sweep(&plan, members, &grid.refined())?)
    } else {
        None
    };

    let ratios_of = |data: &[Measured], f: usize| -> Result<Vec<f64>> {
        data.iter()
            .zip(members)
            .map(|(d, m)| {
                let (num, den) = d.pairs[f];
                checked_ratio(num, den, strict, &format!("{tag} member {}", m.label))
            })
            .collect()
    };

    let tol = params.tolerances;
    let mut families = Vec::new();
    let mut coarse_ratios = Vec::new();
    let mut checks = Vec::new();
    for (f, def) in plan.families.iter().enumerate() {
        let ratios = ratios_of(&coarse, f)?;
        let per_member = coarse
            .iter()
            .zip(members)
            .zip(&ratios)
            .map(|((d, m), &ratio)| MemberRatio {
                seed: m.seed,
                label: m.label.clone(),
                numerator: d.pairs[f].0,
                denominator: d.pairs[f].1,
                ratio,
            })
            .collect();
        let refinement = match &fine {
            Some(fine) => Some(Refinement::compare(grid.refined().points_per_axis(), &ratios, &ratios_of(fine, f)?)?),
            None => None,
        };
        if def.gated {
            if let Some(r) = refinement {
                checks.push(Check::new(format!("drift:{}", def.name), r.statistic_drift(), tol.drift));
                if tag == TheoremTag::Hilbertcase {
                    checks.push(Check::new(format!("band-drift:{}", def.name), r.band_drift, tol.band_drift));
                }
            }
        }
        families.push(RatioFamily {
            name: def.name.clone(),
            numerator: def.numerator.clone(),
            denominator: def.denominator.clone(),
            gated: def.gated,
            per_member,
            aggregate: Aggregate::of(&ratios)?,
            refinement,
        });
        coarse_ratios.push(ratios);
    }
    if kind == SuiteKind::Identity {
        checks.push(Check::new("max-relative-error", families[0].aggregate.max, tol.identity));
    }
    if let Some((name, limit)) = plan.defect_check {
        let mut worst = coarse.iter().map(|d| d.defect).fold(0.0, f64::max);
        if let Some(fine) = &fine {
            worst = fine.iter().map(|d| d.defect).fold(worst, f64::max);
        }
        checks.push(Check::new(name, worst, limit));
    }
    for post in &plan.post_checks {
        checks.push(post(&coarse_ratios)?);
    }

    let pass = checks.iter().all(|c| c.pass);
    let primary = families.remove(0);
    Ok(ExperimentReport {
        schema: SCHEMA.into(),
        experiment_id: experiment_id(tag, &plan.parameters),
        theorem_tag: tag.as_str().into(),
        kind,
        parameters: plan.parameters,
        numerator: primary.numerator,
        denominator: primary.denominator,
        per_member: primary.per_member,
        aggregate: primary.aggregate,
        refinement: primary.refinement,
        companions: families,
        checks,
        pass,
    })
}

fn setup(params: &ExperimentParams, ensemble_size: usize) -> Result<(PeriodicGrid, Vec<Member>)> {
    let grid = make_grid(params.n, params.grid_points).map_err(config)?;
    if ensemble_size == 0 {
        return Err(Error::config("ensemble size must be positive"));
    }
    let members = default_ensemble(&grid, ensemble_size, params.seed);
    Ok((grid, members))
}

/// Target-norm over source-norm ratios for one embedding theorem, with the
/// `N → 2N` drift of the ratio statistics.
pub fn run_embedding_suite(tag: TheoremTag, params: &ExperimentParams, ensemble_size: usize) -> Result<ExperimentReport> {
    require_kind(tag, SuiteKind::Embedding)?;
    let (grid, members) = setup(params, ensemble_size)?;
    let (n, s, p) = (params.n, params.s, params.p);
    let nf = n as f64;
    let mut rp = base_parameters(params, members.len());
    let hsp = format!("Hsp:s={s},p={p}");
    let plan = match tag {
        TheoremTag::FsetSubcritical => {
            let c = require_regime(tag, n, s, p, Regime::Subcritical)?;
            let q = params.q.unwrap_or(c.p_star_s);
            if !(q >= p && q <= c.p_star_s * (1.0 + 1e-12)) {
                return Err(Error::config(format!("target q = {q} outside [p, p*] = [{p}, {}]", c.p_star_s)));
            }
            rp.q = Some(q);
            Plan {
                families: vec![family("embedding", format!("Lp:p={q}"), hsp, true)],
                zero_mean: false,
                measure: Box::new(move |u| Ok(Measured::one(quadrature_lp(u, q)?, bessel_norm(u, s, p)?))),
                defect_check: None,
                post_checks: vec![],
                parameters: rp,
            }
        }
        TheoremTag::FsetCritical => {
            require_regime(tag, n, s, p, Regime::Critical)?;
            let q = params.q.unwrap_or(2.0 * p);
            if !(q >= p && q.is_finite()) {
                return Err(Error::config(format!("critical target q = {q} outside [p, ∞)")));
            }
            rp.q = Some(q);
            Plan {
                families: vec![family("embedding", format!("Lp:p={q}"), hsp, true)],
                zero_mean: false,
                measure: Box::new(move |u| Ok(Measured::one(quadrature_lp(u, q)?, bessel_norm(u, s, p)?))),
                defect_check: None,
                post_checks: vec![],
                parameters: rp,
            }
        }
        TheoremTag::FsetSupercritical => {
            let c = require_regime(tag, n, s, p, Regime::Supercritical)?;
            let mu_star = c.mu_star_s.expect("supercritical regime carries μ*");
            let mu = params.mu.unwrap_or(mu_star);
            if !(mu > 0.0 && mu <= mu_star * (1.0 + 1e-12)) {
                return Err(Error::config(format!("Hölder exponent {mu} outside (0, μ*] = (0, {mu_star}]")));
            }
            rp.mu = Some(mu);
            Plan {
                families: vec![family("embedding", format!("Holder:mu={mu}"), hsp, true)],
                zero_mean: false,
                measure: Box::new(move |u| Ok(Measured::one(holder_norm(u, mu)?, bessel_norm(u, s, p)?))),
                defect_check: None,
                post_checks: vec![],
                parameters: rp,
            }
        }
        TheoremTag::CriticalI => {
            require_regime(tag, n, s, p, Regime::Critical)?;
            Plan {
                families: vec![family("embedding", "BMO", hsp, true)],
                zero_mean: false,
                measure: Box::new(move |u| Ok(Measured::one(bmo_norm(u), bessel_norm(u, s, p)?))),
                defect_check: None,
                post_checks: vec![],
                parameters: rp,
            }
        }
        TheoremTag::Frset => {
            let t = params.t.unwrap_or(s / 2.0);
            require_order("t", t, 0.0, s)?;
            let c = require_regime(tag, n, s - t, p, Regime::Subcritical)?;
            let q = c.p_star_s;
            rp.t = Some(t);
            rp.q = Some(q);
            Plan {
                families: vec![family("embedding", format!("Hsp:s={t},p={q}"), hsp, true)],
                zero_mean: false,
                measure: Box::new(move |u| {
                    let direct_num = bessel_norm(u, t, q)?;
                    let den = bessel_norm(u, s, p)?;
                    // chain through L^q: Λ_{-t}u measured in H^{s-t,p} and in L^q
                    let w = bessel_potential(u, MultiplierOrder::real(-t)?);
                    let wq = quadrature_lp(&w, q)?;
                    let first = wq / bessel_norm(&w, s - t, p)?;
                    let second = direct_num / wq;
                    let direct = direct_num / den;
                    Ok(Measured {
                        pairs: vec![(direct_num, den)],
                        defect: (direct / (first * second) - 1.0).max(0.0),
                    })
                }),
                defect_check: Some(("chain-consistency", 1e-10)),
                post_checks: vec![],
                parameters: rp,
            }
        }
        TheoremTag::LorentzOptimal => {
            let c = require_regime(tag, n, s, p, Regime::Subcritical)?;
            let q = params.q.unwrap_or(p);
            if !(q >= p) {
                return Err(Error::config(format!("Lorentz index q = {q} below p = {p}")));
            }
            let ps = c.p_star_s;
            rp.q = Some(q);
            Plan {
                families: vec![family("embedding", format!("Lorentz:p={ps},q={q}"), hsp, true)],
                zero_mean: false,
                measure: Box::new(move |u| Ok(Measured::one(lorentz_norm(u, ps, q)?, bessel_norm(u, s, p)?))),
                defect_check: None,
                post_checks: vec![],
                parameters: rp,
            }
        }
        TheoremTag::BmoEstimate => {
            require_regime(tag, n, s, p, Regime::Critical)?;
            let r = nf / s;
            Plan {
                families: vec![family("embedding", format!("BMO(I_{s} u)"), format!("Lp:p={r}"), true)],
                zero_mean: true,
                measure: Box::new(move |u| Ok(Measured::one(bmo_norm(&riesz_potential(u, s)?), quadrature_lp(u, r)?))),
                defect_check: None,
                post_checks: vec![],
                parameters: rp,
            }
        }
        TheoremTag::IdentityEmbedding => {
            require_order("s", s, 0.0, 1.0)?;
            let bound = 1.0 + params.tolerances.identity;
            Plan {
                families: vec![family("embedding", format!("Lp:p={p}"), hsp, true)],
                zero_mean: false,
                measure: Box::new(move |u| Ok(Measured::one(quadrature_lp(u, p)?, bessel_norm(u, s, p)?))),
                defect_check: None,
                post_checks: vec![Box::new(move |r: &[Vec<f64>]| {
                    Ok(Check::new("ratio-at-most-one", Aggregate::of(&r[0])?.max, bound))
                })],
                parameters: rp,
            }
        }
        TheoremTag::RieszPotential => {
            let c = require_regime(tag, n, s, p, Regime::Subcritical)?;
            let ps = c.p_star_s;
            Plan {
                families: vec![family("embedding", format!("Lorentz:p={ps},q={p}(I_{s} u)"), format!("Lp:p={p}"), true)],
                zero_mean: true,
                measure: Box::new(move |u| Ok(Measured::one(lorentz_norm(&riesz_potential(u, s)?, ps, p)?, quadrature_lp(u, p)?))),
                defect_check: None,
                post_checks: vec![],
                parameters: rp,
            }
        }
        TheoremTag::Mihlin => {
            let t = params.t.unwrap_or(1.0);
            if !(p > 1.0 && p.is_finite() && t.is_finite()) {
                return Err(Error::config(format!("Mihlin needs p in (1, ∞) and finite t, got p={p}, t={t}")));
            }
            rp.t = Some(t);
            let weight = (1.0 + 4.0 * PI * PI * t * t).powf(nf / 2.0);
            Plan {
                families: vec![family("embedding", format!("Lp:p={p}(Λ_(i{t}) u)"), format!("(1+4π²t²)^(n/2) Lp:p={p}"), true)],
                zero_mean: false,
                measure: Box::new(move |u| {
                    let v = bessel_potential(u, MultiplierOrder::imaginary(t)?);
                    Ok(Measured::one(quadrature_lp(&v, p)?, weight * quadrature_lp(u, p)?))
                }),
                defect_check: None,
                post_checks: vec![],
                parameters: rp,
            }
        }
        TheoremTag::FracgradChain => {
            let t = params.t.unwrap_or((1.0 + s) / 2.0);
            require_order("s", s, 0.0, 1.0)?;
            require_order("t", t, s, 1.0)?;
            let c = require_regime(tag, n, t - s, p, Regime::Subcritical)?;
            let q = c.p_star_s;
            rp.t = Some(t);
            rp.q = Some(q);
            Plan {
                families: vec![family("embedding", format!("Lp:p={q}(D^{s} u)"), format!("Lp:p={p}(D^{t} u)"), true)],
                zero_mean: true,
                measure: Box::new(move |u| {
                    Ok(Measured::one(field_lp(&fractional_gradient(u, s)?, q)?, field_lp(&fractional_gradient(u, t)?, p)?))
                }),
                defect_check: None,
                post_checks: vec![],
                parameters: rp,
            }
        }
        _ => unreachable!("kind checked above"),
    };
    execute(tag, params, plan, grid, &members)
}

/// Largest relative error of an exact operator identity over the ensemble.
pub fn run_identity_suite(tag: TheoremTag, params: &ExperimentParams, ensemble_size: usize) -> Result<ExperimentReport> {
    require_kind(tag, SuiteKind::Identity)?;
    let (grid, members) = setup(params, ensemble_size)?;
    let (n, s, p) = (params.n, params.s, params.p);
    let nf = n as f64;
    let mut rp = base_parameters(params, members.len());
    let rel = |name: &str| family("relative-error", format!("‖lhs − rhs‖ ({name})"), "‖rhs‖", true);
    let (def, zero_mean, measure): (FamilyDef, bool, Measure<'_>) = match tag {
        TheoremTag::IdentityOrder => (
            rel("Λ_0 u vs u"),
            false,
            Box::new(|u| {
                let v = bessel_potential(u, MultiplierOrder::real(0.0)?);
                Ok(Measured::one(v.sub(u)?.l2_spectral(), u.l2_spectral()))
            }),
        ),
        TheoremTag::Semigroup => {
            let (a, b) = (params.s0.unwrap_or(0.3), params.s1.unwrap_or(0.4));
            rp.s0 = Some(a);
            rp.s1 = Some(b);
            (
                rel("Λ_s0 Λ_s1 u vs Λ_(s0+s1) u"),
                false,
                Box::new(move |u| {
                    let lhs = bessel_potential(&bessel_potential(u, MultiplierOrder::real(b)?), MultiplierOrder::real(a)?);
                    let rhs = bessel_potential(u, MultiplierOrder::real(a + b)?);
                    Ok(Measured::one(lhs.sub(&rhs)?.l2_spectral(), rhs.l2_spectral()))
                }),
            )
        }
        TheoremTag::Lifting => {
            let t = params.t.unwrap_or(0.25);
            if !(p > 1.0 && p.is_finite()) {
                return Err(Error::config(format!("lifting needs p in (1, ∞), got {p}")));
            }
            rp.t = Some(t);
            (
                rel("‖Λ_t u‖_(H^(s+t,p)) vs ‖u‖_(H^(s,p))"),
                false,
                Box::new(move |u| {
                    let lhs = bessel_norm(&bessel_potential(u, MultiplierOrder::real(t)?), s + t, p)?;
                    let rhs = bessel_norm(u, s, p)?;
                    Ok(Measured::one((lhs - rhs).abs(), rhs))
                }),
            )
        }
        TheoremTag::Fftc => {
            require_order("s", s, 0.0, 1.0)?;
            (
                rel("I_s(R·D^s u) vs u"),
                true,
                Box::new(move |u| {
                    let back = fftc_reconstruct(&fractional_gradient(u, s)?, s)?;
                    Ok(Measured::one(back.sub(u)?.l2_spectral(), u.l2_spectral()))
                }),
            )
        }
        TheoremTag::GradientOrderings => {
            require_order("s", s, 0.0, 1.0)?;
            (
                rel("max of I_(1-s)(Du), D(I_(1-s)u) vs D^s u"),
                true,
                Box::new(move |u| {
                    let direct = fractional_gradient(u, s)?;
                    let outer = gradient(u)
                        .iter()
                        .map(|c| riesz_potential_with(c, 1.0 - s, MeanPolicy::Project))
                        .collect::<Result<Vec<_>>>()?;
                    let inner = gradient(&riesz_potential(u, 1.0 - s)?);
                    let err = field_diff_l2(&outer, &direct)?.max(field_diff_l2(&inner, &direct)?);
                    Ok(Measured::one(err, field_l2(&direct)))
                }),
            )
        }
        TheoremTag::RieszSemigroup => {
            let (a, b) = (params.s0.unwrap_or(0.3), params.s1.unwrap_or(0.4));
            require_order("s0", a, 0.0, nf)?;
            require_order("s1", b, 0.0, nf)?;
            require_order("s0 + s1", a + b, 0.0, nf)?;
            rp.s0 = Some(a);
            rp.s1 = Some(b);
            (
                rel("I_s0 I_s1 u vs I_(s0+s1) u"),
                true,
                Box::new(move |u| {
                    let lhs = riesz_potential(&riesz_potential(u, b)?, a)?;
                    let rhs = riesz_potential(u, a + b)?;
                    Ok(Measured::one(lhs.sub(&rhs)?.l2_spectral(), rhs.l2_spectral()))
                }),
            )
        }
        TheoremTag::ImaginaryIsometry => {
            let t = params.t.unwrap_or(2.0);
            rp.t = Some(t);
            (
                rel("‖Λ_(it) u‖_2 vs ‖u‖_2"),
                false,
                Box::new(move |u| {
                    let v = bessel_potential(u, MultiplierOrder::imaginary(t)?);
                    let (a, b) = (quadrature_lp(&v, 2.0)?, quadrature_lp(u, 2.0)?);
                    Ok(Measured::one((a - b).abs(), b))
                }),
            )
        }
        _ => unreachable!("kind checked above"),
    };
    let plan = Plan {
        families: vec![def],
        zero_mean,
        measure,
        defect_check: None,
        post_checks: vec![],
        parameters: rp,
    };
    execute(tag, params, plan, grid, &members)
}

/// Two-sided comparisons between Bessel, Gagliardo and real-interpolation
/// scales.
pub fn run_scale_comparison(tag: TheoremTag, params: &ExperimentParams, ensemble_size: usize) -> Result<ExperimentReport> {
    require_kind(tag, SuiteKind::Scale)?;
    let (grid, members) = setup(params, ensemble_size)?;
    let (s, p) = (params.s, params.p);
    require_order("s", s, 0.0, 1.0)?;
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::config(format!("scale comparisons need p in (1, ∞), got {p}")));
    }
    let mut rp = base_parameters(params, members.len());
    let hs = |o: f64| format!("Hsp:s={o},p={p}");
    let ws = format!("Wsp:s={s},p={p}");
    let plan = match tag {
        TheoremTag::Hilbertcase => {
            if p != 2.0 {
                return Err(Error::config(format!("Hilbertcase needs p = 2, got {p}")));
            }
            Plan {
                families: vec![family("equivalence", hs(s), ws.clone(), true)],
                zero_mean: false,
                measure: Box::new(move |u| Ok(Measured::one(bessel_norm(u, s, 2.0)?, gagliardo_norm(u, s, 2.0)?))),
                defect_check: None,
                post_checks: vec![],
                parameters: rp,
            }
        }
        TheoremTag::Contiguity => {
            let s0 = params.s0.unwrap_or(s - 0.25);
            let s1 = params.s1.unwrap_or(s + 0.25);
            if !(0.0 < s0 && s0 < s && s < s1 && s1 < 1.0) {
                return Err(Error::config(format!("contiguity needs 0 < s0 < s < s1 < 1, got {s0}, {s}, {s1}")));
            }
            rp.s0 = Some(s0);
            rp.s1 = Some(s1);
            Plan {
                families: vec![
                    family("upper", ws.clone(), hs(s1), true),
                    family("lower", hs(s0), ws.clone(), true),
                ],
                zero_mean: false,
                measure: Box::new(move |u| {
                    let w = gagliardo_norm(u, s, p)?;
                    let h0 = bessel_norm(u, s0, p)?;
                    let h1 = bessel_norm(u, s1, p)?;
                    Ok(Measured {
                        pairs: vec![(w, h1), (h0, w)],
                        defect: 0.0,
                    })
                }),
                defect_check: None,
                post_checks: vec![Box::new(|r: &[Vec<f64>]| {
                    // medians of ‖u‖_{H^{s0}}/‖u‖_W and ‖u‖_{H^{s1}}/‖u‖_W
                    let low = Aggregate::of(&r[1])?.median;
                    let inverse: Vec<f64> = r[0].iter().map(|x| 1.0 / x).collect();
                    let high = Aggregate::of(&inverse)?.median;
                    Ok(Check::new("median-ordering", low / high, 1.0))
                })],
                parameters: rp,
            }
        }
        TheoremTag::Nesting => {
            let (forward, backward) = if p <= 2.0 {
                (family("embedding", hs(s), ws.clone(), true), family("reverse", ws.clone(), hs(s), p == 2.0))
            } else {
                (family("embedding", ws.clone(), hs(s), true), family("reverse", hs(s), ws.clone(), false))
            };
            Plan {
                families: vec![forward, backward],
                zero_mean: false,
                measure: Box::new(move |u| {
                    let h = bessel_norm(u, s, p)?;
                    let w = gagliardo_norm(u, s, p)?;
                    let pairs = if p <= 2.0 { vec![(h, w), (w, h)] } else { vec![(w, h), (h, w)] };
                    Ok(Measured { pairs, defect: 0.0 })
                }),
                defect_check: None,
                post_checks: vec![],
                parameters: rp,
            }
        }
        TheoremTag::GagliardoVsInterp => {
            let tol = params.tolerances.solver;
            rp.theta = Some(s);
            rp.q = Some(p);
            Plan {
                families: vec![family("equivalence", ws.clone(), format!("(Lp, W1p)_(θ={s},q={p})"), true)],
                zero_mean: false,
                measure: Box::new(move |u| {
                    let couple = NormCouple::lp_w1p(u.grid(), p)?;
                    let mut k = NumericK::new(couple, &u.real_samples(), SolverOptions::with_tol(tol))?;
                    let interp = real_interp_norm(&mut k, s, p)?;
                    Ok(Measured::one(gagliardo_norm(u, s, p)?, interp.value))
                }),
                defect_check: None,
                post_checks: vec![],
                parameters: rp,
            }
        }
        _ => unreachable!("kind checked above"),
    };
    execute(tag, params, plan, grid, &members)
}
