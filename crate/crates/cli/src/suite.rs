//! The fixed experiment list behind `suite-all`.

use besselkit_core::experiments::{ExperimentParams, TheoremTag};

#[derive(Debug, Clone)]
pub struct SuiteEntry {
    /// File stem of the report.
    pub name: String,
    pub tag: TheoremTag,
    pub params: ExperimentParams,
    pub ensemble_size: usize,
}

struct Spec {
    tag: TheoremTag,
    n: usize,
    big_n: usize,
    s: f64,
    p: f64,
    extra: fn(&mut ExperimentParams),
    size: Size,
}

#[derive(Clone, Copy)]
enum Size {
    Full,
    Identity,
    Smoke,
    Solver,
}

fn none(_: &mut ExperimentParams) {}

/// Every suite run, in emission order. `seeds` sizes the random part of
/// the inequality ensembles; identity suites use 20 and the solver-backed
/// comparison and the two-dimensional smoke runs use 10.
pub fn standard_suite(seed: u64, seeds: usize) -> Vec<SuiteEntry> {
    use TheoremTag::*;
    let spec = |tag, n, big_n, s, p, extra: fn(&mut ExperimentParams), size| Spec {
        tag,
        n,
        big_n,
        s,
        p,
        extra,
        size,
    };
    let list = [
        spec(FsetSubcritical, 1, 64, 0.25, 2.0, none, Size::Full),
        spec(FsetCritical, 1, 64, 0.5, 2.0, none, Size::Full),
        spec(FsetSupercritical, 1, 64, 0.5, 4.0, |p| p.mu = Some(0.125), Size::Full),
        spec(FsetSupercritical, 1, 64, 0.5, 4.0, |p| p.mu = Some(0.25), Size::Full),
        spec(CriticalI, 1, 64, 0.5, 2.0, none, Size::Full),
        spec(Frset, 1, 64, 0.6, 2.0, |p| p.t = Some(0.3), Size::Full),
        spec(LorentzOptimal, 1, 64, 0.25, 2.0, |p| p.q = Some(2.0), Size::Full),
        spec(LorentzOptimal, 1, 64, 0.25, 2.0, |p| p.q = Some(f64::INFINITY), Size::Full),
        spec(BmoEstimate, 1, 64, 0.5, 2.0, none, Size::Full),
        spec(IdentityEmbedding, 1, 64, 0.5, 3.0, none, Size::Full),
        spec(RieszPotential, 1, 64, 0.25, 2.0, none, Size::Full),
        spec(Mihlin, 1, 64, 0.5, 4.0, |p| p.t = Some(1.0), Size::Full),
        spec(FracgradChain, 1, 64, 0.25, 2.0, |p| p.t = Some(0.5), Size::Full),
        spec(IdentityOrder, 1, 64, 0.5, 2.0, none, Size::Identity),
        spec(Semigroup, 1, 64, 0.5, 2.0, none, Size::Identity),
        spec(Lifting, 1, 64, 0.5, 3.0, none, Size::Identity),
        spec(Fftc, 1, 64, 0.5, 2.0, none, Size::Identity),
        spec(GradientOrderings, 1, 64, 0.5, 2.0, none, Size::Identity),
        spec(RieszSemigroup, 1, 64, 0.5, 2.0, none, Size::Identity),
        spec(ImaginaryIsometry, 1, 64, 0.5, 2.0, |p| p.t = Some(2.0), Size::Identity),
        spec(Hilbertcase, 1, 64, 0.5, 2.0, none, Size::Full),
        spec(
            Contiguity,
            1,
            64,
            0.5,
            3.0,
            |p| {
                p.s0 = Some(0.25);
                p.s1 = Some(0.75);
            },
            Size::Full,
        ),
        spec(Nesting, 1, 64, 0.5, 1.5, none, Size::Full),
        spec(Nesting, 1, 64, 0.5, 3.0, none, Size::Full),
        spec(GagliardoVsInterp, 1, 32, 0.5, 2.0, none, Size::Solver),
        spec(FsetSubcritical, 2, 32, 0.5, 2.0, none, Size::Smoke),
        spec(FsetCritical, 2, 32, 0.5, 4.0, none, Size::Smoke),
        spec(FsetSupercritical, 2, 32, 0.75, 4.0, none, Size::Smoke),
        spec(CriticalI, 2, 32, 0.5, 4.0, none, Size::Smoke),
        spec(Frset, 2, 32, 0.6, 2.0, |p| p.t = Some(0.3), Size::Smoke),
        spec(LorentzOptimal, 2, 32, 0.5, 2.0, none, Size::Smoke),
        spec(BmoEstimate, 2, 32, 0.5, 4.0, none, Size::Smoke),
    ];
    list.into_iter()
        .enumerate()
        .map(|(i, sp)| {
            let mut params = ExperimentParams::new(sp.n, sp.big_n, sp.s, sp.p).with_seed(seed);
            (sp.extra)(&mut params);
            let ensemble_size = match sp.size {
                Size::Full => seeds,
                Size::Identity => 20,
                Size::Smoke | Size::Solver => 10,
            };
            SuiteEntry {
                name: format!("{:02}-{}-n{}", i + 1, sp.tag, sp.n),
                tag: sp.tag,
                params,
                ensemble_size,
            }
        })
        .collect()
}
