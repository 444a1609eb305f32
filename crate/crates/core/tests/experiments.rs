use besselkit_core::experiments::{
    estimate_embedding_constant, run_embedding_suite, run_experiment, run_identity_suite, run_scale_comparison,
    ExperimentParams, ExperimentReport, MemberRatio, TheoremTag, STRUCTURED_MEMBERS,
};
use besselkit_core::Error;

fn params(n: usize, big_n: usize, s: f64, p: f64) -> ExperimentParams {
    ExperimentParams::new(n, big_n, s, p).with_seed(42)
}

fn assert_valid(report: &ExperimentReport) {
    assert_eq!(report.schema, "report-v1");
    assert!(report.per_member.iter().all(|m| m.ratio.is_finite()));
    let ratios = report.ratios();
    let max = ratios.iter().cloned().fold(f64::MIN, f64::max);
    assert_eq!(report.aggregate.max, max);
    assert_eq!(report.pass, report.checks.iter().all(|c| c.pass));
}

#[test]
fn subcritical_targets_sobolev_conjugate() {
    let r = run_embedding_suite(TheoremTag::FsetSubcritical, &params(2, 16, 0.5, 2.0), 10).unwrap();
    assert_eq!(r.parameters.q, Some(4.0));
    assert_eq!(r.per_member.len(), 10 + STRUCTURED_MEMBERS);
    assert!(r.per_member.iter().all(|m| m.ratio > 0.0));
    assert_valid(&r);
}

#[test]
fn supercritical_targets_holder_exponent() {
    let r = run_embedding_suite(TheoremTag::FsetSupercritical, &params(1, 32, 0.5, 4.0), 10).unwrap();
    assert_eq!(r.parameters.mu, Some(0.25));
    assert_valid(&r);
    let half = ExperimentParams {
        mu: Some(0.125),
        ..params(1, 32, 0.5, 4.0)
    };
    assert_eq!(run_embedding_suite(TheoremTag::FsetSupercritical, &half, 10).unwrap().parameters.mu, Some(0.125));
    let beyond = ExperimentParams {
        mu: Some(0.3),
        ..params(1, 32, 0.5, 4.0)
    };
    assert!(matches!(
        run_embedding_suite(TheoremTag::FsetSupercritical, &beyond, 10),
        Err(Error::Config(_))
    ));
}

#[test]
fn regime_mismatch_is_a_configuration_error() {
    let cases = [
        (TheoremTag::FsetSubcritical, 1, 0.7, 2.0),
        (TheoremTag::FsetCritical, 1, 0.5, 3.0),
        (TheoremTag::FsetSupercritical, 2, 0.5, 2.0),
        (TheoremTag::CriticalI, 1, 0.25, 2.0),
        (TheoremTag::BmoEstimate, 1, 0.5, 3.0),
        (TheoremTag::LorentzOptimal, 1, 0.5, 2.0),
    ];
    for (tag, n, s, p) in cases {
        let err = run_embedding_suite(tag, &params(n, 16, s, p), 10).unwrap_err();
        assert!(matches!(err, Error::Config(_)), "{tag}: {err}");
    }
    // wrong suite for the tag
    assert!(matches!(
        run_identity_suite(TheoremTag::Hilbertcase, &params(1, 16, 0.5, 2.0), 10),
        Err(Error::Config(_))
    ));
}

#[test]
fn identity_embedding_ratio_at_most_one() {
    for p in [1.5, 2.0, 4.0] {
        let r = run_embedding_suite(TheoremTag::IdentityEmbedding, &params(1, 64, 0.5, p), 20).unwrap();
        assert_valid(&r);
        let c = estimate_embedding_constant(&r).unwrap();
        assert!(c <= 1.0 + 1e-10, "p = {p}: {c}");
    }
}

#[test]
fn identity_suites_are_exact() {
    for tag in [
        TheoremTag::IdentityOrder,
        TheoremTag::Semigroup,
        TheoremTag::Lifting,
        TheoremTag::Fftc,
        TheoremTag::GradientOrderings,
        TheoremTag::RieszSemigroup,
        TheoremTag::ImaginaryIsometry,
    ] {
        for (n, big_n) in [(1, 64), (2, 16)] {
            let r = run_identity_suite(tag, &params(n, big_n, 0.5, 2.0), 20).unwrap();
            assert!(r.pass, "{}", r.summary());
            assert!(r.refinement.is_none());
            let bound = match tag {
                TheoremTag::Semigroup | TheoremTag::ImaginaryIsometry | TheoremTag::IdentityOrder => 1e-12,
                _ => 1e-10,
            };
            assert!(r.aggregate.max <= bound, "{}", r.summary());
        }
    }
}

#[test]
fn frset_chain_is_consistent() {
    let r = run_embedding_suite(TheoremTag::Frset, &params(1, 32, 0.6, 2.0), 10).unwrap();
    let chain = r.checks.iter().find(|c| c.name == "chain-consistency").unwrap();
    assert!(chain.pass && chain.value <= 1e-10);
    // q = np/(n - (s-t)p) with t = s/2
    assert!((r.parameters.q.unwrap() - 2.0 / (1.0 - 0.3 * 2.0)).abs() < 1e-12);
}

#[test]
fn scale_comparison_preconditions() {
    assert!(matches!(
        run_scale_comparison(TheoremTag::Hilbertcase, &params(1, 16, 0.5, 3.0), 10),
        Err(Error::Config(_))
    ));
    let misordered = ExperimentParams {
        s0: Some(0.6),
        s1: Some(0.75),
        ..params(1, 16, 0.5, 3.0)
    };
    assert!(matches!(
        run_scale_comparison(TheoremTag::Contiguity, &misordered, 10),
        Err(Error::Config(_))
    ));
}

#[test]
fn contiguity_medians_follow_the_chain() {
    let p = ExperimentParams {
        s0: Some(0.25),
        s1: Some(0.75),
        ..params(1, 32, 0.5, 3.0)
    };
    let r = run_scale_comparison(TheoremTag::Contiguity, &p, 10).unwrap();
    assert_valid(&r);
    assert_eq!(r.companions.len(), 1);
    assert!(r.checks.iter().any(|c| c.name == "median-ordering" && c.pass), "{}", r.summary());
}

#[test]
fn nesting_reports_both_directions() {
    for p in [1.5, 2.0, 3.0] {
        let r = run_scale_comparison(TheoremTag::Nesting, &params(1, 32, 0.5, p), 10).unwrap();
        assert_valid(&r);
        let reverse = &r.companions[0];
        assert_eq!(reverse.gated, p == 2.0);
        for (a, b) in r.per_member.iter().zip(&reverse.per_member) {
            assert!((a.ratio * b.ratio - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn reports_are_deterministic() {
    let p = params(1, 32, 0.25, 2.0);
    let a = run_experiment(TheoremTag::FsetSubcritical, &p, 12).unwrap();
    let b = run_experiment(TheoremTag::FsetSubcritical, &p, 12).unwrap();
    assert_eq!(a.to_json(), b.to_json());
    assert_eq!(a.to_csv(), b.to_csv());
    let other = run_experiment(TheoremTag::FsetSubcritical, &p.clone().with_seed(43), 12).unwrap();
    assert_ne!(a.to_json(), other.to_json());
}

fn report_with(ratios: &[f64]) -> ExperimentReport {
    let mut r = run_identity_suite(TheoremTag::IdentityOrder, &params(1, 8, 0.5, 2.0), 10).unwrap();
    r.per_member = ratios
        .iter()
        .enumerate()
        .map(|(i, &ratio)| MemberRatio {
            seed: i as u64,
            label: String::new(),
            numerator: ratio,
            denominator: 1.0,
            ratio,
        })
        .collect();
    r
}

#[test]
fn constant_estimate_is_the_max() {
    assert!(matches!(estimate_embedding_constant(&report_with(&[])), Err(Error::Domain(_))));
    assert!(estimate_embedding_constant(&report_with(&[1.0; 9])).is_err());
    assert_eq!(estimate_embedding_constant(&report_with(&[2.5; 12])).unwrap(), 2.5);
    let mut ratios = vec![0.5, 1.5, 0.7, 0.9, 1.1, 0.2, 0.3, 0.4, 1.0, 0.8];
    let mut last = estimate_embedding_constant(&report_with(&ratios)).unwrap();
    for extra in [0.1, 1.7, 1.2, 3.0] {
        ratios.push(extra);
        let now = estimate_embedding_constant(&report_with(&ratios)).unwrap();
        assert!(now >= last);
        last = now;
    }
}

#[test]
fn csv_has_header_and_one_row_per_member() {
    let r = run_identity_suite(TheoremTag::Fftc, &params(1, 16, 0.5, 2.0), 10).unwrap();
    let csv = r.to_csv();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "seed,numerator,denominator,ratio");
    assert_eq!(lines.len(), 1 + r.per_member.len());
    assert!(!csv.contains('\r'));
}
