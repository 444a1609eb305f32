use besselkit_core::interpolation::{k_exact_l1_linf, truncation_split};
use besselkit_core::norms::{
    bessel_norm, bmo_norm, decreasing_rearrangement, gagliardo_seminorm, holder_seminorm, lorentz_norm,
    sobolev_w1p_norm,
};
use besselkit_core::potentials::{bessel_potential, riesz_potential};
use besselkit_core::{make_grid, quadrature_lp, synthesize, FunctionSpec, GridFunction, MultiplierOrder};
use num_complex::Complex64;
use proptest::prelude::*;

fn function(dim: usize, band: usize, seed: u64, zero_mean: bool) -> GridFunction {
    let g = make_grid(dim, if dim == 1 { 64 } else { 16 }).unwrap();
    synthesize(&FunctionSpec::random(band, seed, zero_mean), &g).unwrap()
}

fn max_diff(a: &GridFunction, b: &GridFunction) -> f64 {
    a.sub(b).unwrap().magnitudes().into_iter().fold(0.0, f64::max)
}

fn sup(u: &GridFunction) -> f64 {
    u.magnitudes().into_iter().fold(0.0, f64::max)
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn fft_round_trip(dim in 1usize..=2, band in 1usize..7, seed in any::<u64>()) {
        let u = function(dim, band, seed, false);
        prop_assert!(u.round_trip_error() <= 1e-13 * sup(&u));
    }

    #[test]
    fn parseval(dim in 1usize..=2, band in 1usize..7, seed in any::<u64>()) {
        let u = function(dim, band, seed, false);
        prop_assert!(close(quadrature_lp(&u, 2.0).unwrap(), u.l2_spectral(), 1e-12));
    }

    #[test]
    fn norms_are_homogeneous(band in 1usize..7, seed in any::<u64>(), c in -5.0f64..5.0) {
        prop_assume!(c.abs() > 1e-3);
        let u = function(1, band, seed, false);
        let v = u.scale(Complex64::new(c, 0.0));
        let a = c.abs();
        let pairs = [
            (quadrature_lp(&u, 1.5).unwrap(), quadrature_lp(&v, 1.5).unwrap()),
            (bessel_norm(&u, 0.7, 3.0).unwrap(), bessel_norm(&v, 0.7, 3.0).unwrap()),
            (sobolev_w1p_norm(&u, 2.0).unwrap(), sobolev_w1p_norm(&v, 2.0).unwrap()),
            (gagliardo_seminorm(&u, 0.4, 2.0).unwrap(), gagliardo_seminorm(&v, 0.4, 2.0).unwrap()),
            (holder_seminorm(&u, 0.5).unwrap(), holder_seminorm(&v, 0.5).unwrap()),
            (bmo_norm(&u), bmo_norm(&v)),
            (lorentz_norm(&u, 2.0, 1.0).unwrap(), lorentz_norm(&v, 2.0, 1.0).unwrap()),
        ];
        for (i, (x, y)) in pairs.into_iter().enumerate() {
            prop_assert!(close(a * x, y, 1e-12), "norm {}: {} vs {}", i, a * x, y);
        }
    }

    #[test]
    fn seminorms_vanish_on_constants(c in -10.0f64..10.0) {
        let u = GridFunction::constant(make_grid(1, 32).unwrap(), c);
        prop_assert_eq!(gagliardo_seminorm(&u, 0.5, 2.0).unwrap(), 0.0);
        prop_assert_eq!(holder_seminorm(&u, 0.5).unwrap(), 0.0);
        prop_assert!(bmo_norm(&u) <= 1e-14 * c.abs().max(1.0));
    }

    #[test]
    fn holder_intermediate(seed in any::<u64>(), p0 in 1.0f64..3.0, gap in 0.1f64..4.0, theta in 0.05f64..0.95) {
        let u = function(1, 8, seed, false);
        let p1 = p0 + gap;
        let p = 1.0 / ((1.0 - theta) / p0 + theta / p1);
        let bound = quadrature_lp(&u, p0).unwrap().powf(1.0 - theta) * quadrature_lp(&u, p1).unwrap().powf(theta);
        prop_assert!(quadrature_lp(&u, p).unwrap() <= bound * (1.0 + 1e-10));
    }

    #[test]
    fn bessel_semigroup(dim in 1usize..=2, seed in any::<u64>(), a in -2.0f64..2.0, b in -2.0f64..2.0, t in -3.0f64..3.0) {
        let u = function(dim, 5, seed, false);
        let o1 = MultiplierOrder::new(a, t).unwrap();
        let o2 = MultiplierOrder::real(b).unwrap();
        let composed = bessel_potential(&bessel_potential(&u, o1), o2);
        let direct = bessel_potential(&u, MultiplierOrder::new(a + b, t).unwrap());
        prop_assert!(max_diff(&composed, &direct) <= 1e-12 * sup(&direct));
    }

    #[test]
    fn bessel_potential_is_linear(seed in any::<u64>(), s in -1.5f64..1.5, a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let u = function(1, 6, seed, false);
        let v = function(1, 9, seed.wrapping_add(1), false);
        let order = MultiplierOrder::real(s).unwrap();
        let (ca, cb) = (Complex64::new(a, 0.0), Complex64::new(b, 0.0));
        let lhs = bessel_potential(&u.combine(ca, &v, cb).unwrap(), order);
        let rhs = bessel_potential(&u, order).combine(ca, &bessel_potential(&v, order), cb).unwrap();
        prop_assert!(max_diff(&lhs, &rhs) <= 1e-12 * sup(&lhs).max(1.0));
    }

    #[test]
    fn riesz_semigroup(dim in 1usize..=2, seed in any::<u64>(), a in 0.05f64..0.45, b in 0.05f64..0.45) {
        let u = function(dim, 5, seed, true);
        let composed = riesz_potential(&riesz_potential(&u, a).unwrap(), b).unwrap();
        let direct = riesz_potential(&u, a + b).unwrap();
        prop_assert!(max_diff(&composed, &direct) <= 1e-12 * sup(&direct));
    }

    #[test]
    fn log_convexity(seed in any::<u64>(), s0 in -1.0f64..1.0, gap in 0.1f64..2.0, theta in 0.0f64..1.0) {
        let u = function(1, 10, seed, false);
        let s1 = s0 + gap;
        let mid = bessel_norm(&u, (1.0 - theta) * s0 + theta * s1, 2.0).unwrap();
        let bound = bessel_norm(&u, s0, 2.0).unwrap().powf(1.0 - theta) * bessel_norm(&u, s1, 2.0).unwrap().powf(theta);
        prop_assert!(mid <= bound * (1.0 + 1e-12));
    }

    #[test]
    fn bessel_scale_nesting(seed in any::<u64>(), t in -1.0f64..1.0, gap in 0.0f64..1.5) {
        let u = function(2, 5, seed, false);
        prop_assert!(bessel_norm(&u, t, 2.0).unwrap() <= bessel_norm(&u, t + gap, 2.0).unwrap() * (1.0 + 1e-12));
    }

    #[test]
    fn pairing(seed in any::<u64>(), s in -2.0f64..2.0) {
        let u = function(1, 8, seed, false);
        let v = function(1, 8, seed ^ 0x5555, false);
        let pair = u.inner_product(&v).unwrap().norm();
        let bound = bessel_norm(&u, s, 2.0).unwrap() * bessel_norm(&v, -s, 2.0).unwrap();
        prop_assert!(pair <= bound * (1.0 + 1e-12));
    }

    #[test]
    fn rearrangement_is_equimeasurable(dim in 1usize..=2, seed in any::<u64>(), p in 1.0f64..6.0) {
        let u = function(dim, 6, seed, false);
        let r = decreasing_rearrangement(&u);
        prop_assert!(r.values().windows(2).all(|w| w[0] >= w[1]));
        prop_assert!(close(r.lp_norm(p).unwrap(), quadrature_lp(&u, p).unwrap(), 1e-12));
        prop_assert!(close(r.total_measure(), 1.0, 1e-12));
    }

    #[test]
    fn exact_k_is_concave_and_bounded(seed in any::<u64>(), t in 0.001f64..3.0, lambda in 0.1f64..0.9) {
        let u = function(1, 8, seed, false);
        let k = |t: f64| k_exact_l1_linf(&u, t).unwrap();
        prop_assert!(k(t) <= quadrature_lp(&u, 1.0).unwrap() * (1.0 + 1e-12));
        prop_assert!(k(t) <= t * sup(&u) * (1.0 + 1e-12));
        let (a, b) = (t, 2.0 * t + 0.1);
        prop_assert!(k(lambda * a + (1.0 - lambda) * b) >= (lambda * k(a) + (1.0 - lambda) * k(b)) * (1.0 - 1e-12));
        let level = 0.5 * sup(&u);
        let (g, h) = truncation_split(&u, level).unwrap();
        prop_assert!(k(t) <= quadrature_lp(&g, 1.0).unwrap() + t * quadrature_lp(&h, f64::INFINITY).unwrap() + 1e-14);
    }
}
