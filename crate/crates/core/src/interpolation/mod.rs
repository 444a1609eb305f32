//! Peetre K-functionals and real interpolation norms.
//!
//! `K(t, x; E₀, E₁) = inf_{x = x₀ + x₁} ‖x₀‖_{E₀} + t ‖x₁‖_{E₁}`.
//! The `(L¹, L∞)` couple has the closed form `K(t) = ∫_0^t u*`; other
//! finite-dimensional couples go through the primal–dual solver in
//! [`solver`].

mod couple;
mod solver;

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use couple::{CoupleNorm, LinearMap, NormCouple, NormTerm};
pub use solver::{k_numeric, k_numeric_with, KSolution, SolverOptions};

use crate::error::{Error, Result};
use crate::grid::{wavenumber_norm_sq, GridFunction};
use crate::norms::{decreasing_rearrangement, Rearrangement};

fn check_t(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("K parameter t = {t} must be positive and finite")))
    }
}

/// `K(t, u; L¹, L∞) = ∫_0^t u*(τ) dτ` on the unit-measure torus.
pub fn k_exact_l1_linf(u: &GridFunction, t: f64) -> Result<f64> {
    check_t(t)?;
    Ok(decreasing_rearrangement(u).integral_to(t))
}

/// The optimal `(L¹, L∞)` split at `t` for real samples of measure
/// `1/len` each: `x₁` clips `u` at the level `u*(t)`.
pub fn k_exact_l1_linf_split(samples: &[f64], t: f64) -> Result<KSolution> {
    check_t(t)?;
    let r = Rearrangement::from_samples(samples);
    let level = if t >= r.total_measure() { 0.0 } else { r.value_at(t) };
    let x1: Vec<f64> = samples.iter().map(|&v| v.signum() * v.abs().min(level)).collect();
    let x0: Vec<f64> = samples.iter().zip(&x1).map(|(a, b)| a - b).collect();
    Ok(KSolution {
        value: r.integral_to(t),
        x0,
        x1,
        gap: 0.0,
        iterations: 0,
    })
}

/// Splits `u` at height `t` into `g = u·1{|u| > t}` and `h = u·1{|u| ≤ t}`.
pub fn truncation_split(u: &GridFunction, t: f64) -> Result<(GridFunction, GridFunction)> {
    if !(t >= 0.0) {
        return Err(Error::domain(format!("truncation height {t} must be nonnegative")));
    }
    let g = u.map_samples(|c| if c.norm() > t { c } else { Complex64::new(0.0, 0.0) });
    let h = u.map_samples(|c| if c.norm() > t { Complex64::new(0.0, 0.0) } else { c });
    Ok((g, h))
}

/// Quadratic K-functional of `(L², H^{s₁,2})`, computed mode by mode:
/// `K₂(t)² = Σ_k |ĉ_k|² t² m_k² / (1 + t² m_k²)` with
/// `m_k = (1 + 4π²|k|²)^{s₁/2}`. It satisfies `K₂ ≤ K ≤ √2 K₂`.
pub fn k2_envelope_p2(u: &GridFunction, t: f64, s1: f64) -> Result<f64> {
    check_t(t)?;
    if !(s1 > 0.0) {
        return Err(Error::domain(format!("smoothness s1 = {s1} must be positive")));
    }
    let grid = u.grid();
    let total: f64 = u
        .spectrum()
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let m2 = (1.0 + 4.0 * std::f64::consts::PI.powi(2) * wavenumber_norm_sq(grid.wavenumber(i))).powf(s1);
            let tm2 = t * t * m2;
            c.norm_sqr() * tm2 / (1.0 + tm2)
        })
        .sum();
    Ok(total.sqrt())
}

/// One evaluated point of a K curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KPoint {
    pub t: f64,
    pub value: f64,
    /// `(‖x₀‖_{E₀}, ‖x₁‖_{E₁})` of the split, when the evaluator has one.
    pub split_norms: Option<(f64, f64)>,
}

/// Anything that can evaluate `t ↦ K(t, x)` for a fixed `x`.
pub trait KFunctional {
    /// `(‖x‖_{E₀}, ‖x‖_{E₁})`.
    fn endpoint_norms(&self) -> (f64, f64);

    fn evaluate(&mut self, t: f64) -> Result<KPoint>;
}

/// Closed-form `(L¹, L∞)` evaluator.
#[derive(Debug, Clone)]
pub struct ExactL1Linf {
    samples: Vec<f64>,
    rearrangement: Rearrangement,
}

impl ExactL1Linf {
    pub fn new(samples: &[f64]) -> Self {
        Self {
            samples: samples.to_vec(),
            rearrangement: Rearrangement::from_samples(samples),
        }
    }

    /// Uses the sample magnitudes, so the split is of `|u|`.
    pub fn from_grid(u: &GridFunction) -> Self {
        Self::new(&u.magnitudes())
    }
}

impl KFunctional for ExactL1Linf {
    fn endpoint_norms(&self) -> (f64, f64) {
        let r = &self.rearrangement;
        (r.integral_to(r.total_measure()), r.values().first().copied().unwrap_or(0.0))
    }

    fn evaluate(&mut self, t: f64) -> Result<KPoint> {
        let s = k_exact_l1_linf_split(&self.samples, t)?;
        let cell = self.rearrangement.cell();
        let n0 = s.x0.iter().map(|v| v.abs()).sum::<f64>() * cell;
        let n1 = s.x1.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        Ok(KPoint {
            t,
            value: s.value,
            split_norms: Some((n0, n1)),
        })
    }
}

/// Solver-backed evaluator with warm starts from the nearest evaluated `t`.
#[derive(Debug, Clone)]
pub struct NumericK {
    couple: NormCouple,
    x: Vec<f64>,
    options: SolverOptions,
    warm: BTreeMap<u64, Vec<f64>>,
}

impl NumericK {
    pub fn new(couple: NormCouple, x: &[f64], options: SolverOptions) -> Result<Self> {
        if x.len() != couple.dimension() {
            return Err(Error::Shape {
                expected: couple.dimension(),
                got: x.len(),
            });
        }
        Ok(Self {
            couple,
            x: x.to_vec(),
            options,
            warm: BTreeMap::new(),
        })
    }

    pub fn couple(&self) -> &NormCouple {
        &self.couple
    }

    fn nearest_warm(&self, t: f64) -> Option<&Vec<f64>> {
        let key = t.to_bits();
        let below = self.warm.range(..=key).next_back();
        let above = self.warm.range(key..).next();
        match (below, above) {
            (Some(b), Some(a)) => {
                let db = (t / f64::from_bits(*b.0)).ln().abs();
                let da = (f64::from_bits(*a.0) / t).ln().abs();
                Some(if db <= da { b.1 } else { a.1 })
            }
            (Some(b), None) => Some(b.1),
            (None, Some(a)) => Some(a.1),
            (None, None) => None,
        }
    }
}

impl KFunctional for NumericK {
    fn endpoint_norms(&self) -> (f64, f64) {
        (self.couple.norm0().value(&self.x), self.couple.norm1().value(&self.x))
    }

    fn evaluate(&mut self, t: f64) -> Result<KPoint> {
        check_t(t)?;
        let warm = self.nearest_warm(t).cloned();
        let s = k_numeric_with(&self.couple, &self.x, t, &self.options, warm.as_deref())?;
        let norms = (self.couple.norm0().value(&s.x0), self.couple.norm1().value(&s.x1));
        self.warm.insert(t.to_bits(), s.x1);
        Ok(KPoint {
            t,
            value: s.value,
            split_norms: Some(norms),
        })
    }
}

/// The K-functional of the swapped couple, `K'(t) = t K(1/t)`.
#[derive(Debug, Clone)]
pub struct Swapped<K>(pub K);

impl<K: KFunctional> KFunctional for Swapped<K> {
    fn endpoint_norms(&self) -> (f64, f64) {
        let (a, b) = self.0.endpoint_norms();
        (b, a)
    }

    fn evaluate(&mut self, t: f64) -> Result<KPoint> {
        check_t(t)?;
        let p = self.0.evaluate(1.0 / t)?;
        Ok(KPoint {
            t,
            value: t * p.value,
            split_norms: p.split_norms.map(|(a, b)| (b, a)),
        })
    }
}

/// K values on a list of `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KCurve {
    pub points: Vec<KPoint>,
    pub endpoint_norms: (f64, f64),
}

impl KCurve {
    pub fn evaluate(k: &mut dyn KFunctional, ts: &[f64]) -> Result<Self> {
        let points = ts.iter().map(|&t| k.evaluate(t)).collect::<Result<Vec<_>>>()?;
        Ok(Self {
            points,
            endpoint_norms: k.endpoint_norms(),
        })
    }

    /// Checks the shape every K-functional has on increasing `t`:
    /// nonnegative, nondecreasing, `K(t)/t` nonincreasing, concave, and
    /// below `min(‖x‖₀, t‖x‖₁)`. `rel_tol` absorbs solver error.
    pub fn validate(&self, rel_tol: f64) -> Result<()> {
        let (n0, n1) = self.endpoint_norms;
        let fail = |what: String, value: f64| {
            Err(Error::Numerical {
                message: format!("K curve violates {what}"),
                best: value,
                residual: rel_tol,
            })
        };
        let slack = |v: f64| rel_tol * v.abs().max(f64::MIN_POSITIVE);
        for w in self.points.windows(2) {
            if w[1].t <= w[0].t {
                return Err(Error::domain("K curve t values must increase"));
            }
        }
        for p in &self.points {
            if p.value < 0.0 {
                return fail(format!("nonnegativity at t = {}", p.t), p.value);
            }
            let cap = n0.min(p.t * n1);
            if p.value > cap + slack(cap) {
                return fail(format!("the endpoint bound at t = {}", p.t), p.value);
            }
        }
        for w in self.points.windows(2) {
            let (a, b) = (&w[0], &w[1]);
            if b.value < a.value - slack(a.value) {
                return fail(format!("monotonicity on [{}, {}]", a.t, b.t), b.value);
            }
            if b.value / b.t > a.value / a.t + slack(a.value / a.t) {
                return fail(format!("K(t)/t monotonicity on [{}, {}]", a.t, b.t), b.value);
            }
        }
        for w in self.points.windows(3) {
            let chord = w[0].value + (w[2].value - w[0].value) * (w[1].t - w[0].t) / (w[2].t - w[0].t);
            if w[1].value < chord - slack(w[1].value) {
                return fail(format!("concavity at t = {}", w[1].t), w[1].value);
            }
        }
        Ok(())
    }
}

/// Points per decade of the logarithmic `t` grid.
pub const POINTS_PER_DECADE: i64 = 32;
/// Largest relative mass allowed outside the integrated `t` range.
pub const TAIL_FRACTION: f64 = 1e-3;
const MAX_DECADES: i64 = 60;

/// Result of a real interpolation norm evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterpolationNorm {
    pub value: f64,
    pub t_min: f64,
    pub t_max: f64,
    pub evaluations: usize,
    /// Analytic bound on the omitted tails relative to the computed value
    /// (for `q = ∞`, the tail suprema relative to the computed supremum).
    pub tail_fraction: f64,
}

/// `‖x‖_{θ,q} = (∫_0^∞ (t^{-θ} K(t, x))^q dt/t)^{1/q}` (a supremum for
/// `q = ∞`), by the trapezoid rule in `ln t` on a grid anchored at
/// `t* = ‖x‖₀/‖x‖₁`. The range grows until the tail bounds
/// `K ≤ t‖x‖₁` below and `K ≤ ‖x‖₀` above certify the omitted part.
pub fn real_interp_norm(k: &mut dyn KFunctional, theta: f64, q: f64) -> Result<InterpolationNorm> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::domain(format!("θ = {theta} outside (0, 1)")));
    }
    if !(q >= 1.0) {
        return Err(Error::domain(format!("q = {q} must be >= 1")));
    }
    let (n0, n1) = k.endpoint_norms();
    if n0 == 0.0 || n1 == 0.0 {
        return Ok(InterpolationNorm {
            value: 0.0,
            t_min: 1.0,
            t_max: 1.0,
            evaluations: 0,
            tail_fraction: 0.0,
        });
    }
    let anchor = n0 / n1;
    let at = |j: i64| anchor * 10f64.powf(j as f64 / POINTS_PER_DECADE as f64);
    let step = std::f64::consts::LN_10 / POINTS_PER_DECADE as f64;
    let mut values: BTreeMap<i64, f64> = BTreeMap::new();
    let (mut lo, mut hi) = (-2 * POINTS_PER_DECADE, 2 * POINTS_PER_DECADE);

    let mut fill = |values: &mut BTreeMap<i64, f64>, lo: i64, hi: i64| -> Result<()> {
        // evaluate outward from the anchor so warm starts stay close
        let mut order: Vec<i64> = (lo..=hi).filter(|j| !values.contains_key(j)).collect();
        order.sort_by_key(|j| j.abs());
        for j in order {
            let t = at(j);
            let p = k.evaluate(t)?;
            let f = if q.is_infinite() {
                t.powf(-theta) * p.value
            } else {
                (t.powf(-theta) * p.value).powf(q)
            };
            values.insert(j, f);
        }
        Ok(())
    };

    loop {
        fill(&mut values, lo, hi)?;
        let f: Vec<f64> = (lo..=hi).map(|j| values[&j]).collect();
        let (estimate, lo_tail, hi_tail, need_lo, need_hi) = if q.is_infinite() {
            let sup = f.iter().fold(0.0f64, |m, &v| m.max(v));
            let lo_tail = n1 * at(lo).powf(1.0 - theta);
            let hi_tail = n0 * at(hi).powf(-theta);
            // t where the tail bounds drop to the current supremum
            let need_lo = (sup / n1).powf(1.0 / (1.0 - theta));
            let need_hi = (n0 / sup).powf(1.0 / theta);
            (sup, lo_tail / sup, hi_tail / sup, need_lo, need_hi)
        } else {
            let integral = step * (f.iter().sum::<f64>() - 0.5 * (f[0] + f[f.len() - 1]));
            let a = (1.0 - theta) * q;
            let b = theta * q;
            let lo_tail = n1.powf(q) * at(lo).powf(a) / a;
            let hi_tail = n0.powf(q) * at(hi).powf(-b) / b;
            let budget = 0.5 * TAIL_FRACTION * integral;
            let need_lo = (budget * a / n1.powf(q)).powf(1.0 / a);
            let need_hi = (n0.powf(q) / (budget * b)).powf(1.0 / b);
            (integral, lo_tail / integral, hi_tail / integral, need_lo, need_hi)
        };
        let covered = if q.is_infinite() {
            lo_tail <= 1.0 && hi_tail <= 1.0
        } else {
            lo_tail.max(hi_tail) <= 0.5 * TAIL_FRACTION
        };
        if covered {
            let value = if q.is_infinite() { estimate } else { estimate.powf(1.0 / q) };
            return Ok(InterpolationNorm {
                value,
                t_min: at(lo),
                t_max: at(hi),
                evaluations: values.len(),
                tail_fraction: if q.is_infinite() { lo_tail.max(hi_tail) } else { lo_tail + hi_tail },
            });
        }
        let j_of = |t: f64| (t / anchor).log10() * POINTS_PER_DECADE as f64;
        let (want_lo, want_hi) = (j_of(need_lo).floor(), j_of(need_hi).ceil());
        let span = want_hi.max(hi as f64) - want_lo.min(lo as f64);
        let new_lo = lo.min(want_lo.max(i64::MIN as f64 / 4.0) as i64);
        let new_hi = hi.max(want_hi.min(i64::MAX as f64 / 4.0) as i64);
        if !(span <= (MAX_DECADES * POINTS_PER_DECADE) as f64) || (new_lo == lo && new_hi == hi) {
            return Err(Error::Range {
                message: format!(
                    "tails of the θ = {theta}, q = {q} integral need t in [{:e}, {:e}]",
                    need_lo, need_hi
                ),
                t_min: need_lo,
                t_max: need_hi,
            });
        }
        lo = new_lo;
        hi = new_hi;
    }
}
