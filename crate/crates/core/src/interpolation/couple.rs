//! Finite-dimensional compatible couples.
//!
//! A [`CoupleNorm`] is a sum of weighted mixed `ℓ^p` norms of linear images,
//! `N(y) = Σ_m w_m ‖ |A_m y| ‖_{p_m}`, where `|·|` is the pointwise length of
//! vector-valued outputs. This covers the Lebesgue, Sobolev and Bessel norms
//! used by the toolkit and gives the K-solver access to adjoints and dual
//! balls.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::grid::{wavenumber_norm_sq, GridFunction, PeriodicGrid, Wavenumber};

/// Linear maps with cheap adjoints.
#[derive(Debug, Clone, PartialEq)]
pub enum LinearMap {
    Identity,
    /// Spectral gradient of real periodic data; the derivative of the
    /// Nyquist mode is dropped so the map stays real. Output is component
    /// major: all of `∂_1 y`, then all of `∂_2 y`.
    Gradient(PeriodicGrid),
    /// Real, even Fourier multiplier given per spectral slot.
    Multiplier { grid: PeriodicGrid, symbol: Vec<f64> },
}

fn to_grid(grid: &PeriodicGrid, x: &[f64]) -> GridFunction {
    GridFunction::from_real(*grid, x).expect("vector length matches grid")
}

fn derivative_symbol(grid: &PeriodicGrid, k: Wavenumber, axis: usize) -> f64 {
    let half = grid.points_per_axis() as i64 / 2;
    if k[axis] == -half {
        0.0
    } else {
        2.0 * PI * k[axis] as f64
    }
}

impl LinearMap {
    /// Number of pointwise components per output location.
    pub fn components(&self) -> usize {
        match self {
            LinearMap::Gradient(g) => g.dim(),
            _ => 1,
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        match self {
            LinearMap::Identity => x.to_vec(),
            LinearMap::Gradient(grid) => {
                let u = to_grid(grid, x);
                let mut out = Vec::with_capacity(x.len() * grid.dim());
                for axis in 0..grid.dim() {
                    let d = u.apply_multiplier(|k| Complex64::new(0.0, derivative_symbol(grid, k, axis)));
                    out.extend(d.samples().iter().map(|c| c.re));
                }
                out
            }
            LinearMap::Multiplier { grid, symbol } => {
                let u = to_grid(grid, x);
                let spectrum: Vec<Complex64> =
                    u.spectrum().iter().zip(symbol).map(|(&c, &m)| c * m).collect();
                GridFunction::from_spectrum(*grid, spectrum)
                    .expect("length matches grid")
                    .real_samples()
            }
        }
    }

    /// Adjoint with respect to the plain Euclidean inner product.
    pub fn adjoint(&self, y: &[f64]) -> Vec<f64> {
        match self {
            LinearMap::Identity => y.to_vec(),
            LinearMap::Gradient(grid) => {
                let len = grid.len();
                let mut acc = vec![0.0; len];
                for axis in 0..grid.dim() {
                    let u = to_grid(grid, &y[axis * len..(axis + 1) * len]);
                    let d = u.apply_multiplier(|k| Complex64::new(0.0, -derivative_symbol(grid, k, axis)));
                    acc.iter_mut().zip(d.samples()).for_each(|(a, c)| *a += c.re);
                }
                acc
            }
            LinearMap::Multiplier { .. } => self.apply(y),
        }
    }

    /// Operator norm on `ℓ²`.
    pub fn operator_norm(&self) -> f64 {
        match self {
            LinearMap::Identity => 1.0,
            LinearMap::Gradient(grid) => (0..grid.len())
                .map(|i| {
                    (0..grid.dim())
                        .map(|a| derivative_symbol(grid, grid.wavenumber(i), a).powi(2))
                        .sum::<f64>()
                        .sqrt()
                })
                .fold(0.0, f64::max),
            LinearMap::Multiplier { symbol, .. } => symbol.iter().fold(0.0, |m, v| m.max(v.abs())),
        }
    }

    /// `Σ_components |a(k)|²` at spectral slot `slot`.
    pub(crate) fn symbol_sq(&self, slot: usize) -> f64 {
        match self {
            LinearMap::Identity => 1.0,
            LinearMap::Gradient(grid) => (0..grid.dim())
                .map(|a| derivative_symbol(grid, grid.wavenumber(slot), a).powi(2))
                .sum(),
            LinearMap::Multiplier { symbol, .. } => symbol[slot] * symbol[slot],
        }
    }

    pub(crate) fn grid(&self) -> Option<&PeriodicGrid> {
        match self {
            LinearMap::Identity => None,
            LinearMap::Gradient(g) | LinearMap::Multiplier { grid: g, .. } => Some(g),
        }
    }

    /// `inf ‖A y‖₂ / ‖y‖₂`, zero when the map has a kernel.
    fn lower_bound(&self) -> f64 {
        match self {
            LinearMap::Identity => 1.0,
            LinearMap::Gradient(_) => 0.0,
            LinearMap::Multiplier { symbol, .. } => {
                symbol.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()))
            }
        }
    }

    fn input_len(&self) -> Option<usize> {
        match self {
            LinearMap::Identity => None,
            LinearMap::Gradient(g) | LinearMap::Multiplier { grid: g, .. } => Some(g.len()),
        }
    }
}

/// One summand `weight · ‖ |A y| ‖_p`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormTerm {
    pub map: LinearMap,
    pub exponent: f64,
    pub weight: f64,
}

impl NormTerm {
    pub fn new(map: LinearMap, exponent: f64, weight: f64) -> Result<Self> {
        if !(exponent >= 1.0) {
            return Err(Error::domain(format!("term exponent {exponent} must be >= 1")));
        }
        if !(weight > 0.0 && weight.is_finite()) {
            return Err(Error::domain(format!("term weight {weight} must be positive")));
        }
        Ok(Self {
            map,
            exponent,
            weight,
        })
    }

    /// Pointwise lengths of the image groups.
    pub(crate) fn group_lengths(&self, image: &[f64]) -> Vec<f64> {
        let c = self.map.components();
        if c == 1 {
            return image.iter().map(|v| v.abs()).collect();
        }
        let len = image.len() / c;
        (0..len)
            .map(|i| (0..c).map(|a| image[a * len + i].powi(2)).sum::<f64>().sqrt())
            .collect()
    }

    /// A norming functional for `image`: `z` with `‖ |z| ‖_{p'} ≤ 1` and
    /// `⟨z, image⟩ = ‖ |image| ‖_p`.
    pub(crate) fn norming_direction(&self, image: &[f64]) -> Vec<f64> {
        let c = self.map.components();
        let len = image.len() / c;
        let lengths = self.group_lengths(image);
        let total = plain_lp(&lengths, self.exponent);
        let mut z = vec![0.0; image.len()];
        if total == 0.0 {
            return z;
        }
        let p = self.exponent;
        let factor = |l: f64| -> f64 {
            if p == 1.0 {
                1.0
            } else if p.is_infinite() {
                0.0
            } else {
                (l / total).powf(p - 1.0)
            }
        };
        for (i, &l) in lengths.iter().enumerate() {
            if l > 0.0 {
                let f = factor(l) / l;
                for a in 0..c {
                    z[a * len + i] = image[a * len + i] * f;
                }
            }
        }
        if p.is_infinite() {
            let (i, l) = lengths
                .iter()
                .enumerate()
                .fold((0, 0.0), |best, (i, &l)| if l > best.1 { (i, l) } else { best });
            for a in 0..c {
                z[a * len + i] = image[a * len + i] / l;
            }
        }
        z
    }

    pub(crate) fn norm_of_image(&self, image: &[f64]) -> f64 {
        let lengths = self.group_lengths(image);
        plain_lp(&lengths, self.exponent)
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.weight * self.norm_of_image(&self.map.apply(x))
    }
}

/// Unweighted `ℓ^p` norm of nonnegative entries, overflow-safe.
pub(crate) fn plain_lp(values: &[f64], p: f64) -> f64 {
    let max = values.iter().fold(0.0f64, |m, &v| m.max(v));
    if p.is_infinite() || max == 0.0 {
        return max;
    }
    max * values.iter().map(|&v| (v / max).powf(p)).sum::<f64>().powf(1.0 / p)
}

/// A norm on `ℝ^d` assembled from [`NormTerm`]s.
#[derive(Debug, Clone, PartialEq)]
pub struct CoupleNorm {
    label: String,
    terms: Vec<NormTerm>,
}

impl CoupleNorm {
    pub fn new(label: impl Into<String>, terms: Vec<NormTerm>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::config("a couple norm needs at least one term"));
        }
        Ok(Self {
            label: label.into(),
            terms,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn terms(&self) -> &[NormTerm] {
        &self.terms
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|t| t.value(x)).sum()
    }

    /// `κ` with `‖y‖₂ ≤ κ N(y)` on `ℝ^d`, or `None` if no term controls `ℓ²`.
    pub(crate) fn l2_control(&self, d: usize) -> Option<f64> {
        self.terms
            .iter()
            .filter_map(|t| {
                let lower = t.map.lower_bound();
                if lower <= 0.0 {
                    return None;
                }
                // ‖z‖₂ ≤ d^{max(0, 1/2 - 1/p)} ‖z‖_p
                let e = (0.5 - 1.0 / t.exponent).max(0.0);
                Some((d as f64).powf(e) / (t.weight * lower))
            })
            .fold(None, |best: Option<f64>, k| Some(best.map_or(k, |b| b.min(k))))
    }

    /// Euclidean norm scaled by `c`.
    pub fn euclidean(c: f64) -> Result<Self> {
        Self::new("l2", vec![NormTerm::new(LinearMap::Identity, 2.0, c)?])
    }

    /// Rectangle-rule `L^p` norm of `d` samples of measure `1/d` each.
    pub fn lebesgue(d: usize, p: f64) -> Result<Self> {
        let cell = 1.0 / d as f64;
        let weight = if p.is_infinite() { 1.0 } else { cell.powf(1.0 / p) };
        let label = if p.is_infinite() { "Linf".to_string() } else { format!("L{p}") };
        Self::new(label, vec![NormTerm::new(LinearMap::Identity, p, weight)?])
    }

    /// `‖u‖_p + ‖∇u‖_p` on `grid`.
    pub fn sobolev(grid: &PeriodicGrid, p: f64) -> Result<Self> {
        let weight = if p.is_infinite() {
            1.0
        } else {
            grid.cell_volume().powf(1.0 / p)
        };
        Self::new(
            format!("W1,{p}"),
            vec![
                NormTerm::new(LinearMap::Identity, p, weight)?,
                NormTerm::new(LinearMap::Gradient(*grid), p, weight)?,
            ],
        )
    }

    /// `‖Λ_{-s}u‖_2` on `grid`.
    pub fn bessel_l2(grid: &PeriodicGrid, s: f64) -> Result<Self> {
        let symbol = (0..grid.len())
            .map(|i| (1.0 + 4.0 * PI * PI * wavenumber_norm_sq(grid.wavenumber(i))).powf(s / 2.0))
            .collect();
        Self::new(
            format!("H{s},2"),
            vec![NormTerm::new(
                LinearMap::Multiplier {
                    grid: *grid,
                    symbol,
                },
                2.0,
                grid.cell_volume().sqrt(),
            )?],
        )
    }

    fn check_dimension(&self, d: usize) -> Result<()> {
        for t in &self.terms {
            if let Some(len) = t.map.input_len() {
                if len != d {
                    return Err(Error::Shape {
                        expected: d,
                        got: len,
                    });
                }
            }
        }
        Ok(())
    }
}

/// Two norms on one `ℝ^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormCouple {
    dimension: usize,
    norm0: CoupleNorm,
    norm1: CoupleNorm,
}

const PROBES: usize = 8;
const PROBE_TOL: f64 = 1e-9;

impl NormCouple {
    /// Builds the couple after spot-checking homogeneity and the triangle
    /// inequality of both norms on seeded random probes.
    pub fn new(dimension: usize, norm0: CoupleNorm, norm1: CoupleNorm) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::config("couple dimension must be positive"));
        }
        for n in [&norm0, &norm1] {
            n.check_dimension(dimension)?;
            spot_check(n, dimension)?;
        }
        let mut grids = norm0.terms.iter().chain(&norm1.terms).filter_map(|t| t.map.grid());
        if let Some(first) = grids.next() {
            if grids.any(|g| g != first) {
                return Err(Error::config("couple norms live on different grids"));
            }
        }
        Ok(Self {
            dimension,
            norm0,
            norm1,
        })
    }

    /// `(L¹, L∞)` on `d` samples of measure `1/d`.
    pub fn l1_linf(d: usize) -> Result<Self> {
        Self::new(d, CoupleNorm::lebesgue(d, 1.0)?, CoupleNorm::lebesgue(d, f64::INFINITY)?)
    }

    /// `(L^p, W^{1,p})` on a grid.
    pub fn lp_w1p(grid: &PeriodicGrid, p: f64) -> Result<Self> {
        Self::new(grid.len(), CoupleNorm::lebesgue(grid.len(), p)?, CoupleNorm::sobolev(grid, p)?)
    }

    /// `(L², H^{s,2})` on a grid.
    pub fn l2_hs2(grid: &PeriodicGrid, s: f64) -> Result<Self> {
        Self::new(grid.len(), CoupleNorm::lebesgue(grid.len(), 2.0)?, CoupleNorm::bessel_l2(grid, s)?)
    }

    /// `(E₁, E₀)`.
    pub fn swapped(&self) -> Self {
        Self {
            dimension: self.dimension,
            norm0: self.norm1.clone(),
            norm1: self.norm0.clone(),
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn norm0(&self) -> &CoupleNorm {
        &self.norm0
    }

    pub fn norm1(&self) -> &CoupleNorm {
        &self.norm1
    }

    pub fn labels(&self) -> (&str, &str) {
        (self.norm0.label(), self.norm1.label())
    }
}

fn spot_check(norm: &CoupleNorm, d: usize) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x6b5f_636f_7570);
    let mut probe = || -> Vec<f64> { (0..d).map(|_| StandardNormal.sample(&mut rng)).collect() };
    for _ in 0..PROBES {
        let x = probe();
        let y = probe();
        let nx = norm.value(&x);
        let ny = norm.value(&y);
        if !(nx > 0.0 && nx.is_finite()) {
            return Err(Error::config(format!("{} is not positive on a probe", norm.label())));
        }
        let c = -2.5;
        let scaled: Vec<f64> = x.iter().map(|v| c * v).collect();
        if (norm.value(&scaled) - c.abs() * nx).abs() > PROBE_TOL * nx.max(1.0) * c.abs() {
            return Err(Error::config(format!("{} fails homogeneity", norm.label())));
        }
        let sum: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
        if norm.value(&sum) > nx + ny + PROBE_TOL * (nx + ny).max(1.0) {
            return Err(Error::config(format!("{} fails the triangle inequality", norm.label())));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;

    fn dot(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| x * y).sum()
    }

    #[test]
    fn adjoints_are_adjoint() {
        for dim in [1, 2] {
            let g = make_grid(dim, 8).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(1);
            let mut v = |n: usize| -> Vec<f64> { (0..n).map(|_| StandardNormal.sample(&mut rng)).collect() };
            let maps = [
                LinearMap::Gradient(g),
                LinearMap::Multiplier {
                    grid: g,
                    symbol: (0..g.len()).map(|i| 1.0 + wavenumber_norm_sq(g.wavenumber(i))).collect(),
                },
            ];
            for m in maps {
                let x = v(g.len());
                let y = v(g.len() * m.components());
                let lhs = dot(&m.apply(&x), &y);
                let rhs = dot(&x, &m.adjoint(&y));
                assert!((lhs - rhs).abs() < 1e-10 * lhs.abs().max(1.0), "{m:?}");
            }
        }
    }

    #[test]
    fn gradient_operator_norm_bound() {
        let g = make_grid(1, 16).unwrap();
        let m = LinearMap::Gradient(g);
        assert!((m.operator_norm() - 2.0 * PI * 7.0).abs() < 1e-12);
    }

    #[test]
    fn lebesgue_matches_quadrature() {
        let g = make_grid(1, 16).unwrap();
        let x: Vec<f64> = (0..16).map(|i| (i as f64 * 0.7).sin()).collect();
        let u = GridFunction::from_real(g, &x).unwrap();
        for p in [1.0, 2.0, 3.5, f64::INFINITY] {
            let a = CoupleNorm::lebesgue(16, p).unwrap().value(&x);
            let b = crate::grid::quadrature_lp(&u, p).unwrap();
            assert!((a - b).abs() < 1e-14);
        }
        let w = CoupleNorm::sobolev(&g, 2.0).unwrap().value(&x);
        assert!(w > CoupleNorm::lebesgue(16, 2.0).unwrap().value(&x));
    }

    #[test]
    fn couple_rejects_non_norms() {
        let g = make_grid(1, 8).unwrap();
        // gradient alone vanishes on constants but not on random probes;
        // a negative weight is rejected at term construction instead
        assert!(NormTerm::new(LinearMap::Gradient(g), 2.0, -1.0).is_err());
        let wrong = CoupleNorm::sobolev(&make_grid(1, 16).unwrap(), 2.0).unwrap();
        assert!(NormCouple::new(8, CoupleNorm::lebesgue(8, 2.0).unwrap(), wrong).is_err());
    }
}
