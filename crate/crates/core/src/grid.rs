//! Periodic grids on the unit torus and sampled functions with their
//! Fourier coefficients.
//!
//! Coefficients follow the convention `c_k = ∫ f(x) e^{-2πi k·x} dx`,
//! approximated by the rectangle rule, so `c_k = N^{-n} Σ_j f(x_j) e^{-2πi k·x_j}`.
//! Frequency `k` on an axis of `N` points is `j` for `j < N/2` and `j - N`
//! otherwise.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform grid on the unit torus `[0,1)^n`, `n ∈ {1, 2}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PeriodicGrid {
    dim: usize,
    points_per_axis: usize,
}

/// Integer frequency vector. The second entry is zero on one-dimensional grids.
pub type Wavenumber = [i64; 2];

pub fn make_grid(dim: usize, points_per_axis: usize) -> Result<PeriodicGrid> {
    PeriodicGrid::new(dim, points_per_axis)
}

impl PeriodicGrid {
    pub fn new(dim: usize, points_per_axis: usize) -> Result<Self> {
        if !(1..=2).contains(&dim) {
            return Err(Error::config(format!(
                "dimension {dim} unsupported (expected 1 or 2)"
            )));
        }
        if points_per_axis < 4 || !points_per_axis.is_power_of_two() {
            return Err(Error::config(format!(
                "points per axis {points_per_axis} must be a power of two >= 4"
            )));
        }
        Ok(Self {
            dim,
            points_per_axis,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points_per_axis(&self) -> usize {
        self.points_per_axis
    }

    /// Total number of grid points, `N^n`.
    pub fn len(&self) -> usize {
        self.points_per_axis.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Volume of one grid cell, `N^{-n}`.
    pub fn cell_volume(&self) -> f64 {
        1.0 / self.len() as f64
    }

    pub fn spacing(&self) -> f64 {
        1.0 / self.points_per_axis as f64
    }

    /// The same torus with twice as many points per axis.
    pub fn refined(&self) -> Self {
        Self {
            dim: self.dim,
            points_per_axis: 2 * self.points_per_axis,
        }
    }

    /// Multi-index of a flat (row-major) position.
    pub fn index(&self, flat: usize) -> [usize; 2] {
        let n = self.points_per_axis;
        if self.dim == 1 {
            [flat, 0]
        } else {
            [flat / n, flat % n]
        }
    }

    pub fn flat(&self, idx: [usize; 2]) -> usize {
        if self.dim == 1 {
            idx[0]
        } else {
            idx[0] * self.points_per_axis + idx[1]
        }
    }

    /// Coordinates of grid point `flat`.
    pub fn point(&self, flat: usize) -> [f64; 2] {
        let h = self.spacing();
        let [i, j] = self.index(flat);
        [i as f64 * h, j as f64 * h]
    }

    fn axis_frequency(&self, j: usize) -> i64 {
        let n = self.points_per_axis;
        if j < n / 2 {
            j as i64
        } else {
            j as i64 - n as i64
        }
    }

    /// Wavenumber carried by spectral slot `flat`.
    pub fn wavenumber(&self, flat: usize) -> Wavenumber {
        let [i, j] = self.index(flat);
        if self.dim == 1 {
            [self.axis_frequency(i), 0]
        } else {
            [self.axis_frequency(i), self.axis_frequency(j)]
        }
    }

    /// Spectral slot holding wavenumber `k`, if it is representable.
    pub fn slot(&self, k: &[i64]) -> Option<usize> {
        if k.len() != self.dim {
            return None;
        }
        let n = self.points_per_axis as i64;
        let mut idx = [0usize; 2];
        for (axis, &kj) in k.iter().enumerate() {
            if kj < -n / 2 || kj >= n / 2 {
                return None;
            }
            idx[axis] = kj.rem_euclid(n) as usize;
        }
        Some(self.flat(idx))
    }

    /// Offset between two points as a wrapped torus distance.
    pub fn wrapped_distance(&self, offset: [usize; 2]) -> f64 {
        let n = self.points_per_axis;
        let h = self.spacing();
        let d = |o: usize| {
            let o = o % n;
            o.min(n - o) as f64 * h
        };
        if self.dim == 1 {
            d(offset[0])
        } else {
            d(offset[0]).hypot(d(offset[1]))
        }
    }

    /// Flat index of `x + offset` with periodic wrap.
    pub fn shifted(&self, flat: usize, offset: [usize; 2]) -> usize {
        let n = self.points_per_axis;
        let [i, j] = self.index(flat);
        if self.dim == 1 {
            (i + offset[0]) % n
        } else {
            ((i + offset[0]) % n) * n + (j + offset[1]) % n
        }
    }
}

/// `|k|²` for a wavenumber.
pub fn wavenumber_norm_sq(k: Wavenumber) -> f64 {
    (k[0] * k[0] + k[1] * k[1]) as f64
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(len: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(len)
        } else {
            p.plan_fft_forward(len)
        }
    })
}

/// Unnormalized in-place n-dimensional DFT over a row-major buffer.
fn dft(grid: &PeriodicGrid, data: &mut [Complex64], inverse: bool) {
    let n = grid.points_per_axis();
    let fft = plan(n, inverse);
    // rows (last axis is contiguous)
    for row in data.chunks_exact_mut(n) {
        fft.process(row);
    }
    if grid.dim() == 2 {
        let mut column = vec![Complex64::new(0.0, 0.0); n];
        for j in 0..n {
            for i in 0..n {
                column[i] = data[i * n + j];
            }
            fft.process(&mut column);
            for i in 0..n {
                data[i * n + j] = column[i];
            }
        }
    }
}

/// Complex samples on a periodic grid together with their Fourier
/// coefficients. Both representations are always kept in sync.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: PeriodicGrid,
    samples: Vec<Complex64>,
    spectrum: Vec<Complex64>,
}

impl GridFunction {
    pub fn from_samples(grid: PeriodicGrid, samples: Vec<Complex64>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::Shape {
                expected: grid.len(),
                got: samples.len(),
            });
        }
        let mut spectrum = samples.clone();
        dft(&grid, &mut spectrum, false);
        let scale = grid.cell_volume();
        spectrum.iter_mut().for_each(|c| *c *= scale);
        Ok(Self {
            grid,
            samples,
            spectrum,
        })
    }

    pub fn from_real(grid: PeriodicGrid, samples: &[f64]) -> Result<Self> {
        Self::from_samples(
            grid,
            samples.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        )
    }

    /// Samples a function of the grid coordinates.
    pub fn from_fn(grid: PeriodicGrid, f: impl Fn([f64; 2]) -> Complex64) -> Self {
        let samples = (0..grid.len()).map(|i| f(grid.point(i))).collect();
        Self::from_samples(grid, samples).expect("length matches grid")
    }

    pub fn from_spectrum(grid: PeriodicGrid, spectrum: Vec<Complex64>) -> Result<Self> {
        if spectrum.len() != grid.len() {
            return Err(Error::Shape {
                expected: grid.len(),
                got: spectrum.len(),
            });
        }
        let mut samples = spectrum.clone();
        dft(&grid, &mut samples, true);
        Ok(Self {
            grid,
            samples,
            spectrum,
        })
    }

    pub fn zeros(grid: PeriodicGrid) -> Self {
        let z = vec![Complex64::new(0.0, 0.0); grid.len()];
        Self {
            grid,
            samples: z.clone(),
            spectrum: z,
        }
    }

    pub fn constant(grid: PeriodicGrid, value: f64) -> Self {
        let mut spectrum = vec![Complex64::new(0.0, 0.0); grid.len()];
        spectrum[0] = Complex64::new(value, 0.0);
        Self {
            grid,
            samples: vec![Complex64::new(value, 0.0); grid.len()],
            spectrum,
        }
    }

    pub fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn spectrum(&self) -> &[Complex64] {
        &self.spectrum
    }

    /// Real parts of the samples.
    pub fn real_samples(&self) -> Vec<f64> {
        self.samples.iter().map(|c| c.re).collect()
    }

    pub fn magnitudes(&self) -> Vec<f64> {
        self.samples.iter().map(|c| c.norm()).collect()
    }

    /// Coefficient of wavenumber `k`, zero when not representable.
    pub fn coefficient(&self, k: &[i64]) -> Complex64 {
        self.grid
            .slot(k)
            .map(|i| self.spectrum[i])
            .unwrap_or_default()
    }

    /// Mean value, i.e. the zero coefficient.
    pub fn mean(&self) -> Complex64 {
        self.spectrum[0]
    }

    /// True when the zero coefficient vanishes relative to the L² size.
    pub fn is_mean_zero(&self) -> bool {
        let scale = self.l2_spectral().max(1.0);
        self.spectrum[0].norm() <= 1e-12 * scale
    }

    /// `(Σ_k |c_k|²)^{1/2}`.
    pub fn l2_spectral(&self) -> f64 {
        self.spectrum.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Multiplies each coefficient by `symbol(k)` and transforms back.
    pub fn apply_multiplier(&self, symbol: impl Fn(Wavenumber) -> Complex64) -> Self {
        let spectrum = self
            .spectrum
            .iter()
            .enumerate()
            .map(|(i, &c)| c * symbol(self.grid.wavenumber(i)))
            .collect();
        Self::from_spectrum(self.grid, spectrum).expect("length matches grid")
    }

    /// Same function with the zero coefficient removed.
    pub fn without_mean(&self) -> Self {
        let mut spectrum = self.spectrum.clone();
        spectrum[0] = Complex64::new(0.0, 0.0);
        Self::from_spectrum(self.grid, spectrum).expect("length matches grid")
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            grid: self.grid,
            samples: self.samples.iter().map(|&v| v * c).collect(),
            spectrum: self.spectrum.iter().map(|&v| v * c).collect(),
        }
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: Complex64, other: &Self, b: Complex64) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::config("grid mismatch in linear combination"));
        }
        let zip = |x: &[Complex64], y: &[Complex64]| -> Vec<Complex64> {
            x.iter().zip(y).map(|(&u, &v)| a * u + b * v).collect()
        };
        Ok(Self {
            grid: self.grid,
            samples: zip(&self.samples, &other.samples),
            spectrum: zip(&self.spectrum, &other.spectrum),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.combine(Complex64::new(1.0, 0.0), other, Complex64::new(-1.0, 0.0))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.combine(Complex64::new(1.0, 0.0), other, Complex64::new(1.0, 0.0))
    }

    /// Translation by whole grid steps: `v(x) = u(x - offset·h)`.
    pub fn translate(&self, offset: [usize; 2]) -> Self {
        let n = self.grid.points_per_axis();
        let back = [(n - offset[0] % n) % n, (n - offset[1] % n) % n];
        let samples = (0..self.grid.len())
            .map(|i| self.samples[self.grid.shifted(i, back)])
            .collect();
        Self::from_samples(self.grid, samples).expect("length matches grid")
    }

    /// Pointwise map over the samples.
    pub fn map_samples(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self::from_samples(self.grid, self.samples.iter().map(|&v| f(v)).collect())
            .expect("length matches grid")
    }

    /// Rectangle-rule inner product `∫ u v̄`.
    pub fn inner_product(&self, other: &Self) -> Result<Complex64> {
        if self.grid != other.grid {
            return Err(Error::config("grid mismatch in inner product"));
        }
        let sum: Complex64 = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(u, v)| u * v.conj())
            .sum();
        Ok(sum * self.grid.cell_volume())
    }

    /// Largest relative discrepancy between the samples and the inverse
    /// transform of the cached spectrum.
    pub fn round_trip_error(&self) -> f64 {
        let mut back = self.spectrum.clone();
        dft(&self.grid, &mut back, true);
        let scale = self
            .samples
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
            .max(f64::MIN_POSITIVE);
        back.iter()
            .zip(&self.samples)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
            / scale
    }

    /// Same band-limited function sampled on a grid with `factor` times more
    /// points per axis (zero padding of the spectrum).
    pub fn resample(&self, target: PeriodicGrid) -> Result<Self> {
        if target.dim() != self.grid.dim() {
            return Err(Error::config("resample across dimensions"));
        }
        let mut spectrum = vec![Complex64::new(0.0, 0.0); target.len()];
        for (i, &c) in self.spectrum.iter().enumerate() {
            if c == Complex64::new(0.0, 0.0) {
                continue;
            }
            let k = self.grid.wavenumber(i);
            let slot = target
                .slot(&k[..target.dim()])
                .ok_or(Error::Aliasing {
                    band: k[0].unsigned_abs().max(k[1].unsigned_abs()) as usize,
                    half: target.points_per_axis() / 2,
                })?;
            spectrum[slot] = c;
        }
        Self::from_spectrum(target, spectrum)
    }
}

/// Rectangle-rule `L^p` norm of real magnitudes with uniform cell weight.
/// `p = ∞` gives the maximum.
pub fn lp_of_magnitudes(values: &[f64], p: f64, cell: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::domain(format!("exponent p = {p} must be >= 1")));
    }
    let max = values.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    if p.is_infinite() || max == 0.0 {
        return Ok(max);
    }
    // scaled by the maximum so large p cannot overflow
    let sum: f64 = values.iter().map(|&v| (v.abs() / max).powf(p)).sum();
    Ok(max * (sum * cell).powf(1.0 / p))
}

/// Rectangle-rule approximation of `(∫|u|^p)^{1/p}`; `p = f64::INFINITY`
/// is the maximum of the sample magnitudes.
pub fn quadrature_lp(u: &GridFunction, p: f64) -> Result<f64> {
    lp_of_magnitudes(&u.magnitudes(), p, u.grid().cell_volume())
}

/// Pointwise Euclidean magnitude of a vector field.
pub fn pointwise_magnitude(components: &[GridFunction]) -> Vec<f64> {
    let len = components.first().map_or(0, |c| c.samples().len());
    (0..len)
        .map(|i| {
            components
                .iter()
                .map(|c| c.samples()[i].norm_sqr())
                .sum::<f64>()
                .sqrt()
        })
        .collect()
}

/// `2π k_j`, the symbol of `∂_j`.
pub(crate) fn derivative_factor(k: Wavenumber, axis: usize) -> f64 {
    2.0 * PI * k[axis] as f64
}
