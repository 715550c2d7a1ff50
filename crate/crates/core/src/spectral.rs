//! Periodic grids, Fourier transforms and norms.
//!
//! # Fourier convention
//!
//! Every spectral quantity in this crate uses the unitary continuum
//! convention
//!
//! ```text
//! û(ξ) = (2π)^{-n/2} ∫ u(x) e^{-i x·ξ} dx
//! ```
//!
//! discretised on the box `[-L/2, L/2)^n` by the rectangle rule. With
//! `h = L/N` the coefficient at the lattice frequency `ξ_m = 2π m / L` is
//!
//! ```text
//! c_m = (h / √(2π))^n · Σ_j u(x_j) e^{-i x_j·ξ_m},   x_j = -L/2 + j h,
//! ```
//!
//! so the discrete Plancherel identity reads
//!
//! ```text
//! Σ_j |u(x_j)|² h^n = Σ_m |c_m|² (2π/L)^n
//! ```
//!
//! exactly (up to rounding). The coefficients of a smooth, well-contained
//! field approximate the continuum transform at `ξ_m`, which is what lets the
//! box solver be compared against the radial continuum quadrature.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::quadrature;

/// Periodic computational box `[-L/2, L/2)^n` sampled with `N` points per axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    dim: usize,
    length: f64,
    points: usize,
}

/// Builds a [`Grid`], rejecting odd or tiny resolutions and bad dimensions.
pub fn make_grid(dim: usize, length: f64, points: usize) -> Result<Grid> {
    Grid::new(dim, length, points)
}

impl Grid {
    pub fn new(dim: usize, length: f64, points: usize) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::InvalidGrid(format!("dimension {dim} not in 1..=3")));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidGrid(format!("box side {length} must be positive")));
        }
        if points < 8 {
            return Err(Error::InvalidGrid(format!("resolution {points} below 8")));
        }
        if !points.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!("resolution {points} is odd")));
        }
        Ok(Self { dim, length, points })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn points(&self) -> usize {
        self.points
    }

    /// Total number of lattice points, `N^n`.
    pub fn len(&self) -> usize {
        self.points.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.points as f64
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// Frequency lattice step `2π/L`.
    pub fn freq_step(&self) -> f64 {
        2.0 * PI / self.length
    }

    /// Volume element of the frequency lattice, `(2π/L)^n`.
    pub fn dual_cell_volume(&self) -> f64 {
        self.freq_step().powi(self.dim as i32)
    }

    /// Signed mode number of an axis index in FFT order: `0..N/2` then `-N/2..0`.
    pub fn mode_number(&self, axis_index: usize) -> i64 {
        let n = self.points as i64;
        let j = axis_index as i64;
        if j < n / 2 {
            j
        } else {
            j - n
        }
    }

    /// Angular frequency along one axis for an axis index in FFT order.
    pub fn axis_frequency(&self, axis_index: usize) -> f64 {
        self.mode_number(axis_index) as f64 * self.freq_step()
    }

    /// Physical coordinate of an axis index.
    pub fn coordinate(&self, axis_index: usize) -> f64 {
        -0.5 * self.length + axis_index as f64 * self.spacing()
    }

    /// Axis indices of a flat index (row-major, last axis fastest). Unused axes are zero.
    pub fn unflatten(&self, flat: usize) -> [usize; 3] {
        let mut idx = [0usize; 3];
        let mut rem = flat;
        for axis in (0..self.dim).rev() {
            idx[axis] = rem % self.points;
            rem /= self.points;
        }
        idx
    }

    pub fn flatten(&self, idx: [usize; 3]) -> usize {
        (0..self.dim).fold(0, |acc, axis| acc * self.points + idx[axis])
    }

    /// Flat index of the mirrored frequency `-ξ`.
    pub fn mirror(&self, flat: usize) -> usize {
        let mut idx = self.unflatten(flat);
        for i in idx.iter_mut().take(self.dim) {
            *i = (self.points - *i) % self.points;
        }
        self.flatten(idx)
    }

    /// Mode numbers of a flat spectral index.
    pub fn modes(&self, flat: usize) -> [i64; 3] {
        let idx = self.unflatten(flat);
        let mut m = [0i64; 3];
        for axis in 0..self.dim {
            m[axis] = self.mode_number(idx[axis]);
        }
        m
    }

    /// `|ξ|²` at a flat spectral index.
    pub fn xi2(&self, flat: usize) -> f64 {
        let step = self.freq_step();
        self.modes(flat)
            .iter()
            .take(self.dim)
            .map(|&m| (m as f64 * step).powi(2))
            .sum()
    }

    /// `|ξ|²` for every spectral index.
    pub fn xi2_table(&self) -> Vec<f64> {
        (0..self.len()).map(|j| self.xi2(j)).collect()
    }

    /// Position vector of a flat physical index.
    pub fn position(&self, flat: usize) -> [f64; 3] {
        let idx = self.unflatten(flat);
        let mut x = [0.0; 3];
        for axis in 0..self.dim {
            x[axis] = self.coordinate(idx[axis]);
        }
        x
    }

    /// Samples `f` at every lattice point. `f` receives a slice of length `n`.
    pub fn sample(&self, f: impl Fn(&[f64]) -> f64) -> Result<PhysicalField> {
        let values = (0..self.len())
            .map(|j| f(&self.position(j)[..self.dim]))
            .collect();
        PhysicalField::new(*self, values)
    }

    /// Mask of the 2/3-rule: true where every mode number satisfies `3|m| ≤ N`.
    pub fn dealias_mask(&self) -> Vec<bool> {
        let n = self.points as i64;
        (0..self.len())
            .map(|j| self.modes(j).iter().take(self.dim).all(|m| 3 * m.abs() <= n))
            .collect()
    }
}

/// Real samples of a scalar field on a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalField {
    grid: Grid,
    values: Vec<f64>,
}

impl PhysicalField {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} samples, got {}",
                grid.len(),
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.len()],
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.grid, self.values.iter().map(|v| v * factor).collect())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a - b)
            .collect();
        Self::new(self.grid, values)
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }
}

/// Fourier coefficients on the lattice of a [`Grid`], stored in FFT order.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn new(grid: Grid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} coefficients, got {}",
                grid.len(),
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::NonFinite);
        }
        Ok(Self { grid, coeffs })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Largest violation of `c(-ξ) = conj(c(ξ))`.
    pub fn hermitian_defect(&self) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| (c - self.coeffs[self.grid.mirror(j)].conj()).norm())
            .fold(0.0, f64::max)
    }
}

/// Planned forward/inverse transforms for one grid.
///
/// Plans are immutable and shareable across threads.
#[derive(Clone)]
pub struct FourierTransform {
    grid: Grid,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for FourierTransform {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FourierTransform").field("grid", &self.grid).finish()
    }
}

impl FourierTransform {
    pub fn new(grid: Grid) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            grid,
            forward: planner.plan_fft_forward(grid.points),
            inverse: planner.plan_fft_inverse(grid.points),
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    fn scale(&self) -> f64 {
        (self.grid.spacing() / (2.0 * PI).sqrt()).powi(self.grid.dim as i32)
    }

    fn transform_axes(&self, data: &mut [Complex64], fft: &Arc<dyn Fft<f64>>) {
        let n = self.grid.points;
        let dim = self.grid.dim;
        let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        let mut lines = vec![Complex64::new(0.0, 0.0); data.len()];
        for axis in 0..dim {
            let stride = n.pow((dim - 1 - axis) as u32);
            if stride == 1 {
                fft.process_with_scratch(data, &mut scratch);
                continue;
            }
            let block = stride * n;
            let outer = data.len() / block;
            for o in 0..outer {
                for s in 0..stride {
                    let line = (o * stride + s) * n;
                    for k in 0..n {
                        lines[line + k] = data[o * block + k * stride + s];
                    }
                }
            }
            fft.process_with_scratch(&mut lines, &mut scratch);
            for o in 0..outer {
                for s in 0..stride {
                    let line = (o * stride + s) * n;
                    for k in 0..n {
                        data[o * block + k * stride + s] = lines[line + k];
                    }
                }
            }
        }
    }

    fn phase(&self, flat: usize) -> f64 {
        let parity: usize = self.grid.unflatten(flat).iter().sum();
        if parity.is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }

    /// Forward transform of raw samples into `out` (no validation).
    pub fn forward_into(&self, values: &[f64], out: &mut [Complex64]) {
        for (o, &v) in out.iter_mut().zip(values) {
            *o = Complex64::new(v, 0.0);
        }
        self.transform_axes(out, &self.forward);
        let scale = self.scale();
        for (j, c) in out.iter_mut().enumerate() {
            *c *= scale * self.phase(j);
        }
    }

    /// Inverse transform of raw coefficients, keeping the real part (no validation).
    pub fn inverse_into(&self, coeffs: &[Complex64], out: &mut [f64]) {
        let mut work: Vec<Complex64> = coeffs.to_vec();
        let factor = 1.0 / (self.scale() * self.grid.len() as f64);
        for (j, c) in work.iter_mut().enumerate() {
            *c *= factor * self.phase(j);
        }
        self.transform_axes(&mut work, &self.inverse);
        for (o, c) in out.iter_mut().zip(&work) {
            *o = c.re;
        }
    }

    pub fn forward(&self, field: &PhysicalField) -> Result<SpectralField> {
        if field.grid != self.grid {
            return Err(Error::GridMismatch);
        }
        let mut coeffs = vec![Complex64::new(0.0, 0.0); self.grid.len()];
        self.forward_into(&field.values, &mut coeffs);
        SpectralField::new(self.grid, coeffs)
    }

    pub fn inverse(&self, field: &SpectralField) -> Result<PhysicalField> {
        if field.grid != self.grid {
            return Err(Error::GridMismatch);
        }
        let defect = field.hermitian_defect();
        let largest = field.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if defect > 1e-9 * largest {
            return Err(Error::NotHermitian { defect });
        }
        let mut values = vec![0.0; self.grid.len()];
        self.inverse_into(&field.coeffs, &mut values);
        PhysicalField::new(self.grid, values)
    }
}

pub fn forward_transform(field: &PhysicalField) -> Result<SpectralField> {
    FourierTransform::new(field.grid).forward(field)
}

/// Inverse transform; rejects coefficients that would produce a complex field.
pub fn inverse_transform(field: &SpectralField) -> Result<PhysicalField> {
    FourierTransform::new(field.grid).inverse(field)
}

/// Which norm to evaluate.
///
/// `SobolevDeriv(k)` is the homogeneous `L²` norm of `|∇|^k u`, i.e. the
/// multiplier `|ξ|^k`; in one dimension it coincides with `‖∂_x^k u‖_{L²}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormSpec {
    /// Lebesgue norm, `p ∈ {1, 2}` (use [`NormSpec::Linf`] for `p = ∞`).
    Lp(f64),
    SobolevDeriv(u32),
    NegHomogeneousL2,
    Linf,
}

/// Either representation of a field, for [`norm`].
#[derive(Debug, Clone, Copy)]
pub enum FieldRef<'a> {
    Physical(&'a PhysicalField),
    Spectral(&'a SpectralField),
}

impl<'a> From<&'a PhysicalField> for FieldRef<'a> {
    fn from(f: &'a PhysicalField) -> Self {
        FieldRef::Physical(f)
    }
}

impl<'a> From<&'a SpectralField> for FieldRef<'a> {
    fn from(f: &'a SpectralField) -> Self {
        FieldRef::Spectral(f)
    }
}

fn lebesgue(values: &[f64], grid: &Grid, p: f64) -> Result<f64> {
    let vol = grid.cell_volume();
    if p == 1.0 {
        Ok(values.iter().map(|v| v.abs()).sum::<f64>() * vol)
    } else if p == 2.0 {
        Ok((values.iter().map(|v| v * v).sum::<f64>() * vol).sqrt())
    } else if p == f64::INFINITY {
        Ok(values.iter().fold(0.0, |m, v| f64::max(m, v.abs())))
    } else {
        Err(Error::InvalidArgument(format!(
            "Lebesgue exponent {p} not supported (use 1, 2 or infinity)"
        )))
    }
}

/// `Σ w(|ξ|²) |c|² (2π/L)^n` over all lattice modes.
pub fn weighted_energy(field: &SpectralField, weight: impl Fn(f64) -> f64) -> f64 {
    let grid = field.grid;
    field
        .coeffs
        .iter()
        .enumerate()
        .map(|(j, c)| weight(grid.xi2(j)) * c.norm_sqr())
        .sum::<f64>()
        * grid.dual_cell_volume()
}

fn spectral_norm(field: &SpectralField, spec: NormSpec) -> Result<f64> {
    match spec {
        NormSpec::SobolevDeriv(0) => Ok(weighted_energy(field, |_| 1.0).sqrt()),
        NormSpec::SobolevDeriv(k) => Ok(weighted_energy(field, |x2| x2.powi(k as i32)).sqrt()),
        NormSpec::NegHomogeneousL2 => {
            let l2 = weighted_energy(field, |_| 1.0).sqrt();
            let mean = field.coeffs[0].norm() * field.grid.dual_cell_volume().sqrt();
            if mean > 1e-10 * l2 {
                return Err(Error::NotInNegativeSpace { mean });
            }
            Ok(weighted_energy(field, |x2| if x2 > 0.0 { 1.0 / x2 } else { 0.0 }).sqrt())
        }
        NormSpec::Lp(2.0) => Ok(weighted_energy(field, |_| 1.0).sqrt()),
        NormSpec::Lp(p) => {
            let phys = inverse_transform(field)?;
            lebesgue(&phys.values, &phys.grid, p)
        }
        NormSpec::Linf => {
            let phys = inverse_transform(field)?;
            lebesgue(&phys.values, &phys.grid, f64::INFINITY)
        }
    }
}

/// Evaluates a norm of a physical or spectral field.
///
/// `L¹`, `L²` and `L^∞` of physical samples use the rectangle rule; the
/// derivative and negative-order norms go through Plancherel.
pub fn norm<'a>(field: impl Into<FieldRef<'a>>, spec: NormSpec) -> Result<f64> {
    match field.into() {
        FieldRef::Physical(f) => match spec {
            NormSpec::Lp(p) => lebesgue(&f.values, &f.grid, p),
            NormSpec::Linf => lebesgue(&f.values, &f.grid, f64::INFINITY),
            _ => spectral_norm(&forward_transform(f)?, spec),
        },
        FieldRef::Spectral(f) => spectral_norm(f, spec),
    }
}

/// Inhomogeneous Sobolev norm `‖u‖_{H^m}` with weight `(1+|ξ|²)^m`.
pub fn sobolev_h_norm(field: &SpectralField, order: u32) -> f64 {
    weighted_energy(field, |x2| (1.0 + x2).powi(order as i32)).sqrt()
}

/// Stand-in for `‖u‖_{Ẇ^{-1,1}}`, which has no stable quadrature.
///
/// Returns `max(‖u‖_{Ẇ^{-1,2}}, ‖∂^{-1}u‖_{L¹})`, where the second term is
/// only available in one dimension (cumulative antiderivative from the left
/// edge of the box). The mean mode is skipped in the `Ẇ^{-1,2}` part.
pub fn negative_l1_surrogate(field: &PhysicalField) -> Result<f64> {
    if field.is_zero() {
        return Ok(0.0);
    }
    let spectral = forward_transform(field)?;
    let neg_l2 = weighted_energy(&spectral, |x2| if x2 > 0.0 { 1.0 / x2 } else { 0.0 }).sqrt();
    let mut value = neg_l2;
    if field.grid.dim == 1 {
        let h = field.grid.spacing();
        let mut running = 0.0;
        let mut l1 = 0.0;
        for v in &field.values {
            running += v * h;
            l1 += running.abs() * h;
        }
        value = value.max(l1);
    }
    log::info!("W^{{-1,1}} norm replaced by surrogate value {value:e}");
    Ok(value)
}

/// Surrogate of the data size `‖u0‖_{L¹} + ‖u1‖_{Ẇ^{-1,1}} + ‖u0‖_{H^{s+2}} + ‖u1‖_{H^s}`.
pub fn data_size_surrogate(u0: &PhysicalField, u1: &PhysicalField, s: u32) -> Result<f64> {
    if u0.grid != u1.grid {
        return Err(Error::GridMismatch);
    }
    let h0 = sobolev_h_norm(&forward_transform(u0)?, s + 2);
    let h1 = sobolev_h_norm(&forward_transform(u1)?, s);
    Ok(norm(u0, NormSpec::Lp(1.0))? + negative_l1_surrogate(u1)? + h0 + h1)
}

/// Surface area of the unit sphere in `ℝ^n` (`2`, `2π`, `4π` for n = 1, 2, 3).
pub fn sphere_area(dim: usize) -> f64 {
    match dim {
        1 => 2.0,
        2 => 2.0 * PI,
        3 => 4.0 * PI,
        _ => panic!("sphere area requested for unsupported dimension {dim}"),
    }
}

/// `c_n ∫_0^Ξ r^{2k+n-1} w(r) dr` for a radial spectral density `w(r) = |û(r)|²`.
///
/// This is the squared norm `‖|∇|^k u‖²_{L²}` of a radially symmetric field.
pub fn radial_energy(
    density: impl Fn(f64) -> f64,
    k: u32,
    dim: usize,
    cutoff: f64,
    panels: usize,
) -> Result<f64> {
    if !(cutoff.is_finite() && cutoff > 0.0) {
        return Err(Error::InvalidArgument(format!("cutoff {cutoff} must be positive")));
    }
    if !(1..=3).contains(&dim) {
        return Err(Error::InvalidArgument(format!("dimension {dim} not in 1..=3")));
    }
    let power = (2 * k as usize + dim - 1) as i32;
    let integrand = |r: f64| {
        if r == 0.0 {
            if power == 0 {
                density(r)
            } else {
                0.0
            }
        } else {
            r.powi(power) * density(r)
        }
    };
    let integral = quadrature::integrate_half_line_segment(integrand, cutoff, panels.max(1))?;
    Ok(sphere_area(dim) * integral)
}

/// `‖|∇|^k u‖_{L²}` of the radial field with spectral profile `û(|ξ|)`,
/// integrated up to `cutoff` with `panels` initial panels.
pub fn radial_norm_quadrature(
    profile: impl Fn(f64) -> f64,
    k: u32,
    dim: usize,
    cutoff: f64,
    panels: usize,
) -> Result<f64> {
    radial_energy(|r| profile(r).powi(2), k, dim, cutoff, panels).map(f64::sqrt)
}
