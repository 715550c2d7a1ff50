//! Closed-form evaluation of the linear flow and of its asymptotic profile.
//!
//! Nothing here steps in time: the solution at any `t` is a single pointwise
//! multiplication in Fourier space, either on the periodic grid or as a
//! continuum radial integral.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::spectral::{radial_energy, FourierTransform, Grid, PhysicalField};
use crate::symbols::{profile_symbols, propagator_from_roots, roots, ModelParams};

/// Displacement and velocity at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct StatePair {
    pub u: PhysicalField,
    pub ut: PhysicalField,
    pub t: f64,
}

impl StatePair {
    pub fn new(u: PhysicalField, ut: PhysicalField, t: f64) -> Result<Self> {
        if u.grid() != ut.grid() {
            return Err(Error::GridMismatch);
        }
        if !t.is_finite() {
            return Err(Error::NonFinite);
        }
        Ok(Self { u, ut, t })
    }

    pub fn grid(&self) -> &Grid {
        self.u.grid()
    }
}

fn check_time(t: f64) -> Result<()> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("time {t} must be finite and nonnegative")))
    }
}

/// Applies `(Ĥ, Ĝ; Ĥ_t, Ĝ_t)` at time `t` to spectral data `(û0, û1)`.
pub fn propagate_modes(
    grid: &Grid,
    u0_hat: &[Complex64],
    u1_hat: &[Complex64],
    t: f64,
    params: &ModelParams,
) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    check_time(t)?;
    if u0_hat.len() != grid.len() || u1_hat.len() != grid.len() {
        return Err(Error::GridMismatch);
    }
    let pairs: Result<Vec<(Complex64, Complex64)>> = (0..grid.len())
        .into_par_iter()
        .map(|j| {
            let xi2 = grid.xi2(j);
            let rp = roots(xi2, params)?;
            let s = propagator_from_roots(&rp, params.stiffness(xi2), t);
            Ok((
                s.h.re * u0_hat[j] + s.g.re * u1_hat[j],
                s.ht.re * u0_hat[j] + s.gt.re * u1_hat[j],
            ))
        })
        .collect();
    Ok(pairs?.into_iter().unzip())
}

fn check_pair(u0: &PhysicalField, u1: &PhysicalField) -> Result<()> {
    if u0.grid() != u1.grid() {
        Err(Error::GridMismatch)
    } else {
        Ok(())
    }
}

/// `u_L(t) = G(t)∗u1 + H(t)∗u0` together with its time derivative.
pub fn linear_solution(
    u0: &PhysicalField,
    u1: &PhysicalField,
    t: f64,
    params: &ModelParams,
) -> Result<StatePair> {
    check_pair(u0, u1)?;
    check_time(t)?;
    if t == 0.0 {
        return StatePair::new(u0.clone(), u1.clone(), 0.0);
    }
    let grid = *u0.grid();
    let fft = FourierTransform::new(grid);
    let a = fft.forward(u0)?;
    let b = fft.forward(u1)?;
    let (u_hat, ut_hat) = propagate_modes(&grid, a.coeffs(), b.coeffs(), t, params)?;
    let mut u = vec![0.0; grid.len()];
    let mut ut = vec![0.0; grid.len()];
    fft.inverse_into(&u_hat, &mut u);
    fft.inverse_into(&ut_hat, &mut ut);
    StatePair::new(PhysicalField::new(grid, u)?, PhysicalField::new(grid, ut)?, t)
}

/// Asymptotic profile `ū_L(t) = G0(t)∗u1 + H0(t)∗u0`.
pub fn profile_solution(
    u0: &PhysicalField,
    u1: &PhysicalField,
    t: f64,
    params: &ModelParams,
) -> Result<PhysicalField> {
    check_pair(u0, u1)?;
    check_time(t)?;
    if t == 0.0 {
        return Ok(u0.clone());
    }
    let grid = *u0.grid();
    let fft = FourierTransform::new(grid);
    let a = fft.forward(u0)?;
    let b = fft.forward(u1)?;
    let coeffs: Result<Vec<Complex64>> = (0..grid.len())
        .into_par_iter()
        .map(|j| {
            let (g0, h0) = profile_symbols(grid.xi2(j), t, params)?;
            Ok(h0.re * a.coeffs()[j] + g0.re * b.coeffs()[j])
        })
        .collect();
    let mut u = vec![0.0; grid.len()];
    fft.inverse_into(&coeffs?, &mut u);
    PhysicalField::new(grid, u)
}

/// Radial spectral profile `|ξ| ↦ û(|ξ|)`.
pub type RadialProfile = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Integrability class of radial data at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataClass {
    /// Bounded and continuous at `ξ = 0`.
    L1Type,
    /// May diverge at `ξ = 0`, square-integrable against `r^{n-1}`.
    L2Type,
}

/// Radially symmetric data given through the spectral profiles of `u0`, `u1`.
#[derive(Clone)]
pub struct RadialData {
    pub u0_hat: RadialProfile,
    pub u1_hat: RadialProfile,
    pub class: DataClass,
    /// Initial integration cutoff in `|ξ|`; doubled while the tail matters.
    pub cutoff: f64,
}

impl fmt::Debug for RadialData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialData")
            .field("class", &self.class)
            .field("cutoff", &self.cutoff)
            .finish_non_exhaustive()
    }
}

impl RadialData {
    pub fn new(
        u0_hat: RadialProfile,
        u1_hat: RadialProfile,
        class: DataClass,
        cutoff: f64,
    ) -> Result<Self> {
        if !(cutoff.is_finite() && cutoff > 0.0) {
            return Err(Error::InvalidArgument(format!("cutoff {cutoff} must be positive")));
        }
        Ok(Self { u0_hat, u1_hat, class, cutoff })
    }

    /// `u0 = A e^{-|x|²/2σ²}`, `u1 = 0`, with `û0(r) = A σ^n e^{-σ²r²/2}`.
    pub fn gaussian(dim: usize, amplitude: f64, sigma: f64) -> Result<Self> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::InvalidArgument(format!("width {sigma} must be positive")));
        }
        let scale = amplitude * sigma.powi(dim as i32);
        Self::new(
            Arc::new(move |r: f64| scale * (-0.5 * sigma * sigma * r * r).exp()),
            Arc::new(|_| 0.0),
            DataClass::L1Type,
            10.0 / sigma,
        )
    }

    /// `û0(r) = A r^{-(n-ε)/2} 𝟙[r ≤ 1]`, `u1 = 0`: in `L²` but not in `L¹`.
    pub fn l2_profile(dim: usize, amplitude: f64, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < dim as f64) {
            return Err(Error::InvalidArgument(format!(
                "exponent offset {epsilon} must lie in (0, {dim})"
            )));
        }
        let power = -(dim as f64 - epsilon) / 2.0;
        Self::new(
            Arc::new(move |r: f64| if r <= 1.0 { amplitude * r.powf(power) } else { 0.0 }),
            Arc::new(|_| 0.0),
            DataClass::L2Type,
            1.0,
        )
    }
}

/// Which evolution a radial norm refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RadialWhich {
    Linear,
    Profile,
    /// `u_L − ū_L`, formed from the symbol difference before squaring.
    Gap,
}

const RADIAL_PANELS: usize = 64;
const TAIL_TOL: f64 = 1e-10;
const MAX_DOUBLINGS: usize = 3;

/// `‖|∇|^k w(t)‖_{L²}` on `ℝ^n` for `w = u_L`, `ū_L` or `u_L − ū_L`.
pub fn linear_norm_radial(
    data: &RadialData,
    t: f64,
    k: u32,
    dim: usize,
    params: &ModelParams,
    which: RadialWhich,
) -> Result<f64> {
    check_time(t)?;
    let amplitude = |r: f64| -> f64 {
        let xi2 = r * r;
        let a0 = (data.u0_hat)(r);
        let a1 = (data.u1_hat)(r);
        let linear = || {
            let rp = roots(xi2, params).expect("nonnegative frequency");
            let s = propagator_from_roots(&rp, params.stiffness(xi2), t);
            (s.g.re, s.h.re)
        };
        let profile = || {
            let (g0, h0) = profile_symbols(xi2, t, params).expect("nonnegative frequency");
            (g0.re, h0.re)
        };
        let (g, h) = match which {
            RadialWhich::Linear => linear(),
            RadialWhich::Profile => profile(),
            RadialWhich::Gap => {
                let (g, h) = linear();
                let (g0, h0) = profile();
                (g - g0, h - h0)
            }
        };
        let mut v = 0.0;
        if a0 != 0.0 {
            v += h * a0;
        }
        if a1 != 0.0 {
            v += g * a1;
        }
        v
    };
    let density = |r: f64| amplitude(r).powi(2);
    let mut cutoff = data.cutoff;
    let mut value = radial_energy(density, k, dim, cutoff, RADIAL_PANELS)?;
    for _ in 0..MAX_DOUBLINGS {
        let extended = radial_energy(density, k, dim, 2.0 * cutoff, RADIAL_PANELS)?;
        let converged = (extended - value).abs() <= TAIL_TOL * extended.abs().max(f64::MIN_POSITIVE);
        value = extended;
        cutoff *= 2.0;
        if converged || extended == 0.0 {
            return Ok(value.sqrt());
        }
    }
    Err(Error::Quadrature(format!(
        "spectral tail still significant at cutoff {cutoff:e}"
    )))
}

/// [`linear_norm_radial`] at many times, evaluated in parallel.
pub fn linear_norm_radial_series(
    data: &RadialData,
    times: &[f64],
    k: u32,
    dim: usize,
    params: &ModelParams,
    which: RadialWhich,
) -> Result<Vec<f64>> {
    times
        .par_iter()
        .map(|&t| linear_norm_radial(data, t, k, dim, params, which))
        .collect()
}

/// Samples `A e^{-|x|²/2σ²}` on the grid.
pub fn gaussian_field(grid: &Grid, amplitude: f64, sigma: f64) -> Result<PhysicalField> {
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::InvalidArgument(format!("width {sigma} must be positive")));
    }
    grid.sample(|x| {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        amplitude * (-0.5 * r2 / (sigma * sigma)).exp()
    })
}
