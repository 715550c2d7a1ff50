//! Decay series, power-law fits and empirical certification of the pointwise
//! and product estimates.

use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linear::{linear_norm_radial_series, RadialData, RadialWhich, StatePair};
use crate::nonlinear::Trajectory;
use crate::spectral::{forward_transform, norm, NormSpec, PhysicalField};
use crate::symbols::{
    energy_functionals, omega, profile_symbols, propagator_from_roots, roots, EnergyTerms,
    ModelParams,
};

/// Quantity measured at each time of a series.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormKind {
    /// `‖|∇|^k u‖_{L²}`
    Displacement,
    /// `‖|∇|^k u_t‖_{L²}`
    Velocity,
    /// `‖u − u_L‖_{L²} / (‖u_L‖_{L²} η(t))`
    GapRatio,
}

impl NormKind {
    pub fn as_str(self) -> &'static str {
        match self {
            NormKind::Displacement => "grad_k_u_l2",
            NormKind::Velocity => "grad_k_ut_l2",
            NormKind::GapRatio => "gap_ratio",
        }
    }
}

impl fmt::Display for NormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which evolution produced a series.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesSource {
    Linear,
    Nonlinear,
    ProfileGap,
    NonlinearMinusLinear,
}

impl SeriesSource {
    pub fn as_str(self) -> &'static str {
        match self {
            SeriesSource::Linear => "linear",
            SeriesSource::Nonlinear => "nonlinear",
            SeriesSource::ProfileGap => "profile_gap",
            SeriesSource::NonlinearMinusLinear => "nl_minus_linear",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeriesLabel {
    pub k: u32,
    pub norm_kind: NormKind,
    pub source: SeriesSource,
}

/// Norm values against time.
#[derive(Debug, Clone, PartialEq)]
pub struct DecaySeries {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub label: SeriesLabel,
}

impl DecaySeries {
    pub fn new(times: Vec<f64>, values: Vec<f64>, label: SeriesLabel) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::InvalidArgument(format!(
                "{} times but {} values",
                times.len(),
                values.len()
            )));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidArgument("series times must increase strictly".into()));
        }
        if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidArgument(
                "series values must be finite and nonnegative".into(),
            ));
        }
        Ok(Self { times, values, label })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }
}

const MIN_SERIES_POINTS: usize = 8;
const MIN_FIT_POINTS: usize = 6;

/// One series per `k` from a stored trajectory.
pub fn decay_series(
    run: &Trajectory,
    k_list: &[u32],
    kind: NormKind,
    source: SeriesSource,
) -> Result<Vec<DecaySeries>> {
    if k_list.is_empty() {
        return Err(Error::InvalidArgument("empty derivative list".into()));
    }
    if run.len() < MIN_SERIES_POINTS {
        return Err(Error::InvalidArgument(format!(
            "trajectory has {} output times, need at least {MIN_SERIES_POINTS}",
            run.len()
        )));
    }
    let field = |s: &StatePair| -> Result<PhysicalField> {
        match kind {
            NormKind::Displacement => Ok(s.u.clone()),
            NormKind::Velocity => Ok(s.ut.clone()),
            NormKind::GapRatio => Err(Error::InvalidArgument(
                "gap ratios are formed from two runs".into(),
            )),
        }
    };
    let spectra = run
        .states
        .par_iter()
        .map(|s| forward_transform(&field(s)?))
        .collect::<Result<Vec<_>>>()?;
    k_list
        .iter()
        .map(|&k| {
            let values = spectra
                .iter()
                .map(|c| norm(c, NormSpec::SobolevDeriv(k)))
                .collect::<Result<Vec<_>>>()?;
            DecaySeries::new(run.times.clone(), values, SeriesLabel { k, norm_kind: kind, source })
        })
        .collect()
}

/// One series per `k` from continuum radial data.
pub fn decay_series_radial(
    data: &RadialData,
    times: &[f64],
    k_list: &[u32],
    dim: usize,
    params: &ModelParams,
    which: RadialWhich,
) -> Result<Vec<DecaySeries>> {
    if k_list.is_empty() {
        return Err(Error::InvalidArgument("empty derivative list".into()));
    }
    let source = match which {
        RadialWhich::Linear | RadialWhich::Profile => SeriesSource::Linear,
        RadialWhich::Gap => SeriesSource::ProfileGap,
    };
    k_list
        .iter()
        .map(|&k| {
            let values = linear_norm_radial_series(data, times, k, dim, params, which)?;
            DecaySeries::new(
                times.to_vec(),
                values,
                SeriesLabel { k, norm_kind: NormKind::Displacement, source },
            )
        })
        .collect()
}

/// Least-squares power law in `(ln(1+t), ln value)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub stderr: f64,
    pub window: (f64, f64),
    pub points: usize,
}

/// Fits `value ≈ e^{intercept} (1+t)^{slope}` over `t ∈ [window.0, window.1]`.
pub fn fit_rate(series: &DecaySeries, window: (f64, f64)) -> Result<RateFit> {
    let (lo, hi) = window;
    if !(lo <= hi) {
        return Err(Error::InvalidArgument(format!("empty fit window [{lo}, {hi}]")));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (&t, &v) in series.times.iter().zip(&series.values) {
        if t < lo || t > hi {
            continue;
        }
        if !(v > 0.0) {
            return Err(Error::NonPositive { time: t, value: v });
        }
        xs.push((1.0 + t).ln());
        ys.push(v.ln());
    }
    let n = xs.len();
    if n < MIN_FIT_POINTS {
        return Err(Error::InvalidArgument(format!(
            "{n} points in window [{lo}, {hi}], need at least {MIN_FIT_POINTS}"
        )));
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("fit window contains a single abscissa".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let stderr = (ssr / (nf - 2.0) / sxx).sqrt();
    Ok(RateFit { slope, intercept, stderr, window, points: n })
}

/// Dimension-dependent factor of the nonlinear-minus-linear estimate.
pub fn eta(t: f64, dim: usize) -> Result<f64> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidArgument(format!("time {t} must be nonnegative")));
    }
    match dim {
        0 => Err(Error::InvalidArgument("dimension must be at least 1".into())),
        1 => Ok(1.0),
        2 => Ok((2.0 + t).ln() / (1.0 + t).sqrt()),
        _ => Ok(1.0 / (1.0 + t).sqrt()),
    }
}

/// Predicted exponent of `‖|∇|^k u(t)‖_{L²}` for `L¹`-type data.
pub fn theory_slope_l1(dim: usize, k: u32) -> f64 {
    -(dim as f64) / 4.0 - k as f64 / 2.0
}

/// Predicted exponent of `‖|∇|^k u(t)‖_{L²}` for `L²`-type data.
pub fn theory_slope_l2(k: u32) -> f64 {
    0.0 - k as f64 / 2.0
}

/// Pointwise symbol bounds that can be certified on a grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    /// `|ξ|²(1+|ξ|²)|Ĝ|² + |Ĝ_t|² ≤ C e^{-cω t}`
    GEnergy,
    /// `|ξ|²(1+|ξ|²)|Ĥ|² + |Ĥ_t|² ≤ C |ξ|²(1+|ξ|²) e^{-cω t}`
    HEnergy,
    /// `|Ĝ − Ĝ0| ≤ C e^{-c|ξ|²t}` for `|ξ| ≤ r0`
    ProfileRemainderG,
    /// `|Ĥ − Ĥ0| ≤ C |ξ| e^{-c|ξ|²t}` for `|ξ| ≤ r0`
    ProfileRemainderH,
}

impl BoundKind {
    pub fn as_str(self) -> &'static str {
        match self {
            BoundKind::GEnergy => "g_energy",
            BoundKind::HEnergy => "h_energy",
            BoundKind::ProfileRemainderG => "profile_remainder_g",
            BoundKind::ProfileRemainderH => "profile_remainder_h",
        }
    }

    pub const ALL: [BoundKind; 4] = [
        BoundKind::GEnergy,
        BoundKind::HEnergy,
        BoundKind::ProfileRemainderG,
        BoundKind::ProfileRemainderH,
    ];

    fn is_profile(self) -> bool {
        matches!(self, BoundKind::ProfileRemainderG | BoundKind::ProfileRemainderH)
    }
}

/// Result of a grid sweep for one bound.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundCertificate {
    pub bound: BoundKind,
    /// Empirical constant `C` at the certified rate.
    pub sup_ratio: f64,
    pub fitted_c: f64,
    pub grid_spec: String,
    pub passed: bool,
    /// `(c, sup)` for every candidate tried, in the order given.
    pub sweep: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertifyOptions {
    pub cap: f64,
    pub r0: f64,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        Self { cap: 1e3, r0: 0.5 }
    }
}

/// `|ξ|` from `1e-3` to `1e2`, 200 log-spaced points.
pub fn default_xi_grid() -> Vec<f64> {
    log_space(1e-3, 1e2, 200)
}

/// `t` from 0 to `1e3`, 200 equally spaced points.
pub fn default_t_grid() -> Vec<f64> {
    (0..200).map(|j| 1e3 * j as f64 / 199.0).collect()
}

pub fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|j| match j {
            0 => lo,
            _ if j == n - 1 => hi,
            _ => (a + (b - a) * j as f64 / (n - 1) as f64).exp(),
        })
        .collect()
}

/// `(ln LHS − ln weight, decay exponent per unit c·t)` at one grid point, or
/// `None` when the left side vanishes.
fn log_ratio_parts(bound: BoundKind, r: f64, t: f64, params: &ModelParams) -> Option<(f64, f64)> {
    let xi2 = r * r;
    let rp = roots(xi2, params).expect("grid frequencies are nonnegative");
    let s = propagator_from_roots(&rp, params.stiffness(xi2), t);
    let w2 = xi2 * (1.0 + xi2);
    let (lhs, weight, rate) = match bound {
        BoundKind::GEnergy => (w2 * s.g.norm_sqr() + s.gt.norm_sqr(), 1.0, omega(xi2)),
        BoundKind::HEnergy => (w2 * s.h.norm_sqr() + s.ht.norm_sqr(), w2, omega(xi2)),
        BoundKind::ProfileRemainderG | BoundKind::ProfileRemainderH => {
            let (g0, h0) = profile_symbols(xi2, t, params).expect("nonnegative");
            if bound == BoundKind::ProfileRemainderG {
                ((s.g - g0).norm(), 1.0, xi2)
            } else {
                ((s.h - h0).norm(), r, xi2)
            }
        }
    };
    if lhs == 0.0 {
        return None;
    }
    if weight == 0.0 {
        // Both sides vanish at ξ = 0 for the weighted bounds.
        return None;
    }
    Some((lhs.ln() - weight.ln(), rate * t))
}

/// Sweeps `c` over `c_candidates` (tried in descending order) and reports the
/// largest rate whose sup-ratio stays below `options.cap`.
pub fn certify_bound(
    bound: BoundKind,
    xi_grid: &[f64],
    t_grid: &[f64],
    c_candidates: &[f64],
    params: &ModelParams,
    options: &CertifyOptions,
) -> Result<BoundCertificate> {
    if xi_grid.is_empty() || t_grid.is_empty() || c_candidates.is_empty() {
        return Err(Error::InvalidArgument("certification grids must be nonempty".into()));
    }
    if xi_grid.iter().chain(t_grid).any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(Error::InvalidArgument("grid values must be finite and nonnegative".into()));
    }
    let xis: Vec<f64> = if bound.is_profile() {
        xi_grid.iter().copied().filter(|&r| r <= options.r0).collect()
    } else {
        xi_grid.to_vec()
    };
    if xis.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "no frequencies at or below r0 = {}",
            options.r0
        )));
    }
    let parts: Vec<(f64, f64)> = xis
        .par_iter()
        .flat_map_iter(|&r| t_grid.iter().filter_map(move |&t| log_ratio_parts(bound, r, t, params)))
        .collect();
    let sup_for = |c: f64| -> f64 {
        let log_sup = parts
            .iter()
            .map(|(lr, e)| lr + c * e)
            .fold(f64::NEG_INFINITY, f64::max);
        log_sup.exp()
    };
    let mut order: Vec<f64> = c_candidates.to_vec();
    order.sort_by(|a, b| b.total_cmp(a));
    let mut sweep = Vec::with_capacity(order.len());
    let mut chosen: Option<(f64, f64)> = None;
    for &c in &order {
        let sup = sup_for(c);
        sweep.push((c, sup));
        if chosen.is_none() && sup.is_finite() && sup <= options.cap {
            chosen = Some((c, sup));
        }
    }
    let grid_spec = format!(
        "|xi| in [{:e}, {:e}] x {}, t in [{:e}, {:e}] x {}",
        xis.first().unwrap(),
        xis.last().unwrap(),
        xis.len(),
        t_grid.iter().copied().fold(f64::INFINITY, f64::min),
        t_grid.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        t_grid.len()
    );
    Ok(match chosen {
        Some((c, sup)) => BoundCertificate {
            bound,
            sup_ratio: sup,
            fitted_c: c,
            grid_spec,
            passed: true,
            sweep,
        },
        None => {
            let (c, sup) = *sweep.last().expect("nonempty candidates");
            BoundCertificate { bound, sup_ratio: sup, fitted_c: c, grid_spec, passed: false, sweep }
        }
    })
}

/// Default descending rate candidates.
pub fn default_c_candidates() -> Vec<f64> {
    vec![2.0, 1.0, 0.5, 0.4, 0.3, 0.25, 0.2, 0.15, 0.1, 0.05, 0.02, 0.01, 0.0]
}

/// Measured sides of one product inequality.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductSides {
    pub lhs: f64,
    pub rhs: f64,
}

impl ProductSides {
    /// `lhs / rhs`, or `None` when both vanish.
    pub fn constant(&self) -> Option<f64> {
        if self.rhs == 0.0 {
            if self.lhs == 0.0 {
                None
            } else {
                Some(f64::INFINITY)
            }
        } else {
            Some(self.lhs / self.rhs)
        }
    }
}

/// Both product inequalities for `f(v) = v²` at one derivative order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductReport {
    pub m: u32,
    /// `(r, p, q)`; `∞` is `f64::INFINITY`.
    pub exponents: (f64, f64, f64),
    /// `‖∂^m f(v)‖_{L^r}` against `‖v‖_{L^p} ‖∂^m v‖_{L^q}`.
    pub single: ProductSides,
    /// `‖∂^m(f(v) − f(w))‖_{L^r}` against
    /// `(‖∂^m v‖_{L^q} + ‖∂^m w‖_{L^q}) ‖v−w‖_{L^p} + (‖v‖_{L^p} + ‖w‖_{L^p}) ‖∂^m(v−w)‖_{L^q}`.
    pub difference: ProductSides,
}

fn lp(field: &PhysicalField, p: f64) -> Result<f64> {
    if p.is_infinite() {
        norm(field, NormSpec::Linf)
    } else {
        norm(field, NormSpec::Lp(p))
    }
}

/// `‖∂^m v‖_{L^p}` with `m ∈ {0, 1}`; for `m = 1` only `p = 2` is needed and
/// the gradient norm comes from Plancherel.
fn deriv_norm(field: &PhysicalField, m: u32, p: f64) -> Result<f64> {
    match m {
        0 => lp(field, p),
        1 if p == 2.0 => norm(field, NormSpec::SobolevDeriv(1)),
        _ => Err(Error::InvalidArgument(format!("derivative order {m} with L^{p} not supported"))),
    }
}

fn product(a: &PhysicalField, b: &PhysicalField) -> Result<PhysicalField> {
    let values = a.values().iter().zip(b.values()).map(|(x, y)| x * y).collect();
    PhysicalField::new(*a.grid(), values)
}

/// Measures both sides of the product inequalities with `θ = 1`:
/// `(r, p, q) = (1, 2, 2)` for `m = 0` and `(2, ∞, 2)` for `m = 1`.
pub fn product_estimate_check(v: &PhysicalField, w: &PhysicalField, m: u32) -> Result<ProductReport> {
    if v.grid() != w.grid() {
        return Err(Error::GridMismatch);
    }
    let (r, p, q) = match m {
        0 => (1.0, 2.0, 2.0),
        1 => (2.0, f64::INFINITY, 2.0),
        _ => return Err(Error::InvalidArgument(format!("derivative order {m} not in {{0, 1}}"))),
    };
    let v2 = product(v, v)?;
    let w2 = product(w, w)?;
    let single_lhs = deriv_norm(&v2, m, r)?;
    // Work with squared factors and take one square root, so that the
    // Cauchy–Schwarz equality case returns the constant 1 exactly.
    let sq = |f: &PhysicalField, m: u32, p: f64| -> Result<f64> {
        if m == 0 && p == 2.0 {
            Ok(f.values().iter().map(|x| x * x).sum::<f64>() * f.grid().cell_volume())
        } else {
            Ok(deriv_norm(f, m, p)?.powi(2))
        }
    };
    let single_rhs = (sq(v, 0, p)? * sq(v, m, q)?).sqrt();
    let diff = v.sub(w)?;
    let diff_sq = v2.sub(&w2)?;
    let difference_lhs = deriv_norm(&diff_sq, m, r)?;
    let difference_rhs = (deriv_norm(v, m, q)? + deriv_norm(w, m, q)?) * lp(&diff, p)?
        + (lp(v, p)? + lp(w, p)?) * deriv_norm(&diff, m, q)?;
    Ok(ProductReport {
        m,
        exponents: (r, p, q),
        single: ProductSides { lhs: single_lhs, rhs: single_rhs },
        difference: ProductSides { lhs: difference_lhs, rhs: difference_rhs },
    })
}

/// `sup_k (1+t)^{n/4 + k/2} ‖|∇|^k u(t)‖_{L²}` for `k = 0..=k_max`, per time.
pub fn x_norm_proxy(run: &Trajectory, k_max: u32) -> Result<Vec<f64>> {
    let dim = run.grid.dim() as f64;
    run.states
        .par_iter()
        .map(|s| {
            let spec = forward_transform(&s.u)?;
            let mut best: f64 = 0.0;
            for k in 0..=k_max {
                let weight = (1.0 + s.t).powf(dim / 4.0 + k as f64 / 2.0);
                best = best.max(weight * norm(&spec, NormSpec::SobolevDeriv(k))?);
            }
            Ok(best)
        })
        .collect()
}

/// Mode-summed `E`, `F`, `E₀` of a state (Plancherel-weighted).
pub fn spectral_energy(state: &StatePair, params: &ModelParams) -> Result<EnergyTerms> {
    let grid = *state.grid();
    let u = forward_transform(&state.u)?;
    let v = forward_transform(&state.ut)?;
    let mut total = EnergyTerms { e: 0.0, f: 0.0, e0: 0.0 };
    for j in 0..grid.len() {
        let t = energy_functionals(grid.xi2(j), u.coeffs()[j], v.coeffs()[j], params);
        total.e += t.e;
        total.f += t.f;
        total.e0 += t.e0;
    }
    let w = grid.dual_cell_volume();
    Ok(EnergyTerms { e: total.e * w, f: total.f * w, e0: total.e0 * w })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::make_grid;
    use std::f64::consts::PI;

    fn label() -> SeriesLabel {
        SeriesLabel { k: 0, norm_kind: NormKind::Displacement, source: SeriesSource::Linear }
    }

    fn series(f: impl Fn(f64) -> f64, times: &[f64]) -> DecaySeries {
        DecaySeries::new(times.to_vec(), times.iter().map(|&t| f(t)).collect(), label()).unwrap()
    }

    #[test]
    fn exact_power_law_fit() {
        let times = log_space(1.0, 1e4, 40);
        let s = series(|t| (1.0 + t).powf(-0.75), &times);
        let fit = fit_rate(&s, (1.0, 1e4)).unwrap();
        assert!((fit.slope + 0.75).abs() < 1e-12);
        assert!(fit.stderr < 1e-12);
        let c = series(|_| 3.0, &times);
        assert!(fit_rate(&c, (10.0, 1e3)).unwrap().slope.abs() < 1e-12);
    }

    #[test]
    fn log_corrected_law_fit() {
        let times = log_space(1e2, 1e4, 60);
        let s = series(|t| (1.0 + t).powf(-0.5) * (2.0 + t).ln(), &times);
        let fit = fit_rate(&s, (1e2, 1e4)).unwrap();
        // Normal equations on raw sums as an independent oracle.
        let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
        for &t in &times {
            let x = (1.0 + t).ln();
            let y = -0.5 * x + (2.0 + t).ln().ln();
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        let n = times.len() as f64;
        let oracle = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        assert!((fit.slope - oracle).abs() < 1e-9, "{} vs {oracle}", fit.slope);
        // The logarithm lifts the apparent exponent well above -1/2 here.
        assert!(fit.slope > -0.4 && fit.slope < -0.3, "{}", fit.slope);
    }

    #[test]
    fn fit_errors() {
        let times = log_space(1.0, 100.0, 10);
        let mut s = series(|t| 1.0 / t, &times);
        s.values[5] = 0.0;
        assert!(matches!(fit_rate(&s, (1.0, 100.0)), Err(Error::NonPositive { .. })));
        assert!(fit_rate(&s, (1.0, 2.0)).is_err());
    }

    #[test]
    fn eta_branches() {
        assert_eq!(eta(123.0, 1).unwrap(), 1.0);
        assert!((eta(0.0, 2).unwrap() - 2f64.ln()).abs() < 1e-15);
        assert_eq!(eta(3.0, 3).unwrap(), 0.5);
        assert!(eta(1.0, 0).is_err());
    }

    #[test]
    fn series_validation() {
        assert!(DecaySeries::new(vec![0.0, 1.0], vec![1.0], label()).is_err());
        assert!(DecaySeries::new(vec![1.0, 0.0], vec![1.0, 1.0], label()).is_err());
        assert!(DecaySeries::new(vec![0.0, 1.0], vec![1.0, -1.0], label()).is_err());
    }

    #[test]
    fn certificate_at_zero_rate_is_normalised() {
        let params = ModelParams::new(-1.0, 1.0).unwrap();
        let xi = log_space(1e-2, 10.0, 30);
        let t = vec![0.0, 1.0, 2.0];
        let cert = certify_bound(BoundKind::HEnergy, &xi, &t, &[0.0], &params, &Default::default())
            .unwrap();
        assert!(cert.passed);
        assert!(cert.sup_ratio >= 1.0 - 1e-12);
        let at_zero = certify_bound(BoundKind::HEnergy, &xi, &[0.0], &[0.0], &params, &Default::default())
            .unwrap();
        assert_eq!(at_zero.sup_ratio, 1.0);
        assert!(certify_bound(BoundKind::GEnergy, &[], &t, &[0.0], &params, &Default::default()).is_err());
    }

    #[test]
    fn impossible_rate_fails_without_error() {
        let params = ModelParams::new(-1.0, 1.0).unwrap();
        let cert = certify_bound(
            BoundKind::GEnergy,
            &default_xi_grid(),
            &default_t_grid(),
            &[50.0],
            &params,
            &Default::default(),
        )
        .unwrap();
        assert!(!cert.passed);
    }

    #[test]
    fn cauchy_schwarz_case_is_exact() {
        let g = make_grid(1, 2.0 * PI, 64).unwrap();
        let v = g.sample(|x| 1.0 + 0.5 * x[0].cos()).unwrap();
        let rep = product_estimate_check(&v, &v, 0).unwrap();
        assert_eq!(rep.single.constant(), Some(1.0));
        assert_eq!(rep.difference.lhs, 0.0);
        assert_eq!(rep.difference.rhs, 0.0);
        assert_eq!(rep.difference.constant(), None);
    }

    #[test]
    fn cosine_product_rule_bound() {
        let g = make_grid(1, 2.0 * PI, 64).unwrap();
        let v = g.sample(|x| x[0].cos()).unwrap();
        let rep = product_estimate_check(&v, &v, 1).unwrap();
        // ‖∂(cos²)‖ = ‖sin 2x‖ = √π, ‖cos‖_∞ ‖∂cos‖ = √π.
        assert!((rep.single.lhs - PI.sqrt()).abs() < 1e-12);
        assert!((rep.single.rhs - PI.sqrt()).abs() < 1e-12);
        assert!(rep.single.lhs <= 2.0 * rep.single.rhs);
    }
}
