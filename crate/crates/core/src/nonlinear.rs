//! Solvers for the full Cauchy problem.
//!
//! Three independent routes to the same trajectory:
//! an exponential integrator built on the closed-form symbols, the Picard map
//! of the existence argument iterated over a stored trajectory, and an
//! adaptive Dormand–Prince method of lines that never touches the closed forms.

use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linear::StatePair;
use crate::spectral::{FourierTransform, Grid, PhysicalField, SpectralField};
use crate::symbols::{propagator_from_roots, roots, step_weights, ModelParams, StepWeights};

/// Admissible nonlinear functions, all `O(v²)` at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NonlinearKind {
    #[default]
    Quadratic,
    Cubic,
    None,
}

impl NonlinearKind {
    pub fn apply(self, v: f64) -> f64 {
        match self {
            NonlinearKind::Quadratic => v * v,
            NonlinearKind::Cubic => v * v * v,
            NonlinearKind::None => 0.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            NonlinearKind::Quadratic => "quadratic",
            NonlinearKind::Cubic => "cubic",
            NonlinearKind::None => "none",
        }
    }
}

impl FromStr for NonlinearKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quadratic" => Ok(NonlinearKind::Quadratic),
            "cubic" => Ok(NonlinearKind::Cubic),
            "none" => Ok(NonlinearKind::None),
            other => Err(Error::InvalidArgument(format!(
                "unknown nonlinearity '{other}' (expected quadratic, cubic or none)"
            ))),
        }
    }
}

/// How `f`, `g` and `β` enter the source `Δ(·)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SourceConvention {
    /// `f(u) + β g(u_t)`
    #[default]
    Standard,
    /// `β f(u_t) + g(u)`
    SwappedArguments,
    /// `f(u) − β g(u_t)`
    NegativeBeta,
}

impl SourceConvention {
    pub fn as_str(self) -> &'static str {
        match self {
            SourceConvention::Standard => "standard",
            SourceConvention::SwappedArguments => "swapped",
            SourceConvention::NegativeBeta => "negative_beta",
        }
    }
}

impl FromStr for SourceConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "standard" => Ok(SourceConvention::Standard),
            "swapped" => Ok(SourceConvention::SwappedArguments),
            "negative_beta" => Ok(SourceConvention::NegativeBeta),
            other => Err(Error::InvalidArgument(format!(
                "unknown source convention '{other}' (expected standard, swapped or negative_beta)"
            ))),
        }
    }
}

/// Nonlinear source `Δ(f(u) + β g(u_t))` and its variants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonlinearitySpec {
    pub f_kind: NonlinearKind,
    pub g_kind: NonlinearKind,
    pub beta: f64,
    pub convention: SourceConvention,
}

impl NonlinearitySpec {
    pub fn new(f_kind: NonlinearKind, g_kind: NonlinearKind, params: &ModelParams) -> Self {
        Self {
            f_kind,
            g_kind,
            beta: params.beta(),
            convention: SourceConvention::Standard,
        }
    }

    /// The purely linear problem.
    pub fn none() -> Self {
        Self {
            f_kind: NonlinearKind::None,
            g_kind: NonlinearKind::None,
            beta: 1.0,
            convention: SourceConvention::Standard,
        }
    }

    pub fn with_convention(mut self, convention: SourceConvention) -> Self {
        self.convention = convention;
        self
    }

    pub fn is_linear(&self) -> bool {
        self.f_kind == NonlinearKind::None && self.g_kind == NonlinearKind::None
    }

    /// Pointwise source before the Laplacian.
    pub fn pointwise(&self, u: f64, ut: f64) -> f64 {
        match self.convention {
            SourceConvention::Standard => self.f_kind.apply(u) + self.beta * self.g_kind.apply(ut),
            SourceConvention::SwappedArguments => {
                self.beta * self.f_kind.apply(ut) + self.g_kind.apply(u)
            }
            SourceConvention::NegativeBeta => {
                self.f_kind.apply(u) - self.beta * self.g_kind.apply(ut)
            }
        }
    }
}

/// Stored solution on a time mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub grid: Grid,
    pub times: Vec<f64>,
    pub states: Vec<StatePair>,
}

impl Trajectory {
    pub fn new(grid: Grid, states: Vec<StatePair>) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::MeshMismatch("trajectory has no states".into()));
        }
        if states[0].t != 0.0 {
            return Err(Error::MeshMismatch("trajectory must start at t = 0".into()));
        }
        for w in states.windows(2) {
            if !(w[1].t > w[0].t) {
                return Err(Error::MeshMismatch("times must increase strictly".into()));
            }
        }
        if states.iter().any(|s| *s.grid() != grid) {
            return Err(Error::GridMismatch);
        }
        let times = states.iter().map(|s| s.t).collect();
        Ok(Self { grid, times, states })
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn last(&self) -> &StatePair {
        self.states.last().expect("trajectory is never empty")
    }
}

/// Evaluates the dealiased spectral source for spectral states on one grid.
#[derive(Debug, Clone)]
struct SourceEvaluator {
    grid: Grid,
    fft: FourierTransform,
    xi2: Vec<f64>,
    mask: Vec<bool>,
    spec: NonlinearitySpec,
}

impl SourceEvaluator {
    fn new(grid: Grid, spec: NonlinearitySpec) -> Self {
        Self {
            grid,
            fft: FourierTransform::new(grid),
            xi2: grid.xi2_table(),
            mask: grid.dealias_mask(),
            spec,
        }
    }

    fn eval(&self, u_hat: &[Complex64], ut_hat: &[Complex64], time: f64) -> Result<Vec<Complex64>> {
        let n = self.grid.len();
        let zero = Complex64::new(0.0, 0.0);
        if self.spec.is_linear() {
            return Ok(vec![zero; n]);
        }
        let masked = |c: &[Complex64]| -> Vec<Complex64> {
            c.iter()
                .zip(&self.mask)
                .map(|(&v, &keep)| if keep { v } else { zero })
                .collect()
        };
        let mut u = vec![0.0; n];
        let mut ut = vec![0.0; n];
        self.fft.inverse_into(&masked(u_hat), &mut u);
        self.fft.inverse_into(&masked(ut_hat), &mut ut);
        let mut source = Vec::with_capacity(n);
        for (a, b) in u.iter().zip(&ut) {
            let s = self.spec.pointwise(*a, *b);
            if !s.is_finite() {
                return Err(Error::BlowUp { time });
            }
            source.push(s);
        }
        let mut out = vec![zero; n];
        self.fft.forward_into(&source, &mut out);
        for ((c, &x2), &keep) in out.iter_mut().zip(&self.xi2).zip(&self.mask) {
            *c = if keep { -x2 * *c } else { zero };
        }
        Ok(out)
    }
}

/// Fourier coefficients of `Δ(f(u) + β g(u_t))`, 2/3-dealiased on input and output.
pub fn nonlinearity(state: &StatePair, spec: &NonlinearitySpec) -> Result<SpectralField> {
    let grid = *state.grid();
    let eval = SourceEvaluator::new(grid, *spec);
    let u_hat = eval.fft.forward(&state.u)?;
    let ut_hat = eval.fft.forward(&state.ut)?;
    let coeffs = eval.eval(u_hat.coeffs(), ut_hat.coeffs(), state.t)?;
    SpectralField::new(grid, coeffs)
}

/// Second-order exponential integrator with per-mode weights fixed for one `dt`.
#[derive(Debug, Clone)]
pub struct DuhamelStepper {
    source: SourceEvaluator,
    weights: Vec<StepWeights>,
    dt: f64,
}

impl DuhamelStepper {
    pub fn new(grid: Grid, dt: f64, spec: &NonlinearitySpec, params: &ModelParams) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidArgument(format!("step {dt} must be positive")));
        }
        let source = SourceEvaluator::new(grid, *spec);
        let weights = source
            .xi2
            .par_iter()
            .map(|&x2| step_weights(x2, dt, params))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { source, weights, dt })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn grid(&self) -> &Grid {
        &self.source.grid
    }

    /// Advances spectral `(û, û_t)` from time `t` by one step, in place.
    pub fn step(&self, u_hat: &mut [Complex64], ut_hat: &mut [Complex64], t: f64) -> Result<()> {
        let h = self.dt;
        let n_now = self.source.eval(u_hat, ut_hat, t)?;
        for (j, w) in self.weights.iter().enumerate() {
            let (u, v, nn) = (u_hat[j], ut_hat[j], n_now[j]);
            u_hat[j] = w.h * u + w.g * v + w.int_g * nn;
            ut_hat[j] = w.ht * u + w.gt * v + w.g * nn;
        }
        if self.source.spec.is_linear() {
            return Ok(());
        }
        let n_pred = self.source.eval(u_hat, ut_hat, t + h)?;
        for (j, w) in self.weights.iter().enumerate() {
            let dn = n_pred[j] - n_now[j];
            u_hat[j] += w.int_g_ramp * dn;
            ut_hat[j] += (w.int_g / h) * dn;
        }
        Ok(())
    }
}

/// One exponential step from `state`.
pub fn step_duhamel(
    state: &StatePair,
    dt: f64,
    spec: &NonlinearitySpec,
    params: &ModelParams,
) -> Result<StatePair> {
    let grid = *state.grid();
    let stepper = DuhamelStepper::new(grid, dt, spec, params)?;
    let fft = &stepper.source.fft;
    let mut u = fft.forward(&state.u)?.into_coeffs();
    let mut ut = fft.forward(&state.ut)?.into_coeffs();
    stepper.step(&mut u, &mut ut, state.t)?;
    to_state(fft, &u, &ut, state.t + dt)
}

fn to_state(fft: &FourierTransform, u_hat: &[Complex64], ut_hat: &[Complex64], t: f64) -> Result<StatePair> {
    let grid = *fft.grid();
    let mut u = vec![0.0; grid.len()];
    let mut ut = vec![0.0; grid.len()];
    fft.inverse_into(u_hat, &mut u);
    fft.inverse_into(ut_hat, &mut ut);
    let u = PhysicalField::new(grid, u).map_err(|_| Error::BlowUp { time: t })?;
    let ut = PhysicalField::new(grid, ut).map_err(|_| Error::BlowUp { time: t })?;
    StatePair::new(u, ut, t)
}

/// Controls for [`solve`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    /// Time between recorded states; must be a whole number of steps.
    pub output_cadence: f64,
    /// Abort once a norm exceeds this multiple of its initial value.
    pub blowup_factor: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { output_cadence: 1.0, blowup_factor: 1e6 }
    }
}

fn whole_multiple(total: f64, unit: f64, what: &str) -> Result<usize> {
    let ratio = total / unit;
    let n = ratio.round();
    if n < 1.0 || (ratio - n).abs() > 1e-9 * n {
        return Err(Error::InvalidArgument(format!(
            "{what}: {total} is not a whole multiple of {unit}"
        )));
    }
    Ok(n as usize)
}

fn spectral_l2(c: &[Complex64]) -> f64 {
    c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Integrates to `t_final` with fixed step `dt`, recording states every
/// `options.output_cadence`.
pub fn solve(
    u0: &PhysicalField,
    u1: &PhysicalField,
    t_final: f64,
    dt: f64,
    spec: &NonlinearitySpec,
    params: &ModelParams,
    options: &SolveOptions,
) -> Result<Trajectory> {
    if u0.grid() != u1.grid() {
        return Err(Error::GridMismatch);
    }
    if !(t_final.is_finite() && t_final > 0.0) {
        return Err(Error::InvalidArgument(format!("horizon {t_final} must be positive")));
    }
    let steps_per_output = whole_multiple(options.output_cadence, dt, "output cadence")?;
    let outputs = whole_multiple(t_final, options.output_cadence, "horizon")?;
    let grid = *u0.grid();
    let stepper = DuhamelStepper::new(grid, dt, spec, params)?;
    let fft = stepper.source.fft.clone();
    let mut u = fft.forward(u0)?.into_coeffs();
    let mut ut = fft.forward(u1)?.into_coeffs();
    let initial = spectral_l2(&u).hypot(spectral_l2(&ut));
    let limit = options.blowup_factor * initial;
    let mut states = Vec::with_capacity(outputs + 1);
    states.push(StatePair::new(u0.clone(), u1.clone(), 0.0)?);
    let mut step = 0usize;
    for out in 1..=outputs {
        for _ in 0..steps_per_output {
            let t = step as f64 * dt;
            stepper.step(&mut u, &mut ut, t)?;
            step += 1;
            let size = spectral_l2(&u).hypot(spectral_l2(&ut));
            if !size.is_finite() || (initial > 0.0 && size > limit) {
                let time = step as f64 * dt;
                log::warn!("blow-up guard tripped at t = {time}");
                return Err(Error::BlowUp { time });
            }
        }
        let t = out as f64 * options.output_cadence;
        states.push(to_state(&fft, &u, &ut, t)?);
    }
    Trajectory::new(grid, states)
}

/// Applies the Picard map once:
/// `Φ(w)(t) = G(t)∗u1 + H(t)∗u0 + ∫₀ᵗ G(t−τ)∗Δ(f(w) + βg(w_t))(τ) dτ`,
/// with the time integral done by the composite trapezoid rule on the mesh of
/// `base`.
pub fn picard_iterate(
    base: &Trajectory,
    u0: &PhysicalField,
    u1: &PhysicalField,
    spec: &NonlinearitySpec,
    params: &ModelParams,
) -> Result<Trajectory> {
    if u0.grid() != u1.grid() {
        return Err(Error::GridMismatch);
    }
    let grid = base.grid;
    if *u0.grid() != grid {
        return Err(Error::MeshMismatch("data and trajectory live on different grids".into()));
    }
    let times = &base.times;
    if times.first() != Some(&0.0) || times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::MeshMismatch("time mesh must start at 0 and increase".into()));
    }
    let m = times.len();
    let eval = SourceEvaluator::new(grid, *spec);
    let fft = eval.fft.clone();
    let a0 = fft.forward(u0)?.into_coeffs();
    let a1 = fft.forward(u1)?.into_coeffs();
    let sources = base
        .states
        .iter()
        .map(|s| {
            let uh = fft.forward(&s.u)?;
            let vh = fft.forward(&s.ut)?;
            eval.eval(uh.coeffs(), vh.coeffs(), s.t)
        })
        .collect::<Result<Vec<_>>>()?;

    // Trapezoid weights on [0, t_j] for each j, from the local spacings.
    let spacing: Vec<f64> = times.windows(2).map(|w| w[1] - w[0]).collect();
    let t_end = *times.last().expect("nonempty mesh");
    let uniform = spacing
        .iter()
        .all(|&h| (h - spacing[0]).abs() <= 1e-12 * t_end.max(1.0));

    let modes = grid.len();
    let params = *params;
    // Per-mode evaluation of the linear part plus the Duhamel sum at every t_j.
    let per_mode: Vec<(Vec<Complex64>, Vec<Complex64>)> = (0..modes)
        .into_par_iter()
        .map(|q| {
            let x2 = grid.xi2(q);
            let rp = roots(x2, &params).expect("lattice frequencies are nonnegative");
            let c = params.stiffness(x2);
            let sym = |t: f64| {
                let s = propagator_from_roots(&rp, c, t);
                (s.g.re, s.gt.re, s.h.re, s.ht.re)
            };
            let table: Option<Vec<(f64, f64, f64, f64)>> = if uniform && m > 1 {
                Some((0..m).map(|k| sym(k as f64 * spacing[0])).collect())
            } else {
                None
            };
            let at = |j: usize, i: usize| -> (f64, f64, f64, f64) {
                match &table {
                    Some(tab) => tab[j - i],
                    None => sym(times[j] - times[i]),
                }
            };
            let mut us = Vec::with_capacity(m);
            let mut vs = Vec::with_capacity(m);
            for j in 0..m {
                let (g, gt, h, ht) = match &table {
                    Some(tab) => tab[j],
                    None => sym(times[j]),
                };
                let mut u = h * a0[q] + g * a1[q];
                let mut v = ht * a0[q] + gt * a1[q];
                for i in 0..=j {
                    if j == 0 {
                        break;
                    }
                    let w = if i == 0 {
                        0.5 * spacing[0]
                    } else if i == j {
                        0.5 * spacing[j - 1]
                    } else {
                        0.5 * (spacing[i - 1] + spacing[i])
                    };
                    let (g, gt, _, _) = at(j, i);
                    u += w * g * sources[i][q];
                    v += w * gt * sources[i][q];
                }
                us.push(u);
                vs.push(v);
            }
            (us, vs)
        })
        .collect();

    let mut states = Vec::with_capacity(m);
    let mut u_hat = vec![Complex64::new(0.0, 0.0); modes];
    let mut v_hat = u_hat.clone();
    for (j, &t) in times.iter().enumerate() {
        for q in 0..modes {
            u_hat[q] = per_mode[q].0[j];
            v_hat[q] = per_mode[q].1[j];
        }
        if j == 0 {
            states.push(StatePair::new(u0.clone(), u1.clone(), 0.0)?);
        } else {
            states.push(to_state(&fft, &u_hat, &v_hat, t)?);
        }
    }
    Trajectory::new(grid, states)
}

// Dormand–Prince 5(4) tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// Difference between the fifth- and fourth-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Right-hand side of the spectral ODE system, written directly from the
/// equation: `û' = v̂`, `v̂' = −b v̂ − c û + N̂`.
struct MolSystem {
    source: SourceEvaluator,
    damping: Vec<f64>,
    stiffness: Vec<f64>,
}

impl MolSystem {
    fn rhs(&self, t: f64, y: &[Complex64], dy: &mut [Complex64]) -> Result<()> {
        let n = self.damping.len();
        let (u, v) = y.split_at(n);
        let src = self.source.eval(u, v, t)?;
        for j in 0..n {
            dy[j] = v[j];
            dy[n + j] = -self.damping[j] * v[j] - self.stiffness[j] * u[j] + src[j];
        }
        Ok(())
    }
}

fn combine(y: &[Complex64], h: f64, terms: &[(f64, &[Complex64])], out: &mut [Complex64]) {
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        for (c, k) in terms {
            if *c != 0.0 {
                acc += *c * k[i];
            }
        }
        *o = y[i] + h * acc;
    }
}

/// Adaptive Dormand–Prince integration of the spectral method of lines,
/// returning states at `output_times` (which must start at 0 and increase).
pub fn reference_solve_at(
    u0: &PhysicalField,
    u1: &PhysicalField,
    output_times: &[f64],
    spec: &NonlinearitySpec,
    params: &ModelParams,
    tol: f64,
) -> Result<Trajectory> {
    if u0.grid() != u1.grid() {
        return Err(Error::GridMismatch);
    }
    if !(1e-12..=1e-4).contains(&tol) {
        return Err(Error::InvalidArgument(format!("tolerance {tol:e} outside [1e-12, 1e-4]")));
    }
    if output_times.first() != Some(&0.0) || output_times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::MeshMismatch("output times must start at 0 and increase".into()));
    }
    let grid = *u0.grid();
    let source = SourceEvaluator::new(grid, *spec);
    let fft = source.fft.clone();
    let n = grid.len();
    let damping: Vec<f64> = source.xi2.iter().map(|&x2| x2 * x2 - params.alpha() * x2).collect();
    let stiffness: Vec<f64> = source.xi2.iter().map(|&x2| x2 + x2 * x2).collect();
    let sys = MolSystem { source, damping, stiffness };

    let mut y = fft.forward(u0)?.into_coeffs();
    y.extend(fft.forward(u1)?.into_coeffs());
    let zero = Complex64::new(0.0, 0.0);
    let mut k: Vec<Vec<Complex64>> = vec![vec![zero; 2 * n]; 7];
    let mut stage = vec![zero; 2 * n];
    let mut y_new = vec![zero; 2 * n];

    let mut states = vec![StatePair::new(u0.clone(), u1.clone(), 0.0)?];
    let mut t = 0.0;
    let mut h = 1e-3f64.min(output_times.get(1).copied().unwrap_or(1.0));
    sys.rhs(t, &y, &mut k[0])?;
    for &target in &output_times[1..] {
        while t < target {
            let last = target - t <= h * (1.0 + 1e-12);
            let h_try = if last { target - t } else { h };
            if h_try < 1e-14 * t.abs().max(1.0) {
                return Err(Error::StepSizeUnderflow { time: t });
            }
            combine(&y, h_try, &[(A21, &k[0])], &mut stage);
            sys.rhs(t + C2 * h_try, &stage, &mut k[1])?;
            combine(&y, h_try, &[(A31, &k[0]), (A32, &k[1])], &mut stage);
            sys.rhs(t + C3 * h_try, &stage, &mut k[2])?;
            combine(&y, h_try, &[(A41, &k[0]), (A42, &k[1]), (A43, &k[2])], &mut stage);
            sys.rhs(t + C4 * h_try, &stage, &mut k[3])?;
            combine(
                &y,
                h_try,
                &[(A51, &k[0]), (A52, &k[1]), (A53, &k[2]), (A54, &k[3])],
                &mut stage,
            );
            sys.rhs(t + C5 * h_try, &stage, &mut k[4])?;
            combine(
                &y,
                h_try,
                &[(A61, &k[0]), (A62, &k[1]), (A63, &k[2]), (A64, &k[3]), (A65, &k[4])],
                &mut stage,
            );
            sys.rhs(t + h_try, &stage, &mut k[5])?;
            combine(
                &y,
                h_try,
                &[(B1, &k[0]), (B3, &k[2]), (B4, &k[3]), (B5, &k[4]), (B6, &k[5])],
                &mut y_new,
            );
            sys.rhs(t + h_try, &y_new, &mut k[6])?;

            let mut err2 = 0.0;
            for i in 0..2 * n {
                let e = h_try
                    * (E1 * k[0][i] + E3 * k[2][i] + E4 * k[3][i] + E5 * k[4][i] + E6 * k[5][i]
                        + E7 * k[6][i]);
                let scale = tol + tol * y[i].norm().max(y_new[i].norm());
                err2 += e.norm_sqr() / (scale * scale);
            }
            let err = (err2 / (2 * n) as f64).sqrt();
            if !err.is_finite() {
                return Err(Error::BlowUp { time: t });
            }
            if err <= 1.0 {
                t = if last { target } else { t + h_try };
                std::mem::swap(&mut y, &mut y_new);
                k.swap(0, 6);
            }
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            if !(last && err <= 1.0) {
                h = h_try * factor;
            }
        }
        let (u, v) = y.split_at(n);
        states.push(to_state(&fft, u, v, target)?);
    }
    Trajectory::new(grid, states)
}

/// Reference trajectory recorded at `t = 0` and `t = t_final`.
pub fn reference_solve(
    u0: &PhysicalField,
    u1: &PhysicalField,
    t_final: f64,
    spec: &NonlinearitySpec,
    params: &ModelParams,
    tol: f64,
) -> Result<Trajectory> {
    if !(t_final.is_finite() && t_final > 0.0) {
        return Err(Error::InvalidArgument(format!("horizon {t_final} must be positive")));
    }
    reference_solve_at(u0, u1, &[0.0, t_final], spec, params, tol)
}

/// Uniform output times `0, cadence, …, t_final`.
pub fn uniform_times(t_final: f64, cadence: f64) -> Result<Vec<f64>> {
    let n = whole_multiple(t_final, cadence, "horizon")?;
    Ok((0..=n).map(|j| j as f64 * cadence).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linear::{gaussian_field, linear_solution};
    use crate::spectral::{make_grid, norm, NormSpec};
    use std::f64::consts::PI;

    fn params() -> ModelParams {
        ModelParams::new(-1.0, 1.0).unwrap()
    }

    fn quad() -> NonlinearitySpec {
        NonlinearitySpec::new(NonlinearKind::Quadratic, NonlinearKind::Quadratic, &params())
    }

    fn l2_diff(a: &PhysicalField, b: &PhysicalField) -> f64 {
        norm(&a.sub(b).unwrap(), NormSpec::Lp(2.0)).unwrap()
    }

    #[test]
    fn kinds_parse_and_apply() {
        assert_eq!("cubic".parse::<NonlinearKind>().unwrap().apply(2.0), 8.0);
        assert_eq!("quadratic".parse::<NonlinearKind>().unwrap().apply(-3.0), 9.0);
        assert!("quartic".parse::<NonlinearKind>().is_err());
        assert_eq!("swapped".parse::<SourceConvention>().unwrap(), SourceConvention::SwappedArguments);
    }

    #[test]
    fn conventions_differ_as_documented() {
        let base = NonlinearitySpec {
            f_kind: NonlinearKind::Quadratic,
            g_kind: NonlinearKind::Cubic,
            beta: 2.0,
            convention: SourceConvention::Standard,
        };
        assert_eq!(base.pointwise(3.0, 1.0), 9.0 + 2.0);
        let sw = base.with_convention(SourceConvention::SwappedArguments);
        assert_eq!(sw.pointwise(3.0, 1.0), 2.0 * 1.0 + 27.0);
        let neg = base.with_convention(SourceConvention::NegativeBeta);
        assert_eq!(neg.pointwise(3.0, 1.0), 9.0 - 2.0);
    }

    #[test]
    fn cosine_square_source() {
        let g = make_grid(1, 2.0 * PI, 16).unwrap();
        let u = g.sample(|x| x[0].cos()).unwrap();
        let state = StatePair::new(u, PhysicalField::zeros(g), 0.0).unwrap();
        let spec = NonlinearitySpec::new(NonlinearKind::Quadratic, NonlinearKind::None, &params());
        let n = nonlinearity(&state, &spec).unwrap();
        let phys = crate::spectral::inverse_transform(&n).unwrap();
        let expect = g.sample(|x| -2.0 * (2.0 * x[0]).cos()).unwrap();
        assert!(l2_diff(&phys, &expect) < 1e-12);
        for (j, c) in n.coeffs().iter().enumerate() {
            if g.xi2(j) > 4.0 {
                assert!(c.norm() < 1e-14, "mode {j}: {c}");
            }
        }
    }

    #[test]
    fn constants_and_linear_spec_give_zero() {
        let g = make_grid(1, 2.0 * PI, 16).unwrap();
        let c = g.sample(|_| 0.7).unwrap();
        let state = StatePair::new(c.clone(), PhysicalField::zeros(g), 0.0).unwrap();
        let n = nonlinearity(&state, &quad()).unwrap();
        assert!(n.coeffs().iter().all(|z| z.norm() < 1e-15));
        let s = StatePair::new(g.sample(|x| x[0].sin()).unwrap(), c, 0.0).unwrap();
        let n = nonlinearity(&s, &NonlinearitySpec::none()).unwrap();
        assert!(n.coeffs().iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn overflow_is_blow_up() {
        let g = make_grid(1, 2.0 * PI, 16).unwrap();
        let u = g.sample(|_| 1e200).unwrap();
        let state = StatePair::new(u, PhysicalField::zeros(g), 2.5).unwrap();
        let spec = NonlinearitySpec::new(NonlinearKind::Cubic, NonlinearKind::None, &params());
        assert_eq!(nonlinearity(&state, &spec), Err(Error::BlowUp { time: 2.5 }));
    }

    #[test]
    fn linear_step_is_exact_propagation() {
        let g = make_grid(1, 30.0, 64).unwrap();
        let u0 = gaussian_field(&g, 1.0, 1.0).unwrap();
        let u1 = g.sample(|x| (-x[0] * x[0]).exp() * x[0]).unwrap();
        let s0 = StatePair::new(u0.clone(), u1.clone(), 0.0).unwrap();
        let stepped = step_duhamel(&s0, 0.3, &NonlinearitySpec::none(), &params()).unwrap();
        let exact = linear_solution(&u0, &u1, 0.3, &params()).unwrap();
        assert!(l2_diff(&stepped.u, &exact.u) < 1e-12);
        assert!(l2_diff(&stepped.ut, &exact.ut) < 1e-12);
        assert!(step_duhamel(&s0, 0.0, &quad(), &params()).is_err());
    }

    #[test]
    fn solve_zero_data_stays_zero() {
        let g = make_grid(1, 30.0, 32).unwrap();
        let z = PhysicalField::zeros(g);
        let opts = SolveOptions { output_cadence: 0.5, ..Default::default() };
        let traj = solve(&z, &z, 2.0, 0.1, &quad(), &params(), &opts).unwrap();
        assert_eq!(traj.times, vec![0.0, 0.5, 1.0, 1.5, 2.0]);
        assert!(traj.states.iter().all(|s| s.u.is_zero() && s.ut.is_zero()));
    }

    #[test]
    fn solve_rejects_incommensurate_cadence() {
        let g = make_grid(1, 30.0, 32).unwrap();
        let z = PhysicalField::zeros(g);
        let opts = SolveOptions { output_cadence: 0.25, ..Default::default() };
        assert!(solve(&z, &z, 1.0, 0.1, &quad(), &params(), &opts).is_err());
    }

    #[test]
    fn linear_solve_matches_closed_form() {
        let g = make_grid(1, 40.0, 128).unwrap();
        let u0 = gaussian_field(&g, 0.5, 1.0).unwrap();
        let u1 = PhysicalField::zeros(g);
        let opts = SolveOptions { output_cadence: 1.0, ..Default::default() };
        let traj = solve(&u0, &u1, 5.0, 0.05, &NonlinearitySpec::none(), &params(), &opts).unwrap();
        for s in &traj.states {
            let exact = linear_solution(&u0, &u1, s.t, &params()).unwrap();
            assert!(l2_diff(&s.u, &exact.u) < 1e-10, "t = {}", s.t);
        }
    }

    #[test]
    fn blow_up_guard_reports_time() {
        let g = make_grid(1, 2.0 * PI, 16).unwrap();
        let u0 = g.sample(|x| x[0].cos()).unwrap();
        let u1 = PhysicalField::zeros(g);
        let opts = SolveOptions { output_cadence: 0.5, blowup_factor: 1e-3 };
        assert_eq!(
            solve(&u0, &u1, 1.0, 0.25, &quad(), &params(), &opts),
            Err(Error::BlowUp { time: 0.25 })
        );
        let huge = g.sample(|x| 1e120 * x[0].cos()).unwrap();
        let spec = NonlinearitySpec::new(NonlinearKind::Cubic, NonlinearKind::None, &params());
        let opts = SolveOptions { output_cadence: 0.5, ..Default::default() };
        assert_eq!(
            solve(&huge, &u1, 1.0, 0.25, &spec, &params(), &opts),
            Err(Error::BlowUp { time: 0.0 })
        );
    }

    #[test]
    fn second_order_self_convergence() {
        let g = make_grid(1, 32.0, 64).unwrap();
        let u0 = gaussian_field(&g, 0.5, 1.0).unwrap();
        let u1 = g.sample(|x| 0.3 * x[0] * (-x[0] * x[0] / 2.0).exp()).unwrap();
        let run = |dt: f64| {
            let opts = SolveOptions { output_cadence: 10.0, ..Default::default() };
            solve(&u0, &u1, 10.0, dt, &quad(), &params(), &opts).unwrap().last().u.clone()
        };
        let (a, b, c) = (run(0.1), run(0.05), run(0.025));
        let ratio = l2_diff(&a, &b) / l2_diff(&b, &c);
        assert!((ratio - 4.0).abs() <= 0.8, "ratio {ratio}");
    }

    #[test]
    fn reference_single_mode() {
        let g = make_grid(1, 2.0 * PI, 16).unwrap();
        let u0 = PhysicalField::zeros(g);
        let u1 = g.sample(|x| x[0].cos()).unwrap();
        let tol = 1e-10;
        let traj = reference_solve(&u0, &u1, 1.0, &NonlinearitySpec::none(), &params(), tol).unwrap();
        let expect = g.sample(|x| (-1.0f64).exp() * 1f64.sin() * x[0].cos()).unwrap();
        let err = traj.last().u.values().iter().zip(expect.values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 10.0 * tol, "{err}");
        assert!(reference_solve(&u0, &u1, 1.0, &NonlinearitySpec::none(), &params(), 1e-3).is_err());
    }

    #[test]
    fn duhamel_matches_reference() {
        let g = make_grid(1, 32.0, 128).unwrap();
        let u0 = gaussian_field(&g, 0.05, 1.0).unwrap();
        let u1 = PhysicalField::zeros(g);
        let opts = SolveOptions { output_cadence: 5.0, ..Default::default() };
        let fast = solve(&u0, &u1, 5.0, 0.01, &quad(), &params(), &opts).unwrap();
        let slow = reference_solve(&u0, &u1, 5.0, &quad(), &params(), 1e-10).unwrap();
        let err = l2_diff(&fast.last().u, &slow.last().u);
        assert!(err < 1e-6, "{err}");
    }

    #[test]
    fn picard_on_linear_problem_is_a_fixed_point() {
        let g = make_grid(1, 30.0, 64).unwrap();
        let u0 = gaussian_field(&g, 0.1, 1.0).unwrap();
        let u1 = PhysicalField::zeros(g);
        let opts = SolveOptions { output_cadence: 0.5, ..Default::default() };
        let base = solve(&u0, &u1, 2.0, 0.5, &quad(), &params(), &opts).unwrap();
        let phi = picard_iterate(&base, &u0, &u1, &NonlinearitySpec::none(), &params()).unwrap();
        for s in &phi.states {
            let exact = linear_solution(&u0, &u1, s.t, &params()).unwrap();
            assert!(l2_diff(&s.u, &exact.u) < 1e-12);
        }
        let other = PhysicalField::zeros(make_grid(1, 30.0, 32).unwrap());
        assert!(matches!(
            picard_iterate(&base, &other, &other, &quad(), &params()),
            Err(Error::MeshMismatch(_))
        ));
    }
}
