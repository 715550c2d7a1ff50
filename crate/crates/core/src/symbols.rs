//! Pointwise Fourier symbols of the linear evolution.
//!
//! For each frequency the transformed linear equation is the damped
//! oscillator
//!
//! ```text
//! û_tt + b û_t + c û = 0,   b = |ξ|⁴ − α|ξ|²,   c = |ξ|² + |ξ|⁴,
//! ```
//!
//! whose fundamental solutions `Ĝ` (data `(0, 1)`) and `Ĥ` (data `(1, 0)`)
//! propagate `(û, û_t)`. All symbols take `|ξ|²` as argument.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative separation of the roots below which the confluent formulas are used.
pub const DEGENERATE_ROOT_TOL: f64 = 1e-6;

/// Coefficients of the model. The strong-damping coefficient is fixed to one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    alpha: f64,
    beta: f64,
}

impl ModelParams {
    /// Requires `alpha ≤ -1` and `beta > 0`.
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha <= -1.0) {
            return Err(Error::InvalidArgument(format!("alpha = {alpha} must satisfy alpha <= -1")));
        }
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::InvalidArgument(format!("beta = {beta} must be positive")));
        }
        Ok(Self { alpha, beta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn gamma(&self) -> f64 {
        1.0
    }

    /// Damping coefficient `b = |ξ|⁴ − α|ξ|²`.
    pub fn damping(&self, xi2: f64) -> f64 {
        xi2 * (xi2 - self.alpha)
    }

    /// Stiffness coefficient `c = |ξ|² + |ξ|⁴`.
    pub fn stiffness(&self, xi2: f64) -> f64 {
        xi2 * (1.0 + xi2)
    }
}

impl Default for ModelParams {
    fn default() -> Self {
        Self { alpha: -1.0, beta: 1.0 }
    }
}

/// Roots of `λ² + bλ + c = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootPair {
    pub lambda_plus: Complex64,
    pub lambda_minus: Complex64,
    pub discriminant: f64,
    pub degenerate: bool,
}

fn check_xi2(xi2: f64) -> Result<()> {
    if xi2.is_finite() && xi2 >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("|xi|^2 = {xi2} must be finite and nonnegative")))
    }
}

/// Characteristic roots at `|ξ|² = xi2`.
///
/// `λ+` has nonnegative imaginary part when the roots are complex and is the
/// root closer to zero when they are real. The real pair is formed as
/// `q = -(b + √disc)/2`, `c/q` to avoid cancellation at high frequency.
pub fn roots(xi2: f64, params: &ModelParams) -> Result<RootPair> {
    check_xi2(xi2)?;
    let b = params.damping(xi2);
    let c = params.stiffness(xi2);
    let discriminant = b * b - 4.0 * c;
    if xi2 == 0.0 {
        let zero = Complex64::new(0.0, 0.0);
        return Ok(RootPair {
            lambda_plus: zero,
            lambda_minus: zero,
            discriminant,
            degenerate: true,
        });
    }
    let (lambda_plus, lambda_minus) = if discriminant >= 0.0 {
        let q = -0.5 * (b + discriminant.sqrt());
        (Complex64::new(c / q, 0.0), Complex64::new(q, 0.0))
    } else {
        let im = 0.5 * (-discriminant).sqrt();
        (Complex64::new(-0.5 * b, im), Complex64::new(-0.5 * b, -im))
    };
    let degenerate =
        (lambda_plus - lambda_minus).norm() < DEGENERATE_ROOT_TOL * lambda_plus.norm().max(1.0);
    Ok(RootPair {
        lambda_plus,
        lambda_minus,
        discriminant,
        degenerate,
    })
}

/// `φ₁(z) = (e^z − 1)/z`, with a series near the origin.
pub fn phi1(z: Complex64) -> Complex64 {
    if z.norm() < 1.0 {
        let mut term = Complex64::new(1.0, 0.0);
        let mut sum = term;
        for j in 2..40 {
            term *= z / j as f64;
            sum += term;
            if term.norm() < 1e-17 * sum.norm() {
                break;
            }
        }
        sum
    } else {
        (z.exp() - 1.0) / z
    }
}

/// `Ĝ, Ĥ` and their time derivatives at one `(|ξ|², t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagatorSymbols {
    pub g: Complex64,
    pub h: Complex64,
    pub gt: Complex64,
    pub ht: Complex64,
}

/// Evaluates the propagator symbols from precomputed roots.
pub fn propagator_from_roots(rp: &RootPair, c: f64, t: f64) -> PropagatorSymbols {
    let (g, h, gt) = if rp.degenerate {
        let lambda = 0.5 * (rp.lambda_plus + rp.lambda_minus);
        let e = (lambda * t).exp();
        (t * e, (1.0 - lambda * t) * e, (1.0 + lambda * t) * e)
    } else {
        // Factor out the slower exponential so nothing overflows:
        // Ĝ = t e^{λ+ t} φ₁(−z), z = (λ+ − λ−) t.
        let lp = rp.lambda_plus;
        let lm = rp.lambda_minus;
        let z = (lp - lm) * t;
        let e = (lp * t).exp();
        let em = (-z).exp();
        let p = phi1(-z);
        (t * e * p, e * (em - lm * t * p), e * (lp * t * p + em))
    };
    PropagatorSymbols { g, h, gt, ht: -c * g }
}

/// Propagator symbols at `|ξ|² = xi2`, time `t ≥ 0`.
pub fn propagator(xi2: f64, t: f64, params: &ModelParams) -> Result<PropagatorSymbols> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidArgument(format!("time {t} must be finite and nonnegative")));
    }
    let rp = roots(xi2, params)?;
    Ok(propagator_from_roots(&rp, params.stiffness(xi2), t))
}

/// Low-frequency profile symbols
/// `Ĝ₀ = e^{α|ξ|²t/2} sin(|ξ|t)/|ξ|`, `Ĥ₀ = e^{α|ξ|²t/2} cos(|ξ|t)`.
pub fn profile_symbols(xi2: f64, t: f64, params: &ModelParams) -> Result<(Complex64, Complex64)> {
    check_xi2(xi2)?;
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidArgument(format!("time {t} must be finite and nonnegative")));
    }
    let r = xi2.sqrt();
    let envelope = (0.5 * params.alpha * xi2 * t).exp();
    let sinc = if r == 0.0 { t } else { (r * t).sin() / r };
    Ok((
        Complex64::new(envelope * sinc, 0.0),
        Complex64::new(envelope * (r * t).cos(), 0.0),
    ))
}

/// Decay envelope `ω = |ξ|²/(1 + |ξ|²)`.
pub fn omega(xi2: f64) -> f64 {
    xi2 / (1.0 + xi2)
}

/// Per-mode energy `E`, dissipation `F` and reference energy `E₀`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyTerms {
    pub e: f64,
    pub f: f64,
    pub e0: f64,
}

/// Quadratic forms satisfying `dE/dt + F = 0` along solutions.
pub fn energy_functionals(
    xi2: f64,
    u_hat: Complex64,
    ut_hat: Complex64,
    params: &ModelParams,
) -> EnergyTerms {
    let b = params.damping(xi2);
    let c = params.stiffness(xi2);
    let u2 = u_hat.norm_sqr();
    let v2 = ut_hat.norm_sqr();
    let cross = (ut_hat * u_hat.conj()).re;
    let e = (1.0 + xi2) * v2 + ((1.0 + xi2) * c + xi2 * b) * u2 + 2.0 * xi2 * cross;
    let f = (2.0 * (1.0 + xi2) * b - 2.0 * xi2) * v2 + 2.0 * xi2 * c * u2;
    let e0 = v2 + xi2 * (1.0 + xi2) * u2;
    EnergyTerms { e, f, e0 }
}

/// Real per-mode coefficients of one exponential step of length `dt`.
///
/// `int_g = ∫₀^dt Ĝ(s) ds` weights a source frozen over the step and
/// `int_g_ramp = (1/dt) ∫₀^dt Ĝ(s)(dt − s) ds` weights the part of the source
/// growing linearly across it. The `û_t` component uses `Ĝ(dt)` and
/// `int_g/dt` respectively.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepWeights {
    pub g: f64,
    pub h: f64,
    pub gt: f64,
    pub ht: f64,
    pub int_g: f64,
    pub int_g_ramp: f64,
}

/// Exponential-integrator weights for `|ξ|² = xi2` and step `dt`.
///
/// When `b·dt` and `√c·dt` are at most one the integrals are summed from the
/// Taylor series of `Ĝ` generated by the oscillator recurrence; otherwise
/// they follow from `∫Ĝ = (1 − Ĥ)/c` and `∫Ĥ = Ĝ + b∫Ĝ`.
pub fn step_weights(xi2: f64, dt: f64, params: &ModelParams) -> Result<StepWeights> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidArgument(format!("step {dt} must be positive")));
    }
    let sym = propagator(xi2, dt, params)?;
    let b = params.damping(xi2);
    let c = params.stiffness(xi2);
    let (int_g, int_g_ramp) = if b * dt <= 1.0 && c.sqrt() * dt <= 1.0 {
        let bh = b * dt;
        let ch2 = c * dt * dt;
        // a_j = Ĝ^{(j)}(0) dt^j / j!
        let mut prev = 0.0;
        let mut cur = dt;
        let mut i0 = cur * dt / 2.0;
        let mut i1 = cur * dt / 6.0;
        for j in 0..60usize {
            let jf = j as f64;
            let next = -bh * cur / (jf + 2.0) - ch2 * prev / ((jf + 2.0) * (jf + 1.0));
            prev = cur;
            cur = next;
            let k = jf + 2.0;
            i0 += cur * dt / (k + 1.0);
            i1 += cur * dt / ((k + 1.0) * (k + 2.0));
            if cur.abs() < 1e-18 * dt && prev.abs() < 1e-18 * dt {
                break;
            }
        }
        (i0, i1)
    } else {
        let i0 = (1.0 - sym.h.re) / c;
        let i1 = (dt - sym.g.re - b * i0) / (c * dt);
        (i0, i1)
    };
    Ok(StepWeights {
        g: sym.g.re,
        h: sym.h.re,
        gt: sym.gt.re,
        ht: sym.ht.re,
        int_g,
        int_g_ramp,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn p(alpha: f64) -> ModelParams {
        ModelParams::new(alpha, 1.0).unwrap()
    }

    #[test]
    fn params_enforce_standing_assumption() {
        assert!(ModelParams::new(-0.5, 1.0).is_err());
        assert!(ModelParams::new(-1.0, 0.0).is_err());
        assert!(ModelParams::new(f64::NAN, 1.0).is_err());
        assert_eq!(p(-3.0).gamma(), 1.0);
    }

    #[test]
    fn roots_at_origin_are_a_double_zero() {
        let r = roots(0.0, &p(-1.0)).unwrap();
        assert_eq!(r.lambda_plus, Complex64::new(0.0, 0.0));
        assert_eq!(r.lambda_minus, Complex64::new(0.0, 0.0));
        assert!(r.degenerate);
    }

    #[test]
    fn roots_at_unit_frequency() {
        let r = roots(1.0, &p(-1.0)).unwrap();
        assert_relative_eq!(r.lambda_plus.re, -1.0, epsilon = 1e-15);
        assert_relative_eq!(r.lambda_plus.im, 1.0, epsilon = 1e-15);
        assert_relative_eq!(r.lambda_minus.im, -1.0, epsilon = 1e-15);
        assert_eq!(r.discriminant, -4.0);
        assert!(!r.degenerate);
    }

    #[test]
    fn negative_frequency_square_is_rejected() {
        assert!(roots(-1.0, &p(-1.0)).is_err());
        assert!(propagator(1.0, -1.0, &p(-1.0)).is_err());
    }

    #[test]
    fn initial_values_are_exact() {
        for xi2 in [0.0, 1e-6, 0.3, 1.5615528128088303, 4.0, 1e4] {
            let s = propagator(xi2, 0.0, &p(-1.0)).unwrap();
            assert_eq!(s.g, Complex64::new(0.0, 0.0));
            assert_eq!(s.h, Complex64::new(1.0, 0.0));
            assert_eq!(s.gt, Complex64::new(1.0, 0.0));
            assert_eq!(s.ht.norm(), 0.0);
        }
    }

    #[test]
    fn unit_frequency_closed_forms() {
        let s = propagator(1.0, 1.0, &p(-1.0)).unwrap();
        let e = (-1.0f64).exp();
        assert_relative_eq!(s.g.re, e * 1f64.sin(), max_relative = 1e-14);
        assert_relative_eq!(s.h.re, e * (1f64.cos() + 1f64.sin()), max_relative = 1e-14);
        assert!((s.g.re - 0.309_559).abs() < 1e-6);
        assert!((s.h.re - 0.508_326).abs() < 1e-6);
    }

    #[test]
    fn zero_frequency_is_free_motion() {
        let s = propagator(0.0, 5.0, &p(-1.0)).unwrap();
        assert_eq!(s.g.re, 5.0);
        assert_eq!(s.h.re, 1.0);
    }

    #[test]
    fn h_equals_gt_plus_damped_g() {
        let params = p(-2.5);
        for &(xi2, t) in &[(0.01, 3.0), (0.7, 0.4), (2.0, 10.0), (50.0, 0.01), (1.0, 7.0)] {
            let s = propagator(xi2, t, &params).unwrap();
            let rhs = s.gt + params.damping(xi2) * s.g;
            assert_relative_eq!(s.h.re, rhs.re, max_relative = 1e-9, epsilon = 1e-300);
        }
    }

    #[test]
    fn branches_agree_near_the_confluent_locus() {
        // For alpha = -1 the discriminant vanishes at |ξ|² = (√17 − 1)/2.
        let params = p(-1.0);
        let x0 = (17f64.sqrt() - 1.0) / 2.0;
        let c = params.stiffness(x0);
        let exact = roots(x0, &params).unwrap();
        for offset in [1e-15, 1e-14, 1e-13, 1e-12] {
            let rp = roots(x0 + offset, &params).unwrap();
            let mut forced = rp;
            forced.degenerate = !rp.degenerate;
            for t in [0.1, 1.0, 5.0] {
                let a = propagator_from_roots(&rp, c, t);
                let b = propagator_from_roots(&forced, c, t);
                let scale = (rp.lambda_plus.re * t).exp() * (1.0 + t);
                assert!((a.g - b.g).norm() / scale < 1e-8, "offset {offset} t {t}");
                assert!((a.h - b.h).norm() / scale < 1e-8, "offset {offset} t {t}");
            }
        }
        assert!(exact.discriminant.abs() < 1e-12);
    }

    #[test]
    fn no_overflow_at_high_frequency() {
        let s = propagator(1e4, 1e3, &p(-1.0)).unwrap();
        for z in [s.g, s.h, s.gt, s.ht] {
            assert!(z.re.is_finite() && z.im.is_finite());
        }
    }

    #[test]
    fn profile_symbol_examples() {
        let (g0, h0) = profile_symbols(0.0, 7.0, &p(-1.0)).unwrap();
        assert_eq!((g0.re, h0.re), (7.0, 1.0));
        let (g0, h0) = profile_symbols(1.0, std::f64::consts::PI, &p(-2.0)).unwrap();
        let e = (-std::f64::consts::PI).exp();
        assert!(g0.re.abs() < 1e-15);
        assert_relative_eq!(h0.re, -e, max_relative = 1e-14);
    }

    #[test]
    fn omega_examples() {
        assert_eq!(omega(0.0), 0.0);
        assert_eq!(omega(1.0), 0.5);
        assert!(omega(1e6) < 1.0 && omega(1e6) > omega(1e5));
    }

    #[test]
    fn energy_examples() {
        let params = p(-1.0);
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let e = energy_functionals(1.0, one, zero, &params);
        assert_eq!((e.e, e.f, e.e0), (6.0, 4.0, 2.0));
        let z = energy_functionals(3.0, zero, zero, &params);
        assert_eq!((z.e, z.f, z.e0), (0.0, 0.0, 0.0));
    }

    #[test]
    fn step_weights_match_quadrature() {
        let params = p(-1.5);
        for &xi2 in &[0.0, 1e-5, 0.2, 1.3, 5.0, 80.0] {
            for &dt in &[0.01, 0.1, 0.5] {
                let w = step_weights(xi2, dt, &params).unwrap();
                let g = |s: f64| propagator(xi2, s, &params).unwrap().g.re;
                let breaks: Vec<f64> = (0..=40).map(|j| dt * j as f64 / 40.0).collect();
                let i0 = crate::quadrature::integrate(g, &breaks, 1e-13).unwrap();
                let i1 = crate::quadrature::integrate(|s| g(s) * (dt - s), &breaks, 1e-13)
                    .unwrap()
                    / dt;
                assert_relative_eq!(w.int_g, i0, max_relative = 1e-9, epsilon = 1e-16);
                assert_relative_eq!(w.int_g_ramp, i1, max_relative = 1e-9, epsilon = 1e-16);
            }
        }
    }
}
