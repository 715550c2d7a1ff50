//! Globally adaptive Gauss–Kronrod (7/15) quadrature.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// Gauss weights on the odd-indexed Kronrod nodes.
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

const MAX_PANELS: usize = 60_000;

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> Result<Panel> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    let mut finite = fc.is_finite();
    for i in 0..7 {
        let dx = half * XGK[i];
        let pair = f(center - dx) + f(center + dx);
        finite &= pair.is_finite();
        kron += WGK[i] * pair;
        if i % 2 == 1 {
            gauss += WG[i / 2] * pair;
        }
    }
    if !finite {
        return Err(Error::Quadrature(format!(
            "integrand is not finite on [{a:e}, {b:e}]"
        )));
    }
    Ok(Panel {
        a,
        b,
        value: kron * half,
        error: ((kron - gauss) * half).abs(),
    })
}

/// Integrates `f` over consecutive panels delimited by `breakpoints`, bisecting
/// the worst panel until the summed error estimate falls below `rel_tol · |I|`.
pub fn integrate(f: impl Fn(f64) -> f64, breakpoints: &[f64], rel_tol: f64) -> Result<f64> {
    if breakpoints.len() < 2 {
        return Err(Error::Quadrature("need at least two breakpoints".into()));
    }
    let mut heap = BinaryHeap::with_capacity(breakpoints.len() * 4);
    for w in breakpoints.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::Quadrature("breakpoints must increase".into()));
        }
        heap.push(kronrod(&f, w[0], w[1])?);
    }
    loop {
        let total: f64 = heap.iter().map(|p| p.value).sum();
        let error: f64 = heap.iter().map(|p| p.error).sum();
        if error <= rel_tol * total.abs() || error == 0.0 {
            return Ok(total);
        }
        if heap.len() >= MAX_PANELS {
            if error <= 1e-6 * total.abs() {
                return Ok(total);
            }
            return Err(Error::Quadrature(format!(
                "error estimate {error:e} against value {total:e} after {MAX_PANELS} panels"
            )));
        }
        // Bisect a batch of the worst panels before re-summing.
        let batch = (heap.len() / 8).max(1);
        for _ in 0..batch {
            let worst = match heap.pop() {
                Some(p) => p,
                None => break,
            };
            let mid = 0.5 * (worst.a + worst.b);
            if mid <= worst.a || mid >= worst.b {
                // Panel can no longer be split in floating point; freeze it.
                heap.push(Panel { error: 0.0, ..worst });
                continue;
            }
            heap.push(kronrod(&f, worst.a, mid)?);
            heap.push(kronrod(&f, mid, worst.b)?);
        }
    }
}

/// `∫_0^cutoff f(r) dr` for integrands that may carry an integrable power-law
/// singularity at the origin.
///
/// The stretch `[0, 1e-8·cutoff]` is integrated in the variable `u = ln r`
/// (truncated at `e^{-120}` below its right end); the rest is split into
/// `panels` geometrically growing panels, each refined adaptively.
pub fn integrate_half_line_segment(
    f: impl Fn(f64) -> f64,
    cutoff: f64,
    panels: usize,
) -> Result<f64> {
    const REL_TOL: f64 = 1e-12;
    let inner = cutoff * 1e-8;
    let u_hi = inner.ln();
    let u_lo = u_hi - 120.0;
    let log_breaks: Vec<f64> = (0..=12).map(|i| u_lo + (u_hi - u_lo) * i as f64 / 12.0).collect();
    let near = integrate(
        |u: f64| {
            let r = u.exp();
            f(r) * r
        },
        &log_breaks,
        REL_TOL,
    )?;
    let ratio = (cutoff / inner).powf(1.0 / panels as f64);
    let mut breaks: Vec<f64> = (0..=panels).map(|i| inner * ratio.powi(i as i32)).collect();
    breaks[0] = inner;
    breaks[panels] = cutoff;
    let far = integrate(f, &breaks, REL_TOL)?;
    Ok(near + far)
}
