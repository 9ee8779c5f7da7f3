//! Adaptive Gauss–Kronrod (7/15) quadrature.

use crate::error::{CoreError, Result};

// 15-point Kronrod nodes on [0, 1] (symmetric), with the embedded 7-point
// Gauss weights for the odd-indexed nodes.
#[allow(clippy::excessive_precision)]
const XK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
#[allow(clippy::excessive_precision)]
const WK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

const MAX_DEPTH: u32 = 40;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = half * XK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Integrates `f` over `[a, b]` by recursive bisection until each panel's
/// Kronrod–Gauss difference is within its share of
/// `max(rel_tol·|I|, abs_tol)`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64, abs_tol: f64) -> Result<QuadResult> {
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
        });
    }
    let (whole, err) = gk15(&f, a, b);
    let mut evaluations = 15;
    let (value, error) = refine(&f, a, b, whole, err, rel_tol, abs_tol, whole.abs(), 0, &mut evaluations)?;
    Ok(QuadResult {
        value,
        error,
        evaluations,
    })
}

#[allow(clippy::too_many_arguments)]
fn refine<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    estimate: f64,
    err: f64,
    rel_tol: f64,
    abs_tol: f64,
    scale: f64,
    depth: u32,
    evaluations: &mut usize,
) -> Result<(f64, f64)> {
    let tol = (rel_tol * scale).max(abs_tol);
    if err <= tol || err <= 50.0 * f64::EPSILON * estimate.abs() {
        return Ok((estimate, err));
    }
    if depth >= MAX_DEPTH {
        return Err(CoreError::QuadratureFailed { a, b, error: err });
    }
    let mid = 0.5 * (a + b);
    let (left, el) = gk15(f, a, mid);
    let (right, er) = gk15(f, mid, b);
    *evaluations += 30;
    let scale = scale.max((left + right).abs());
    // each half gets half the tolerance budget
    let (lv, le) = refine(
        f,
        a,
        mid,
        left,
        el,
        0.5 * rel_tol,
        0.5 * abs_tol,
        scale,
        depth + 1,
        evaluations,
    )?;
    let (rv, re) = refine(
        f,
        mid,
        b,
        right,
        er,
        0.5 * rel_tol,
        0.5 * abs_tol,
        scale,
        depth + 1,
        evaluations,
    )?;
    Ok((lv + rv, le + re))
}
