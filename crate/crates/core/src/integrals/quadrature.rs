//! Globally adaptive 7/15-point Gauss-Kronrod quadrature.
//!
//! Every node is interior to its subinterval, so integrable logarithmic
//! singularities placed on breakpoints are never sampled.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::Serialize;

use crate::error::{Result, WaterbedError};

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

// Gauss weights for the odd-indexed Kronrod nodes; the last is the centre.
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    /// Angles where the integrand may be singular; the interval is split
    /// there before any refinement.
    pub singular_angles: Vec<f64>,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-8,
            max_subdivisions: 1 << 14,
            singular_angles: Vec::new(),
        }
    }
}

impl QuadratureConfig {
    pub fn with_tol(abs_tol: f64) -> Self {
        Self {
            abs_tol,
            ..Self::default()
        }
    }

    pub fn with_singular_angles(mut self, angles: impl IntoIterator<Item = f64>) -> Self {
        self.singular_angles.extend(angles);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.abs_tol.is_nan() || self.abs_tol <= 0.0 {
            return Err(WaterbedError::InvalidConfig(format!(
                "abs_tol must be positive, got {}",
                self.abs_tol
            )));
        }
        if self.max_subdivisions == 0 {
            return Err(WaterbedError::InvalidConfig(
                "max_subdivisions must be at least 1".into(),
            ));
        }
        if let Some(a) = self
            .singular_angles
            .iter()
            .find(|a| !a.is_finite() || **a < 0.0 || **a >= std::f64::consts::TAU)
        {
            return Err(WaterbedError::InvalidConfig(format!(
                "singular angle {a} outside [0, 2pi)"
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IntegralResult {
    pub value: f64,
    pub error_estimate: f64,
    pub subdivisions_used: usize,
}

#[derive(Clone, Copy, Debug)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    // Largest error first; ties go to the leftmost segment.
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

fn gauss_kronrod<F>(f: &F, a: f64, b: f64) -> Result<Segment>
where
    F: Fn(f64) -> Result<f64>,
{
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre)?;
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (j, (&x, &w)) in XGK.iter().zip(&WGK).take(7).enumerate() {
        let dx = half * x;
        let pair = f(centre - dx)? + f(centre + dx)?;
        kronrod += w * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    let value = kronrod * half;
    let error = ((kronrod - gauss) * half).abs();
    Ok(Segment { a, b, value, error })
}

fn checked<F>(f: &F) -> impl Fn(f64) -> Result<f64> + '_
where
    F: Fn(f64) -> Result<f64>,
{
    move |x| {
        let v = f(x)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(WaterbedError::EvaluationFailure {
                omega: x,
                reason: format!("integrand is {v}"),
            })
        }
    }
}

/// Fixed-order pairwise sum so results do not depend on heap order.
fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        n => pairwise_sum(&values[..n / 2]) + pairwise_sum(&values[n / 2..]),
    }
}

/// Integrates `f` over `[a, b]`, pre-splitting at every breakpoint strictly
/// inside the interval. Fails with `NonConvergent` (carrying the partial
/// result) when the summed error estimate is still above `abs_tol` after
/// `max_subdivisions` segments.
pub fn integrate<F>(f: F, a: f64, b: f64, breakpoints: &[f64], cfg: &QuadratureConfig) -> Result<IntegralResult>
where
    F: Fn(f64) -> Result<f64>,
{
    if cfg.abs_tol.is_nan() || cfg.abs_tol <= 0.0 || cfg.max_subdivisions == 0 {
        cfg.validate()?;
    }
    let g = checked(&f);
    let mut cuts: Vec<f64> = breakpoints.iter().copied().filter(|&x| x > a && x < b).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|x, y| (*x - *y).abs() <= 1e-14 * (b - a));

    let mut edges = Vec::with_capacity(cuts.len() + 2);
    edges.push(a);
    edges.extend(cuts);
    edges.push(b);

    let mut heap = BinaryHeap::new();
    let mut total_error = 0.0;
    for w in edges.windows(2) {
        let seg = gauss_kronrod(&g, w[0], w[1])?;
        total_error += seg.error;
        heap.push(seg);
    }

    let min_width = 4.0 * f64::EPSILON * (b - a).abs().max(1.0);
    let mut stalled = false;
    while total_error > cfg.abs_tol && heap.len() < cfg.max_subdivisions {
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if worst.b - worst.a <= min_width {
            heap.push(worst);
            stalled = true;
            break;
        }
        let left = gauss_kronrod(&g, worst.a, mid)?;
        let right = gauss_kronrod(&g, mid, worst.b)?;
        total_error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }

    let mut segments = heap.into_vec();
    segments.sort_by(|x, y| x.a.total_cmp(&y.a));
    let values: Vec<f64> = segments.iter().map(|s| s.value).collect();
    let errors: Vec<f64> = segments.iter().map(|s| s.error).collect();
    let result = IntegralResult {
        value: pairwise_sum(&values),
        error_estimate: pairwise_sum(&errors),
        subdivisions_used: segments.len(),
    };
    if result.error_estimate > cfg.abs_tol || stalled {
        return Err(WaterbedError::NonConvergent { partial: result });
    }
    Ok(result)
}
