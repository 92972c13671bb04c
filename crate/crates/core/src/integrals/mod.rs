//! Log-modulus integrals over the unit circle and their closed-form
//! predictions.

mod quadrature;
mod report;

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::error::{Result, WaterbedError};
use crate::lti::RationalSystem;
use crate::polynomial::{Polynomial, RootSet};

pub use quadrature::{integrate, IntegralResult, QuadratureConfig};
pub use report::{
    waterbed_verify, waterbed_verify_with, Discrepancies, IntegralOutcome, InterpolationForm, InterpolationResult,
    LoopSystem, StabilityVerdict, VerifyOptions, WaterbedReport,
};

/// Roots within this distance of the unit circle get a breakpoint at their
/// angle, even when they are not on it.
pub const NEAR_CIRCLE_BAND: f64 = 0.05;

/// `|beta0 - alpha_i|` below this triggers a conditioning warning.
pub const WEIGHTED_CONDITIONING_TOL: f64 = 1e-3;

/// `|S(beta0) - 1|` above this rejects `beta0` as a zero of the loop.
pub const BAD_ZERO_TOL: f64 = 1e-6;

/// Anything whose log-modulus can be evaluated at `e^{j omega}`.
pub trait UnitCircleFn {
    fn log_modulus_at(&self, omega: f64) -> Result<f64>;
}

impl<F> UnitCircleFn for F
where
    F: Fn(Complex64) -> Complex64,
{
    fn log_modulus_at(&self, omega: f64) -> Result<f64> {
        Ok(self(Complex64::from_polar(1.0, omega)).norm().ln())
    }
}

impl UnitCircleFn for Polynomial {
    fn log_modulus_at(&self, omega: f64) -> Result<f64> {
        Ok(self.eval(Complex64::from_polar(1.0, omega)).norm().ln())
    }
}

impl UnitCircleFn for RationalSystem {
    fn log_modulus_at(&self, omega: f64) -> Result<f64> {
        Ok(self.log_modulus(omega))
    }
}

/// Adapter for functions that can fail; their errors reach the caller
/// unchanged.
pub struct Fallible<F>(pub F);

impl<F> UnitCircleFn for Fallible<F>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    fn log_modulus_at(&self, omega: f64) -> Result<f64> {
        Ok((self.0)(Complex64::from_polar(1.0, omega))?.norm().ln())
    }
}

/// Angle of `z` in `[0, 2 pi)`.
pub fn angle_in_period(z: Complex64) -> f64 {
    let a = z.arg();
    let a = if a < 0.0 { a + TAU } else { a };
    if a >= TAU {
        0.0
    } else {
        a
    }
}

/// Angles of the roots lying within `band` of the unit circle.
pub fn near_circle_angles(roots: &[Complex64], band: f64) -> Vec<f64> {
    let mut out: Vec<f64> = roots
        .iter()
        .filter(|r| (r.norm() - 1.0).abs() <= band)
        .map(|&r| angle_in_period(r))
        .collect();
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
}

/// Breakpoints for `ln |sys|`: angles of its near-circle zeros and poles.
pub fn rational_singular_angles(sys: &RationalSystem) -> Vec<f64> {
    let mut roots = sys.zeros();
    roots.extend(sys.poles());
    near_circle_angles(&roots, NEAR_CIRCLE_BAND)
}

/// `int_0^{2 pi} ln |f(e^{j omega})| d omega`, split at `cfg.singular_angles`.
pub fn log_modulus_integral<F: UnitCircleFn + ?Sized>(f: &F, cfg: &QuadratureConfig) -> Result<IntegralResult> {
    cfg.validate()?;
    integrate(|w| f.log_modulus_at(w), 0.0, TAU, &cfg.singular_angles, cfg)
}

/// Like [`log_modulus_integral`], adding breakpoints at the system's own
/// near-circle zeros and poles.
pub fn rational_log_integral(sys: &RationalSystem, cfg: &QuadratureConfig) -> Result<IntegralResult> {
    let cfg = cfg.clone().with_singular_angles(rational_singular_angles(sys));
    log_modulus_integral(sys, &cfg)
}

/// Closed form of `int_0^{2 pi} ln(1 - 2a cos x + a^2) dx`.
pub fn identity_integral(a: f64) -> f64 {
    let a2 = a * a;
    if a2 <= 1.0 {
        0.0
    } else {
        TAU * a2.ln()
    }
}

/// Quadrature of the same integrand, written as `ln |(e^{jx} - a)^2|`.
pub fn identity_quadrature(a: f64, cfg: &QuadratureConfig) -> Result<IntegralResult> {
    let cfg = cfg.clone().with_singular_angles([0.0, PI]);
    log_modulus_integral(
        &move |z: Complex64| {
            let d = z - a;
            d * d
        },
        &cfg,
    )
}

fn require_outside(roots: &RootSet) -> Result<()> {
    match roots.roots.iter().find(|r| r.norm() <= 1.0) {
        Some(r) => Err(WaterbedError::NotOutside { re: r.re, im: r.im }),
        None => Ok(()),
    }
}

// `Iterator::sum` of no floats is -0.0.
fn log_sum(roots: &[Complex64]) -> f64 {
    roots.iter().fold(0.0, |acc, r| acc + r.norm().ln())
}

/// `2 pi sum ln |p_i|` over unstable open-loop poles.
pub fn predict_sensitivity_integral(unstable_poles: &RootSet) -> Result<f64> {
    require_outside(unstable_poles)?;
    Ok(TAU * log_sum(&unstable_poles.roots))
}

/// `2 pi (sum ln |z_i| + ln |K|)` over NMP zeros.
pub fn predict_complementary_integral(nmp_zeros: &RootSet, k: Complex64) -> Result<f64> {
    if k.norm() == 0.0 {
        return Err(WaterbedError::ZeroGain);
    }
    require_outside(nmp_zeros)?;
    Ok(TAU * (log_sum(&nmp_zeros.roots) + k.norm().ln()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeightedIntegralSpec {
    beta0: Complex64,
    alphas: Vec<Complex64>,
}

impl WeightedIntegralSpec {
    /// `alphas` lists every unstable pole, complex ones together with their
    /// conjugates.
    pub fn new(beta0: Complex64, alphas: Vec<Complex64>) -> Result<Self> {
        if beta0.norm() <= 1.0 {
            return Err(WaterbedError::NotOutside {
                re: beta0.re,
                im: beta0.im,
            });
        }
        require_outside(&RootSet::monic(alphas.clone()))?;
        Ok(Self { beta0, alphas })
    }

    pub fn beta0(&self) -> Complex64 {
        self.beta0
    }

    pub fn alphas(&self) -> &[Complex64] {
        &self.alphas
    }

    /// `W(r0, phi)` for `beta0 = r0 e^{j phi0}`.
    pub fn weight(&self, phi: f64) -> f64 {
        let r0 = self.beta0.norm();
        let phi0 = self.beta0.arg();
        (r0 * r0 - 1.0) / (r0 * r0 - 2.0 * r0 * (phi - phi0).cos() + 1.0)
    }

    /// One message per unstable pole closer than
    /// [`WEIGHTED_CONDITIONING_TOL`] to `beta0`.
    pub fn conditioning_warnings(&self) -> Vec<String> {
        self.alphas
            .iter()
            .filter(|a| (self.beta0 - **a).norm() < WEIGHTED_CONDITIONING_TOL)
            .map(|a| {
                format!(
                    "beta0 = {} is within {:.1e} of unstable pole {}; the analytic value is ill-conditioned",
                    self.beta0,
                    (self.beta0 - a).norm(),
                    a
                )
            })
            .collect()
    }

    /// `2 pi sum ln |(1 - conj(alpha_i) beta0) / (beta0 - alpha_i)|`.
    pub fn analytic(&self) -> f64 {
        let one = Complex64::new(1.0, 0.0);
        TAU * self.alphas.iter().fold(0.0, |acc, a| {
            acc + ((one - a.conj() * self.beta0) / (self.beta0 - a)).norm().ln()
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeightedIntegral {
    pub numeric: IntegralResult,
    pub analytic: f64,
    pub warnings: Vec<String>,
}

/// `int_{-pi}^{pi} ln |S(e^{j phi})| W(r0, phi) d phi` next to its
/// closed-form value.
pub fn weighted_sensitivity_integral(
    s: &RationalSystem,
    spec: &WeightedIntegralSpec,
    cfg: &QuadratureConfig,
) -> Result<WeightedIntegral> {
    cfg.validate()?;
    if let Some(p) = s.poles().into_iter().find(|p| p.norm() >= 1.0) {
        return Err(WaterbedError::UnstableClosedLoop {
            re: p.re,
            im: p.im,
            modulus: p.norm(),
        });
    }
    let residual = (s.eval(spec.beta0) - 1.0).norm();
    if residual.is_nan() || residual > BAD_ZERO_TOL {
        return Err(WaterbedError::BadZero { residual });
    }

    let warnings = spec.conditioning_warnings();

    let mut breaks: Vec<f64> = cfg
        .singular_angles
        .iter()
        .chain(rational_singular_angles(s).iter())
        .map(|&a| if a > PI { a - TAU } else { a })
        .collect();
    breaks.push(spec.beta0.arg());
    let numeric = integrate(|phi| Ok(s.log_modulus(phi) * spec.weight(phi)), -PI, PI, &breaks, cfg)?;
    Ok(WeightedIntegral {
        numeric,
        analytic: spec.analytic(),
        warnings,
    })
}
