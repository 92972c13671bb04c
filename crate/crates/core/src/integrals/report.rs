use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use super::{
    predict_complementary_integral, predict_sensitivity_integral, rational_log_integral, IntegralResult,
    QuadratureConfig,
};
use crate::error::{Result, WaterbedError};
use crate::lti::{
    classify_roots, complementary, sensitivity, InterpolationPoint, MarkovGain, RationalSystem, StateSpaceSystem,
    INTERPOLATION_TOL, UNIT_CIRCLE_TOL,
};
use crate::mimo::{self, MarkovCrossCheck, RightMfd};
use crate::polynomial::{Polynomial, RootSet};

/// A loop gain in either of the two supported forms.
#[derive(Clone, Debug)]
pub enum LoopSystem {
    Siso(RationalSystem),
    Mimo(RightMfd),
}

impl From<RationalSystem> for LoopSystem {
    fn from(l: RationalSystem) -> Self {
        Self::Siso(l)
    }
}

impl From<RightMfd> for LoopSystem {
    fn from(m: RightMfd) -> Self {
        Self::Mimo(m)
    }
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    /// Roots within this distance of the unit circle are boundary roots.
    pub epsilon: f64,
    /// Realization used to cross-check the leading gain.
    pub realization: Option<StateSpaceSystem>,
    pub label: Option<String>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            epsilon: UNIT_CIRCLE_TOL,
            realization: None,
            label: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum StabilityVerdict {
    #[serde(rename = "OLS")]
    Ols,
    #[serde(rename = "OLU")]
    Olu,
    ClosedLoopUnstable,
}

impl fmt::Display for StabilityVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Ols => "OLS",
            Self::Olu => "OLU",
            Self::ClosedLoopUnstable => "ClosedLoopUnstable",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum IntegralOutcome {
    Converged(IntegralResult),
    NonConvergent { partial: IntegralResult },
    Failed { message: String },
    Skipped { reason: String },
}

impl IntegralOutcome {
    fn from_result(r: Result<IntegralResult>) -> Self {
        match r {
            Ok(v) => Self::Converged(v),
            Err(WaterbedError::NonConvergent { partial }) => Self::NonConvergent { partial },
            Err(e) => Self::Failed { message: e.to_string() },
        }
    }

    /// Value of a converged integral.
    pub fn value(&self) -> Option<f64> {
        match self {
            Self::Converged(r) => Some(r.value),
            _ => None,
        }
    }

    pub fn result(&self) -> Option<&IntegralResult> {
        match self {
            Self::Converged(r) | Self::NonConvergent { partial: r } => Some(r),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Discrepancies {
    pub s: Option<f64>,
    pub t: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InterpolationForm {
    /// `S(p) = 0, T(p) = 1` and `S(z) = 1, T(z) = 0`.
    Scalar,
    /// `det S(p) = 0` and `det T(z) = 0`.
    Determinant,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InterpolationResult {
    pub point: InterpolationPoint,
    pub form: InterpolationForm,
    pub location: Complex64,
    pub s_value: Complex64,
    pub t_value: Complex64,
    pub residual: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WaterbedReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub size: usize,
    pub stability_verdict: StabilityVerdict,
    pub open_loop_poles: Vec<Complex64>,
    pub closed_loop_poles: Vec<Complex64>,
    pub unstable_poles: Vec<Complex64>,
    pub zeros: Vec<Complex64>,
    pub nmp_zeros: Vec<Complex64>,
    pub gain: Option<Complex64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub markov_check: Option<MarkovCrossCheck>,
    pub numeric_s_integral: IntegralOutcome,
    pub analytic_s: Option<f64>,
    pub numeric_t_integral: IntegralOutcome,
    pub analytic_t: Option<f64>,
    pub discrepancies: Discrepancies,
    pub interpolation_results: Vec<InterpolationResult>,
    pub boundary_warnings: Vec<String>,
    pub notes: Vec<String>,
}

impl WaterbedReport {
    fn skeleton(size: usize, opts: &VerifyOptions) -> Self {
        Self {
            label: opts.label.clone(),
            size,
            stability_verdict: StabilityVerdict::Ols,
            open_loop_poles: Vec::new(),
            closed_loop_poles: Vec::new(),
            unstable_poles: Vec::new(),
            zeros: Vec::new(),
            nmp_zeros: Vec::new(),
            gain: None,
            markov_check: None,
            numeric_s_integral: skipped("not computed"),
            analytic_s: None,
            numeric_t_integral: skipped("not computed"),
            analytic_t: None,
            discrepancies: Discrepancies::default(),
            interpolation_results: Vec::new(),
            boundary_warnings: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }

    pub fn is_mimo(&self) -> bool {
        self.size > 1
    }

    /// True when the closed loop is stable, both discrepancies exist and are
    /// within `tol`, and every interpolation condition holds.
    pub fn passes(&self, tol: f64) -> bool {
        self.stability_verdict != StabilityVerdict::ClosedLoopUnstable
            && [self.discrepancies.s, self.discrepancies.t]
                .iter()
                .all(|d| matches!(d, Some(v) if *v <= tol))
            && self.interpolation_results.iter().all(|r| r.passed)
    }

    fn finish(&mut self) {
        self.discrepancies = Discrepancies {
            s: discrepancy(&self.numeric_s_integral, self.analytic_s),
            t: discrepancy(&self.numeric_t_integral, self.analytic_t),
        };
    }
}

fn skipped(reason: &str) -> IntegralOutcome {
    IntegralOutcome::Skipped { reason: reason.into() }
}

fn discrepancy(numeric: &IntegralOutcome, analytic: Option<f64>) -> Option<f64> {
    Some((numeric.value()? - analytic?).abs())
}

fn roots_or_empty(p: &Polynomial) -> Result<Vec<Complex64>> {
    match p.roots() {
        Ok(rs) => Ok(rs.roots),
        Err(WaterbedError::DegreeZero) => Ok(Vec::new()),
        Err(e) => Err(e),
    }
}

fn boundary_warnings(kind: &str, roots: &[Complex64], epsilon: f64) -> Vec<String> {
    classify_roots(&RootSet::monic(roots.to_vec()), epsilon)
        .boundary
        .roots
        .iter()
        .map(|r| {
            format!(
                "{kind} at {} lies on the unit circle (|z| = {:.12}); excluded from the analytic sum, integrated across as a log singularity",
                fmt_complex(*r),
                r.norm()
            )
        })
        .collect()
}

fn unstable_closed_loop(report: &mut WaterbedReport, epsilon: f64) -> bool {
    let bad: Vec<_> = report
        .closed_loop_poles
        .iter()
        .filter(|p| p.norm() >= 1.0 - epsilon)
        .collect();
    if bad.is_empty() {
        return false;
    }
    report.stability_verdict = StabilityVerdict::ClosedLoopUnstable;
    let reason = format!(
        "closed loop unstable: pole {} has modulus {:.6}",
        fmt_complex(*bad[0]),
        bad[0].norm()
    );
    report.numeric_s_integral = skipped(&reason);
    report.numeric_t_integral = skipped(&reason);
    true
}

fn outside(roots: &[Complex64], epsilon: f64) -> Vec<Complex64> {
    classify_roots(&RootSet::monic(roots.to_vec()), epsilon).outside.roots
}

fn verdict(unstable: &[Complex64]) -> StabilityVerdict {
    if unstable.is_empty() {
        StabilityVerdict::Ols
    } else {
        StabilityVerdict::Olu
    }
}

fn biproper_note(s_infinity: Complex64) -> Option<String> {
    let shift = std::f64::consts::TAU * s_infinity.norm().ln();
    (shift.abs() > 1e-12).then(|| {
        format!(
            "loop gain is biproper: S(inf) = {}, so the sensitivity integral carries an extra 2 pi ln|S(inf)| = {:.6} not in the analytic prediction",
            fmt_complex(s_infinity),
            shift
        )
    })
}

/// Verifies the log-integral constraints for `system` with default options.
pub fn waterbed_verify(system: &LoopSystem, cfg: &QuadratureConfig) -> Result<WaterbedReport> {
    waterbed_verify_with(system, cfg, &VerifyOptions::default())
}

pub fn waterbed_verify_with(
    system: &LoopSystem,
    cfg: &QuadratureConfig,
    opts: &VerifyOptions,
) -> Result<WaterbedReport> {
    cfg.validate()?;
    match system {
        LoopSystem::Siso(l) => verify_siso(l, cfg, opts),
        LoopSystem::Mimo(m) => verify_mimo(m, cfg, opts),
    }
}

fn verify_siso(l: &RationalSystem, cfg: &QuadratureConfig, opts: &VerifyOptions) -> Result<WaterbedReport> {
    let eps = opts.epsilon;
    let s = sensitivity(l)?;
    let t = complementary(l)?;
    let mut report = WaterbedReport::skeleton(1, opts);
    report.open_loop_poles = l.poles();
    report.zeros = l.zeros();
    report.closed_loop_poles = s.poles();
    report.boundary_warnings = boundary_warnings("open-loop pole", &report.open_loop_poles, eps);
    report
        .boundary_warnings
        .extend(boundary_warnings("zero", &report.zeros, eps));
    report.unstable_poles = outside(&report.open_loop_poles, eps);
    report.nmp_zeros = outside(&report.zeros, eps);
    report.stability_verdict = verdict(&report.unstable_poles);
    if unstable_closed_loop(&mut report, eps) {
        return Ok(report);
    }

    if l.is_zero() {
        report.numeric_s_integral = IntegralOutcome::from_result(rational_log_integral(&s, cfg));
        report.analytic_s = Some(0.0);
        report.numeric_t_integral = skipped("loop gain is identically zero, so T = 0");
        report
            .notes
            .push("loop gain is identically zero; the complementary constraint is undefined".into());
        report.finish();
        return Ok(report);
    }

    let k = t.markov_gain()?;
    report.gain = Some(k);
    if let Some(ss) = &opts.realization {
        match ss.markov_gain() {
            Ok(m) if (m - k.re).abs() > 1e-9 * k.norm().max(1.0) || k.im.abs() > 1e-12 => report.notes.push(format!(
                "realization Markov gain {m} differs from the factored-form gain {}",
                fmt_complex(k)
            )),
            Ok(_) => {}
            Err(e) => report.notes.push(format!("realization Markov gain unavailable: {e}")),
        }
    }
    if !l.is_strictly_proper() {
        report.notes.extend(biproper_note(s.gain()));
    }

    report.numeric_s_integral = IntegralOutcome::from_result(rational_log_integral(&s, cfg));
    report.numeric_t_integral = IntegralOutcome::from_result(rational_log_integral(&t, cfg));
    report.analytic_s = Some(predict_sensitivity_integral(&RootSet::monic(
        report.unstable_poles.clone(),
    ))?);
    report.analytic_t = Some(predict_complementary_integral(
        &RootSet::monic(report.nmp_zeros.clone()),
        k,
    )?);

    let checks = report
        .unstable_poles
        .iter()
        .map(|&p| (InterpolationPoint::UnstablePole, p))
        .chain(
            report
                .nmp_zeros
                .iter()
                .map(|&z| (InterpolationPoint::NonMinimumPhaseZero, z)),
        )
        .map(|(point, location)| {
            let s_value = s.eval(location);
            let t_value = t.eval(location);
            let one = Complex64::new(1.0, 0.0);
            let residual = match point {
                InterpolationPoint::UnstablePole => s_value.norm().max((one - t_value).norm()),
                InterpolationPoint::NonMinimumPhaseZero => t_value.norm().max((one - s_value).norm()),
            };
            InterpolationResult {
                point,
                form: InterpolationForm::Scalar,
                location,
                s_value,
                t_value,
                residual,
                passed: residual < INTERPOLATION_TOL,
            }
        })
        .collect();
    report.interpolation_results = checks;
    report.finish();
    Ok(report)
}

fn complex_det(m: DMatrix<Complex64>) -> Complex64 {
    m.determinant()
}

fn verify_mimo(mfd: &RightMfd, cfg: &QuadratureConfig, opts: &VerifyOptions) -> Result<WaterbedReport> {
    let eps = opts.epsilon;
    let raw = mimo::raw_determinants(mfd)?;
    if raw.closed_loop.is_zero() {
        return Err(WaterbedError::DegenerateClosedLoop);
    }
    let mut report = WaterbedReport::skeleton(mfd.size(), opts);
    report.open_loop_poles = roots_or_empty(&raw.open_loop)?;
    report.closed_loop_poles = roots_or_empty(&raw.closed_loop)?;
    report.boundary_warnings = boundary_warnings("open-loop pole", &report.open_loop_poles, eps);

    let zeros = match mimo::transmission_zeros(mfd) {
        Ok(z) => Some(z.roots),
        Err(WaterbedError::SingularSystem) => {
            report
                .notes
                .push("det N(z) is identically zero; the complementary integral is undefined".into());
            None
        }
        Err(e) => return Err(e),
    };
    if let Some(z) = &zeros {
        report.zeros = z.clone();
        report
            .boundary_warnings
            .extend(boundary_warnings("transmission zero", z, eps));
        report.nmp_zeros = outside(z, eps);
    }

    let det_s = mimo::det_sensitivity(mfd)?;
    report.unstable_poles = outside(&det_s.zeros(), eps);
    let raw_unstable = outside(&report.open_loop_poles, eps);
    report.stability_verdict = verdict(&raw_unstable);
    if raw_unstable.len() != report.unstable_poles.len() {
        report.notes.push(format!(
            "{} unstable open-loop pole(s) cancel against det(D + N) and are hidden from det S",
            raw_unstable.len() - report.unstable_poles.len()
        ));
    }
    if unstable_closed_loop(&mut report, eps) {
        return Ok(report);
    }
    report.notes.extend(biproper_note(det_s.gain()));

    report.numeric_s_integral = IntegralOutcome::from_result(rational_log_integral(&det_s, cfg));
    report.analytic_s = Some(predict_sensitivity_integral(&RootSet::monic(
        report.unstable_poles.clone(),
    ))?);

    if zeros.is_some() {
        let det_t = mimo::det_complementary(mfd)?;
        let gain = mimo::mimo_gain_checked(mfd, opts.realization.as_ref())?;
        report.gain = Some(gain.gain);
        match gain.markov {
            Some(Ok(check)) => {
                if !check.agrees {
                    report.notes.push(format!(
                        "|det(C A^{} B)| = {} disagrees with the determinant gain {}",
                        check.index - 1,
                        check.det.abs(),
                        gain.gain.norm()
                    ));
                }
                report.markov_check = Some(check);
            }
            Some(Err(e)) => report.notes.push(format!("realization Markov gain unavailable: {e}")),
            None => {}
        }
        let det_t_zeros = det_t.zeros();
        if det_t_zeros.len() != report.zeros.len() {
            report.notes.push(format!(
                "det T has {} zeros but {} transmission zeros survive cancellation against det D",
                det_t_zeros.len(),
                report.zeros.len()
            ));
        }
        report.numeric_t_integral = IntegralOutcome::from_result(rational_log_integral(&det_t, cfg));
        report.analytic_t = Some(predict_complementary_integral(
            &RootSet::monic(report.nmp_zeros.clone()),
            gain.gain,
        )?);
    } else {
        report.numeric_t_integral = skipped("det N(z) is identically zero");
    }

    let eval = |z: Complex64| {
        let d = mfd.d.eval(z);
        let n = mfd.n.eval(z);
        let cl = complex_det(&d + &n);
        (complex_det(d) / cl, complex_det(n) / cl)
    };
    let mut checks = Vec::new();
    for &p in &report.unstable_poles {
        let (s_value, t_value) = eval(p);
        checks.push(InterpolationResult {
            point: InterpolationPoint::UnstablePole,
            form: InterpolationForm::Determinant,
            location: p,
            s_value,
            t_value,
            residual: s_value.norm(),
            passed: s_value.norm() < INTERPOLATION_TOL,
        });
    }
    for &z in &report.nmp_zeros {
        let (s_value, t_value) = eval(z);
        checks.push(InterpolationResult {
            point: InterpolationPoint::NonMinimumPhaseZero,
            form: InterpolationForm::Determinant,
            location: z,
            s_value,
            t_value,
            residual: t_value.norm(),
            passed: t_value.norm() < INTERPOLATION_TOL,
        });
    }
    report.interpolation_results = checks;
    report.finish();
    Ok(report)
}

fn fmt_complex(z: Complex64) -> String {
    if z.im.abs() < 5e-7 {
        format!("{:.6}", z.re)
    } else if z.im < 0.0 {
        format!("{:.6}-{:.6}j", z.re, -z.im)
    } else {
        format!("{:.6}+{:.6}j", z.re, z.im)
    }
}

fn fmt_list(v: &[Complex64]) -> String {
    if v.is_empty() {
        return "none".into();
    }
    v.iter().map(|z| fmt_complex(*z)).collect::<Vec<_>>().join(", ")
}

fn fmt_outcome(o: &IntegralOutcome) -> String {
    match o {
        IntegralOutcome::Converged(r) => format!(
            "{:.6} (error estimate {:.1e}, {} subintervals)",
            r.value, r.error_estimate, r.subdivisions_used
        ),
        IntegralOutcome::NonConvergent { partial } => format!(
            "did not converge: partial {:.6}, error estimate {:.1e} after {} subintervals",
            partial.value, partial.error_estimate, partial.subdivisions_used
        ),
        IntegralOutcome::Failed { message } => format!("failed: {message}"),
        IntegralOutcome::Skipped { reason } => format!("skipped: {reason}"),
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".into(), |x| format!("{x:.6}"))
}

impl fmt::Display for WaterbedReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (s_name, t_name) = if self.is_mimo() {
            ("ln|det S|", "ln|det T|")
        } else {
            ("ln|S|", "ln|T|")
        };
        if let Some(label) = &self.label {
            writeln!(f, "system: {label}")?;
        }
        writeln!(f, "size: {}x{}", self.size, self.size)?;
        writeln!(f, "verdict: {}", self.stability_verdict)?;
        writeln!(f, "open-loop poles: {}", fmt_list(&self.open_loop_poles))?;
        writeln!(f, "closed-loop poles: {}", fmt_list(&self.closed_loop_poles))?;
        writeln!(f, "zeros: {}", fmt_list(&self.zeros))?;
        if let Some(k) = self.gain {
            writeln!(f, "gain K: {}", fmt_complex(k))?;
        }
        writeln!(f, "integral of {s_name}: {}", fmt_outcome(&self.numeric_s_integral))?;
        writeln!(f, "  analytic: {}", fmt_opt(self.analytic_s))?;
        writeln!(f, "  discrepancy: {}", fmt_opt(self.discrepancies.s))?;
        writeln!(f, "integral of {t_name}: {}", fmt_outcome(&self.numeric_t_integral))?;
        writeln!(f, "  analytic: {}", fmt_opt(self.analytic_t))?;
        writeln!(f, "  discrepancy: {}", fmt_opt(self.discrepancies.t))?;
        for r in &self.interpolation_results {
            let what = match r.point {
                InterpolationPoint::UnstablePole => "unstable pole",
                InterpolationPoint::NonMinimumPhaseZero => "NMP zero",
            };
            writeln!(
                f,
                "interpolation at {what} {}: residual {:.2e} {}",
                fmt_complex(r.location),
                r.residual,
                if r.passed { "ok" } else { "FAILED" }
            )?;
        }
        for w in &self.boundary_warnings {
            writeln!(f, "warning: {w}")?;
        }
        for n in &self.notes {
            writeln!(f, "note: {n}")?;
        }
        Ok(())
    }
}
