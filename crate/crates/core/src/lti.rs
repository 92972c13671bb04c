//! SISO discrete-time systems: rational and state-space forms, the
//! sensitivity pair S = 1/(1+L) and T = L/(1+L), unit-circle root
//! classification, Markov gains and interpolation checks.

use std::f64::consts::TAU;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Result, WaterbedError};
use crate::polynomial::{cancel_common_roots, circle_nodes, interpolate_on_circle, Polynomial, RootSet};

/// Default half-width of the band around |z| = 1 treated as "on the circle".
pub const UNIT_CIRCLE_TOL: f64 = 1e-9;

/// Tolerance for cancelling common numerator/denominator roots.
pub const CANCEL_TOL: f64 = 1e-6;

/// Pass threshold for the interpolation conditions.
pub const INTERPOLATION_TOL: f64 = 1e-8;

const CROSSOVER_SWEEP_POINTS: usize = 4096;
const CROSSOVER_BISECTION_TOL: f64 = 1e-6;

/// A proper ratio `num(z) / den(z)`, kept in cancelled form.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalSystem {
    num: Polynomial,
    den: Polynomial,
}

impl RationalSystem {
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self> {
        Self::with_cancel_tol(num, den, CANCEL_TOL)
    }

    pub fn with_cancel_tol(num: Polynomial, den: Polynomial, tol: f64) -> Result<Self> {
        let den_degree = den.degree().ok_or(WaterbedError::ZeroDenominator)?;
        if let Some(num_degree) = num.degree() {
            if num_degree > den_degree {
                return Err(WaterbedError::Improper {
                    num: num_degree,
                    den: den_degree,
                });
            }
        }
        if num.is_zero() {
            return Ok(Self {
                num,
                den: Polynomial::one(),
            });
        }
        let (num, den) = if num.degree_or_zero() >= 1 && den_degree >= 1 {
            cancel_common_roots(&num, &den, tol)
        } else {
            (num, den)
        };
        Ok(Self { num, den })
    }

    pub fn from_coeffs(num: &[f64], den: &[f64]) -> Result<Self> {
        Self::new(Polynomial::from_real(num), Polynomial::from_real(den))
    }

    /// `gain * prod(z - zeros) / prod(z - poles)`.
    pub fn from_zpk(zeros: &[Complex64], poles: &[Complex64], gain: Complex64) -> Result<Self> {
        if gain == Complex64::default() {
            return Self::new(
                Polynomial::zero(),
                Polynomial::from_roots(&RootSet::monic(poles.to_vec())),
            );
        }
        Self::new(
            Polynomial::from_roots(&RootSet::new(zeros.to_vec(), gain)),
            Polynomial::from_roots(&RootSet::monic(poles.to_vec())),
        )
    }

    pub fn constant(c: Complex64) -> Self {
        Self {
            num: Polynomial::constant(c),
            den: Polynomial::one(),
        }
    }

    pub fn num(&self) -> &Polynomial {
        &self.num
    }

    pub fn den(&self) -> &Polynomial {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_strictly_proper(&self) -> bool {
        self.num.is_zero() || self.num.degree() < self.den.degree()
    }

    pub fn is_real(&self) -> bool {
        self.num.is_real(0.0) && self.den.is_real(0.0)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.num.eval(z) / self.den.eval(z)
    }

    /// Response at `z = e^{j omega}`.
    pub fn freq_response(&self, omega: f64) -> Result<Complex64> {
        let z = Complex64::from_polar(1.0, omega);
        let d = self.den.eval(z);
        if d.norm() < 1e-300 {
            return Err(WaterbedError::PoleOnCircle { omega });
        }
        Ok(self.num.eval(z) / d)
    }

    /// `ln |H(e^{j omega})|`, computed as a difference of logs so large or
    /// tiny magnitudes do not overflow the ratio.
    pub fn log_modulus(&self, omega: f64) -> f64 {
        let z = Complex64::from_polar(1.0, omega);
        self.num.eval(z).norm().ln() - self.den.eval(z).norm().ln()
    }

    pub fn zeros(&self) -> Vec<Complex64> {
        self.num.roots().map(|r| r.roots).unwrap_or_default()
    }

    pub fn poles(&self) -> Vec<Complex64> {
        self.den.roots().map(|r| r.roots).unwrap_or_default()
    }

    /// Factored-form gain `K` in `K prod(z - z_i) / prod(z - p_i)`.
    pub fn gain(&self) -> Complex64 {
        self.num.leading() / self.den.leading()
    }

    pub fn scale(&self, c: Complex64) -> Result<Self> {
        Self::new(self.num.scale(c), self.den.clone())
    }

    /// Controllable canonical realization of a strictly proper real system.
    pub fn to_state_space(&self) -> Result<StateSpaceSystem> {
        if !self.is_strictly_proper() {
            return Err(WaterbedError::Validation(
                "state-space realization needs a strictly proper system (no feedthrough)".into(),
            ));
        }
        if !self.is_real() {
            return Err(WaterbedError::Validation(
                "state-space realization needs real coefficients".into(),
            ));
        }
        let n = self.den.degree_or_zero();
        if n == 0 {
            return Err(WaterbedError::Validation("system has no state".into()));
        }
        let lead = self.den.leading().re;
        let a_coeffs: Vec<f64> = self.den.coeffs().iter().map(|c| c.re / lead).collect();
        let b_coeffs: Vec<f64> = (0..n)
            .map(|k| self.num.coeffs().get(k).map_or(0.0, |c| c.re / lead))
            .collect();

        let mut a = DMatrix::zeros(n, n);
        for i in 0..n - 1 {
            a[(i, i + 1)] = 1.0;
        }
        for j in 0..n {
            a[(n - 1, j)] = -a_coeffs[j];
        }
        let mut b = DMatrix::zeros(n, 1);
        b[(n - 1, 0)] = 1.0;
        let c = DMatrix::from_row_slice(1, n, &b_coeffs);
        StateSpaceSystem::new(a, b, c)
    }
}

/// `x_{k+1} = A x_k + B u_k`, `y_k = C x_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct StateSpaceSystem {
    a: DMatrix<f64>,
    b: DMatrix<f64>,
    c: DMatrix<f64>,
}

impl StateSpaceSystem {
    pub fn new(a: DMatrix<f64>, b: DMatrix<f64>, c: DMatrix<f64>) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(WaterbedError::DimensionMismatch(format!(
                "A must be square, got {}x{}",
                a.nrows(),
                a.ncols()
            )));
        }
        if b.nrows() != n {
            return Err(WaterbedError::DimensionMismatch(format!(
                "B has {} rows, expected {n}",
                b.nrows()
            )));
        }
        if c.ncols() != n {
            return Err(WaterbedError::DimensionMismatch(format!(
                "C has {} columns, expected {n}",
                c.ncols()
            )));
        }
        if a.iter().chain(b.iter()).chain(c.iter()).any(|x| !x.is_finite()) {
            return Err(WaterbedError::Validation("state-space matrices must be finite".into()));
        }
        Ok(Self { a, b, c })
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn b(&self) -> &DMatrix<f64> {
        &self.b
    }

    pub fn c(&self) -> &DMatrix<f64> {
        &self.c
    }

    pub fn states(&self) -> usize {
        self.a.nrows()
    }

    pub fn inputs(&self) -> usize {
        self.b.ncols()
    }

    pub fn outputs(&self) -> usize {
        self.c.nrows()
    }

    /// `C A^{i-1} B` for `i = 1..=n`.
    pub fn markov_parameters(&self) -> Vec<DMatrix<f64>> {
        let mut out = Vec::with_capacity(self.states());
        let mut ab = self.b.clone();
        for _ in 0..self.states() {
            out.push(&self.c * &ab);
            ab = &self.a * ab;
        }
        out
    }

    fn markov_scale(&self, i: usize) -> f64 {
        let a = self.a.norm().max(1.0);
        self.c.norm() * a.powi(i as i32) * self.b.norm()
    }

    /// First nonzero Markov parameter of a single-input single-output system.
    pub fn markov_gain(&self) -> Result<f64> {
        if self.inputs() != 1 || self.outputs() != 1 {
            return Err(WaterbedError::DimensionMismatch(format!(
                "scalar Markov gain needs a 1x1 system, got {}x{}",
                self.outputs(),
                self.inputs()
            )));
        }
        self.markov_parameters()
            .into_iter()
            .enumerate()
            .find(|(i, m)| m[(0, 0)].abs() > 1e-12 * self.markov_scale(*i))
            .map(|(_, m)| m[(0, 0)])
            .ok_or(WaterbedError::AllMarkovZero(self.states()))
    }

    /// `(i, det(C A^{i-1} B))` for the smallest `i` with a nonsingular
    /// square Markov parameter.
    pub fn first_nonsingular_markov(&self) -> Result<(usize, f64)> {
        let q = self.outputs();
        if self.inputs() != q {
            return Err(WaterbedError::NonSquare {
                rows: q,
                cols: self.inputs(),
            });
        }
        for (i, m) in self.markov_parameters().into_iter().enumerate() {
            let det = m.determinant();
            if det.abs() > 1e-12 * self.markov_scale(i).powi(q as i32) {
                return Ok((i + 1, det));
            }
        }
        Err(WaterbedError::AllMarkovZero(self.states()))
    }

    /// Entry-wise transfer functions `C (zI - A)^{-1} B`, each cancelled.
    pub fn transfer_entries(&self) -> Result<Vec<Vec<RationalSystem>>> {
        let n = self.states();
        let char_poly = characteristic_polynomial(&self.a);
        let (p, m) = (self.outputs(), self.inputs());
        if n == 0 {
            return Ok(vec![vec![RationalSystem::constant(Complex64::default()); m]; p]);
        }
        let radius = node_radius(&self.a);
        let nodes = circle_nodes(n + 1, radius);
        let ac = self.a.map(|x| Complex64::new(x, 0.0));
        let bc = self.b.map(|x| Complex64::new(x, 0.0));
        let cc = self.c.map(|x| Complex64::new(x, 0.0));

        let mut samples = vec![vec![Vec::with_capacity(n + 1); m]; p];
        for &z in &nodes {
            let resolvent = DMatrix::<Complex64>::identity(n, n) * z - &ac;
            let lu = resolvent.lu();
            let x = lu
                .solve(&bc)
                .ok_or_else(|| WaterbedError::Validation("zI - A singular at sample point".into()))?;
            let g = &cc * x;
            let scale = char_poly.eval(z);
            for i in 0..p {
                for j in 0..m {
                    samples[i][j].push(g[(i, j)] * scale);
                }
            }
        }
        samples
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|vals| {
                        let num = interpolate_on_circle(&vals, radius).clean_imag(1e-9);
                        RationalSystem::new(num, char_poly.clone())
                    })
                    .collect()
            })
            .collect()
    }
}

/// Interpolation radius strictly outside the spectrum of `a` but no larger
/// than needed, since coefficient error grows like `eps * radius^n`.
fn node_radius(a: &DMatrix<f64>) -> f64 {
    let row_sum = a
        .row_iter()
        .map(|r| r.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let col_sum = a
        .column_iter()
        .map(|c| c.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    1.1 * row_sum.min(col_sum).max(1.0)
}

/// `det(zI - A)` by evaluation and interpolation.
pub fn characteristic_polynomial(a: &DMatrix<f64>) -> Polynomial {
    let n = a.nrows();
    let radius = node_radius(a);
    let ac = a.map(|x| Complex64::new(x, 0.0));
    let values: Vec<Complex64> = circle_nodes(n + 1, radius)
        .into_iter()
        .map(|z| (DMatrix::<Complex64>::identity(n, n) * z - &ac).determinant())
        .collect();
    interpolate_on_circle(&values, radius).clean_imag(1e-9)
}

/// Leading gain `K` entering the complementary-sensitivity integral.
pub trait MarkovGain {
    fn markov_gain(&self) -> Result<Complex64>;
}

impl MarkovGain for RationalSystem {
    fn markov_gain(&self) -> Result<Complex64> {
        if self.is_zero() {
            return Err(WaterbedError::AllMarkovZero(self.den.degree_or_zero()));
        }
        Ok(self.gain())
    }
}

impl MarkovGain for StateSpaceSystem {
    fn markov_gain(&self) -> Result<Complex64> {
        StateSpaceSystem::markov_gain(self).map(|k| Complex64::new(k, 0.0))
    }
}

/// `S = D / (D + N)` for `L = N / D`.
pub fn sensitivity(l: &RationalSystem) -> Result<RationalSystem> {
    let closed = l.den() + l.num();
    if closed.is_zero() {
        return Err(WaterbedError::DegenerateLoop);
    }
    RationalSystem::new(l.den().clone(), closed)
}

/// `T = N / (D + N)` for `L = N / D`.
pub fn complementary(l: &RationalSystem) -> Result<RationalSystem> {
    let closed = l.den() + l.num();
    if closed.is_zero() {
        return Err(WaterbedError::DegenerateLoop);
    }
    RationalSystem::new(l.num().clone(), closed)
}

/// Roots of `D + N`.
pub fn closed_loop_poles(l: &RationalSystem) -> Result<Vec<Complex64>> {
    Ok(sensitivity(l)?.poles())
}

#[derive(Clone, Debug, PartialEq)]
pub struct PoleZeroClassification {
    pub inside: RootSet,
    pub boundary: RootSet,
    pub outside: RootSet,
    pub epsilon: f64,
}

pub fn classify_roots(rs: &RootSet, epsilon: f64) -> PoleZeroClassification {
    let mut inside = Vec::new();
    let mut boundary = Vec::new();
    let mut outside = Vec::new();
    for &r in &rs.roots {
        let m = r.norm();
        if (m - 1.0).abs() <= epsilon {
            boundary.push(r);
        } else if m < 1.0 {
            inside.push(r);
        } else {
            outside.push(r);
        }
    }
    PoleZeroClassification {
        inside: RootSet::monic(inside),
        boundary: RootSet::monic(boundary),
        outside: RootSet::monic(outside),
        epsilon,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InterpolationPoint {
    UnstablePole,
    NonMinimumPhaseZero,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InterpolationRecord {
    pub point: InterpolationPoint,
    pub location: Complex64,
    pub s_value: Complex64,
    pub t_value: Complex64,
    pub passed: bool,
}

impl InterpolationRecord {
    /// The largest of the two residuals the condition requires to vanish:
    /// `|S|, |1 - T|` at unstable poles, `|T|, |1 - S|` at NMP zeros.
    pub fn residual(&self) -> f64 {
        let one = Complex64::new(1.0, 0.0);
        match self.point {
            InterpolationPoint::UnstablePole => self.s_value.norm().max((one - self.t_value).norm()),
            InterpolationPoint::NonMinimumPhaseZero => self.t_value.norm().max((one - self.s_value).norm()),
        }
    }
}

fn require_stable_closed_loop(poles: &[Complex64], epsilon: f64) -> Result<()> {
    if let Some(p) = poles.iter().find(|p| p.norm() >= 1.0 - epsilon) {
        return Err(WaterbedError::UnstableClosedLoop {
            re: p.re,
            im: p.im,
            modulus: p.norm(),
        });
    }
    Ok(())
}

/// Evaluates S and T at every open-loop pole and zero outside the unit
/// circle. Poles must give `S = 0, T = 1`; zeros give `S = 1, T = 0`.
pub fn interpolation_check(l: &RationalSystem, epsilon: f64) -> Result<Vec<InterpolationRecord>> {
    let s = sensitivity(l)?;
    let t = complementary(l)?;
    require_stable_closed_loop(&s.poles(), epsilon)?;

    let poles = classify_roots(&RootSet::monic(l.poles()), epsilon).outside;
    let zeros = classify_roots(&RootSet::monic(l.zeros()), epsilon).outside;
    let points = poles
        .roots
        .into_iter()
        .map(|p| (InterpolationPoint::UnstablePole, p))
        .chain(
            zeros
                .roots
                .into_iter()
                .map(|z| (InterpolationPoint::NonMinimumPhaseZero, z)),
        );

    Ok(points
        .map(|(point, location)| {
            let mut rec = InterpolationRecord {
                point,
                location,
                s_value: s.eval(location),
                t_value: t.eval(location),
                passed: false,
            };
            rec.passed = rec.residual() < INTERPOLATION_TOL;
            rec
        })
        .collect())
}

/// Smallest `omega` in `[0, 2 pi)` where `g(omega) - level` changes sign,
/// located by a uniform sweep and refined by bisection.
pub fn first_level_crossing(g: impl Fn(f64) -> f64, level: f64) -> Option<f64> {
    let h = TAU / CROSSOVER_SWEEP_POINTS as f64;
    let mut prev = (0.0, g(0.0) - level);
    for k in 1..=CROSSOVER_SWEEP_POINTS {
        let omega = k as f64 * h;
        let value = g(omega) - level;
        if prev.1.is_finite() && value.is_finite() && prev.1 != 0.0 && prev.1.signum() != value.signum() {
            let (mut lo, mut hi) = (prev.0, omega);
            let lo_sign = prev.1.signum();
            while hi - lo > CROSSOVER_BISECTION_TOL {
                let mid = 0.5 * (lo + hi);
                let v = g(mid) - level;
                if v.signum() == lo_sign && v != 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return Some(0.5 * (lo + hi));
        }
        prev = (omega, value);
    }
    None
}

/// First frequency where `|sys(e^{j omega})|` crosses 1.
pub fn unity_crossover(sys: &RationalSystem) -> Option<f64> {
    first_level_crossing(|w| sys.log_modulus(w), 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn assert_roots_match(got: &[Complex64], want: &[Complex64], tol: f64) {
        assert_eq!(got.len(), want.len(), "{got:?} vs {want:?}");
        let mut used = vec![false; got.len()];
        for w in want {
            let (idx, d) = got
                .iter()
                .enumerate()
                .filter(|(i, _)| !used[*i])
                .map(|(i, g)| (i, (g - w).norm()))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap();
            assert!(d < tol, "root {w} missing in {got:?}");
            used[idx] = true;
        }
    }

    #[test]
    fn rejects_improper_and_zero_denominator() {
        assert!(matches!(
            RationalSystem::from_coeffs(&[0.0, 0.0, 1.0], &[1.0, 1.0]),
            Err(WaterbedError::Improper { num: 2, den: 1 })
        ));
        assert!(matches!(
            RationalSystem::from_coeffs(&[1.0], &[0.0]),
            Err(WaterbedError::ZeroDenominator)
        ));
    }

    #[test]
    fn construction_cancels_common_roots() {
        let l =
            RationalSystem::from_zpk(&[c(0.7, 0.0), c(1.1, 0.0)], &[c(0.7, 0.0), c(0.5, 0.0)], c(2.0, 0.0)).unwrap();
        assert_eq!(l.num().degree(), Some(1));
        assert_eq!(l.den().degree(), Some(1));
    }

    #[test]
    fn process_control_sensitivity() {
        let l = fixtures::process_control();
        let s = sensitivity(&l).unwrap();
        assert_roots_match(
            &s.poles(),
            &[c(-0.4101, 0.0), c(0.6424, 0.1092), c(0.6424, -0.1092)],
            1e-3,
        );
        assert_roots_match(&s.zeros(), &[c(-0.5, 0.0), c(0.8187, 0.0), c(0.8187, 0.0)], 1e-6);
    }

    #[test]
    fn open_loop_sensitivity_is_one() {
        let l = RationalSystem::constant(Complex64::default());
        let s = sensitivity(&l).unwrap();
        assert_eq!(s.eval(c(0.3, 0.2)), c(1.0, 0.0));
    }

    #[test]
    fn magnetic_levitation_closed_loop_poles() {
        let l = fixtures::magnetic_levitation();
        assert_roots_match(
            &closed_loop_poles(&l).unwrap(),
            &[c(-0.3993, 0.0), c(0.8192, 0.2310), c(0.8192, -0.2310)],
            1e-3,
        );
    }

    #[test]
    fn process_control_complementary() {
        let l = fixtures::process_control();
        let t = complementary(&l).unwrap();
        assert!((t.gain() - c(0.2628, 0.0)).norm() < 1e-12);
        assert_roots_match(&t.zeros(), &[c(0.7, 0.0), c(-0.8752, 0.0)], 1e-9);
        assert_roots_match(
            &t.poles(),
            &[c(-0.4101, 0.0), c(0.6424, 0.1092), c(0.6424, -0.1092)],
            1e-3,
        );
    }

    #[test]
    fn constant_loop_complementary_is_half() {
        let t = complementary(&RationalSystem::constant(c(1.0, 0.0))).unwrap();
        assert!((t.eval(c(0.1, 0.0)) - c(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn degenerate_loop() {
        let l = RationalSystem::constant(c(-1.0, 0.0));
        assert!(matches!(sensitivity(&l), Err(WaterbedError::DegenerateLoop)));
        assert!(matches!(complementary(&l), Err(WaterbedError::DegenerateLoop)));
    }

    #[test]
    fn classify_examples() {
        let cl = classify_roots(&RootSet::from_real(&[0.5, 2.0], 1.0), 1e-9);
        assert_eq!(cl.inside.roots, vec![c(0.5, 0.0)]);
        assert_eq!(cl.outside.roots, vec![c(2.0, 0.0)]);
        assert!(cl.boundary.is_empty());

        let poles = fixtures::magnetic_levitation().poles();
        let cl = classify_roots(&RootSet::monic(poles), 1e-9);
        assert_eq!(cl.outside.len(), 1);
        assert!((cl.outside.roots[0] - c(1.2214, 0.0)).norm() < 1e-9);

        let cl = classify_roots(&RootSet::from_real(&[-1.0], 1.0), 1e-9);
        assert_eq!(cl.boundary.roots, vec![c(-1.0, 0.0)]);
    }

    #[test]
    fn markov_gain_examples() {
        let t1 = complementary(&fixtures::process_control()).unwrap();
        assert!((t1.markov_gain().unwrap() - c(0.2628, 0.0)).norm() < 1e-12);
        let t2 = complementary(&fixtures::magnetic_levitation()).unwrap();
        assert!((t2.markov_gain().unwrap() - c(0.301, 0.0)).norm() < 1e-12);

        let ss = StateSpaceSystem::new(
            DMatrix::from_element(1, 1, 0.0),
            DMatrix::from_element(1, 1, 1.0),
            DMatrix::from_element(1, 1, 5.0),
        )
        .unwrap();
        assert_eq!(StateSpaceSystem::markov_gain(&ss).unwrap(), 5.0);
    }

    #[test]
    fn markov_gain_skips_zero_parameters() {
        // 1 / z^2: CB = 0, CAB = 1.
        let sys = RationalSystem::from_coeffs(&[1.0], &[0.0, 0.0, 1.0]).unwrap();
        let ss = sys.to_state_space().unwrap();
        let params = ss.markov_parameters();
        assert_eq!(params[0][(0, 0)], 0.0);
        assert_eq!(StateSpaceSystem::markov_gain(&ss).unwrap(), 1.0);

        let zero = StateSpaceSystem::new(DMatrix::zeros(2, 2), DMatrix::zeros(2, 1), DMatrix::zeros(1, 2)).unwrap();
        assert!(matches!(
            StateSpaceSystem::markov_gain(&zero),
            Err(WaterbedError::AllMarkovZero(2))
        ));
    }

    #[test]
    fn state_space_dimension_checks() {
        let err = StateSpaceSystem::new(DMatrix::zeros(2, 2), DMatrix::zeros(3, 1), DMatrix::zeros(1, 2));
        assert!(matches!(err, Err(WaterbedError::DimensionMismatch(_))));
        let err = StateSpaceSystem::new(
            DMatrix::from_element(1, 1, f64::NAN),
            DMatrix::zeros(1, 1),
            DMatrix::zeros(1, 1),
        );
        assert!(matches!(err, Err(WaterbedError::Validation(_))));
    }

    #[test]
    fn state_space_transfer_round_trip() {
        let l = fixtures::process_control();
        let ss = l.to_state_space().unwrap();
        let back = ss.transfer_entries().unwrap();
        for k in 0..16 {
            let z = Complex64::from_polar(1.0, 0.37 * k as f64 + 0.1);
            assert!((back[0][0].eval(z) - l.eval(z)).norm() < 1e-10);
        }
    }

    #[test]
    fn characteristic_polynomial_matches_companion() {
        let den = Polynomial::from_real(&[-0.43, 1.74, -2.3, 1.0]);
        let sys = RationalSystem::new(Polynomial::from_real(&[1.0]), den.clone()).unwrap();
        let cp = characteristic_polynomial(sys.to_state_space().unwrap().a());
        for (a, b) in cp.coeffs().iter().zip(den.coeffs()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn interpolation_at_unstable_pole() {
        let recs = interpolation_check(&fixtures::magnetic_levitation(), UNIT_CIRCLE_TOL).unwrap();
        assert_eq!(recs.len(), 1);
        let r = &recs[0];
        assert_eq!(r.point, InterpolationPoint::UnstablePole);
        assert!((r.location - c(1.2214, 0.0)).norm() < 1e-9);
        assert!(r.s_value.norm() < 1e-8);
        assert!((r.t_value.norm() - 1.0).abs() < 1e-8);
        assert!(r.passed);
    }

    #[test]
    fn interpolation_empty_for_stable_minimum_phase() {
        let recs = interpolation_check(&fixtures::process_control(), UNIT_CIRCLE_TOL).unwrap();
        assert!(recs.is_empty());
    }

    #[test]
    fn interpolation_injected_pole() {
        // L = k (z - 0.2) / ((z - 1.5)(z - 0.3)); closed-loop poles are the
        // roots of z^2 + (k - 1.8) z + (0.45 - 0.2 k). k = 1.2 places them
        // at 0.3 +/- 0.3464j, checked here by direct evaluation.
        let l = RationalSystem::from_zpk(&[c(0.2, 0.0)], &[c(1.5, 0.0), c(0.3, 0.0)], c(1.2, 0.0)).unwrap();
        let cl = closed_loop_poles(&l).unwrap();
        let direct = Polynomial::from_real(&[0.45 - 0.24, 1.2 - 1.8, 1.0]);
        for p in &cl {
            assert!(direct.eval(*p).norm() < 1e-12);
            assert!(p.norm() < 1.0);
        }
        let recs = interpolation_check(&l, UNIT_CIRCLE_TOL).unwrap();
        assert_eq!(recs.len(), 1);
        assert!(recs[0].s_value.norm() < 1e-8);
        assert!(sensitivity(&l).unwrap().eval(c(1.5, 0.0)).norm() < 1e-8);
    }

    #[test]
    fn interpolation_rejects_unstable_closed_loop() {
        let l = RationalSystem::from_zpk(&[], &[c(2.0, 0.0)], c(0.1, 0.0)).unwrap();
        assert!(matches!(
            interpolation_check(&l, UNIT_CIRCLE_TOL),
            Err(WaterbedError::UnstableClosedLoop { .. })
        ));
    }

    #[test]
    fn freq_response_constant_and_pole_on_circle() {
        let one = RationalSystem::constant(c(1.0, 0.0));
        assert_eq!(one.freq_response(1.234).unwrap(), c(1.0, 0.0));
        let integrator = RationalSystem::from_coeffs(&[1.0], &[-1.0, 1.0]).unwrap();
        assert!(matches!(
            integrator.freq_response(0.0),
            Err(WaterbedError::PoleOnCircle { .. })
        ));
    }

    #[test]
    fn crossover_is_a_sign_change_of_log_sensitivity() {
        for l in [fixtures::process_control(), fixtures::magnetic_levitation()] {
            let s = sensitivity(&l).unwrap();
            let w = unity_crossover(&s).unwrap();
            assert!(s.log_modulus(w - 1e-5).signum() != s.log_modulus(w + 1e-5).signum());
            // no earlier crossing on the sweep grid
            let h = TAU / 4096.0;
            let first = s.log_modulus(h).signum();
            let mut omega = h;
            while omega < w - h {
                assert_eq!(s.log_modulus(omega).signum(), first);
                omega += h;
            }
        }
    }

    #[test]
    fn level_crossing_none_when_level_not_reached() {
        assert_eq!(first_level_crossing(|w| w.cos(), 2.0), None);
        let w = first_level_crossing(|w| w.cos(), 0.0).unwrap();
        assert!((w - std::f64::consts::FRAC_PI_2).abs() < 1e-6);
    }

    fn stable_loop() -> impl Strategy<Value = RationalSystem> {
        (
            prop::collection::vec(-0.9f64..0.9, 1..=4),
            prop::collection::vec(-2.0f64..2.0, 0..=3),
            0.01f64..0.5,
        )
            .prop_filter_map("nondegenerate", |(poles, zeros, gain)| {
                let zeros: Vec<_> = zeros.into_iter().take(poles.len()).map(|z| c(z, 0.0)).collect();
                let poles: Vec<_> = poles.into_iter().map(|p| c(p, 0.0)).collect();
                let l = RationalSystem::from_zpk(&zeros, &poles, c(gain, 0.0)).ok()?;
                sensitivity(&l).ok()?;
                // A closed-loop pole inside the cancellation tolerance of an
                // open-loop root is cancelled from S but not from T.
                let cl = (l.num() + l.den()).roots().ok()?;
                let near = |r: &Complex64| cl.roots.iter().any(|p| (p - r).norm() <= 10.0 * CANCEL_TOL);
                (!l.poles().iter().any(near) && !l.zeros().iter().any(near)).then_some(l)
            })
    }

    proptest! {
        #[test]
        fn sensitivity_plus_complementary_is_one(l in stable_loop()) {
            let s = sensitivity(&l).unwrap();
            let t = complementary(&l).unwrap();
            for k in 0..256 {
                let w = TAU * k as f64 / 256.0;
                let sum = s.freq_response(w).unwrap() + t.freq_response(w).unwrap();
                prop_assert!((sum - c(1.0, 0.0)).norm() < 1e-10);
            }
            // num(S) den(T) + num(T) den(S) = den(S) den(T)
            let lhs = &(s.num() * t.den()) + &(t.num() * s.den());
            let rhs = s.den() * t.den();
            let diff = &lhs - &rhs;
            let scale = rhs.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max);
            prop_assert!(diff.coeffs().iter().all(|c| c.norm() < 1e-9 * scale.max(1.0)));
        }

        #[test]
        fn sensitivity_and_complementary_share_denominator(l in stable_loop()) {
            let s = sensitivity(&l).unwrap();
            let t = complementary(&l).unwrap();
            prop_assert_eq!(s.den().degree(), t.den().degree());
            for (a, b) in s.den().monic().coeffs().iter().zip(t.den().monic().coeffs()) {
                prop_assert!((a - b).norm() < 1e-9);
            }
        }

        #[test]
        fn markov_gain_agrees_between_forms(l in stable_loop()) {
            prop_assume!(l.is_strictly_proper());
            let rational = l.markov_gain().unwrap();
            let ss = l.to_state_space().unwrap();
            let k = StateSpaceSystem::markov_gain(&ss).unwrap();
            prop_assert!((rational - c(k, 0.0)).norm() < 1e-9);
        }

        #[test]
        fn classification_is_a_partition(
            roots in prop::collection::vec((0.0f64..2.0, 0.0f64..TAU), 0..12),
            eps in 0.0f64..0.1,
        ) {
            let rs = RootSet::monic(roots.iter().map(|&(r, t)| Complex64::from_polar(r, t)).collect());
            let cl = classify_roots(&rs, eps);
            prop_assert_eq!(cl.inside.len() + cl.boundary.len() + cl.outside.len(), rs.len());
        }
    }
}
