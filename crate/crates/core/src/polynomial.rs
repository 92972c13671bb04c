//! Complex-coefficient univariate polynomials.
//!
//! Coefficients are stored in ascending degree order: `coeffs[k]` multiplies
//! `z^k`. Every constructor trims trailing (highest-degree) coefficients whose
//! magnitude is below `1e-12` times the largest coefficient, so determinant
//! expansions and root re-multiplication do not leave dust at the top.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;

use crate::error::{Result, WaterbedError};

/// Relative threshold for trimming high-degree dust coefficients.
pub const TRIM_RELATIVE: f64 = 1e-12;

/// Tolerance used when pairing conjugate roots of real polynomials.
const CONJ_PAIR_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<Complex64>,
}

/// Roots with multiplicity plus the leading coefficient.
#[derive(Clone, Debug, PartialEq)]
pub struct RootSet {
    pub roots: Vec<Complex64>,
    pub gain: Complex64,
}

impl RootSet {
    pub fn new(roots: Vec<Complex64>, gain: Complex64) -> Self {
        Self { roots, gain }
    }

    pub fn monic(roots: Vec<Complex64>) -> Self {
        Self::new(roots, Complex64::new(1.0, 0.0))
    }

    pub fn from_real(roots: &[f64], gain: f64) -> Self {
        Self::new(
            roots.iter().map(|&r| Complex64::new(r, 0.0)).collect(),
            Complex64::new(gain, 0.0),
        )
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    /// True when every root has a conjugate partner within `tol`.
    pub fn is_conjugate_closed(&self, tol: f64) -> bool {
        let mut used = vec![false; self.roots.len()];
        for i in 0..self.roots.len() {
            if used[i] {
                continue;
            }
            let target = self.roots[i].conj();
            if (self.roots[i] - target).norm() <= tol * self.roots[i].norm().max(1.0) {
                used[i] = true;
                continue;
            }
            let partner = (0..self.roots.len())
                .filter(|&j| j != i && !used[j])
                .find(|&j| (self.roots[j] - target).norm() <= tol * target.norm().max(1.0));
            match partner {
                Some(j) => {
                    used[i] = true;
                    used[j] = true;
                }
                None => return false,
            }
        }
        true
    }
}

impl Polynomial {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        let mut p = Self { coeffs };
        p.trim();
        p
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Complex64::new(1.0, 0.0))
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(vec![c])
    }

    /// The monic linear factor `z - root`.
    pub fn linear(root: Complex64) -> Self {
        Self::new(vec![-root, Complex64::new(1.0, 0.0)])
    }

    fn trim(&mut self) {
        let max = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if max == 0.0 || !max.is_finite() {
            if max == 0.0 {
                self.coeffs.clear();
            }
            return;
        }
        let threshold = TRIM_RELATIVE * max;
        while let Some(last) = self.coeffs.last() {
            if last.norm() <= threshold {
                self.coeffs.pop();
            } else {
                break;
            }
        }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the zero polynomial mapped to 0; useful for bounds.
    pub fn degree_or_zero(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading(&self) -> Complex64 {
        self.coeffs.last().copied().unwrap_or_default()
    }

    pub fn is_real(&self, tol: f64) -> bool {
        let max = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        self.coeffs.iter().all(|c| c.im.abs() <= tol * max)
    }

    /// Drops imaginary parts when they are all below `tol` relative to the
    /// largest coefficient.
    pub fn clean_imag(self, tol: f64) -> Self {
        if self.is_real(tol) {
            Self::new(self.coeffs.iter().map(|c| Complex64::new(c.re, 0.0)).collect())
        } else {
            self
        }
    }

    /// Horner evaluation.
    pub fn eval(&self, x: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::default(), |acc, &c| acc * x + c)
    }

    pub fn eval_real(&self, x: f64) -> Complex64 {
        self.eval(Complex64::new(x, 0.0))
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::one(), |acc, _| &acc * self)
    }

    /// Leading-coefficient normalization. Zero stays zero.
    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        self.scale(self.leading().inv())
    }

    /// All roots with multiplicity, via the eigenvalues of the companion
    /// matrix of the monic normalization, followed by Newton polishing.
    pub fn roots(&self) -> Result<RootSet> {
        let degree = self.degree().ok_or(WaterbedError::ZeroPolynomial)?;
        if degree == 0 {
            return Err(WaterbedError::DegreeZero);
        }
        let gain = self.leading();
        let monic = self.monic();
        let c = monic.coeffs();

        let mut roots = if degree == 1 {
            vec![-c[0]]
        } else {
            companion_eigenvalues(c, degree)?
        };

        let deriv = self.derivative();
        for r in roots.iter_mut() {
            *r = newton_polish(self, &deriv, *r);
        }

        if self.is_real(0.0) {
            symmetrize_conjugates(&mut roots);
        }
        Ok(RootSet { roots, gain })
    }

    /// `gain * prod(z - r)` expanded to coefficient form.
    pub fn from_roots(rs: &RootSet) -> Self {
        let mut coeffs = vec![rs.gain];
        for &r in &rs.roots {
            let mut next = vec![Complex64::default(); coeffs.len() + 1];
            for (k, &c) in coeffs.iter().enumerate() {
                next[k + 1] += c;
                next[k] -= c * r;
            }
            coeffs = next;
        }
        let p = Self::new(coeffs);
        if rs.gain.im == 0.0 && rs.is_conjugate_closed(CONJ_PAIR_TOL) {
            Self::new(p.coeffs.iter().map(|c| Complex64::new(c.re, 0.0)).collect())
        } else {
            p
        }
    }
}

/// The polynomial of degree `< values.len()` taking `values[k]` at
/// `radius * exp(2 pi i k / n)`. The Vandermonde matrix on scaled roots of
/// unity is inverted in closed form (inverse DFT plus radius scaling).
pub fn interpolate_on_circle(values: &[Complex64], radius: f64) -> Polynomial {
    let n = values.len();
    if n == 0 {
        return Polynomial::zero();
    }
    let coeffs = (0..n)
        .map(|k| {
            let sum: Complex64 = values
                .iter()
                .enumerate()
                .map(|(j, &v)| {
                    let angle = -std::f64::consts::TAU * ((j * k) % n) as f64 / n as f64;
                    v * Complex64::from_polar(1.0, angle)
                })
                .sum();
            sum / (n as f64 * radius.powi(k as i32))
        })
        .collect();
    Polynomial::new(coeffs)
}

/// Evaluation nodes matching [`interpolate_on_circle`].
pub fn circle_nodes(n: usize, radius: f64) -> Vec<Complex64> {
    (0..n)
        .map(|j| Complex64::from_polar(radius, std::f64::consts::TAU * j as f64 / n as f64))
        .collect()
}

fn companion_eigenvalues(monic: &[Complex64], degree: usize) -> Result<Vec<Complex64>> {
    // Frobenius companion: ones on the subdiagonal, -c_k in the last column.
    let mut m = DMatrix::<Complex64>::zeros(degree, degree);
    for i in 1..degree {
        m[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for i in 0..degree {
        m[(i, degree - 1)] = -monic[i];
    }
    let schur = Schur::try_new(m, f64::EPSILON, 10_000).ok_or(WaterbedError::EigenFailure(degree))?;
    let (_, t) = schur.unpack();
    Ok((0..degree).map(|i| t[(i, i)]).collect())
}

fn newton_polish(p: &Polynomial, dp: &Polynomial, mut r: Complex64) -> Complex64 {
    let mut residual = p.eval(r).norm();
    for _ in 0..2 {
        let d = dp.eval(r);
        if d.norm() == 0.0 {
            break;
        }
        let candidate = r - p.eval(r) / d;
        let res = p.eval(candidate).norm();
        if candidate.is_finite() && res < residual {
            r = candidate;
            residual = res;
        } else {
            break;
        }
    }
    r
}

/// Forces an exactly conjugate-closed root list for real-coefficient inputs.
fn symmetrize_conjugates(roots: &mut [Complex64]) {
    let n = roots.len();
    let mut done = vec![false; n];
    for i in 0..n {
        if done[i] {
            continue;
        }
        let r = roots[i];
        let scale = r.norm().max(1.0);
        if r.im.abs() <= 1e-12 * scale {
            roots[i] = Complex64::new(r.re, 0.0);
            done[i] = true;
            continue;
        }
        let target = r.conj();
        let partner = (0..n)
            .filter(|&j| j != i && !done[j])
            .min_by(|&a, &b| (roots[a] - target).norm().total_cmp(&(roots[b] - target).norm()));
        match partner {
            Some(j) if (roots[j] - target).norm() <= 1e-6 * scale => {
                let avg = (r + roots[j].conj()) * 0.5;
                roots[i] = avg;
                roots[j] = avg.conj();
                done[i] = true;
                done[j] = true;
            }
            _ => {
                roots[i] = Complex64::new(r.re, 0.0);
                done[i] = true;
            }
        }
    }
}

/// Removes root pairs shared by `num` and `den` within absolute distance
/// `tol`, closest pairs first (ties to the smallest indices). Both
/// polynomials are rebuilt from their surviving roots with their original
/// leading coefficients. Inputs are returned unchanged when nothing matches.
pub fn cancel_common_roots(num: &Polynomial, den: &Polynomial, tol: f64) -> (Polynomial, Polynomial) {
    let (Ok(nr), Ok(dr)) = (num.roots(), den.roots()) else {
        return (num.clone(), den.clone());
    };

    let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
    for (i, a) in nr.roots.iter().enumerate() {
        for (j, b) in dr.roots.iter().enumerate() {
            let d = (a - b).norm();
            if d <= tol {
                pairs.push((d, i, j));
            }
        }
    }
    if pairs.is_empty() {
        return (num.clone(), den.clone());
    }
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));

    let mut num_used = vec![false; nr.roots.len()];
    let mut den_used = vec![false; dr.roots.len()];
    for (_, i, j) in pairs {
        if !num_used[i] && !den_used[j] {
            num_used[i] = true;
            den_used[j] = true;
        }
    }

    let keep = |rs: &RootSet, used: &[bool]| {
        RootSet::new(
            rs.roots
                .iter()
                .zip(used)
                .filter(|(_, &u)| !u)
                .map(|(&r, _)| r)
                .collect(),
            rs.gain,
        )
    };
    let n = Polynomial::from_roots(&keep(&nr, &num_used));
    let d = Polynomial::from_roots(&keep(&dr, &den_used));
    let real = num.is_real(0.0) && den.is_real(0.0);
    if real {
        (n.clean_imag(1e-9), d.clean_imag(1e-9))
    } else {
        (n, d)
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;

    fn add(self, rhs: &Polynomial) -> Polynomial {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..len)
            .map(|k| self.coeffs.get(k).copied().unwrap_or_default() + rhs.coeffs.get(k).copied().unwrap_or_default())
            .collect();
        Polynomial::new(coeffs)
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;

    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self + &(-rhs)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;

    fn neg(self) -> Polynomial {
        Polynomial {
            coeffs: self.coeffs.iter().map(|&c| -c).collect(),
        }
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;

    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut coeffs = vec![Complex64::default(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Polynomial::new(coeffs)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.norm() == 0.0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if c.im == 0.0 {
                write!(f, "{}", c.re)?;
            } else {
                write!(f, "({}{:+}j)", c.re, c.im)?;
            }
            match k {
                0 => {}
                1 => write!(f, "z")?,
                _ => write!(f, "z^{k}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn assert_roots_match(got: &[Complex64], want: &[Complex64], tol: f64) {
        assert_eq!(got.len(), want.len());
        let mut used = vec![false; got.len()];
        for w in want {
            let (idx, d) = got
                .iter()
                .enumerate()
                .filter(|(i, _)| !used[*i])
                .map(|(i, g)| (i, (g - w).norm()))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap();
            assert!(d < tol, "root {w} missing (closest at distance {d}) in {got:?}");
            used[idx] = true;
        }
    }

    #[test]
    fn eval_at_examples() {
        assert_eq!(Polynomial::from_real(&[-1.0, 1.0]).eval_real(1.0), c(0.0, 0.0));
        let cubic = Polynomial::from_real(&[-0.43, 1.74, -2.3, 1.0]);
        assert!(cubic.eval_real(0.5730).norm() < 1e-3);
        let p = Polynomial::from_real(&[1.0, 0.0, 1.0]);
        let i = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_2);
        assert!(p.eval(i).norm() < 1e-15);
    }

    #[test]
    fn canonical_trim_and_degree() {
        let p = Polynomial::from_real(&[1.0, 2.0, 1e-14, 0.0]);
        assert_eq!(p.degree(), Some(1));
        assert_eq!(Polynomial::from_real(&[0.0, 0.0]).degree(), None);
        assert!(Polynomial::zero().is_zero());
    }

    #[test]
    fn roots_quadratic() {
        let rs = Polynomial::from_real(&[1.0, -2.5, 1.0]).roots().unwrap();
        assert_eq!(rs.gain, c(1.0, 0.0));
        assert_roots_match(&rs.roots, &[c(0.5, 0.0), c(2.0, 0.0)], 1e-12);
    }

    #[test]
    fn roots_closed_loop_cubic() {
        let p = Polynomial::from_real(&[-0.43, 1.74, -2.3, 1.0]);
        let rs = p.roots().unwrap();
        assert_roots_match(
            &rs.roots,
            &[c(0.5730, 0.0), c(0.8635, 0.0692), c(0.8635, -0.0692)],
            1e-3,
        );
        for r in &rs.roots {
            assert!(p.eval(*r).norm() < 1e-6);
        }
    }

    #[test]
    fn roots_scaled_factored_form() {
        let p = Polynomial::from_roots(&RootSet::from_real(&[0.7, -0.8752], 0.2628));
        let rs = p.roots().unwrap();
        assert!((rs.gain - c(0.2628, 0.0)).norm() < 1e-15);
        assert_roots_match(&rs.roots, &[c(0.7, 0.0), c(-0.8752, 0.0)], 1e-12);
    }

    #[test]
    fn roots_errors() {
        assert!(matches!(Polynomial::zero().roots(), Err(WaterbedError::ZeroPolynomial)));
        assert!(matches!(
            Polynomial::from_real(&[3.0]).roots(),
            Err(WaterbedError::DegreeZero)
        ));
    }

    #[test]
    fn from_roots_examples() {
        let p = Polynomial::from_roots(&RootSet::from_real(&[], 3.0));
        assert_eq!(p, Polynomial::from_real(&[3.0]));
        let p = Polynomial::from_roots(&RootSet::from_real(&[0.5, 2.0], 1.0));
        assert_eq!(p, Polynomial::from_real(&[1.0, -2.5, 1.0]));
        let p = Polynomial::from_roots(&RootSet::from_real(&[1.1], -0.01));
        assert!((p.coeffs()[0] - c(0.011, 0.0)).norm() < 1e-15);
        assert!((p.coeffs()[1] - c(-0.01, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn cancel_exact_shared_root() {
        let num = Polynomial::from_roots(&RootSet::from_real(&[0.7, 1.1], 1.0));
        let den = Polynomial::from_roots(&RootSet::from_real(&[0.7, 0.5], 1.0));
        let (n, d) = cancel_common_roots(&num, &den, 1e-8);
        assert_eq!(n.degree(), Some(1));
        assert_eq!(d.degree(), Some(1));
        assert!(n.eval_real(1.1).norm() < 1e-12);
        assert!(d.eval_real(0.5).norm() < 1e-12);
    }

    #[test]
    fn cancel_within_tolerance() {
        let num = Polynomial::from_real(&[-1.0, 1.0]);
        let den = Polynomial::from_real(&[-1.0000000001, 1.0]);
        let (n, d) = cancel_common_roots(&num, &den, 1e-6);
        assert_eq!(n.degree(), Some(0));
        assert_eq!(d.degree(), Some(0));
    }

    #[test]
    fn cancel_no_match_returns_inputs() {
        let num = Polynomial::from_real(&[-0.3, 1.0]);
        let den = Polynomial::from_real(&[0.25, -1.0, 1.0]);
        let (n, d) = cancel_common_roots(&num, &den, 1e-6);
        assert_eq!(n, num);
        assert_eq!(d, den);
    }

    #[test]
    fn cancel_naive_common_denominator_determinants() {
        // Example 3 with every column over the full common denominator
        // (z-0.9)(z-0.7). The 2x2 determinants are expanded by hand here.
        let lin = |r: f64| Polynomial::from_real(&[-r, 1.0]);
        let k = |x: f64| Polynomial::from_real(&[x]);
        let common = &lin(0.9) * &lin(0.7);
        let n11 = &k(0.1) * &lin(0.7);
        let n12 = &k(0.2) * &lin(0.9);
        let n21 = &k(0.1) * &lin(0.7);
        let n22 = &k(0.1) * &lin(0.7);
        let det_d = &common * &common;
        let m11 = &common + &n11;
        let m22 = &common + &n22;
        let det_dn = &(&m11 * &m22) - &(&n12 * &n21);
        assert_eq!(det_d.degree(), Some(4));
        assert_eq!(det_dn.degree(), Some(4));

        let (n, d) = cancel_common_roots(&det_d, &det_dn, 1e-6);
        assert_eq!(n.degree(), Some(3));
        assert_eq!(d.degree(), Some(3));
        let nr = n.roots().unwrap();
        assert_roots_match(&nr.roots, &[c(0.9, 0.0), c(0.9, 0.0), c(0.7, 0.0)], 1e-6);
        let dr = d.roots().unwrap();
        assert_roots_match(
            &dr.roots,
            &[c(0.5730, 0.0), c(0.8635, 0.0692), c(0.8635, -0.0692)],
            1e-3,
        );
    }

    #[test]
    fn complex_coefficient_roots() {
        let rs = RootSet::new(vec![c(0.3, 0.4), c(-1.0, 2.0), c(0.0, -0.5)], c(2.0, -1.0));
        let p = Polynomial::from_roots(&rs);
        let got = p.roots().unwrap();
        assert_roots_match(&got.roots, &rs.roots, 1e-12);
        assert!((got.gain - rs.gain).norm() < 1e-14);
    }

    #[test]
    fn arithmetic() {
        let a = Polynomial::from_real(&[1.0, 1.0]);
        let b = Polynomial::from_real(&[-1.0, 1.0]);
        assert_eq!(&a * &b, Polynomial::from_real(&[-1.0, 0.0, 1.0]));
        assert_eq!(&a - &a, Polynomial::zero());
        assert_eq!((&a + &b).degree(), Some(1));
        assert_eq!(a.pow(3), Polynomial::from_real(&[1.0, 3.0, 3.0, 1.0]));
    }

    fn separated_roots(max_len: usize) -> impl Strategy<Value = Vec<Complex64>> {
        prop::collection::vec((0.0f64..3.0, 0.0f64..std::f64::consts::TAU), 1..=max_len)
            .prop_map(|v| {
                v.into_iter()
                    .map(|(r, t)| Complex64::from_polar(r, t))
                    .collect::<Vec<_>>()
            })
            .prop_filter("pairwise separation >= 1e-3", |v| {
                v.iter()
                    .enumerate()
                    .all(|(i, a)| v[i + 1..].iter().all(|b| (a - b).norm() >= 1e-3))
            })
    }

    proptest! {
        #[test]
        fn roots_inverts_from_roots(roots in separated_roots(8)) {
            let rs = RootSet::monic(roots.clone());
            let p = Polynomial::from_roots(&rs);
            let got = p.roots().unwrap();
            prop_assert_eq!(got.roots.len(), roots.len());
            let tol = 1e-9;
            let mut used = vec![false; got.roots.len()];
            for w in &roots {
                let (idx, d) = got.roots.iter().enumerate()
                    .filter(|(i, _)| !used[*i])
                    .map(|(i, g)| (i, (g - w).norm()))
                    .min_by(|a, b| a.1.total_cmp(&b.1)).unwrap();
                prop_assert!(d < tol, "distance {} for {}", d, w);
                used[idx] = true;
            }
        }

        #[test]
        fn real_polynomials_have_conjugate_closed_roots(
            coeffs in prop::collection::vec(-3.0f64..3.0, 2..=9)
        ) {
            let p = Polynomial::from_real(&coeffs);
            prop_assume!(p.degree().unwrap_or(0) >= 1);
            let rs = p.roots().unwrap();
            for r in &rs.roots {
                let mismatch = rs.roots.iter().map(|s| (s - r.conj()).norm()).fold(f64::INFINITY, f64::min);
                prop_assert!(mismatch < 1e-9);
            }
        }

        #[test]
        fn eval_vanishes_at_each_root(roots in separated_roots(6), gain in 0.1f64..5.0) {
            let rs = RootSet::new(roots.clone(), Complex64::new(gain, 0.0));
            let p = Polynomial::from_roots(&rs);
            for r in &roots {
                let scale: f64 = gain * roots.iter().map(|s| (r - s).norm().max(1.0)).product::<f64>();
                prop_assert!(p.eval(*r).norm() <= 1e-12 * scale.max(1.0) * 8.0);
            }
        }
    }

    #[test]
    fn circle_interpolation_recovers_polynomial() {
        let p = Polynomial::new(vec![c(0.3, -1.0), c(2.0, 0.5), c(-0.7, 0.0), c(1.0, 0.0)]);
        for n in [4, 5, 9] {
            let values: Vec<_> = circle_nodes(n, 2.0).iter().map(|&z| p.eval(z)).collect();
            let q = interpolate_on_circle(&values, 2.0);
            assert_eq!(q.degree(), Some(3));
            for (a, b) in p.coeffs().iter().zip(q.coeffs()) {
                assert!((a - b).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn display() {
        let p = Polynomial::from_real(&[1.0, 0.0, -2.0]);
        assert_eq!(p.to_string(), "-2z^2 + 1");
    }
}
