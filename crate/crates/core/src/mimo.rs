//! Square MIMO loops: transfer matrices, right matrix-fraction descriptions
//! `L = N D^{-1}`, polynomial-matrix determinants, transmission zeros and the
//! determinant forms of S and T.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Result, WaterbedError};
use crate::lti::{RationalSystem, StateSpaceSystem, CANCEL_TOL};
use crate::polynomial::{cancel_common_roots, circle_nodes, interpolate_on_circle, Polynomial, RootSet};

/// Radius of the circle carrying the determinant interpolation nodes.
pub const DET_INTERPOLATION_RADIUS: f64 = 2.0;

/// Tolerance for merging denominator roots into a column lcm.
const LCM_PAIR_TOL: f64 = 1e-8;

/// Relative tolerance used to decide whether a Markov cross-check agrees.
const MARKOV_AGREEMENT_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct PolynomialMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Polynomial>,
}

impl PolynomialMatrix {
    pub fn new(rows: Vec<Vec<Polynomial>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(WaterbedError::DimensionMismatch("ragged polynomial matrix".into()));
        }
        Ok(Self {
            rows: r,
            cols: c,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn diagonal(diag: Vec<Polynomial>) -> Self {
        let q = diag.len();
        let mut entries = vec![Polynomial::zero(); q * q];
        for (i, p) in diag.into_iter().enumerate() {
            entries[i * q + i] = p;
        }
        Self {
            rows: q,
            cols: q,
            entries,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Polynomial {
        &self.entries[i * self.cols + j]
    }

    pub fn eval(&self, z: Complex64) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j).eval(z))
    }

    pub fn is_real(&self) -> bool {
        self.entries.iter().all(|p| p.is_real(0.0))
    }

    /// Sum over rows of the largest entry degree in that row. `None` when
    /// some row is identically zero.
    pub fn row_degree_bound(&self) -> Option<usize> {
        (0..self.rows)
            .map(|i| (0..self.cols).filter_map(|j| self.get(i, j).degree()).max())
            .sum()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(WaterbedError::DimensionMismatch(format!(
                "cannot add {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect(),
        })
    }
}

/// Determinant of a square polynomial matrix by evaluation at scaled roots
/// of unity and exact Vandermonde inversion.
pub fn det_poly_matrix(m: &PolynomialMatrix) -> Result<Polynomial> {
    if m.rows() != m.cols() {
        return Err(WaterbedError::NonSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    if m.rows() == 1 {
        return Ok(m.get(0, 0).clone());
    }
    let Some(bound) = m.row_degree_bound() else {
        return Ok(Polynomial::zero());
    };
    let values: Vec<Complex64> = circle_nodes(bound + 1, DET_INTERPOLATION_RADIUS)
        .into_iter()
        .map(|z| m.eval(z).determinant())
        .collect();
    let det = interpolate_on_circle(&values, DET_INTERPOLATION_RADIUS);
    // Interpolation noise is relative to the node magnitudes, not to the
    // (possibly much smaller) coefficients.
    let peak = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let floor = 1e-13 * peak;
    let mut coeffs: Vec<Complex64> = det
        .coeffs()
        .iter()
        .enumerate()
        .map(|(k, &c)| {
            if c.norm() * DET_INTERPOLATION_RADIUS.powi(k as i32) <= floor {
                Complex64::default()
            } else {
                c
            }
        })
        .collect();
    if m.is_real() {
        coeffs.iter_mut().for_each(|c| c.im = 0.0);
    }
    Ok(Polynomial::new(coeffs))
}

/// Square matrix of proper rational entries.
#[derive(Clone, Debug, PartialEq)]
pub struct TransferMatrix {
    size: usize,
    entries: Vec<RationalSystem>,
}

impl TransferMatrix {
    pub fn new(rows: Vec<Vec<RationalSystem>>) -> Result<Self> {
        let q = rows.len();
        for row in &rows {
            if row.len() != q {
                return Err(WaterbedError::NonSquare {
                    rows: q,
                    cols: row.len(),
                });
            }
        }
        Ok(Self {
            size: q,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    /// Builds from `(num, den)` pairs, reporting the offending entry when one
    /// is improper.
    pub fn from_pairs(rows: Vec<Vec<(Polynomial, Polynomial)>>) -> Result<Self> {
        let systems = rows
            .into_iter()
            .enumerate()
            .map(|(i, row)| {
                row.into_iter()
                    .enumerate()
                    .map(|(j, (n, d))| {
                        RationalSystem::new(n, d).map_err(|e| match e {
                            WaterbedError::Improper { .. } => WaterbedError::ImproperEntry { row: i, col: j },
                            other => other,
                        })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(systems)
    }

    pub fn scalar(sys: RationalSystem) -> Self {
        Self {
            size: 1,
            entries: vec![sys],
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, i: usize, j: usize) -> &RationalSystem {
        &self.entries[i * self.size + j]
    }

    pub fn eval(&self, z: Complex64) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.size, self.size, |i, j| self.get(i, j).eval(z))
    }

    /// Column-wise controllable realization: one companion block per column
    /// built on that column's lcm denominator.
    pub fn column_realization(&self) -> Result<StateSpaceSystem> {
        if self.entries.iter().any(|e| !e.is_strictly_proper()) {
            return Err(WaterbedError::Validation(
                "column realization needs strictly proper entries".into(),
            ));
        }
        if self.entries.iter().any(|e| !e.is_real()) {
            return Err(WaterbedError::Validation(
                "column realization needs real coefficients".into(),
            ));
        }
        let mfd = build_right_mfd(self)?;
        let q = self.size;
        let degrees: Vec<usize> = (0..q).map(|j| mfd.d.get(j, j).degree_or_zero()).collect();
        let n: usize = degrees.iter().sum();
        let mut a = DMatrix::zeros(n, n);
        let mut b = DMatrix::zeros(n, q);
        let mut c = DMatrix::zeros(q, n);
        let mut offset = 0;
        for j in 0..q {
            let nj = degrees[j];
            if nj == 0 {
                continue;
            }
            let den = mfd.d.get(j, j);
            for k in 0..nj - 1 {
                a[(offset + k, offset + k + 1)] = 1.0;
            }
            for k in 0..nj {
                a[(offset + nj - 1, offset + k)] = -den.coeffs()[k].re;
            }
            b[(offset + nj - 1, j)] = 1.0;
            for i in 0..q {
                for (k, coeff) in mfd.n.get(i, j).coeffs().iter().enumerate().take(nj) {
                    c[(i, offset + k)] = coeff.re;
                }
            }
            offset += nj;
        }
        StateSpaceSystem::new(a, b, c)
    }
}

/// `L = N D^{-1}` with square polynomial matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct RightMfd {
    pub n: PolynomialMatrix,
    pub d: PolynomialMatrix,
}

impl RightMfd {
    pub fn size(&self) -> usize {
        self.n.rows()
    }

    /// `N(z) D(z)^{-1}`, or `None` where `D(z)` is singular.
    pub fn eval(&self, z: Complex64) -> Option<DMatrix<Complex64>> {
        let d = self.d.eval(z);
        let inv = d.try_inverse()?;
        Some(self.n.eval(z) * inv)
    }
}

/// Merges `roots` into the multiset `acc`, pairing within `LCM_PAIR_TOL`.
fn lcm_merge(acc: &mut Vec<Complex64>, roots: &[Complex64]) {
    let mut used = vec![false; acc.len()];
    let mut extra = Vec::new();
    for &r in roots {
        let m = acc
            .iter()
            .enumerate()
            .filter(|(i, _)| !used[*i])
            .map(|(i, a)| (i, (a - r).norm()))
            .filter(|(_, d)| *d <= LCM_PAIR_TOL)
            .min_by(|a, b| a.1.total_cmp(&b.1));
        match m {
            Some((i, _)) => used[i] = true,
            None => extra.push(r),
        }
    }
    acc.extend(extra);
}

/// Roots of `lcm` left after removing one match for every root in `den`.
fn lcm_complement(lcm: &[Complex64], den: &[Complex64]) -> Vec<Complex64> {
    let mut used = vec![false; lcm.len()];
    for &r in den {
        if let Some((i, _)) = lcm
            .iter()
            .enumerate()
            .filter(|(i, _)| !used[*i])
            .map(|(i, a)| (i, (a - r).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
        {
            used[i] = true;
        }
    }
    lcm.iter().zip(&used).filter(|(_, &u)| !u).map(|(&r, _)| r).collect()
}

/// Column-wise right MFD: `D = diag(lcm of column-j denominators)` and
/// `N[i][j] = num(L[i][j]) * D[j][j] / den(L[i][j])`. Not necessarily
/// irreducible; downstream determinant ratios are cancelled.
pub fn build_right_mfd(l: &TransferMatrix) -> Result<RightMfd> {
    let q = l.size();
    let mut d_diag = Vec::with_capacity(q);
    let mut n_columns: Vec<Vec<Polynomial>> = Vec::with_capacity(q);
    for j in 0..q {
        let den_roots: Vec<Vec<Complex64>> = (0..q).map(|i| l.get(i, j).poles()).collect();
        let mut lcm = Vec::new();
        for roots in &den_roots {
            lcm_merge(&mut lcm, roots);
        }
        let d_jj = Polynomial::from_roots(&RootSet::monic(lcm.clone()));
        let column = (0..q)
            .map(|i| {
                let entry = l.get(i, j);
                let rest = lcm_complement(&lcm, &den_roots[i]);
                let cofactor = Polynomial::from_roots(&RootSet::new(rest, entry.den().leading().inv()));
                entry.num() * &cofactor
            })
            .collect();
        d_diag.push(d_jj);
        n_columns.push(column);
    }
    let n_rows = (0..q)
        .map(|i| (0..q).map(|j| n_columns[j][i].clone()).collect())
        .collect();
    Ok(RightMfd {
        n: PolynomialMatrix::new(n_rows)?,
        d: PolynomialMatrix::diagonal(d_diag),
    })
}

/// Determinants `det D`, `det(D + N)` and `det N` before any cancellation.
#[derive(Clone, Debug, PartialEq)]
pub struct RawDeterminants {
    pub open_loop: Polynomial,
    pub closed_loop: Polynomial,
    pub numerator: Polynomial,
}

pub fn raw_determinants(mfd: &RightMfd) -> Result<RawDeterminants> {
    Ok(RawDeterminants {
        open_loop: det_poly_matrix(&mfd.d)?,
        closed_loop: det_poly_matrix(&mfd.d.add(&mfd.n)?)?,
        numerator: det_poly_matrix(&mfd.n)?,
    })
}

/// `(phi_ol, phi_cl) = (det D, det(D + N))`, jointly cancelled.
pub fn char_polynomials(mfd: &RightMfd) -> Result<(Polynomial, Polynomial)> {
    let ol = det_poly_matrix(&mfd.d)?;
    let cl = det_poly_matrix(&mfd.d.add(&mfd.n)?)?;
    if cl.is_zero() {
        return Err(WaterbedError::DegenerateClosedLoop);
    }
    Ok(cancel_common_roots(&ol, &cl, CANCEL_TOL))
}

/// `det S = phi_ol / phi_cl`.
pub fn det_sensitivity(mfd: &RightMfd) -> Result<RationalSystem> {
    let (ol, cl) = char_polynomials(mfd)?;
    RationalSystem::new(ol, cl)
}

/// `det T = det N / det(D + N)`.
pub fn det_complementary(mfd: &RightMfd) -> Result<RationalSystem> {
    let zeros = det_poly_matrix(&mfd.n)?;
    if zeros.is_zero() {
        return Err(WaterbedError::SingularSystem);
    }
    let cl = det_poly_matrix(&mfd.d.add(&mfd.n)?)?;
    if cl.is_zero() {
        return Err(WaterbedError::DegenerateClosedLoop);
    }
    RationalSystem::new(zeros, cl)
}

/// Roots of `det N` once factors shared with `det D` are removed.
pub fn transmission_zeros(mfd: &RightMfd) -> Result<RootSet> {
    let zeros = det_poly_matrix(&mfd.n)?;
    if zeros.is_zero() {
        return Err(WaterbedError::SingularSystem);
    }
    let ol = det_poly_matrix(&mfd.d)?;
    let (z, _) = cancel_common_roots(&zeros, &ol, CANCEL_TOL);
    match z.roots() {
        Ok(rs) => Ok(rs),
        Err(WaterbedError::DegreeZero) => Ok(RootSet::new(Vec::new(), z.leading())),
        Err(e) => Err(e),
    }
}

/// Leading gain of `det T` (ratio of leading coefficients).
pub fn mimo_gain(mfd: &RightMfd) -> Result<Complex64> {
    Ok(det_complementary(mfd)?.gain())
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct MarkovCrossCheck {
    /// Smallest `i` with `det(C A^{i-1} B) != 0`.
    pub index: usize,
    pub det: f64,
    pub agrees: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MimoGain {
    pub gain: Complex64,
    /// `None` when no realization was supplied.
    pub markov: Option<std::result::Result<MarkovCrossCheck, String>>,
}

/// [`mimo_gain`] plus a cross-check of `|det(C A^{i-1} B)|` against the
/// supplied realization.
pub fn mimo_gain_checked(mfd: &RightMfd, realization: Option<&StateSpaceSystem>) -> Result<MimoGain> {
    let gain = mimo_gain(mfd)?;
    let markov = realization.map(|ss| {
        ss.first_nonsingular_markov()
            .map(|(index, det)| MarkovCrossCheck {
                index,
                det,
                agrees: (det.abs() - gain.norm()).abs() <= MARKOV_AGREEMENT_TOL * gain.norm().max(1.0),
            })
            .map_err(|e| e.to_string())
    });
    Ok(MimoGain { gain, markov })
}
