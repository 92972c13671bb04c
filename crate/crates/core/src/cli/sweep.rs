//! Log-magnitude samples of S and T on a uniform frequency grid.

use std::f64::consts::TAU;
use std::io::{self, Write};

use serde::Serialize;

use crate::error::{Result, WaterbedError};
use crate::integrals::{angle_in_period, LoopSystem};
use crate::lti::{classify_roots, complementary, sensitivity, RationalSystem, UNIT_CIRCLE_TOL};
use crate::mimo;
use crate::polynomial::RootSet;

/// Written in place of a value at an angle where the function has a zero
/// or pole on the unit circle, or where its log is not finite.
pub const SENTINEL: &str = "singular";

/// Angular distance below which a grid point counts as sitting on a
/// unit-circle root.
const SINGULAR_ANGLE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepRecord {
    pub omega: f64,
    /// `None` marks a singular sample.
    pub log_mag_s: Option<f64>,
    pub log_mag_t: Option<f64>,
}

struct Channel {
    sys: Option<RationalSystem>,
    singular: Vec<f64>,
}

impl Channel {
    fn new(sys: Option<RationalSystem>) -> Self {
        let singular = sys
            .as_ref()
            .map(|s| {
                let mut roots = s.zeros();
                roots.extend(s.poles());
                classify_roots(&RootSet::monic(roots), UNIT_CIRCLE_TOL)
                    .boundary
                    .roots
                    .into_iter()
                    .map(angle_in_period)
                    .collect()
            })
            .unwrap_or_default();
        Self { sys, singular }
    }

    fn sample(&self, omega: f64) -> Option<f64> {
        let sys = self.sys.as_ref()?;
        let on_root = self.singular.iter().any(|&a| {
            let d = (omega - a).rem_euclid(TAU);
            d.min(TAU - d) < SINGULAR_ANGLE_TOL
        });
        let v = sys.log_modulus(omega);
        (!on_root && v.is_finite()).then_some(v)
    }
}

fn channels(system: &LoopSystem) -> Result<(Channel, Channel)> {
    match system {
        LoopSystem::Siso(l) => Ok((
            Channel::new(Some(sensitivity(l)?)),
            Channel::new(Some(complementary(l)?)),
        )),
        LoopSystem::Mimo(m) => {
            let t = match mimo::det_complementary(m) {
                Ok(t) => Some(t),
                Err(WaterbedError::SingularSystem) => None,
                Err(e) => return Err(e),
            };
            Ok((Channel::new(Some(mimo::det_sensitivity(m)?)), Channel::new(t)))
        }
    }
}

/// `n_points` samples at `omega_k = 2 pi k / n_points`.
pub fn sweep(system: &LoopSystem, n_points: usize) -> Result<Vec<SweepRecord>> {
    if n_points < 2 {
        return Err(WaterbedError::InvalidConfig(format!(
            "sweep needs at least 2 points, got {n_points}"
        )));
    }
    let (s, t) = channels(system)?;
    Ok((0..n_points)
        .map(|k| {
            let omega = TAU * k as f64 / n_points as f64;
            SweepRecord {
                omega,
                log_mag_s: s.sample(omega),
                log_mag_t: t.sample(omega),
            }
        })
        .collect())
}

pub fn column_names(mimo: bool) -> [&'static str; 3] {
    if mimo {
        ["omega", "log_mag_det_S", "log_mag_det_T"]
    } else {
        ["omega", "log_mag_S", "log_mag_T"]
    }
}

fn cell(v: Option<f64>) -> String {
    v.map_or_else(|| SENTINEL.to_string(), |x| format!("{x:.16e}"))
}

/// Header names carry the sentinel so the file documents itself.
pub fn write_csv(records: &[SweepRecord], mimo: bool, w: &mut dyn Write) -> io::Result<()> {
    let [o, s, t] = column_names(mimo);
    writeln!(w, "{o},{s} (sentinel={SENTINEL}),{t} (sentinel={SENTINEL})")?;
    for r in records {
        writeln!(w, "{:.16e},{},{}", r.omega, cell(r.log_mag_s), cell(r.log_mag_t))?;
    }
    Ok(())
}

#[derive(Serialize)]
struct JsonSweep {
    columns: [&'static str; 3],
    sentinel: &'static str,
    records: Vec<[serde_json::Value; 3]>,
}

fn json_cell(v: Option<f64>) -> serde_json::Value {
    match v {
        Some(x) => serde_json::json!(x),
        None => serde_json::Value::String(SENTINEL.into()),
    }
}

pub fn write_json(records: &[SweepRecord], mimo: bool, w: &mut dyn Write) -> io::Result<()> {
    let doc = JsonSweep {
        columns: column_names(mimo),
        sentinel: SENTINEL,
        records: records
            .iter()
            .map(|r| {
                [
                    serde_json::json!(r.omega),
                    json_cell(r.log_mag_s),
                    json_cell(r.log_mag_t),
                ]
            })
            .collect(),
    };
    serde_json::to_writer_pretty(&mut *w, &doc)?;
    writeln!(w)
}

/// Sign changes of `log_mag_S` between adjacent finite rows, as
/// `(omega_before, omega_after)` pairs.
pub fn sign_changes(records: &[SweepRecord]) -> Vec<(f64, f64)> {
    records
        .windows(2)
        .filter_map(|w| match (w[0].log_mag_s, w[1].log_mag_s) {
            (Some(a), Some(b)) if a != 0.0 && a.signum() != b.signum() => Some((w[0].omega, w[1].omega)),
            _ => None,
        })
        .collect()
}
