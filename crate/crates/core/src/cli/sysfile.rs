//! JSON system description files.
//!
//! ```json
//! { "label": "...", "kind": "siso_zpk",
//!   "payload": { "zeros": [0.7], "poles": [0.5, [0.1, 0.2]], "gain": 1.0 } }
//! ```
//!
//! Scalars are a number or a `[re, im]` pair. Coefficient lists are in
//! ascending degree. `state_space` matrices are row-major real arrays.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::de::{self, SeqAccess, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::value::RawValue;
use serde_json::Value;

use crate::error::{Result, WaterbedError};
use crate::integrals::LoopSystem;
use crate::lti::{RationalSystem, StateSpaceSystem};
use crate::mimo::{build_right_mfd, TransferMatrix};
use crate::polynomial::Polynomial;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SystemKind {
    SisoRatio,
    SisoZpk,
    StateSpace,
    MimoMatrix,
}

/// A complex number written as `x` or `[re, im]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Scalar(pub Complex64);

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.im == 0.0 {
            s.serialize_f64(self.0.re)
        } else {
            [self.0.re, self.0.im].serialize(s)
        }
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct ScalarVisitor;

        impl<'de> Visitor<'de> for ScalarVisitor {
            type Value = Scalar;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or a [re, im] pair")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Scalar, E> {
                Ok(Scalar(Complex64::new(v, 0.0)))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Scalar, E> {
                self.visit_f64(v as f64)
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Scalar, E> {
                self.visit_f64(v as f64)
            }

            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> std::result::Result<Scalar, A::Error> {
                let re: f64 = seq.next_element()?.ok_or_else(|| de::Error::invalid_length(0, &self))?;
                let im: f64 = seq.next_element()?.ok_or_else(|| de::Error::invalid_length(1, &self))?;
                if seq.next_element::<de::IgnoredAny>()?.is_some() {
                    return Err(de::Error::invalid_length(3, &self));
                }
                Ok(Scalar(Complex64::new(re, im)))
            }
        }

        d.deserialize_any(ScalarVisitor)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RatioPayload {
    pub num: Vec<Scalar>,
    pub den: Vec<Scalar>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZpkPayload {
    pub zeros: Vec<Scalar>,
    pub poles: Vec<Scalar>,
    pub gain: Scalar,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSpacePayload {
    pub a: Vec<Vec<f64>>,
    pub b: Vec<Vec<f64>>,
    pub c: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MimoPayload {
    pub entries: Vec<Vec<RatioPayload>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Payload {
    SisoRatio(RatioPayload),
    SisoZpk(ZpkPayload),
    StateSpace(StateSpacePayload),
    MimoMatrix(MimoPayload),
}

impl Payload {
    pub fn kind(&self) -> SystemKind {
        match self {
            Self::SisoRatio(_) => SystemKind::SisoRatio,
            Self::SisoZpk(_) => SystemKind::SisoZpk,
            Self::StateSpace(_) => SystemKind::StateSpace,
            Self::MimoMatrix(_) => SystemKind::MimoMatrix,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SystemFile {
    pub label: String,
    pub payload: Payload,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Header<'a> {
    #[serde(default)]
    label: String,
    kind: SystemKind,
    #[serde(borrow)]
    payload: &'a RawValue,
}

#[derive(Serialize)]
struct HeaderOut<'a> {
    label: &'a str,
    kind: SystemKind,
    payload: &'a Payload,
}

/// A system file turned into something the verifier accepts.
#[derive(Clone, Debug)]
pub struct LoadedSystem {
    pub system: LoopSystem,
    /// Present for `state_space` files and for strictly proper MIMO grids.
    pub realization: Option<StateSpaceSystem>,
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset];
    let line = before.matches('\n').count() + 1;
    let column = offset - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    (line, column)
}

fn parse_error(e: serde_json::Error, line: usize, column: usize) -> WaterbedError {
    let message = e.to_string();
    let message = match message.rfind(" at line ") {
        Some(i) => message[..i].to_string(),
        None => message,
    };
    WaterbedError::Parse { line, column, message }
}

fn parse_payload<'a, T: Deserialize<'a>>(text: &str, raw: &'a RawValue) -> Result<T> {
    serde_json::from_str(raw.get()).map_err(|e| {
        let offset = raw.get().as_ptr() as usize - text.as_ptr() as usize;
        let (base_line, base_col) = line_col(text, offset);
        let (line, column) = if e.line() <= 1 {
            (base_line, base_col + e.column().saturating_sub(1))
        } else {
            (base_line + e.line() - 1, e.column())
        };
        parse_error(e, line, column)
    })
}

/// Parses and validates a system file.
pub fn parse_system_file(text: &str) -> Result<SystemFile> {
    let header: Header = serde_json::from_str(text).map_err(|e| {
        let (line, column) = (e.line(), e.column());
        parse_error(e, line, column)
    })?;
    let payload = match header.kind {
        SystemKind::SisoRatio => Payload::SisoRatio(parse_payload(text, header.payload)?),
        SystemKind::SisoZpk => Payload::SisoZpk(parse_payload(text, header.payload)?),
        SystemKind::StateSpace => Payload::StateSpace(parse_payload(text, header.payload)?),
        SystemKind::MimoMatrix => Payload::MimoMatrix(parse_payload(text, header.payload)?),
    };
    let file = SystemFile {
        label: header.label,
        payload,
    };
    file.load()?;
    Ok(file)
}

fn invalid(field: &str, msg: impl fmt::Display) -> WaterbedError {
    WaterbedError::Validation(format!("{field}: {msg}"))
}

fn complexes(v: &[Scalar]) -> Vec<Complex64> {
    v.iter().map(|s| s.0).collect()
}

fn ratio(field: &str, r: &RatioPayload) -> Result<RationalSystem> {
    if r.den.is_empty() {
        return Err(invalid(field, "den must not be empty"));
    }
    let num = Polynomial::new(complexes(&r.num));
    let den = Polynomial::new(complexes(&r.den));
    RationalSystem::new(num, den).map_err(|e| match e {
        WaterbedError::Improper { num, den } => invalid(
            field,
            format!("improper: numerator degree {num} exceeds denominator degree {den}"),
        ),
        WaterbedError::ZeroDenominator => invalid(field, "denominator is identically zero"),
        other => invalid(field, other),
    })
}

fn matrix(field: &str, rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let cols = rows.first().map_or(0, Vec::len);
    if rows.is_empty() || cols == 0 {
        return Err(invalid(field, "matrix must have at least one row and one column"));
    }
    if let Some(i) = rows.iter().position(|r| r.len() != cols) {
        return Err(invalid(
            field,
            format!("row {i} has {} entries, expected {cols}", rows[i].len()),
        ));
    }
    Ok(DMatrix::from_fn(rows.len(), cols, |i, j| rows[i][j]))
}

impl SystemFile {
    pub fn kind(&self) -> SystemKind {
        self.payload.kind()
    }

    /// Builds the loop gain described by the file.
    pub fn load(&self) -> Result<LoadedSystem> {
        match &self.payload {
            Payload::SisoRatio(r) => Ok(LoadedSystem {
                system: LoopSystem::Siso(ratio("payload", r)?),
                realization: None,
            }),
            Payload::SisoZpk(z) => {
                if z.zeros.len() > z.poles.len() {
                    return Err(invalid(
                        "payload",
                        format!("improper: {} zeros but only {} poles", z.zeros.len(), z.poles.len()),
                    ));
                }
                let sys = RationalSystem::from_zpk(&complexes(&z.zeros), &complexes(&z.poles), z.gain.0)
                    .map_err(|e| invalid("payload", e))?;
                Ok(LoadedSystem {
                    system: LoopSystem::Siso(sys),
                    realization: None,
                })
            }
            Payload::StateSpace(p) => {
                let a = matrix("payload.a", &p.a)?;
                let b = matrix("payload.b", &p.b)?;
                let c = matrix("payload.c", &p.c)?;
                let ss = StateSpaceSystem::new(a, b, c).map_err(|e| invalid("payload", e))?;
                if ss.inputs() != ss.outputs() {
                    return Err(invalid(
                        "payload",
                        format!(
                            "loop gain must be square, got {} outputs and {} inputs",
                            ss.outputs(),
                            ss.inputs()
                        ),
                    ));
                }
                let mut entries = ss.transfer_entries().map_err(|e| invalid("payload", e))?;
                let system = if ss.inputs() == 1 {
                    LoopSystem::Siso(entries.remove(0).remove(0))
                } else {
                    let l = TransferMatrix::new(entries).map_err(|e| invalid("payload", e))?;
                    LoopSystem::Mimo(build_right_mfd(&l)?)
                };
                Ok(LoadedSystem {
                    system,
                    realization: Some(ss),
                })
            }
            Payload::MimoMatrix(m) => {
                let q = m.entries.len();
                if q == 0 {
                    return Err(invalid("payload.entries", "grid must not be empty"));
                }
                if let Some(i) = m.entries.iter().position(|row| row.len() != q) {
                    return Err(invalid(
                        "payload.entries",
                        format!(
                            "loop gain must be square: row {i} has {} entries, expected {q}",
                            m.entries[i].len()
                        ),
                    ));
                }
                let rows = m
                    .entries
                    .iter()
                    .enumerate()
                    .map(|(i, row)| {
                        row.iter()
                            .enumerate()
                            .map(|(j, r)| ratio(&format!("payload.entries[{i}][{j}]"), r))
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()?;
                let l = TransferMatrix::new(rows)?;
                let realization = l.column_realization().ok();
                Ok(LoadedSystem {
                    system: LoopSystem::Mimo(build_right_mfd(&l)?),
                    realization,
                })
            }
        }
    }

    pub fn to_json(&self) -> String {
        let out = HeaderOut {
            label: &self.label,
            kind: self.kind(),
            payload: &self.payload,
        };
        serde_json::to_string_pretty(&out).expect("system files always serialize")
    }
}

fn normalize_value(v: Value) -> Value {
    match v {
        Value::Number(n) => n
            .as_f64()
            .and_then(serde_json::Number::from_f64)
            .map_or(Value::Null, Value::Number),
        Value::Array(items) => {
            let items: Vec<Value> = items.into_iter().map(normalize_value).collect();
            match items.as_slice() {
                [re, Value::Number(im)] if re.is_number() && im.as_f64() == Some(0.0) => re.clone(),
                _ => Value::Array(items),
            }
        }
        Value::Object(map) => Value::Object(map.into_iter().map(|(k, v)| (k, normalize_value(v))).collect()),
        other => other,
    }
}

/// Canonical form of a system file as a JSON value: every number as a
/// float, `[re, 0]` pairs collapsed to `re`, and a missing label as `""`.
pub fn normalize(text: &str) -> Result<Value> {
    let v: Value = serde_json::from_str(text).map_err(|e| {
        let (line, column) = (e.line(), e.column());
        parse_error(e, line, column)
    })?;
    let mut v = normalize_value(v);
    if let Value::Object(map) = &mut v {
        map.entry("label").or_insert_with(|| Value::String(String::new()));
    }
    Ok(v)
}
