// SPDX-License-Identifier: Apache-2.0

//! Touchstone v1 reader and writer for one- and two-port files.
//!
//! Values are kept exactly as written in the file (declared unit and
//! format); [`TouchstoneDocument::frequencies_hz`] and
//! [`TouchstoneDocument::complex_row`] give the converted view. Two-port
//! rows use the v1 column order `S11 S21 S12 S22`.
//!
//! In v1 files Z- and Y-parameters are normalized to the reference
//! resistance; [`to_network`] denormalizes them before converting to S.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::network::{Mat2, NetworkError, RepresentationKind, TwoPortNetwork};

pub const DEFAULT_DIGITS: usize = 12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TouchstoneError {
    #[error("line {line}: malformed option line: {message}")]
    MalformedOption { line: usize, message: String },
    #[error("line {line}: more than one option line")]
    DuplicateOption { line: usize },
    #[error("line {line}: Touchstone v2 keywords are not supported")]
    UnsupportedVersion { line: usize },
    #[error("line {line}: frequency {freq} is not greater than the previous one")]
    NonMonotonic { line: usize, freq: f64 },
    #[error("line {line}: expected {expected} fields, found {found}")]
    FieldCount {
        line: usize,
        expected: String,
        found: usize,
    },
    #[error("line {line}: non-numeric token '{token}'")]
    NonNumeric { line: usize, token: String },
    #[error("document has no network data")]
    Empty,
    #[error("unsupported port count {0}; only 2-port documents convert to a network")]
    UnsupportedPorts(usize),
    #[error("invalid document: {0}")]
    Invalid(String),
    #[error(transparent)]
    Network(#[from] NetworkError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FreqUnit {
    Hz,
    KHz,
    MHz,
    GHz,
}

impl FreqUnit {
    pub fn multiplier(self) -> f64 {
        match self {
            FreqUnit::Hz => 1.0,
            FreqUnit::KHz => 1e3,
            FreqUnit::MHz => 1e6,
            FreqUnit::GHz => 1e9,
        }
    }

    fn token(self) -> &'static str {
        match self {
            FreqUnit::Hz => "Hz",
            FreqUnit::KHz => "kHz",
            FreqUnit::MHz => "MHz",
            FreqUnit::GHz => "GHz",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ParameterKind {
    S,
    Y,
    Z,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ValueFormat {
    /// Linear magnitude, angle in degrees.
    MA,
    /// 20·log10 magnitude, angle in degrees.
    DB,
    /// Real, imaginary.
    RI,
}

impl ValueFormat {
    pub fn to_complex(self, a: f64, b: f64) -> Complex64 {
        match self {
            ValueFormat::RI => Complex64::new(a, b),
            ValueFormat::MA => Complex64::from_polar(a, b.to_radians()),
            ValueFormat::DB => Complex64::from_polar(10f64.powf(a / 20.0), b.to_radians()),
        }
    }

    /// `None` for a zero magnitude in DB format.
    pub fn from_complex(self, z: Complex64) -> Option<(f64, f64)> {
        match self {
            ValueFormat::RI => Some((z.re, z.im)),
            ValueFormat::MA => Some((z.norm(), z.arg().to_degrees())),
            ValueFormat::DB => {
                let mag = z.norm();
                (mag > 0.0).then(|| (20.0 * mag.log10(), z.arg().to_degrees()))
            }
        }
    }
}

impl fmt::Display for ParameterKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl fmt::Display for ValueFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// Contents of a Touchstone v1 file.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TouchstoneDocument {
    pub freq_unit: FreqUnit,
    pub parameter_kind: ParameterKind,
    pub value_format: ValueFormat,
    pub reference_resistance: f64,
    pub n_ports: usize,
    /// Frequency followed by `2·n_ports²` values, in the declared unit/format.
    pub data_rows: Vec<Vec<f64>>,
    /// Two-port noise block: frequency, NFmin (dB), |Γopt|, ∠Γopt (deg), Rn/R.
    pub noise_rows: Vec<[f64; 5]>,
    pub header_comments: Vec<String>,
}

impl Default for TouchstoneDocument {
    fn default() -> Self {
        TouchstoneDocument {
            freq_unit: FreqUnit::GHz,
            parameter_kind: ParameterKind::S,
            value_format: ValueFormat::MA,
            reference_resistance: 50.0,
            n_ports: 2,
            data_rows: Vec::new(),
            noise_rows: Vec::new(),
            header_comments: Vec::new(),
        }
    }
}

impl TouchstoneDocument {
    pub fn row_len(&self) -> usize {
        1 + 2 * self.n_ports * self.n_ports
    }

    pub fn frequencies_hz(&self) -> Vec<f64> {
        let k = self.freq_unit.multiplier();
        self.data_rows.iter().map(|r| r[0] * k).collect()
    }

    /// Complex values of one row, in file column order.
    pub fn complex_row(&self, row: usize) -> Vec<Complex64> {
        self.data_rows[row][1..]
            .chunks_exact(2)
            .map(|p| self.value_format.to_complex(p[0], p[1]))
            .collect()
    }

    pub fn validate(&self) -> Result<(), TouchstoneError> {
        if self.data_rows.is_empty() {
            return Err(TouchstoneError::Empty);
        }
        if !(self.reference_resistance.is_finite() && self.reference_resistance > 0.0) {
            return Err(TouchstoneError::Invalid(format!(
                "reference resistance must be positive, got {}",
                self.reference_resistance
            )));
        }
        let n = self.row_len();
        for (i, row) in self.data_rows.iter().enumerate() {
            if row.len() != n {
                return Err(TouchstoneError::Invalid(format!(
                    "data row {i} has {} fields, expected {n}",
                    row.len()
                )));
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(TouchstoneError::Invalid(format!("data row {i} is not finite")));
            }
        }
        let k = self.freq_unit.multiplier();
        if self.data_rows.windows(2).any(|w| w[0][0] * k >= w[1][0] * k) {
            return Err(TouchstoneError::Invalid(
                "frequencies must be strictly increasing".into(),
            ));
        }
        if !self.noise_rows.is_empty() && self.n_ports != 2 {
            return Err(TouchstoneError::Invalid(
                "noise parameters are only defined for 2-port files".into(),
            ));
        }
        Ok(())
    }

    /// Same data expressed in another value format.
    pub fn with_format(&self, format: ValueFormat) -> Result<Self, TouchstoneError> {
        let mut out = self.clone();
        out.value_format = format;
        for (i, row) in out.data_rows.iter_mut().enumerate() {
            for pair in row[1..].chunks_exact_mut(2) {
                let z = self.value_format.to_complex(pair[0], pair[1]);
                let (a, b) = format.from_complex(z).ok_or_else(|| {
                    TouchstoneError::Invalid(format!("row {i}: zero magnitude has no dB value"))
                })?;
                pair[0] = a;
                pair[1] = b;
            }
        }
        Ok(out)
    }

    /// Same data with frequencies expressed in another unit.
    pub fn with_freq_unit(&self, unit: FreqUnit) -> Self {
        let mut out = self.clone();
        let k = self.freq_unit.multiplier() / unit.multiplier();
        out.freq_unit = unit;
        for row in &mut out.data_rows {
            row[0] *= k;
        }
        for row in &mut out.noise_rows {
            row[0] *= k;
        }
        out
    }

    /// S-parameter document (RI format) holding `net`.
    pub fn from_network(net: &TwoPortNetwork, unit: FreqUnit) -> Self {
        let k = unit.multiplier();
        let data_rows = net
            .freqs()
            .iter()
            .zip(net.s())
            .map(|(f, m)| {
                let mut row = Vec::with_capacity(9);
                row.push(f / k);
                for z in [m.get(0, 0), m.get(1, 0), m.get(0, 1), m.get(1, 1)] {
                    row.push(z.re);
                    row.push(z.im);
                }
                row
            })
            .collect();
        TouchstoneDocument {
            freq_unit: unit,
            parameter_kind: ParameterKind::S,
            value_format: ValueFormat::RI,
            reference_resistance: net.z0(),
            n_ports: 2,
            data_rows,
            noise_rows: Vec::new(),
            header_comments: if net.label.is_empty() {
                Vec::new()
            } else {
                vec![format!(" {}", net.label)]
            },
        }
    }
}

fn parse_option_line(body: &str, line: usize) -> Result<TouchstoneDocument, TouchstoneError> {
    let bad = |message: String| TouchstoneError::MalformedOption { line, message };
    let mut doc = TouchstoneDocument::default();
    let (mut unit, mut kind, mut format, mut r) = (false, false, false, false);
    let mut tokens = body.split_whitespace();
    while let Some(tok) = tokens.next() {
        let upper = tok.to_ascii_uppercase();
        let set = |seen: &mut bool, what: &str| {
            if std::mem::replace(seen, true) {
                Err(bad(format!("{what} given twice")))
            } else {
                Ok(())
            }
        };
        match upper.as_str() {
            "HZ" | "KHZ" | "MHZ" | "GHZ" => {
                set(&mut unit, "frequency unit")?;
                doc.freq_unit = match upper.as_str() {
                    "HZ" => FreqUnit::Hz,
                    "KHZ" => FreqUnit::KHz,
                    "MHZ" => FreqUnit::MHz,
                    _ => FreqUnit::GHz,
                };
            }
            "S" | "Y" | "Z" => {
                set(&mut kind, "parameter kind")?;
                doc.parameter_kind = match upper.as_str() {
                    "S" => ParameterKind::S,
                    "Y" => ParameterKind::Y,
                    _ => ParameterKind::Z,
                };
            }
            "G" | "H" => return Err(bad(format!("unsupported parameter kind '{tok}'"))),
            "MA" | "DB" | "RI" => {
                set(&mut format, "value format")?;
                doc.value_format = match upper.as_str() {
                    "MA" => ValueFormat::MA,
                    "DB" => ValueFormat::DB,
                    _ => ValueFormat::RI,
                };
            }
            "R" => {
                set(&mut r, "reference resistance")?;
                let value = tokens
                    .next()
                    .ok_or_else(|| bad("'R' without a value".into()))?;
                let ohms = f64::from_str(value)
                    .map_err(|_| bad(format!("invalid reference resistance '{value}'")))?;
                if !(ohms.is_finite() && ohms > 0.0) {
                    return Err(bad(format!("reference resistance must be positive, got {value}")));
                }
                doc.reference_resistance = ohms;
            }
            _ => return Err(bad(format!("unknown token '{tok}'"))),
        }
    }
    Ok(doc)
}

fn parse_number(tok: &str, line: usize) -> Result<f64, TouchstoneError> {
    match f64::from_str(tok) {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(TouchstoneError::NonNumeric {
            line,
            token: tok.to_string(),
        }),
    }
}

/// Parses Touchstone v1 text. A missing option line means `# GHz S MA R 50`.
pub fn parse_touchstone(text: &str) -> Result<TouchstoneDocument, TouchstoneError> {
    let mut doc: Option<TouchstoneDocument> = None;
    let mut header_comments = Vec::new();
    let mut data_rows: Vec<Vec<f64>> = Vec::new();
    let mut noise_rows: Vec<[f64; 5]> = Vec::new();
    let mut n_ports = 0usize;
    let mut last_freq = f64::NEG_INFINITY;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if let Some(comment) = trimmed.strip_prefix('!') {
            if doc.is_none() && data_rows.is_empty() {
                header_comments.push(comment.trim_end().to_string());
            }
            continue;
        }
        let content = match trimmed.find('!') {
            Some(pos) => trimmed[..pos].trim(),
            None => trimmed,
        };
        if content.is_empty() {
            continue;
        }
        if content.starts_with('[') {
            return Err(TouchstoneError::UnsupportedVersion { line });
        }
        if let Some(body) = content.strip_prefix('#') {
            if doc.is_some() {
                return Err(TouchstoneError::DuplicateOption { line });
            }
            if !data_rows.is_empty() {
                return Err(TouchstoneError::MalformedOption {
                    line,
                    message: "option line after network data".into(),
                });
            }
            doc = Some(parse_option_line(body, line)?);
            continue;
        }

        let doc = doc.get_or_insert_with(TouchstoneDocument::default);
        let values = content
            .split_whitespace()
            .map(|t| parse_number(t, line))
            .collect::<Result<Vec<f64>, _>>()?;
        let freq_hz = values[0] * doc.freq_unit.multiplier();

        if data_rows.is_empty() {
            n_ports = match values.len() {
                3 => 1,
                9 => 2,
                found => {
                    return Err(TouchstoneError::FieldCount {
                        line,
                        expected: "3 (1-port) or 9 (2-port)".into(),
                        found,
                    })
                }
            };
        } else if !noise_rows.is_empty()
            || (n_ports == 2 && values.len() == 5 && freq_hz <= last_freq)
        {
            if values.len() != 5 {
                return Err(TouchstoneError::FieldCount {
                    line,
                    expected: "5 (noise parameters)".into(),
                    found: values.len(),
                });
            }
            if let Some(prev) = noise_rows.last() {
                if freq_hz <= prev[0] * doc.freq_unit.multiplier() {
                    return Err(TouchstoneError::NonMonotonic { line, freq: values[0] });
                }
            }
            noise_rows.push([values[0], values[1], values[2], values[3], values[4]]);
            continue;
        } else if values.len() != 1 + 2 * n_ports * n_ports {
            return Err(TouchstoneError::FieldCount {
                line,
                expected: (1 + 2 * n_ports * n_ports).to_string(),
                found: values.len(),
            });
        } else if freq_hz <= last_freq {
            return Err(TouchstoneError::NonMonotonic { line, freq: values[0] });
        }
        last_freq = freq_hz;
        data_rows.push(values);
    }

    if data_rows.is_empty() {
        return Err(TouchstoneError::Empty);
    }
    let mut doc = doc.unwrap_or_default();
    doc.n_ports = n_ports;
    doc.data_rows = data_rows;
    doc.noise_rows = noise_rows;
    doc.header_comments = header_comments;
    Ok(doc)
}

fn push_number(out: &mut String, v: f64, digits: usize) {
    use std::fmt::Write;
    let _ = write!(out, "{:.*e}", digits.saturating_sub(1), v);
}

pub fn serialize_touchstone(doc: &TouchstoneDocument) -> Result<String, TouchstoneError> {
    serialize_touchstone_with(doc, DEFAULT_DIGITS)
}

/// Canonical output with `digits` significant digits per value.
pub fn serialize_touchstone_with(
    doc: &TouchstoneDocument,
    digits: usize,
) -> Result<String, TouchstoneError> {
    doc.validate()?;
    let digits = digits.clamp(1, 17);
    let mut out = String::new();
    for c in &doc.header_comments {
        out.push('!');
        out.push_str(c);
        out.push('\n');
    }
    out.push_str(&format!(
        "# {} {} {} R {}\n",
        doc.freq_unit.token(),
        doc.parameter_kind,
        doc.value_format,
        doc.reference_resistance
    ));
    let rows = doc
        .data_rows
        .iter()
        .map(|r| r.as_slice())
        .chain(doc.noise_rows.iter().map(|r| r.as_slice()));
    for row in rows {
        for (i, &v) in row.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            push_number(&mut out, v, digits);
        }
        out.push('\n');
    }
    Ok(out)
}

/// Converts a 2-port document into S-parameters referenced to its resistance.
pub fn to_network(doc: &TouchstoneDocument) -> Result<TwoPortNetwork, TouchstoneError> {
    doc.validate()?;
    if doc.n_ports != 2 {
        return Err(TouchstoneError::UnsupportedPorts(doc.n_ports));
    }
    let r = doc.reference_resistance;
    let (kind, scale) = match doc.parameter_kind {
        ParameterKind::S => (RepresentationKind::S, 1.0),
        ParameterKind::Z => (RepresentationKind::Z, r),
        ParameterKind::Y => (RepresentationKind::Y, 1.0 / r),
    };
    let mats: Vec<Mat2> = (0..doc.data_rows.len())
        .map(|i| {
            let v = doc.complex_row(i);
            Mat2::new(v[0], v[2], v[1], v[3]).scale(scale.into())
        })
        .collect();
    let label = doc
        .header_comments
        .first()
        .map(|s| s.trim().to_string())
        .unwrap_or_default();
    Ok(TwoPortNetwork::from_representation(
        kind,
        doc.frequencies_hz(),
        &mats,
        r,
        label,
    )?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn two_port_column_order() {
        let doc = parse_touchstone("# GHz S MA R 50\n60 0.1 0 0.9 90 0.01 90 0.2 0").unwrap();
        assert_eq!(doc.frequencies_hz(), vec![60e9]);
        let net = to_network(&doc).unwrap();
        let s = net.s()[0];
        assert!(close(s.get(0, 0), Complex64::new(0.1, 0.0), 1e-15));
        assert!(close(s.get(1, 0), Complex64::new(0.0, 0.9), 1e-15));
        assert!(close(s.get(0, 1), Complex64::new(0.0, 0.01), 1e-15));
        assert!(close(s.get(1, 1), Complex64::new(0.2, 0.0), 1e-15));
    }

    #[test]
    fn defaults_without_option_line() {
        let doc = parse_touchstone("1e9 0 0\n").unwrap();
        assert_eq!(doc.n_ports, 1);
        assert_eq!(doc.freq_unit, FreqUnit::GHz);
        assert_eq!(doc.value_format, ValueFormat::MA);
        assert_eq!(doc.parameter_kind, ParameterKind::S);
        assert_eq!(doc.reference_resistance, 50.0);
        assert_eq!(doc.complex_row(0), vec![Complex64::new(0.0, 0.0)]);
    }

    #[test]
    fn db_format_conversion() {
        let doc =
            parse_touchstone("# Hz S DB R 50\n1e9 -20 0 20 45 -40 0 -10 180\n").unwrap();
        let s21 = doc.complex_row(0)[1];
        let want = Complex64::new(10.0 * 45f64.to_radians().cos(), 10.0 * 45f64.to_radians().sin());
        assert!(close(s21, want, 1e-13));
    }

    #[test]
    fn options_are_case_insensitive_and_any_order() {
        let doc = parse_touchstone("# r 75 ri mhz y\n100 1 2 3 4 5 6 7 8\n").unwrap();
        assert_eq!(doc.freq_unit, FreqUnit::MHz);
        assert_eq!(doc.parameter_kind, ParameterKind::Y);
        assert_eq!(doc.value_format, ValueFormat::RI);
        assert_eq!(doc.reference_resistance, 75.0);
    }

    #[test]
    fn units_agree() {
        let ghz = parse_touchstone("# GHz S RI\n1.5 0 0 1 0 1 0 0 0\n2.25 0 0 1 0 1 0 0 0\n").unwrap();
        let mhz =
            parse_touchstone("# MHz S RI\n1500 0 0 1 0 1 0 0 0\n2250 0 0 1 0 1 0 0 0\n").unwrap();
        assert_eq!(ghz.frequencies_hz(), mhz.frequencies_hz());
    }

    #[test]
    fn header_comments_and_inline_comments() {
        let text = "! measured at 2 K\r\n!VDD=0.88\r\n# GHz S RI R 50\r\n! after option\r\n60 0 0 1 0 1 0 0 0 ! trailing\r\n";
        let doc = parse_touchstone(text).unwrap();
        assert_eq!(doc.header_comments, vec![" measured at 2 K", "VDD=0.88"]);
        assert_eq!(doc.data_rows.len(), 1);
    }

    #[test]
    fn noise_block_is_retained() {
        let text = "# GHz S MA R 50\n\
                    50 0.1 0 3 90 0.01 0 0.2 0\n\
                    60 0.1 0 3 90 0.01 0 0.2 0\n\
                    50 7.0 0.3 45 0.4\n\
                    60 7.2 0.3 50 0.4\n";
        let doc = parse_touchstone(text).unwrap();
        assert_eq!(doc.data_rows.len(), 2);
        assert_eq!(doc.noise_rows, vec![[50.0, 7.0, 0.3, 45.0, 0.4], [60.0, 7.2, 0.3, 50.0, 0.4]]);
        let again = parse_touchstone(&serialize_touchstone(&doc).unwrap()).unwrap();
        assert_eq!(again, doc);
    }

    #[test]
    fn errors_carry_line_numbers() {
        use TouchstoneError::*;
        assert!(matches!(
            parse_touchstone("# GHz S XX R 50\n1 0 0\n"),
            Err(MalformedOption { line: 1, .. })
        ));
        assert!(matches!(
            parse_touchstone("# GHz S MA R\n1 0 0\n"),
            Err(MalformedOption { line: 1, .. })
        ));
        assert!(matches!(
            parse_touchstone("# GHz S MA R -5\n1 0 0\n"),
            Err(MalformedOption { line: 1, .. })
        ));
        assert!(matches!(
            parse_touchstone("# GHz H MA R 50\n1 0 0\n"),
            Err(MalformedOption { line: 1, .. })
        ));
        assert!(matches!(
            parse_touchstone("# GHz\n# GHz\n1 0 0\n"),
            Err(DuplicateOption { line: 2 })
        ));
        assert!(matches!(
            parse_touchstone("! c\n[Version] 2.0\n"),
            Err(UnsupportedVersion { line: 2 })
        ));
        assert!(matches!(
            parse_touchstone("# GHz\n2 0 0\n1 0 0\n"),
            Err(NonMonotonic { line: 3, .. })
        ));
        assert!(matches!(
            parse_touchstone("# GHz\n1 0 0\n2 0 0 0\n"),
            Err(FieldCount { line: 3, found: 4, .. })
        ));
        assert!(matches!(
            parse_touchstone("# GHz\n1 0 0 0 0\n"),
            Err(FieldCount { line: 2, found: 5, .. })
        ));
        assert!(matches!(
            parse_touchstone("# GHz\n1 0 abc\n"),
            Err(NonNumeric { line: 2, .. })
        ));
        assert!(matches!(
            parse_touchstone("# GHz\n1 0 nan\n"),
            Err(NonNumeric { line: 2, .. })
        ));
        assert_eq!(parse_touchstone("! only a comment\n"), Err(Empty));
    }

    #[test]
    fn serialize_empty_is_error() {
        let doc = TouchstoneDocument::default();
        assert_eq!(serialize_touchstone(&doc), Err(TouchstoneError::Empty));
    }

    #[test]
    fn ma_to_ri_cross_format() {
        let doc = parse_touchstone("# GHz S MA R 50\n60 0.1 30 0.9 90 0.01 -170 0.2 10\n").unwrap();
        let ri = doc.with_format(ValueFormat::RI).unwrap();
        let text = serialize_touchstone_with(&ri, 16).unwrap();
        let back = parse_touchstone(&text).unwrap();
        for (a, b) in doc.complex_row(0).iter().zip(back.complex_row(0)) {
            assert!(close(*a, b, 1e-12));
        }
    }

    #[test]
    fn zero_magnitude_has_no_db_value() {
        let doc = parse_touchstone("# GHz S RI\n1 0 0\n").unwrap();
        assert!(doc.with_format(ValueFormat::DB).is_err());
    }

    #[test]
    fn z_document_denormalizes_then_converts() {
        // Normalized z = [[1+1j, 0.2], [0.2, 0.5-0.5j]] at R = 50.
        let doc = parse_touchstone("# GHz Z RI R 50\n10 1 1 0.2 0 0.2 0 0.5 -0.5\n").unwrap();
        let net = to_network(&doc).unwrap();
        let z = Mat2::new(
            Complex64::new(50.0, 50.0),
            Complex64::new(10.0, 0.0),
            Complex64::new(10.0, 0.0),
            Complex64::new(25.0, -25.0),
        );
        // Hand oracle: S = (Z - z0)(Z + z0)^-1 evaluated with the explicit 2x2 inverse.
        let a = z - Mat2::identity().scale(50.0.into());
        let b = z + Mat2::identity().scale(50.0.into());
        let det = b.det();
        let binv = Mat2::new(b.get(1, 1) / det, -b.get(0, 1) / det, -b.get(1, 0) / det, b.get(0, 0) / det);
        let want = a * binv;
        assert!((net.s()[0] - want).max_abs() < 1e-14);
    }

    #[test]
    fn non_two_port_documents_rejected() {
        let one = parse_touchstone("1 0.5 0\n").unwrap();
        assert_eq!(to_network(&one), Err(TouchstoneError::UnsupportedPorts(1)));
        let mut three = TouchstoneDocument {
            n_ports: 3,
            ..Default::default()
        };
        three.data_rows.push(vec![1.0; 19]);
        assert_eq!(to_network(&three), Err(TouchstoneError::UnsupportedPorts(3)));
    }

    fn value_text() -> impl Strategy<Value = String> {
        // At most 12 significant digits, as produced by instruments and by the writer.
        (-99_999_999i64..99_999_999, -6i32..3).prop_map(|(m, e)| format!("{m}e{e}"))
    }

    proptest! {
        #[test]
        fn parse_serialize_parse_is_identity(
            rows in prop::collection::vec(prop::collection::vec(value_text(), 8), 1..6),
            unit in prop::sample::select(vec!["Hz", "kHz", "MHz", "GHz"]),
            fmt in prop::sample::select(vec!["MA", "DB", "RI"]),
        ) {
            let mut text = format!("! generated\n# {unit} S {fmt} R 50\n");
            for (i, r) in rows.iter().enumerate() {
                text.push_str(&format!("{} {}\n", i + 1, r.join(" ")));
            }
            let first = parse_touchstone(&text).unwrap();
            let second = parse_touchstone(&serialize_touchstone(&first).unwrap()).unwrap();
            prop_assert_eq!(&first.header_comments, &second.header_comments);
            for (a, b) in first.data_rows.iter().zip(&second.data_rows) {
                for (x, y) in a.iter().zip(b) {
                    prop_assert!((x - y).abs() <= 1e-12 * x.abs());
                }
            }
        }
    }
}
