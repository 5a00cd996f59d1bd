// SPDX-License-Identifier: Apache-2.0

//! Spin-qubit drive link budget.
//!
//! A [`QubitDriveSpec`] states what the control chain needs (Larmor
//! frequency, Rabi rate, gate voltage, gain and noise limits); an
//! [`AmplifierCard`] summarises a measured amplifier. [`check_link`]
//! compares the two and reports a margin for every criterion.
//!
//! Gain is taken at the card's `f0`. When a measured gain curve is
//! available, [`check_link_at_larmor`] uses the gain at the Larmor
//! frequency instead, which is never more optimistic for a peaked response.
//!
//! Both records can be read from `key = value` text; see
//! [`QubitDriveSpec::from_kv_text`] and [`AmplifierCard::from_kv_text`].

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::constants::{H, Q};
use crate::metrics::{self, GainCurve, MetricsError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QubitError {
    #[error("{what} must be {bound}, got {value}")]
    OutOfDomain { what: &'static str, bound: &'static str, value: f64 },
    #[error("invalid specification: {0}")]
    Invalid(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("missing key '{0}'")]
    MissingKey(&'static str),
}

fn nonneg(what: &'static str, v: f64) -> Result<f64, QubitError> {
    if v.is_finite() && v >= 0.0 {
        Ok(v)
    } else {
        Err(QubitError::OutOfDomain { what, bound: "nonnegative", value: v })
    }
}

fn pos(what: &'static str, v: f64) -> Result<f64, QubitError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(QubitError::OutOfDomain { what, bound: "positive", value: v })
    }
}

/// Larmor frequency (Hz) for a Zeeman splitting in meV.
pub fn larmor_frequency(e_z_mev: f64) -> Result<f64, QubitError> {
    Ok(nonneg("Zeeman energy", e_z_mev)? * 1e-3 * Q / H)
}

/// Zeeman splitting (meV) for a Larmor frequency in Hz.
pub fn zeeman_energy(f_hz: f64) -> Result<f64, QubitError> {
    Ok(nonneg("Larmor frequency", f_hz)? * H / Q * 1e3)
}

/// Minimum drive bandwidth, eight times the Rabi frequency.
pub fn min_bandwidth(f_rabi: f64) -> Result<f64, QubitError> {
    Ok(8.0 * nonneg("Rabi frequency", f_rabi)?)
}

/// Output power (dBm) of a sinusoid with zero-to-peak amplitude `v_gate` into `r`.
pub fn required_output_power(v_gate: f64, load_resistance: f64) -> Result<f64, QubitError> {
    let v = pos("gate voltage", v_gate)?;
    let r = pos("load resistance", load_resistance)?;
    Ok(10.0 * (v * v / (2.0 * r) / 1e-3).log10())
}

pub fn required_input_power(p_out_dbm: f64, gain_db: f64) -> f64 {
    p_out_dbm - gain_db
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QubitDriveSpec {
    /// meV; present only when the spec was stated in energy.
    pub e_z: Option<f64>,
    /// Hz
    pub f_larmor: f64,
    /// Hz
    pub f_rabi: f64,
    /// V, zero-to-peak
    pub v_gate: f64,
    pub min_gain_db: f64,
    pub max_nf_db: f64,
    pub infidelity_budget: f64,
    pub fidelity_target: f64,
    /// Ω
    pub load_resistance: f64,
    pub ip1db_backoff_db: f64,
}

pub const DEFAULT_V_GATE: f64 = 10e-3;

impl QubitDriveSpec {
    fn with_defaults(e_z: Option<f64>, f_larmor: f64, f_rabi: f64) -> Self {
        QubitDriveSpec {
            e_z,
            f_larmor,
            f_rabi,
            v_gate: DEFAULT_V_GATE,
            min_gain_db: 10.0,
            max_nf_db: 12.0,
            infidelity_budget: 125e-6,
            fidelity_target: 0.999,
            load_resistance: 50.0,
            ip1db_backoff_db: 0.0,
        }
    }

    pub fn from_larmor(f_larmor: f64, f_rabi: f64) -> Result<Self, QubitError> {
        let s = Self::with_defaults(None, f_larmor, f_rabi);
        s.validate()?;
        Ok(s)
    }

    pub fn from_zeeman(e_z_mev: f64, f_rabi: f64) -> Result<Self, QubitError> {
        let f = larmor_frequency(e_z_mev)?;
        let s = Self::with_defaults(Some(e_z_mev), f, f_rabi);
        s.validate()?;
        Ok(s)
    }

    pub fn zeeman_mev(&self) -> f64 {
        self.e_z.unwrap_or(self.f_larmor * H / Q * 1e3)
    }

    pub fn validate(&self) -> Result<(), QubitError> {
        pos("Larmor frequency", self.f_larmor)?;
        pos("Rabi frequency", self.f_rabi)?;
        pos("gate voltage", self.v_gate)?;
        pos("load resistance", self.load_resistance)?;
        nonneg("IP1dB back-off", self.ip1db_backoff_db)?;
        if let Some(e) = self.e_z {
            pos("Zeeman energy", e)?;
        }
        for (what, v) in [
            ("minimum gain", self.min_gain_db),
            ("maximum noise figure", self.max_nf_db),
            ("infidelity budget", self.infidelity_budget),
            ("fidelity target", self.fidelity_target),
        ] {
            if !v.is_finite() {
                return Err(QubitError::OutOfDomain { what, bound: "finite", value: v });
            }
        }
        Ok(())
    }

    /// Parses `key = value` lines. Exactly one of `e_z_mev` and
    /// `f_larmor_hz` must be given; `f_rabi_hz` is required.
    pub fn from_kv_text(text: &str) -> Result<Self, QubitError> {
        let mut kv = KvMap::parse(text)?;
        let e_z = kv.take_f64("e_z_mev")?;
        let f_l = kv.take_f64("f_larmor_hz")?;
        let f_rabi = kv.require_f64("f_rabi_hz")?;
        let mut s = match (e_z, f_l) {
            (Some(e), None) => Self::with_defaults(Some(e), larmor_frequency(e)?, f_rabi),
            (None, Some(f)) => Self::with_defaults(None, f, f_rabi),
            _ => {
                return Err(QubitError::Invalid(
                    "exactly one of e_z_mev and f_larmor_hz is required".into(),
                ))
            }
        };
        macro_rules! opt {
            ($key:literal, $field:ident) => {
                if let Some(v) = kv.take_f64($key)? {
                    s.$field = v;
                }
            };
        }
        opt!("v_gate_v", v_gate);
        opt!("min_gain_db", min_gain_db);
        opt!("max_nf_db", max_nf_db);
        opt!("infidelity_budget", infidelity_budget);
        opt!("fidelity_target", fidelity_target);
        opt!("load_resistance_ohm", load_resistance);
        opt!("ip1db_backoff_db", ip1db_backoff_db);
        kv.finish()?;
        s.validate()?;
        Ok(s)
    }
}

/// Measured amplifier summary.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AmplifierCard {
    /// Hz
    pub f0: f64,
    /// dB at `f0`
    pub s21_db: f64,
    /// Hz
    pub f_low: f64,
    /// Hz
    pub f_high: f64,
    pub nf_min_db: f64,
    pub ip1db_dbm: f64,
    pub p_dc_mw: Option<f64>,
    pub v_dd: Option<f64>,
    /// K
    pub temperature: Option<f64>,
    pub label: String,
}

impl AmplifierCard {
    pub fn validate(&self) -> Result<(), QubitError> {
        for (what, v) in [
            ("f0", self.f0),
            ("S21", self.s21_db),
            ("lower band edge", self.f_low),
            ("upper band edge", self.f_high),
            ("noise figure", self.nf_min_db),
            ("IP1dB", self.ip1db_dbm),
        ] {
            if !v.is_finite() {
                return Err(QubitError::OutOfDomain { what, bound: "finite", value: v });
            }
        }
        if !(self.f_low <= self.f0 && self.f0 <= self.f_high) {
            return Err(QubitError::Invalid(format!(
                "f0 {} Hz outside band [{}, {}] Hz",
                self.f0, self.f_low, self.f_high
            )));
        }
        Ok(())
    }

    pub fn from_kv_text(text: &str) -> Result<Self, QubitError> {
        let mut kv = KvMap::parse(text)?;
        let card = AmplifierCard {
            f0: kv.require_f64("f0_hz")?,
            s21_db: kv.require_f64("s21_db")?,
            f_low: kv.require_f64("f_low_hz")?,
            f_high: kv.require_f64("f_high_hz")?,
            nf_min_db: kv.require_f64("nf_min_db")?,
            ip1db_dbm: kv.require_f64("ip1db_dbm")?,
            p_dc_mw: kv.take_f64("p_dc_mw")?,
            v_dd: kv.take_f64("v_dd_v")?,
            temperature: kv.take_f64("temperature_k")?,
            label: kv.take("label").map(|(_, v)| v).unwrap_or_default(),
        };
        kv.finish()?;
        card.validate()?;
        Ok(card)
    }
}

struct KvMap(BTreeMap<String, (usize, String)>);

impl KvMap {
    fn parse(text: &str) -> Result<Self, QubitError> {
        let mut map = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| QubitError::Parse {
                line: i + 1,
                message: format!("expected 'key = value', got '{line}'"),
            })?;
            let key = k.trim().to_ascii_lowercase();
            if map.insert(key.clone(), (i + 1, v.trim().to_string())).is_some() {
                return Err(QubitError::Parse {
                    line: i + 1,
                    message: format!("duplicate key '{key}'"),
                });
            }
        }
        Ok(KvMap(map))
    }

    fn take(&mut self, key: &str) -> Option<(usize, String)> {
        self.0.remove(key)
    }

    fn take_f64(&mut self, key: &str) -> Result<Option<f64>, QubitError> {
        match self.take(key) {
            None => Ok(None),
            Some((line, v)) => v.parse::<f64>().map(Some).map_err(|_| QubitError::Parse {
                line,
                message: format!("'{key}' is not a number: '{v}'"),
            }),
        }
    }

    fn require_f64(&mut self, key: &'static str) -> Result<f64, QubitError> {
        self.take_f64(key)?.ok_or(QubitError::MissingKey(key))
    }

    fn finish(self) -> Result<(), QubitError> {
        match self.0.into_iter().next() {
            None => Ok(()),
            Some((k, (line, _))) => Err(QubitError::Parse {
                line,
                message: format!("unknown key '{k}'"),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Criterion {
    pub name: String,
    pub required: f64,
    pub actual: f64,
    /// Positive when satisfied with room to spare.
    pub margin: f64,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BudgetReport {
    pub criteria: Vec<Criterion>,
    pub pass: bool,
}

impl BudgetReport {
    pub fn criterion(&self, name: &str) -> Option<&Criterion> {
        self.criteria.iter().find(|c| c.name == name)
    }

    pub fn failing(&self) -> Vec<&str> {
        self.criteria
            .iter()
            .filter(|c| !c.pass)
            .map(|c| c.name.as_str())
            .collect()
    }
}

fn criterion(name: &str, required: f64, actual: f64, margin: f64, detail: String) -> Criterion {
    Criterion {
        name: name.into(),
        required,
        actual,
        margin,
        pass: margin >= 0.0,
        detail,
    }
}

fn evaluate(card: &AmplifierCard, spec: &QubitDriveSpec, gain_db: f64, gain_at: &str) -> BudgetReport {
    let mut out = Vec::with_capacity(4);
    out.push(criterion(
        "gain",
        spec.min_gain_db,
        gain_db,
        gain_db - spec.min_gain_db,
        format!("S21 {gain_db} dB at {gain_at}, minimum {} dB", spec.min_gain_db),
    ));
    out.push(criterion(
        "noise",
        spec.max_nf_db,
        card.nf_min_db,
        spec.max_nf_db - card.nf_min_db,
        format!("NF {} dB, maximum {} dB", card.nf_min_db, spec.max_nf_db),
    ));

    let half = 4.0 * spec.f_rabi;
    let (lo, hi) = (spec.f_larmor - half, spec.f_larmor + half);
    let placement = (lo - card.f_low).min(card.f_high - hi);
    out.push(criterion(
        "band",
        2.0 * half,
        card.f_high - card.f_low,
        placement,
        format!(
            "drive band {:.4}-{:.4} GHz within measured band {:.4}-{:.4} GHz",
            lo / 1e9,
            hi / 1e9,
            card.f_low / 1e9,
            card.f_high / 1e9
        ),
    ));

    let p_in = required_output_power(spec.v_gate, spec.load_resistance)
        .map(|p| required_input_power(p, gain_db))
        .unwrap_or(f64::NAN);
    let limit = card.ip1db_dbm - spec.ip1db_backoff_db;
    out.push(criterion(
        "linearity",
        p_in,
        limit,
        limit - p_in,
        format!(
            "required input {p_in} dBm, IP1dB {} dBm less {} dB back-off",
            card.ip1db_dbm, spec.ip1db_backoff_db
        ),
    ));

    let pass = out.iter().all(|c| c.pass);
    BudgetReport { criteria: out, pass }
}

/// Evaluates gain, noise, band coverage and linearity, with gain taken at `f0`.
///
/// Band coverage requires `f_L ± 4·f_R` inside `[f_low, f_high]`; its margin is
/// the smaller distance to either edge. Linearity compares the input power
/// needed for `v_gate` across the load with IP1dB less the back-off.
pub fn check_link(card: &AmplifierCard, spec: &QubitDriveSpec) -> BudgetReport {
    evaluate(card, spec, card.s21_db, "f0")
}

/// As [`check_link`], with gain read from `curve` at the Larmor frequency.
pub fn check_link_at_larmor(
    card: &AmplifierCard,
    spec: &QubitDriveSpec,
    curve: &GainCurve,
) -> Result<BudgetReport, MetricsError> {
    let g = metrics::gain_at(curve, spec.f_larmor)?;
    Ok(evaluate(card, spec, g, "f_L"))
}
