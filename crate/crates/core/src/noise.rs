// SPDX-License-Identifier: Apache-2.0

//! Noise temperature arithmetic and cold-source noise-figure extraction.
//!
//! The cold-source method characterizes the DUT with two measurements
//! (conversion gain and output noise power density, ONPD, with a matched
//! termination at the input) taken on the DUT+downconverter cascade, and
//! the same two measurements on the downconverter alone (DUT replaced by a
//! thru). Each ONPD is referred to the input as a noise temperature; the
//! downconverter contribution is then removed Friis-style.

use serde::Serialize;
use thiserror::Error;

use crate::constants::{K_B, T0};
use crate::interp;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NoiseError {
    #[error("{what} must be non-negative, got {value}")]
    Negative { what: &'static str, value: f64 },
    #[error("cascade has no stages")]
    EmptyCascade,
    #[error("invalid noise stage: {0}")]
    InvalidStage(String),
    #[error("available gain {0} is not passive (must be in (0, 1])")]
    NotPassive(f64),
    #[error("invalid spectrum '{label}': {message}")]
    InvalidSpectrum { label: String, message: String },
    #[error("source temperature must be positive, got {0}")]
    InvalidSourceTemperature(f64),
    #[error("spectra have no common frequency range")]
    NoOverlap,
    #[error(
        "{which} ONPD below the source noise floor at {freq_hz} Hz (noise temperature {temperature} K); check calibration"
    )]
    BelowSourceFloor {
        which: &'static str,
        freq_hz: f64,
        temperature: f64,
    },
}

fn check_spectrum(label: &str, freqs: &[f64], values: &[f64]) -> Result<(), NoiseError> {
    let bad = |message: &str| NoiseError::InvalidSpectrum {
        label: label.to_string(),
        message: message.to_string(),
    };
    if freqs.is_empty() {
        return Err(bad("no points"));
    }
    if freqs.len() != values.len() {
        return Err(bad("frequency and value counts differ"));
    }
    if !interp::strictly_increasing(freqs) {
        return Err(bad("frequencies must be finite and strictly increasing"));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(bad("non-finite value"));
    }
    Ok(())
}

/// Conversion gain in dB versus frequency.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GainSpectrum {
    freqs: Vec<f64>,
    gain_db: Vec<f64>,
    pub label: String,
}

impl GainSpectrum {
    pub fn new(freqs: Vec<f64>, gain_db: Vec<f64>, label: impl Into<String>) -> Result<Self, NoiseError> {
        let label = label.into();
        check_spectrum(&label, &freqs, &gain_db)?;
        Ok(GainSpectrum { freqs, gain_db, label })
    }

    pub fn freqs(&self) -> &[f64] {
        &self.freqs
    }

    pub fn gain_db(&self) -> &[f64] {
        &self.gain_db
    }
}

/// Output noise power density, W/Hz, versus frequency.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoiseDensitySpectrum {
    freqs: Vec<f64>,
    onpd: Vec<f64>,
    pub label: String,
}

impl NoiseDensitySpectrum {
    pub fn new(freqs: Vec<f64>, onpd: Vec<f64>, label: impl Into<String>) -> Result<Self, NoiseError> {
        let label = label.into();
        check_spectrum(&label, &freqs, &onpd)?;
        if onpd.iter().any(|&v| v <= 0.0) {
            return Err(NoiseError::InvalidSpectrum {
                label,
                message: "noise density must be strictly positive".into(),
            });
        }
        Ok(NoiseDensitySpectrum { freqs, onpd, label })
    }

    pub fn freqs(&self) -> &[f64] {
        &self.freqs
    }

    pub fn onpd(&self) -> &[f64] {
        &self.onpd
    }
}

/// A gain block described by its available gain and input-referred noise temperature.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoiseStage {
    pub gain_linear: f64,
    pub noise_temperature: f64,
    pub label: String,
}

impl NoiseStage {
    pub fn new(gain_linear: f64, noise_temperature: f64, label: impl Into<String>) -> Result<Self, NoiseError> {
        if !(gain_linear.is_finite() && gain_linear > 0.0) {
            return Err(NoiseError::InvalidStage(format!("gain must be positive, got {gain_linear}")));
        }
        if !(noise_temperature.is_finite() && noise_temperature >= 0.0) {
            return Err(NoiseError::InvalidStage(format!(
                "noise temperature must be non-negative, got {noise_temperature}"
            )));
        }
        Ok(NoiseStage {
            gain_linear,
            noise_temperature,
            label: label.into(),
        })
    }

    pub fn from_db(gain_db: f64, nf_db: f64, label: impl Into<String>) -> Result<Self, NoiseError> {
        NoiseStage::new(10f64.powf(gain_db / 10.0), nf_db_to_temperature(nf_db)?, label)
    }

    pub fn gain_db(&self) -> f64 {
        10.0 * self.gain_linear.log10()
    }
}

fn non_negative(what: &'static str, value: f64) -> Result<f64, NoiseError> {
    if value >= 0.0 {
        Ok(value)
    } else {
        Err(NoiseError::Negative { what, value })
    }
}

/// `T = T0·(10^(NF/10) − 1)` with `T0 = 290 K`.
pub fn nf_db_to_temperature(nf_db: f64) -> Result<f64, NoiseError> {
    nf_db_to_temperature_ref(nf_db, T0)
}

pub fn temperature_to_nf_db(t: f64) -> Result<f64, NoiseError> {
    temperature_to_nf_db_ref(t, T0)
}

/// As [`nf_db_to_temperature`] with an explicit reference temperature.
pub fn nf_db_to_temperature_ref(nf_db: f64, t0: f64) -> Result<f64, NoiseError> {
    let nf_db = non_negative("noise figure", nf_db)?;
    Ok(t0 * (10f64.powf(nf_db / 10.0) - 1.0))
}

pub fn temperature_to_nf_db_ref(t: f64, t0: f64) -> Result<f64, NoiseError> {
    let t = non_negative("noise temperature", t)?;
    Ok(10.0 * (1.0 + t / t0).log10())
}

/// Friis: total gain is the product of gains and
/// `T = Σ T_i / Π_{j<i} G_j`.
pub fn friis_cascade(stages: &[NoiseStage]) -> Result<NoiseStage, NoiseError> {
    let first = stages.first().ok_or(NoiseError::EmptyCascade)?;
    if stages.len() == 1 {
        return Ok(first.clone());
    }
    let mut gain = 1.0;
    let mut temperature = 0.0;
    for s in stages {
        temperature += s.noise_temperature / gain;
        gain *= s.gain_linear;
    }
    let label = stages
        .iter()
        .map(|s| s.label.as_str())
        .collect::<Vec<_>>()
        .join("+");
    NoiseStage::new(gain, temperature, label)
}

/// Equivalent noise temperature of a passive network at physical
/// temperature `t_phys`: `T_e = (1/G_a − 1)·t_phys`.
pub fn passive_noise_temperature(available_gain: f64, t_phys: f64) -> Result<f64, NoiseError> {
    if !(available_gain > 0.0 && available_gain <= 1.0) {
        return Err(NoiseError::NotPassive(available_gain));
    }
    let t_phys = non_negative("physical temperature", t_phys)?;
    Ok((1.0 / available_gain - 1.0) * t_phys)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ColdSourceConfig {
    /// Physical temperature of the input termination, K.
    pub t_source: f64,
    /// Reference temperature for the noise figure, K.
    pub t0: f64,
}

impl Default for ColdSourceConfig {
    fn default() -> Self {
        ColdSourceConfig { t_source: 290.0, t0: T0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NfPoint {
    pub freq_hz: f64,
    /// Extracted DUT gain, dB.
    pub gain_db: f64,
    /// Extracted DUT input-referred noise temperature, K.
    pub noise_temperature: f64,
    /// `None` where the extracted noise temperature is negative.
    pub nf_db: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NfSpectrum {
    pub points: Vec<NfPoint>,
    pub diagnostics: Vec<String>,
}

impl NfSpectrum {
    /// Lowest valid NF as `(freq_hz, nf_db)`.
    pub fn min_nf(&self) -> Option<(f64, f64)> {
        self.points
            .iter()
            .filter_map(|p| p.nf_db.map(|nf| (p.freq_hz, nf)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
    }

    /// Minimum NF restricted to `[f_lo, f_hi]`.
    pub fn min_nf_in(&self, f_lo: f64, f_hi: f64) -> Option<(f64, f64)> {
        self.points
            .iter()
            .filter(|p| p.freq_hz >= f_lo && p.freq_hz <= f_hi)
            .filter_map(|p| p.nf_db.map(|nf| (p.freq_hz, nf)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
    }
}

/// Cold-source DUT noise figure with the default reference temperature.
pub fn coldsource_extract(
    casc_gain: &GainSpectrum,
    casc_onpd: &NoiseDensitySpectrum,
    dc_gain: &GainSpectrum,
    dc_onpd: &NoiseDensitySpectrum,
    t_source: f64,
) -> Result<NfSpectrum, NoiseError> {
    coldsource_extract_with(
        casc_gain,
        casc_onpd,
        dc_gain,
        dc_onpd,
        &ColdSourceConfig {
            t_source,
            ..Default::default()
        },
    )
}

/// Extracts the DUT noise figure on the common frequency grid of the four
/// inputs (gain interpolated in dB, ONPD in linear units).
pub fn coldsource_extract_with(
    casc_gain: &GainSpectrum,
    casc_onpd: &NoiseDensitySpectrum,
    dc_gain: &GainSpectrum,
    dc_onpd: &NoiseDensitySpectrum,
    config: &ColdSourceConfig,
) -> Result<NfSpectrum, NoiseError> {
    let t_source = config.t_source;
    if !(t_source.is_finite() && t_source > 0.0) {
        return Err(NoiseError::InvalidSourceTemperature(t_source));
    }
    let grid = interp::common_grid(&[
        &casc_gain.freqs,
        &casc_onpd.freqs,
        &dc_gain.freqs,
        &dc_onpd.freqs,
    ]);
    if grid.is_empty() {
        return Err(NoiseError::NoOverlap);
    }
    let at = |freqs: &[f64], ys: &[f64], f: f64| {
        interp::interp_linear(freqs, ys, f).expect("grid lies inside every spectrum")
    };

    let mut points = Vec::with_capacity(grid.len());
    let mut diagnostics = Vec::new();
    for f in grid {
        let g_casc = 10f64.powf(at(&casc_gain.freqs, &casc_gain.gain_db, f) / 10.0);
        let g_dc = 10f64.powf(at(&dc_gain.freqs, &dc_gain.gain_db, f) / 10.0);
        let n_casc = at(&casc_onpd.freqs, &casc_onpd.onpd, f);
        let n_dc = at(&dc_onpd.freqs, &dc_onpd.onpd, f);

        let t_dc = n_dc / (K_B * g_dc) - t_source;
        if t_dc < 0.0 {
            return Err(NoiseError::BelowSourceFloor {
                which: "downconverter",
                freq_hz: f,
                temperature: t_dc,
            });
        }
        let t_casc = n_casc / (K_B * g_casc) - t_source;
        if t_casc < 0.0 {
            return Err(NoiseError::BelowSourceFloor {
                which: "cascade",
                freq_hz: f,
                temperature: t_casc,
            });
        }
        let g_dut = g_casc / g_dc;
        let t_dut = t_casc - t_dc / g_dut;
        let nf_db = if t_dut >= 0.0 {
            Some(10.0 * (1.0 + t_dut / config.t0).log10())
        } else {
            diagnostics.push(format!(
                "negative DUT noise temperature {t_dut:.6e} K at {f} Hz"
            ));
            None
        };
        points.push(NfPoint {
            freq_hz: f,
            gain_db: 10.0 * g_dut.log10(),
            noise_temperature: t_dut,
            nf_db,
        });
    }
    Ok(NfSpectrum { points, diagnostics })
}
