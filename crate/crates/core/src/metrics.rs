// SPDX-License-Identifier: Apache-2.0

//! Scalar figures of merit from measured curves: peak gain frequency,
//! 3 dB band and input-referred 1 dB compression point.

use serde::Serialize;
use thiserror::Error;

use crate::interp;

/// Points averaged for the small-signal gain reference.
pub const PLATEAU_POINTS: usize = 3;
/// Largest spread allowed across the plateau points, dB.
pub const PLATEAU_SPREAD_DB: f64 = 0.1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("gain curve needs at least {min} points, got {got}")]
    TooFewPoints { min: usize, got: usize },
    #[error("invalid curve: {0}")]
    Invalid(String),
    #[error("no small-signal region: lowest-power gain spread {spread_db:.3} dB exceeds 0.1 dB")]
    NoSmallSignalRegion { spread_db: f64 },
    #[error("P1dB not reached: gain compresses at most {max_compression_db:.3} dB within the sweep")]
    P1dbNotReached { max_compression_db: f64 },
    #[error("{x} outside [{min}, {max}]")]
    OutOfRange { x: f64, min: f64, max: f64 },
}

fn validate_xy(xs: &[f64], ys: &[f64], min: usize) -> Result<(), MetricsError> {
    if xs.len() != ys.len() {
        return Err(MetricsError::Invalid(format!(
            "{} abscissae but {} values",
            xs.len(),
            ys.len()
        )));
    }
    if xs.len() < min {
        return Err(MetricsError::TooFewPoints {
            min,
            got: xs.len(),
        });
    }
    if !interp::strictly_increasing(xs) {
        return Err(MetricsError::Invalid(
            "abscissae must be finite and strictly increasing".into(),
        ));
    }
    if ys.iter().any(|y| !y.is_finite()) {
        return Err(MetricsError::Invalid("non-finite value".into()));
    }
    Ok(())
}

/// Gain (dB) versus frequency (Hz).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GainCurve {
    freqs: Vec<f64>,
    gain_db: Vec<f64>,
}

impl GainCurve {
    pub fn new(freqs: Vec<f64>, gain_db: Vec<f64>) -> Result<Self, MetricsError> {
        validate_xy(&freqs, &gain_db, 3)?;
        Ok(GainCurve { freqs, gain_db })
    }

    pub fn freqs(&self) -> &[f64] {
        &self.freqs
    }

    pub fn gain_db(&self) -> &[f64] {
        &self.gain_db
    }
}

/// Transducer gain (dB) versus available input power (dBm).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerSweep {
    pin_dbm: Vec<f64>,
    gt_db: Vec<f64>,
}

impl PowerSweep {
    pub fn new(pin_dbm: Vec<f64>, gt_db: Vec<f64>) -> Result<Self, MetricsError> {
        validate_xy(&pin_dbm, &gt_db, 4)?;
        Ok(PowerSweep { pin_dbm, gt_db })
    }

    pub fn pin_dbm(&self) -> &[f64] {
        &self.pin_dbm
    }

    pub fn gt_db(&self) -> &[f64] {
        &self.gt_db
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BandReport {
    pub f0: f64,
    pub gain_at_f0: f64,
    pub f_low: f64,
    pub f_high: f64,
    pub bw: f64,
    /// The lower edge lies below the sweep; `f_low` is the sweep start.
    pub low_clipped: bool,
    pub high_clipped: bool,
}

/// Peak and `delta_db` band of the lobe containing the peak.
///
/// The peak is the global maximum (lowest frequency on ties). Edges are
/// where the gain falls below `max − delta_db`, linearly interpolated
/// between the bracketing samples.
pub fn band_3db(curve: &GainCurve, delta_db: f64) -> Result<BandReport, MetricsError> {
    if !(delta_db.is_finite() && delta_db > 0.0) {
        return Err(MetricsError::Invalid(format!(
            "band depth must be positive, got {delta_db}"
        )));
    }
    let f = &curve.freqs;
    let g = &curve.gain_db;
    let mut peak = 0;
    for i in 1..g.len() {
        if g[i] > g[peak] {
            peak = i;
        }
    }
    let threshold = g[peak] - delta_db;
    let cross = |inside: usize, outside: usize| {
        let t = (g[inside] - threshold) / (g[inside] - g[outside]);
        f[inside] + t * (f[outside] - f[inside])
    };

    let (f_low, low_clipped) = match (0..peak).rev().find(|&i| g[i] < threshold) {
        Some(i) => (cross(i + 1, i), false),
        None => (f[0], true),
    };
    let (f_high, high_clipped) = match (peak + 1..g.len()).find(|&i| g[i] < threshold) {
        Some(i) => (cross(i - 1, i), false),
        None => (f[f.len() - 1], true),
    };
    Ok(BandReport {
        f0: f[peak],
        gain_at_f0: g[peak],
        f_low,
        f_high,
        bw: f_high - f_low,
        low_clipped,
        high_clipped,
    })
}

/// Input-referred 1 dB compression point, dBm.
///
/// The small-signal reference is the mean gain of the three lowest-power
/// points, which must agree within 0.1 dB.
pub fn p1db(sweep: &PowerSweep) -> Result<f64, MetricsError> {
    let p = &sweep.pin_dbm;
    let g = &sweep.gt_db;
    let plateau = &g[..PLATEAU_POINTS];
    let hi = plateau.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = plateau.iter().copied().fold(f64::INFINITY, f64::min);
    if hi - lo > PLATEAU_SPREAD_DB {
        return Err(MetricsError::NoSmallSignalRegion { spread_db: hi - lo });
    }
    let reference = plateau.iter().sum::<f64>() / PLATEAU_POINTS as f64;
    let target = reference - 1.0;
    for i in 1..g.len() {
        if g[i] <= target {
            if g[i] == target {
                return Ok(p[i]);
            }
            let t = (g[i - 1] - target) / (g[i - 1] - g[i]);
            return Ok(p[i - 1] + t * (p[i] - p[i - 1]));
        }
    }
    let min_gain = g.iter().copied().fold(f64::INFINITY, f64::min);
    Err(MetricsError::P1dbNotReached {
        max_compression_db: reference - min_gain,
    })
}

/// Gain at `f` by linear interpolation in dB.
pub fn gain_at(curve: &GainCurve, f: f64) -> Result<f64, MetricsError> {
    interp::interp_linear(&curve.freqs, &curve.gain_db, f).ok_or(MetricsError::OutOfRange {
        x: f,
        min: curve.freqs[0],
        max: curve.freqs[curve.freqs.len() - 1],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn parabola(n: usize) -> GainCurve {
        let freqs: Vec<f64> = (0..n)
            .map(|i| 50e9 + 20e9 * i as f64 / (n - 1) as f64)
            .collect();
        let gain = freqs
            .iter()
            .map(|f| 15.0 - 3.0 * ((f - 59e9) / 7.5e9).powi(2))
            .collect();
        GainCurve::new(freqs, gain).unwrap()
    }

    fn compression(pc: f64, g0: f64) -> PowerSweep {
        let pin: Vec<f64> = (0..=160).map(|i| -50.0 + 0.25 * i as f64).collect();
        let gt = pin
            .iter()
            .map(|p| g0 - 10.0 * (1.0 + 10f64.powf((p - pc) / 10.0)).log10())
            .collect();
        PowerSweep::new(pin, gt).unwrap()
    }

    /// Compression knee placing the exact 1 dB crossing at `p1`.
    fn knee_for(p1: f64) -> f64 {
        p1 - 10.0 * (10f64.powf(0.1) - 1.0).log10()
    }

    #[test]
    fn parabolic_band() {
        // 15 − 3·((f − 59 GHz)/7.5 GHz)² drops 3 dB at 59 ± 7.5 GHz.
        let curve = parabola(1001);
        let r = band_3db(&curve, 3.0).unwrap();
        let step = 20e9 / 1000.0;
        assert!((r.f0 - 59e9).abs() <= step);
        assert!((r.f_low - 51.5e9).abs() <= step, "{r:?}");
        assert!((r.f_high - 66.5e9).abs() <= step, "{r:?}");
        assert!(!r.low_clipped && !r.high_clipped);
        assert_eq!(r.bw, r.f_high - r.f_low);
    }

    #[test]
    fn asymmetric_band_anchor() {
        // Two half-parabolas: peak at 59 GHz, 3 dB down at 52.5 and 67.5 GHz.
        let freqs: Vec<f64> = (0..1001).map(|i| 50e9 + 20e6 * i as f64).collect();
        let gain = freqs
            .iter()
            .map(|&f| {
                let w = if f < 59e9 { 6.5e9 } else { 8.5e9 };
                15.0 - 3.0 * ((f - 59e9) / w).powi(2)
            })
            .collect();
        let r = band_3db(&GainCurve::new(freqs, gain).unwrap(), 3.0).unwrap();
        assert!((r.f0 - 59e9).abs() <= 20e6);
        assert!((r.f_low - 52.5e9).abs() <= 20e6);
        assert!((r.f_high - 67.5e9).abs() <= 20e6);
        assert!((r.gain_at_f0 - 15.0).abs() < 1e-9);
    }

    #[test]
    fn flat_curve_is_clipped() {
        let c = GainCurve::new(vec![1.0, 2.0, 3.0, 4.0], vec![5.0; 4]).unwrap();
        let r = band_3db(&c, 3.0).unwrap();
        assert_eq!(r.f0, 1.0);
        assert_eq!((r.f_low, r.f_high), (1.0, 4.0));
        assert!(r.low_clipped && r.high_clipped);
    }

    #[test]
    fn only_peak_lobe_counts() {
        // Second lobe at 8..9 is above threshold but disconnected from the peak.
        let f: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let g = vec![0.0, 9.0, 10.0, 9.0, 0.0, 0.0, 0.0, 0.0, 9.5, 9.5];
        let r = band_3db(&GainCurve::new(f, g).unwrap(), 3.0).unwrap();
        assert_eq!(r.f0, 2.0);
        assert!((r.f_low - (1.0 - 2.0 / 9.0)).abs() < 1e-12);
        assert!((r.f_high - (3.0 + 2.0 / 9.0)).abs() < 1e-12);
        assert!(!r.high_clipped);
    }

    #[test]
    fn curve_validation() {
        assert_eq!(
            GainCurve::new(vec![1.0, 2.0], vec![0.0, 0.0]),
            Err(MetricsError::TooFewPoints { min: 3, got: 2 })
        );
        assert!(GainCurve::new(vec![1.0, 1.0, 2.0], vec![0.0; 3]).is_err());
        assert!(PowerSweep::new(vec![1.0, 2.0, 3.0], vec![0.0; 3]).is_err());
        assert!(band_3db(&parabola(11), 0.0).is_err());
    }

    #[test]
    fn p1db_anchor() {
        let sweep = compression(knee_for(-21.8), 9.9);
        let p = p1db(&sweep).unwrap();
        assert!((p + 21.8).abs() <= 0.05, "got {p}");
    }

    #[test]
    fn p1db_errors() {
        let flat = PowerSweep::new(vec![-40.0, -35.0, -30.0, -25.0], vec![10.0; 4]).unwrap();
        assert!(matches!(p1db(&flat), Err(MetricsError::P1dbNotReached { .. })));
        let noisy = PowerSweep::new(vec![-40.0, -35.0, -30.0, -25.0], vec![10.0, 10.3, 10.0, 5.0]).unwrap();
        assert!(matches!(p1db(&noisy), Err(MetricsError::NoSmallSignalRegion { .. })));
    }

    #[test]
    fn p1db_exact_sample_hit() {
        let s = PowerSweep::new(vec![-30.0, -25.0, -20.0, -15.0], vec![10.0, 10.0, 10.0, 9.0]).unwrap();
        assert_eq!(p1db(&s).unwrap(), -15.0);
    }

    #[test]
    fn gain_at_interpolates() {
        let c = GainCurve::new(vec![1.0, 2.0, 3.0], vec![10.0, 14.0, 12.0]).unwrap();
        assert_eq!(gain_at(&c, 2.0).unwrap(), 14.0);
        assert_eq!(gain_at(&c, 2.5).unwrap(), 13.0);
        assert!(matches!(gain_at(&c, 3.5), Err(MetricsError::OutOfRange { .. })));
    }

    proptest! {
        #[test]
        fn band_offset_invariant(offset in -40.0f64..40.0) {
            let c = parabola(201);
            let shifted = GainCurve::new(
                c.freqs().to_vec(),
                c.gain_db().iter().map(|g| g + offset).collect(),
            ).unwrap();
            let a = band_3db(&c, 3.0).unwrap();
            let b = band_3db(&shifted, 3.0).unwrap();
            prop_assert_eq!(a.f0, b.f0);
            prop_assert!((a.f_low - b.f_low).abs() < 1e-3);
            prop_assert!((a.f_high - b.f_high).abs() < 1e-3);
        }

        #[test]
        fn p1db_offset_and_extension_invariant(
            p1 in -35.0f64..-15.0, g0 in 0.0f64..30.0, offset in -10.0f64..10.0, extra in 1usize..10,
        ) {
            let sweep = compression(knee_for(p1), g0);
            let base = p1db(&sweep).unwrap();
            prop_assert!(base > sweep.pin_dbm()[0] && base < *sweep.pin_dbm().last().unwrap());

            let shifted = PowerSweep::new(
                sweep.pin_dbm().to_vec(),
                sweep.gt_db().iter().map(|g| g + offset).collect(),
            ).unwrap();
            prop_assert!((p1db(&shifted).unwrap() - base).abs() < 1e-9);

            let mut pin = sweep.pin_dbm().to_vec();
            let mut gt = sweep.gt_db().to_vec();
            for k in 1..=extra {
                pin.push(pin.last().unwrap() + 1.0);
                gt.push(gt.last().unwrap() - 0.5 * k as f64);
            }
            let longer = PowerSweep::new(pin, gt).unwrap();
            prop_assert_eq!(p1db(&longer).unwrap(), base);
        }
    }
}
