// SPDX-License-Identifier: Apache-2.0

//! Cryogenic bias and passive-component helpers.
//!
//! Bias: the operating point is held at a constant drain current density
//! J (mA/µm) across temperature by retuning the back-gate voltage. The
//! required voltage is read off measured transfer characteristics
//! ([`IVTable`]) by monotone linear interpolation; no device model is fitted.
//!
//! Passives: inductance, quality factor and coupling of a two-port
//! transformer are taken from its Z-parameters using the series-branch
//! convention (`L = Im Z_ii / ω`, `Q = Im Z_ii / Re Z_ii`,
//! `M = Im Z21 / ω`). Y-based definitions (`L = −1/(ω Im Y_ii)`) give
//! different numbers for strongly coupled windings and are not used here.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::interp;
use crate::network::{self, NetworkError, RepresentationKind, TwoPortNetwork};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CryoError {
    #[error("invalid I-V table: {0}")]
    InvalidTable(String),
    #[error("I-V table is not monotone: {0}")]
    NonMonotone(String),
    #[error("bias unreachable: target {target_a:e} A outside table range [{min_a:e}, {max_a:e}] A")]
    BiasUnreachable { target_a: f64, min_a: f64, max_a: f64 },
    #[error("{what} must be positive, got {value}")]
    NonPositive { what: &'static str, value: f64 },
    #[error("cannot extract inductance at zero frequency")]
    ZeroFrequency,
    #[error("frequency grids do not overlap")]
    NoOverlap,
    #[error(transparent)]
    Network(#[from] NetworkError),
}

fn positive(what: &'static str, value: f64) -> Result<f64, CryoError> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(CryoError::NonPositive { what, value })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    N,
    P,
}

impl FromStr for Polarity {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "n" | "nmos" => Ok(Polarity::N),
            "p" | "pmos" => Ok(Polarity::P),
            other => Err(format!("unknown polarity '{other}'")),
        }
    }
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Polarity::N => "n",
            Polarity::P => "p",
        })
    }
}

/// Drain current versus back-gate voltage at fixed V_GS, V_DS and temperature.
///
/// Voltages are stored in increasing order. For n-type devices the current
/// increases with the back-gate voltage; p-type tables keep signed
/// (negative) voltages and currents, and |I_D| grows as V_BG decreases.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IVTable {
    v_backgate: Vec<f64>,
    i_drain: Vec<f64>,
    pub v_gs: f64,
    pub v_ds: f64,
    pub temperature: f64,
    /// Total gate width, µm.
    pub width: f64,
    pub polarity: Polarity,
}

impl IVTable {
    pub fn new(
        v_backgate: Vec<f64>,
        i_drain: Vec<f64>,
        v_gs: f64,
        v_ds: f64,
        temperature: f64,
        width: f64,
        polarity: Polarity,
    ) -> Result<Self, CryoError> {
        if v_backgate.len() != i_drain.len() {
            return Err(CryoError::InvalidTable(format!(
                "{} voltages but {} currents",
                v_backgate.len(),
                i_drain.len()
            )));
        }
        if v_backgate.len() < 2 {
            return Err(CryoError::InvalidTable("at least two samples required".into()));
        }
        positive("gate width", width)?;
        if !interp::strictly_increasing(&v_backgate) {
            return Err(CryoError::InvalidTable(
                "back-gate voltages must be finite and strictly increasing".into(),
            ));
        }
        if i_drain.iter().any(|i| !i.is_finite()) {
            return Err(CryoError::InvalidTable("non-finite current".into()));
        }
        let mag: Vec<f64> = i_drain.iter().map(|i| i.abs()).collect();
        let ok = match polarity {
            Polarity::N => mag.windows(2).all(|w| w[0] < w[1]),
            Polarity::P => mag.windows(2).all(|w| w[0] > w[1]),
        };
        if !ok {
            return Err(CryoError::NonMonotone(match polarity {
                Polarity::N => "n-type |I_D| must increase with V_BG".into(),
                Polarity::P => "p-type |I_D| must increase as V_BG decreases".into(),
            }));
        }
        Ok(IVTable {
            v_backgate,
            i_drain,
            v_gs,
            v_ds,
            temperature,
            width,
            polarity,
        })
    }

    pub fn v_backgate(&self) -> &[f64] {
        &self.v_backgate
    }

    pub fn i_drain(&self) -> &[f64] {
        &self.i_drain
    }

    /// Interpolated drain current at `v`, or `None` outside the table.
    pub fn current_at(&self, v: f64) -> Option<f64> {
        interp::interp_linear(&self.v_backgate, &self.i_drain, v)
    }
}

/// Back-gate voltage giving drain current density `j_target` (mA/µm).
///
/// The target magnitude `|I| = J·W` is bracketed by bisection over the
/// monotone samples and the piecewise-linear characteristic is inverted
/// exactly inside the bracket; a target equal to a sample returns that
/// sample's voltage.
pub fn solve_backgate(table: &IVTable, j_target: f64) -> Result<f64, CryoError> {
    positive("current density", j_target)?;
    let target = j_target * table.width * 1e-3;
    let v = &table.v_backgate;
    // Magnitudes ordered so that they increase with the index.
    let n = v.len();
    let idx = |k: usize| match table.polarity {
        Polarity::N => k,
        Polarity::P => n - 1 - k,
    };
    let mag = |k: usize| table.i_drain[idx(k)].abs();
    let (lo_mag, hi_mag) = (mag(0), mag(n - 1));
    if !(target >= lo_mag && target <= hi_mag) {
        return Err(CryoError::BiasUnreachable {
            target_a: target,
            min_a: lo_mag,
            max_a: hi_mag,
        });
    }

    let (mut lo, mut hi) = (0usize, n - 1);
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if mag(mid) <= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if mag(lo) == target {
        return Ok(v[idx(lo)]);
    }
    if mag(hi) == target {
        return Ok(v[idx(hi)]);
    }
    let t = (target - mag(lo)) / (mag(hi) - mag(lo));
    Ok(v[idx(lo)] + t * (v[idx(hi)] - v[idx(lo)]))
}

/// Total supply current (mA) from supply voltage (V) and DC power (mW).
pub fn current_budget(v_dd: f64, p_dc_mw: f64) -> Result<f64, CryoError> {
    Ok(positive("DC power", p_dc_mw)? / positive("supply voltage", v_dd)?)
}

/// Current density (mA/µm).
pub fn density(i_ma: f64, width_um: f64) -> Result<f64, CryoError> {
    Ok(positive("current", i_ma)? / positive("gate width", width_um)?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BiasPoint {
    pub v_dd: f64,
    pub v_ds: f64,
    /// mA/µm
    pub j_target: f64,
    /// mW
    pub p_dc: f64,
    pub v_backgate_n: f64,
    pub v_backgate_p: f64,
}

impl BiasPoint {
    /// Solves both back-gates for `j_target`, with `V_DS = V_DD / 2`.
    pub fn solve(
        v_dd: f64,
        j_target: f64,
        p_dc: f64,
        n_table: &IVTable,
        p_table: &IVTable,
    ) -> Result<Self, CryoError> {
        positive("supply voltage", v_dd)?;
        positive("DC power", p_dc)?;
        if n_table.polarity != Polarity::N || p_table.polarity != Polarity::P {
            return Err(CryoError::InvalidTable(
                "expected one n-type and one p-type table".into(),
            ));
        }
        Ok(BiasPoint {
            v_dd,
            v_ds: v_dd / 2.0,
            j_target,
            p_dc,
            v_backgate_n: solve_backgate(n_table, j_target)?,
            v_backgate_p: solve_backgate(p_table, j_target)?,
        })
    }
}

/// L, Q and coupling of a two-port transformer at one frequency.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoupledInductorParams {
    pub freq: f64,
    pub l1: f64,
    pub l2: f64,
    pub m: f64,
    /// Omitted where either self-inductance is not positive.
    pub k: Option<f64>,
    pub q1: f64,
    pub q2: f64,
}

pub fn extract_lqk(net: &TwoPortNetwork) -> Result<Vec<CoupledInductorParams>, CryoError> {
    let z = network::convert(net, RepresentationKind::Z)?;
    net.freqs()
        .iter()
        .zip(&z)
        .map(|(&f, z)| {
            let w = 2.0 * PI * f;
            if w == 0.0 {
                return Err(CryoError::ZeroFrequency);
            }
            let (z11, z22, z21) = (z.get(0, 0), z.get(1, 1), z.get(1, 0));
            let l1 = z11.im / w;
            let l2 = z22.im / w;
            let m = z21.im / w;
            let k = (l1 > 0.0 && l2 > 0.0).then(|| m / (l1 * l2).sqrt());
            Ok(CoupledInductorParams {
                freq: f,
                l1,
                l2,
                m,
                k,
                q1: z11.im / z11.re,
                q2: z22.im / z22.re,
            })
        })
        .collect()
}

/// Cryogenic-minus-room-temperature changes at one frequency.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PassiveDelta {
    pub freq: f64,
    pub dq1_pct: f64,
    pub dq2_pct: f64,
    pub dl1_pct: f64,
    pub dl2_pct: f64,
    pub dk: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PassiveComparison {
    pub deltas: Vec<PassiveDelta>,
    pub median_dq_pct: f64,
    pub median_dl_pct: f64,
    pub q_increased: bool,
    pub l_decreased: bool,
}

fn pct(new: f64, old: f64) -> f64 {
    100.0 * (new - old) / old
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.retain(|x| x.is_finite());
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        (xs[n / 2 - 1] + xs[n / 2]) / 2.0
    }
}

/// Compares a cryogenic measurement `ct` against room temperature `rt` on
/// their common frequency grid.
pub fn compare_passive(rt: &TwoPortNetwork, ct: &TwoPortNetwork) -> Result<PassiveComparison, CryoError> {
    let (rt, ct) = match network::align(rt, ct) {
        Ok(pair) => pair,
        Err(NetworkError::DisjointGrids) => return Err(CryoError::NoOverlap),
        Err(e) => return Err(e.into()),
    };
    let a = extract_lqk(&rt)?;
    let b = extract_lqk(&ct)?;
    let deltas: Vec<PassiveDelta> = a
        .iter()
        .zip(&b)
        .map(|(r, c)| PassiveDelta {
            freq: r.freq,
            dq1_pct: pct(c.q1, r.q1),
            dq2_pct: pct(c.q2, r.q2),
            dl1_pct: pct(c.l1, r.l1),
            dl2_pct: pct(c.l2, r.l2),
            dk: r.k.zip(c.k).map(|(kr, kc)| kc - kr),
        })
        .collect();
    let median_dq_pct = median(deltas.iter().flat_map(|d| [d.dq1_pct, d.dq2_pct]).collect());
    let median_dl_pct = median(deltas.iter().flat_map(|d| [d.dl1_pct, d.dl2_pct]).collect());
    Ok(PassiveComparison {
        deltas,
        median_dq_pct,
        median_dl_pct,
        q_increased: median_dq_pct > 0.0,
        l_decreased: median_dl_pct < 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::Mat2;
    use num_complex::Complex64;
    use proptest::prelude::*;

    /// I = K·W·max(0, V_GS + α·V_BG − V_t)², sampled on `v`.
    fn square_law(v: &[f64], k: f64, w: f64, vgs: f64, alpha: f64, vt: f64) -> Vec<f64> {
        v.iter()
            .map(|vb| k * w * (vgs + alpha * vb - vt).max(0.0).powi(2))
            .collect()
    }

    fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
    }

    fn n_table(vt: f64) -> IVTable {
        let v = grid(0.0, 2.0, 4001);
        let i = square_law(&v, 1e-3, 3.9, 0.45, 0.08, vt);
        IVTable::new(v, i, 0.45, 0.44, 2.0, 3.9, Polarity::N).unwrap()
    }

    /// Coupled-inductor Z = [[r1 + jωL1, jωM], [jωM, r2 + jωL2]] as a network.
    fn transformer(freqs: &[f64], l1: f64, l2: f64, m: f64, r1: f64, r2: f64) -> TwoPortNetwork {
        let z: Vec<Mat2> = freqs
            .iter()
            .map(|f| {
                let w = 2.0 * PI * f;
                Mat2::new(
                    Complex64::new(r1, w * l1),
                    Complex64::new(0.0, w * m),
                    Complex64::new(0.0, w * m),
                    Complex64::new(r2, w * l2),
                )
            })
            .collect();
        TwoPortNetwork::from_representation(RepresentationKind::Z, freqs.to_vec(), &z, 50.0, "T")
            .unwrap()
    }

    #[test]
    fn grid_target_returns_grid_voltage() {
        let t = IVTable::new(
            vec![0.0, 0.5, 1.0],
            vec![1e-4, 4e-4, 9e-4],
            0.4,
            0.44,
            300.0,
            2.0,
            Polarity::N,
        )
        .unwrap();
        // 4e-4 A over 2 µm = 0.2 mA/µm
        assert_eq!(solve_backgate(&t, 0.2).unwrap(), 0.5);
        assert_eq!(solve_backgate(&t, 0.05).unwrap(), 0.0);
        assert!(matches!(solve_backgate(&t, 1.0), Err(CryoError::BiasUnreachable { .. })));
        assert!(matches!(solve_backgate(&t, 0.01), Err(CryoError::BiasUnreachable { .. })));
    }

    #[test]
    fn square_law_closed_form() {
        let (k, w, vgs, alpha, vt): (f64, f64, f64, f64, f64) = (1e-3, 3.9, 0.45, 0.08, 0.4);
        let t = n_table(vt);
        for j in [0.005, 0.01, 0.03, 0.044] {
            let i = j * w * 1e-3;
            let exact = ((i / (k * w)).sqrt() + vt - vgs) / alpha;
            let got = solve_backgate(&t, j).unwrap();
            assert!((got - exact).abs() < 1e-6, "j={j}: {got} vs {exact}");
        }
    }

    #[test]
    fn threshold_shift_maps_to_backgate_shift() {
        let (alpha, dvt) = (0.08, 0.02);
        let a = solve_backgate(&n_table(0.40), 0.02).unwrap();
        let b = solve_backgate(&n_table(0.40 + dvt), 0.02).unwrap();
        assert!(((b - a) - dvt / alpha).abs() < 1e-6);
    }

    #[test]
    fn p_type_table() {
        // Signed: V_P negative, I_D negative, |I_D| grows as V_P goes more negative.
        let v = grid(-1.5, 0.0, 301);
        let i: Vec<f64> = v.iter().map(|vb| -2e-3 * (0.3 - 0.1 * vb).powi(2)).collect();
        let t = IVTable::new(v, i, -0.44, -0.44, 2.0, 3.9, Polarity::P).unwrap();
        let j = 0.1;
        let target: f64 = j * 3.9 * 1e-3;
        let exact = (0.3 - (target / 2e-3).sqrt()) / 0.1;
        let got = solve_backgate(&t, j).unwrap();
        assert!((got - exact).abs() < 1e-4, "{got} vs {exact}");
        assert!(got < 0.0);
    }

    #[test]
    fn table_validation() {
        let mk = |v: Vec<f64>, i: Vec<f64>, p| IVTable::new(v, i, 0.0, 0.0, 300.0, 1.0, p);
        assert!(matches!(
            mk(vec![0.0, 1.0, 2.0], vec![1.0, 3.0, 2.0], Polarity::N),
            Err(CryoError::NonMonotone(_))
        ));
        assert!(matches!(
            mk(vec![0.0, 1.0], vec![-1.0, -2.0], Polarity::P),
            Err(CryoError::NonMonotone(_))
        ));
        assert!(mk(vec![1.0, 0.0], vec![1.0, 2.0], Polarity::N).is_err());
        assert!(mk(vec![0.0], vec![1.0], Polarity::N).is_err());
        assert!(IVTable::new(vec![0.0, 1.0], vec![1.0, 2.0], 0.0, 0.0, 300.0, 0.0, Polarity::N).is_err());
    }

    #[test]
    fn bias_point_solves_both_devices() {
        let n = IVTable::new(vec![0.0, 1.0], vec![0.0, 1e-3], 0.0, 0.44, 2.0, 3.9, Polarity::N).unwrap();
        let p = IVTable::new(vec![-1.0, 0.0], vec![-1e-3, 0.0], 0.0, -0.44, 2.0, 3.9, Polarity::P).unwrap();
        let bp = BiasPoint::solve(0.88, 0.21, 2.16, &n, &p).unwrap();
        assert_eq!(bp.v_ds, 0.44);
        assert!((bp.v_backgate_n - 0.819).abs() < 1e-12);
        assert!((bp.v_backgate_p + 0.819).abs() < 1e-12);
        assert!(BiasPoint::solve(0.88, 0.21, 2.16, &p, &n).is_err());
    }

    #[test]
    fn supply_arithmetic() {
        assert!((current_budget(0.88, 2.16).unwrap() - 2.454_545_454_545).abs() < 1e-9);
        assert!((current_budget(0.8, 1.40).unwrap() - 1.75).abs() < 1e-12);
        assert!((density(0.819, 3.9).unwrap() - 0.21).abs() < 1e-12);
        assert!(current_budget(0.0, 1.0).is_err());
        assert!(density(1.0, -3.9).is_err());
    }

    #[test]
    fn lossless_coupled_inductors() {
        let (l1, l2) = (100e-12, 100e-12);
        let m = 0.7 * 100e-12;
        let freqs = grid(10e9, 70e9, 7);
        let p = extract_lqk(&transformer(&freqs, l1, l2, m, 0.0, 0.0)).unwrap();
        for x in &p {
            assert!((x.l1 - l1).abs() < 1e-12 * l1);
            assert!((x.l2 - l2).abs() < 1e-12 * l2);
            assert!((x.m - m).abs() < 1e-12 * m);
            assert!((x.k.unwrap() - 0.7).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_coupling_and_series_loss() {
        let freqs = [20e9, 40e9];
        let (l1, r) = (200e-12, 2.0);
        let p = extract_lqk(&transformer(&freqs, l1, 150e-12, 0.0, r, 3.0)).unwrap();
        for x in &p {
            assert!(x.k.unwrap().abs() < 1e-12);
            let q = 2.0 * PI * x.freq * l1 / r;
            assert!((x.q1 - q).abs() < 1e-9 * q);
        }
    }

    #[test]
    fn capacitive_branch_omits_k() {
        // Negative reactance on port 1 gives a negative "inductance".
        let z = vec![Mat2::new(
            Complex64::new(1.0, -30.0),
            Complex64::new(0.0, 5.0),
            Complex64::new(0.0, 5.0),
            Complex64::new(1.0, 40.0),
        )];
        let net = TwoPortNetwork::from_representation(RepresentationKind::Z, vec![1e9], &z, 50.0, "c").unwrap();
        let p = extract_lqk(&net).unwrap();
        assert!(p[0].l1 < 0.0);
        assert_eq!(p[0].k, None);
    }

    #[test]
    fn zero_frequency_rejected() {
        let net = transformer(&[0.0, 1e9], 1e-10, 1e-10, 0.0, 1.0, 1.0);
        assert_eq!(extract_lqk(&net), Err(CryoError::ZeroFrequency));
    }

    #[test]
    fn compare_constructed_pair() {
        let freqs = grid(40e9, 80e9, 9);
        let (l1, l2, k, r1, r2): (f64, f64, f64, f64, f64) = (120e-12, 90e-12, 0.6, 3.0, 2.5);
        let m = k * (l1 * l2).sqrt();
        let rt = transformer(&freqs, l1, l2, m, r1, r2);
        // Q×1.5, L×0.9: r scales by 0.9/1.5.
        let s = 0.9 / 1.5;
        let ct = transformer(&freqs, 0.9 * l1, 0.9 * l2, 0.9 * m, s * r1, s * r2);
        let cmp = compare_passive(&rt, &ct).unwrap();
        for d in &cmp.deltas {
            assert!((d.dq1_pct - 50.0).abs() < 1e-8);
            assert!((d.dq2_pct - 50.0).abs() < 1e-8);
            assert!((d.dl1_pct + 10.0).abs() < 1e-8);
            assert!((d.dl2_pct + 10.0).abs() < 1e-8);
            assert!(d.dk.unwrap().abs() < 1e-12);
        }
        assert!(cmp.q_increased && cmp.l_decreased);

        let swapped = compare_passive(&ct, &rt).unwrap();
        assert!(!swapped.q_increased && !swapped.l_decreased);
        assert!(swapped.median_dq_pct < 0.0 && swapped.median_dl_pct > 0.0);

        let same = compare_passive(&rt, &rt).unwrap();
        assert!(same.deltas.iter().all(|d| d.dq1_pct == 0.0 && d.dl2_pct == 0.0 && d.dk == Some(0.0)));

        let far = transformer(&[100e9, 110e9], l1, l2, m, r1, r2);
        assert_eq!(compare_passive(&rt, &far), Err(CryoError::NoOverlap));
    }

    proptest! {
        #[test]
        fn solver_is_right_inverse_on_grid(idx in 0usize..4001) {
            let t = n_table(0.4);
            let v = t.v_backgate()[idx];
            let i = t.current_at(v).unwrap();
            prop_assume!(i > 0.0);
            let j = density(i * 1e3, t.width).unwrap();
            let back = solve_backgate(&t, j).unwrap();
            prop_assert!((back - v).abs() < 1e-9);
        }

        #[test]
        fn budget_is_homogeneous(p in 0.01f64..100.0, v in 0.1f64..5.0, w in 0.1f64..100.0) {
            let i = current_budget(v, p).unwrap();
            prop_assert!((current_budget(v, 2.0 * p).unwrap() - 2.0 * i).abs() <= 1e-15 * i);
            prop_assert!((density(i, 2.0 * w).unwrap() - density(i, w).unwrap() / 2.0).abs() <= 1e-15 * i / w);
        }

        #[test]
        fn lqk_round_trip_and_k_bound(
            l1 in 10e-12f64..1e-9, l2 in 10e-12f64..1e-9, k in 0.0f64..1.0,
            r1 in 0.0f64..20.0, r2 in 0.0f64..20.0, f in 1e9f64..100e9,
        ) {
            let m = k * (l1 * l2).sqrt();
            let p = &extract_lqk(&transformer(&[f], l1, l2, m, r1, r2)).unwrap()[0];
            prop_assert!((p.l1 - l1).abs() <= 1e-9 * l1);
            prop_assert!((p.l2 - l2).abs() <= 1e-9 * l2);
            let kk = p.k.unwrap();
            prop_assert!((0.0..=1.0 + 1e-9).contains(&(kk + 1e-12)));
        }
    }
}
