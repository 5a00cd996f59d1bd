// SPDX-License-Identifier: Apache-2.0

//! Two-port network algebra.
//!
//! A [`TwoPortNetwork`] stores S-parameters on a strictly increasing frequency
//! grid with a single real reference impedance shared by both ports. Every
//! other representation is derived on demand through [`convert`].
//!
//! T-parameters follow the cascade convention `[a1, b1]ᵀ = T·[b2, a2]ᵀ`, so
//! that `T(cascade(a, b)) = T(a)·T(b)`.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::interp::{self, Locate};

/// Denominators below this magnitude are treated as singular.
pub const SINGULAR_TOL: f64 = 1e-300;

/// Tolerance used by [`check_passivity`] and [`check_reciprocity`].
pub const CONSISTENCY_TOL: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NetworkError {
    #[error("invalid network: {0}")]
    Invalid(String),
    #[error("singular {kind} conversion at {freq_hz} Hz")]
    Singular {
        kind: RepresentationKind,
        freq_hz: f64,
    },
    #[error("singular fixture at {freq_hz} Hz")]
    SingularFixture { freq_hz: f64 },
    #[error("reference impedance mismatch: {0} Ω vs {1} Ω")]
    ReferenceMismatch(f64, f64),
    #[error("frequency grids differ; resample onto a common grid first")]
    GridMismatch,
    #[error("frequency grids do not overlap")]
    DisjointGrids,
    #[error("frequency {freq_hz} Hz outside [{min_hz}, {max_hz}] Hz")]
    OutOfRange {
        freq_hz: f64,
        min_hz: f64,
        max_hz: f64,
    },
    #[error("reference impedance must be positive and finite, got {0}")]
    InvalidImpedance(f64),
}

/// 2×2 complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mat2(pub [[Complex64; 2]; 2]);

impl Mat2 {
    pub const fn new(m11: Complex64, m12: Complex64, m21: Complex64, m22: Complex64) -> Self {
        Mat2([[m11, m12], [m21, m22]])
    }

    pub fn from_real(m: [[f64; 2]; 2]) -> Self {
        Mat2::new(
            m[0][0].into(),
            m[0][1].into(),
            m[1][0].into(),
            m[1][1].into(),
        )
    }

    pub fn identity() -> Self {
        Mat2::from_real([[1.0, 0.0], [0.0, 1.0]])
    }

    pub fn zeros() -> Self {
        Mat2::from_real([[0.0; 2]; 2])
    }

    /// The ideal through connection in S-parameters.
    pub fn thru() -> Self {
        Mat2::from_real([[0.0, 1.0], [1.0, 0.0]])
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.0[row][col]
    }

    pub fn det(&self) -> Complex64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn scale(&self, k: Complex64) -> Self {
        let m = &self.0;
        Mat2::new(m[0][0] * k, m[0][1] * k, m[1][0] * k, m[1][1] * k)
    }

    /// Inverse, or `None` when `|det| < SINGULAR_TOL`.
    pub fn inverse(&self) -> Option<Self> {
        let det = self.det();
        if det.norm().is_nan() || det.norm() < SINGULAR_TOL {
            return None;
        }
        let m = &self.0;
        Some(Mat2::new(m[1][1] / det, -m[0][1] / det, -m[1][0] / det, m[0][0] / det))
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flat_map(|r| r.iter())
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }

    /// Largest singular value: top eigenvalue of the Hermitian `SᴴS`.
    pub fn sigma_max(&self) -> f64 {
        let m = &self.0;
        let a = m[0][0].norm_sqr() + m[1][0].norm_sqr();
        let d = m[0][1].norm_sqr() + m[1][1].norm_sqr();
        let b = m[0][0].conj() * m[0][1] + m[1][0].conj() * m[1][1];
        let half = (a - d) / 2.0;
        ((a + d) / 2.0 + half.hypot(b.norm())).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.0
            .iter()
            .flat_map(|r| r.iter())
            .all(|c| c.re.is_finite() && c.im.is_finite())
    }

    fn lerp(&self, other: &Mat2, t: f64) -> Mat2 {
        let mut out = *self;
        for (r, row) in out.0.iter_mut().enumerate() {
            for (c, v) in row.iter_mut().enumerate() {
                let a = self.0[r][c];
                let b = other.0[r][c];
                *v = Complex64::new(a.re + t * (b.re - a.re), a.im + t * (b.im - a.im));
            }
        }
        out
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, rhs: Mat2) -> Mat2 {
        let a = &self.0;
        let b = &rhs.0;
        Mat2::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, rhs: Mat2) -> Mat2 {
        let mut out = self;
        for r in 0..2 {
            for c in 0..2 {
                out.0[r][c] += rhs.0[r][c];
            }
        }
        out
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, rhs: Mat2) -> Mat2 {
        let mut out = self;
        for r in 0..2 {
            for c in 0..2 {
                out.0[r][c] -= rhs.0[r][c];
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RepresentationKind {
    S,
    Z,
    Y,
    Abcd,
    T,
}

impl RepresentationKind {
    pub const ALL: [RepresentationKind; 5] = [
        RepresentationKind::S,
        RepresentationKind::Z,
        RepresentationKind::Y,
        RepresentationKind::Abcd,
        RepresentationKind::T,
    ];
}

impl fmt::Display for RepresentationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RepresentationKind::S => "S",
            RepresentationKind::Z => "Z",
            RepresentationKind::Y => "Y",
            RepresentationKind::Abcd => "ABCD",
            RepresentationKind::T => "T",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for RepresentationKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "s" => Ok(RepresentationKind::S),
            "z" => Ok(RepresentationKind::Z),
            "y" => Ok(RepresentationKind::Y),
            "abcd" => Ok(RepresentationKind::Abcd),
            "t" => Ok(RepresentationKind::T),
            other => Err(format!("unknown representation '{other}'")),
        }
    }
}

fn nonzero(c: Complex64) -> bool {
    c.norm() >= SINGULAR_TOL
}

/// Converts one S-matrix into `kind`. `None` when the conversion is singular.
pub fn s_to(kind: RepresentationKind, s: &Mat2, z0: f64) -> Option<Mat2> {
    let one = Mat2::identity();
    let z0c = Complex64::from(z0);
    let [[s11, s12], [s21, s22]] = s.0;
    match kind {
        RepresentationKind::S => Some(*s),
        // Z = z0 (I + S)(I - S)^-1
        RepresentationKind::Z => Some(((one + *s) * (one - *s).inverse()?).scale(z0c)),
        // Y = (I - S)(I + S)^-1 / z0
        RepresentationKind::Y => Some(((one - *s) * (one + *s).inverse()?).scale(1.0 / z0c)),
        RepresentationKind::Abcd => {
            if !nonzero(s21) {
                return None;
            }
            let den = 2.0 * s21;
            let dp = s12 * s21;
            Some(Mat2::new(
                ((1.0 + s11) * (1.0 - s22) + dp) / den,
                z0c * ((1.0 + s11) * (1.0 + s22) - dp) / den,
                ((1.0 - s11) * (1.0 - s22) - dp) / (den * z0c),
                ((1.0 - s11) * (1.0 + s22) + dp) / den,
            ))
        }
        RepresentationKind::T => {
            if !nonzero(s21) {
                return None;
            }
            Some(Mat2::new(1.0 / s21, -s22 / s21, s11 / s21, -s.det() / s21))
        }
    }
}

/// Converts one matrix of representation `kind` back to S.
pub fn to_s(kind: RepresentationKind, m: &Mat2, z0: f64) -> Option<Mat2> {
    let one = Mat2::identity();
    let z0c = Complex64::from(z0);
    match kind {
        RepresentationKind::S => Some(*m),
        // S = (Z - z0 I)(Z + z0 I)^-1
        RepresentationKind::Z => {
            let zi = one.scale(z0c);
            Some((*m - zi) * (*m + zi).inverse()?)
        }
        // S = (I - z0 Y)(I + z0 Y)^-1
        RepresentationKind::Y => {
            let yz = m.scale(z0c);
            Some((one - yz) * (one + yz).inverse()?)
        }
        RepresentationKind::Abcd => {
            let [[a, b], [c, d]] = m.0;
            let den = a + b / z0c + c * z0c + d;
            if !nonzero(den) {
                return None;
            }
            Some(Mat2::new(
                (a + b / z0c - c * z0c - d) / den,
                2.0 * m.det() / den,
                2.0 / den,
                (-a + b / z0c - c * z0c + d) / den,
            ))
        }
        RepresentationKind::T => {
            let [[t11, t12], [t21, _]] = m.0;
            if !nonzero(t11) {
                return None;
            }
            Some(Mat2::new(t21 / t11, m.det() / t11, 1.0 / t11, -t12 / t11))
        }
    }
}

/// Frequency-indexed two-port S-parameters with a real reference impedance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoPortNetwork {
    freqs: Vec<f64>,
    s: Vec<Mat2>,
    z0: f64,
    pub label: String,
}

impl TwoPortNetwork {
    pub fn new(
        freqs: Vec<f64>,
        s: Vec<Mat2>,
        z0: f64,
        label: impl Into<String>,
    ) -> Result<Self, NetworkError> {
        if freqs.is_empty() {
            return Err(NetworkError::Invalid("no frequency points".into()));
        }
        if freqs.len() != s.len() {
            return Err(NetworkError::Invalid(format!(
                "{} frequencies but {} matrices",
                freqs.len(),
                s.len()
            )));
        }
        if !interp::strictly_increasing(&freqs) {
            return Err(NetworkError::Invalid(
                "frequencies must be finite and strictly increasing".into(),
            ));
        }
        check_z0(z0)?;
        Ok(TwoPortNetwork {
            freqs,
            s,
            z0,
            label: label.into(),
        })
    }

    /// Builds a network from matrices given in any representation.
    pub fn from_representation(
        kind: RepresentationKind,
        freqs: Vec<f64>,
        mats: &[Mat2],
        z0: f64,
        label: impl Into<String>,
    ) -> Result<Self, NetworkError> {
        check_z0(z0)?;
        if freqs.len() != mats.len() {
            return Err(NetworkError::Invalid(format!(
                "{} frequencies but {} matrices",
                freqs.len(),
                mats.len()
            )));
        }
        let s = freqs
            .iter()
            .zip(mats)
            .map(|(&f, m)| to_s(kind, m, z0).ok_or(NetworkError::Singular { kind, freq_hz: f }))
            .collect::<Result<Vec<_>, _>>()?;
        TwoPortNetwork::new(freqs, s, z0, label)
    }

    /// Ideal thru on the given grid.
    pub fn thru(freqs: Vec<f64>, z0: f64) -> Result<Self, NetworkError> {
        let s = vec![Mat2::thru(); freqs.len()];
        TwoPortNetwork::new(freqs, s, z0, "thru")
    }

    pub fn freqs(&self) -> &[f64] {
        &self.freqs
    }

    pub fn s(&self) -> &[Mat2] {
        &self.s
    }

    pub fn z0(&self) -> f64 {
        self.z0
    }

    pub fn len(&self) -> usize {
        self.freqs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.freqs.is_empty()
    }

    /// |S21| in dB at each frequency.
    pub fn s21_db(&self) -> Vec<f64> {
        self.s.iter().map(|m| 20.0 * m.get(1, 0).norm().log10()).collect()
    }

    /// Linearly interpolated (real and imaginary parts independently) S-matrix.
    pub fn at_frequency(&self, f: f64) -> Result<Mat2, NetworkError> {
        match interp::locate(&self.freqs, f) {
            Locate::Exact(i) => Ok(self.s[i]),
            Locate::Between(i, t) => Ok(self.s[i].lerp(&self.s[i + 1], t)),
            Locate::OutOfRange => Err(NetworkError::OutOfRange {
                freq_hz: f,
                min_hz: self.freqs[0],
                max_hz: self.freqs[self.freqs.len() - 1],
            }),
        }
    }

    /// Re-samples onto `grid`, which must lie inside this network's range.
    pub fn resample(&self, grid: &[f64]) -> Result<Self, NetworkError> {
        let s = grid
            .iter()
            .map(|&f| self.at_frequency(f))
            .collect::<Result<Vec<_>, _>>()?;
        TwoPortNetwork::new(grid.to_vec(), s, self.z0, self.label.clone())
    }

    fn abcd_at(&self, i: usize) -> Option<Mat2> {
        s_to(RepresentationKind::Abcd, &self.s[i], self.z0)
    }
}

fn check_z0(z0: f64) -> Result<(), NetworkError> {
    if z0.is_finite() && z0 > 0.0 {
        Ok(())
    } else {
        Err(NetworkError::InvalidImpedance(z0))
    }
}

/// Matrices of `net` in representation `kind`, one per frequency.
pub fn convert(net: &TwoPortNetwork, kind: RepresentationKind) -> Result<Vec<Mat2>, NetworkError> {
    net.freqs
        .iter()
        .zip(&net.s)
        .map(|(&f, s)| s_to(kind, s, net.z0).ok_or(NetworkError::Singular { kind, freq_hz: f }))
        .collect()
}

fn check_binary(a: &TwoPortNetwork, b: &TwoPortNetwork) -> Result<(), NetworkError> {
    if a.z0 != b.z0 {
        return Err(NetworkError::ReferenceMismatch(a.z0, b.z0));
    }
    if a.freqs != b.freqs {
        if interp::common_grid(&[&a.freqs, &b.freqs]).is_empty() {
            return Err(NetworkError::DisjointGrids);
        }
        return Err(NetworkError::GridMismatch);
    }
    Ok(())
}

/// Re-samples both networks onto the union of their grid points inside the
/// overlapping frequency range.
pub fn align(
    a: &TwoPortNetwork,
    b: &TwoPortNetwork,
) -> Result<(TwoPortNetwork, TwoPortNetwork), NetworkError> {
    let grid = interp::common_grid(&[&a.freqs, &b.freqs]);
    if grid.is_empty() {
        return Err(NetworkError::DisjointGrids);
    }
    Ok((a.resample(&grid)?, b.resample(&grid)?))
}

/// `a` followed by `b`: ABCD(a)·ABCD(b), returned as S.
pub fn cascade(a: &TwoPortNetwork, b: &TwoPortNetwork) -> Result<TwoPortNetwork, NetworkError> {
    check_binary(a, b)?;
    let kind = RepresentationKind::Abcd;
    let s = (0..a.len())
        .map(|i| {
            let f = a.freqs[i];
            let ta = a.abcd_at(i).ok_or(NetworkError::Singular { kind, freq_hz: f })?;
            let tb = b.abcd_at(i).ok_or(NetworkError::Singular { kind, freq_hz: f })?;
            to_s(kind, &(ta * tb), a.z0).ok_or(NetworkError::Singular { kind, freq_hz: f })
        })
        .collect::<Result<Vec<_>, _>>()?;
    TwoPortNetwork::new(
        a.freqs.clone(),
        s,
        a.z0,
        format!("{}*{}", a.label, b.label),
    )
}

#[derive(Clone, Copy)]
enum Side {
    Left,
    Right,
}

fn deembed(
    measured: &TwoPortNetwork,
    fixture: &TwoPortNetwork,
    side: Side,
) -> Result<TwoPortNetwork, NetworkError> {
    check_binary(measured, fixture)?;
    let kind = RepresentationKind::Abcd;
    let s = (0..measured.len())
        .map(|i| {
            let f = measured.freqs[i];
            let tm = measured
                .abcd_at(i)
                .ok_or(NetworkError::Singular { kind, freq_hz: f })?;
            let tf_inv = fixture
                .abcd_at(i)
                .and_then(|t| t.inverse())
                .ok_or(NetworkError::SingularFixture { freq_hz: f })?;
            let t = match side {
                Side::Left => tf_inv * tm,
                Side::Right => tm * tf_inv,
            };
            to_s(kind, &t, measured.z0).ok_or(NetworkError::Singular { kind, freq_hz: f })
        })
        .collect::<Result<Vec<_>, _>>()?;
    TwoPortNetwork::new(
        measured.freqs.clone(),
        s,
        measured.z0,
        measured.label.clone(),
    )
}

/// Removes `fixture` from the input side: ABCD(fixture)⁻¹·ABCD(measured).
pub fn deembed_left(
    measured: &TwoPortNetwork,
    fixture: &TwoPortNetwork,
) -> Result<TwoPortNetwork, NetworkError> {
    deembed(measured, fixture, Side::Left)
}

/// Removes `fixture` from the output side: ABCD(measured)·ABCD(fixture)⁻¹.
pub fn deembed_right(
    measured: &TwoPortNetwork,
    fixture: &TwoPortNetwork,
) -> Result<TwoPortNetwork, NetworkError> {
    deembed(measured, fixture, Side::Right)
}

/// Re-references S to a new real impedance.
///
/// Uses `S' = (S − ΓI)(I − ΓS)⁻¹` with `Γ = (z_new − z0)/(z_new + z0)`, which
/// equals the Z-parameter route `S → Z(z0) → S(z_new)` but stays defined for
/// networks without a Z-matrix (e.g. a lone series element).
pub fn renormalize(net: &TwoPortNetwork, z0_new: f64) -> Result<TwoPortNetwork, NetworkError> {
    check_z0(z0_new)?;
    let gamma = Complex64::from((z0_new - net.z0) / (z0_new + net.z0));
    let one = Mat2::identity();
    let s = net
        .freqs
        .iter()
        .zip(&net.s)
        .map(|(&f, s)| {
            let inv = (one - s.scale(gamma)).inverse().ok_or(NetworkError::Singular {
                kind: RepresentationKind::Z,
                freq_hz: f,
            })?;
            Ok((*s - one.scale(gamma)) * inv)
        })
        .collect::<Result<Vec<_>, NetworkError>>()?;
    TwoPortNetwork::new(net.freqs.clone(), s, z0_new, net.label.clone())
}

/// Per-frequency outcome of a physical-consistency check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConsistencyReport {
    pub ok: Vec<bool>,
    /// Largest excess over the ideal across frequencies: `σ_max(S) − 1` for
    /// passivity, `max|S12 − S21| / max|S|` for reciprocity.
    pub worst_margin: f64,
    pub worst_freq_hz: f64,
}

impl ConsistencyReport {
    pub fn all_ok(&self) -> bool {
        self.ok.iter().all(|&b| b)
    }

    fn from_values(freqs: &[f64], values: impl Iterator<Item = f64>, limit: f64) -> Self {
        let mut ok = Vec::with_capacity(freqs.len());
        let mut worst_margin = f64::NEG_INFINITY;
        let mut worst_freq_hz = freqs[0];
        for (&f, v) in freqs.iter().zip(values) {
            ok.push(v <= limit);
            if v > worst_margin {
                worst_margin = v;
                worst_freq_hz = f;
            }
        }
        ConsistencyReport {
            ok,
            worst_margin,
            worst_freq_hz,
        }
    }
}

/// Passive where the largest singular value of S is ≤ 1 + 1e-6.
pub fn check_passivity(net: &TwoPortNetwork) -> ConsistencyReport {
    ConsistencyReport::from_values(
        &net.freqs,
        net.s.iter().map(|m| m.sigma_max() - 1.0),
        CONSISTENCY_TOL,
    )
}

/// Reciprocal where `|S12 − S21| ≤ 1e-6·max|S|`.
pub fn check_reciprocity(net: &TwoPortNetwork) -> ConsistencyReport {
    ConsistencyReport::from_values(
        &net.freqs,
        net.s.iter().map(|m| {
            let diff = (m.get(0, 1) - m.get(1, 0)).norm();
            let scale = m.max_abs();
            if scale == 0.0 {
                0.0
            } else {
                diff / scale
            }
        }),
        CONSISTENCY_TOL,
    )
}
