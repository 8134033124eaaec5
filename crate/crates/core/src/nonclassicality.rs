//! Single-mode non-classicality certificates built from the normally ordered
//! characteristic function `chi_N`.
//!
//! A classical (positive-P) state has `|chi_N| <= 1` everywhere and every
//! Bochner matrix `M_ij = chi_N(alpha_i - alpha_j)` positive semidefinite.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg;
use crate::states::{ComplexAmplitude, SingleModeState};

/// Default detection threshold for the three-point determinant and eigenvalue.
pub const NC2_THRESHOLD: f64 = -0.01;
/// Default one-point threshold: `|chi_N| - 1` must clear rounding noise.
pub const NC1_THRESHOLD: f64 = 1e-10;

/// `|chi_N(alpha)| - 1`; positive certifies non-classicality.
pub fn nc1_excess(state: &SingleModeState, alpha: ComplexAmplitude) -> f64 {
    state.chi_normal(alpha).norm() - 1.0
}

/// Bochner matrix of normally ordered displacement moments.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentMatrix {
    pub points: Vec<ComplexAmplitude>,
    pub entries: DMatrix<Complex64>,
}

impl MomentMatrix {
    /// Index pairs `(i, j)`, `i < j`, of coinciding test points.
    pub fn duplicate_points(&self) -> Vec<(usize, usize)> {
        let n = self.points.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if self.points[i] == self.points[j] {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        linalg::min_eigenvalue(&self.entries)
    }
}

/// `M_ij = chi_N(alpha_i - alpha_j)`. The upper triangle is evaluated and
/// mirrored, and the diagonal is exactly 1. Coinciding points only log a
/// warning.
pub fn bochner_matrix(state: &SingleModeState, points: &[ComplexAmplitude]) -> Result<MomentMatrix> {
    if points.len() < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 test points, got {}", points.len())));
    }
    if points.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::NonFinite("test point"));
    }
    let n = points.len();
    let mut entries = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    for i in 0..n {
        entries[(i, i)] = Complex64::new(1.0, 0.0);
        for j in i + 1..n {
            let v = state.chi_normal(points[i] - points[j]);
            entries[(i, j)] = v;
            entries[(j, i)] = v.conj();
        }
    }
    let m = MomentMatrix { points: points.to_vec(), entries };
    for (i, j) in m.duplicate_points() {
        log::debug!("test points {i} and {j} coincide; the moment matrix is degenerate");
    }
    Ok(m)
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(m: &DMatrix<Complex64>) -> Result<f64> {
    linalg::min_eigenvalue(m)
}

/// Determinant and smallest eigenvalue of the three-point Bochner matrix
/// on `{0, alpha_1, alpha_2}`.
pub fn nc2_certificate(state: &SingleModeState, points: &[ComplexAmplitude]) -> Result<(f64, f64)> {
    if points.len() != 3 {
        return Err(Error::InvalidParameter(format!("need exactly 3 test points, got {}", points.len())));
    }
    if points[0] != Complex64::new(0.0, 0.0) {
        return Err(Error::InvalidParameter("first test point must be 0".into()));
    }
    let m = bochner_matrix(state, points)?;
    Ok((linalg::det3_hermitian(&m.entries), m.min_eigenvalue()?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Certificate {
    /// `|chi_N(alpha)| - 1` at `alpha = a1 d1 + a2 d2`; detected when above the threshold.
    Nc1,
    /// `det M` on `{0, a1 d1, a2 d2}`; detected at or below the threshold.
    Nc2Det,
    /// Smallest eigenvalue of the same matrix; detected at or below the threshold.
    Nc2Eig,
}

impl Certificate {
    pub fn default_threshold(self) -> f64 {
        match self {
            Certificate::Nc1 => NC1_THRESHOLD,
            Certificate::Nc2Det | Certificate::Nc2Eig => NC2_THRESHOLD,
        }
    }

    /// Axis directions used when the grid does not specify any: real and
    /// imaginary part of `alpha` for the one-point test, two real amplitudes
    /// for the three-point tests.
    pub fn default_directions(self) -> (Complex64, Complex64) {
        match self {
            Certificate::Nc1 => (Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)),
            Certificate::Nc2Det | Certificate::Nc2Eig => (Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)),
        }
    }

    pub fn detects(self, value: f64, threshold: f64) -> bool {
        match self {
            Certificate::Nc1 => value > threshold,
            Certificate::Nc2Det | Certificate::Nc2Eig => value <= threshold,
        }
    }
}

impl FromStr for Certificate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "nc1" => Ok(Certificate::Nc1),
            "nc2" | "nc2-det" | "det" => Ok(Certificate::Nc2Det),
            "nc2-eig" | "eig" => Ok(Certificate::Nc2Eig),
            other => Err(Error::InvalidParameter(format!("unknown certificate '{other}'"))),
        }
    }
}

/// Inclusive arithmetic range `min, min + step, ..., <= max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl Axis {
    pub fn new(min: f64, max: f64, step: f64) -> Result<Self> {
        if !(min.is_finite() && max.is_finite() && step.is_finite()) {
            return Err(Error::NonFinite("grid axis"));
        }
        if step <= 0.0 || max < min {
            return Err(Error::EmptyGrid);
        }
        Ok(Axis { min, max, step })
    }

    pub fn single(value: f64) -> Self {
        Axis { min: value, max: value, step: 1.0 }
    }

    pub fn len(&self) -> usize {
        ((self.max - self.min) / self.step + 1e-9).floor() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.min + k as f64 * self.step).collect()
    }
}

impl FromStr for Axis {
    type Err = Error;

    /// `"min:max:step"`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(Error::InvalidParameter(format!("axis '{s}' is not min:max:step")));
        }
        let num = |t: &str| {
            t.parse::<f64>()
                .map_err(|_| Error::InvalidParameter(format!("bad number '{t}' in axis '{s}'")))
        };
        Axis::new(num(parts[0])?, num(parts[1])?, num(parts[2])?)
    }
}

/// Two-axis scan grid; cell `(a1, a2)` maps to amplitudes via `directions`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub axis1: Axis,
    pub axis2: Option<Axis>,
    pub directions: Option<(Complex64, Complex64)>,
}

impl Grid {
    pub fn new(axis1: Axis, axis2: Option<Axis>) -> Self {
        Grid { axis1, axis2, directions: None }
    }

    pub fn with_directions(mut self, d1: Complex64, d2: Complex64) -> Self {
        self.directions = Some((d1, d2));
        self
    }

    // A missing second axis is the imaginary part 0 for the one-point test
    // and a copy of the first axis for the three-point tests.
    fn resolved_axis2(&self, cert: Certificate) -> Axis {
        self.axis2.unwrap_or(match cert {
            Certificate::Nc1 => Axis::single(0.0),
            Certificate::Nc2Det | Certificate::Nc2Eig => self.axis1,
        })
    }
}

impl FromStr for Grid {
    type Err = Error;

    /// `"min:max:step[,min:max:step]"`.
    fn from_str(s: &str) -> Result<Self> {
        let mut it = s.split(',');
        let axis1 = it.next().ok_or(Error::EmptyGrid)?.parse()?;
        let axis2 = it.next().map(str::parse).transpose()?;
        if it.next().is_some() {
            return Err(Error::InvalidParameter(format!("grid '{s}' has more than two axes")));
        }
        Ok(Grid::new(axis1, axis2))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanCell {
    pub axis1: f64,
    pub axis2: f64,
    pub value: f64,
    pub detected: bool,
}

/// Certificate values over a grid, row-major with `axis1` outer.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionScan {
    pub certificate: Certificate,
    pub threshold: f64,
    pub shape: (usize, usize),
    pub cells: Vec<ScanCell>,
}

impl RegionScan {
    pub fn detected_count(&self) -> usize {
        self.cells.iter().filter(|c| c.detected).count()
    }

    pub fn mask(&self) -> Vec<bool> {
        self.cells.iter().map(|c| c.detected).collect()
    }

    /// CSV with header `axis1,axis2,value,detected`, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("axis1,axis2,value,detected\n");
        for c in &self.cells {
            let _ = writeln!(out, "{:.16e},{:.16e},{:.16e},{}", c.axis1, c.axis2, c.value, c.detected);
        }
        out
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Certificate::Nc1 => "nc1",
            Certificate::Nc2Det => "nc2-det",
            Certificate::Nc2Eig => "nc2-eig",
        })
    }
}

fn cell_value(state: &SingleModeState, cert: Certificate, a1: Complex64, a2: Complex64) -> Result<f64> {
    let zero = Complex64::new(0.0, 0.0);
    match cert {
        Certificate::Nc1 => Ok(nc1_excess(state, a1 + a2)),
        Certificate::Nc2Det => Ok(nc2_certificate(state, &[zero, a1, a2])?.0),
        Certificate::Nc2Eig => Ok(nc2_certificate(state, &[zero, a1, a2])?.1),
    }
}

/// Evaluates `cert` on every grid cell, in parallel, preserving order.
pub fn region_scan(
    state: &SingleModeState,
    grid: &Grid,
    cert: Certificate,
    threshold: Option<f64>,
) -> Result<RegionScan> {
    let threshold = threshold.unwrap_or(cert.default_threshold());
    if !threshold.is_finite() {
        return Err(Error::NonFinite("threshold"));
    }
    let (d1, d2) = grid.directions.unwrap_or(cert.default_directions());
    let xs = grid.axis1.values();
    let ys = grid.resolved_axis2(cert).values();
    if xs.is_empty() || ys.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let coords: Vec<(f64, f64)> = xs.iter().flat_map(|&x| ys.iter().map(move |&y| (x, y))).collect();
    let cells = coords
        .par_iter()
        .map(|&(x, y)| {
            let value = cell_value(state, cert, d1 * x, d2 * y)?;
            Ok(ScanCell { axis1: x, axis2: y, value, detected: cert.detects(value, threshold) })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RegionScan { certificate: cert, threshold, shape: (xs.len(), ys.len()), cells })
}
