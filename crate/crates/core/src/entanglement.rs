//! Two-mode entanglement certificates from a 9x9 matrix of displacement
//! moments, its partial transpose, and the witness operators it induces.
//!
//! Mode-1 operators are `A = {1, D(alpha_1), D(alpha_2)}`, mode-2 operators
//! `B = {1, D(beta_1), D(beta_2)}`, and the pair `(i, j)` has index `3 i + j`.

use std::cmp::Ordering;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::states::{ComplexAmplitude, TwoModeState};

/// Default phase parameter of the second setting.
pub const DEFAULT_EPS: f64 = std::f64::consts::FRAC_PI_2;
/// Default weight of the canonical witness vector.
pub const DEFAULT_W: f64 = 0.4247;
/// Largest accepted imaginary part of a witness expectation.
pub const IMAG_TOL: f64 = 1e-10;
/// Amplitudes closer than this are the same word when merging terms.
pub const MERGE_TOL: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

fn clean(z: Complex64) -> Complex64 {
    // maps -0.0 to 0.0 so that serialized output is stable
    Complex64::new(z.re + 0.0, z.im + 0.0)
}

fn cmp_complex(a: Complex64, b: Complex64) -> Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

/// `phase * D(amp1) (x) D(amp2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DisplacementWord {
    pub phase: Complex64,
    pub amp1: ComplexAmplitude,
    pub amp2: ComplexAmplitude,
}

impl DisplacementWord {
    pub fn identity() -> Self {
        DisplacementWord { phase: ONE, amp1: ZERO, amp2: ZERO }
    }

    pub fn new(phase: Complex64, amp1: ComplexAmplitude, amp2: ComplexAmplitude) -> Result<Self> {
        if ![phase, amp1, amp2].iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFinite("displacement word"));
        }
        if (phase.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!("word phase {phase} is not unimodular")));
        }
        Ok(DisplacementWord { phase, amp1, amp2 })
    }

    pub fn displacement(amp1: ComplexAmplitude, amp2: ComplexAmplitude) -> Self {
        DisplacementWord { phase: ONE, amp1, amp2 }
    }

    /// `self * other`, using `D(x) D(y) = e^{i Im(x y*)} D(x + y)` on each mode.
    pub fn product(&self, other: &Self) -> Self {
        let theta = (self.amp1 * other.amp1.conj()).im + (self.amp2 * other.amp2.conj()).im;
        DisplacementWord {
            phase: self.phase * other.phase * Complex64::from_polar(1.0, theta),
            amp1: self.amp1 + other.amp1,
            amp2: self.amp2 + other.amp2,
        }
    }

    pub fn adjoint(&self) -> Self {
        DisplacementWord { phase: self.phase.conj(), amp1: -self.amp1, amp2: -self.amp2 }
    }

    pub fn is_identity(&self) -> bool {
        self.amp1.norm() <= MERGE_TOL && self.amp2.norm() <= MERGE_TOL
    }

    pub fn expectation(&self, state: &TwoModeState) -> Complex64 {
        self.phase * state.chi2(self.amp1, self.amp2)
    }
}

pub fn word_product(a: &DisplacementWord, b: &DisplacementWord) -> DisplacementWord {
    a.product(b)
}

/// Local displacement amplitudes `(alpha_1, alpha_2, beta_1, beta_2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Settings {
    pub alpha1: ComplexAmplitude,
    pub alpha2: ComplexAmplitude,
    pub beta1: ComplexAmplitude,
    pub beta2: ComplexAmplitude,
}

impl Settings {
    pub fn new(alpha1: Complex64, alpha2: Complex64, beta1: Complex64, beta2: Complex64) -> Result<Self> {
        if ![alpha1, alpha2, beta1, beta2].iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFinite("setting amplitude"));
        }
        Ok(Settings { alpha1: clean(alpha1), alpha2: clean(alpha2), beta1: clean(beta1), beta2: clean(beta2) })
    }

    pub fn zero() -> Self {
        Settings { alpha1: ZERO, alpha2: ZERO, beta1: ZERO, beta2: ZERO }
    }

    pub fn mode1(&self) -> [Complex64; 3] {
        [ZERO, self.alpha1, self.alpha2]
    }

    pub fn mode2(&self) -> [Complex64; 3] {
        [ZERO, self.beta1, self.beta2]
    }

    /// `V_{(i,j)} = A_i (x) B_j`.
    pub fn operator(&self, idx: usize) -> DisplacementWord {
        DisplacementWord::displacement(self.mode1()[idx / 3], self.mode2()[idx % 3])
    }

    pub fn max_amplitude(&self) -> f64 {
        [self.alpha1, self.alpha2, self.beta1, self.beta2].iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// `alpha_1 = 2 xi0, alpha_2 = i eps / (2 xi0), beta_1 = -2 xi0, beta_2 = -i eps / (2 xi0)`.
pub fn standard_settings(xi0: f64, eps: f64) -> Result<Settings> {
    if !(xi0.is_finite() && eps.is_finite()) {
        return Err(Error::NonFinite("xi0 or eps"));
    }
    if xi0 <= 0.0 {
        return Err(Error::InvalidParameter(format!("xi0 must be positive, got {xi0}")));
    }
    let s1 = Complex64::new(2.0 * xi0, 0.0);
    let s2 = Complex64::new(0.0, eps / (2.0 * xi0));
    Settings::new(s1, s2, -s1, -s2)
}

/// `M_{ab} = <V_a^dag V_b>` with the expectation values it was built from.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentMatrix9 {
    pub settings: Settings,
    pub entries: DMatrix<Complex64>,
    /// One representative `(amp1, amp2, <D(amp1) (x) D(amp2)>)` per distinct
    /// non-identity word up to adjoints.
    pub expectations: Vec<(Complex64, Complex64, Complex64)>,
}

fn same_amps(a: (Complex64, Complex64), b: (Complex64, Complex64)) -> bool {
    (a.0 - b.0).norm() <= MERGE_TOL && (a.1 - b.1).norm() <= MERGE_TOL
}

/// Distinct non-identity words `D(x) (x) D(y)` entering the 9x9 matrix, one
/// per adjoint pair. Generic settings give 24.
pub fn distinct_words(settings: &Settings) -> Vec<(Complex64, Complex64)> {
    let mut out: Vec<(Complex64, Complex64)> = Vec::new();
    for a in 0..9 {
        for b in a + 1..9 {
            let w = settings.operator(a).adjoint().product(&settings.operator(b));
            if w.is_identity() {
                continue;
            }
            let key = (w.amp1, w.amp2);
            let neg = (-w.amp1, -w.amp2);
            if !out.iter().any(|&k| same_amps(k, key) || same_amps(k, neg)) {
                out.push(key);
            }
        }
    }
    out
}

/// Builds the 9x9 moment matrix from `chi2`. The diagonal is exactly 1 and
/// the lower triangle mirrors the upper one.
pub fn moments9(state: &TwoModeState, settings: &Settings) -> MomentMatrix9 {
    let mut entries = DMatrix::from_element(9, 9, ZERO);
    for a in 0..9 {
        entries[(a, a)] = ONE;
        for b in a + 1..9 {
            let w = settings.operator(a).adjoint().product(&settings.operator(b));
            let v = w.expectation(state);
            entries[(a, b)] = v;
            entries[(b, a)] = v.conj();
        }
    }
    let expectations = distinct_words(settings)
        .into_iter()
        .map(|(x, y)| (x, y, state.chi2(x, y)))
        .collect();
    MomentMatrix9 { settings: *settings, entries, expectations }
}

/// `[M^G]_{(i,j),(k,l)} = M_{(k,j),(i,l)}`.
pub fn partial_transpose(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    linalg::partial_transpose_first(m, 3, 3)
}

/// Smallest eigenvalue of the partially transposed moment matrix; negative
/// certifies entanglement.
pub fn ppt_min_eig(state: &TwoModeState, settings: &Settings) -> Result<f64> {
    linalg::min_eigenvalue(&partial_transpose(&moments9(state, settings).entries))
}

/// `eta = [w, 0, -i w, 0, -sqrt(1 - 4 w^2), 0, i w, 0, w]`.
pub fn canonical_eta(w: f64) -> Result<DVector<Complex64>> {
    if !(w > 0.0 && w <= 0.5) {
        return Err(Error::InvalidParameter(format!("w must lie in (0, 1/2], got {w}")));
    }
    let mid = -(1.0 - 4.0 * w * w).max(0.0).sqrt();
    Ok(DVector::from_vec(vec![
        Complex64::new(w, 0.0),
        ZERO,
        Complex64::new(0.0, -w),
        ZERO,
        Complex64::new(mid, 0.0),
        ZERO,
        Complex64::new(0.0, w),
        ZERO,
        Complex64::new(w, 0.0),
    ]))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WitnessTerm {
    pub coeff: Complex64,
    pub phase: Complex64,
    pub amp1: ComplexAmplitude,
    pub amp2: ComplexAmplitude,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessMetadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub settings: Option<Settings>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<Vec<Complex64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xi0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w: Option<f64>,
}

/// Hermitian operator `sum_k c_k phase_k D(x_k) (x) D(y_k)` in canonical form:
/// one term per word, phases folded into the coefficients, sorted by
/// `(amp1, amp2)` on `(re, im)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessDescriptor {
    pub terms: Vec<WitnessTerm>,
    #[serde(default)]
    pub metadata: WitnessMetadata,
}

impl WitnessDescriptor {
    /// Canonicalizes `(coefficient, word)` pairs.
    pub fn from_words(words: impl IntoIterator<Item = (Complex64, DisplacementWord)>, metadata: WitnessMetadata) -> Self {
        let mut acc: Vec<(Complex64, Complex64, Complex64)> = Vec::new();
        for (c, w) in words {
            let (x, y) = if w.is_identity() { (ZERO, ZERO) } else { (w.amp1, w.amp2) };
            let v = c * w.phase;
            match acc.iter_mut().find(|t| same_amps((t.1, t.2), (x, y))) {
                Some(t) => t.0 += v,
                None => acc.push((v, x, y)),
            }
        }
        let mut terms: Vec<WitnessTerm> = acc
            .into_iter()
            .filter(|t| t.0.norm() > 1e-14)
            .map(|(c, x, y)| WitnessTerm { coeff: clean(c), phase: ONE, amp1: clean(x), amp2: clean(y) })
            .collect();
        terms.sort_by(|a, b| cmp_complex(a.amp1, b.amp1).then(cmp_complex(a.amp2, b.amp2)));
        WitnessDescriptor { terms, metadata }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    /// Number of adjoint pairs of non-identity words.
    pub fn correlation_count(&self) -> usize {
        let non_identity = self
            .terms
            .iter()
            .filter(|t| !(t.amp1.norm() <= MERGE_TOL && t.amp2.norm() <= MERGE_TOL))
            .count();
        non_identity.div_ceil(2)
    }
}

/// `W = sum eta_{kl} eta*_{ij} (A_k^dag A_i) (x) (B_j^dag B_l)`, so that
/// `<W> = eta^dag M^G eta` on every state.
pub fn witness_from_eta(eta: &DVector<Complex64>, settings: &Settings) -> Result<WitnessDescriptor> {
    if eta.len() != 9 {
        return Err(Error::DimensionMismatch(eta.len(), 9));
    }
    let norm = eta.norm();
    if !((norm - 1.0).abs() <= 1e-10) {
        return Err(Error::InvalidParameter(format!("eta has norm {norm}, expected 1")));
    }
    let mut words = Vec::new();
    for ij in 0..9 {
        for kl in 0..9 {
            let c = eta[kl] * eta[ij].conj();
            if c == ZERO {
                continue;
            }
            let (i, j, k, l) = (ij / 3, ij % 3, kl / 3, kl % 3);
            let left = settings.operator(3 * k + j);
            let right = settings.operator(3 * i + l);
            words.push((c, left.adjoint().product(&right)));
        }
    }
    let metadata = WitnessMetadata {
        settings: Some(*settings),
        eta: Some(eta.iter().copied().map(clean).collect()),
        ..Default::default()
    };
    Ok(WitnessDescriptor::from_words(words, metadata))
}

/// `sum c_k phase_k chi(x_k, y_k)`; fails if the imaginary part exceeds [`IMAG_TOL`].
pub fn witness_expectation(state: &TwoModeState, w: &WitnessDescriptor) -> Result<f64> {
    let total: Complex64 = w.terms.iter().map(|t| t.coeff * t.phase * state.chi2(t.amp1, t.amp2)).sum();
    if total.im.abs() > IMAG_TOL {
        return Err(Error::ImaginaryResidue(total.im));
    }
    Ok(total.re)
}

/// The canonical-eta witness written out in the three settings
/// `s1 = 2 xi0, s2 = i eps / (2 xi0), s3 = s2 - s1`, with `X = D(s2) - D(-s2)`:
///
/// `W = 1 (x) 1 + w^2 [X (x) X - 2i (X (x) 1 - 1 (x) X)]
///    - w sqrt(1 - 4w^2) [D(s1) (x) D(s1) + D(-s1) (x) D(-s1) + D(s3) (x) D(s3) + D(-s3) (x) D(-s3)
///       - i e^{i eps} (D(s1) (x) D(-s3) + D(s3) (x) D(-s1))
///       + i e^{-i eps} (D(-s1) (x) D(s3) + D(-s3) (x) D(s1))]`.
pub fn closed_form_witness(xi0: f64, eps: f64, w: f64) -> Result<WitnessDescriptor> {
    let settings = standard_settings(xi0, eps)?;
    canonical_eta(w)?;
    let s1 = settings.alpha1;
    let s2 = settings.alpha2;
    let s3 = s2 - s1;
    let i = Complex64::new(0.0, 1.0);
    let w2 = Complex64::new(w * w, 0.0);
    let cross = Complex64::new(-w * (1.0 - 4.0 * w * w).max(0.0).sqrt(), 0.0);
    let d = DisplacementWord::displacement;
    let mut words = vec![(ONE, DisplacementWord::identity())];
    for (sa, sb) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
        words.push((w2 * (sa * sb), d(s2 * sa, s2 * sb)));
    }
    for sign in [1.0, -1.0] {
        words.push((w2 * (-2.0 * i) * sign, d(s2 * sign, ZERO)));
        words.push((w2 * (2.0 * i) * sign, d(ZERO, s2 * sign)));
    }
    for s in [s1, -s1, s3, -s3] {
        words.push((cross, d(s, s)));
    }
    let up = -i * Complex64::from_polar(1.0, eps);
    let down = i * Complex64::from_polar(1.0, -eps);
    words.push((cross * up, d(s1, -s3)));
    words.push((cross * up, d(s3, -s1)));
    words.push((cross * down, d(-s1, s3)));
    words.push((cross * down, d(-s3, s1)));
    let metadata = WitnessMetadata {
        settings: Some(settings),
        xi0: Some(xi0),
        eps: Some(eps),
        w: Some(w),
        ..Default::default()
    };
    Ok(WitnessDescriptor::from_words(words, metadata))
}

/// Minimal eigenpair of `M^G` for a given state; the eigenvector is the
/// state-adapted `eta`, with deterministic choice inside degenerate spaces.
pub fn optimal_eta(state: &TwoModeState, settings: &Settings) -> Result<(f64, DVector<Complex64>)> {
    linalg::min_eigenpair(&partial_transpose(&moments9(state, settings).entries))
}

pub fn optimal_witness(state: &TwoModeState, settings: &Settings) -> Result<WitnessDescriptor> {
    let (_, eta) = optimal_eta(state, settings)?;
    witness_from_eta(&eta, settings)
}
