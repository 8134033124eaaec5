//! Qubit-probe protocols: Ramsey measurements of a mechanical mode, the
//! two-qubit conditional preparation of entangled cats, and the qubit-pair
//! channel induced by displacement-coupled modes.
//!
//! In the rotating frame (the default) the free resonator evolution `U_0` and
//! the geometric phase are dropped. [`Frame::Lab`] keeps both: the state is
//! rotated by `e^{-i omega tau n}` before the displacement and the geometric
//! phase is added to the qubit phase.

use std::f64::consts::FRAC_PI_2;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::{Error, Result};
use crate::linalg;
use crate::states::{pair_norm_sqr, superposition_norm_sqr, ComplexAmplitude, SingleModeState, TwoModeState};

/// Smallest outcome probability for which a conditional state is formed.
pub const MIN_PROBABILITY: f64 = 1e-14;
/// Tolerance for Hermiticity, unit trace, unit diagonal and positivity checks.
pub const QUBIT_TOL: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

fn finite(x: f64, what: &str) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{what} must be finite, got {x}")))
    }
}

/// Qubit-oscillator coupling in units where `omega` sets the time scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingParams {
    pub lambda: f64,
    pub omega: f64,
    pub tau: f64,
}

impl CouplingParams {
    pub fn new(lambda: f64, omega: f64, tau: f64) -> Result<Self> {
        finite(lambda, "lambda")?;
        finite(omega, "omega")?;
        finite(tau, "tau")?;
        if lambda <= 0.0 || omega <= 0.0 || tau < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "need lambda > 0, omega > 0, tau >= 0; got ({lambda}, {omega}, {tau})"
            )));
        }
        Ok(CouplingParams { lambda, omega, tau })
    }
}

/// `alpha = (lambda / omega) (e^{-i omega tau} - 1)`.
pub fn displacement_amplitude(p: &CouplingParams) -> ComplexAmplitude {
    (Complex64::from_polar(1.0, -p.omega * p.tau) - 1.0) * (p.lambda / p.omega)
}

/// `phi_g = (lambda / omega)^2 (omega tau - sin(omega tau))`.
pub fn geometric_phase(p: &CouplingParams) -> f64 {
    let wt = p.omega * p.tau;
    (p.lambda / p.omega).powi(2) * (wt - wt.sin())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Frame {
    #[default]
    Rotating,
    Lab,
}

/// One Ramsey sequence: total qubit phase, effective displacement, and the
/// free-evolution angle `omega tau` (zero in the rotating frame).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RamseySetting {
    pub phi: f64,
    pub alpha: ComplexAmplitude,
    pub free_angle: f64,
}

impl RamseySetting {
    pub fn new(phi: f64, alpha: ComplexAmplitude) -> Result<Self> {
        Self::with_free_angle(phi, alpha, 0.0)
    }

    pub fn with_free_angle(phi: f64, alpha: ComplexAmplitude, free_angle: f64) -> Result<Self> {
        finite(phi, "phi")?;
        finite(alpha.re, "alpha")?;
        finite(alpha.im, "alpha")?;
        finite(free_angle, "free evolution angle")?;
        Ok(RamseySetting { phi, alpha, free_angle })
    }

    /// Setting produced by physical coupling parameters and qubit phase `phi0`.
    pub fn from_coupling(p: &CouplingParams, phi0: f64, frame: Frame) -> Result<Self> {
        let alpha = displacement_amplitude(p);
        match frame {
            Frame::Rotating => Self::new(phi0, alpha),
            Frame::Lab => Self::with_free_angle(phi0 + geometric_phase(p), alpha, p.omega * p.tau),
        }
    }

    fn kick(&self, sign: f64) -> Complex64 {
        Complex64::from_polar(sign, self.phi)
    }
}

/// Qubit readout result; `Minus` is the ground state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    Plus,
    Minus,
}

impl Outcome {
    pub fn sign(self) -> f64 {
        match self {
            Outcome::Plus => 1.0,
            Outcome::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Outcome::Plus => Outcome::Minus,
            Outcome::Minus => Outcome::Plus,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Outcome::Plus => '+',
            Outcome::Minus => '-',
        }
    }
}

impl FromStr for Outcome {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "+" | "plus" | "e" => Ok(Outcome::Plus),
            "-" | "minus" | "g" => Ok(Outcome::Minus),
            other => Err(Error::InvalidParameter(format!("unknown outcome '{other}'"))),
        }
    }
}

/// `<Q(phi, alpha)> = Re{e^{i phi} chi(alpha)}` on the freely evolved state.
pub fn modular_expectation(state: &SingleModeState, s: &RamseySetting) -> f64 {
    (s.kick(1.0) * state.rotated(s.free_angle).chi(s.alpha)).re
}

/// `(p_+, p_-)` with `p_+ + p_- = 1` exactly.
pub fn outcome_probabilities(state: &SingleModeState, s: &RamseySetting) -> (f64, f64) {
    let z = modular_expectation(state, s);
    let p_minus = (0.5 * (1.0 - z)).clamp(0.0, 1.0);
    (1.0 - p_minus, p_minus)
}

/// `chi(alpha) = <Z>(0, alpha) + i <Z>(-pi/2, alpha)`.
pub fn chi_from_measurements(state: &SingleModeState, alpha: ComplexAmplitude) -> Result<Complex64> {
    let re = modular_expectation(state, &RamseySetting::new(0.0, alpha)?);
    let im = modular_expectation(state, &RamseySetting::new(-FRAC_PI_2, alpha)?);
    Ok(Complex64::new(re, im))
}

// E_s |psi> for a coherent superposition, unnormalized:
// (1/2)(sum c_k |xi_k> + s e^{i phi} sum c_k e^{i Im(alpha xi_k*)} |xi_k + alpha>).
fn kraus_image(
    terms: &[(Complex64, ComplexAmplitude)],
    s: &RamseySetting,
    sign: f64,
) -> Vec<(Complex64, ComplexAmplitude)> {
    let rot = Complex64::from_polar(1.0, -s.free_angle);
    let kick = s.kick(sign);
    let mut out = Vec::with_capacity(2 * terms.len());
    for &(c, xi) in terms {
        let xi = xi * rot;
        out.push((c * 0.5, xi));
        let phase = Complex64::from_polar(1.0, (s.alpha * xi.conj()).im);
        out.push((c * kick * phase * 0.5, xi + s.alpha));
    }
    out
}

/// Post-measurement state and its probability. Defined for coherent
/// superpositions and mixtures of them; other families go through the oracle.
pub fn conditional_state(
    state: &SingleModeState,
    s: &RamseySetting,
    outcome: Outcome,
) -> Result<(SingleModeState, f64)> {
    match state {
        SingleModeState::CoherentSuperposition { terms } => {
            let image = kraus_image(terms, s, outcome.sign());
            let p = superposition_norm_sqr(&image);
            if !(p > MIN_PROBABILITY) {
                return Err(Error::ZeroProbability(p));
            }
            Ok((SingleModeState::superposition(&image)?, p))
        }
        SingleModeState::Mixture { components } => {
            let mut branches = Vec::with_capacity(components.len());
            let mut total = 0.0;
            for (w, comp) in components {
                if *w == 0.0 {
                    continue;
                }
                match conditional_state(comp, s, outcome) {
                    Ok((post, p)) => {
                        total += w * p;
                        branches.push((w * p, post));
                    }
                    Err(Error::ZeroProbability(_)) => {}
                    Err(e) => return Err(e),
                }
            }
            if !(total > MIN_PROBABILITY) {
                return Err(Error::ZeroProbability(total));
            }
            let weights: Vec<_> = branches.into_iter().map(|(wp, post)| (wp / total, post)).collect();
            Ok((SingleModeState::mixture(weights)?, total))
        }
        SingleModeState::Fock { n: 0 } => {
            let vac = SingleModeState::superposition(&[(Complex64::new(1.0, 0.0), ZERO)])?;
            conditional_state(&vac, s, outcome)
        }
        SingleModeState::Fock { .. } | SingleModeState::Thermal { .. } => {
            Err(Error::Unsupported("conditional state of a number-diagonal state"))
        }
        SingleModeState::Decohered { .. } => Err(Error::Unsupported("conditional state of a decohered state")),
    }
}

/// `<Q(phi1, alpha) (x) Q(phi2, beta)> =
/// (1/4) sum_{a,b = +-1} e^{i(a phi1 + b phi2)} chi(a alpha, b beta)`.
pub fn two_qubit_correlation(state: &TwoModeState, s1: &RamseySetting, s2: &RamseySetting) -> f64 {
    let evolved = state.rotated(s1.free_angle, s2.free_angle);
    let mut total = ZERO;
    for a in [1.0, -1.0] {
        for b in [1.0, -1.0] {
            total += Complex64::from_polar(1.0, a * s1.phi + b * s2.phi)
                * evolved.chi2(s1.alpha * a, s2.alpha * b);
        }
    }
    0.25 * total.re
}

/// `Re chi = CC - SS`, `Im chi = CS + SC` with `C = Q(0, .)`, `S = Q(-pi/2, .)`.
pub fn chi2_from_correlations(
    state: &TwoModeState,
    alpha: ComplexAmplitude,
    beta: ComplexAmplitude,
) -> Result<Complex64> {
    let (c1, s1) = (RamseySetting::new(0.0, alpha)?, RamseySetting::new(-FRAC_PI_2, alpha)?);
    let (c2, s2) = (RamseySetting::new(0.0, beta)?, RamseySetting::new(-FRAC_PI_2, beta)?);
    let corr = |a, b| two_qubit_correlation(state, a, b);
    Ok(Complex64::new(
        corr(&c1, &c2) - corr(&s1, &s2),
        corr(&c1, &s2) + corr(&s1, &c2),
    ))
}

/// Initial qubit-pair Bell state for [`prepare_conditional`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BellVariant {
    /// `(|gg> + e^{i Theta}|ee>) / sqrt 2`.
    #[default]
    Phi,
    /// `(|ge> + e^{i Theta}|eg>) / sqrt 2`.
    Psi,
}

fn tensor(
    left: &[(Complex64, ComplexAmplitude)],
    right: &[(Complex64, ComplexAmplitude)],
    scale: Complex64,
    out: &mut Vec<(Complex64, ComplexAmplitude, ComplexAmplitude)>,
) {
    for &(a, x) in left {
        for &(b, z) in right {
            out.push((scale * a * b, x, z));
        }
    }
}

/// Both modes start in `psi`, the qubits in a Bell state; each qubit drives a
/// Ramsey sequence on its mode and both are read out. Returns the normalized
/// two-mode state for the requested outcome pair and its probability.
///
/// Phi variant, outcome `(s1, s2)`:
/// `(1/sqrt 2)[E_{s1} (x) E_{s2} + e^{i(Theta - 2 phi0)} E_{-s1} (x) E_{-s2}] |psi, psi>`.
/// Psi variant:
/// `(1/sqrt 2) e^{-i phi0}[E_{s1} (x) E_{-s2} + e^{i Theta} E_{-s1} (x) E_{s2}] |psi, psi>`.
pub fn prepare_conditional(
    psi: &SingleModeState,
    theta: f64,
    phi0: f64,
    s: &RamseySetting,
    outcome: (Outcome, Outcome),
    variant: BellVariant,
) -> Result<(TwoModeState, f64)> {
    finite(theta, "Theta")?;
    finite(phi0, "phi0")?;
    let terms = match psi {
        SingleModeState::CoherentSuperposition { terms } => terms.clone(),
        SingleModeState::Fock { n: 0 } => vec![(Complex64::new(1.0, 0.0), ZERO)],
        _ => return Err(Error::Unsupported("conditional preparation needs a coherent superposition")),
    };
    let image = |o: Outcome| kraus_image(&terms, s, o.sign());
    let (o1, o2) = outcome;
    let half = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let mut pair = Vec::new();
    match variant {
        BellVariant::Phi => {
            tensor(&image(o1), &image(o2), half, &mut pair);
            let rel = half * Complex64::from_polar(1.0, theta - 2.0 * phi0);
            tensor(&image(o1.flip()), &image(o2.flip()), rel, &mut pair);
        }
        BellVariant::Psi => {
            let lead = half * Complex64::from_polar(1.0, -phi0);
            tensor(&image(o1), &image(o2.flip()), lead, &mut pair);
            tensor(&image(o1.flip()), &image(o2), lead * Complex64::from_polar(1.0, theta), &mut pair);
        }
    }
    let p = pair_norm_sqr(&pair);
    if !(p > MIN_PROBABILITY) {
        return Err(Error::ZeroProbability(p));
    }
    Ok((TwoModeState::pair_superposition(&pair)?, p))
}

/// `p_{--} = [1 + Re{e^{2 i phi} <psi|D(alpha)|psi>^2}] / 4` for the Phi variant
/// with `Theta = 2 phi0` in the rotating frame.
pub fn p_minus_minus(psi: &SingleModeState, phi: f64, alpha: ComplexAmplitude) -> f64 {
    let c = psi.chi(alpha);
    0.25 * (1.0 + (Complex64::from_polar(1.0, 2.0 * phi) * c * c).re)
}

// V order {gg, ge, eg, ee} = {1 (x) 1, 1 (x) D(beta), D(alpha) (x) 1, D(alpha) (x) D(beta)}
fn qubit_words(alpha: ComplexAmplitude, beta: ComplexAmplitude) -> [(Complex64, Complex64); 4] {
    [(ZERO, ZERO), (ZERO, beta), (alpha, ZERO), (alpha, beta)]
}

/// Gram matrix `M_{ab} = <V_a^dag V_b>` over the qubit-conditioned unitaries
/// `V_gg = 1, V_ge = 1 (x) D(beta), V_eg = D(alpha) (x) 1, V_ee = D(alpha) (x) D(beta)`.
/// Uses `D(-x) D(y) = e^{-i Im(x y*)} D(y - x)`.
pub fn moments4(state: &TwoModeState, alpha: ComplexAmplitude, beta: ComplexAmplitude) -> DMatrix<Complex64> {
    let words = qubit_words(alpha, beta);
    let mut m = DMatrix::from_element(4, 4, ZERO);
    for a in 0..4 {
        m[(a, a)] = Complex64::new(1.0, 0.0);
        for b in a + 1..4 {
            let (xa, ya) = words[a];
            let (xb, yb) = words[b];
            let phase = Complex64::from_polar(1.0, -(xa * xb.conj()).im - (ya * yb.conj()).im);
            let v = phase * state.chi2(xb - xa, yb - ya);
            m[(a, b)] = v;
            m[(b, a)] = v.conj();
        }
    }
    m
}

/// Two-qubit density matrix in the basis `{gg, ge, eg, ee}`.
#[derive(Debug, Clone, PartialEq)]
pub struct QubitPairState {
    rho: DMatrix<Complex64>,
}

impl QubitPairState {
    pub fn new(rho: DMatrix<Complex64>) -> Result<Self> {
        if rho.nrows() != 4 || rho.ncols() != 4 {
            return Err(Error::DimensionMismatch(rho.nrows(), 4));
        }
        let dev = linalg::hermitian_deviation(&rho);
        if !(dev <= QUBIT_TOL) {
            return Err(Error::NotHermitian(dev));
        }
        let tr = rho.trace();
        if (tr - 1.0).norm() > QUBIT_TOL {
            return Err(Error::InvalidParameter(format!("trace {tr} is not 1")));
        }
        let lam = linalg::min_eigenvalue(&rho)?;
        if lam < -QUBIT_TOL {
            return Err(Error::InvalidParameter(format!("negative eigenvalue {lam}")));
        }
        Ok(QubitPairState { rho })
    }

    /// `|v><v|` for unnormalized amplitudes `v` over `{gg, ge, eg, ee}`.
    pub fn pure(v: [Complex64; 4]) -> Result<Self> {
        let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if !(norm > MIN_PROBABILITY) {
            return Err(Error::DegenerateNorm(norm));
        }
        Self::new(DMatrix::from_fn(4, 4, |i, j| v[i] * v[j].conj() / norm))
    }

    /// `(|gg> + e^{i theta}|ee>) / sqrt 2`.
    pub fn bell_phi(theta: f64) -> Result<Self> {
        let one = Complex64::new(1.0, 0.0);
        Self::pure([one, ZERO, ZERO, Complex64::from_polar(1.0, theta)])
    }

    /// `(|ge> + e^{i theta}|eg>) / sqrt 2`.
    pub fn bell_psi(theta: f64) -> Result<Self> {
        let one = Complex64::new(1.0, 0.0);
        Self::pure([ZERO, one, Complex64::from_polar(1.0, theta), ZERO])
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.rho
    }

    pub fn partial_transpose(&self) -> DMatrix<Complex64> {
        linalg::partial_transpose_first(&self.rho, 2, 2)
    }

    /// Smallest eigenvalue of the partial transpose; negative means entangled.
    pub fn ppt_min_eigenvalue(&self) -> Result<f64> {
        linalg::min_eigenvalue(&self.partial_transpose())
    }
}

/// Qubit-pair state after tracing out modes that evolved conditionally:
/// `rho_out = rho (.) M^T` (element-wise).
pub fn qubit_channel(rho: &QubitPairState, m: &DMatrix<Complex64>) -> Result<QubitPairState> {
    if m.nrows() != 4 || m.ncols() != 4 {
        return Err(Error::InvalidMoments(format!("expected 4x4, got {}x{}", m.nrows(), m.ncols())));
    }
    let dev = linalg::hermitian_deviation(m);
    if !(dev <= QUBIT_TOL) {
        return Err(Error::InvalidMoments(format!("not Hermitian (deviation {dev:e})")));
    }
    if let Some(d) = (0..4).map(|i| m[(i, i)]).find(|d| (d - 1.0).norm() > QUBIT_TOL) {
        return Err(Error::InvalidMoments(format!("diagonal entry {d} is not 1")));
    }
    let lam = linalg::min_eigenvalue(m)?;
    if lam < -QUBIT_TOL {
        return Err(Error::InvalidMoments(format!("negative eigenvalue {lam:e}")));
    }
    let src = rho.matrix();
    let mut out = DMatrix::from_element(4, 4, ZERO);
    for a in 0..4 {
        out[(a, a)] = src[(a, a)];
        for b in a + 1..4 {
            let v = src[(a, b)] * m[(b, a)];
            out[(a, b)] = v;
            out[(b, a)] = v.conj();
        }
    }
    QubitPairState::new(out)
}

/// Finite-shot estimate of a Ramsey signal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampledSignal {
    pub shots: u64,
    pub plus_count: u64,
    /// `(2 n_+ - N) / N`, the sampled `<Q>`.
    pub estimate: f64,
}

/// Draws `shots` binomial outcomes with success probability `p_plus`.
pub fn sample_signal(p_plus: f64, shots: u64, rng: &mut ChaCha8Rng) -> Result<SampledSignal> {
    if shots == 0 {
        return Err(Error::InvalidParameter("shot count must be positive".into()));
    }
    let dist = Binomial::new(shots, p_plus.clamp(0.0, 1.0))
        .map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let plus_count = dist.sample(rng);
    Ok(SampledSignal {
        shots,
        plus_count,
        estimate: (2.0 * plus_count as f64 - shots as f64) / shots as f64,
    })
}

/// Seeded finite-shot measurement of `<Q(phi, alpha)>`.
pub fn sampled_modular_expectation(
    state: &SingleModeState,
    s: &RamseySetting,
    shots: u64,
    seed: u64,
) -> Result<SampledSignal> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_signal(outcome_probabilities(state, s).0, shots, &mut rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{cat_state, entangled_cat};
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn coupling_formulas() {
        let lam = CouplingParams::new(1.0, 1.0, 2.0 * PI).unwrap();
        assert!(displacement_amplitude(&lam).norm() < 1e-15);
        assert!((geometric_phase(&lam) - 2.0 * PI).abs() < 1e-12);
        let half = CouplingParams::new(0.7, 1.0, PI).unwrap();
        assert!((displacement_amplitude(&half) - c(-1.4, 0.0)).norm() < 1e-15);
        let quarter = CouplingParams::new(1.0, 1.0, PI / 2.0).unwrap();
        assert!((displacement_amplitude(&quarter) - c(-1.0, -1.0)).norm() < 1e-15);
        let pi = CouplingParams::new(1.0, 1.0, PI).unwrap();
        assert!((geometric_phase(&pi) - PI).abs() < 1e-15);
        assert_eq!(geometric_phase(&CouplingParams::new(1.0, 1.0, 0.0).unwrap()), 0.0);
        assert!(CouplingParams::new(0.0, 1.0, 1.0).is_err());
        assert!(CouplingParams::new(1.0, 1.0, -1.0).is_err());
    }

    #[test]
    fn vacuum_probabilities() {
        let alpha = c(0.9, -0.4);
        let (pp, pm) = outcome_probabilities(&SingleModeState::vacuum(), &RamseySetting::new(0.0, alpha).unwrap());
        let e = (-0.5 * alpha.norm_sqr()).exp();
        assert!((pp - 0.5 * (1.0 + e)).abs() < 1e-15);
        assert!((pm - 0.5 * (1.0 - e)).abs() < 1e-15);
    }

    #[test]
    fn zero_displacement_probabilities() {
        let cat = cat_state(c(1.5, 0.5), 0.3).unwrap();
        for phi in [0.0, 0.4, 2.0, -1.1] {
            let (pp, pm) = outcome_probabilities(&cat, &RamseySetting::new(phi, ZERO).unwrap());
            assert!((pp - 0.5 * (1.0 + phi.cos())).abs() < 1e-14);
            assert_eq!(pp + pm, 1.0);
        }
    }

    #[test]
    fn fock_one_modular() {
        let s = RamseySetting::new(0.0, c(2f64.sqrt(), 0.0)).unwrap();
        assert!((modular_expectation(&SingleModeState::fock(1), &s) + (-1f64).exp()).abs() < 1e-14);
        let s = RamseySetting::new(FRAC_PI_2, ZERO).unwrap();
        assert!(modular_expectation(&SingleModeState::fock(3), &s).abs() < 1e-15);
    }

    #[test]
    fn vacuum_conditional_is_superposition() {
        let alpha = c(1.2, 0.3);
        let phi = 0.7;
        let s = RamseySetting::new(phi, alpha).unwrap();
        let (post, p) = conditional_state(&SingleModeState::vacuum(), &s, Outcome::Plus).unwrap();
        let (pp, _) = outcome_probabilities(&SingleModeState::vacuum(), &s);
        assert!((p - pp).abs() < 1e-14);
        let expected = SingleModeState::superposition(&[(c(1.0, 0.0), ZERO), (Complex64::from_polar(1.0, phi), alpha)]).unwrap();
        for probe in [c(0.3, 0.1), c(-1.0, 0.5)] {
            assert!((post.chi(probe) - expected.chi(probe)).norm() < 1e-13);
        }
        let s0 = RamseySetting::new(0.0, ZERO).unwrap();
        let (post, p) = conditional_state(&SingleModeState::vacuum(), &s0, Outcome::Plus).unwrap();
        assert!((p - 1.0).abs() < 1e-15);
        assert!((post.chi(c(0.5, 0.0)) - (-0.125f64).exp()).norm() < 1e-15);
        assert!(matches!(
            conditional_state(&SingleModeState::vacuum(), &s0, Outcome::Minus),
            Err(Error::ZeroProbability(_))
        ));
    }

    #[test]
    fn conditional_routes_number_states_elsewhere() {
        let s = RamseySetting::new(0.0, c(1.0, 0.0)).unwrap();
        assert!(matches!(conditional_state(&SingleModeState::fock(2), &s, Outcome::Plus), Err(Error::Unsupported(_))));
    }

    #[test]
    fn lab_frame_rotates_state() {
        let p = CouplingParams::new(0.8, 1.0, 1.1).unwrap();
        let lab = RamseySetting::from_coupling(&p, 0.2, Frame::Lab).unwrap();
        let rot = RamseySetting::from_coupling(&p, 0.2, Frame::Rotating).unwrap();
        assert!((lab.phi - 0.2 - geometric_phase(&p)).abs() < 1e-15);
        assert_eq!(rot.free_angle, 0.0);
        let coh = SingleModeState::coherent(c(1.0, 0.0)).unwrap();
        let direct = SingleModeState::coherent(Complex64::from_polar(1.0, -1.1)).unwrap();
        let moved = RamseySetting::new(lab.phi, lab.alpha).unwrap();
        assert!((modular_expectation(&coh, &lab) - modular_expectation(&direct, &moved)).abs() < 1e-14);
    }

    #[test]
    fn two_qubit_trivial_cases() {
        let vac2 = TwoModeState::product(SingleModeState::vacuum(), SingleModeState::vacuum());
        let (a, b) = (c(0.6, 0.2), c(-0.3, 1.0));
        let v = two_qubit_correlation(&vac2, &RamseySetting::new(0.0, a).unwrap(), &RamseySetting::new(0.0, b).unwrap());
        assert!((v - (-0.5 * (a.norm_sqr() + b.norm_sqr())).exp()).abs() < 1e-15);
        let cat = entangled_cat(c(1.0, 0.0), -1).unwrap();
        let v = two_qubit_correlation(&cat, &RamseySetting::new(0.4, ZERO).unwrap(), &RamseySetting::new(-1.3, ZERO).unwrap());
        assert!((v - 0.4f64.cos() * 1.3f64.cos()).abs() < 1e-14);
        assert!((chi2_from_correlations(&cat, ZERO, ZERO).unwrap() - 1.0).norm() < 1e-14);
    }

    #[test]
    fn prepare_vacuum_gives_entangled_pair() {
        let xi0 = c(1.3, 0.0);
        let phi = 0.4;
        let phi0 = 0.25;
        let s = RamseySetting::new(phi, xi0).unwrap();
        let (state, p) = prepare_conditional(
            &SingleModeState::vacuum(),
            2.0 * phi0,
            phi0,
            &s,
            (Outcome::Minus, Outcome::Minus),
            BellVariant::Phi,
        )
        .unwrap();
        let expected = TwoModeState::pair_superposition(&[
            (c(1.0, 0.0), ZERO, ZERO),
            (Complex64::from_polar(1.0, 2.0 * phi), xi0, xi0),
        ])
        .unwrap();
        for (a, b) in [(c(0.3, 0.2), c(-0.5, 0.1)), (c(1.0, 0.0), c(0.0, 1.0))] {
            assert!((state.chi2(a, b) - expected.chi2(a, b)).norm() < 1e-13);
        }
        assert!((p - p_minus_minus(&SingleModeState::vacuum(), phi, xi0)).abs() < 1e-14);
    }

    #[test]
    fn prepare_symmetric_cat() {
        let xi0 = c(0.9, 0.2);
        let psi = SingleModeState::coherent(-xi0).unwrap();
        let s = RamseySetting::new(0.0, xi0 * 2.0).unwrap();
        let (state, _) = prepare_conditional(&psi, 0.0, 0.0, &s, (Outcome::Minus, Outcome::Minus), BellVariant::Phi).unwrap();
        let target = entangled_cat(xi0, 1).unwrap();
        for (a, b) in [(c(0.3, 0.2), c(-0.5, 0.1)), (c(2.0, 0.0), c(-2.0, 0.0))] {
            assert!((state.chi2(a, b) - target.chi2(a, b)).norm() < 1e-13);
        }
    }

    #[test]
    fn prepare_branches_sum_to_one() {
        let psi = cat_state(c(0.8, 0.4), 1.0).unwrap();
        let s = RamseySetting::new(0.3, c(0.5, -0.7)).unwrap();
        for variant in [BellVariant::Phi, BellVariant::Psi] {
            let mut total = 0.0;
            for o1 in [Outcome::Plus, Outcome::Minus] {
                for o2 in [Outcome::Plus, Outcome::Minus] {
                    total += prepare_conditional(&psi, 0.9, 0.1, &s, (o1, o2), variant).unwrap().1;
                }
            }
            assert!((total - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn psi_variant_antisymmetric_combination() {
        let xi0 = c(1.0, 0.0);
        let phi0 = 0.3;
        let s = RamseySetting::new(0.0, xi0).unwrap();
        let (state, _) = prepare_conditional(
            &SingleModeState::vacuum(),
            PI,
            phi0,
            &s,
            (Outcome::Minus, Outcome::Minus),
            BellVariant::Psi,
        )
        .unwrap();
        let expected = TwoModeState::pair_superposition(&[(c(1.0, 0.0), ZERO, xi0), (c(-1.0, 0.0), xi0, ZERO)]).unwrap();
        for (a, b) in [(c(0.3, 0.2), c(-0.5, 0.1)), (c(1.0, 0.0), c(0.0, 1.0))] {
            assert!((state.chi2(a, b) - expected.chi2(a, b)).norm() < 1e-13);
        }
    }

    #[test]
    fn moments4_basic() {
        let cat = entangled_cat(c(1.0, 0.0), 1).unwrap();
        let ones = moments4(&cat, ZERO, ZERO);
        assert!(ones.iter().all(|z| (z - 1.0).norm() < 1e-14));
        let vac2 = TwoModeState::product(SingleModeState::vacuum(), SingleModeState::vacuum());
        let (a, b) = (c(0.5, 0.1), c(-0.2, 0.7));
        let m = moments4(&vac2, a, b);
        let ea = (-0.5 * a.norm_sqr()).exp();
        let eb = (-0.5 * b.norm_sqr()).exp();
        assert!((m[(0, 3)] - ea * eb).norm() < 1e-15);
        assert!((m[(1, 2)] - ea * eb).norm() < 1e-15);
        assert!((m[(0, 1)] - eb).norm() < 1e-15);
    }

    #[test]
    fn channel_trivial_cases() {
        let rho = QubitPairState::bell_phi(0.3).unwrap();
        let ones = DMatrix::from_element(4, 4, c(1.0, 0.0));
        assert_eq!(qubit_channel(&rho, &ones).unwrap(), rho);
        let id = DMatrix::identity(4, 4);
        let out = qubit_channel(&rho, &id).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let expect = if i == j { rho.matrix()[(i, i)] } else { ZERO };
                assert_eq!(out.matrix()[(i, j)], expect);
            }
        }
        let bad = DMatrix::from_element(4, 4, c(2.0, 0.0));
        assert!(matches!(qubit_channel(&rho, &bad), Err(Error::InvalidMoments(_))));
    }

    #[test]
    fn bell_through_vacuum_channel_keeps_residual_coherence() {
        // Only the gg-ee coherence survives, scaled by <D(2) (x) D(2)> = e^{-4}.
        let vac2 = TwoModeState::product(SingleModeState::vacuum(), SingleModeState::vacuum());
        let m = moments4(&vac2, c(2.0, 0.0), c(2.0, 0.0));
        let rho = QubitPairState::bell_phi(0.0).unwrap();
        assert!((rho.ppt_min_eigenvalue().unwrap() + 0.5).abs() < 1e-12);
        let out = qubit_channel(&rho, &m).unwrap();
        assert!((out.ppt_min_eigenvalue().unwrap() + 0.5 * (-4f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn product_qubits_stay_ppt() {
        let cat = entangled_cat(c(1.0, 0.0), 1).unwrap();
        let m = moments4(&cat, c(2.0, 0.0), c(2.0, 0.0));
        let plus = [c(0.5, 0.0); 4];
        let out = qubit_channel(&QubitPairState::pure(plus).unwrap(), &m).unwrap();
        assert!(out.ppt_min_eigenvalue().unwrap() >= -1e-10);
    }

    #[test]
    fn sampler_is_reproducible() {
        let s = RamseySetting::new(0.0, c(0.5, 0.0)).unwrap();
        let vac = SingleModeState::vacuum();
        let a = sampled_modular_expectation(&vac, &s, 10_000, 7).unwrap();
        let b = sampled_modular_expectation(&vac, &s, 10_000, 7).unwrap();
        assert_eq!(a, b);
        assert!((a.estimate - (-0.125f64).exp()).abs() < 0.05);
        assert!(sampled_modular_expectation(&vac, &s, 0, 7).is_err());
    }
}
