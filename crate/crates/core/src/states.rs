//! Analytic single- and two-mode state descriptors and their characteristic
//! functions.
//!
//! All states are immutable descriptors. The symmetric-ordered characteristic
//! function is `chi(alpha) = tr{D(alpha) rho}` and the normal-ordered one is
//! `chi_N(alpha) = exp(|alpha|^2 / 2) chi(alpha)`. Everything here is in the
//! frame rotating at the mechanical frequency.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::special::laguerre;

/// A point in phase space (dimensionless displacement).
pub type ComplexAmplitude = Complex64;

/// Gram norms below this are treated as a vanishing state.
pub const MIN_NORM_SQR: f64 = 1e-14;
/// Tolerance on mixture weights summing to one.
pub const WEIGHT_TOL: f64 = 1e-12;

/// `<xi|xi'>` for coherent states.
pub fn coherent_overlap(xi: ComplexAmplitude, xi_prime: ComplexAmplitude) -> Complex64 {
    (xi.conj() * xi_prime - 0.5 * (xi.norm_sqr() + xi_prime.norm_sqr())).exp()
}

/// `<xi_a| D(alpha) |xi_b>`, using `D(alpha)|xi_b> = exp(i Im(alpha xi_b*)) |xi_b + alpha>`.
pub fn displaced_matrix_element(
    xi_a: ComplexAmplitude,
    alpha: ComplexAmplitude,
    xi_b: ComplexAmplitude,
) -> Complex64 {
    Complex64::from_polar(1.0, (alpha * xi_b.conj()).im) * coherent_overlap(xi_a, xi_b + alpha)
}

// exp(|alpha|^2/2) <xi_a|D(alpha)|xi_b>, folded into a single exponent
fn displaced_element_scaled(
    xi_a: Complex64,
    alpha: Complex64,
    xi_b: Complex64,
    normal: bool,
) -> Complex64 {
    let shifted = xi_b + alpha;
    let mut exponent = xi_a.conj() * shifted - 0.5 * (xi_a.norm_sqr() + shifted.norm_sqr())
        + Complex64::new(0.0, (alpha * xi_b.conj()).im);
    if normal {
        exponent += 0.5 * alpha.norm_sqr();
    }
    exponent.exp()
}

fn check_finite(z: Complex64, what: &'static str) -> Result<()> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}

fn check_nonneg(x: f64, what: &str) -> Result<()> {
    if x.is_finite() && x >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{what} must be finite and >= 0, got {x}")))
    }
}

fn check_weights(weights: impl Iterator<Item = f64>) -> Result<()> {
    let mut total = 0.0;
    let mut count = 0;
    for w in weights {
        if !(w.is_finite() && w >= 0.0) {
            return Err(Error::InvalidWeights(format!("weight {w} is negative or non-finite")));
        }
        total += w;
        count += 1;
    }
    if count == 0 {
        return Err(Error::InvalidWeights("mixture has no components".into()));
    }
    if (total - 1.0).abs() > WEIGHT_TOL {
        return Err(Error::InvalidWeights(format!("weights sum to {total}, expected 1")));
    }
    Ok(())
}

/// Single-mode state descriptor.
///
/// Build through the constructors, which enforce normalization.
#[derive(Debug, Clone, PartialEq)]
pub enum SingleModeState {
    /// `sum_k c_k |xi_k>`, normalized, with pairwise distinct amplitudes.
    CoherentSuperposition { terms: Vec<(Complex64, ComplexAmplitude)> },
    Fock { n: u32 },
    Thermal { n_th: f64 },
    Mixture { components: Vec<(f64, SingleModeState)> },
    /// Thermal-bath damping applied at the level of `chi_N`.
    Decohered { inner: Box<SingleModeState>, gamma_t: f64, n_th: f64 },
}

/// Squared norm of an unnormalized coherent superposition.
pub fn superposition_norm_sqr(terms: &[(Complex64, ComplexAmplitude)]) -> f64 {
    let mut total = Complex64::new(0.0, 0.0);
    for &(ck, xk) in terms {
        for &(cl, xl) in terms {
            total += ck.conj() * cl * coherent_overlap(xk, xl);
        }
    }
    total.re
}

// Exact-equality merge of repeated amplitudes; drops zero coefficients.
fn merge_terms<K: PartialEq + Copy>(terms: &[(Complex64, K)]) -> Vec<(Complex64, K)> {
    let mut out: Vec<(Complex64, K)> = Vec::with_capacity(terms.len());
    for &(c, key) in terms {
        match out.iter_mut().find(|(_, k)| *k == key) {
            Some(slot) => slot.0 += c,
            None => out.push((c, key)),
        }
    }
    out.retain(|(c, _)| c.norm_sqr() > 0.0);
    out
}

impl SingleModeState {
    pub fn vacuum() -> Self {
        SingleModeState::Fock { n: 0 }
    }

    pub fn coherent(xi: ComplexAmplitude) -> Result<Self> {
        Self::superposition(&[(Complex64::new(1.0, 0.0), xi)])
    }

    /// Normalized `sum_k c_k |xi_k>`; repeated amplitudes are merged.
    pub fn superposition(terms: &[(Complex64, ComplexAmplitude)]) -> Result<Self> {
        for &(c, xi) in terms {
            check_finite(c, "superposition coefficient")?;
            check_finite(xi, "coherent amplitude")?;
        }
        let merged = merge_terms(terms);
        let norm_sqr = superposition_norm_sqr(&merged);
        if !(norm_sqr > MIN_NORM_SQR) {
            return Err(Error::DegenerateNorm(norm_sqr));
        }
        let scale = norm_sqr.sqrt().recip();
        Ok(SingleModeState::CoherentSuperposition {
            terms: merged.into_iter().map(|(c, xi)| (c * scale, xi)).collect(),
        })
    }

    pub fn fock(n: u32) -> Self {
        SingleModeState::Fock { n }
    }

    pub fn thermal(n_th: f64) -> Result<Self> {
        check_nonneg(n_th, "thermal occupation")?;
        Ok(SingleModeState::Thermal { n_th })
    }

    pub fn mixture(components: Vec<(f64, SingleModeState)>) -> Result<Self> {
        check_weights(components.iter().map(|(w, _)| *w))?;
        Ok(SingleModeState::Mixture { components })
    }

    /// `(1 - p)|n><n| + p|0><0|`.
    pub fn fock_vacuum_mixture(n: u32, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!("vacuum weight {p} outside [0, 1]")));
        }
        Self::mixture(vec![(1.0 - p, Self::fock(n)), (p, Self::vacuum())])
    }

    /// Symmetric-ordered characteristic function `tr{D(alpha) rho}`.
    pub fn chi(&self, alpha: ComplexAmplitude) -> Complex64 {
        self.eval(alpha, false)
    }

    /// Normal-ordered characteristic function `exp(|alpha|^2/2) chi(alpha)`.
    pub fn chi_normal(&self, alpha: ComplexAmplitude) -> Complex64 {
        self.eval(alpha, true)
    }

    fn eval(&self, alpha: Complex64, normal: bool) -> Complex64 {
        let x = alpha.norm_sqr();
        match self {
            SingleModeState::CoherentSuperposition { terms } => {
                let mut total = Complex64::new(0.0, 0.0);
                for &(ck, xk) in terms {
                    for &(cl, xl) in terms {
                        total += ck.conj() * cl * displaced_element_scaled(xk, alpha, xl, normal);
                    }
                }
                total
            }
            SingleModeState::Fock { n } => {
                let lag = laguerre(*n as usize, 0, x);
                let damp = if normal { 1.0 } else { (-0.5 * x).exp() };
                Complex64::new(lag * damp, 0.0)
            }
            SingleModeState::Thermal { n_th } => {
                let rate = if normal { *n_th } else { n_th + 0.5 };
                Complex64::new((-rate * x).exp(), 0.0)
            }
            SingleModeState::Mixture { components } => components
                .iter()
                .map(|(w, s)| *w * s.eval(alpha, normal))
                .sum(),
            SingleModeState::Decohered { inner, gamma_t, n_th } => {
                let eta = (-gamma_t).exp();
                // chi_N(alpha, t) = exp(-n_th (1 - eta) |alpha|^2) chi_N(alpha sqrt(eta))
                let mut exponent = -n_th * (1.0 - eta) * x;
                if !normal {
                    exponent -= 0.5 * x;
                }
                exponent.exp() * inner.chi_normal(alpha * eta.sqrt())
            }
        }
    }

    /// Free evolution `exp(-i angle a^dag a)`; coherent amplitudes rotate by `exp(-i angle)`.
    pub fn rotated(&self, angle: f64) -> SingleModeState {
        if angle == 0.0 {
            return self.clone();
        }
        let phase = Complex64::from_polar(1.0, -angle);
        match self {
            SingleModeState::CoherentSuperposition { terms } => SingleModeState::CoherentSuperposition {
                terms: terms.iter().map(|&(c, xi)| (c, xi * phase)).collect(),
            },
            SingleModeState::Fock { .. } | SingleModeState::Thermal { .. } => self.clone(),
            SingleModeState::Mixture { components } => SingleModeState::Mixture {
                components: components.iter().map(|(w, s)| (*w, s.rotated(angle))).collect(),
            },
            SingleModeState::Decohered { inner, gamma_t, n_th } => SingleModeState::Decohered {
                inner: Box::new(inner.rotated(angle)),
                gamma_t: *gamma_t,
                n_th: *n_th,
            },
        }
    }

    /// Rough phase-space extent: largest coherent amplitude, or `sqrt` of the
    /// largest occupation scale for number-diagonal states.
    pub fn extent(&self) -> f64 {
        match self {
            SingleModeState::CoherentSuperposition { terms } => {
                terms.iter().map(|(_, xi)| xi.norm()).fold(0.0, f64::max)
            }
            SingleModeState::Fock { n } => (*n as f64).sqrt(),
            SingleModeState::Thermal { n_th } => (3.0 * n_th).sqrt(),
            SingleModeState::Mixture { components } => {
                components.iter().map(|(_, s)| s.extent()).fold(0.0, f64::max)
            }
            // loss only shrinks amplitudes; the added noise has variance n_th (1 - e^{-gamma t})
            SingleModeState::Decohered { inner, gamma_t, n_th } => {
                inner.extent() + (3.0 * n_th * -(-gamma_t).exp_m1()).sqrt()
            }
        }
    }
}

/// `(|0> + e^{i theta}|xi0>) / sqrt(4 p_+)` normalization: `p_+ = (1 + cos(theta) e^{-|xi0|^2/2}) / 2`.
pub fn cat_p_plus(xi0: ComplexAmplitude, theta: f64) -> f64 {
    0.5 * (1.0 + theta.cos() * (-0.5 * xi0.norm_sqr()).exp())
}

/// Cat state `(|0> + e^{i theta}|xi0>) / sqrt(4 p_+)`.
pub fn cat_state(xi0: ComplexAmplitude, theta: f64) -> Result<SingleModeState> {
    check_finite(xi0, "cat amplitude")?;
    let p_plus = cat_p_plus(xi0, theta);
    if !(p_plus > MIN_NORM_SQR) {
        return Err(Error::DegenerateNorm(4.0 * p_plus));
    }
    let scale = (4.0 * p_plus).sqrt().recip();
    SingleModeState::superposition(&[
        (Complex64::new(scale, 0.0), Complex64::new(0.0, 0.0)),
        (Complex64::from_polar(scale, theta), xi0),
    ])
}

/// Wraps `state` in thermal-bath damping for a dimensionless time `gamma_t`.
pub fn decohere(state: &SingleModeState, gamma_t: f64, n_th: f64) -> Result<SingleModeState> {
    check_nonneg(gamma_t, "gamma_t")?;
    check_nonneg(n_th, "n_th")?;
    Ok(SingleModeState::Decohered { inner: Box::new(state.clone()), gamma_t, n_th })
}

/// Two-mode state descriptor.
#[derive(Debug, Clone, PartialEq)]
pub enum TwoModeState {
    /// `sum_k c_k |xi_k, zeta_k>`, normalized.
    PairSuperposition { terms: Vec<(Complex64, ComplexAmplitude, ComplexAmplitude)> },
    Product { left: Box<SingleModeState>, right: Box<SingleModeState> },
    Mixture { components: Vec<(f64, TwoModeState)> },
}

/// Squared norm of an unnormalized two-mode coherent superposition.
pub fn pair_norm_sqr(terms: &[(Complex64, ComplexAmplitude, ComplexAmplitude)]) -> f64 {
    let mut total = Complex64::new(0.0, 0.0);
    for &(ck, xk, zk) in terms {
        for &(cl, xl, zl) in terms {
            total += ck.conj() * cl * coherent_overlap(xk, xl) * coherent_overlap(zk, zl);
        }
    }
    total.re
}

impl TwoModeState {
    pub fn pair_superposition(
        terms: &[(Complex64, ComplexAmplitude, ComplexAmplitude)],
    ) -> Result<Self> {
        for &(c, x, z) in terms {
            check_finite(c, "superposition coefficient")?;
            check_finite(x, "coherent amplitude")?;
            check_finite(z, "coherent amplitude")?;
        }
        let keyed: Vec<_> = terms.iter().map(|&(c, x, z)| (c, (x, z))).collect();
        let merged: Vec<_> = merge_terms(&keyed).into_iter().map(|(c, (x, z))| (c, x, z)).collect();
        let norm_sqr = pair_norm_sqr(&merged);
        if !(norm_sqr > MIN_NORM_SQR) {
            return Err(Error::DegenerateNorm(norm_sqr));
        }
        let scale = norm_sqr.sqrt().recip();
        Ok(TwoModeState::PairSuperposition {
            terms: merged.into_iter().map(|(c, x, z)| (c * scale, x, z)).collect(),
        })
    }

    pub fn product(left: SingleModeState, right: SingleModeState) -> Self {
        TwoModeState::Product { left: Box::new(left), right: Box::new(right) }
    }

    pub fn mixture(components: Vec<(f64, TwoModeState)>) -> Result<Self> {
        check_weights(components.iter().map(|(w, _)| *w))?;
        Ok(TwoModeState::Mixture { components })
    }

    /// Two-mode characteristic function `tr{D(alpha) D(beta) rho}`.
    pub fn chi2(&self, alpha: ComplexAmplitude, beta: ComplexAmplitude) -> Complex64 {
        match self {
            TwoModeState::PairSuperposition { terms } => {
                let mut total = Complex64::new(0.0, 0.0);
                for &(ck, xk, zk) in terms {
                    for &(cl, xl, zl) in terms {
                        total += ck.conj()
                            * cl
                            * displaced_matrix_element(xk, alpha, xl)
                            * displaced_matrix_element(zk, beta, zl);
                    }
                }
                total
            }
            TwoModeState::Product { left, right } => left.chi(alpha) * right.chi(beta),
            TwoModeState::Mixture { components } => {
                components.iter().map(|(w, s)| *w * s.chi2(alpha, beta)).sum()
            }
        }
    }

    /// Independent free evolution of both modes.
    pub fn rotated(&self, angle1: f64, angle2: f64) -> TwoModeState {
        if angle1 == 0.0 && angle2 == 0.0 {
            return self.clone();
        }
        let (p1, p2) = (Complex64::from_polar(1.0, -angle1), Complex64::from_polar(1.0, -angle2));
        match self {
            TwoModeState::PairSuperposition { terms } => TwoModeState::PairSuperposition {
                terms: terms.iter().map(|&(c, x, z)| (c, x * p1, z * p2)).collect(),
            },
            TwoModeState::Product { left, right } => {
                TwoModeState::product(left.rotated(angle1), right.rotated(angle2))
            }
            TwoModeState::Mixture { components } => TwoModeState::Mixture {
                components: components
                    .iter()
                    .map(|(w, s)| (*w, s.rotated(angle1, angle2)))
                    .collect(),
            },
        }
    }

    /// Largest per-mode phase-space extent.
    pub fn extent(&self) -> f64 {
        match self {
            TwoModeState::PairSuperposition { terms } => terms
                .iter()
                .map(|(_, x, z)| x.norm().max(z.norm()))
                .fold(0.0, f64::max),
            TwoModeState::Product { left, right } => left.extent().max(right.extent()),
            TwoModeState::Mixture { components } => {
                components.iter().map(|(_, s)| s.extent()).fold(0.0, f64::max)
            }
        }
    }
}

/// `N (|xi0, xi0> + sign |-xi0, -xi0>)` with `N = 1/sqrt(2 + 2 sign e^{-4|xi0|^2})`.
pub fn entangled_cat(xi0: ComplexAmplitude, sign: i8) -> Result<TwoModeState> {
    check_finite(xi0, "cat amplitude")?;
    let s = match sign {
        1 => 1.0,
        -1 => -1.0,
        _ => return Err(Error::InvalidParameter(format!("sign must be +1 or -1, got {sign}"))),
    };
    let norm_sqr = 2.0 + 2.0 * s * (-4.0 * xi0.norm_sqr()).exp();
    if !(norm_sqr > MIN_NORM_SQR) {
        return Err(Error::DegenerateNorm(norm_sqr));
    }
    let n = norm_sqr.sqrt().recip();
    TwoModeState::pair_superposition(&[
        (Complex64::new(n, 0.0), xi0, xi0),
        (Complex64::new(s * n, 0.0), -xi0, -xi0),
    ])
}
