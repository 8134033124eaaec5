//! Brute-force verification path in a truncated Fock basis.
//!
//! Nothing here uses the closed-form characteristic functions or the
//! displacement composition rule: states are expanded into number-basis
//! vectors or density matrices, operators are built from their matrix
//! elements, and expectation values are plain traces. The truncation
//! dimension is chosen adaptively (see [`converge`]).

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::special::ln_factorials;
use crate::states::{SingleModeState, TwoModeState};

pub use crate::special::laguerre;

/// Maximum trace leakage accepted for a truncated density matrix.
pub const LEAKAGE_TOL: f64 = 1e-6;
/// Two consecutive dimensions must agree to this for convergence.
pub const CONVERGENCE_TOL: f64 = 1e-9;
/// Largest per-mode truncation the oracle will try.
pub const MAX_DIM: usize = 400;
/// Gauss-Hermite nodes per axis for the additive-noise channel.
pub const NOISE_NODES: usize = 24;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Operator or density matrix on one truncated mode.
#[derive(Debug, Clone, PartialEq)]
pub struct FockMatrix {
    pub dim: usize,
    pub entries: DMatrix<Complex64>,
}

impl FockMatrix {
    pub fn identity(dim: usize) -> Self {
        FockMatrix { dim, entries: DMatrix::identity(dim, dim) }
    }

    pub fn trace(&self) -> Complex64 {
        self.entries.trace()
    }

    pub fn adjoint(&self) -> Self {
        FockMatrix { dim: self.dim, entries: self.entries.adjoint() }
    }
}

/// Two-mode density operator in the product Fock basis, kept in factored form
/// where possible so that per-mode dimensions of a few hundred stay cheap.
#[derive(Debug, Clone)]
pub enum TwoModeDensity {
    /// `|psi> = sum_t c_t |l_t> (x) |r_t>` with truncated single-mode vectors.
    Pure { dim: usize, terms: Vec<(Complex64, DVector<Complex64>, DVector<Complex64>)> },
    Product(FockMatrix, FockMatrix),
    Mixture(Vec<(f64, TwoModeDensity)>),
}

impl TwoModeDensity {
    pub fn dim(&self) -> usize {
        match self {
            TwoModeDensity::Pure { dim, .. } => *dim,
            TwoModeDensity::Product(a, _) => a.dim,
            TwoModeDensity::Mixture(parts) => parts.first().map_or(0, |(_, p)| p.dim()),
        }
    }

    pub fn trace(&self) -> f64 {
        match self {
            TwoModeDensity::Pure { terms, .. } => {
                let mut total = ZERO;
                for (c, l, r) in terms {
                    for (c2, l2, r2) in terms {
                        total += c.conj() * c2 * l.dotc(l2) * r.dotc(r2);
                    }
                }
                total.re
            }
            TwoModeDensity::Product(a, b) => (a.trace() * b.trace()).re,
            TwoModeDensity::Mixture(parts) => parts.iter().map(|(w, p)| w * p.trace()).sum(),
        }
    }

    /// Full `dim^2 x dim^2` matrix, index `(m, n) -> dim * m + n`.
    pub fn to_dense(&self) -> FockMatrix {
        let d = self.dim();
        let entries = match self {
            TwoModeDensity::Pure { terms, .. } => {
                let v = terms
                    .iter()
                    .fold(DVector::zeros(d * d), |acc, (c, l, r)| acc + l.kronecker(r) * *c);
                &v * v.adjoint()
            }
            TwoModeDensity::Product(a, b) => a.entries.kronecker(&b.entries),
            TwoModeDensity::Mixture(parts) => parts.iter().fold(
                DMatrix::zeros(d * d, d * d),
                |acc, (w, p)| acc + p.to_dense().entries * Complex64::new(*w, 0.0),
            ),
        };
        FockMatrix { dim: d * d, entries }
    }
}

fn check_dims(a: usize, b: usize) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::DimensionMismatch(a, b))
    }
}

/// Number-basis matrix of `D(alpha)`:
/// `<m|D|n> = sqrt(n!/m!) alpha^{m-n} e^{-|alpha|^2/2} L_n^{(m-n)}(|alpha|^2)` for `m >= n`,
/// and `sqrt(m!/n!) (-alpha*)^{n-m} e^{-|alpha|^2/2} L_m^{(n-m)}(|alpha|^2)` otherwise.
/// Factorial ratios are handled in log space.
pub fn displacement_matrix(alpha: Complex64, dim: usize) -> FockMatrix {
    assert!(dim >= 1);
    if alpha.norm_sqr() == 0.0 {
        return FockMatrix::identity(dim);
    }
    let x = alpha.norm_sqr();
    let (r, arg) = alpha.to_polar();
    let ln_r = r.ln();
    let lf = ln_factorials(dim);
    let mut entries = DMatrix::zeros(dim, dim);
    for k in 0..dim {
        let lower = Complex64::from_polar(1.0, k as f64 * arg);
        let upper = Complex64::from_polar(1.0, k as f64 * (std::f64::consts::PI - arg));
        // L_n^{(k)} for n = 0, 1, ... by the three-term recurrence in n
        let kf = k as f64;
        let (mut prev, mut cur, mut scale) = (0.0, 1.0, 0.0);
        for n in 0..dim - k {
            if n > 0 {
                let m = (n - 1) as f64;
                let next = ((2.0 * m + 1.0 + kf - x) * cur - (m + kf) * prev) / (m + 1.0);
                prev = cur;
                cur = next;
                if cur.abs().max(prev.abs()) > 1e150 {
                    prev /= 1e150;
                    cur /= 1e150;
                    scale += 150.0 * std::f64::consts::LN_10;
                }
            }
            let mant = cur;
            let mag = mant * (0.5 * (lf[n] - lf[n + k]) + k as f64 * ln_r - 0.5 * x + scale).exp();
            entries[(n + k, n)] = lower * mag;
            if k > 0 {
                entries[(n, n + k)] = upper * mag;
            }
        }
    }
    FockMatrix { dim, entries }
}

/// Truncated number-basis amplitudes of `|xi>`.
pub fn coherent_vector(xi: Complex64, dim: usize) -> DVector<Complex64> {
    let mut v = DVector::zeros(dim);
    let mut cur = (-0.5 * xi.norm_sqr()).exp() * ONE;
    for n in 0..dim {
        v[n] = cur;
        cur = cur * xi / ((n + 1) as f64).sqrt();
    }
    v
}

fn leakage_check(dim: usize, trace: f64) -> Result<()> {
    let leakage = (1.0 - trace).abs();
    if leakage < LEAKAGE_TOL {
        Ok(())
    } else {
        Err(Error::Truncation { dim, leakage })
    }
}

/// Density matrix of a single-mode state at truncation `dim`.
///
/// Decohered states are realized through the channel itself: a pure-loss
/// Kraus sum followed, for `n_th > 0`, by Gaussian random displacements.
pub fn state_to_matrix(state: &SingleModeState, dim: usize) -> Result<FockMatrix> {
    let rho = raw_density(state, dim)?;
    leakage_check(dim, rho.trace().re)?;
    Ok(rho)
}

fn raw_density(state: &SingleModeState, dim: usize) -> Result<FockMatrix> {
    let entries = match state {
        SingleModeState::CoherentSuperposition { terms } => {
            let v = terms
                .iter()
                .fold(DVector::zeros(dim), |acc, &(c, xi)| acc + coherent_vector(xi, dim) * c);
            &v * v.adjoint()
        }
        SingleModeState::Fock { n } => {
            let n = *n as usize;
            if n >= dim {
                return Err(Error::Truncation { dim, leakage: 1.0 });
            }
            let mut m = DMatrix::zeros(dim, dim);
            m[(n, n)] = ONE;
            m
        }
        SingleModeState::Thermal { n_th } => {
            let q = n_th / (1.0 + n_th);
            DMatrix::from_diagonal(&DVector::from_fn(dim, |n, _| {
                Complex64::new((1.0 - q) * q.powi(n as i32), 0.0)
            }))
        }
        SingleModeState::Mixture { components } => {
            let mut acc = DMatrix::zeros(dim, dim);
            for (w, s) in components {
                acc += raw_density(s, dim)?.entries * Complex64::new(*w, 0.0);
            }
            acc
        }
        SingleModeState::Decohered { inner, gamma_t, n_th } => {
            let eta = (-gamma_t).exp();
            let lossy = amplitude_damping(&raw_density(inner, dim)?, eta);
            if *n_th > 0.0 {
                gaussian_noise(&lossy, n_th * (1.0 - eta), NOISE_NODES).entries
            } else {
                lossy.entries
            }
        }
    };
    Ok(FockMatrix { dim, entries })
}

/// Pure-loss channel with transmissivity `eta`, as the Kraus sum
/// `K_k = sum_n sqrt(C(n,k)) eta^{(n-k)/2} (1-eta)^{k/2} |n-k><n|`.
pub fn amplitude_damping(rho: &FockMatrix, eta: f64) -> FockMatrix {
    let d = rho.dim;
    let lf = ln_factorials(d);
    let ln_binom = |n: usize, k: usize| lf[n] - lf[k] - lf[n - k];
    let mut out = DMatrix::zeros(d, d);
    for m in 0..d {
        for mp in 0..d {
            let mut acc = ZERO;
            for k in 0..d - m.max(mp) {
                let w = if k == 0 {
                    1.0
                } else {
                    (0.5 * (ln_binom(m + k, k) + ln_binom(mp + k, k))).exp() * (1.0 - eta).powi(k as i32)
                };
                acc += rho.entries[(m + k, mp + k)] * w;
            }
            out[(m, mp)] = acc * eta.powf(0.5 * (m + mp) as f64);
        }
    }
    FockMatrix { dim: d, entries: out }
}

/// Gauss-Hermite nodes and weights for `int e^{-t^2} f(t) dt` (Golub-Welsch).
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    let jacobi = DMatrix::from_fn(n, n, |i, j| {
        if i.abs_diff(j) == 1 {
            (i.max(j) as f64 / 2.0).sqrt()
        } else {
            0.0
        }
    });
    let eig = jacobi.symmetric_eigen();
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            (eig.eigenvalues[i], std::f64::consts::PI.sqrt() * v0 * v0)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

/// Classical Gaussian random displacement with `E|beta|^2 = variance`:
/// `rho -> int P(beta) D(beta) rho D(beta)^dag`, by tensor-product Gauss-Hermite.
pub fn gaussian_noise(rho: &FockMatrix, variance: f64, nodes: usize) -> FockMatrix {
    if variance <= 0.0 {
        return rho.clone();
    }
    let (t, w) = gauss_hermite(nodes);
    let sigma = variance.sqrt();
    let mut out = DMatrix::zeros(rho.dim, rho.dim);
    for i in 0..nodes {
        for j in 0..nodes {
            let weight = w[i] * w[j] / std::f64::consts::PI;
            let d = displacement_matrix(Complex64::new(sigma * t[i], sigma * t[j]), rho.dim);
            out += (&d.entries * &rho.entries * d.entries.adjoint()) * Complex64::new(weight, 0.0);
        }
    }
    FockMatrix { dim: rho.dim, entries: out }
}

/// Two-mode density at per-mode truncation `dim`.
pub fn two_mode_to_matrix(state: &TwoModeState, dim: usize) -> Result<TwoModeDensity> {
    let rho = raw_two_mode(state, dim)?;
    leakage_check(dim, rho.trace())?;
    Ok(rho)
}

fn raw_two_mode(state: &TwoModeState, dim: usize) -> Result<TwoModeDensity> {
    Ok(match state {
        TwoModeState::PairSuperposition { terms } => {
            let terms = terms
                .iter()
                .map(|&(c, x, z)| (c, coherent_vector(x, dim), coherent_vector(z, dim)))
                .collect();
            TwoModeDensity::Pure { dim, terms }
        }
        TwoModeState::Product { left, right } => {
            TwoModeDensity::Product(raw_density(left, dim)?, raw_density(right, dim)?)
        }
        TwoModeState::Mixture { components } => TwoModeDensity::Mixture(
            components
                .iter()
                .map(|(w, s)| Ok((*w, raw_two_mode(s, dim)?)))
                .collect::<Result<_>>()?,
        ),
    })
}

/// `tr{A rho}`.
pub fn expval(op: &FockMatrix, rho: &FockMatrix) -> Result<Complex64> {
    check_dims(op.dim, rho.dim)?;
    // tr{A B} = sum_ij A_ij B_ji without forming the product
    Ok(op.entries.iter().zip(rho.entries.transpose().iter()).map(|(a, b)| a * b).sum())
}

/// `tr{(A (x) B) rho}` for a two-mode density.
pub fn expval2(a: &FockMatrix, b: &FockMatrix, rho: &TwoModeDensity) -> Result<Complex64> {
    check_dims(a.dim, b.dim)?;
    check_dims(a.dim, rho.dim())?;
    Ok(match rho {
        TwoModeDensity::Pure { terms, .. } => {
            let mut total = ZERO;
            for (c2, l2, r2) in terms {
                let (al, br) = (&a.entries * l2, &b.entries * r2);
                for (c, l, r) in terms {
                    total += c.conj() * c2 * l.dotc(&al) * r.dotc(&br);
                }
            }
            total
        }
        TwoModeDensity::Product(r1, r2) => expval(a, r1)? * expval(b, r2)?,
        TwoModeDensity::Mixture(parts) => {
            let mut acc = ZERO;
            for (w, p) in parts {
                acc += expval2(a, b, p)? * *w;
            }
            acc
        }
    })
}

/// Starting truncation for a problem whose amplitudes reach `extent`.
pub fn start_dim(extent: f64) -> usize {
    ((4.0 * extent * extent + 20.0).ceil() as usize).min(MAX_DIM)
}

/// Evaluates `f` at doubling truncations until two consecutive results agree
/// to [`CONVERGENCE_TOL`] (max-abs over the vector). Truncation errors at a
/// given dimension just move on to the next one. Returns the result and the
/// dimension it was obtained at.
pub fn converge<F>(extent: f64, mut f: F) -> Result<(Vec<Complex64>, usize)>
where
    F: FnMut(usize) -> Result<Vec<Complex64>>,
{
    let mut dim = start_dim(extent);
    let mut prev: Option<Vec<Complex64>> = None;
    loop {
        match f(dim) {
            Ok(cur) => {
                if let Some(p) = &prev {
                    let diff = p
                        .iter()
                        .zip(&cur)
                        .map(|(a, b)| (a - b).norm())
                        .fold(0.0, f64::max);
                    if diff < CONVERGENCE_TOL {
                        return Ok((cur, dim));
                    }
                }
                prev = Some(cur);
            }
            Err(Error::Truncation { .. }) => prev = None,
            Err(e) => return Err(e),
        }
        if dim >= MAX_DIM {
            return Err(Error::NoConvergence(MAX_DIM));
        }
        dim = (2 * dim).min(MAX_DIM);
    }
}

fn single(v: Vec<Complex64>) -> Complex64 {
    v[0]
}

// Truncated state vector for pure states.
fn pure_vector(state: &SingleModeState, dim: usize) -> Option<Result<DVector<Complex64>>> {
    match state {
        SingleModeState::CoherentSuperposition { terms } => {
            let v = terms
                .iter()
                .fold(DVector::zeros(dim), |acc, &(c, xi)| acc + coherent_vector(xi, dim) * c);
            Some(leakage_check(dim, v.norm_squared()).map(|_| v))
        }
        SingleModeState::Fock { n } if (*n as usize) < dim => {
            let mut v = DVector::zeros(dim);
            v[*n as usize] = ONE;
            Some(Ok(v))
        }
        SingleModeState::Fock { .. } => Some(Err(Error::Truncation { dim, leakage: 1.0 })),
        _ => None,
    }
}

/// `tr{D(alpha) rho}` from the truncated density matrix (or state vector).
pub fn chi(state: &SingleModeState, alpha: Complex64) -> Result<Complex64> {
    let (v, _) = converge(state.extent() + alpha.norm(), |dim| {
        let d = displacement_matrix(alpha, dim);
        if let Some(psi) = pure_vector(state, dim) {
            let psi = psi?;
            return Ok(vec![psi.dotc(&(&d.entries * &psi))]);
        }
        let rho = state_to_matrix(state, dim)?;
        Ok(vec![expval(&d, &rho)?])
    })?;
    Ok(single(v))
}

/// `tr{D(alpha) (x) D(beta) rho}` from the truncated two-mode density.
pub fn chi2(state: &TwoModeState, alpha: Complex64, beta: Complex64) -> Result<Complex64> {
    let (v, _) = converge(state.extent() + alpha.norm().max(beta.norm()), |dim| {
        let rho = two_mode_to_matrix(state, dim)?;
        Ok(vec![expval2(&displacement_matrix(alpha, dim), &displacement_matrix(beta, dim), &rho)?])
    })?;
    Ok(single(v))
}

fn ramsey_kraus(phi: f64, alpha: Complex64, free_angle: f64, sign: f64, dim: usize) -> DMatrix<Complex64> {
    let d = displacement_matrix(alpha, dim).entries * Complex64::from_polar(sign, phi);
    let mut e = (DMatrix::identity(dim, dim) + d) * Complex64::new(0.5, 0.0);
    // right factor U_0 is diagonal: scale columns
    for (n, mut col) in e.column_iter_mut().enumerate() {
        col *= Complex64::from_polar(1.0, -free_angle * n as f64);
    }
    e
}

/// Ramsey outcome probabilities `(p_+, p_-)` as `tr{E rho E^dag}` with
/// `E_+- = (1 +- e^{i phi} D(alpha)) U_0 / 2`.
pub fn outcome_probabilities(
    state: &SingleModeState,
    phi: f64,
    alpha: Complex64,
    free_angle: f64,
) -> Result<(f64, f64)> {
    let (v, _) = converge(state.extent() + alpha.norm(), |dim| {
        let mut out = Vec::with_capacity(2);
        if let Some(psi) = pure_vector(state, dim) {
            let psi = psi?;
            for sign in [1.0, -1.0] {
                let image = ramsey_kraus(phi, alpha, free_angle, sign, dim) * &psi;
                out.push(Complex64::new(image.norm_squared(), 0.0));
            }
            return Ok(out);
        }
        let rho = state_to_matrix(state, dim)?;
        for sign in [1.0, -1.0] {
            // tr{E rho E^dag} = sum_ij (E rho)_ij conj(E_ij)
            let e = ramsey_kraus(phi, alpha, free_angle, sign, dim);
            out.push(e.dotc(&(&e * &rho.entries)));
        }
        Ok(out)
    })?;
    Ok((v[0].re, v[1].re))
}

/// Post-measurement density `E rho E^dag / p` and the outcome probability.
pub fn conditional_density(
    state: &SingleModeState,
    phi: f64,
    alpha: Complex64,
    free_angle: f64,
    sign: f64,
    dim: usize,
) -> Result<(FockMatrix, f64)> {
    let rho = state_to_matrix(state, dim)?;
    let e = ramsey_kraus(phi, alpha, free_angle, sign, dim);
    let out = &e * &rho.entries * e.adjoint();
    let p = out.trace().re;
    if p <= 1e-14 {
        return Err(Error::ZeroProbability(p));
    }
    Ok((FockMatrix { dim, entries: out / Complex64::new(p, 0.0) }, p))
}

/// Unnormalized two-mode state after both qubits of `sum bell[2 q1 + q2] |q1 q2>`
/// (`q = 0` ground, `1` excited) drive Ramsey sequences on modes prepared in
/// `psi` and are read out with signs `(s1, s2)` (`+1` excited). Each sequence
/// is simulated as `R C R` with `R = [[1, -1], [1, 1]] / sqrt 2` on `(g, e)`
/// and `C = |g><g| (x) 1 + |e><e| (x) e^{i phi} D(alpha)`. The trace of the
/// result is the branch probability.
pub fn ramsey_pair_branch(
    psi: &SingleModeState,
    bell: [Complex64; 4],
    phi: f64,
    alpha: Complex64,
    signs: (f64, f64),
    dim: usize,
) -> Result<TwoModeDensity> {
    let v = match pure_vector(psi, dim) {
        Some(v) => v?,
        None => return Err(Error::Unsupported("pair preparation oracle needs a pure coherent superposition")),
    };
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let r = [[h, -h], [h, h]];
    let kicked = displacement_matrix(alpha, dim).entries * Complex64::from_polar(1.0, phi);
    let branch = |q_out: usize, q_in: usize| -> DVector<Complex64> {
        let through_g = &v * Complex64::new(r[q_out][0] * r[0][q_in], 0.0);
        let through_e = &kicked * &v * Complex64::new(r[q_out][1] * r[1][q_in], 0.0);
        through_g + through_e
    };
    let out = |s: f64| if s > 0.0 { 1 } else { 0 };
    let (o1, o2) = (out(signs.0), out(signs.1));
    let mut terms = Vec::new();
    for (idx, &b) in bell.iter().enumerate() {
        if b != ZERO {
            terms.push((b, branch(o1, idx / 2), branch(o2, idx % 2)));
        }
    }
    Ok(TwoModeDensity::Pure { dim, terms })
}

/// Gram matrix `M_{ab} = <V_a^dag V_b>` for `V_{(i,j)} = D(ops1[i]) (x) D(ops2[j])`,
/// index `(i, j) -> ops2.len() * i + j`. Computed from the displaced state
/// vectors (pure parts) or from truncated operator products (mixed parts).
pub fn moments(state: &TwoModeState, ops1: &[Complex64], ops2: &[Complex64]) -> Result<DMatrix<Complex64>> {
    let extent = state.extent() + ops1.iter().chain(ops2).map(|z| z.norm()).fold(0.0, f64::max);
    let size = ops1.len() * ops2.len();
    let (v, _) = converge(extent, |dim| {
        let rho = two_mode_to_matrix(state, dim)?;
        let d1: Vec<_> = ops1.iter().map(|&z| displacement_matrix(z, dim).entries).collect();
        let d2: Vec<_> = ops2.iter().map(|&z| displacement_matrix(z, dim).entries).collect();
        let m = gram(&rho, &d1, &d2)?;
        Ok(m.iter().copied().collect())
    })?;
    Ok(DMatrix::from_column_slice(size, size, &v))
}

fn gram(rho: &TwoModeDensity, d1: &[DMatrix<Complex64>], d2: &[DMatrix<Complex64>]) -> Result<DMatrix<Complex64>> {
    let n2 = d2.len();
    let size = d1.len() * n2;
    Ok(match rho {
        TwoModeDensity::Pure { terms, .. } => {
            // M_{(k,l),(k',l')} = sum_{t,t'} c_t* c_t' <A_k l_t, A_k' l_t'> <B_l r_t, B_l' r_t'>
            let img1: Vec<Vec<DVector<Complex64>>> =
                d1.iter().map(|a| terms.iter().map(|(_, l, _)| a * l).collect()).collect();
            let img2: Vec<Vec<DVector<Complex64>>> =
                d2.iter().map(|b| terms.iter().map(|(_, _, r)| b * r).collect()).collect();
            DMatrix::from_fn(size, size, |p, q| {
                let (k, l, k2, l2) = (p / n2, p % n2, q / n2, q % n2);
                let mut total = ZERO;
                for (t, (c, _, _)) in terms.iter().enumerate() {
                    for (t2, (c2, _, _)) in terms.iter().enumerate() {
                        total += c.conj() * c2 * img1[k][t].dotc(&img1[k2][t2]) * img2[l][t].dotc(&img2[l2][t2]);
                    }
                }
                total
            })
        }
        TwoModeDensity::Product(r1, r2) => {
            // tr{A_a^dag A_b r} = sum_ij conj(A_a)_ij (A_b r)_ij
            let single = |ops: &[DMatrix<Complex64>], r: &FockMatrix| {
                let images: Vec<DMatrix<Complex64>> = ops.iter().map(|b| b * &r.entries).collect();
                DMatrix::from_fn(ops.len(), ops.len(), |a, b| ops[a].dotc(&images[b]))
            };
            single(d1, r1).kronecker(&single(d2, r2))
        }
        TwoModeDensity::Mixture(parts) => {
            let mut acc = DMatrix::zeros(size, size);
            for (w, p) in parts {
                acc += gram(p, d1, d2)? * Complex64::new(*w, 0.0);
            }
            acc
        }
    })
}

/// `sum_k c_k tr{D(x_k) (x) D(y_k) rho}` for a list of `(c_k, x_k, y_k)`.
pub fn expval_words(state: &TwoModeState, terms: &[(Complex64, Complex64, Complex64)]) -> Result<Complex64> {
    let extent = state.extent()
        + terms.iter().map(|(_, x, y)| x.norm().max(y.norm())).fold(0.0, f64::max);
    let (v, _) = converge(extent, |dim| {
        let rho = two_mode_to_matrix(state, dim)?;
        // words share amplitudes; build each displacement matrix once
        let mut cache: Vec<(Complex64, FockMatrix)> = Vec::new();
        let mut lookup = |z: Complex64| -> usize {
            if let Some(i) = cache.iter().position(|(a, _)| *a == z) {
                return i;
            }
            cache.push((z, displacement_matrix(z, dim)));
            cache.len() - 1
        };
        let idx: Vec<(usize, usize)> = terms.iter().map(|&(_, x, y)| (lookup(x), lookup(y))).collect();
        let mut acc = ZERO;
        for (&(c, _, _), &(i, j)) in terms.iter().zip(&idx) {
            acc += c * expval2(&cache[i].1, &cache[j].1, &rho)?;
        }
        Ok(vec![acc])
    })?;
    Ok(single(v))
}
