//! Seeded random states and matrices shared by the integration tests.

#![allow(dead_code)]

use std::f64::consts::PI;

use macrocat::entanglement::Settings;
use macrocat::ramsey::QubitPairState;
use macrocat::states::{cat_state, decohere, entangled_cat, SingleModeState, TwoModeState};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Uniform point in the disk of radius `r`.
pub fn disk(rng: &mut ChaCha8Rng, r: f64) -> Complex64 {
    Complex64::from_polar(r * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..2.0 * PI))
}

pub fn gauss_complex(rng: &mut ChaCha8Rng) -> Complex64 {
    // Box-Muller on each component
    let mut g = || {
        let (u, v): (f64, f64) = (rng.gen_range(1e-12..1.0), rng.gen());
        (-2.0 * u.ln()).sqrt() * (2.0 * PI * v).cos()
    };
    c(g(), g())
}

pub fn superposition(rng: &mut ChaCha8Rng, max_terms: usize, r: f64) -> SingleModeState {
    loop {
        let n = rng.gen_range(1..=max_terms);
        let terms: Vec<_> = (0..n).map(|_| (gauss_complex(rng), disk(rng, r))).collect();
        if let Ok(s) = SingleModeState::superposition(&terms) {
            return s;
        }
    }
}

pub fn cat(rng: &mut ChaCha8Rng, r: f64) -> SingleModeState {
    loop {
        if let Ok(s) = cat_state(disk(rng, r), rng.gen_range(0.0..2.0 * PI)) {
            return s;
        }
    }
}

/// Any single-mode family; amplitudes within `r`.
pub fn single(rng: &mut ChaCha8Rng, r: f64) -> SingleModeState {
    match rng.gen_range(0..8) {
        0 => SingleModeState::coherent(disk(rng, r)).unwrap(),
        1 => cat(rng, r),
        2 => superposition(rng, 3, r),
        3 => SingleModeState::fock(rng.gen_range(0..5)),
        4 => SingleModeState::thermal(rng.gen_range(0.0..2.0)).unwrap(),
        5 => SingleModeState::fock_vacuum_mixture(rng.gen_range(1..4), rng.gen()).unwrap(),
        6 => {
            let p: f64 = rng.gen();
            SingleModeState::mixture(vec![(p, cat(rng, r)), (1.0 - p, superposition(rng, 2, r))]).unwrap()
        }
        // zero temperature: the noisy channel oracle is too slow for panels
        _ => decohere(&cat(rng, r), rng.gen_range(0.0..2.0), 0.0).unwrap(),
    }
}

/// Pure coherent-superposition states only.
pub fn coherent_family(rng: &mut ChaCha8Rng, r: f64) -> SingleModeState {
    if rng.gen_bool(0.5) {
        cat(rng, r)
    } else {
        superposition(rng, 3, r)
    }
}

pub fn pair_superposition(rng: &mut ChaCha8Rng, max_terms: usize, r: f64) -> TwoModeState {
    loop {
        let n = rng.gen_range(1..=max_terms);
        let terms: Vec<_> = (0..n).map(|_| (gauss_complex(rng), disk(rng, r), disk(rng, r))).collect();
        if let Ok(s) = TwoModeState::pair_superposition(&terms) {
            return s;
        }
    }
}

/// Any two-mode family; amplitudes within `r`.
pub fn two_mode(rng: &mut ChaCha8Rng, r: f64) -> TwoModeState {
    match rng.gen_range(0..5) {
        0 => pair_superposition(rng, 3, r),
        1 => loop {
            let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
            if let Ok(s) = entangled_cat(disk(rng, r / 2.0), sign) {
                break s;
            }
        },
        2 => TwoModeState::product(single(rng, r), single(rng, r)),
        3 => {
            let p: f64 = rng.gen();
            TwoModeState::mixture(vec![(p, pair_superposition(rng, 2, r)), (1.0 - p, separable(rng))]).unwrap()
        }
        _ => TwoModeState::product(coherent_family(rng, r), coherent_family(rng, r)),
    }
}

/// Coherent (|xi| <= 3), cat (|xi0| <= 2) or thermal (n_th <= 2) mode.
pub fn separable_factor(rng: &mut ChaCha8Rng) -> SingleModeState {
    match rng.gen_range(0..3) {
        0 => SingleModeState::coherent(disk(rng, 3.0)).unwrap(),
        1 => cat(rng, 2.0),
        _ => SingleModeState::thermal(rng.gen_range(0.0..2.0)).unwrap(),
    }
}

/// Products and mixtures of products.
pub fn separable(rng: &mut ChaCha8Rng) -> TwoModeState {
    let k = rng.gen_range(1..=3);
    let parts: Vec<_> = (0..k)
        .map(|_| TwoModeState::product(separable_factor(rng), separable_factor(rng)))
        .collect();
    if k == 1 {
        return parts.into_iter().next().unwrap();
    }
    let raw: Vec<f64> = (0..k).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    TwoModeState::mixture(raw.iter().map(|w| w / total).zip(parts).collect()).unwrap()
}

pub fn unit_vector(rng: &mut ChaCha8Rng, n: usize) -> DVector<Complex64> {
    let v = DVector::from_fn(n, |_, _| gauss_complex(rng));
    let norm = v.norm();
    v / c(norm, 0.0)
}

/// Separable two-qubit state: mixture of up to four pure product states.
pub fn ppt_qubits(rng: &mut ChaCha8Rng) -> QubitPairState {
    let k = rng.gen_range(1..=4);
    let mut rho = DMatrix::zeros(4, 4);
    let mut total = 0.0;
    for _ in 0..k {
        let w: f64 = rng.gen_range(0.05..1.0);
        let a = unit_vector(rng, 2);
        let b = unit_vector(rng, 2);
        let v = a.kronecker(&b);
        rho += &v * v.adjoint() * c(w, 0.0);
        total += w;
    }
    QubitPairState::new(rho / c(total, 0.0)).unwrap()
}

pub fn settings(rng: &mut ChaCha8Rng, r: f64) -> Settings {
    Settings::new(disk(rng, r), disk(rng, r), disk(rng, r), disk(rng, r)).unwrap()
}
