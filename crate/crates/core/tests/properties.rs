mod common;

use std::f64::consts::FRAC_PI_2;

use common::*;
use macrocat::entanglement::{
    canonical_eta, closed_form_witness, moments9, partial_transpose, ppt_min_eig, standard_settings, witness_expectation,
    witness_from_eta, word_product, DisplacementWord,
};
use macrocat::linalg::{hermitian_deviation, min_eigenvalue};
use macrocat::nonclassicality::bochner_matrix;
use macrocat::ramsey::{
    chi2_from_correlations, chi_from_measurements, conditional_state, moments4, outcome_probabilities, qubit_channel,
    Outcome, RamseySetting,
};
use macrocat::schema::StateDescriptor;
use macrocat::special::laguerre;
use macrocat::states::{cat_state, decohere, entangled_cat, SingleModeState, TwoModeState};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;

fn max_abs(m: &nalgebra::DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn chi_is_conjugation_symmetric_and_bounded(seed in any::<u64>()) {
        let mut r = rng(seed);
        let state = single(&mut r, 3.0);
        let alpha = disk(&mut r, 4.0);
        let (a, b) = (state.chi(alpha), state.chi(-alpha));
        prop_assert!((a - b.conj()).norm() < 1e-12);
        prop_assert!(a.norm() <= 1.0 + 1e-12);
    }

    #[test]
    fn gaussian_classical_states_obey_one_point_bound(seed in any::<u64>()) {
        let mut r = rng(seed);
        let alpha = disk(&mut r, 5.0);
        for state in [
            SingleModeState::vacuum(),
            SingleModeState::thermal(r.gen_range(0.0..3.0)).unwrap(),
            SingleModeState::coherent(disk(&mut r, 3.0)).unwrap(),
        ] {
            prop_assert!(state.chi_normal(alpha).norm() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn two_mode_chi_is_conjugation_symmetric(seed in any::<u64>()) {
        let mut r = rng(seed);
        let state = two_mode(&mut r, 2.5);
        let (a, b) = (disk(&mut r, 3.0), disk(&mut r, 3.0));
        prop_assert!((state.chi2(a, b) - state.chi2(-a, -b).conj()).norm() < 1e-12);
        prop_assert!((state.chi2(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)) - 1.0).norm() < 1e-10);
    }

    #[test]
    fn probabilities_are_complete(seed in any::<u64>()) {
        let mut r = rng(seed);
        let state = single(&mut r, 3.0);
        let s = RamseySetting::with_free_angle(r.gen_range(-4.0..4.0), disk(&mut r, 3.0), r.gen_range(-4.0..4.0)).unwrap();
        let (p, m) = outcome_probabilities(&state, &s);
        prop_assert_eq!(p + m, 1.0);
        prop_assert!((0.0..=1.0).contains(&p) && (0.0..=1.0).contains(&m));
    }

    #[test]
    fn measurements_reconstruct_chi(seed in any::<u64>()) {
        let mut r = rng(seed);
        let state = single(&mut r, 3.0);
        let alpha = disk(&mut r, 3.0);
        prop_assert!((chi_from_measurements(&state, alpha).unwrap() - state.chi(alpha)).norm() < 1e-12);
        let pair = two_mode(&mut r, 2.0);
        let (a, b) = (disk(&mut r, 2.0), disk(&mut r, 2.0));
        prop_assert!((chi2_from_correlations(&pair, a, b).unwrap() - pair.chi2(a, b)).norm() < 1e-12);
    }

    #[test]
    fn conditional_norm_is_outcome_probability(seed in any::<u64>()) {
        let mut r = rng(seed);
        let state = coherent_family(&mut r, 3.0);
        let s = RamseySetting::with_free_angle(r.gen_range(-4.0..4.0), disk(&mut r, 3.0), r.gen_range(-1.0..1.0)).unwrap();
        let (p_plus, p_minus) = outcome_probabilities(&state, &s);
        for (outcome, p) in [(Outcome::Plus, p_plus), (Outcome::Minus, p_minus)] {
            if let Ok((_, q)) = conditional_state(&state, &s, outcome) {
                prop_assert!((p - q).abs() < 1e-12, "{} vs {}", p, q);
            }
        }
    }

    #[test]
    fn channel_keeps_trace_hermiticity_and_ppt(seed in any::<u64>()) {
        let mut r = rng(seed);
        let rho = ppt_qubits(&mut r);
        let state = two_mode(&mut r, 2.0);
        let m = moments4(&state, disk(&mut r, 3.0), disk(&mut r, 3.0));
        let out = qubit_channel(&rho, &m).unwrap();
        let out_m = out.matrix();
        prop_assert_eq!(out_m.trace(), rho.matrix().trace());
        prop_assert_eq!(hermitian_deviation(out_m), 0.0);
        prop_assert!(min_eigenvalue(out_m).unwrap() >= -1e-10);
        prop_assert!(out.ppt_min_eigenvalue().unwrap() >= -1e-10);
    }

    #[test]
    fn bochner_matrices_of_classical_states_are_psd(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(2..6);
        let points: Vec<_> = (0..n).map(|_| disk(&mut r, 3.0)).collect();
        for state in [
            SingleModeState::vacuum(),
            SingleModeState::coherent(disk(&mut r, 3.0)).unwrap(),
            SingleModeState::thermal(r.gen_range(0.0..2.0)).unwrap(),
        ] {
            let m = bochner_matrix(&state, &points).unwrap();
            prop_assert!(m.min_eigenvalue().unwrap() >= -1e-10);
        }
    }

    #[test]
    fn bochner_matrix_is_hermitian_with_unit_diagonal(seed in any::<u64>()) {
        let mut r = rng(seed);
        let state = single(&mut r, 3.0);
        let n = r.gen_range(2..6);
        let points: Vec<_> = (0..n).map(|_| disk(&mut r, 3.0)).collect();
        let m = bochner_matrix(&state, &points).unwrap().entries;
        prop_assert_eq!(hermitian_deviation(&m), 0.0);
        for i in 0..n {
            prop_assert_eq!(m[(i, i)], Complex64::new(1.0, 0.0));
        }
    }

    #[test]
    fn two_point_bochner_reduces_to_one_point_bound(seed in any::<u64>()) {
        let mut r = rng(seed);
        let state = single(&mut r, 2.5);
        let alpha = disk(&mut r, 3.0);
        let gap = 1.0 - state.chi_normal(alpha).norm_sqr();
        prop_assume!(gap.abs() > 1e-9);
        let eig = bochner_matrix(&state, &[Complex64::new(0.0, 0.0), alpha]).unwrap().min_eigenvalue().unwrap();
        prop_assert_eq!(gap > 0.0, eig > 0.0, "gap {} eig {}", gap, eig);
    }

    #[test]
    fn decoherence_never_raises_normal_chi(seed in any::<u64>()) {
        // Holds along the cat axis with theta = 0; off-axis chi_N oscillates
        // in |alpha| and the scaled argument can climb out of a node.
        let mut r = rng(seed);
        let xi0 = disk(&mut r, 2.5);
        prop_assume!(xi0.norm() > 1e-3);
        let cat = cat_state(xi0, 0.0).unwrap();
        let alpha = xi0 / xi0.norm() * r.gen_range(-3.0..3.0);
        let nth = if r.gen_bool(0.5) { 0.0 } else { r.gen_range(0.0..10.0) };
        let mut prev = f64::INFINITY;
        for k in 0..20 {
            let gt = 0.05 * k as f64;
            let v = decohere(&cat, gt, nth).unwrap().chi_normal(alpha).norm();
            prop_assert!(v <= prev * (1.0 + 1e-12) + 1e-15, "gamma t {}: {} after {}", gt, v, prev);
            prev = v;
        }
    }

    #[test]
    fn gram_moments_are_psd(seed in any::<u64>()) {
        let mut r = rng(seed);
        let state = two_mode(&mut r, 2.5);
        let s = settings(&mut r, 3.0);
        let m = moments9(&state, &s).entries;
        prop_assert!(min_eigenvalue(&m).unwrap() >= -1e-10);
    }

    #[test]
    fn partial_transpose_is_an_involution(seed in any::<u64>()) {
        let mut r = rng(seed);
        let state = two_mode(&mut r, 2.5);
        let m = moments9(&state, &settings(&mut r, 3.0)).entries;
        let g = partial_transpose(&m);
        prop_assert_eq!(partial_transpose(&g), m);
        prop_assert!(hermitian_deviation(&g) <= 1e-12);
    }

    #[test]
    fn witness_expectation_is_real(seed in any::<u64>()) {
        let mut r = rng(seed);
        let state = two_mode(&mut r, 2.5);
        let w = closed_form_witness(r.gen_range(0.2..3.0), r.gen_range(0.1..3.0), r.gen_range(0.05..0.5)).unwrap();
        prop_assert!(witness_expectation(&state, &w).is_ok());
    }

    #[test]
    fn eta_witness_is_the_quadratic_form(seed in any::<u64>()) {
        let mut r = rng(seed);
        let state = two_mode(&mut r, 2.5);
        let s = settings(&mut r, 2.5);
        let eta = unit_vector(&mut r, 9);
        let w = witness_from_eta(&eta, &s).unwrap();
        let g = partial_transpose(&moments9(&state, &s).entries);
        let quad = (eta.adjoint() * &g * &eta)[(0, 0)];
        let got = witness_expectation(&state, &w).unwrap();
        prop_assert!((got - quad.re).abs() < 1e-10 && quad.im.abs() < 1e-10, "{} vs {}", got, quad);
    }

    #[test]
    fn closed_form_equals_canonical_eta_witness(seed in any::<u64>()) {
        let mut r = rng(seed);
        let xi0 = r.gen_range(0.2..3.0);
        let eps = r.gen_range(0.1..3.0);
        let w = r.gen_range(0.05..0.5);
        let closed = closed_form_witness(xi0, eps, w).unwrap();
        let built = witness_from_eta(&canonical_eta(w).unwrap(), &standard_settings(xi0, eps).unwrap()).unwrap();
        let state = two_mode(&mut r, 2.5);
        let (a, b) = (witness_expectation(&state, &closed).unwrap(), witness_expectation(&state, &built).unwrap());
        prop_assert!((a - b).abs() < 1e-10, "{} vs {}", a, b);
    }

    #[test]
    fn words_compose_associatively(seed in any::<u64>()) {
        let mut r = rng(seed);
        let mut word = || DisplacementWord::new(
            Complex64::from_polar(1.0, r.gen_range(-3.0..3.0)), disk(&mut r, 3.0), disk(&mut r, 3.0)).unwrap();
        let (a, b, c) = (word(), word(), word());
        let left = word_product(&word_product(&a, &b), &c);
        let right = word_product(&a, &word_product(&b, &c));
        prop_assert!((left.phase - right.phase).norm() < 1e-12);
        prop_assert!((left.amp1 - right.amp1).norm() < 1e-12 && (left.amp2 - right.amp2).norm() < 1e-12);
        prop_assert!((left.phase.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn descriptors_round_trip(seed in any::<u64>()) {
        let mut r = rng(seed);
        let probe = disk(&mut r, 2.0);
        let state = single(&mut r, 3.0);
        let json = StateDescriptor::from(&state).to_json().unwrap();
        let back = macrocat::schema::parse_state(&json).unwrap().build().unwrap().single().unwrap();
        prop_assert!((back.chi(probe) - state.chi(probe)).norm() < 1e-12);
        let pair = two_mode(&mut r, 2.0);
        let json = StateDescriptor::from(&pair).to_json().unwrap();
        let back = macrocat::schema::parse_state(&json).unwrap().build().unwrap().two().unwrap();
        prop_assert!((back.chi2(probe, -probe) - pair.chi2(probe, -probe)).norm() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn separable_states_have_ppt_moments(seed in any::<u64>()) {
        let mut r = rng(seed);
        let state = separable(&mut r);
        let s = settings(&mut r, 3.0);
        prop_assert!(ppt_min_eig(&state, &s).unwrap() >= -1e-10);
    }

    #[test]
    fn witness_is_nonnegative_on_separable_states(seed in any::<u64>()) {
        let mut r = rng(seed);
        let state = separable(&mut r);
        let w = closed_form_witness(r.gen_range(0.3..3.0), FRAC_PI_2, 0.4247).unwrap();
        prop_assert!(witness_expectation(&state, &w).unwrap() >= -1e-8);
    }
}

#[test]
fn normal_chi_of_number_states_is_laguerre() {
    let mut r = rng(21);
    for n in 0..=10 {
        for _ in 0..10 {
            let alpha = disk(&mut r, 4.0);
            let got = SingleModeState::fock(n).chi_normal(alpha);
            let want = laguerre(n as usize, 0, alpha.norm_sqr());
            assert!((got.re - want).abs() < 1e-12 * want.abs().max(1.0) && got.im.abs() < 1e-12);
        }
    }
}

#[test]
fn long_loss_leaves_the_vacuum() {
    let cat = cat_state(Complex64::new(2.0, 0.0), 0.7).unwrap();
    let late = decohere(&cat, 60.0, 0.0).unwrap();
    for alpha in [Complex64::new(0.5, 0.0), Complex64::new(-1.0, 2.0), Complex64::new(3.0, 3.0)] {
        assert!((late.chi_normal(alpha) - 1.0).norm() < 1e-12);
    }
}

#[test]
fn zero_temperature_cat_stays_nonclassical() {
    let cat = cat_state(Complex64::new(2.0, 0.0), 0.0).unwrap();
    let alpha = Complex64::new(2.0, 0.0);
    for k in 0..=50 {
        let gt = 0.1 * k as f64;
        let v = decohere(&cat, gt, 0.0).unwrap().chi_normal(alpha).norm();
        assert!(v > 1.0, "gamma t {gt}: {v}");
    }
}

#[test]
fn entangled_cat_witness_stays_negative_for_large_cats() {
    for xi0 in [1.5, 2.0, 3.0, 4.0] {
        let state = entangled_cat(Complex64::new(xi0, 0.0), 1).unwrap();
        let w = closed_form_witness(xi0, FRAC_PI_2, 0.4247).unwrap();
        assert!(witness_expectation(&state, &w).unwrap() < 0.0, "xi0 = {xi0}");
    }
}

#[test]
fn product_of_vacua_passes_witness() {
    let state = TwoModeState::product(SingleModeState::vacuum(), SingleModeState::vacuum());
    let w = closed_form_witness(2.0, FRAC_PI_2, 0.4247).unwrap();
    assert!(witness_expectation(&state, &w).unwrap() >= 0.0);
    assert!(max_abs(&partial_transpose(&moments9(&state, &standard_settings(2.0, FRAC_PI_2).unwrap()).entries)) <= 1.0);
}
