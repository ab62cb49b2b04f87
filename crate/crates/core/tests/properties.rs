use num_complex::Complex64;
use proptest::prelude::*;

use ergodic_core::dynamics::{krylov_gram, krylov_vectors, return_probability};
use ergodic_core::entanglement::{
    density_matrix_power_trace, eta2, higher_purity, purity_direct, purity_from_gram, purity_from_return_prob,
    reduced_density_matrix, LocalPhases, ProtocolConfig, DEFAULT_MEMORY_CAP,
};
use ergodic_core::experiments::{realization_spectrum, ProfileParams};
use ergodic_core::linalg::ginibre;
use ergodic_core::multicharge::{multicharge_gram, ChargeSet};
use ergodic_core::seed::rng_from_seed;
use ergodic_core::spectra::{
    heisenberg_time, picket_fence_spectrum, sample_gue_spectrum, sample_poisson_spectrum, spacing_ratio_statistic, unfold,
    Ensemble, Spectrum,
};
use ergodic_core::states::{coherent_gibbs_state, flat_state, gaussian_wavepacket, haar_random_state, ProfileTag, StateProfile};
use ergodic_core::transfer::{bhatia_davis_check, transfer_diagnostics, transfer_error};

fn ensemble() -> impl Strategy<Value = Ensemble> {
    prop_oneof![Just(Ensemble::Gue), Just(Ensemble::Poisson), Just(Ensemble::PicketFence)]
}

fn profile() -> impl Strategy<Value = ProfileTag> {
    prop_oneof![Just(ProfileTag::Flat), Just(ProfileTag::Gaussian), Just(ProfileTag::Gibbs), Just(ProfileTag::HaarRandom)]
}

/// (spectrum, profile, t0, d_A) drawn from every generator.
fn instance() -> impl Strategy<Value = (Spectrum, StateProfile, f64, usize)> {
    (ensemble(), profile(), 4usize..48, any::<u64>(), 0.01f64..4.0, 1usize..9).prop_map(|(e, p, d_b, seed, t0, d_a)| {
        let s = realization_spectrum(e, d_b, seed).unwrap();
        let phi = ProfileParams::default().build(p, &s, seed.wrapping_add(1)).unwrap();
        (s, phi, t0, d_a)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generators_are_sorted(d in 2usize..64, seed: u64, spacing in 0.01f64..10.0) {
        for s in [
            sample_gue_spectrum(d, seed).unwrap(),
            sample_poisson_spectrum(d, spacing, seed).unwrap(),
            picket_fence_spectrum(d, spacing).unwrap(),
        ] {
            prop_assert!(s.energies().windows(2).all(|w| w[0] <= w[1]));
            let u = unfold(&s).unwrap();
            prop_assert!(u.energies().windows(2).all(|w| w[0] <= w[1]));
            let twice = unfold(&u).unwrap();
            prop_assert!(twice.energies().iter().zip(u.energies()).all(|(a, b)| (a - b).abs() < 1e-9));
        }
    }

    #[test]
    fn spacing_ratio_is_affine_invariant(d in 3usize..64, seed: u64, scale in 0.01f64..100.0, shift in -50.0f64..50.0) {
        let s = sample_poisson_spectrum(d, 1.0, seed).unwrap();
        let a = spacing_ratio_statistic(&s).unwrap();
        let b = spacing_ratio_statistic(&s.affine(scale, shift).unwrap()).unwrap();
        prop_assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn heisenberg_time_scales_inversely(d in 2usize..64, seed: u64, c in 0.01f64..100.0) {
        let s = sample_gue_spectrum(d, seed).unwrap();
        let a = heisenberg_time(&s).unwrap();
        let b = heisenberg_time(&s.affine(c, 0.0).unwrap()).unwrap();
        prop_assert!((b - a / c).abs() <= 1e-9 * (a / c).max(1.0));
    }

    #[test]
    fn profiles_are_normalized(d in 1usize..64, seed: u64, beta in 0.0f64..5.0, sigma in 0.5f64..50.0) {
        let s = picket_fence_spectrum(d, 1.0).unwrap();
        for p in [
            flat_state(d).unwrap(),
            haar_random_state(d, seed).unwrap(),
            coherent_gibbs_state(&s, beta).unwrap(),
            gaussian_wavepacket(&s, d as f64 / 2.0, sigma).unwrap(),
        ] {
            prop_assert!((p.norm_sqr() - 1.0).abs() < 1e-12);
            if p.tag().is_smooth() {
                prop_assert!(p.is_real_nonnegative());
            }
        }
    }

    #[test]
    fn return_probability_is_even((s, phi, t, _) in instance()) {
        let a = return_probability(&s, &phi, t).unwrap();
        let b = return_probability(&s, &phi, -t).unwrap();
        prop_assert!((a - b).abs() < 1e-12);
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&a));
    }

    #[test]
    fn gram_moduli_ignore_energy_shifts((s, phi, t0, d_a) in instance(), shift in -100.0f64..100.0) {
        let g = krylov_gram(&s, &phi, t0, d_a).unwrap();
        let h = krylov_gram(&s.affine(1.0, shift).unwrap(), &phi, t0, d_a).unwrap();
        prop_assert!(g.entries().iter().zip(h.entries().iter()).all(|(a, b)| (a.norm() - b.norm()).abs() < 1e-12));
    }

    #[test]
    fn gram_is_psd_and_matches_vectors((s, phi, t0, d_a) in instance()) {
        let g = krylov_gram(&s, &phi, t0, d_a).unwrap();
        prop_assert!(g.raw_eigenvalues().unwrap()[0] >= -1e-10);
        let v = krylov_vectors(&s, &phi, t0, d_a).unwrap();
        for j in 0..d_a {
            for k in 0..d_a {
                let ip: Complex64 = v[j].iter().zip(&v[k]).map(|(a, b)| a.conj() * b).sum();
                prop_assert!((ip - g.entries()[(j, k)]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn purity_routes_agree((s, phi, t0, d_a) in instance()) {
        let cfg = ProtocolConfig::new(d_a, t0, &s, &phi).unwrap();
        let a = purity_from_return_prob(&cfg).unwrap();
        let b = purity_direct(&cfg).unwrap();
        let g = cfg.gram().unwrap();
        let c = purity_from_gram(&g);
        prop_assert!((a - b).abs() < 1e-10 && (a - c).abs() < 1e-10);
        prop_assert!(a >= 1.0 / d_a as f64 - 1e-10 && a <= 1.0 + 1e-10);
        prop_assert!((eta2(&g) - (d_a as f64 * c - 1.0)).abs() < 1e-10);
    }

    #[test]
    fn higher_purities((s, phi, t0, d_a) in instance()) {
        let cfg = ProtocolConfig::new(d_a, t0, &s, &phi).unwrap();
        let g = cfg.gram().unwrap();
        let p2 = higher_purity(&g, 2).unwrap();
        let p3 = higher_purity(&g, 3).unwrap();
        prop_assert!(p3 <= p2 + 1e-12);
        let rho = reduced_density_matrix(&cfg, DEFAULT_MEMORY_CAP, None).unwrap();
        prop_assert!((density_matrix_power_trace(&rho, 3).unwrap() - p3).abs() < 1e-10);
    }

    #[test]
    fn local_phases_leave_purity_unchanged((s, phi, t0, d_a) in instance(), seed: u64) {
        use rand::Rng;
        let mut rng = rng_from_seed(seed);
        let local = LocalPhases {
            a_energies: (0..d_a).map(|_| rng.random_range(-5.0..5.0)).collect(),
            b_energies: (0..s.dim()).map(|_| rng.random_range(-5.0..5.0)).collect(),
        };
        let cfg = ProtocolConfig::new(d_a, t0, &s, &phi).unwrap();
        let plain = reduced_density_matrix(&cfg, DEFAULT_MEMORY_CAP, None).unwrap();
        let rotated = reduced_density_matrix(&cfg, DEFAULT_MEMORY_CAP, Some(&local)).unwrap();
        let p = |m: &ergodic_core::linalg::CMatrix| m.iter().map(|z| z.norm_sqr()).sum::<f64>();
        prop_assert!((p(&plain) - p(&rotated)).abs() < 1e-12);
    }

    #[test]
    fn transfer_bounds((s, phi, t0, d_a) in instance(), seed: u64) {
        let g = krylov_gram(&s, &phi, t0, d_a).unwrap();
        let diag = transfer_diagnostics(&g).unwrap();
        prop_assert!(bhatia_davis_check(&diag).0);
        prop_assert!((diag.eta2 - eta2(&g)).abs() < 1e-10);
        let o = ginibre(d_a, d_a, &mut rng_from_seed(seed));
        prop_assert!(transfer_error(&g, &o, &o).unwrap() <= diag.worst_case_error + 1e-10);
        if diag.worst_case_error < 1e-10 {
            prop_assert!(diag.eta2.abs() < 1e-10);
            prop_assert!((purity_from_gram(&g) - 1.0 / d_a as f64).abs() < 1e-10);
        }
    }

    #[test]
    fn multicharge_gram_is_valid(d_a in 1usize..7, d_b in 2usize..24, k in 1usize..4, seed: u64, t0 in 0.01f64..3.0) {
        use rand::Rng;
        let mut rng = rng_from_seed(seed);
        let q_a = (0..d_a).map(|_| (0..k).map(|_| rng.random_range(-3.0..3.0)).collect()).collect();
        let q_b = (0..d_b).map(|_| (0..k).map(|_| rng.random_range(-3.0..3.0)).collect()).collect();
        let c = ChargeSet::new(q_a, q_b).unwrap();
        let g = multicharge_gram(&c, &haar_random_state(d_b, seed).unwrap(), t0).unwrap();
        let p = purity_from_gram(&g);
        prop_assert!(p >= 1.0 / d_a as f64 - 1e-10 && p <= 1.0 + 1e-10);
    }
}
