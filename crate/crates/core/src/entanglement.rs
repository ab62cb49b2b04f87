//! Bipartite purity of the protocol state by three independent routes:
//! the return-probability sum, an explicit partial trace, and the Krylov
//! Gram matrix. Also the Krylov-ergodicity measure `eta_2`, higher
//! purities and the scrambler baselines they are compared against.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::{amplitude_from_weights, krylov_gram, sff, GramMatrix};
use crate::error::{Error, Result};
use crate::linalg::{haar_unitary, hermitian_eigenvalues, CMatrix};
use crate::seed::rng_from_seed;
use crate::spectra::Spectrum;
use crate::states::StateProfile;
use crate::stats::compensated_sum;

/// Default bound on `d_A * d_B` for routes that materialize the joint state.
pub const DEFAULT_MEMORY_CAP: usize = 1 << 22;

/// Largest tolerated disagreement between purity routes.
pub const ROUTE_TOLERANCE: f64 = 1e-8;

/// Protocol parameters: `d_A` levels of the number operator, Krylov step
/// `t0`, and the spectrum/profile pair of the complex system.
#[derive(Debug, Clone, Copy)]
pub struct ProtocolConfig<'a> {
    pub d_a: usize,
    pub t0: f64,
    pub spectrum: &'a Spectrum,
    pub profile: &'a StateProfile,
}

impl<'a> ProtocolConfig<'a> {
    pub fn new(d_a: usize, t0: f64, spectrum: &'a Spectrum, profile: &'a StateProfile) -> Result<Self> {
        let cfg = Self { d_a, t0, spectrum, profile };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.d_a == 0 {
            return Err(Error::Configuration("d_A must be at least 1".into()));
        }
        if !(self.t0 > 0.0) || !self.t0.is_finite() {
            return Err(Error::Configuration(format!("t0 must be positive, got {}", self.t0)));
        }
        self.profile
            .check_paired(self.spectrum)
            .map_err(|e| Error::Configuration(e.to_string()))
    }

    pub fn gram(&self) -> Result<GramMatrix> {
        krylov_gram(self.spectrum, self.profile, self.t0, self.d_a)
    }
}

/// `1/d_A + (2/d_A) sum_{tau=1}^{d_A-1} (1 - tau/d_A) f(tau)`.
fn triangular_weighted_sum(d_a: usize, f: impl Fn(usize) -> f64) -> f64 {
    let d = d_a as f64;
    let tail = compensated_sum((1..d_a).map(|tau| (1.0 - tau as f64 / d) * f(tau)));
    1.0 / d + 2.0 / d * tail
}

/// Purity from the return probabilities at multiples of `t0`.
pub fn purity_from_return_prob(cfg: &ProtocolConfig) -> Result<f64> {
    cfg.validate()?;
    let weights = cfg.profile.weights();
    let energies = cfg.spectrum.energies();
    Ok(triangular_weighted_sum(cfg.d_a, |tau| {
        amplitude_from_weights(energies, &weights, tau as f64 * cfg.t0).norm_sqr()
    }))
}

fn check_cap(d_a: usize, d_b: usize, cap: usize) -> Result<()> {
    match d_a.checked_mul(d_b) {
        Some(n) if n <= cap => Ok(()),
        _ => Err(Error::ResourceLimit(format!("d_A * d_B = {d_a} * {d_b} exceeds the cap of {cap} entries"))),
    }
}

/// Optional local evolution `exp(-i H_A t0) ⊗ exp(-i H_B t0)` applied to the
/// joint state, with both Hamiltonians diagonal in the product basis.
#[derive(Debug, Clone, Default)]
pub struct LocalPhases {
    pub a_energies: Vec<f64>,
    pub b_energies: Vec<f64>,
}

/// Joint state `(1/sqrt(d_A)) sum_n |n> ⊗ U^n |phi>` as a row-major
/// `d_A x d_B` amplitude table, built by repeated application of `U`.
fn joint_state(cfg: &ProtocolConfig, local: Option<&LocalPhases>) -> Result<Vec<Complex64>> {
    let d_b = cfg.spectrum.dim();
    let step: Vec<Complex64> = cfg
        .spectrum
        .energies()
        .iter()
        .map(|&e| Complex64::from_polar(1.0, -e * cfg.t0))
        .collect();
    let norm = 1.0 / (cfg.d_a as f64).sqrt();
    let mut psi = Vec::with_capacity(cfg.d_a * d_b);
    let mut v: Vec<Complex64> = cfg.profile.amplitudes().to_vec();
    for _ in 0..cfg.d_a {
        psi.extend(v.iter().map(|z| z * norm));
        for (z, u) in v.iter_mut().zip(&step) {
            *z *= u;
        }
    }
    if let Some(local) = local {
        if local.a_energies.len() != cfg.d_a || local.b_energies.len() != d_b {
            return Err(Error::Pairing("local phase tables must have d_A and d_B entries".into()));
        }
        for n in 0..cfg.d_a {
            for b in 0..d_b {
                let e = local.a_energies[n] + local.b_energies[b];
                psi[n * d_b + b] *= Complex64::from_polar(1.0, -e * cfg.t0);
            }
        }
    }
    Ok(psi)
}

/// Reduced state of subsystem A obtained by tracing B out of a row-major
/// `d_A x d_B` joint amplitude table.
pub fn partial_trace_b(psi: &[Complex64], d_a: usize, d_b: usize) -> Result<CMatrix> {
    if psi.len() != d_a * d_b {
        return Err(Error::Pairing(format!("state has {} amplitudes, expected {}", psi.len(), d_a * d_b)));
    }
    let mut rho = CMatrix::zeros(d_a, d_a);
    for n in 0..d_a {
        for m in 0..d_a {
            rho[(n, m)] = (0..d_b).map(|b| psi[n * d_b + b] * psi[m * d_b + b].conj()).sum();
        }
    }
    Ok(rho)
}

/// Density matrix of A for the protocol state, via explicit construction
/// of the joint state.
pub fn reduced_density_matrix(cfg: &ProtocolConfig, cap: usize, local: Option<&LocalPhases>) -> Result<CMatrix> {
    cfg.validate()?;
    check_cap(cfg.d_a, cfg.spectrum.dim(), cap)?;
    let psi = joint_state(cfg, local)?;
    partial_trace_b(&psi, cfg.d_a, cfg.spectrum.dim())
}

/// `Tr(rho^2)` for a Hermitian `rho`.
pub fn purity_of_density_matrix(rho: &CMatrix) -> f64 {
    compensated_sum(rho.iter().map(|z| z.norm_sqr()))
}

/// Brute-force purity: constructs `|Psi(t0)>`, traces out B, and returns
/// `Tr(rho_A^2)`. Limited to `d_A * d_B <= DEFAULT_MEMORY_CAP`.
pub fn purity_direct(cfg: &ProtocolConfig) -> Result<f64> {
    purity_direct_capped(cfg, DEFAULT_MEMORY_CAP)
}

pub fn purity_direct_capped(cfg: &ProtocolConfig, cap: usize) -> Result<f64> {
    Ok(purity_of_density_matrix(&reduced_density_matrix(cfg, cap, None)?))
}

/// `Tr(G^2) / d_A^2`.
pub fn purity_from_gram(g: &GramMatrix) -> f64 {
    let d = g.d_a() as f64;
    g.trace_of_square() / (d * d)
}

/// `eta_2 = Tr(G^2)/d_A - 1`, the variance of the Gram eigenvalues.
pub fn eta2(g: &GramMatrix) -> f64 {
    g.trace_of_square() / g.d_a() as f64 - 1.0
}

/// `Tr(G^alpha) / d_A^alpha` from the clipped Gram eigenvalues.
pub fn higher_purity(g: &GramMatrix, alpha: u32) -> Result<f64> {
    if alpha < 2 {
        return Err(Error::InvalidParameter(format!("alpha must be at least 2, got {alpha}")));
    }
    let d = g.d_a() as f64;
    let r = g.eigenvalues()?;
    Ok(compensated_sum(r.iter().map(|&x| (x / d).powi(alpha as i32))))
}

/// `Tr(rho^alpha)` of a density matrix through its spectrum.
pub fn density_matrix_power_trace(rho: &CMatrix, alpha: u32) -> Result<f64> {
    let r = hermitian_eigenvalues(rho)?;
    Ok(compensated_sum(r.iter().map(|&x| x.max(0.0).powi(alpha as i32))))
}

/// Purity values from every route plus derived quantities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PurityReport {
    #[serde(rename = "d_A")]
    pub d_a: usize,
    #[serde(rename = "d_B")]
    pub d_b: usize,
    pub t0: f64,
    pub purity_formula: f64,
    pub purity_direct: f64,
    pub purity_gram: f64,
    pub eta2: f64,
    pub higher_purities: BTreeMap<u32, f64>,
    pub max_discrepancy: f64,
}

impl PurityReport {
    /// Fails with [`Error::InvariantViolation`] when the routes disagree by
    /// more than [`ROUTE_TOLERANCE`].
    pub fn check_routes(&self) -> Result<()> {
        if !(self.max_discrepancy < ROUTE_TOLERANCE) {
            return Err(Error::InvariantViolation(format!(
                "purity routes disagree by {:e} (formula {}, direct {}, gram {})",
                self.max_discrepancy, self.purity_formula, self.purity_direct, self.purity_gram
            )));
        }
        Ok(())
    }
}

pub fn purity_report(cfg: &ProtocolConfig, alphas: &[u32], cap: usize) -> Result<PurityReport> {
    let formula = purity_from_return_prob(cfg)?;
    let direct = purity_direct_capped(cfg, cap)?;
    let g = cfg.gram()?;
    let gram = purity_from_gram(&g);
    let mut higher = BTreeMap::new();
    for &alpha in alphas {
        higher.insert(alpha, higher_purity(&g, alpha)?);
    }
    let max_discrepancy = (formula - direct).abs().max((formula - gram).abs()).max((direct - gram).abs());
    Ok(PurityReport {
        d_a: cfg.d_a,
        d_b: cfg.spectrum.dim(),
        t0: cfg.t0,
        purity_formula: formula,
        purity_direct: direct,
        purity_gram: gram,
        eta2: eta2(&g),
        higher_purities: higher,
        max_discrepancy,
    })
}

/// Purity of subsystem A after one Haar-random unitary on the full
/// `d_A d_B` space acts on `|0>_A ⊗ |0>_B`.
pub fn haar_scrambler_purity(d_a: usize, d_b: usize, rng_seed: u64) -> Result<f64> {
    haar_scrambler_purity_capped(d_a, d_b, rng_seed, DEFAULT_MEMORY_CAP)
}

pub fn haar_scrambler_purity_capped(d_a: usize, d_b: usize, rng_seed: u64, cap: usize) -> Result<f64> {
    if d_a == 0 || d_b == 0 {
        return Err(Error::InvalidDimension("d_A and d_B must be positive".into()));
    }
    check_cap(d_a, d_b, cap)?;
    let n = d_a * d_b;
    let mut rng = rng_from_seed(rng_seed);
    let u = haar_unitary(n, &mut rng);
    // U |0> is the first column; index n = a * d_B + b
    let psi: Vec<Complex64> = u.column(0).iter().copied().collect();
    Ok(purity_of_density_matrix(&partial_trace_b(&psi, d_a, d_b)?))
}

/// Finite-temperature local scrambler baseline `d_A^(-1 + c beta^2)`.
pub fn thermal_scrambler_purity(d_a: usize, beta: f64, c: f64) -> Result<f64> {
    if d_a == 0 {
        return Err(Error::InvalidDimension("d_A must be positive".into()));
    }
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::InvalidParameter(format!("c must be positive, got {c}")));
    }
    if !(beta >= 0.0) || !beta.is_finite() {
        return Err(Error::InvalidParameter(format!("beta must be non-negative, got {beta}")));
    }
    let x = c * beta * beta;
    if x >= 1.0 {
        return Err(Error::OutOfRegime(format!("c beta^2 = {x} >= 1: purity would not decay with d_A")));
    }
    Ok((d_a as f64).powf(-1.0 + x))
}

/// Purity when B starts maximally mixed: the return probability is replaced
/// by the spectral form factor.
pub fn mixed_state_purity(s: &Spectrum, t0: f64, d_a: usize) -> Result<f64> {
    if d_a == 0 {
        return Err(Error::Configuration("d_A must be at least 1".into()));
    }
    if !(t0 > 0.0) || !t0.is_finite() {
        return Err(Error::Configuration(format!("t0 must be positive, got {t0}")));
    }
    Ok(triangular_weighted_sum(d_a, |tau| sff(s, tau as f64 * t0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::{picket_fence_spectrum, sample_gue_spectrum, sample_poisson_spectrum, unfold};
    use crate::states::{flat_state, haar_random_state};
    use std::f64::consts::PI;

    #[test]
    fn single_level_subsystem_is_pure() {
        let s = sample_poisson_spectrum(12, 1.0, 1).unwrap();
        let phi = haar_random_state(12, 2).unwrap();
        let cfg = ProtocolConfig::new(1, 0.5, &s, &phi).unwrap();
        assert_eq!(purity_from_return_prob(&cfg).unwrap(), 1.0);
        assert!((purity_direct(&cfg).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn perfect_krylov_set_is_maximally_entangled() {
        let s = picket_fence_spectrum(32, 1.0).unwrap();
        let f = flat_state(32).unwrap();
        for d_a in [2, 5, 16, 32] {
            let cfg = ProtocolConfig::new(d_a, 2.0 * PI / 32.0, &s, &f).unwrap();
            let want = 1.0 / d_a as f64;
            assert!((purity_from_return_prob(&cfg).unwrap() - want).abs() < 1e-12);
            assert!((purity_direct(&cfg).unwrap() - want).abs() < 1e-12);
        }
    }

    #[test]
    fn eigenstate_gives_product_state() {
        let s = sample_gue_spectrum(20, 3).unwrap();
        let e = StateProfile::eigenstate(20, 4).unwrap();
        let cfg = ProtocolConfig::new(6, 0.3, &s, &e).unwrap();
        assert!((purity_from_return_prob(&cfg).unwrap() - 1.0).abs() < 1e-12);
        assert!((purity_direct(&cfg).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gram_special_cases() {
        let id = GramMatrix::from_matrix(CMatrix::identity(4, 4), 1.0).unwrap();
        assert!((purity_from_gram(&id) - 0.25).abs() < 1e-15);
        assert!(eta2(&id).abs() < 1e-15);
        for alpha in [2, 3, 5] {
            assert!((higher_purity(&id, alpha).unwrap() - 4f64.powi(1 - alpha as i32)).abs() < 1e-14);
        }
        let ones = GramMatrix::from_matrix(CMatrix::from_element(2, 2, Complex64::new(1.0, 0.0)), 1.0).unwrap();
        assert!((purity_from_gram(&ones) - 1.0).abs() < 1e-15);
        assert!((eta2(&ones) - 1.0).abs() < 1e-15);
        assert!(matches!(higher_purity(&ones, 1), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn routes_agree_on_random_instance() {
        let s = unfold(&sample_gue_spectrum(40, 12).unwrap()).unwrap();
        let phi = haar_random_state(40, 13).unwrap();
        let cfg = ProtocolConfig::new(6, 0.9, &s, &phi).unwrap();
        let report = purity_report(&cfg, &[2, 3], DEFAULT_MEMORY_CAP).unwrap();
        report.check_routes().unwrap();
        assert!(report.max_discrepancy < 1e-12);
        assert!((report.higher_purities[&2] - report.purity_gram).abs() < 1e-12);
        assert!((report.eta2 - (6.0 * report.purity_gram - 1.0)).abs() < 1e-12);
        let rho = reduced_density_matrix(&cfg, DEFAULT_MEMORY_CAP, None).unwrap();
        let p3 = density_matrix_power_trace(&rho, 3).unwrap();
        assert!((report.higher_purities[&3] - p3).abs() < 1e-10);
    }

    #[test]
    fn local_phases_do_not_change_purity() {
        let s = sample_poisson_spectrum(24, 1.0, 3).unwrap();
        let phi = haar_random_state(24, 4).unwrap();
        let cfg = ProtocolConfig::new(5, 0.7, &s, &phi).unwrap();
        let mut rng = rng_from_seed(99);
        use rand::Rng;
        let local = LocalPhases {
            a_energies: (0..5).map(|_| rng.random_range(-3.0..3.0)).collect(),
            b_energies: (0..24).map(|_| rng.random_range(-3.0..3.0)).collect(),
        };
        let plain = purity_of_density_matrix(&reduced_density_matrix(&cfg, DEFAULT_MEMORY_CAP, None).unwrap());
        let dressed = purity_of_density_matrix(&reduced_density_matrix(&cfg, DEFAULT_MEMORY_CAP, Some(&local)).unwrap());
        assert!((plain - dressed).abs() < 1e-12);
    }

    #[test]
    fn cap_is_enforced() {
        let s = picket_fence_spectrum(64, 1.0).unwrap();
        let f = flat_state(64).unwrap();
        let cfg = ProtocolConfig::new(8, 0.1, &s, &f).unwrap();
        assert!(matches!(purity_direct_capped(&cfg, 100), Err(Error::ResourceLimit(_))));
        assert!(matches!(haar_scrambler_purity_capped(4, 64, 1, 100), Err(Error::ResourceLimit(_))));
    }

    #[test]
    fn config_errors() {
        let s = picket_fence_spectrum(8, 1.0).unwrap();
        let f = flat_state(8).unwrap();
        assert!(matches!(ProtocolConfig::new(0, 1.0, &s, &f), Err(Error::Configuration(_))));
        assert!(matches!(ProtocolConfig::new(2, 0.0, &s, &f), Err(Error::Configuration(_))));
        let g = flat_state(9).unwrap();
        assert!(matches!(ProtocolConfig::new(2, 1.0, &s, &g), Err(Error::Configuration(_))));
    }

    #[test]
    fn haar_scrambler_trivial_dimensions() {
        for seed in 0..5 {
            assert!((haar_scrambler_purity(1, 16, seed).unwrap() - 1.0).abs() < 1e-12);
            assert!((haar_scrambler_purity(8, 1, seed).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn thermal_baseline() {
        assert!((thermal_scrambler_purity(16, 0.0, 0.5).unwrap() - 1.0 / 16.0).abs() < 1e-15);
        assert!((thermal_scrambler_purity(16, 1.0, 0.5).unwrap() - 0.25).abs() < 1e-15);
        let mut last = 0.0;
        for i in 0..10 {
            let p = thermal_scrambler_purity(16, i as f64 * 0.1, 0.5).unwrap();
            assert!(p > last);
            last = p;
        }
        assert!(matches!(thermal_scrambler_purity(16, 2.0, 0.5), Err(Error::OutOfRegime(_))));
        assert!(matches!(thermal_scrambler_purity(16, 1.0, 0.0), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn mixed_state_matches_flat_profile() {
        let s = sample_gue_spectrum(30, 5).unwrap();
        let f = flat_state(30).unwrap();
        assert_eq!(mixed_state_purity(&s, 0.4, 1).unwrap(), 1.0);
        for d_a in [2, 4, 7] {
            let cfg = ProtocolConfig::new(d_a, 0.4, &s, &f).unwrap();
            let a = mixed_state_purity(&s, 0.4, d_a).unwrap();
            let b = purity_from_return_prob(&cfg).unwrap();
            assert!((a - b).abs() < 1e-12);
        }
    }
}
