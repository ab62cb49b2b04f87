//! Initial-state amplitude profiles `phi(E_n)` over a spectrum's eigenbasis.
//!
//! Flat, Gaussian and Gibbs profiles vary smoothly with energy; Haar-random
//! profiles fluctuate from level to level.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::complex_gaussian;
use crate::seed::rng_from_seed;
use crate::spectra::Spectrum;
use crate::stats::compensated_sum;

/// Inputs whose norm deviates from one by more than this are normalized with
/// a warning.
pub const NORM_WARNING_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileTag {
    Flat,
    Gaussian,
    Gibbs,
    HaarRandom,
    Custom,
}

impl ProfileTag {
    pub fn as_str(self) -> &'static str {
        match self {
            ProfileTag::Flat => "flat",
            ProfileTag::Gaussian => "gaussian",
            ProfileTag::Gibbs => "gibbs",
            ProfileTag::HaarRandom => "haar_random",
            ProfileTag::Custom => "custom",
        }
    }

    /// Smooth profiles have no level-to-level fluctuations.
    pub fn is_smooth(self) -> bool {
        matches!(self, ProfileTag::Flat | ProfileTag::Gaussian | ProfileTag::Gibbs)
    }
}

impl fmt::Display for ProfileTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ProfileTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "flat" => Ok(ProfileTag::Flat),
            "gaussian" => Ok(ProfileTag::Gaussian),
            "gibbs" => Ok(ProfileTag::Gibbs),
            "haar_random" => Ok(ProfileTag::HaarRandom),
            "custom" => Ok(ProfileTag::Custom),
            other => Err(Error::Configuration(format!("unknown profile `{other}`"))),
        }
    }
}

/// Unit-norm amplitudes of the initial state in the energy eigenbasis.
#[derive(Debug, Clone, PartialEq)]
pub struct StateProfile {
    amplitudes: Vec<Complex64>,
    tag: ProfileTag,
}

impl StateProfile {
    /// Normalizes arbitrary amplitudes. Returns the profile and, when the
    /// input norm was off by more than [`NORM_WARNING_THRESHOLD`], the
    /// observed deviation `| |a| - 1 |`.
    pub fn normalized(amplitudes: Vec<Complex64>, tag: ProfileTag) -> Result<(Self, Option<f64>)> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidDimension("profile must have at least one amplitude".into()));
        }
        if amplitudes.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::InvalidParameter("non-finite amplitude".into()));
        }
        let norm = compensated_sum(amplitudes.iter().map(|a| a.norm_sqr())).sqrt();
        if !(norm > 0.0) {
            return Err(Error::DegenerateProfile("all amplitudes vanish".into()));
        }
        let deviation = (norm - 1.0).abs();
        let inv = 1.0 / norm;
        let amplitudes = amplitudes.into_iter().map(|a| a * inv).collect();
        let warn = (deviation > NORM_WARNING_THRESHOLD).then_some(deviation);
        Ok((Self { amplitudes, tag }, warn))
    }

    /// Loads a user profile, logging a warning when renormalization was
    /// significant.
    pub fn from_custom(amplitudes: Vec<Complex64>) -> Result<Self> {
        let (p, warn) = Self::normalized(amplitudes, ProfileTag::Custom)?;
        if let Some(dev) = warn {
            log::warn!("custom profile norm deviated from 1 by {dev:e}; renormalized");
        }
        Ok(p)
    }

    /// Energy eigenstate `|E_k>`: a stationary state.
    pub fn eigenstate(d_b: usize, k: usize) -> Result<Self> {
        if k >= d_b {
            return Err(Error::InvalidParameter(format!("level {k} out of range for d_B = {d_b}")));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); d_b];
        amplitudes[k] = Complex64::new(1.0, 0.0);
        Ok(Self { amplitudes, tag: ProfileTag::Custom })
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn tag(&self) -> ProfileTag {
        self.tag
    }

    /// Level occupations `|phi_n|^2`.
    pub fn weights(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn norm_sqr(&self) -> f64 {
        compensated_sum(self.amplitudes.iter().map(|a| a.norm_sqr()))
    }

    /// `(sum |phi_n|^4)^-1`.
    pub fn participation_ratio(&self) -> f64 {
        1.0 / compensated_sum(self.amplitudes.iter().map(|a| a.norm_sqr().powi(2)))
    }

    pub fn is_real_nonnegative(&self) -> bool {
        self.amplitudes.iter().all(|a| a.im == 0.0 && a.re >= 0.0)
    }

    /// Ensures the profile can be paired with `s`.
    pub fn check_paired(&self, s: &Spectrum) -> Result<()> {
        if self.dim() != s.dim() {
            return Err(Error::Pairing(format!("profile has {} amplitudes, spectrum has {} levels", self.dim(), s.dim())));
        }
        Ok(())
    }
}

fn real_profile(values: Vec<f64>, tag: ProfileTag) -> Result<StateProfile> {
    let amps = values.into_iter().map(|v| Complex64::new(v, 0.0)).collect();
    StateProfile::normalized(amps, tag).map(|(p, _)| p)
}

/// Equal amplitudes `1/sqrt(d_B)`.
pub fn flat_state(d_b: usize) -> Result<StateProfile> {
    if d_b == 0 {
        return Err(Error::InvalidDimension("d_B must be positive".into()));
    }
    let a = Complex64::new(1.0 / (d_b as f64).sqrt(), 0.0);
    Ok(StateProfile { amplitudes: vec![a; d_b], tag: ProfileTag::Flat })
}

/// Amplitudes proportional to `exp(-(E_n - E0)^2 / (4 sigma^2))`.
pub fn gaussian_wavepacket(s: &Spectrum, e0: f64, sigma: f64) -> Result<StateProfile> {
    if !(sigma > 0.0) || !sigma.is_finite() || !e0.is_finite() {
        return Err(Error::InvalidParameter(format!("gaussian needs finite E0 and sigma > 0, got E0={e0}, sigma={sigma}")));
    }
    let values: Vec<f64> = s
        .energies()
        .iter()
        .map(|&e| (-(e - e0).powi(2) / (4.0 * sigma * sigma)).exp())
        .collect();
    if values.iter().all(|&v| v == 0.0) {
        return Err(Error::DegenerateProfile(format!(
            "sigma = {sigma} is too narrow: every level underflows around E0 = {e0}"
        )));
    }
    real_profile(values, ProfileTag::Gaussian)
}

/// Amplitudes proportional to `exp(-beta E_n / 2)`.
pub fn coherent_gibbs_state(s: &Spectrum, beta: f64) -> Result<StateProfile> {
    if !(beta >= 0.0) || !beta.is_finite() {
        return Err(Error::InvalidParameter(format!("beta must be finite and non-negative, got {beta}")));
    }
    // shift by the largest exponent, i.e. the ground-state energy
    let e_min = s.min();
    let values = s.energies().iter().map(|&e| (-beta * (e - e_min) / 2.0).exp()).collect();
    real_profile(values, ProfileTag::Gibbs)
}

/// Normalized vector of iid centered complex Gaussians.
pub fn haar_random_state(d_b: usize, rng_seed: u64) -> Result<StateProfile> {
    if d_b == 0 {
        return Err(Error::InvalidDimension("d_B must be positive".into()));
    }
    let mut rng = rng_from_seed(rng_seed);
    let amps = (0..d_b).map(|_| complex_gaussian(&mut rng)).collect();
    StateProfile::normalized(amps, ProfileTag::HaarRandom).map(|(p, _)| p)
}
