//! Eigenvalue spectra of the complex system's Hamiltonian: random-matrix
//! (GUE), Poisson and picket-fence generators, unfolding, and the summary
//! statistics used to tell the ensembles apart.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Exp, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{complex_gaussian, hermitian_deviation, hermitian_eigen, hermitian_eigenvalues, CMatrix};
use crate::seed::rng_from_seed;
use crate::states::{ProfileTag, StateProfile};

/// Elementwise tolerance on `H - H^dagger` for user-supplied Hamiltonians.
pub const HERMITIAN_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ensemble {
    Gue,
    Poisson,
    PicketFence,
    Custom,
}

impl Ensemble {
    pub fn as_str(self) -> &'static str {
        match self {
            Ensemble::Gue => "gue",
            Ensemble::Poisson => "poisson",
            Ensemble::PicketFence => "picket_fence",
            Ensemble::Custom => "custom",
        }
    }
}

impl fmt::Display for Ensemble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Ensemble {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gue" => Ok(Ensemble::Gue),
            "poisson" => Ok(Ensemble::Poisson),
            "picket_fence" => Ok(Ensemble::PicketFence),
            "custom" => Ok(Ensemble::Custom),
            other => Err(Error::Configuration(format!("unknown ensemble `{other}`"))),
        }
    }
}

/// Sorted real eigenvalues of `H_B`, in units where the reduced Planck
/// constant is one.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    energies: Vec<f64>,
    ensemble: Ensemble,
    unfolded: bool,
}

impl Spectrum {
    /// Builds a spectrum from arbitrary finite energies, sorting them.
    pub fn new(mut energies: Vec<f64>, ensemble: Ensemble) -> Result<Self> {
        if energies.is_empty() {
            return Err(Error::InvalidDimension("spectrum must contain at least one level".into()));
        }
        if let Some(bad) = energies.iter().find(|e| !e.is_finite()) {
            return Err(Error::InvalidParameter(format!("non-finite energy {bad}")));
        }
        energies.sort_by(f64::total_cmp);
        Ok(Self { energies, ensemble, unfolded: false })
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    /// Hilbert-space dimension `d_B`.
    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn ensemble(&self) -> Ensemble {
        self.ensemble
    }

    pub fn is_unfolded(&self) -> bool {
        self.unfolded
    }

    pub fn min(&self) -> f64 {
        self.energies[0]
    }

    pub fn max(&self) -> f64 {
        self.energies[self.energies.len() - 1]
    }

    /// Mean nearest-neighbour spacing; `None` for a single level.
    pub fn mean_spacing(&self) -> Option<f64> {
        let d = self.dim();
        (d >= 2).then(|| (self.max() - self.min()) / (d - 1) as f64)
    }

    /// Applies `E -> scale * E + shift` (scale > 0), keeping the tag.
    pub fn affine(&self, scale: f64, shift: f64) -> Result<Self> {
        if !(scale > 0.0) || !scale.is_finite() || !shift.is_finite() {
            return Err(Error::InvalidParameter(format!("affine map needs finite scale > 0, got {scale}")));
        }
        Ok(Self {
            energies: self.energies.iter().map(|e| scale * e + shift).collect(),
            ensemble: self.ensemble,
            unfolded: false,
        })
    }

    pub fn into_energies(self) -> Vec<f64> {
        self.energies
    }
}

fn require_dim(d_b: usize, min: usize) -> Result<()> {
    if d_b < min {
        return Err(Error::InvalidDimension(format!("d_B = {d_b}, need at least {min}")));
    }
    Ok(())
}

/// One draw of a `d x d` GUE matrix: real diagonal entries of variance one,
/// complex off-diagonal entries of unit variance.
pub fn sample_gue_matrix<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let mut h = CMatrix::zeros(d, d);
    for i in 0..d {
        let diag: f64 = rng.sample(StandardNormal);
        h[(i, i)] = Complex64::new(diag, 0.0);
        for j in (i + 1)..d {
            let z = complex_gaussian(rng);
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
        }
    }
    h
}

/// Eigenvalues of one seeded GUE draw (semicircle radius `2 sqrt(d_B)`).
pub fn sample_gue_spectrum(d_b: usize, rng_seed: u64) -> Result<Spectrum> {
    require_dim(d_b, 2)?;
    let mut rng = rng_from_seed(rng_seed);
    let h = sample_gue_matrix(d_b, &mut rng);
    let energies = hermitian_eigenvalues(&h)?;
    Ok(Spectrum { energies, ensemble: Ensemble::Gue, unfolded: false })
}

/// Uncorrelated levels: cumulative sum of iid exponential spacings starting
/// from zero.
pub fn sample_poisson_spectrum(d_b: usize, mean_spacing: f64, rng_seed: u64) -> Result<Spectrum> {
    require_dim(d_b, 2)?;
    if !(mean_spacing > 0.0) || !mean_spacing.is_finite() {
        return Err(Error::InvalidParameter(format!("mean spacing must be positive, got {mean_spacing}")));
    }
    let exp = Exp::new(1.0 / mean_spacing).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let mut rng = rng_from_seed(rng_seed);
    let mut energies = Vec::with_capacity(d_b);
    let mut e = 0.0;
    energies.push(e);
    for _ in 1..d_b {
        e += exp.sample(&mut rng);
        energies.push(e);
    }
    Ok(Spectrum { energies, ensemble: Ensemble::Poisson, unfolded: false })
}

/// Regular lattice `E_n = n * spacing`.
pub fn picket_fence_spectrum(d_b: usize, spacing: f64) -> Result<Spectrum> {
    require_dim(d_b, 1)?;
    if !(spacing > 0.0) || !spacing.is_finite() {
        return Err(Error::InvalidParameter(format!("spacing must be positive, got {spacing}")));
    }
    let energies = (0..d_b).map(|n| n as f64 * spacing).collect();
    Ok(Spectrum { energies, ensemble: Ensemble::PicketFence, unfolded: false })
}

/// Smooth mean counting function used to unfold a spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DensityModel {
    /// Constant density: unfolding reduces to an affine rescaling.
    Uniform,
    /// Wigner semicircle of the given radius centred at zero.
    Semicircle { radius: f64 },
    /// Empirical staircase smoothed by a symmetric moving average of the
    /// levels with the given half-window (shrinking at the edges).
    LocalStaircase { half_window: usize },
}

impl DensityModel {
    /// Model matched to how a spectrum was generated.
    pub fn for_spectrum(s: &Spectrum) -> Self {
        let d = s.dim();
        match s.ensemble() {
            Ensemble::Gue => DensityModel::Semicircle { radius: 2.0 * (d as f64).sqrt() },
            Ensemble::Poisson | Ensemble::PicketFence => DensityModel::Uniform,
            Ensemble::Custom => DensityModel::LocalStaircase { half_window: ((d as f64).sqrt() as usize).max(1) },
        }
    }
}

fn semicircle_count(e: f64, radius: f64) -> f64 {
    let x = (e / radius).clamp(-1.0, 1.0);
    0.5 + (x * (1.0 - x * x).sqrt() + x.asin()) / PI
}

fn local_staircase(energies: &[f64], half_window: usize) -> Vec<f64> {
    let d = energies.len();
    let mut prefix = Vec::with_capacity(d + 1);
    prefix.push(0.0);
    for e in energies {
        prefix.push(prefix.last().unwrap() + e);
    }
    let smoothed: Vec<f64> = (0..d)
        .map(|n| {
            let h = half_window.min(n).min(d - 1 - n);
            (prefix[n + h + 1] - prefix[n - h]) / (2 * h + 1) as f64
        })
        .collect();
    // invert the monotone map rank -> smoothed level by linear interpolation
    energies
        .iter()
        .map(|&e| {
            let k = smoothed.partition_point(|&s| s <= e);
            if k == 0 {
                0.0
            } else if k >= d {
                (d - 1) as f64
            } else {
                let (lo, hi) = (smoothed[k - 1], smoothed[k]);
                if hi > lo {
                    (k - 1) as f64 + (e - lo) / (hi - lo)
                } else {
                    (k - 1) as f64
                }
            }
        })
        .collect()
}

/// Unfolds with an explicit density model. The output is rank-preserving,
/// starts at zero and has unit mean nearest-neighbour spacing.
pub fn unfold_with(s: &Spectrum, model: DensityModel) -> Result<Spectrum> {
    let d = s.dim();
    require_dim(d, 2)?;
    if s.max() == s.min() {
        return Err(Error::DegenerateSpectrum("all energies are equal".into()));
    }
    let counts: Vec<f64> = match model {
        DensityModel::Uniform => s.energies.clone(),
        DensityModel::Semicircle { radius } => {
            if !(radius > 0.0) {
                return Err(Error::InvalidParameter(format!("semicircle radius {radius}")));
            }
            s.energies.iter().map(|&e| semicircle_count(e, radius)).collect()
        }
        DensityModel::LocalStaircase { half_window } => local_staircase(&s.energies, half_window),
    };
    let (lo, hi) = (counts[0], counts[d - 1]);
    if !(hi > lo) {
        return Err(Error::DegenerateSpectrum("density model maps every level to the same point".into()));
    }
    let scale = (d - 1) as f64 / (hi - lo);
    let mut energies: Vec<f64> = counts.iter().map(|c| (c - lo) * scale).collect();
    // pin the endpoints so the mean spacing is one to rounding
    energies[0] = 0.0;
    energies[d - 1] = (d - 1) as f64;
    Ok(Spectrum { energies, ensemble: s.ensemble, unfolded: true })
}

/// Rescales to unit mean level spacing using the density model matching the
/// spectrum's ensemble. Already-unfolded spectra are returned unchanged.
pub fn unfold(s: &Spectrum) -> Result<Spectrum> {
    if s.unfolded {
        return Ok(s.clone());
    }
    unfold_with(s, DensityModel::for_spectrum(s))
}

/// `2 pi` times the mean density of states, `2 pi (d_B - 1) / (E_max - E_min)`.
pub fn heisenberg_time(s: &Spectrum) -> Result<f64> {
    require_dim(s.dim(), 2)?;
    let width = s.max() - s.min();
    if !(width > 0.0) {
        return Err(Error::DegenerateSpectrum("zero spectral width".into()));
    }
    Ok(2.0 * PI * (s.dim() - 1) as f64 / width)
}

/// Mean of `min(delta_n, delta_{n+1}) / max(delta_n, delta_{n+1})` over
/// consecutive spacings. A pair of zero spacings contributes zero.
pub fn spacing_ratio_statistic(s: &Spectrum) -> Result<f64> {
    require_dim(s.dim(), 3)?;
    let spacings: Vec<f64> = s.energies.windows(2).map(|w| w[1] - w[0]).collect();
    let ratios = spacings.windows(2).map(|w| {
        let (a, b) = (w[0], w[1]);
        let hi = a.max(b);
        if hi > 0.0 {
            a.min(b) / hi
        } else {
            0.0
        }
    });
    let n = spacings.len() - 1;
    Ok(crate::stats::compensated_sum(ratios) / n as f64)
}

/// Spectrum of a user-supplied Hamiltonian together with its eigenbasis.
#[derive(Debug, Clone)]
pub struct Eigensystem {
    pub spectrum: Spectrum,
    /// Column `n` holds `|E_n>` in the computational basis.
    pub basis: CMatrix,
}

impl Eigensystem {
    /// Components `phi(E_n) = <E_n|psi>` of a computational-basis state.
    pub fn profile_of(&self, state: &[Complex64]) -> Result<StateProfile> {
        let d = self.spectrum.dim();
        if state.len() != d {
            return Err(Error::Pairing(format!("state has {} entries, Hamiltonian dimension is {d}", state.len())));
        }
        let amplitudes = (0..d)
            .map(|n| (0..d).map(|i| self.basis[(i, n)].conj() * state[i]).sum())
            .collect();
        StateProfile::normalized(amplitudes, ProfileTag::Custom).map(|(p, _)| p)
    }

    /// `e^{-iHt} psi` evaluated as phase evolution in the eigenbasis.
    pub fn evolve(&self, state: &[Complex64], t: f64) -> Result<Vec<Complex64>> {
        let d = self.spectrum.dim();
        if state.len() != d {
            return Err(Error::Pairing(format!("state has {} entries, Hamiltonian dimension is {d}", state.len())));
        }
        let coeffs: Vec<Complex64> = (0..d)
            .map(|n| {
                let c: Complex64 = (0..d).map(|i| self.basis[(i, n)].conj() * state[i]).sum();
                c * Complex64::from_polar(1.0, -self.spectrum.energies[n] * t)
            })
            .collect();
        Ok((0..d).map(|i| (0..d).map(|n| self.basis[(i, n)] * coeffs[n]).sum()).collect())
    }
}

/// Diagonalizes a Hermitian matrix; rejects inputs whose elementwise
/// asymmetry exceeds [`HERMITIAN_TOLERANCE`].
pub fn diagonalize_hermitian(h: &CMatrix) -> Result<Eigensystem> {
    if h.nrows() != h.ncols() || h.nrows() == 0 {
        return Err(Error::InvalidDimension(format!("Hamiltonian must be square, got {}x{}", h.nrows(), h.ncols())));
    }
    let dev = hermitian_deviation(h);
    if dev > HERMITIAN_TOLERANCE {
        return Err(Error::SymmetryViolation(dev));
    }
    let (energies, basis) = hermitian_eigen(h)?;
    Ok(Eigensystem { spectrum: Spectrum { energies, ensemble: Ensemble::Custom, unfolded: false }, basis })
}
