//! Return amplitudes, spectral form factors and the Krylov Gram matrix.
//!
//! All time evolution is exact phase evolution in the eigenbasis of `H_B`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::ExecPolicy;
use crate::linalg::{hermitian_deviation, hermitian_eigenvalues, CMatrix};
use crate::spectra::{heisenberg_time, Ensemble, Spectrum};
use crate::states::StateProfile;

/// Hermiticity and unit-diagonal tolerance for Gram matrices.
pub const GRAM_TOLERANCE: f64 = 1e-12;
/// Smallest admissible Gram eigenvalue; anything above is clipped to zero.
pub const PSD_TOLERANCE: f64 = 1e-10;

fn phase(e: f64, t: f64) -> Complex64 {
    Complex64::from_polar(1.0, -e * t)
}

/// `sum_n |phi_n|^2 exp(-i E_n t)`.
pub fn return_amplitude(s: &Spectrum, phi: &StateProfile, t: f64) -> Result<Complex64> {
    phi.check_paired(s)?;
    Ok(amplitude_from_weights(s.energies(), &phi.weights(), t))
}

pub(crate) fn amplitude_from_weights(energies: &[f64], weights: &[f64], t: f64) -> Complex64 {
    energies.iter().zip(weights).map(|(&e, &w)| w * phase(e, t)).sum()
}

/// `p_phi(t) = |<phi| exp(-i H_B t) |phi>|^2`.
pub fn return_probability(s: &Spectrum, phi: &StateProfile, t: f64) -> Result<f64> {
    Ok(return_amplitude(s, phi, t)?.norm_sqr())
}

/// Spectral form factor `|sum_n exp(-i E_n t)|^2 / d_B^2`.
pub fn sff(s: &Spectrum, t: f64) -> f64 {
    let d = s.dim() as f64;
    let z: Complex64 = s.energies().iter().map(|&e| phase(e, t)).sum();
    z.norm_sqr() / (d * d)
}

/// Return amplitudes and probabilities on a time grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReturnSeries {
    pub times: Vec<f64>,
    pub amplitudes: Vec<Complex64>,
    pub probabilities: Vec<f64>,
}

pub fn return_series(s: &Spectrum, phi: &StateProfile, times: &[f64], policy: ExecPolicy) -> Result<ReturnSeries> {
    phi.check_paired(s)?;
    let weights = phi.weights();
    let amplitudes = policy.map_slice(times, |&t| amplitude_from_weights(s.energies(), &weights, t));
    let probabilities = amplitudes.iter().map(|a| a.norm_sqr()).collect();
    Ok(ReturnSeries { times: times.to_vec(), amplitudes, probabilities })
}

/// Overlaps `G_jk = <K_j|K_k>` of the Krylov vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    entries: CMatrix,
    t0: f64,
    toeplitz: bool,
}

impl GramMatrix {
    /// Validates an arbitrary matrix as a Gram matrix: Hermitian and unit
    /// diagonal within [`GRAM_TOLERANCE`], positive semidefinite within
    /// [`PSD_TOLERANCE`].
    pub fn from_matrix(entries: CMatrix, t0: f64) -> Result<Self> {
        let d = entries.nrows();
        if d == 0 || entries.ncols() != d {
            return Err(Error::MalformedInput(format!("Gram matrix must be square and non-empty, got {}x{}", d, entries.ncols())));
        }
        let dev = hermitian_deviation(&entries);
        if dev > GRAM_TOLERANCE {
            return Err(Error::MalformedInput(format!("Gram matrix not Hermitian (deviation {dev:e})")));
        }
        if let Some(j) = (0..d).find(|&j| (entries[(j, j)] - Complex64::new(1.0, 0.0)).norm() > GRAM_TOLERANCE) {
            return Err(Error::MalformedInput(format!("Gram diagonal entry {j} is {} (expected 1)", entries[(j, j)])));
        }
        let min_eig = hermitian_eigenvalues(&entries)?[0];
        if min_eig < -PSD_TOLERANCE {
            return Err(Error::MalformedInput(format!("Gram matrix has negative eigenvalue {min_eig:e}")));
        }
        let toeplitz = is_toeplitz(&entries);
        Ok(Self { entries, t0, toeplitz })
    }

    /// Hermitian Toeplitz matrix with `G_{0k} = first_row[k]`.
    pub fn from_first_row(first_row: &[Complex64], t0: f64) -> Result<Self> {
        let d = first_row.len();
        let entries = CMatrix::from_fn(d, d, |j, k| if k >= j { first_row[k - j] } else { first_row[j - k].conj() });
        Self::from_matrix(entries, t0)
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn d_a(&self) -> usize {
        self.entries.nrows()
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn is_toeplitz(&self) -> bool {
        self.toeplitz
    }

    pub fn first_row(&self) -> Vec<Complex64> {
        self.entries.row(0).iter().copied().collect()
    }

    pub fn first_column(&self) -> Vec<Complex64> {
        self.entries.column(0).iter().copied().collect()
    }

    /// `Tr(G^2) = sum_jk |G_jk|^2` for Hermitian `G`.
    pub fn trace_of_square(&self) -> f64 {
        crate::stats::compensated_sum(self.entries.iter().map(|z| z.norm_sqr()))
    }

    /// Eigenvalues in non-decreasing order, before any clipping.
    pub fn raw_eigenvalues(&self) -> Result<Vec<f64>> {
        hermitian_eigenvalues(&self.entries)
    }

    /// Eigenvalues with round-off negatives clipped to zero.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(self.raw_eigenvalues()?.into_iter().map(|r| r.max(0.0)).collect())
    }
}

fn is_toeplitz(m: &CMatrix) -> bool {
    let d = m.nrows();
    (1..d).all(|j| (1..d).all(|k| (m[(j, k)] - m[(j - 1, k - 1)]).norm() <= GRAM_TOLERANCE))
}

fn check_t0(t0: f64) -> Result<()> {
    if !(t0 > 0.0) || !t0.is_finite() {
        return Err(Error::InvalidParameter(format!("t0 must be positive and finite, got {t0}")));
    }
    Ok(())
}

fn check_d_a(d_a: usize) -> Result<()> {
    if d_a == 0 {
        return Err(Error::InvalidDimension("d_A must be positive".into()));
    }
    Ok(())
}

/// Return amplitudes `a(tau t0)` for `tau = 0..d_A`.
pub fn lag_amplitudes(s: &Spectrum, phi: &StateProfile, t0: f64, d_a: usize) -> Result<Vec<Complex64>> {
    phi.check_paired(s)?;
    check_t0(t0)?;
    check_d_a(d_a)?;
    let weights = phi.weights();
    Ok((0..d_a).map(|tau| amplitude_from_weights(s.energies(), &weights, tau as f64 * t0)).collect())
}

/// Toeplitz Gram matrix `G_jk = a((k - j) t0)` of the Krylov set
/// `{U^n |phi>}`, `U = exp(-i H_B t0)`.
pub fn krylov_gram(s: &Spectrum, phi: &StateProfile, t0: f64, d_a: usize) -> Result<GramMatrix> {
    let a = lag_amplitudes(s, phi, t0, d_a)?;
    let mut entries = CMatrix::from_fn(d_a, d_a, |j, k| if k >= j { a[k - j] } else { a[j - k].conj() });
    for j in 0..d_a {
        entries[(j, j)] = Complex64::new(1.0, 0.0);
    }
    Ok(GramMatrix { entries, t0, toeplitz: true })
}

/// Explicit Krylov vectors in the eigenbasis: vector `n` has components
/// `phi_m exp(-i E_m n t0)`.
pub fn krylov_vectors(s: &Spectrum, phi: &StateProfile, t0: f64, d_a: usize) -> Result<Vec<Vec<Complex64>>> {
    phi.check_paired(s)?;
    check_t0(t0)?;
    check_d_a(d_a)?;
    Ok((0..d_a)
        .map(|n| {
            s.energies()
                .iter()
                .zip(phi.amplitudes())
                .map(|(&e, &a)| a * phase(e, n as f64 * t0))
                .collect()
        })
        .collect())
}

/// How to pick the Krylov time step when it is not given explicitly.
///
/// Serialized as a bare number or one of `"auto-exact"`, `"ramp-window"`,
/// `"ramp-onset"`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "T0Repr", into = "T0Repr")]
pub enum T0Policy {
    Explicit(f64),
    /// `t0 = min(0.05 t_H, 0.5 t_H / d_A)`: the window `[t0, d_A t0]` stays
    /// below half the Heisenberg time and starts at `0.05 t_H` when it fits.
    RampWindow,
    /// `t0 = t_H / d_B`: the whole window sits at the onset of the ramp,
    /// `t << t_H`.
    RampOnset,
    /// `2 pi / (spacing d_B)` on a picket fence, where the Krylov set is
    /// exactly orthonormal; [`T0Policy::RampWindow`] otherwise.
    AutoExact,
}

impl T0Policy {
    pub fn resolve(&self, s: &Spectrum, d_a: usize) -> Result<f64> {
        check_d_a(d_a)?;
        let t0 = match *self {
            T0Policy::Explicit(t0) => t0,
            T0Policy::RampWindow => {
                let th = heisenberg_time(s)?;
                (0.05 * th).min(0.5 * th / d_a as f64)
            }
            T0Policy::RampOnset => heisenberg_time(s)? / s.dim() as f64,
            T0Policy::AutoExact => {
                if s.ensemble() == Ensemble::PicketFence {
                    heisenberg_time(s)? / s.dim() as f64
                } else {
                    return T0Policy::RampWindow.resolve(s, d_a);
                }
            }
        };
        check_t0(t0)?;
        Ok(t0)
    }
}

impl Default for T0Policy {
    fn default() -> Self {
        T0Policy::RampWindow
    }
}

impl std::fmt::Display for T0Policy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            T0Policy::Explicit(t0) => write!(f, "{t0}"),
            T0Policy::RampWindow => f.write_str("ramp-window"),
            T0Policy::RampOnset => f.write_str("ramp-onset"),
            T0Policy::AutoExact => f.write_str("auto-exact"),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum T0Repr {
    Value(f64),
    Name(String),
}

impl TryFrom<T0Repr> for T0Policy {
    type Error = Error;

    fn try_from(r: T0Repr) -> Result<Self> {
        match r {
            T0Repr::Value(t0) => Ok(T0Policy::Explicit(t0)),
            T0Repr::Name(name) => name.parse(),
        }
    }
}

impl From<T0Policy> for T0Repr {
    fn from(p: T0Policy) -> Self {
        match p {
            T0Policy::Explicit(t0) => T0Repr::Value(t0),
            other => T0Repr::Name(other.to_string()),
        }
    }
}

impl std::str::FromStr for T0Policy {
    type Err = Error;

    fn from_str(v: &str) -> Result<Self> {
        match v {
            "auto-exact" | "auto_exact" => Ok(T0Policy::AutoExact),
            "ramp-window" | "ramp_window" => Ok(T0Policy::RampWindow),
            "ramp-onset" | "ramp_onset" => Ok(T0Policy::RampOnset),
            other => other
                .parse::<f64>()
                .map(T0Policy::Explicit)
                .map_err(|_| Error::Configuration(format!("t0 must be a number or auto-exact/ramp-window/ramp-onset, got `{other}`"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::{picket_fence_spectrum, sample_gue_spectrum, sample_poisson_spectrum, unfold};
    use crate::states::{flat_state, haar_random_state};
    use std::f64::consts::PI;

    fn one() -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    #[test]
    fn amplitude_special_values() {
        let s = picket_fence_spectrum(4, 1.0).unwrap();
        let f = flat_state(4).unwrap();
        assert!((return_amplitude(&s, &f, 0.0).unwrap() - one()).norm() < 1e-15);
        assert!((return_amplitude(&s, &f, 2.0 * PI).unwrap() - one()).norm() < 1e-12);
        assert!(return_amplitude(&s, &f, PI / 2.0).unwrap().norm() < 1e-12);
    }

    #[test]
    fn pairing_is_checked() {
        let s = picket_fence_spectrum(4, 1.0).unwrap();
        let f = flat_state(5).unwrap();
        assert!(matches!(return_amplitude(&s, &f, 1.0), Err(Error::Pairing(_))));
        assert!(matches!(krylov_gram(&s, &f, 1.0, 2), Err(Error::Pairing(_))));
    }

    #[test]
    fn return_probability_matches_double_sum() {
        let s = sample_poisson_spectrum(40, 1.0, 3).unwrap();
        let phi = haar_random_state(40, 5).unwrap();
        let w = phi.weights();
        for t in [0.0, 0.3, 1.7, 12.0] {
            let mut double = Complex64::new(0.0, 0.0);
            for n in 0..40 {
                for m in 0..40 {
                    let de = s.energies()[n] - s.energies()[m];
                    double += w[n] * w[m] * Complex64::from_polar(1.0, -de * t);
                }
            }
            assert!(double.im.abs() < 1e-12);
            assert!((return_probability(&s, &phi, t).unwrap() - double.re).abs() < 1e-10);
        }
    }

    #[test]
    fn eigenstate_is_stationary() {
        let s = sample_gue_spectrum(16, 2).unwrap();
        let e = StateProfile::eigenstate(16, 5).unwrap();
        for t in [0.0, 0.4, 3.0, 100.0] {
            assert!((return_probability(&s, &e, t).unwrap() - 1.0).abs() < 1e-12);
        }
        let g = krylov_gram(&s, &e, 0.7, 4).unwrap();
        for z in g.entries().iter() {
            assert!(z.norm() > 1.0 - 1e-12);
        }
    }

    #[test]
    fn sff_equals_flat_return_probability() {
        let s = sample_gue_spectrum(32, 4).unwrap();
        let f = flat_state(32).unwrap();
        assert_eq!(sff(&s, 0.0), 1.0);
        for t in [0.1, 0.9, 5.0, 40.0] {
            assert!((sff(&s, t) - return_probability(&s, &f, t).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn gram_edge_cases() {
        let s = picket_fence_spectrum(16, 1.0).unwrap();
        let f = flat_state(16).unwrap();
        let g = krylov_gram(&s, &f, 0.3, 1).unwrap();
        assert_eq!(g.entries()[(0, 0)], one());
        let g = krylov_gram(&s, &f, 2.0 * PI / 16.0, 16).unwrap();
        assert!((g.entries() - CMatrix::identity(16, 16)).norm() < 1e-12);
        assert!(matches!(krylov_gram(&s, &f, 0.0, 2), Err(Error::InvalidParameter(_))));
        assert!(matches!(krylov_gram(&s, &f, -1.0, 2), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn gram_invariants_hold() {
        let s = unfold(&sample_gue_spectrum(48, 6).unwrap()).unwrap();
        let phi = haar_random_state(48, 7).unwrap();
        let g = krylov_gram(&s, &phi, 0.4, 9).unwrap();
        let checked = GramMatrix::from_matrix(g.entries().clone(), g.t0()).unwrap();
        assert!(checked.is_toeplitz());
        assert!(g.raw_eigenvalues().unwrap()[0] >= -PSD_TOLERANCE);
    }

    #[test]
    fn krylov_vectors_reproduce_gram() {
        let s = sample_poisson_spectrum(30, 1.0, 8).unwrap();
        let phi = haar_random_state(30, 9).unwrap();
        let vs = krylov_vectors(&s, &phi, 0.55, 6).unwrap();
        assert_eq!(vs[0], phi.amplitudes());
        let g = krylov_gram(&s, &phi, 0.55, 6).unwrap();
        for j in 0..6 {
            let norm: f64 = vs[j].iter().map(|z| z.norm_sqr()).sum();
            assert!((norm - 1.0).abs() < 1e-12);
            for k in 0..6 {
                let ip: Complex64 = vs[j].iter().zip(&vs[k]).map(|(a, b)| a.conj() * b).sum();
                assert!((ip - g.entries()[(j, k)]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn from_matrix_rejects_bad_input() {
        let mut m = CMatrix::identity(3, 3);
        m[(0, 0)] = Complex64::new(1.1, 0.0);
        assert!(matches!(GramMatrix::from_matrix(m, 1.0), Err(Error::MalformedInput(_))));
        let mut m = CMatrix::identity(2, 2);
        m[(0, 1)] = Complex64::new(2.0, 0.0);
        m[(1, 0)] = Complex64::new(2.0, 0.0);
        // eigenvalues -1 and 3
        assert!(matches!(GramMatrix::from_matrix(m, 1.0), Err(Error::MalformedInput(_))));
        let mut m = CMatrix::identity(2, 2);
        m[(0, 1)] = Complex64::new(0.5, 0.0);
        assert!(matches!(GramMatrix::from_matrix(m, 1.0), Err(Error::MalformedInput(_))));
    }

    #[test]
    fn toeplitz_round_trip() {
        let s = sample_poisson_spectrum(20, 1.0, 1).unwrap();
        let phi = haar_random_state(20, 2).unwrap();
        let g = krylov_gram(&s, &phi, 0.8, 5).unwrap();
        let back = GramMatrix::from_first_row(&g.first_row(), g.t0()).unwrap();
        assert!((back.entries() - g.entries()).norm() < 1e-15);
        let col = g.first_column();
        for (r, c) in g.first_row().iter().zip(&col) {
            assert!((r.conj() - c).norm() < 1e-15);
        }
    }

    #[test]
    fn t0_policies() {
        let pf = picket_fence_spectrum(64, 1.0).unwrap();
        assert!((T0Policy::AutoExact.resolve(&pf, 4).unwrap() - 2.0 * PI / 64.0).abs() < 1e-15);
        let u = unfold(&sample_poisson_spectrum(100, 1.0, 1).unwrap()).unwrap();
        let th = heisenberg_time(&u).unwrap();
        let t0 = T0Policy::RampWindow.resolve(&u, 8).unwrap();
        assert!(t0 >= 0.05 * th - 1e-12 && 8.0 * t0 <= 0.5 * th + 1e-12);
        assert_eq!(T0Policy::AutoExact.resolve(&u, 8).unwrap(), t0);
        let t0 = T0Policy::RampWindow.resolve(&u, 32).unwrap();
        assert!((32.0 * t0 - 0.5 * th).abs() < 1e-12);
        assert!((T0Policy::RampOnset.resolve(&u, 8).unwrap() - th / 100.0).abs() < 1e-15);
        assert!(T0Policy::Explicit(-1.0).resolve(&u, 8).is_err());
        assert_eq!("0.25".parse::<T0Policy>().unwrap(), T0Policy::Explicit(0.25));
        assert_eq!("auto-exact".parse::<T0Policy>().unwrap(), T0Policy::AutoExact);
        assert!("soon".parse::<T0Policy>().is_err());
    }

    #[test]
    fn series_policies_agree() {
        let s = sample_poisson_spectrum(50, 1.0, 2).unwrap();
        let phi = haar_random_state(50, 3).unwrap();
        let times: Vec<f64> = (0..40).map(|i| i as f64 * 0.25).collect();
        let a = return_series(&s, &phi, &times, ExecPolicy::Sequential).unwrap();
        let b = return_series(&s, &phi, &times, ExecPolicy::Parallel).unwrap();
        assert_eq!(a, b);
        assert!((a.probabilities[0] - 1.0).abs() < 1e-12);
        assert!(a.probabilities.iter().all(|&p| (0.0..=1.0 + 1e-12).contains(&p)));
    }
}
