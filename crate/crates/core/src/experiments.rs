//! Ensemble-averaged sweeps: the purity table across spectral ensembles and
//! initial profiles, the split of the return probability into spectral and
//! state contributions, form-factor ramp scans and capacity tables.
//!
//! Every realization is a pure function of a seed derived from the base seed
//! and its coordinates, so results do not depend on thread count.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::dynamics::{amplitude_from_weights, sff, T0Policy};
use crate::entanglement::{haar_scrambler_purity, mixed_state_purity, purity_from_return_prob, ProtocolConfig};
use crate::error::{Error, Result};
use crate::exec::ExecPolicy;
use crate::seed::{derive_seed, tag_hash};
use crate::spectra::{picket_fence_spectrum, sample_gue_spectrum, sample_poisson_spectrum, unfold, Ensemble, Spectrum};
use crate::states::{coherent_gibbs_state, flat_state, gaussian_wavepacket, haar_random_state, ProfileTag, StateProfile};
use crate::stats::{compensated_sum, linear_fit, mean_sem};
use crate::transfer::{min_db_bound, CapacityCase, CaseTag};

/// Header of the sweep CSV.
pub const SWEEP_HEADER: [&str; 10] =
    ["ensemble", "profile", "d_A", "d_B", "t0", "n_real", "mean_purity", "sem_purity", "mean_eta2", "excess_times_dB"];

/// Header of the Monte Carlo baseline CSV.
pub const MC_HEADER: [&str; 8] = ["ensemble", "profile", "d_A", "d_B", "t0", "n_real", "mean", "sem"];

/// Seed of the spectrum for realization `r`.
pub fn spectrum_seed(base_seed: u64, ensemble: Ensemble, d_b: usize, r: usize) -> u64 {
    derive_seed(base_seed, &[tag_hash("spectrum"), tag_hash(ensemble.as_str()), d_b as u64, r as u64])
}

/// Seed of a random initial profile for realization `r`.
pub fn profile_seed(base_seed: u64, ensemble: Ensemble, d_b: usize, r: usize) -> u64 {
    derive_seed(base_seed, &[tag_hash("profile"), tag_hash(ensemble.as_str()), d_b as u64, r as u64])
}

/// One unfolded realization of `ensemble` at dimension `d_b`.
pub fn realization_spectrum(ensemble: Ensemble, d_b: usize, seed: u64) -> Result<Spectrum> {
    let raw = match ensemble {
        Ensemble::Gue => sample_gue_spectrum(d_b, seed)?,
        Ensemble::Poisson => sample_poisson_spectrum(d_b, 1.0, seed)?,
        Ensemble::PicketFence => picket_fence_spectrum(d_b, 1.0)?,
        Ensemble::Custom => {
            return Err(Error::Configuration("custom spectra cannot be sampled; load them from a file".into()))
        }
    };
    unfold(&raw)
}

/// `n` unfolded realizations with seeds from [`spectrum_seed`].
pub fn sample_ensemble(ensemble: Ensemble, d_b: usize, n: usize, base_seed: u64, policy: ExecPolicy) -> Result<Vec<Spectrum>> {
    policy
        .map_indexed(n, |r| realization_spectrum(ensemble, d_b, spectrum_seed(base_seed, ensemble, d_b, r)))
        .into_iter()
        .collect()
}

/// Parameters for building a profile on an unfolded spectrum. Unset values
/// default to a Gaussian centred mid-spectrum with width `d_B / 4` and a
/// Gibbs profile with `beta = 4 / d_B`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileParams {
    #[serde(default)]
    pub gaussian_center: Option<f64>,
    #[serde(default)]
    pub gaussian_sigma: Option<f64>,
    #[serde(default)]
    pub gibbs_beta: Option<f64>,
}

impl ProfileParams {
    pub fn build(&self, tag: ProfileTag, s: &Spectrum, seed: u64) -> Result<StateProfile> {
        let d = s.dim();
        match tag {
            ProfileTag::Flat => flat_state(d),
            ProfileTag::Gaussian => {
                let e0 = self.gaussian_center.unwrap_or(0.5 * (s.min() + s.max()));
                let sigma = self.gaussian_sigma.unwrap_or(0.25 * (s.max() - s.min()).max(1.0));
                gaussian_wavepacket(s, e0, sigma)
            }
            ProfileTag::Gibbs => {
                let beta = self.gibbs_beta.unwrap_or(4.0 / (s.max() - s.min()).max(1.0));
                coherent_gibbs_state(s, beta)
            }
            ProfileTag::HaarRandom => haar_random_state(d, seed),
            ProfileTag::Custom => Err(Error::Configuration("custom profiles cannot be used in sweeps".into())),
        }
    }
}

fn default_policy() -> ExecPolicy {
    ExecPolicy::default()
}

/// Grid of a purity sweep, read from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub ensembles: Vec<Ensemble>,
    pub profiles: Vec<ProfileTag>,
    #[serde(rename = "d_A_list")]
    pub d_a_list: Vec<usize>,
    #[serde(rename = "d_B_list")]
    pub d_b_list: Vec<usize>,
    #[serde(default)]
    pub t0_policy: T0Policy,
    pub n_realizations: usize,
    pub base_seed: u64,
    #[serde(default)]
    pub profile_params: ProfileParams,
    #[serde(default = "default_policy")]
    pub policy: ExecPolicy,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        let empty = [
            ("ensembles", self.ensembles.is_empty()),
            ("profiles", self.profiles.is_empty()),
            ("d_A_list", self.d_a_list.is_empty()),
            ("d_B_list", self.d_b_list.is_empty()),
        ];
        if let Some((name, _)) = empty.iter().find(|(_, e)| *e) {
            return Err(Error::Configuration(format!("{name} must not be empty")));
        }
        if self.n_realizations == 0 {
            return Err(Error::Configuration("n_realizations must be at least 1".into()));
        }
        if self.d_a_list.contains(&0) {
            return Err(Error::Configuration("d_A values must be positive".into()));
        }
        if let Some(d) = self.d_b_list.iter().find(|&&d| d < 2) {
            return Err(Error::Configuration(format!("d_B values must be at least 2, got {d}")));
        }
        if let T0Policy::Explicit(t0) = self.t0_policy {
            if !(t0 > 0.0) || !t0.is_finite() {
                return Err(Error::Configuration(format!("explicit t0 must be positive, got {t0}")));
            }
        }
        Ok(())
    }

    pub fn grid_size(&self) -> usize {
        self.ensembles.len() * self.profiles.len() * self.d_a_list.len() * self.d_b_list.len()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub ensemble: Ensemble,
    pub profile: ProfileTag,
    #[serde(rename = "d_A")]
    pub d_a: usize,
    #[serde(rename = "d_B")]
    pub d_b: usize,
    pub t0: f64,
    pub n_real: usize,
    pub mean_purity: f64,
    pub sem_purity: f64,
    pub mean_eta2: f64,
    /// `(mean_purity - 1/d_A) d_B`.
    #[serde(rename = "excess_times_dB")]
    pub excess_times_db: f64,
    /// Set when this grid point failed; the numeric fields are then NaN.
    pub error: Option<String>,
}

impl SweepRow {
    fn failed(ensemble: Ensemble, profile: ProfileTag, d_a: usize, d_b: usize, n_real: usize, e: &Error) -> Self {
        Self {
            ensemble,
            profile,
            d_a,
            d_b,
            t0: f64::NAN,
            n_real,
            mean_purity: f64::NAN,
            sem_purity: f64::NAN,
            mean_eta2: f64::NAN,
            excess_times_db: f64::NAN,
            error: Some(e.to_string()),
        }
    }

    /// Excess purity over `1/d_A` and its standard error.
    pub fn excess(&self) -> (f64, f64) {
        (self.mean_purity - 1.0 / self.d_a as f64, self.sem_purity)
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else {
        x.to_string()
    }
}

impl SweepResult {
    pub fn find(&self, ensemble: Ensemble, profile: ProfileTag, d_a: usize, d_b: usize) -> Option<&SweepRow> {
        self.rows.iter().find(|r| r.ensemble == ensemble && r.profile == profile && r.d_a == d_a && r.d_b == d_b)
    }

    /// CSV with [`SWEEP_HEADER`]; failed rows carry NaN.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(SWEEP_HEADER)?;
        for r in &self.rows {
            out.write_record([
                r.ensemble.as_str().to_string(),
                r.profile.as_str().to_string(),
                r.d_a.to_string(),
                r.d_b.to_string(),
                fmt_f64(r.t0),
                r.n_real.to_string(),
                fmt_f64(r.mean_purity),
                fmt_f64(r.sem_purity),
                fmt_f64(r.mean_eta2),
                fmt_f64(r.excess_times_db),
            ])?;
            out.flush()?;
        }
        out.flush()?;
        Ok(())
    }
}

pub fn run_purity_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    run_purity_sweep_with(spec, |ensemble, d_b| {
        sample_ensemble(ensemble, d_b, spec.n_realizations, spec.base_seed, spec.policy)
    })
}

/// Sweep over spectra supplied by `source(ensemble, d_B)`, which must return
/// at least `n_realizations` unfolded spectra. Spectra are shared across
/// profiles and `d_A`. Failures are recorded per row.
pub fn run_purity_sweep_with<F>(spec: &SweepSpec, mut source: F) -> Result<SweepResult>
where
    F: FnMut(Ensemble, usize) -> Result<Vec<Spectrum>>,
{
    spec.validate()?;
    let n = spec.n_realizations;
    let mut cells: BTreeMap<(usize, usize, usize, usize), SweepRow> = BTreeMap::new();
    for (ei, &ensemble) in spec.ensembles.iter().enumerate() {
        for (bi, &d_b) in spec.d_b_list.iter().enumerate() {
            let spectra = source(ensemble, d_b).and_then(|s| {
                if s.len() < n {
                    Err(Error::Configuration(format!("{} spectra supplied, {n} required", s.len())))
                } else {
                    Ok(s)
                }
            });
            for (pi, &profile) in spec.profiles.iter().enumerate() {
                for (ai, &d_a) in spec.d_a_list.iter().enumerate() {
                    let row = match &spectra {
                        Ok(spectra) => grid_point(spec, ensemble, profile, d_a, d_b, &spectra[..n])
                            .unwrap_or_else(|e| SweepRow::failed(ensemble, profile, d_a, d_b, n, &e)),
                        Err(e) => SweepRow::failed(ensemble, profile, d_a, d_b, n, e),
                    };
                    if let Some(e) = &row.error {
                        log::warn!("sweep point {ensemble}/{profile} d_A={d_a} d_B={d_b} failed: {e}");
                    }
                    cells.insert((ei, pi, ai, bi), row);
                }
            }
        }
    }
    Ok(SweepResult { rows: cells.into_values().collect() })
}

fn grid_point(
    spec: &SweepSpec,
    ensemble: Ensemble,
    profile: ProfileTag,
    d_a: usize,
    d_b: usize,
    spectra: &[Spectrum],
) -> Result<SweepRow> {
    let samples = spec.policy.map_indexed(spectra.len(), |r| -> Result<(f64, f64)> {
        let s = &spectra[r];
        let phi = spec.profile_params.build(profile, s, profile_seed(spec.base_seed, ensemble, d_b, r))?;
        let t0 = spec.t0_policy.resolve(s, d_a)?;
        let p = purity_from_return_prob(&ProtocolConfig::new(d_a, t0, s, &phi)?)?;
        Ok((t0, p))
    });
    let samples: Vec<(f64, f64)> = samples.into_iter().collect::<Result<_>>()?;
    let t0s: Vec<f64> = samples.iter().map(|x| x.0).collect();
    let purities: Vec<f64> = samples.iter().map(|x| x.1).collect();
    let (mean_purity, sem_purity) = mean_sem(&purities);
    let t0 = compensated_sum(t0s.iter().copied()) / t0s.len() as f64;
    Ok(SweepRow {
        ensemble,
        profile,
        d_a,
        d_b,
        t0,
        n_real: purities.len(),
        mean_purity,
        sem_purity,
        mean_eta2: d_a as f64 * mean_purity - 1.0,
        excess_times_db: (mean_purity - 1.0 / d_a as f64) * d_b as f64,
        error: None,
    })
}

/// Evenly spaced times `start..=end`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeWindow {
    pub start: f64,
    pub end: f64,
    pub points: usize,
}

impl TimeWindow {
    pub fn new(start: f64, end: f64, points: usize) -> Result<Self> {
        let w = Self { start, end, points };
        w.times()?;
        Ok(w)
    }

    pub fn times(&self) -> Result<Vec<f64>> {
        if self.points == 0 || !(self.start >= 0.0) || !(self.end >= self.start) || !self.end.is_finite() {
            return Err(Error::InvalidWindow(format!("[{}, {}] with {} points", self.start, self.end, self.points)));
        }
        if self.points == 1 {
            return Ok(vec![self.start]);
        }
        if self.end == self.start {
            return Err(Error::InvalidWindow(format!("empty window at t = {}", self.start)));
        }
        let step = (self.end - self.start) / (self.points - 1) as f64;
        Ok((0..self.points).map(|i| self.start + i as f64 * step).collect())
    }
}

/// Window-and-ensemble averages of the spectral part `f_E` (the form
/// factor) and the state part `f_phi = p_phi - p_flat`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Fluctuations {
    pub f_e: f64,
    pub f_e_sem: f64,
    pub f_phi: f64,
    pub f_phi_sem: f64,
}

pub fn decompose_fluctuations(
    ensemble: Ensemble,
    d_b: usize,
    profile: ProfileTag,
    window: &TimeWindow,
    n_realizations: usize,
    base_seed: u64,
    policy: ExecPolicy,
) -> Result<Fluctuations> {
    window.times()?;
    let spectra = sample_ensemble(ensemble, d_b, n_realizations, base_seed, policy)?;
    decompose_fluctuations_on(&spectra, profile, &ProfileParams::default(), window, base_seed, policy)
}

/// As [`decompose_fluctuations`], on given spectra. The profile of
/// realization `r` uses [`profile_seed`] with index `r`.
pub fn decompose_fluctuations_on(
    spectra: &[Spectrum],
    profile: ProfileTag,
    params: &ProfileParams,
    window: &TimeWindow,
    base_seed: u64,
    policy: ExecPolicy,
) -> Result<Fluctuations> {
    let times = window.times()?;
    if spectra.is_empty() {
        return Err(Error::EmptyInput("no spectra".into()));
    }
    let per_real = policy.map_indexed(spectra.len(), |r| -> Result<(f64, f64)> {
        let s = &spectra[r];
        let phi = params.build(profile, s, profile_seed(base_seed, s.ensemble(), s.dim(), r))?;
        let w = phi.weights();
        let mut fe = 0.0;
        let mut fphi = 0.0;
        for &t in &times {
            let k = sff(s, t);
            let p = if profile == ProfileTag::Flat { k } else { amplitude_from_weights(s.energies(), &w, t).norm_sqr() };
            fe += k;
            fphi += p - k;
        }
        Ok((fe / times.len() as f64, fphi / times.len() as f64))
    });
    let per_real: Vec<(f64, f64)> = per_real.into_iter().collect::<Result<_>>()?;
    let (f_e, f_e_sem) = mean_sem(&per_real.iter().map(|x| x.0).collect::<Vec<_>>());
    let (f_phi, f_phi_sem) = mean_sem(&per_real.iter().map(|x| x.1).collect::<Vec<_>>());
    Ok(Fluctuations { f_e, f_e_sem, f_phi, f_phi_sem })
}

/// Ensemble-averaged form factor on a time grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RampScan {
    pub times: Vec<f64>,
    pub mean_k: Vec<f64>,
    pub sem_k: Vec<f64>,
    pub n_real: usize,
    /// Heisenberg time of the (unfolded) spectra, averaged.
    pub t_h: f64,
}

impl RampScan {
    /// Least-squares line through the points with `start <= t <= end`.
    pub fn fit(&self, start: f64, end: f64) -> Result<(f64, f64)> {
        let (x, y): (Vec<f64>, Vec<f64>) = self
            .times
            .iter()
            .zip(&self.mean_k)
            .filter(|(&t, _)| t >= start && t <= end)
            .map(|(&t, &k)| (t, k))
            .unzip();
        if x.len() < 3 {
            return Err(Error::Fit(format!("{} points in [{start}, {end}], need at least 3", x.len())));
        }
        linear_fit(&x, &y).ok_or_else(|| Error::Fit("degenerate abscissae".into()))
    }

    /// Mean of `K` over the points with `t >= start`.
    pub fn tail_mean(&self, start: f64) -> Result<f64> {
        let tail: Vec<f64> = self.times.iter().zip(&self.mean_k).filter(|(&t, _)| t >= start).map(|(_, &k)| k).collect();
        if tail.is_empty() {
            return Err(Error::InvalidWindow(format!("no grid points beyond t = {start}")));
        }
        Ok(compensated_sum(tail.iter().copied()) / tail.len() as f64)
    }
}

pub fn ramp_scan(
    ensemble: Ensemble,
    d_b: usize,
    t_grid: &[f64],
    n_realizations: usize,
    base_seed: u64,
    policy: ExecPolicy,
) -> Result<RampScan> {
    check_grid(t_grid)?;
    let spectra = sample_ensemble(ensemble, d_b, n_realizations, base_seed, policy)?;
    ramp_scan_on(&spectra, t_grid, policy)
}

fn check_grid(t_grid: &[f64]) -> Result<()> {
    if t_grid.is_empty() {
        return Err(Error::EmptyInput("time grid".into()));
    }
    if t_grid.iter().any(|t| !(*t >= 0.0) || !t.is_finite()) || t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidWindow("time grid must be non-negative and strictly ascending".into()));
    }
    Ok(())
}

pub fn ramp_scan_on(spectra: &[Spectrum], t_grid: &[f64], policy: ExecPolicy) -> Result<RampScan> {
    check_grid(t_grid)?;
    if spectra.is_empty() {
        return Err(Error::EmptyInput("no spectra".into()));
    }
    let per_real: Vec<Vec<f64>> = policy.map_slice(spectra, |s| t_grid.iter().map(|&t| sff(s, t)).collect());
    let mut mean_k = Vec::with_capacity(t_grid.len());
    let mut sem_k = Vec::with_capacity(t_grid.len());
    for i in 0..t_grid.len() {
        let column: Vec<f64> = per_real.iter().map(|k| k[i]).collect();
        let (m, e) = mean_sem(&column);
        mean_k.push(m);
        sem_k.push(e);
    }
    let t_h: Vec<f64> = spectra.iter().map(crate::spectra::heisenberg_time).collect::<Result<_>>()?;
    Ok(RampScan {
        times: t_grid.to_vec(),
        mean_k,
        sem_k,
        n_real: spectra.len(),
        t_h: compensated_sum(t_h.iter().copied()) / t_h.len() as f64,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacityRow {
    pub case: CaseTag,
    #[serde(rename = "d_A")]
    pub d_a: usize,
    pub epsilon: f64,
    pub gamma: f64,
    pub kappa: f64,
    #[serde(rename = "min_dB")]
    pub min_db: f64,
    /// `min_db` divided by the ergodic-smooth bound at the same `d_A`.
    pub ratio_to_smooth: f64,
}

/// `min_dB` for every case and `d_A`, rows ordered by `d_A` then case.
pub fn capacity_comparison(d_a_list: &[usize], epsilon: f64, gamma: f64, kappa: f64) -> Result<Vec<CapacityRow>> {
    let mut rows = Vec::with_capacity(3 * d_a_list.len());
    for &d_a in d_a_list {
        let smooth = min_db_bound(d_a, &CapacityCase::new(CaseTag::ErgodicSmooth, epsilon, gamma, kappa)?)?;
        for tag in CaseTag::ALL {
            let case = CapacityCase::new(tag, epsilon, gamma, kappa)?;
            let min_db = min_db_bound(d_a, &case)?;
            rows.push(CapacityRow { case: tag, d_a, epsilon, gamma, kappa, min_db, ratio_to_smooth: min_db / smooth });
        }
    }
    Ok(rows)
}

pub fn write_capacity_csv<W: Write>(rows: &[CapacityRow], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["case", "d_A", "epsilon", "gamma", "kappa", "min_dB"])?;
    for r in rows {
        out.write_record([
            r.case.as_str().to_string(),
            r.d_a.to_string(),
            fmt_f64(r.epsilon),
            fmt_f64(r.gamma),
            fmt_f64(r.kappa),
            fmt_f64(r.min_db),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// A Monte Carlo baseline estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McRow {
    pub ensemble: String,
    pub profile: String,
    #[serde(rename = "d_A")]
    pub d_a: usize,
    #[serde(rename = "d_B")]
    pub d_b: usize,
    pub t0: Option<f64>,
    pub n_real: usize,
    pub mean: f64,
    pub sem: f64,
}

pub fn write_mc_csv<W: Write>(rows: &[McRow], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(MC_HEADER)?;
    for r in rows {
        out.write_record([
            r.ensemble.clone(),
            r.profile.clone(),
            r.d_a.to_string(),
            r.d_b.to_string(),
            r.t0.map(fmt_f64).unwrap_or_default(),
            r.n_real.to_string(),
            fmt_f64(r.mean),
            fmt_f64(r.sem),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// Mean purity after a global Haar-random unitary.
pub fn haar_scrambler_mc(d_a: usize, d_b: usize, n: usize, base_seed: u64, policy: ExecPolicy) -> Result<McRow> {
    if n == 0 {
        return Err(Error::Configuration("need at least one realization".into()));
    }
    let samples: Vec<f64> = policy
        .map_indexed(n, |r| {
            haar_scrambler_purity(d_a, d_b, derive_seed(base_seed, &[tag_hash("haar_scrambler"), d_a as u64, d_b as u64, r as u64]))
        })
        .into_iter()
        .collect::<Result<_>>()?;
    let (mean, sem) = mean_sem(&samples);
    Ok(McRow { ensemble: "haar_scrambler".into(), profile: "product".into(), d_a, d_b, t0: None, n_real: n, mean, sem })
}

/// Mean purity when B starts maximally mixed, over unfolded realizations.
pub fn mixed_state_mc(
    ensemble: Ensemble,
    d_a: usize,
    d_b: usize,
    t0_policy: T0Policy,
    n: usize,
    base_seed: u64,
    policy: ExecPolicy,
) -> Result<McRow> {
    let spectra = sample_ensemble(ensemble, d_b, n, base_seed, policy)?;
    mixed_state_mc_on(&spectra, d_a, t0_policy, policy)
}

pub fn mixed_state_mc_on(spectra: &[Spectrum], d_a: usize, t0_policy: T0Policy, policy: ExecPolicy) -> Result<McRow> {
    let first = spectra.first().ok_or_else(|| Error::EmptyInput("no spectra".into()))?;
    let samples: Vec<(f64, f64)> = policy
        .map_slice(spectra, |s| {
            let t0 = t0_policy.resolve(s, d_a)?;
            Ok((t0, mixed_state_purity(s, t0, d_a)?))
        })
        .into_iter()
        .collect::<Result<_>>()?;
    let (mean, sem) = mean_sem(&samples.iter().map(|x| x.1).collect::<Vec<_>>());
    let t0 = compensated_sum(samples.iter().map(|x| x.0)) / samples.len() as f64;
    Ok(McRow {
        ensemble: first.ensemble().as_str().into(),
        profile: "mixed".into(),
        d_a,
        d_b: first.dim(),
        t0: Some(t0),
        n_real: spectra.len(),
        mean,
        sem,
    })
}
