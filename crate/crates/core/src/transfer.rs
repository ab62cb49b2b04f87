//! Operator-transfer diagnostics for the generated entangled state.
//!
//! Everything is computed from the Gram matrix `G = R^dagger R` of the
//! Krylov set; the encoding map `R` itself is never formed.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::{GramMatrix, PSD_TOLERANCE};
use crate::error::{Error, Result};
use crate::linalg::{trace_of_product, CMatrix};
use crate::stats::compensated_sum;

/// Slack allowed on the Bhatia-Davis comparison.
pub const BHATIA_DAVIS_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferDiagnostics {
    /// Eigenvalues `r_k` of `G`, non-decreasing, clipped at zero.
    pub gram_eigenvalues: Vec<f64>,
    pub r_max: f64,
    pub r_min: f64,
    /// `max_k |r_k - 1|`: the worst relative error over all encoded
    /// operators.
    pub worst_case_error: f64,
    pub eta2: f64,
    /// `(r_max - 1)(1 - r_min)`.
    pub bd_product: f64,
    /// `(r_max - 1) / sqrt(2 eta2 ln d_A)`, reported for comparison with a
    /// Gaussian eigenvalue distribution. Absent when `eta2 = 0` or `d_A < 2`.
    pub gaussian_tail_ratio: Option<f64>,
}

pub fn transfer_diagnostics(g: &GramMatrix) -> Result<TransferDiagnostics> {
    let raw = g.raw_eigenvalues()?;
    if let Some(bad) = raw.iter().find(|&&r| r < -PSD_TOLERANCE) {
        return Err(Error::MalformedInput(format!("Gram eigenvalue {bad:e} is negative")));
    }
    let r: Vec<f64> = raw.into_iter().map(|x| x.max(0.0)).collect();
    let d = r.len();
    let mean = compensated_sum(r.iter().copied()) / d as f64;
    if (mean - 1.0).abs() > 1e-10 {
        return Err(Error::MalformedInput(format!("Gram eigenvalues average {mean}, expected 1")));
    }
    let r_min = r[0];
    let r_max = r[d - 1];
    let worst_case_error = r.iter().map(|x| (x - 1.0).abs()).fold(0.0, f64::max);
    let eta2 = compensated_sum(r.iter().map(|x| (x - 1.0).powi(2))) / d as f64;
    let bd_product = (r_max - 1.0) * (1.0 - r_min);
    let gaussian_tail_ratio =
        (eta2 > 0.0 && d >= 2).then(|| (r_max - 1.0) / (2.0 * eta2 * (d as f64).ln()).sqrt());
    Ok(TransferDiagnostics { gram_eigenvalues: r, r_max, r_min, worst_case_error, eta2, bd_product, gaussian_tail_ratio })
}

/// Whether `eta2 <= (r_max - 1)(1 - r_min)` holds, and the slack
/// `bd_product - eta2`.
pub fn bhatia_davis_check(diag: &TransferDiagnostics) -> (bool, f64) {
    let slack = diag.bd_product - diag.eta2;
    (slack >= -BHATIA_DAVIS_TOLERANCE, slack)
}

fn frobenius_sq(m: &CMatrix) -> f64 {
    compensated_sum(m.iter().map(|z| z.norm_sqr()))
}

/// Relative inner-product error `Delta_2(O, P)` of transferring `O` and `P`
/// through the state with Gram matrix `G`:
/// `|Tr[(G - I) O^T conj(P)]| / sqrt(Tr[O O^dagger] Tr[P P^dagger])`.
pub fn transfer_error(g: &GramMatrix, o: &CMatrix, p: &CMatrix) -> Result<f64> {
    let d = g.d_a();
    for (name, m) in [("O", o), ("P", p)] {
        if m.nrows() != d || m.ncols() != d {
            return Err(Error::Pairing(format!("{name} is {}x{}, Gram matrix is {d}x{d}", m.nrows(), m.ncols())));
        }
    }
    let scale = (frobenius_sq(o) * frobenius_sq(p)).sqrt();
    if !(scale > 0.0) {
        return Err(Error::InvalidParameter("transfer error undefined for a zero operator".into()));
    }
    let deviation = g.entries() - CMatrix::identity(d, d);
    let op = o.transpose() * p.map(|z| z.conj());
    Ok(trace_of_product(&deviation, &op).norm() / scale)
}

/// Maximally entangled state `(1/sqrt(d)) sum_k |k>|k>`, index `i * d + j`.
pub fn epr_state(d: usize) -> Result<Vec<Complex64>> {
    if d == 0 {
        return Err(Error::InvalidDimension("EPR dimension must be positive".into()));
    }
    let a = Complex64::new(1.0 / (d as f64).sqrt(), 0.0);
    let mut v = vec![Complex64::new(0.0, 0.0); d * d];
    for k in 0..d {
        v[k * d + k] = a;
    }
    Ok(v)
}

fn apply(m: &CMatrix, v: &[Complex64]) -> Vec<Complex64> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)] * v[j]).sum()).collect()
}

fn distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    compensated_sum(a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr())).sqrt()
}

/// `|| (O ⊗ I)|EPR> - (I ⊗ O^T)|EPR> ||`, evaluated with explicit
/// Kronecker products.
pub fn epr_transfer_residual(d: usize, o: &CMatrix) -> Result<f64> {
    if o.nrows() != d || o.ncols() != d {
        return Err(Error::Pairing(format!("operator is {}x{}, expected {d}x{d}", o.nrows(), o.ncols())));
    }
    let epr = epr_state(d)?;
    let id = CMatrix::identity(d, d);
    let lhs = apply(&o.kronecker(&id), &epr);
    let rhs = apply(&id.kronecker(&o.transpose()), &epr);
    Ok(distance(&lhs, &rhs))
}

/// Transfer residual for the EPR state with a pre-loaded map `R_B`
/// (`d_B x d_A`) acting on the second system:
/// `|| (O ⊗ I)(I ⊗ R_B)|EPR> - (I ⊗ R_B)(I ⊗ O^T)|EPR> ||`.
pub fn generalized_transfer_residual(r_b: &CMatrix, o: &CMatrix) -> Result<f64> {
    let d_a = r_b.ncols();
    let d_b = r_b.nrows();
    if o.nrows() != d_a || o.ncols() != d_a {
        return Err(Error::Pairing(format!("operator is {}x{}, expected {d_a}x{d_a}", o.nrows(), o.ncols())));
    }
    let epr = epr_state(d_a)?;
    let id_a = CMatrix::identity(d_a, d_a);
    let loaded = apply(&id_a.kronecker(r_b), &epr);
    let lhs = apply(&o.kronecker(&CMatrix::identity(d_b, d_b)), &loaded);
    let rhs = apply(&id_a.kronecker(r_b), &apply(&id_a.kronecker(&o.transpose()), &epr));
    Ok(distance(&lhs, &rhs))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseTag {
    /// Random-matrix spectrum with a smooth initial profile.
    ErgodicSmooth,
    /// Generic profile on a random-matrix spectrum, or an ideal
    /// infinite-temperature scrambler.
    #[serde(rename = "generic_or_infiniteT")]
    GenericOrInfiniteT,
    /// Generic profile on a Poisson spectrum.
    PoissonGeneric,
}

impl CaseTag {
    pub fn as_str(self) -> &'static str {
        match self {
            CaseTag::ErgodicSmooth => "ergodic_smooth",
            CaseTag::GenericOrInfiniteT => "generic_or_infiniteT",
            CaseTag::PoissonGeneric => "poisson_generic",
        }
    }

    pub const ALL: [CaseTag; 3] = [CaseTag::ErgodicSmooth, CaseTag::GenericOrInfiniteT, CaseTag::PoissonGeneric];
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CaseTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ergodic_smooth" => Ok(CaseTag::ErgodicSmooth),
            "generic_or_infiniteT" | "generic" => Ok(CaseTag::GenericOrInfiniteT),
            "poisson_generic" => Ok(CaseTag::PoissonGeneric),
            other => Err(Error::Configuration(format!("unknown capacity case `{other}`"))),
        }
    }
}

/// Parameters of the purity criterion and the capacity bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapacityCase {
    pub case_tag: CaseTag,
    pub gamma: f64,
    pub kappa: f64,
    pub epsilon: f64,
    /// 2 for Poisson statistics, 1 otherwise.
    pub varphi: f64,
}

/// `kappa` used for the "typical" criterion when none is given.
pub const TYPICAL_KAPPA: f64 = 1.0;

impl CapacityCase {
    pub fn new(case_tag: CaseTag, epsilon: f64, gamma: f64, kappa: f64) -> Result<Self> {
        let varphi = if case_tag == CaseTag::PoissonGeneric { 2.0 } else { 1.0 };
        let case = Self { case_tag, gamma, kappa, epsilon, varphi };
        case.validate()?;
        Ok(case)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::Configuration(format!("epsilon must lie in (0, 1), got {}", self.epsilon)));
        }
        if !(self.gamma >= 1.0) || !self.gamma.is_finite() {
            return Err(Error::Configuration(format!("gamma must be >= 1, got {}", self.gamma)));
        }
        if !(self.kappa >= 0.0) || !self.kappa.is_finite() {
            return Err(Error::Configuration(format!("kappa must be >= 0, got {}", self.kappa)));
        }
        if self.varphi != 1.0 && self.varphi != 2.0 {
            return Err(Error::Configuration(format!("varphi must be 1 or 2, got {}", self.varphi)));
        }
        Ok(())
    }
}

fn log_factor(d_a: usize, power: f64) -> Result<f64> {
    if power == 0.0 {
        return Ok(1.0);
    }
    if d_a < 2 {
        return Err(Error::UndefinedLogarithm(format!("(ln d_A)^kappa with d_A = {d_a} and kappa > 0")));
    }
    Ok((d_a as f64).ln().powf(power))
}

/// Largest purity compatible with transfer error `epsilon`:
/// `1/d_A + epsilon^2 / (d_A^gamma (ln d_A)^kappa)`.
pub fn purity_threshold(d_a: usize, case: &CapacityCase) -> Result<f64> {
    case.validate()?;
    if d_a == 0 {
        return Err(Error::InvalidDimension("d_A must be positive".into()));
    }
    let d = d_a as f64;
    Ok(1.0 / d + case.epsilon.powi(2) / (d.powf(case.gamma) * log_factor(d_a, case.kappa)?))
}

/// Smallest `d_B` that supports transfer at error `epsilon`.
pub fn min_db_bound(d_a: usize, case: &CapacityCase) -> Result<f64> {
    case.validate()?;
    if d_a < 2 {
        return Err(Error::Configuration(format!("capacity bound needs d_A >= 2, got {d_a}")));
    }
    let d = d_a as f64;
    Ok(match case.case_tag {
        CaseTag::ErgodicSmooth => d.powf((1.0 + case.gamma) / 2.0) * log_factor(d_a, case.kappa / 2.0)? / case.epsilon,
        CaseTag::GenericOrInfiniteT | CaseTag::PoissonGeneric => {
            case.varphi * d.powf(case.gamma) * log_factor(d_a, case.kappa)? / case.epsilon / case.epsilon
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ginibre;
    use crate::seed::rng_from_seed;

    fn ones2() -> GramMatrix {
        GramMatrix::from_matrix(CMatrix::from_element(2, 2, Complex64::new(1.0, 0.0)), 1.0).unwrap()
    }

    #[test]
    fn identity_gram_is_perfect() {
        let g = GramMatrix::from_matrix(CMatrix::identity(5, 5), 1.0).unwrap();
        let d = transfer_diagnostics(&g).unwrap();
        assert!(d.gram_eigenvalues.iter().all(|r| (r - 1.0).abs() < 1e-12));
        assert!(d.worst_case_error < 1e-12 && d.eta2 < 1e-12);
        assert!(d.gaussian_tail_ratio.is_none() || d.eta2 > 0.0);
        let (holds, slack) = bhatia_davis_check(&d);
        assert!(holds && slack.abs() < 1e-12);
        let mut rng = rng_from_seed(1);
        let o = ginibre(5, 5, &mut rng);
        let p = ginibre(5, 5, &mut rng);
        assert!(transfer_error(&g, &o, &p).unwrap() < 1e-15);
    }

    #[test]
    fn all_ones_gram() {
        let d = transfer_diagnostics(&ones2()).unwrap();
        assert!(d.gram_eigenvalues[0].abs() < 1e-12 && (d.gram_eigenvalues[1] - 2.0).abs() < 1e-12);
        assert!((d.worst_case_error - 1.0).abs() < 1e-12);
        assert!((d.eta2 - 1.0).abs() < 1e-12);
        assert!((d.bd_product - 1.0).abs() < 1e-12);
        let (holds, slack) = bhatia_davis_check(&d);
        assert!(holds && slack.abs() < 1e-12);
    }

    #[test]
    fn identity_operator_transfers_exactly() {
        let id = CMatrix::identity(2, 2);
        assert!(transfer_error(&ones2(), &id, &id).unwrap() < 1e-15);
    }

    #[test]
    fn zero_operator_is_rejected() {
        let z = CMatrix::zeros(2, 2);
        let id = CMatrix::identity(2, 2);
        assert!(matches!(transfer_error(&ones2(), &z, &id), Err(Error::InvalidParameter(_))));
        assert!(matches!(transfer_error(&ones2(), &CMatrix::identity(3, 3), &id), Err(Error::Pairing(_))));
    }

    #[test]
    fn epr_identity() {
        let mut rng = rng_from_seed(5);
        for d in [1, 2, 3, 6] {
            let o = ginibre(d, d, &mut rng);
            assert!(epr_transfer_residual(d, &o).unwrap() < 1e-12);
            assert!(epr_transfer_residual(d, &CMatrix::identity(d, d)).unwrap() < 1e-15);
        }
        let norm: f64 = epr_state(4).unwrap().iter().map(|z| z.norm_sqr()).sum();
        assert!((norm - 1.0).abs() < 1e-15);
    }

    #[test]
    fn threshold_values() {
        let c = CapacityCase::new(CaseTag::GenericOrInfiniteT, 0.1, 1.0, 0.0).unwrap();
        assert!((purity_threshold(16, &c).unwrap() - 0.063125).abs() < 1e-15);
        let near_one = CapacityCase::new(CaseTag::GenericOrInfiniteT, 1.0 - 1e-12, 1.0, 0.0).unwrap();
        assert!((purity_threshold(8, &near_one).unwrap() - 0.25).abs() < 1e-12);
        // ln(d_A) = 1 makes kappa irrelevant; check through the formula directly
        let k0 = CapacityCase::new(CaseTag::GenericOrInfiniteT, 0.3, 1.0, 0.0).unwrap();
        let k1 = CapacityCase::new(CaseTag::GenericOrInfiniteT, 0.3, 1.0, 1.0).unwrap();
        assert_eq!(log_factor(3, k0.kappa).unwrap(), 1.0);
        assert!(((3f64).ln().powf(k1.kappa) - log_factor(3, k1.kappa).unwrap()).abs() < 1e-15);
        assert!(matches!(purity_threshold(1, &k1), Err(Error::UndefinedLogarithm(_))));
        assert!((purity_threshold(1, &k0).unwrap() - 1.09).abs() < 1e-15);
    }

    #[test]
    fn bound_values() {
        let smooth = CapacityCase::new(CaseTag::ErgodicSmooth, 0.1, 1.0, 0.0).unwrap();
        let generic = CapacityCase::new(CaseTag::GenericOrInfiniteT, 0.1, 1.0, 0.0).unwrap();
        let poisson = CapacityCase::new(CaseTag::PoissonGeneric, 0.1, 1.0, 0.0).unwrap();
        assert!((min_db_bound(16, &smooth).unwrap() - 160.0).abs() < 1e-9);
        assert!((min_db_bound(16, &generic).unwrap() - 1600.0).abs() < 1e-9);
        assert_eq!(min_db_bound(16, &poisson).unwrap() / min_db_bound(16, &generic).unwrap(), 2.0);
        let sufficient = CapacityCase::new(CaseTag::ErgodicSmooth, 0.1, 2.0, 0.0).unwrap();
        assert!((min_db_bound(16, &sufficient).unwrap() - 640.0).abs() < 1e-9);
        assert!(CapacityCase::new(CaseTag::ErgodicSmooth, 1.0, 1.0, 0.0).is_err());
        assert!(CapacityCase::new(CaseTag::ErgodicSmooth, 0.5, 0.5, 0.0).is_err());
        assert!(min_db_bound(1, &smooth).is_err());
    }
}
