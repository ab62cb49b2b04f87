//! Coupling through several commuting conserved charges.
//!
//! The charges are given by their joint eigenvalues: `q_A[n][k]` on the
//! small system and `Q_B[mu][k]` on the energy eigenbasis of the large one.
//! The Gram matrix is Hermitian and PSD but no longer Toeplitz.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::GramMatrix;
use crate::entanglement::{eta2, purity_from_gram};
use crate::error::{Error, Result};
use crate::exec::ExecPolicy;
use crate::linalg::CMatrix;
use crate::spectra::Spectrum;
use crate::states::StateProfile;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChargeSet {
    /// `d_A x K` table.
    #[serde(rename = "qA")]
    pub q_a: Vec<Vec<f64>>,
    /// `d_B x K` table.
    #[serde(rename = "QB")]
    pub q_b: Vec<Vec<f64>>,
}

impl ChargeSet {
    pub fn new(q_a: Vec<Vec<f64>>, q_b: Vec<Vec<f64>>) -> Result<Self> {
        let set = Self { q_a, q_b };
        set.validate()?;
        Ok(set)
    }

    /// The single-charge protocol: `q_n = n` against the energies of `s`.
    pub fn single(d_a: usize, s: &Spectrum) -> Result<Self> {
        Self::new((0..d_a).map(|n| vec![n as f64]).collect(), s.energies().iter().map(|&e| vec![e]).collect())
    }

    pub fn d_a(&self) -> usize {
        self.q_a.len()
    }

    pub fn d_b(&self) -> usize {
        self.q_b.len()
    }

    pub fn num_charges(&self) -> usize {
        self.q_a.first().map_or(0, Vec::len)
    }

    pub fn validate(&self) -> Result<()> {
        if self.q_a.is_empty() || self.q_b.is_empty() {
            return Err(Error::Pairing("charge tables must have at least one row".into()));
        }
        let k = self.num_charges();
        if k == 0 {
            return Err(Error::Pairing("at least one charge is required".into()));
        }
        for (name, table) in [("qA", &self.q_a), ("QB", &self.q_b)] {
            if let Some(i) = table.iter().position(|row| row.len() != k) {
                return Err(Error::Pairing(format!("{name} row {i} has {} charges, expected {k}", table[i].len())));
            }
            if table.iter().flatten().any(|x| !x.is_finite()) {
                return Err(Error::MalformedInput(format!("{name} contains a non-finite value")));
            }
        }
        Ok(())
    }
}

/// `G_nm = sum_mu |phi_mu|^2 exp(-i t0 sum_k (q_{m,k} - q_{n,k}) Q_{mu,k})`.
pub fn multicharge_gram(charges: &ChargeSet, phi: &StateProfile, t0: f64) -> Result<GramMatrix> {
    multicharge_gram_with(charges, phi, t0, ExecPolicy::default())
}

pub fn multicharge_gram_with(charges: &ChargeSet, phi: &StateProfile, t0: f64, policy: ExecPolicy) -> Result<GramMatrix> {
    charges.validate()?;
    if phi.dim() != charges.d_b() {
        return Err(Error::Pairing(format!("profile has {} amplitudes, charge table has {} levels", phi.dim(), charges.d_b())));
    }
    if !(t0 > 0.0) || !t0.is_finite() {
        return Err(Error::InvalidParameter(format!("t0 must be positive and finite, got {t0}")));
    }
    let d_a = charges.d_a();
    let w = phi.weights();
    let rows = policy.map_indexed(d_a, |n| {
        (n..d_a)
            .map(|m| {
                let dq: Vec<f64> = charges.q_a[m].iter().zip(&charges.q_a[n]).map(|(a, b)| a - b).collect();
                charges
                    .q_b
                    .iter()
                    .zip(&w)
                    .map(|(qb, &wm)| {
                        let angle: f64 = dq.iter().zip(qb).map(|(a, b)| a * b).sum();
                        wm * Complex64::from_polar(1.0, -t0 * angle)
                    })
                    .sum::<Complex64>()
            })
            .collect::<Vec<_>>()
    });
    let mut g = CMatrix::zeros(d_a, d_a);
    for (n, row) in rows.into_iter().enumerate() {
        for (off, z) in row.into_iter().enumerate() {
            let m = n + off;
            g[(n, m)] = z;
            g[(m, n)] = z.conj();
        }
        g[(n, n)] = Complex64::new(1.0, 0.0);
    }
    GramMatrix::from_matrix(g, t0)
}

/// `(purity, eta_2)` of the multicharge protocol.
pub fn multicharge_purity(charges: &ChargeSet, phi: &StateProfile, t0: f64) -> Result<(f64, f64)> {
    let g = multicharge_gram(charges, phi, t0)?;
    Ok((purity_from_gram(&g), eta2(&g)))
}
