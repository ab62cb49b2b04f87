//! CSV and JSON serialization of spectra, profiles, return series, Gram
//! matrices and reports.

use std::io::{Read, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::{GramMatrix, ReturnSeries};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::multicharge::ChargeSet;
use crate::spectra::{Ensemble, Spectrum};
use crate::states::{ProfileTag, StateProfile};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumJson {
    #[serde(rename = "d_B")]
    pub d_b: usize,
    pub ensemble: Ensemble,
    pub energies: Vec<f64>,
    #[serde(default)]
    pub unfolded: bool,
}

impl From<&Spectrum> for SpectrumJson {
    fn from(s: &Spectrum) -> Self {
        Self { d_b: s.dim(), ensemble: s.ensemble(), energies: s.energies().to_vec(), unfolded: s.is_unfolded() }
    }
}

impl SpectrumJson {
    /// Rebuilds the spectrum. The unfolded flag is not trusted: the result
    /// is re-unfolded by the caller if needed.
    pub fn into_spectrum(self) -> Result<Spectrum> {
        if self.energies.len() != self.d_b {
            return Err(Error::MalformedInput(format!("d_B = {} but {} energies", self.d_b, self.energies.len())));
        }
        Spectrum::new(self.energies, self.ensemble)
    }
}

// Floats go through `str::parse`, which round-trips exactly.
fn read_columns<R: Read>(r: R, header: &[&str]) -> Result<Vec<Vec<f64>>> {
    let mut reader = csv::Reader::from_reader(r);
    let found: Vec<String> = reader.headers()?.iter().map(|h| h.trim().to_string()).collect();
    if found != header {
        return Err(Error::MalformedInput(format!("expected header {}, got {}", header.join(","), found.join(","))));
    }
    let mut rows = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record?;
        let row = record
            .iter()
            .map(|f| f.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<f64>, _>>()
            .map_err(|e| Error::MalformedInput(format!("data row {}: {e}", line + 1)))?;
        rows.push(row);
    }
    Ok(rows)
}

pub fn write_spectrum_csv<W: Write>(s: &Spectrum, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["index", "energy"])?;
    for (i, e) in s.energies().iter().enumerate() {
        out.write_record([i.to_string(), e.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

/// Reads `index,energy` rows; the spectrum is tagged `custom`.
pub fn read_spectrum_csv<R: Read>(r: R) -> Result<Spectrum> {
    let rows = read_columns(r, &["index", "energy"])?;
    Spectrum::new(rows.into_iter().map(|row| row[1]).collect(), Ensemble::Custom)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileJson {
    pub profile: ProfileTag,
    /// `[re, im]` pairs.
    pub amplitudes: Vec<Complex64>,
}

impl From<&StateProfile> for ProfileJson {
    fn from(p: &StateProfile) -> Self {
        Self { profile: p.tag(), amplitudes: p.amplitudes().to_vec() }
    }
}

pub fn write_profile_csv<W: Write>(p: &StateProfile, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["index", "re", "im"])?;
    for (i, a) in p.amplitudes().iter().enumerate() {
        out.write_record([i.to_string(), a.re.to_string(), a.im.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

/// Reads `index,re,im` rows and normalizes them, warning on a noticeable
/// norm deviation.
pub fn read_profile_csv<R: Read>(r: R) -> Result<StateProfile> {
    let rows = read_columns(r, &["index", "re", "im"])?;
    StateProfile::from_custom(rows.into_iter().map(|row| Complex64::new(row[1], row[2])).collect())
}

pub fn read_profile_json<R: Read>(r: R) -> Result<StateProfile> {
    let p: ProfileJson = serde_json::from_reader(r)?;
    StateProfile::from_custom(p.amplitudes)
}

pub fn write_series_csv<W: Write>(s: &ReturnSeries, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["t", "re", "im", "p"])?;
    for ((t, a), p) in s.times.iter().zip(&s.amplitudes).zip(&s.probabilities) {
        out.write_record([t.to_string(), a.re.to_string(), a.im.to_string(), p.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

/// Gram matrix on disk: first row and column when Toeplitz, plus the full
/// matrix when expanded or when the matrix is not Toeplitz.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GramJson {
    #[serde(rename = "d_A")]
    pub d_a: usize,
    pub t0: f64,
    pub toeplitz: bool,
    pub first_row: Vec<Complex64>,
    pub first_column: Vec<Complex64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entries: Option<Vec<Vec<Complex64>>>,
}

impl GramJson {
    pub fn from_gram(g: &GramMatrix, expand: bool) -> Self {
        let d = g.d_a();
        let entries = (expand || !g.is_toeplitz())
            .then(|| (0..d).map(|j| (0..d).map(|k| g.entries()[(j, k)]).collect()).collect());
        Self { d_a: d, t0: g.t0(), toeplitz: g.is_toeplitz(), first_row: g.first_row(), first_column: g.first_column(), entries }
    }

    pub fn into_gram(self) -> Result<GramMatrix> {
        let d = self.d_a;
        let m = match self.entries {
            Some(rows) => {
                if rows.len() != d || rows.iter().any(|r| r.len() != d) {
                    return Err(Error::MalformedInput(format!("entries must be {d}x{d}")));
                }
                CMatrix::from_fn(d, d, |j, k| rows[j][k])
            }
            None => {
                if self.first_row.len() != d || self.first_column.len() != d {
                    return Err(Error::MalformedInput(format!("first row and column must have {d} entries")));
                }
                CMatrix::from_fn(d, d, |j, k| if k >= j { self.first_row[k - j] } else { self.first_column[j - k] })
            }
        };
        GramMatrix::from_matrix(m, self.t0)
    }
}

pub fn write_gram_csv<W: Write>(g: &GramMatrix, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["j", "k", "re", "im"])?;
    let d = g.d_a();
    for j in 0..d {
        for k in 0..d {
            let z = g.entries()[(j, k)];
            out.write_record([j.to_string(), k.to_string(), z.re.to_string(), z.im.to_string()])?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn read_charge_set<R: Read>(r: R) -> Result<ChargeSet> {
    let c: ChargeSet = serde_json::from_reader(r)?;
    c.validate()?;
    Ok(c)
}

/// Pretty JSON followed by a newline.
pub fn write_json<T: Serialize, W: Write>(value: &T, mut w: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::krylov_gram;
    use crate::multicharge::multicharge_gram;
    use crate::spectra::sample_poisson_spectrum;
    use crate::states::haar_random_state;

    #[test]
    fn spectrum_round_trips() {
        let s = sample_poisson_spectrum(20, 1.0, 4).unwrap();
        let mut buf = Vec::new();
        write_spectrum_csv(&s, &mut buf).unwrap();
        let back = read_spectrum_csv(&buf[..]).unwrap();
        assert_eq!(back.energies(), s.energies());
        let json = serde_json::to_string(&SpectrumJson::from(&s)).unwrap();
        assert!(json.starts_with("{\"d_B\":20,\"ensemble\":\"poisson\",\"energies\":["));
        let back: SpectrumJson = serde_json::from_str(&json).unwrap();
        assert_eq!(back.into_spectrum().unwrap().energies(), s.energies());
    }

    #[test]
    fn profile_round_trips() {
        let p = haar_random_state(9, 1).unwrap();
        let mut buf = Vec::new();
        write_profile_csv(&p, &mut buf).unwrap();
        let back = read_profile_csv(&buf[..]).unwrap();
        assert!(back.amplitudes().iter().zip(p.amplitudes()).all(|(a, b)| (a - b).norm() < 1e-15));
        let json = serde_json::to_vec(&ProfileJson::from(&p)).unwrap();
        assert_eq!(read_profile_json(&json[..]).unwrap().dim(), 9);
    }

    #[test]
    fn gram_round_trips() {
        let s = sample_poisson_spectrum(30, 1.0, 2).unwrap();
        let p = haar_random_state(30, 3).unwrap();
        let g = krylov_gram(&s, &p, 0.4, 5).unwrap();
        for expand in [false, true] {
            let j = GramJson::from_gram(&g, expand);
            assert_eq!(j.entries.is_some(), expand);
            let text = serde_json::to_string(&j).unwrap();
            let back: GramJson = serde_json::from_str(&text).unwrap();
            let back = back.into_gram().unwrap();
            assert!((back.entries() - g.entries()).iter().all(|z| z.norm() < 1e-15));
        }
        let c = ChargeSet::new(
            (0..3).map(|n| vec![n as f64, (n * n) as f64]).collect(),
            s.energies().iter().map(|&e| vec![e, 0.3 * e]).collect(),
        )
        .unwrap();
        let mg = multicharge_gram(&c, &p, 0.4).unwrap();
        assert!(!mg.is_toeplitz());
        assert!(GramJson::from_gram(&mg, false).entries.is_some());
    }
}
