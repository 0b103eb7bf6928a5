//! CSV row schemas shared by the runner and external tools.
//!
//! Every file starts with a block of `# key=value` comment lines (at least
//! `manifest_sha256`) followed by a header row and data rows.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One Born trajectory of the fermion engine: the final half-cut entropy.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub seed: u64,
    #[serde(rename = "L")]
    pub sites: usize,
    pub depth: usize,
    pub theta: f64,
    pub phi: f64,
    pub layer: usize,
    pub cut: usize,
    pub entropy_bits: f64,
    pub log_weight: f64,
}

/// Born-averaged entropy profile of one grid point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    pub point: usize,
    #[serde(rename = "L")]
    pub sites: usize,
    pub theta: f64,
    pub phi: f64,
    pub boundary: String,
    pub cut: usize,
    pub mean_bits: f64,
    pub std_err_bits: f64,
    pub trajectories: usize,
}

/// Arc-fit summary of one averaged profile (coefficients in nats).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArcRow {
    pub point: usize,
    #[serde(rename = "L")]
    pub sites: usize,
    pub theta: f64,
    pub phi: f64,
    pub boundary: String,
    pub chord: String,
    pub v: f64,
    pub c_prime: f64,
    pub c: f64,
    pub a: f64,
    pub residual_rms: f64,
    pub half_cut_bits: f64,
    pub trajectories: usize,
}

/// One measurement record of the statevector engine.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogicalRow {
    pub seed: u64,
    pub d: usize,
    pub theta: f64,
    pub phi: f64,
    pub t: f64,
    #[serde(rename = "P_pp")]
    pub p_pp: f64,
    #[serde(rename = "P_mm")]
    pub p_mm: f64,
    #[serde(rename = "RePpm")]
    pub re_p_pm: f64,
    #[serde(rename = "ImPpm")]
    pub im_p_pm: f64,
    pub kx: f64,
    pub ky: f64,
    pub kz: f64,
    #[serde(rename = "C")]
    pub c: f64,
    #[serde(rename = "I_s")]
    pub i_s: f64,
    #[serde(rename = "logP")]
    pub log_p: f64,
}

/// Signed Bloch vector of one projected-ensemble sample, `(X_L, Y_L, Z_L)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleRow {
    pub point: usize,
    pub sample: usize,
    pub d: usize,
    pub theta: f64,
    pub phi: f64,
    pub bx: f64,
    pub by: f64,
    pub bz: f64,
    pub weight: f64,
}

/// Coherent information of one grid point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoherentRow {
    pub point: usize,
    pub d: usize,
    pub theta: f64,
    pub phi: f64,
    pub t: f64,
    pub plan: String,
    pub i_c: f64,
    pub std_err: f64,
    pub count: usize,
    pub total_probability: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KlRow {
    pub point: usize,
    pub order: u32,
    #[serde(rename = "N")]
    pub patches: usize,
    pub samples: u64,
    #[serde(rename = "D")]
    pub d: f64,
    #[serde(rename = "D_normalized")]
    pub d_normalized: f64,
}

/// Quasi-energy of one band at one momentum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRow {
    #[serde(rename = "J")]
    pub j: f64,
    pub phi: f64,
    #[serde(rename = "Jd")]
    pub j_d: f64,
    pub phid: f64,
    pub k: f64,
    pub band: u8,
    pub eps_re: f64,
    pub eps_im: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeffRow {
    pub theta: f64,
    pub phi_basis: f64,
    pub h: f64,
    pub lambda: f64,
    pub label: String,
    pub rho_0: f64,
    pub rho_0_per_pi: f64,
    pub self_dual_residual: f64,
}

/// Couplings and duality images of one basis direction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualityRow {
    pub theta: f64,
    pub phi: f64,
    pub t: f64,
    #[serde(rename = "J")]
    pub j: f64,
    #[serde(rename = "K")]
    pub k: f64,
    pub phi_folded: f64,
    #[serde(rename = "Jd")]
    pub j_d: f64,
    pub phid: f64,
    pub self_dual_residual: f64,
}

/// Writes a comment block and the rows; returns the number of data rows.
pub fn write_csv<T: Serialize>(
    path: &Path,
    comments: &[(String, String)],
    rows: &[T],
) -> Result<usize> {
    let mut out = BufWriter::new(File::create(path)?);
    for (k, v) in comments {
        writeln!(out, "# {k}={v}")?;
    }
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(rows.len())
}

/// Reads the `# key=value` block at the top of a file.
pub fn read_comments(path: &Path) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for line in BufReader::new(File::open(path)?).lines() {
        let line = line?;
        let Some(body) = line.strip_prefix('#') else {
            break;
        };
        if let Some((k, v)) = body.trim().split_once('=') {
            map.insert(k.trim().to_string(), v.trim().to_string());
        }
    }
    Ok(map)
}

pub fn read_csv<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)?;
    r.deserialize()
        .map(|row| row.map_err(Error::from))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_with_comments() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        let rows = vec![
            KlRow {
                point: 0,
                order: 2,
                patches: 192,
                samples: 10,
                d: 0.5,
                d_normalized: 0.1,
            },
            KlRow {
                point: 1,
                order: 2,
                patches: 192,
                samples: 20,
                d: 1.25,
                d_normalized: 0.2,
            },
        ];
        let comments = vec![("manifest_sha256".to_string(), "abc".to_string())];
        assert_eq!(write_csv(&path, &comments, &rows).unwrap(), 2);
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("# manifest_sha256=abc\npoint,order,N,samples,D,D_normalized\n"));
        assert_eq!(read_csv::<KlRow>(&path).unwrap(), rows);
        assert_eq!(read_comments(&path).unwrap()["manifest_sha256"], "abc");
    }

    #[test]
    fn logical_header_names() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("l.csv");
        let row = LogicalRow {
            seed: 1,
            d: 2,
            theta: 0.0,
            phi: 0.0,
            t: 0.1,
            p_pp: 1.0,
            p_mm: 1.0,
            re_p_pm: 0.0,
            im_p_pm: 0.0,
            kx: 0.0,
            ky: 0.0,
            kz: 0.0,
            c: 0.0,
            i_s: 1.0,
            log_p: -3.0,
        };
        write_csv(&path, &[], &[row]).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("seed,d,theta,phi,t,P_pp,P_mm,RePpm,ImPpm,kx,ky,kz,C,I_s,logP\n"));
    }
}
