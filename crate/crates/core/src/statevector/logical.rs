//! Reference-qubit density matrix conditioned on a measurement record.
//!
//! `μ = ±` label logical-X eigenstates. Vectors are ordered `(X_L, Y_L, Z_L)`:
//! the polarization `κ` uses `|Im P_{+−}|`, `|Re P_{+−}|` while the signed
//! Bloch vector keeps the signs.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Convention string persisted next to every exported vector.
pub const KAPPA_CONVENTION: &str = "components=(X_L,Y_L,Z_L); mu=+/- are X_L eigenstates";

/// Tolerated negative eigenvalue of `ρ_R` before it is reported as non-PSD.
const PSD_TOL: f64 = 1e-8;

/// `P_{μν}(s)` for one outcome string.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogicalAmplitudes {
    pub p_pp: f64,
    pub p_mm: f64,
    pub p_pm: Complex64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogicalDensity {
    /// `ρ_R` in the `μ` basis, row-major.
    pub rho: [[Complex64; 2]; 2],
    pub kappa: [f64; 3],
    pub signed_bloch: [f64; 3],
    pub c: f64,
    /// Conditional reference entropy in bits.
    pub i_s: f64,
}

/// Binary entropy in bits.
pub fn binary_entropy_bits(p: f64) -> f64 {
    let f = |x: f64| if x <= 0.0 { 0.0 } else { -x * x.log2() };
    f(p) + f(1.0 - p)
}

pub fn logical_density(p: &LogicalAmplitudes) -> Result<LogicalDensity> {
    let sum = p.p_pp + p.p_mm;
    if !(p.p_pp >= -PSD_TOL && p.p_mm >= -PSD_TOL) || !(sum > 0.0) {
        return Err(Error::Numerical(format!(
            "diagonal amplitudes ({}, {}) are not a valid weight",
            p.p_pp, p.p_mm
        )));
    }
    let rho = [
        [Complex64::new(p.p_pp / sum, 0.0), p.p_pm / sum],
        [p.p_pm.conj() / sum, Complex64::new(p.p_mm / sum, 0.0)],
    ];
    let signed_bloch = [
        (p.p_pp - p.p_mm) / sum,
        2.0 * p.p_pm.im / sum,
        2.0 * p.p_pm.re / sum,
    ];
    let kappa = [
        signed_bloch[0],
        signed_bloch[1].abs(),
        signed_bloch[2].abs(),
    ];
    let norm = kappa.iter().map(|k| k * k).sum::<f64>().sqrt();
    if norm > 1.0 + PSD_TOL {
        return Err(Error::Numerical(format!(
            "reference density matrix is not positive (|κ| = {norm})"
        )));
    }
    let c = norm.min(1.0);
    Ok(LogicalDensity {
        rho,
        kappa,
        signed_bloch,
        c,
        i_s: binary_entropy_bits(0.5 * (1.0 + c)),
    })
}

/// One sampled or enumerated record.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogicalRecord {
    pub outcomes: Vec<i8>,
    pub p_pp: f64,
    pub p_mm: f64,
    pub p_pm_re: f64,
    pub p_pm_im: f64,
    pub kappa: [f64; 3],
    pub signed_bloch: [f64; 3],
    pub c: f64,
    pub i_s: f64,
    /// Born probability `P(s) = (P_{++} + P_{−−})/2`.
    pub weight: f64,
}

impl LogicalRecord {
    pub fn from_amplitudes(outcomes: Vec<i8>, p: &LogicalAmplitudes) -> Result<Self> {
        let d = logical_density(p)?;
        Ok(Self {
            outcomes,
            p_pp: p.p_pp,
            p_mm: p.p_mm,
            p_pm_re: p.p_pm.re,
            p_pm_im: p.p_pm.im,
            kappa: d.kappa,
            signed_bloch: d.signed_bloch,
            c: d.c,
            i_s: d.i_s,
            weight: 0.5 * (p.p_pp + p.p_mm),
        })
    }
}
