//! Least-squares fit of an entanglement arc
//! `S(l) = v·vol(l) + (c'/6)(ln R)² + (c/6) ln R + a`.

use std::f64::consts::{LN_2, PI};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Condition number beyond which the design matrix counts as rank deficient.
pub const MAX_CONDITION: f64 = 1e10;

/// Chord length convention for `R(l)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Chord {
    /// `R = (L/π) sin(πl/L)`.
    #[default]
    Periodic,
    /// `R = (2L/π) sin(πl/L)`, a segment anchored at a boundary.
    Open,
}

impl Chord {
    pub fn length(&self, l: usize, sites: usize) -> f64 {
        let (l, n) = (l as f64, sites as f64);
        let prefactor = match self {
            Chord::Periodic => n / PI,
            Chord::Open => 2.0 * n / PI,
        };
        prefactor * (PI * l / n).sin()
    }

    pub fn name(&self) -> &'static str {
        match self {
            Chord::Periodic => "periodic",
            Chord::Open => "open",
        }
    }
}

/// Triangular volume-law proxy `min(l, L − l)·ln 2`.
pub fn triangular_volume(l: usize, sites: usize) -> f64 {
    l.min(sites - l) as f64 * LN_2
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArcFit {
    pub v: f64,
    pub c_prime: f64,
    pub c: f64,
    pub a: f64,
    pub residual_rms: f64,
    pub chord: Chord,
    /// Inclusive `l` range used.
    pub window: (usize, usize),
    pub condition: f64,
}

/// Fits `profile[l − 1] = S(l)` (nats) over `l ∈ [L/8, 7L/8]`.
pub fn fit_arc(profile: &[f64], sites: usize, chord: Chord) -> Result<ArcFit> {
    fit_arc_with(profile, sites, chord, triangular_volume)
}

/// [`fit_arc`] with a caller-supplied volume basis function.
pub fn fit_arc_with(
    profile: &[f64],
    sites: usize,
    chord: Chord,
    volume: impl Fn(usize, usize) -> f64,
) -> Result<ArcFit> {
    if profile.len() < 8 || profile.len() + 1 != sites {
        return Err(Error::InvalidInput(format!(
            "profile of length {} does not describe cuts 1..{sites} (need ≥ 8)",
            profile.len()
        )));
    }
    let lo = sites.div_ceil(8).max(1);
    let hi = (7 * sites / 8).min(sites - 1);
    let ls: Vec<usize> = (lo..=hi).collect();
    let n = ls.len();
    let design = DMatrix::from_fn(n, 4, |i, k| {
        let l = ls[i];
        let lr = chord.length(l, sites).ln();
        match k {
            0 => volume(l, sites),
            1 => lr * lr / 6.0,
            2 => lr / 6.0,
            _ => 1.0,
        }
    });
    let y = DVector::from_iterator(n, ls.iter().map(|&l| profile[l - 1]));
    if n < 4 {
        return Err(Error::RankDeficient {
            condition: f64::INFINITY,
        });
    }
    let svd = design.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !(condition < MAX_CONDITION) {
        return Err(Error::RankDeficient { condition });
    }
    let coef = svd
        .solve(&y, 0.0)
        .map_err(|e| Error::Numerical(e.to_string()))?;
    let resid = &design * &coef - &y;
    Ok(ArcFit {
        v: coef[0],
        c_prime: coef[1],
        c: coef[2],
        a: coef[3],
        residual_rms: (resid.norm_squared() / n as f64).sqrt(),
        chord,
        window: (lo, hi),
        condition,
    })
}
