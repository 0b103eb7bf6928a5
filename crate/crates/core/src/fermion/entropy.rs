//! Entanglement entropy of a contiguous block of sites from the restricted covariance.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::state::{Boundary, MajoranaState};
use crate::error::{Error, Result};

/// Purity error above which entropies are still returned but logged.
const IMPURE_WARN: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum LogBase {
    #[default]
    Bits,
    Nats,
}

impl LogBase {
    pub fn unit(&self) -> &'static str {
        match self {
            LogBase::Bits => "bits",
            LogBase::Nats => "nats",
        }
    }

    fn scale(&self) -> f64 {
        match self {
            LogBase::Bits => std::f64::consts::LOG2_E,
            LogBase::Nats => 1.0,
        }
    }
}

/// Binary entropy in nats, `h(p) = −p ln p − (1−p) ln(1−p)`.
pub fn binary_entropy_nats(p: f64) -> f64 {
    let f = |x: f64| if x <= 0.0 { 0.0 } else { -x * x.ln() };
    f(p) + f(1.0 - p)
}

/// Entropy of the leftmost `l` sites.
pub fn entanglement_entropy(state: &MajoranaState, l: usize, base: LogBase) -> Result<f64> {
    let sites = state.sites();
    if l == 0 || l >= sites {
        return Err(Error::InvalidInput(format!("cut {l} outside 1..{sites}")));
    }
    let g = state.covariance();
    warn_if_impure(state);
    Ok(block_entropy(&g, l) * base.scale())
}

/// `S(l)` for `l = 1..L−1`.
pub fn entropy_profile(state: &MajoranaState, base: LogBase) -> Vec<f64> {
    let g = state.covariance();
    warn_if_impure(state);
    (1..state.sites())
        .map(|l| segment_entropy(&g, 0, l) * base.scale())
        .collect()
}

/// `S(l)` averaged over the cut origins `0, stride, 2·stride, …` of a
/// periodic chain. The Born ensemble of a periodic circuit is translation
/// invariant, so this estimates the same profile as [`entropy_profile`].
pub fn translation_averaged_profile(
    state: &MajoranaState,
    stride: usize,
    base: LogBase,
) -> Result<Vec<f64>> {
    let sites = state.sites();
    if state.boundary() != Boundary::Periodic {
        return Err(Error::InvalidInput(
            "translation averaging needs a periodic chain".into(),
        ));
    }
    if stride == 0 || stride > sites {
        return Err(Error::InvalidInput(format!("stride {stride} outside 1..={sites}")));
    }
    let g = state.covariance();
    warn_if_impure(state);
    let origins: Vec<usize> = (0..sites).step_by(stride).collect();
    let scale = base.scale() / origins.len() as f64;
    Ok((1..sites)
        .map(|l| origins.iter().map(|&x| segment_entropy(&g, x, l)).sum::<f64>() * scale)
        .collect())
}

/// Entropy in nats of the `l` sites starting at `start`, wrapping around the
/// chain. Uses the shorter of the segment and its complement.
pub fn segment_entropy(g: &DMatrix<f64>, start: usize, l: usize) -> f64 {
    let sites = g.nrows() / 2;
    let (start, l) = if 2 * l > sites {
        ((start + l) % sites, sites - l)
    } else {
        (start, l)
    };
    let idx: Vec<usize> = (0..2 * l).map(|k| (2 * start + k) % (2 * sites)).collect();
    let a = DMatrix::from_fn(2 * l, 2 * l, |r, c| g[(idx[r], idx[c])]);
    restricted_entropy(&a)
}

fn warn_if_impure(state: &MajoranaState) {
    if log::log_enabled!(log::Level::Warn) {
        let err = state.purity_error();
        if err > IMPURE_WARN {
            log::warn!("entropy requested on a non-pure state (purity error {err:e})");
        }
    }
}

/// Entropy in nats of the first `l` sites of the full covariance `g`.
pub fn block_entropy(g: &DMatrix<f64>, l: usize) -> f64 {
    restricted_entropy(&g.view((0, 0), (2 * l, 2 * l)).clone_owned())
}

fn restricted_entropy(a: &DMatrix<f64>) -> f64 {
    // A Aᵀ has eigenvalues ν_k², each twice
    let aat = a * a.transpose();
    let eig = aat.symmetric_eigenvalues();
    0.5 * eig
        .iter()
        .map(|&lam| {
            let nu = lam.clamp(0.0, 1.0).sqrt();
            binary_entropy_nats(0.5 * (1.0 + nu))
        })
        .sum::<f64>()
}
