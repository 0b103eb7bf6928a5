//! Complex Kramers–Wannier map on half-couplings `x = (J + iφ)/2`.
//!
//! `kw(x) = −½ Log tanh x` with the principal logarithm. It is an involution
//! exactly on the strip `Im x ∈ [−π/2, π/2)`; outside it the result is only
//! defined modulo `iπ`.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::protocol::{Coupling, MeasurementBasis};

/// Default tolerance for point queries of self-duality.
pub const SELF_DUAL_TOL: f64 = 1e-9;

/// Half-coupling `x = (J + iφ)/2`, or the projective limit `J = ∞`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ComplexCoupling {
    Finite(Complex64),
    Projective,
}

impl ComplexCoupling {
    pub fn from_couplings(j: Coupling, phi: f64) -> Self {
        match j {
            Coupling::Finite(j) => ComplexCoupling::Finite(Complex64::new(j, phi) * 0.5),
            Coupling::Infinite => ComplexCoupling::Projective,
        }
    }

    /// Applies the duality; the projective limit maps to `x = 0` and back.
    pub fn dual(self) -> Result<ComplexCoupling> {
        match self {
            ComplexCoupling::Projective => Ok(ComplexCoupling::Finite(Complex64::new(0.0, 0.0))),
            ComplexCoupling::Finite(x) if x == Complex64::new(0.0, 0.0) => {
                Ok(ComplexCoupling::Projective)
            }
            ComplexCoupling::Finite(x) => kw(x).map(ComplexCoupling::Finite),
        }
    }
}

/// `−½ Log tanh x` on the principal branch.
pub fn kw(x: Complex64) -> Result<Complex64> {
    if !(x.re.is_finite() && x.im.is_finite()) {
        return Err(domain("x", x.norm(), "finite complex numbers"));
    }
    let t = x.tanh();
    if t.re == 0.0 && t.im == 0.0 {
        return Err(Error::Pole);
    }
    if !(t.re.is_finite() && t.im.is_finite()) {
        return Err(domain("Im x", x.im, "away from tanh poles at iπ/2 + iπℤ"));
    }
    Ok(-0.5 * t.ln())
}

/// Whether `x` lies in the strip where `kw` is an exact involution.
pub fn in_principal_strip(x: Complex64) -> bool {
    (-FRAC_PI_2..FRAC_PI_2).contains(&x.im)
}

/// [`kw`] plus a flag raised when `x` lies outside the principal strip,
/// where `kw(kw(x))` returns `x` only modulo `iπ`.
pub fn kw_flagged(x: Complex64) -> Result<(Complex64, bool)> {
    Ok((kw(x)?, !in_principal_strip(x)))
}

/// Dual pair `(J_d, φ_d)`; `J_d` may be negative.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualCouplings {
    pub j_d: f64,
    pub phi_d: f64,
}

/// Closed form of `2·kw((J + iφ)/2)` split into real and imaginary parts.
pub fn kw_explicit(j: Coupling, phi: f64) -> Result<DualCouplings> {
    if !phi.is_finite() {
        return Err(domain("phi", phi, "(−π, π]"));
    }
    let j = match j {
        Coupling::Infinite => return Ok(DualCouplings { j_d: 0.0, phi_d: 0.0 }),
        Coupling::Finite(j) if j >= 0.0 && j.is_finite() => j,
        Coupling::Finite(j) => return Err(domain("J", j, "[0, ∞]")),
    };
    // bring φ into (−π, π]
    let mut phi = phi.rem_euclid(2.0 * PI);
    if phi > PI {
        phi -= 2.0 * PI;
    }
    let (sp, cp) = phi.sin_cos();
    let sh = j.sinh();
    if sh == 0.0 && sp == 0.0 {
        if cp > 0.0 {
            return Err(Error::Pole);
        }
        return Err(domain("phi", phi, "φ ≠ π when J = 0"));
    }
    let denom = j.cosh() + cp;
    let j_d = -((sh * sh + sp * sp).sqrt() / denom).ln();
    let phi_d = -sp.atan2(sh);
    Ok(DualCouplings { j_d, phi_d })
}

/// Self-duality query result; scans persist `residual`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelfDualCheck {
    pub self_dual: bool,
    pub residual: f64,
}

/// Tests `cos φ = cot θ` after folding the basis into the first octant.
pub fn is_self_dual(theta: f64, phi: f64) -> Result<SelfDualCheck> {
    is_self_dual_tol(theta, phi, SELF_DUAL_TOL)
}

pub fn is_self_dual_tol(theta: f64, phi: f64, tol: f64) -> Result<SelfDualCheck> {
    let (b, _) = MeasurementBasis::new(theta, phi)?.fold();
    let residual = if b.theta() == 0.0 {
        f64::INFINITY
    } else {
        (b.phi().cos() - b.theta().cos() / b.theta().sin()).abs()
    };
    Ok(SelfDualCheck {
        self_dual: residual < tol,
        residual,
    })
}

/// Point on the self-dual line `cos φ = cot θ` for `φ ∈ [0, π/2]`, with the
/// bond coupling `J = atanh(cos θ)` that satisfies `J_d = J`, `φ_d = −φ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SelfDualPoint {
    pub theta: f64,
    pub phi: f64,
    pub j: f64,
}

pub fn self_dual_point(phi: f64) -> Result<SelfDualPoint> {
    if !(0.0..=FRAC_PI_2).contains(&phi) {
        return Err(domain("phi", phi, "[0, π/2]"));
    }
    let c = phi.cos();
    let theta = if c == 0.0 { FRAC_PI_2 } else { (1.0 / c).atan() };
    // sinh J = cot θ = cos φ
    let j = c.asinh();
    Ok(SelfDualPoint { theta, phi, j })
}

/// `x = log √(1 + √2)`, the real fixed point of the map.
pub fn real_fixed_point() -> f64 {
    0.5 * (1.0 + 2f64.sqrt()).ln()
}
