//! Protocol coordinates: measurement basis `(θ, φ)`, measurement strength `t`,
//! and the coupling constants derived from them.
//!
//! Infinite couplings (projective limits) are carried by [`Coupling::Infinite`]
//! rather than by large floats, so every consumer has to handle the projective
//! branch explicitly.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};

use serde::{Deserialize, Serialize};

use crate::duality::{kw_explicit, DualCouplings};
use crate::error::Error;
use crate::error::{domain, Result};

const ANGLE_SLACK: f64 = 1e-12;

/// A real coupling constant that may sit at its projective (infinite) limit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Coupling {
    Finite(f64),
    Infinite,
}

impl Coupling {
    pub fn is_infinite(self) -> bool {
        matches!(self, Coupling::Infinite)
    }

    /// Returns the finite value, or `None` at the projective limit.
    pub fn finite(self) -> Option<f64> {
        match self {
            Coupling::Finite(v) => Some(v),
            Coupling::Infinite => None,
        }
    }

    /// `tanh` of the coupling; exactly 1 at the projective limit.
    pub fn tanh(self) -> f64 {
        match self {
            Coupling::Finite(v) => v.tanh(),
            Coupling::Infinite => 1.0,
        }
    }

    /// Value as an `f64`, mapping the sentinel to `f64::INFINITY` for display.
    pub fn to_f64(self) -> f64 {
        match self {
            Coupling::Finite(v) => v,
            Coupling::Infinite => f64::INFINITY,
        }
    }
}

/// Which reflections were applied to bring a basis into the first octant.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldRecord {
    /// `θ → π − θ` (Z → −Z, equivalent to relabelling every outcome).
    pub theta_reflected: bool,
    /// `φ → 2π − φ` (complex conjugation of the circuit).
    pub phi_negated: bool,
    /// `φ → π − φ` (X → −X).
    pub phi_reflected: bool,
}

/// Measurement axis `σ^{θ,φ} = sinθ cosφ X + sinθ sinφ Y + cosθ Z`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementBasis {
    theta: f64,
    phi: f64,
}

impl MeasurementBasis {
    /// Builds a basis; `φ` is normalized into `[0, 2π)`.
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(theta.is_finite() && phi.is_finite()) {
            return Err(domain("theta/phi", f64::NAN, "finite angles"));
        }
        if !(-ANGLE_SLACK..=PI + ANGLE_SLACK).contains(&theta) {
            return Err(domain("theta", theta, "[0, π]"));
        }
        let theta = theta.clamp(0.0, PI);
        let mut phi = phi.rem_euclid(TAU);
        if phi >= TAU {
            phi = 0.0;
        }
        Ok(Self { theta, phi })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn unit_vector(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }

    /// Reflects the basis into `θ ∈ [0, π/2]`, `φ ∈ [0, π/2]`.
    pub fn fold(&self) -> (MeasurementBasis, FoldRecord) {
        let mut rec = FoldRecord::default();
        let mut theta = self.theta;
        let mut phi = self.phi;
        if theta > FRAC_PI_2 {
            theta = PI - theta;
            rec.theta_reflected = true;
        }
        if phi > PI {
            phi = TAU - phi;
            rec.phi_negated = true;
        }
        if phi > FRAC_PI_2 {
            phi = PI - phi;
            rec.phi_reflected = true;
        }
        (Self { theta, phi }, rec)
    }

    /// Inverse of [`fold`](Self::fold).
    pub fn unfold(&self, rec: FoldRecord) -> MeasurementBasis {
        let mut theta = self.theta;
        let mut phi = self.phi;
        if rec.phi_reflected {
            phi = PI - phi;
        }
        if rec.phi_negated {
            phi = TAU - phi;
        }
        if rec.theta_reflected {
            theta = PI - theta;
        }
        Self {
            theta,
            phi: phi.rem_euclid(TAU),
        }
    }
}

/// Compactified measurement strength `t ∈ [0, π/4]` with `tanh β = sin 2t`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementStrength {
    t: f64,
    beta: Coupling,
}

impl MeasurementStrength {
    pub fn from_time(t: f64) -> Result<Self> {
        let beta = strength_from_time(t)?;
        Ok(Self {
            t: t.clamp(0.0, FRAC_PI_4),
            beta,
        })
    }

    pub fn projective() -> Self {
        Self {
            t: FRAC_PI_4,
            beta: Coupling::Infinite,
        }
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn beta(&self) -> Coupling {
        self.beta
    }

    /// `sin 2t = tanh β`, the outcome bias of a single Kraus pair.
    pub fn bias(&self) -> f64 {
        if self.beta.is_infinite() {
            1.0
        } else {
            (2.0 * self.t).sin()
        }
    }

    pub fn is_projective(&self) -> bool {
        self.beta.is_infinite()
    }
}

/// `β = atanh(sin 2t)`; the projective point `t = π/4` maps to the sentinel.
pub fn strength_from_time(t: f64) -> Result<Coupling> {
    if !t.is_finite() || !(-ANGLE_SLACK..=FRAC_PI_4 + ANGLE_SLACK).contains(&t) {
        return Err(domain("t", t, "[0, π/4]"));
    }
    if (t - FRAC_PI_4).abs() <= ANGLE_SLACK {
        return Ok(Coupling::Infinite);
    }
    Ok(Coupling::Finite((2.0 * t.clamp(0.0, FRAC_PI_4)).sin().atanh()))
}

/// Inverse of [`strength_from_time`].
pub fn time_from_strength(beta: Coupling) -> Result<f64> {
    match beta {
        Coupling::Infinite => Ok(FRAC_PI_4),
        Coupling::Finite(b) if b >= 0.0 && b.is_finite() => Ok(0.5 * b.tanh().asin()),
        Coupling::Finite(b) => Err(domain("beta", b, "[0, ∞]")),
    }
}

/// Effective Ising coupling of a projectively measured bond, `J = atanh(cos θ)`.
pub fn ising_coupling(theta: f64) -> Result<Coupling> {
    if !theta.is_finite() || !(-ANGLE_SLACK..=FRAC_PI_2 + ANGLE_SLACK).contains(&theta) {
        return Err(domain("theta", theta, "[0, π/2]"));
    }
    let theta = theta.clamp(0.0, FRAC_PI_2);
    if theta <= ANGLE_SLACK {
        return Ok(Coupling::Infinite);
    }
    Ok(Coupling::Finite((FRAC_PI_2 - theta).sin().atanh().max(0.0)))
}

/// Ashkin–Teller couplings of the weakly measured code.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AtCouplings {
    pub j: Coupling,
    pub k: Coupling,
    /// Set when `θ = 0`, where `K` has no finite limit to speak of.
    pub degenerate: bool,
}

/// Solves `tanh J = sin(2t) cos θ` and `e^{−2K} = sinh(J) tan θ`.
pub fn at_couplings(t: f64, theta: f64) -> Result<AtCouplings> {
    let beta = strength_from_time(t)?;
    if !theta.is_finite() || !(-ANGLE_SLACK..=FRAC_PI_2 + ANGLE_SLACK).contains(&theta) {
        return Err(domain("theta", theta, "(0, π/2]"));
    }
    let theta = theta.clamp(0.0, FRAC_PI_2);
    if theta <= ANGLE_SLACK {
        let j = if beta.is_infinite() {
            Coupling::Infinite
        } else {
            Coupling::Finite((2.0 * t).sin().atanh())
        };
        return Ok(AtCouplings {
            j,
            k: Coupling::Infinite,
            degenerate: true,
        });
    }
    let j = if beta.is_infinite() {
        (FRAC_PI_2 - theta).sin().atanh()
    } else {
        ((2.0 * t).sin() * (FRAC_PI_2 - theta).sin()).atanh()
    };
    // sinh J · tan θ with the cos θ cancelled, so θ = π/2 needs no special case
    let a = if beta.is_infinite() { 1.0 } else { (2.0 * t).sin() };
    let (s, c) = (theta.sin(), (FRAC_PI_2 - theta).sin());
    let x = a * s / (1.0 - a * a * c * c).sqrt();
    let k = if x == 0.0 {
        Coupling::Infinite
    } else {
        Coupling::Finite(-0.5 * x.ln())
    };
    Ok(AtCouplings {
        j: Coupling::Finite(j),
        k,
        degenerate: false,
    })
}

/// One point `(θ, φ, t)` of the phase diagram with its derived couplings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProtocolPoint {
    pub basis: MeasurementBasis,
    pub strength: MeasurementStrength,
    /// Reflections applied before computing couplings.
    pub fold: FoldRecord,
    /// Bond coupling `J` from `tanh J = sin 2t cos θ` (folded angles).
    pub j: Coupling,
    pub k: Coupling,
    /// Folded azimuth entering the complex coupling `J + iφ`.
    pub phi_folded: f64,
    /// Kramers–Wannier dual of the projective bond coupling; infinite at the
    /// X point, where the bond coupling and azimuth both vanish.
    pub j_d: Coupling,
    pub phi_d: f64,
}

impl ProtocolPoint {
    pub fn new(theta: f64, phi: f64, t: f64) -> Result<Self> {
        let basis = MeasurementBasis::new(theta, phi)?;
        let strength = MeasurementStrength::from_time(t)?;
        let (folded, fold) = basis.fold();
        let at = at_couplings(strength.t(), folded.theta())?;
        let j_proj = ising_coupling(folded.theta())?;
        let (j_d, phi_d) = match kw_explicit(j_proj, folded.phi()) {
            Ok(DualCouplings { j_d, phi_d }) => (Coupling::Finite(j_d), phi_d),
            Err(Error::Pole) => (Coupling::Infinite, 0.0),
            Err(e) => return Err(e),
        };
        Ok(Self {
            basis,
            strength,
            fold,
            j: at.j,
            k: at.k,
            phi_folded: folded.phi(),
            j_d,
            phi_d,
        })
    }

    /// Projective point `t = π/4`.
    pub fn projective(theta: f64, phi: f64) -> Result<Self> {
        Self::new(theta, phi, FRAC_PI_4)
    }

    pub fn theta(&self) -> f64 {
        self.basis.theta()
    }

    pub fn phi(&self) -> f64 {
        self.basis.phi()
    }

    pub fn t(&self) -> f64 {
        self.strength.t()
    }

    pub fn is_projective(&self) -> bool {
        self.strength.is_projective()
    }

    pub fn folded_theta(&self) -> f64 {
        self.basis.fold().0.theta()
    }
}

/// Named points of the Bloch sphere used throughout the experiments.
pub mod points {
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    pub const Z: (f64, f64) = (0.0, 0.0);
    pub const X: (f64, f64) = (FRAC_PI_2, 0.0);
    pub const Y: (f64, f64) = (FRAC_PI_2, FRAC_PI_2);
    pub const XZ: (f64, f64) = (FRAC_PI_4, 0.0);

    /// `(θ, φ) = (atan √2, π/4)`.
    pub fn xyz() -> (f64, f64) {
        (2f64.sqrt().atan(), FRAC_PI_4)
    }

    /// Point on the self-dual line `cos φ = cot θ`, parametrized by `φ ∈ [0, π/2]`.
    pub fn self_dual(phi: f64) -> (f64, f64) {
        ((1.0 / phi.cos()).atan(), phi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn strength_limits() {
        assert_eq!(strength_from_time(0.0).unwrap(), Coupling::Finite(0.0));
        assert_eq!(strength_from_time(FRAC_PI_4).unwrap(), Coupling::Infinite);
        let b = strength_from_time(PI / 8.0).unwrap().finite().unwrap();
        // atanh(√2/2) = ln(1 + √2)
        assert!((b - (1.0 + 2f64.sqrt()).ln()).abs() < 1e-12);
        assert!((b - 0.881_373_587_019_543).abs() < 1e-12);
        assert!((time_from_strength(Coupling::Finite(b)).unwrap() - PI / 8.0).abs() < 1e-12);
        assert!(strength_from_time(-0.1).is_err());
        assert!(strength_from_time(1.0).is_err());
    }

    #[test]
    fn ising_coupling_limits() {
        assert_eq!(ising_coupling(FRAC_PI_2).unwrap(), Coupling::Finite(0.0));
        assert_eq!(ising_coupling(0.0).unwrap(), Coupling::Infinite);
        let j = ising_coupling(FRAC_PI_4).unwrap().finite().unwrap();
        assert!((j - 0.881_373_587_019_543).abs() < 1e-12);
        assert!((j.tanh() - FRAC_PI_4.cos()).abs() < 1e-12);
        assert!(ising_coupling(2.0).is_err());
    }

    #[test]
    fn at_coupling_examples() {
        let c = at_couplings(PI / 8.0, FRAC_PI_4).unwrap();
        let j = c.j.finite().unwrap();
        let k = c.k.finite().unwrap();
        assert!((j - 0.5f64.atanh()).abs() < 1e-12);
        assert!((j - 0.549_306_144_334_054_8).abs() < 1e-12);
        assert!((k - 0.274_653_072_167_027_4).abs() < 1e-12);
        // substitute back
        assert!((j.tanh() - (PI / 4.0).sin() * FRAC_PI_4.cos()).abs() < 1e-12);
        assert!(((-2.0 * k).exp() - j.sinh() * FRAC_PI_4.tan()).abs() < 1e-12);

        let edge = at_couplings(PI / 8.0, FRAC_PI_2).unwrap();
        assert!(edge.j.finite().unwrap().abs() < 1e-15);
        let k = edge.k.finite().unwrap();
        assert!((k + 0.5 * (PI / 4.0).sin().ln()).abs() < 1e-12);

        let c0 = at_couplings(0.0, 1.0).unwrap();
        assert_eq!(c0.j, Coupling::Finite(0.0));
        assert_eq!(c0.k, Coupling::Infinite);

        let deg = at_couplings(FRAC_PI_4, 0.0).unwrap();
        assert!(deg.degenerate);
        assert_eq!(deg.j, Coupling::Infinite);
        assert_eq!(deg.k, Coupling::Infinite);
    }

    #[test]
    fn projective_at_matches_ising() {
        for i in 1..50 {
            let theta = FRAC_PI_2 * i as f64 / 50.0;
            let a = at_couplings(FRAC_PI_4, theta).unwrap().j.finite().unwrap();
            let b = ising_coupling(theta).unwrap().finite().unwrap();
            assert!((a - b).abs() < 1e-12, "θ={theta}");
        }
    }

    #[test]
    fn unit_vector_norm_and_fold_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let b = MeasurementBasis::new(rng.random::<f64>() * PI, rng.random::<f64>() * TAU)
                .unwrap();
            let v = b.unit_vector();
            let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            assert!((n - 1.0).abs() < 1e-12);
            let (f, rec) = b.fold();
            assert!(f.theta() <= FRAC_PI_2 && f.phi() <= FRAC_PI_2);
            let u = f.unfold(rec);
            assert!((u.theta() - b.theta()).abs() < 1e-12);
            assert!((u.phi() - b.phi()).abs() < 1e-12);
        }
    }

    #[test]
    fn phi_is_normalized() {
        let b = MeasurementBasis::new(0.3, -FRAC_PI_2).unwrap();
        assert!((b.phi() - 1.5 * PI).abs() < 1e-12);
        assert!(MeasurementBasis::new(4.0, 0.0).is_err());
    }

    #[test]
    fn cached_couplings_reproducible() {
        let p = ProtocolPoint::new(1.1, 0.4, 0.5).unwrap();
        let at = at_couplings(0.5, 1.1).unwrap();
        assert_eq!(p.j, at.j);
        assert_eq!(p.k, at.k);
        let d = kw_explicit(ising_coupling(1.1).unwrap(), 0.4).unwrap();
        assert!((p.j_d.finite().unwrap() - d.j_d).abs() < 1e-12);
        assert!((p.phi_d - d.phi_d).abs() < 1e-12);
        let x = ProtocolPoint::projective(FRAC_PI_2, 0.0).unwrap();
        assert_eq!(x.j_d, Coupling::Infinite);
        let z = ProtocolPoint::projective(0.0, 0.3).unwrap();
        assert_eq!(z.j, Coupling::Infinite);
        assert_eq!(z.j_d, Coupling::Finite(0.0));
    }
}
