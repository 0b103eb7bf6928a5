//! Momentum-space Floquet operator of the post-selected circuit (all
//! outcomes `+1`), its quasi-energies, the density of steady states and the
//! phase labels of the effective Hamiltonian.
//!
//! Per momentum the operator is the symmetric product
//! `e^{−w_d σ_z/2} e^{w σ_k} e^{−w_d σ_z/2}` with `w = J + iφ`,
//! `w_d = J_d + iφ_d` and `σ_k = σ_z cos k − σ_y sin k`. Every factor has unit
//! determinant, so eigenvalues come in pairs `λ, 1/λ` and quasi-energies in
//! pairs `±ε`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::protocol::{Coupling, ProtocolPoint};

type C = Complex64;
pub type Mat2 = [[C; 2]; 2];

/// Default threshold on `|Im ε|` for counting a mode as steady.
pub const STEADY_TOL: f64 = 1e-8;
/// Distance from the unit circle below which `h + iλ` is exceptional.
pub const CIRCLE_TOL: f64 = 1e-9;
const DEFECTIVE_TOL: f64 = 1e-7;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FloquetPoint {
    pub j: f64,
    pub phi: f64,
    pub j_d: f64,
    pub phi_d: f64,
}

impl FloquetPoint {
    pub fn new(j: f64, phi: f64, j_d: f64, phi_d: f64) -> Self {
        Self { j, phi, j_d, phi_d }
    }

    /// Post-selected couplings of a projective protocol point.
    pub fn from_protocol(p: &ProtocolPoint) -> Result<Self> {
        match (p.j, p.j_d) {
            (Coupling::Finite(j), Coupling::Finite(j_d)) if p.is_projective() => {
                Ok(Self::new(j, p.phi_folded, j_d, p.phi_d))
            }
            _ if !p.is_projective() => Err(Error::InvalidInput(
                "the Floquet operator is defined at projective points".into(),
            )),
            _ => Err(Error::InvalidInput(format!(
                "infinite coupling at θ = {}, φ = {}",
                p.theta(),
                p.phi()
            ))),
        }
    }

    fn w(&self) -> C {
        C::new(self.j, self.phi)
    }

    fn w_d(&self) -> C {
        C::new(self.j_d, self.phi_d)
    }
}

fn mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut m = [[C::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            m[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    m
}

pub fn det(m: &Mat2) -> C {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

/// `e^{a n·σ}` for a unit vector `n = (n_y, n_z)` in the y–z plane.
fn exp_yz(a: C, ny: f64, nz: f64) -> Mat2 {
    let (ch, sh) = (a.cosh(), a.sinh());
    let i = C::new(0.0, 1.0);
    [
        [ch + sh * nz, -i * sh * ny],
        [i * sh * ny, ch - sh * nz],
    ]
}

pub fn floquet_matrix(k: f64, p: &FloquetPoint) -> Mat2 {
    let half = exp_yz(-p.w_d() * 0.5, 0.0, 1.0);
    let bond = exp_yz(p.w(), -k.sin(), k.cos());
    mul(&mul(&half, &bond), &half)
}

pub fn is_unitary(m: &Mat2, tol: f64) -> bool {
    let mut err = 0.0f64;
    for i in 0..2 {
        for j in 0..2 {
            let g = m[0][i].conj() * m[0][j] + m[1][i].conj() * m[1][j];
            let target = if i == j { 1.0 } else { 0.0 };
            err = err.max((g - target).norm());
        }
    }
    err < tol
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumTable {
    pub point: FloquetPoint,
    pub l_k: usize,
    /// Momenta in `(−π, π]`, ascending.
    pub k: Vec<f64>,
    /// Two bands per momentum, ordered by eigenvector continuity in `k`.
    pub eps_re: Vec<[f64; 2]>,
    pub eps_im: Vec<[f64; 2]>,
    /// Non-diagonalizable momenta (exceptional points).
    pub defective: Vec<bool>,
    /// Constant subtracted from `Im ε`; zero because every factor has unit
    /// determinant.
    pub gauge_shift: f64,
}

fn eigen(m: &Mat2) -> ([C; 2], [[C; 2]; 2], bool) {
    let tau = (m[0][0] + m[1][1]) * 0.5;
    // discriminant without the cancellation in τ² − det
    let half_diff = (m[0][0] - m[1][1]) * 0.5;
    let root = (half_diff * half_diff + m[0][1] * m[1][0]).sqrt();
    let lam = [tau + root, tau - root];
    let scale = 1.0 + tau.norm();
    let off = m[0][1].norm() + m[1][0].norm();
    let vec_for = |l: C| -> [C; 2] {
        let a = [m[0][1], l - m[0][0]];
        let b = [l - m[1][1], m[1][0]];
        let na = a[0].norm_sqr() + a[1].norm_sqr();
        let nb = b[0].norm_sqr() + b[1].norm_sqr();
        let v = if na >= nb { a } else { b };
        let n = v[0].norm_sqr() + v[1].norm_sqr();
        if n == 0.0 {
            [C::new(1.0, 0.0), C::new(0.0, 0.0)]
        } else {
            let n = n.sqrt();
            [v[0] / n, v[1] / n]
        }
    };
    let mut vecs = [vec_for(lam[0]), vec_for(lam[1])];
    let degenerate = root.norm() < DEFECTIVE_TOL * scale;
    let defective = degenerate && off > DEFECTIVE_TOL * scale;
    if degenerate && !defective {
        vecs = [
            [C::new(1.0, 0.0), C::new(0.0, 0.0)],
            [C::new(0.0, 0.0), C::new(1.0, 0.0)],
        ];
    }
    (lam, vecs, defective)
}

fn overlap(a: &[C; 2], b: &[C; 2]) -> f64 {
    (a[0].conj() * b[0] + a[1].conj() * b[1]).norm()
}

/// `ε = i Log λ`, with `Re ε` in `(−π, π]`.
pub fn quasi_energy(lambda: C) -> C {
    let l = lambda.ln();
    let mut re = -l.im;
    if re <= -PI {
        re += 2.0 * PI;
    }
    C::new(re, l.re)
}

pub fn momenta(l_k: usize) -> Vec<f64> {
    // ±k computed from the same quotient so the grid is exactly symmetric
    let mut k: Vec<f64> = (0..l_k)
        .map(|j| {
            if 2 * j <= l_k {
                PI * ((2 * j) as f64 / l_k as f64)
            } else {
                -PI * ((2 * (l_k - j)) as f64 / l_k as f64)
            }
        })
        .collect();
    k.sort_by(|a, b| a.total_cmp(b));
    k
}

pub fn quasi_energies(p: &FloquetPoint, l_k: usize) -> Result<SpectrumTable> {
    if l_k < 2 {
        return Err(Error::InvalidInput(format!("momentum resolution {l_k} < 2")));
    }
    let k = momenta(l_k);
    let mut eps_re = Vec::with_capacity(l_k);
    let mut eps_im = Vec::with_capacity(l_k);
    let mut defective = Vec::with_capacity(l_k);
    let mut prev: Option<[[C; 2]; 2]> = None;
    for &kk in &k {
        let (mut lam, mut vecs, def) = eigen(&floquet_matrix(kk, p));
        let swap = match prev {
            Some(pv) => {
                overlap(&pv[0], &vecs[1]) + overlap(&pv[1], &vecs[0])
                    > overlap(&pv[0], &vecs[0]) + overlap(&pv[1], &vecs[1]) + 1e-12
            }
            None => quasi_energy(lam[1]).re > quasi_energy(lam[0]).re,
        };
        if swap {
            lam.swap(0, 1);
            vecs.swap(0, 1);
        }
        if !def {
            prev = Some(vecs);
        }
        let e = lam.map(quasi_energy);
        eps_re.push([e[0].re, e[1].re]);
        eps_im.push([e[0].im, e[1].im]);
        defective.push(def);
    }
    if defective.iter().any(|&d| d) {
        log::debug!("exceptional momenta at {p:?}");
    }
    Ok(SpectrumTable {
        point: *p,
        l_k,
        k,
        eps_re,
        eps_im,
        defective,
        gauge_shift: 0.0,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SteadyStateDensity {
    /// Fraction of momenta whose quasi-energies are real; 1 at the Y point.
    pub fraction: f64,
    /// `(1/π) Σ_k δ(Im ε_k)` with `Σ_k → (L_k/2π)∫dk`: twice the fraction.
    pub per_pi: f64,
    pub count: usize,
}

pub fn steady_state_density(t: &SpectrumTable, tol: f64) -> SteadyStateDensity {
    let count = t
        .eps_im
        .iter()
        .filter(|e| e[0].abs() < tol && e[1].abs() < tol)
        .count();
    let fraction = count as f64 / t.l_k as f64;
    SteadyStateDensity {
        fraction,
        per_pi: 2.0 * fraction,
        count,
    }
}

/// `h + iλ = (J_d + iφ_d)/(J + iφ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HeffPoint {
    pub h: f64,
    pub lambda: f64,
}

impl HeffPoint {
    pub fn from_floquet(p: &FloquetPoint) -> Result<Self> {
        if p.j == 0.0 && p.phi == 0.0 {
            return Err(Error::Pole);
        }
        let g = p.w_d() / p.w();
        Ok(Self { h: g.re, lambda: g.im })
    }

    pub fn modulus(&self) -> f64 {
        self.h.hypot(self.lambda)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HeffPhase {
    InsideCircle,
    OutsideCircle,
    Exceptional,
    AbsolutelyGapped,
}

impl HeffPhase {
    pub fn label(&self) -> &'static str {
        match self {
            HeffPhase::InsideCircle => "inside_circle",
            HeffPhase::OutsideCircle => "outside_circle",
            HeffPhase::Exceptional => "exceptional",
            HeffPhase::AbsolutelyGapped => "absolutely_gapped",
        }
    }
}

/// Smallest `|Re(g − cos k)|` over the zone: the real part of the field
/// component of the Bloch vector `(sin k, g − cos k)` of the effective
/// Hamiltonian. Positive exactly when `|h| > 1`.
pub fn field_gap(h: f64) -> f64 {
    (h.abs() - 1.0).max(0.0)
}

pub fn heff_classify(h: f64, lambda: f64) -> Result<HeffPhase> {
    if !(h.is_finite() && lambda.is_finite()) {
        return Err(Error::InvalidInput(format!("non-finite ({h}, {lambda})")));
    }
    let r = h.hypot(lambda);
    Ok(if (r - 1.0).abs() < CIRCLE_TOL {
        HeffPhase::Exceptional
    } else if field_gap(h) > 0.0 {
        HeffPhase::AbsolutelyGapped
    } else if r < 1.0 {
        HeffPhase::InsideCircle
    } else {
        HeffPhase::OutsideCircle
    })
}
