//! Gaussian Majorana state and the gate `exp(κ · iγ_aγ_b)`.
//!
//! Majoranas are indexed from 0: `γ_{2j} = (Π_{l<j} X_l) Z_j`,
//! `γ_{2j+1} = (Π_{l<j} X_l) Y_j`, so that `X_j = iγ_{2j}γ_{2j+1}` and
//! `Z_jZ_{j+1} = iγ_{2j+1}γ_{2j+2}`. The covariance is `Γ_ab = i⟨γ_aγ_b⟩`
//! for `a ≠ b`.
//!
//! Only the strict upper triangle of the stored matrix is kept current; the
//! lower triangle is implied by antisymmetry.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::protocol::Coupling;

/// Largest tolerated excess of `|Γ_ab|` over 1 before the state is rejected.
pub const CORRUPTION_TOL: f64 = 1e-8;
/// Gates between purity checks.
pub const HYGIENE_INTERVAL: usize = 64;
/// Probe residual above which the covariance is re-orthogonalized.
const REORTHO_TRIGGER: f64 = 1e-11;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    #[default]
    Open,
    Periodic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GateKind {
    Bond,
    Site,
}

/// Coupling `κ` of a gate `exp(κP)`; the projective variant is the limit
/// `Re κ → sign · ∞`, i.e. the projector `(1 + sign · P)/2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GateCoupling {
    Finite(Complex64),
    Projective { sign: f64 },
}

impl GateCoupling {
    /// Bias `tanh(2 Re κ)` of the outcome this gate heralds.
    pub fn bias(&self) -> f64 {
        match *self {
            GateCoupling::Finite(k) => (2.0 * k.re).tanh(),
            GateCoupling::Projective { sign } => sign,
        }
    }
}

/// `κ = (c·s + i(ϕ − π(1 − s)/2))/2` for a gate heralding outcome `s`.
pub fn gate_coupling(coupling: Coupling, phase: f64, s: i8) -> GateCoupling {
    let s = f64::from(s);
    match coupling {
        Coupling::Infinite => GateCoupling::Projective { sign: s },
        Coupling::Finite(c) => GateCoupling::Finite(Complex64::new(
            0.5 * c * s,
            0.5 * (phase - std::f64::consts::FRAC_PI_2 * (1.0 - s)),
        )),
    }
}

/// One gate of the brickwork circuit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GateSpec {
    pub kind: GateKind,
    /// Site index `j`; a bond gate couples sites `j` and `j + 1 (mod L)`.
    pub position: usize,
    pub outcome: i8,
    pub kappa: GateCoupling,
}

impl GateSpec {
    /// Majorana pair `(a, b)` with `P = iγ_aγ_b`.
    pub fn pair(&self, sites: usize) -> (usize, usize) {
        match self.kind {
            GateKind::Site => (2 * self.position, 2 * self.position + 1),
            GateKind::Bond => (2 * self.position + 1, (2 * self.position + 2) % (2 * sites)),
        }
    }
}

/// Pure Gaussian state of `L` sites.
#[derive(Clone, Debug)]
pub struct MajoranaState {
    gamma: DMatrix<f64>,
    sites: usize,
    boundary: Boundary,
    log_weight: f64,
    log_prob: f64,
    gates_since_check: usize,
}

impl MajoranaState {
    /// All-X-up product state `iγ_{2j}γ_{2j+1} = +1`.
    pub fn init_chain(sites: usize, boundary: Boundary) -> Result<Self> {
        if sites < 4 || sites % 2 != 0 {
            return Err(Error::ChainLength(sites));
        }
        let n = 2 * sites;
        let mut gamma = DMatrix::zeros(n, n);
        for j in 0..sites {
            gamma[(2 * j, 2 * j + 1)] = 1.0;
        }
        Ok(Self {
            gamma,
            sites,
            boundary,
            log_weight: 0.0,
            log_prob: 0.0,
            gates_since_check: 0,
        })
    }

    /// Builds a state from a full covariance matrix (only the upper triangle is read).
    pub fn from_covariance(gamma: &DMatrix<f64>, boundary: Boundary) -> Result<Self> {
        let n = gamma.nrows();
        if gamma.ncols() != n || n % 2 != 0 {
            return Err(Error::InvalidInput("covariance must be square of even size".into()));
        }
        let sites = n / 2;
        let mut g = gamma.clone();
        for d in 0..n {
            for c in d..n {
                g[(c, d)] = 0.0;
            }
        }
        Ok(Self {
            gamma: g,
            sites,
            boundary,
            log_weight: 0.0,
            log_prob: 0.0,
            gates_since_check: 0,
        })
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    /// `Σ log(‖e^{κP}ψ‖² e^{−2|Re κ|})`: zero for unitary gates and equal to
    /// `log p` for projective ones.
    pub fn log_weight(&self) -> f64 {
        self.log_weight
    }

    /// Sum of log Born probabilities of every outcome applied so far.
    pub fn log_prob(&self) -> f64 {
        self.log_prob
    }

    /// `Γ_ab` for any pair of indices.
    #[inline]
    pub fn get(&self, a: usize, b: usize) -> f64 {
        match a.cmp(&b) {
            std::cmp::Ordering::Less => self.gamma[(a, b)],
            std::cmp::Ordering::Greater => -self.gamma[(b, a)],
            std::cmp::Ordering::Equal => 0.0,
        }
    }

    #[inline]
    fn set(&mut self, a: usize, b: usize, value: f64) {
        match a.cmp(&b) {
            std::cmp::Ordering::Less => self.gamma[(a, b)] = value,
            std::cmp::Ordering::Greater => self.gamma[(b, a)] = -value,
            std::cmp::Ordering::Equal => {}
        }
    }

    /// Full antisymmetric covariance matrix.
    pub fn covariance(&self) -> DMatrix<f64> {
        let mut g = self.gamma.clone();
        let n = g.nrows();
        for d in 0..n {
            for c in 0..d {
                g[(d, c)] = -g[(c, d)];
            }
            g[(d, d)] = 0.0;
        }
        g
    }

    /// `max |ΓΓᵀ − I|`.
    pub fn purity_error(&self) -> f64 {
        let g = self.covariance();
        let p = &g * g.transpose();
        let n = p.nrows();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((p[(i, j)] - target).abs());
            }
        }
        worst
    }

    /// Born probability of outcome `+` for a bond or site measurement with
    /// coupling `J` on the pair `(a, b)`: `(1 + tanh(J) Γ_ab)/2`.
    pub fn outcome_probability(&self, a: usize, b: usize, coupling: Coupling) -> Result<f64> {
        let g = self.checked_entry(a, b)?;
        Ok(0.5 * (1.0 + coupling.tanh() * g))
    }

    fn checked_entry(&self, a: usize, b: usize) -> Result<f64> {
        let n = 2 * self.sites;
        if a >= n || b >= n || a == b {
            return Err(Error::InvalidInput(format!("invalid Majorana pair ({a}, {b})")));
        }
        let g = self.get(a, b);
        if !g.is_finite() || g.abs() > 1.0 + CORRUPTION_TOL {
            return Err(Error::StateCorruption { value: g });
        }
        Ok(g.clamp(-1.0, 1.0))
    }

    /// Applies `exp(κ · iγ_aγ_b)` and renormalizes. Returns `‖e^{κP}ψ‖² / ‖ψ‖²`
    /// scaled by `e^{−2|Re κ|}` (the log of which is added to `log_weight`).
    pub fn apply_pair(&mut self, a: usize, b: usize, kappa: GateCoupling) -> Result<f64> {
        let g = self.checked_entry(a, b)?;
        // iγ_bγ_a = −iγ_aγ_b, so swapping the pair negates κ
        let (a, b, kappa, g) = if a < b {
            (a, b, kappa, g)
        } else {
            let k = match kappa {
                GateCoupling::Finite(k) => GateCoupling::Finite(-k),
                GateCoupling::Projective { sign } => GateCoupling::Projective { sign: -sign },
            };
            (b, a, k, -g)
        };
        let (m, rotation, norm) = match kappa {
            GateCoupling::Finite(k) => {
                let m = (2.0 * k.re).tanh();
                let norm = 0.5 * (1.0 + (-4.0 * k.re.abs()).exp()) * (1.0 + m * g);
                (m, k.im, norm)
            }
            GateCoupling::Projective { sign } => (sign, 0.0, 0.5 * (1.0 + sign * g)),
        };
        if norm <= 0.0 || (matches!(kappa, GateCoupling::Projective { .. }) && norm < 1e-14) {
            return Err(Error::ImpossibleOutcome { probability: norm.max(0.0) });
        }
        if rotation != 0.0 {
            self.rotate(a, b, 2.0 * rotation);
        }
        if m != 0.0 {
            self.weak_measure(a, b, m, g);
        }
        self.log_weight += norm.ln();
        self.gates_since_check += 1;
        if self.gates_since_check >= HYGIENE_INTERVAL {
            self.hygiene();
        }
        Ok(norm)
    }

    /// Applies a circuit gate, accumulating its Born probability into
    /// `log_prob`. Returns that probability.
    pub fn apply_gate(&mut self, gate: &GateSpec) -> Result<f64> {
        let (a, b) = gate.pair(self.sites);
        let g = self.checked_entry(a, b)?;
        let p = 0.5 * (1.0 + gate.kappa.bias() * g);
        self.apply_pair(a, b, gate.kappa)?;
        self.log_prob += p.ln();
        Ok(p)
    }

    /// `Γ → OΓOᵀ` with `O` the rotation by `angle` in the `(a, b)` plane,
    /// the action of `exp(i(angle/2)·iγ_aγ_b)`.
    fn rotate(&mut self, a: usize, b: usize, angle: f64) {
        let (s, c) = angle.sin_cos();
        let n = 2 * self.sites;
        for k in 0..n {
            if k == a || k == b {
                continue;
            }
            let u = self.get(k, a);
            let v = self.get(k, b);
            self.set(k, a, c * u - s * v);
            self.set(k, b, s * u + c * v);
        }
    }

    /// Renormalized action of `exp(xP)` with `m = tanh 2x` on a pure state.
    fn weak_measure(&mut self, a: usize, b: usize, m: f64, g: f64) {
        let n = 2 * self.sites;
        let denom = 1.0 + m * g;
        let f = m / denom;
        let r = ((1.0 - m * m).max(0.0)).sqrt() / denom;
        let u: Vec<f64> = (0..n).map(|k| self.get(k, a)).collect();
        let v: Vec<f64> = (0..n).map(|k| self.get(k, b)).collect();

        // Γ_cd += f (v_c u_d − u_c v_d) on the upper triangle
        let data = self.gamma.as_mut_slice();
        for d in 1..n {
            let (ud, vd) = (u[d], v[d]);
            if ud == 0.0 && vd == 0.0 {
                continue;
            }
            let fu = f * ud;
            let fv = f * vd;
            let col = &mut data[d * n..d * n + d];
            for ((x, &vc), &uc) in col.iter_mut().zip(&v[..d]).zip(&u[..d]) {
                *x += fu * vc - fv * uc;
            }
        }
        for k in 0..n {
            if k == a || k == b {
                continue;
            }
            self.set(k, a, r * u[k]);
            self.set(k, b, r * v[k]);
        }
        self.gamma[(a, b)] = (g + m) / denom;
    }

    /// Purity probe followed, if needed, by re-orthogonalization to the polar factor.
    pub fn hygiene(&mut self) {
        self.gates_since_check = 0;
        if self.probe_residual() > REORTHO_TRIGGER {
            self.reorthogonalize();
        }
    }

    /// `‖ΓΓᵀx − x‖_∞` for a fixed dense probe vector, in `O(n²)`.
    fn probe_residual(&self) -> f64 {
        let g = self.covariance();
        let n = g.nrows();
        let x = nalgebra::DVector::from_fn(n, |i, _| ((i as f64 + 1.0) * 0.618_033_988_749_895).sin());
        let y = &g * (g.transpose() * &x);
        (y - x).amax()
    }

    /// Replaces `Γ` by its orthogonal polar factor via Newton–Schulz iteration,
    /// which keeps antisymmetry; falls back to an SVD when far from unitary.
    pub fn reorthogonalize(&mut self) {
        let mut g = self.covariance();
        let n = g.nrows();
        let eye = DMatrix::<f64>::identity(n, n);
        let mut converged = false;
        for _ in 0..8 {
            let gtg = g.transpose() * &g;
            let err = (&gtg - &eye).amax();
            if err < 1e-14 {
                converged = true;
                break;
            }
            if err > 0.5 {
                break;
            }
            g = &g * (&eye * 3.0 - gtg) * 0.5;
        }
        if !converged && (g.transpose() * &g - &eye).amax() > 1e-12 {
            let svd = g.clone().svd(true, true);
            if let (Some(u), Some(vt)) = (svd.u, svd.v_t) {
                g = u * vt;
            }
        }
        for d in 0..n {
            for c in 0..d {
                self.gamma[(c, d)] = 0.5 * (g[(c, d)] - g[(d, c)]);
            }
        }
    }
}
