//! Dense statevector reference for the qubit chain, written independently of
//! the Gaussian engine: Majoranas are explicit Pauli strings and gates are
//! `cosh κ + sinh κ · P` applied to all `2^L` amplitudes.

use num_complex::Complex64;
use surflearn::fermion::{
    entanglement_entropy, layer_slots, Boundary, CircuitCouplings, GateCoupling, LogBase,
    MajoranaState,
};
use surflearn::protocol::ProtocolPoint;

type C = Complex64;

/// `coef · X^x Z^z` (Z applied first).
#[derive(Clone, Copy, Debug)]
pub struct Pauli {
    pub x: u32,
    pub z: u32,
    pub coef: C,
}

impl Pauli {
    pub fn mul(&self, o: &Pauli) -> Pauli {
        // Z^{z1} X^{x2} = (−1)^{|z1 ∧ x2|} X^{x2} Z^{z1}
        let sign = if (self.z & o.x).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
        Pauli {
            x: self.x ^ o.x,
            z: self.z ^ o.z,
            coef: self.coef * o.coef * sign,
        }
    }

    pub fn apply(&self, psi: &[C]) -> Vec<C> {
        let mut out = vec![C::new(0.0, 0.0); psi.len()];
        for (b, amp) in psi.iter().enumerate() {
            let sign = if (self.z & b as u32).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
            out[b ^ self.x as usize] += *amp * self.coef * sign;
        }
        out
    }
}

/// `γ_{2j} = X_{<j} Z_j`, `γ_{2j+1} = X_{<j} Y_j` with `Y = iXZ`.
pub fn majorana(k: usize) -> Pauli {
    let j = k / 2;
    let below = (1u32 << j) - 1;
    if k % 2 == 0 {
        Pauli {
            x: below,
            z: 1 << j,
            coef: C::new(1.0, 0.0),
        }
    } else {
        Pauli {
            x: below | (1 << j),
            z: 1 << j,
            coef: C::new(0.0, 1.0),
        }
    }
}

/// `iγ_aγ_b`.
pub fn pair_operator(a: usize, b: usize) -> Pauli {
    let mut p = majorana(a).mul(&majorana(b));
    p.coef *= C::new(0.0, 1.0);
    p
}

pub fn norm_sqr(psi: &[C]) -> f64 {
    psi.iter().map(|a| a.norm_sqr()).sum()
}

pub fn normalize(psi: &mut [C]) {
    let n = norm_sqr(psi).sqrt();
    for a in psi.iter_mut() {
        *a /= n;
    }
}

pub fn expectation(psi: &[C], p: &Pauli) -> C {
    let q = p.apply(psi);
    psi.iter().zip(&q).map(|(a, b)| a.conj() * b).sum()
}

/// `|+⟩^{⊗L}`.
pub fn all_plus(sites: usize) -> Vec<C> {
    let dim = 1usize << sites;
    vec![C::new(1.0 / (dim as f64).sqrt(), 0.0); dim]
}

/// Unnormalized `exp(κP)ψ`; `None` for κ means the projector `(1 + sign·P)/2`.
pub fn apply_exp(psi: &[C], p: &Pauli, kappa: Option<C>, sign: f64) -> Vec<C> {
    let pp = p.apply(psi);
    let (c0, c1) = match kappa {
        Some(k) => (k.cosh(), k.sinh()),
        None => (C::new(0.5, 0.0), C::new(0.5 * sign, 0.0)),
    };
    psi.iter().zip(&pp).map(|(a, b)| a * c0 + b * c1).collect()
}

/// Covariance `Γ_ab = i⟨γ_aγ_b⟩` (real for a ≠ b).
pub fn covariance(psi: &[C], sites: usize) -> Vec<Vec<f64>> {
    let n = 2 * sites;
    let mut g = vec![vec![0.0; n]; n];
    for a in 0..n {
        for b in 0..n {
            if a != b {
                g[a][b] = expectation(psi, &pair_operator(a, b)).re;
            }
        }
    }
    g
}

/// Von Neumann entropy in bits of the leftmost `l` qubits (bits 0..l).
pub fn entropy_bits(psi: &[C], sites: usize, l: usize) -> f64 {
    let rows = 1usize << l;
    let cols = 1usize << (sites - l);
    let m = nalgebra::DMatrix::<C>::from_fn(rows, cols, |r, c| psi[r | (c << l)]);
    let sv = m.singular_values();
    sv.iter()
        .map(|s| s * s)
        .filter(|p| *p > 1e-300)
        .map(|p| -p * p.log2())
        .sum()
}

/// Worst deviations between the Gaussian engine and the dense reference
/// along one Born trajectory.
#[derive(Clone, Copy, Debug, Default)]
pub struct OracleDiff {
    pub probability: f64,
    pub entropy: f64,
    pub covariance: f64,
    pub gates: usize,
}

fn as_exp(k: GateCoupling) -> (Option<C>, f64) {
    match k {
        GateCoupling::Finite(k) => (Some(k), 1.0),
        GateCoupling::Projective { sign } => (None, sign),
    }
}

/// Samples outcomes with the engine (uniforms from `rng`) and follows the
/// same record with the dense reference.
pub fn compare_trajectory<R: rand::Rng>(
    point: &ProtocolPoint,
    sites: usize,
    depth: usize,
    boundary: Boundary,
    rng: &mut R,
) -> OracleDiff {
    let couplings = CircuitCouplings::from_point(point).unwrap();
    let mut state = MajoranaState::init_chain(sites, boundary).unwrap();
    let mut psi = all_plus(sites);
    let mut diff = OracleDiff::default();
    for _ in 0..depth {
        for (kind, pos) in layer_slots(sites, boundary) {
            let plus = couplings.gate(kind, pos, 1);
            let minus = couplings.gate(kind, pos, -1);
            let (a, b) = plus.pair(sites);
            let op = pair_operator(a, b);
            let (kp, sp) = as_exp(plus.kappa);
            let (km, sm) = as_exp(minus.kappa);
            let np = norm_sqr(&apply_exp(&psi, &op, kp, sp));
            let nm = norm_sqr(&apply_exp(&psi, &op, km, sm));
            let p_ref = np / (np + nm);

            let s: i8 = if rng.random::<f64>() < p_ref { 1 } else { -1 };
            let gate = if s == 1 { plus } else { minus };
            let p_gate = state.apply_gate(&gate).unwrap();
            let p_ref_s = if s == 1 { p_ref } else { 1.0 - p_ref };
            diff.probability = diff.probability.max((p_gate - p_ref_s).abs());
            diff.gates += 1;

            let (k, sg) = as_exp(gate.kappa);
            psi = apply_exp(&psi, &op, k, sg);
            normalize(&mut psi);
        }
        let s_ref = entropy_bits(&psi, sites, sites / 2);
        let s_eng = entanglement_entropy(&state, sites / 2, LogBase::Bits).unwrap();
        diff.entropy = diff.entropy.max((s_ref - s_eng).abs());
    }
    let g_ref = covariance(&psi, sites);
    let g_eng = state.covariance();
    for a in 0..2 * sites {
        for b in 0..2 * sites {
            diff.covariance = diff.covariance.max((g_ref[a][b] - g_eng[(a, b)]).abs());
        }
    }
    diff
}
