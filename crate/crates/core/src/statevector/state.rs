//! Dense statevector of the code plus one reference qubit.
//!
//! Bit `j < n` of a basis index is data qubit `j` (`1` means `Z = −1`); bit
//! `n` is the reference qubit.

use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::layout::CodeLayout;
use crate::error::{Error, Result};
use crate::protocol::MeasurementStrength;

type C = Complex64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LogicalInit {
    Plus,
    Minus,
    Zero,
    One,
    /// `(|0_L⟩|0⟩_R + |1_L⟩|1⟩_R)/√2`.
    EntangledWithReference,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureMode {
    Born,
    PostSelectPlus,
}

#[derive(Clone, Debug)]
pub struct CodeState {
    pub(crate) amps: Vec<C>,
    layout: Arc<CodeLayout>,
}

/// `e^{iθY/2} e^{iφZ/2}` as a row-major 2×2 matrix.
pub fn rotation_matrix(theta: f64, phi: f64) -> [[C; 2]; 2] {
    let (s, c) = (0.5 * theta).sin_cos();
    let ep = C::from_polar(1.0, 0.5 * phi);
    let em = ep.conj();
    [[ep * c, em * s], [-ep * s, em * c]]
}

/// Kraus diagonal `(√((1 + s·a)/2), √((1 − s·a)/2))` with bias `a = sin 2t`.
pub fn kraus_diagonal(bias: f64, s: i8) -> [f64; 2] {
    let sa = f64::from(s) * bias;
    [(0.5 * (1.0 + sa)).max(0.0).sqrt(), (0.5 * (1.0 - sa)).max(0.0).sqrt()]
}

impl CodeState {
    /// Encodes a logical state into the code; the reference qubit is `|0⟩`
    /// unless it is entangled with the logical qubit.
    pub fn prepare(layout: Arc<CodeLayout>, init: LogicalInit) -> Result<Self> {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let (a0, a1) = match init {
            LogicalInit::Zero => (C::new(1.0, 0.0), C::new(0.0, 0.0)),
            LogicalInit::One => (C::new(0.0, 0.0), C::new(1.0, 0.0)),
            LogicalInit::Plus => (C::new(r, 0.0), C::new(r, 0.0)),
            LogicalInit::Minus => (C::new(r, 0.0), C::new(-r, 0.0)),
            LogicalInit::EntangledWithReference => {
                let zero = logical_zero(&layout)?;
                let n = layout.n_data();
                let dim = 1usize << n;
                let mut amps = vec![C::new(0.0, 0.0); 2 * dim];
                for b in 0..dim {
                    amps[b] = zero[b] * r;
                    amps[dim + (b ^ layout.logical_x as usize)] = zero[b] * r;
                }
                return Ok(Self { amps, layout });
            }
        };
        Self::prepare_logical(layout, a0, a1)
    }

    /// Encodes `α|0_L⟩ + β|1_L⟩` (normalized on the way in).
    pub fn prepare_logical(layout: Arc<CodeLayout>, alpha: C, beta: C) -> Result<Self> {
        let norm = (alpha.norm_sqr() + beta.norm_sqr()).sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidInput("logical state has zero norm".into()));
        }
        let zero = logical_zero(&layout)?;
        let dim = 1usize << layout.n_data();
        let mut amps = vec![C::new(0.0, 0.0); 2 * dim];
        for b in 0..dim {
            amps[b] += zero[b] * (alpha / norm);
            amps[b ^ layout.logical_x as usize] += zero[b] * (beta / norm);
        }
        Ok(Self { amps, layout })
    }

    /// Wraps raw amplitudes over `n + 1` qubits.
    pub fn from_amplitudes(layout: Arc<CodeLayout>, amps: Vec<C>) -> Result<Self> {
        if amps.len() != 2usize << layout.n_data() {
            return Err(Error::InvalidInput(format!(
                "expected {} amplitudes, got {}",
                2usize << layout.n_data(),
                amps.len()
            )));
        }
        Ok(Self { amps, layout })
    }

    pub fn layout(&self) -> &CodeLayout {
        &self.layout
    }

    pub fn layout_handle(&self) -> Arc<CodeLayout> {
        Arc::clone(&self.layout)
    }

    pub fn amplitudes(&self) -> &[C] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalize(&mut self) {
        let n = self.norm_sqr().sqrt();
        if n > 0.0 {
            for a in &mut self.amps {
                *a /= n;
            }
        }
    }

    /// `⟨P⟩` of the Pauli `X^x Z^z` on data qubits (no phase), for `x ∧ z = 0`.
    pub fn pauli_expectation(&self, x: u32, z: u32) -> C {
        self.amps
            .iter()
            .enumerate()
            .map(|(b, a)| {
                let flipped = self.amps[b ^ x as usize];
                let sign = if (b as u32 & z).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
                flipped.conj() * a * sign
            })
            .sum()
    }

    /// Applies a single-qubit matrix to qubit `q` (data or reference).
    pub fn apply_single(&mut self, q: usize, m: &[[C; 2]; 2]) {
        let bit = 1usize << q;
        for b in 0..self.amps.len() {
            if b & bit == 0 {
                let (a0, a1) = (self.amps[b], self.amps[b | bit]);
                self.amps[b] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[b | bit] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    /// `U(θ, φ) = Π_j e^{iθY_j/2} e^{iφZ_j/2}` on every data qubit.
    pub fn rotate_all(&mut self, theta: f64, phi: f64) {
        let u = rotation_matrix(theta, phi);
        for q in 0..self.layout.n_data() {
            self.apply_single(q, &u);
        }
    }

    /// Born probability of outcome `+` for the weak measurement of qubit `q`.
    pub fn outcome_probability(&self, q: usize, bias: f64) -> f64 {
        let bit = 1usize << q;
        let (mut w0, mut w1) = (0.0, 0.0);
        for (b, a) in self.amps.iter().enumerate() {
            if b & bit == 0 {
                w0 += a.norm_sqr();
            } else {
                w1 += a.norm_sqr();
            }
        }
        let total = w0 + w1;
        0.5 * (1.0 + bias * (w0 - w1) / total)
    }

    /// Applies the Kraus operator for outcome `s` on qubit `q` without renormalizing.
    pub fn apply_kraus(&mut self, q: usize, bias: f64, s: i8) {
        let [k0, k1] = kraus_diagonal(bias, s);
        let bit = 1usize << q;
        for (b, a) in self.amps.iter_mut().enumerate() {
            *a *= if b & bit == 0 { k0 } else { k1 };
        }
    }

    /// Measures every data qubit in row-major order. Returns the outcomes and
    /// `Σ log p(s_j)`; the state is left normalized.
    pub fn weak_measure_all<R: Rng + ?Sized>(
        &mut self,
        strength: &MeasurementStrength,
        mode: MeasureMode,
        rng: &mut R,
    ) -> Result<(Vec<i8>, f64)> {
        let order: Vec<usize> = (0..self.layout.n_data()).collect();
        self.weak_measure_in_order(strength, mode, &order, rng)
    }

    /// [`weak_measure_all`](Self::weak_measure_all) with an explicit qubit order.
    pub fn weak_measure_in_order<R: Rng + ?Sized>(
        &mut self,
        strength: &MeasurementStrength,
        mode: MeasureMode,
        order: &[usize],
        rng: &mut R,
    ) -> Result<(Vec<i8>, f64)> {
        let bias = strength.bias();
        let mut outcomes = vec![0i8; self.layout.n_data()];
        let mut log_weight = 0.0;
        for &q in order {
            let p_plus = self.outcome_probability(q, bias);
            let s: i8 = match mode {
                MeasureMode::Born => {
                    if rng.random::<f64>() < p_plus {
                        1
                    } else {
                        -1
                    }
                }
                MeasureMode::PostSelectPlus => 1,
            };
            let p = if s == 1 { p_plus } else { 1.0 - p_plus };
            if p <= 1e-300 {
                return Err(Error::ImpossibleOutcome { probability: p });
            }
            self.apply_kraus(q, bias, s);
            self.normalize();
            log_weight += p.ln();
            outcomes[q] = s;
        }
        Ok((outcomes, log_weight))
    }

    /// Applies the whole Kraus string `M_s` without renormalizing.
    pub fn apply_kraus_string(&mut self, strength: &MeasurementStrength, outcomes: &[i8]) {
        let bias = strength.bias();
        for (q, &s) in outcomes.iter().enumerate() {
            self.apply_kraus(q, bias, s);
        }
    }

    /// Reference slices `(s0, s1)`: amplitudes with the reference in `|0⟩`, `|1⟩`.
    pub fn reference_slices(&self) -> (&[C], &[C]) {
        self.amps.split_at(1usize << self.layout.n_data())
    }

    /// Entropy of the reference qubit in bits.
    pub fn reference_entropy_bits(&self) -> f64 {
        let (s0, s1) = self.reference_slices();
        let r00: f64 = s0.iter().map(|a| a.norm_sqr()).sum();
        let r11: f64 = s1.iter().map(|a| a.norm_sqr()).sum();
        let r01: C = s0.iter().zip(s1).map(|(a, b)| a * b.conj()).sum();
        let tr = r00 + r11;
        let det = r00 * r11 - r01.norm_sqr();
        let disc = (0.25 * tr * tr - det).max(0.0).sqrt();
        let h = |x: f64| if x <= 1e-300 { 0.0 } else { -x * x.log2() };
        h((0.5 * tr + disc) / tr) + h((0.5 * tr - disc) / tr)
    }
}

/// `|0_L⟩ = Π_stars (1 + X_s)/2 |0…0⟩`, normalized, over data qubits only.
pub fn logical_zero(layout: &CodeLayout) -> Result<Vec<C>> {
    let n = layout.n_data();
    if n > 25 {
        return Err(Error::Capacity(format!("{n} data qubits exceed the dense limit")));
    }
    let dim = 1usize << n;
    let mut v = vec![C::new(0.0, 0.0); dim];
    v[0] = C::new(1.0, 0.0);
    for &m in &layout.x_stars {
        let m = m as usize;
        for b in 0..dim {
            // visit each pair {b, b^m} once, from its smaller member
            let c = b ^ m;
            if b < c {
                let s = (v[b] + v[c]) * 0.5;
                v[b] = s;
                v[c] = s;
            }
        }
    }
    let norm: f64 = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    for a in &mut v {
        *a /= norm;
    }
    Ok(v)
}
