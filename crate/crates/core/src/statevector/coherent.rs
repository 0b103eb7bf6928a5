//! Coherent information and projected ensembles of the reference qubit.

use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::layout::CodeLayout;
use super::logical::{LogicalAmplitudes, LogicalRecord};
use super::state::{CodeState, LogicalInit, MeasureMode};
use crate::error::{Error, Result};
use crate::protocol::ProtocolPoint;

type C = Complex64;

/// Largest number of data qubits for exhaustive enumeration.
pub const MAX_EXHAUSTIVE_QUBITS: usize = 13;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "plan")]
pub enum Plan {
    Exhaustive,
    MonteCarlo { samples: usize, seed: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoherentInfo {
    /// Bits.
    pub i_c: f64,
    pub std_err: f64,
    /// Strings enumerated or trajectories sampled.
    pub count: usize,
    /// `Σ_s P(s)` over the enumerated strings (1 for Monte Carlo).
    pub total_probability: f64,
}

/// Logical slices `ψ_±(z) = s0(z) ± s1(z)` after the rotation layer.
fn rotated_logical_slices(point: &ProtocolPoint, layout: Arc<CodeLayout>) -> Result<(Vec<C>, Vec<C>)> {
    let mut st = CodeState::prepare(layout, LogicalInit::EntangledWithReference)?;
    st.rotate_all(point.theta(), point.phi());
    let (s0, s1) = st.reference_slices();
    let plus = s0.iter().zip(s1).map(|(a, b)| a + b).collect();
    let minus = s0.iter().zip(s1).map(|(a, b)| a - b).collect();
    Ok((plus, minus))
}

/// `P_{μν}(s)` for every outcome string, indexed by the mask whose bit `j`
/// is set when `s_j = −1`.
pub fn exhaustive_amplitudes(
    point: &ProtocolPoint,
    layout: Arc<CodeLayout>,
) -> Result<Vec<LogicalAmplitudes>> {
    let n = layout.n_data();
    if n > MAX_EXHAUSTIVE_QUBITS {
        return Err(Error::Capacity(format!(
            "exhaustive enumeration over {n} qubits exceeds {MAX_EXHAUSTIVE_QUBITS}"
        )));
    }
    let (plus, minus) = rotated_logical_slices(point, layout)?;
    let mut fpp: Vec<f64> = plus.iter().map(|a| a.norm_sqr()).collect();
    let mut fmm: Vec<f64> = minus.iter().map(|a| a.norm_sqr()).collect();
    let mut fpm: Vec<C> = plus.iter().zip(&minus).map(|(a, b)| a.conj() * b).collect();
    let a = point.strength.bias();
    // per qubit: [f(s=+), f(s=−)] = ½[[1+a, 1−a], [1−a, 1+a]] [f(z=+), f(z=−)]
    let (hi, lo) = (0.5 * (1.0 + a), 0.5 * (1.0 - a));
    for q in 0..n {
        let bit = 1usize << q;
        for b in 0..fpp.len() {
            if b & bit == 0 {
                let c = b | bit;
                let (x0, x1) = (fpp[b], fpp[c]);
                fpp[b] = hi * x0 + lo * x1;
                fpp[c] = lo * x0 + hi * x1;
                let (x0, x1) = (fmm[b], fmm[c]);
                fmm[b] = hi * x0 + lo * x1;
                fmm[c] = lo * x0 + hi * x1;
                let (x0, x1) = (fpm[b], fpm[c]);
                fpm[b] = x0 * hi + x1 * lo;
                fpm[c] = x0 * lo + x1 * hi;
            }
        }
    }
    Ok(fpp
        .into_iter()
        .zip(fmm)
        .zip(fpm)
        .map(|((p_pp, p_mm), p_pm)| LogicalAmplitudes { p_pp, p_mm, p_pm })
        .collect())
}

fn mask_to_outcomes(mask: usize, n: usize) -> Vec<i8> {
    (0..n).map(|j| if mask >> j & 1 == 1 { -1 } else { 1 }).collect()
}

/// All outcome strings with nonzero probability as records.
pub fn exhaustive_records(point: &ProtocolPoint, layout: Arc<CodeLayout>) -> Result<Vec<LogicalRecord>> {
    let n = layout.n_data();
    exhaustive_amplitudes(point, layout)?
        .iter()
        .enumerate()
        .filter(|(_, p)| p.p_pp + p.p_mm > 0.0)
        .map(|(mask, p)| LogicalRecord::from_amplitudes(mask_to_outcomes(mask, n), p))
        .collect()
}

/// Born average of the conditional reference entropy.
pub fn coherent_information(
    point: &ProtocolPoint,
    layout: Arc<CodeLayout>,
    plan: Plan,
) -> Result<CoherentInfo> {
    match plan {
        Plan::Exhaustive => {
            let amps = exhaustive_amplitudes(point, layout)?;
            let mut i_c = 0.0;
            let mut total = 0.0;
            for p in &amps {
                let w = 0.5 * (p.p_pp + p.p_mm);
                if w <= 1e-300 {
                    continue;
                }
                total += w;
                i_c += w * super::logical::logical_density(p)?.i_s;
            }
            Ok(CoherentInfo {
                i_c,
                std_err: 0.0,
                count: amps.len(),
                total_probability: total,
            })
        }
        Plan::MonteCarlo { samples, seed } => {
            if samples < 2 {
                return Err(Error::InvalidInput("Monte Carlo needs at least 2 samples".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let base = {
                let mut st = CodeState::prepare(layout, LogicalInit::EntangledWithReference)?;
                st.rotate_all(point.theta(), point.phi());
                st
            };
            let mut sum = 0.0;
            let mut sum2 = 0.0;
            for _ in 0..samples {
                let rec = sample_record_from(&base, point, &mut rng)?;
                sum += rec.i_s;
                sum2 += rec.i_s * rec.i_s;
            }
            let n = samples as f64;
            let mean = sum / n;
            let var = ((sum2 - n * mean * mean) / (n - 1.0)).max(0.0);
            Ok(CoherentInfo {
                i_c: mean,
                std_err: (var / n).sqrt(),
                count: samples,
                total_probability: 1.0,
            })
        }
    }
}

/// Born-samples one record by measuring qubits sequentially.
pub fn sample_record<R: Rng + ?Sized>(
    point: &ProtocolPoint,
    layout: Arc<CodeLayout>,
    rng: &mut R,
) -> Result<LogicalRecord> {
    let mut st = CodeState::prepare(layout, LogicalInit::EntangledWithReference)?;
    st.rotate_all(point.theta(), point.phi());
    sample_record_from(&st, point, rng)
}

/// `samples` Born-sampled records drawn from one seeded stream.
pub fn sampled_records(
    point: &ProtocolPoint,
    layout: Arc<CodeLayout>,
    samples: usize,
    seed: u64,
) -> Result<Vec<LogicalRecord>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut base = CodeState::prepare(layout, LogicalInit::EntangledWithReference)?;
    base.rotate_all(point.theta(), point.phi());
    (0..samples).map(|_| sample_record_from(&base, point, &mut rng)).collect()
}

fn sample_record_from<R: Rng + ?Sized>(
    rotated: &CodeState,
    point: &ProtocolPoint,
    rng: &mut R,
) -> Result<LogicalRecord> {
    let mut st = rotated.clone();
    let (outcomes, log_p) = st.weak_measure_all(&point.strength, MeasureMode::Born, rng)?;
    let mut rec = LogicalRecord::from_amplitudes(outcomes, &slice_amplitudes(&st))?;
    rec.weight = log_p.exp();
    Ok(rec)
}

/// Post-selected record: every outcome forced to `+1`; `weight` is `P(+…+)`.
pub fn post_selected_record(point: &ProtocolPoint, layout: Arc<CodeLayout>) -> Result<LogicalRecord> {
    let mut st = CodeState::prepare(layout, LogicalInit::EntangledWithReference)?;
    st.rotate_all(point.theta(), point.phi());
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let (outcomes, log_p) = st.weak_measure_all(&point.strength, MeasureMode::PostSelectPlus, &mut rng)?;
    let mut rec = LogicalRecord::from_amplitudes(outcomes, &slice_amplitudes(&st))?;
    rec.weight = log_p.exp();
    Ok(rec)
}

/// `P_{μν} = ⟨s0 + μ s1 | s0 + ν s1⟩` of a (normalized) state.
pub fn slice_amplitudes(st: &CodeState) -> LogicalAmplitudes {
    let (s0, s1) = st.reference_slices();
    let mut p_pp = 0.0;
    let mut p_mm = 0.0;
    let mut p_pm = C::new(0.0, 0.0);
    for (a, b) in s0.iter().zip(s1) {
        let plus = a + b;
        let minus = a - b;
        p_pp += plus.norm_sqr();
        p_mm += minus.norm_sqr();
        p_pm += plus.conj() * minus;
    }
    LogicalAmplitudes { p_pp, p_mm, p_pm }
}

/// Pure reference states conditioned on projective outcomes, Born-sampled.
pub fn projected_ensemble(
    point: &ProtocolPoint,
    layout: Arc<CodeLayout>,
    n_samples: usize,
    seed: u64,
) -> Result<Vec<LogicalRecord>> {
    if !point.is_projective() {
        return Err(Error::InvalidInput("projected ensembles need t = π/4".into()));
    }
    let n = layout.n_data();
    let (plus, minus) = rotated_logical_slices(point, layout)?;
    let mut cdf = Vec::with_capacity(plus.len());
    let mut acc = 0.0;
    for (a, b) in plus.iter().zip(&minus) {
        acc += 0.5 * (a.norm_sqr() + b.norm_sqr());
        cdf.push(acc);
    }
    let total = acc;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n_samples);
    for _ in 0..n_samples {
        let u = rng.random::<f64>() * total;
        let z = cdf.partition_point(|&c| c <= u).min(cdf.len() - 1);
        let (a, b) = (plus[z], minus[z]);
        let amps = LogicalAmplitudes {
            p_pp: a.norm_sqr(),
            p_mm: b.norm_sqr(),
            p_pm: a.conj() * b,
        };
        let mut rec = LogicalRecord::from_amplitudes(mask_to_outcomes(z, n), &amps)?;
        rec.weight /= total;
        out.push(rec);
    }
    Ok(out)
}
