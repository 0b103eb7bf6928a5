//! Born-sampled brickwork trajectories: each layer is a sweep of bond gates
//! followed by a sweep of site gates.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::entropy::{block_entropy, entropy_profile, translation_averaged_profile, LogBase};
use super::state::{gate_coupling, Boundary, GateKind, GateSpec, MajoranaState};
use crate::error::{Error, Result};
use crate::protocol::{Coupling, FoldRecord, ProtocolPoint};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryConfig {
    pub sites: usize,
    /// Number of layers; the square network uses `depth = sites`.
    pub depth: usize,
    pub boundary: Boundary,
    /// Record `S(L/2)` after every layer.
    pub record_history: bool,
    /// Average the final profile over cut origins spaced by this stride
    /// (periodic chains only); `None` cuts at the left end.
    #[serde(default)]
    pub profile_stride: Option<usize>,
}

impl TrajectoryConfig {
    pub fn square(sites: usize) -> Self {
        Self {
            sites,
            depth: sites,
            boundary: Boundary::Open,
            record_history: true,
            profile_stride: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub seed: u64,
    pub sites: usize,
    pub depth: usize,
    pub boundary: Boundary,
    /// Reflections applied to the basis before the couplings were evaluated;
    /// outcomes are reported in the folded frame.
    pub fold: FoldRecord,
    /// Per layer: bond outcomes followed by site outcomes.
    pub outcomes: Vec<Vec<i8>>,
    /// `S(l)` in bits for `l = 1..L−1` at the final time.
    pub entropy_profile: Vec<f64>,
    /// `S(L/2)` in bits after each layer (empty unless requested).
    pub entropy_history: Vec<f64>,
    pub log_weight: f64,
    pub log_prob: f64,
}

/// Projective couplings of the two gate families at one protocol point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CircuitCouplings {
    pub j: Coupling,
    pub phi: f64,
    pub j_d: Coupling,
    pub phi_d: f64,
}

impl CircuitCouplings {
    pub fn from_point(point: &ProtocolPoint) -> Result<Self> {
        if !point.is_projective() {
            return Err(Error::InvalidInput(
                "the Gaussian engine needs a projective point (t = π/4)".into(),
            ));
        }
        Ok(Self {
            j: point.j,
            phi: point.phi_folded,
            j_d: point.j_d,
            phi_d: point.phi_d,
        })
    }

    /// Gate heralding outcome `s` of the given kind at site/bond `position`.
    pub fn gate(&self, kind: GateKind, position: usize, s: i8) -> GateSpec {
        let kappa = match kind {
            GateKind::Bond => gate_coupling(self.j, self.phi, s),
            GateKind::Site => gate_coupling(self.j_d, self.phi_d, s),
        };
        GateSpec {
            kind,
            position,
            outcome: s,
            kappa,
        }
    }
}

/// Gate slots of one layer in application order.
pub fn layer_slots(sites: usize, boundary: Boundary) -> Vec<(GateKind, usize)> {
    let bonds = match boundary {
        Boundary::Open => sites - 1,
        Boundary::Periodic => sites,
    };
    (0..bonds)
        .map(|j| (GateKind::Bond, j))
        .chain((0..sites).map(|j| (GateKind::Site, j)))
        .collect()
}

/// Samples one Born trajectory from the seed's own ChaCha8 stream.
pub fn run_trajectory(
    point: &ProtocolPoint,
    config: &TrajectoryConfig,
    seed: u64,
) -> Result<TrajectoryRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (state, mut record) = sample_trajectory(point, config, &mut rng)?;
    record.seed = seed;
    record.entropy_profile = match config.profile_stride {
        None => entropy_profile(&state, LogBase::Bits),
        Some(stride) => translation_averaged_profile(&state, stride, LogBase::Bits)?,
    };
    Ok(record)
}

/// Samples a trajectory, returning the final state and a record without the
/// final entropy profile.
pub fn sample_trajectory<R: Rng + ?Sized>(
    point: &ProtocolPoint,
    config: &TrajectoryConfig,
    rng: &mut R,
) -> Result<(MajoranaState, TrajectoryRecord)> {
    let couplings = CircuitCouplings::from_point(point)?;
    let mut state = MajoranaState::init_chain(config.sites, config.boundary)?;
    let slots = layer_slots(config.sites, config.boundary);
    let mut outcomes = Vec::with_capacity(config.depth);
    let mut history = Vec::new();
    for _ in 0..config.depth {
        let mut layer = Vec::with_capacity(slots.len());
        for &(kind, pos) in &slots {
            let plus = couplings.gate(kind, pos, 1);
            let (a, b) = plus.pair(config.sites);
            let p_plus = 0.5 * (1.0 + plus.kappa.bias() * state.get(a, b).clamp(-1.0, 1.0));
            let s: i8 = if rng.random::<f64>() < p_plus { 1 } else { -1 };
            let gate = if s == 1 { plus } else { couplings.gate(kind, pos, -1) };
            state.apply_gate(&gate)?;
            layer.push(s);
        }
        outcomes.push(layer);
        if config.record_history {
            let g = state.covariance();
            history.push(block_entropy(&g, config.sites / 2) * std::f64::consts::LOG2_E);
        }
    }
    let record = TrajectoryRecord {
        seed: 0,
        sites: config.sites,
        depth: config.depth,
        boundary: config.boundary,
        fold: point.fold,
        outcomes,
        entropy_profile: Vec::new(),
        entropy_history: history,
        log_weight: state.log_weight(),
        log_prob: state.log_prob(),
    };
    Ok((state, record))
}

/// Re-applies a recorded outcome string, returning the final state and the
/// per-gate Born probabilities.
pub fn replay(
    point: &ProtocolPoint,
    sites: usize,
    boundary: Boundary,
    outcomes: &[Vec<i8>],
) -> Result<(MajoranaState, Vec<f64>)> {
    let couplings = CircuitCouplings::from_point(point)?;
    let mut state = MajoranaState::init_chain(sites, boundary)?;
    let slots = layer_slots(sites, boundary);
    let mut probs = Vec::new();
    for layer in outcomes {
        if layer.len() != slots.len() {
            return Err(Error::InvalidInput(format!(
                "layer has {} outcomes, expected {}",
                layer.len(),
                slots.len()
            )));
        }
        for (&(kind, pos), &s) in slots.iter().zip(layer) {
            probs.push(state.apply_gate(&couplings.gate(kind, pos, s))?);
        }
    }
    Ok((state, probs))
}
