//! Metropolis-Hastings velocity sampling against the local Gibbs energy.
//!
//! Random numbers come from [`RngStream`], a ChaCha8 generator whose 256-bit
//! key is the little-endian concatenation of `(global_seed, robot_id, tick,
//! domain)`. Each robot/tick pair therefore owns an independent stream and
//! results do not depend on how work is spread across threads.
//!
//! Two proposal schemes are available. `Anchored` draws every candidate
//! around the robot's velocity at the start of the tick, which gives the
//! motion inertia: the chain then targets `exp(-H/T)` times the Gaussian
//! proposal density. `RandomWalk` centers each draw on the current chain
//! state and targets `exp(-H/T)` itself.
//!
//! Draw order per iteration is fixed: proposal x, proposal y, then the
//! acceptance uniform (drawn even when the move is downhill).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Vec2;
use crate::potential::{EnergyParams, LocalEnergy, Mode};
use crate::scalar::Real;
use crate::sensing::Perception;

/// Where each proposal is centered.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProposalKind {
    /// Around the chain's starting velocity.
    #[default]
    Anchored,
    /// Around the current chain state.
    RandomWalk,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Real")]
pub struct SamplerParams<S> {
    pub temperature: S,
    pub iterations: usize,
    pub burn_in: usize,
    pub proposal_sigma: S,
    pub v_max: S,
    #[serde(default)]
    pub proposal: ProposalKind,
}

impl<S: Real> Default for SamplerParams<S> {
    fn default() -> Self {
        let v_max = S::lit(0.12);
        Self {
            temperature: S::one(),
            iterations: 150,
            burn_in: 75,
            proposal_sigma: v_max * S::lit(0.25),
            v_max,
            proposal: ProposalKind::Anchored,
        }
    }
}

impl<S: Real> SamplerParams<S> {
    pub fn validate(&self) -> Result<()> {
        if !(self.temperature > S::zero()) {
            return Err(Error::param("temperature", "must be > 0"));
        }
        if self.burn_in >= self.iterations {
            return Err(Error::param("burn_in", "must be < iterations"));
        }
        if !(self.proposal_sigma > S::zero()) {
            return Err(Error::param("proposal_sigma", "must be > 0"));
        }
        if !(self.v_max > S::zero()) {
            return Err(Error::param("v_max", "must be > 0"));
        }
        Ok(())
    }
}

/// Stream domains keep unrelated consumers of the same seed apart.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u64)]
pub enum Domain {
    Velocity = 1,
    Placement = 2,
    Test = 3,
}

/// Deterministic random stream keyed by `(global_seed, robot_id, tick)`.
#[derive(Clone, Debug)]
pub struct RngStream {
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(global_seed: u64, robot_id: u64, tick: u64) -> Self {
        Self::with_domain(global_seed, robot_id, tick, Domain::Velocity)
    }

    pub fn with_domain(global_seed: u64, robot_id: u64, tick: u64, domain: Domain) -> Self {
        let mut key = [0u8; 32];
        key[0..8].copy_from_slice(&global_seed.to_le_bytes());
        key[8..16].copy_from_slice(&robot_id.to_le_bytes());
        key[16..24].copy_from_slice(&tick.to_le_bytes());
        key[24..32].copy_from_slice(&(domain as u64).to_le_bytes());
        Self {
            rng: ChaCha8Rng::from_seed(key),
        }
    }

    pub fn standard_normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    pub fn below(&mut self, n: usize) -> usize {
        self.rng.random_range(0..n)
    }
}

/// Gaussian draw around `current_v`, radially clipped to the speed limit.
pub fn propose<S: Real>(
    current_v: Vec2<S>,
    params: &SamplerParams<S>,
    rng: &mut RngStream,
) -> Vec2<S> {
    let dx = S::lit(rng.standard_normal());
    let dy = S::lit(rng.standard_normal());
    (current_v + Vec2::new(dx, dy) * params.proposal_sigma).clamp_norm(params.v_max)
}

/// Metropolis acceptance for a (temperature scaled) energy change.
#[inline]
pub fn metropolis_accept<S: Real>(delta_e: S, u: S) -> bool {
    delta_e < S::zero() || u < (-delta_e).exp()
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ChainStats {
    pub accepted: usize,
    pub downhill_proposals: usize,
    pub downhill_accepted: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChainResult<S> {
    /// Mean of the post-burn-in chain states, clipped to the speed limit.
    pub velocity: Vec2<S>,
    pub stats: ChainStats,
}

/// Runs the chain on an arbitrary energy function. `iterations` proposals
/// are made; states `burn_in + 1 ..= iterations` are averaged.
pub fn run_chain<S: Real, F: Fn(Vec2<S>) -> S>(
    start: Vec2<S>,
    energy: F,
    params: &SamplerParams<S>,
    rng: &mut RngStream,
) -> ChainResult<S> {
    let start = start.clamp_norm(params.v_max);
    let inv_t = S::one() / params.temperature;
    let mut current = start;
    let mut current_e = energy(current) * inv_t;
    let mut stats = ChainStats::default();
    // accumulate deviations from the start so a frozen chain returns it exactly
    let mut deviation = Vec2::zero();
    for k in 1..=params.iterations {
        let center = match params.proposal {
            ProposalKind::Anchored => start,
            ProposalKind::RandomWalk => current,
        };
        let candidate = propose(center, params, rng);
        let cand_e = energy(candidate) * inv_t;
        let delta = cand_e - current_e;
        let u = S::lit(rng.uniform());
        let downhill = delta < S::zero();
        if metropolis_accept(delta, u) {
            current = candidate;
            current_e = cand_e;
            stats.accepted += 1;
            if downhill {
                stats.downhill_accepted += 1;
            }
        }
        if downhill {
            stats.downhill_proposals += 1;
        }
        if k > params.burn_in {
            deviation += current - start;
        }
    }
    let n = S::from_usize_lossy(params.iterations - params.burn_in);
    ChainResult {
        velocity: (start + deviation / n).clamp_norm(params.v_max),
        stats,
    }
}

/// Next velocity for one robot given its perception snapshot.
pub fn sample_velocity<S: Real>(
    perception: &Perception<S>,
    mode: Mode,
    eparams: &EnergyParams<S>,
    sparams: &SamplerParams<S>,
    dt: S,
    rng: &mut RngStream,
) -> Vec2<S> {
    let local = LocalEnergy::new(perception, mode, eparams, dt);
    run_chain(perception.self_velocity, |v| local.energy(v), sparams, rng).velocity
}

/// Normalized Gibbs weights `exp(-E/T) / Z` with max-subtraction.
pub fn gibbs_weights<S: Real>(energies: &[S], temperature: S) -> Vec<S> {
    let scaled: Vec<S> = energies.iter().map(|&e| -e / temperature).collect();
    let top = scaled.iter().copied().fold(S::neg_infinity(), S::max);
    let w: Vec<S> = scaled.iter().map(|&s| (s - top).exp()).collect();
    let z: S = w.iter().copied().sum();
    w.into_iter().map(|x| x / z).collect()
}

/// Probability of one candidate under the local Gibbs distribution
/// restricted to a finite candidate set.
#[allow(clippy::too_many_arguments)]
pub fn gibbs_probability<S: Real>(
    candidate_index: usize,
    candidates: &[Vec2<S>],
    perception: &Perception<S>,
    mode: Mode,
    eparams: &EnergyParams<S>,
    sparams: &SamplerParams<S>,
    dt: S,
) -> Result<S> {
    if candidates.is_empty() {
        return Err(Error::EmptyCandidates);
    }
    if candidate_index >= candidates.len() {
        return Err(Error::IndexOutOfRange {
            index: candidate_index,
            len: candidates.len(),
        });
    }
    let local = LocalEnergy::new(perception, mode, eparams, dt);
    let energies: Vec<S> = candidates.iter().map(|&c| local.energy(c)).collect();
    Ok(gibbs_weights(&energies, sparams.temperature)[candidate_index])
}
