//! The incremental fit / sample / append loop and its Monte Carlo wrapper.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ecdf::EmpiricalCdf;
use crate::error::{Error, Result};
use crate::generative::{GenerativeApproach, GenerativeModel, SampleSet};
use crate::seeding::stream_rng;

pub const DEFAULT_SAMPLE_SIZE: usize = 1000;
pub const DEFAULT_DEPTH: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IgmcConfig {
    /// Number of independent chains, `N`.
    pub sample_size: usize,
    /// Generated values per chain, `H`.
    pub depth: usize,
    pub master_seed: u64,
}

impl IgmcConfig {
    pub fn new(sample_size: usize, depth: usize, master_seed: u64) -> Result<Self> {
        let config = IgmcConfig {
            sample_size,
            depth,
            master_seed,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.sample_size == 0 {
            return Err(Error::InvalidConfig("sample size N must be >= 1".into()));
        }
        if self.depth == 0 {
            return Err(Error::InvalidConfig("sampling depth H must be >= 1".into()));
        }
        Ok(())
    }
}

impl Default for IgmcConfig {
    fn default() -> Self {
        IgmcConfig {
            sample_size: DEFAULT_SAMPLE_SIZE,
            depth: DEFAULT_DEPTH,
            master_seed: 0,
        }
    }
}

/// Working state of one chain.
///
/// `running_sum` always equals the sum of `working_set`'s values; the set
/// starts as the `M` observations and grows by one value per step.
#[derive(Debug, Clone)]
pub struct ChainState {
    working_set: SampleSet,
    running_sum: f64,
    initial_len: usize,
    steps_taken: usize,
}

impl ChainState {
    pub fn new(initial: &SampleSet) -> Result<Self> {
        if initial.is_empty() {
            return Err(Error::EmptySampleSet);
        }
        Ok(ChainState {
            working_set: initial.clone(),
            running_sum: initial.sum(),
            initial_len: initial.len(),
            steps_taken: 0,
        })
    }

    /// One fit / sample / append round. Returns the appended value.
    pub fn step<A, R>(&mut self, phi: &A, rng: &mut R) -> Result<f64>
    where
        A: GenerativeApproach + ?Sized,
        R: Rng + ?Sized,
    {
        let model = phi.fit(&self.working_set)?;
        let y = model.sample(rng);
        self.working_set.push(y)?;
        self.running_sum += y;
        self.steps_taken += 1;
        Ok(y)
    }

    /// Current running mean `Z_k = (Σx + Σy) / (M + k)`.
    pub fn running_mean(&self) -> f64 {
        self.running_sum / self.working_set.len() as f64
    }

    pub fn running_sum(&self) -> f64 {
        self.running_sum
    }

    pub fn steps_taken(&self) -> usize {
        self.steps_taken
    }

    pub fn initial_len(&self) -> usize {
        self.initial_len
    }

    pub fn working_set(&self) -> &SampleSet {
        &self.working_set
    }
}

/// Runs one chain of depth `depth` and returns its posterior draw
/// `μ = (Σx + Σy) / (M + H)`. `initial` is not modified.
pub fn run_chain<A, R>(initial: &SampleSet, phi: &A, depth: usize, rng: &mut R) -> Result<f64>
where
    A: GenerativeApproach + ?Sized,
    R: Rng + ?Sized,
{
    run_chain_inner(initial, phi, depth, rng, None)
}

/// Like [`run_chain`], also recording `Z_0, Z_1, ..., Z_H` into `trace`.
pub fn run_chain_traced<A, R>(
    initial: &SampleSet,
    phi: &A,
    depth: usize,
    rng: &mut R,
    trace: &mut Vec<f64>,
) -> Result<f64>
where
    A: GenerativeApproach + ?Sized,
    R: Rng + ?Sized,
{
    trace.clear();
    trace.reserve(depth + 1);
    run_chain_inner(initial, phi, depth, rng, Some(trace))
}

fn run_chain_inner<A, R>(
    initial: &SampleSet,
    phi: &A,
    depth: usize,
    rng: &mut R,
    mut trace: Option<&mut Vec<f64>>,
) -> Result<f64>
where
    A: GenerativeApproach + ?Sized,
    R: Rng + ?Sized,
{
    if depth == 0 {
        return Err(Error::InvalidConfig("sampling depth H must be >= 1".into()));
    }
    let mut state = ChainState::new(initial)?;
    if let Some(t) = trace.as_deref_mut() {
        t.push(state.running_mean());
    }
    for _ in 0..depth {
        state.step(phi, rng)?;
        if let Some(t) = trace.as_deref_mut() {
            t.push(state.running_mean());
        }
    }
    debug_assert!({
        let resummed: f64 = state.working_set.values().iter().sum();
        (resummed - state.running_sum).abs() <= 1e-9 * resummed.abs().max(1.0)
    });
    Ok(state.running_mean())
}

/// The `N` posterior draws of one IGMC run, ordered by chain index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosteriorSamples {
    mus: Vec<f64>,
    config: IgmcConfig,
    initial_len: usize,
}

impl PosteriorSamples {
    pub fn mus(&self) -> &[f64] {
        &self.mus
    }

    pub fn config(&self) -> &IgmcConfig {
        &self.config
    }

    pub fn initial_len(&self) -> usize {
        self.initial_len
    }

    pub fn into_mus(self) -> Vec<f64> {
        self.mus
    }
}

/// Runs `config.sample_size` chains on the current rayon pool.
///
/// Chain `n` uses [`stream_rng`]`(master_seed, n)`; results are collected by
/// index, so the output is bit-identical to [`run_igmc_sequential`].
pub fn run_igmc<A>(initial: &SampleSet, phi: &A, config: &IgmcConfig) -> Result<PosteriorSamples>
where
    A: GenerativeApproach + Sync + ?Sized,
{
    prepare(initial, config)?;
    let mus = (0..config.sample_size as u64)
        .into_par_iter()
        .map(|n| run_chain(initial, phi, config.depth, &mut stream_rng(config.master_seed, n)))
        .collect::<Result<Vec<_>>>()?;
    Ok(PosteriorSamples {
        mus,
        config: *config,
        initial_len: initial.len(),
    })
}

pub fn run_igmc_sequential<A>(
    initial: &SampleSet,
    phi: &A,
    config: &IgmcConfig,
) -> Result<PosteriorSamples>
where
    A: GenerativeApproach + ?Sized,
{
    prepare(initial, config)?;
    let mus = (0..config.sample_size as u64)
        .map(|n| run_chain(initial, phi, config.depth, &mut stream_rng(config.master_seed, n)))
        .collect::<Result<Vec<_>>>()?;
    Ok(PosteriorSamples {
        mus,
        config: *config,
        initial_len: initial.len(),
    })
}

fn prepare(initial: &SampleSet, config: &IgmcConfig) -> Result<()> {
    config.validate()?;
    if initial.is_empty() {
        return Err(Error::EmptySampleSet);
    }
    Ok(())
}

/// `F̂(t) = #{n : μ_n ≤ t} / N`.
pub fn posterior_cdf(samples: &PosteriorSamples) -> Result<EmpiricalCdf> {
    EmpiricalCdf::from_samples(samples.mus())
}
