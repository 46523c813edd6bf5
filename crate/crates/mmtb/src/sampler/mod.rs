//! Gibbs sampler orchestration: initialization, the full sweep, and chains.

pub mod blocked;
pub mod marginal;
pub mod updates;

use ndarray::{Array2, Array3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{Hyperparameters, LikelihoodFamily, RunConfig};
use crate::dist;
use crate::error::{Error, Result};
use crate::model::{joint_log_posterior, LikelihoodCache, ModelState, StateParameters};
use crate::tensor::DataTensor;
use updates::MhTally;

/// Which state-sequence update the sweep uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplerVariant {
    Blocked,
    Marginal,
}

/// Per-chain diagnostics recorded every iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainDiagnostics {
    pub log_posterior_trace: Vec<f64>,
    pub zeta_mh: MhTally,
    pub eta_mh: MhTally,
    /// Categorical draws that fell back to prior weights after underflow.
    pub prior_fallbacks: u64,
}

/// One retained posterior draw.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosteriorDraw {
    pub iteration: usize,
    pub log_posterior: f64,
    pub state: ModelState,
}

/// Ordered retained draws plus diagnostics and the config that produced them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleChain {
    pub config: RunConfig,
    pub draws: Vec<PosteriorDraw>,
    pub diagnostics: ChainDiagnostics,
}

/// Deterministic per-task random stream for one (iteration, profile,
/// measurement) triple; stream 0 is reserved for the sequential updates, so
/// parallel and serial execution of the state-sequence step coincide.
fn task_rng(chain_seed: u64, iteration: usize, task_index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(chain_seed);
    rng.set_stream(((iteration as u64 + 1) << 20) | (task_index as u64 + 1));
    rng
}

/// How a chain is started.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitStyle {
    /// Distinct profiles with state sequences matched to each profile's
    /// first subject; the default for fits.
    DataMatched,
    /// Everything from the priors (s uniform, c uniform). Used by the
    /// sampler-comparison experiment, which starts both variants at the
    /// same random configuration.
    Random,
}

/// Chain initialization; an explicit location grid in the hyperparameters
/// overrides the location prior draw.
pub fn initialize<R: Rng + ?Sized>(
    data: &DataTensor,
    hp: &Hyperparameters,
    style: InitStyle,
    rng: &mut R,
) -> ModelState {
    let (n, nr, nt) = (
        data.n_subjects(),
        data.n_measurements(),
        data.n_timesteps(),
    );
    let (nz, nk) = (hp.z, hp.k);

    let zeta = dist::sample_gamma(rng, hp.b1, hp.b2);
    let pi = dist::sample_dirichlet(rng, &vec![zeta / nz as f64; nz]);
    // Start subjects in distinct profiles where possible: merges are cheap
    // moves for the sampler, while splitting a merged profile requires a
    // prior-drawn state sequence to beat an adapted one and mixes poorly.
    let s: Vec<usize> = match style {
        InitStyle::DataMatched => (0..n).map(|i| i % nz).collect(),
        InitStyle::Random => (0..n).map(|_| rng.random_range(0..nz)).collect(),
    };

    let eta = dist::sample_gamma(rng, hp.d1, hp.d2);
    let omega0 = dist::sample_dirichlet(rng, &vec![eta / nk as f64; nk]);
    let phi_omega0: Vec<f64> = omega0.iter().map(|&w| hp.phi * w).collect();
    let omega: Vec<Vec<f64>> = (0..nz)
        .map(|_| dist::sample_dirichlet(rng, &phi_omega0))
        .collect();

    let mut a = Array2::zeros((nz, nt));
    for v in a.iter_mut() {
        *v = dist::sample_beta(rng, hp.alpha, hp.beta);
    }

    let mu = match &hp.mu_init {
        Some(grid) => grid.clone(),
        None => (0..nk)
            .map(|_| dist::sample_normal(rng, hp.likelihood.mu0(), hp.likelihood.sigma0_sq()))
            .collect(),
    };
    let sigma_sq: Vec<f64> = (0..nk)
        .map(|_| match hp.likelihood {
            LikelihoodFamily::Normal { g1, g2, .. } => dist::sample_inv_gamma(rng, g1, g2),
            LikelihoodFamily::StudentT { a_r, b_r, .. } => dist::sample_gamma(rng, a_r, b_r),
        })
        .collect();
    let theta = StateParameters { mu, sigma_sq };

    // DataMatched: match each profile's initial sequences to its first
    // subject's data (nearest initial location). Profiles that fit their
    // subjects from the first sweep keep the profile update from collapsing
    // subjects into one profile before the state block has adapted
    // anything. Random: uniform draws. Gamma starts all zero, consistent
    // with independently drawn assignments.
    let mut c = Array3::zeros((nz, nr, nt));
    let gamma = Array3::zeros((nz, nr, nt));
    for z in 0..nz {
        match style {
            InitStyle::DataMatched => {
                let subject = s.iter().position(|&si| si == z);
                for r in 0..nr {
                    for t in 0..nt {
                        c[[z, r, t]] = match subject {
                            Some(i) => {
                                let y = data.value(i, r, t);
                                (0..nk)
                                    .min_by(|&k1, &k2| {
                                        let d1 = (y - theta.mu[k1]).abs();
                                        let d2 = (y - theta.mu[k2]).abs();
                                        d1.partial_cmp(&d2).expect("finite distances")
                                    })
                                    .expect("K >= 1")
                            }
                            None => rng.random_range(0..nk),
                        };
                    }
                }
            }
            InitStyle::Random => {
                for r in 0..nr {
                    for t in 0..nt {
                        c[[z, r, t]] = rng.random_range(0..nk);
                    }
                }
            }
        }
    }

    let v = match hp.likelihood {
        LikelihoodFamily::Normal { .. } => None,
        LikelihoodFamily::StudentT { nu, .. } => {
            let mut v = Array3::zeros((n, nr, nt));
            for i in 0..n {
                for r in 0..nr {
                    for t in 0..nt {
                        let k = c[[s[i], r, t]];
                        v[[i, r, t]] = dist::sample_scaled_inv_chi_sq(rng, nu, theta.sigma_sq[k]);
                    }
                }
            }
            Some(v)
        }
    };

    ModelState {
        s,
        pi,
        zeta,
        omega0,
        eta,
        omega,
        c,
        gamma,
        a,
        theta,
        v,
    }
}

/// Runs one full Gibbs sweep in place. The state-sequence step runs in
/// parallel over (profile, measurement) pairs with task-derived random
/// streams, so results do not depend on the thread count.
#[allow(clippy::too_many_arguments)]
pub fn sweep(
    data: &DataTensor,
    state: &mut ModelState,
    hp: &Hyperparameters,
    variant: SamplerVariant,
    chain_seed: u64,
    iteration: usize,
    diagnostics: &mut ChainDiagnostics,
    rng: &mut ChaCha8Rng,
) -> Result<()> {
    let cache = LikelihoodCache::build(data, &state.theta, &hp.likelihood);

    // Profile block: zeta (MH, marginalized over pi), pi, s.
    let counts = state.profile_counts();
    state.zeta = updates::update_concentration_mh(
        state.zeta,
        &counts,
        hp.b1,
        hp.b2,
        &mut diagnostics.zeta_mh,
        rng,
    );
    state.pi = updates::update_profile_probabilities(&counts, state.zeta, rng);
    diagnostics.prior_fallbacks +=
        updates::update_profile_assignments(&cache, state, rng)? as u64;
    let counts = state.profile_counts();

    // State block: eta (MH over table counts), omega0, omega, (c, gamma), a.
    let m_counts = updates::fresh_draw_counts(state, &counts);
    let tables = updates::sample_table_counts(&m_counts, hp.phi, &state.omega0, rng);
    state.eta = updates::update_concentration_mh(
        state.eta,
        &tables,
        hp.d1,
        hp.d2,
        &mut diagnostics.eta_mh,
        rng,
    );
    state.omega0 = updates::update_global_state_probabilities(&tables, state.eta, rng);
    state.omega = updates::update_profile_state_probabilities(&m_counts, hp.phi, &state.omega0, rng);

    // Subjects per profile, for the likelihood matrices.
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); hp.z];
    for (i, &z) in state.s.iter().enumerate() {
        members[z].push(i);
    }

    let (nr, nt) = (data.n_measurements(), data.n_timesteps());
    let tasks: Vec<(usize, usize)> = (0..hp.z)
        .flat_map(|z| (0..nr).map(move |r| (z, r)))
        .collect();
    let results: Vec<Result<(Vec<usize>, Vec<u8>, usize)>> = tasks
        .par_iter()
        .map(|&(z, r)| {
            let mut task_rng = task_rng(chain_seed, iteration, z * nr + r);
            let logl = cache.profile_matrix(&members[z], r);
            let a_row: Vec<f64> = (0..nt).map(|t| state.a[[z, t]]).collect();
            match variant {
                SamplerVariant::Blocked => {
                    let msgs = blocked::backward_messages(&logl, &state.omega[z], &a_row);
                    let draw = blocked::blocked_update_state_sequence(
                        &logl,
                        &msgs,
                        &state.omega[z],
                        &a_row,
                        &mut task_rng,
                    )?;
                    Ok((draw.c, draw.gamma, draw.prior_fallbacks))
                }
                SamplerVariant::Marginal => {
                    let mut c_row: Vec<usize> = (0..nt).map(|t| state.c[[z, r, t]]).collect();
                    let mut g_row: Vec<u8> = (0..nt).map(|t| state.gamma[[z, r, t]]).collect();
                    let fallbacks = marginal::marginal_sweep(
                        &logl,
                        &state.omega[z],
                        &a_row,
                        &mut c_row,
                        &mut g_row,
                        &mut task_rng,
                    )?;
                    Ok((c_row, g_row, fallbacks))
                }
            }
        })
        .collect();
    for (&(z, r), result) in tasks.iter().zip(results) {
        let (c_row, g_row, fallbacks) = result?;
        for t in 0..nt {
            state.c[[z, r, t]] = c_row[t];
            state.gamma[[z, r, t]] = g_row[t];
        }
        diagnostics.prior_fallbacks += fallbacks as u64;
    }

    updates::update_persistence_probabilities(state, hp, &counts, rng);

    // Likelihood block.
    updates::update_state_parameters(data, state, hp, rng);
    Ok(())
}

/// Runs a full chain: `n_iterations` sweeps, recording thinned post-burn-in
/// snapshots and the joint log-posterior every iteration. Identical
/// (data, config, seed) triples produce bit-identical chains.
pub fn run_chain(
    data: &DataTensor,
    config: &RunConfig,
    chain_seed: u64,
    variant: SamplerVariant,
) -> Result<SampleChain> {
    run_chain_from(data, config, chain_seed, variant, InitStyle::DataMatched)
}

/// `run_chain` with an explicit initialization style.
pub fn run_chain_from(
    data: &DataTensor,
    config: &RunConfig,
    chain_seed: u64,
    variant: SamplerVariant,
    style: InitStyle,
) -> Result<SampleChain> {
    config.validate()?;
    let hp = &config.hyperparameters;
    let mut rng = ChaCha8Rng::seed_from_u64(chain_seed);
    let mut state = initialize(data, hp, style, &mut rng);
    let mut diagnostics = ChainDiagnostics {
        log_posterior_trace: Vec::with_capacity(config.n_iterations),
        zeta_mh: MhTally::default(),
        eta_mh: MhTally::default(),
        prior_fallbacks: 0,
    };
    let mut draws = Vec::with_capacity(config.n_retained());
    for iteration in 0..config.n_iterations {
        sweep(
            data,
            &mut state,
            hp,
            variant,
            chain_seed,
            iteration,
            &mut diagnostics,
            &mut rng,
        )
        .map_err(|e| Error::Sampler {
            iteration,
            source: Box::new(e),
        })?;
        let lp = joint_log_posterior(data, &state, hp);
        diagnostics.log_posterior_trace.push(lp);
        if iteration >= config.burn_in && (iteration - config.burn_in) % config.thinning == 0 {
            draws.push(PosteriorDraw {
                iteration,
                log_posterior: lp,
                state: state.clone(),
            });
        }
    }
    draws.truncate(config.n_retained());
    Ok(SampleChain {
        config: config.clone(),
        draws,
        diagnostics,
    })
}

/// Runs `n_chains` independent chains with seeds `seed + chain_index`.
pub fn run_chains(
    data: &DataTensor,
    config: &RunConfig,
    variant: SamplerVariant,
) -> Result<Vec<SampleChain>> {
    run_chains_from(data, config, variant, InitStyle::DataMatched)
}

/// `run_chains` with an explicit initialization style.
pub fn run_chains_from(
    data: &DataTensor,
    config: &RunConfig,
    variant: SamplerVariant,
    style: InitStyle,
) -> Result<Vec<SampleChain>> {
    (0..config.n_chains)
        .into_par_iter()
        .map(|chain| run_chain_from(data, config, config.seed + chain as u64, variant, style))
        .collect()
}
