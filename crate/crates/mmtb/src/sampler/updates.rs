//! Conditional updates of the Gibbs sweep other than the state-sequence step.

use ndarray::Array2;
use rand::Rng;

use crate::config::{Hyperparameters, LikelihoodFamily};
use crate::dist;
use crate::error::{Error, Result};
use crate::model::{LikelihoodCache, ModelState};
use crate::tensor::DataTensor;

/// Running Metropolis-Hastings tally for one concentration parameter. The
/// proposal count per sweep follows the expected number of prior proposals
/// needed for one acceptance, estimated from the running rate (initialized
/// at 0.25 via pseudo-counts) and capped at 100.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct MhTally {
    pub accepted: u64,
    pub proposed: u64,
}

impl MhTally {
    pub fn rate_estimate(&self) -> f64 {
        (1.0 + self.accepted as f64) / (4.0 + self.proposed as f64)
    }

    pub fn proposals_per_sweep(&self) -> usize {
        ((1.0 / self.rate_estimate()).ceil() as usize).clamp(1, 100)
    }
}

/// Metropolis-Hastings update of a Dirichlet concentration parameter with
/// prior proposals: the acceptance ratio reduces to the ratio of
/// Dirichlet-multinomial marginal likelihoods of `counts`.
pub fn update_concentration_mh<R: Rng + ?Sized>(
    current: f64,
    counts: &[usize],
    prior_shape: f64,
    prior_rate: f64,
    tally: &mut MhTally,
    rng: &mut R,
) -> f64 {
    let mut value = current;
    let mut log_target = dist::symmetric_dirichlet_log_marginal(counts, value);
    let n_props = tally.proposals_per_sweep();
    for _ in 0..n_props {
        let proposal = dist::sample_gamma(rng, prior_shape, prior_rate);
        let prop_target = dist::symmetric_dirichlet_log_marginal(counts, proposal);
        tally.proposed += 1;
        if (prop_target - log_target) >= rng.random::<f64>().ln() {
            value = proposal;
            log_target = prop_target;
            tally.accepted += 1;
        }
    }
    value
}

/// pi ~ Dirichlet(zeta/Z + S_1, ..., zeta/Z + S_Z).
pub fn update_profile_probabilities<R: Rng + ?Sized>(
    counts: &[usize],
    zeta: f64,
    rng: &mut R,
) -> Vec<f64> {
    let z = counts.len() as f64;
    let alpha: Vec<f64> = counts.iter().map(|&s| zeta / z + s as f64).collect();
    dist::sample_dirichlet(rng, &alpha)
}

/// Redraws every subject's profile from the categorical over profiles with
/// log weights log pi_z + sum_{r,t} log F(Y | theta_{c^(z)}). Returns the
/// number of prior fallbacks after degenerate weights.
pub fn update_profile_assignments<R: Rng + ?Sized>(
    cache: &LikelihoodCache,
    state: &mut ModelState,
    rng: &mut R,
) -> Result<usize> {
    let n_profiles = state.n_profiles();
    let (n_subjects, n_meas, n_times) = (
        cache.n_subjects,
        cache.n_measurements,
        cache.n_timesteps,
    );
    let mut fallbacks = 0usize;
    let mut logw = vec![0.0f64; n_profiles];
    for i in 0..n_subjects {
        for (z, w) in logw.iter_mut().enumerate() {
            let mut acc = state.pi[z].ln();
            for r in 0..n_meas {
                for t in 0..n_times {
                    acc += cache.get(state.c[[z, r, t]], i, r, t);
                }
            }
            *w = acc;
        }
        state.s[i] = match dist::sample_log_weights(rng, &logw) {
            Some(z) => z,
            None => {
                fallbacks += 1;
                let prior: Vec<f64> = state.pi.iter().map(|p| p.ln()).collect();
                dist::sample_log_weights(rng, &prior).ok_or_else(|| Error::DegenerateWeights {
                    context: format!("profile assignment of subject {i}"),
                })?
            }
        };
    }
    Ok(fallbacks)
}

/// Fresh-draw counts M^(z)_k: cells of active profiles whose state was
/// resampled (gamma = 0). Inactive profiles contribute zero.
pub fn fresh_draw_counts(state: &ModelState, profile_counts: &[usize]) -> Array2<usize> {
    let (nz, nr, nt) = state.c.dim();
    let mut m = Array2::zeros((nz, state.n_states()));
    for z in 0..nz {
        if profile_counts[z] == 0 {
            continue;
        }
        for r in 0..nr {
            for t in 0..nt {
                if state.gamma[[z, r, t]] == 0 {
                    m[[z, state.c[[z, r, t]]]] += 1;
                }
            }
        }
    }
    m
}

/// Simulates the franchise table counts: T = 0 when M = 0, otherwise start
/// at 1 and stochastically increment for m = 2..M. Returns per-state totals
/// summed over profiles.
pub fn sample_table_counts<R: Rng + ?Sized>(
    m_counts: &Array2<usize>,
    phi: f64,
    omega0: &[f64],
    rng: &mut R,
) -> Vec<usize> {
    let (nz, nk) = m_counts.dim();
    let mut totals = vec![0usize; nk];
    for z in 0..nz {
        for k in 0..nk {
            let m = m_counts[[z, k]];
            if m == 0 {
                continue;
            }
            let conc = phi * omega0[k];
            let mut tables = 1usize;
            for step in 2..=m {
                let p = conc / (conc + (step as f64 - 1.0));
                if rng.random::<f64>() < p {
                    tables += 1;
                }
            }
            totals[k] += tables;
        }
    }
    totals
}

/// omega0 ~ Dirichlet(eta/K + Tbar_1, ..., eta/K + Tbar_K).
pub fn update_global_state_probabilities<R: Rng + ?Sized>(
    table_totals: &[usize],
    eta: f64,
    rng: &mut R,
) -> Vec<f64> {
    let k = table_totals.len() as f64;
    let alpha: Vec<f64> = table_totals.iter().map(|&t| eta / k + t as f64).collect();
    dist::sample_dirichlet(rng, &alpha)
}

/// omega^(z) ~ Dirichlet(phi*omega0 + M_z); zero counts for inactive
/// profiles reduce this to a prior refresh.
pub fn update_profile_state_probabilities<R: Rng + ?Sized>(
    m_counts: &Array2<usize>,
    phi: f64,
    omega0: &[f64],
    rng: &mut R,
) -> Vec<Vec<f64>> {
    let (nz, nk) = m_counts.dim();
    (0..nz)
        .map(|z| {
            let alpha: Vec<f64> = (0..nk)
                .map(|k| phi * omega0[k] + m_counts[[z, k]] as f64)
                .collect();
            dist::sample_dirichlet(rng, &alpha)
        })
        .collect()
}

/// a^(z)_t ~ Beta(alpha + G, beta + R - G) for active profiles at t >= 2;
/// the unused first column and inactive profiles are prior draws.
pub fn update_persistence_probabilities<R: Rng + ?Sized>(
    state: &mut ModelState,
    hp: &Hyperparameters,
    profile_counts: &[usize],
    rng: &mut R,
) {
    let (nz, nr, nt) = state.gamma.dim();
    for z in 0..nz {
        state.a[[z, 0]] = dist::sample_beta(rng, hp.alpha, hp.beta);
        for t in 1..nt {
            if profile_counts[z] == 0 {
                state.a[[z, t]] = dist::sample_beta(rng, hp.alpha, hp.beta);
            } else {
                let g: usize = (0..nr).map(|r| state.gamma[[z, r, t]] as usize).sum();
                state.a[[z, t]] = dist::sample_beta(
                    rng,
                    hp.alpha + g as f64,
                    hp.beta + (nr - g) as f64,
                );
            }
        }
    }
}

/// Conjugate (or auxiliary-variable, under the t likelihood) update of the
/// state parameters, and of the observation variances V when present.
pub fn update_state_parameters<R: Rng + ?Sized>(
    data: &DataTensor,
    state: &mut ModelState,
    hp: &Hyperparameters,
    rng: &mut R,
) {
    let (n, nr, nt) = (
        data.n_subjects(),
        data.n_measurements(),
        data.n_timesteps(),
    );
    let n_states = hp.k;
    match hp.likelihood {
        LikelihoodFamily::Normal {
            mu0,
            sigma0_sq,
            g1,
            g2,
        } => {
            // Pooled sufficient statistics per state.
            let mut count = vec![0usize; n_states];
            let mut sum = vec![0.0f64; n_states];
            let mut sum_sq = vec![0.0f64; n_states];
            for i in 0..n {
                let z = state.s[i];
                for r in 0..nr {
                    for t in 0..nt {
                        let k = state.c[[z, r, t]];
                        let y = data.value(i, r, t);
                        count[k] += 1;
                        sum[k] += y;
                        sum_sq[k] += y * y;
                    }
                }
            }
            for k in 0..n_states {
                if count[k] == 0 {
                    state.theta.mu[k] = dist::sample_normal(rng, mu0, sigma0_sq);
                    state.theta.sigma_sq[k] = dist::sample_inv_gamma(rng, g1, g2);
                    continue;
                }
                let nk = count[k] as f64;
                // mu | sigma_sq, then sigma_sq | mu.
                let var = state.theta.sigma_sq[k];
                let prec = 1.0 / sigma0_sq + nk / var;
                let mean = (mu0 / sigma0_sq + sum[k] / var) / prec;
                let mu = dist::sample_normal(rng, mean, 1.0 / prec);
                let sse = sum_sq[k] - 2.0 * mu * sum[k] + nk * mu * mu;
                state.theta.mu[k] = mu;
                state.theta.sigma_sq[k] =
                    dist::sample_inv_gamma(rng, g1 + nk / 2.0, g2 + 0.5 * sse.max(0.0));
            }
        }
        LikelihoodFamily::StudentT {
            nu,
            mu0,
            sigma0_sq,
            a_r,
            b_r,
        } => {
            let v = state
                .v
                .as_mut()
                .expect("auxiliary variances present under the t likelihood");
            // V | c, theta per cell, accumulating per-state precision sums.
            let mut count = vec![0usize; n_states];
            let mut sum_inv_v = vec![0.0f64; n_states];
            let mut sum_y_over_v = vec![0.0f64; n_states];
            for i in 0..n {
                let z = state.s[i];
                for r in 0..nr {
                    for t in 0..nt {
                        let k = state.c[[z, r, t]];
                        let y = data.value(i, r, t);
                        let resid = y - state.theta.mu[k];
                        let scale = (nu * state.theta.sigma_sq[k] + resid * resid) / (nu + 1.0);
                        let vi = dist::sample_scaled_inv_chi_sq(rng, nu + 1.0, scale);
                        v[[i, r, t]] = vi;
                        count[k] += 1;
                        sum_inv_v[k] += 1.0 / vi;
                        sum_y_over_v[k] += y / vi;
                    }
                }
            }
            for k in 0..n_states {
                if count[k] == 0 {
                    state.theta.mu[k] = dist::sample_normal(rng, mu0, sigma0_sq);
                    state.theta.sigma_sq[k] = dist::sample_gamma(rng, a_r, b_r);
                    continue;
                }
                let prec = 1.0 / sigma0_sq + sum_inv_v[k];
                let mean = (mu0 / sigma0_sq + sum_y_over_v[k]) / prec;
                state.theta.mu[k] = dist::sample_normal(rng, mean, 1.0 / prec);
                let shape = a_r + count[k] as f64 * nu / 2.0;
                let rate = b_r + nu / 2.0 * sum_inv_v[k];
                state.theta.sigma_sq[k] = dist::sample_gamma(rng, shape, rate);
            }
        }
    }
}
