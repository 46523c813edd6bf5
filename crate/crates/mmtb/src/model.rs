//! Latent state, likelihood densities and the joint log-posterior.

use ndarray::{Array2, Array3};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::config::{Hyperparameters, LikelihoodFamily};
use crate::dist;
use crate::tensor::DataTensor;

/// Per-state location and scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateParameters {
    pub mu: Vec<f64>,
    pub sigma_sq: Vec<f64>,
}

/// The full latent configuration of the model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelState {
    /// Profile assignment per subject, 0-based in {0..Z-1}.
    pub s: Vec<usize>,
    /// Profile probabilities, length Z.
    pub pi: Vec<f64>,
    /// Concentration of the profile Dirichlet.
    pub zeta: f64,
    /// Global state probabilities, length K.
    pub omega0: Vec<f64>,
    /// Concentration of the global state Dirichlet.
    pub eta: f64,
    /// Profile-specific state probabilities, Z rows of length K.
    pub omega: Vec<Vec<f64>>,
    /// State assignments, Z x R x T, 0-based in {0..K-1}.
    pub c: Array3<usize>,
    /// Persistence indicators, Z x R x T; first time step always 0.
    pub gamma: Array3<u8>,
    /// Persistence probabilities, Z x T.
    pub a: Array2<f64>,
    pub theta: StateParameters,
    /// Auxiliary observation variances, N x R x T; present only under the
    /// t likelihood.
    pub v: Option<Array3<f64>>,
}

impl ModelState {
    pub fn n_profiles(&self) -> usize {
        self.pi.len()
    }

    pub fn n_states(&self) -> usize {
        self.omega0.len()
    }

    /// Number of subjects assigned to each profile.
    pub fn profile_counts(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.n_profiles()];
        for &z in &self.s {
            counts[z] += 1;
        }
        counts
    }

    /// Checks every structural invariant; used by tests and debug assertions.
    pub fn check_invariants(&self) -> Result<(), String> {
        let check_simplex = |v: &[f64], name: &str| -> Result<(), String> {
            if v.iter().any(|&x| x < 0.0) {
                return Err(format!("{name} has a negative entry"));
            }
            let sum: f64 = v.iter().sum();
            if (sum - 1.0).abs() > 1e-10 {
                return Err(format!("{name} sums to {sum}"));
            }
            Ok(())
        };
        check_simplex(&self.pi, "pi")?;
        check_simplex(&self.omega0, "omega0")?;
        for (z, w) in self.omega.iter().enumerate() {
            check_simplex(w, &format!("omega[{z}]"))?;
        }
        let (nz, nr, nt) = self.c.dim();
        for z in 0..nz {
            for r in 0..nr {
                if self.gamma[[z, r, 0]] != 0 {
                    return Err(format!("gamma[{z}][{r}][0] != 0"));
                }
                for t in 1..nt {
                    if self.gamma[[z, r, t]] == 1 && self.c[[z, r, t]] != self.c[[z, r, t - 1]] {
                        return Err(format!("gamma=1 with changed state at ({z},{r},{t})"));
                    }
                }
            }
        }
        for v in self.a.iter() {
            if !(0.0..=1.0).contains(v) {
                return Err(format!("persistence probability {v} outside [0,1]"));
            }
        }
        if self.theta.sigma_sq.iter().any(|&v| v <= 0.0) {
            return Err("non-positive sigma_sq".into());
        }
        Ok(())
    }
}

/// log F(y | theta_k) for the configured likelihood family.
pub fn log_density(y: f64, k: usize, theta: &StateParameters, family: &LikelihoodFamily) -> f64 {
    match family {
        LikelihoodFamily::Normal { .. } => {
            dist::log_normal_pdf(y, theta.mu[k], theta.sigma_sq[k])
        }
        LikelihoodFamily::StudentT { nu, .. } => {
            log_t_pdf(y, *nu, theta.mu[k], theta.sigma_sq[k])
        }
    }
}

/// Location-scale t log density with scale^2 = sigma_sq.
pub fn log_t_pdf(y: f64, nu: f64, mu: f64, sigma_sq: f64) -> f64 {
    let z2 = (y - mu) * (y - mu) / sigma_sq;
    ln_gamma((nu + 1.0) / 2.0)
        - ln_gamma(nu / 2.0)
        - 0.5 * (nu * std::f64::consts::PI).ln()
        - 0.5 * sigma_sq.ln()
        - 0.5 * (nu + 1.0) * (1.0 + z2 / nu).ln()
}

/// Per-cell observation log densities for every state, laid out as
/// `[k][i][r][t]`. Rebuilt once per sweep after the state-parameter update so
/// the profile and state-sequence updates reuse the same values.
pub struct LikelihoodCache {
    pub values: Vec<f64>,
    pub n_states: usize,
    pub n_subjects: usize,
    pub n_measurements: usize,
    pub n_timesteps: usize,
}

impl LikelihoodCache {
    pub fn build(data: &DataTensor, theta: &StateParameters, family: &LikelihoodFamily) -> Self {
        let (n, r, t) = (
            data.n_subjects(),
            data.n_measurements(),
            data.n_timesteps(),
        );
        let k = theta.mu.len();
        let mut values = vec![0.0; k * n * r * t];
        match family {
            LikelihoodFamily::Normal { .. } => {
                for state in 0..k {
                    let mu = theta.mu[state];
                    let var = theta.sigma_sq[state];
                    let norm = -0.5 * (dist::LN_2PI + var.ln());
                    let inv2 = 0.5 / var;
                    let base = state * n * r * t;
                    for (cell, &y) in data.values().iter().enumerate() {
                        let d = y - mu;
                        values[base + cell] = norm - d * d * inv2;
                    }
                }
            }
            LikelihoodFamily::StudentT { nu, .. } => {
                let nu = *nu;
                let lead = ln_gamma((nu + 1.0) / 2.0)
                    - ln_gamma(nu / 2.0)
                    - 0.5 * (nu * std::f64::consts::PI).ln();
                for state in 0..k {
                    let mu = theta.mu[state];
                    let var = theta.sigma_sq[state];
                    let norm = lead - 0.5 * var.ln();
                    let base = state * n * r * t;
                    for (cell, &y) in data.values().iter().enumerate() {
                        let d = y - mu;
                        values[base + cell] =
                            norm - 0.5 * (nu + 1.0) * (1.0 + d * d / (var * nu)).ln();
                    }
                }
            }
        }
        LikelihoodCache {
            values,
            n_states: k,
            n_subjects: n,
            n_measurements: r,
            n_timesteps: t,
        }
    }

    #[inline]
    pub fn get(&self, k: usize, i: usize, r: usize, t: usize) -> f64 {
        let idx = ((k * self.n_subjects + i) * self.n_measurements + r) * self.n_timesteps + t;
        self.values[idx]
    }

    /// Log-likelihood matrix for one (profile, measurement): entry (k, t) is
    /// the summed log density of that measurement's observations across
    /// subjects in the profile.
    pub fn profile_matrix(&self, subjects: &[usize], r: usize) -> Array2<f64> {
        let mut out = Array2::zeros((self.n_states, self.n_timesteps));
        for k in 0..self.n_states {
            for &i in subjects {
                let base =
                    ((k * self.n_subjects + i) * self.n_measurements + r) * self.n_timesteps;
                for t in 0..self.n_timesteps {
                    out[[k, t]] += self.values[base + t];
                }
            }
        }
        out
    }
}

/// K x T matrix of summed log likelihoods for measurement `r` under profile
/// `z`; an empty profile yields the all-zero matrix.
pub fn likelihood_matrix(
    data: &DataTensor,
    state: &ModelState,
    hp: &Hyperparameters,
    z: usize,
    r: usize,
) -> Array2<f64> {
    let subjects: Vec<usize> = (0..data.n_subjects()).filter(|&i| state.s[i] == z).collect();
    let (k_max, t_max) = (hp.k, data.n_timesteps());
    let mut out = Array2::zeros((k_max, t_max));
    for k in 0..k_max {
        for &i in &subjects {
            for t in 0..t_max {
                out[[k, t]] +=
                    log_density(data.value(i, r, t), k, &state.theta, &hp.likelihood);
            }
        }
    }
    out
}

/// Joint log-posterior up to an iteration-invariant constant. Under the t
/// likelihood the auxiliary variances are integrated out (marginal t
/// density), so the value does not depend on `v`.
pub fn joint_log_posterior(data: &DataTensor, state: &ModelState, hp: &Hyperparameters) -> f64 {
    let (n, r_max, t_max) = (
        data.n_subjects(),
        data.n_measurements(),
        data.n_timesteps(),
    );
    let counts = state.profile_counts();
    let mut lp = 0.0;

    // Observation likelihood.
    for i in 0..n {
        let z = state.s[i];
        for r in 0..r_max {
            for t in 0..t_max {
                lp += log_density(
                    data.value(i, r, t),
                    state.c[[z, r, t]],
                    &state.theta,
                    &hp.likelihood,
                );
            }
        }
    }

    // Profile assignments and probabilities.
    for &z in &state.s {
        lp += state.pi[z].ln();
    }
    let zeta_alpha = vec![state.zeta / hp.z as f64; hp.z];
    lp += dist::log_dirichlet_pdf(&state.pi, &zeta_alpha);

    // State probabilities: global and per active profile.
    let eta_alpha = vec![state.eta / hp.k as f64; hp.k];
    lp += dist::log_dirichlet_pdf(&state.omega0, &eta_alpha);
    let phi_omega0: Vec<f64> = state.omega0.iter().map(|&w| hp.phi * w).collect();
    for z in 0..hp.z {
        if counts[z] == 0 {
            continue;
        }
        lp += dist::log_dirichlet_pdf(&state.omega[z], &phi_omega0);

        // tRPM sequence probability and persistence priors.
        for r in 0..r_max {
            lp += state.omega[z][state.c[[z, r, 0]]].ln();
            for t in 1..t_max {
                if state.gamma[[z, r, t]] == 1 {
                    lp += state.a[[z, t]].ln();
                } else {
                    lp += (1.0 - state.a[[z, t]]).ln()
                        + state.omega[z][state.c[[z, r, t]]].ln();
                }
            }
        }
        for t in 1..t_max {
            lp += dist::log_beta_pdf(state.a[[z, t]], hp.alpha, hp.beta);
        }
    }

    // Concentration hyperpriors.
    lp += dist::log_gamma_pdf(state.zeta, hp.b1, hp.b2);
    lp += dist::log_gamma_pdf(state.eta, hp.d1, hp.d2);

    // State-parameter priors.
    let (mu0, sigma0_sq) = (hp.likelihood.mu0(), hp.likelihood.sigma0_sq());
    for k in 0..hp.k {
        lp += dist::log_normal_pdf(state.theta.mu[k], mu0, sigma0_sq);
        lp += match hp.likelihood {
            LikelihoodFamily::Normal { g1, g2, .. } => {
                dist::log_inv_gamma_pdf(state.theta.sigma_sq[k], g1, g2)
            }
            LikelihoodFamily::StudentT { a_r, b_r, .. } => {
                dist::log_gamma_pdf(state.theta.sigma_sq[k], a_r, b_r)
            }
        };
    }
    lp
}

/// Observation log likelihood only (used for the sampler comparison curves).
pub fn observation_log_likelihood(
    data: &DataTensor,
    state: &ModelState,
    hp: &Hyperparameters,
) -> f64 {
    let mut ll = 0.0;
    for i in 0..data.n_subjects() {
        let z = state.s[i];
        for r in 0..data.n_measurements() {
            for t in 0..data.n_timesteps() {
                ll += log_density(
                    data.value(i, r, t),
                    state.c[[z, r, t]],
                    &state.theta,
                    &hp.likelihood,
                );
            }
        }
    }
    ll
}
