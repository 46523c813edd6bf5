use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::Mode;

/// Observation likelihood family with its prior hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "family")]
pub enum LikelihoodFamily {
    /// Normal(mu_k, sigma_sq_k); mu_k ~ Normal(mu0, sigma0_sq),
    /// sigma_sq_k ~ Inv-Gamma(g1, g2).
    Normal {
        mu0: f64,
        sigma0_sq: f64,
        g1: f64,
        g2: f64,
    },
    /// Location-scale t with nu degrees of freedom, as a Normal scale
    /// mixture; mu_k ~ Normal(mu0, sigma0_sq), sigma_sq_k ~ Gamma(a_r, b_r)
    /// in shape-rate form.
    StudentT {
        nu: f64,
        mu0: f64,
        sigma0_sq: f64,
        a_r: f64,
        b_r: f64,
    },
}

impl LikelihoodFamily {
    pub fn mu0(&self) -> f64 {
        match self {
            LikelihoodFamily::Normal { mu0, .. } | LikelihoodFamily::StudentT { mu0, .. } => *mu0,
        }
    }

    pub fn sigma0_sq(&self) -> f64 {
        match self {
            LikelihoodFamily::Normal { sigma0_sq, .. }
            | LikelihoodFamily::StudentT { sigma0_sq, .. } => *sigma0_sq,
        }
    }
}

/// All fixed quantities of the model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hyperparameters {
    /// Maximum number of profiles.
    pub z: usize,
    /// Maximum number of states.
    pub k: usize,
    /// Gamma(b1, b2) hyperprior on the profile concentration zeta (shape-rate).
    pub b1: f64,
    pub b2: f64,
    /// Gamma(d1, d2) hyperprior on the state concentration eta (shape-rate).
    pub d1: f64,
    pub d2: f64,
    /// Concentration of the profile-specific Dirichlet over states.
    pub phi: f64,
    /// Beta(alpha, beta) prior on the persistence probabilities.
    pub alpha: f64,
    pub beta: f64,
    pub likelihood: LikelihoodFamily,
    /// Optional explicit initialization grid for the state locations.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu_init: Option<Vec<f64>>,
}

impl Hyperparameters {
    /// Defaults used for all simulation-study fits: Normal likelihood,
    /// K = 20 states, persistence prior Beta(10, 2).
    pub fn simulation_default(n_subjects: usize) -> Self {
        Hyperparameters {
            z: n_subjects,
            k: 20,
            b1: 50.0,
            b2: 100.0,
            d1: 50.0,
            d2: 100.0,
            phi: 0.5,
            alpha: 10.0,
            beta: 2.0,
            likelihood: LikelihoodFamily::Normal {
                mu0: 0.0,
                sigma0_sq: 25.0,
                g1: 3.0,
                g2: 6.0,
            },
            mu_init: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let pos = [
            ("b1", self.b1),
            ("b2", self.b2),
            ("d1", self.d1),
            ("d2", self.d2),
            ("phi", self.phi),
            ("alpha", self.alpha),
            ("beta", self.beta),
        ];
        for (name, v) in pos {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidConfig(format!("{name} must be positive")));
            }
        }
        if self.z < 1 || self.k < 1 {
            return Err(Error::InvalidConfig("Z and K must be >= 1".into()));
        }
        match &self.likelihood {
            LikelihoodFamily::Normal {
                sigma0_sq, g1, g2, ..
            } => {
                if *sigma0_sq <= 0.0 || *g1 <= 0.0 || *g2 <= 0.0 {
                    return Err(Error::InvalidConfig(
                        "normal likelihood hyperparameters must be positive".into(),
                    ));
                }
            }
            LikelihoodFamily::StudentT {
                nu,
                sigma0_sq,
                a_r,
                b_r,
                ..
            } => {
                if *nu < 1.0 {
                    return Err(Error::InvalidConfig("nu must be >= 1".into()));
                }
                if *sigma0_sq <= 0.0 || *a_r <= 0.0 || *b_r <= 0.0 {
                    return Err(Error::InvalidConfig(
                        "t likelihood hyperparameters must be positive".into(),
                    ));
                }
            }
        }
        if let Some(grid) = &self.mu_init {
            if grid.len() != self.k {
                return Err(Error::InvalidConfig(format!(
                    "mu_init has {} entries but K = {}",
                    grid.len(),
                    self.k
                )));
            }
        }
        Ok(())
    }
}

/// A full sampler run description; serializable as a TOML config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub hyperparameters: Hyperparameters,
    pub n_iterations: usize,
    pub burn_in: usize,
    pub n_chains: usize,
    pub seed: u64,
    pub thinning: usize,
    pub mode: Mode,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        self.hyperparameters.validate()?;
        if self.n_iterations == 0 {
            return Err(Error::InvalidConfig("n_iterations must be >= 1".into()));
        }
        if self.burn_in >= self.n_iterations {
            return Err(Error::InvalidConfig(
                "burn_in must be < n_iterations".into(),
            ));
        }
        if self.thinning == 0 {
            return Err(Error::InvalidConfig("thinning must be >= 1".into()));
        }
        if self.n_chains == 0 {
            return Err(Error::InvalidConfig("n_chains must be >= 1".into()));
        }
        Ok(())
    }

    /// Number of retained draws per chain.
    pub fn n_retained(&self) -> usize {
        (self.n_iterations - self.burn_in) / self.thinning
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig =
            toml::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }
}
