//! Bayesian biclustering of multi-subject multivariate time series:
//! time-invariant subject profiles nested with time-varying measurement
//! states, fit by Gibbs sampling.

pub mod cli;
pub mod config;
pub mod dist;
pub mod error;
pub mod figures;
pub mod io;
pub mod model;
pub mod sampler;
pub mod simulator;
pub mod summaries;
pub mod tensor;

pub use config::{Hyperparameters, LikelihoodFamily, RunConfig};
pub use error::{Error, Result};
pub use model::ModelState;
pub use sampler::{
    run_chain, run_chain_from, run_chains, run_chains_from, InitStyle, SampleChain, SamplerVariant,
};
pub use simulator::{simulate_scenario, GroundTruth, Scenario};
pub use summaries::{EvaluationMetrics, Partition, SummaryReport};
pub use tensor::{apply_mode, DataTensor, Mode, SliceContext};
