//! Synthetic benchmark scenarios with full ground truth.

use ndarray::Array3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dist;
use crate::summaries::Partition;
use crate::tensor::DataTensor;

pub const N_SUBJECTS: usize = 6;
pub const N_MEASUREMENTS: usize = 5;
pub const N_TIMESTEPS: usize = 30;
pub const N_TRUE_STATES: usize = 10;

/// Benchmark scenario: dependence in time, across subjects, or both.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    TimeDep,
    SubjectDep,
    Both,
}

impl std::str::FromStr for Scenario {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "time_dep" | "time" => Ok(Scenario::TimeDep),
            "subject_dep" | "subject" => Ok(Scenario::SubjectDep),
            "both" => Ok(Scenario::Both),
            other => Err(format!("unknown scenario `{other}`")),
        }
    }
}

impl Scenario {
    pub fn name(&self) -> &'static str {
        match self {
            Scenario::TimeDep => "time_dep",
            Scenario::SubjectDep => "subject_dep",
            Scenario::Both => "both",
        }
    }
}

/// Everything the generator knows: the subject partition, per-subject state
/// and persistence sequences, cell means, and the state parameter table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub subject_partition: Partition,
    /// N x R x T state labels.
    pub true_c: Array3<usize>,
    /// N x R x T persistence events (1 = persisted).
    pub true_gamma: Array3<u8>,
    /// N x R x T cell means.
    pub true_means: Array3<f64>,
    pub state_means: Vec<f64>,
    pub state_sds: Vec<f64>,
}

fn induced_partition(states: &[usize]) -> Vec<usize> {
    Partition::new(states.iter().map(|&s| s).collect()).canonical_labels()
}

/// One profile's R x T state sequence.
///
/// At ordinary resample epochs each current cluster of measurements jointly
/// redraws a fresh state, distinct across clusters, so the induced partition
/// is preserved. At partition-change epochs every measurement redraws
/// independently, rejecting draws that leave the partition unchanged.
fn simulate_profile_sequence(
    resample_epochs: &[bool],
    change_epochs: &[bool],
    force_change: bool,
    rng: &mut ChaCha8Rng,
) -> (Vec<Vec<usize>>, Vec<Vec<u8>>) {
    let (r_max, t_max) = (N_MEASUREMENTS, N_TIMESTEPS);
    let mut c = vec![vec![0usize; t_max]; r_max];
    let mut gamma = vec![vec![0u8; t_max]; r_max];
    let mut current = vec![0usize; r_max];
    for t in 0..t_max {
        if t == 0 || change_epochs[t] {
            let prev_partition = induced_partition(&current);
            loop {
                for state in current.iter_mut() {
                    *state = rng.random_range(0..N_TRUE_STATES);
                }
                if t == 0 || !force_change || induced_partition(&current) != prev_partition {
                    break;
                }
            }
        } else if resample_epochs[t] {
            // Cluster labels ordered by first occurrence.
            let mut cluster_of = vec![usize::MAX; N_TRUE_STATES];
            let mut n_clusters = 0usize;
            let assignment: Vec<usize> = current
                .iter()
                .map(|&s| {
                    if cluster_of[s] == usize::MAX {
                        cluster_of[s] = n_clusters;
                        n_clusters += 1;
                    }
                    cluster_of[s]
                })
                .collect();
            // Distinct fresh states via a partial shuffle.
            let mut pool: Vec<usize> = (0..N_TRUE_STATES).collect();
            for j in 0..n_clusters {
                let pick = rng.random_range(j..N_TRUE_STATES);
                pool.swap(j, pick);
            }
            for (r, &cluster) in assignment.iter().enumerate() {
                current[r] = pool[cluster];
            }
        }
        let fresh = t == 0 || resample_epochs[t] || change_epochs[t];
        for r in 0..r_max {
            c[r][t] = current[r];
            gamma[r][t] = if fresh { 0 } else { 1 };
        }
    }
    (c, gamma)
}

/// Nearest resample epoch to a nominal (0-based) position.
fn nearest_epoch(resample_epochs: &[bool], nominal: usize) -> usize {
    (0..resample_epochs.len())
        .filter(|&t| t > 0 && resample_epochs[t])
        .min_by_key(|&t| t.abs_diff(nominal))
        .expect("at least one later epoch")
}

/// Generates one replicate of a scenario: N=6, R=5, T=30 observations from
/// 10 Normal states with means -9, -7, ..., 9 and alternating sds 1.5, 1.25.
pub fn simulate_scenario(scenario: Scenario, seed: u64) -> (DataTensor, GroundTruth) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let state_means: Vec<f64> = (0..N_TRUE_STATES).map(|k| -9.0 + 2.0 * k as f64).collect();
    let state_sds: Vec<f64> = (0..N_TRUE_STATES)
        .map(|k| if k % 2 == 0 { 1.5 } else { 1.25 })
        .collect();

    let t_max = N_TIMESTEPS;
    let mut resample_epochs = vec![false; t_max];
    let mut change_epochs = vec![false; t_max];
    let force_change;
    match scenario {
        Scenario::TimeDep => {
            // States persist for 5 steps: fresh draws at t = 6, 11, ... (1-based).
            for t in (5..t_max).step_by(5) {
                resample_epochs[t] = true;
            }
            // One partition change, at the epoch nearest T/2.
            change_epochs[nearest_epoch(&resample_epochs, t_max / 2)] = true;
            force_change = true;
        }
        Scenario::SubjectDep => {
            for t in 1..t_max {
                change_epochs[t] = true;
            }
            force_change = false;
        }
        Scenario::Both => {
            for t in (3..t_max).step_by(3) {
                resample_epochs[t] = true;
            }
            change_epochs[nearest_epoch(&resample_epochs, t_max / 3)] = true;
            change_epochs[nearest_epoch(&resample_epochs, 2 * t_max / 3)] = true;
            force_change = true;
        }
    }

    let subject_profiles: Vec<usize> = match scenario {
        Scenario::TimeDep => (0..N_SUBJECTS).collect(),
        Scenario::SubjectDep | Scenario::Both => vec![0, 0, 0, 0, 1, 1],
    };
    let n_profiles = subject_profiles.iter().max().unwrap() + 1;

    let mut profile_c = Vec::with_capacity(n_profiles);
    let mut profile_gamma = Vec::with_capacity(n_profiles);
    for _ in 0..n_profiles {
        let (c, g) =
            simulate_profile_sequence(&resample_epochs, &change_epochs, force_change, &mut rng);
        profile_c.push(c);
        profile_gamma.push(g);
    }

    let mut true_c = Array3::zeros((N_SUBJECTS, N_MEASUREMENTS, t_max));
    let mut true_gamma = Array3::zeros((N_SUBJECTS, N_MEASUREMENTS, t_max));
    let mut true_means = Array3::zeros((N_SUBJECTS, N_MEASUREMENTS, t_max));
    let mut values = Array3::zeros((N_SUBJECTS, N_MEASUREMENTS, t_max));
    for i in 0..N_SUBJECTS {
        let p = subject_profiles[i];
        for r in 0..N_MEASUREMENTS {
            for t in 0..t_max {
                let k = profile_c[p][r][t];
                true_c[[i, r, t]] = k;
                true_gamma[[i, r, t]] = profile_gamma[p][r][t];
                true_means[[i, r, t]] = state_means[k];
                values[[i, r, t]] = dist::sample_normal(
                    &mut rng,
                    state_means[k],
                    state_sds[k] * state_sds[k],
                );
            }
        }
    }

    let truth = GroundTruth {
        subject_partition: Partition::new(subject_profiles),
        true_c,
        true_gamma,
        true_means,
        state_means,
        state_sds,
    };
    (DataTensor::new(values), truth)
}
