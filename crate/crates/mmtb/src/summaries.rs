//! Posterior summaries: partition point estimates under Binder loss,
//! co-clustering, profile location sequences, changepoint probabilities, and
//! the evaluation metrics computed against a known ground truth.

use ndarray::{Array2, Array3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelState;
use crate::sampler::SampleChain;

/// A clustering of `n` items, compared up to label permutation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    labels: Vec<usize>,
}

impl Partition {
    pub fn new(labels: Vec<usize>) -> Self {
        Partition { labels }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Labels renumbered by first occurrence: the canonical representative of
    /// the equivalence class under label permutation.
    pub fn canonical_labels(&self) -> Vec<usize> {
        let mut map = std::collections::HashMap::new();
        self.labels
            .iter()
            .map(|&l| {
                let next = map.len();
                *map.entry(l).or_insert(next)
            })
            .collect()
    }

    pub fn same_clustering(&self, other: &Partition) -> bool {
        self.len() == other.len() && self.canonical_labels() == other.canonical_labels()
    }

    pub fn n_clusters(&self) -> usize {
        let canon = self.canonical_labels();
        canon.iter().max().map_or(0, |&m| m + 1)
    }
}

/// Binder loss between the truth and an estimate: pair disagreements,
/// weighted `a` for split pairs (together in truth, apart in the estimate)
/// and `b` for merged pairs.
pub fn binder_loss(truth: &Partition, estimate: &Partition, a: f64, b: f64) -> Result<f64> {
    if truth.len() != estimate.len() {
        return Err(Error::LengthMismatch {
            left: truth.len(),
            right: estimate.len(),
        });
    }
    let n = truth.len();
    let mut loss = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let together_truth = truth.labels[i] == truth.labels[j];
            let together_est = estimate.labels[i] == estimate.labels[j];
            match (together_truth, together_est) {
                (true, false) => loss += a,
                (false, true) => loss += b,
                _ => {}
            }
        }
    }
    Ok(loss)
}

/// Binder loss with unit weights divided by the pair count, in [0, 1]. This
/// is the form reported in all evaluations.
pub fn normalized_binder_loss(truth: &Partition, estimate: &Partition) -> Result<f64> {
    let n = truth.len();
    if n < 2 {
        binder_loss(truth, estimate, 1.0, 1.0)?;
        return Ok(0.0);
    }
    Ok(binder_loss(truth, estimate, 1.0, 1.0)? / (n * (n - 1) / 2) as f64)
}

/// Posterior co-clustering probabilities: entry (i, j) is the fraction of
/// draws in which items i and j share a cluster.
pub fn coclustering_matrix(draws: &[Partition]) -> Result<Array2<f64>> {
    let first = draws.first().ok_or(Error::EmptyDraws)?;
    let n = first.len();
    let mut p = Array2::zeros((n, n));
    for draw in draws {
        if draw.len() != n {
            return Err(Error::LengthMismatch {
                left: n,
                right: draw.len(),
            });
        }
        for i in 0..n {
            for j in 0..n {
                if draw.labels[i] == draw.labels[j] {
                    p[[i, j]] += 1.0;
                }
            }
        }
    }
    p /= draws.len() as f64;
    Ok(p)
}

/// Expected Binder loss of a labeling under co-clustering probabilities `p`:
/// sum over pairs of b(1 - p_ij) if co-clustered, else a p_ij.
fn expected_binder(labels: &[usize], p: &Array2<f64>, a: f64, b: f64) -> f64 {
    let n = labels.len();
    let mut total = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            if labels[i] == labels[j] {
                total += b * (1.0 - p[[i, j]]);
            } else {
                total += a * p[[i, j]];
            }
        }
    }
    total
}

/// One greedy pass: each item in turn moves to the cluster (or a new one,
/// subject to the label cap) minimizing its contribution. Repeats until a
/// full pass makes no move.
fn greedy_sweep(
    labels: &mut [usize],
    p: &Array2<f64>,
    a: f64,
    b: f64,
    max_labels: Option<usize>,
) {
    let n = labels.len();
    loop {
        let mut moved = false;
        for i in 0..n {
            let max_label = *labels.iter().max().unwrap();
            // Cost of item i joining cluster g, relative to the constant
            // sum_j a p_ij of sitting alone: sum over members j != i of
            // b(1 - p_ij) - a p_ij. An empty (new) cluster costs 0.
            let mut cost = vec![0.0; max_label + 2];
            let mut occupancy = vec![0usize; max_label + 2];
            for j in 0..n {
                if j != i {
                    cost[labels[j]] += b * (1.0 - p[[i, j]]) - a * p[[i, j]];
                    occupancy[labels[j]] += 1;
                }
            }
            let n_clusters = occupancy.iter().filter(|&&o| o > 0).count();
            let at_cap = max_labels.is_some_and(|m| n_clusters >= m);
            let best = (0..cost.len())
                .filter(|&g| occupancy[g] > 0 || !at_cap)
                .min_by(|&x, &y| cost[x].partial_cmp(&cost[y]).unwrap())
                .unwrap_or(labels[i]);
            if cost[best] < cost[labels[i]] - 1e-12 {
                labels[i] = best;
                moved = true;
            }
        }
        if !moved {
            return;
        }
    }
}

/// Point-estimate partition minimizing the posterior expected Binder loss.
/// Greedy local search seeded from every draw plus `n_restarts` random
/// initializations; the best local optimum wins, so the result never scores
/// worse than the best draw.
pub fn minimize_expected_binder(
    draws: &[Partition],
    a: f64,
    b: f64,
    n_restarts: usize,
    max_labels: Option<usize>,
    seed: u64,
) -> Result<Partition> {
    let p = coclustering_matrix(draws)?;
    let n = draws[0].len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut starts: Vec<Vec<usize>> = draws
        .iter()
        .map(|d| {
            let mut labels = d.canonical_labels();
            if let Some(m) = max_labels {
                // Fold a start that exceeds the cap back under it.
                for l in labels.iter_mut() {
                    *l %= m;
                }
            }
            labels
        })
        .collect();
    for restart in 0..n_restarts {
        let k = match max_labels {
            Some(m) => (restart % n + 1).min(m),
            None => restart % n + 1,
        };
        starts.push((0..n).map(|_| rng.random_range(0..k)).collect());
    }

    let mut best: Option<(f64, Vec<usize>)> = None;
    for mut labels in starts {
        greedy_sweep(&mut labels, &p, a, b, max_labels);
        let score = expected_binder(&labels, &p, a, b);
        if best.as_ref().is_none_or(|(s, _)| score < *s - 1e-12) {
            best = Some((score, labels));
        }
    }
    Ok(Partition::new(best.unwrap().1))
}

/// Subject partitions, one per retained draw, pooled across chains.
pub fn subject_partition_draws(chains: &[SampleChain]) -> Vec<Partition> {
    chains
        .iter()
        .flat_map(|c| c.draws.iter().map(|d| Partition::new(d.state.s.clone())))
        .collect()
}

const BINDER_RESTARTS: usize = 16;

/// Subject partition point estimate under expected Binder loss (a = b = 1).
pub fn estimate_subject_partition(chains: &[SampleChain], seed: u64) -> Result<Partition> {
    minimize_expected_binder(
        &subject_partition_draws(chains),
        1.0,
        1.0,
        BINDER_RESTARTS,
        None,
        seed,
    )
}

fn pooled_states(chains: &[SampleChain]) -> Result<Vec<&ModelState>> {
    let states: Vec<&ModelState> = chains
        .iter()
        .flat_map(|c| c.draws.iter().map(|d| &d.state))
        .collect();
    if states.is_empty() {
        return Err(Error::EmptyDraws);
    }
    Ok(states)
}

fn data_dims(state: &ModelState) -> (usize, usize, usize) {
    let (_, nr, nt) = state.c.dim();
    (state.s.len(), nr, nt)
}

/// Subjects belonging to each estimated profile; errors on an empty one.
fn profile_members(estimated: &Partition) -> Result<Vec<Vec<usize>>> {
    let labels = estimated.canonical_labels();
    let n_profiles = labels.iter().max().map_or(0, |&m| m + 1);
    let mut members = vec![Vec::new(); n_profiles];
    for (i, &p) in labels.iter().enumerate() {
        members[p].push(i);
    }
    for (p, m) in members.iter().enumerate() {
        if m.is_empty() {
            return Err(Error::EmptyProfile { profile: p });
        }
    }
    Ok(members)
}

/// Per estimated profile, the R x T average of the fitted state location
/// mu_{c^{(s_i)}_{r,t}} over draws and over the profile's subjects; each
/// draw contributes its own sampled assignments.
pub fn profile_location_sequences(
    chains: &[SampleChain],
    estimated: &Partition,
) -> Result<Vec<Array2<f64>>> {
    let states = pooled_states(chains)?;
    let (n, nr, nt) = data_dims(states[0]);
    if estimated.len() != n {
        return Err(Error::LengthMismatch {
            left: estimated.len(),
            right: n,
        });
    }
    let members = profile_members(estimated)?;
    let mut out = Vec::with_capacity(members.len());
    for subjects in &members {
        let mut m = Array2::zeros((nr, nt));
        for state in &states {
            for &i in subjects {
                let z = state.s[i];
                for r in 0..nr {
                    for t in 0..nt {
                        m[[r, t]] += state.theta.mu[state.c[[z, r, t]]];
                    }
                }
            }
        }
        m /= (states.len() * subjects.len()) as f64;
        out.push(m);
    }
    Ok(out)
}

/// Per estimated profile, the R x T posterior probability of a fresh state
/// draw (1 - gamma averaged over draws and the profile's subjects). The
/// first time step is a fresh draw by construction, so column 1 is
/// identically 1.
pub fn changepoint_probabilities(
    chains: &[SampleChain],
    estimated: &Partition,
) -> Result<Vec<Array2<f64>>> {
    let states = pooled_states(chains)?;
    let (n, nr, nt) = data_dims(states[0]);
    if estimated.len() != n {
        return Err(Error::LengthMismatch {
            left: estimated.len(),
            right: n,
        });
    }
    let members = profile_members(estimated)?;
    let mut out = Vec::with_capacity(members.len());
    for subjects in &members {
        let mut m = Array2::zeros((nr, nt));
        for state in &states {
            for &i in subjects {
                let z = state.s[i];
                for r in 0..nr {
                    for t in 0..nt {
                        m[[r, t]] += 1.0 - state.gamma[[z, r, t]] as f64;
                    }
                }
            }
        }
        m /= (states.len() * subjects.len()) as f64;
        out.push(m);
    }
    Ok(out)
}

/// Per-subject changepoint probabilities (each draw contributes its own
/// profile assignment), used for subject-level evaluation.
pub fn subject_changepoint_probabilities(chains: &[SampleChain]) -> Result<Array3<f64>> {
    let states = pooled_states(chains)?;
    let (n, nr, nt) = data_dims(states[0]);
    let mut out = Array3::zeros((n, nr, nt));
    for state in &states {
        for i in 0..n {
            let z = state.s[i];
            for r in 0..nr {
                for t in 0..nt {
                    out[[i, r, t]] += 1.0 - state.gamma[[z, r, t]] as f64;
                }
            }
        }
    }
    out /= states.len() as f64;
    Ok(out)
}

/// F-measure of thresholded changepoint predictions against the true binary
/// changepoint matrix (1 = freshly resampled), over t >= 2; the first step
/// is a changepoint by construction and is excluded. Returns 0 when
/// precision + recall is 0.
pub fn f_measure_changepoints(
    probabilities: &Array2<f64>,
    true_changepoints: &Array2<u8>,
    threshold: f64,
) -> Result<f64> {
    if probabilities.dim() != true_changepoints.dim() {
        return Err(Error::ShapeMismatch {
            context: format!(
                "changepoint probabilities {:?} vs truth {:?}",
                probabilities.dim(),
                true_changepoints.dim()
            ),
        });
    }
    let (nr, nt) = probabilities.dim();
    let (mut tp, mut fp, mut fne) = (0usize, 0usize, 0usize);
    for r in 0..nr {
        for t in 1..nt {
            let predicted = probabilities[[r, t]] > threshold;
            let actual = true_changepoints[[r, t]] == 1;
            match (predicted, actual) {
                (true, true) => tp += 1,
                (true, false) => fp += 1,
                (false, true) => fne += 1,
                (false, false) => {}
            }
        }
    }
    if tp == 0 {
        return Ok(0.0);
    }
    let precision = tp as f64 / (tp + fp) as f64;
    let recall = tp as f64 / (tp + fne) as f64;
    Ok(2.0 * precision * recall / (precision + recall))
}

/// Mean absolute error between fitted and true cell locations, averaged over
/// draws, subjects, measurements and time: each draw contributes
/// |mu_{c^{(s_i)}_{r,t}} - true mean|.
pub fn mae_locations(chains: &[SampleChain], true_means: &Array3<f64>) -> Result<f64> {
    let states = pooled_states(chains)?;
    let (n, nr, nt) = data_dims(states[0]);
    if true_means.dim() != (n, nr, nt) {
        return Err(Error::ShapeMismatch {
            context: format!("true means {:?} vs fit ({n}, {nr}, {nt})", true_means.dim()),
        });
    }
    let mut total = 0.0;
    for state in &states {
        for i in 0..n {
            let z = state.s[i];
            for r in 0..nr {
                for t in 0..nt {
                    total +=
                        (state.theta.mu[state.c[[z, r, t]]] - true_means[[i, r, t]]).abs();
                }
            }
        }
    }
    Ok(total / (states.len() * n * nr * nt) as f64)
}

/// Normalized Binder loss (a = b = 1) between the draw-implied measurement
/// partition and the true one, averaged over draws, subjects and time steps.
pub fn measurement_partition_bl(chains: &[SampleChain], true_c: &Array3<usize>) -> Result<f64> {
    let states = pooled_states(chains)?;
    let (n, nr, nt) = data_dims(states[0]);
    if true_c.dim() != (n, nr, nt) {
        return Err(Error::ShapeMismatch {
            context: format!("true states {:?} vs fit ({n}, {nr}, {nt})", true_c.dim()),
        });
    }
    let mut total = 0.0;
    for state in &states {
        for i in 0..n {
            let z = state.s[i];
            for t in 0..nt {
                let draw = Partition::new((0..nr).map(|r| state.c[[z, r, t]]).collect());
                let truth = Partition::new((0..nr).map(|r| true_c[[i, r, t]]).collect());
                total += normalized_binder_loss(&truth, &draw)?;
            }
        }
    }
    Ok(total / (states.len() * n * nt) as f64)
}

/// The full posterior summary written by the CLI.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SummaryReport {
    pub subject_partition: Partition,
    pub coclustering: Array2<f64>,
    /// Per estimated profile, R x T posterior mean locations.
    pub profile_location_sequences: Vec<Array2<f64>>,
    /// Per estimated profile, R x T fresh-draw probabilities.
    pub changepoint_probabilities: Vec<Array2<f64>>,
    pub mean_log_posterior: f64,
    pub n_draws: usize,
}

pub fn summarize(chains: &[SampleChain], seed: u64) -> Result<SummaryReport> {
    let draws = subject_partition_draws(chains);
    let subject_partition =
        minimize_expected_binder(&draws, 1.0, 1.0, BINDER_RESTARTS, None, seed)?;
    let coclustering = coclustering_matrix(&draws)?;
    let n_draws = draws.len();
    let mean_log_posterior = chains
        .iter()
        .flat_map(|c| c.draws.iter().map(|d| d.log_posterior))
        .sum::<f64>()
        / n_draws as f64;
    Ok(SummaryReport {
        profile_location_sequences: profile_location_sequences(chains, &subject_partition)?,
        changepoint_probabilities: changepoint_probabilities(chains, &subject_partition)?,
        subject_partition,
        coclustering,
        mean_log_posterior,
        n_draws,
    })
}

/// Metrics against a known ground truth.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvaluationMetrics {
    /// Normalized Binder loss of the subject partition point estimate.
    pub subject_bl: f64,
    /// Normalized Binder loss of the measurement partitions, averaged over
    /// draws, subjects and time steps.
    pub measurement_bl: f64,
    /// Mean absolute error of the fitted cell locations over draws.
    pub mae: f64,
    /// Changepoint detection F-measure at threshold 0.5, averaged over
    /// subjects.
    pub f_measure: f64,
}

pub fn evaluate(
    chains: &[SampleChain],
    truth: &crate::simulator::GroundTruth,
    seed: u64,
) -> Result<EvaluationMetrics> {
    let estimate = estimate_subject_partition(chains, seed)?;
    let subject_bl = normalized_binder_loss(&truth.subject_partition, &estimate)?;
    let measurement_bl = measurement_partition_bl(chains, &truth.true_c)?;
    let mae = mae_locations(chains, &truth.true_means)?;

    let probs = subject_changepoint_probabilities(chains)?;
    let (n, nr, nt) = probs.dim();
    let mut f_total = 0.0;
    for i in 0..n {
        let subject_probs = probs.index_axis(ndarray::Axis(0), i).to_owned();
        let mut true_cp = Array2::zeros((nr, nt));
        for r in 0..nr {
            for t in 0..nt {
                true_cp[[r, t]] = 1 - truth.true_gamma[[i, r, t]];
            }
        }
        f_total += f_measure_changepoints(&subject_probs, &true_cp, 0.5)?;
    }
    Ok(EvaluationMetrics {
        subject_bl,
        measurement_bl,
        mae,
        f_measure: f_total / n as f64,
    })
}
