//! Blocked update of one (profile, measurement) state/persistence sequence:
//! backward message recursion plus a forward simulation pass.

use ndarray::Array2;
use rand::Rng;

use crate::dist::{log_sum_exp2, sample_log_weights};
use crate::error::{Error, Result};

/// Backward messages in log space for a K x T log-likelihood matrix.
///
/// Column T-1 is all zeros (unit messages); earlier columns follow the
/// persistence-or-resample recursion. Every column is rescaled to max 0,
/// which removes a per-column constant shared by all states.
pub fn backward_messages(logl: &Array2<f64>, omega: &[f64], a: &[f64]) -> Array2<f64> {
    let (n_states, n_times) = logl.dim();
    let mut msg = Array2::zeros((n_states, n_times));
    let log_omega: Vec<f64> = omega.iter().map(|w| w.ln()).collect();
    for t in (0..n_times.saturating_sub(1)).rev() {
        let a_next = a[t + 1];
        let log_stay = a_next.ln();
        let log_move = (1.0 - a_next).ln();

        // Shared resample branch: marginalize the next state over omega.
        let mut terms = Vec::with_capacity(n_states);
        for h in 0..n_states {
            terms.push(log_omega[h] + logl[[h, t + 1]] + msg[[h, t + 1]]);
        }
        let resample = log_move + crate::dist::log_sum_exp(&terms);

        let mut col_max = f64::NEG_INFINITY;
        for k in 0..n_states {
            let stay = log_stay + logl[[k, t + 1]] + msg[[k, t + 1]];
            let m = log_sum_exp2(stay, resample);
            msg[[k, t]] = m;
            col_max = col_max.max(m);
        }
        if col_max.is_finite() {
            for k in 0..n_states {
                msg[[k, t]] -= col_max;
            }
        }
    }
    msg
}

/// One blocked draw of a full (c, gamma) sequence. Degenerate weight vectors
/// fall back to the prior weights; the returned count reports how often.
pub struct BlockedDraw {
    pub c: Vec<usize>,
    pub gamma: Vec<u8>,
    pub prior_fallbacks: usize,
}

pub fn blocked_update_state_sequence<R: Rng + ?Sized>(
    logl: &Array2<f64>,
    messages: &Array2<f64>,
    omega: &[f64],
    a: &[f64],
    rng: &mut R,
) -> Result<BlockedDraw> {
    let (n_states, n_times) = logl.dim();
    let log_omega: Vec<f64> = omega.iter().map(|w| w.ln()).collect();
    let mut c = vec![0usize; n_times];
    let mut gamma = vec![0u8; n_times];
    let mut prior_fallbacks = 0usize;

    // First time step: always a fresh draw.
    let mut logw: Vec<f64> = (0..n_states)
        .map(|k| log_omega[k] + logl[[k, 0]] + messages[[k, 0]])
        .collect();
    c[0] = match sample_log_weights(rng, &logw) {
        Some(k) => k,
        None => {
            prior_fallbacks += 1;
            sample_log_weights(rng, &log_omega).ok_or_else(|| Error::DegenerateWeights {
                context: "blocked update, first time step".into(),
            })?
        }
    };

    // Forward pass: K resample branches plus the stay branch.
    logw.resize(n_states + 1, 0.0);
    for t in 1..n_times {
        let log_stay = a[t].ln();
        let log_move = (1.0 - a[t]).ln();
        let prev = c[t - 1];
        for (h, w) in logw.iter_mut().take(n_states).enumerate() {
            *w = log_move + log_omega[h] + logl[[h, t]] + messages[[h, t]];
        }
        logw[n_states] = log_stay + logl[[prev, t]] + messages[[prev, t]];
        let pick = match sample_log_weights(rng, &logw) {
            Some(idx) => idx,
            None => {
                prior_fallbacks += 1;
                let mut prior: Vec<f64> =
                    (0..n_states).map(|h| log_move + log_omega[h]).collect();
                prior.push(log_stay);
                sample_log_weights(rng, &prior).ok_or_else(|| Error::DegenerateWeights {
                    context: format!("blocked update, time {t}"),
                })?
            }
        };
        if pick == n_states {
            gamma[t] = 1;
            c[t] = prev;
        } else {
            gamma[t] = 0;
            c[t] = pick;
        }
    }
    Ok(BlockedDraw {
        c,
        gamma,
        prior_fallbacks,
    })
}
