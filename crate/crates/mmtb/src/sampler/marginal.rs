//! Single-site (marginal) updates of state assignments and persistence
//! indicators, the baseline the blocked sampler is compared against.
//! A sweep makes two separate passes: every gamma_t given the assignments,
//! then every c_t with the indicators held fixed. A state change is only
//! considered when it is compatible with all current indicator values, so
//! a persisted run can only erode from a free end, one site per sweep —
//! the slow mixing the blocked sampler removes.

use ndarray::Array2;
use rand::Rng;

use crate::dist::sample_log_weights;
use crate::error::{Error, Result};

/// Resamples gamma_t from its full conditional given the assignments:
/// persistence is only admissible when the states agree, with prior odds
/// a_t : (1 - a_t) * omega_{c_t}; the likelihood does not depend on gamma.
pub fn marginal_update_gamma<R: Rng + ?Sized>(
    omega: &[f64],
    a: &[f64],
    c: &[usize],
    gamma: &mut [u8],
    t: usize,
    rng: &mut R,
) {
    if c[t] == c[t - 1] {
        let stay = a[t];
        let fresh = (1.0 - a[t]) * omega[c[t]];
        gamma[t] = u8::from(rng.random_range(0.0..1.0) * (stay + fresh) < stay);
    } else {
        gamma[t] = 0;
    }
}

/// Resamples c_t from its full conditional given the indicators: pinned by
/// gamma_t = 1 (to the predecessor) or by gamma_{t+1} = 1 (to the
/// successor); otherwise a categorical draw proportional to
/// omega_h * L_{h,t}.
pub fn marginal_update_state<R: Rng + ?Sized>(
    logl: &Array2<f64>,
    omega: &[f64],
    c: &mut [usize],
    gamma: &[u8],
    t: usize,
    rng: &mut R,
) -> Result<usize> {
    let n_states = logl.dim().0;
    let n_times = c.len();
    if t > 0 && gamma[t] == 1 {
        c[t] = c[t - 1];
        return Ok(0);
    }
    if t + 1 < n_times && gamma[t + 1] == 1 {
        c[t] = c[t + 1];
        return Ok(0);
    }
    let logw: Vec<f64> = (0..n_states)
        .map(|h| omega[h].ln() + logl[[h, t]])
        .collect();
    let mut fallbacks = 0usize;
    c[t] = match sample_log_weights(rng, &logw) {
        Some(h) => h,
        None => {
            fallbacks += 1;
            let prior: Vec<f64> = omega.iter().map(|w| w.ln()).collect();
            sample_log_weights(rng, &prior).ok_or_else(|| Error::DegenerateWeights {
                context: format!("marginal update, time {t}"),
            })?
        }
    };
    Ok(fallbacks)
}

/// One full sweep over a sequence: a pass over the persistence indicators,
/// then a pass over the state assignments with the indicators held fixed.
pub fn marginal_sweep<R: Rng + ?Sized>(
    logl: &Array2<f64>,
    omega: &[f64],
    a: &[f64],
    c: &mut [usize],
    gamma: &mut [u8],
    rng: &mut R,
) -> Result<usize> {
    for t in 1..c.len() {
        marginal_update_gamma(omega, a, c, gamma, t, rng);
    }
    let mut fallbacks = 0;
    for t in 0..c.len() {
        fallbacks += marginal_update_state(logl, omega, c, gamma, t, rng)?;
    }
    Ok(fallbacks)
}
