//! Log-density helpers and numerically stable categorical sampling.

use rand::Rng;
use rand_distr::{Distribution, Gamma as GammaDist};
use statrs::function::gamma::ln_gamma;

pub const LN_2PI: f64 = 1.8378770664093453;

/// log Normal(y | mu, var).
#[inline]
pub fn log_normal_pdf(y: f64, mu: f64, var: f64) -> f64 {
    let d = y - mu;
    -0.5 * (LN_2PI + var.ln()) - 0.5 * d * d / var
}

/// log Gamma(x | shape, rate).
pub fn log_gamma_pdf(x: f64, shape: f64, rate: f64) -> f64 {
    shape * rate.ln() - ln_gamma(shape) + (shape - 1.0) * x.ln() - rate * x
}

/// log Inv-Gamma(x | shape, rate).
pub fn log_inv_gamma_pdf(x: f64, shape: f64, rate: f64) -> f64 {
    shape * rate.ln() - ln_gamma(shape) - (shape + 1.0) * x.ln() - rate / x
}

/// log Beta(x | a, b).
pub fn log_beta_pdf(x: f64, a: f64, b: f64) -> f64 {
    ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + (a - 1.0) * x.ln() + (b - 1.0) * (1.0 - x).ln()
}

/// log Dirichlet(x | alpha), alpha and x of equal length.
pub fn log_dirichlet_pdf(x: &[f64], alpha: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), alpha.len());
    let mut out = ln_gamma(alpha.iter().sum());
    for (&xi, &ai) in x.iter().zip(alpha) {
        out += (ai - 1.0) * xi.ln() - ln_gamma(ai);
    }
    out
}

/// Marginal likelihood of counts under a symmetric Dirichlet with total
/// concentration `conc` spread over `counts.len()` components
/// (Dirichlet-multinomial, order statistics dropped).
pub fn symmetric_dirichlet_log_marginal(counts: &[usize], conc: f64) -> f64 {
    let j = counts.len() as f64;
    let total: usize = counts.iter().sum();
    let per = conc / j;
    let mut out = ln_gamma(conc) - ln_gamma(total as f64 + conc);
    for &n in counts {
        out += ln_gamma(n as f64 + per) - ln_gamma(per);
    }
    out
}

/// log(sum(exp(w))) over finite-or-neg-infinite weights.
pub fn log_sum_exp(w: &[f64]) -> f64 {
    let m = w.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    m + w.iter().map(|&x| (x - m).exp()).sum::<f64>().ln()
}

#[inline]
pub fn log_sum_exp2(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY && b == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// Draws an index from unnormalized log weights. Returns None when every
/// weight is -inf.
pub fn sample_log_weights<R: Rng + ?Sized>(rng: &mut R, logw: &[f64]) -> Option<usize> {
    let m = logw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY || m.is_nan() {
        return None;
    }
    let mut total = 0.0;
    let mut probs = Vec::with_capacity(logw.len());
    for &w in logw {
        let p = (w - m).exp();
        total += p;
        probs.push(p);
    }
    let u: f64 = rng.random::<f64>() * total;
    let mut acc = 0.0;
    for (idx, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return Some(idx);
        }
    }
    Some(logw.len() - 1)
}

/// Draws an index proportional to non-negative weights.
pub fn sample_weights<R: Rng + ?Sized>(rng: &mut R, w: &[f64]) -> Option<usize> {
    let total: f64 = w.iter().sum();
    if !(total > 0.0) || !total.is_finite() {
        return None;
    }
    let u: f64 = rng.random::<f64>() * total;
    let mut acc = 0.0;
    for (idx, &p) in w.iter().enumerate() {
        acc += p;
        if u < acc {
            return Some(idx);
        }
    }
    Some(w.len() - 1)
}

/// Dirichlet draw via normalized Gammas; components floored away from zero
/// so downstream log densities stay finite.
pub fn sample_dirichlet<R: Rng + ?Sized>(rng: &mut R, alpha: &[f64]) -> Vec<f64> {
    let mut draws: Vec<f64> = alpha
        .iter()
        .map(|&a| {
            let g = GammaDist::new(a, 1.0).expect("positive shape").sample(rng);
            g.max(f64::MIN_POSITIVE)
        })
        .collect();
    let total: f64 = draws.iter().sum();
    for d in &mut draws {
        *d /= total;
        *d = d.max(f64::MIN_POSITIVE);
    }
    draws
}

/// Gamma(shape, rate) draw.
pub fn sample_gamma<R: Rng + ?Sized>(rng: &mut R, shape: f64, rate: f64) -> f64 {
    GammaDist::new(shape, 1.0 / rate)
        .expect("positive shape and rate")
        .sample(rng)
}

/// Inv-Gamma(shape, rate) draw.
pub fn sample_inv_gamma<R: Rng + ?Sized>(rng: &mut R, shape: f64, rate: f64) -> f64 {
    rate / GammaDist::new(shape, 1.0).expect("positive shape").sample(rng).max(f64::MIN_POSITIVE)
}

/// Scaled inverse chi-squared draw: Inv-Chi2(df, scale) = Inv-Gamma(df/2, df*scale/2).
pub fn sample_scaled_inv_chi_sq<R: Rng + ?Sized>(rng: &mut R, df: f64, scale: f64) -> f64 {
    sample_inv_gamma(rng, df / 2.0, df * scale / 2.0)
}

/// log density of the scaled inverse chi-squared distribution.
pub fn log_scaled_inv_chi_sq_pdf(x: f64, df: f64, scale: f64) -> f64 {
    log_inv_gamma_pdf(x, df / 2.0, df * scale / 2.0)
}

pub fn sample_beta<R: Rng + ?Sized>(rng: &mut R, a: f64, b: f64) -> f64 {
    rand_distr::Beta::new(a, b).expect("positive parameters").sample(rng)
}

pub fn sample_normal<R: Rng + ?Sized>(rng: &mut R, mean: f64, var: f64) -> f64 {
    rand_distr::Normal::new(mean, var.sqrt())
        .expect("finite parameters")
        .sample(rng)
}
