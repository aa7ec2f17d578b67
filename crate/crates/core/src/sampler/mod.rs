//! Posterior Gibbs samplers for the EW and SB models, posterior density
//! summaries and the allocation diagnostics used alongside them.

mod ew;
mod sb;
mod sigma;
mod summary;

pub use ew::{ew_conditional_log_weights, ew_gibbs_step, EwSampler, EwState};
pub use sb::{
    sample_dirichlet, sb_gibbs_step, sb_theta_conditional_log_weights, SbSampler, SbState,
};
pub use sigma::{make_sigma_prior, SigmaPrior, DEFAULT_GRID_SIZE};
pub use summary::{posterior_density_summary, ChainDraws, DensityAccumulator, PosteriorSummary};

use rand::Rng;

use crate::error::{domain, Error, Result};
use crate::math::log_sum_exp;
use crate::model::BasePrior;

/// Posterior mean and sd of an atom given `n` observations with mean `ybar`,
/// Gaussian likelihood of scale `sigma` and prior G₀. With `n = 0` this is G₀.
pub(crate) fn conjugate_posterior(bp: &BasePrior, n: usize, ybar: f64, sigma: f64) -> (f64, f64) {
    let prior_prec = 1.0 / (bp.sigma0() * bp.sigma0());
    let data_prec = n as f64 / (sigma * sigma);
    let prec = prior_prec + data_prec;
    let mean = (bp.mu0() * prior_prec + ybar * data_prec) / prec;
    (mean, prec.sqrt().recip())
}

/// Draws an index with probability proportional to `exp(logw)`.
pub(crate) fn sample_log_categorical<R: Rng + ?Sized>(logw: &[f64], rng: &mut R) -> usize {
    let lse = log_sum_exp(logw);
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, &w) in logw.iter().enumerate() {
        acc += (w - lse).exp();
        if u < acc {
            return i;
        }
    }
    // rounding left a sliver above the last cumulative value
    logw.iter()
        .rposition(|w| *w > f64::NEG_INFINITY)
        .unwrap_or(logw.len() - 1)
}

/// Splits the MLE sample variance into the pooled within-group part and the
/// between-group part for allocation `z`.
pub fn pooled_within_variance(data: &[f64], z: &[usize]) -> Result<(f64, f64)> {
    if data.is_empty() {
        return Err(domain("pooled variance of empty data"));
    }
    if data.len() != z.len() {
        return Err(Error::Shape(format!(
            "{} observations but {} allocations",
            data.len(),
            z.len()
        )));
    }
    let m = z.iter().copied().max().unwrap_or(0) + 1;
    let n = data.len() as f64;
    let mut count = vec![0usize; m];
    let mut sum = vec![0.0; m];
    for (&y, &j) in data.iter().zip(z) {
        count[j] += 1;
        sum[j] += y;
    }
    let grand = data.iter().sum::<f64>() / n;
    let means: Vec<f64> = sum
        .iter()
        .zip(&count)
        .map(|(&s, &c)| if c > 0 { s / c as f64 } else { 0.0 })
        .collect();
    let within = data
        .iter()
        .zip(z)
        .map(|(&y, &j)| (y - means[j]) * (y - means[j]))
        .sum::<f64>()
        / n;
    let between = means
        .iter()
        .zip(&count)
        .map(|(&mj, &c)| c as f64 * (mj - grand) * (mj - grand))
        .sum::<f64>()
        / n;
    Ok((within, between))
}

/// Fraction of SB draws in which at least one of the `m` components is empty.
pub fn empty_component_frequency(chain: &[SbState], m: usize) -> f64 {
    if chain.is_empty() {
        return 0.0;
    }
    let empties = chain
        .iter()
        .filter(|s| {
            let mut c = vec![0usize; m];
            for &j in &s.z {
                if j < m {
                    c[j] += 1;
                }
            }
            c.contains(&0)
        })
        .count();
    empties as f64 / chain.len() as f64
}
