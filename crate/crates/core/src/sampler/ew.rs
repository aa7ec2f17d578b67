//! Marginal-conjugate Gibbs sampler for the EW model.
//!
//! Each `θᵢ` is drawn from its Polya-urn full conditional: a point mass on
//! every other atom weighted by `N(Yᵢ; θ_l, σ²)`, or a fresh draw from the
//! G₀-posterior given `Yᵢ` weighted by `α m(Yᵢ)`. Atoms that coincide are
//! handled as clusters with multiplicities, which is the same conditional.

use std::collections::HashMap;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::sigma::SigmaPrior;
use super::{conjugate_posterior, sample_log_categorical};
use crate::error::{domain, Error, Result};
use crate::math::normal_logpdf;
use crate::model::BasePrior;

#[derive(Debug, Clone, PartialEq)]
pub struct EwState {
    pub theta: Vec<f64>,
    pub sigma: f64,
}

impl EwState {
    pub fn new(theta: Vec<f64>, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) {
            return Err(domain(format!("sigma must be positive, got {sigma}")));
        }
        if theta.iter().any(|t| !t.is_finite()) {
            return Err(domain("atoms must be finite"));
        }
        Ok(Self { theta, sigma })
    }

    /// Starts every atom at its own observation.
    pub fn from_data(data: &[f64], sigma: f64) -> Result<Self> {
        Self::new(data.to_vec(), sigma)
    }
}

/// Fixed ingredients of an EW chain.
#[derive(Debug, Clone)]
pub struct EwSampler {
    pub alpha: f64,
    pub bp: BasePrior,
    /// `None` keeps σ at its current value.
    pub sigma_prior: Option<SigmaPrior>,
    /// Replaces every data likelihood by 1, leaving the urn prior alone.
    pub flat_likelihood: bool,
}

impl EwSampler {
    pub fn new(alpha: f64, bp: BasePrior, sigma_prior: Option<SigmaPrior>) -> Result<Self> {
        if !(alpha > 0.0) {
            return Err(domain(format!("alpha must be positive, got {alpha}")));
        }
        Ok(Self {
            alpha,
            bp,
            sigma_prior,
            flat_likelihood: false,
        })
    }

    /// One full sweep: every `θᵢ` in turn, then σ.
    pub fn step<R: Rng + ?Sized>(
        &self,
        state: &mut EwState,
        data: &[f64],
        rng: &mut R,
    ) -> Result<()> {
        let n = data.len();
        if state.theta.len() != n {
            return Err(Error::Shape(format!(
                "{} atoms for {} observations",
                state.theta.len(),
                n
            )));
        }
        let sigma = state.sigma;
        let ln_alpha = self.alpha.ln();
        let marginal_sd = sigma.hypot(self.bp.sigma0());

        let mut values: Vec<f64> = Vec::new();
        let mut counts: Vec<usize> = Vec::new();
        let mut assign: Vec<usize> = Vec::with_capacity(n);
        let mut index: HashMap<u64, usize> = HashMap::new();
        for &th in &state.theta {
            let c = *index.entry(th.to_bits()).or_insert_with(|| {
                values.push(th);
                counts.push(0);
                values.len() - 1
            });
            counts[c] += 1;
            assign.push(c);
        }
        drop(index);

        let mut logw: Vec<f64> = Vec::with_capacity(values.len() + 1);
        let mut slots: Vec<usize> = Vec::with_capacity(values.len() + 1);
        for i in 0..n {
            let y = data[i];
            if !y.is_finite() {
                return Err(Error::NonFinite { index: i });
            }
            counts[assign[i]] -= 1;
            logw.clear();
            slots.clear();
            for (c, (&v, &cnt)) in values.iter().zip(&counts).enumerate() {
                if cnt == 0 {
                    continue;
                }
                let ll = if self.flat_likelihood {
                    0.0
                } else {
                    normal_logpdf(y, v, sigma)
                };
                logw.push((cnt as f64).ln() + ll);
                slots.push(c);
            }
            let fresh_ll = if self.flat_likelihood {
                0.0
            } else {
                normal_logpdf(y, self.bp.mu0(), marginal_sd)
            };
            logw.push(ln_alpha + fresh_ll);
            if logw.iter().any(|w| w.is_nan()) || logw.iter().all(|w| *w == f64::NEG_INFINITY) {
                return Err(Error::NonFinite { index: i });
            }
            let pick = sample_log_categorical(&logw, rng);
            let c = if pick == slots.len() {
                let v = if self.flat_likelihood {
                    self.bp.sample(rng)
                } else {
                    let (m, sd) = conjugate_posterior(&self.bp, 1, y, sigma);
                    let z: f64 = StandardNormal.sample(rng);
                    m + sd * z
                };
                values.push(v);
                counts.push(0);
                values.len() - 1
            } else {
                slots[pick]
            };
            counts[c] += 1;
            assign[i] = c;
        }
        for (th, &c) in state.theta.iter_mut().zip(&assign) {
            *th = values[c];
        }

        if let Some(sp) = &self.sigma_prior {
            let ss: f64 = if self.flat_likelihood {
                0.0
            } else {
                data.iter()
                    .zip(&state.theta)
                    .map(|(y, t)| (y - t) * (y - t))
                    .sum()
            };
            let n_eff = if self.flat_likelihood { 0 } else { n };
            state.sigma = sp.griddy_update(n_eff, ss, rng);
        }
        Ok(())
    }
}

/// One EW Gibbs sweep; `sp = None` holds σ fixed.
pub fn ew_gibbs_step<R: Rng + ?Sized>(
    state: &mut EwState,
    data: &[f64],
    alpha: f64,
    bp: &BasePrior,
    sp: Option<&SigmaPrior>,
    rng: &mut R,
) -> Result<()> {
    EwSampler::new(alpha, *bp, sp.cloned())?.step(state, data, rng)
}

/// Unnormalized log-weights of the full conditional of `θᵢ`, one entry per
/// atom: entry `l ≠ i` is the point mass on `θ_l`, entry `i` is the fresh
/// conjugate draw.
pub fn ew_conditional_log_weights(
    theta: &[f64],
    i: usize,
    data: &[f64],
    alpha: f64,
    bp: &BasePrior,
    sigma: f64,
) -> Vec<f64> {
    let y = data[i];
    theta
        .iter()
        .enumerate()
        .map(|(l, &th)| {
            if l == i {
                alpha.ln() + normal_logpdf(y, bp.mu0(), sigma.hypot(bp.sigma0()))
            } else {
                normal_logpdf(y, th, sigma)
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{distinct_count, polya_urn_sample};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn urn_locked_sweep_merges_atoms() {
        let bp = BasePrior::new(0.0, 1.0).unwrap();
        let data = [0.3, -0.2];
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let mut st = EwState::from_data(&data, 1.0).unwrap();
            ew_gibbs_step(&mut st, &data, 1e-12, &bp, None, &mut rng).unwrap();
            assert_eq!(st.theta[0], st.theta[1]);
        }
    }

    #[test]
    fn single_datum_conjugate_mean() {
        let bp = BasePrior::new(0.0, 1.0).unwrap();
        let data = [5.0];
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut st = EwState::from_data(&data, 1.0).unwrap();
        let sampler = EwSampler::new(1e12, bp, None).unwrap();
        let sweeps = 20_000;
        let mut acc = 0.0;
        for _ in 0..sweeps {
            sampler.step(&mut st, &data, &mut rng).unwrap();
            acc += st.theta[0];
        }
        let mean = acc / sweeps as f64;
        assert!((mean - 2.5).abs() < 0.05, "{mean}");
    }

    #[test]
    fn fresh_limit_tracks_conjugate_mean_per_atom() {
        let bp = BasePrior::new(1.0, 2.0).unwrap();
        let data = [-1.0, 0.5, 3.0];
        let sigma = 0.3_f64;
        let sampler = EwSampler::new(1e12, bp, None).unwrap();
        let mut st = EwState::from_data(&data, sigma).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let sweeps = 10_000;
        let mut sums = [0.0; 3];
        for _ in 0..sweeps {
            sampler.step(&mut st, &data, &mut rng).unwrap();
            for (s, t) in sums.iter_mut().zip(&st.theta) {
                *s += t;
            }
        }
        let s0 = 4.0;
        let post_sd = (s0 * sigma * sigma / (s0 + sigma * sigma)).sqrt();
        for (j, &y) in data.iter().enumerate() {
            let expect = (s0 * y + sigma * sigma * 1.0) / (s0 + sigma * sigma);
            let mean = sums[j] / sweeps as f64;
            let se = post_sd / (sweeps as f64).sqrt();
            assert!(
                (mean - expect).abs() < 3.0 * se + 1e-3,
                "atom {j}: {mean} vs {expect}"
            );
        }
    }

    #[test]
    fn flat_likelihood_matches_urn_prior() {
        let bp = BasePrior::new(0.0, 1.0).unwrap();
        let n = 12;
        let alpha = 1.5;
        let data = vec![0.0; n];
        let mut sampler = EwSampler::new(alpha, bp, None).unwrap();
        sampler.flat_likelihood = true;
        let mut st = EwState::from_data(&data, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let sweeps = 10_000;
        let counts: Vec<f64> = (0..sweeps)
            .map(|_| {
                sampler.step(&mut st, &data, &mut rng).unwrap();
                distinct_count(&st.theta) as f64
            })
            .collect();
        let mean = counts.iter().sum::<f64>() / sweeps as f64;
        // batch-means standard error
        let batches = 50;
        let size = sweeps / batches;
        let bm: Vec<f64> = (0..batches)
            .map(|b| counts[b * size..(b + 1) * size].iter().sum::<f64>() / size as f64)
            .collect();
        let var_b = bm.iter().map(|m| (m - mean) * (m - mean)).sum::<f64>() / (batches - 1) as f64;
        let se = (var_b / batches as f64).sqrt();
        let expected: f64 = (0..n).map(|j| alpha / (alpha + j as f64)).sum();
        assert!(
            (mean - expected).abs() < 3.0 * se,
            "{mean} vs {expected} (se {se})"
        );

        let urn_mean = (0..10_000)
            .map(|_| distinct_count(&polya_urn_sample(alpha, &bp, n, &mut rng).unwrap()) as f64)
            .sum::<f64>()
            / 10_000.0;
        assert!((urn_mean - expected).abs() < 0.05);
    }

    #[test]
    fn non_finite_datum_reports_index() {
        let bp = BasePrior::new(0.0, 1.0).unwrap();
        let data = [0.0, f64::NAN, 1.0];
        let mut st = EwState::new(vec![0.0, 0.0, 1.0], 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let err = ew_gibbs_step(&mut st, &data, 1.0, &bp, None, &mut rng).unwrap_err();
        assert!(matches!(err, Error::NonFinite { index: 1 }));
    }

    #[test]
    fn length_mismatch_is_shape_error() {
        let bp = BasePrior::new(0.0, 1.0).unwrap();
        let mut st = EwState::new(vec![0.0], 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        assert!(matches!(
            ew_gibbs_step(&mut st, &[0.0, 1.0], 1.0, &bp, None, &mut rng),
            Err(Error::Shape(_))
        ));
    }
}
