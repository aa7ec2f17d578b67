//! Gibbs sampler for the SB model and its Dirichlet-weighted variant.

use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use super::sigma::SigmaPrior;
use super::{conjugate_posterior, sample_log_categorical};
use crate::error::{domain, Error, Result};
use crate::math::{log_sum_exp, normal_logpdf, LN_SQRT_2PI};
use crate::model::{BasePrior, WeightVector};

/// Allocations `z` (0-based), atoms `Θ_M`, kernel scale and, for the
/// modified model, mixture weights.
#[derive(Debug, Clone, PartialEq)]
pub struct SbState {
    pub z: Vec<usize>,
    pub theta: Vec<f64>,
    pub sigma: f64,
    pub weights: Option<WeightVector>,
}

impl SbState {
    pub fn new(
        z: Vec<usize>,
        theta: Vec<f64>,
        sigma: f64,
        weights: Option<WeightVector>,
    ) -> Result<Self> {
        let m = theta.len();
        if m == 0 {
            return Err(domain("SB state needs M >= 1"));
        }
        if let Some(&bad) = z.iter().find(|&&j| j >= m) {
            return Err(domain(format!("allocation {bad} outside 0..{m}")));
        }
        if !(sigma > 0.0) {
            return Err(domain(format!("sigma must be positive, got {sigma}")));
        }
        if let Some(w) = &weights {
            if w.len() != m {
                return Err(Error::Shape(format!("{} weights for {m} atoms", w.len())));
            }
        }
        Ok(Self {
            z,
            theta,
            sigma,
            weights,
        })
    }

    /// Round-robin allocations with atoms at the group means.
    pub fn init_from_data(
        data: &[f64],
        m: usize,
        sigma: f64,
        weights: Option<WeightVector>,
    ) -> Result<Self> {
        let mut sorted: Vec<(usize, f64)> = data.iter().copied().enumerate().collect();
        sorted.sort_by(|a, b| a.1.total_cmp(&b.1));
        let n = data.len();
        let mut z = vec![0; n];
        // contiguous blocks of the sorted data
        for (rank, &(i, _)) in sorted.iter().enumerate() {
            z[i] = (rank * m / n.max(1)).min(m - 1);
        }
        let stats = GroupStats::compute(data, &z, m);
        let overall = if n > 0 {
            data.iter().sum::<f64>() / n as f64
        } else {
            0.0
        };
        let theta = (0..m)
            .map(|j| {
                if stats.count[j] > 0 {
                    stats.mean[j]
                } else {
                    overall
                }
            })
            .collect();
        Self::new(z, theta, sigma, weights)
    }

    pub fn m(&self) -> usize {
        self.theta.len()
    }

    pub fn counts(&self) -> Vec<usize> {
        let mut c = vec![0; self.m()];
        for &j in &self.z {
            c[j] += 1;
        }
        c
    }

    pub fn has_empty_component(&self) -> bool {
        self.counts().contains(&0)
    }
}

/// Per-component sufficient statistics.
#[derive(Debug, Clone)]
pub(crate) struct GroupStats {
    pub count: Vec<usize>,
    pub mean: Vec<f64>,
    /// within-group sum of squares
    pub within: Vec<f64>,
}

impl GroupStats {
    pub fn compute(data: &[f64], z: &[usize], m: usize) -> Self {
        let mut count = vec![0usize; m];
        let mut sum = vec![0.0; m];
        for (&y, &j) in data.iter().zip(z) {
            count[j] += 1;
            sum[j] += y;
        }
        let mean: Vec<f64> = sum
            .iter()
            .zip(&count)
            .map(|(&s, &c)| if c > 0 { s / c as f64 } else { 0.0 })
            .collect();
        let mut within = vec![0.0; m];
        for (&y, &j) in data.iter().zip(z) {
            let d = y - mean[j];
            within[j] += d * d;
        }
        Self {
            count,
            mean,
            within,
        }
    }

    /// `Σ_{t: z_t = j} ln N(Y_t; θ, σ²)`
    fn loglik(&self, j: usize, theta: f64, sigma: f64) -> f64 {
        let nj = self.count[j] as f64;
        if self.count[j] == 0 {
            return 0.0;
        }
        let d = self.mean[j] - theta;
        -nj * (sigma.ln() + LN_SQRT_2PI) - (self.within[j] + nj * d * d) / (2.0 * sigma * sigma)
    }

    /// Log marginal likelihood of group `j` with its atom integrated against G₀.
    fn log_marginal(&self, j: usize, bp: &BasePrior, sigma: f64) -> f64 {
        let nj = self.count[j] as f64;
        if self.count[j] == 0 {
            return 0.0;
        }
        let s2 = sigma * sigma;
        -nj * (sigma.ln() + LN_SQRT_2PI) - self.within[j] / (2.0 * s2)
            + 0.5 * (2.0 * std::f64::consts::PI * s2 / nj).ln()
            + normal_logpdf(
                self.mean[j],
                bp.mu0(),
                (s2 / nj + bp.sigma0() * bp.sigma0()).sqrt(),
            )
    }
}

#[derive(Debug, Clone)]
pub struct SbSampler {
    pub alpha: f64,
    pub bp: BasePrior,
    pub sigma_prior: Option<SigmaPrior>,
}

impl SbSampler {
    pub fn new(alpha: f64, bp: BasePrior, sigma_prior: Option<SigmaPrior>) -> Result<Self> {
        if !(alpha > 0.0) {
            return Err(domain(format!("alpha must be positive, got {alpha}")));
        }
        Ok(Self {
            alpha,
            bp,
            sigma_prior,
        })
    }

    /// One sweep: allocations, atoms, σ, then weights (modified model only).
    pub fn step<R: Rng + ?Sized>(
        &self,
        state: &mut SbState,
        data: &[f64],
        rng: &mut R,
    ) -> Result<()> {
        let n = data.len();
        let m = state.m();
        if state.z.len() != n {
            return Err(Error::Shape(format!(
                "{} allocations for {n} observations",
                state.z.len()
            )));
        }
        let sigma = state.sigma;

        let ln_pi: Vec<f64> = match &state.weights {
            Some(w) => w.weights().iter().map(|p| p.ln()).collect(),
            None => vec![0.0; m],
        };
        let mut logw = vec![0.0; m];
        for (i, &y) in data.iter().enumerate().take(n) {
            if !y.is_finite() {
                return Err(Error::NonFinite { index: i });
            }
            if m == 1 {
                state.z[i] = 0;
                continue;
            }
            for j in 0..m {
                logw[j] = ln_pi[j] + normal_logpdf(y, state.theta[j], sigma);
            }
            if logw.iter().any(|w| w.is_nan()) || logw.iter().all(|w| *w == f64::NEG_INFINITY) {
                return Err(Error::NonFinite { index: i });
            }
            state.z[i] = sample_log_categorical(&logw, rng);
        }

        let stats = GroupStats::compute(data, &state.z, m);
        for j in 0..m {
            let lw = theta_log_weights(&stats, &state.theta, j, self.alpha, &self.bp, sigma);
            if lw.iter().any(|w| w.is_nan()) {
                let index = state.z.iter().position(|&zz| zz == j).unwrap_or(0);
                return Err(Error::NonFinite { index });
            }
            let pick = sample_log_categorical(&lw, rng);
            state.theta[j] = if pick == j {
                let (mean, sd) =
                    conjugate_posterior(&self.bp, stats.count[j], stats.mean[j], sigma);
                let z: f64 = StandardNormal.sample(rng);
                mean + sd * z
            } else {
                state.theta[pick]
            };
        }

        if let Some(sp) = &self.sigma_prior {
            let ss: f64 = data
                .iter()
                .zip(&state.z)
                .map(|(y, &j)| (y - state.theta[j]) * (y - state.theta[j]))
                .sum();
            state.sigma = sp.griddy_update(n, ss, rng);
        }

        if let Some(w) = state.weights.as_mut() {
            let counts = &stats.count;
            let shapes: Vec<f64> = w
                .beta()
                .iter()
                .zip(counts)
                .map(|(b, &c)| b + c as f64)
                .collect();
            let pi = sample_dirichlet(&shapes, rng)?;
            w.set_weights(pi);
        }
        Ok(())
    }
}

/// One SB Gibbs sweep; `sp = None` holds σ fixed.
pub fn sb_gibbs_step<R: Rng + ?Sized>(
    state: &mut SbState,
    data: &[f64],
    alpha: f64,
    bp: &BasePrior,
    sp: Option<&SigmaPrior>,
    rng: &mut R,
) -> Result<()> {
    SbSampler::new(alpha, *bp, sp.cloned())?.step(state, data, rng)
}

fn theta_log_weights(
    stats: &GroupStats,
    theta: &[f64],
    j: usize,
    alpha: f64,
    bp: &BasePrior,
    sigma: f64,
) -> Vec<f64> {
    let m = theta.len();
    let ln_norm = (alpha + m as f64 - 1.0).ln();
    (0..m)
        .map(|l| {
            if l == j {
                alpha.ln() - ln_norm + stats.log_marginal(j, bp, sigma)
            } else {
                -ln_norm + stats.loglik(j, theta[l], sigma)
            }
        })
        .collect()
}

/// Unnormalized log-weights of the full conditional of `θ_j`: entry `l ≠ j`
/// is the point mass on `θ_l`, entry `j` the fresh conjugate draw.
pub fn sb_theta_conditional_log_weights(
    state: &SbState,
    j: usize,
    data: &[f64],
    alpha: f64,
    bp: &BasePrior,
) -> Vec<f64> {
    let stats = GroupStats::compute(data, &state.z, state.m());
    theta_log_weights(&stats, &state.theta, j, alpha, bp, state.sigma)
}

/// Dirichlet draw via `Gamma(a+1) · U^{1/a}` in log space, so tiny shapes
/// do not underflow.
pub fn sample_dirichlet<R: Rng + ?Sized>(shapes: &[f64], rng: &mut R) -> Result<Vec<f64>> {
    let mut logs = Vec::with_capacity(shapes.len());
    for &a in shapes {
        let g = Gamma::new(a + 1.0, 1.0).map_err(|e| domain(e.to_string()))?;
        let x: f64 = g.sample(rng);
        let u: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
        logs.push(x.ln() + u.ln() / a);
    }
    let lse = log_sum_exp(&logs);
    Ok(logs.iter().map(|l| (l - lse).exp()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::normalize_log_weights;
    use crate::sampler::ew::ew_conditional_log_weights;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn separated(n: usize, rng: &mut ChaCha8Rng) -> (Vec<f64>, Vec<usize>) {
        let mut data = Vec::with_capacity(n);
        let mut truth = Vec::with_capacity(n);
        for i in 0..n {
            let side = i % 2;
            let centre = if side == 0 { -5.0 } else { 5.0 };
            let z: f64 = StandardNormal.sample(rng);
            data.push(centre + 0.3 * z);
            truth.push(side);
        }
        (data, truth)
    }

    fn purity(z: &[usize], truth: &[usize]) -> f64 {
        let agree = z.iter().zip(truth).filter(|(a, b)| a == b).count() as f64 / z.len() as f64;
        agree.max(1.0 - agree)
    }

    #[test]
    fn single_component_is_pooled_conjugate() {
        let bp = BasePrior::new(0.0, 1.0).unwrap();
        let data = [1.0, 2.0, 3.0, 2.0];
        let mut st = SbState::new(vec![0; 4], vec![0.0], 1.0, None).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let sampler = SbSampler::new(1.0, bp, None).unwrap();
        let sweeps = 20_000;
        let mut acc = 0.0;
        for _ in 0..sweeps {
            sampler.step(&mut st, &data, &mut rng).unwrap();
            assert!(st.z.iter().all(|&j| j == 0));
            acc += st.theta[0];
        }
        // precision 1 + 4, mean (0 + 8)/5
        let mean = acc / sweeps as f64;
        let se = (1.0_f64 / 5.0).sqrt() / (sweeps as f64).sqrt();
        assert!((mean - 1.6).abs() < 4.0 * se, "{mean}");
    }

    #[test]
    fn separated_clusters_allocate_cleanly() {
        let bp = BasePrior::new(0.0, 3.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let (data, truth) = separated(40, &mut rng);
        let mut st = SbState::init_from_data(&data, 2, 0.5, None).unwrap();
        let sampler = SbSampler::new(1.0, bp, None).unwrap();
        for _ in 0..200 {
            sampler.step(&mut st, &data, &mut rng).unwrap();
        }
        let mut total = 0.0;
        let sweeps = 2000;
        for _ in 0..sweeps {
            sampler.step(&mut st, &data, &mut rng).unwrap();
            total += purity(&st.z, &truth);
        }
        assert!(total / sweeps as f64 >= 0.95);
    }

    #[test]
    fn dirichlet_prior_dominates() {
        let bp = BasePrior::new(0.0, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let data = [0.1, -0.2, 0.3, 0.0];
        let w = WeightVector::new(vec![0.5, 0.5], vec![1e6, 1e-6]).unwrap();
        let mut st = SbState::init_from_data(&data, 2, 0.5, Some(w)).unwrap();
        let sampler = SbSampler::new(1.0, bp, None).unwrap();
        let sweeps = 500;
        let mut acc = 0.0;
        for _ in 0..sweeps {
            sampler.step(&mut st, &data, &mut rng).unwrap();
            acc += st.weights.as_ref().unwrap().weights()[0];
        }
        assert!(acc / sweeps as f64 >= 0.99);
    }

    #[test]
    fn dirichlet_tiny_shapes_stay_finite() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let p = sample_dirichlet(&[1e-6, 1e-6, 1e-6], &mut rng).unwrap();
            assert!(p.iter().all(|x| x.is_finite() && *x >= 0.0));
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn identity_allocation_reproduces_ew_conditional() {
        let bp = BasePrior::new(0.5, 1.3).unwrap();
        let data = [0.2, -1.1, 0.7, 2.4, -0.3];
        let theta = vec![0.1, -1.0, 0.1, 2.0, 0.4];
        let n = data.len();
        let alpha = 2.7;
        let sigma = 0.6;
        let st = SbState::new((0..n).collect(), theta.clone(), sigma, None).unwrap();
        for i in 0..n {
            let mut a = ew_conditional_log_weights(&theta, i, &data, alpha, &bp, sigma);
            let mut b = sb_theta_conditional_log_weights(&st, i, &data, alpha, &bp);
            normalize_log_weights(&mut a);
            normalize_log_weights(&mut b);
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).abs() < 1e-12, "{x} vs {y}");
            }
        }
    }

    #[test]
    fn rejects_out_of_range_allocation() {
        assert!(SbState::new(vec![0, 2], vec![0.0, 1.0], 1.0, None).is_err());
    }
}
