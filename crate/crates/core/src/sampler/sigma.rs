//! Prior on the kernel scale σ and its griddy-Gibbs update.

use rand::Rng;
use rand_distr::{Distribution, Exp1};

use crate::error::{domain, Result};
use crate::math::log_sum_exp;

pub const DEFAULT_GRID_SIZE: usize = 200;

/// Mixture law for σ: `Uniform(0, σ_n]` with probability `1 - ε_n`, otherwise
/// `σ_n (1 + E)` with `E ~ Exp(1)`. The tail mass above `σ_n` is exactly `ε_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SigmaPrior {
    sigma_n: f64,
    eps_n: f64,
    ln_eps_n: f64,
    b_n: f64,
    grid: Vec<f64>,
    log_grid_weight: Vec<f64>,
}

impl SigmaPrior {
    pub fn new(sigma_n: f64, eps_n: f64, bn_ratio: f64, grid_size: usize) -> Result<Self> {
        if !(eps_n > 0.0 && eps_n < 1.0) {
            return Err(domain(format!("eps_n must lie in (0, 1), got {eps_n}")));
        }
        Self::with_ln_eps(sigma_n, eps_n.ln(), bn_ratio, grid_size)
    }

    /// Same law with the tail mass given as `ln ε_n`, so tail masses far
    /// below the smallest positive `f64` keep their exact log density.
    pub fn with_ln_eps(
        sigma_n: f64,
        ln_eps_n: f64,
        bn_ratio: f64,
        grid_size: usize,
    ) -> Result<Self> {
        if !(sigma_n > 0.0 && sigma_n.is_finite()) {
            return Err(domain(format!("sigma_n must be positive, got {sigma_n}")));
        }
        if !(ln_eps_n < 0.0) || ln_eps_n == f64::NEG_INFINITY {
            return Err(domain(format!(
                "ln eps_n must be finite and negative, got {ln_eps_n}"
            )));
        }
        let eps_n = ln_eps_n.exp();
        if !(bn_ratio > 0.0 && bn_ratio < 1.0) {
            return Err(domain(format!(
                "bn_ratio must lie in (0, 1), got {bn_ratio}"
            )));
        }
        if grid_size < 2 {
            return Err(domain("sigma grid needs at least two points"));
        }
        let b_n = bn_ratio * sigma_n;
        // log-spaced over (b_n/10, 20 σ_n]
        let lo = (b_n / 10.0).ln();
        let hi = (20.0 * sigma_n).ln();
        let step = (hi - lo) / grid_size as f64;
        let grid: Vec<f64> = (1..=grid_size)
            .map(|i| (lo + step * i as f64).exp())
            .collect();
        let mut prior = Self {
            sigma_n,
            eps_n,
            ln_eps_n,
            b_n,
            grid,
            log_grid_weight: Vec::new(),
        };
        // density × cell width; on a log grid the width is ∝ σ
        prior.log_grid_weight = prior
            .grid
            .iter()
            .map(|&s| prior.log_density(s) + s.ln())
            .collect();
        Ok(prior)
    }

    pub fn sigma_n(&self) -> f64 {
        self.sigma_n
    }

    /// May underflow to 0; see [`SigmaPrior::ln_eps_n`].
    pub fn eps_n(&self) -> f64 {
        self.eps_n
    }

    pub fn ln_eps_n(&self) -> f64 {
        self.ln_eps_n
    }

    pub fn b_n(&self) -> f64 {
        self.b_n
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else if x <= self.sigma_n {
            (1.0 - self.eps_n) * x / self.sigma_n
        } else {
            (1.0 - self.eps_n) + self.eps_n * (-(-(x - self.sigma_n) / self.sigma_n).exp_m1())
        }
    }

    pub fn log_density(&self, x: f64) -> f64 {
        if x <= 0.0 {
            f64::NEG_INFINITY
        } else if x <= self.sigma_n {
            (-self.eps_n).ln_1p() - self.sigma_n.ln()
        } else {
            self.ln_eps_n - self.sigma_n.ln() - (x - self.sigma_n) / self.sigma_n
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        if u < self.eps_n {
            let e: f64 = Exp1.sample(rng);
            self.sigma_n * (1.0 + e)
        } else {
            // (0, σ_n]
            let v: f64 = rng.random();
            self.sigma_n * (1.0 - v)
        }
    }

    /// Draws σ from the grid with weights `prior × likelihood`, where the
    /// Gaussian log-likelihood of `n` residuals with sum of squares `ss` is
    /// `-n ln σ - ss / (2σ²)` (constants dropped).
    pub fn griddy_update<R: Rng + ?Sized>(&self, n: usize, ss: f64, rng: &mut R) -> f64 {
        let mut logw: Vec<f64> = self
            .grid
            .iter()
            .zip(&self.log_grid_weight)
            .map(|(&s, &lw)| lw - n as f64 * s.ln() - ss / (2.0 * s * s))
            .collect();
        let lse = log_sum_exp(&logw);
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for (i, w) in logw.iter_mut().enumerate() {
            acc += (*w - lse).exp();
            if u < acc {
                return self.grid[i];
            }
        }
        *self.grid.last().unwrap()
    }
}

/// Builds the σ prior with the default 200-point griddy grid.
pub fn make_sigma_prior(sigma_n: f64, eps_n: f64, bn_ratio: f64) -> Result<SigmaPrior> {
    SigmaPrior::new(sigma_n, eps_n, bn_ratio, DEFAULT_GRID_SIZE)
}
