use super::ew::EwState;
use super::sb::SbState;
use crate::error::{Error, Result};
use crate::math::trapezoid_weights;
use crate::model::{cluster_atoms, ew_density_clustered, sb_density, BasePrior, TrueDensity};

/// Pointwise posterior mean and variance of a density estimator on a grid,
/// with the f₀-weighted integrated squared error.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorSummary {
    pub grid: Vec<f64>,
    pub mean_density: Vec<f64>,
    pub var_density: Vec<f64>,
    pub mise2: f64,
    /// Only defined for SB chains.
    pub empty_component_freq: Option<f64>,
    pub draws: usize,
}

impl PosteriorSummary {
    /// `sup_y |mean(y) - g(y)|` over the grid.
    pub fn sup_distance<F: Fn(f64) -> f64>(&self, g: F) -> f64 {
        self.grid
            .iter()
            .zip(&self.mean_density)
            .map(|(&y, &m)| (m - g(y)).abs())
            .fold(0.0, f64::max)
    }
}

/// Streaming per-grid-point mean/variance (Welford).
#[derive(Debug, Clone)]
pub struct DensityAccumulator {
    grid: Vec<f64>,
    count: usize,
    mean: Vec<f64>,
    m2: Vec<f64>,
    empty_draws: usize,
    sb_draws: usize,
}

impl DensityAccumulator {
    pub fn new(grid: Vec<f64>) -> Self {
        let g = grid.len();
        Self {
            grid,
            count: 0,
            mean: vec![0.0; g],
            m2: vec![0.0; g],
            empty_draws: 0,
            sb_draws: 0,
        }
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn push_curve(&mut self, curve: &[f64]) -> Result<()> {
        if curve.len() != self.grid.len() {
            return Err(Error::Shape(format!(
                "curve of length {} on a grid of {}",
                curve.len(),
                self.grid.len()
            )));
        }
        self.count += 1;
        let k = self.count as f64;
        for ((m, s), &v) in self.mean.iter_mut().zip(self.m2.iter_mut()).zip(curve) {
            let d = v - *m;
            *m += d / k;
            *s += d * (v - *m);
        }
        Ok(())
    }

    pub fn push_ew(&mut self, state: &EwState, alpha: f64, bp: &BasePrior, k: f64) -> Result<()> {
        let clusters = cluster_atoms(&state.theta);
        let n = state.theta.len();
        let curve: Vec<f64> = self
            .grid
            .iter()
            .map(|&y| ew_density_clustered(&clusters, n, state.sigma, alpha, bp, k, y))
            .collect();
        self.push_curve(&curve)
    }

    pub fn push_sb(&mut self, state: &SbState, k: f64) -> Result<()> {
        let curve = self
            .grid
            .iter()
            .map(|&y| sb_density(&state.theta, state.weights.as_ref(), state.sigma, k, y))
            .collect::<Result<Vec<f64>>>()?;
        self.push_curve(&curve)?;
        self.sb_draws += 1;
        if state.has_empty_component() {
            self.empty_draws += 1;
        }
        Ok(())
    }

    /// `f0` holds the true density on the grid.
    pub fn finish(&self, f0: &[f64]) -> Result<PosteriorSummary> {
        if self.count < 2 {
            return Err(Error::InsufficientSample {
                need: 2,
                got: self.count,
            });
        }
        if f0.len() != self.grid.len() {
            return Err(Error::Shape("true density and grid lengths differ".into()));
        }
        let var: Vec<f64> = self
            .m2
            .iter()
            .map(|s| (s / self.count as f64).max(0.0))
            .collect();
        let w = trapezoid_weights(&self.grid);
        let mise2 = self
            .mean
            .iter()
            .zip(&var)
            .zip(f0)
            .zip(&w)
            .map(|(((&m, &v), &f), &dw)| (v + (m - f) * (m - f)) * f * dw)
            .sum::<f64>()
            .max(0.0);
        let empty = (self.sb_draws > 0).then(|| self.empty_draws as f64 / self.sb_draws as f64);
        Ok(PosteriorSummary {
            grid: self.grid.clone(),
            mean_density: self.mean.clone(),
            var_density: var,
            mise2,
            empty_component_freq: empty,
            draws: self.count,
        })
    }
}

/// Retained draws of one chain, tagged by model.
#[derive(Debug, Clone, Copy)]
pub enum ChainDraws<'a> {
    Ew {
        draws: &'a [EwState],
        alpha: f64,
        bp: &'a BasePrior,
    },
    Sb {
        draws: &'a [SbState],
    },
}

pub fn posterior_density_summary(
    chain: ChainDraws<'_>,
    k: f64,
    grid: &[f64],
    f0: &TrueDensity,
) -> Result<PosteriorSummary> {
    if grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Domain(
            "summary grid must be strictly increasing".into(),
        ));
    }
    let mut acc = DensityAccumulator::new(grid.to_vec());
    match chain {
        ChainDraws::Ew { draws, alpha, bp } => {
            for s in draws {
                acc.push_ew(s, alpha, bp, k)?;
            }
        }
        ChainDraws::Sb { draws } => {
            for s in draws {
                acc.push_sb(s, k)?;
            }
        }
    }
    let truth: Vec<f64> = grid.iter().map(|&y| f0.eval(y)).collect();
    acc.finish(&truth)
}
