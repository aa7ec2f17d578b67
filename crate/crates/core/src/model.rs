//! Closed-form densities: the data-generating convolution, the EW and SB
//! predictive estimators, the p-variate product form, and Polya-urn draws
//! from the marginalized Dirichlet-process prior.

use rand::Rng;
use rand_distr::{Distribution, Normal, StandardNormal};

use crate::error::{domain, Error, Result};
use crate::math::{normal_pdf, std_normal_cdf};

/// Data-generating density `f₀ = ∫ N(y; θ, k²) dF₀(θ)` with a finite-atom `F₀`
/// supported on `[-a-c, a+c]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrueDensity {
    k: f64,
    a: f64,
    c: f64,
    atoms: Vec<(f64, f64)>,
}

impl TrueDensity {
    /// `atoms` are `(location, weight)` pairs.
    pub fn new(k: f64, a: f64, c: f64, atoms: Vec<(f64, f64)>) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(domain(format!("kernel width k must be positive, got {k}")));
        }
        if !(a > 0.0 && c > 0.0) {
            return Err(domain(format!(
                "a and c must be positive, got a={a}, c={c}"
            )));
        }
        if atoms.is_empty() {
            return Err(domain("F0 needs at least one atom"));
        }
        let half = a + c;
        let mut total = 0.0;
        for &(loc, w) in &atoms {
            if !(loc.is_finite() && loc.abs() <= half) {
                return Err(domain(format!("atom {loc} outside [-{half}, {half}]")));
            }
            if !(w >= 0.0) {
                return Err(domain(format!("negative atom weight {w}")));
            }
            total += w;
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(domain(format!("atom weights sum to {total}, not 1")));
        }
        Ok(Self { k, a, c, atoms })
    }

    pub fn point_mass(k: f64, a: f64, c: f64, loc: f64) -> Result<Self> {
        Self::new(k, a, c, vec![(loc, 1.0)])
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn eval(&self, y: f64) -> f64 {
        self.atoms
            .iter()
            .map(|&(loc, w)| w * normal_pdf(y, loc, self.k))
            .sum()
    }

    /// Draws `n` i.i.d. observations: an atom by weight plus `N(0, k²)` noise.
    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<Vec<f64>> {
        if n == 0 {
            return Err(Error::EmptyRequest("f0 sample of size 0"));
        }
        let mut cumulative = Vec::with_capacity(self.atoms.len());
        let mut acc = 0.0;
        for &(_, w) in &self.atoms {
            acc += w;
            cumulative.push(acc);
        }
        let out = (0..n)
            .map(|_| {
                let u: f64 = rng.random::<f64>() * acc;
                let j = cumulative
                    .iter()
                    .position(|&cw| u < cw)
                    .unwrap_or(self.atoms.len() - 1);
                let z: f64 = StandardNormal.sample(rng);
                self.atoms[j].0 + self.k * z
            })
            .collect();
        Ok(out)
    }
}

/// Gaussian base measure `G₀ = N(μ₀, σ₀²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasePrior {
    mu0: f64,
    sigma0: f64,
}

impl BasePrior {
    pub fn new(mu0: f64, sigma0: f64) -> Result<Self> {
        if !(sigma0 > 0.0 && sigma0.is_finite() && mu0.is_finite()) {
            return Err(domain(format!(
                "G0 needs finite mean and positive sd, got ({mu0}, {sigma0})"
            )));
        }
        Ok(Self { mu0, sigma0 })
    }

    pub fn mu0(&self) -> f64 {
        self.mu0
    }

    pub fn sigma0(&self) -> f64 {
        self.sigma0
    }

    /// `∫ (1/s) φ((y-θ)/s) dG₀(θ)`, i.e. the `N(μ₀, s² + σ₀²)` density at `y`.
    pub fn convolution(&self, scale: f64, y: f64) -> Result<f64> {
        if !(scale > 0.0) {
            return Err(domain(format!(
                "convolution scale must be positive, got {scale}"
            )));
        }
        Ok(self.convolution_unchecked(scale, y))
    }

    pub(crate) fn convolution_unchecked(&self, scale: f64, y: f64) -> f64 {
        normal_pdf(y, self.mu0, scale.hypot(self.sigma0))
    }

    /// G₀-probability of `[lo, hi]`.
    pub fn mass(&self, lo: f64, hi: f64) -> f64 {
        std_normal_cdf((hi - self.mu0) / self.sigma0)
            - std_normal_cdf((lo - self.mu0) / self.sigma0)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let z: f64 = StandardNormal.sample(rng);
        self.mu0 + self.sigma0 * z
    }
}

/// Growth schedules for `α(n)`, `M(n)`, `σ_n`, `ε*_n` and `b_n`, together with
/// the support constants they refer to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamSchedules {
    /// `α = n^omega`
    pub omega: f64,
    /// `M = n^b`
    pub b: f64,
    /// `σ_n² = c² / (4 e^{n^t})`
    pub t: f64,
    /// `ε*_n = n^{-r}`
    pub r: f64,
    pub c1: f64,
    pub k: f64,
    pub a: f64,
    pub c: f64,
    /// `b_n = bn_ratio · σ_n`
    pub bn_ratio: f64,
}

impl Default for ParamSchedules {
    fn default() -> Self {
        Self {
            omega: 0.05,
            b: 0.2,
            t: 2.0,
            r: 3.0,
            c1: 0.1,
            k: 1.0,
            a: 1.0,
            c: 0.5,
            bn_ratio: 0.5,
        }
    }
}

impl ParamSchedules {
    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.omega,
            self.b,
            self.t,
            self.r,
            self.c1,
            self.k,
            self.a,
            self.c,
            self.bn_ratio,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            return Err(domain("schedule parameters must be finite"));
        }
        if !(self.omega > 0.0 && self.b > 0.0) {
            return Err(domain("omega and b must be positive"));
        }
        if !(self.t > 0.0 && self.r > 0.0) {
            return Err(domain("t and r must be positive"));
        }
        if !(self.k > 0.0 && self.a > 0.0 && self.c > 0.0 && self.c1 > 0.0) {
            return Err(domain("k, a, c, c1 must be positive"));
        }
        if !(self.bn_ratio > 0.0 && self.bn_ratio < 1.0) {
            return Err(domain(format!(
                "bn_ratio must lie in (0, 1), got {}",
                self.bn_ratio
            )));
        }
        if self.c1 >= self.a {
            return Err(domain(format!(
                "c1 ({}) must be smaller than a ({})",
                self.c1, self.a
            )));
        }
        Ok(())
    }

    pub fn alpha(&self, n: f64) -> f64 {
        n.powf(self.omega)
    }

    /// Real-valued `n^b`, as used by the rate bounds.
    pub fn m_real(&self, n: f64) -> f64 {
        n.powf(self.b)
    }

    /// Integer component count for the SB sampler: `max(2, ⌈n^b⌉)`.
    pub fn m_components(&self, n: usize) -> usize {
        (self.m_real(n as f64).ceil() as usize).max(2)
    }

    /// `ln σ_n²`, finite for any representable `n^t`.
    pub fn ln_sigma_n_sq(&self, n: f64) -> f64 {
        (self.c * self.c / 4.0).ln() - n.powf(self.t)
    }

    pub fn sigma_n(&self, n: f64) -> f64 {
        (0.5 * self.ln_sigma_n_sq(n)).exp()
    }

    pub fn b_n(&self, n: f64) -> f64 {
        self.bn_ratio * self.sigma_n(n)
    }
}

/// Mixture weights `π` for the modified SB estimator, optionally carrying the
/// Dirichlet concentration `β` they are drawn from.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    weights: Vec<f64>,
    beta: Vec<f64>,
}

impl WeightVector {
    pub fn new(weights: Vec<f64>, beta: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(domain("weight vector is empty"));
        }
        if weights.len() != beta.len() {
            return Err(Error::Shape(format!(
                "{} weights but {} Dirichlet parameters",
                weights.len(),
                beta.len()
            )));
        }
        if weights.iter().any(|&w| !(w >= 0.0)) {
            return Err(domain("weights must be nonnegative"));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(domain(format!("weights sum to {total}, not 1")));
        }
        if beta.iter().any(|&b| !(b > 0.0)) {
            return Err(domain("Dirichlet parameters must be positive"));
        }
        Ok(Self { weights, beta })
    }

    /// `π = (1/M, …, 1/M)` with `β = 1`.
    pub fn uniform(m: usize) -> Self {
        Self {
            weights: vec![1.0 / m as f64; m],
            beta: vec![1.0; m],
        }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub(crate) fn set_weights(&mut self, w: Vec<f64>) {
        debug_assert_eq!(w.len(), self.beta.len());
        self.weights = w;
    }
}

/// `M × p` atom grid for the p-variate product estimator (row-major).
#[derive(Debug, Clone, PartialEq)]
pub struct AtomMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl AtomMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Shape(
                "atom matrix needs at least one row and column".into(),
            ));
        }
        if data.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{} entries for a {rows}x{cols} atom matrix",
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(domain("atoms must be finite"));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }
}

/// EW predictive density:
/// `(α/(α+n)) A_n + (1/(α+n)) Σᵢ N(y; θᵢ, (σ+k)²)`.
pub fn ew_density(theta: &[f64], sigma: f64, alpha: f64, bp: &BasePrior, k: f64, y: f64) -> f64 {
    let s = sigma + k;
    let n = theta.len() as f64;
    let base = bp.convolution_unchecked(s, y);
    let kernels: f64 = theta.iter().map(|&th| normal_pdf(y, th, s)).sum();
    (alpha / (alpha + n)) * base + kernels / (alpha + n)
}

/// EW density with atoms given as `(value, multiplicity)` clusters; matches
/// [`ew_density`] on the expanded atom vector up to summation order.
pub fn ew_density_clustered(
    clusters: &[(f64, usize)],
    n: usize,
    sigma: f64,
    alpha: f64,
    bp: &BasePrior,
    k: f64,
    y: f64,
) -> f64 {
    let s = sigma + k;
    let n = n as f64;
    let base = bp.convolution_unchecked(s, y);
    let kernels: f64 = clusters
        .iter()
        .map(|&(th, count)| count as f64 * normal_pdf(y, th, s))
        .sum();
    (alpha / (alpha + n)) * base + kernels / (alpha + n)
}

/// SB predictive density `Σᵢ πᵢ N(y; θᵢ, (σ+k)²)`; `weights = None` is the
/// equal-weight (1/M) estimator.
pub fn sb_density(
    theta: &[f64],
    weights: Option<&WeightVector>,
    sigma: f64,
    k: f64,
    y: f64,
) -> Result<f64> {
    if theta.is_empty() {
        return Err(Error::Shape("SB estimator needs at least one atom".into()));
    }
    let s = sigma + k;
    match weights {
        None => {
            let w = 1.0 / theta.len() as f64;
            Ok(theta.iter().map(|&th| w * normal_pdf(y, th, s)).sum())
        }
        Some(pi) => {
            if pi.len() != theta.len() {
                return Err(Error::Shape(format!(
                    "{} atoms but {} weights",
                    theta.len(),
                    pi.len()
                )));
            }
            Ok(theta
                .iter()
                .zip(pi.weights())
                .map(|(&th, &w)| w * normal_pdf(y, th, s))
                .sum())
        }
    }
}

/// p-variate SB estimator with a product of univariate kernels.
pub fn mv_product_density(theta: &AtomMatrix, sigma: f64, k: f64, y: &[f64]) -> Result<f64> {
    if y.len() != theta.cols() {
        return Err(Error::Shape(format!(
            "point has dimension {} but atoms have {}",
            y.len(),
            theta.cols()
        )));
    }
    let s = sigma + k;
    let w = 1.0 / theta.rows() as f64;
    Ok((0..theta.rows())
        .map(|i| {
            let prod = theta
                .row(i)
                .iter()
                .zip(y)
                .fold(1.0, |acc, (&th, &yl)| acc * normal_pdf(yl, th, s));
            w * prod
        })
        .sum())
}

/// Sequential Polya urn: `θ₁ ~ G₀`, then each new atom copies a uniformly
/// chosen earlier atom with probability `j/(α+j)` or is a fresh `G₀` draw.
pub fn polya_urn_sample<R: Rng + ?Sized>(
    alpha: f64,
    bp: &BasePrior,
    m: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    if m == 0 {
        return Err(Error::EmptyRequest("Polya urn sample of size 0"));
    }
    if !(alpha > 0.0) {
        return Err(domain(format!("alpha must be positive, got {alpha}")));
    }
    let g0 = Normal::new(bp.mu0(), bp.sigma0()).map_err(|e| domain(e.to_string()))?;
    let mut atoms = Vec::with_capacity(m);
    atoms.push(g0.sample(rng));
    for j in 1..m {
        let jf = j as f64;
        let u: f64 = rng.random();
        if u * (alpha + jf) < jf {
            let pick = rng.random_range(0..j);
            atoms.push(atoms[pick]);
        } else {
            atoms.push(g0.sample(rng));
        }
    }
    Ok(atoms)
}

/// Number of distinct values in an atom vector (exact equality).
pub fn distinct_count(atoms: &[f64]) -> usize {
    let mut v: Vec<u64> = atoms.iter().map(|x| x.to_bits()).collect();
    v.sort_unstable();
    v.dedup();
    v.len()
}

/// Groups atoms into `(value, multiplicity)` clusters, ordered by value.
pub fn cluster_atoms(atoms: &[f64]) -> Vec<(f64, usize)> {
    let mut sorted = atoms.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut out: Vec<(f64, usize)> = Vec::new();
    for v in sorted {
        match out.last_mut() {
            Some((last, count)) if last.to_bits() == v.to_bits() => *count += 1,
            _ => out.push((v, 1)),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::simpson;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const PHI0: f64 = 0.398_942_280_401_432_7;

    fn std_bp() -> BasePrior {
        BasePrior::new(0.0, 1.0).unwrap()
    }

    #[test]
    fn f0_point_mass_at_mode() {
        let td = TrueDensity::point_mass(1.0, 1.0, 0.5, 0.0).unwrap();
        assert!((td.eval(0.0) - 0.398_942_3).abs() < 1e-7);
    }

    #[test]
    fn f0_symmetric_pair() {
        let td = TrueDensity::new(1.0, 1.0, 0.5, vec![(-1.0, 0.5), (1.0, 0.5)]).unwrap();
        // φ(1)
        assert!((td.eval(0.0) - 0.241_970_7).abs() < 1e-7);
    }

    #[test]
    fn f0_normalizes() {
        let td =
            TrueDensity::new(0.7, 1.0, 0.5, vec![(-1.2, 0.3), (0.4, 0.5), (1.5, 0.2)]).unwrap();
        let v = simpson(|y| td.eval(y), -20.0, 20.0, 4001);
        assert!((v - 1.0).abs() < 1e-8);
    }

    #[test]
    fn f0_rejects_bad_inputs() {
        assert!(TrueDensity::new(0.0, 1.0, 0.5, vec![(0.0, 1.0)]).is_err());
        assert!(TrueDensity::new(1.0, 1.0, 0.5, vec![(2.0, 1.0)]).is_err());
        assert!(TrueDensity::new(1.0, 1.0, 0.5, vec![(0.0, 0.4), (0.1, 0.4)]).is_err());
    }

    #[test]
    fn f0_sample_empty_request() {
        let td = TrueDensity::point_mass(1.0, 1.0, 0.5, 0.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(matches!(
            td.sample(0, &mut rng),
            Err(Error::EmptyRequest(_))
        ));
    }

    #[test]
    fn f0_sample_degenerate_kernel() {
        let td = TrueDensity::point_mass(1e-9, 1.0, 0.5, 0.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let ys = td.sample(3, &mut rng).unwrap();
        assert!(ys.iter().all(|y| y.abs() < 1e-6));
    }

    #[test]
    fn f0_sample_moments() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let pair = TrueDensity::new(1.0, 1.0, 0.5, vec![(-1.0, 0.5), (1.0, 0.5)]).unwrap();
        let ys = pair.sample(100_000, &mut rng).unwrap();
        let mean = ys.iter().sum::<f64>() / ys.len() as f64;
        assert!(mean.abs() < 0.02, "mean {mean}");

        let point = TrueDensity::point_mass(1.0, 1.0, 0.5, 0.0).unwrap();
        let ys = point.sample(100_000, &mut rng).unwrap();
        let m = ys.iter().sum::<f64>() / ys.len() as f64;
        let var = ys.iter().map(|y| (y - m) * (y - m)).sum::<f64>() / ys.len() as f64;
        assert!((var - 1.0).abs() < 0.03, "var {var}");
    }

    #[test]
    fn f0_sample_is_seeded() {
        let td = TrueDensity::new(1.0, 1.0, 0.5, vec![(-1.0, 0.5), (1.0, 0.5)]).unwrap();
        let a = td.sample(10, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = td.sample(10, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn base_convolution_values() {
        let bp = std_bp();
        assert!((bp.convolution(1.0, 0.0).unwrap() - 0.282_094_8).abs() < 1e-7);
        let narrow = BasePrior::new(0.3, 1e-9).unwrap();
        assert!((narrow.convolution(1.0, 0.3).unwrap() - 0.398_942_3).abs() < 1e-6);
        assert!(matches!(bp.convolution(0.0, 0.0), Err(Error::Domain(_))));
        assert!(bp.convolution(-1.0, 0.0).is_err());
    }

    #[test]
    fn ew_density_cases() {
        let bp = std_bp();
        // n = 0 reduces to A_n
        let v = ew_density(&[], 0.2, 1.5, &bp, 0.8, 0.4);
        assert!((v - bp.convolution(1.0, 0.4).unwrap()).abs() < 1e-15);
        // α=1, n=1, θ₁=0, σ+k=1, y=0
        let v = ew_density(&[0.0], 0.0, 1.0, &bp, 1.0, 0.0);
        assert!((v - 0.340_518_5).abs() < 1e-7);
    }

    #[test]
    fn ew_clustered_matches_expanded() {
        let bp = BasePrior::new(2.0, 1.0).unwrap();
        let theta = [0.5, 0.5, -1.0, 0.5, 2.0, -1.0];
        let clusters = cluster_atoms(&theta);
        assert_eq!(clusters.len(), 3);
        for y in [-3.0, 0.0, 0.7, 4.0] {
            let a = ew_density(&theta, 0.1, 1.3, &bp, 1.0, y);
            let b = ew_density_clustered(&clusters, theta.len(), 0.1, 1.3, &bp, 1.0, y);
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn sb_density_cases() {
        assert!((sb_density(&[0.0], None, 0.0, 1.0, 0.0).unwrap() - PHI0).abs() < 1e-15);
        let v = sb_density(&[0.0, 2.0], None, 0.0, 1.0, 0.0).unwrap();
        assert!((v - 0.226_466_6).abs() < 1e-7);
        let pi = WeightVector::new(vec![1.0, 0.0], vec![1.0, 1.0]).unwrap();
        let v = sb_density(&[0.0, 2.0], Some(&pi), 0.0, 1.0, 0.0).unwrap();
        assert!((v - 0.398_942_3).abs() < 1e-7);
        let bad = WeightVector::uniform(3);
        assert!(matches!(
            sb_density(&[0.0, 2.0], Some(&bad), 0.0, 1.0, 0.0),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn sb_uniform_weights_bit_identical() {
        let theta = [0.3, -1.7, 2.2, 0.0, 5.1];
        let pi = WeightVector::uniform(theta.len());
        for y in [-4.0, -0.3, 0.0, 1.9, 6.0] {
            let a = sb_density(&theta, None, 0.17, 0.9, y).unwrap();
            let b = sb_density(&theta, Some(&pi), 0.17, 0.9, y).unwrap();
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn mv_density_cases() {
        let one = AtomMatrix::new(1, 2, vec![0.0, 0.0]).unwrap();
        let v = mv_product_density(&one, 0.0, 1.0, &[0.0, 0.0]).unwrap();
        assert!((v - 0.159_154_9).abs() < 1e-7);

        let two = AtomMatrix::new(2, 2, vec![0.0, 0.0, 10.0, 10.0]).unwrap();
        let v = mv_product_density(&two, 0.0, 1.0, &[0.0, 0.0]).unwrap();
        assert!((v - 0.079_577_5).abs() < 1e-7);

        assert!(matches!(
            mv_product_density(&two, 0.0, 1.0, &[0.0]),
            Err(Error::Shape(_))
        ));
        assert!(AtomMatrix::new(2, 2, vec![0.0; 3]).is_err());
    }

    #[test]
    fn mv_reduces_to_sb_at_p1() {
        let theta = vec![0.3, -1.7, 2.2, 0.0];
        let mat = AtomMatrix::new(theta.len(), 1, theta.clone()).unwrap();
        for y in [-2.0, 0.1, 3.3] {
            let a = mv_product_density(&mat, 0.05, 1.0, &[y]).unwrap();
            let b = sb_density(&theta, None, 0.05, 1.0, y).unwrap();
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn urn_limits() {
        let bp = std_bp();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let fresh = polya_urn_sample(1e12, &bp, 100, &mut rng).unwrap();
        assert!(distinct_count(&fresh) >= 99);
        let locked = polya_urn_sample(1e-12, &bp, 100, &mut rng).unwrap();
        assert_eq!(distinct_count(&locked), 1);
        assert!(polya_urn_sample(1.0, &bp, 0, &mut rng).is_err());
        assert!(polya_urn_sample(0.0, &bp, 5, &mut rng).is_err());
    }

    #[test]
    fn urn_distinct_count_matches_harmonic_sum() {
        let bp = std_bp();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let reps = 10_000;
        let counts: Vec<f64> = (0..reps)
            .map(|_| distinct_count(&polya_urn_sample(1.0, &bp, 50, &mut rng).unwrap()) as f64)
            .collect();
        let mean = counts.iter().sum::<f64>() / reps as f64;
        let expected: f64 = (0..50).map(|j| 1.0 / (1.0 + j as f64)).sum();
        assert!((expected - 4.499).abs() < 1e-3);
        assert!((mean - expected).abs() < 0.1, "mean {mean} vs {expected}");
    }
}
