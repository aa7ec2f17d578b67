//! Rate-curve and posterior-simulation runs, and their file outputs.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::config::ExperimentConfig;
use super::curves::{format_value, rate_curves, CurveSet};
use super::svg::render_svg;
use crate::error::{Error, Result};
use crate::model::ParamSchedules;
use crate::rates::{rate_ordering, wrong_model_target, Model, RateOrdering};
use crate::sampler::{
    DensityAccumulator, EwSampler, EwState, PosteriorSummary, SbSampler, SbState, SigmaPrior,
};

pub const SIMULATE_HEADER: &str = "n,rep,model,mise2,empty_freq,status";

/// splitmix64 finalizer.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of replicate `rep` at sample size `n`:
/// `splitmix64(seed ⊕ splitmix64(n ⊕ splitmix64(rep)))`.
/// Depends only on `(seed, n, rep)`, never on scheduling.
pub fn replicate_seed(seed: u64, n: u64, rep: u64) -> u64 {
    splitmix64(seed ^ splitmix64(n ^ splitmix64(rep)))
}

fn model_tag(m: Model) -> &'static str {
    match m {
        Model::Ew => "EW",
        Model::Sb => "SB",
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    let io = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(io)?;
        }
    }
    fs::write(path, contents).map_err(io)
}

fn output_path(prefix: &str, suffix: &str) -> PathBuf {
    PathBuf::from(format!("{prefix}_{suffix}"))
}

/// Writes the SVG for `curves` to `path`.
pub fn emit_plot(curves: &CurveSet, title: &str, path: &Path) -> Result<()> {
    write_file(path, &render_svg(curves, title))
}

#[derive(Debug, Clone)]
pub struct RatesReport {
    pub curves: CurveSet,
    pub ordering: Vec<RateOrdering>,
    pub files: Vec<PathBuf>,
}

/// Series shown in the rates plot, with their legend names.
pub const PLOT_SERIES: &[(&str, &str)] = &[
    ("log10_mise_ew", "EW"),
    ("log10_mise_sb", "SB"),
    ("log10_prior_ew", "prior EW"),
    ("log10_prior_sb", "prior SB"),
];

pub fn run_rate_curves(cfg: &ExperimentConfig) -> Result<RatesReport> {
    let curves = rate_curves(&cfg.n_list, &cfg.schedules, &cfg.bp)?;
    let ordering = cfg
        .n_list
        .iter()
        .map(|&n| rate_ordering(n, &cfg.schedules, &cfg.bp))
        .collect();
    let csv_path = output_path(&cfg.out_prefix, "rates.csv");
    let svg_path = output_path(&cfg.out_prefix, "rates.svg");
    write_file(&csv_path, &curves.to_csv())?;
    let s = &cfg.schedules;
    let title = format!(
        "MISE orders (omega={}, b={}, t={}, r={})",
        s.omega, s.b, s.t, s.r
    );
    emit_plot(&curves.select(PLOT_SERIES)?, &title, &svg_path)?;
    Ok(RatesReport {
        curves,
        ordering,
        files: vec![csv_path, svg_path],
    })
}

/// `ln ε_n` solving `ε*_n = n^{-r}` for the EW model, capped at `ln 0.5`.
/// Stays finite (and exact) far below the `f64` range of `ε_n` itself.
pub fn calibrated_ln_eps_n(n: u64, s: &ParamSchedules, h0: f64) -> f64 {
    let nf = n as f64;
    let alpha = s.alpha(nf);
    let bn = s.b_n(nf);
    let logit =
        -s.r * nf.ln() - nf * (s.a + s.c1).powi(2) / (2.0 * bn * bn) - nf * (nf / alpha).ln_1p()
            + nf * h0.ln();
    // ln σ(x) = x - ln(1 + eˣ)
    let ln_eps = if logit > 0.0 {
        -(-logit).exp().ln_1p()
    } else {
        logit - logit.exp().ln_1p()
    };
    if ln_eps.is_finite() {
        ln_eps.min(0.5f64.ln())
    } else {
        -f64::MAX
    }
}

/// Both model summaries for one `(n, rep)`; each fails independently.
#[derive(Debug)]
pub struct ReplicateOutcome {
    pub n: u64,
    pub rep: usize,
    pub ew: Result<PosteriorSummary>,
    pub sb: Result<PosteriorSummary>,
}

pub fn simulate_replicate(cfg: &ExperimentConfig, n: u64, rep: usize) -> ReplicateOutcome {
    let seed = replicate_seed(cfg.seed, n, rep as u64);
    let mut data_rng = ChaCha8Rng::seed_from_u64(seed);
    let setup = (|| {
        let data = cfg.td.sample(n as usize, &mut data_rng)?;
        let s = &cfg.schedules;
        let nf = n as f64;
        let sigma_n = s.sigma_n(nf);
        let half = s.a + s.c;
        let ln_eps = calibrated_ln_eps_n(n, s, cfg.bp.mass(-half, half));
        let sp = SigmaPrior::with_ln_eps(sigma_n, ln_eps, s.bn_ratio, cfg.chain.sigma_grid_size)?;
        Ok::<_, Error>((data, sp))
    })();
    let (data, sp) = match setup {
        Ok(v) => v,
        Err(e) => {
            let msg = e.to_string();
            return ReplicateOutcome {
                n,
                rep,
                ew: Err(e),
                sb: Err(Error::Config(msg)),
            };
        }
    };
    let grid = cfg.grid.points();
    let truth: Vec<f64> = grid.iter().map(|&y| cfg.td.eval(y)).collect();
    let s = &cfg.schedules;
    let alpha = s.alpha(n as f64);
    let sigma0 = sp.sigma_n() / 2.0;

    let ew = (|| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(1);
        let sampler = EwSampler::new(alpha, cfg.bp, Some(sp.clone()))?;
        let mut state = EwState::from_data(&data, sigma0)?;
        let mut acc = DensityAccumulator::new(grid.clone());
        for it in 0..cfg.chain.burn_in + cfg.chain.retained {
            sampler.step(&mut state, &data, &mut rng)?;
            if it >= cfg.chain.burn_in {
                acc.push_ew(&state, alpha, &cfg.bp, s.k)?;
            }
        }
        acc.finish(&truth)
    })();

    let sb = (|| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(2);
        let m = s.m_components(n as usize);
        let sampler = SbSampler::new(alpha, cfg.bp, Some(sp.clone()))?;
        let mut state = SbState::init_from_data(&data, m, sigma0, None)?;
        let mut acc = DensityAccumulator::new(grid.clone());
        for it in 0..cfg.chain.burn_in + cfg.chain.retained {
            sampler.step(&mut state, &data, &mut rng)?;
            if it >= cfg.chain.burn_in {
                acc.push_sb(&state, s.k)?;
            }
        }
        acc.finish(&truth)
    })();

    ReplicateOutcome { n, rep, ew, sb }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimRow {
    pub n: u64,
    pub rep: usize,
    pub model: Model,
    pub mise2: Option<f64>,
    pub empty_freq: Option<f64>,
    pub status: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimAggregate {
    pub n: u64,
    pub model: Model,
    /// Replicates that finished.
    pub ok: usize,
    pub mean_mise2: f64,
    /// Standard error of the mean; NaN with fewer than two replicates.
    pub se_mise2: f64,
    pub mean_empty_freq: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WrongModelCurve {
    pub n: u64,
    pub grid: Vec<f64>,
    /// EW posterior-mean density averaged over replicates.
    pub ew_mean_density: Vec<f64>,
    pub target: Vec<f64>,
    pub sup_distance: f64,
}

#[derive(Debug, Clone)]
pub struct SimulationReport {
    pub rows: Vec<SimRow>,
    pub aggregates: Vec<SimAggregate>,
    pub wrong_model: Vec<WrongModelCurve>,
    pub files: Vec<PathBuf>,
}

impl SimulationReport {
    pub fn aggregate(&self, n: u64, model: Model) -> Option<&SimAggregate> {
        self.aggregates
            .iter()
            .find(|a| a.n == n && a.model == model)
    }
}

fn mean_se(xs: &[f64]) -> (f64, f64) {
    let k = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / k;
    if xs.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (k - 1.0);
    (mean, (var / k).sqrt())
}

fn opt_value(v: Option<f64>) -> String {
    v.map(format_value).unwrap_or_default()
}

fn clean_status(s: &str) -> String {
    s.replace([',', '\n', '\r'], ";")
}

/// Runs every `(n, rep)` pair in parallel, then builds rows, aggregates and
/// wrong-model curves in `(n, rep)` order.
pub fn simulate(cfg: &ExperimentConfig) -> Result<SimulationReport> {
    cfg.schedules.validate()?;
    let jobs: Vec<(u64, usize)> = cfg
        .n_list
        .iter()
        .flat_map(|&n| (0..cfg.reps).map(move |r| (n, r)))
        .collect();
    let outcomes: Vec<ReplicateOutcome> = jobs
        .par_iter()
        .map(|&(n, r)| simulate_replicate(cfg, n, r))
        .collect();

    let mut rows = Vec::with_capacity(2 * outcomes.len());
    for o in &outcomes {
        for (model, res) in [(Model::Ew, &o.ew), (Model::Sb, &o.sb)] {
            rows.push(match res {
                Ok(s) => SimRow {
                    n: o.n,
                    rep: o.rep,
                    model,
                    mise2: Some(s.mise2),
                    empty_freq: s.empty_component_freq,
                    status: "ok".into(),
                },
                Err(e) => SimRow {
                    n: o.n,
                    rep: o.rep,
                    model,
                    mise2: None,
                    empty_freq: None,
                    status: clean_status(&format!("failed: {e}")),
                },
            });
        }
    }

    let mut aggregates = Vec::new();
    for &n in &cfg.n_list {
        for model in [Model::Ew, Model::Sb] {
            let mine: Vec<&SimRow> = rows
                .iter()
                .filter(|r| r.n == n && r.model == model)
                .collect();
            let vals: Vec<f64> = mine.iter().filter_map(|r| r.mise2).collect();
            let (mean, se) = mean_se(&vals);
            let empties: Vec<f64> = mine.iter().filter_map(|r| r.empty_freq).collect();
            aggregates.push(SimAggregate {
                n,
                model,
                ok: vals.len(),
                mean_mise2: mean,
                se_mise2: se,
                mean_empty_freq: (!empties.is_empty()).then(|| mean_se(&empties).0),
            });
        }
    }

    let mut wrong_model = Vec::new();
    if cfg.schedules.omega > 1.0 {
        let grid = cfg.grid.points();
        let target: Vec<f64> = grid
            .iter()
            .map(|&y| wrong_model_target(&cfg.bp, cfg.schedules.k, y))
            .collect();
        for &n in &cfg.n_list {
            let curves: Vec<&PosteriorSummary> = outcomes
                .iter()
                .filter(|o| o.n == n)
                .filter_map(|o| o.ew.as_ref().ok())
                .collect();
            if curves.is_empty() {
                continue;
            }
            let k = curves.len() as f64;
            let mean: Vec<f64> = (0..grid.len())
                .map(|i| curves.iter().map(|c| c.mean_density[i]).sum::<f64>() / k)
                .collect();
            let sup = mean
                .iter()
                .zip(&target)
                .map(|(m, t)| (m - t).abs())
                .fold(0.0, f64::max);
            wrong_model.push(WrongModelCurve {
                n,
                grid: grid.clone(),
                ew_mean_density: mean,
                target: target.clone(),
                sup_distance: sup,
            });
        }
    }

    Ok(SimulationReport {
        rows,
        aggregates,
        wrong_model,
        files: Vec::new(),
    })
}

pub fn simulate_csv(rows: &[SimRow]) -> String {
    let mut out = format!("{SIMULATE_HEADER}\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.n,
            r.rep,
            model_tag(r.model),
            opt_value(r.mise2),
            opt_value(r.empty_freq),
            r.status
        );
    }
    out
}

pub fn summary_csv(aggs: &[SimAggregate]) -> String {
    let mut out = String::from("n,model,reps_ok,mean_mise2,se_mise2,mean_empty_freq\n");
    for a in aggs {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            a.n,
            model_tag(a.model),
            a.ok,
            format_value(a.mean_mise2),
            format_value(a.se_mise2),
            opt_value(a.mean_empty_freq)
        );
    }
    out
}

pub fn wrong_model_csv(curves: &[WrongModelCurve]) -> String {
    let mut out = String::from("n,y,ew_mean_density,target\n");
    for c in curves {
        for ((y, m), t) in c.grid.iter().zip(&c.ew_mean_density).zip(&c.target) {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                c.n,
                format_value(*y),
                format_value(*m),
                format_value(*t)
            );
        }
    }
    out
}

/// Simulation plus its files: `<prefix>_simulate.csv`,
/// `<prefix>_simulate_summary.csv`, and `<prefix>_wrong_model.csv` when ω > 1.
pub fn run_posterior_experiment(cfg: &ExperimentConfig) -> Result<SimulationReport> {
    let mut report = simulate(cfg)?;
    let rows_path = output_path(&cfg.out_prefix, "simulate.csv");
    let summary_path = output_path(&cfg.out_prefix, "simulate_summary.csv");
    write_file(&rows_path, &simulate_csv(&report.rows))?;
    write_file(&summary_path, &summary_csv(&report.aggregates))?;
    report.files = vec![rows_path, summary_path];
    if !report.wrong_model.is_empty() {
        let p = output_path(&cfg.out_prefix, "wrong_model.csv");
        write_file(&p, &wrong_model_csv(&report.wrong_model))?;
        report.files.push(p);
    }
    Ok(report)
}

/// Analytic orders next to empirical log₁₀ MISE, one row per `n`.
pub fn compare_csv(rates: &CurveSet, sim: &SimulationReport) -> Result<String> {
    let ew = rates
        .series("log10_mise_ew")
        .ok_or_else(|| Error::Shape("rates lack log10_mise_ew".into()))?;
    let sb = rates
        .series("log10_mise_sb")
        .ok_or_else(|| Error::Shape("rates lack log10_mise_sb".into()))?;
    let mut out =
        String::from("n,log10_mise_ew,log10_mise_sb,log10_emp_mise_ew,log10_emp_mise_sb\n");
    for (i, &n) in rates.n.iter().enumerate() {
        let emp = |m| {
            sim.aggregate(n, m)
                .map(|a| format_value(a.mean_mise2.log10()))
                .unwrap_or_default()
        };
        let _ = writeln!(
            out,
            "{n},{},{},{},{}",
            format_value(ew[i]),
            format_value(sb[i]),
            emp(Model::Ew),
            emp(Model::Sb)
        );
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct CompareReport {
    pub rates: RatesReport,
    pub simulation: SimulationReport,
    pub files: Vec<PathBuf>,
}

pub fn run_compare(cfg: &ExperimentConfig) -> Result<CompareReport> {
    let rates = run_rate_curves(cfg)?;
    let simulation = run_posterior_experiment(cfg)?;
    let path = output_path(&cfg.out_prefix, "compare.csv");
    write_file(&path, &compare_csv(&rates.curves, &simulation)?)?;
    let mut files = rates.files.clone();
    files.extend(simulation.files.iter().cloned());
    files.push(path);
    Ok(CompareReport {
        rates,
        simulation,
        files,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_cfg(prefix: &str) -> ExperimentConfig {
        ExperimentConfig::parse(&format!(
            "mode = simulate\nt = 0.1\nn_list = 20, 40\nreps = 2\nburn_in = 20\nretained = 30\n\
             grid_points = 81\nseed = 11\nout_prefix = {prefix}\n"
        ))
        .unwrap()
    }

    #[test]
    fn seeds_depend_on_all_inputs() {
        let base = replicate_seed(1, 50, 0);
        assert_ne!(base, replicate_seed(2, 50, 0));
        assert_ne!(base, replicate_seed(1, 51, 0));
        assert_ne!(base, replicate_seed(1, 50, 1));
        assert_eq!(base, replicate_seed(1, 50, 0));
    }

    #[test]
    fn calibrated_eps_stays_in_range() {
        let s = ParamSchedules {
            t: 0.1,
            ..ParamSchedules::default()
        };
        for n in [2, 10, 50, 800, 100_000] {
            let e = calibrated_ln_eps_n(n, &s, 0.3);
            assert!(e.is_finite() && e <= 0.5f64.ln(), "{n}: {e}");
        }
        // n = 200: -n(a+c₁)²/(2b_n²) ≈ -42300 dominates, far below ln(f64::MIN_POSITIVE)
        let e = calibrated_ln_eps_n(200, &s, 0.3);
        assert!(e < -40_000.0 && e > -50_000.0, "{e}");
    }

    #[test]
    fn replicate_is_reproducible() {
        let cfg = small_cfg("unused");
        let a = simulate_replicate(&cfg, 20, 1);
        let b = simulate_replicate(&cfg, 20, 1);
        assert_eq!(a.ew.unwrap().mise2, b.ew.unwrap().mise2);
        assert_eq!(a.sb.unwrap().mise2, b.sb.unwrap().mise2);
    }

    #[test]
    fn rows_and_aggregates() {
        let cfg = small_cfg("unused");
        let rep = simulate(&cfg).unwrap();
        assert_eq!(rep.rows.len(), 2 * 2 * 2);
        assert!(rep.rows.iter().all(|r| r.status == "ok"));
        assert!(rep
            .rows
            .iter()
            .filter(|r| r.model == Model::Ew)
            .all(|r| r.empty_freq.is_none()));
        assert!(rep
            .rows
            .iter()
            .filter(|r| r.model == Model::Sb)
            .all(|r| r.empty_freq.is_some()));
        let a = rep.aggregate(40, Model::Sb).unwrap();
        assert_eq!(a.ok, 2);
        assert!(a.se_mise2.is_finite());
        assert!(rep.wrong_model.is_empty());
        let csv = simulate_csv(&rep.rows);
        assert!(csv.starts_with("n,rep,model,mise2,empty_freq,status\n"));
        assert_eq!(csv.lines().count(), 9);
    }

    #[test]
    fn unrepresentable_sigma_is_recorded_not_fatal() {
        let mut cfg = small_cfg("unused");
        cfg.schedules.t = 3.0;
        let rep = simulate(&cfg).unwrap();
        assert!(rep
            .rows
            .iter()
            .all(|r| r.status.starts_with("failed") && r.mise2.is_none()));
        assert!(!simulate_csv(&rep.rows)
            .lines()
            .skip(1)
            .any(|l| l.split(',').count() != 6));
    }

    #[test]
    fn mean_se_cases() {
        let (m, s) = mean_se(&[1.0, 3.0]);
        assert_eq!(m, 2.0);
        assert!((s - 1.0).abs() < 1e-15);
        assert!(mean_se(&[1.0]).1.is_nan());
    }
}
