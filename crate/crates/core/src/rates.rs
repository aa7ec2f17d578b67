//! Log₁₀-space evaluation of the posterior and prior MISE order terms for the
//! EW and SB models, the term-by-term comparison ratios, the optimal-α form
//! of the EW order, and the wrong-model regime classifier.
//!
//! All O(·) constants are 1: every value here is an order, not a calibrated
//! MISE. Terms that underflow even in log space come back as [`NEG_INF`].

use std::f64::consts::LN_10;

use crate::error::{domain, Error, Result};
use crate::math::{log10_sum, normal_pdf};
use crate::model::{BasePrior, ParamSchedules};

/// Sentinel for a term whose log₁₀ is below anything representable.
pub const NEG_INF: f64 = f64::NEG_INFINITY;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    Ew,
    Sb,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateInputs {
    pub n: u64,
    pub schedules: ParamSchedules,
    pub bp: BasePrior,
    /// Data dimension for the large-p orders.
    pub p: Option<u64>,
}

impl RateInputs {
    pub fn new(n: u64, schedules: ParamSchedules, bp: BasePrior) -> Self {
        Self {
            n,
            schedules,
            bp,
            p: None,
        }
    }

    pub fn with_p(mut self, p: u64) -> Self {
        self.p = Some(p);
        self
    }
}

/// log₁₀ of every bound term at one `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateTerms {
    pub n: f64,
    pub alpha: f64,
    pub m: f64,
    pub alpha_frac_sq: f64,
    pub b_n: f64,
    pub eps_star_n: f64,
    pub sigma_n_sq: f64,
    pub empty_term: f64,
    pub b_m: f64,
    pub m_b_m: f64,
    pub eps_star_m: f64,
    pub h0: f64,
    pub p_b_n: Option<f64>,
    pub m_p_b_m: Option<f64>,
    pub eps_l_n: Option<f64>,
    pub eps_l_m: Option<f64>,
}

/// `log₁₀(1 + x)` without cancellation for small `x`.
fn log10_1p(x: f64) -> f64 {
    x.ln_1p() / LN_10
}

/// `log₁₀[count_factor · e^{-c²/(4σ_n²)}]` given `ln σ_n²`; returns [`NEG_INF`]
/// once the exponent overflows.
pub fn log10_tail_bound(log10_count_factor: f64, c: f64, ln_sigma_n_sq: f64) -> f64 {
    let exponent = (2.0 * c.ln() - 4f64.ln() - ln_sigma_n_sq).exp();
    if !exponent.is_finite() {
        return NEG_INF;
    }
    log10_count_factor - exponent / LN_10
}

/// log₁₀ of the empty-component term `(1 - 1/M)ⁿ ((α+M)/α)^M`.
pub fn log10_empty_term(n: f64, alpha: f64, m: f64) -> f64 {
    if m <= 1.0 {
        return NEG_INF;
    }
    n * log10_1p(-1.0 / m) + m * log10_1p(m / alpha)
}

pub fn rate_terms(ri: &RateInputs) -> RateTerms {
    let s = &ri.schedules;
    let n = ri.n as f64;
    let alpha = s.alpha(n);
    let m = s.m_real(n);
    let half = s.a + s.c;
    let h0 = ri.bp.mass(-half, half).log10();

    let ln_sig2 = s.ln_sigma_n_sq(n);
    let sigma_n_sq = if ln_sig2.is_finite() {
        ln_sig2 / LN_10
    } else {
        NEG_INF
    };

    // log₁₀((α+n)/α) and log₁₀((α+M)/α)
    let growth_n = log10_1p(n / alpha);
    let growth_m = log10_1p(m / alpha);

    let alpha_frac_sq = -2.0 * growth_n;
    let b_n = log10_tail_bound(growth_n, s.c, ln_sig2);
    let b_m = log10_tail_bound(growth_m, s.c, ln_sig2);
    let m_b_m = m.log10() + b_m;
    // ε*_n = n^{-r}
    let eps_star_n = -s.r * n.log10();
    let eps_star_m = eps_star_n - n * growth_n + m * growth_m + (n - m) * h0;
    let empty_term = log10_empty_term(n, alpha, m);

    let (p_b_n, m_p_b_m, eps_l_n, eps_l_m) = match ri.p {
        Some(p) => {
            let lp = (p as f64).log10();
            let pf = p as f64;
            (
                Some(lp + b_n),
                Some(m.log10() + lp + b_m),
                Some(eps_star_n),
                Some(eps_star_n - n * growth_n + m * growth_m + pf * (n - m) * h0),
            )
        }
        None => (None, None, None, None),
    };

    RateTerms {
        n,
        alpha,
        m,
        alpha_frac_sq,
        b_n,
        eps_star_n,
        sigma_n_sq,
        empty_term,
        b_m,
        m_b_m,
        eps_star_m,
        h0,
        p_b_n,
        m_p_b_m,
        eps_l_n,
        eps_l_m,
    }
}

pub fn mise_order_ew(rt: &RateTerms) -> f64 {
    log10_sum(&[rt.alpha_frac_sq, rt.b_n, rt.eps_star_n, rt.sigma_n_sq])
}

pub fn mise_order_sb(rt: &RateTerms) -> f64 {
    log10_sum(&[rt.empty_term, rt.m_b_m, rt.eps_star_m, rt.sigma_n_sq])
}

pub fn mise_order_largep(rt: &RateTerms, which: Model) -> Result<f64> {
    let missing = || Error::Config("large-p order needs the data dimension p".into());
    match which {
        Model::Ew => {
            let pb = rt.p_b_n.ok_or_else(missing)?;
            let el = rt.eps_l_n.ok_or_else(missing)?;
            Ok(log10_sum(&[rt.alpha_frac_sq, pb, el, rt.sigma_n_sq]))
        }
        Model::Sb => {
            let mpb = rt.m_p_b_m.ok_or_else(missing)?;
            let el = rt.eps_l_m.ok_or_else(missing)?;
            Ok(log10_sum(&[rt.empty_term, mpb, el, rt.sigma_n_sq]))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonRatios {
    /// `log₁₀(ε*_M / ε*_n)`
    pub eps_ratio: f64,
    /// `M(α+M) < α+n`, i.e. `M·B_M < B_n`
    pub tail_condition: bool,
    /// `log₁₀[(1-1/M)ⁿ((α+M)/α)^M / (α/(α+n))²]`
    pub empty_ratio: f64,
}

pub fn comparison_ratios(n: u64, schedules: &ParamSchedules, bp: &BasePrior) -> ComparisonRatios {
    let rt = rate_terms(&RateInputs::new(n, *schedules, *bp));
    ComparisonRatios {
        eps_ratio: rt.eps_star_m - rt.eps_star_n,
        tail_condition: rt.m * (rt.alpha + rt.m) < rt.alpha + rt.n,
        empty_ratio: rt.empty_term - rt.alpha_frac_sq,
    }
}

/// log₁₀ of the frequentist-form EW order with `σ_n² = n^{-t}`:
/// `(α/(α+n))² + ((α+n)/α) e^{-c²nᵗ/4} + n^{-r} + n^{-t}`.
pub fn log10_mise_ew_freq(n: f64, alpha: f64, t: f64, c: f64, r: f64) -> f64 {
    let [a, b] = log10_mise_ew_freq_alpha_part(n, alpha, t, c);
    log10_sum(&[a, b, -r * n.log10(), -t * n.log10()])
}

/// The two α-dependent terms of [`log10_mise_ew_freq`], in log₁₀.
pub fn log10_mise_ew_freq_alpha_part(n: f64, alpha: f64, t: f64, c: f64) -> [f64; 2] {
    let growth = log10_1p(n / alpha);
    let k = c * c * n.powf(t) / 4.0;
    [-2.0 * growth, growth - k / LN_10]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimalAlpha {
    /// `α*`; exactly 0 once it underflows f64.
    pub alpha: f64,
    pub log10_alpha: f64,
    /// log₁₀ of the EW order at `α*`.
    pub log10_mise: f64,
}

/// Minimizer `α* = n (1/(1 - x) - 1)` with `x = e^{-c²nᵗ/12} / 2^{1/3}`, and
/// the EW order there: `x² + 2^{1/3} e^{-c²nᵗ/6} + n^{-r} + n^{-t}`.
pub fn optimal_alpha_ew(n: f64, t: f64, c: f64, r: f64) -> Result<OptimalAlpha> {
    if !(n >= 2.0 && t > 0.0 && c > 0.0) {
        return Err(domain(format!(
            "optimal alpha needs n >= 2, t > 0, c > 0 (got {n}, {t}, {c})"
        )));
    }
    let cube_root_2_ln = 2f64.ln() / 3.0;
    let k = c * c * n.powf(t);
    let ln_x = -k / 12.0 - cube_root_2_ln;
    let x = ln_x.exp();
    // α* = n x / (1 - x)
    let ln_alpha = n.ln() + ln_x - (-x).ln_1p();
    let alpha = ln_alpha.exp();
    let log10_mise = log10_sum(&[
        2.0 * ln_x / LN_10,
        (cube_root_2_ln - k / 6.0) / LN_10,
        -r * n.log10(),
        -t * n.log10(),
    ]);
    Ok(OptimalAlpha {
        alpha,
        log10_alpha: ln_alpha / LN_10,
        log10_mise,
    })
}

/// The optimized EW order with the constant term `2^{1/3} e^{c²}` exactly as
/// it appears in the original statement; it does not vanish in `n`.
pub fn log10_mise_ew_opt_as_printed(n: f64, t: f64, c: f64, r: f64) -> f64 {
    let cube_root_2_ln = 2f64.ln() / 3.0;
    let k = c * c * n.powf(t);
    let ln_x = -k / 12.0 - cube_root_2_ln;
    log10_sum(&[
        2.0 * ln_x / LN_10,
        (cube_root_2_ln + c * c) / LN_10,
        -r * n.log10(),
        -t * n.log10(),
    ])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateOrdering {
    pub sb: f64,
    pub ew: f64,
    pub fmise: f64,
    pub br_gvv: f64,
}

impl RateOrdering {
    /// `SB < EW < FMISE < BR_GVV`
    pub fn holds(&self) -> bool {
        self.sb < self.ew && self.ew < self.fmise && self.fmise < self.br_gvv
    }
}

/// `n^{-2/5}` in log₁₀.
pub fn log10_fmise(n: f64) -> f64 {
    -0.4 * n.log10()
}

/// `n^{-2/5} (log n)^{4/5}` in log₁₀.
pub fn log10_br_gvv(n: f64) -> f64 {
    -0.4 * n.log10() + 0.8 * n.ln().log10()
}

pub fn rate_ordering(n: u64, schedules: &ParamSchedules, bp: &BasePrior) -> RateOrdering {
    let rt = rate_terms(&RateInputs::new(n, *schedules, *bp));
    let nf = n as f64;
    RateOrdering {
        sb: mise_order_sb(&rt),
        ew: mise_order_ew(&rt),
        fmise: log10_fmise(nf),
        br_gvv: log10_br_gvv(nf),
    }
}

/// Prior-predictive order: SB `1/(Mh) + 1/(α+1) + h⁴`, EW
/// `1/((α+n)h) + 1/(α+1) + h⁴`, in log₁₀.
pub fn prior_mise(which: Model, n_or_m: f64, alpha: f64, h: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(domain(format!("bandwidth must be positive, got {h}")));
    }
    let effective = match which {
        Model::Sb => n_or_m,
        Model::Ew => alpha + n_or_m,
    };
    Ok(log10_sum(&[
        -(effective * h).log10(),
        -(alpha + 1.0).log10(),
        4.0 * h.log10(),
    ]))
}

/// Stationary point `(4M)^{-1/5}` of `1/(Mh) + h⁴`.
pub fn h_opt_prior(count: f64) -> f64 {
    (4.0 * count).powf(-0.2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    BothConsistent,
    EwWrongSbOk,
    BothCanBeWrong,
}

impl Regime {
    pub fn tag(&self) -> &'static str {
        match self {
            Regime::BothConsistent => "BOTH_CONSISTENT",
            Regime::EwWrongSbOk => "EW_WRONG_SB_OK",
            Regime::BothCanBeWrong => "BOTH_CAN_BE_WRONG",
        }
    }
}

/// EW is misled once `α ≻ n` (`ω > 1`); SB needs `ω > 1`, `b > 1` and
/// `ω - b > b`, plus `s > 2` when the `C_n` side condition is in force.
pub fn wrong_model_check(omega: f64, b: f64, s: f64, uses_cn_condition: bool) -> Regime {
    let ew_wrong = omega > 1.0;
    let sb_wrong = ew_wrong && b > 1.0 && omega - b > b && (!uses_cn_condition || s > 2.0);
    match (ew_wrong, sb_wrong) {
        (true, true) => Regime::BothCanBeWrong,
        (true, false) => Regime::EwWrongSbOk,
        _ => Regime::BothConsistent,
    }
}

/// Limit of the EW posterior mean when `α ≻ n`: the `N(μ₀, k² + σ₀²)` density.
pub fn wrong_model_target(bp: &BasePrior, k: f64, y: f64) -> f64 {
    normal_pdf(y, bp.mu0(), k.hypot(bp.sigma0()))
}
