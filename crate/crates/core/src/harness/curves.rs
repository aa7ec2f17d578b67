//! Rate curves over a list of sample sizes and their CSV form.

use crate::error::{Error, Result};
use crate::model::{BasePrior, ParamSchedules};
use crate::rates::{
    h_opt_prior, log10_br_gvv, log10_fmise, mise_order_ew, mise_order_sb, prior_mise, rate_terms,
    Model, RateInputs, NEG_INF,
};

pub const RATES_COLUMNS: &[&str] = &[
    "log10_alpha_frac_sq",
    "log10_B_n",
    "log10_eps_star_n",
    "log10_sigma_n_sq",
    "log10_empty",
    "log10_M_B_M",
    "log10_eps_star_M",
    "log10_mise_ew",
    "log10_mise_sb",
    "log10_prior_ew",
    "log10_prior_sb",
    "log10_fmise",
    "log10_br_gvv",
];

/// Named series sharing one `n` axis. Values are log10 and may be `-inf`.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveSet {
    pub n: Vec<u64>,
    pub names: Vec<String>,
    /// `values[s][i]` is series `s` at `n[i]`.
    pub values: Vec<Vec<f64>>,
}

impl CurveSet {
    pub fn new(n: Vec<u64>, names: Vec<String>, values: Vec<Vec<f64>>) -> Result<Self> {
        if names.len() != values.len() {
            return Err(Error::Shape(format!(
                "{} names for {} series",
                names.len(),
                values.len()
            )));
        }
        if let Some(bad) = values.iter().find(|v| v.len() != n.len()) {
            return Err(Error::Shape(format!(
                "series of length {} on {} points",
                bad.len(),
                n.len()
            )));
        }
        Ok(Self { n, names, values })
    }

    pub fn series(&self, name: &str) -> Option<&[f64]> {
        self.names
            .iter()
            .position(|s| s == name)
            .map(|i| self.values[i].as_slice())
    }

    /// Keeps the listed series, renamed; missing names are a shape error.
    pub fn select(&self, pick: &[(&str, &str)]) -> Result<CurveSet> {
        let mut names = Vec::new();
        let mut values = Vec::new();
        for (from, to) in pick {
            let s = self
                .series(from)
                .ok_or_else(|| Error::Shape(format!("no series named `{from}`")))?;
            names.push(to.to_string());
            values.push(s.to_vec());
        }
        CurveSet::new(self.n.clone(), names, values)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("n");
        for name in &self.names {
            out.push(',');
            out.push_str(name);
        }
        out.push('\n');
        for (i, n) in self.n.iter().enumerate() {
            out.push_str(&n.to_string());
            for s in &self.values {
                out.push(',');
                out.push_str(&format_value(s[i]));
            }
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<CurveSet> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Shape("empty CSV".into()))?;
        let mut cols = header.split(',').map(str::trim);
        if cols.next() != Some("n") {
            return Err(Error::Shape("first column must be `n`".into()));
        }
        let names: Vec<String> = cols.map(String::from).collect();
        let mut n = Vec::new();
        let mut values = vec![Vec::new(); names.len()];
        for (row, line) in lines.enumerate() {
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != names.len() + 1 {
                return Err(Error::Shape(format!(
                    "row {} has {} fields, expected {}",
                    row + 1,
                    fields.len(),
                    names.len() + 1
                )));
            }
            n.push(fields[0].parse::<u64>().map_err(|e| {
                Error::Shape(format!("row {}: bad n `{}`: {e}", row + 1, fields[0]))
            })?);
            for (s, f) in values.iter_mut().zip(&fields[1..]) {
                s.push(
                    f.parse::<f64>().map_err(|e| {
                        Error::Shape(format!("row {}: bad value `{f}`: {e}", row + 1))
                    })?,
                );
            }
        }
        CurveSet::new(n, names, values)
    }
}

/// Shortest round-trip form; `-inf` for underflowed terms.
pub fn format_value(v: f64) -> String {
    if v == NEG_INF {
        "-inf".to_string()
    } else {
        format!("{v:?}")
    }
}

/// Every rate column at every `n`. O-constants are taken as 1.
pub fn rate_curves(n_list: &[u64], schedules: &ParamSchedules, bp: &BasePrior) -> Result<CurveSet> {
    schedules.validate()?;
    let mut values = vec![Vec::with_capacity(n_list.len()); RATES_COLUMNS.len()];
    for &n in n_list {
        let rt = rate_terms(&RateInputs::new(n, *schedules, *bp));
        let nf = n as f64;
        let m = schedules.m_real(nf);
        let prior_ew = prior_mise(Model::Ew, nf, rt.alpha, h_opt_prior(rt.alpha + nf))?;
        let prior_sb = prior_mise(Model::Sb, m, rt.alpha, h_opt_prior(m))?;
        let row = [
            rt.alpha_frac_sq,
            rt.b_n,
            rt.eps_star_n,
            rt.sigma_n_sq,
            rt.empty_term,
            rt.m_b_m,
            rt.eps_star_m,
            mise_order_ew(&rt),
            mise_order_sb(&rt),
            prior_ew,
            prior_sb,
            log10_fmise(nf),
            log10_br_gvv(nf),
        ];
        for (col, v) in values.iter_mut().zip(row) {
            col.push(v);
        }
    }
    CurveSet::new(
        n_list.to_vec(),
        RATES_COLUMNS.iter().map(|s| s.to_string()).collect(),
        values,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curves() -> CurveSet {
        let s = ParamSchedules::default();
        let bp = BasePrior::new(2.0, 1.0).unwrap();
        rate_curves(&[10, 100, 1000, 1_000_000], &s, &bp).unwrap()
    }

    #[test]
    fn header_is_fixed() {
        let csv = curves().to_csv();
        let header = csv.lines().next().unwrap();
        assert_eq!(
            header,
            "n,log10_alpha_frac_sq,log10_B_n,log10_eps_star_n,log10_sigma_n_sq,log10_empty,\
             log10_M_B_M,log10_eps_star_M,log10_mise_ew,log10_mise_sb,log10_prior_ew,\
             log10_prior_sb,log10_fmise,log10_br_gvv"
        );
    }

    #[test]
    fn csv_round_trip() {
        let c = curves();
        let back = CurveSet::from_csv(&c.to_csv()).unwrap();
        assert_eq!(back.n, c.n);
        assert_eq!(back.names, c.names);
        for (a, b) in c.values.iter().flatten().zip(back.values.iter().flatten()) {
            if a.is_finite() {
                assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
            } else {
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn underflow_written_as_neg_inf() {
        let c = curves();
        let csv = c.to_csv();
        assert_eq!(c.series("log10_B_n").unwrap()[1], NEG_INF);
        assert!(csv.lines().nth(2).unwrap().split(',').nth(2) == Some("-inf"));
        assert!(!csv.contains("NaN"));
    }

    #[test]
    fn select_renames() {
        let c = curves()
            .select(&[("log10_mise_ew", "EW"), ("log10_mise_sb", "SB")])
            .unwrap();
        assert_eq!(c.names, vec!["EW", "SB"]);
        assert!(curves().select(&[("nope", "x")]).is_err());
    }

    #[test]
    fn malformed_csv() {
        assert!(CurveSet::from_csv("").is_err());
        assert!(CurveSet::from_csv("x,a\n1,2\n").is_err());
        assert!(CurveSet::from_csv("n,a\n1,2,3\n").is_err());
        assert!(CurveSet::from_csv("n,a\n1,zz\n").is_err());
    }
}
