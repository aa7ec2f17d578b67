//! Flat `key = value` experiment configuration.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::{BasePrior, ParamSchedules, TrueDensity};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Rates,
    Simulate,
    Compare,
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "rates" => Ok(Mode::Rates),
            "simulate" => Ok(Mode::Simulate),
            "compare" => Ok(Mode::Compare),
            other => Err(format!(
                "unknown mode `{other}` (expected rates, simulate or compare)"
            )),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Rates => "rates",
            Mode::Simulate => "simulate",
            Mode::Compare => "compare",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChainSettings {
    pub burn_in: usize,
    pub retained: usize,
    pub sigma_grid_size: usize,
}

impl Default for ChainSettings {
    fn default() -> Self {
        Self {
            burn_in: 1000,
            retained: 4000,
            sigma_grid_size: 200,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl GridSpec {
    /// `[-a-c-6k, a+c+6k]` on 401 points.
    pub fn covering(a: f64, c: f64, k: f64) -> Self {
        let half = a + c + 6.0 * k;
        Self {
            min: -half,
            max: half,
            points: 401,
        }
    }

    pub fn points(&self) -> Vec<f64> {
        crate::math::linspace(self.min, self.max, self.points)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub schedules: ParamSchedules,
    pub bp: BasePrior,
    pub td: TrueDensity,
    pub n_list: Vec<u64>,
    pub reps: usize,
    pub chain: ChainSettings,
    pub seed: u64,
    pub out_prefix: String,
    pub grid: GridSpec,
    pub p: Option<u64>,
}

pub const KEYS: &[&str] = &[
    "mode",
    "omega",
    "b",
    "t",
    "r",
    "a",
    "c",
    "c1",
    "k",
    "mu0",
    "sigma0",
    "bn_ratio",
    "n_list",
    "reps",
    "burn_in",
    "retained",
    "sigma_grid_size",
    "seed",
    "grid_min",
    "grid_max",
    "grid_points",
    "out_prefix",
    "p",
    "f0_atoms",
];

/// Quarter-decade points from 10 to 10⁶.
pub fn default_n_list() -> Vec<u64> {
    (0..=20)
        .map(|i| 10f64.powf(1.0 + i as f64 / 4.0).round() as u64)
        .collect()
}

struct Entries {
    values: HashMap<String, (usize, String)>,
}

impl Entries {
    fn line(&self, key: &str) -> usize {
        self.values.get(key).map(|(l, _)| *l).unwrap_or(0)
    }

    fn err(&self, key: &str, msg: impl Into<String>) -> Error {
        Error::ConfigKey {
            line: self.line(key),
            key: key.to_string(),
            msg: msg.into(),
        }
    }

    fn get<T: FromStr>(&self, key: &str, default: T) -> Result<T>
    where
        T::Err: fmt::Display,
    {
        Ok(self.get_opt(key)?.unwrap_or(default))
    }

    fn get_opt<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: fmt::Display,
    {
        match self.values.get(key) {
            None => Ok(None),
            Some((line, raw)) => raw.parse::<T>().map(Some).map_err(|e| Error::ConfigKey {
                line: *line,
                key: key.to_string(),
                msg: format!("cannot parse `{raw}`: {e}"),
            }),
        }
    }
}

fn parse_list<T: FromStr>(raw: &str, sep: char) -> std::result::Result<Vec<T>, String>
where
    T::Err: fmt::Display,
{
    raw.split(sep)
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<T>()
                .map_err(|e| format!("cannot parse `{s}`: {e}"))
        })
        .collect()
}

fn parse_atoms(raw: &str) -> std::result::Result<Vec<(f64, f64)>, String> {
    raw.split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|pair| {
            let (loc, w) = pair
                .split_once(':')
                .ok_or_else(|| format!("atom `{pair}` is not `loc:weight`"))?;
            let loc = loc
                .trim()
                .parse::<f64>()
                .map_err(|e| format!("atom location `{loc}`: {e}"))?;
            let w = w
                .trim()
                .parse::<f64>()
                .map_err(|e| format!("atom weight `{w}`: {e}"))?;
            Ok((loc, w))
        })
        .collect()
}

impl ExperimentConfig {
    /// Parses a config whose `mode` key is mandatory.
    pub fn parse(text: &str) -> Result<Self> {
        Self::parse_with_mode(text, None)
    }

    /// `mode_override` (e.g. from a CLI subcommand) replaces the `mode` key
    /// and makes it optional.
    pub fn parse_with_mode(text: &str, mode_override: Option<Mode>) -> Result<Self> {
        let mut values: HashMap<String, (usize, String)> = HashMap::new();
        for (idx, raw_line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let content = raw_line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| Error::ConfigKey {
                line: line_no,
                key: content.to_string(),
                msg: "expected `key = value`".into(),
            })?;
            let key = key.trim().to_string();
            if !KEYS.contains(&key.as_str()) {
                return Err(Error::ConfigKey {
                    line: line_no,
                    key,
                    msg: "unknown key".into(),
                });
            }
            if let Some((first, _)) = values.get(&key) {
                return Err(Error::ConfigKey {
                    line: line_no,
                    key,
                    msg: format!("duplicate key (first set on line {first})"),
                });
            }
            values.insert(key, (line_no, value.trim().to_string()));
        }
        let e = Entries { values };

        let mode = match mode_override {
            Some(m) => m,
            None => match e.values.get("mode") {
                Some(_) => e.get::<Mode>("mode", Mode::Rates)?,
                None => {
                    return Err(Error::Config("missing mandatory key `mode`".into()));
                }
            },
        };

        let d = ParamSchedules::default();
        let schedules = ParamSchedules {
            omega: e.get("omega", d.omega)?,
            b: e.get("b", d.b)?,
            t: e.get("t", d.t)?,
            r: e.get("r", d.r)?,
            c1: e.get("c1", d.c1)?,
            k: e.get("k", d.k)?,
            a: e.get("a", d.a)?,
            c: e.get("c", d.c)?,
            bn_ratio: e.get("bn_ratio", d.bn_ratio)?,
        };
        for (key, v) in [
            ("omega", schedules.omega),
            ("b", schedules.b),
            ("t", schedules.t),
            ("r", schedules.r),
            ("c1", schedules.c1),
            ("k", schedules.k),
            ("a", schedules.a),
            ("c", schedules.c),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(e.err(key, format!("must be finite and positive, got {v}")));
            }
        }
        if let Err(err) = schedules.validate() {
            let key = if !(schedules.bn_ratio > 0.0 && schedules.bn_ratio < 1.0) {
                "bn_ratio"
            } else {
                "c1"
            };
            return Err(e.err(key, err.to_string()));
        }

        let mu0: f64 = e.get("mu0", 2.0)?;
        let sigma0: f64 = e.get("sigma0", 1.0)?;
        let bp = BasePrior::new(mu0, sigma0).map_err(|err| e.err("sigma0", err.to_string()))?;

        let atoms = match e.values.get("f0_atoms") {
            Some((_, raw)) => parse_atoms(raw).map_err(|m| e.err("f0_atoms", m))?,
            None => vec![(-0.75, 0.5), (0.75, 0.5)],
        };
        let td = TrueDensity::new(schedules.k, schedules.a, schedules.c, atoms)
            .map_err(|err| e.err("f0_atoms", err.to_string()))?;

        let n_list = match e.values.get("n_list") {
            Some((_, raw)) => parse_list::<u64>(raw, ',').map_err(|m| e.err("n_list", m))?,
            None => default_n_list(),
        };
        if n_list.is_empty() {
            return Err(e.err("n_list", "must not be empty"));
        }
        if n_list.windows(2).any(|w| w[0] >= w[1]) {
            return Err(e.err("n_list", "must be strictly increasing"));
        }
        if n_list[0] < 2 {
            return Err(e.err("n_list", "every n must be at least 2"));
        }

        let reps: usize = e.get("reps", 8)?;
        if reps == 0 {
            return Err(e.err("reps", "must be at least 1"));
        }
        let dc = ChainSettings::default();
        let chain = ChainSettings {
            burn_in: e.get("burn_in", dc.burn_in)?,
            retained: e.get("retained", dc.retained)?,
            sigma_grid_size: e.get("sigma_grid_size", dc.sigma_grid_size)?,
        };
        if chain.retained < 2 {
            return Err(e.err("retained", "must be at least 2"));
        }
        if chain.sigma_grid_size < 2 {
            return Err(e.err("sigma_grid_size", "must be at least 2"));
        }

        let seed: u64 = e.get("seed", 0)?;
        let out_prefix: String = e.get("out_prefix", "urnmise".to_string())?;
        if out_prefix.is_empty() {
            return Err(e.err("out_prefix", "must not be empty"));
        }

        let dg = GridSpec::covering(schedules.a, schedules.c, schedules.k);
        let grid = GridSpec {
            min: e.get("grid_min", dg.min)?,
            max: e.get("grid_max", dg.max)?,
            points: e.get("grid_points", dg.points)?,
        };
        if !(grid.min < grid.max) {
            return Err(e.err("grid_max", "grid_max must exceed grid_min"));
        }
        if grid.points < 2 {
            return Err(e.err("grid_points", "must be at least 2"));
        }

        let p: Option<u64> = e.get_opt("p")?;
        if p == Some(0) {
            return Err(e.err("p", "must be at least 1"));
        }

        Ok(Self {
            mode,
            schedules,
            bp,
            td,
            n_list,
            reps,
            chain,
            seed,
            out_prefix,
            grid,
            p,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_is_mode_error() {
        let err = ExperimentConfig::parse("").unwrap_err();
        assert!(err.to_string().contains("mode"), "{err}");
    }

    #[test]
    fn defaults_applied() {
        let cfg = ExperimentConfig::parse("mode = rates\nomega = 0.05\nt = 2\n").unwrap();
        assert_eq!(cfg.mode, Mode::Rates);
        assert_eq!(cfg.schedules.omega, 0.05);
        assert_eq!(cfg.schedules.t, 2.0);
        assert_eq!(cfg.schedules.b, 0.2);
        assert_eq!(cfg.schedules.r, 3.0);
        assert_eq!(cfg.bp.mu0(), 2.0);
        assert_eq!(cfg.bp.sigma0(), 1.0);
        assert_eq!(cfg.schedules.a, 1.0);
        assert_eq!(cfg.schedules.c, 0.5);
        assert_eq!(cfg.schedules.c1, 0.1);
        assert_eq!(cfg.schedules.k, 1.0);
        assert_eq!(cfg.schedules.bn_ratio, 0.5);
        assert_eq!(cfg.grid.points, 401);
        assert_eq!(cfg.grid.min, -7.5);
        assert_eq!(*cfg.n_list.first().unwrap(), 10);
        assert_eq!(*cfg.n_list.last().unwrap(), 1_000_000);
    }

    #[test]
    fn zero_reps_names_key_and_line() {
        let err = ExperimentConfig::parse("mode = simulate\n# comment\nreps = 0\n").unwrap_err();
        match err {
            Error::ConfigKey { line, key, .. } => {
                assert_eq!(key, "reps");
                assert_eq!(line, 3);
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn unknown_and_unparsable_keys() {
        let err = ExperimentConfig::parse("mode = rates\nfoo = 1\n").unwrap_err();
        assert!(matches!(err, Error::ConfigKey { ref key, line: 2, .. } if key == "foo"));
        let err = ExperimentConfig::parse("mode = rates\nomega = abc\n").unwrap_err();
        assert!(matches!(err, Error::ConfigKey { ref key, .. } if key == "omega"));
        let err = ExperimentConfig::parse("mode = sideways\n").unwrap_err();
        assert!(matches!(err, Error::ConfigKey { ref key, .. } if key == "mode"));
    }

    #[test]
    fn lists_and_atoms() {
        let cfg = ExperimentConfig::parse(
            "mode = simulate\nn_list = 50, 200,800\nf0_atoms = -1:0.25; 0.5:0.75\np = 7 # dim\n",
        )
        .unwrap();
        assert_eq!(cfg.n_list, vec![50, 200, 800]);
        assert_eq!(cfg.td.atoms(), &[(-1.0, 0.25), (0.5, 0.75)]);
        assert_eq!(cfg.p, Some(7));
        let err = ExperimentConfig::parse("mode = rates\nn_list = 10, 5\n").unwrap_err();
        assert!(matches!(err, Error::ConfigKey { ref key, .. } if key == "n_list"));
        let err = ExperimentConfig::parse("mode = rates\nf0_atoms = 0:0.5\n").unwrap_err();
        assert!(matches!(err, Error::ConfigKey { ref key, .. } if key == "f0_atoms"));
    }

    #[test]
    fn mode_override() {
        let cfg = ExperimentConfig::parse_with_mode("omega = 0.1\n", Some(Mode::Compare)).unwrap();
        assert_eq!(cfg.mode, Mode::Compare);
    }

    #[test]
    fn invariant_violation_names_key() {
        let err = ExperimentConfig::parse("mode = rates\nbn_ratio = 1.5\n").unwrap_err();
        assert!(
            matches!(err, Error::ConfigKey { ref key, line: 2, .. } if key == "bn_ratio"),
            "{err}"
        );
        let err = ExperimentConfig::parse("mode = rates\nretained = 1\n").unwrap_err();
        assert!(matches!(err, Error::ConfigKey { ref key, .. } if key == "retained"));
    }
}
