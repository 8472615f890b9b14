//! Flat `key = value` configuration with `[section]` headers.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::{Family, ModelParams};
use crate::spectral::{Grid3, ProfileSpec};
use crate::yukawa::YukawaParams;

/// Every accepted key, with a one-line description (also shown by `--help`).
pub const KEYS: &[(&str, &str)] = &[
    ("experiment.id", "kernel-check | self-test | evolve | scatter | recon-ratio | recon-digits | recon-srh | nrl | decay | recon-full"),
    ("model.family", "nls | srh"),
    ("model.q0", "linear potential strength Q0 (nls)"),
    ("model.mu0", "linear potential screening mu0 (nls)"),
    ("model.q", "nonlinearity strength (Q1 or Q2)"),
    ("model.mu", "nonlinearity screening (mu1 or mu2)"),
    ("grid.n", "points per axis (even, >= 8)"),
    ("grid.length", "box side L"),
    ("time.horizon", "scattering horizon T"),
    ("time.dt", "Strang step"),
    ("time.t", "final time for evolve"),
    ("sweep.lambdas", "comma-separated scales"),
    ("sweep.eps", "comma-separated amplitudes"),
    ("sweep.alphas", "comma-separated Psi sample points"),
    ("scatter.epsilon", "amplitude for scatter"),
    ("scatter.lambda", "frame scale for scatter"),
    ("recon.depth", "binary digits J"),
    ("recon.cap", "integer scan cap"),
    ("profile.spec", "test profile, e.g. gaussian:width=2,cx=5,unit"),
    ("evolve.kind", "free | yukawa | semirel | nls | srh"),
    ("evolve.dump", "norms | fields"),
    ("output.dir", "output directory"),
    ("output.seed", "seed for random test fields"),
    ("run.threads", "worker threads for sweeps (0 = default)"),
];

/// Parsed `section.key -> value` map.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    pub entries: BTreeMap<String, String>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut section = String::new();
        let mut entries = BTreeMap::new();
        for (no, line) in text.lines().enumerate() {
            let line = line.split(['#', ';']).next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| Error::Config(format!("line {}: unterminated section header", no + 1)))?;
                section = name.trim().to_ascii_lowercase();
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", no + 1)))?;
            let key = if section.is_empty() {
                k.trim().to_ascii_lowercase()
            } else {
                format!("{section}.{}", k.trim().to_ascii_lowercase())
            };
            if !KEYS.iter().any(|(name, _)| *name == key) {
                return Err(Error::Config(format!("line {}: unknown key `{key}`", no + 1)));
            }
            if entries.insert(key.clone(), v.trim().to_string()).is_some() {
                return Err(Error::Config(format!("line {}: duplicate key `{key}`", no + 1)));
            }
        }
        Ok(Self { entries })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.entries
            .get(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|_| Error::Config(format!("bad value `{v}` for `{key}`")))
            })
            .transpose()
    }

    fn list(&self, key: &str) -> Result<Option<Vec<f64>>> {
        self.entries.get(key).map(|v| parse_list(v)).transpose()
    }
}

pub fn parse_list(v: &str) -> Result<Vec<f64>> {
    v.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("bad number `{s}` in list `{v}`")))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    KernelCheck,
    SelfTest,
    Evolve,
    Scatter,
    ReconRatio,
    ReconDigits,
    ReconSrh,
    Nrl,
    Decay,
    ReconFull,
}

impl Experiment {
    pub const ALL: [Experiment; 10] = [
        Experiment::KernelCheck,
        Experiment::SelfTest,
        Experiment::Evolve,
        Experiment::Scatter,
        Experiment::ReconRatio,
        Experiment::ReconDigits,
        Experiment::ReconSrh,
        Experiment::Nrl,
        Experiment::Decay,
        Experiment::ReconFull,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Experiment::KernelCheck => "kernel-check",
            Experiment::SelfTest => "self-test",
            Experiment::Evolve => "evolve",
            Experiment::Scatter => "scatter",
            Experiment::ReconRatio => "recon-ratio",
            Experiment::ReconDigits => "recon-digits",
            Experiment::ReconSrh => "recon-srh",
            Experiment::Nrl => "nrl",
            Experiment::Decay => "decay",
            Experiment::ReconFull => "recon-full",
        }
    }
}

impl FromStr for Experiment {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .iter()
            .copied()
            .find(|e| e.name() == s.trim())
            .ok_or_else(|| Error::Config(format!("unknown experiment `{s}`")))
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvolveKind {
    Free,
    Yukawa,
    Semirel,
    Nls,
    Srh,
}

impl FromStr for EvolveKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "free" => Ok(Self::Free),
            "yukawa" => Ok(Self::Yukawa),
            "semirel" => Ok(Self::Semirel),
            "nls" => Ok(Self::Nls),
            "srh" => Ok(Self::Srh),
            other => Err(Error::Config(format!("unknown evolve kind `{other}`"))),
        }
    }
}

impl fmt::Display for EvolveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Free => "free",
            Self::Yukawa => "yukawa",
            Self::Semirel => "semirel",
            Self::Nls => "nls",
            Self::Srh => "srh",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dump {
    Norms,
    Fields,
}

impl FromStr for Dump {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "norms" => Ok(Self::Norms),
            "fields" => Ok(Self::Fields),
            other => Err(Error::Config(format!("unknown dump mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    /// Planted truth for round trips.
    pub model: ModelParams,
    pub grid: Grid3,
    pub horizon: f64,
    pub dt: f64,
    pub t: f64,
    pub lambdas: Vec<f64>,
    pub eps: Vec<f64>,
    pub alphas: Vec<f64>,
    pub epsilon: f64,
    pub lambda: f64,
    pub depth: u32,
    pub cap: u32,
    pub profile: ProfileSpec,
    pub kind: EvolveKind,
    pub dump: Dump,
    pub out: PathBuf,
    pub seed: u64,
    pub threads: usize,
}

impl ExperimentConfig {
    /// Defaults for `experiment`: `L = 40, n = 48, T = 8, dt = 0.005`
/// (`L = n = 64, dt = 0.02` for the decay run).
    pub fn defaults(experiment: Experiment) -> Self {
        let srh = experiment == Experiment::ReconSrh;
        Self {
            experiment,
            model: if srh {
                ModelParams::srh(1.0, 1.0).expect("admissible")
            } else {
                ModelParams::nls(0.5, 1.0, 1.25, 2.0).expect("admissible")
            },
            grid: match experiment {
                Experiment::Decay => Grid3::new(64, 64.0),
                _ => Grid3::new(48, 40.0),
            }
            .expect("valid grid"),
            horizon: 8.0,
            dt: match experiment {
                Experiment::Decay => 0.02,
                _ => 0.005,
            },
            t: 1.0,
            lambdas: match experiment {
                Experiment::Nrl => vec![4.0, 8.0, 16.0],
                _ => vec![2.0, 4.0, 8.0],
            },
            eps: vec![0.2, 0.1, 0.05],
            alphas: vec![-2.0, -1.0, -0.5, 0.5, 1.0, 2.0],
            epsilon: 0.1,
            lambda: 1.0,
            depth: crate::recon::DEFAULT_DEPTH,
            cap: crate::recon::DEFAULT_CAP,
            profile: default_profile(experiment),
            kind: EvolveKind::Yukawa,
            dump: Dump::Norms,
            out: PathBuf::from("out"),
            seed: 7,
            threads: 0,
        }
    }

    /// Defaults overlaid with the values present in `raw`.
    pub fn from_raw(experiment: Option<Experiment>, raw: &RawConfig) -> Result<Self> {
        let id = match (experiment, raw.get::<Experiment>("experiment.id")?) {
            (Some(e), _) => e,
            (None, Some(e)) => e,
            (None, None) => return Err(Error::Config("no experiment given".into())),
        };
        let mut c = Self::defaults(id);
        let family = raw.get::<Family>("model.family")?.unwrap_or(c.model.family);
        let (dq0, dmu0) = match family {
            Family::Nls if c.model.family == Family::Nls => (c.model.v0.q, c.model.v0.mu),
            Family::Nls => (0.5, 1.0),
            Family::Srh => (0.0, 1.0),
        };
        let q0 = raw.get("model.q0")?.unwrap_or(dq0);
        let mu0 = raw.get("model.mu0")?.unwrap_or(dmu0);
        let q = raw.get("model.q")?.unwrap_or(c.model.v1.q);
        let mu = raw.get("model.mu")?.unwrap_or(c.model.v1.mu);
        c.model = ModelParams {
            v0: YukawaParams::new(q0, mu0)?,
            v1: YukawaParams::new(q, mu)?,
            family,
        };
        let n = raw.get("grid.n")?.unwrap_or(c.grid.n());
        let length = raw.get("grid.length")?.unwrap_or(c.grid.box_length());
        c.grid = Grid3::new(n, length)?;
        c.horizon = raw.get("time.horizon")?.unwrap_or(c.horizon);
        c.dt = raw.get("time.dt")?.unwrap_or(c.dt);
        c.t = raw.get("time.t")?.unwrap_or(c.t);
        if let Some(v) = raw.list("sweep.lambdas")? {
            c.lambdas = v;
        }
        if let Some(v) = raw.list("sweep.eps")? {
            c.eps = v;
        }
        if let Some(v) = raw.list("sweep.alphas")? {
            c.alphas = v;
        }
        c.epsilon = raw.get("scatter.epsilon")?.unwrap_or(c.epsilon);
        c.lambda = raw.get("scatter.lambda")?.unwrap_or(c.lambda);
        c.depth = raw.get("recon.depth")?.unwrap_or(c.depth);
        c.cap = raw.get("recon.cap")?.unwrap_or(c.cap);
        if let Some(p) = raw.get::<ProfileSpec>("profile.spec")? {
            c.profile = p;
        }
        c.kind = raw.get("evolve.kind")?.unwrap_or(c.kind);
        c.dump = raw.get("evolve.dump")?.unwrap_or(c.dump);
        if let Some(d) = raw.entries.get("output.dir") {
            c.out = PathBuf::from(d);
        }
        c.seed = raw.get("output.seed")?.unwrap_or(c.seed);
        c.threads = raw.get("run.threads")?.unwrap_or(c.threads);
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        self.profile.validate()?;
        if !(self.dt > 0.0) || !(self.horizon > 0.0) {
            return Err(Error::Config("time step and horizon must be positive".into()));
        }
        let needs = |name: &str, v: &[f64]| -> Result<()> {
            if v.is_empty() {
                Err(Error::Config(format!("sweep `{name}` must not be empty")))
            } else {
                Ok(())
            }
        };
        needs("lambdas", &self.lambdas)?;
        needs("eps", &self.eps)?;
        needs("alphas", &self.alphas)?;
        if self.depth == 0 || self.depth > 52 {
            return Err(Error::Config(format!("digit depth must be in 1..=52, got {}", self.depth)));
        }
        Ok(())
    }

    /// `key = value` lines recording every setting, for CSV headers.
    pub fn describe(&self) -> Vec<(String, String)> {
        let join = |v: &[f64]| v.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(",");
        vec![
            ("experiment.id".into(), self.experiment.to_string()),
            ("model.family".into(), self.model.family.to_string()),
            ("model.q0".into(), format!("{}", self.model.v0.q)),
            ("model.mu0".into(), format!("{}", self.model.v0.mu)),
            ("model.q".into(), format!("{}", self.model.v1.q)),
            ("model.mu".into(), format!("{}", self.model.v1.mu)),
            ("grid.n".into(), self.grid.n().to_string()),
            ("grid.length".into(), format!("{}", self.grid.box_length())),
            ("time.horizon".into(), format!("{}", self.horizon)),
            ("time.dt".into(), format!("{}", self.dt)),
            ("time.t".into(), format!("{}", self.t)),
            ("sweep.lambdas".into(), join(&self.lambdas)),
            ("sweep.eps".into(), join(&self.eps)),
            ("sweep.alphas".into(), join(&self.alphas)),
            ("scatter.epsilon".into(), format!("{}", self.epsilon)),
            ("scatter.lambda".into(), format!("{}", self.lambda)),
            ("recon.depth".into(), self.depth.to_string()),
            ("recon.cap".into(), self.cap.to_string()),
            ("profile.spec".into(), self.profile.to_string()),
            ("evolve.kind".into(), self.kind.to_string()),
            ("output.seed".into(), self.seed.to_string()),
        ]
    }
}

/// Off-centre Gaussian for the reconstruction runs (the profile should sit
/// away from the potential's centre), centred Gaussian otherwise.
fn default_profile(experiment: Experiment) -> ProfileSpec {
    let text = match experiment {
        Experiment::ReconRatio | Experiment::ReconDigits | Experiment::ReconFull | Experiment::ReconSrh => {
            "gaussian:width=2,cx=5,unit"
        }
        _ => "gaussian:width=2,unit",
    };
    text.parse().expect("valid default profile")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_sections() {
        let raw = RawConfig::parse(
            "# comment\n[experiment]\nid = scatter\n[model]\nq = 2 ; trailing\n[grid]\nn=16\nlength=20\n[sweep]\nlambdas = 1, 2,4\n",
        )
        .unwrap();
        let c = ExperimentConfig::from_raw(None, &raw).unwrap();
        assert_eq!(c.experiment, Experiment::Scatter);
        assert_eq!(c.model.v1.q, 2.0);
        assert_eq!(c.grid.n(), 16);
        assert_eq!(c.lambdas, vec![1.0, 2.0, 4.0]);
    }

    #[test]
    fn rejects_unknown_and_bad() {
        assert!(RawConfig::parse("[grid]\nsize = 3\n").is_err());
        assert!(RawConfig::parse("[grid]\nn = 3\nn = 4\n").is_err());
        assert!(RawConfig::parse("[grid\nn = 3\n").is_err());
        let raw = RawConfig::parse("[model]\nq0 = 2\n").unwrap();
        assert!(ExperimentConfig::from_raw(Some(Experiment::Scatter), &raw).is_err());
        let raw = RawConfig::parse("[sweep]\neps = \n").unwrap();
        assert!(ExperimentConfig::from_raw(Some(Experiment::Scatter), &raw).is_err());
    }

    #[test]
    fn experiment_names_roundtrip() {
        for e in Experiment::ALL {
            assert_eq!(e.name().parse::<Experiment>().unwrap(), e);
        }
    }
}
