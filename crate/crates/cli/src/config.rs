//! Scenario files.
//!
//! ```toml
//! name = "freeze_bd"
//! engine = "two_node_mme"
//! outputs = ["cc", "qd", "gqd"]
//!
//! [time_grid]
//! t_max = 25.0
//! n_samples = 5001
//!
//! [params]
//! omega_0 = 0.1
//! ...
//!
//! [initial_state]
//! kind = "bell_diagonal"
//! c = [1.0, -0.9, 0.9]
//! ```
//!
//! `params` is validated against the engine's own key set once the engine is
//! known, so a typo in any section is a hard error.

use std::path::Path;

use anyhow::{anyhow, bail, Context};
use serde::Deserialize;

use cqednet_core::chains::{two_chain_site, ChainParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    TwoNodeMme,
    Chain,
    TwoChain,
    Tangle,
}

impl Engine {
    pub fn name(self) -> &'static str {
        match self {
            Engine::TwoNodeMme => "two_node_mme",
            Engine::Chain => "chain",
            Engine::TwoChain => "two_chain",
            Engine::Tangle => "tangle",
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGrid {
    pub t_max: f64,
    pub n_samples: usize,
    /// Informational label for the time axis; defaults per engine.
    pub unit: Option<String>,
}

/// Radians, either numeric or written as "pi/3", "3pi/8", "0.25*pi".
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Angle {
    Radians(f64),
    Expr(String),
}

impl Angle {
    pub fn radians(&self) -> anyhow::Result<f64> {
        match self {
            Angle::Radians(x) => Ok(*x),
            Angle::Expr(s) => parse_angle(s),
        }
    }
}

fn parse_angle(s: &str) -> anyhow::Result<f64> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect::<String>().to_lowercase();
    let Some(pos) = t.find("pi") else {
        return t.parse().map_err(|_| anyhow!("cannot read angle {s:?}"));
    };
    let (pre, post) = (&t[..pos], &t[pos + 2..]);
    let num = match pre.trim_end_matches('*') {
        "" => 1.0,
        p => p.parse::<f64>().map_err(|_| anyhow!("cannot read angle {s:?}"))?,
    };
    let den = match post {
        "" => 1.0,
        p => p
            .strip_prefix('/')
            .and_then(|d| d.parse::<f64>().ok())
            .ok_or_else(|| anyhow!("cannot read angle {s:?}"))?,
    };
    Ok(num * std::f64::consts::PI / den)
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialSpec {
    BellDiagonal { c: [f64; 3] },
    /// Bare product state such as "eg000".
    Bare { label: String },
    Werner { a: f64 },
    PsiA { theta: Angle },
    PsiB { theta: Angle },
    /// Single excitation on one site of a single chain (1-based).
    Site { site: usize },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectorSpec {
    #[serde(default = "default_detect")]
    pub measures: Vec<String>,
    #[serde(default = "default_kappa")]
    pub kappa: f64,
    #[serde(default = "default_noise")]
    pub noise_factor: f64,
    #[serde(default = "default_window")]
    pub window: usize,
    pub range: Option<[f64; 2]>,
}

fn default_detect() -> Vec<String> {
    vec!["cc".into(), "qd".into(), "gqd".into()]
}
fn default_kappa() -> f64 {
    20.0
}
fn default_noise() -> f64 {
    10.0
}
fn default_window() -> usize {
    8
}

impl Default for DetectorSpec {
    fn default() -> Self {
        Self {
            measures: default_detect(),
            kappa: default_kappa(),
            noise_factor: default_noise(),
            window: default_window(),
            range: None,
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisSpec {
    /// Window for the plateau-flatness metric, in the run's time unit.
    pub plateau: Option<[f64; 2]>,
    /// Fraction of the series averaged for late-time values.
    pub late_fraction: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub name: Option<String>,
    pub engine: Engine,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub outputs: Vec<String>,
    pub time_grid: TimeGrid,
    #[serde(default)]
    pub params: toml::Table,
    pub initial_state: InitialSpec,
    #[serde(default)]
    pub detector: DetectorSpec,
    #[serde(default)]
    pub analysis: AnalysisSpec,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwoNodeParams {
    #[serde(default = "one")]
    pub omega_a: f64,
    pub omega_0: f64,
    pub omega_f: f64,
    pub g: f64,
    pub j: f64,
    pub gamma: f64,
    #[serde(default = "two")]
    pub n_max: u32,
    /// Thermal photon numbers of the cavity 1, cavity 2 and fiber baths,
    /// each at its own mode frequency.
    pub nbar: Option<[f64; 3]>,
    pub temps: Option<[f64; 3]>,
    /// One temperature shared by all three baths.
    pub temp: Option<f64>,
    #[serde(default)]
    pub weighting: Weighting,
    #[serde(default)]
    pub side: MeasuredSide,
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Weighting {
    #[default]
    ChannelOccupation,
    GroundMatrixElement,
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasuredSide {
    A,
    #[default]
    B,
}

fn one() -> f64 {
    1.0
}
fn two() -> u32 {
    2
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainEngineParams {
    /// Sites per chain.
    #[serde(default = "three")]
    pub sites: usize,
    pub omega: Option<f64>,
    pub g: Option<f64>,
    pub omega_f: Option<f64>,
    pub j: Option<f64>,
    #[serde(default)]
    pub phi: f64,
    /// Loss rate in units of λ.
    #[serde(default)]
    pub gamma: f64,
    /// Pairs to analyse, e.g. ["11'", "33'"].
    #[serde(default = "default_pairs")]
    pub pairs: Vec<String>,
    /// Site projected onto |G⟩ for the QDM columns, e.g. "2".
    pub measure_site: Option<String>,
    /// Source and destination pairs for the transmission ratio.
    pub transmission: Option<[String; 2]>,
    #[serde(default = "default_ref")]
    pub reference_site: String,
    #[serde(default = "default_threshold")]
    pub purity_threshold: f64,
    #[serde(default = "yes")]
    pub audit_positivity: bool,
    /// RK4 step as a fraction of 1/stiffness.
    #[serde(default = "default_step_factor")]
    pub step_factor: f64,
}

fn default_step_factor() -> f64 {
    cqednet_core::mme::IntegratorOptions::default().step_factor
}
fn three() -> usize {
    3
}
fn default_pairs() -> Vec<String> {
    vec!["11'".into(), "33'".into()]
}
fn default_ref() -> String {
    "1".into()
}
fn default_threshold() -> f64 {
    cqednet_core::multipartite::DEFAULT_PURITY_THRESHOLD
}
fn yes() -> bool {
    true
}

impl ChainEngineParams {
    pub fn chain_params(&self) -> ChainParams {
        let r = ChainParams::reference(self.sites, self.gamma);
        ChainParams {
            n_sites: self.sites,
            omega: self.omega.unwrap_or(r.omega),
            g: self.g.unwrap_or(r.g),
            omega_f: self.omega_f.unwrap_or(r.omega_f),
            j: self.j.unwrap_or(r.j),
            phi: self.phi,
            gamma_loss: self.gamma,
        }
    }
}

/// Register position of a two-chain site label such as "2" or "3'".
pub fn parse_site(label: &str, sites: usize) -> anyhow::Result<usize> {
    let t = label.trim();
    let (num, primed) = match t.strip_suffix('\'') {
        Some(n) => (n, true),
        None => (t, false),
    };
    let pos: usize = num.parse().map_err(|_| anyhow!("bad site label {label:?}"))?;
    if pos == 0 || pos > sites {
        bail!("site {label:?} outside a {sites}-site chain");
    }
    Ok(two_chain_site(pos, primed))
}

/// "33'" or "3,3'" into two register positions.
pub fn parse_pair(label: &str, sites: usize) -> anyhow::Result<(usize, usize)> {
    let parts: Vec<String> = if label.contains(',') {
        label.split(',').map(|s| s.trim().to_string()).collect()
    } else {
        let mut out: Vec<String> = Vec::new();
        for ch in label.trim().chars() {
            if ch == '\'' {
                match out.last_mut() {
                    Some(last) => last.push(ch),
                    None => bail!("bad pair label {label:?}"),
                }
            } else {
                out.push(ch.to_string());
            }
        }
        out
    };
    if parts.len() != 2 {
        bail!("pair label {label:?} must name two sites");
    }
    let a = parse_site(&parts[0], sites)?;
    let b = parse_site(&parts[1], sites)?;
    if a == b {
        bail!("pair label {label:?} names the same site twice");
    }
    Ok((a, b))
}

#[derive(Debug, Clone)]
pub enum EngineParams {
    TwoNode(TwoNodeParams),
    Chain(ChainEngineParams),
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub raw: RawConfig,
    pub params: EngineParams,
}

impl Scenario {
    pub fn from_toml_str(text: &str, fallback_name: &str) -> anyhow::Result<Self> {
        let raw: RawConfig = toml::from_str(text).context("invalid scenario file")?;
        Self::from_raw(raw, fallback_name)
    }

    pub fn from_raw(raw: RawConfig, fallback_name: &str) -> anyhow::Result<Self> {
        let table = toml::Value::Table(raw.params.clone());
        let params = match raw.engine {
            Engine::TwoNodeMme => EngineParams::TwoNode(
                table.try_into().context("invalid [params] for engine two_node_mme")?,
            ),
            _ => EngineParams::Chain(
                table
                    .try_into()
                    .with_context(|| format!("invalid [params] for engine {}", raw.engine.name()))?,
            ),
        };
        if let EngineParams::Chain(c) = &params {
            if !(c.step_factor > 0.0 && c.step_factor <= 0.5) {
                bail!("params.step_factor must lie in (0, 0.5]");
            }
        }
        if !(raw.time_grid.t_max > 0.0) || !raw.time_grid.t_max.is_finite() {
            bail!("time_grid.t_max must be positive and finite");
        }
        if raw.time_grid.n_samples < 2 {
            bail!("time_grid.n_samples must be at least 2");
        }
        for m in raw.outputs.iter().chain(&raw.detector.measures) {
            if cqednet_core::correlations::Measure::from_name(m).is_none() {
                bail!("unknown measure {m:?}");
            }
        }
        if let Some(f) = raw.analysis.late_fraction {
            if !(f > 0.0 && f <= 1.0) {
                bail!("analysis.late_fraction must lie in (0, 1]");
            }
        }
        let name = raw.name.clone().unwrap_or_else(|| fallback_name.to_string());
        Ok(Self { name, raw, params })
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("scenario");
        Self::from_toml_str(&text, stem)
    }

    /// Copy with `params.<axis>` replaced; the result is re-validated.
    pub fn with_param(&self, axis: &str, value: f64) -> anyhow::Result<Self> {
        let mut raw = self.raw.clone();
        match axis {
            "t_max" => raw.time_grid.t_max = value,
            _ => {
                let key = axis.strip_prefix("params.").unwrap_or(axis);
                if let Some((head, idx)) = key.split_once('.') {
                    // array element, e.g. nbar.2
                    let i: usize = idx.parse().map_err(|_| anyhow!("bad sweep axis {axis:?}"))?;
                    let arr = raw
                        .params
                        .get_mut(head)
                        .and_then(|v| v.as_array_mut())
                        .ok_or_else(|| anyhow!("sweep axis {axis:?}: params.{head} is not an array"))?;
                    let slot = arr.get_mut(i).ok_or_else(|| anyhow!("sweep axis {axis:?} out of range"))?;
                    *slot = toml::Value::Float(value);
                } else {
                    let current = raw.params.get(key);
                    let v = match current {
                        Some(toml::Value::Integer(_)) if value.fract() == 0.0 => toml::Value::Integer(value as i64),
                        _ => toml::Value::Float(value),
                    };
                    raw.params.insert(key.to_string(), v);
                }
            }
        }
        Self::from_raw(raw, &self.name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
engine = "two_node_mme"
[time_grid]
t_max = 1.0
n_samples = 11
[params]
omega_0 = 0.9
omega_f = 1.0
g = 0.05
j = 0.05
gamma = 0.01
[initial_state]
kind = "bell_diagonal"
c = [1.0, -0.9, 0.9]
"#;

    #[test]
    fn minimal_two_node() {
        let s = Scenario::from_toml_str(MINIMAL, "x").unwrap();
        assert_eq!(s.name, "x");
        assert!(matches!(s.params, EngineParams::TwoNode(_)));
    }

    #[test]
    fn missing_t_max_names_the_field() {
        let text = MINIMAL.replace("t_max = 1.0\n", "");
        let err = format!("{:#}", Scenario::from_toml_str(&text, "x").unwrap_err());
        assert!(err.contains("t_max"), "{err}");
    }

    #[test]
    fn unknown_param_is_rejected() {
        let text = MINIMAL.replace("gamma = 0.01", "gamma = 0.01\ngama = 2.0");
        let err = format!("{:#}", Scenario::from_toml_str(&text, "x").unwrap_err());
        assert!(err.contains("gama"), "{err}");
    }

    #[test]
    fn angles() {
        let pi = std::f64::consts::PI;
        assert!((parse_angle("pi/3").unwrap() - pi / 3.0).abs() < 1e-15);
        assert!((parse_angle("3pi/8").unwrap() - 3.0 * pi / 8.0).abs() < 1e-15);
        assert!((parse_angle("0.25*pi").unwrap() - pi / 4.0).abs() < 1e-15);
        assert!((parse_angle("0.5").unwrap() - 0.5).abs() < 1e-15);
        assert!(parse_angle("tau").is_err());
    }

    #[test]
    fn site_labels() {
        assert_eq!(parse_pair("33'", 3).unwrap(), (4, 5));
        assert_eq!(parse_pair("11'", 3).unwrap(), (0, 1));
        assert_eq!(parse_pair("1,3'", 3).unwrap(), (0, 5));
        assert_eq!(parse_site("2", 3).unwrap(), 2);
        assert!(parse_pair("44'", 3).is_err());
        assert!(parse_pair("1", 3).is_err());
    }

    #[test]
    fn sweep_override() {
        let s = Scenario::from_toml_str(MINIMAL, "x").unwrap();
        let t = s.with_param("j", 0.5).unwrap();
        let EngineParams::TwoNode(p) = t.params else { panic!() };
        assert_eq!(p.j, 0.5);
        assert!(s.with_param("nope", 1.0).is_err());
    }
}
