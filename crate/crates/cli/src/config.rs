//! INI run configuration with `section.key=value` overrides.
//!
//! Every key is checked against the schema before anything runs; errors name
//! the offending `section.key`.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_4;
use std::fmt;
use std::str::FromStr;

use cavitybell::bell::BellGrid;
use cavitybell::models::{FourLevelParams, RegimeThresholds, TwoLevelParams};
use cavitybell::montecarlo::FailurePolicy;
use ini::Ini;
use num_complex::Complex64 as C64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

type Result<T> = std::result::Result<T, ConfigError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    TwoLevel,
    FourLevel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    Injected,
    TwoLevel,
    FourLevel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Linear,
    Log,
}

/// One swept parameter: either an explicit value list or `points` samples
/// of `[min, max]`.
#[derive(Debug, Clone, PartialEq)]
pub enum Axis {
    Values(Vec<f64>),
    Range {
        min: f64,
        max: f64,
        points: usize,
        scale: Scale,
    },
}

impl Axis {
    pub fn values(&self) -> Vec<f64> {
        match *self {
            Axis::Values(ref v) => v.clone(),
            Axis::Range { min, points: 1, .. } => vec![min],
            Axis::Range {
                min,
                max,
                points,
                scale,
            } => (0..points)
                .map(|k| {
                    let s = k as f64 / (points - 1) as f64;
                    match scale {
                        Scale::Linear => min + (max - min) * s,
                        Scale::Log => min * (max / min).powf(s),
                    }
                })
                .collect(),
        }
    }

    fn log(min: f64, max: f64, points: usize) -> Self {
        Axis::Range {
            min,
            max,
            points,
            scale: Scale::Log,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub source: Source,
    pub alpha: C64,
    /// Replaces the simulated success probability when set.
    pub p0: Option<f64>,
    pub vartheta: f64,
    pub n_runs: u64,
    pub failure_policy: FailurePolicy,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model: Model,
    pub format: Format,
    pub seed: u64,
    pub n_max: usize,
    pub two_level: TwoLevelParams,
    pub four_level: FourLevelParams,
    /// Axes named in `[sweep.<name>]` sections; commands fall back to their
    /// own defaults for absent ones.
    pub sweeps: BTreeMap<String, Axis>,
    pub bell: BellGrid,
    pub pipeline: PipelineConfig,
    pub thresholds: RegimeThresholds,
}

impl RunConfig {
    pub fn axis(&self, name: &str, default: Axis) -> Axis {
        self.sweeps.get(name).cloned().unwrap_or(default)
    }

    pub fn fig2_omega1(&self) -> Vec<f64> {
        self.axis("omega1", Axis::log(1e-3, 1e-1, 9)).values()
    }

    pub fn fig2_gamma(&self) -> Vec<f64> {
        self.axis("gamma", Axis::Values(vec![0.0, 1e-3, 1e-2, 1e-1]))
            .values()
    }

    pub fn fig6_drive(&self) -> Vec<f64> {
        self.axis("drive", Axis::log(1e-3, 1e-1, 5)).values()
    }

    pub fn fig6_gamma(&self) -> Vec<f64> {
        self.axis("gamma", Axis::Values(vec![0.0, 0.1, 1.0]))
            .values()
    }
}

const SWEEP_AXES: &[&str] = &["omega1", "drive", "gamma"];

fn schema(section: &str) -> Option<&'static [&'static str]> {
    Some(match section {
        "run" => &["model", "format", "seed", "n_max"],
        "two_level" => &[
            "g",
            "kappa",
            "gamma",
            "omega1",
            "omega1_phase",
            "omega2",
            "omega2_phase",
        ],
        "four_level" => &[
            "g", "kappa", "gamma", "gamma2", "gamma3", "delta2", "delta3", "omega0", "omega1",
            "drive", "drive1", "drive2",
        ],
        "bell" => &["n_x", "n_y", "x_max", "y_max"],
        "pipeline" => &[
            "source",
            "alpha_re",
            "alpha_im",
            "p0",
            "vartheta",
            "n_runs",
            "failure_policy",
        ],
        "regime" => &["much_less", "similar", "equal_rel_tol"],
        s if s.starts_with("sweep.") && SWEEP_AXES.contains(&&s[6..]) => {
            &["min", "max", "points", "scale", "values"]
        }
        _ => return None,
    })
}

/// Flattened `section → key → raw value` table.
#[derive(Debug, Clone, Default)]
struct Table(BTreeMap<String, BTreeMap<String, String>>);

impl Table {
    fn from_ini(text: &str) -> Result<Self> {
        let ini =
            Ini::load_from_str(text).map_err(|e| ConfigError(format!("config syntax: {e}")))?;
        let mut t = Table::default();
        for (section, props) in ini.iter() {
            let Some(section) = section else {
                if let Some((k, _)) = props.iter().next() {
                    return Err(ConfigError(format!("key `{k}` outside any section")));
                }
                continue;
            };
            for (k, v) in props.iter() {
                t.insert(section, k, v)?;
            }
        }
        Ok(t)
    }

    fn insert(&mut self, section: &str, key: &str, value: &str) -> Result<()> {
        let section = section.trim();
        let key = key.trim();
        let allowed = if section == "regime.overrides" {
            true
        } else {
            schema(section)
                .ok_or_else(|| ConfigError(format!("unknown section `[{section}]`")))?
                .contains(&key)
        };
        if !allowed {
            return Err(ConfigError(format!("unknown key `{section}.{key}`")));
        }
        self.0
            .entry(section.to_string())
            .or_default()
            .insert(key.to_string(), value.trim().to_string());
        Ok(())
    }

    /// `section.key=value`; the section is everything before the last dot.
    fn apply_override(&mut self, spec: &str) -> Result<()> {
        let (path, value) = spec
            .split_once('=')
            .ok_or_else(|| ConfigError(format!("override `{spec}` is not section.key=value")))?;
        let (section, key) = path
            .trim()
            .rsplit_once('.')
            .ok_or_else(|| ConfigError(format!("override `{spec}` is not section.key=value")))?;
        self.insert(section, key, value)
    }

    fn raw(&self, section: &str, key: &str) -> Option<&str> {
        self.0
            .get(section)
            .and_then(|s| s.get(key))
            .map(String::as_str)
    }

    fn get<T: FromStr>(&self, section: &str, key: &str) -> Result<Option<T>> {
        self.raw(section, key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|_| ConfigError(format!("invalid value `{v}` for `{section}.{key}`")))
            })
            .transpose()
    }

    fn float(&self, section: &str, key: &str) -> Result<Option<f64>> {
        match self.get::<f64>(section, key)? {
            Some(x) if !x.is_finite() => {
                Err(ConfigError(format!("`{section}.{key}` must be finite")))
            }
            other => Ok(other),
        }
    }

    fn float_or(&self, section: &str, key: &str, default: f64) -> Result<f64> {
        Ok(self.float(section, key)?.unwrap_or(default))
    }

    fn choice<T: Copy>(
        &self,
        section: &str,
        key: &str,
        options: &[(&str, T)],
        default: T,
    ) -> Result<T> {
        let Some(v) = self.raw(section, key) else {
            return Ok(default);
        };
        options
            .iter()
            .find(|(name, _)| *name == v)
            .map(|(_, t)| *t)
            .ok_or_else(|| {
                let names: Vec<&str> = options.iter().map(|(n, _)| *n).collect();
                ConfigError(format!(
                    "invalid value `{v}` for `{section}.{key}` (expected one of {})",
                    names.join(", ")
                ))
            })
    }
}

pub struct Overrides<'a> {
    pub sets: &'a [String],
    /// Seed from the command line, then the environment.
    pub seed: Option<u64>,
}

pub fn load(text: &str, overrides: &Overrides<'_>) -> Result<RunConfig> {
    let mut t = Table::from_ini(text)?;
    for s in overrides.sets {
        t.apply_override(s)?;
    }
    build(&t, overrides.seed)
}

fn build(t: &Table, seed_override: Option<u64>) -> Result<RunConfig> {
    let model = t.choice(
        "run",
        "model",
        &[
            ("two-level", Model::TwoLevel),
            ("four-level", Model::FourLevel),
        ],
        Model::TwoLevel,
    )?;
    let format = t.choice(
        "run",
        "format",
        &[("text", Format::Text), ("json", Format::Json)],
        Format::Text,
    )?;
    let seed = match seed_override {
        Some(s) => s,
        None => t.get("run", "seed")?.unwrap_or(0),
    };
    let n_max = t.get("run", "n_max")?.unwrap_or(2);
    if n_max < 1 {
        return Err(ConfigError("`run.n_max` must be ≥ 1".into()));
    }

    let two_level = two_level(t)?;
    let four_level = four_level(t)?;
    let mut sweeps = BTreeMap::new();
    for name in SWEEP_AXES {
        if let Some(axis) = sweep(t, name)? {
            sweeps.insert(name.to_string(), axis);
        }
    }

    let default_grid = BellGrid::default();
    let bell = BellGrid {
        n_x: t.get("bell", "n_x")?.unwrap_or(default_grid.n_x),
        n_y: t.get("bell", "n_y")?.unwrap_or(default_grid.n_y),
        x_max: t.float_or("bell", "x_max", default_grid.x_max)?,
        y_max: t.float_or("bell", "y_max", default_grid.y_max)?,
    };
    if bell.n_x < 2 || bell.n_y < 2 {
        return Err(ConfigError("`bell.n_x` and `bell.n_y` must be ≥ 2".into()));
    }

    let pipeline = PipelineConfig {
        source: t.choice(
            "pipeline",
            "source",
            &[
                ("injected", Source::Injected),
                ("two-level", Source::TwoLevel),
                ("four-level", Source::FourLevel),
            ],
            Source::Injected,
        )?,
        alpha: C64::new(
            t.float_or("pipeline", "alpha_re", 0.0)?,
            t.float_or("pipeline", "alpha_im", -1.0)?,
        ),
        p0: t.float("pipeline", "p0")?,
        vartheta: t.float_or("pipeline", "vartheta", FRAC_PI_4)?,
        n_runs: t.get("pipeline", "n_runs")?.unwrap_or(100_000),
        failure_policy: t.choice(
            "pipeline",
            "failure_policy",
            &[
                ("discard", FailurePolicy::Discard),
                ("include_as_zero", FailurePolicy::IncludeAsZero),
            ],
            FailurePolicy::Discard,
        )?,
    };
    if pipeline.n_runs < 100 {
        return Err(ConfigError(format!(
            "`pipeline.n_runs` must be ≥ 100, got {}",
            pipeline.n_runs
        )));
    }
    if let Some(p0) = pipeline.p0 {
        if !(0.0..=1.0).contains(&p0) {
            return Err(ConfigError(format!(
                "`pipeline.p0` must lie in [0, 1], got {p0}"
            )));
        }
    }
    if pipeline.alpha.norm() > 1.0 + 1e-12 {
        return Err(ConfigError(
            "`pipeline.alpha_re`/`alpha_im` give |α| > 1".into(),
        ));
    }

    let mut thresholds = RegimeThresholds::default();
    if let Some(x) = t.float("regime", "much_less")? {
        thresholds.much_less = x;
    }
    if let Some(x) = t.float("regime", "similar")? {
        thresholds.similar = x;
    }
    if let Some(x) = t.float("regime", "equal_rel_tol")? {
        thresholds.equal_rel_tol = x;
    }
    if let Some(section) = t.0.get("regime.overrides") {
        for key in section.keys() {
            let v = t.float("regime.overrides", key)?.expect("key present");
            thresholds.overrides.insert(key.clone(), v);
        }
    }

    Ok(RunConfig {
        model,
        format,
        seed,
        n_max,
        two_level,
        four_level,
        sweeps,
        bell,
        pipeline,
        thresholds,
    })
}

fn two_level(t: &Table) -> Result<TwoLevelParams> {
    let s = "two_level";
    let omega1 = C64::from_polar(
        t.float_or(s, "omega1", 0.01)?,
        t.float_or(s, "omega1_phase", 0.0)?,
    );
    let omega2 = match t.float(s, "omega2")? {
        Some(m) => C64::from_polar(m, t.float_or(s, "omega2_phase", 0.0)?),
        None => -omega1,
    };
    let p = TwoLevelParams {
        g: t.float_or(s, "g", 1.0)?,
        kappa: t.float_or(s, "kappa", 1.0)?,
        gamma: t.float_or(s, "gamma", 0.0)?,
        omega1,
        omega2,
    };
    p.validate()
        .map_err(|e| ConfigError(format!("[two_level]: {e}")))?;
    Ok(p)
}

fn four_level(t: &Table) -> Result<FourLevelParams> {
    let s = "four_level";
    let base = FourLevelParams::reference(0.01, 0.0);
    let gamma = t.float(s, "gamma")?;
    let drive = t.float_or(s, "drive", 0.01)?;
    let p = FourLevelParams {
        g: t.float_or(s, "g", base.g)?,
        kappa: t.float_or(s, "kappa", base.kappa)?,
        gamma2: t.float(s, "gamma2")?.or(gamma).unwrap_or(base.gamma2),
        gamma3: t.float(s, "gamma3")?.or(gamma).unwrap_or(base.gamma3),
        delta2: t.float_or(s, "delta2", base.delta2)?,
        delta3: t.float_or(s, "delta3", base.delta3)?,
        omega0: C64::new(t.float_or(s, "omega0", base.omega0.re)?, 0.0),
        omega1: C64::new(t.float_or(s, "omega1", base.omega1.re)?, 0.0),
        omega_i: [
            C64::new(t.float_or(s, "drive1", drive)?, 0.0),
            C64::new(t.float_or(s, "drive2", -drive)?, 0.0),
        ],
    };
    p.validate()
        .map_err(|e| ConfigError(format!("[four_level]: {e}")))?;
    Ok(p)
}

fn sweep(t: &Table, name: &str) -> Result<Option<Axis>> {
    let s = format!("sweep.{name}");
    if !t.0.contains_key(&s) {
        return Ok(None);
    }
    if let Some(v) = t.raw(&s, "values") {
        if ["min", "max", "points", "scale"]
            .iter()
            .any(|k| t.raw(&s, k).is_some())
        {
            return Err(ConfigError(format!(
                "`{s}.values` excludes min/max/points/scale"
            )));
        }
        let values = v
            .split(',')
            .map(|x| {
                x.trim()
                    .parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| {
                        ConfigError(format!("invalid value `{}` in `{s}.values`", x.trim()))
                    })
            })
            .collect::<Result<Vec<f64>>>()?;
        return Ok(Some(Axis::Values(values)));
    }
    let min = t
        .float(&s, "min")?
        .ok_or_else(|| ConfigError(format!("missing `{s}.min`")))?;
    let points: usize = t.get(&s, "points")?.unwrap_or(1);
    if points < 1 {
        return Err(ConfigError(format!("`{s}.points` must be ≥ 1")));
    }
    let max = match t.float(&s, "max")? {
        Some(m) => m,
        None if points == 1 => min,
        None => return Err(ConfigError(format!("missing `{s}.max`"))),
    };
    let scale = t.choice(
        &s,
        "scale",
        &[("linear", Scale::Linear), ("log", Scale::Log)],
        Scale::Linear,
    )?;
    if scale == Scale::Log && (min <= 0.0 || max <= 0.0) {
        return Err(ConfigError(format!(
            "`{s}` log scale needs positive bounds"
        )));
    }
    Ok(Some(Axis::Range {
        min,
        max,
        points,
        scale,
    }))
}
