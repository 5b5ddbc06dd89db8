//! Experiment configuration: one TOML file, with every command-line flag
//! acting as an override of a key in it.

use std::path::{Path, PathBuf};

use gasket_hydro::sim::{BoundarySpec, Configuration, Exponent, InitialCondition};
use gasket_hydro::spectral::{BoundaryCondition, CornerCondition, Spectrum};
use gasket_hydro::{calculus, Field, GasketGraph};
use serde::{Deserialize, Serialize};
use toml::{Table, Value};

use crate::error::{CliError, CliResult};

/// Environment variable naming the default output root.
pub const OUTPUT_ENV: &str = "GASKET_HYDRO_OUTPUT";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PerCorner<T> {
    All(T),
    Each([T; 3]),
}

impl<T: Clone> PerCorner<T> {
    pub fn resolve(&self) -> [T; 3] {
        match self {
            PerCorner::All(x) => [x.clone(), x.clone(), x.clone()],
            PerCorner::Each(xs) => xs.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundaryConfig {
    #[serde(default = "one")]
    pub lambda_plus: PerCorner<f64>,
    #[serde(default = "one")]
    pub lambda_minus: PerCorner<f64>,
    #[serde(default = "critical")]
    pub b: PerCorner<Exponent>,
}

fn one() -> PerCorner<f64> {
    PerCorner::All(1.0)
}

fn critical() -> PerCorner<Exponent> {
    PerCorner::All(gasket_hydro::sim::CRITICAL)
}

impl Default for BoundaryConfig {
    fn default() -> Self {
        BoundaryConfig { lambda_plus: one(), lambda_minus: one(), b: critical() }
    }
}

/// Initial profile `ϱ`, or an exact starting configuration for simulations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialConfig {
    Constant { value: f64 },
    /// Harmonic extension of the three corner values.
    Harmonic { values: [f64; 3] },
    /// `vertex_id,value` CSV.
    File { path: PathBuf },
    Empty,
    Full,
    /// Bit-string snapshot (first non-comment line).
    Configuration { path: PathBuf },
}

impl Default for InitialConfig {
    fn default() -> Self {
        InitialConfig::Constant { value: 0.5 }
    }
}

/// A test function: an eigenfunction of the run's spectrum (1-based) or a field file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ObservableConfig {
    Eigen { eigen: usize },
    File { file: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FluctConfig {
    /// Sampling step of the stationary path.
    pub dt: f64,
    /// Length of the stationary path after burn-in.
    pub length: f64,
    pub burn_in: f64,
    pub batches: usize,
    /// Number of lags per covariance curve.
    pub lags: usize,
    /// Largest lag; by default one e-fold of the slowest limiting decay, capped at 0.5.
    pub max_lag: Option<f64>,
    pub qv_time: f64,
    pub qv_replicas: u64,
}

impl Default for FluctConfig {
    fn default() -> Self {
        FluctConfig {
            dt: 0.002,
            length: 200.0,
            burn_in: 5.0,
            batches: 50,
            lags: 10,
            max_lag: None,
            qv_time: 0.5,
            qv_replicas: 400,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub level: u32,
    pub seed: u64,
    pub replicas: u64,
    pub horizon: f64,
    /// Output time grid: `steps + 1` uniform points on `[0, horizon]`.
    pub steps: usize,
    /// Quadrature grid of the weak residual; default `horizon / 1000`.
    pub pde_steps: usize,
    /// `limit`, `finite`, `dirichlet`, `neumann` or `robin`.
    pub bc: String,
    /// Robin coefficients when `bc = "robin"`; default `λ₊ + λ₋`.
    pub robin: Option<PerCorner<f64>>,
    pub boundary: BoundaryConfig,
    pub initial: InitialConfig,
    pub observables: Vec<ObservableConfig>,
    pub export_vectors: bool,
    pub fluct: FluctConfig,
    pub output: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            level: 3,
            seed: 1,
            replicas: 100,
            horizon: 1.0,
            steps: 50,
            pde_steps: 1000,
            bc: "limit".into(),
            robin: None,
            boundary: BoundaryConfig::default(),
            initial: InitialConfig::default(),
            observables: (1..=3).map(|eigen| ObservableConfig::Eigen { eigen }).collect(),
            export_vectors: false,
            fluct: FluctConfig::default(),
            output: None,
        }
    }
}

/// Sets `dotted.key = value` in a TOML table, creating tables on the way.
pub fn set_key(table: &mut Table, key: &str, value: Value) -> CliResult<()> {
    let mut parts: Vec<&str> = key.split('.').collect();
    let last = parts.pop().filter(|s| !s.is_empty()).ok_or_else(|| CliError::Config(format!("empty key `{key}`")))?;
    let mut cur = table;
    for p in parts {
        let entry = cur.entry(p.to_string()).or_insert_with(|| Value::Table(Table::new()));
        cur = entry
            .as_table_mut()
            .ok_or_else(|| CliError::Config(format!("`{p}` in `{key}` is not a table")))?;
    }
    cur.insert(last.to_string(), value);
    Ok(())
}

/// Reads a command-line value as TOML (numbers, strings, arrays, inline
/// tables); bare words become strings.
pub fn parse_value(text: &str) -> Value {
    let wrapped = format!("v = {text}");
    match wrapped.parse::<Table>() {
        Ok(mut t) => t.remove("v").unwrap_or_else(|| Value::String(text.into())),
        Err(_) => Value::String(text.into()),
    }
}

/// Comma lists become arrays, single items stay scalars.
pub fn parse_list(text: &str, as_string: bool) -> Value {
    let items: Vec<Value> = text
        .split(',')
        .map(|s| s.trim())
        .map(|s| if as_string { Value::String(s.into()) } else { parse_value(s) })
        .collect();
    if items.len() == 1 {
        items.into_iter().next().expect("one item")
    } else {
        Value::Array(items)
    }
}

pub fn load_table(path: Option<&Path>) -> CliResult<Table> {
    let Some(path) = path else {
        return Ok(Table::new());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
    text.parse::<Table>().map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

impl ExperimentConfig {
    pub fn from_table(table: Table) -> CliResult<Self> {
        let cfg: ExperimentConfig =
            Value::Table(table).try_into().map_err(|e: toml::de::Error| CliError::Config(e.message().to_string()))?;
        cfg.check()?;
        Ok(cfg)
    }

    fn check(&self) -> CliResult<()> {
        let bad = |m: String| Err(CliError::Config(m));
        if self.replicas < 1 {
            return bad("replicas must be at least 1".into());
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return bad(format!("horizon must be positive, got {}", self.horizon));
        }
        if self.steps < 1 || self.pde_steps < 1 {
            return bad("steps and pde_steps must be at least 1".into());
        }
        if !["limit", "finite", "dirichlet", "neumann", "robin"].contains(&self.bc.as_str()) {
            return bad(format!("unknown bc `{}`", self.bc));
        }
        self.boundary_spec()?;
        for o in &self.observables {
            match o {
                ObservableConfig::Eigen { eigen } if *eigen == 0 => return bad("eigen indices start at 1".into()),
                ObservableConfig::File { file } if !file.exists() => {
                    return bad(format!("observable file {} does not exist", file.display()))
                }
                _ => {}
            }
        }
        match &self.initial {
            InitialConfig::Constant { value } if !(0.0..=1.0).contains(value) => {
                bad(format!("initial density {value} outside [0, 1]"))
            }
            InitialConfig::Harmonic { values } if !values.iter().all(|v| (0.0..=1.0).contains(v)) => {
                bad("harmonic corner values must lie in [0, 1]".into())
            }
            InitialConfig::File { path } | InitialConfig::Configuration { path } if !path.exists() => {
                bad(format!("initial file {} does not exist", path.display()))
            }
            _ => Ok(()),
        }?;
        let f = &self.fluct;
        if !(f.dt > 0.0 && f.length > 0.0 && f.burn_in >= 0.0 && f.qv_time > 0.0) || f.batches < 2 || f.lags < 2 {
            return bad("fluct settings must be positive, with at least 2 batches and 2 lags".into());
        }
        Ok(())
    }

    pub fn boundary_spec(&self) -> CliResult<BoundarySpec<f64>> {
        BoundarySpec::new(
            self.boundary.lambda_plus.resolve(),
            self.boundary.lambda_minus.resolve(),
            self.boundary.b.resolve(),
        )
        .map_err(CliError::config)
    }

    /// The corner conditions selected by `bc`.
    pub fn boundary_condition(&self) -> CliResult<BoundaryCondition<f64>> {
        let bs = self.boundary_spec()?;
        let bc = match self.bc.as_str() {
            "limit" => bs.limit_condition(),
            "finite" => bs.finite_level_condition(self.level),
            "dirichlet" => BoundaryCondition::dirichlet(),
            "neumann" => BoundaryCondition::neumann(),
            _ => {
                let r = match &self.robin {
                    Some(r) => r.resolve(),
                    None => [0, 1, 2].map(|k| bs.lambda_sigma(k)),
                };
                BoundaryCondition::mixed(r.map(CornerCondition::Robin)).map_err(CliError::config)?
            }
        };
        Ok(bc)
    }

    pub fn graph(&self) -> CliResult<GasketGraph> {
        GasketGraph::build(self.level).map_err(CliError::config)
    }

    /// The initial profile `ϱ` as a field; exact configurations give their indicator.
    pub fn initial_profile(&self, g: &GasketGraph) -> CliResult<Field<f64>> {
        Ok(match &self.initial {
            InitialConfig::Constant { value } => Field::constant(g, *value),
            InitialConfig::Harmonic { values } => calculus::harmonic_extension(g, *values),
            InitialConfig::File { path } => Field::from_csv(g, &read(path)?).map_err(CliError::config)?,
            InitialConfig::Empty => Field::zeros(g),
            InitialConfig::Full => Field::constant(g, 1.0),
            InitialConfig::Configuration { .. } => {
                let c = self.exact_configuration(g)?.expect("configuration initial");
                Field::from_fn(g, |v| c.occupation[v] as f64)
            }
        })
    }

    fn exact_configuration(&self, g: &GasketGraph) -> CliResult<Option<Configuration<f64>>> {
        match &self.initial {
            InitialConfig::Configuration { path } => {
                Ok(Some(Configuration::from_snapshot(g, &read(path)?).map_err(CliError::config)?))
            }
            _ => Ok(None),
        }
    }

    pub fn initial_condition(&self, g: &GasketGraph) -> CliResult<InitialCondition<f64>> {
        Ok(match &self.initial {
            InitialConfig::Empty => InitialCondition::Empty,
            InitialConfig::Full => InitialCondition::Full,
            InitialConfig::Configuration { .. } => {
                InitialCondition::Exact(self.exact_configuration(g)?.expect("configuration initial").occupation)
            }
            _ => InitialCondition::Profile(self.initial_profile(g)?),
        })
    }

    /// Test functions with display names.
    pub fn test_functions(&self, g: &GasketGraph, s: Option<&Spectrum<f64>>) -> CliResult<Vec<(String, Field<f64>)>> {
        self.observables
            .iter()
            .map(|o| match o {
                ObservableConfig::Eigen { eigen } => {
                    let s = s.ok_or_else(|| CliError::Config("eigen observables need a spectrum".into()))?;
                    let phi = s.eigenfunction(*eigen).map_err(CliError::config)?;
                    Ok((format!("phi{eigen}"), phi.clone()))
                }
                ObservableConfig::File { file } => {
                    let name = file.file_stem().map_or("file".into(), |s| s.to_string_lossy().into_owned());
                    Ok((name, Field::from_csv(g, &read(file)?).map_err(CliError::config)?))
                }
            })
            .collect()
    }
}

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_overrides() {
        let mut t: Table = "level = 2\n[boundary]\nb = \"5/3\"\nlambda_plus = [1.0, 0.2, 0.5]\n".parse().unwrap();
        set_key(&mut t, "boundary.b", parse_list("1,5/3,2", true)).unwrap();
        set_key(&mut t, "seed", parse_value("9")).unwrap();
        let c = ExperimentConfig::from_table(t).unwrap();
        assert_eq!(c.level, 2);
        assert_eq!(c.seed, 9);
        let bs = c.boundary_spec().unwrap();
        assert_eq!(bs.b[1], gasket_hydro::sim::CRITICAL);
        assert_eq!(bs.lambda_plus, [1.0, 0.2, 0.5]);
        assert!(ExperimentConfig::from_table("bogus = 1".parse().unwrap()).is_err());
        assert!(ExperimentConfig::from_table("replicas = 0".parse().unwrap()).is_err());
    }

    #[test]
    fn value_parsing() {
        assert_eq!(parse_value("1.5"), Value::Float(1.5));
        assert_eq!(parse_value("dirichlet"), Value::String("dirichlet".into()));
        assert_eq!(parse_list("1,2", false), Value::Array(vec![Value::Integer(1), Value::Integer(2)]));
    }
}
