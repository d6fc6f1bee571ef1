use crate::error::{Error, Result};
use crate::grid::{fit_grid, read_matrix_csv, BinGrid, BinIndices};
use crate::models::ModelSpec;
use crate::theory::default_nu;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// Where the training data (or a ready grid) comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DataSource {
    /// Numeric CSV, one row per example; a non-numeric first row is a header.
    Csv { path: PathBuf },
    /// A grid previously written by `fit-grid`.
    Grid { path: PathBuf },
    /// `m` i.i.d. uniform points on [low, high]^dim.
    Uniform { low: f64, high: f64, dim: usize, m: usize, seed: u64 },
}

impl DataSource {
    pub fn uniform_points(low: f64, high: f64, dim: usize, m: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..m).map(|_| (0..dim).map(|_| rng.random_range(low..high)).collect()).collect()
    }

    /// Training rows, when the source has any.
    pub fn training_data(&self, base: &Path) -> Result<Option<Vec<Vec<f64>>>> {
        Ok(match self {
            DataSource::Csv { path } => Some(read_matrix_csv(base.join(path))?),
            DataSource::Grid { .. } => None,
            DataSource::Uniform { low, high, dim, m, seed } => {
                if !(low < high) || *dim == 0 {
                    return Err(Error::Config("uniform data needs low < high and dim ≥ 1".into()));
                }
                Some(Self::uniform_points(*low, *high, *dim, *m, *seed))
            }
        })
    }

    pub fn grid(&self, p: usize, base: &Path) -> Result<BinGrid> {
        match self {
            DataSource::Grid { path } => BinGrid::from_json(&std::fs::read_to_string(base.join(path))?),
            _ => fit_grid(&self.training_data(base)?.unwrap_or_default(), p),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NuKeyword {
    Default,
}

/// A bandwidth value or `"default"` (√(0.75·d)).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NuSpec {
    Value(f64),
    Named(NuKeyword),
}

impl Default for NuSpec {
    fn default() -> Self {
        NuSpec::Named(NuKeyword::Default)
    }
}

impl NuSpec {
    pub fn resolve(&self, d: usize) -> f64 {
        match self {
            NuSpec::Value(v) => *v,
            NuSpec::Named(NuKeyword::Default) => default_nu(d),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum XiKeyword {
    /// The midpoint of the central bin ⌈p/2⌉ along every feature.
    BinCenter,
}

/// The example to explain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum XiSpec {
    Point(Vec<f64>),
    /// Midpoints of the given bins (1-based).
    BinCenter { bin_center: Vec<usize> },
    Named(XiKeyword),
}

impl Default for XiSpec {
    fn default() -> Self {
        XiSpec::Named(XiKeyword::BinCenter)
    }
}

impl XiSpec {
    pub fn resolve(&self, grid: &BinGrid) -> Result<Vec<f64>> {
        match self {
            XiSpec::Point(x) => Ok(x.clone()),
            XiSpec::BinCenter { bin_center } => {
                if bin_center.len() != grid.d() {
                    return Err(Error::DimensionMismatch { expected: grid.d(), found: bin_center.len() });
                }
                if bin_center.iter().any(|&b| b == 0 || b > grid.p()) {
                    return Err(Error::Config(format!("bin_center entries must lie in 1..={}", grid.p())));
                }
                Ok(grid.bin_center_point(&BinIndices(bin_center.iter().map(|b| b - 1).collect())))
            }
            XiSpec::Named(XiKeyword::BinCenter) => {
                let b = grid.p().div_ceil(2) - 1;
                Ok(grid.bin_center_point(&BinIndices(vec![b; grid.d()])))
            }
        }
    }
}

/// A model given inline or as a path to its JSON document.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ModelRef {
    Path { path: PathBuf },
    Inline(ModelSpec),
}

impl ModelRef {
    pub fn load(&self, base: &Path) -> Result<ModelSpec> {
        match self {
            ModelRef::Path { path } => ModelSpec::load(base.join(path)),
            ModelRef::Inline(m) => {
                m.validate()?;
                Ok(m.clone())
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    /// Per-coefficient summary CSV.
    pub summary_csv: Option<PathBuf>,
    /// One row of β̂ per repetition.
    pub repetitions_csv: Option<PathBuf>,
    /// Full report as JSON.
    pub report_json: Option<PathBuf>,
}

fn default_p() -> usize {
    4
}
fn default_n() -> usize {
    5000
}
fn default_lambda() -> f64 {
    1.0
}
fn default_reps() -> usize {
    100
}

/// One experiment: data → grid, model, ξ and the LIME hyper-parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub data: DataSource,
    #[serde(default = "default_p")]
    pub p: usize,
    #[serde(default)]
    pub nu: NuSpec,
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "default_lambda")]
    pub lambda: f64,
    #[serde(default = "default_reps")]
    pub repetitions: usize,
    #[serde(default)]
    pub xi: XiSpec,
    pub model: ModelRef,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub outputs: Outputs,
    /// Directory that relative paths are resolved against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

/// A config resolved into concrete objects.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub grid: BinGrid,
    pub model: ModelSpec,
    pub xi: Vec<f64>,
    pub b_star: BinIndices,
    pub nu: f64,
}

impl ExperimentConfig {
    /// Defaults for everything except the data source and the model.
    pub fn new(data: DataSource, model: ModelSpec) -> Self {
        Self {
            data,
            p: default_p(),
            nu: NuSpec::default(),
            n: default_n(),
            lambda: default_lambda(),
            repetitions: default_reps(),
            xi: XiSpec::default(),
            model: ModelRef::Inline(model),
            seed: 0,
            outputs: Outputs::default(),
            base_dir: PathBuf::new(),
        }
    }

    /// Parse TOML or JSON; the first non-blank character decides.
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: Self = if text.trim_start().starts_with('{') {
            serde_json::from_str(text)?
        } else {
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?
        };
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut cfg = Self::parse(&std::fs::read_to_string(path)?)?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    /// Checks that need no data.
    pub fn validate_basic(&self) -> Result<()> {
        if self.p < 2 {
            return Err(Error::Config(format!("p = {} must be at least 2", self.p)));
        }
        if self.repetitions == 0 {
            return Err(Error::Config("repetitions must be at least 1".into()));
        }
        if let NuSpec::Value(v) = self.nu {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("ν = {v} must be positive")));
            }
        }
        if !(self.lambda >= 0.0) {
            return Err(Error::Config(format!("λ = {} must be non-negative", self.lambda)));
        }
        Ok(())
    }

    pub fn prepare(&self) -> Result<Prepared> {
        self.validate_basic()?;
        let grid = self.data.grid(self.p, &self.base_dir)?;
        let d = grid.d();
        if self.n <= d + 1 {
            return Err(Error::Config(format!("n = {} must exceed d + 1 = {}", self.n, d + 1)));
        }
        let model = self.model.load(&self.base_dir)?;
        if model.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, found: model.dim() });
        }
        let xi = self.xi.resolve(&grid)?;
        let b_star = grid.bin_id(&xi)?;
        let nu = self.nu.resolve(d);
        Ok(Prepared { grid, model, xi, b_star, nu })
    }

    pub fn output_path(&self, p: &Path) -> PathBuf {
        self.base_dir.join(p)
    }
}
