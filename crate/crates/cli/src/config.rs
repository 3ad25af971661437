use std::fs;
use std::path::{Path, PathBuf};

use hoi_core::metrics::PageRankOptions;
use hoi_core::prediction::{DatasetOptions, ForestParams, Problem};
use hoi_core::stats::{NmiNorm, DEFAULT_NMI_BINS};
use hoi_core::{Error, Protocol, Result, DEFAULT_MAX_EDGE_SIZE};
use serde::{Deserialize, Serialize};

/// Edge count above which HOI sampling is switched on by default.
pub const LARGE_DATASET_EDGES: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub dataset: DatasetConfig,
    pub k: Vec<usize>,
    pub observe: u32,
    pub horizon: u32,
    pub window: u32,
    pub include_past: bool,
    pub include_first: bool,
    pub cap: Option<usize>,
    /// Cap applied when `cap` is unset and the dataset is large.
    pub default_cap: usize,
    pub seed: u64,
    pub problems: Vec<ProblemName>,
    pub train_fraction_group: f64,
    pub train_fraction_node: f64,
    pub pagerank: PageRankConfig,
    pub forest: ForestConfig,
    pub correlate: CorrelateConfig,
    pub periods: PeriodsConfig,
    pub nullmodel: NullConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DatasetConfig {
    pub name: String,
    pub data_dir: PathBuf,
    /// Overrides `data_dir/name/name`.
    pub prefix: Option<PathBuf>,
    /// Raw timestamp ticks per time unit.
    pub unit_width: i64,
    pub max_size: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PageRankConfig {
    pub weighted: bool,
    pub damping: f64,
    pub tolerance: f64,
    pub max_iter: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ForestConfig {
    pub n_trees: usize,
    pub max_depth: usize,
    pub min_samples_split: usize,
    pub max_features: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorrelateConfig {
    pub nmi_bins: usize,
    pub nmi_norm: NmiNormName,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PeriodsConfig {
    pub observe: Vec<u32>,
    pub include_past: Vec<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NullConfig {
    pub modes: Vec<String>,
    pub seeds: u64,
    /// Also write each randomized hypergraph in canonical form.
    pub dump: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ProblemName {
    Group,
    Node,
}

impl From<ProblemName> for Problem {
    fn from(p: ProblemName) -> Self {
        match p {
            ProblemName::Group => Problem::Group,
            ProblemName::Node => Problem::Node,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum NmiNormName {
    Sqrt,
    Min,
    Mean,
}

impl From<NmiNormName> for NmiNorm {
    fn from(n: NmiNormName) -> Self {
        match n {
            NmiNormName::Sqrt => NmiNorm::Sqrt,
            NmiNormName::Min => NmiNorm::Min,
            NmiNormName::Mean => NmiNorm::Mean,
        }
    }
}

impl Default for Config {
    fn default() -> Self {
        let protocol = Protocol::default();
        Self {
            dataset: DatasetConfig::default(),
            k: vec![2, 3, 4],
            observe: protocol.observe,
            horizon: protocol.horizon,
            window: 30,
            include_past: false,
            include_first: false,
            cap: None,
            default_cap: 200_000,
            seed: 0,
            problems: vec![ProblemName::Group, ProblemName::Node],
            train_fraction_group: Problem::Group.default_train_fraction(),
            train_fraction_node: Problem::Node.default_train_fraction(),
            pagerank: PageRankConfig::default(),
            forest: ForestConfig::default(),
            correlate: CorrelateConfig::default(),
            periods: PeriodsConfig::default(),
            nullmodel: NullConfig::default(),
        }
    }
}

impl Default for DatasetConfig {
    fn default() -> Self {
        Self {
            name: "dataset".into(),
            data_dir: PathBuf::from("data"),
            prefix: None,
            unit_width: 1,
            max_size: DEFAULT_MAX_EDGE_SIZE,
        }
    }
}

impl Default for PageRankConfig {
    fn default() -> Self {
        let d = PageRankOptions::default();
        Self {
            weighted: d.weighted,
            damping: d.damping,
            tolerance: d.tolerance,
            max_iter: d.max_iter,
        }
    }
}

impl Default for ForestConfig {
    fn default() -> Self {
        let d = ForestParams::default();
        Self {
            n_trees: d.n_trees,
            max_depth: d.max_depth,
            min_samples_split: d.min_samples_split,
            max_features: d.max_features,
        }
    }
}

impl Default for CorrelateConfig {
    fn default() -> Self {
        Self {
            nmi_bins: DEFAULT_NMI_BINS,
            nmi_norm: NmiNormName::Sqrt,
        }
    }
}

impl Default for PeriodsConfig {
    fn default() -> Self {
        Self {
            observe: vec![1, 3, 5],
            include_past: vec![false, true],
        }
    }
}

impl Default for NullConfig {
    fn default() -> Self {
        Self {
            modes: vec!["shuffle-times".into(), "shuffle-nodes".into()],
            seeds: 1,
            dump: false,
        }
    }
}

impl Config {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn prefix(&self) -> PathBuf {
        self.dataset.prefix.clone().unwrap_or_else(|| {
            self.dataset
                .data_dir
                .join(&self.dataset.name)
                .join(&self.dataset.name)
        })
    }

    pub fn protocol(&self) -> Protocol {
        Protocol {
            observe: self.observe,
            horizon: self.horizon,
            include_past: self.include_past,
            include_first: self.include_first,
        }
    }

    pub fn pagerank_options(&self) -> PageRankOptions {
        PageRankOptions {
            damping: self.pagerank.damping,
            tolerance: self.pagerank.tolerance,
            max_iter: self.pagerank.max_iter,
            weighted: self.pagerank.weighted,
        }
    }

    /// Forest parameters for one grid cell; the seed is derived from the
    /// base seed and the cell so that cells are independent of run order.
    pub fn forest_params(&self, cell_seed: u64) -> ForestParams {
        ForestParams {
            n_trees: self.forest.n_trees,
            max_depth: self.forest.max_depth,
            min_samples_split: self.forest.min_samples_split,
            max_features: self.forest.max_features,
            bootstrap: true,
            seed: cell_seed,
        }
    }

    /// Effective HOI cap for a hypergraph with `num_edges` edges.
    pub fn effective_cap(&self, num_edges: usize) -> Option<usize> {
        self.cap
            .or((num_edges > LARGE_DATASET_EDGES).then_some(self.default_cap))
    }

    pub fn dataset_options(&self, num_edges: usize) -> DatasetOptions {
        DatasetOptions {
            protocol: self.protocol(),
            cap: self.effective_cap(num_edges),
            seed: self.seed,
            pagerank: self.pagerank_options(),
        }
    }

    pub fn train_fraction(&self, problem: Problem) -> f64 {
        match problem {
            Problem::Group => self.train_fraction_group,
            Problem::Node => self.train_fraction_node,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.protocol().validate()?;
        if self.k.is_empty() {
            return Err(Error::Config("no HOI size selected".into()));
        }
        for &k in &self.k {
            hoi_core::persistence::check_hoi_size(k)?;
        }
        if self.window == 0 {
            return Err(Error::Config("window must be at least one unit".into()));
        }
        if self.dataset.unit_width <= 0 {
            return Err(Error::Config(format!(
                "unit width must be positive, got {}",
                self.dataset.unit_width
            )));
        }
        if self.forest.n_trees == 0 || self.forest.max_depth == 0 {
            return Err(Error::Config(
                "forest needs at least one tree of depth one".into(),
            ));
        }
        for f in [self.train_fraction_group, self.train_fraction_node] {
            if !(f > 0.0 && f < 1.0) {
                return Err(Error::Config(format!("train fraction {f} outside (0, 1)")));
            }
        }
        for m in &self.nullmodel.modes {
            m.parse::<hoi_core::nullmodel::RandomizeMode>()?;
        }
        Ok(())
    }
}

/// Seed for a (problem, k) cell, mixed from the base seed.
pub fn cell_seed(base: u64, problem: Problem, k: usize) -> u64 {
    let tag = match problem {
        Problem::Group => 1u64,
        Problem::Node => 2,
    };
    base.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(tag << 8 | k as u64)
}
