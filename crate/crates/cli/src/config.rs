//! JSON run configuration: initial-graph generator, target spec, loop
//! parameters, and output directory. All paths resolve relative to the
//! config file.

use anyhow::{bail, Context, Result};
use serde::Deserialize;
use specnet_core::{
    ConsensusMode, GenSpec, Graph, RunConfig, SafetyRule, SpectralTarget,
};
use std::path::{Path, PathBuf};

pub const SEED_ENV_VAR: &str = "SPECNET_SEED";

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfigFile {
    pub initial: GenSpecFile,
    pub target: TargetSpecFile,
    pub r: usize,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub max_iters: Option<usize>,
    #[serde(default)]
    pub safety_rule: Option<SafetyRuleFile>,
    #[serde(default)]
    pub consensus: Option<ConsensusFile>,
    pub out_dir: String,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum GenSpecFile {
    Star { n: usize },
    TwoStar { n: usize },
    Chain { n: usize },
    Ring { n: usize },
    WattsStrogatz { n: usize, k: usize, p: f64, #[serde(default)] seed: Option<u64> },
    BarabasiAlbert { n: usize, m: usize, #[serde(default)] seed: Option<u64> },
    ErdosRenyi { n: usize, p: f64, #[serde(default)] seed: Option<u64> },
}

impl GenSpecFile {
    /// Random families fall back to the run seed when none is given.
    pub fn to_spec(&self, fallback_seed: u64) -> GenSpec {
        match *self {
            GenSpecFile::Star { n } => GenSpec::Star { n },
            GenSpecFile::TwoStar { n } => GenSpec::TwoStar { n },
            GenSpecFile::Chain { n } => GenSpec::Chain { n },
            GenSpecFile::Ring { n } => GenSpec::Ring { n },
            GenSpecFile::WattsStrogatz { n, k, p, seed } => {
                GenSpec::WattsStrogatz { n, k, p, seed: seed.unwrap_or(fallback_seed) }
            }
            GenSpecFile::BarabasiAlbert { n, m, seed } => {
                GenSpec::BarabasiAlbert { n, m, seed: seed.unwrap_or(fallback_seed) }
            }
            GenSpecFile::ErdosRenyi { n, p, seed } => {
                GenSpec::ErdosRenyi { n, p, seed: seed.unwrap_or(fallback_seed) }
            }
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum TargetSpecFile {
    Moments { moments: Vec<f64> },
    EigenvaluesFile { eigenvalues_file: String },
    Generator { generator: GenSpecFile },
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SafetyRuleFile {
    #[serde(alias = "paper")]
    NeighborIntersection,
    SubgraphReachability,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum ConsensusFile {
    Named(String),
    Protocol { protocol: ProtocolParams },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolParams {
    pub tol: f64,
    pub max_rounds: usize,
}

/// A fully resolved run: initial graph, loop config, and output directory.
pub struct RunSetup {
    pub g0: Graph,
    pub config: RunConfig,
    pub out_dir: PathBuf,
}

/// Seed resolution order: config value, then the SPECNET_SEED environment
/// variable, then 0.
pub fn resolve_seed(from_config: Option<u64>) -> Result<u64> {
    if let Some(s) = from_config {
        return Ok(s);
    }
    match std::env::var(SEED_ENV_VAR) {
        Ok(text) => text
            .parse::<u64>()
            .with_context(|| format!("{SEED_ENV_VAR} must be an unsigned integer, got `{text}`")),
        Err(_) => Ok(0),
    }
}

pub fn load_run_setup(config_path: &Path) -> Result<RunSetup> {
    let text = std::fs::read_to_string(config_path)
        .with_context(|| format!("reading config {}", config_path.display()))?;
    let file: RunConfigFile = serde_json::from_str(&text)
        .with_context(|| format!("parsing config {}", config_path.display()))?;
    let base = config_path.parent().unwrap_or(Path::new("."));

    let seed = resolve_seed(file.seed)?;
    let order = 2 * file.r + 1;

    let g0 = file
        .initial
        .to_spec(seed)
        .build()
        .context("building the initial graph")?;

    let target = match &file.target {
        TargetSpecFile::Moments { moments } => {
            if moments.len() < order {
                bail!("target lists {} moments but r = {} needs {order}", moments.len(), file.r);
            }
            SpectralTarget::from_moments(specnet_core::MomentVector::new(moments.clone()))
        }
        TargetSpecFile::EigenvaluesFile { eigenvalues_file } => {
            let path = base.join(eigenvalues_file);
            let text = std::fs::read_to_string(&path)
                .with_context(|| format!("reading eigenvalues {}", path.display()))?;
            let values = crate::formats::parse_reals(&text)?;
            if values.is_empty() {
                bail!("eigenvalues file {} is empty", path.display());
            }
            SpectralTarget::from_eigenvalues(&values, order)
        }
        TargetSpecFile::Generator { generator } => {
            // An independent stream so the target realization does not
            // collide with the initial graph's.
            let g = generator
                .to_spec(seed ^ 0x7A26_57A7)
                .build()
                .context("building the target graph")?;
            SpectralTarget::from_graph(&g, order)
        }
    };

    let mut config = RunConfig::new(file.r, target);
    config.seed = seed;
    if let Some(iters) = file.max_iters {
        config.max_iters = iters;
    }
    config.safety_rule = match file.safety_rule {
        Some(SafetyRuleFile::NeighborIntersection) => SafetyRule::NeighborIntersection,
        Some(SafetyRuleFile::SubgraphReachability) | None => SafetyRule::SubgraphReachability,
    };
    config.consensus = match file.consensus {
        None => ConsensusMode::Exact,
        Some(ConsensusFile::Named(name)) if name == "exact" => ConsensusMode::Exact,
        Some(ConsensusFile::Named(name)) => bail!("unknown consensus mode `{name}`"),
        Some(ConsensusFile::Protocol { protocol }) => {
            ConsensusMode::Protocol { tol: protocol.tol, max_rounds: protocol.max_rounds }
        }
    };

    Ok(RunSetup { g0, config, out_dir: base.join(&file.out_dir) })
}
