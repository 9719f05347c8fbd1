//! TOML run configuration. Relative paths resolve against the config file's directory.

use std::fmt;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use npdi_graph::snapshot::sha256_hex;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ClosureScope {
    /// Close the literature graph alone, then merge.
    #[default]
    Literature,
    /// Close the merged graph, so curated edges can act as premises.
    Merged,
    /// No inference.
    None,
}

impl fmt::Display for ClosureScope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClosureScope::Literature => "literature",
            ClosureScope::Merged => "merged",
            ClosureScope::None => "none",
        })
    }
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default)]
    nodes: Vec<PathBuf>,
    #[serde(default)]
    edges: Vec<PathBuf>,
    #[serde(default)]
    predications: Vec<PathBuf>,
    entity_map: Option<PathBuf>,
    relation_map: Option<PathBuf>,
    filters: Option<PathBuf>,
    closure_rules: Option<PathBuf>,
    polarity: Option<PathBuf>,
    targets: Option<PathBuf>,
    ground_truth: Option<PathBuf>,
    directed: Option<bool>,
    strict_endpoints: Option<bool>,
    closure: Option<ClosureScope>,
    year_cutoff: Option<i32>,
    out: Option<PathBuf>,
    snapshot: Option<PathBuf>,
}

/// Everything a run needs, with paths already resolved.
#[derive(Clone, Debug, Default)]
pub struct RunConfig {
    pub nodes: Vec<PathBuf>,
    pub edges: Vec<PathBuf>,
    pub predications: Vec<PathBuf>,
    pub entity_map: Option<PathBuf>,
    pub relation_map: Option<PathBuf>,
    pub filters: Option<PathBuf>,
    pub closure_rules: Option<PathBuf>,
    pub polarity: Option<PathBuf>,
    pub targets: Option<PathBuf>,
    pub ground_truth: Option<PathBuf>,
    pub directed: bool,
    pub strict_endpoints: bool,
    pub closure: ClosureScope,
    pub year_cutoff: Option<i32>,
    pub out: Option<PathBuf>,
    pub snapshot: Option<PathBuf>,
    /// Contents of the config file, hashed into the snapshot manifest.
    pub source_text: String,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("{}: cannot read config", path.display()))?;
        let raw: RawConfig =
            toml::from_str(&text).with_context(|| format!("{}: invalid config", path.display()))?;
        let base = path.parent().unwrap_or(Path::new(""));
        let at = |p: PathBuf| if p.is_absolute() { p } else { base.join(p) };
        let all = |v: Vec<PathBuf>| v.into_iter().map(at).collect();
        Ok(RunConfig {
            nodes: all(raw.nodes),
            edges: all(raw.edges),
            predications: all(raw.predications),
            entity_map: raw.entity_map.map(at),
            relation_map: raw.relation_map.map(at),
            filters: raw.filters.map(at),
            closure_rules: raw.closure_rules.map(at),
            polarity: raw.polarity.map(at),
            targets: raw.targets.map(at),
            ground_truth: raw.ground_truth.map(at),
            directed: raw.directed.unwrap_or(true),
            strict_endpoints: raw.strict_endpoints.unwrap_or(true),
            closure: raw.closure.unwrap_or_default(),
            year_cutoff: raw.year_cutoff,
            out: raw.out.map(at),
            snapshot: raw.snapshot.map(at),
            source_text: text,
        })
    }

    pub fn defaults() -> Self {
        RunConfig {
            directed: true,
            strict_endpoints: true,
            ..Default::default()
        }
    }

    /// Every input file the build step will open.
    pub fn build_inputs(&self) -> Vec<&Path> {
        let singles = [
            &self.entity_map,
            &self.relation_map,
            &self.filters,
            &self.closure_rules,
        ];
        self.nodes
            .iter()
            .chain(&self.edges)
            .chain(&self.predications)
            .map(PathBuf::as_path)
            .chain(singles.into_iter().flatten().map(PathBuf::as_path))
            .collect()
    }

    pub fn hash(&self) -> String {
        let effective = format!(
            "{}\n--\nclosure={} cutoff={:?} strict={}\n",
            self.source_text, self.closure, self.year_cutoff, self.strict_endpoints
        );
        sha256_hex(effective.as_bytes())
    }
}
