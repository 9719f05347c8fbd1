use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::tsv;
use super::{Endpoint, ExtractionSource, Predication};
use crate::error::{Error, Result};
use crate::graph::{RelationId, RelationRegistry};

const BUILTIN_RELATION_MAP: &str = include_str!("../../data/relation_map.tsv");
const BUILTIN_EXCLUDED_RELATIONS: &str = include_str!("../../data/excluded_relations.txt");
const BUILTIN_EXCLUDED_SEMTYPES: &str = include_str!("../../data/excluded_semtypes.txt");
const BUILTIN_EXCLUDED_GENERICS: &str = include_str!("../../data/excluded_generics.txt");

/// Which extraction system a relation-map row applies to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum MapSource {
    Semrep,
    Reach,
    Any,
}

impl From<ExtractionSource> for MapSource {
    fn from(s: ExtractionSource) -> Self {
        match s {
            ExtractionSource::Semrep => MapSource::Semrep,
            ExtractionSource::Reach => MapSource::Reach,
        }
    }
}

impl FromStr for MapSource {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "SEMREP" => Ok(MapSource::Semrep),
            "REACH" | "INDRA/REACH" | "INDRA" => Ok(MapSource::Reach),
            "ANY" | "*" => Ok(MapSource::Any),
            _ => Err(format!("unknown map source `{s}`")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Disposition {
    Keep,
    Negated,
    Exclude,
}

impl FromStr for Disposition {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "KEEP" => Ok(Disposition::Keep),
            "NEGATED" => Ok(Disposition::Negated),
            "EXCLUDE" => Ok(Disposition::Exclude),
            _ => Err(format!("unknown disposition `{s}`")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationMapping {
    pub raw: String,
    pub source: MapSource,
    /// Absent only for `Exclude` rows.
    pub mapped: Option<RelationId>,
    pub disposition: Disposition,
}

/// Result of normalising a raw extracted relation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Normalized {
    Keep(RelationId),
    /// A `neg_` relation, carried under its positive form.
    Negated(RelationId),
    Excluded,
}

/// Curated raw-relation → ontology-relation table. Its mapped relations form
/// the relation registry every graph is built against.
#[derive(Clone, Debug)]
pub struct RelationMap {
    entries: HashMap<(String, MapSource), RelationMapping>,
    registry: Arc<RelationRegistry>,
}

pub const RELATION_MAP_HEADER: [&str; 5] =
    ["raw", "source", "mapped_id", "mapped_label", "disposition"];

impl RelationMap {
    pub fn builtin() -> Self {
        Self::parse(
            Path::new("<builtin relation_map.tsv>"),
            BUILTIN_RELATION_MAP,
        )
        .expect("bundled relation map is valid")
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = tsv::read_to_string(path)?;
        Self::parse(path, &text)
    }

    pub fn parse(path: &Path, text: &str) -> Result<Self> {
        let mut entries = HashMap::new();
        let mut relations = Vec::new();
        for row in tsv::rows(path, text, &RELATION_MAP_HEADER, 5)? {
            let err = |m: String| Error::parse(path, row.line, m);
            let raw = row.opt(0).ok_or_else(|| err("empty raw relation".into()))?;
            let source: MapSource = row.get(1).parse().map_err(err)?;
            let disposition: Disposition = row.get(4).parse().map_err(err)?;
            if disposition == Disposition::Negated && !raw.starts_with("neg_") {
                return Err(err(format!(
                    "NEGATED disposition requires a `neg_` relation, got `{raw}`"
                )));
            }
            let mapped = match (row.opt(2), row.opt(3)) {
                (Some(id), Some(label)) => Some(RelationId::new(id, label)),
                (None, None) if disposition == Disposition::Exclude => None,
                _ => return Err(err("mapped_id and mapped_label are required".into())),
            };
            if disposition != Disposition::Exclude {
                relations.push(mapped.clone().expect("checked above"));
            }
            let key = (raw.to_string(), source);
            if entries.contains_key(&key) {
                return Err(err(format!("duplicate mapping for `{raw}`")));
            }
            entries.insert(
                key,
                RelationMapping {
                    raw: raw.to_string(),
                    source,
                    mapped,
                    disposition,
                },
            );
        }
        let registry = RelationRegistry::new(relations).map_err(|e| e.at_line(path, 0))?;
        Ok(RelationMap {
            entries,
            registry: Arc::new(registry),
        })
    }

    pub fn registry(&self) -> Arc<RelationRegistry> {
        self.registry.clone()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Source-specific row first, then the `ANY` row.
    pub fn lookup(&self, raw: &str, source: ExtractionSource) -> Option<&RelationMapping> {
        let raw = raw.trim();
        self.entries
            .get(&(raw.to_string(), source.into()))
            .or_else(|| self.entries.get(&(raw.to_string(), MapSource::Any)))
    }

    pub fn normalize(&self, raw: &str, source: ExtractionSource) -> Normalized {
        match self.lookup(raw, source) {
            None => {
                log::warn!("unmapped {source} relation `{raw}` excluded");
                Normalized::Excluded
            }
            Some(m) => match (m.disposition, &m.mapped) {
                (Disposition::Keep, Some(r)) => Normalized::Keep(r.clone()),
                (Disposition::Negated, Some(r)) => Normalized::Negated(r.clone()),
                _ => Normalized::Excluded,
            },
        }
    }
}

pub fn normalize_relation(raw: &str, source: ExtractionSource, map: &RelationMap) -> Normalized {
    map.normalize(raw, source)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntityMapping {
    pub key: String,
    pub mapped: String,
    pub mapped_label: String,
}

/// Curated mention (or source concept id) → CURIE table. Lookups ignore
/// ASCII case but are otherwise exact.
#[derive(Clone, Debug, Default)]
pub struct EntityMap {
    entries: HashMap<String, EntityMapping>,
    /// mapped id → smallest curated label for it
    labels: HashMap<String, String>,
}

pub const ENTITY_MAP_HEADER: [&str; 3] = ["key", "mapped_id", "mapped_label"];

impl EntityMap {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = tsv::read_to_string(path)?;
        Self::parse(path, &text)
    }

    pub fn parse(path: &Path, text: &str) -> Result<Self> {
        let mut map = EntityMap::default();
        for row in tsv::rows(path, text, &ENTITY_MAP_HEADER, 2)? {
            let err = |m: &str| Error::parse(path, row.line, m);
            let key = row.opt(0).ok_or_else(|| err("empty key"))?;
            let mapped = row.opt(1).ok_or_else(|| err("empty mapped_id"))?;
            let label = row.opt(2).unwrap_or(mapped);
            let entry = EntityMapping {
                key: key.to_string(),
                mapped: mapped.to_string(),
                mapped_label: label.to_string(),
            };
            if !map.insert(entry) {
                return Err(Error::parse(
                    path,
                    row.line,
                    format!("duplicate entity key `{key}`"),
                ));
            }
        }
        Ok(map)
    }

    /// Returns false (and keeps the old entry) if the key is already present.
    pub fn insert(&mut self, entry: EntityMapping) -> bool {
        let k = entry.key.to_lowercase();
        if self.entries.contains_key(&k) {
            return false;
        }
        match self.labels.get_mut(&entry.mapped) {
            Some(l) if *l <= entry.mapped_label => {}
            Some(l) => *l = entry.mapped_label.clone(),
            None => {
                self.labels
                    .insert(entry.mapped.clone(), entry.mapped_label.clone());
            }
        }
        self.entries.insert(k, entry);
        true
    }

    /// Curated label for a mapped id, if any entry maps to it.
    pub fn label_of(&self, mapped_id: &str) -> Option<&str> {
        self.labels.get(mapped_id).map(String::as_str)
    }

    pub fn get(&self, key: &str) -> Option<&EntityMapping> {
        self.entries.get(&key.trim().to_lowercase())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Link {
    Linked(String),
    Unmapped,
}

/// Pre-linked ids pass straight through; otherwise the mention is looked up.
pub fn link_entity(endpoint: Endpoint<'_>, map: &EntityMap) -> Link {
    if let Some(id) = endpoint.id.map(str::trim).filter(|s| !s.is_empty()) {
        return Link::Linked(id.to_string());
    }
    match map.get(endpoint.text) {
        Some(m) => Link::Linked(m.mapped.clone()),
        None => Link::Unmapped,
    }
}

/// Exclusion lists applied before normalisation.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FilterConfig {
    pub excluded_relations: BTreeSet<String>,
    pub excluded_semtypes: BTreeSet<String>,
    /// Stored lower-cased; matched case-insensitively.
    pub excluded_generic_concepts: BTreeSet<String>,
    /// Off by default. Predications without a confidence are never rejected by it.
    pub min_confidence: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RejectReason {
    ExcludedRelation,
    ExcludedSemtype,
    GenericConcept,
    LowConfidence,
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RejectReason::ExcludedRelation => "excluded-relation",
            RejectReason::ExcludedSemtype => "excluded-semtype",
            RejectReason::GenericConcept => "generic-concept",
            RejectReason::LowConfidence => "low-confidence",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FilterDecision {
    Accept,
    Reject(RejectReason),
}

impl FilterConfig {
    pub fn builtin() -> Self {
        let mut cfg = FilterConfig::default();
        cfg.extend_lists(
            BUILTIN_EXCLUDED_RELATIONS,
            BUILTIN_EXCLUDED_SEMTYPES,
            BUILTIN_EXCLUDED_GENERICS,
        );
        cfg
    }

    fn extend_lists(&mut self, relations: &str, semtypes: &str, generics: &str) {
        self.excluded_relations
            .extend(tsv::list(relations).map(str::to_string));
        self.excluded_semtypes
            .extend(tsv::list(semtypes).map(str::to_string));
        self.excluded_generic_concepts
            .extend(tsv::list(generics).map(str::to_lowercase));
    }

    /// A directory holding `excluded_relations.txt`, `excluded_semtypes.txt`
    /// and `excluded_generics.txt` (missing files are empty lists), or a
    /// single TSV with header `kind\tvalue`, kind one of `relation`,
    /// `semtype`, `generic`, `min_confidence`.
    pub fn from_path(path: &Path) -> Result<Self> {
        if path.is_dir() {
            Self::from_dir(path)
        } else {
            Self::from_tsv(path)
        }
    }

    pub fn from_dir(dir: &Path) -> Result<Self> {
        if !dir.is_dir() {
            return Err(Error::io(
                dir,
                std::io::Error::new(std::io::ErrorKind::NotFound, "filter directory not found"),
            ));
        }
        let read = |name: &str| -> Result<String> {
            let p = dir.join(name);
            if p.exists() {
                tsv::read_to_string(&p)
            } else {
                Ok(String::new())
            }
        };
        let mut cfg = FilterConfig::default();
        cfg.extend_lists(
            &read("excluded_relations.txt")?,
            &read("excluded_semtypes.txt")?,
            &read("excluded_generics.txt")?,
        );
        Ok(cfg)
    }

    pub fn from_tsv(path: &Path) -> Result<Self> {
        let text = tsv::read_to_string(path)?;
        let mut cfg = FilterConfig::default();
        for row in tsv::rows(path, &text, &["kind", "value"], 2)? {
            let value = row
                .opt(1)
                .ok_or_else(|| Error::parse(path, row.line, "empty value"))?;
            match row.get(0).trim().to_ascii_lowercase().as_str() {
                "relation" => {
                    cfg.excluded_relations.insert(value.to_string());
                }
                "semtype" => {
                    cfg.excluded_semtypes.insert(value.to_string());
                }
                "generic" => {
                    cfg.excluded_generic_concepts.insert(value.to_lowercase());
                }
                "min_confidence" => {
                    let c: f64 = value
                        .parse()
                        .map_err(|_| Error::parse(path, row.line, "bad min_confidence"))?;
                    cfg.min_confidence = Some(c);
                }
                other => {
                    return Err(Error::parse(
                        path,
                        row.line,
                        format!("unknown filter kind `{other}`"),
                    ))
                }
            }
        }
        Ok(cfg)
    }
}

pub fn filter_predication(p: &Predication, cfg: &FilterConfig) -> FilterDecision {
    if cfg.excluded_relations.contains(p.relation_raw.trim()) {
        return FilterDecision::Reject(RejectReason::ExcludedRelation);
    }
    let semtype_hit = [&p.subject_semtype, &p.object_semtype]
        .into_iter()
        .flatten()
        .any(|s| cfg.excluded_semtypes.contains(s.trim()));
    if semtype_hit {
        return FilterDecision::Reject(RejectReason::ExcludedSemtype);
    }
    let generic_hit = [&p.subject_text, &p.object_text].into_iter().any(|m| {
        cfg.excluded_generic_concepts
            .contains(&m.trim().to_lowercase())
    });
    if generic_hit {
        return FilterDecision::Reject(RejectReason::GenericConcept);
    }
    if let (Some(min), Some(c)) = (cfg.min_confidence, p.confidence) {
        if c < min {
            return FilterDecision::Reject(RejectReason::LowConfidence);
        }
    }
    FilterDecision::Accept
}
