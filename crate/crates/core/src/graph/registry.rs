use std::collections::BTreeMap;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// A registered relation: ontology identifier plus canonical label.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RelationId {
    pub id: String,
    pub label: String,
}

impl RelationId {
    pub fn new(id: impl Into<String>, label: impl Into<String>) -> Self {
        RelationId {
            id: id.into(),
            label: label.into(),
        }
    }

    /// A reference by id alone; the label is filled in from the registry.
    pub fn by_id(id: impl Into<String>) -> Self {
        RelationId::new(id, "")
    }
}

/// Dense index of a relation inside a [`RelationRegistry`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RelIdx(pub u32);

/// Closed set of relations an edge may use. Relations are kept sorted by id,
/// so two registries with the same content assign the same indices.
#[derive(Clone, Debug, Default)]
pub struct RelationRegistry {
    relations: Vec<RelationId>,
    index: FxHashMap<String, RelIdx>,
}

impl PartialEq for RelationRegistry {
    fn eq(&self, other: &Self) -> bool {
        self.relations == other.relations
    }
}

impl Eq for RelationRegistry {}

impl RelationRegistry {
    pub fn new(relations: impl IntoIterator<Item = RelationId>) -> Result<Self> {
        let mut by_id: BTreeMap<String, String> = BTreeMap::new();
        for rel in relations {
            match by_id.get(&rel.id) {
                Some(existing) if *existing != rel.label => {
                    return Err(Error::RelationLabelMismatch {
                        id: rel.id,
                        registered: existing.clone(),
                        given: rel.label,
                    })
                }
                Some(_) => {}
                None => {
                    by_id.insert(rel.id, rel.label);
                }
            }
        }
        let relations: Vec<RelationId> = by_id
            .into_iter()
            .map(|(id, label)| RelationId { id, label })
            .collect();
        let index = relations
            .iter()
            .enumerate()
            .map(|(i, r)| (r.id.clone(), RelIdx(i as u32)))
            .collect();
        Ok(RelationRegistry { relations, index })
    }

    pub fn len(&self) -> usize {
        self.relations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.relations.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &RelationId> {
        self.relations.iter()
    }

    pub fn get(&self, id: &str) -> Option<&RelationId> {
        self.index_of(id).map(|i| self.relation(i))
    }

    pub fn index_of(&self, id: &str) -> Option<RelIdx> {
        self.index.get(id).copied()
    }

    pub fn relation(&self, idx: RelIdx) -> &RelationId {
        &self.relations[idx.0 as usize]
    }

    /// Looks up by label, accepting either spaces or underscores
    /// (`interacts with` / `interacts_with`).
    pub fn by_label(&self, label: &str) -> Option<&RelationId> {
        let wanted = label.trim().replace('_', " ");
        self.relations
            .iter()
            .find(|r| r.label.eq_ignore_ascii_case(&wanted))
    }

    /// Resolves a relation reference, checking the label when one is given.
    pub fn resolve(&self, rel: &RelationId) -> Result<RelIdx> {
        let idx = self
            .index_of(&rel.id)
            .ok_or_else(|| Error::RelationNotRegistered(rel.id.clone()))?;
        let registered = &self.relation(idx).label;
        if !rel.label.is_empty() && rel.label != *registered {
            return Err(Error::RelationLabelMismatch {
                id: rel.id.clone(),
                registered: registered.clone(),
                given: rel.label.clone(),
            });
        }
        Ok(idx)
    }

    /// Hex SHA-256 over the sorted `id\tlabel` lines.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        for r in &self.relations {
            h.update(r.id.as_bytes());
            h.update(b"\t");
            h.update(r.label.as_bytes());
            h.update(b"\n");
        }
        hex(&h.finalize())
    }
}

pub(crate) fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}
