use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Kind of entity a node stands for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Category {
    Chemical,
    Protein,
    Gene,
    Pathway,
    Disease,
    Phenotype,
    Anatomy,
    Cell,
    Process,
    Function,
    Other,
}

impl Category {
    pub const ALL: [Category; 11] = [
        Category::Chemical,
        Category::Protein,
        Category::Gene,
        Category::Pathway,
        Category::Disease,
        Category::Phenotype,
        Category::Anatomy,
        Category::Cell,
        Category::Process,
        Category::Function,
        Category::Other,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Category::Chemical => "CHEMICAL",
            Category::Protein => "PROTEIN",
            Category::Gene => "GENE",
            Category::Pathway => "PATHWAY",
            Category::Disease => "DISEASE",
            Category::Phenotype => "PHENOTYPE",
            Category::Anatomy => "ANATOMY",
            Category::Cell => "CELL",
            Category::Process => "PROCESS",
            Category::Function => "FUNCTION",
            Category::Other => "OTHER",
        }
    }

    /// Best guess from an ontology prefix, used for nodes created during
    /// literature linking where no node file supplies a category.
    pub fn from_namespace(namespace: &str) -> Category {
        match namespace.to_ascii_uppercase().as_str() {
            "CHEBI" | "DRUGBANK" | "PUBCHEM" | "MESH" => Category::Chemical,
            "PR" | "UNIPROT" | "UNIPROTKB" => Category::Protein,
            "HGNC" | "NCBIGENE" | "ENTREZ" | "ENSEMBL" => Category::Gene,
            "REACT" | "REACTOME" | "PW" => Category::Pathway,
            "MONDO" | "DOID" => Category::Disease,
            "HP" => Category::Phenotype,
            "UBERON" => Category::Anatomy,
            "CL" => Category::Cell,
            "GO" => Category::Process,
            _ => Category::Other,
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Category {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let upper = s.trim().to_ascii_uppercase();
        Category::ALL
            .into_iter()
            .find(|c| c.as_str() == upper)
            .ok_or_else(|| format!("unknown node category `{s}`"))
    }
}

/// Prefix portion of a CURIE. Both `CHEBI:23053` and the OBO underscore form
/// `PR_000006130` are recognised; `:` wins when both separators appear.
pub fn curie_prefix(id: &str) -> Option<&str> {
    let sep = id.find(':').or_else(|| id.find('_'))?;
    Some(&id[..sep])
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NodeRecord {
    pub id: String,
    pub label: String,
    pub namespace: String,
    pub category: Category,
}

impl NodeRecord {
    /// Builds a node whose namespace is taken from the id prefix.
    pub fn new(id: impl Into<String>, label: impl Into<String>, category: Category) -> Self {
        let id = id.into();
        let namespace = curie_prefix(&id).unwrap_or_default().to_string();
        NodeRecord {
            id,
            label: label.into(),
            namespace,
            category,
        }
    }

    pub(crate) fn placeholder(id: &str) -> Self {
        NodeRecord::new(id, id, Category::Other)
    }

    pub fn validate(&self) -> Result<()> {
        if self.id.trim().is_empty() {
            return Err(Error::InvalidNode {
                id: self.id.clone(),
                reason: "empty id".into(),
            });
        }
        if let Some(prefix) = curie_prefix(&self.id) {
            if prefix != self.namespace {
                return Err(Error::InvalidNode {
                    id: self.id.clone(),
                    reason: format!(
                        "namespace `{}` does not match id prefix `{prefix}`",
                        self.namespace
                    ),
                });
            }
        }
        Ok(())
    }
}
