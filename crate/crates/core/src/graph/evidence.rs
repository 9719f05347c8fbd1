use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Where a piece of evidence came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EvidenceSource {
    Ontology,
    Database,
    Semrep,
    Reach,
    Inferred,
}

impl EvidenceSource {
    pub fn as_str(self) -> &'static str {
        match self {
            EvidenceSource::Ontology => "ONTOLOGY",
            EvidenceSource::Database => "DATABASE",
            EvidenceSource::Semrep => "SEMREP",
            EvidenceSource::Reach => "REACH",
            EvidenceSource::Inferred => "INFERRED",
        }
    }

    pub fn is_literature(self) -> bool {
        matches!(self, EvidenceSource::Semrep | EvidenceSource::Reach)
    }

    pub fn is_curated(self) -> bool {
        matches!(self, EvidenceSource::Ontology | EvidenceSource::Database)
    }

    /// Classifies the free-text `source_name` column of an edge file.
    ///
    /// Names of the literature readers and of the closure engine map to their
    /// own sources so that snapshots round-trip; known drug and molecular
    /// databases map to `Database`; anything else is treated as an ontology.
    pub fn from_source_name(name: &str) -> EvidenceSource {
        let key = name.trim().to_ascii_lowercase();
        match key.as_str() {
            "semrep" => EvidenceSource::Semrep,
            "reach" | "indra" | "indra/reach" => EvidenceSource::Reach,
            "inferred" | "closure" => EvidenceSource::Inferred,
            _ if DATABASES.iter().any(|db| key == *db) => EvidenceSource::Database,
            _ => EvidenceSource::Ontology,
        }
    }
}

const DATABASES: &[&str] = &[
    "ctd",
    "dikb",
    "fda",
    "fda drug interaction database",
    "drug central",
    "drugcentral",
    "drugbank",
    "reactome",
    "reactome pathway database",
    "string",
    "string database",
    "uniprot",
    "disgenet",
    "gtex",
    "gteex",
    "human protein atlas",
    "hpa",
    "napdi",
];

impl fmt::Display for EvidenceSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EvidenceSource {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "ONTOLOGY" => Ok(EvidenceSource::Ontology),
            "DATABASE" => Ok(EvidenceSource::Database),
            "SEMREP" => Ok(EvidenceSource::Semrep),
            "REACH" => Ok(EvidenceSource::Reach),
            "INFERRED" => Ok(EvidenceSource::Inferred),
            _ => Err(format!("unknown evidence source `{s}`")),
        }
    }
}

/// One provenance entry supporting an edge.
///
/// Two records are equal iff every field is equal (confidence compared
/// bitwise), which is also the dedup rule when evidence sets merge.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EvidenceRecord {
    pub source: EvidenceSource,
    pub source_name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pmid: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub year: Option<i32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub confidence: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sentence: Option<String>,
    /// Keys of up to two premise edges for `Inferred` records.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub derived_from: Option<String>,
}

impl EvidenceRecord {
    fn bare(source: EvidenceSource, source_name: impl Into<String>) -> Self {
        EvidenceRecord {
            source,
            source_name: source_name.into(),
            pmid: None,
            year: None,
            confidence: None,
            sentence: None,
            derived_from: None,
        }
    }

    pub fn ontology(source_name: impl Into<String>) -> Self {
        Self::bare(EvidenceSource::Ontology, source_name)
    }

    pub fn database(source_name: impl Into<String>) -> Self {
        Self::bare(EvidenceSource::Database, source_name)
    }

    pub fn literature(
        source: EvidenceSource,
        pmid: impl Into<String>,
        year: Option<i32>,
        sentence: impl Into<String>,
    ) -> Self {
        let name = match source {
            EvidenceSource::Reach => "INDRA/REACH",
            _ => "SemRep",
        };
        EvidenceRecord {
            pmid: Some(pmid.into()),
            year,
            sentence: Some(sentence.into()),
            ..Self::bare(source, name)
        }
    }

    pub fn inferred(derived_from: impl Into<String>) -> Self {
        EvidenceRecord {
            derived_from: Some(derived_from.into()),
            ..Self::bare(EvidenceSource::Inferred, "closure")
        }
    }

    pub fn with_year(mut self, year: i32) -> Self {
        self.year = Some(year);
        self
    }

    pub fn with_pmid(mut self, pmid: impl Into<String>) -> Self {
        self.pmid = Some(pmid.into());
        self
    }

    pub fn with_confidence(mut self, confidence: f64) -> Self {
        self.confidence = Some(confidence);
        self
    }

    pub fn with_sentence(mut self, sentence: impl Into<String>) -> Self {
        self.sentence = Some(sentence.into());
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.source.is_literature() && self.pmid.as_deref().is_none_or(str::is_empty) {
            return Err(Error::InvalidEvidence(format!(
                "{} evidence requires a pmid",
                self.source
            )));
        }
        if self.source == EvidenceSource::Inferred
            && (self.pmid.is_some() || self.sentence.is_some())
        {
            return Err(Error::InvalidEvidence(
                "inferred evidence carries no pmid or sentence".into(),
            ));
        }
        if let Some(c) = self.confidence {
            if !(0.0..=1.0).contains(&c) {
                return Err(Error::InvalidEvidence(format!(
                    "confidence {c} outside [0, 1]"
                )));
            }
        }
        Ok(())
    }

    /// Whether this record admits its edge into a view cut at `cutoff`.
    /// Dated records qualify by year; undated ones only when curated.
    pub fn qualifies(&self, cutoff: i32) -> bool {
        match self.year {
            Some(y) => y <= cutoff,
            None => self.source.is_curated(),
        }
    }

    /// Smallest cutoff under which this record qualifies, if any.
    pub(crate) fn admission_year(&self) -> Option<i32> {
        match self.year {
            Some(y) => Some(y),
            None if self.source.is_curated() => Some(i32::MIN),
            None => None,
        }
    }

    fn key(&self) -> impl Ord + '_ {
        (
            self.source,
            &self.source_name,
            &self.pmid,
            self.year,
            self.confidence.map(OrdF64),
            &self.sentence,
            &self.derived_from,
        )
    }
}

#[derive(Clone, Copy, Debug)]
struct OrdF64(f64);

impl PartialEq for OrdF64 {
    fn eq(&self, other: &Self) -> bool {
        self.0.to_bits() == other.0.to_bits()
    }
}

impl Eq for OrdF64 {}

impl PartialOrd for OrdF64 {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OrdF64 {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

impl PartialEq for EvidenceRecord {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for EvidenceRecord {}

impl PartialOrd for EvidenceRecord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for EvidenceRecord {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

impl Hash for EvidenceRecord {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.source.hash(state);
        self.source_name.hash(state);
        self.pmid.hash(state);
        self.year.hash(state);
        self.confidence.map(f64::to_bits).hash(state);
        self.sentence.hash(state);
        self.derived_from.hash(state);
    }
}

/// Inserts `record` into a sorted evidence set. Returns false if present.
pub(crate) fn insert_sorted(set: &mut Vec<EvidenceRecord>, record: EvidenceRecord) -> bool {
    match set.binary_search(&record) {
        Ok(_) => false,
        Err(pos) => {
            set.insert(pos, record);
            true
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literature_needs_pmid() {
        let mut ev = EvidenceRecord::literature(EvidenceSource::Semrep, "123", Some(2013), "s");
        ev.validate().unwrap();
        ev.pmid = None;
        assert!(ev.validate().is_err());
        ev.pmid = Some(String::new());
        assert!(ev.validate().is_err());
    }

    #[test]
    fn inferred_has_no_sentence() {
        let ev = EvidenceRecord::inferred("a|r|b");
        ev.validate().unwrap();
        assert!(ev.with_sentence("x").validate().is_err());
    }

    #[test]
    fn confidence_bounds() {
        let ev = EvidenceRecord::database("DIKB");
        ev.clone().with_confidence(1.0).validate().unwrap();
        assert!(ev.clone().with_confidence(1.5).validate().is_err());
        assert!(ev.with_confidence(f64::NAN).validate().is_err());
    }

    #[test]
    fn equality_is_fieldwise() {
        let a = EvidenceRecord::literature(EvidenceSource::Reach, "1", Some(2020), "x")
            .with_confidence(0.5);
        let b = a.clone();
        assert_eq!(a, b);
        assert_ne!(a, b.clone().with_confidence(0.6));
        assert_ne!(a, b.with_sentence("y"));
    }

    #[test]
    fn qualification() {
        assert!(EvidenceRecord::database("CTD").qualifies(1900));
        let lit = EvidenceRecord::literature(EvidenceSource::Semrep, "1", Some(2013), "x");
        assert!(lit.qualifies(2013));
        assert!(!lit.qualifies(2012));
        let undated = EvidenceRecord::literature(EvidenceSource::Semrep, "1", None, "x");
        assert!(!undated.qualifies(3000));
        assert!(!EvidenceRecord::inferred("k").qualifies(3000));
    }

    #[test]
    fn source_names() {
        assert_eq!(
            EvidenceSource::from_source_name("DIKB"),
            EvidenceSource::Database
        );
        assert_eq!(
            EvidenceSource::from_source_name("CTD"),
            EvidenceSource::Database
        );
        assert_eq!(
            EvidenceSource::from_source_name("BioPortal"),
            EvidenceSource::Ontology
        );
        assert_eq!(
            EvidenceSource::from_source_name("SemRep"),
            EvidenceSource::Semrep
        );
        assert_eq!(
            EvidenceSource::from_source_name("INDRA/REACH"),
            EvidenceSource::Reach
        );
        assert_eq!(
            EvidenceSource::from_source_name("closure"),
            EvidenceSource::Inferred
        );
    }
}
