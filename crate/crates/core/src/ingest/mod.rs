//! Knowledge-base items, encyclopedia text and the statement triples used for
//! distant supervision.

mod date;
mod text;
mod wikidata;

pub use date::{localize_date, DatePrecision, KbDate, SUPPORTED_LANGUAGES};
pub use text::{clean_sentence, extract_page_paragraphs, split_sentences, ABBREVIATIONS};
#[cfg(feature = "http")]
pub use wikidata::HttpTransport;
pub use wikidata::{
    parse_entity_json, ClientConfig, KnowledgeBaseClient, OfflineTransport, Transport,
    TransportError,
};

use std::collections::{BTreeSet, HashSet};
use std::io;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Place of birth, date of birth, date of death, occupation, spouse, educated at.
pub const DEFAULT_PROPERTIES: [&str; 6] = ["P19", "P569", "P570", "P106", "P26", "P69"];

/// Readable names used in reports.
pub fn property_name(property: &str) -> Option<&'static str> {
    Some(match property {
        "P19" => "placeOfBirth",
        "P569" => "dateOfBirth",
        "P570" => "dateOfDeath",
        "P106" => "occupation",
        "P26" => "spouse",
        "P69" => "educatedAt",
        "P509" => "causeOfDeath",
        "P20" => "placeOfDeath",
        _ => return None,
    })
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("item {0} not found")]
    NotFound(String),
    #[error("request to {url} failed: {message}")]
    Transport {
        url: String,
        message: String,
        retryable: bool,
    },
    #[error("cache error at {path}: {source}")]
    Cache {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error("malformed knowledge-base payload for {id}: {message}")]
    Payload { id: String, message: String },
    #[error("unsupported language `{language}` (supported: {})", .supported.join(", "))]
    UnsupportedLanguage {
        language: String,
        supported: Vec<&'static str>,
    },
}

impl IngestError {
    pub fn is_retryable(&self) -> bool {
        matches!(
            self,
            IngestError::Transport {
                retryable: true,
                ..
            }
        )
    }
}

/// The value side of a knowledge-base statement.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", content = "value", rename_all = "lowercase")]
pub enum TargetValue {
    Item(String),
    Time(KbDate),
    Quantity(String),
    Text(String),
    Empty,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawStatement {
    pub property: String,
    pub value: TargetValue,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ItemRecord {
    pub item_id: String,
    pub label: String,
    pub description: String,
    pub aliases: Vec<String>,
    /// Page title on the encyclopedia of the requested language.
    pub sitelink: Option<String>,
    pub raw_statements: Vec<RawStatement>,
    /// Set when the item has no label in the requested language.
    pub incomplete: bool,
}

impl ItemRecord {
    /// Label followed by aliases, deduplicated in order, empty strings dropped.
    pub fn designations(&self) -> Vec<String> {
        dedup_stable(std::iter::once(&self.label).chain(&self.aliases).cloned())
    }
}

fn dedup_stable(items: impl IntoIterator<Item = String>) -> Vec<String> {
    let mut seen = HashSet::new();
    items
        .into_iter()
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty() && seen.insert(s.clone()))
        .collect()
}

/// `(source designations, property, target designations)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct StatementTriple {
    pub source: Vec<String>,
    pub property: String,
    pub target: Vec<String>,
}

impl StatementTriple {
    pub fn new(source: Vec<String>, property: &str, target: Vec<String>) -> Self {
        StatementTriple {
            source: dedup_stable(source),
            property: property.to_string(),
            target: dedup_stable(target),
        }
    }

    pub fn is_valid(&self) -> bool {
        !self.source.is_empty()
            && !self.target.is_empty()
            && self.property.len() > 1
            && self.property.starts_with('P')
            && self.property[1..].bytes().all(|b| b.is_ascii_digit())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentenceRecord {
    pub text: String,
    pub page: String,
    pub position: usize,
}

/// Anything that can resolve an item id to a record.
pub trait ItemSource: Sync {
    fn fetch_item(&self, item_id: &str, language: &str) -> Result<ItemRecord, IngestError>;
}

/// Builds one triple per non-empty statement whose property passes the
/// filter (an empty filter keeps everything).
///
/// Target items are resolved through `source`; a failed lookup skips that
/// statement with a warning.
pub fn assemble_statements(
    item: &ItemRecord,
    property_filter: &BTreeSet<String>,
    language: &str,
    source: &dyn ItemSource,
) -> Result<Vec<StatementTriple>, IngestError> {
    let designations = item.designations();
    if designations.is_empty() {
        return Ok(Vec::new());
    }
    let mut triples = Vec::new();
    for st in &item.raw_statements {
        if !property_filter.is_empty() && !property_filter.contains(&st.property) {
            continue;
        }
        let target = match &st.value {
            TargetValue::Empty => continue,
            TargetValue::Item(id) => match source.fetch_item(id, language) {
                Ok(rec) => rec.designations(),
                Err(err) => {
                    log::warn!("skipping {} {} -> {}: {err}", item.item_id, st.property, id);
                    continue;
                }
            },
            TargetValue::Time(date) => vec![localize_date(date, language)?],
            TargetValue::Quantity(s) | TargetValue::Text(s) => vec![s.clone()],
        };
        let triple = StatementTriple::new(designations.clone(), &st.property, target);
        if triple.is_valid() {
            triples.push(triple);
        }
    }
    Ok(triples)
}
