//! Knowledge-base and encyclopedia client with an on-disk cache.
//!
//! Every payload is stored under
//! `<cache>/<snapshot>/wikidata/<lang>/<id>.json` or
//! `<cache>/<snapshot>/wikipedia/<lang>/<title>.html` and served from there
//! on later runs, so a warm cache replays a crawl without network access.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use serde_json::Value;

use super::{IngestError, ItemRecord, ItemSource, KbDate, RawStatement, TargetValue};

pub const ENV_CACHE_DIR: &str = "RELPAT_CACHE_DIR";
pub const ENV_API_URL: &str = "RELPAT_WIKIDATA_API";
pub const ENV_PAGE_URL: &str = "RELPAT_PAGE_URL";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransportError {
    pub message: String,
    pub retryable: bool,
}

/// Fetches a URL body as text.
pub trait Transport: Send + Sync {
    fn get(&self, url: &str) -> Result<String, TransportError>;
}

/// Refuses every request; used to run strictly from a warm cache.
#[derive(Debug, Default, Clone, Copy)]
pub struct OfflineTransport;

impl Transport for OfflineTransport {
    fn get(&self, url: &str) -> Result<String, TransportError> {
        Err(TransportError {
            message: format!("offline mode: {url} is not cached"),
            retryable: false,
        })
    }
}

#[cfg(feature = "http")]
pub struct HttpTransport {
    client: reqwest::blocking::Client,
}

#[cfg(feature = "http")]
impl HttpTransport {
    pub fn new(user_agent: &str) -> Result<Self, TransportError> {
        let client = reqwest::blocking::Client::builder()
            .user_agent(user_agent)
            .timeout(Duration::from_secs(30))
            .build()
            .map_err(|e| TransportError {
                message: e.to_string(),
                retryable: false,
            })?;
        Ok(HttpTransport { client })
    }
}

#[cfg(feature = "http")]
impl Transport for HttpTransport {
    fn get(&self, url: &str) -> Result<String, TransportError> {
        let resp = self.client.get(url).send().map_err(|e| TransportError {
            message: e.to_string(),
            retryable: true,
        })?;
        let status = resp.status();
        if !status.is_success() {
            return Err(TransportError {
                message: format!("HTTP {status}"),
                retryable: status.is_server_error() || status.as_u16() == 429,
            });
        }
        resp.text().map_err(|e| TransportError {
            message: e.to_string(),
            retryable: true,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClientConfig {
    pub cache_dir: PathBuf,
    /// Names the crawl; part of every cache key.
    pub snapshot: String,
    pub api_url: String,
    /// `{lang}` and `{title}` are substituted.
    pub page_url: String,
    pub min_interval: Duration,
}

impl Default for ClientConfig {
    fn default() -> Self {
        ClientConfig {
            cache_dir: PathBuf::from("cache"),
            snapshot: "default".to_string(),
            api_url: "https://www.wikidata.org/w/api.php".to_string(),
            page_url: "https://{lang}.wikipedia.org/api/rest_v1/page/html/{title}".to_string(),
            min_interval: Duration::from_millis(200),
        }
    }
}

impl ClientConfig {
    /// Applies `RELPAT_CACHE_DIR`, `RELPAT_WIKIDATA_API` and `RELPAT_PAGE_URL`
    /// on top of `self`.
    pub fn with_env(mut self) -> Self {
        if let Ok(v) = std::env::var(ENV_CACHE_DIR) {
            self.cache_dir = PathBuf::from(v);
        }
        if let Ok(v) = std::env::var(ENV_API_URL) {
            self.api_url = v;
        }
        if let Ok(v) = std::env::var(ENV_PAGE_URL) {
            self.page_url = v;
        }
        self
    }
}

pub struct KnowledgeBaseClient {
    config: ClientConfig,
    transport: Box<dyn Transport>,
    last_request: Mutex<Option<Instant>>,
    write_lock: Mutex<()>,
}

fn valid_item_id(id: &str) -> bool {
    id.len() > 1
        && id.starts_with('Q')
        && !id[1..].starts_with('0')
        && id[1..].bytes().all(|b| b.is_ascii_digit())
}

fn encode(s: &str) -> String {
    url::form_urlencoded::byte_serialize(s.as_bytes()).collect()
}

fn cache_file_name(title: &str) -> String {
    title
        .chars()
        .map(|c| match c {
            '/' | '\\' | ':' | '*' | '?' | '"' | '<' | '>' | '|' => '_',
            ' ' => '_',
            c => c,
        })
        .collect()
}

impl KnowledgeBaseClient {
    pub fn new(config: ClientConfig, transport: Box<dyn Transport>) -> Self {
        KnowledgeBaseClient {
            config,
            transport,
            last_request: Mutex::new(None),
            write_lock: Mutex::new(()),
        }
    }

    /// A client that only reads the cache.
    pub fn offline(config: ClientConfig) -> Self {
        Self::new(config, Box::new(OfflineTransport))
    }

    pub fn config(&self) -> &ClientConfig {
        &self.config
    }

    fn snapshot_dir(&self) -> PathBuf {
        self.config.cache_dir.join(&self.config.snapshot)
    }

    pub fn item_cache_path(&self, item_id: &str, language: &str) -> PathBuf {
        self.snapshot_dir()
            .join("wikidata")
            .join(language)
            .join(format!("{item_id}.json"))
    }

    pub fn page_cache_path(&self, title: &str, language: &str) -> PathBuf {
        self.snapshot_dir()
            .join("wikipedia")
            .join(language)
            .join(format!("{}.html", cache_file_name(title)))
    }

    fn throttle(&self) {
        let mut last = self.last_request.lock().unwrap_or_else(|e| e.into_inner());
        if let Some(t) = *last {
            let elapsed = t.elapsed();
            if elapsed < self.config.min_interval {
                std::thread::sleep(self.config.min_interval - elapsed);
            }
        }
        *last = Some(Instant::now());
    }

    fn cached_get(&self, path: &Path, url: &str) -> Result<String, IngestError> {
        let cache_err = |source| IngestError::Cache {
            path: path.display().to_string(),
            source,
        };
        if path.exists() {
            return fs::read_to_string(path).map_err(cache_err);
        }
        self.throttle();
        let body = self
            .transport
            .get(url)
            .map_err(|e| IngestError::Transport {
                url: url.to_string(),
                message: e.message,
                retryable: e.retryable,
            })?;
        let _guard = self.write_lock.lock().unwrap_or_else(|e| e.into_inner());
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir).map_err(cache_err)?;
        }
        let tmp = path.with_extension("part");
        let mut f = fs::File::create(&tmp).map_err(cache_err)?;
        f.write_all(body.as_bytes()).map_err(cache_err)?;
        drop(f);
        fs::rename(&tmp, path).map_err(cache_err)?;
        Ok(body)
    }

    pub fn item_url(&self, item_id: &str, language: &str) -> String {
        format!(
            "{}?action=wbgetentities&format=json&ids={}&languages={}&props={}",
            self.config.api_url,
            encode(item_id),
            encode(language),
            encode("labels|descriptions|aliases|claims|sitelinks")
        )
    }

    pub fn page_url(&self, title: &str, language: &str) -> String {
        self.config
            .page_url
            .replace("{lang}", &encode(language))
            .replace("{title}", &encode(&title.replace(' ', "_")))
    }

    /// Raw HTML of the encyclopedia page titled `title`.
    pub fn fetch_page_html(&self, title: &str, language: &str) -> Result<String, IngestError> {
        let path = self.page_cache_path(title, language);
        let url = self.page_url(title, language);
        self.cached_get(&path, &url)
    }

    /// Up to `limit` item ids linking to `type_id` (e.g. `Q5`), in the order
    /// the service lists them.
    pub fn enumerate_items_by_type(
        &self,
        type_id: &str,
        limit: usize,
    ) -> Result<Vec<String>, IngestError> {
        if !valid_item_id(type_id) {
            return Err(IngestError::NotFound(type_id.to_string()));
        }
        let path = self
            .snapshot_dir()
            .join("wikidata")
            .join("backlinks")
            .join(format!("{type_id}-{limit}.json"));
        let url = format!(
            "{}?action=query&format=json&list=backlinks&blnamespace=0&bllimit={}&bltitle={}",
            self.config.api_url,
            limit.min(500),
            encode(type_id)
        );
        let body = self.cached_get(&path, &url)?;
        let payload_err = |message: String| IngestError::Payload {
            id: type_id.to_string(),
            message,
        };
        let v: Value = serde_json::from_str(&body).map_err(|e| payload_err(e.to_string()))?;
        let links = v["query"]["backlinks"]
            .as_array()
            .ok_or_else(|| payload_err("missing query.backlinks".into()))?;
        Ok(links
            .iter()
            .filter_map(|l| l["title"].as_str())
            .filter(|t| valid_item_id(t))
            .take(limit)
            .map(str::to_string)
            .collect())
    }
}

impl ItemSource for KnowledgeBaseClient {
    fn fetch_item(&self, item_id: &str, language: &str) -> Result<ItemRecord, IngestError> {
        if !valid_item_id(item_id) {
            return Err(IngestError::NotFound(item_id.to_string()));
        }
        let path = self.item_cache_path(item_id, language);
        let url = self.item_url(item_id, language);
        let body = self.cached_get(&path, &url)?;
        parse_entity_json(item_id, &body, language)
    }
}

fn text_in<'a>(v: &'a Value, language: &str) -> Option<&'a str> {
    v.get(language)?.get("value")?.as_str()
}

fn parse_snak(snak: &Value) -> TargetValue {
    if snak["snaktype"].as_str() != Some("value") {
        return TargetValue::Empty;
    }
    let dv = &snak["datavalue"];
    let value = &dv["value"];
    match dv["type"].as_str() {
        Some("wikibase-entityid") => value["id"]
            .as_str()
            .map(str::to_string)
            .or_else(|| value["numeric-id"].as_u64().map(|n| format!("Q{n}")))
            .map(TargetValue::Item)
            .unwrap_or(TargetValue::Empty),
        Some("time") => value["time"]
            .as_str()
            .and_then(|t| KbDate::from_timestamp(t, value["precision"].as_u64().unwrap_or(9)))
            .map(TargetValue::Time)
            .unwrap_or(TargetValue::Empty),
        Some("quantity") => value["amount"]
            .as_str()
            .map(|a| TargetValue::Quantity(a.trim_start_matches('+').to_string()))
            .unwrap_or(TargetValue::Empty),
        Some("string") => value
            .as_str()
            .map(|s| TargetValue::Text(s.to_string()))
            .unwrap_or(TargetValue::Empty),
        Some("monolingualtext") => value["text"]
            .as_str()
            .map(|s| TargetValue::Text(s.to_string()))
            .unwrap_or(TargetValue::Empty),
        _ => TargetValue::Empty,
    }
}

/// Builds an [`ItemRecord`] from a `wbgetentities` response (or a bare
/// entity object).
pub fn parse_entity_json(
    item_id: &str,
    body: &str,
    language: &str,
) -> Result<ItemRecord, IngestError> {
    let payload_err = |message: &str| IngestError::Payload {
        id: item_id.to_string(),
        message: message.to_string(),
    };
    let root: Value = serde_json::from_str(body).map_err(|e| payload_err(&e.to_string()))?;
    if root.get("error").is_some() {
        return Err(IngestError::NotFound(item_id.to_string()));
    }
    let entity = match root.get("entities") {
        Some(entities) => entities
            .get(item_id)
            .ok_or_else(|| IngestError::NotFound(item_id.to_string()))?,
        None => &root,
    };
    if entity.get("missing").is_some() {
        return Err(IngestError::NotFound(item_id.to_string()));
    }
    if !entity.is_object() {
        return Err(payload_err("entity is not an object"));
    }

    let label = text_in(&entity["labels"], language)
        .unwrap_or_default()
        .to_string();
    let description = text_in(&entity["descriptions"], language)
        .unwrap_or_default()
        .to_string();
    let aliases = entity["aliases"][language]
        .as_array()
        .map(|a| {
            a.iter()
                .filter_map(|x| x["value"].as_str().map(str::to_string))
                .collect()
        })
        .unwrap_or_default();
    let sitelink = entity["sitelinks"][format!("{language}wiki")]["title"]
        .as_str()
        .map(str::to_string);

    let mut raw_statements = Vec::new();
    if let Some(claims) = entity["claims"].as_object() {
        for (property, list) in claims {
            for claim in list.as_array().into_iter().flatten() {
                if claim["rank"].as_str() == Some("deprecated") {
                    continue;
                }
                raw_statements.push(RawStatement {
                    property: property.clone(),
                    value: parse_snak(&claim["mainsnak"]),
                });
            }
        }
    }

    Ok(ItemRecord {
        item_id: item_id.to_string(),
        incomplete: label.is_empty(),
        label,
        description,
        aliases,
        sitelink,
        raw_statements,
    })
}
