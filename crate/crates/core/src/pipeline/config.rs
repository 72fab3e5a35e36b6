use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::PipelineError;
use crate::eval::Averaging;
use crate::graph::KeyMode;
use crate::ingest::{ClientConfig, DEFAULT_PROPERTIES, SUPPORTED_LANGUAGES};
use crate::supervision::{SplitRatios, DEFAULT_FUZZY_THRESHOLD};

fn default_language() -> String {
    "fr".to_string()
}

fn default_properties() -> Vec<String> {
    DEFAULT_PROPERTIES.iter().map(|p| p.to_string()).collect()
}

fn default_fuzzy() -> f64 {
    DEFAULT_FUZZY_THRESHOLD
}

fn default_split() -> [f64; 3] {
    [0.8, 0.1, 0.1]
}

fn default_thresholds() -> Vec<f64> {
    (0..10).map(|i| i as f64 / 10.0).collect()
}

fn default_seed() -> u64 {
    7
}

fn default_snapshot() -> String {
    "default".to_string()
}

fn default_cache() -> PathBuf {
    PathBuf::from("cache")
}

fn default_items() -> PathBuf {
    PathBuf::from("items.txt")
}

fn default_parses() -> PathBuf {
    PathBuf::from("parses.conllu")
}

fn default_work() -> PathBuf {
    PathBuf::from("work")
}

/// Run parameters shared by every pipeline command.
///
/// Relative paths are resolved against the directory of the config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    #[serde(default = "default_language")]
    pub language: String,
    /// Properties kept when assembling statements; empty keeps all.
    #[serde(default = "default_properties")]
    pub properties: Vec<String>,
    #[serde(default = "default_fuzzy")]
    pub fuzzy_threshold: f64,
    #[serde(default)]
    pub semantic_threshold: f64,
    #[serde(default)]
    pub key_mode: KeyMode,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Train, dev and test ratios.
    #[serde(default = "default_split")]
    pub split: [f64; 3],
    /// Thresholds of the evaluation sweep, ascending.
    #[serde(default = "default_thresholds")]
    pub thresholds: Vec<f64>,
    #[serde(default)]
    pub averaging: Averaging,
    /// Names the knowledge-base crawl; part of cache keys and index provenance.
    #[serde(default = "default_snapshot")]
    pub snapshot: String,
    #[serde(default = "default_cache")]
    pub cache_dir: PathBuf,
    /// One item id per line; `#` starts a comment.
    #[serde(default = "default_items")]
    pub items: PathBuf,
    /// Parses of the sentences file, one block per sentence with `# text`.
    #[serde(default = "default_parses")]
    pub parses: PathBuf,
    #[serde(default = "default_work")]
    pub work_dir: PathBuf,
    /// Curated verdicts; when present a reviewed dataset variant is built.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub review: Option<PathBuf>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            language: default_language(),
            properties: default_properties(),
            fuzzy_threshold: default_fuzzy(),
            semantic_threshold: 0.0,
            key_mode: KeyMode::default(),
            seed: default_seed(),
            split: default_split(),
            thresholds: default_thresholds(),
            averaging: Averaging::default(),
            snapshot: default_snapshot(),
            cache_dir: default_cache(),
            items: default_items(),
            parses: default_parses(),
            work_dir: default_work(),
            review: None,
        }
    }
}

impl PipelineConfig {
    pub fn from_toml(text: &str) -> Result<Self, PipelineError> {
        let cfg: PipelineConfig =
            toml::from_str(text).map_err(|e| PipelineError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a config file and resolves its relative paths.
    pub fn load(path: &Path) -> Result<Self, PipelineError> {
        let text = fs::read_to_string(path)
            .map_err(|e| PipelineError::Config(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::from_toml(&text)?;
        let base = path.parent().unwrap_or(Path::new(""));
        cfg.resolve(base);
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn resolve(&mut self, base: &Path) {
        for p in [
            &mut self.cache_dir,
            &mut self.items,
            &mut self.parses,
            &mut self.work_dir,
        ] {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        if let Some(r) = self.review.as_mut().filter(|r| r.is_relative()) {
            *r = base.join(&*r);
        }
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        let bad = |m: String| Err(PipelineError::Config(m));
        if !SUPPORTED_LANGUAGES.contains(&self.language.as_str()) {
            return bad(format!(
                "unsupported language `{}` (supported: {})",
                self.language,
                SUPPORTED_LANGUAGES.join(", ")
            ));
        }
        for (name, t) in [
            ("fuzzy_threshold", self.fuzzy_threshold),
            ("semantic_threshold", self.semantic_threshold),
        ] {
            if !(0.0..=1.0).contains(&t) {
                return bad(format!("{name} must lie in [0, 1], got {t}"));
            }
        }
        if self.fuzzy_threshold == 0.0 {
            return bad("fuzzy_threshold must be positive".into());
        }
        if self.thresholds.iter().any(|t| !(0.0..=1.0).contains(t))
            || self.thresholds.windows(2).any(|w| w[0] > w[1])
        {
            return bad("thresholds must be ascending values in [0, 1]".into());
        }
        self.ratios()
            .map_err(|e| PipelineError::Config(e.to_string()))?;
        Ok(())
    }

    pub fn ratios(&self) -> Result<SplitRatios, crate::supervision::SplitError> {
        SplitRatios::new(self.split[0], self.split[1], self.split[2])
    }

    pub fn client_config(&self) -> ClientConfig {
        ClientConfig {
            cache_dir: self.cache_dir.clone(),
            snapshot: self.snapshot.clone(),
            ..ClientConfig::default()
        }
        .with_env()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_round_trip() {
        let cfg = PipelineConfig::from_toml("").unwrap();
        assert_eq!(cfg, PipelineConfig::default());
        assert_eq!(cfg.fuzzy_threshold, 0.9);
        assert_eq!(cfg.key_mode, KeyMode::Lemma);
        assert_eq!(cfg.thresholds.len(), 10);
        assert_eq!(PipelineConfig::from_toml(&cfg.to_toml()).unwrap(), cfg);
    }

    #[test]
    fn rejects_bad_values() {
        assert!(PipelineConfig::from_toml("semantic_threshold = 1.5").is_err());
        assert!(PipelineConfig::from_toml("split = [0.5, 0.1, 0.1]").is_err());
        assert!(PipelineConfig::from_toml("language = \"tlh\"").is_err());
        assert!(PipelineConfig::from_toml("thresholds = [0.5, 0.1]").is_err());
        assert!(PipelineConfig::from_toml("unknown = 1").is_err());
        assert!(PipelineConfig::from_toml("key_mode = \"surface\"").is_ok());
    }

    #[test]
    fn relative_paths() {
        let mut cfg = PipelineConfig {
            review: Some("review.jsonl".into()),
            ..PipelineConfig::default()
        };
        cfg.resolve(Path::new("/data/run"));
        assert_eq!(cfg.work_dir, Path::new("/data/run/work"));
        assert_eq!(
            cfg.review.as_deref(),
            Some(Path::new("/data/run/review.jsonl"))
        );
    }
}
