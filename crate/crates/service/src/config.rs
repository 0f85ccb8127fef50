use std::fs;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use coronavis_core::analysis::{AnalyticsConfig, LdaSettings, ReportDefaults};
use coronavis_core::mobility::{default_epoch, ingest_case_counts, WeekBins, DEFAULT_WINDOW_DAYS};
use coronavis_core::sentiment::SentimentScorer;
use coronavis_core::textproc::StopwordPolicy;
use coronavis_core::topicmodel::{LdaParams, VocabParams, DEFAULT_LAMBDA, DEFAULT_TOP_TERMS};
use coronavis_core::trends::FeaturedTopicList;
use serde::{Deserialize, Serialize};

/// Environment variables that override the config file.
pub const ENV_PORT: &str = "CORONAVIS_PORT";
pub const ENV_DATA_DIR: &str = "CORONAVIS_DATA_DIR";
pub const ENV_VALENCE_LEXICON: &str = "CORONAVIS_VALENCE_LEXICON";
pub const ENV_SUBJECTIVITY_LEXICON: &str = "CORONAVIS_SUBJECTIVITY_LEXICON";
pub const ENV_FEATURED_TOPICS: &str = "CORONAVIS_FEATURED_TOPICS";

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("reading config {path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("parsing config {path}: {message}")]
    Parse { path: String, message: String },
    #[error("environment variable {name}: {message}")]
    Env { name: &'static str, message: String },
    #[error("loading {what}: {message}")]
    Resource { what: &'static str, message: String },
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LdaConfig {
    pub enabled: bool,
    pub k: usize,
    /// Defaults to `50 / k`.
    pub alpha: Option<f64>,
    pub beta: f64,
    pub iterations: usize,
    pub seed: u64,
    pub min_df: u32,
    pub max_df: f64,
    pub lambda: f64,
    pub top_terms: usize,
}

impl Default for LdaConfig {
    fn default() -> Self {
        let p = LdaParams::default();
        let v = VocabParams::default();
        LdaConfig {
            enabled: true,
            k: p.k,
            alpha: None,
            beta: p.beta,
            iterations: p.iterations,
            seed: p.seed,
            min_df: v.min_df,
            max_df: v.max_df_fraction,
            lambda: DEFAULT_LAMBDA,
            top_terms: DEFAULT_TOP_TERMS,
        }
    }
}

impl LdaConfig {
    pub fn settings(&self) -> Option<LdaSettings> {
        self.enabled.then(|| LdaSettings {
            vocab: VocabParams {
                min_df: self.min_df,
                max_df_fraction: self.max_df,
            },
            params: LdaParams {
                alpha: self.alpha.unwrap_or(50.0 / self.k.max(1) as f64),
                beta: self.beta,
                iterations: self.iterations,
                seed: self.seed,
                ..LdaParams::with_topics(self.k)
            },
            lambda: self.lambda,
            top_terms: self.top_terms,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MobilityConfig {
    pub epoch: NaiveDate,
    pub window_days: i64,
    /// CSV of `state,week_start,cases`.
    pub case_counts: Option<PathBuf>,
}

impl Default for MobilityConfig {
    fn default() -> Self {
        MobilityConfig {
            epoch: default_epoch(),
            window_days: DEFAULT_WINDOW_DAYS,
            case_counts: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ServiceConfig {
    pub host: String,
    pub port: u16,
    pub data_dir: PathBuf,
    pub valence_lexicon: Option<PathBuf>,
    pub subjectivity_lexicon: Option<PathBuf>,
    pub featured_topics: Option<PathBuf>,
    pub stopwords: Option<PathBuf>,
    pub domain_stopwords: Option<PathBuf>,
    pub extra_stopwords: Option<PathBuf>,
    /// Allowed CORS origins; `["*"]` allows any.
    pub cors_origins: Vec<String>,
    /// Directory of built dashboard assets served at `/`.
    pub static_dir: Option<PathBuf>,
    /// Fixed reference date for "today"; defaults to the snapshot's newest day.
    pub clock: Option<NaiveDate>,
    pub report: ReportDefaults,
    pub lda: LdaConfig,
    pub mobility: MobilityConfig,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            host: "127.0.0.1".into(),
            port: 8080,
            data_dir: PathBuf::from("data"),
            valence_lexicon: None,
            subjectivity_lexicon: None,
            featured_topics: None,
            stopwords: None,
            domain_stopwords: None,
            extra_stopwords: None,
            cors_origins: vec!["http://localhost:5173".into()],
            static_dir: None,
            clock: None,
            report: ReportDefaults::default(),
            lda: LdaConfig::default(),
            mobility: MobilityConfig::default(),
        }
    }
}

impl ServiceConfig {
    /// Reads the optional TOML file, then applies environment overrides
    /// looked up through `env`. Relative paths in the file resolve against
    /// the file's directory.
    pub fn load(path: Option<&Path>, env: impl Fn(&str) -> Option<String>) -> Result<Self, ConfigError> {
        let mut config = match path {
            None => ServiceConfig::default(),
            Some(p) => {
                let text = fs::read_to_string(p).map_err(|source| ConfigError::Read {
                    path: p.display().to_string(),
                    source,
                })?;
                let mut c: ServiceConfig = toml::from_str(&text).map_err(|e| ConfigError::Parse {
                    path: p.display().to_string(),
                    message: e.to_string(),
                })?;
                if let Some(base) = p.parent() {
                    c.resolve_paths(base);
                }
                c
            }
        };
        config.apply_env(env)?;
        config.validate()?;
        Ok(config)
    }

    fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut self.data_dir);
        for p in [
            &mut self.valence_lexicon,
            &mut self.subjectivity_lexicon,
            &mut self.featured_topics,
            &mut self.stopwords,
            &mut self.domain_stopwords,
            &mut self.extra_stopwords,
            &mut self.static_dir,
            &mut self.mobility.case_counts,
        ]
        .into_iter()
        .flatten()
        {
            fix(p);
        }
    }

    fn apply_env(&mut self, env: impl Fn(&str) -> Option<String>) -> Result<(), ConfigError> {
        if let Some(port) = env(ENV_PORT) {
            self.port = port.parse().map_err(|_| ConfigError::Env {
                name: ENV_PORT,
                message: format!("`{port}` is not a port number"),
            })?;
        }
        if let Some(dir) = env(ENV_DATA_DIR) {
            self.data_dir = dir.into();
        }
        if let Some(p) = env(ENV_VALENCE_LEXICON) {
            self.valence_lexicon = Some(p.into());
        }
        if let Some(p) = env(ENV_SUBJECTIVITY_LEXICON) {
            self.subjectivity_lexicon = Some(p.into());
        }
        if let Some(p) = env(ENV_FEATURED_TOPICS) {
            self.featured_topics = Some(p.into());
        }
        Ok(())
    }

    fn validate(&self) -> Result<(), ConfigError> {
        if self.lda.enabled {
            if self.lda.k == 0 || self.lda.iterations == 0 {
                return Err(ConfigError::Invalid("lda.k and lda.iterations must be at least 1".into()));
            }
            if !(0.0..=1.0).contains(&self.lda.lambda) {
                return Err(ConfigError::Invalid("lda.lambda must be in [0, 1]".into()));
            }
        }
        if self.mobility.window_days <= 0 {
            return Err(ConfigError::Invalid("mobility.window_days must be positive".into()));
        }
        Ok(())
    }

    /// Loads lexicons, word lists and case counts named by the config.
    pub fn analytics_config(&self) -> Result<AnalyticsConfig, ConfigError> {
        let resource = |what: &'static str| move |e: &dyn std::fmt::Display| ConfigError::Resource {
            what,
            message: e.to_string(),
        };
        let scorer = SentimentScorer::from_paths(self.valence_lexicon.as_deref(), self.subjectivity_lexicon.as_deref())
            .map_err(|e| resource("lexicons")(&e))?;
        let featured = match &self.featured_topics {
            Some(p) => FeaturedTopicList::from_file(p).map_err(|e| resource("featured topics")(&e))?,
            None => FeaturedTopicList::bundled(),
        };
        let policy = StopwordPolicy::from_files(
            self.stopwords.as_deref(),
            self.domain_stopwords.as_deref(),
            self.extra_stopwords.as_deref(),
        )
        .map_err(|e| resource("stopwords")(&e))?;
        let infections = match &self.mobility.case_counts {
            None => None,
            Some(p) => {
                let f = fs::File::open(p).map_err(|e| resource("case counts")(&e))?;
                Some(ingest_case_counts(f, WeekBins::new(self.mobility.epoch, 0)).map_err(|e| resource("case counts")(&e))?)
            }
        };
        Ok(AnalyticsConfig {
            policy,
            featured,
            scorer,
            mobility_epoch: self.mobility.epoch,
            mobility_window_days: self.mobility.window_days,
            infections,
            lda: self.lda.settings(),
            defaults: self.report.clone(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn env_overrides_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("coronavis.toml");
        fs::write(&path, "port = 9000\ndata_dir = \"corpus\"\n[lda]\nk = 5\n").unwrap();
        let c = ServiceConfig::load(Some(&path), |_| None).unwrap();
        assert_eq!(c.port, 9000);
        assert_eq!(c.data_dir, dir.path().join("corpus"));
        assert_eq!(c.lda.k, 5);
        assert!((c.lda.settings().unwrap().params.alpha - 10.0).abs() < 1e-12);

        let c = ServiceConfig::load(Some(&path), |k| (k == ENV_PORT).then(|| "7000".to_string())).unwrap();
        assert_eq!(c.port, 7000);
        assert!(ServiceConfig::load(Some(&path), |k| (k == ENV_PORT).then(|| "x".to_string())).is_err());
    }

    #[test]
    fn rejects_unknown_keys() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.toml");
        fs::write(&path, "prot = 1\n").unwrap();
        assert!(matches!(ServiceConfig::load(Some(&path), |_| None), Err(ConfigError::Parse { .. })));
    }
}
