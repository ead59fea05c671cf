use std::path::PathBuf;

use chrono::{DateTime, Utc};
use clap::ValueEnum;
use kbqa_core::endpoint::EndpointConfig;
use kbqa_core::rules::OrdinalOffsetMode;
use kbqa_core::KbName;
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::GlobalArgs;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OrdinalArg {
    ZeroBased,
    PlusOne,
}

impl From<OrdinalArg> for OrdinalOffsetMode {
    fn from(a: OrdinalArg) -> Self {
        match a {
            OrdinalArg::ZeroBased => OrdinalOffsetMode::ZeroBased,
            OrdinalArg::PlusOne => OrdinalOffsetMode::PlusOne,
        }
    }
}

/// Settings read from the JSON file named by [`CONFIG_VAR`]. Flags win over it.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CliConfig {
    pub kb: Option<KbName>,
    pub lexicon: Option<PathBuf>,
    pub store: Option<PathBuf>,
    pub endpoint: Option<EndpointConfig>,
    pub ordinal_offset_mode: OrdinalOffsetMode,
    pub now: Option<DateTime<Utc>>,
    pub format: Format,
}

/// Where queries are executed.
#[derive(Debug, Clone, PartialEq)]
pub enum Backend {
    Store(PathBuf),
    Endpoint(EndpointConfig),
}

#[derive(Debug, Clone)]
pub struct Settings {
    pub kb: KbName,
    pub lexicon: Option<PathBuf>,
    pub backend: Option<Backend>,
    pub ordinal_offset_mode: OrdinalOffsetMode,
    pub now: DateTime<Utc>,
    pub format: Format,
}

pub const CONFIG_VAR: &str = "SYGMA_CONFIG";

impl CliConfig {
    pub fn from_env() -> Result<Self, CliError> {
        match std::env::var_os(CONFIG_VAR) {
            None => Ok(CliConfig::default()),
            Some(path) => {
                let path = PathBuf::from(path);
                let text = crate::read_path(&path)?;
                serde_json::from_str(&text).map_err(|e| CliError::Config {
                    detail: format!("{}: {e}", path.display()),
                })
            }
        }
    }

    /// Applies flags on top of the file. A store or endpoint flag replaces
    /// whichever backend the file selected.
    pub fn resolve(self, flags: &GlobalArgs) -> Result<Settings, CliError> {
        if self.store.is_some() && self.endpoint.is_some() {
            return Err(CliError::Config {
                detail: "config selects both a store and an endpoint".into(),
            });
        }
        let backend = if let Some(p) = &flags.store {
            Some(Backend::Store(p.clone()))
        } else if let Some(url) = &flags.endpoint_url {
            Some(Backend::Endpoint(EndpointConfig {
                url: url.clone(),
                ..self.endpoint.unwrap_or_default()
            }))
        } else if let Some(p) = self.store {
            Some(Backend::Store(p))
        } else {
            self.endpoint.map(Backend::Endpoint)
        };
        Ok(Settings {
            kb: flags.kb.or(self.kb).unwrap_or(KbName::Wikidata),
            lexicon: flags.lexicon.clone().or(self.lexicon),
            backend,
            ordinal_offset_mode: flags.ordinal_mode.map(Into::into).unwrap_or(self.ordinal_offset_mode),
            now: flags.now.or(self.now).unwrap_or_else(Utc::now),
            format: flags.format.unwrap_or(self.format),
        })
    }
}
