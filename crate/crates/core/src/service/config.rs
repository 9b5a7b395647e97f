use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::ServiceError;
use crate::ensemble::{EnsembleConfig, SelectorModel, Workbench};
use crate::predictors::{
    load_model_dir, registry_from_models, Backend, BackendRegistry, NGramModel, RemoteBackend,
};

/// One backend entry: a local count dump or a remote endpoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BackendConfig {
    pub id: String,
    #[serde(default)]
    pub model: Option<PathBuf>,
    #[serde(default)]
    pub endpoint: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ServiceConfig {
    pub bind: String,
    /// Directory written by `train-lm`; used when `backends` is empty.
    pub model_dir: Option<PathBuf>,
    pub backends: Vec<BackendConfig>,
    pub selector_4cc: Option<PathBuf>,
    pub selector_multilabel: Option<PathBuf>,
    pub seed: u64,
    pub remote_timeout_ms: u64,
    pub event_log: Option<PathBuf>,
    pub ensemble: EnsembleConfig,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            bind: "127.0.0.1:8080".into(),
            model_dir: None,
            backends: Vec::new(),
            selector_4cc: None,
            selector_multilabel: None,
            seed: 0,
            remote_timeout_ms: 2000,
            event_log: None,
            ensemble: EnsembleConfig::default(),
        }
    }
}

impl ServiceConfig {
    pub fn from_toml(text: &str) -> Result<Self, ServiceError> {
        toml::from_str(text).map_err(|e| ServiceError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, ServiceError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ServiceError::Config(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::from_toml(&text)?;
        // relative paths in a config file are relative to the file
        if let Some(base) = path.parent() {
            cfg.resolve_paths(base);
        }
        Ok(cfg)
    }

    fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut Option<PathBuf>| {
            if let Some(path) = p {
                if path.is_relative() {
                    *path = base.join(&*path);
                }
            }
        };
        fix(&mut self.model_dir);
        fix(&mut self.selector_4cc);
        fix(&mut self.selector_multilabel);
        fix(&mut self.event_log);
        for b in &mut self.backends {
            fix(&mut b.model);
        }
    }

    /// Applies `AUTOSIMP_*` overrides from `vars`.
    pub fn apply_env<I, K, V>(&mut self, vars: I) -> Result<(), ServiceError>
    where
        I: IntoIterator<Item = (K, V)>,
        K: AsRef<str>,
        V: AsRef<str>,
    {
        for (key, value) in vars {
            let value = value.as_ref();
            let bad = |what: &str| ServiceError::Config(format!("{what}: cannot parse {value:?}"));
            match key.as_ref() {
                "AUTOSIMP_BIND" => self.bind = value.to_string(),
                "AUTOSIMP_MODEL_DIR" => self.model_dir = Some(value.into()),
                "AUTOSIMP_SELECTOR_4CC" => self.selector_4cc = Some(value.into()),
                "AUTOSIMP_SELECTOR_MULTILABEL" => self.selector_multilabel = Some(value.into()),
                "AUTOSIMP_EVENT_LOG" => self.event_log = Some(value.into()),
                "AUTOSIMP_SEED" => self.seed = value.parse().map_err(|_| bad("AUTOSIMP_SEED"))?,
                "AUTOSIMP_REMOTE_TIMEOUT_MS" => {
                    self.remote_timeout_ms = value
                        .parse()
                        .map_err(|_| bad("AUTOSIMP_REMOTE_TIMEOUT_MS"))?
                }
                _ => {}
            }
        }
        Ok(())
    }

    pub fn remote_timeout(&self) -> Duration {
        Duration::from_millis(self.remote_timeout_ms)
    }

    fn registry(&self) -> Result<BackendRegistry, ServiceError> {
        if self.backends.is_empty() {
            let dir = self
                .model_dir
                .as_ref()
                .ok_or_else(|| ServiceError::Config("set model_dir or list backends".into()))?;
            return Ok(registry_from_models(load_model_dir(dir)?)?);
        }
        let mut backends = Vec::with_capacity(self.backends.len());
        for b in &self.backends {
            let backend = match (&b.model, &b.endpoint) {
                (Some(path), None) => Backend::new(&b.id, Arc::new(NGramModel::load(path)?)),
                (None, Some(url)) => Backend::new(
                    &b.id,
                    Arc::new(RemoteBackend::new(url, self.remote_timeout())),
                ),
                _ => {
                    return Err(ServiceError::Config(format!(
                        "backend {:?} needs exactly one of `model` or `endpoint`",
                        b.id
                    )))
                }
            };
            backends.push(backend);
        }
        Ok(BackendRegistry::new(backends)?)
    }

    /// Loads backends and selectors. The ensemble seed is taken from `seed`.
    pub fn build_workbench(&self) -> Result<Workbench, ServiceError> {
        let mut ensemble = self.ensemble.clone();
        ensemble.rng_seed = self.seed;
        let mut wb = Workbench::new(self.registry()?, ensemble)?;
        for path in [&self.selector_4cc, &self.selector_multilabel]
            .into_iter()
            .flatten()
        {
            wb = wb.with_selector(SelectorModel::load(path)?)?;
        }
        Ok(wb)
    }
}
