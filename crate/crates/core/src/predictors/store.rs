//! Directory of trained native backends: one `<id>.lm` count dump per
//! backend plus `manifest.txt` listing ids in canonical order.

use std::fs;
use std::path::Path;
use std::sync::Arc;

use super::{
    standard_backends, training_sequences, Backend, BackendRegistry, ModelError, NGramModel,
};
use crate::corpus::SentencePair;

pub const MANIFEST_FILE: &str = "manifest.txt";

/// Trains the four standard stand-ins on `pairs`, in canonical order.
pub fn train_standard_backends(
    pairs: &[SentencePair],
) -> Result<Vec<(String, NGramModel)>, ModelError> {
    standard_backends()
        .into_iter()
        .map(|spec| {
            let corpus = training_sequences(pairs, spec.config.context_mode);
            NGramModel::train(&corpus, &spec.config).map(|m| (spec.id.to_string(), m))
        })
        .collect()
}

pub fn registry_from_models(
    models: Vec<(String, NGramModel)>,
) -> Result<BackendRegistry, ModelError> {
    BackendRegistry::new(
        models
            .into_iter()
            .map(|(id, m)| Backend::new(id, Arc::new(m)))
            .collect(),
    )
}

pub fn save_model_dir(dir: &Path, models: &[(String, NGramModel)]) -> Result<(), ModelError> {
    fs::create_dir_all(dir)?;
    let mut manifest = String::new();
    for (id, model) in models {
        let file = format!("{id}.lm");
        model.save(&dir.join(&file))?;
        manifest.push_str(&format!("{id}\t{file}\n"));
    }
    fs::write(dir.join(MANIFEST_FILE), manifest)?;
    Ok(())
}

pub fn load_model_dir(dir: &Path) -> Result<Vec<(String, NGramModel)>, ModelError> {
    let manifest = fs::read_to_string(dir.join(MANIFEST_FILE))?;
    manifest
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(n, line)| {
            let (id, file) = line.split_once('\t').ok_or_else(|| ModelError::Parse {
                line: n + 1,
                reason: "manifest lines are `id<TAB>file`".into(),
            })?;
            Ok((id.to_string(), NGramModel::load(&dir.join(file))?))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn directory_round_trip() {
        let pairs = vec![
            SentencePair::new("1", "t", "Glucose levels fall.", "Sugar goes down.").unwrap(),
            SentencePair::new("2", "t", "Insulin is secreted.", "The body makes insulin.").unwrap(),
        ];
        let models = train_standard_backends(&pairs).unwrap();
        let dir = tempfile::tempdir().unwrap();
        save_model_dir(dir.path(), &models).unwrap();
        let back = load_model_dir(dir.path()).unwrap();
        assert_eq!(models, back);
        let reg = registry_from_models(back).unwrap();
        assert_eq!(reg.ids(), vec!["tri-ctx", "tri-plain", "bi-ctx", "uni-ctx"]);
    }
}
