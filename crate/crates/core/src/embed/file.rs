use std::path::Path;

use super::{phrase_key, EmbedError, EmbeddingProvider, EmbeddingStore};
use crate::text::EmbeddingVector;

/// Serves vectors from a TSV embedding store loaded once at construction.
#[derive(Debug, Clone)]
pub struct FileProvider {
    store: EmbeddingStore,
}

impl FileProvider {
    pub fn load(path: impl AsRef<Path>) -> Result<Self, EmbedError> {
        Ok(FileProvider {
            store: EmbeddingStore::load(path.as_ref())?,
        })
    }

    pub fn from_store(store: EmbeddingStore) -> Self {
        FileProvider { store }
    }

    pub fn store(&self) -> &EmbeddingStore {
        &self.store
    }
}

impl EmbeddingProvider for FileProvider {
    fn provider_id(&self) -> &str {
        self.store.provider_id()
    }

    fn dim(&self) -> usize {
        self.store.dim()
    }

    fn embed(&self, phrases: &[String]) -> Result<Vec<EmbeddingVector>, EmbedError> {
        phrases
            .iter()
            .map(|p| {
                let key = phrase_key(p)?;
                self.store
                    .get(&key)
                    .cloned()
                    .ok_or(EmbedError::MissingEmbedding(key))
            })
            .collect()
    }
}
