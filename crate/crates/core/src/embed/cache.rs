use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::sync::{Mutex, RwLock};

use super::{phrase_key, EmbedError, EmbeddingProvider, EmbeddingStore};
use crate::text::EmbeddingVector;

/// Persistent cache in front of another provider.
///
/// Hits are served from an in-memory [`EmbeddingStore`]; misses are fetched
/// from the inner provider in one call and the whole store is rewritten
/// atomically before the call returns. Fetch-and-persist is single-writer.
pub struct CachedProvider<P> {
    inner: P,
    path: PathBuf,
    store: RwLock<EmbeddingStore>,
    writer: Mutex<()>,
}

impl<P: EmbeddingProvider> CachedProvider<P> {
    /// Opens or creates the store at `path`. An existing store must parse
    /// cleanly and carry the inner provider's identity and dimension.
    pub fn open(inner: P, path: impl AsRef<Path>) -> Result<Self, EmbedError> {
        let path = path.as_ref().to_path_buf();
        let store = if path.exists() {
            let text = std::fs::read_to_string(&path).map_err(|e| EmbedError::Io {
                path: path.display().to_string(),
                message: e.to_string(),
            })?;
            let store = EmbeddingStore::parse_tsv(&text).map_err(|e| EmbedError::StoreCorrupt {
                path: path.display().to_string(),
                message: e.to_string(),
            })?;
            if store.provider_id() != inner.provider_id() || store.dim() != inner.dim() {
                return Err(EmbedError::ProviderMismatch {
                    store: format!("{} (dim {})", store.provider_id(), store.dim()),
                    provider: format!("{} (dim {})", inner.provider_id(), inner.dim()),
                });
            }
            store
        } else {
            EmbeddingStore::new(inner.provider_id(), inner.dim())
        };
        Ok(CachedProvider {
            inner,
            path,
            store: RwLock::new(store),
            writer: Mutex::new(()),
        })
    }

    pub fn inner(&self) -> &P {
        &self.inner
    }

    pub fn cached_len(&self) -> usize {
        self.store.read().expect("store lock").len()
    }

    fn lookup(&self, keys: &[String]) -> Option<Vec<EmbeddingVector>> {
        let store = self.store.read().expect("store lock");
        keys.iter().map(|k| store.get(k).cloned()).collect()
    }
}

impl<P: EmbeddingProvider> EmbeddingProvider for CachedProvider<P> {
    fn provider_id(&self) -> &str {
        self.inner.provider_id()
    }

    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn embed(&self, phrases: &[String]) -> Result<Vec<EmbeddingVector>, EmbedError> {
        let keys = phrases
            .iter()
            .map(|p| phrase_key(p))
            .collect::<Result<Vec<_>, _>>()?;
        if let Some(hit) = self.lookup(&keys) {
            return Ok(hit);
        }
        let _guard = self.writer.lock().expect("writer lock");
        let misses: Vec<String> = {
            let store = self.store.read().expect("store lock");
            keys.iter()
                .filter(|k| !store.contains(k))
                .cloned()
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect()
        };
        if !misses.is_empty() {
            let fetched = self.inner.embed(&misses)?;
            if fetched.len() != misses.len() {
                return Err(EmbedError::Protocol {
                    batch: misses,
                    message: format!("inner provider returned {} vectors", fetched.len()),
                });
            }
            let mut next = self.store.read().expect("store lock").clone();
            for (phrase, vector) in misses.iter().zip(fetched) {
                next.insert(phrase, vector)?;
            }
            next.save_atomic(&self.path)?;
            *self.store.write().expect("store lock") = next;
        }
        Ok(self
            .lookup(&keys)
            .expect("all phrases present after fetching misses"))
    }
}
