//! Embedding providers for variable phrases.
//!
//! Every provider maps an ordered list of phrases to an equal-length list of
//! [`EmbeddingVector`]s sharing one dimension. Phrases are keyed by their
//! canonical form, so `"Population"` and `" population"` share a vector.
//! Vectors are never normalized here; callers get raw model output.

mod cache;
mod deterministic;
mod file;
mod http;
mod store;

use std::str::FromStr;
use std::sync::Arc;

pub use cache::CachedProvider;
pub use deterministic::DeterministicProvider;
pub use file::FileProvider;
pub use http::{HttpProvider, DEFAULT_BATCH_SIZE};
pub use store::EmbeddingStore;

use crate::graph::canonical_name;
use crate::text::EmbeddingVector;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EmbedError {
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: expected {expected} values, found {found}")]
    InconsistentDimension {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("no embedding for phrase {0:?}")]
    MissingEmbedding(String),
    #[error("invalid phrase {0:?}")]
    InvalidPhrase(String),
    #[error("batch {batch:?}: transport failure: {message}")]
    Transport { batch: Vec<String>, message: String },
    #[error("batch {batch:?}: protocol violation: {message}")]
    Protocol { batch: Vec<String>, message: String },
    #[error("batch {batch:?}: server returned status {status}: {message}")]
    Status {
        batch: Vec<String>,
        status: u16,
        message: String,
    },
    #[error("embedding store {path} is corrupt: {message}")]
    StoreCorrupt { path: String, message: String },
    #[error("embedding store was written by {store:?} but the provider is {provider:?}")]
    ProviderMismatch { store: String, provider: String },
    #[error("invalid embedding source: {0}")]
    InvalidSource(String),
}

/// Source of phrase embeddings.
///
/// Implementations must be deterministic for a fixed [`provider_id`]
/// (same phrase, same vector) and preserve input order.
///
/// [`provider_id`]: EmbeddingProvider::provider_id
pub trait EmbeddingProvider: Send + Sync {
    fn provider_id(&self) -> &str;

    fn dim(&self) -> usize;

    fn embed(&self, phrases: &[String]) -> Result<Vec<EmbeddingVector>, EmbedError>;
}

impl<P: EmbeddingProvider + ?Sized> EmbeddingProvider for Arc<P> {
    fn provider_id(&self) -> &str {
        (**self).provider_id()
    }

    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn embed(&self, phrases: &[String]) -> Result<Vec<EmbeddingVector>, EmbedError> {
        (**self).embed(phrases)
    }
}

impl<P: EmbeddingProvider + ?Sized> EmbeddingProvider for Box<P> {
    fn provider_id(&self) -> &str {
        (**self).provider_id()
    }

    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn embed(&self, phrases: &[String]) -> Result<Vec<EmbeddingVector>, EmbedError> {
        (**self).embed(phrases)
    }
}

pub(crate) fn phrase_key(phrase: &str) -> Result<String, EmbedError> {
    canonical_name(phrase).map_err(|_| EmbedError::InvalidPhrase(phrase.to_owned()))
}

/// Parsed form of an embedding-source flag:
/// `file:<path>`, `http:<url>` or `det:seed=<s>,dim=<d>`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EmbedSource {
    File(String),
    Http(String),
    Deterministic { seed: u64, dim: usize },
}

impl FromStr for EmbedSource {
    type Err = EmbedError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = |why: &str| EmbedError::InvalidSource(format!("{s:?}: {why}"));
        let (kind, rest) = s
            .split_once(':')
            .ok_or_else(|| bad("expected file:, http: or det:"))?;
        match kind {
            "file" if !rest.is_empty() => Ok(EmbedSource::File(rest.to_owned())),
            // `http:http://host/` and `http://host/` are both accepted
            "http" | "https" => {
                let url = if rest.starts_with("//") {
                    s.to_owned()
                } else {
                    rest.to_owned()
                };
                Ok(EmbedSource::Http(url))
            }
            "det" => {
                let (mut seed, mut dim) = (None, None);
                for part in rest.split(',') {
                    let (k, v) = part.split_once('=').ok_or_else(|| bad("expected key=value"))?;
                    match k.trim() {
                        "seed" => seed = Some(v.trim().parse().map_err(|_| bad("bad seed"))?),
                        "dim" => dim = Some(v.trim().parse().map_err(|_| bad("bad dim"))?),
                        _ => return Err(bad("unknown det parameter")),
                    }
                }
                Ok(EmbedSource::Deterministic {
                    seed: seed.ok_or_else(|| bad("missing seed"))?,
                    dim: dim.ok_or_else(|| bad("missing dim"))?,
                })
            }
            _ => Err(bad("expected file:, http: or det:")),
        }
    }
}

impl EmbedSource {
    /// Instantiates the provider, optionally layered under a persistent cache.
    pub fn open(
        &self,
        cache: Option<&std::path::Path>,
    ) -> Result<Arc<dyn EmbeddingProvider>, EmbedError> {
        let inner: Arc<dyn EmbeddingProvider> = match self {
            EmbedSource::File(path) => Arc::new(FileProvider::load(path)?),
            EmbedSource::Http(url) => Arc::new(HttpProvider::connect(url)?),
            EmbedSource::Deterministic { seed, dim } => {
                Arc::new(DeterministicProvider::new(*seed, *dim)?)
            }
        };
        match cache {
            Some(path) => Ok(Arc::new(CachedProvider::open(inner, path)?)),
            None => Ok(inner),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_sources() {
        assert_eq!(
            "det:seed=7,dim=32".parse::<EmbedSource>().unwrap(),
            EmbedSource::Deterministic { seed: 7, dim: 32 }
        );
        assert_eq!(
            "file:emb.tsv".parse::<EmbedSource>().unwrap(),
            EmbedSource::File("emb.tsv".into())
        );
        assert_eq!(
            "http:http://localhost:8080".parse::<EmbedSource>().unwrap(),
            EmbedSource::Http("http://localhost:8080".into())
        );
        assert_eq!(
            "http://localhost:8080".parse::<EmbedSource>().unwrap(),
            EmbedSource::Http("http://localhost:8080".into())
        );
        assert!("det:seed=7".parse::<EmbedSource>().is_err());
        assert!("bert".parse::<EmbedSource>().is_err());
        assert!("det:seed=x,dim=3".parse::<EmbedSource>().is_err());
    }
}
