use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use super::{phrase_key, EmbedError};
use crate::text::EmbeddingVector;

/// Phrase → vector map with one shared dimension, serialized as TSV:
///
/// ```text
/// #dim=3<TAB>#provider=my-model
/// population<TAB>0.1<TAB>0.2<TAB>0.3
/// ```
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingStore {
    provider_id: String,
    dim: usize,
    entries: BTreeMap<String, EmbeddingVector>,
}

impl EmbeddingStore {
    pub fn new(provider_id: &str, dim: usize) -> Self {
        EmbeddingStore {
            provider_id: provider_id.to_owned(),
            dim,
            entries: BTreeMap::new(),
        }
    }

    pub fn provider_id(&self) -> &str {
        &self.provider_id
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, phrase: &str) -> Option<&EmbeddingVector> {
        self.entries.get(phrase)
    }

    pub fn contains(&self, phrase: &str) -> bool {
        self.entries.contains_key(phrase)
    }

    pub fn phrases(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    /// Inserts under the canonical form of `phrase`.
    pub fn insert(&mut self, phrase: &str, vector: EmbeddingVector) -> Result<(), EmbedError> {
        if vector.dim() != self.dim {
            return Err(EmbedError::InconsistentDimension {
                line: 0,
                expected: self.dim,
                found: vector.dim(),
            });
        }
        self.entries.insert(phrase_key(phrase)?, vector);
        Ok(())
    }

    pub fn parse_tsv(text: &str) -> Result<Self, EmbedError> {
        let mut lines = text.lines().enumerate();
        let header = lines.next().map(|(_, l)| l).unwrap_or("");
        let mut dim = None;
        let mut provider = None;
        for field in header.split('\t') {
            if let Some(d) = field.strip_prefix("#dim=") {
                dim = d.trim().parse::<usize>().ok().filter(|&d| d > 0);
            } else if let Some(p) = field.strip_prefix("#provider=") {
                provider = Some(p.to_owned());
            }
        }
        let (Some(dim), Some(provider)) = (dim, provider) else {
            return Err(EmbedError::Parse {
                line: 1,
                message: "expected header `#dim=<d>\\t#provider=<id>`".into(),
            });
        };
        let mut store = EmbeddingStore::new(&provider, dim);
        for (i, line) in lines {
            let line_no = i + 1;
            if line.trim().is_empty() {
                continue;
            }
            let mut fields = line.split('\t');
            let phrase = fields.next().unwrap_or_default();
            let values = fields
                .map(|f| f.trim().parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| EmbedError::Parse {
                    line: line_no,
                    message: e.to_string(),
                })?;
            if values.len() != dim {
                return Err(EmbedError::InconsistentDimension {
                    line: line_no,
                    expected: dim,
                    found: values.len(),
                });
            }
            let key = phrase_key(phrase).map_err(|_| EmbedError::Parse {
                line: line_no,
                message: format!("invalid phrase {phrase:?}"),
            })?;
            if store.entries.contains_key(&key) {
                return Err(EmbedError::Parse {
                    line: line_no,
                    message: format!("duplicate phrase {key:?}"),
                });
            }
            let vector = EmbeddingVector::new(values).map_err(|e| EmbedError::Parse {
                line: line_no,
                message: e.to_string(),
            })?;
            store.entries.insert(key, vector);
        }
        Ok(store)
    }

    /// Serializes with shortest round-trip float formatting, phrases sorted.
    pub fn to_tsv(&self) -> String {
        let mut out = format!("#dim={}\t#provider={}\n", self.dim, self.provider_id);
        for (phrase, vector) in &self.entries {
            out.push_str(phrase);
            for v in vector.values() {
                write!(out, "\t{v:?}").unwrap();
            }
            out.push('\n');
        }
        out
    }

    pub fn load(path: &Path) -> Result<Self, EmbedError> {
        let text = std::fs::read_to_string(path).map_err(|e| EmbedError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::parse_tsv(&text)
    }

    /// Writes via a temporary sibling file and an atomic rename, so readers
    /// see either the previous snapshot or the new one.
    pub fn save_atomic(&self, path: &Path) -> Result<(), EmbedError> {
        let io_err = |e: std::io::Error| EmbedError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        };
        let dir = match path.parent() {
            Some(p) if !p.as_os_str().is_empty() => p,
            _ => Path::new("."),
        };
        let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
        tmp.write_all(self.to_tsv().as_bytes()).map_err(io_err)?;
        tmp.as_file().sync_all().map_err(io_err)?;
        tmp.persist(path).map_err(|e| io_err(e.error))?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_round_trip() {
        let text = "#dim=3\t#provider=test\npopulation\t0.1\t-2.5\t3\nnet increase\t1e-3\t0\t0.3333333333333333\n";
        let store = EmbeddingStore::parse_tsv(text).unwrap();
        assert_eq!(store.dim(), 3);
        assert_eq!(store.len(), 2);
        assert_eq!(store.provider_id(), "test");
        assert_eq!(store.get("population").unwrap().values(), &[0.1, -2.5, 3.0]);
        let again = EmbeddingStore::parse_tsv(&store.to_tsv()).unwrap();
        assert_eq!(again, store);
    }

    #[test]
    fn inconsistent_dimension() {
        let text = "#dim=3\t#provider=t\na\t1\t2\t3\nb\t1\t2\n";
        assert_eq!(
            EmbeddingStore::parse_tsv(text),
            Err(EmbedError::InconsistentDimension {
                line: 3,
                expected: 3,
                found: 2
            })
        );
    }

    #[test]
    fn malformed_rows() {
        assert!(matches!(
            EmbeddingStore::parse_tsv("population\t1\n"),
            Err(EmbedError::Parse { line: 1, .. })
        ));
        assert!(matches!(
            EmbeddingStore::parse_tsv("#dim=1\t#provider=t\na\tx\n"),
            Err(EmbedError::Parse { line: 2, .. })
        ));
        assert!(matches!(
            EmbeddingStore::parse_tsv("#dim=1\t#provider=t\nA\t1\na\t2\n"),
            Err(EmbedError::Parse { line: 3, .. })
        ));
    }

    #[test]
    fn header_only_store() {
        let store = EmbeddingStore::parse_tsv("#dim=768\t#provider=all-mpnet-base-v2\n").unwrap();
        assert!(store.is_empty());
        assert_eq!(store.dim(), 768);
    }
}
