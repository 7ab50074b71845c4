use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use sha2::{Digest, Sha256};

use super::{phrase_key, EmbedError, EmbeddingProvider};
use crate::text::EmbeddingVector;

/// Model-free provider for tests and reproducible runs.
///
/// Each token maps to a pseudo-random unit vector drawn from a ChaCha stream
/// seeded by `sha256(seed || token)`; a phrase is the mean of its token
/// vectors. Token order therefore does not matter, and phrases sharing tokens
/// land close together.
#[derive(Debug, Clone)]
pub struct DeterministicProvider {
    seed: u64,
    dim: usize,
    id: String,
}

impl DeterministicProvider {
    pub fn new(seed: u64, dim: usize) -> Result<Self, EmbedError> {
        if dim < 2 {
            return Err(EmbedError::InvalidSource(format!(
                "deterministic provider needs dim >= 2, got {dim}"
            )));
        }
        Ok(DeterministicProvider {
            seed,
            dim,
            id: format!("det:seed={seed},dim={dim}"),
        })
    }

    fn token_vector(&self, token: &str) -> Vec<f64> {
        let mut hasher = Sha256::new();
        hasher.update(self.seed.to_le_bytes());
        hasher.update(token.as_bytes());
        let digest = hasher.finalize();
        let mut seed = [0u8; 32];
        seed.copy_from_slice(&digest);
        let mut rng = ChaCha8Rng::from_seed(seed);
        loop {
            let v: Vec<f64> = (0..self.dim)
                .map(|_| StandardNormal.sample(&mut rng))
                .collect();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-12 {
                return v.into_iter().map(|x| x / norm).collect();
            }
        }
    }

    pub fn embed_phrase(&self, phrase: &str) -> Result<EmbeddingVector, EmbedError> {
        let key = phrase_key(phrase)?;
        let tokens: Vec<&str> = key.split(' ').collect();
        let mut acc = vec![0.0; self.dim];
        for token in &tokens {
            for (a, x) in acc.iter_mut().zip(self.token_vector(token)) {
                *a += x;
            }
        }
        let count = tokens.len() as f64;
        EmbeddingVector::new(acc.into_iter().map(|a| a / count).collect())
            .map_err(|_| EmbedError::InvalidPhrase(phrase.to_owned()))
    }
}

impl EmbeddingProvider for DeterministicProvider {
    fn provider_id(&self) -> &str {
        &self.id
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn embed(&self, phrases: &[String]) -> Result<Vec<EmbeddingVector>, EmbedError> {
        phrases.iter().map(|p| self.embed_phrase(p)).collect()
    }
}
