use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::{phrase_key, EmbedError, EmbeddingProvider};
use crate::text::EmbeddingVector;

pub const DEFAULT_BATCH_SIZE: usize = 64;

#[derive(Serialize)]
struct EmbedRequest<'a> {
    texts: &'a [String],
}

#[derive(Deserialize)]
struct EmbedResponse {
    vectors: Vec<Vec<f64>>,
    dim: usize,
    model: String,
}

#[derive(Deserialize)]
struct Health {
    dim: usize,
    model: String,
}

#[derive(Deserialize)]
struct ErrorBody {
    error: String,
}

/// Client for a remote `POST /embed` endpoint.
///
/// Requests carry `{"texts":[...]}` and expect
/// `{"vectors":[[...]...],"dim":d,"model":"..."}`. The provider identity is the
/// model name reported by the server.
#[derive(Debug, Clone)]
pub struct HttpProvider {
    endpoint: String,
    batch_size: usize,
    dim: usize,
    model: String,
    agent: ureq::Agent,
}

impl HttpProvider {
    /// Connects with the default batch size. The server is probed once with
    /// an empty batch to learn its model name and dimension; servers that
    /// refuse empty batches are asked `GET /health` instead.
    pub fn connect(url: &str) -> Result<Self, EmbedError> {
        Self::connect_with_batch_size(url, DEFAULT_BATCH_SIZE)
    }

    pub fn connect_with_batch_size(url: &str, batch_size: usize) -> Result<Self, EmbedError> {
        if batch_size == 0 {
            return Err(EmbedError::InvalidSource("batch size must be positive".into()));
        }
        let trimmed = url.trim_end_matches('/');
        let endpoint = if trimmed.ends_with("/embed") {
            trimmed.to_owned()
        } else {
            format!("{trimmed}/embed")
        };
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs(60)))
            .http_status_as_error(false)
            .build()
            .into();
        let mut provider = HttpProvider {
            endpoint,
            batch_size,
            dim: 0,
            model: String::new(),
            agent,
        };
        let probe = match provider.post(&[]) {
            Ok(r) => Health {
                dim: r.dim,
                model: r.model,
            },
            Err(EmbedError::Status { .. }) => provider.health()?,
            Err(e) => return Err(e),
        };
        if probe.dim == 0 {
            return Err(EmbedError::Protocol {
                batch: Vec::new(),
                message: "server reported dim 0".into(),
            });
        }
        provider.dim = probe.dim;
        provider.model = probe.model;
        Ok(provider)
    }

    pub fn endpoint(&self) -> &str {
        &self.endpoint
    }

    fn health(&self) -> Result<Health, EmbedError> {
        let url = format!("{}/health", self.endpoint.trim_end_matches("/embed"));
        let fail = |message: String| EmbedError::Protocol {
            batch: Vec::new(),
            message,
        };
        let mut response = self.agent.get(&url).call().map_err(|e| EmbedError::Transport {
            batch: Vec::new(),
            message: e.to_string(),
        })?;
        if response.status().as_u16() != 200 {
            return Err(fail(format!("{url} returned status {}", response.status())));
        }
        let body = response
            .body_mut()
            .read_to_string()
            .map_err(|e| fail(e.to_string()))?;
        serde_json::from_str(&body).map_err(|e| fail(format!("malformed health response: {e}")))
    }

    fn post(&self, batch: &[String]) -> Result<EmbedResponse, EmbedError> {
        let transport = |message: String| EmbedError::Transport {
            batch: batch.to_vec(),
            message,
        };
        let mut response = self
            .agent
            .post(&self.endpoint)
            .send_json(EmbedRequest { texts: batch })
            .map_err(|e| transport(e.to_string()))?;
        let status = response.status().as_u16();
        let body = response
            .body_mut()
            .read_to_string()
            .map_err(|e| transport(e.to_string()))?;
        if status != 200 {
            let message = serde_json::from_str::<ErrorBody>(&body)
                .map(|b| b.error)
                .unwrap_or(body);
            return Err(EmbedError::Status {
                batch: batch.to_vec(),
                status,
                message,
            });
        }
        serde_json::from_str(&body).map_err(|e| EmbedError::Protocol {
            batch: batch.to_vec(),
            message: format!("malformed response: {e}"),
        })
    }

    fn embed_batch(&self, batch: &[String]) -> Result<Vec<EmbeddingVector>, EmbedError> {
        let protocol = |message: String| EmbedError::Protocol {
            batch: batch.to_vec(),
            message,
        };
        let response = self.post(batch)?;
        if response.vectors.len() != batch.len() {
            return Err(protocol(format!(
                "{} vectors for {} texts",
                response.vectors.len(),
                batch.len()
            )));
        }
        if response.dim != self.dim {
            return Err(protocol(format!(
                "dim changed from {} to {}",
                self.dim, response.dim
            )));
        }
        response
            .vectors
            .into_iter()
            .map(|v| {
                if v.len() != self.dim {
                    return Err(protocol(format!(
                        "vector of length {} for dim {}",
                        v.len(),
                        self.dim
                    )));
                }
                EmbeddingVector::new(v).map_err(|e| protocol(e.to_string()))
            })
            .collect()
    }
}

impl EmbeddingProvider for HttpProvider {
    fn provider_id(&self) -> &str {
        &self.model
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn embed(&self, phrases: &[String]) -> Result<Vec<EmbeddingVector>, EmbedError> {
        let keys = phrases
            .iter()
            .map(|p| phrase_key(p))
            .collect::<Result<Vec<_>, _>>()?;
        let mut out = Vec::with_capacity(keys.len());
        for batch in keys.chunks(self.batch_size) {
            out.extend(self.embed_batch(batch)?);
        }
        Ok(out)
    }
}
