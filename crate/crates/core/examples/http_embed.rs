// Embed variable names through a running `/embed` service.
//
//
// CLDSIM_EMBED_URL=http://127.0.0.1:8000 cargo run --example http_embed
//
//
// Without the variable the example only prints how to start it.

use std::error::Error;

use cldsim::embed::{EmbeddingProvider, HttpProvider};
use cldsim::pipeline::{compare, CompareOptions, NamedGraph};
use cldsim::reference;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let Ok(url) = std::env::var("CLDSIM_EMBED_URL") else {
        println!("set CLDSIM_EMBED_URL to an embedding service base URL");
        return Ok(());
    };
    let provider = HttpProvider::connect(&url)?;
    println!("model {} (dim {})", provider.provider_id(), provider.dim());
    let report = compare(
        &NamedGraph::new("reference", reference::limits_to_growth()),
        &NamedGraph::new("moderate", reference::ltg_moderate()),
        Some(&provider),
        &CompareOptions::default(),
    )?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
