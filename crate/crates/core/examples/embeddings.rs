// Embedding providers: a TSV store, the deterministic stand-in and a
// persistent cache layered over it.

use std::error::Error;

use cldsim::embed::{
    CachedProvider, DeterministicProvider, EmbeddingProvider, EmbeddingStore, FileProvider,
};
use cldsim::text::{cosine, EmbeddingVector};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let dir = tempfile::tempdir()?;

    // a hand-written store, as exported by an embedding service
    let mut store = EmbeddingStore::new("toy-2d", 2);
    store.insert("population", EmbeddingVector::new(vec![1.0, 0.0])?)?;
    store.insert("people", EmbeddingVector::new(vec![0.9, 0.1])?)?;
    let path = dir.path().join("toy.tsv");
    store.save_atomic(&path)?;
    print!("{}", std::fs::read_to_string(&path)?);

    let file = FileProvider::load(&path)?;
    let v = file.embed(&["Population".into(), "people".into()])?;
    println!("cos(population, people) = {:.4}", cosine(&v[0], &v[1])?);

    // cached deterministic vectors survive a reopen
    let cache = dir.path().join("cache.tsv");
    let phrases = vec!["net increase".to_string(), "food per capita".to_string()];
    let first = CachedProvider::open(DeterministicProvider::new(1, 16)?, &cache)?;
    let a = first.embed(&phrases)?;
    let again = CachedProvider::open(DeterministicProvider::new(1, 16)?, &cache)?;
    println!("cached {} phrases as {}", again.cached_len(), again.provider_id());
    assert_eq!(a, again.embed(&phrases)?);
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
