// Score a candidate diagram against a reference with all nine metrics.
//
//
// cargo run --example compare
//

use std::error::Error;

use cldsim::embed::DeterministicProvider;
use cldsim::pipeline::{compare, CompareOptions, NamedGraph};
use cldsim::reference;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let reference = NamedGraph::new("limits to growth", reference::limits_to_growth());
    // stand-in vectors; swap for `HttpProvider` or `FileProvider` with a real model
    let provider = DeterministicProvider::new(7, 64)?;
    let opts = CompareOptions::default();

    for (id, graph) in [
        ("strong", reference::ltg_strong()),
        ("moderate", reference::ltg_moderate()),
        ("dissimilar", reference::ltg_dissimilar()),
    ] {
        let report = compare(&reference, &NamedGraph::new(id, graph), Some(&provider), &opts)?;
        let line: Vec<String> = report
            .scores()
            .iter()
            .map(|(m, v)| format!("{m}={v:.3}"))
            .collect();
        println!("{id:>10}: {}", line.join(" "));
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
