// Generate a seeded corpus of perturbed diagrams, score it in parallel
// and summarize each metric's distribution.

use std::error::Error;

use cldsim::embed::DeterministicProvider;
use cldsim::pipeline::{batch, perturb_corpus, CompareOptions, NamedGraph, PerturbationPlan};
use cldsim::reference;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let dir = tempfile::tempdir()?;
    let r = reference::limits_to_growth();
    let light = PerturbationPlan::parse_ops(1, "rename_node=1,flip_polarity=1")?;
    let heavy = PerturbationPlan::parse_ops(2, "rename_node=4,add_node=2,delete_edge=2")?;
    perturb_corpus(&r, &light, 40, dir.path())?;
    perturb_corpus(&r, &heavy, 40, dir.path())?;

    let provider = DeterministicProvider::new(7, 32)?;
    let out = batch(
        &NamedGraph::new("reference", r),
        dir.path(),
        Some(&provider),
        &CompareOptions::default(),
        4,
    )?;
    println!("{} reports, {} rejected", out.reports.len(), out.rejects.len());
    for (id, s) in &out.summaries {
        println!(
            "{id}: mean {:.3} median {:.3} range [{:.3}, {:.3}]",
            s.mean, s.median, s.min, s.max
        );
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
