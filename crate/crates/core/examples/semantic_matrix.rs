// Pairwise name scores and the three ways to fold them into one number.

use std::error::Error;

use cldsim::graph::CausalGraph;
use cldsim::semantic::{aggregate, pairwise_matrix, SemanticMetric, Strategy};
use cldsim::Polarity::{Negative, Positive};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let reference = CausalGraph::builder()
        .node("D", "Student Demand")
        .node("Q", "Teaching Quality")
        .edge("D", "Q", Negative)
        .build()?;
    let candidate = CausalGraph::builder()
        .node("E", "Student Enrollment")
        .node("R", "Reputation")
        .node("Q", "Quality of Teaching")
        .edge("R", "E", Positive)
        .edge("E", "Q", Negative)
        .build()?;

    for metric in [SemanticMetric::Bleu, SemanticMetric::Fuzzy] {
        let m = pairwise_matrix(metric, &reference, &candidate, None)?;
        println!("{}:", metric.id());
        for (name, row) in m.ref_names.iter().zip(&m.scores) {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:.3}")).collect();
            println!("  {name:>18} | {}", cells.join("  "));
        }
        for s in [
            Strategy::RefBestMatch,
            Strategy::SymmetricBestMatch,
            Strategy::OptimalAssignmentPenalized,
        ] {
            println!("  {:>30}: {:.4}", s.id(), aggregate(&m, s)?);
        }
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
