// Parse a Mermaid-style diagram and print its graph statistics.

use std::error::Error;

use cldsim::graph::{parse_cld_text, stats, to_json};

const DIAGRAM: &str = r#"graph TD
    P[Population] -- "+" --> G[Net Increase]
    G -- "+" --> P
    P -- "+" --> C[Crowding]
    C -- "-" --> F[Food per Capita]
    F -- "+" --> G
    X[Unused Idea]
"#;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let g = parse_cld_text(DIAGRAM)?;
    for w in g.warnings() {
        eprintln!("warning: {w}");
    }
    let s = stats(&g)?;
    println!("n={} m={} cycles={}", s.n, s.m, s.cycles);
    println!("density={:.4} transitivity={:.4}", s.density, s.transitivity);
    match s.avg_connectivity {
        Some(c) => println!("avg_connectivity={c:.4}"),
        None => println!("avg_connectivity=undefined"),
    }
    // canonical names in the JSON form
    println!("{}", to_json(&g));
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
