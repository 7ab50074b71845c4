// Structural kernels: per-pair scores and a Gram matrix over a small set.

use std::error::Error;

use cldsim::kernels::{gram_matrix, kernel_scores, KernelConfig, KernelId};
use cldsim::pipeline::rename_all;
use cldsim::reference;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let cfg = KernelConfig::default();
    let r = reference::limits_to_growth();

    // renaming every variable keeps only what G5 sees
    let renamed = rename_all(&r, 1);
    println!("renamed copy: {:?}", kernel_scores(&r, &renamed, &cfg)?.as_array());

    let graphs = vec![
        r,
        reference::ltg_strong(),
        reference::ltg_moderate(),
        reference::ltg_dissimilar(),
    ];
    for k in KernelId::ALL {
        println!("{} ({})", k, k.name());
        for row in gram_matrix(&graphs, k, &cfg)? {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:.3}")).collect();
            println!("  {}", cells.join(" "));
        }
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
