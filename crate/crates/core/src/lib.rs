//! Similarity metrics for causal loop diagrams.
//!
//! Two families of scores compare a candidate diagram against a reference:
//!
//! - semantic scores over variable names: BLEU (M1), fuzzy matching (M2),
//!   embedding cosine (M3) and negative Euclidean distance (M4), see
//!   [`semantic`];
//! - structural kernels over the directed, polarity-labeled graph: pyramid
//!   match (G1), shortest path (G2), subgraph matching (G3) and the
//!   Weisfeiler–Lehman vertex (G4) and edge (G5) histograms, see [`kernels`].
//!
//! [`graph`] holds the data model, parsers and graph-level statistics,
//! [`embed`] the embedding providers, and [`pipeline`] the batch comparison
//! of a reference against a corpus.
//!
//! ```
//! use cldsim::embed::DeterministicProvider;
//! use cldsim::kernels::{kernel_scores, KernelConfig};
//! use cldsim::semantic::{semantic_scores, Strategy};
//!
//! let reference = cldsim::reference::limits_to_growth();
//! let candidate = cldsim::reference::ltg_strong();
//! let provider = DeterministicProvider::new(7, 32).unwrap();
//! let semantic = semantic_scores(&reference, &candidate, &provider, Strategy::RefBestMatch).unwrap();
//! let kernels = kernel_scores(&reference, &candidate, &KernelConfig::default()).unwrap();
//! assert_eq!(semantic.m2_fuzzy, 1.0);
//! assert!(kernels.g2 < 1.0);
//! ```

pub mod cli;
pub mod embed;
pub mod graph;
pub mod kernels;
pub mod pipeline;
pub mod reference;
pub mod semantic;
pub mod text;

pub use graph::{CausalGraph, Polarity};
