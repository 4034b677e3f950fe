//! Edge-count deviations of random vertex subsets in weighted k-uniform
//! hypergraphs.
//!
//! For a hypergraph `H` on `1..=N` and a random subset `B` (uniform of size
//! `m`, or each vertex kept with probability `p`), the crate computes the
//! weighted number of edges inside `B`, its exact distribution on small
//! instances, the martingale decomposition of its deviation along a random
//! ordering, closed-form rate predictions, and Monte Carlo estimates to set
//! against them.

pub mod error;
pub mod generators;
pub mod hypergraph;
pub mod io;
pub mod montecarlo;
pub mod oracle;
pub mod process;
pub mod rates;
pub mod scalar;
pub mod verify;

pub use error::{Error, Result};
pub use generators::{gen_ap, gen_random, gen_sidon, Family};
pub use hypergraph::{
    DegreeStats, HypergraphBuilder, SubsetModel, SubsetSelection, Vertex, VertexSet, WeightedHypergraph,
};
pub use montecarlo::{SimulationConfig, TailEstimate};
pub use oracle::{exact_distribution_m, exact_distribution_p, exact_tail, Pmf, Side};
pub use process::{Decomposition, OrderedPrefix};
pub use rates::{RatePrediction, RegimeClassification, WindowCheck};
pub use scalar::Scalar;
