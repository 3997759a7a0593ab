//! Isotypic graph readouts.
//!
//! Node embeddings are split along the eigenspaces of a random operator built
//! from the automorphism pair orbits of the graph, and each channel is
//! summarised separately. Linear invariant poolings (sum, mean) collapse on
//! 1-WL equivalent graphs; the per-channel norms do not.

pub mod automorphism;
pub mod encoder;
pub mod error;
pub mod generators;
pub mod graph;
pub mod graph6;
pub mod harness;
pub mod io;
pub mod linalg;
pub mod readout;
pub mod reptheory;
pub mod rng;
pub mod search;
pub mod wl;

pub use automorphism::{
    build_s, enumerate_automorphisms, orbit_coefficients, pair_orbits, AutomorphismSet,
    PairOrbitPartition,
};
pub use encoder::{encode, init_encoder, EncoderConfig, EncoderWeights};
pub use error::{Error, Result};
pub use graph::{Graph, Permutation};
pub use graph6::{parse_graph6, to_graph6_string, write_graph6};
pub use harness::{run_pair, run_suite, ProtocolConfig, SuiteReport};
pub use linalg::{
    block_projectors, group_eigenvalues, sym_eig, BlockProjectorSet, EigenDecomposition, Matrix,
    SymMatrix,
};
pub use readout::{
    block_features, center, isotypic_readout, pool, prepare_bundle, random_projection, PoolKind,
    ProjectorBundle, ReadoutConfig, ReadoutKind,
};
pub use rng::{derive_seed, SplitMix64};
pub use search::is_isomorphic;
pub use wl::{color_refinement, wl_equivalent};
