//! Workloads shared by the criterion benches.

use isoread::generators::gen_er;
use isoread::{
    encode, init_encoder, prepare_bundle, EncoderConfig, Graph, Matrix, ProjectorBundle,
    ReadoutConfig, Result,
};

/// Edge probability and generator seed used by every ER workload.
pub const ER_P: f64 = 0.1;
pub const ER_SEED: u64 = 7;

pub fn er_graph(n: usize) -> Result<Graph> {
    gen_er(n, ER_P, ER_SEED)
}

/// Everything a readout call needs, built once outside the timed loop.
pub struct ReadoutWorkload {
    pub graph: Graph,
    pub bundle: ProjectorBundle,
    pub features: Matrix,
    pub config: ReadoutConfig,
}

pub fn readout_workload(n: usize) -> Result<ReadoutWorkload> {
    let graph = er_graph(n)?;
    let config = ReadoutConfig::default();
    let bundle = prepare_bundle(&graph, &config)?;
    let features = encode(&graph, &init_encoder(&EncoderConfig::default())?)?;
    Ok(ReadoutWorkload {
        graph,
        bundle,
        features,
        config,
    })
}
