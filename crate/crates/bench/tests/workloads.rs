use isoread::isotypic_readout;
use isoread_bench::{er_graph, readout_workload};

#[test]
fn er_graphs_are_reproducible() {
    assert_eq!(er_graph(32).unwrap(), er_graph(32).unwrap());
    assert_eq!(er_graph(32).unwrap().n(), 32);
}

#[test]
fn workload_runs_a_readout() {
    let w = readout_workload(16).unwrap();
    assert_eq!(w.features.rows(), w.graph.n());
    let z = isotypic_readout(&w.bundle, &w.features, &w.config).unwrap();
    assert_eq!(z.len(), w.config.output_len());
    assert!(z.iter().all(|x| x.is_finite()));
}
