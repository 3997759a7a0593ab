//! 1-WL colour refinement.
//!
//! Colours are renamed each round by the sorted order of the signatures
//! `(colour, sorted neighbour colours)`, so colour ids never depend on node
//! labels and histograms are directly comparable across graphs.

use std::collections::BTreeMap;

use crate::graph::Graph;

/// Per-node colours after refinement to the coarsest equitable partition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StableColoring {
    pub colors: Vec<u32>,
    /// `(colour, count)` pairs sorted by colour.
    pub histogram: Vec<(u32, usize)>,
}

impl StableColoring {
    pub fn num_colors(&self) -> usize {
        self.histogram.len()
    }

    /// Node sets of each colour class, in colour order.
    pub fn cells(&self) -> Vec<Vec<usize>> {
        let mut cells = vec![Vec::new(); self.num_colors()];
        for (v, &c) in self.colors.iter().enumerate() {
            cells[c as usize].push(v);
        }
        cells
    }
}

pub fn color_refinement(g: &Graph) -> StableColoring {
    let mut colors = [vec![0u32; g.n()]];
    refine_joint(&[g], &mut colors);
    let [colors] = colors;
    let histogram = histogram(&colors);
    StableColoring { colors, histogram }
}

/// Refines a given colouring (colours must be dense ids `0..k`).
pub fn refine_coloring(g: &Graph, initial: &[u32]) -> StableColoring {
    let mut colors = [initial.to_vec()];
    refine_joint(&[g], &mut colors);
    let [colors] = colors;
    let histogram = histogram(&colors);
    StableColoring { colors, histogram }
}

/// True when colour refinement cannot tell the two graphs apart.
pub fn wl_equivalent(g: &Graph, h: &Graph) -> bool {
    if g.n() != h.n() {
        return false;
    }
    let mut colors = [vec![0u32; g.n()], vec![0u32; h.n()]];
    refine_joint(&[g, h], &mut colors)
}

fn histogram(colors: &[u32]) -> Vec<(u32, usize)> {
    let mut counts: BTreeMap<u32, usize> = BTreeMap::new();
    for &c in colors {
        *counts.entry(c).or_default() += 1;
    }
    counts.into_iter().collect()
}

/// Refines the colourings of several graphs in lockstep with a shared colour
/// namespace. Returns `false` as soon as the colour histograms of the graphs
/// diverge; the colourings are then left at the diverging round.
pub(crate) fn refine_joint(graphs: &[&Graph], colors: &mut [Vec<u32>]) -> bool {
    debug_assert_eq!(graphs.len(), colors.len());
    if !histograms_agree(colors) {
        return false;
    }
    let mut distinct = count_distinct(colors);
    loop {
        let mut sigs: Vec<Vec<(u32, Vec<u32>)>> = Vec::with_capacity(graphs.len());
        let mut table: BTreeMap<(u32, Vec<u32>), u32> = BTreeMap::new();
        for (g, col) in graphs.iter().zip(colors.iter()) {
            let per_graph: Vec<(u32, Vec<u32>)> = (0..g.n())
                .map(|v| {
                    let mut nb: Vec<u32> = g.neighbors(v).iter().map(|&u| col[u]).collect();
                    nb.sort_unstable();
                    (col[v], nb)
                })
                .collect();
            for s in &per_graph {
                table.entry(s.clone()).or_insert(0);
            }
            sigs.push(per_graph);
        }
        for (id, slot) in table.values_mut().enumerate() {
            *slot = id as u32;
        }
        for (col, per_graph) in colors.iter_mut().zip(&sigs) {
            for (c, s) in col.iter_mut().zip(per_graph) {
                *c = table[s];
            }
        }
        if !histograms_agree(colors) {
            return false;
        }
        if table.len() == distinct {
            return true;
        }
        distinct = table.len();
    }
}

fn count_distinct(colors: &[Vec<u32>]) -> usize {
    let mut all: Vec<u32> = colors.iter().flatten().copied().collect();
    all.sort_unstable();
    all.dedup();
    all.len()
}

fn histograms_agree(colors: &[Vec<u32>]) -> bool {
    match colors.split_first() {
        Some((first, rest)) => {
            let h = histogram(first);
            rest.iter().all(|c| histogram(c) == h)
        }
        None => true,
    }
}
