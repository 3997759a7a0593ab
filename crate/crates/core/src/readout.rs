//! Graph-level readouts.
//!
//! The isotypic readout splits node embeddings into the eigenspaces of a
//! generic `Aut(G)`-equivariant operator and summarises each channel with
//! three norms and a fixed random sketch of its mean. The multiset poolings
//! (sum, mean, max) are kept alongside as baselines.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::automorphism::{
    build_s, enumerate_automorphisms, orbit_coefficients, pair_orbits, AutomorphismSet,
    PairOrbitPartition, DEFAULT_AUTOMORPHISM_CAP,
};
use crate::error::{Error, Result};
use crate::graph::{Graph, Permutation};
use crate::graph6::to_graph6_string;
use crate::linalg::{
    block_projectors, group_eigenvalues, sym_eig, BlockProjectorSet, EigenDecomposition, Matrix,
    SymMatrix,
};
use crate::rng::SplitMix64;

/// Relative tolerance under which two trace keys count as equal when sorting
/// blocks.
pub const SORT_KEY_RTOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReadoutConfig {
    pub max_blocks: usize,
    pub rp_dim: usize,
    /// Seed of the random projection matrix.
    pub seed: u64,
    pub centering: bool,
    pub eig_tol: f64,
    pub cap_auts: usize,
    /// Seed of the orbit coefficients of `S`.
    pub coeff_seed: u64,
}

impl Default for ReadoutConfig {
    fn default() -> Self {
        Self {
            max_blocks: 16,
            rp_dim: 8,
            seed: 0,
            centering: false,
            eig_tol: 1e-12,
            cap_auts: DEFAULT_AUTOMORPHISM_CAP,
            coeff_seed: 0,
        }
    }
}

impl ReadoutConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_blocks == 0 {
            return Err(Error::InvalidArgument("max_blocks must be >= 1".into()));
        }
        if !(self.eig_tol > 0.0) {
            return Err(Error::InvalidArgument("eig_tol must be positive".into()));
        }
        if self.cap_auts == 0 {
            return Err(Error::InvalidArgument("cap_auts must be >= 1".into()));
        }
        Ok(())
    }

    /// Length of the isotypic readout vector, `B · (3 + r)`.
    pub fn output_len(&self) -> usize {
        self.max_blocks * (3 + self.rp_dim)
    }
}

/// Sort criteria of one block: `(tr P, tr PL, tr PA)` descending, then the
/// block eigenvalue descending, then the original block index ascending.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SortKey {
    pub trace: f64,
    pub trace_laplacian: f64,
    pub trace_adjacency: f64,
    pub eigenvalue: f64,
    pub index: usize,
}

impl SortKey {
    fn ordering(&self, other: &SortKey) -> Ordering {
        approx_desc(self.trace, other.trace)
            .then_with(|| approx_desc(self.trace_laplacian, other.trace_laplacian))
            .then_with(|| approx_desc(self.trace_adjacency, other.trace_adjacency))
            .then_with(|| approx_desc(self.eigenvalue, other.eigenvalue))
            .then_with(|| self.index.cmp(&other.index))
    }
}

fn approx_desc(a: f64, b: f64) -> Ordering {
    if (a - b).abs() <= SORT_KEY_RTOL * a.abs().max(b.abs()).max(1.0) {
        Ordering::Equal
    } else {
        b.total_cmp(&a)
    }
}

/// Full spectral pipeline for one graph, before sorting and truncation.
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub automorphisms: AutomorphismSet,
    pub orbits: PairOrbitPartition,
    pub coefficients: Vec<f64>,
    pub operator: SymMatrix,
    pub eigen: EigenDecomposition,
    pub blocks: BlockProjectorSet,
}

/// Automorphisms, pair orbits, `S`, its eigendecomposition and eigenspace
/// projectors. Explicit `coeffs` (in canonical orbit order) take precedence
/// over `coeff_seed`.
pub fn decompose(
    g: &Graph,
    cap: usize,
    coeffs: Option<&[f64]>,
    coeff_seed: u64,
    eig_tol: f64,
) -> Result<Decomposition> {
    let automorphisms = enumerate_automorphisms(g, cap)?;
    let orbits = pair_orbits(&automorphisms, g)?;
    let coefficients = match coeffs {
        Some(c) => c.to_vec(),
        None => orbit_coefficients(orbits.len(), coeff_seed),
    };
    let operator = build_s(&orbits, &coefficients)?;
    let eigen = sym_eig(&operator)?;
    let index_blocks = group_eigenvalues(&eigen, eig_tol);
    let blocks = block_projectors(&eigen, &index_blocks)?;
    Ok(Decomposition {
        automorphisms,
        orbits,
        coefficients,
        operator,
        eigen,
        blocks,
    })
}

/// Sort keys of every block of `blocks` against graph `g`, in block order.
pub fn sort_keys(g: &Graph, blocks: &BlockProjectorSet) -> Vec<SortKey> {
    let lap = g.laplacian();
    let adj = g.adjacency();
    blocks
        .blocks
        .iter()
        .enumerate()
        .map(|(index, b)| SortKey {
            trace: b.projector.trace(),
            trace_laplacian: b.projector.trace_product(&lap),
            trace_adjacency: b.projector.trace_product(&adj),
            eigenvalue: b.eigenvalue,
            index,
        })
        .collect()
}

/// One retained channel of a bundle.
#[derive(Clone, Debug)]
pub struct BundleBlock {
    pub projector: SymMatrix,
    pub key: SortKey,
    pub multiplicity: usize,
}

/// Sorted, truncated block projectors of one graph in one labeling. Slots
/// `blocks.len()..max_blocks` are zero padding.
#[derive(Clone, Debug)]
pub struct ProjectorBundle {
    pub n: usize,
    pub fingerprint: String,
    pub blocks: Vec<BundleBlock>,
    pub max_blocks: usize,
    /// Number of eigenspace blocks before truncation.
    pub total_blocks: usize,
    pub capped: bool,
    pub automorphism_count: usize,
    pub orbit_count: usize,
}

impl ProjectorBundle {
    /// Number of zero-padded slots.
    pub fn padding(&self) -> usize {
        self.max_blocks - self.blocks.len()
    }

    /// The first `max_blocks` slots of this bundle. Sorting does not depend
    /// on the budget, so this equals building with the smaller budget.
    pub fn truncated(&self, max_blocks: usize) -> ProjectorBundle {
        ProjectorBundle {
            n: self.n,
            fingerprint: self.fingerprint.clone(),
            blocks: self.blocks.iter().take(max_blocks).cloned().collect(),
            max_blocks,
            total_blocks: self.total_blocks,
            capped: self.capped,
            automorphism_count: self.automorphism_count,
            orbit_count: self.orbit_count,
        }
    }

    /// The bundle of the relabeled graph `g.permute(p)`: every projector
    /// conjugated to `Π P Πᵀ`. Sort keys are traces and do not change.
    pub fn transport(&self, p: &Permutation) -> Result<ProjectorBundle> {
        if p.len() != self.n {
            return Err(Error::Dimension(format!(
                "relabeling of length {} for a bundle on {} nodes",
                p.len(),
                self.n
            )));
        }
        Ok(ProjectorBundle {
            blocks: self
                .blocks
                .iter()
                .map(|b| BundleBlock {
                    projector: b.projector.conjugate(p),
                    key: b.key.clone(),
                    multiplicity: b.multiplicity,
                })
                .collect(),
            n: self.n,
            fingerprint: format!("{}|relabeled", self.fingerprint),
            max_blocks: self.max_blocks,
            total_blocks: self.total_blocks,
            capped: self.capped,
            automorphism_count: self.automorphism_count,
            orbit_count: self.orbit_count,
        })
    }
}

pub fn prepare_bundle(g: &Graph, cfg: &ReadoutConfig) -> Result<ProjectorBundle> {
    prepare_bundle_inner(g, cfg, None)
}

/// [`prepare_bundle`] with explicit orbit coefficients in canonical order.
pub fn prepare_bundle_with_coeffs(
    g: &Graph,
    cfg: &ReadoutConfig,
    coeffs: &[f64],
) -> Result<ProjectorBundle> {
    prepare_bundle_inner(g, cfg, Some(coeffs))
}

fn prepare_bundle_inner(
    g: &Graph,
    cfg: &ReadoutConfig,
    coeffs: Option<&[f64]>,
) -> Result<ProjectorBundle> {
    cfg.validate()?;
    let dec = decompose(g, cfg.cap_auts, coeffs, cfg.coeff_seed, cfg.eig_tol)?;
    Ok(bundle_from_decomposition(g, &dec, cfg.max_blocks))
}

/// Sorts the blocks of `dec` by their keys and keeps the first `max_blocks`.
pub fn bundle_from_decomposition(
    g: &Graph,
    dec: &Decomposition,
    max_blocks: usize,
) -> ProjectorBundle {
    let keys = sort_keys(g, &dec.blocks);
    let mut order: Vec<usize> = (0..keys.len()).collect();
    order.sort_by(|&a, &b| keys[a].ordering(&keys[b]));
    let blocks = order
        .iter()
        .take(max_blocks)
        .map(|&k| BundleBlock {
            projector: dec.blocks.blocks[k].projector.clone(),
            key: keys[k].clone(),
            multiplicity: dec.blocks.blocks[k].multiplicity,
        })
        .collect();
    ProjectorBundle {
        n: g.n(),
        fingerprint: graph_fingerprint(g),
        blocks,
        max_blocks,
        total_blocks: keys.len(),
        capped: dec.automorphisms.capped,
        automorphism_count: dec.automorphisms.len(),
        orbit_count: dec.orbits.len(),
    }
}

/// Labeled identity of a graph (its graph6 string; `"n=0"` for the null graph).
pub fn graph_fingerprint(g: &Graph) -> String {
    to_graph6_string(g).unwrap_or_else(|_| format!("n={}", g.n()))
}

/// `J M` with `J = I - (1/n) 11ᵀ`: subtracts each column's mean.
pub fn center(m: &Matrix) -> Matrix {
    let (n, d) = (m.rows(), m.cols());
    if n == 0 {
        return m.clone();
    }
    let mut means = vec![0.0; d];
    for i in 0..n {
        for (acc, x) in means.iter_mut().zip(m.row(i)) {
            *acc += x;
        }
    }
    means.iter_mut().for_each(|x| *x /= n as f64);
    let mut out = m.clone();
    for i in 0..n {
        for (x, mu) in out.row_mut(i).iter_mut().zip(&means) {
            *x -= mu;
        }
    }
    out
}

/// `d x r` matrix of i.i.d. `N(0, 1) / √r` entries, filled column by column.
pub fn random_projection(d: usize, r: usize, seed: u64) -> Matrix {
    let mut m = Matrix::zeros(d, r);
    if r == 0 {
        return m;
    }
    let scale = 1.0 / (r as f64).sqrt();
    let mut rng = SplitMix64::new(seed);
    for j in 0..r {
        for i in 0..d {
            m[(i, j)] = rng.normal() * scale;
        }
    }
    m
}

fn check_block_dims(p: &Matrix, m: &Matrix, r: &Matrix) -> Result<()> {
    if p.rows() != p.cols() || p.cols() != m.rows() {
        return Err(Error::Dimension(format!(
            "projector {}x{} against features with {} rows",
            p.rows(),
            p.cols(),
            m.rows()
        )));
    }
    if r.rows() != m.cols() {
        return Err(Error::Dimension(format!(
            "projection with {} rows against {} feature columns",
            r.rows(),
            m.cols()
        )));
    }
    Ok(())
}

// Sums in sorted order so that the result depends only on the multiset of
// values; row permutations then leave every statistic bit-identical.
fn sorted_sum(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    xs.into_iter().sum()
}

fn column_sums(m: &Matrix) -> Vec<f64> {
    (0..m.cols()).map(|j| sorted_sum(m.column(j))).collect()
}

fn row_norm(row: &[f64]) -> f64 {
    row.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn project_row(v: &[f64], r: &Matrix) -> Vec<f64> {
    (0..r.cols())
        .map(|j| v.iter().enumerate().map(|(i, x)| x * r[(i, j)]).sum())
        .collect()
}

/// `ψ = (s1, s2, s3, μᵀR)` for `M_α = P M`:
/// `s1 = ‖Σ_j row_j‖`, `s2 = ‖M_α‖_F`, `s3 = mean_j ‖row_j‖`, `μ = mean_j row_j`.
pub fn block_features(p: &Matrix, m: &Matrix, r: &Matrix) -> Result<Vec<f64>> {
    check_block_dims(p, m, r)?;
    let ma = p.matmul(m)?;
    Ok(features_of_projected(&ma, r))
}

fn features_of_projected(ma: &Matrix, r: &Matrix) -> Vec<f64> {
    let n = ma.rows();
    let sums = column_sums(ma);
    let s1 = sums.iter().map(|x| x * x).sum::<f64>().sqrt();
    let norms: Vec<f64> = (0..n).map(|j| row_norm(ma.row(j))).collect();
    let s2 = sorted_sum(norms.iter().map(|x| x * x).collect()).sqrt();
    let s3 = if n == 0 {
        0.0
    } else {
        sorted_sum(norms) / n as f64
    };
    let mu: Vec<f64> = sums
        .iter()
        .map(|x| if n == 0 { 0.0 } else { x / n as f64 })
        .collect();
    let mut out = Vec::with_capacity(3 + r.cols());
    out.extend([s1, s2, s3]);
    out.extend(project_row(&mu, r));
    out
}

/// Linear counterpart of [`block_features`]: the first three column sums of
/// `M_α` followed by `(Σ_j row_j)ᵀ R`. Every entry is linear in `M`.
pub fn linearized_block_features(p: &Matrix, m: &Matrix, r: &Matrix) -> Result<Vec<f64>> {
    check_block_dims(p, m, r)?;
    let ma = p.matmul(m)?;
    let sums = column_sums(&ma);
    let mut out = Vec::with_capacity(3 + r.cols());
    out.extend((0..3).map(|k| sums.get(k).copied().unwrap_or(0.0)));
    out.extend(project_row(&sums, r));
    Ok(out)
}

/// Per-block feature map used by [`isotypic_readout_with`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlockStatistics {
    Nonlinear,
    Linear,
}

pub fn isotypic_readout(
    bundle: &ProjectorBundle,
    m: &Matrix,
    cfg: &ReadoutConfig,
) -> Result<Vec<f64>> {
    isotypic_readout_with(bundle, m, cfg, BlockStatistics::Nonlinear)
}

/// Concatenation of the block features of every slot, zero for padding.
/// Output length is always `max_blocks · (3 + rp_dim)`.
pub fn isotypic_readout_with(
    bundle: &ProjectorBundle,
    m: &Matrix,
    cfg: &ReadoutConfig,
    stats: BlockStatistics,
) -> Result<Vec<f64>> {
    if m.rows() != bundle.n {
        return Err(Error::Dimension(format!(
            "features have {} rows, graph has {} nodes",
            m.rows(),
            bundle.n
        )));
    }
    let r = random_projection(m.cols(), cfg.rp_dim, cfg.seed);
    let centered;
    let features = if cfg.centering {
        centered = center(m);
        &centered
    } else {
        m
    };
    let width = 3 + cfg.rp_dim;
    let mut out = vec![0.0; cfg.max_blocks * width];
    for (slot, block) in bundle.blocks.iter().take(cfg.max_blocks).enumerate() {
        let psi = match stats {
            BlockStatistics::Nonlinear => block_features(&block.projector, features, &r)?,
            BlockStatistics::Linear => linearized_block_features(&block.projector, features, &r)?,
        };
        out[slot * width..(slot + 1) * width].copy_from_slice(&psi);
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PoolKind {
    Sum,
    Mean,
    Max,
    MeanMax,
}

/// Column-wise multiset pooling; `MeanMax` concatenates mean then max.
pub fn pool(m: &Matrix, kind: PoolKind) -> Result<Vec<f64>> {
    let (n, d) = (m.rows(), m.cols());
    if n == 0 {
        return Err(Error::Dimension(
            "cannot pool an empty feature matrix".into(),
        ));
    }
    let sums = column_sums(m);
    let mean: Vec<f64> = sums.iter().map(|x| x / n as f64).collect();
    let max = || {
        (0..d)
            .map(|j| (0..n).map(|i| m[(i, j)]).fold(f64::NEG_INFINITY, f64::max))
            .collect::<Vec<f64>>()
    };
    Ok(match kind {
        PoolKind::Sum => sums,
        PoolKind::Mean => mean,
        PoolKind::Max => max(),
        PoolKind::MeanMax => {
            let mut v = mean;
            v.extend(max());
            v
        }
    })
}

/// Every readout exposed by the harness and CLI.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReadoutKind {
    Sum,
    Mean,
    Max,
    MeanMax,
    Isotypic,
    IsotypicLinear,
}

impl ReadoutKind {
    pub const ALL: [ReadoutKind; 6] = [
        ReadoutKind::Sum,
        ReadoutKind::Mean,
        ReadoutKind::Max,
        ReadoutKind::MeanMax,
        ReadoutKind::Isotypic,
        ReadoutKind::IsotypicLinear,
    ];

    pub fn needs_bundle(self) -> bool {
        matches!(self, ReadoutKind::Isotypic | ReadoutKind::IsotypicLinear)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ReadoutKind::Sum => "sum",
            ReadoutKind::Mean => "mean",
            ReadoutKind::Max => "max",
            ReadoutKind::MeanMax => "meanmax",
            ReadoutKind::Isotypic => "isotypic",
            ReadoutKind::IsotypicLinear => "isotypic-linear",
        }
    }
}

impl fmt::Display for ReadoutKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ReadoutKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.to_ascii_lowercase().replace('_', "-");
        ReadoutKind::ALL
            .into_iter()
            .find(|k| k.as_str() == norm || (norm == "mean-max" && *k == ReadoutKind::MeanMax))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown readout {s:?}")))
    }
}

/// Applies any readout. Bundle-based kinds require `bundle`.
pub fn apply_readout(
    kind: ReadoutKind,
    bundle: Option<&ProjectorBundle>,
    m: &Matrix,
    cfg: &ReadoutConfig,
) -> Result<Vec<f64>> {
    let need = || {
        bundle.ok_or_else(|| {
            Error::InvalidArgument(format!("readout {kind} needs a projector bundle"))
        })
    };
    match kind {
        ReadoutKind::Sum => pool(m, PoolKind::Sum),
        ReadoutKind::Mean => pool(m, PoolKind::Mean),
        ReadoutKind::Max => pool(m, PoolKind::Max),
        ReadoutKind::MeanMax => pool(m, PoolKind::MeanMax),
        ReadoutKind::Isotypic => isotypic_readout_with(need()?, m, cfg, BlockStatistics::Nonlinear),
        ReadoutKind::IsotypicLinear => {
            isotypic_readout_with(need()?, m, cfg, BlockStatistics::Linear)
        }
    }
}

type Slot = Arc<OnceLock<std::result::Result<Arc<ProjectorBundle>, String>>>;

/// Bundle cache keyed by graph fingerprint. Construction for a given key runs
/// at most once; concurrent requests for the same key wait for it.
#[derive(Default)]
pub struct BundleCache {
    slots: Mutex<HashMap<String, Slot>>,
}

impl BundleCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get_or_build(&self, g: &Graph, cfg: &ReadoutConfig) -> Result<Arc<ProjectorBundle>> {
        let key = format!(
            "{}#{}#{}#{}#{:e}",
            graph_fingerprint(g),
            cfg.max_blocks,
            cfg.cap_auts,
            cfg.coeff_seed,
            cfg.eig_tol
        );
        let slot = {
            let mut slots = self.slots.lock().expect("poisoned");
            slots.entry(key).or_default().clone()
        };
        slot.get_or_init(|| {
            prepare_bundle(g, cfg)
                .map(Arc::new)
                .map_err(|e| e.to_string())
        })
        .clone()
        .map_err(Error::InvalidGraph)
    }

    pub fn len(&self) -> usize {
        self.slots.lock().expect("poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
