//! Training-free separation protocol.
//!
//! For each pair and seed a fresh random encoder embeds an independent
//! relabeling of each graph; the readouts are compared by cosine similarity.
//! A pair counts as separated when the mean cosine over seeds falls below the
//! threshold. Relabeled graphs reuse the projectors of the base labeling,
//! conjugated by the relabeling, so each base graph is decomposed once.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::encoder::{encode, init_encoder, EncoderConfig};
use crate::error::{Error, Result};
use crate::generators::{
    bipartite_double, complete, gen_cfi_pair, gen_cycle_pair, gen_er, gen_petersen, gen_rook4,
    gen_shrikhande, gm_switch,
};
use crate::graph::{Graph, Permutation};
use crate::graph6::{parse_graph6, to_graph6_string};
use crate::readout::{
    apply_readout, graph_fingerprint, isotypic_readout, prepare_bundle, BundleCache,
    ProjectorBundle, ReadoutConfig, ReadoutKind,
};
use crate::rng::{derive_seed, SplitMix64};

/// Default decision threshold on the mean cosine.
pub const DEFAULT_THRESHOLD: f64 = 0.95;
/// Embeddings with a smaller norm count as zero.
pub const ZERO_NORM: f64 = 1e-12;
/// Default master seed of the CLI and suite.
pub const DEFAULT_MASTER_SEED: u64 = 20_240_601;

const GM_FIXTURE: &str = include_str!("../fixtures/gm_petersen.json");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Cycles,
    CfiK3,
    CfiK4,
    GmPetersen,
    Srg16,
}

impl Family {
    pub const SUITE: [Family; 4] = [
        Family::Cycles,
        Family::CfiK3,
        Family::CfiK4,
        Family::GmPetersen,
    ];
    pub const ALL: [Family; 5] = [
        Family::Cycles,
        Family::CfiK3,
        Family::CfiK4,
        Family::GmPetersen,
        Family::Srg16,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Family::Cycles => "cycles",
            Family::CfiK3 => "cfi-k3",
            Family::CfiK4 => "cfi-k4",
            Family::GmPetersen => "gm-petersen",
            Family::Srg16 => "srg16",
        }
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.to_ascii_lowercase().replace('_', "-");
        Family::ALL
            .into_iter()
            .find(|f| f.as_str() == norm)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown family {s:?}")))
    }
}

/// One WL-equivalent, non-isomorphic pair of the suite.
#[derive(Clone, Debug)]
pub struct PairSpec {
    pub id: String,
    pub family: Family,
    pub a: Arc<Graph>,
    pub b: Arc<Graph>,
}

#[derive(Clone, Debug, Deserialize)]
struct GmFixture {
    base: String,
    switching_set: Vec<usize>,
    switched: String,
}

/// The pinned Godsil-McKay pair: the bipartite double of the Petersen graph
/// and its switch along the fixture's set. Both sides are checked against
/// the generators.
pub fn gm_petersen_pair() -> Result<(Graph, Graph, Vec<usize>)> {
    let fx: GmFixture = serde_json::from_str(GM_FIXTURE)?;
    let base = parse_graph6(fx.base.as_bytes())?;
    let switched = parse_graph6(fx.switched.as_bytes())?;
    if base != bipartite_double(&gen_petersen()) {
        return Err(Error::InvalidGraph(
            "GM fixture base does not match generator".into(),
        ));
    }
    if gm_switch(&base, &fx.switching_set)? != switched {
        return Err(Error::InvalidGraph(
            "GM fixture switch does not match".into(),
        ));
    }
    Ok((base, switched, fx.switching_set))
}

/// Base pair of a family; `k` is only used by `Cycles`.
pub fn family_pair(family: Family, k: usize) -> Result<(Graph, Graph)> {
    match family {
        Family::Cycles => gen_cycle_pair(k),
        Family::CfiK3 => gen_cfi_pair(&complete(3)),
        Family::CfiK4 => gen_cfi_pair(&complete(4)),
        Family::GmPetersen => gm_petersen_pair().map(|(a, b, _)| (a, b)),
        Family::Srg16 => Ok((gen_shrikhande(), gen_rook4())),
    }
}

/// Which pairs make up a suite.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteSpec {
    pub cycle_ks: Vec<usize>,
    /// Instances per cycle length.
    pub cycle_instances: usize,
    /// Instances for each of the CFI-K3, CFI-K4 and GM-Petersen families.
    pub family_instances: usize,
}

impl Default for SuiteSpec {
    /// 24 cycle pairs (`k = 3..=26`) plus three instances each of CFI-K3,
    /// CFI-K4 and GM-Petersen: 33 pairs.
    fn default() -> Self {
        Self {
            cycle_ks: (3..=26).collect(),
            cycle_instances: 1,
            family_instances: 3,
        }
    }
}

impl SuiteSpec {
    /// One instance per `k` over the given range.
    pub fn cycles_only(ks: impl IntoIterator<Item = usize>) -> Self {
        Self {
            cycle_ks: ks.into_iter().collect(),
            cycle_instances: 1,
            family_instances: 0,
        }
    }
}

/// Instances of one pair share the graphs and differ in the seed path (and
/// hence in encoder weights and relabelings).
pub fn suite_pairs(spec: &SuiteSpec) -> Result<Vec<PairSpec>> {
    let mut out = Vec::new();
    for &k in &spec.cycle_ks {
        let (a, b) = family_pair(Family::Cycles, k)?;
        let (a, b) = (Arc::new(a), Arc::new(b));
        for i in 0..spec.cycle_instances {
            out.push(PairSpec {
                id: format!("cycles-k{k}-{i}"),
                family: Family::Cycles,
                a: a.clone(),
                b: b.clone(),
            });
        }
    }
    if spec.family_instances > 0 {
        for family in [Family::CfiK3, Family::CfiK4, Family::GmPetersen] {
            let (a, b) = family_pair(family, 0)?;
            let (a, b) = (Arc::new(a), Arc::new(b));
            for i in 0..spec.family_instances {
                out.push(PairSpec {
                    id: format!("{family}-{i}"),
                    family,
                    a: a.clone(),
                    b: b.clone(),
                });
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    pub encoder: EncoderConfig,
    pub readout: ReadoutConfig,
    pub kind: ReadoutKind,
    pub seeds: usize,
    pub threshold: f64,
    pub master_seed: u64,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        Self {
            encoder: EncoderConfig::default(),
            readout: ReadoutConfig::default(),
            kind: ReadoutKind::Isotypic,
            seeds: 5,
            threshold: DEFAULT_THRESHOLD,
            master_seed: DEFAULT_MASTER_SEED,
        }
    }
}

impl ProtocolConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.threshold > 0.0 && self.threshold <= 1.0) {
            return Err(Error::InvalidArgument(
                "threshold must lie in (0, 1]".into(),
            ));
        }
        if self.seeds == 0 {
            return Err(Error::InvalidArgument(
                "at least one seed is required".into(),
            ));
        }
        self.encoder.validate()?;
        self.readout.validate()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    /// Projector construction for both base graphs.
    pub bundle_secs: f64,
    /// Encoding plus readout, summed over seeds.
    pub features_secs: f64,
    pub total_secs: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairReport {
    pub id: String,
    pub family: String,
    pub readout: ReadoutKind,
    pub cosines: Vec<f64>,
    pub mean_cosine: f64,
    pub separated: bool,
    /// Some seed produced a zero embedding; its cosine was recorded as 1.
    pub zero_norm: bool,
    /// One-sided one-sample t-test of the cosines against 1.
    pub p_value: Option<f64>,
    pub holm_reject: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub timings: Option<Timings>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
}

impl PairReport {
    fn failed(spec: &PairSpec, kind: ReadoutKind, err: String) -> Self {
        Self {
            id: spec.id.clone(),
            family: spec.family.to_string(),
            readout: kind,
            cosines: Vec::new(),
            mean_cosine: f64::NAN,
            separated: false,
            zero_norm: false,
            p_value: None,
            holm_reject: None,
            timings: None,
            error: Some(err),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyAggregate {
    pub family: String,
    pub count: usize,
    pub separated: usize,
    pub mean_cosine: f64,
    pub max_cosine: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub config: ProtocolConfig,
    pub pairs: Vec<PairReport>,
    pub families: Vec<FamilyAggregate>,
    pub separated: usize,
    pub total: usize,
    pub mean_cosine: f64,
    pub max_cosine: f64,
}

impl SuiteReport {
    fn from_pairs(config: ProtocolConfig, mut pairs: Vec<PairReport>) -> Self {
        let p: Vec<Option<f64>> = pairs.iter().map(|r| r.p_value).collect();
        let present: Vec<f64> = p.iter().flatten().copied().collect();
        let flags = holm_bonferroni(&present, 0.05).unwrap_or_default();
        let mut it = flags.into_iter();
        for (r, p) in pairs.iter_mut().zip(&p) {
            r.holm_reject = p.and_then(|_| it.next());
        }
        let mut families: Vec<FamilyAggregate> = Vec::new();
        for r in &pairs {
            if !families.iter().any(|f| f.family == r.family) {
                families.push(aggregate(
                    &r.family,
                    pairs.iter().filter(|x| x.family == r.family),
                ));
            }
        }
        let all = aggregate("all", pairs.iter());
        Self {
            config,
            separated: all.separated,
            total: all.count,
            mean_cosine: all.mean_cosine,
            max_cosine: all.max_cosine,
            pairs,
            families,
        }
    }

    /// Drops wall-clock timings so that output depends only on the inputs.
    pub fn without_timings(mut self) -> Self {
        for p in &mut self.pairs {
            p.timings = None;
        }
        self
    }

    /// Plain-text summary table, one line per family plus a total.
    pub fn table(&self) -> String {
        let mut s = format!(
            "readout: {}\n{:<12} {:>6} {:>10} {:>9} {:>9}\n",
            self.config.kind, "family", "pairs", "separated", "mean cos", "max cos"
        );
        let total = FamilyAggregate {
            family: "total".into(),
            count: self.total,
            separated: self.separated,
            mean_cosine: self.mean_cosine,
            max_cosine: self.max_cosine,
        };
        for f in self.families.iter().chain(std::iter::once(&total)) {
            let _ = writeln!(
                s,
                "{:<12} {:>6} {:>10} {:>9.3} {:>9.3}",
                f.family,
                f.count,
                format!("{}/{}", f.separated, f.count),
                f.mean_cosine,
                f.max_cosine
            );
        }
        s
    }

    /// One CSV row per pair.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "id",
            "family",
            "readout",
            "seeds",
            "mean_cosine",
            "min_cosine",
            "max_cosine",
            "separated",
            "zero_norm",
            "p_value",
            "holm_reject",
            "error",
        ])?;
        for r in &self.pairs {
            let min = r.cosines.iter().copied().fold(f64::INFINITY, f64::min);
            let max = r.cosines.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let opt = |x: Option<String>| x.unwrap_or_default();
            w.write_record([
                r.id.clone(),
                r.family.clone(),
                r.readout.to_string(),
                r.cosines.len().to_string(),
                format!("{:.9}", r.mean_cosine),
                format!("{min:.9}"),
                format!("{max:.9}"),
                r.separated.to_string(),
                r.zero_norm.to_string(),
                opt(r.p_value.map(|p| format!("{p:.6e}"))),
                opt(r.holm_reject.map(|b| b.to_string())),
                opt(r.error.clone()),
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("utf-8"))
    }
}

fn aggregate<'a>(name: &str, rows: impl Iterator<Item = &'a PairReport>) -> FamilyAggregate {
    let rows: Vec<&PairReport> = rows.filter(|r| r.error.is_none()).collect();
    let count = rows.len();
    let mean = if count == 0 {
        f64::NAN
    } else {
        rows.iter().map(|r| r.mean_cosine).sum::<f64>() / count as f64
    };
    FamilyAggregate {
        family: name.to_string(),
        count,
        separated: rows.iter().filter(|r| r.separated).count(),
        mean_cosine: mean,
        max_cosine: rows
            .iter()
            .map(|r| r.mean_cosine)
            .fold(f64::NEG_INFINITY, f64::max),
    }
}

/// Cosine of two readout vectors. Returns `None` when either is (numerically)
/// zero.
pub fn cosine(a: &[f64], b: &[f64]) -> Option<f64> {
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na < ZERO_NORM || nb < ZERO_NORM || a.len() != b.len() {
        return None;
    }
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    Some((dot / (na * nb)).clamp(-1.0, 1.0))
}

/// One-sided one-sample t-test of `xs` against `mu` with alternative
/// `mean < mu`. `None` with fewer than two samples.
pub fn t_test_below(xs: &[f64], mu: f64) -> Option<f64> {
    let m = xs.len();
    if m < 2 {
        return None;
    }
    let mean = xs.iter().sum::<f64>() / m as f64;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1) as f64;
    let se = (var / m as f64).sqrt();
    let scale = mean.abs().max(mu.abs()).max(1.0);
    if se <= 1e-15 * scale {
        return Some(if mean < mu - 1e-12 * scale { 0.0 } else { 1.0 });
    }
    let t = (mean - mu) / se;
    let dist = StudentsT::new(0.0, 1.0, (m - 1) as f64).ok()?;
    Some(dist.cdf(t))
}

/// Holm-Bonferroni step-down procedure. Flags are returned in input order.
pub fn holm_bonferroni(p_values: &[f64], alpha: f64) -> Result<Vec<bool>> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument("alpha must lie in (0, 1)".into()));
    }
    let m = p_values.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| p_values[a].total_cmp(&p_values[b]).then(a.cmp(&b)));
    let mut reject = vec![false; m];
    for (k, &i) in order.iter().enumerate() {
        if p_values[i] <= alpha / (m - k) as f64 {
            reject[i] = true;
        } else {
            break;
        }
    }
    Ok(reject)
}

struct SeedOutcome {
    cosine: Option<f64>,
    secs: f64,
}

fn task_seed(master: u64, pair_index: usize, seed_index: usize) -> u64 {
    derive_seed(master, &[pair_index as u64, seed_index as u64])
}

fn run_seed(
    a: &Graph,
    b: &Graph,
    bundles: Option<(&ProjectorBundle, &ProjectorBundle)>,
    cfg: &ProtocolConfig,
    seed: u64,
) -> Result<SeedOutcome> {
    let start = Instant::now();
    let enc = EncoderConfig {
        seed: derive_seed(seed, &[0]),
        ..cfg.encoder.clone()
    };
    let weights = init_encoder(&enc)?;
    let embed = |g: &Graph, bundle: Option<&ProjectorBundle>, stream: u64| {
        let mut rng = SplitMix64::new(derive_seed(seed, &[stream]));
        let p = Permutation::random(g.n(), &mut rng);
        let gp = g.permute(&p)?;
        let m = encode(&gp, &weights)?;
        let moved = bundle.map(|b| b.transport(&p)).transpose()?;
        apply_readout(cfg.kind, moved.as_ref(), &m, &cfg.readout)
    };
    let za = embed(a, bundles.map(|x| x.0), 1)?;
    let zb = embed(b, bundles.map(|x| x.1), 2)?;
    Ok(SeedOutcome {
        cosine: cosine(&za, &zb),
        secs: start.elapsed().as_secs_f64(),
    })
}

fn pair_report(
    spec: &PairSpec,
    cfg: &ProtocolConfig,
    outcomes: Vec<SeedOutcome>,
    bundle_secs: f64,
) -> PairReport {
    let zero_norm = outcomes.iter().any(|o| o.cosine.is_none());
    let cosines: Vec<f64> = outcomes.iter().map(|o| o.cosine.unwrap_or(1.0)).collect();
    let mean = cosines.iter().sum::<f64>() / cosines.len() as f64;
    let features_secs: f64 = outcomes.iter().map(|o| o.secs).sum();
    PairReport {
        id: spec.id.clone(),
        family: spec.family.to_string(),
        readout: cfg.kind,
        p_value: t_test_below(&cosines, 1.0),
        cosines,
        mean_cosine: mean,
        separated: mean < cfg.threshold,
        zero_norm,
        holm_reject: None,
        timings: Some(Timings {
            bundle_secs,
            features_secs,
            total_secs: bundle_secs + features_secs,
        }),
        error: None,
    }
}

/// Runs the protocol on a single pair. `pair_index` enters the seed path.
pub fn run_pair(
    a: &Graph,
    b: &Graph,
    cfg: &ProtocolConfig,
    pair_index: usize,
) -> Result<PairReport> {
    cfg.validate()?;
    let spec = PairSpec {
        id: format!("pair-{pair_index}"),
        family: Family::Cycles,
        a: Arc::new(a.clone()),
        b: Arc::new(b.clone()),
    };
    let mut report = run_specs(std::slice::from_ref(&spec), cfg, pair_index)?
        .pairs
        .remove(0);
    if let Some(err) = report.error.take() {
        return Err(Error::InvalidGraph(err));
    }
    report.family = "custom".into();
    Ok(report)
}

type BundleMap = HashMap<String, std::result::Result<(Arc<ProjectorBundle>, f64), String>>;

fn build_bundles(pairs: &[PairSpec], readout: &ReadoutConfig) -> BundleMap {
    let mut unique: Vec<(String, Arc<Graph>)> = Vec::new();
    for p in pairs {
        for g in [&p.a, &p.b] {
            let fp = graph_fingerprint(g);
            if !unique.iter().any(|(f, _)| *f == fp) {
                unique.push((fp, g.clone()));
            }
        }
    }
    let cache = BundleCache::new();
    unique
        .par_iter()
        .map(|(fp, g)| {
            let start = Instant::now();
            let built = cache
                .get_or_build(g, readout)
                .map(|b| (b, start.elapsed().as_secs_f64()))
                .map_err(|e| e.to_string());
            (fp.clone(), built)
        })
        .collect()
}

fn evaluate(
    pairs: &[PairSpec],
    cfg: &ProtocolConfig,
    bundles: Option<&BundleMap>,
    index_offset: usize,
) -> SuiteReport {
    let lookup = |g: &Graph| -> std::result::Result<(Arc<ProjectorBundle>, f64), String> {
        let map = bundles.expect("bundle map present for bundle readouts");
        map.get(&graph_fingerprint(g))
            .cloned()
            .unwrap_or_else(|| Err("bundle missing".into()))
    };
    let tasks: Vec<(usize, usize)> = (0..pairs.len())
        .flat_map(|p| (0..cfg.seeds).map(move |s| (p, s)))
        .collect();
    let outcomes: Vec<std::result::Result<SeedOutcome, String>> = tasks
        .par_iter()
        .map(|&(p, s)| {
            let spec = &pairs[p];
            let seed = task_seed(cfg.master_seed, index_offset + p, s);
            let owned = if cfg.kind.needs_bundle() {
                Some((lookup(&spec.a)?.0, lookup(&spec.b)?.0))
            } else {
                None
            };
            let refs = owned.as_ref().map(|(x, y)| (x.as_ref(), y.as_ref()));
            run_seed(&spec.a, &spec.b, refs, cfg, seed).map_err(|e| e.to_string())
        })
        .collect();
    let mut it = outcomes.into_iter();
    let reports = pairs
        .iter()
        .map(|spec| {
            let mine: Vec<_> = it.by_ref().take(cfg.seeds).collect();
            let bundle_secs = if cfg.kind.needs_bundle() {
                [&spec.a, &spec.b]
                    .iter()
                    .filter_map(|g| lookup(g).ok().map(|x| x.1))
                    .sum()
            } else {
                0.0
            };
            match mine.into_iter().collect::<std::result::Result<Vec<_>, _>>() {
                Ok(outs) => pair_report(spec, cfg, outs, bundle_secs),
                Err(e) => PairReport::failed(spec, cfg.kind, e),
            }
        })
        .collect();
    SuiteReport::from_pairs(cfg.clone(), reports)
}

fn run_specs(pairs: &[PairSpec], cfg: &ProtocolConfig, index_offset: usize) -> Result<SuiteReport> {
    cfg.validate()?;
    let bundles = cfg
        .kind
        .needs_bundle()
        .then(|| build_bundles(pairs, &cfg.readout));
    Ok(evaluate(pairs, cfg, bundles.as_ref(), index_offset))
}

/// Runs every pair. A failing pair is reported with its error and the rest
/// of the suite continues.
pub fn run_suite(pairs: &[PairSpec], cfg: &ProtocolConfig) -> Result<SuiteReport> {
    run_specs(pairs, cfg, 0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub max_blocks: usize,
    pub separated: usize,
    pub total: usize,
    pub mean_cosine: f64,
}

/// Reruns the suite for each block budget. Projectors are built once at the
/// largest budget; smaller budgets keep a prefix of the same sorted blocks.
pub fn block_sweep(
    pairs: &[PairSpec],
    cfg: &ProtocolConfig,
    budgets: &[usize],
) -> Result<Vec<SweepRow>> {
    if budgets.iter().any(|&b| b == 0) {
        return Err(Error::InvalidArgument(
            "block budgets must be positive".into(),
        ));
    }
    let Some(&largest) = budgets.iter().max() else {
        return Ok(Vec::new());
    };
    let mut base = cfg.clone();
    base.readout.max_blocks = largest;
    base.validate()?;
    let full = build_bundles(pairs, &base.readout);
    budgets
        .iter()
        .map(|&b| {
            let truncated: BundleMap = full
                .iter()
                .map(|(k, v)| {
                    let v = v
                        .clone()
                        .map(|(bundle, secs)| (Arc::new(bundle.truncated(b)), secs));
                    (k.clone(), v)
                })
                .collect();
            let mut run = base.clone();
            run.readout.max_blocks = b;
            let report = evaluate(pairs, &run, Some(&truncated), 0);
            Ok(SweepRow {
                max_blocks: b,
                separated: report.separated,
                total: report.total,
                mean_cosine: report.mean_cosine,
            })
        })
        .collect()
}

pub fn sweep_to_csv(rows: &[SweepRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["max_blocks", "separated", "total", "mean_cosine"])?;
    for r in rows {
        w.write_record([
            r.max_blocks.to_string(),
            r.separated.to_string(),
            r.total.to_string(),
            format!("{:.9}", r.mean_cosine),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("utf-8"))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub n: usize,
    pub count: usize,
    /// Graphs whose automorphism enumeration hit the cap.
    pub capped: usize,
    pub bundle_median_ms: f64,
    pub bundle_p90_ms: f64,
    pub features_median_ms: f64,
    pub features_p90_ms: f64,
    pub total_median_ms: f64,
    pub total_p90_ms: f64,
}

/// Median (mean of the two middle values for even length) and nearest-rank
/// 90th percentile.
pub fn median_p90(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len();
    let median = if m % 2 == 1 {
        v[m / 2]
    } else {
        (v[m / 2 - 1] + v[m / 2]) / 2.0
    };
    let rank = ((0.9 * m as f64).ceil() as usize).clamp(1, m);
    (median, v[rank - 1])
}

/// Times projector construction and feature extraction (encoding plus
/// isotypic readout) on `count` Erdős-Rényi graphs per `n`. Runs
/// sequentially so that timings are not distorted by sharing cores.
pub fn bench_er(
    ns: &[usize],
    p: f64,
    count: usize,
    seed: u64,
    cfg: &ProtocolConfig,
) -> Result<Vec<BenchRow>> {
    cfg.validate()?;
    if count == 0 {
        return Ok(Vec::new());
    }
    let weights = init_encoder(&cfg.encoder)?;
    let mut rows = Vec::new();
    for &n in ns {
        let mut bundle_ms = Vec::with_capacity(count);
        let mut feat_ms = Vec::with_capacity(count);
        let mut total_ms = Vec::with_capacity(count);
        let mut capped = 0;
        for i in 0..count {
            let g = gen_er(n, p, derive_seed(seed, &[n as u64, i as u64]))?;
            let t0 = Instant::now();
            let bundle = prepare_bundle(&g, &cfg.readout)?;
            let t1 = Instant::now();
            let m = encode(&g, &weights)?;
            let z = isotypic_readout(&bundle, &m, &cfg.readout)?;
            let t2 = Instant::now();
            std::hint::black_box(z);
            capped += usize::from(bundle.capped);
            let b = (t1 - t0).as_secs_f64() * 1e3;
            let f = (t2 - t1).as_secs_f64() * 1e3;
            bundle_ms.push(b);
            feat_ms.push(f);
            total_ms.push(b + f);
        }
        let (bm, bp) = median_p90(&bundle_ms);
        let (fm, fp) = median_p90(&feat_ms);
        let (tm, tp) = median_p90(&total_ms);
        rows.push(BenchRow {
            n,
            count,
            capped,
            bundle_median_ms: bm,
            bundle_p90_ms: bp,
            features_median_ms: fm,
            features_p90_ms: fp,
            total_median_ms: tm,
            total_p90_ms: tp,
        });
    }
    Ok(rows)
}

pub fn bench_to_csv(rows: &[BenchRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "n",
        "count",
        "capped",
        "bundle_median_ms",
        "bundle_p90_ms",
        "features_median_ms",
        "features_p90_ms",
        "total_median_ms",
        "total_p90_ms",
    ])?;
    for r in rows {
        w.write_record([
            r.n.to_string(),
            r.count.to_string(),
            r.capped.to_string(),
            format!("{:.4}", r.bundle_median_ms),
            format!("{:.4}", r.bundle_p90_ms),
            format!("{:.4}", r.features_median_ms),
            format!("{:.4}", r.features_p90_ms),
            format!("{:.4}", r.total_median_ms),
            format!("{:.4}", r.total_p90_ms),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("utf-8"))
}

/// graph6 lines for every distinct graph of a family, `a` before `b`.
pub fn family_graph6(family: Family, ks: &[usize]) -> Result<Vec<String>> {
    let pairs = match family {
        Family::Cycles => ks
            .iter()
            .map(|&k| family_pair(family, k))
            .collect::<Result<Vec<_>>>()?,
        _ => vec![family_pair(family, 0)?],
    };
    let mut out = Vec::new();
    for (a, b) in pairs {
        out.push(to_graph6_string(&a)?);
        out.push(to_graph6_string(&b)?);
    }
    Ok(out)
}
