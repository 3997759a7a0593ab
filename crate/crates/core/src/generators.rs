//! Named graphs and the WL-hard pair families.

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng::SplitMix64;
use crate::search::is_isomorphic;

pub fn cycle(n: usize) -> Result<Graph> {
    if n < 3 {
        return Err(Error::InvalidArgument(format!(
            "cycle needs n >= 3, got {n}"
        )));
    }
    let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    Graph::from_edges(n, &edges)
}

pub fn complete(n: usize) -> Graph {
    let mut g = Graph::empty(n);
    for u in 0..n {
        for v in (u + 1)..n {
            g.add_edge(u, v).expect("in range");
        }
    }
    g
}

pub fn path(n: usize) -> Graph {
    let mut g = Graph::empty(n);
    for i in 1..n {
        g.add_edge(i - 1, i).expect("in range");
    }
    g
}

/// `(2·C_k, C_2k)`: two disjoint `k`-cycles on `0..k` and `k..2k`, and one
/// `2k`-cycle `0-1-…-(2k-1)-0`.
pub fn gen_cycle_pair(k: usize) -> Result<(Graph, Graph)> {
    if k < 3 {
        return Err(Error::InvalidArgument(format!(
            "cycle pair needs k >= 3, got {k}"
        )));
    }
    let c = cycle(k)?;
    Ok((c.disjoint_union(&c), cycle(2 * k)?))
}

/// Outer 5-cycle `0..5`, spokes `i - i+5`, inner pentagram on `5..10`.
pub fn gen_petersen() -> Graph {
    let mut g = Graph::empty(10);
    for i in 0..5 {
        g.add_edge(i, (i + 1) % 5).expect("in range");
        g.add_edge(i, i + 5).expect("in range");
        g.add_edge(5 + i, 5 + (i + 2) % 5).expect("in range");
    }
    g
}

/// Cayley graph on `Z4 x Z4` with connection set `{±(1,0), ±(0,1), ±(1,1)}`;
/// node `(a, b)` has index `4a + b`.
pub fn gen_shrikhande() -> Graph {
    let idx = |a: usize, b: usize| 4 * (a % 4) + (b % 4);
    let mut g = Graph::empty(16);
    for a in 0..4 {
        for b in 0..4 {
            for (da, db) in [(1, 0), (0, 1), (1, 1)] {
                g.add_edge(idx(a, b), idx(a + da, b + db))
                    .expect("in range");
            }
        }
    }
    g
}

/// Rook's graph on a 4x4 board: cells adjacent iff they share a row or column.
pub fn gen_rook4() -> Graph {
    let mut g = Graph::empty(16);
    for u in 0..16 {
        for v in (u + 1)..16 {
            if u / 4 == v / 4 || u % 4 == v % 4 {
                g.add_edge(u, v).expect("in range");
            }
        }
    }
    g
}

/// `G(n, p)`: each pair `i < j`, visited in lexicographic order, is an edge
/// iff the next uniform draw is below `p`.
pub fn gen_er(n: usize, p: f64, seed: u64) -> Result<Graph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!(
            "edge probability {p} outside [0, 1]"
        )));
    }
    let mut rng = SplitMix64::new(seed);
    let mut g = Graph::empty(n);
    for u in 0..n {
        for v in (u + 1)..n {
            if rng.next_f64() < p {
                g.add_edge(u, v)?;
            }
        }
    }
    Ok(g)
}

/// Bipartite double cover `G x K2`: nodes `v` and `v + n`, with `u ~ v + n`
/// and `v ~ u + n` for every edge `uv`.
pub fn bipartite_double(g: &Graph) -> Graph {
    let n = g.n();
    let mut d = Graph::empty(2 * n);
    for (u, v) in g.edges() {
        d.add_edge(u, v + n).expect("in range");
        d.add_edge(v, u + n).expect("in range");
    }
    d
}

/// Largest base-graph degree accepted by the CFI construction.
pub const CFI_MAX_DEGREE: usize = 4;

/// Cai-Fürer-Immerman graph over `base`, twisted along the listed base edges
/// (indices into `base.edges()`).
///
/// Node layout: for each base vertex in order, one gadget node per even
/// subset of its incident edges (subsets enumerated as bitmasks over the
/// incident edges in base-edge order); then for each base edge `e = (u, v)`
/// the four nodes `a_e^u, b_e^u, a_e^v, b_e^v`. A gadget node `X` at `v`
/// connects to `a_e^v` if `e ∈ X` and to `b_e^v` otherwise. Untwisted edges
/// link `a^u - a^v` and `b^u - b^v`; twisted edges cross them.
pub fn cfi_graph(base: &Graph, twisted: &[usize]) -> Result<Graph> {
    if base.n() == 0 || !base.is_connected() {
        return Err(Error::InvalidGraph(
            "CFI base graph must be connected".into(),
        ));
    }
    let edges = base.edges();
    if edges.is_empty() {
        return Err(Error::InvalidGraph(
            "CFI base graph needs at least one edge".into(),
        ));
    }
    if let Some(v) = (0..base.n()).find(|&v| base.degree(v) > CFI_MAX_DEGREE) {
        return Err(Error::Unsupported(format!(
            "CFI base vertex {v} has degree {} > {CFI_MAX_DEGREE}",
            base.degree(v)
        )));
    }
    if let Some(&e) = twisted.iter().find(|&&e| e >= edges.len()) {
        return Err(Error::InvalidArgument(format!(
            "twist edge {e} out of range"
        )));
    }

    let incident: Vec<Vec<usize>> = (0..base.n())
        .map(|v| {
            edges
                .iter()
                .enumerate()
                .filter(|(_, &(a, b))| a == v || b == v)
                .map(|(i, _)| i)
                .collect()
        })
        .collect();

    // gadget nodes: (vertex, bitmask over incident edges)
    let mut gadgets: Vec<(usize, u32)> = Vec::new();
    for (v, inc) in incident.iter().enumerate() {
        for mask in 0u32..(1 << inc.len()) {
            if mask.count_ones() % 2 == 0 {
                gadgets.push((v, mask));
            }
        }
    }
    let edge_base = gadgets.len();
    let n = edge_base + 4 * edges.len();
    // (a, b) node ids of edge e on the side of endpoint v
    let ends = |e: usize, v: usize| -> (usize, usize) {
        let side = if edges[e].0 == v { 0 } else { 2 };
        let a = edge_base + 4 * e + side;
        (a, a + 1)
    };

    let mut g = Graph::empty(n);
    for (id, &(v, mask)) in gadgets.iter().enumerate() {
        for (bit, &e) in incident[v].iter().enumerate() {
            let (a, b) = ends(e, v);
            let target = if mask & (1 << bit) != 0 { a } else { b };
            g.add_edge(id, target)?;
        }
    }
    for (e, &(u, v)) in edges.iter().enumerate() {
        let (au, bu) = ends(e, u);
        let (av, bv) = ends(e, v);
        let flips = twisted.iter().filter(|&&t| t == e).count() % 2 == 1;
        if flips {
            g.add_edge(au, bv)?;
            g.add_edge(bu, av)?;
        } else {
            g.add_edge(au, av)?;
            g.add_edge(bu, bv)?;
        }
    }
    Ok(g)
}

/// `(untwisted, twisted)` CFI pair over `base`, twisting the first base edge.
pub fn gen_cfi_pair(base: &Graph) -> Result<(Graph, Graph)> {
    Ok((cfi_graph(base, &[])?, cfi_graph(base, &[0])?))
}

/// Checks Godsil-McKay validity of the switching set `c` and returns the
/// vertices outside `c` that have exactly `|c|/2` neighbours in it.
pub fn gm_switching_vertices(g: &Graph, c: &[usize]) -> Result<Vec<usize>> {
    let n = g.n();
    let mut in_c = vec![false; n];
    for &v in c {
        if v >= n || in_c[v] {
            return Err(Error::InvalidArgument(format!(
                "switching set must hold distinct nodes below {n}"
            )));
        }
        in_c[v] = true;
    }
    if c.is_empty() {
        return Err(Error::InvalidArgument("switching set is empty".into()));
    }
    let inner = |v: usize| c.iter().filter(|&&w| g.has_edge(v, w)).count();
    let d0 = inner(c[0]);
    if c.iter().any(|&v| inner(v) != d0) {
        return Err(Error::IrregularSwitchingSet);
    }
    let size = c.len();
    let mut switched = Vec::new();
    for v in (0..n).filter(|&v| !in_c[v]) {
        let k = inner(v);
        if k == 0 || k == size {
            continue;
        }
        if 2 * k == size {
            switched.push(v);
        } else {
            return Err(Error::InvalidSwitching {
                vertex: v,
                count: k,
                size,
            });
        }
    }
    Ok(switched)
}

/// Godsil-McKay switching: every vertex outside `c` with exactly half of its
/// possible neighbours in `c` has its adjacency to `c` complemented.
pub fn gm_switch(g: &Graph, c: &[usize]) -> Result<Graph> {
    let switched = gm_switching_vertices(g, c)?;
    let mut h = g.clone();
    for &v in &switched {
        for &w in c {
            if g.has_edge(v, w) {
                h.remove_edge(v, w);
            } else {
                h.add_edge(v, w)?;
            }
        }
    }
    Ok(h)
}

/// Largest graph searched by [`find_gm_partition`].
pub const GM_SEARCH_MAX_NODES: usize = 24;
/// Largest switching set tried once `n` exceeds 12.
pub const GM_SEARCH_MAX_SET: usize = 8;

/// Searches switching sets in order of size, then lexicographically, for the
/// first valid set whose switch is not isomorphic to `g`. Exhaustive for
/// `n <= 12`; above that only sets of at most eight vertices are tried.
pub fn find_gm_partition(g: &Graph) -> Result<Option<Vec<usize>>> {
    let n = g.n();
    if n > GM_SEARCH_MAX_NODES {
        return Err(Error::Unsupported(format!(
            "switching search is limited to {GM_SEARCH_MAX_NODES} nodes, got {n}"
        )));
    }
    let max_size = if n <= 12 { n - 1 } else { GM_SEARCH_MAX_SET };
    for size in 1..=max_size {
        let mut found = None;
        for_each_subset(n, size, &mut |c| {
            let Ok(switched) = gm_switching_vertices(g, c) else {
                return true;
            };
            if switched.is_empty() {
                return true;
            }
            let h = gm_switch(g, c).expect("validated");
            if !is_isomorphic(g, &h).unwrap_or(true) {
                found = Some(c.to_vec());
                return false;
            }
            true
        });
        if found.is_some() {
            return Ok(found);
        }
    }
    Ok(None)
}

fn for_each_subset(n: usize, k: usize, f: &mut impl FnMut(&[usize]) -> bool) {
    fn rec(
        start: usize,
        n: usize,
        k: usize,
        cur: &mut Vec<usize>,
        f: &mut impl FnMut(&[usize]) -> bool,
    ) -> bool {
        if cur.len() == k {
            return f(cur);
        }
        for v in start..n {
            if n - v < k - cur.len() {
                break;
            }
            cur.push(v);
            let go_on = rec(v + 1, n, k, cur, f);
            cur.pop();
            if !go_on {
                return false;
            }
        }
        true
    }
    rec(0, n, k, &mut Vec::with_capacity(k), f);
}
