//! Undirected simple graphs and node permutations.

use std::collections::VecDeque;
use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::SymMatrix;

/// Undirected simple graph on nodes `0..n` with a dense adjacency bitmap
/// and sorted neighbour lists.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    adj: Vec<bool>,
    neighbors: Vec<Vec<usize>>,
}

impl Graph {
    /// The edgeless graph on `n` nodes.
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            adj: vec![false; n * n],
            neighbors: vec![Vec::new(); n],
        }
    }

    /// Builds a graph from an edge list. Duplicate edges are merged; self-loops
    /// and out-of-range endpoints are rejected.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::empty(n);
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        if u >= self.n || v >= self.n {
            return Err(Error::InvalidGraph(format!(
                "edge ({u}, {v}) out of range for n = {}",
                self.n
            )));
        }
        if u == v {
            return Err(Error::InvalidGraph(format!("self-loop at node {u}")));
        }
        if !self.adj[u * self.n + v] {
            self.adj[u * self.n + v] = true;
            self.adj[v * self.n + u] = true;
            insert_sorted(&mut self.neighbors[u], v);
            insert_sorted(&mut self.neighbors[v], u);
        }
        Ok(())
    }

    pub(crate) fn remove_edge(&mut self, u: usize, v: usize) {
        if self.adj[u * self.n + v] {
            self.adj[u * self.n + v] = false;
            self.adj[v * self.n + u] = false;
            self.neighbors[u].retain(|&w| w != v);
            self.neighbors[v].retain(|&w| w != u);
        }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u * self.n + v]
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[v]
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.neighbors[v].len()
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Edges `(u, v)` with `u < v` in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for u in 0..self.n {
            for &v in &self.neighbors[u] {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn degree_sequence(&self) -> Vec<usize> {
        let mut d: Vec<usize> = (0..self.n).map(|v| self.degree(v)).collect();
        d.sort_unstable();
        d
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        self.bfs_distances(0).iter().all(|&d| d != UNREACHABLE)
    }

    /// Hop distances from `src`; unreachable nodes get [`UNREACHABLE`].
    pub fn bfs_distances(&self, src: usize) -> Vec<usize> {
        let mut dist = vec![UNREACHABLE; self.n];
        let mut queue = VecDeque::new();
        dist[src] = 0;
        queue.push_back(src);
        while let Some(u) = queue.pop_front() {
            for &v in &self.neighbors[u] {
                if dist[v] == UNREACHABLE {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// All-pairs hop distances, row-major.
    pub fn distance_matrix(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.n * self.n);
        for s in 0..self.n {
            out.extend(self.bfs_distances(s));
        }
        out
    }

    /// Relabels nodes: node `i` becomes `perm[i]`, so `(i, j)` is an edge of
    /// `self` iff `(perm[i], perm[j])` is an edge of the result.
    pub fn permute(&self, perm: &Permutation) -> Result<Graph> {
        if perm.len() != self.n {
            return Err(Error::Dimension(format!(
                "permutation of length {} applied to graph with {} nodes",
                perm.len(),
                self.n
            )));
        }
        let mut g = Graph::empty(self.n);
        for (u, v) in self.edges() {
            g.add_edge(perm.apply(u), perm.apply(v))?;
        }
        Ok(g)
    }

    pub fn adjacency(&self) -> SymMatrix {
        let data = self
            .adj
            .iter()
            .map(|&b| if b { 1.0 } else { 0.0 })
            .collect();
        SymMatrix::from_row_major_unchecked(self.n, data)
    }

    /// Combinatorial Laplacian `D - A`.
    pub fn laplacian(&self) -> SymMatrix {
        let n = self.n;
        let mut data = vec![0.0; n * n];
        for u in 0..n {
            data[u * n + u] = self.degree(u) as f64;
            for &v in &self.neighbors[u] {
                data[u * n + v] = -1.0;
            }
        }
        SymMatrix::from_row_major_unchecked(n, data)
    }

    /// Disjoint union; nodes of `other` are shifted by `self.n()`.
    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let off = self.n;
        let mut g = Graph::empty(self.n + other.n);
        for (u, v) in self.edges() {
            g.add_edge(u, v).expect("in range");
        }
        for (u, v) in other.edges() {
            g.add_edge(u + off, v + off).expect("in range");
        }
        g
    }

    pub fn complement(&self) -> Graph {
        let mut g = Graph::empty(self.n);
        for u in 0..self.n {
            for v in (u + 1)..self.n {
                if !self.has_edge(u, v) {
                    g.add_edge(u, v).expect("in range");
                }
            }
        }
        g
    }

    /// Plain edge-list text: first line `n`, then one `u v` pair per line.
    pub fn to_edge_list(&self) -> String {
        let mut s = format!("{}\n", self.n);
        for (u, v) in self.edges() {
            s.push_str(&format!("{u} {v}\n"));
        }
        s
    }

    pub fn parse_edge_list(text: &str) -> Result<Graph> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (line_no, header) = lines.next().ok_or(Error::EdgeList {
            line: 1,
            reason: "missing node count".into(),
        })?;
        let n: usize = header.parse().map_err(|_| Error::EdgeList {
            line: line_no,
            reason: format!("bad node count {header:?}"),
        })?;
        let mut g = Graph::empty(n);
        for (line, l) in lines {
            let parts: Vec<&str> = l.split_whitespace().collect();
            let parse = |s: &str| {
                s.parse::<usize>().map_err(|_| Error::EdgeList {
                    line,
                    reason: format!("bad node index {s:?}"),
                })
            };
            if parts.len() != 2 {
                return Err(Error::EdgeList {
                    line,
                    reason: "expected two node indices".into(),
                });
            }
            let (u, v) = (parse(parts[0])?, parse(parts[1])?);
            g.add_edge(u, v).map_err(|e| Error::EdgeList {
                line,
                reason: e.to_string(),
            })?;
        }
        Ok(g)
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.n)
            .field("edges", &self.edges())
            .finish()
    }
}

pub const UNREACHABLE: usize = usize::MAX;

fn insert_sorted(v: &mut Vec<usize>, x: usize) {
    if let Err(pos) = v.binary_search(&x) {
        v.insert(pos, x);
    }
}

/// A bijection on `0..n`, stored as the image of each index.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(mapping: Vec<usize>) -> Result<Self> {
        let n = mapping.len();
        let mut seen = vec![false; n];
        for &x in &mapping {
            if x >= n || seen[x] {
                return Err(Error::InvalidPermutation(format!(
                    "{mapping:?} is not a bijection on 0..{n}"
                )));
            }
            seen[x] = true;
        }
        Ok(Self(mapping))
    }

    pub(crate) fn from_vec_unchecked(mapping: Vec<usize>) -> Self {
        debug_assert!(Self::new(mapping.clone()).is_ok());
        Self(mapping)
    }

    pub fn identity(n: usize) -> Self {
        Self((0..n).collect())
    }

    pub fn random(n: usize, rng: &mut crate::rng::SplitMix64) -> Self {
        Self(rng.permutation(n))
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &x)| i == x)
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.0.len()];
        for (i, &x) in self.0.iter().enumerate() {
            inv[x] = i;
        }
        Self(inv)
    }

    /// `self.then(other)` maps `i` to `other(self(i))`.
    pub fn then(&self, other: &Permutation) -> Self {
        assert_eq!(self.len(), other.len(), "permutation lengths differ");
        Self(self.0.iter().map(|&x| other.0[x]).collect())
    }

    /// Whether the permutation maps the edge set of `g` onto itself.
    pub fn preserves(&self, g: &Graph) -> bool {
        self.len() == g.n()
            && g.edges()
                .into_iter()
                .all(|(u, v)| g.has_edge(self.apply(u), self.apply(v)))
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation({:?})", self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> Graph {
        Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap()
    }

    #[test]
    fn rejects_self_loops_and_out_of_range() {
        assert!(Graph::from_edges(3, &[(1, 1)]).is_err());
        assert!(Graph::from_edges(3, &[(0, 3)]).is_err());
    }

    #[test]
    fn duplicate_edges_merge() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 0), (0, 1)]).unwrap();
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn permute_identity_and_path_swap() {
        let k3 = Graph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(k3.permute(&Permutation::identity(3)).unwrap(), k3);

        // swapping the endpoints of 0-1-2 maps the edge set onto itself
        let p = path3();
        let swap = Permutation::new(vec![2, 1, 0]).unwrap();
        assert_eq!(p.permute(&swap).unwrap().edges(), vec![(0, 1), (1, 2)]);

        // moving the centre: 0->1, 1->0 gives edges {1,0},{0,2}
        let mv = Permutation::new(vec![1, 0, 2]).unwrap();
        assert_eq!(p.permute(&mv).unwrap().edges(), vec![(0, 1), (0, 2)]);
    }

    #[test]
    fn permute_length_mismatch() {
        assert!(path3().permute(&Permutation::identity(4)).is_err());
    }

    #[test]
    fn k2_matrices() {
        let k2 = Graph::from_edges(2, &[(0, 1)]).unwrap();
        assert_eq!(k2.adjacency().as_slice(), &[0.0, 1.0, 1.0, 0.0]);
        assert_eq!(k2.laplacian().as_slice(), &[1.0, -1.0, -1.0, 1.0]);
    }

    #[test]
    fn permutation_algebra() {
        let p = Permutation::new(vec![2, 0, 3, 1]).unwrap();
        assert!(p.then(&p.inverse()).is_identity());
        assert!(p.inverse().then(&p).is_identity());
        assert!(Permutation::new(vec![0, 0, 1]).is_err());
        assert!(Permutation::new(vec![0, 3, 1]).is_err());
    }

    #[test]
    fn edge_list_round_trip() {
        let g = Graph::from_edges(5, &[(0, 1), (3, 4), (1, 4)]).unwrap();
        let text = g.to_edge_list();
        assert_eq!(Graph::parse_edge_list(&text).unwrap(), g);
        assert!(Graph::parse_edge_list("3\n0 5\n").is_err());
        assert!(Graph::parse_edge_list("3\n0\n").is_err());
        assert!(Graph::parse_edge_list("").is_err());
    }

    #[test]
    fn distances() {
        let g = Graph::from_edges(4, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(g.bfs_distances(0), vec![0, 1, 2, UNREACHABLE]);
        assert!(!g.is_connected());
    }
}
