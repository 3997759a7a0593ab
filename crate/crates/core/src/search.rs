//! Individualisation-refinement backtracking over graph isomorphisms.
//!
//! Both sides are refined in lockstep with a shared colour namespace. At each
//! node of the search tree the first non-singleton cell is chosen, its
//! smallest left vertex is individualised, and every right vertex of the same
//! cell is tried in ascending order. Leaves (discrete colourings) give a
//! candidate bijection which is checked against the edge sets.

use crate::error::{Error, Result};
use crate::graph::{Graph, Permutation};
use crate::wl::refine_joint;

/// Largest graph accepted by [`is_isomorphic`].
pub const MAX_ISOMORPHISM_NODES: usize = 64;

/// Exact isomorphism test for graphs with at most 64 nodes.
///
/// Graphs of different order are reported as non-isomorphic; larger inputs are
/// rejected rather than attempted.
pub fn is_isomorphic(g: &Graph, h: &Graph) -> Result<bool> {
    if g.n() != h.n() {
        return Ok(false);
    }
    if g.n() > MAX_ISOMORPHISM_NODES {
        return Err(Error::Unsupported(format!(
            "isomorphism test is limited to {MAX_ISOMORPHISM_NODES} nodes, got {}",
            g.n()
        )));
    }
    Ok(find_isomorphism(g, h).is_some())
}

/// Some isomorphism `π` with `h = g.permute(π)`, if one exists.
pub fn find_isomorphism(g: &Graph, h: &Graph) -> Option<Permutation> {
    if g.n() != h.n() || g.edge_count() != h.edge_count() {
        return None;
    }
    if g.degree_sequence() != h.degree_sequence() {
        return None;
    }
    let mut found = None;
    visit_isomorphisms(g, h, |p| {
        found = Some(p);
        false
    });
    found
}

/// Calls `visit` for each isomorphism `g -> h` until it returns `false`.
pub(crate) fn visit_isomorphisms(g: &Graph, h: &Graph, mut visit: impl FnMut(Permutation) -> bool) {
    let n = g.n();
    if n != h.n() {
        return;
    }
    let mut colors = [vec![0u32; n], vec![0u32; n]];
    if !refine_joint(&[g, h], &mut colors) {
        return;
    }
    let [left, right] = colors;
    let mut search = Search {
        g,
        h,
        visit: &mut visit,
    };
    search.descend(left, right);
}

struct Search<'a, F> {
    g: &'a Graph,
    h: &'a Graph,
    visit: &'a mut F,
}

impl<F: FnMut(Permutation) -> bool> Search<'_, F> {
    /// Returns `false` when the visitor asked to stop.
    fn descend(&mut self, left: Vec<u32>, right: Vec<u32>) -> bool {
        let n = left.len();
        let Some(target) = first_nonsingleton_cell(&left) else {
            return self.leaf(&left, &right);
        };
        let v = (0..n)
            .find(|&v| left[v] == target)
            .expect("cell is non-empty");
        let fresh = left.iter().copied().max().map_or(0, |m| m + 1);
        for w in (0..n).filter(|&w| right[w] == target) {
            let mut l = left.clone();
            let mut r = right.clone();
            l[v] = fresh;
            r[w] = fresh;
            let mut pair = [l, r];
            if !refine_joint(&[self.g, self.h], &mut pair) {
                continue;
            }
            let [l, r] = pair;
            if !self.descend(l, r) {
                return false;
            }
        }
        true
    }

    fn leaf(&mut self, left: &[u32], right: &[u32]) -> bool {
        let n = left.len();
        let mut by_color = vec![usize::MAX; n.max(1) * 2 + 1];
        let max_color = right.iter().copied().max().unwrap_or(0) as usize;
        if by_color.len() <= max_color {
            by_color.resize(max_color + 1, usize::MAX);
        }
        for (w, &c) in right.iter().enumerate() {
            by_color[c as usize] = w;
        }
        let mapping: Vec<usize> = left.iter().map(|&c| by_color[c as usize]).collect();
        let p = Permutation::from_vec_unchecked(mapping);
        let ok = self
            .g
            .edges()
            .into_iter()
            .all(|(a, b)| self.h.has_edge(p.apply(a), p.apply(b)));
        if ok {
            (self.visit)(p)
        } else {
            true
        }
    }
}

fn first_nonsingleton_cell(colors: &[u32]) -> Option<u32> {
    let max = *colors.iter().max()? as usize;
    let mut count = vec![0usize; max + 1];
    for &c in colors {
        count[c as usize] += 1;
    }
    count.iter().position(|&k| k > 1).map(|c| c as u32)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> Graph {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Graph::from_edges(n, &edges).unwrap()
    }

    #[test]
    fn relabelled_graph_is_isomorphic() {
        let g = Graph::from_edges(6, &[(0, 1), (1, 2), (2, 3), (1, 4), (4, 5)]).unwrap();
        let p = Permutation::new(vec![5, 3, 1, 0, 2, 4]).unwrap();
        let h = g.permute(&p).unwrap();
        let iso = find_isomorphism(&g, &h).unwrap();
        assert_eq!(g.permute(&iso).unwrap(), h);
    }

    #[test]
    fn two_triangles_vs_hexagon() {
        let two_c3 = cycle(3).disjoint_union(&cycle(3));
        assert!(!is_isomorphic(&two_c3, &cycle(6)).unwrap());
    }

    #[test]
    fn size_mismatch_and_limit() {
        assert!(!is_isomorphic(&cycle(5), &cycle(6)).unwrap());
        assert!(is_isomorphic(&cycle(65), &cycle(65)).is_err());
    }

    #[test]
    fn counts_isomorphisms_of_c5() {
        let mut count = 0;
        visit_isomorphisms(&cycle(5), &cycle(5), |_| {
            count += 1;
            true
        });
        assert_eq!(count, 10);
    }
}
