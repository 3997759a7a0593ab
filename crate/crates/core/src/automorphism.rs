//! Automorphism enumeration, orbits of the induced action on ordered node
//! pairs, and the generic equivariant operator built from them.

use std::collections::HashSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Graph, Permutation, UNREACHABLE};
use crate::linalg::{Matrix, SymMatrix};
use crate::rng::SplitMix64;
use crate::search::visit_isomorphisms;

pub const DEFAULT_AUTOMORPHISM_CAP: usize = 50_000;

/// Enumerated automorphisms of a graph.
///
/// Always contains the identity and is closed under inverses. When `capped`
/// is false the set is the full group; otherwise it is a subset of at most
/// `2 * cap` elements and every invariance statement derived from it holds
/// only for the subgroup it generates.
#[derive(Clone, Debug)]
pub struct AutomorphismSet {
    pub perms: Vec<Permutation>,
    pub capped: bool,
    pub cap: usize,
}

impl AutomorphismSet {
    /// Wraps an explicit list of permutations of `0..n` (e.g. an abstract
    /// group action) without any graph. The caller asserts it is a group.
    pub fn from_group(perms: Vec<Permutation>) -> Result<Self> {
        let n = perms.first().map_or(0, Permutation::len);
        if perms.iter().any(|p| p.len() != n) {
            return Err(Error::Dimension("permutations of different lengths".into()));
        }
        let cap = perms.len();
        let set = Self {
            perms,
            capped: false,
            cap,
        };
        if !set.is_closed() {
            return Err(Error::InvalidArgument(
                "permutations are not closed under composition".into(),
            ));
        }
        Ok(set)
    }

    /// Group generated by `generators`, by closure.
    pub fn generated_by(generators: &[Permutation]) -> Result<Self> {
        let n = generators.first().map_or(0, Permutation::len);
        let id = Permutation::identity(n);
        let mut seen: HashSet<Permutation> = HashSet::from([id.clone()]);
        let mut perms = vec![id];
        let mut frontier = 0;
        while frontier < perms.len() {
            let p = perms[frontier].clone();
            frontier += 1;
            for g in generators {
                if g.len() != n {
                    return Err(Error::Dimension("generators of different lengths".into()));
                }
                let q = p.then(g);
                if seen.insert(q.clone()) {
                    perms.push(q);
                }
            }
        }
        Self::from_group(perms)
    }

    pub fn len(&self) -> usize {
        self.perms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perms.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.perms.first().map_or(0, Permutation::len)
    }

    /// Closure under composition, checked exhaustively (`O(|H|^2)`).
    pub fn is_closed(&self) -> bool {
        let set: HashSet<&Permutation> = self.perms.iter().collect();
        self.perms
            .iter()
            .all(|a| self.perms.iter().all(|b| set.contains(&a.then(b))))
    }

    pub fn permutation_matrices(&self) -> Vec<Matrix> {
        self.perms.iter().map(Matrix::permutation).collect()
    }
}

/// Enumerates automorphisms of `g` by individualisation-refinement search,
/// stopping after `cap` of them. The identity is always the first element.
pub fn enumerate_automorphisms(g: &Graph, cap: usize) -> Result<AutomorphismSet> {
    if cap == 0 {
        return Err(Error::InvalidArgument(
            "automorphism cap must be >= 1".into(),
        ));
    }
    let mut perms = Vec::new();
    let mut capped = false;
    visit_isomorphisms(g, g, |p| {
        if perms.len() == cap {
            capped = true;
            return false;
        }
        perms.push(p);
        true
    });
    if perms.is_empty() {
        // n = 0
        perms.push(Permutation::identity(g.n()));
    }
    debug_assert!(perms[0].is_identity());
    if capped {
        let present: HashSet<Permutation> = perms.iter().cloned().collect();
        let missing: Vec<Permutation> = perms
            .iter()
            .map(Permutation::inverse)
            .filter(|q| !present.contains(q))
            .collect::<HashSet<_>>()
            .into_iter()
            .collect();
        let mut missing = missing;
        missing.sort();
        perms.extend(missing);
    }
    Ok(AutomorphismSet { perms, capped, cap })
}

/// Partition of `[n] x [n]` into orbits of the induced action `h·(i,j) = (h(i), h(j))`.
#[derive(Clone, Debug)]
pub struct PairOrbitPartition {
    n: usize,
    orbit_id: Vec<usize>,
    sizes: Vec<usize>,
    representatives: Vec<(usize, usize)>,
    keys: Vec<OrbitKey>,
}

/// Labeling-invariant description of an orbit used for its canonical position.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct OrbitKey {
    pub off_diagonal: bool,
    pub size: usize,
    /// `(min degree, max degree, adjacent, distance)`, minimised over the orbit;
    /// `distance` is `usize::MAX` for disconnected pairs.
    pub signature: (usize, usize, bool, usize),
}

impl PairOrbitPartition {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of orbits `m`.
    pub fn len(&self) -> usize {
        self.sizes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sizes.is_empty()
    }

    #[inline]
    pub fn orbit_of(&self, i: usize, j: usize) -> usize {
        self.orbit_id[i * self.n + j]
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// Smallest pair of each orbit under the input labeling.
    pub fn representatives(&self) -> &[(usize, usize)] {
        &self.representatives
    }

    pub fn keys(&self) -> &[OrbitKey] {
        &self.keys
    }

    /// 0/1 indicator matrix `M_t` of orbit `t`.
    pub fn indicator(&self, t: usize) -> Matrix {
        let mut m = Matrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                if self.orbit_of(i, j) == t {
                    m[(i, j)] = 1.0;
                }
            }
        }
        m
    }
}

/// Orbits of the stored permutations on ordered pairs of nodes of `g`, in
/// canonical order: diagonal orbits first, then by orbit size, then by the
/// smallest pair signature, with remaining ties broken by the smallest pair.
pub fn pair_orbits(auts: &AutomorphismSet, g: &Graph) -> Result<PairOrbitPartition> {
    let n = g.n();
    if auts.perms.iter().any(|p| p.len() != n) {
        return Err(Error::Dimension(format!(
            "automorphisms act on {} points, graph has {n} nodes",
            auts.degree()
        )));
    }
    let mut uf = UnionFind::new(n * n);
    for h in &auts.perms {
        if h.is_identity() {
            continue;
        }
        let map = h.as_slice();
        for i in 0..n {
            let hi = map[i] * n;
            for j in 0..n {
                uf.union(i * n + j, hi + map[j]);
            }
        }
    }

    let dist = g.distance_matrix();
    let signature = |i: usize, j: usize| {
        let (di, dj) = (g.degree(i), g.degree(j));
        let d = dist[i * n + j];
        (
            di.min(dj),
            di.max(dj),
            g.has_edge(i, j),
            if d == UNREACHABLE { usize::MAX } else { d },
        )
    };

    // root -> provisional orbit index, in order of the smallest member pair
    let mut provisional = vec![usize::MAX; n * n];
    let mut reps: Vec<(usize, usize)> = Vec::new();
    let mut sizes: Vec<usize> = Vec::new();
    let mut sigs: Vec<(usize, usize, bool, usize)> = Vec::new();
    let mut raw_id = vec![0usize; n * n];
    for i in 0..n {
        for j in 0..n {
            let root = uf.find(i * n + j);
            if provisional[root] == usize::MAX {
                provisional[root] = reps.len();
                reps.push((i, j));
                sizes.push(0);
                sigs.push(signature(i, j));
            }
            let t = provisional[root];
            raw_id[i * n + j] = t;
            sizes[t] += 1;
            sigs[t] = sigs[t].min(signature(i, j));
        }
    }

    let keys: Vec<OrbitKey> = (0..reps.len())
        .map(|t| OrbitKey {
            off_diagonal: reps[t].0 != reps[t].1,
            size: sizes[t],
            signature: sigs[t],
        })
        .collect();
    let mut order: Vec<usize> = (0..reps.len()).collect();
    order.sort_by(|&a, &b| keys[a].cmp(&keys[b]).then(reps[a].cmp(&reps[b])));
    let mut rank = vec![0usize; order.len()];
    for (r, &t) in order.iter().enumerate() {
        rank[t] = r;
    }

    Ok(PairOrbitPartition {
        n,
        orbit_id: raw_id.into_iter().map(|t| rank[t]).collect(),
        sizes: order.iter().map(|&t| sizes[t]).collect(),
        representatives: order.iter().map(|&t| reps[t]).collect(),
        keys: order.iter().map(|&t| keys[t].clone()).collect(),
    })
}

/// Orbit coefficients drawn i.i.d. uniform on `[1, 2]`, in canonical orbit order.
pub fn orbit_coefficients(m: usize, seed: u64) -> Vec<f64> {
    let mut rng = SplitMix64::new(seed);
    (0..m).map(|_| rng.uniform(1.0, 2.0)).collect()
}

/// `S = Σ_t c_t (M_t + M_tᵀ) / 2`.
pub fn build_s(orbits: &PairOrbitPartition, coeffs: &[f64]) -> Result<SymMatrix> {
    if coeffs.len() != orbits.len() {
        return Err(Error::Dimension(format!(
            "{} coefficients for {} orbits",
            coeffs.len(),
            orbits.len()
        )));
    }
    let n = orbits.n;
    let mut s = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            s[(i, j)] = 0.5 * (coeffs[orbits.orbit_of(i, j)] + coeffs[orbits.orbit_of(j, i)]);
        }
    }
    SymMatrix::new(s)
}

/// [`build_s`] with coefficients from [`orbit_coefficients`].
pub fn build_s_seeded(orbits: &PairOrbitPartition, seed: u64) -> SymMatrix {
    build_s(orbits, &orbit_coefficients(orbits.len(), seed)).expect("lengths agree")
}

struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{cycle, gen_cycle_pair, path};

    #[test]
    fn cap_must_be_positive() {
        assert!(enumerate_automorphisms(&path(3), 0).is_err());
    }

    #[test]
    fn capped_enumeration_is_inverse_closed() {
        let g = Graph::empty(6);
        let auts = enumerate_automorphisms(&g, 50).unwrap();
        assert!(auts.capped);
        assert!(auts.perms[0].is_identity());
        let set: HashSet<_> = auts.perms.iter().cloned().collect();
        assert!(auts.perms.iter().all(|p| set.contains(&p.inverse())));
        assert!(auts.len() >= 50 && auts.len() <= 100);
    }

    #[test]
    fn identity_only_orbits_are_singletons() {
        let p3 = path(3);
        let id = AutomorphismSet::from_group(vec![Permutation::identity(3)]).unwrap();
        let orbits = pair_orbits(&id, &p3).unwrap();
        assert_eq!(orbits.len(), 9);
        assert!(orbits.sizes().iter().all(|&s| s == 1));
    }

    #[test]
    fn c6_orbits_by_distance() {
        let c6 = cycle(6).unwrap();
        let auts = enumerate_automorphisms(&c6, 1000).unwrap();
        let orbits = pair_orbits(&auts, &c6).unwrap();
        assert_eq!(orbits.len(), 4);
        // diagonal, antipodal (size 6), then distance 2 (non-adjacent sorts
        // before adjacent), then distance 1
        assert_eq!(orbits.sizes(), &[6, 6, 12, 12]);
        assert_eq!(orbits.orbit_of(0, 0), 0);
        assert_eq!(orbits.orbit_of(0, 3), 1);
        assert_eq!(orbits.orbit_of(0, 2), 2);
        assert_eq!(orbits.orbit_of(0, 1), 3);
    }

    #[test]
    fn coefficient_length_checked() {
        let c6 = cycle(6).unwrap();
        let auts = enumerate_automorphisms(&c6, 1000).unwrap();
        let orbits = pair_orbits(&auts, &c6).unwrap();
        assert!(build_s(&orbits, &[1.0, 2.0]).is_err());
    }

    #[test]
    fn seeded_coefficients_in_range() {
        let c = orbit_coefficients(100, 42);
        assert!(c.iter().all(|&x| (1.0..2.0).contains(&x)));
        assert_eq!(c, orbit_coefficients(100, 42));
    }

    #[test]
    fn two_triangles_group_order() {
        let (two_c3, _) = gen_cycle_pair(3).unwrap();
        let auts = enumerate_automorphisms(&two_c3, 1000).unwrap();
        assert_eq!(auts.len(), 72);
        assert!(!auts.capped);
    }

    #[test]
    fn generated_group() {
        let r = Permutation::new(vec![1, 2, 3, 4, 5, 0]).unwrap();
        let s = Permutation::new(vec![0, 5, 4, 3, 2, 1]).unwrap();
        let d6 = AutomorphismSet::generated_by(&[r, s]).unwrap();
        assert_eq!(d6.len(), 12);
        assert!(AutomorphismSet::from_group(vec![
            Permutation::identity(3),
            Permutation::new(vec![1, 2, 0]).unwrap()
        ])
        .is_err());
    }
}
