//! Group averaging, character projectors and checks of eigenspace blocks
//! against the isotypic decomposition.
//!
//! Everything here is dense `|H| x n x n` work intended for small groups
//! acting on a handful of points.

use crate::automorphism::AutomorphismSet;
use crate::error::{Error, Result};
use crate::graph::Permutation;
use crate::linalg::{BlockProjectorSet, Matrix, SymMatrix};
use crate::rng::SplitMix64;

/// Tolerance for [`verify_fixed_subspace`].
pub const FIXED_SUBSPACE_TOL: f64 = 1e-10;
/// Frobenius tolerance for [`verify_refinement`].
pub const REFINEMENT_TOL: f64 = 1e-8;

/// Result of group averaging.
#[derive(Clone, Debug)]
pub struct Reynolds {
    pub operator: SymMatrix,
    /// Set when the input was a capped enumeration, so the average is over a
    /// subset rather than a group and need not be a projector.
    pub subgroup_only: bool,
}

/// `p_avg = (1/|H|) Σ_h ρ(h)`.
pub fn reynolds(group: &AutomorphismSet) -> Reynolds {
    let n = group.degree();
    let mut acc = Matrix::zeros(n, n);
    for h in &group.perms {
        for i in 0..n {
            acc[(h.apply(i), i)] += 1.0;
        }
    }
    let avg = acc.scale(1.0 / group.len() as f64);
    // Average of a non-group subset may be asymmetric; symmetrise for the type.
    let sym = avg.add(&avg.transpose()).expect("square").scale(0.5);
    Reynolds {
        operator: SymMatrix::new(sym).expect("symmetrised"),
        subgroup_only: group.capped,
    }
}

/// A real character of a finite group, listed per group element.
#[derive(Clone, Debug)]
pub struct Character {
    pub name: String,
    pub degree: usize,
    /// `χ(h)` aligned with `CharacterTable::group.perms`.
    pub values: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct CharacterTable {
    pub group: AutomorphismSet,
    pub characters: Vec<Character>,
}

impl CharacterTable {
    /// Checks `(1/|H|) Σ χ(h)² = 1` and `χ(id) = degree` for every character.
    pub fn is_valid(&self) -> bool {
        let order = self.group.len() as f64;
        self.characters.iter().all(|c| {
            let norm = c.values.iter().map(|x| x * x).sum::<f64>() / order;
            let id = self
                .group
                .perms
                .iter()
                .position(Permutation::is_identity)
                .map(|k| c.values[k]);
            (norm - 1.0).abs() < 1e-12 && id == Some(c.degree as f64)
        })
    }

    pub fn projectors(&self) -> Result<Vec<SymMatrix>> {
        self.characters
            .iter()
            .map(|c| character_projector(&self.group, &c.values, c.degree))
            .collect()
    }

    pub fn character(&self, name: &str) -> Option<&Character> {
        self.characters.iter().find(|c| c.name == name)
    }
}

/// `p_χ = (deg/|H|) Σ_h χ(h) ρ(h)` for a real character.
pub fn character_projector(
    group: &AutomorphismSet,
    character: &[f64],
    degree: usize,
) -> Result<SymMatrix> {
    if group.capped {
        return Err(Error::InvalidArgument(
            "character projectors need the full group, not a capped enumeration".into(),
        ));
    }
    if character.len() != group.len() {
        return Err(Error::Dimension(format!(
            "{} character values for a group of order {}",
            character.len(),
            group.len()
        )));
    }
    let n = group.degree();
    let mut acc = Matrix::zeros(n, n);
    for (h, &chi) in group.perms.iter().zip(character) {
        if chi == 0.0 {
            continue;
        }
        for i in 0..n {
            acc[(h.apply(i), i)] += chi;
        }
    }
    let p = acc.scale(degree as f64 / group.len() as f64);
    let sym = p.add(&p.transpose())?.scale(0.5);
    SymMatrix::new(sym)
}

/// Dihedral group of order 12 acting on the hexagon `0..6`, listed as the
/// rotations `i -> i + k` for `k = 0..6` followed by the reflections
/// `i -> k - i`.
pub fn dihedral6() -> AutomorphismSet {
    let mut perms = Vec::with_capacity(12);
    for k in 0..6 {
        perms.push(Permutation::from_vec_unchecked(
            (0..6).map(|i| (i + k) % 6).collect(),
        ));
    }
    for k in 0..6 {
        perms.push(Permutation::from_vec_unchecked(
            (0..6).map(|i| (k + 6 - i) % 6).collect(),
        ));
    }
    AutomorphismSet::from_group(perms).expect("dihedral group is closed")
}

/// Full character table of [`dihedral6`]: four degree-1 characters and the
/// two degree-2 characters `χ_j(r^k) = 2cos(πjk/3)`, zero on reflections.
pub fn dihedral6_character_table() -> CharacterTable {
    let group = dihedral6();
    let sign = |k: usize| if k % 2 == 0 { 1.0 } else { -1.0 };
    let mut characters = Vec::new();
    let table: [(&str, Box<dyn Fn(usize) -> f64>, Box<dyn Fn(usize) -> f64>); 4] = [
        ("trivial", Box::new(|_| 1.0), Box::new(|_| 1.0)),
        ("reflection-sign", Box::new(|_| 1.0), Box::new(|_| -1.0)),
        ("alternating", Box::new(sign), Box::new(sign)),
        (
            "alternating-twisted",
            Box::new(sign),
            Box::new(move |k| -sign(k)),
        ),
    ];
    for (name, rot, refl) in table {
        let values = (0..6).map(&rot).chain((0..6).map(&refl)).collect();
        characters.push(Character {
            name: name.into(),
            degree: 1,
            values,
        });
    }
    for j in 1..=2 {
        let values = (0..6)
            .map(|k| 2.0 * (std::f64::consts::PI * (j * k) as f64 / 3.0).cos())
            .chain(std::iter::repeat(0.0).take(6))
            .collect();
        characters.push(Character {
            name: format!("chi{j}"),
            degree: 2,
            values,
        });
    }
    CharacterTable { group, characters }
}

/// `C2 x D3 x D3` acting on two triangles `{0,1,2}` and `{3,4,5}`.
pub fn two_triangle_group() -> AutomorphismSet {
    let p = |v: Vec<usize>| Permutation::from_vec_unchecked(v);
    AutomorphismSet::generated_by(&[
        p(vec![1, 2, 0, 3, 4, 5]),
        p(vec![1, 0, 2, 3, 4, 5]),
        p(vec![0, 1, 2, 4, 5, 3]),
        p(vec![0, 1, 2, 4, 3, 5]),
        p(vec![3, 4, 5, 0, 1, 2]),
    ])
    .expect("generators share a length")
}

/// Trivial character (all ones) of any group.
pub fn trivial_character(group: &AutomorphismSet) -> Vec<f64> {
    vec![1.0; group.len()]
}

/// Checks that `p_avg` maps into the fixed subspace and fixes it pointwise:
/// `ρ(h) p_avg u = p_avg u` for random `u` and every `h`, and `p_avg u = u`
/// for the indicator vector of every point orbit (these span the fixed
/// vectors of a permutation action).
pub fn verify_fixed_subspace(p_avg: &SymMatrix, group: &AutomorphismSet, seed: u64) -> bool {
    let n = group.degree();
    if p_avg.n() != n {
        return false;
    }
    let mut rng = SplitMix64::new(seed);
    for _ in 0..8 {
        let u: Vec<f64> = (0..n).map(|_| rng.normal()).collect();
        let pu = p_avg.matvec(&u).expect("dimensions match");
        for h in &group.perms {
            let mut hpu = vec![0.0; n];
            for i in 0..n {
                hpu[h.apply(i)] = pu[i];
            }
            if max_diff(&hpu, &pu) > FIXED_SUBSPACE_TOL {
                return false;
            }
        }
    }
    for orbit in point_orbits(group) {
        let mut u = vec![0.0; n];
        for &i in &orbit {
            u[i] = 1.0;
        }
        let pu = p_avg.matvec(&u).expect("dimensions match");
        if max_diff(&pu, &u) > FIXED_SUBSPACE_TOL {
            return false;
        }
    }
    true
}

/// Orbits of the group on `0..n`, each sorted, ordered by smallest element.
pub fn point_orbits(group: &AutomorphismSet) -> Vec<Vec<usize>> {
    let n = group.degree();
    let mut label = vec![usize::MAX; n];
    let mut orbits = Vec::new();
    for start in 0..n {
        if label[start] != usize::MAX {
            continue;
        }
        let id = orbits.len();
        let mut orbit = vec![start];
        label[start] = id;
        let mut k = 0;
        while k < orbit.len() {
            let x = orbit[k];
            k += 1;
            for h in &group.perms {
                let y = h.apply(x);
                if label[y] == usize::MAX {
                    label[y] = id;
                    orbit.push(y);
                }
            }
        }
        orbit.sort_unstable();
        orbits.push(orbit);
    }
    orbits
}

/// True iff every block projector lies inside exactly one canonical
/// component: `p_i P_α = P_α` for exactly one `i`.
pub fn verify_refinement(blocks: &BlockProjectorSet, canonical: &[SymMatrix]) -> bool {
    blocks.projectors().all(|pa| {
        let scale = pa.frobenius_norm().max(1.0);
        canonical
            .iter()
            .filter(|pi| {
                pi.n() == pa.n()
                    && pi
                        .matmul(pa)
                        .and_then(|prod| prod.sub(pa))
                        .map(|d| d.frobenius_norm() <= REFINEMENT_TOL * scale)
                        .unwrap_or(false)
            })
            .count()
            == 1
    })
}

/// `f = (1/|H|) Σ_h A ρ(h)` for a linear map `A: R^n -> R^k`.
pub fn average_linear_map(a: &Matrix, group: &AutomorphismSet) -> Result<Matrix> {
    let n = group.degree();
    if a.cols() != n {
        return Err(Error::Dimension(format!(
            "map with {} columns averaged over a group on {n} points",
            a.cols()
        )));
    }
    // (A ρ(h))[:, i] = A[:, h(i)]
    let mut acc = Matrix::zeros(a.rows(), n);
    for h in &group.perms {
        for r in 0..a.rows() {
            for i in 0..n {
                acc[(r, i)] += a[(r, h.apply(i))];
            }
        }
    }
    Ok(acc.scale(1.0 / group.len() as f64))
}

/// Orthogonal projector onto the span of `vectors` (Gram-Schmidt).
pub fn span_projector(vectors: &[Vec<f64>]) -> Result<SymMatrix> {
    let n = vectors.first().map_or(0, Vec::len);
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for v in vectors {
        if v.len() != n {
            return Err(Error::Dimension(
                "spanning vectors of different lengths".into(),
            ));
        }
        let mut w = v.clone();
        for b in &basis {
            let dot: f64 = w.iter().zip(b).map(|(x, y)| x * y).sum();
            w.iter_mut().zip(b).for_each(|(x, y)| *x -= dot * y);
        }
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            basis.push(w.into_iter().map(|x| x / norm).collect());
        }
    }
    let mut p = Matrix::zeros(n, n);
    for b in &basis {
        for i in 0..n {
            for j in 0..n {
                p[(i, j)] += b[i] * b[j];
            }
        }
    }
    SymMatrix::new(p)
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}
