//! Checks against independent oracles: a separately written graph6 encoder,
//! brute-force automorphism and isomorphism search, nalgebra's symmetric
//! eigensolver, and hand-derived matrices.

use isoread::automorphism::{build_s, enumerate_automorphisms, pair_orbits};
use isoread::generators::{
    bipartite_double, cfi_graph, complete, cycle, gen_cfi_pair, gen_cycle_pair, gen_er,
    gen_petersen, gen_rook4, gen_shrikhande, gm_switch, path,
};
use isoread::graph6::{parse_graph6, to_graph6_string};
use isoread::linalg::{group_eigenvalues, sym_eig, Matrix, SymMatrix};
use isoread::rng::SplitMix64;
use isoread::{is_isomorphic, Graph, Permutation};

/// Straightforward graph6 writer for `n <= 62`, written from the format
/// description without sharing code with the library.
fn reference_graph6(g: &Graph) -> String {
    let n = g.n();
    assert!(n <= 62);
    let mut out = vec![(n as u8) + 63];
    let mut bits = Vec::new();
    for j in 1..n {
        for i in 0..j {
            bits.push(g.has_edge(i, j));
        }
    }
    while bits.len() % 6 != 0 {
        bits.push(false);
    }
    for chunk in bits.chunks(6) {
        let mut v = 0u8;
        for &b in chunk {
            v = (v << 1) | u8::from(b);
        }
        out.push(v + 63);
    }
    String::from_utf8(out).unwrap()
}

/// Every bijection preserving adjacency, by plain backtracking with no
/// refinement.
fn brute_force_isomorphisms(g: &Graph, h: &Graph) -> Vec<Vec<usize>> {
    fn rec(
        g: &Graph,
        h: &Graph,
        map: &mut Vec<usize>,
        used: &mut Vec<bool>,
        out: &mut Vec<Vec<usize>>,
    ) {
        let v = map.len();
        if v == g.n() {
            out.push(map.clone());
            return;
        }
        for w in 0..h.n() {
            if used[w] || g.degree(v) != h.degree(w) {
                continue;
            }
            if (0..v).all(|u| g.has_edge(u, v) == h.has_edge(map[u], w)) {
                used[w] = true;
                map.push(w);
                rec(g, h, map, used, out);
                map.pop();
                used[w] = false;
            }
        }
    }
    let mut out = Vec::new();
    if g.n() == h.n() {
        rec(g, h, &mut Vec::new(), &mut vec![false; h.n()], &mut out);
    }
    out
}

#[test]
fn graph6_matches_reference_encoder() {
    assert_eq!(to_graph6_string(&Graph::empty(1)).unwrap(), "@");
    assert_eq!(to_graph6_string(&complete(3)).unwrap(), "Bw");
    for seed in 0..60 {
        let n = 1 + (seed as usize * 7) % 40;
        let g = gen_er(n, 0.3, seed).unwrap();
        let expected = reference_graph6(&g);
        assert_eq!(to_graph6_string(&g).unwrap(), expected);
        assert_eq!(parse_graph6(expected.as_bytes()).unwrap(), g);
    }
}

#[test]
fn petersen_has_120_automorphisms() {
    let p = gen_petersen();
    let brute = brute_force_isomorphisms(&p, &p);
    assert_eq!(brute.len(), 120);
    let auts = enumerate_automorphisms(&p, 50_000).unwrap();
    assert_eq!(auts.len(), 120);
    let mut ours: Vec<Vec<usize>> = auts.perms.iter().map(|p| p.as_slice().to_vec()).collect();
    ours.sort();
    let mut brute = brute;
    brute.sort();
    assert_eq!(ours, brute);
}

#[test]
fn automorphism_counts_match_brute_force() {
    for seed in 0..40 {
        let n = 3 + seed as usize % 6;
        let g = gen_er(n, 0.45, seed).unwrap();
        let brute = brute_force_isomorphisms(&g, &g).len();
        let auts = enumerate_automorphisms(&g, 50_000).unwrap();
        assert_eq!(auts.len(), brute, "graph {}", to_graph6_string(&g).unwrap());
        assert!(auts.is_closed());
    }
    assert_eq!(
        enumerate_automorphisms(&cycle(6).unwrap(), 100)
            .unwrap()
            .len(),
        12
    );
    let (two_c3, _) = gen_cycle_pair(3).unwrap();
    assert_eq!(enumerate_automorphisms(&two_c3, 100).unwrap().len(), 72);
}

#[test]
fn isomorphism_matches_brute_force() {
    let mut rng = SplitMix64::new(5);
    for seed in 0..60 {
        let n = 2 + seed as usize % 6;
        let g = gen_er(n, 0.5, seed).unwrap();
        let h = if seed % 2 == 0 {
            g.permute(&Permutation::random(n, &mut rng)).unwrap()
        } else {
            gen_er(n, 0.5, seed + 1000).unwrap()
        };
        let brute = !brute_force_isomorphisms(&g, &h).is_empty();
        assert_eq!(is_isomorphic(&g, &h).unwrap(), brute);
    }
}

#[test]
fn srg_and_cfi_pairs_are_not_isomorphic() {
    assert!(!is_isomorphic(&gen_shrikhande(), &gen_rook4()).unwrap());
    let (a, b) = gen_cfi_pair(&complete(3)).unwrap();
    assert_eq!((a.n(), b.n()), (18, 18));
    assert!(!is_isomorphic(&a, &b).unwrap());
    let (a, b) = gen_cfi_pair(&complete(4)).unwrap();
    assert_eq!((a.n(), b.n()), (40, 40));
    assert!(!is_isomorphic(&a, &b).unwrap());
    // an even number of twists gives back the untwisted class
    let base = complete(3);
    let twice = cfi_graph(&base, &[0, 1]).unwrap();
    assert!(is_isomorphic(&cfi_graph(&base, &[]).unwrap(), &twice).unwrap());
}

fn nalgebra_eigenvalues(m: &Matrix) -> Vec<f64> {
    let n = m.rows();
    let dm = nalgebra::DMatrix::from_row_slice(n, n, m.as_slice());
    let mut ev: Vec<f64> = dm.symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    ev
}

#[test]
fn jacobi_agrees_with_nalgebra() {
    let mut rng = SplitMix64::new(77);
    for &n in &[1usize, 2, 3, 5, 8, 17, 40, 96] {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let x = rng.normal();
                m[(i, j)] = x;
                m[(j, i)] = x;
            }
        }
        let s = SymMatrix::new(m.clone()).unwrap();
        let eig = sym_eig(&s).unwrap();
        let reference = nalgebra_eigenvalues(&m);
        let scale = m.frobenius_norm().max(1.0);
        for (a, b) in eig.eigenvalues.iter().zip(&reference) {
            assert!((a - b).abs() < 1e-10 * scale, "n={n}: {a} vs {b}");
        }
        assert!(eig.residual(&s) <= 1e-10 * scale);
        assert!(eig.orthogonality_error() <= 1e-10);
    }
}

#[test]
fn jacobi_on_graph_operators_agrees_with_nalgebra() {
    for g in [
        gen_petersen(),
        gen_shrikhande(),
        gen_rook4(),
        gen_cfi_pair(&complete(4)).unwrap().1,
    ] {
        let auts = enumerate_automorphisms(&g, 50_000).unwrap();
        let orbits = pair_orbits(&auts, &g).unwrap();
        let s = isoread::automorphism::build_s_seeded(&orbits, 3);
        let eig = sym_eig(&s).unwrap();
        let reference = nalgebra_eigenvalues(&s);
        for (a, b) in eig.eigenvalues.iter().zip(&reference) {
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
    }
}

/// Coefficients by orbit meaning, looked up through each orbit's representative.
fn coeffs_by(g: &Graph, f: impl Fn(usize, usize) -> f64) -> Vec<f64> {
    let auts = enumerate_automorphisms(g, 50_000).unwrap();
    let orbits = pair_orbits(&auts, g).unwrap();
    orbits
        .representatives()
        .iter()
        .map(|&(i, j)| f(i, j))
        .collect()
}

#[test]
fn example_two_matrices_are_reproduced() {
    let c6 = cycle(6).unwrap();
    let coeffs = coeffs_by(&c6, |i, j| {
        let d = (i as i64 - j as i64).unsigned_abs() as usize;
        [1.0, 2.0, 3.0, 5.0][d.min(6 - d)]
    });
    let orbits = pair_orbits(&enumerate_automorphisms(&c6, 100).unwrap(), &c6).unwrap();
    let s1 = build_s(&orbits, &coeffs).unwrap();
    let row = [1.0, 2.0, 3.0, 5.0, 3.0, 2.0];
    for i in 0..6 {
        for j in 0..6 {
            assert_eq!(s1[(i, j)], row[(j + 6 - i) % 6]);
        }
    }
    let (two_c3, _) = gen_cycle_pair(3).unwrap();
    let coeffs = coeffs_by(&two_c3, |i, j| match (i == j, i / 3 == j / 3) {
        (true, _) => 5.0,
        (false, true) => 2.0,
        (false, false) => 1.0,
    });
    let orbits = pair_orbits(&enumerate_automorphisms(&two_c3, 100).unwrap(), &two_c3).unwrap();
    let s2 = build_s(&orbits, &coeffs).unwrap();
    for i in 0..6 {
        for j in 0..6 {
            let expected = if i == j {
                5.0
            } else if i / 3 == j / 3 {
                2.0
            } else {
                1.0
            };
            assert_eq!(s2[(i, j)], expected);
        }
    }
    let ev = |s: &SymMatrix| sym_eig(s).unwrap().eigenvalues;
    let e1 = ev(&s1);
    for (a, b) in e1.iter().zip([16.0, 1.0, 1.0, -2.0, -5.0, -5.0]) {
        assert!((a - b).abs() < 1e-9);
    }
    let e2 = ev(&s2);
    for (a, b) in e2.iter().zip([12.0, 6.0, 3.0, 3.0, 3.0, 3.0]) {
        assert!((a - b).abs() < 1e-9);
    }
    let sizes = |s: &SymMatrix| -> Vec<usize> {
        group_eigenvalues(&sym_eig(s).unwrap(), 1e-12)
            .iter()
            .map(Vec::len)
            .collect()
    };
    assert_eq!(sizes(&s1), vec![1, 2, 1, 2]);
    assert_eq!(sizes(&s2), vec![1, 1, 4]);
}

#[test]
fn gm_switch_preserves_spectrum() {
    let spectrum = |g: &Graph| nalgebra_eigenvalues(g.adjacency().as_matrix());
    let base = bipartite_double(&gen_petersen());
    let switched = gm_switch(&base, &[0, 2, 8, 9]).unwrap();
    assert!(!is_isomorphic(&base, &switched).unwrap());
    for (a, b) in spectrum(&base).iter().zip(spectrum(&switched)) {
        assert!((a - b).abs() < 1e-9);
    }
    let p = gen_petersen();
    let q = gm_switch(&p, &[0, 1]).unwrap();
    assert_ne!(p, q);
    for (a, b) in spectrum(&p).iter().zip(spectrum(&q)) {
        assert!((a - b).abs() < 1e-9);
    }
}

#[test]
fn bipartite_double_of_path_is_two_paths() {
    let d = bipartite_double(&path(3));
    assert_eq!(d.n(), 6);
    assert_eq!(d.edge_count(), 4);
    assert!(!d.is_connected());
}
