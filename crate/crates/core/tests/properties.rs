//! Property tests over random graphs, relabelings and feature matrices.

use proptest::prelude::*;

use isoread::automorphism::{build_s_seeded, enumerate_automorphisms, pair_orbits};
use isoread::encoder::{encode, init_encoder, EncoderConfig};
use isoread::generators::gen_er;
use isoread::graph6::{parse_graph6, to_graph6_string};
use isoread::linalg::{block_projectors, group_eigenvalues, sym_eig, Matrix};
use isoread::readout::{
    block_features, center, isotypic_readout, linearized_block_features, pool, prepare_bundle,
    random_projection, PoolKind, ReadoutConfig,
};
use isoread::reptheory::reynolds;
use isoread::rng::SplitMix64;
use isoread::{wl_equivalent, Graph, Permutation};

fn graph_strategy(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n, 0.0f64..1.0, any::<u64>()).prop_map(|(n, p, seed)| gen_er(n, p, seed).unwrap())
}

fn perm_for(n: usize, seed: u64) -> Permutation {
    Permutation::random(n, &mut SplitMix64::new(seed))
}

fn random_matrix(rows: usize, cols: usize, seed: u64) -> Matrix {
    let mut rng = SplitMix64::new(seed);
    let data = (0..rows * cols).map(|_| rng.normal()).collect();
    Matrix::from_row_major(rows, cols, data).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn graph6_round_trip(g in graph_strategy(70)) {
        let s = to_graph6_string(&g).unwrap();
        prop_assert_eq!(parse_graph6(s.as_bytes()).unwrap(), g);
    }

    #[test]
    fn permutation_inverse(n in 1usize..40, seed in any::<u64>()) {
        let p = perm_for(n, seed);
        prop_assert!(p.then(&p.inverse()).is_identity());
        prop_assert!(p.inverse().then(&p).is_identity());
    }

    #[test]
    fn relabeling_preserves_wl_class(g in graph_strategy(14), seed in any::<u64>()) {
        let h = g.permute(&perm_for(g.n(), seed)).unwrap();
        prop_assert!(wl_equivalent(&g, &h));
        prop_assert_eq!(g.degree_sequence(), h.degree_sequence());
    }

    #[test]
    fn operator_commutes_with_automorphisms(g in graph_strategy(10), seed in any::<u64>()) {
        let auts = enumerate_automorphisms(&g, 50_000).unwrap();
        let orbits = pair_orbits(&auts, &g).unwrap();
        let s = build_s_seeded(&orbits, seed);
        for h in &auts.perms {
            prop_assert!(h.preserves(&g));
            let diff = s.conjugate(h).sub(&s).unwrap().max_abs();
            prop_assert!(diff <= 1e-12);
            for i in 0..g.n() {
                for j in 0..g.n() {
                    prop_assert_eq!(orbits.orbit_of(h.apply(i), h.apply(j)), orbits.orbit_of(i, j));
                }
            }
        }
        let mut total = Matrix::zeros(g.n(), g.n());
        for t in 0..orbits.len() {
            total = total.add(&orbits.indicator(t)).unwrap();
        }
        prop_assert!(total.sub(&Matrix::filled(g.n(), g.n(), 1.0)).unwrap().max_abs() == 0.0);
    }

    #[test]
    fn orbits_are_conjugation_consistent(g in graph_strategy(9), seed in any::<u64>()) {
        let p = perm_for(g.n(), seed);
        let h = g.permute(&p).unwrap();
        let og = pair_orbits(&enumerate_automorphisms(&g, 50_000).unwrap(), &g).unwrap();
        let oh = pair_orbits(&enumerate_automorphisms(&h, 50_000).unwrap(), &h).unwrap();
        prop_assert_eq!(og.len(), oh.len());
        for i in 0..g.n() {
            for j in 0..g.n() {
                let same_g = og.orbit_of(i, j) == og.orbit_of(0, 0);
                let same_h = oh.orbit_of(p.apply(i), p.apply(j)) == oh.orbit_of(p.apply(0), p.apply(0));
                prop_assert_eq!(same_g, same_h);
            }
        }
        let mut sg: Vec<usize> = og.sizes().to_vec();
        let mut sh: Vec<usize> = oh.sizes().to_vec();
        sg.sort();
        sh.sort();
        prop_assert_eq!(sg, sh);
    }

    #[test]
    fn projector_algebra(g in graph_strategy(12), seed in any::<u64>()) {
        let auts = enumerate_automorphisms(&g, 50_000).unwrap();
        let orbits = pair_orbits(&auts, &g).unwrap();
        let s = build_s_seeded(&orbits, seed);
        let eig = sym_eig(&s).unwrap();
        let blocks = block_projectors(&eig, &group_eigenvalues(&eig, 1e-12)).unwrap();
        let n = g.n();
        let mut sum = Matrix::zeros(n, n);
        for (a, pa) in blocks.blocks.iter().enumerate() {
            let p = &pa.projector;
            prop_assert!(p.matmul(p).unwrap().sub(p).unwrap().frobenius_norm() <= 1e-9);
            for pb in &blocks.blocks[a + 1..] {
                prop_assert!(p.matmul(&pb.projector).unwrap().frobenius_norm() <= 1e-9);
            }
            for h in &auts.perms {
                prop_assert!(p.conjugate(h).sub(p).unwrap().max_abs() <= 1e-9);
            }
            sum = sum.add(p).unwrap();
        }
        prop_assert!(sum.sub(&Matrix::identity(n)).unwrap().frobenius_norm() <= 1e-9);
    }

    #[test]
    fn reynolds_is_an_invariant_projector(g in graph_strategy(8)) {
        let auts = enumerate_automorphisms(&g, 50_000).unwrap();
        let r = reynolds(&auts);
        prop_assert!(!r.subgroup_only);
        let p = &r.operator;
        prop_assert!(p.matmul(p).unwrap().sub(p).unwrap().max_abs() <= 1e-12);
        for h in &auts.perms {
            prop_assert!(p.conjugate(h).sub(p).unwrap().max_abs() <= 1e-12);
        }
    }

    #[test]
    fn transported_readout_is_invariant(g in graph_strategy(12), seed in any::<u64>(), d in 1usize..6) {
        let cfg = ReadoutConfig { seed, ..Default::default() };
        let bundle = prepare_bundle(&g, &cfg).unwrap();
        let m = random_matrix(g.n(), d, seed ^ 1);
        let p = perm_for(g.n(), seed ^ 2);
        let base = isotypic_readout(&bundle, &m, &cfg).unwrap();
        let moved = isotypic_readout(&bundle.transport(&p).unwrap(), &m.permute_rows(&p), &cfg).unwrap();
        prop_assert_eq!(base.len(), cfg.output_len());
        for (a, b) in base.iter().zip(&moved) {
            prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0));
        }
    }

    #[test]
    fn automorphic_features_give_equal_readout(g in graph_strategy(10), seed in any::<u64>()) {
        let cfg = ReadoutConfig::default();
        let bundle = prepare_bundle(&g, &cfg).unwrap();
        let auts = enumerate_automorphisms(&g, 50_000).unwrap();
        let m = random_matrix(g.n(), 3, seed);
        let base = isotypic_readout(&bundle, &m, &cfg).unwrap();
        let h = &auts.perms[(seed as usize) % auts.len()];
        let moved = isotypic_readout(&bundle, &m.permute_rows(h), &cfg).unwrap();
        for (a, b) in base.iter().zip(&moved) {
            prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0));
        }
    }

    #[test]
    fn statistics_ignore_row_order(n in 1usize..20, d in 1usize..8, seed in any::<u64>()) {
        let ma = random_matrix(n, d, seed);
        let r = random_projection(d, 4, seed ^ 3);
        let id = Matrix::identity(n);
        let p = perm_for(n, seed ^ 4);
        let a = block_features(&id, &ma, &r).unwrap();
        let b = block_features(&id, &ma.permute_rows(&p), &r).unwrap();
        prop_assert_eq!(a, b);
        prop_assert_eq!(pool(&ma, PoolKind::Sum).unwrap(), pool(&ma.permute_rows(&p), PoolKind::Sum).unwrap());
    }

    #[test]
    fn centering_and_linearity(n in 1usize..20, d in 1usize..6, seed in any::<u64>()) {
        let m = random_matrix(n, d, seed);
        let m2 = random_matrix(n, d, seed ^ 9);
        for x in pool(&center(&m), PoolKind::Sum).unwrap() {
            prop_assert!(x.abs() <= 1e-10);
        }
        let p = random_matrix(n, n, seed ^ 5);
        let r = random_projection(d, 3, seed);
        let a = linearized_block_features(&p, &m, &r).unwrap();
        let b = linearized_block_features(&p, &m2, &r).unwrap();
        let ab = linearized_block_features(&p, &m.add(&m2).unwrap(), &r).unwrap();
        for ((x, y), z) in a.iter().zip(&b).zip(&ab) {
            prop_assert!((x + y - z).abs() <= 1e-9 * (1.0 + z.abs()));
        }
        let trivial = Matrix::filled(n, n, 1.0 / n as f64);
        for x in linearized_block_features(&trivial, &center(&m), &r).unwrap() {
            prop_assert!(x.abs() <= 1e-9);
        }
    }

    #[test]
    fn encoder_is_equivariant(g in graph_strategy(14), seed in any::<u64>()) {
        let w = init_encoder(&EncoderConfig { seed, width: 16, layers: 3, ..Default::default() }).unwrap();
        let p = perm_for(g.n(), seed ^ 7);
        let z = encode(&g, &w).unwrap();
        let zp = encode(&g.permute(&p).unwrap(), &w).unwrap();
        prop_assert!(zp.sub(&z.permute_rows(&p)).unwrap().max_abs() <= 1e-10);
    }
}

#[test]
fn random_projection_column_norms_concentrate() {
    for seed in 0..100 {
        let r = random_projection(64, 8, seed);
        let target = (64.0f64 / 8.0).sqrt();
        for j in 0..8 {
            let norm = r.column(j).iter().map(|x| x * x).sum::<f64>().sqrt();
            assert!(norm > target / 2.0 && norm < target * 2.0);
        }
    }
}
