//! Library results compared with exhaustive reference computations that live
//! only in this file and in tests/common.

mod common;

use rand::Rng;

use common::*;
use spectralwl::canonicalize::{negating_permutation, CanonConfig};
use spectralwl::eigen::TruncateOrder;
use spectralwl::{
    automorphisms_trivial, canonicalization_report, dataset_report, eigendecompose, epnn_distinguish,
    equi_canonicalize, find_signed_isomorphism, gen_orthonormal_counterexample, graph_stats, group_eigenvalues,
    is_simple_spectrum, laplacian, perm_isomorphic_matrices, signed_automorphisms, truncate, ColorRefiner, Error, Graph,
    Matrix, Quantizer, SpectralPair, UpdateRule,
};

/// Checks `L v = λ v` for an explicit integer-valued eigenvector.
fn is_eigenpair(g: &Graph, lambda: f64, v: &[f64]) -> bool {
    let l = laplacian(g);
    (0..g.n()).all(|i| {
        let lv: f64 = (0..g.n()).map(|j| l[(i, j)] * v[j]).sum();
        (lv - lambda * v[i]).abs() < 1e-12
    })
}

#[test]
fn path3_and_k4_spectra_from_explicit_eigenvectors() {
    let p3 = Graph::path(3);
    assert!(is_eigenpair(&p3, 0.0, &[1.0, 1.0, 1.0]));
    assert!(is_eigenpair(&p3, 1.0, &[1.0, 0.0, -1.0]));
    assert!(is_eigenpair(&p3, 3.0, &[1.0, -2.0, 1.0]));
    let ed = eigendecompose(&laplacian(&p3)).unwrap();
    for (got, want) in ed.lambdas.iter().zip([3.0, 1.0, 0.0]) {
        assert!((got - want).abs() < 1e-12);
    }
    assert!(is_simple_spectrum(&ed, 1e-4));
    let sp = truncate(&ed, 3, 1e-4, TruncateOrder::Largest).unwrap();
    assert_eq!(sp.k(), 3);

    let k4 = Graph::complete(4);
    // Three independent vectors orthogonal to the constant vector share λ = 4.
    for v in [[1.0, -1.0, 0.0, 0.0], [1.0, 0.0, -1.0, 0.0], [1.0, 0.0, 0.0, -1.0]] {
        assert!(is_eigenpair(&k4, 4.0, &v));
    }
    let ed = eigendecompose(&laplacian(&k4)).unwrap();
    let groups = group_eigenvalues(&ed.lambdas, 1e-4).unwrap();
    assert_eq!(groups.len(), 2);
    assert_eq!(groups[0].multiplicity, 3);
    assert!((groups[0].representative - 4.0).abs() < 1e-9);
    assert_eq!(groups[1].multiplicity, 1);
    assert!(groups[1].representative.abs() < 1e-9);
    assert!(!is_simple_spectrum(&ed, 1e-4));
    assert!(matches!(
        truncate(&ed, 2, 1e-4, TruncateOrder::Largest),
        Err(Error::NotSimple { indices }) if indices == vec![0, 1, 2]
    ));
}

#[test]
fn stats_on_path3_and_k4() {
    let p3 = graph_stats(&Graph::path(3), 1e-4, 1e-6).unwrap();
    assert!(p3.has_distinct);
    let k4 = graph_stats(&Graph::complete(4), 1e-4, 1e-6).unwrap();
    assert!(k4.has_mult3 && !k4.has_distinct);
    assert_eq!(k4.count_mult3, 1);
    let r = dataset_report(&[Graph::path(3), Graph::complete(4)], 1e-4, 1e-6).unwrap();
    assert_eq!(r.distinct.pct, 50.0);
    assert_eq!(r.mult3.pct, 50.0);
}

#[test]
fn signed_search_agrees_with_exhaustive_search() {
    let mut r = rng(101);
    let (mut positives, mut negatives) = (0, 0);
    for t in 0..300 {
        let n = r.gen_range(2..=6);
        let k = r.gen_range(1..=3);
        let zeros = r.gen_range(0..=n);
        let a = random_int_pair(&mut r, n, k, zeros);
        let b = if t % 3 == 0 {
            random_int_pair(&mut r, n, k, zeros)
        } else {
            let mut m = a.vectors().clone();
            let (i, j, c) = (r.gen_range(0..n), r.gen_range(0..n), r.gen_range(0..k));
            let tmp = m[(i, c)];
            m[(i, c)] = m[(j, c)];
            m[(j, c)] = tmp;
            let twisted = SpectralPair::new(m, a.lambdas().to_vec()).unwrap();
            random_signed(&mut r, n, k).apply(&twisted).unwrap()
        };
        let expected = naive_signed_isomorphic(a.vectors(), b.vectors(), 1e-9);
        let found = find_signed_isomorphism(&a, &b, 1e-9).unwrap();
        assert_eq!(found.is_some(), expected, "pair {t}");
        if let Some(g) = found {
            assert_eq!(g.apply_to_matrix(a.vectors()).unwrap(), *b.vectors());
            positives += 1;
        } else {
            negatives += 1;
        }
    }
    assert!(positives > 30 && negatives > 30, "{positives} / {negatives}");
}

#[test]
fn automorphism_counts_agree() {
    let mut r = rng(102);
    for _ in 0..150 {
        let n = r.gen_range(2..=6);
        let k = r.gen_range(1..=3);
        let zeros = r.gen_range(0..=n);
        let sp = random_int_pair(&mut r, n, k, zeros);
        let expected = naive_automorphism_count(sp.vectors(), 1e-9);
        let auts = signed_automorphisms(&sp, 1e-9, usize::MAX).unwrap();
        assert_eq!(auts.len(), expected);
        assert_eq!(automorphisms_trivial(&sp, 1e-9).unwrap(), expected == 1);
        for g in &auts {
            assert_eq!(g.apply(&sp).unwrap(), sp);
        }
    }
}

#[test]
fn matrix_permutation_search_agrees() {
    let mut r = rng(103);
    for t in 0..100 {
        let n = r.gen_range(2..=6);
        let g = random_graph(&mut r, n, 0.5);
        let h = if t % 2 == 0 {
            g.relabel(&random_perm(&mut r, n)).unwrap()
        } else {
            random_graph(&mut r, n, 0.5)
        };
        let (a, b) = (laplacian(&g), laplacian(&h));
        let found = perm_isomorphic_matrices(&a, &b, 1e-9).unwrap();
        assert_eq!(found.is_some(), naive_perm_isomorphic(&a, &b, 1e-9));
        if let Some(p) = found {
            assert_eq!(a.conjugate(&p).unwrap(), b);
        }
    }
}

#[test]
fn negating_permutation_agrees_with_brute_force() {
    let mut r = rng(104);
    for _ in 0..300 {
        let n = r.gen_range(1..=6);
        let v: Vec<f64> = (0..n).map(|_| r.gen_range(-2i32..=2) as f64).collect();
        let brute = permutations(n).iter().any(|p| (0..n).all(|i| v[p[i]] == -v[i]));
        let found = negating_permutation(&v, 1e-12);
        assert_eq!(found.is_some(), brute, "{v:?}");
        if let Some(p) = found {
            assert!((0..n).all(|i| v[p[i]] == -v[i]));
        }
    }
}

type Purview = (Vec<i64>, Vec<(Vec<i64>, Vec<i64>)>);

/// Purview of node `i`: sorted list of (initial color of j, quantized V_i ⊙ V_j).
fn naive_purviews(sp: &SpectralPair, q: &Quantizer) -> Vec<Purview> {
    let n = sp.n();
    let own: Vec<Vec<i64>> = (0..n).map(|i| q.product(sp.row(i), sp.row(i))).collect();
    (0..n)
        .map(|i| {
            let mut p: Vec<(Vec<i64>, Vec<i64>)> =
                (0..n).map(|j| (own[j].clone(), q.product(sp.row(i), sp.row(j)))).collect();
            p.sort();
            (own[i].clone(), p)
        })
        .collect()
}

#[test]
fn one_round_partition_matches_pairwise_purviews() {
    let mut r = rng(105);
    let q = Quantizer::default();
    let mut discrete = 0;
    for t in 0..200 {
        let n = r.gen_range(2..=8);
        let k = r.gen_range(1..=4);
        let sp = if t % 2 == 0 {
            let zeros = r.gen_range(0..n);
            random_int_pair(&mut r, n, k, zeros)
        } else {
            random_real_pair(&mut r, n, k.min(n))
        };
        let purviews = naive_purviews(&sp, &q);
        let mut refiner = ColorRefiner::new(q);
        let init = refiner.epnn_init(&sp);
        let one = refiner.epnn_step(&init, &sp).unwrap();
        for i in 0..n {
            for j in 0..n {
                assert_eq!(one.colors()[i] == one.colors()[j], purviews[i] == purviews[j], "instance {t}");
            }
        }
        let rows_distinct = (0..n).all(|i| (0..i).all(|j| sp.row(i) != sp.row(j)));
        if t % 2 == 1 && rows_distinct {
            assert_eq!(one.class_count(), n);
            discrete += 1;
        }
    }
    assert!(discrete > 50);
}

#[test]
fn orthonormal_extension_is_not_separated() {
    let (u, v) = gen_orthonormal_counterexample(None).unwrap();
    let verdict = epnn_distinguish(&u, &v, 20, &Quantizer::default()).unwrap();
    assert!(!verdict.is_separated());
    // The extension inherits the relabeling that already maps U to V.
    let g = find_signed_isomorphism(&u, &v, 1e-6).unwrap().expect("isomorphic");
    assert_eq!(g.signs, vec![-1, 1, -1, 1, 1, 1]);
}

#[test]
fn zero_sum_vectors_become_decidable() {
    let mut r = rng(106);
    let q = Quantizer::default();
    for _ in 0..20 {
        let n = r.gen_range(4..=8);
        let k = r.gen_range(1..=3);
        let mut m = Matrix::zeros(n, k);
        for c in 0..k {
            let col: Vec<f64> = (0..n).map(|_| r.gen_range(-1.0..1.0)).collect();
            let mean = col.iter().sum::<f64>() / n as f64;
            for i in 0..n {
                m[(i, c)] = col[i] - mean;
            }
        }
        let sp = SpectralPair::new(m, lambdas(k)).unwrap();
        for c in 0..k {
            assert!(sp.vectors().column(c).iter().sum::<f64>().abs() < 1e-12);
        }
        let res = equi_canonicalize(&sp, UpdateRule::RandomTable { seed: 1 }, 1, 1e-7, &q).unwrap();
        assert!(res.decidable.iter().all(|&d| d), "{:?}", res.column_sums);
    }
}

#[test]
fn canonicalization_reports_on_small_graphs() {
    let cfg = CanonConfig::default();
    // P2: eigenvectors (1,1)/√2 and (1,-1)/√2; the second sums to zero.
    let p2 = canonicalization_report(&[Graph::path(2)], &cfg).unwrap();
    assert_eq!(p2.n_simple_eigenvectors, 2);
    assert_eq!(p2.input_sum_zero_pct, Some(50.0));
    assert_eq!(p2.input_uncanonicalizable_pct, Some(50.0));
    // K4: only the constant vector has multiplicity one.
    let k4 = canonicalization_report(&[Graph::complete(4)], &cfg).unwrap();
    assert_eq!(k4.n_simple_eigenvectors, 1);
    // P4: every eigenvector but the constant one is orthogonal to it.
    let p4 = canonicalization_report(&[Graph::path(4)], &cfg).unwrap();
    assert_eq!(p4.n_simple_eigenvectors, 4);
    assert_eq!(p4.input_sum_zero_pct, Some(75.0));
}
