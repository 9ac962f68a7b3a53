//! Fixture values checked against the printed constructions and the golden
//! files under tests/data.

mod common;

use std::path::Path;

use spectralwl::counterexamples::{orthogonalization_matrix, weighted_outer_sum, OGE_LAMBDAS, U_BANDS};
use spectralwl::equi::UpdateRule;
use spectralwl::{
    equi_canonicalize, gen_epnn_counterexample, gen_oge_pair, gen_orthonormal_counterexample, reconstruct_from_purview,
    unique_node_ids, ColorRefiner, Error, Matrix, Quantizer,
};

fn data(name: &str) -> String {
    std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)).unwrap()
}

/// Transposed block displays, one band per string.
const U_T: [&str; 3] = [
    "z0 z1 z2 z3 0 0 0 0 z0 z1 z2 z3",
    "z0 z1 z2 z3 z0 z1 z2 z3 0 0 0 0",
    "0 0 0 0 z0 z1 z3 z2 z0 z2 z1 z3",
];
const V_T: [&str; 3] = [
    "z0 z1 z2 z3 0 0 0 0 z0 z1 z2 z3",
    "z0 z1 z2 z3 z0 z1 z2 z3 0 0 0 0",
    "0 0 0 0 z1 z0 z2 z3 z2 z0 z3 z1",
];

fn z(name: &str) -> [f64; 2] {
    match name {
        "z0" => [1.0, 1.0],
        "z1" => [-1.0, 1.0],
        "z2" => [1.0, -1.0],
        "z3" => [-1.0, -1.0],
        "0" => [0.0, 0.0],
        other => panic!("unknown block {other}"),
    }
}

fn from_display(bands: [&str; 3]) -> Matrix {
    let cells: Vec<Vec<&str>> = bands.iter().map(|b| b.split_whitespace().collect()).collect();
    let rows: Vec<Vec<f64>> = (0..12).map(|i| cells.iter().flat_map(|band| z(band[i])).collect()).collect();
    Matrix::from_rows(&rows).unwrap()
}

#[test]
fn counterexample_matches_printed_blocks() {
    let (u, v) = gen_epnn_counterexample(None).unwrap();
    assert_eq!(*u.vectors(), from_display(U_T));
    assert_eq!(*v.vectors(), from_display(V_T));
    assert_eq!(u.lambdas(), &[6.0, 5.0, 4.0, 3.0, 2.0, 1.0]);
    assert_eq!(u.row(0), &[1.0, 1.0, 1.0, 1.0, 0.0, 0.0]);
    for i in 0..4 {
        assert_eq!(u.row(i), v.row(i));
    }
    assert_eq!(v.row(4), &[0.0, 0.0, 1.0, 1.0, -1.0, 1.0]);
}

#[test]
fn counterexample_json_matches_golden() {
    let (u, v) = gen_epnn_counterexample(None).unwrap();
    assert_eq!(u.to_json() + "\n", data("epnn_U.json"));
    assert_eq!(v.to_json() + "\n", data("epnn_V.json"));
}

#[test]
fn orthogonalization_scales() {
    let hat = orthogonalization_matrix(&U_BANDS);
    // First band doubled; second band halved and negated on block one.
    assert_eq!(hat.row(0)[..2], [2.0, 2.0]);
    assert_eq!(hat.row(0)[2..4], [-0.5, -0.5]);
    assert_eq!(hat.row(4)[2..4], [2.0, 2.0]);
    assert_eq!(hat.row(8)[4..6], [-0.5, -0.5]);
}

#[test]
fn orthonormal_extension() {
    let (plain, _) = gen_epnn_counterexample(None).unwrap();
    let c = |m: &Matrix, a: usize, b: usize| -> f64 { (0..m.rows()).map(|i| m[(i, a)] * m[(i, b)]).sum() };
    assert_eq!(c(plain.vectors(), 0, 2), 4.0);
    let (u, v) = gen_orthonormal_counterexample(None).unwrap();
    for sp in [&u, &v] {
        assert_eq!(sp.n(), 24);
        let gram = sp.vectors().transpose().matmul(sp.vectors());
        assert!(common::max_abs_diff(&gram, &Matrix::identity(6)) <= 1e-9);
        assert!(c(sp.vectors(), 0, 2).abs() <= 1e-12);
    }
}

#[test]
fn oge_pair_matches_printed_matrices() {
    let oge = gen_oge_pair();
    let l1 = [[9, 11, 17, 19], [11, 19, 23, 31], [17, 23, 33, 39], [19, 31, 39, 51]];
    let l2 = [[9, 11, 15, 21], [11, 19, 25, 29], [15, 25, 33, 39], [21, 29, 39, 51]];
    for i in 0..4 {
        for j in 0..4 {
            assert_eq!(oge.l1[(i, j)], l1[i][j] as f64);
            assert_eq!(oge.l2[(i, j)], l2[i][j] as f64);
        }
    }
    // Integer outer products reproduce the printed matrix exactly.
    let u1 = [[1i64, 2], [-1, 3], [1, 4], [-1, 5]];
    for i in 0..4 {
        for j in 0..4 {
            let x = u1[i][0] * u1[j][0] + 2 * u1[i][1] * u1[j][1];
            assert_eq!(x, l1[i][j]);
        }
    }
    assert_eq!(weighted_outer_sum(&oge.u1, &OGE_LAMBDAS), *oge.l1.matrix());
}

#[test]
fn counterexample_refinement_facts() {
    let (u, _) = gen_epnn_counterexample(None).unwrap();
    let q = Quantizer::default();
    let mut r = ColorRefiner::new(q);
    let init = r.epnn_init(&u);
    assert_eq!(init.partition(), vec![vec![0, 1, 2, 3], vec![4, 5, 6, 7], vec![8, 9, 10, 11]]);
    let mut s = init;
    for _ in 0..5 {
        s = r.epnn_step(&s, &u).unwrap();
        assert_eq!(s.class_count(), 3);
    }
    assert!(matches!(reconstruct_from_purview(&u, 1e-6), Err(Error::FailedPrecondition(_))));
    let ids = unique_node_ids(&u, &q);
    assert!(!ids.unique);
}

#[test]
fn proof_rule_fills_node_five() {
    let (u, _) = gen_epnn_counterexample(None).unwrap();
    let mut r = ColorRefiner::new(Quantizer::default());
    let s0 = r.equi_init(&u);
    let s1 = r.equi_step(&s0, &u, UpdateRule::ProofRule).unwrap();
    // Node 5 gains z0 in its first band: (z0; z0; z0).
    assert_eq!(s1.vecs().row(4), &[1.0; 6]);
    // Block one and three rows are untouched.
    for i in (0..4).chain(8..12) {
        assert_eq!(s1.vecs().row(i), u.row(i));
    }
}

#[test]
fn printed_self_symmetric_vector() {
    let flags = spectralwl::canonicalize::negating_permutation(&[1.0, -1.0, 1.0, -1.0], 1e-12).unwrap();
    for (i, &j) in flags.iter().enumerate() {
        assert_eq!([1.0, -1.0, 1.0, -1.0][j], -[1.0, -1.0, 1.0, -1.0][i]);
    }
    // The swap (1 2)(3 4) in 1-based labels is one such permutation.
    let v = [1.0, -1.0, 1.0, -1.0];
    let swap = [1, 0, 3, 2];
    assert!((0..4).all(|i| v[swap[i]] == -v[i]));
}

#[test]
fn canonicalization_of_counterexample_is_deterministic() {
    let (u, _) = gen_epnn_counterexample(None).unwrap();
    let q = Quantizer::default();
    let a = equi_canonicalize(&u, UpdateRule::RandomTable { seed: 1 }, 2, 1e-7, &q).unwrap();
    let b = equi_canonicalize(&u, UpdateRule::RandomTable { seed: 1 }, 2, 1e-7, &q).unwrap();
    assert_eq!(a, b);
}
