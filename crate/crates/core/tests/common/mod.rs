#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spectralwl::{eigendecompose, truncate, Graph, Matrix, SignedPermutation, SpectralPair, SymmetricMatrix, TruncateOrder};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_perm(rng: &mut impl Rng, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}

pub fn random_signed(rng: &mut impl Rng, n: usize, k: usize) -> SignedPermutation {
    let signs = (0..k).map(|_| if rng.gen_bool(0.5) { 1 } else { -1 }).collect();
    SignedPermutation::new(random_perm(rng, n), signs).unwrap()
}

pub fn lambdas(k: usize) -> Vec<f64> {
    (0..k).rev().map(|i| i as f64 + 1.0).collect()
}

/// Small-integer entries so that ties (and therefore symmetries) are common.
/// Exactly `zeros` entries are zero, spread over distinct positions.
pub fn random_int_pair(rng: &mut impl Rng, n: usize, k: usize, zeros: usize) -> SpectralPair {
    let values = [-2.0, -1.0, 1.0, 2.0];
    let mut data: Vec<f64> = (0..n * k).map(|_| *values.choose(rng).unwrap()).collect();
    let mut cells: Vec<usize> = (0..n * k).collect();
    cells.shuffle(rng);
    for &c in &cells[..zeros] {
        data[c] = 0.0;
    }
    SpectralPair::new(Matrix::from_row_major(n, k, data).unwrap(), lambdas(k)).unwrap()
}

pub fn random_symmetric(rng: &mut impl Rng, n: usize) -> SymmetricMatrix {
    let mut m = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let x: f64 = rng.gen_range(-1.0..1.0);
            m[(i, j)] = x;
            m[(j, i)] = x;
        }
    }
    SymmetricMatrix::new(m).unwrap()
}

/// Orthonormal eigenvectors of a random symmetric matrix, top `k` columns.
pub fn random_real_pair(rng: &mut impl Rng, n: usize, k: usize) -> SpectralPair {
    loop {
        let ed = eigendecompose(&random_symmetric(rng, n)).unwrap();
        if let Ok(sp) = truncate(&ed, k, 1e-4, TruncateOrder::Largest) {
            return sp;
        }
    }
}

pub fn random_graph(rng: &mut impl Rng, n: usize, p: f64) -> Graph {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(p) {
                edges.push((i, j));
            }
        }
    }
    Graph::new(n, edges).unwrap()
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for x in 0..used.len() {
            if !used[x] {
                used[x] = true;
                prefix.push(x);
                go(prefix, used, out);
                prefix.pop();
                used[x] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Exhaustive sign-permutation isomorphism: every permutation, every sign
/// vector, entries compared at `tol`.
pub fn naive_signed_isomorphic(a: &Matrix, b: &Matrix, tol: f64) -> bool {
    let (n, k) = (a.rows(), a.cols());
    if b.rows() != n || b.cols() != k {
        return false;
    }
    permutations(n).iter().any(|perm| {
        (0..1u32 << k).any(|mask| {
            (0..n).all(|i| {
                (0..k).all(|q| {
                    let s = if mask >> q & 1 == 1 { -1.0 } else { 1.0 };
                    (a[(i, q)] * s - b[(perm[i], q)]).abs() <= tol
                })
            })
        })
    })
}

/// Number of sign-permutation automorphisms, counted exhaustively.
pub fn naive_automorphism_count(a: &Matrix, tol: f64) -> usize {
    let (n, k) = (a.rows(), a.cols());
    permutations(n)
        .iter()
        .map(|perm| {
            (0..1u32 << k)
                .filter(|mask| {
                    (0..n).all(|i| {
                        (0..k).all(|q| {
                            let s = if mask >> q & 1 == 1 { -1.0 } else { 1.0 };
                            (a[(i, q)] * s - a[(perm[i], q)]).abs() <= tol
                        })
                    })
                })
                .count()
        })
        .sum()
}

/// Does `P A Pᵀ = B` hold for some permutation, by trying all of them.
pub fn naive_perm_isomorphic(a: &SymmetricMatrix, b: &SymmetricMatrix, tol: f64) -> bool {
    let n = a.n();
    b.n() == n
        && permutations(n)
            .iter()
            .any(|p| (0..n).all(|i| (0..n).all(|j| (a[(i, j)] - b[(p[i], p[j])]).abs() <= tol)))
}

pub fn max_abs_diff(a: &Matrix, b: &Matrix) -> f64 {
    a.max_abs_diff(b).expect("same shape")
}
