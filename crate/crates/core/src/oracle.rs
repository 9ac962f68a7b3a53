//! Brute-force ground truth: sign-permutation isomorphism and automorphisms
//! of spectral pairs, and plain permutation isomorphism of small matrices.

use serde::{Deserialize, Serialize};

use crate::eigen::SpectralPair;
use crate::error::{Error, Result};
use crate::graph::{check_permutation, SymmetricMatrix};
use crate::linalg::Matrix;

pub const DEFAULT_ORACLE_TOL: f64 = 1e-6;
pub const DEFAULT_SIGNED_CAP: usize = 24;
pub const DEFAULT_MATRIX_CAP: usize = 10;

/// Node permutation with per-column signs. Acting on `V` it moves row `i`
/// to row `perm[i]` and multiplies column `q` by `signs[q]`, i.e. `P V S`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignedPermutation {
    pub perm: Vec<usize>,
    pub signs: Vec<i8>,
}

impl SignedPermutation {
    pub fn new(perm: Vec<usize>, signs: Vec<i8>) -> Result<Self> {
        check_permutation(&perm, perm.len())?;
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::domain("signs must be +1 or -1"));
        }
        Ok(SignedPermutation { perm, signs })
    }

    pub fn identity(n: usize, k: usize) -> Self {
        SignedPermutation { perm: (0..n).collect(), signs: vec![1; k] }
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &p)| i == p) && self.signs.iter().all(|&s| s == 1)
    }

    pub fn apply_to_matrix(&self, v: &Matrix) -> Result<Matrix> {
        if v.rows() != self.perm.len() || v.cols() != self.signs.len() {
            return Err(Error::domain(format!(
                "signed permutation of size {}x{} cannot act on a {}x{} matrix",
                self.perm.len(),
                self.signs.len(),
                v.rows(),
                v.cols()
            )));
        }
        let mut out = Matrix::zeros(v.rows(), v.cols());
        for (i, &p) in self.perm.iter().enumerate() {
            for (q, &s) in self.signs.iter().enumerate() {
                out[(p, q)] = f64::from(s) * v[(i, q)];
            }
        }
        Ok(out)
    }

    /// `g · sp`; eigenvalues are unchanged.
    pub fn apply(&self, sp: &SpectralPair) -> Result<SpectralPair> {
        Ok(sp.with_vectors(self.apply_to_matrix(sp.vectors())?))
    }

    /// `self ∘ other`: first `other`, then `self`.
    pub fn compose(&self, other: &SignedPermutation) -> SignedPermutation {
        SignedPermutation {
            perm: other.perm.iter().map(|&p| self.perm[p]).collect(),
            signs: self.signs.iter().zip(&other.signs).map(|(a, b)| a * b).collect(),
        }
    }
}

fn lambdas_match(a: &SpectralPair, b: &SpectralPair, tol: f64) -> bool {
    a.lambdas().iter().zip(b.lambdas()).all(|(x, y)| (x - y).abs() <= tol)
}

/// Backtracking over node assignments. Column signs are forced by the first
/// matched entry that is not near zero; candidates are restricted to rows
/// with matching absolute values.
struct SignedSearch<'a> {
    a: &'a Matrix,
    b: &'a Matrix,
    tol: f64,
    order: Vec<usize>,
    candidates: Vec<Vec<usize>>,
    perm: Vec<usize>,
    used: Vec<bool>,
    signs: Vec<i8>,
}

impl<'a> SignedSearch<'a> {
    fn new(a: &'a Matrix, b: &'a Matrix, tol: f64) -> Self {
        let n = a.rows();
        let candidates: Vec<Vec<usize>> = (0..n)
            .map(|i| {
                (0..n)
                    .filter(|&j| {
                        a.row(i).iter().zip(b.row(j)).all(|(x, y)| (x.abs() - y.abs()).abs() <= tol)
                    })
                    .collect()
            })
            .collect();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&i| (candidates[i].len(), i));
        SignedSearch {
            a,
            b,
            tol,
            order,
            candidates,
            perm: vec![usize::MAX; n],
            used: vec![false; n],
            signs: vec![0; a.cols()],
        }
    }

    /// Calls `visit` on every witness; stops early when it returns `false`.
    fn run(&mut self, visit: &mut dyn FnMut(&SignedPermutation) -> bool) {
        if self.candidates.iter().any(Vec::is_empty) {
            return;
        }
        self.descend(0, visit);
    }

    fn descend(&mut self, depth: usize, visit: &mut dyn FnMut(&SignedPermutation) -> bool) -> bool {
        if depth == self.order.len() {
            return self.emit_leaf(visit);
        }
        let i = self.order[depth];
        for c in 0..self.candidates[i].len() {
            let j = self.candidates[i][c];
            if self.used[j] {
                continue;
            }
            let Some(trail) = self.try_assign(i, j) else { continue };
            self.used[j] = true;
            self.perm[i] = j;
            let keep_going = self.descend(depth + 1, visit);
            self.used[j] = false;
            self.perm[i] = usize::MAX;
            for q in trail {
                self.signs[q] = 0;
            }
            if !keep_going {
                return false;
            }
        }
        true
    }

    /// Checks row `i -> j` against the current signs, fixing unset signs.
    /// Returns the columns whose sign was fixed here.
    fn try_assign(&mut self, i: usize, j: usize) -> Option<Vec<usize>> {
        let mut trail = Vec::new();
        for q in 0..self.a.cols() {
            let x = self.a[(i, q)];
            let y = self.b[(j, q)];
            let ok = match self.signs[q] {
                0 if x.abs() > self.tol => {
                    let s: i8 = if (x > 0.0) == (y > 0.0) { 1 } else { -1 };
                    if (f64::from(s) * x - y).abs() <= self.tol {
                        self.signs[q] = s;
                        trail.push(q);
                        true
                    } else {
                        false
                    }
                }
                0 => (x - y).abs() <= self.tol || (x + y).abs() <= self.tol,
                s => (f64::from(s) * x - y).abs() <= self.tol,
            };
            if !ok {
                for &t in &trail {
                    self.signs[t] = 0;
                }
                return None;
            }
        }
        Some(trail)
    }

    /// Expands columns whose sign was never forced and validates each witness.
    fn emit_leaf(&mut self, visit: &mut dyn FnMut(&SignedPermutation) -> bool) -> bool {
        let free: Vec<usize> = (0..self.signs.len()).filter(|&q| self.signs[q] == 0).collect();
        for mask in 0u64..(1u64 << free.len()) {
            let mut signs = self.signs.clone();
            for (bit, &q) in free.iter().enumerate() {
                signs[q] = if mask >> bit & 1 == 0 { 1 } else { -1 };
            }
            let g = SignedPermutation { perm: self.perm.clone(), signs };
            let image = g.apply_to_matrix(self.a).expect("shapes checked");
            let err = image.max_abs_diff(self.b).expect("shapes checked");
            if err <= self.tol && !visit(&g) {
                return false;
            }
        }
        true
    }
}

fn check_pair(a: &SpectralPair, b: &SpectralPair, cap: usize) -> Result<()> {
    if a.k() != b.k() {
        return Err(Error::KMismatch { a: a.k(), b: b.k() });
    }
    let n = a.n().max(b.n());
    if n > cap {
        return Err(Error::ResourceLimit { n, cap });
    }
    Ok(())
}

pub fn find_signed_isomorphism(
    a: &SpectralPair,
    b: &SpectralPair,
    tol: f64,
) -> Result<Option<SignedPermutation>> {
    find_signed_isomorphism_capped(a, b, tol, DEFAULT_SIGNED_CAP)
}

/// A witness `g` with `‖g·a − b‖_max ≤ tol`, or `None` after exhaustive search.
pub fn find_signed_isomorphism_capped(
    a: &SpectralPair,
    b: &SpectralPair,
    tol: f64,
    cap: usize,
) -> Result<Option<SignedPermutation>> {
    check_pair(a, b, cap)?;
    if a.n() != b.n() || !lambdas_match(a, b, tol) {
        return Ok(None);
    }
    let mut found = None;
    SignedSearch::new(a.vectors(), b.vectors(), tol).run(&mut |g| {
        found = Some(g.clone());
        false
    });
    Ok(found)
}

/// Up to `limit` signed automorphisms of `sp`, the identity included.
pub fn signed_automorphisms(sp: &SpectralPair, tol: f64, limit: usize) -> Result<Vec<SignedPermutation>> {
    check_pair(sp, sp, DEFAULT_SIGNED_CAP)?;
    let mut out = Vec::new();
    SignedSearch::new(sp.vectors(), sp.vectors(), tol).run(&mut |g| {
        out.push(g.clone());
        out.len() < limit
    });
    Ok(out)
}

/// True iff `(identity, all +1)` is the only `g` with `g·sp == sp`.
pub fn automorphisms_trivial(sp: &SpectralPair, tol: f64) -> Result<bool> {
    check_pair(sp, sp, DEFAULT_SIGNED_CAP)?;
    let mut nontrivial = false;
    SignedSearch::new(sp.vectors(), sp.vectors(), tol).run(&mut |g| {
        nontrivial = !g.is_identity();
        !nontrivial
    });
    Ok(!nontrivial)
}

/// A permutation `π` with `‖P m1 Pᵀ − m2‖_max ≤ tol`, or `None`.
pub fn perm_isomorphic_matrices(
    m1: &SymmetricMatrix,
    m2: &SymmetricMatrix,
    tol: f64,
) -> Result<Option<Vec<usize>>> {
    perm_isomorphic_matrices_capped(m1, m2, tol, DEFAULT_MATRIX_CAP)
}

pub fn perm_isomorphic_matrices_capped(
    m1: &SymmetricMatrix,
    m2: &SymmetricMatrix,
    tol: f64,
    cap: usize,
) -> Result<Option<Vec<usize>>> {
    let n = m1.n();
    if m2.n() != n {
        return Err(Error::domain(format!("matrix sizes differ ({n} vs {})", m2.n())));
    }
    if n > cap {
        return Err(Error::ResourceLimit { n, cap });
    }
    let mut perm = vec![usize::MAX; n];
    let mut used = vec![false; n];
    if extend_matrix_perm(m1, m2, tol, 0, &mut perm, &mut used) {
        let image = m1.conjugate(&perm)?;
        debug_assert!(image.matrix().max_abs_diff(m2.matrix()).unwrap() <= tol);
        Ok(Some(perm))
    } else {
        Ok(None)
    }
}

fn extend_matrix_perm(
    m1: &SymmetricMatrix,
    m2: &SymmetricMatrix,
    tol: f64,
    i: usize,
    perm: &mut [usize],
    used: &mut [bool],
) -> bool {
    let n = perm.len();
    if i == n {
        return true;
    }
    for j in 0..n {
        if used[j] || (m1[(i, i)] - m2[(j, j)]).abs() > tol {
            continue;
        }
        if (0..i).any(|k| (m1[(i, k)] - m2[(j, perm[k])]).abs() > tol) {
            continue;
        }
        perm[i] = j;
        used[j] = true;
        if extend_matrix_perm(m1, m2, tol, i + 1, perm, used) {
            return true;
        }
        used[j] = false;
        perm[i] = usize::MAX;
    }
    false
}
