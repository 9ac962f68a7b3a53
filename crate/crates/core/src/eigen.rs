//! Dense symmetric eigendecomposition (cyclic Jacobi), eigenvalue grouping
//! and truncation to a simple-spectrum [`SpectralPair`].

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::graph::SymmetricMatrix;
use crate::linalg::Matrix;

pub const DEFAULT_EIG_TOL: f64 = 1e-4;

/// Relative off-diagonal Frobenius norm at which a sweep loop stops.
const OFF_DIAG_THRESHOLD: f64 = 1e-12;
const MAX_SWEEPS: usize = 100;

/// Eigenvalues in non-increasing order with unit eigenvectors as columns.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    pub lambdas: Vec<f64>,
    pub vectors: Matrix,
}

impl EigenDecomposition {
    pub fn n(&self) -> usize {
        self.lambdas.len()
    }

    /// `V diag(λ) Vᵀ`.
    pub fn reconstruct(&self) -> Matrix {
        let n = self.n();
        let mut out = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = (0..n)
                    .map(|q| self.vectors[(i, q)] * self.lambdas[q] * self.vectors[(j, q)])
                    .sum();
            }
        }
        out
    }
}

fn off_diagonal_norm(a: &Matrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for p in 0..n {
        for q in p + 1..n {
            s += 2.0 * a[(p, q)] * a[(p, q)];
        }
    }
    s.sqrt()
}

/// Cyclic Jacobi eigendecomposition. Sweeps visit `(p, q)` pairs row by row
/// with `p < q`; the result is deterministic for a given input.
pub fn eigendecompose(m: &SymmetricMatrix) -> Result<EigenDecomposition> {
    let n = m.n();
    let mut a = m.matrix().clone();
    let mut v = Matrix::identity(n);
    let frob = a.as_slice().iter().map(|x| x * x).sum::<f64>().sqrt();
    let threshold = OFF_DIAG_THRESHOLD * frob.max(1.0);

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= threshold {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged {
        let residual = off_diagonal_norm(&a);
        if residual > threshold {
            return Err(Error::NoConvergence { residual });
        }
    }

    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)]).collect();
    let mut order: Vec<usize> = (0..n).collect();
    // Stable: equal eigenvalues keep their original index order.
    order.sort_by(|&x, &y| diag[y].partial_cmp(&diag[x]).expect("finite eigenvalues"));
    Ok(EigenDecomposition {
        lambdas: order.iter().map(|&i| diag[i]).collect(),
        vectors: v.select_columns(&order),
    })
}

fn rotate(a: &mut Matrix, v: &mut Matrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    if apq == 0.0 {
        return;
    }
    let n = a.rows();
    let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        let sgn = if theta >= 0.0 { 1.0 } else { -1.0 };
        sgn / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    for k in 0..n {
        if k == p || k == q {
            continue;
        }
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        let new_kp = c * akp - s * akq;
        let new_kq = s * akp + c * akq;
        a[(k, p)] = new_kp;
        a[(p, k)] = new_kp;
        a[(k, q)] = new_kq;
        a[(q, k)] = new_kq;
    }
    a[(p, p)] -= t * apq;
    a[(q, q)] += t * apq;
    a[(p, q)] = 0.0;
    a[(q, p)] = 0.0;

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = c * vkp - s * vkq;
        v[(k, q)] = s * vkp + c * vkq;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenvalueGroup {
    /// Mean of the grouped eigenvalues.
    pub representative: f64,
    pub multiplicity: usize,
    pub column_indices: Vec<usize>,
}

/// Greedy left-to-right grouping: a new group starts whenever the gap to the
/// previous eigenvalue exceeds `eig_tol`.
pub fn group_eigenvalues(lambdas: &[f64], eig_tol: f64) -> Result<Vec<EigenvalueGroup>> {
    if !(eig_tol > 0.0) {
        return Err(Error::domain("eig_tol must be positive"));
    }
    if let Some(w) = lambdas.windows(2).position(|w| w[0] < w[1]) {
        return Err(Error::domain(format!(
            "eigenvalues must be non-increasing (positions {w} and {})",
            w + 1
        )));
    }
    let mut groups: Vec<EigenvalueGroup> = Vec::new();
    for (i, &l) in lambdas.iter().enumerate() {
        match groups.last_mut() {
            Some(g) if lambdas[i - 1] - l <= eig_tol => {
                g.multiplicity += 1;
                g.column_indices.push(i);
            }
            _ => groups.push(EigenvalueGroup {
                representative: 0.0,
                multiplicity: 1,
                column_indices: vec![i],
            }),
        }
    }
    for g in &mut groups {
        g.representative =
            g.column_indices.iter().map(|&i| lambdas[i]).sum::<f64>() / g.multiplicity as f64;
    }
    Ok(groups)
}

pub fn is_simple_spectrum(ed: &EigenDecomposition, eig_tol: f64) -> bool {
    group_eigenvalues(&ed.lambdas, eig_tol)
        .map(|gs| gs.iter().all(|g| g.multiplicity == 1))
        .unwrap_or(false)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TruncateOrder {
    #[default]
    Largest,
    /// Smallest eigenvalues above `eig_tol` in magnitude, skipping the
    /// (near-)zero part of the spectrum.
    SmallestNonzero,
}

/// Keeps `k` eigenpairs. Every kept eigenvalue must be simple in the full
/// spectrum, otherwise the columns would carry more than a sign ambiguity.
pub fn truncate(
    ed: &EigenDecomposition,
    k: usize,
    eig_tol: f64,
    order: TruncateOrder,
) -> Result<SpectralPair> {
    let n = ed.n();
    if k == 0 {
        return Err(Error::domain("k must be at least 1"));
    }
    let candidates: Vec<usize> = match order {
        TruncateOrder::Largest => (0..n).collect(),
        TruncateOrder::SmallestNonzero => {
            (0..n).rev().filter(|&i| ed.lambdas[i].abs() > eig_tol).collect()
        }
    };
    if k > candidates.len() {
        return Err(Error::domain(format!(
            "requested k={k} but only {} eigenpairs are available",
            candidates.len()
        )));
    }
    let mut selected = candidates[..k].to_vec();
    selected.sort_unstable();

    let groups = group_eigenvalues(&ed.lambdas, eig_tol)?;
    let mut group_of = vec![0usize; n];
    for (g, grp) in groups.iter().enumerate() {
        for &i in &grp.column_indices {
            group_of[i] = g;
        }
    }
    let colliding: Vec<usize> = selected
        .iter()
        .flat_map(|&i| {
            let g = &groups[group_of[i]];
            if g.multiplicity > 1 {
                g.column_indices.clone()
            } else {
                Vec::new()
            }
        })
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    if !colliding.is_empty() {
        return Err(Error::NotSimple { indices: colliding });
    }

    SpectralPair::with_tol(
        ed.vectors.select_columns(&selected),
        selected.iter().map(|&i| ed.lambdas[i]).collect(),
        eig_tol,
    )
}

/// `K` eigenvector columns sampled at `n` nodes together with strictly
/// decreasing eigenvalues.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralPair {
    vectors: Matrix,
    lambdas: Vec<f64>,
}

impl SpectralPair {
    /// Requires gaps `λ_q - λ_{q+1} > DEFAULT_EIG_TOL`.
    pub fn new(vectors: Matrix, lambdas: Vec<f64>) -> Result<Self> {
        Self::with_tol(vectors, lambdas, DEFAULT_EIG_TOL)
    }

    pub fn with_tol(vectors: Matrix, lambdas: Vec<f64>, eig_tol: f64) -> Result<Self> {
        if vectors.cols() != lambdas.len() {
            return Err(Error::domain(format!(
                "{} eigenvector columns but {} eigenvalues",
                vectors.cols(),
                lambdas.len()
            )));
        }
        if vectors.rows() == 0 || lambdas.is_empty() {
            return Err(Error::domain("spectral pair must have n >= 1 and k >= 1"));
        }
        if vectors.as_slice().iter().chain(&lambdas).any(|x| !x.is_finite()) {
            return Err(Error::domain("spectral pair has non-finite entries"));
        }
        if let Some(q) = lambdas.windows(2).position(|w| !(w[0] - w[1] > eig_tol)) {
            return Err(Error::NotSimple { indices: vec![q, q + 1] });
        }
        Ok(SpectralPair { vectors, lambdas })
    }

    pub fn n(&self) -> usize {
        self.vectors.rows()
    }

    pub fn k(&self) -> usize {
        self.lambdas.len()
    }

    pub fn vectors(&self) -> &Matrix {
        &self.vectors
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    /// Eigenvector entries at node `i`.
    pub fn row(&self, i: usize) -> &[f64] {
        self.vectors.row(i)
    }

    /// Same eigenvalues, different vectors of the same shape.
    pub(crate) fn with_vectors(&self, vectors: Matrix) -> SpectralPair {
        debug_assert_eq!(vectors.rows(), self.n());
        debug_assert_eq!(vectors.cols(), self.k());
        SpectralPair { vectors, lambdas: self.lambdas.clone() }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("spectral pair serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

#[derive(Serialize, Deserialize)]
struct SpectralPairJson {
    n: usize,
    k: usize,
    lambdas: Vec<f64>,
    #[serde(rename = "V")]
    v: Matrix,
}

impl Serialize for SpectralPair {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        SpectralPairJson {
            n: self.n(),
            k: self.k(),
            lambdas: self.lambdas.clone(),
            v: self.vectors.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SpectralPair {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = SpectralPairJson::deserialize(deserializer)?;
        if raw.v.rows() != raw.n || raw.v.cols() != raw.k {
            return Err(D::Error::custom(format!(
                "V is {}x{} but n={}, k={}",
                raw.v.rows(),
                raw.v.cols(),
                raw.n,
                raw.k
            )));
        }
        SpectralPair::new(raw.v, raw.lambdas).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{laplacian, Graph};

    fn sym(rows: &[&[f64]]) -> SymmetricMatrix {
        SymmetricMatrix::from_rows(rows).unwrap()
    }

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b}");
    }

    #[test]
    fn two_by_two_closed_form() {
        let ed = eigendecompose(&sym(&[&[1.0, -1.0], &[-1.0, 1.0]])).unwrap();
        assert_close(ed.lambdas[0], 2.0, 1e-12);
        assert_close(ed.lambdas[1], 0.0, 1e-12);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let c0 = ed.vectors.column(0);
        let c1 = ed.vectors.column(1);
        assert_close(c0[0] * c0[1], -0.5, 1e-12);
        assert_close(c0[0].abs(), h, 1e-12);
        assert_close(c1[0] * c1[1], 0.5, 1e-12);
    }

    #[test]
    fn identity_has_multiplicity_three() {
        let ed = eigendecompose(&SymmetricMatrix::new(Matrix::identity(3)).unwrap()).unwrap();
        assert_eq!(ed.lambdas, vec![1.0, 1.0, 1.0]);
        let g = group_eigenvalues(&ed.lambdas, DEFAULT_EIG_TOL).unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!(g[0].multiplicity, 3);
    }

    #[test]
    fn diagonal_input_gives_coordinate_basis() {
        let m = SymmetricMatrix::new(Matrix::from_diag(&[2.0, 5.0, -1.0])).unwrap();
        let ed = eigendecompose(&m).unwrap();
        assert_eq!(ed.lambdas, vec![5.0, 2.0, -1.0]);
        assert_eq!(ed.vectors[(1, 0)].abs(), 1.0);
        assert_eq!(ed.vectors[(0, 1)].abs(), 1.0);
        assert_eq!(ed.vectors[(2, 2)].abs(), 1.0);
    }

    #[test]
    fn grouping_examples() {
        let g = group_eigenvalues(&[2.00005, 2.0, 0.0], 1e-4).unwrap();
        assert_eq!(g.iter().map(|g| g.multiplicity).collect::<Vec<_>>(), vec![2, 1]);
        let g = group_eigenvalues(&[3.0, 2.0, 1.0], 1e-4).unwrap();
        assert_eq!(g.len(), 3);
        assert!(group_eigenvalues(&[1.0, 2.0], 1e-4).is_err());
    }

    #[test]
    fn k4_and_path_spectra() {
        let k4 = eigendecompose(&laplacian(&Graph::complete(4))).unwrap();
        let groups = group_eigenvalues(&k4.lambdas, DEFAULT_EIG_TOL).unwrap();
        assert_eq!(groups.len(), 2);
        assert_eq!(groups[0].multiplicity, 3);
        assert_close(groups[0].representative, 4.0, 1e-10);
        assert_eq!(groups[1].multiplicity, 1);
        assert!(!is_simple_spectrum(&k4, DEFAULT_EIG_TOL));

        let p3 = eigendecompose(&laplacian(&Graph::path(3))).unwrap();
        assert!(is_simple_spectrum(&p3, DEFAULT_EIG_TOL));
        for (l, e) in p3.lambdas.iter().zip([3.0, 1.0, 0.0]) {
            assert_close(*l, e, 1e-12);
        }
        let single = eigendecompose(&SymmetricMatrix::from_rows(&[[7.0]]).unwrap()).unwrap();
        assert!(is_simple_spectrum(&single, DEFAULT_EIG_TOL));
    }

    #[test]
    fn truncate_examples() {
        let m = SymmetricMatrix::new(Matrix::from_diag(&[5.0, 2.0, -1.0])).unwrap();
        let sp = truncate(&eigendecompose(&m).unwrap(), 2, 1e-4, TruncateOrder::Largest).unwrap();
        assert_eq!(sp.lambdas(), &[5.0, 2.0]);
        assert_eq!(sp.vectors()[(0, 0)].abs(), 1.0);
        assert_eq!(sp.vectors()[(1, 1)].abs(), 1.0);

        let k4 = eigendecompose(&laplacian(&Graph::complete(4))).unwrap();
        match truncate(&k4, 2, 1e-4, TruncateOrder::Largest) {
            Err(Error::NotSimple { indices }) => assert_eq!(indices, vec![0, 1, 2]),
            other => panic!("expected NotSimple, got {other:?}"),
        }

        let p3 = eigendecompose(&laplacian(&Graph::path(3))).unwrap();
        let sp = truncate(&p3, 3, 1e-4, TruncateOrder::Largest).unwrap();
        assert_eq!(sp.k(), 3);
        assert_eq!(sp.vectors(), &p3.vectors);

        let sp = truncate(&p3, 1, 1e-4, TruncateOrder::SmallestNonzero).unwrap();
        assert_close(sp.lambdas()[0], 1.0, 1e-12);
    }

    #[test]
    fn spectral_pair_json() {
        let sp = SpectralPair::new(
            Matrix::from_rows(&[[1.0, 0.5], [-1.0, 0.25]]).unwrap(),
            vec![2.0, 1.0],
        )
        .unwrap();
        let text = sp.to_json();
        assert_eq!(text, r#"{"n":2,"k":2,"lambdas":[2.0,1.0],"V":[[1.0,0.5],[-1.0,0.25]]}"#);
        assert_eq!(SpectralPair::from_json(&text).unwrap(), sp);
        assert!(SpectralPair::from_json(r#"{"n":1,"k":2,"lambdas":[1.0,1.0],"V":[[1,2]]}"#)
            .is_err());
    }
}
