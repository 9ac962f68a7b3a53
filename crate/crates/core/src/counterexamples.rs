//! Exact fixtures: the 12-node block pair `(U, V)`, its 24-node orthonormal
//! extension, and the 4-node pair used against orthogonal-group set encoders.
//!
//! Node `i` is row `i` of the `n × K` matrix, i.e. column `i` of the printed
//! transposed displays.

use crate::eigen::SpectralPair;
use crate::error::{Error, Result};
use crate::graph::SymmetricMatrix;
use crate::linalg::Matrix;

/// Elements of `{-1, 1}²` and the zero vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ZVector {
    Z0,
    Z1,
    Z2,
    Z3,
    Zero,
}

impl ZVector {
    pub const GROUP: [ZVector; 4] = [ZVector::Z0, ZVector::Z1, ZVector::Z2, ZVector::Z3];

    pub fn entries(self) -> [f64; 2] {
        match self {
            ZVector::Z0 => [1.0, 1.0],
            ZVector::Z1 => [-1.0, 1.0],
            ZVector::Z2 => [1.0, -1.0],
            ZVector::Z3 => [-1.0, -1.0],
            ZVector::Zero => [0.0, 0.0],
        }
    }

    fn from_entries(e: [f64; 2]) -> ZVector {
        [ZVector::Z0, ZVector::Z1, ZVector::Z2, ZVector::Z3, ZVector::Zero]
            .into_iter()
            .find(|z| z.entries() == e)
            .expect("entries of a product of z-vectors")
    }
}

/// Elementwise product.
impl std::ops::Mul for ZVector {
    type Output = ZVector;

    fn mul(self, other: ZVector) -> ZVector {
        let [a0, a1] = self.entries();
        let [b0, b1] = other.entries();
        ZVector::from_entries([a0 * b0, a1 * b1])
    }
}

use ZVector::{Z0, Z1, Z2, Z3, Zero as O};

pub const DEFAULT_COUNTEREXAMPLE_LAMBDAS: [f64; 6] = [6.0, 5.0, 4.0, 3.0, 2.0, 1.0];

/// The three 2-row bands of `Uᵀ`, one z-vector per node.
pub const U_BANDS: [[ZVector; 12]; 3] = [
    [Z0, Z1, Z2, Z3, O, O, O, O, Z0, Z1, Z2, Z3],
    [Z0, Z1, Z2, Z3, Z0, Z1, Z2, Z3, O, O, O, O],
    [O, O, O, O, Z0, Z1, Z3, Z2, Z0, Z2, Z1, Z3],
];

/// The three 2-row bands of `Vᵀ`; only the third band differs from `U`.
pub const V_BANDS: [[ZVector; 12]; 3] = [
    [Z0, Z1, Z2, Z3, O, O, O, O, Z0, Z1, Z2, Z3],
    [Z0, Z1, Z2, Z3, Z0, Z1, Z2, Z3, O, O, O, O],
    [O, O, O, O, Z1, Z0, Z2, Z3, Z2, Z0, Z3, Z1],
];

fn check_lambdas(lambdas: Option<[f64; 6]>) -> Result<Vec<f64>> {
    let l = lambdas.unwrap_or(DEFAULT_COUNTEREXAMPLE_LAMBDAS);
    if l.windows(2).any(|w| !(w[0] > w[1])) {
        return Err(Error::domain("counterexample eigenvalues must be strictly decreasing"));
    }
    Ok(l.to_vec())
}

/// `12 × 6` matrix with row `i` = (band1[i], band2[i], band3[i]), each band
/// entry scaled by `scale(band, node)`.
fn bands_to_matrix(bands: &[[ZVector; 12]; 3], scale: impl Fn(usize, usize) -> f64) -> Matrix {
    let mut m = Matrix::zeros(12, 6);
    for (b, band) in bands.iter().enumerate() {
        for (i, z) in band.iter().enumerate() {
            let [x, y] = z.entries();
            let s = scale(b, i);
            m[(i, 2 * b)] = s * x;
            m[(i, 2 * b + 1)] = s * y;
        }
    }
    m
}

pub fn counterexample_matrix(bands: &[[ZVector; 12]; 3]) -> Matrix {
    bands_to_matrix(bands, |_, _| 1.0)
}

/// The 12-node pair `(U, V)` with `K = 6`, sharing `lambdas`
/// (default `(6, 5, 4, 3, 2, 1)`).
pub fn gen_epnn_counterexample(lambdas: Option<[f64; 6]>) -> Result<(SpectralPair, SpectralPair)> {
    let l = check_lambdas(lambdas)?;
    Ok((
        SpectralPair::new(counterexample_matrix(&U_BANDS), l.clone())?,
        SpectralPair::new(counterexample_matrix(&V_BANDS), l)?,
    ))
}

/// Extension rows `Û` (resp. `V̂`): band 1 scaled by 2; band 2 scaled by
/// `-1/2` on nodes 0..4 and by 2 on nodes 4..8; band 3 scaled by `-1/2`.
pub fn orthogonalization_matrix(bands: &[[ZVector; 12]; 3]) -> Matrix {
    bands_to_matrix(bands, |b, i| match (b, i) {
        (0, _) => 2.0,
        (1, 0..=3) => -0.5,
        (1, _) => 2.0,
        _ => -0.5,
    })
}

fn stack_and_normalize(top: &Matrix, bottom: &Matrix) -> Matrix {
    let rows: Vec<Vec<f64>> = top.to_rows().into_iter().chain(bottom.to_rows()).collect();
    let mut m = Matrix::from_rows(&rows).expect("equal widths");
    for q in 0..m.cols() {
        let norm = m.column(q).iter().map(|x| x * x).sum::<f64>().sqrt();
        for i in 0..m.rows() {
            m[(i, q)] /= norm;
        }
    }
    m
}

/// 24-node pair `(Ũ, Ṽ)`: `U` stacked on `Û`, columns scaled to unit norm.
pub fn gen_orthonormal_counterexample(
    lambdas: Option<[f64; 6]>,
) -> Result<(SpectralPair, SpectralPair)> {
    let l = check_lambdas(lambdas)?;
    let u = stack_and_normalize(&counterexample_matrix(&U_BANDS), &orthogonalization_matrix(&U_BANDS));
    let v = stack_and_normalize(&counterexample_matrix(&V_BANDS), &orthogonalization_matrix(&V_BANDS));
    Ok((SpectralPair::new(u, l.clone())?, SpectralPair::new(v, l)?))
}

#[derive(Debug, Clone, PartialEq)]
pub struct OgePair {
    pub u1: Matrix,
    pub u2: Matrix,
    pub l1: SymmetricMatrix,
    pub l2: SymmetricMatrix,
}

pub const OGE_LAMBDAS: [f64; 2] = [1.0, 2.0];

const L1_PRINTED: [[f64; 4]; 4] = [
    [9.0, 11.0, 17.0, 19.0],
    [11.0, 19.0, 23.0, 31.0],
    [17.0, 23.0, 33.0, 39.0],
    [19.0, 31.0, 39.0, 51.0],
];

const L2_PRINTED: [[f64; 4]; 4] = [
    [9.0, 11.0, 15.0, 21.0],
    [11.0, 19.0, 25.0, 29.0],
    [15.0, 25.0, 33.0, 39.0],
    [21.0, 29.0, 39.0, 51.0],
];

/// Two 4×2 eigenvector matrices and the matrices `λ₁u₁u₁ᵀ + λ₂u₂u₂ᵀ` they
/// induce with `λ = (1, 2)`, as printed.
pub fn gen_oge_pair() -> OgePair {
    OgePair {
        u1: Matrix::from_rows(&[[1.0, 2.0], [-1.0, 3.0], [1.0, 4.0], [-1.0, 5.0]]).expect("4x2"),
        u2: Matrix::from_rows(&[[-1.0, 2.0], [1.0, 3.0], [1.0, 4.0], [-1.0, 5.0]]).expect("4x2"),
        l1: SymmetricMatrix::from_rows(&L1_PRINTED).expect("symmetric"),
        l2: SymmetricMatrix::from_rows(&L2_PRINTED).expect("symmetric"),
    }
}

/// `Σ_q λ_q u_q u_qᵀ` over the columns of `u`.
pub fn weighted_outer_sum(u: &Matrix, lambdas: &[f64]) -> Matrix {
    let n = u.rows();
    let mut out = Matrix::zeros(n, n);
    for (q, &l) in lambdas.iter().enumerate() {
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] += l * u[(i, q)] * u[(j, q)];
            }
        }
    }
    out
}
