//! Sign canonicalization of eigenvectors from the column sums of equivariant
//! features, and detection of eigenvectors no sign-invariant rule can fix.

use rayon::prelude::*;
use serde::Serialize;

use crate::color::Quantizer;
use crate::eigen::{eigendecompose, group_eigenvalues, SpectralPair};
use crate::epnn::ColorRefiner;
use crate::equi::{symmetric_sum, UpdateRule};
use crate::error::{Error, Result};
use crate::graph::{laplacian, Graph};
use crate::linalg::Matrix;

pub const DEFAULT_SUM_TOL: f64 = 1e-7;
pub const DEFAULT_CANON_ROUNDS: usize = 2;
pub const DEFAULT_CANON_RULE: UpdateRule = UpdateRule::RandomTable { seed: 1 };

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CanonResult {
    /// `+1`/`-1` per decidable column, `0` where the feature sum vanishes.
    pub signs: Vec<i8>,
    pub decidable: Vec<bool>,
    /// Column sums of the equivariant features the signs were read from.
    pub column_sums: Vec<f64>,
    #[serde(rename = "V_canon")]
    pub canonical: Matrix,
    #[serde(skip)]
    pub features: Matrix,
}

fn column_sum(m: &Matrix, q: usize) -> f64 {
    symmetric_sum(&mut m.column(q))
}

pub fn equi_canonicalize(
    sp: &SpectralPair,
    rule: UpdateRule,
    rounds: usize,
    sum_tol: f64,
    q: &Quantizer,
) -> Result<CanonResult> {
    if rounds == 0 {
        return Err(Error::domain("canonicalization needs at least one round"));
    }
    let mut refiner = ColorRefiner::new(*q);
    let mut state = refiner.equi_init(sp);
    for _ in 0..rounds {
        state = refiner.equi_step(&state, sp, rule)?;
    }
    let features = state.vecs().clone();
    let column_sums: Vec<f64> = (0..sp.k()).map(|c| column_sum(&features, c)).collect();
    let signs: Vec<i8> = column_sums
        .iter()
        .map(|&s| if s.abs() <= sum_tol { 0 } else if s > 0.0 { 1 } else { -1 })
        .collect();
    let mut canonical = sp.vectors().clone();
    for i in 0..sp.n() {
        for (c, &s) in signs.iter().enumerate() {
            if s < 0 {
                canonical[(i, c)] = -canonical[(i, c)];
            }
        }
    }
    Ok(CanonResult {
        decidable: signs.iter().map(|&s| s != 0).collect(),
        signs,
        column_sums,
        canonical,
        features,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ColumnFlags {
    pub sum_zero: bool,
    pub self_symmetric: bool,
}

/// A map `partner` with `v[partner[i]] ≈ -v[i]` for all `i`, if one exists.
///
/// Pairing the k-th smallest entry with the negation of the k-th largest is
/// optimal for one-dimensional threshold matching, so the search never needs
/// to backtrack.
pub fn negating_permutation(v: &[f64], tol: f64) -> Option<Vec<usize>> {
    let n = v.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| v[a].total_cmp(&v[b]).then(a.cmp(&b)));
    let mut partner = vec![0; n];
    for k in 0..n {
        let (lo, hi) = (order[k], order[n - 1 - k]);
        if (v[lo] + v[hi]).abs() > tol {
            return None;
        }
        partner[hi] = lo;
    }
    Some(partner)
}

pub fn column_flags(m: &Matrix, tol: f64) -> Vec<ColumnFlags> {
    (0..m.cols())
        .map(|c| {
            let col = m.column(c);
            ColumnFlags {
                sum_zero: column_sum(m, c).abs() <= tol,
                self_symmetric: negating_permutation(&col, tol).is_some(),
            }
        })
        .collect()
}

pub fn detect_uncanonicalizable(sp: &SpectralPair, tol: f64) -> Vec<ColumnFlags> {
    column_flags(sp.vectors(), tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
struct Tally {
    columns: usize,
    input_sum_zero: usize,
    input_symmetric: usize,
    output_sum_zero: usize,
    output_symmetric: usize,
}

impl Tally {
    fn add(self, o: Tally) -> Tally {
        Tally {
            columns: self.columns + o.columns,
            input_sum_zero: self.input_sum_zero + o.input_sum_zero,
            input_symmetric: self.input_symmetric + o.input_symmetric,
            output_sum_zero: self.output_sum_zero + o.output_sum_zero,
            output_symmetric: self.output_symmetric + o.output_symmetric,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CanonReport {
    pub input_sum_zero_pct: Option<f64>,
    pub input_uncanonicalizable_pct: Option<f64>,
    pub output_sum_zero_pct: Option<f64>,
    pub output_uncanonicalizable_pct: Option<f64>,
    pub n_simple_eigenvectors: usize,
    pub graph_count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CanonConfig {
    pub rule: UpdateRule,
    pub rounds: usize,
    pub eig_tol: f64,
    pub sum_tol: f64,
    pub quantizer: Quantizer,
}

impl Default for CanonConfig {
    fn default() -> Self {
        CanonConfig {
            rule: DEFAULT_CANON_RULE,
            rounds: DEFAULT_CANON_ROUNDS,
            eig_tol: crate::eigen::DEFAULT_EIG_TOL,
            sum_tol: DEFAULT_SUM_TOL,
            quantizer: Quantizer::default(),
        }
    }
}

/// Laplacian eigenvectors of `g` whose eigenvalue has multiplicity one.
pub fn simple_spectral_pair(g: &Graph, eig_tol: f64) -> Result<Option<SpectralPair>> {
    let ed = eigendecompose(&laplacian(g))?;
    let cols: Vec<usize> = group_eigenvalues(&ed.lambdas, eig_tol)?
        .into_iter()
        .filter(|grp| grp.multiplicity == 1)
        .map(|grp| grp.column_indices[0])
        .collect();
    if cols.is_empty() {
        return Ok(None);
    }
    let lambdas = cols.iter().map(|&c| ed.lambdas[c]).collect();
    SpectralPair::with_tol(ed.vectors.select_columns(&cols), lambdas, eig_tol).map(Some)
}

fn graph_tally(g: &Graph, cfg: &CanonConfig) -> Result<Tally> {
    let Some(sp) = simple_spectral_pair(g, cfg.eig_tol)? else {
        return Ok(Tally::default());
    };
    let count = |flags: &[ColumnFlags], f: fn(&ColumnFlags) -> bool| flags.iter().filter(|x| f(x)).count();
    let input = detect_uncanonicalizable(&sp, cfg.sum_tol);
    let result = equi_canonicalize(&sp, cfg.rule, cfg.rounds, cfg.sum_tol, &cfg.quantizer)?;
    let output = column_flags(&result.features, cfg.sum_tol);
    Ok(Tally {
        columns: sp.k(),
        input_sum_zero: count(&input, |f| f.sum_zero),
        input_symmetric: count(&input, |f| f.self_symmetric),
        output_sum_zero: count(&output, |f| f.sum_zero),
        output_symmetric: count(&output, |f| f.self_symmetric),
    })
}

/// Corpus-level percentages over all simple Laplacian eigenvectors. Graphs
/// are processed on the current rayon pool.
pub fn canonicalization_report(corpus: &[Graph], cfg: &CanonConfig) -> Result<CanonReport> {
    if corpus.is_empty() {
        return Err(Error::domain("empty corpus"));
    }
    let tallies: Vec<Tally> = corpus.par_iter().map(|g| graph_tally(g, cfg)).collect::<Result<_>>()?;
    let total = tallies.into_iter().fold(Tally::default(), Tally::add);
    let pct = |x: usize| (total.columns > 0).then(|| 100.0 * x as f64 / total.columns as f64);
    Ok(CanonReport {
        input_sum_zero_pct: pct(total.input_sum_zero),
        input_uncanonicalizable_pct: pct(total.input_symmetric),
        output_sum_zero_pct: pct(total.output_sum_zero),
        output_uncanonicalizable_pct: pct(total.output_symmetric),
        n_simple_eigenvectors: total.columns,
        graph_count: corpus.len(),
        warning: (total.columns == 0).then(|| "corpus has no simple eigenvectors".to_string()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sp(rows: &[&[f64]], lambdas: &[f64]) -> SpectralPair {
        SpectralPair::new(Matrix::from_rows(rows).unwrap(), lambdas.to_vec()).unwrap()
    }

    #[test]
    fn zero_rule_uses_raw_sums() {
        let p = sp(&[&[0.6, 0.5], &[-0.8, 0.5], &[0.0, -0.7]], &[2.0, 1.0]);
        let r = equi_canonicalize(&p, UpdateRule::Zero, 1, DEFAULT_SUM_TOL, &Quantizer::default()).unwrap();
        assert_eq!(r.signs, vec![-1, 1]);
        assert_eq!(r.canonical.column(0), vec![-0.6, 0.8, -0.0]);
        assert_eq!(r.canonical.column(1), p.vectors().column(1));
    }

    #[test]
    fn undecidable_columns_pass_through() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let p = sp(&[&[s, 0.6], &[-s, 0.8]], &[1.0, 0.0]);
        let r = equi_canonicalize(&p, UpdateRule::Zero, 1, DEFAULT_SUM_TOL, &Quantizer::default()).unwrap();
        assert_eq!(r.signs, vec![0, 1]);
        assert_eq!(r.decidable, vec![false, true]);
        assert_eq!(r.canonical, *p.vectors());
        assert!(equi_canonicalize(&p, UpdateRule::Zero, 0, 1e-7, &Quantizer::default()).is_err());
    }

    #[test]
    fn flag_examples() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let r6 = 6f64.sqrt();
        let m = Matrix::from_rows(&[[s, 2.0 / r6], [-s, 1.0 / r6], [0.0, 1.0 / r6]]).unwrap();
        let f = column_flags(&m, 1e-7);
        assert_eq!(f[0], ColumnFlags { sum_zero: true, self_symmetric: true });
        assert_eq!(f[1], ColumnFlags { sum_zero: false, self_symmetric: false });
        let partner = negating_permutation(&[1.0, -1.0, 1.0, -1.0], 1e-9).unwrap();
        for (i, &j) in partner.iter().enumerate() {
            assert_eq!([1.0, -1.0, 1.0, -1.0][j], -[1.0, -1.0, 1.0, -1.0][i]);
        }
        // Sums to zero without a negating permutation.
        assert!(negating_permutation(&[2.0, -1.0, -1.0], 1e-9).is_none());
    }

    #[test]
    fn report_on_small_corpora() {
        let cfg = CanonConfig::default();
        let p2 = canonicalization_report(&[Graph::path(2)], &cfg).unwrap();
        assert_eq!(p2.n_simple_eigenvectors, 2);
        assert_eq!(p2.input_sum_zero_pct, Some(50.0));
        let k4 = canonicalization_report(&[Graph::complete(4)], &cfg).unwrap();
        assert_eq!(k4.n_simple_eigenvectors, 1);
        assert_eq!(k4.input_sum_zero_pct, Some(0.0));
        assert!(canonicalization_report(&[], &cfg).is_err());
    }

    #[test]
    fn report_without_simple_columns() {
        // Two isolated nodes: eigenvalue 0 twice.
        let g = Graph::new(2, []).unwrap();
        let r = canonicalization_report(&[g], &CanonConfig::default()).unwrap();
        assert_eq!(r.n_simple_eigenvectors, 0);
        assert_eq!(r.input_sum_zero_pct, None);
        assert!(r.warning.is_some());
    }
}
