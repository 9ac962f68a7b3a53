//! Per-graph and per-corpus statistics of Laplacian spectra: eigenvalue
//! multiplicities and the zero pattern of the eigenvector matrix.

use rayon::prelude::*;
use serde::Serialize;

use crate::eigen::{eigendecompose, group_eigenvalues};
use crate::error::{Error, Result};
use crate::graph::{laplacian, Graph};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphSpectralStats {
    pub n: usize,
    pub has_distinct: bool,
    pub has_mult2: bool,
    pub has_mult3: bool,
    pub count_mult2: usize,
    pub count_mult3: usize,
    /// Eigenvector entries with magnitude at most `zero_tol`, over all columns.
    pub num_zeros: usize,
    /// `num_zeros / n`.
    pub ratio_zeros: f64,
    /// Some node's row of the eigenvector matrix has no zero entry.
    pub has_full_row: bool,
    pub le_one_zero_per_vec: bool,
    pub zeros_lt_vertices: bool,
    pub any_condition: bool,
}

pub fn graph_stats(g: &Graph, eig_tol: f64, zero_tol: f64) -> Result<GraphSpectralStats> {
    if g.n() == 0 {
        return Err(Error::domain("graph has no nodes"));
    }
    let ed = eigendecompose(&laplacian(g))?;
    let groups = group_eigenvalues(&ed.lambdas, eig_tol)?;
    let with_mult = |m: usize| groups.iter().filter(|grp| grp.multiplicity == m).count();
    let (count_mult2, count_mult3) = (with_mult(2), with_mult(3));
    let has_distinct = groups.iter().all(|grp| grp.multiplicity == 1);

    let n = g.n();
    let v = &ed.vectors;
    let zero = |i: usize, c: usize| v[(i, c)].abs() <= zero_tol;
    let num_zeros = (0..n).flat_map(|i| (0..n).map(move |c| (i, c))).filter(|&(i, c)| zero(i, c)).count();
    let has_full_row = (0..n).any(|i| (0..n).all(|c| !zero(i, c)));
    let le_one_zero_per_vec = (0..n).all(|c| (0..n).filter(|&i| zero(i, c)).count() <= 1);
    let zeros_lt_vertices = num_zeros < n;
    Ok(GraphSpectralStats {
        n,
        has_distinct,
        has_mult2: count_mult2 > 0,
        has_mult3: count_mult3 > 0,
        count_mult2,
        count_mult3,
        num_zeros,
        ratio_zeros: num_zeros as f64 / n as f64,
        has_full_row,
        le_one_zero_per_vec,
        zeros_lt_vertices,
        any_condition: has_full_row || le_one_zero_per_vec || zeros_lt_vertices,
    })
}

/// A percentage together with the number of graphs it counts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Share {
    pub pct: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DatasetStatsReport {
    pub graph_count: usize,
    pub distinct: Share,
    pub mult2: Share,
    pub mult3: Share,
    pub avg_count_mult2: f64,
    pub avg_count_mult3: f64,
    pub avg_ratio_zeros: f64,
    pub avg_num_zeros: f64,
    pub full_row: Share,
    pub le_one_zero_per_vec: Share,
    pub zeros_lt_vertices: Share,
    pub any_condition: Share,
}

impl DatasetStatsReport {
    /// Aggregates in input order, so the result does not depend on how the
    /// per-graph work was scheduled.
    pub fn from_stats(stats: &[GraphSpectralStats]) -> Result<Self> {
        if stats.is_empty() {
            return Err(Error::domain("empty corpus"));
        }
        let total = stats.len();
        let share = |f: fn(&GraphSpectralStats) -> bool| {
            let count = stats.iter().filter(|s| f(s)).count();
            Share { pct: 100.0 * count as f64 / total as f64, count }
        };
        let mean = |f: fn(&GraphSpectralStats) -> f64| stats.iter().map(f).sum::<f64>() / total as f64;
        Ok(DatasetStatsReport {
            graph_count: total,
            distinct: share(|s| s.has_distinct),
            mult2: share(|s| s.has_mult2),
            mult3: share(|s| s.has_mult3),
            avg_count_mult2: mean(|s| s.count_mult2 as f64),
            avg_count_mult3: mean(|s| s.count_mult3 as f64),
            avg_ratio_zeros: mean(|s| s.ratio_zeros),
            avg_num_zeros: mean(|s| s.num_zeros as f64),
            full_row: share(|s| s.has_full_row),
            le_one_zero_per_vec: share(|s| s.le_one_zero_per_vec),
            zeros_lt_vertices: share(|s| s.zeros_lt_vertices),
            any_condition: share(|s| s.any_condition),
        })
    }

    /// One `(statistic, value, graphs)` row per line of the summary table.
    pub fn rows(&self) -> Vec<(&'static str, f64, Option<usize>)> {
        let s = |x: Share| (x.pct, Some(x.count));
        let rows = [
            ("Number of Graphs", (self.graph_count as f64, Some(self.graph_count))),
            ("Graphs with Distinct Eigenvalues", s(self.distinct)),
            ("Graphs with Multiplicity 2 Eigenvalues", s(self.mult2)),
            ("Graphs with Multiplicity 3 Eigenvalues", s(self.mult3)),
            ("Avg. Number of Multiplicity 2 Eigenvalues", (self.avg_count_mult2, None)),
            ("Avg. Number of Multiplicity 3 Eigenvalues", (self.avg_count_mult3, None)),
            ("Average Ratio of Zeros", (self.avg_ratio_zeros, None)),
            ("Average Number of Zeros", (self.avg_num_zeros, None)),
            ("Graphs with a Full Row", s(self.full_row)),
            ("Graphs with <=1 Zero per Eigenvector", s(self.le_one_zero_per_vec)),
            ("Graphs with Total Zeros < Vertices", s(self.zeros_lt_vertices)),
            ("Graphs Meeting Any Condition", s(self.any_condition)),
        ];
        rows.into_iter().map(|(name, (v, c))| (name, v, c)).collect()
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["statistic", "value", "graphs"])?;
        for (name, value, count) in self.rows() {
            let count = count.map(|c| c.to_string()).unwrap_or_default();
            w.write_record([name, &value.to_string(), &count])?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }
}

/// Per-graph statistics computed on the current rayon pool, in input order.
pub fn corpus_stats(corpus: &[Graph], eig_tol: f64, zero_tol: f64) -> Vec<Result<GraphSpectralStats>> {
    corpus.par_iter().map(|g| graph_stats(g, eig_tol, zero_tol)).collect()
}

pub fn dataset_report(corpus: &[Graph], eig_tol: f64, zero_tol: f64) -> Result<DatasetStatsReport> {
    if corpus.is_empty() {
        return Err(Error::domain("empty corpus"));
    }
    let stats = corpus_stats(corpus, eig_tol, zero_tol).into_iter().collect::<Result<Vec<_>>>()?;
    DatasetStatsReport::from_stats(&stats)
}
