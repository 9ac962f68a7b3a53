//! Spectral color refinement over graph eigendecompositions, a brute-force
//! sign-permutation isomorphism oracle, eigenvector canonicalization and
//! spectral statistics for graph corpora.

pub mod canonicalize;
pub mod color;
pub mod counterexamples;
pub mod eigen;
pub mod epnn;
pub mod equi;
pub mod error;
pub mod graph;
pub mod linalg;
pub mod oracle;
pub mod stats;
pub mod wl;

pub use canonicalize::{
    canonicalization_report, detect_uncanonicalizable, equi_canonicalize, CanonConfig, CanonReport, CanonResult,
    ColumnFlags,
};
pub use color::{Color, ColorState, GlobalColor, Quantizer};
pub use counterexamples::{gen_epnn_counterexample, gen_oge_pair, gen_orthonormal_counterexample, OgePair};
pub use eigen::{
    eigendecompose, group_eigenvalues, is_simple_spectrum, truncate, EigenDecomposition, EigenvalueGroup, SpectralPair,
    TruncateOrder,
};
pub use epnn::{
    epnn_distinguish, reconstruct_from_purview, unique_node_ids, ColorRefiner, Outcome, Reconstruction,
    SeparationVerdict, UniqueIds,
};
pub use equi::{equi_distinguish, EquiState, EquiVerdict, UpdateRule};
pub use error::{Error, Result};
pub use graph::{adjacency, laplacian, parse_graph, parse_input, Graph, GraphFormat, GraphInput, SymmetricMatrix};
pub use linalg::Matrix;
pub use oracle::{
    automorphisms_trivial, find_signed_isomorphism, perm_isomorphic_matrices, signed_automorphisms, SignedPermutation,
};
pub use stats::{dataset_report, graph_stats, DatasetStatsReport, GraphSpectralStats};
pub use wl::wl1_distinguish;
