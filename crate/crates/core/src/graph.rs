//! Undirected simple graphs, their text formats, and the symmetric matrices
//! built from them.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Undirected simple graph on nodes `0..n`. Edges are stored as `(u, v)` with `u < v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl Graph {
    pub fn new<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        if n == 0 {
            return Err(Error::domain("graph must have at least one node"));
        }
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::domain(format!("edge ({u},{v}) out of range for n={n}")));
            }
            if u == v {
                return Err(Error::domain(format!("self-loop at node {u}")));
            }
            set.insert((u.min(v), u.max(v)));
        }
        Ok(Graph { n, edges: set })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&(u.min(v), u.max(v)))
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for &(u, v) in &self.edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        deg
    }

    pub fn neighbors(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        adj
    }

    /// Renames node `i` to `perm[i]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Graph> {
        check_permutation(perm, self.n)?;
        Graph::new(self.n, self.edges.iter().map(|&(u, v)| (perm[u], perm[v])))
    }

    pub fn to_edge_list(&self) -> String {
        let mut out = format!("n={}\n", self.n);
        for &(u, v) in &self.edges {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&GraphJson {
            n: self.n,
            edges: self.edges.iter().map(|&(u, v)| [u, v]).collect(),
        })
        .expect("graph serialization cannot fail")
    }

    // Convenience constructors used by tests, fixtures and the smoke corpus.

    pub fn path(n: usize) -> Graph {
        Graph::new(n, (1..n).map(|i| (i - 1, i))).expect("valid path")
    }

    pub fn cycle(n: usize) -> Graph {
        assert!(n >= 3, "cycle needs at least 3 nodes");
        Graph::new(n, (0..n).map(|i| (i, (i + 1) % n))).expect("valid cycle")
    }

    pub fn complete(n: usize) -> Graph {
        Graph::new(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)))).expect("valid clique")
    }

    /// Star with centre 0 and `leaves` leaves.
    pub fn star(leaves: usize) -> Graph {
        Graph::new(leaves + 1, (1..=leaves).map(|v| (0, v))).expect("valid star")
    }
}

pub(crate) fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    if perm.len() != n {
        return Err(Error::domain(format!("permutation has length {}, expected {n}", perm.len())));
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || seen[p] {
            return Err(Error::domain("not a permutation"));
        }
        seen[p] = true;
    }
    Ok(())
}

/// Square matrix whose entries are exactly symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix(Matrix);

impl SymmetricMatrix {
    pub fn new(m: Matrix) -> Result<Self> {
        if m.rows() != m.cols() {
            return Err(Error::domain(format!("matrix is {}x{}, not square", m.rows(), m.cols())));
        }
        for i in 0..m.rows() {
            for j in i + 1..m.cols() {
                if m[(i, j)] != m[(j, i)] {
                    return Err(Error::domain(format!("matrix is not symmetric at ({i},{j})")));
                }
            }
        }
        if m.as_slice().iter().any(|x| !x.is_finite()) {
            return Err(Error::domain("matrix has non-finite entries"));
        }
        Ok(SymmetricMatrix(m))
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        SymmetricMatrix::new(Matrix::from_rows(rows)?)
    }

    pub fn n(&self) -> usize {
        self.0.rows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }

    /// `P M Pᵀ` where `P` sends basis vector `i` to `perm[i]`.
    pub fn conjugate(&self, perm: &[usize]) -> Result<SymmetricMatrix> {
        let n = self.n();
        check_permutation(perm, n)?;
        let mut out = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                out[(perm[i], perm[j])] = self.0[(i, j)];
            }
        }
        Ok(SymmetricMatrix(out))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&MatrixJson { matrix: self.0.clone() })
            .expect("matrix serialization cannot fail")
    }
}

impl std::ops::Index<(usize, usize)> for SymmetricMatrix {
    type Output = f64;
    fn index(&self, idx: (usize, usize)) -> &f64 {
        &self.0[idx]
    }
}

pub fn adjacency(g: &Graph) -> SymmetricMatrix {
    let mut m = Matrix::zeros(g.n(), g.n());
    for (u, v) in g.edges() {
        m[(u, v)] = 1.0;
        m[(v, u)] = 1.0;
    }
    SymmetricMatrix(m)
}

/// Un-normalized Laplacian `D - A`.
pub fn laplacian(g: &Graph) -> SymmetricMatrix {
    let mut m = Matrix::zeros(g.n(), g.n());
    for (u, v) in g.edges() {
        m[(u, v)] = -1.0;
        m[(v, u)] = -1.0;
    }
    for (i, d) in g.degrees().into_iter().enumerate() {
        m[(i, i)] = d as f64;
    }
    SymmetricMatrix(m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphFormat {
    EdgeList,
    JsonGraph,
}

/// Either a graph or a matrix given directly in the JSON format.
#[derive(Debug, Clone, PartialEq)]
pub enum GraphInput {
    Graph(Graph),
    Matrix(SymmetricMatrix),
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    n: usize,
    edges: Vec<[usize; 2]>,
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    matrix: Matrix,
}

pub fn parse_graph(text: &str, format: GraphFormat) -> Result<Graph> {
    match parse_input(text, format)? {
        GraphInput::Graph(g) => Ok(g),
        GraphInput::Matrix(_) => {
            Err(Error::domain("expected a graph, found a \"matrix\" object"))
        }
    }
}

pub fn parse_input(text: &str, format: GraphFormat) -> Result<GraphInput> {
    match format {
        GraphFormat::EdgeList => parse_edge_list(text).map(GraphInput::Graph),
        GraphFormat::JsonGraph => {
            let value: Value = serde_json::from_str(text)?;
            input_from_json(&value)
        }
    }
}

pub(crate) fn input_from_json(value: &Value) -> Result<GraphInput> {
    let obj = value
        .as_object()
        .ok_or_else(|| Error::domain("graph JSON must be an object"))?;
    if let Some(m) = obj.get("matrix") {
        let matrix: Matrix = serde_json::from_value(m.clone())?;
        return SymmetricMatrix::new(matrix).map(GraphInput::Matrix);
    }
    let n = obj
        .get("n")
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::domain("graph JSON needs a non-negative integer \"n\""))? as usize;
    let edges = obj
        .get("edges")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::domain("graph JSON needs an \"edges\" array"))?;
    let mut pairs = Vec::with_capacity(edges.len());
    for (k, e) in edges.iter().enumerate() {
        let e = e.as_array().filter(|e| e.len() == 2).ok_or_else(|| {
            Error::domain(format!("edge {k} must be a 2-element integer array"))
        })?;
        let mut ends = [0usize; 2];
        for (slot, x) in ends.iter_mut().zip(e) {
            if let Some(i) = x.as_i64().filter(|&i| i < 0) {
                return Err(Error::domain(format!("edge {k} has negative index {i}")));
            }
            *slot = x.as_u64().ok_or_else(|| {
                Error::domain(format!("edge {k} must contain integer node indices"))
            })? as usize;
        }
        pairs.push((ends[0], ends[1]));
    }
    Graph::new(n, pairs).map(GraphInput::Graph)
}

fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut declared: Option<usize> = None;
    let mut edges = Vec::new();
    let mut seen_content = false;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(count) = line.strip_prefix("n=") {
            if seen_content {
                return Err(Error::Parse {
                    line: line_no,
                    message: "node count header must precede all edges".into(),
                });
            }
            let count = count.trim().parse::<usize>().map_err(|e| Error::Parse {
                line: line_no,
                message: format!("bad node count: {e}"),
            })?;
            declared = Some(count);
            seen_content = true;
            continue;
        }
        seen_content = true;
        let tokens: Vec<&str> = line.split_whitespace().collect();
        match tokens.len() {
            2 => {}
            3 => {
                return Err(Error::Parse {
                    line: line_no,
                    message: "weighted edges are not supported".into(),
                })
            }
            _ => {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("expected \"<u> <v>\", got {line:?}"),
                })
            }
        }
        let mut ends = [0usize; 2];
        for (slot, tok) in ends.iter_mut().zip(&tokens) {
            let value = tok.parse::<i64>().map_err(|e| Error::Parse {
                line: line_no,
                message: format!("bad node index {tok:?}: {e}"),
            })?;
            if value < 0 {
                return Err(Error::domain(format!("line {line_no}: negative node index {value}")));
            }
            *slot = value as usize;
        }
        if ends[0] == ends[1] {
            return Err(Error::domain(format!("line {line_no}: self-loop at node {}", ends[0])));
        }
        edges.push((ends[0], ends[1]));
    }
    let implied = edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0);
    let n = match declared {
        Some(d) if d < implied => {
            return Err(Error::domain(format!(
                "declared n={d} but an edge references node {}",
                implied - 1
            )))
        }
        Some(d) => d,
        None => implied,
    };
    Graph::new(n, edges)
}
