//! Loop-free undirected multigraphs with a designated sink.
//!
//! Vertices are `0..n`. Non-sink vertices additionally get a *compact* index
//! `0..n-1` (vertex order with the sink skipped); sandpiles, toppling vectors,
//! reduced Laplacians and polynomial variables all use compact indices.

use alloc::collections::VecDeque;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::matrix::IntMatrix;

const NOT_COMPACT: usize = usize::MAX;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    sink: usize,
    weights: Vec<u64>,
    degree: Vec<u64>,
    nonsink: Vec<usize>,
    compact: Vec<usize>,
    neighbors: Vec<Vec<(usize, u64)>>,
    sink_weight: Vec<u64>,
    labels: Vec<String>,
}

/// The graph families with closed-form avalanche polynomials, plus the
/// auxiliary fan, path and grid graphs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Family {
    /// Path on `n` vertices, sink at one end.
    Path(usize),
    /// Cycle `C_n` on `n` vertices; `C_2` is a double edge.
    Cycle(usize),
    /// Complete graph `K_n`.
    Complete(usize),
    /// Wheel `W_n`: rim of `n` vertices plus the hub, which is the sink.
    Wheel(usize),
    /// Fan `F_k`: path on `k` vertices plus a dominating sink.
    Fan(usize),
    /// `rows x cols` grid; grains leaving the boundary go to one global sink.
    Grid { rows: usize, cols: usize },
    /// Tree given by a parent per vertex (`None` for the root, which is the
    /// sink).
    Tree(Vec<Option<usize>>),
}

impl Graph {
    /// Builds a graph from an edge list. Duplicate entries are summed.
    pub fn from_edges(n: usize, sink: usize, edges: &[(usize, usize, u64)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGraph("graph needs at least one vertex".into()));
        }
        if sink >= n {
            return Err(Error::InvalidGraph(format!("sink {sink} out of range for {n} vertices")));
        }
        let mut weights = vec![0u64; n * n];
        for &(u, v, w) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidGraph(format!("edge ({u}, {v}) out of range")));
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("loop at vertex {u}")));
            }
            weights[u * n + v] += w;
            weights[v * n + u] += w;
        }
        Self::from_weights(n, sink, weights)
    }

    /// Builds a graph from a dense symmetric `n x n` weight matrix.
    pub fn from_weights(n: usize, sink: usize, weights: Vec<u64>) -> Result<Self> {
        if weights.len() != n * n {
            return Err(Error::InvalidGraph("weight matrix has wrong size".into()));
        }
        if n == 0 || sink >= n {
            return Err(Error::InvalidGraph("sink out of range".into()));
        }
        for u in 0..n {
            if weights[u * n + u] != 0 {
                return Err(Error::InvalidGraph(format!("loop at vertex {u}")));
            }
            for v in 0..u {
                if weights[u * n + v] != weights[v * n + u] {
                    return Err(Error::InvalidGraph(format!("asymmetric weight between {u} and {v}")));
                }
            }
        }

        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([sink]);
        seen[sink] = true;
        while let Some(u) = queue.pop_front() {
            for v in 0..n {
                if weights[u * n + v] > 0 && !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        if let Some(v) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidGraph(format!("vertex {v} is not connected to the sink")));
        }

        let degree: Vec<u64> = (0..n).map(|u| weights[u * n..(u + 1) * n].iter().sum()).collect();
        let nonsink: Vec<usize> = (0..n).filter(|&v| v != sink).collect();
        let mut compact = vec![NOT_COMPACT; n];
        for (i, &v) in nonsink.iter().enumerate() {
            compact[v] = i;
        }
        let neighbors = nonsink
            .iter()
            .map(|&u| {
                nonsink
                    .iter()
                    .enumerate()
                    .filter_map(|(j, &v)| {
                        let w = weights[u * n + v];
                        (w > 0).then_some((j, w))
                    })
                    .collect()
            })
            .collect();
        let sink_weight = nonsink.iter().map(|&u| weights[u * n + sink]).collect();
        let labels = default_labels(n, sink);
        Ok(Graph {
            n,
            sink,
            weights,
            degree,
            nonsink,
            compact,
            neighbors,
            sink_weight,
            labels,
        })
    }

    pub fn family(kind: &Family) -> Result<Self> {
        match *kind {
            Family::Path(n) => Self::path(n),
            Family::Cycle(n) => Self::cycle(n),
            Family::Complete(n) => Self::complete(n),
            Family::Wheel(n) => Self::wheel(n),
            Family::Fan(k) => Self::fan(k),
            Family::Grid { rows, cols } => Self::grid(rows, cols),
            Family::Tree(ref parents) => Self::tree(parents),
        }
    }

    pub fn path(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidFamily(format!("path needs at least 2 vertices, got {n}")));
        }
        let edges: Vec<_> = (1..n).map(|v| (v - 1, v, 1)).collect();
        Self::from_edges(n, 0, &edges)
    }

    /// `C_n` with sink `0` and `v_i = i`.
    pub fn cycle(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidFamily(format!("cycle needs at least 2 vertices, got {n}")));
        }
        if n == 2 {
            return Self::from_edges(2, 0, &[(0, 1, 2)]);
        }
        let edges: Vec<_> = (0..n).map(|v| (v, (v + 1) % n, 1)).collect();
        Self::from_edges(n, 0, &edges)
    }

    /// `K_n` with sink `0` and `v_i = i`.
    pub fn complete(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidFamily(format!("complete graph needs at least 2 vertices, got {n}")));
        }
        let mut edges = Vec::with_capacity(n * (n - 1) / 2);
        for u in 0..n {
            for v in u + 1..n {
                edges.push((u, v, 1));
            }
        }
        Self::from_edges(n, 0, &edges)
    }

    /// `W_n`: hub sink at vertex `0`, rim `v_0..v_{n-1}` at vertices `1..=n`
    /// in clockwise order.
    pub fn wheel(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidFamily(format!("wheel needs a rim of at least 3, got {n}")));
        }
        let mut edges = Vec::with_capacity(2 * n);
        for i in 0..n {
            edges.push((0, i + 1, 1));
            edges.push((i + 1, (i + 1) % n + 1, 1));
        }
        let mut g = Self::from_edges(n + 1, 0, &edges)?;
        g.labels = core::iter::once("s".to_string())
            .chain((0..n).map(|i| format!("v{i}")))
            .collect();
        Ok(g)
    }

    /// `F_k`: path `v_1..v_k` at vertices `1..=k`, dominating sink `0`.
    pub fn fan(k: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidFamily(format!("fan needs a path of at least 2, got {k}")));
        }
        let mut edges: Vec<_> = (1..=k).map(|v| (0, v, 1)).collect();
        edges.extend((1..k).map(|v| (v, v + 1, 1)));
        Self::from_edges(k + 1, 0, &edges)
    }

    /// Grid of `rows x cols` cells. Cell `(r, c)` is vertex `1 + r * cols + c`
    /// and the sink is vertex `0`; every cell has degree 4.
    pub fn grid(rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidFamily(format!("grid needs positive size, got {rows}x{cols}")));
        }
        let cell = |r: usize, c: usize| 1 + r * cols + c;
        let mut edges = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                let mut inside = 0;
                if r + 1 < rows {
                    edges.push((cell(r, c), cell(r + 1, c), 1));
                }
                if c + 1 < cols {
                    edges.push((cell(r, c), cell(r, c + 1), 1));
                }
                inside += usize::from(r > 0) + usize::from(r + 1 < rows);
                inside += usize::from(c > 0) + usize::from(c + 1 < cols);
                if inside < 4 {
                    edges.push((0, cell(r, c), (4 - inside) as u64));
                }
            }
        }
        let mut g = Self::from_edges(1 + rows * cols, 0, &edges)?;
        g.labels = core::iter::once("s".to_string())
            .chain((0..rows * cols).map(|i| format!("v{}_{}", i / cols, i % cols)))
            .collect();
        Ok(g)
    }

    /// Tree from a parent array; the root (the single `None`) is the sink.
    pub fn tree(parents: &[Option<usize>]) -> Result<Self> {
        let n = parents.len();
        let roots: Vec<usize> = (0..n).filter(|&v| parents[v].is_none()).collect();
        if roots.len() != 1 {
            return Err(Error::InvalidFamily(format!("tree needs exactly one root, got {}", roots.len())));
        }
        let edges: Vec<_> = parents
            .iter()
            .enumerate()
            .filter_map(|(v, p)| p.map(|p| (p, v, 1)))
            .collect();
        if edges.len() + 1 != n {
            return Err(Error::InvalidFamily("parent array is not a tree".into()));
        }
        // n - 1 edges plus connectivity (checked in from_edges) means acyclic.
        Self::from_edges(n, roots[0], &edges)
            .map_err(|e| Error::InvalidFamily(format!("parent array is not a tree: {e}")))
    }

    pub fn n_vertices(&self) -> usize {
        self.n
    }

    pub fn n_nonsink(&self) -> usize {
        self.n - 1
    }

    pub fn sink(&self) -> usize {
        self.sink
    }

    pub fn weight(&self, u: usize, v: usize) -> u64 {
        self.weights[u * self.n + v]
    }

    pub fn degree(&self, v: usize) -> u64 {
        self.degree[v]
    }

    /// Vertex of the non-sink vertex with compact index `i`.
    pub fn vertex_of(&self, i: usize) -> usize {
        self.nonsink[i]
    }

    /// Compact index of a non-sink vertex.
    pub fn compact_index(&self, v: usize) -> Option<usize> {
        self.compact.get(v).copied().filter(|&i| i != NOT_COMPACT)
    }

    /// Degree of the non-sink vertex with compact index `i`.
    pub fn nonsink_degree(&self, i: usize) -> u64 {
        self.degree[self.nonsink[i]]
    }

    /// Non-sink neighbours `(compact index, weight)` of compact vertex `i`.
    pub fn nonsink_neighbors(&self, i: usize) -> &[(usize, u64)] {
        &self.neighbors[i]
    }

    /// `weight(v_i, sink)` for compact index `i`.
    pub fn sink_weight(&self, i: usize) -> u64 {
        self.sink_weight[i]
    }

    pub fn sink_weights(&self) -> &[u64] {
        &self.sink_weight
    }

    /// Undirected edges `(u, v, weight)` with `u < v`.
    pub fn edges(&self) -> Vec<(usize, usize, u64)> {
        let mut out = Vec::new();
        for u in 0..self.n {
            for v in u + 1..self.n {
                let w = self.weight(u, v);
                if w > 0 {
                    out.push((u, v, w));
                }
            }
        }
        out
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn set_labels(&mut self, labels: Vec<String>) -> Result<()> {
        if labels.len() != self.n {
            return Err(Error::InvalidGraph(format!(
                "expected {} labels, got {}",
                self.n,
                labels.len()
            )));
        }
        self.labels = labels;
        Ok(())
    }

    /// Display names of the polynomial variables, one per non-sink vertex:
    /// a label `vK` becomes `xK`, anything else `x_<label>`.
    pub fn variable_names(&self) -> Vec<String> {
        self.nonsink
            .iter()
            .map(|&v| {
                let label = &self.labels[v];
                match label.strip_prefix('v') {
                    Some(rest) if !rest.is_empty() => format!("x{rest}"),
                    _ => format!("x_{label}"),
                }
            })
            .collect()
    }

    pub fn laplacian(&self) -> IntMatrix {
        let mut m = IntMatrix::zeros(self.n, self.n);
        for u in 0..self.n {
            for v in 0..self.n {
                let entry = if u == v {
                    BigInt::from(self.degree[u])
                } else {
                    -BigInt::from(self.weight(u, v))
                };
                m.set(u, v, entry);
            }
        }
        m
    }

    /// Laplacian with the sink row and column deleted, in compact order.
    pub fn reduced_laplacian(&self) -> IntMatrix {
        let k = self.n - 1;
        let mut m = IntMatrix::zeros(k, k);
        for (i, &u) in self.nonsink.iter().enumerate() {
            for (j, &v) in self.nonsink.iter().enumerate() {
                let entry = if i == j {
                    BigInt::from(self.degree[u])
                } else {
                    -BigInt::from(self.weight(u, v))
                };
                m.set(i, j, entry);
            }
        }
        m
    }

    /// Number of spanning trees, `det` of the reduced Laplacian; also the
    /// number of recurrent sandpiles.
    pub fn spanning_tree_count(&self) -> BigInt {
        self.reduced_laplacian()
            .determinant()
            .expect("reduced Laplacian is square")
    }

    /// Invariant factors of the sandpile group (cokernel of the reduced
    /// Laplacian).
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        self.reduced_laplacian()
            .invariant_factors()
            .expect("reduced Laplacian of a connected graph is nonsingular")
    }

    /// Number of stable sandpiles, `prod (deg v)` over non-sink vertices,
    /// saturating at `u128::MAX`.
    pub fn stable_state_count(&self) -> u128 {
        self.nonsink
            .iter()
            .fold(1u128, |acc, &v| acc.saturating_mul(u128::from(self.degree[v])))
    }

    /// The same graph with vertex `v` renamed to `perm[v]`.
    pub fn relabeled(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n {
            return Err(Error::InvalidGraph("permutation has wrong length".into()));
        }
        let mut hit = vec![false; self.n];
        for &p in perm {
            if p >= self.n || core::mem::replace(&mut hit[p], true) {
                return Err(Error::InvalidGraph("not a permutation".into()));
            }
        }
        let edges: Vec<_> = self
            .edges()
            .into_iter()
            .map(|(u, v, w)| (perm[u], perm[v], w))
            .collect();
        Self::from_edges(self.n, perm[self.sink], &edges)
    }
}

fn default_labels(n: usize, sink: usize) -> Vec<String> {
    let mut next = 1;
    (0..n)
        .map(|v| {
            if v == sink {
                "s".to_string()
            } else {
                next += 1;
                format!("v{}", next - 1)
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(m: &IntMatrix) -> Vec<Vec<i64>> {
        m.to_rows()
            .into_iter()
            .map(|r| r.into_iter().map(|x| i64::try_from(x).unwrap()).collect())
            .collect()
    }

    #[test]
    fn laplacian_examples() {
        let c3 = Graph::cycle(3).unwrap();
        assert_eq!(rows(&c3.laplacian()), vec![vec![2, -1, -1], vec![-1, 2, -1], vec![-1, -1, 2]]);
        assert_eq!(rows(&c3.reduced_laplacian()), vec![vec![2, -1], vec![-1, 2]]);

        let c2 = Graph::cycle(2).unwrap();
        assert_eq!(rows(&c2.laplacian()), vec![vec![2, -2], vec![-2, 2]]);

        let k4 = Graph::complete(4).unwrap();
        let l = rows(&k4.laplacian());
        for (i, row) in l.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                assert_eq!(x, if i == j { 3 } else { -1 });
            }
        }
        assert_eq!(
            rows(&k4.reduced_laplacian()),
            vec![vec![3, -1, -1], vec![-1, 3, -1], vec![-1, -1, 3]]
        );
    }

    #[test]
    fn cycle_reduced_laplacian_is_tridiagonal() {
        let g = Graph::cycle(7).unwrap();
        let l = rows(&g.reduced_laplacian());
        for i in 0..6usize {
            for j in 0..6 {
                let expect = match i.abs_diff(j) {
                    0 => 2,
                    1 => -1,
                    _ => 0,
                };
                assert_eq!(l[i][j], expect);
            }
        }
    }

    #[test]
    fn rejects_invalid_graphs() {
        assert!(Graph::from_edges(2, 0, &[(0, 0, 1)]).is_err());
        assert!(Graph::from_edges(3, 0, &[(0, 1, 1)]).is_err());
        assert!(Graph::from_edges(2, 5, &[(0, 1, 1)]).is_err());
        assert!(Graph::from_weights(2, 0, vec![0, 1, 2, 0]).is_err());
        assert!(Graph::cycle(1).is_err());
        assert!(Graph::wheel(2).is_err());
        assert!(Graph::fan(1).is_err());
        assert!(Graph::grid(0, 3).is_err());
        assert!(Graph::tree(&[None, Some(2), Some(1)]).is_err());
        assert!(Graph::tree(&[None, None]).is_err());
    }

    #[test]
    fn duplicate_edges_are_summed() {
        let g = Graph::from_edges(2, 0, &[(0, 1, 1), (1, 0, 1)]).unwrap();
        assert_eq!(g, Graph::cycle(2).unwrap());
    }

    #[test]
    fn wheel_three_is_k4() {
        let w = Graph::wheel(3).unwrap();
        let k = Graph::complete(4).unwrap();
        assert_eq!(w.laplacian(), k.laplacian());
        assert_eq!(w.variable_names(), vec!["x0", "x1", "x2"]);
        assert_eq!(k.variable_names(), vec!["x1", "x2", "x3"]);
    }

    #[test]
    fn grid_cells_have_degree_four() {
        for (r, c) in [(1, 1), (1, 4), (3, 3), (4, 2)] {
            let g = Graph::grid(r, c).unwrap();
            for i in 0..g.n_nonsink() {
                assert_eq!(g.nonsink_degree(i), 4);
            }
        }
        let g = Graph::grid(3, 3).unwrap();
        assert_eq!(g.weight(0, 1), 2); // corner
        assert_eq!(g.weight(0, 2), 1); // edge
        assert_eq!(g.weight(0, 5), 0); // centre
    }

    #[test]
    fn spanning_tree_counts() {
        assert_eq!(Graph::cycle(3).unwrap().spanning_tree_count(), 3.into());
        assert_eq!(Graph::complete(4).unwrap().spanning_tree_count(), 16.into());
        assert_eq!(Graph::wheel(4).unwrap().spanning_tree_count(), 45.into());
        assert_eq!(Graph::fan(2).unwrap().spanning_tree_count(), 3.into());
        assert_eq!(Graph::path(5).unwrap().spanning_tree_count(), 1.into());
    }

    #[test]
    fn wheel_five_group_is_11_by_11() {
        let d = Graph::wheel(5).unwrap().invariant_factors();
        let nontrivial: Vec<_> = d.into_iter().filter(|x| *x > BigInt::from(1)).collect();
        assert_eq!(nontrivial, vec![BigInt::from(11), BigInt::from(11)]);
    }

    #[test]
    fn relabeling_preserves_tree_count() {
        let g = Graph::wheel(5).unwrap();
        let h = g.relabeled(&[3, 0, 5, 1, 4, 2]).unwrap();
        assert_eq!(h.sink(), 3);
        assert_eq!(g.spanning_tree_count(), h.spanning_tree_count());
        assert!(g.relabeled(&[0, 0, 1, 2, 3, 4]).is_err());
    }
}
