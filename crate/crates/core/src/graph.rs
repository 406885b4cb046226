//! Directed graphs, incidence decomposition and Laplacians.
//!
//! Edge `(i, j)` points from `i` to `j`. The incidence matrix `E` carries `+1`
//! in the source row and `-1` in the target row of that edge's column, and is
//! split into the out-incidence `B_o` (the `+1` entries) and the in-incidence
//! `B_i` (the `-1` entries, kept signed) so that `E = B_o + B_i`.
//!
//! From these, `L_o = B_o Eᵀ` (out-Laplacian, `D_out - A`), `L_i = -B_i Eᵀ`
//! and `L = E Eᵀ` (Laplacian of the undirected counterpart).
//!
//! Incidence objects are stored as integer matrices, so balancedness checks
//! are exact. Use [`IncidenceSet::to_f64`] at the numerical boundary.

use std::collections::{HashMap, VecDeque};

use nalgebra::DMatrix;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("a digraph needs at least one vertex")]
    NoVertices,
    #[error("edge #{index} ({source_vertex} -> {target_vertex}) references a vertex outside 1..={n_vertices}")]
    VertexOutOfRange {
        index: usize,
        source_vertex: usize,
        target_vertex: usize,
        n_vertices: usize,
    },
    #[error("edge #{index} is a self-loop at vertex {vertex}")]
    SelfLoop { index: usize, vertex: usize },
    #[error("edge #{index} ({source_vertex} -> {target_vertex}) duplicates edge #{first}")]
    DuplicateEdge {
        index: usize,
        first: usize,
        source_vertex: usize,
        target_vertex: usize,
    },
}

/// A directed edge with 0-based endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub source: usize,
    pub target: usize,
}

/// A simple directed graph: no self-loops, no parallel edges.
///
/// Vertices are 1-based in every external representation (constructors,
/// reports, scenario files) and 0-based internally. Edge order is preserved
/// and fixes the column order of every incidence matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Digraph {
    n_vertices: usize,
    edges: Vec<Edge>,
}

impl Digraph {
    /// Builds a digraph from 1-based `(source, target)` pairs.
    ///
    /// ```
    /// use netpassivity::graph::Digraph;
    ///
    /// let g = Digraph::new(3, &[(1, 2), (2, 3), (3, 1)]).unwrap();
    /// assert_eq!(g.n_edges(), 3);
    /// assert!(Digraph::new(2, &[(1, 1)]).is_err());
    /// ```
    pub fn new(n_vertices: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        if n_vertices == 0 {
            return Err(GraphError::NoVertices);
        }
        let mut seen: HashMap<(usize, usize), usize> = HashMap::with_capacity(edges.len());
        let mut out = Vec::with_capacity(edges.len());
        for (index, &(s, t)) in edges.iter().enumerate() {
            if s == 0 || t == 0 || s > n_vertices || t > n_vertices {
                return Err(GraphError::VertexOutOfRange {
                    index,
                    source_vertex: s,
                    target_vertex: t,
                    n_vertices,
                });
            }
            if s == t {
                return Err(GraphError::SelfLoop { index, vertex: s });
            }
            if let Some(&first) = seen.get(&(s, t)) {
                return Err(GraphError::DuplicateEdge {
                    index,
                    first,
                    source_vertex: s,
                    target_vertex: t,
                });
            }
            seen.insert((s, t), index);
            out.push(Edge {
                source: s - 1,
                target: t - 1,
            });
        }
        Ok(Self {
            n_vertices,
            edges: out,
        })
    }

    /// Builds a digraph from 0-based pairs, with the same validation as [`Digraph::new`].
    pub fn from_zero_based(n_vertices: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let shifted: Vec<_> = edges
            .iter()
            .map(|&(s, t)| (s.wrapping_add(1), t.wrapping_add(1)))
            .collect();
        Self::new(n_vertices, &shifted)
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Edge list as 1-based `[source, target]` pairs.
    pub fn edges_one_based(&self) -> Vec<[usize; 2]> {
        self.edges
            .iter()
            .map(|e| [e.source + 1, e.target + 1])
            .collect()
    }

    pub fn out_degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.n_vertices];
        for e in &self.edges {
            d[e.source] += 1;
        }
        d
    }

    pub fn in_degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.n_vertices];
        for e in &self.edges {
            d[e.target] += 1;
        }
        d
    }

    /// Whether every vertex has equal in- and out-degree, by counting edges.
    pub fn is_degree_balanced(&self) -> bool {
        self.out_degrees() == self.in_degrees()
    }

    /// Vertices (0-based) from which `v` can be reached, `v` included.
    fn reaching(&self, v: usize, reverse_adj: &[Vec<usize>]) -> Vec<bool> {
        let mut seen = vec![false; self.n_vertices];
        let mut queue = VecDeque::from([v]);
        seen[v] = true;
        while let Some(x) = queue.pop_front() {
            for &p in &reverse_adj[x] {
                if !seen[p] {
                    seen[p] = true;
                    queue.push_back(p);
                }
            }
        }
        seen
    }

    fn reverse_adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n_vertices];
        for e in &self.edges {
            adj[e.target].push(e.source);
        }
        adj
    }
}

/// The incidence decomposition of a digraph together with its Laplacians.
///
/// All matrices are integer valued; columns follow the digraph's edge order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncidenceSet {
    pub e: DMatrix<i64>,
    pub b_o: DMatrix<i64>,
    pub b_i: DMatrix<i64>,
    pub l_o: DMatrix<i64>,
    pub l_i: DMatrix<i64>,
    pub l: DMatrix<i64>,
}

/// Floating-point copy of an [`IncidenceSet`].
#[derive(Debug, Clone, PartialEq)]
pub struct FloatIncidence {
    pub e: DMatrix<f64>,
    pub b_o: DMatrix<f64>,
    pub b_i: DMatrix<f64>,
    pub l_o: DMatrix<f64>,
    pub l_i: DMatrix<f64>,
    pub l: DMatrix<f64>,
}

impl IncidenceSet {
    pub fn n_vertices(&self) -> usize {
        self.e.nrows()
    }

    pub fn n_edges(&self) -> usize {
        self.e.ncols()
    }

    /// Row sums of `B_o`.
    pub fn out_degrees(&self) -> Vec<i64> {
        self.b_o.row_iter().map(|r| r.sum()).collect()
    }

    /// Row sums of `-B_i`.
    pub fn in_degrees(&self) -> Vec<i64> {
        self.b_i.row_iter().map(|r| -r.sum()).collect()
    }

    pub fn max_out_degree(&self) -> i64 {
        self.out_degrees().into_iter().max().unwrap_or(0)
    }

    pub fn to_f64(&self) -> FloatIncidence {
        let cast = |m: &DMatrix<i64>| m.map(|v| v as f64);
        FloatIncidence {
            e: cast(&self.e),
            b_o: cast(&self.b_o),
            b_i: cast(&self.b_i),
            l_o: cast(&self.l_o),
            l_i: cast(&self.l_i),
            l: cast(&self.l),
        }
    }
}

/// Builds `E`, `B_o`, `B_i` and the three Laplacians of `g`.
///
/// ```
/// use netpassivity::graph::{build_incidence, Digraph};
///
/// let g = Digraph::new(2, &[(1, 2)]).unwrap();
/// let inc = build_incidence(&g);
/// assert_eq!(inc.e.as_slice(), &[1, -1]);
/// // column-major: L_o = [[1, -1], [0, 0]]
/// assert_eq!(inc.l_o.as_slice(), &[1, 0, -1, 0]);
/// ```
pub fn build_incidence(g: &Digraph) -> IncidenceSet {
    let (n, m) = (g.n_vertices(), g.n_edges());
    let mut b_o = DMatrix::<i64>::zeros(n, m);
    let mut b_i = DMatrix::<i64>::zeros(n, m);
    for (k, e) in g.edges().iter().enumerate() {
        b_o[(e.source, k)] = 1;
        b_i[(e.target, k)] = -1;
    }
    let e = &b_o + &b_i;
    let et = e.transpose();
    let l_o = &b_o * &et;
    let l_i = -(&b_i * &et);
    let l = &e * &et;
    IncidenceSet {
        e,
        b_o,
        b_i,
        l_o,
        l_i,
        l,
    }
}

/// `Eᵀ𝟙 = 0` and `E𝟙 = 0`, in exact integer arithmetic.
pub fn is_balanced(inc: &IncidenceSet) -> bool {
    let columns_cancel = inc.e.column_iter().all(|c| c.sum() == 0);
    let rows_cancel = inc.e.row_iter().all(|r| r.sum() == 0);
    columns_cancel && rows_cancel
}

/// 1-based vertices that every other vertex can reach by a directed walk.
///
/// ```
/// use netpassivity::graph::{globally_reachable_nodes, Digraph};
///
/// let path = Digraph::new(2, &[(1, 2)]).unwrap();
/// assert_eq!(globally_reachable_nodes(&path), vec![2]);
/// ```
pub fn globally_reachable_nodes(g: &Digraph) -> Vec<usize> {
    let rev = g.reverse_adjacency();
    (0..g.n_vertices())
        .filter(|&v| g.reaching(v, &rev).into_iter().all(|b| b))
        .map(|v| v + 1)
        .collect()
}

pub fn has_globally_reachable_node(g: &Digraph) -> bool {
    let rev = g.reverse_adjacency();
    (0..g.n_vertices()).any(|v| g.reaching(v, &rev).into_iter().all(|b| b))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GraphReport {
    pub n_vertices: usize,
    pub n_edges: usize,
    pub balanced: bool,
    /// 1-based.
    pub globally_reachable_nodes: Vec<usize>,
    pub strongly_connected: bool,
    pub out_degrees: Vec<usize>,
    pub in_degrees: Vec<usize>,
    pub max_out_degree: usize,
    pub max_in_degree: usize,
}

pub fn graph_report(g: &Digraph) -> GraphReport {
    let inc = build_incidence(g);
    let reachable = globally_reachable_nodes(g);
    let out_degrees = g.out_degrees();
    let in_degrees = g.in_degrees();
    GraphReport {
        n_vertices: g.n_vertices(),
        n_edges: g.n_edges(),
        balanced: is_balanced(&inc),
        strongly_connected: reachable.len() == g.n_vertices(),
        globally_reachable_nodes: reachable,
        max_out_degree: out_degrees.iter().copied().max().unwrap_or(0),
        max_in_degree: in_degrees.iter().copied().max().unwrap_or(0),
        out_degrees,
        in_degrees,
    }
}

/// The five-vertex balanced digraph of the neural-network case study.
pub fn case_study_graph() -> Digraph {
    Digraph::new(5, &[(1, 4), (1, 5), (4, 2), (5, 2), (2, 1), (2, 3), (3, 1)])
        .expect("case-study edge list is valid")
}
