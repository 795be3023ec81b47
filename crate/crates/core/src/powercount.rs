//! Power counting for graphs of self-similar kernels.
//!
//! An integral described by a graph converges if every subgraph `(V', E')`
//! satisfies `Σ_{e ∈ E'} a_e < D (|V'| - 1)`, where `a_e` is the singularity
//! order of the kernel on edge `e` and `D` the scaling dimension.
//!
//! Only vertex subsets with their induced edge sets need checking. For a
//! fixed vertex set, adding edges between its vertices can only increase
//! the left-hand side (all exponents are non-negative) while the right-hand
//! side stays put, so the induced edge set is always the worst choice.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::Rational64;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::degree::parse_rational;

/// Vertex subsets are enumerated exhaustively, so graphs are kept small.
pub const MAX_VERTICES: usize = 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PowerCountError {
    #[error("graph is disconnected")]
    Disconnected,
    #[error("graph has {0} vertices, more than the supported {MAX_VERTICES}")]
    TooLarge(usize),
    #[error("graph has no vertices")]
    Empty,
    #[error("edge {edge} refers to unknown vertex `{vertex}`")]
    UnknownVertex { edge: usize, vertex: String },
    #[error("edge {edge} has negative exponent {exponent}")]
    NegativeExponent { edge: usize, exponent: Rational64 },
    #[error("test-function edge {edge} must have exponent 0, found {exponent}")]
    TestEdgeExponent { edge: usize, exponent: Rational64 },
    #[error("edge {edge} has kind `{kind}` with no known exponent")]
    UnknownKind { edge: usize, kind: String },
    #[error("invalid rational `{0}`")]
    BadRational(String),
    #[error("kernel convolution outside its validity window: {0}")]
    Domain(String),
    #[error("cannot read graph: {0}")]
    Json(String),
}

/// What an edge stands for. The kind only matters for looking up default
/// exponents and for excluding test-function edges from connectivity.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EdgeKind {
    /// A heat kernel.
    P,
    /// A mollified noise covariance factor.
    K,
    /// A test function.
    TestFn,
    Custom(String),
}

impl EdgeKind {
    pub fn parse(s: &str) -> EdgeKind {
        match s {
            "P" => EdgeKind::P,
            "K" => EdgeKind::K,
            "testfn" => EdgeKind::TestFn,
            other => EdgeKind::Custom(other.to_string()),
        }
    }

    pub fn name(&self) -> &str {
        match self {
            EdgeKind::P => "P",
            EdgeKind::K => "K",
            EdgeKind::TestFn => "testfn",
            EdgeKind::Custom(s) => s,
        }
    }

    /// Built-in exponents in parabolic 3+1 dimensions.
    pub fn default_exponent(&self) -> Option<Rational64> {
        match self {
            EdgeKind::P => Some(Rational64::from_integer(3)),
            EdgeKind::K => Some(Rational64::new(9, 4)),
            EdgeKind::TestFn => Some(Rational64::zero()),
            EdgeKind::Custom(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphEdge {
    pub ends: (usize, usize),
    pub exponent: Rational64,
    pub kind: EdgeKind,
}

/// An undirected multigraph with kernel exponents on its edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeynmanGraph {
    pub name: String,
    vertices: Vec<String>,
    root: Option<usize>,
    edges: Vec<GraphEdge>,
    scaling_dimension: Rational64,
}

#[derive(Serialize, Deserialize)]
struct GraphFile {
    #[serde(default)]
    name: String,
    vertices: Vec<String>,
    #[serde(default)]
    root: Option<String>,
    scaling_dimension: String,
    #[serde(default)]
    exponents: BTreeMap<String, String>,
    edges: Vec<EdgeEntry>,
}

#[derive(Serialize, Deserialize)]
struct EdgeEntry {
    from: String,
    to: String,
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    exponent: Option<String>,
}

impl FeynmanGraph {
    pub fn new(vertex_count: usize, scaling_dimension: Rational64) -> Self {
        FeynmanGraph {
            name: String::new(),
            vertices: (0..vertex_count).map(|i| format!("v{i}")).collect(),
            root: None,
            edges: Vec::new(),
            scaling_dimension,
        }
    }

    pub fn with_names(names: &[&str], scaling_dimension: Rational64) -> Self {
        FeynmanGraph {
            name: String::new(),
            vertices: names.iter().map(|s| s.to_string()).collect(),
            root: None,
            edges: Vec::new(),
            scaling_dimension,
        }
    }

    pub fn set_root(&mut self, v: usize) {
        self.root = Some(v);
    }

    pub fn root(&self) -> Option<usize> {
        self.root
    }

    pub fn add_edge(&mut self, u: usize, v: usize, kind: EdgeKind, exponent: Rational64) {
        self.edges.push(GraphEdge { ends: (u, v), exponent, kind });
    }

    /// Add an edge with the built-in exponent of its kind.
    pub fn add_kind(&mut self, u: usize, v: usize, kind: EdgeKind) {
        let a = kind.default_exponent().expect("kind has a default exponent");
        self.add_edge(u, v, kind, a);
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertex_name(&self, v: usize) -> &str {
        &self.vertices[v]
    }

    pub fn edges(&self) -> &[GraphEdge] {
        &self.edges
    }

    pub fn scaling_dimension(&self) -> Rational64 {
        self.scaling_dimension
    }

    /// The same graph with every exponent and the dimension multiplied by `s`.
    pub fn scaled(&self, s: Rational64) -> Self {
        let mut g = self.clone();
        g.scaling_dimension *= s;
        for e in &mut g.edges {
            e.exponent *= s;
        }
        g
    }

    pub fn validate(&self) -> Result<(), PowerCountError> {
        let n = self.vertices.len();
        if n == 0 {
            return Err(PowerCountError::Empty);
        }
        if n > MAX_VERTICES {
            return Err(PowerCountError::TooLarge(n));
        }
        for (i, e) in self.edges.iter().enumerate() {
            for v in [e.ends.0, e.ends.1] {
                if v >= n {
                    return Err(PowerCountError::UnknownVertex { edge: i, vertex: v.to_string() });
                }
            }
            if e.exponent.is_negative() {
                return Err(PowerCountError::NegativeExponent { edge: i, exponent: e.exponent });
            }
            if e.kind == EdgeKind::TestFn && !e.exponent.is_zero() {
                return Err(PowerCountError::TestEdgeExponent { edge: i, exponent: e.exponent });
            }
        }
        if !connected(n, self.edges.iter().map(|e| e.ends), |_| true) {
            return Err(PowerCountError::Disconnected);
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self, PowerCountError> {
        let file: GraphFile = serde_json::from_str(text).map_err(|e| PowerCountError::Json(e.to_string()))?;
        let rational = |s: &str| parse_rational(s).ok_or_else(|| PowerCountError::BadRational(s.to_string()));
        let mut overrides = BTreeMap::new();
        for (k, v) in &file.exponents {
            overrides.insert(k.clone(), rational(v)?);
        }
        let index: BTreeMap<&str, usize> = file.vertices.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        let lookup = |edge: usize, name: &str| {
            index.get(name).copied().ok_or_else(|| PowerCountError::UnknownVertex { edge, vertex: name.to_string() })
        };
        let mut g = FeynmanGraph {
            name: file.name.clone(),
            vertices: file.vertices.clone(),
            root: None,
            edges: Vec::new(),
            scaling_dimension: rational(&file.scaling_dimension)?,
        };
        if let Some(r) = &file.root {
            g.root = Some(lookup(usize::MAX, r)?);
        }
        for (i, e) in file.edges.iter().enumerate() {
            let kind = EdgeKind::parse(&e.kind);
            let exponent = match &e.exponent {
                Some(s) => rational(s)?,
                None => match overrides.get(kind.name()) {
                    Some(a) => *a,
                    None => kind.default_exponent().ok_or_else(|| PowerCountError::UnknownKind { edge: i, kind: e.kind.clone() })?,
                },
            };
            g.add_edge(lookup(i, &e.from)?, lookup(i, &e.to)?, kind, exponent);
        }
        g.validate()?;
        Ok(g)
    }

    pub fn to_json(&self) -> String {
        let file = GraphFile {
            name: self.name.clone(),
            vertices: self.vertices.clone(),
            root: self.root.map(|r| self.vertices[r].clone()),
            scaling_dimension: self.scaling_dimension.to_string(),
            exponents: BTreeMap::new(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeEntry {
                    from: self.vertices[e.ends.0].clone(),
                    to: self.vertices[e.ends.1].clone(),
                    kind: e.kind.name().to_string(),
                    exponent: Some(e.exponent.to_string()),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("graph serialises")
    }
}

fn connected(n: usize, edges: impl Iterator<Item = (usize, usize)>, keep: impl Fn(usize) -> bool) -> bool {
    let mut adj = vec![Vec::new(); n];
    for (u, v) in edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    let Some(start) = (0..n).find(|&v| keep(v)) else {
        return true;
    };
    let mut seen = vec![false; n];
    let mut stack = vec![start];
    seen[start] = true;
    while let Some(u) = stack.pop() {
        for &w in &adj[u] {
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    (0..n).all(|v| !keep(v) || seen[v])
}

/// Outcome of the power-counting test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeinbergReport {
    pub convergent: bool,
    /// Vertices of the subgraph with the smallest margin, in increasing order.
    pub worst_subgraph: Vec<usize>,
    /// `D (|V'| - 1) - Σ a_e` for the worst subgraph.
    pub margin: Rational64,
    pub edge_sum: Rational64,
    pub bound: Rational64,
}

impl WeinbergReport {
    pub fn verdict(&self) -> &'static str {
        if self.convergent {
            "convergent"
        } else {
            "divergent"
        }
    }
}

impl fmt::Display for WeinbergReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cmp = match self.edge_sum.cmp(&self.bound) {
            std::cmp::Ordering::Less => "<",
            std::cmp::Ordering::Equal => "=",
            std::cmp::Ordering::Greater => ">",
        };
        write!(
            f,
            "{}, margin {}, subgraph sum {} {} {}",
            self.verdict(),
            self.margin,
            crate::degree::ratio_to_f64(self.edge_sum),
            cmp,
            crate::degree::ratio_to_f64(self.bound)
        )
    }
}

fn mask_vertices(mask: u32) -> Vec<usize> {
    (0..32).filter(|i| mask & (1 << i) != 0).collect()
}

/// Check the bound on every vertex subset with at least two vertices,
/// using induced edge sets. Equality counts as divergent.
pub fn weinberg_check(g: &FeynmanGraph) -> Result<WeinbergReport, PowerCountError> {
    g.validate()?;
    let n = g.vertex_count();
    let d = g.scaling_dimension();
    let edge_masks: Vec<(u32, Rational64)> =
        g.edges.iter().map(|e| ((1u32 << e.ends.0) | (1u32 << e.ends.1), e.exponent)).collect();
    let mut best: Option<(Rational64, Vec<usize>, Rational64, Rational64)> = None;
    for mask in 1u32..(1u32 << n) {
        let size = mask.count_ones() as i64;
        if size < 2 {
            continue;
        }
        let sum: Rational64 = edge_masks.iter().filter(|(m, _)| m & mask == *m).map(|(_, a)| *a).sum();
        let bound = d * Rational64::from_integer(size - 1);
        let margin = bound - sum;
        let verts = mask_vertices(mask);
        let better = match &best {
            None => true,
            Some((m, v, _, _)) => margin < *m || (margin == *m && verts < *v),
        };
        if better {
            best = Some((margin, verts, sum, bound));
        }
    }
    match best {
        Some((margin, worst_subgraph, edge_sum, bound)) => {
            Ok(WeinbergReport { convergent: margin.is_positive(), worst_subgraph, margin, edge_sum, bound })
        }
        // a single vertex has no proper subgraph to diverge
        None => Ok(WeinbergReport {
            convergent: true,
            worst_subgraph: vec![0],
            margin: Rational64::zero(),
            edge_sum: Rational64::zero(),
            bound: Rational64::zero(),
        }),
    }
}

/// Order of the convolution of two kernels of orders `a1` and `a2` in
/// scaling dimension `d`.
pub fn kernel_conv_order(a1: Rational64, a2: Rational64, d: Rational64) -> Result<Rational64, PowerCountError> {
    if a1 >= d {
        return Err(PowerCountError::Domain(format!("first order {a1} is not below the dimension {d}")));
    }
    if a2 >= d {
        return Err(PowerCountError::Domain(format!("second order {a2} is not below the dimension {d}")));
    }
    if a1 + a2 <= d {
        return Err(PowerCountError::Domain(format!("orders {a1} + {a2} do not exceed the dimension {d}")));
    }
    Ok(a1 + a2 - d)
}

/// Whether the graph stays connected after cutting any single edge.
///
/// Vertices left without edges are ignored. With `exclude_test_edges` set,
/// test-function edges are removed first, so the question is asked of the
/// integrated part of the graph alone.
pub fn two_connectivity(g: &FeynmanGraph, exclude_test_edges: bool) -> bool {
    let n = g.vertex_count();
    let edges: Vec<(usize, usize)> = g
        .edges
        .iter()
        .filter(|e| !(exclude_test_edges && e.kind == EdgeKind::TestFn))
        .map(|e| e.ends)
        .collect();
    if edges.is_empty() {
        return false;
    }
    let mut used = vec![false; n];
    for &(u, v) in &edges {
        used[u] = true;
        used[v] = true;
    }
    if !connected(n, edges.iter().copied(), |v| used[v]) {
        return false;
    }
    (0..edges.len()).all(|cut| {
        let rest = edges.iter().enumerate().filter(|(i, _)| *i != cut).map(|(_, e)| *e);
        connected(n, rest, |v| used[v])
    })
}
