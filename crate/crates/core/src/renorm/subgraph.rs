//! Edge subsets of a tree, their extraction and contraction.

use crate::degree::{Degree, MultiIndex};
use crate::tree::{Branch, DecoratedTree, Forest, Grading, NodeLabel, TreeError};

/// Trees are small; edge subsets are bit masks.
pub const MAX_EDGES: usize = 24;

/// Whether extended labels take part in extraction and contraction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavour {
    Plain,
    Extended,
}

/// A tree flattened in preorder. Vertex 0 is the root; every other vertex
/// `v` owns the edge from its parent, which is edge number `v - 1`.
#[derive(Clone, Debug)]
pub struct FlatTree {
    labels: Vec<NodeLabel>,
    parent: Vec<usize>,
    deriv: Vec<MultiIndex>,
    children: Vec<Vec<usize>>,
}

impl FlatTree {
    pub fn new(t: &DecoratedTree) -> Self {
        let mut flat = FlatTree { labels: Vec::new(), parent: Vec::new(), deriv: Vec::new(), children: Vec::new() };
        flat.push(t, usize::MAX, MultiIndex::zero());
        flat
    }

    fn push(&mut self, t: &DecoratedTree, parent: usize, deriv: MultiIndex) -> usize {
        let id = self.labels.len();
        self.labels.push(t.label().clone());
        self.parent.push(parent);
        self.deriv.push(deriv);
        self.children.push(Vec::new());
        for b in t.children() {
            let c = self.push(&b.tree, id, b.deriv.clone());
            self.children[id].push(c);
        }
        id
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.labels.len() - 1
    }

    pub fn label(&self, v: usize) -> &NodeLabel {
        &self.labels[v]
    }

    /// Endpoints `(parent, child)` of edge `e`.
    pub fn edge(&self, e: usize) -> (usize, usize) {
        (self.parent[e + 1], e + 1)
    }

    fn in_mask(mask: u64, v: usize) -> bool {
        v > 0 && mask & (1 << (v - 1)) != 0
    }

    /// Connected components of the subgraph spanned by the edges in `mask`,
    /// each listed by its vertices in preorder (the first is its top).
    pub fn components(&self, mask: u64) -> Vec<Vec<usize>> {
        let mut comp_of = vec![usize::MAX; self.labels.len()];
        let mut comps: Vec<Vec<usize>> = Vec::new();
        for v in 0..self.labels.len() {
            if Self::in_mask(mask, v) {
                let c = comp_of[self.parent[v]];
                comp_of[v] = c;
                comps[c].push(v);
            } else if self.children[v].iter().any(|&c| Self::in_mask(mask, c)) {
                comp_of[v] = comps.len();
                comps.push(vec![v]);
            }
        }
        comps
    }

    fn subtree(&self, v: usize, mask: u64, label_of: &dyn Fn(usize) -> NodeLabel) -> DecoratedTree {
        let children = self.children[v]
            .iter()
            .filter(|&&c| Self::in_mask(mask, c))
            .map(|&c| Branch { deriv: self.deriv[c].clone(), tree: self.subtree(c, mask, label_of) })
            .collect();
        DecoratedTree::new(label_of(v), children)
    }

    /// The component with top vertex `top`, with polynomial labels dropped
    /// (and extended labels too unless `flavour` is extended).
    pub fn component_tree(&self, top: usize, mask: u64, flavour: Flavour) -> DecoratedTree {
        let label_of = |v: usize| NodeLabel {
            poly: MultiIndex::zero(),
            noise: self.labels[v].noise,
            extended: match flavour {
                Flavour::Extended => self.labels[v].extended,
                Flavour::Plain => Degree::ZERO,
            },
        };
        self.subtree(top, mask, &label_of)
    }

    /// The whole tree back, for checking.
    pub fn to_tree(&self) -> DecoratedTree {
        let all = if self.edge_count() == 64 { u64::MAX } else { (1u64 << self.edge_count()) - 1 };
        self.subtree(0, all, &|v| self.labels[v].clone())
    }
}

/// One edge subset with its connected components.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Extraction {
    pub mask: u64,
    pub components: Vec<Vec<usize>>,
}

/// Every edge subset of `t`, in increasing mask order, starting from the
/// empty one.
pub fn enumerate_subgraphs(flat: &FlatTree) -> impl Iterator<Item = Extraction> + '_ {
    let n = flat.edge_count();
    assert!(n <= MAX_EDGES, "tree has {n} edges, more than the supported {MAX_EDGES}");
    (0..(1u64 << n)).map(move |mask| Extraction { mask, components: flat.components(mask) })
}

/// Result of extracting a subgraph: either a forest of negative-degree
/// trees or zero, which absorbs everything it multiplies.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Extracted {
    Forest(Forest),
    Zero,
}

pub fn extract(
    flat: &FlatTree,
    x: &Extraction,
    grading: &Grading,
    flavour: Flavour,
) -> Result<Extracted, TreeError> {
    let mut trees = Vec::with_capacity(x.components.len());
    for comp in &x.components {
        let t = flat.component_tree(comp[0], x.mask, flavour);
        if !grading.degree(&t)?.is_negative() {
            return Ok(Extracted::Zero);
        }
        trees.push(t);
    }
    Ok(Extracted::Forest(Forest::new(trees)))
}

/// Collapse every component of `x` to one vertex.
pub fn contract(flat: &FlatTree, x: &Extraction, grading: &Grading, flavour: Flavour) -> Result<DecoratedTree, TreeError> {
    let n = flat.vertex_count();
    let mut comp_of = vec![usize::MAX; n];
    for (i, comp) in x.components.iter().enumerate() {
        for &v in comp {
            comp_of[v] = i;
        }
    }
    let mut merged: Vec<NodeLabel> = Vec::with_capacity(x.components.len());
    for comp in &x.components {
        let mut poly = MultiIndex::zero();
        for &v in comp {
            poly = poly.add(&flat.labels[v].poly);
        }
        let extended = match flavour {
            Flavour::Extended => grading.degree(&flat.component_tree(comp[0], x.mask, Flavour::Extended))?,
            Flavour::Plain => Degree::ZERO,
        };
        merged.push(NodeLabel { poly, noise: 0, extended });
    }

    fn build(flat: &FlatTree, x: &Extraction, comp_of: &[usize], merged: &[NodeLabel], v: usize) -> DecoratedTree {
        let (members, label): (Vec<usize>, NodeLabel) = match comp_of[v] {
            usize::MAX => (vec![v], flat.labels[v].clone()),
            c => (x.components[c].clone(), merged[c].clone()),
        };
        let mut children = Vec::new();
        for &u in &members {
            for &c in &flat.children[u] {
                if !FlatTree::in_mask(x.mask, c) {
                    children.push(Branch { deriv: flat.deriv[c].clone(), tree: build(flat, x, comp_of, merged, c) });
                }
            }
        }
        DecoratedTree::new(label, children)
    }
    Ok(build(flat, x, &comp_of, &merged, 0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::notation::cubic_symbol;

    #[test]
    fn flattening_roundtrips() {
        let t = cubic_symbol("32").unwrap();
        let flat = FlatTree::new(&t);
        assert_eq!(flat.edge_count(), 6);
        assert_eq!(flat.to_tree(), t);
    }

    #[test]
    fn subset_counts() {
        for (code, n) in [("1", 2), ("3", 8), ("32", 64)] {
            let flat = FlatTree::new(&cubic_symbol(code).unwrap());
            assert_eq!(enumerate_subgraphs(&flat).count(), n);
        }
    }

    #[test]
    fn empty_extraction_is_identity() {
        let t = cubic_symbol("22").unwrap();
        let flat = FlatTree::new(&t);
        let g = Grading::new(vec![Degree::frac(-5, 2, -1, 1)], 2.into());
        let x = enumerate_subgraphs(&flat).next().unwrap();
        assert_eq!(extract(&flat, &x, &g, Flavour::Plain).unwrap(), Extracted::Forest(Forest::empty()));
        assert_eq!(contract(&flat, &x, &g, Flavour::Plain).unwrap(), t);
    }
}
