//! Decorated rooted trees, forests and their degree.
//!
//! A tree is a root [`NodeLabel`] together with a multiset of [`Branch`]es.
//! Each branch is one integration edge, optionally carrying a derivative
//! multi-index, leading to a subtree. Children are kept sorted, so two trees
//! built from equivalent expressions compare equal and hash identically.

use std::fmt;

use num_rational::Rational64;
use thiserror::Error;

use crate::degree::{Degree, MultiIndex};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TreeError {
    #[error("noise index {index} is out of range (only {available} noises declared)")]
    NoiseOutOfRange { index: u32, available: usize },
    #[error("cannot multiply two noises Xi({left}) and Xi({right}) at the same point")]
    NoiseCollision { left: u32, right: u32 },
    #[error("extended label {0} must be non-positive")]
    PositiveExtended(Degree),
}

/// Decoration of a single vertex.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeLabel {
    pub poly: MultiIndex,
    /// `0` means no noise, `j ≥ 1` means `Xi(j)`.
    pub noise: u32,
    pub extended: Degree,
}

impl NodeLabel {
    pub fn is_unit(&self) -> bool {
        self.poly.is_zero() && self.noise == 0 && self.extended.is_zero()
    }
}

/// One integration edge together with the subtree it points to.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Branch {
    pub deriv: MultiIndex,
    pub tree: DecoratedTree,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DecoratedTree {
    label: NodeLabel,
    children: Vec<Branch>,
}

impl DecoratedTree {
    /// Build a tree, sorting the children into canonical order. The children
    /// themselves are assumed canonical (they are whenever they were built
    /// through this constructor).
    pub fn new(label: NodeLabel, mut children: Vec<Branch>) -> Self {
        children.sort();
        DecoratedTree { label, children }
    }

    /// Build a tree without any normalisation. Equality on such trees is
    /// structural; call [`canonicalize`](Self::canonicalize) before comparing.
    pub fn from_raw(label: NodeLabel, children: Vec<Branch>) -> Self {
        DecoratedTree { label, children }
    }

    pub fn unit() -> Self {
        DecoratedTree::default()
    }

    pub fn noise(index: u32) -> Self {
        DecoratedTree::leaf(NodeLabel { noise: index, ..NodeLabel::default() })
    }

    pub fn monomial(k: MultiIndex) -> Self {
        DecoratedTree::leaf(NodeLabel { poly: k, ..NodeLabel::default() })
    }

    pub fn leaf(label: NodeLabel) -> Self {
        DecoratedTree { label, children: Vec::new() }
    }

    pub fn label(&self) -> &NodeLabel {
        &self.label
    }

    pub fn children(&self) -> &[Branch] {
        &self.children
    }

    pub fn is_unit(&self) -> bool {
        self.label.is_unit() && self.children.is_empty()
    }

    /// Planted trees are those whose root is bare and has exactly one edge.
    pub fn is_planted(&self) -> bool {
        self.label.is_unit() && self.children.len() == 1
    }

    pub fn with_label(&self, label: NodeLabel) -> Self {
        DecoratedTree { label, children: self.children.clone() }
    }

    pub fn canonicalize(&self) -> Self {
        let children = self
            .children
            .iter()
            .map(|b| Branch { deriv: b.deriv.clone(), tree: b.tree.canonicalize() })
            .collect();
        DecoratedTree::new(self.label.clone(), children)
    }

    pub fn is_canonical(&self) -> bool {
        self.children.windows(2).all(|w| w[0] <= w[1])
            && self.children.iter().all(|b| b.tree.is_canonical())
    }

    pub fn edge_count(&self) -> usize {
        self.children.iter().map(|b| 1 + b.tree.edge_count()).sum()
    }

    pub fn node_count(&self) -> usize {
        1 + self.children.iter().map(|b| b.tree.node_count()).sum::<usize>()
    }

    /// Whether every vertex has zero polynomial decoration.
    pub fn is_poly_free(&self) -> bool {
        self.label.poly.is_zero() && self.children.iter().all(|b| b.tree.is_poly_free())
    }

    pub fn has_extended_labels(&self) -> bool {
        !self.label.extended.is_zero() || self.children.iter().any(|b| b.tree.has_extended_labels())
    }

    pub fn max_noise(&self) -> u32 {
        self.children.iter().map(|b| b.tree.max_noise()).fold(self.label.noise, u32::max)
    }

    /// The map forgetting all extended labels.
    pub fn project_extended(&self) -> Self {
        let label = NodeLabel { extended: Degree::ZERO, ..self.label.clone() };
        let children = self
            .children
            .iter()
            .map(|b| Branch { deriv: b.deriv.clone(), tree: b.tree.project_extended() })
            .collect();
        DecoratedTree::new(label, children)
    }

    /// Zero the polynomial labels everywhere, optionally the extended ones too.
    pub fn strip_poly(&self, keep_extended: bool) -> Self {
        let label = NodeLabel {
            poly: MultiIndex::zero(),
            noise: self.label.noise,
            extended: if keep_extended { self.label.extended } else { Degree::ZERO },
        };
        let children = self
            .children
            .iter()
            .map(|b| Branch { deriv: b.deriv.clone(), tree: b.tree.strip_poly(keep_extended) })
            .collect();
        DecoratedTree::new(label, children)
    }

    /// Split the root into its elementary factors: the polynomial part, the
    /// noise, and one planted tree per edge. The extended label is returned
    /// separately since it belongs to the merged root, not to any factor.
    pub fn root_factors(&self) -> (MultiIndex, u32, Degree, Vec<Branch>) {
        (self.label.poly.clone(), self.label.noise, self.label.extended, self.children.clone())
    }
}

/// Multiply two trees by joining their roots.
pub fn tree_product(a: &DecoratedTree, b: &DecoratedTree) -> Result<DecoratedTree, TreeError> {
    let noise = match (a.label.noise, b.label.noise) {
        (0, n) | (n, 0) => n,
        (l, r) => return Err(TreeError::NoiseCollision { left: l, right: r }),
    };
    let label = NodeLabel {
        poly: a.label.poly.add(&b.label.poly),
        noise,
        extended: a.label.extended + b.label.extended,
    };
    let mut children = a.children.clone();
    children.extend(b.children.iter().cloned());
    Ok(DecoratedTree::new(label, children))
}

/// Product of several trees; the empty product is the unit.
pub fn tree_product_all<'a>(
    trees: impl IntoIterator<Item = &'a DecoratedTree>,
) -> Result<DecoratedTree, TreeError> {
    trees.into_iter().try_fold(DecoratedTree::unit(), |acc, t| tree_product(&acc, t))
}

/// Attach `t` below a fresh bare root through a plain integration edge.
pub fn plant(t: &DecoratedTree) -> DecoratedTree {
    plant_with(t, MultiIndex::zero())
}

/// Like [`plant`] but the edge carries the derivative `deriv`.
pub fn plant_with(t: &DecoratedTree, deriv: MultiIndex) -> DecoratedTree {
    DecoratedTree::new(NodeLabel::default(), vec![Branch { deriv, tree: t.clone() }])
}

/// Degree assignment: noise degrees (index `j` at position `j-1`) and the
/// order of the integration kernel, which doubles as the time weight.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grading {
    pub noise_degrees: Vec<Degree>,
    pub kernel_order: Rational64,
}

impl Grading {
    pub fn new(noise_degrees: Vec<Degree>, kernel_order: Rational64) -> Self {
        Grading { noise_degrees, kernel_order }
    }

    pub fn poly_degree(&self, k: &MultiIndex) -> Degree {
        Degree::constant(k.weighted_len(self.kernel_order))
    }

    pub fn edge_degree(&self, deriv: &MultiIndex) -> Degree {
        Degree::constant(self.kernel_order - deriv.weighted_len(self.kernel_order))
    }

    pub fn label_degree(&self, label: &NodeLabel) -> Result<Degree, TreeError> {
        let mut d = self.poly_degree(&label.poly) + label.extended;
        if label.noise != 0 {
            let nd = self.noise_degrees.get(label.noise as usize - 1).ok_or(
                TreeError::NoiseOutOfRange { index: label.noise, available: self.noise_degrees.len() },
            )?;
            d += *nd;
        }
        Ok(d)
    }

    pub fn degree(&self, t: &DecoratedTree) -> Result<Degree, TreeError> {
        let mut d = self.label_degree(&t.label)?;
        for b in &t.children {
            d += self.edge_degree(&b.deriv) + self.degree(&b.tree)?;
        }
        Ok(d)
    }
}

/// Multiset of trees; the empty forest is the unit of the forest algebra.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Forest(Vec<DecoratedTree>);

impl Forest {
    pub fn empty() -> Self {
        Forest(Vec::new())
    }

    pub fn new(mut trees: Vec<DecoratedTree>) -> Self {
        trees.sort();
        Forest(trees)
    }

    pub fn single(t: DecoratedTree) -> Self {
        Forest(vec![t])
    }

    pub fn trees(&self) -> &[DecoratedTree] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn product(&self, other: &Forest) -> Forest {
        let mut v = self.0.clone();
        v.extend(other.0.iter().cloned());
        Forest::new(v)
    }
}

impl fmt::Display for Forest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "[]");
        }
        let parts: Vec<String> = self.0.iter().map(|t| t.to_string()).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xi() -> DecoratedTree {
        DecoratedTree::noise(1)
    }

    fn grading() -> Grading {
        Grading::new(vec![Degree::frac(-5, 2, -1, 1)], Rational64::from_integer(2))
    }

    #[test]
    fn unit_laws() {
        let t = plant(&xi());
        assert_eq!(tree_product(&DecoratedTree::unit(), &t).unwrap(), t);
        assert_eq!(tree_product(&t, &DecoratedTree::unit()).unwrap(), t);
    }

    #[test]
    fn noise_collision_rejected() {
        assert!(matches!(tree_product(&xi(), &xi()), Err(TreeError::NoiseCollision { .. })));
    }

    #[test]
    fn degrees_of_small_trees() {
        let g = grading();
        let one = plant(&xi());
        assert_eq!(g.degree(&one).unwrap(), Degree::frac(-1, 2, -1, 1));
        assert_eq!(g.degree(&plant(&DecoratedTree::unit())).unwrap(), Degree::int(2));
        let bad = DecoratedTree::noise(2);
        assert!(g.degree(&bad).is_err());
    }

    #[test]
    fn canonicalize_sorts_nested_children() {
        let a = plant(&xi());
        let b = plant(&plant(&xi()));
        let raw = DecoratedTree::from_raw(
            NodeLabel::default(),
            vec![
                Branch { deriv: MultiIndex::zero(), tree: xi() },
                Branch { deriv: MultiIndex::zero(), tree: plant(&xi()) },
            ],
        );
        let other = tree_product(&a, &b).unwrap();
        assert_ne!(raw, other);
        assert_eq!(raw.canonicalize(), other);
        assert!(other.is_canonical());
    }
}
