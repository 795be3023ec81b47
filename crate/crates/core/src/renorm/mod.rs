//! The renormalisation group acting on trees by subgraph extraction and
//! contraction.
//!
//! For a character `g`, the action on a tree `T` is
//! `M_g T = Σ_S g(ι S) · T/S`, the sum running over all edge subsets `S`.
//! Here `ι S` is the forest of connected components of `S` and `T/S` is `T`
//! with every component collapsed to a single vertex. Subsets with a
//! component of non-negative degree contribute nothing.
//!
//! The character-independent part of this sum (which forests and quotients
//! occur, and how often) is cached per tree, so evaluating many characters
//! on the same trees is cheap.

mod character;
mod subgraph;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::{Arc, RwLock};

use thiserror::Error;

pub use character::Character;
pub use subgraph::{contract, enumerate_subgraphs, extract, Extracted, Extraction, FlatTree, Flavour, MAX_EDGES};

use crate::degree::Degree;
use crate::poly::Poly;
use crate::tree::{DecoratedTree, Forest, Grading, TreeError};
use crate::treepoly::TreePolynomial;

#[derive(Debug, Error)]
pub enum RenormError {
    #[error("character flavours differ")]
    FlavourMismatch,
    #[error("character is keyed on `{tree}` of degree {degree}, which is not in the negative sector")]
    NotNegativeSector { tree: String, degree: Degree },
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error("cannot read character: {0}")]
    Json(#[from] serde_json::Error),
}

/// One term of the expansion of a tree: extracting `forest` leaves
/// `quotient`, and this happens for `multiplicity` distinct edge subsets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoproductTerm {
    pub forest: Forest,
    pub quotient: DecoratedTree,
    pub multiplicity: u64,
}

/// Holds the grading, the flavour and a cache of tree expansions. Shareable
/// across threads.
#[derive(Debug)]
pub struct RenormEngine {
    grading: Grading,
    flavour: Flavour,
    cache: RwLock<HashMap<DecoratedTree, Arc<Vec<CoproductTerm>>>>,
}

impl RenormEngine {
    pub fn new(grading: Grading, flavour: Flavour) -> Self {
        RenormEngine { grading, flavour, cache: RwLock::new(HashMap::new()) }
    }

    pub fn grading(&self) -> &Grading {
        &self.grading
    }

    pub fn flavour(&self) -> Flavour {
        self.flavour
    }

    pub fn coproduct(&self, t: &DecoratedTree) -> Result<Arc<Vec<CoproductTerm>>, RenormError> {
        if let Some(hit) = self.cache.read().expect("cache lock").get(t) {
            return Ok(hit.clone());
        }
        let flat = FlatTree::new(t);
        let mut acc: BTreeMap<(Forest, DecoratedTree), u64> = BTreeMap::new();
        for x in enumerate_subgraphs(&flat) {
            let forest = match extract(&flat, &x, &self.grading, self.flavour)? {
                Extracted::Zero => continue,
                Extracted::Forest(f) => f,
            };
            let quotient = contract(&flat, &x, &self.grading, self.flavour)?;
            *acc.entry((forest, quotient)).or_insert(0) += 1;
        }
        let terms: Vec<CoproductTerm> = acc
            .into_iter()
            .map(|((forest, quotient), multiplicity)| CoproductTerm { forest, quotient, multiplicity })
            .collect();
        let terms = Arc::new(terms);
        self.cache.write().expect("cache lock").insert(t.clone(), terms.clone());
        Ok(terms)
    }

    /// `M_g` on a single tree.
    pub fn act_on_tree(&self, g: &Character, t: &DecoratedTree) -> Result<TreePolynomial, RenormError> {
        let mut out = TreePolynomial::zero();
        for term in self.coproduct(t)?.iter() {
            let v = g.eval_forest(&term.forest);
            if !v.is_zero() {
                out.add_term(term.quotient.clone(), v.scale_int(term.multiplicity as i64));
            }
        }
        Ok(out)
    }

    /// `M_g` extended linearly.
    pub fn renorm_map(&self, g: &Character, p: &TreePolynomial) -> Result<TreePolynomial, RenormError> {
        let mut out = TreePolynomial::zero();
        for (t, c) in p.terms() {
            out.add_assign(&self.act_on_tree(g, t)?.scale(c));
        }
        Ok(out)
    }

    /// Value of `f` on a quotient, with the conventions that edgeless trees
    /// give one and non-negative trees give zero.
    fn value_on_quotient(&self, f: &Character, q: &DecoratedTree) -> Result<Poly, RenormError> {
        if q.edge_count() == 0 {
            return Ok(Poly::one());
        }
        if !self.grading.degree(q)?.is_negative() || !q.is_poly_free() {
            return Ok(Poly::zero());
        }
        Ok(f.value(q))
    }

    /// `(f∘g)(T) = Σ_S g(ι S) f(T/S)` on every tree of `domain`, so that
    /// `M_f M_g = M_{f∘g}`.
    pub fn compose(&self, f: &Character, g: &Character, domain: &[DecoratedTree]) -> Result<Character, RenormError> {
        if f.flavour() != g.flavour() {
            return Err(RenormError::FlavourMismatch);
        }
        let mut out = Character::new(f.flavour());
        for t in domain {
            if t.edge_count() == 0 {
                continue;
            }
            let mut acc = Poly::zero();
            for term in self.coproduct(t)?.iter() {
                let gv = g.eval_forest(&term.forest);
                if gv.is_zero() {
                    continue;
                }
                let fv = self.value_on_quotient(f, &term.quotient)?;
                acc += (&gv * &fv).scale_int(term.multiplicity as i64);
            }
            out.set(t.clone(), acc);
        }
        Ok(out)
    }

    /// The group inverse of `g` on `domain`, solved by induction on the
    /// number of edges.
    pub fn invert(&self, g: &Character, domain: &[DecoratedTree]) -> Result<Character, RenormError> {
        let mut memo: HashMap<DecoratedTree, Poly> = HashMap::new();
        let mut out = Character::new(g.flavour());
        for t in domain {
            if t.edge_count() == 0 {
                continue;
            }
            let v = self.invert_at(g, t, &mut memo)?;
            out.set(t.clone(), v);
        }
        Ok(out)
    }

    fn invert_at(&self, g: &Character, t: &DecoratedTree, memo: &mut HashMap<DecoratedTree, Poly>) -> Result<Poly, RenormError> {
        if t.edge_count() == 0 {
            return Ok(Poly::one());
        }
        if !self.grading.degree(t)?.is_negative() || !t.is_poly_free() {
            return Ok(Poly::zero());
        }
        if let Some(v) = memo.get(t) {
            return Ok(v.clone());
        }
        let mut acc = Poly::zero();
        for term in self.coproduct(t)?.iter() {
            if term.forest.is_empty() {
                continue;
            }
            let gv = g.eval_forest(&term.forest);
            if gv.is_zero() {
                continue;
            }
            let hv = self.invert_at(g, &term.quotient, memo)?;
            acc -= (&gv * &hv).scale_int(term.multiplicity as i64);
        }
        memo.insert(t.clone(), acc.clone());
        Ok(acc)
    }

    /// All trees that can appear in extracted forests of `trees`, closed
    /// under taking further extractions. This is the domain on which
    /// composed and inverted characters need values.
    pub fn extraction_domain(&self, trees: &[DecoratedTree]) -> Result<Vec<DecoratedTree>, RenormError> {
        let mut seen: BTreeSet<DecoratedTree> = BTreeSet::new();
        let mut stack: Vec<DecoratedTree> = trees.to_vec();
        while let Some(t) = stack.pop() {
            for term in self.coproduct(&t)?.iter() {
                for f in term.forest.trees() {
                    if seen.insert(f.clone()) {
                        stack.push(f.clone());
                    }
                }
            }
        }
        Ok(seen.into_iter().collect())
    }
}

/// The projection forgetting extended labels, on tree polynomials.
pub fn project_extended(p: &TreePolynomial) -> TreePolynomial {
    p.project_extended()
}
