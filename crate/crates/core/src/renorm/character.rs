use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::subgraph::Flavour;
use super::RenormError;
use crate::poly::Poly;
use crate::tree::{DecoratedTree, Forest, Grading};

/// A map from negative-sector trees to scalar polynomials, extended to
/// forests multiplicatively. Trees without a stored value map to zero,
/// except edgeless trees, which map to one.
///
/// A plain character evaluated on a tree carrying extended labels looks up
/// the projection of that tree, so the same character drives both the plain
/// and the extended action.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Character {
    flavour: Flavour,
    values: BTreeMap<DecoratedTree, Poly>,
}

#[derive(Serialize, Deserialize)]
struct CharacterFile {
    flavour: Flavour,
    values: Vec<CharacterEntry>,
}

#[derive(Serialize, Deserialize)]
struct CharacterEntry {
    tree: DecoratedTree,
    value: Poly,
}

impl Character {
    /// The unit of the group: zero on every tree with an edge.
    pub fn counit(flavour: Flavour) -> Self {
        Character { flavour, values: BTreeMap::new() }
    }

    pub fn new(flavour: Flavour) -> Self {
        Character::counit(flavour)
    }

    pub fn flavour(&self) -> Flavour {
        self.flavour
    }

    pub fn set(&mut self, t: DecoratedTree, value: Poly) {
        if value.is_zero() {
            self.values.remove(&t);
        } else {
            self.values.insert(t, value);
        }
    }

    pub fn with(mut self, t: DecoratedTree, value: Poly) -> Self {
        self.set(t, value);
        self
    }

    pub fn values(&self) -> impl Iterator<Item = (&DecoratedTree, &Poly)> {
        self.values.iter()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn value(&self, t: &DecoratedTree) -> Poly {
        if t.edge_count() == 0 {
            return Poly::one();
        }
        let found = match self.flavour {
            Flavour::Plain if t.has_extended_labels() => self.values.get(&t.project_extended()),
            _ => self.values.get(t),
        };
        found.cloned().unwrap_or_default()
    }

    pub fn eval_forest(&self, f: &Forest) -> Poly {
        let mut acc = Poly::one();
        for t in f.trees() {
            let v = self.value(t);
            if v.is_zero() {
                return Poly::zero();
            }
            acc = &acc * &v;
        }
        acc
    }

    /// Reject values on trees outside the negative sector.
    pub fn validate(&self, grading: &Grading) -> Result<(), RenormError> {
        for t in self.values.keys() {
            let deg = grading.degree(t)?;
            if !deg.is_negative() || !t.is_poly_free() || t.edge_count() == 0 {
                return Err(RenormError::NotNegativeSector { tree: t.to_string(), degree: deg });
            }
            if self.flavour == Flavour::Plain && t.has_extended_labels() {
                return Err(RenormError::FlavourMismatch);
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self, RenormError> {
        let file: CharacterFile = serde_json::from_str(text)?;
        let mut c = Character::counit(file.flavour);
        for e in file.values {
            let prev = c.values.get(&e.tree).cloned().unwrap_or_default();
            c.set(e.tree, prev + e.value);
        }
        Ok(c)
    }

    pub fn to_json(&self) -> String {
        let file = CharacterFile {
            flavour: self.flavour,
            values: self.values.iter().map(|(t, v)| CharacterEntry { tree: t.clone(), value: v.clone() }).collect(),
        };
        serde_json::to_string_pretty(&file).expect("character serialises")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (t, v) in &self.values {
            let _ = writeln!(out, "g({t}) = {v}");
        }
        out
    }
}
