//! Finite linear combinations of trees with polynomial coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_rational::BigRational;
use num_traits::One;

use crate::poly::Poly;
use crate::tree::{tree_product, DecoratedTree, TreeError};

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct TreePolynomial {
    terms: BTreeMap<DecoratedTree, Poly>,
}

impl TreePolynomial {
    pub fn zero() -> Self {
        TreePolynomial::default()
    }

    pub fn tree(t: DecoratedTree) -> Self {
        TreePolynomial::term(t, Poly::one())
    }

    pub fn term(t: DecoratedTree, coeff: Poly) -> Self {
        let mut p = TreePolynomial::zero();
        p.add_term(t, coeff);
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&DecoratedTree, &Poly)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, t: &DecoratedTree) -> Poly {
        self.terms.get(t).cloned().unwrap_or_default()
    }

    pub fn add_term(&mut self, t: DecoratedTree, coeff: Poly) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.get_mut(&t) {
            Some(c) => {
                *c += coeff;
                if c.is_zero() {
                    self.terms.remove(&t);
                }
            }
            None => {
                self.terms.insert(t, coeff);
            }
        }
    }

    pub fn add_assign(&mut self, other: &TreePolynomial) {
        for (t, c) in &other.terms {
            self.add_term(t.clone(), c.clone());
        }
    }

    pub fn scale(&self, c: &Poly) -> TreePolynomial {
        let mut out = TreePolynomial::zero();
        for (t, v) in &self.terms {
            out.add_term(t.clone(), v * c);
        }
        out
    }

    pub fn scale_rational(&self, c: &BigRational) -> TreePolynomial {
        self.scale(&Poly::constant(c.clone()))
    }

    /// Keep only the terms whose tree satisfies `keep`.
    pub fn filter(&self, mut keep: impl FnMut(&DecoratedTree) -> bool) -> TreePolynomial {
        TreePolynomial {
            terms: self.terms.iter().filter(|(t, _)| keep(t)).map(|(t, c)| (t.clone(), c.clone())).collect(),
        }
    }

    /// Apply a map on trees linearly.
    pub fn map_trees(&self, mut f: impl FnMut(&DecoratedTree) -> TreePolynomial) -> TreePolynomial {
        let mut out = TreePolynomial::zero();
        for (t, c) in &self.terms {
            out.add_assign(&f(t).scale(c));
        }
        out
    }

    /// Substitute values into every coefficient.
    pub fn substitute(&self, values: &BTreeMap<String, Poly>) -> TreePolynomial {
        let mut out = TreePolynomial::zero();
        for (t, c) in &self.terms {
            out.add_term(t.clone(), c.substitute(values));
        }
        out
    }

    /// Bilinear extension of the tree product, keeping only products for
    /// which `keep` holds.
    pub fn product_filtered(
        &self,
        other: &TreePolynomial,
        mut keep: impl FnMut(&DecoratedTree) -> bool,
    ) -> Result<TreePolynomial, TreeError> {
        let mut out = TreePolynomial::zero();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let t = tree_product(a, b)?;
                if keep(&t) {
                    out.add_term(t, ca * cb);
                }
            }
        }
        Ok(out)
    }

    pub fn product(&self, other: &TreePolynomial) -> Result<TreePolynomial, TreeError> {
        self.product_filtered(other, |_| true)
    }

    pub fn project_extended(&self) -> TreePolynomial {
        let mut out = TreePolynomial::zero();
        for (t, c) in &self.terms {
            out.add_term(t.project_extended(), c.clone());
        }
        out
    }
}

impl From<DecoratedTree> for TreePolynomial {
    fn from(t: DecoratedTree) -> Self {
        TreePolynomial::tree(t)
    }
}

impl Add for TreePolynomial {
    type Output = TreePolynomial;
    fn add(mut self, rhs: TreePolynomial) -> TreePolynomial {
        TreePolynomial::add_assign(&mut self, &rhs);
        self
    }
}

impl Neg for TreePolynomial {
    type Output = TreePolynomial;
    fn neg(self) -> TreePolynomial {
        TreePolynomial { terms: self.terms.into_iter().map(|(t, c)| (t, -c)).collect() }
    }
}

impl Sub for TreePolynomial {
    type Output = TreePolynomial;
    fn sub(self, rhs: TreePolynomial) -> TreePolynomial {
        self + (-rhs)
    }
}

/// `coeff*tree` terms joined by ` + `; unit coefficients are omitted and
/// compound coefficients parenthesised.
impl fmt::Display for TreePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(t, c)| format_term(t, c)).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

pub(crate) fn format_term(t: &DecoratedTree, c: &Poly) -> String {
    if let Some(v) = c.as_constant() {
        if v.is_one() {
            return t.to_string();
        }
        if (-v.clone()).is_one() {
            return format!("-{t}");
        }
    }
    format!("({c})*{t}")
}
