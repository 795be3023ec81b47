//! Text notation for trees.
//!
//! ```text
//! tree    := product
//! product := factor ('*' factor)* ['{beta=' degree '}']
//! factor  := '1' | 'Xi' ['(' j ')'] | 'X^(' k0 ',' k1 ... ')'
//!          | 'I(' tree ')' | 'I[(' k0 ',' ... ')](' tree ')'
//!          | '(' tree ')' | '<' code '>'
//! ```
//!
//! A product joins roots, so `I(Xi(1))*I(Xi(1))` is the cherry with two
//! noise leaves. The `{beta=..}` suffix sets the extended label of the root
//! of the product it closes. `<k>` and `<ab>` are shorthands for the cubic
//! model's trees: `<k>` is `I(Xi)^k`, `<0k>` is `I(<k>)` and `<ab>` is
//! `I(<a>)*<b>` with `<0>` the unit.
//!
//! Printing emits the canonical form, and parsing a printed tree gives the
//! same tree back.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::degree::{Degree, MultiIndex};
use crate::tree::{plant, plant_with, tree_product, tree_product_all, DecoratedTree, NodeLabel};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("cannot parse tree `{input}` at byte {offset}: {reason}")]
pub struct ParseTreeError {
    pub input: String,
    pub offset: usize,
    pub reason: String,
}

impl fmt::Display for DecoratedTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let label = self.label();
        let mut factors: Vec<String> = Vec::new();
        if !label.poly.is_zero() {
            factors.push(format!("X^{}", label.poly));
        }
        if label.noise != 0 {
            factors.push(format!("Xi({})", label.noise));
        }
        for b in self.children() {
            if b.deriv.is_zero() {
                factors.push(format!("I({})", b.tree));
            } else {
                factors.push(format!("I[{}]({})", b.deriv, b.tree));
            }
        }
        if factors.is_empty() {
            write!(f, "1")?;
        } else {
            write!(f, "{}", factors.join("*"))?;
        }
        if !label.extended.is_zero() {
            write!(f, "{{beta={}}}", label.extended)?;
        }
        Ok(())
    }
}

/// Trees of the cubic model addressed by their two-digit code, e.g. `"32"`.
pub fn cubic_symbol(code: &str) -> Option<DecoratedTree> {
    let digits: Vec<u32> = code.chars().map(|c| c.to_digit(10)).collect::<Option<_>>()?;
    let power = |k: u32| -> Option<DecoratedTree> {
        if k > 3 {
            return None;
        }
        let leaf = plant(&DecoratedTree::noise(1));
        let copies = vec![leaf; k as usize];
        tree_product_all(copies.iter()).ok()
    };
    match digits.as_slice() {
        [k] if *k >= 1 => power(*k),
        [0, k] if *k >= 1 => Some(plant(&power(*k)?)),
        [a, b] if *a >= 1 => tree_product(&plant(&power(*a)?), &power(*b)?).ok(),
        _ => None,
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, reason: impl Into<String>) -> ParseTreeError {
        ParseTreeError { input: self.src.to_string(), offset: self.pos, reason: reason.into() }
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, token: &str) -> Result<(), ParseTreeError> {
        if self.eat(token) {
            Ok(())
        } else {
            Err(self.err(format!("expected `{token}`")))
        }
    }

    fn integer(&mut self) -> Result<u32, ParseTreeError> {
        self.skip_ws();
        let len = self.rest().bytes().take_while(u8::is_ascii_digit).count();
        if len == 0 {
            return Err(self.err("expected a non-negative integer"));
        }
        let v = self.rest()[..len].parse().map_err(|_| self.err("integer too large"))?;
        self.pos += len;
        Ok(v)
    }

    fn multi_index(&mut self) -> Result<MultiIndex, ParseTreeError> {
        self.expect("(")?;
        let mut entries = Vec::new();
        if !self.eat(")") {
            loop {
                entries.push(self.integer()?);
                if self.eat(")") {
                    break;
                }
                self.expect(",")?;
            }
        }
        Ok(MultiIndex::new(entries))
    }

    fn product(&mut self) -> Result<DecoratedTree, ParseTreeError> {
        let mut acc = self.factor()?;
        while self.eat("*") {
            let rhs = self.factor()?;
            acc = tree_product(&acc, &rhs).map_err(|e| self.err(e.to_string()))?;
        }
        if self.eat("{") {
            self.expect("beta")?;
            self.expect("=")?;
            let end = self.rest().find('}').ok_or_else(|| self.err("unterminated `{beta=`"))?;
            let text = &self.rest()[..end];
            let beta: Degree = text.parse().map_err(|e: crate::degree::ParseDegreeError| self.err(e.to_string()))?;
            if beta.is_positive() {
                return Err(self.err("extended labels must be non-positive"));
            }
            self.pos += end + 1;
            let label = acc.label();
            let label = NodeLabel { extended: label.extended + beta, ..label.clone() };
            acc = acc.with_label(label);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<DecoratedTree, ParseTreeError> {
        self.skip_ws();
        if self.eat("(") {
            let inner = self.product()?;
            self.expect(")")?;
            return Ok(inner);
        }
        if self.eat("<") {
            let end = self.rest().find('>').ok_or_else(|| self.err("unterminated `<`"))?;
            let code = &self.rest()[..end];
            let t = cubic_symbol(code.trim()).ok_or_else(|| self.err(format!("unknown code <{code}>")))?;
            self.pos += end + 1;
            return Ok(t);
        }
        if self.eat("Xi") {
            let idx = if self.eat("(") {
                let j = self.integer()?;
                self.expect(")")?;
                j
            } else {
                1
            };
            if idx == 0 {
                return Err(self.err("noise indices start at 1"));
            }
            return Ok(DecoratedTree::noise(idx));
        }
        if self.eat("X") {
            self.expect("^")?;
            let k = self.multi_index()?;
            return Ok(DecoratedTree::monomial(k));
        }
        if self.eat("I") {
            let deriv = if self.eat("[") {
                let k = self.multi_index()?;
                self.expect("]")?;
                k
            } else {
                MultiIndex::zero()
            };
            self.expect("(")?;
            let inner = self.product()?;
            self.expect(")")?;
            return Ok(plant_with(&inner, deriv));
        }
        if self.eat("1") {
            return Ok(DecoratedTree::unit());
        }
        Err(self.err("expected `1`, `Xi`, `X^`, `I`, `<` or `(`"))
    }
}

impl FromStr for DecoratedTree {
    type Err = ParseTreeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut p = Parser { src: s, pos: 0 };
        let t = p.product()?;
        p.skip_ws();
        if p.pos != s.len() {
            return Err(p.err("trailing input"));
        }
        Ok(t)
    }
}

impl serde::Serialize for DecoratedTree {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for DecoratedTree {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
