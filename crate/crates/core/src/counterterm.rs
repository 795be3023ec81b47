//! Renormalised equations.
//!
//! A solution is described by a finite expansion in trees (the ansatz).
//! Powers of the ansatz are expanded exactly up to the order that the
//! product rule guarantees, the renormalisation map is applied in its
//! extended form, and the result is reduced by discarding every term that
//! vanishes when evaluated at its own base point. Whatever survives must be
//! a multiple of the surviving part of the ansatz; that multiple is the
//! counterterm, and it shifts the coupling constant in front of the linear
//! term.
//!
//! Also here: the action of constant shifts on the three-component model
//! `(X, X², X³)` and the scaling actions on coupling constants.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::degree::{Degree, MultiIndex};
use crate::notation::cubic_symbol;
use crate::poly::Poly;
use crate::renorm::{Character, Flavour, RenormEngine, RenormError};
use crate::tree::{plant_with, DecoratedTree, Grading, TreeError};
use crate::treepoly::TreePolynomial;

#[derive(Debug, Error)]
pub enum CountertermError {
    #[error("the renormalised right-hand side has terms not proportional to the ansatz: {0}")]
    ResidualTerms(TreePolynomial),
    #[error("invalid ansatz: {0}")]
    InvalidAnsatz(String),
    #[error("power must be at least 1")]
    ZeroPower,
    #[error("unsupported dimension {0} for the cubic preset (use 2 or 3)")]
    Dimension(u32),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Renorm(#[from] RenormError),
    #[error("cannot read counterterm config: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid value `{0}` in counterterm config")]
    Parse(String),
}

/// A finite tree expansion of a solution, valid up to degree `gamma`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ansatz {
    expansion: TreePolynomial,
    gamma: Degree,
    grading: Grading,
    lowest: Degree,
}

impl Ansatz {
    /// Checks that every tree lies below `gamma` and that the tree of
    /// lowest degree has coefficient one.
    pub fn new(expansion: TreePolynomial, gamma: Degree, grading: Grading) -> Result<Self, CountertermError> {
        let mut lowest: Option<(Degree, DecoratedTree)> = None;
        for (t, _) in expansion.terms() {
            let d = grading.degree(t)?;
            if d >= gamma {
                return Err(CountertermError::InvalidAnsatz(format!("{t} has degree {d}, not below {gamma}")));
            }
            if lowest.as_ref().is_none_or(|(ld, _)| d < *ld) {
                lowest = Some((d, t.clone()));
            }
        }
        let (lowest, lead) = lowest.ok_or_else(|| CountertermError::InvalidAnsatz("empty expansion".into()))?;
        if !expansion.coefficient(&lead).as_constant().is_some_and(|c| c.is_one()) {
            return Err(CountertermError::InvalidAnsatz(format!("lowest-degree tree {lead} must have coefficient 1")));
        }
        Ok(Ansatz { expansion, gamma, grading, lowest })
    }

    /// The cubic model with `deg Ξ = -alpha` in spatial dimension `d`:
    /// `<1> + φ 1 - <03> - 3φ <02> + Σ_i ∇φ_i X_i`, keeping the terms below
    /// `gamma`.
    pub fn cubic(d: u32, alpha: Degree, gamma: Degree) -> Result<Self, CountertermError> {
        let grading = Grading::new(vec![-alpha], Rational64::from_integer(2));
        let phi = Poly::var("phi");
        let mut full = TreePolynomial::zero();
        full.add_term(sym("1"), Poly::one());
        full.add_term(DecoratedTree::unit(), phi.clone());
        full.add_term(sym("03"), -Poly::one());
        full.add_term(sym("02"), phi.scale_int(-3));
        for i in 1..=d as usize {
            full.add_term(DecoratedTree::monomial(MultiIndex::unit(i)), Poly::var(&format!("dphi{i}")));
        }
        let mut kept = TreePolynomial::zero();
        for (t, c) in full.terms() {
            if grading.degree(t)? < gamma {
                kept.add_term(t.clone(), c.clone());
            }
        }
        Ansatz::new(kept, gamma, grading)
    }

    /// `alpha = 5/2 + κ`, `gamma = 1 + 3κ`.
    pub fn cubic_d3() -> Self {
        Ansatz::cubic(3, Degree::frac(5, 2, 1, 1), Degree::frac(1, 1, 3, 1)).expect("preset is valid")
    }

    /// `alpha = 2 + κ`, `gamma = 3κ`.
    pub fn cubic_d2() -> Self {
        Ansatz::cubic(2, Degree::frac(2, 1, 1, 1), Degree::frac(0, 1, 3, 1)).expect("preset is valid")
    }

    pub fn expansion(&self) -> &TreePolynomial {
        &self.expansion
    }

    pub fn gamma(&self) -> Degree {
        self.gamma
    }

    pub fn grading(&self) -> &Grading {
        &self.grading
    }

    /// Degree of the lowest tree in the expansion.
    pub fn lowest_degree(&self) -> Degree {
        self.lowest
    }

    /// The part of the ansatz that survives evaluation at the base point.
    pub fn head(&self) -> Result<TreePolynomial, CountertermError> {
        Ok(eval_at_basepoint_reduce(&self.expansion, &self.grading)?.project_extended())
    }
}

fn sym(code: &str) -> DecoratedTree {
    cubic_symbol(code).expect("known cubic code")
}

/// The `n`-th power of the ansatz, exact up to the order the product rule
/// guarantees.
///
/// With `β` the lowest degree in the expansion (or zero if that is
/// positive), a product of `k` factors is known up to degree
/// `gamma + (k-1) β`. Terms at or above that order are dropped after each
/// multiplication, which loses nothing since every further factor lowers
/// degrees by at most `-β`.
pub fn truncated_power(a: &Ansatz, n: u32) -> Result<TreePolynomial, CountertermError> {
    if n == 0 {
        return Err(CountertermError::ZeroPower);
    }
    let beta = if a.lowest.is_negative() { a.lowest } else { Degree::ZERO };
    let mut acc = a.expansion.clone();
    for k in 2..=n {
        let cut = a.gamma + beta.scale(Rational64::from_integer(k as i64 - 1));
        let mut err = None;
        acc = acc.product_filtered(&a.expansion, |t| match a.grading.degree(t) {
            Ok(d) => d < cut,
            Err(e) => {
                err = Some(e);
                false
            }
        })?;
        if let Some(e) = err {
            return Err(e.into());
        }
    }
    Ok(acc)
}

/// Drop every term whose tree evaluates to zero at its own base point: a
/// root carrying a nonzero polynomial label, or a planted root factor of
/// strictly positive degree (counting extended labels).
pub fn eval_at_basepoint_reduce(p: &TreePolynomial, grading: &Grading) -> Result<TreePolynomial, TreeError> {
    let mut out = TreePolynomial::zero();
    for (t, c) in p.terms() {
        if vanishes_at_basepoint(t, grading)? {
            continue;
        }
        out.add_term(t.clone(), c.clone());
    }
    Ok(out)
}

fn vanishes_at_basepoint(t: &DecoratedTree, grading: &Grading) -> Result<bool, TreeError> {
    let (poly, _, _, branches) = t.root_factors();
    if !poly.is_zero() {
        return Ok(true);
    }
    for b in branches {
        if grading.degree(&plant_with(&b.tree, b.deriv))?.is_positive() {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Outcome of renormalising a right-hand side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterterm {
    /// The reduced difference between the renormalised and the bare
    /// right-hand side, with extended labels forgotten.
    pub survivors: TreePolynomial,
    /// The scalar `m` with `survivors = m · head`.
    pub multiple: Poly,
    /// New value of each coupling constant, as a polynomial in the old ones.
    pub dual: BTreeMap<String, Poly>,
}

impl Counterterm {
    pub fn dual_text(&self) -> String {
        self.dual.iter().map(|(k, v)| format!("{k} -> {v}")).collect::<Vec<_>>().join("\n")
    }
}

/// Renormalise `rhs` with the character `g` and express the effect as a
/// shift of the coupling `linear_coupling` in front of the linear term.
///
/// Only the character's values on plain trees are used; extended labels
/// produced by contraction keep degrees homogeneous and decide which terms
/// vanish at the base point.
pub fn renormalised_rhs(
    ansatz: &Ansatz,
    rhs: &TreePolynomial,
    g: &Character,
    linear_coupling: &str,
) -> Result<Counterterm, CountertermError> {
    let engine = RenormEngine::new(ansatz.grading.clone(), Flavour::Extended);
    let plain_g = match g.flavour() {
        Flavour::Plain => g.clone(),
        Flavour::Extended => {
            let mut p = Character::new(Flavour::Plain);
            for (t, v) in g.values() {
                p.set(t.project_extended(), p.value(&t.project_extended()) + v.clone());
            }
            p
        }
    };
    let renormalised = engine.renorm_map(&plain_g, rhs)?;
    let diff = renormalised - rhs.clone();
    let survivors = eval_at_basepoint_reduce(&diff, &ansatz.grading)?.project_extended();
    let head = ansatz.head()?;
    let (lead, lead_coeff) = head
        .terms()
        .find(|(_, c)| c.is_constant())
        .map(|(t, c)| (t.clone(), c.as_constant().expect("constant")))
        .ok_or_else(|| CountertermError::InvalidAnsatz("head has no tree with constant coefficient".into()))?;
    let multiple = survivors.coefficient(&lead).scale(&(BigRational::one() / lead_coeff));
    let residual = survivors.clone() - head.scale(&multiple);
    if !residual.is_zero() {
        return Err(CountertermError::ResidualTerms(residual));
    }
    let mut dual = BTreeMap::new();
    dual.insert(linear_coupling.to_string(), Poly::var(linear_coupling) + multiple.clone());
    Ok(Counterterm { survivors, multiple, dual })
}

/// `Σ coeff · Φⁿ` for the given `(n, coeff)` pairs.
pub fn polynomial_rhs(ansatz: &Ansatz, terms: &[(u32, Poly)]) -> Result<TreePolynomial, CountertermError> {
    let mut out = TreePolynomial::zero();
    for (n, c) in terms {
        out.add_assign(&truncated_power(ansatz, *n)?.scale(c));
    }
    Ok(out)
}

/// The character of the cubic model: `<2> ↦ -c1`, and `<22> ↦ -c2` when
/// `<22>` has negative degree under `grading`.
pub fn cubic_character(grading: &Grading) -> Result<Character, TreeError> {
    let mut g = Character::new(Flavour::Plain).with(sym("2"), -Poly::var("c1"));
    if grading.degree(&sym("22"))?.is_negative() {
        g.set(sym("22"), -Poly::var("c2"));
    }
    Ok(g)
}

/// Input file for the counterterm computation.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct CountertermConfig {
    /// Spatial dimension of the cubic preset, 2 or 3.
    #[serde(default = "default_dimension")]
    pub dimension: u32,
    /// Overrides `alpha` in `deg Ξ = -alpha`.
    #[serde(default)]
    pub alpha: Option<String>,
    #[serde(default)]
    pub gamma: Option<String>,
    /// Character values; the cubic default is used when absent.
    #[serde(default)]
    pub character: Option<serde_json::Value>,
    /// Right-hand side as `power -> coefficient`; defaults to `c Φ - Φ³`.
    #[serde(default)]
    pub rhs: Option<BTreeMap<u32, String>>,
    #[serde(default = "default_coupling")]
    pub coupling: String,
}

fn default_dimension() -> u32 {
    3
}

fn default_coupling() -> String {
    "c".into()
}

impl CountertermConfig {
    pub fn from_json(text: &str) -> Result<Self, CountertermError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn ansatz(&self, gamma_override: Option<Degree>) -> Result<Ansatz, CountertermError> {
        let parse = |s: &str| s.parse::<Degree>().map_err(|_| CountertermError::Parse(s.to_string()));
        let (alpha, gamma) = match self.dimension {
            3 => (Degree::frac(5, 2, 1, 1), Degree::frac(1, 1, 3, 1)),
            2 => (Degree::frac(2, 1, 1, 1), Degree::frac(0, 1, 3, 1)),
            other => return Err(CountertermError::Dimension(other)),
        };
        let alpha = self.alpha.as_deref().map(parse).transpose()?.unwrap_or(alpha);
        let gamma = match gamma_override {
            Some(g) => g,
            None => self.gamma.as_deref().map(parse).transpose()?.unwrap_or(gamma),
        };
        Ansatz::cubic(self.dimension, alpha, gamma)
    }

    pub fn character(&self, grading: &Grading) -> Result<Character, CountertermError> {
        match &self.character {
            Some(v) => Ok(Character::from_json(&v.to_string())?),
            None => Ok(cubic_character(grading)?),
        }
    }

    pub fn rhs_terms(&self) -> Result<Vec<(u32, Poly)>, CountertermError> {
        match &self.rhs {
            None => Ok(vec![(1, Poly::var(&self.coupling)), (3, -Poly::one())]),
            Some(m) => m
                .iter()
                .map(|(n, c)| c.parse::<Poly>().map(|p| (*n, p)).map_err(|_| CountertermError::Parse(c.clone())))
                .collect(),
        }
    }

    /// Run the whole pipeline described by this config.
    pub fn run(&self, gamma_override: Option<Degree>) -> Result<Counterterm, CountertermError> {
        let ansatz = self.ansatz(gamma_override)?;
        let g = self.character(ansatz.grading())?;
        g.validate(ansatz.grading())?;
        let rhs = polynomial_rhs(&ansatz, &self.rhs_terms()?)?;
        renormalised_rhs(&ansatz, &rhs, &g, &self.coupling)
    }
}

/// A constant shift acting on the model `(X, X², X³)`:
/// `(X₁, X₂, X₃) ↦ (X₁, X₂ - g₁, X₃ - 3g₁X₁ - g₂)`. The symmetric case has
/// `g₂ = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimpleModelAction {
    pub g1: Poly,
    pub g2: Poly,
}

impl SimpleModelAction {
    pub fn symmetric(g: Poly) -> Self {
        SimpleModelAction { g1: g, g2: Poly::zero() }
    }

    pub fn new(g1: Poly, g2: Poly) -> Self {
        SimpleModelAction { g1, g2 }
    }

    pub fn apply(&self, z: &[Poly; 3]) -> [Poly; 3] {
        [
            z[0].clone(),
            z[1].clone() - self.g1.clone(),
            z[2].clone() - self.g1.scale_int(3) * z[0].clone() - self.g2.clone(),
        ]
    }

    /// The group is abelian: composing adds the parameters.
    pub fn then(&self, other: &SimpleModelAction) -> SimpleModelAction {
        SimpleModelAction { g1: self.g1.clone() + other.g1.clone(), g2: self.g2.clone() + other.g2.clone() }
    }

    pub fn inverse(&self) -> SimpleModelAction {
        SimpleModelAction { g1: -self.g1.clone(), g2: -self.g2.clone() }
    }

    /// Effect on the couplings `(c₀, c₁, c₂)` of
    /// `∂_t Φ = ΔΦ + c₀ + c₁Φ + c₂Φ² - Φ³ + ξ`.
    pub fn dual(&self, c: &[Poly; 3]) -> [Poly; 3] {
        [
            c[0].clone() - c[2].clone() * self.g1.clone() + self.g2.clone(),
            c[1].clone() + self.g1.scale_int(3),
            c[2].clone(),
        ]
    }

    /// Effect on the single coupling of `∂_t Φ = ΔΦ + cΦ - Φ³ + ξ`.
    pub fn dual_linear(&self, c: &Poly) -> Poly {
        c.clone() + self.g1.scale_int(3)
    }
}

/// Families of equations with a known scaling action on their couplings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalingFamily {
    Kpz,
    Phi4_3,
}

/// `T^λ` on the couplings `(c₁, c₂)`. The constant `a` enters only the
/// cubic family.
pub fn scaling_action(family: ScalingFamily, lambda: f64, c: [f64; 2], a: f64) -> [f64; 2] {
    assert!(lambda > 0.0, "scaling parameter must be positive");
    match family {
        ScalingFamily::Kpz => [lambda.sqrt() * c[0], lambda.powf(1.5) * c[1]],
        ScalingFamily::Phi4_3 => [lambda.powf(1.5) * (c[0] + a * c[1].powi(3) * lambda.ln()), lambda.sqrt() * c[1]],
    }
}

/// The KPZ action in exact arithmetic, parametrised by `s = λ^{1/2}`.
pub fn kpz_scaling_exact(s: &BigRational, c: &[BigRational; 2]) -> [BigRational; 2] {
    assert!(s.is_positive(), "scaling parameter must be positive");
    [s * &c[0], s * s * s * &c[1]]
}

/// Convenience for exact rationals from machine integers.
pub fn rational(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}
