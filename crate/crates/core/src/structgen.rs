//! Symbol sets generated by an equation's right-hand side.
//!
//! An equation is described by its noises and a list of [`Shape`]s, each
//! shape being one kind of monomial that can appear on the right-hand side:
//! an optional noise times up to `factors` copies of the solution and up to
//! `derivative_factors` copies of a spatial derivative of the solution, times
//! a polynomial of parabolic degree at most `max_poly`.
//!
//! Two families are generated together. The *solution family* holds the
//! polynomials `X^k` and the planted trees `I(τ)`; the *rhs family* holds all
//! shape products of solution-family members. Both are cut at the degree
//! cutoff `γ`: solution trees (and so planted rhs trees) must have degree
//! below `γ`, and rhs products are kept when their own degree is below `γ`.
//! Polynomials are never planted.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};

use num_rational::Rational64;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::degree::{Degree, MultiIndex};
use crate::tree::{plant, plant_with, tree_product, DecoratedTree, Grading, TreeError};

/// Hard limit on the number of generated trees.
pub const MAX_SYMBOLS: usize = 200_000;

#[derive(Debug, Error)]
pub enum StructgenError {
    #[error("invalid equation spec: {0}")]
    InvalidSpec(String),
    #[error("equation is not locally subcritical: shape {shape} gives {witness} of degree {degree}, not above the noise floor {floor}")]
    NonSubcritical { shape: usize, witness: String, degree: Degree, floor: Degree },
    #[error("symbol set exceeds {0} trees below the cutoff")]
    TooLarge(usize),
    #[error("the right-hand side does not involve any noise")]
    NoNoise,
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error("cannot read equation spec: {0}")]
    Json(#[from] serde_json::Error),
}

/// Degree of a noise, either explicit or "white" meaning space-time white
/// noise, of degree `-(d + kernel_order)/2 - κ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NoiseDegree {
    White,
    Fixed(Degree),
}

impl Serialize for NoiseDegree {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            NoiseDegree::White => s.serialize_str("white"),
            NoiseDegree::Fixed(d) => d.serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for NoiseDegree {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = serde_json::Value::deserialize(d)?;
        if raw.as_str() == Some("white") {
            return Ok(NoiseDegree::White);
        }
        Degree::deserialize(raw).map(NoiseDegree::Fixed).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub name: String,
    pub degree: NoiseDegree,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Shape {
    /// 1-based noise index, if the monomial carries a noise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<u32>,
    #[serde(default)]
    pub factors: u32,
    #[serde(default)]
    pub derivative_factors: u32,
    #[serde(default)]
    pub max_poly: u32,
}

impl Shape {
    pub fn has_factors(&self) -> bool {
        self.factors + self.derivative_factors > 0
    }
}

fn default_kernel_order() -> Rational64 {
    Rational64::from_integer(2)
}

mod rational_str {
    use num_rational::Rational64;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&r.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational64, D::Error> {
        let raw = serde_json::Value::deserialize(d)?;
        let text = match &raw {
            serde_json::Value::String(s) => s.clone(),
            serde_json::Value::Number(n) => n.to_string(),
            _ => return Err(serde::de::Error::custom("expected a rational number")),
        };
        crate::degree::parse_rational(&text)
            .ok_or_else(|| serde::de::Error::custom(format!("`{text}` is not a rational number")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquationSpec {
    #[serde(default)]
    pub name: String,
    pub spatial_dimension: u32,
    #[serde(default = "default_kernel_order", with = "rational_str")]
    pub kernel_order: Rational64,
    #[serde(default)]
    pub noises: Vec<NoiseSpec>,
    pub rhs_rule: Vec<Shape>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree_cutoff: Option<Degree>,
}

impl EquationSpec {
    pub fn from_json(text: &str) -> Result<Self, StructgenError> {
        let spec: EquationSpec = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    /// The cubic equation driven by one noise of the given degree.
    pub fn cubic(spatial_dimension: u32, noise: NoiseDegree) -> Self {
        EquationSpec {
            name: format!("phi4_d{spatial_dimension}"),
            spatial_dimension,
            kernel_order: default_kernel_order(),
            noises: vec![NoiseSpec { name: "xi".into(), degree: noise }],
            rhs_rule: vec![
                Shape { noise: Some(1), ..Shape::default() },
                Shape { factors: 3, ..Shape::default() },
            ],
            degree_cutoff: None,
        }
    }

    /// Quadratic in one spatial derivative, as for the growth equation.
    pub fn quadratic_gradient(spatial_dimension: u32, noise: NoiseDegree) -> Self {
        EquationSpec {
            name: format!("kpz_d{spatial_dimension}"),
            spatial_dimension,
            kernel_order: default_kernel_order(),
            noises: vec![NoiseSpec { name: "xi".into(), degree: noise }],
            rhs_rule: vec![
                Shape { noise: Some(1), ..Shape::default() },
                Shape { derivative_factors: 2, ..Shape::default() },
            ],
            degree_cutoff: None,
        }
    }

    pub fn validate(&self) -> Result<(), StructgenError> {
        if self.spatial_dimension == 0 {
            return Err(StructgenError::InvalidSpec("spatial_dimension must be at least 1".into()));
        }
        if self.kernel_order <= Rational64::zero() {
            return Err(StructgenError::InvalidSpec("kernel_order must be positive".into()));
        }
        if self.rhs_rule.is_empty() {
            return Err(StructgenError::InvalidSpec("rhs_rule must not be empty".into()));
        }
        for (i, d) in self.noise_degrees().iter().enumerate() {
            if !d.is_negative() {
                return Err(StructgenError::InvalidSpec(format!(
                    "noise {} has non-negative degree {d}",
                    self.noises[i].name
                )));
            }
        }
        for (i, s) in self.rhs_rule.iter().enumerate() {
            if let Some(j) = s.noise {
                if j == 0 || j as usize > self.noises.len() {
                    return Err(StructgenError::InvalidSpec(format!(
                        "shape {i} refers to noise {j}, but {} noises are declared",
                        self.noises.len()
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn white_noise_degree(&self) -> Degree {
        let d = Rational64::from_integer(i64::from(self.spatial_dimension));
        Degree::new(-(d + self.kernel_order) / 2, -Rational64::one())
    }

    pub fn noise_degrees(&self) -> Vec<Degree> {
        self.noises
            .iter()
            .map(|n| match &n.degree {
                NoiseDegree::White => self.white_noise_degree(),
                NoiseDegree::Fixed(d) => *d,
            })
            .collect()
    }

    pub fn grading(&self) -> Grading {
        Grading::new(self.noise_degrees(), self.kernel_order)
    }

    pub fn cutoff(&self) -> Degree {
        self.degree_cutoff.unwrap_or_else(|| Degree::constant(self.kernel_order))
    }

    fn noise_floor(&self) -> Degree {
        self.noise_degrees().into_iter().min().unwrap_or(Degree::ZERO)
    }
}

/// Lowest degree a shape can produce once its slots are filled with the
/// lowest-degree planted trees, given that the lowest rhs degree is `floor`.
fn shape_min_degree(shape: &Shape, noise_degree: Degree, floor: Degree, kernel_order: Rational64) -> Degree {
    let plain = Degree::constant(kernel_order) + floor;
    let deriv = plain - Degree::int(1);
    let mut slots = Vec::new();
    slots.extend(std::iter::repeat_n(plain, shape.factors as usize));
    slots.extend(std::iter::repeat_n(deriv, shape.derivative_factors as usize));
    let negative: Degree = slots.iter().filter(|b| b.is_negative()).copied().sum();
    let filled = if slots.iter().any(Degree::is_negative) {
        negative
    } else {
        slots.iter().copied().min().unwrap_or(Degree::ZERO)
    };
    noise_degree + filled
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Subcriticality {
    pub subcritical: bool,
    /// Lowest degree reachable by any shape with at least one factor, or the
    /// noise floor itself when no shape has factors.
    pub worst_shape_degree: Degree,
    /// Index of the shape attaining `worst_shape_degree`.
    pub binding_shape: Option<usize>,
    pub noise_floor: Degree,
}

pub fn check_subcriticality(spec: &EquationSpec) -> Subcriticality {
    let noise_degrees = spec.noise_degrees();
    let floor = spec.noise_floor();
    let mut worst: Option<(Degree, usize)> = None;
    for (i, shape) in spec.rhs_rule.iter().enumerate() {
        if !shape.has_factors() {
            continue;
        }
        let own = shape.noise.map(|j| noise_degrees[j as usize - 1]).unwrap_or(Degree::ZERO);
        let d = shape_min_degree(shape, own, floor, spec.kernel_order);
        if worst.is_none_or(|(w, _)| d < w) {
            worst = Some((d, i));
        }
    }
    match worst {
        Some((d, i)) => Subcriticality {
            subcritical: d > floor,
            worst_shape_degree: d,
            binding_shape: Some(i),
            noise_floor: floor,
        },
        None => Subcriticality { subcritical: true, worst_shape_degree: floor, binding_shape: None, noise_floor: floor },
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CriticalNoiseDegree {
    /// Subcritical exactly for noise degrees strictly above this value.
    Threshold(Degree),
    /// No negative noise degree breaks subcriticality.
    NegativeInfinity,
}

impl fmt::Display for CriticalNoiseDegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CriticalNoiseDegree::Threshold(d) => write!(f, "{d}"),
            CriticalNoiseDegree::NegativeInfinity => write!(f, "-inf"),
        }
    }
}

/// Largest noise degree at which the spec stops being subcritical.
///
/// Every shape's margin `shape_min(a) - a` is piecewise linear in the noise
/// degree `a`, with kinks where a planted slot changes sign. On each linear
/// piece the set where the margin is non-positive is an interval, found
/// exactly; the answer is the supremum over all pieces.
pub fn critical_noise_degree(spec: &EquationSpec) -> Result<CriticalNoiseDegree, StructgenError> {
    if spec.noises.is_empty() || spec.rhs_rule.iter().all(|s| s.noise.is_none()) {
        return Err(StructgenError::NoNoise);
    }
    if spec.noises.len() > 1 {
        return Err(StructgenError::InvalidSpec("the critical degree is defined for a single noise".into()));
    }
    let ko = spec.kernel_order;
    let margin = |shape: &Shape, a: Rational64| -> Rational64 {
        let a_deg = Degree::constant(a);
        let own = if shape.noise.is_some() { a_deg } else { Degree::ZERO };
        (shape_min_degree(shape, own, a_deg, ko) - a_deg).const_part
    };
    let mut kinks = vec![-ko, Rational64::one() - ko];
    kinks.retain(|k| *k < Rational64::zero());
    kinks.sort();
    kinks.dedup();

    let mut sup: Option<Rational64> = None;
    let mut bump = |v: Rational64| {
        if sup.is_none_or(|s| v > s) {
            sup = Some(v);
        }
    };
    for shape in spec.rhs_rule.iter().filter(|s| s.has_factors()) {
        let mut pieces: Vec<(Option<Rational64>, Rational64)> = Vec::new();
        let mut lo = None;
        for &k in &kinks {
            pieces.push((lo, k));
            lo = Some(k);
        }
        pieces.push((lo, Rational64::zero()));
        for (lo, hi) in pieces {
            // Two sample points strictly inside the piece pin down the line.
            let (x0, x1) = match lo {
                Some(l) => (l + (hi - l) / 3, l + (hi - l) * 2 / 3),
                None => (hi - 2, hi - 1),
            };
            let (y0, y1) = (margin(shape, x0), margin(shape, x1));
            let slope = (y1 - y0) / (x1 - x0);
            if slope.is_zero() {
                if y0 <= Rational64::zero() {
                    bump(hi);
                }
                continue;
            }
            let root = x0 - y0 / slope;
            if slope > Rational64::zero() {
                // non-positive to the left of the root
                if lo.is_none_or(|l| root > l) {
                    bump(if root < hi { root } else { hi });
                }
            } else if root <= hi {
                bump(hi);
            }
        }
    }
    Ok(match sup {
        Some(s) => CriticalNoiseDegree::Threshold(Degree::constant(s)),
        None => CriticalNoiseDegree::NegativeInfinity,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Family {
    Solution,
    Rhs,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolEntry {
    pub tree: DecoratedTree,
    pub degree: Degree,
    pub solution: bool,
    pub rhs: bool,
}

impl SymbolEntry {
    pub fn in_negative_sector(&self) -> bool {
        self.degree.is_negative() && self.tree.is_poly_free()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolTable {
    pub spec_name: String,
    pub cutoff: Degree,
    pub subcritical: bool,
    /// Sorted by degree, ties by canonical tree order.
    pub entries: Vec<SymbolEntry>,
}

impl SymbolTable {
    pub fn trees(&self) -> impl Iterator<Item = &DecoratedTree> {
        self.entries.iter().map(|e| &e.tree)
    }

    pub fn solution_family(&self) -> Vec<&DecoratedTree> {
        self.entries.iter().filter(|e| e.solution).map(|e| &e.tree).collect()
    }

    pub fn rhs_family(&self) -> Vec<&DecoratedTree> {
        self.entries.iter().filter(|e| e.rhs).map(|e| &e.tree).collect()
    }

    pub fn negative_sector(&self) -> Vec<&DecoratedTree> {
        self.entries.iter().filter(|e| e.in_negative_sector()).map(|e| &e.tree).collect()
    }

    pub fn get(&self, t: &DecoratedTree) -> Option<&SymbolEntry> {
        self.entries.iter().find(|e| &e.tree == t)
    }

    pub fn contains(&self, t: &DecoratedTree) -> bool {
        self.get(t).is_some()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("tree,const_part,kappa_part,in_negative_sector\n");
        for e in &self.entries {
            let _ = writeln!(
                out,
                "\"{}\",{},{},{}",
                e.tree,
                e.degree.const_part,
                e.degree.kappa_part,
                e.in_negative_sector()
            );
        }
        out
    }

    /// Human-readable listing, stable across runs.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# symbols for {} (cutoff {})", self.spec_name, self.cutoff);
        let _ = writeln!(out, "# subcritical: {}", self.subcritical);
        for e in &self.entries {
            let fam = match (e.solution, e.rhs) {
                (true, true) => "sol+rhs",
                (true, false) => "sol",
                _ => "rhs",
            };
            let neg = if e.in_negative_sector() { " neg" } else { "" };
            let _ = writeln!(out, "{:<16} {:<8}{:<4} {}", e.degree.to_string(), fam, neg, e.tree);
        }
        out
    }
}

/// Pick multisets of at most `slots` items from `pool` (sorted by degree
/// ascending) whose degrees, added to `base`, stay below `bound`.
fn choose_products(
    pool: &[(DecoratedTree, Degree)],
    slots: u32,
    base: Degree,
    bound: Degree,
    pool_min: Degree,
) -> Vec<(Vec<usize>, Degree)> {
    #[allow(clippy::too_many_arguments)]
    fn rec(
        pool: &[(DecoratedTree, Degree)],
        start: usize,
        left: u32,
        acc: Degree,
        bound: Degree,
        low: Degree,
        chosen: &mut Vec<usize>,
        out: &mut Vec<(Vec<usize>, Degree)>,
    ) {
        out.push((chosen.clone(), acc));
        if left == 0 {
            return;
        }
        for i in start..pool.len() {
            let d = pool[i].1;
            // Remaining slots can lower the total by at most (left-1)*low.
            let best_rest = low * (i64::from(left) - 1);
            if acc + d + best_rest >= bound {
                break;
            }
            chosen.push(i);
            rec(pool, i, left - 1, acc + d, bound, low, chosen, out);
            chosen.pop();
        }
    }
    let low = if pool_min.is_negative() { pool_min } else { Degree::ZERO };
    let mut out = Vec::new();
    rec(pool, 0, slots, base, bound, low, &mut Vec::new(), &mut out);
    out
}

fn sorted_pool(set: &BTreeSet<DecoratedTree>, grading: &Grading) -> Result<Vec<(DecoratedTree, Degree)>, TreeError> {
    let mut v = set.iter().map(|t| Ok((t.clone(), grading.degree(t)?))).collect::<Result<Vec<_>, TreeError>>()?;
    v.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
    Ok(v)
}

fn witness(spec: &EquationSpec, shape: &Shape) -> Result<DecoratedTree, TreeError> {
    let grading = spec.grading();
    let (j, _) = spec
        .noise_degrees()
        .iter()
        .enumerate()
        .min_by_key(|(_, d)| **d)
        .map(|(i, d)| (i as u32 + 1, *d))
        .unwrap_or((0, Degree::ZERO));
    let base = if j == 0 { DecoratedTree::unit() } else { DecoratedTree::noise(j) };
    let planted = plant(&base);
    let derived = plant_with(&base, MultiIndex::unit(1));
    let mut t = shape.noise.map(DecoratedTree::noise).unwrap_or_default();
    let slots: Vec<&DecoratedTree> = std::iter::repeat_n(&planted, shape.factors as usize)
        .chain(std::iter::repeat_n(&derived, shape.derivative_factors as usize))
        .collect();
    let any_negative = slots.iter().any(|s| grading.degree(s).map(|d| d.is_negative()).unwrap_or(false));
    for s in slots {
        if !any_negative || grading.degree(s)?.is_negative() {
            t = tree_product(&t, s)?;
            if !any_negative {
                break;
            }
        }
    }
    Ok(t)
}

/// Generate the symbol table of `spec` up to its degree cutoff.
pub fn generate_symbols(spec: &EquationSpec) -> Result<SymbolTable, StructgenError> {
    spec.validate()?;
    let sub = check_subcriticality(spec);
    if !sub.subcritical {
        let shape = sub.binding_shape.unwrap_or(0);
        let w = witness(spec, &spec.rhs_rule[shape])?;
        return Err(StructgenError::NonSubcritical {
            shape,
            witness: w.to_string(),
            degree: sub.worst_shape_degree,
            floor: sub.noise_floor,
        });
    }
    let grading = spec.grading();
    let gamma = spec.cutoff();
    let ko = Degree::constant(spec.kernel_order);
    let coords = spec.spatial_dimension as usize + 1;

    let polys: Vec<DecoratedTree> = MultiIndex::all_below(coords, spec.kernel_order, gamma_bound(gamma))
        .into_iter()
        .map(DecoratedTree::monomial)
        .filter(|t| grading.degree(t).map(|d| d < gamma).unwrap_or(false))
        .collect();
    let deriv_polys: Vec<DecoratedTree> = polys
        .iter()
        .filter(|t| grading.degree(t).map(|d| d < gamma - Degree::int(1)).unwrap_or(false))
        .cloned()
        .collect();

    let mut rhs: BTreeSet<DecoratedTree> = BTreeSet::new();
    loop {
        let mut solution: BTreeSet<DecoratedTree> = polys.iter().cloned().collect();
        let mut derivative: BTreeSet<DecoratedTree> = deriv_polys.iter().cloned().collect();
        for t in &rhs {
            if t.children().is_empty() && t.label().noise == 0 {
                continue;
            }
            let d = grading.degree(t)?;
            if d + ko < gamma {
                solution.insert(plant(t));
            }
            if d + ko - Degree::int(1) < gamma {
                for i in 1..coords {
                    derivative.insert(plant_with(t, MultiIndex::unit(i)));
                }
            }
        }
        let sol_pool = sorted_pool(&solution, &grading)?;
        let der_pool = sorted_pool(&derivative, &grading)?;
        let sol_min = sol_pool.first().map(|p| p.1).unwrap_or(Degree::ZERO);
        let der_min = der_pool.first().map(|p| p.1).unwrap_or(Degree::ZERO);

        let mut next: BTreeSet<DecoratedTree> = BTreeSet::new();
        for shape in &spec.rhs_rule {
            let head = shape.noise.map(DecoratedTree::noise).unwrap_or_default();
            let extra_polys = MultiIndex::all_below(coords, spec.kernel_order, Rational64::from_integer(i64::from(shape.max_poly) + 1));
            for k in extra_polys {
                let head_k = tree_product(&head, &DecoratedTree::monomial(k))?;
                let base = grading.degree(&head_k)?;
                let der_low = if der_min.is_negative() { der_min } else { Degree::ZERO };
                let der_slack = der_low * i64::from(shape.derivative_factors);
                for (sol_pick, sol_deg) in choose_products(&sol_pool, shape.factors, base, gamma - der_slack, sol_min) {
                    let mut partial = head_k.clone();
                    for &i in &sol_pick {
                        partial = tree_product(&partial, &sol_pool[i].0)?;
                    }
                    for (der_pick, total) in choose_products(&der_pool, shape.derivative_factors, sol_deg, gamma, der_min) {
                        if total >= gamma {
                            continue;
                        }
                        let mut t = partial.clone();
                        for &i in &der_pick {
                            t = tree_product(&t, &der_pool[i].0)?;
                        }
                        next.insert(t);
                    }
                }
            }
        }
        if next.len() > MAX_SYMBOLS {
            return Err(StructgenError::TooLarge(MAX_SYMBOLS));
        }
        if next == rhs {
            let mut entries: BTreeMap<DecoratedTree, SymbolEntry> = BTreeMap::new();
            for t in solution {
                let degree = grading.degree(&t)?;
                entries.insert(t.clone(), SymbolEntry { tree: t, degree, solution: true, rhs: false });
            }
            for t in rhs {
                let degree = grading.degree(&t)?;
                entries
                    .entry(t.clone())
                    .or_insert(SymbolEntry { tree: t, degree, solution: false, rhs: false })
                    .rhs = true;
            }
            let mut entries: Vec<SymbolEntry> = entries.into_values().collect();
            entries.sort_by(|a, b| a.degree.cmp(&b.degree).then_with(|| a.tree.cmp(&b.tree)));
            return Ok(SymbolTable { spec_name: spec.name.clone(), cutoff: gamma, subcritical: true, entries });
        }
        rhs = next;
    }
}

/// A rational bound `b` such that `|k| < b` captures every polynomial of
/// degree below `gamma` for all small κ.
fn gamma_bound(gamma: Degree) -> Rational64 {
    if gamma.kappa_part > Rational64::zero() {
        gamma.const_part + Rational64::new(1, 1_000_000)
    } else {
        gamma.const_part
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn white_noise_degree_matches_dimension() {
        let spec = EquationSpec::cubic(3, NoiseDegree::White);
        assert_eq!(spec.noise_degrees()[0], Degree::frac(-5, 2, -1, 1));
    }

    #[test]
    fn spec_json_roundtrip() {
        let spec = EquationSpec::cubic(3, NoiseDegree::White);
        let text = serde_json::to_string(&spec).unwrap();
        assert_eq!(EquationSpec::from_json(&text).unwrap(), spec);
    }

    #[test]
    fn rejects_positive_noise() {
        let spec = EquationSpec::cubic(3, NoiseDegree::Fixed(Degree::int(1)));
        assert!(spec.validate().is_err());
    }

    #[test]
    fn linear_equation_table_is_finite() {
        let mut spec = EquationSpec::cubic(1, NoiseDegree::White);
        spec.rhs_rule = vec![Shape { noise: Some(1), ..Shape::default() }, Shape { factors: 1, ..Shape::default() }];
        let table = generate_symbols(&spec).unwrap();
        assert!(table.entries.len() < 20);
    }
}
