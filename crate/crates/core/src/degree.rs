//! Exact degrees `a + b·κ` and parabolic multi-indices.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_rational::Rational64;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("cannot parse `{input}`: {reason}")]
pub struct ParseDegreeError {
    pub input: String,
    pub reason: String,
}

/// An affine form `const_part + kappa_part·κ` in an infinitesimal `κ > 0`.
///
/// The derived ordering is lexicographic, which is exactly the order of the
/// forms for all sufficiently small positive `κ`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Degree {
    pub const_part: Rational64,
    pub kappa_part: Rational64,
}

impl Degree {
    pub const ZERO: Degree = Degree {
        const_part: Rational64::new_raw(0, 1),
        kappa_part: Rational64::new_raw(0, 1),
    };

    pub fn new(const_part: Rational64, kappa_part: Rational64) -> Self {
        Degree { const_part, kappa_part }
    }

    pub fn constant(c: Rational64) -> Self {
        Degree::new(c, Rational64::zero())
    }

    pub fn int(c: i64) -> Self {
        Degree::constant(Rational64::from_integer(c))
    }

    /// `p/q + r/s·κ`, mostly for tests and presets.
    pub fn frac(p: i64, q: i64, r: i64, s: i64) -> Self {
        Degree::new(Rational64::new(p, q), Rational64::new(r, s))
    }

    pub fn kappa() -> Self {
        Degree::new(Rational64::zero(), Rational64::one())
    }

    pub fn is_zero(&self) -> bool {
        self.const_part.is_zero() && self.kappa_part.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        *self < Degree::ZERO
    }

    pub fn is_positive(&self) -> bool {
        *self > Degree::ZERO
    }

    /// Numeric value at a concrete `κ`.
    pub fn eval(&self, kappa: f64) -> f64 {
        ratio_to_f64(self.const_part) + ratio_to_f64(self.kappa_part) * kappa
    }

    pub fn scale(&self, r: Rational64) -> Degree {
        Degree::new(self.const_part * r, self.kappa_part * r)
    }
}

pub(crate) fn ratio_to_f64(r: Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

impl Add for Degree {
    type Output = Degree;
    fn add(self, rhs: Degree) -> Degree {
        Degree::new(self.const_part + rhs.const_part, self.kappa_part + rhs.kappa_part)
    }
}

impl AddAssign for Degree {
    fn add_assign(&mut self, rhs: Degree) {
        *self = *self + rhs;
    }
}

impl Sub for Degree {
    type Output = Degree;
    fn sub(self, rhs: Degree) -> Degree {
        self + (-rhs)
    }
}

impl SubAssign for Degree {
    fn sub_assign(&mut self, rhs: Degree) {
        *self = *self - rhs;
    }
}

impl Neg for Degree {
    type Output = Degree;
    fn neg(self) -> Degree {
        Degree::new(-self.const_part, -self.kappa_part)
    }
}

impl Mul<Rational64> for Degree {
    type Output = Degree;
    fn mul(self, rhs: Rational64) -> Degree {
        self.scale(rhs)
    }
}

impl Mul<i64> for Degree {
    type Output = Degree;
    fn mul(self, rhs: i64) -> Degree {
        self.scale(Rational64::from_integer(rhs))
    }
}

impl Sum for Degree {
    fn sum<I: Iterator<Item = Degree>>(iter: I) -> Degree {
        iter.fold(Degree::ZERO, |a, b| a + b)
    }
}

impl From<Rational64> for Degree {
    fn from(r: Rational64) -> Self {
        Degree::constant(r)
    }
}

fn fmt_ratio(r: Rational64) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Prints `a`, or `a + bk` / `a - bk`, with `k` standing for κ (so
/// `Degree(0, -4)` prints as `0 - 4k`).
impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.kappa_part.is_zero() {
            return write!(f, "{}", fmt_ratio(self.const_part));
        }
        let sign = if self.kappa_part.is_negative() { '-' } else { '+' };
        let b = self.kappa_part.abs();
        let coeff = if b.is_one() { String::new() } else { fmt_ratio(b) };
        write!(f, "{} {} {}k", fmt_ratio(self.const_part), sign, coeff)
    }
}

pub(crate) fn parse_rational(s: &str) -> Option<Rational64> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    if let Some((p, q)) = s.split_once('/') {
        let p: i64 = p.trim().parse().ok()?;
        let q: i64 = q.trim().parse().ok()?;
        if q == 0 {
            return None;
        }
        return Some(Rational64::new(p, q));
    }
    if let Ok(i) = s.parse::<i64>() {
        return Some(Rational64::from_integer(i));
    }
    // Finite decimals such as "2.5".
    let (int_part, frac_part) = s.split_once('.')?;
    let negative = int_part.trim_start().starts_with('-');
    let digits = frac_part.len() as u32;
    if digits > 15 || !frac_part.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    let denom = 10i64.pow(digits);
    let ip: i64 = if int_part == "-" || int_part.is_empty() { 0 } else { int_part.parse().ok()? };
    let fp: i64 = if frac_part.is_empty() { 0 } else { frac_part.parse().ok()? };
    let num = ip.abs() * denom + fp;
    Some(Rational64::new(if negative { -num } else { num }, denom))
}

impl FromStr for Degree {
    type Err = ParseDegreeError;

    /// Accepts forms such as `2`, `-5/2 - k`, `0 - 4k`, `-1/2-3/2k`, `1 + 3*k`, `κ`.
    fn from_str(input: &str) -> Result<Self, Self::Err> {
        let err = |reason: &str| ParseDegreeError { input: input.to_string(), reason: reason.to_string() };
        let cleaned: String = input.chars().filter(|c| !c.is_whitespace()).collect::<String>().replace('κ', "k");
        if cleaned.is_empty() {
            return Err(err("empty"));
        }
        // Split into signed terms.
        let mut terms = Vec::new();
        let mut current = String::new();
        for (i, ch) in cleaned.chars().enumerate() {
            if (ch == '+' || ch == '-') && i > 0 && !current.is_empty() && !current.ends_with('/') {
                terms.push(std::mem::take(&mut current));
            }
            current.push(ch);
        }
        terms.push(current);

        let mut out = Degree::ZERO;
        for term in terms {
            let (sign, body) = match term.strip_prefix('-') {
                Some(rest) => (-1, rest.to_string()),
                None => (1, term.trim_start_matches('+').to_string()),
            };
            if let Some(coeff) = body.strip_suffix('k') {
                let coeff = coeff.trim_end_matches('*');
                let r = if coeff.is_empty() { Some(Rational64::one()) } else { parse_rational(coeff) };
                let r = r.ok_or_else(|| err("bad κ coefficient"))?;
                out.kappa_part += r * sign;
            } else {
                let r = parse_rational(&body).ok_or_else(|| err("bad constant"))?;
                out.const_part += r * sign;
            }
        }
        Ok(out)
    }
}

impl Serialize for Degree {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Degree {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = serde_json::Value::deserialize(deserializer)?;
        match raw {
            serde_json::Value::String(s) => s.parse().map_err(serde::de::Error::custom),
            serde_json::Value::Number(n) => n
                .as_i64()
                .map(Degree::int)
                .ok_or_else(|| serde::de::Error::custom("degree numbers must be integers; use a string for fractions")),
            _ => Err(serde::de::Error::custom("expected a degree string such as \"-5/2 - k\"")),
        }
    }
}

/// Exponent vector of `X^k`. Coordinate 0 is time, coordinates `1..=d` are
/// space. Stored without trailing zeros so that indices of different
/// nominal length compare equal.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn zero() -> Self {
        MultiIndex(Vec::new())
    }

    pub fn new(mut entries: Vec<u32>) -> Self {
        while entries.last() == Some(&0) {
            entries.pop();
        }
        MultiIndex(entries)
    }

    /// The unit vector along `coord`.
    pub fn unit(coord: usize) -> Self {
        let mut v = vec![0; coord + 1];
        v[coord] = 1;
        MultiIndex(v)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, coord: usize) -> u32 {
        self.0.get(coord).copied().unwrap_or(0)
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    /// Parabolic length: time counts `time_weight`, each space coordinate 1.
    pub fn weighted_len(&self, time_weight: Rational64) -> Rational64 {
        let mut total = time_weight * i64::from(self.get(0));
        for &k in self.0.iter().skip(1) {
            total += Rational64::from_integer(i64::from(k));
        }
        total
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        let n = self.0.len().max(other.0.len());
        MultiIndex::new((0..n).map(|i| self.get(i) + other.get(i)).collect())
    }

    /// All indices over `coords` coordinates with parabolic length `< bound`.
    pub fn all_below(coords: usize, time_weight: Rational64, bound: Rational64) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        let mut current = vec![0u32; coords];
        fn rec(
            i: usize,
            current: &mut Vec<u32>,
            used: Rational64,
            tw: Rational64,
            bound: Rational64,
            out: &mut Vec<MultiIndex>,
        ) {
            if i == current.len() {
                out.push(MultiIndex::new(current.clone()));
                return;
            }
            let w = if i == 0 { tw } else { Rational64::one() };
            let mut k = 0u32;
            loop {
                let len = used + w * i64::from(k);
                if len >= bound {
                    break;
                }
                current[i] = k;
                rec(i + 1, current, len, tw, bound, out);
                k += 1;
            }
            current[i] = 0;
        }
        if Rational64::zero() < bound {
            rec(0, &mut current, Rational64::zero(), time_weight, bound, &mut out);
        }
        out.sort();
        out
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|k| k.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_lexicographic_in_kappa_limit() {
        let a = Degree::frac(-1, 2, -1, 1);
        let b = Degree::frac(-1, 2, 0, 1);
        let c = Degree::frac(0, 1, -4, 1);
        assert!(a < b && b < c && c < Degree::ZERO);
        assert!(a.eval(1e-3) < b.eval(1e-3));
    }

    #[test]
    fn display_and_parse() {
        let d = Degree::frac(0, 1, -4, 1);
        assert_eq!(d.to_string(), "0 - 4k");
        assert_eq!("0 - 4k".parse::<Degree>().unwrap(), d);
        assert_eq!("-5/2 - k".parse::<Degree>().unwrap(), Degree::frac(-5, 2, -1, 1));
        assert_eq!(Degree::frac(-5, 2, -1, 1).to_string(), "-5/2 - k");
        assert_eq!("1+3*k".parse::<Degree>().unwrap(), Degree::frac(1, 1, 3, 1));
        assert_eq!("-1-2κ".parse::<Degree>().unwrap(), Degree::frac(-1, 1, -2, 1));
        assert_eq!("2.5".parse::<Degree>().unwrap(), Degree::frac(5, 2, 0, 1));
        assert_eq!("-3/2k".parse::<Degree>().unwrap(), Degree::frac(0, 1, -3, 2));
        assert!("x".parse::<Degree>().is_err());
    }

    #[test]
    fn multi_index_weights() {
        let k = MultiIndex::new(vec![1, 2, 0, 0]);
        assert_eq!(k.entries(), &[1, 2]);
        assert_eq!(k.weighted_len(Rational64::from_integer(2)), Rational64::from_integer(4));
        let all = MultiIndex::all_below(4, Rational64::from_integer(2), Rational64::from_integer(2));
        // 1, X1, X2, X3
        assert_eq!(all.len(), 4);
    }

    #[test]
    fn zero_below_bound_is_empty() {
        assert!(MultiIndex::all_below(2, Rational64::from_integer(2), Rational64::zero()).is_empty());
    }
}
