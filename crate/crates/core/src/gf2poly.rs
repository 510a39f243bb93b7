//! Sparse polynomials over the two-element field in generators `w_1, ..., w_n`
//! with weighted grading `deg w_i = i`.
//!
//! Coefficients are implicit: a monomial is either present or not, so addition
//! is symmetric difference of term sets. Products are truncated eagerly by
//! weighted degree, which is all the class computations ever need.
//!
//! Terms are kept in a `BTreeSet` ordered by (weighted degree, exponent vector
//! lexicographically), which is also the canonical print order:
//!
//! ```text
//! 1 + w1 + w2 + w1^2 + w3 + w1*w2 + w1^3
//! ```

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use serde::{Serialize, Serializer};
use thiserror::Error;

/// Default cap on the number of terms any intermediate result may hold.
pub const DEFAULT_MAX_TERMS: usize = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("generator count mismatch: {left} vs {right}")]
    GeneratorMismatch { left: usize, right: usize },
    #[error("series has no constant term and cannot be inverted")]
    NotInvertible,
    #[error("exponent of w{generator} exceeds 2^16")]
    ExponentOverflow { generator: usize },
    #[error("term count exceeded the limit of {limit}")]
    TermLimit { limit: usize },
    #[error("cannot parse polynomial: {0}")]
    Parse(String),
}

/// Exponent vector; index `i` holds the exponent of `w_{i+1}`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial {
    degree: u64,
    exponents: Box<[u16]>,
}

impl Monomial {
    pub fn unit(num_generators: usize) -> Self {
        Self {
            degree: 0,
            exponents: vec![0; num_generators].into_boxed_slice(),
        }
    }

    /// `w_index^power`, with `index` 1-based.
    pub fn generator_power(num_generators: usize, index: usize, power: u16) -> Self {
        assert!(
            (1..=num_generators).contains(&index),
            "generator w{index} out of range 1..={num_generators}"
        );
        let mut exponents = vec![0; num_generators];
        exponents[index - 1] = power;
        Self::new(exponents)
    }

    pub fn new(exponents: Vec<u16>) -> Self {
        let degree = weighted_degree(&exponents);
        Self {
            degree,
            exponents: exponents.into_boxed_slice(),
        }
    }

    pub fn degree(&self) -> u64 {
        self.degree
    }

    pub fn exponents(&self) -> &[u16] {
        &self.exponents
    }

    /// Exponent of `w_index` (1-based).
    pub fn exponent(&self, index: usize) -> u16 {
        self.exponents[index - 1]
    }

    pub fn num_generators(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_unit(&self) -> bool {
        self.degree == 0
    }

    pub fn mul(&self, other: &Monomial) -> Result<Monomial, PolyError> {
        debug_assert_eq!(self.exponents.len(), other.exponents.len());
        let mut exponents = Vec::with_capacity(self.exponents.len());
        for (i, (&a, &b)) in self.exponents.iter().zip(other.exponents.iter()).enumerate() {
            exponents.push(
                a.checked_add(b)
                    .ok_or(PolyError::ExponentOverflow { generator: i + 1 })?,
            );
        }
        Ok(Monomial {
            degree: self.degree + other.degree,
            exponents: exponents.into_boxed_slice(),
        })
    }

    fn square(&self) -> Result<Monomial, PolyError> {
        self.mul(self)
    }
}

fn weighted_degree(exponents: &[u16]) -> u64 {
    exponents
        .iter()
        .enumerate()
        .map(|(i, &e)| (i as u64 + 1) * u64::from(e))
        .sum()
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.degree
            .cmp(&other.degree)
            .then_with(|| self.exponents.cmp(&other.exponents))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_unit() {
            return f.write_str("1");
        }
        let mut first = true;
        for (i, &e) in self.exponents.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                f.write_str("*")?;
            }
            first = false;
            write!(f, "w{}", i + 1)?;
            if e > 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

/// A polynomial over F_2 as a set of monomials.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Gf2Poly {
    num_generators: usize,
    terms: BTreeSet<Monomial>,
}

fn toggle(set: &mut HashSet<Monomial>, m: Monomial) {
    if !set.remove(&m) {
        set.insert(m);
    }
}

fn check_limit(len: usize, limit: usize) -> Result<(), PolyError> {
    if len > limit {
        Err(PolyError::TermLimit { limit })
    } else {
        Ok(())
    }
}

impl Gf2Poly {
    pub fn zero(num_generators: usize) -> Self {
        Self {
            num_generators,
            terms: BTreeSet::new(),
        }
    }

    pub fn one(num_generators: usize) -> Self {
        Self::from_monomial(Monomial::unit(num_generators))
    }

    /// The single generator `w_index` (1-based).
    pub fn generator(num_generators: usize, index: usize) -> Self {
        Self::from_monomial(Monomial::generator_power(num_generators, index, 1))
    }

    pub fn from_monomial(m: Monomial) -> Self {
        let num_generators = m.num_generators();
        let mut terms = BTreeSet::new();
        terms.insert(m);
        Self {
            num_generators,
            terms,
        }
    }

    /// Builds a polynomial from monomials; repeated monomials cancel in pairs.
    pub fn from_monomials<I: IntoIterator<Item = Monomial>>(num_generators: usize, iter: I) -> Self {
        let mut terms = BTreeSet::new();
        for m in iter {
            assert_eq!(m.num_generators(), num_generators, "monomial has wrong arity");
            if !terms.remove(&m) {
                terms.insert(m);
            }
        }
        Self {
            num_generators,
            terms,
        }
    }

    /// `1 + w_1 + ... + w_n`.
    pub fn one_plus_all_generators(num_generators: usize) -> Self {
        let mut p = Self::one(num_generators);
        for i in 1..=num_generators {
            p.terms.insert(Monomial::generator_power(num_generators, i, 1));
        }
        p
    }

    fn from_set(num_generators: usize, set: HashSet<Monomial>) -> Self {
        Self {
            num_generators,
            terms: set.into_iter().collect(),
        }
    }

    pub fn num_generators(&self) -> usize {
        self.num_generators
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.has_constant_term()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = &Monomial> {
        self.terms.iter()
    }

    pub fn contains(&self, m: &Monomial) -> bool {
        self.terms.contains(m)
    }

    pub fn has_constant_term(&self) -> bool {
        self.terms
            .first()
            .map(Monomial::is_unit)
            .unwrap_or(false)
    }

    /// Highest weighted degree present, `None` for zero.
    pub fn max_degree(&self) -> Option<u64> {
        self.terms.last().map(Monomial::degree)
    }

    fn check_same(&self, other: &Gf2Poly) -> Result<(), PolyError> {
        if self.num_generators != other.num_generators {
            Err(PolyError::GeneratorMismatch {
                left: self.num_generators,
                right: other.num_generators,
            })
        } else {
            Ok(())
        }
    }

    pub fn add(&self, other: &Gf2Poly) -> Result<Gf2Poly, PolyError> {
        self.check_same(other)?;
        Ok(Gf2Poly {
            num_generators: self.num_generators,
            terms: self
                .terms
                .symmetric_difference(&other.terms)
                .cloned()
                .collect(),
        })
    }

    /// Drops all monomials of weighted degree above `max_degree`.
    pub fn truncate(&self, max_degree: u64) -> Gf2Poly {
        Gf2Poly {
            num_generators: self.num_generators,
            terms: self
                .terms
                .iter()
                .filter(|m| m.degree() <= max_degree)
                .cloned()
                .collect(),
        }
    }

    /// The homogeneous part of weighted degree exactly `degree`.
    pub fn graded_component(&self, degree: u64) -> Gf2Poly {
        Gf2Poly {
            num_generators: self.num_generators,
            terms: self
                .terms
                .iter()
                .filter(|m| m.degree() == degree)
                .cloned()
                .collect(),
        }
    }

    /// Multiplies every term by a monomial.
    pub fn mul_monomial(&self, m: &Monomial) -> Result<Gf2Poly, PolyError> {
        if m.num_generators() != self.num_generators {
            return Err(PolyError::GeneratorMismatch {
                left: self.num_generators,
                right: m.num_generators(),
            });
        }
        let terms = self
            .terms
            .iter()
            .map(|t| t.mul(m))
            .collect::<Result<BTreeSet<_>, _>>()?;
        Ok(Gf2Poly {
            num_generators: self.num_generators,
            terms,
        })
    }

    pub fn mul_truncated(&self, other: &Gf2Poly, max_degree: u64) -> Result<Gf2Poly, PolyError> {
        self.mul_truncated_within(other, max_degree, DEFAULT_MAX_TERMS)
    }

    pub fn mul_truncated_within(
        &self,
        other: &Gf2Poly,
        max_degree: u64,
        max_terms: usize,
    ) -> Result<Gf2Poly, PolyError> {
        self.check_same(other)?;
        let mut acc = HashSet::new();
        for a in &self.terms {
            if a.degree() > max_degree {
                break;
            }
            for b in &other.terms {
                if a.degree() + b.degree() > max_degree {
                    break;
                }
                toggle(&mut acc, a.mul(b)?);
            }
            check_limit(acc.len(), max_terms)?;
        }
        Ok(Gf2Poly::from_set(self.num_generators, acc))
    }

    /// Squares termwise; every cross term appears twice and cancels.
    pub fn square_truncated(&self, max_degree: u64) -> Result<Gf2Poly, PolyError> {
        let terms = self
            .terms
            .iter()
            .take_while(|m| 2 * m.degree() <= max_degree)
            .map(Monomial::square)
            .collect::<Result<BTreeSet<_>, _>>()?;
        Ok(Gf2Poly {
            num_generators: self.num_generators,
            terms,
        })
    }

    pub fn pow_truncated(&self, exponent: u64, max_degree: u64) -> Result<Gf2Poly, PolyError> {
        self.pow_truncated_within(exponent, max_degree, DEFAULT_MAX_TERMS)
    }

    pub fn pow_truncated_within(
        &self,
        mut exponent: u64,
        max_degree: u64,
        max_terms: usize,
    ) -> Result<Gf2Poly, PolyError> {
        let mut result = Gf2Poly::one(self.num_generators);
        let mut base = self.truncate(max_degree);
        while exponent > 0 {
            if exponent & 1 == 1 {
                result = result.mul_truncated_within(&base, max_degree, max_terms)?;
            }
            exponent >>= 1;
            if exponent > 0 {
                base = base.square_truncated(max_degree)?;
            }
        }
        Ok(result)
    }

    /// Inverse as a formal power series, `sum_{n >= 0} (p - 1)^n`, up to `max_degree`.
    pub fn invert_series(&self, max_degree: u64) -> Result<Gf2Poly, PolyError> {
        self.invert_series_within(max_degree, DEFAULT_MAX_TERMS)
    }

    /// Evaluates the geometric series degree by degree: with `t = p - 1` the
    /// sum `q` satisfies `q = 1 + t q`, so its degree-`n` part is
    /// `sum_i t_i q_{n-i}`.
    pub fn invert_series_within(&self, max_degree: u64, max_terms: usize) -> Result<Gf2Poly, PolyError> {
        if !self.has_constant_term() {
            return Err(PolyError::NotInvertible);
        }
        let top = usize::try_from(max_degree).expect("truncation degree fits in usize");
        let mut tail: Vec<Vec<&Monomial>> = vec![Vec::new(); top + 1];
        for m in self.terms.iter().skip(1) {
            if m.degree() > max_degree {
                break;
            }
            tail[m.degree() as usize].push(m);
        }

        let mut components: Vec<Vec<Monomial>> = Vec::with_capacity(top + 1);
        components.push(vec![Monomial::unit(self.num_generators)]);
        let mut total = 1usize;
        for n in 1..=top {
            let mut acc = HashSet::new();
            for (i, tail_i) in tail.iter().enumerate().take(n + 1).skip(1) {
                for a in tail_i {
                    for b in &components[n - i] {
                        toggle(&mut acc, a.mul(b)?);
                    }
                }
            }
            total += acc.len();
            check_limit(total, max_terms)?;
            components.push(acc.into_iter().collect());
        }
        Ok(Gf2Poly {
            num_generators: self.num_generators,
            terms: components.into_iter().flatten().collect(),
        })
    }

    /// Parses the canonical rendering, e.g. `1 + w1^2*w3`. Repeated terms cancel.
    pub fn parse(num_generators: usize, text: &str) -> Result<Gf2Poly, PolyError> {
        let text = text.trim();
        if text == "0" {
            return Ok(Gf2Poly::zero(num_generators));
        }
        let mut monomials = Vec::new();
        for term in text.split('+') {
            let term = term.trim();
            if term.is_empty() {
                return Err(PolyError::Parse(format!("empty term in {text:?}")));
            }
            let mut exponents = vec![0u16; num_generators];
            for factor in term.split('*') {
                let factor = factor.trim();
                if factor == "1" {
                    continue;
                }
                let body = factor
                    .strip_prefix('w')
                    .ok_or_else(|| PolyError::Parse(format!("bad factor {factor:?}")))?;
                let (index, power) = match body.split_once('^') {
                    Some((i, e)) => (i, e),
                    None => (body, "1"),
                };
                let index: usize = index
                    .parse()
                    .map_err(|_| PolyError::Parse(format!("bad generator in {factor:?}")))?;
                let power: u16 = power
                    .parse()
                    .map_err(|_| PolyError::Parse(format!("bad exponent in {factor:?}")))?;
                if index == 0 || index > num_generators {
                    return Err(PolyError::Parse(format!(
                        "generator w{index} outside 1..={num_generators}"
                    )));
                }
                exponents[index - 1] = exponents[index - 1]
                    .checked_add(power)
                    .ok_or(PolyError::ExponentOverflow { generator: index })?;
            }
            monomials.push(Monomial::new(exponents));
        }
        Ok(Gf2Poly::from_monomials(num_generators, monomials))
    }
}

impl fmt::Display for Gf2Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, m) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{m}")?;
        }
        Ok(())
    }
}

impl Serialize for Gf2Poly {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: usize, s: &str) -> Gf2Poly {
        Gf2Poly::parse(n, s).unwrap()
    }

    /// Naive product without any truncation shortcuts or Frobenius.
    fn naive_pow(base: &Gf2Poly, e: u64, d: u64) -> Gf2Poly {
        let mut acc = Gf2Poly::one(base.num_generators());
        for _ in 0..e {
            acc = acc.mul_truncated(base, d).unwrap();
        }
        acc
    }

    #[test]
    fn add_examples() {
        assert!(p(1, "w1").add(&p(1, "w1")).unwrap().is_zero());
        assert_eq!(p(2, "1 + w1").add(&p(2, "w2")).unwrap(), p(2, "1 + w1 + w2"));
        assert_eq!(p(2, "1 + w1").add(&p(2, "1 + w2")).unwrap(), p(2, "w1 + w2"));
        assert_eq!(
            p(1, "w1").add(&p(2, "w1")),
            Err(PolyError::GeneratorMismatch { left: 1, right: 2 })
        );
    }

    #[test]
    fn mul_examples() {
        let a = p(1, "1 + w1");
        assert_eq!(a.mul_truncated(&a, 2).unwrap(), p(1, "1 + w1^2"));
        assert_eq!(a.mul_truncated(&a, 1).unwrap(), p(1, "1"));
        assert!(a.mul_truncated(&p(2, "w1"), 3).is_err());
    }

    #[test]
    fn two_power_of_one_plus_u_is_one_below_its_degree() {
        for l in [2usize, 4, 8] {
            let u = Gf2Poly::one_plus_all_generators(l - 1);
            for t in 1..6u32 {
                let e = 1u64 << t;
                let r = u.pow_truncated(e, e - 1).unwrap();
                assert!(r.is_one(), "l={l} t={t}");
                assert_eq!(r, naive_pow(&u, e, e - 1));
            }
        }
    }

    #[test]
    fn pow_examples() {
        let a = p(1, "1 + w1");
        assert_eq!(a.pow_truncated(3, 3).unwrap(), p(1, "1 + w1 + w1^2 + w1^3"));
        assert_eq!(a.pow_truncated(0, 3).unwrap(), p(1, "1"));
        let b = p(3, "1 + w1 + w2^3 + w3");
        assert_eq!(b.pow_truncated(1, 4).unwrap(), b.truncate(4));
        for d in 2..40u64 {
            let g = crate::dyadic::gamma(d).unwrap();
            assert!(a.pow_truncated(1 << g, d - 1).unwrap().is_one());
        }
    }

    #[test]
    fn pow_three_matches_pascal_oracle() {
        // rows of Pascal's triangle mod 2
        let mut row = vec![1u8];
        for e in 0..40u64 {
            let expected = Gf2Poly::from_monomials(
                1,
                row.iter()
                    .enumerate()
                    .filter(|(_, &c)| c == 1)
                    .map(|(i, _)| Monomial::new(vec![i as u16])),
            );
            assert_eq!(p(1, "1 + w1").pow_truncated(e, 64).unwrap(), expected);
            let mut next = vec![1u8; row.len() + 1];
            for i in 1..row.len() {
                next[i] = row[i - 1] ^ row[i];
            }
            row = next;
        }
    }

    #[test]
    fn invert_examples() {
        assert_eq!(p(2, "1").invert_series(5).unwrap(), p(2, "1"));
        assert_eq!(
            p(1, "1 + w1").invert_series(3).unwrap(),
            p(1, "1 + w1 + w1^2 + w1^3")
        );
        assert_eq!(p(1, "w1").invert_series(3), Err(PolyError::NotInvertible));
        assert_eq!(p(1, "0").invert_series(3), Err(PolyError::NotInvertible));
    }

    #[test]
    fn invert_one_plus_u_for_four_points() {
        // Brute-force geometric series sum_{n<=3} u^n with explicit products.
        let u = p(3, "w1 + w2 + w3");
        let mut oracle = Gf2Poly::zero(3);
        let mut power = Gf2Poly::one(3);
        for _ in 0..=3 {
            oracle = oracle.add(&power).unwrap();
            power = power.mul_truncated(&u, 3).unwrap();
        }
        let inv = p(3, "1 + w1 + w2 + w3").invert_series(3).unwrap();
        assert_eq!(inv, oracle);
        // u^2 = w1^2 + w2^2 + w3^2, and 2 w1 w2 cancels in u^3
        assert_eq!(inv, p(3, "1 + w1 + w1^2 + w2 + w1^3 + w3"));
        assert_eq!(inv.to_string(), "1 + w1 + w2 + w1^2 + w3 + w1^3");
    }

    #[test]
    fn graded_component_examples() {
        assert_eq!(p(2, "1 + w1 + w2").graded_component(2), p(2, "w2"));
        assert!(p(2, "1 + w1 + w2").graded_component(7).is_zero());
        let dual = p(1, "1 + w1").invert_series(1).unwrap();
        assert_eq!(dual.graded_component(1), p(1, "w1"));
    }

    #[test]
    fn rendering_is_canonical() {
        assert_eq!(Gf2Poly::zero(3).to_string(), "0");
        assert_eq!(Gf2Poly::one(3).to_string(), "1");
        assert_eq!(p(3, "w3^3").to_string(), "w3^3");
        assert_eq!(p(3, "w1*w2 + w3 + w1^3 + 1").to_string(), "1 + w3 + w1*w2 + w1^3");
        assert_eq!(p(2, "w1*w1").to_string(), "w1^2");
        assert!(Gf2Poly::parse(2, "w3").is_err());
        assert!(Gf2Poly::parse(2, "x1").is_err());
        assert!(Gf2Poly::parse(2, "w1 + ").is_err());
    }

    #[test]
    fn cached_degree_agrees() {
        let m = Monomial::new(vec![2, 0, 3]);
        assert_eq!(m.degree(), 2 + 9);
        assert_eq!(Monomial::unit(4).degree(), 0);
        assert!(Monomial::unit(0).is_unit());
    }

    #[test]
    fn exponent_overflow_is_reported() {
        let m = Monomial::generator_power(1, 1, u16::MAX);
        assert_eq!(m.mul(&m), Err(PolyError::ExponentOverflow { generator: 1 }));
    }

    #[test]
    fn term_limit_is_enforced() {
        let u = Gf2Poly::one_plus_all_generators(6);
        assert_eq!(
            u.invert_series_within(12, 10),
            Err(PolyError::TermLimit { limit: 10 })
        );
        assert!(u.invert_series_within(12, DEFAULT_MAX_TERMS).is_ok());
    }
}
