//! Dickson invariants `q_{m,s}` of `F_2[x_1, ..., x_m]`.
//!
//! They are read off the additive polynomial
//!
//! ```text
//! prod_{v in F_2^m} (X + v.x) = X^{2^m} + sum_s q_{m,s} X^{2^s}
//! ```
//!
//! whose only nonzero coefficients sit at 2-power degrees of `X`. Invariance
//! under `GL_m(F_2)` is checked by brute-force substitution.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

pub const MAX_RANK: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DicksonError {
    #[error("m must satisfy 1 <= m <= {MAX_RANK}, got {0}")]
    RankOutOfRange(usize),
    #[error("exhaustive GL_{0}(F_2) check needs the long-run flag")]
    LongRunRequired(usize),
    #[error("coefficient of X^{0} is nonzero; the product is not additive")]
    NotAdditive(usize),
}

/// Polynomial over F_2 in `x_1..x_m` with ordinary degree, dense exponent vectors.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct XPoly {
    vars: usize,
    terms: BTreeSet<Vec<u8>>,
}

impl XPoly {
    pub fn zero(vars: usize) -> Self {
        Self {
            vars,
            terms: BTreeSet::new(),
        }
    }

    pub fn one(vars: usize) -> Self {
        Self::from_terms(vars, [vec![0; vars]])
    }

    pub fn var(vars: usize, i: usize) -> Self {
        let mut e = vec![0; vars];
        e[i - 1] = 1;
        Self::from_terms(vars, [e])
    }

    /// Repeated exponent vectors cancel in pairs.
    pub fn from_terms<I: IntoIterator<Item = Vec<u8>>>(vars: usize, iter: I) -> Self {
        let mut terms = BTreeSet::new();
        for e in iter {
            assert_eq!(e.len(), vars);
            if !terms.remove(&e) {
                terms.insert(e);
            }
        }
        Self { vars, terms }
    }

    /// `sum_i coeffs[i] x_{i+1}`.
    pub fn linear_form(coeffs: &[bool]) -> Self {
        let vars = coeffs.len();
        Self::from_terms(
            vars,
            coeffs.iter().enumerate().filter(|(_, &c)| c).map(|(i, _)| {
                let mut e = vec![0; vars];
                e[i] = 1;
                e
            }),
        )
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.iter().all(|e| e.iter().all(|&x| x == 0))
    }

    pub fn terms(&self) -> impl Iterator<Item = &Vec<u8>> {
        self.terms.iter()
    }

    /// Degree of the homogeneous polynomial, `None` if zero or inhomogeneous.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut degrees = self.terms.iter().map(|e| e.iter().map(|&x| u32::from(x)).sum::<u32>());
        let first = degrees.next()?;
        degrees.all(|d| d == first).then_some(first)
    }

    pub fn add(&self, other: &XPoly) -> XPoly {
        assert_eq!(self.vars, other.vars);
        XPoly {
            vars: self.vars,
            terms: self.terms.symmetric_difference(&other.terms).cloned().collect(),
        }
    }

    pub fn mul(&self, other: &XPoly) -> XPoly {
        assert_eq!(self.vars, other.vars);
        XPoly::from_terms(
            self.vars,
            self.terms.iter().flat_map(|a| {
                other
                    .terms
                    .iter()
                    .map(move |b| a.iter().zip(b).map(|(x, y)| x + y).collect())
            }),
        )
    }

    pub fn pow(&self, e: u32) -> XPoly {
        (0..e).fold(XPoly::one(self.vars), |acc, _| acc.mul(self))
    }

    /// Substitutes `x_i -> sum_j matrix[i][j] x_j`.
    pub fn substitute(&self, matrix: &[Vec<bool>]) -> XPoly {
        assert_eq!(matrix.len(), self.vars);
        let images: Vec<XPoly> = matrix.iter().map(|row| XPoly::linear_form(row)).collect();
        let mut out = XPoly::zero(self.vars);
        for e in &self.terms {
            let term = e
                .iter()
                .zip(&images)
                .fold(XPoly::one(self.vars), |acc, (&k, img)| acc.mul(&img.pow(u32::from(k))));
            out = out.add(&term);
        }
        out
    }
}

impl fmt::Display for XPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        // graded, then higher powers of earlier variables first
        let mut terms: Vec<&Vec<u8>> = self.terms.iter().collect();
        terms.sort_by(|a, b| {
            let da: u32 = a.iter().map(|&x| u32::from(x)).sum();
            let db: u32 = b.iter().map(|&x| u32::from(x)).sum();
            da.cmp(&db).then_with(|| b.cmp(a))
        });
        for (n, e) in terms.iter().enumerate() {
            if n > 0 {
                f.write_str(" + ")?;
            }
            let factors: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &x)| x > 0)
                .map(|(i, &x)| {
                    if x == 1 {
                        format!("x{}", i + 1)
                    } else {
                        format!("x{}^{}", i + 1, x)
                    }
                })
                .collect();
            if factors.is_empty() {
                f.write_str("1")?;
            } else {
                f.write_str(&factors.join("*"))?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DicksonAlgebra {
    pub m: usize,
    /// `q_{m,m-1}, ..., q_{m,0}` in that order.
    pub invariants: Vec<XPoly>,
}

impl DicksonAlgebra {
    /// `q_{m,s}`.
    pub fn q(&self, s: usize) -> &XPoly {
        &self.invariants[self.m - 1 - s]
    }

    /// Expected degree `2^m - 2^s` of `q_{m,s}`.
    pub fn degree_formula(&self, s: usize) -> u32 {
        (1u32 << self.m) - (1u32 << s)
    }
}

fn vectors(m: usize) -> impl Iterator<Item = Vec<bool>> {
    (0u32..1 << m).map(move |bits| (0..m).map(|i| bits >> i & 1 == 1).collect())
}

/// Coefficients of `prod_v (X + v.x)` indexed by the power of `X`.
pub fn additive_polynomial(m: usize) -> Result<Vec<XPoly>, DicksonError> {
    if !(1..=MAX_RANK).contains(&m) {
        return Err(DicksonError::RankOutOfRange(m));
    }
    let mut coeffs = vec![XPoly::one(m)];
    for v in vectors(m) {
        let form = XPoly::linear_form(&v);
        let mut next = vec![XPoly::zero(m); coeffs.len() + 1];
        for (i, c) in coeffs.iter().enumerate() {
            next[i + 1] = next[i + 1].add(c);
            next[i] = next[i].add(&form.mul(c));
        }
        coeffs = next;
    }
    Ok(coeffs)
}

pub fn dickson_invariants(m: usize) -> Result<DicksonAlgebra, DicksonError> {
    let coeffs = additive_polynomial(m)?;
    for (i, c) in coeffs.iter().enumerate() {
        let allowed = i.is_power_of_two();
        if !allowed && !c.is_zero() {
            return Err(DicksonError::NotAdditive(i));
        }
    }
    debug_assert!(coeffs[1 << m].is_one());
    let invariants = (0..m).rev().map(|s| coeffs[1 << s].clone()).collect();
    Ok(DicksonAlgebra { m, invariants })
}

fn is_invertible(matrix: &[Vec<bool>]) -> bool {
    let mut rows: Vec<u32> = matrix
        .iter()
        .map(|r| r.iter().enumerate().fold(0, |acc, (j, &b)| acc | (u32::from(b) << j)))
        .collect();
    let n = rows.len();
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| rows[r] >> col & 1 == 1) else {
            return false;
        };
        rows.swap(col, pivot);
        for r in 0..n {
            if r != col && rows[r] >> col & 1 == 1 {
                rows[r] ^= rows[col];
            }
        }
    }
    true
}

/// All invertible `m x m` matrices over F_2, in a fixed order.
pub fn general_linear_group(m: usize) -> Vec<Vec<Vec<bool>>> {
    (0u64..1 << (m * m))
        .map(|bits| {
            (0..m)
                .map(|i| (0..m).map(|j| bits >> (i * m + j) & 1 == 1).collect())
                .collect::<Vec<Vec<bool>>>()
        })
        .filter(|a| is_invertible(a))
        .collect()
}

pub fn is_gl_invariant(p: &XPoly, group: &[Vec<Vec<bool>>]) -> bool {
    group.iter().all(|a| p.substitute(a) == *p)
}

/// Checks every invariant against all of `GL_m(F_2)`.
///
/// `m = 4` (20160 matrices) is refused unless `allow_long_run` is set.
pub fn verify_gl_invariance(alg: &DicksonAlgebra, allow_long_run: bool) -> Result<bool, DicksonError> {
    if alg.m > 3 && !allow_long_run {
        return Err(DicksonError::LongRunRequired(alg.m));
    }
    let group = general_linear_group(alg.m);
    Ok(alg.invariants.iter().all(|q| is_gl_invariant(q, &group)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(vars: usize, s: &str) -> XPoly {
        XPoly::from_terms(
            vars,
            s.split('+').map(|t| {
                let mut e = vec![0u8; vars];
                for f in t.trim().split('*') {
                    let f = f.trim().trim_start_matches('x');
                    let (i, k) = f.split_once('^').unwrap_or((f, "1"));
                    e[i.parse::<usize>().unwrap() - 1] += k.parse::<u8>().unwrap();
                }
                e
            }),
        )
    }

    #[test]
    fn rank_one() {
        let alg = dickson_invariants(1).unwrap();
        assert_eq!(alg.invariants, vec![parse(1, "x1")]);
        assert_eq!(verify_gl_invariance(&alg, false), Ok(true));
    }

    #[test]
    fn rank_two_by_explicit_product() {
        // X (X + x1)(X + x2)(X + x1 + x2) expanded by hand
        let alg = dickson_invariants(2).unwrap();
        assert_eq!(alg.q(1), &parse(2, "x1^2 + x1*x2 + x2^2"));
        assert_eq!(alg.q(0), &parse(2, "x1^2*x2 + x1*x2^2"));
        assert_eq!(alg.q(1).to_string(), "x1^2 + x1*x2 + x2^2");
        assert_eq!(alg.q(0).to_string(), "x1^2*x2 + x1*x2^2");
        assert_eq!(general_linear_group(2).len(), 6);
        assert_eq!(verify_gl_invariance(&alg, false), Ok(true));
    }

    #[test]
    fn perturbed_invariant_is_rejected() {
        let alg = dickson_invariants(2).unwrap();
        let bad = alg.q(1).add(&XPoly::var(2, 1));
        assert!(!is_gl_invariant(&bad, &general_linear_group(2)));
    }

    #[test]
    fn degrees_follow_formula() {
        for m in 1..=3 {
            let alg = dickson_invariants(m).unwrap();
            for s in 0..m {
                assert_eq!(alg.q(s).homogeneous_degree(), Some(alg.degree_formula(s)));
            }
        }
        let alg = dickson_invariants(3).unwrap();
        let degrees: Vec<_> = alg.invariants.iter().map(|q| q.homogeneous_degree().unwrap()).collect();
        assert_eq!(degrees, vec![4, 6, 7]);
    }

    #[test]
    fn rank_four_needs_flag() {
        let alg = dickson_invariants(4).unwrap();
        assert_eq!(verify_gl_invariance(&alg, false), Err(DicksonError::LongRunRequired(4)));
        assert_eq!(dickson_invariants(0), Err(DicksonError::RankOutOfRange(0)));
        assert_eq!(dickson_invariants(5), Err(DicksonError::RankOutOfRange(5)));
    }

    #[test]
    fn top_invariant_is_product_of_nonzero_forms() {
        for m in 1..=3 {
            let alg = dickson_invariants(m).unwrap();
            let product = vectors(m)
                .skip(1)
                .fold(XPoly::one(m), |acc, v| acc.mul(&XPoly::linear_form(&v)));
            assert_eq!(alg.q(0), &product);
        }
    }

    #[test]
    fn additive_polynomial_has_only_two_power_coefficients() {
        for m in 1..=4 {
            let coeffs = additive_polynomial(m).unwrap();
            assert_eq!(coeffs.len(), (1 << m) + 1);
            for (i, c) in coeffs.iter().enumerate() {
                assert_eq!(!c.is_zero(), i.is_power_of_two(), "m={m} X^{i}");
            }
        }
    }

    #[test]
    fn no_invariant_of_degree_one_in_two_variables() {
        // degree 2^2 - 2^1 = 2 is the lowest; nonzero linear polys are x1, x2, x1 + x2
        let group = general_linear_group(2);
        for bits in 1u8..4 {
            let p = XPoly::linear_form(&[bits & 1 == 1, bits & 2 == 2]);
            assert!(!is_gl_invariant(&p, &group));
        }
    }
}
