//! Total and dual Stiefel–Whitney classes of multiples of the configuration
//! bundle `xi_{R^d, c}`, and the non-vanishing certificates built from them.
//!
//! For `c = 2^m` the total class is the formal sum `1 + w_1 + ... + w_{c-1}`
//! and everything is computed in the [`QuotientModel`] for `(d, c)`. Composite
//! counts are handled factor by factor over the binary expansion of `c`: the
//! class of the product bundle is a cross product, and a cross product of
//! nonzero classes in distinct Künneth summands is nonzero.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::cohmodel::{ModelError, QuotientModel};
use crate::dyadic::{self, DyadicError, DyadicProfile};
use crate::gf2poly::{Gf2Poly, Monomial, PolyError, DEFAULT_MAX_TERMS};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassError {
    #[error("count must be a power of two, got {0}")]
    NotPowerOfTwo(u64),
    #[error("{name} must be at least {min}, got {value}")]
    OutOfRange {
        name: &'static str,
        min: u64,
        value: u64,
    },
    #[error(transparent)]
    Dyadic(#[from] DyadicError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

fn require(name: &'static str, value: u64, min: u64) -> Result<(), ClassError> {
    if value < min {
        Err(ClassError::OutOfRange { name, min, value })
    } else {
        Ok(())
    }
}

/// Resource limits shared by every class computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_terms: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Self {
            max_terms: DEFAULT_MAX_TERMS,
        }
    }
}

/// A request for a class of `multiplicity * xi_{R^d, count}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ClassQuery {
    pub d: u64,
    pub count: u64,
    pub multiplicity: u64,
    pub target_degree: u64,
}

impl ClassQuery {
    /// `2 xi_{R^2, c}` is trivial, so only the parity of the multiplicity
    /// matters in the plane.
    pub fn effective_multiplicity(&self) -> u64 {
        if self.d == 2 {
            self.multiplicity % 2
        } else {
            self.multiplicity
        }
    }

    fn validate(&self) -> Result<(), ClassError> {
        require("d", self.d, 2)?;
        if self.count < 2 || !self.count.is_power_of_two() {
            return Err(ClassError::NotPowerOfTwo(self.count));
        }
        Ok(())
    }

    fn generators(&self) -> usize {
        (self.count - 1) as usize
    }

    pub fn total(&self, limits: &Limits) -> Result<Gf2Poly, ClassError> {
        self.validate()?;
        let w = Gf2Poly::one_plus_all_generators(self.generators());
        Ok(w.pow_truncated_within(
            self.effective_multiplicity(),
            self.target_degree,
            limits.max_terms,
        )?)
    }

    /// Dual class by geometric-series inversion of the total class.
    pub fn dual(&self, limits: &Limits) -> Result<Gf2Poly, ClassError> {
        let total = self.total(limits)?;
        Ok(total.invert_series_within(self.target_degree, limits.max_terms)?)
    }

    /// Dual class as `(1 + u)^{2^T - m}` with `2^T > target_degree + m`.
    ///
    /// `(1 + u)^{2^T} = 1 + u^{2^T}` and the second term lies beyond the
    /// truncation, so this agrees with the inverse of `(1 + u)^m`.
    pub fn dual_by_complement(&self, limits: &Limits) -> Result<Gf2Poly, ClassError> {
        self.validate()?;
        let m = self.effective_multiplicity();
        let bound = self.target_degree + m;
        let two_power = (bound + 1).next_power_of_two();
        let w = Gf2Poly::one_plus_all_generators(self.generators());
        Ok(w.pow_truncated_within(two_power - m, self.target_degree, limits.max_terms)?)
    }
}

pub fn total_class(d: u64, count: u64, multiplicity: u64, truncation_degree: u64) -> Result<Gf2Poly, ClassError> {
    ClassQuery {
        d,
        count,
        multiplicity,
        target_degree: truncation_degree,
    }
    .total(&Limits::default())
}

pub fn dual_class(d: u64, count: u64, multiplicity: u64, truncation_degree: u64) -> Result<Gf2Poly, ClassError> {
    ClassQuery {
        d,
        count,
        multiplicity,
        target_degree: truncation_degree,
    }
    .dual(&Limits::default())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    NonvanishingCertified,
    NotCertified,
}

impl Verdict {
    pub fn is_certified(self) -> bool {
        self == Verdict::NonvanishingCertified
    }

    fn all<I: IntoIterator<Item = bool>>(flags: I) -> Self {
        if flags.into_iter().all(|b| b) {
            Verdict::NonvanishingCertified
        } else {
            Verdict::NotCertified
        }
    }
}

/// Which argument certifies a 2-power factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FactorCase {
    /// A one-point factor or `d = 1`: the relevant component has degree 0.
    Trivial,
    /// Top-degree dual class of a single `xi_{R^d, 2^m}`.
    TopDegree,
    /// Skew case `d = 2`: multiplicity reduced mod 2.
    PlaneTriviality,
    /// Skew case with two points, computed in `F_2[w_1]/(w_1^d)`.
    Projective,
    /// Skew case for a 2-power count of at least 4.
    PowerOfTwo,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FactorCertificate {
    pub count: u64,
    pub case: FactorCase,
    pub multiplicity: u64,
    /// Degree of the extracted component, `(count - 1) j`.
    pub degree: u64,
    /// Exponent `j` of the expected pure power `w_{count-1}^j`.
    pub exponent: u64,
    pub certified: bool,
    /// The pure power on success, the reduced lifted component otherwise.
    pub witness: Gf2Poly,
    /// Whether `w_{count-1}^j` appears in the unreduced component.
    pub pure_power_present: bool,
    /// `C(2^{gamma(d, c)} - d - 1, 2^{gamma(d)} - d - 1) mod 2` for skew factors with `c >= 4`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lucas_coefficient: Option<u8>,
    #[serde(skip)]
    pub component: Gf2Poly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Problem {
    Regular { d: u64, k: u64 },
    Skew { d: u64, l: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub problem: Problem,
    pub verdict: Verdict,
    /// Degree of the dual class whose non-vanishing is certified.
    pub degree: u64,
    /// One factor per summand of the binary expansion, ascending.
    pub witness: Vec<Gf2Poly>,
    pub trace: Vec<FactorCertificate>,
}

impl Certificate {
    fn from_factors(problem: Problem, degree: u64, trace: Vec<FactorCertificate>) -> Self {
        let verdict = Verdict::all(trace.iter().map(|f| f.certified));
        debug_assert_eq!(trace.iter().map(|f| f.degree).sum::<u64>(), degree);
        Self {
            problem,
            verdict,
            degree,
            witness: trace.iter().map(|f| f.witness.clone()).collect(),
            trace,
        }
    }

    /// Formal cross product of the per-factor witnesses, e.g. `w1 x w3^2`.
    pub fn witness_string(&self) -> String {
        render_cross(&self.witness)
    }
}

fn render_cross(factors: &[Gf2Poly]) -> String {
    factors
        .iter()
        .map(|p| {
            if p.len() > 1 {
                format!("({p})")
            } else {
                p.to_string()
            }
        })
        .collect::<Vec<_>>()
        .join(" x ")
}

fn trivial_factor(count: u64, multiplicity: u64) -> FactorCertificate {
    let n = count.saturating_sub(1) as usize;
    FactorCertificate {
        count,
        case: FactorCase::Trivial,
        multiplicity,
        degree: 0,
        exponent: 0,
        certified: true,
        witness: Gf2Poly::one(n),
        pure_power_present: true,
        lucas_coefficient: None,
        component: Gf2Poly::one(n),
    }
}

/// Extracts the degree-`(c-1)j` component of the dual class and runs the
/// pure-power detector on it.
fn certify_component(
    model: &QuotientModel,
    query: ClassQuery,
    exponent: u64,
    case: FactorCase,
    limits: &Limits,
) -> Result<FactorCertificate, ClassError> {
    let component = query.dual(limits)?.graded_component(query.target_degree);
    let pure = model.top_generator_power(exponent);
    let certified = model.detect_pure_power(&component, exponent)?;
    let witness = if certified {
        Gf2Poly::from_monomial(pure.clone())
    } else {
        let lifted = component.mul_monomial(&model.top_generator_power(model.d() - 1 - exponent))?;
        model.reduce(&lifted)?
    };
    Ok(FactorCertificate {
        count: query.count,
        case,
        multiplicity: query.effective_multiplicity(),
        degree: query.target_degree,
        exponent,
        certified,
        witness,
        pure_power_present: component.contains(&pure),
        lucas_coefficient: None,
        component,
    })
}

fn regular_factor(d: u64, count: u64, limits: &Limits) -> Result<FactorCertificate, ClassError> {
    if count == 1 || d == 1 {
        return Ok(trivial_factor(count, 1));
    }
    let model = QuotientModel::new(d, count)?;
    let query = ClassQuery {
        d,
        count,
        multiplicity: 1,
        target_degree: model.top_degree(),
    };
    certify_component(&model, query, d - 1, FactorCase::TopDegree, limits)
}

/// Certifies that `wbar_{(d-1)(k - alpha(k))}(xi_{R^d, k})` does not vanish.
pub fn certify_regular(d: u64, k: u64) -> Result<Certificate, ClassError> {
    certify_regular_with(d, k, &Limits::default())
}

pub fn certify_regular_with(d: u64, k: u64, limits: &Limits) -> Result<Certificate, ClassError> {
    require("d", d, 1)?;
    let profile = DyadicProfile::new(k)?;
    let parts: Vec<u64> = profile.parts().collect();
    let trace = parts
        .par_iter()
        .map(|&c| regular_factor(d, c, limits))
        .collect::<Result<Vec<_>, _>>()?;
    let degree = (d - 1) * (k - u64::from(profile.alpha));
    Ok(Certificate::from_factors(Problem::Regular { d, k }, degree, trace))
}

/// `2^{gamma(d)} - d - 1`, the per-generator exponent of the skew class.
pub fn skew_exponent(d: u64) -> Result<u64, ClassError> {
    let g = dyadic::gamma(d)?;
    Ok((1u64 << g) - d - 1)
}

fn skew_factor(d: u64, count: u64, limits: &Limits) -> Result<FactorCertificate, ClassError> {
    if count == 1 || d == 1 {
        return Ok(trivial_factor(count, d + 1));
    }
    let exponent = skew_exponent(d)?;
    let lucas = if count >= 4 {
        let g2 = dyadic::gamma2(d, count)?;
        Some(dyadic::binom_mod2((1u64 << g2) - d - 1, exponent))
    } else {
        None
    };
    let (model, case) = if d == 2 {
        (QuotientModel::new(d, count)?, FactorCase::PlaneTriviality)
    } else if count == 2 {
        (QuotientModel::projective(d)?, FactorCase::Projective)
    } else {
        (QuotientModel::new(d, count)?, FactorCase::PowerOfTwo)
    };
    let query = ClassQuery {
        d,
        count,
        multiplicity: d + 1,
        target_degree: (count - 1) * exponent,
    };
    let mut f = certify_component(&model, query, exponent, case, limits)?;
    f.lucas_coefficient = lucas;
    Ok(f)
}

/// Certifies that `wbar_{(2^{gamma(d)} - d - 1)(l - alpha(l))}((d+1) xi_{R^d, l})`
/// does not vanish.
pub fn certify_skew(d: u64, l: u64) -> Result<Certificate, ClassError> {
    certify_skew_with(d, l, &Limits::default())
}

pub fn certify_skew_with(d: u64, l: u64, limits: &Limits) -> Result<Certificate, ClassError> {
    require("d", d, 1)?;
    let profile = DyadicProfile::new(l)?;
    let parts: Vec<u64> = profile.parts().collect();
    let trace = parts
        .par_iter()
        .map(|&c| skew_factor(d, c, limits))
        .collect::<Result<Vec<_>, _>>()?;
    let degree = skew_exponent(d)? * (l - u64::from(profile.alpha));
    Ok(Certificate::from_factors(Problem::Skew { d, l }, degree, trace))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RegularSkewCertificate {
    pub d: u64,
    pub k: u64,
    pub l: u64,
    pub verdict: Verdict,
    /// `(d-1)(k - alpha(k))`
    pub r: u64,
    /// `(2^{gamma(d)} - d - 1)(l - alpha(l))`
    pub s: u64,
    pub witness: Vec<Gf2Poly>,
    pub regular: Certificate,
    pub skew: Certificate,
}

impl RegularSkewCertificate {
    pub fn witness_string(&self) -> String {
        render_cross(&self.witness)
    }
}

pub fn certify_regular_skew(d: u64, k: u64, l: u64) -> Result<RegularSkewCertificate, ClassError> {
    certify_regular_skew_with(d, k, l, &Limits::default())
}

pub fn certify_regular_skew_with(
    d: u64,
    k: u64,
    l: u64,
    limits: &Limits,
) -> Result<RegularSkewCertificate, ClassError> {
    let (regular, skew) = rayon::join(
        || certify_regular_with(d, k, limits),
        || certify_skew_with(d, l, limits),
    );
    let (regular, skew) = (regular?, skew?);
    let verdict = Verdict::all([regular.verdict.is_certified(), skew.verdict.is_certified()]);
    let witness = regular
        .witness
        .iter()
        .chain(skew.witness.iter())
        .cloned()
        .collect();
    Ok(RegularSkewCertificate {
        d,
        k,
        l,
        verdict,
        r: regular.degree,
        s: skew.degree,
        witness,
        regular,
        skew,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuditEntry {
    /// `(j_1, ..., j_{k-1})`
    pub exponents: Vec<u64>,
    /// Multinomial coefficient `C(j_1 + ... + j_{k-1}; j_1, ..., j_{k-1}) mod 2`.
    pub parity: u8,
    /// True when only generators of degree `k - 2^s` occur, the degrees of
    /// the Dickson invariants.
    pub dickson_supported: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChisholmAudit {
    pub d: u64,
    pub k: u64,
    pub entries: Vec<AuditEntry>,
}

impl ChisholmAudit {
    pub fn all_even(&self) -> bool {
        self.entries.iter().all(|e| e.parity == 0)
    }

    pub fn odd_entries(&self) -> impl Iterator<Item = &AuditEntry> {
        self.entries.iter().filter(|e| e.parity == 1)
    }

    /// The same check restricted to monomials in the Dickson-degree generators.
    pub fn dickson_supported_all_even(&self) -> bool {
        self.entries
            .iter()
            .filter(|e| e.dickson_supported)
            .all(|e| e.parity == 0)
    }
}

/// Enumerates every exponent vector of weighted degree `(d-1)(k-1)` with
/// `j_{k-1} <= d - 2`, together with the parity of its multinomial
/// coefficient in the expansion of the dual class.
pub fn chisholm_coefficient_audit(d: u64, k: u64) -> Result<ChisholmAudit, ClassError> {
    if d < 2 || !d.is_power_of_two() {
        return Err(ClassError::NotPowerOfTwo(d));
    }
    if k < 2 || !k.is_power_of_two() {
        return Err(ClassError::NotPowerOfTwo(k));
    }
    let n = (k - 1) as usize;
    let target = (d - 1) * (k - 1);
    let mut entries = Vec::new();
    let mut current = vec![0u64; n];
    enumerate_partitions(n, target, d - 2, &mut current, &mut entries, k);
    entries.sort_by(|a, b| a.exponents.cmp(&b.exponents));
    Ok(ChisholmAudit { d, k, entries })
}

fn is_dickson_degree(i: u64, k: u64) -> bool {
    (k - i).is_power_of_two()
}

fn enumerate_partitions(
    index: usize,
    remaining: u64,
    last_cap: u64,
    current: &mut Vec<u64>,
    out: &mut Vec<AuditEntry>,
    k: u64,
) {
    // fills generator `index` (1-based), then recurses downwards
    if index == 0 {
        if remaining == 0 {
            let dickson_supported = current
                .iter()
                .enumerate()
                .all(|(i, &e)| e == 0 || is_dickson_degree(i as u64 + 1, k));
            out.push(AuditEntry {
                exponents: current.clone(),
                parity: dyadic::multinom_mod2(current),
                dickson_supported,
            });
        }
        return;
    }
    let weight = index as u64;
    let mut max = remaining / weight;
    if index == current.len() {
        max = max.min(last_cap);
    }
    for e in 0..=max {
        current[index - 1] = e;
        enumerate_partitions(index - 1, remaining - e * weight, last_cap, current, out, k);
    }
    current[index - 1] = 0;
}

/// The pure power `w_{c-1}^j` used by the certificates, exposed for callers
/// that want to compare witnesses.
pub fn pure_power(count: u64, j: u64) -> Gf2Poly {
    let n = (count - 1) as usize;
    Gf2Poly::from_monomial(Monomial::generator_power(n, n, j as u16))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: usize, s: &str) -> Gf2Poly {
        Gf2Poly::parse(n, s).unwrap()
    }

    #[test]
    fn total_class_examples() {
        assert_eq!(total_class(3, 2, 1, 2).unwrap(), p(1, "1 + w1"));
        assert_eq!(total_class(2, 4, 3, 3).unwrap(), p(3, "1 + w1 + w2 + w3"));
        assert_eq!(total_class(5, 8, 0, 10).unwrap(), Gf2Poly::one(7));
        assert_eq!(total_class(3, 6, 1, 2), Err(ClassError::NotPowerOfTwo(6)));
    }

    #[test]
    fn dual_class_examples() {
        assert_eq!(dual_class(3, 2, 1, 2).unwrap(), p(1, "1 + w1 + w1^2"));
        assert_eq!(dual_class(2, 2, 1, 1).unwrap(), p(1, "1 + w1"));
        for d in 2..40u64 {
            let e = skew_exponent(d).unwrap();
            let expected = Gf2Poly::from_monomials(
                1,
                (0..=e.min(d - 1))
                    .filter(|&i| dyadic::binom_mod2(e, i) == 1)
                    .map(|i| Monomial::new(vec![i as u16])),
            );
            let dual = dual_class(d, 2, d + 1, d - 1).unwrap();
            if d == 2 {
                // multiplicity 3 acts as 1 in the plane
                assert_eq!(dual, p(1, "1 + w1"));
            } else {
                assert_eq!(dual, expected, "d={d}");
            }
        }
    }

    #[test]
    fn complement_route_agrees() {
        let limits = Limits::default();
        for d in 2..6 {
            for count in [2u64, 4, 8] {
                for multiplicity in 0..7 {
                    let q = ClassQuery {
                        d,
                        count,
                        multiplicity,
                        target_degree: (d - 1) * (count - 1),
                    };
                    assert_eq!(q.dual(&limits).unwrap(), q.dual_by_complement(&limits).unwrap());
                }
            }
        }
    }

    #[test]
    fn certify_regular_examples() {
        let c = certify_regular(2, 2).unwrap();
        assert!(c.verdict.is_certified());
        assert_eq!(c.witness_string(), "w1");

        let c = certify_regular(4, 4).unwrap();
        assert!(c.verdict.is_certified());
        assert_eq!(c.witness_string(), "w3^3");
        assert_eq!(c.degree, 9);

        let c = certify_regular(3, 6).unwrap();
        assert!(c.verdict.is_certified());
        let counts: Vec<u64> = c.trace.iter().map(|f| f.count).collect();
        assert_eq!(counts, vec![2, 4]);
        assert_eq!(c.degree, 2 * 4);
        assert_eq!(c.witness_string(), "w1^2 x w3^2");
    }

    #[test]
    fn certify_skew_examples() {
        let c = certify_skew(2, 2).unwrap();
        assert!(c.verdict.is_certified());
        assert_eq!(c.witness_string(), "w1");
        assert_eq!(c.trace[0].case, FactorCase::PlaneTriviality);

        let c = certify_skew(4, 2).unwrap();
        assert!(c.verdict.is_certified());
        assert_eq!(c.witness_string(), "w1^3");
        assert_eq!(c.trace[0].case, FactorCase::Projective);
        assert_eq!(c.trace[0].component, p(1, "w1^3"));

        let c = certify_skew(3, 4).unwrap();
        assert!(c.verdict.is_certified());
        assert_eq!(c.trace[0].lucas_coefficient, Some(1));
        assert_eq!(c.trace[0].case, FactorCase::PowerOfTwo);

        for (d, l) in [(1, 5), (4, 1)] {
            let c = certify_skew(d, l).unwrap();
            assert!(c.verdict.is_certified());
            assert!(c.witness.iter().all(Gf2Poly::is_one));
        }
    }

    #[test]
    fn certify_regular_skew_examples() {
        let c = certify_regular_skew(2, 2, 2).unwrap();
        assert!(c.verdict.is_certified());
        assert_eq!((c.r, c.s), (1, 1));

        let c = certify_regular_skew(4, 4, 2).unwrap();
        assert!(c.verdict.is_certified());
        assert_eq!((c.r, c.s), (9, 3));

        let c = certify_regular_skew(3, 3, 3).unwrap();
        assert!(c.verdict.is_certified());
        assert_eq!((c.r, c.s), (2, 0));
        assert!(c.skew.witness.iter().all(Gf2Poly::is_one));
    }

    #[test]
    fn audit_enumeration() {
        let a = chisholm_coefficient_audit(2, 2).unwrap();
        assert!(a.entries.is_empty());
        assert!(a.all_even());

        // degree 3 over w1, w2 with w3 forbidden: w1^3 and w1*w2
        let a = chisholm_coefficient_audit(2, 4).unwrap();
        let exps: Vec<_> = a.entries.iter().map(|e| e.exponents.clone()).collect();
        assert_eq!(exps, vec![vec![1, 1, 0], vec![3, 0, 0]]);
        assert_eq!(a.entries[0].parity, 0);
        assert_eq!(a.entries[1].parity, 1);
        assert!(a.dickson_supported_all_even());

        assert!(chisholm_coefficient_audit(3, 4).is_err());
        assert!(chisholm_coefficient_audit(4, 6).is_err());
    }

    #[test]
    fn two_times_plane_bundle_is_trivial() {
        let limits = Limits::default();
        for count in [2u64, 4, 8] {
            for m in 0..6 {
                let q = ClassQuery {
                    d: 2,
                    count,
                    multiplicity: m,
                    target_degree: count - 1,
                };
                let reduced = ClassQuery {
                    multiplicity: m % 2,
                    ..q
                };
                assert_eq!(q.total(&limits).unwrap(), reduced.total(&limits).unwrap());
                assert_eq!(q.dual(&limits).unwrap(), reduced.dual(&limits).unwrap());
            }
        }
    }
}
