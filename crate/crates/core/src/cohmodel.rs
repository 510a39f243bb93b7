//! Vanishing-relation model of the mod-2 cohomology of the unordered
//! configuration space `F(R^d, k)/S_k`, for `k` a power of two.
//!
//! The model is a sound filter, not a presentation of the ring. A monomial in
//! `w_1, ..., w_{k-1}` is declared zero when one of three relations applies:
//!
//! * **R1**: its weighted degree exceeds `(d-1)(k-1)`;
//! * **R2**: it avoids `w_{k-1}` and has degree at least `(d-1)(k-1)`;
//! * **R3**: it contains `w_{k-1}^j` with `1 <= j <= d-2` and has degree at
//!   least `(d-1)(k-1)`.
//!
//! Anything else is a formal survivor. Non-vanishing is only ever asserted
//! through [`QuotientModel::detect_pure_power`], which multiplies up to the top
//! degree where `w_{k-1}^{d-1}` is the only surviving monomial and is known
//! to be nonzero.

use serde::Serialize;
use thiserror::Error;

use crate::gf2poly::{Gf2Poly, Monomial, PolyError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("d must be at least 2, got {0}")]
    DimensionTooSmall(u64),
    #[error("k must be a power of two with k >= 2, got {0}")]
    NotPowerOfTwo(u64),
    #[error("polynomial has {found} generators, model has {expected}")]
    GeneratorMismatch { expected: usize, found: usize },
    #[error("pure-power exponent {j} exceeds d-1 = {max}")]
    ExponentOutOfRange { j: u64, max: u64 },
    #[error("monomial {monomial} has degree {found}, expected (k-1)j = {expected}")]
    DegreeMismatch {
        monomial: String,
        found: u64,
        expected: u64,
    },
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct QuotientModel {
    d: u64,
    k: u64,
    top_degree: u64,
}

impl QuotientModel {
    pub fn new(d: u64, k: u64) -> Result<Self, ModelError> {
        if d < 2 {
            return Err(ModelError::DimensionTooSmall(d));
        }
        if k < 2 || !k.is_power_of_two() {
            return Err(ModelError::NotPowerOfTwo(k));
        }
        Ok(Self {
            d,
            k,
            top_degree: (d - 1) * (k - 1),
        })
    }

    /// The two-point model, checked to coincide with `F_2[w_1]/(w_1^d)`,
    /// the cohomology of `RP^{d-1}`.
    pub fn projective(d: u64) -> Result<Self, ModelError> {
        let model = Self::new(d, 2)?;
        for e in 0..=2 * d {
            let m = Monomial::generator_power(1, 1, e as u16);
            assert_eq!(
                model.vanishes_unchecked(&m),
                e >= d,
                "two-point model disagrees with the projective truncation at w1^{e}"
            );
        }
        Ok(model)
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn top_degree(&self) -> u64 {
        self.top_degree
    }

    pub fn num_generators(&self) -> usize {
        (self.k - 1) as usize
    }

    /// `w_{k-1}^j`.
    pub fn top_generator_power(&self, j: u64) -> Monomial {
        let j = u16::try_from(j).expect("exponent fits in 16 bits");
        Monomial::generator_power(self.num_generators(), self.num_generators(), j)
    }

    fn check_arity(&self, found: usize) -> Result<(), ModelError> {
        if found != self.num_generators() {
            Err(ModelError::GeneratorMismatch {
                expected: self.num_generators(),
                found,
            })
        } else {
            Ok(())
        }
    }

    pub fn vanishes(&self, mono: &Monomial) -> Result<bool, ModelError> {
        self.check_arity(mono.num_generators())?;
        Ok(self.vanishes_unchecked(mono))
    }

    fn vanishes_unchecked(&self, mono: &Monomial) -> bool {
        let degree = mono.degree();
        if degree > self.top_degree {
            return true;
        }
        if degree < self.top_degree {
            return false;
        }
        let last = u64::from(mono.exponent(self.num_generators()));
        let r2 = last == 0 && !(mono.is_unit() && self.top_degree == 0);
        let r3 = (1..=self.d.saturating_sub(2)).contains(&last);
        r2 || r3
    }

    /// Deletes every vanishing monomial.
    pub fn reduce(&self, p: &Gf2Poly) -> Result<Gf2Poly, ModelError> {
        self.check_arity(p.num_generators())?;
        Ok(Gf2Poly::from_monomials(
            p.num_generators(),
            p.terms()
                .filter(|m| !self.vanishes_unchecked(m))
                .cloned(),
        ))
    }

    /// True iff `p * w_{k-1}^{d-1-j}` reduces to exactly `w_{k-1}^{d-1}`, which
    /// certifies that `p` is a nonzero class equal to `w_{k-1}^j`.
    ///
    /// Every monomial of `p` must have degree `(k-1) j`.
    pub fn detect_pure_power(&self, p: &Gf2Poly, j: u64) -> Result<bool, ModelError> {
        self.check_arity(p.num_generators())?;
        if j > self.d - 1 {
            return Err(ModelError::ExponentOutOfRange { j, max: self.d - 1 });
        }
        let expected = (self.k - 1) * j;
        if let Some(bad) = p.terms().find(|m| m.degree() != expected) {
            return Err(ModelError::DegreeMismatch {
                monomial: bad.to_string(),
                found: bad.degree(),
                expected,
            });
        }
        let lifted = p.mul_monomial(&self.top_generator_power(self.d - 1 - j))?;
        let reduced = self.reduce(&lifted)?;
        Ok(reduced == Gf2Poly::from_monomial(self.top_generator_power(self.d - 1)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mono(e: &[u16]) -> Monomial {
        Monomial::new(e.to_vec())
    }

    #[test]
    fn rejects_degenerate_parameters() {
        assert_eq!(QuotientModel::new(1, 4), Err(ModelError::DimensionTooSmall(1)));
        assert_eq!(QuotientModel::new(3, 1), Err(ModelError::NotPowerOfTwo(1)));
        assert_eq!(QuotientModel::new(3, 6), Err(ModelError::NotPowerOfTwo(6)));
        assert_eq!(QuotientModel::new(4, 8).unwrap().top_degree(), 21);
    }

    #[test]
    fn vanishing_examples() {
        for d in 2..6 {
            for k in [2u64, 4, 8] {
                let model = QuotientModel::new(d, k).unwrap();
                let pure = model.top_generator_power(d - 1);
                assert!(!model.vanishes(&pure).unwrap());
                let n = model.num_generators();
                let w1 = Monomial::generator_power(n, 1, model.top_degree() as u16);
                // for k = 2, w1 is the top generator and this is w1^{d-1} again
                assert_eq!(model.vanishes(&w1).unwrap(), k != 2);
                assert!(!model.vanishes(&Monomial::unit(n)).unwrap());
            }
        }
        let model = QuotientModel::new(4, 4).unwrap();
        assert!(model.vanishes(&mono(&[2, 2, 2])).unwrap());
        assert!(model.vanishes(&mono(&[1, 1])).is_err());
    }

    #[test]
    fn r3_range_is_literal() {
        // d = 2: 1 <= j <= 0 is empty, only R1 and R2 act.
        let model = QuotientModel::new(2, 4).unwrap();
        assert!(!model.vanishes(&mono(&[0, 0, 1])).unwrap());
        assert!(model.vanishes(&mono(&[1, 1, 0])).unwrap());
        // d = 4, k = 4: degree 9 with w3^1 or w3^2 vanishes
        let model = QuotientModel::new(4, 4).unwrap();
        assert!(model.vanishes(&mono(&[0, 3, 1])).unwrap());
        assert!(model.vanishes(&mono(&[1, 1, 2])).unwrap());
        assert!(!model.vanishes(&mono(&[0, 0, 3])).unwrap());
        // below the top degree nothing vanishes
        assert!(!model.vanishes(&mono(&[0, 0, 2])).unwrap());
    }

    #[test]
    fn reduce_examples() {
        let model = QuotientModel::new(2, 4).unwrap();
        let p = Gf2Poly::parse(3, "w1^3 + w3 + w1*w2").unwrap();
        assert_eq!(model.reduce(&p).unwrap(), Gf2Poly::parse(3, "w3").unwrap());
        assert!(model.reduce(&Gf2Poly::zero(3)).unwrap().is_zero());

        let model = QuotientModel::new(3, 2).unwrap();
        let dual = Gf2Poly::parse(1, "1 + w1").unwrap().invert_series(2).unwrap();
        assert_eq!(
            model.reduce(&dual.graded_component(2)).unwrap(),
            Gf2Poly::parse(1, "w1^2").unwrap()
        );
        assert!(model.reduce(&Gf2Poly::zero(2)).is_err());
    }

    #[test]
    fn detect_examples() {
        let model = QuotientModel::new(3, 4).unwrap();
        for j in 0..3 {
            let p = Gf2Poly::from_monomial(model.top_generator_power(j));
            assert!(model.detect_pure_power(&p, j).unwrap());
        }
        assert!(!model.detect_pure_power(&Gf2Poly::zero(3), 1).unwrap());
        let p = Gf2Poly::parse(3, "w3 + w1*w2").unwrap();
        assert!(model.detect_pure_power(&p, 1).unwrap());
        let p = Gf2Poly::parse(3, "w1*w2").unwrap();
        assert!(!model.detect_pure_power(&p, 1).unwrap());
        assert!(matches!(
            model.detect_pure_power(&Gf2Poly::parse(3, "w1").unwrap(), 1),
            Err(ModelError::DegreeMismatch { .. })
        ));
        assert!(matches!(
            model.detect_pure_power(&Gf2Poly::zero(3), 3),
            Err(ModelError::ExponentOutOfRange { .. })
        ));
    }

    #[test]
    fn projective_constructor_agrees() {
        for d in 2..30 {
            let model = QuotientModel::projective(d).unwrap();
            assert_eq!(model.top_degree(), d - 1);
        }
    }
}
