//! Dyadic digit counts, the `gamma` exponents and mod-2 binomial tests.
//!
//! Everything here is exact integer arithmetic. Floor-logarithms are taken
//! from the bit length, never from a floating-point `log2`.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DyadicError {
    #[error("{name} must be at least {min}, got {value}")]
    OutOfRange {
        name: &'static str,
        min: u64,
        value: u64,
    },
}

fn require(name: &'static str, value: u64, min: u64) -> Result<(), DyadicError> {
    if value < min {
        Err(DyadicError::OutOfRange { name, min, value })
    } else {
        Ok(())
    }
}

/// The binary expansion of a positive integer, `n = sum 2^powers[t]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DyadicProfile {
    pub n: u64,
    pub alpha: u32,
    /// Strictly ascending exponents.
    pub powers: Vec<u32>,
}

impl DyadicProfile {
    pub fn new(n: u64) -> Result<Self, DyadicError> {
        require("n", n, 1)?;
        let powers: Vec<u32> = (0..64).filter(|&r| n >> r & 1 == 1).collect();
        Ok(Self {
            n,
            alpha: n.count_ones(),
            powers,
        })
    }

    /// The 2-power summands `2^r`, ascending.
    pub fn parts(&self) -> impl Iterator<Item = u64> + '_ {
        self.powers.iter().map(|&r| 1u64 << r)
    }
}

/// Number of ones in the binary expansion of `k`.
pub fn alpha(k: u64) -> Result<u32, DyadicError> {
    require("k", k, 1)?;
    Ok(k.count_ones())
}

/// `floor(log2 d) + 1`, i.e. the bit length of `d`.
pub fn gamma(d: u64) -> Result<u32, DyadicError> {
    require("d", d, 1)?;
    Ok(bit_length(d))
}

/// Smallest `t` with `2^t > (d-1)(l-1)`.
pub fn gamma2(d: u64, l: u64) -> Result<u32, DyadicError> {
    require("d", d, 2)?;
    require("l", l, 2)?;
    let product = (d - 1)
        .checked_mul(l - 1)
        .expect("(d-1)(l-1) overflows u64");
    Ok(bit_length(product))
}

fn bit_length(n: u64) -> u32 {
    u64::BITS - n.leading_zeros()
}

/// `C(m, n) mod 2` by Lucas: odd iff the bits of `n` are a subset of the bits of `m`.
pub fn binom_mod2(m: u64, n: u64) -> u8 {
    if n > m {
        return 0;
    }
    u8::from(n & !m == 0)
}

/// Multinomial coefficient `(sum parts)! / prod(parts!)` reduced mod 2.
///
/// Odd exactly when the parts add without carries, i.e. their binary
/// representations are pairwise disjoint.
pub fn multinom_mod2(parts: &[u64]) -> u8 {
    let mut seen = 0u64;
    for &p in parts {
        if seen & p != 0 {
            return 0;
        }
        seen |= p;
    }
    1
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pascal_mod2(rows: usize) -> Vec<Vec<u8>> {
        let mut table: Vec<Vec<u8>> = Vec::with_capacity(rows + 1);
        for m in 0..=rows {
            let mut row = vec![0u8; m + 1];
            row[0] = 1;
            row[m] = 1;
            for n in 1..m {
                row[n] = table[m - 1][n - 1] ^ table[m - 1][n];
            }
            table.push(row);
        }
        table
    }

    fn multinomial_exact(parts: &[u64]) -> u128 {
        // product of nested binomials C(p1+..+pi, pi)
        let mut total = 0u64;
        let mut acc = 1u128;
        for &p in parts {
            total += p;
            let mut c = 1u128;
            for i in 0..p {
                c = c * u128::from(total - i) / u128::from(i + 1);
            }
            acc *= c;
        }
        acc
    }

    #[test]
    fn alpha_examples() {
        assert_eq!(alpha(1), Ok(1));
        assert_eq!(alpha(3), Ok(2));
        assert_eq!(alpha(4), Ok(1));
        assert_eq!(alpha(5), Ok(2));
        assert_eq!(alpha(7), Ok(3));
        assert!(alpha(0).is_err());
    }

    #[test]
    fn gamma_examples() {
        assert_eq!(gamma(1), Ok(1));
        assert_eq!(gamma(2), Ok(2));
        assert_eq!(gamma(3), Ok(2));
        assert_eq!(gamma(8), Ok(4));
        assert!(gamma(0).is_err());
        for r in 0..63 {
            assert_eq!(gamma(1 << r), Ok(r + 1));
        }
    }

    #[test]
    fn gamma2_examples() {
        assert_eq!(gamma2(3, 4), Ok(3));
        assert_eq!(gamma2(2, 2), Ok(1));
        assert_eq!(gamma2(5, 5), Ok(5));
        assert!(gamma2(1, 4).is_err());
        assert!(gamma2(4, 1).is_err());
        for d in 2..60 {
            for l in 2..60 {
                let t = gamma2(d, l).unwrap();
                let p = (d - 1) * (l - 1);
                assert!(1u64 << t > p && p >= 1u64 << (t - 1));
            }
        }
    }

    #[test]
    fn binom_matches_pascal_up_to_1024() {
        let table = pascal_mod2(1024);
        for (m, row) in table.iter().enumerate() {
            for (n, &c) in row.iter().enumerate() {
                assert_eq!(binom_mod2(m as u64, n as u64), c, "C({m},{n})");
            }
            assert_eq!(binom_mod2(m as u64, m as u64 + 1), 0);
        }
        assert_eq!(binom_mod2(5, 2), 0);
        // presentation coefficient for d=3, l=4: C(8-4, 4-4) = C(4, 0)
        let d = 3;
        let g2 = gamma2(d, 4).unwrap();
        let g = gamma(d).unwrap();
        assert_eq!(binom_mod2((1 << g2) - d - 1, (1 << g) - d - 1), 1);
    }

    #[test]
    fn multinom_examples() {
        assert_eq!(multinom_mod2(&[1, 2]), 1);
        assert_eq!(multinom_mod2(&[3, 1]), 0);
        assert_eq!(multinom_mod2(&[9, 0, 0, 0]), 1);
        assert_eq!(multinom_mod2(&[]), 1);
        assert_eq!(multinomial_exact(&[1, 2]), 3);
        assert_eq!(multinomial_exact(&[3, 1]), 4);
    }

    #[test]
    fn multinom_matches_exact_and_nested_binomials() {
        for a in 0..12u64 {
            for b in 0..12u64 {
                for c in 0..12u64 {
                    let parts = [a, b, c];
                    let exact = (multinomial_exact(&parts) % 2) as u8;
                    let nested = binom_mod2(a + b, b) & binom_mod2(a + b + c, c);
                    assert_eq!(multinom_mod2(&parts), exact);
                    assert_eq!(nested, exact);
                }
            }
        }
    }

    #[test]
    fn profile_invariants() {
        for n in 1..5000u64 {
            let p = DyadicProfile::new(n).unwrap();
            assert_eq!(p.alpha as usize, p.powers.len());
            assert_eq!(p.parts().sum::<u64>(), n);
            assert!(p.powers.windows(2).all(|w| w[0] < w[1]));
            assert!(p.alpha <= gamma(n).unwrap());
            for r in 0..5 {
                assert_eq!(alpha(n << r), alpha(n));
            }
        }
        assert_eq!(DyadicProfile::new(6).unwrap().powers, vec![1, 2]);
        assert!(DyadicProfile::new(0).is_err());
    }
}
