use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::AlgError;

/// Coefficient ring for homology: the integers, the rationals, or the
/// integers with a finite set of primes inverted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "primes")]
pub enum CoeffRing {
    Integers,
    Rationals,
    IntegersInverted(Vec<u64>),
}

impl CoeffRing {
    /// Builds `Z[1/S]`, sorting and deduplicating `S`. Every entry must be prime.
    pub fn inverted<I: IntoIterator<Item = u64>>(primes: I) -> Result<Self, AlgError> {
        let mut ps: Vec<u64> = primes.into_iter().collect();
        ps.sort_unstable();
        ps.dedup();
        if ps.is_empty() {
            return Err(AlgError::InvalidCoeffs("inverted prime set is empty".into()));
        }
        if let Some(p) = ps.iter().find(|p| !is_prime(**p)) {
            return Err(AlgError::InvalidCoeffs(format!("{p} is not prime")));
        }
        Ok(CoeffRing::IntegersInverted(ps))
    }

    /// Inverts the primes dividing `n`; `n = 1` gives back the integers.
    pub fn inverting_divisors_of(n: u64) -> Self {
        let ps = prime_factors_u64(n);
        if ps.is_empty() {
            CoeffRing::Integers
        } else {
            CoeffRing::IntegersInverted(ps)
        }
    }

    pub fn is_field(&self) -> bool {
        matches!(self, CoeffRing::Rationals)
    }

    /// Whether the integer `n != 0` is a unit in this ring.
    pub fn is_unit(&self, n: &BigInt) -> bool {
        if n.is_zero() {
            return false;
        }
        match self {
            CoeffRing::Rationals => true,
            CoeffRing::Integers => n.abs().is_one(),
            CoeffRing::IntegersInverted(ps) => strip_primes(n, ps).is_one(),
        }
    }

    /// The part of `|n|` that survives localization (1 means `n` became a unit).
    /// Over the rationals every nonzero integer is a unit.
    pub fn non_unit_part(&self, n: &BigInt) -> BigInt {
        match self {
            CoeffRing::Rationals => {
                if n.is_zero() {
                    BigInt::zero()
                } else {
                    BigInt::one()
                }
            }
            CoeffRing::Integers => n.abs(),
            CoeffRing::IntegersInverted(ps) => strip_primes(n, ps),
        }
    }

    pub fn inverted_primes(&self) -> &[u64] {
        match self {
            CoeffRing::IntegersInverted(ps) => ps,
            _ => &[],
        }
    }

    /// The smallest ring of this family containing both.
    pub fn join(&self, other: &CoeffRing) -> CoeffRing {
        if self.is_field() || other.is_field() {
            return CoeffRing::Rationals;
        }
        let mut ps: Vec<u64> = self.inverted_primes().to_vec();
        ps.extend_from_slice(other.inverted_primes());
        ps.sort_unstable();
        ps.dedup();
        if ps.is_empty() {
            CoeffRing::Integers
        } else {
            CoeffRing::IntegersInverted(ps)
        }
    }

    pub(crate) fn validate(&self) -> Result<(), AlgError> {
        if let CoeffRing::IntegersInverted(ps) = self {
            let again = CoeffRing::inverted(ps.iter().copied())?;
            if &again != self {
                return Err(AlgError::InvalidCoeffs("inverted primes must be sorted and distinct".into()));
            }
        }
        Ok(())
    }
}

impl fmt::Display for CoeffRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoeffRing::Integers => write!(f, "Z"),
            CoeffRing::Rationals => write!(f, "Q"),
            CoeffRing::IntegersInverted(ps) => {
                let list: Vec<String> = ps.iter().map(|p| p.to_string()).collect();
                write!(f, "Z[1/{}]", list.join(","))
            }
        }
    }
}

impl FromStr for CoeffRing {
    type Err = AlgError;

    /// Accepts `Z`, `Q`, `Z[1/2]`, `Z[1/2,3]` and `Z[1/6]` (primes of 6).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        match t {
            "Z" | "z" => return Ok(CoeffRing::Integers),
            "Q" | "q" => return Ok(CoeffRing::Rationals),
            _ => {}
        }
        let inner = t
            .strip_prefix("Z[1/")
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(|| AlgError::InvalidCoeffs(format!("unrecognised coefficient ring `{s}`")))?;
        let mut primes = Vec::new();
        for part in inner.split(',') {
            let n: u64 = part
                .trim()
                .parse()
                .map_err(|_| AlgError::InvalidCoeffs(format!("bad integer `{part}` in `{s}`")))?;
            if n < 2 {
                return Err(AlgError::InvalidCoeffs(format!("cannot invert {n}")));
            }
            primes.extend(prime_factors_u64(n));
        }
        CoeffRing::inverted(primes)
    }
}

pub(crate) fn strip_primes(n: &BigInt, primes: &[u64]) -> BigInt {
    let mut m = n.abs();
    for &p in primes {
        let bp = BigInt::from(p);
        while !m.is_zero() && (&m % &bp).is_zero() {
            m /= &bp;
        }
    }
    m
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Distinct prime factors in increasing order.
pub fn prime_factors_u64(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Distinct prime factors of a big integer. Only used on small invariant
/// factors and colimit multipliers, so trial division is fine.
pub fn prime_factors(n: &BigInt) -> Vec<u64> {
    if let Some(v) = n.abs().to_u64() {
        return prime_factors_u64(v);
    }
    let mut m = n.abs();
    let mut out = Vec::new();
    let mut d = 2u64;
    loop {
        let bd = BigInt::from(d);
        if &bd * &bd > m {
            break;
        }
        if m.is_multiple_of(&bd) {
            out.push(d);
            while m.is_multiple_of(&bd) {
                m /= &bd;
            }
        }
        d += 1;
    }
    if m > BigInt::one() {
        out.push(m.to_u64().expect("prime cofactor exceeds u64"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_rings() {
        assert_eq!("Z".parse::<CoeffRing>().unwrap(), CoeffRing::Integers);
        assert_eq!("Q".parse::<CoeffRing>().unwrap(), CoeffRing::Rationals);
        assert_eq!("Z[1/6]".parse::<CoeffRing>().unwrap(), CoeffRing::IntegersInverted(vec![2, 3]));
        assert_eq!("Z[1/3,2]".parse::<CoeffRing>().unwrap(), CoeffRing::IntegersInverted(vec![2, 3]));
        assert!("Z[1/1]".parse::<CoeffRing>().is_err());
        assert!("R".parse::<CoeffRing>().is_err());
    }

    #[test]
    fn units() {
        let r = CoeffRing::IntegersInverted(vec![2]);
        assert!(r.is_unit(&BigInt::from(8)));
        assert!(!r.is_unit(&BigInt::from(6)));
        assert_eq!(r.non_unit_part(&BigInt::from(12)), BigInt::from(3));
        assert!(CoeffRing::inverted(vec![]).is_err());
        assert!(CoeffRing::inverted(vec![4]).is_err());
    }

    #[test]
    fn factors() {
        assert_eq!(prime_factors_u64(360), vec![2, 3, 5]);
        assert_eq!(prime_factors(&BigInt::from(97)), vec![97]);
        assert!(prime_factors_u64(1).is_empty());
    }
}
