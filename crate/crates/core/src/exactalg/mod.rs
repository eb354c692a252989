//! Exact linear algebra over the integers and their localizations.

mod coeff;
mod colimit;
mod compare;
mod complex;
mod matrix;
mod snf;

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use coeff::{is_prime, prime_factors, prime_factors_u64, CoeffRing};
pub use colimit::{colimit_identify, ColimitSequence, ColimitVerdict, PresentedGroup};
pub use compare::{graded_table_compare, CompareMode, CompareReport, Mismatch};
pub use complex::{ChainComplex, ChainMap, HomologyWithGenerators};
pub use matrix::IntMatrix;
pub(crate) use matrix::json_int;
pub use snf::{invariant_factors, rank, smith_normal_form, SmithForm};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgError {
    #[error("invalid coefficient ring: {0}")]
    InvalidCoeffs(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("boundary composite d_{degree} o d_{} is nonzero", degree + 1)]
    NotAComplex { degree: i64 },
    #[error("degree {degree} outside [{lo}, {hi}]")]
    DegreeOutOfRange { degree: i64, lo: i64, hi: i64 },
    #[error("stabilization window {window} needs at least {} terms, got {terms}", window + 1)]
    WindowTooLarge { window: usize, terms: usize },
    #[error("ill-defined map: {0}")]
    IllDefinedMap(String),
    #[error("incompatible degree ranges: {0}")]
    IncompatibleRanges(String),
    #[error("invalid group data: {0}")]
    InvalidGroup(String),
}

/// `R^rank ⊕ R/d_1 ⊕ ... ⊕ R/d_t` for `R` the given coefficient ring.
///
/// Over the rationals the torsion list is always empty; over `Z[1/S]`
/// no `d_i` has a prime factor in `S`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FgAbGroup {
    rank: usize,
    torsion: Vec<BigInt>,
    ring: CoeffRing,
}

impl FgAbGroup {
    pub fn zero(ring: CoeffRing) -> Self {
        FgAbGroup { rank: 0, torsion: Vec::new(), ring }
    }

    pub fn free(rank: usize, ring: CoeffRing) -> Self {
        FgAbGroup { rank, torsion: Vec::new(), ring }
    }

    /// Normalizes arbitrary cyclic orders (zeros count as free rank, units and
    /// ring units vanish) into an invariant-factor chain.
    pub fn from_cyclic_orders(rank: usize, orders: &[BigInt], ring: CoeffRing) -> Self {
        let mut rank = rank;
        let mut kept = Vec::new();
        for d in orders {
            if d.is_zero() {
                rank += 1;
                continue;
            }
            let d = ring.non_unit_part(d);
            if !d.is_one() {
                kept.push(d);
            }
        }
        FgAbGroup { rank, torsion: normalize_torsion(&kept), ring }
    }

    /// Validating constructor for data that claims to already be in normal form.
    pub fn new(rank: usize, torsion: Vec<BigInt>, ring: CoeffRing) -> Result<Self, AlgError> {
        ring.validate()?;
        for w in torsion.windows(2) {
            if !(&w[1] % &w[0]).is_zero() {
                return Err(AlgError::InvalidGroup(format!("{} does not divide {}", w[0], w[1])));
            }
        }
        for d in &torsion {
            if d < &BigInt::from(2) {
                return Err(AlgError::InvalidGroup(format!("torsion coefficient {d} < 2")));
            }
            if !ring.non_unit_part(d).eq(d) {
                return Err(AlgError::InvalidGroup(format!("torsion coefficient {d} is not coprime to {ring}")));
            }
        }
        Ok(FgAbGroup { rank, torsion, ring })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn torsion(&self) -> &[BigInt] {
        &self.torsion
    }

    pub fn ring(&self) -> &CoeffRing {
        &self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.rank == 0 && self.torsion.is_empty()
    }

    pub fn is_torsion(&self) -> bool {
        self.rank == 0
    }

    /// Order of the torsion subgroup.
    pub fn torsion_order(&self) -> BigInt {
        self.torsion.iter().product()
    }

    pub fn direct_sum(&self, other: &FgAbGroup) -> FgAbGroup {
        let ring = self.ring.join(&other.ring);
        let mut orders = self.torsion.clone();
        orders.extend(other.torsion.iter().cloned());
        FgAbGroup::from_cyclic_orders(self.rank + other.rank, &orders, ring)
    }
}

/// Base change `G ⊗ R`: rank kept, torsion coprime to the new units kept.
pub fn tensor_coeffs(g: &FgAbGroup, r: &CoeffRing) -> FgAbGroup {
    FgAbGroup::from_cyclic_orders(g.rank, &g.torsion, g.ring.join(r))
}

/// Invariant factors of `⊕ Z/d_i` (entries ≥ 2 in, chain out).
pub(crate) fn normalize_torsion(orders: &[BigInt]) -> Vec<BigInt> {
    let is_chain = orders.windows(2).all(|w| (&w[1] % &w[0]).is_zero());
    if is_chain {
        return orders.to_vec();
    }
    let n = orders.len();
    invariant_factors(&IntMatrix::diagonal(n, n, orders))
        .into_iter()
        .filter(|d| !d.is_one())
        .collect()
}

impl fmt::Display for FgAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        if self.rank == 1 {
            parts.push(self.ring.to_string());
        } else if self.rank > 1 {
            parts.push(format!("{}^{}", self.ring, self.rank));
        }
        let mut i = 0;
        while i < self.torsion.len() {
            let d = &self.torsion[i];
            let run = self.torsion[i..].iter().take_while(|x| *x == d).count();
            parts.push(if run == 1 { format!("Z/{d}") } else { format!("(Z/{d})^{run}") });
            i += run;
        }
        write!(f, "{}", parts.join(" + "))
    }
}

#[derive(Serialize, Deserialize)]
struct FgAbRepr {
    rank: usize,
    #[serde(with = "json_int::vec")]
    torsion: Vec<BigInt>,
    inverted_primes: Vec<u64>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    rational: bool,
}

impl Serialize for FgAbGroup {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        FgAbRepr {
            rank: self.rank,
            torsion: self.torsion.clone(),
            inverted_primes: self.ring.inverted_primes().to_vec(),
            rational: self.ring.is_field(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FgAbGroup {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let r = FgAbRepr::deserialize(d)?;
        let ring = if r.rational {
            CoeffRing::Rationals
        } else if r.inverted_primes.is_empty() {
            CoeffRing::Integers
        } else {
            CoeffRing::IntegersInverted(r.inverted_primes)
        };
        FgAbGroup::new(r.rank, r.torsion, ring).map_err(D::Error::custom)
    }
}

/// One cyclic or rank-one summand of a (possibly infinitely generated) group.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Summand {
    /// A copy of the ring: `Z`, `Q` or `Z[1/S]`.
    Free(CoeffRingKey),
    Cyclic(BigInt),
}

/// Orderable mirror of [`CoeffRing`] used inside [`Summand`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CoeffRingKey {
    Integers,
    Inverted(Vec<u64>),
    Rationals,
}

impl From<&CoeffRing> for CoeffRingKey {
    fn from(r: &CoeffRing) -> Self {
        match r {
            CoeffRing::Integers => CoeffRingKey::Integers,
            CoeffRing::Rationals => CoeffRingKey::Rationals,
            CoeffRing::IntegersInverted(ps) => CoeffRingKey::Inverted(ps.clone()),
        }
    }
}

impl From<&CoeffRingKey> for CoeffRing {
    fn from(k: &CoeffRingKey) -> Self {
        match k {
            CoeffRingKey::Integers => CoeffRing::Integers,
            CoeffRingKey::Rationals => CoeffRing::Rationals,
            CoeffRingKey::Inverted(ps) => CoeffRing::IntegersInverted(ps.clone()),
        }
    }
}

/// Finite direct sum of summands, kept in a canonical order: free summands
/// sorted by ring, then torsion as an invariant-factor chain. Colimits such as
/// `Z[1/2] ⊕ Z^m` live here because they are not finitely generated.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct DirectSum {
    summands: Vec<Summand>,
}

impl DirectSum {
    pub fn zero() -> Self {
        DirectSum::default()
    }

    pub fn new(summands: Vec<Summand>) -> Self {
        let mut free = Vec::new();
        let mut tors = Vec::new();
        for s in summands {
            match s {
                Summand::Free(r) => free.push(Summand::Free(r)),
                Summand::Cyclic(d) if d.is_zero() => free.push(Summand::Free(CoeffRingKey::Integers)),
                Summand::Cyclic(d) if d.is_one() => {}
                Summand::Cyclic(d) => tors.push(num_traits::Signed::abs(&d)),
            }
        }
        free.sort();
        free.extend(normalize_torsion(&tors).into_iter().map(Summand::Cyclic));
        DirectSum { summands: free }
    }

    pub fn summands(&self) -> &[Summand] {
        &self.summands
    }

    pub fn rational_rank(&self) -> usize {
        self.summands.iter().filter(|s| matches!(s, Summand::Free(_))).count()
    }

    pub fn torsion(&self) -> Vec<BigInt> {
        self.summands
            .iter()
            .filter_map(|s| match s {
                Summand::Cyclic(d) => Some(d.clone()),
                Summand::Free(_) => None,
            })
            .collect()
    }

    /// Free summands counted by ring.
    pub fn free_counts(&self) -> Vec<(CoeffRing, usize)> {
        let mut out: Vec<(CoeffRing, usize)> = Vec::new();
        for s in &self.summands {
            if let Summand::Free(k) = s {
                let r = CoeffRing::from(k);
                match out.last_mut() {
                    Some((last, n)) if *last == r => *n += 1,
                    _ => out.push((r, 1)),
                }
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.summands.is_empty()
    }

    pub fn plus(&self, other: &DirectSum) -> DirectSum {
        let mut v = self.summands.clone();
        v.extend(other.summands.iter().cloned());
        DirectSum::new(v)
    }

    pub fn tensor(&self, r: &CoeffRing) -> DirectSum {
        let v = self
            .summands
            .iter()
            .filter_map(|s| match s {
                Summand::Free(k) => Some(Summand::Free(CoeffRingKey::from(&CoeffRing::from(k).join(r)))),
                Summand::Cyclic(d) => {
                    let d = r.non_unit_part(d);
                    (!d.is_one()).then_some(Summand::Cyclic(d))
                }
            })
            .collect();
        DirectSum::new(v)
    }
}

impl From<&FgAbGroup> for DirectSum {
    fn from(g: &FgAbGroup) -> Self {
        let key = CoeffRingKey::from(&g.ring);
        let mut v: Vec<Summand> = (0..g.rank).map(|_| Summand::Free(key.clone())).collect();
        v.extend(g.torsion.iter().cloned().map(Summand::Cyclic));
        DirectSum::new(v)
    }
}

impl fmt::Display for DirectSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        for (r, n) in self.free_counts() {
            parts.push(if n == 1 { r.to_string() } else { format!("{r}^{n}") });
        }
        let tors = self.torsion();
        let mut i = 0;
        while i < tors.len() {
            let run = tors[i..].iter().take_while(|x| **x == tors[i]).count();
            parts.push(if run == 1 { format!("Z/{}", tors[i]) } else { format!("(Z/{})^{run}", tors[i]) });
            i += run;
        }
        write!(f, "{}", parts.join(" + "))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum SummandRepr {
    Free(CoeffRing),
    Cyclic(#[serde(with = "json_int")] BigInt),
}

impl Serialize for DirectSum {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<SummandRepr> = self
            .summands
            .iter()
            .map(|x| match x {
                Summand::Free(k) => SummandRepr::Free(CoeffRing::from(k)),
                Summand::Cyclic(d) => SummandRepr::Cyclic(d.clone()),
            })
            .collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for DirectSum {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Vec::<SummandRepr>::deserialize(d)?;
        Ok(DirectSum::new(
            v.into_iter()
                .map(|x| match x {
                    SummandRepr::Free(r) => Summand::Free(CoeffRingKey::from(&r)),
                    SummandRepr::Cyclic(d) => Summand::Cyclic(d),
                })
                .collect(),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn tensor_examples() {
        let g = FgAbGroup::from_cyclic_orders(1, &b(&[6]), CoeffRing::Integers);
        let h = tensor_coeffs(&g, &CoeffRing::IntegersInverted(vec![2]));
        assert_eq!(h.rank(), 1);
        assert_eq!(h.torsion(), b(&[3]).as_slice());
        assert_eq!(h.to_string(), "Z[1/2] + Z/3");

        let k = FgAbGroup::from_cyclic_orders(0, &b(&[2, 2]), CoeffRing::Integers);
        assert!(tensor_coeffs(&k, &CoeffRing::Rationals).is_zero());

        let m = FgAbGroup::from_cyclic_orders(0, &b(&[5, 5, 5]), CoeffRing::Integers);
        assert!(tensor_coeffs(&m, &CoeffRing::inverting_divisors_of(5)).is_zero());
    }

    #[test]
    fn normalizes_non_chains() {
        let g = FgAbGroup::from_cyclic_orders(0, &b(&[4, 6, 1, 0]), CoeffRing::Integers);
        assert_eq!(g.rank(), 1);
        assert_eq!(g.torsion(), b(&[2, 12]).as_slice());
        assert!(FgAbGroup::new(0, b(&[4, 6]), CoeffRing::Integers).is_err());
        assert!(FgAbGroup::new(0, b(&[2]), CoeffRing::IntegersInverted(vec![2])).is_err());
    }

    #[test]
    fn json_round_trip() {
        let g = FgAbGroup::from_cyclic_orders(2, &b(&[3]), CoeffRing::IntegersInverted(vec![2]));
        let s = serde_json::to_string(&g).unwrap();
        assert_eq!(s, r#"{"rank":2,"torsion":[3],"inverted_primes":[2]}"#);
        assert_eq!(serde_json::from_str::<FgAbGroup>(&s).unwrap(), g);
        let q = FgAbGroup::free(1, CoeffRing::Rationals);
        let back: FgAbGroup = serde_json::from_str(&serde_json::to_string(&q).unwrap()).unwrap();
        assert_eq!(back, q);
    }

    #[test]
    fn direct_sums() {
        let r = DirectSum::new(vec![
            Summand::Cyclic(BigInt::from(2)),
            Summand::Free(CoeffRingKey::Integers),
            Summand::Free(CoeffRingKey::Inverted(vec![2])),
            Summand::Cyclic(BigInt::from(3)),
        ]);
        assert_eq!(r.rational_rank(), 2);
        assert_eq!(r.torsion(), b(&[6]));
        assert_eq!(r.to_string(), "Z + Z[1/2] + Z/6");
        assert_eq!(r.tensor(&CoeffRing::Rationals).to_string(), "Q^2");
        let s: DirectSum = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
        assert_eq!(s, r);
    }
}
