use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::PipelineError;
use crate::exactalg::{graded_table_compare, CoeffRing, CoeffRingKey, CompareMode, CompareReport, DirectSum, Summand};

/// Multiplicity of a free summand; only finite counts are accepted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ZCount {
    Finite(u64),
    Other(String),
}

/// `{"Z": a}`, `{"Zmod": d}` or `{"Zinv": [p, ...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub enum KSummand {
    Z(ZCount),
    Zmod(u64),
    Zinv(Vec<u64>),
}

/// K-groups as data, e.g. `{"K0": [{"Z": 1}, {"Zinv": [2]}], "K1": []}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KTheoryInput {
    #[serde(rename = "K0")]
    pub k0: Vec<KSummand>,
    #[serde(rename = "K1")]
    pub k1: Vec<KSummand>,
}

fn to_sum(v: &[KSummand], name: &str) -> Result<DirectSum, PipelineError> {
    let mut out = Vec::new();
    for (i, s) in v.iter().enumerate() {
        match s {
            KSummand::Z(ZCount::Finite(a)) => {
                out.extend((0..*a).map(|_| Summand::Free(CoeffRingKey::Integers)));
            }
            KSummand::Z(ZCount::Other(a)) => {
                return Err(PipelineError::Invalid(format!("{name}[{i}]: rank {a:?} is not a finite count")));
            }
            KSummand::Zmod(0) => return Err(PipelineError::Invalid(format!("{name}[{i}]: Zmod needs d >= 1"))),
            KSummand::Zmod(d) => out.push(Summand::Cyclic(BigInt::from(*d))),
            KSummand::Zinv(ps) => {
                let r = CoeffRing::inverted(ps.iter().copied()).map_err(|e| PipelineError::Invalid(format!("{name}[{i}]: {e}")))?;
                out.push(Summand::Free(CoeffRingKey::from(&r)));
            }
        }
    }
    Ok(DirectSum::new(out))
}

impl KTheoryInput {
    pub fn k0(&self) -> Result<DirectSum, PipelineError> {
        to_sum(&self.k0, "K0")
    }

    pub fn k1(&self) -> Result<DirectSum, PipelineError> {
        to_sum(&self.k1, "K1")
    }

    /// Replaces the symbolic count `"m"` by a computed value.
    pub fn with_m(&self, m: u64) -> KTheoryInput {
        let sub = |v: &[KSummand]| {
            v.iter()
                .map(|s| match s {
                    KSummand::Z(ZCount::Other(a)) if a == "m" => KSummand::Z(ZCount::Finite(m)),
                    other => other.clone(),
                })
                .collect()
        };
        KTheoryInput { k0: sub(&self.k0), k1: sub(&self.k1) }
    }

    /// `{0: K0, 1: K1}`.
    pub fn table(&self) -> Result<BTreeMap<i64, DirectSum>, PipelineError> {
        Ok(BTreeMap::from([(0, self.k0()?), (1, self.k1()?)]))
    }
}

/// Rational ranks of `K0`/`K1` against the even/odd homology ranks.
pub fn hk_compare(h: &BTreeMap<i64, DirectSum>, k: &KTheoryInput) -> Result<CompareReport, PipelineError> {
    Ok(graded_table_compare(h, &k.table()?, CompareMode::Z2GradedRational)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> KTheoryInput {
        serde_json::from_str(s).unwrap()
    }

    #[test]
    fn parses_and_counts() {
        let k = parse(r#"{"K0":[{"Z":1},{"Zmod":2},{"Zinv":[2]}],"K1":[]}"#);
        assert_eq!(k.k0().unwrap().rational_rank(), 2);
        assert!(k.k1().unwrap().is_zero());
        assert!(parse(r#"{"K0":[{"Z":"inf"}],"K1":[]}"#).k0().is_err());
        let sym = parse(r#"{"K0":[{"Zinv":[2]},{"Z":"m"}],"K1":[]}"#);
        assert!(sym.k0().is_err());
        assert_eq!(sym.with_m(2).k0().unwrap().rational_rank(), 3);
        assert!(serde_json::from_str::<KTheoryInput>(r#"{"K0":[{"Q":1}],"K1":[]}"#).is_err());
    }

    #[test]
    fn rational_comparison() {
        let r = DirectSum::new(vec![Summand::Free(CoeffRingKey::Inverted(vec![2]))]);
        let z = DirectSum::new(vec![Summand::Free(CoeffRingKey::Integers)]);
        let t2 = DirectSum::new(vec![Summand::Cyclic(BigInt::from(2))]);
        let h = BTreeMap::from([(0, r.plus(&z)), (1, t2.clone()), (2, DirectSum::zero()), (3, t2)]);
        let k = parse(r#"{"K0":[{"Zinv":[2]},{"Z":1}],"K1":[]}"#);
        assert!(hk_compare(&h, &k).unwrap().pass);
        let bad = parse(r#"{"K0":[{"Zinv":[2]}],"K1":[{"Z":1}]}"#);
        let rep = hk_compare(&h, &bad).unwrap();
        assert_eq!(rep.mismatches.len(), 2);
    }
}
