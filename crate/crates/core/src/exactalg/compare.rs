use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{AlgError, DirectSum};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CompareMode {
    Exact,
    Rational,
    Z2GradedRational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mismatch {
    /// A degree, or `even` / `odd` in graded mode.
    pub at: String,
    pub left: String,
    pub right: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompareReport {
    pub mode: CompareMode,
    pub pass: bool,
    pub mismatches: Vec<Mismatch>,
}

/// Compares two degree-indexed tables. Missing degrees count as zero in the
/// rank-based modes; exact mode requires identical degree sets. The graded
/// mode sums ranks by the parity of `|degree|`.
pub fn graded_table_compare(
    a: &BTreeMap<i64, DirectSum>,
    b: &BTreeMap<i64, DirectSum>,
    mode: CompareMode,
) -> Result<CompareReport, AlgError> {
    let mut mismatches = Vec::new();
    match mode {
        CompareMode::Exact => {
            if a.keys().ne(b.keys()) {
                return Err(AlgError::IncompatibleRanges(format!(
                    "{:?} vs {:?}",
                    a.keys().collect::<Vec<_>>(),
                    b.keys().collect::<Vec<_>>()
                )));
            }
            for (n, g) in a {
                if &b[n] != g {
                    mismatches.push(Mismatch { at: n.to_string(), left: g.to_string(), right: b[n].to_string() });
                }
            }
        }
        CompareMode::Rational => {
            let degrees: std::collections::BTreeSet<i64> = a.keys().chain(b.keys()).copied().collect();
            for n in degrees {
                let ra = a.get(&n).map_or(0, DirectSum::rational_rank);
                let rb = b.get(&n).map_or(0, DirectSum::rational_rank);
                if ra != rb {
                    mismatches.push(Mismatch { at: n.to_string(), left: ra.to_string(), right: rb.to_string() });
                }
            }
        }
        CompareMode::Z2GradedRational => {
            let (ea, oa) = parity_ranks(a);
            let (eb, ob) = parity_ranks(b);
            if ea != eb {
                mismatches.push(Mismatch { at: "even".into(), left: ea.to_string(), right: eb.to_string() });
            }
            if oa != ob {
                mismatches.push(Mismatch { at: "odd".into(), left: oa.to_string(), right: ob.to_string() });
            }
        }
    }
    Ok(CompareReport { mode, pass: mismatches.is_empty(), mismatches })
}

/// Rational ranks summed over even and odd `|degree|`.
pub(crate) fn parity_ranks(t: &BTreeMap<i64, DirectSum>) -> (usize, usize) {
    let mut even = 0;
    let mut odd = 0;
    for (n, g) in t {
        if n.rem_euclid(2) == 0 {
            even += g.rational_rank();
        } else {
            odd += g.rational_rank();
        }
    }
    (even, odd)
}
