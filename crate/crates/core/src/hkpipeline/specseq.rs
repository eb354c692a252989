use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::PipelineError;

/// Field dimensions `E²_{p,q}`, zero entries omitted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct E2Page {
    #[serde(with = "entry_list")]
    pub entries: BTreeMap<(i64, i64), usize>,
}

impl E2Page {
    pub fn get(&self, p: i64, q: i64) -> usize {
        self.entries.get(&(p, q)).copied().unwrap_or(0)
    }

    /// Rows with a nonzero entry, in increasing `q`.
    pub fn rows(&self) -> Vec<i64> {
        let mut qs: Vec<i64> = self.entries.keys().map(|&(_, q)| q).collect();
        qs.sort_unstable();
        qs.dedup();
        qs
    }

    /// Row `q` as dimensions for `p = 0, 1, ...` up to the last nonzero entry.
    pub fn row(&self, q: i64) -> Vec<usize> {
        let top = self.entries.keys().filter(|k| k.1 == q).map(|k| k.0).max();
        match top {
            Some(top) => (0..=top).map(|p| self.get(p, q)).collect(),
            None => Vec::new(),
        }
    }

    /// Dimensions summed over even and odd total degree `p + q`.
    pub fn totals(&self) -> (usize, usize) {
        self.entries.iter().fold((0, 0), |(e, o), (&(p, q), &d)| {
            if (p + q).rem_euclid(2) == 0 {
                (e + d, o)
            } else {
                (e, o + d)
            }
        })
    }

    /// Totals on the next page after applying `d²` with the given ranks.
    pub fn totals_after(&self, ds: &[Differential]) -> (usize, usize) {
        let (e, o) = self.totals();
        // each rank-r differential removes r from both parities
        let r: usize = ds.iter().map(|d| d.rank).sum();
        (e.saturating_sub(r), o.saturating_sub(r))
    }
}

/// JSON objects cannot have pair keys, so entries go out as a list.
mod entry_list {
    use std::collections::BTreeMap;

    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Entry {
        p: i64,
        q: i64,
        dim: usize,
    }

    pub fn serialize<S: Serializer>(m: &BTreeMap<(i64, i64), usize>, s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<Entry> = m.iter().map(|(&(p, q), &dim)| Entry { p, q, dim }).collect();
        v.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<(i64, i64), usize>, D::Error> {
        let v = Vec::<Entry>::deserialize(d)?;
        Ok(v.into_iter().filter(|e| e.dim > 0).map(|e| ((e.p, e.q), e.dim)).collect())
    }
}

/// `E²_{p,q} = H_p(G, H^{-q})` from the homology dimensions of each
/// coefficient row (`rows[q][p]`, per unit of coefficient dimension) and the
/// coefficient dimensions `cohomology[q]`.
pub fn e2_page(rows: &BTreeMap<i64, Vec<usize>>, cohomology: &BTreeMap<i64, usize>) -> E2Page {
    let mut entries = BTreeMap::new();
    for (&q, &c) in cohomology {
        if let Some(hs) = rows.get(&q) {
            for (p, &h) in hs.iter().enumerate() {
                if h * c > 0 {
                    entries.insert((p as i64, q), h * c);
                }
            }
        }
    }
    E2Page { entries }
}

/// `d² : E²_{p,q} -> E²_{p-2,q+1}` of the given rank.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Differential {
    pub source: (i64, i64),
    pub target: (i64, i64),
    pub rank: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Unique,
    Multiple,
    Inconsistent,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveResult {
    pub status: SolveStatus,
    /// Every rank assignment of the nonzero-capable differentials that meets
    /// the targets; differentials of rank zero are listed too.
    pub solutions: Vec<Vec<Differential>>,
}

impl SolveResult {
    pub fn unique(&self) -> Option<&[Differential]> {
        (self.status == SolveStatus::Unique).then(|| self.solutions[0].as_slice())
    }
}

/// Box search over the ranks of `d²` on a page supported on two adjacent
/// rows, for `E³ = E^∞` with even/odd totals equal to `target`.
pub fn two_row_solve(page: &E2Page, target: (usize, usize)) -> Result<SolveResult, PipelineError> {
    let rows = page.rows();
    let slots: Vec<(Differential, usize)> = match rows.as_slice() {
        [] | [_] => Vec::new(),
        [lo, hi] if hi - lo == 1 => page
            .entries
            .iter()
            .filter(|k| k.0 .1 == *lo)
            .filter_map(|(&(p, q), &d)| {
                let cap = d.min(page.get(p - 2, q + 1));
                (cap > 0).then(|| (Differential { source: (p, q), target: (p - 2, q + 1), rank: 0 }, cap))
            })
            .collect(),
        _ => return Err(PipelineError::Invalid(format!("the page must sit on two adjacent rows, found rows {rows:?}"))),
    };
    let mut solutions = Vec::new();
    let mut ranks = vec![0usize; slots.len()];
    loop {
        let ds: Vec<Differential> =
            slots.iter().zip(&ranks).map(|((d, _), &r)| Differential { rank: r, ..d.clone() }).collect();
        if page.totals_after(&ds) == target {
            solutions.push(ds);
        }
        // odometer increment over the box
        let mut i = 0;
        while i < ranks.len() && ranks[i] == slots[i].1 {
            ranks[i] = 0;
            i += 1;
        }
        if i == ranks.len() {
            break;
        }
        ranks[i] += 1;
    }
    let status = match solutions.len() {
        0 => SolveStatus::Inconsistent,
        1 => SolveStatus::Unique,
        _ => SolveStatus::Multiple,
    };
    Ok(SolveResult { status, solutions })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn surface(g: usize) -> E2Page {
        let rows = BTreeMap::from([(0, vec![1, 2 * g, 1]), (-1, vec![1, 2 * g, 1])]);
        e2_page(&rows, &BTreeMap::from([(0, 1), (-1, 1)]))
    }

    #[test]
    fn genus_two() {
        let page = surface(2);
        assert_eq!(page.row(0), vec![1, 4, 1]);
        assert_eq!(page.row(-1), vec![1, 4, 1]);
        assert_eq!(page.totals(), (6, 6));
        let r = two_row_solve(&page, (5, 5)).unwrap();
        let ds = r.unique().unwrap();
        assert_eq!(ds, &[Differential { source: (2, -1), target: (0, 0), rank: 1 }]);
        assert_eq!(page.totals_after(ds), (5, 5));
    }

    #[test]
    fn degenerate_pages() {
        let zero = E2Page { entries: BTreeMap::new() };
        assert_eq!(two_row_solve(&zero, (0, 0)).unwrap().status, SolveStatus::Unique);
        assert_eq!(two_row_solve(&surface(2), (7, 7)).unwrap().status, SolveStatus::Inconsistent);
        let one = e2_page(&BTreeMap::from([(0, vec![1, 2])]), &BTreeMap::from([(0, 3)]));
        assert_eq!(one.rows(), vec![0]);
        assert_eq!(one.get(1, 0), 6);
        let far = E2Page { entries: BTreeMap::from([((0, 0), 1), ((0, -2), 1)]) };
        assert!(two_row_solve(&far, (1, 1)).is_err());
    }
}
