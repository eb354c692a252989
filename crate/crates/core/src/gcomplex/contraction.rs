use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::ComplexError;
use crate::groups::{closure, Element, Group};
use crate::gsets::FiniteGSet;

/// Chain budget for the subdivided universal complex.
pub const CHAIN_BUDGET: usize = 200_000;

/// All subgroups of a finite group as sorted element lists, ordered by
/// order and then elements.
pub fn subgroups_of(g: &Group) -> Result<Vec<Vec<Element>>, ComplexError> {
    let elems = g.elements().ok_or_else(|| ComplexError::Invalid("subgroups of an infinite group".into()))?;
    let sorted = |v: Vec<Element>| {
        let mut v = v;
        v.sort();
        v
    };
    let mut found: BTreeSet<Vec<Element>> = BTreeSet::new();
    for e in elems {
        found.insert(sorted(closure(g, std::slice::from_ref(e))?));
    }
    // joins of cyclic subgroups reach every subgroup
    loop {
        let current: Vec<Vec<Element>> = found.iter().cloned().collect();
        let mut grew = false;
        for a in &current {
            for b in &current {
                let gens: Vec<Element> = a.iter().chain(b).cloned().collect();
                if found.insert(sorted(closure(g, &gens)?)) {
                    grew = true;
                }
            }
        }
        if !grew {
            break;
        }
    }
    let mut out: Vec<Vec<Element>> = found.into_iter().collect();
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    Ok(out)
}

/// Which homotopy to test. `Printed` inserts `σ_{i-1} ⊔ {α}` at the one
/// position where `α` enters the chain; `Conical` is the prism homotopy
/// from the identity to `S ↦ S ∪ {α}` followed by the cone to `{α}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Operator {
    Printed,
    Conical,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContractionReport {
    pub operator: Operator,
    /// `|V_0| = Σ_H [G : H]` over all finite subgroups.
    pub vertices: usize,
    /// Number of chains per dimension, starting at the empty chain (`-1`).
    pub chains: Vec<usize>,
    pub checked: usize,
    /// Basis elements in the top dimension, where `s` leaves the truncation.
    pub skipped: usize,
    pub failures: usize,
}

impl ContractionReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

type Vector = BTreeMap<(usize, usize), i64>;

fn add(v: &mut Vector, k: (usize, usize), c: i64) {
    let e = v.entry(k).or_insert(0);
    *e += c;
    if *e == 0 {
        v.remove(&k);
    }
}

/// Checks `s∂ + ∂s = id` on the augmented row `D_* -> k[X̂]` built from the
/// subdivision of the simplex on `V_0 = ⊔_H G/H`, for every basis element
/// of `D_n` with `-1 <= n < dim_cap`.
pub fn verify_contraction(x: &FiniteGSet, dim_cap: usize, operator: Operator) -> Result<ContractionReport, ComplexError> {
    let g = x.group();
    let elems = g.elements().ok_or_else(|| ComplexError::Invalid("the contraction check needs a finite group".into()))?.to_vec();
    // V_0: cosets gH, each stored as a sorted element list
    let mut cosets: Vec<Vec<Element>> = Vec::new();
    for h in subgroups_of(g)? {
        let mut mine: BTreeSet<Vec<Element>> = BTreeSet::new();
        for a in &elems {
            let mut c: Vec<Element> = h.iter().map(|b| g.mul(a, b)).collect();
            c.sort();
            mine.insert(c);
        }
        cosets.extend(mine);
    }
    let nv = cosets.len();
    if nv > 63 {
        return Err(ComplexError::BudgetExceeded { needed: nv, budget: 63 });
    }
    let index: BTreeMap<&Vec<Element>, usize> = cosets.iter().enumerate().map(|(i, c)| (c, i)).collect();
    let act_vertex: Vec<Vec<usize>> = elems
        .iter()
        .map(|a| {
            cosets
                .iter()
                .map(|c| {
                    let mut d: Vec<Element> = c.iter().map(|b| g.mul(a, b)).collect();
                    d.sort();
                    index[&d]
                })
                .collect()
        })
        .collect();
    let act_mask = |gi: usize, m: u64| -> u64 {
        (0..nv).filter(|i| m & (1 << i) != 0).fold(0u64, |acc, i| acc | 1 << act_vertex[gi][i])
    };
    // the least vertex fixed by each element
    let owner: Vec<usize> =
        (0..elems.len()).map(|gi| (0..nv).find(|&v| act_vertex[gi][v] == v).expect("every element fixes a coset")).collect();

    // chains of proper inclusions, grouped by dimension
    let mut chains: Vec<Vec<u64>> = vec![Vec::new()];
    let mut by_dim: Vec<Vec<usize>> = vec![vec![0]];
    let full: u64 = (1u64 << nv) - 1;
    for d in 0..=dim_cap {
        let mut next = Vec::new();
        for &c in &by_dim[d] {
            let last = chains[c].last().copied().unwrap_or(0);
            let rest = full & !last;
            let mut add_bits = rest;
            while add_bits > 0 {
                let mut ch = chains[c].clone();
                ch.push(last | add_bits);
                next.push(chains.len());
                chains.push(ch);
                if chains.len() > CHAIN_BUDGET {
                    return Err(ComplexError::BudgetExceeded { needed: chains.len(), budget: CHAIN_BUDGET });
                }
                add_bits = (add_bits - 1) & rest;
            }
        }
        by_dim.push(next);
    }
    let chain_index: BTreeMap<&Vec<u64>, usize> = chains.iter().enumerate().map(|(i, c)| (c, i)).collect();
    let dim_of = |c: usize| chains[c].len() as i64 - 1;

    // X̂ and the pairs in each X_σ
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for (gi, a) in elems.iter().enumerate() {
        let p = x.perm_of(a);
        pairs.extend((0..x.len()).filter(|&i| p[i] as usize == i).map(|i| (i, gi)));
    }
    let stabilizes = |gi: usize, c: usize| chains[c].iter().all(|&m| act_mask(gi, m) == m);

    let boundary = |v: &Vector| -> Vector {
        let mut out = Vector::new();
        for (&(c, pi), &coef) in v {
            let ch = &chains[c];
            for j in 0..ch.len() {
                let mut f = ch.clone();
                f.remove(j);
                let sign = if j % 2 == 0 { 1 } else { -1 };
                add(&mut out, (chain_index[&f], pi), sign * coef);
            }
        }
        out
    };
    let printed = |v: &Vector| -> Vector {
        let mut out = Vector::new();
        for (&(c, pi), &coef) in v {
            let alpha = owner[pairs[pi].1];
            let ch = &chains[c];
            for i in 0..=ch.len() {
                let below = if i == 0 { 0 } else { ch[i - 1] };
                if below & (1 << alpha) != 0 {
                    continue;
                }
                let ins = below | 1 << alpha;
                if i < ch.len() && (ch[i] & ins != ins || ch[i] == ins) {
                    continue;
                }
                let mut eta = ch.clone();
                eta.insert(i, ins);
                let sign = if i % 2 == 0 { 1 } else { -1 };
                add(&mut out, (chain_index[&eta], pi), sign * coef);
            }
        }
        out
    };

    // normalized chains: a repeated set is degenerate
    let push_chain = |out: &mut Vector, ch: Vec<u64>, pi: usize, c: i64| {
        if ch.windows(2).all(|w| w[0] != w[1]) {
            add(out, (chain_index[&ch], pi), c);
        }
    };
    let conical = |v: &Vector| -> Vector {
        let mut out = Vector::new();
        for (&(c, pi), &coef) in v {
            let a: u64 = 1 << owner[pairs[pi].1];
            let ch = &chains[c];
            let up: Vec<u64> = ch.iter().map(|m| m | a).collect();
            let mut cone = vec![a];
            cone.extend(&up);
            push_chain(&mut out, cone, pi, coef);
            for k in 0..ch.len() {
                let mut prism: Vec<u64> = ch[..=k].to_vec();
                prism.extend(&up[k..]);
                let sign = if k % 2 == 0 { -1 } else { 1 };
                push_chain(&mut out, prism, pi, sign * coef);
            }
        }
        out
    };
    let homotopy = |v: &Vector| match operator {
        Operator::Printed => printed(v),
        Operator::Conical => conical(v),
    };

    let mut checked = 0;
    let mut skipped = 0;
    let mut failures = 0;
    for (c, _) in chains.iter().enumerate() {
        for (pi, &(_, gi)) in pairs.iter().enumerate() {
            if !stabilizes(gi, c) {
                continue;
            }
            if dim_of(c) >= dim_cap as i64 {
                skipped += 1;
                continue;
            }
            let e: Vector = BTreeMap::from([((c, pi), 1)]);
            let mut lhs = homotopy(&boundary(&e));
            for (k, v) in boundary(&homotopy(&e)) {
                add(&mut lhs, k, v);
            }
            checked += 1;
            if lhs != e {
                failures += 1;
            }
        }
    }
    Ok(ContractionReport { operator, vertices: nv, chains: by_dim.iter().map(|d| d.len()).collect(), checked, skipped, failures })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subgroup_counts() {
        assert_eq!(subgroups_of(&Group::cyclic(6)).unwrap().len(), 4);
        assert_eq!(subgroups_of(&Group::symmetric(3)).unwrap().len(), 6);
    }

    #[test]
    fn conical_contraction_small_groups() {
        for m in [1, 2, 3] {
            let g = Group::cyclic(m);
            let x = FiniteGSet::point(&g);
            let r = verify_contraction(&x, 3, Operator::Conical).unwrap();
            assert!(r.passed(), "{m}: {r:?}");
            assert!(r.checked > 0);
        }
        let g = Group::cyclic(2);
        let x = FiniteGSet::regular(&g).unwrap().disjoint_union(&FiniteGSet::point(&g)).unwrap();
        let r = verify_contraction(&x, 2, Operator::Conical).unwrap();
        assert_eq!(r.vertices, 3);
        assert!(r.passed());
    }

    #[test]
    fn printed_operator_misses_cross_terms() {
        // σ = ({β}) with α ≠ β: s∂σ + ∂sσ = σ + ({α}) - ({α, β})
        let g = Group::cyclic(2);
        let r = verify_contraction(&FiniteGSet::point(&g), 3, Operator::Printed).unwrap();
        assert!(r.failures > 0);
        let one = verify_contraction(&FiniteGSet::point(&Group::trivial()), 3, Operator::Printed).unwrap();
        assert!(one.passed());
    }
}
