use std::collections::BTreeMap;
use std::fmt;

use super::{Element, Group};

/// Finite formal sum `Σ c_g g` in the integral group ring.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct GroupRingElt {
    terms: BTreeMap<Element, i64>,
}

impl GroupRingElt {
    pub fn zero() -> Self {
        GroupRingElt::default()
    }

    pub fn basis(g: Element) -> Self {
        GroupRingElt::from_terms([(g, 1)])
    }

    pub fn from_terms<I: IntoIterator<Item = (Element, i64)>>(terms: I) -> Self {
        let mut x = GroupRingElt::zero();
        for (g, c) in terms {
            x.add_term(g, c);
        }
        x
    }

    /// `1 - g`.
    pub fn one_minus(group: &Group, g: &Element) -> Self {
        GroupRingElt::from_terms([(group.identity(), 1), (g.clone(), -1)])
    }

    /// `1 + g + ... + g^{n-1}`.
    pub fn norm(group: &Group, g: &Element, n: u64) -> Self {
        let mut acc = group.identity();
        let mut x = GroupRingElt::zero();
        for _ in 0..n {
            x.add_term(acc.clone(), 1);
            acc = group.mul(&acc, g);
        }
        x
    }

    pub fn add_term(&mut self, g: Element, c: i64) {
        if c == 0 {
            return;
        }
        match self.terms.entry(g) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if *o.get() == 0 {
                    o.remove();
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Element, i64)> {
        self.terms.iter().map(|(g, c)| (g, *c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Sum of coefficients.
    pub fn augmentation(&self) -> i64 {
        self.terms.values().sum()
    }

    pub fn add(&self, other: &GroupRingElt) -> GroupRingElt {
        let mut x = self.clone();
        for (g, c) in other.terms() {
            x.add_term(g.clone(), c);
        }
        x
    }

    pub fn scale(&self, k: i64) -> GroupRingElt {
        GroupRingElt::from_terms(self.terms().map(|(g, c)| (g.clone(), c * k)))
    }

    pub fn mul(&self, group: &Group, other: &GroupRingElt) -> GroupRingElt {
        let mut x = GroupRingElt::zero();
        for (g, c) in self.terms() {
            for (h, d) in other.terms() {
                x.add_term(group.mul(g, h), c * d);
            }
        }
        x
    }

    /// Left multiplication by a group element.
    pub fn left_translate(&self, group: &Group, g: &Element) -> GroupRingElt {
        GroupRingElt::from_terms(self.terms().map(|(h, c)| (group.mul(g, h), c)))
    }
}

impl fmt::Display for GroupRingElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms().map(|(g, c)| format!("{c}*{g}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Sparse matrix over the group ring in the row-vector convention: row `i`
/// is the image of the `i`-th basis element of the source free module.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GMatrix {
    rows: usize,
    cols: usize,
    entries: BTreeMap<(usize, usize), GroupRingElt>,
}

impl GMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        GMatrix { rows, cols, entries: BTreeMap::new() }
    }

    pub fn from_rows(cols: usize, rows: Vec<Vec<(usize, GroupRingElt)>>) -> Self {
        let mut m = GMatrix::zeros(rows.len(), cols);
        for (i, row) in rows.into_iter().enumerate() {
            for (j, x) in row {
                m.add_at(i, j, &x);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> GroupRingElt {
        self.entries.get(&(i, j)).cloned().unwrap_or_default()
    }

    pub fn add_at(&mut self, i: usize, j: usize, x: &GroupRingElt) {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of bounds");
        let e = self.entries.entry((i, j)).or_default();
        *e = e.add(x);
        if e.is_zero() {
            self.entries.remove(&(i, j));
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &GroupRingElt)> {
        self.entries.iter().map(|(&(i, j), x)| (i, j, x))
    }

    /// Nonzero entries of row `i`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, &GroupRingElt)> {
        self.entries.range((i, 0)..(i + 1, 0)).map(|(&(_, j), x)| (j, x))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn mul(&self, group: &Group, rhs: &GMatrix) -> GMatrix {
        assert_eq!(self.cols, rhs.rows, "group-ring matrix shapes do not compose");
        let mut out = GMatrix::zeros(self.rows, rhs.cols);
        for (i, k, x) in self.iter() {
            for (j, y) in rhs.row(k) {
                out.add_at(i, j, &x.mul(group, y));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norm_kills_one_minus_t() {
        let g = Group::cyclic(4);
        let t = Element::Cyclic(1);
        let p = GroupRingElt::one_minus(&g, &t).mul(&g, &GroupRingElt::norm(&g, &t, 4));
        assert!(p.is_zero());
        assert_eq!(GroupRingElt::norm(&g, &t, 4).augmentation(), 4);
    }

    #[test]
    fn cancellation_removes_terms() {
        let mut x = GroupRingElt::basis(Element::Int(1));
        x.add_term(Element::Int(1), -1);
        assert!(x.is_zero());
    }
}
