//! Finite G-sets, odometer level systems and the level-wise torsion blow-up.

mod odometer;

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::One;
use thiserror::Error;

use crate::exactalg::IntMatrix;
use crate::groups::{centralizer, Element, GModule, Group, GroupDesc, GroupError, Subgroup, TorsionClass};

pub use odometer::{blowup, blowup_level, level_gset, pullback_matrix, BlowupLevel, BlowupPiece, Level, Odometer, OdometerSpec};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GSetError {
    #[error("level {level} outside 0..={max}")]
    LevelOutOfRange { level: usize, max: usize },
    #[error("invalid G-set: {0}")]
    Invalid(String),
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// A finite set `0..n` with a left action of `group`, stored as one
/// permutation per group generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGSet {
    group: Group,
    labels: Vec<u64>,
    gens: Vec<Vec<u32>>,
    inv_gens: Vec<Vec<u32>>,
}

fn invert(p: &[u32]) -> Vec<u32> {
    let mut q = vec![0u32; p.len()];
    for (i, &v) in p.iter().enumerate() {
        q[v as usize] = i as u32;
    }
    q
}

fn compose(p: &[u32], q: &[u32]) -> Vec<u32> {
    q.iter().map(|&x| p[x as usize]).collect()
}

impl FiniteGSet {
    /// Checks that each generator acts by a permutation and that the family
    /// relators act trivially (for permutation groups: the full
    /// homomorphism property on every element).
    pub fn new(group: Group, labels: Vec<u64>, gens: Vec<Vec<u32>>) -> Result<FiniteGSet, GSetError> {
        let n = labels.len();
        if gens.len() != group.generators().len() {
            return Err(GSetError::Invalid(format!(
                "{} generator actions for {} generators",
                gens.len(),
                group.generators().len()
            )));
        }
        for p in &gens {
            let distinct: BTreeSet<u32> = p.iter().copied().collect();
            if p.len() != n || distinct.len() != n || p.iter().any(|&x| x as usize >= n) {
                return Err(GSetError::Invalid("generator action is not a permutation of the points".into()));
            }
        }
        let inv_gens = gens.iter().map(|p| invert(p)).collect();
        let s = FiniteGSet { group, labels, gens, inv_gens };
        s.check_relators()?;
        Ok(s)
    }

    fn check_relators(&self) -> Result<(), GSetError> {
        let id: Vec<u32> = (0..self.len() as u32).collect();
        let bad = |what: &str| Err(GSetError::Invalid(format!("action violates the relator {what}")));
        match self.group.desc() {
            GroupDesc::FiniteCyclic { m } if *m > 1 => {
                if self.perm_power(0, *m as i64) != id {
                    return bad("t^m");
                }
            }
            GroupDesc::FiniteCyclic { .. } | GroupDesc::FreeAbelianRank1 => {}
            GroupDesc::InfiniteDihedral => {
                let (t, s) = (&self.gens[0], &self.gens[1]);
                if compose(s, s) != id {
                    return bad("s^2");
                }
                if compose(&compose(s, t), s) != self.inv_gens[0] {
                    return bad("s t s = t^-1");
                }
            }
            GroupDesc::Amalgam { a, b } => {
                if self.perm_power(0, *a as i64) != id || self.perm_power(1, *b as i64) != id {
                    return bad("x^a, y^b");
                }
            }
            GroupDesc::FinitePermutation { .. } => {
                let es = self.group.elements().expect("finite");
                for (i, s) in self.group.generators().iter().enumerate() {
                    for e in es {
                        let lhs = self.perm_of(&self.group.mul(s, e));
                        if lhs != compose(&self.gens[i], &self.perm_of(e)) {
                            return bad("of the group multiplication table");
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// One point with trivial action.
    pub fn point(group: &Group) -> FiniteGSet {
        FiniteGSet::trivial(group, 1)
    }

    pub fn trivial(group: &Group, n: usize) -> FiniteGSet {
        let id: Vec<u32> = (0..n as u32).collect();
        let gens = vec![id.clone(); group.generators().len()];
        FiniteGSet { group: group.clone(), labels: (0..n as u64).collect(), gens: gens.clone(), inv_gens: gens }
    }

    /// `G` acting on itself by left multiplication (finite `G`).
    pub fn regular(group: &Group) -> Result<FiniteGSet, GSetError> {
        let es = group.elements().ok_or_else(|| GSetError::Invalid("regular G-set of an infinite group".into()))?;
        let gens = group
            .generators()
            .iter()
            .map(|s| es.iter().map(|e| group.index_of(&group.mul(s, e)).expect("closed") as u32).collect())
            .collect();
        FiniteGSet::new(group.clone(), (0..es.len() as u64).collect(), gens)
    }

    /// Disjoint union; labels of `other` are shifted past ours.
    pub fn disjoint_union(&self, other: &FiniteGSet) -> Result<FiniteGSet, GSetError> {
        if self.group != other.group {
            return Err(GSetError::Invalid("disjoint union over different groups".into()));
        }
        let n = self.len() as u32;
        let top = self.labels.iter().max().map_or(0, |m| m + 1);
        let labels = self.labels.iter().copied().chain(other.labels.iter().map(|l| l + top)).collect();
        let gens = self.gens.iter().zip(&other.gens).map(|(p, q)| p.iter().copied().chain(q.iter().map(|x| x + n)).collect()).collect();
        FiniteGSet::new(self.group.clone(), labels, gens)
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[u64] {
        &self.labels
    }

    /// The permutation by which generator `i` acts.
    pub fn generator_action(&self, i: usize) -> &[u32] {
        &self.gens[i]
    }

    fn perm_power(&self, i: usize, e: i64) -> Vec<u32> {
        let base = if e < 0 { &self.inv_gens[i] } else { &self.gens[i] };
        let mut acc: Vec<u32> = (0..self.len() as u32).collect();
        for _ in 0..e.unsigned_abs() {
            acc = compose(base, &acc);
        }
        acc
    }

    /// The permutation of the points induced by `g`.
    pub fn perm_of(&self, g: &Element) -> Vec<u32> {
        let w = self.group.word(g);
        let id: Vec<u32> = (0..self.len() as u32).collect();
        // |exponent| can exceed the number of points only through the cyclic
        // structure of a generator; reduce it by the generator's order on the set
        Group::eval_word(&w, id, |i, e| self.perm_power(i, self.reduce_exponent(i, e)), |a, b| compose(a, b))
    }

    fn reduce_exponent(&self, i: usize, e: i64) -> i64 {
        let p = &self.gens[i];
        let mut seen = vec![false; p.len()];
        let mut ord: i64 = 1;
        for s in 0..p.len() {
            let mut len = 0i64;
            let mut x = s;
            while !seen[x] {
                seen[x] = true;
                x = p[x] as usize;
                len += 1;
            }
            if len > 0 {
                ord = num_integer::lcm(ord, len);
            }
        }
        e.rem_euclid(ord)
    }

    pub fn act(&self, g: &Element, x: usize) -> usize {
        self.perm_of(g)[x] as usize
    }

    /// Restriction along a subgroup: a G-set over `sub.abstract_group()` on
    /// the given invariant subset of points.
    pub fn restrict(&self, sub: &Subgroup, points: &[usize]) -> Result<FiniteGSet, GSetError> {
        if sub.ambient() != &self.group {
            return Err(GSetError::Invalid("subgroup of a different group".into()));
        }
        let pos = |x: usize| points.iter().position(|&p| p == x);
        let mut gens = Vec::new();
        for img in sub.generators() {
            let p = self.perm_of(img);
            let mut q = Vec::with_capacity(points.len());
            for &x in points {
                let y = pos(p[x] as usize).ok_or_else(|| GSetError::Invalid("subset is not invariant".into()))?;
                q.push(y as u32);
            }
            gens.push(q);
        }
        let labels = points.iter().map(|&x| self.labels[x]).collect();
        FiniteGSet::new(sub.abstract_group().clone(), labels, gens)
    }

    /// Orbits in order of their least point, each with the stabilizer of
    /// that point (Schreier generators).
    pub fn orbits_and_stabilizers(&self) -> Result<Vec<Orbit>, GSetError> {
        let n = self.len();
        let mut seen = vec![false; n];
        let gens = self.group.generators();
        let mut out = Vec::new();
        for x0 in 0..n {
            if seen[x0] {
                continue;
            }
            // transversal: point -> element moving x0 there
            let mut trans: Vec<Option<Element>> = vec![None; n];
            trans[x0] = Some(self.group.identity());
            seen[x0] = true;
            let mut queue = vec![x0];
            let mut i = 0;
            while i < queue.len() {
                let x = queue[i];
                for (k, s) in gens.iter().enumerate() {
                    let y = self.gens[k][x] as usize;
                    if !seen[y] {
                        seen[y] = true;
                        trans[y] = Some(self.group.mul(s, trans[x].as_ref().expect("set")));
                        queue.push(y);
                    }
                }
                i += 1;
            }
            let mut schreier: Vec<Element> = Vec::new();
            for &x in &queue {
                let ux = trans[x].as_ref().expect("set");
                for (k, s) in gens.iter().enumerate() {
                    let y = self.gens[k][x] as usize;
                    let uy = trans[y].as_ref().expect("set");
                    let h = self.group.mul(&self.group.inv(uy), &self.group.mul(s, ux));
                    if !self.group.is_identity(&h) && !schreier.contains(&h) {
                        schreier.push(h);
                    }
                }
            }
            let stabilizer = Subgroup::generated(&self.group, &schreier)?;
            let mut points = queue;
            points.sort_unstable();
            out.push(Orbit { points, stabilizer });
        }
        Ok(out)
    }

    /// `S^g` as a G-set over the centralizer of `g`.
    pub fn fixed_points(&self, g: &Element) -> Result<FixedSet, GSetError> {
        let p = self.perm_of(g);
        let points: Vec<usize> = (0..self.len()).filter(|&x| p[x] as usize == x).collect();
        let centralizer = centralizer(&self.group, g);
        let set = self.restrict(&centralizer, &points)?;
        Ok(FixedSet { element: g.clone(), centralizer, points, set })
    }
}

/// Permutation module `Z[S]`.
impl GModule for FiniteGSet {
    fn group(&self) -> &Group {
        &self.group
    }

    fn rank(&self) -> usize {
        self.len()
    }

    fn act(&self, g: &Element) -> IntMatrix {
        let p = self.perm_of(g);
        let n = self.len();
        IntMatrix::from_entries(n, n, p.iter().enumerate().map(|(x, &y)| (y as usize, x, BigInt::one())))
            .expect("permutation matrix")
    }
}

#[derive(Clone, Debug)]
pub struct Orbit {
    pub points: Vec<usize>,
    /// Stabilizer of `points[0]`.
    pub stabilizer: Subgroup,
}

#[derive(Clone, Debug)]
pub struct FixedSet {
    pub element: Element,
    pub centralizer: Subgroup,
    /// Indices into the parent set.
    pub points: Vec<usize>,
    pub set: FiniteGSet,
}

impl TorsionClass {
    /// `[G : Z(g_c)]` for finite `G`.
    pub fn class_size(&self, g: &Group) -> Option<usize> {
        Some(g.order()? / self.centralizer.order()?)
    }
}
