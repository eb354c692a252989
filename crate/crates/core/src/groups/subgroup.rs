use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::{Element, Group, GroupDesc, GroupError};

/// A subgroup given abstractly together with the images of the abstract
/// generators in the ambient group.
#[derive(Clone, Debug)]
pub struct Subgroup {
    ambient: Group,
    abstract_group: Group,
    images: Vec<Element>,
}

impl Subgroup {
    pub fn new(ambient: Group, abstract_group: Group, images: Vec<Element>) -> Result<Subgroup, GroupError> {
        if images.len() != abstract_group.generators().len() {
            return Err(GroupError::Invalid("one image per abstract generator is required".into()));
        }
        if let Some(bad) = images.iter().find(|g| !ambient.contains(g)) {
            return Err(GroupError::Invalid(format!("{bad} is not in {}", ambient.name())));
        }
        Ok(Subgroup { ambient, abstract_group, images })
    }

    pub fn whole(g: &Group) -> Subgroup {
        Subgroup { ambient: g.clone(), abstract_group: g.clone(), images: g.generators().to_vec() }
    }

    pub fn trivial(g: &Group) -> Subgroup {
        Subgroup { ambient: g.clone(), abstract_group: Group::trivial(), images: vec![] }
    }

    /// `<g>`, abstractly `Z/n` or `Z`.
    pub fn cyclic(ambient: &Group, g: &Element) -> Subgroup {
        match ambient.element_order(g) {
            Some(1) => Subgroup::trivial(ambient),
            Some(n) => Subgroup { ambient: ambient.clone(), abstract_group: Group::cyclic(n), images: vec![g.clone()] },
            None => Subgroup { ambient: ambient.clone(), abstract_group: Group::integers(), images: vec![g.clone()] },
        }
    }

    /// The finite subgroup generated by `gens`; abstractly cyclic when one
    /// generator is given, otherwise the regular permutation representation.
    pub fn finite_generated(ambient: &Group, gens: &[Element]) -> Result<Subgroup, GroupError> {
        let gens: Vec<Element> = gens.iter().filter(|g| !ambient.is_identity(g)).cloned().collect();
        for g in &gens {
            if ambient.element_order(g).is_none() {
                return Err(GroupError::Invalid(format!("{g} has infinite order")));
            }
        }
        match gens.len() {
            0 => Ok(Subgroup::trivial(ambient)),
            1 => Ok(Subgroup::cyclic(ambient, &gens[0])),
            _ => {
                let elems = closure(ambient, &gens)?;
                let index: HashMap<&Element, u32> = elems.iter().enumerate().map(|(i, e)| (e, i as u32)).collect();
                let perms: Vec<Vec<u32>> =
                    gens.iter().map(|g| elems.iter().map(|e| index[&ambient.mul(g, e)]).collect()).collect();
                let abs = Group::permutation(elems.len(), perms)?;
                Subgroup::new(ambient.clone(), abs, gens)
            }
        }
    }

    /// `<gens>` for finite ambient groups, the integers and `D_∞`.
    pub fn generated(ambient: &Group, gens: &[Element]) -> Result<Subgroup, GroupError> {
        if ambient.is_finite() {
            return Subgroup::finite_generated(ambient, &greedy_generators(ambient, &closure(ambient, gens)?));
        }
        match ambient.desc() {
            GroupDesc::FreeAbelianRank1 => {
                let k = gens.iter().fold(0i64, |acc, g| match g {
                    Element::Int(n) => num_integer::gcd(acc, *n),
                    _ => acc,
                });
                Ok(Subgroup::cyclic(ambient, &Element::Int(k)))
            }
            GroupDesc::InfiniteDihedral => {
                let mut k = 0i64;
                let mut base: Option<i64> = None;
                for g in gens {
                    match g {
                        Element::Dihedral(n, 0) => k = num_integer::gcd(k, *n),
                        Element::Dihedral(c, _) => match base {
                            None => base = Some(*c),
                            Some(c0) => k = num_integer::gcd(k, c - c0),
                        },
                        _ => return Err(GroupError::Invalid(format!("{g} is not in D_inf"))),
                    }
                }
                match (base, k) {
                    (None, _) => Ok(Subgroup::cyclic(ambient, &Element::Dihedral(k, 0))),
                    (Some(c), 0) => Ok(Subgroup::cyclic(ambient, &Element::Dihedral(c, 1))),
                    (Some(c), k) => Subgroup::new(
                        ambient.clone(),
                        Group::infinite_dihedral(),
                        vec![Element::Dihedral(k, 0), Element::Dihedral(c.rem_euclid(k), 1)],
                    ),
                }
            }
            _ => Err(GroupError::Unsupported(format!("subgroups generated by elements of {}", ambient.name()))),
        }
    }

    pub fn ambient(&self) -> &Group {
        &self.ambient
    }

    pub fn abstract_group(&self) -> &Group {
        &self.abstract_group
    }

    /// Ambient images of the abstract generators.
    pub fn generators(&self) -> &[Element] {
        &self.images
    }

    pub fn is_finite(&self) -> bool {
        self.abstract_group.is_finite()
    }

    pub fn order(&self) -> Option<usize> {
        self.abstract_group.order()
    }

    pub fn embed(&self, x: &Element) -> Element {
        let w = self.abstract_group.word(x);
        let amb = &self.ambient;
        Group::eval_word(&w, amb.identity(), |i, e| amb.pow(&self.images[i], e), |a, b| amb.mul(a, b))
    }

    /// Ambient elements, in the order of the abstract enumeration.
    pub fn elements(&self) -> Option<Vec<Element>> {
        self.abstract_group.elements().map(|es| es.iter().map(|e| self.embed(e)).collect())
    }

    /// Membership test; complete for finite subgroups and for the
    /// subgroups produced by the built-in chains and centralizers.
    pub fn contains(&self, g: &Element) -> bool {
        if let Some(es) = self.elements() {
            return es.contains(g);
        }
        match (self.ambient.desc(), self.abstract_group.desc(), g) {
            (_, _, _) if self.ambient == self.abstract_group && self.images == self.ambient.generators() => {
                self.ambient.contains(g)
            }
            (GroupDesc::FreeAbelianRank1, GroupDesc::FreeAbelianRank1, Element::Int(n)) => {
                let Element::Int(k) = self.images[0] else { return false };
                k != 0 && n % k == 0
            }
            (GroupDesc::InfiniteDihedral, GroupDesc::FreeAbelianRank1, Element::Dihedral(n, i)) => {
                let Element::Dihedral(k, 0) = self.images[0] else { return false };
                *i == 0 && k != 0 && n % k == 0
            }
            (GroupDesc::InfiniteDihedral, GroupDesc::InfiniteDihedral, Element::Dihedral(n, i)) => {
                // images (k, 0) and (c, 1): elements (mk, 0) and (mk + c, 1)
                let (Element::Dihedral(k, 0), Element::Dihedral(c, 1)) = (&self.images[0], &self.images[1]) else {
                    return false;
                };
                let shift = if *i == 0 { *n } else { n - c };
                *k != 0 && shift % k == 0
            }
            (GroupDesc::Amalgam { .. }, GroupDesc::FreeAbelianRank1, _) => {
                // <r> for r of infinite order: compare cyclic reductions
                let r = &self.images[0];
                let amb = &self.ambient;
                if amb.is_identity(g) {
                    return true;
                }
                if !amb.commute(g, r) {
                    return false;
                }
                let len = |e: &Element| match e {
                    Element::Word(w) => w.len(),
                    _ => 0,
                };
                let bound = len(g) / len(r).max(1) + 2;
                (1..=bound as i64).any(|k| amb.pow(r, k) == *g || amb.pow(r, -k) == *g)
            }
            _ => false,
        }
    }
}

/// Closure of `gens` under multiplication; must be finite.
pub fn closure(ambient: &Group, gens: &[Element]) -> Result<Vec<Element>, GroupError> {
    let mut elems = vec![ambient.identity()];
    let mut seen: BTreeSet<Element> = elems.iter().cloned().collect();
    let mut i = 0;
    while i < elems.len() {
        for g in gens {
            let p = ambient.mul(g, &elems[i]);
            if seen.insert(p.clone()) {
                if elems.len() >= super::MAX_FINITE_ORDER {
                    return Err(GroupError::BudgetExceeded { needed: elems.len() + 1, budget: super::MAX_FINITE_ORDER });
                }
                elems.push(p);
            }
        }
        i += 1;
    }
    Ok(elems)
}

/// A conjugacy class of finite-order elements.
#[derive(Clone, Debug)]
pub struct TorsionClass {
    pub representative: Element,
    pub order: u64,
    pub centralizer: Subgroup,
}

/// Complete list of conjugacy classes of torsion elements, identity first.
pub fn torsion_conjugacy_classes(g: &Group) -> Vec<TorsionClass> {
    let class = |rep: Element| {
        let order = g.element_order(&rep).expect("torsion representative");
        let centralizer = centralizer(g, &rep);
        TorsionClass { representative: rep, order, centralizer }
    };
    match g.desc() {
        GroupDesc::FiniteCyclic { m } => (0..*m).map(|k| class(Element::Cyclic(k))).collect(),
        GroupDesc::FreeAbelianRank1 => vec![class(Element::Int(0))],
        GroupDesc::InfiniteDihedral => {
            // reflections (n, 1) split by the parity of n
            vec![class(Element::Dihedral(0, 0)), class(Element::Dihedral(0, 1)), class(Element::Dihedral(1, 1))]
        }
        GroupDesc::Amalgam { a, b } => {
            let mut v = vec![class(g.identity())];
            v.extend((1..*a).map(|i| class(Element::Word(vec![(0, i)]))));
            v.extend((1..*b).map(|j| class(Element::Word(vec![(1, j)]))));
            v
        }
        GroupDesc::FinitePermutation { .. } => {
            let elems = g.elements().expect("finite");
            let mut assigned = vec![false; elems.len()];
            let mut out = Vec::new();
            for (i, x) in elems.iter().enumerate() {
                if assigned[i] {
                    continue;
                }
                for h in elems {
                    assigned[g.index_of(&g.conjugate(h, x)).expect("closed")] = true;
                }
                out.push(class(x.clone()));
            }
            out
        }
    }
}

/// `Z(x)` as a subgroup with embedding.
pub fn centralizer(g: &Group, x: &Element) -> Subgroup {
    if g.is_identity(x) || g.is_abelian() {
        return Subgroup::whole(g);
    }
    match (g.desc(), x) {
        (GroupDesc::InfiniteDihedral, Element::Dihedral(_, 1)) => Subgroup::cyclic(g, x),
        (GroupDesc::InfiniteDihedral, Element::Dihedral(_, _)) => Subgroup::cyclic(g, &Element::Dihedral(1, 0)),
        (GroupDesc::Amalgam { .. }, Element::Word(_)) => {
            let (conj, core) = g.cyclic_reduction(x);
            let root = if core.len() <= 1 {
                // conjugate of a power of x or y: centralizer is the conjugate vertex group
                let gen = Element::Word(vec![(core[0].0, 1)]);
                g.conjugate(&conj, &gen)
            } else {
                let p = primitive_period(&core);
                g.conjugate(&conj, &Element::Word(core[..p].to_vec()))
            };
            Subgroup::cyclic(g, &root)
        }
        (GroupDesc::FinitePermutation { .. }, _) => {
            let elems = g.elements().expect("finite");
            let cent: Vec<Element> = elems.iter().filter(|h| g.commute(h, x)).cloned().collect();
            let gens = greedy_generators(g, &cent);
            Subgroup::finite_generated(g, &gens).expect("finite subgroup")
        }
        _ => unreachable!("abelian families handled above"),
    }
}

/// Shortest `p` with `core` a power of `core[..p]`.
fn primitive_period(core: &[(u8, u64)]) -> usize {
    let n = core.len();
    (1..=n).find(|&p| n.is_multiple_of(p) && (p..n).all(|i| core[i] == core[i - p])).unwrap_or(n)
}

/// A generating subset of a finite subgroup given by its element list.
pub fn greedy_generators(g: &Group, elems: &[Element]) -> Vec<Element> {
    let mut gens: Vec<Element> = Vec::new();
    let mut span: BTreeSet<Element> = BTreeSet::from([g.identity()]);
    for e in elems {
        if span.contains(e) {
            continue;
        }
        gens.push(e.clone());
        span = closure(g, &gens).expect("finite").into_iter().collect();
    }
    gens
}

/// Finite-index subgroups `G = G_0 ⊇ G_1 ⊇ ...` with `[G : G_k] = n_k`.
#[derive(Clone, Debug)]
pub struct SubgroupChain {
    group: Group,
    levels: Vec<ChainLevel>,
}

#[derive(Clone, Debug)]
pub struct ChainLevel {
    pub index: u64,
    pub subgroup: Subgroup,
}

/// Explicit subgroup chain input for permutation groups.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PermChainLevel {
    pub generators: Vec<Vec<u32>>,
}

impl SubgroupChain {
    /// Chains by index for the families whose finite-index subgroups are
    /// determined by it: `n_k Z` in `Z`, `n_k Z ⋊ Z/2` in `D_∞`, and the
    /// index-`n_k` subgroup of a finite cyclic group.
    pub fn by_indices(group: &Group, indices: &[u64]) -> Result<SubgroupChain, GroupError> {
        let mut prev = 1u64;
        let mut levels = Vec::new();
        for &n in indices {
            if n == 0 || n % prev != 0 {
                return Err(GroupError::Invalid(format!("indices must divide each other, got {prev} then {n}")));
            }
            prev = n;
            let subgroup = match group.desc() {
                GroupDesc::FreeAbelianRank1 => {
                    Subgroup::new(group.clone(), Group::integers(), vec![Element::Int(n as i64)])?
                }
                GroupDesc::InfiniteDihedral => Subgroup::new(
                    group.clone(),
                    Group::infinite_dihedral(),
                    vec![Element::Dihedral(n as i64, 0), Element::Dihedral(0, 1)],
                )?,
                GroupDesc::FiniteCyclic { m } => {
                    if m % n != 0 {
                        return Err(GroupError::Invalid(format!("index {n} does not divide {m}")));
                    }
                    Subgroup::cyclic(group, &Element::Cyclic(n % m))
                }
                other => {
                    return Err(GroupError::Unsupported(format!(
                        "index-only subgroup chains are not defined for {}",
                        other.name()
                    )))
                }
            };
            levels.push(ChainLevel { index: n, subgroup });
        }
        Ok(SubgroupChain { group: group.clone(), levels })
    }

    /// Chains of permutation subgroups given by generators; nesting is checked.
    pub fn from_generators(group: &Group, levels_in: &[PermChainLevel]) -> Result<SubgroupChain, GroupError> {
        let order = group.order().ok_or_else(|| GroupError::Unsupported("explicit chains need a finite group".into()))?;
        let mut levels = Vec::new();
        let mut prev: Option<Vec<Element>> = None;
        for lvl in levels_in {
            let gens: Vec<Element> = lvl.generators.iter().cloned().map(Element::Perm).collect();
            if let Some(bad) = gens.iter().find(|x| !group.contains(x)) {
                return Err(GroupError::Invalid(format!("{bad} is not in the group")));
            }
            let sub = Subgroup::finite_generated(group, &gens)?;
            let elems = sub.elements().expect("finite");
            if let Some(p) = &prev {
                if !elems.iter().all(|e| p.contains(e)) {
                    return Err(GroupError::Invalid("chain levels must be nested".into()));
                }
            }
            let index = (order / elems.len()) as u64;
            prev = Some(elems);
            levels.push(ChainLevel { index, subgroup: sub });
        }
        Ok(SubgroupChain { group: group.clone(), levels })
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    /// Levels `1..=len`; level 0 is the whole group.
    pub fn levels(&self) -> &[ChainLevel] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    /// `[G : G_k]`, with `k = 0` giving 1.
    pub fn index(&self, k: usize) -> u64 {
        if k == 0 {
            1
        } else {
            self.levels[k - 1].index
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dihedral_classes() {
        let g = Group::infinite_dihedral();
        let cls = torsion_conjugacy_classes(&g);
        let reps: Vec<Element> = cls.iter().map(|c| c.representative.clone()).collect();
        assert_eq!(reps, vec![Element::Dihedral(0, 0), Element::Dihedral(0, 1), Element::Dihedral(1, 1)]);
        assert_eq!(cls[1].centralizer.order(), Some(2));
        assert_eq!(cls[1].centralizer.elements().unwrap(), vec![Element::Dihedral(0, 0), Element::Dihedral(0, 1)]);
        assert!(torsion_conjugacy_classes(&Group::integers()).len() == 1);
        assert_eq!(torsion_conjugacy_classes(&Group::cyclic(3)).len(), 3);
    }

    #[test]
    fn s3_transposition_centralizer() {
        let s3 = Group::symmetric(3);
        let t = Element::Perm(vec![1, 0, 2]);
        let c = centralizer(&s3, &t);
        let mut es = c.elements().unwrap();
        es.sort();
        let brute: Vec<Element> = s3.elements().unwrap().iter().filter(|h| s3.commute(h, &t)).cloned().collect();
        let mut brute = brute;
        brute.sort();
        assert_eq!(es, brute);
        assert_eq!(es.len(), 2);
        assert_eq!(torsion_conjugacy_classes(&s3).len(), 3);
    }

    #[test]
    fn amalgam_centralizers() {
        let g = Group::amalgam(2, 3).unwrap();
        let y = Element::Word(vec![(1, 2)]);
        let c = centralizer(&g, &y);
        assert_eq!(c.order(), Some(3));
        let xy = Element::Word(vec![(0, 1), (1, 1)]);
        let sq = g.mul(&xy, &xy);
        let c = centralizer(&g, &sq);
        assert!(c.contains(&xy));
        assert!(!c.is_finite());
        assert_eq!(torsion_conjugacy_classes(&g).len(), 4);
    }

    #[test]
    fn dihedral_chain() {
        let g = Group::infinite_dihedral();
        let ch = SubgroupChain::by_indices(&g, &[2, 4, 8]).unwrap();
        let g2 = &ch.levels()[1].subgroup;
        assert!(g2.contains(&Element::Dihedral(8, 1)));
        assert!(!g2.contains(&Element::Dihedral(2, 0)));
        assert!(SubgroupChain::by_indices(&g, &[2, 3]).is_err());
        assert_eq!(ch.index(0), 1);
    }
}
