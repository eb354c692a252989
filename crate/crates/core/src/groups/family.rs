use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::GroupError;

/// Largest permutation group we are willing to enumerate.
pub const MAX_FINITE_ORDER: usize = 50_000;

/// A group element in the canonical form of its family.
///
/// * `Cyclic(k)`: `t^k` with `0 <= k < m`;
/// * `Int(n)`: `t^n` in the integers;
/// * `Dihedral(n, i)`: the pair `(n, i)` in `Z ⋊ Z/2`;
/// * `Word`: reduced alternating syllables `(generator, exponent)` in `Z/a * Z/b`;
/// * `Perm`: images of `0..degree`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Element {
    Cyclic(u64),
    Int(i64),
    Dihedral(i64, u8),
    Word(Vec<(u8, u64)>),
    Perm(Vec<u32>),
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Element::Cyclic(k) => write!(f, "t^{k}"),
            Element::Int(n) => write!(f, "t^{n}"),
            Element::Dihedral(n, i) => write!(f, "({n},{i})"),
            Element::Word(w) if w.is_empty() => write!(f, "e"),
            Element::Word(w) => {
                let s: Vec<String> =
                    w.iter().map(|&(g, e)| format!("{}^{e}", if g == 0 { "x" } else { "y" })).collect();
                write!(f, "{}", s.join(""))
            }
            Element::Perm(p) => write!(f, "{p:?}"),
        }
    }
}

/// Word in the family generators: `(generator index, exponent)` syllables.
pub type GenWord = Vec<(usize, i64)>;

/// Serializable description of a built-in group.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", try_from = "GroupRepr")]
pub enum GroupDesc {
    /// `Z/m`; `m = 1` is the trivial group.
    FiniteCyclic { m: u64 },
    FinitePermutation { degree: usize, generators: Vec<Vec<u32>> },
    FreeAbelianRank1,
    InfiniteDihedral,
    /// `Z/a * Z/b` with generators `x` (order `a`) and `y` (order `b`).
    Amalgam { a: u64, b: u64 },
}

#[derive(Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
enum GroupRepr {
    Trivial,
    FiniteCyclic {
        m: u64,
    },
    FinitePermutation {
        degree: usize,
        generators: Vec<Vec<u32>>,
    },
    #[serde(alias = "integers")]
    FreeAbelianRank1,
    InfiniteDihedral,
    Amalgam {
        a: u64,
        b: u64,
    },
}

impl TryFrom<GroupRepr> for GroupDesc {
    type Error = GroupError;

    fn try_from(r: GroupRepr) -> Result<Self, GroupError> {
        let d = match r {
            GroupRepr::Trivial => GroupDesc::FiniteCyclic { m: 1 },
            GroupRepr::FiniteCyclic { m } => GroupDesc::FiniteCyclic { m },
            GroupRepr::FinitePermutation { degree, generators } => GroupDesc::FinitePermutation { degree, generators },
            GroupRepr::FreeAbelianRank1 => GroupDesc::FreeAbelianRank1,
            GroupRepr::InfiniteDihedral => GroupDesc::InfiniteDihedral,
            GroupRepr::Amalgam { a, b } => GroupDesc::Amalgam { a, b },
        };
        d.validate()?;
        Ok(d)
    }
}

impl GroupDesc {
    pub fn validate(&self) -> Result<(), GroupError> {
        match self {
            GroupDesc::FiniteCyclic { m } if *m == 0 => Err(GroupError::Invalid("cyclic order must be positive".into())),
            GroupDesc::Amalgam { a, b } if *a < 2 || *b < 2 => {
                Err(GroupError::Invalid(format!("amalgam factors must have order >= 2, got {a} and {b}")))
            }
            GroupDesc::FinitePermutation { degree, generators } => {
                for g in generators {
                    if !is_permutation(g, *degree) {
                        return Err(GroupError::Invalid(format!("{g:?} is not a permutation of 0..{degree}")));
                    }
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn name(&self) -> String {
        match self {
            GroupDesc::FiniteCyclic { m: 1 } => "1".into(),
            GroupDesc::FiniteCyclic { m } => format!("Z/{m}"),
            GroupDesc::FinitePermutation { degree, generators } => {
                format!("<{} perms on {degree} points>", generators.len())
            }
            GroupDesc::FreeAbelianRank1 => "Z".into(),
            GroupDesc::InfiniteDihedral => "D_inf".into(),
            GroupDesc::Amalgam { a, b } => format!("Z/{a}*Z/{b}"),
        }
    }
}

fn is_permutation(p: &[u32], degree: usize) -> bool {
    if p.len() != degree {
        return false;
    }
    let mut seen = vec![false; degree];
    for &x in p {
        let x = x as usize;
        if x >= degree || seen[x] {
            return false;
        }
        seen[x] = true;
    }
    true
}

struct FiniteData {
    elements: Vec<Element>,
    index: HashMap<Element, usize>,
    words: Vec<GenWord>,
}

struct Inner {
    desc: GroupDesc,
    gens: Vec<Element>,
    finite: Option<FiniteData>,
}

/// A built-in group with cached enumeration for the finite families.
/// Cloning is cheap.
#[derive(Clone)]
pub struct Group(Arc<Inner>);

impl fmt::Debug for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Group({})", self.0.desc.name())
    }
}

impl PartialEq for Group {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.desc == other.0.desc
    }
}

impl Eq for Group {}

impl Group {
    pub fn new(desc: GroupDesc) -> Result<Group, GroupError> {
        desc.validate()?;
        let gens = match &desc {
            GroupDesc::FiniteCyclic { m: 1 } => vec![],
            GroupDesc::FiniteCyclic { .. } => vec![Element::Cyclic(1)],
            GroupDesc::FinitePermutation { generators, .. } => generators.iter().cloned().map(Element::Perm).collect(),
            GroupDesc::FreeAbelianRank1 => vec![Element::Int(1)],
            GroupDesc::InfiniteDihedral => vec![Element::Dihedral(1, 0), Element::Dihedral(0, 1)],
            GroupDesc::Amalgam { .. } => vec![Element::Word(vec![(0, 1)]), Element::Word(vec![(1, 1)])],
        };
        let mut inner = Inner { desc, gens, finite: None };
        inner.finite = match &inner.desc {
            GroupDesc::FiniteCyclic { m } => {
                let elements: Vec<Element> = (0..*m).map(Element::Cyclic).collect();
                let words = (0..*m).map(|k| if k == 0 { vec![] } else { vec![(0, k as i64)] }).collect();
                Some(finite_data(elements, words))
            }
            GroupDesc::FinitePermutation { .. } => Some(enumerate_perm(&inner)?),
            _ => None,
        };
        Ok(Group(Arc::new(inner)))
    }

    pub fn trivial() -> Group {
        Group::new(GroupDesc::FiniteCyclic { m: 1 }).expect("valid")
    }

    pub fn cyclic(m: u64) -> Group {
        Group::new(GroupDesc::FiniteCyclic { m }).expect("m >= 1")
    }

    pub fn integers() -> Group {
        Group::new(GroupDesc::FreeAbelianRank1).expect("valid")
    }

    pub fn infinite_dihedral() -> Group {
        Group::new(GroupDesc::InfiniteDihedral).expect("valid")
    }

    pub fn amalgam(a: u64, b: u64) -> Result<Group, GroupError> {
        Group::new(GroupDesc::Amalgam { a, b })
    }

    pub fn permutation(degree: usize, generators: Vec<Vec<u32>>) -> Result<Group, GroupError> {
        Group::new(GroupDesc::FinitePermutation { degree, generators })
    }

    /// The symmetric group on `n` points, generated by a transposition and an `n`-cycle.
    pub fn symmetric(n: usize) -> Group {
        let mut gens = Vec::new();
        if n >= 2 {
            let mut t: Vec<u32> = (0..n as u32).collect();
            t.swap(0, 1);
            gens.push(t);
            if n >= 3 {
                gens.push((0..n as u32).map(|i| (i + 1) % n as u32).collect());
            }
        }
        Group::permutation(n, gens).expect("valid generators")
    }

    pub fn desc(&self) -> &GroupDesc {
        &self.0.desc
    }

    pub fn name(&self) -> String {
        self.0.desc.name()
    }

    pub fn generators(&self) -> &[Element] {
        &self.0.gens
    }

    pub fn is_finite(&self) -> bool {
        self.0.finite.is_some()
    }

    pub fn order(&self) -> Option<usize> {
        self.0.finite.as_ref().map(|f| f.elements.len())
    }

    /// All elements, identity first (finite families only).
    pub fn elements(&self) -> Option<&[Element]> {
        self.0.finite.as_ref().map(|f| f.elements.as_slice())
    }

    /// Position in [`Group::elements`].
    pub fn index_of(&self, g: &Element) -> Option<usize> {
        self.0.finite.as_ref().and_then(|f| f.index.get(g).copied())
    }

    pub fn is_abelian(&self) -> bool {
        match &self.0.desc {
            GroupDesc::FiniteCyclic { .. } | GroupDesc::FreeAbelianRank1 => true,
            GroupDesc::InfiniteDihedral | GroupDesc::Amalgam { .. } => false,
            GroupDesc::FinitePermutation { .. } => {
                let g = &self.0.gens;
                g.iter().all(|a| g.iter().all(|b| self.mul(a, b) == self.mul(b, a)))
            }
        }
    }

    pub fn identity(&self) -> Element {
        match &self.0.desc {
            GroupDesc::FiniteCyclic { .. } => Element::Cyclic(0),
            GroupDesc::FreeAbelianRank1 => Element::Int(0),
            GroupDesc::InfiniteDihedral => Element::Dihedral(0, 0),
            GroupDesc::Amalgam { .. } => Element::Word(vec![]),
            GroupDesc::FinitePermutation { degree, .. } => Element::Perm((0..*degree as u32).collect()),
        }
    }

    pub fn is_identity(&self, g: &Element) -> bool {
        *g == self.identity()
    }

    /// Whether `g` is a canonical element of this group.
    pub fn contains(&self, g: &Element) -> bool {
        match (&self.0.desc, g) {
            (GroupDesc::FiniteCyclic { m }, Element::Cyclic(k)) => k < m,
            (GroupDesc::FreeAbelianRank1, Element::Int(_)) => true,
            (GroupDesc::InfiniteDihedral, Element::Dihedral(_, i)) => *i < 2,
            (GroupDesc::Amalgam { a, b }, Element::Word(w)) => {
                w.iter().all(|&(g, e)| (g == 0 && e >= 1 && e < *a) || (g == 1 && e >= 1 && e < *b))
                    && w.windows(2).all(|p| p[0].0 != p[1].0)
            }
            (GroupDesc::FinitePermutation { .. }, Element::Perm(_)) => self.index_of(g).is_some(),
            _ => false,
        }
    }

    pub fn mul(&self, x: &Element, y: &Element) -> Element {
        match (&self.0.desc, x, y) {
            (GroupDesc::FiniteCyclic { m }, Element::Cyclic(a), Element::Cyclic(b)) => Element::Cyclic((a + b) % m),
            (GroupDesc::FreeAbelianRank1, Element::Int(a), Element::Int(b)) => Element::Int(a + b),
            (GroupDesc::InfiniteDihedral, Element::Dihedral(n, i), Element::Dihedral(m, j)) => {
                let s = if *i == 0 { *m } else { -*m };
                Element::Dihedral(n + s, (i + j) % 2)
            }
            (GroupDesc::Amalgam { a, b }, Element::Word(u), Element::Word(v)) => {
                let mut w = u.clone();
                for &syl in v {
                    push_syllable(&mut w, syl, *a, *b);
                }
                Element::Word(w)
            }
            (GroupDesc::FinitePermutation { .. }, Element::Perm(p), Element::Perm(q)) => {
                Element::Perm(q.iter().map(|&k| p[k as usize]).collect())
            }
            _ => panic!("elements {x} and {y} do not belong to {}", self.name()),
        }
    }

    pub fn inv(&self, x: &Element) -> Element {
        match (&self.0.desc, x) {
            (GroupDesc::FiniteCyclic { m }, Element::Cyclic(a)) => Element::Cyclic((m - a) % m),
            (GroupDesc::FreeAbelianRank1, Element::Int(a)) => Element::Int(-a),
            (GroupDesc::InfiniteDihedral, Element::Dihedral(n, i)) => {
                if *i == 0 {
                    Element::Dihedral(-n, 0)
                } else {
                    Element::Dihedral(*n, 1)
                }
            }
            (GroupDesc::Amalgam { a, b }, Element::Word(w)) => Element::Word(
                w.iter().rev().map(|&(g, e)| (g, (if g == 0 { a } else { b }) - e)).collect(),
            ),
            (GroupDesc::FinitePermutation { .. }, Element::Perm(p)) => {
                let mut q = vec![0u32; p.len()];
                for (i, &v) in p.iter().enumerate() {
                    q[v as usize] = i as u32;
                }
                Element::Perm(q)
            }
            _ => panic!("element {x} does not belong to {}", self.name()),
        }
    }

    /// `x^e` by repeated squaring; negative exponents allowed.
    pub fn pow(&self, x: &Element, e: i64) -> Element {
        let mut base = if e < 0 { self.inv(x) } else { x.clone() };
        let mut k = e.unsigned_abs();
        let mut acc = self.identity();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            k >>= 1;
        }
        acc
    }

    /// `h x h^-1`.
    pub fn conjugate(&self, h: &Element, x: &Element) -> Element {
        self.mul(&self.mul(h, x), &self.inv(h))
    }

    pub fn commute(&self, x: &Element, y: &Element) -> bool {
        self.mul(x, y) == self.mul(y, x)
    }

    /// Canonical word in [`Group::generators`].
    pub fn word(&self, g: &Element) -> GenWord {
        match (&self.0.desc, g) {
            (GroupDesc::FiniteCyclic { .. }, Element::Cyclic(k)) => {
                if *k == 0 {
                    vec![]
                } else {
                    vec![(0, *k as i64)]
                }
            }
            (GroupDesc::FreeAbelianRank1, Element::Int(n)) => {
                if *n == 0 {
                    vec![]
                } else {
                    vec![(0, *n)]
                }
            }
            (GroupDesc::InfiniteDihedral, Element::Dihedral(n, i)) => {
                let mut w = Vec::new();
                if *n != 0 {
                    w.push((0, *n));
                }
                if *i == 1 {
                    w.push((1, 1));
                }
                w
            }
            (GroupDesc::Amalgam { .. }, Element::Word(w)) => w.iter().map(|&(g, e)| (g as usize, e as i64)).collect(),
            (GroupDesc::FinitePermutation { .. }, Element::Perm(_)) => {
                let f = self.0.finite.as_ref().expect("finite");
                f.words[f.index[g]].clone()
            }
            _ => panic!("element {g} does not belong to {}", self.name()),
        }
    }

    /// Evaluates a word with respect to arbitrary images of the generators.
    pub fn eval_word<T, F, M>(word: &[(usize, i64)], identity: T, mut power: F, mut mul: M) -> T
    where
        F: FnMut(usize, i64) -> T,
        M: FnMut(&T, &T) -> T,
    {
        let mut acc = identity;
        for &(g, e) in word {
            let p = power(g, e);
            acc = mul(&acc, &p);
        }
        acc
    }

    /// Order of `g`, or `None` when infinite.
    pub fn element_order(&self, g: &Element) -> Option<u64> {
        match (&self.0.desc, g) {
            (GroupDesc::FiniteCyclic { m }, Element::Cyclic(k)) => Some(m / m.gcd(k)),
            (GroupDesc::FreeAbelianRank1, Element::Int(n)) => (*n == 0).then_some(1),
            (GroupDesc::InfiniteDihedral, Element::Dihedral(n, i)) => {
                if *i == 1 {
                    Some(2)
                } else {
                    (*n == 0).then_some(1)
                }
            }
            (GroupDesc::Amalgam { a, b }, Element::Word(_)) => {
                let (_, core) = self.cyclic_reduction(g);
                match core.as_slice() {
                    [] => Some(1),
                    [(gen, e)] => {
                        let o = if *gen == 0 { *a } else { *b };
                        Some(o / o.gcd(e))
                    }
                    _ => None,
                }
            }
            (GroupDesc::FinitePermutation { .. }, Element::Perm(p)) => {
                let mut seen = vec![false; p.len()];
                let mut ord = 1u64;
                for s in 0..p.len() {
                    if seen[s] {
                        continue;
                    }
                    let mut len = 0u64;
                    let mut x = s;
                    while !seen[x] {
                        seen[x] = true;
                        x = p[x] as usize;
                        len += 1;
                    }
                    ord = ord.lcm(&len);
                }
                Some(ord)
            }
            _ => panic!("element {g} does not belong to {}", self.name()),
        }
    }

    /// For amalgam words: `g = w c w^-1` with `c` cyclically reduced.
    pub(crate) fn cyclic_reduction(&self, g: &Element) -> (Element, Vec<(u8, u64)>) {
        let GroupDesc::Amalgam { a, b } = self.0.desc else {
            panic!("cyclic reduction only applies to amalgams");
        };
        let Element::Word(w) = g else { panic!("not an amalgam word") };
        let mut core = w.clone();
        let mut conj: Vec<(u8, u64)> = Vec::new();
        while core.len() >= 2 && core[0].0 == core[core.len() - 1].0 {
            // g = s c' s^-1 ... peel the first syllable: core = s * rest, move s to the end
            let s = core.remove(0);
            conj.push(s);
            let mut merged = Vec::new();
            for syl in core.iter() {
                push_syllable(&mut merged, *syl, a, b);
            }
            push_syllable(&mut merged, s, a, b);
            core = merged;
        }
        (Element::Word(conj), core)
    }

    pub fn parse_element(&self, v: &serde_json::Value) -> Result<Element, GroupError> {
        let e: Element = serde_json::from_value(v.clone()).map_err(|e| GroupError::Invalid(e.to_string()))?;
        if !self.contains(&e) {
            return Err(GroupError::Invalid(format!("{e} is not a canonical element of {}", self.name())));
        }
        Ok(e)
    }
}

fn push_syllable(w: &mut Vec<(u8, u64)>, syl: (u8, u64), a: u64, b: u64) {
    let order = if syl.0 == 0 { a } else { b };
    let e = syl.1 % order;
    if e == 0 {
        return;
    }
    match w.last_mut() {
        Some(last) if last.0 == syl.0 => {
            let s = (last.1 + e) % order;
            if s == 0 {
                w.pop();
            } else {
                last.1 = s;
            }
        }
        _ => w.push((syl.0, e)),
    }
}

fn finite_data(elements: Vec<Element>, words: Vec<GenWord>) -> FiniteData {
    let index = elements.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect();
    FiniteData { elements, index, words }
}

fn enumerate_perm(inner: &Inner) -> Result<FiniteData, GroupError> {
    let GroupDesc::FinitePermutation { degree, .. } = &inner.desc else { unreachable!() };
    let id = Element::Perm((0..*degree as u32).collect());
    let mut elements = vec![id.clone()];
    let mut words: Vec<GenWord> = vec![vec![]];
    let mut index: HashMap<Element, usize> = HashMap::from([(id, 0)]);
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for (s, gen) in inner.gens.iter().enumerate() {
            let (Element::Perm(p), Element::Perm(q)) = (gen, &elements[i]) else { unreachable!() };
            let prod = Element::Perm(q.iter().map(|&k| p[k as usize]).collect());
            if index.contains_key(&prod) {
                continue;
            }
            if elements.len() >= MAX_FINITE_ORDER {
                return Err(GroupError::BudgetExceeded { needed: elements.len() + 1, budget: MAX_FINITE_ORDER });
            }
            let mut w = vec![(s, 1)];
            w.extend(words[i].iter().copied());
            index.insert(prod.clone(), elements.len());
            queue.push_back(elements.len());
            elements.push(prod);
            words.push(w);
        }
    }
    Ok(FiniteData { elements, index, words })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dihedral_law() {
        let g = Group::infinite_dihedral();
        let x = Element::Dihedral(3, 1);
        let y = Element::Dihedral(5, 0);
        assert_eq!(g.mul(&x, &y), Element::Dihedral(-2, 1));
        assert_eq!(g.mul(&x, &g.inv(&x)), g.identity());
        assert_eq!(g.element_order(&x), Some(2));
        assert_eq!(g.element_order(&y), None);
        let w = g.word(&x);
        let back = Group::eval_word(&w, g.identity(), |i, e| g.pow(&g.generators()[i], e), |a, b| g.mul(a, b));
        assert_eq!(back, x);
    }

    #[test]
    fn amalgam_reduction() {
        let g = Group::amalgam(2, 3).unwrap();
        let x = Element::Word(vec![(0, 1)]);
        let y = Element::Word(vec![(1, 1)]);
        let xy = g.mul(&x, &y);
        assert_eq!(g.mul(&xy, &g.inv(&xy)), g.identity());
        assert_eq!(g.pow(&y, 3), g.identity());
        assert_eq!(g.element_order(&xy), None);
        let conj = g.conjugate(&xy, &x);
        assert_eq!(g.element_order(&conj), Some(2));
        assert!(g.contains(&conj));
    }

    #[test]
    fn symmetric_three() {
        let s3 = Group::symmetric(3);
        assert_eq!(s3.order(), Some(6));
        assert!(!s3.is_abelian());
        for e in s3.elements().unwrap() {
            let w = s3.word(e);
            let back =
                Group::eval_word(&w, s3.identity(), |i, k| s3.pow(&s3.generators()[i], k), |a, b| s3.mul(a, b));
            assert_eq!(&back, e);
        }
    }

    #[test]
    fn json_forms() {
        let d: GroupDesc = serde_json::from_str(r#"{"family":"trivial"}"#).unwrap();
        assert_eq!(d, GroupDesc::FiniteCyclic { m: 1 });
        let d: GroupDesc = serde_json::from_str(r#"{"family":"amalgam","a":2,"b":3}"#).unwrap();
        assert_eq!(d, GroupDesc::Amalgam { a: 2, b: 3 });
        assert!(serde_json::from_str::<GroupDesc>(r#"{"family":"amalgam","a":1,"b":3}"#).is_err());
        let s = serde_json::to_string(&GroupDesc::InfiniteDihedral).unwrap();
        assert_eq!(s, r#"{"family":"infinite_dihedral"}"#);
    }
}
