//! G-modules presented by induced blocks `Ind_H^G N` with `H` finite,
//! equivariant maps between them, coinvariants and the Shapiro reduction.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::exactalg::{smith_normal_form, AlgError, CoeffRing, FgAbGroup, IntMatrix};
use crate::groups::{Element, GModule, Group, GroupDesc, GroupError, Subgroup};
use crate::gsets::{BlowupLevel, FiniteGSet, GSetError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModError {
    #[error("invalid module: {0}")]
    Invalid(String),
    #[error("map is not equivariant: {0}")]
    NotEquivariant(String),
    #[error("coset decomposition infeasible: {0}")]
    Infeasible(String),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    GSet(#[from] GSetError),
    #[error(transparent)]
    Alg(#[from] AlgError),
}

/// Inverse of a unimodular integer matrix.
pub fn unimodular_inverse(m: &IntMatrix) -> Option<IntMatrix> {
    if m.rows() != m.cols() {
        return None;
    }
    let s = smith_normal_form(m);
    if s.rank() != m.rows() || s.invariants.iter().any(|d| !d.is_one()) {
        return None;
    }
    Some(&s.v * &s.u)
}

/// `Z^rank` with a left action given on the generators of `group`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteRankModule {
    group: Group,
    rank: usize,
    gens: Vec<IntMatrix>,
    inv_gens: Vec<IntMatrix>,
}

impl FiniteRankModule {
    /// Checks invertibility and the relators of the group (the full
    /// multiplication table for permutation groups).
    pub fn new(group: Group, rank: usize, gens: Vec<IntMatrix>) -> Result<FiniteRankModule, ModError> {
        if gens.len() != group.generators().len() {
            return Err(ModError::Invalid("one matrix per group generator is required".into()));
        }
        let mut inv_gens = Vec::new();
        for g in &gens {
            if g.shape() != (rank, rank) {
                return Err(ModError::Invalid(format!("generator matrix has shape {:?}", g.shape())));
            }
            inv_gens.push(unimodular_inverse(g).ok_or_else(|| ModError::Invalid("generator matrix is not invertible".into()))?);
        }
        let m = FiniteRankModule { group, rank, gens, inv_gens };
        m.check_relators()?;
        Ok(m)
    }

    pub fn trivial(group: &Group, rank: usize) -> FiniteRankModule {
        let gens = vec![IntMatrix::identity(rank); group.generators().len()];
        FiniteRankModule { group: group.clone(), rank, gens: gens.clone(), inv_gens: gens }
    }

    /// The permutation module of a finite G-set.
    pub fn from_gset(s: &FiniteGSet) -> FiniteRankModule {
        let gens: Vec<IntMatrix> = s.group().generators().iter().map(|g| GModule::act(s, g)).collect();
        let inv_gens = s.group().generators().iter().map(|g| GModule::act(s, &s.group().inv(g))).collect();
        FiniteRankModule { group: s.group().clone(), rank: s.len(), gens, inv_gens }
    }

    fn check_relators(&self) -> Result<(), ModError> {
        let id = IntMatrix::identity(self.rank);
        let pw = |i: usize, e: u64| (0..e).fold(id.clone(), |acc, _| &self.gens[i] * &acc);
        let fail = |r: &str| Err(ModError::Invalid(format!("action violates the relator {r}")));
        match self.group.desc() {
            GroupDesc::FiniteCyclic { m } if *m > 1 => {
                if pw(0, *m) != id {
                    return fail("t^m");
                }
            }
            GroupDesc::FiniteCyclic { .. } | GroupDesc::FreeAbelianRank1 => {}
            GroupDesc::InfiniteDihedral => {
                let (t, s) = (&self.gens[0], &self.gens[1]);
                if s * s != id || &(s * t) * s != self.inv_gens[0] {
                    return fail("s^2, s t s = t^-1");
                }
            }
            GroupDesc::Amalgam { a, b } => {
                if pw(0, *a) != id || pw(1, *b) != id {
                    return fail("x^a, y^b");
                }
            }
            GroupDesc::FinitePermutation { .. } => {
                for (i, s) in self.group.generators().iter().enumerate() {
                    for e in self.group.elements().expect("finite") {
                        if self.act(&self.group.mul(s, e)) != &self.gens[i] * &self.act(e) {
                            return fail("of the multiplication table");
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Restriction along a subgroup, over its abstract group.
    pub fn restrict(&self, h: &Subgroup) -> Result<FiniteRankModule, ModError> {
        if h.ambient() != &self.group {
            return Err(ModError::Invalid("subgroup of a different group".into()));
        }
        let gens = h.generators().iter().map(|g| self.act(g)).collect();
        FiniteRankModule::new(h.abstract_group().clone(), self.rank, gens)
    }

    pub fn generator_matrices(&self) -> &[IntMatrix] {
        &self.gens
    }
}

impl GModule for FiniteRankModule {
    fn group(&self) -> &Group {
        &self.group
    }

    fn rank(&self) -> usize {
        self.rank
    }

    fn act(&self, g: &Element) -> IntMatrix {
        let w = self.group.word(g);
        Group::eval_word(
            &w,
            IntMatrix::identity(self.rank),
            |i, e| {
                let base = if e < 0 { &self.inv_gens[i] } else { &self.gens[i] };
                (0..e.unsigned_abs()).fold(IntMatrix::identity(self.rank), |acc, _| base * &acc)
            },
            |a, b| a * b,
        )
    }
}

/// `Ind_H^G N` for a finite subgroup `H`; the action matrices of every
/// element of `H` are cached.
#[derive(Clone, Debug)]
pub struct Block {
    subgroup: Subgroup,
    module: FiniteRankModule,
    elements: Vec<Element>,
    index: HashMap<Element, usize>,
    mats: Vec<IntMatrix>,
}

impl Block {
    pub fn new(subgroup: Subgroup, module: FiniteRankModule) -> Result<Block, ModError> {
        if module.group() != subgroup.abstract_group() {
            return Err(ModError::Invalid("block module is not over the abstract inducing group".into()));
        }
        let abs = subgroup
            .abstract_group()
            .elements()
            .ok_or_else(|| ModError::Invalid("inducing subgroups must be finite".into()))?
            .to_vec();
        let elements: Vec<Element> = abs.iter().map(|e| subgroup.embed(e)).collect();
        let index = elements.iter().enumerate().map(|(i, e)| (e.clone(), i)).collect();
        let mats = abs.iter().map(|e| module.act(e)).collect();
        Ok(Block { subgroup, module, elements, index, mats })
    }

    /// `Ind_H^G` of the trivial rank-one module.
    pub fn permutation(subgroup: Subgroup) -> Result<Block, ModError> {
        let m = FiniteRankModule::trivial(subgroup.abstract_group(), 1);
        Block::new(subgroup, m)
    }

    pub fn subgroup(&self) -> &Subgroup {
        &self.subgroup
    }

    pub fn module(&self) -> &FiniteRankModule {
        &self.module
    }

    pub fn rank(&self) -> usize {
        self.module.rank
    }

    /// Ambient elements of `H`.
    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    /// Action matrix of an ambient element of `H`.
    pub fn act(&self, h: &Element) -> Option<&IntMatrix> {
        self.index.get(h).map(|&i| &self.mats[i])
    }

    /// `t ⊗ v = r ⊗ ρ(r^{-1} t) v` with `r` the least element of `tH`.
    pub fn canonical(&self, g: &Group, t: &Element) -> (Element, &IntMatrix) {
        let rep = self.elements.iter().map(|h| g.mul(t, h)).min().expect("nonempty subgroup");
        let h = g.mul(&g.inv(&rep), t);
        (rep, self.act(&h).expect("coset representative"))
    }
}

#[derive(Clone, Debug)]
pub struct InducedModule {
    group: Group,
    blocks: Vec<Block>,
    coeffs: CoeffRing,
}

impl InducedModule {
    pub fn new(group: Group, blocks: Vec<Block>, coeffs: CoeffRing) -> Result<InducedModule, ModError> {
        coeffs.validate()?;
        if blocks.iter().any(|b| b.subgroup.ambient() != &group) {
            return Err(ModError::Invalid("block subgroups must live in the module's group".into()));
        }
        Ok(InducedModule { group, blocks, coeffs })
    }

    /// `k[S] = ⊕_orbits Ind_{Stab}^G k`; stabilizers must be finite.
    pub fn from_gset(s: &FiniteGSet, coeffs: CoeffRing) -> Result<InducedModule, ModError> {
        let blocks = s
            .orbits_and_stabilizers()?
            .into_iter()
            .map(|o| Block::permutation(o.stabilizer))
            .collect::<Result<_, _>>()?;
        InducedModule::new(s.group().clone(), blocks, coeffs)
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn coeffs(&self) -> &CoeffRing {
        &self.coeffs
    }

    /// The underlying finite-rank module when `G` is finite; the basis is
    /// `(block, coset, basis vector)` with cosets ordered by least element.
    pub fn to_finite_rank(&self) -> Result<(FiniteRankModule, Vec<(usize, Element)>), ModError> {
        let es = self.group.elements().ok_or_else(|| ModError::Infeasible("infinite group".into()))?;
        let mut basis: Vec<(usize, Element)> = Vec::new();
        let mut offsets = Vec::new();
        let mut pos: HashMap<(usize, Element), usize> = HashMap::new();
        let mut total = 0usize;
        for (b, blk) in self.blocks.iter().enumerate() {
            let mut reps: Vec<Element> = es.iter().map(|t| blk.canonical(&self.group, t).0).collect();
            reps.sort();
            reps.dedup();
            for r in reps {
                pos.insert((b, r.clone()), total);
                offsets.push((b, r.clone()));
                basis.push((b, r));
                total += blk.rank();
            }
        }
        let gens = self
            .group
            .generators()
            .iter()
            .map(|s| {
                let mut m = IntMatrix::zeros(total, total);
                for (b, r) in &offsets {
                    let blk = &self.blocks[*b];
                    let (rep, mat) = blk.canonical(&self.group, &self.group.mul(s, r));
                    m.add_block(pos[&(*b, rep)], pos[&(*b, r.clone())], mat);
                }
                m
            })
            .collect();
        Ok((FiniteRankModule::new(self.group.clone(), total, gens)?, basis))
    }
}

/// One image term `t ⊗ M v` in block `target`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MapTerm {
    pub t: Element,
    pub target: usize,
    pub matrix: IntMatrix,
}

/// A G-map given on block generators: `1 ⊗ v ↦ Σ t ⊗ M v` per source block.
#[derive(Clone, Debug)]
pub struct EquivariantMap {
    terms: Vec<Vec<MapTerm>>,
}

type Canon = BTreeMap<(usize, Element), IntMatrix>;

fn canonicalize(g: &Group, tgt: &InducedModule, terms: &[MapTerm], right: Option<&IntMatrix>) -> Canon {
    let mut out: Canon = BTreeMap::new();
    for term in terms {
        let (rep, h) = tgt.blocks[term.target].canonical(g, &term.t);
        let mut m = h * &term.matrix;
        if let Some(r) = right {
            m = &m * r;
        }
        let e = out.entry((term.target, rep)).or_insert_with(|| IntMatrix::zeros(m.rows(), m.cols()));
        *e = &*e + &m;
    }
    out.retain(|_, m| !m.is_zero());
    out
}

impl EquivariantMap {
    /// Checks shapes and equivariance on the generators of each source
    /// stabilizer.
    pub fn new(src: &InducedModule, tgt: &InducedModule, terms: Vec<Vec<MapTerm>>) -> Result<EquivariantMap, ModError> {
        if src.group != tgt.group || terms.len() != src.blocks.len() {
            return Err(ModError::Invalid("map data does not match the source blocks".into()));
        }
        let g = &src.group;
        for (b, ts) in terms.iter().enumerate() {
            let sb = &src.blocks[b];
            for term in ts {
                let tb = tgt.blocks.get(term.target).ok_or_else(|| ModError::Invalid("target block out of range".into()))?;
                if term.matrix.shape() != (tb.rank(), sb.rank()) || !g.contains(&term.t) {
                    return Err(ModError::Invalid(format!("bad term in source block {b}")));
                }
            }
            for h in sb.subgroup.generators() {
                let lhs = canonicalize(g, tgt, ts, sb.act(h));
                let moved: Vec<MapTerm> =
                    ts.iter().map(|t| MapTerm { t: g.mul(h, &t.t), target: t.target, matrix: t.matrix.clone() }).collect();
                let rhs = canonicalize(g, tgt, &moved, None);
                if lhs != rhs {
                    return Err(ModError::NotEquivariant(format!("source block {b}, stabilizer generator {h}")));
                }
            }
        }
        Ok(EquivariantMap { terms })
    }

    pub fn zero(src: &InducedModule) -> EquivariantMap {
        EquivariantMap { terms: vec![Vec::new(); src.blocks.len()] }
    }

    pub fn identity(m: &InducedModule) -> EquivariantMap {
        let terms = (0..m.blocks.len())
            .map(|b| vec![MapTerm { t: m.group.identity(), target: b, matrix: IntMatrix::identity(m.blocks[b].rank()) }])
            .collect();
        EquivariantMap { terms }
    }

    pub fn terms(&self) -> &[Vec<MapTerm>] {
        &self.terms
    }

    /// `other ∘ self`.
    pub fn then(&self, g: &Group, other: &EquivariantMap) -> EquivariantMap {
        let terms = self
            .terms
            .iter()
            .map(|ts| {
                let mut out = Vec::new();
                for t in ts {
                    for u in &other.terms[t.target] {
                        out.push(MapTerm { t: g.mul(&t.t, &u.t), target: u.target, matrix: &u.matrix * &t.matrix });
                    }
                }
                out
            })
            .collect();
        EquivariantMap { terms }
    }

    /// Sum of two maps with the same source and target.
    pub fn add(&self, other: &EquivariantMap) -> EquivariantMap {
        let terms = self.terms.iter().zip(&other.terms).map(|(a, b)| a.iter().chain(b).cloned().collect()).collect();
        EquivariantMap { terms }
    }

    pub fn scale(&self, k: i64) -> EquivariantMap {
        let k = BigInt::from(k);
        let terms = self
            .terms
            .iter()
            .map(|ts| ts.iter().map(|t| MapTerm { matrix: t.matrix.scale(&k), ..t.clone() }).collect())
            .collect();
        EquivariantMap { terms }
    }

    /// Whether the map vanishes after canonicalizing every block image.
    pub fn is_zero(&self, g: &Group, tgt: &InducedModule) -> bool {
        self.terms.iter().all(|ts| canonicalize(g, tgt, ts, None).is_empty())
    }
}

/// Per block, the cokernel `N_H` of the stacked `ρ(h) - 1`.
#[derive(Clone, Debug)]
pub struct BlockCoinvariants {
    /// `moduli.len() x rank`: basis vector to coinvariant coordinates.
    pub projection: IntMatrix,
    /// `rank x moduli.len()`: a lift of each coinvariant generator.
    pub lift: IntMatrix,
    pub offset: usize,
}

/// `M_G` presented as `⊕ k/moduli[i]` (0 = free), concatenated over blocks.
#[derive(Clone, Debug)]
pub struct Coinvariants {
    pub moduli: Vec<BigInt>,
    pub blocks: Vec<BlockCoinvariants>,
    pub coeffs: CoeffRing,
}

impl Coinvariants {
    pub fn group(&self) -> FgAbGroup {
        FgAbGroup::from_cyclic_orders(0, &self.moduli, self.coeffs.clone())
    }

    pub fn len(&self) -> usize {
        self.moduli.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moduli.is_empty()
    }
}

/// `N_H` of a finite-rank module over the abstract group of `H`, as
/// (moduli, projection, lift) over `coeffs`.
pub fn module_coinvariants(m: &FiniteRankModule, coeffs: &CoeffRing) -> (Vec<BigInt>, IntMatrix, IntMatrix) {
    let n = m.rank;
    let mut rel = IntMatrix::zeros(n, 0);
    for g in &m.gens {
        rel = rel.hstack(&(g - &IntMatrix::identity(n)));
    }
    let s = smith_normal_form(&rel);
    let mut keep = Vec::new();
    let mut moduli = Vec::new();
    for i in 0..n {
        let d = s.invariants.get(i).cloned().unwrap_or_else(BigInt::zero);
        let d = coeffs.non_unit_part(&d);
        if !d.is_one() {
            keep.push(i);
            moduli.push(d);
        }
    }
    (moduli, s.u.select_rows(&keep), s.u_inv.select_cols(&keep))
}

pub fn coinvariants(m: &InducedModule) -> Coinvariants {
    let mut moduli = Vec::new();
    let mut blocks = Vec::new();
    for b in &m.blocks {
        let (md, projection, lift) = module_coinvariants(&b.module, &m.coeffs);
        blocks.push(BlockCoinvariants { projection, lift, offset: moduli.len() });
        moduli.extend(md);
    }
    Coinvariants { moduli, blocks, coeffs: m.coeffs.clone() }
}

/// The matrix of `f_G : (src)_G -> (tgt)_G` on coinvariant generators.
pub fn coinvariants_of_map(f: &EquivariantMap, src: &Coinvariants, tgt: &Coinvariants) -> IntMatrix {
    let mut out = IntMatrix::zeros(tgt.len(), src.len());
    for (b, ts) in f.terms.iter().enumerate() {
        let sb = &src.blocks[b];
        for t in ts {
            let tb = &tgt.blocks[t.target];
            let m = &(&tb.projection * &t.matrix) * &sb.lift;
            out.add_block(tb.offset, sb.offset, &m);
        }
    }
    out.reduce_rows_mod(&tgt.moduli)
}

/// One term of the Shapiro decomposition: `k[X^{g_c}]` over `Z(g_c)`.
#[derive(Clone, Debug)]
pub struct ShapiroPiece {
    /// Index of the torsion class in the blow-up.
    pub class: usize,
    pub centralizer: Subgroup,
    pub module: FiniteGSet,
    pub coeffs: CoeffRing,
}

/// Nonempty blow-up pieces as permutation modules over their centralizers.
pub fn shapiro_decompose(b: &BlowupLevel, coeffs: &CoeffRing) -> Vec<ShapiroPiece> {
    b.pieces
        .iter()
        .enumerate()
        .filter(|(_, p)| !p.is_empty())
        .map(|(i, p)| ShapiroPiece {
            class: i,
            centralizer: p.fixed.centralizer.clone(),
            module: p.fixed.set.clone(),
            coeffs: coeffs.clone(),
        })
        .collect()
}

/// `Res^G_H` of an induced module: one summand per `H`-orbit on the cosets
/// `G/K` of each block, given as an explicit module over `H`. For infinite
/// `G` only cosets `tK` with `t` in the word ball of `radius` are visited and
/// the result is flagged incomplete.
#[derive(Clone, Debug)]
pub struct Restriction {
    /// `(block, coset representative, H-module)` per double coset.
    pub summands: Vec<(usize, Element, FiniteRankModule)>,
    pub complete: bool,
}

pub fn restrict_module(m: &InducedModule, h: &Subgroup, radius: usize) -> Result<Restriction, ModError> {
    let g = &m.group;
    if h.ambient() != g {
        return Err(ModError::Invalid("subgroup of a different group".into()));
    }
    let h_elems = h.elements().ok_or_else(|| ModError::Infeasible("restriction to an infinite subgroup".into()))?;
    let (starts, complete): (Vec<Element>, bool) = match g.elements() {
        Some(es) => (es.to_vec(), true),
        None => (word_ball(g, radius), false),
    };
    let mut summands = Vec::new();
    for (b, blk) in m.blocks.iter().enumerate() {
        let mut seen: Vec<Element> = Vec::new();
        let mut reps: Vec<Element> = starts.iter().map(|t| blk.canonical(g, t).0).collect();
        reps.sort();
        reps.dedup();
        for r in reps {
            if seen.contains(&r) {
                continue;
            }
            // the H-orbit of rK
            let mut orbit: Vec<Element> = h_elems.iter().map(|x| blk.canonical(g, &g.mul(x, &r)).0).collect();
            orbit.sort();
            orbit.dedup();
            seen.extend(orbit.iter().cloned());
            let k = blk.rank();
            let n = orbit.len() * k;
            let pos = |c: &Element| orbit.iter().position(|o| o == c).expect("orbit closed") * k;
            let gens = h
                .generators()
                .iter()
                .map(|s| {
                    let mut mat = IntMatrix::zeros(n, n);
                    for c in &orbit {
                        let (rep, a) = blk.canonical(g, &g.mul(s, c));
                        mat.add_block(pos(&rep), pos(c), a);
                    }
                    mat
                })
                .collect();
            summands.push((b, r.clone(), FiniteRankModule::new(h.abstract_group().clone(), n, gens)?));
        }
    }
    Ok(Restriction { summands, complete })
}

/// Elements of word length at most `radius` in the generators and inverses.
fn word_ball(g: &Group, radius: usize) -> Vec<Element> {
    let mut ball = vec![g.identity()];
    let mut frontier = ball.clone();
    let steps: Vec<Element> = g.generators().iter().flat_map(|s| [s.clone(), g.inv(s)]).collect();
    for _ in 0..radius {
        let mut next = Vec::new();
        for x in &frontier {
            for s in &steps {
                let y = g.mul(s, x);
                if !ball.contains(&y) && !next.contains(&y) {
                    next.push(y);
                }
            }
        }
        ball.extend(next.iter().cloned());
        frontier = next;
    }
    ball
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::group_homology;

    fn c2() -> Group {
        Group::cyclic(2)
    }

    fn one_block(m: FiniteRankModule, coeffs: CoeffRing) -> InducedModule {
        let g = m.group().clone();
        InducedModule::new(g.clone(), vec![Block::new(Subgroup::whole(&g), m).unwrap()], coeffs).unwrap()
    }

    #[test]
    fn sign_and_regular_coinvariants() {
        let sign = FiniteRankModule::new(c2(), 1, vec![IntMatrix::from_dense(&[vec![-1]])]).unwrap();
        assert_eq!(coinvariants(&one_block(sign, CoeffRing::Integers)).group().to_string(), "Z/2");
        let reg = FiniteRankModule::new(c2(), 2, vec![IntMatrix::from_dense(&[vec![0, 1], vec![1, 0]])]).unwrap();
        assert_eq!(coinvariants(&one_block(reg, CoeffRing::Integers)).group().to_string(), "Z");
        let triv = FiniteRankModule::trivial(&Group::trivial(), 2);
        assert_eq!(coinvariants(&one_block(triv, CoeffRing::Integers)).group().to_string(), "Z^2");
    }

    #[test]
    fn relator_violation_rejected() {
        let bad = FiniteRankModule::new(Group::cyclic(3), 1, vec![IntMatrix::from_dense(&[vec![-1]])]);
        assert!(bad.is_err());
    }

    #[test]
    fn induced_from_dihedral_vertex() {
        // Ind_{<(0,1)>}^{D_inf} Z has coinvariants Z
        let g = Group::infinite_dihedral();
        let h = Subgroup::cyclic(&g, &Element::Dihedral(0, 1));
        let m = InducedModule::new(g.clone(), vec![Block::permutation(h).unwrap()], CoeffRing::Integers).unwrap();
        let c = coinvariants(&m);
        assert_eq!(c.group().to_string(), "Z");
        let id = EquivariantMap::identity(&m);
        assert_eq!(coinvariants_of_map(&id, &c, &c), IntMatrix::identity(1));
        let z = EquivariantMap::zero(&m);
        assert!(coinvariants_of_map(&z, &c, &c).is_zero());
    }

    #[test]
    fn equivariance_checked() {
        // Ind_{<(0,1)>} Z -> Ind_{1} Z sending 1 ⊗ 1 to 1 ⊗ 1 is not equivariant
        let g = Group::infinite_dihedral();
        let h = Subgroup::cyclic(&g, &Element::Dihedral(0, 1));
        let src = InducedModule::new(g.clone(), vec![Block::permutation(h).unwrap()], CoeffRing::Integers).unwrap();
        let tgt =
            InducedModule::new(g.clone(), vec![Block::permutation(Subgroup::trivial(&g)).unwrap()], CoeffRing::Integers)
                .unwrap();
        let one = IntMatrix::identity(1);
        let bad = vec![vec![MapTerm { t: g.identity(), target: 0, matrix: one.clone() }]];
        assert!(matches!(EquivariantMap::new(&src, &tgt, bad), Err(ModError::NotEquivariant(_))));
        // the norm-like map 1 ⊗ 1 -> e + (0,1) is equivariant
        let good = vec![vec![
            MapTerm { t: g.identity(), target: 0, matrix: one.clone() },
            MapTerm { t: Element::Dihedral(0, 1), target: 0, matrix: one },
        ]];
        let f = EquivariantMap::new(&src, &tgt, good).unwrap();
        let m = coinvariants_of_map(&f, &coinvariants(&src), &coinvariants(&tgt));
        assert_eq!(m, IntMatrix::from_dense(&[vec![2]]));
    }

    #[test]
    fn h0_equals_coinvariants() {
        let g = Group::symmetric(3);
        let t = Subgroup::cyclic(&g, &Element::Perm(vec![1, 0, 2]));
        let m = InducedModule::new(g.clone(), vec![Block::permutation(t).unwrap()], CoeffRing::Integers).unwrap();
        let (fr, basis) = m.to_finite_rank().unwrap();
        assert_eq!(basis.len(), 3);
        let h = group_homology(&fr, 0, &CoeffRing::Integers).unwrap();
        assert_eq!(h[&0], coinvariants(&m).group());
    }

    #[test]
    fn restriction_to_other_vertex() {
        let g = Group::infinite_dihedral();
        let a = Subgroup::cyclic(&g, &Element::Dihedral(0, 1));
        let b = Subgroup::cyclic(&g, &Element::Dihedral(1, 1));
        let m = InducedModule::new(g.clone(), vec![Block::permutation(a).unwrap()], CoeffRing::Integers).unwrap();
        let r = restrict_module(&m, &b, 4).unwrap();
        assert!(!r.complete);
        // every double coset <b> t <a> is free over <b>
        assert!(r.summands.iter().all(|(_, _, s)| s.rank() == 2));
        let triv = FiniteRankModule::trivial(&g, 1).restrict(&b).unwrap();
        assert_eq!(triv, FiniteRankModule::trivial(&Group::cyclic(2), 1));
    }
}
