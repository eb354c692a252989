use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::ops::RangeInclusive;

use num_bigint::BigInt;

use super::{ComplexError, GSimplicialComplex, SimplexOrbit};
use crate::equivmod::{coinvariants, coinvariants_of_map, Block, EquivariantMap, FiniteRankModule, InducedModule, MapTerm};
use crate::exactalg::{prime_factors_u64, ChainComplex, CoeffRing, FgAbGroup, IntMatrix};
use crate::groups::{Element, Group, Subgroup};
use crate::gsets::FiniteGSet;
use crate::par::Exec;

/// Points `(x, g)` of `X_σ = {(x, g) : g ∈ G_σ, gx = x}` in block order,
/// with `G_σ` acting by `h(x, g) = (hx, hgh^{-1})`.
struct PairBlock {
    pairs: Vec<(usize, Element)>,
    index: HashMap<(usize, Element), usize>,
    block: Block,
}

fn pair_block(g: &Group, stab: &Subgroup, x: &FiniteGSet) -> Result<PairBlock, ComplexError> {
    let elems = stab.elements().expect("finite stabilizer");
    let mut pairs = Vec::new();
    for h in &elems {
        let p = x.perm_of(h);
        pairs.extend((0..x.len()).filter(|&i| p[i] as usize == i).map(|i| (i, h.clone())));
    }
    let index: HashMap<(usize, Element), usize> = pairs.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
    let gens = stab
        .generators()
        .iter()
        .map(|h| {
            let p = x.perm_of(h);
            pairs.iter().map(|(i, e)| index[&(p[*i] as usize, g.conjugate(h, e))] as u32).collect()
        })
        .collect();
    let set = FiniteGSet::new(stab.abstract_group().clone(), (0..pairs.len() as u64).collect(), gens)?;
    let block = Block::new(stab.clone(), FiniteRankModule::from_gset(&set))?;
    Ok(PairBlock { pairs, index, block })
}

/// `δ_(x,g) ↦ sign · δ_(t^{-1}x, t^{-1}gt)` into the block of `target`,
/// dropping pairs that do not lie there.
fn transport(g: &Group, x: &FiniteGSet, src: &PairBlock, tgt: &PairBlock, t: &Element, sign: i64) -> IntMatrix {
    let ti = g.inv(t);
    let p = x.perm_of(&ti);
    let entries = src.pairs.iter().enumerate().filter_map(|(c, (i, e))| {
        tgt.index.get(&(p[*i] as usize, g.conjugate(&ti, e))).map(|&r| (r, c, BigInt::from(sign)))
    });
    IntMatrix::from_entries(tgt.pairs.len(), src.pairs.len(), entries).expect("one entry per column")
}

fn pair_blocks(y: &GSimplicialComplex, x: &FiniteGSet, exec: Exec) -> Result<Vec<Vec<PairBlock>>, ComplexError> {
    if x.group() != y.group() {
        return Err(ComplexError::Invalid("the G-set and the complex have different groups".into()));
    }
    (0..=y.dim())
        .map(|d| {
            exec.map(y.simplex_orbits(d), |s: &SimplexOrbit| pair_block(y.group(), &s.stabilizer, x))
                .into_iter()
                .collect()
        })
        .collect()
}

fn modules(y: &GSimplicialComplex, blocks: &[Vec<PairBlock>], coeffs: &CoeffRing) -> Result<Vec<InducedModule>, ComplexError> {
    blocks
        .iter()
        .map(|level| {
            InducedModule::new(y.group().clone(), level.iter().map(|b| b.block.clone()).collect(), coeffs.clone())
                .map_err(ComplexError::from)
        })
        .collect()
}

/// `M_i = ⊕_{σ ∈ Y_i} k[X_σ]` with coface maps `Σ (-1)^j ∂_j`, where `∂_j`
/// restricts a function on `X_σ` to `X_η` whenever `η^{(j)} = σ`. For `X` a
/// point this is `⊕ k[G_σ]` with the conjugation action.
pub struct BasicComplex {
    pub modules: Vec<InducedModule>,
    /// `maps[i] : M_i -> M_{i+1}`.
    pub maps: Vec<EquivariantMap>,
}

pub fn basic_complex(y: &GSimplicialComplex, x: &FiniteGSet, coeffs: &CoeffRing) -> Result<BasicComplex, ComplexError> {
    y.require_oriented()?;
    let g = y.group();
    let blocks = pair_blocks(y, x, Exec::default())?;
    let modules = modules(y, &blocks, coeffs)?;
    let mut maps = Vec::new();
    for i in 0..y.dim() {
        let mut terms: Vec<Vec<MapTerm>> = vec![Vec::new(); blocks[i].len()];
        for (b, eta) in y.simplex_orbits(i + 1).iter().enumerate() {
            for j in 0..=eta.dim() {
                let (a, u) = eta.face(j);
                let sigma = &y.simplex_orbits(i)[*a];
                let ui = g.inv(u);
                // cofaces h u^{-1} η_r of σ_r, one per coset of G_{u^{-1} η_r} in G_σ
                let mut seen = BTreeSet::new();
                for h in sigma.stabilizer_elements() {
                    let t = g.mul(h, &ui);
                    if !seen.insert(y.act_simplex(&t, &eta.vertices)) {
                        continue;
                    }
                    let sign = if j % 2 == 0 { 1 } else { -1 };
                    let matrix = transport(g, x, &blocks[i][*a], &blocks[i + 1][b], &t, sign);
                    terms[*a].push(MapTerm { t, target: b, matrix });
                }
            }
        }
        maps.push(EquivariantMap::new(&modules[i], &modules[i + 1], terms)?);
    }
    let bc = BasicComplex { modules, maps };
    bc.check_square_zero()?;
    Ok(bc)
}

impl BasicComplex {
    /// `∂∂ = 0` symbolically in the group ring.
    pub fn check_square_zero(&self) -> Result<(), ComplexError> {
        for i in 0..self.maps.len().saturating_sub(1) {
            let g = self.modules[i].group();
            if !self.maps[i].then(g, &self.maps[i + 1]).is_zero(g, &self.modules[i + 2]) {
                return Err(ComplexError::Invalid(format!("coface maps do not square to zero in degree {i}")));
            }
        }
        Ok(())
    }

    /// The cochain complex of coinvariants, degree `i` at `M_i`.
    pub fn coinvariant_cochain(&self) -> Result<ChainComplex, ComplexError> {
        let co: Vec<_> = self.modules.iter().map(coinvariants).collect();
        free_cochain(&co, |i| coinvariants_of_map(&self.maps[i], &co[i], &co[i + 1]), 0, self.modules[0].coeffs())
    }
}

fn free_cochain<F: Fn(usize) -> IntMatrix>(
    co: &[crate::equivmod::Coinvariants],
    map: F,
    lo: i64,
    coeffs: &CoeffRing,
) -> Result<ChainComplex, ComplexError> {
    if co.iter().any(|c| c.moduli.iter().any(|m| m != &BigInt::from(0))) {
        return Err(ComplexError::Invalid("coinvariants are not free".into()));
    }
    let ranks = co.iter().map(|c| c.len()).collect();
    let maps = (0..co.len() - 1).map(map).collect();
    Ok(ChainComplex::from_cochain(lo, ranks, maps, coeffs.clone())?)
}

/// Integer double complex `C^{p,q}` with `d_h : (p,q) -> (p+1,q)` and
/// `d_v : (p,q) -> (p,q+1)`; both square to zero and they anticommute.
#[derive(Clone, Debug)]
pub struct DoubleComplex {
    ranks: BTreeMap<(i64, i64), usize>,
    horizontal: BTreeMap<(i64, i64), IntMatrix>,
    vertical: BTreeMap<(i64, i64), IntMatrix>,
    coeffs: CoeffRing,
}

impl DoubleComplex {
    pub fn new(
        ranks: BTreeMap<(i64, i64), usize>,
        horizontal: BTreeMap<(i64, i64), IntMatrix>,
        vertical: BTreeMap<(i64, i64), IntMatrix>,
        coeffs: CoeffRing,
    ) -> Result<DoubleComplex, ComplexError> {
        let dc = DoubleComplex { ranks, horizontal, vertical, coeffs };
        let r = |k: (i64, i64)| dc.rank(k);
        for (&(p, q), m) in &dc.horizontal {
            if m.shape() != (r((p + 1, q)), r((p, q))) {
                return Err(ComplexError::Invalid(format!("horizontal map at ({p},{q}) has the wrong shape")));
            }
        }
        for (&(p, q), m) in &dc.vertical {
            if m.shape() != (r((p, q + 1)), r((p, q))) {
                return Err(ComplexError::Invalid(format!("vertical map at ({p},{q}) has the wrong shape")));
            }
        }
        for &(p, q) in dc.ranks.keys() {
            let hh = &dc.h((p + 1, q)) * &dc.h((p, q));
            let vv = &dc.v((p, q + 1)) * &dc.v((p, q));
            let anti = &(&dc.v((p + 1, q)) * &dc.h((p, q))) + &(&dc.h((p, q + 1)) * &dc.v((p, q)));
            if !hh.is_zero() || !vv.is_zero() || !anti.is_zero() {
                return Err(ComplexError::Invalid(format!("double complex identities fail at ({p},{q})")));
            }
        }
        Ok(dc)
    }

    pub fn rank(&self, k: (i64, i64)) -> usize {
        self.ranks.get(&k).copied().unwrap_or(0)
    }

    pub fn ranks(&self) -> &BTreeMap<(i64, i64), usize> {
        &self.ranks
    }

    fn h(&self, (p, q): (i64, i64)) -> IntMatrix {
        self.horizontal.get(&(p, q)).cloned().unwrap_or_else(|| IntMatrix::zeros(self.rank((p + 1, q)), self.rank((p, q))))
    }

    fn v(&self, (p, q): (i64, i64)) -> IntMatrix {
        self.vertical.get(&(p, q)).cloned().unwrap_or_else(|| IntMatrix::zeros(self.rank((p, q + 1)), self.rank((p, q))))
    }

    /// Total cochain complex in degrees `p + q`.
    pub fn total(&self) -> Result<ChainComplex, ComplexError> {
        let degs: Vec<i64> = self.ranks.keys().map(|(p, q)| p + q).collect();
        let (lo, hi) = match (degs.iter().min(), degs.iter().max()) {
            (Some(&lo), Some(&hi)) => (lo, hi),
            _ => return Ok(ChainComplex::new(0, vec![0], vec![], self.coeffs.clone())?),
        };
        let layout = |n: i64| {
            let mut off = BTreeMap::new();
            let mut total = 0;
            for (&k, &r) in self.ranks.range(..).filter(|(k, _)| k.0 + k.1 == n) {
                off.insert(k, total);
                total += r;
            }
            (off, total)
        };
        let layouts: Vec<_> = (lo..=hi).map(layout).collect();
        let ranks = layouts.iter().map(|l| l.1).collect();
        let mut maps = Vec::new();
        for n in lo..hi {
            let (src, rs) = &layouts[(n - lo) as usize];
            let (tgt, rt) = &layouts[(n - lo + 1) as usize];
            let mut m = IntMatrix::zeros(*rt, *rs);
            for (&(p, q), &c) in src {
                if let Some(&r) = tgt.get(&(p + 1, q)) {
                    m.add_block(r, c, &self.h((p, q)));
                }
                if let Some(&r) = tgt.get(&(p, q + 1)) {
                    m.add_block(r, c, &self.v((p, q)));
                }
            }
            maps.push(m);
        }
        Ok(ChainComplex::from_cochain(lo, ranks, maps, self.coeffs.clone())?)
    }
}

/// The row `C^{-p,0} = ⊕_{σ ∈ Y_p} k[X_σ]` with `Σ (-1)^j` (inclusion into
/// the `j`-th face), as G-modules and maps.
pub struct Dc1 {
    pub modules: Vec<InducedModule>,
    /// `maps[p - 1] : C^{-p} -> C^{-p+1}`.
    pub maps: Vec<EquivariantMap>,
}

pub fn dc1_build(y: &GSimplicialComplex, x: &FiniteGSet, coeffs: &CoeffRing) -> Result<Dc1, ComplexError> {
    y.require_oriented()?;
    let g = y.group();
    let blocks = pair_blocks(y, x, Exec::default())?;
    let modules = modules(y, &blocks, coeffs)?;
    let mut maps = Vec::new();
    for p in 1..=y.dim() {
        let terms = y
            .simplex_orbits(p)
            .iter()
            .enumerate()
            .map(|(a, sigma)| {
                (0..=p)
                    .map(|j| {
                        let (r, w) = sigma.face(j);
                        let sign = if j % 2 == 0 { 1 } else { -1 };
                        let matrix = transport(g, x, &blocks[p][a], &blocks[p - 1][*r], w, sign);
                        MapTerm { t: w.clone(), target: *r, matrix }
                    })
                    .collect()
            })
            .collect();
        maps.push(EquivariantMap::new(&modules[p], &modules[p - 1], terms)?);
    }
    for p in 2..=y.dim() {
        let prev = &maps[p - 1];
        if !prev.then(g, &maps[p - 2]).is_zero(g, &modules[p - 2]) {
            return Err(ComplexError::Invalid(format!("face maps do not square to zero at dimension {p}")));
        }
    }
    Ok(Dc1 { modules, maps })
}

impl Dc1 {
    /// Coinvariants of the row, placed at `(-p, 0)`.
    pub fn coinvariant_double_complex(&self) -> Result<DoubleComplex, ComplexError> {
        let co: Vec<_> = self.modules.iter().map(coinvariants).collect();
        if co.iter().any(|c| c.moduli.iter().any(|m| m != &BigInt::from(0))) {
            return Err(ComplexError::Invalid("coinvariants are not free".into()));
        }
        let ranks = co.iter().enumerate().map(|(p, c)| ((-(p as i64), 0), c.len())).collect();
        let horizontal = (1..co.len())
            .map(|p| ((-(p as i64), 0), coinvariants_of_map(&self.maps[p - 1], &co[p], &co[p - 1])))
            .collect();
        DoubleComplex::new(ranks, horizontal, BTreeMap::new(), self.modules[0].coeffs().clone())
    }
}

/// Checks that every simplex stabilizer order is a unit in `coeffs`.
pub fn check_invertible(y: &GSimplicialComplex, coeffs: &CoeffRing) -> Result<(), ComplexError> {
    for d in 0..=y.dim() {
        for s in y.simplex_orbits(d) {
            let n = s.stabilizer.order().expect("finite") as u64;
            if let Some(p) = prime_factors_u64(n).into_iter().find(|&p| !coeffs.is_unit(&BigInt::from(p))) {
                return Err(ComplexError::NotInvertible { prime: p, stabilizer: format!("of order {n}") });
            }
        }
    }
    Ok(())
}

/// Cohomology of the coinvariant total complex in the given cochain
/// degrees; requires the stabilizer orders to be invertible.
pub fn bs_cohomology(
    y: &GSimplicialComplex,
    x: &FiniteGSet,
    coeffs: &CoeffRing,
    degrees: RangeInclusive<i64>,
) -> Result<BTreeMap<i64, FgAbGroup>, ComplexError> {
    check_invertible(y, coeffs)?;
    bs_cohomology_unchecked(y, x, coeffs, degrees)
}

/// As [`bs_cohomology`] without the invertibility requirement, so the
/// comparison can be reported as failing over rings where it does.
pub fn bs_cohomology_unchecked(
    y: &GSimplicialComplex,
    x: &FiniteGSet,
    coeffs: &CoeffRing,
    degrees: RangeInclusive<i64>,
) -> Result<BTreeMap<i64, FgAbGroup>, ComplexError> {
    let total = dc1_build(y, x, coeffs)?.coinvariant_double_complex()?.total()?;
    Ok(degrees
        .map(|n| {
            let h = if -n >= total.lo() && -n <= total.hi() {
                total.homology_at(-n).expect("degree in range")
            } else {
                FgAbGroup::zero(coeffs.clone())
            };
            (n, h)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ranks(t: &BTreeMap<i64, FgAbGroup>) -> Vec<(i64, usize, Vec<BigInt>)> {
        t.iter().map(|(n, h)| (*n, h.rank(), h.torsion().to_vec())).collect()
    }

    #[test]
    fn tree_with_point_over_q() {
        let y = GSimplicialComplex::dihedral_tree();
        let x = FiniteGSet::point(y.group());
        let t = bs_cohomology(&y, &x, &CoeffRing::Rationals, -3..=0).unwrap();
        assert_eq!(ranks(&t), vec![(-3, 0, vec![]), (-2, 0, vec![]), (-1, 0, vec![]), (0, 3, vec![])]);
        assert!(matches!(
            bs_cohomology(&y, &x, &CoeffRing::Integers, -1..=0),
            Err(ComplexError::NotInvertible { prime: 2, .. })
        ));
    }

    #[test]
    fn cyclic_point_over_z() {
        let g = Group::cyclic(2);
        let y = GSimplicialComplex::point(&g).unwrap();
        let t = bs_cohomology_unchecked(&y, &FiniteGSet::point(&g), &CoeffRing::Integers, -1..=0).unwrap();
        assert_eq!(ranks(&t), vec![(-1, 0, vec![]), (0, 2, vec![])]);
    }

    #[test]
    fn trivial_group_is_simplicial_homology() {
        let g = Group::trivial();
        let hollow = GSimplicialComplex::trivial_group(3, &[vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap();
        let t = bs_cohomology(&hollow, &FiniteGSet::point(&g), &CoeffRing::Integers, -2..=0).unwrap();
        assert_eq!(ranks(&t), vec![(-2, 0, vec![]), (-1, 1, vec![]), (0, 1, vec![])]);
        let tri = GSimplicialComplex::full_simplex(2);
        let t = bs_cohomology(&tri, &FiniteGSet::point(&g), &CoeffRing::Integers, -2..=0).unwrap();
        assert_eq!(ranks(&t), vec![(-2, 0, vec![]), (-1, 0, vec![]), (0, 1, vec![])]);
    }

    #[test]
    fn basic_complex_of_tree() {
        let y = GSimplicialComplex::dihedral_tree();
        let bc = basic_complex(&y, &FiniteGSet::point(y.group()), &CoeffRing::Integers).unwrap();
        // Z[G_v0]_G + Z[G_v1]_G = Z^4 -> Z[1] = Z, surjective
        let c = bc.coinvariant_cochain().unwrap();
        assert_eq!(c.rank_at(0), 4);
        assert_eq!(c.rank_at(-1), 1);
        assert_eq!(c.homology_at(-1).unwrap().rank(), 0);
        assert_eq!(c.homology_at(0).unwrap().rank(), 3);
    }

    #[test]
    fn triangle_cochains() {
        let tri = GSimplicialComplex::full_simplex(2);
        let bc = basic_complex(&tri, &FiniteGSet::point(tri.group()), &CoeffRing::Integers).unwrap();
        let c = bc.coinvariant_cochain().unwrap();
        let h = c.homology();
        assert_eq!(h[&0].rank(), 1);
        assert!(h[&-1].is_zero() && h[&-2].is_zero());
    }

    #[test]
    fn double_complex_rejects_commuting_squares() {
        let one = IntMatrix::identity(1);
        let ranks = BTreeMap::from([((0, 0), 1), ((1, 0), 1), ((0, 1), 1), ((1, 1), 1)]);
        let h = BTreeMap::from([((0, 0), one.clone()), ((0, 1), one.clone())]);
        let v = BTreeMap::from([((0, 0), one.clone()), ((1, 0), one.clone())]);
        assert!(DoubleComplex::new(ranks.clone(), h.clone(), v, CoeffRing::Integers).is_err());
        let v = BTreeMap::from([((0, 0), one.clone()), ((1, 0), -&one)]);
        let dc = DoubleComplex::new(ranks, h, v, CoeffRing::Integers).unwrap();
        let tot = dc.total().unwrap();
        assert!(tot.homology().values().all(|g| g.is_zero()));
    }
}
