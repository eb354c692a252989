use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;

use super::{Element, GMatrix, Group, GroupDesc, GroupError, GroupRingElt};
use crate::exactalg::{ChainComplex, CoeffRing, FgAbGroup, IntMatrix};
use crate::par::Exec;

/// Default resolution depth.
pub const DEFAULT_DEPTH: usize = 6;
/// Maximum number of bar cells `Σ |G|^n` a bar resolution may allocate.
pub const BAR_BUDGET: usize = 200_000;

/// Free resolution `... -> F_1 -> F_0 -> Z` over the integral group ring,
/// truncated at `depth()`. `boundary(n)` is `r_n x r_{n-1}` in the row-vector
/// convention, and the augmentation sends every degree-0 generator to 1.
#[derive(Clone, Debug)]
pub struct GResolution {
    group: Group,
    ranks: Vec<usize>,
    boundaries: Vec<GMatrix>,
}

impl GResolution {
    /// Checks shapes, `ε ∂_1 = 0` and `∂_n ∂_{n-1} = 0` in the group ring.
    pub fn new(group: Group, ranks: Vec<usize>, boundaries: Vec<GMatrix>) -> Result<Self, GroupError> {
        if ranks.is_empty() || boundaries.len() + 1 != ranks.len() {
            return Err(GroupError::Invalid("a resolution needs one boundary per positive degree".into()));
        }
        for (k, a) in boundaries.iter().enumerate() {
            if (a.rows(), a.cols()) != (ranks[k + 1], ranks[k]) {
                return Err(GroupError::Invalid(format!("boundary {} has the wrong shape", k + 1)));
            }
        }
        if let Some(a1) = boundaries.first() {
            for i in 0..a1.rows() {
                if a1.row(i).map(|(_, x)| x.augmentation()).sum::<i64>() != 0 {
                    return Err(GroupError::Invalid("augmentation does not vanish on the image of d_1".into()));
                }
            }
        }
        for k in 1..boundaries.len() {
            if !boundaries[k].mul(&group, &boundaries[k - 1]).is_zero() {
                return Err(GroupError::Invalid(format!("d_{} d_{} is nonzero", k + 1, k)));
            }
        }
        Ok(GResolution { group, ranks, boundaries })
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn depth(&self) -> usize {
        self.ranks.len() - 1
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    /// `∂_n` for `1 <= n <= depth`.
    pub fn boundary(&self, n: usize) -> &GMatrix {
        &self.boundaries[n - 1]
    }

    /// The first `depth + 1` degrees.
    pub fn truncate(&self, depth: usize) -> GResolution {
        let d = depth.min(self.depth());
        GResolution {
            group: self.group.clone(),
            ranks: self.ranks[..=d].to_vec(),
            boundaries: self.boundaries[..d].to_vec(),
        }
    }
}

/// The resolution `0 -> Z[G] -> Z` of the trivial group, padded with zeros.
pub fn trivial_resolution(group: &Group, depth: usize) -> Result<GResolution, GroupError> {
    let mut ranks = vec![0; depth + 1];
    ranks[0] = 1;
    let boundaries = (1..=depth).map(|n| GMatrix::zeros(0, if n == 1 { 1 } else { 0 })).collect();
    GResolution::new(group.clone(), ranks, boundaries)
}

/// Two-periodic resolution of `Z` over `Z[C_m]`: `1 - t` in odd degrees,
/// the norm element in even degrees.
pub fn periodic_resolution(m: u64, depth: usize) -> Result<GResolution, GroupError> {
    if m < 2 {
        return Err(GroupError::Invalid(format!("periodic resolution needs m >= 2, got {m}")));
    }
    let g = Group::cyclic(m);
    let t = Element::Cyclic(1);
    let boundaries = (1..=depth)
        .map(|n| {
            let x = if n % 2 == 1 { GroupRingElt::one_minus(&g, &t) } else { GroupRingElt::norm(&g, &t, m) };
            GMatrix::from_rows(1, vec![vec![(0, x)]])
        })
        .collect();
    GResolution::new(g, vec![1; depth + 1], boundaries)
}

/// `0 -> Z[Z] --(t-1)--> Z[Z] -> Z`.
pub fn integers_resolution(depth: usize) -> Result<GResolution, GroupError> {
    let g = Group::integers();
    let mut ranks = vec![0; depth + 1];
    ranks[0] = 1;
    let mut boundaries = Vec::new();
    if depth >= 1 {
        ranks[1] = 1;
        let x = GroupRingElt::from_terms([(Element::Int(1), 1), (Element::Int(0), -1)]);
        boundaries.push(GMatrix::from_rows(1, vec![vec![(0, x)]]));
    }
    for n in 2..=depth {
        boundaries.push(GMatrix::zeros(0, if n == 2 { 1 } else { 0 }));
    }
    GResolution::new(g, ranks, boundaries)
}

/// Unnormalized bar resolution of a finite group; degree `n` has basis `G^n`.
pub fn bar_resolution(group: &Group, depth: usize, budget: usize) -> Result<GResolution, GroupError> {
    let elems = group.elements().ok_or_else(|| GroupError::Unsupported("bar resolution needs a finite group".into()))?;
    let q = elems.len();
    let mut needed: usize = 0;
    let mut size = 1usize;
    for _ in 0..=depth {
        needed = needed.saturating_add(size);
        size = size.saturating_mul(q);
    }
    if needed > budget {
        return Err(GroupError::BudgetExceeded { needed, budget });
    }
    let ranks: Vec<usize> = (0..=depth).map(|n| q.pow(n as u32)).collect();
    let idx = |g: &Element| group.index_of(g).expect("closed");
    let boundaries = Exec::default().map_range(depth, |k| {
        let n = k + 1;
        let rows = (0..ranks[n])
            .map(|cell| {
                // digits of `cell` in base q, most significant first
                let mut digits = vec![0usize; n];
                let mut c = cell;
                for d in digits.iter_mut().rev() {
                    *d = c % q;
                    c /= q;
                }
                let encode = |ds: &[usize]| ds.iter().fold(0usize, |acc, &d| acc * q + d);
                let mut row: Vec<(usize, GroupRingElt)> = Vec::with_capacity(n + 1);
                row.push((encode(&digits[1..]), GroupRingElt::basis(elems[digits[0]].clone())));
                for i in 1..n {
                    let mut ds = digits[..i - 1].to_vec();
                    ds.push(idx(&group.mul(&elems[digits[i - 1]], &elems[digits[i]])));
                    ds.extend_from_slice(&digits[i + 1..]);
                    let sign = if i % 2 == 0 { 1 } else { -1 };
                    row.push((encode(&ds), GroupRingElt::from_terms([(group.identity(), sign)])));
                }
                let sign = if n % 2 == 0 { 1 } else { -1 };
                row.push((encode(&digits[..n - 1]), GroupRingElt::from_terms([(group.identity(), sign)])));
                row
            })
            .collect();
        GMatrix::from_rows(ranks[n - 1], rows)
    });
    GResolution::new(group.clone(), ranks, boundaries)
}

/// Resolution of `Z` over `Z[A * B]` for finite cyclic `A = <x>`, `B = <y>`
/// obtained by splicing the tree sequence `0 -> Z[G] -> Z[G/A] ⊕ Z[G/B] -> Z`
/// with the induced periodic resolutions of `A` and `B`.
///
/// Ranks are `2, 3, 2, 2, ...`; degree 1 has basis `a_1, b_1, q`.
fn spliced_resolution(
    group: &Group,
    x: &Element,
    ox: u64,
    y: &Element,
    oy: u64,
    depth: usize,
) -> Result<GResolution, GroupError> {
    let ranks: Vec<usize> = (0..=depth).map(|n| if n == 1 { 3 } else { 2 }).collect();
    let one = GroupRingElt::basis(group.identity());
    let mut boundaries = Vec::new();
    for n in 1..=depth {
        let (ex, ey) = if n % 2 == 1 {
            (GroupRingElt::one_minus(group, x), GroupRingElt::one_minus(group, y))
        } else {
            (GroupRingElt::norm(group, x, ox), GroupRingElt::norm(group, y, oy))
        };
        let cols = ranks[n - 1];
        let mut rows = vec![vec![(0, ex)], vec![(1, ey)]];
        if n == 1 {
            rows.push(vec![(0, one.clone()), (1, one.scale(-1))]);
        }
        boundaries.push(GMatrix::from_rows(cols, rows));
    }
    GResolution::new(group.clone(), ranks, boundaries)
}

pub fn amalgam_resolution(a: u64, b: u64, depth: usize) -> Result<GResolution, GroupError> {
    let g = Group::amalgam(a, b)?;
    spliced_resolution(&g, &Element::Word(vec![(0, 1)]), a, &Element::Word(vec![(1, 1)]), b, depth)
}

/// `D_∞ = <(0,1)> * <(1,1)>` through the amalgam splice.
pub fn dihedral_resolution(depth: usize) -> Result<GResolution, GroupError> {
    let g = Group::infinite_dihedral();
    spliced_resolution(&g, &Element::Dihedral(0, 1), 2, &Element::Dihedral(1, 1), 2, depth)
}

/// The family-specific engine: trivial, periodic, `t - 1`, the amalgam
/// splice, or the bar resolution for permutation groups.
pub fn resolution_for(group: &Group, depth: usize, budget: usize) -> Result<GResolution, GroupError> {
    if group.order() == Some(1) {
        return trivial_resolution(group, depth);
    }
    match group.desc() {
        GroupDesc::FiniteCyclic { m } => periodic_resolution(*m, depth),
        GroupDesc::FreeAbelianRank1 => integers_resolution(depth),
        GroupDesc::InfiniteDihedral => dihedral_resolution(depth),
        GroupDesc::Amalgam { a, b } => amalgam_resolution(*a, *b, depth),
        GroupDesc::FinitePermutation { .. } => bar_resolution(group, depth, budget),
    }
}

/// A left `G`-module that is free of finite rank over the coefficients.
pub trait GModule: Sync {
    fn group(&self) -> &Group;
    fn rank(&self) -> usize;
    /// Matrix of `g` acting on column vectors.
    fn act(&self, g: &Element) -> IntMatrix;
}

/// `Z^rank` with trivial action.
#[derive(Clone, Debug)]
pub struct TrivialModule {
    pub group: Group,
    pub rank: usize,
}

impl TrivialModule {
    pub fn new(group: &Group) -> Self {
        TrivialModule { group: group.clone(), rank: 1 }
    }
}

impl GModule for TrivialModule {
    fn group(&self) -> &Group {
        &self.group
    }

    fn rank(&self) -> usize {
        self.rank
    }

    fn act(&self, _g: &Element) -> IntMatrix {
        IntMatrix::identity(self.rank)
    }
}

/// `Z[G]` for finite `G`, on the basis [`Group::elements`].
#[derive(Clone, Debug)]
pub struct RegularModule {
    pub group: Group,
}

impl GModule for RegularModule {
    fn group(&self) -> &Group {
        &self.group
    }

    fn rank(&self) -> usize {
        self.group.order().expect("regular module of a finite group")
    }

    fn act(&self, g: &Element) -> IntMatrix {
        let es = self.group.elements().expect("finite");
        let n = es.len();
        IntMatrix::from_entries(
            n,
            n,
            es.iter().enumerate().map(|(i, h)| (self.group.index_of(&self.group.mul(g, h)).expect("closed"), i, BigInt::from(1))),
        )
        .expect("permutation matrix")
    }
}

/// `F ⊗_G M` as an integral chain complex: the generator `e_i ⊗ v` maps to
/// `Σ_j e_j ⊗ Σ c_g g^{-1} v` where `∂ e_i = Σ_j (Σ c_g g) e_j`.
pub fn coefficient_complex<M: GModule + ?Sized>(
    res: &GResolution,
    m: &M,
    coeffs: CoeffRing,
    exec: Exec,
) -> Result<ChainComplex, GroupError> {
    let k = m.rank();
    let g = res.group();
    let ranks: Vec<usize> = res.ranks().iter().map(|r| r * k).collect();
    let boundaries = exec.map_range(res.depth(), |idx| {
        let a = res.boundary(idx + 1);
        let mut cache: HashMap<Element, IntMatrix> = HashMap::new();
        let mut d = IntMatrix::zeros(ranks[idx], ranks[idx + 1]);
        for (i, j, x) in a.iter() {
            let mut block = IntMatrix::zeros(k, k);
            for (h, c) in x.terms() {
                let act = cache.entry(h.clone()).or_insert_with(|| m.act(&g.inv(h)));
                block = &block + &act.scale(&BigInt::from(c));
            }
            d.add_block(j * k, i * k, &block);
        }
        d
    });
    Ok(ChainComplex::new(0, ranks, boundaries, coeffs)?)
}

/// `H_n(G, M)` for `0 <= n <= depth` with the family engine.
pub fn group_homology<M: GModule + ?Sized>(
    m: &M,
    depth: usize,
    coeffs: &CoeffRing,
) -> Result<BTreeMap<i64, FgAbGroup>, GroupError> {
    let res = resolution_for(m.group(), depth + 1, BAR_BUDGET)?;
    homology_from_resolution(&res, m, depth, coeffs, Exec::default())
}

pub fn homology_from_resolution<M: GModule + ?Sized>(
    res: &GResolution,
    m: &M,
    depth: usize,
    coeffs: &CoeffRing,
    exec: Exec,
) -> Result<BTreeMap<i64, FgAbGroup>, GroupError> {
    if res.group() != m.group() {
        return Err(GroupError::Invalid("module and resolution are over different groups".into()));
    }
    if res.depth() < depth + 1 {
        return Err(GroupError::Invalid(format!("resolution depth {} cannot reach H_{depth}", res.depth())));
    }
    let c = coefficient_complex(&res.truncate(depth + 1), m, coeffs.clone(), exec)?;
    Ok((0..=depth as i64).map(|n| (n, c.homology_at(n).expect("in range"))).collect())
}

/// Exactness of the augmented resolution of a finite group in degrees
/// `0..depth`, checked on underlying abelian groups via `Z[G] ⊗_G F = F`.
pub fn verify_exact(res: &GResolution) -> Result<bool, GroupError> {
    let g = res.group();
    if !g.is_finite() {
        return Err(GroupError::Unsupported("exactness check needs a finite group".into()));
    }
    let c = coefficient_complex(res, &RegularModule { group: g.clone() }, CoeffRing::Rationals, Exec::default())?;
    let h = c.homology();
    let top = res.depth() as i64;
    Ok(h.iter().all(|(&n, grp)| n == top || grp.rank() == usize::from(n == 0)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(h: &BTreeMap<i64, FgAbGroup>) -> Vec<String> {
        h.values().map(|g| g.to_string()).collect()
    }

    #[test]
    fn cyclic_two() {
        let g = Group::cyclic(2);
        let h = group_homology(&TrivialModule::new(&g), 3, &CoeffRing::Integers).unwrap();
        assert_eq!(table(&h), ["Z", "Z/2", "0", "Z/2"]);
        assert!(verify_exact(&periodic_resolution(2, 3).unwrap()).unwrap());
    }

    #[test]
    fn integers() {
        let g = Group::integers();
        let h = group_homology(&TrivialModule::new(&g), 2, &CoeffRing::Integers).unwrap();
        assert_eq!(table(&h), ["Z", "Z", "0"]);
    }

    #[test]
    fn bar_agrees_with_periodic() {
        let g = Group::cyclic(2);
        let bar = bar_resolution(&g, 3, BAR_BUDGET).unwrap();
        assert!(verify_exact(&bar).unwrap());
        let h = homology_from_resolution(&bar, &TrivialModule::new(&g), 2, &CoeffRing::Integers, Exec::default())
            .unwrap();
        assert_eq!(table(&h), ["Z", "Z/2", "0"]);
        assert!(matches!(bar_resolution(&Group::symmetric(4), 6, 1000), Err(GroupError::BudgetExceeded { .. })));
    }

    #[test]
    fn symmetric_three_h1() {
        let g = Group::symmetric(3);
        let h = group_homology(&TrivialModule::new(&g), 1, &CoeffRing::Integers).unwrap();
        assert_eq!(table(&h), ["Z", "Z/2"]);
    }

    #[test]
    fn dihedral_and_amalgam() {
        let g = Group::infinite_dihedral();
        let h = group_homology(&TrivialModule::new(&g), 3, &CoeffRing::Integers).unwrap();
        assert_eq!(table(&h), ["Z", "(Z/2)^2", "0", "(Z/2)^2"]);
        let g = Group::amalgam(2, 3).unwrap();
        let h = group_homology(&TrivialModule::new(&g), 2, &CoeffRing::Integers).unwrap();
        assert_eq!(table(&h), ["Z", "Z/6", "0"]);
        assert_eq!(amalgam_resolution(2, 3, 0).unwrap().ranks(), &[2]);
    }

    #[test]
    fn trivial_group() {
        let g = Group::trivial();
        let r = resolution_for(&g, 3, BAR_BUDGET).unwrap();
        assert_eq!(r.ranks(), &[1, 0, 0, 0]);
    }
}
