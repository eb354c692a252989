use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use super::{FiniteGSet, FixedSet, GSetError};
use crate::exactalg::IntMatrix;
use crate::groups::{torsion_conjugacy_classes, Element, Group, GroupDesc, PermChainLevel, SubgroupChain, TorsionClass};
use crate::par::Exec;

/// JSON input describing `X = lim G/G_k` truncated at `truncation_level`.
///
/// Index-determined families take `odometer_indices`; permutation groups
/// take explicit `subgroups` given by generators.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OdometerSpec {
    pub group: GroupDesc,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub odometer_indices: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subgroups: Option<Vec<PermChainLevel>>,
    pub truncation_level: usize,
}

#[derive(Clone, Debug)]
pub struct Level {
    pub set: FiniteGSet,
    /// Image of each point in the previous level (absent at level 0).
    pub projection: Option<Vec<usize>>,
}

/// The level sets `G/G_0, ..., G/G_L` with their projections.
#[derive(Clone, Debug)]
pub struct Odometer {
    spec: OdometerSpec,
    group: Group,
    chain: SubgroupChain,
    levels: Vec<Level>,
    classes: Vec<TorsionClass>,
}

impl Odometer {
    pub fn new(spec: &OdometerSpec) -> Result<Odometer, GSetError> {
        let group = Group::new(spec.group.clone())?;
        let chain = match &spec.subgroups {
            Some(levels) => {
                if !spec.odometer_indices.is_empty() {
                    return Err(GSetError::Invalid("give either odometer_indices or subgroups, not both".into()));
                }
                SubgroupChain::from_generators(&group, levels)?
            }
            None => SubgroupChain::by_indices(&group, &spec.odometer_indices)?,
        };
        if spec.truncation_level > chain.len() {
            return Err(GSetError::LevelOutOfRange { level: spec.truncation_level, max: chain.len() });
        }
        let mut levels = vec![Level { set: FiniteGSet::point(&group), projection: None }];
        let coset_levels = if matches!(group.desc(), GroupDesc::FinitePermutation { .. }) {
            Some(coset_levels(&group, &chain, spec.truncation_level)?)
        } else {
            None
        };
        for k in 1..=spec.truncation_level {
            let level = match &coset_levels {
                Some(cl) => cl[k - 1].clone(),
                None => index_level(&group, chain.index(k), chain.index(k - 1))?,
            };
            levels.push(level);
        }
        let classes = torsion_conjugacy_classes(&group);
        Ok(Odometer { spec: spec.clone(), group, chain, levels, classes })
    }

    pub fn spec(&self) -> &OdometerSpec {
        &self.spec
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn chain(&self) -> &SubgroupChain {
        &self.chain
    }

    pub fn truncation_level(&self) -> usize {
        self.spec.truncation_level
    }

    pub fn classes(&self) -> &[TorsionClass] {
        &self.classes
    }

    pub fn level(&self, k: usize) -> Result<&Level, GSetError> {
        self.levels.get(k).ok_or(GSetError::LevelOutOfRange { level: k, max: self.truncation_level() })
    }
}

/// `Z/n` as the coset space of an index-`n` subgroup in the index families.
fn index_level(group: &Group, n: u64, prev: u64) -> Result<Level, GSetError> {
    let n_i = n as i64;
    let shift: Vec<u32> = (0..n_i).map(|j| ((j + 1) % n_i) as u32).collect();
    let gens = match group.desc() {
        GroupDesc::InfiniteDihedral => {
            vec![shift, (0..n_i).map(|j| (-j).rem_euclid(n_i) as u32).collect()]
        }
        GroupDesc::FiniteCyclic { m: 1 } => vec![],
        GroupDesc::FreeAbelianRank1 | GroupDesc::FiniteCyclic { .. } => vec![shift],
        other => return Err(GSetError::Invalid(format!("no index-determined levels for {}", other.name()))),
    };
    let set = FiniteGSet::new(group.clone(), (0..n).collect(), gens)?;
    let projection = Some((0..n).map(|j| (j % prev) as usize).collect());
    Ok(Level { set, projection })
}

/// Left coset spaces of an explicit permutation-group chain.
fn coset_levels(group: &Group, chain: &SubgroupChain, upto: usize) -> Result<Vec<Level>, GSetError> {
    let es = group.elements().expect("finite");
    let mut prev_of: Vec<usize> = vec![0; es.len()];
    let mut out = Vec::new();
    for lvl in chain.levels().iter().take(upto) {
        let hs = lvl.subgroup.elements().expect("finite");
        let mut coset_of: Vec<Option<usize>> = vec![None; es.len()];
        let mut reps: Vec<usize> = Vec::new();
        for (i, e) in es.iter().enumerate() {
            if coset_of[i].is_some() {
                continue;
            }
            let c = reps.len();
            reps.push(i);
            for h in &hs {
                coset_of[group.index_of(&group.mul(e, h)).expect("closed")] = Some(c);
            }
        }
        let coset_of: Vec<usize> = coset_of.into_iter().map(|c| c.expect("covered")).collect();
        let gens = group
            .generators()
            .iter()
            .map(|s| reps.iter().map(|&r| coset_of[group.index_of(&group.mul(s, &es[r])).expect("closed")] as u32).collect())
            .collect();
        let set = FiniteGSet::new(group.clone(), (0..reps.len() as u64).collect(), gens)?;
        let projection = Some(reps.iter().map(|&r| prev_of[r]).collect());
        prev_of = coset_of;
        out.push(Level { set, projection });
    }
    Ok(out)
}

pub fn level_gset(odo: &Odometer, k: usize) -> Result<&Level, GSetError> {
    odo.level(k)
}

/// One piece of the blow-up: the fixed set of a class representative as a
/// G-set over its centralizer. Empty pieces are kept.
#[derive(Clone, Debug)]
pub struct BlowupPiece {
    pub class: TorsionClass,
    pub fixed: FixedSet,
}

impl BlowupPiece {
    pub fn is_empty(&self) -> bool {
        self.fixed.points.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct BlowupLevel {
    pub pieces: Vec<BlowupPiece>,
}

impl BlowupLevel {
    /// `Σ_c [G : Z(g_c)] |S^{g_c}|`, the number of pairs `(x, g)` with
    /// `g` torsion and `gx = x` (finite groups only).
    pub fn pair_count(&self, g: &Group) -> Option<usize> {
        self.pieces.iter().map(|p| Some(p.class.class_size(g)? * p.fixed.points.len())).sum()
    }

    /// Per piece, the pullback from this level's fixed set to `next`'s.
    pub fn pullbacks_to(&self, next: &BlowupLevel, projection: &[usize]) -> Vec<IntMatrix> {
        self.pieces
            .iter()
            .zip(&next.pieces)
            .map(|(a, b)| pullback_matrix(&a.fixed.points, &b.fixed.points, projection))
            .collect()
    }
}

/// `δ_x ↦ Σ_{y ↦ x} δ_y` restricted to the given point subsets; columns are
/// indexed by `prev`, rows by `next`.
pub fn pullback_matrix(prev: &[usize], next: &[usize], projection: &[usize]) -> IntMatrix {
    let pos: HashMap<usize, usize> = prev.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    let entries = next
        .iter()
        .enumerate()
        .filter_map(|(r, &y)| pos.get(&projection[y]).map(|&c| (r, c, BigInt::one())));
    IntMatrix::from_entries(next.len(), prev.len(), entries).expect("one entry per row")
}

/// Blow-up of a finite G-set with the given torsion classes.
pub fn blowup(set: &FiniteGSet, classes: &[TorsionClass], exec: Exec) -> Result<BlowupLevel, GSetError> {
    let pieces = exec.map(classes, |c| -> Result<BlowupPiece, GSetError> {
        Ok(BlowupPiece { class: c.clone(), fixed: set.fixed_points(&c.representative)? })
    });
    Ok(BlowupLevel { pieces: pieces.into_iter().collect::<Result<_, _>>()? })
}

pub fn blowup_level(odo: &Odometer, k: usize) -> Result<BlowupLevel, GSetError> {
    blowup(&odo.level(k)?.set, odo.classes(), Exec::default())
}

impl Odometer {
    /// Representative of the class at `index`, for display.
    pub fn class_representative(&self, index: usize) -> &Element {
        &self.classes[index].representative
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scarparo(levels: usize) -> Odometer {
        let spec = OdometerSpec {
            group: GroupDesc::InfiniteDihedral,
            odometer_indices: (1..=levels as u32).map(|k| 2u64.pow(k)).collect(),
            subgroups: None,
            truncation_level: levels,
        };
        Odometer::new(&spec).unwrap()
    }

    #[test]
    fn trivial_group_levels() {
        let spec = OdometerSpec {
            group: GroupDesc::FiniteCyclic { m: 1 },
            odometer_indices: vec![1; 3],
            subgroups: None,
            truncation_level: 3,
        };
        let odo = Odometer::new(&spec).unwrap();
        assert_eq!(odo.level(3).unwrap().set.len(), 1);
    }

    #[test]
    fn dihedral_levels() {
        let o = scarparo(3);
        let l2 = o.level(2).unwrap();
        assert_eq!(l2.set.len(), 4);
        assert_eq!(l2.set.act(&Element::Dihedral(1, 0), 3), 0);
        assert_eq!(l2.set.act(&Element::Dihedral(0, 1), 1), 3);
        let l3 = o.level(3).unwrap();
        let proj = l3.projection.as_ref().unwrap();
        for x in 0..4 {
            assert_eq!(proj.iter().filter(|&&p| p == x).count(), 2);
        }
        assert!(o.level(4).is_err());
    }

    #[test]
    fn dihedral_blowup() {
        let o = scarparo(2);
        let b = blowup_level(&o, 2).unwrap();
        let sizes: Vec<usize> = b.pieces.iter().map(|p| p.fixed.points.len()).collect();
        assert_eq!(sizes, vec![4, 2, 0]);
    }

    #[test]
    fn permutation_chain_cosets() {
        let spec = OdometerSpec {
            group: GroupDesc::FinitePermutation { degree: 3, generators: vec![vec![1, 0, 2], vec![1, 2, 0]] },
            odometer_indices: vec![],
            subgroups: Some(vec![PermChainLevel { generators: vec![vec![1, 0, 2]] }, PermChainLevel { generators: vec![] }]),
            truncation_level: 2,
        };
        let o = Odometer::new(&spec).unwrap();
        assert_eq!(o.level(1).unwrap().set.len(), 3);
        assert_eq!(o.level(2).unwrap().set.len(), 6);
        let b = blowup_level(&o, 1).unwrap();
        // pairs (x, g) with g x = x in S_3 acting on 3 points: 3 + 3*1 + 0 = 6
        assert_eq!(b.pair_count(o.group()), Some(6));
    }

    #[test]
    fn point_blowup_of_finite_group() {
        let g = Group::cyclic(3);
        let b = blowup(&FiniteGSet::point(&g), &torsion_conjugacy_classes(&g), Exec::Sequential).unwrap();
        assert_eq!(b.pieces.len(), 3);
        assert!(b.pieces.iter().all(|p| p.fixed.points.len() == 1));
    }
}
