//! End-to-end computations: groupoid homology of odometer actions as a
//! colimit over levels, homology of the torsion blow-up, the two-route
//! comparison with the coinvariant double complex, the E² page solver and
//! the rational comparison with K-theory data.

mod ktheory;
mod specseq;

use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactalg::{
    colimit_identify, tensor_coeffs, AlgError, ChainComplex, CoeffRing, ColimitSequence, ColimitVerdict, DirectSum,
    FgAbGroup, HomologyWithGenerators, IntMatrix, PresentedGroup,
};
use crate::gcomplex::{bs_cohomology_unchecked, check_invertible, ComplexError, GSimplicialComplex};
use crate::groups::{coefficient_complex, resolution_for, torsion_conjugacy_classes, Element, Group, GroupError, BAR_BUDGET};
use crate::gsets::{blowup, pullback_matrix, FiniteGSet, GSetError, Odometer, OdometerSpec};
use crate::par::Exec;

pub use ktheory::{hk_compare, KSummand, KTheoryInput, ZCount};
pub use specseq::{e2_page, two_row_solve, Differential, E2Page, SolveResult, SolveStatus};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PipelineError {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("colimit in degree {degree} is not identified: {pattern}")]
    Undecided { degree: i64, pattern: String },
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    GSet(#[from] GSetError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Alg(#[from] AlgError),
}

/// Knobs shared by the pipelines.
#[derive(Clone, Copy, Debug)]
pub struct Options {
    /// Highest homological degree reported.
    pub depth: usize,
    /// Number of trailing connecting maps used to identify colimits.
    pub window: usize,
    /// Cell budget for bar resolutions.
    pub budget: usize,
    pub exec: Exec,
}

impl Default for Options {
    fn default() -> Self {
        Options { depth: 4, window: 3, budget: BAR_BUDGET, exec: Exec::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyTable {
    pub degrees: BTreeMap<i64, FgAbGroup>,
    pub coeffs: CoeffRing,
    pub route: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub level: Option<usize>,
}

/// Level tables, the integral sequences per degree and their colimits
/// (identified over `Z`, then base-changed to the table's ring).
#[derive(Clone, Debug, Serialize)]
pub struct LevelSystem {
    pub levels: Vec<HomologyTable>,
    pub sequences: BTreeMap<i64, ColimitSequence>,
    pub colimits: BTreeMap<i64, ColimitVerdict>,
}

impl LevelSystem {
    pub fn last(&self) -> &HomologyTable {
        self.levels.last().expect("at least one level")
    }

    /// The identified colimits, or the first undecided degree.
    pub fn colimit_table(&self) -> Result<BTreeMap<i64, DirectSum>, PipelineError> {
        self.colimits
            .iter()
            .map(|(n, v)| match v {
                ColimitVerdict::Identified { group } => Ok((*n, group.clone())),
                ColimitVerdict::Truncated { pattern, .. } => {
                    Err(PipelineError::Undecided { degree: *n, pattern: pattern.clone() })
                }
            })
            .collect()
    }
}

/// `H_*(G, Z[S_k])` for a tower of finite G-sets with pullback maps
/// `pullbacks[k] : Z[S_k] -> Z[S_{k+1}]`, and the colimit per degree.
pub fn level_system(
    group: &Group,
    sets: &[FiniteGSet],
    pullbacks: &[IntMatrix],
    coeffs: &CoeffRing,
    route: &str,
    opts: &Options,
) -> Result<LevelSystem, PipelineError> {
    if sets.is_empty() || pullbacks.len() + 1 != sets.len() {
        return Err(PipelineError::Invalid("a tower needs one pullback between consecutive levels".into()));
    }
    let res = resolution_for(group, opts.depth + 1, opts.budget)?;
    let complexes: Vec<ChainComplex> = opts
        .exec
        .map(sets, |s| coefficient_complex(&res, s, CoeffRing::Integers, Exec::Sequential))
        .into_iter()
        .collect::<Result<_, _>>()?;
    // one work item per (level, degree)
    let per = opts.depth + 1;
    let flat: Vec<HomologyWithGenerators> = opts
        .exec
        .map_range(complexes.len() * per, |i| complexes[i / per].homology_with_generators((i % per) as i64))
        .into_iter()
        .collect::<Result<_, _>>()?;
    let complexes: Vec<&[HomologyWithGenerators]> = flat.chunks(per).collect();
    let levels = complexes
        .iter()
        .enumerate()
        .map(|(k, h)| HomologyTable {
            degrees: h.iter().map(|g| (g.degree, tensor_coeffs(&g.group(), coeffs))).collect(),
            coeffs: coeffs.clone(),
            route: route.to_string(),
            level: Some(k),
        })
        .collect();
    let per_degree = opts.exec.map_range(per, |n| -> Result<(ColimitSequence, ColimitVerdict), PipelineError> {
        let terms: Vec<PresentedGroup> = complexes.iter().map(|h| PresentedGroup::new(h[n].moduli.clone())).collect();
        let maps: Vec<IntMatrix> = (0..pullbacks.len())
            .map(|k| {
                let r = res.ranks()[n];
                let p = &pullbacks[k];
                let mut f = IntMatrix::zeros(r * p.rows(), r * p.cols());
                for i in 0..r {
                    f.add_block(i * p.rows(), i * p.cols(), p);
                }
                complexes[k][n].induced(&f, &complexes[k + 1][n])
            })
            .collect();
        let seq = ColimitSequence::new(terms, maps)?;
        let verdict = if seq.len() == 1 {
            ColimitVerdict::Identified { group: DirectSum::from(&seq.terms()[0].group()) }
        } else {
            colimit_identify(&seq, opts.window.min(seq.len() - 1))?
        };
        Ok((seq, verdict.tensor(coeffs)))
    });
    let mut sequences = BTreeMap::new();
    let mut colimits = BTreeMap::new();
    for (n, r) in per_degree.into_iter().enumerate() {
        let (seq, verdict) = r?;
        sequences.insert(n as i64, seq);
        colimits.insert(n as i64, verdict);
    }
    Ok(LevelSystem { levels, sequences, colimits })
}

/// `colim_k H_*(G, k[G/G_k])` along the pullbacks of the projections.
pub fn groupoid_homology(spec: &OdometerSpec, coeffs: &CoeffRing, opts: &Options) -> Result<LevelSystem, PipelineError> {
    let odo = Odometer::new(spec)?;
    let (sets, pullbacks) = tower(&odo)?;
    level_system(odo.group(), &sets, &pullbacks, coeffs, "groupoid", opts)
}

fn tower(odo: &Odometer) -> Result<(Vec<FiniteGSet>, Vec<IntMatrix>), PipelineError> {
    let mut sets = Vec::new();
    let mut pullbacks = Vec::new();
    for k in 0..=odo.truncation_level() {
        let level = odo.level(k)?;
        if let Some(proj) = &level.projection {
            let prev: Vec<usize> = (0..sets.last().map_or(0, |s: &FiniteGSet| s.len())).collect();
            let next: Vec<usize> = (0..level.set.len()).collect();
            pullbacks.push(pullback_matrix(&prev, &next, proj));
        }
        sets.push(level.set.clone());
    }
    Ok((sets, pullbacks))
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassHomology {
    pub representative: Element,
    pub centralizer: String,
    pub system: LevelSystem,
}

/// `⊕_c H_*(Z(g_c), k[X^{g_c}])` level by level and in the colimit.
#[derive(Clone, Debug, Serialize)]
pub struct HattedHomology {
    pub classes: Vec<ClassHomology>,
    pub levels: Vec<HomologyTable>,
    pub colimits: BTreeMap<i64, ColimitVerdict>,
    /// Free rank of `H_0` contributed by the non-identity classes.
    pub m: usize,
}

impl HattedHomology {
    pub fn colimit_table(&self) -> Result<BTreeMap<i64, DirectSum>, PipelineError> {
        LevelSystem { levels: Vec::new(), sequences: BTreeMap::new(), colimits: self.colimits.clone() }.colimit_table()
    }
}

pub fn hatted_homology(spec: &OdometerSpec, coeffs: &CoeffRing, opts: &Options) -> Result<HattedHomology, PipelineError> {
    let odo = Odometer::new(spec)?;
    let blowups = (0..=odo.truncation_level())
        .map(|k| blowup(&odo.level(k)?.set, odo.classes(), opts.exec))
        .collect::<Result<Vec<_>, _>>()?;
    let classes = opts.exec.map_range(odo.classes().len(), |c| -> Result<ClassHomology, PipelineError> {
        let class = &odo.classes()[c];
        let sets: Vec<FiniteGSet> = blowups.iter().map(|b| b.pieces[c].fixed.set.clone()).collect();
        let pullbacks = (1..blowups.len())
            .map(|k| {
                let proj = odo.level(k)?.projection.as_ref().expect("levels above 0 project");
                Ok(pullback_matrix(&blowups[k - 1].pieces[c].fixed.points, &blowups[k].pieces[c].fixed.points, proj))
            })
            .collect::<Result<Vec<_>, PipelineError>>()?;
        let system = level_system(class.centralizer.abstract_group(), &sets, &pullbacks, coeffs, "hatted", opts)?;
        Ok(ClassHomology {
            representative: class.representative.clone(),
            centralizer: class.centralizer.abstract_group().name(),
            system,
        })
    });
    let classes: Vec<ClassHomology> = classes.into_iter().collect::<Result<_, _>>()?;
    let levels = (0..blowups.len())
        .map(|k| HomologyTable {
            degrees: sum_tables(classes.iter().map(|c| &c.system.levels[k].degrees), coeffs),
            coeffs: coeffs.clone(),
            route: "hatted".into(),
            level: Some(k),
        })
        .collect();
    let colimits = (0..=opts.depth as i64)
        .map(|n| (n, sum_verdicts(classes.iter().map(|c| &c.system.colimits[&n]))))
        .collect();
    let m = classes
        .iter()
        .skip(1)
        .filter_map(|c| c.system.colimits[&0].identified().map(DirectSum::rational_rank))
        .sum();
    Ok(HattedHomology { classes, levels, colimits, m })
}

fn sum_tables<'a, I>(tables: I, coeffs: &CoeffRing) -> BTreeMap<i64, FgAbGroup>
where
    I: Iterator<Item = &'a BTreeMap<i64, FgAbGroup>>,
{
    let mut out: BTreeMap<i64, FgAbGroup> = BTreeMap::new();
    for t in tables {
        for (n, g) in t {
            let acc = out.entry(*n).or_insert_with(|| FgAbGroup::zero(coeffs.clone()));
            *acc = acc.direct_sum(g);
        }
    }
    out
}

fn sum_verdicts<'a, I: Iterator<Item = &'a ColimitVerdict>>(vs: I) -> ColimitVerdict {
    let vs: Vec<&ColimitVerdict> = vs.collect();
    if vs.iter().all(|v| v.identified().is_some()) {
        let group = vs.iter().fold(DirectSum::zero(), |acc, v| acc.plus(v.identified().expect("checked")));
        return ColimitVerdict::Identified { group };
    }
    let mut last: Option<FgAbGroup> = None;
    let mut patterns = Vec::new();
    for (c, v) in vs.iter().enumerate() {
        if let ColimitVerdict::Truncated { last: l, pattern } = v {
            last = Some(match last {
                None => l.clone(),
                Some(acc) => acc.direct_sum(l),
            });
            patterns.push(format!("class {c}: {pattern}"));
        }
    }
    ColimitVerdict::Truncated { last: last.expect("some class is truncated"), pattern: patterns.join("; ") }
}

/// `⊕_c H_n(Z(g_c), k[S^{g_c}])` for one finite G-set.
pub fn hatted_of_gset(s: &FiniteGSet, coeffs: &CoeffRing, opts: &Options) -> Result<HomologyTable, PipelineError> {
    let classes = torsion_conjugacy_classes(s.group());
    let b = blowup(s, &classes, opts.exec)?;
    let tables = b
        .pieces
        .iter()
        .map(|p| {
            let res = resolution_for(p.fixed.set.group(), opts.depth + 1, opts.budget)?;
            let c = coefficient_complex(&res, &p.fixed.set, coeffs.clone(), Exec::Sequential)?;
            Ok((0..=opts.depth as i64).map(|n| (n, c.homology_at(n).expect("in range"))).collect())
        })
        .collect::<Result<Vec<BTreeMap<i64, FgAbGroup>>, PipelineError>>()?;
    Ok(HomologyTable {
        degrees: sum_tables(tables.iter(), coeffs),
        coeffs: coeffs.clone(),
        route: "hatted".into(),
        level: None,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrosscheckRow {
    pub degree: i64,
    pub hatted: FgAbGroup,
    pub bs: FgAbGroup,
    pub equal: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrosscheckReport {
    pub coeffs: CoeffRing,
    /// Whether every stabilizer order is a unit; the comparison is only
    /// expected to hold when it is.
    pub invertible: bool,
    pub rows: Vec<CrosscheckRow>,
    pub equal: bool,
}

/// Hatted homology in degree `n` against the coinvariant double complex in
/// degree `-n`, for `n` in `degrees`.
pub fn bcr_gh_crosscheck(
    y: &GSimplicialComplex,
    x: &FiniteGSet,
    coeffs: &CoeffRing,
    degrees: RangeInclusive<i64>,
    opts: &Options,
) -> Result<CrosscheckReport, PipelineError> {
    let invertible = check_invertible(y, coeffs).is_ok();
    let top = degrees.clone().map(i64::abs).max().unwrap_or(0);
    let hat = hatted_of_gset(x, coeffs, &Options { depth: top.max(0) as usize, ..*opts })?;
    let neg: Vec<i64> = degrees.clone().map(|n| -n).collect();
    let lo = neg.iter().copied().min().unwrap_or(0);
    let hi = neg.iter().copied().max().unwrap_or(0);
    let bs = bs_cohomology_unchecked(y, x, coeffs, lo..=hi)?;
    let zero = FgAbGroup::zero(coeffs.clone());
    let rows: Vec<CrosscheckRow> = degrees
        .map(|n| {
            let a = hat.degrees.get(&n).cloned().unwrap_or_else(|| zero.clone());
            let b = bs.get(&-n).cloned().unwrap_or_else(|| zero.clone());
            CrosscheckRow { degree: n, equal: a == b, hatted: a, bs: b }
        })
        .collect();
    let equal = rows.iter().all(|r| r.equal);
    Ok(CrosscheckReport { coeffs: coeffs.clone(), invertible, rows, equal })
}

/// Torsion exponent (largest invariant factor) of a colimit, if identified.
pub fn torsion_exponent(v: &ColimitVerdict) -> Option<BigInt> {
    v.identified().map(|g| g.torsion().last().cloned().unwrap_or_else(|| BigInt::from(1)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::GroupDesc;

    fn dihedral(indices: Vec<u64>) -> OdometerSpec {
        let truncation_level = indices.len();
        OdometerSpec { group: GroupDesc::InfiniteDihedral, odometer_indices: indices, subgroups: None, truncation_level }
    }

    fn shown(v: &ColimitVerdict) -> String {
        v.to_string()
    }

    #[test]
    fn integer_odometer() {
        let spec = OdometerSpec {
            group: GroupDesc::FreeAbelianRank1,
            odometer_indices: vec![2, 4, 8, 16],
            subgroups: None,
            truncation_level: 4,
        };
        let opts = Options { depth: 2, ..Options::default() };
        let s = groupoid_homology(&spec, &CoeffRing::Integers, &opts).unwrap();
        assert_eq!(shown(&s.colimits[&0]), "Z[1/2]");
        assert_eq!(s.last().degrees[&1].to_string(), "Z");
        assert_eq!(shown(&s.colimits[&1]), "Z");
        assert!(s.last().degrees[&2].is_zero());
    }

    #[test]
    fn scarparo_small() {
        let opts = Options { depth: 3, ..Options::default() };
        let spec = dihedral(vec![2, 4, 8, 16, 32]);
        let g = groupoid_homology(&spec, &CoeffRing::Integers, &opts).unwrap();
        assert_eq!(shown(&g.colimits[&0]), "Z[1/2]");
        assert_eq!(g.last().degrees[&1].to_string(), "(Z/2)^2");
        assert!(g.colimits[&2].identified().unwrap().is_zero());
        let h = hatted_homology(&spec, &CoeffRing::Integers, &opts).unwrap();
        assert_eq!(h.m, 1);
        assert_eq!(shown(&h.colimits[&0]), "Z + Z[1/2]");
        assert!(h.colimits[&2].identified().unwrap().is_zero());
        let odd = h.colimits[&1].identified().unwrap();
        assert_eq!(odd.rational_rank(), 0);
        assert_eq!(torsion_exponent(&h.colimits[&1]), Some(BigInt::from(2)));
    }

    #[test]
    fn two_times_three_power() {
        let opts = Options { depth: 1, ..Options::default() };
        let h = hatted_homology(&dihedral(vec![2, 6, 18, 54]), &CoeffRing::Integers, &opts).unwrap();
        assert_eq!(h.m, 2);
        assert_eq!(h.colimits[&0].identified().unwrap().rational_rank(), 3);
    }

    #[test]
    fn crosscheck_cyclic_point() {
        let g = Group::cyclic(2);
        let y = GSimplicialComplex::point(&g).unwrap();
        let x = FiniteGSet::point(&g);
        let opts = Options::default();
        let z = bcr_gh_crosscheck(&y, &x, &CoeffRing::Integers, -3..=3, &opts).unwrap();
        assert!(!z.invertible && !z.equal);
        let half = CoeffRing::inverted([2]).unwrap();
        let r = bcr_gh_crosscheck(&y, &x, &half, -3..=3, &opts).unwrap();
        assert!(r.invertible && r.equal, "{r:?}");
    }

    #[test]
    fn crosscheck_tree() {
        let y = GSimplicialComplex::dihedral_tree();
        let opts = Options::default();
        let x = FiniteGSet::point(y.group());
        assert!(bcr_gh_crosscheck(&y, &x, &CoeffRing::Rationals, -3..=3, &opts).unwrap().equal);
        let odo = Odometer::new(&dihedral(vec![2, 4, 8, 16])).unwrap();
        let x4 = &odo.level(4).unwrap().set;
        let r = bcr_gh_crosscheck(&y, x4, &CoeffRing::Rationals, -3..=3, &opts).unwrap();
        assert!(r.equal, "{r:?}");
        assert_eq!(r.rows[3].hatted.rank(), 3);
    }
}
