//! Named worked examples: odometer actions, equivariant complexes and the
//! K-theory data they are compared against.

use std::collections::BTreeMap;

use anyhow::{bail, Context, Result};
use hk_core::gcomplex::GSimplicialComplex;
use hk_core::groups::{Group, GroupDesc};
use hk_core::gsets::{FiniteGSet, Odometer, OdometerSpec};
use hk_core::hkpipeline::{KSummand, KTheoryInput, ZCount};

/// Homology rows by `q`, and cohomology dimensions by `q`.
pub type SurfaceRows = (BTreeMap<i64, Vec<usize>>, BTreeMap<i64, usize>);

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Preset {
    /// `D_∞` with `n_k = 2^k`.
    Scarparo2k,
    /// `D_∞` with `n_k = 2·3^(k-1)`.
    Scarparo2x3k,
    /// `Z` with `n_k = 2^k`.
    ZOdometer2k,
    /// `Z/m` acting on a point; the complex is a point.
    CyclicPoint(u64),
    /// `D_∞` on a point with its tree.
    DihedralTreePoint,
    /// Homology dimensions and K-groups of a closed genus-`g` surface group
    /// acting on the circle.
    SurfaceGenus(u64),
}

pub const NAMES: &[&str] =
    &["scarparo-2k", "scarparo-2x3k", "z-odometer-2k", "cyclic-point-<m>", "dihedral-tree-point", "surface-genus-<g>"];

fn z(n: u64) -> KSummand {
    KSummand::Z(ZCount::Finite(n))
}

impl Preset {
    pub fn parse(name: &str) -> Result<Preset> {
        let num = |rest: &str| -> Result<u64> {
            rest.parse().with_context(|| format!("preset `{name}`: `{rest}` is not a positive integer"))
        };
        let p = match name {
            "scarparo-2k" => Preset::Scarparo2k,
            "scarparo-2x3k" => Preset::Scarparo2x3k,
            "z-odometer-2k" => Preset::ZOdometer2k,
            "dihedral-tree-point" => Preset::DihedralTreePoint,
            _ => {
                if let Some(m) = name.strip_prefix("cyclic-point-") {
                    let m = num(m)?;
                    if m == 0 {
                        bail!("preset `{name}`: the group order must be at least 1");
                    }
                    Preset::CyclicPoint(m)
                } else if let Some(g) = name.strip_prefix("surface-genus-") {
                    let g = num(g)?;
                    if g < 2 {
                        bail!("preset `{name}`: the genus must be at least 2");
                    }
                    Preset::SurfaceGenus(g)
                } else {
                    bail!("unknown preset `{name}`; known presets: {}", NAMES.join(", "))
                }
            }
        };
        Ok(p)
    }

    pub fn name(&self) -> String {
        match self {
            Preset::Scarparo2k => "scarparo-2k".into(),
            Preset::Scarparo2x3k => "scarparo-2x3k".into(),
            Preset::ZOdometer2k => "z-odometer-2k".into(),
            Preset::CyclicPoint(m) => format!("cyclic-point-{m}"),
            Preset::DihedralTreePoint => "dihedral-tree-point".into(),
            Preset::SurfaceGenus(g) => format!("surface-genus-{g}"),
        }
    }

    pub fn default_levels(&self) -> usize {
        match self {
            Preset::Scarparo2k | Preset::ZOdometer2k => 6,
            Preset::Scarparo2x3k => 4,
            Preset::CyclicPoint(_) | Preset::DihedralTreePoint | Preset::SurfaceGenus(_) => 0,
        }
    }

    /// The odometer truncated at `levels` (at least one).
    pub fn odometer(&self, levels: Option<usize>) -> Result<OdometerSpec> {
        let l = levels.unwrap_or(self.default_levels()).max(1);
        let (group, indices): (GroupDesc, Vec<u64>) = match self {
            Preset::Scarparo2k => (GroupDesc::InfiniteDihedral, (1..=l as u32).map(|k| 2u64.pow(k)).collect()),
            Preset::Scarparo2x3k => (GroupDesc::InfiniteDihedral, (0..l as u32).map(|k| 2 * 3u64.pow(k)).collect()),
            Preset::ZOdometer2k => (GroupDesc::FreeAbelianRank1, (1..=l as u32).map(|k| 2u64.pow(k)).collect()),
            // the finite-index chain of a finite group stops at the trivial
            // subgroup, so every level past the first is the regular set
            Preset::CyclicPoint(m) => (GroupDesc::FiniteCyclic { m: *m }, vec![*m; l]),
            Preset::DihedralTreePoint => (GroupDesc::InfiniteDihedral, (1..=l as u32).map(|k| 2u64.pow(k)).collect()),
            Preset::SurfaceGenus(_) => bail!("preset `{}` has no odometer", self.name()),
        };
        Ok(OdometerSpec { group, odometer_indices: indices, subgroups: None, truncation_level: l })
    }

    /// The cocompact model and the G-set: a point, or the odometer level
    /// when `levels` is given.
    pub fn equivariant(&self, levels: Option<usize>) -> Result<(GSimplicialComplex, FiniteGSet)> {
        let y = match self {
            Preset::CyclicPoint(m) => GSimplicialComplex::point(&Group::cyclic(*m))?,
            Preset::DihedralTreePoint | Preset::Scarparo2k | Preset::Scarparo2x3k => GSimplicialComplex::dihedral_tree(),
            Preset::ZOdometer2k => GSimplicialComplex::integer_line().barycentric_subdivision()?,
            Preset::SurfaceGenus(_) => bail!("preset `{}` has no built-in complex", self.name()),
        };
        let x = match levels {
            None | Some(0) => FiniteGSet::point(y.group()),
            Some(k) => {
                let spec = self.odometer(Some(k))?;
                Odometer::new(&spec)?.level(k)?.set.clone()
            }
        };
        Ok((y, x))
    }

    /// K-groups of the reduced crossed product; `"m"` stands for the
    /// computed number of surviving reflection classes.
    pub fn ktheory(&self) -> KTheoryInput {
        let m = || KSummand::Z(ZCount::Other("m".into()));
        let (k0, k1) = match self {
            Preset::Scarparo2k => (vec![KSummand::Zinv(vec![2]), m()], vec![]),
            Preset::Scarparo2x3k => (vec![KSummand::Zinv(vec![3]), m()], vec![]),
            Preset::ZOdometer2k => (vec![KSummand::Zinv(vec![2])], vec![z(1)]),
            Preset::CyclicPoint(n) => (vec![z(*n)], vec![]),
            Preset::DihedralTreePoint => (vec![z(3)], vec![]),
            Preset::SurfaceGenus(g) => (vec![KSummand::Zmod(2 * g - 2), z(2 * g + 1)], vec![z(2 * g + 1)]),
        };
        KTheoryInput { k0, k1 }
    }

    /// Rows `q = 0, -1` of group homology dimensions and the cohomology
    /// dimensions of the circle.
    pub fn surface_rows(&self) -> Option<SurfaceRows> {
        match self {
            Preset::SurfaceGenus(g) => {
                let row = vec![1, 2 * *g as usize, 1];
                Some((BTreeMap::from([(0, row.clone()), (-1, row)]), BTreeMap::from([(0, 1), (-1, 1)])))
            }
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for n in ["scarparo-2k", "scarparo-2x3k", "z-odometer-2k", "cyclic-point-3", "dihedral-tree-point", "surface-genus-2"] {
            assert_eq!(Preset::parse(n).unwrap().name(), n);
        }
        assert!(Preset::parse("cyclic-point-0").is_err());
        assert!(Preset::parse("surface-genus-x").is_err());
        assert!(Preset::parse("nope").is_err());
    }

    #[test]
    fn contents() {
        let s = Preset::parse("surface-genus-2").unwrap().ktheory();
        assert_eq!(s.k0().unwrap().to_string(), "Z^5 + Z/2");
        assert_eq!(s.k1().unwrap().rational_rank(), 5);
        let c = Preset::parse("cyclic-point-3").unwrap().odometer(Some(1)).unwrap();
        assert_eq!(c.group, GroupDesc::FiniteCyclic { m: 3 });
        let o = Preset::Scarparo2x3k.odometer(None).unwrap();
        assert_eq!(o.odometer_indices, vec![2, 6, 18, 54]);
    }
}
