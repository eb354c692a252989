//! G-simplicial complexes given by orbit representatives, barycentric
//! subdivision, the basic complex, the coinvariant double complex and the
//! contraction check on the universal proper complex.

mod basic;
mod contraction;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::equivmod::ModError;
use crate::exactalg::AlgError;
use crate::groups::{greedy_generators, Element, Group, GroupDesc, GroupError, Subgroup};
use crate::gsets::GSetError;

pub use basic::{
    basic_complex, bs_cohomology, bs_cohomology_unchecked, check_invertible, dc1_build, BasicComplex, Dc1, DoubleComplex,
};
pub use contraction::{subgroups_of, verify_contraction, ContractionReport, Operator, CHAIN_BUDGET};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ComplexError {
    #[error("invalid complex: {0}")]
    Invalid(String),
    #[error("structure requirement fails: {0}")]
    Structure(String),
    #[error("coefficients must invert {prime} (order of the stabilizer {stabilizer})")]
    NotInvertible { prime: u64, stabilizer: String },
    #[error("size budget exceeded: {needed} needed, budget {budget}")]
    BudgetExceeded { needed: usize, budget: usize },
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Module(#[from] ModError),
    #[error(transparent)]
    GSet(#[from] GSetError),
    #[error(transparent)]
    Alg(#[from] AlgError),
}

/// A vertex `g v_o`, with `g` the least element of its coset `g G_o`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Vertex {
    pub orbit: usize,
    pub coset: Element,
}

#[derive(Clone, Debug)]
pub struct VertexOrbit {
    pub stabilizer: Subgroup,
    elements: Vec<Element>,
}

#[derive(Clone, Debug)]
pub struct SimplexOrbit {
    /// Sorted by orbit index, then coset.
    pub vertices: Vec<Vertex>,
    pub stabilizer: Subgroup,
    stab_elements: Vec<Element>,
    /// Face `j` is `w · rep[orbit]` one dimension down.
    faces: Vec<(usize, Element)>,
}

impl SimplexOrbit {
    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }

    /// Ambient elements of the stabilizer.
    pub fn stabilizer_elements(&self) -> &[Element] {
        &self.stab_elements
    }

    pub fn face(&self, j: usize) -> &(usize, Element) {
        &self.faces[j]
    }
}

/// Orbit data of a G-finite G-simplicial complex with finite vertex
/// stabilizers. Dimension-0 representatives are the vertices `(o, e)`.
#[derive(Clone, Debug)]
pub struct GSimplicialComplex {
    group: Group,
    vertex_orbits: Vec<VertexOrbit>,
    simplices: Vec<Vec<SimplexOrbit>>,
}

/// JSON form: vertex orbits by stabilizer generators, higher simplex orbits
/// by one representative vertex list each.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GscSpec {
    pub group: GroupDesc,
    pub vertices: Vec<VertexSpec>,
    #[serde(default)]
    pub simplices: Vec<SimplexSpec>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexSpec {
    #[serde(default)]
    pub stabilizer: Vec<Element>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimplexSpec {
    pub dim: usize,
    /// `(vertex orbit, group element)` pairs.
    pub vertices: Vec<(usize, Element)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureReport {
    pub proper: bool,
    pub g_finite: bool,
    pub type_preserving: bool,
    pub orientable: bool,
    /// A G-invariant order on vertices: compare orbit positions in this list.
    pub orientation: Option<Vec<usize>>,
    /// A simplex meeting one orbit twice, when not orientable.
    pub witness: Option<Vec<Vertex>>,
}

impl GSimplicialComplex {
    /// `simplices[d]` lists representatives of dimension `d + 1`; every face
    /// must be a translate of a listed representative.
    pub fn new(
        group: Group,
        vertex_stabilizers: Vec<Vec<Element>>,
        simplices: Vec<Vec<Vec<(usize, Element)>>>,
    ) -> Result<GSimplicialComplex, ComplexError> {
        let mut vertex_orbits = Vec::new();
        for gens in vertex_stabilizers {
            if let Some(bad) = gens.iter().find(|g| !group.contains(g)) {
                return Err(ComplexError::Invalid(format!("{bad} is not in {}", group.name())));
            }
            let stabilizer = Subgroup::finite_generated(&group, &gens)
                .map_err(|e| ComplexError::Structure(format!("vertex stabilizers must be finite: {e}")))?;
            let elements = stabilizer.elements().expect("finite");
            vertex_orbits.push(VertexOrbit { stabilizer, elements });
        }
        if vertex_orbits.is_empty() {
            return Err(ComplexError::Invalid("a complex needs at least one vertex orbit".into()));
        }
        let mut y = GSimplicialComplex { group, vertex_orbits, simplices: Vec::new() };
        let dim0 = (0..y.vertex_orbits.len())
            .map(|o| {
                let v = Vertex { orbit: o, coset: y.group.identity() };
                let stabilizer = y.vertex_orbits[o].stabilizer.clone();
                let stab_elements = y.vertex_orbits[o].elements.clone();
                SimplexOrbit { vertices: vec![v], stabilizer, stab_elements, faces: Vec::new() }
            })
            .collect();
        y.simplices.push(dim0);
        for (d, reps) in simplices.into_iter().enumerate() {
            let dim = d + 1;
            let mut level: Vec<SimplexOrbit> = Vec::new();
            for rep in reps {
                if rep.len() != dim + 1 {
                    return Err(ComplexError::Invalid(format!("a {dim}-simplex needs {} vertices", dim + 1)));
                }
                let mut verts = Vec::new();
                for (o, g) in rep {
                    if o >= y.vertex_orbits.len() || !y.group.contains(&g) {
                        return Err(ComplexError::Invalid(format!("bad vertex ({o}, {g})")));
                    }
                    verts.push(y.vertex(o, &g));
                }
                verts.sort();
                if verts.windows(2).any(|w| w[0] == w[1]) {
                    return Err(ComplexError::Invalid("repeated vertex in a simplex".into()));
                }
                if y.find_in(&level, &verts).is_some() {
                    return Err(ComplexError::Invalid("two representatives of one simplex orbit".into()));
                }
                let mut faces = Vec::new();
                for j in 0..=dim {
                    let mut f = verts.clone();
                    f.remove(j);
                    let found = y
                        .find(dim - 1, &f)
                        .ok_or_else(|| ComplexError::Invalid(format!("a face of a {dim}-simplex is missing")))?;
                    faces.push(found);
                }
                let stab_elements = y.simplex_stabilizer(&verts);
                let gens = greedy_generators(&y.group, &stab_elements);
                let stabilizer = Subgroup::finite_generated(&y.group, &gens)?;
                let stab_elements = stabilizer.elements().expect("finite");
                level.push(SimplexOrbit { vertices: verts, stabilizer, stab_elements, faces });
            }
            y.simplices.push(level);
        }
        while y.simplices.len() > 1 && y.simplices.last().is_some_and(|l| l.is_empty()) {
            y.simplices.pop();
        }
        Ok(y)
    }

    pub fn from_spec(spec: &GscSpec) -> Result<GSimplicialComplex, ComplexError> {
        let group = Group::new(spec.group.clone())?;
        let stabs = spec.vertices.iter().map(|v| v.stabilizer.clone()).collect();
        let top = spec.simplices.iter().map(|s| s.dim).max().unwrap_or(0);
        let mut by_dim: Vec<Vec<Vec<(usize, Element)>>> = vec![Vec::new(); top];
        for s in &spec.simplices {
            if s.dim == 0 {
                return Err(ComplexError::Invalid("vertices are given by their orbits, not as simplices".into()));
            }
            by_dim[s.dim - 1].push(s.vertices.clone());
        }
        GSimplicialComplex::new(group, stabs, by_dim)
    }

    /// A point with stabilizer `G` (finite).
    pub fn point(group: &Group) -> Result<GSimplicialComplex, ComplexError> {
        let gens = group.generators().to_vec();
        GSimplicialComplex::new(group.clone(), vec![gens], vec![])
    }

    /// The Bass-Serre tree of `D_∞ = <(0,1)> * <(1,1)>`: two vertex orbits,
    /// one free edge orbit.
    pub fn dihedral_tree() -> GSimplicialComplex {
        let g = Group::infinite_dihedral();
        let e = g.identity();
        GSimplicialComplex::new(
            g,
            vec![vec![Element::Dihedral(0, 1)], vec![Element::Dihedral(1, 1)]],
            vec![vec![vec![(0, e.clone()), (1, e)]]],
        )
        .expect("tree data is consistent")
    }

    /// The Bass-Serre tree of `Z/a * Z/b`.
    pub fn amalgam_tree(a: u64, b: u64) -> Result<GSimplicialComplex, ComplexError> {
        let g = Group::amalgam(a, b)?;
        let e = g.identity();
        GSimplicialComplex::new(
            g,
            vec![vec![Element::Word(vec![(0, 1)])], vec![Element::Word(vec![(1, 1)])]],
            vec![vec![vec![(0, e.clone()), (1, e)]]],
        )
    }

    /// The full `n`-simplex with the trivial group.
    pub fn full_simplex(n: usize) -> GSimplicialComplex {
        let all: Vec<usize> = (0..=n).collect();
        GSimplicialComplex::trivial_group(n + 1, &subsets(&all).into_iter().filter(|s| s.len() > 1).collect::<Vec<_>>())
            .expect("closed under faces")
    }

    /// A simplicial complex on vertices `0..n` with the trivial group; the
    /// list must be closed under taking faces of size at least two.
    pub fn trivial_group(n: usize, simplices: &[Vec<usize>]) -> Result<GSimplicialComplex, ComplexError> {
        let g = Group::trivial();
        let top = simplices.iter().map(|s| s.len()).max().unwrap_or(1);
        let mut by_dim: Vec<Vec<Vec<(usize, Element)>>> = vec![Vec::new(); top.saturating_sub(1)];
        for s in simplices {
            by_dim[s.len() - 2].push(s.iter().map(|&v| (v, g.identity())).collect());
        }
        GSimplicialComplex::new(g.clone(), vec![vec![]; n], by_dim)
    }

    /// `Z` acting on the real line with one vertex orbit (not orientable).
    pub fn integer_line() -> GSimplicialComplex {
        let g = Group::integers();
        GSimplicialComplex::new(g, vec![vec![]], vec![vec![vec![(0, Element::Int(0)), (0, Element::Int(1))]]])
            .expect("line data is consistent")
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn dim(&self) -> usize {
        self.simplices.len() - 1
    }

    pub fn vertex_orbits(&self) -> &[VertexOrbit] {
        &self.vertex_orbits
    }

    /// Orbit representatives in dimension `d`.
    pub fn simplex_orbits(&self, d: usize) -> &[SimplexOrbit] {
        self.simplices.get(d).map_or(&[], |v| v.as_slice())
    }

    pub fn orbit_counts(&self) -> Vec<usize> {
        self.simplices.iter().map(|l| l.len()).collect()
    }

    /// `g v_o` in canonical form.
    pub fn vertex(&self, o: usize, g: &Element) -> Vertex {
        let coset = self.vertex_orbits[o].elements.iter().map(|h| self.group.mul(g, h)).min().expect("nonempty");
        Vertex { orbit: o, coset }
    }

    pub fn act_vertex(&self, g: &Element, v: &Vertex) -> Vertex {
        self.vertex(v.orbit, &self.group.mul(g, &v.coset))
    }

    /// Sorted image of a vertex set.
    pub fn act_simplex(&self, g: &Element, s: &[Vertex]) -> Vec<Vertex> {
        let mut out: Vec<Vertex> = s.iter().map(|v| self.act_vertex(g, v)).collect();
        out.sort();
        out
    }

    fn find_in(&self, level: &[SimplexOrbit], s: &[Vertex]) -> Option<(usize, Element)> {
        let orbits = |vs: &[Vertex]| {
            let mut o: Vec<usize> = vs.iter().map(|v| v.orbit).collect();
            o.sort_unstable();
            o
        };
        let want = orbits(s);
        for (r, rep) in level.iter().enumerate() {
            if orbits(&rep.vertices) != want {
                continue;
            }
            let v0 = &rep.vertices[0];
            let inv0 = self.group.inv(&v0.coset);
            for t in s.iter().filter(|t| t.orbit == v0.orbit) {
                for h in &self.vertex_orbits[v0.orbit].elements {
                    let w = self.group.mul(&self.group.mul(&t.coset, h), &inv0);
                    if self.act_simplex(&w, &rep.vertices) == s {
                        return Some((r, w));
                    }
                }
            }
        }
        None
    }

    /// `(r, w)` with `s = w · rep_r` in dimension `d`.
    pub fn find(&self, d: usize, s: &[Vertex]) -> Option<(usize, Element)> {
        self.simplices.get(d).and_then(|level| self.find_in(level, s))
    }

    fn simplex_stabilizer(&self, s: &[Vertex]) -> Vec<Element> {
        let v0 = &s[0];
        let inv0 = self.group.inv(&v0.coset);
        let mut out: BTreeSet<Element> = BTreeSet::new();
        for t in s.iter().filter(|t| t.orbit == v0.orbit) {
            for h in &self.vertex_orbits[v0.orbit].elements {
                let w = self.group.mul(&self.group.mul(&t.coset, h), &inv0);
                if self.act_simplex(&w, s) == s {
                    out.insert(w);
                }
            }
        }
        out.into_iter().collect()
    }

    pub fn check_structure(&self) -> StructureReport {
        // stabilizers are finite by construction and orbits are finite in number
        let proper = true;
        let g_finite = true;
        let mut type_preserving = true;
        let mut witness = None;
        for level in &self.simplices {
            for rep in level {
                for g in &rep.stab_elements {
                    if rep.vertices.iter().any(|v| &self.act_vertex(g, v) != v) {
                        type_preserving = false;
                    }
                }
                let orbits: BTreeSet<usize> = rep.vertices.iter().map(|v| v.orbit).collect();
                if orbits.len() != rep.vertices.len() && witness.is_none() {
                    witness = Some(rep.vertices.clone());
                }
            }
        }
        let orientable = witness.is_none();
        let orientation = orientable.then(|| (0..self.vertex_orbits.len()).collect());
        StructureReport { proper, g_finite, type_preserving, orientable, orientation, witness }
    }

    pub(crate) fn require_oriented(&self) -> Result<(), ComplexError> {
        let r = self.check_structure();
        if !r.type_preserving {
            return Err(ComplexError::Structure("the action is not type-preserving".into()));
        }
        if !r.orientable {
            return Err(ComplexError::Structure("no G-orientation: an orbit meets a simplex twice".into()));
        }
        Ok(())
    }

    /// Vertices are the simplices of `self` (orbits ordered by dimension),
    /// simplices are chains of proper inclusions.
    pub fn barycentric_subdivision(&self) -> Result<GSimplicialComplex, ComplexError> {
        let g = &self.group;
        let mut orbit_index: Vec<Vec<usize>> = Vec::new();
        let mut stabs: Vec<Vec<Element>> = Vec::new();
        for level in &self.simplices {
            let mut idx = Vec::new();
            for rep in level {
                idx.push(stabs.len());
                stabs.push(rep.stabilizer.generators().to_vec());
            }
            orbit_index.push(idx);
        }
        let mut by_dim: Vec<Vec<Vec<(usize, Element)>>> = vec![Vec::new(); self.dim()];
        let mut seen: Vec<BTreeSet<Vec<(usize, Element)>>> = vec![BTreeSet::new(); self.dim()];
        for level in &self.simplices {
            for top in level {
                let n = top.vertices.len();
                for chain in chains_ending_at_full(n) {
                    if chain.len() < 2 {
                        continue;
                    }
                    let d = chain.len() - 1;
                    let mut canon: Option<Vec<(usize, Element)>> = None;
                    for h in &top.stab_elements {
                        let mut verts: Vec<(usize, Element)> = chain
                            .iter()
                            .map(|mask| {
                                let sub: Vec<Vertex> =
                                    (0..n).filter(|i| mask & (1 << i) != 0).map(|i| top.vertices[i].clone()).collect();
                                let moved = self.act_simplex(h, &sub);
                                let (r, w) = self.find(moved.len() - 1, &moved).expect("faces are present");
                                let o = orbit_index[moved.len() - 1][r];
                                let stab = self.simplices[moved.len() - 1][r].stab_elements.clone();
                                let coset = stab.iter().map(|s| g.mul(&w, s)).min().expect("nonempty");
                                (o, coset)
                            })
                            .collect();
                        verts.sort();
                        if canon.as_ref().is_none_or(|c| &verts < c) {
                            canon = Some(verts);
                        }
                    }
                    let canon = canon.expect("stabilizer contains the identity");
                    if seen[d - 1].insert(canon.clone()) {
                        by_dim[d - 1].push(canon);
                    }
                }
            }
        }
        GSimplicialComplex::new(g.clone(), stabs, by_dim)
    }
}

/// Strict chains of nonempty subsets of `0..n` whose last member is the
/// full set, as bitmasks in increasing order.
fn chains_ending_at_full(n: usize) -> Vec<Vec<u64>> {
    let full: u64 = (1u64 << n) - 1;
    let mut out = Vec::new();
    fn extend(cur: Vec<u64>, out: &mut Vec<Vec<u64>>) {
        // cur is decreasing from the full set; prepend proper nonempty subsets
        let first = cur[0];
        let mut sub = (first - 1) & first;
        while sub > 0 {
            let mut next = vec![sub];
            next.extend_from_slice(&cur);
            extend(next.clone(), out);
            out.push(next);
            sub = (sub - 1) & first;
        }
    }
    out.push(vec![full]);
    extend(vec![full], &mut out);
    out
}

fn subsets(items: &[usize]) -> Vec<Vec<usize>> {
    let n = items.len();
    (1u64..(1u64 << n)).map(|m| (0..n).filter(|i| m & (1 << i) != 0).map(|i| items[i]).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tree_structure() {
        let t = GSimplicialComplex::dihedral_tree();
        let r = t.check_structure();
        assert!(r.orientable && r.type_preserving && r.proper);
        assert_eq!(t.orbit_counts(), vec![2, 1]);
        assert_eq!(t.simplex_orbits(1)[0].stabilizer.order(), Some(1));
    }

    #[test]
    fn line_not_orientable() {
        let r = GSimplicialComplex::integer_line().check_structure();
        assert!(!r.orientable);
        assert!(r.witness.is_some());
    }

    #[test]
    fn subdivided_triangle() {
        let s = GSimplicialComplex::full_simplex(2).barycentric_subdivision().unwrap();
        assert_eq!(s.orbit_counts(), vec![7, 12, 6]);
        assert!(s.check_structure().orientable);
        let e = GSimplicialComplex::full_simplex(1).barycentric_subdivision().unwrap();
        assert_eq!(e.orbit_counts(), vec![3, 2]);
    }

    #[test]
    fn subdivided_tree_and_line() {
        let s = GSimplicialComplex::dihedral_tree().barycentric_subdivision().unwrap();
        assert_eq!(s.orbit_counts(), vec![3, 2]);
        assert!(s.check_structure().orientable);
        let l = GSimplicialComplex::integer_line().barycentric_subdivision().unwrap();
        assert!(l.check_structure().orientable);
        assert_eq!(l.orbit_counts(), vec![2, 2]);
    }

    #[test]
    fn missing_face_rejected() {
        let g = Group::trivial();
        let e = g.identity();
        let r = GSimplicialComplex::new(g, vec![vec![]; 3], vec![vec![], vec![vec![(0, e.clone()), (1, e.clone()), (2, e)]]]);
        assert!(r.is_err());
    }
}
