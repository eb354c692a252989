use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{smith_normal_form, AlgError, CoeffRing, FgAbGroup, IntMatrix};

/// Bounded chain complex of free modules `C_lo, ..., C_hi` with
/// `d_n : C_n -> C_{n-1}` stored as a `rank(n-1) x rank(n)` integer matrix.
///
/// Matrices are integral; a non-integral coefficient ring means the complex
/// is the base change of the integral one, and homology is computed over
/// `Z` and then localized (all rings here are flat over `Z`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainComplex {
    lo: i64,
    ranks: Vec<usize>,
    boundaries: Vec<IntMatrix>,
    coeffs: CoeffRing,
}

impl ChainComplex {
    /// `boundaries[i]` is `d_{lo+i+1}`; there must be one fewer than `ranks`.
    pub fn new(lo: i64, ranks: Vec<usize>, boundaries: Vec<IntMatrix>, coeffs: CoeffRing) -> Result<Self, AlgError> {
        coeffs.validate()?;
        if ranks.is_empty() {
            return Err(AlgError::Shape("a chain complex needs at least one degree".into()));
        }
        if boundaries.len() + 1 != ranks.len() {
            return Err(AlgError::Shape(format!(
                "{} degrees need {} boundary matrices, got {}",
                ranks.len(),
                ranks.len() - 1,
                boundaries.len()
            )));
        }
        for (i, d) in boundaries.iter().enumerate() {
            if d.shape() != (ranks[i], ranks[i + 1]) {
                return Err(AlgError::Shape(format!(
                    "d_{} is {}x{}, expected {}x{}",
                    lo + i as i64 + 1,
                    d.rows(),
                    d.cols(),
                    ranks[i],
                    ranks[i + 1]
                )));
            }
        }
        for i in 0..boundaries.len().saturating_sub(1) {
            if !(&boundaries[i] * &boundaries[i + 1]).is_zero() {
                return Err(AlgError::NotAComplex { degree: lo + i as i64 + 1 });
            }
        }
        Ok(ChainComplex { lo, ranks, boundaries, coeffs })
    }

    /// A cochain complex `C^lo -> C^{lo+1} -> ...` stored with negated degrees:
    /// cochain degree `q` becomes chain degree `-q`.
    pub fn from_cochain(
        lo: i64,
        ranks: Vec<usize>,
        coboundaries: Vec<IntMatrix>,
        coeffs: CoeffRing,
    ) -> Result<Self, AlgError> {
        let hi = lo + ranks.len() as i64 - 1;
        let mut r = ranks;
        r.reverse();
        let mut b = coboundaries;
        b.reverse();
        ChainComplex::new(-hi, r, b, coeffs)
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.ranks.len() as i64 - 1
    }

    pub fn coeffs(&self) -> &CoeffRing {
        &self.coeffs
    }

    pub fn with_coeffs(&self, coeffs: CoeffRing) -> ChainComplex {
        ChainComplex { coeffs, ..self.clone() }
    }

    pub fn rank_at(&self, n: i64) -> usize {
        if n < self.lo || n > self.hi() {
            0
        } else {
            self.ranks[(n - self.lo) as usize]
        }
    }

    /// `d_n`, zero-padded outside the stored range.
    pub fn boundary(&self, n: i64) -> IntMatrix {
        if n > self.lo && n <= self.hi() {
            self.boundaries[(n - self.lo - 1) as usize].clone()
        } else {
            IntMatrix::zeros(self.rank_at(n - 1), self.rank_at(n))
        }
    }

    fn check_degree(&self, n: i64) -> Result<(), AlgError> {
        if n < self.lo || n > self.hi() {
            Err(AlgError::DegreeOutOfRange { degree: n, lo: self.lo, hi: self.hi() })
        } else {
            Ok(())
        }
    }

    /// `ker d_n / im d_{n+1}` over the complex's coefficient ring.
    pub fn homology_at(&self, n: i64) -> Result<FgAbGroup, AlgError> {
        self.check_degree(n)?;
        let rho = super::rank(&self.boundary(n));
        let inv = super::invariant_factors(&self.boundary(n + 1));
        let free = self.rank_at(n) - rho - inv.len();
        Ok(FgAbGroup::from_cyclic_orders(free, &inv, self.coeffs.clone()))
    }

    pub fn homology(&self) -> BTreeMap<i64, FgAbGroup> {
        (self.lo..=self.hi()).map(|n| (n, self.homology_at(n).expect("degree in range"))).collect()
    }

    /// Integral homology with explicit cycle representatives and a coordinate map.
    pub fn homology_with_generators(&self, n: i64) -> Result<HomologyWithGenerators, AlgError> {
        self.check_degree(n)?;
        let rn = self.rank_at(n);
        let s1 = smith_normal_form(&self.boundary(n));
        let rho = s1.rank();
        let tail: Vec<usize> = (rho..rn).collect();
        let kernel = s1.v.select_cols(&tail);
        let kernel_coords = s1.v_inv.select_rows(&tail);
        let b = &kernel_coords * &self.boundary(n + 1);
        let s2 = smith_normal_form(&b);
        let k = tail.len();
        let mut keep = Vec::new();
        let mut moduli = Vec::new();
        for i in 0..k {
            let e = s2.invariants.get(i).cloned().unwrap_or_else(BigInt::zero);
            if !e.is_one() {
                keep.push(i);
                moduli.push(e);
            }
        }
        let generators = &kernel * &s2.u_inv.select_cols(&keep);
        let coord_map = &s2.u.select_rows(&keep) * &kernel_coords;
        Ok(HomologyWithGenerators { degree: n, generators, coord_map, moduli })
    }
}

/// `H_n` of an integral complex as `⊕ Z/moduli[i]` (modulus 0 = free),
/// torsion generators first in increasing order, then free ones.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomologyWithGenerators {
    pub degree: i64,
    /// Columns are cycles representing the generators.
    pub generators: IntMatrix,
    /// Sends a cycle to its generator coordinates (reduce with `moduli`).
    pub coord_map: IntMatrix,
    pub moduli: Vec<BigInt>,
}

impl HomologyWithGenerators {
    pub fn group(&self) -> FgAbGroup {
        FgAbGroup::from_cyclic_orders(0, &self.moduli, CoeffRing::Integers)
    }

    pub fn num_generators(&self) -> usize {
        self.moduli.len()
    }

    pub fn coords(&self, cycle: &[BigInt]) -> Vec<BigInt> {
        let raw = self.coord_map.mul_vec(cycle);
        raw.into_iter()
            .zip(&self.moduli)
            .map(|(v, m)| if m.is_zero() { v } else { ((v % m) + m) % m })
            .collect()
    }

    /// Matrix of the map on homology induced by a degree-wise matrix `f`
    /// from this complex's degree to `target`'s.
    pub fn induced(&self, f: &IntMatrix, target: &HomologyWithGenerators) -> IntMatrix {
        let m = &(&target.coord_map * f) * &self.generators;
        m.reduce_rows_mod(&target.moduli)
    }
}

/// Degree-preserving map of chain complexes given by one matrix per degree.
#[derive(Clone, Debug)]
pub struct ChainMap {
    lo: i64,
    maps: Vec<IntMatrix>,
}

impl ChainMap {
    /// Checks shapes and `d' f_n = f_{n-1} d` on `[lo, lo + maps.len())`.
    pub fn new(src: &ChainComplex, tgt: &ChainComplex, lo: i64, maps: Vec<IntMatrix>) -> Result<Self, AlgError> {
        for (i, f) in maps.iter().enumerate() {
            let n = lo + i as i64;
            if f.shape() != (tgt.rank_at(n), src.rank_at(n)) {
                return Err(AlgError::Shape(format!("chain map component in degree {n} has wrong shape")));
            }
            if i > 0 {
                let lhs = &tgt.boundary(n) * f;
                let rhs = &maps[i - 1] * &src.boundary(n);
                if lhs != rhs {
                    return Err(AlgError::IllDefinedMap(format!("chain map does not commute with d_{n}")));
                }
            }
        }
        Ok(ChainMap { lo, maps })
    }

    pub fn at(&self, n: i64) -> Option<&IntMatrix> {
        if n < self.lo {
            return None;
        }
        self.maps.get((n - self.lo) as usize)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z2_periodic(depth: usize) -> ChainComplex {
        // coinvariants of the 2-periodic resolution: d_odd = 0, d_even = 2
        let ranks = vec![1; depth + 1];
        let bs = (1..=depth).map(|n| IntMatrix::from_dense(&[vec![if n % 2 == 1 { 0 } else { 2 }]])).collect();
        ChainComplex::new(0, ranks, bs, CoeffRing::Integers).unwrap()
    }

    #[test]
    fn zero_boundary() {
        let c = ChainComplex::new(0, vec![1, 1], vec![IntMatrix::zeros(1, 1)], CoeffRing::Integers).unwrap();
        assert_eq!(c.homology_at(0).unwrap(), FgAbGroup::free(1, CoeffRing::Integers));
        assert_eq!(c.homology_at(1).unwrap(), FgAbGroup::free(1, CoeffRing::Integers));
        assert!(c.homology_at(2).is_err());
    }

    #[test]
    fn cyclic_of_order_two() {
        let h = z2_periodic(4).homology();
        let s: Vec<String> = h.values().map(|g| g.to_string()).collect();
        assert_eq!(s, vec!["Z", "Z/2", "0", "Z/2", "0"]);
    }

    #[test]
    fn rejects_nonzero_composite() {
        let d1 = IntMatrix::from_dense(&[vec![1]]);
        let d2 = IntMatrix::from_dense(&[vec![1]]);
        let err = ChainComplex::new(0, vec![1, 1, 1], vec![d1, d2], CoeffRing::Integers).unwrap_err();
        assert_eq!(err, AlgError::NotAComplex { degree: 1 });
    }

    #[test]
    fn generators_round_trip() {
        let c = z2_periodic(3);
        let h1 = c.homology_with_generators(1).unwrap();
        assert_eq!(h1.moduli, vec![BigInt::from(2)]);
        assert_eq!(h1.coords(&[BigInt::from(3)]), vec![BigInt::one()]);
        let id = IntMatrix::identity(1);
        assert_eq!(h1.induced(&id, &h1), IntMatrix::identity(1));
    }

    #[test]
    fn cochain_degrees_are_negated() {
        let c = ChainComplex::from_cochain(0, vec![2, 1], vec![IntMatrix::from_dense(&[vec![1, -1]])], CoeffRing::Rationals)
            .unwrap();
        assert_eq!((c.lo(), c.hi()), (-1, 0));
        assert_eq!(c.homology_at(0).unwrap().rank(), 1);
        assert!(c.homology_at(-1).unwrap().is_zero());
    }
}
