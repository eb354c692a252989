use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{
    invariant_factors, json_int, prime_factors, smith_normal_form, AlgError, CoeffRing, CoeffRingKey, DirectSum,
    FgAbGroup, IntMatrix, Summand,
};

/// `⊕ Z/moduli[i]` on explicit generators; modulus 0 marks a free generator.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PresentedGroup {
    #[serde(with = "json_int::vec")]
    pub moduli: Vec<BigInt>,
}

impl PresentedGroup {
    pub fn new(moduli: Vec<BigInt>) -> Self {
        PresentedGroup { moduli }
    }

    pub fn group(&self) -> FgAbGroup {
        FgAbGroup::from_cyclic_orders(0, &self.moduli, CoeffRing::Integers)
    }

    fn torsion_idx(&self) -> Vec<usize> {
        (0..self.moduli.len()).filter(|&i| !self.moduli[i].is_zero()).collect()
    }

    fn free_idx(&self) -> Vec<usize> {
        (0..self.moduli.len()).filter(|&i| self.moduli[i].is_zero()).collect()
    }
}

/// `T_0 -> T_1 -> ... -> T_L` with `connecting[k] : T_k -> T_{k+1}` acting on
/// generator coordinates (columns are images of source generators).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ColimitSequence {
    terms: Vec<PresentedGroup>,
    connecting: Vec<IntMatrix>,
}

impl ColimitSequence {
    pub fn new(terms: Vec<PresentedGroup>, connecting: Vec<IntMatrix>) -> Result<Self, AlgError> {
        if terms.is_empty() || connecting.len() + 1 != terms.len() {
            return Err(AlgError::Shape(format!(
                "{} terms need {} connecting maps, got {}",
                terms.len(),
                terms.len().saturating_sub(1),
                connecting.len()
            )));
        }
        for t in &terms {
            if t.moduli.iter().any(|m| m < &BigInt::zero()) {
                return Err(AlgError::InvalidGroup("negative modulus".into()));
            }
        }
        for (k, m) in connecting.iter().enumerate() {
            let (src, tgt) = (&terms[k], &terms[k + 1]);
            if m.shape() != (tgt.moduli.len(), src.moduli.len()) {
                return Err(AlgError::Shape(format!("connecting map {k} has shape {:?}", m.shape())));
            }
            for j in src.torsion_idx() {
                let col = m.column(j);
                for (i, v) in col.iter().enumerate() {
                    let img = v * &src.moduli[j];
                    let ok = if tgt.moduli[i].is_zero() { img.is_zero() } else { (&img % &tgt.moduli[i]).is_zero() };
                    if !ok {
                        return Err(AlgError::IllDefinedMap(format!(
                            "connecting map {k} sends the relation of generator {j} outside the relations"
                        )));
                    }
                }
            }
        }
        Ok(ColimitSequence { terms, connecting })
    }

    pub fn terms(&self) -> &[PresentedGroup] {
        &self.terms
    }

    pub fn connecting(&self) -> &[IntMatrix] {
        &self.connecting
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum ColimitVerdict {
    /// The colimit, as an abelian group (integral; localize afterwards).
    Identified { group: DirectSum },
    /// No recognised pattern inside the window.
    Truncated { last: FgAbGroup, pattern: String },
}

impl ColimitVerdict {
    pub fn identified(&self) -> Option<&DirectSum> {
        match self {
            ColimitVerdict::Identified { group } => Some(group),
            ColimitVerdict::Truncated { .. } => None,
        }
    }

    pub fn tensor(&self, r: &CoeffRing) -> ColimitVerdict {
        match self {
            ColimitVerdict::Identified { group } => ColimitVerdict::Identified { group: group.tensor(r) },
            ColimitVerdict::Truncated { last, pattern } => {
                ColimitVerdict::Truncated { last: super::tensor_coeffs(last, r), pattern: pattern.clone() }
            }
        }
    }
}

impl fmt::Display for ColimitVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ColimitVerdict::Identified { group } => write!(f, "{group}"),
            ColimitVerdict::Truncated { last, pattern } => write!(f, "truncated (last term {last}; {pattern})"),
        }
    }
}

/// Invariant factors of `span(big) / span(small)` for `span(small) ⊆ span(big)`,
/// with zeros for directions of `big` not reached by `small`.
fn relative_invariants(big: &IntMatrix, small: &IntMatrix) -> Vec<BigInt> {
    let s = smith_normal_form(big);
    let r = s.rank();
    let rows: Vec<usize> = (0..r).collect();
    let us = (&s.u * small).select_rows(&rows);
    let mut x = IntMatrix::zeros(r, small.cols());
    for (i, c, v) in us.iter() {
        debug_assert!((v % &s.invariants[i]).is_zero(), "small lattice not contained in big");
        x.set(i, c, v / &s.invariants[i]);
    }
    let mut inv = invariant_factors(&x);
    inv.resize(r, BigInt::zero());
    inv
}

/// Pattern-based identification of `colim T_k` from the last `window` maps.
///
/// Torsion: the images of `tors(T_j)` in `tors(T_L)` for `j` in the window
/// must have constant order; the colimit torsion is the last such image.
/// Free part: the lattices `J_j` spanned by the images of `T_j / tors` in
/// `T_L / tors` must have constant rank `r`, and each step `J_j ⊆ J_{j+1}`
/// (the last one against the saturation of `J_{L-1}`) must be either an
/// equality for every step or `(Z/a_j)^r` for every step, giving `Z^r` or
/// `Z[1/primes(a)]^r`.
pub fn colimit_identify(s: &ColimitSequence, window: usize) -> Result<ColimitVerdict, AlgError> {
    if window == 0 {
        return Err(AlgError::Shape("stabilization window must be positive".into()));
    }
    if s.len() < window + 1 {
        return Err(AlgError::WindowTooLarge { window, terms: s.len() });
    }
    let last = s.len() - 1;
    let tl = &s.terms[last];
    let t_rows = tl.torsion_idx();
    let f_rows = tl.free_idx();
    let tl_tors_moduli: Vec<BigInt> = t_rows.iter().map(|&i| tl.moduli[i].clone()).collect();

    // composites into T_L for j = last - window .. last - 1
    let first = last - window;
    let mut composites: Vec<IntMatrix> = Vec::with_capacity(window);
    let mut phi = IntMatrix::identity(tl.moduli.len());
    for j in (first..last).rev() {
        phi = (&phi * &s.connecting[j]).reduce_rows_mod(&tl.moduli);
        composites.push(phi.clone());
    }
    composites.reverse();

    let c = IntMatrix::diagonal(t_rows.len(), t_rows.len(), &tl_tors_moduli);
    let mut tors_orders = Vec::new();
    let mut tors_last = Vec::new();
    let mut free_ranks = Vec::new();
    let mut free_lattices = Vec::new();
    for (off, phi) in composites.iter().enumerate() {
        let tj = &s.terms[first + off];
        let d = phi.select_rows(&t_rows).select_cols(&tj.torsion_idx());
        let e = relative_invariants(&c.hstack(&d), &c);
        let order: BigInt = e.iter().product();
        tors_orders.push(order);
        tors_last = e;
        let fl = phi.select_rows(&f_rows).select_cols(&tj.free_idx());
        free_ranks.push(super::rank(&fl));
        free_lattices.push(fl);
    }

    let mut pattern = format!("torsion image orders {tors_orders:?}; free image ranks {free_ranks:?}");
    let tors_stable = tors_orders.windows(2).all(|w| w[0] == w[1]);
    let r = free_ranks[0];
    let rank_stable = free_ranks.iter().all(|&x| x == r);

    let mut steps: Vec<Vec<BigInt>> = Vec::new();
    if rank_stable && r > 0 {
        for j in 0..free_lattices.len() {
            let q = if j + 1 < free_lattices.len() {
                relative_invariants(&free_lattices[j + 1], &free_lattices[j])
            } else {
                invariant_factors(&free_lattices[j])
            };
            steps.push(q);
        }
        let shown: Vec<String> =
            steps.iter().map(|q| q.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("x")).collect();
        pattern.push_str(&format!("; free step quotients [{}]", shown.join(", ")));
    }

    let truncated = |pattern: String| ColimitVerdict::Truncated { last: tl.group(), pattern };
    if !tors_stable || !rank_stable {
        return Ok(truncated(pattern));
    }

    let mut summands: Vec<Summand> = tors_last.into_iter().map(Summand::Cyclic).collect();
    if r > 0 {
        let all_trivial = steps.iter().all(|q| q.iter().all(|x| x.is_one()));
        let scalar: Option<Vec<BigInt>> = steps
            .iter()
            .map(|q| {
                let a = q[0].clone();
                (a > BigInt::one() && q.iter().all(|x| *x == a)).then_some(a)
            })
            .collect();
        let key = if all_trivial {
            CoeffRingKey::Integers
        } else if let Some(mults) = scalar {
            let mut ps: Vec<u64> = mults.iter().flat_map(prime_factors).collect();
            ps.sort_unstable();
            ps.dedup();
            CoeffRingKey::Inverted(ps)
        } else {
            return Ok(truncated(pattern));
        };
        summands.extend((0..r).map(|_| Summand::Free(key.clone())));
    }
    Ok(ColimitVerdict::Identified { group: DirectSum::new(summands) })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z() -> PresentedGroup {
        PresentedGroup::new(vec![BigInt::zero()])
    }

    fn scalar(a: i64) -> IntMatrix {
        IntMatrix::from_dense(&[vec![a]])
    }

    #[test]
    fn stationary() {
        let s = ColimitSequence::new(vec![z(); 4], vec![scalar(1); 3]).unwrap();
        let v = colimit_identify(&s, 2).unwrap();
        assert_eq!(v.identified().unwrap().to_string(), "Z");
    }

    #[test]
    fn doubling() {
        let s = ColimitSequence::new(vec![z(); 5], vec![scalar(2); 4]).unwrap();
        assert_eq!(colimit_identify(&s, 3).unwrap().identified().unwrap().to_string(), "Z[1/2]");
        assert!(colimit_identify(&s, 5).is_err());
    }

    #[test]
    fn torsion_persistence() {
        // (Z/2)^2 -> (Z/2)^2 by a rank-one map: only Z/2 persists
        let t = PresentedGroup::new(vec![BigInt::from(2), BigInt::from(2)]);
        let m = IntMatrix::from_dense(&[vec![1, 1], vec![0, 0]]);
        let s = ColimitSequence::new(vec![t.clone(); 4], vec![m; 3]).unwrap();
        assert_eq!(colimit_identify(&s, 2).unwrap().identified().unwrap().to_string(), "Z/2");
    }

    #[test]
    fn ill_defined_rejected() {
        let t = PresentedGroup::new(vec![BigInt::from(2)]);
        let u = PresentedGroup::new(vec![BigInt::from(3)]);
        assert!(ColimitSequence::new(vec![t, u], vec![scalar(1)]).is_err());
    }

    #[test]
    fn irregular_pattern_is_truncated() {
        let s = ColimitSequence::new(vec![z(); 4], vec![scalar(1), scalar(2), scalar(1)]).unwrap();
        assert!(matches!(colimit_identify(&s, 3).unwrap(), ColimitVerdict::Truncated { .. }));
    }
}
