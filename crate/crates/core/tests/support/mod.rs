//! Property checks shared by the `properties` and `acceptance` targets,
//! with the oracles they compare against.

use std::collections::BTreeMap;

use hk_core::equivmod::{coinvariants, module_coinvariants, Block, FiniteRankModule, InducedModule};
use hk_core::exactalg::{smith_normal_form, ChainComplex, IntMatrix};
use hk_core::groups::{
    closure, group_homology, torsion_conjugacy_classes, Element, GModule, Group, GroupDesc, Subgroup, TrivialModule,
};
use hk_core::gsets::{blowup, FiniteGSet};
use hk_core::{CoeffRing, Exec, FgAbGroup};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use proptest::test_runner::{TestCaseError, TestRunner};

fn big_dense(m: &IntMatrix) -> Vec<Vec<BigInt>> {
    m.to_dense()
}

/// Fraction-free elimination.
fn det(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Invariant factors as quotients of consecutive gcds of `k × k` minors.
fn invariants_by_minors(m: &[Vec<BigInt>], rows: usize, cols: usize) -> Vec<BigInt> {
    let mut out = Vec::new();
    let mut prev = BigInt::one();
    for k in 1..=rows.min(cols) {
        let mut g = BigInt::zero();
        for rs in subsets(rows, k) {
            for cs in subsets(cols, k) {
                let minor: Vec<Vec<BigInt>> = rs.iter().map(|&r| cs.iter().map(|&c| m[r][c].clone()).collect()).collect();
                g = g.gcd(&det(minor));
            }
        }
        if g.is_zero() {
            break;
        }
        out.push(&g / &prev);
        prev = g;
    }
    out
}

fn sparse_matrix() -> impl Strategy<Value = IntMatrix> {
    (1..=15usize, 1..=15usize).prop_flat_map(|(r, c)| {
        proptest::collection::vec(prop_oneof![3 => Just(0i64), 1 => -20i64..=20], r * c).prop_map(move |v| {
            let rows: Vec<Vec<i64>> = v.chunks(c).map(|x| x.to_vec()).collect();
            IntMatrix::from_dense(&rows)
        })
    })
}

/// A random unimodular matrix and its inverse from elementary operations.
fn unimodular(n: usize, ops: &[(usize, usize, i64)]) -> (IntMatrix, IntMatrix) {
    let mut g = IntMatrix::identity(n);
    let mut g_inv = IntMatrix::identity(n);
    if n < 2 {
        return (g, g_inv);
    }
    for &(i, j, c) in ops {
        let (i, j) = (i % n, j % n);
        if i == j {
            continue;
        }
        let mut e = IntMatrix::identity(n);
        e.set(i, j, BigInt::from(c));
        let mut e_inv = IntMatrix::identity(n);
        e_inv.set(i, j, BigInt::from(-c));
        g = &e * &g;
        g_inv = &g_inv * &e_inv;
    }
    (g, g_inv)
}

fn ops() -> impl Strategy<Value = Vec<(usize, usize, i64)>> {
    proptest::collection::vec((0..12usize, 0..12usize, -2i64..=2), 0..8)
}

/// Pairs between consecutive degrees with their coefficient, free counts
/// per degree, and base changes.
#[derive(Debug, Clone)]
struct Plan {
    pairs: Vec<Vec<u32>>,
    free: Vec<usize>,
    changes: Vec<Vec<(usize, usize, i64)>>,
}

fn plan() -> impl Strategy<Value = Plan> {
    (2..=4usize)
        .prop_flat_map(|nd| {
            (
                proptest::collection::vec(proptest::collection::vec(1u32..=6, 0..=2), nd - 1),
                proptest::collection::vec(0..=2usize, nd),
                proptest::collection::vec(ops(), nd),
            )
        })
        .prop_map(|(pairs, free, changes)| Plan { pairs, free, changes })
        .prop_filter("total rank at most 12", |p| {
            p.free.iter().sum::<usize>() + 2 * p.pairs.iter().map(Vec::len).sum::<usize>() <= 12
        })
}

/// Builds the complex and its homology by construction:
/// `C_n = targets(p_n) ⊕ free(f_n) ⊕ sources(p_{n-1})`.
fn build(p: &Plan) -> (ChainComplex, BTreeMap<i64, FgAbGroup>) {
    let nd = p.free.len();
    let pcount = |n: usize| if n < nd - 1 { p.pairs[n].len() } else { 0 };
    let below = |n: usize| if n > 0 { p.pairs[n - 1].len() } else { 0 };
    let ranks: Vec<usize> = (0..nd).map(|n| pcount(n) + p.free[n] + below(n)).collect();
    let bases: Vec<(IntMatrix, IntMatrix)> = (0..nd).map(|n| unimodular(ranks[n], &p.changes[n])).collect();
    let mut ds = Vec::new();
    for n in 0..nd - 1 {
        let mut d = IntMatrix::zeros(ranks[n], ranks[n + 1]);
        let off = pcount(n + 1) + p.free[n + 1];
        for (i, &t) in p.pairs[n].iter().enumerate() {
            d.set(i, off + i, BigInt::from(t));
        }
        ds.push(&(&bases[n].0 * &d) * &bases[n + 1].1);
    }
    let expected = (0..nd)
        .map(|n| {
            let tors: Vec<BigInt> = if n < nd - 1 { p.pairs[n].iter().map(|&t| BigInt::from(t)).collect() } else { vec![] };
            (n as i64, FgAbGroup::from_cyclic_orders(p.free[n], &tors, CoeffRing::Integers))
        })
        .collect();
    (ChainComplex::new(0, ranks, ds, CoeffRing::Integers).unwrap(), expected)
}

fn minors_homology(c: &ChainComplex, n: i64) -> FgAbGroup {
    let rank_of = |m: &IntMatrix| invariants_by_minors(&big_dense(m), m.rows(), m.cols());
    let out = c.boundary(n);
    let inn = c.boundary(n + 1);
    let rho = rank_of(&out).len();
    let inv = rank_of(&inn);
    let free = c.rank_at(n) - rho - inv.len();
    FgAbGroup::from_cyclic_orders(free, &inv, CoeffRing::Integers)
}

fn perm_group() -> impl Strategy<Value = Group> {
    (1..=5usize).prop_flat_map(|d| {
        proptest::collection::vec(Just((0..d as u32).collect::<Vec<u32>>()).prop_shuffle(), 1..=3)
            .prop_map(move |gens| Group::permutation(d, gens).unwrap())
    })
}

/// Invariant factors of a finite abelian group from its `k`-torsion counts.
fn abelian_from_counts(order: u64, counts: &dyn Fn(u64) -> u64) -> Vec<u64> {
    fn chains(rest: u64, min: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if rest == 1 {
            out.push(cur.clone());
            return;
        }
        for d in 2..=rest {
            if rest.is_multiple_of(d) && d.is_multiple_of(min) {
                cur.push(d);
                chains(rest / d, d, cur, out);
                cur.pop();
            }
        }
    }
    let mut all = Vec::new();
    chains(order, 1, &mut Vec::new(), &mut all);
    let divisors: Vec<u64> = (1..=order).filter(|k| order.is_multiple_of(*k)).collect();
    let fits: Vec<Vec<u64>> = all
        .into_iter()
        .filter(|ch| divisors.iter().all(|&k| ch.iter().map(|&d| k.gcd(&d)).product::<u64>() == counts(k)))
        .collect();
    assert_eq!(fits.len(), 1, "counts determine the group");
    fits[0].clone()
}

fn abelianization(g: &Group) -> FgAbGroup {
    let es = g.elements().unwrap().to_vec();
    let comms: Vec<Element> = es
        .iter()
        .flat_map(|a| es.iter().map(move |b| (a, b)))
        .map(|(a, b)| g.mul(&g.mul(a, b), &g.mul(&g.inv(a), &g.inv(b))))
        .collect();
    let k = closure(g, &comms).unwrap();
    let coset_key = |x: &Element| k.iter().map(|h| g.mul(x, h)).min().unwrap();
    let mut reps: Vec<Element> = es.iter().map(coset_key).collect();
    reps.sort();
    reps.dedup();
    let order_mod_k = |x: &Element| {
        let mut y = x.clone();
        let mut n = 1u64;
        while !k.contains(&y) {
            y = g.mul(&y, x);
            n += 1;
        }
        n
    };
    let orders: Vec<u64> = reps.iter().map(order_mod_k).collect();
    let inv = abelian_from_counts(reps.len() as u64, &|kk| orders.iter().filter(|&&o| kk % o == 0).count() as u64);
    let inv: Vec<BigInt> = inv.into_iter().map(BigInt::from).collect();
    FgAbGroup::from_cyclic_orders(0, &inv, CoeffRing::Integers)
}

fn direct_sum(group: &Group, parts: &[FiniteRankModule]) -> FiniteRankModule {
    let rank: usize = parts.iter().map(|p| p.rank()).sum();
    let gens = (0..group.generators().len())
        .map(|i| {
            let mut m = IntMatrix::zeros(rank, rank);
            let mut off = 0;
            for p in parts {
                m.set_block(off, off, &p.generator_matrices()[i]);
                off += p.rank();
            }
            m
        })
        .collect();
    FiniteRankModule::new(group.clone(), rank, gens).unwrap()
}

pub const CASES: u32 = 200;

fn run<S: Strategy>(
    strategy: S,
    cases: u32,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    let mut runner = TestRunner::new(ProptestConfig { cases, failure_persistence: None, ..ProptestConfig::default() });
    runner.run(&strategy, test).map_err(|e| e.to_string())
}

pub fn snf_is_a_valid_diagonalization(cases: u32) -> Result<(), String> {
    run(sparse_matrix(), cases, |m| {
        let s = smith_normal_form(&m);
        prop_assert_eq!(&(&s.u * &m) * &s.v, s.d.clone());
        prop_assert!((&s.u * &s.u_inv) == IntMatrix::identity(m.rows()));
        prop_assert!((&s.v * &s.v_inv) == IntMatrix::identity(m.cols()));
        prop_assert!(s.u.is_unimodular() && s.v.is_unimodular());
        for (i, d) in s.invariants.iter().enumerate() {
            prop_assert!(d.is_positive());
            prop_assert_eq!(s.d.get(i, i), d.clone());
            if i > 0 {
                prop_assert!((d % &s.invariants[i - 1]).is_zero());
            }
        }
        prop_assert_eq!(s.d.nnz(), s.invariants.len());
        if m.rows() * m.cols() <= 30 {
            prop_assert_eq!(invariants_by_minors(&big_dense(&m), m.rows(), m.cols()), s.invariants.clone());
        }
        Ok(())
    })
}

pub fn square_nonzero_is_rejected(cases: u32) -> Result<(), String> {
    let strategy = (
        (1..=5usize, 1..=5usize, 1..=5usize, 0..=5usize),
        proptest::collection::vec(-3i64..=3, 25),
        proptest::collection::vec(-3i64..=3, 25),
        ops(),
        any::<bool>(),
    );
    run(strategy, cases, |((r0, r1, r2, t), a, b, change, force_zero)| {
        let t = t.min(r1);
        let mut da: Vec<Vec<i64>> = (0..r0).map(|i| (0..r1).map(|j| a[i * 5 + j]).collect()).collect();
        let mut db: Vec<Vec<i64>> = (0..r1).map(|i| (0..r2).map(|j| b[i * 5 + j]).collect()).collect();
        if force_zero {
            // columns of A from t on and rows of B below t vanish
            for row in &mut da {
                row.iter_mut().skip(t).for_each(|x| *x = 0);
            }
            for row in db.iter_mut().take(t) {
                row.iter_mut().for_each(|x| *x = 0);
            }
        }
        let (s, s_inv) = unimodular(r1, &change);
        let ma = &IntMatrix::from_dense(&da) * &s_inv;
        let mb = &s * &IntMatrix::from_dense(&db);
        let product_zero = (0..r0).all(|i| (0..r2).all(|k| (0..r1).map(|j| da[i][j] * db[j][k]).sum::<i64>() == 0));
        let c = ChainComplex::new(0, vec![r0, r1, r2], vec![ma, mb], CoeffRing::Integers);
        prop_assert_eq!(c.is_ok(), product_zero);
        if force_zero {
            prop_assert!(c.is_ok());
        }
        Ok(())
    })
}

pub fn homology_matches_oracles(cases: u32) -> Result<(), String> {
    run(plan(), cases, |p| {
        let (c, expected) = build(&p);
        for (n, g) in &expected {
            let h = c.homology_at(*n).unwrap();
            prop_assert_eq!(&h, g);
            prop_assert_eq!(&minors_homology(&c, *n), g);
        }
        Ok(())
    })
}

pub fn coinvariants_two_routes(cases: u32) -> Result<(), String> {
    let strategy = (0..3usize, 1..=8u64, 0..100usize, (0..=2usize, 0..=2usize, 0..=2usize));
    run(strategy, cases, |(which, m, pick, (a, b, c))| {
        let g = match which {
            0 => Group::cyclic(m),
            1 => Group::symmetric(3),
            _ => Group::permutation(4, vec![vec![1, 2, 3, 0], vec![3, 2, 1, 0]]).unwrap(),
        };
        let es = g.elements().unwrap();
        let h = Subgroup::cyclic(&g, &es[pick % es.len()]);
        let habs = h.abstract_group().clone();
        let order = habs.order().unwrap();
        let sign_ok = habs.generators().len() == 1 && order.is_multiple_of(2);
        let c = if sign_ok { c } else { 0 };
        let mut parts = vec![FiniteRankModule::trivial(&habs, a)];
        let reg = FiniteRankModule::from_gset(&FiniteGSet::regular(&habs).unwrap());
        parts.extend((0..b).map(|_| reg.clone()));
        if c > 0 {
            let minus = IntMatrix::identity(c).scale(&BigInt::from(-1));
            parts.push(FiniteRankModule::new(habs.clone(), c, vec![minus]).unwrap());
        }
        let n = direct_sum(&habs, &parts);
        let z = CoeffRing::Integers;
        let induced = InducedModule::new(g.clone(), vec![Block::new(h, n.clone()).unwrap()], z.clone()).unwrap();
        let route_a = coinvariants(&induced).group();
        let (whole, _) = induced.to_finite_rank().unwrap();
        let route_b = FgAbGroup::from_cyclic_orders(0, &module_coinvariants(&whole, &z).0, z.clone());
        let route_c = group_homology(&n, 0, &z).unwrap()[&0].clone();
        let expected = FgAbGroup::from_cyclic_orders(a + b, &vec![BigInt::from(2); c], z);
        prop_assert_eq!(&route_a, &expected);
        prop_assert_eq!(&route_b, &expected);
        prop_assert_eq!(&route_c, &expected);
        Ok(())
    })
}

pub fn first_homology_is_abelianization(cases: u32) -> Result<(), String> {
    let strategy = (0..4usize, 1..=12u64, (2..=5u64, 2..=5u64), perm_group());
    run(strategy, cases, |(which, m, (a, b), perm)| {
        let z = CoeffRing::Integers;
        let int = |r: usize, t: &[u64]| {
            let t: Vec<BigInt> = t.iter().map(|&x| BigInt::from(x)).collect();
            FgAbGroup::from_cyclic_orders(r, &t, CoeffRing::Integers)
        };
        let (g, expected) = match which {
            0 => (Group::cyclic(m), int(0, &[m])),
            1 => (Group::amalgam(a, b).unwrap(), int(0, &[a, b])),
            2 if m % 2 == 0 => (Group::infinite_dihedral(), int(0, &[2, 2])),
            2 => (Group::integers(), int(1, &[])),
            _ => {
                prop_assume!(perm.order().unwrap() <= 24);
                let ab = abelianization(&perm);
                (perm, ab)
            }
        };
        let h = group_homology(&TrivialModule::new(&g), 1, &z).unwrap();
        prop_assert_eq!(&h[&1], &expected);
        Ok(())
    })
}

pub fn blowup_orbit_sums(cases: u32) -> Result<(), String> {
    run((perm_group(), 0..3usize), cases, |(g, kind)| {
        let d = match g.desc() {
            GroupDesc::FinitePermutation { degree, .. } => *degree,
            _ => unreachable!(),
        };
        let gens: Vec<Vec<u32>> = g
            .generators()
            .iter()
            .map(|e| match e {
                Element::Perm(p) => p.clone(),
                _ => unreachable!(),
            })
            .collect();
        let natural = FiniteGSet::new(g.clone(), (0..d as u64).collect(), gens).unwrap();
        let x = match kind {
            0 => natural,
            1 => natural.disjoint_union(&FiniteGSet::point(&g)).unwrap(),
            _ => {
                prop_assume!(g.order().unwrap() <= 60);
                FiniteGSet::regular(&g).unwrap()
            }
        };
        let b = blowup(&x, &torsion_conjugacy_classes(&g), Exec::Sequential).unwrap();
        let brute: usize = g
            .elements()
            .unwrap()
            .iter()
            .map(|e| {
                let p = x.perm_of(e);
                (0..x.len()).filter(|&i| p[i] as usize == i).count()
            })
            .sum();
        prop_assert_eq!(b.pair_count(&g), Some(brute));
        Ok(())
    })
}

#[allow(dead_code)]
pub type Suite = (&'static str, fn(u32) -> Result<(), String>);

#[allow(dead_code)]
pub const SUITES: &[Suite] = &[
    ("snf_is_a_valid_diagonalization", snf_is_a_valid_diagonalization),
    ("square_nonzero_is_rejected", square_nonzero_is_rejected),
    ("homology_matches_oracles", homology_matches_oracles),
    ("coinvariants_two_routes", coinvariants_two_routes),
    ("first_homology_is_abelianization", first_homology_is_abelianization),
    ("blowup_orbit_sums", blowup_orbit_sums),
];
