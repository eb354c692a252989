//! Smith normal form over the integers.
//!
//! Elimination runs first in checked `i64` arithmetic and restarts in
//! arbitrary precision as soon as any operation (including on the
//! transforms) would overflow, so results are always exact.

use num_bigint::BigInt;
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, One, Signed, Zero};

use super::IntMatrix;

/// `U * M * V = D` with `U`, `V` unimodular and `D` diagonal with
/// `d_1 | d_2 | ... | d_r`, all positive, followed by zeros.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
    pub u_inv: IntMatrix,
    pub v_inv: IntMatrix,
    /// The nonzero diagonal entries, in order.
    pub invariants: Vec<BigInt>,
}

impl SmithForm {
    pub fn rank(&self) -> usize {
        self.invariants.len()
    }
}

trait Scalar: Clone + Zero + One + Ord + Signed + CheckedAdd + CheckedSub + CheckedMul {
    fn to_big(&self) -> BigInt;
}

impl Scalar for i64 {
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl Scalar for BigInt {
    fn to_big(&self) -> BigInt {
        self.clone()
    }
}

struct Overflow;

type Dense<T> = Vec<Vec<T>>;

struct Work<T> {
    a: Dense<T>,
    u: Option<(Dense<T>, Dense<T>)>,
    v: Option<(Dense<T>, Dense<T>)>,
}

fn ident<T: Scalar>(n: usize) -> Dense<T> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { T::one() } else { T::zero() }).collect())
        .collect()
}

// row_dst -= q * row_src on columns [from..]
fn row_axpy<T: Scalar>(m: &mut Dense<T>, dst: usize, src: usize, q: &T, from: usize) -> Result<(), Overflow> {
    let (d, s) = if dst < src {
        let (lo, hi) = m.split_at_mut(src);
        (&mut lo[dst], &hi[0])
    } else {
        let (lo, hi) = m.split_at_mut(dst);
        (&mut hi[0], &lo[src])
    };
    for j in from..d.len() {
        if s[j].is_zero() {
            continue;
        }
        let p = s[j].checked_mul(q).ok_or(Overflow)?;
        d[j] = d[j].checked_sub(&p).ok_or(Overflow)?;
    }
    Ok(())
}

// col_dst -= q * col_src
fn col_axpy<T: Scalar>(m: &mut Dense<T>, dst: usize, src: usize, q: &T, from_row: usize) -> Result<(), Overflow> {
    for row in m.iter_mut().skip(from_row) {
        if row[src].is_zero() {
            continue;
        }
        let p = row[src].checked_mul(q).ok_or(Overflow)?;
        row[dst] = row[dst].checked_sub(&p).ok_or(Overflow)?;
    }
    Ok(())
}

fn swap_cols<T>(m: &mut Dense<T>, i: usize, j: usize) {
    if i != j {
        for row in m.iter_mut() {
            row.swap(i, j);
        }
    }
}

impl<T: Scalar> Work<T> {
    fn new(a: Dense<T>, rows: usize, cols: usize, transforms: bool) -> Self {
        let (u, v) = if transforms {
            (Some((ident(rows), ident(rows))), Some((ident(cols), ident(cols))))
        } else {
            (None, None)
        };
        Work { a, u, v }
    }

    fn rows(&self) -> usize {
        self.a.len()
    }

    fn cols(&self) -> usize {
        self.a.first().map_or(0, |r| r.len())
    }

    // row_i -= q row_t  (U <- R U, U^-1 <- U^-1 R^-1 i.e. col_t += q col_i)
    fn row_op(&mut self, i: usize, t: usize, q: &T, from: usize) -> Result<(), Overflow> {
        row_axpy(&mut self.a, i, t, q, from)?;
        if let Some((u, ui)) = &mut self.u {
            row_axpy(u, i, t, q, 0)?;
            let nq = -q.clone();
            col_axpy(ui, t, i, &nq, 0)?;
        }
        Ok(())
    }

    // col_j -= q col_t  (V <- V C, V^-1 <- C^-1 V^-1 i.e. row_t += q row_j)
    fn col_op(&mut self, j: usize, t: usize, q: &T, from_row: usize) -> Result<(), Overflow> {
        col_axpy(&mut self.a, j, t, q, from_row)?;
        if let Some((v, vi)) = &mut self.v {
            col_axpy(v, j, t, q, 0)?;
            let nq = -q.clone();
            row_axpy(vi, t, j, &nq, 0)?;
        }
        Ok(())
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        self.a.swap(i, j);
        if let Some((u, ui)) = &mut self.u {
            u.swap(i, j);
            swap_cols(ui, i, j);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        swap_cols(&mut self.a, i, j);
        if let Some((v, vi)) = &mut self.v {
            swap_cols(v, i, j);
            vi.swap(i, j);
        }
    }

    fn negate_row(&mut self, t: usize) {
        for x in self.a[t].iter_mut() {
            *x = -x.clone();
        }
        if let Some((u, ui)) = &mut self.u {
            for x in u[t].iter_mut() {
                *x = -x.clone();
            }
            for row in ui.iter_mut() {
                row[t] = -row[t].clone();
            }
        }
    }

    /// Minimal |a_ij| over the active block; ties go to the lowest row, then column.
    fn min_pivot(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(T, usize, usize)> = None;
        for i in t..self.rows() {
            for j in t..self.cols() {
                let x = &self.a[i][j];
                if x.is_zero() {
                    continue;
                }
                let ax = x.abs();
                if best.as_ref().is_none_or(|(b, _, _)| ax < *b) {
                    let one = ax.is_one();
                    best = Some((ax, i, j));
                    if one {
                        return best.map(|(_, i, j)| (i, j));
                    }
                }
            }
        }
        best.map(|(_, i, j)| (i, j))
    }

    fn run(&mut self) -> Result<usize, Overflow> {
        let (m, n) = (self.rows(), self.cols());
        let mut t = 0;
        while t < m.min(n) {
            let Some((pi, pj)) = self.min_pivot(t) else { break };
            self.swap_rows(t, pi);
            self.swap_cols(t, pj);
            loop {
                let mut leftover = false;
                for i in t + 1..m {
                    if self.a[i][t].is_zero() {
                        continue;
                    }
                    let q = self.a[i][t].clone() / self.a[t][t].clone();
                    if !q.is_zero() {
                        self.row_op(i, t, &q, t)?;
                    }
                    leftover |= !self.a[i][t].is_zero();
                }
                for j in t + 1..n {
                    if self.a[t][j].is_zero() {
                        continue;
                    }
                    let q = self.a[t][j].clone() / self.a[t][t].clone();
                    if !q.is_zero() {
                        self.col_op(j, t, &q, t)?;
                    }
                    leftover |= !self.a[t][j].is_zero();
                }
                if leftover {
                    // a remainder smaller than the pivot survived in row or column t
                    let mut best = (self.a[t][t].abs(), t, t);
                    for i in t + 1..m {
                        let x = self.a[i][t].abs();
                        if !x.is_zero() && x < best.0 {
                            best = (x, i, t);
                        }
                    }
                    for j in t + 1..n {
                        let x = self.a[t][j].abs();
                        if !x.is_zero() && x < best.0 {
                            best = (x, t, j);
                        }
                    }
                    self.swap_rows(t, best.1);
                    self.swap_cols(t, best.2);
                    continue;
                }
                let p = self.a[t][t].clone();
                let bad = (t + 1..m).find(|&i| (t + 1..n).any(|j| !(self.a[i][j].clone() % p.clone()).is_zero()));
                match bad {
                    Some(i) => {
                        let minus_one = -T::one();
                        self.row_op(t, i, &minus_one, t)?;
                    }
                    None => break,
                }
            }
            if self.a[t][t].is_negative() {
                self.negate_row(t);
            }
            t += 1;
        }
        Ok(t)
    }
}

fn dense_i64(m: &IntMatrix) -> Option<Dense<i64>> {
    use num_traits::ToPrimitive;
    let mut d = vec![vec![0i64; m.cols()]; m.rows()];
    for (r, c, v) in m.iter() {
        d[r][c] = v.to_i64()?;
    }
    Some(d)
}

fn to_int_matrix<T: Scalar>(d: &Dense<T>, rows: usize, cols: usize) -> IntMatrix {
    let big: Vec<Vec<BigInt>> = d.iter().map(|r| r.iter().map(Scalar::to_big).collect()).collect();
    IntMatrix::from_dense_big(rows, cols, &big)
}

fn finish<T: Scalar>(w: Work<T>, rank: usize, rows: usize, cols: usize) -> (Vec<BigInt>, Option<SmithForm>) {
    let invariants: Vec<BigInt> = (0..rank).map(|i| w.a[i][i].to_big()).collect();
    let form = match (w.u, w.v) {
        (Some((u, ui)), Some((v, vi))) => Some(SmithForm {
            u: to_int_matrix(&u, rows, rows),
            u_inv: to_int_matrix(&ui, rows, rows),
            v: to_int_matrix(&v, cols, cols),
            v_inv: to_int_matrix(&vi, cols, cols),
            d: IntMatrix::diagonal(rows, cols, &invariants),
            invariants: invariants.clone(),
        }),
        _ => None,
    };
    (invariants, form)
}

fn compute(m: &IntMatrix, transforms: bool) -> (Vec<BigInt>, Option<SmithForm>) {
    let (rows, cols) = m.shape();
    if let Some(d) = dense_i64(m) {
        let mut w = Work::new(d, rows, cols, transforms);
        if let Ok(rank) = w.run() {
            return finish(w, rank, rows, cols);
        }
    }
    let mut w = Work::new(m.to_dense(), rows, cols, transforms);
    let rank = match w.run() {
        Ok(r) => r,
        Err(Overflow) => unreachable!("arbitrary precision arithmetic cannot overflow"),
    };
    finish(w, rank, rows, cols)
}

/// Full Smith normal form with both transforms and their inverses.
pub fn smith_normal_form(m: &IntMatrix) -> SmithForm {
    compute(m, true).1.expect("transforms requested")
}

/// The nonzero invariant factors only; skips transform bookkeeping.
pub fn invariant_factors(m: &IntMatrix) -> Vec<BigInt> {
    compute(m, false).0
}

pub fn rank(m: &IntMatrix) -> usize {
    invariant_factors(m).len()
}
