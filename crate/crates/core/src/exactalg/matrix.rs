use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::AlgError;

/// Sparse integer matrix. Zero entries are never stored.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: BTreeMap<(usize, usize), BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, entries: BTreeMap::new() }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries.insert((i, i), BigInt::one());
        }
        m
    }

    /// Rejects out-of-range and duplicate keys; zero values are dropped.
    pub fn from_entries<I>(rows: usize, cols: usize, entries: I) -> Result<Self, AlgError>
    where
        I: IntoIterator<Item = (usize, usize, BigInt)>,
    {
        let mut m = Self::zeros(rows, cols);
        for (r, c, v) in entries {
            if r >= rows || c >= cols {
                return Err(AlgError::Shape(format!("entry ({r},{c}) outside {rows}x{cols}")));
            }
            if m.entries.contains_key(&(r, c)) {
                return Err(AlgError::Shape(format!("duplicate entry ({r},{c})")));
            }
            if !v.is_zero() {
                m.entries.insert((r, c), v);
            }
        }
        Ok(m)
    }

    pub fn from_dense<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        let mut m = Self::zeros(nrows, ncols);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), ncols, "ragged dense matrix");
            for (j, v) in row.iter().enumerate() {
                m.set(i, j, v.clone().into());
            }
        }
        m
    }

    pub fn from_dense_big(rows: usize, cols: usize, data: &[Vec<BigInt>]) -> Self {
        let mut m = Self::zeros(rows, cols);
        for (i, row) in data.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                if !v.is_zero() {
                    m.entries.insert((i, j), v.clone());
                }
            }
        }
        m
    }

    pub fn diagonal<T: Into<BigInt> + Clone>(rows: usize, cols: usize, diag: &[T]) -> Self {
        let mut m = Self::zeros(rows, cols);
        for (i, d) in diag.iter().enumerate() {
            m.set(i, i, d.clone().into());
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, r: usize, c: usize) -> BigInt {
        self.entries.get(&(r, c)).cloned().unwrap_or_default()
    }

    pub fn set(&mut self, r: usize, c: usize, v: BigInt) {
        assert!(r < self.rows && c < self.cols, "index ({r},{c}) outside {}x{}", self.rows, self.cols);
        if v.is_zero() {
            self.entries.remove(&(r, c));
        } else {
            self.entries.insert((r, c), v);
        }
    }

    pub fn add_at(&mut self, r: usize, c: usize, v: &BigInt) {
        if v.is_zero() {
            return;
        }
        let cur = self.get(r, c);
        self.set(r, c, cur + v);
    }

    /// Nonzero entries in (row, col) order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &BigInt)> {
        self.entries.iter().map(|(&(r, c), v)| (r, c, v))
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for (&(r, c), v) in &self.entries {
            t.entries.insert((c, r), v.clone());
        }
        t
    }

    pub fn to_dense(&self) -> Vec<Vec<BigInt>> {
        let mut d = vec![vec![BigInt::zero(); self.cols]; self.rows];
        for (&(r, c), v) in &self.entries {
            d[r][c] = v.clone();
        }
        d
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.cols);
        let mut out = vec![BigInt::zero(); self.rows];
        for (&(r, c), a) in &self.entries {
            if !v[c].is_zero() {
                out[r] += a * &v[c];
            }
        }
        out
    }

    pub fn column(&self, c: usize) -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); self.rows];
        for (&(r, cc), v) in &self.entries {
            if cc == c {
                out[r] = v.clone();
            }
        }
        out
    }

    pub fn checked_mul(&self, rhs: &IntMatrix) -> Result<IntMatrix, AlgError> {
        if self.cols != rhs.rows {
            return Err(AlgError::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut by_row: Vec<Vec<(usize, &BigInt)>> = vec![Vec::new(); rhs.rows];
        for (&(r, c), v) in &rhs.entries {
            by_row[r].push((c, v));
        }
        let mut acc: BTreeMap<(usize, usize), BigInt> = BTreeMap::new();
        for (&(r, k), a) in &self.entries {
            for &(c, b) in &by_row[k] {
                *acc.entry((r, c)).or_default() += a * b;
            }
        }
        acc.retain(|_, v| !v.is_zero());
        Ok(IntMatrix { rows: self.rows, cols: rhs.cols, entries: acc })
    }

    pub fn scale(&self, k: &BigInt) -> IntMatrix {
        if k.is_zero() {
            return Self::zeros(self.rows, self.cols);
        }
        let entries = self.entries.iter().map(|(&p, v)| (p, v * k)).collect();
        IntMatrix { rows: self.rows, cols: self.cols, entries }
    }

    /// Copies `block` into `self` with its top-left corner at (r0, c0).
    pub fn set_block(&mut self, r0: usize, c0: usize, block: &IntMatrix) {
        assert!(r0 + block.rows <= self.rows && c0 + block.cols <= self.cols);
        for (&(r, c), v) in &block.entries {
            self.set(r0 + r, c0 + c, v.clone());
        }
    }

    pub fn add_block(&mut self, r0: usize, c0: usize, block: &IntMatrix) {
        assert!(r0 + block.rows <= self.rows && c0 + block.cols <= self.cols);
        for (&(r, c), v) in &block.entries {
            self.add_at(r0 + r, c0 + c, v);
        }
    }

    pub fn hstack(&self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!(self.rows, rhs.rows);
        let mut m = Self::zeros(self.rows, self.cols + rhs.cols);
        m.set_block(0, 0, self);
        m.set_block(0, self.cols, rhs);
        m
    }

    pub fn vstack(&self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, rhs.cols);
        let mut m = Self::zeros(self.rows + rhs.rows, self.cols);
        m.set_block(0, 0, self);
        m.set_block(self.rows, 0, rhs);
        m
    }

    pub fn select_rows(&self, rows: &[usize]) -> IntMatrix {
        let mut m = Self::zeros(rows.len(), self.cols);
        for (i, &r) in rows.iter().enumerate() {
            for (&(_, c), v) in self.entries.range((r, 0)..(r + 1, 0)) {
                m.entries.insert((i, c), v.clone());
            }
        }
        m
    }

    pub fn select_cols(&self, cols: &[usize]) -> IntMatrix {
        self.transpose().select_rows(cols).transpose()
    }

    /// Reduces row `i` modulo `moduli[i]` (0 means no reduction) into `[0, m)`.
    pub fn reduce_rows_mod(&self, moduli: &[BigInt]) -> IntMatrix {
        assert_eq!(moduli.len(), self.rows);
        let mut m = Self::zeros(self.rows, self.cols);
        for (&(r, c), v) in &self.entries {
            let md = &moduli[r];
            let val = if md.is_zero() { v.clone() } else { ((v % md) + md) % md };
            m.set(r, c, val);
        }
        m
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> Result<BigInt, AlgError> {
        if self.rows != self.cols {
            return Err(AlgError::Shape("determinant of a non-square matrix".into()));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(BigInt::one());
        }
        let mut a = self.to_dense();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = -sign;
                    }
                    None => return Ok(BigInt::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                    a[i][j] = v;
                }
            }
            prev = a[k][k].clone();
        }
        Ok(sign * a[n - 1][n - 1].clone())
    }

    pub fn is_unimodular(&self) -> bool {
        self.determinant().map(|d| d.abs().is_one()).unwrap_or(false)
    }

    pub fn max_abs_entry(&self) -> BigInt {
        self.entries.values().map(|v| v.abs()).max().unwrap_or_default()
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMatrix {}x{} [", self.rows, self.cols)?;
        if self.rows * self.cols <= 400 {
            for row in self.to_dense() {
                let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
                writeln!(f, "  [{}]", cells.join(", "))?;
            }
        } else {
            writeln!(f, "  {} nonzeros", self.entries.len())?;
        }
        write!(f, "]")
    }
}

impl Mul for &IntMatrix {
    type Output = IntMatrix;
    fn mul(self, rhs: &IntMatrix) -> IntMatrix {
        self.checked_mul(rhs).expect("matrix shape mismatch")
    }
}

impl Add for &IntMatrix {
    type Output = IntMatrix;
    fn add(self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!(self.shape(), rhs.shape(), "matrix shape mismatch");
        let mut m = self.clone();
        for (&(r, c), v) in &rhs.entries {
            m.add_at(r, c, v);
        }
        m
    }
}

impl Sub for &IntMatrix {
    type Output = IntMatrix;
    fn sub(self, rhs: &IntMatrix) -> IntMatrix {
        self + &(-rhs)
    }
}

impl Neg for &IntMatrix {
    type Output = IntMatrix;
    fn neg(self) -> IntMatrix {
        let entries = self.entries.iter().map(|(&p, v)| (p, -v)).collect();
        IntMatrix { rows: self.rows, cols: self.cols, entries }
    }
}

/// JSON integers that fall outside `i64` are written as decimal strings.
pub(crate) mod json_int {
    use num_bigint::BigInt;
    use num_traits::ToPrimitive;
    use serde::de::Error;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    pub(crate) enum Repr {
        Small(i64),
        Big(String),
    }

    pub(crate) fn to_repr(v: &BigInt) -> Repr {
        match v.to_i64() {
            Some(x) => Repr::Small(x),
            None => Repr::Big(v.to_string()),
        }
    }

    pub(crate) fn from_repr<E: Error>(r: Repr) -> Result<BigInt, E> {
        match r {
            Repr::Small(x) => Ok(BigInt::from(x)),
            Repr::Big(s) => s.parse().map_err(|_| E::custom(format!("invalid integer `{s}`"))),
        }
    }

    pub(crate) fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        to_repr(v).serialize(s)
    }

    pub(crate) fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        from_repr(Repr::deserialize(d)?)
    }

    pub(crate) mod vec {
        use super::*;

        pub(crate) fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
            v.iter().map(to_repr).collect::<Vec<_>>().serialize(s)
        }

        pub(crate) fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
            Vec::<Repr>::deserialize(d)?.into_iter().map(from_repr).collect()
        }
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    rows: usize,
    cols: usize,
    entries: Vec<(usize, usize, json_int::Repr)>,
}

impl Serialize for IntMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        MatrixRepr {
            rows: self.rows,
            cols: self.cols,
            entries: self.iter().map(|(r, c, v)| (r, c, json_int::to_repr(v))).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let repr = MatrixRepr::deserialize(d)?;
        let mut entries = Vec::with_capacity(repr.entries.len());
        for (r, c, v) in repr.entries {
            entries.push((r, c, json_int::from_repr::<D::Error>(v)?));
        }
        IntMatrix::from_entries(repr.rows, repr.cols, entries).map_err(D::Error::custom)
    }
}
