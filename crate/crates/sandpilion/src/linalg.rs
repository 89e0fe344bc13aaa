//! Dense arbitrary-precision integer matrices.
//!
//! Provides exactly the operations the rest of the crate needs: fraction-free
//! determinants, Smith normal form (invariant factors only, no transform
//! witnesses), lattice membership via a column-style Hermite reduction, and
//! single-entry minors. No floating point is used anywhere.

use std::fmt;
use std::ops::Index;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{Error, Result};

/// Dense row-major matrix of arbitrary-precision integers.
#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    /// All-zero matrix of the given shape.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    /// Identity matrix of size `n`.
    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    /// Builds a matrix by evaluating `f` at every (row, column) position.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> BigInt) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        IntMatrix { rows, cols, data }
    }

    /// Builds a matrix from rows of machine integers; all rows must have equal
    /// length.
    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Ok(IntMatrix {
            rows: nrows,
            cols: ncols,
            data: rows.iter().flatten().map(|&v| BigInt::from(v)).collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> &BigInt {
        assert!(row < self.rows && col < self.cols, "index out of range");
        &self.data[row * self.cols + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: BigInt) {
        assert!(row < self.rows && col < self.cols, "index out of range");
        self.data[row * self.cols + col] = value;
    }

    /// Concatenates `right` onto this matrix column-wise.
    pub fn hstack(&self, right: &IntMatrix) -> Result<IntMatrix> {
        if self.rows != right.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot stack {} rows against {}",
                self.rows, right.rows
            )));
        }
        Ok(IntMatrix::from_fn(self.rows, self.cols + right.cols, |r, c| {
            if c < self.cols {
                self.get(r, c).clone()
            } else {
                right.get(r, c - self.cols).clone()
            }
        }))
    }

    /// Exact determinant via fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> Result<BigInt> {
        if self.rows != self.cols {
            return Err(Error::NonSquareMatrix {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        if n == 0 {
            return Ok(BigInt::one());
        }
        let mut m: Vec<Vec<BigInt>> = (0..n)
            .map(|r| self.data[r * n..(r + 1) * n].to_vec())
            .collect();
        let mut negate = false;
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if m[k][k].is_zero() {
                match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                    Some(r) => {
                        m.swap(k, r);
                        negate = !negate;
                    }
                    None => return Ok(BigInt::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                    m[i][j] = num / &prev;
                }
                m[i][k] = BigInt::zero();
            }
            prev = m[k][k].clone();
        }
        let det = std::mem::take(&mut m[n - 1][n - 1]);
        Ok(if negate { -det } else { det })
    }

    /// Determinant of the submatrix obtained by deleting one row and one
    /// column.
    pub fn minor_delete(&self, row: usize, col: usize) -> Result<BigInt> {
        if self.rows != self.cols {
            return Err(Error::NonSquareMatrix {
                rows: self.rows,
                cols: self.cols,
            });
        }
        if row >= self.rows || col >= self.cols {
            return Err(Error::IndexOutOfRange(format!(
                "minor at ({row}, {col}) of a {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let sub = IntMatrix::from_fn(self.rows - 1, self.cols - 1, |r, c| {
            let rr = if r < row { r } else { r + 1 };
            let cc = if c < col { c } else { c + 1 };
            self.get(rr, cc).clone()
        });
        sub.determinant()
    }

    /// Smith normal form: nonnegative invariant factors forming a divisibility
    /// chain, together with the rank. Unimodular transform witnesses are not
    /// retained.
    pub fn smith_normal_form(&self) -> SnfResult {
        let (rmax, cmax) = (self.rows, self.cols);
        let mut m: Vec<Vec<BigInt>> = (0..rmax)
            .map(|r| self.data[r * cmax..(r + 1) * cmax].to_vec())
            .collect();
        let mut diag = Vec::new();
        let mut k = 0;
        while k < rmax.min(cmax) {
            let Some((pi, pj)) = smallest_nonzero(&m, k) else {
                break;
            };
            let mut pivot_pos = (pi, pj);
            loop {
                let (pi, pj) = pivot_pos;
                m.swap(k, pi);
                for row in m.iter_mut() {
                    row.swap(k, pj);
                }
                let mut clean = true;
                for i in 0..rmax {
                    if i == k || m[i][k].is_zero() {
                        continue;
                    }
                    let q = &m[i][k] / &m[k][k];
                    if !q.is_zero() {
                        for j in 0..cmax {
                            let sub = &q * &m[k][j];
                            m[i][j] -= sub;
                        }
                    }
                    if !m[i][k].is_zero() {
                        clean = false;
                    }
                }
                for j in 0..cmax {
                    if j == k || m[k][j].is_zero() {
                        continue;
                    }
                    let q = &m[k][j] / &m[k][k];
                    if !q.is_zero() {
                        for row in m.iter_mut() {
                            let sub = &q * &row[k];
                            row[j] -= sub;
                        }
                    }
                    if !m[k][j].is_zero() {
                        clean = false;
                    }
                }
                if clean {
                    let offender = (k + 1..rmax).find(|&i| {
                        (k + 1..cmax).any(|j| !(&m[i][j] % &m[k][k]).is_zero())
                    });
                    match offender {
                        None => break,
                        Some(i) => {
                            let (head, tail) = m.split_at_mut(i);
                            let dst = &mut head[k];
                            for (d, s) in dst.iter_mut().zip(tail[0].iter()) {
                                *d += s;
                            }
                        }
                    }
                }
                pivot_pos = smallest_nonzero(&m, k).expect("pivot cannot vanish");
            }
            diag.push(m[k][k].abs());
            k += 1;
        }
        let rank = diag.len();
        SnfResult { diag, rank }
    }
}

fn smallest_nonzero(m: &[Vec<BigInt>], k: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for (i, row) in m.iter().enumerate().skip(k) {
        for (j, v) in row.iter().enumerate().skip(k) {
            if v.is_zero() {
                continue;
            }
            match best {
                Some((bi, bj)) if m[bi][bj].abs() <= v.abs() => {}
                _ => best = Some((i, j)),
            }
        }
    }
    best
}

impl Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;

    fn index(&self, (row, col): (usize, usize)) -> &BigInt {
        self.get(row, col)
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| self.get(r, c).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    rows: usize,
    cols: usize,
    entries: Vec<String>,
}

impl Serialize for IntMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixRepr {
            rows: self.rows,
            cols: self.cols,
            entries: self.data.iter().map(BigInt::to_string).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for IntMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = MatrixRepr::deserialize(deserializer)?;
        if repr.entries.len() != repr.rows * repr.cols {
            return Err(D::Error::custom(format!(
                "expected {} entries, got {}",
                repr.rows * repr.cols,
                repr.entries.len()
            )));
        }
        let data = repr
            .entries
            .iter()
            .map(|s| s.parse::<BigInt>().map_err(D::Error::custom))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(IntMatrix {
            rows: repr.rows,
            cols: repr.cols,
            data,
        })
    }
}

/// Invariant factors of an integer matrix under unimodular equivalence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SnfResult {
    /// Nonnegative invariant factors λ_1 | λ_2 | … | λ_r (units included,
    /// zeros excluded).
    pub diag: Vec<BigInt>,
    /// Rank of the matrix (= number of nonzero invariant factors).
    pub rank: usize,
}

impl SnfResult {
    /// The invariant factors greater than 1; a divisibility-chain suffix of
    /// `diag`.
    pub fn nontrivial(&self) -> &[BigInt] {
        let start = self.diag.iter().position(|d| !d.is_one()).unwrap_or(self.diag.len());
        &self.diag[start..]
    }
}

/// Tests whether `v` lies in the integer column span of `m`, by reducing a
/// column-style Hermite echelon basis against `v`.
pub fn in_image(m: &IntMatrix, v: &[BigInt]) -> Result<bool> {
    if v.len() != m.rows() {
        return Err(Error::DimensionMismatch(format!(
            "vector of length {} against {} rows",
            v.len(),
            m.rows()
        )));
    }
    let mut work: Vec<Vec<BigInt>> = (0..m.cols())
        .map(|c| (0..m.rows()).map(|r| m.get(r, c).clone()).collect())
        .collect();
    let mut echelon: Vec<(usize, Vec<BigInt>)> = Vec::new();
    for r in 0..m.rows() {
        loop {
            let nz: Vec<usize> = (0..work.len()).filter(|&c| !work[c][r].is_zero()).collect();
            match nz.len() {
                0 => break,
                1 => {
                    echelon.push((r, work.swap_remove(nz[0])));
                    break;
                }
                _ => {
                    let &pmin = nz
                        .iter()
                        .min_by_key(|&&c| work[c][r].abs())
                        .expect("nonempty");
                    for &c in &nz {
                        if c == pmin {
                            continue;
                        }
                        let q = &work[c][r] / &work[pmin][r];
                        if q.is_zero() {
                            continue;
                        }
                        for i in 0..m.rows() {
                            let sub = &q * &work[pmin][i];
                            work[c][i] -= sub;
                        }
                    }
                }
            }
        }
    }
    let mut w = v.to_vec();
    for (r, col) in &echelon {
        if w[*r].is_zero() {
            continue;
        }
        let (q, rem) = w[*r].div_rem(&col[*r]);
        if !rem.is_zero() {
            return Ok(false);
        }
        for (wi, ci) in w.iter_mut().zip(col.iter()) {
            *wi -= &q * ci;
        }
    }
    Ok(w.iter().all(Zero::is_zero))
}
