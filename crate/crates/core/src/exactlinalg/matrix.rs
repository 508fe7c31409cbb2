use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use super::rational::common_denominator;
use super::vector::{canonicalize, merge};
use super::{rat, ExactVector, LinalgError, Rational};
use crate::parallel::{self, Execution};

type SparseRow = Vec<(usize, Rational)>;

/// A rectangular matrix of rationals in canonical sparse form: each row holds
/// its nonzero entries sorted by column.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    data: Vec<SparseRow>,
}

// Row count below which matmul does not bother with the thread pool.
const PARALLEL_ROWS: usize = 64;

impl ExactMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Vec::new(); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::scalar(n, rat(1))
    }

    /// `value * I`.
    pub fn scalar(n: usize, value: Rational) -> Self {
        if value.is_zero() {
            return Self::zeros(n, n);
        }
        Self {
            rows: n,
            cols: n,
            data: (0..n).map(|i| vec![(i, value.clone())]).collect(),
        }
    }

    /// The all-ones matrix `J`.
    pub fn ones(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: (0..rows)
                .map(|_| (0..cols).map(|c| (c, rat(1))).collect())
                .collect(),
        }
    }

    pub fn diagonal(values: Vec<Rational>) -> Self {
        let n = values.len();
        Self {
            rows: n,
            cols: n,
            data: values
                .into_iter()
                .enumerate()
                .map(|(i, q)| if q.is_zero() { vec![] } else { vec![(i, q)] })
                .collect(),
        }
    }

    /// Builds from `(row, col, value)` triplets; repeated positions are summed.
    pub fn from_triplets(
        rows: usize,
        cols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, Rational)>,
    ) -> Result<Self, LinalgError> {
        let mut raw: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); rows];
        for (r, c, q) in triplets {
            if r >= rows || c >= cols {
                return Err(LinalgError::IndexOutOfRange {
                    row: r,
                    col: c,
                    rows,
                    cols,
                });
            }
            raw[r].push((c, q));
        }
        Ok(Self {
            rows,
            cols,
            data: raw.into_iter().map(canonicalize).collect(),
        })
    }

    pub fn from_dense(dense: Vec<Vec<Rational>>) -> Result<Self, LinalgError> {
        let rows = dense.len();
        let cols = dense.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows);
        for row in dense {
            if row.len() != cols {
                return Err(LinalgError::LengthMismatch {
                    expected: cols,
                    found: row.len(),
                });
            }
            data.push(
                row.into_iter()
                    .enumerate()
                    .filter(|(_, q)| !q.is_zero())
                    .collect(),
            );
        }
        Ok(Self { rows, cols, data })
    }

    /// Convenience for small literal matrices; panics on ragged input.
    pub fn from_ints(rows: &[&[i64]]) -> Self {
        Self::from_dense(
            rows.iter()
                .map(|r| r.iter().map(|&v| rat(v)).collect())
                .collect(),
        )
        .expect("ragged integer matrix")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Vec::is_empty)
    }

    /// Nonzero entries of row `r`, sorted by column.
    pub fn row(&self, r: usize) -> &[(usize, Rational)] {
        &self.data[r]
    }

    pub fn get(&self, r: usize, c: usize) -> Rational {
        let row = &self.data[r];
        match row.binary_search_by_key(&c, |(j, _)| *j) {
            Ok(pos) => row[pos].1.clone(),
            Err(_) => Rational::zero(),
        }
    }

    /// Nonzero entries as `(row, col, value)` in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, &Rational)> + '_ {
        self.data
            .iter()
            .enumerate()
            .flat_map(|(r, row)| row.iter().map(move |(c, q)| (r, c.to_owned(), q)))
    }

    pub fn to_dense(&self) -> Vec<Vec<Rational>> {
        let mut out = vec![vec![Rational::zero(); self.cols]; self.rows];
        for (r, c, q) in self.triplets() {
            out[r][c] = q.clone();
        }
        out
    }

    pub fn transpose(&self) -> ExactMatrix {
        let mut data: Vec<SparseRow> = vec![Vec::new(); self.cols];
        for (r, row) in self.data.iter().enumerate() {
            for (c, q) in row {
                data[*c].push((r, q.clone()));
            }
        }
        ExactMatrix {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && *self == self.transpose()
    }

    pub fn is_antisymmetric(&self) -> bool {
        self.is_square() && *self == -&self.transpose()
    }

    pub fn trace(&self) -> Rational {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    pub fn scale(&self, factor: &Rational) -> ExactMatrix {
        if factor.is_zero() {
            return Self::zeros(self.rows, self.cols);
        }
        ExactMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .map(|row| row.iter().map(|(c, q)| (*c, q * factor)).collect())
                .collect(),
        }
    }

    pub fn add(&self, other: &ExactMatrix) -> Result<ExactMatrix, LinalgError> {
        self.add_scaled(other, &rat(1))
    }

    pub fn sub(&self, other: &ExactMatrix) -> Result<ExactMatrix, LinalgError> {
        self.add_scaled(other, &rat(-1))
    }

    /// `self + factor * other`.
    pub fn add_scaled(
        &self,
        other: &ExactMatrix,
        factor: &Rational,
    ) -> Result<ExactMatrix, LinalgError> {
        if self.dims() != other.dims() {
            return Err(LinalgError::DimensionMismatch {
                op: "add",
                left: self.dims(),
                right: other.dims(),
            });
        }
        Ok(ExactMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| merge(a, b, factor))
                .collect(),
        })
    }

    pub fn matmul(&self, other: &ExactMatrix) -> Result<ExactMatrix, LinalgError> {
        let exec = if self.rows >= PARALLEL_ROWS {
            Execution::Parallel
        } else {
            Execution::Sequential
        };
        self.matmul_with(other, exec)
    }

    /// Product with an explicit evaluation strategy for the row loop.
    ///
    /// Both operands are first scaled to integer matrices by their common
    /// denominators; rows are accumulated in `i128` when the entry bounds
    /// guarantee no overflow and in `BigInt` otherwise.
    pub fn matmul_with(
        &self,
        other: &ExactMatrix,
        exec: Execution,
    ) -> Result<ExactMatrix, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch {
                op: "matmul",
                left: self.dims(),
                right: other.dims(),
            });
        }
        if self.is_monomial_rows() {
            return Ok(self.monomial_left_product(other));
        }
        if other.is_monomial_rows() {
            return Ok(self.monomial_right_product(other));
        }
        let a = IntegerForm::of(self);
        let b = IntegerForm::of(other);
        let denom = &a.denom * &b.denom;
        let cols = other.cols;
        let data = match (&a.rows, &b.rows) {
            (IntRows::Small(ar), IntRows::Small(br))
                if fits_i128(a.max_abs, b.max_abs, self.cols) =>
            {
                parallel::map_range(exec, self.rows, |r| {
                    small_row_product(&ar[r], br, cols, &denom)
                })
            }
            _ => {
                let ar = a.rows.to_big();
                let br = b.rows.to_big();
                parallel::map_range(exec, self.rows, |r| {
                    big_row_product(&ar[r], &br, cols, &denom)
                })
            }
        };
        Ok(ExactMatrix {
            rows: self.rows,
            cols,
            data,
        })
    }

    /// At most one nonzero entry per row: diagonal and signed permutation
    /// matrices among others.
    fn is_monomial_rows(&self) -> bool {
        self.data.iter().all(|row| row.len() <= 1)
    }

    fn monomial_left_product(&self, other: &ExactMatrix) -> ExactMatrix {
        let data = self
            .data
            .iter()
            .map(|row| match row.first() {
                None => Vec::new(),
                Some((k, m)) if m.is_one() => other.data[*k].clone(),
                Some((k, m)) => other.data[*k].iter().map(|(c, q)| (*c, q * m)).collect(),
            })
            .collect();
        ExactMatrix {
            rows: self.rows,
            cols: other.cols,
            data,
        }
    }

    fn monomial_right_product(&self, other: &ExactMatrix) -> ExactMatrix {
        let data = self
            .data
            .iter()
            .map(|row| {
                let raw = row
                    .iter()
                    .filter_map(|(k, q)| {
                        other.data[*k]
                            .first()
                            .map(|(c, m)| (*c, if m.is_one() { q.clone() } else { q * m }))
                    })
                    .collect();
                canonicalize(raw)
            })
            .collect();
        ExactMatrix {
            rows: self.rows,
            cols: other.cols,
            data,
        }
    }

    /// `self * other - other * self`.
    pub fn commutator(&self, other: &ExactMatrix) -> Result<ExactMatrix, LinalgError> {
        self.matmul(other)?.sub(&other.matmul(self)?)
    }

    /// `self * other + other * self`.
    pub fn anticommutator(&self, other: &ExactMatrix) -> Result<ExactMatrix, LinalgError> {
        self.matmul(other)?.add(&other.matmul(self)?)
    }

    pub fn mul_vec(&self, v: &ExactVector) -> Result<ExactVector, LinalgError> {
        if self.cols != v.len() {
            return Err(LinalgError::DimensionMismatch {
                op: "mul_vec",
                left: self.dims(),
                right: (v.len(), 1),
            });
        }
        let dense = v.to_dense();
        let entries = self
            .data
            .iter()
            .enumerate()
            .filter_map(|(r, row)| {
                let mut acc = Rational::zero();
                for (c, q) in row {
                    if !dense[*c].is_zero() {
                        acc += q * &dense[*c];
                    }
                }
                (!acc.is_zero()).then_some((r, acc))
            })
            .collect();
        Ok(ExactVector::from_sorted_unchecked(self.rows, entries))
    }

    /// First position where the two matrices differ, if any.
    pub fn first_difference(&self, other: &ExactMatrix) -> Option<(usize, usize)> {
        if self.dims() != other.dims() {
            return Some((0, 0));
        }
        for (r, (a, b)) in self.data.iter().zip(&other.data).enumerate() {
            if a != b {
                let c = a
                    .iter()
                    .zip(b)
                    .find(|(x, y)| x != y)
                    .map(|(x, y)| x.0.min(y.0))
                    .unwrap_or_else(|| {
                        if a.len() > b.len() {
                            a[b.len()].0
                        } else {
                            b[a.len()].0
                        }
                    });
                return Some((r, c));
            }
        }
        None
    }
}

impl std::ops::Neg for &ExactMatrix {
    type Output = ExactMatrix;

    fn neg(self) -> ExactMatrix {
        self.scale(&rat(-1))
    }
}

/// Kronecker product. Index pairing is row-major: `(x, x')` maps to
/// `x * b.rows() + x'`, so the left factor is the most significant.
pub fn kron(a: &ExactMatrix, b: &ExactMatrix) -> ExactMatrix {
    let mut data = Vec::with_capacity(a.rows * b.rows);
    for arow in &a.data {
        for brow in &b.data {
            let mut row = Vec::with_capacity(arow.len() * brow.len());
            for (y, p) in arow {
                for (y2, q) in brow {
                    row.push((y * b.cols + y2, p * q));
                }
            }
            data.push(row);
        }
    }
    ExactMatrix {
        rows: a.rows * b.rows,
        cols: a.cols * b.cols,
        data,
    }
}

/// Row-major vectorization: entry `(r, c)` lands at `r * cols + c`.
pub fn vectorize(m: &ExactMatrix) -> ExactVector {
    let entries = m
        .triplets()
        .map(|(r, c, q)| (r * m.cols + c, q.clone()))
        .collect();
    ExactVector::from_sorted_unchecked(m.rows * m.cols, entries)
}

pub fn unvectorize(v: &ExactVector, rows: usize, cols: usize) -> Result<ExactMatrix, LinalgError> {
    if v.len() != rows * cols {
        return Err(LinalgError::LengthMismatch {
            expected: rows * cols,
            found: v.len(),
        });
    }
    let mut data: Vec<SparseRow> = vec![Vec::new(); rows];
    for (i, q) in v.entries() {
        data[i / cols].push((i % cols, q.clone()));
    }
    Ok(ExactMatrix { rows, cols, data })
}

enum IntRows {
    Small(Vec<Vec<(usize, i64)>>),
    Big(Vec<Vec<(usize, BigInt)>>),
}

impl IntRows {
    fn to_big(&self) -> std::borrow::Cow<'_, [Vec<(usize, BigInt)>]> {
        match self {
            IntRows::Big(rows) => std::borrow::Cow::Borrowed(rows.as_slice()),
            IntRows::Small(rows) => std::borrow::Cow::Owned(
                rows.iter()
                    .map(|row| row.iter().map(|(c, v)| (*c, BigInt::from(*v))).collect())
                    .collect(),
            ),
        }
    }
}

/// A matrix written as `rows / denom` with integer `rows`.
struct IntegerForm {
    denom: BigInt,
    rows: IntRows,
    max_abs: u64,
}

impl IntegerForm {
    fn of(m: &ExactMatrix) -> Self {
        let denom = common_denominator(m.data.iter().flatten().map(|(_, q)| q));
        let big: Vec<Vec<(usize, BigInt)>> = m
            .data
            .iter()
            .map(|row| {
                row.iter()
                    .map(|(c, q)| {
                        let n = if denom.is_one() {
                            q.numer().clone()
                        } else {
                            q.numer() * (&denom / q.denom())
                        };
                        (*c, n)
                    })
                    .collect()
            })
            .collect();
        let mut max_abs = 0u64;
        let mut small = Vec::with_capacity(big.len());
        for row in &big {
            let mut srow = Vec::with_capacity(row.len());
            for (c, n) in row {
                match n.to_i64() {
                    Some(v) if v != i64::MIN => {
                        max_abs = max_abs.max(v.unsigned_abs());
                        srow.push((*c, v));
                    }
                    _ => {
                        return Self {
                            denom,
                            rows: IntRows::Big(big),
                            max_abs: u64::MAX,
                        }
                    }
                }
            }
            small.push(srow);
        }
        Self {
            denom,
            rows: IntRows::Small(small),
            max_abs,
        }
    }
}

fn fits_i128(a: u64, b: u64, inner: usize) -> bool {
    (a as u128)
        .checked_mul(b as u128)
        .and_then(|p| p.checked_mul(inner.max(1) as u128))
        .is_some_and(|bound| bound < (i128::MAX as u128))
}

fn finish_row<T: Into<BigInt>>(
    mut touched: Vec<usize>,
    mut take: impl FnMut(usize) -> Option<T>,
    denom: &BigInt,
) -> SparseRow {
    touched.sort_unstable();
    touched
        .into_iter()
        .filter_map(|c| {
            take(c).map(|v| {
                let q = if denom.is_one() {
                    Rational::from_integer(v.into())
                } else {
                    Rational::new(v.into(), denom.clone())
                };
                (c, q)
            })
        })
        .collect()
}

fn small_row_product(
    arow: &[(usize, i64)],
    b: &[Vec<(usize, i64)>],
    cols: usize,
    denom: &BigInt,
) -> SparseRow {
    let work: usize = arow.iter().map(|(k, _)| b[*k].len()).sum();
    if work * 8 < cols {
        // Sparse row: sort the partial products instead of zeroing a dense accumulator.
        let mut terms: Vec<(usize, i128)> = Vec::with_capacity(work);
        for (k, x) in arow {
            terms.extend(b[*k].iter().map(|(c, y)| (*c, (*x as i128) * (*y as i128))));
        }
        terms.sort_unstable_by_key(|t| t.0);
        let mut merged: Vec<(usize, i128)> = Vec::with_capacity(terms.len());
        for (c, v) in terms {
            match merged.last_mut() {
                Some((last, acc)) if *last == c => *acc += v,
                _ => merged.push((c, v)),
            }
        }
        let touched = merged.iter().map(|t| t.0).collect();
        let mut it = merged.into_iter();
        return finish_row(
            touched,
            |_| {
                it.next()
                    .and_then(|(_, v)| (v != 0).then(|| BigInt::from(v)))
            },
            denom,
        );
    }
    let mut acc = vec![0i128; cols];
    let mut seen = vec![false; cols];
    let mut touched = Vec::new();
    for (k, x) in arow {
        for (c, y) in &b[*k] {
            if !seen[*c] {
                seen[*c] = true;
                touched.push(*c);
            }
            acc[*c] += (*x as i128) * (*y as i128);
        }
    }
    finish_row(
        touched,
        |c| (acc[c] != 0).then(|| BigInt::from(acc[c])),
        denom,
    )
}

fn big_row_product(
    arow: &[(usize, BigInt)],
    b: &[Vec<(usize, BigInt)>],
    cols: usize,
    denom: &BigInt,
) -> SparseRow {
    let mut acc = vec![BigInt::zero(); cols];
    let mut seen = vec![false; cols];
    let mut touched = Vec::new();
    for (k, x) in arow {
        for (c, y) in &b[*k] {
            if !seen[*c] {
                seen[*c] = true;
                touched.push(*c);
            }
            acc[*c] += x * y;
        }
    }
    finish_row(
        touched,
        |c| {
            let v = std::mem::take(&mut acc[c]);
            (!v.is_zero()).then_some(v)
        },
        denom,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlinalg::ratio;

    #[test]
    fn monomial_fast_paths_match_general_product() {
        let p = ExactMatrix::from_ints(&[&[0, -2, 0], &[0, 0, 0], &[1, 0, 0]]);
        let m = ExactMatrix::from_dense(vec![
            vec![ratio(1, 2), rat(3), rat(0)],
            vec![rat(-1), rat(0), ratio(5, 3)],
            vec![rat(4), rat(1), rat(1)],
        ])
        .unwrap();
        let dense = |x: &ExactMatrix, y: &ExactMatrix| {
            let (xd, yd) = (x.to_dense(), y.to_dense());
            let out = (0..x.rows())
                .map(|r| {
                    (0..y.cols())
                        .map(|c| (0..x.cols()).map(|k| &xd[r][k] * &yd[k][c]).sum())
                        .collect()
                })
                .collect();
            ExactMatrix::from_dense(out).unwrap()
        };
        assert_eq!(p.matmul(&m).unwrap(), dense(&p, &m));
        assert_eq!(m.matmul(&p).unwrap(), dense(&m, &p));
        assert_eq!(p.matmul(&p).unwrap(), dense(&p, &p));
    }

    fn swap() -> ExactMatrix {
        ExactMatrix::from_ints(&[&[0, 1], &[1, 0]])
    }

    #[test]
    fn kron_of_identities_is_identity() {
        let i2 = ExactMatrix::identity(2);
        assert_eq!(kron(&i2, &i2), ExactMatrix::identity(4));
    }

    #[test]
    fn kron_left_factor_is_most_significant() {
        // swap (x) 1 flips the high bit of a 2-bit index: 0<->2, 1<->3.
        let m = kron(&swap(), &ExactMatrix::identity(2));
        let expected = ExactMatrix::from_triplets(
            4,
            4,
            [
                (0, 2, rat(1)),
                (2, 0, rat(1)),
                (1, 3, rat(1)),
                (3, 1, rat(1)),
            ],
        )
        .unwrap();
        assert_eq!(m, expected);
    }

    #[test]
    fn commutator_with_identity_vanishes() {
        let m = ExactMatrix::from_ints(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 10]]);
        assert!(ExactMatrix::identity(3).commutator(&m).unwrap().is_zero());
    }

    #[test]
    fn commutator_of_swap_and_sign() {
        let sign = ExactMatrix::from_ints(&[&[1, 0], &[0, -1]]);
        let c = sign.commutator(&swap()).unwrap();
        let expected = sign.matmul(&swap()).unwrap().scale(&rat(2));
        assert_eq!(c, expected);
        assert!(!c.is_zero());
    }

    #[test]
    fn matmul_rational_entries() {
        let a = ExactMatrix::from_dense(vec![
            vec![ratio(1, 2), ratio(1, 3)],
            vec![rat(0), ratio(-2, 7)],
        ])
        .unwrap();
        let b =
            ExactMatrix::from_dense(vec![vec![rat(2), rat(0)], vec![rat(3), ratio(7, 2)]]).unwrap();
        let p = a.matmul(&b).unwrap();
        assert_eq!(p.get(0, 0), rat(2));
        assert_eq!(p.get(0, 1), ratio(7, 6));
        assert_eq!(p.get(1, 0), ratio(-6, 7));
        assert_eq!(p.get(1, 1), rat(-1));
    }

    #[test]
    fn matmul_big_path_matches() {
        let huge = rat(i64::MAX) * rat(4);
        let a = ExactMatrix::from_dense(vec![vec![huge.clone(), rat(1)], vec![rat(0), rat(1)]])
            .unwrap();
        let p = a.matmul(&a).unwrap();
        assert_eq!(p.get(0, 0), &huge * &huge);
        assert_eq!(p.get(0, 1), huge + rat(1));
    }

    #[test]
    fn dimension_errors() {
        let a = ExactMatrix::zeros(2, 3);
        assert!(a.matmul(&a).is_err());
        assert!(a.add(&ExactMatrix::zeros(3, 2)).is_err());
        assert!(ExactMatrix::from_triplets(2, 2, [(2, 0, rat(1))]).is_err());
        assert!(unvectorize(&ExactVector::zeros(5), 2, 2).is_err());
    }

    #[test]
    fn vectorize_is_row_major() {
        let m = ExactMatrix::from_ints(&[&[1, 2], &[3, 4]]);
        assert_eq!(vectorize(&m), ExactVector::from_ints(&[1, 2, 3, 4]));
        assert!(vectorize(&ExactMatrix::zeros(3, 3)).is_zero());
        assert_eq!(unvectorize(&vectorize(&m), 2, 2).unwrap(), m);
    }

    #[test]
    fn transpose_involution_and_symmetry() {
        let m = ExactMatrix::from_ints(&[&[1, 2, 0], &[0, 0, 5]]);
        assert_eq!(m.transpose().transpose(), m);
        assert_eq!(m.transpose().dims(), (3, 2));
        let anti = ExactMatrix::from_ints(&[&[0, 3], &[-3, 0]]);
        assert!(anti.is_antisymmetric());
        assert!(!anti.is_symmetric());
        assert!(swap().is_symmetric());
    }

    #[test]
    fn first_difference_finds_entry() {
        let a = ExactMatrix::from_ints(&[&[1, 2], &[3, 4]]);
        let b = ExactMatrix::from_ints(&[&[1, 2], &[3, 5]]);
        assert_eq!(a.first_difference(&b), Some((1, 1)));
        let c = ExactMatrix::from_ints(&[&[1, 2], &[0, 4]]);
        assert_eq!(a.first_difference(&c), Some((1, 0)));
        assert_eq!(a.first_difference(&a), None);
    }

    #[test]
    fn parallel_and_sequential_products_agree() {
        let m = ExactMatrix::from_triplets(
            80,
            80,
            (0..80).flat_map(|i| {
                [
                    (i, (i * 7) % 80, ratio(i as i64 + 1, 3)),
                    (i, (i + 1) % 80, rat(-2)),
                ]
            }),
        )
        .unwrap();
        assert_eq!(
            m.matmul_with(&m, Execution::Sequential).unwrap(),
            m.matmul_with(&m, Execution::Parallel).unwrap()
        );
    }
}
