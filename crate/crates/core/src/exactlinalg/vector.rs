use std::cmp::Ordering;

use num_traits::{One, Zero};

use super::{rat, LinalgError, Rational};

/// A sparse vector of rationals. Only nonzero entries are stored, sorted by
/// index, so structural equality is mathematical equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExactVector {
    len: usize,
    entries: Vec<(usize, Rational)>,
}

impl ExactVector {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            entries: Vec::new(),
        }
    }

    /// Unit vector `e_index`.
    pub fn unit(len: usize, index: usize) -> Self {
        assert!(index < len, "unit index {index} out of range {len}");
        Self {
            len,
            entries: vec![(index, rat(1))],
        }
    }

    pub fn from_dense(values: Vec<Rational>) -> Self {
        let len = values.len();
        let entries = values
            .into_iter()
            .enumerate()
            .filter(|(_, q)| !q.is_zero())
            .collect();
        Self { len, entries }
    }

    pub fn from_ints(values: &[i64]) -> Self {
        Self::from_dense(values.iter().map(|&v| rat(v)).collect())
    }

    /// Builds from `(index, value)` pairs in any order; repeated indices are summed.
    pub fn from_entries(
        len: usize,
        entries: impl IntoIterator<Item = (usize, Rational)>,
    ) -> Result<Self, LinalgError> {
        let mut raw: Vec<(usize, Rational)> = Vec::new();
        for (i, q) in entries {
            if i >= len {
                return Err(LinalgError::LengthMismatch {
                    expected: len,
                    found: i + 1,
                });
            }
            raw.push((i, q));
        }
        Ok(Self {
            len,
            entries: canonicalize(raw),
        })
    }

    /// Caller guarantees sorted, distinct, in-range, nonzero entries.
    pub(crate) fn from_sorted_unchecked(len: usize, entries: Vec<(usize, Rational)>) -> Self {
        debug_assert!(entries.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(entries.iter().all(|(i, q)| *i < len && !q.is_zero()));
        Self { len, entries }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(usize, Rational)] {
        &self.entries
    }

    pub fn get(&self, index: usize) -> Rational {
        match self.entries.binary_search_by_key(&index, |(i, _)| *i) {
            Ok(pos) => self.entries[pos].1.clone(),
            Err(_) => Rational::zero(),
        }
    }

    /// First nonzero entry.
    pub fn leading(&self) -> Option<(usize, &Rational)> {
        self.entries.first().map(|(i, q)| (*i, q))
    }

    pub fn to_dense(&self) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.len];
        for (i, q) in &self.entries {
            out[*i] = q.clone();
        }
        out
    }

    pub fn inner(&self, other: &ExactVector) -> Result<Rational, LinalgError> {
        self.check_len(other)?;
        let mut acc = Rational::zero();
        let (mut a, mut b) = (
            self.entries.iter().peekable(),
            other.entries.iter().peekable(),
        );
        while let (Some((i, x)), Some((j, y))) = (a.peek(), b.peek()) {
            match i.cmp(j) {
                Ordering::Less => {
                    a.next();
                }
                Ordering::Greater => {
                    b.next();
                }
                Ordering::Equal => {
                    acc += x * y;
                    a.next();
                    b.next();
                }
            }
        }
        Ok(acc)
    }

    pub fn scale(&self, factor: &Rational) -> ExactVector {
        if factor.is_zero() {
            return Self::zeros(self.len);
        }
        Self {
            len: self.len,
            entries: self.entries.iter().map(|(i, q)| (*i, q * factor)).collect(),
        }
    }

    pub fn add(&self, other: &ExactVector) -> Result<ExactVector, LinalgError> {
        self.check_len(other)?;
        Ok(Self {
            len: self.len,
            entries: merge(&self.entries, &other.entries, &rat(1)),
        })
    }

    pub fn sub(&self, other: &ExactVector) -> Result<ExactVector, LinalgError> {
        self.check_len(other)?;
        Ok(Self {
            len: self.len,
            entries: merge(&self.entries, &other.entries, &rat(-1)),
        })
    }

    /// `self + factor * other`.
    pub fn add_scaled(
        &self,
        other: &ExactVector,
        factor: &Rational,
    ) -> Result<ExactVector, LinalgError> {
        self.check_len(other)?;
        Ok(Self {
            len: self.len,
            entries: merge(&self.entries, &other.entries, factor),
        })
    }

    fn check_len(&self, other: &ExactVector) -> Result<(), LinalgError> {
        if self.len != other.len {
            return Err(LinalgError::LengthMismatch {
                expected: self.len,
                found: other.len,
            });
        }
        Ok(())
    }
}

/// Tensor product of vectors: entry `(x, x')` sits at `x * b.len() + x'`.
pub fn kron_vec(a: &ExactVector, b: &ExactVector) -> ExactVector {
    let mut entries = Vec::with_capacity(a.nnz() * b.nnz());
    for (x, p) in &a.entries {
        for (y, q) in &b.entries {
            entries.push((x * b.len + y, p * q));
        }
    }
    ExactVector {
        len: a.len * b.len,
        entries,
    }
}

/// `a + factor * b` over sorted sparse entry lists.
pub(crate) fn merge(
    a: &[(usize, Rational)],
    b: &[(usize, Rational)],
    factor: &Rational,
) -> Vec<(usize, Rational)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let unit = factor.is_one();
    let negate = !unit && (-factor).is_one();
    let times = |q: &Rational| {
        if unit {
            q.clone()
        } else if negate {
            -q
        } else {
            q * factor
        }
    };
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let ord = match (a.get(i), b.get(j)) {
            (Some(x), Some(y)) => x.0.cmp(&y.0),
            (Some(_), None) => Ordering::Less,
            _ => Ordering::Greater,
        };
        match ord {
            Ordering::Less => {
                out.push(a[i].clone());
                i += 1;
            }
            Ordering::Greater => {
                let q = times(&b[j].1);
                if !q.is_zero() {
                    out.push((b[j].0, q));
                }
                j += 1;
            }
            Ordering::Equal => {
                let q = &a[i].1 + times(&b[j].1);
                if !q.is_zero() {
                    out.push((a[i].0, q));
                }
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// Sorts, sums duplicates and drops zeros.
pub(crate) fn canonicalize(mut raw: Vec<(usize, Rational)>) -> Vec<(usize, Rational)> {
    raw.sort_by_key(|(i, _)| *i);
    let mut out: Vec<(usize, Rational)> = Vec::with_capacity(raw.len());
    for (i, q) in raw {
        match out.last_mut() {
            Some((j, acc)) if *j == i => *acc += q,
            _ => out.push((i, q)),
        }
    }
    out.retain(|(_, q)| !q.is_zero());
    out
}
