//! Fraction-free row reduction.
//!
//! Rows are kept as primitive integer vectors (denominators cleared, content
//! divided out, leading entry positive) while eliminating, so intermediate
//! values stay small. Rationals only reappear when the final reduced rows are
//! normalized to a leading 1.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::rational::common_denominator;
use super::{ExactVector, Rational};

pub(crate) type IntRow = Vec<(usize, BigInt)>;

/// Clears denominators and divides out the content. Leading entry positive.
pub(crate) fn primitive(row: &[(usize, Rational)]) -> IntRow {
    let denom = common_denominator(row.iter().map(|(_, q)| q));
    let ints: IntRow = row
        .iter()
        .map(|(c, q)| (*c, q.numer() * (&denom / q.denom())))
        .collect();
    normalize(ints)
}

fn normalize(mut row: IntRow) -> IntRow {
    let Some(first) = row.first() else {
        return row;
    };
    let negative = first.1.is_negative();
    let mut g = BigInt::zero();
    for (_, v) in &row {
        g = g.gcd(v);
        if g.is_one() {
            break;
        }
    }
    if g.is_one() && !negative {
        return row;
    }
    if negative {
        g = -g;
    }
    for (_, v) in row.iter_mut() {
        *v = &*v / &g;
    }
    row
}

/// Zeroes `row` at `col` using `pivot`, whose leading column is `col`:
/// `p * row - r * pivot` with the multipliers divided by their gcd.
fn eliminate(row: &[(usize, BigInt)], pivot: &[(usize, BigInt)], col: usize) -> IntRow {
    let r = &row[row
        .binary_search_by_key(&col, |(c, _)| *c)
        .expect("entry present")]
    .1;
    let p = &pivot[pivot
        .binary_search_by_key(&col, |(c, _)| *c)
        .expect("pivot present")]
    .1;
    let g = r.gcd(p);
    let (rm, pm) = (p / &g, r / &g);
    let mut out = Vec::with_capacity(row.len() + pivot.len());
    let (mut i, mut j) = (0, 0);
    while i < row.len() || j < pivot.len() {
        let (ci, cj) = (row.get(i).map(|e| e.0), pivot.get(j).map(|e| e.0));
        let (c, v) = match (ci, cj) {
            (Some(a), Some(b)) if a == b => {
                let v = &rm * &row[i].1 - &pm * &pivot[j].1;
                i += 1;
                j += 1;
                (a, v)
            }
            (Some(a), Some(b)) if a < b => {
                i += 1;
                (a, &rm * &row[i - 1].1)
            }
            (Some(a), None) => {
                i += 1;
                (a, &rm * &row[i - 1].1)
            }
            (_, Some(b)) => {
                j += 1;
                (b, -(&pm * &pivot[j - 1].1))
            }
            (None, None) => unreachable!(),
        };
        if !v.is_zero() {
            out.push((c, v));
        }
    }
    normalize(out)
}

/// Incremental row-echelon form keyed by pivot column.
#[derive(Default)]
pub(crate) struct Echelon {
    pivots: BTreeMap<usize, IntRow>,
}

impl Echelon {
    pub(crate) fn new() -> Self {
        Self::default()
    }

    pub(crate) fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Reduces `row` against the current pivots. Returns true when it was
    /// independent and became a new pivot row.
    pub(crate) fn insert(&mut self, row: &[(usize, Rational)]) -> bool {
        let mut row = primitive(row);
        loop {
            let Some(&(lead, _)) = row.first() else {
                return false;
            };
            match self.pivots.get(&lead) {
                Some(pivot) => row = eliminate(&row, pivot, lead),
                None => {
                    self.pivots.insert(lead, row);
                    return true;
                }
            }
        }
    }

    /// Back-substitutes into reduced row-echelon form with leading 1s, rows
    /// ordered by pivot column.
    pub(crate) fn into_rref(self, ncols: usize) -> Vec<ExactVector> {
        let mut reduced: BTreeMap<usize, IntRow> = BTreeMap::new();
        for (col, mut row) in self.pivots.into_iter().rev() {
            loop {
                let target = row
                    .iter()
                    .skip(1)
                    .map(|(c, _)| *c)
                    .find(|c| reduced.contains_key(c));
                match target {
                    Some(c) => row = eliminate(&row, &reduced[&c], c),
                    None => break,
                }
            }
            reduced.insert(col, row);
        }
        reduced
            .into_values()
            .map(|row| {
                let lead = row[0].1.clone();
                let entries = row
                    .into_iter()
                    .map(|(c, v)| (c, Rational::new(v, lead.clone())))
                    .collect();
                ExactVector::from_sorted_unchecked(ncols, entries)
            })
            .collect()
    }
}
