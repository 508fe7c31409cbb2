//! The hypercube `Q_D` and its structural matrices.
//!
//! Vertex encoding: a vertex is an integer in `0..2^D` whose binary digits,
//! most significant first, are the coordinates `x_1 x_2 ... x_D`. Coordinate
//! `i` therefore lives at bit `D - i`, which makes coordinate 1 the leftmost
//! Kronecker factor. Subsets `S` of `{1..D}` use the same bit layout, so
//! `(-1)^{|S ∩ x|}` is the parity of `S & x`.

use thiserror::Error;

use crate::exactlinalg::{kron, kron_vec, rat, ratio, ExactMatrix, ExactVector, Rational};
use crate::graph::Graph;

pub const DEFAULT_CAP_D: usize = 12;
pub const IDEMPOTENT_CAP_D: usize = 8;
/// Largest dimension any context accepts, whatever cap is requested.
pub const HARD_CAP_D: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HypercubeError {
    #[error("dimension D = {d} outside 1..={cap}")]
    DimensionOutOfRange { d: usize, cap: usize },
    #[error("coordinate {i} outside 1..={d}")]
    CoordinateOutOfRange { i: usize, d: usize },
    #[error("subset mask {mask:#b} is not a subset of {{1..{d}}}")]
    SubsetOutOfRange { mask: usize, d: usize },
    #[error("coordinates must satisfy i < j, got ({i}, {j})")]
    UnorderedPair { i: usize, j: usize },
    #[error("dense idempotents need D <= {cap}, got {d}")]
    IdempotentCap { d: usize, cap: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct HypercubeContext {
    d: usize,
}

/// `Q_D` as a graph together with its coordinate context, with the default cap.
pub fn hypercube(d: usize) -> Result<(Graph, HypercubeContext), HypercubeError> {
    let ctx = HypercubeContext::new(d)?;
    Ok((ctx.graph(), ctx))
}

impl HypercubeContext {
    pub fn new(d: usize) -> Result<Self, HypercubeError> {
        Self::with_cap(d, DEFAULT_CAP_D)
    }

    pub fn with_cap(d: usize, cap: usize) -> Result<Self, HypercubeError> {
        let cap = cap.min(HARD_CAP_D);
        if d == 0 || d > cap {
            return Err(HypercubeError::DimensionOutOfRange { d, cap });
        }
        Ok(Self { d })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Vertex count `2^D`.
    pub fn n(&self) -> usize {
        1 << self.d
    }

    /// Bit holding coordinate `i` (1-based).
    pub fn coord_mask(&self, i: usize) -> Result<usize, HypercubeError> {
        self.check_coord(i)?;
        Ok(1 << (self.d - i))
    }

    fn check_coord(&self, i: usize) -> Result<(), HypercubeError> {
        if i == 0 || i > self.d {
            return Err(HypercubeError::CoordinateOutOfRange { i, d: self.d });
        }
        Ok(())
    }

    pub(crate) fn check_pair(&self, i: usize, j: usize) -> Result<(), HypercubeError> {
        self.check_coord(i)?;
        self.check_coord(j)?;
        if i >= j {
            return Err(HypercubeError::UnorderedPair { i, j });
        }
        Ok(())
    }

    pub fn check_subset(&self, mask: usize) -> Result<(), HypercubeError> {
        if mask >= self.n() {
            return Err(HypercubeError::SubsetOutOfRange { mask, d: self.d });
        }
        Ok(())
    }

    /// Coordinate `x_i` of vertex `x`.
    pub fn coordinate(&self, x: usize, i: usize) -> usize {
        (x >> (self.d - i)) & 1
    }

    /// Mask of a subset given by its (1-based) elements.
    pub fn subset(&self, elements: &[usize]) -> Result<usize, HypercubeError> {
        elements
            .iter()
            .try_fold(0, |acc, &i| Ok(acc | self.coord_mask(i)?))
    }

    /// Elements of a subset mask, ascending.
    pub fn subset_elements(&self, mask: usize) -> Vec<usize> {
        (1..=self.d)
            .filter(|&i| mask & (1 << (self.d - i)) != 0)
            .collect()
    }

    pub fn graph(&self) -> Graph {
        let n = self.n();
        Graph::new(
            n,
            (0..n).flat_map(|x| {
                (0..self.d)
                    .map(move |b| (x, x ^ (1 << b)))
                    .filter(|(x, y)| x < y)
            }),
        )
        .expect("hypercube edges are simple")
    }

    pub fn adjacency(&self) -> ExactMatrix {
        self.graph().adjacency()
    }

    /// `α_i`: the permutation flipping coordinate `i`.
    pub fn alpha(&self, i: usize) -> Result<ExactMatrix, HypercubeError> {
        let mask = self.coord_mask(i)?;
        let n = self.n();
        Ok(
            ExactMatrix::from_triplets(n, n, (0..n).map(|x| (x, x ^ mask, rat(1))))
                .expect("in range"),
        )
    }

    /// `α*_i`: diagonal, `+1` where `x_i = 0` and `-1` where `x_i = 1`.
    pub fn alpha_star(&self, i: usize) -> Result<ExactMatrix, HypercubeError> {
        let mask = self.coord_mask(i)?;
        Ok(ExactMatrix::diagonal(
            (0..self.n())
                .map(|x| if x & mask == 0 { rat(1) } else { rat(-1) })
                .collect(),
        ))
    }

    /// `1 ⊗ ... ⊗ α ⊗ ... ⊗ 1` with `α` in slot `i`.
    pub fn alpha_via_kron(&self, i: usize) -> Result<ExactMatrix, HypercubeError> {
        self.check_coord(i)?;
        Ok(self.kron_chain(i, &ExactMatrix::from_ints(&[&[0, 1], &[1, 0]])))
    }

    /// `1 ⊗ ... ⊗ α* ⊗ ... ⊗ 1` with `α* = diag(1, -1)` in slot `i`.
    pub fn alpha_star_via_kron(&self, i: usize) -> Result<ExactMatrix, HypercubeError> {
        self.check_coord(i)?;
        Ok(self.kron_chain(i, &ExactMatrix::from_ints(&[&[1, 0], &[0, -1]])))
    }

    fn kron_chain(&self, slot: usize, factor: &ExactMatrix) -> ExactMatrix {
        let one = ExactMatrix::identity(2);
        (1..=self.d)
            .map(|k| if k == slot { factor } else { &one })
            .fold(ExactMatrix::identity(1), |acc, f| kron(&acc, f))
    }

    /// `W_S = 2^{D/2} w_S`, with entries `(-1)^{|S ∩ x|}`.
    pub fn scaled_eigenvector(&self, subset: usize) -> Result<ScaledEigenvector, HypercubeError> {
        self.check_subset(subset)?;
        let vec = ExactVector::from_dense((0..self.n()).map(|x| parity_sign(subset & x)).collect());
        Ok(ScaledEigenvector { subset, vec })
    }

    /// `W_S` assembled as the tensor product of `(1, 1)` for coordinates outside
    /// `S` and `(1, -1)` for coordinates inside.
    pub fn scaled_eigenvector_via_kron(
        &self,
        subset: usize,
    ) -> Result<ExactVector, HypercubeError> {
        self.check_subset(subset)?;
        let u = ExactVector::from_ints(&[1, 1]);
        let v = ExactVector::from_ints(&[1, -1]);
        Ok((1..=self.d).fold(ExactVector::from_ints(&[1]), |acc, i| {
            let w = if subset & (1 << (self.d - i)) != 0 {
                &v
            } else {
                &u
            };
            kron_vec(&acc, w)
        }))
    }

    /// Eigenvalues, multiplicities and dense primitive idempotents of `A`.
    ///
    /// `E_i = 2^{-D} Σ_{|S| = i} W_S W_S^T`. Since `(W_S W_S^T)_{xy}` only
    /// depends on `x ⊕ y`, the sum is tabulated once per difference pattern.
    pub fn eigen_data(&self) -> Result<EigenData, HypercubeError> {
        if self.d > IDEMPOTENT_CAP_D {
            return Err(HypercubeError::IdempotentCap {
                d: self.d,
                cap: IDEMPOTENT_CAP_D,
            });
        }
        let n = self.n();
        let d = self.d;
        let mut sums = vec![vec![0i64; n]; d + 1];
        for s in 0..n {
            let level = s.count_ones() as usize;
            for (z, acc) in sums[level].iter_mut().enumerate() {
                *acc += if (s & z).count_ones() % 2 == 0 { 1 } else { -1 };
            }
        }
        let spaces = sums
            .iter()
            .enumerate()
            .map(|(i, table)| {
                let idempotent = ExactMatrix::from_triplets(
                    n,
                    n,
                    (0..n).flat_map(|x| {
                        (0..n)
                            .filter(move |y| table[x ^ y] != 0)
                            .map(move |y| (x, y, ratio(table[x ^ y], n as i64)))
                    }),
                )
                .expect("in range");
                EigenSpace {
                    theta: d as i64 - 2 * i as i64,
                    multiplicity: binomial(d, i),
                    idempotent,
                }
            })
            .collect();
        Ok(EigenData { spaces })
    }
}

fn parity_sign(bits: usize) -> Rational {
    if bits.count_ones().is_multiple_of(2) {
        rat(1)
    } else {
        rat(-1)
    }
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k.min(n - k)).fold(1, |acc, t| acc * (n - t) / (t + 1))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScaledEigenvector {
    /// Subset mask, same bit layout as vertices.
    pub subset: usize,
    pub vec: ExactVector,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EigenSpace {
    pub theta: i64,
    pub multiplicity: usize,
    pub idempotent: ExactMatrix,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EigenData {
    /// Indexed by `i = 0..=D`, eigenvalues decreasing.
    pub spaces: Vec<EigenSpace>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlinalg::rank;

    #[test]
    fn small_cubes() {
        let (g1, _) = hypercube(1).unwrap();
        assert_eq!((g1.n(), g1.edge_count()), (2, 1));
        let (g2, _) = hypercube(2).unwrap();
        assert_eq!((g2.n(), g2.edge_count()), (4, 4));
        assert!(g2.distance_regularity().unwrap().is_regular());
        let (g3, _) = hypercube(3).unwrap();
        assert_eq!((g3.n(), g3.edge_count()), (8, 12));
        assert_eq!(g3.diameter().unwrap(), 3);
    }

    #[test]
    fn dimension_range_is_enforced() {
        assert!(hypercube(0).is_err());
        assert!(hypercube(13).is_err());
        assert!(HypercubeContext::with_cap(13, 14).is_ok());
        assert!(HypercubeContext::with_cap(30, 40).is_err());
    }

    #[test]
    fn bipartition_by_popcount_parity() {
        let (g, _) = hypercube(4).unwrap();
        for (u, v) in g.edges() {
            assert_ne!(u.count_ones() % 2, v.count_ones() % 2);
        }
    }

    #[test]
    fn q1_alpha_and_alpha_star() {
        let ctx = HypercubeContext::new(1).unwrap();
        assert_eq!(
            ctx.alpha(1).unwrap(),
            ExactMatrix::from_ints(&[&[0, 1], &[1, 0]])
        );
        assert_eq!(
            ctx.alpha_star(1).unwrap(),
            ExactMatrix::from_ints(&[&[1, 0], &[0, -1]])
        );
        assert!(ctx.alpha(2).is_err());
        assert!(ctx.alpha_star(0).is_err());
    }

    #[test]
    fn kron_factorizations_small() {
        let ctx = HypercubeContext::new(2).unwrap();
        let a = ExactMatrix::from_ints(&[&[0, 1], &[1, 0]]);
        let one = ExactMatrix::identity(2);
        assert_eq!(kron(&a, &one), ctx.alpha(1).unwrap());
        assert_eq!(kron(&one, &a), ctx.alpha(2).unwrap());
        let ctx3 = HypercubeContext::new(3).unwrap();
        let s = ExactMatrix::from_ints(&[&[1, 0], &[0, -1]]);
        assert_eq!(kron(&kron(&one, &s), &one), ctx3.alpha_star(2).unwrap());
    }

    #[test]
    fn q3_distance_two_row_sums() {
        let (g, _) = hypercube(3).unwrap();
        let a2 = g.distance_matrix(2).unwrap();
        // brute-force: vertices at popcount distance 2 from each x
        for x in 0..8usize {
            let expected = (0..8usize).filter(|y| (x ^ y).count_ones() == 2).count();
            assert_eq!(a2.row(x).len(), expected);
            assert_eq!(expected, 3);
            assert_eq!(g.adjacency().row(x).len(), 3);
        }
    }

    #[test]
    fn bfs_distance_is_hamming() {
        let ctx = HypercubeContext::new(5).unwrap();
        let table = ctx.graph().distance_table().unwrap();
        for (x, row) in table.iter().enumerate() {
            for (y, dist) in row.iter().enumerate() {
                assert_eq!(*dist, (x ^ y).count_ones() as usize);
            }
        }
    }

    #[test]
    fn eigenvectors_of_q3() {
        let ctx = HypercubeContext::new(3).unwrap();
        let a = ctx.adjacency();
        let w0 = ctx.scaled_eigenvector(0).unwrap();
        assert_eq!(w0.vec, ExactVector::from_ints(&[1; 8]));
        assert_eq!(a.mul_vec(&w0.vec).unwrap(), w0.vec.scale(&rat(3)));
        let s = ctx.subset(&[1, 3]).unwrap();
        let w = ctx.scaled_eigenvector(s).unwrap().vec;
        assert_eq!(w, ctx.scaled_eigenvector_via_kron(s).unwrap());
        assert_eq!(a.mul_vec(&w).unwrap(), w.scale(&rat(-1)));
        assert!(ctx.scaled_eigenvector(8).is_err());
    }

    #[test]
    fn subset_encoding() {
        let ctx = HypercubeContext::new(4).unwrap();
        assert_eq!(ctx.subset(&[1]).unwrap(), 0b1000);
        assert_eq!(ctx.subset(&[2, 4]).unwrap(), 0b0101);
        assert_eq!(ctx.subset_elements(0b0101), vec![2, 4]);
        assert_eq!(ctx.coordinate(0b0100, 2), 1);
        assert_eq!(ctx.coordinate(0b0100, 1), 0);
    }

    #[test]
    fn q3_idempotents() {
        let ctx = HypercubeContext::new(3).unwrap();
        let data = ctx.eigen_data().unwrap();
        let mult: Vec<usize> = data.spaces.iter().map(|s| s.multiplicity).collect();
        assert_eq!(mult, vec![1, 3, 3, 1]);
        let thetas: Vec<i64> = data.spaces.iter().map(|s| s.theta).collect();
        assert_eq!(thetas, vec![3, 1, -1, -3]);
        assert_eq!(
            data.spaces[0].idempotent,
            ExactMatrix::ones(8, 8).scale(&ratio(1, 8))
        );
        let mut sum = ExactMatrix::zeros(8, 8);
        for s in &data.spaces {
            sum = sum.add_scaled(&s.idempotent, &rat(s.theta)).unwrap();
            assert_eq!(rank(&s.idempotent), s.multiplicity);
        }
        assert_eq!(sum, ctx.adjacency());
        assert!(HypercubeContext::new(9).unwrap().eigen_data().is_err());
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(10, 0), 1);
        assert_eq!(binomial(3, 4), 0);
        assert_eq!(binomial(12, 6), 924);
    }
}
