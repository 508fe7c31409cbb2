//! A-like matrices: the brute-force solver for arbitrary small graphs and the
//! closed-form constructions for hypercubes.

use std::collections::HashMap;

use serde::Serialize;
use thiserror::Error;

use crate::exactlinalg::{
    nullspace, rat, ratio, unvectorize, vectorize, ExactMatrix, ExactVector, LinalgError, Rational,
    SubspaceBasis,
};
use crate::graph::Graph;
use crate::hypercube::{HypercubeContext, HypercubeError};
use crate::parallel::{self, Execution};

/// Default vertex cap for the brute-force solver.
pub const BRUTE_FORCE_CAP: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlikeError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Hypercube(#[from] HypercubeError),
    #[error("graph has {n} vertices, brute-force cap is {cap}")]
    CapExceeded { n: usize, cap: usize },
    #[error("matrix is {rows}x{cols}, graph has {n} vertices")]
    Dimension { rows: usize, cols: usize, n: usize },
    #[error("matrix does not commute with A: (BA - AB) is nonzero at ({row}, {col})")]
    NotCommuting { row: usize, col: usize },
    #[error("computed A-like space is not closed under transpose")]
    NotTransposeClosed,
}

/// Positions where an A-like matrix may be nonzero, in a fixed order: every
/// diagonal `(x, x)` by vertex, then for each edge `{u, v}` with `u < v` the
/// pair `(u, v)` followed by `(v, u)`. A position's index in this list is the
/// index of its unknown in the constraint system.
#[derive(Clone, Debug)]
pub struct SupportPattern {
    n: usize,
    positions: Vec<(usize, usize)>,
    index: HashMap<(usize, usize), usize>,
}

impl SupportPattern {
    pub fn new(g: &Graph) -> Self {
        let n = g.n();
        let mut positions: Vec<(usize, usize)> = (0..n).map(|x| (x, x)).collect();
        for (u, v) in g.edges() {
            positions.push((u, v));
            positions.push((v, u));
        }
        let index = positions.iter().enumerate().map(|(k, &p)| (p, k)).collect();
        Self {
            n,
            positions,
            index,
        }
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn positions(&self) -> &[(usize, usize)] {
        &self.positions
    }

    pub fn index_of(&self, x: usize, y: usize) -> Option<usize> {
        self.index.get(&(x, y)).copied()
    }

    /// Linear system `(BA - AB)_{xy} = 0` over the unknowns of the pattern.
    /// One row per `(x, y)`, row index `x * n + y`.
    pub fn commutation_system(&self, g: &Graph) -> ExactMatrix {
        let n = self.n;
        let mut triplets = Vec::new();
        for x in 0..n {
            for y in 0..n {
                let row = x * n + y;
                // (BA)_{xy} = sum over v adjacent to y of B_{xv}
                for &v in g.neighbors(y) {
                    if let Some(k) = self.index_of(x, v) {
                        triplets.push((row, k, rat(1)));
                    }
                }
                // (AB)_{xy} = sum over v adjacent to x of B_{vy}
                for &v in g.neighbors(x) {
                    if let Some(k) = self.index_of(v, y) {
                        triplets.push((row, k, rat(-1)));
                    }
                }
            }
        }
        ExactMatrix::from_triplets(n * n, self.len(), triplets).expect("indices in range")
    }

    /// Places a vector of unknowns into the row-major `n^2` matrix space.
    pub fn embed(&self, v: &ExactVector) -> ExactVector {
        let n = self.n;
        ExactVector::from_entries(
            n * n,
            v.entries().iter().map(|(k, q)| {
                let (x, y) = self.positions[*k];
                (x * n + y, q.clone())
            }),
        )
        .expect("positions in range")
    }
}

/// The A-like space of a graph and its symmetric and antisymmetric parts, all
/// as canonical bases of vectorized `n x n` matrices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlikeDecomposition {
    pub n: usize,
    pub full: SubspaceBasis,
    pub symmetric: SubspaceBasis,
    pub antisymmetric: SubspaceBasis,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Dims {
    pub total: usize,
    pub sym: usize,
    pub antisym: usize,
}

impl AlikeDecomposition {
    pub fn dims(&self) -> Dims {
        Dims {
            total: self.full.dim(),
            sym: self.symmetric.dim(),
            antisym: self.antisymmetric.dim(),
        }
    }

    pub fn matrices(&self, basis: &SubspaceBasis) -> Vec<ExactMatrix> {
        basis.to_matrices(self.n, self.n).expect("ambient is n^2")
    }
}

fn transposed(v: &ExactVector, n: usize) -> ExactVector {
    vectorize(&unvectorize(v, n, n).expect("ambient is n^2").transpose())
}

pub fn solve_alike(g: &Graph) -> Result<AlikeDecomposition, AlikeError> {
    solve_alike_with_cap(g, BRUTE_FORCE_CAP)
}

/// Solves for the A-like space of `g` by exact elimination, then splits it by
/// projecting each basis element onto its symmetric and antisymmetric parts.
pub fn solve_alike_with_cap(g: &Graph, cap: usize) -> Result<AlikeDecomposition, AlikeError> {
    let n = g.n();
    if n > cap {
        return Err(AlikeError::CapExceeded { n, cap });
    }
    let pattern = SupportPattern::new(g);
    let solutions = nullspace(&pattern.commutation_system(g));
    let embedded: Vec<ExactVector> = solutions
        .vectors()
        .iter()
        .map(|v| pattern.embed(v))
        .collect();
    let full = SubspaceBasis::from_vectors(n * n, &embedded)?;

    let half = ratio(1, 2);
    let mut sym = Vec::with_capacity(full.dim());
    let mut anti = Vec::with_capacity(full.dim());
    for v in full.vectors() {
        let t = transposed(v, n);
        if !full.contains(&t)? {
            return Err(AlikeError::NotTransposeClosed);
        }
        sym.push(v.add(&t)?.scale(&half));
        anti.push(v.sub(&t)?.scale(&half));
    }
    let symmetric = SubspaceBasis::from_vectors(n * n, &sym)?;
    let antisymmetric = SubspaceBasis::from_vectors(n * n, &anti)?;
    debug_assert_eq!(full.dim(), symmetric.dim() + antisymmetric.dim());
    Ok(AlikeDecomposition {
        n,
        full,
        symmetric,
        antisymmetric,
    })
}

/// Outcome of [`is_alike`]; failures carry a witness entry.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AlikeCheck {
    Alike,
    /// `(BA - AB)_{row,col} = value != 0`.
    NotCommuting {
        row: usize,
        col: usize,
        value: Rational,
    },
    /// `B_{row,col} = value != 0` although `row`, `col` are neither equal nor adjacent.
    OutsideSupport {
        row: usize,
        col: usize,
        value: Rational,
    },
}

impl AlikeCheck {
    pub fn holds(&self) -> bool {
        matches!(self, AlikeCheck::Alike)
    }
}

pub fn is_alike(g: &Graph, b: &ExactMatrix) -> Result<AlikeCheck, AlikeError> {
    is_alike_with_adjacency(g, &g.adjacency(), b)
}

/// Like [`is_alike`] with a precomputed adjacency matrix of `g`.
pub fn is_alike_with_adjacency(
    g: &Graph,
    a: &ExactMatrix,
    b: &ExactMatrix,
) -> Result<AlikeCheck, AlikeError> {
    let n = g.n();
    if b.dims() != (n, n) {
        return Err(AlikeError::Dimension {
            rows: b.rows(),
            cols: b.cols(),
            n,
        });
    }
    let c = b.commutator(a)?;
    if let Some((row, col, value)) = c.triplets().next() {
        return Ok(AlikeCheck::NotCommuting {
            row,
            col,
            value: value.clone(),
        });
    }
    if let Some((row, col, value)) = b.triplets().find(|(x, y, _)| !g.in_support(*x, *y)) {
        return Ok(AlikeCheck::OutsideSupport {
            row,
            col,
            value: value.clone(),
        });
    }
    Ok(AlikeCheck::Alike)
}

/// `[I, α_1, ..., α_D]`, a basis of the symmetric A-like matrices of `Q_D`.
pub fn closed_form_sym_basis(ctx: &HypercubeContext) -> Vec<ExactMatrix> {
    std::iter::once(ExactMatrix::identity(ctx.n()))
        .chain((1..=ctx.d()).map(|i| ctx.alpha(i).expect("i in range")))
        .collect()
}

/// `B_ij = α*_i A α*_j - α*_j A α*_i` for a given `A`.
pub fn bij_with_adjacency(
    ctx: &HypercubeContext,
    a: &ExactMatrix,
    i: usize,
    j: usize,
) -> Result<ExactMatrix, AlikeError> {
    ctx.check_pair(i, j)?;
    let si = ctx.alpha_star(i)?;
    let sj = ctx.alpha_star(j)?;
    let left = si.matmul(a)?.matmul(&sj)?;
    let right = sj.matmul(a)?.matmul(&si)?;
    Ok(left.sub(&right)?)
}

pub fn bij(ctx: &HypercubeContext, i: usize, j: usize) -> Result<ExactMatrix, AlikeError> {
    bij_with_adjacency(ctx, &ctx.adjacency(), i, j)
}

/// Index pairs `(i, j)`, `1 <= i < j <= D`, in lexicographic order.
pub fn coordinate_pairs(d: usize) -> Vec<(usize, usize)> {
    (1..=d)
        .flat_map(|i| (i + 1..=d).map(move |j| (i, j)))
        .collect()
}

/// `{B_ij : i < j}` in lexicographic order, a basis of the antisymmetric
/// A-like matrices of `Q_D`.
pub fn closed_form_antisym_basis(ctx: &HypercubeContext) -> Vec<ExactMatrix> {
    let a = ctx.adjacency();
    parallel::map(
        Execution::Parallel,
        &coordinate_pairs(ctx.d()),
        |&(i, j)| bij_with_adjacency(ctx, &a, i, j).expect("pair in range"),
    )
}

/// `α*_i α*_j B - α*_i B α*_j - α*_j B α*_i + B α*_i α*_j`.
///
/// Its `(x, y)` entry is `(s_i(x) - s_i(y)) (s_j(x) - s_j(y)) B_{xy}` where
/// `s_k` is the diagonal of `α*_k`, so it vanishes for every `i < j` exactly
/// when `B` is supported on equal-or-adjacent pairs.
pub fn characterization_residual(
    ctx: &HypercubeContext,
    b: &ExactMatrix,
    i: usize,
    j: usize,
) -> Result<ExactMatrix, AlikeError> {
    ctx.check_pair(i, j)?;
    let n = ctx.n();
    if b.dims() != (n, n) {
        return Err(AlikeError::Dimension {
            rows: b.rows(),
            cols: b.cols(),
            n,
        });
    }
    let si = ctx.alpha_star(i)?;
    let sj = ctx.alpha_star(j)?;
    let sij = si.matmul(&sj)?;
    let t1 = sij.matmul(b)?;
    let t2 = si.matmul(b)?.matmul(&sj)?;
    let t3 = sj.matmul(b)?.matmul(&si)?;
    let t4 = b.matmul(&sij)?;
    Ok(t1.sub(&t2)?.sub(&t3)?.add(&t4)?)
}

/// Matrix of `B` restricted to `E_1 V`, in the orthonormal basis
/// `w_{{1}}, ..., w_{{D}}`: `M[t][s] = <W_{t+1}, B W_{s+1}> / 2^D`.
pub fn restriction_to_e1(
    ctx: &HypercubeContext,
    b: &ExactMatrix,
) -> Result<ExactMatrix, AlikeError> {
    let n = ctx.n();
    if b.dims() != (n, n) {
        return Err(AlikeError::Dimension {
            rows: b.rows(),
            cols: b.cols(),
            n,
        });
    }
    if let Some((row, col, _)) = b.commutator(&ctx.adjacency())?.triplets().next() {
        return Err(AlikeError::NotCommuting { row, col });
    }
    let d = ctx.d();
    let basis: Vec<ExactVector> = (1..=d)
        .map(|t| Ok(ctx.scaled_eigenvector(ctx.coord_mask(t)?)?.vec))
        .collect::<Result<_, AlikeError>>()?;
    let images: Vec<ExactVector> = basis
        .iter()
        .map(|w| b.mul_vec(w))
        .collect::<Result<_, _>>()?;
    let scale = ratio(1, n as i64);
    let mut triplets = Vec::new();
    for (t, wt) in basis.iter().enumerate() {
        for (s, img) in images.iter().enumerate() {
            triplets.push((t, s, wt.inner(img)? * &scale));
        }
    }
    Ok(ExactMatrix::from_triplets(d, d, triplets)?)
}

/// `coefficient * W_subset`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SignedSubset {
    pub coefficient: i64,
    pub subset: usize,
}

/// `B_ij W_S` read off the action table: `-4 W_{(S ∪ j) \ i}` when `i ∈ S`,
/// `j ∉ S`; `4 W_{(S ∪ i) \ j}` when `i ∉ S`, `j ∈ S`; zero (`None`) otherwise.
pub fn bij_action_on_ws(
    ctx: &HypercubeContext,
    i: usize,
    j: usize,
    subset: usize,
) -> Result<Option<SignedSubset>, AlikeError> {
    ctx.check_pair(i, j)?;
    ctx.check_subset(subset)?;
    let mi = ctx.coord_mask(i)?;
    let mj = ctx.coord_mask(j)?;
    Ok(match (subset & mi != 0, subset & mj != 0) {
        (true, false) => Some(SignedSubset {
            coefficient: -4,
            subset: (subset | mj) & !mi,
        }),
        (false, true) => Some(SignedSubset {
            coefficient: 4,
            subset: (subset | mi) & !mj,
        }),
        _ => None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(d: usize) -> (Graph, HypercubeContext) {
        crate::hypercube::hypercube(d).unwrap()
    }

    #[test]
    fn support_pattern_order() {
        let g = Graph::path(3);
        let p = SupportPattern::new(&g);
        assert_eq!(
            p.positions(),
            &[(0, 0), (1, 1), (2, 2), (0, 1), (1, 0), (1, 2), (2, 1)]
        );
        assert_eq!(p.index_of(2, 1), Some(6));
        assert_eq!(p.index_of(0, 2), None);
    }

    #[test]
    fn path_p3_is_spanned_by_i_and_a() {
        let g = Graph::path(3);
        let dec = solve_alike(&g).unwrap();
        assert_eq!(
            dec.dims(),
            Dims {
                total: 2,
                sym: 2,
                antisym: 0
            }
        );
        let expected =
            SubspaceBasis::from_matrices(3, 3, [&ExactMatrix::identity(3), &g.adjacency()])
                .unwrap();
        assert_eq!(dec.full, expected);
    }

    #[test]
    fn small_cube_dims() {
        let (g1, _) = q(1);
        assert_eq!(
            solve_alike(&g1).unwrap().dims(),
            Dims {
                total: 2,
                sym: 2,
                antisym: 0
            }
        );
        let (g2, _) = q(2);
        assert_eq!(
            solve_alike(&g2).unwrap().dims(),
            Dims {
                total: 4,
                sym: 3,
                antisym: 1
            }
        );
    }

    #[test]
    fn solver_cap() {
        let g = Graph::path(70);
        assert_eq!(
            solve_alike(&g).unwrap_err(),
            AlikeError::CapExceeded { n: 70, cap: 64 }
        );
    }

    #[test]
    fn is_alike_cases() {
        let (g3, ctx3) = q(3);
        assert!(is_alike(&g3, &ExactMatrix::identity(8)).unwrap().holds());
        assert!(is_alike(&g3, &ctx3.alpha(1).unwrap()).unwrap().holds());
        let (g2, ctx2) = q(2);
        let check = is_alike(&g2, &ctx2.alpha_star(1).unwrap()).unwrap();
        assert!(matches!(check, AlikeCheck::NotCommuting { .. }));
        // J commutes with A on a regular graph but has off-support entries.
        let check = is_alike(&g2, &ExactMatrix::ones(4, 4)).unwrap();
        assert!(matches!(
            check,
            AlikeCheck::OutsideSupport { row: 0, col: 3, .. }
        ));
        assert!(is_alike(&g2, &ExactMatrix::identity(3)).is_err());
    }

    #[test]
    fn b12_on_q2_matches_factored_form() {
        let (_, ctx) = q(2);
        let b = closed_form_antisym_basis(&ctx);
        assert_eq!(b.len(), 1);
        let factored = ctx
            .alpha_star(1)
            .unwrap()
            .matmul(&ctx.alpha_star(2).unwrap())
            .unwrap()
            .matmul(&ctx.alpha(1).unwrap().sub(&ctx.alpha(2).unwrap()).unwrap())
            .unwrap()
            .scale(&rat(2));
        assert_eq!(b[0], factored);
        assert_eq!(b[0].nnz(), 8);
        assert!(b[0]
            .triplets()
            .all(|(_, _, v)| *v == rat(2) || *v == rat(-2)));
        assert!(closed_form_antisym_basis(&q(1).1).is_empty());
    }

    #[test]
    fn residual_of_j_on_q2() {
        let (_, ctx) = q(2);
        let j = ExactMatrix::ones(4, 4);
        let r = characterization_residual(&ctx, &j, 1, 2).unwrap();
        // Antipodal pairs of Q_2 are {00, 11} and {01, 10}; each factor is ±2.
        let expected = ExactMatrix::from_triplets(
            4,
            4,
            [
                (0, 3, rat(4)),
                (3, 0, rat(4)),
                (1, 2, rat(-4)),
                (2, 1, rat(-4)),
            ],
        )
        .unwrap();
        assert_eq!(r, expected);
        assert!(
            characterization_residual(&ctx, &ExactMatrix::identity(4), 1, 2)
                .unwrap()
                .is_zero()
        );
        assert!(characterization_residual(&ctx, &j, 2, 1).is_err());
        assert!(characterization_residual(&ctx, &j, 1, 3).is_err());
    }

    #[test]
    fn restriction_examples() {
        let (_, ctx) = q(3);
        let a = ctx.adjacency();
        assert_eq!(
            restriction_to_e1(&ctx, &a).unwrap(),
            ExactMatrix::identity(3)
        );
        assert_eq!(
            restriction_to_e1(&ctx, &ExactMatrix::identity(8)).unwrap(),
            ExactMatrix::identity(3)
        );
        let b12 = bij(&ctx, 1, 2).unwrap();
        let m = restriction_to_e1(&ctx, &b12).unwrap();
        let expected = ExactMatrix::from_triplets(3, 3, [(0, 1, rat(4)), (1, 0, rat(-4))]).unwrap();
        assert_eq!(m, expected);
        let err = restriction_to_e1(&ctx, &ctx.alpha_star(1).unwrap()).unwrap_err();
        assert!(matches!(err, AlikeError::NotCommuting { .. }));
    }

    #[test]
    fn action_table_examples() {
        let (_, ctx2) = q(2);
        let s1 = ctx2.subset(&[1]).unwrap();
        assert_eq!(
            bij_action_on_ws(&ctx2, 1, 2, s1).unwrap(),
            Some(SignedSubset {
                coefficient: -4,
                subset: ctx2.subset(&[2]).unwrap()
            })
        );
        assert_eq!(bij_action_on_ws(&ctx2, 1, 2, 0).unwrap(), None);
        let (_, ctx3) = q(3);
        assert_eq!(
            bij_action_on_ws(&ctx3, 1, 2, ctx3.subset(&[2]).unwrap()).unwrap(),
            Some(SignedSubset {
                coefficient: 4,
                subset: ctx3.subset(&[1]).unwrap()
            })
        );
        assert!(bij_action_on_ws(&ctx3, 2, 2, 0).is_err());
        assert!(bij_action_on_ws(&ctx3, 1, 2, 8).is_err());
    }
}
