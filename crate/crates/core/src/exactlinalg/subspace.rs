use super::echelon::Echelon;
use super::{rat, unvectorize, vectorize, ExactMatrix, ExactVector, LinalgError};

/// A subspace of `Q^ambient_dim` stored as its unique reduced row-echelon
/// basis: every vector has leading entry 1, pivots strictly increase, and all
/// other vectors vanish at each pivot. Two subspaces are equal exactly when
/// their bases are equal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubspaceBasis {
    ambient_dim: usize,
    vectors: Vec<ExactVector>,
}

impl SubspaceBasis {
    pub fn zero(ambient_dim: usize) -> Self {
        Self {
            ambient_dim,
            vectors: Vec::new(),
        }
    }

    /// The whole space, basis = standard unit vectors.
    pub fn full(ambient_dim: usize) -> Self {
        Self {
            ambient_dim,
            vectors: (0..ambient_dim)
                .map(|i| ExactVector::unit(ambient_dim, i))
                .collect(),
        }
    }

    /// Canonical basis of the span of `vectors`.
    pub fn from_vectors<'a>(
        ambient_dim: usize,
        vectors: impl IntoIterator<Item = &'a ExactVector>,
    ) -> Result<Self, LinalgError> {
        let mut echelon = Echelon::new();
        for v in vectors {
            if v.len() != ambient_dim {
                return Err(LinalgError::LengthMismatch {
                    expected: ambient_dim,
                    found: v.len(),
                });
            }
            echelon.insert(v.entries());
        }
        Ok(Self {
            ambient_dim,
            vectors: echelon.into_rref(ambient_dim),
        })
    }

    /// Span of `rows x cols` matrices, vectorized row-major.
    pub fn from_matrices<'a>(
        rows: usize,
        cols: usize,
        matrices: impl IntoIterator<Item = &'a ExactMatrix>,
    ) -> Result<Self, LinalgError> {
        let mut vecs = Vec::new();
        for m in matrices {
            if m.dims() != (rows, cols) {
                return Err(LinalgError::DimensionMismatch {
                    op: "from_matrices",
                    left: (rows, cols),
                    right: m.dims(),
                });
            }
            vecs.push(vectorize(m));
        }
        Self::from_vectors(rows * cols, &vecs)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[ExactVector] {
        &self.vectors
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.vectors
            .iter()
            .map(|v| v.leading().expect("basis vectors are nonzero").0)
            .collect()
    }

    /// Basis vectors reshaped into matrices.
    pub fn to_matrices(&self, rows: usize, cols: usize) -> Result<Vec<ExactMatrix>, LinalgError> {
        self.vectors
            .iter()
            .map(|v| unvectorize(v, rows, cols))
            .collect()
    }

    /// Membership test by reduction against the echelon basis.
    pub fn contains(&self, v: &ExactVector) -> Result<bool, LinalgError> {
        if v.len() != self.ambient_dim {
            return Err(LinalgError::LengthMismatch {
                expected: self.ambient_dim,
                found: v.len(),
            });
        }
        let mut rest = v.clone();
        for b in &self.vectors {
            let (pivot, _) = b.leading().expect("basis vectors are nonzero");
            let coeff = rest.get(pivot);
            if coeff != rat(0) {
                rest = rest.add_scaled(b, &-coeff)?;
            }
        }
        Ok(rest.is_zero())
    }

    /// Canonical basis of `self + other`.
    pub fn sum(&self, other: &SubspaceBasis) -> Result<SubspaceBasis, LinalgError> {
        check_ambient(self, other)?;
        Self::from_vectors(self.ambient_dim, self.vectors.iter().chain(&other.vectors))
    }
}

fn check_ambient(a: &SubspaceBasis, b: &SubspaceBasis) -> Result<(), LinalgError> {
    if a.ambient_dim != b.ambient_dim {
        return Err(LinalgError::AmbientMismatch {
            left: a.ambient_dim,
            right: b.ambient_dim,
        });
    }
    Ok(())
}

/// Whether two subspaces coincide, by comparing canonical forms.
pub fn span_equal(a: &SubspaceBasis, b: &SubspaceBasis) -> Result<bool, LinalgError> {
    check_ambient(a, b)?;
    Ok(a.vectors == b.vectors)
}

pub fn rank(m: &ExactMatrix) -> usize {
    let mut echelon = Echelon::new();
    for r in 0..m.rows() {
        echelon.insert(m.row(r));
    }
    echelon.rank()
}

/// Canonical basis of `{ v : m v = 0 }`.
pub fn nullspace(m: &ExactMatrix) -> SubspaceBasis {
    let ncols = m.cols();
    let mut echelon = Echelon::new();
    for r in 0..m.rows() {
        echelon.insert(m.row(r));
    }
    let rref = echelon.into_rref(ncols);
    let mut is_pivot = vec![false; ncols];
    for row in &rref {
        is_pivot[row.leading().expect("nonzero").0] = true;
    }
    // Free column f contributes e_f - sum over pivot rows of rref[p][f] e_p.
    let mut columns: Vec<Vec<(usize, super::Rational)>> = vec![Vec::new(); ncols];
    for row in &rref {
        let (pivot, _) = row.leading().expect("nonzero");
        for (c, q) in row.entries().iter().skip(1) {
            columns[*c].push((pivot, -q.clone()));
        }
    }
    let generators: Vec<ExactVector> = (0..ncols)
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut entries = std::mem::take(&mut columns[f]);
            entries.push((f, rat(1)));
            ExactVector::from_entries(ncols, entries).expect("indices in range")
        })
        .collect();
    SubspaceBasis::from_vectors(ncols, &generators).expect("lengths match")
}
